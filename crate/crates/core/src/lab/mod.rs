//! Concrete exact arithmetic for checking the valuation-theoretic
//! constructions on actual elements: scalars of a complete discretely valued
//! field (rationals with the p-adic valuation, or truncated Laurent series
//! over `F_p`), quaternion algebras over them, and their residue algebras.

pub mod fp2;
pub mod laurent;
pub mod larmour;
pub mod padic;
pub mod pid;
pub mod quaternion;

use std::fmt;

use num_rational::BigRational;
use rand::rngs::StdRng;

use crate::error::{Error, Result};

pub use fp2::Fp2;
pub use laurent::LaurentSeries;
pub use larmour::{larmour_decompose, symmetrize, LarmourReport, ResidueForm, ResidueInvolution};
pub use padic::PadicRational;
pub use pid::{choose_pid, choose_sigma, Check, PidChoice, PidReport, SigmaChoice, SigmaReport};
pub use quaternion::{Quat, QuatAlgebra};

/// Scalars of a concrete complete discretely valued field with residue
/// field `F_p`. Constants are created relative to an existing value, which
/// carries the context (prime, working precision).
pub trait LocalField: Clone + fmt::Debug + fmt::Display + PartialEq + Sized {
    fn prime(&self) -> u64;
    fn constant(&self, r: &BigRational) -> Result<Self>;
    fn int(&self, n: i64) -> Self;
    /// The uniformizer (`p` or `t`).
    fn uniformizer(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self>;
    /// `None` for zero. Truncated values that are zero to the known
    /// precision give [`Error::PrecisionLoss`].
    fn valuation(&self) -> Result<Option<i64>>;
    /// Reduction modulo the maximal ideal; requires valuation `>= 0`.
    fn residue(&self) -> Result<u64>;
    /// No nonzero coefficient is known.
    fn is_zero(&self) -> bool;
    /// A random element of valuation `>= 0`.
    fn random_integral(&self, rng: &mut StdRng) -> Self;
    /// Parses a scalar literal in this field's notation.
    fn parse_scalar(&self, s: &str) -> Result<Self>;
}

/// Runs `f` at precision `n`, doubling it on precision loss (only the
/// Laurent model ever reports that).
pub fn with_precision_retry<T>(start: usize, mut f: impl FnMut(usize) -> Result<T>) -> Result<T> {
    let mut n = start.max(1);
    let mut last = None;
    for _ in 0..6 {
        match f(n) {
            Err(Error::PrecisionLoss(msg)) => {
                last = Some(msg);
                n *= 2;
            }
            other => return other,
        }
    }
    Err(Error::PrecisionLoss(last.unwrap_or_default()))
}

/// Working precision of the Laurent model: `HERMLAB_PRECISION`, default 8.
pub fn default_precision() -> usize {
    std::env::var("HERMLAB_PRECISION")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or(8)
}

/// Which concrete field the lab computes in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Rationals inside `Q_p`.
    Padic,
    /// Truncated Laurent series in `F_p((t))`.
    Laurent,
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "padic" | "p-adic" | "qp" => Ok(Model::Padic),
            "laurent" | "fp((t))" => Ok(Model::Laurent),
            other => Err(Error::Parse { pos: 0, msg: format!("unknown model {other:?} (padic, laurent)") }),
        }
    }
}

fn parse_symbol<F: LocalField>(zero: &F, s: &str) -> Result<QuatAlgebra<F>> {
    let t = s.trim();
    let inner = t
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::Parse { pos: 0, msg: format!("expected a symbol (a,b), got {t:?}") })?;
    let (a, b) = inner
        .split_once(',')
        .ok_or_else(|| Error::Parse { pos: 1, msg: "expected two entries separated by a comma".into() })?;
    QuatAlgebra::new(zero.parse_scalar(a)?, zero.parse_scalar(b)?)
}

/// Everything needed to rerun a lab computation from text input.
#[derive(Clone, Debug)]
pub struct LabInput {
    pub model: Model,
    pub p: u64,
    pub symbol: String,
    pub sigma: SigmaChoice,
    pub t: String,
}

impl LabInput {
    pub fn new(model: Model, p: u64, symbol: &str, sigma: SigmaChoice, t: &str) -> Result<Self> {
        if !crate::arith::is_prime(p) || p == 2 {
            return Err(Error::invalid(format!("p = {p} must be an odd prime")));
        }
        Ok(LabInput { model, p, symbol: symbol.into(), sigma, t: t.into() })
    }

    fn pid_in<F: LocalField>(&self, zero: &F) -> Result<(QuatAlgebra<F>, PidChoice<F>)> {
        let alg = parse_symbol(zero, &self.symbol)?;
        let t = alg.parse(&self.t)?;
        let pid = choose_pid(&alg, self.sigma, &t)?;
        Ok((alg, pid))
    }

    fn larmour_in<F: LocalField>(&self, zero: &F, eps: i8, form: &[String], repair: bool) -> Result<LarmourReport> {
        let (alg, pid) = self.pid_in(zero)?;
        let mut entries = Vec::new();
        for e in form {
            let d = alg.parse(e)?;
            entries.push(if repair { symmetrize(&alg, self.sigma, eps, &d)? } else { d });
        }
        larmour_decompose(&alg, &pid, eps, &entries)
    }

    /// Runs [`choose_pid`] and returns its report.
    pub fn pid_report(&self) -> Result<PidReport> {
        match self.model {
            Model::Padic => Ok(self.pid_in(&PadicRational::from_int(0, self.p))?.1.report),
            Model::Laurent => with_precision_retry(default_precision(), |n| {
                Ok(self.pid_in(&LaurentSeries::constant_mod(self.p, 0, n))?.1.report)
            }),
        }
    }

    /// Runs [`larmour_decompose`] on the comma-separated entries of `form`
    /// (each a quaternion such as `3 + 2i - j`). With `repair`, entries are
    /// first replaced by `(b + eps sigma(b)) / 2`.
    pub fn larmour_report(&self, eps: i8, form: &[String], repair: bool) -> Result<LarmourReport> {
        match self.model {
            Model::Padic => self.larmour_in(&PadicRational::from_int(0, self.p), eps, form, repair),
            Model::Laurent => with_precision_retry(default_precision(), |n| {
                self.larmour_in(&LaurentSeries::constant_mod(self.p, 0, n), eps, form, repair)
            }),
        }
    }

    /// Same as [`LabInput::larmour_report`] at an explicit Laurent precision.
    pub fn larmour_report_at(&self, precision: usize, eps: i8, form: &[String], repair: bool) -> Result<LarmourReport> {
        match self.model {
            Model::Padic => self.larmour_report(eps, form, repair),
            Model::Laurent => self.larmour_in(&LaurentSeries::constant_mod(self.p, 0, precision), eps, form, repair),
        }
    }
}

/// Splits a comma-separated list of entries.
pub fn split_form(s: &str) -> Vec<String> {
    s.split(',').map(|e| e.trim().to_string()).filter(|e| !e.is_empty()).collect()
}
