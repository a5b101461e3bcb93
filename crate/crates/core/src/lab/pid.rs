//! Choosing the involution and a `sigma`-symmetric or skew parameter of a
//! ramified quaternion division algebra, with every claimed property
//! checked by exact arithmetic.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;

use crate::error::{Error, Result};

use super::fp2::Fp2;
use super::quaternion::{Quat, QuatAlgebra};
use super::LocalField;

/// The two involutions the lab works with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaChoice {
    /// `Int(i)∘γ`: negates `i`, fixes `j` and `ij` (orthogonal).
    IntIGamma,
    /// The canonical involution `γ` (symplectic).
    Gamma,
}

impl SigmaChoice {
    pub fn apply<F: LocalField>(&self, alg: &QuatAlgebra<F>, x: &Quat<F>) -> Quat<F> {
        match self {
            SigmaChoice::Gamma => alg.conj(x),
            SigmaChoice::IntIGamma => Quat { c: [x.c[0].clone(), x.c[1].neg(), x.c[2].clone(), x.c[3].clone()] },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SigmaChoice::IntIGamma => "inti-gamma",
            SigmaChoice::Gamma => "gamma",
        }
    }
}

impl fmt::Display for SigmaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SigmaChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inti-gamma" | "int(i)gamma" | "int-i-gamma" => Ok(SigmaChoice::IntIGamma),
            "gamma" | "canonical" => Ok(SigmaChoice::Gamma),
            other => Err(Error::Parse { pos: 0, msg: format!("unknown involution {other:?} (inti-gamma, gamma)") }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(checks: &mut Vec<Check>, name: &str, passed: bool, detail: impl Into<String>) {
    checks.push(Check { name: name.into(), passed, detail: detail.into() });
}

fn all_passed(checks: &[Check]) -> Result<()> {
    match checks.iter().find(|c| !c.passed) {
        None => Ok(()),
        Some(c) => Err(Error::internal(format!("check {} failed: {}", c.name, c.detail))),
    }
}

fn show_half(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaReport {
    pub sigma: SigmaChoice,
    pub alpha: String,
    /// Dimension of the `sigma`-symmetric elements.
    pub symmetric_dimension: usize,
    pub checks: Vec<Check>,
}

/// Verifies the properties of an involution on `D`: it is an
/// anti-automorphism of order two, preserves `w`, and `alpha = i` satisfies
/// `sigma(alpha) = -alpha` with `alpha^2` a unit. Also records whether the
/// involution induces the nontrivial automorphism of the residue field.
pub fn sigma_checks<F: LocalField>(alg: &QuatAlgebra<F>, sigma: SigmaChoice) -> Result<SigmaReport> {
    alg.check_presentation()?;
    let mut checks = Vec::new();
    let basis = [alg.one(), alg.i(), alg.j(), alg.ij()];
    let twice = basis.iter().all(|e| alg.eq(&sigma.apply(alg, &sigma.apply(alg, e)), e));
    check(&mut checks, "order two", twice, "sigma(sigma(e)) = e on 1, i, j, ij");

    let mut rng = StdRng::seed_from_u64(0x5eed);
    let random = |rng: &mut StdRng| Quat { c: std::array::from_fn(|_| alg.a.random_integral(rng)) };
    let mut anti = true;
    let mut keeps_w = true;
    for _ in 0..100 {
        let x = random(&mut rng);
        let y = random(&mut rng);
        let lhs = sigma.apply(alg, &alg.mul(&x, &y));
        let rhs = alg.mul(&sigma.apply(alg, &y), &sigma.apply(alg, &x));
        anti &= alg.eq(&lhs, &rhs);
        if let Ok(wx) = alg.w(&x) {
            keeps_w &= alg.w(&sigma.apply(alg, &x))? == wx;
        }
    }
    check(&mut checks, "anti-automorphism", anti, "sigma(xy) = sigma(y)sigma(x) on 100 random integral pairs");
    check(&mut checks, "preserves w", keeps_w, "w(sigma(x)) = w(x) on the same sample");

    let sym = basis.iter().filter(|e| alg.eq(&sigma.apply(alg, e), e)).count();
    check(
        &mut checks,
        "first kind",
        alg.eq(&sigma.apply(alg, &alg.one()), &alg.one()),
        format!("sigma fixes the center; symmetric dimension {sym}"),
    );

    let alpha = alg.i();
    let s_alpha = sigma.apply(alg, &alpha);
    check(&mut checks, "sigma(alpha) = -alpha", alg.eq(&s_alpha, &alg.neg(&alpha)), format!("alpha = {}", alg.show(&alpha)));
    let sq = alg.mul(&alpha, &alpha);
    let sq_unit = alg.eq(&sq, &alg.scalar(alg.a.clone())) && alg.a.valuation()? == Some(0);
    check(&mut checks, "alpha^2 unit", sq_unit, format!("alpha^2 = {}", alg.show(&sq)));

    // sigma(alpha) alpha^{-1} reduces to -1: the residue involution moves sqrt(a)
    let ratio = alg.residue(&alg.mul(&s_alpha, &alg.inv(&alpha)?))?;
    let a_bar = alg.residue(&alpha)?;
    check(
        &mut checks,
        "second kind on residue",
        ratio == Fp2::new(ratio.p, ratio.u, 1, 0).neg() && !a_bar.in_base(),
        format!("residue of sigma(alpha) alpha^-1 = {ratio}"),
    );
    Ok(SigmaReport { sigma, alpha: alg.show(&alpha), symmetric_dimension: sym, checks })
}

/// The involution `Int(i)∘γ`: orthogonal on `D`, of the second kind on the
/// residue field. Errors on a split pair.
pub fn choose_sigma<F: LocalField>(alg: &QuatAlgebra<F>) -> Result<SigmaReport> {
    let r = sigma_checks(alg, SigmaChoice::IntIGamma)?;
    all_passed(&r.checks)?;
    if r.symmetric_dimension != 3 {
        return Err(Error::internal(format!("Int(i)∘γ has symmetric dimension {}", r.symmetric_dimension)));
    }
    Ok(r)
}

#[derive(Clone, Debug, Serialize)]
pub struct PidReport {
    pub symbol: String,
    pub sigma: SigmaChoice,
    pub t: String,
    pub case: u8,
    pub pi_d: String,
    pub eps_prime: i8,
    pub w_t: String,
    pub w_pi: String,
    /// Residue of `sigma(t) t^{-1}`.
    pub sigma_ratio: String,
    /// Residue of `pi_D t^{-1}`.
    pub pi_ratio: String,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug)]
pub struct PidChoice<F> {
    pub pi_d: Quat<F>,
    pub eps_prime: i8,
    pub case: u8,
    pub sigma: SigmaChoice,
    pub report: PidReport,
}

/// From a parameter `t` (half-integral `w`) builds `pi_D` with
/// `sigma(pi_D) = eps' pi_D`, `w(pi_D) = w(t)` and `Int(pi_D)∘sigma` of the
/// first kind on the residue algebra:
///
/// * if `sigma(t) t^{-1}` reduces to 1, `pi_D = t + sigma(t)`, `eps' = 1`;
/// * otherwise `pi_D = alpha t - sigma(alpha t)`, `eps' = -1`, `alpha = i`.
pub fn choose_pid<F: LocalField>(alg: &QuatAlgebra<F>, sigma: SigmaChoice, t: &Quat<F>) -> Result<PidChoice<F>> {
    let base = sigma_checks(alg, sigma)?;
    all_passed(&base.checks)?;
    if alg.is_zero(t) {
        return Err(Error::invalid("parameter must be nonzero"));
    }
    let w_t = alg.w(t)?;
    let two = BigRational::from_integer(2.into());
    if (&w_t * &two).to_integer().is_even() {
        return Err(Error::invalid(format!(
            "{} has w = {}, not an odd multiple of 1/2",
            alg.show(t),
            show_half(&w_t)
        )));
    }
    let mut checks = base.checks;
    let t_inv = alg.inv(t)?;
    let s_t = sigma.apply(alg, t);
    let ratio = alg.residue(&alg.mul(&s_t, &t_inv))?;
    let alpha = alg.i();
    let a_bar = alg.residue(&alpha)?;

    let (case, pi, eps) = if ratio.is_one() {
        (1u8, alg.add(t, &s_t), 1i8)
    } else {
        let at = alg.mul(&alpha, t);
        (2u8, alg.sub(&at, &sigma.apply(alg, &at)), -1i8)
    };

    let s_pi = sigma.apply(alg, &pi);
    let signed = if eps == 1 { pi.clone() } else { alg.neg(&pi) };
    check(&mut checks, "sigma(pi_D) = eps' pi_D", alg.eq(&s_pi, &signed), format!("eps' = {eps:+}"));

    let w_pi = if alg.is_zero(&pi) { None } else { Some(alg.w(&pi)?) };
    check(
        &mut checks,
        "w(pi_D) = w(t)",
        w_pi.as_ref() == Some(&w_t),
        format!("w(t) = {}, w(pi_D) = {}", show_half(&w_t), w_pi.as_ref().map(show_half).unwrap_or("inf".into())),
    );
    if w_pi.is_none() {
        all_passed(&checks)?;
    }

    let pi_inv = alg.inv(&pi)?;
    let pi_ratio = alg.residue(&alg.mul(&pi, &t_inv))?;
    // 1 + ratio in case 1, (1 - ratio) alpha in case 2
    let one = Fp2::new(ratio.p, ratio.u, 1, 0);
    let expected_ratio = match case {
        1 => one.add(&ratio),
        _ => one.add(&ratio.neg()).mul(&a_bar),
    };
    check(
        &mut checks,
        "residue of pi_D t^-1",
        pi_ratio == expected_ratio && !pi_ratio.is_zero(),
        format!("{pi_ratio} (expected {expected_ratio})"),
    );

    let twisted = alg.residue(&alg.mul(&alg.mul(&pi, &sigma.apply(alg, &alpha)), &pi_inv))?;
    check(
        &mut checks,
        "Int(pi_D)∘sigma fixes residue of alpha",
        twisted == a_bar,
        format!("residue of pi_D sigma(alpha) pi_D^-1 = {twisted}"),
    );

    if case == 2 {
        let conj_sum = alg.add(&alg.mul(&alg.mul(&pi, &alpha), &pi_inv), &alpha);
        let chain = alg.residue(&alg.mul(&conj_sum, &alg.mul(&pi, &t_inv)))?;
        check(
            &mut checks,
            "residue of (pi_D alpha pi_D^-1 + alpha) pi_D t^-1 = 0",
            chain.is_zero() && alg.residue(&conj_sum)?.is_zero(),
            format!("{chain}"),
        );
    }

    let report = PidReport {
        symbol: format!("({},{})", alg.a, alg.b),
        sigma,
        t: alg.show(t),
        case,
        pi_d: alg.show(&pi),
        eps_prime: eps,
        w_t: show_half(&w_t),
        w_pi: w_pi.as_ref().map(show_half).unwrap_or_default(),
        sigma_ratio: ratio.to_string(),
        pi_ratio: pi_ratio.to_string(),
        checks,
    };
    all_passed(&report.checks)?;
    Ok(PidChoice { pi_d: pi, eps_prime: eps, case, sigma, report })
}

/// `w(x)` as an exact half-integer, for reports.
pub fn w_string<F: LocalField>(alg: &QuatAlgebra<F>, x: &Quat<F>) -> Result<String> {
    alg.w(x).map(|w| show_half(&w))
}
