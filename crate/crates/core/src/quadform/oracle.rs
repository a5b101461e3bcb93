//! Isotropy over `Q_p` (odd `p`) from the classical invariants: dimension,
//! discriminant and Hasse invariant, with Hilbert symbols evaluated from
//! Legendre symbols on concrete integer representatives.
//!
//! Shares nothing with the residue recursion in the parent module.

use crate::arith::{least_nonresidue, legendre};
use crate::error::{Error, Result};
use crate::fields::FieldDesc;

use super::QuadForm;

/// Nonzero rational integer `p^val * unit` with `unit` prime to `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct PadicInt {
    val: u32,
    unit: i128,
}

impl PadicInt {
    fn new(mut n: i128, p: u64) -> Self {
        assert!(n != 0);
        let p = p as i128;
        let mut val = 0;
        while n % p == 0 {
            n /= p;
            val += 1;
        }
        PadicInt { val, unit: n }
    }

    fn mul(self, other: PadicInt, p: u64) -> PadicInt {
        // keep the unit reduced so products of many entries stay small
        let unit = (self.unit * other.unit).rem_euclid(p as i128);
        PadicInt { val: self.val + other.val, unit }
    }

    fn neg(self) -> PadicInt {
        PadicInt { val: self.val, unit: -self.unit }
    }

    fn leg(self, p: u64) -> i8 {
        legendre((self.unit.rem_euclid(p as i128)) as i64, p)
    }

    fn is_square(self, p: u64) -> bool {
        self.val.is_multiple_of(2) && self.leg(p) == 1
    }
}

/// Hilbert symbol `(a, b)_p` for odd `p`:
/// `(-1)^(αβ(p-1)/2) (u/p)^β (v/p)^α` with `a = p^α u`, `b = p^β v`.
fn hilbert(a: PadicInt, b: PadicInt, p: u64) -> i8 {
    let alpha = a.val as u64;
    let beta = b.val as u64;
    let mut s: i8 = if (alpha * beta * ((p - 1) / 2)) % 2 == 1 { -1 } else { 1 };
    if beta % 2 == 1 {
        s *= a.leg(p);
    }
    if alpha % 2 == 1 {
        s *= b.leg(p);
    }
    s
}

fn concrete_entries(q: &QuadForm) -> Result<(u64, Vec<PadicInt>)> {
    let p = match &q.field {
        FieldDesc::Cdv(inner) => match inner.as_ref() {
            FieldDesc::Finite { p, e: 1 } => *p,
            _ => {
                return Err(Error::invalid(format!(
                    "the invariant oracle only handles CDV(F_p), got {}",
                    q.field
                )))
            }
        },
        _ => {
            return Err(Error::invalid(format!(
                "the invariant oracle only handles CDV(F_p), got {}",
                q.field
            )))
        }
    };
    let nonresidue = least_nonresidue(p) as i128;
    let entries = q
        .entries
        .iter()
        .map(|a| {
            let mut n: i128 = 1;
            if a.unit & 1 == 1 {
                n *= nonresidue;
            }
            if a.vpar & 1 == 1 {
                n *= p as i128;
            }
            PadicInt::new(n, p)
        })
        .collect();
    Ok((p, entries))
}

/// Integer representatives used for a form, e.g. `<1, 2, 5, 10>` over `Q_5`.
pub fn oracle_lift(q: &QuadForm) -> Result<Vec<i128>> {
    let (p, entries) = concrete_entries(q)?;
    Ok(entries
        .iter()
        .map(|e| e.unit * (p as i128).pow(e.val))
        .collect())
}

pub fn qf_is_isotropic_oracle(q: &QuadForm) -> Result<bool> {
    let (p, a) = concrete_entries(q)?;
    let n = a.len();
    if n <= 1 {
        return Ok(false);
    }
    if n >= 5 {
        return Ok(true);
    }
    let one = PadicInt { val: 0, unit: 1 };
    let d = a.iter().fold(one, |acc, x| acc.mul(*x, p));
    let mut hasse: i8 = 1;
    for i in 0..n {
        for j in i + 1..n {
            hasse *= hilbert(a[i], a[j], p);
        }
    }
    let minus_one = PadicInt { val: 0, unit: -1 };
    Ok(match n {
        2 => d.neg().is_square(p),
        3 => hasse == hilbert(minus_one, d.neg(), p),
        4 => !d.is_square(p) || hasse == hilbert(minus_one, minus_one, p),
        _ => unreachable!(),
    })
}
