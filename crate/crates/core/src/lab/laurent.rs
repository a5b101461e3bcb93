use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::rngs::StdRng;
use rand::Rng;

use crate::arith::inv_mod;
use crate::error::{Error, Result};

use super::LocalField;

/// Laurent series over `F_p` known modulo `t^prec` (`prec = None` means the
/// value is an exact Laurent polynomial).
///
/// `coeffs[k]` is the coefficient of `t^(start + k)`; after normalization the
/// first coefficient is nonzero, so an empty vector is zero to the known
/// precision. `rel` is the relative precision used when an inverse has to be
/// truncated.
#[derive(Clone, Debug)]
pub struct LaurentSeries {
    p: u64,
    start: i64,
    coeffs: Vec<u64>,
    prec: Option<i64>,
    rel: usize,
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl LaurentSeries {
    /// The exact constant `c`.
    pub fn constant_mod(p: u64, c: i64, rel: usize) -> Self {
        Self::from_coeffs(p, 0, vec![c.rem_euclid(p as i64) as u64], None, rel)
    }

    pub fn from_coeffs(p: u64, start: i64, coeffs: Vec<u64>, prec: Option<i64>, rel: usize) -> Self {
        let mut s = LaurentSeries { p, start, coeffs: coeffs.into_iter().map(|c| c % p).collect(), prec, rel };
        s.normalize();
        s
    }

    pub fn precision(&self) -> Option<i64> {
        self.prec
    }

    pub fn relative_precision(&self) -> usize {
        self.rel
    }

    pub fn with_relative_precision(&self, rel: usize) -> Self {
        LaurentSeries { rel, ..self.clone() }
    }

    /// Coefficient of `t^e` (zero outside the stored range).
    pub fn coeff(&self, e: i64) -> u64 {
        let k = e - self.start;
        if k < 0 {
            return 0;
        }
        self.coeffs.get(k as usize).copied().unwrap_or(0)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().take_while(|&&c| c == 0).count();
        self.coeffs.drain(..lead);
        self.start += lead as i64;
        if let Some(prec) = self.prec {
            let keep = (prec - self.start).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.start = self.prec.unwrap_or(0);
        }
    }

    /// Lower bound for the valuation.
    fn low(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            self.prec
        } else {
            Some(self.start)
        }
    }

    fn wrap(&self, start: i64, coeffs: Vec<u64>, prec: Option<i64>) -> Self {
        Self::from_coeffs(self.p, start, coeffs, prec, self.rel.max(1))
    }

    fn combine(&self, o: &Self, sign: bool) -> Self {
        let prec = min_prec(self.prec, o.prec);
        if self.coeffs.is_empty() && o.coeffs.is_empty() {
            return self.wrap(0, vec![], prec);
        }
        let lo = match (self.coeffs.is_empty(), o.coeffs.is_empty()) {
            (true, _) => o.start,
            (_, true) => self.start,
            _ => self.start.min(o.start),
        };
        let hi = (self.start + self.coeffs.len() as i64).max(o.start + o.coeffs.len() as i64);
        let p = self.p;
        let coeffs = (lo..hi)
            .map(|e| {
                let b = o.coeff(e);
                let b = if sign { b } else { (p - b) % p };
                (self.coeff(e) + b) % p
            })
            .collect();
        self.wrap(lo, coeffs, prec)
    }

    /// Inverse of a unit power series to `n` terms.
    fn unit_inverse(u: &[u64], n: usize, p: u64) -> Vec<u64> {
        let u0_inv = inv_mod(u[0], p).expect("leading coefficient is nonzero") as u128;
        let p128 = p as u128;
        let mut out = vec![0u64; n];
        for k in 0..n {
            let mut s: u128 = if k == 0 { 1 } else { 0 };
            for j in 1..=k.min(u.len() - 1) {
                s = (s + p128 * p128 - (u[j] as u128 * out[k - j] as u128) % p128) % p128;
            }
            out[k] = ((s * u0_inv) % p128) as u64;
        }
        out
    }

    fn parse_coefficient(&self, s: &str) -> Result<u64> {
        let bad = || Error::Parse { pos: 0, msg: format!("malformed coefficient {s:?}") };
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let p = BigInt::from(self.p);
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        let n = n.mod_floor(&p).to_u64().ok_or_else(bad)?;
        let d = d.mod_floor(&p).to_u64().ok_or_else(bad)?;
        let d_inv = inv_mod(d, self.p)
            .ok_or_else(|| Error::invalid(format!("denominator of {s:?} vanishes mod {}", self.p)))?;
        Ok(((n as u128 * d_inv as u128) % self.p as u128) as u64)
    }
}

impl PartialEq for LaurentSeries {
    /// Equality to the common known precision.
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.sub(other).coeffs.is_empty()
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let e = self.start + k as i64;
            terms.push(match (c, e) {
                (c, 0) => format!("{c}"),
                (1, 1) => "t".to_string(),
                (c, 1) => format!("{c}*t"),
                (1, e) => format!("t^{e}"),
                (c, e) => format!("{c}*t^{e}"),
            });
        }
        if let Some(prec) = self.prec {
            terms.push(format!("O(t^{prec})"));
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", terms.join(" + "))
    }
}

impl LocalField for LaurentSeries {
    fn prime(&self) -> u64 {
        self.p
    }

    fn constant(&self, r: &BigRational) -> Result<Self> {
        let c = self.parse_coefficient(&format!("{}/{}", r.numer(), r.denom()))?;
        Ok(self.wrap(0, vec![c], None))
    }

    fn int(&self, n: i64) -> Self {
        Self::constant_mod(self.p, n, self.rel)
    }

    fn uniformizer(&self) -> Self {
        self.wrap(1, vec![1], None)
    }

    fn add(&self, o: &Self) -> Self {
        self.combine(o, true)
    }

    fn sub(&self, o: &Self) -> Self {
        self.combine(o, false)
    }

    fn mul(&self, o: &Self) -> Self {
        let exact_zero = |s: &Self| s.coeffs.is_empty() && s.prec.is_none();
        if exact_zero(self) || exact_zero(o) {
            return self.wrap(0, vec![], None);
        }
        let plus = |v: Option<i64>, q: Option<i64>| match (v, q) {
            (Some(v), Some(q)) => Some(v + q),
            _ => None,
        };
        let prec = min_prec(plus(self.low(), o.prec), plus(o.low(), self.prec));
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return self.wrap(0, vec![], prec);
        }
        let p = self.p as u128;
        let mut out = vec![0u128; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u128 * b as u128) % p;
            }
        }
        self.wrap(self.start + o.start, out.into_iter().map(|c| c as u64).collect(), prec)
    }

    fn neg(&self) -> Self {
        let p = self.p;
        self.wrap(self.start, self.coeffs.iter().map(|&c| (p - c) % p).collect(), self.prec)
    }

    fn inv(&self) -> Result<Self> {
        let Some(v) = self.valuation()? else {
            return Err(Error::invalid("division by zero"));
        };
        if self.prec.is_none() && self.coeffs.len() == 1 {
            let c = inv_mod(self.coeffs[0], self.p).expect("nonzero coefficient");
            return Ok(self.wrap(-v, vec![c], None));
        }
        let r = match self.prec {
            Some(prec) => (prec - v) as usize,
            None => self.rel.max(1),
        };
        let inv = Self::unit_inverse(&self.coeffs, r, self.p);
        Ok(self.wrap(-v, inv, Some(-v + r as i64)))
    }

    fn valuation(&self) -> Result<Option<i64>> {
        match (self.coeffs.is_empty(), self.prec) {
            (false, _) => Ok(Some(self.start)),
            (true, None) => Ok(None),
            (true, Some(prec)) => Err(Error::PrecisionLoss(format!("value is O(t^{prec}), valuation unknown"))),
        }
    }

    fn residue(&self) -> Result<u64> {
        if self.coeffs.is_empty() {
            return match self.prec {
                Some(prec) if prec < 1 => Err(Error::PrecisionLoss(format!("value is O(t^{prec}), residue unknown"))),
                _ => Ok(0),
            };
        }
        if self.start < 0 {
            return Err(Error::invalid(format!("{self} is not integral")));
        }
        Ok(self.coeff(0))
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn random_integral(&self, rng: &mut StdRng) -> Self {
        let len = rng.gen_range(1..=4);
        let coeffs = (0..len).map(|_| rng.gen_range(0..self.p)).collect();
        self.wrap(0, coeffs, None)
    }

    fn parse_scalar(&self, s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse { pos: 0, msg: "empty scalar".into() });
        }
        let mut acc = self.wrap(0, vec![], None);
        let mut pos = 0;
        let bytes = t.as_bytes();
        while pos < bytes.len() {
            let neg = bytes[pos] == b'-';
            if bytes[pos] == b'+' || bytes[pos] == b'-' {
                pos += 1;
            }
            let end = t[pos..].find(['+', '-']).map(|k| pos + k).unwrap_or(t.len());
            // allow negative exponents such as t^-2
            let end = if end < t.len() && end > 0 && bytes[end - 1] == b'^' {
                t[end + 1..].find(['+', '-']).map(|k| end + 1 + k).unwrap_or(t.len())
            } else {
                end
            };
            let term = &t[pos..end];
            let (coef, exp) = match term.split_once('t') {
                None => (term, 0),
                Some((c, e)) => {
                    let c = c.strip_suffix('*').unwrap_or(c);
                    let e = match e.strip_prefix('^') {
                        Some(e) => e.parse::<i64>().map_err(|_| Error::Parse { pos, msg: format!("bad exponent in {term:?}") })?,
                        None if e.is_empty() => 1,
                        None => return Err(Error::Parse { pos, msg: format!("malformed term {term:?}") }),
                    };
                    (if c.is_empty() { "1" } else { c }, e)
                }
            };
            let mut c = self.parse_coefficient(coef).map_err(|e| match e {
                Error::Parse { msg, .. } => Error::Parse { pos, msg },
                e => e,
            })?;
            if neg {
                c = (self.p - c) % self.p;
            }
            acc = acc.add(&self.wrap(exp, vec![c], None));
            pos = end;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn one(p: u64) -> LaurentSeries {
        LaurentSeries::constant_mod(p, 1, 8)
    }

    #[test]
    fn parse_and_display() {
        let z = one(5);
        let x = z.parse_scalar("2 + 3t - t^2").unwrap();
        assert_eq!(x.to_string(), "2 + 3*t + 4*t^2");
        let y = z.parse_scalar("t^-1").unwrap();
        assert_eq!(y.valuation().unwrap(), Some(-1));
        assert_eq!(z.parse_scalar("1/2").unwrap().residue().unwrap(), 3);
        assert!(z.parse_scalar("1/5").is_err());
    }

    #[test]
    fn inverse_tracks_precision() {
        let z = one(5);
        let x = z.parse_scalar("1 + t").unwrap();
        let xi = x.inv().unwrap();
        assert_eq!(xi.precision(), Some(8));
        let prod = x.mul(&xi);
        assert_eq!(prod, z);
        assert_eq!(prod.precision(), Some(8));
        // monomials invert exactly
        let t = z.uniformizer();
        assert_eq!(t.inv().unwrap().precision(), None);
    }

    #[test]
    fn precision_loss_is_reported() {
        let z = one(5);
        let x = z.parse_scalar("1 + t").unwrap();
        let y = x.inv().unwrap().inv().unwrap();
        // (1+t)^{-1} inverted again agrees with 1+t to precision 8
        let diff = y.sub(&x);
        assert!(diff.is_zero());
        assert!(matches!(diff.valuation(), Err(Error::PrecisionLoss(_))));
    }

    #[test]
    fn valuation_is_additive() {
        let mut rng = StdRng::seed_from_u64(3);
        let z = one(7);
        let t = z.uniformizer();
        for _ in 0..200 {
            let a = z.random_integral(&mut rng).mul(&t);
            let b = z.random_integral(&mut rng);
            let (Ok(Some(va)), Ok(Some(vb))) = (a.valuation(), b.valuation()) else { continue };
            assert_eq!(a.mul(&b).valuation().unwrap(), Some(va + vb));
            if let Ok(Some(vs)) = a.add(&b).valuation() {
                assert!(vs >= va.min(vb));
            }
            if let Ok(ai) = a.inv() {
                assert_eq!(a.mul(&ai), z);
            }
        }
    }
}
