use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::Rng;

use crate::arith::inv_mod;
use crate::error::{Error, Result};

use super::LocalField;

/// Exact rational number viewed inside `Q_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicRational {
    pub value: BigRational,
    pub p: u64,
}

fn ord(n: &BigInt, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut k = 0;
    while !n.is_zero() && n.is_multiple_of(&p) {
        n /= &p;
        k += 1;
    }
    k
}

impl PadicRational {
    pub fn new(value: BigRational, p: u64) -> Self {
        PadicRational { value, p }
    }

    pub fn from_int(n: i64, p: u64) -> Self {
        PadicRational { value: BigRational::from_integer(BigInt::from(n)), p }
    }

    fn wrap(&self, value: BigRational) -> Self {
        PadicRational { value, p: self.p }
    }
}

impl fmt::Display for PadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.value.is_integer() {
            write!(f, "{}", self.value.numer())
        } else {
            write!(f, "{}/{}", self.value.numer(), self.value.denom())
        }
    }
}

impl LocalField for PadicRational {
    fn prime(&self) -> u64 {
        self.p
    }

    fn constant(&self, r: &BigRational) -> Result<Self> {
        Ok(self.wrap(r.clone()))
    }

    fn int(&self, n: i64) -> Self {
        PadicRational::from_int(n, self.p)
    }

    fn uniformizer(&self) -> Self {
        self.int(self.p as i64)
    }

    fn add(&self, o: &Self) -> Self {
        self.wrap(&self.value + &o.value)
    }

    fn sub(&self, o: &Self) -> Self {
        self.wrap(&self.value - &o.value)
    }

    fn mul(&self, o: &Self) -> Self {
        self.wrap(&self.value * &o.value)
    }

    fn neg(&self) -> Self {
        self.wrap(-&self.value)
    }

    fn inv(&self) -> Result<Self> {
        if self.value.is_zero() {
            return Err(Error::invalid("division by zero"));
        }
        Ok(self.wrap(self.value.recip()))
    }

    fn valuation(&self) -> Result<Option<i64>> {
        if self.value.is_zero() {
            return Ok(None);
        }
        Ok(Some(ord(self.value.numer(), self.p) - ord(self.value.denom(), self.p)))
    }

    fn residue(&self) -> Result<u64> {
        match self.valuation()? {
            None => Ok(0),
            Some(v) if v < 0 => Err(Error::invalid(format!("{self} is not {}-integral", self.p))),
            Some(v) if v > 0 => Ok(0),
            Some(_) => {
                let p = BigInt::from(self.p);
                let n = self.value.numer().mod_floor(&p).to_u64().unwrap_or(0);
                let d = self.value.denom().mod_floor(&p).to_u64().unwrap_or(1);
                let d_inv = inv_mod(d, self.p).ok_or_else(|| Error::internal("unit with denominator divisible by p"))?;
                Ok(((n as u128 * d_inv as u128) % self.p as u128) as u64)
            }
        }
    }

    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn random_integral(&self, rng: &mut StdRng) -> Self {
        let p = self.p as i64;
        let num = rng.gen_range(-p * p * p..=p * p * p);
        // denominators prime to p keep the value integral
        let mut den = rng.gen_range(1..=p * p);
        if den % p == 0 {
            den += 1;
        }
        self.wrap(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    fn parse_scalar(&self, s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Parse { pos: 0, msg: format!("malformed rational {t:?}") };
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(self.wrap(BigRational::new(n, d)))
    }
}

impl PadicRational {
    pub fn is_positive(&self) -> bool {
        self.value.is_positive()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }
}
