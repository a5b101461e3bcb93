use std::fmt;

use serde::{Serialize, Serializer};

use crate::arith::{inv_mod, legendre};

/// Element `re + im·sqrt(u)` of `F_{p^2} = F_p(sqrt u)`, `u` a nonresidue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp2 {
    pub p: u64,
    pub u: u64,
    pub re: u64,
    pub im: u64,
}

impl Fp2 {
    pub fn new(p: u64, u: u64, re: u64, im: u64) -> Self {
        Fp2 { p, u: u % p, re: re % p, im: im % p }
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn is_one(&self) -> bool {
        self.re == 1 && self.im == 0
    }

    pub fn in_base(&self) -> bool {
        self.im == 0
    }

    pub fn add(&self, o: &Fp2) -> Fp2 {
        Fp2::new(self.p, self.u, self.re + o.re, self.im + o.im)
    }

    pub fn neg(&self) -> Fp2 {
        Fp2::new(self.p, self.u, self.p - self.re, self.p - self.im)
    }

    pub fn mul(&self, o: &Fp2) -> Fp2 {
        let p = self.p as u128;
        let (a, b, c, d, u) = (self.re as u128, self.im as u128, o.re as u128, o.im as u128, self.u as u128);
        let re = (a * c + u * (b * d % p)) % p;
        let im = (a * d + b * c) % p;
        Fp2::new(self.p, self.u, re as u64, im as u64)
    }

    /// `N(x) = re^2 - u im^2`.
    pub fn norm(&self) -> u64 {
        let p = self.p as u128;
        let n = (self.re as u128 * self.re as u128 + (p - self.u as u128) * (self.im as u128 * self.im as u128 % p)) % p;
        n as u64
    }

    pub fn inv(&self) -> Option<Fp2> {
        let n = inv_mod(self.norm(), self.p)?;
        let conj = Fp2::new(self.p, self.u, self.re, self.p - self.im);
        Some(conj.mul(&Fp2::new(self.p, self.u, n, 0)))
    }

    /// Squares of `F_{p^2}*` are exactly the elements of square norm.
    pub fn is_square(&self) -> bool {
        self.is_zero() || legendre(self.norm() as i64, self.p) == 1
    }
}

impl fmt::Display for Fp2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (r, 0) => write!(f, "{r}"),
            (0, i) => write!(f, "{i}·√{}", self.u),
            (r, i) => write!(f, "{r}+{i}·√{}", self.u),
        }
    }
}

impl Serialize for Fp2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
