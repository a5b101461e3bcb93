use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::arith::legendre;
use crate::error::{Error, Result};

use super::fp2::Fp2;
use super::LocalField;

/// `x0 + x1 i + x2 j + x3 ij` with `i^2 = a`, `j^2 = b`, `ij = -ji`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quat<F> {
    pub c: [F; 4],
}

/// The quaternion algebra `(a, b)` over a concrete local field, presented
/// with `a` a unit of nonsquare residue and `v(b) = 1`. For that
/// presentation the valuation ring of `w = v(Nrd)/2` consists of the
/// elements with integral coordinates, and `i` generates the residue field
/// `F_p(sqrt a)`.
#[derive(Clone, Debug)]
pub struct QuatAlgebra<F> {
    pub a: F,
    pub b: F,
}

impl<F: LocalField> QuatAlgebra<F> {
    pub fn new(a: F, b: F) -> Result<Self> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::invalid("quaternion parameters must be nonzero"));
        }
        Ok(QuatAlgebra { a, b })
    }

    /// Checks the presentation described on the type. A split pair is
    /// reported as [`Error::Invalid`].
    pub fn check_presentation(&self) -> Result<()> {
        let p = self.a.prime();
        let va = self.a.valuation()?.unwrap_or(0);
        let vb = self.b.valuation()?.unwrap_or(0);
        if va == 0 && vb == 1 {
            let a_bar = self.a.residue()?;
            return if legendre(a_bar as i64, p) == -1 {
                Ok(())
            } else {
                Err(Error::invalid(format!("({}, {}) is split: {} is a square mod {p}", self.a, self.b, a_bar)))
            };
        }
        Err(Error::unsupported(format!(
            "presentation ({}, {}) needs a unit a of nonsquare residue and v(b) = 1",
            self.a, self.b
        )))
    }

    pub fn prime(&self) -> u64 {
        self.a.prime()
    }

    pub fn elt(&self, c: [F; 4]) -> Quat<F> {
        Quat { c }
    }

    pub fn scalar(&self, x: F) -> Quat<F> {
        let z = self.a.int(0);
        Quat { c: [x, z.clone(), z.clone(), z] }
    }

    pub fn from_ints(&self, c: [i64; 4]) -> Quat<F> {
        Quat { c: c.map(|n| self.a.int(n)) }
    }

    pub fn zero(&self) -> Quat<F> {
        self.from_ints([0, 0, 0, 0])
    }

    pub fn one(&self) -> Quat<F> {
        self.from_ints([1, 0, 0, 0])
    }

    pub fn i(&self) -> Quat<F> {
        self.from_ints([0, 1, 0, 0])
    }

    pub fn j(&self) -> Quat<F> {
        self.from_ints([0, 0, 1, 0])
    }

    pub fn ij(&self) -> Quat<F> {
        self.from_ints([0, 0, 0, 1])
    }

    pub fn add(&self, x: &Quat<F>, y: &Quat<F>) -> Quat<F> {
        Quat { c: std::array::from_fn(|k| x.c[k].add(&y.c[k])) }
    }

    pub fn sub(&self, x: &Quat<F>, y: &Quat<F>) -> Quat<F> {
        Quat { c: std::array::from_fn(|k| x.c[k].sub(&y.c[k])) }
    }

    pub fn neg(&self, x: &Quat<F>) -> Quat<F> {
        Quat { c: std::array::from_fn(|k| x.c[k].neg()) }
    }

    pub fn scale(&self, x: &Quat<F>, s: &F) -> Quat<F> {
        Quat { c: std::array::from_fn(|k| x.c[k].mul(s)) }
    }

    pub fn mul(&self, x: &Quat<F>, y: &Quat<F>) -> Quat<F> {
        let [x0, x1, x2, x3] = &x.c;
        let [y0, y1, y2, y3] = &y.c;
        let (a, b) = (&self.a, &self.b);
        let ab = a.mul(b);
        let z0 = x0.mul(y0).add(&a.mul(&x1.mul(y1))).add(&b.mul(&x2.mul(y2))).sub(&ab.mul(&x3.mul(y3)));
        let z1 = x0.mul(y1).add(&x1.mul(y0)).sub(&b.mul(&x2.mul(y3))).add(&b.mul(&x3.mul(y2)));
        let z2 = x0.mul(y2).add(&x2.mul(y0)).add(&a.mul(&x1.mul(y3))).sub(&a.mul(&x3.mul(y1)));
        let z3 = x0.mul(y3).add(&x3.mul(y0)).add(&x1.mul(y2)).sub(&x2.mul(y1));
        Quat { c: [z0, z1, z2, z3] }
    }

    /// The canonical involution.
    pub fn conj(&self, x: &Quat<F>) -> Quat<F> {
        Quat { c: [x.c[0].clone(), x.c[1].neg(), x.c[2].neg(), x.c[3].neg()] }
    }

    pub fn trd(&self, x: &Quat<F>) -> F {
        x.c[0].add(&x.c[0])
    }

    pub fn nrd(&self, x: &Quat<F>) -> F {
        let [x0, x1, x2, x3] = &x.c;
        let (a, b) = (&self.a, &self.b);
        x0.mul(x0).sub(&a.mul(&x1.mul(x1))).sub(&b.mul(&x2.mul(x2))).add(&a.mul(b).mul(&x3.mul(x3)))
    }

    pub fn inv(&self, x: &Quat<F>) -> Result<Quat<F>> {
        let n = self.nrd(x);
        if n.is_zero() {
            return Err(Error::invalid(format!("{} is not invertible", self.show(x))));
        }
        Ok(self.scale(&self.conj(x), &n.inv()?))
    }

    pub fn is_zero(&self, x: &Quat<F>) -> bool {
        x.c.iter().all(|c| c.is_zero())
    }

    pub fn eq(&self, x: &Quat<F>, y: &Quat<F>) -> bool {
        self.is_zero(&self.sub(x, y))
    }

    /// `w(x) = v(Nrd x) / 2`.
    pub fn w(&self, x: &Quat<F>) -> Result<BigRational> {
        match self.nrd(x).valuation()? {
            Some(v) => Ok(BigRational::new(BigInt::from(v), BigInt::from(2))),
            None => Err(Error::invalid("w is undefined at 0")),
        }
    }

    /// Image in the residue field `F_p(sqrt a)`; needs `w(x) >= 0`.
    pub fn residue(&self, x: &Quat<F>) -> Result<Fp2> {
        let p = self.prime();
        let u = self.a.residue()?;
        if self.is_zero(x) {
            return Ok(Fp2::new(p, u, 0, 0));
        }
        for c in &x.c {
            if c.is_zero() {
                // zero to the known precision: fine as long as that reaches t^1
                c.residue()?;
                continue;
            }
            if let Some(v) = c.valuation()? {
                if v < 0 {
                    return Err(Error::invalid(format!("{} has negative w-value", self.show(x))));
                }
            }
        }
        Ok(Fp2::new(p, u, x.c[0].residue()?, x.c[1].residue()?))
    }

    /// Lift of a residue `re + im·sqrt(a)` with integer coordinates.
    pub fn lift(&self, r: &Fp2) -> Quat<F> {
        self.from_ints([r.re as i64, r.im as i64, 0, 0])
    }

    pub fn show(&self, x: &Quat<F>) -> String {
        let names = ["", "i", "j", "ij"];
        let mut terms = Vec::new();
        for (c, name) in x.c.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            let s = c.to_string();
            let s = if s.contains([' ', 't', '*']) { format!("({s})") } else { s };
            terms.push(match (s.as_str(), name) {
                (s, "") => s.to_string(),
                ("1", n) => n.to_string(),
                ("-1", n) => format!("-{n}"),
                (s, n) => format!("{s}{n}"),
            });
        }
        if terms.is_empty() {
            return "0".into();
        }
        terms.join(" + ").replace("+ -", "- ")
    }

    /// Parses `3 + 2i - 5j + ij`; `k` is accepted for `ij`. Scalar parts use
    /// the field's own notation (`1/2`, or `3*t^2` in the Laurent model);
    /// put `*` between a scalar containing `t` and the basis name.
    pub fn parse(&self, s: &str) -> Result<Quat<F>> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse { pos: 0, msg: "empty quaternion".into() });
        }
        let mut out = self.zero();
        let bytes = t.as_bytes();
        let mut pos = 0;
        while pos < t.len() {
            let neg = bytes[pos] == b'-';
            if bytes[pos] == b'+' || bytes[pos] == b'-' {
                pos += 1;
            }
            let mut end = pos;
            while end < t.len() {
                let ch = bytes[end];
                if (ch == b'+' || ch == b'-') && end > pos && bytes[end - 1] != b'^' {
                    break;
                }
                end += 1;
            }
            let term = &t[pos..end];
            if term.is_empty() {
                return Err(Error::Parse { pos, msg: "empty term".into() });
            }
            let (scalar, slot) = if let Some(s) = term.strip_suffix("ij") {
                (s, 3)
            } else if let Some(s) = term.strip_suffix('k') {
                (s, 3)
            } else if let Some(s) = term.strip_suffix('i') {
                (s, 1)
            } else if let Some(s) = term.strip_suffix('j') {
                (s, 2)
            } else {
                (term, 0)
            };
            let scalar = scalar.strip_suffix('*').unwrap_or(scalar);
            let mut c = if scalar.is_empty() {
                self.a.int(1)
            } else {
                self.a.parse_scalar(scalar).map_err(|e| match e {
                    Error::Parse { pos: p, msg } => Error::Parse { pos: pos + p, msg },
                    e => e,
                })?
            };
            if neg {
                c = c.neg();
            }
            out.c[slot] = out.c[slot].add(&c);
            pos = end;
        }
        Ok(out)
    }
}

impl<F: fmt::Display> fmt::Display for Quat<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}, {}]", self.c[0], self.c[1], self.c[2], self.c[3])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::{LaurentSeries, PadicRational};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn q25() -> QuatAlgebra<PadicRational> {
        QuatAlgebra::new(PadicRational::from_int(2, 5), PadicRational::from_int(5, 5)).unwrap()
    }

    fn random<F: LocalField>(alg: &QuatAlgebra<F>, rng: &mut StdRng) -> Quat<F> {
        Quat { c: std::array::from_fn(|_| alg.a.random_integral(rng)) }
    }

    /// Structure constants from the relations alone: basis products as
    /// (scalar factor, basis index).
    fn basis_product(a: i64, b: i64, x: usize, y: usize) -> (i64, usize) {
        match (x, y) {
            (0, k) | (k, 0) => (1, k),
            (1, 1) => (a, 0),
            (2, 2) => (b, 0),
            (3, 3) => (-a * b, 0),
            (1, 2) => (1, 3),
            (2, 1) => (-1, 3),
            (1, 3) => (a, 2),
            (3, 1) => (-a, 2),
            (2, 3) => (-b, 1),
            (3, 2) => (b, 1),
            _ => unreachable!(),
        }
    }

    #[test]
    fn multiplication_matches_structure_constants() {
        let alg = q25();
        for x in 0..4 {
            for y in 0..4 {
                let mut ex = [0i64; 4];
                ex[x] = 1;
                let mut ey = [0i64; 4];
                ey[y] = 1;
                let (s, k) = basis_product(2, 5, x, y);
                let mut expect = [0i64; 4];
                expect[k] = s;
                assert_eq!(alg.mul(&alg.from_ints(ex), &alg.from_ints(ey)), alg.from_ints(expect), "e{x} e{y}");
            }
        }
    }

    #[test]
    fn norm_and_inverse() {
        let alg = q25();
        let x = alg.parse("3 + 2i").unwrap();
        assert_eq!(alg.nrd(&x), PadicRational::from_int(1, 5));
        assert_eq!(alg.residue(&x).unwrap(), Fp2::new(5, 2, 3, 2));
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..100 {
            let x = random(&alg, &mut rng);
            let y = random(&alg, &mut rng);
            assert_eq!(alg.nrd(&alg.mul(&x, &y)), alg.nrd(&x).mul(&alg.nrd(&y)));
            assert_eq!(alg.conj(&alg.mul(&x, &y)), alg.mul(&alg.conj(&y), &alg.conj(&x)));
            if !alg.is_zero(&x) {
                assert_eq!(alg.mul(&x, &alg.inv(&x).unwrap()), alg.one());
            }
        }
    }

    #[test]
    fn w_is_a_valuation() {
        let alg = q25();
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..200 {
            let x = random(&alg, &mut rng);
            let y = random(&alg, &mut rng);
            let (Ok(wx), Ok(wy)) = (alg.w(&x), alg.w(&y)) else { continue };
            assert_eq!(alg.w(&alg.mul(&x, &y)).unwrap(), &wx + &wy);
            if let Ok(ws) = alg.w(&alg.add(&x, &y)) {
                assert!(ws >= wx.clone().min(wy.clone()));
            }
            assert_eq!(alg.w(&alg.conj(&x)).unwrap(), wx);
        }
        assert_eq!(alg.w(&alg.j()).unwrap(), BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn residue_is_multiplicative_on_units() {
        let alg = q25();
        let mut rng = StdRng::seed_from_u64(8);
        let zero = BigRational::from_integer(0.into());
        for _ in 0..200 {
            let x = random(&alg, &mut rng);
            let y = random(&alg, &mut rng);
            if alg.w(&x).ok() != Some(zero.clone()) || alg.w(&y).ok() != Some(zero.clone()) {
                continue;
            }
            let rx = alg.residue(&x).unwrap();
            let ry = alg.residue(&y).unwrap();
            assert_eq!(alg.residue(&alg.mul(&x, &y)).unwrap(), rx.mul(&ry));
        }
    }

    #[test]
    fn presentation_checks() {
        assert!(q25().check_presentation().is_ok());
        let split = QuatAlgebra::new(PadicRational::from_int(4, 5), PadicRational::from_int(5, 5)).unwrap();
        assert!(matches!(split.check_presentation(), Err(Error::Invalid(_))));
        let other = QuatAlgebra::new(PadicRational::from_int(5, 5), PadicRational::from_int(2, 5)).unwrap();
        assert!(matches!(other.check_presentation(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn laurent_model() {
        let z = LaurentSeries::constant_mod(5, 1, 8);
        let alg = QuatAlgebra::new(z.int(2), z.uniformizer()).unwrap();
        alg.check_presentation().unwrap();
        let x = alg.parse("1 + t*i + j").unwrap();
        let xi = alg.inv(&x).unwrap();
        assert_eq!(alg.mul(&x, &xi), alg.one());
        assert_eq!(alg.show(&alg.parse("2 - j").unwrap()), "2 + 4j");
    }
}
