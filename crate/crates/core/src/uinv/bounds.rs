//! Upper bounds: algebras over fields whose systems of quadratic forms
//! behave like those of an `A_i(2)`-field, tensor products of quaternion
//! algebras with their product involution, and the combination of an upper
//! bound with a lower bound read off at a completion.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::UKind;

use super::derivation::{fmt_rational, int, Combine, Derivation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    /// Involutions of the first kind: bounds for `u+` and `u-`.
    First,
    /// Involutions of the second kind: a bound for `u0`.
    Second,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AiBound {
    First { plus: BigRational, minus: BigRational },
    Second { zero: BigRational },
}

impl AiBound {
    pub fn get(&self, kind: UKind) -> Option<&BigRational> {
        match (self, kind) {
            (AiBound::First { plus, .. }, UKind::Plus) => Some(plus),
            (AiBound::First { minus, .. }, UKind::Minus) => Some(minus),
            (AiBound::Second { zero }, UKind::Zero) => Some(zero),
            _ => None,
        }
    }

    pub fn kinds(&self) -> Vec<UKind> {
        match self {
            AiBound::First { .. } => vec![UKind::Plus, UKind::Minus],
            AiBound::Second { .. } => vec![UKind::Zero],
        }
    }
}

fn pow2(e: u32) -> BigRational {
    BigRational::from_integer(BigInt::one() << e as usize)
}

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// For a degree-`d` algebra over a field of type `A_i(2)`: first kind
/// `((1 + 1/d) 2^(i-1), (1 - 1/d) 2^(i-1))`, second kind `2^(i-1)`.
pub fn bounds_ai(i: u32, d: u64, kind: BoundKind) -> Result<AiBound> {
    if i == 0 {
        return Err(Error::invalid("i must be at least 1"));
    }
    if d == 0 {
        return Err(Error::invalid("the degree d must be at least 1"));
    }
    let scale = pow2(i - 1);
    Ok(match kind {
        BoundKind::First => {
            let inv = BigRational::new(BigInt::one(), BigInt::from(d));
            AiBound::First {
                plus: (BigRational::one() + &inv) * &scale,
                minus: (BigRational::one() - &inv) * &scale,
            }
        }
        BoundKind::Second => AiBound::Second { zero: scale },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbcSequence {
    pub n: u32,
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
}

/// Closed forms `a = 4/5 + (9/4)^n/5`, `b = -1/5 + (9/4)^n/5`,
/// `c = 1/5 + 3(9/4)^n/10`, checked against [`sequence_abc_recursive`].
pub fn sequence_abc(n: u32) -> Result<AbcSequence> {
    let closed = sequence_abc_closed(n)?;
    let rec = sequence_abc_recursive(n)?;
    if closed != rec {
        return Err(Error::internal(format!("closed form and recursion disagree at n = {n}")));
    }
    Ok(closed)
}

pub fn sequence_abc_closed(n: u32) -> Result<AbcSequence> {
    if n < 1 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let g: BigRational = Pow::pow(frac(9, 4), n);
    Ok(AbcSequence {
        n,
        a: frac(4, 5) + &g * frac(1, 5),
        b: frac(-1, 5) + &g * frac(1, 5),
        c: frac(1, 5) + &g * frac(3, 10),
    })
}

/// `a_1 = 5/4, b_1 = 1/4`, then `a' = 3a/4 + c`, `b' = 3b/2 + c/2` with
/// `c = a/2 + b` at every step.
pub fn sequence_abc_recursive(n: u32) -> Result<AbcSequence> {
    if n < 1 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let mut a = frac(5, 4);
    let mut b = frac(1, 4);
    let mut c = &a / int(2) + &b;
    for _ in 1..n {
        let a_next = frac(3, 4) * &a + &c;
        let b_next = frac(3, 2) * &b + frac(1, 2) * &c;
        a = a_next;
        b = b_next;
        c = &a / int(2) + &b;
    }
    Ok(AbcSequence { n, a, b, c })
}

/// `(3^(2n-6) / 4^n) * 213`, the older bound the tensor bound improves on
/// for `n >= 3`.
pub fn comparison_bound(n: u32) -> BigRational {
    let e = 2 * n as i64 - 6;
    let three: BigRational = if e >= 0 {
        Pow::pow(int(3), e as u32)
    } else {
        Pow::pow(frac(1, 3), (-e) as u32)
    };
    let four: BigRational = Pow::pow(int(4), n);
    three / four * int(213)
}

#[derive(Clone, Debug)]
pub struct TensorBounds {
    pub n: u32,
    pub uk: BigRational,
    pub plus: BigRational,
    pub minus: BigRational,
    pub zero: BigRational,
    pub plus_derivation: Derivation,
    pub minus_derivation: Derivation,
    pub zero_derivation: Derivation,
}

impl TensorBounds {
    /// Integer bound actually implied for a u-invariant.
    pub fn floor(&self, kind: UKind) -> BigInt {
        match kind {
            UKind::Plus => self.plus.floor().to_integer(),
            UKind::Minus => self.minus.floor().to_integer(),
            UKind::Zero => self.zero.floor().to_integer(),
        }
    }
}

fn tensor_field(uk: &BigRational) -> String {
    format!("k with u(k) = {}", fmt_rational(uk))
}

fn tensor_class(n: u32) -> String {
    if n == 1 {
        "H_1".into()
    } else {
        format!("H_1 (x) ... (x) H_{n}")
    }
}

/// Reference to a bound established at the previous step, kept as a leaf
/// so that the tree stays linear in `n`.
fn previous(d: &Derivation) -> Derivation {
    Derivation::leaf(
        "tensor:previous",
        d.field.clone(),
        d.class.clone(),
        d.kind,
        d.value.clone(),
        "bound established at the previous step",
    )
}

fn candidate(uk: &BigRational, n: u32, kind: UKind, cite: &str, coeffs: Vec<BigRational>, children: Vec<Derivation>) -> Derivation {
    Derivation::node("tensor:candidate", tensor_field(uk), tensor_class(n), kind, cite, Combine::Linear(coeffs), children)
}

/// `u+ <= a_n u(k)`, `u- <= b_n u(k)`, `u0 <= c_n u(k)` for a product of `n`
/// quaternion algebras with the tensor product of canonical involutions.
pub fn bounds_tensor(n: u32, uk: &BigRational) -> Result<TensorBounds> {
    if n < 1 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if !uk.is_positive() {
        return Err(Error::invalid("u(k) must be positive"));
    }
    let field = tensor_field(uk);
    let base = |kind, coeff: BigRational, cite: &str| {
        Derivation::leaf("tensor:base", field.clone(), tensor_class(1), kind, coeff * uk, cite)
    };
    let mut plus = base(UKind::Plus, frac(5, 4), "one quaternion algebra: u+(H) <= 5/4 u(k)");
    let mut minus = base(UKind::Minus, frac(1, 4), "one quaternion algebra: u-(H) <= 1/4 u(k)");
    let mut zero = base(UKind::Zero, frac(7, 8), "one quaternion algebra with unitary involution: u0 <= 7/8 u(k)");
    for m in 2..=n {
        let plus_next = Derivation::node(
            "tensor:step",
            field.clone(),
            tensor_class(m),
            UKind::Plus,
            "u+ <= min{3/4 a + c, 3/2 a + 1/2 c} u(k); the left branch is the minimum since c <= 3/2 a",
            Combine::Min,
            vec![
                candidate(uk, m, UKind::Plus, "left: 1/2·(3/2 a) + c", vec![frac(3, 4), int(1)], vec![plus.clone(), previous(&zero)]),
                candidate(uk, m, UKind::Plus, "right: 3/2 a + 1/2 c", vec![frac(3, 2), frac(1, 2)], vec![previous(&plus), previous(&zero)]),
            ],
        );
        let minus_next = Derivation::node(
            "tensor:step",
            field.clone(),
            tensor_class(m),
            UKind::Minus,
            "u- <= min{3/4 b + c, 3/2 b + 1/2 c} u(k); the right branch is the minimum since c >= 3/2 b",
            Combine::Min,
            vec![
                candidate(uk, m, UKind::Minus, "left: 1/2·(3/2 b) + c", vec![frac(3, 4), int(1)], vec![previous(&minus), previous(&zero)]),
                candidate(uk, m, UKind::Minus, "right: 3/2 b + 1/2 c", vec![frac(3, 2), frac(1, 2)], vec![minus.clone(), previous(&zero)]),
            ],
        );
        let zero_next = Derivation::node(
            "tensor:step",
            field.clone(),
            tensor_class(m),
            UKind::Zero,
            "u0 <= min{1/2 a + b, a + 1/2 b} u(k) at the same step; the left branch is the minimum since b <= a",
            Combine::Min,
            vec![
                candidate(uk, m, UKind::Zero, "left: 1/2 a + b", vec![frac(1, 2), int(1)], vec![plus_next.clone(), minus_next.clone()]),
                candidate(uk, m, UKind::Zero, "right: a + 1/2 b", vec![int(1), frac(1, 2)], vec![previous(&plus_next), previous(&minus_next)]),
            ],
        );
        check_branch(&plus_next, 0)?;
        check_branch(&minus_next, 1)?;
        check_branch(&zero_next, 0)?;
        plus = plus_next;
        minus = minus_next;
        zero = zero_next;
    }
    let seq = sequence_abc(n)?;
    for (d, coeff) in [(&plus, &seq.a), (&minus, &seq.b), (&zero, &seq.c)] {
        if d.value != coeff * uk {
            return Err(Error::internal(format!(
                "tensor bound {} at n = {n} differs from the closed form {}",
                fmt_rational(&d.value),
                fmt_rational(&(coeff * uk))
            )));
        }
    }
    Ok(TensorBounds {
        n,
        uk: uk.clone(),
        plus: plus.value.clone(),
        minus: minus.value.clone(),
        zero: zero.value.clone(),
        plus_derivation: plus,
        minus_derivation: minus,
        zero_derivation: zero,
    })
}

/// The minimum of a step node must be attained by the stated branch.
fn check_branch(step: &Derivation, branch: usize) -> Result<()> {
    if step.children[branch].value != step.value {
        return Err(Error::internal(format!(
            "{} bound at {}: minimum not attained by branch {branch}",
            step.kind, step.class
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SemiGlobalKind {
    /// Quaternion algebra, involution of the first kind (degree 2).
    Quaternion,
    /// Biquaternion algebra, involution of the first kind (degree 4).
    Biquaternion,
    /// Quaternion algebra with an involution of the second kind.
    Unitary,
}

impl SemiGlobalKind {
    pub fn upper_bound(&self) -> AiBound {
        let r = match self {
            SemiGlobalKind::Quaternion => bounds_ai(3, 2, BoundKind::First),
            SemiGlobalKind::Biquaternion => bounds_ai(3, 4, BoundKind::First),
            SemiGlobalKind::Unitary => bounds_ai(3, 2, BoundKind::Second),
        };
        r.expect("valid constants")
    }
}

/// Over a semi-global field (an `A_3(2)`-field) the bound of
/// [`bounds_ai`] with `i = 3` is an upper bound, and a completion at a
/// divisorial valuation gives a lower bound. Equal bounds give the value.
pub fn semi_global_combine(kind: SemiGlobalKind, upper: &AiBound, lower: &[Derivation]) -> Result<Vec<Derivation>> {
    let mut out = Vec::new();
    for uk in upper.kinds() {
        let bound = upper.get(uk).expect("kind listed by the bound");
        let completion = lower
            .iter()
            .find(|d| d.kind == uk)
            .ok_or_else(|| Error::invalid(format!("no completion value supplied for {uk}")))?;
        if bound != &completion.value {
            return Err(Error::Gap { upper: fmt_rational(bound), lower: fmt_rational(&completion.value) });
        }
        let (rule, degree) = match kind {
            SemiGlobalKind::Quaternion => ("bound:first-kind", 2),
            SemiGlobalKind::Biquaternion => ("bound:first-kind", 4),
            SemiGlobalKind::Unitary => ("bound:second-kind", 2),
        };
        let bound_leaf = Derivation::leaf(
            rule,
            "semi-global field (A_3(2))".into(),
            format!("degree {degree}"),
            uk,
            bound.clone(),
            match kind {
                SemiGlobalKind::Unitary => "u0(D) <= 2^(i-1) with i = 3",
                _ => "u+(D) <= (1 + 1/d) 2^(i-1), u-(D) <= (1 - 1/d) 2^(i-1) with i = 3",
            },
        );
        out.push(Derivation::node(
            "descent",
            "semi-global field".into(),
            completion.class.clone(),
            uk,
            "upper bound over the semi-global field equals the value at a completion, which is a lower bound; \
             hypothesis: a divisorial discrete valuation exists at which D stays division with the given residue data",
            Combine::Agree,
            vec![bound_leaf, completion.clone()],
        )
        .with_lambda(completion.lambda.clone()));
    }
    Ok(out)
}

impl AbcSequence {
    /// The identities linking consecutive terms and the ordering used to
    /// pick the branch of each minimum.
    pub fn check_identities(&self, next: &AbcSequence) -> std::result::Result<(), String> {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        if next.a != frac(3, 4) * a + c {
            return Err(format!("a_{} != 3/4 a + c", next.n));
        }
        if next.b != frac(3, 2) * b + frac(1, 2) * c {
            return Err(format!("b_{} != 3/2 b + 1/2 c", next.n));
        }
        if *c != a / int(2) + b {
            return Err(format!("c_{} != a/2 + b", self.n));
        }
        if !(frac(3, 2) * a >= *c && *c >= frac(3, 2) * b) {
            return Err(format!("3/2 a >= c >= 3/2 b fails at n = {}", self.n));
        }
        if c.is_zero() {
            return Err("c vanished".into());
        }
        Ok(())
    }
}
