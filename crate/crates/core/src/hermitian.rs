//! Diagonal hermitian forms over division algebras with involution, and
//! their reduction to quadratic forms over the base field.
//!
//! Two shapes carry diagonal entries from `k*` and reduce to quadratic
//! isotropy:
//!
//! * a quaternion division algebra `(a,b)` with its canonical involution and
//!   `eps = +1`: `h = <c_1..c_n>` is isotropic iff the trace form
//!   `<c_1..c_n> (x) <1,-a,-b,ab>` is;
//! * the field `K = k(sqrt lambda)` with its nontrivial automorphism:
//!   `h` is isotropic iff `<c_1..c_n> (x) <1,-lambda>` is.
//!
//! The identity involution on `k` with `eps = +1` is accepted as well; the
//! form is then an ordinary quadratic form.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::brauer::{bc_is_division, bc_single_symbol_rep, BrauerClass, DivisionKind, Symbol};
use crate::error::{Error, Result};
use crate::fields::{sqcl_group, FieldDesc, SquareClass};
use crate::quadform::{norm_form, qf_is_isotropic, Multisets, QuadForm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InvolutionDesc {
    Orthogonal,
    Symplectic,
    /// Nontrivial on the centre `K = k(sqrt lambda)`.
    Unitary(SquareClass),
}

impl InvolutionDesc {
    pub fn unitary(k: &FieldDesc, lambda: SquareClass) -> Result<Self> {
        k.check(&lambda)?;
        if lambda.is_one() {
            return Err(Error::NotAnExtension(k.class_name(&lambda)));
        }
        Ok(InvolutionDesc::Unitary(lambda))
    }

    pub fn name(&self) -> &'static str {
        match self {
            InvolutionDesc::Orthogonal => "orthogonal",
            InvolutionDesc::Symplectic => "symplectic",
            InvolutionDesc::Unitary(_) => "unitary",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UKind {
    Plus,
    Minus,
    Zero,
}

impl UKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            UKind::Plus => "plus",
            UKind::Minus => "minus",
            UKind::Zero => "zero",
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            UKind::Plus => "u+",
            UKind::Minus => "u-",
            UKind::Zero => "u0",
        }
    }
}

impl fmt::Display for UKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for UKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "plus" | "+" => Ok(UKind::Plus),
            "minus" | "-" => Ok(UKind::Minus),
            "zero" | "0" => Ok(UKind::Zero),
            other => Err(Error::Parse { pos: 0, msg: format!("unknown u-kind {other:?}, expected plus, minus or zero") }),
        }
    }
}

impl Serialize for UKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// Which of the three hermitian u-invariants a pair `(sigma, eps)` measures.
pub fn normalize_type(inv: &InvolutionDesc, eps: i8) -> UKind {
    match (inv, eps >= 0) {
        (InvolutionDesc::Unitary(_), _) => UKind::Zero,
        (InvolutionDesc::Orthogonal, true) | (InvolutionDesc::Symplectic, false) => UKind::Plus,
        (InvolutionDesc::Orthogonal, false) | (InvolutionDesc::Symplectic, true) => UKind::Minus,
    }
}

/// Replaces `M_m(D)` by `D`: u-invariants do not see the matrix size, so
/// only the division representative of the class is returned.
pub fn morita_reduce(m: usize, b: &BrauerClass, kind: UKind) -> Result<(BrauerClass, UKind)> {
    if m == 0 {
        return Err(Error::invalid("matrix size must be at least 1"));
    }
    let rep = match bc_is_division(b)? {
        DivisionKind::Split => BrauerClass::trivial(b.field.clone()),
        DivisionKind::Quaternion if b.symbols.len() == 1 => b.clone(),
        DivisionKind::Quaternion => BrauerClass::new(b.field.clone(), vec![bc_single_symbol_rep(b)?])?,
        DivisionKind::Biquaternion => b.clone(),
    };
    Ok((rep, kind))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermFormDesc {
    pub algebra: BrauerClass,
    pub involution: InvolutionDesc,
    pub eps: i8,
    pub entries: Vec<SquareClass>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// Quaternion division algebra, canonical involution, `eps = +1`.
    Quaternion(Symbol),
    /// `K = k(sqrt lambda)` with its conjugation.
    Unitary(SquareClass),
    /// `k` with the identity, `eps = +1`.
    Quadratic,
}

impl HermFormDesc {
    pub fn new(algebra: BrauerClass, involution: InvolutionDesc, eps: i8, entries: Vec<SquareClass>) -> Result<Self> {
        if eps != 1 && eps != -1 {
            return Err(Error::invalid(format!("eps must be +1 or -1, got {eps}")));
        }
        for c in &entries {
            algebra.field.check(c)?;
        }
        if let InvolutionDesc::Unitary(l) = involution {
            InvolutionDesc::unitary(&algebra.field, l)?;
        }
        Ok(HermFormDesc { algebra, involution, eps, entries })
    }

    pub fn field(&self) -> &FieldDesc {
        &self.algebra.field
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn ukind(&self) -> UKind {
        normalize_type(&self.involution, self.eps)
    }

    pub fn shape(&self) -> Result<Shape> {
        shape_of(&self.algebra, &self.involution, self.eps)
    }
}

fn shape_of(algebra: &BrauerClass, inv: &InvolutionDesc, eps: i8) -> Result<Shape> {
    let unsupported = |why: &str| {
        Err(Error::UnsupportedShape(format!(
            "{why}: algebra {algebra}, {} involution, eps {eps:+}",
            inv.name()
        )))
    };
    let division = bc_is_division(algebra)?;
    match (inv, division) {
        (InvolutionDesc::Symplectic, DivisionKind::Quaternion) if eps == 1 => {
            let s = if algebra.symbols.len() == 1 { algebra.symbols[0] } else { bc_single_symbol_rep(algebra)? };
            Ok(Shape::Quaternion(s))
        }
        (InvolutionDesc::Symplectic, DivisionKind::Quaternion) => {
            unsupported("skew-hermitian entries over a quaternion algebra are pure quaternions, not base-field classes")
        }
        // An eps = -1 form over K is sqrt(lambda) times a hermitian one.
        (InvolutionDesc::Unitary(l), DivisionKind::Split) => Ok(Shape::Unitary(*l)),
        (InvolutionDesc::Orthogonal, DivisionKind::Split) if eps == 1 => Ok(Shape::Quadratic),
        (InvolutionDesc::Orthogonal, DivisionKind::Split) => {
            unsupported("a skew-symmetric form over a field has no nonzero diagonal entries")
        }
        _ => unsupported("no reduction to a quadratic form over the base field"),
    }
}

/// Trace form `<c_1..c_n> (x) <1,-a,-b,ab>` of a quaternion-shape form.
pub fn jacobson_quadratic(h: &HermFormDesc) -> Result<QuadForm> {
    match h.shape()? {
        Shape::Quaternion((a, b)) => {
            let diag = QuadForm::new(h.field().clone(), h.entries.clone())?;
            diag.tensor(&norm_form(&a, &b, h.field())?)
        }
        _ => Err(Error::UnsupportedShape(format!(
            "the trace-form reduction needs a quaternion division algebra with canonical involution, got {}",
            h.algebra
        ))),
    }
}

/// Trace form `<c_1..c_n> (x) <1,-lambda>` of a form over `k(sqrt lambda)`.
pub fn transfer_quadratic(h: &HermFormDesc) -> Result<QuadForm> {
    match h.shape()? {
        Shape::Unitary(lambda) => {
            let k = h.field();
            let diag = QuadForm::new(k.clone(), h.entries.clone())?;
            diag.tensor(&QuadForm::new(k.clone(), vec![SquareClass::ONE, k.neg(lambda)])?)
        }
        _ => Err(Error::UnsupportedShape(format!(
            "the transfer reduction needs a quadratic extension with its conjugation, got {} with {} involution",
            h.algebra,
            h.involution.name()
        ))),
    }
}

/// The quadratic form whose isotropy decides that of `h`.
pub fn reduced_quadratic(h: &HermFormDesc) -> Result<QuadForm> {
    match h.shape()? {
        Shape::Quaternion(_) => jacobson_quadratic(h),
        Shape::Unitary(_) => transfer_quadratic(h),
        Shape::Quadratic => QuadForm::new(h.field().clone(), h.entries.clone()),
    }
}

pub fn herm_is_isotropic(h: &HermFormDesc) -> Result<bool> {
    qf_is_isotropic(&reduced_quadratic(h)?)
}

/// Largest rank of an anisotropic form of the given type, by exhaustive
/// enumeration of entry multisets over `k*/k*^2`.
pub fn u_search(b: &BrauerClass, inv: &InvolutionDesc, eps: i8, k: &FieldDesc) -> Result<usize> {
    if &b.field != k {
        return Err(Error::FieldMismatch { expected: k.to_string(), got: b.field.to_string() });
    }
    let classes = sqcl_group(k)?;
    shape_of(b, inv, eps)?;
    let cap = 2 * classes.len();
    for rank in 1..=cap + 1 {
        let mut anisotropic = false;
        for idx in Multisets::new(classes.len(), rank) {
            // common scaling preserves isotropy, so the first entry may be 1
            if idx[0] != 0 {
                break;
            }
            let entries = idx.iter().map(|&i| classes[i]).collect();
            let h = HermFormDesc { algebra: b.clone(), involution: *inv, eps, entries };
            if !herm_is_isotropic(&h)? {
                anisotropic = true;
                break;
            }
        }
        if !anisotropic {
            return Ok(rank - 1);
        }
    }
    Err(Error::internal(format!("hermitian u search over {k} exceeded the cap {cap}")))
}

/// `dim_k` of the `eps`-symmetric elements of a degree-`d` algebra.
pub fn sym_dimension(d: u64, inv: &InvolutionDesc, eps: i8) -> u64 {
    let e = i64::from(eps.signum());
    let d = d as i64;
    let n = match inv {
        InvolutionDesc::Orthogonal => d * (d + e) / 2,
        InvolutionDesc::Symplectic => d * (d - e) / 2,
        InvolutionDesc::Unitary(_) => d * d,
    };
    n as u64
}
