//! Diagonal quadratic forms over field towers.
//!
//! Isotropy is decided by peeling CDV layers: a form over `k` splits into
//! the entries of even and odd valuation, and it is isotropic iff one of the
//! two residue forms over `kbar` is. At the finite base every form of
//! dimension three or more is isotropic.

pub mod oracle;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{decompose, sqcl_group, FieldDesc, SquareClass};

pub use oracle::qf_is_isotropic_oracle;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadForm {
    pub field: FieldDesc,
    pub entries: Vec<SquareClass>,
}

impl QuadForm {
    pub fn new(field: FieldDesc, entries: Vec<SquareClass>) -> Result<Self> {
        for a in &entries {
            field.check(a)?;
        }
        Ok(QuadForm { field, entries })
    }

    /// Parses a comma-separated list of classes, e.g. `1,u,pi,u*pi`.
    pub fn parse(field: &FieldDesc, s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Ok(QuadForm { field: field.clone(), entries: Vec::new() });
        }
        let mut entries = Vec::new();
        let mut offset = 0;
        for part in s.split(',') {
            let a = field.parse_class(part).map_err(|e| match e {
                Error::Parse { pos, msg } => Error::Parse { pos: pos + offset, msg },
                other => other,
            })?;
            entries.push(a);
            offset += part.len() + 1;
        }
        Ok(QuadForm { field: field.clone(), entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn scaled(&self, c: SquareClass) -> QuadForm {
        QuadForm {
            field: self.field.clone(),
            entries: self.entries.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn perp(&self, other: &QuadForm) -> Result<QuadForm> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                expected: self.field.to_string(),
                got: other.field.to_string(),
            });
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(QuadForm { field: self.field.clone(), entries })
    }

    /// Kronecker product of two diagonal forms.
    pub fn tensor(&self, other: &QuadForm) -> Result<QuadForm> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                expected: self.field.to_string(),
                got: other.field.to_string(),
            });
        }
        let entries = self
            .entries
            .iter()
            .flat_map(|a| other.entries.iter().map(move |b| a.mul(*b)))
            .collect();
        Ok(QuadForm { field: self.field.clone(), entries })
    }

    pub fn entry_names(&self) -> Vec<String> {
        self.entries.iter().map(|a| self.field.class_name(a)).collect()
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.entry_names().join(","))
    }
}

/// One peeled CDV layer of the residue recursion.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SpringerStep {
    pub field: String,
    pub form: String,
    /// First residue form: entries of even valuation.
    pub even: String,
    /// Second residue form: odd entries with the uniformizer stripped.
    pub odd: String,
    /// Set at the finite base: the verdict for `form`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_isotropic: Option<bool>,
}

pub fn qf_is_isotropic(q: &QuadForm) -> Result<bool> {
    springer(&q.field, &q.entries, &mut None)
}

/// Same decision, with the sequence of splits that produced it.
pub fn qf_is_isotropic_traced(q: &QuadForm) -> Result<(bool, Vec<SpringerStep>)> {
    let mut path = Some(Vec::new());
    let iso = springer(&q.field, &q.entries, &mut path)?;
    Ok((iso, path.unwrap_or_default()))
}

fn fmt_entries(k: &FieldDesc, entries: &[SquareClass]) -> String {
    let names: Vec<String> = entries.iter().map(|a| k.class_name(a)).collect();
    format!("<{}>", names.join(","))
}

fn springer(k: &FieldDesc, entries: &[SquareClass], path: &mut Option<Vec<SpringerStep>>) -> Result<bool> {
    match k {
        FieldDesc::Gff { .. } => Err(Error::unsupported(format!(
            "isotropy over the global function field {k} is not decided by this engine"
        ))),
        FieldDesc::Finite { .. } => {
            let iso = match entries.len() {
                0 | 1 => false,
                2 => k.neg(entries[0].mul(entries[1])).is_one(),
                _ => true,
            };
            if let Some(p) = path {
                p.push(SpringerStep {
                    field: k.to_string(),
                    form: fmt_entries(k, entries),
                    even: String::new(),
                    odd: String::new(),
                    base_isotropic: Some(iso),
                });
            }
            Ok(iso)
        }
        FieldDesc::Cdv(residue) => {
            let mut even = Vec::new();
            let mut odd = Vec::new();
            for a in entries {
                let (unit, is_odd) = decompose(k, a)?;
                if is_odd {
                    odd.push(unit);
                } else {
                    even.push(unit);
                }
            }
            if let Some(p) = path {
                p.push(SpringerStep {
                    field: k.to_string(),
                    form: fmt_entries(k, entries),
                    even: fmt_entries(residue, &even),
                    odd: fmt_entries(residue, &odd),
                    base_isotropic: None,
                });
            }
            // Both halves are evaluated so that GFF errors surface uniformly.
            let first = springer(residue, &even, path)?;
            let second = springer(residue, &odd, path)?;
            Ok(first || second)
        }
    }
}

/// Iterator over non-decreasing index tuples of length `len` drawn from
/// `0..n`, i.e. multisets, in lexicographic order.
pub struct Multisets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Multisets {
    pub fn new(n: usize, len: usize) -> Self {
        let current = if n == 0 && len > 0 { None } else { Some(vec![0; len]) };
        Multisets { n, current }
    }
}

impl Iterator for Multisets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut i = next.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] + 1 < self.n {
                let v = next[i] + 1;
                for slot in &mut next[i..] {
                    *slot = v;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// Largest dimension of an anisotropic diagonal form over `k`, by
/// exhaustive enumeration of square-class multisets.
pub fn u_quadratic(k: &FieldDesc) -> Result<usize> {
    let classes = sqcl_group(k)?;
    let cap = 2 * classes.len();
    for dim in 1..=cap + 1 {
        let mut found = false;
        for idx in Multisets::new(classes.len(), dim) {
            let entries: Vec<SquareClass> = idx.iter().map(|&i| classes[i]).collect();
            if !springer(k, &entries, &mut None)? {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(dim - 1);
        }
    }
    Err(Error::internal(format!(
        "u-invariant search over {k} exceeded the a-priori cap {cap}"
    )))
}

/// Norm form `<1, -a, -b, ab>` of the quaternion symbol `(a, b)`.
pub fn norm_form(a: &SquareClass, b: &SquareClass, k: &FieldDesc) -> Result<QuadForm> {
    k.check(a)?;
    k.check(b)?;
    QuadForm::new(
        k.clone(),
        vec![SquareClass::ONE, k.neg(*a), k.neg(*b), a.mul(*b)],
    )
}

/// Albert form `<a1, b1, -a1 b1, -a2, -b2, a2 b2>` of `(a1,b1) + (a2,b2)`.
pub fn albert_form(
    s1: &(SquareClass, SquareClass),
    s2: &(SquareClass, SquareClass),
    k: &FieldDesc,
) -> Result<QuadForm> {
    let (a1, b1) = *s1;
    let (a2, b2) = *s2;
    for x in [a1, b1, a2, b2] {
        k.check(&x)?;
    }
    QuadForm::new(
        k.clone(),
        vec![a1, b1, k.neg(a1.mul(b1)), k.neg(a2), k.neg(b2), a2.mul(b2)],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q5() -> FieldDesc {
        FieldDesc::qp(5).unwrap()
    }

    fn form(k: &FieldDesc, s: &str) -> QuadForm {
        QuadForm::parse(k, s).unwrap()
    }

    #[test]
    fn hyperbolic_plane_is_isotropic() {
        for k in [FieldDesc::finite(5, 1).unwrap(), q5(), FieldDesc::qp_t(3).unwrap()] {
            assert!(qf_is_isotropic(&form(&k, "1,-1")).unwrap());
        }
    }

    #[test]
    fn one_nu_over_f5_matches_vector_search() {
        let k = FieldDesc::finite(5, 1).unwrap();
        // brute force over all 25 vectors of x^2 + 2 y^2
        let zero = (0..5u64)
            .flat_map(|x| (0..5u64).map(move |y| (x, y)))
            .any(|(x, y)| (x, y) != (0, 0) && (x * x + 2 * y * y) % 5 == 0);
        assert!(!zero);
        assert_eq!(qf_is_isotropic(&form(&k, "1,u")).unwrap(), zero);
    }

    #[test]
    fn quaternion_norm_form_over_q5() {
        let (iso, path) = qf_is_isotropic_traced(&form(&q5(), "1,u,pi,u*pi")).unwrap();
        assert!(!iso);
        assert_eq!(path[0].even, "<1,u>");
        assert_eq!(path[0].odd, "<1,u>");
        assert_eq!(path.len(), 3);
    }

    #[test]
    fn every_five_dimensional_form_over_q5_is_isotropic() {
        let classes = sqcl_group(&q5()).unwrap();
        let mut count = 0;
        for n in 0..4usize.pow(5) {
            let entries: Vec<SquareClass> = (0..5).map(|i| classes[(n >> (2 * i)) & 3]).collect();
            assert!(springer(&q5(), &entries, &mut None).unwrap());
            count += 1;
        }
        assert_eq!(count, 1024);
    }

    #[test]
    fn zero_dimensional_form_is_anisotropic() {
        assert!(!qf_is_isotropic(&form(&q5(), "")).unwrap());
    }

    #[test]
    fn gff_base_is_rejected() {
        let k = FieldDesc::cdv(FieldDesc::gff(9).unwrap());
        assert!(matches!(
            qf_is_isotropic(&form(&k, "1,u,pi")),
            Err(Error::Unsupported(_))
        ));
        assert!(u_quadratic(&k).is_err());
    }

    #[test]
    fn u_invariants() {
        assert_eq!(u_quadratic(&FieldDesc::finite(5, 1).unwrap()).unwrap(), 2);
        assert_eq!(u_quadratic(&FieldDesc::finite(3, 2).unwrap()).unwrap(), 2);
        assert_eq!(u_quadratic(&q5()).unwrap(), 4);
        assert_eq!(u_quadratic(&FieldDesc::qp_t(5).unwrap()).unwrap(), 8);
    }

    #[test]
    fn norm_form_examples() {
        let k = q5();
        let b = k.parse_class("pi").unwrap();
        assert!(qf_is_isotropic(&norm_form(&SquareClass::ONE, &b, &k).unwrap()).unwrap());
        let u = k.parse_class("u").unwrap();
        assert_eq!(norm_form(&u, &b, &k).unwrap(), form(&k, "1,u,pi,u*pi"));
        // -1 is a nonsquare mod 3, so its class is u there
        let k3 = FieldDesc::qp(3).unwrap();
        let n = norm_form(&k3.parse_class("u").unwrap(), &k3.parse_class("pi").unwrap(), &k3).unwrap();
        assert_eq!(n, form(&k3, "1,1,u*pi,u*pi"));
        assert_eq!(crate::arith::legendre(-1, 3), -1);
    }

    #[test]
    fn albert_form_examples() {
        let k = q5();
        let s = (k.parse_class("u").unwrap(), k.parse_class("pi").unwrap());
        assert!(qf_is_isotropic(&albert_form(&s, &s, &k).unwrap()).unwrap());
        let one = (SquareClass::ONE, SquareClass::ONE);
        let a = albert_form(&one, &one, &k).unwrap();
        assert_eq!(a, form(&k, "1,1,-1,-1,-1,1"));
        assert!(qf_is_isotropic(&a).unwrap());
    }

    #[test]
    fn multisets_count() {
        // C(n + k - 1, k)
        assert_eq!(Multisets::new(4, 3).count(), 20);
        assert_eq!(Multisets::new(8, 9).count(), 11440);
        assert_eq!(Multisets::new(3, 0).count(), 1);
    }
}
