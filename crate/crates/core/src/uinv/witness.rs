//! Anisotropic forms of maximal rank, built along a derivation tree.
//!
//! Leaves are explicit forms over the finite base (or symbolic ones over a
//! GFF). An unramified step lifts the residue form and adds a copy twisted
//! by the uniformizer; a ramified step twists the second residue form by a
//! parameter `pi_D` of the algebra. Whenever all entries end up in the base
//! field the witness is flattened and rechecked with the hermitian engine.

use serde::Serialize;

use crate::brauer::{bc_is_division, bc_is_trivial, BrauerClass, DivisionKind};
use crate::error::{Error, Result};
use crate::fields::{compose, FieldDesc, SquareClass};
use crate::hermitian::{herm_is_isotropic, HermFormDesc, InvolutionDesc, UKind};

use super::derivation::Derivation;
use super::exact::{u_exact, Assertions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessOp {
    /// Entries lifted from the residue field (valuation 0).
    Lift,
    /// Lifted entries multiplied by the uniformizer of `k`.
    TwistUniformizer,
    /// Lifted entries multiplied by a parameter `pi_D` of the algebra.
    TwistParameter,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Witness {
    Forms { field: String, entries: Vec<String> },
    Symbolic { field: String, description: String, rank: usize },
    Combine { rule: String, field: String, parts: Vec<(WitnessOp, Witness)> },
}

impl Witness {
    pub fn rank(&self) -> usize {
        match self {
            Witness::Forms { entries, .. } => entries.len(),
            Witness::Symbolic { rank, .. } => *rank,
            Witness::Combine { parts, .. } => parts.iter().map(|(_, w)| w.rank()).sum(),
        }
    }

    /// Entries over the field of this node, when they all lie in it.
    pub fn flatten(&self) -> Option<(FieldDesc, Vec<SquareClass>)> {
        match self {
            Witness::Forms { field, entries } => {
                let k = FieldDesc::parse(field).ok()?;
                let entries = entries.iter().map(|e| k.parse_class(e)).collect::<Result<Vec<_>>>().ok()?;
                Some((k, entries))
            }
            Witness::Symbolic { .. } => None,
            Witness::Combine { field, parts, .. } => {
                let k = FieldDesc::parse(field).ok()?;
                let residue = k.residue()?;
                let mut out = Vec::new();
                for (op, w) in parts {
                    if *op == WitnessOp::TwistParameter {
                        if w.rank() == 0 {
                            continue;
                        }
                        return None;
                    }
                    let (kc, entries) = w.flatten()?;
                    if &kc != residue {
                        return None;
                    }
                    let odd = *op == WitnessOp::TwistUniformizer;
                    for e in entries {
                        out.push(compose(&k, e, odd).ok()?);
                    }
                }
                Some((k, out))
            }
        }
    }
}

fn from_derivation(d: &Derivation) -> Result<Witness> {
    let child = |i: usize| from_derivation(&d.children[i]);
    match d.rule.as_str() {
        "base:finite" => {
            let k = FieldDesc::parse(&d.field)?;
            let entries = match d.kind {
                // the norm form <1, -nu> of F_q^2 is anisotropic
                UKind::Plus => vec![SquareClass::ONE, k.neg(k.nonsquare_unit()?)],
                UKind::Minus => vec![],
                UKind::Zero => vec![SquareClass::ONE],
            };
            Ok(Witness::Forms { field: d.field.clone(), entries: entries.iter().map(|e| k.class_name(e)).collect() })
        }
        "base:GFF" | "assert:division" => Ok(Witness::Symbolic {
            field: d.field.clone(),
            description: format!("anisotropic {} form over {} for {}", d.kind, d.field, d.class),
            rank: d.value_u64().unwrap_or(0) as usize,
        }),
        "morita" => child(0),
        "residue:unramified" | "unitary:unramified" => {
            let w = child(0)?;
            Ok(Witness::Combine {
                rule: d.rule.clone(),
                field: d.field.clone(),
                parts: vec![(WitnessOp::Lift, w.clone()), (WitnessOp::TwistUniformizer, w)],
            })
        }
        "residue:ramified" | "unitary:ramified-algebra" | "unitary:ramified-extension" => Ok(Witness::Combine {
            rule: d.rule.clone(),
            field: d.field.clone(),
            parts: vec![(WitnessOp::Lift, child(0)?), (WitnessOp::TwistParameter, child(1)?)],
        }),
        other => Err(Error::internal(format!("no witness construction for rule {other}"))),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub witness: Witness,
    pub rank: usize,
    /// Entries in `k` when the witness flattens.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<String>>,
    /// Reduction used for the recheck, when one applies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verified_by: Option<String>,
    pub verified_anisotropic: Option<bool>,
}

/// Builds the witness for `u_exact(b, kind, lambda)` and, for shapes the
/// hermitian engine handles, rechecks that it is anisotropic.
pub fn witness(b: &BrauerClass, kind: UKind, lambda: Option<&SquareClass>, asr: &Assertions) -> Result<WitnessReport> {
    let d = u_exact(b, kind, lambda, asr)?;
    witness_for(b, kind, lambda, &d)
}

pub fn witness_for(b: &BrauerClass, kind: UKind, lambda: Option<&SquareClass>, d: &Derivation) -> Result<WitnessReport> {
    let w = from_derivation(d)?;
    let rank = w.rank();
    if Some(rank as u64) != d.value_u64() {
        return Err(Error::internal(format!("witness rank {rank} differs from u = {}", d.value)));
    }
    let flat = w.flatten().filter(|(k, _)| k == &b.field);
    let mut report = WitnessReport {
        witness: w,
        rank,
        entries: flat.as_ref().map(|(k, e)| e.iter().map(|c| k.class_name(c)).collect()),
        verified_by: None,
        verified_anisotropic: None,
    };
    let Some((_, entries)) = flat else {
        return Ok(report);
    };
    if b.field.is_gff_based() {
        return Ok(report);
    }
    let shape = match (kind, bc_is_division(b)?) {
        (UKind::Minus, DivisionKind::Quaternion) if b.symbols.len() == 1 => {
            Some((b.clone(), InvolutionDesc::Symplectic, "trace form <c> (x) <1,-a,-b,ab>"))
        }
        (UKind::Zero, _) if bc_is_trivial(b)? => Some((
            b.clone(),
            InvolutionDesc::Unitary(*lambda.expect("zero kind has lambda")),
            "trace form <c> (x) <1,-lambda>",
        )),
        (UKind::Plus, DivisionKind::Split) => Some((b.clone(), InvolutionDesc::Orthogonal, "quadratic form")),
        _ => None,
    };
    if let Some((algebra, inv, how)) = shape {
        let h = HermFormDesc::new(algebra, inv, 1, entries)?;
        let iso = herm_is_isotropic(&h)?;
        if iso {
            return Err(Error::internal(format!(
                "witness {:?} over {} is isotropic",
                report.entries, b.field
            )));
        }
        report.verified_by = Some(how.into());
        report.verified_anisotropic = Some(true);
    }
    Ok(report)
}
