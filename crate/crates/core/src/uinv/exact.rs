//! Exact hermitian u-invariants by recursion on the residue field.
//!
//! Over a CDV field with odd residue characteristic a division algebra of
//! period two is either unramified (character 1) or ramified with residue
//! character `chi`. In the first case every anisotropic form is `h1 + pi h2`
//! with both residue forms of the same type; in the second the twisting
//! element `pi_D` changes the type of the second residue form. Unitary
//! involutions split into three cases by the ramification of `K/k` and of
//! `D (x) K`. Towers bottom out in the finite-field or GFF table.

use std::collections::BTreeSet;

use crate::brauer::{
    bc_base_change, bc_is_division, bc_is_trivial, bc_ramification, classify_unitary_case, BrauerClass,
    Symbol, UnitaryCase,
};
use crate::error::{Error, Result};
use crate::fields::{decompose, quadratic_extension, transport, FieldDesc, SquareClass};
use crate::hermitian::UKind;

use super::derivation::{int, Combine, Derivation};
use super::table::{BaseAlgebra, BaseField, BaseTable};

/// Facts supplied by the caller that the engine cannot decide itself.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Assertions {
    /// Residue algebras over a global function field are division (and stay
    /// division over the quadratic extensions that occur).
    pub residue_division: bool,
}

impl Assertions {
    pub fn none() -> Self {
        Assertions::default()
    }

    pub fn residue() -> Self {
        Assertions { residue_division: true }
    }

    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        let mut out = Assertions::none();
        for item in items {
            for name in item.as_ref().split(',').map(str::trim).filter(|s| !s.is_empty()) {
                match name {
                    "residue" => out.residue_division = true,
                    other => {
                        return Err(Error::Parse {
                            pos: 0,
                            msg: format!("unknown assertion {other:?}, expected \"residue\""),
                        })
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn names(&self) -> Vec<&'static str> {
        if self.residue_division {
            vec!["residue"]
        } else {
            Vec::new()
        }
    }
}

/// The u-invariant of the given kind of the division algebra in class `b`
/// (for `zero`: of `b (x) k(sqrt lambda)` with a unitary involution).
pub fn u_exact(b: &BrauerClass, kind: UKind, lambda: Option<&SquareClass>, asr: &Assertions) -> Result<Derivation> {
    match (kind, lambda) {
        (UKind::Zero, None) => Err(Error::invalid("the zero kind needs --lambda, the class defining K = k(sqrt lambda)")),
        (UKind::Plus | UKind::Minus, Some(l)) => Err(Error::invalid(format!(
            "lambda = {} only applies to the zero kind",
            b.field.class_name(l)
        ))),
        _ => {
            if let Some(l) = lambda {
                b.field.check(l)?;
            }
            exact(b, kind, lambda.copied(), asr)
        }
    }
}

fn exact(b: &BrauerClass, kind: UKind, lambda: Option<SquareClass>, asr: &Assertions) -> Result<Derivation> {
    match &b.field {
        FieldDesc::Finite { .. } => finite_leaf(b, kind, lambda),
        FieldDesc::Gff { .. } => gff_leaf(&b.field, &[], &b.symbols, kind, lambda, asr),
        FieldDesc::Cdv(residue) => match residue.as_ref() {
            FieldDesc::Gff { .. } => cdv_over_gff(b, kind, lambda, asr),
            _ if b.field.is_gff_based() => Err(Error::unsupported(format!(
                "{}: only one complete layer over a global function field is handled",
                b.field
            ))),
            _ => cdv(b, kind, lambda, asr),
        },
    }
}

fn lambda_name(k: &FieldDesc, lambda: Option<SquareClass>) -> Option<String> {
    lambda.map(|l| k.class_name(&l))
}

fn finite_leaf(b: &BrauerClass, kind: UKind, lambda: Option<SquareClass>) -> Result<Derivation> {
    if let Some(l) = lambda {
        quadratic_extension(&b.field, &l)?;
    }
    let e = BaseTable::lookup(BaseField::Finite, BaseAlgebra::Field, kind).expect("finite table is complete");
    // Br(F_q) = 0: every class is the field itself.
    Ok(Derivation::leaf("base:finite", b.field.to_string(), "1".into(), kind, int(e.value as i64), e.cite)
        .with_lambda(lambda_name(&b.field, lambda)))
}

fn cdv(b: &BrauerClass, kind: UKind, lambda: Option<SquareClass>, asr: &Assertions) -> Result<Derivation> {
    let k = &b.field;
    let residue = k.residue().expect("cdv field");
    let field = k.to_string();
    let class = b.to_string();
    match kind {
        UKind::Plus | UKind::Minus => {
            bc_is_division(b)?;
            let ram = bc_ramification(b)?;
            let chi = ram.character;
            if chi.is_one() {
                let child = exact(&ram.residue_class, kind, None, asr)?;
                Ok(Derivation::node(
                    "residue:unramified",
                    field,
                    class,
                    kind,
                    "unramified D: u(D) = 2·u(Dbar), both residue forms of the same type",
                    Combine::Double,
                    vec![child],
                ))
            } else {
                let (_, m) = quadratic_extension(residue, &chi)?;
                let first = exact(&ram.residue_class, UKind::Zero, Some(chi), asr)?;
                let second = exact(&bc_base_change(&ram.residue_class, &m)?, kind, None, asr)?;
                Ok(Derivation::node(
                    "residue:ramified",
                    field,
                    class,
                    kind,
                    "ramified D with residue character chi: u(D) = u0(Dbar0 (x) kbar(sqrt chi)) + u(Dbar), Dbar over kbar(sqrt chi)",
                    Combine::Sum,
                    vec![first, second],
                ))
            }
        }
        UKind::Zero => {
            let lambda = lambda.expect("checked by u_exact");
            let cls = classify_unitary_case(b, &lambda)?;
            let ram = bc_ramification(b)?;
            let (lambda_bar, _) = decompose(k, &lambda)?;
            let node = match cls.case {
                UnitaryCase::Case1 => {
                    if !ram.character.is_one() {
                        return Err(Error::NotDivision {
                            reason: format!(
                                "{b} is ramified with character {} and k(sqrt {}) kills it",
                                residue.class_name(&ram.character),
                                k.class_name(&lambda)
                            ),
                            witness: cls.base_changed.to_string(),
                        });
                    }
                    let child = exact(&ram.residue_class, UKind::Zero, Some(lambda_bar), asr)?;
                    Derivation::node(
                        "unitary:unramified",
                        field,
                        class,
                        kind,
                        "K/k unramified and D (x) K unramified: u0(D (x) K) = 2·u0(Dbar (x) Kbar)",
                        Combine::Double,
                        vec![child],
                    )
                }
                UnitaryCase::Case2 => {
                    let [chi, lb, chi_lb] = cls.fixed_fields.expect("case 2 carries its fields");
                    let (_, m1) = quadratic_extension(residue, &chi)?;
                    let first = exact(
                        &bc_base_change(&ram.residue_class, &m1)?,
                        UKind::Zero,
                        Some(transport(&m1, &lb)?),
                        asr,
                    )?;
                    let (_, m3) = quadratic_extension(residue, &chi_lb)?;
                    let second = exact(
                        &bc_base_change(&ram.residue_class, &m3)?,
                        UKind::Zero,
                        Some(transport(&m3, &chi)?),
                        asr,
                    )?;
                    Derivation::node(
                        "unitary:ramified-algebra",
                        field,
                        class,
                        kind,
                        "K/k unramified, D (x) K ramified: u0(D (x) K) = u0 over kbar(sqrt chi) + u0 over kbar(sqrt chi·lambda)",
                        Combine::Sum,
                        vec![first, second],
                    )
                }
                UnitaryCase::Case3 => {
                    let ram_k = bc_ramification(&cls.base_changed)?;
                    if !ram_k.character.is_one() {
                        return Err(Error::internal(format!("{b} stays ramified over a ramified K")));
                    }
                    let plus = exact(&ram_k.residue_class, UKind::Plus, None, asr)?;
                    let minus = exact(&ram_k.residue_class, UKind::Minus, None, asr)?;
                    Derivation::node(
                        "unitary:ramified-extension",
                        field,
                        class,
                        kind,
                        "K/k ramified: u0(D (x) K) = u+(D') + u-(D') for the residue algebra D' of D (x) K",
                        Combine::Sum,
                        vec![plus, minus],
                    )
                }
            };
            Ok(node.with_lambda(Some(k.class_name(&lambda))))
        }
    }
}

/// One complete layer over a GFF residue. Quadratic extensions of the GFF
/// are kept formal: a residue algebra over `kbar(sqrt s)` is represented by
/// its symbols over `kbar` plus the list of classes `s` that became squares.
fn cdv_over_gff(b: &BrauerClass, kind: UKind, lambda: Option<SquareClass>, asr: &Assertions) -> Result<Derivation> {
    let k = &b.field;
    let gff = k.residue().expect("cdv field");
    let field = k.to_string();
    let class = b.to_string();
    let ram = bc_ramification(b)?;
    let chi = ram.character;
    let residue_symbols = &ram.residue_class.symbols;
    match kind {
        UKind::Plus | UKind::Minus => {
            if chi.is_one() {
                let child = gff_leaf(gff, &[], residue_symbols, kind, None, asr)?;
                Ok(Derivation::node(
                    "residue:unramified",
                    field,
                    class,
                    kind,
                    "unramified D: u(D) = 2·u(Dbar), both residue forms of the same type",
                    Combine::Double,
                    vec![child],
                ))
            } else {
                let first = gff_leaf(gff, &[], residue_symbols, UKind::Zero, Some(chi), asr)?;
                let second = gff_leaf(gff, &[chi], residue_symbols, kind, None, asr)?;
                Ok(Derivation::node(
                    "residue:ramified",
                    field,
                    class,
                    kind,
                    "ramified D with residue character chi: u(D) = u0(Dbar0 (x) kbar(sqrt chi)) + u(Dbar), Dbar over kbar(sqrt chi)",
                    Combine::Sum,
                    vec![first, second],
                ))
            }
        }
        UKind::Zero => {
            let lambda = lambda.expect("checked by u_exact");
            let (lambda_bar, odd) = decompose(k, &lambda)?;
            let nontrivial = !chi.is_one() || !formal_reduce(residue_symbols, &[]).is_empty();
            let node = if odd {
                let (_, m) = quadratic_extension(k, &lambda)?;
                let bk = bc_base_change(b, &m)?;
                let ram_k = bc_ramification(&bk)?;
                if !ram_k.character.is_one() {
                    return Err(Error::internal(format!("{b} stays ramified over a ramified K")));
                }
                if nontrivial && formal_reduce(&ram_k.residue_class.symbols, &[]).is_empty() {
                    return Err(Error::NotDivision {
                        reason: format!("{b} splits over k(sqrt {})", k.class_name(&lambda)),
                        witness: bk.to_string(),
                    });
                }
                let plus = gff_leaf(gff, &[], &ram_k.residue_class.symbols, UKind::Plus, None, asr)?;
                let minus = gff_leaf(gff, &[], &ram_k.residue_class.symbols, UKind::Minus, None, asr)?;
                Derivation::node(
                    "unitary:ramified-extension",
                    field,
                    class,
                    kind,
                    "K/k ramified: u0(D (x) K) = u+(D') + u-(D') for the residue algebra D' of D (x) K",
                    Combine::Sum,
                    vec![plus, minus],
                )
            } else if chi.is_one() {
                let child = gff_leaf(gff, &[], residue_symbols, UKind::Zero, Some(lambda_bar), asr)?;
                Derivation::node(
                    "unitary:unramified",
                    field,
                    class,
                    kind,
                    "K/k unramified and D (x) K unramified: u0(D (x) K) = 2·u0(Dbar (x) Kbar)",
                    Combine::Double,
                    vec![child],
                )
            } else if chi == lambda_bar {
                return Err(Error::NotDivision {
                    reason: format!(
                        "the ramified part of {b} has character {} and splits over k(sqrt {})",
                        gff.class_name(&chi),
                        k.class_name(&lambda)
                    ),
                    witness: b.to_string(),
                });
            } else {
                let first = gff_leaf(gff, &[chi], residue_symbols, UKind::Zero, Some(lambda_bar), asr)?;
                let second = gff_leaf(gff, &[chi.mul(lambda_bar)], residue_symbols, UKind::Zero, Some(chi), asr)?;
                Derivation::node(
                    "unitary:ramified-algebra",
                    field,
                    class,
                    kind,
                    "K/k unramified, D (x) K ramified: u0(D (x) K) = u0 over kbar(sqrt chi) + u0 over kbar(sqrt chi·lambda)",
                    Combine::Sum,
                    vec![first, second],
                )
            };
            Ok(node.with_lambda(Some(k.class_name(&lambda))))
        }
    }
}

fn span(gens: &[SquareClass]) -> BTreeSet<u32> {
    let mut out = BTreeSet::from([0u32]);
    for g in gens {
        let next: Vec<u32> = out.iter().map(|x| x ^ g.unit).collect();
        out.extend(next);
    }
    out
}

/// Symbols over `kbar(sqrt s_1, ...)` with the GFF labels treated as
/// independent: slots are reduced modulo the killed classes, symbols with a
/// square slot are dropped and equal symbols cancel in pairs.
pub(crate) fn formal_reduce(symbols: &[Symbol], killed: &[SquareClass]) -> Vec<Symbol> {
    let sub = span(killed);
    let canon = |x: u32| sub.iter().map(|s| x ^ s).min().unwrap_or(x);
    let mut kept: Vec<(u32, u32)> = symbols
        .iter()
        .map(|(x, y)| (canon(x.unit), canon(y.unit)))
        .filter(|(x, y)| *x != 0 && *y != 0)
        .map(|(x, y)| (x.min(y), x.max(y)))
        .collect();
    kept.sort_unstable();
    let mut stack: Vec<(u32, u32)> = Vec::new();
    for s in kept {
        if stack.last() == Some(&s) {
            stack.pop();
        } else {
            stack.push(s);
        }
    }
    stack
        .into_iter()
        .map(|(x, y)| (SquareClass { unit: x, vpar: 0 }, SquareClass { unit: y, vpar: 0 }))
        .collect()
}

fn gff_leaf(
    gff: &FieldDesc,
    killed: &[SquareClass],
    symbols: &[Symbol],
    kind: UKind,
    lambda: Option<SquareClass>,
    asr: &Assertions,
) -> Result<Derivation> {
    let killed: Vec<SquareClass> = killed.iter().copied().filter(|c| !c.is_one()).collect();
    let field = if killed.is_empty() {
        gff.to_string()
    } else {
        let names: Vec<String> = killed.iter().map(|c| gff.class_name(c)).collect();
        format!("{gff}(sqrt {})", names.join(", sqrt "))
    };
    let reduced = formal_reduce(symbols, &killed);
    if let Some(l) = lambda {
        if span(&killed).contains(&l.unit) {
            return Err(Error::NotAnExtension(format!("{} over {field}", gff.class_name(&l))));
        }
        if !reduced.is_empty() {
            let mut with_l = killed.clone();
            with_l.push(l);
            if formal_reduce(&reduced, &with_l).is_empty() {
                return Err(Error::NotDivision {
                    reason: format!("the residue algebra splits over {field}(sqrt {})", gff.class_name(&l)),
                    witness: BrauerClass { field: gff.clone(), symbols: reduced }.to_string(),
                });
            }
        }
    }
    let class = BrauerClass { field: gff.clone(), symbols: reduced.clone() }.to_string();
    let lname = lambda_name(gff, lambda);
    let algebra = if reduced.is_empty() { BaseAlgebra::Field } else { BaseAlgebra::Quaternion };
    let e = BaseTable::lookup(BaseField::Gff, algebra, kind).expect("GFF table is complete");
    let leaf = Derivation::leaf("base:GFF", field.clone(), class.clone(), kind, int(e.value as i64), e.cite)
        .with_lambda(lname.clone());
    if algebra == BaseAlgebra::Field {
        return Ok(leaf);
    }
    if !asr.residue_division {
        return Err(Error::NeedsAssertion(format!(
            "division of the residue algebra {class} over {field} is not decidable here; pass the assertion \"residue\""
        )));
    }
    Ok(Derivation::node(
        "assert:division",
        field,
        class,
        kind,
        "caller assertion: the residue algebra is division (a period-2 class over a global field is a quaternion algebra)",
        Combine::Identity,
        vec![leaf],
    )
    .with_lambda(lname))
}

/// `u0` of `b (x) k(sqrt lambda)` when that algebra is split: matrix
/// algebras over `K` share their u-invariants with `K`.
pub fn u_exact_morita(b: &BrauerClass, lambda: &SquareClass, asr: &Assertions) -> Result<Derivation> {
    let (_, m) = quadratic_extension(&b.field, lambda)?;
    let bk = bc_base_change(b, &m)?;
    if !bc_is_trivial(&bk)? {
        return Err(Error::invalid(format!(
            "{b} does not split over k(sqrt {}); use the division route",
            b.field.class_name(lambda)
        )));
    }
    let child = exact(&BrauerClass::trivial(b.field.clone()), UKind::Zero, Some(*lambda), asr)?;
    Ok(Derivation::node(
        "morita",
        b.field.to_string(),
        b.to_string(),
        UKind::Zero,
        "D (x) K is a matrix algebra over K, which has the same u-invariants as K",
        Combine::Identity,
        vec![child],
    )
    .with_lambda(Some(b.field.class_name(lambda))))
}
