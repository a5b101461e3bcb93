//! Period-2 Brauer classes presented as lists of quaternion symbols.
//!
//! Over a CDV field with odd residue characteristic every symbol splits as
//! an unramified part and a cyclic part `(chi, pi)`; the residue character
//! `chi` and the residue class over `kbar` decide everything recursively.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{
    decompose, quadratic_extension, sqcl_group, transport, FieldDesc, SquareClass, TransitionMap,
};
use crate::quadform::{albert_form, norm_form, qf_is_isotropic};

pub type Symbol = (SquareClass, SquareClass);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrauerClass {
    pub field: FieldDesc,
    pub symbols: Vec<Symbol>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamificationData {
    /// Residue character, a class of `kbar` (1 when unramified).
    pub character: SquareClass,
    /// Class over `kbar` of the unramified part.
    pub residue_class: BrauerClass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DivisionKind {
    Split,
    Quaternion,
    Biquaternion,
}

impl DivisionKind {
    pub fn index(&self) -> u32 {
        match self {
            DivisionKind::Split => 1,
            DivisionKind::Quaternion => 2,
            DivisionKind::Biquaternion => 4,
        }
    }
}

impl BrauerClass {
    pub fn new(field: FieldDesc, symbols: Vec<Symbol>) -> Result<Self> {
        for (a, b) in &symbols {
            field.check(a)?;
            field.check(b)?;
        }
        Ok(BrauerClass { field, symbols })
    }

    pub fn trivial(field: FieldDesc) -> Self {
        BrauerClass { field, symbols: Vec::new() }
    }

    pub fn symbol(field: FieldDesc, a: SquareClass, b: SquareClass) -> Result<Self> {
        Self::new(field, vec![(a, b)])
    }

    /// Parses `(u,pi)`, `(u,pi);(v,t)`; `1` or the empty string is the
    /// trivial class.
    pub fn parse(field: &FieldDesc, s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.is_empty() || trimmed == "1" {
            return Ok(Self::trivial(field.clone()));
        }
        let mut symbols = Vec::new();
        let mut offset = s.len() - s.trim_start().len();
        for part in trimmed.split(';') {
            let body = part.trim();
            let lead = part.len() - part.trim_start().len();
            let inner = body
                .strip_prefix('(')
                .and_then(|b| b.strip_suffix(')'))
                .ok_or_else(|| Error::Parse {
                    pos: offset + lead,
                    msg: format!("malformed symbol {body:?}, expected (a,b)"),
                })?;
            let (a, b) = inner.split_once(',').ok_or_else(|| Error::Parse {
                pos: offset + lead,
                msg: format!("symbol {body:?} needs two slots"),
            })?;
            let shift = |e: Error, extra: usize| match e {
                Error::Parse { pos, msg } => Error::Parse { pos: pos + offset + lead + extra, msg },
                other => other,
            };
            let a_cls = field.parse_class(a).map_err(|e| shift(e, 1))?;
            let b_cls = field.parse_class(b).map_err(|e| shift(e, 2 + a.len()))?;
            symbols.push((a_cls, b_cls));
            offset += part.len() + 1;
        }
        Ok(BrauerClass { field: field.clone(), symbols })
    }

    /// Sum in `Br(k)`: concatenation of symbol lists.
    pub fn plus(&self, other: &BrauerClass) -> Result<BrauerClass> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                expected: self.field.to_string(),
                got: other.field.to_string(),
            });
        }
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Ok(BrauerClass { field: self.field.clone(), symbols })
    }
}

impl fmt::Display for BrauerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.symbols.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .symbols
            .iter()
            .map(|(a, b)| format!("({},{})", self.field.class_name(a), self.field.class_name(b)))
            .collect();
        write!(f, "{}", parts.join(";"))
    }
}

/// Residue character and residue class of `B` at the outermost valuation.
pub fn bc_ramification(b: &BrauerClass) -> Result<RamificationData> {
    let k = &b.field;
    let residue = k
        .residue()
        .ok_or_else(|| Error::invalid(format!("{k} is not complete discretely valued")))?;
    let minus_one = residue.neg_one();
    let mut character = SquareClass::ONE;
    let mut residue_symbols = Vec::with_capacity(b.symbols.len());
    for (x, y) in &b.symbols {
        // (s pi^i, t pi^j) = (s,t) + j (s,pi) + i (t,pi) + ij (-1,pi)
        let (s, i) = decompose(k, x)?;
        let (t, j) = decompose(k, y)?;
        if j {
            character = character.mul(s);
        }
        if i {
            character = character.mul(t);
        }
        if i && j {
            character = character.mul(minus_one);
        }
        residue_symbols.push((s, t));
    }
    Ok(RamificationData {
        character,
        residue_class: BrauerClass { field: residue.clone(), symbols: residue_symbols },
    })
}

/// Over a GFF the only decidable case is a formally trivial list: every
/// symbol has a square slot or symbols cancel in pairs.
pub(crate) fn formally_trivial(b: &BrauerClass) -> bool {
    let mut remaining: Vec<Symbol> = b
        .symbols
        .iter()
        .filter(|(x, y)| !x.is_one() && !y.is_one())
        .map(|&(x, y)| if x <= y { (x, y) } else { (y, x) })
        .collect();
    remaining.sort();
    let mut stack: Vec<Symbol> = Vec::new();
    for s in remaining {
        if stack.last() == Some(&s) {
            stack.pop();
        } else {
            stack.push(s);
        }
    }
    stack.is_empty()
}

fn trivial_recursive(b: &BrauerClass) -> Result<bool> {
    match &b.field {
        FieldDesc::Finite { .. } => Ok(true),
        FieldDesc::Gff { .. } => {
            if formally_trivial(b) {
                Ok(true)
            } else {
                Err(Error::unsupported(format!(
                    "triviality of {b} over {} needs the global function field itself",
                    b.field
                )))
            }
        }
        FieldDesc::Cdv(_) => {
            let ram = bc_ramification(b)?;
            if !ram.character.is_one() {
                return Ok(false);
            }
            trivial_recursive(&ram.residue_class)
        }
    }
}

/// True iff `B` is split. For a single symbol the recursive answer is
/// cross-checked against isotropy of the norm form.
pub fn bc_is_trivial(b: &BrauerClass) -> Result<bool> {
    let recursive = trivial_recursive(b)?;
    if b.symbols.len() == 1 && !b.field.is_gff_based() {
        let (x, y) = b.symbols[0];
        let by_norm = qf_is_isotropic(&norm_form(&x, &y, &b.field)?)?;
        if by_norm != recursive {
            return Err(Error::internal(format!(
                "triviality of {b}: residue recursion says {recursive}, norm form says {by_norm}"
            )));
        }
    }
    Ok(recursive)
}

fn require_finite_base(b: &BrauerClass) -> Result<()> {
    if b.field.is_gff_based() {
        Err(Error::unsupported(format!(
            "division status over {} must be asserted",
            b.field
        )))
    } else {
        Ok(())
    }
}

pub fn bc_is_division(b: &BrauerClass) -> Result<DivisionKind> {
    require_finite_base(b)?;
    match b.symbols.len() {
        0 => Ok(DivisionKind::Split),
        1 => {
            let (x, y) = b.symbols[0];
            let iso = qf_is_isotropic(&norm_form(&x, &y, &b.field)?)?;
            Ok(if iso { DivisionKind::Split } else { DivisionKind::Quaternion })
        }
        2 => {
            let albert = albert_form(&b.symbols[0], &b.symbols[1], &b.field)?;
            if !qf_is_isotropic(&albert)? {
                Ok(DivisionKind::Biquaternion)
            } else if bc_is_trivial(b)? {
                Ok(DivisionKind::Split)
            } else {
                Ok(DivisionKind::Quaternion)
            }
        }
        n => Err(Error::UnsupportedClass(format!(
            "{n} symbols; division testing is limited to two"
        ))),
    }
}

/// Index by the tame recursion `ind(B) = ind(Bbar)` when unramified and
/// `2 ind(Bbar (x) kbar(sqrt chi))` otherwise. Independent of the Albert
/// form route and not limited in the number of symbols.
pub fn bc_index(b: &BrauerClass) -> Result<u32> {
    require_finite_base(b)?;
    match &b.field {
        FieldDesc::Finite { .. } => Ok(1),
        FieldDesc::Gff { .. } => unreachable!(),
        FieldDesc::Cdv(residue) => {
            let ram = bc_ramification(b)?;
            if ram.character.is_one() {
                bc_index(&ram.residue_class)
            } else {
                let (_, m) = quadratic_extension(residue, &ram.character)?;
                Ok(2 * bc_index(&bc_base_change(&ram.residue_class, &m)?)?)
            }
        }
    }
}

/// A single symbol equivalent to a quaternion class.
pub fn bc_single_symbol_rep(b: &BrauerClass) -> Result<Symbol> {
    if bc_is_division(b)? != DivisionKind::Quaternion {
        return Err(Error::invalid(format!("{b} is not Brauer equivalent to a division quaternion")));
    }
    let candidates = b.symbols.iter().copied().chain({
        let g = sqcl_group(&b.field)?;
        let pairs: Vec<Symbol> = g
            .iter()
            .flat_map(|x| g.iter().map(move |y| (*x, *y)))
            .collect();
        pairs
    });
    for s in candidates {
        let sum = b.plus(&BrauerClass { field: b.field.clone(), symbols: vec![s] })?;
        if trivial_recursive(&sum)? {
            return Ok(s);
        }
    }
    Err(Error::internal(format!("no single symbol represents {b}")))
}

pub fn bc_base_change(b: &BrauerClass, m: &TransitionMap) -> Result<BrauerClass> {
    if b.field != m.source {
        return Err(Error::FieldMismatch {
            expected: m.source.to_string(),
            got: b.field.to_string(),
        });
    }
    let symbols = b
        .symbols
        .iter()
        .map(|(x, y)| Ok((transport(m, x)?, transport(m, y)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(BrauerClass { field: m.target.clone(), symbols })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum UnitaryCase {
    /// `K/k` unramified and `D (x) K` unramified.
    Case1,
    /// `D (x) K` ramified.
    Case2,
    /// `K/k` ramified.
    Case3,
}

#[derive(Clone, Debug)]
pub struct UnitaryClassification {
    pub case: UnitaryCase,
    pub extension: TransitionMap,
    pub base_changed: BrauerClass,
    /// For Case2: classes `u`, `lambda`, `u lambda` of `kbar` whose square
    /// roots give the three candidate fixed fields.
    pub fixed_fields: Option<[SquareClass; 3]>,
}

/// Ramification case of `D (x) k(sqrt lambda)`, checking that it stays
/// division.
pub fn classify_unitary_case(b: &BrauerClass, lambda: &SquareClass) -> Result<UnitaryClassification> {
    classify(b, lambda, true)
}

/// As [`classify_unitary_case`] with the division precondition taken as
/// given (used when the residue field is a GFF).
pub fn classify_unitary_case_asserted(b: &BrauerClass, lambda: &SquareClass) -> Result<UnitaryClassification> {
    classify(b, lambda, false)
}

fn classify(b: &BrauerClass, lambda: &SquareClass, check_division: bool) -> Result<UnitaryClassification> {
    let k = &b.field;
    if !k.is_cdv() {
        return Err(Error::invalid(format!("{k} is not complete discretely valued")));
    }
    let (target, m) = quadratic_extension(k, lambda)?;
    let _ = target;
    let b_k = bc_base_change(b, &m)?;
    if check_division {
        let before = bc_is_division(b)?;
        let after = bc_is_division(&b_k)?;
        if after.index() < before.index() {
            return Err(Error::NotDivision {
                reason: format!(
                    "{b} has index {} but index {} over k(sqrt {})",
                    before.index(),
                    after.index(),
                    k.class_name(lambda)
                ),
                witness: b_k.to_string(),
            });
        }
    }
    let (lambda_unit, ramified_ext) = decompose(k, lambda)?;
    let ram_k = bc_ramification(&b_k)?;
    if ramified_ext {
        if !ram_k.character.is_one() {
            return Err(Error::internal(format!(
                "{b} stays ramified over the ramified extension k(sqrt {})",
                k.class_name(lambda)
            )));
        }
        return Ok(UnitaryClassification {
            case: UnitaryCase::Case3,
            extension: m,
            base_changed: b_k,
            fixed_fields: None,
        });
    }
    if ram_k.character.is_one() {
        return Ok(UnitaryClassification {
            case: UnitaryCase::Case1,
            extension: m,
            base_changed: b_k,
            fixed_fields: None,
        });
    }
    let chi = bc_ramification(b)?.character;
    Ok(UnitaryClassification {
        case: UnitaryCase::Case2,
        extension: m,
        base_changed: b_k,
        fixed_fields: Some([chi, lambda_unit, chi.mul(lambda_unit)]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q5() -> FieldDesc {
        FieldDesc::qp(5).unwrap()
    }

    fn qt5() -> FieldDesc {
        FieldDesc::qp_t(5).unwrap()
    }

    #[test]
    fn ramification_examples() {
        let k = q5();
        let f5 = FieldDesc::finite(5, 1).unwrap();
        let unram = BrauerClass::parse(&k, "(u,u)").unwrap();
        let r = bc_ramification(&unram).unwrap();
        assert!(r.character.is_one());
        assert_eq!(r.residue_class.to_string(), "(u,u)");

        let r = bc_ramification(&BrauerClass::parse(&k, "(u,pi)").unwrap()).unwrap();
        assert_eq!(f5.class_name(&r.character), "u");
        assert!(bc_is_trivial(&r.residue_class).unwrap());

        // (pi,pi) = (-1,pi): over Q_3 the character is the class of -1
        let k3 = FieldDesc::qp(3).unwrap();
        let r = bc_ramification(&BrauerClass::parse(&k3, "(pi,pi)").unwrap()).unwrap();
        assert_eq!(r.character, FieldDesc::finite(3, 1).unwrap().neg_one());
        assert!(!r.character.is_one());
        let both = BrauerClass::parse(&k3, "(pi,pi);(-1,pi)").unwrap();
        assert!(bc_is_trivial(&both).unwrap());
    }

    #[test]
    fn triviality_examples() {
        let k = q5();
        assert!(bc_is_trivial(&BrauerClass::trivial(k.clone())).unwrap());
        assert!(!bc_is_trivial(&BrauerClass::parse(&k, "(u,pi)").unwrap()).unwrap());
        assert!(bc_is_trivial(&BrauerClass::parse(&k, "(u,pi);(u,pi)").unwrap()).unwrap());
    }

    #[test]
    fn division_examples() {
        let k = q5();
        assert_eq!(bc_is_division(&BrauerClass::parse(&k, "(u,pi)").unwrap()).unwrap(), DivisionKind::Quaternion);
        assert_eq!(bc_is_division(&BrauerClass::parse(&k, "(u,pi);(u,pi)").unwrap()).unwrap(), DivisionKind::Split);
        let k2 = qt5();
        for v in sqcl_group(&k2).unwrap() {
            let b = BrauerClass::new(k2.clone(), vec![(k2.parse_class("u").unwrap(), k2.parse_class("pi").unwrap()), (v, k2.parse_class("t").unwrap())]).unwrap();
            assert_ne!(bc_is_division(&b).unwrap(), DivisionKind::Biquaternion, "{b}");
        }
        let three = BrauerClass::parse(&k, "(u,pi);(u,pi);(u,pi)").unwrap();
        assert!(matches!(bc_is_division(&three), Err(Error::UnsupportedClass(_))));
        let g = BrauerClass::parse(&FieldDesc::cdv(FieldDesc::gff(9).unwrap()), "(u,pi)").unwrap();
        assert!(bc_is_division(&g).is_err());
    }

    #[test]
    fn single_symbol_rep_examples() {
        let k = q5();
        let u = k.parse_class("u").unwrap();
        let pi = k.parse_class("pi").unwrap();
        assert_eq!(bc_single_symbol_rep(&BrauerClass::parse(&k, "(u,pi)").unwrap()).unwrap(), (u, pi));
        assert_eq!(bc_single_symbol_rep(&BrauerClass::parse(&k, "(u,pi);(1,1)").unwrap()).unwrap(), (u, pi));
        let k2 = qt5();
        let b = BrauerClass::parse(&k2, "(u,pi);(u,pi*t)").unwrap();
        let s = bc_single_symbol_rep(&b).unwrap();
        let sum = b.plus(&BrauerClass::new(k2.clone(), vec![s]).unwrap()).unwrap();
        assert!(bc_is_trivial(&sum).unwrap());
    }

    #[test]
    fn base_change_examples() {
        let k = q5();
        let b = BrauerClass::parse(&k, "(u,pi)").unwrap();
        let (_, ram) = quadratic_extension(&k, &k.parse_class("pi").unwrap()).unwrap();
        let bk = bc_base_change(&b, &ram).unwrap();
        assert_eq!(bk.to_string(), "(u,1)");
        assert!(bc_is_trivial(&bk).unwrap());

        // over Q5((t)), extending by the unit p keeps u a nonsquare
        let k2 = qt5();
        let b2 = BrauerClass::parse(&k2, "(u,t)").unwrap();
        let (_, m) = quadratic_extension(&k2, &k2.parse_class("pi").unwrap()).unwrap();
        let b2k = bc_base_change(&b2, &m).unwrap();
        assert!(!bc_ramification(&b2k).unwrap().character.is_one());

        assert_eq!(bc_base_change(&b, &TransitionMap::identity(&k)).unwrap(), b);
        assert!(bc_base_change(&b2, &ram).is_err());
    }

    #[test]
    fn unitary_classification_examples() {
        let k = qt5();
        let unram = BrauerClass::parse(&k, "(u,pi)").unwrap();
        let c = classify_unitary_case(&unram, &k.parse_class("t").unwrap()).unwrap();
        assert_eq!(c.case, UnitaryCase::Case3);

        let ram = BrauerClass::parse(&k, "(u,t)").unwrap();
        let c = classify_unitary_case(&ram, &k.parse_class("pi").unwrap()).unwrap();
        assert_eq!(c.case, UnitaryCase::Case2);
        let names: Vec<String> = c.fixed_fields.unwrap().iter().map(|a| q5().class_name(a)).collect();
        assert_eq!(names, ["u", "pi", "u*pi"]);

        assert!(matches!(
            classify_unitary_case(&ram, &SquareClass::ONE),
            Err(Error::NotAnExtension(_))
        ));
        // every quadratic extension of Q5 splits (u,p): not division
        assert!(matches!(
            classify_unitary_case(&unram, &k.parse_class("u").unwrap()),
            Err(Error::NotDivision { .. })
        ));
    }

    #[test]
    fn index_routes_agree_on_two_symbol_classes() {
        let k = qt5();
        let g = sqcl_group(&k).unwrap();
        for a in &g {
            for b in &g {
                for c in [g[1], g[5]] {
                    for d in [g[2], g[4], g[6]] {
                        let cls = BrauerClass::new(k.clone(), vec![(*a, *b), (c, d)]).unwrap();
                        assert_eq!(bc_is_division(&cls).unwrap().index(), bc_index(&cls).unwrap(), "{cls}");
                    }
                }
            }
        }
    }

    #[test]
    fn parse_errors_are_located() {
        let k = q5();
        match BrauerClass::parse(&k, "(u,pi);(u,zz)") {
            Err(Error::Parse { pos, .. }) => assert!(pos >= 10, "pos {pos}"),
            other => panic!("{other:?}"),
        }
        assert!(BrauerClass::parse(&k, "(u pi)").is_err());
        assert_eq!(BrauerClass::parse(&k, " (u,pi) ; (1,u) ").unwrap().to_string(), "(u,pi);(1,u)");
    }

    #[test]
    fn gff_formal_rules() {
        let k = FieldDesc::cdv(FieldDesc::gff(9).unwrap());
        let b = BrauerClass::parse(&k, "(u,pi)").unwrap();
        assert!(!bc_is_trivial(&b).unwrap());
        let unram = BrauerClass::parse(&k, "(a,b)").unwrap();
        assert!(bc_is_trivial(&unram).is_err());
        let cancel = BrauerClass::parse(&k, "(a,b);(b,a)").unwrap();
        assert!(bc_is_trivial(&cancel).unwrap());
    }
}
