//! Symbolic field towers and their square-class groups.
//!
//! A tower is a finite field `F_{p^e}` (or an axiomatized global function
//! field) wrapped in any number of complete discretely valued layers. Since
//! the residue characteristic is odd, Hensel's lemma gives
//! `k*/k*^2 = kbar*/kbar*^2 x Z/2` at every layer, so a square class is a
//! bit for the base plus one valuation-parity bit per layer.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::arith::{is_prime, prime_power};
use crate::error::{Error, Result};

/// Labels of the formal square-class generators of a global function field.
/// `nu` is the constant nonsquare; the others are treated as independent.
pub const GFF_LABELS: [&str; 6] = ["nu", "u", "v", "w", "a", "b"];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldDesc {
    Finite { p: u64, e: u32 },
    /// Global function field with constant field `F_q`, axiomatized.
    Gff { q: u64 },
    Cdv(Box<FieldDesc>),
}

/// Element of `k*/k*^2`. `unit` holds the base bits (one bit for a finite
/// base, one bit per formal label for a GFF base); bit `d - 1` of `vpar` is
/// the valuation parity at CDV depth `d` (depth 1 is the innermost layer).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct SquareClass {
    pub unit: u32,
    pub vpar: u32,
}

impl SquareClass {
    pub const ONE: SquareClass = SquareClass { unit: 0, vpar: 0 };

    pub fn is_one(&self) -> bool {
        self.unit == 0 && self.vpar == 0
    }

    /// Group law. Callers that need field checking use [`sqcl_mul`].
    pub fn mul(self, other: SquareClass) -> SquareClass {
        SquareClass {
            unit: self.unit ^ other.unit,
            vpar: self.vpar ^ other.vpar,
        }
    }

    /// Canonical index for towers over a finite base: `unit | vpar << 1`.
    pub fn index(&self) -> usize {
        (self.unit as usize) | ((self.vpar as usize) << 1)
    }
}

// Canonical order: lexicographic by (vpar, unit), outermost layer first.
impl Ord for SquareClass {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.vpar, self.unit).cmp(&(other.vpar, other.unit))
    }
}

impl PartialOrd for SquareClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn uniformizer_name(depth: usize) -> String {
    match depth {
        1 => "pi".to_string(),
        2 => "t".to_string(),
        d => format!("t{}", d - 1),
    }
}

impl FieldDesc {
    pub fn finite(p: u64, e: u32) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::invalid(format!("F{p}: characteristic must be an odd prime")));
        }
        if e == 0 {
            return Err(Error::invalid("extension degree must be at least 1"));
        }
        Ok(FieldDesc::Finite { p, e })
    }

    pub fn gff(q: u64) -> Result<Self> {
        match prime_power(q) {
            Some((p, _)) if p != 2 => Ok(FieldDesc::Gff { q }),
            _ => Err(Error::invalid(format!("GFF({q}): q must be an odd prime power"))),
        }
    }

    pub fn cdv(residue: FieldDesc) -> Self {
        FieldDesc::Cdv(Box::new(residue))
    }

    /// Structural model of `Q_p`.
    pub fn qp(p: u64) -> Result<Self> {
        Ok(Self::cdv(Self::finite(p, 1)?))
    }

    /// Structural model of `Q_p((t))`.
    pub fn qp_t(p: u64) -> Result<Self> {
        Ok(Self::cdv(Self::qp(p)?))
    }

    /// Number of CDV layers.
    pub fn height(&self) -> usize {
        match self {
            FieldDesc::Cdv(inner) => 1 + inner.height(),
            _ => 0,
        }
    }

    pub fn base(&self) -> &FieldDesc {
        match self {
            FieldDesc::Cdv(inner) => inner.base(),
            other => other,
        }
    }

    pub fn residue(&self) -> Option<&FieldDesc> {
        match self {
            FieldDesc::Cdv(inner) => Some(inner),
            _ => None,
        }
    }

    pub fn is_cdv(&self) -> bool {
        matches!(self, FieldDesc::Cdv(_))
    }

    pub fn is_gff_based(&self) -> bool {
        matches!(self.base(), FieldDesc::Gff { .. })
    }

    /// Residue characteristic of the bottom field.
    pub fn characteristic(&self) -> u64 {
        match self.base() {
            FieldDesc::Finite { p, .. } => *p,
            FieldDesc::Gff { q } => prime_power(*q).map(|(p, _)| p).unwrap_or(*q),
            FieldDesc::Cdv(_) => unreachable!(),
        }
    }

    fn unit_mask(&self) -> u32 {
        match self.base() {
            FieldDesc::Finite { .. } => 1,
            _ => (1 << GFF_LABELS.len()) - 1,
        }
    }

    pub fn contains(&self, a: &SquareClass) -> bool {
        a.unit & !self.unit_mask() == 0 && a.vpar >> self.height() == 0
    }

    pub fn check(&self, a: &SquareClass) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                expected: self.to_string(),
                got: format!("{a:?}"),
            })
        }
    }

    /// The nonsquare unit `u` of the base, lifted to every layer.
    pub fn nonsquare_unit(&self) -> Result<SquareClass> {
        match self.base() {
            FieldDesc::Finite { .. } => Ok(SquareClass { unit: 1, vpar: 0 }),
            _ => Err(Error::unsupported("a GFF base has no distinguished nonsquare unit")),
        }
    }

    /// Class of the uniformizer of the outermost layer.
    pub fn uniformizer(&self) -> Result<SquareClass> {
        match self.height() {
            0 => Err(Error::invalid(format!("{self} has no valuation"))),
            h => Ok(SquareClass { unit: 0, vpar: 1 << (h - 1) }),
        }
    }

    /// Square class of `-1`.
    pub fn neg_one(&self) -> SquareClass {
        let unit = match self.base() {
            FieldDesc::Finite { p, e } => {
                // -1 is a square in F_q iff q = 1 mod 4
                let q_mod4 = (0..*e).fold(1u64, |acc, _| acc * (p % 4) % 4);
                u32::from(q_mod4 == 3)
            }
            FieldDesc::Gff { q } => u32::from(q % 4 == 3),
            FieldDesc::Cdv(_) => unreachable!(),
        };
        SquareClass { unit, vpar: 0 }
    }

    pub fn neg(&self, a: SquareClass) -> SquareClass {
        a.mul(self.neg_one())
    }

    /// Name of a square class, as accepted by [`FieldDesc::parse_class`].
    pub fn class_name(&self, a: &SquareClass) -> String {
        let mut parts: Vec<String> = Vec::new();
        match self.base() {
            FieldDesc::Finite { .. } => {
                if a.unit & 1 == 1 {
                    parts.push("u".into());
                }
            }
            _ => {
                for (bit, name) in GFF_LABELS.iter().enumerate() {
                    if a.unit >> bit & 1 == 1 {
                        parts.push((*name).into());
                    }
                }
            }
        }
        for depth in 1..=32usize {
            if a.vpar >> (depth - 1) & 1 == 1 {
                parts.push(uniformizer_name(depth));
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// Parses products like `u*pi`, `t`, `-1*t`, `1`.
    pub fn parse_class(&self, s: &str) -> Result<SquareClass> {
        let mut acc = SquareClass::ONE;
        let mut pos = 0usize;
        for raw in s.split('*') {
            let token = raw.trim();
            let at = pos + raw.len() - raw.trim_start().len();
            pos += raw.len() + 1;
            let factor = self.parse_generator(token).ok_or_else(|| Error::Parse {
                pos: at,
                msg: format!("unknown square-class generator {token:?} over {self}"),
            })?;
            acc = acc.mul(factor);
        }
        Ok(acc)
    }

    fn parse_generator(&self, token: &str) -> Option<SquareClass> {
        match token {
            "1" => return Some(SquareClass::ONE),
            "-1" => return Some(self.neg_one()),
            "p" => return self.parse_generator("pi"),
            _ => {}
        }
        let height = self.height();
        for depth in 1..=height {
            if token == uniformizer_name(depth) {
                return Some(SquareClass { unit: 0, vpar: 1 << (depth - 1) });
            }
        }
        match self.base() {
            FieldDesc::Finite { .. } if token == "u" || token == "nu" => {
                Some(SquareClass { unit: 1, vpar: 0 })
            }
            FieldDesc::Gff { .. } => GFF_LABELS
                .iter()
                .position(|l| *l == token)
                .map(|bit| SquareClass { unit: 1 << bit, vpar: 0 }),
            _ => None,
        }
    }

    /// Parses the field-descriptor grammar: `F5`, `F5^2`, `GFF(9)`,
    /// `CDV(<field>)`, `Qp[p=5]`, `Qp((t))[p=5]`.
    pub fn parse(s: &str) -> Result<FieldDesc> {
        let mut parser = FieldParser { src: s, pos: 0 };
        parser.skip_ws();
        let field = parser.field()?;
        parser.skip_ws();
        if parser.pos != s.len() {
            return Err(parser.error("trailing characters after field descriptor"));
        }
        Ok(field)
    }
}

impl fmt::Display for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDesc::Finite { p, e: 1 } => write!(f, "F{p}"),
            FieldDesc::Finite { p, e } => write!(f, "F{p}^{e}"),
            FieldDesc::Gff { q } => write!(f, "GFF({q})"),
            FieldDesc::Cdv(inner) => write!(f, "CDV({inner})"),
        }
    }
}

impl Serialize for FieldDesc {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

struct FieldParser<'a> {
    src: &'a str,
    pos: usize,
}

impl FieldParser<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn eat(&mut self, lit: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<()> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {lit:?}")))
        }
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let digits: String = self.rest().chars().take_while(|c| c.is_ascii_digit()).collect();
        if digits.is_empty() {
            return Err(self.error("expected a number"));
        }
        let at = self.pos;
        self.pos += digits.len();
        digits
            .parse()
            .map_err(|_| Error::Parse { pos: at, msg: "number out of range".into() })
    }

    fn located<T>(&self, at: usize, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::Invalid(msg) => Error::Parse { pos: at, msg },
            other => other,
        })
    }

    fn field(&mut self) -> Result<FieldDesc> {
        self.skip_ws();
        let at = self.pos;
        if self.eat("CDV(") {
            let inner = self.field()?;
            self.expect(")")?;
            return Ok(FieldDesc::cdv(inner));
        }
        if self.eat("GFF(") {
            let q = self.number()?;
            self.expect(")")?;
            return self.located(at, FieldDesc::gff(q));
        }
        if self.eat("Qp((t))[p=") {
            let p = self.number()?;
            self.expect("]")?;
            return self.located(at, FieldDesc::qp_t(p));
        }
        if self.eat("Qp[p=") {
            let p = self.number()?;
            self.expect("]")?;
            return self.located(at, FieldDesc::qp(p));
        }
        if self.eat("F") {
            let p = self.number()?;
            let e = if self.eat("^") { self.number()? as u32 } else { 1 };
            return self.located(at, FieldDesc::finite(p, e));
        }
        Err(self.error("expected F<p>, GFF(<q>), CDV(...), Qp[p=..] or Qp((t))[p=..]"))
    }
}

/// Complete list of classes, identity first, in canonical order.
pub fn sqcl_group(k: &FieldDesc) -> Result<Vec<SquareClass>> {
    if k.is_gff_based() {
        return Err(Error::unsupported(format!(
            "{k}: the square-class group of a global function field is not enumerable"
        )));
    }
    let n = 1usize << (k.height() + 1);
    Ok((0..n)
        .map(|idx| SquareClass {
            unit: (idx & 1) as u32,
            vpar: (idx >> 1) as u32,
        })
        .collect())
}

pub fn sqcl_mul(k: &FieldDesc, a: &SquareClass, b: &SquareClass) -> Result<SquareClass> {
    k.check(a)?;
    k.check(b)?;
    Ok(a.mul(*b))
}

/// Splits a class over a CDV field into its residue unit class and the
/// valuation parity of the outermost layer.
pub fn decompose(k: &FieldDesc, a: &SquareClass) -> Result<(SquareClass, bool)> {
    k.check(a)?;
    let h = k.height();
    if h == 0 {
        return Err(Error::invalid(format!("{k} is not complete discretely valued")));
    }
    let top = 1u32 << (h - 1);
    Ok((
        SquareClass { unit: a.unit, vpar: a.vpar & !top },
        a.vpar & top != 0,
    ))
}

/// Inverse of [`decompose`].
pub fn compose(k: &FieldDesc, unit: SquareClass, odd: bool) -> Result<SquareClass> {
    let residue = k
        .residue()
        .ok_or_else(|| Error::invalid(format!("{k} is not complete discretely valued")))?;
    residue.check(&unit)?;
    let top = if odd { 1u32 << (k.height() - 1) } else { 0 };
    Ok(SquareClass { unit: unit.unit, vpar: unit.vpar | top })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapKind {
    Identity,
    /// `F_q -> F_{q^2}`: every class becomes a square.
    FiniteExt,
    /// Unramified extension of a CDV field, induced by a residue extension.
    Unramified(Box<TransitionMap>),
    /// `k(sqrt(s * pi))`: the new uniformizer satisfies `tau^2 = s * pi`, so
    /// `pi` becomes the class of `s`.
    Ramified { twist: SquareClass },
}

/// Homomorphism `sqcl(source) -> sqcl(target)` induced by a field extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMap {
    pub source: FieldDesc,
    pub target: FieldDesc,
    pub kind: MapKind,
}

impl TransitionMap {
    pub fn identity(k: &FieldDesc) -> Self {
        TransitionMap { source: k.clone(), target: k.clone(), kind: MapKind::Identity }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            MapKind::Identity => "identity",
            MapKind::FiniteExt => "residue-ext",
            MapKind::Unramified(_) => "unramified-ext",
            MapKind::Ramified { .. } => "ramified-ext",
        }
    }

    fn apply(&self, a: SquareClass) -> SquareClass {
        match &self.kind {
            MapKind::Identity => a,
            MapKind::FiniteExt => SquareClass::ONE,
            MapKind::Unramified(inner) => {
                let h = self.source.height();
                let top = 1u32 << (h - 1);
                let image = inner.apply(SquareClass { unit: a.unit, vpar: a.vpar & !top });
                SquareClass { unit: image.unit, vpar: image.vpar | (a.vpar & top) }
            }
            MapKind::Ramified { twist } => {
                let h = self.source.height();
                let top = 1u32 << (h - 1);
                let unit = SquareClass { unit: a.unit, vpar: a.vpar & !top };
                if a.vpar & top != 0 {
                    unit.mul(*twist)
                } else {
                    unit
                }
            }
        }
    }
}

pub fn transport(m: &TransitionMap, a: &SquareClass) -> Result<SquareClass> {
    m.source.check(a)?;
    Ok(m.apply(*a))
}

/// `k(sqrt(lambda))` together with the induced map on square classes.
pub fn quadratic_extension(k: &FieldDesc, lambda: &SquareClass) -> Result<(FieldDesc, TransitionMap)> {
    k.check(lambda)?;
    if lambda.is_one() {
        return Err(Error::NotAnExtension(k.class_name(lambda)));
    }
    match k {
        FieldDesc::Finite { p, e } => {
            let target = FieldDesc::Finite { p: *p, e: 2 * e };
            Ok((
                target.clone(),
                TransitionMap { source: k.clone(), target, kind: MapKind::FiniteExt },
            ))
        }
        FieldDesc::Gff { .. } => Err(Error::unsupported(format!(
            "quadratic extensions of {k} are not modelled symbolically"
        ))),
        FieldDesc::Cdv(residue) => {
            let (unit, odd) = decompose(k, lambda)?;
            if odd {
                Ok((
                    k.clone(),
                    TransitionMap {
                        source: k.clone(),
                        target: k.clone(),
                        kind: MapKind::Ramified { twist: unit },
                    },
                ))
            } else {
                let (inner_target, inner) = quadratic_extension(residue, &unit)?;
                let target = FieldDesc::cdv(inner_target);
                Ok((
                    target.clone(),
                    TransitionMap {
                        source: k.clone(),
                        target,
                        kind: MapKind::Unramified(Box::new(inner)),
                    },
                ))
            }
        }
    }
}
