use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::hermitian::UKind;

/// How a node's value is obtained from its children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Combine {
    /// Base value or caller assertion.
    Leaf,
    /// Twice the single child.
    Double,
    Sum,
    /// Equal to the single child (rewrites, assertions over a base value).
    Identity,
    /// All children carry the node's value; used where two routes meet.
    Agree,
    Min,
    /// `sum coeff_i * child_i`.
    Linear(Vec<BigRational>),
}

impl Combine {
    pub fn name(&self) -> &'static str {
        match self {
            Combine::Leaf => "leaf",
            Combine::Double => "double",
            Combine::Sum => "sum",
            Combine::Identity => "identity",
            Combine::Agree => "agree",
            Combine::Min => "min",
            Combine::Linear(_) => "linear",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: String,
    pub field: String,
    pub class: String,
    pub kind: UKind,
    pub lambda: Option<String>,
    pub value: BigRational,
    pub cite: String,
    pub op: Combine,
    pub children: Vec<Derivation>,
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Derivation {
    pub fn leaf(rule: &str, field: String, class: String, kind: UKind, value: BigRational, cite: &str) -> Self {
        Derivation {
            rule: rule.into(),
            field,
            class,
            kind,
            lambda: None,
            value,
            cite: cite.into(),
            op: Combine::Leaf,
            children: Vec::new(),
        }
    }

    /// Builds an inner node, computing its value from the children.
    pub fn node(
        rule: &str,
        field: String,
        class: String,
        kind: UKind,
        cite: &str,
        op: Combine,
        children: Vec<Derivation>,
    ) -> Self {
        let value = combine(&op, &children).unwrap_or_else(BigRational::zero);
        Derivation {
            rule: rule.into(),
            field,
            class,
            kind,
            lambda: None,
            value,
            cite: cite.into(),
            op,
            children,
        }
    }

    pub fn with_lambda(mut self, lambda: Option<String>) -> Self {
        self.lambda = lambda;
        self
    }

    /// Integral value, for the u-invariant nodes.
    pub fn value_u64(&self) -> Option<u64> {
        if self.value.is_integer() {
            self.value.to_integer().try_into().ok()
        } else {
            None
        }
    }

    /// Arithmetic of this node in terms of the children, e.g. `2·3` or `2+4`.
    pub fn expression(&self) -> String {
        let vals: Vec<String> = self.children.iter().map(|c| fmt_rational(&c.value)).collect();
        match &self.op {
            Combine::Leaf => fmt_rational(&self.value),
            Combine::Double => format!("2·{}", vals[0]),
            Combine::Sum => vals.join("+"),
            Combine::Identity => self.children[0].expression(),
            Combine::Agree => vals.join("="),
            Combine::Min => format!("min{{{}}}", vals.join(", ")),
            Combine::Linear(coeffs) => coeffs
                .iter()
                .zip(&vals)
                .map(|(c, v)| if c.is_one() { v.clone() } else { format!("{}·{}", fmt_rational(c), v) })
                .collect::<Vec<_>>()
                .join("+"),
        }
    }

    /// Recomputes every inner node from its children. Returns the path of
    /// the first node whose stored value does not match.
    pub fn audit(&self) -> Result<(), String> {
        self.audit_at(&self.rule)
    }

    fn audit_at(&self, path: &str) -> Result<(), String> {
        for (i, c) in self.children.iter().enumerate() {
            c.audit_at(&format!("{path}/{i}:{}", c.rule))?;
        }
        if self.op == Combine::Leaf {
            return if self.children.is_empty() {
                Ok(())
            } else {
                Err(format!("{path}: leaf with children"))
            };
        }
        match combine(&self.op, &self.children) {
            Some(v) if v == self.value => Ok(()),
            Some(v) => Err(format!(
                "{path}: stored {} but children give {}",
                fmt_rational(&self.value),
                fmt_rational(&v)
            )),
            None => Err(format!("{path}: children do not fit a {} node", self.op.name())),
        }
    }

    pub fn count_nodes(&self) -> usize {
        1 + self.children.iter().map(Derivation::count_nodes).sum::<usize>()
    }

    /// Depth-first search for a node by rule id.
    pub fn find(&self, rule: &str) -> Option<&Derivation> {
        if self.rule == rule {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(rule))
    }

    /// Compact multi-line rendering: one line per inner node, indented.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        let lambda = self.lambda.as_ref().map(|l| format!(", lambda={l}")).unwrap_or_default();
        let head = format!("{pad}{}: {} {} [{}{}]", self.rule, self.kind_label(), self.class, self.field, lambda);
        if self.op == Combine::Leaf {
            out.push_str(&format!("{head} = {}\n", fmt_rational(&self.value)));
        } else {
            out.push_str(&format!("{head} = {} = {}\n", self.expression(), fmt_rational(&self.value)));
        }
        for c in &self.children {
            c.render_into(out, depth + 1);
        }
    }

    fn kind_label(&self) -> &'static str {
        self.kind.symbol()
    }
}

fn combine(op: &Combine, children: &[Derivation]) -> Option<BigRational> {
    let vals: Vec<&BigRational> = children.iter().map(|c| &c.value).collect();
    match op {
        Combine::Leaf => None,
        Combine::Double if vals.len() == 1 => Some(vals[0] * int(2)),
        Combine::Identity if vals.len() == 1 => Some(vals[0].clone()),
        Combine::Sum if !vals.is_empty() => Some(vals.iter().fold(BigRational::zero(), |acc, v| acc + *v)),
        Combine::Agree if !vals.is_empty() => {
            if vals.iter().all(|v| *v == vals[0]) {
                Some(vals[0].clone())
            } else {
                None
            }
        }
        Combine::Min if !vals.is_empty() => vals.iter().min().map(|v| (*v).clone()),
        Combine::Linear(coeffs) if coeffs.len() == vals.len() => {
            Some(coeffs.iter().zip(vals).fold(BigRational::zero(), |acc, (c, v)| acc + c * v))
        }
        _ => None,
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.op == Combine::Leaf {
            write!(f, "{}: {}", self.rule, fmt_rational(&self.value))
        } else {
            write!(f, "{}: {}={}", self.rule, self.expression(), fmt_rational(&self.value))
        }
    }
}

struct RationalJson<'a>(&'a BigRational);

impl Serialize for RationalJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            if let Ok(v) = i64::try_from(self.0.to_integer()) {
                return s.serialize_i64(v);
            }
        }
        s.serialize_str(&fmt_rational(self.0))
    }
}

impl Serialize for Derivation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n = if self.lambda.is_some() { 10 } else { 9 };
        let mut st = s.serialize_struct("Derivation", n)?;
        st.serialize_field("rule", &self.rule)?;
        st.serialize_field("field", &self.field)?;
        st.serialize_field("class", &self.class)?;
        st.serialize_field("kind", &self.kind)?;
        if let Some(l) = &self.lambda {
            st.serialize_field("lambda", l)?;
        }
        st.serialize_field("value", &RationalJson(&self.value))?;
        st.serialize_field("op", self.op.name())?;
        st.serialize_field("expression", &self.expression())?;
        st.serialize_field("cite", &self.cite)?;
        st.serialize_field("children", &self.children)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(v: i64) -> Derivation {
        Derivation::leaf("base:finite", "F5".into(), "1".into(), UKind::Plus, int(v), "")
    }

    #[test]
    fn expressions_and_audit() {
        let d = Derivation::node("residue:unramified", "k".into(), "D".into(), UKind::Plus, "", Combine::Double, vec![leaf(3)]);
        assert_eq!(d.expression(), "2·3");
        assert_eq!(d.value, int(6));
        assert!(d.audit().is_ok());
        let s = Derivation::node("residue:ramified", "k".into(), "D".into(), UKind::Plus, "", Combine::Sum, vec![leaf(2), leaf(4)]);
        assert_eq!(s.expression(), "2+4");
        assert_eq!(s.to_string(), "residue:ramified: 2+4=6");
        let mut bad = s.clone();
        bad.value = int(7);
        assert!(bad.audit().is_err());
        let mut deep = d.clone();
        deep.children[0].children.push(leaf(1));
        assert!(deep.audit().is_err());
    }

    #[test]
    fn linear_and_min() {
        let q = BigRational::new(3.into(), 4.into());
        let l = Derivation::node("t", "k".into(), "A".into(), UKind::Plus, "", Combine::Linear(vec![q, int(1)]), vec![leaf(4), leaf(1)]);
        assert_eq!(l.value, int(4));
        let m = Derivation::node("m", "k".into(), "A".into(), UKind::Plus, "", Combine::Min, vec![l, leaf(5)]);
        assert_eq!(m.value, int(4));
        assert!(m.audit().is_ok());
    }

    #[test]
    fn json_shape() {
        let d = Derivation::node("residue:unramified", "k".into(), "D".into(), UKind::Minus, "c", Combine::Double, vec![leaf(1)]);
        let v = serde_json::to_value(&d).unwrap();
        assert_eq!(v["value"], 2);
        assert_eq!(v["kind"], "minus");
        assert_eq!(v["children"][0]["rule"], "base:finite");
        let frac = Derivation::leaf("b", "k".into(), "A".into(), UKind::Minus, BigRational::new(13.into(), 2.into()), "");
        assert_eq!(serde_json::to_value(&frac).unwrap()["value"], "13/2");
        let again: serde_json::Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(again, v);
    }
}
