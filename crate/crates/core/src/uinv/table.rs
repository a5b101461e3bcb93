//! Axiomatized base values and the fixed table of reference instances.

use crate::hermitian::UKind;

/// Algebra at a leaf of the recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseAlgebra {
    /// The field itself (`u0`: the field with a quadratic extension).
    Field,
    /// A quaternion division algebra (`u0`: one that stays division over
    /// the quadratic extension).
    Quaternion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseField {
    Finite,
    Gff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BaseEntry {
    pub base: BaseField,
    pub algebra: BaseAlgebra,
    pub kind: UKind,
    pub value: u64,
    pub cite: &'static str,
}

const fn entry(base: BaseField, algebra: BaseAlgebra, kind: UKind, value: u64, cite: &'static str) -> BaseEntry {
    BaseEntry { base, algebra, kind, value, cite }
}

use BaseAlgebra::{Field, Quaternion};
use BaseField::{Finite, Gff};

static ENTRIES: [BaseEntry; 9] = [
    entry(Finite, Field, UKind::Plus, 2, "u(F_q) = 2: every ternary form over a finite field is isotropic"),
    entry(Finite, Field, UKind::Minus, 0, "identity involution, eps = -1: a diagonal entry with a = -a vanishes in odd characteristic"),
    entry(Finite, Field, UKind::Zero, 1, "u0(F_q^2/F_q) = 1: the norm of F_q^2/F_q is surjective, so rank 2 is isotropic"),
    entry(Gff, Field, UKind::Plus, 4, "u(k) = 4 for a global function field of odd characteristic"),
    entry(Gff, Field, UKind::Minus, 0, "identity involution, eps = -1: a diagonal entry with a = -a vanishes in odd characteristic"),
    entry(Gff, Field, UKind::Zero, 2, "u0(K/k) = u(k)/2 = 2 for a quadratic extension of a global function field"),
    entry(Gff, Quaternion, UKind::Plus, 3, "quaternion division algebra over a global function field: u+ = 3"),
    entry(Gff, Quaternion, UKind::Minus, 1, "quaternion division algebra over a global function field: u- = 1"),
    entry(Gff, Quaternion, UKind::Zero, 2, "quaternion division algebra over a global function field with unitary involution: u0 = 2"),
];

pub struct BaseTable;

impl BaseTable {
    pub fn entries() -> &'static [BaseEntry] {
        &ENTRIES
    }

    pub fn lookup(base: BaseField, algebra: BaseAlgebra, kind: UKind) -> Option<&'static BaseEntry> {
        ENTRIES
            .iter()
            .find(|e| e.base == base && e.algebra == algebra && e.kind == kind)
    }
}

/// Expected value for one u-kind of an instance, with the expected
/// arithmetic at the root of the derivation when it is pinned down.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expect {
    pub kind: UKind,
    pub value: u64,
    pub expression: Option<&'static str>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpectedEntry {
    pub id: &'static str,
    pub group: &'static str,
    pub description: &'static str,
    pub field: String,
    pub class: String,
    pub lambda: Option<&'static str>,
    pub assert_division: bool,
    /// Compute on the split algebra after checking that `class` splits over
    /// `k(sqrt lambda)` (matrix algebras share u-invariants with the field).
    pub morita: bool,
    pub expected: Vec<Expect>,
    pub citation: &'static str,
}

fn ex(kind: UKind, value: u64, expression: Option<&'static str>) -> Expect {
    Expect { kind, value, expression }
}

/// Reference instances at residue characteristic `p`.
pub fn expected_table_for(p: u64) -> Vec<ExpectedEntry> {
    let local = format!("CDV(F{p})");
    let complete = format!("CDV(CDV(F{p}))");
    let gff = format!("GFF({p})");
    let cdv_gff = format!("CDV(GFF({p}))");
    let base = |id, group, description, field: &String, class: &str| ExpectedEntry {
        id,
        group,
        description,
        field: field.clone(),
        class: class.into(),
        lambda: None,
        assert_division: false,
        morita: false,
        expected: Vec::new(),
        citation: "",
    };
    vec![
        ExpectedEntry {
            expected: vec![ex(UKind::Plus, 3, Some("1+2")), ex(UKind::Minus, 1, Some("1+0"))],
            citation: "local quaternion division algebra: u+ = 3, u- = 1",
            ..base("local-quaternion", "local", "(u,pi) over a local field", &local, "(u,pi)")
        },
        ExpectedEntry {
            lambda: Some("u"),
            expected: vec![ex(UKind::Zero, 2, Some("2·1"))],
            citation: "unramified quadratic extension of a local field: u0 = u(k)/2 = 2",
            ..base("local-unitary-field", "local", "k(sqrt u)/k over a local field", &local, "1")
        },
        ExpectedEntry {
            lambda: Some("u"),
            morita: true,
            expected: vec![ex(UKind::Zero, 2, None)],
            citation: "local quaternion algebra with unitary involution: u0 = 2",
            ..base("local-quaternion-unitary", "local", "(u,pi) (x) k(sqrt u) over a local field", &local, "(u,pi)")
        },
        ExpectedEntry {
            expected: vec![ex(UKind::Plus, 4, None), ex(UKind::Minus, 0, None)],
            citation: "every global function field is C2, so u(k) = 4",
            ..base("gff-field", "gff", "a global function field", &gff, "1")
        },
        ExpectedEntry {
            assert_division: true,
            expected: vec![ex(UKind::Plus, 3, None), ex(UKind::Minus, 1, None)],
            citation: "quaternion division algebra over a global function field: u+ = 3, u- = 1",
            ..base("gff-quaternion", "gff", "(a,b) over a global function field", &gff, "(a,b)")
        },
        ExpectedEntry {
            lambda: Some("v"),
            assert_division: true,
            expected: vec![ex(UKind::Zero, 2, None)],
            citation: "quaternion division algebra over a global function field: u0 = 2",
            ..base("gff-quaternion-unitary", "gff", "(a,b) (x) k(sqrt v) over a global function field", &gff, "(a,b)")
        },
        ExpectedEntry {
            expected: vec![ex(UKind::Plus, 6, Some("2·3")), ex(UKind::Minus, 2, Some("2·1"))],
            citation: "unramified quaternion over the completion: u+ = 2·3 = 6, u- = 2·1 = 2",
            ..base("completion-quaternion-unramified", "completion", "lift of (u,p) over Qp((t))", &complete, "(u,pi)")
        },
        ExpectedEntry {
            expected: vec![ex(UKind::Plus, 6, Some("2+4")), ex(UKind::Minus, 2, Some("2+0"))],
            citation: "ramified quaternion over the completion: u+ = 2+4 = 6, u- = 2+0 = 2",
            ..base("completion-quaternion-ramified", "completion", "(u,t) over Qp((t))", &complete, "(u,t)")
        },
        ExpectedEntry {
            lambda: Some("t"),
            expected: vec![ex(UKind::Zero, 4, Some("3+1"))],
            citation: "ramified extension of the completion: u0 = u+(D0) + u-(D0) = 3+1 = 4",
            ..base("completion-unitary-ramified-extension", "unitary", "lift of (u,p) (x) k(sqrt t)", &complete, "(u,pi)")
        },
        ExpectedEntry {
            lambda: Some("pi"),
            expected: vec![ex(UKind::Zero, 4, Some("2+2"))],
            citation: "ramified algebra over an unramified extension: u0 = 2+2 = 4",
            ..base("completion-unitary-ramified-algebra", "unitary", "(u,t) (x) k(sqrt p)", &complete, "(u,t)")
        },
        ExpectedEntry {
            assert_division: true,
            expected: vec![ex(UKind::Plus, 5, Some("2+3")), ex(UKind::Minus, 3, Some("2+1"))],
            citation: "biquaternion division algebra over the completion: u+ = 2+3 = 5, u- = 2+1 = 3",
            ..base(
                "completion-biquaternion",
                "biquaternion",
                "lift of a division (a,b) tensored with (v,pi) over a GFF-residue completion",
                &cdv_gff,
                "(a,b);(v,pi)",
            )
        },
    ]
}

pub fn expected_table() -> Vec<ExpectedEntry> {
    expected_table_for(5)
}
