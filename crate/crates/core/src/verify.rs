//! The reproduction suite: every reference value, the oracle comparison,
//! the bound and sequence identities and the lab checks, as report rows.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::arith::{is_prime, least_nonresidue};
use crate::brauer::BrauerClass;
use crate::error::{Error, Result};
use crate::fields::{sqcl_group, FieldDesc};
use crate::hermitian::{u_search, InvolutionDesc, UKind};
use crate::lab::larmour::symbolic_verdict;
use crate::lab::{choose_pid, larmour_decompose, LabInput, LocalField, Model, PadicRational, QuatAlgebra, SigmaChoice};
use crate::quadform::{qf_is_isotropic, qf_is_isotropic_oracle, u_quadratic, QuadForm};
use crate::uinv::{
    bounds_ai, bounds_tensor, comparison_bound, expected_table_for, semi_global_combine, sequence_abc, u_exact,
    u_exact_morita, Assertions, BoundKind, Derivation, ExpectedEntry, SemiGlobalKind,
};

/// Report groups, in run order.
pub const GROUPS: &[&str] = &[
    "quadratic",
    "oracle",
    "local",
    "gff",
    "completion",
    "unitary",
    "biquaternion",
    "bounds",
    "sequences",
    "lab",
    "semi-global",
];

/// Acceptance criterion a group belongs to (`None` for supplementary rows).
pub fn group_criterion(group: &str) -> Option<u8> {
    match group {
        "quadratic" => Some(1),
        "oracle" => Some(2),
        "local" => Some(3),
        "completion" => Some(4),
        "unitary" => Some(5),
        "biquaternion" => Some(6),
        "bounds" => Some(7),
        "sequences" => Some(8),
        "lab" => Some(9),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyRow {
    pub group: String,
    pub criterion: Option<u8>,
    pub instance: String,
    pub expected: String,
    pub computed: String,
    pub citation: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derivation: Option<Derivation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupTiming {
    pub group: String,
    pub millis: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub p: u64,
    pub rows: Vec<VerifyRow>,
    pub timings: Vec<GroupTiming>,
    pub passed: usize,
    pub failed: usize,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    pub fn rows_for(&self, group: &str) -> impl Iterator<Item = &VerifyRow> {
        let group = group.to_string();
        self.rows.iter().filter(move |r| r.group == group)
    }
}

struct Rows<'a> {
    group: &'a str,
    out: Vec<VerifyRow>,
}

impl<'a> Rows<'a> {
    fn new(group: &'a str) -> Self {
        Rows { group, out: Vec::new() }
    }

    fn push(&mut self, instance: impl Into<String>, expected: impl Into<String>, computed: Result<String>, citation: &str) {
        let expected = expected.into();
        let (computed, status) = match computed {
            Ok(c) => {
                let status = if c == expected { Status::Pass } else { Status::Fail };
                (c, status)
            }
            Err(e) => (format!("error: {e}"), Status::Fail),
        };
        self.row(instance, expected, computed, status, citation, None);
    }

    fn row(
        &mut self,
        instance: impl Into<String>,
        expected: String,
        computed: String,
        status: Status,
        citation: &str,
        derivation: Option<Derivation>,
    ) {
        self.out.push(VerifyRow {
            group: self.group.into(),
            criterion: group_criterion(self.group),
            instance: instance.into(),
            expected,
            computed,
            citation: citation.into(),
            status,
            derivation,
        });
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn show_rat(r: &BigRational) -> String {
    crate::uinv::derivation::fmt_rational(r)
}

/// Evaluates one reference instance: one derivation per expected kind.
pub fn evaluate_entry(e: &ExpectedEntry) -> Result<Vec<Derivation>> {
    let k = FieldDesc::parse(&e.field)?;
    let b = BrauerClass::parse(&k, &e.class)?;
    let asr = if e.assert_division { Assertions::residue() } else { Assertions::none() };
    let lambda = e.lambda.map(|l| k.parse_class(l)).transpose()?;
    e.expected
        .iter()
        .map(|x| {
            if e.morita {
                let l = lambda.as_ref().ok_or_else(|| Error::invalid("Morita entry without lambda"))?;
                u_exact_morita(&b, l, &asr)
            } else {
                u_exact(&b, x.kind, lambda.as_ref(), &asr)
            }
        })
        .collect()
}

fn table_rows(rows: &mut Rows, table: &[ExpectedEntry]) {
    let group = rows.group;
    for e in table.iter().filter(|e| e.group == group) {
        let results = evaluate_entry(e);
        for (i, x) in e.expected.iter().enumerate() {
            let instance = match e.lambda {
                Some(l) => format!("{} {} over {} with lambda = {l}", x.kind.symbol(), e.class, e.field),
                None => format!("{} {} over {}", x.kind.symbol(), e.class, e.field),
            };
            let expected = match x.expression {
                Some(expr) => format!("{} = {}", x.value, expr),
                None => x.value.to_string(),
            };
            match &results {
                Ok(ds) => {
                    let d = &ds[i];
                    let mut ok = d.value_u64() == Some(x.value) && d.kind == x.kind;
                    if let Some(expr) = x.expression {
                        ok &= d.expression() == expr;
                    }
                    if let Err(msg) = d.audit() {
                        ok = false;
                        rows.row(instance.clone(), "audit clean".into(), msg, Status::Fail, e.citation, None);
                    }
                    let computed = format!("{} = {}", show_rat(&d.value), d.expression());
                    let computed = if x.expression.is_none() { show_rat(&d.value) } else { computed };
                    let status = if ok { Status::Pass } else { Status::Fail };
                    rows.row(instance, expected, computed, status, e.citation, Some(d.clone()));
                }
                Err(err) => rows.row(instance, expected, format!("error: {err}"), Status::Fail, e.citation, None),
            }
        }
    }
}

fn search(field: &FieldDesc, class: &str, inv: InvolutionDesc, eps: i8) -> Result<String> {
    let b = BrauerClass::parse(field, class)?;
    Ok(u_search(&b, &inv, eps, field)?.to_string())
}

fn quadratic(p: u64) -> Result<Vec<VerifyRow>> {
    let mut rows = Rows::new("quadratic");
    let cite = "u(F_q) = 2, each complete discretely valued layer doubles u";
    for (field, expect) in [(format!("F{p}"), 2), (format!("CDV(F{p})"), 4), (format!("CDV(CDV(F{p}))"), 8)] {
        let k = FieldDesc::parse(&field)?;
        rows.push(format!("u({field})"), expect.to_string(), u_quadratic(&k).map(|u| u.to_string()), cite);
    }
    Ok(rows.out)
}

fn oracle(p: u64) -> Result<Vec<VerifyRow>> {
    let mut rows = Rows::new("oracle");
    let mut primes = vec![3, 5, 7];
    if !primes.contains(&p) {
        primes.push(p);
    }
    for q in primes {
        let k = FieldDesc::qp(q)?;
        let classes = sqcl_group(&k)?;
        let mut total = 0usize;
        let mut disagreements = Vec::new();
        for dim in 1..=5u32 {
            let count = classes.len().pow(dim);
            for mut idx in 0..count {
                let mut entries = Vec::with_capacity(dim as usize);
                for _ in 0..dim {
                    entries.push(classes[idx % classes.len()]);
                    idx /= classes.len();
                }
                let form = QuadForm::new(k.clone(), entries)?;
                total += 1;
                if qf_is_isotropic(&form)? != qf_is_isotropic_oracle(&form)? {
                    disagreements.push(form.to_string());
                }
            }
        }
        let computed = if disagreements.is_empty() {
            format!("{total} forms, 0 disagreements")
        } else {
            format!("{total} forms, {} disagreements, first {}", disagreements.len(), disagreements[0])
        };
        rows.push(
            format!("all diagonal forms of dimension <= 5 over CDV(F{q})"),
            format!("{total} forms, 0 disagreements"),
            Ok(computed),
            "Springer residue recursion agrees with Hilbert symbols and Hasse invariants over Q_p",
        );
    }
    Ok(rows.out)
}

fn local(p: u64, table: &[ExpectedEntry]) -> Result<Vec<VerifyRow>> {
    let mut rows = Rows::new("local");
    table_rows(&mut rows, table);
    let k = FieldDesc::qp(p)?;
    rows.push(
        format!("u- (u,pi) over CDV(F{p}) by exhaustive search"),
        "1",
        search(&k, "(u,pi)", InvolutionDesc::Symplectic, 1),
        "skew-hermitian rank-1 forms are the only anisotropic ones (Jacobson reduction)",
    );
    Ok(rows.out)
}

fn completion(p: u64, table: &[ExpectedEntry]) -> Result<Vec<VerifyRow>> {
    let mut rows = Rows::new("completion");
    table_rows(&mut rows, table);
    let k = FieldDesc::qp_t(p)?;
    for class in ["(u,pi)", "(u,t)"] {
        rows.push(
            format!("u- {class} over CDV(CDV(F{p})) by exhaustive search"),
            "2",
            search(&k, class, InvolutionDesc::Symplectic, 1),
            "independent route through the Jacobson quadratic form",
        );
    }
    Ok(rows.out)
}

fn unitary(p: u64, table: &[ExpectedEntry]) -> Result<Vec<VerifyRow>> {
    let mut rows = Rows::new("unitary");
    let k = FieldDesc::qp(p)?;
    for l in ["u", "pi"] {
        let lambda = k.parse_class(l)?;
        rows.push(
            format!("u0 of k(sqrt {l})/k over CDV(F{p}) by transfer search"),
            "2",
            search(&k, "1", InvolutionDesc::Unitary(lambda), 1),
            "trace form <c> (x) <1,-lambda>: u0 = u(k)/2 = 2",
        );
    }
    table_rows(&mut rows, table);
    Ok(rows.out)
}

fn biquaternion(table: &[ExpectedEntry]) -> Result<Vec<VerifyRow>> {
    let mut rows = Rows::new("biquaternion");
    table_rows(&mut rows, table);
    for e in table.iter().filter(|e| e.group == "biquaternion") {
        let ds = evaluate_entry(e);
        let audit = ds.and_then(|ds| {
            let mut nodes = 0;
            for d in &ds {
                d.audit().map_err(Error::Internal)?;
                nodes += d.count_nodes();
            }
            Ok(format!("{nodes} nodes audited"))
        });
        let expected = audit.clone().unwrap_or_else(|_| "audit clean".into());
        rows.push(format!("derivation audit for {} over {}", e.class, e.field), expected, audit, e.citation);
    }
    Ok(rows.out)
}

fn bounds() -> Result<Vec<VerifyRow>> {
    let mut rows = Rows::new("bounds");
    let cite = "first kind: ((1 + 1/d) 2^(i-1), (1 - 1/d) 2^(i-1)); second kind: 2^(i-1)";
    for (i, d, expect) in [(3, 2, "(6, 2)"), (3, 4, "(5, 3)"), (2, 2, "(3, 1)")] {
        let r = bounds_ai(i, d, BoundKind::First).map(|b| {
            format!(
                "({}, {})",
                show_rat(b.get(UKind::Plus).expect("first kind")),
                show_rat(b.get(UKind::Minus).expect("first kind"))
            )
        });
        rows.push(format!("bounds_ai(i = {i}, d = {d}) first kind"), expect, r, cite);
    }
    let r = bounds_ai(3, 2, BoundKind::Second).map(|b| show_rat(b.get(UKind::Zero).expect("second kind")));
    rows.push("bounds_ai(i = 3) second kind", "4", r, cite);
    Ok(rows.out)
}

fn sequences() -> Result<Vec<VerifyRow>> {
    let mut rows = Rows::new("sequences");
    let cite = "a_n, b_n, c_n with a_1 = 5/4, b_1 = 1/4";
    let s2 = sequence_abc(2);
    rows.push("a_2", "29/16", s2.as_ref().map(|s| show_rat(&s.a)).map_err(Clone::clone), cite);
    rows.push("b_2", "13/16", s2.as_ref().map(|s| show_rat(&s.b)).map_err(Clone::clone), cite);
    rows.push(
        "floor(8 b_2): bound on u- for two quaternions over a field with u = 8",
        "6",
        bounds_tensor(2, &rat(8, 1)).map(|t| t.floor(UKind::Minus).to_string()),
        "u-(H_1 (x) H_2) <= b_2 u(k)",
    );
    let identities = (1..=20u32)
        .map(|n| {
            let s = sequence_abc(n)?;
            let t = sequence_abc(n + 1)?;
            s.check_identities(&t).map_err(|m| Error::internal(format!("n = {n}: {m}")))
        })
        .collect::<Result<Vec<_>>>()
        .map(|v| format!("{} steps hold", v.len()));
    rows.push("recurrence identities, n <= 20", "20 steps hold", identities, cite);
    for n in 3..=10u32 {
        let uk = rat(8, 1);
        let r = bounds_tensor(n, &uk).map(|t| {
            let cmp = comparison_bound(n) * &uk;
            // the comparison concerns the first-kind bounds; c_n is larger than a_n
            let all = t.plus < cmp && t.minus < cmp;
            if all {
                "below".to_string()
            } else {
                format!("not below: {} vs {}", show_rat(&t.plus), show_rat(&cmp))
            }
        });
        rows.push(
            format!("bounds_tensor({n}, u = 8): u+ and u- bounds < 3^(2n-6)/4^n · 213 · 8"),
            "below",
            r,
            "tensor bound improves the earlier exponential bound",
        );
    }
    Ok(rows.out)
}

fn lab(p: u64) -> Result<Vec<VerifyRow>> {
    let mut rows = Rows::new("lab");
    let cite = "pi_D = t + sigma(t) when sigma(t)t^-1 reduces to 1, else alpha t - sigma(alpha t)";
    let mut instances = vec![(Model::Padic, 5u64, "(2,5)".to_string())];
    if p != 5 {
        instances.push((Model::Padic, p, format!("({},{p})", least_nonresidue(p))));
    }
    instances.push((Model::Laurent, p, format!("({},t)", least_nonresidue(p))));
    for (model, q, symbol) in &instances {
        for (sigma, t, case, eps, pi) in [
            (SigmaChoice::IntIGamma, "j".to_string(), 1u8, 1i8, "2j".to_string()),
            (SigmaChoice::Gamma, "j".to_string(), 2, -1, "2ij".to_string()),
            (SigmaChoice::IntIGamma, format!("{q}j"), 1, 1, format!("{}j", 2 * q)),
            (SigmaChoice::Gamma, format!("{q}j"), 2, -1, format!("{}ij", 2 * q)),
        ] {
            // the Laurent model scales by t instead of p
            let (t, pi) = if *model == Model::Laurent && t != "j" {
                ("t*j".to_string(), if case == 1 { "(2*t)j" } else { "(2*t)ij" }.to_string())
            } else {
                (t, pi)
            };
            let computed = LabInput::new(*model, *q, symbol, sigma, &t).and_then(|i| i.pid_report()).map(|r| {
                let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                let verdict = if failed.is_empty() { "all checks pass".to_string() } else { format!("failed: {}", failed.join(", ")) };
                format!("case {}, eps' = {:+}, pi_D = {}, {verdict}", r.case, r.eps_prime, r.pi_d)
            });
            rows.push(
                format!("choose_pid {symbol} over {} sigma = {sigma}, t = {t}", model_field(*model, *q)),
                format!("case {case}, eps' = {eps:+}, pi_D = {pi}, all checks pass"),
                computed,
                cite,
            );
        }
    }
    rows.push(
        "larmour vs symbolic isotropy, 100 random forms of rank <= 3 over (2,5)/Q_5",
        "100 agree",
        larmour_cross_check(5, 100, 0xC0FFEE),
        "h is isotropic iff one of the residue forms is",
    );
    if p != 5 {
        rows.push(
            format!("larmour vs symbolic isotropy, 100 random forms over ({},{p})/Q_{p}", least_nonresidue(p)),
            "100 agree",
            larmour_cross_check(p, 100, 0xC0FFEE ^ p),
            "h is isotropic iff one of the residue forms is",
        );
    }
    Ok(rows.out)
}

fn model_field(model: Model, p: u64) -> String {
    match model {
        Model::Padic => format!("Q_{p}"),
        Model::Laurent => format!("F_{p}((t))"),
    }
}

/// Draws `count` diagonal forms of rank 1 to 3 with nonzero integral
/// scalar entries over `(nu, p)/Q_p` and compares the residue-form verdict
/// (canonical involution, `eps = +1`) with the symbolic Jacobson verdict.
pub fn larmour_cross_check(p: u64, count: usize, seed: u64) -> Result<String> {
    let zero = PadicRational::from_int(0, p);
    let alg = QuatAlgebra::new(zero.int(least_nonresidue(p) as i64), zero.int(p as i64))?;
    let pid = choose_pid(&alg, SigmaChoice::Gamma, &alg.j())?;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut agree = 0;
    for n in 0..count {
        let rank = rng.gen_range(1..=3);
        let mut entries = Vec::new();
        while entries.len() < rank {
            let c = zero.random_integral(&mut rng);
            if !c.is_zero() {
                entries.push(alg.scalar(c));
            }
        }
        let split = larmour_decompose(&alg, &pid, 1, &entries)?.isotropic;
        let symbolic = symbolic_verdict(&alg, &entries)?;
        if split == symbolic {
            agree += 1;
        } else {
            let shown: Vec<String> = entries.iter().map(|e| alg.show(e)).collect();
            return Err(Error::internal(format!(
                "form {n} <{}>: residue forms say {split}, symbolic route says {symbolic}",
                shown.join(", ")
            )));
        }
    }
    Ok(format!("{agree} agree"))
}

fn semi_global(table: &[ExpectedEntry]) -> Result<Vec<VerifyRow>> {
    let mut rows = Rows::new("semi-global");
    let cases = [
        (SemiGlobalKind::Quaternion, "completion-quaternion-ramified", "6, 2"),
        (SemiGlobalKind::Biquaternion, "completion-biquaternion", "5, 3"),
        (SemiGlobalKind::Unitary, "completion-unitary-ramified-algebra", "4"),
    ];
    for (kind, id, expect) in cases {
        let entry = table.iter().find(|e| e.id == id).ok_or_else(|| Error::internal(format!("missing entry {id}")))?;
        let computed = evaluate_entry(entry).and_then(|lower| {
            let combined = semi_global_combine(kind, &kind.upper_bound(), &lower)?;
            for d in &combined {
                d.audit().map_err(Error::Internal)?;
            }
            Ok(combined.iter().map(|d| show_rat(&d.value)).collect::<Vec<_>>().join(", "))
        });
        rows.push(
            format!("{kind:?} over a semi-global field, lower bound from {id}"),
            expect,
            computed,
            "upper bound for A_3(2)-fields meets the completion value, under the stated valuation hypothesis",
        );
    }
    Ok(rows.out)
}

/// Runs the suite at residue characteristic `p`, optionally restricted to
/// one group of [`GROUPS`].
pub fn verify_paper(p: u64, only: Option<&str>) -> Result<VerifyReport> {
    if !is_prime(p) || p == 2 {
        return Err(Error::invalid(format!("p = {p} must be an odd prime")));
    }
    if let Some(g) = only {
        if !GROUPS.contains(&g) {
            return Err(Error::invalid(format!("unknown group {g:?}; groups: {}", GROUPS.join(", "))));
        }
    }
    let table = expected_table_for(p);
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    for &group in GROUPS {
        if only.is_some_and(|g| g != group) {
            continue;
        }
        let start = Instant::now();
        let result = match group {
            "quadratic" => quadratic(p),
            "oracle" => oracle(p),
            "local" => local(p, &table),
            "gff" => {
                let mut r = Rows::new("gff");
                table_rows(&mut r, &table);
                Ok(r.out)
            }
            "completion" => completion(p, &table),
            "unitary" => unitary(p, &table),
            "biquaternion" => biquaternion(&table),
            "bounds" => bounds(),
            "sequences" => sequences(),
            "lab" => lab(p),
            "semi-global" => semi_global(&table),
            _ => unreachable!("group list is fixed"),
        };
        match result {
            Ok(r) => rows.extend(r),
            Err(e) => rows.push(VerifyRow {
                group: group.into(),
                criterion: group_criterion(group),
                instance: "group setup".into(),
                expected: "no error".into(),
                computed: format!("error: {e}"),
                citation: String::new(),
                status: Status::Fail,
                derivation: None,
            }),
        }
        timings.push(GroupTiming { group: group.into(), millis: start.elapsed().as_millis() });
    }
    let failed = rows.iter().filter(|r| r.status == Status::Fail).count();
    Ok(VerifyReport { p, passed: rows.len() - failed, failed, rows, timings })
}
