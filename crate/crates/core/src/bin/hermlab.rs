use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use hermlab::brauer::BrauerClass;
use hermlab::error::Error;
use hermlab::fields::FieldDesc;
use hermlab::hermitian::{herm_is_isotropic, reduced_quadratic, u_search, HermFormDesc, InvolutionDesc, UKind};
use hermlab::lab::{split_form, LabInput, Model, SigmaChoice};
use hermlab::quadform::{qf_is_isotropic_traced, QuadForm};
use hermlab::uinv::derivation::fmt_rational;
use hermlab::uinv::{bounds_ai, bounds_tensor, sequence_abc, u_exact, u_exact_morita, witness, Assertions, BoundKind, Derivation};
use hermlab::verify::{verify_paper, Status};

#[derive(Parser, Debug)]
#[command(name = "hermlab", version, about = "Isotropy and hermitian u-invariants over towers of complete discretely valued fields")]
struct Cli {
    /// Emit JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide isotropy of a diagonal form.
    #[command(subcommand)]
    Isotropy(IsotropyCmd),
    /// Largest anisotropic rank by exhaustive search.
    Usearch(UsearchArgs),
    /// Exact u-invariants through the residue recursion.
    #[command(subcommand)]
    Uinv(UinvCmd),
    /// Bound formulas.
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Computations with concrete quaternion elements.
    #[command(subcommand)]
    Lab(LabCmd),
    /// Reproduction suite.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand, Debug)]
enum IsotropyCmd {
    /// Quadratic form `<a1,...,an>` over a field.
    Quad {
        #[arg(long)]
        field: String,
        /// Comma-separated square classes, e.g. "1,u,pi,u*pi".
        #[arg(long)]
        form: String,
    },
    /// Diagonal hermitian form over an algebra with involution.
    Herm(HermArgs),
}

#[derive(Args, Debug)]
struct InvolutionArgs {
    /// Canonical (symplectic) involution of a quaternion algebra.
    #[arg(long, conflicts_with_all = ["orthogonal", "unitary"])]
    canonical: bool,
    /// Orthogonal involution (identity on a field).
    #[arg(long, conflicts_with = "unitary")]
    orthogonal: bool,
    /// Unitary involution: conjugation of k(sqrt LAMBDA).
    #[arg(long, value_name = "LAMBDA")]
    unitary: Option<String>,
}

impl InvolutionArgs {
    fn resolve(&self, k: &FieldDesc) -> Result<InvolutionDesc, Error> {
        if let Some(l) = &self.unitary {
            return InvolutionDesc::unitary(k, k.parse_class(l)?);
        }
        if self.orthogonal {
            return Ok(InvolutionDesc::Orthogonal);
        }
        Ok(InvolutionDesc::Symplectic)
    }
}

#[derive(Args, Debug)]
struct HermArgs {
    #[arg(long)]
    field: String,
    /// Brauer class, e.g. "(u,pi)" or "1".
    #[arg(long, default_value = "1")]
    class: String,
    #[arg(long, default_value = "+1", allow_hyphen_values = true, value_parser = parse_eps)]
    eps: i8,
    #[command(flatten)]
    involution: InvolutionArgs,
    #[arg(long)]
    form: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ShapeArg {
    /// Quaternion division algebra with its canonical involution.
    A,
    /// Quadratic extension with its conjugation.
    B,
    /// The field itself with the identity (quadratic forms).
    Quad,
}

#[derive(Args, Debug)]
struct UsearchArgs {
    #[arg(long, value_enum)]
    shape: ShapeArg,
    #[arg(long)]
    field: String,
    #[arg(long, default_value = "(u,pi)")]
    class: String,
    #[arg(long, default_value = "u")]
    lambda: String,
    #[arg(long, default_value = "+1", allow_hyphen_values = true, value_parser = parse_eps)]
    eps: i8,
}

#[derive(Args, Debug)]
struct UinvArgs {
    #[arg(long)]
    field: String,
    #[arg(long)]
    class: String,
    #[arg(long = "type", value_parser = parse_kind)]
    kind: UKind,
    /// Square class defining the quadratic extension (type zero only).
    #[arg(long)]
    lambda: Option<String>,
    /// Facts the engine may assume, e.g. "residue".
    #[arg(long = "assert-division", value_name = "WHAT")]
    assert_division: Vec<String>,
    /// Compute over k(sqrt lambda) after checking the algebra splits there.
    #[arg(long)]
    morita: bool,
}

#[derive(Subcommand, Debug)]
enum UinvCmd {
    /// Value and derivation tree.
    Exact(UinvArgs),
    /// Anisotropic form of maximal rank, rechecked where possible.
    Witness(UinvArgs),
}

#[derive(Subcommand, Debug)]
enum BoundsCmd {
    /// Bounds for algebras over fields of type A_i(2).
    Ai {
        #[arg(long)]
        i: u32,
        /// Degree of the algebra.
        #[arg(long, default_value_t = 2)]
        d: u64,
        /// Involution of the second kind.
        #[arg(long)]
        second: bool,
    },
    /// Bounds for tensor products of n quaternion algebras.
    Tensor {
        #[arg(long)]
        n: u32,
        /// u-invariant of the base field.
        #[arg(long, value_parser = parse_rational)]
        uk: BigRational,
    },
    /// Terms of the coefficient sequences.
    Sequence {
        #[arg(long)]
        n: u32,
    },
}

#[derive(Args, Debug)]
struct LabArgs {
    #[arg(long, default_value_t = 5)]
    p: u64,
    /// Quaternion symbol with a unit of nonsquare residue first, e.g. "(2,5)" or "(2,t)".
    #[arg(long, default_value = "(2,5)")]
    symbol: String,
    #[arg(long, default_value = "inti-gamma", value_parser = parse_sigma)]
    sigma: SigmaChoice,
    /// Parameter (odd multiple of 1/2 for w), e.g. "j".
    #[arg(long, default_value = "j")]
    t: String,
    #[arg(long, default_value = "padic", value_parser = parse_model)]
    model: Model,
}

#[derive(Subcommand, Debug)]
enum LabCmd {
    /// Choose pi_D from a parameter and report every check.
    Pid(LabArgs),
    /// Residue forms of a diagonal form.
    Larmour {
        #[command(flatten)]
        lab: LabArgs,
        #[arg(long, default_value = "+1", allow_hyphen_values = true, value_parser = parse_eps)]
        eps: i8,
        /// Comma-separated quaternions, e.g. "1,5" or "j,3+ij".
        #[arg(long)]
        form: String,
        /// Replace each entry b by (b + eps sigma(b)) / 2 first.
        #[arg(long)]
        symmetrize: bool,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// Run every reference check.
    Paper {
        #[arg(long, default_value_t = 5)]
        p: u64,
        /// Restrict to one group (quadratic, oracle, local, gff, completion,
        /// unitary, biquaternion, bounds, sequences, lab, semi-global).
        #[arg(long)]
        only: Option<String>,
    },
}

fn parse_eps(s: &str) -> Result<i8, String> {
    match s.trim() {
        "+1" | "1" | "+" => Ok(1),
        "-1" | "-" => Ok(-1),
        other => Err(format!("eps must be +1 or -1, got {other:?}")),
    }
}

fn parse_kind(s: &str) -> Result<UKind, String> {
    s.parse::<UKind>().map_err(|e| e.to_string())
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    s.trim().parse::<BigRational>().map_err(|_| format!("expected a rational number, got {s:?}"))
}

fn parse_sigma(s: &str) -> Result<SigmaChoice, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_model(s: &str) -> Result<Model, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// What a command produced: JSON always, plus the table rendering.
struct Output {
    json: Value,
    table: String,
    code: u8,
}

impl Output {
    fn ok(json: Value, table: String) -> Self {
        Output { json, table, code: 0 }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Invalid(_) | Error::FieldMismatch { .. } | Error::NotAnExtension(_) => 1,
        e if e.is_declined() => 3,
        _ => 2,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse { .. } => "parse",
        Error::Invalid(_) => "invalid",
        Error::FieldMismatch { .. } => "field-mismatch",
        Error::NotAnExtension(_) => "not-an-extension",
        Error::Unsupported(_) => "unsupported",
        Error::UnsupportedShape(_) => "unsupported-shape",
        Error::UnsupportedClass(_) => "unsupported-class",
        Error::NotDivision { .. } => "not-division",
        Error::NeedsAssertion(_) => "needs-assertion",
        Error::Gap { .. } => "gap",
        Error::PrecisionLoss(_) => "precision-loss",
        Error::Internal(_) => "internal",
    }
}

fn derivation_table(d: &Derivation) -> String {
    let mut out = format!("{d}\n");
    for line in d.render().lines() {
        out.push_str("  ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

fn run(cmd: Command) -> Result<Output, Error> {
    match cmd {
        Command::Isotropy(IsotropyCmd::Quad { field, form }) => {
            let k = FieldDesc::parse(&field)?;
            let q = QuadForm::parse(&k, &form)?;
            let (iso, path) = qf_is_isotropic_traced(&q)?;
            let mut table = format!("{q} over {k}: {}\n", if iso { "isotropic" } else { "anisotropic" });
            for s in &path {
                match s.base_isotropic {
                    Some(b) => table.push_str(&format!(
                        "  {}: {} {}\n",
                        s.field,
                        s.form,
                        if b { "isotropic" } else { "anisotropic" }
                    )),
                    None => table.push_str(&format!("  {}: {} -> {} + pi·{}\n", s.field, s.form, s.even, s.odd)),
                }
            }
            Ok(Output::ok(json!({"field": k.to_string(), "form": q.to_string(), "isotropic": iso, "path": path}), table))
        }
        Command::Isotropy(IsotropyCmd::Herm(a)) => {
            let k = FieldDesc::parse(&a.field)?;
            let b = BrauerClass::parse(&k, &a.class)?;
            let inv = a.involution.resolve(&k)?;
            let entries = QuadForm::parse(&k, &a.form)?.entries;
            let h = HermFormDesc::new(b.clone(), inv, a.eps, entries)?;
            let reduced = reduced_quadratic(&h)?;
            let iso = herm_is_isotropic(&h)?;
            let form = QuadForm::new(k.clone(), h.entries.clone())?;
            let table = format!(
                "{form} over ({b}, {}) eps {:+} on {k}: {}\n  reduced quadratic form {reduced}\n",
                inv.name(),
                a.eps,
                if iso { "isotropic" } else { "anisotropic" }
            );
            Ok(Output::ok(
                json!({
                    "field": k.to_string(), "class": b.to_string(), "involution": inv.name(),
                    "eps": a.eps, "form": form.to_string(), "kind": h.ukind(),
                    "reduced": reduced.to_string(), "isotropic": iso,
                }),
                table,
            ))
        }
        Command::Usearch(a) => {
            let k = FieldDesc::parse(&a.field)?;
            let (b, inv) = match a.shape {
                ShapeArg::A => (BrauerClass::parse(&k, &a.class)?, InvolutionDesc::Symplectic),
                ShapeArg::B => (BrauerClass::trivial(k.clone()), InvolutionDesc::unitary(&k, k.parse_class(&a.lambda)?)?),
                ShapeArg::Quad => (BrauerClass::trivial(k.clone()), InvolutionDesc::Orthogonal),
            };
            let u = u_search(&b, &inv, a.eps, &k)?;
            let table = format!("u over ({b}, {}) eps {:+} on {k}: {u}\n", inv.name(), a.eps);
            Ok(Output::ok(
                json!({"field": k.to_string(), "class": b.to_string(), "involution": inv.name(), "eps": a.eps, "u": u}),
                table,
            ))
        }
        Command::Uinv(UinvCmd::Exact(a)) => {
            let (b, lambda, asr) = uinv_inputs(&a)?;
            let d = if a.morita {
                let l = lambda.as_ref().ok_or_else(|| Error::Invalid("--morita needs --lambda".into()))?;
                u_exact_morita(&b, l, &asr)?
            } else {
                u_exact(&b, a.kind, lambda.as_ref(), &asr)?
            };
            let json = json!({
                "field": b.field.to_string(), "class": b.to_string(), "kind": a.kind,
                "lambda": lambda.map(|l| b.field.class_name(&l)), "assertions": asr.names(),
                "value": d.value_u64(), "derivation": d,
            });
            Ok(Output::ok(json, derivation_table(&d)))
        }
        Command::Uinv(UinvCmd::Witness(a)) => {
            let (b, lambda, asr) = uinv_inputs(&a)?;
            let r = witness(&b, a.kind, lambda.as_ref(), &asr)?;
            let mut table = format!("{} over {} for {}: rank {}\n", a.kind.symbol(), b.field, b, r.rank);
            if let Some(e) = &r.entries {
                table.push_str(&format!("  entries <{}>\n", e.join(",")));
            }
            if let Some(v) = &r.verified_by {
                table.push_str(&format!("  rechecked anisotropic via {v}\n"));
            }
            Ok(Output::ok(serde_json::to_value(&r).map_err(|e| Error::Internal(e.to_string()))?, table))
        }
        Command::Bounds(BoundsCmd::Ai { i, d, second }) => {
            let kind = if second { BoundKind::Second } else { BoundKind::First };
            let b = bounds_ai(i, d, kind)?;
            let mut json = json!({"i": i, "d": d, "kind": if second { "second" } else { "first" }});
            let mut parts = Vec::new();
            for uk in b.kinds() {
                let v = fmt_rational(b.get(uk).expect("listed kind"));
                json[uk.as_str()] = json!(v);
                parts.push(format!("{} <= {v}", uk.symbol()));
            }
            let table = format!("A_{i}(2), degree {d}: {}\n", parts.join(", "));
            Ok(Output::ok(json, table))
        }
        Command::Bounds(BoundsCmd::Tensor { n, uk }) => {
            let t = bounds_tensor(n, &uk)?;
            let json = json!({
                "n": n, "uk": fmt_rational(&uk),
                "plus": fmt_rational(&t.plus), "minus": fmt_rational(&t.minus), "zero": fmt_rational(&t.zero),
                "floor": {"plus": t.floor(UKind::Plus).to_string(), "minus": t.floor(UKind::Minus).to_string(),
                          "zero": t.floor(UKind::Zero).to_string()},
                "derivations": {"plus": &t.plus_derivation, "minus": &t.minus_derivation, "zero": &t.zero_derivation},
            });
            let table = format!(
                "n = {n}, u(k) = {}: u+ <= {} ({}), u- <= {} ({}), u0 <= {} ({})\n",
                fmt_rational(&uk),
                fmt_rational(&t.plus),
                t.floor(UKind::Plus),
                fmt_rational(&t.minus),
                t.floor(UKind::Minus),
                fmt_rational(&t.zero),
                t.floor(UKind::Zero)
            );
            Ok(Output::ok(json, table))
        }
        Command::Bounds(BoundsCmd::Sequence { n }) => {
            let s = sequence_abc(n)?;
            let (a, b, c) = (fmt_rational(&s.a), fmt_rational(&s.b), fmt_rational(&s.c));
            let table = format!("n = {n}: a = {a}, b = {b}, c = {c}\n");
            Ok(Output::ok(json!({"n": n, "a": a, "b": b, "c": c}), table))
        }
        Command::Lab(LabCmd::Pid(a)) => {
            let input = LabInput::new(a.model, a.p, &a.symbol, a.sigma, &a.t)?;
            let r = input.pid_report()?;
            let mut table = format!(
                "{} sigma = {}, t = {}: case {}, pi_D = {}, eps' = {:+}\n",
                r.symbol, r.sigma, r.t, r.case, r.pi_d, r.eps_prime
            );
            for c in &r.checks {
                table.push_str(&format!("  {} {}: {}\n", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail));
            }
            Ok(Output::ok(serde_json::to_value(&r).map_err(|e| Error::Internal(e.to_string()))?, table))
        }
        Command::Lab(LabCmd::Larmour { lab, eps, form, symmetrize }) => {
            let input = LabInput::new(lab.model, lab.p, &lab.symbol, lab.sigma, &lab.t)?;
            let r = input.larmour_report(eps, &split_form(&form), symmetrize)?;
            let show = |f: &hermlab::lab::ResidueForm| {
                let e: Vec<String> = f.entries.iter().map(|x| x.to_string()).collect();
                format!("<{}> ({}, {})", e.join(", "), f.reason, if f.isotropic { "isotropic" } else { "anisotropic" })
            };
            let table = format!(
                "pi_D = {}, eps' = {:+}\n  h1: {}\n  h2: {}\n  form is {}\n",
                r.pi_d,
                r.eps_prime,
                show(&r.h1),
                show(&r.h2),
                if r.isotropic { "isotropic" } else { "anisotropic" }
            );
            Ok(Output::ok(serde_json::to_value(&r).map_err(|e| Error::Internal(e.to_string()))?, table))
        }
        Command::Verify(VerifyCmd::Paper { p, only }) => {
            let r = verify_paper(p, only.as_deref())?;
            let mut table = String::new();
            for row in &r.rows {
                let status = if row.status == Status::Pass { "PASS" } else { "FAIL" };
                table.push_str(&format!("{status} [{}] {}: {}", row.group, row.instance, row.computed));
                if row.status == Status::Fail {
                    table.push_str(&format!(" (expected {})", row.expected));
                }
                table.push('\n');
            }
            table.push_str(&format!("{} passed, {} failed (p = {})\n", r.passed, r.failed, r.p));
            let code = if r.ok() { 0 } else { 2 };
            Ok(Output { json: serde_json::to_value(&r).map_err(|e| Error::Internal(e.to_string()))?, table, code })
        }
    }
}

fn uinv_inputs(a: &UinvArgs) -> Result<(BrauerClass, Option<hermlab::fields::SquareClass>, Assertions), Error> {
    let k = FieldDesc::parse(&a.field)?;
    let b = BrauerClass::parse(&k, &a.class)?;
    let lambda = a.lambda.as_deref().map(|l| k.parse_class(l)).transpose()?;
    let asr = Assertions::parse(&a.assert_division)?;
    Ok((b, lambda, asr))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("values serialize"));
            } else {
                print!("{}", out.table);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            if cli.json {
                println!("{}", json!({"error": {"kind": error_kind(&e), "message": e.to_string()}}));
            }
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
