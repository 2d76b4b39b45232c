//! Command-line front end and JSON report emitter.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error,
//! 3 internal error or blown resource cap.  Reports carry the schema tag
//! `orthokit-report/1`; matrices and ring elements are embedded in their
//! text forms, and keys are emitted in sorted order so that a fixed command
//! line (and seed) reproduces the report byte for byte.  `--timings` adds
//! wall-clock fields and is the one deliberate exception to that rule.

mod suites;
mod words;

use crate::classical;
use crate::dser;
use crate::error::{Error, Result};
use crate::grouplab::{self, GroupTable};
use crate::mat::Mat;
use crate::quadmod::QuadSpace;
use crate::ring::{self, IdealDesc, RingCtx, RingKind};
use crate::spinor::{self, Membership};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use std::time::Instant;

const SCHEMA: &str = "orthokit-report/1";
const EXIT_OK: i32 = 0;
const EXIT_VERIFY: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_INTERNAL: i32 = 3;

#[derive(Parser)]
#[command(
    name = "orthokit",
    version,
    about = "Exact elementary-orthogonal-group calculus over small commutative rings"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit one classical generator as a matrix
    Gen(GenArgs),
    /// Evaluate a JSON generator word to a matrix
    Eval(EvalArgs),
    /// Run seeded property suites; nonzero exit on any failure
    Verify(VerifyArgs),
    /// Check the commutator relation table of the generator families
    Relations(RelationsArgs),
    /// Check the classical-generator / transvection translation
    Dictionary(DictionaryArgs),
    /// Reflection decomposition, spinor norm, and membership data for a matrix
    Spinor(SpinorArgs),
    /// Lift a relative orthogonal matrix into the doubled ring
    Lift(LiftArgs),
    /// Rewrite a relative word into conjugated ideal-parameter blocks
    Rewrite(RewriteArgs),
    /// Enumerate the finite group generated by a standard generator set
    Enumerate(EnumerateArgs),
    /// Derived / lower central series, or quotient structure with --quotient
    Series(SeriesArgs),
    /// Enumerate the ideal lattice of a finite ring
    Ideals(IdealsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Oe,
    F1,
    F2,
    F3,
    F4,
    F5,
}

impl GenKind {
    fn name(self) -> &'static str {
        match self {
            GenKind::Oe => "oe",
            GenKind::F1 => "f1",
            GenKind::F2 => "f2",
            GenKind::F3 => "f3",
            GenKind::F4 => "f4",
            GenKind::F5 => "f5",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GensChoice {
    /// All odd-case family generators over all nonzero ring parameters
    FAll,
    /// All even-case generators over all nonzero ring parameters
    OeAll,
}

impl GensChoice {
    fn name(self) -> &'static str {
        match self {
            GensChoice::FAll => "f-all",
            GensChoice::OeAll => "oe-all",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeriesKind {
    Derived,
    Lower,
}

#[derive(Args)]
struct GenArgs {
    /// Ring spec: zmod:<n> | Q | poly:<base>:<var> | exc:<base>:[g,..]
    #[arg(long, default_value = "zmod:9")]
    ring: String,
    /// Generator family
    #[arg(long, value_enum)]
    kind: GenKind,
    /// Number of hyperbolic pairs
    #[arg(long)]
    n: usize,
    /// First pair index (1-based)
    #[arg(long)]
    i: usize,
    /// Second pair index (oe and families 3-5)
    #[arg(long)]
    j: Option<usize>,
    /// Ring parameter, element text form
    #[arg(long, default_value = "0")]
    z: String,
    /// Fail (exit 1) unless the result equals this matrix
    #[arg(long)]
    expect: Option<String>,
    /// Wrap the matrix in a JSON report
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// Ring spec
    #[arg(long)]
    ring: String,
    /// Space spec: phi:N | hyp:M | phi:N+hyp:M
    #[arg(long)]
    space: String,
    /// Word to evaluate: inline JSON array, or a path to a JSON file
    #[arg(long)]
    word: String,
    /// Fail (exit 1) unless the result equals this matrix
    #[arg(long)]
    expect: Option<String>,
    /// Wrap the matrix in a JSON report
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Ring spec
    #[arg(long)]
    ring: String,
    /// Suite name: ring | quadmod | dser | classical | spinor | lift | all
    #[arg(long, default_value = "all")]
    suite: String,
    /// RNG seed for the sampled cases
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RelationsArgs {
    /// Ring spec
    #[arg(long)]
    ring: String,
    /// Number of hyperbolic pairs (indices range over 1..=pairs)
    #[arg(long, default_value_t = 3)]
    pairs: usize,
    /// RNG seed used when the ring is too large to sweep exhaustively
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DictionaryArgs {
    /// Ring spec
    #[arg(long)]
    ring: String,
    /// Number of hyperbolic pairs
    #[arg(long, default_value_t = 3)]
    pairs: usize,
    /// RNG seed used when the ring is too large to sweep exhaustively
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SpinorArgs {
    /// Ring spec (must be a field)
    #[arg(long)]
    ring: String,
    /// Space spec
    #[arg(long)]
    space: String,
    /// Orthogonal matrix: inline text, or a path to a file
    #[arg(long)]
    matrix: String,
}

#[derive(Args)]
struct LiftArgs {
    /// Base ring spec
    #[arg(long)]
    ring: String,
    /// Ideal generators, e.g. [3] or 3,6
    #[arg(long)]
    ideal: String,
    /// Space spec
    #[arg(long)]
    space: String,
    /// Matrix congruent to the identity mod the ideal: inline text or a file
    #[arg(long)]
    matrix: String,
    /// Wrap the lifted matrix in a JSON report
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RewriteArgs {
    /// Doubled-ring spec, exc:<base>:[g,..]
    #[arg(long)]
    ring: String,
    /// Space spec
    #[arg(long)]
    space: String,
    /// Relative word: inline JSON array, or a path to a JSON file
    #[arg(long)]
    word: String,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Ring spec (must be finite)
    #[arg(long)]
    ring: String,
    /// Space spec
    #[arg(long)]
    space: String,
    /// Generator set
    #[arg(long, value_enum, default_value_t = GensChoice::FAll)]
    gens: GensChoice,
    /// Extra generator matrices (repeatable): inline text or files
    #[arg(long)]
    extra: Vec<String>,
    /// Abort once the element table grows past this size
    #[arg(long, default_value_t = grouplab::DEFAULT_CAP)]
    cap: usize,
    /// Include wall-clock timings (makes the report nondeterministic)
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct SeriesArgs {
    /// Ring spec (must be finite)
    #[arg(long)]
    ring: String,
    /// Space spec
    #[arg(long)]
    space: String,
    /// Generator set for the base group
    #[arg(long, value_enum, default_value_t = GensChoice::FAll)]
    gens: GensChoice,
    /// Extra generator matrices (repeatable): inline text or files
    #[arg(long)]
    extra: Vec<String>,
    /// Abort once any element table grows past this size
    #[arg(long, default_value_t = grouplab::DEFAULT_CAP)]
    cap: usize,
    /// Which series to compute
    #[arg(long, value_enum, default_value_t = SeriesKind::Derived)]
    kind: SeriesKind,
    /// Report the quotient (gens + extra) / (gens) instead of a series
    #[arg(long)]
    quotient: bool,
}

#[derive(Args)]
struct IdealsArgs {
    /// Ring spec (must be finite)
    #[arg(long)]
    ring: String,
}

/// Parse the command line, dispatch, and map errors to exit codes.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.cmd {
        Cmd::Gen(a) => gen_cmd(a),
        Cmd::Eval(a) => eval_cmd(a),
        Cmd::Verify(a) => verify_cmd(a),
        Cmd::Relations(a) => relations_cmd(a),
        Cmd::Dictionary(a) => dictionary_cmd(a),
        Cmd::Spinor(a) => spinor_cmd(a),
        Cmd::Lift(a) => lift_cmd(a),
        Cmd::Rewrite(a) => rewrite_cmd(a),
        Cmd::Enumerate(a) => enumerate_cmd(a),
        Cmd::Series(a) => series_cmd(a),
        Cmd::Ideals(a) => ideals_cmd(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

/// Bad input and unsupported domains are the caller's problem (2); blown
/// caps and violated internal checks are ours (3).
fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Internal(_) | Error::CapExceeded { .. } => EXIT_INTERNAL,
        _ => EXIT_USAGE,
    }
}

fn emit(v: Value) {
    println!("{v}");
}

fn space_json(space: &QuadSpace) -> Value {
    json!({
        "ctx": space.ctx().spec(),
        "n": space.q_rank(),
        "m": space.hyp_rank(),
        "gram": space.gram().format(),
    })
}

/// `phi:N`, `hyp:M`, or a `+`-joined sum of such parts.
fn parse_space(ctx: &RingCtx, spec: &str) -> Result<QuadSpace> {
    let mut acc: Option<QuadSpace> = None;
    for part in spec.split('+') {
        let part = part.trim();
        let sp = if let Some(n) = part.strip_prefix("phi:") {
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad rank in space part {part:?}")))?;
            QuadSpace::phi_tilde(ctx, n)?
        } else if let Some(m) = part.strip_prefix("hyp:") {
            let m: usize = m
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad pair count in space part {part:?}")))?;
            QuadSpace::hyperbolic(ctx, m)?
        } else {
            return Err(Error::Parse(format!(
                "bad space part {part:?} (expected phi:<N> or hyp:<M>)"
            )));
        };
        acc = Some(match acc {
            None => sp,
            Some(a) => a.orth_sum(&sp)?,
        });
    }
    acc.ok_or_else(|| Error::Parse("empty space spec".into()))
}

/// Accept either inline text or a path to a file holding the text.
fn load_text(raw: &str) -> String {
    match std::fs::read_to_string(raw) {
        Ok(t) => t,
        Err(_) => raw.to_string(),
    }
}

fn read_matrix(ctx: &RingCtx, raw: &str) -> Result<Mat> {
    Mat::parse(ctx, load_text(raw).trim())
}

fn read_word(space: &QuadSpace, raw: &str) -> Result<dser::Word> {
    let text = if raw.trim_start().starts_with('[') { raw.to_string() } else { load_text(raw) };
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("word is not valid JSON: {e}")))?;
    words::parse_word(space, &v)
}

fn parse_ideal_arg(ctx: &RingCtx, raw: &str) -> Result<IdealDesc> {
    let inner = raw.trim();
    let inner = inner.strip_prefix('[').and_then(|t| t.strip_suffix(']')).unwrap_or(inner);
    let mut gens = Vec::new();
    for tok in ring::split_top(inner, ',') {
        let tok = tok.trim();
        if !tok.is_empty() {
            gens.push(ctx.parse_elem(tok)?);
        }
    }
    IdealDesc::new(ctx, gens)
}

/// Check an optional `--expect` matrix; returns the exit code to use.
fn check_expect(ctx: &RingCtx, got: &Mat, expect: Option<&str>) -> Result<i32> {
    if let Some(raw) = expect {
        let want = Mat::parse(ctx, load_text(raw).trim())?;
        if want.canonical_bytes() != got.canonical_bytes() {
            eprintln!("expectation failed:\n  got   {}\n  want  {}", got.format(), want.format());
            return Ok(EXIT_VERIFY);
        }
    }
    Ok(EXIT_OK)
}

fn gen_cmd(a: GenArgs) -> Result<i32> {
    let ctx = RingCtx::parse_ring_spec(&a.ring)?;
    let z = ctx.parse_elem(&a.z)?;
    let mat = match a.kind {
        GenKind::Oe => {
            let j = a.j.ok_or_else(|| Error::Parse("--j is required for kind oe".into()))?;
            classical::oe(&ctx, a.n, a.i, j, &z)?
        }
        k => {
            let family = k.name().as_bytes()[1] - b'0';
            classical::f_gen(&ctx, a.n, family, a.i, a.j, &z)?
        }
    };
    let code = check_expect(&ctx, &mat, a.expect.as_deref())?;
    if code != EXIT_OK {
        return Ok(code);
    }
    if a.json {
        emit(json!({
            "schema": SCHEMA,
            "command": "gen",
            "ring": ctx.spec(),
            "kind": a.kind.name(),
            "n": a.n,
            "i": a.i,
            "j": a.j,
            "z": ctx.format_elem(&z)?,
            "matrix": mat.format(),
        }));
    } else {
        println!("{}", mat.format());
    }
    Ok(EXIT_OK)
}

fn eval_cmd(a: EvalArgs) -> Result<i32> {
    let ctx = RingCtx::parse_ring_spec(&a.ring)?;
    let space = parse_space(&ctx, &a.space)?;
    let word = read_word(&space, &a.word)?;
    let mat = word.eval()?;
    let code = check_expect(&ctx, &mat, a.expect.as_deref())?;
    if code != EXIT_OK {
        return Ok(code);
    }
    if a.json {
        emit(json!({
            "schema": SCHEMA,
            "command": "eval",
            "ring": ctx.spec(),
            "space": space_json(&space),
            "letters": word.len(),
            "matrix": mat.format(),
        }));
    } else {
        println!("{}", mat.format());
    }
    Ok(EXIT_OK)
}

fn verify_cmd(a: VerifyArgs) -> Result<i32> {
    let ctx = RingCtx::parse_ring_spec(&a.ring)?;
    let reports = suites::run_suites(&a.suite, &ctx, a.seed)?;
    let ok = reports.iter().all(|r| r.ok());
    let suites_json: Vec<Value> = reports
        .iter()
        .map(|r| {
            let mut m = Map::new();
            m.insert("suite".into(), json!(r.suite));
            m.insert("cases".into(), json!(r.cases));
            m.insert("failures".into(), json!(r.failures));
            if let Some(s) = &r.skipped {
                m.insert("skipped".into(), json!(s));
            }
            Value::Object(m)
        })
        .collect();
    emit(json!({
        "schema": SCHEMA,
        "command": "verify",
        "ring": ctx.spec(),
        "seed": a.seed,
        "suites": suites_json,
        "ok": ok,
    }));
    Ok(if ok { EXIT_OK } else { EXIT_VERIFY })
}

fn relations_cmd(a: RelationsArgs) -> Result<i32> {
    let ctx = RingCtx::parse_ring_spec(&a.ring)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let samples = suites::z_samples(&ctx, &mut rng);
    let report = classical::check_f_relations(&ctx, a.pairs, &samples)?;
    let failures: Vec<String> = report.failures.iter().map(suites::relation_failure_line).collect();
    let ok = report.ok();
    emit(json!({
        "schema": SCHEMA,
        "command": "relations",
        "ring": ctx.spec(),
        "pairs": a.pairs,
        "samples": samples.len(),
        "checked": report.checked,
        "failures": failures,
        "ok": ok,
    }));
    Ok(if ok { EXIT_OK } else { EXIT_VERIFY })
}

fn dictionary_cmd(a: DictionaryArgs) -> Result<i32> {
    let ctx = RingCtx::parse_ring_spec(&a.ring)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let samples = suites::z_samples(&ctx, &mut rng);
    let (checked, failures) = suites::translation_check(&ctx, a.pairs, &samples)?;
    let ok = failures.is_empty();
    emit(json!({
        "schema": SCHEMA,
        "command": "dictionary",
        "ring": ctx.spec(),
        "pairs": a.pairs,
        "samples": samples.len(),
        "checked": checked,
        "failures": failures,
        "ok": ok,
    }));
    Ok(if ok { EXIT_OK } else { EXIT_VERIFY })
}

fn spinor_cmd(a: SpinorArgs) -> Result<i32> {
    let ctx = RingCtx::parse_ring_spec(&a.ring)?;
    let space = parse_space(&ctx, &a.space)?;
    let mat = read_matrix(&ctx, &a.matrix)?;
    let det = mat.det()?;
    let reflections = spinor::decompose_reflections(&space, &mat)?;
    let class = spinor::spinor_norm(&space, &mat)?;
    let elementary = match spinor::eo_membership_oracle(&space, &mat) {
        Ok(Membership::In) => Some(true),
        Ok(Membership::NotIn) => Some(false),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    let refl_json: Vec<String> = reflections.iter().map(Mat::format).collect();
    emit(json!({
        "schema": SCHEMA,
        "command": "spinor",
        "ring": ctx.spec(),
        "space": space_json(&space),
        "det": ctx.format_elem(&det)?,
        "reflections": refl_json,
        "class": ctx.format_elem(class.rep())?,
        "elementary": elementary,
    }));
    Ok(EXIT_OK)
}

fn lift_cmd(a: LiftArgs) -> Result<i32> {
    let ctx = RingCtx::parse_ring_spec(&a.ring)?;
    let ideal = parse_ideal_arg(&ctx, &a.ideal)?;
    let space = parse_space(&ctx, &a.space)?;
    let mat = read_matrix(&ctx, &a.matrix)?;
    let lifted = dser::lift_orthogonal(&space, &mat, &ideal)?;
    if a.json {
        emit(json!({
            "schema": SCHEMA,
            "command": "lift",
            "ring": ctx.spec(),
            "ideal": ideal.spec(),
            "lifted_ring": lifted.ctx().spec(),
            "space": space_json(&space),
            "matrix": lifted.format(),
        }));
    } else {
        println!("{}", lifted.format());
    }
    Ok(EXIT_OK)
}

fn rewrite_cmd(a: RewriteArgs) -> Result<i32> {
    let ctx = RingCtx::parse_ring_spec(&a.ring)?;
    let space = parse_space(&ctx, &a.space)?;
    let word = read_word(&space, &a.word)?;
    let nf = dser::relative_normal_form(&word)?;
    emit(json!({
        "schema": SCHEMA,
        "command": "rewrite",
        "ring": ctx.spec(),
        "space": space_json(&space),
        "letters": words::format_word(&nf),
        "matrix": nf.eval()?.format(),
    }));
    Ok(EXIT_OK)
}

/// The standard generator set for a space, by family.
fn base_gens(ctx: &RingCtx, space: &QuadSpace, choice: GensChoice) -> Result<Vec<Mat>> {
    match choice {
        GensChoice::FAll => {
            let phi_shaped = space.q_rank() == 1
                && space.gram().get(0, 0) == ctx.from_i64(2)
                && space.hyp_rank() >= 1;
            if !phi_shaped {
                return Err(Error::Invalid(
                    "--gens f-all needs an odd phi space (phi:<odd N>)".into(),
                ));
            }
            classical::f_all_gens(ctx, space.hyp_rank())
        }
        GensChoice::OeAll => {
            if space.q_rank() != 0 || space.hyp_rank() < 2 {
                return Err(Error::Invalid(
                    "--gens oe-all needs a hyperbolic space with at least two pairs (hyp:<M>)".into(),
                ));
            }
            let elems = ctx
                .enumerate()
                .ok_or_else(|| Error::Unsupported("generator sweep needs a finite ring".into()))?;
            let m = space.hyp_rank();
            let mut out = Vec::new();
            for i in 1..=m {
                for j in 1..=m {
                    if i == j {
                        continue;
                    }
                    for z in &elems {
                        if !ctx.is_zero(z) {
                            out.push(classical::oe(ctx, m, i, j, z)?);
                        }
                    }
                }
            }
            Ok(out)
        }
    }
}

fn collect_gens(
    ctx: &RingCtx,
    space: &QuadSpace,
    choice: GensChoice,
    extra: &[String],
) -> Result<Vec<Mat>> {
    let mut gens = base_gens(ctx, space, choice)?;
    for raw in extra {
        gens.push(read_matrix(ctx, raw)?);
    }
    Ok(gens)
}

fn enumerate_cmd(a: EnumerateArgs) -> Result<i32> {
    let ctx = RingCtx::parse_ring_spec(&a.ring)?;
    let space = parse_space(&ctx, &a.space)?;
    let gens = collect_gens(&ctx, &space, a.gens, &a.extra)?;
    let t0 = Instant::now();
    let table = GroupTable::bfs_closure(&space, &gens, a.cap)?;
    let elapsed = t0.elapsed().as_millis() as u64;
    let sample: Vec<String> = table.elems().iter().skip(1).take(3).map(Mat::format).collect();
    let timings = if a.timings { json!({ "closure_ms": elapsed }) } else { Value::Null };
    emit(json!({
        "schema": SCHEMA,
        "command": "enumerate",
        "ring": ctx.spec(),
        "space": space_json(&space),
        "gens": a.gens.name(),
        "extra": a.extra.len(),
        "cap": a.cap,
        "order": table.order(),
        "sample": sample,
        "timings": timings,
    }));
    Ok(EXIT_OK)
}

fn series_cmd(a: SeriesArgs) -> Result<i32> {
    let ctx = RingCtx::parse_ring_spec(&a.ring)?;
    let space = parse_space(&ctx, &a.space)?;
    let base = base_gens(&ctx, &space, a.gens)?;
    if a.quotient {
        let n = GroupTable::bfs_closure(&space, &base, a.cap)?;
        let all = collect_gens(&ctx, &space, a.gens, &a.extra)?;
        let g = GroupTable::bfs_closure(&space, &all, a.cap)?;
        let q = grouplab::quotient_structure(&g, &n)?;
        emit(json!({
            "schema": SCHEMA,
            "command": "series",
            "ring": ctx.spec(),
            "space": space_json(&space),
            "gens": a.gens.name(),
            "extra": a.extra.len(),
            "group_order": g.order(),
            "subgroup_order": n.order(),
            "quotient": {
                "order": q.order,
                "abelian": q.abelian,
                "exponent": q.exponent,
                "derived_length": q.derived_length,
            },
        }));
        return Ok(EXIT_OK);
    }
    let all = collect_gens(&ctx, &space, a.gens, &a.extra)?;
    let g = GroupTable::bfs_closure(&space, &all, a.cap)?;
    let series = match a.kind {
        SeriesKind::Derived => grouplab::derived_series(&g, a.cap)?,
        SeriesKind::Lower => grouplab::lower_central_series(&g, a.cap)?,
    };
    let orders: Vec<usize> = series.iter().map(GroupTable::order).collect();
    emit(json!({
        "schema": SCHEMA,
        "command": "series",
        "ring": ctx.spec(),
        "space": space_json(&space),
        "gens": a.gens.name(),
        "extra": a.extra.len(),
        "kind": match a.kind { SeriesKind::Derived => "derived", SeriesKind::Lower => "lower" },
        "order": g.order(),
        "orders": orders,
        "length": grouplab::series_length(&series),
    }));
    Ok(EXIT_OK)
}

fn ideals_cmd(a: IdealsArgs) -> Result<i32> {
    let ctx = RingCtx::parse_ring_spec(&a.ring)?;
    let ideals = ring::enumerate_ideals(&ctx)?;
    let is_exc = matches!(ctx.kind(), RingKind::Excision { .. });
    let mut entries = Vec::new();
    for ideal in &ideals {
        let mut m = Map::new();
        let gens: Result<Vec<String>> = ideal.gens().iter().map(|g| ctx.format_elem(g)).collect();
        m.insert("gens".into(), json!(gens?));
        m.insert("size".into(), json!(ideal.element_count()));
        m.insert("maximal".into(), json!(ring::is_maximal_ideal(ideal)?));
        if is_exc {
            let s = ring::split_form(ideal)?;
            m.insert(
                "split".into(),
                json!({ "split": s.split, "r_count": s.r_count, "i_count": s.i_count }),
            );
        }
        entries.push(Value::Object(m));
    }
    // in the doubled ring, adjoining the full second factor to a maximal
    // ideal of the base must stay maximal
    let maximal_oplus = if let RingKind::Excision { base, .. } = ctx.kind() {
        let mut rows = Vec::new();
        for m in ring::enumerate_ideals(base)? {
            if ring::is_maximal_ideal(&m)? {
                let big = ring::oplus_ideal(&ctx, &m)?;
                rows.push(json!({
                    "base_ideal": m.spec(),
                    "oplus_maximal": ring::is_maximal_ideal(&big)?,
                }));
            }
        }
        Value::Array(rows)
    } else {
        Value::Null
    };
    emit(json!({
        "schema": SCHEMA,
        "command": "ideals",
        "ring": ctx.spec(),
        "count": ideals.len(),
        "ideals": entries,
        "maximal_oplus": maximal_oplus,
    }));
    Ok(EXIT_OK)
}
