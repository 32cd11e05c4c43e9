//! `ordram`: command-line workbench for ordinal notations, fundamental
//! sequences, fronts and the finite Ramsey constructions.
//!
//! Exit codes: 0 pass, 1 property violation, 2 usage error, 3 budget
//! exhaustion.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ordinal_ramsey::fundseq::Verdict;
use ordinal_ramsey::lower::{verify_homogeneous, verify_m};
use ordinal_ramsey::ordinal::sub_multiset;
use ordinal_ramsey::sample::FuzzConfig;
use ordinal_ramsey::upper::{verify_prehomogeneous, PrehomShape};
use ordinal_ramsey::verify::bachmann_remark;
use ordinal_ramsey::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Parser, Debug)]
#[command(name = "ordram", version, about = "Ordinal notations, fundamental sequences and finite Ramsey constructions")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampled work.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Work budget (search nodes, descent steps or checks, per command).
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Sequence context as JSON (`zeta`, `norm`, `fuel`).
    #[arg(long, global = true)]
    ctx: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ordinal arithmetic.
    #[command(subcommand)]
    Ord(OrdCmd),
    /// Prints the descent chain α, α[n], α[n][n], ….
    Fs {
        /// The starting ordinal.
        ord: String,
        /// The argument used at every step.
        #[arg(long)]
        n: u64,
        /// Number of steps; by default descends to 0.
        #[arg(long)]
        steps: Option<u64>,
    },
    /// Classifies a finite set as α-small, α-size or α-large.
    Large {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        set: String,
    },
    /// Front classification.
    #[command(subcommand)]
    Barrier(BarrierCmd),
    /// Classifies a probe set against the pigeonhole front of A.
    Pigeon {
        /// Comma-separated front expressions.
        #[arg(long = "A")]
        a: String,
        #[arg(long)]
        probe: String,
    },
    /// Brute-force arrow check: every k-coloring of [s]^C has a homogeneous
    /// (C⊕A_i)-size set of color i.
    Arrow {
        #[arg(long)]
        s: String,
        #[arg(long = "A")]
        a: String,
        #[arg(long = "C")]
        c: String,
        #[arg(long)]
        k: usize,
    },
    /// The lower-bound coloring.
    #[command(subcommand)]
    Lower(LowerCmd),
    /// Prehomogeneous extraction and bound evaluation.
    #[command(subcommand)]
    Upper(UpperCmd),
    /// Seeded property campaigns.
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
enum OrdCmd {
    /// Parses and prints the normal form.
    Eval { x: String },
    /// Prints less, equal or greater.
    Cmp { a: String, b: String },
    /// Hessenberg natural sum.
    Natsum { a: String, b: String },
    /// Natural product with a finite k.
    Natprod { a: String, k: u64 },
    /// φ_{log γ}(x).
    Philog { gamma: String, x: String },
    /// The subterm multiset.
    Sub { x: String },
}

#[derive(Subcommand, Debug)]
enum BarrierCmd {
    /// Classifies a set against a front expression.
    Classify {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        set: String,
    },
}

#[derive(Args, Debug, Clone)]
struct LowerArgs {
    #[arg(long)]
    alpha: String,
    #[arg(long)]
    gamma: String,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    mu: String,
}

#[derive(Subcommand, Debug)]
enum LowerCmd {
    /// Generates and certifies a prefix of M.
    Gen {
        #[command(flatten)]
        params: LowerArgs,
        #[arg(long, default_value_t = 8)]
        count: usize,
    },
    /// Colors the (1+γ)-size subsets of the first `count` elements of M.
    Color {
        #[command(flatten)]
        params: LowerArgs,
        #[arg(long, default_value_t = 6)]
        count: usize,
        /// Also write the coloring file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-derives a coloring file and searches it for homogeneous sets.
    Verify {
        #[arg(long)]
        coloring: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum UpperCmd {
    /// Extracts a prehomogeneous set and, for D = deg, a homogeneous one.
    Prehom {
        #[arg(long)]
        s: String,
        #[arg(long = "C")]
        c: String,
        #[arg(long = "D")]
        d: String,
        #[arg(long = "A")]
        a: String,
        #[arg(long)]
        k: usize,
        /// Coloring file; a seeded random coloring is used when absent.
        #[arg(long)]
        coloring: Option<PathBuf>,
    },
    /// Evaluates φ_{log γ}(α ⨰ k) and φ_{log γ}(α·ω).
    Bound {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        k: u64,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// nested, regular, goodness, subset, peeling, zeta, front-laws or
    /// bachmann-remark.
    kind: String,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 6)]
    max_depth: u32,
}

#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
        }
    }
}

impl From<FrontError> for Failure {
    fn from(e: FrontError) -> Self {
        match e {
            FrontError::Budget(m) => Failure::Budget(m),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<LowerError> for Failure {
    fn from(e: LowerError) -> Self {
        match e {
            LowerError::Budget(n) => Failure::Budget(format!("{n} nodes")),
            other => Failure::Usage(other.to_string()),
        }
    }
}

/// A command result: JSON, a text rendering and an exit code.
struct Output {
    json: Value,
    text: String,
    code: u8,
}

impl Output {
    fn ok(json: Value, text: impl Into<String>) -> Self {
        Output { json, text: text.into(), code: 0 }
    }
}

type Res = Result<Output, Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn load_ctx(path: &Option<PathBuf>) -> Result<SeqCtx, Failure> {
    match path {
        None => Ok(SeqCtx::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))
        }
    }
}

fn read_json(path: &PathBuf) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

struct Env {
    ctx: SeqCtx,
    seed: u64,
    budget: Option<u64>,
}

impl Env {
    fn ord(&self, text: &str) -> Result<Ordinal, Failure> {
        parse_ordinal(text, &self.ctx).map_err(|e| usage(format!("{text:?}: {e}")))
    }

    fn set(&self, text: &str) -> Result<FiniteSet, Failure> {
        parse_set(text).map_err(|e| usage(format!("{text:?}: {e}")))
    }

    fn front(&self, text: &str) -> Result<Front, Failure> {
        parse_front(text, &self.ctx).map_err(|e| usage(format!("{text:?}: {e}")))
    }

    fn fronts(&self, text: &str) -> Result<Vec<Front>, Failure> {
        parse_front_list(text, &self.ctx).map_err(|e| usage(format!("{text:?}: {e}")))
    }

    fn lower_params(&self, a: &LowerArgs) -> Result<LowerParams, Failure> {
        Ok(LowerParams { alpha: self.ord(&a.alpha)?, gamma: self.ord(&a.gamma)?, k: a.k, mu: self.ord(&a.mu)? })
    }
}

fn class_name(c: Class) -> &'static str {
    match c {
        Verdict::Small => "small",
        Verdict::Size => "size",
        Verdict::Large => "large",
    }
}

fn run_ord(env: &Env, cmd: &OrdCmd) -> Res {
    let value = match cmd {
        OrdCmd::Eval { x } => env.ord(x)?,
        OrdCmd::Cmp { a, b } => {
            let word = match compare(&env.ord(a)?, &env.ord(b)?) {
                std::cmp::Ordering::Less => "less",
                std::cmp::Ordering::Equal => "equal",
                std::cmp::Ordering::Greater => "greater",
            };
            return Ok(Output::ok(json!({ "a": a, "b": b, "result": word }), word));
        }
        OrdCmd::Natsum { a, b } => nat_sum(&env.ord(a)?, &env.ord(b)?),
        OrdCmd::Natprod { a, k } => nat_prod_fin(&env.ord(a)?, *k),
        OrdCmd::Philog { gamma, x } => philog_apply(&env.ord(gamma)?, &env.ord(x)?),
        OrdCmd::Sub { x } => {
            let m = sub_multiset(&env.ord(x)?);
            let entries: Vec<Value> = m.iter().map(|(o, n)| json!({ "ordinal": o, "multiplicity": n })).collect();
            let text: Vec<String> = m.iter().map(|(o, n)| format!("{o} x{n}")).collect();
            return Ok(Output::ok(json!({ "sub": entries, "cardinality": m.cardinality() }), text.join("\n")));
        }
    };
    Ok(Output::ok(json!({ "value": value }), value.to_string()))
}

fn run_fs(env: &Env, ord: &str, n: u64, steps: Option<u64>) -> Res {
    let mut cur = env.ord(ord)?;
    let limit = steps.or(env.budget).unwrap_or(1000);
    let mut chain = vec![cur.clone()];
    while (chain.len() as u64) <= limit && !cur.is_zero() {
        cur = fs_step(&cur, n, &env.ctx);
        chain.push(cur.clone());
    }
    let text: Vec<String> = chain.iter().map(ToString::to_string).collect();
    let out = Output::ok(json!({ "n": n, "chain": chain, "reachedZero": cur.is_zero() }), text.join("\n"));
    if steps.is_none() && !cur.is_zero() {
        return Err(Failure::Budget(format!("no descent to 0 within {limit} steps; last value {cur}")));
    }
    Ok(out)
}

fn run_large(env: &Env, alpha: &str, set: &str) -> Res {
    let (alpha, s) = (env.ord(alpha)?, env.set(set)?);
    let v = classify_large(&alpha, s.as_slice(), &env.ctx);
    let json = json!({ "verdict": v.verdict, "residual": v.residual, "prefixLen": v.prefix_len });
    Ok(Output::ok(json, format!("{} (residual {})", class_name(v.verdict), v.residual)))
}

fn run_barrier(env: &Env, spec: &str, set: &str) -> Res {
    let (f, s) = (env.front(spec)?, env.set(set)?);
    let class = f.classify(s.as_slice())?;
    let height = if class == Class::Large { None } else { f.height_at(s.as_slice())? };
    let json = json!({ "front": f.describe(), "set": s, "class": class, "height": height });
    let h = height.map(|h| format!(", height {h}")).unwrap_or_default();
    Ok(Output::ok(json, format!("{}{h}", class_name(class))))
}

fn run_pigeon(env: &Env, a: &str, probe: &str) -> Res {
    let (a, s) = (env.fronts(a)?, env.set(probe)?);
    let p = pigeon_front(&a)?;
    let class = p.classify(s.as_slice())?;
    let height = p.height()?;
    let json = json!({ "front": p.describe(), "height": height, "probe": s, "class": class });
    let h = height.map(|h| format!(" (front height {h})")).unwrap_or_default();
    Ok(Output::ok(json, format!("{}{h}", class_name(class))))
}

fn replicate(mut a: Vec<Front>, k: usize) -> Result<Vec<Front>, Failure> {
    match a.len() {
        1 if k > 0 => Ok(vec![a.remove(0); k]),
        n if n == k && k > 0 => Ok(a),
        n => Err(usage(format!("{n} fronts given for {k} colors"))),
    }
}

fn run_arrow(env: &Env, s: &str, a: &str, c: &str, k: usize) -> Res {
    let (s, a, c) = (env.set(s)?, replicate(env.fronts(a)?, k)?, env.front(c)?);
    let rep = arrow_check(s.as_slice(), &a, &c, env.budget.unwrap_or(1 << 26))?;
    let text = format!("{} ({} nodes, {} pruned)", serde_json::to_value(rep.verdict).unwrap_or_default().as_str().unwrap_or(""), rep.searched, rep.pruned);
    Ok(Output::ok(serde_json::to_value(&rep).map_err(usage)?, text))
}

fn params_json(p: &LowerParams) -> Value {
    json!({ "alpha": p.alpha, "gamma": p.gamma, "k": p.k, "mu": p.mu })
}

fn run_lower(env: &Env, cmd: &LowerCmd) -> Res {
    match cmd {
        LowerCmd::Gen { params, count } => {
            let p = env.lower_params(params)?;
            let m = build_m(&p, *count, &env.ctx)?;
            let ok = verify_m(&m, &p, &env.ctx)?;
            let json = json!({ "params": params_json(&p), "advisories": p.advisories(), "M": m, "verified": ok });
            let text = format!("M = {:?} ({})", m.elements, if ok { "certified" } else { "certificate mismatch" });
            Ok(Output { json, text, code: if ok { 0 } else { 1 } })
        }
        LowerCmd::Color { params, count, out } => {
            let p = env.lower_params(params)?;
            let m = build_m(&p, *count, &env.ctx)?;
            let col = color_sets(&m.elements, &p, &env.ctx)?;
            let json = json!({ "params": params_json(&p), "M": m.elements, "sets": col.entries });
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&json).map_err(usage)?;
                fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            }
            let text = format!("{} sets colored with {} colors over M = {:?}", col.entries.len(), col.k, m.elements);
            Ok(Output::ok(json, text))
        }
        LowerCmd::Verify { coloring } => {
            let file = read_json(coloring)?;
            let field = |k: &str| file["params"][k].as_str().map(str::to_string).ok_or_else(|| usage(format!("params.{k} missing")));
            let args = LowerArgs {
                alpha: field("alpha")?,
                gamma: field("gamma")?,
                k: file["params"]["k"].as_u64().ok_or_else(|| usage("params.k missing"))?,
                mu: field("mu")?,
            };
            let p = env.lower_params(&args)?;
            let s: Vec<u64> = serde_json::from_value(file["M"].clone()).map_err(usage)?;
            let given: Vec<ColorEntry> = serde_json::from_value(file["sets"].clone()).map_err(usage)?;
            let col = color_sets(&s, &p, &env.ctx)?;
            let recolored = col.entries == given;
            let search = homog_absence_check(&s, &col, &p.gamma, &p.alpha, &env.ctx, env.budget.unwrap_or(1_000_000))?;
            let homog_ok = match &search {
                HomogSearch::NoneFound { .. } => true,
                HomogSearch::Found { witness, .. } => !verify_homogeneous(witness.as_slice(), &col, &p.gamma, &p.alpha, &env.ctx),
            };
            let pass = recolored && homog_ok;
            let json = json!({
                "verdict": if pass { "pass" } else { "violation" },
                "recolored": recolored,
                "search": search,
            });
            let text = format!("coloring {}; homogeneous search: {}", if recolored { "reproduced" } else { "differs" }, serde_json::to_string(&search).unwrap_or_default());
            Ok(Output { json, text, code: if pass { 0 } else { 1 } })
        }
    }
}

/// Reads a coloring file with either a `sets` or an `entries` table.
fn read_coloring(path: &PathBuf) -> Result<Coloring, Failure> {
    let file = read_json(path)?;
    let table = if file["sets"].is_array() { &file["sets"] } else { &file["entries"] };
    let entries: Vec<ColorEntry> = serde_json::from_value(table.clone()).map_err(usage)?;
    let k = file["k"].as_u64().map(|k| k as usize).unwrap_or_else(|| entries.iter().map(|e| e.color + 1).max().unwrap_or(1));
    Ok(Coloring::new(k, entries.into_iter().map(|e| (e.set, e.color))))
}

#[allow(clippy::too_many_arguments)]
fn run_prehom(env: &Env, s: &str, c: &str, d: &str, a: &str, k: usize, coloring: &Option<PathBuf>) -> Res {
    let (s, c_front, d_front, a_front) = (env.set(s)?, env.front(c)?, env.front(d)?, env.front(a)?);
    let pa = pigeon_front(&vec![a_front.clone(); k])?;
    let shape = PrehomShape::new(&pa, &c_front, &d_front)?;
    let col = match coloring {
        Some(path) => read_coloring(path)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(env.seed);
            let sets = shape.colored.size_sets_within(s.as_slice(), 1 << 22)?;
            Coloring::new(k, sets.into_iter().map(|w| (w, rng.gen_range(0..k))))
        }
    };
    let budget = env.budget.unwrap_or(1 << 22);
    let rep = match prehomog_extract(s.as_slice(), &col, &pa, &c_front, &d_front, budget) {
        Ok(r) => r,
        Err(UpperError::Budget(n)) => return Err(Failure::Budget(format!("{n} nodes"))),
        Err(UpperError::Front(e)) => return Err(e.into()),
        Err(e) => {
            let json = json!({ "verdict": "violation", "error": e.to_string() });
            return Ok(Output { json, text: e.to_string(), code: 1 });
        }
    };
    let verified = verify_prehomogeneous(rep.t.as_slice(), &col, &shape).is_ok();
    let mut text = format!("prehomogeneous set {}", rep.t);
    let homog = if d_front.describe() == "deg" {
        match homog_from_prehomog(rep.t.as_slice(), &col, &c_front, &a_front, k) {
            Ok(h) => {
                text.push_str(&format!("; homogeneous set {} of color {}", h.set, h.color));
                Some(serde_json::to_value(&h).map_err(usage)?)
            }
            Err(e) => {
                let json = json!({ "verdict": "violation", "prehom": rep, "error": e.to_string() });
                return Ok(Output { json, text: format!("{text}; {e}"), code: 1 });
            }
        }
    } else {
        None
    };
    let json = json!({ "verdict": if verified { "pass" } else { "violation" }, "prehom": rep, "homog": homog });
    Ok(Output { json, text, code: if verified { 0 } else { 1 } })
}

fn run_verify(env: &Env, args: &VerifyArgs) -> Res {
    let report = if args.kind == "bachmann-remark" {
        bachmann_remark(&env.ctx)
    } else {
        let kind: CampaignKind = args.kind.parse().map_err(usage)?;
        let cfg = FuzzConfig { seed: env.seed, samples: args.samples, max_depth: args.max_depth, ..Default::default() };
        let opts = CampaignOptions { budget: env.budget, ..Default::default() };
        fuzz_campaign(kind, &cfg, &opts, &env.ctx)
    };
    let code = report.verdict.exit_code() as u8;
    let counters: Vec<String> = report.counters.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let verdict = serde_json::to_value(report.verdict).map_err(usage)?;
    let mut text = format!("{}: {} ({})", report.command, verdict.as_str().unwrap_or(""), counters.join(", "));
    for w in &report.witnesses {
        text.push_str(&format!("\n  witness {w}"));
    }
    Ok(Output { json: serde_json::to_value(&report).map_err(usage)?, text, code })
}

fn run(cli: &Cli) -> Res {
    let env = Env { ctx: load_ctx(&cli.ctx)?, seed: cli.seed, budget: cli.budget };
    match &cli.command {
        Command::Ord(cmd) => run_ord(&env, cmd),
        Command::Fs { ord, n, steps } => run_fs(&env, ord, *n, *steps),
        Command::Large { alpha, set } => run_large(&env, alpha, set),
        Command::Barrier(BarrierCmd::Classify { spec, set }) => run_barrier(&env, spec, set),
        Command::Pigeon { a, probe } => run_pigeon(&env, a, probe),
        Command::Arrow { s, a, c, k } => run_arrow(&env, s, a, c, *k),
        Command::Lower(cmd) => run_lower(&env, cmd),
        Command::Upper(UpperCmd::Prehom { s, c, d, a, k, coloring }) => run_prehom(&env, s, c, d, a, *k, coloring),
        Command::Upper(UpperCmd::Bound { alpha, gamma, k }) => {
            let (alpha, gamma) = (env.ord(alpha)?, env.ord(gamma)?);
            let (upper, limit) = (ram_upper(&alpha, &gamma, *k), ram_limit(&alpha, &gamma));
            Ok(Output::ok(json!({ "upper": upper, "limit": limit }), format!("upper {upper}\nlimit {limit}")))
        }
        Command::Verify(args) => run_verify(&env, args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", out.json);
            } else {
                println!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "error": e.to_string(), "exitCode": e.code() }));
            }
            eprintln!("ordram: {e}");
            ExitCode::from(e.code())
        }
    }
}
