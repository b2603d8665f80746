//! Command-line driver. [`execute`] parses an argument vector, runs one
//! experiment and returns a [`RunReport`] plus the process exit code:
//! 0 pass, 1 fail, 2 inconclusive (budget or horizon), 64 usage error.

use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::expansion::{self, SignType};
use crate::families::{self, Family, Window, WindowSemantics};
use crate::ipsets::{self, ClosureCap, Coloring, IntSet, WitnessShape};
use crate::refine::{self, PlusFn, Producer, SipWitness, WitnessOptions};
use crate::rotation::{self, Angle, ArcSet, RotationConfig};
use crate::Verdict;

pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser, Serialize)]
#[command(name = "sipkit", version, about = "SIP sets, ternary colorings, set families and rotations")]
struct Cli {
    /// Output encoding.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Largest rotation iterate examined.
    #[arg(long, global = true)]
    horizon: Option<u64>,
    /// Rotation number as p/q.
    #[arg(long, global = true, default_value = "610/987")]
    alpha: String,
    /// Search nodes or producer terms allowed.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Size cap: closure generators, or family universe.
    #[arg(long, global = true)]
    cap: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
enum Command {
    /// Balanced base-b digits, reduced ternary expansion, z and type.
    Expand {
        #[arg(allow_negative_numbers = true)]
        t: String,
        #[arg(long, default_value_t = 3)]
        base: u32,
    },
    /// Sign-change counts.
    Zcount {
        #[arg(required = true)]
        values: Vec<String>,
    },
    /// Color classes z mod K.
    Color {
        #[arg(required = true)]
        values: Vec<String>,
        #[arg(long = "K", default_value_t = 3)]
        k: u32,
    },
    /// D, IP and SIP closures and the symmetrization identity.
    Sip {
        #[arg(required = true, allow_negative_numbers = true)]
        values: Vec<String>,
    },
    /// Finite monochromatic and translated-SIP searches.
    #[command(subcommand)]
    Search(SearchCmd),
    /// Upward-closed families on a finite universe.
    #[command(subcommand)]
    Family(FamilyCmd),
    /// One refinement step to a level.
    Refine {
        #[arg(long, default_value = "arith:1:1")]
        k0: String,
        #[arg(long, default_value_t = 1)]
        level: u32,
        #[arg(long, default_value_t = 5)]
        request: usize,
    },
    /// Beyond-ascending homogeneous witness inside u + SIP(k0).
    Witness {
        #[arg(long, default_value = "0", allow_negative_numbers = true)]
        u: String,
        #[arg(long, default_value = "pow3:1")]
        k0: String,
        #[arg(long, default_value_t = 7)]
        depth: usize,
        #[arg(long)]
        min_first_index: Option<u32>,
    },
    /// Residue cycle of z mod K along sign flips.
    Thm46 {
        #[arg(long = "K", default_value_t = 3)]
        k: u32,
        #[arg(long, default_value_t = 1)]
        t0: u64,
        /// `pow3` or `list:a,b,...`.
        #[arg(long, default_value = "pow3")]
        blocks: String,
        #[arg(long, default_value_t = 7)]
        count: u32,
    },
    /// Both z classes meet every witness; no beyond witness in A_0.
    Thm47 {
        #[arg(long, default_value_t = 100)]
        witnesses: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 19683)]
        window: u64,
        /// Upper end of A_0 ∩ [1..max].
        #[arg(long, default_value_t = 59049)]
        target_max: u64,
    },
    /// Hitting times of a rational circle rotation.
    #[command(subcommand)]
    Rotate(RotateCmd),
}

#[derive(Debug, Args, Serialize)]
struct ColoringArgs {
    /// `mod:K`, `z:K`, `const`, `random:C` or `list:c1,c2,...`.
    #[arg(long, default_value = "mod:2")]
    coloring: String,
    #[arg(long, default_value_t = 20)]
    n: u64,
    #[arg(long, default_value_t = 2)]
    m: usize,
}

#[derive(Debug, Subcommand, Serialize)]
enum SearchCmd {
    /// Monochromatic positive difference set.
    MonoD(ColoringArgs),
    /// Monochromatic positive IP set.
    MonoIp(ColoringArgs),
    /// Translated SIP set inside a target.
    Tsip {
        /// `range:N`, `mult:d:N`, `zclass:r:K:N` or `list:a,b,...`.
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 30)]
        window: u64,
        #[arg(long, value_enum, default_value = "any")]
        shape: ShapeArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ShapeArg {
    Any,
    Beyond,
}

#[derive(Debug, Args, Serialize)]
struct FamilyArgs {
    #[arg(long)]
    universe: u32,
    /// Generators, e.g. `1,2;2,3`.
    #[arg(long, default_value = "")]
    gens: String,
}

#[derive(Debug, Subcommand, Serialize)]
enum FamilyCmd {
    /// Dual family F*.
    Dual(FamilyArgs),
    /// Product family F·G of pairwise intersections.
    Join {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long = "with", default_value = "")]
        other: String,
    },
    /// Proper, filter, Ramsey and dual-is-filter flags.
    Classify(FamilyArgs),
    /// Sharp dual F#.
    Sharp(FamilyArgs),
    /// Check the four sharp-dual clauses.
    Prop51(FamilyArgs),
    /// Windowed translation hull γF and core γ̃F.
    Gamma {
        #[command(flatten)]
        family: FamilyArgs,
        /// Largest |n| among the translates (defaults to the width).
        #[arg(long)]
        shift: Option<u32>,
        #[arg(long)]
        cyclic: bool,
    },
}

#[derive(Debug, Subcommand, Serialize)]
enum RotateCmd {
    /// Orbit point n·alpha in [-1/2, 1/2).
    Orbit {
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
    },
    /// Hitting times N(x, U) up to the horizon.
    Hitting {
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value = "-1/8,1/8", allow_hyphen_values = true)]
        arc: String,
    },
    /// Return times N(U, V) against differences of hitting times.
    Prop31 {
        #[arg(long, default_value = "-1/8,1/8", allow_hyphen_values = true)]
        arc_u: String,
        #[arg(long, default_value = "-1/8,1/8", allow_hyphen_values = true)]
        arc_v: String,
    },
    /// Greedy F with SIP(F)_+ inside N(0, U).
    Recur {
        #[arg(long, default_value = "-1/8,1/8", allow_hyphen_values = true)]
        arc: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Single-element extension chain with the doubling ledger.
    Chain {
        #[arg(long, default_value = "[0,1/8)", allow_hyphen_values = true)]
        arc: String,
        #[arg(long = "seed-set", default_value = "13")]
        seed_set: String,
        #[arg(long, default_value_t = 10)]
        max_depth: usize,
    },
}

/// Machine-readable result of one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub params: Map<String, Value>,
    pub verdict: Verdict,
    pub witnesses: Value,
    pub counts: Map<String, Value>,
    pub elapsed_ms: u64,
}

impl RunReport {
    /// The argument vector that reproduces this report.
    pub fn argv(&self) -> Vec<String> {
        self.params
            .get("argv")
            .and_then(Value::as_array)
            .map(|a| a.iter().filter_map(|v| v.as_str().map(str::to_owned)).collect())
            .unwrap_or_default()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["path", "value"]).expect("in-memory write");
        for (path, leaf) in flatten(&value) {
            w.write_record([path, leaf]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    pub fn from_csv(text: &str) -> Result<RunReport, String> {
        let mut rows = Vec::new();
        let mut r = csv::Reader::from_reader(text.as_bytes());
        for rec in r.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            rows.push((rec[0].to_string(), rec[1].to_string()));
        }
        let value = unflatten(&rows)?;
        serde_json::from_value(value).map_err(|e| e.to_string())
    }
}

/// Leaves of a JSON value as `(pointer, json text)`; empty containers are leaves.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    fn walk(v: &Value, path: String, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(m) if !m.is_empty() => {
                for (k, x) in m {
                    walk(x, format!("{path}/{}", k.replace('~', "~0").replace('/', "~1")), out);
                }
            }
            Value::Array(a) if !a.is_empty() => {
                for (i, x) in a.iter().enumerate() {
                    walk(x, format!("{path}/{i}"), out);
                }
            }
            leaf => out.push((path, leaf.to_string())),
        }
    }
    let mut out = Vec::new();
    walk(v, String::new(), &mut out);
    out
}

/// Inverse of [`flatten`]. Numeric path segments denote array positions.
pub fn unflatten(rows: &[(String, String)]) -> Result<Value, String> {
    fn insert(slot: &mut Value, segs: &[String], leaf: Value) -> Result<(), String> {
        let Some((head, rest)) = segs.split_first() else {
            *slot = leaf;
            return Ok(());
        };
        if let Ok(i) = head.parse::<usize>() {
            if slot.is_null() {
                *slot = Value::Array(Vec::new());
            }
            let arr = slot.as_array_mut().ok_or("mixed container")?;
            if arr.len() <= i {
                arr.resize(i + 1, Value::Null);
            }
            insert(&mut arr[i], rest, leaf)
        } else {
            if slot.is_null() {
                *slot = Value::Object(Map::new());
            }
            let obj = slot.as_object_mut().ok_or("mixed container")?;
            insert(obj.entry(head.clone()).or_insert(Value::Null), rest, leaf)
        }
    }
    let mut root = Value::Null;
    for (path, text) in rows {
        let leaf: Value = serde_json::from_str(text).map_err(|e| format!("{path}: {e}"))?;
        let segs: Vec<String> = path
            .split('/')
            .skip(1)
            .map(|s| s.replace("~1", "/").replace("~0", "~"))
            .collect();
        insert(&mut root, &segs, leaf)?;
    }
    Ok(root)
}

/// Result of [`execute`]: the report (absent on usage errors), the exit
/// code and the rendered text for stdout or stderr.
#[derive(Debug, Clone)]
pub struct Execution {
    pub report: Option<RunReport>,
    pub exit_code: i32,
    pub output: String,
}

enum Failure {
    Usage(String),
    Inconclusive(String),
}

type Outcome = Result<(Verdict, Value, Map<String, Value>), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

/// Runs one command. `argv` excludes the program name.
pub fn execute<I, S>(argv: I) -> Execution
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(std::iter::once("sipkit".to_string()).chain(argv.clone())) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion
                | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    if e.kind() == clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        EXIT_USAGE
                    } else {
                        0
                    }
                }
                _ => EXIT_USAGE,
            };
            return Execution {
                report: None,
                exit_code: code,
                output: e.render().to_string(),
            };
        }
    };

    let start = Instant::now();
    let mut params = match serde_json::to_value(&cli) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    };
    params.insert("argv".into(), json!(argv));
    let command = command_name(&cli.command);
    let outcome = run(&cli);
    let elapsed_ms = start.elapsed().as_millis() as u64;
    let (verdict, witnesses, counts) = match outcome {
        Ok(x) => x,
        Err(Failure::Usage(msg)) => {
            return Execution {
                report: None,
                exit_code: EXIT_USAGE,
                output: format!("error: {msg}\n"),
            }
        }
        Err(Failure::Inconclusive(msg)) => (Verdict::Inconclusive, json!({ "reason": msg }), Map::new()),
    };
    let report = RunReport {
        command,
        params,
        verdict,
        witnesses,
        counts,
        elapsed_ms,
    };
    let output = match cli.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    Execution {
        exit_code: verdict.exit_code(),
        report: Some(report),
        output,
    }
}

fn command_name(c: &Command) -> String {
    let name = match c {
        Command::Expand { .. } => "expand",
        Command::Zcount { .. } => "zcount",
        Command::Color { .. } => "color",
        Command::Sip { .. } => "sip",
        Command::Search(SearchCmd::MonoD(_)) => "search mono-d",
        Command::Search(SearchCmd::MonoIp(_)) => "search mono-ip",
        Command::Search(SearchCmd::Tsip { .. }) => "search tsip",
        Command::Family(f) => match f {
            FamilyCmd::Dual(_) => "family dual",
            FamilyCmd::Join { .. } => "family join",
            FamilyCmd::Classify(_) => "family classify",
            FamilyCmd::Sharp(_) => "family sharp",
            FamilyCmd::Prop51(_) => "family prop51",
            FamilyCmd::Gamma { .. } => "family gamma",
        },
        Command::Refine { .. } => "refine",
        Command::Witness { .. } => "witness",
        Command::Thm46 { .. } => "thm46",
        Command::Thm47 { .. } => "thm47",
        Command::Rotate(r) => match r {
            RotateCmd::Orbit { .. } => "rotate orbit",
            RotateCmd::Hitting { .. } => "rotate hitting",
            RotateCmd::Prop31 { .. } => "rotate prop31",
            RotateCmd::Recur { .. } => "rotate recur",
            RotateCmd::Chain { .. } => "rotate chain",
        },
    };
    name.to_string()
}

fn big(s: &str) -> Result<BigInt, Failure> {
    s.trim().parse().map_err(|_| usage(format!("not an integer: {s}")))
}

fn counts(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn closure_cap(cli: &Cli) -> ClosureCap {
    let mut cap = ClosureCap::default();
    if let Some(c) = cli.cap {
        cap.max_generators = c as usize;
    }
    cap
}

fn rotation_config(cli: &Cli) -> Result<RotationConfig, Failure> {
    let alpha = rotation::parse_rational(&cli.alpha).map_err(usage)?;
    let cfg = RotationConfig::new(alpha, 0).map_err(usage)?;
    let horizon = cli
        .horizon
        .unwrap_or_else(|| cfg.period().to_u64().map_or(1000, |q| q.saturating_sub(1).max(1)));
    Ok(cfg.with_horizon(horizon))
}

fn ip_failure(e: ipsets::IpSetError) -> Failure {
    match e {
        ipsets::IpSetError::BudgetExhausted { .. }
        | ipsets::IpSetError::CapExceeded { .. }
        | ipsets::IpSetError::PairBudgetExceeded { .. } => Failure::Inconclusive(e.to_string()),
        _ => usage(e),
    }
}

fn refine_failure(e: refine::RefineError) -> Failure {
    match e {
        refine::RefineError::Exhausted { .. } => Failure::Inconclusive(e.to_string()),
        refine::RefineError::Closure(inner) => ip_failure(inner),
        _ => usage(e),
    }
}

fn rotation_failure(e: rotation::RotationError) -> Failure {
    match e {
        rotation::RotationError::HorizonExhausted { .. } => Failure::Inconclusive(e.to_string()),
        rotation::RotationError::Closure(inner) => ip_failure(inner),
        _ => usage(e),
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Expand { t, base } => run_expand(&big(t)?, *base),
        Command::Zcount { values } => {
            let mut rows = Vec::new();
            for v in values {
                let t = big(v)?;
                let z = expansion::z_count(&t).map_err(usage)?;
                rows.push(json!({ "t": t.to_string(), "z": z }));
            }
            Ok((Verdict::Pass, Value::Array(rows), counts(&[("values", json!(values.len()))])))
        }
        Command::Color { values, k } => {
            let mut rows = Vec::new();
            for v in values {
                let t = big(v)?;
                let class = expansion::color_class(&t, *k).map_err(usage)?;
                let set = if class == 0 { "A_0" } else { "A_1" };
                rows.push(json!({ "t": t.to_string(), "class": class, "set": set }));
            }
            Ok((Verdict::Pass, Value::Array(rows), counts(&[("values", json!(values.len()))])))
        }
        Command::Sip { values } => run_sip(cli, values),
        Command::Search(s) => run_search(cli, s),
        Command::Family(f) => run_family(cli, f),
        Command::Refine { k0, level, request } => {
            let budget = cli.budget.unwrap_or(4096) as usize;
            let mut k = parse_producer(k0)?.build();
            let r = refine::refine_beyond(&mut k, *level, *request, budget).map_err(refine_failure)?;
            let values: Vec<String> = r.values.prefix().iter().map(|v| v.to_string()).collect();
            let input_prefix: Vec<BigInt> = k.prefix()[..r.consumed].to_vec();
            let ok = r.values.prefix().iter().all(|v| expansion::lowest_index(v) > *level)
                && refine::is_refinement(r.values.prefix(), &input_prefix).unwrap_or(false);
            Ok((
                if ok { Verdict::Pass } else { Verdict::Fail },
                json!({ "values": values, "case": r.case }),
                counts(&[("consumed", json!(r.consumed))]),
            ))
        }
        Command::Witness { u, k0, depth, min_first_index } => {
            let opts = WitnessOptions {
                budget: cli.budget.unwrap_or(1 << 16) as usize,
                min_first_index: *min_first_index,
                ..WitnessOptions::default()
            };
            let mut k = parse_producer(k0)?.build();
            let b = refine::build_sip_witness(&big(u)?, &mut k, *depth, &opts).map_err(refine_failure)?;
            let recheck = SipWitness::new(b.witness.t0().clone(), b.witness.blocks().to_vec()).is_ok();
            Ok((
                if recheck { Verdict::Pass } else { Verdict::Fail },
                serde_json::to_value(&b).expect("serializes"),
                counts(&[
                    ("consumed", json!(b.consumed)),
                    ("rounds", json!(b.round_heads.len())),
                    ("certified_blocks", json!(b.certified_blocks)),
                ]),
            ))
        }
        Command::Thm46 { k, t0, blocks, count } => {
            let w = if blocks == "pow3" {
                refine::powers_of_three_witness(*t0, *count)
            } else if let Some(list) = blocks.strip_prefix("list:") {
                let values = parse_list(list)?.into_iter().map(BigInt::from).collect();
                SipWitness::new(BigInt::from(*t0), values)
            } else {
                return Err(usage(format!("unknown block source {blocks}")));
            }
            .map_err(refine_failure)?;
            let c = refine::build_residue_cycle(&w, *k).map_err(refine_failure)?;
            let ok = c.surjective && c.steps_consistent();
            Ok((
                if ok { Verdict::Pass } else { Verdict::Fail },
                json!({ "witness": w, "cycle": c }),
                counts(&[("sums", json!(c.sums.len()))]),
            ))
        }
        Command::Thm47 { witnesses, depth, window, target_max } => {
            run_thm47(cli, *witnesses, *depth, *window, *target_max)
        }
        Command::Rotate(r) => run_rotate(cli, r),
    }
}

fn run_expand(t: &BigInt, base: u32) -> Outcome {
    let digits = expansion::expand_balanced(t, base).map_err(usage)?;
    let mut w = json!({
        "t": t.to_string(),
        "base": base,
        "digits": digits.digits(),
    });
    let round_trip = digits.value() == *t;
    if base == 3 {
        let r = expansion::reduced_expansion(t);
        w["reduced"] = json!(r.to_string());
        w["indices"] = json!(r.indices().collect::<Vec<_>>());
        if !r.is_empty() {
            w["type"] = json!(r.sign_type());
        }
        if t.is_positive() {
            w["z"] = json!(expansion::z_count(t).map_err(usage)?);
        }
    }
    Ok((
        if round_trip { Verdict::Pass } else { Verdict::Fail },
        w,
        counts(&[("digits", json!(digits.digits().len()))]),
    ))
}

fn parse_list(text: &str) -> Result<Vec<i64>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<i64>().map_err(|_| usage(format!("not an integer: {s}"))))
        .collect()
}

fn run_sip(cli: &Cli, values: &[String]) -> Outcome {
    let mut items = Vec::new();
    for v in values {
        for piece in v.split(',').filter(|s| !s.trim().is_empty()) {
            items.push(big(piece)?);
        }
    }
    let set: IntSet = items.into_iter().collect();
    let cap = closure_cap(cli);
    let d = ipsets::difference_set_capped(&set, &cap).map_err(ip_failure)?;
    let ip = ipsets::ip_closure_capped(&set, &cap).map_err(ip_failure)?;
    let sip = ipsets::sip_closure_capped(&set, &cap).map_err(ip_failure)?;
    let mut w = json!({
        "set": set,
        "difference": d,
        "ip": ip,
        "sip": sip,
        "sip_positive": ipsets::positive_part(&sip),
    });
    let mut verdict = Verdict::Pass;
    if set.min().is_some_and(|m| m.is_positive()) {
        let rep = ipsets::verify_lemma11_capped(&set, &cap).map_err(ip_failure)?;
        if !rep.holds {
            verdict = Verdict::Fail;
        }
        w["lemma11"] = json!({ "holds": rep.holds, "first_difference": rep.first_difference });
    }
    Ok((
        verdict,
        w,
        counts(&[("ip", json!(ip.len())), ("sip", json!(sip.len()))]),
    ))
}

fn parse_coloring(text: &str, n: u64, seed: u64) -> Result<Coloring, Failure> {
    let (kind, arg) = text.split_once(':').unwrap_or((text, ""));
    let num = |s: &str| s.parse::<u32>().map_err(|_| usage(format!("bad coloring {text}")));
    let c = match kind {
        "const" => Coloring::from_fn(n, |_| 0),
        "mod" => {
            let k = num(arg)?.max(1);
            Coloring::from_fn(n, |t| (t % k as u64) as u32)
        }
        "z" => {
            let k = num(arg)?;
            if k < 3 || k % 2 == 0 {
                return Err(usage(format!("modulus must be odd and at least 3: {k}")));
            }
            Coloring::from_fn(n, |t| (expansion::z_count_u64(t) % k as u64) as u32)
        }
        "random" => {
            let k = num(arg)?.max(1);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let classes = (0..n).map(|_| rng.gen_range(0..k)).collect();
            Coloring::new(classes)
        }
        "list" => Coloring::new(
            parse_list(arg)?
                .into_iter()
                .map(|c| u32::try_from(c).map_err(|_| usage(format!("bad color {c}"))))
                .collect::<Result<_, _>>()?,
        ),
        _ => return Err(usage(format!("unknown coloring {text}"))),
    };
    c.map_err(usage)
}

fn parse_target(text: &str) -> Result<IntSet, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| s.parse::<u64>().map_err(|_| usage(format!("bad target {text}")));
    let set: IntSet = match parts.as_slice() {
        ["range", n] => (1..=num(n)?).map(BigInt::from).collect(),
        ["mult", d, n] => {
            let d = num(d)?.max(1);
            (1..=num(n)?).filter(|t| t % d == 0).map(BigInt::from).collect()
        }
        ["zclass", r, k, n] => {
            let (r, k) = (num(r)?, num(k)?.max(1));
            (1..=num(n)?)
                .filter(|&t| expansion::z_count_u64(t) % k == r)
                .map(BigInt::from)
                .collect()
        }
        ["list", items] => parse_list(items)?.into_iter().map(BigInt::from).collect(),
        _ => return Err(usage(format!("unknown target {text}"))),
    };
    Ok(set)
}

fn parse_producer(text: &str) -> Result<Producer, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || usage(format!("bad producer {text}"));
    let p = match parts.as_slice() {
        ["pow3"] => Producer::Powers3 { first: 1 },
        ["pow3", f] => Producer::Powers3 { first: f.parse().map_err(|_| bad())? },
        ["arith", a, d] => Producer::Arithmetic {
            start: a.parse().map_err(|_| bad())?,
            step: d.parse().map_err(|_| bad())?,
        },
        ["list", items] => Producer::List(parse_list(items)?),
        ["spaced", seed, ty] => Producer::Spaced {
            seed: seed.parse().map_err(|_| bad())?,
            sign_type: match *ty {
                "pos" => SignType::Positive,
                "neg" => SignType::Negative,
                _ => return Err(bad()),
            },
        },
        _ => return Err(bad()),
    };
    Ok(p)
}

fn run_search(cli: &Cli, s: &SearchCmd) -> Outcome {
    let budget = cli.budget.unwrap_or(10_000_000);
    let (found, explored) = match s {
        SearchCmd::MonoD(a) | SearchCmd::MonoIp(a) => {
            let c = parse_coloring(&a.coloring, a.n, cli.seed)?;
            let out = if matches!(s, SearchCmd::MonoD(_)) {
                ipsets::search_mono_difference(&c, a.m, budget)
            } else {
                ipsets::search_mono_ip(&c, a.m, budget)
            }
            .map_err(ip_failure)?;
            (out.found.map(|f| json!(f)), out.explored)
        }
        SearchCmd::Tsip { target, m, window, shape } => {
            let set = parse_target(target)?;
            let shape = match shape {
                ShapeArg::Any => WitnessShape::Any,
                ShapeArg::Beyond => WitnessShape::Beyond,
            };
            let out = ipsets::search_translated_sip(&set, *m, *window, shape, budget)
                .map_err(ip_failure)?;
            (out.found.map(|f| json!(f)), out.explored)
        }
    };
    let verdict = if found.is_some() { Verdict::Pass } else { Verdict::Fail };
    Ok((
        verdict,
        json!({ "found": found }),
        counts(&[("explored", json!(explored))]),
    ))
}

fn family_json(f: &Family) -> Value {
    json!({
        "minimal": f.minimal().iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        "members": f.members().len(),
        "proper": f.is_proper(),
    })
}

fn parse_family(a: &FamilyArgs) -> Result<Family, Failure> {
    let gens = families::parse_subsets(&a.gens, a.universe).map_err(usage)?;
    Family::generated(a.universe, gens).map_err(usage)
}

fn run_family(cli: &Cli, f: &FamilyCmd) -> Outcome {
    let cap = cli.cap.unwrap_or(families::DEFAULT_CAP);
    let pass = |w: Value, fam: &Family| {
        Ok((Verdict::Pass, w, counts(&[("universe", json!(fam.universe()))])))
    };
    match f {
        FamilyCmd::Dual(a) => {
            let fam = parse_family(a)?;
            let dual = fam.dual();
            let involutive = !fam.is_proper() || dual.dual() == fam;
            Ok((
                if involutive { Verdict::Pass } else { Verdict::Fail },
                json!({ "family": family_json(&fam), "dual": family_json(&dual) }),
                counts(&[("universe", json!(fam.universe()))]),
            ))
        }
        FamilyCmd::Join { family, other } => {
            let a = parse_family(family)?;
            let b = parse_family(&FamilyArgs { universe: family.universe, gens: other.clone() })?;
            let j = a.join(&b).map_err(usage)?;
            // Proper exactly when the second family sits inside the dual of the first.
            let consistent = j.is_proper() == (b.is_subfamily_of(&a.dual()) && a.is_proper() && b.is_proper());
            Ok((
                if consistent { Verdict::Pass } else { Verdict::Fail },
                json!({ "left": family_json(&a), "right": family_json(&b), "join": family_json(&j) }),
                counts(&[("universe", json!(a.universe()))]),
            ))
        }
        FamilyCmd::Classify(a) => {
            let fam = parse_family(a)?;
            let c = fam.classify(cap).map_err(usage)?;
            let consistent = !c.proper || c.ramsey == c.dual_is_filter;
            Ok((
                if consistent { Verdict::Pass } else { Verdict::Fail },
                json!({ "family": family_json(&fam), "classification": c }),
                counts(&[("universe", json!(fam.universe()))]),
            ))
        }
        FamilyCmd::Sharp(a) => {
            let fam = parse_family(a)?;
            let s = fam.sharp_dual(cap).map_err(usage)?;
            pass(json!({ "family": family_json(&fam), "sharp": family_json(&s) }), &fam)
        }
        FamilyCmd::Prop51(a) => {
            let fam = parse_family(a)?;
            let rep = families::prop51_report(&fam, cap).map_err(usage)?;
            Ok((
                if rep.all_hold() { Verdict::Pass } else { Verdict::Fail },
                json!({
                    "family": family_json(&fam),
                    "sharp": family_json(&rep.sharp),
                    "clauses": rep.clauses,
                }),
                counts(&[("universe", json!(fam.universe()))]),
            ))
        }
        FamilyCmd::Gamma { family, shift, cyclic } => {
            let fam = parse_family(family)?;
            let window = Window {
                width: family.universe,
                max_shift: shift.unwrap_or(family.universe),
                semantics: if *cyclic { WindowSemantics::Cyclic } else { WindowSemantics::Truncated },
            };
            let g = families::gamma_window(&fam, &window).map_err(usage)?;
            let core = families::tilde_gamma_window(&fam.dual(), &window).map_err(usage)?;
            let duality = g.dual() == core;
            Ok((
                if duality { Verdict::Pass } else { Verdict::Fail },
                json!({
                    "family": family_json(&fam),
                    "window": window,
                    "gamma": family_json(&g),
                    "tilde_gamma_of_dual": family_json(&core),
                    "duality": duality,
                }),
                counts(&[("universe", json!(fam.universe()))]),
            ))
        }
    }
}

fn run_thm47(cli: &Cli, witnesses: usize, depth: usize, window: u64, target_max: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut rows = Vec::new();
    let mut all_meet = true;
    let opts = WitnessOptions {
        budget: cli.budget.map_or(1 << 12, |b| b as usize),
        ..WitnessOptions::default()
    };
    let cap = closure_cap(cli);
    for i in 0..witnesses {
        let sign_type = if i % 2 == 0 { SignType::Positive } else { SignType::Negative };
        let producer = Producer::Spaced { seed: rng.gen(), sign_type };
        let u = BigInt::from(rng.gen_range(-50i64..=50));
        let mut k0: PlusFn = producer.build();
        let b = refine::build_sip_witness(&u, &mut k0, depth, &opts).map_err(refine_failure)?;
        let set = b.witness.translated_sip(depth, &cap).map_err(refine_failure)?;
        let mut hit = [false; 2];
        for t in set.iter() {
            let class = expansion::color_class(t, 3).map_err(usage)?;
            hit[usize::from(class != 0)] = true;
        }
        all_meet &= hit[0] && hit[1];
        rows.push(json!({
            "t0": b.witness.t0().to_string(),
            "blocks": b.witness.blocks().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "meets_a0": hit[0],
            "meets_a1": hit[1],
        }));
    }
    let a0 = parse_target(&format!("zclass:0:3:{target_max}"))?;
    let budget = cli.budget.unwrap_or(100_000_000);
    let search = ipsets::search_translated_sip(&a0, 2, window, WitnessShape::Beyond, budget)
        .map_err(ip_failure)?;
    let verdict = if all_meet && search.found.is_none() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok((
        verdict,
        json!({ "witnesses": rows, "a0_translate": search.found }),
        counts(&[
            ("witnesses", json!(witnesses)),
            ("explored", json!(search.explored)),
            ("a0_size", json!(a0.len())),
        ]),
    ))
}

fn run_rotate(cli: &Cli, r: &RotateCmd) -> Outcome {
    let cfg = rotation_config(cli)?;
    let arc = |s: &str| s.parse::<ArcSet>().map_err(usage);
    let base = |extra: &[(&str, Value)]| {
        let mut c = counts(extra);
        c.insert("horizon".into(), json!(cfg.horizon()));
        c.insert("injective".into(), json!(cfg.injective()));
        c
    };
    match r {
        RotateCmd::Orbit { n } => {
            let p = rotation::orbit_point(*n, &cfg).map_err(rotation_failure)?;
            Ok((Verdict::Pass, json!({ "n": n, "point": p }), base(&[])))
        }
        RotateCmd::Hitting { x, arc: a } => {
            let x: Angle = x.parse().map_err(usage)?;
            let u = arc(a)?;
            let set = rotation::hitting_set(&x, &u, &cfg);
            let n = set.len();
            Ok((
                Verdict::Pass,
                json!({ "x": x, "arc": u, "hits": set }),
                base(&[("hits", json!(n))]),
            ))
        }
        RotateCmd::Prop31 { arc_u, arc_v } => {
            let rep = rotation::check_prop301(&arc(arc_u)?, &arc(arc_v)?, &cfg).map_err(rotation_failure)?;
            Ok((rep.verdict, json!(rep), base(&[])))
        }
        RotateCmd::Recur { arc: a, depth } => {
            let rep = rotation::build_recurrent_sip(&arc(a)?, *depth, &cfg).map_err(rotation_failure)?;
            Ok((
                if rep.certificate { Verdict::Pass } else { Verdict::Fail },
                json!(rep),
                base(&[("certified", json!(rep.certified))]),
            ))
        }
        RotateCmd::Chain { arc: a, seed_set, max_depth } => {
            let seed: IntSet = parse_list(seed_set)?.into_iter().map(BigInt::from).collect();
            let rep = rotation::extension_chain(&arc(a)?, &seed, *max_depth, &cfg).map_err(rotation_failure)?;
            Ok((
                if rep.doubling_holds && rep.bound_holds { Verdict::Pass } else { Verdict::Fail },
                json!(rep),
                base(&[("depth", json!(rep.depth))]),
            ))
        }
    }
}

/// Writes the rendered output to stdout, or stderr for usage errors, and
/// returns the exit code.
pub fn exit_with(exec: &Execution) -> i32 {
    use std::io::Write;
    // A closed pipe is not worth a panic.
    if exec.exit_code == EXIT_USAGE {
        let _ = write!(std::io::stderr(), "{}", exec.output);
    } else {
        let _ = writeln!(std::io::stdout(), "{}", exec.output.trim_end());
    }
    exec.exit_code
}
