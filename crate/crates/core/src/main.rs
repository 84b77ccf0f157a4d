//! `agtk` command-line front end.
//!
//! Exit codes: 0 success, 1 a verified property was violated (witness JSON
//! on stdout), 2 invalid input, 3 cap exceeded, 4 solver or io failure.

use agtk::cayley::{babai_report, ball_diameter, spectral_gap, CayleyGraph};
use agtk::limits::{gh_bounds_torus, rescaled_space, torus_limit_report, Family, TorusModel};
use agtk::progressions::{
    all_scales_report, doubling_scale_finder, enumerate_progression, free_group_bounds, growth_profile,
    nilprogression_check, ProgressionSpec,
};
use agtk::setcalc::{
    approx_constant, doubling_report, escape_norm, escape_profile, ruzsa_cover, ruzsa_distance, sumproduct_stats,
    triangle_slack,
};
use agtk::structure::{detect_small_doubling, detect_unit_doubling, hamidoune_cover};
use agtk::verify::{run_battery, Battery, SweepOptions};
use agtk::{fixtures, Caps, ElementSet, Error, Group, GroupSpec, Rat, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "agtk", version, about = "Exact experiments on approximate groups")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed for every randomized sweep.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Override the element cap for materialized sets and BFS.
    #[arg(long, global = true)]
    cap_elements: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Caps as a JSON object, inline or a file path.
    #[arg(long, global = true)]
    caps: Option<String>,
    /// Fixture directory.
    #[arg(long, global = true)]
    fixtures: Option<PathBuf>,
    /// Recompute and rewrite every fixture before running.
    #[arg(long, global = true)]
    refresh_fixtures: bool,
    /// Compare stored fixtures with fresh values; drift is a violation.
    #[arg(long, global = true)]
    check_fixtures: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Describe a group; optionally evaluate one arithmetic operation.
    Group {
        #[arg(long)]
        group: String,
        #[arg(long, value_enum)]
        op: Option<GroupOp>,
        /// JSON array of element literals.
        #[arg(long)]
        args: Option<String>,
        /// List every element (finite groups only).
        #[arg(long)]
        elements: bool,
    },
    /// Product-set statistics of element sets.
    Set {
        #[arg(value_enum)]
        op: SetOp,
        #[arg(long)]
        group: Option<String>,
        /// JSON array of element literals.
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        c: Option<String>,
        /// Element literal for `escape`.
        #[arg(long)]
        element: Option<String>,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        /// Exact minimal cover in `approx`.
        #[arg(long)]
        exact: bool,
        /// Rational threshold for `small-doubling`.
        #[arg(long, default_value = "3/2")]
        threshold: String,
        /// Prime for `sum-product`.
        #[arg(long)]
        p: Option<u64>,
        /// Residues for `sum-product`, comma separated.
        #[arg(long, value_delimiter = ',')]
        residues: Vec<u64>,
        /// Search all k-subsets of the field for the minimizer in `sum-product`.
        #[arg(long)]
        minimize_k: Option<usize>,
    },
    /// Run a verification battery over a group family.
    Verify {
        #[arg(value_enum)]
        battery: BatteryArg,
        /// Exhaustive family: cyclic groups and S3, D4, Q8 up to this order.
        #[arg(long, default_value_t = 10)]
        max_order: u64,
        /// Randomized instances for sampled batteries.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Growth of |Sⁿ|, doubling scales and all-scales covering constants.
    Growth {
        #[arg(long)]
        group: String,
        #[arg(long)]
        s: String,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        /// Slope window `lo,hi`.
        #[arg(long, value_delimiter = ',')]
        window: Vec<usize>,
        /// Least n with |S^{4n}| ≤ 5^D|Sⁿ|, D rational.
        #[arg(long)]
        doubling_scale: Option<String>,
        /// Range `lo,hi` for greedy covering constants of Sᵐ.
        #[arg(long, value_delimiter = ',')]
        all_scales: Vec<usize>,
        /// Exponent n for the free-group lower bound on |Sⁿ|.
        #[arg(long)]
        free_bound: Option<u32>,
    },
    /// Nilprogression report for a progression spec given as JSON.
    Nilprog {
        #[arg(long)]
        group: String,
        /// JSON object {"generators", "lengths", "kernel"?}, inline or a file path.
        #[arg(long)]
        spec: String,
        /// Tabulate |Pⁿ| up to this n.
        #[arg(long, default_value_t = 2)]
        growth: usize,
    },
    /// Cayley graph ball sizes and diameter.
    Diameter {
        #[arg(long)]
        group: String,
        /// Generating set; default the symmetrized standard generators.
        #[arg(long)]
        s: Option<String>,
    },
    /// Spectral gap of the normalized Laplacian.
    Spectral {
        #[arg(long)]
        group: String,
        #[arg(long)]
        s: Option<String>,
    },
    /// Diameter table for PSL₂(p).
    Babai {
        #[arg(long, value_delimiter = ',', default_values_t = vec![3u64, 5, 7, 11])]
        primes: Vec<u64>,
    },
    /// Scaling-limit reports: a family sweep or one graph against a torus.
    Limit {
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<u64>,
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        s: Option<String>,
        /// Torus model JSON {"q", "norm"} for `--group`.
        #[arg(long)]
        torus: Option<String>,
        /// Write the rescaled distance matrix of `--group` as CSV.
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GroupOp {
    Mul,
    Inv,
    Canonicalize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SetOp {
    Doubling,
    Ruzsa,
    Triangle,
    Cover,
    Approx,
    Escape,
    EscapeProfile,
    UnitDoubling,
    SmallDoubling,
    Hamidoune,
    SumProduct,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BatteryArg {
    UnitDoubling,
    Freiman,
    Hamidoune,
    Schreier,
    DenseGeneration,
    StrongApprox,
}

impl From<BatteryArg> for Battery {
    fn from(b: BatteryArg) -> Battery {
        match b {
            BatteryArg::UnitDoubling => Battery::UnitDoubling,
            BatteryArg::Freiman => Battery::Freiman,
            BatteryArg::Hamidoune => Battery::Hamidoune,
            BatteryArg::Schreier => Battery::Schreier,
            BatteryArg::DenseGeneration => Battery::DenseGeneration,
            BatteryArg::StrongApprox => Battery::StrongApprox,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Cycles,
    SquareGrid,
    HeisenbergQuotient,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Cycles => Family::Cycles,
            FamilyArg::SquareGrid => Family::SquareGrid,
            FamilyArg::HeisenbergQuotient => Family::HeisenbergQuotient,
        }
    }
}

/// A command result: the JSON document, the rows used for CSV output, and
/// whether it reports a violated property.
struct Output {
    doc: Value,
    rows: Option<Vec<Value>>,
    violated: bool,
}

impl Output {
    fn new(doc: impl Serialize) -> Result<Output> {
        Ok(Output {
            doc: serde_json::to_value(doc)?,
            rows: None,
            violated: false,
        })
    }

    /// CSV rows are the array at `key` of the document.
    fn table(mut self, key: &str) -> Output {
        self.rows = self.doc[key].as_array().cloned();
        self
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            if let Error::Violation { property, witness } = &e {
                println!("{}", pretty(&json!({"violation": property, "witness": witness})));
            }
            eprintln!("agtk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let g = &cli.global;
    let caps = caps(g)?;
    if let Some(n) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    let dir = g.fixtures.clone().unwrap_or_else(fixtures::default_dir);
    let mut out = Vec::new();
    if g.refresh_fixtures {
        for p in fixtures::refresh(&dir)? {
            eprintln!("agtk: wrote {}", p.display());
        }
    }
    if g.check_fixtures {
        let rows = fixtures::check(&dir)?;
        let drift = rows.iter().any(|r| r.status != fixtures::Status::Match);
        let mut o = Output::new(json!({"version": fixtures::VERSION, "fixtures": rows}))?.table("fixtures");
        o.violated = drift;
        out.push(o);
    }
    match &cli.command {
        Some(c) => out.push(dispatch(c, g, &caps)?),
        None if g.refresh_fixtures || g.check_fixtures => {}
        None => return Err(Error::InvalidInput("no subcommand given (see --help)".into())),
    }
    let mut stdout = std::io::stdout().lock();
    let mut violated = false;
    for o in out {
        violated |= o.violated;
        let text = match g.format {
            Format::Json => pretty(&o.doc),
            Format::Csv => csv_text(&o)?,
        };
        stdout.write_all(text.as_bytes())?;
    }
    stdout.flush()?;
    Ok(if violated { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

fn caps(g: &Global) -> Result<Caps> {
    let mut caps = match &g.caps {
        Some(text) => serde_json::from_str(&inline_or_file(text)?)?,
        None => Caps::default(),
    };
    if let Some(n) = g.cap_elements {
        caps.max_elements = n;
    }
    Ok(caps)
}

/// A JSON argument given inline, or the contents of the named file.
fn inline_or_file(text: &str) -> Result<String> {
    let t = text.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(text.to_string())
    } else {
        Ok(std::fs::read_to_string(text)?)
    }
}

fn json_arg(text: &str) -> Result<Value> {
    Ok(serde_json::from_str(&inline_or_file(text)?)?)
}

fn group(spec: &str, caps: &Caps) -> Result<Group> {
    let spec = if spec.trim_start().starts_with('{') {
        GroupSpec::parse(spec)?
    } else if std::path::Path::new(spec).is_file() {
        GroupSpec::parse(&std::fs::read_to_string(spec)?)?
    } else {
        GroupSpec::parse(spec)?
    };
    Group::with_caps(spec, caps.clone())
}

fn set(g: &Group, text: &Option<String>, name: &str) -> Result<ElementSet> {
    let text = text
        .as_ref()
        .ok_or_else(|| Error::InvalidInput(format!("missing --{name}")))?;
    ElementSet::from_json(g, &json_arg(text)?)
}

fn need<'a, T>(x: &'a Option<T>, name: &str) -> Result<&'a T> {
    x.as_ref()
        .ok_or_else(|| Error::InvalidInput(format!("missing --{name}")))
}

fn rat(text: &str) -> Result<Rat> {
    text.parse::<Rat>()
        .map_err(|_| Error::InvalidInput(format!("`{text}` is not a rational number")))
}

fn pair(v: &[usize], name: &str) -> Result<(usize, usize)> {
    match v {
        [lo, hi] if lo <= hi => Ok((*lo, *hi)),
        _ => Err(Error::InvalidInput(format!("--{name} takes `lo,hi` with lo ≤ hi"))),
    }
}

fn cayley(g: &Group, s: &Option<String>) -> Result<CayleyGraph> {
    match s {
        Some(_) => CayleyGraph::build(g, &set(g, s, "s")?),
        None => CayleyGraph::standard(g),
    }
}

fn dispatch(c: &Command, opts: &Global, caps: &Caps) -> Result<Output> {
    match c {
        Command::Group {
            group: spec,
            op,
            args,
            elements,
        } => {
            let g = group(spec, caps)?;
            let result = match op {
                Some(op) => {
                    let raw = json_arg(need(args, "args")?)?;
                    let raw = raw
                        .as_array()
                        .ok_or_else(|| Error::InvalidInput("--args must be a JSON array".into()))?;
                    let parsed = raw.iter().map(|x| g.parse_element(x)).collect::<Result<Vec<_>>>()?;
                    let op = match op {
                        GroupOp::Mul => agtk::group::ArithOp::Mul,
                        GroupOp::Inv => agtk::group::ArithOp::Inv,
                        GroupOp::Canonicalize => agtk::group::ArithOp::Canonicalize,
                    };
                    Some(g.to_json(&g.arith(op, &parsed)?))
                }
                None => None,
            };
            let elems = if *elements {
                Some(ElementSet::whole(&g)?.to_json())
            } else {
                None
            };
            let gens: Vec<Value> = g.standard_generators().iter().map(|e| g.to_json(e)).collect();
            Output::new(json!({
                "spec": g.spec(),
                "kind": g.spec().kind_name(),
                "finite": g.is_finite(),
                "order": g.order().map(|o| o.to_string()),
                "abelian": g.is_abelian(),
                "identity": g.to_json(g.identity()),
                "generators": gens,
                "result": result,
                "elements": elems,
            }))
        }
        Command::Set {
            op,
            group: spec,
            a,
            b,
            c,
            element,
            n_max,
            exact,
            threshold,
            p,
            residues,
            minimize_k,
        } => {
            if let SetOp::SumProduct = op {
                return Output::new(sumproduct_stats(*need(p, "p")?, residues, *minimize_k)?);
            }
            let g = group(need(spec, "group")?, caps)?;
            let a = set(&g, a, "a")?;
            match op {
                SetOp::Doubling => Ok(Output::new(doubling_report(&a, *n_max)?)?.table("powers")),
                SetOp::Ruzsa => {
                    let b = set(&g, b, "b")?;
                    let d = ruzsa_distance(&a, &b)?;
                    Output::new(json!({"value": d, "ratio": d.ratio(), "distance": d.distance()}))
                }
                SetOp::Triangle => {
                    let (b, c) = (set(&g, b, "b")?, set(&g, c, "c")?);
                    let slack = triangle_slack(&a, &b, &c)?;
                    Output::new(json!({"slack": slack, "holds": slack >= Rat::one()}))
                }
                SetOp::Cover => Output::new(ruzsa_cover(&a, &set(&g, b, "b")?)?),
                SetOp::Approx => Output::new(approx_constant(&a, *exact)?),
                SetOp::Escape => {
                    let e = g.parse_canonical(&json_arg(need(element, "element")?)?)?;
                    Output::new(escape_norm(&a, &e)?)
                }
                SetOp::EscapeProfile => Output::new(escape_profile(&a)?),
                SetOp::UnitDoubling => Output::new(json!({"structure": detect_unit_doubling(&a)?})),
                SetOp::SmallDoubling => Output::new(json!({"structure": detect_small_doubling(&a, &rat(threshold)?)?})),
                SetOp::Hamidoune => match hamidoune_cover(&a)? {
                    Some(cover) => Output::new(json!({"cover": cover})),
                    None => Err(Error::violation(
                        "coset cover of size at most 1/(2-K) by a subgroup of order at most |A|",
                        json!({"group": g.spec(), "a": a.to_json()}),
                    )),
                },
                SetOp::SumProduct => unreachable!(),
            }
        }
        Command::Verify {
            battery,
            max_order,
            samples,
        } => {
            let sweep = SweepOptions {
                max_order: *max_order,
                samples: *samples,
                seed: opts.seed,
                caps: caps.clone(),
            };
            let report = run_battery((*battery).into(), &sweep)?;
            let violated = report.violations > 0;
            let mut o = Output::new(&report)?.table("groups");
            o.violated = violated;
            Ok(o)
        }
        Command::Growth {
            group: spec,
            s,
            n_max,
            window,
            doubling_scale,
            all_scales,
            free_bound,
        } => {
            let g = group(spec, caps)?;
            let s = set(&g, &Some(s.clone()), "s")?;
            let window = if window.is_empty() {
                ((*n_max / 2).max(1), *n_max)
            } else {
                pair(window, "window")?
            };
            let profile = growth_profile(&s, *n_max, window)?;
            let scale = match doubling_scale {
                Some(d) => Some(json!({"d": rat(d)?, "n": doubling_scale_finder(&s, &rat(d)?, *n_max)?})),
                None => None,
            };
            let scales = if all_scales.is_empty() {
                None
            } else {
                Some(all_scales_report(&s, pair(all_scales, "all-scales")?)?)
            };
            let free = match free_bound {
                Some(n) => Some(free_group_bounds(&s, *n)?),
                None => None,
            };
            Ok(Output::new(json!({
                "table": profile.table,
                "window": profile.window,
                "slope": profile.slope,
                "stabilized_at": profile.stabilized_at,
                "doubling_scale": scale,
                "all_scales": scales,
                "free_group": free,
            }))?
            .table("table"))
        }
        Command::Nilprog {
            group: spec,
            spec: p,
            growth,
        } => {
            let g = group(spec, caps)?;
            let spec = ProgressionSpec::from_json(&g, &json_arg(p)?)?;
            let report = nilprogression_check(&spec)?;
            let p = enumerate_progression(&spec)?;
            let table = growth_profile(&p, *growth, (1, (*growth).max(1)))?.table;
            let mut o = Output::new(json!({"report": report, "growth": table}))?;
            o.rows = Some(vec![serde_json::to_value(&report)?]);
            Ok(o)
        }
        Command::Diameter { group: spec, s } => {
            let g = group(spec, caps)?;
            Ok(Output::new(ball_diameter(&cayley(&g, s)?)?)?.table("balls"))
        }
        Command::Spectral { group: spec, s } => {
            let g = group(spec, caps)?;
            let r = spectral_gap(&cayley(&g, s)?)?;
            let mut o = Output::new(&r)?;
            o.rows = Some(vec![o.doc.clone()]);
            Ok(o)
        }
        Command::Babai { primes } => Ok(Output::new(babai_report(primes, caps)?)?.table("rows")),
        Command::Limit {
            family,
            sizes,
            group: spec,
            s,
            torus,
            dump_matrix,
        } => match (family, spec) {
            (Some(f), None) => {
                if sizes.is_empty() {
                    return Err(Error::InvalidInput("missing --sizes".into()));
                }
                Ok(Output::new(torus_limit_report((*f).into(), sizes, caps)?)?.table("rows"))
            }
            (None, Some(spec)) => {
                let g = group(spec, caps)?;
                let x = cayley(&g, s)?;
                if let Some(path) = dump_matrix {
                    let (space, _) = rescaled_space(&x)?;
                    write_matrix(path, &space)?;
                }
                let gh = match torus {
                    Some(t) => Some(gh_bounds_torus(&x, &TorusModel::from_json(&json_arg(t)?)?)?),
                    None => None,
                };
                Output::new(json!({
                    "condition": agtk::limits::condition_values(&x),
                    "gh": gh,
                }))
            }
            _ => Err(Error::InvalidInput("give exactly one of --family or --group".into())),
        },
    }
}

fn write_matrix(path: &std::path::Path, x: &agtk::limits::FiniteMetricSpace) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header = vec![String::new()];
    header.extend(x.labels.iter().cloned());
    w.write_record(&header).map_err(csv_err)?;
    for i in 0..x.len() {
        let mut row = vec![x.labels[i].clone()];
        row.extend((0..x.len()).map(|j| match x.exact(i, j) {
            Some(r) => r.to_string(),
            None => x.d(i, j).to_string(),
        }));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// One CSV cell: rationals as `num/den`, other compound values as compact JSON.
fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Object(m) if is_rational(m) => {
            format!("{}/{}", cell(&m["num"]), cell(&m["den"]))
        }
        _ => v.to_string(),
    }
}

fn is_rational(m: &serde_json::Map<String, Value>) -> bool {
    m.len() == 2 && m.contains_key("num") && m.contains_key("den")
}

/// Flattens nested objects into dotted columns; rationals stay one cell.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) if !is_rational(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        _ => out.push((prefix.to_string(), cell(v))),
    }
}

/// CSV of the output's rows (columns from the first row), or a `key,value`
/// listing of the flattened document when there is no table.
fn csv_text(o: &Output) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match &o.rows {
        Some(rows) if !rows.is_empty() && rows.iter().all(Value::is_object) => {
            let flat: Vec<Vec<(String, String)>> = rows
                .iter()
                .map(|r| {
                    let mut f = Vec::new();
                    flatten("", r, &mut f);
                    f
                })
                .collect();
            w.write_record(flat[0].iter().map(|(k, _)| k)).map_err(csv_err)?;
            for f in &flat {
                w.write_record(f.iter().map(|(_, v)| v)).map_err(csv_err)?;
            }
        }
        _ => {
            w.write_record(["key", "value"]).map_err(csv_err)?;
            let mut f = Vec::new();
            flatten("", &o.doc, &mut f);
            for (k, v) in f {
                w.write_record([k, v]).map_err(csv_err)?;
            }
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 cells is utf-8"))
}
