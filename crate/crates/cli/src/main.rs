//! `poset-cube`: inclusion representations of finite posets from the
//! command line.
//!
//! Exit codes: 0 success or true, 1 false, 2 input error, 3 brute-force cap
//! exceeded, 4 inconclusive (time budget).

mod dot;

use std::fs;
use std::io::{ErrorKind, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use poset_cube::characterization::{check_property, in_mcw, in_miir, in_mtd, in_nmiir, Property};
use poset_cube::generators::{
    enumerate_forms, gen_basic, gen_equivalence_example, gen_example_1_4, gen_sigma, BasicKind, SigmaSpec,
};
use poset_cube::poset::{block_decomposition, component_decomposition, parse_poset, write_poset, Poset};
use poset_cube::representation::{
    canonical_representation, parse_representation, representation_to_json, validate_representation,
    Representation,
};
use poset_cube::solvers::{MethodChoice, Param, SolveError, Solver};
use poset_cube::verify::{self, Status, VerifyConfig, SCHEMA};

#[derive(Parser)]
#[command(
    name = "poset-cube",
    version,
    about = "Cube height, 2-dimension, cube width and irreducible representations of finite posets"
)]
struct Cli {
    /// Wall-clock budget in seconds for each solver call.
    #[arg(long, global = true, value_name = "SECS")]
    time_budget: Option<f64>,
    /// Largest poset handed to the brute-force search (default 8, or POSET_CUBE_CAP).
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute ch, dim2, cw and iir.
    Params {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Include a representation attaining each value.
        #[arg(long)]
        witness: bool,
    },
    /// Test a property or class membership; exit 0 if it holds, 1 if not.
    Check {
        file: PathBuf,
        #[arg(long, short, value_enum)]
        property: PropertyArg,
    },
    /// Block or component decomposition.
    #[command(group(ArgGroup::new("kind").args(["blocks", "components"])))]
    Decompose {
        file: PathBuf,
        /// Vertical-sum decomposition into blocks (default).
        #[arg(long)]
        blocks: bool,
        /// Disjoint-sum decomposition into components.
        #[arg(long)]
        components: bool,
    },
    /// Work with representations.
    Rep {
        #[arg(value_enum)]
        action: RepAction,
        file: PathBuf,
        /// Representation JSON; required by validate, reduce and irreducible.
        rep_file: Option<PathBuf>,
    },
    /// Write a named poset in the text format.
    Gen(GenArgs),
    /// Write one file per isomorphism type of n-element posets.
    Enumerate {
        n: usize,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Run the invariant suite.
    Verify {
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        #[arg(long, default_value_t = 50)]
        sample_n6: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        random_reps: usize,
    },
    /// Hasse diagram in DOT, optionally labelled with a representation.
    Dot {
        file: PathBuf,
        rep_file: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    kind: GenKind,
    /// Size for chain, antichain, v, lambda and b.
    #[arg(long, default_value_t = 3)]
    size: usize,
    /// Parameter of example-1-4.
    #[arg(long, default_value_t = 3)]
    t: usize,
    /// Minimal count and sequence for sigma, e.g. `--n 3 --a 1,3,3`.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    a: Vec<usize>,
    /// Parameters of equivalence.
    #[arg(long, default_value_t = 4)]
    s: usize,
    #[arg(long, default_value_t = 3)]
    i: usize,
    /// Poset output file instead of standard output.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Where equivalence writes its representation.
    #[arg(long)]
    rep_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Brute,
    Decompose,
}

#[derive(Clone, Copy, ValueEnum)]
enum PropertyArg {
    NoChainBlock,
    TwoDown,
    ParallelPair,
    Miir,
    Nmiir,
    Mtd,
    Mcw,
}

#[derive(Clone, Copy, ValueEnum)]
enum RepAction {
    Canonical,
    Validate,
    Reduce,
    Irreducible,
    MaxIrreducible,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Chain,
    Antichain,
    V,
    Lambda,
    Z,
    B,
    #[value(name = "example-1-4")]
    Example14,
    Sigma,
    Figure2,
    Equivalence,
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn input(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: 2,
            error: error.into(),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match e {
            SolveError::CapExceeded { .. } | SolveError::TooLarge(_) => 3,
            SolveError::Timeout => 4,
            SolveError::Rep(_) => 2,
        };
        Failure {
            code,
            error: e.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 2, error }
    }
}

type Outcome = Result<u8, Failure>;

fn read_text(path: &Path) -> anyhow::Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_poset(path: &Path) -> anyhow::Result<Poset> {
    parse_poset(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn read_rep(p: &Poset, path: Option<&PathBuf>) -> anyhow::Result<Representation> {
    let path = path.ok_or_else(|| anyhow!("this action needs a representation file"))?;
    parse_representation(p, &read_text(path)?).with_context(|| format!("in {}", path.display()))
}

/// Writes to standard output; a closed pipe ends the process quietly.
fn emit(text: &str) {
    if let Err(e) = std::io::stdout().lock().write_all(text.as_bytes()) {
        if e.kind() == ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: writing output: {e}");
        std::process::exit(2);
    }
}

fn with_schema(v: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    match v {
        Value::Object(rest) => m.extend(rest),
        other => {
            m.insert("value".into(), other);
        }
    }
    Value::Object(m)
}

fn print_json(v: Value) {
    emit(&format!(
        "{}\n",
        serde_json::to_string_pretty(&with_schema(v)).expect("serializable")
    ));
}

fn rep_json(p: &Poset, r: &Representation) -> Value {
    with_schema(representation_to_json(p, r))
}

fn rep_text(p: &Poset, r: &Representation) -> String {
    p.elements()
        .map(|x| format!("{}:{{{}}}", p.label(x), r.set_labels(x).join(",")))
        .collect::<Vec<_>>()
        .join(" ")
}

fn params(cli: &Cli, solver: &Solver, file: &Path, method: MethodArg, witness: bool) -> Outcome {
    let p = read_poset(file)?;
    let choice = match method {
        MethodArg::Auto => MethodChoice::Auto,
        MethodArg::Brute => MethodChoice::Brute,
        MethodArg::Decompose => MethodChoice::Decompose,
    };
    let r = solver.params(&p, choice)?;
    if cli.json {
        print_json(r.to_json(&p, witness));
        return Ok(0);
    }
    let method = serde_json::to_value(r.method).expect("serializable");
    emit(&format!("n       {}\n", r.n));
    emit(&format!("method  {}\n", method.as_str().unwrap_or_default()));
    for (name, w) in [
        ("ch", Param::Ch),
        ("dim2", Param::Dim2),
        ("cw", Param::Cw),
        ("iir", Param::Iir),
    ] {
        emit(&format!("{name:<7} {}\n", r.value(w)));
        if witness {
            emit(&format!("        {}\n", rep_text(&p, r.witness(w))));
        }
    }
    Ok(0)
}

fn check(file: &Path, property: PropertyArg) -> Outcome {
    let p = read_poset(file)?;
    let report = match property {
        PropertyArg::NoChainBlock => check_property(&p, Property::NoBlockIsChain),
        PropertyArg::TwoDown => check_property(&p, Property::TwoDown),
        PropertyArg::ParallelPair => check_property(&p, Property::ParallelPair),
        PropertyArg::Miir => in_miir(&p),
        PropertyArg::Nmiir => in_nmiir(&p),
        PropertyArg::Mtd => in_mtd(&p),
        PropertyArg::Mcw => in_mcw(&p),
    };
    print_json(serde_json::to_value(&report).expect("serializable"));
    Ok(if report.holds { 0 } else { 1 })
}

fn decompose(cli: &Cli, file: &Path, components: bool) -> Outcome {
    let p = read_poset(file)?;
    let (kind, d) = if components {
        ("component", component_decomposition(&p))
    } else {
        ("block", block_decomposition(&p))
    };
    if cli.json {
        let parts: Vec<Value> = d
            .parts
            .iter()
            .map(|q| json!({"elements": q.labels(), "chain": q.is_chain(), "poset": write_poset(q)}))
            .collect();
        print_json(json!({"kind": kind, "parts": parts}));
    } else {
        for (i, q) in d.parts.iter().enumerate() {
            let tag = if q.is_chain() { " (chain)" } else { "" };
            emit(&format!("{kind} {}: {}{tag}\n", i + 1, q.labels().join(" ")));
        }
    }
    Ok(0)
}

fn rep(solver: &Solver, action: RepAction, file: &Path, rep_file: Option<&PathBuf>) -> Outcome {
    let p = read_poset(file)?;
    match action {
        RepAction::Canonical => {
            print_json(rep_json(&p, &canonical_representation(&p)));
            Ok(0)
        }
        RepAction::Validate => {
            let r = read_rep(&p, rep_file)?;
            validate_representation(&p, &r).map_err(Failure::input)?;
            print_json(json!({"valid": true, "ground_size": r.ground_size()}));
            Ok(0)
        }
        RepAction::Reduce => {
            let r = read_rep(&p, rep_file)?;
            print_json(rep_json(&p, &solver.reduce_to_irreducible(&p, &r)?));
            Ok(0)
        }
        RepAction::Irreducible => {
            let r = read_rep(&p, rep_file)?;
            let v = solver.is_irreducible(&p, &r)?;
            let witness = v.witness.as_ref().map(|w| representation_to_json(&p, w));
            print_json(json!({"irreducible": v.irreducible, "strict_reduction": witness}));
            Ok(if v.irreducible { 0 } else { 1 })
        }
        RepAction::MaxIrreducible => {
            let c = solver.iir(&p)?;
            let mut v = representation_to_json(&p, &c.witness);
            v["iir"] = json!(c.value);
            print_json(v);
            Ok(0)
        }
    }
}

fn gen(g: &GenArgs) -> Outcome {
    let (size, s, i) = (g.size, g.s, g.i);
    let basic = |k| gen_basic(k, size).map_err(Failure::input);
    let p = match g.kind {
        GenKind::Chain => basic(BasicKind::Chain)?,
        GenKind::Antichain => basic(BasicKind::Antichain)?,
        GenKind::V => basic(BasicKind::V)?,
        GenKind::Lambda => basic(BasicKind::Lambda)?,
        GenKind::Z => basic(BasicKind::Z)?,
        GenKind::B => basic(BasicKind::B)?,
        GenKind::Example14 => gen_example_1_4(g.t).map_err(Failure::input)?,
        GenKind::Figure2 => gen_sigma(&SigmaSpec::figure_2()).map_err(Failure::input)?,
        GenKind::Sigma => {
            let n = g.n.ok_or_else(|| anyhow!("sigma needs --n"))?;
            let spec = SigmaSpec::new(n, g.a.clone()).map_err(Failure::input)?;
            gen_sigma(&spec).map_err(Failure::input)?
        }
        GenKind::Equivalence => {
            let (p, r) = gen_equivalence_example(s, i).map_err(Failure::input)?;
            if let Some(path) = &g.rep_out {
                let text = serde_json::to_string_pretty(&rep_json(&p, &r)).expect("serializable");
                fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
            }
            p
        }
    };
    let text = write_poset(&p);
    match &g.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => emit(&text),
    }
    Ok(0)
}

fn enumerate(cli: &Cli, n: usize, out: &Path) -> Outcome {
    let forms = enumerate_forms(n).map_err(Failure::input)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut names = Vec::with_capacity(forms.len());
    for f in &forms {
        let name = format!("{}.poset", f.to_hex());
        let path = out.join(&name);
        fs::write(&path, write_poset(&f.to_poset()))
            .with_context(|| format!("writing {}", path.display()))?;
        names.push(name);
    }
    if cli.json {
        print_json(json!({"n": n, "count": forms.len(), "files": names}));
    } else {
        emit(&format!(
            "{} posets on {n} elements written to {}\n",
            forms.len(),
            out.display()
        ));
    }
    Ok(0)
}

fn run_verify(cli: &Cli, cfg: VerifyConfig) -> Outcome {
    let report = verify::run(&cfg).map_err(Failure::input)?;
    if cli.json {
        emit(&format!(
            "{}\n",
            serde_json::to_string_pretty(&report.to_json()).expect("serializable")
        ));
    } else {
        emit(&report.render());
    }
    Ok(match report.status() {
        Status::Pass => 0,
        Status::Fail => 1,
        Status::Inconclusive => 4,
    })
}

fn dot(file: &Path, rep_file: Option<&PathBuf>) -> Outcome {
    let p = read_poset(file)?;
    let r = match rep_file {
        Some(_) => Some(read_rep(&p, rep_file)?),
        None => None,
    };
    emit(&dot::hasse(&p, r.as_ref()));
    Ok(0)
}

fn run(cli: &Cli) -> Outcome {
    let budget = match cli.time_budget {
        Some(s) if !(s.is_finite() && s > 0.0) => {
            return Err(Failure::input(anyhow!(
                "--time-budget must be a positive number of seconds"
            )))
        }
        s => s.map(Duration::from_secs_f64),
    };
    let mut solver = Solver::from_env().with_time_budget(budget);
    if let Some(cap) = cli.cap {
        solver = solver.with_cap(cap);
    }
    match &cli.command {
        Command::Params {
            file,
            method,
            witness,
        } => params(cli, &solver, file, *method, *witness),
        Command::Check { file, property } => check(file, *property),
        Command::Decompose { file, components, .. } => decompose(cli, file, *components),
        Command::Rep {
            action,
            file,
            rep_file,
        } => rep(&solver, *action, file, rep_file.as_ref()),
        Command::Gen(g) => gen(g),
        Command::Enumerate { n, out } => enumerate(cli, *n, out),
        Command::Verify {
            max_n,
            sample_n6,
            seed,
            random_reps,
        } => run_verify(
            cli,
            VerifyConfig {
                max_n: *max_n,
                sample_n6: *sample_n6,
                seed: *seed,
                random_reps: *random_reps,
                time_budget: budget,
            },
        ),
        Command::Dot { file, rep_file } => dot(file, rep_file.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
