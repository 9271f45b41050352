use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kab_core::analysis::{dependency_graph, is_weakly_acyclic};
use kab_core::mucalc::is_it_fragment;
use kab_core::ts::export::{to_dot, to_json};
use kab_core::{
    b_repairs, build_ts, c_repair, model_check, parse_abox, parse_kab, parse_properties,
    parse_property, tau, BuildError, BuildLimits, KabSpec, MuFormula, ParseError, QueryMode,
    Reasoner, Semantics, TransitionSystem,
};
use thiserror::Error;

const EXIT_FALSE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_LIMIT: u8 = 3;

#[derive(Parser)]
#[command(name = "kab", version, about = "Verification of knowledge and action bases over DL-Lite_A")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that the initial ABox is consistent with the TBox.
    Check { kab: PathBuf },
    /// Decide weak acyclicity of the dependency graph.
    Wa {
        kab: PathBuf,
        /// Write the dependency graph in DOT format (`-` for stdout).
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Build the transition system under one semantics.
    Build {
        kab: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Write the system in DOT format (`-` for stdout).
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the system as JSON (`-` for stdout).
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Model check every property of a property file.
    Verify {
        kab: PathBuf,
        prop: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// How embedded queries are answered; defaults to cqa under `it`, certain otherwise.
        #[arg(long, value_name = "certain|cqa")]
        query_mode: Option<QueryMode>,
        /// Reject properties outside the inconsistency-tolerant fragment under b, c, eb and ec.
        #[arg(long)]
        require_it_fragment: bool,
    },
    /// Print the repairs of an ABox with respect to the KAB's TBox.
    Repairs {
        kab: PathBuf,
        #[arg(long)]
        abox: PathBuf,
        #[arg(long, value_enum)]
        kind: RepairKindArg,
    },
    /// Print the translation of every property into the inconsistency-tolerant fragment.
    TranslateTau { prop: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    /// One of standard, b, c, eb, ec, it.
    #[arg(long, value_name = "SEMANTICS")]
    semantics: Semantics,
    #[arg(long, value_name = "N")]
    max_states: Option<usize>,
    #[arg(long, value_name = "N")]
    max_depth: Option<usize>,
    #[arg(long, value_name = "N")]
    max_run_domain: Option<usize>,
}

impl RunArgs {
    fn limits(&self) -> BuildLimits {
        let d = BuildLimits::default();
        BuildLimits {
            max_states: self.max_states.or(d.max_states),
            max_depth: self.max_depth.or(d.max_depth),
            max_run_domain: self.max_run_domain.or(d.max_run_domain),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RepairKindArg {
    B,
    C,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Build(#[from] BuildError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Build(BuildError::LimitExceeded { .. }) => EXIT_LIMIT,
            CliError::Build(BuildError::InconsistentInitialAbox) => EXIT_FALSE,
            _ => EXIT_USAGE,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if path == Path::new("-") {
        print!("{text}");
        if !text.ends_with('\n') {
            println!();
        }
        return Ok(());
    }
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_kab(path: &Path) -> Result<KabSpec, CliError> {
    parse_kab(&read(path)?).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// A property file, or a single unnamed formula.
fn load_props(path: &Path) -> Result<Vec<(String, MuFormula)>, CliError> {
    let text = read(path)?;
    parse_properties(&text)
        .or_else(|e| match parse_property(&text) {
            Ok(f) => Ok(vec![("property".to_string(), f)]),
            Err(_) => Err(e),
        })
        .map_err(|source| CliError::Parse {
            path: path.to_path_buf(),
            source,
        })
}

fn print_labels(spec: &KabSpec) {
    for c in spec.tbox.constraints() {
        println!("{}: {}", c.label, c.constraint);
    }
}

fn check(kab: &Path) -> Result<u8, CliError> {
    let spec = load_kab(kab)?;
    print_labels(&spec);
    let violated = Reasoner::new(spec.tbox.clone()).viol(&spec.a0);
    if violated.is_empty() {
        println!("consistent");
        Ok(0)
    } else {
        let labels: Vec<String> = violated.into_iter().collect();
        println!("inconsistent: violates {}", labels.join(", "));
        Ok(EXIT_FALSE)
    }
}

fn wa(kab: &Path, dot: Option<&Path>) -> Result<u8, CliError> {
    let g = dependency_graph(&load_kab(kab)?);
    if let Some(p) = dot {
        write(p, &g.to_dot())?;
    }
    if is_weakly_acyclic(&g) {
        println!("weakly acyclic");
        Ok(0)
    } else {
        println!("not weakly acyclic");
        Ok(EXIT_FALSE)
    }
}

fn build_system(spec: &KabSpec, run: &RunArgs) -> Result<TransitionSystem, CliError> {
    Ok(build_ts(spec, run.semantics, run.limits())?)
}

fn build(kab: &Path, run: &RunArgs, dot: Option<&Path>, json: Option<&Path>) -> Result<u8, CliError> {
    let ts = build_system(&load_kab(kab)?, run)?;
    if let Some(p) = dot {
        write(p, &to_dot(&ts))?;
    }
    if let Some(p) = json {
        write(p, &to_json(&ts))?;
    }
    eprintln!(
        "{}: {} states, {} edges, {} values",
        ts.semantics(),
        ts.len(),
        ts.edges().len(),
        ts.active_domain().len()
    );
    Ok(0)
}

fn verify(
    kab: &Path,
    prop: &Path,
    run: &RunArgs,
    query_mode: Option<QueryMode>,
    require_it: bool,
) -> Result<u8, CliError> {
    let spec = load_kab(kab)?;
    let props = load_props(prop)?;
    if run.semantics.is_two_step() {
        for (name, f) in &props {
            if is_it_fragment(f) {
                continue;
            }
            if require_it {
                return Err(CliError::Usage(format!(
                    "`{name}` is outside the inconsistency-tolerant fragment"
                )));
            }
            eprintln!("warning: `{name}` is outside the inconsistency-tolerant fragment; intermediate states are observable");
        }
    }
    let ts = build_system(&spec, run)?;
    let mode = query_mode.unwrap_or(ts.query_mode());
    let mut all = true;
    for (name, f) in &props {
        let r = model_check(&ts, f, mode).map_err(|e| CliError::Usage(format!("{name}: {e}")))?;
        println!("{name}: {}", r.verdict);
        all &= r.verdict;
    }
    Ok(if all { 0 } else { EXIT_FALSE })
}

fn repairs(kab: &Path, abox: &Path, kind: RepairKindArg) -> Result<u8, CliError> {
    let spec = load_kab(kab)?;
    let a = parse_abox(&read(abox)?).map_err(|source| CliError::Parse {
        path: abox.to_path_buf(),
        source,
    })?;
    match kind {
        RepairKindArg::B => {
            for r in b_repairs(&a, &spec.tbox).iter() {
                println!("{r}");
            }
        }
        RepairKindArg::C => println!("{}", c_repair(&a, &spec.tbox)),
    }
    Ok(0)
}

fn translate_tau(prop: &Path) -> Result<u8, CliError> {
    for (name, f) in load_props(prop)? {
        println!("{name} = {};", tau(&f));
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Check { kab } => check(&kab),
        Command::Wa { kab, dot } => wa(&kab, dot.as_deref()),
        Command::Build { kab, run, dot, json } => build(&kab, &run, dot.as_deref(), json.as_deref()),
        Command::Verify {
            kab,
            prop,
            run,
            query_mode,
            require_it_fragment,
        } => verify(&kab, &prop, &run, query_mode, require_it_fragment),
        Command::Repairs { kab, abox, kind } => repairs(&kab, &abox, kind),
        Command::TranslateTau { prop } => translate_tau(&prop),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
