//! cfc: conflict-free connection coloring toolkit.
//!
//! Subcommands cover the whole pipeline: graph generation, structural
//! analysis, Hamilton search, the constructive two-coloring, coloring
//! verification, exact solving, and Monte-Carlo experiments. Exit codes:
//! 0 success or certified, 1 refuted or not found, 2 input error, 3
//! internal budget exhausted. Data goes to stdout or the requested files;
//! diagnostics go to stderr, gated by the LOG_LEVEL environment variable
//! (error, info, debug).

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use cfc_core::cfc::{
    self, cfc_exact, construct_cfc2_coloring, is_conflict_free_connected, CfcError,
};
use cfc_core::experiments::{
    round_sig, run_experiment, summarize, write_csv, ExperimentError, ExperimentSpec, Mode,
};
use cfc_core::graph::{gen_gnp, gen_random_regular, read_edge_list, write_edge_list, Graph};
use cfc_core::hamilton::{hamiltonian_cycle, HamOutcome, DEFAULT_RESTARTS};
use cfc_core::structure::{
    check_prop1_sampled, check_prop2, cjv_condition, classify_vertices, find_bridges,
    is_connected, is_two_connected, is_two_edge_connected,
};

const EXIT_NEGATIVE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "cfc",
    version,
    about = "Conflict-free connection coloring toolkit"
)]
struct Cli {
    /// Cap on worker threads for parallel stages.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Model {
    Gnp,
    Regular,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ModeArg {
    OffsetA,
    Alpha,
    HamiltonMargin,
    Regular,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random graph and write its edge list.
    Gen {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        n: usize,
        /// Edge probability (gnp model).
        #[arg(long)]
        p: Option<f64>,
        /// Degree (regular model).
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Structural analysis as JSON: connectivity, cut structure, the
    /// degree partition, and the proposition spot-checks.
    Analyze {
        /// Edge-list file, or - for stdin.
        input: PathBuf,
        /// Edge probability the graph was sampled at; enables the sampled
        /// density and crossing checks.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search for a Hamilton cycle; prints it or NOT FOUND.
    Ham {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build the constructive two-coloring and write the coloring file.
    Color {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Coloring output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the checker certificate JSON here.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Verify a coloring file; prints the certificate JSON.
    Check {
        input: PathBuf,
        #[arg(long)]
        coloring: PathBuf,
    },
    /// Exact conflict-free connection number (small graphs only).
    Cfc {
        input: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_k: u32,
        #[arg(long, default_value_t = cfc::DEFAULT_EDGE_BUDGET)]
        budget: usize,
    },
    /// Monte-Carlo experiment: per-trial CSV to --out, summary JSON to
    /// stdout.
    Experiment {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        n: usize,
        /// Mode parameter: the offset a, alpha, omega, or the degree r.
        #[arg(long)]
        param: f64,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LOG_LEVEL", "error")).init();
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            return ExitCode::from(fail(EXIT_INPUT, format!("cannot size worker pool: {e}")));
        }
    }
    let code = match cli.command {
        Command::Gen {
            model,
            n,
            p,
            r,
            seed,
            out,
        } => cmd_gen(model, n, p, r, seed, out.as_deref()),
        Command::Analyze {
            input,
            p,
            trials,
            seed,
        } => cmd_analyze(&input, p, trials, seed),
        Command::Ham {
            input,
            restarts,
            seed,
        } => cmd_ham(&input, restarts, seed),
        Command::Color {
            input,
            seed,
            out,
            certificate,
        } => cmd_color(&input, seed, out.as_deref(), certificate.as_deref()),
        Command::Check { input, coloring } => cmd_check(&input, &coloring),
        Command::Cfc {
            input,
            max_k,
            budget,
        } => cmd_cfc(&input, max_k, budget),
        Command::Experiment {
            mode,
            n,
            param,
            trials,
            seed,
            out,
        } => cmd_experiment(mode, n, param, trials, seed, &out),
    };
    ExitCode::from(code)
}

fn fail(code: u8, msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    code
}

fn read_graph(path: &Path) -> Result<Graph, u8> {
    let result = if path.as_os_str() == "-" {
        read_edge_list(io::stdin().lock())
    } else {
        let f = File::open(path)
            .map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))?;
        read_edge_list(BufReader::new(f))
    };
    result.map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))
}

/// Writer for --out style options: the named file, or stdout.
fn out_writer(path: Option<&Path>) -> Result<Box<dyn Write>, u8> {
    match path {
        Some(p) => {
            let f = File::create(p)
                .map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

// Going through Value sorts the keys: its map type keeps them ordered no
// matter how the source struct declares its fields.
fn print_sorted_json(v: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("value serializes")
    );
}

fn cmd_gen(
    model: Model,
    n: usize,
    p: Option<f64>,
    r: Option<usize>,
    seed: u64,
    out: Option<&Path>,
) -> u8 {
    let g = match model {
        Model::Gnp => {
            if r.is_some() {
                return fail(EXIT_INPUT, "--r does not apply to the gnp model");
            }
            let Some(p) = p else {
                return fail(EXIT_INPUT, "gnp model needs --p");
            };
            match gen_gnp(n, p, seed) {
                Ok(g) => g,
                Err(e) => return fail(EXIT_INPUT, e),
            }
        }
        Model::Regular => {
            if p.is_some() {
                return fail(EXIT_INPUT, "--p does not apply to the regular model");
            }
            let Some(r) = r else {
                return fail(EXIT_INPUT, "regular model needs --r");
            };
            match gen_random_regular(n, r, seed) {
                Ok(g) => g,
                Err(e @ cfc_core::GraphError::RegularRetriesExhausted { .. }) => {
                    return fail(EXIT_BUDGET, e)
                }
                Err(e) => return fail(EXIT_INPUT, e),
            }
        }
    };
    info!("generated n={} m={}", g.n(), g.m());
    let mut w = match out_writer(out) {
        Ok(w) => w,
        Err(c) => return c,
    };
    match write_edge_list(&g, &mut w).and_then(|_| w.flush()) {
        Ok(()) => 0,
        Err(e) => fail(EXIT_INPUT, e),
    }
}

fn cmd_analyze(input: &Path, p: Option<f64>, trials: u64, seed: u64) -> u8 {
    let g = match read_graph(input) {
        Ok(g) => g,
        Err(c) => return c,
    };
    let connected = is_connected(&g);
    let cut = find_bridges(&g);
    let mut doc = serde_json::json!({
        "bridges": {
            "articulation_points": cut.articulation_points,
            "cut_edge_subgraph_m": cut.cut_edge_subgraph.m(),
            "edge_ids": cut.bridges,
        },
        "cjv_condition": connected.then(|| cjv_condition(&g).expect("connected")),
        "connected": connected,
        "m": g.m(),
        "n": g.n(),
        "two_connected": is_two_connected(&g),
        "two_edge_connected": is_two_edge_connected(&g),
    });
    let map = doc.as_object_mut().expect("document is an object");
    if g.n() >= 2 {
        let part = classify_vertices(&g);
        let prop2 = check_prop2(&g, &part);
        map.insert(
            "partition".into(),
            serde_json::json!({
                "large_count": part.large.len(),
                "small": part.small,
                "threshold": round_sig(part.threshold, 6),
            }),
        );
        map.insert(
            "prop2".into(),
            serde_json::to_value(&prop2).expect("report serializes"),
        );
        if let Some(p) = p {
            if !(0.0..=1.0).contains(&p) {
                return fail(EXIT_INPUT, format!("--p {p} outside [0, 1]"));
            }
            if trials < 1 {
                return fail(EXIT_INPUT, "--trials must be at least 1");
            }
            let prop1 = check_prop1_sampled(&g, p, trials, seed);
            map.insert(
                "prop1".into(),
                serde_json::to_value(&prop1).expect("report serializes"),
            );
        }
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&doc).expect("document serializes")
    );
    0
}

fn cmd_ham(input: &Path, restarts: u32, seed: u64) -> u8 {
    let g = match read_graph(input) {
        Ok(g) => g,
        Err(c) => return c,
    };
    match hamiltonian_cycle(&g, restarts, seed) {
        HamOutcome::Found(c) => {
            let words: Vec<String> = c.vertices().iter().map(|v| v.to_string()).collect();
            println!("{}", words.join(" "));
            0
        }
        HamOutcome::NotFoundHeuristic => {
            println!("NOT FOUND (heuristic)");
            EXIT_NEGATIVE
        }
        HamOutcome::NotFoundExact => {
            println!("NOT FOUND (exact)");
            EXIT_NEGATIVE
        }
    }
}

/// Input-shape problems exit 2; pipeline failures (no matching, no cycle,
/// non-spanning union, refuted self-check) exit 3.
fn color_error_code(e: &CfcError) -> u8 {
    match e {
        CfcError::Disconnected | CfcError::TooSmall { .. } => EXIT_INPUT,
        _ => EXIT_BUDGET,
    }
}

fn cmd_color(input: &Path, seed: u64, out: Option<&Path>, cert_path: Option<&Path>) -> u8 {
    let g = match read_graph(input) {
        Ok(g) => g,
        Err(c) => return c,
    };
    let built = match construct_cfc2_coloring(&g, seed) {
        Ok(b) => b,
        Err(e) => return fail(color_error_code(&e), e),
    };
    info!(
        "certified 2-coloring: cycle {} vertices, matching {}, special edge {}",
        built.cycle.len(),
        built.matching.pairs.len(),
        built.special_edge
    );
    if let Some(path) = cert_path {
        let v = serde_json::to_value(&built.certificate).expect("certificate serializes");
        let text = serde_json::to_string_pretty(&v).expect("value serializes");
        if let Err(e) = std::fs::write(path, text + "\n") {
            return fail(EXIT_INPUT, format!("{}: {e}", path.display()));
        }
    }
    let mut w = match out_writer(out) {
        Ok(w) => w,
        Err(c) => return c,
    };
    match cfc::write_coloring(&built.coloring, &mut w).and_then(|_| w.flush()) {
        Ok(()) => 0,
        Err(e) => fail(EXIT_INPUT, e),
    }
}

fn cmd_check(input: &Path, coloring: &Path) -> u8 {
    let g = match read_graph(input) {
        Ok(g) => g,
        Err(c) => return c,
    };
    let f = match File::open(coloring) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_INPUT, format!("{}: {e}", coloring.display())),
    };
    let col = match cfc::read_coloring(BufReader::new(f)) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_INPUT, format!("{}: {e}", coloring.display())),
    };
    match is_conflict_free_connected(&g, &col) {
        Ok(cert) => {
            let v = serde_json::to_value(&cert).expect("certificate serializes");
            print_sorted_json(&v);
            if cert.certified() {
                0
            } else {
                EXIT_NEGATIVE
            }
        }
        Err(e) => fail(EXIT_INPUT, e),
    }
}

fn cmd_cfc(input: &Path, max_k: u32, budget: usize) -> u8 {
    let g = match read_graph(input) {
        Ok(g) => g,
        Err(c) => return c,
    };
    match cfc_exact(&g, max_k, budget) {
        Ok(k) => {
            println!("{k}");
            0
        }
        Err(e @ CfcError::PaletteExceeded { .. }) => fail(EXIT_NEGATIVE, e),
        Err(e @ CfcError::EdgeBudget { .. }) => fail(EXIT_BUDGET, e),
        Err(e) => fail(EXIT_INPUT, e),
    }
}

fn cmd_experiment(
    mode: ModeArg,
    n: usize,
    param: f64,
    trials: usize,
    seed: u64,
    out: &Path,
) -> u8 {
    let mode = match mode {
        ModeArg::OffsetA => Mode::OffsetA(param),
        ModeArg::Alpha => Mode::Alpha(param),
        ModeArg::HamiltonMargin => Mode::HamiltonMargin(param),
        ModeArg::Regular => {
            if param.fract() != 0.0 || param < 0.0 {
                return fail(EXIT_INPUT, "regular mode needs an integer --param");
            }
            Mode::Regular(param as u32)
        }
    };
    let spec = ExperimentSpec {
        n,
        mode,
        trials,
        master_seed: seed,
    };
    let result = match run_experiment(&spec) {
        Ok(r) => r,
        Err(e @ ExperimentError::Generation { .. }) => return fail(EXIT_BUDGET, e),
        Err(e) => return fail(EXIT_INPUT, e),
    };
    let f = match File::create(out) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_INPUT, format!("{}: {e}", out.display())),
    };
    let mut w = BufWriter::new(f);
    if let Err(e) = write_csv(&result, &mut w).and_then(|_| w.flush()) {
        return fail(EXIT_INPUT, e);
    }
    info!(
        "wrote {} trial rows to {}",
        result.records.len(),
        out.display()
    );
    let summary = serde_json::to_value(summarize(&result)).expect("summary serializes");
    print_sorted_json(&summary);
    0
}
