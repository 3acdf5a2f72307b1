//! Monte-Carlo harness for the threshold experiments: connectivity of
//! G(n, p) at p = (ln n + a)/n against the e^(-e^(-a)) limit, certified
//! two-colorability just above the threshold, and r-regular Hamiltonicity
//! sweeps.
//!
//! Trials run in parallel but are each a pure function of the trial seed
//! (substream of the master seed), so results and CSV bytes do not depend
//! on scheduling.

use rayon::prelude::*;
use serde::Serialize;

use crate::cfc::{cfc_upper, CfcMethod};
use crate::graph::{gen_gnp, gen_random_regular, threshold_p, Graph};
use crate::hamilton::{self, hamiltonian_cycle};
use crate::rng;
use crate::structure::is_connected;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExperimentError {
    #[error("{op} expects mode {want}, spec has {got}")]
    WrongMode {
        op: &'static str,
        want: &'static str,
        got: &'static str,
    },
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("n must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("regular mode needs r >= 3, got {0}")]
    SmallR(u32),
    #[error("regular mode needs n*r even, got n = {n}, r = {r}")]
    OddRegular { n: usize, r: u32 },
    #[error("trial {trial} failed to generate: {msg}")]
    Generation { trial: usize, msg: String },
}

/// Experiment mode and its single parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Connectivity at p = (ln n + a)/n; no coloring stage.
    OffsetA(f64),
    /// cfc bound at p = (ln n + alpha)/n.
    Alpha(f64),
    /// cfc bound at p = (ln n + ln ln n + omega)/n, the Hamiltonicity
    /// margin parametrization.
    HamiltonMargin(f64),
    /// Random r-regular graphs: Hamilton search plus cfc bound.
    Regular(u32),
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::OffsetA(_) => "offset_a",
            Mode::Alpha(_) => "alpha",
            Mode::HamiltonMargin(_) => "hamilton_margin",
            Mode::Regular(_) => "regular",
        }
    }

    fn param(self) -> f64 {
        match self {
            Mode::OffsetA(x) | Mode::Alpha(x) | Mode::HamiltonMargin(x) => x,
            Mode::Regular(r) => r as f64,
        }
    }

    /// Edge probability for the G(n, p) modes.
    fn p(self, n: usize) -> Option<f64> {
        match self {
            Mode::OffsetA(a) => Some(threshold_p(n, a)),
            Mode::Alpha(a) => Some(threshold_p(n, a)),
            Mode::HamiltonMargin(w) => Some(hamilton_p(n, w)),
            Mode::Regular(_) => None,
        }
    }

    /// Effective offset a with p = (ln n + a)/n, before clamping; the
    /// connectivity limit is e^(-e^(-a)).
    fn effective_offset(self, n: usize) -> Option<f64> {
        match self {
            Mode::OffsetA(a) | Mode::Alpha(a) => Some(a),
            Mode::HamiltonMargin(w) => Some((n as f64).ln().ln() + w),
            Mode::Regular(_) => None,
        }
    }

    fn runs_cfc(self) -> bool {
        !matches!(self, Mode::OffsetA(_))
    }

    fn runs_hamilton(self) -> bool {
        matches!(self, Mode::Regular(_))
    }
}

/// p = (ln n + ln ln n + omega)/n, clamped to [0, 1]; the sparsest regime
/// where G(n, p) is still Hamiltonian w.h.p.
pub fn hamilton_p(n: usize, omega: f64) -> f64 {
    assert!(n >= 2, "hamilton_p needs n >= 2");
    let ln_n = (n as f64).ln();
    ((ln_n + ln_n.ln() + omega) / n as f64).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentSpec {
    pub n: usize,
    pub mode: Mode,
    pub trials: usize,
    pub master_seed: u64,
}

/// One trial's outcome. Fields that a mode does not exercise stay None
/// (e.g. no p for regular graphs, no coloring columns in pure
/// connectivity runs or on disconnected samples).
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    /// Trial seed, substream(master_seed, trial); replays the trial alone.
    pub seed: u64,
    pub n: usize,
    pub p: Option<f64>,
    pub edges: usize,
    pub connected: bool,
    pub hamilton_found: Option<bool>,
    pub method: Option<CfcMethod>,
    pub bound: Option<u32>,
    /// True when an explicit checker certificate backs the bound.
    pub certified: Option<bool>,
}

/// Aggregates over all records; recomputable from them, which the tests
/// assert. Fields are None when the mode has no such stage.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregates {
    pub trials: usize,
    pub connected: usize,
    pub frac_connected: f64,
    pub mean_edges: f64,
    pub hamilton_found: Option<usize>,
    pub frac_hamilton_found: Option<f64>,
    pub certified_le2: Option<usize>,
    /// Among connected samples; None when nothing was connected.
    pub frac_certified_le2_among_connected: Option<f64>,
    pub frac_certified_le2_unconditioned: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub records: Vec<TrialRecord>,
    pub aggregates: Aggregates,
}

fn validate(spec: &ExperimentSpec) -> Result<(), ExperimentError> {
    if spec.trials < 1 {
        return Err(ExperimentError::NoTrials);
    }
    if spec.n < 2 {
        return Err(ExperimentError::TooSmall(spec.n));
    }
    if let Mode::Regular(r) = spec.mode {
        if r < 3 {
            return Err(ExperimentError::SmallR(r));
        }
        if spec.n * r as usize % 2 != 0 {
            return Err(ExperimentError::OddRegular { n: spec.n, r });
        }
    }
    Ok(())
}

/// Run any mode. The mode-specific entry points below just check the mode
/// and defer here.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult, ExperimentError> {
    validate(spec)?;
    let records: Result<Vec<TrialRecord>, ExperimentError> = (0..spec.trials)
        .into_par_iter()
        .map(|trial| run_trial(spec, trial))
        .collect();
    let mut records = records?;
    records.sort_by_key(|r| r.trial);
    let aggregates = compute_aggregates(spec.mode, &records);
    Ok(ExperimentResult {
        spec: *spec,
        records,
        aggregates,
    })
}

pub fn run_connectivity_experiment(
    spec: &ExperimentSpec,
) -> Result<ExperimentResult, ExperimentError> {
    match spec.mode {
        Mode::OffsetA(_) => run_experiment(spec),
        m => Err(ExperimentError::WrongMode {
            op: "run_connectivity_experiment",
            want: "offset_a",
            got: m.name(),
        }),
    }
}

pub fn run_cfc_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult, ExperimentError> {
    match spec.mode {
        Mode::Alpha(_) | Mode::HamiltonMargin(_) => run_experiment(spec),
        m => Err(ExperimentError::WrongMode {
            op: "run_cfc_experiment",
            want: "alpha or hamilton_margin",
            got: m.name(),
        }),
    }
}

pub fn run_regular_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult, ExperimentError> {
    match spec.mode {
        Mode::Regular(_) => run_experiment(spec),
        m => Err(ExperimentError::WrongMode {
            op: "run_regular_experiment",
            want: "regular",
            got: m.name(),
        }),
    }
}

/// Seed layout per trial: substream 0 generates the graph, substream 1
/// drives the coloring ladder, substream 2 the standalone Hamilton search.
fn run_trial(spec: &ExperimentSpec, trial: usize) -> Result<TrialRecord, ExperimentError> {
    let seed = rng::substream(spec.master_seed, trial as u64);
    let g: Graph = match spec.mode {
        Mode::Regular(r) => gen_random_regular(spec.n, r as usize, rng::substream(seed, 0))
            .map_err(|e| ExperimentError::Generation {
                trial,
                msg: e.to_string(),
            })?,
        m => {
            let p = m.p(spec.n).expect("gnp mode");
            gen_gnp(spec.n, p, rng::substream(seed, 0)).expect("threshold_p is in range")
        }
    };
    let connected = is_connected(&g);
    let mut rec = TrialRecord {
        trial,
        seed,
        n: spec.n,
        p: spec.mode.p(spec.n),
        edges: g.m(),
        connected,
        hamilton_found: None,
        method: None,
        bound: None,
        certified: None,
    };
    if spec.mode.runs_hamilton() {
        let outcome = hamiltonian_cycle(&g, hamilton::DEFAULT_RESTARTS, rng::substream(seed, 2));
        rec.hamilton_found = Some(outcome.found().is_some());
    }
    if spec.mode.runs_cfc() && connected {
        let upper = cfc_upper(&g, rng::substream(seed, 1)).expect("connected input");
        rec.certified = Some(
            upper.bound <= 2
                && upper
                    .certificate
                    .as_ref()
                    .map_or(false, |c| c.certified()),
        );
        rec.method = Some(upper.method);
        rec.bound = Some(upper.bound);
    }
    Ok(rec)
}

pub fn compute_aggregates(mode: Mode, records: &[TrialRecord]) -> Aggregates {
    let trials = records.len();
    let connected = records.iter().filter(|r| r.connected).count();
    let frac_connected = connected as f64 / trials as f64;
    let mean_edges = records.iter().map(|r| r.edges as f64).sum::<f64>() / trials as f64;
    let (hamilton_found, frac_hamilton_found) = if mode.runs_hamilton() {
        let found = records
            .iter()
            .filter(|r| r.hamilton_found == Some(true))
            .count();
        (Some(found), Some(found as f64 / trials as f64))
    } else {
        (None, None)
    };
    let (certified_le2, frac_cond, frac_uncond) = if mode.runs_cfc() {
        let good = records.iter().filter(|r| r.certified == Some(true)).count();
        let cond = if connected > 0 {
            Some(good as f64 / connected as f64)
        } else {
            None
        };
        (Some(good), cond, Some(good as f64 / trials as f64))
    } else {
        (None, None, None)
    };
    Aggregates {
        trials,
        connected,
        frac_connected,
        mean_edges,
        hamilton_found,
        frac_hamilton_found,
        certified_le2,
        frac_certified_le2_among_connected: frac_cond,
        frac_certified_le2_unconditioned: frac_uncond,
    }
}

// --- output formats ----------------------------------------------------------

/// Round to `digits` significant decimal digits, so shortest-roundtrip
/// printing (both Display and JSON) shows at most that many.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("scientific notation round-trips")
}

fn opt_round(x: Option<f64>) -> Option<f64> {
    x.map(|v| round_sig(v, 6))
}

/// Write per-trial rows. The header is pinned; fields a mode did not
/// produce are left empty. Byte-identical across reruns of an equal spec.
pub fn write_csv<W: std::io::Write>(
    result: &ExperimentResult,
    w: &mut W,
) -> std::io::Result<()> {
    writeln!(w, "trial,seed,n,p,connected,method,bound,certified")?;
    for r in &result.records {
        let p = r.p.map_or(String::new(), |p| round_sig(p, 6).to_string());
        let method = r.method.map_or("", |m| m.as_str());
        let bound = r.bound.map_or(String::new(), |b| b.to_string());
        let certified = r.certified.map_or(String::new(), |c| (c as u8).to_string());
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.trial, r.seed, r.n, p, r.connected as u8, method, bound, certified
        )?;
    }
    Ok(())
}

/// Summary document: spec echo, aggregates, and theory values. Keys come
/// out alphabetically at every level and floats carry at most six
/// significant digits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub aggregates: SummaryAggregates,
    pub spec: SummarySpec,
    pub theory: SummaryTheory,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryAggregates {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified_le2: Option<usize>,
    pub connected: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frac_certified_le2_among_connected: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frac_certified_le2_unconditioned: Option<f64>,
    pub frac_connected: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frac_hamilton_found: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hamilton_found: Option<usize>,
    pub mean_edges: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummarySpec {
    pub master_seed: u64,
    pub mode: &'static str,
    pub n: usize,
    pub param: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryTheory {
    /// e^(-e^(-a)) at the effective offset; absent for regular graphs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connectivity_limit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

pub fn summarize(result: &ExperimentResult) -> Summary {
    let spec = &result.spec;
    let a = &result.aggregates;
    let limit = spec
        .mode
        .effective_offset(spec.n)
        .map(|a| (-(-a).exp()).exp());
    Summary {
        aggregates: SummaryAggregates {
            certified_le2: a.certified_le2,
            connected: a.connected,
            frac_certified_le2_among_connected: opt_round(a.frac_certified_le2_among_connected),
            frac_certified_le2_unconditioned: opt_round(a.frac_certified_le2_unconditioned),
            frac_connected: round_sig(a.frac_connected, 6),
            frac_hamilton_found: opt_round(a.frac_hamilton_found),
            hamilton_found: a.hamilton_found,
            mean_edges: round_sig(a.mean_edges, 6),
            trials: a.trials,
        },
        spec: SummarySpec {
            master_seed: spec.master_seed,
            mode: spec.mode.name(),
            n: spec.n,
            param: round_sig(spec.mode.param(), 6),
            trials: spec.trials,
        },
        theory: SummaryTheory {
            connectivity_limit: opt_round(limit),
            p: opt_round(spec.mode.p(spec.n)),
        },
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_bytes(result: &ExperimentResult) -> Vec<u8> {
        let mut buf = Vec::new();
        write_csv(result, &mut buf).unwrap();
        buf
    }

    #[test]
    fn connectivity_mode_is_deterministic() {
        let spec = ExperimentSpec {
            n: 60,
            mode: Mode::OffsetA(1.0),
            trials: 20,
            master_seed: 99,
        };
        let r1 = run_connectivity_experiment(&spec).unwrap();
        let r2 = run_connectivity_experiment(&spec).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(csv_bytes(&r1), csv_bytes(&r2));
        assert_eq!(r1.records.len(), 20);
        // no coloring stage ran
        assert!(r1.records.iter().all(|r| r.method.is_none()));
        assert!(r1.aggregates.certified_le2.is_none());
    }

    #[test]
    fn csv_shape() {
        let spec = ExperimentSpec {
            n: 30,
            mode: Mode::Alpha(4.0),
            trials: 5,
            master_seed: 7,
        };
        let result = run_cfc_experiment(&spec).unwrap();
        let text = String::from_utf8(csv_bytes(&result)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "trial,seed,n,p,connected,method,bound,certified");
        assert_eq!(lines.len(), 6);
        for (i, line) in lines[1..].iter().enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 8);
            assert_eq!(fields[0], i.to_string());
            assert_eq!(fields[2], "30");
        }
    }

    #[test]
    fn cfc_mode_records_bounds_on_connected_samples() {
        // p = (ln 30 + 4)/30 = 0.247: dense enough that samples connect
        // and the ladder certifies 2 (or 1 on a freak complete graph)
        let spec = ExperimentSpec {
            n: 30,
            mode: Mode::Alpha(4.0),
            trials: 10,
            master_seed: 11,
        };
        let result = run_cfc_experiment(&spec).unwrap();
        for r in &result.records {
            if r.connected {
                assert!(r.method.is_some() && r.bound.is_some());
            } else {
                assert!(r.method.is_none() && r.bound.is_none());
            }
        }
        let a = &result.aggregates;
        if let (Some(cond), Some(uncond)) = (
            a.frac_certified_le2_among_connected,
            a.frac_certified_le2_unconditioned,
        ) {
            assert!(uncond <= cond + 1e-12);
        }
    }

    #[test]
    fn regular_mode_k4_is_complete() {
        let spec = ExperimentSpec {
            n: 4,
            mode: Mode::Regular(3),
            trials: 1,
            master_seed: 5,
        };
        let result = run_regular_experiment(&spec).unwrap();
        let r = &result.records[0];
        assert!(r.connected);
        assert_eq!(r.p, None);
        assert_eq!(r.hamilton_found, Some(true));
        assert_eq!(r.bound, Some(1));
        assert_eq!(r.method, Some(CfcMethod::Complete));
        // bound 1 via completeness carries no checker certificate
        assert_eq!(r.certified, Some(false));
        assert_eq!(result.aggregates.frac_hamilton_found, Some(1.0));
    }

    #[test]
    fn aggregates_recompute_from_records() {
        let spec = ExperimentSpec {
            n: 40,
            mode: Mode::HamiltonMargin(2.0),
            trials: 8,
            master_seed: 21,
        };
        let result = run_cfc_experiment(&spec).unwrap();
        assert_eq!(
            compute_aggregates(spec.mode, &result.records),
            result.aggregates
        );
    }

    #[test]
    fn mode_validation() {
        let bad = ExperimentSpec {
            n: 30,
            mode: Mode::Alpha(1.0),
            trials: 5,
            master_seed: 0,
        };
        assert!(matches!(
            run_connectivity_experiment(&bad),
            Err(ExperimentError::WrongMode { .. })
        ));
        let odd = ExperimentSpec {
            n: 5,
            mode: Mode::Regular(3),
            trials: 1,
            master_seed: 0,
        };
        assert!(matches!(
            run_regular_experiment(&odd),
            Err(ExperimentError::OddRegular { n: 5, r: 3 })
        ));
        let none = ExperimentSpec {
            n: 5,
            mode: Mode::OffsetA(0.0),
            trials: 0,
            master_seed: 0,
        };
        assert!(matches!(
            run_experiment(&none),
            Err(ExperimentError::NoTrials)
        ));
        let small_r = ExperimentSpec {
            n: 6,
            mode: Mode::Regular(2),
            trials: 1,
            master_seed: 0,
        };
        assert!(matches!(
            run_regular_experiment(&small_r),
            Err(ExperimentError::SmallR(2))
        ));
    }

    #[test]
    fn rounding_and_theory() {
        assert_eq!(round_sig(0.006_907_755_278_982_137, 6), 0.006_907_76);
        assert_eq!(round_sig(0.006_907_76, 6).to_string(), "0.00690776");
        assert_eq!(round_sig(0.0, 6), 0.0);
        assert_eq!(round_sig(123_456_789.0, 6), 123_457_000.0);

        let spec = ExperimentSpec {
            n: 50,
            mode: Mode::OffsetA(0.0),
            trials: 1,
            master_seed: 1,
        };
        let summary = summarize(&run_experiment(&spec).unwrap());
        // e^(-e^-0) = 1/e
        let limit = summary.theory.connectivity_limit.unwrap();
        assert!((limit - 0.367_879).abs() < 1e-6);
        assert_eq!(summary.spec.mode, "offset_a");
    }

    #[test]
    fn summary_json_keys_sorted() {
        let spec = ExperimentSpec {
            n: 20,
            mode: Mode::Alpha(3.0),
            trials: 3,
            master_seed: 13,
        };
        let summary = summarize(&run_experiment(&spec).unwrap());
        let json = serde_json::to_string(&summary).unwrap();
        let positions: Vec<usize> = ["\"aggregates\"", "\"spec\"", "\"theory\""]
            .iter()
            .map(|k| json.find(k).unwrap())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
        let agg: Vec<usize> = [
            "\"connected\"",
            "\"frac_certified_le2_among_connected\"",
            "\"frac_connected\"",
            "\"mean_edges\"",
            "\"trials\"",
        ]
        .iter()
        .map(|k| json.find(k).unwrap())
        .collect();
        assert!(agg.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn hamilton_p_values() {
        // ln 500 = 6.2146, ln ln 500 = 1.8272; (6.2146 + 1.8272 + 3)/500
        let p = hamilton_p(500, 3.0);
        assert!((p - 0.022_083_7).abs() < 1e-4);
        assert_eq!(hamilton_p(2, -100.0), 0.0);
    }
}
