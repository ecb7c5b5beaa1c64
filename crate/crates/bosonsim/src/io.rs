//! File formats: JSON for unitaries, circuits, configurations and run
//! manifests; CSV for event logs, distributions, verdict reports and
//! experiment results.
//!
//! Every writer produces the complete file as a `String` (LF line endings,
//! floats printed with 17 significant digits so they parse back bit-exactly)
//! and has a `save_*` convenience wrapper; readers attach the offending path
//! and, for CSV, the 1-based line number to every error.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::circuit::{Circuit, Element};
use crate::distributions::{EventLog, NoCollisionDistribution};
use crate::error::{Error, Result};
use crate::experiments::{
    EnsembleCurve, ExperimentConfig, InputChoice, NminStudy, SuccessCurve,
};
use crate::matrix::ComplexMatrix;
use crate::modes::ModeConfig;
use crate::unitary::{Interferometer, Provenance};
use crate::validators::VerdictReport;

/// Write `text` to `path`, mapping i/o failures to an error naming the path.
pub fn save_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Read `path` as UTF-8 text, mapping i/o failures to an error naming it.
pub fn load_text(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))
}

fn format_error(origin: &str, message: impl Into<String>) -> Error {
    Error::FileFormat {
        path: origin.to_string(),
        message: message.into(),
    }
}

// ---------------------------------------------------------------------------
// Unitary JSON: {"modes": m, "rows": [[[re, im], ...], ...]}
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct UnitaryFile {
    modes: usize,
    rows: Vec<Vec<[f64; 2]>>,
}

pub fn unitary_to_json(u: &Interferometer) -> String {
    let m = u.modes();
    let rows = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let z = u.matrix().get(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect();
    let file = UnitaryFile { modes: m, rows };
    let mut text = serde_json::to_string_pretty(&file).expect("serialization cannot fail");
    text.push('\n');
    text
}

/// Parse an interferometer from its JSON form, checking the shape and the
/// unitarity contract. `origin` (usually the file path) is attached to any
/// error.
pub fn unitary_from_json(text: &str, origin: &str) -> Result<Interferometer> {
    let file: UnitaryFile =
        serde_json::from_str(text).map_err(|e| format_error(origin, e.to_string()))?;
    if file.rows.len() != file.modes {
        return Err(format_error(
            origin,
            format!("expected {} rows, got {}", file.modes, file.rows.len()),
        ));
    }
    if let Some((i, row)) = file
        .rows
        .iter()
        .enumerate()
        .find(|(_, row)| row.len() != file.modes)
    {
        return Err(format_error(
            origin,
            format!("row {i} has {} entries, expected {}", row.len(), file.modes),
        ));
    }
    let entries: Vec<Complex64> = file
        .rows
        .iter()
        .flatten()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    let matrix = ComplexMatrix::new(file.modes, file.modes, entries)
        .map_err(|e| format_error(origin, e.to_string()))?;
    Interferometer::new(
        matrix,
        Provenance::File {
            path: origin.to_string(),
        },
    )
    .map_err(|e| format_error(origin, e.to_string()))
}

pub fn save_unitary(path: impl AsRef<Path>, u: &Interferometer) -> Result<()> {
    save_text(path, &unitary_to_json(u))
}

pub fn load_unitary(path: impl AsRef<Path>) -> Result<Interferometer> {
    let display = path.as_ref().display().to_string();
    unitary_from_json(&load_text(path)?, &display)
}

// ---------------------------------------------------------------------------
// Circuit JSON: {"modes": m, "elements": [{"kind": "coupler"|"phase", ...}]}
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum ElementFile {
    Coupler { modes: [usize; 2], tau: f64 },
    Phase { mode: usize, phi: f64 },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitFile {
    modes: usize,
    elements: Vec<ElementFile>,
}

pub fn circuit_to_json(c: &Circuit) -> String {
    let elements = c
        .elements()
        .iter()
        .map(|e| match *e {
            Element::Coupler { modes: (p, q), tau } => ElementFile::Coupler {
                modes: [p, q],
                tau,
            },
            Element::Phase { mode, phi } => ElementFile::Phase { mode, phi },
        })
        .collect();
    let file = CircuitFile {
        modes: c.modes(),
        elements,
    };
    let mut text = serde_json::to_string_pretty(&file).expect("serialization cannot fail");
    text.push('\n');
    text
}

pub fn circuit_from_json(text: &str, origin: &str) -> Result<Circuit> {
    let file: CircuitFile =
        serde_json::from_str(text).map_err(|e| format_error(origin, e.to_string()))?;
    let elements = file
        .elements
        .into_iter()
        .map(|e| match e {
            ElementFile::Coupler { modes: [p, q], tau } => Element::Coupler {
                modes: (p, q),
                tau,
            },
            ElementFile::Phase { mode, phi } => Element::Phase { mode, phi },
        })
        .collect();
    Circuit::new(file.modes, elements).map_err(|e| format_error(origin, e.to_string()))
}

pub fn save_circuit(path: impl AsRef<Path>, c: &Circuit) -> Result<()> {
    save_text(path, &circuit_to_json(c))
}

pub fn load_circuit(path: impl AsRef<Path>) -> Result<Circuit> {
    let display = path.as_ref().display().to_string();
    circuit_from_json(&load_text(path)?, &display)
}

// ---------------------------------------------------------------------------
// Event-log CSV: header `index,modes`, one event per line, modes as a
// space-separated ascending list ("0,1 3 4").
// ---------------------------------------------------------------------------

const EVENT_LOG_HEADER: &str = "index,modes";

pub fn event_log_to_csv(log: &EventLog) -> String {
    let mut out = String::from(EVENT_LOG_HEADER);
    out.push('\n');
    for (index, event) in log.events().iter().enumerate() {
        writeln!(out, "{index},{}", event.to_mode_string()).unwrap();
    }
    out
}

/// Parse an event log written by [`event_log_to_csv`]. The caller supplies
/// the input configuration, which fixes the expected photon and mode counts;
/// provenance fields the file does not carry are set to "unknown".
pub fn event_log_from_csv(text: &str, input: &ModeConfig, origin: &str) -> Result<EventLog> {
    let parse_error = |line: usize, message: String| Error::Parse {
        path: origin.to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == EVENT_LOG_HEADER => {}
        Some((_, header)) => {
            return Err(parse_error(
                1,
                format!("expected header `{EVENT_LOG_HEADER}`, got `{header}`"),
            ))
        }
        None => return Err(parse_error(1, "file is empty".into())),
    }
    let mut events = Vec::new();
    for (line_index, line) in lines {
        let line_number = line_index + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (index_field, modes_field) = line
            .split_once(',')
            .ok_or_else(|| parse_error(line_number, "expected `index,modes`".into()))?;
        let index: usize = index_field
            .trim()
            .parse()
            .map_err(|_| parse_error(line_number, format!("bad event index `{index_field}`")))?;
        if index != events.len() {
            return Err(parse_error(
                line_number,
                format!("event index {index} out of order (expected {})", events.len()),
            ));
        }
        let modes = modes_field
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| parse_error(line_number, format!("bad mode index `{tok}`")))
            })
            .collect::<Result<Vec<usize>>>()?;
        let event = ModeConfig::new(modes, input.mode_count())
            .map_err(|e| parse_error(line_number, e.to_string()))?;
        if event.photons() != input.photons() {
            return Err(parse_error(
                line_number,
                format!(
                    "event has {} photons, expected {}",
                    event.photons(),
                    input.photons()
                ),
            ));
        }
        events.push(event);
    }
    EventLog::new(input.clone(), origin, "unknown", None, events)
}

pub fn save_event_log(path: impl AsRef<Path>, log: &EventLog) -> Result<()> {
    save_text(path, &event_log_to_csv(log))
}

pub fn load_event_log(path: impl AsRef<Path>, input: &ModeConfig) -> Result<EventLog> {
    let display = path.as_ref().display().to_string();
    event_log_from_csv(&load_text(path)?, input, &display)
}

// ---------------------------------------------------------------------------
// Result CSVs
// ---------------------------------------------------------------------------

/// 17 significant digits: enough for f64 values to parse back bit-exactly.
fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn distribution_to_csv(d: &NoCollisionDistribution) -> String {
    let mut out = String::from("modes,probability\n");
    for (t, &p) in d.support().iter().zip(d.probabilities()) {
        writeln!(out, "{},{}", t.to_mode_string(), float(p)).unwrap();
    }
    out
}

/// Event-by-event verdict table; the last line carries the final verdict in
/// place of a per-event decision, with an empty modes/statistic.
pub fn report_to_csv(report: &VerdictReport) -> String {
    let test = report.test.label();
    let mut out = String::from("index,modes,statistic,decision,cumulative,test\n");
    for row in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{test}",
            row.index,
            row.modes.to_mode_string(),
            float(row.statistic),
            row.decision,
            row.cumulative
        )
        .unwrap();
    }
    writeln!(
        out,
        "final,,,{},{},{test}",
        report.verdict_label, report.final_cumulative
    )
    .unwrap();
    out
}

fn converging_field(curve: &SuccessCurve) -> &'static str {
    match curve.converging {
        Some(true) => "true",
        Some(false) => "false",
        None => "",
    }
}

/// Success curves, one row per (curve, set size). Which test produced the
/// curve and which source generated the data are recorded in the run manifest
/// and the output file name, not in the rows.
pub fn curves_to_csv<'a>(curves: impl IntoIterator<Item = &'a SuccessCurve>) -> String {
    let mut out =
        String::from("m,n,unitary_index,set_size,successes,trials,estimate,stderr,converging\n");
    for curve in curves {
        for point in &curve.points {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                curve.modes,
                curve.photons,
                curve.unitary_index,
                point.set_size,
                point.successes,
                point.trials,
                float(point.estimate),
                float(point.stderr),
                converging_field(curve)
            )
            .unwrap();
        }
    }
    out
}

/// Ensemble means and 1.5-standard-deviation bands per set size.
pub fn ensemble_summary_to_csv(ensemble: &EnsembleCurve) -> String {
    let mut out = String::from("set_size,bs_mean,bs_band,uniform_mean,uniform_band\n");
    for (bs, uniform) in ensemble.bs_points.iter().zip(&ensemble.uniform_points) {
        writeln!(
            out,
            "{},{},{},{},{}",
            bs.set_size,
            float(bs.mean),
            float(bs.band),
            float(uniform.mean),
            float(uniform.band)
        )
        .unwrap();
    }
    out
}

/// Per-unitary N_min results; `n_min` is empty when the scan exhausted the
/// grid without meeting both criteria.
pub fn nmin_to_csv(study: &NminStudy) -> String {
    let mut out = String::from("m,n,unitary_index,n_min,reached\n");
    for result in &study.results {
        let n_min = result.n_min.map_or(String::new(), |n| n.to_string());
        writeln!(
            out,
            "{},{},{},{},{}",
            study.modes,
            study.photons,
            result.unitary_index,
            n_min,
            result.n_min.is_some()
        )
        .unwrap();
    }
    out
}

// ---------------------------------------------------------------------------
// Experiment configuration JSON
// ---------------------------------------------------------------------------

/// On-disk experiment configuration. Only the system size is mandatory;
/// everything else falls back to the library defaults. `input_modes` pins an
/// explicit input configuration, `modes_list` lets one file drive a study
/// over several register sizes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfigFile {
    pub photons: usize,
    pub modes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set_sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials_per_point: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exclusion_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub success_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_modes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes_list: Option<Vec<usize>>,
}

impl ExperimentConfigFile {
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| format_error(origin, e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let display = path.as_ref().display().to_string();
        Self::from_json(&load_text(path)?, &display)
    }

    /// Materialize a validated configuration with `modes` in place of the
    /// file's register size (used when iterating `modes_list`).
    pub fn config_with_modes(&self, modes: usize) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::new(self.photons, modes);
        if let Some(v) = &self.set_sizes {
            cfg.set_sizes = v.clone();
        }
        if let Some(v) = self.trials_per_point {
            cfg.trials_per_point = v;
        }
        if let Some(v) = self.unitary_count {
            cfg.unitary_count = v;
        }
        if let Some(v) = self.master_seed {
            cfg.master_seed = v;
        }
        if let Some(v) = self.exclusion_cap {
            cfg.exclusion_cap = v;
        }
        if let Some(v) = self.success_threshold {
            cfg.success_threshold = v;
        }
        if let Some(modes_vec) = &self.input_modes {
            cfg.input_choice =
                InputChoice::Explicit(ModeConfig::new(modes_vec.clone(), modes)?);
        }
        if let Some(v) = self.k1 {
            cfg.k1 = v;
        }
        if let Some(v) = self.k2 {
            cfg.k2 = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn into_config(&self) -> Result<ExperimentConfig> {
        self.config_with_modes(self.modes)
    }
}

/// The full parameter set of a configuration, for embedding in manifests.
pub fn config_parameters(cfg: &ExperimentConfig) -> serde_json::Value {
    let input = cfg
        .input_config()
        .map(|c| c.to_mode_string())
        .unwrap_or_default();
    json!({
        "photons": cfg.photons,
        "modes": cfg.modes,
        "set_sizes": cfg.set_sizes,
        "trials_per_point": cfg.trials_per_point,
        "unitary_count": cfg.unitary_count,
        "master_seed": cfg.master_seed,
        "exclusion_cap": cfg.exclusion_cap,
        "success_threshold": cfg.success_threshold,
        "input": input,
        "k1": cfg.k1,
        "k2": cfg.k2,
    })
}

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

/// Seconds since the Unix epoch, saturating to 0 on a pre-epoch clock.
pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Record of one tool invocation: what ran, with which parameters and seed,
/// when, and which data files it produced. Written next to the results so any
/// of them can be reproduced from the manifest alone (timestamps aside).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    /// Master seed driving the run, when the command is seeded.
    pub seed: Option<u64>,
    /// Seconds since the Unix epoch when the command started.
    pub started_unix: u64,
    /// Seconds since the Unix epoch when the manifest was written.
    pub finished_unix: u64,
    pub parameters: serde_json::Value,
    pub outputs: Vec<String>,
}

impl RunManifest {
    /// `started_unix` should be captured with [`unix_now`] before the command
    /// does its work; the finish time is recorded here.
    pub fn new(
        command: impl Into<String>,
        seed: Option<u64>,
        started_unix: u64,
        parameters: serde_json::Value,
        outputs: Vec<String>,
    ) -> Self {
        RunManifest {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            started_unix,
            finished_unix: unix_now(),
            parameters,
            outputs,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("serialization cannot fail");
        text.push('\n');
        text
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        save_text(path, &self.to_json())
    }
}
