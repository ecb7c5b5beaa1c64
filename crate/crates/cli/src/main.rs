//! Command-line driver for the bosonsim library.
//!
//! Subcommands: `gen-unitary` produces interferometers (Haar draws, random
//! phase networks, or triangular mesh decompositions of an existing
//! unitary), `sample` draws event logs from exact output distributions,
//! `validate` runs a discrimination test on a log, and `experiment` runs the
//! Monte-Carlo success-rate studies.
//!
//! Exit codes: 0 success (for `validate`: the data look like the first
//! hypothesis — boson sampler, or indistinguishable photons), 10 the
//! alternative hypothesis, 11 inconclusive, 1 runtime error, 2 usage error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use bosonsim::circuit::{compose, random_phase_network, reck_decompose};
use bosonsim::distributions::{build_distribution, sample_events, Source};
use bosonsim::experiments::{
    ensemble_unitary, haar_ensemble_curve, lr_haar_ensemble, nmin_haar_average, success_curve,
    SuccessCurve,
};
use bosonsim::io;
use bosonsim::modes::ModeConfig;
use bosonsim::unitary::haar_unitary;
use bosonsim::validators::{aa_report, lr_verdict, DEFAULT_K1, DEFAULT_K2};

#[derive(Parser)]
#[command(
    name = "bosonsim",
    version,
    about = "Photon statistics of multimode interferometers: exact distributions, \
             event sampling, validation tests and Monte-Carlo power studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an interferometer or decompose one into a triangular mesh
    GenUnitary(GenUnitary),
    /// Draw an event log from an exact output distribution
    Sample(Sample),
    /// Judge an event log with a discrimination test
    Validate(Validate),
    /// Monte-Carlo success-rate studies
    Experiment(Experiment),
}

#[derive(Args)]
struct GenUnitary {
    /// haar | random-phases | reck-of=<unitary.json>
    #[arg(long, default_value = "haar")]
    kind: String,
    /// Number of optical modes (haar and random-phases)
    #[arg(long)]
    modes: Option<usize>,
    /// RNG seed (haar and random-phases)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Network depth in layers (random-phases)
    #[arg(long, default_value_t = 3)]
    layers: usize,
    /// Output path: unitary JSON, or circuit JSON for reck-of
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Sample {
    /// Interferometer JSON file
    #[arg(long)]
    unitary: PathBuf,
    /// Input photons: occupied mode indices ("2 3 4") or per-mode 0/1
    /// occupations ("0 0 1 1 1 0 0")
    #[arg(long)]
    input: String,
    /// indistinguishable | distinguishable | uniform
    #[arg(long, default_value = "indistinguishable")]
    source: String,
    /// Number of events to draw
    #[arg(long)]
    events: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Event-log CSV output path; a run manifest is written next to it
    #[arg(long)]
    out: PathBuf,
    /// Also write the exact distribution table to this path
    #[arg(long)]
    distribution: Option<PathBuf>,
}

#[derive(Args)]
struct Validate {
    /// Interferometer JSON file
    #[arg(long)]
    unitary: PathBuf,
    /// Input photons (same syntax as `sample --input`)
    #[arg(long)]
    input: String,
    /// Event-log CSV to judge
    #[arg(long)]
    log: PathBuf,
    /// aa (row-norm test) | lr (likelihood-ratio test)
    #[arg(long, default_value = "aa")]
    test: String,
    /// Lower likelihood-ratio threshold (lr)
    #[arg(long, default_value_t = DEFAULT_K1)]
    k1: f64,
    /// Upper likelihood-ratio threshold (lr)
    #[arg(long, default_value_t = DEFAULT_K2)]
    k2: f64,
    /// Path for the event-by-event verdict table
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Experiment {
    #[command(subcommand)]
    study: Study,
}

#[derive(Subcommand)]
enum Study {
    /// Row-norm-test success curve of one interferometer, on
    /// indistinguishable and uniform data
    SuccessCurve(StudyFlags),
    /// Haar-averaged row-norm curves with the convergence rule
    HaarAverage(StudyFlags),
    /// Smallest data-set size meeting both discrimination criteria
    Nmin(StudyFlags),
    /// Likelihood-ratio curves over a Haar ensemble
    LrCurve(StudyFlags),
}

impl Study {
    fn flags(&self) -> &StudyFlags {
        match self {
            Study::SuccessCurve(f) | Study::HaarAverage(f) | Study::Nmin(f) | Study::LrCurve(f) => {
                f
            }
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Study::SuccessCurve(_) => "success-curve",
            Study::HaarAverage(_) => "haar-average",
            Study::Nmin(_) => "nmin",
            Study::LrCurve(_) => "lr-curve",
        }
    }
}

#[derive(Args)]
struct StudyFlags {
    /// Experiment configuration JSON; other flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    photons: Option<usize>,
    #[arg(long)]
    modes: Option<usize>,
    /// Comma-separated data-set sizes, e.g. 1,10,100,1000
    #[arg(long)]
    set_sizes: Option<String>,
    /// Data sets sampled per point
    #[arg(long)]
    trials: Option<usize>,
    /// Ensemble size for Haar-averaged studies
    #[arg(long)]
    unitaries: Option<usize>,
    /// Master seed all random streams derive from
    #[arg(long)]
    seed: Option<u64>,
    /// Data-set size at which the convergence rule is checked
    #[arg(long)]
    exclusion_cap: Option<usize>,
    /// Success threshold for convergence and the N_min criteria
    #[arg(long)]
    threshold: Option<f64>,
    /// Explicit input photons (default: centered contiguous block)
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    k1: Option<f64>,
    #[arg(long)]
    k2: Option<f64>,
    /// Evaluate this interferometer instead of ensemble member 0
    /// (success-curve only)
    #[arg(long)]
    unitary: Option<PathBuf>,
    /// Directory the result files are written to
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::GenUnitary(args) => run_gen_unitary(args),
        Command::Sample(args) => run_sample(args),
        Command::Validate(args) => run_validate(args),
        Command::Experiment(args) => run_experiment(args.study),
    }
}

fn usage(message: &str) -> Result<u8> {
    eprintln!("usage error: {message}");
    Ok(2)
}

/// Parse a photon-input argument. Tokens may be separated by spaces or
/// commas. When every token is 0 or 1 and there is one per mode, the string
/// is read as per-mode occupations; otherwise as occupied mode indices.
fn parse_input(text: &str, modes: usize) -> Result<ModeConfig> {
    let tokens: Vec<&str> = text.split([',', ' ']).filter(|t| !t.is_empty()).collect();
    if tokens.len() == modes && tokens.iter().all(|t| *t == "0" || *t == "1") {
        return Ok(ModeConfig::from_occupation_str(text, modes)?);
    }
    let indices = tokens
        .iter()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| anyhow!("bad input `{text}`: expected mode indices or 0/1 occupations"))?;
    Ok(ModeConfig::new(indices, modes)?)
}

fn run_gen_unitary(args: GenUnitary) -> Result<u8> {
    if let Some(path) = args.kind.strip_prefix("reck-of=") {
        let u = io::load_unitary(path)?;
        let circuit = reck_decompose(&u)?;
        io::save_circuit(&args.out, &circuit)?;
        let residual = compose(&circuit)?
            .matrix()
            .max_abs_diff(u.matrix())
            .unwrap_or(f64::INFINITY);
        println!(
            "wrote mesh of {} couplers and {} phases for {} to {} (recomposition residual {:.3e})",
            circuit.coupler_count(),
            circuit.phase_count(),
            u.provenance(),
            args.out.display(),
            residual
        );
        return Ok(0);
    }
    let Some(modes) = args.modes else {
        return usage("--modes is required for --kind haar and random-phases");
    };
    match args.kind.as_str() {
        "haar" => {
            let u = haar_unitary(modes, args.seed)?;
            io::save_unitary(&args.out, &u)?;
            println!(
                "wrote {} to {} (unitarity residual {:.3e})",
                u.provenance(),
                args.out.display(),
                u.unitarity_residual()
            );
        }
        "random-phases" => {
            let circuit = random_phase_network(modes, args.layers, args.seed)?;
            let u = compose(&circuit)?;
            io::save_unitary(&args.out, &u)?;
            let circuit_path = args.out.with_extension("circuit.json");
            io::save_circuit(&circuit_path, &circuit)?;
            println!(
                "wrote {} to {} and its {}-element circuit to {}",
                u.provenance(),
                args.out.display(),
                circuit.elements().len(),
                circuit_path.display()
            );
        }
        other => return usage(&format!("unknown kind `{other}`")),
    }
    Ok(0)
}

fn run_sample(args: Sample) -> Result<u8> {
    let started = io::unix_now();
    let u = io::load_unitary(&args.unitary)?;
    let input = parse_input(&args.input, u.modes())?;
    let Ok(source) = Source::from_str(&args.source) else {
        return usage(&format!(
            "unknown source `{}` (expected indistinguishable, distinguishable or uniform)",
            args.source
        ));
    };
    let d = build_distribution(&u, &input, source)?;
    let log = sample_events(&d, args.events, args.seed)?;
    io::save_event_log(&args.out, &log)?;
    let mut outputs = vec![args.out.display().to_string()];
    if let Some(path) = &args.distribution {
        io::save_text(path, &io::distribution_to_csv(&d))?;
        outputs.push(path.display().to_string());
    }
    let manifest_path = args.out.with_extension("manifest.json");
    outputs.push(manifest_path.display().to_string());
    let parameters = json!({
        "unitary": args.unitary.display().to_string(),
        "provenance": u.provenance().to_string(),
        "input": input.to_mode_string(),
        "source": source.label(),
        "events": args.events,
        "seed": args.seed,
    });
    io::RunManifest::new("sample", Some(args.seed), started, parameters, outputs)
        .save(&manifest_path)?;
    println!(
        "wrote {} {} events from {} to {} (manifest {})",
        log.len(),
        source.label(),
        u.provenance(),
        args.out.display(),
        manifest_path.display()
    );
    Ok(0)
}

fn run_validate(args: Validate) -> Result<u8> {
    if args.test != "aa" && args.test != "lr" {
        return usage(&format!("unknown test `{}` (expected aa or lr)", args.test));
    }
    let u = io::load_unitary(&args.unitary)?;
    let input = parse_input(&args.input, u.modes())?;
    let log = io::load_event_log(&args.log, &input)?;
    let report = if args.test == "aa" {
        aa_report(&u, &input, &log)?
    } else {
        let model_p = build_distribution(&u, &input, Source::Indistinguishable)?;
        let model_q = build_distribution(&u, &input, Source::Distinguishable)?;
        lr_verdict(&u, &input, &log, &model_p, &model_q, args.k1, args.k2)?
    };
    io::save_text(&args.out, &io::report_to_csv(&report))?;
    println!(
        "verdict: {} (cumulative count {:+} after {} events)",
        report.verdict_label,
        report.final_cumulative,
        log.len()
    );
    Ok(match report.verdict_label {
        "boson-sampler" | "indistinguishable" => 0,
        "uniform" | "distinguishable" => 10,
        _ => 11,
    })
}

/// Merge the configuration file (if any) with flag overrides. `None` means
/// neither a config nor the minimum flags were given.
fn resolve_config(flags: &StudyFlags) -> Result<Option<io::ExperimentConfigFile>> {
    let mut file = match &flags.config {
        Some(path) => io::ExperimentConfigFile::load(path)?,
        None => {
            let (Some(photons), Some(modes)) = (flags.photons, flags.modes) else {
                return Ok(None);
            };
            io::ExperimentConfigFile {
                photons,
                modes,
                set_sizes: None,
                trials_per_point: None,
                unitary_count: None,
                master_seed: None,
                exclusion_cap: None,
                success_threshold: None,
                input_modes: None,
                k1: None,
                k2: None,
                modes_list: None,
            }
        }
    };
    if let Some(v) = flags.photons {
        file.photons = v;
    }
    if let Some(v) = flags.modes {
        file.modes = v;
        file.modes_list = None;
    }
    if let Some(text) = &flags.set_sizes {
        let sizes = text
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .with_context(|| format!("bad --set-sizes `{text}`"))?;
        file.set_sizes = Some(sizes);
    }
    if let Some(v) = flags.trials {
        file.trials_per_point = Some(v);
    }
    if let Some(v) = flags.unitaries {
        file.unitary_count = Some(v);
    }
    if let Some(v) = flags.seed {
        file.master_seed = Some(v);
    }
    if let Some(v) = flags.exclusion_cap {
        file.exclusion_cap = Some(v);
    }
    if let Some(v) = flags.threshold {
        file.success_threshold = Some(v);
    }
    if let Some(text) = &flags.input {
        let parsed = parse_input(text, file.modes)?;
        file.input_modes = Some(parsed.modes().to_vec());
    }
    if let Some(v) = flags.k1 {
        file.k1 = Some(v);
    }
    if let Some(v) = flags.k2 {
        file.k2 = Some(v);
    }
    Ok(Some(file))
}

fn run_experiment(study: Study) -> Result<u8> {
    let started = io::unix_now();
    let flags = study.flags();
    let Some(file) = resolve_config(flags)? else {
        return usage("give --config, or both --photons and --modes");
    };
    fs::create_dir_all(&flags.out)
        .with_context(|| format!("creating {}", flags.out.display()))?;
    let out = |name: &str| flags.out.join(name);
    let command = format!("experiment {}", study.label());
    let manifest_path = out("manifest.json");
    let save_manifest = |seed: u64, parameters: serde_json::Value, mut outputs: Vec<String>| {
        outputs.push(manifest_path.display().to_string());
        io::RunManifest::new(&command, Some(seed), started, parameters, outputs)
            .save(&manifest_path)
    };

    match &study {
        Study::SuccessCurve(_) => {
            let cfg = file.into_config()?;
            let s = cfg.input_config()?;
            let u = match &flags.unitary {
                Some(path) => io::load_unitary(path)?,
                None => ensemble_unitary(&cfg, 0)?,
            };
            let bs = success_curve(&u, &s, Source::Indistinguishable, &cfg)?;
            let uniform = success_curve(&u, &s, Source::Uniform, &cfg)?;
            let bs_path = out("curve_bs.csv");
            let uniform_path = out("curve_uniform.csv");
            io::save_text(&bs_path, &io::curves_to_csv([&bs]))?;
            io::save_text(&uniform_path, &io::curves_to_csv([&uniform]))?;
            let mut parameters = io::config_parameters(&cfg);
            parameters["unitary"] = json!(u.provenance().to_string());
            save_manifest(
                cfg.master_seed,
                parameters,
                vec![
                    bs_path.display().to_string(),
                    uniform_path.display().to_string(),
                ],
            )?;
            let last = bs.points.last().expect("validated set_sizes is nonempty");
            println!(
                "success {:.3} (uniform mislabeled {:.3}) at {} events; converging: {}; wrote {}, {} and {}",
                last.estimate,
                uniform.points.last().map_or(0.0, |p| p.estimate),
                last.set_size,
                bs.converging == Some(true),
                bs_path.display(),
                uniform_path.display(),
                manifest_path.display()
            );
        }
        Study::HaarAverage(_) => {
            let cfg = file.into_config()?;
            let ensemble = haar_ensemble_curve(&cfg)?;
            let bs_path = out("curves_bs.csv");
            let uniform_path = out("curves_uniform.csv");
            let summary_path = out("ensemble.csv");
            io::save_text(
                &bs_path,
                &io::curves_to_csv(ensemble.members.iter().map(|m| &m.bs_curve)),
            )?;
            io::save_text(
                &uniform_path,
                &io::curves_to_csv(ensemble.members.iter().map(|m| &m.uniform_curve)),
            )?;
            io::save_text(&summary_path, &io::ensemble_summary_to_csv(&ensemble))?;
            save_manifest(
                cfg.master_seed,
                io::config_parameters(&cfg),
                vec![
                    bs_path.display().to_string(),
                    uniform_path.display().to_string(),
                    summary_path.display().to_string(),
                ],
            )?;
            println!(
                "{} of {} unitaries converging ({:.1}%); wrote {}, {}, {} and {}",
                ensemble.converging_count,
                ensemble.unitary_count,
                100.0 * ensemble.converging_fraction(),
                bs_path.display(),
                uniform_path.display(),
                summary_path.display(),
                manifest_path.display()
            );
        }
        Study::Nmin(_) => {
            let modes_list = file.modes_list.clone().unwrap_or_else(|| vec![file.modes]);
            let mut csv = String::new();
            let mut parameters = json!(null);
            let mut seed = 0;
            for (index, &modes) in modes_list.iter().enumerate() {
                let cfg = file.config_with_modes(modes)?;
                if index == 0 {
                    parameters = io::config_parameters(&cfg);
                    parameters["modes_list"] = json!(modes_list);
                    seed = cfg.master_seed;
                }
                let study_result = nmin_haar_average(&cfg)?;
                match study_result.mean_n_min {
                    Some(mean) => println!(
                        "m={modes}: mean N_min {:.1} over {} of {} unitaries",
                        mean, study_result.reached_count, cfg.unitary_count
                    ),
                    None => println!(
                        "m={modes}: no unitary met both criteria within the set-size grid"
                    ),
                }
                let table = io::nmin_to_csv(&study_result);
                if index == 0 {
                    csv.push_str(&table);
                } else if let Some((_, rows)) = table.split_once('\n') {
                    csv.push_str(rows);
                }
            }
            let nmin_path = out("nmin.csv");
            io::save_text(&nmin_path, &csv)?;
            save_manifest(seed, parameters, vec![nmin_path.display().to_string()])?;
            println!("wrote {} and {}", nmin_path.display(), manifest_path.display());
        }
        Study::LrCurve(_) => {
            let cfg = file.into_config()?;
            let ensembles = lr_haar_ensemble(&cfg)?;
            let ind_path = out("lr_curves_indistinguishable.csv");
            let dis_path = out("lr_curves_distinguishable.csv");
            io::save_text(
                &ind_path,
                &io::curves_to_csv(ensembles.iter().map(|c| &c.indistinguishable)),
            )?;
            io::save_text(
                &dis_path,
                &io::curves_to_csv(ensembles.iter().map(|c| &c.distinguishable)),
            )?;
            save_manifest(
                cfg.master_seed,
                io::config_parameters(&cfg),
                vec![ind_path.display().to_string(), dis_path.display().to_string()],
            )?;
            let count = ensembles.len() as f64;
            let mean_last = |pick: fn(&bosonsim::experiments::LrCurves) -> &SuccessCurve| {
                ensembles
                    .iter()
                    .map(|c| pick(c).points.last().map_or(0.0, |p| p.estimate))
                    .sum::<f64>()
                    / count
            };
            println!(
                "final-point mean: indistinguishable data {:.3}, distinguishable data {:.3}; wrote {}, {} and {}",
                mean_last(|c| &c.indistinguishable),
                mean_last(|c| &c.distinguishable),
                ind_path.display(),
                dis_path.display(),
                manifest_path.display()
            );
        }
    }
    Ok(0)
}
