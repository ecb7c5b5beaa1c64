//! Monte-Carlo studies of validator power versus data-set size.
//!
//! The harness measures, for a fixed interferometer and input, how often a
//! validator reaches the right verdict on data sets of increasing size, and
//! aggregates those curves over ensembles of Haar-random unitaries the way
//! the interference-validation literature plots them: per-unitary success
//! curves, ensemble means with 1.5-standard-deviation bands, a convergence
//! rule that drops unitaries whose success never reaches the threshold even
//! at the largest admissible data set, and the minimal data-set size N_min
//! at which both discrimination criteria hold.
//!
//! Reproducibility contract: every random draw comes from a ChaCha stream
//! whose seed is [`derive_seed`]`(master, [purpose, unitary, set-size,
//! trial])`. Trials are therefore independent of execution order; they can
//! run on any number of threads and are reduced with integer sums, so a
//! given configuration produces bit-identical results every time, including
//! under maximum parallelism (set `RAYON_NUM_THREADS` to taste).
//!
//! The hot loop never touches matrices: per (unitary, input) pair we
//! precompute, over the lexicographic output support, the sampling tables of
//! the relevant sources plus each outcome's row-norm verdict (or band
//! increment), and a trial is then `set_size` table lookups.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distributions::{build_distribution, CumulativeTable, Source};
use crate::error::{Error, Result};
use crate::modes::ModeConfig;
use crate::unitary::{haar_unitary, Interferometer};
use crate::validators::{
    aa_decide_event, classify_ratio, AaVerdict, LrState, TestKind, DEFAULT_K1, DEFAULT_K2,
};

/// Default grid of data-set sizes, geometric-ish like the published curves.
pub const DEFAULT_SET_SIZES: [usize; 12] =
    [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000];

/// Default largest data set a unitary gets before being declared
/// non-converging.
pub const DEFAULT_EXCLUSION_CAP: usize = 5000;

/// Default success threshold for the convergence rule and N_min criteria.
pub const DEFAULT_SUCCESS_THRESHOLD: f64 = 0.95;

/// How the photon input modes are chosen for ensemble studies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputChoice {
    /// The n modes centered in the m-mode register, e.g. modes {2,3,4} of 7.
    /// This is the published choice, so it is the default.
    ContiguousCenter,
    /// A caller-specified configuration.
    Explicit(ModeConfig),
}

/// Parameters shared by all experiment kinds.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub photons: usize,
    pub modes: usize,
    /// Data-set sizes to evaluate, strictly increasing.
    pub set_sizes: Vec<usize>,
    /// Independent data sets sampled per (set size, unitary).
    pub trials_per_point: usize,
    /// Ensemble size for Haar-averaged studies.
    pub unitary_count: usize,
    pub master_seed: u64,
    /// Set size at which the convergence rule is evaluated.
    pub exclusion_cap: usize,
    /// Success rate a unitary must reach at the cap to count as converging;
    /// also the N_min criterion (with complement 1 - threshold as the cap on
    /// uniform data labeled boson-sampler).
    pub success_threshold: f64,
    pub input_choice: InputChoice,
    /// Likelihood-ratio thresholds.
    pub k1: f64,
    pub k2: f64,
}

impl ExperimentConfig {
    /// A configuration with the published defaults for everything but the
    /// system size.
    pub fn new(photons: usize, modes: usize) -> Self {
        ExperimentConfig {
            photons,
            modes,
            set_sizes: DEFAULT_SET_SIZES.to_vec(),
            trials_per_point: 1000,
            unitary_count: 100,
            master_seed: 0,
            exclusion_cap: DEFAULT_EXCLUSION_CAP,
            success_threshold: DEFAULT_SUCCESS_THRESHOLD,
            input_choice: InputChoice::ContiguousCenter,
            k1: DEFAULT_K1,
            k2: DEFAULT_K2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |field: &'static str, message: String| -> Result<()> {
            Err(Error::InvalidParameter { field, message })
        };
        if self.photons == 0 {
            return fail("photons", "need at least one photon".into());
        }
        if self.photons > self.modes {
            return fail(
                "photons",
                format!("{} photons do not fit {} modes without collisions", self.photons, self.modes),
            );
        }
        if self.set_sizes.is_empty() {
            return fail("set_sizes", "need at least one set size".into());
        }
        if self.set_sizes[0] == 0 {
            return fail("set_sizes", "set sizes must be positive".into());
        }
        if self.set_sizes.windows(2).any(|w| w[0] >= w[1]) {
            return fail("set_sizes", "set sizes must be strictly increasing".into());
        }
        if self.trials_per_point == 0 {
            return fail("trials_per_point", "need at least one trial per point".into());
        }
        if self.unitary_count == 0 {
            return fail("unitary_count", "need at least one unitary".into());
        }
        if self.exclusion_cap == 0 {
            return fail("exclusion_cap", "the exclusion cap must be positive".into());
        }
        if !self.success_threshold.is_finite()
            || !(0.0 < self.success_threshold && self.success_threshold < 1.0)
        {
            return fail(
                "success_threshold",
                format!("threshold must lie in (0, 1), got {}", self.success_threshold),
            );
        }
        LrState::new(self.k1, self.k2)?;
        self.input_config()?;
        Ok(())
    }

    /// The input configuration this experiment uses.
    pub fn input_config(&self) -> Result<ModeConfig> {
        match &self.input_choice {
            InputChoice::ContiguousCenter => {
                let start = (self.modes - self.photons) / 2;
                ModeConfig::new((start..start + self.photons).collect(), self.modes)
            }
            InputChoice::Explicit(config) => {
                if config.mode_count() != self.modes || config.photons() != self.photons {
                    return Err(Error::InvalidParameter {
                        field: "input_choice",
                        message: format!(
                            "explicit input {config} does not match n={}, m={}",
                            self.photons, self.modes
                        ),
                    });
                }
                Ok(config.clone())
            }
        }
    }
}

// Purpose words keeping the RNG streams of different harness stages
// disjoint. Source-dependent stages add `source_word` to their base.
const TAG_UNITARY: u64 = 0x55;
const TAG_AA_CURVE: u64 = 0x10;
const TAG_NMIN: u64 = 0x20;
const TAG_LR_CURVE: u64 = 0x30;
/// Set-size slot for the exclusion-cap evaluation when the cap is not one of
/// the grid points.
const CAP_SLOT: u64 = u64::MAX;

fn source_word(source: Source) -> u64 {
    match source {
        Source::Indistinguishable => 0,
        Source::Distinguishable => 1,
        Source::Uniform => 2,
    }
}

/// Derive a child seed from a master seed and a list of index words by
/// chaining a SplitMix64 finalizer. The map is deterministic and spreads any
/// single-bit change in master or words across the output.
pub fn derive_seed(master: u64, words: &[u64]) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    let mut state = splitmix(master);
    for &w in words {
        state = splitmix(state ^ w);
    }
    state
}

/// Seed of the `index`-th interferometer in the Haar ensembles driven by
/// this configuration.
pub fn ensemble_unitary_seed(cfg: &ExperimentConfig, index: usize) -> u64 {
    derive_seed(cfg.master_seed, &[TAG_UNITARY, index as u64, 0, 0])
}

/// Draw the `index`-th ensemble interferometer itself.
pub fn ensemble_unitary(cfg: &ExperimentConfig, index: usize) -> Result<Interferometer> {
    haar_unitary(cfg.modes, ensemble_unitary_seed(cfg, index))
}

/// One evaluated point of a success curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub set_size: usize,
    /// Trials whose verdict was the first hypothesis (boson sampler for the
    /// row-norm test, indistinguishable for the likelihood-ratio test).
    pub successes: u64,
    pub trials: u64,
    /// successes / trials.
    pub estimate: f64,
    /// Binomial standard error sqrt(p(1-p)/trials).
    pub stderr: f64,
}

fn curve_point(set_size: usize, successes: u64, trials: u64) -> CurvePoint {
    let estimate = successes as f64 / trials as f64;
    CurvePoint {
        set_size,
        successes,
        trials,
        estimate,
        stderr: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
    }
}

/// Success of one validator on one (unitary, input, source) triple across
/// the set-size grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessCurve {
    pub photons: usize,
    pub modes: usize,
    pub unitary_index: usize,
    pub test: TestKind,
    pub source: Source,
    pub points: Vec<CurvePoint>,
    /// Whether the boson-sampler success rate reaches the threshold at the
    /// exclusion cap. Only evaluated for row-norm curves on
    /// indistinguishable data; `None` where the rule does not apply.
    pub converging: Option<bool>,
}

impl SuccessCurve {
    /// The point evaluated at `set_size`, if it is on the grid.
    pub fn point_at(&self, set_size: usize) -> Option<&CurvePoint> {
        self.points.iter().find(|p| p.set_size == set_size)
    }
}

/// Sampling table plus per-outcome row-norm verdicts for one
/// (unitary, input, source) triple.
struct AaTables {
    sampler: CumulativeTable,
    bs_outcome: Vec<bool>,
}

fn aa_tables(u: &Interferometer, s: &ModeConfig, source: Source) -> Result<AaTables> {
    let dist = build_distribution(u, s, source)?;
    let bs_outcome = dist
        .support()
        .iter()
        .map(|t| Ok(aa_decide_event(u, s, t)?.verdict == AaVerdict::BosonSampler))
        .collect::<Result<Vec<bool>>>()?;
    Ok(AaTables {
        sampler: CumulativeTable::new(&dist),
        bs_outcome,
    })
}

/// One majority-vote trial: sample `set_size` events, true if the
/// boson-sampler events hold a strict majority.
fn aa_trial(tables: &AaTables, set_size: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bs = 0usize;
    for _ in 0..set_size {
        if tables.bs_outcome[tables.sampler.sample(&mut rng)] {
            bs += 1;
        }
    }
    2 * bs > set_size
}

/// Count majority-vote successes over `trials` independent data sets.
fn aa_point(
    tables: &AaTables,
    cfg: &ExperimentConfig,
    tag: u64,
    unitary_index: usize,
    set_slot: u64,
    set_size: usize,
) -> u64 {
    (0..cfg.trials_per_point)
        .into_par_iter()
        .map(|trial| {
            let seed = derive_seed(
                cfg.master_seed,
                &[tag, unitary_index as u64, set_slot, trial as u64],
            );
            aa_trial(tables, set_size, seed) as u64
        })
        .sum()
}

fn check_system(u: &Interferometer, s: &ModeConfig, cfg: &ExperimentConfig) -> Result<()> {
    cfg.validate()?;
    if u.modes() != cfg.modes {
        return Err(Error::InvalidParameter {
            field: "modes",
            message: format!(
                "config says {} modes but the interferometer has {}",
                cfg.modes,
                u.modes()
            ),
        });
    }
    if s.mode_count() != cfg.modes || s.photons() != cfg.photons {
        return Err(Error::InvalidParameter {
            field: "input",
            message: format!(
                "input {s} does not match the configured system n={}, m={}",
                cfg.photons, cfg.modes
            ),
        });
    }
    Ok(())
}

/// [`success_curve`] evaluated in the random streams of ensemble member
/// `unitary_index`, so a single member's curve can be recomputed standalone
/// (pair it with [`ensemble_unitary`]).
pub fn success_curve_at(
    u: &Interferometer,
    s: &ModeConfig,
    source: Source,
    cfg: &ExperimentConfig,
    unitary_index: usize,
) -> Result<SuccessCurve> {
    cfg.validate()?;
    let tables = aa_tables(u, s, source)?;
    let tag = TAG_AA_CURVE + source_word(source);
    let trials = cfg.trials_per_point as u64;
    let points: Vec<CurvePoint> = cfg
        .set_sizes
        .iter()
        .enumerate()
        .map(|(slot, &set_size)| {
            let successes = aa_point(&tables, cfg, tag, unitary_index, slot as u64, set_size);
            curve_point(set_size, successes, trials)
        })
        .collect();

    // Convergence classification: boson-sampler success at the exclusion
    // cap. Reuses the grid point when the cap is on the grid, otherwise
    // evaluates the cap in its own stream slot.
    let converging = if source == Source::Indistinguishable {
        let cap_estimate = match points.iter().find(|p| p.set_size == cfg.exclusion_cap) {
            Some(point) => point.estimate,
            None => {
                let successes =
                    aa_point(&tables, cfg, tag, unitary_index, CAP_SLOT, cfg.exclusion_cap);
                successes as f64 / trials as f64
            }
        };
        Some(cap_estimate >= cfg.success_threshold)
    } else {
        None
    };

    Ok(SuccessCurve {
        photons: cfg.photons,
        modes: cfg.modes,
        unitary_index,
        test: TestKind::RowNorm,
        source,
        points,
        converging,
    })
}

/// Row-norm-test success curve for a single interferometer.
///
/// Each point samples `trials_per_point` independent data sets from `source`
/// and reports the fraction assigned to the boson sampler by majority vote —
/// the success rate for indistinguishable data, the mislabeling rate for
/// uniform data.
pub fn success_curve(
    u: &Interferometer,
    s: &ModeConfig,
    source: Source,
    cfg: &ExperimentConfig,
) -> Result<SuccessCurve> {
    check_system(u, s, cfg)?;
    success_curve_at(u, s, source, cfg, 0)
}

/// One unitary of a Haar ensemble with its evaluated curves.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMember {
    pub unitary_index: usize,
    /// Seed the member's interferometer was drawn with
    /// (`derive_seed(master, [unitary-tag, index, 0, 0])`).
    pub unitary_seed: u64,
    pub bs_curve: SuccessCurve,
    pub uniform_curve: SuccessCurve,
}

impl EnsembleMember {
    pub fn converging(&self) -> bool {
        self.bs_curve.converging == Some(true)
    }
}

/// Ensemble mean and spread at one set size.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsemblePoint {
    pub set_size: usize,
    pub mean: f64,
    /// 1.5 population standard deviations across the averaged unitaries,
    /// matching the published shaded bands.
    pub band: f64,
}

/// Haar-averaged success curves with the convergence rule applied.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleCurve {
    pub photons: usize,
    pub modes: usize,
    pub members: Vec<EnsembleMember>,
    /// Mean boson-sampler success on indistinguishable data, converging
    /// unitaries only.
    pub bs_points: Vec<EnsemblePoint>,
    /// Mean fraction of uniform data mislabeled boson-sampler, over the same
    /// converging unitaries.
    pub uniform_points: Vec<EnsemblePoint>,
    pub converging_count: usize,
    pub unitary_count: usize,
}

impl EnsembleCurve {
    pub fn converging_fraction(&self) -> f64 {
        self.converging_count as f64 / self.unitary_count as f64
    }
}

fn ensemble_points(curves: Vec<&SuccessCurve>, cfg: &ExperimentConfig) -> Vec<EnsemblePoint> {
    cfg.set_sizes
        .iter()
        .enumerate()
        .map(|(j, &set_size)| {
            let estimates: Vec<f64> = curves.iter().map(|c| c.points[j].estimate).collect();
            let count = estimates.len() as f64;
            let mean = estimates.iter().sum::<f64>() / count;
            let variance = estimates.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / count;
            EnsemblePoint {
                set_size,
                mean,
                band: 1.5 * variance.sqrt(),
            }
        })
        .collect()
}

/// Haar-ensemble study of the row-norm test.
///
/// Draws `unitary_count` interferometers from seeds derived off the master
/// seed, evaluates each member's success curves on indistinguishable and
/// uniform data, classifies members by success at the exclusion cap, and
/// averages both curves over the converging members (the convergence rule
/// itself looks at boson-sampler success only). Errors if every member is
/// excluded.
pub fn haar_ensemble_curve(cfg: &ExperimentConfig) -> Result<EnsembleCurve> {
    cfg.validate()?;
    let s = cfg.input_config()?;
    let members: Vec<EnsembleMember> = (0..cfg.unitary_count)
        .into_par_iter()
        .map(|index| -> Result<EnsembleMember> {
            let unitary_seed = ensemble_unitary_seed(cfg, index);
            let u = haar_unitary(cfg.modes, unitary_seed)?;
            let bs_curve = success_curve_at(&u, &s, Source::Indistinguishable, cfg, index)?;
            let mut uniform_curve = success_curve_at(&u, &s, Source::Uniform, cfg, index)?;
            // The convergence flag is a property of the unitary; carry it on
            // both curves so result files are self-describing.
            uniform_curve.converging = bs_curve.converging;
            Ok(EnsembleMember {
                unitary_index: index,
                unitary_seed,
                bs_curve,
                uniform_curve,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let converging: Vec<&EnsembleMember> = members.iter().filter(|m| m.converging()).collect();
    if converging.is_empty() {
        return Err(Error::AllUnitariesExcluded);
    }
    let bs_points = ensemble_points(converging.iter().map(|m| &m.bs_curve).collect(), cfg);
    let uniform_points = ensemble_points(converging.iter().map(|m| &m.uniform_curve).collect(), cfg);
    Ok(EnsembleCurve {
        photons: cfg.photons,
        modes: cfg.modes,
        converging_count: converging.len(),
        unitary_count: cfg.unitary_count,
        members,
        bs_points,
        uniform_points,
    })
}

/// Outcome of the N_min scan for one unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct NminResult {
    pub unitary_index: usize,
    /// Smallest grid set size meeting both criteria; `None` if the scan
    /// exhausted the grid.
    pub n_min: Option<usize>,
    /// Boson-sampler success rate at the returned point (at the largest grid
    /// point if the scan failed).
    pub bs_success: f64,
    /// Fraction of uniform data labeled boson-sampler at the same point.
    pub uniform_bs_rate: f64,
}

/// N_min over a Haar ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct NminStudy {
    pub photons: usize,
    pub modes: usize,
    pub results: Vec<NminResult>,
    /// Mean N_min over the unitaries that reached it.
    pub mean_n_min: Option<f64>,
    pub reached_count: usize,
}

fn nmin_search_indexed(
    u: &Interferometer,
    s: &ModeConfig,
    cfg: &ExperimentConfig,
    unitary_index: usize,
) -> Result<NminResult> {
    let bs_tables = aa_tables(u, s, Source::Indistinguishable)?;
    let uniform_tables = aa_tables(u, s, Source::Uniform)?;
    let trials = cfg.trials_per_point as f64;
    let uniform_cap = 1.0 - cfg.success_threshold;
    let mut last = (0.0, 1.0);
    for (slot, &set_size) in cfg.set_sizes.iter().enumerate() {
        let bs_successes = aa_point(
            &bs_tables,
            cfg,
            TAG_NMIN + source_word(Source::Indistinguishable),
            unitary_index,
            slot as u64,
            set_size,
        );
        let uniform_bs = aa_point(
            &uniform_tables,
            cfg,
            TAG_NMIN + source_word(Source::Uniform),
            unitary_index,
            slot as u64,
            set_size,
        );
        let bs_success = bs_successes as f64 / trials;
        let uniform_bs_rate = uniform_bs as f64 / trials;
        if bs_success >= cfg.success_threshold && uniform_bs_rate <= uniform_cap {
            return Ok(NminResult {
                unitary_index,
                n_min: Some(set_size),
                bs_success,
                uniform_bs_rate,
            });
        }
        last = (bs_success, uniform_bs_rate);
    }
    Ok(NminResult {
        unitary_index,
        n_min: None,
        bs_success: last.0,
        uniform_bs_rate: last.1,
    })
}

/// Scan the set-size grid upward for the smallest data set at which the
/// row-norm test both accepts boson-sampler data (success >= threshold) and
/// rejects uniform data (mislabeling <= 1 - threshold).
pub fn nmin_search(u: &Interferometer, s: &ModeConfig, cfg: &ExperimentConfig) -> Result<NminResult> {
    check_system(u, s, cfg)?;
    nmin_search_indexed(u, s, cfg, 0)
}

/// [`nmin_search`] over a Haar ensemble, averaging N_min over the unitaries
/// that reach it within the grid.
pub fn nmin_haar_average(cfg: &ExperimentConfig) -> Result<NminStudy> {
    cfg.validate()?;
    let s = cfg.input_config()?;
    let results: Vec<NminResult> = (0..cfg.unitary_count)
        .into_par_iter()
        .map(|index| -> Result<NminResult> {
            let u = ensemble_unitary(cfg, index)?;
            nmin_search_indexed(&u, &s, cfg, index)
        })
        .collect::<Result<Vec<_>>>()?;
    let reached: Vec<usize> = results.iter().filter_map(|r| r.n_min).collect();
    let mean_n_min = if reached.is_empty() {
        None
    } else {
        Some(reached.iter().map(|&n| n as f64).sum::<f64>() / reached.len() as f64)
    };
    Ok(NminStudy {
        photons: cfg.photons,
        modes: cfg.modes,
        results,
        mean_n_min,
        reached_count: reached.len(),
    })
}

/// Sampling tables plus per-outcome band increments for the
/// likelihood-ratio harness. `increment[k] = i64::MIN` marks an outcome
/// with a vanishing model probability; observing it is a contract violation
/// reported with the outcome's probabilities.
struct LrTables {
    ind_sampler: CumulativeTable,
    dis_sampler: CumulativeTable,
    increments: Vec<i64>,
    p: Vec<f64>,
    q: Vec<f64>,
}

const LR_INVALID: i64 = i64::MIN;

fn lr_tables(u: &Interferometer, s: &ModeConfig, cfg: &ExperimentConfig) -> Result<LrTables> {
    let model_p = build_distribution(u, s, Source::Indistinguishable)?;
    let model_q = build_distribution(u, s, Source::Distinguishable)?;
    let p = model_p.probabilities().to_vec();
    let q = model_q.probabilities().to_vec();
    let increments = p
        .iter()
        .zip(&q)
        .map(|(&pk, &qk)| {
            if pk > 0.0 && qk > 0.0 {
                classify_ratio(cfg.k1, cfg.k2, pk, qk).value()
            } else {
                LR_INVALID
            }
        })
        .collect();
    Ok(LrTables {
        ind_sampler: CumulativeTable::new(&model_p),
        dis_sampler: CumulativeTable::new(&model_q),
        increments,
        p,
        q,
    })
}

impl LrTables {
    fn sampler(&self, source: Source) -> &CumulativeTable {
        match source {
            Source::Indistinguishable => &self.ind_sampler,
            _ => &self.dis_sampler,
        }
    }
}

/// One likelihood-ratio trial: true if the final counter is positive
/// (verdict indistinguishable).
fn lr_trial(tables: &LrTables, source: Source, set_size: usize, seed: u64) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = tables.sampler(source);
    let mut d = 0i64;
    for event in 0..set_size {
        let k = sampler.sample(&mut rng);
        let increment = tables.increments[k];
        if increment == LR_INVALID {
            return Err(Error::NonPositiveProbability {
                index: event,
                p_ind: tables.p[k],
                q_dis: tables.q[k],
            });
        }
        d += increment;
    }
    Ok(d > 0)
}

fn lr_curve_indexed(
    tables: &LrTables,
    source: Source,
    cfg: &ExperimentConfig,
    unitary_index: usize,
) -> Result<SuccessCurve> {
    let tag = TAG_LR_CURVE + source_word(source);
    let trials = cfg.trials_per_point as u64;
    let points = cfg
        .set_sizes
        .iter()
        .enumerate()
        .map(|(slot, &set_size)| {
            let successes: u64 = (0..cfg.trials_per_point)
                .into_par_iter()
                .map(|trial| -> Result<u64> {
                    let seed = derive_seed(
                        cfg.master_seed,
                        &[tag, unitary_index as u64, slot as u64, trial as u64],
                    );
                    Ok(lr_trial(tables, source, set_size, seed)? as u64)
                })
                .collect::<Result<Vec<u64>>>()?
                .iter()
                .sum();
            Ok(curve_point(set_size, successes, trials))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SuccessCurve {
        photons: cfg.photons,
        modes: cfg.modes,
        unitary_index,
        test: TestKind::LikelihoodRatio,
        source,
        points,
        converging: None,
    })
}

/// The two likelihood-ratio curves of one interferometer.
#[derive(Debug, Clone, PartialEq)]
pub struct LrCurves {
    /// Fraction of indistinguishable-sourced data sets with final D > 0
    /// (correct verdicts).
    pub indistinguishable: SuccessCurve,
    /// Fraction of distinguishable-sourced data sets with final D > 0
    /// (mislabelings; should fall toward zero).
    pub distinguishable: SuccessCurve,
}

/// Likelihood-ratio success curves for a single interferometer: data sets
/// are sampled from the exact indistinguishable and distinguishable models
/// and judged by the sign of the final counter D.
pub fn lr_success_curve(
    u: &Interferometer,
    s: &ModeConfig,
    cfg: &ExperimentConfig,
) -> Result<LrCurves> {
    check_system(u, s, cfg)?;
    lr_success_curve_indexed(u, s, cfg, 0)
}

fn lr_success_curve_indexed(
    u: &Interferometer,
    s: &ModeConfig,
    cfg: &ExperimentConfig,
    unitary_index: usize,
) -> Result<LrCurves> {
    let tables = lr_tables(u, s, cfg)?;
    Ok(LrCurves {
        indistinguishable: lr_curve_indexed(&tables, Source::Indistinguishable, cfg, unitary_index)?,
        distinguishable: lr_curve_indexed(&tables, Source::Distinguishable, cfg, unitary_index)?,
    })
}

/// Likelihood-ratio curves over a Haar ensemble (no exclusion rule; the
/// ensemble uses the same derived unitary seeds as [`haar_ensemble_curve`]).
pub fn lr_haar_ensemble(cfg: &ExperimentConfig) -> Result<Vec<LrCurves>> {
    cfg.validate()?;
    let s = cfg.input_config()?;
    (0..cfg.unitary_count)
        .into_par_iter()
        .map(|index| -> Result<LrCurves> {
            let u = ensemble_unitary(cfg, index)?;
            lr_success_curve_indexed(&u, &s, cfg, index)
        })
        .collect()
}
