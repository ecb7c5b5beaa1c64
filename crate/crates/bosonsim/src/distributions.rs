//! Exact output distributions and event sampling.
//!
//! For a no-collision input S and output T of n photons in an m-mode
//! interferometer U, with A the scattering submatrix (rows S, columns T):
//!
//! * indistinguishable photons:  p_raw(T) = |per(A)|^2
//! * distinguishable photons:    q_raw(T) = per(B), B_ij = |A_ij|^2
//! * uniform sampler:            w(T) = 1
//!
//! [`build_distribution`] normalizes the raw weights over the
//! lexicographically ordered no-collision support. Post-selecting on
//! no-collision outputs is exactly this renormalization, which is why raw
//! weights need no 1/n! style prefactors here; the full-space cross-check
//! [`full_space_probability`] carries the collision factorials explicitly
//! and is the oracle tying the two pictures together.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{permanent, ComplexMatrix};
use crate::modes::{enumerate_no_collision, ModeConfig, OccupationPattern};
use crate::unitary::{check_config, submatrix, Interferometer};

/// Largest photon number accepted by [`full_space_probability`].
pub const FULL_SPACE_PHOTON_LIMIT: usize = 4;
/// Largest mode count accepted by [`full_space_probability`].
pub const FULL_SPACE_MODE_LIMIT: usize = 8;

/// The three event sources the toolkit can simulate and test against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    /// Indistinguishable bosons: amplitudes interfere (permanent of A).
    Indistinguishable,
    /// Distinguishable photons: classical transfer probabilities
    /// (permanent of |A|^2).
    Distinguishable,
    /// Uniform over the no-collision outputs.
    Uniform,
}

impl Source {
    pub const ALL: [Source; 3] = [
        Source::Indistinguishable,
        Source::Distinguishable,
        Source::Uniform,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Source::Indistinguishable => "indistinguishable",
            Source::Distinguishable => "distinguishable",
            Source::Uniform => "uniform",
        }
    }
}

impl std::fmt::Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "indistinguishable" => Ok(Source::Indistinguishable),
            "distinguishable" => Ok(Source::Distinguishable),
            "uniform" => Ok(Source::Uniform),
            other => Err(Error::InvalidParameter {
                field: "source",
                message: format!(
                    "`{other}` is not a source (expected indistinguishable, distinguishable or uniform)"
                ),
            }),
        }
    }
}

/// Unnormalized boson-sampling weight |per(A_{S,T})|^2.
pub fn bs_probability_raw(u: &Interferometer, s: &ModeConfig, t: &ModeConfig) -> Result<f64> {
    let a = submatrix(u, s, t)?;
    Ok(permanent(&a)?.norm_sqr())
}

/// Unnormalized distinguishable-photon weight per(B), B_ij = |A_ij|^2.
///
/// Equal to the sum over photon-to-mode assignments of products of
/// single-photon transfer probabilities, hence real and nonnegative; the
/// tiny negative values floating-point cancellation can produce are clamped.
pub fn dist_probability_raw(u: &Interferometer, s: &ModeConfig, t: &ModeConfig) -> Result<f64> {
    let a = submatrix(u, s, t)?;
    let b = a.map(|z| Complex64::new(z.norm_sqr(), 0.0));
    Ok(permanent(&b)?.re.max(0.0))
}

/// Exact output probability over the *full* Fock space (collisions
/// included) for small systems; the independent check that no-collision
/// post-selection is a plain renormalization.
///
/// The event matrix repeats the column of output mode j `mu_j` times
/// (against input rows S), and the result carries the 1/prod(mu_j!)
/// collision factor. Guarded to n <= 4, m <= 8: the full space grows too
/// fast for anything larger, and this function is an oracle, not a pipeline
/// stage.
pub fn full_space_probability(
    u: &Interferometer,
    s: &ModeConfig,
    mu: &OccupationPattern,
    source: Source,
) -> Result<f64> {
    let n = s.photons();
    let m = u.modes();
    if n > FULL_SPACE_PHOTON_LIMIT {
        return Err(Error::DimensionTooLarge {
            context: "full_space_probability",
            n,
            limit: FULL_SPACE_PHOTON_LIMIT,
        });
    }
    if m > FULL_SPACE_MODE_LIMIT {
        return Err(Error::DimensionTooLarge {
            context: "full_space_probability",
            n: m,
            limit: FULL_SPACE_MODE_LIMIT,
        });
    }
    check_config(u, s, "input")?;
    if mu.mode_count() != m {
        return Err(Error::InvalidParameter {
            field: "mu",
            message: format!(
                "occupation pattern covers {} modes but the interferometer has {m}",
                mu.mode_count()
            ),
        });
    }
    if mu.photons() != n {
        return Err(Error::OccupationMismatch {
            expected: n,
            got: mu.photons(),
        });
    }

    // Rows: input modes. Columns: output modes, one column per photon, so
    // mode j contributes mu_j identical columns.
    let mut out_modes = Vec::with_capacity(n);
    for (mode, &count) in mu.counts().iter().enumerate() {
        for _ in 0..count {
            out_modes.push(mode);
        }
    }
    let a = ComplexMatrix::from_fn(n, n, |i, j| u.matrix().get(s.modes()[i], out_modes[j]))?;
    let weight = match source {
        Source::Indistinguishable => permanent(&a)?.norm_sqr(),
        Source::Distinguishable => {
            let b = a.map(|z| Complex64::new(z.norm_sqr(), 0.0));
            permanent(&b)?.re.max(0.0)
        }
        Source::Uniform => {
            return Err(Error::InvalidParameter {
                field: "source",
                message: "full-space probability is defined for the photon models only".into(),
            })
        }
    };
    Ok(weight / mu.count_factorial_product())
}

/// A normalized probability distribution over the no-collision outputs of a
/// fixed (interferometer, input, source) triple.
///
/// The support is the lexicographic enumeration of n-subsets of m modes;
/// every index-based artifact (sampling tables, CSV rows) refers to that
/// ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct NoCollisionDistribution {
    input: ModeConfig,
    source: Source,
    unitary_ref: String,
    support: Vec<ModeConfig>,
    probabilities: Vec<f64>,
}

impl NoCollisionDistribution {
    pub fn input(&self) -> &ModeConfig {
        &self.input
    }

    pub fn source(&self) -> Source {
        self.source
    }

    /// Display form of the provenance of the interferometer this was built
    /// from; carried into event logs.
    pub fn unitary_ref(&self) -> &str {
        &self.unitary_ref
    }

    pub fn modes(&self) -> usize {
        self.input.mode_count()
    }

    pub fn photons(&self) -> usize {
        self.input.photons()
    }

    pub fn support(&self) -> &[ModeConfig] {
        &self.support
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Index of `t` in the lexicographic support.
    pub fn index_of(&self, t: &ModeConfig) -> Option<usize> {
        self.support.binary_search(t).ok()
    }

    pub fn probability_of(&self, t: &ModeConfig) -> Option<f64> {
        self.index_of(t).map(|k| self.probabilities[k])
    }

    fn shape_label(&self) -> String {
        format!(
            "n={}, m={}, source={}",
            self.photons(),
            self.modes(),
            self.source
        )
    }
}

/// Build the normalized no-collision distribution for one source.
///
/// Weights for all support elements are computed independently (in parallel
/// for large supports) and then normalized with a single sequential sum so
/// the result does not depend on thread scheduling. If every raw weight is
/// zero — e.g. two photons into a balanced coupler, where interference
/// forbids the only no-collision output — the model has no mass on the
/// no-collision space and this is an error, not a uniform fallback.
pub fn build_distribution(
    u: &Interferometer,
    s: &ModeConfig,
    source: Source,
) -> Result<NoCollisionDistribution> {
    check_config(u, s, "input")?;
    let support = enumerate_no_collision(u.modes(), s.photons())?;
    let weights: Vec<f64> = match source {
        Source::Uniform => vec![1.0; support.len()],
        Source::Indistinguishable => support
            .par_iter()
            .map(|t| bs_probability_raw(u, s, t))
            .collect::<Result<_>>()?,
        Source::Distinguishable => support
            .par_iter()
            .map(|t| dist_probability_raw(u, s, t))
            .collect::<Result<_>>()?,
    };
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateDistribution);
    }
    let probabilities = weights.iter().map(|w| w / total).collect();
    Ok(NoCollisionDistribution {
        input: s.clone(),
        source,
        unitary_ref: u.provenance().to_string(),
        support,
        probabilities,
    })
}

/// Total variation distance (1/2) sum_k |p_k - q_k| between two
/// distributions over the same support.
pub fn variation_distance(
    a: &NoCollisionDistribution,
    b: &NoCollisionDistribution,
) -> Result<f64> {
    if a.photons() != b.photons() || a.modes() != b.modes() {
        return Err(Error::SupportMismatch {
            left: a.shape_label(),
            right: b.shape_label(),
        });
    }
    Ok(a.probabilities
        .iter()
        .zip(&b.probabilities)
        .map(|(p, q)| (p - q).abs())
        .sum::<f64>()
        / 2.0)
}

/// Cumulative-sum table for inverse-CDF sampling of a distribution.
///
/// Built once per distribution and reused across trials; `sample` draws one
/// uniform variate and binary-searches the table.
#[derive(Debug, Clone)]
pub struct CumulativeTable {
    cdf: Vec<f64>,
}

impl CumulativeTable {
    pub fn new(d: &NoCollisionDistribution) -> Self {
        let mut cdf = Vec::with_capacity(d.probabilities.len());
        let mut acc = 0.0;
        for p in &d.probabilities {
            acc += p;
            cdf.push(acc);
        }
        // The running sum ends within an ulp of 1; pin it so every draw from
        // [0, 1) lands inside the table.
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        CumulativeTable { cdf }
    }

    /// Sample a support index.
    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        let idx = self.cdf.partition_point(|&c| c <= u);
        idx.min(self.cdf.len() - 1)
    }
}

/// An ordered record of observed output configurations plus the metadata
/// needed to reproduce or audit it.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    input: ModeConfig,
    unitary_ref: String,
    source_label: String,
    seed: Option<u64>,
    events: Vec<ModeConfig>,
}

impl EventLog {
    /// Assemble a log, checking every event is a no-collision configuration
    /// of the same shape as the input.
    pub fn new(
        input: ModeConfig,
        unitary_ref: impl Into<String>,
        source_label: impl Into<String>,
        seed: Option<u64>,
        events: Vec<ModeConfig>,
    ) -> Result<Self> {
        for (index, event) in events.iter().enumerate() {
            if event.mode_count() != input.mode_count() || event.photons() != input.photons() {
                return Err(Error::InvalidParameter {
                    field: "events",
                    message: format!(
                        "event {index} ({event}) does not match the input shape (n={}, m={})",
                        input.photons(),
                        input.mode_count()
                    ),
                });
            }
        }
        Ok(EventLog {
            input,
            unitary_ref: unitary_ref.into(),
            source_label: source_label.into(),
            seed,
            events,
        })
    }

    pub fn input(&self) -> &ModeConfig {
        &self.input
    }

    pub fn unitary_ref(&self) -> &str {
        &self.unitary_ref
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn events(&self) -> &[ModeConfig] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// Draw `count` i.i.d. events from `d`, deterministically in `seed`.
pub fn sample_events(d: &NoCollisionDistribution, count: usize, seed: u64) -> Result<EventLog> {
    if count == 0 {
        return Err(Error::InvalidParameter {
            field: "events",
            message: "need at least one event".into(),
        });
    }
    let table = CumulativeTable::new(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let events = (0..count)
        .map(|_| d.support[table.sample(&mut rng)].clone())
        .collect();
    EventLog::new(
        d.input.clone(),
        d.unitary_ref.clone(),
        d.source.label(),
        Some(seed),
        events,
    )
}
