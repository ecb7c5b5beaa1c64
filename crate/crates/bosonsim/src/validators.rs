//! Statistical validators: the row-norm test against the uniform sampler
//! and the pairwise likelihood-ratio test against distinguishable photons.
//!
//! Row-norm test. For an observed output T with scattering submatrix A
//! (rows: input modes, columns: observed output modes), the statistic is
//!
//! ```text
//! P = prod_{i=1..n} sum_{j=1..n} |A_{i,j}|^2
//! ```
//!
//! and a single event is assigned to the boson sampler iff P > (n/m)^n
//! (strictly; a tie counts for the uniform sampler). Data sets are judged
//! by majority vote, equivalently by the final sign of the counting walk
//! that steps +1 for each boson-sampler event and -1 otherwise.
//!
//! Likelihood-ratio test. Each event contributes the ratio R = p_ind/q_dis
//! of its model probabilities, thresholded into a counter increment with
//! constants 0 < k1 < 1 < k2:
//!
//! ```text
//! R >= k2            -> D += 2
//! 1/k1 <= R < k2     -> D += 1
//! k1 < R < 1/k1      -> D += 0   (inconclusive band)
//! 1/k2 < R <= k1     -> D -= 1
//! R <= 1/k2          -> D -= 2
//! ```
//!
//! The +1/-1 bands close on their outer endpoints (R = 1/k1 earns +1,
//! R = k1 earns -1), mirroring each other exactly: the comparisons are
//! evaluated in cross-multiplied form, so swapping the two models negates D
//! bit-exactly. D > 0 reads indistinguishable, D < 0 distinguishable,
//! D = 0 inconclusive.

use crate::distributions::NoCollisionDistribution;
use crate::error::{Error, Result};
use crate::modes::ModeConfig;
use crate::unitary::{check_config, Interferometer};

use crate::distributions::EventLog;

/// Default lower likelihood-ratio threshold.
pub const DEFAULT_K1: f64 = 0.9;
/// Default upper likelihood-ratio threshold.
pub const DEFAULT_K2: f64 = 1.5;

/// Verdict of the row-norm test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AaVerdict {
    BosonSampler,
    Uniform,
}

impl AaVerdict {
    pub fn label(self) -> &'static str {
        match self {
            AaVerdict::BosonSampler => "boson-sampler",
            AaVerdict::Uniform => "uniform",
        }
    }
}

/// Verdict of the likelihood-ratio test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LrVerdict {
    Indistinguishable,
    Distinguishable,
    Inconclusive,
}

impl LrVerdict {
    pub fn label(self) -> &'static str {
        match self {
            LrVerdict::Indistinguishable => "indistinguishable",
            LrVerdict::Distinguishable => "distinguishable",
            LrVerdict::Inconclusive => "inconclusive",
        }
    }
}

/// Which validator produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    RowNorm,
    LikelihoodRatio,
}

impl TestKind {
    pub fn label(self) -> &'static str {
        match self {
            TestKind::RowNorm => "aa",
            TestKind::LikelihoodRatio => "lr",
        }
    }
}

/// Decision for one observed event under the row-norm test.
#[derive(Debug, Clone, PartialEq)]
pub struct AaEventDecision {
    pub statistic: f64,
    pub threshold: f64,
    pub verdict: AaVerdict,
}

/// The event-by-event counting variable C of the row-norm test: +1 per
/// boson-sampler event, -1 per uniform event. `trace[k]` is C after event k.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingWalk {
    pub trace: Vec<i64>,
    pub verdict: AaVerdict,
}

impl CountingWalk {
    pub fn final_count(&self) -> i64 {
        *self.trace.last().unwrap_or(&0)
    }
}

/// The discrimination threshold (n/m)^n of the row-norm test.
pub fn aa_threshold(photons: usize, modes: usize) -> f64 {
    (photons as f64 / modes as f64).powi(photons as i32)
}

/// Row-norm statistic P for input s and observed output t.
pub fn aa_statistic(u: &Interferometer, s: &ModeConfig, t: &ModeConfig) -> Result<f64> {
    check_config(u, s, "input")?;
    check_config(u, t, "output")?;
    if s.photons() != t.photons() {
        return Err(Error::OccupationMismatch {
            expected: s.photons(),
            got: t.photons(),
        });
    }
    let matrix = u.matrix();
    let mut product = 1.0;
    for &si in s.modes() {
        let mut row_sum = 0.0;
        for &tj in t.modes() {
            row_sum += matrix.get(si, tj).norm_sqr();
        }
        product *= row_sum;
    }
    Ok(product)
}

/// Assign one event to boson sampler or uniform sampler.
pub fn aa_decide_event(
    u: &Interferometer,
    s: &ModeConfig,
    t: &ModeConfig,
) -> Result<AaEventDecision> {
    let statistic = aa_statistic(u, s, t)?;
    let threshold = aa_threshold(s.photons(), u.modes());
    let verdict = if statistic > threshold {
        AaVerdict::BosonSampler
    } else {
        AaVerdict::Uniform
    };
    Ok(AaEventDecision {
        statistic,
        threshold,
        verdict,
    })
}

fn check_log(u: &Interferometer, s: &ModeConfig, log: &EventLog) -> Result<()> {
    check_config(u, s, "input")?;
    if log.input() != s {
        return Err(Error::InvalidParameter {
            field: "log",
            message: format!(
                "event log was recorded for input {} but the test is for {s}",
                log.input()
            ),
        });
    }
    if log.is_empty() {
        return Err(Error::EmptyEventLog);
    }
    Ok(())
}

/// Majority vote over all events: boson sampler iff strictly more events
/// are assigned to it than to the uniform sampler (a tie reads uniform).
pub fn aa_majority(u: &Interferometer, s: &ModeConfig, log: &EventLog) -> Result<AaVerdict> {
    check_log(u, s, log)?;
    let mut bs = 0usize;
    for event in log.events() {
        if aa_decide_event(u, s, event)?.verdict == AaVerdict::BosonSampler {
            bs += 1;
        }
    }
    Ok(if 2 * bs > log.len() {
        AaVerdict::BosonSampler
    } else {
        AaVerdict::Uniform
    })
}

/// The full counting walk. Its final sign reproduces [`aa_majority`]:
/// C > 0 iff the boson-sampler events hold a strict majority.
pub fn aa_counting_walk(u: &Interferometer, s: &ModeConfig, log: &EventLog) -> Result<CountingWalk> {
    check_log(u, s, log)?;
    let mut trace = Vec::with_capacity(log.len());
    let mut c = 0i64;
    for event in log.events() {
        c += match aa_decide_event(u, s, event)?.verdict {
            AaVerdict::BosonSampler => 1,
            AaVerdict::Uniform => -1,
        };
        trace.push(c);
    }
    let verdict = if c > 0 {
        AaVerdict::BosonSampler
    } else {
        AaVerdict::Uniform
    };
    Ok(CountingWalk { trace, verdict })
}

/// Per-event increment of the likelihood-ratio counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LrIncrement {
    PlusTwo,
    PlusOne,
    Inconclusive,
    MinusOne,
    MinusTwo,
}

impl LrIncrement {
    pub fn value(self) -> i64 {
        match self {
            LrIncrement::PlusTwo => 2,
            LrIncrement::PlusOne => 1,
            LrIncrement::Inconclusive => 0,
            LrIncrement::MinusOne => -1,
            LrIncrement::MinusTwo => -2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LrIncrement::PlusTwo => "+2",
            LrIncrement::PlusOne => "+1",
            LrIncrement::Inconclusive => "inconclusive",
            LrIncrement::MinusOne => "-1",
            LrIncrement::MinusTwo => "-2",
        }
    }
}

/// Running state of the likelihood-ratio test: the counter D and the tally
/// of increments seen so far.
#[derive(Debug, Clone, PartialEq)]
pub struct LrState {
    k1: f64,
    k2: f64,
    d: i64,
    plus_two: u64,
    plus_one: u64,
    inconclusive: u64,
    minus_one: u64,
    minus_two: u64,
}

impl LrState {
    /// Fresh state; requires 0 < k1 < 1 < k2.
    pub fn new(k1: f64, k2: f64) -> Result<Self> {
        if !k1.is_finite() || !(0.0 < k1 && k1 < 1.0) {
            return Err(Error::InvalidParameter {
                field: "k1",
                message: format!("k1 must lie in (0, 1), got {k1}"),
            });
        }
        if !k2.is_finite() || k2 <= 1.0 {
            return Err(Error::InvalidParameter {
                field: "k2",
                message: format!("k2 must exceed 1, got {k2}"),
            });
        }
        Ok(LrState {
            k1,
            k2,
            d: 0,
            plus_two: 0,
            plus_one: 0,
            inconclusive: 0,
            minus_one: 0,
            minus_two: 0,
        })
    }

    pub fn thresholds(&self) -> (f64, f64) {
        (self.k1, self.k2)
    }

    /// The counter D.
    pub fn d(&self) -> i64 {
        self.d
    }

    /// Tallies as (+2, +1, inconclusive, -1, -2) counts.
    pub fn tallies(&self) -> (u64, u64, u64, u64, u64) {
        (
            self.plus_two,
            self.plus_one,
            self.inconclusive,
            self.minus_one,
            self.minus_two,
        )
    }

    pub fn events_seen(&self) -> u64 {
        self.plus_two + self.plus_one + self.inconclusive + self.minus_one + self.minus_two
    }

    /// Classify one event's model probabilities and fold it into the state.
    ///
    /// All band tests are cross-multiplied (`p >= k2*q` instead of
    /// `p/q >= k2`) so that exchanging p and q lands in the exactly
    /// mirrored band — no division rounding can break the antisymmetry.
    pub fn update(&mut self, p_ind: f64, q_dis: f64) -> Result<LrIncrement> {
        if !(p_ind > 0.0) || !(q_dis > 0.0) || !p_ind.is_finite() || !q_dis.is_finite() {
            return Err(Error::NonPositiveProbability {
                index: self.events_seen() as usize,
                p_ind,
                q_dis,
            });
        }
        let increment = classify_ratio(self.k1, self.k2, p_ind, q_dis);
        match increment {
            LrIncrement::PlusTwo => self.plus_two += 1,
            LrIncrement::PlusOne => self.plus_one += 1,
            LrIncrement::Inconclusive => self.inconclusive += 1,
            LrIncrement::MinusOne => self.minus_one += 1,
            LrIncrement::MinusTwo => self.minus_two += 1,
        }
        self.d += increment.value();
        debug_assert_eq!(
            self.d,
            2 * self.plus_two as i64 + self.plus_one as i64
                - self.minus_one as i64
                - 2 * self.minus_two as i64
        );
        Ok(increment)
    }

    /// Final verdict from the sign of D.
    pub fn verdict(&self) -> LrVerdict {
        match self.d.cmp(&0) {
            std::cmp::Ordering::Greater => LrVerdict::Indistinguishable,
            std::cmp::Ordering::Less => LrVerdict::Distinguishable,
            std::cmp::Ordering::Equal => LrVerdict::Inconclusive,
        }
    }
}

/// Band classification of the ratio p_ind/q_dis, in cross-multiplied form.
/// Callers must have checked that both probabilities are positive.
pub(crate) fn classify_ratio(k1: f64, k2: f64, p_ind: f64, q_dis: f64) -> LrIncrement {
    if p_ind >= k2 * q_dis {
        LrIncrement::PlusTwo // R >= k2
    } else if k1 * p_ind >= q_dis {
        LrIncrement::PlusOne // R >= 1/k1
    } else if q_dis >= k2 * p_ind {
        LrIncrement::MinusTwo // R <= 1/k2
    } else if k1 * q_dis >= p_ind {
        LrIncrement::MinusOne // R <= k1
    } else {
        LrIncrement::Inconclusive
    }
}

/// One row of a [`VerdictReport`]: an event, its statistic (P or R), the
/// per-event decision and the running counter (C or D).
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub index: usize,
    pub modes: ModeConfig,
    pub statistic: f64,
    pub decision: &'static str,
    pub cumulative: i64,
}

/// Event-by-event record of a validator run plus its final verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct VerdictReport {
    pub test: TestKind,
    pub rows: Vec<ReportRow>,
    pub verdict_label: &'static str,
    pub final_cumulative: i64,
}

/// Run the row-norm test and keep the per-event record.
pub fn aa_report(u: &Interferometer, s: &ModeConfig, log: &EventLog) -> Result<VerdictReport> {
    let walk = aa_counting_walk(u, s, log)?;
    let mut rows = Vec::with_capacity(log.len());
    for (index, event) in log.events().iter().enumerate() {
        let decision = aa_decide_event(u, s, event)?;
        rows.push(ReportRow {
            index,
            modes: event.clone(),
            statistic: decision.statistic,
            decision: decision.verdict.label(),
            cumulative: walk.trace[index],
        });
    }
    Ok(VerdictReport {
        test: TestKind::RowNorm,
        rows,
        verdict_label: walk.verdict.label(),
        final_cumulative: walk.final_count(),
    })
}

/// Run the likelihood-ratio test of `model_p` against `model_q` over a log.
///
/// Every observed event must have positive probability under both models;
/// an event at which both vanish is a support violation and errors out
/// loudly rather than being clamped or skipped.
pub fn lr_verdict(
    u: &Interferometer,
    s: &ModeConfig,
    log: &EventLog,
    model_p: &NoCollisionDistribution,
    model_q: &NoCollisionDistribution,
    k1: f64,
    k2: f64,
) -> Result<VerdictReport> {
    check_log(u, s, log)?;
    for (name, model) in [("model_p", model_p), ("model_q", model_q)] {
        if model.modes() != u.modes() || model.photons() != s.photons() || model.input() != s {
            return Err(Error::InvalidParameter {
                field: "models",
                message: format!(
                    "{name} was built for input {} over {} modes, expected {s} over {}",
                    model.input(),
                    model.modes(),
                    u.modes()
                ),
            });
        }
    }
    let mut state = LrState::new(k1, k2)?;
    let mut rows = Vec::with_capacity(log.len());
    for (index, event) in log.events().iter().enumerate() {
        let k = model_p.index_of(event).ok_or_else(|| Error::EventOutsideSupport {
            index,
            modes: event.to_string(),
        })?;
        let p = model_p.probabilities()[k];
        let q = model_q.probabilities()[k];
        let increment = state.update(p, q)?;
        rows.push(ReportRow {
            index,
            modes: event.clone(),
            statistic: p / q,
            decision: increment.label(),
            cumulative: state.d(),
        });
    }
    Ok(VerdictReport {
        test: TestKind::LikelihoodRatio,
        rows,
        verdict_label: state.verdict().label(),
        final_cumulative: state.d(),
    })
}
