//! Mode configurations and output-pattern enumeration.
//!
//! A no-collision configuration of n photons in m modes is an n-subset of
//! {0, .., m-1}. All enumeration in this crate is lexicographic over the
//! sorted mode lists, and every table indexed by outputs (distributions,
//! sampling tables, result files) follows that single ordering.

use num_integer::binomial;

use crate::error::{Error, Result};

/// A no-collision configuration: n distinct modes out of m, stored ascending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeConfig {
    modes: Vec<usize>,
    mode_count: usize,
}

impl ModeConfig {
    /// Build from a list of occupied modes (any order; sorted internally).
    ///
    /// Rejects an empty list, repeated modes, and indices >= `mode_count`.
    pub fn new(mut occupied: Vec<usize>, mode_count: usize) -> Result<Self> {
        if occupied.is_empty() {
            return Err(Error::EmptyModeConfig);
        }
        if occupied.len() > mode_count {
            return Err(Error::TooManyPhotons {
                photons: occupied.len(),
                modes: mode_count,
            });
        }
        occupied.sort_unstable();
        for pair in occupied.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateMode { index: pair[0] });
            }
        }
        if let Some(&last) = occupied.last() {
            if last >= mode_count {
                return Err(Error::ModeOutOfRange {
                    index: last,
                    modes: mode_count,
                });
            }
        }
        Ok(ModeConfig {
            modes: occupied,
            mode_count,
        })
    }

    /// Parse an occupation string over m modes, e.g. `0,1,1,1,0`.
    ///
    /// Entries beyond 1 are rejected: collision inputs are outside this
    /// toolkit's scope.
    pub fn from_occupation_str(s: &str, mode_count: usize) -> Result<Self> {
        let mut occupied = Vec::new();
        let fields: Vec<&str> = s.split(|ch| ch == ',' || ch == ' ').filter(|f| !f.is_empty()).collect();
        if fields.len() != mode_count {
            return Err(Error::InvalidParameter {
                field: "input",
                message: format!(
                    "occupation string has {} entries, expected one per mode ({mode_count})",
                    fields.len()
                ),
            });
        }
        for (mode, field) in fields.iter().enumerate() {
            match *field {
                "0" => {}
                "1" => occupied.push(mode),
                other => {
                    return Err(Error::InvalidParameter {
                        field: "input",
                        message: format!("occupation entry `{other}` at mode {mode} is not 0 or 1"),
                    })
                }
            }
        }
        ModeConfig::new(occupied, mode_count)
    }

    /// Occupied modes, ascending.
    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    /// Number of photons (n).
    pub fn photons(&self) -> usize {
        self.modes.len()
    }

    /// Total number of modes (m).
    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    /// Occupation-number view: a length-m vector of 0/1.
    pub fn occupations(&self) -> Vec<usize> {
        let mut occ = vec![0; self.mode_count];
        for &mode in &self.modes {
            occ[mode] = 1;
        }
        occ
    }

    /// Space-separated ascending mode list, e.g. `0 3 5` (the event-log form).
    pub fn to_mode_string(&self) -> String {
        let strings: Vec<String> = self.modes.iter().map(|m| m.to_string()).collect();
        strings.join(" ")
    }
}

impl std::fmt::Display for ModeConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{{}}}", self.to_mode_string())
    }
}

/// A general output pattern: per-mode photon counts (collisions allowed).
///
/// Only used by the small-system full-space cross-checks; the main pipeline
/// works on no-collision [`ModeConfig`]s.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupationPattern {
    counts: Vec<usize>,
}

impl OccupationPattern {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyModeConfig);
        }
        Ok(OccupationPattern { counts })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn mode_count(&self) -> usize {
        self.counts.len()
    }

    pub fn photons(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Product of factorials of the per-mode counts (the collision weight).
    pub fn count_factorial_product(&self) -> f64 {
        self.counts
            .iter()
            .map(|&c| (1..=c).map(|k| k as f64).product::<f64>().max(1.0))
            .product()
    }

    /// True if no mode holds more than one photon.
    pub fn is_no_collision(&self) -> bool {
        self.counts.iter().all(|&c| c <= 1)
    }
}

/// C(m, n) as u64.
pub fn no_collision_count(modes: usize, photons: usize) -> u64 {
    binomial(modes as u64, photons as u64)
}

/// All no-collision configurations of `photons` photons in `modes` modes, in
/// lexicographic order of the ascending mode lists.
///
/// The ordering is part of the file-format and sampling contracts: index k in
/// any support-indexed table refers to the k-th element of this enumeration.
pub fn enumerate_no_collision(modes: usize, photons: usize) -> Result<Vec<ModeConfig>> {
    if photons == 0 {
        return Err(Error::EmptyModeConfig);
    }
    if photons > modes {
        return Err(Error::TooManyPhotons { photons, modes });
    }
    let expected = no_collision_count(modes, photons) as usize;
    let mut out = Vec::with_capacity(expected);
    let mut current: Vec<usize> = (0..photons).collect();
    loop {
        out.push(ModeConfig {
            modes: current.clone(),
            mode_count: modes,
        });
        // Advance to the next combination: bump the rightmost index that can
        // still grow, then reset everything after it.
        let mut i = photons;
        loop {
            if i == 0 {
                debug_assert_eq!(out.len(), expected);
                return Ok(out);
            }
            i -= 1;
            if current[i] < modes - photons + i {
                current[i] += 1;
                for j in i + 1..photons {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// All occupation patterns of `photons` photons in `modes` modes (collisions
/// included), lexicographic by count vector. Support for the full-space
/// cross-checks; grows as C(n+m-1, m-1), so keep (n, m) small.
pub fn enumerate_occupations(modes: usize, photons: usize) -> Result<Vec<OccupationPattern>> {
    if modes == 0 {
        return Err(Error::EmptyModeConfig);
    }
    let mut out = Vec::new();
    let mut counts = vec![0usize; modes];
    fn recurse(counts: &mut Vec<usize>, mode: usize, remaining: usize, out: &mut Vec<OccupationPattern>) {
        if mode == counts.len() - 1 {
            counts[mode] = remaining;
            out.push(OccupationPattern {
                counts: counts.clone(),
            });
            return;
        }
        for here in 0..=remaining {
            counts[mode] = here;
            recurse(counts, mode + 1, remaining - here, out);
        }
    }
    recurse(&mut counts, 0, photons, &mut out);
    Ok(out)
}
