//! Linear-optical circuits: phase shifters and adjacent-mode couplers.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! * A coupler of transmissivity tau on modes (p, p+1) acts as
//!   [[sqrt(tau), i*sqrt(1-tau)], [i*sqrt(1-tau), sqrt(tau)]].
//! * A phase shifter multiplies one mode by e^{i*phi}, phi in [0, 2*pi).
//! * [`compose`] applies elements in list order to the input state, so the
//!   composed matrix is E_k * ... * E_2 * E_1 (first element rightmost).
//!
//! [`reck_decompose`] inverts [`compose`] for any unitary: it peels the
//! matrix down to a diagonal by annihilating entries row by row from the
//! bottom with phase+coupler pairs (the triangular mesh), then absorbs the
//! leftover diagonal into per-mode phases.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::unitary::{Interferometer, Provenance};

/// Recomposition accuracy contract for [`reck_decompose`].
pub const RECK_TOLERANCE: f64 = 1e-10;

/// One physical element of a circuit.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    /// Beam-splitting coupler between adjacent modes `(p, p+1)`.
    Coupler { modes: (usize, usize), tau: f64 },
    /// Phase shifter on a single mode.
    Phase { mode: usize, phi: f64 },
}

/// An ordered list of elements over a fixed number of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    modes: usize,
    elements: Vec<Element>,
}

impl Circuit {
    pub fn new(modes: usize, elements: Vec<Element>) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidParameter {
                field: "modes",
                message: "circuit needs at least one mode".into(),
            });
        }
        for (index, element) in elements.iter().enumerate() {
            let fail = |message: String| Error::InvalidCircuitElement { index, message };
            match element {
                Element::Coupler { modes: (p, q), tau } => {
                    if *q != p + 1 || *q >= modes {
                        return Err(fail(format!(
                            "coupler must act on adjacent modes (p, p+1) within {modes} modes, got ({p}, {q})"
                        )));
                    }
                    if !tau.is_finite() || !(0.0..=1.0).contains(tau) {
                        return Err(fail(format!("transmissivity {tau} outside [0, 1]")));
                    }
                }
                Element::Phase { mode, phi } => {
                    if *mode >= modes {
                        return Err(fail(format!("phase mode {mode} out of range for {modes} modes")));
                    }
                    if !phi.is_finite() || !(0.0..TAU).contains(phi) {
                        return Err(fail(format!("phase {phi} outside [0, 2*pi)")));
                    }
                }
            }
        }
        Ok(Circuit { modes, elements })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn coupler_count(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| matches!(e, Element::Coupler { .. }))
            .count()
    }

    pub fn phase_count(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| matches!(e, Element::Phase { .. }))
            .count()
    }
}

/// Wrap an angle into [0, 2*pi).
pub fn normalize_angle(phi: f64) -> f64 {
    let wrapped = phi.rem_euclid(TAU);
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

fn coupler_block(tau: f64) -> [[Complex64; 2]; 2] {
    let t = tau.sqrt();
    let r = (1.0 - tau).sqrt();
    let ir = Complex64::new(0.0, r);
    [
        [Complex64::new(t, 0.0), ir],
        [ir, Complex64::new(t, 0.0)],
    ]
}

/// Left-multiply `m` in place by `element` embedded into the full mode space.
fn apply_element(m: &mut ComplexMatrix, element: &Element) {
    let cols = m.cols();
    match element {
        Element::Coupler { modes: (p, q), tau } => {
            let b = coupler_block(*tau);
            for c in 0..cols {
                let top = m.get(*p, c);
                let bottom = m.get(*q, c);
                m.set(*p, c, b[0][0] * top + b[0][1] * bottom);
                m.set(*q, c, b[1][0] * top + b[1][1] * bottom);
            }
        }
        Element::Phase { mode, phi } => {
            let factor = Complex64::from_polar(1.0, *phi);
            for c in 0..cols {
                let v = m.get(*mode, c);
                m.set(*mode, c, factor * v);
            }
        }
    }
}

/// Multiply the circuit out into an interferometer.
///
/// The empty circuit composes to the identity. The result's provenance is a
/// generic circuit reference; callers that know the circuit's origin can
/// attach a better one via [`Interferometer::with_provenance`].
pub fn compose(circuit: &Circuit) -> Result<Interferometer> {
    let mut u = ComplexMatrix::identity(circuit.modes);
    for element in &circuit.elements {
        apply_element(&mut u, element);
    }
    Interferometer::new(
        u,
        Provenance::Circuit {
            reference: format!("{} elements on {} modes", circuit.elements.len(), circuit.modes),
        },
    )
}

/// Random interferometer in the style of a physical chip: `layers` rounds of
/// uniformly random per-mode phases, each followed by a brick-wall row of
/// balanced (tau = 1/2) couplers. Odd layers shift the coupler row by one
/// mode so the network mixes all modes.
///
/// Deterministic in `seed`: phases are drawn mode-ascending within each
/// layer from a stream seeded with `seed`.
pub fn random_phase_network(modes: usize, layers: usize, seed: u64) -> Result<Circuit> {
    if modes < 2 {
        return Err(Error::InvalidParameter {
            field: "modes",
            message: format!("random phase network needs at least 2 modes, got {modes}"),
        });
    }
    if layers == 0 {
        return Err(Error::InvalidParameter {
            field: "layers",
            message: "need at least one layer".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut elements = Vec::new();
    for layer in 0..layers {
        for mode in 0..modes {
            let phi: f64 = rng.random::<f64>() * TAU;
            elements.push(Element::Phase {
                mode,
                phi: normalize_angle(phi),
            });
        }
        let mut p = layer % 2;
        while p + 1 < modes {
            elements.push(Element::Coupler {
                modes: (p, p + 1),
                tau: 0.5,
            });
            p += 2;
        }
    }
    Circuit::new(modes, elements)
}

/// Decompose a unitary into the triangular mesh: at most m(m-1)/2 couplers
/// with attached phases, plus final per-mode phases, whose [`compose`]
/// reproduces the input within [`RECK_TOLERANCE`] (max-norm).
///
/// Entries are annihilated bottom row first, left to right within each row,
/// by right-multiplying with the inverse of a phase+coupler pair; unitarity
/// then clears the mirrored column entries for free. Exactly trivial
/// elements (tau = 1, phi = 0) are dropped, so e.g. a diagonal input yields
/// phases only and the identity yields an empty circuit.
pub fn reck_decompose(u: &Interferometer) -> Result<Circuit> {
    let m = u.modes();
    let mut w = u.matrix().clone();
    let mut elements = Vec::new();

    for row in (1..m).rev() {
        for p in 0..row {
            let a = w.get(row, p);
            let b = w.get(row, p + 1);
            if a == Complex64::ZERO {
                continue; // already annihilated; the pair would be the identity
            }
            // Solve sqrt(tau) e^{-i phi} a = i sqrt(1-tau) b for (tau, phi).
            let (tau, phi) = if b == Complex64::ZERO {
                (0.0, 0.0)
            } else {
                let tau = b.norm_sqr() / (a.norm_sqr() + b.norm_sqr());
                (tau, normalize_angle(a.arg() - b.arg() - FRAC_PI_2))
            };
            if phi != 0.0 {
                elements.push(Element::Phase { mode: p, phi });
            }
            elements.push(Element::Coupler {
                modes: (p, p + 1),
                tau,
            });
            // Right-multiply w by the pair's inverse: columns p, p+1 mix as
            // w[:, p], w[:, p+1] <- block columns of (coupler * phase)^dagger.
            let t = tau.sqrt();
            let r = (1.0 - tau).sqrt();
            let e_phase = Complex64::from_polar(1.0, -phi);
            let d00 = e_phase * t;
            let d01 = e_phase * Complex64::new(0.0, -r);
            let d10 = Complex64::new(0.0, -r);
            let d11 = Complex64::new(t, 0.0);
            for i in 0..m {
                let left = w.get(i, p);
                let right = w.get(i, p + 1);
                w.set(i, p, left * d00 + right * d10);
                w.set(i, p + 1, left * d01 + right * d11);
            }
        }
    }

    // What is left is diagonal (up to the input's unitarity error); absorb
    // its phases.
    for mode in 0..m {
        let phi = normalize_angle(w.get(mode, mode).arg());
        if phi != 0.0 {
            elements.push(Element::Phase { mode, phi });
        }
    }

    let circuit = Circuit::new(m, elements)?;
    let rebuilt = compose(&circuit)?;
    let residual = rebuilt
        .matrix()
        .max_abs_diff(u.matrix())
        .expect("same dimensions");
    if residual > RECK_TOLERANCE {
        return Err(Error::DecompositionResidual {
            residual,
            tolerance: RECK_TOLERANCE,
        });
    }
    Ok(circuit)
}
