//! Interferometers: validated unitary matrices with provenance.
//!
//! Haar-random draws use the standard recipe: fill a matrix with i.i.d.
//! complex Gaussians, then QR-factorize with the diagonal of R forced
//! positive. That particular QR is unique, and its Q is exactly
//! Haar-distributed (an unnormalized QR would bias the ensemble by the
//! arbitrary phases of R's diagonal). Gram-Schmidt with a second
//! reorthogonalization pass produces R with a positive diagonal by
//! construction and keeps the orthogonality error near machine epsilon.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::modes::ModeConfig;

/// Unitarity tolerance enforced whenever an [`Interferometer`] is built.
/// Loose enough to admit matrices round-tripped through text serialization.
pub const UNITARY_LOAD_TOLERANCE: f64 = 1e-8;

/// Unitarity guaranteed by freshly generated Haar draws.
pub const HAAR_TOLERANCE: f64 = 1e-12;

/// Where a unitary came from; carried into event logs and manifests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// Drawn from the Haar measure with the recorded seed.
    Haar { modes: usize, seed: u64 },
    /// Composed from a circuit; the string describes the circuit's origin.
    Circuit { reference: String },
    /// Loaded from a file.
    File { path: String },
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::Haar { modes, seed } => write!(f, "haar(m={modes},seed={seed})"),
            Provenance::Circuit { reference } => write!(f, "circuit({reference})"),
            Provenance::File { path } => write!(f, "file({path})"),
        }
    }
}

/// An m-mode interferometer: a matrix checked to be unitary at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Interferometer {
    matrix: ComplexMatrix,
    provenance: Provenance,
}

impl Interferometer {
    /// Wrap a matrix, rejecting anything non-square or further than
    /// [`UNITARY_LOAD_TOLERANCE`] from unitarity.
    pub fn new(matrix: ComplexMatrix, provenance: Provenance) -> Result<Self> {
        let residual = matrix.unitarity_residual()?;
        if residual > UNITARY_LOAD_TOLERANCE {
            return Err(Error::NotUnitary {
                residual,
                tolerance: UNITARY_LOAD_TOLERANCE,
            });
        }
        Ok(Interferometer { matrix, provenance })
    }

    pub fn modes(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Replace the provenance record (e.g. after composing a circuit whose
    /// origin the caller knows better).
    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Max-norm deviation from unitarity (diagnostic; small by construction).
    pub fn unitarity_residual(&self) -> f64 {
        self.matrix
            .unitarity_residual()
            .expect("square by construction")
    }
}

/// Draw an m-mode interferometer from the Haar measure, deterministically in
/// `seed`. Identical (m, seed) pairs give bit-identical matrices.
pub fn haar_unitary(modes: usize, seed: u64) -> Result<Interferometer> {
    if modes == 0 {
        return Err(Error::InvalidParameter {
            field: "modes",
            message: "interferometer needs at least one mode".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let m = modes;
    // Column-major Ginibre sample: columns are orthonormalized in order, and
    // draw order is fixed (column by column, real part then imaginary).
    let mut cols: Vec<Vec<Complex64>> = (0..m)
        .map(|_| {
            (0..m)
                .map(|_| {
                    let re: f64 = normal.sample(&mut rng);
                    let im: f64 = normal.sample(&mut rng);
                    Complex64::new(re, im)
                })
                .collect()
        })
        .collect();

    // Modified Gram-Schmidt with one reorthogonalization pass per column.
    for j in 0..m {
        for _pass in 0..2 {
            for k in 0..j {
                let proj = dot(&cols[k], &cols[j]);
                for i in 0..m {
                    let correction = proj * cols[k][i];
                    cols[j][i] -= correction;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // A Ginibre column is dependent on its predecessors with probability
        // zero; a vanishing norm would mean a broken RNG.
        assert!(norm > 0.0, "degenerate Gaussian sample");
        for z in &mut cols[j] {
            *z /= norm;
        }
    }

    let matrix = ComplexMatrix::from_fn(m, m, |i, j| cols[j][i])?;
    debug_assert!(matrix.unitarity_residual().unwrap_or(f64::INFINITY) <= HAAR_TOLERANCE);
    Interferometer::new(matrix, Provenance::Haar { modes, seed })
}

/// <a, b> with the conjugate on the first argument.
fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// The n x n scattering submatrix A with A[i][j] = U[s_i, t_j]: rows follow
/// the input modes s, columns the output modes t.
pub fn submatrix(u: &Interferometer, s: &ModeConfig, t: &ModeConfig) -> Result<ComplexMatrix> {
    check_config(u, s, "input")?;
    check_config(u, t, "output")?;
    if s.photons() != t.photons() {
        return Err(Error::OccupationMismatch {
            expected: s.photons(),
            got: t.photons(),
        });
    }
    let n = s.photons();
    ComplexMatrix::from_fn(n, n, |i, j| u.matrix().get(s.modes()[i], t.modes()[j]))
}

pub(crate) fn check_config(u: &Interferometer, c: &ModeConfig, role: &'static str) -> Result<()> {
    if c.mode_count() != u.modes() {
        return Err(Error::InvalidParameter {
            field: role,
            message: format!(
                "{role} configuration is over {} modes but the interferometer has {}",
                c.mode_count(),
                u.modes()
            ),
        });
    }
    Ok(())
}
