//! Dense complex matrices and matrix permanents.
//!
//! The permanent is the bottleneck of every exact boson-sampling
//! calculation, so two implementations live here:
//!
//! * [`permanent_naive`] — direct sum over all n! permutations. Transparent
//!   enough to serve as an oracle, guarded to n <= 8.
//! * [`permanent`] — Ryser's inclusion-exclusion formula walked in Gray-code
//!   order, O(2^n * n). Column sums are updated incrementally (one column
//!   enters or leaves the active subset per step) and terms are accumulated
//!   in a single fixed iteration order so results are bit-for-bit
//!   reproducible.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest dimension accepted by [`permanent_naive`].
pub const NAIVE_PERMANENT_LIMIT: usize = 8;

/// Practical ceiling for [`permanent`]: 2^30 subset steps is already minutes
/// of work, and the u64 subset mask must not overflow.
pub const PERMANENT_LIMIT: usize = 30;

/// Dense row-major complex matrix.
///
/// Invariants enforced at construction: at least 1x1 and every entry finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::EntryCount {
                expected: rows * cols,
                got: data.len(),
            });
        }
        for (k, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteEntry {
                    row: k / cols,
                    col: k % cols,
                });
            }
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Build a matrix by evaluating `f(row, col)` at every position.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix::new(rows, cols, data)
    }

    /// The n x n identity.
    pub fn identity(n: usize) -> Self {
        let mut data = vec![Complex64::ZERO; n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::ONE;
        }
        ComplexMatrix {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col] = value;
    }

    /// Row-major view of the entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ComplexMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).conj());
            }
        }
        ComplexMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::EntryCount {
                expected: self.cols,
                got: rhs.rows,
            });
        }
        let mut out = vec![Complex64::ZERO; self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: rhs.cols,
            data: out,
        })
    }

    /// Largest entry magnitude of `self - rhs`, or `None` on shape mismatch.
    pub fn max_abs_diff(&self, rhs: &ComplexMatrix) -> Option<f64> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        )
    }

    /// Max-norm deviation of `self` from unitarity: max |(U†U - I)_{ij}|.
    pub fn unitarity_residual(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NonSquareMatrix {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let product = self.dagger().mul(self)?;
        Ok(product
            .max_abs_diff(&ComplexMatrix::identity(self.rows))
            .expect("shapes match by construction"))
    }

    /// Entrywise map (used e.g. to form the |U_ij|^2 matrix).
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().copied().map(f).collect(),
        }
    }
}

fn require_square(a: &ComplexMatrix) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::NonSquareMatrix {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    Ok(a.rows())
}

/// Permanent by direct enumeration of all n! permutations.
///
/// Kept deliberately simple so it can stand as an independent oracle for
/// [`permanent`]; refuses matrices larger than 8x8 where the factorial
/// blow-up stops being instant.
pub fn permanent_naive(a: &ComplexMatrix) -> Result<Complex64> {
    let n = require_square(a)?;
    if n > NAIVE_PERMANENT_LIMIT {
        return Err(Error::DimensionTooLarge {
            context: "permanent_naive",
            n,
            limit: NAIVE_PERMANENT_LIMIT,
        });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = Complex64::ZERO;
    // Iterate permutations in lexicographic order; the order is fixed so the
    // floating-point sum is reproducible.
    loop {
        let mut product = Complex64::ONE;
        for (i, &j) in perm.iter().enumerate() {
            product *= a.get(i, j);
        }
        total += product;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(total)
}

/// Advance `perm` to its lexicographic successor; false once exhausted.
fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Permanent via Ryser's formula in Gray-code order, O(2^n * n).
///
/// per(A) = (-1)^n \sum_{S \subseteq [n], S \ne \emptyset} (-1)^{|S|}
///          \prod_i \sum_{j \in S} a_{ij}
///
/// Subsets are visited in Gray-code order so each step toggles exactly one
/// column in the running row sums. The loop over subset index k is strictly
/// ascending, fixing the floating-point summation order.
pub fn permanent(a: &ComplexMatrix) -> Result<Complex64> {
    let n = require_square(a)?;
    if n > PERMANENT_LIMIT {
        return Err(Error::DimensionTooLarge {
            context: "permanent",
            n,
            limit: PERMANENT_LIMIT,
        });
    }
    let mut row_sums = vec![Complex64::ZERO; n];
    let mut total = Complex64::ZERO;
    for k in 1u64..(1u64 << n) {
        // Gray code of k differs from that of k-1 in exactly bit `toggled`.
        let toggled = k.trailing_zeros() as usize;
        let gray = k ^ (k >> 1);
        let entered = gray >> toggled & 1 == 1;
        for i in 0..n {
            let entry = a.get(i, toggled);
            if entered {
                row_sums[i] += entry;
            } else {
                row_sums[i] -= entry;
            }
        }
        let product: Complex64 = row_sums.iter().product();
        // Net sign of this subset's term is (-1)^(n - |S|).
        if (n as u32 - gray.count_ones()) % 2 == 0 {
            total += product;
        } else {
            total -= product;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| {
            c(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
        })
        .unwrap()
    }

    #[test]
    fn naive_of_identity_is_one() {
        for n in 1..=4 {
            let id = ComplexMatrix::identity(n);
            assert_eq!(permanent_naive(&id).unwrap(), Complex64::ONE);
        }
    }

    #[test]
    fn naive_of_all_ones_is_factorial() {
        // per(J_n) = n!
        for (n, factorial) in [(1, 1.0), (2, 2.0), (3, 6.0), (4, 24.0)] {
            let ones = ComplexMatrix::from_fn(n, n, |_, _| Complex64::ONE).unwrap();
            let p = permanent_naive(&ones).unwrap();
            assert!((p - c(factorial, 0.0)).norm() < 1e-12, "n={n}: {p}");
        }
    }

    #[test]
    fn naive_two_by_two_closed_form() {
        // per([[a,b],[c,d]]) = ad + bc
        let a = c(1.0, 2.0);
        let b = c(-0.5, 0.25);
        let d = c(0.0, -1.0);
        let e = c(2.0, 2.0);
        let m = ComplexMatrix::new(2, 2, vec![a, b, d, e]).unwrap();
        let expected = a * e + b * d;
        assert!((permanent_naive(&m).unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn naive_guard_rejects_large_and_nonsquare() {
        let big = ComplexMatrix::identity(9);
        assert!(matches!(
            permanent_naive(&big),
            Err(Error::DimensionTooLarge { .. })
        ));
        let rect = ComplexMatrix::from_fn(2, 3, |_, _| Complex64::ONE).unwrap();
        assert!(matches!(
            permanent_naive(&rect),
            Err(Error::NonSquareMatrix { .. })
        ));
    }

    #[test]
    fn fast_matches_naive_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
        for trial in 0..200 {
            let n = 1 + trial % 6;
            let m = random_matrix(n, &mut rng);
            let fast = permanent(&m).unwrap();
            let slow = permanent_naive(&m).unwrap();
            let scale = slow.norm().max(1.0);
            assert!(
                (fast - slow).norm() / scale <= 1e-10,
                "n={n} fast={fast} slow={slow}"
            );
        }
    }

    #[test]
    fn fast_identity_and_ones() {
        assert!((permanent(&ComplexMatrix::identity(6)).unwrap() - Complex64::ONE).norm() < 1e-12);
        let ones = ComplexMatrix::from_fn(6, 6, |_, _| Complex64::ONE).unwrap();
        assert!((permanent(&ones).unwrap() - c(720.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn fast_single_entry() {
        let m = ComplexMatrix::new(1, 1, vec![c(0.3, -0.8)]).unwrap();
        assert_eq!(permanent(&m).unwrap(), c(0.3, -0.8));
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            ComplexMatrix::new(0, 3, vec![]),
            Err(Error::EmptyMatrix { .. })
        ));
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![Complex64::ONE; 3]),
            Err(Error::EntryCount { .. })
        ));
        assert!(matches!(
            ComplexMatrix::new(1, 2, vec![c(f64::NAN, 0.0), Complex64::ONE]),
            Err(Error::NonFiniteEntry { row: 0, col: 0 })
        ));
    }

    #[test]
    fn dagger_and_mul_agree_with_hand_values() {
        let m = ComplexMatrix::new(2, 2, vec![c(1.0, 1.0), c(0.0, 2.0), c(3.0, 0.0), c(0.0, -1.0)]).unwrap();
        let d = m.dagger();
        assert_eq!(d.get(0, 0), c(1.0, -1.0));
        assert_eq!(d.get(0, 1), c(3.0, 0.0));
        assert_eq!(d.get(1, 0), c(0.0, -2.0));
        let prod = m.mul(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(prod, m);
    }

    #[test]
    fn unitarity_residual_flags_non_unitary() {
        let id = ComplexMatrix::identity(4);
        assert!(id.unitarity_residual().unwrap() < 1e-15);
        let skew = ComplexMatrix::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, 0.0)).unwrap();
        assert!(skew.unitarity_residual().unwrap() > 1.0);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_matrix(max_n: usize) -> impl Strategy<Value = ComplexMatrix> {
            (1..=max_n).prop_flat_map(|n| {
                proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(
                    move |entries| {
                        let data = entries.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
                        ComplexMatrix::new(n, n, data).unwrap()
                    },
                )
            })
        }

        proptest! {
            // Row/column permutations leave the permanent unchanged.
            #[test]
            fn permutation_invariance(m in arb_matrix(5), seed in any::<u64>()) {
                let n = m.rows();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut rows: Vec<usize> = (0..n).collect();
                let mut cols: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    rows.swap(i, rng.random_range(0..=i));
                    cols.swap(i, rng.random_range(0..=i));
                }
                let shuffled = ComplexMatrix::from_fn(n, n, |i, j| m.get(rows[i], cols[j])).unwrap();
                let a = permanent(&m).unwrap();
                let b = permanent(&shuffled).unwrap();
                prop_assert!((a - b).norm() <= 1e-12, "a={a} b={b}");
            }

            // per(A) = per(A^T).
            #[test]
            fn transpose_invariance(m in arb_matrix(5)) {
                let n = m.rows();
                let t = ComplexMatrix::from_fn(n, n, |i, j| m.get(j, i)).unwrap();
                let a = permanent(&m).unwrap();
                let b = permanent(&t).unwrap();
                prop_assert!((a - b).norm() <= 1e-12, "a={a} b={b}");
            }
        }
    }
}
