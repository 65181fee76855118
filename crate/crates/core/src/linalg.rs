//! Dense complex linear algebra: just enough for Gram matrix spectra.
//!
//! Only eigenvalues of Hermitian matrices are ever needed, so the eigensolver
//! is a cyclic complex Jacobi iteration that never accumulates eigenvectors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative Hermitian tolerance: `‖M − Mᴴ‖_∞ ≤ HERM_REL_TOL · max(1, ‖M‖_∞)`.
pub const HERM_REL_TOL: f64 = 1e-10;
/// Relative PSD floor: eigenvalues below `−PSD_REL_TOL · σ_max` reject the matrix.
pub const PSD_REL_TOL: f64 = 1e-9;

/// Row-major dense complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("{rows}x{cols} matrix has an empty dimension")));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![Complex64::new(0.0, 0.0); rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |i, j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
    }

    /// Square diagonal matrix with the given real diagonal.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| Complex64::new(if i == j { diag[i] } else { 0.0 }, 0.0))
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
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    /// Entries in row-major order.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Column `j` as an owned vector.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).conj());
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { left: self.cols, right: rhs.rows });
        }
        let mut data = vec![Complex64::new(0.0, 0.0); self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = &mut data[i * rhs.cols..(i + 1) * rhs.cols];
                for (out, b) in row.iter_mut().zip(&rhs.data[k * rhs.cols..(k + 1) * rhs.cols]) {
                    *out += a * b;
                }
            }
        }
        Self::new(self.rows, rhs.cols, data)
    }

    /// Multiplies every entry by a real scalar.
    pub fn scale(&self, factor: f64) -> Result<Self> {
        Self::new(self.rows, self.cols, self.data.iter().map(|z| z * factor).collect())
    }

    /// Induced ∞-norm: maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖M − Mᴴ‖_∞` for a square matrix.
    pub fn hermitian_deviation(&self) -> Result<f64> {
        self.require_square()?;
        let n = self.rows;
        let mut worst = 0.0_f64;
        for i in 0..n {
            let row: f64 = (0..n).map(|j| (self.get(i, j) - self.get(j, i).conj()).norm()).sum();
            worst = worst.max(row);
        }
        Ok(worst)
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }
}

/// Sum of diagonal entries, accumulated in ascending index order.
pub fn trace(m: &ComplexMatrix) -> Result<Complex64> {
    m.require_square()?;
    Ok((0..m.rows).fold(Complex64::new(0.0, 0.0), |acc, i| acc + m.get(i, i)))
}

/// `Σᵢⱼ |Mᵢⱼ|²`.
pub fn frobenius_norm_sq(m: &ComplexMatrix) -> f64 {
    m.data.iter().map(|z| z.norm_sqr()).sum()
}

/// Real eigenvalues of a Hermitian matrix, sorted non-increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSpectrum {
    values: Vec<f64>,
    source_dim: usize,
    clamp_applied: bool,
}

impl EigenSpectrum {
    /// Wraps values, sorting them non-increasing.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        let source_dim = values.len();
        Ok(Self { values, source_dim, clamp_applied: false })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    /// Whether tiny negative eigenvalues were clamped to zero.
    pub fn clamp_applied(&self) -> bool {
        self.clamp_applied
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn sum_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

/// Whether to certify positive semidefiniteness while computing a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PsdCheck {
    #[default]
    None,
    /// Reject eigenvalues below `−PSD_REL_TOL · σ_max`; clamp the rest of the negatives to 0.
    Certify,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigOptions {
    pub max_sweeps: usize,
    /// Stop once the off-diagonal Frobenius norm is below `off_diag_rel_tol · ‖M‖_F`.
    pub off_diag_rel_tol: f64,
    pub psd: PsdCheck,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self { max_sweeps: 30, off_diag_rel_tol: 1e-13, psd: PsdCheck::None }
    }
}

impl EigOptions {
    pub fn psd() -> Self {
        Self { psd: PsdCheck::Certify, ..Self::default() }
    }
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn hermitian_eigenvalues(m: &ComplexMatrix, opts: EigOptions) -> Result<EigenSpectrum> {
    m.require_square()?;
    let n = m.rows;
    let deviation = m.hermitian_deviation()?;
    let tolerance = HERM_REL_TOL * m.norm_inf().max(1.0);
    if deviation > tolerance {
        return Err(Error::NotHermitian { deviation, tolerance });
    }

    // Work on the exactly Hermitian part (M + Mᴴ)/2.
    let mut a = m.data.clone();
    for i in 0..n {
        a[i * n + i] = Complex64::new(a[i * n + i].re, 0.0);
        for j in (i + 1)..n {
            let avg = (m.get(i, j) + m.get(j, i).conj()) * 0.5;
            a[i * n + j] = avg;
            a[j * n + i] = avg.conj();
        }
    }

    let target = opts.off_diag_rel_tol * frobenius_norm_sq(m).sqrt();
    let off_norm = |a: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a[i * n + j].norm_sqr();
            }
        }
        (2.0 * s).sqrt()
    };

    let mut converged = off_norm(&a) <= target;
    let mut sweeps = 0;
    while !converged && sweeps < opts.max_sweeps {
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, n, p, q);
            }
        }
        sweeps += 1;
        converged = off_norm(&a) <= target;
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps, off_norm: off_norm(&a) });
    }

    let values: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    let mut spectrum = EigenSpectrum::from_values(values)?;
    if opts.psd == PsdCheck::Certify {
        certify_psd(&mut spectrum)?;
    }
    Ok(spectrum)
}

/// One Jacobi rotation annihilating `a[p][q]`.
///
/// The phase of `a[p][q]` is first absorbed into coordinate `q`, reducing the
/// 2×2 block to a real symmetric one, which is then diagonalized by a plane
/// rotation. The combined unitary is `V = diag(1, w̄)·R` on the `(p, q)` plane.
fn rotate(a: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let w = apq / mag;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;

    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    if t == 0.0 {
        // Off-diagonal entry is negligible against the diagonal gap.
        a[p * n + q] = Complex64::new(0.0, 0.0);
        a[q * n + p] = Complex64::new(0.0, 0.0);
        return;
    }
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let wc = w.conj();

    // A ← A·V on columns p, q.
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * c - akq * wc * s;
        a[k * n + q] = akp * s + akq * wc * c;
    }
    // A ← Vᴴ·A on rows p, q.
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = apk * c - aqk * w * s;
        a[q * n + k] = apk * s + aqk * w * c;
    }

    a[p * n + p] = Complex64::new(app - t * mag, 0.0);
    a[q * n + q] = Complex64::new(aqq + t * mag, 0.0);
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
}

fn certify_psd(spectrum: &mut EigenSpectrum) -> Result<()> {
    let sigma_max = spectrum.values.first().copied().unwrap_or(0.0).max(0.0);
    let floor = -PSD_REL_TOL * sigma_max;
    let min = spectrum.values.last().copied().unwrap_or(0.0);
    if min < floor {
        return Err(Error::NotPsd { min_eigenvalue: min, floor });
    }
    for v in spectrum.values.iter_mut().filter(|v| **v < 0.0) {
        *v = 0.0;
        spectrum.clamp_applied = true;
    }
    Ok(())
}

/// Relative spectral threshold: `τ = rel_tol · max(max|σ|, floor_abs)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankPolicy {
    pub rel_tol: f64,
    pub floor_abs: f64,
}

impl Default for RankPolicy {
    fn default() -> Self {
        Self { rel_tol: 1e-8, floor_abs: 1e-300 }
    }
}

impl RankPolicy {
    pub fn threshold(&self, spectrum: &EigenSpectrum) -> f64 {
        self.rel_tol * spectrum.max_abs().max(self.floor_abs)
    }
}

/// Number of eigenvalues with `|σ| > τ`.
pub fn numerical_rank(spectrum: &EigenSpectrum, policy: RankPolicy) -> usize {
    let tau = policy.threshold(spectrum);
    spectrum.values.iter().filter(|v| v.abs() > tau).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_2x2() -> ComplexMatrix {
        ComplexMatrix::new(2, 2, vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]).unwrap()
    }

    fn ones(n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| c(1.0, 0.0)).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(ComplexMatrix::new(0, 2, vec![]), Err(Error::Shape(_))));
        assert!(matches!(ComplexMatrix::new(2, 2, vec![c(1.0, 0.0); 3]), Err(Error::Shape(_))));
        let err = ComplexMatrix::new(1, 2, vec![c(1.0, 0.0), c(f64::NAN, 0.0)]).unwrap_err();
        assert_eq!(err, Error::NonFinite(1));
    }

    #[test]
    fn identity_spectrum() {
        let s = hermitian_eigenvalues(&ComplexMatrix::identity(2).unwrap(), EigOptions::default()).unwrap();
        assert_eq!(s.values(), &[1.0, 1.0]);
    }

    #[test]
    fn two_by_two_complex_spectrum() {
        // (2 − λ)² − 1 = 0
        let s = hermitian_eigenvalues(&sample_2x2(), EigOptions::default()).unwrap();
        assert_relative_eq!(s.values()[0], 3.0, epsilon = 1e-14);
        assert_relative_eq!(s.values()[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn all_ones_spectrum() {
        let s = hermitian_eigenvalues(&ones(3), EigOptions::psd()).unwrap();
        assert_relative_eq!(s.values()[0], 3.0, epsilon = 1e-14);
        assert!(s.values()[1].abs() < 1e-14 && s.values()[2].abs() < 1e-14);
        assert_eq!(numerical_rank(&s, RankPolicy::default()), 1);
    }

    #[test]
    fn diagonal_spectrum_is_exact() {
        let d = [0.5, -2.0, 7.25, 3.0];
        let s = hermitian_eigenvalues(&ComplexMatrix::from_diagonal(&d).unwrap(), EigOptions::default()).unwrap();
        assert_eq!(s.values(), &[7.25, 3.0, 0.5, -2.0]);
    }

    #[test]
    fn trace_and_frobenius() {
        assert_eq!(trace(&ComplexMatrix::identity(2).unwrap()).unwrap(), c(2.0, 0.0));
        assert_eq!(trace(&sample_2x2()).unwrap(), c(4.0, 0.0));
        assert_eq!(frobenius_norm_sq(&ComplexMatrix::identity(2).unwrap()), 2.0);
        assert_eq!(frobenius_norm_sq(&ones(3)), 9.0);
        assert_eq!(frobenius_norm_sq(&sample_2x2()), 10.0);
        let m = sample_2x2();
        let via_trace = trace(&m.matmul(&m.adjoint()).unwrap()).unwrap().re;
        assert_relative_eq!(frobenius_norm_sq(&m), via_trace, max_relative = 1e-12);
    }

    #[test]
    fn errors() {
        let rect = ComplexMatrix::zeros(2, 3).unwrap();
        assert!(matches!(trace(&rect), Err(Error::NotSquare { .. })));
        assert!(matches!(hermitian_eigenvalues(&rect, EigOptions::default()), Err(Error::NotSquare { .. })));
        let skew = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(hermitian_eigenvalues(&skew, EigOptions::default()), Err(Error::NotHermitian { .. })));
        let indefinite = ComplexMatrix::from_diagonal(&[1.0, -0.5]).unwrap();
        assert!(matches!(hermitian_eigenvalues(&indefinite, EigOptions::psd()), Err(Error::NotPsd { .. })));
        let opts = EigOptions { max_sweeps: 0, ..EigOptions::default() };
        assert!(matches!(hermitian_eigenvalues(&sample_2x2(), opts), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn tiny_negatives_are_clamped() {
        let m = ComplexMatrix::from_diagonal(&[1.0, -1e-12]).unwrap();
        let s = hermitian_eigenvalues(&m, EigOptions::psd()).unwrap();
        assert_eq!(s.values(), &[1.0, 0.0]);
        assert!(s.clamp_applied());
    }

    #[test]
    fn rank_examples() {
        let s = EigenSpectrum::from_values(vec![3.0, 0.0, 0.0]).unwrap();
        assert_eq!(numerical_rank(&s, RankPolicy::default()), 1);
        let s = EigenSpectrum::from_values(vec![1.0, 1.0]).unwrap();
        assert_eq!(numerical_rank(&s, RankPolicy::default()), 2);
        let zero = hermitian_eigenvalues(&ComplexMatrix::zeros(3, 3).unwrap(), EigOptions::psd()).unwrap();
        assert_eq!(numerical_rank(&zero, RankPolicy::default()), 0);
    }

    /// Eigenvalues of the real embedding `[[Re, −Im], [Im, Re]]` are those of
    /// the Hermitian matrix, each repeated twice.
    fn oracle_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
        let n = m.rows();
        let big = nalgebra::DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            let z = m.get(i % n, j % n);
            match (i < n, j < n) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        });
        let mut ev: Vec<f64> = big.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev.into_iter().step_by(2).collect()
    }

    fn lcg_hermitian(n: usize, mut state: u64) -> ComplexMatrix {
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let mut raw = vec![c(0.0, 0.0); n * n];
        for z in raw.iter_mut() {
            *z = c(next(), next());
        }
        ComplexMatrix::from_fn(n, n, |i, j| {
            let z = raw[i * n + j] + raw[j * n + i].conj();
            if i == j {
                c(z.re, 0.0)
            } else {
                z
            }
        })
        .unwrap()
    }

    #[test]
    fn matches_real_embedding_oracle() {
        for (n, seed) in [(1, 1), (3, 2), (7, 3), (16, 4), (25, 5)] {
            let m = lcg_hermitian(n, seed);
            let got = hermitian_eigenvalues(&m, EigOptions::default()).unwrap();
            let want = oracle_eigenvalues(&m);
            let scale = got.max_abs().max(1.0);
            for (g, w) in got.values().iter().zip(&want) {
                assert!((g - w).abs() < 1e-11 * scale, "n={n}: {g} vs {w}");
            }
            assert_relative_eq!(got.sum(), trace(&m).unwrap().re, epsilon = 1e-10 * scale);
            assert_relative_eq!(got.sum_sq(), frobenius_norm_sq(&m), max_relative = 1e-12);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn rank_is_scale_invariant(seed in 0u64..10_000, n in 1usize..8, k in -20i32..20) {
                let m = lcg_hermitian(n, seed);
                let s = hermitian_eigenvalues(&m, EigOptions::default()).unwrap();
                let scaled = hermitian_eigenvalues(&m.scale(10f64.powi(k)).unwrap(), EigOptions::default()).unwrap();
                prop_assert_eq!(numerical_rank(&s, RankPolicy::default()), numerical_rank(&scaled, RankPolicy::default()));
            }

            #[test]
            fn spectral_identities_hold(seed in 0u64..10_000, n in 1usize..12) {
                let m = lcg_hermitian(n, seed);
                let s = hermitian_eigenvalues(&m, EigOptions::default()).unwrap();
                let scale = frobenius_norm_sq(&m).sqrt().max(1e-300);
                prop_assert!((s.sum() - trace(&m).unwrap().re).abs() <= 1e-9 * scale * (n as f64));
                prop_assert!((s.sum_sq() - frobenius_norm_sq(&m)).abs() <= 1e-9 * frobenius_norm_sq(&m));
                prop_assert!(s.values().windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }
}
