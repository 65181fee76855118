//! Explicit feature maps for the polynomial kernels.
//!
//! The homogeneous kernel `⟨x, y⟩ᵖ` is realized on the symmetric tensor power
//! with one coordinate per monomial of degree `p`, weighted by the square root
//! of its multinomial coefficient:
//!
//! ```text
//! φ(x)_α = sqrt(p! / (α₁!⋯αₙ!)) · x₁^α₁ ⋯ xₙ^αₙ,    |α| = p
//! ```
//!
//! so that `⟨φ(x), φ(y)⟩ = Σ_α (p; α) Πₖ (x̄ₖ yₖ)^αₖ = ⟨x, y⟩ᵖ` by the
//! multinomial theorem. The shifted kernel `(⟨x, y⟩ + c)ᵖ` is the homogeneous
//! kernel applied to `(x, √c)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{KernelSpec, VectorSet};
use crate::linalg::ComplexMatrix;

/// Default upper bound on the number of monomials enumerated.
pub const DEFAULT_BASIS_CAP: u64 = 1_000_000;

/// Exact `C(a, b)`; zero when `b > a`.
pub fn binomial(a: u64, b: u64) -> Result<u64> {
    if b > a {
        return Ok(0);
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 1..=b as u128 {
        // acc·(a−b+i) is divisible by i at every step
        acc = acc
            .checked_mul(a as u128 - b as u128 + i)
            .ok_or_else(|| Error::Overflow(format!("C({a}, {b})")))?
            / i;
    }
    u64::try_from(acc).map_err(|_| Error::Overflow(format!("C({a}, {b})")))
}

/// `p! / (α₁!⋯αₙ!)` as a product of binomials.
pub fn multinomial(exponents: &[u32]) -> Result<u64> {
    let mut remaining: u64 = exponents.iter().map(|&e| e as u64).sum();
    let mut acc: u64 = 1;
    for &e in exponents {
        let b = binomial(remaining, e as u64)?;
        acc = acc.checked_mul(b).ok_or_else(|| Error::Overflow(format!("multinomial {exponents:?}")))?;
        remaining -= e as u64;
    }
    Ok(acc)
}

/// Exponents of a monomial `x₁^α₁ ⋯ xₙ^αₙ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

/// All multi-indices of degree `p` over `n` variables in graded lexicographic
/// order, e.g. `(2,0), (1,1), (0,2)` for `n = p = 2`.
pub fn monomial_basis(n: usize, p: u32) -> Result<Vec<MultiIndex>> {
    monomial_basis_capped(n, p, DEFAULT_BASIS_CAP)
}

pub fn monomial_basis_capped(n: usize, p: u32, cap: u64) -> Result<Vec<MultiIndex>> {
    if n == 0 || p == 0 {
        return Err(Error::InvalidKernel(format!("monomial basis needs n ≥ 1 and p ≥ 1, got n={n} p={p}")));
    }
    let count = binomial(n as u64 + p as u64 - 1, p as u64)?;
    if count > cap {
        return Err(Error::Overflow(format!("{count} monomials exceed the cap of {cap}")));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut current = vec![0u32; n];
    fill(&mut current, 0, p, &mut out);
    debug_assert_eq!(out.len() as u64, count);
    Ok(out)
}

fn fill(current: &mut [u32], pos: usize, left: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = left;
        out.push(MultiIndex(current.to_vec()));
        return;
    }
    for e in (0..=left).rev() {
        current[pos] = e;
        fill(current, pos + 1, left - e, out);
    }
    current[pos] = 0;
}

fn embed_with_basis(x: &[Complex64], p: u32, basis: &[MultiIndex], weights: &[f64]) -> Vec<Complex64> {
    // powers[k][j] = x_k^j
    let powers: Vec<Vec<Complex64>> = x
        .iter()
        .map(|&z| {
            let mut row = Vec::with_capacity(p as usize + 1);
            let mut acc = Complex64::new(1.0, 0.0);
            for _ in 0..=p {
                row.push(acc);
                acc *= z;
            }
            row
        })
        .collect();
    basis
        .iter()
        .zip(weights)
        .map(|(alpha, &w)| {
            alpha
                .exponents()
                .iter()
                .enumerate()
                .fold(Complex64::new(w, 0.0), |acc, (k, &e)| acc * powers[k][e as usize])
        })
        .collect()
}

fn sqrt_weights(basis: &[MultiIndex]) -> Result<Vec<f64>> {
    basis.iter().map(|a| multinomial(a.exponents()).map(|v| (v as f64).sqrt())).collect()
}

/// `φ(x)` for the homogeneous kernel, of length `C(n+p−1, p)`.
pub fn embed_homogeneous(x: &[Complex64], p: u32) -> Result<Vec<Complex64>> {
    let basis = monomial_basis(x.len(), p)?;
    let weights = sqrt_weights(&basis)?;
    Ok(embed_with_basis(x, p, &basis, &weights))
}

fn augment(x: &[Complex64], c: f64) -> Vec<Complex64> {
    let mut v = x.to_vec();
    v.push(Complex64::new(c.sqrt(), 0.0));
    v
}

/// `φ(x)` for the shifted kernel, of length `C(n+p, p)`.
pub fn embed_shifted(x: &[Complex64], p: u32, c: f64) -> Result<Vec<Complex64>> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::InvalidKernel(format!("shift c must be finite and ≥ 0, got {c}")));
    }
    embed_homogeneous(&augment(x, c), p)
}

/// `φ(x)` for any polynomial kernel.
pub fn embed(spec: &KernelSpec, x: &[Complex64]) -> Result<Vec<Complex64>> {
    match spec.validated()? {
        KernelSpec::HomogeneousPolynomial { p } => embed_homogeneous(x, p),
        KernelSpec::ShiftedPolynomial { p, c } => embed_shifted(x, p, c),
        KernelSpec::Gaussian { .. } => Err(Error::UnsupportedKernel(spec.to_string())),
    }
}

/// `D = [φ(x₁), …, φ(x_m)]`, one column per vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    matrix: ComplexMatrix,
    kernel: KernelSpec,
    n: usize,
}

impl FeatureMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    /// Ambient dimension of the source vectors.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Length of each embedding.
    pub fn feature_dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `DᴴD`.
    pub fn gram(&self) -> Result<ComplexMatrix> {
        self.matrix.adjoint().matmul(&self.matrix)
    }
}

pub fn feature_matrix(spec: &KernelSpec, vs: &VectorSet) -> Result<FeatureMatrix> {
    let spec = spec.validated()?;
    let (p, shift) = match spec {
        KernelSpec::HomogeneousPolynomial { p } => (p, None),
        KernelSpec::ShiftedPolynomial { p, c } => (p, Some(c)),
        KernelSpec::Gaussian { .. } => return Err(Error::UnsupportedKernel(spec.to_string())),
    };
    let dim_in = vs.n() + shift.is_some() as usize;
    let basis = monomial_basis(dim_in, p)?;
    let weights = sqrt_weights(&basis)?;
    let columns: Vec<Vec<Complex64>> = vs
        .vectors()
        .iter()
        .map(|x| match shift {
            Some(c) => embed_with_basis(&augment(x, c), p, &basis, &weights),
            None => embed_with_basis(x, p, &basis, &weights),
        })
        .collect();
    let d = basis.len();
    let m = vs.m();
    let matrix = ComplexMatrix::from_fn(d, m, |i, j| columns[j][i])?;
    Ok(FeatureMatrix { matrix, kernel: spec, n: vs.n() })
}
