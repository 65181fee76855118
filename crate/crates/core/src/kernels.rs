//! Vector sets, kernel functions and Gram matrices.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix, EigOptions, EigenSpectrum};

/// Scalar field a vector set lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Real => "real",
            Field::Complex => "complex",
        })
    }
}

/// `m` vectors of dimension `n` over the real or complex field.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSet {
    n: usize,
    field: Field,
    vectors: Vec<Vec<Complex64>>,
    labels: Option<Vec<String>>,
}

impl VectorSet {
    pub fn new(field: Field, vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = vectors.first().map(Vec::len).unwrap_or(0);
        if vectors.is_empty() || n == 0 {
            return Err(Error::InvalidVectorSet("need at least one vector of dimension ≥ 1".into()));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != n {
                return Err(Error::InvalidVectorSet(format!(
                    "vector {i} has dimension {}, expected {n}",
                    v.len()
                )));
            }
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidVectorSet(format!("vector {i} has a non-finite entry")));
            }
            if field == Field::Real && v.iter().any(|z| z.im != 0.0) {
                return Err(Error::InvalidVectorSet(format!(
                    "vector {i} has a nonzero imaginary part in a real set"
                )));
            }
        }
        Ok(Self { n, field, vectors, labels: None })
    }

    pub fn from_real(vectors: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            Field::Real,
            vectors
                .iter()
                .map(|v| v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.vectors.len() {
            return Err(Error::InvalidVectorSet(format!(
                "{} labels for {} vectors",
                labels.len(),
                self.vectors.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn m(&self) -> usize {
        self.vectors.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &[Complex64] {
        &self.vectors[i]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.vectors.iter().map(|v| norm(v)).collect()
    }

    /// Applies a linear map to every vector. The result is complex unless
    /// both the set and the map are real.
    pub fn map_linear(&self, map: &ComplexMatrix) -> Result<Self> {
        if map.cols() != self.n {
            return Err(Error::DimensionMismatch { left: map.cols(), right: self.n });
        }
        let real_map = map.as_slice().iter().all(|z| z.im == 0.0);
        let field = if real_map { self.field } else { Field::Complex };
        let vectors = self
            .vectors
            .iter()
            .map(|v| {
                (0..map.rows())
                    .map(|i| (0..self.n).map(|k| map.get(i, k) * v[k]).sum())
                    .collect()
            })
            .collect();
        Self::new(field, vectors)
    }

    /// Multiplies every vector by a real scalar.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        let vectors = self.vectors.iter().map(|v| v.iter().map(|z| z * t).collect()).collect();
        Self::new(self.field, vectors)
    }

    /// SHA-256 over field tag, shape and entry bit patterns, truncated to 64 bits.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Sha256::new();
        h.update([matches!(self.field, Field::Complex) as u8]);
        h.update((self.n as u64).to_le_bytes());
        h.update((self.m() as u64).to_le_bytes());
        for z in self.vectors.iter().flatten() {
            h.update(z.re.to_bits().to_le_bytes());
            h.update(z.im.to_bits().to_le_bytes());
        }
        let digest = h.finalize();
        u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
    }
}

/// `⟨x, y⟩ = xᴴy`, conjugate-linear in the first argument.
pub fn inner_product(x: &[Complex64], y: &[Complex64]) -> Result<Complex64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { left: x.len(), right: y.len() });
    }
    Ok(inner_unchecked(x, y))
}

#[inline]
pub(crate) fn inner_unchecked(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a.conj() * b)
}

pub(crate) fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// A positive-semidefinite kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    /// `⟨x, y⟩ᵖ`.
    HomogeneousPolynomial { p: u32 },
    /// `(⟨x, y⟩ + c)ᵖ`.
    ShiftedPolynomial { p: u32, c: f64 },
    /// `exp(−γ‖x − y‖²)`.
    Gaussian { gamma: f64 },
}

impl KernelSpec {
    /// The linear kernel `⟨x, y⟩`.
    pub const LINEAR: KernelSpec = KernelSpec::HomogeneousPolynomial { p: 1 };

    pub fn homogeneous(p: u32) -> Result<Self> {
        Self::HomogeneousPolynomial { p }.validated()
    }

    pub fn shifted(p: u32, c: f64) -> Result<Self> {
        Self::ShiftedPolynomial { p, c }.validated()
    }

    pub fn gaussian(gamma: f64) -> Result<Self> {
        Self::Gaussian { gamma }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            Self::HomogeneousPolynomial { p: 0 } | Self::ShiftedPolynomial { p: 0, .. } => {
                Err(Error::InvalidKernel("degree p must be ≥ 1".into()))
            }
            Self::ShiftedPolynomial { c, .. } if !(c.is_finite() && c >= 0.0) => {
                Err(Error::InvalidKernel(format!("shift c must be finite and ≥ 0, got {c}")))
            }
            Self::Gaussian { gamma } if !(gamma.is_finite() && gamma > 0.0) => {
                Err(Error::InvalidKernel(format!("gamma must be finite and > 0, got {gamma}")))
            }
            _ => Ok(self),
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            Self::HomogeneousPolynomial { .. } => "homogeneous",
            Self::ShiftedPolynomial { .. } => "shifted",
            Self::Gaussian { .. } => "gaussian",
        }
    }

    pub fn degree(&self) -> Option<u32> {
        match *self {
            Self::HomogeneousPolynomial { p } | Self::ShiftedPolynomial { p, .. } => Some(p),
            Self::Gaussian { .. } => None,
        }
    }

    pub fn shift(&self) -> Option<f64> {
        match *self {
            Self::ShiftedPolynomial { c, .. } => Some(c),
            _ => None,
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match *self {
            Self::Gaussian { gamma } => Some(gamma),
            _ => None,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.degree().is_some()
    }

    /// Dimension of the symmetric feature space over `Cⁿ`: `C(n+p−1, p)` for
    /// the homogeneous kernel, `C(n+p, p)` for the shifted one. `None` for the
    /// Gaussian kernel.
    pub fn feature_dim(&self, n: usize) -> Result<Option<u64>> {
        use crate::features::binomial;
        match *self {
            Self::HomogeneousPolynomial { p } => binomial(n as u64 + p as u64 - 1, p as u64).map(Some),
            Self::ShiftedPolynomial { p, .. } => binomial(n as u64 + p as u64, p as u64).map(Some),
            Self::Gaussian { .. } => Ok(None),
        }
    }

    pub fn eval(&self, x: &[Complex64], y: &[Complex64]) -> Result<Complex64> {
        eval_kernel(self, x, y)
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::HomogeneousPolynomial { p } => write!(f, "homogeneous(p={p})"),
            Self::ShiftedPolynomial { p, c } => write!(f, "shifted(p={p},c={c})"),
            Self::Gaussian { gamma } => write!(f, "gaussian(gamma={gamma})"),
        }
    }
}

/// Evaluates `k(x, y)`.
pub fn eval_kernel(spec: &KernelSpec, x: &[Complex64], y: &[Complex64]) -> Result<Complex64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { left: x.len(), right: y.len() });
    }
    Ok(eval_unchecked(spec, x, y))
}

fn eval_unchecked(spec: &KernelSpec, x: &[Complex64], y: &[Complex64]) -> Complex64 {
    match *spec {
        KernelSpec::HomogeneousPolynomial { p } => inner_unchecked(x, y).powu(p),
        KernelSpec::ShiftedPolynomial { p, c } => (inner_unchecked(x, y) + c).powu(p),
        KernelSpec::Gaussian { gamma } => {
            let dist_sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum();
            Complex64::new((-gamma * dist_sq).exp(), 0.0)
        }
    }
}

/// `Gᵢⱼ = k(xᵢ, xⱼ)` for a vector set, exactly Hermitian by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    matrix: ComplexMatrix,
    kernel: KernelSpec,
    n: usize,
    source_fingerprint: u64,
}

impl GramMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    /// Number of vectors.
    pub fn m(&self) -> usize {
        self.matrix.rows()
    }

    /// Ambient dimension of the source vectors.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn source_fingerprint(&self) -> u64 {
        self.source_fingerprint
    }

    /// Spectrum with positive semidefiniteness certified.
    pub fn spectrum(&self) -> Result<EigenSpectrum> {
        hermitian_eigenvalues(&self.matrix, EigOptions::psd())
    }
}

pub fn gram_matrix(spec: &KernelSpec, vs: &VectorSet) -> Result<GramMatrix> {
    let spec = spec.validated()?;
    let m = vs.m();
    let mut data = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        let xi = vs.vector(i);
        let kii = eval_unchecked(&spec, xi, xi);
        data[i * m + i] = Complex64::new(kii.re, 0.0);
        for j in (i + 1)..m {
            let k = eval_unchecked(&spec, xi, vs.vector(j));
            data[i * m + j] = k;
            data[j * m + i] = k.conj();
        }
    }
    Ok(GramMatrix {
        matrix: ComplexMatrix::new(m, m, data)?,
        kernel: spec,
        n: vs.n(),
        source_fingerprint: vs.fingerprint(),
    })
}
