//! Structured and random vector sets, and frame potential minimization.
//!
//! The frame potential `Σᵢⱼ |⟨xᵢ, xⱼ⟩|^{2p}` is minimized over unit vectors by
//! Riemannian gradient descent on the product of spheres with Armijo
//! backtracking. Its global minimum can never drop below `m²/C(n+p−1,p)`, so
//! the final gap measures how close the bound is to attainable.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bounds::{sum_power_lhs, welch_sum_bound};
use crate::error::{Error, Result};
use crate::formats::VectorSetFile;
use crate::kernels::{inner_unchecked, norm, Field, VectorSet};

/// ChaCha20 stream for `(seed, stream)`. Distinct streams never overlap.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw_unit_vectors(rng: &mut ChaCha20Rng, m: usize, n: usize, field: Field) -> Result<VectorSet> {
    let mut vectors = Vec::with_capacity(m);
    while vectors.len() < m {
        let v: Vec<Complex64> = (0..n)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = match field {
                    Field::Real => 0.0,
                    Field::Complex => rng.sample(StandardNormal),
                };
                Complex64::new(re, im)
            })
            .collect();
        let r = norm(&v);
        if r > 0.0 {
            vectors.push(v.into_iter().map(|z| z / r).collect());
        }
    }
    VectorSet::new(field, vectors)
}

/// `m` i.i.d. Gaussian vectors in `Fⁿ`, each normalized. Entries are drawn
/// vector by vector, real part before imaginary part, from stream 0 of `seed`.
pub fn random_unit_vectors(m: usize, n: usize, field: Field, seed: u64) -> Result<VectorSet> {
    random_unit_vectors_stream(m, n, field, seed, 0)
}

pub fn random_unit_vectors_stream(m: usize, n: usize, field: Field, seed: u64, stream: u64) -> Result<VectorSet> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidVectorSet(format!("m={m}, n={n}")));
    }
    draw_unit_vectors(&mut rng_stream(seed, stream), m, n, field)
}

/// `n + 1` real unit vectors in `Rⁿ` with pairwise inner products `−1/n`.
///
/// The centered basis vectors `eᵢ − 1/(n+1)` of `Rⁿ⁺¹` are expressed in the
/// Helmert basis `h_k = (1,…,1, −k, 0,…,0)/sqrt(k(k+1))` of the hyperplane
/// orthogonal to the all-ones vector, then normalized.
pub fn simplex_frame(n: usize) -> Result<VectorSet> {
    if n == 0 {
        return Err(Error::InvalidVectorSet("simplex needs n ≥ 1".into()));
    }
    let vectors: Vec<Vec<f64>> = (0..=n)
        .map(|i| {
            // ⟨h_k, eᵢ − 1/(n+1)⟩ = ⟨h_k, eᵢ⟩ since h_k ⟂ 1.
            let coords: Vec<f64> = (1..=n)
                .map(|k| {
                    let scale = 1.0 / ((k * (k + 1)) as f64).sqrt();
                    match i.cmp(&k) {
                        std::cmp::Ordering::Less => scale,
                        std::cmp::Ordering::Equal => -(k as f64) * scale,
                        std::cmp::Ordering::Greater => 0.0,
                    }
                })
                .collect();
            let r = coords.iter().map(|x| x * x).sum::<f64>().sqrt();
            coords.into_iter().map(|x| x / r).collect()
        })
        .collect();
    VectorSet::from_real(&vectors)
}

/// Standard basis of `Cⁿ`.
pub fn orthonormal_frame(n: usize) -> Result<VectorSet> {
    if n == 0 {
        return Err(Error::InvalidVectorSet("basis needs n ≥ 1".into()));
    }
    let vectors: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|k| if i == k { 1.0 } else { 0.0 }).collect()).collect();
    VectorSet::from_real(&vectors)
}

/// The optimizer objective; identical to [`sum_power_lhs`].
pub fn frame_potential(vs: &VectorSet, p: u32) -> Result<f64> {
    sum_power_lhs(vs, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub p: u32,
    pub max_iters: usize,
    pub step_init: f64,
    pub armijo_c: f64,
    pub grad_tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { p: 1, max_iters: 5000, step_init: 0.1, armijo_c: 0.5, grad_tol: 1e-8, restarts: 5, seed: 0 }
    }
}

impl OptimizerConfig {
    pub fn with_p(p: u32) -> Self {
        Self { p, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.p == 0 {
            return fail("p must be ≥ 1".into());
        }
        if self.max_iters == 0 {
            return fail("max_iters must be ≥ 1".into());
        }
        if !(self.step_init.is_finite() && self.step_init > 0.0) {
            return fail(format!("step_init must be > 0, got {}", self.step_init));
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return fail(format!("armijo_c must lie in (0, 1), got {}", self.armijo_c));
        }
        if !(self.grad_tol.is_finite() && self.grad_tol >= 0.0) {
            return fail(format!("grad_tol must be ≥ 0, got {}", self.grad_tol));
        }
        if self.restarts == 0 {
            return fail("restarts must be ≥ 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub vectors: VectorSetFile,
    pub final_potential: f64,
    /// `m²/C(n+p−1,p)`.
    pub bound: f64,
    pub gap: f64,
    pub iterations: usize,
    pub restart: usize,
    pub converged: bool,
    /// Potential before the first step and after every accepted step.
    pub trajectory: Vec<f64>,
}

impl OptimizeResult {
    pub fn vector_set(&self) -> Result<VectorSet> {
        self.vectors.to_vector_set()
    }
}

/// Euclidean gradient of the frame potential, as `2∂F/∂x̄ᵢ`:
/// `4p Σⱼ |⟨xᵢ,xⱼ⟩|^{2(p−1)} ⟨xⱼ,xᵢ⟩ xⱼ`.
pub fn potential_gradient(vectors: &[Vec<Complex64>], p: u32) -> Vec<Vec<Complex64>> {
    let m = vectors.len();
    let n = vectors.first().map(Vec::len).unwrap_or(0);
    let mut grad = vec![vec![Complex64::new(0.0, 0.0); n]; m];
    for i in 0..m {
        for j in 0..m {
            let g_ji = inner_unchecked(&vectors[j], &vectors[i]);
            let weight = 4.0 * p as f64 * g_ji.norm_sqr().powi(p as i32 - 1);
            let coef = g_ji * weight;
            for (out, x) in grad[i].iter_mut().zip(&vectors[j]) {
                *out += coef * x;
            }
        }
    }
    grad
}

/// Removes the radial component `Re⟨xᵢ, gᵢ⟩ xᵢ` from each gradient block.
fn project_tangent(vectors: &[Vec<Complex64>], grad: &mut [Vec<Complex64>]) {
    for (x, g) in vectors.iter().zip(grad.iter_mut()) {
        let radial = inner_unchecked(x, g).re;
        for (gk, xk) in g.iter_mut().zip(x) {
            *gk -= xk * radial;
        }
    }
}

fn potential_of(vectors: &[Vec<Complex64>], p: u32) -> f64 {
    let m = vectors.len();
    let mut diag = 0.0;
    let mut off = 0.0;
    for i in 0..m {
        diag += inner_unchecked(&vectors[i], &vectors[i]).norm_sqr().powi(p as i32);
        for j in (i + 1)..m {
            off += inner_unchecked(&vectors[i], &vectors[j]).norm_sqr().powi(p as i32);
        }
    }
    diag + 2.0 * off
}

fn retract(vectors: &[Vec<Complex64>], dir: &[Vec<Complex64>], step: f64) -> Vec<Vec<Complex64>> {
    vectors
        .iter()
        .zip(dir)
        .map(|(x, g)| {
            let moved: Vec<Complex64> = x.iter().zip(g).map(|(a, b)| a - b * step).collect();
            let r = norm(&moved);
            moved.into_iter().map(|z| z / r).collect()
        })
        .collect()
}

struct Descent {
    vectors: Vec<Vec<Complex64>>,
    potential: f64,
    iterations: usize,
    converged: bool,
    trajectory: Vec<f64>,
}

fn descend(start: Vec<Vec<Complex64>>, cfg: &OptimizerConfig) -> Descent {
    const MIN_STEP: f64 = 1e-20;
    let p = cfg.p;
    let mut x = start;
    let mut f = potential_of(&x, p);
    let mut trajectory = vec![f];
    let mut iterations = 0;
    let mut converged = false;
    let mut step = cfg.step_init;

    while iterations < cfg.max_iters {
        let mut g = potential_gradient(&x, p);
        project_tangent(&x, &mut g);
        let g_sq: f64 = g.iter().flatten().map(|z| z.norm_sqr()).sum();
        if g_sq.sqrt() < cfg.grad_tol {
            converged = true;
            break;
        }
        // Try a larger step than last accepted, then backtrack.
        step = (step * 2.0).min(cfg.step_init);
        let accepted = loop {
            let candidate = retract(&x, &g, step);
            let fc = potential_of(&candidate, p);
            if fc <= f - cfg.armijo_c * step * g_sq {
                break Some((candidate, fc));
            }
            step *= 0.5;
            if step < MIN_STEP {
                break None;
            }
        };
        match accepted {
            Some((candidate, fc)) => {
                x = candidate;
                f = fc;
                trajectory.push(f);
                iterations += 1;
            }
            None => {
                // No descent at machine precision: stationary for all practical purposes.
                converged = true;
                break;
            }
        }
    }
    Descent { vectors: x, potential: f, iterations, converged, trajectory }
}

/// Best-of-restarts projected gradient descent on the frame potential.
///
/// Restart `k` starts from complex random unit vectors drawn from stream
/// `k + 1` of `cfg.seed`. The smallest final potential wins, ties going to the
/// lowest restart index.
pub fn minimize_frame_potential(m: usize, n: usize, cfg: &OptimizerConfig) -> Result<OptimizeResult> {
    cfg.validate()?;
    if n == 0 || m < n {
        return Err(Error::InvalidConfig(format!("need m ≥ n ≥ 1, got m={m}, n={n}")));
    }
    let bound = welch_sum_bound(m, n, cfg.p)?;
    let mut best: Option<(usize, Descent)> = None;
    for restart in 0..cfg.restarts {
        let start = random_unit_vectors_stream(m, n, Field::Complex, cfg.seed, restart as u64 + 1)?;
        let run = descend(start.vectors().to_vec(), cfg);
        if best.as_ref().is_none_or(|(_, b)| run.potential < b.potential) {
            best = Some((restart, run));
        }
    }
    let (restart, run) = best.expect("restarts ≥ 1");
    let vs = VectorSet::new(Field::Complex, run.vectors)?;
    Ok(OptimizeResult {
        vectors: VectorSetFile::from(&vs),
        final_potential: run.potential,
        bound,
        gap: run.potential - bound,
        iterations: run.iterations,
        restart,
        converged: run.converged,
        trajectory: run.trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{coherence, welch_coherence_bound};
    use crate::kernels::inner_product;

    #[test]
    fn random_sets_are_deterministic_and_unit() {
        let a = random_unit_vectors(10, 3, Field::Complex, 42).unwrap();
        let b = random_unit_vectors(10, 3, Field::Complex, 42).unwrap();
        assert_eq!(a, b);
        let c = random_unit_vectors(10, 3, Field::Complex, 43).unwrap();
        assert_ne!(coherence(&a).unwrap(), coherence(&c).unwrap());
        let big = random_unit_vectors(1000, 3, Field::Real, 1).unwrap();
        assert!(big.norms().iter().all(|r| (r - 1.0).abs() < 1e-12));
        assert!(big.vectors().iter().flatten().all(|z| z.im == 0.0));
        assert!(random_unit_vectors(0, 3, Field::Real, 1).is_err());
    }

    #[test]
    fn simplex_geometry() {
        for n in 1..=8 {
            let vs = simplex_frame(n).unwrap();
            assert_eq!((vs.m(), vs.n()), (n + 1, n));
            for i in 0..=n {
                for j in 0..=n {
                    let ip = inner_product(vs.vector(i), vs.vector(j)).unwrap();
                    let want = if i == j { 1.0 } else { -1.0 / n as f64 };
                    assert!((ip.re - want).abs() < 1e-14 && ip.im == 0.0, "n={n}");
                }
            }
            let lhs = sum_power_lhs(&vs, 1).unwrap();
            let rhs = welch_sum_bound(n + 1, n, 1).unwrap();
            assert!((lhs - rhs).abs() < 1e-12 * rhs);
            if n >= 2 {
                let mu = coherence(&vs).unwrap();
                assert!((mu - welch_coherence_bound(n + 1, n, 1).unwrap().value).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn orthonormal_basics() {
        let vs = orthonormal_frame(2).unwrap();
        assert_eq!(coherence(&vs).unwrap(), 0.0);
        assert_eq!(frame_potential(&vs, 3).unwrap(), 2.0);
        assert!(orthonormal_frame(0).is_err());
    }

    #[test]
    fn potential_alias() {
        let vs = random_unit_vectors(6, 3, Field::Complex, 5).unwrap();
        for p in 1..=3 {
            assert_eq!(frame_potential(&vs, p).unwrap(), sum_power_lhs(&vs, p).unwrap());
            assert_eq!(potential_of(vs.vectors(), p), sum_power_lhs(&vs, p).unwrap());
        }
    }

    /// Central finite differences over real and imaginary parts.
    fn fd_gradient(vectors: &[Vec<Complex64>], p: u32, h: f64) -> Vec<Vec<Complex64>> {
        let mut out = vec![vec![Complex64::new(0.0, 0.0); vectors[0].len()]; vectors.len()];
        for i in 0..vectors.len() {
            for k in 0..vectors[0].len() {
                for (part, dir) in [(0, Complex64::new(h, 0.0)), (1, Complex64::new(0.0, h))] {
                    let mut plus = vectors.to_vec();
                    let mut minus = vectors.to_vec();
                    plus[i][k] += dir;
                    minus[i][k] -= dir;
                    let d = (potential_of(&plus, p) - potential_of(&minus, p)) / (2.0 * h);
                    if part == 0 {
                        out[i][k].re = d;
                    } else {
                        out[i][k].im = d;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for p in 1..=3 {
            for seed in 0..5 {
                // off the sphere too: the Euclidean gradient must hold everywhere
                let vs = random_unit_vectors(5, 3, Field::Complex, seed).unwrap().scaled(0.9).unwrap();
                let analytic = potential_gradient(vs.vectors(), p);
                let numeric = fd_gradient(vs.vectors(), p, 1e-6);
                let a: Vec<Complex64> = analytic.into_iter().flatten().collect();
                let b: Vec<Complex64> = numeric.into_iter().flatten().collect();
                let diff: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
                let scale: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                assert!(diff <= 1e-5 * scale, "p={p} seed={seed}: {diff} vs {scale}");
            }
        }
    }

    #[test]
    fn config_validation() {
        let ok = OptimizerConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            OptimizerConfig { max_iters: 0, ..ok },
            OptimizerConfig { step_init: 0.0, ..ok },
            OptimizerConfig { armijo_c: 1.0, ..ok },
            OptimizerConfig { armijo_c: 0.0, ..ok },
            OptimizerConfig { restarts: 0, ..ok },
            OptimizerConfig { p: 0, ..ok },
        ] {
            assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        }
        assert!(minimize_frame_potential(2, 3, &ok).is_err());
    }

    #[test]
    fn optimizer_reaches_tight_frames() {
        for (m, n, want) in [(3, 2, 4.5), (4, 2, 8.0), (2, 2, 2.0), (5, 3, 25.0 / 3.0)] {
            let res = minimize_frame_potential(m, n, &OptimizerConfig::default()).unwrap();
            assert!((res.final_potential - want).abs() < 1e-6, "m={m} n={n}: {}", res.final_potential);
            assert!(res.gap >= -1e-9 && res.gap < 1e-6);
            assert!(res.trajectory.windows(2).all(|w| w[1] <= w[0]));
            let vs = res.vector_set().unwrap();
            assert!(vs.norms().iter().all(|r| (r - 1.0).abs() < 1e-12));
        }
        let res = minimize_frame_potential(3, 2, &OptimizerConfig::default()).unwrap();
        assert!((coherence(&res.vector_set().unwrap()).unwrap() - 0.5).abs() < 1e-4);
    }

    #[test]
    fn optimizer_respects_bound_for_higher_degree() {
        for (m, n, p) in [(3, 3, 2), (2, 2, 3), (6, 2, 2), (5, 2, 3)] {
            let cfg = OptimizerConfig { restarts: 2, ..OptimizerConfig::with_p(p) };
            let res = minimize_frame_potential(m, n, &cfg).unwrap();
            assert!(res.final_potential >= welch_sum_bound(m, n, p).unwrap() - 1e-9);
            assert!(res.trajectory.windows(2).all(|w| w[1] <= w[0]));
            if m == n {
                // sublinear near the orthonormal minimum for p ≥ 2
                assert!((res.final_potential - n as f64).abs() < 1e-6);
            }
        }
    }
}
