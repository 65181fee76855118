//! Left- and right-hand sides of the Welch family of inequalities.
//!
//! Every report carries both sides, their difference, and two flags: `holds`
//! (slack non-negative up to [`CHECK_TOL`]) and `tight` (slack zero up to
//! [`TIGHT_TOL`]). Both tolerances are relative to `max(1, |rhs|)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::binomial;
use crate::kernels::{inner_unchecked, GramMatrix, VectorSet};
use crate::linalg::{frobenius_norm_sq, numerical_rank, trace, RankPolicy};

pub const CHECK_TOL: f64 = 1e-9;
pub const TIGHT_TOL: f64 = 1e-6;
/// Norm tolerance for inequalities that assume unit vectors.
pub const UNIT_NORM_TOL: f64 = 1e-9;
/// Norm tolerance under which the shifted report also records the unit-norm rhs.
pub const SHIFTED_UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityId {
    /// `max_{i≠j} |⟨xᵢ,xⱼ⟩| ≥ ((m/C(n+p−1,p) − 1)/(m−1))^{1/2p}`
    WelchCoherence,
    /// `Σᵢⱼ |⟨xᵢ,xⱼ⟩|^{2p} ≥ m²/C(n+p−1,p)`
    WelchSum,
    /// `‖G‖²_F ≥ tr(G)²/rank(G)`
    Proposition1,
    /// `Σᵢⱼ |⟨xᵢ,xⱼ⟩|^{2p} / (Σᵢ ‖xᵢ‖^{2p})² ≥ 1/C(n+p−1,p)`
    Generalized,
    /// `Σᵢⱼ |⟨xᵢ,xⱼ⟩ + c|^{2p} ≥ (Σᵢ (‖xᵢ‖² + c)ᵖ)²/C(n+p,p)`
    Shifted,
    /// `Σᵢⱼ |⟨xᵢ,xⱼ⟩ + c|^{2p} ≥ m²(1+c)^{2p}/C(n+p,p)` for unit vectors
    ShiftedUnit,
}

impl InequalityId {
    pub const ALL: [InequalityId; 6] = [
        Self::WelchCoherence,
        Self::WelchSum,
        Self::Proposition1,
        Self::Generalized,
        Self::Shifted,
        Self::ShiftedUnit,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::WelchCoherence => "welch-coherence",
            Self::WelchSum => "welch-sum",
            Self::Proposition1 => "proposition1",
            Self::Generalized => "generalized",
            Self::Shifted => "shifted",
            Self::ShiftedUnit => "shifted-unit",
        }
    }

    /// Short command-line alias.
    pub fn short_name(&self) -> &'static str {
        match self {
            Self::WelchCoherence => "eq1",
            Self::WelchSum => "eq2",
            Self::Proposition1 => "prop1",
            Self::Generalized => "generalized",
            Self::Shifted => "eq6",
            Self::ShiftedUnit => "eq7",
        }
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s || id.short_name() == s)
            .ok_or_else(|| Error::Format(format!("unknown inequality id {s:?}")))
    }
}

/// One evaluated inequality instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub inequality_id: InequalityId,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub tight: bool,
    pub m: usize,
    pub n: usize,
    pub p: Option<u32>,
    pub c: Option<f64>,
    /// Numerical Gram rank, for the trace inequality.
    pub r: Option<usize>,
    /// Set when the coherence bound's radicand is non-positive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vacuous: Option<bool>,
    /// Unit-norm simplified rhs, recorded by the shifted report when it applies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_rhs: Option<f64>,
}

impl BoundReport {
    fn new(inequality_id: InequalityId, lhs: f64, rhs: f64, m: usize, n: usize) -> Self {
        let slack = lhs - rhs;
        let scale = rhs.abs().max(1.0);
        let holds = slack >= -CHECK_TOL * scale;
        let tight = holds && slack.abs() <= TIGHT_TOL * scale;
        Self {
            inequality_id,
            lhs,
            rhs,
            slack,
            holds,
            tight,
            m,
            n,
            p: None,
            c: None,
            r: None,
            vacuous: None,
            unit_rhs: None,
        }
    }

    fn with_p(mut self, p: u32) -> Self {
        self.p = Some(p);
        self
    }

    fn with_c(mut self, c: f64) -> Self {
        self.c = Some(c);
        self
    }
}

fn check_degree(p: u32) -> Result<()> {
    if p == 0 {
        Err(Error::InvalidKernel("degree p must be ≥ 1".into()))
    } else {
        Ok(())
    }
}

fn require_unit_norm(vs: &VectorSet, tol: f64) -> Result<()> {
    for (index, norm) in vs.norms().into_iter().enumerate() {
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotUnitNorm { index, norm });
        }
    }
    Ok(())
}

/// `C(n+p−1, p)`, the dimension of the degree-`p` symmetric tensor space.
pub fn symmetric_dim(n: usize, p: u32) -> Result<u64> {
    binomial(n as u64 + p as u64 - 1, p as u64)
}

/// `max_{i<j} |⟨xᵢ, xⱼ⟩|`.
pub fn coherence(vs: &VectorSet) -> Result<f64> {
    let m = vs.m();
    if m < 2 {
        return Err(Error::TooFewVectors(m));
    }
    let mut worst = 0.0_f64;
    for i in 0..m {
        for j in (i + 1)..m {
            worst = worst.max(inner_unchecked(vs.vector(i), vs.vector(j)).norm());
        }
    }
    Ok(worst)
}

/// Value of the coherence lower bound, and whether it is vacuous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceBound {
    pub value: f64,
    pub vacuous: bool,
}

/// `((m/C(n+p−1,p) − 1)/(m−1))^{1/2p}`, or 0 (vacuous) when `m ≤ C(n+p−1,p)`.
pub fn welch_coherence_bound(m: usize, n: usize, p: u32) -> Result<CoherenceBound> {
    if m < 2 {
        return Err(Error::TooFewVectors(m));
    }
    check_degree(p)?;
    let dim = symmetric_dim(n, p)?;
    if m as u64 <= dim {
        return Ok(CoherenceBound { value: 0.0, vacuous: true });
    }
    let radicand = (m as f64 - dim as f64) / (dim as f64 * (m as f64 - 1.0));
    Ok(CoherenceBound { value: radicand.powf(1.0 / (2.0 * p as f64)), vacuous: false })
}

/// `Σᵢ Σⱼ |⟨xᵢ, xⱼ⟩|^{2p}`, diagonal included.
pub fn sum_power_lhs(vs: &VectorSet, p: u32) -> Result<f64> {
    check_degree(p)?;
    let m = vs.m();
    let mut diag = 0.0;
    let mut off = 0.0;
    for i in 0..m {
        diag += inner_unchecked(vs.vector(i), vs.vector(i)).norm_sqr().powi(p as i32);
        for j in (i + 1)..m {
            off += inner_unchecked(vs.vector(i), vs.vector(j)).norm_sqr().powi(p as i32);
        }
    }
    Ok(diag + 2.0 * off)
}

/// `m² / C(n+p−1, p)`.
pub fn welch_sum_bound(m: usize, n: usize, p: u32) -> Result<f64> {
    check_degree(p)?;
    if m == 0 || n == 0 {
        return Err(Error::InvalidVectorSet(format!("m={m}, n={n}")));
    }
    let dim = symmetric_dim(n, p)?;
    let m_sq = (m as u64)
        .checked_mul(m as u64)
        .ok_or_else(|| Error::Overflow(format!("{m}²")))?;
    Ok(m_sq as f64 / dim as f64)
}

/// Power-sum Welch bound for a unit-norm set.
pub fn welch_sum_report(vs: &VectorSet, p: u32) -> Result<BoundReport> {
    require_unit_norm(vs, UNIT_NORM_TOL)?;
    let lhs = sum_power_lhs(vs, p)?;
    let rhs = welch_sum_bound(vs.m(), vs.n(), p)?;
    Ok(BoundReport::new(InequalityId::WelchSum, lhs, rhs, vs.m(), vs.n()).with_p(p))
}

/// Trace inequality `‖G‖²_F ≥ (Re tr G)² / r` with `r` the numerical rank.
pub fn proposition1_report(gram: &GramMatrix) -> Result<BoundReport> {
    let spectrum = gram.spectrum()?;
    let r = numerical_rank(&spectrum, RankPolicy::default());
    let lhs = frobenius_norm_sq(gram.matrix());
    let tr = trace(gram.matrix())?.re;
    let rhs = if r == 0 { 0.0 } else { tr * tr / r as f64 };
    let kernel = gram.kernel();
    let mut report = BoundReport::new(InequalityId::Proposition1, lhs, rhs, gram.m(), gram.n());
    report.p = kernel.degree();
    report.c = kernel.shift();
    report.r = Some(r);
    Ok(report)
}

/// Ratio form without unit norms: `Σ|⟨xᵢ,xⱼ⟩|^{2p} / (Σ‖xᵢ‖^{2p})² ≥ 1/C(n+p−1,p)`.
pub fn generalized_report(vs: &VectorSet, p: u32) -> Result<BoundReport> {
    check_degree(p)?;
    let denom: f64 = vs.norms().iter().map(|r| r.powi(2 * p as i32)).sum();
    if denom == 0.0 {
        return Err(Error::AllZeroVectors);
    }
    let lhs = sum_power_lhs(vs, p)? / (denom * denom);
    let rhs = 1.0 / symmetric_dim(vs.n(), p)? as f64;
    Ok(BoundReport::new(InequalityId::Generalized, lhs, rhs, vs.m(), vs.n()).with_p(p))
}

fn shifted_lhs(vs: &VectorSet, p: u32, c: f64) -> f64 {
    let m = vs.m();
    let term = |i: usize, j: usize| (inner_unchecked(vs.vector(i), vs.vector(j)) + c).norm_sqr().powi(p as i32);
    let mut diag = 0.0;
    let mut off = 0.0;
    for i in 0..m {
        diag += term(i, i);
        for j in (i + 1)..m {
            off += term(i, j);
        }
    }
    diag + 2.0 * off
}

fn check_shift(c: f64) -> Result<()> {
    if c.is_finite() && c >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidKernel(format!("shift c must be finite and ≥ 0, got {c}")))
    }
}

fn shifted_unit_rhs(m: usize, p: u32, c: f64, dim: u64) -> f64 {
    (m * m) as f64 * (1.0 + c).powi(2 * p as i32) / dim as f64
}

/// `Σ|⟨xᵢ,xⱼ⟩ + c|^{2p} ≥ (Σ(‖xᵢ‖² + c)ᵖ)² / C(n+p,p)`.
///
/// When every norm is within [`SHIFTED_UNIT_TOL`] of 1 the simplified
/// unit-norm rhs is recorded in `unit_rhs`.
pub fn shifted_report(vs: &VectorSet, p: u32, c: f64) -> Result<BoundReport> {
    check_degree(p)?;
    check_shift(c)?;
    let dim = binomial(vs.n() as u64 + p as u64, p as u64)?;
    let norms = vs.norms();
    let diag_sum: f64 = norms.iter().map(|r| (r * r + c).powi(p as i32)).sum();
    let lhs = shifted_lhs(vs, p, c);
    let rhs = diag_sum * diag_sum / dim as f64;
    let mut report = BoundReport::new(InequalityId::Shifted, lhs, rhs, vs.m(), vs.n()).with_p(p).with_c(c);
    if norms.iter().all(|r| (r - 1.0).abs() <= SHIFTED_UNIT_TOL) {
        let unit = shifted_unit_rhs(vs.m(), p, c, dim);
        debug_assert!((unit - rhs).abs() <= 1e-10 * rhs.abs().max(1.0));
        report.unit_rhs = Some(unit);
    }
    Ok(report)
}

/// `Σ|⟨xᵢ,xⱼ⟩ + c|^{2p} ≥ m²(1+c)^{2p} / C(n+p,p)` for unit vectors.
pub fn shifted_unit_report(vs: &VectorSet, p: u32, c: f64) -> Result<BoundReport> {
    check_degree(p)?;
    check_shift(c)?;
    require_unit_norm(vs, UNIT_NORM_TOL)?;
    let dim = binomial(vs.n() as u64 + p as u64, p as u64)?;
    let lhs = shifted_lhs(vs, p, c);
    let rhs = shifted_unit_rhs(vs.m(), p, c, dim);
    Ok(BoundReport::new(InequalityId::ShiftedUnit, lhs, rhs, vs.m(), vs.n()).with_p(p).with_c(c))
}

/// Coherence against its lower bound, for unit vectors.
pub fn coherence_report(vs: &VectorSet, p: u32) -> Result<BoundReport> {
    if vs.m() < 2 {
        return Err(Error::TooFewVectors(vs.m()));
    }
    require_unit_norm(vs, UNIT_NORM_TOL)?;
    let lhs = coherence(vs)?;
    let bound = welch_coherence_bound(vs.m(), vs.n(), p)?;
    let mut report = BoundReport::new(InequalityId::WelchCoherence, lhs, bound.value, vs.m(), vs.n()).with_p(p);
    report.vacuous = Some(bound.vacuous);
    Ok(report)
}
