//! ε-rank profiles of Gram matrices and scans across kernel families.
//!
//! The ε-rank of a PSD matrix is `#{σᵢ > ε·σ_max}`. For polynomial kernels it
//! is capped by the feature dimension; for other kernels the profile over a
//! range of ε shows how quickly the spectrum decays.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::random_unit_vectors_stream;
use crate::kernels::{gram_matrix, Field, GramMatrix, KernelSpec};
use crate::linalg::EigenSpectrum;

pub const DEFAULT_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankProfile {
    pub kernel: KernelSpec,
    pub m: usize,
    pub n: usize,
    pub thresholds: Vec<f64>,
    pub ranks: Vec<usize>,
    pub theoretical_dim: Option<u64>,
    pub spectrum: EigenSpectrum,
}

fn validate_thresholds(thresholds: &[f64]) -> Result<()> {
    if thresholds.is_empty() {
        return Err(Error::InvalidThresholds("no thresholds given".into()));
    }
    if let Some(bad) = thresholds.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::InvalidThresholds(format!("threshold {bad} is not a positive number")));
    }
    if thresholds.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidThresholds("thresholds must be strictly descending".into()));
    }
    Ok(())
}

fn eps_rank(spectrum: &EigenSpectrum, eps: f64) -> usize {
    let sigma_max = spectrum.values().first().copied().unwrap_or(0.0);
    let tau = eps * sigma_max;
    spectrum.values().iter().filter(|&&v| v > tau).count()
}

pub fn epsilon_rank_profile(gram: &GramMatrix, thresholds: &[f64]) -> Result<RankProfile> {
    validate_thresholds(thresholds)?;
    let spectrum = gram.spectrum()?;
    Ok(RankProfile {
        kernel: *gram.kernel(),
        m: gram.m(),
        n: gram.n(),
        thresholds: thresholds.to_vec(),
        ranks: thresholds.iter().map(|&e| eps_rank(&spectrum, e)).collect(),
        theoretical_dim: gram.kernel().feature_dim(gram.n())?,
        spectrum,
    })
}

/// One CSV row: a kernel, a trial and a threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub kernel: String,
    pub variant: String,
    pub p: Option<u32>,
    pub c: Option<f64>,
    pub gamma: Option<f64>,
    pub trial: usize,
    pub epsilon: f64,
    pub rank: usize,
    pub theoretical_dim: Option<u64>,
}

/// Per-kernel aggregate over trials at [`DEFAULT_EPSILON`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSummary {
    pub kernel: KernelSpec,
    pub label: String,
    pub median_rank: f64,
    pub min_rank: usize,
    pub max_rank: usize,
    pub theoretical_dim: Option<u64>,
    /// `median_rank == theoretical_dim`; absent for kernels without one.
    pub saturated: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankScan {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub thresholds: Vec<f64>,
    pub summary: Vec<KernelSummary>,
    #[serde(skip)]
    pub rows: Vec<ScanRow>,
}

pub const CSV_HEADER: &str = "kernel,variant,p,c,gamma,trial,epsilon,rank,theoretical_dim";

impl RankScan {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::Format(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Format(e.to_string()))
    }

    pub fn csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scan summary serializes")
    }
}

fn median(sorted: &[usize]) -> f64 {
    let k = sorted.len();
    if k % 2 == 1 {
        sorted[k / 2] as f64
    } else {
        (sorted[k / 2 - 1] + sorted[k / 2]) as f64 / 2.0
    }
}

pub fn rank_scan(family: &[KernelSpec], n: usize, m: usize, trials: usize, seed: u64) -> Result<RankScan> {
    rank_scan_with_thresholds(family, n, m, trials, seed, &[DEFAULT_EPSILON])
}

/// Runs every kernel on the same `trials` random complex unit-vector sets;
/// trial `t` draws from stream `t` of `seed`.
pub fn rank_scan_with_thresholds(
    family: &[KernelSpec],
    n: usize,
    m: usize,
    trials: usize,
    seed: u64,
    thresholds: &[f64],
) -> Result<RankScan> {
    validate_thresholds(thresholds)?;
    if family.is_empty() {
        return Err(Error::InvalidScan("empty kernel family".into()));
    }
    if trials == 0 || n == 0 {
        return Err(Error::InvalidScan(format!("need trials ≥ 1 and n ≥ 1, got trials={trials} n={n}")));
    }
    let family: Vec<KernelSpec> = family.iter().map(|k| k.validated()).collect::<Result<_>>()?;
    let dims: Vec<Option<u64>> = family.iter().map(|k| k.feature_dim(n)).collect::<Result<_>>()?;
    if let Some(max_dim) = dims.iter().flatten().max() {
        if m as u64 <= *max_dim {
            return Err(Error::InvalidScan(format!(
                "m={m} does not exceed the largest polynomial feature dimension {max_dim}"
            )));
        }
    }

    let mut rows = Vec::new();
    let mut default_ranks = vec![Vec::with_capacity(trials); family.len()];
    for trial in 0..trials {
        let vs = random_unit_vectors_stream(m, n, Field::Complex, seed, trial as u64)?;
        for (k, spec) in family.iter().enumerate() {
            let gram = gram_matrix(spec, &vs)?;
            let profile = epsilon_rank_profile(&gram, thresholds)?;
            default_ranks[k].push(eps_rank(&profile.spectrum, DEFAULT_EPSILON));
            for (&epsilon, &rank) in profile.thresholds.iter().zip(&profile.ranks) {
                rows.push(ScanRow {
                    kernel: spec.to_string(),
                    variant: spec.variant_name().to_string(),
                    p: spec.degree(),
                    c: spec.shift(),
                    gamma: spec.gamma(),
                    trial,
                    epsilon,
                    rank,
                    theoretical_dim: dims[k],
                });
            }
        }
    }

    let summary = family
        .iter()
        .zip(dims)
        .zip(default_ranks)
        .map(|((spec, theoretical_dim), mut ranks)| {
            ranks.sort_unstable();
            let median_rank = median(&ranks);
            KernelSummary {
                kernel: *spec,
                label: spec.to_string(),
                median_rank,
                min_rank: ranks[0],
                max_rank: ranks[ranks.len() - 1],
                theoretical_dim,
                saturated: theoretical_dim.map(|d| median_rank == d as f64),
            }
        })
        .collect();

    Ok(RankScan { n, m, trials, seed, thresholds: thresholds.to_vec(), summary, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{orthonormal_frame, random_unit_vectors};
    use crate::kernels::VectorSet;

    #[test]
    fn profile_examples() {
        let g = gram_matrix(&KernelSpec::LINEAR, &orthonormal_frame(5).unwrap()).unwrap();
        let prof = epsilon_rank_profile(&g, &[0.9, 0.5, 1e-8]).unwrap();
        assert_eq!(prof.ranks, vec![5, 5, 5]);

        let ones = VectorSet::from_real(&vec![vec![1.0, 0.0]; 6]).unwrap();
        let g = gram_matrix(&KernelSpec::LINEAR, &ones).unwrap();
        assert_eq!(epsilon_rank_profile(&g, &[1e-8]).unwrap().ranks, vec![1]);

        let vs = random_unit_vectors(30, 2, Field::Complex, 17).unwrap();
        let g = gram_matrix(&KernelSpec::gaussian(1.0).unwrap(), &vs).unwrap();
        let prof = epsilon_rank_profile(&g, &[1e-2, 1e-4, 1e-8]).unwrap();
        assert!(prof.ranks.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(prof.theoretical_dim, None);
    }

    #[test]
    fn threshold_validation() {
        let g = gram_matrix(&KernelSpec::LINEAR, &orthonormal_frame(2).unwrap()).unwrap();
        for bad in [&[][..], &[0.0], &[1e-4, 1e-2], &[1e-2, 1e-2], &[-1.0]] {
            assert!(matches!(epsilon_rank_profile(&g, bad), Err(Error::InvalidThresholds(_))));
        }
    }

    #[test]
    fn polynomial_scan_saturates() {
        let family: Vec<KernelSpec> = (1..=3).map(|p| KernelSpec::homogeneous(p).unwrap()).collect();
        let scan = rank_scan(&family, 2, 30, 20, 7).unwrap();
        let medians: Vec<f64> = scan.summary.iter().map(|s| s.median_rank).collect();
        assert_eq!(medians, vec![2.0, 3.0, 4.0]);
        assert!(scan.summary.iter().all(|s| s.saturated == Some(true)));
        assert_eq!(scan.rows.len(), 60);

        let scan = rank_scan(&[KernelSpec::shifted(2, 1.0).unwrap()], 2, 30, 20, 7).unwrap();
        assert_eq!(scan.summary[0].median_rank, 6.0);
    }

    #[test]
    fn gaussian_scan_has_no_ceiling() {
        let family = [KernelSpec::gaussian(0.1).unwrap(), KernelSpec::gaussian(10.0).unwrap()];
        let scan = rank_scan_with_thresholds(&family, 2, 30, 3, 1, &[1e-2, 1e-4, 1e-8]).unwrap();
        assert!(scan.summary.iter().all(|s| s.saturated.is_none() && s.theoretical_dim.is_none()));
        let coarse = |label: &str| -> Vec<usize> {
            scan.rows.iter().filter(|r| r.kernel == label && r.epsilon == 1e-2).map(|r| r.rank).collect()
        };
        let wide = coarse(&scan.summary[0].label);
        let narrow = coarse(&scan.summary[1].label);
        assert!(wide.iter().zip(&narrow).all(|(w, n)| w < n), "{wide:?} vs {narrow:?}");
        assert_eq!(scan.rows.len(), 2 * 3 * 3);
    }

    #[test]
    fn scan_rejects_small_m() {
        let fam = [KernelSpec::homogeneous(3).unwrap()];
        assert!(matches!(rank_scan(&fam, 2, 4, 1, 0), Err(Error::InvalidScan(_))));
        assert!(matches!(rank_scan(&fam, 2, 30, 0, 0), Err(Error::InvalidScan(_))));
        assert!(matches!(rank_scan(&[], 2, 30, 1, 0), Err(Error::InvalidScan(_))));
    }

    #[test]
    fn scan_is_deterministic() {
        let family = [KernelSpec::homogeneous(2).unwrap(), KernelSpec::gaussian(0.5).unwrap()];
        let a = rank_scan(&family, 3, 12, 4, 99).unwrap();
        let b = rank_scan(&family, 3, 12, 4, 99).unwrap();
        assert_eq!(a.csv_string().unwrap(), b.csv_string().unwrap());
        assert_eq!(a.summary_json(), b.summary_json());
        let csv = a.csv_string().unwrap();
        assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
        assert!(csv.lines().nth(1).unwrap().starts_with("homogeneous(p=2),homogeneous,2,,,0,"));
    }
}
