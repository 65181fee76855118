use welch_kernel::bounds::{proposition1_report, welch_sum_report};
use welch_kernel::formats::VectorSetFile;
use welch_kernel::frames::{minimize_frame_potential, random_unit_vectors, OptimizerConfig};
use welch_kernel::kernels::{gram_matrix, Field, KernelSpec};
use welch_kernel::rank::{epsilon_rank_profile, rank_scan};

#[test]
fn file_round_trip_preserves_reports() {
    let vs = random_unit_vectors(9, 3, Field::Complex, 11).unwrap();
    let reread = VectorSetFile::from_json(&VectorSetFile::to_json(&vs)).unwrap();
    assert_eq!(welch_sum_report(&vs, 2).unwrap(), welch_sum_report(&reread, 2).unwrap());
    assert_eq!(vs.fingerprint(), reread.fingerprint());
}

#[test]
fn optimized_frame_feeds_the_other_modules() {
    let res = minimize_frame_potential(5, 3, &OptimizerConfig::default()).unwrap();
    let vs = res.vector_set().unwrap();
    let report = welch_sum_report(&vs, 1).unwrap();
    assert!(report.tight, "{report:?}");

    let g = gram_matrix(&KernelSpec::LINEAR, &vs).unwrap();
    let prop = proposition1_report(&g).unwrap();
    assert_eq!(prop.r, Some(3));
    assert!(prop.tight);

    let profile = epsilon_rank_profile(&g, &[1e-4, 1e-8]).unwrap();
    assert_eq!(profile.ranks, vec![3, 3]);
}

#[test]
fn scan_matches_single_profiles() {
    let family = [KernelSpec::homogeneous(2).unwrap(), KernelSpec::gaussian(1.0).unwrap()];
    let scan = rank_scan(&family, 2, 12, 2, 4).unwrap();
    assert_eq!(scan.rows.len(), 4);
    assert_eq!(scan.summary[0].median_rank, 3.0);
    assert_eq!(scan.summary[0].saturated, Some(true));
    assert_eq!(scan.summary[1].saturated, None);
}
