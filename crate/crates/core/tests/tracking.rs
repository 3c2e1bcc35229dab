//! End-to-end tracking on the spiral trajectory.

use se3_ukf::experiment::{run_filter, simulate, summarize, Case, ExperimentConfig};
use se3_ukf::{FilterKind, ZetaMode};

#[test]
fn zero_offset_tracks_closely() {
    let cfg = ExperimentConfig {
        case: Case::Zero,
        duration: 20.0,
        seed: 4,
        ..Default::default()
    };
    let sc = simulate(&cfg).unwrap();
    for kind in FilterKind::ALL {
        let run = run_filter(kind, &cfg, &sc);
        assert!(run.failure.is_none());
        let s = summarize(&run.records, 10.0, 20.0).unwrap();
        assert!(s.mean_theta_e < 3.0 * cfg.sigma_r, "{kind}: {s:?}");
        assert!(s.mean_r_e < 5.0 * cfg.sigma_p, "{kind}: {s:?}");
    }
}

#[test]
fn additive_zeta_tracks_like_exact() {
    let mut cfg = ExperimentConfig {
        duration: 10.0,
        seed: 2,
        ..Default::default()
    };
    let sc = simulate(&cfg).unwrap();
    let exact = run_filter(FilterKind::La, &cfg, &sc);
    cfg.params.zeta_mode = ZetaMode::Additive;
    let additive = run_filter(FilterKind::La, &cfg, &sc);
    let a = summarize(&exact.records, 5.0, 10.0).unwrap();
    let b = summarize(&additive.records, 5.0, 10.0).unwrap();
    assert!((a.mean_theta_e - b.mean_theta_e).abs() < 0.01);
    assert!((a.mean_r_e - b.mean_r_e).abs() < 0.01);
}

#[test]
fn divergence_stops_the_run() {
    let cfg = ExperimentConfig {
        duration: 1.0,
        p0: 1e7,
        ..Default::default()
    };
    let sc = simulate(&cfg).unwrap();
    let run = run_filter(FilterKind::Lg, &cfg, &sc);
    let (t, err) = run.failure.unwrap();
    assert_eq!(t, 0.0);
    assert!(matches!(err, se3_ukf::Error::JacobianSingular { .. }));
}
