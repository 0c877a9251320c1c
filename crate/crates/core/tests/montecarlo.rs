mod common;

use common::F4_2;
use dmt_outage::analytic::scalar_outage_exact;
use dmt_outage::montecarlo::{calibrate_c, estimate_outage, estimate_outage_chunked, estimate_slope};
use dmt_outage::{ChannelDims, ChannelModel, CorrelationModel, Error, MultiplexingGain, Snr};
use proptest::prelude::*;

fn gain(r: f64) -> MultiplexingGain {
    MultiplexingGain::new(r).unwrap()
}

fn snr(g: f64) -> Snr {
    Snr::new(g).unwrap()
}

fn iid(m: usize, n: usize) -> ChannelModel {
    ChannelModel::iid(ChannelDims::new(m, n).unwrap())
}

const P_SCALAR: f64 = 0.339_140_198_593_172_07;

#[test]
fn low_snr_plateau_2x2() {
    let e = estimate_outage(&iid(2, 2), snr(0.01), gain(1.0), 10_000_000, 21).unwrap();
    assert!((e.p_hat - F4_2).abs() < 0.003, "{e:?}");
}

#[test]
fn scalar_estimate_covers_exact_value() {
    let exact = scalar_outage_exact(gain(0.5), snr(1.0)).unwrap();
    assert!((exact - P_SCALAR).abs() < 1e-15);
    let e = estimate_outage(&iid(1, 1), snr(1.0), gain(0.5), 1_000_000, 3).unwrap();
    assert!(e.contains(exact), "{e:?}");
}

#[test]
fn scalar_high_snr_slope() {
    let s = estimate_slope(&iid(1, 1), gain(0.5), (snr(1e3), snr(1e4)), 10_000_000, 5).unwrap();
    assert!((s.slope + 0.5).abs() <= 0.05, "{}", s.slope);
}

#[test]
fn mimo_high_snr_slope() {
    let s = estimate_slope(&iid(2, 2), gain(1.0), (snr(1e3), snr(1e4)), 10_000_000, 6).unwrap();
    assert!((s.slope + 1.0).abs() <= 0.1, "{}", s.slope);
}

#[test]
fn plateau_is_flat() {
    let s = estimate_slope(&iid(2, 2), gain(1.0), (snr(1e-3), snr(1e-2)), 1_000_000, 7).unwrap();
    assert!(s.slope.abs() <= 0.05, "{}", s.slope);
}

#[test]
fn low_snr_estimates_agree() {
    let est: Vec<_> = [0.001, 0.003, 0.01]
        .iter()
        .enumerate()
        .map(|(i, &g)| estimate_outage(&iid(2, 2), snr(g), gain(1.0), 2_000_000, 40 + i as u64).unwrap())
        .collect();
    for a in &est {
        for b in &est {
            assert!(a.overlaps(b), "{a:?} vs {b:?}");
        }
    }
}

#[test]
fn calibrated_constants() {
    let one = calibrate_c(&iid(1, 1), gain(0.5), &[snr(1e4)], 2_000_000, 8, None).unwrap();
    assert!((one.c - 1.0).abs() <= 0.1, "{}", one.c);
    assert_eq!(one.d, 0.5);
    assert!(one.below_boundary.is_empty());

    let two = calibrate_c(&iid(2, 2), gain(1.0), &[snr(1e3), snr(1e4)], 10_000_000, 9, None).unwrap();
    let (c3, c4) = (two.anchors[0].c, two.anchors[1].c);
    assert!((c3 - c4).abs() / c3.max(c4) <= 0.15, "{c3} vs {c4}");
    assert!(two.spread <= 1.15 / 0.85);
    assert!((two.c - (c3 * c4).sqrt()).abs() < 1e-12);
}

#[test]
fn calibration_requires_diversity_for_correlated_models() {
    let d = ChannelDims::new(2, 2).unwrap();
    let model = ChannelModel::new(d, CorrelationModel::exponential_kronecker(d, 0.5, 0.5).unwrap()).unwrap();
    let err = calibrate_c(&model, gain(1.0), &[snr(1e3)], 1000, 1, None).unwrap_err();
    assert_eq!(err, Error::DiversityRequired);
    assert!(calibrate_c(&model, gain(1.0), &[snr(1e3)], 100_000, 1, Some(1.0)).is_ok());
}

#[test]
fn statistical_monotonicity() {
    let model = iid(2, 2);
    let at = |g: f64, r: f64| estimate_outage(&model, snr(g), gain(r), 200_000, 12).unwrap();
    let gammas = [0.1, 1.0, 10.0, 100.0];
    for w in gammas.windows(2) {
        let (a, b) = (at(w[0], 1.0), at(w[1], 1.0));
        assert!(b.p_hat <= a.p_hat || a.overlaps(&b), "gamma {w:?}");
    }
    let rates = [0.25, 0.5, 1.0, 1.5];
    for w in rates.windows(2) {
        let (a, b) = (at(10.0, w[0]), at(10.0, w[1]));
        assert!(b.p_hat >= a.p_hat || a.overlaps(&b), "r {w:?}");
    }
}

#[test]
fn ci_coverage_against_exact_scalar_outage() {
    let model = iid(1, 1);
    let cases = [(0.5, 1.0), (0.2, 10.0), (0.8, 0.1)];
    for (r, g) in cases {
        let p = scalar_outage_exact(gain(r), snr(g)).unwrap();
        let covered = (0..200u64)
            .filter(|&seed| {
                estimate_outage(&model, snr(g), gain(r), 2_000, 1_000 + seed)
                    .unwrap()
                    .contains(p)
            })
            .count();
        assert!(covered >= 180, "r={r} gamma={g}: {covered}/200");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn counts_do_not_depend_on_chunking(seed in any::<u64>(), trials in 100u64..60_000, db in -20.0f64..30.0, rho in 0.0f64..0.95) {
        let d = ChannelDims::new(2, 2).unwrap();
        let model = ChannelModel::new(d, CorrelationModel::exponential_kronecker(d, rho, 0.3).unwrap()).unwrap();
        let s = Snr::from_db(db).unwrap();
        let one = estimate_outage_chunked(&model, s, gain(1.0), trials, seed, 1).unwrap();
        let many = estimate_outage_chunked(&model, s, gain(1.0), trials, seed, 64).unwrap();
        prop_assert_eq!(one.outage_count, many.outage_count);
        prop_assert_eq!(one, estimate_outage(&model, s, gain(1.0), trials, seed).unwrap());
    }
}
