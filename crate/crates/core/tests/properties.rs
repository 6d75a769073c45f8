use proptest::prelude::*;

use lfpp::estimators::{
    estimate_Q, lower_median, ratio_from_estimates, subadditive_rate, EstimateRecord, Params,
    ScaleLadder,
};
use lfpp::gff::{sample_field, SamplerConfig};
use lfpp::harness::{read_field, write_field};
use lfpp::metric::{ball_to_ball, distance};
use lfpp::mollify::mollify_truncated;
use lfpp::{GridField, MollifiedField, RegionMask, WeightedGrid};

const N: usize = 32;

fn rough_field(coeffs: &[f64]) -> GridField {
    rough_field_on(N, coeffs)
}

fn rough_field_on(n: usize, coeffs: &[f64]) -> GridField {
    GridField::from_fn(n, 8.0, |x, y| {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * ((k as f64 + 1.0) * (0.7 * x + 0.3 * y) + k as f64).sin())
            .sum()
    })
    .unwrap()
}

fn grid(f: &GridField, xi: f64) -> WeightedGrid {
    WeightedGrid::new(&MollifiedField::unmollified(f.clone(), 0.0), xi).unwrap()
}

fn point() -> impl Strategy<Value = (usize, usize)> {
    (0..N, 0..N)
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn weyl_scaling_is_exact(
        coeffs in prop::collection::vec(-1.0..1.0f64, 4),
        c in -2.0..2.0f64,
        xi in 0.1..0.6f64,
        a in point(),
        b in point(),
    ) {
        let f = rough_field(&coeffs);
        let mask = RegionMask::full(f.lattice());
        let d0 = distance(&grid(&f, xi), &[a], &[b], &mask).unwrap();
        let d1 = distance(&grid(&f.add_constant(c), xi), &[a], &[b], &mask).unwrap();
        let expected = (xi * c).exp() * d0.value;
        prop_assert!((d1.value - expected).abs() <= 1e-12 * expected.max(1e-300));
        prop_assert_eq!(d0.path, d1.path);
    }

    #[test]
    fn distance_is_symmetric_and_triangular(
        coeffs in prop::collection::vec(-1.0..1.0f64, 4),
        a in point(),
        b in point(),
        c in point(),
    ) {
        let g = grid(&rough_field(&coeffs), 0.4);
        let mask = RegionMask::full(g.lattice());
        let d = |x, y| distance(&g, &[x], &[y], &mask).unwrap().value;
        let (ab, ba) = (d(a, b), d(b, a));
        prop_assert!((ab - ba).abs() <= 1e-12 * ab.max(1.0));
        prop_assert!(d(a, c) <= ab + d(b, c) + 1e-12);
    }

    #[test]
    fn shrinking_the_region_never_shortens(
        coeffs in prop::collection::vec(-1.0..1.0f64, 4),
        half in 1.0..3.5f64,
    ) {
        let g = grid(&rough_field(&coeffs), 0.4);
        let lat = *g.lattice();
        let small = RegionMask::square(&lat, [0.0, 0.0], 2.0 * half);
        let big = RegionMask::full(&lat);
        let a = lat.nearest([-0.9 * half, 0.0]).unwrap();
        let b = lat.nearest([0.9 * half, 0.1]).unwrap();
        prop_assume!(small.contains(a.0, a.1) && small.contains(b.0, b.1));
        let ds = distance(&g, &[a], &[b], &small).unwrap().value;
        let db = distance(&g, &[a], &[b], &big).unwrap().value;
        prop_assert!(db <= ds);
    }

    #[test]
    fn ball_distance_is_below_point_distance(
        coeffs in prop::collection::vec(-1.0..1.0f64, 4),
        rho in 0.3..0.8f64,
    ) {
        let g = grid(&rough_field(&coeffs), 0.4);
        let lat = *g.lattice();
        let region = RegionMask::square(&lat, [0.0, 0.0], 4.0);
        let (z, w) = ([-1.5, 0.0], [1.5, 0.5]);
        let pz = lat.nearest(z).unwrap();
        let pw = lat.nearest(w).unwrap();
        let point = ball_to_ball(&g, z, w, 0.0, &region).unwrap().value;
        let ball = ball_to_ball(&g, z, w, rho, &region).unwrap().value;
        let direct = distance(&g, &[pz], &[pw], &region.dilate(&lat, rho)).unwrap().value;
        prop_assert!(ball <= direct + 1e-12);
        prop_assert!(ball <= point + 1e-12);
    }

    #[test]
    fn median_tolerates_infinite_sentinels(
        mut xs in prop::collection::vec(0.0..10.0f64, 20..80),
        frac in 0.0..0.1f64,
    ) {
        let mut sorted = xs.clone();
        sorted.sort_by(f64::total_cmp);
        let m = (frac * xs.len() as f64).floor() as usize;
        for v in xs.iter_mut().take(m) {
            *v = f64::INFINITY;
        }
        let med = lower_median(&xs);
        let k = (sorted.len() - 1) / 2;
        prop_assert!(med.is_finite());
        prop_assert!(med >= sorted[k.saturating_sub(m)] && med <= sorted[k + m]);
    }

    #[test]
    fn record_interval_contains_estimate(
        xs in prop::collection::vec(-5.0..5.0f64, 1..60),
        seed in any::<u64>(),
    ) {
        let rec = EstimateRecord::from_samples("x", Params::xi(0.3), xs.clone(), seed, "h").unwrap();
        prop_assert!(rec.lo90 <= rec.estimate && rec.estimate <= rec.hi90);
        prop_assert_eq!(rec.n_samples, xs.len());
        let again = EstimateRecord::from_samples("x", Params::xi(0.3), xs, seed, "h").unwrap();
        prop_assert_eq!(rec.csv_row(), again.csv_row());
    }

    #[test]
    fn ladder_radii_are_separated(eps_exp in 3.0..40.0f64, zeta in 0.05..0.95f64) {
        let eps = 10f64.powf(-eps_exp);
        let ladder = ScaleLadder::new(eps, zeta).unwrap();
        prop_assert!(!ladder.radii.is_empty());
        for w in ladder.radii.windows(2) {
            prop_assert!(w[0] >= 10.0 * w[1] * (1.0 - 1e-12));
        }
        for &r in &ladder.extended().unwrap().radii {
            prop_assert!(r >= eps && r <= 1.0);
        }
    }

    #[test]
    fn field_dump_round_trips(values in prop::collection::vec(-1e6..1e6f64, 64), ox in -5.0..5.0f64) {
        let f = GridField::new(8, 3.0, [ox, -ox], values).unwrap();
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        let g = read_field(&buf).unwrap();
        prop_assert_eq!(g.origin(), f.origin());
        prop_assert!(f.values().iter().zip(g.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn truncated_mollifier_commutes_with_constants(c in -3.0..3.0f64, coeffs in prop::collection::vec(-1.0..1.0f64, 3)) {
        let f = rough_field_on(64, &coeffs);
        let a = mollify_truncated(&f, 0.5, 1.0).unwrap();
        let b = mollify_truncated(&f.add_constant(c), 0.5, 1.0).unwrap();
        for (x, y) in a.base.values().iter().zip(b.base.values()) {
            prop_assert!((y - x - c).abs() < 1e-9);
        }
    }

    #[test]
    fn power_law_exponent_is_recovered(q in 2.0..4.0f64, xi in 0.1..0.8f64, scale in 0.1..10.0f64) {
        let recs: Vec<_> = (3..7)
            .map(|k| {
                let e = 2f64.powi(-k);
                let a = scale * e.powf(1.0 - xi * q);
                EstimateRecord::derived("a_eps", Params::xi(xi).eps(e), a, (a, a), 1, 0, "")
            })
            .collect();
        prop_assert!((estimate_Q(&recs, xi).unwrap().estimate - q).abs() < 1e-9);
    }

    #[test]
    fn ratio_cancels_common_factors(r in 0.01..1.0f64, a in 0.1..10.0f64, c in 0.1..10.0f64) {
        let rho = ratio_from_estimates(r, a * c / r, c, a);
        prop_assert!((rho - 1.0).abs() < 1e-12);
    }

    #[test]
    fn near_additive_sequences_are_certified(
        alpha in -3.0..3.0f64,
        noise in prop::collection::vec(-1.0..1.0f64, 2..25),
    ) {
        let x: Vec<f64> = noise.iter().enumerate().map(|(k, e)| alpha * (k + 1) as f64 + e).collect();
        let cert = subadditive_rate(&x, 3.0).unwrap();
        prop_assert!(cert.condition_holds && cert.bound_holds);
        prop_assert!(cert.minimal_c <= 3.0);
    }
}

#[test]
fn sampling_is_reproducible_per_seed() {
    let cfg = SamplerConfig::new(64, 8.0, 5);
    let a = sample_field(&cfg).unwrap();
    let b = sample_field(&cfg).unwrap();
    let c = sample_field(&cfg.with_seed(6)).unwrap();
    assert_eq!(a.values(), b.values());
    assert_ne!(a.values(), c.values());
}
