use manifold_core::estimator::mc_radius_curve;
use manifold_core::generators::noise::smooth_perturbation;
use manifold_core::generators::Grid;
use manifold_core::signal::rms_envelope;
use manifold_core::{
    classify, directed_hausdorff, point_set_distance, Margin, Metric, RadiusState, Signal,
    SignalSet,
};
use proptest::prelude::*;

fn vec_of(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, len)
}

fn nonzero_vec_of(len: usize) -> impl Strategy<Value = Vec<f64>> {
    vec_of(len).prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
}

fn rows(max_count: usize, len: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(nonzero_vec_of(len), 1..=max_count)
}

fn metric() -> impl Strategy<Value = Metric> {
    prop::sample::select(Metric::ALL.to_vec())
}

proptest! {
    #[test]
    fn distance_symmetric(len in 1usize..24, seed in any::<u64>(), m in metric()) {
        let (a, b) = pair(len, seed);
        prop_assert_eq!(m.distance(&a, &b).unwrap(), m.distance(&b, &a).unwrap());
        prop_assert_eq!(m.distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn triangle_inequality(
        (a, b, c) in (1usize..24).prop_flat_map(|n| (vec_of(n), vec_of(n), vec_of(n)))
    ) {
        for m in [Metric::Sup, Metric::Euclidean] {
            let ab = m.distance(&a, &b).unwrap();
            let bc = m.distance(&b, &c).unwrap();
            let ac = m.distance(&a, &c).unwrap();
            prop_assert!(ac <= (ab + bc) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn cosine_scale_invariant(
        (a, b) in (1usize..24).prop_flat_map(|n| (nonzero_vec_of(n), nonzero_vec_of(n))),
        s in 0.01f64..100.0,
    ) {
        let scaled: Vec<f64> = a.iter().map(|x| x * s).collect();
        let d0 = Metric::Cosine.distance(&a, &b).unwrap();
        let d1 = Metric::Cosine.distance(&scaled, &b).unwrap();
        prop_assert!((d0 - d1).abs() <= 1e-12);
        prop_assert!((0.0..=2.0).contains(&d0));
    }

    #[test]
    fn norm_equivalence((a, b) in (1usize..64).prop_flat_map(|n| (vec_of(n), vec_of(n)))) {
        let sup = Metric::Sup.distance(&a, &b).unwrap();
        let l2 = Metric::Euclidean.distance(&a, &b).unwrap();
        let root_n = (a.len() as f64).sqrt();
        prop_assert!(sup <= l2 * (1.0 + 1e-12));
        prop_assert!(l2 <= root_n * sup * (1.0 + 1e-12));
    }

    #[test]
    fn subsets_sit_inside(r in rows(20, 6), k in 1usize..20, m in metric()) {
        let set = SignalSet::from_rows(r).unwrap();
        let small = set.prefix(k.min(set.len())).unwrap();
        prop_assert_eq!(directed_hausdorff(m, &small, &set).unwrap(), 0.0);
    }

    #[test]
    fn resample_stays_in_range(v in prop::collection::vec(-5.0f64..5.0, 2..60), n in 2usize..200) {
        let out = Signal::new(v.clone(), 0.1).unwrap().resample_uniform(n).unwrap();
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(out.len(), n);
        prop_assert!(out.values().iter().all(|&x| x >= lo && x <= hi));
        prop_assert_eq!(out.values()[0], v[0]);
        prop_assert_eq!(out.values()[n - 1], v[v.len() - 1]);
    }

    #[test]
    fn normalizers_idempotent_and_scale_free(v in nonzero_vec_of(12), s in 0.01f64..100.0) {
        let x = Signal::new(v.clone(), 1.0).unwrap();
        let cx = Signal::new(v.iter().map(|a| a * s).collect(), 1.0).unwrap();
        let once = x.normalize_max_abs().unwrap();
        let twice = once.normalize_max_abs().unwrap();
        prop_assert_eq!(once.values(), twice.values());
        for (a, b) in once.values().iter().zip(cx.normalize_max_abs().unwrap().values()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        let u = x.l2_normalize().unwrap();
        let norm: f64 = u.values().iter().map(|a| a * a).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() <= 1e-12);
        for (a, b) in u.values().iter().zip(u.l2_normalize().unwrap().values()) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn rms_bounded(v in prop::collection::vec(-5.0f64..5.0, 2..80), w in 1usize..80) {
        let w = w.min(v.len());
        let env = rms_envelope(&v, w).unwrap();
        let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        prop_assert_eq!(env.len(), v.len());
        prop_assert!(env.iter().all(|&e| e >= 0.0 && e <= peak));
    }

    #[test]
    fn radius_history_monotone(r in rows(64, 8), m in metric()) {
        let mut st = RadiusState::new(&r[0], m, Margin::default()).unwrap();
        for x in &r {
            st.observe(x).unwrap();
        }
        let h = st.history();
        prop_assert_eq!(h.len(), r.len());
        prop_assert!(h.windows(2).all(|w| w[0].r_hat <= w[1].r_hat));
        prop_assert_eq!(st.r_hat(), h.iter().map(|o| o.distance).fold(0.0, f64::max));
    }

    #[test]
    fn mc_curve_monotone_and_reproducible(r in rows(80, 6), trials in 1usize..8, seed in any::<u64>(), m in metric()) {
        let set = SignalSet::from_rows(r).unwrap();
        prop_assume!(set.len() >= 2);
        let sizes: Vec<usize> = [2, 3, 5, 8, 13, 21, 34, 55].into_iter().filter(|&n| n <= set.len()).collect();
        let a = mc_radius_curve(&set, m, &sizes, trials, seed).unwrap();
        let b = mc_radius_curve(&set, m, &sizes, trials, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.r_hat_max().windows(2).all(|w| w[0] <= w[1]));
        for row in &a.rows {
            prop_assert!(row.r_bar <= row.r_hat_max && row.r_hat_mean <= row.r_hat_max);
        }
    }

    #[test]
    fn classification_monotone(r in rows(30, 5), q in nonzero_vec_of(5), e1 in 0.0f64..3.0, e2 in 0.0f64..3.0, m in metric()) {
        let set = SignalSet::from_rows(r).unwrap();
        let (lo, hi) = (e1.min(e2), e1.max(e2));
        let a = classify(&q, &set, m, lo).unwrap();
        let b = classify(&q, &set, m, hi).unwrap();
        prop_assert!(!a.accepted || b.accepted);
        prop_assert_eq!(a.accepted, a.distance < lo);
    }

    #[test]
    fn more_members_never_farther(r in rows(30, 5), extra in rows(10, 5), q in nonzero_vec_of(5), m in metric()) {
        let small = SignalSet::from_rows(r.clone()).unwrap();
        let mut all = r;
        all.extend(extra);
        let mut rev = all.clone();
        rev.reverse();
        let big = SignalSet::from_rows(all).unwrap();
        let d_small = point_set_distance(m, &q, &small).unwrap().0;
        let d_big = point_set_distance(m, &q, &big).unwrap().0;
        prop_assert!(d_big <= d_small);
        prop_assert_eq!(point_set_distance(m, &q, &SignalSet::from_rows(rev).unwrap()).unwrap().0, d_big);
    }

    #[test]
    fn perturbation_bounded(c in prop::collection::vec(-1.0f64..=1.0, 4), eps in 0.0f64..1.0) {
        let eta = smooth_perturbation(eps, &c, Grid::new(257, 2.0).unwrap());
        prop_assert!(eta.iter().all(|v| v.abs() <= eps * 4.0));
        prop_assert_eq!(eta[0], 0.0);
    }
}

fn pair(len: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
            if v.iter().any(|x| *x != 0.0) {
                return v;
            }
        }
    };
    (draw(), draw())
}
