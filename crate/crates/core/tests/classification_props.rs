use korobov_relu::classification::{empirical_risk, random_net, read_dataset, sign_label, truncate, write_dataset};
use korobov_relu::{erm_train, Distribution, Family, HypothesisConstraints, LossSpec, Sample, TrainBudget};
use proptest::prelude::*;

fn eta_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(2.0), 1.0..4.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn risk_is_midpoint_convex_in_beta(eta in eta_strategy(), m in 1usize..8, seed in any::<u64>(), t in 0.0..1.0f64) {
        let spec = LossSpec::new(eta).unwrap();
        let dist = Distribution::new(2, Family::Linear).unwrap();
        let data = dist.sample(64, seed);
        let c = HypothesisConstraints::new(2, m, 1.0);
        let a = random_net(&c, seed);
        let b: Vec<f64> = random_net(&c, seed ^ 1).atoms().iter().map(|x| x.beta).collect();
        let ba: Vec<f64> = a.atoms().iter().map(|x| x.beta).collect();
        let mix = |s: f64| a.with_betas(&ba.iter().zip(&b).map(|(p, q)| (1.0 - s) * p + s * q).collect::<Vec<_>>());
        let r = |s: f64| empirical_risk(&mix(s), &data, &spec).unwrap();
        let (lo, hi) = (t * 0.5, 0.5 + t * 0.5);
        prop_assert!(r((lo + hi) / 2.0) <= (r(lo) + r(hi)) / 2.0 + 1e-10);
    }

    #[test]
    fn truncation_never_hurts(eta in eta_strategy(), v in -10.0..10.0f64, positive in any::<bool>()) {
        let spec = LossSpec::new(eta).unwrap();
        let y = if positive { 1.0 } else { -1.0 };
        prop_assert!(spec.loss(y * truncate(v)) <= spec.loss(y * v));
    }

    #[test]
    fn truncation_keeps_the_sign(v in -10.0..10.0f64) {
        prop_assume!(v != 0.0);
        prop_assert_eq!(sign_label(truncate(v)), sign_label(v));
    }
}

#[test]
fn truncated_risk_on_random_pairs() {
    let dist = Distribution::new(1, Family::Power { theta: 2.0 }).unwrap();
    for eta in [1.0, 2.0, 3.0] {
        let spec = LossSpec::new(eta).unwrap();
        for seed in 0..100u64 {
            let net = random_net(&HypothesisConstraints::with_beta_cap(1, 4, 5.0), seed);
            for s in dist.sample(100, seed) {
                let f = net.value(&s.x);
                assert!(spec.loss(s.y * truncate(f)) <= spec.loss(s.y * f));
            }
        }
    }
}

#[test]
fn erm_never_exceeds_the_zero_net() {
    let budget = TrainBudget {
        restarts: 2,
        iterations: 100,
        ..TrainBudget::default()
    };
    for (d, family) in [
        (1, Family::Linear),
        (2, Family::Checkerboard),
        (1, Family::Constant { eta: 0.5 }),
    ] {
        let dist = Distribution::new(d, family).unwrap();
        for eta in [1.0, 2.0] {
            let spec = LossSpec::new(eta).unwrap();
            for seed in 0..4 {
                let data = dist.sample(200, seed);
                let c = HypothesisConstraints::new(d, 6, 1.0);
                let r = erm_train(&data, &c, &spec, &budget, seed).unwrap();
                assert!(r.empirical_risk <= 1.0);
                assert!(r.constraint_certificate);
            }
        }
    }
}

#[test]
fn erm_is_deterministic() {
    let dist = Distribution::new(1, Family::Linear).unwrap();
    let data = dist.sample(300, 5);
    let c = HypothesisConstraints::new(1, 8, 1.0);
    let budget = TrainBudget {
        restarts: 3,
        iterations: 150,
        ..TrainBudget::default()
    };
    let a = erm_train(&data, &c, &LossSpec::hinge(), &budget, 11).unwrap();
    let b = erm_train(&data, &c, &LossSpec::hinge(), &budget, 11).unwrap();
    assert_eq!(a, b);
}

#[test]
fn dataset_round_trip() {
    let data = Distribution::new(3, Family::Linear).unwrap().sample(50, 2);
    let mut buf = Vec::new();
    write_dataset(&mut buf, &data).unwrap();
    assert!(String::from_utf8_lossy(&buf).starts_with("x1,x2,x3,y"));
    let back: Vec<Sample> = read_dataset(buf.as_slice()).unwrap();
    assert_eq!(back, data);
}
