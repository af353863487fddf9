use korobov_relu::korobov::{korobov_norm, make_test_function, SineTerm};
use korobov_relu::{KorobovFunction, QuadratureSpec, TestFamily};
use proptest::prelude::*;

const FAMILIES: [TestFamily; 3] = [
    TestFamily::SineProduct,
    TestFamily::PolynomialBump,
    TestFamily::RandomTrig,
];
const PS: [f64; 3] = [1.0, 2.0, f64::INFINITY];

#[test]
fn norm_is_homogeneous() {
    let quad = QuadratureSpec::with_resolution(32);
    for d in [1, 2] {
        for family in FAMILIES {
            let f = make_test_function(family, d, 3).unwrap();
            for p in PS {
                let base = korobov_norm(&f, p, &quad).unwrap();
                for c in [2.0, -3.0, 0.5] {
                    let scaled = korobov_norm(&f.scaled(c), p, &quad).unwrap();
                    assert!(
                        (scaled - c.abs() * base).abs() <= 1e-10 * c.abs() * base,
                        "{family} d={d} p={p} c={c}"
                    );
                }
            }
        }
    }
}

fn sine_sum(d: usize, terms: Vec<(f64, Vec<u32>)>) -> KorobovFunction {
    KorobovFunction::sine_sum(
        d,
        terms
            .into_iter()
            .map(|(coeff, freqs)| SineTerm { coeff, freqs })
            .collect(),
    )
}

fn terms(d: usize) -> impl Strategy<Value = Vec<(f64, Vec<u32>)>> {
    prop::collection::vec((-2.0..2.0f64, prop::collection::vec(1u32..4, d)), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn triangle_inequality(a in terms(2), b in terms(2), pi in 0usize..3) {
        let p = PS[pi];
        let quad = QuadratureSpec::with_resolution(32);
        let (f, g) = (sine_sum(2, a), sine_sum(2, b));
        let lhs = korobov_norm(&f.sum(&g).unwrap(), p, &quad).unwrap();
        let rhs = korobov_norm(&f, p, &quad).unwrap() + korobov_norm(&g, p, &quad).unwrap();
        prop_assert!(lhs <= rhs + 1e-9, "{lhs} > {rhs}");
    }

    #[test]
    fn triangle_inequality_1d(a in terms(1), b in terms(1), pi in 0usize..3) {
        let p = PS[pi];
        let quad = QuadratureSpec::with_resolution(64);
        let (f, g) = (sine_sum(1, a), sine_sum(1, b));
        let lhs = korobov_norm(&f.sum(&g).unwrap(), p, &quad).unwrap();
        let rhs = korobov_norm(&f, p, &quad).unwrap() + korobov_norm(&g, p, &quad).unwrap();
        prop_assert!(lhs <= rhs + 1e-9);
    }
}

#[test]
fn quadrature_converges_for_sine_product() {
    for d in [1, 2] {
        let f = make_test_function(TestFamily::SineProduct, d, 0).unwrap();
        for p in [1.0, 2.0, 3.0] {
            let coarse = korobov_norm(&f, p, &QuadratureSpec::with_resolution(64)).unwrap();
            let fine = korobov_norm(&f, p, &QuadratureSpec::with_resolution(128)).unwrap();
            assert!((coarse - fine).abs() < 1e-8, "d={d} p={p}: {coarse} vs {fine}");
        }
    }
}

#[test]
fn sine_product_has_exact_norm() {
    // ‖sin(πx)‖ + ‖π² sin(πx)‖ with ‖sin(πx)‖_{L_2[-1,1]} = 1
    let f = make_test_function(TestFamily::SineProduct, 1, 0).unwrap();
    let n2 = korobov_norm(&f, 2.0, &QuadratureSpec::default()).unwrap();
    let expected = 1.0 + std::f64::consts::PI.powi(2);
    assert!((n2 - expected).abs() < 1e-10 * expected);
}
