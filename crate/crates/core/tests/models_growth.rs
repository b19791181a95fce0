mod common;

use common::*;
use growthlab::growth::ball::{enumerate_ball, enumerate_closure, Caps, Closure};
use growthlab::growth::distortion::{distortion_profile, Subgroup};
use growthlab::growth::entropy::{entropy_report, Classification, DEFAULT_RESIDUAL_RATIO};
use growthlab::growth::fit::{fit_exponential_rate, fit_polynomial_degree};
use growthlab::growth::sandwich::quotient_sandwich_check;
use growthlab::models::spec::parse_group_spec;
use growthlab::models::{Element, GroupModel};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

#[test]
fn free2_census_matches_reduced_words() {
    let spec = fixture("free2");
    let census = enumerate_ball(&spec.model, 8, &Caps::default()).unwrap();
    let expected: Vec<u64> = (0..=8).map(free2_ball).collect();
    assert_eq!(census.cumulative, expected);
    assert!(census.submultiplicativity_violations().is_empty());
    let r = entropy_report(&census, DEFAULT_RESIDUAL_RATIO).unwrap();
    let ln3 = 3f64.ln();
    assert!(r.certified_upper >= ln3 && r.certified_upper <= ln3 + 0.09);
    assert_eq!(r.classification, Classification::ExponentialConsistent);
}

#[test]
fn heisenberg_census_matches_brute_force() {
    let spec = fixture("heisenberg");
    let census = enumerate_ball(&spec.model, 14, &Caps::default()).unwrap();
    assert_eq!(census.cumulative, heisenberg_brute_force(14));
}

#[test]
fn heis_mod3_is_finite_of_order_27() {
    let spec = fixture("heis_mod3");
    assert_eq!(enumerate_closure(&spec.model, 1000).unwrap(), Closure::Finite { order: 27 });
    let census = enumerate_ball(&spec.model, 12, &Caps::default()).unwrap();
    assert_eq!(*census.cumulative.last().unwrap(), 27);
    let spec = fixture("heisenberg");
    assert!(matches!(enumerate_closure(&spec.model, 5000).unwrap(), Closure::CapExceeded { .. }));
}

#[test]
fn caps_truncate_without_error() {
    let spec = fixture("free2");
    let census = enumerate_ball(&spec.model, 8, &Caps::with_max_elements(200)).unwrap();
    assert!(census.is_truncated());
    assert_eq!(census.complete(), &[1, 5, 17, 53, 161]);
}

/// Heisenberg as exponent vectors over (x, y, z) and as unitriangular
/// matrices x = I+E12, y = I+E23, z = I+E13.
fn heis_pc_oracle() -> MatrixOracle {
    MatrixOracle {
        dim: 3,
        gens: vec![
            ("x", IMat::unit_plus(3, &[(1, 2, 1)]), IMat::unit_plus(3, &[(1, 2, -1)])),
            ("y", IMat::unit_plus(3, &[(2, 3, 1)]), IMat::unit_plus(3, &[(2, 3, -1)])),
            ("z", IMat::unit_plus(3, &[(1, 3, 1)]), IMat::unit_plus(3, &[(1, 3, -1)])),
        ],
    }
}

const HEIS_PC: &str = r#"{"model": "polycyclic",
    "generators": [{"label": "x", "inverse_label": "X"}, {"label": "y", "inverse_label": "Y"}, {"label": "z", "inverse_label": "Z"}],
    "strata": [[0, 2], [2, 3]],
    "conjugation": {"x y": "y z", "X y": "y Z", "x z": "z", "X z": "z", "y z": "z", "Y z": "z"}}"#;

fn random_vec(rng: &mut impl Rng) -> Vec<BigInt> {
    (0..3).map(|_| BigInt::from(rng.gen_range(-20..=20))).collect()
}

#[test]
fn polycyclic_multiply_matches_matrices() {
    let spec = parse_group_spec(HEIS_PC).unwrap();
    let oracle = heis_pc_oracle();
    let labels: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let (u, v) = (random_vec(&mut rng), random_vec(&mut rng));
        let Element::Polycyclic(p) = spec.model.multiply(&Element::Polycyclic(u.clone()), &Element::Polycyclic(v.clone())).unwrap() else {
            unreachable!()
        };
        assert_eq!(
            oracle.powers(&labels, &p),
            oracle.powers(&labels, &u).mul(&oracle.powers(&labels, &v))
        );
    }
}

#[test]
fn extension_multiplication_associates() {
    for name in ["heis_by_z", "sol_fib", "modp5", "z_cross_z2"] {
        let spec = fixture(name);
        let m = &spec.model;
        for w in random_words(m.generators(), 1000, 8, 21).chunks(3) {
            let [a, b, c] = w else { continue };
            let (a, b, c) = (m.evaluate_word(a).unwrap(), m.evaluate_word(b).unwrap(), m.evaluate_word(c).unwrap());
            let left = m.multiply(&m.multiply(&a, &b).unwrap(), &c).unwrap();
            let right = m.multiply(&a, &m.multiply(&b, &c).unwrap()).unwrap();
            assert!(m.equal(&left, &right), "{name}");
            assert_eq!(m.key(&left), m.key(&right));
            assert!(m.is_identity(&m.multiply(&a, &m.inverse(&a).unwrap()).unwrap()));
        }
    }
}

#[test]
fn modp5_relation_and_linear_growth() {
    let spec = fixture("modp5");
    let m = &spec.model;
    assert_eq!(m.kind(), "mod_p_extension");
    let lhs = m.evaluate_word(&m.parse_word("g a g^-1").unwrap()).unwrap();
    let rhs = m.evaluate_word(&m.parse_word("a a").unwrap()).unwrap();
    assert!(m.equal(&lhs, &rhs));
    let census = enumerate_ball(m, 20, &Caps::default()).unwrap();
    let series: Vec<(u64, f64)> = (1..=20).map(|r| (r as u64, census.cumulative[r] as f64)).collect();
    let d = fit_polynomial_degree(&series, (10, 20)).unwrap().degree;
    assert!((0.8..=1.2).contains(&d), "{d}");
}

#[test]
fn graded_verification_of_fixtures() {
    for name in ["heis_mod3", "heis_by_z", "sol_fib", "z_cross_z2"] {
        let spec = fixture(name);
        assert!(spec.graded.passed(), "{name}: {:?}", spec.graded.violations);
    }
    assert!(fixture("free2").graded.vacuous);
}

#[test]
fn heisenberg_center_distortion_is_quadratic() {
    let spec = fixture("heisenberg");
    let m = &spec.model;
    let center = Subgroup::center(m, &[m.parse_word("x y x^-1 y^-1").unwrap()]).unwrap();
    let p = distortion_profile(m, &center, 12, &Caps::default(), 10_000_000).unwrap();
    let deltas: Vec<u64> = p.rows.iter().map(|r| r.delta).collect();
    assert!(deltas.windows(2).all(|w| w[0] <= w[1]));
    // z^(n²) has length 4n, so Δ(4n) ≥ n².
    for n in 1..=3 {
        assert!(deltas[4 * n] >= (n * n) as u64, "{deltas:?}");
    }
    assert!(!p.rows.iter().any(|r| r.truncated));
    let whole = Subgroup::whole(m);
    let p = distortion_profile(m, &whole, 6, &Caps::default(), 10_000_000).unwrap();
    assert!(p.rows.iter().all(|r| r.delta == r.radius as u64));
}

#[test]
fn sandwich_on_z_cross_z2() {
    let spec = fixture("z_cross_z2");
    let r = quotient_sandwich_check(&spec.model, 10, &Caps::default()).unwrap();
    assert_eq!(r.kernel_order, 2);
    assert_eq!(r.rows.len(), 11);
    assert!(r.holds());
}

#[test]
fn census_is_thread_independent() {
    let spec = fixture("heisenberg");
    let one = Caps { threads: Some(1), ..Caps::default() };
    let eight = Caps { threads: Some(8), ..Caps::default() };
    let a = one.install(|| enumerate_ball(&spec.model, 10, &one)).unwrap().unwrap();
    let b = eight.install(|| enumerate_ball(&spec.model, 10, &eight)).unwrap().unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
}

#[test]
fn entropy_classifies_polynomial_and_exponential() {
    let heis = enumerate_ball(&fixture("heisenberg").model, 16, &Caps::default()).unwrap();
    let r = entropy_report(&heis, DEFAULT_RESIDUAL_RATIO).unwrap();
    assert_eq!(r.classification, Classification::PolynomialConsistent);
    let series: Vec<(u64, f64)> = (1..=16).map(|r| (r as u64, heis.cumulative[r] as f64)).collect();
    let d = fit_polynomial_degree(&series, (8, 16)).unwrap().degree;
    assert!((3.0..=4.5).contains(&d));
    let free = enumerate_ball(&fixture("free2").model, 8, &Caps::default()).unwrap();
    let series: Vec<(u64, f64)> = (1..=8).map(|r| (r as u64, free.cumulative[r] as f64)).collect();
    let rate = fit_exponential_rate(&series, (4, 8)).unwrap().rate;
    assert!((rate - 3f64.ln()).abs() < 0.05, "{rate}");
}

#[test]
fn bad_specs_are_rejected_with_the_right_error() {
    use growthlab::error::Error;
    let bad_inverse = r#"{"model": "matrix",
        "generators": [{"label": "a", "inverse_label": "A"}],
        "matrices": {"a": [["1","1"],["0","1"]], "A": [["1","1"],["0","1"]]}}"#;
    assert!(matches!(parse_group_spec(bad_inverse), Err(Error::Inconsistent(_))));
    assert!(matches!(parse_group_spec("{\"model\": \"matrix\",\n  oops}"), Err(Error::Parse { line: 2, .. })));
    assert!(matches!(parse_group_spec(r#"{"model": "mod_p_extension", "generators": []}"#), Err(Error::Schema(_))));
}

fn model_strategy() -> impl Strategy<Value = (&'static str, u64)> {
    (prop::sample::select(vec!["heis_by_z", "sol_fib", "heis_mod3", "modp5", "free2"]), any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Equal elements have equal keys and a word times its inverse is trivial.
    #[test]
    fn keys_and_inverses((name, seed) in model_strategy()) {
        let spec = fixture(name);
        let m: &GroupModel = &spec.model;
        let ws = random_words(m.generators(), 2, 10, seed);
        let g = m.evaluate_word(&ws[0]).unwrap();
        let inv = growthlab::words::invert_word(&ws[0]).unwrap();
        let prod = m.multiply(&g, &m.evaluate_word(&inv).unwrap()).unwrap();
        prop_assert!(m.is_identity(&prod));
        prop_assert_eq!(m.key(&prod), m.key(&m.identity()));
        let h = m.evaluate_word(&ws[1]).unwrap();
        prop_assert_eq!(m.equal(&g, &h), m.key(&g) == m.key(&h));
    }
}

