mod common;

use proptest::prelude::*;
use rectiscope::io::{read_csv, write_csv};
use rectiscope::{beta2, generate, GeneratorKind, GeneratorSpec, WeightScheme};

fn csv_bytes(spec: &GeneratorSpec) -> Vec<u8> {
    let mut out = Vec::new();
    write_csv(&generate(spec).unwrap(), &mut out).unwrap();
    out
}

#[test]
fn generation_is_deterministic() {
    let kinds = [
        GeneratorKind::Plane,
        GeneratorKind::LipschitzGraph,
        GeneratorKind::HolderGraph,
        GeneratorKind::Circle,
        GeneratorKind::Cantor4,
        GeneratorKind::PerturbedPlane,
    ];
    for kind in kinds {
        let spec = GeneratorSpec {
            seed: 5,
            count: 300,
            ..GeneratorSpec::new(kind)
        };
        assert_eq!(csv_bytes(&spec), csv_bytes(&spec), "{kind:?}");
    }
    let a = GeneratorSpec::plane(2, 3, 400, 1);
    let b = GeneratorSpec { seed: 2, ..a.clone() };
    assert_ne!(csv_bytes(&a), csv_bytes(&b));
}

#[test]
fn csv_round_trip_preserves_measure() {
    let mu = generate(&GeneratorSpec::holder_graph(0.3, 128)).unwrap();
    let mut out = Vec::new();
    write_csv(&mu, &mut out).unwrap();
    let back = read_csv(out.as_slice(), 1).unwrap();
    assert_eq!(back.content_hash(), mu.content_hash());
}

#[test]
fn holder_graph_flatness_decays_like_r_alpha() {
    for alpha in [0.3, 0.5, 0.7] {
        let mu = generate(&GeneratorSpec::holder_graph(alpha, 4096)).unwrap();
        for c in [512, 2048, 3000] {
            let x = mu.point(c).to_vec();
            for j in 2..=10 {
                let r = 0.5f64.powi(j);
                let ratio = beta2(&mu, &x, r).unwrap().value / r.powf(alpha);
                assert!(ratio <= 2.0, "alpha {alpha} center {c} r {r}: {ratio}");
            }
        }
    }
}

#[test]
fn cantor_set_is_never_flat() {
    let level = 5;
    let mu = generate(&GeneratorSpec::cantor4(level)).unwrap();
    for c in (0..mu.len()).step_by(37) {
        let x = mu.point(c).to_vec();
        for j in 0..=level - 2 {
            let r = 0.25f64.powi(j as i32);
            let b = beta2(&mu, &x, r).unwrap().value;
            assert!(b >= 0.05, "center {c} r {r}: {b}");
        }
    }
}

#[test]
fn circle_has_total_mass_two_pi() {
    let mu = generate(&GeneratorSpec::circle(1000)).unwrap();
    assert!((mu.total_mass() - std::f64::consts::TAU).abs() < 1e-12);
}

#[test]
fn area_weights_exceed_uniform_weights() {
    let base = GeneratorSpec::holder_graph(0.5, 256);
    let area = GeneratorSpec {
        weights: WeightScheme::Area,
        ..base.clone()
    };
    let (u, a) = (generate(&base).unwrap(), generate(&area).unwrap());
    assert!(u.weights().iter().zip(a.weights()).all(|(x, y)| y >= x));
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(generate(&GeneratorSpec::plane(3, 2, 100, 0)).is_err());
    assert!(generate(&GeneratorSpec::holder_graph(1.5, 100)).is_err());
    assert!(generate(&GeneratorSpec::circle(0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn planes_are_flat_for_any_seed(seed in any::<u64>(), n in 1usize..3) {
        let mu = generate(&GeneratorSpec::plane(n, 3, 400, seed)).unwrap();
        let x = mu.point(mu.len() / 2).to_vec();
        for r in [0.5, 0.2, 0.1] {
            prop_assert_eq!(beta2(&mu, &x, r).unwrap().value, 0.0);
        }
    }
}
