use jsrkit_core::matset::random_set;
use jsrkit_core::MatrixSet64;

/// Pinned output of the seeded generator; any change to the draw order or
/// the PRNG breaks reproducibility of published instances.
#[test]
fn seeded_random_set_is_stable() {
    let set: MatrixSet64 = random_set(3, 2, 0.5, (0.1, 2.0), 7).unwrap();
    let expected = r#"{"dim":3,"matrices":[[[0.4191797892669925,0.0,0.0],[1.7136507294572985,1.980947681455232,0.8301225991220393],[0.0,1.1004216988510993,0.24396118711751527]],[[0.5129807531890852,1.6575153306562278,0.24428233604796684],[1.0156190601717476,0.0,1.956500117032084],[0.0,0.0,1.0806777350426482]]]}"#;
    assert_eq!(set.to_json(), expected);
}

#[test]
fn seeds_differ() {
    let a: MatrixSet64 = random_set(3, 2, 0.5, (0.1, 2.0), 7).unwrap();
    let b: MatrixSet64 = random_set(3, 2, 0.5, (0.1, 2.0), 8).unwrap();
    assert_ne!(a, b);
}

#[test]
fn readme_example_compiles_and_brackets_phi() {
    use jsrkit_core::best_bracket;
    let set = MatrixSet64::from_nested(vec![
        vec![vec![1.0, 1.0], vec![0.0, 1.0]],
        vec![vec![1.0, 0.0], vec![1.0, 1.0]],
    ])
    .unwrap();
    let report = best_bracket(&set, 16, 100_000, true).unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    assert!(report.contains(phi));
}
