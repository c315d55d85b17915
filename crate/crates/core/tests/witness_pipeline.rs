use symext::hierarchy::{run_built, ExtensionTest, Level, Outcome, TestSettings};
use symext::io::WitnessFile;
use symext::witness::{extract_witness, verify_sos, SEESAW_SEED};
use symext::zoo;

#[test]
fn rho_alpha_witnesses_on_both_sides_of_the_separable_window() {
    for alpha in [1.5, 3.5, 4.5] {
        let rho = zoo::rho_alpha(alpha).unwrap().rho;
        let test = ExtensionTest::build(&rho, Level::new(2, 1), None).unwrap();
        let verdict = run_built(&test, &TestSettings::default());
        assert_eq!(verdict.outcome, Outcome::Entangled, "alpha {alpha}");
        let w = extract_witness(&verdict, &test, 50, SEESAW_SEED).unwrap();
        assert!(w.value_on_state < 0.0);
        assert!(w.verified(), "alpha {alpha}: product minimum {}", w.min_product_value_estimate);

        let separable = zoo::rho_alpha(2.5).unwrap().rho;
        assert!(separable.matrix().trace_product_re(&w.w) >= -1e-7);

        let sos = verify_sos(&test, verdict.certificate.as_ref().unwrap(), 200, 1).unwrap();
        assert!(sos.passed(), "{sos:?}");

        let file = WitnessFile::new("rho_alpha", test.level(), test.mode(), 3, 3, &w, Some(sos));
        let back = WitnessFile::from_json(&file.to_json()).unwrap();
        assert_eq!(back.operator().unwrap(), file.operator().unwrap());
    }
}

#[test]
fn no_witness_without_detection() {
    let rho = zoo::rho_alpha(2.5).unwrap().rho;
    let test = ExtensionTest::build(&rho, Level::new(2, 1), None).unwrap();
    let verdict = run_built(&test, &TestSettings::default());
    assert_eq!(verdict.outcome, Outcome::ExtensionFound);
    assert!(extract_witness(&verdict, &test, 5, 0).is_err());
}
