use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use symext::hierarchy::{ppt_test, run_test, Level, Outcome};
use symext::state::DensityMatrix;
use symext::zoo;

fn noisy_random(d_a: usize, d_b: usize, seed: u64) -> DensityMatrix {
    let p = (seed % 10) as f64 / 10.0;
    zoo::random_state(d_a, d_b, seed).unwrap().rho.mix_with_identity(p)
}

#[test]
fn first_level_matches_partial_transpose() {
    let mut states: Vec<DensityMatrix> = ["bell", "tiles_upb", "rho_alpha?alpha=0.5", "rho_alpha?alpha=4.5", "isotropic?d=3&p=0.6"]
        .iter()
        .map(|u| zoo::from_uri(&format!("zoo:{u}")).unwrap().rho)
        .collect();
    states.extend((0..20).map(|s| noisy_random(2, 2, s)));
    states.extend((0..5).map(|s| noisy_random(2, 3, 40 + s)));
    for rho in &states {
        let ppt = ppt_test(rho).unwrap();
        let v = run_test(rho, Level::new(1, 1)).unwrap();
        assert_ne!(v.outcome, Outcome::Inconclusive, "{}", v.diagnostic);
        assert_eq!(v.outcome == Outcome::Entangled, !ppt.is_ppt, "min PT eigenvalue {}", ppt.min_eigenvalue);
    }
}

#[test]
fn detection_is_monotone_in_the_level() {
    let levels = [Level::new(1, 1), Level::new(2, 1), Level::new(3, 1)];
    for seed in 0..100 {
        let rho = noisy_random(2, 2, 1000 + seed);
        let mut detected = false;
        for level in levels {
            let v = run_test(&rho, level).unwrap();
            if v.outcome == Outcome::Inconclusive {
                continue;
            }
            let now = v.outcome == Outcome::Entangled;
            assert!(now || !detected, "seed {seed}: detected below {level} but not at it");
            detected |= now;
        }
    }
}

#[test]
fn verdicts_are_local_unitary_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for uri in ["rho_alpha?alpha=3.5", "rho_alpha?alpha=2.5", "rho_alpha?alpha=1.5", "isotropic?d=3&p=0.5", "bell", "random_state?da=2&db=2&seed=5"] {
        let rho = zoo::from_uri(&format!("zoo:{uri}")).unwrap().rho;
        let ua = zoo::random_unitary(rho.dim_a(), &mut rng);
        let ub = zoo::random_unitary(rho.dim_b(), &mut rng);
        let rotated = rho.local_unitary(&ua, &ub).unwrap();
        let level = Level::new(2, 1);
        let (v, w) = (run_test(&rho, level).unwrap(), run_test(&rotated, level).unwrap());
        assert_eq!(v.outcome, w.outcome, "{uri}");
        assert!((v.t_star - w.t_star).abs() < 1e-6, "{uri}: {} vs {}", v.t_star, w.t_star);
    }
}

#[test]
fn swapping_parties_preserves_the_first_level() {
    for seed in 0..10 {
        let rho = noisy_random(2, 3, 200 + seed);
        let v = run_test(&rho, Level::new(1, 1)).unwrap();
        let w = run_test(&rho.swap_parties(), Level::new(1, 1)).unwrap();
        assert_eq!(v.outcome, w.outcome);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn entangled_verdicts_carry_a_valid_certificate(seed in 0u64..10_000, p in 0.0f64..0.9) {
        let rho = zoo::random_state(2, 2, seed).unwrap().rho.mix_with_identity(p);
        for level in [Level::new(1, 1), Level::new(2, 1)] {
            let v = run_test(&rho, level).unwrap();
            match v.outcome {
                Outcome::Entangled => {
                    let report = v.certificate_report.as_ref().unwrap();
                    prop_assert!(report.passed());
                    prop_assert!(v.t_star > 0.0);
                }
                Outcome::ExtensionFound => prop_assert!(v.certificate.is_none()),
                Outcome::Inconclusive => {}
            }
        }
    }

    #[test]
    fn separable_mixtures_are_never_declared_entangled(seed in 0u64..10_000, terms in 1usize..6) {
        let rho = zoo::random_separable(2, 2, terms, seed).unwrap().rho;
        let v = run_test(&rho, Level::new(2, 1)).unwrap();
        prop_assert_ne!(v.outcome, Outcome::Entangled);
    }
}
