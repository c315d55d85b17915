//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::time::Instant;

use symext::hierarchy::{
    build_21, build_kl, robustness, run_built, ExtensionTest, Level, Outcome, TestSettings, TestVerdict,
};
use symext::linalg::CMatrix;
use symext::sdp::{check_dual_certificate, min_t_augment, solve, CoefMatrix, SdpBlock, SdpProblem, SolveStatus};
use symext::state::DensityMatrix;
use symext::witness::{extract_witness, paper_witness_regression, SEESAW_SEED};
use symext::zoo::{self, LabeledState};

const SEESAW_TRIALS: usize = 10_000;

struct Detected {
    label: String,
    test: ExtensionTest,
    verdict: TestVerdict,
}

#[derive(Default)]
struct Gate {
    results: Vec<(usize, bool, String)>,
    detected: Vec<Detected>,
}

impl Gate {
    fn report(&mut self, n: usize, pass: bool, detail: String) {
        println!("criterion {n:>2}: {} | {detail}", if pass { "PASS" } else { "FAIL" });
        self.results.push((n, pass, detail));
    }

    /// Runs a test and keeps entangled verdicts for the certificate audit.
    fn run(&mut self, label: &str, rho: &DensityMatrix, level: Level) -> TestVerdict {
        let test = ExtensionTest::build(rho, level, None).expect("level within limits");
        let verdict = run_built(&test, &TestSettings::default());
        if verdict.is_entangled() {
            self.detected.push(Detected { label: format!("{label} @ {level}"), test, verdict: verdict.clone() });
        }
        verdict
    }
}

fn criterion_1(g: &mut Gate) {
    let mut mismatches = Vec::new();
    for i in 0..=500 {
        let alpha = i as f64 / 100.0;
        let rho = zoo::rho_alpha(alpha).unwrap().rho;
        let npt = !symext::hierarchy::ppt_test(&rho).unwrap().is_ppt;
        let expect = alpha < 1.0 - 1e-3 || alpha > 4.0 + 1e-3;
        if npt != expect {
            mismatches.push(alpha);
        }
    }
    g.report(1, mismatches.is_empty(), format!("501 grid points, mismatches {mismatches:?}"));
}

fn criterion_2(g: &mut Gate) {
    let mut ok = true;
    let mut notes = Vec::new();
    let mut slowest: f64 = 0.0;
    for (alpha, want) in [
        (1.0, Outcome::Entangled),
        (1.5, Outcome::Entangled),
        (1.9, Outcome::Entangled),
        (3.1, Outcome::Entangled),
        (3.5, Outcome::Entangled),
        (4.0, Outcome::Entangled),
        (2.0, Outcome::ExtensionFound),
        (2.5, Outcome::ExtensionFound),
        (3.0, Outcome::ExtensionFound),
    ] {
        let start = Instant::now();
        let v = g.run(&format!("rho_alpha({alpha})"), &zoo::rho_alpha(alpha).unwrap().rho, Level::new(2, 1));
        slowest = slowest.max(start.elapsed().as_secs_f64());
        let near_boundary = (alpha - 2.0_f64).abs() <= 1e-2 || (alpha - 3.0_f64).abs() <= 1e-2;
        let good = v.outcome == want || (v.outcome == Outcome::Inconclusive && near_boundary);
        ok &= good;
        notes.push(format!("{alpha}:{:?}(t*={:.2e})", v.outcome, v.t_star));
    }
    ok &= slowest < 300.0;
    g.report(2, ok, format!("{} | slowest {slowest:.2}s", notes.join(" ")));
}

fn criterion_3(g: &mut Gate) {
    let rep = paper_witness_regression(1000, 0xC3).unwrap();
    let trace_ok = rep.alpha_grid.len() == 51 && rep.trace_formula_residual < 1e-12;
    let sos_ok = rep.sos_residual_as_displayed < 1e-10;
    g.report(
        3,
        trace_ok && sos_ok,
        format!(
            "trace formula residual {:.1e} over {} points; displayed SOS identity residual {:.3e} (same terms against 4<xy|W|xy><x|x>: {:.1e}); product min {:.1e}",
            rep.trace_formula_residual,
            rep.alpha_grid.len(),
            rep.sos_residual_as_displayed,
            rep.sos_residual_factor_four,
            rep.product_min
        ),
    );
}

fn criterion_4(g: &mut Gate) {
    let mut ok = true;
    let mut notes = Vec::new();
    for ((da, db), m, n) in [((2, 2), 24, 8), ((2, 4), 96, 16), ((3, 3), 324, 27)] {
        let t = build_21(&DensityMatrix::maximally_mixed(da, db)).unwrap();
        let dims = t.problem().block_dims();
        ok &= t.m() == m && dims == vec![n; 3];
        notes.push(format!("swap {da}x{db}: m={} blocks={dims:?}", t.m()));
    }
    for (k, l, m, nb) in [(2, 1, 20, 3), (2, 2, 65, 5)] {
        let t = build_kl(&DensityMatrix::maximally_mixed(2, 2), k, l).unwrap();
        ok &= t.m() == m && t.block_map().len() == nb;
        notes.push(format!("sym ({k},{l}) 2x2: m={} blocks={}", t.m(), t.block_map().len()));
    }
    g.report(4, ok, notes.join("; "));
}

fn criterion_6(g: &mut Gate) {
    let mut failures = Vec::new();
    let mut count = 0;
    for (da, db) in [(2, 2), (3, 3)] {
        for seed in 0..100u64 {
            let terms = 1 + (seed as usize) % (da * db + 2);
            let s = zoo::random_separable(da, db, terms, 1000 + seed).unwrap();
            for level in [Level::new(1, 1), Level::new(2, 1)] {
                let v = g.run(&s.label(), &s.rho, level);
                count += 1;
                if v.outcome != Outcome::ExtensionFound {
                    failures.push(format!("{} @ {level}: {:?} t*={:.2e}", s.label(), v.outcome, v.t_star));
                }
            }
        }
    }
    g.report(6, failures.is_empty(), format!("{count} runs over 200 states; not extension-found: {failures:?}"));
}

fn zoo_states() -> Vec<LabeledState> {
    let mut out = vec![zoo::bell().unwrap(), zoo::maximally_mixed(2, 2).unwrap(), zoo::tiles_upb_state().unwrap()];
    for p in [0.2, 0.5, 0.7, 0.9] {
        out.push(zoo::isotropic(2, p).unwrap());
    }
    for alpha in [0.5, 1.5, 2.5, 3.5, 4.5] {
        out.push(zoo::rho_alpha(alpha).unwrap());
    }
    for a in [0.0, 0.3, 1.0] {
        out.push(zoo::horodecki_3x3(a).unwrap());
    }
    for b in [0.2, 0.8] {
        out.push(zoo::horodecki_2x4(b).unwrap());
    }
    out
}

fn criterion_7(g: &mut Gate) {
    let mut states = zoo_states();
    states.extend((0..50).map(|s| zoo::random_state(2, 2, 500 + s).unwrap()));
    let mut violations = Vec::new();
    let mut inconclusive = 0;
    for s in &states {
        let label = s.label();
        let v11 = g.run(&label, &s.rho, Level::new(1, 1));
        let v21 = g.run(&label, &s.rho, Level::new(2, 1));
        let v31 = g.run(&label, &s.rho, Level::new(3, 1));
        inconclusive += [&v11, &v21, &v31].iter().filter(|v| v.outcome == Outcome::Inconclusive).count();
        if v31.outcome == Outcome::ExtensionFound && v21.outcome != Outcome::ExtensionFound {
            violations.push(format!("{label}: (3,1) extension but (2,1) {:?}", v21.outcome));
        }
        if v11.is_entangled() && !v21.is_entangled() {
            violations.push(format!("{label}: (1,1) entangled but (2,1) {:?}", v21.outcome));
        }
    }
    g.report(
        7,
        violations.is_empty(),
        format!("{} states at (1,1),(2,1),(3,1); {inconclusive} inconclusive runs; violations {violations:?}", states.len()),
    );
}

fn criterion_8(g: &mut Gate) {
    let s = zoo::tiles_upb_state().unwrap();
    let ppt = symext::hierarchy::ppt_test(&s.rho).unwrap();
    let test = ExtensionTest::build(&s.rho, Level::new(2, 1), None).unwrap();
    let start = Instant::now();
    let v = run_built(&test, &TestSettings::default());
    let seconds = start.elapsed().as_secs_f64();
    let witness = extract_witness(&v, &test, SEESAW_TRIALS, SEESAW_SEED);
    let (wit_ok, wit_note) = match &witness {
        Ok(w) => {
            let file = symext::io::WitnessFile::new("zoo:tiles_upb", Level::new(2, 1), v.mode, 3, 3, w, None);
            let back = symext::io::WitnessFile::from_json(&file.to_json()).unwrap();
            (w.verified() && back.operator().unwrap() == w.w, format!("Tr[rho w]={:.3e}, product min {:.3e}", w.value_on_state, w.min_product_value_estimate))
        }
        Err(e) => (false, e.to_string()),
    };
    g.report(
        8,
        ppt.is_ppt && v.is_entangled() && wit_ok && seconds < 300.0,
        format!("PPT={} (min eig {:.1e}); (2,1) {:?} t*={:.3e} in {seconds:.2}s; witness {wit_note}", ppt.is_ppt, ppt.min_eigenvalue, v.outcome, v.t_star),
    );
}

fn criterion_9(g: &mut Gate) {
    let settings = TestSettings::default();
    let bell = robustness(&zoo::bell().unwrap().rho, Level::new(1, 1), &settings).unwrap();
    let mut ok = (bell.p_star - 2.0 / 3.0).abs() <= 1e-3;
    let mut notes = vec![format!("bell p*={:.5}", bell.p_star)];
    for s in [zoo::maximally_mixed(2, 2).unwrap(), zoo::random_separable(2, 2, 3, 9).unwrap(), zoo::rho_alpha(2.5).unwrap()] {
        for level in [Level::new(1, 1), Level::new(2, 1)] {
            let r = robustness(&s.rho, level, &settings).unwrap();
            ok &= r.p_star == 0.0;
            notes.push(format!("{} @ {level} p*={}", s.label(), r.p_star));
        }
    }
    g.report(9, ok, notes.join("; "));
}

fn criterion_10(g: &mut Gate) {
    let diag = |v: &[f64]| CMatrix::from_real_diagonal(v);
    let mut off = CMatrix::zeros(2, 2);
    off[(0, 1)] = symext::linalg::r(1.0);
    off[(1, 0)] = symext::linalg::r(1.0);
    let problems = [
        ("t*I + diag(1,2)", SdpProblem::new(vec![1.0], vec![SdpBlock::new(diag(&[1.0, 2.0]), vec![CoefMatrix::identity(2)])]).unwrap(), -1.0),
        ("[[1,x],[x,1]]", SdpProblem::new(vec![1.0], vec![SdpBlock::new(CMatrix::identity(2), vec![CoefMatrix::from_dense(off)])]).unwrap(), -1.0),
        ("t*I + diag(-3,5)", SdpProblem::new(vec![1.0], vec![SdpBlock::new(diag(&[-3.0, 5.0]), vec![CoefMatrix::identity(2)])]).unwrap(), 3.0),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, p, exact) in &problems {
        let sol = solve(p);
        let err = (sol.objective - exact).abs();
        let weak = sol.iterations.iter().filter_map(|r| r.weak_duality).fold(f64::INFINITY, f64::min);
        ok &= sol.status == SolveStatus::Optimal && err <= 1e-8 && weak >= -1e-7;
        notes.push(format!("{name}: obj={:.10} err={err:.1e} min weak duality={weak:.1e}", sol.objective));
    }
    // The third problem's dual is supported on the first coordinate.
    let sol = solve(&problems[2].1);
    let z = &sol.z_blocks[0];
    ok &= (z[(0, 0)].re - 1.0).abs() < 1e-8 && z[(1, 1)].re.abs() < 1e-8;
    let aug = min_t_augment(&SdpProblem::new(vec![], vec![SdpBlock::new(diag(&[1.0, 1.0]), vec![])]).unwrap()).unwrap();
    ok &= (solve(&aug).objective + 1.0).abs() <= 1e-8;
    g.report(10, ok, notes.join("; "));
}

fn criterion_5(g: &mut Gate) {
    let mut failures = Vec::new();
    let mut worst_product: f64 = f64::INFINITY;
    for d in &g.detected {
        let z = d.verdict.certificate.as_ref().expect("entangled verdicts carry a certificate");
        let report = check_dual_certificate(d.test.problem(), z).unwrap();
        let witness = extract_witness(&d.verdict, &d.test, SEESAW_TRIALS, SEESAW_SEED);
        match witness {
            Ok(w) => {
                worst_product = worst_product.min(w.min_product_value_estimate);
                if !report.passed() || w.value_on_state >= 0.0 || w.min_product_value_estimate < -1e-7 {
                    failures.push(format!(
                        "{}: cert {} Tr[rho w]={:.2e} product min {:.2e}",
                        d.label,
                        report.passed(),
                        w.value_on_state,
                        w.min_product_value_estimate
                    ));
                }
            }
            Err(e) => failures.push(format!("{}: {e}", d.label)),
        }
    }
    g.report(
        5,
        failures.is_empty() && !g.detected.is_empty(),
        format!("{} entangled verdicts audited; lowest product value {worst_product:.2e}; failures {failures:?}", g.detected.len()),
    );
}

fn main() {
    let start = Instant::now();
    let mut g = Gate::default();
    criterion_1(&mut g);
    criterion_2(&mut g);
    criterion_3(&mut g);
    criterion_4(&mut g);
    criterion_6(&mut g);
    criterion_7(&mut g);
    criterion_8(&mut g);
    criterion_9(&mut g);
    criterion_10(&mut g);
    // Criterion 5 audits every entangled verdict produced above.
    criterion_5(&mut g);
    g.results.sort_by_key(|r| r.0);
    let failed: Vec<usize> = g.results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s; failed {failed:?}",
        g.results.len() - failed.len(),
        g.results.len(),
        start.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
