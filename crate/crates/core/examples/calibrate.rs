//! Quick rate calibration over a few scenario cells (dev tool).

use std::time::Instant;
use survlrt::harness::{run_scenario, RunSettings, Sidedness, TestKind};
use survlrt::simgen::{HazardCase, Scenario};

fn main() {
    let reps: u32 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(400);
    let six = TestKind::standard_six();

    let cells: Vec<(&str, Scenario)> = vec![
        ("null  type_ii 120/240", Scenario::type_ii(HazardCase::Null, 240, 2.0, 12.0, 0.5)),
        ("crossing1 type_i N=240 b=15", Scenario::type_i(HazardCase::Crossing1, 240, 2.0, 15.0)),
        ("crossing2 type_i N=240 b=15", Scenario::type_i(HazardCase::Crossing2, 240, 2.0, 15.0)),
        ("proportional type_i N=240 b=15", Scenario::type_i(HazardCase::Proportional, 240, 2.0, 15.0)),
    ];
    for (name, scn) in &cells {
        let t0 = Instant::now();
        let settings = RunSettings { n_reps: reps, seed: 20260810, ..RunSettings::default() };
        let report = run_scenario(scn, &six, &settings).unwrap();
        print!("{name:32} reps={reps} [{:5.1?}]", t0.elapsed());
        for (kind, rate) in report.tests.iter().zip(&report.rejection_rates) {
            print!("  {}={:.3}", kind.label(), rate);
        }
        println!("  cens=({:.3},{:.3}) regen={}", report.mean_censor_g0, report.mean_censor_g1, report.regenerated);
    }

    // One-sided ordering scenario (alpha=2, beta=9, fixed window, N=120, level 0.025).
    let t0 = Instant::now();
    let scn = Scenario::type_i(HazardCase::Crossing2, 120, 2.0, 9.0);
    let settings = RunSettings {
        n_reps: reps,
        alpha: 0.025,
        sidedness: Sidedness::OneSidedUpper,
        seed: 20260810,
        ..RunSettings::default()
    };
    let tests =
        [TestKind::Logrank, TestKind::MaxCombo, TestKind::PhiStar(vec![0.5])];
    let report = run_scenario(&scn, &tests, &settings).unwrap();
    print!("one-sided crossing2 b=9 N=120    reps={reps} [{:5.1?}]", t0.elapsed());
    for (kind, rate) in report.tests.iter().zip(&report.rejection_rates) {
        print!("  {}={:.3}", kind.label(), rate);
    }
    println!("  cens=({:.3},{:.3})", report.mean_censor_g0, report.mean_censor_g1);
}
