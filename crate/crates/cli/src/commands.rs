//! Subcommand implementations.

use crate::{input, CliError};
use std::io::Write;
use std::path::Path;
use survlrt::harness::{
    self, ranking_scores, read_power_csv, run_grid, sensitivity_sweep, RunSettings, Sidedness,
    TestKind,
};
use survlrt::numerics::{normal_cdf, RngStream};
use survlrt::omnibus;
use survlrt::simgen::Scenario;
use survlrt::surv::build_event_table;
use survlrt::weights::WeightSpec;
use survlrt::wlrt::wlrt_statistic;

/// The seven tests reported for real-data runs.
fn all_tests() -> Vec<TestKind> {
    vec![
        TestKind::Logrank,
        TestKind::Renyi,
        TestKind::MaxCombo,
        TestKind::ProjectionCrossing,
        TestKind::PhiStar(vec![0.25]),
        TestKind::PhiStar(vec![0.5]),
        TestKind::PhiStar(vec![0.75]),
    ]
}

fn parse_sidedness(one_sided: Option<&str>) -> Result<Sidedness, CliError> {
    match one_sided {
        None => Ok(Sidedness::TwoSided),
        Some("upper") => Ok(Sidedness::OneSidedUpper),
        Some("lower") => Ok(Sidedness::OneSidedLower),
        Some(other) => Err(CliError::bad_input(format!(
            "--one-sided must be 'upper' or 'lower', got '{other}'"
        ))),
    }
}

fn open_output(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout()),
    })
}

pub fn cmd_test(
    input: &Path,
    weights: &str,
    alpha: f64,
    one_sided: Option<&str>,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let sidedness = parse_sidedness(one_sided)?;
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(CliError::bad_input(format!("--alpha must lie in (0, 0.5), got {alpha}")));
    }
    let subjects = input::read_subjects_csv(input)?;
    let table = build_event_table(&subjects)?;

    let kinds: Vec<TestKind> = if weights == "all" {
        all_tests()
    } else {
        vec![weights.parse::<TestKind>()?]
    };

    let mut rows: Vec<(String, String, f64, f64)> = Vec::new();
    for (i, kind) in kinds.iter().enumerate() {
        if sidedness != Sidedness::TwoSided && !kind.supports_one_sided() {
            eprintln!("warning: skipping '{}' (two-sided only)", kind.label());
            continue;
        }
        let stream = RngStream::new(seed, i as u64);
        let (stat_name, stat, p) = match kind {
            TestKind::Logrank | TestKind::Fh11 => {
                let spec = match kind {
                    TestKind::Logrank => WeightSpec::Constant,
                    _ => WeightSpec::RhoGamma { rho: 1.0, gamma: 1.0 },
                };
                let r = wlrt_statistic(&table, &spec)?;
                let p = match sidedness {
                    Sidedness::TwoSided => 2.0 * (1.0 - normal_cdf(r.z.abs())),
                    Sidedness::OneSidedUpper => 1.0 - normal_cdf(r.z),
                    Sidedness::OneSidedLower => normal_cdf(r.z),
                };
                ("z".to_string(), r.z, p)
            }
            TestKind::MaxCombo | TestKind::PhiStar(_) => {
                let set = survlrt::weights::builtin_set(&kind.label())?;
                let combo = omnibus::max_combo_test(&table, &set, alpha, stream)?;
                let p = match sidedness {
                    Sidedness::TwoSided => combo.p_two_sided,
                    Sidedness::OneSidedUpper => combo.p_one_sided_upper,
                    Sidedness::OneSidedLower => combo.p_one_sided_lower,
                };
                println!(
                    "# {}: t_max={:.6} signed_t={:.6} c_alpha({})={:.4}",
                    kind.label(),
                    combo.t_max,
                    combo.signed_t,
                    alpha,
                    combo.c_alpha
                );
                ("t_max".to_string(), combo.t_max, p)
            }
            TestKind::ProjectionCrossing => {
                let set = survlrt::weights::builtin_set("projection-crossing")?;
                let proj = omnibus::projection_test(&table, &set)?;
                println!("# proj: s_n={:.6} rank={}", proj.s_n, proj.rank);
                ("s_n".to_string(), proj.s_n, proj.p_value)
            }
            TestKind::Renyi => {
                let renyi = omnibus::renyi_test(&table, &WeightSpec::Constant)?;
                ("q".to_string(), renyi.q, renyi.p_value)
            }
        };
        rows.push((kind.label(), stat_name, stat, p));
    }

    println!("{:<22} {:>10} {:>12} {:>10}", "test", "stat", "value", "p_value");
    for (name, stat_name, stat, p) in &rows {
        println!("{name:<22} {stat_name:>10} {stat:>12.6} {p:>10.6}");
    }
    if let Some(path) = out {
        let mut w = std::fs::File::create(path)?;
        writeln!(w, "test,statistic,p_value")?;
        for (name, _, stat, p) in &rows {
            writeln!(w, "{name},{stat:.6},{p:.6}")?;
        }
    }
    Ok(())
}

fn parse_tests(arg: Option<&str>) -> Result<Vec<TestKind>, CliError> {
    match arg {
        None => Ok(TestKind::standard_six()),
        Some(list) => {
            // phi-star(...) may contain commas, so split on commas outside
            // parentheses.
            let mut tests = Vec::new();
            let mut depth = 0usize;
            let mut start = 0usize;
            let bytes = list.as_bytes();
            for (i, &b) in bytes.iter().enumerate() {
                match b {
                    b'(' => depth += 1,
                    b')' => depth = depth.saturating_sub(1),
                    b',' if depth == 0 => {
                        tests.push(list[start..i].parse::<TestKind>()?);
                        start = i + 1;
                    }
                    _ => {}
                }
            }
            if start < list.len() {
                tests.push(list[start..].parse::<TestKind>()?);
            }
            if tests.is_empty() {
                return Err(CliError::bad_input("empty test list"));
            }
            Ok(tests)
        }
    }
}

pub fn cmd_simulate(
    scenario_path: &Path,
    tests: Option<&str>,
    reps: u32,
    alpha: Option<f64>,
    one_sided: Option<&str>,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(scenario_path)
        .map_err(|e| CliError::bad_input(format!("{}: {e}", scenario_path.display())))?;
    let scenario: Scenario = toml::from_str(&text)
        .map_err(|e| CliError::bad_input(format!("{}: {e}", scenario_path.display())))?;
    scenario.validate()?;
    let sidedness = parse_sidedness(one_sided)?;
    let tests = parse_tests(tests)?;
    let settings = RunSettings {
        n_reps: reps,
        alpha: alpha.unwrap_or(match sidedness {
            Sidedness::TwoSided => 0.05,
            _ => 0.025,
        }),
        sidedness,
        seed,
        ..RunSettings::default()
    };
    let report = harness::run_scenario(&scenario, &tests, &settings)?;
    let mut w = open_output(out)?;
    harness::write_reports_csv(&mut w, std::slice::from_ref(&report))?;
    Ok(())
}

pub fn cmd_reproduce(
    table: u32,
    reps: u32,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let settings = RunSettings { n_reps: reps, seed, ..RunSettings::default() };
    let six = TestKind::standard_six();
    let mut w = open_output(out)?;
    match table {
        1 => {
            let reports = run_grid(&harness::null_type_i_grid(), &six, &settings)?;
            harness::write_reports_csv(&mut w, &reports)?;
        }
        2 => {
            let reports = run_grid(&harness::null_type_ii_grid(), &six, &settings)?;
            harness::write_reports_csv(&mut w, &reports)?;
        }
        3 => {
            let reports = run_grid(&harness::power_type_i_grid(), &six, &settings)?;
            harness::write_reports_csv(&mut w, &reports)?;
        }
        4 => {
            let reports = run_grid(&harness::power_type_ii_grid(), &six, &settings)?;
            harness::write_reports_csv(&mut w, &reports)?;
        }
        5 | 6 => {
            let grid = if table == 5 {
                harness::power_type_i_grid()
            } else {
                harness::power_type_ii_grid()
            };
            let reports = run_grid(&grid, &six, &settings)?;
            let matrix = harness::power_matrix_from_reports(&reports)?;
            let ranks = ranking_scores(&matrix)?;
            harness::write_ranks_csv(&mut w, &ranks)?;
        }
        7 => {
            let sweep = sensitivity_sweep(
                &harness::sensitivity_scenarios(),
                &harness::default_theta_grid(),
                &settings,
            )?;
            harness::write_sweep_csv(&mut w, &sweep)?;
        }
        9 => {
            let reports = harness::crossing_only_extension(reps, seed)?;
            harness::write_reports_csv(&mut w, &reports)?;
        }
        other => {
            return Err(CliError::bad_input(format!(
                "unknown table id {other} (expected 1-7 or 9)"
            )))
        }
    }
    Ok(())
}

pub fn cmd_rank(input: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let file = std::fs::File::open(input)
        .map_err(|e| CliError::bad_input(format!("{}: {e}", input.display())))?;
    let matrix = read_power_csv(std::io::BufReader::new(file))?;
    let ranks = ranking_scores(&matrix)?;
    let mut w = open_output(out)?;
    harness::write_ranks_csv(&mut w, &ranks)?;
    Ok(())
}
