//! Monte Carlo replication engine: rejection rates per scenario and test,
//! ranking scores across scenario grids, crossing-point sensitivity sweeps and
//! the crossing-only extension grid.
//!
//! Replications are independent work items; every random stream is derived
//! from (seed, replication index, attempt, purpose), so reports are
//! byte-identical no matter how many workers run them.

use crate::error::{Error, Result};
use crate::numerics::mvn::MvnOpts;
use crate::numerics::{normal_cdf, RngStream};
use crate::omnibus::{combo_pvalues, projection_from_cov, renyi_test};
use crate::simgen::{generate_trial_with, Group1Sampler, HazardCase, Scenario};
use crate::surv::{build_event_table, EventTable};
use crate::weights::{phi_star_name, phi_star_specs, WeightSet, WeightSpec};
use crate::wlrt::{cov_matrix, wlrt_statistic};
use rayon::prelude::*;
use std::io::{BufRead, Write};

const PURPOSE_DATA: u64 = 0;
const PURPOSE_MVN: u64 = 1;
const PURPOSE_SWEEP_BASE: u64 = 8;
const MAX_ATTEMPTS: u64 = 200;

fn stream_id(rep: u32, attempt: u64, purpose: u64) -> u64 {
    (u64::from(rep) << 20) | ((attempt & 0xFFF) << 8) | (purpose & 0xFF)
}

/// One of the comparison tests run inside the harness.
#[derive(Debug, Clone, PartialEq)]
pub enum TestKind {
    /// Plain logrank (constant weight).
    Logrank,
    /// Fleming-Harrington G^{1,1}.
    Fh11,
    /// Maximum over {1, u, 1−u, u(1−u)}.
    MaxCombo,
    /// Crossing-aware maximum test; one θ gives {1,u,1−u,crossing(θ)},
    /// several θs give {1, crossing(θ₁), ...}.
    PhiStar(Vec<f64>),
    /// Projection test over {1, u, 2u−1}.
    ProjectionCrossing,
    /// Renyi supremum test with constant weight.
    Renyi,
}

impl TestKind {
    pub fn label(&self) -> String {
        match self {
            TestKind::Logrank => "logrank".into(),
            TestKind::Fh11 => "fh11".into(),
            TestKind::MaxCombo => "maxcombo".into(),
            TestKind::PhiStar(thetas) => phi_star_name(thetas),
            TestKind::ProjectionCrossing => "proj".into(),
            TestKind::Renyi => "renyi".into(),
        }
    }

    /// The six tests compared throughout the study grids.
    pub fn standard_six() -> Vec<TestKind> {
        vec![
            TestKind::Logrank,
            TestKind::Fh11,
            TestKind::MaxCombo,
            TestKind::PhiStar(vec![0.5]),
            TestKind::ProjectionCrossing,
            TestKind::Renyi,
        ]
    }

    /// Sign-based tests admit one-sided p-values.
    pub fn supports_one_sided(&self) -> bool {
        !matches!(self, TestKind::ProjectionCrossing | TestKind::Renyi)
    }

    fn weight_set(&self) -> Result<Option<WeightSet>> {
        Ok(match self {
            TestKind::MaxCombo => Some(crate::weights::builtin_set("maxcombo")?),
            TestKind::PhiStar(thetas) => {
                Some(WeightSet::new(phi_star_name(thetas), phi_star_specs(thetas)?)?)
            }
            TestKind::ProjectionCrossing => {
                Some(crate::weights::builtin_set("projection-crossing")?)
            }
            _ => None,
        })
    }
}

impl std::str::FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "logrank" => return Ok(TestKind::Logrank),
            "fh11" => return Ok(TestKind::Fh11),
            "maxcombo" => return Ok(TestKind::MaxCombo),
            "proj" | "projection" | "projection-crossing" => {
                return Ok(TestKind::ProjectionCrossing)
            }
            "renyi" => return Ok(TestKind::Renyi),
            _ => {}
        }
        if let Some(args) = t.strip_prefix("phi-star(").and_then(|x| x.strip_suffix(')')) {
            let thetas: Vec<f64> = args
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::UnknownName(format!("bad theta '{v}' in '{s}'")))
                })
                .collect::<Result<_>>()?;
            for &theta in &thetas {
                WeightSpec::crossing(theta)?;
            }
            return Ok(TestKind::PhiStar(thetas));
        }
        Err(Error::UnknownName(format!("unknown test '{s}'")))
    }
}

/// Which tail drives rejection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sidedness {
    TwoSided,
    /// Alternative Λ₁ ≥ Λ₀ (group 1 carries more hazard).
    OneSidedUpper,
    /// Alternative Λ₀ ≥ Λ₁.
    OneSidedLower,
}

/// Replication-engine knobs.
#[derive(Debug, Clone, Copy)]
pub struct RunSettings {
    pub n_reps: u32,
    pub alpha: f64,
    pub sidedness: Sidedness,
    pub seed: u64,
    /// QMC standard-error target for replication p-values. The binomial noise
    /// at 2000 replications dwarfs 1e-3, so the fast budget is the default.
    pub mvn_tol: f64,
    pub mvn_opts: MvnOpts,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            n_reps: 2000,
            alpha: 0.05,
            sidedness: Sidedness::TwoSided,
            seed: 1,
            mvn_tol: 1e-3,
            mvn_opts: MvnOpts::fast(),
        }
    }
}

impl RunSettings {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

/// Rejection rates and bookkeeping for one scenario.
#[derive(Debug, Clone)]
pub struct SimReport {
    pub scenario: Scenario,
    pub tests: Vec<TestKind>,
    pub rejection_rates: Vec<f64>,
    pub mean_censor_g0: f64,
    pub mean_censor_g1: f64,
    pub n_reps: u32,
    pub seed: u64,
    pub alpha: f64,
    pub sidedness: Sidedness,
    /// Replications that had to be regenerated (degenerate data).
    pub regenerated: u32,
}

impl SimReport {
    pub fn rate(&self, test: &TestKind) -> Option<f64> {
        self.tests.iter().position(|t| t == test).map(|i| self.rejection_rates[i])
    }
}

/// P-value of one test on one dataset under the requested sidedness.
fn test_pvalue(
    kind: &TestKind,
    table: &EventTable,
    sidedness: Sidedness,
    mvn_stream: RngStream,
    tol: f64,
    opts: &MvnOpts,
) -> Result<f64> {
    match kind {
        TestKind::Logrank | TestKind::Fh11 => {
            let spec = match kind {
                TestKind::Logrank => WeightSpec::Constant,
                _ => WeightSpec::RhoGamma { rho: 1.0, gamma: 1.0 },
            };
            let z = wlrt_statistic(table, &spec)?.z;
            Ok(match sidedness {
                Sidedness::TwoSided => 2.0 * (1.0 - normal_cdf(z.abs())),
                Sidedness::OneSidedUpper => 1.0 - normal_cdf(z),
                Sidedness::OneSidedLower => normal_cdf(z),
            })
        }
        TestKind::MaxCombo | TestKind::PhiStar(_) => {
            let set = kind.weight_set()?.expect("maximum tests carry a weight set");
            let cov = cov_matrix(table, &set)?;
            let (_, _, p_two, p_upper, p_lower) = combo_pvalues(&cov, tol, mvn_stream, opts)?;
            Ok(match sidedness {
                Sidedness::TwoSided => p_two,
                Sidedness::OneSidedUpper => p_upper,
                Sidedness::OneSidedLower => p_lower,
            })
        }
        TestKind::ProjectionCrossing => {
            if sidedness != Sidedness::TwoSided {
                return Err(Error::Input("the projection test is two-sided only".into()));
            }
            let set = kind.weight_set()?.expect("projection carries a weight set");
            let cov = cov_matrix(table, &set)?;
            Ok(projection_from_cov(&cov)?.p_value)
        }
        TestKind::Renyi => {
            if sidedness != Sidedness::TwoSided {
                return Err(Error::Input("the Renyi test is two-sided only".into()));
            }
            Ok(renyi_test(table, &WeightSpec::Constant)?.p_value)
        }
    }
}

struct RepOutcome {
    rejected: Vec<bool>,
    censor_g0: f64,
    censor_g1: f64,
    attempts: u64,
}

/// Run every test over `n_reps` generated trials and tally p < α.
///
/// Degenerate replications (no events, an empty group, a zero-variance
/// weight) are regenerated on the next substream and counted in
/// [`SimReport::regenerated`]; the denominator stays at `n_reps`.
pub fn run_scenario(
    scn: &Scenario,
    tests: &[TestKind],
    settings: &RunSettings,
) -> Result<SimReport> {
    if settings.n_reps == 0 {
        return Err(Error::Input("n_reps must be at least 1".into()));
    }
    if tests.is_empty() {
        return Err(Error::Input("at least one test is required".into()));
    }
    if settings.sidedness != Sidedness::TwoSided {
        if let Some(bad) = tests.iter().find(|t| !t.supports_one_sided()) {
            return Err(Error::Input(format!(
                "test '{}' does not admit a one-sided version",
                bad.label()
            )));
        }
    }
    scn.validate()?;
    let sampler = Group1Sampler::new(scn.hazard_case, scn.alpha, scn.beta)?;

    let outcomes: Vec<Result<RepOutcome>> = (0..settings.n_reps)
        .into_par_iter()
        .map(|rep| run_replication(scn, &sampler, tests, settings, rep))
        .collect();

    let mut rejections = vec![0u32; tests.len()];
    let mut censor0 = 0.0;
    let mut censor1 = 0.0;
    let mut regenerated = 0u32;
    for outcome in outcomes {
        let o = outcome?;
        for (count, &rej) in rejections.iter_mut().zip(&o.rejected) {
            if rej {
                *count += 1;
            }
        }
        censor0 += o.censor_g0;
        censor1 += o.censor_g1;
        regenerated += (o.attempts - 1) as u32;
    }
    let n = f64::from(settings.n_reps);
    Ok(SimReport {
        scenario: scn.clone(),
        tests: tests.to_vec(),
        rejection_rates: rejections.iter().map(|&r| f64::from(r) / n).collect(),
        mean_censor_g0: censor0 / n,
        mean_censor_g1: censor1 / n,
        n_reps: settings.n_reps,
        seed: settings.seed,
        alpha: settings.alpha,
        sidedness: settings.sidedness,
        regenerated,
    })
}

fn run_replication(
    scn: &Scenario,
    sampler: &Group1Sampler,
    tests: &[TestKind],
    settings: &RunSettings,
    rep: u32,
) -> Result<RepOutcome> {
    let mut attempt = 0u64;
    loop {
        attempt += 1;
        if attempt > MAX_ATTEMPTS {
            return Err(Error::DegenerateData(format!(
                "replication {rep} stayed degenerate after {MAX_ATTEMPTS} attempts"
            )));
        }
        let data_stream =
            RngStream::new(settings.seed, stream_id(rep, attempt, PURPOSE_DATA));
        let mvn_stream = RngStream::new(settings.seed, stream_id(rep, attempt, PURPOSE_MVN));
        let trial = match generate_trial_with(scn, sampler, data_stream) {
            Ok(t) => t,
            Err(Error::DegenerateData(_)) => continue,
            Err(e) => return Err(e),
        };
        let table = match build_event_table(&trial.subjects) {
            Ok(t) => t,
            Err(Error::DegenerateData(_)) => continue,
            Err(e) => return Err(e),
        };
        let mut rejected = Vec::with_capacity(tests.len());
        let mut degenerate = false;
        for kind in tests {
            match test_pvalue(
                kind,
                &table,
                settings.sidedness,
                mvn_stream,
                settings.mvn_tol,
                &settings.mvn_opts,
            ) {
                Ok(p) => rejected.push(p < settings.alpha),
                Err(Error::DegenerateData(_)) | Err(Error::DegenerateWeight(_)) => {
                    degenerate = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if degenerate {
            continue;
        }
        return Ok(RepOutcome {
            rejected,
            censor_g0: trial.censor_g0,
            censor_g1: trial.censor_g1,
            attempts: attempt,
        });
    }
}

/// Run a grid of scenarios; scenario i uses seed = base seed + i.
pub fn run_grid(
    scenarios: &[Scenario],
    tests: &[TestKind],
    settings: &RunSettings,
) -> Result<Vec<SimReport>> {
    scenarios
        .iter()
        .enumerate()
        .map(|(i, scn)| {
            let s = RunSettings { seed: settings.seed.wrapping_add(i as u64), ..*settings };
            run_scenario(scn, tests, &s)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Ranking scores.
// ---------------------------------------------------------------------------

/// One scenario row of a power matrix.
#[derive(Debug, Clone)]
pub struct PowerRow {
    /// Scenario key (used only for reporting).
    pub key: String,
    pub case: HazardCase,
    pub powers: Vec<f64>,
}

/// Scenarios × tests power table.
#[derive(Debug, Clone)]
pub struct PowerMatrix {
    pub tests: Vec<String>,
    pub rows: Vec<PowerRow>,
}

/// Summed rank scores per test: the most powerful test in a scenario receives
/// T points down to 1 for the least powerful, with average ranks on ties;
/// summed over the crossing-hazard scenarios and over all scenarios.
#[derive(Debug, Clone)]
pub struct RankTable {
    pub tests: Vec<String>,
    pub crossing: Vec<f64>,
    pub all: Vec<f64>,
    pub crossing_rows: usize,
    pub total_rows: usize,
}

pub fn ranking_scores(matrix: &PowerMatrix) -> Result<RankTable> {
    let t = matrix.tests.len();
    if t == 0 || matrix.rows.is_empty() {
        return Err(Error::Input("power matrix must be non-empty".into()));
    }
    let mut crossing = vec![0.0; t];
    let mut all = vec![0.0; t];
    let mut crossing_rows = 0;
    for row in &matrix.rows {
        if row.powers.len() != t {
            return Err(Error::Input(format!(
                "scenario '{}' has {} powers for {} tests",
                row.key,
                row.powers.len(),
                t
            )));
        }
        if row.powers.iter().any(|p| !p.is_finite()) {
            return Err(Error::Input(format!("scenario '{}' has missing powers", row.key)));
        }
        let scores = rank_scores(&row.powers);
        for k in 0..t {
            all[k] += scores[k];
            if row.case.is_crossing() {
                crossing[k] += scores[k];
            }
        }
        if row.case.is_crossing() {
            crossing_rows += 1;
        }
    }
    Ok(RankTable {
        tests: matrix.tests.clone(),
        crossing,
        all,
        crossing_rows,
        total_rows: matrix.rows.len(),
    })
}

/// Scores 1..=T, highest power first, average on ties.
fn rank_scores(powers: &[f64]) -> Vec<f64> {
    let t = powers.len();
    let mut order: Vec<usize> = (0..t).collect();
    order.sort_by(|&a, &b| powers[a].total_cmp(&powers[b]));
    let mut scores = vec![0.0; t];
    let mut i = 0;
    while i < t {
        let mut j = i;
        while j + 1 < t && powers[order[j + 1]] == powers[order[i]] {
            j += 1;
        }
        // Positions i..=j (0-based) share the average of scores i+1..=j+1.
        let avg = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            scores[idx] = avg;
        }
        i = j + 1;
    }
    scores
}

/// Collect `run_grid` output into a power matrix for ranking.
pub fn power_matrix_from_reports(reports: &[SimReport]) -> Result<PowerMatrix> {
    let first = reports.first().ok_or_else(|| Error::Input("no reports".into()))?;
    let tests: Vec<String> = first.tests.iter().map(TestKind::label).collect();
    let mut rows = Vec::with_capacity(reports.len());
    for report in reports {
        let labels: Vec<String> = report.tests.iter().map(TestKind::label).collect();
        if labels != tests {
            return Err(Error::Input("reports disagree on the test list".into()));
        }
        rows.push(PowerRow {
            key: report.scenario.descriptor(),
            case: report.scenario.hazard_case,
            powers: report.rejection_rates.clone(),
        });
    }
    Ok(PowerMatrix { tests, rows })
}

// ---------------------------------------------------------------------------
// Sweeps and grids.
// ---------------------------------------------------------------------------

/// Power of the crossing-aware maximum test per θ per scenario.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub thetas: Vec<f64>,
    pub rows: Vec<(Scenario, Vec<f64>)>,
    pub n_reps: u32,
    pub seed: u64,
}

/// θ-sensitivity sweep: all θ values are evaluated on the same generated
/// trials (common random numbers), at the settings level and sidedness.
pub fn sensitivity_sweep(
    scenarios: &[Scenario],
    theta_grid: &[f64],
    settings: &RunSettings,
) -> Result<SweepTable> {
    if theta_grid.is_empty() {
        return Err(Error::Input("theta grid must be non-empty".into()));
    }
    let sets: Vec<WeightSet> = theta_grid
        .iter()
        .map(|&theta| WeightSet::new(phi_star_name(&[theta]), phi_star_specs(&[theta])?))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(scenarios.len());
    for (i, scn) in scenarios.iter().enumerate() {
        scn.validate()?;
        let seed = settings.seed.wrapping_add(i as u64);
        let sampler = Group1Sampler::new(scn.hazard_case, scn.alpha, scn.beta)?;
        let outcomes: Vec<Result<Vec<bool>>> = (0..settings.n_reps)
            .into_par_iter()
            .map(|rep| sweep_replication(scn, &sampler, &sets, settings, seed, rep))
            .collect();
        let mut counts = vec![0u32; sets.len()];
        for o in outcomes {
            for (c, rej) in counts.iter_mut().zip(o?) {
                if rej {
                    *c += 1;
                }
            }
        }
        let n = f64::from(settings.n_reps);
        rows.push((scn.clone(), counts.iter().map(|&c| f64::from(c) / n).collect()));
    }
    Ok(SweepTable {
        thetas: theta_grid.to_vec(),
        rows,
        n_reps: settings.n_reps,
        seed: settings.seed,
    })
}

fn sweep_replication(
    scn: &Scenario,
    sampler: &Group1Sampler,
    sets: &[WeightSet],
    settings: &RunSettings,
    seed: u64,
    rep: u32,
) -> Result<Vec<bool>> {
    let mut attempt = 0u64;
    'outer: loop {
        attempt += 1;
        if attempt > MAX_ATTEMPTS {
            return Err(Error::DegenerateData(format!(
                "replication {rep} stayed degenerate after {MAX_ATTEMPTS} attempts"
            )));
        }
        let data_stream = RngStream::new(seed, stream_id(rep, attempt, PURPOSE_DATA));
        let trial = match generate_trial_with(scn, sampler, data_stream) {
            Ok(t) => t,
            Err(Error::DegenerateData(_)) => continue,
            Err(e) => return Err(e),
        };
        let table = match build_event_table(&trial.subjects) {
            Ok(t) => t,
            Err(Error::DegenerateData(_)) => continue,
            Err(e) => return Err(e),
        };
        let mut rejected = Vec::with_capacity(sets.len());
        for (ti, set) in sets.iter().enumerate() {
            let stream =
                RngStream::new(seed, stream_id(rep, attempt, PURPOSE_SWEEP_BASE + ti as u64));
            let cov = match cov_matrix(&table, set) {
                Ok(c) => c,
                Err(Error::DegenerateWeight(_)) | Err(Error::DegenerateData(_)) => continue 'outer,
                Err(e) => return Err(e),
            };
            let (_, _, p_two, p_upper, p_lower) =
                combo_pvalues(&cov, settings.mvn_tol, stream, &settings.mvn_opts)?;
            let p = match settings.sidedness {
                Sidedness::TwoSided => p_two,
                Sidedness::OneSidedUpper => p_upper,
                Sidedness::OneSidedLower => p_lower,
            };
            rejected.push(p < settings.alpha);
        }
        return Ok(rejected);
    }
}

/// The crossing-only extension: φ*(0.2, 0.5, 0.8) over the
/// {crossing1, proportional, null} × β × N grid under fixed-window censoring.
pub fn crossing_only_extension(n_reps: u32, seed: u64) -> Result<Vec<SimReport>> {
    let mut scenarios = Vec::new();
    for case in [HazardCase::Crossing1, HazardCase::Proportional, HazardCase::Null] {
        for beta in [15.0, 25.0, 40.0] {
            for n in [60, 120, 240] {
                scenarios.push(Scenario::type_i(case, n, 2.0, beta));
            }
        }
    }
    let tests = vec![TestKind::PhiStar(vec![0.2, 0.5, 0.8])];
    let settings = RunSettings { n_reps, seed, ..RunSettings::default() };
    run_grid(&scenarios, &tests, &settings)
}

/// Null-calibration grid, fixed 42-week window: case null, β ∈ {15,25,40},
/// N ∈ {60,120,240}.
pub fn null_type_i_grid() -> Vec<Scenario> {
    let mut out = Vec::new();
    for beta in [15.0, 25.0, 40.0] {
        for n in [60, 120, 240] {
            out.push(Scenario::type_i(HazardCase::Null, n, 2.0, beta));
        }
    }
    out
}

/// Null-calibration grid, event-driven: case null, φ ∈ {1/6,1/3,1/2},
/// N ∈ {60,120,240}, baseline α=2, β=12.
pub fn null_type_ii_grid() -> Vec<Scenario> {
    let mut out = Vec::new();
    for phi in [1.0 / 6.0, 1.0 / 3.0, 0.5] {
        for n in [60, 120, 240] {
            out.push(Scenario::type_ii(HazardCase::Null, n, 2.0, 12.0, 1.0 - phi));
        }
    }
    out
}

/// Power grid, fixed window: the seven alternatives × β ∈ {15,25,40} ×
/// N ∈ {60,120,240}.
pub fn power_type_i_grid() -> Vec<Scenario> {
    let mut out = Vec::new();
    for beta in [15.0, 25.0, 40.0] {
        for n in [60, 120, 240] {
            for case in HazardCase::ALTERNATIVES {
                out.push(Scenario::type_i(case, n, 2.0, beta));
            }
        }
    }
    out
}

/// Power grid, event-driven: the seven alternatives × φ ∈ {1/6,1/3,1/2} ×
/// N ∈ {60,120,240}, baseline α=2, β=12.
pub fn power_type_ii_grid() -> Vec<Scenario> {
    let mut out = Vec::new();
    for phi in [1.0 / 6.0, 1.0 / 3.0, 0.5] {
        for n in [60, 120, 240] {
            for case in HazardCase::ALTERNATIVES {
                out.push(Scenario::type_ii(case, n, 2.0, 12.0, 1.0 - phi));
            }
        }
    }
    out
}

/// The six crossing scenarios swept for θ sensitivity: N = 240, fixed window,
/// both crossing shapes × β ∈ {15,25,40}.
pub fn sensitivity_scenarios() -> Vec<Scenario> {
    let mut out = Vec::new();
    for beta in [15.0, 25.0, 40.0] {
        for case in [HazardCase::Crossing1, HazardCase::Crossing2] {
            out.push(Scenario::type_i(case, 240, 2.0, beta));
        }
    }
    out
}

/// The θ grid used by the sensitivity table.
pub fn default_theta_grid() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

// ---------------------------------------------------------------------------
// CSV interchange.
// ---------------------------------------------------------------------------

pub const REPORT_CSV_HEADER: &str = "mechanism,n,case,phi0,phi1,test,rejection_rate,reps,seed";

/// Write reports as CSV, one row per (scenario, test).
pub fn write_reports_csv<W: Write>(out: &mut W, reports: &[SimReport]) -> std::io::Result<()> {
    writeln!(out, "{REPORT_CSV_HEADER}")?;
    for r in reports {
        for (kind, rate) in r.tests.iter().zip(&r.rejection_rates) {
            writeln!(
                out,
                "{},{},{},{:.4},{:.4},{},{:.6},{},{}",
                r.scenario.mechanism.label(),
                r.scenario.n_total,
                r.scenario.hazard_case.label(),
                r.mean_censor_g0,
                r.mean_censor_g1,
                kind.label(),
                rate,
                r.n_reps,
                r.seed
            )?;
        }
    }
    Ok(())
}

/// Write a sensitivity sweep as CSV: one row per scenario, one power column
/// per θ.
pub fn write_sweep_csv<W: Write>(out: &mut W, sweep: &SweepTable) -> std::io::Result<()> {
    write!(out, "mechanism,n,case,beta")?;
    for theta in &sweep.thetas {
        write!(out, ",theta_{theta}")?;
    }
    writeln!(out)?;
    for (scn, powers) in &sweep.rows {
        write!(
            out,
            "{},{},{},{}",
            scn.mechanism.label(),
            scn.n_total,
            scn.hazard_case.label(),
            scn.beta
        )?;
        for p in powers {
            write!(out, ",{p:.6}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Write ranking scores as CSV: one row per scenario subset.
pub fn write_ranks_csv<W: Write>(out: &mut W, ranks: &RankTable) -> std::io::Result<()> {
    write!(out, "subset")?;
    for t in &ranks.tests {
        write!(out, ",{t}")?;
    }
    writeln!(out)?;
    write!(out, "crossing")?;
    for v in &ranks.crossing {
        write!(out, ",{v}")?;
    }
    writeln!(out)?;
    write!(out, "all")?;
    for v in &ranks.all {
        write!(out, ",{v}")?;
    }
    writeln!(out)
}

/// Parse a power matrix back from the report CSV schema. Rows are grouped by
/// the scenario columns (mechanism, n, case, phi0, phi1); every group must
/// cover the same tests.
pub fn read_power_csv<R: BufRead>(input: R) -> Result<PowerMatrix> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Input("empty power CSV".into()))?
        .map_err(|e| Error::Input(format!("read failure: {e}")))?;
    let cols: Vec<&str> = header.trim().split(',').collect();
    let expect: Vec<&str> = REPORT_CSV_HEADER.split(',').collect();
    if cols != expect {
        return Err(Error::Input(format!(
            "unexpected header '{header}', expected '{REPORT_CSV_HEADER}'"
        )));
    }
    let mut tests: Vec<String> = Vec::new();
    let mut rows: Vec<PowerRow> = Vec::new();
    let mut current_key: Option<String> = None;
    let mut seen_in_row = 0usize;
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::Input(format!("read failure: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::Input(format!(
                "line {}: expected 9 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let key =
            format!("{},{},{},{},{}", fields[0], fields[1], fields[2], fields[3], fields[4]);
        let case: HazardCase = fields[2]
            .parse()
            .map_err(|_| Error::Input(format!("line {}: bad case '{}'", lineno + 2, fields[2])))?;
        let test = fields[5].to_string();
        let rate: f64 = fields[6].parse().map_err(|_| {
            Error::Input(format!("line {}: bad rejection rate '{}'", lineno + 2, fields[6]))
        })?;
        if current_key.as_deref() != Some(key.as_str()) {
            current_key = Some(key.clone());
            seen_in_row = 0;
            rows.push(PowerRow { key, case, powers: Vec::new() });
        }
        let row = rows.last_mut().expect("just pushed");
        row.powers.push(rate);
        if tests.len() <= seen_in_row {
            tests.push(test);
        } else if tests[seen_in_row] != test {
            return Err(Error::Input(format!(
                "line {}: test order mismatch ('{}' vs '{}')",
                lineno + 2,
                test,
                tests[seen_in_row]
            )));
        }
        seen_in_row += 1;
    }
    if rows.is_empty() {
        return Err(Error::Input("power CSV has no data rows".into()));
    }
    for row in &rows {
        if row.powers.len() != tests.len() {
            return Err(Error::Input(format!(
                "scenario '{}' covers {} tests, expected {}",
                row.key,
                row.powers.len(),
                tests.len()
            )));
        }
    }
    Ok(PowerMatrix { tests, rows })
}
