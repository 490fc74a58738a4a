//! Trial data generation: log-logistic baseline survival, eight hazard-ratio
//! shapes, inverse-method sampling for the treated group, and fixed-duration
//! (Type I) or event-driven (Type II) administrative censoring.

use crate::error::{Error, Result};
use crate::numerics::{find_root, integrate, RngStream};
use crate::surv::Subject;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Hard ceiling for bracket growth when inverting the cumulative hazard.
const MAX_TIME: f64 = 1e6;

/// Largest cumulative-hazard target a uniform f64 draw can produce:
/// −ln(2⁻⁵³) ≈ 36.74. Panel tables stop once past it.
const CUM_CEILING: f64 = 37.0;

/// The hazard-ratio shapes g(t) = λ₁(t)/λ₀(t).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HazardCase {
    /// Ratio below 1 early, linear rise through 1, above 1 late.
    Crossing1,
    /// Ratio above 1 early, exponential decay below 1.
    Crossing2,
    /// Sigmoid rise from 1 to 2.5 (treatment effect kicks in late).
    DelayedDiverging,
    /// exp(0.03·t), growing separation.
    Diverging,
    /// exp(1/(0.2t+1)), decays from e toward 1 from above.
    Converging1,
    /// Parabolic rise from 0.5 to 0.98, then constant.
    Converging2,
    /// Constant ratio 1.5 (proportional hazards).
    Proportional,
    /// Ratio 1 (the null).
    Null,
}

impl HazardCase {
    pub const ALL: [HazardCase; 8] = [
        HazardCase::Crossing1,
        HazardCase::Crossing2,
        HazardCase::DelayedDiverging,
        HazardCase::Diverging,
        HazardCase::Converging1,
        HazardCase::Converging2,
        HazardCase::Proportional,
        HazardCase::Null,
    ];

    /// Alternatives only (everything except the null).
    pub const ALTERNATIVES: [HazardCase; 7] = [
        HazardCase::Crossing1,
        HazardCase::Crossing2,
        HazardCase::DelayedDiverging,
        HazardCase::Diverging,
        HazardCase::Converging1,
        HazardCase::Converging2,
        HazardCase::Proportional,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            HazardCase::Crossing1 => "crossing1",
            HazardCase::Crossing2 => "crossing2",
            HazardCase::DelayedDiverging => "delayed_diverging",
            HazardCase::Diverging => "diverging",
            HazardCase::Converging1 => "converging1",
            HazardCase::Converging2 => "converging2",
            HazardCase::Proportional => "proportional",
            HazardCase::Null => "null",
        }
    }

    /// True for the crossing-hazard shapes (the subset ranked separately).
    pub fn is_crossing(&self) -> bool {
        matches!(self, HazardCase::Crossing1 | HazardCase::Crossing2)
    }

    /// Constant g(t), when the ratio does not depend on time.
    fn constant_ratio(&self) -> Option<f64> {
        match self {
            HazardCase::Proportional => Some(1.5),
            HazardCase::Null => Some(1.0),
            _ => None,
        }
    }
}

impl std::str::FromStr for HazardCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" | "crossing1" => Ok(HazardCase::Crossing1),
            "b" | "crossing2" => Ok(HazardCase::Crossing2),
            "c" | "delayed_diverging" => Ok(HazardCase::DelayedDiverging),
            "d" | "diverging" => Ok(HazardCase::Diverging),
            "e" | "converging1" => Ok(HazardCase::Converging1),
            "f" | "converging2" => Ok(HazardCase::Converging2),
            "g" | "proportional" | "constant" => Ok(HazardCase::Proportional),
            "h" | "null" | "equal" => Ok(HazardCase::Null),
            other => Err(Error::UnknownName(format!("unknown hazard case '{other}'"))),
        }
    }
}

/// Hazard ratio g(t) for one shape.
pub fn hazard_ratio(case: HazardCase, t: f64) -> f64 {
    match case {
        HazardCase::Crossing1 => {
            if t < 10.0 {
                0.5
            } else if t <= 25.0 {
                (t - 10.0) / 15.0 + 0.5
            } else {
                1.5
            }
        }
        HazardCase::Crossing2 => 3.0 * (-0.3 * t).exp() + 0.8,
        HazardCase::DelayedDiverging => 1.5 / (1.0 + (-0.5 * (t - 20.0)).exp()) + 1.0,
        HazardCase::Diverging => (0.03 * t).exp(),
        HazardCase::Converging1 => (1.0 / (0.2 * t + 1.0)).exp(),
        HazardCase::Converging2 => {
            if t <= 40.0 {
                1.0 - (t - 50.0) * (t - 50.0) / 5000.0
            } else {
                0.98
            }
        }
        HazardCase::Proportional => 1.5,
        HazardCase::Null => 1.0,
    }
}

/// Log-logistic hazard λ₀(t) with shape `alpha`, scale `beta`.
pub fn baseline_hazard(alpha: f64, beta: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let r = (t / beta).powf(alpha);
    (alpha / t) * r / (1.0 + r)
}

/// Log-logistic cumulative hazard Λ₀(t) = ln(1 + (t/β)^α).
pub fn baseline_cum_hazard(alpha: f64, beta: f64, t: f64) -> f64 {
    (t / beta).powf(alpha).ln_1p()
}

/// Baseline survival time at uniform draw u (solves S(t) = u):
/// t = β·((1−u)/u)^{1/α}.
pub fn baseline_time(alpha: f64, beta: f64, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!("uniform draw must lie in (0,1), got {u}")));
    }
    Ok(beta * ((1.0 - u) / u).powf(1.0 / alpha))
}

/// Group-1 cumulative hazard Λ₁(t) = ∫₀ᵗ g(s)·λ₀(s) ds by adaptive quadrature.
pub fn group1_cum_hazard(case: HazardCase, alpha: f64, beta: f64, t: f64) -> Result<f64> {
    if let Some(g) = case.constant_ratio() {
        return Ok(g * baseline_cum_hazard(alpha, beta, t));
    }
    integrate(|s| hazard_ratio(case, s) * baseline_hazard(alpha, beta, s), 0.0, t, 1e-9)
}

/// Group-1 survival time at uniform draw u: solves Λ₁(t) = −ln u by bracket
/// doubling from β followed by root finding; the residual |Λ₁(t)+ln u| stays
/// below 1e-7.
pub fn group1_time(case: HazardCase, alpha: f64, beta: f64, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!("uniform draw must lie in (0,1), got {u}")));
    }
    let target = -u.ln();
    let mut hi = beta;
    while group1_cum_hazard(case, alpha, beta, hi)? < target {
        hi *= 2.0;
        if hi > MAX_TIME {
            return Err(Error::Numeric(format!(
                "cumulative hazard bracket exceeded {MAX_TIME} weeks (u = {u})"
            )));
        }
    }
    let f = |t: f64| match group1_cum_hazard(case, alpha, beta, t) {
        Ok(v) => v - target,
        Err(_) => f64::NAN,
    };
    find_root(f, 0.0, hi, 1e-9 * hi.max(1.0))
}

/// Cached inverse of the group-1 cumulative hazard for one (case, α, β).
///
/// A panel table of Λ₁ prefix integrals makes each draw a short in-panel
/// quadrature instead of an integral from zero; shared read-only across
/// replications.
#[derive(Debug, Clone)]
pub struct Group1Sampler {
    case: HazardCase,
    alpha: f64,
    beta: f64,
    /// (t, Λ₁(t)) at panel boundaries, strictly increasing in both, starting
    /// at (0, 0). Empty for constant-ratio cases (closed form).
    nodes: Vec<(f64, f64)>,
}

impl Group1Sampler {
    pub fn new(case: HazardCase, alpha: f64, beta: f64) -> Result<Self> {
        if alpha <= 0.0 || beta <= 0.0 {
            return Err(Error::Domain("alpha and beta must be positive".into()));
        }
        let mut nodes = Vec::new();
        if case.constant_ratio().is_none() {
            nodes.push((0.0, 0.0));
            let mut t = 0.0;
            let mut cum = 0.0;
            let step = beta / 16.0;
            // Uniform panels through the body of the distribution, geometric
            // panels through the tail, stopping at the bracket ceiling or once
            // the cumulative hazard passes every realizable draw target
            // (ratios like exp(0.03t) overflow long before the time ceiling).
            while t < 4.0 * beta && cum < CUM_CEILING {
                let next = t + step;
                cum += integrate(
                    |s| hazard_ratio(case, s) * baseline_hazard(alpha, beta, s),
                    t,
                    next,
                    1e-11,
                )?;
                t = next;
                nodes.push((t, cum));
            }
            while t < MAX_TIME && cum < CUM_CEILING {
                let next = (t * 1.25).min(MAX_TIME);
                cum += integrate(
                    |s| hazard_ratio(case, s) * baseline_hazard(alpha, beta, s),
                    t,
                    next,
                    1e-11,
                )?;
                t = next;
                nodes.push((t, cum));
            }
        }
        Ok(Self { case, alpha, beta, nodes })
    }

    /// Λ₁(t) through the panel cache.
    pub fn cum_hazard(&self, t: f64) -> Result<f64> {
        if let Some(g) = self.case.constant_ratio() {
            return Ok(g * baseline_cum_hazard(self.alpha, self.beta, t));
        }
        let idx = match self.nodes.binary_search_by(|(node, _)| node.total_cmp(&t)) {
            Ok(i) => return Ok(self.nodes[i].1),
            Err(i) => i.saturating_sub(1),
        };
        let (t0, cum) = self.nodes[idx.min(self.nodes.len() - 1)];
        Ok(cum
            + integrate(
                |s| hazard_ratio(self.case, s) * baseline_hazard(self.alpha, self.beta, s),
                t0,
                t.min(MAX_TIME),
                1e-11,
            )?)
    }

    /// Survival time at uniform draw u (same contract as [`group1_time`]).
    pub fn sample(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("uniform draw must lie in (0,1), got {u}")));
        }
        let target = -u.ln();
        if let Some(g) = self.case.constant_ratio() {
            // Λ₁ = g·Λ₀ inverts in closed form through the baseline quantile.
            let s0 = (-target / g).exp();
            return baseline_time(self.alpha, self.beta, s0);
        }
        let last = self.nodes.last().expect("panel table is non-empty");
        if target > last.1 {
            // The true time lies beyond the bracket ceiling. Saturate: every
            // censoring mechanism cuts such draws off far earlier anyway.
            return Ok(MAX_TIME);
        }
        // Panel holding the target, then a bracketed solve inside it.
        let idx = self
            .nodes
            .partition_point(|(_, cum)| *cum <= target)
            .saturating_sub(1)
            .min(self.nodes.len() - 2);
        let (t0, cum0) = self.nodes[idx];
        let (t1, _) = self.nodes[idx + 1];
        let f = |t: f64| {
            cum0 + integrate(
                |s| hazard_ratio(self.case, s) * baseline_hazard(self.alpha, self.beta, s),
                t0,
                t,
                1e-11,
            )
            .unwrap_or(f64::NAN)
                - target
        };
        find_root(f, t0, t1, 1e-9 * t1.max(1.0))
    }
}

/// Administrative censoring mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mechanism {
    /// Fixed study window; follow-up ends at a calendar cutoff.
    #[serde(rename = "type_i")]
    TypeI,
    /// Study stops at a prespecified pooled event count.
    #[serde(rename = "type_ii")]
    TypeII,
}

impl Mechanism {
    pub fn label(&self) -> &'static str {
        match self {
            Mechanism::TypeI => "type_i",
            Mechanism::TypeII => "type_ii",
        }
    }
}

/// Complete description of one simulated trial configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub mechanism: Mechanism,
    /// Total subjects, allocated 1:1.
    pub n_total: u32,
    pub hazard_case: HazardCase,
    /// Log-logistic baseline shape.
    pub alpha: f64,
    /// Log-logistic baseline scale (weeks).
    pub beta: f64,
    /// Target pooled event fraction 1−φ (Type II only).
    #[serde(default)]
    pub target_event_fraction: Option<f64>,
    /// Uniform accrual window; defaults to 18 (Type I) or 24 (Type II) weeks.
    #[serde(default)]
    pub accrual_weeks: Option<f64>,
    /// Calendar end of study; defaults to 42 weeks (Type I only).
    #[serde(default)]
    pub admin_end_weeks: Option<f64>,
}

impl Scenario {
    /// Fixed-window trial: accrual over 18 weeks, cutoff at week 42.
    pub fn type_i(case: HazardCase, n_total: u32, alpha: f64, beta: f64) -> Self {
        Self {
            mechanism: Mechanism::TypeI,
            n_total,
            hazard_case: case,
            alpha,
            beta,
            target_event_fraction: None,
            accrual_weeks: None,
            admin_end_weeks: None,
        }
    }

    /// Event-driven trial: accrual over 24 weeks, stop at the
    /// round(n·event_fraction)-th pooled event.
    pub fn type_ii(
        case: HazardCase,
        n_total: u32,
        alpha: f64,
        beta: f64,
        event_fraction: f64,
    ) -> Self {
        Self {
            mechanism: Mechanism::TypeII,
            n_total,
            hazard_case: case,
            alpha,
            beta,
            target_event_fraction: Some(event_fraction),
            accrual_weeks: None,
            admin_end_weeks: None,
        }
    }

    pub fn accrual(&self) -> f64 {
        self.accrual_weeks.unwrap_or(match self.mechanism {
            Mechanism::TypeI => 18.0,
            Mechanism::TypeII => 24.0,
        })
    }

    pub fn admin_end(&self) -> f64 {
        self.admin_end_weeks.unwrap_or(42.0)
    }

    /// Target pooled event count for Type II.
    pub fn event_target(&self) -> Result<u32> {
        let frac = self.target_event_fraction.ok_or_else(|| {
            Error::Domain("type_ii scenarios need target_event_fraction".into())
        })?;
        let d = (f64::from(self.n_total) * frac).round() as i64;
        if d < 1 {
            return Err(Error::Domain(format!("event target {d} must be at least 1")));
        }
        Ok(d as u32)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_total < 2 || self.n_total % 2 != 0 {
            return Err(Error::Domain(format!(
                "n_total must be even and >= 2 for 1:1 allocation, got {}",
                self.n_total
            )));
        }
        if self.alpha <= 0.0 || self.beta <= 0.0 {
            return Err(Error::Domain("alpha and beta must be positive".into()));
        }
        if self.accrual() <= 0.0 {
            return Err(Error::Domain("accrual window must be positive".into()));
        }
        match self.mechanism {
            Mechanism::TypeI => {
                if self.admin_end() <= self.accrual() {
                    return Err(Error::Domain(
                        "study end must come after the accrual window".into(),
                    ));
                }
            }
            Mechanism::TypeII => {
                let frac = self.target_event_fraction.ok_or_else(|| {
                    Error::Domain("type_ii scenarios need target_event_fraction".into())
                })?;
                if !(frac > 0.0 && frac <= 1.0) {
                    return Err(Error::Domain(format!(
                        "target_event_fraction must lie in (0,1], got {frac}"
                    )));
                }
                self.event_target()?;
            }
        }
        Ok(())
    }

    /// Compact human-readable descriptor used in reports.
    pub fn descriptor(&self) -> String {
        match self.mechanism {
            Mechanism::TypeI => format!(
                "{} N={} case={} beta={}",
                self.mechanism.label(),
                self.n_total,
                self.hazard_case.label(),
                self.beta
            ),
            Mechanism::TypeII => format!(
                "{} N={} case={} phi={:.3}",
                self.mechanism.label(),
                self.n_total,
                self.hazard_case.label(),
                1.0 - self.target_event_fraction.unwrap_or(1.0)
            ),
        }
    }
}

/// One generated trial.
#[derive(Debug, Clone)]
pub struct TrialData {
    pub subjects: Vec<Subject>,
    /// Realized censoring fractions per group over the analysis set.
    pub censor_g0: f64,
    pub censor_g1: f64,
    /// Realized study duration (calendar weeks).
    pub duration: f64,
}

/// Generate one trial; builds the group-1 sampler internally.
pub fn generate_trial(scn: &Scenario, stream: RngStream) -> Result<TrialData> {
    let sampler = Group1Sampler::new(scn.hazard_case, scn.alpha, scn.beta)?;
    generate_trial_with(scn, &sampler, stream)
}

/// Generate one trial reusing a prebuilt sampler (replication hot path).
///
/// Draw order is fixed (group 0 then group 1; entry then survival draw per
/// subject), so results depend only on the stream, never on scheduling.
pub fn generate_trial_with(
    scn: &Scenario,
    sampler: &Group1Sampler,
    stream: RngStream,
) -> Result<TrialData> {
    scn.validate()?;
    let mut rng = stream.rng();
    let per_group = (scn.n_total / 2) as usize;
    let accrual = scn.accrual();

    let mut entries = Vec::with_capacity(2 * per_group);
    let mut times = Vec::with_capacity(2 * per_group);
    let mut groups = Vec::with_capacity(2 * per_group);
    for group in 0..2u8 {
        for _ in 0..per_group {
            let entry = accrual * rng.random::<f64>();
            let u = draw_open_unit(&mut rng);
            let t = if group == 0 {
                baseline_time(scn.alpha, scn.beta, u)?
            } else {
                sampler.sample(u)?
            };
            entries.push(entry);
            times.push(t);
            groups.push(group);
        }
    }

    let (subjects, duration) = match scn.mechanism {
        Mechanism::TypeI => {
            let end = scn.admin_end();
            let subjects = (0..times.len())
                .map(|i| {
                    let cap = end - entries[i];
                    Subject {
                        time: times[i].min(cap),
                        event: times[i] <= cap,
                        group: groups[i],
                    }
                })
                .collect();
            (subjects, end)
        }
        Mechanism::TypeII => {
            let d = scn.event_target()? as usize;
            let calendar: Vec<f64> = entries.iter().zip(&times).map(|(e, t)| e + t).collect();
            let mut sorted = calendar.clone();
            sorted.sort_by(f64::total_cmp);
            let tau = sorted[d - 1];
            let mut subjects = Vec::with_capacity(times.len());
            for i in 0..times.len() {
                if calendar[i] <= tau {
                    subjects.push(Subject { time: times[i], event: true, group: groups[i] });
                } else {
                    let follow_up = tau - entries[i];
                    // Subjects enrolled after the stop carry no information
                    // and are dropped from the analysis set.
                    if follow_up > 0.0 {
                        subjects.push(Subject { time: follow_up, event: false, group: groups[i] });
                    }
                }
            }
            (subjects, tau)
        }
    };

    let mut n = [0u32; 2];
    let mut censored = [0u32; 2];
    for s in &subjects {
        n[s.group as usize] += 1;
        if !s.event {
            censored[s.group as usize] += 1;
        }
    }
    if n[0] == 0 || n[1] == 0 {
        return Err(Error::DegenerateData("a group lost all subjects to the stopping rule".into()));
    }
    Ok(TrialData {
        subjects,
        censor_g0: f64::from(censored[0]) / f64::from(n[0]),
        censor_g1: f64::from(censored[1]) / f64::from(n[1]),
        duration,
    })
}

fn draw_open_unit(rng: &mut impl Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}
