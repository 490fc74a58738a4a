//! Omnibus two-sample tests built on the joint law of several weighted
//! logrank statistics: the maximum test, the projection (quadratic-form) test
//! and the Renyi supremum test.

use crate::error::{Error, Result};
use crate::numerics::matrix::{pseudo_inverse, Matrix};
use crate::numerics::mvn::{mvn_rect_prob_opts, MvnOpts};
use crate::numerics::{brownian_sup_sf, chisq_sf, find_root, normal_cdf, normal_quantile, RngStream};
use crate::surv::EventTable;
use crate::weights::{WeightSet, WeightSpec};
use crate::wlrt::{cov_matrix, wlrt_running, CovResult};

/// Relative eigenvalue cutoff for the covariance pseudo-inverse. The
/// crossing-aware projection basis {1, u, 2u−1} is exactly dependent, so rank
/// detection has to be robust.
pub const RANK_TOL: f64 = 1e-10;

/// Default standard-error target for the MVN rectangle probabilities.
pub const MVN_TOL: f64 = 5e-5;

/// Maximum weighted logrank test output.
#[derive(Debug, Clone, PartialEq)]
pub struct ComboResult {
    /// Standardized statistics, in weight-set order.
    pub z_vec: Vec<f64>,
    /// Their estimated correlation matrix.
    pub corr: Matrix,
    /// max_k |z_k|.
    pub t_max: f64,
    /// sign(z₁)·t_max — the one-sided statistic (first weight fixes the sign).
    pub signed_t: f64,
    pub p_two_sided: f64,
    /// P(T ≤ observed) for the alternative Λ₀ ≥ Λ₁.
    pub p_one_sided_lower: f64,
    /// P(T ≥ observed) for the alternative Λ₁ ≥ Λ₀.
    pub p_one_sided_upper: f64,
    /// Two-sided critical value at the requested level.
    pub c_alpha: f64,
    /// The level the critical value was computed for.
    pub alpha: f64,
}

/// Projection (pseudo-inverse quadratic form) test output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionResult {
    /// zᵀ·corr⁺·z.
    pub s_n: f64,
    /// Retained rank of the correlation matrix = chi-square df.
    pub rank: usize,
    pub p_value: f64,
}

/// Renyi (supremum) test output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenyiResult {
    /// sup_j |W(t_j)| / σ(t_last).
    pub q: f64,
    pub p_value: f64,
}

/// Two-sided p-value of the maximum statistic: 1 − P(−t ≤ Z ≤ t) under the
/// estimated correlation.
pub fn max_combo_p_two_sided(
    corr: &Matrix,
    t_max: f64,
    tol: f64,
    stream: RngStream,
    opts: &MvnOpts,
) -> Result<f64> {
    if t_max <= 0.0 {
        return Ok(1.0);
    }
    let m = corr.nrows();
    if m == 1 {
        return Ok((2.0 * (1.0 - normal_cdf(t_max))).clamp(0.0, 1.0));
    }
    let lower = vec![-t_max; m];
    let upper = vec![t_max; m];
    let inside = mvn_rect_prob_opts(corr, &lower, &upper, tol, stream, opts)?;
    Ok((1.0 - inside).clamp(0.0, 1.0))
}

/// Two-sided critical value: the c with P(−c ≤ Z ≤ c) = 1 − α under `corr`.
///
/// The root is bracketed by the universal bounds Φ⁻¹(1−α/2) (all statistics
/// identical) and Φ⁻¹((1+(1−α)^{1/m})/2) (independent statistics), widened by
/// 10% against QMC noise.
pub fn critical_value(
    corr: &Matrix,
    alpha: f64,
    tol: f64,
    stream: RngStream,
    opts: &MvnOpts,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::Domain(format!("alpha must lie in (0, 0.5), got {alpha}")));
    }
    let m = corr.nrows();
    let lo = normal_quantile(1.0 - alpha / 2.0)?;
    if m == 1 {
        return Ok(lo);
    }
    let hi = normal_quantile((1.0 + (1.0 - alpha).powf(1.0 / m as f64)) / 2.0)?;
    let width = hi - lo;
    let lo_w = lo - 0.1 * width;
    let hi_w = hi + 0.1 * width;
    let lower = vec![0.0; m];
    let upper = vec![0.0; m];
    let f = move |c: f64| {
        let lower: Vec<f64> = lower.iter().map(|_| -c).collect();
        let upper: Vec<f64> = upper.iter().map(|_| c).collect();
        match mvn_rect_prob_opts(corr, &lower, &upper, tol, stream, opts) {
            Ok(p) => p - (1.0 - alpha),
            Err(_) => f64::NAN,
        }
    };
    find_root(f, lo_w, hi_w, 1e-4)
}

/// The maximum weighted logrank test.
pub fn max_combo_test(
    table: &EventTable,
    set: &WeightSet,
    alpha: f64,
    stream: RngStream,
) -> Result<ComboResult> {
    max_combo_test_opts(table, set, alpha, stream, MVN_TOL, &MvnOpts::default())
}

/// [`max_combo_test`] with explicit MVN accuracy knobs.
pub fn max_combo_test_opts(
    table: &EventTable,
    set: &WeightSet,
    alpha: f64,
    stream: RngStream,
    tol: f64,
    opts: &MvnOpts,
) -> Result<ComboResult> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::Domain(format!("alpha must lie in (0, 0.5), got {alpha}")));
    }
    let cov = cov_matrix(table, set)?;
    let (t_max, signed_t, p_two, p_upper, p_lower) =
        combo_pvalues(&cov, tol, stream, opts)?;
    let c_alpha = critical_value(&cov.corr, alpha, tol, stream.with_stream(stream.stream_id() ^ (1 << 62)), opts)?;
    Ok(ComboResult {
        z_vec: cov.z_vec,
        corr: cov.corr,
        t_max,
        signed_t,
        p_two_sided: p_two,
        p_one_sided_lower: p_lower,
        p_one_sided_upper: p_upper,
        c_alpha,
        alpha,
    })
}

/// (t_max, signed_t, p_two, p_upper, p_lower) from a precomputed joint result.
///
/// One-sided p-values follow from the symmetry of the mean-zero Gaussian
/// limit: P(sign(Z₁)·max|Z| ≥ t) = ½·P(max|Z| ≥ t) for t > 0.
pub fn combo_pvalues(
    cov: &CovResult,
    tol: f64,
    stream: RngStream,
    opts: &MvnOpts,
) -> Result<(f64, f64, f64, f64, f64)> {
    let t_max = cov.z_vec.iter().fold(0.0f64, |a, z| a.max(z.abs()));
    let signed_t = if cov.z_vec[0] >= 0.0 { t_max } else { -t_max };
    let p_two = max_combo_p_two_sided(&cov.corr, t_max, tol, stream, opts)?;
    let (p_upper, p_lower) = if signed_t >= 0.0 {
        (0.5 * p_two, 1.0 - 0.5 * p_two)
    } else {
        (1.0 - 0.5 * p_two, 0.5 * p_two)
    };
    Ok((t_max, signed_t, p_two, p_upper, p_lower))
}

/// Projection test: the quadratic form of the standardized statistics through
/// the pseudo-inverse of their correlation, referred to chi-square with the
/// retained rank as degrees of freedom.
pub fn projection_test(table: &EventTable, set: &WeightSet) -> Result<ProjectionResult> {
    let cov = cov_matrix(table, set)?;
    projection_from_cov(&cov)
}

/// Projection statistic from a precomputed joint result.
pub fn projection_from_cov(cov: &CovResult) -> Result<ProjectionResult> {
    let (pinv, rank) = pseudo_inverse(&cov.corr, RANK_TOL)?;
    if rank == 0 {
        return Err(Error::DegenerateData("correlation matrix has rank zero".into()));
    }
    let s_n = pinv.quadratic_form(&cov.z_vec).max(0.0);
    let p_value = chisq_sf(s_n, rank as u32)?;
    Ok(ProjectionResult { s_n, rank, p_value })
}

/// Renyi supremum test for one weight function: the running statistic is
/// scanned over all usable event times and standardized by the variance at the
/// last one; the null law is sup of |Brownian motion| on [0, 1].
pub fn renyi_test(table: &EventTable, spec: &WeightSpec) -> Result<RenyiResult> {
    let (partial, variance) = wlrt_running(table, spec)?;
    if variance <= 0.0 {
        return Err(Error::DegenerateWeight(format!(
            "weight {} has zero variance on this dataset",
            spec.label()
        )));
    }
    let sup = partial.iter().fold(0.0f64, |a, w| a.max(w.abs()));
    let q = sup / variance.sqrt();
    let p_value = if q > 0.0 { brownian_sup_sf(q)? } else { 1.0 };
    Ok(RenyiResult { q, p_value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surv::{build_event_table, relabel_groups, Subject};
    use crate::weights::{builtin_set, WeightSet};
    use crate::wlrt::wlrt_statistic;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn s(time: f64, event: bool, group: u8) -> Subject {
        Subject { time, event, group }
    }

    fn stream() -> RngStream {
        RngStream::new(99, 0)
    }

    fn random_dataset(rng: &mut impl rand::Rng, n_per_group: usize) -> Vec<Subject> {
        (0..2 * n_per_group)
            .map(|i| Subject {
                time: (rng.random::<f64>() * 20.0).max(0.01),
                event: rng.random::<f64>() < 0.8,
                group: (i % 2) as u8,
            })
            .collect()
    }

    fn demo_dataset() -> Vec<Subject> {
        let mut rng = RngStream::new(4242, 0).rng();
        (0..60)
            .map(|i| Subject {
                time: 0.1 + 15.0 * rng.random::<f64>() * if i % 2 == 0 { 1.0 } else { 1.4 },
                event: rng.random::<f64>() < 0.85,
                group: (i % 2) as u8,
            })
            .collect()
    }

    #[test]
    fn univariate_reduction_logrank() {
        let table = build_event_table(&demo_dataset()).unwrap();
        let set = builtin_set("logrank").unwrap();
        let combo = max_combo_test(&table, &set, 0.05, stream()).unwrap();
        let z = wlrt_statistic(&table, &crate::weights::WeightSpec::Constant).unwrap().z;
        assert_abs_diff_eq!(combo.t_max, z.abs(), epsilon = 1e-12);
        assert_abs_diff_eq!(
            combo.p_two_sided,
            2.0 * (1.0 - normal_cdf(z.abs())),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(combo.c_alpha, 1.959963984540054, epsilon = 1e-8);
    }

    #[test]
    fn critical_value_identity_m4() {
        // Independent case closed form: Φ⁻¹((1+0.95^{1/4})/2) ≈ 2.4917.
        let corr = Matrix::identity(4);
        let c = critical_value(&corr, 0.05, MVN_TOL, stream(), &MvnOpts::default()).unwrap();
        let closed = normal_quantile((1.0 + 0.95f64.powf(0.25)) / 2.0).unwrap();
        assert_abs_diff_eq!(c, closed, epsilon = 2e-3);
    }

    #[test]
    fn critical_value_within_bracket_on_data() {
        let table = build_event_table(&demo_dataset()).unwrap();
        for name in ["maxcombo", "phi-star(0.5)", "phi-star(0.2,0.5,0.8)"] {
            let set = builtin_set(name).unwrap();
            let combo = max_combo_test_opts(
                &table,
                &set,
                0.05,
                stream(),
                1e-4,
                &MvnOpts::fast(),
            )
            .unwrap();
            let lo = normal_quantile(1.0 - 0.05 / 2.0).unwrap();
            let hi = normal_quantile((1.0 + 0.95f64.powf(1.0 / set.len() as f64)) / 2.0).unwrap();
            assert!(
                combo.c_alpha >= lo - 5e-3 && combo.c_alpha <= hi + 5e-3,
                "c_alpha {} outside [{lo}, {hi}] for {name}",
                combo.c_alpha
            );
        }
    }

    #[test]
    fn duplicated_specs_match_univariate() {
        let table = build_event_table(&demo_dataset()).unwrap();
        let dup = WeightSet::new(
            "dup",
            vec![crate::weights::WeightSpec::Constant, crate::weights::WeightSpec::Constant],
        )
        .unwrap();
        let single = builtin_set("logrank").unwrap();
        let a = max_combo_test(&table, &dup, 0.05, stream()).unwrap();
        let b = max_combo_test(&table, &single, 0.05, stream()).unwrap();
        assert_abs_diff_eq!(a.p_two_sided, b.p_two_sided, epsilon = 5e-4);
        assert_abs_diff_eq!(a.c_alpha, b.c_alpha, epsilon = 5e-3);
    }

    #[test]
    fn relabel_swaps_one_sided_pvalues() {
        let data = demo_dataset();
        let set = builtin_set("phi-star(0.5)").unwrap();
        let a = max_combo_test(&build_event_table(&data).unwrap(), &set, 0.05, stream()).unwrap();
        let b = max_combo_test(
            &build_event_table(&relabel_groups(&data)).unwrap(),
            &set,
            0.05,
            stream(),
        )
        .unwrap();
        assert_abs_diff_eq!(a.p_two_sided, b.p_two_sided, epsilon = 1e-12);
        assert_abs_diff_eq!(a.p_one_sided_upper, b.p_one_sided_lower, epsilon = 1e-12);
        assert_abs_diff_eq!(a.p_one_sided_lower, b.p_one_sided_upper, epsilon = 1e-12);
        assert_abs_diff_eq!(a.signed_t, -b.signed_t, epsilon = 1e-12);
    }

    #[test]
    fn projection_univariate_is_squared_normal() {
        let table = build_event_table(&demo_dataset()).unwrap();
        let set = builtin_set("logrank").unwrap();
        let proj = projection_test(&table, &set).unwrap();
        let z = wlrt_statistic(&table, &crate::weights::WeightSpec::Constant).unwrap().z;
        assert_eq!(proj.rank, 1);
        assert_abs_diff_eq!(proj.s_n, z * z, epsilon = 1e-12);
        assert_abs_diff_eq!(proj.p_value, 2.0 * (1.0 - normal_cdf(z.abs())), epsilon = 1e-10);
    }

    #[test]
    fn projection_rank_two_for_dependent_basis() {
        let mut rng = RngStream::new(11, 0).rng();
        for _ in 0..10 {
            let data = random_dataset(&mut rng, 15);
            let Ok(table) = build_event_table(&data) else { continue };
            let set = builtin_set("projection-crossing").unwrap();
            let Ok(proj) = projection_test(&table, &set) else { continue };
            assert_eq!(proj.rank, 2, "exactly dependent basis must collapse to rank 2");
        }
    }

    #[test]
    fn projection_duplicate_weight_collapses() {
        let table = build_event_table(&demo_dataset()).unwrap();
        let dup = WeightSet::new(
            "dup",
            vec![crate::weights::WeightSpec::Constant, crate::weights::WeightSpec::Constant],
        )
        .unwrap();
        let single = builtin_set("logrank").unwrap();
        let a = projection_test(&table, &dup).unwrap();
        let b = projection_test(&table, &single).unwrap();
        assert_eq!(a.rank, b.rank);
        assert_abs_diff_eq!(a.s_n, b.s_n, epsilon = 1e-9);
        assert_abs_diff_eq!(a.p_value, b.p_value, epsilon = 1e-9);
    }

    #[test]
    fn projection_scale_invariant_quadratic_form() {
        // Rescaling one weight by a positive constant leaves s_n unchanged:
        // the standardized scale quotient makes it automatic, so check against
        // the raw-scale quadratic form Wᵀ·Σ⁺·W on a full-rank basis.
        let table = build_event_table(&demo_dataset()).unwrap();
        let set = builtin_set("maxcombo").unwrap();
        let cov = crate::wlrt::cov_matrix(&table, &set).unwrap();
        let proj = projection_from_cov(&cov).unwrap();
        let (sigma_pinv, rank_sigma) = pseudo_inverse(&cov.sigma, RANK_TOL).unwrap();
        let raw = sigma_pinv.quadratic_form(&cov.w_vec);
        assert_eq!(proj.rank, rank_sigma);
        assert_abs_diff_eq!(proj.s_n, raw, epsilon = 1e-8);
    }

    #[test]
    fn renyi_dominates_endpoint() {
        let mut rng = RngStream::new(13, 0).rng();
        for _ in 0..10 {
            let data = random_dataset(&mut rng, 12);
            let Ok(table) = build_event_table(&data) else { continue };
            let spec = crate::weights::WeightSpec::Constant;
            let Ok(renyi) = renyi_test(&table, &spec) else { continue };
            let z = wlrt_statistic(&table, &spec).unwrap().z;
            assert!(renyi.q >= z.abs() - 1e-12);
            assert!((0.0..=1.0).contains(&renyi.p_value));
        }
    }

    #[test]
    fn renyi_relabel_invariant() {
        let data = demo_dataset();
        let spec = crate::weights::WeightSpec::Constant;
        let a = renyi_test(&build_event_table(&data).unwrap(), &spec).unwrap();
        let b = renyi_test(&build_event_table(&relabel_groups(&data)).unwrap(), &spec).unwrap();
        assert_abs_diff_eq!(a.q, b.q, epsilon = 1e-12);
        assert_abs_diff_eq!(a.p_value, b.p_value, epsilon = 1e-12);
    }

    #[test]
    fn renyi_monotone_running_max_hits_endpoint() {
        // All events in group 1, group 0 censored late: the increments share
        // one sign, the running maximum sits at the endpoint, and q = |z|.
        let mut data: Vec<Subject> = (1..=5).map(|i| s(i as f64, true, 1)).collect();
        data.extend((0..5).map(|_| s(100.0, false, 0)));
        let table = build_event_table(&data).unwrap();
        let spec = crate::weights::WeightSpec::Constant;
        let renyi = renyi_test(&table, &spec).unwrap();
        let z = wlrt_statistic(&table, &spec).unwrap().z;
        assert_abs_diff_eq!(renyi.q, z.abs(), epsilon = 1e-12);
    }

    #[test]
    fn renyi_location_shift_decreases_p() {
        // Growing separation between the groups should drive the p-value down.
        let base = |shift: f64| -> f64 {
            let mut rng = RngStream::new(21, 0).rng();
            let data: Vec<Subject> = (0..80)
                .map(|i| {
                    let g = (i % 2) as u8;
                    let t: f64 = 0.2 + 10.0 * rng.random::<f64>();
                    Subject {
                        time: if g == 1 { t + shift } else { t },
                        event: true,
                        group: g,
                    }
                })
                .collect();
            renyi_test(&build_event_table(&data).unwrap(), &crate::weights::WeightSpec::Constant)
                .unwrap()
                .p_value
        };
        let p0 = base(0.0);
        let p2 = base(2.0);
        let p5 = base(5.0);
        assert!(p2 < p0, "p({p2}) !< p({p0})");
        assert!(p5 < p2, "p({p5}) !< p({p2})");
    }

    #[test]
    fn identical_groups_give_unit_pvalues() {
        let mut data = Vec::new();
        for &(t, e) in &[(1.0, true), (2.0, true), (3.0, false), (4.5, true), (6.0, true)] {
            data.push(s(t, e, 0));
            data.push(s(t, e, 1));
        }
        let table = build_event_table(&data).unwrap();
        let combo =
            max_combo_test(&table, &builtin_set("maxcombo").unwrap(), 0.05, stream()).unwrap();
        assert_abs_diff_eq!(combo.p_two_sided, 1.0, epsilon = 1e-9);
        let proj = projection_test(&table, &builtin_set("projection-crossing").unwrap()).unwrap();
        assert_abs_diff_eq!(proj.p_value, 1.0, epsilon = 1e-9);
        let renyi = renyi_test(&table, &crate::weights::WeightSpec::Constant).unwrap();
        assert_abs_diff_eq!(renyi.p_value, 1.0, epsilon = 1e-12);
    }
}
