//! Weighted logrank statistics, their variance estimator and cross-weight
//! covariance/correlation matrices.
//!
//! Everything is a discrete sum over the pooled event-time rows with both
//! groups at risk. With c = √((n1+n0)/(n1·n0)), w_j the weight at the pooled
//! KM CDF value and y = y0+y1, d = d0+d1:
//!
//! - statistic:  W = c·Σ_j w_j·(d1/y1 − d0/y0)·(y1·y0/y)
//! - covariance: σ_{k,l} = c²·Σ_j w_k w_l·(y1·y0/y)·(1 − (d−1)/(y−1))·(d/y)

use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::surv::EventTable;
use crate::weights::{eval_weight, WeightSet, WeightSpec};

/// One weighted logrank statistic at the last usable event time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WlrtResult {
    /// The statistic W.
    pub w_stat: f64,
    /// Variance estimate of W.
    pub variance: f64,
    /// Standardized statistic W/√variance.
    pub z: f64,
}

/// Joint results for a set of weight functions.
#[derive(Debug, Clone, PartialEq)]
pub struct CovResult {
    /// Covariance matrix of the raw statistics.
    pub sigma: Matrix,
    /// Correlation matrix (unit diagonal).
    pub corr: Matrix,
    /// Raw statistics W_k.
    pub w_vec: Vec<f64>,
    /// Standardized statistics W_k/√σ_kk.
    pub z_vec: Vec<f64>,
}

struct UsableRow {
    weight_arg: f64,
    hazard_diff: f64,
    risk_product: f64,
    var_factor: f64,
}

fn usable_rows(table: &EventTable) -> Vec<UsableRow> {
    table
        .rows()
        .iter()
        .filter(|r| r.both_at_risk())
        .map(|r| {
            let y0 = f64::from(r.y0);
            let y1 = f64::from(r.y1);
            let y = y0 + y1;
            let d0 = f64::from(r.d0);
            let d1 = f64::from(r.d1);
            let d = d0 + d1;
            // Rows with y = 1 cannot occur here (both groups at risk means
            // y >= 2), so the tie factor is well defined; treat any 0/0 as 0.
            let tie = if y > 1.0 { 1.0 - (d - 1.0) / (y - 1.0) } else { 0.0 };
            UsableRow {
                weight_arg: r.f_minus,
                hazard_diff: d1 / y1 - d0 / y0,
                risk_product: y1 * y0 / y,
                var_factor: (y1 * y0 / y) * tie * (d / y),
            }
        })
        .collect()
}

/// The weighted logrank statistic, its variance and z-value for one weight.
pub fn wlrt_statistic(table: &EventTable, spec: &WeightSpec) -> Result<WlrtResult> {
    let rows = usable_rows(table);
    if rows.is_empty() {
        return Err(Error::DegenerateData(
            "no event times with both groups at risk".into(),
        ));
    }
    let c = table.norm_constant();
    let mut w_stat = 0.0;
    let mut variance = 0.0;
    for row in &rows {
        let w = eval_weight(spec, row.weight_arg)?;
        w_stat += w * row.hazard_diff * row.risk_product;
        variance += w * w * row.var_factor;
    }
    w_stat *= c;
    variance *= c * c;
    let z = if variance > 0.0 { w_stat / variance.sqrt() } else { 0.0 };
    Ok(WlrtResult { w_stat, variance, z })
}

/// Running partial sums of the statistic at every usable event time, together
/// with the variance at the last usable time (Renyi/supremum input).
pub fn wlrt_running(table: &EventTable, spec: &WeightSpec) -> Result<(Vec<f64>, f64)> {
    let rows = usable_rows(table);
    if rows.is_empty() {
        return Err(Error::DegenerateData(
            "no event times with both groups at risk".into(),
        ));
    }
    let c = table.norm_constant();
    let mut partial = Vec::with_capacity(rows.len());
    let mut acc = 0.0;
    let mut variance = 0.0;
    for row in &rows {
        let w = eval_weight(spec, row.weight_arg)?;
        acc += c * w * row.hazard_diff * row.risk_product;
        partial.push(acc);
        variance += c * c * w * w * row.var_factor;
    }
    Ok((partial, variance))
}

/// Joint covariance, correlation and standardized statistics for a weight set.
pub fn cov_matrix(table: &EventTable, set: &WeightSet) -> Result<CovResult> {
    let rows = usable_rows(table);
    if rows.is_empty() {
        return Err(Error::DegenerateData(
            "no event times with both groups at risk".into(),
        ));
    }
    let m = set.len();
    let c = table.norm_constant();
    let c2 = c * c;

    // Weight values per (row, spec).
    let mut wvals = vec![0.0; rows.len() * m];
    for (j, row) in rows.iter().enumerate() {
        for (k, spec) in set.specs().iter().enumerate() {
            wvals[j * m + k] = eval_weight(spec, row.weight_arg)?;
        }
    }

    let mut w_vec = vec![0.0; m];
    let mut sigma = Matrix::zeros(m, m);
    for (j, row) in rows.iter().enumerate() {
        let ws = &wvals[j * m..(j + 1) * m];
        let stat_term = row.hazard_diff * row.risk_product;
        for k in 0..m {
            w_vec[k] += c * ws[k] * stat_term;
            for l in k..m {
                sigma[(k, l)] += c2 * ws[k] * ws[l] * row.var_factor;
            }
        }
    }
    for k in 0..m {
        for l in 0..k {
            sigma[(k, l)] = sigma[(l, k)];
        }
    }

    for (k, spec) in set.specs().iter().enumerate() {
        if sigma[(k, k)] <= 0.0 {
            return Err(Error::DegenerateWeight(format!(
                "weight {} has zero variance on this dataset",
                spec.label()
            )));
        }
    }

    let mut corr = Matrix::identity(m);
    for k in 0..m {
        for l in 0..m {
            if k != l {
                let denom = (sigma[(k, k)] * sigma[(l, l)]).sqrt();
                corr[(k, l)] = (sigma[(k, l)] / denom).clamp(-1.0, 1.0);
            }
        }
    }
    let z_vec: Vec<f64> =
        w_vec.iter().enumerate().map(|(k, w)| w / sigma[(k, k)].sqrt()).collect();
    Ok(CovResult { sigma, corr, w_vec, z_vec })
}
