//! Multivariate normal rectangle probabilities.
//!
//! Genz separation-of-variables: the rectangle probability under N(0, Σ) is
//! transformed through the Cholesky factor into an integral over the unit cube
//! of dimension m−1, which is evaluated with a randomized rank-1 lattice
//! (Richtmyer generators, independent uniform shifts). The shift spread gives
//! an unbiased standard-error estimate; the point budget doubles until the
//! estimated standard error reaches the requested tolerance or the budget cap.

use crate::error::{Error, Result};
use crate::numerics::matrix::{cholesky_psd, Matrix};
use crate::numerics::rng::RngStream;
use crate::numerics::special::{normal_cdf, normal_quantile_raw};
use rand::Rng;

/// Budget knobs for the QMC estimate.
#[derive(Debug, Clone, Copy)]
pub struct MvnOpts {
    /// Independent random shifts of the lattice (standard-error estimate).
    pub shifts: usize,
    /// Lattice points per shift in the first round.
    pub base_points: usize,
    /// Hard cap on total points across all rounds.
    pub max_points: usize,
}

impl Default for MvnOpts {
    fn default() -> Self {
        // 16 × 8192 = 2^17 points in the first round.
        Self { shifts: 16, base_points: 8192, max_points: 1 << 20 }
    }
}

impl MvnOpts {
    /// Smaller first round for loose tolerances (simulation replications).
    pub fn fast() -> Self {
        Self { shifts: 8, base_points: 512, max_points: 1 << 17 }
    }
}

/// P(lower ≤ Z ≤ upper) for Z ~ N(0, corr), to estimated standard error ≤ tol.
///
/// Deterministic for a fixed `stream`. Degenerate (exactly singular) but PSD
/// correlation matrices are handled through the semidefinite Cholesky factor.
pub fn mvn_rect_prob(
    corr: &Matrix,
    lower: &[f64],
    upper: &[f64],
    tol: f64,
    stream: RngStream,
) -> Result<f64> {
    mvn_rect_prob_opts(corr, lower, upper, tol, stream, &MvnOpts::default())
}

/// [`mvn_rect_prob`] with an explicit point budget.
pub fn mvn_rect_prob_opts(
    corr: &Matrix,
    lower: &[f64],
    upper: &[f64],
    tol: f64,
    stream: RngStream,
    opts: &MvnOpts,
) -> Result<f64> {
    let m = corr.nrows();
    if lower.len() != m || upper.len() != m {
        return Err(Error::Matrix(format!(
            "bounds of length {}/{} do not match a {m}-variate correlation",
            lower.len(),
            upper.len()
        )));
    }
    corr.validate_correlation(1e-8)?;
    for i in 0..m {
        if !(lower[i] < upper[i]) {
            return Err(Error::Domain(format!(
                "require lower < upper componentwise, got [{}, {}] at {i}",
                lower[i], upper[i]
            )));
        }
    }
    let chol = cholesky_psd(corr, 1e-8)?;

    if m == 1 {
        return Ok((normal_cdf(upper[0]) - normal_cdf(lower[0])).clamp(0.0, 1.0));
    }

    // Richtmyer generator: fractional parts of √(primes).
    const PRIMES: [f64; 7] = [2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0];
    let dim = m - 1;
    if dim > PRIMES.len() {
        return Err(Error::Matrix(format!("dimension {m} exceeds the supported maximum 8")));
    }
    let gen: Vec<f64> = PRIMES[..dim].iter().map(|p| p.sqrt().fract()).collect();

    let mut rng = stream.rng();
    let shifts: Vec<Vec<f64>> = (0..opts.shifts)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect();

    let mut n = opts.base_points;
    loop {
        let mut means = Vec::with_capacity(opts.shifts);
        for shift in &shifts {
            let mut acc = 0.0;
            let mut w = vec![0.0; dim];
            for i in 0..n {
                let k = (i + 1) as f64;
                for (d, g) in gen.iter().enumerate() {
                    w[d] = (k * g + shift[d]).fract();
                }
                acc += integrand(&chol, lower, upper, &w);
            }
            means.push(acc / n as f64);
        }
        let est = means.iter().sum::<f64>() / means.len() as f64;
        let var = means.iter().map(|v| (v - est) * (v - est)).sum::<f64>()
            / (means.len() as f64 * (means.len() - 1).max(1) as f64);
        let se = var.sqrt();
        let total = n * opts.shifts;
        if se <= tol || total * 2 > opts.max_points {
            return Ok(est.clamp(0.0, 1.0));
        }
        n *= 2;
    }
}

/// One Genz-transformed integrand evaluation at the cube point `w`.
fn integrand(chol: &Matrix, lower: &[f64], upper: &[f64], w: &[f64]) -> f64 {
    const EPS: f64 = 1e-15;
    let m = lower.len();
    let mut y = vec![0.0; m - 1];
    let c00 = chol[(0, 0)];
    let mut d = normal_cdf(lower[0] / c00);
    let mut e = normal_cdf(upper[0] / c00);
    let mut f = e - d;
    for i in 1..m {
        let u = (d + w[i - 1] * (e - d)).clamp(EPS, 1.0 - EPS);
        y[i - 1] = normal_quantile_raw(u);
        let mut s = 0.0;
        for (j, yj) in y.iter().enumerate().take(i) {
            s += chol[(i, j)] * yj;
        }
        let cii = chol[(i, i)];
        if cii > 0.0 {
            d = normal_cdf((lower[i] - s) / cii);
            e = normal_cdf((upper[i] - s) / cii);
        } else {
            // Degenerate coordinate: the constraint is deterministic given the
            // previous ones.
            if s < lower[i] || s > upper[i] {
                return 0.0;
            }
            d = 0.0;
            e = 1.0;
        }
        f *= (e - d).max(0.0);
        if f == 0.0 {
            return 0.0;
        }
    }
    f
}
