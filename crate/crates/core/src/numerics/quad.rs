//! Adaptive quadrature and bracketing root finding.

use crate::error::{Error, Result};

/// Adaptive Simpson integration of `f` over [a, b] to absolute accuracy `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Numeric("integration bounds must be finite".into()));
    }
    if a > b {
        return Err(Error::Numeric(format!("integration requires a <= b, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Numeric(format!("integrand returned {y} at x = {x}")))
        }
    };
    let fa = eval(a)?;
    let fb = eval(b)?;
    let m = 0.5 * (a + b);
    let fm = eval(m)?;
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(&eval, a, b, fa, fm, fb, whole, tol, 60)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> Result<f64>>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    // Stop when the interval can no longer be resolved in f64.
    if b - a <= f64::EPSILON * (a.abs() + b.abs() + 1.0) {
        return Ok(whole);
    }
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol || depth == 0 {
        // Richardson extrapolation term.
        return Ok(left + right + err / 15.0);
    }
    let half = 0.5 * tol;
    Ok(adaptive(f, a, m, fa, flm, fm, left, half, depth - 1)?
        + adaptive(f, m, b, fm, frm, fb, right, half, depth - 1)?)
}

/// Root of `f` inside the bracket [lo, hi] (Brent's method: bisection with
/// secant/inverse-quadratic acceleration). Requires a sign change over the
/// bracket; returns x with bracket width at most `tol`.
pub fn find_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if !(fa.is_finite() && fb.is_finite()) {
        return Err(Error::Numeric("function not finite at bracket endpoints".into()));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::Bracket(format!(
            "no sign change over [{lo}, {hi}]: f = ({fa}, {fb})"
        )));
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut bisected = true;

    for _ in 0..200 {
        if fb == 0.0 || (b - a).abs() <= tol {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            // Inverse quadratic interpolation.
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            // Secant.
            b - fb * (b - a) / (fb - fa)
        };
        let lo_s = 0.25 * (3.0 * a + b);
        let between = (s - lo_s) * (s - b) < 0.0;
        let step_ok = if bisected {
            (s - b).abs() < 0.5 * (b - c).abs() && (b - c).abs() > tol
        } else {
            (s - b).abs() < 0.5 * d.abs() && d.abs() > tol
        };
        if !between || !step_ok {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s);
        if !fs.is_finite() {
            return Err(Error::Numeric(format!("function returned {fs} at x = {s}")));
        }
        d = b - c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Ok(b)
}
