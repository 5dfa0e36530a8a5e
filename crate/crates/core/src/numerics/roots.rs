use crate::{Error, Result};

const MAX_ITERATIONS: usize = 400;

/// Bracketing root finder: secant proposals, with a bisection step whenever
/// the secant fails to halve the bracket. The bracket is never lost.
pub fn find_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(Error::Bracket {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let mut use_secant = true;
    for _ in 0..MAX_ITERATIONS {
        let width = b - a;
        if width <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        let candidate = if use_secant {
            let s = b - fb * (b - a) / (fb - fa);
            if s > a && s < b {
                s
            } else {
                mid
            }
        } else {
            mid
        };
        let fc = f(candidate);
        if fc == 0.0 {
            return Ok(candidate);
        }
        if fa * fc < 0.0 {
            b = candidate;
            fb = fc;
        } else {
            a = candidate;
            fa = fc;
        }
        use_secant = (b - a) <= 0.5 * width;
        if candidate == mid && !use_secant {
            use_secant = true;
        }
        if a == b || (b - a) < f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}
