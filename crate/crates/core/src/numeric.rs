//! Small 1-D solvers used by the discord kernel and the threshold search.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Golden-section search for a minimum of `f` on `[a, b]`, stopping when the
/// bracket is narrower than `tol`. Returns `(x, f(x))`.
pub fn golden_section_min<T: Real, F: FnMut(T) -> T>(mut f: F, mut a: T, mut b: T, tol: T) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    // ~ log(tol / width) / log(inv_phi) iterations; the cap only guards NaN input.
    for _ in 0..200 {
        if (b - a).abs() < tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Bisection for a sign change of `f` on `[lo, hi]` down to `|hi − lo| < tol`.
pub fn bisect<F: FnMut(f64) -> Result<f64>>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::BracketFailure {
            what: "objective".into(),
            lo,
            hi,
        });
    }
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, fx) = golden_section_min(|x: f64| (x - 0.3).powi(2) + 1.0, 0.0, 1.0, 1e-10);
        // The objective is flat to machine precision within ~1e-8 of the minimum.
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn golden_handles_endpoint_minimum() {
        let (x, _) = golden_section_min(|x: f64| x, 0.0, 1.0, 1e-10);
        assert!(x < 1e-9);
    }

    #[test]
    fn bisect_linear_crossing() {
        // cl_min = 1 − b against z_max = b
        let root = bisect(|b| Ok((1.0 - b) - b), 0.0, 1.0, 1e-4).unwrap();
        assert_eq!(root, 0.5);
        let root = bisect(|b| Ok((0.9 - b) - b), 0.0, 1.0, 1e-4).unwrap();
        assert!((root - 0.45).abs() < 1e-4);
    }

    #[test]
    fn bisect_reports_missing_sign_change() {
        assert!(matches!(
            bisect(|b| Ok(b + 1.0), 0.0, 1.0, 1e-4),
            Err(Error::BracketFailure { .. })
        ));
    }
}
