//! Ordinary least-squares line fits.

use crate::error::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square of the residuals.
    pub residual_rms: f64,
    /// Standard error of the slope (zero for exact fits or two points).
    pub slope_stderr: f64,
    pub points: usize,
}

/// Least-squares fit of `y = slope * x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::Fit("abscissa and ordinate lengths differ".into()));
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::Fit("need at least two points".into()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Fit("non-finite sample".into()));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= f64::EPSILON * nf * (1.0 + mx * mx) {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let slope_stderr = if n > 2 {
        (ss_res / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LineFit {
        slope,
        intercept,
        residual_rms: (ss_res / nf).sqrt(),
        slope_stderr,
        points: n,
    })
}

/// Fit `log v = slope * log t + c`. All coordinates must be positive.
pub fn log_log_fit(ts: &[f64], vs: &[f64]) -> Result<LineFit> {
    if ts.iter().chain(vs).any(|v| !(*v > 0.0)) {
        return Err(Error::Domain("log-log fit needs positive values".into()));
    }
    let lx: alloc::vec::Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ly: alloc::vec::Vec<f64> = vs.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let f = linear_fit(&[0.0, 1.0, 2.0, 3.0], &[1.0, 3.0, 5.0, 7.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14);
        assert!((f.intercept - 1.0).abs() < 1e-14);
        assert!(f.residual_rms < 1e-14);
    }

    #[test]
    fn degenerate_abscissae() {
        assert!(matches!(
            linear_fit(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0]),
            Err(Error::Fit(_))
        ));
    }

    #[test]
    fn log_log_rejects_nonpositive() {
        assert!(matches!(
            log_log_fit(&[1.0, 2.0, 3.0], &[1.0, 0.0, 1.0]),
            Err(Error::Domain(_))
        ));
    }
}
