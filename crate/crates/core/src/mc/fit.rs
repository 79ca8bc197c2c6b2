use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Ordinary least squares line `y ≈ intercept + slope · x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
    pub residual_sd: f64,
    /// Residual degrees of freedom, `points - 2`.
    pub df: usize,
}

impl LinearFit {
    /// Two-sided confidence interval of the slope at `level` (e.g. 0.95).
    /// Unbounded without residual degrees of freedom.
    pub fn slope_ci(&self, level: f64) -> Result<(f64, f64)> {
        if self.df == 0 {
            return Ok((f64::NEG_INFINITY, f64::INFINITY));
        }
        let t = student_t_quantile(0.5 + level / 2.0, self.df as f64)?;
        Ok((
            self.slope - t * self.slope_stderr,
            self.slope + t * self.slope_stderr,
        ))
    }
}

pub fn ols(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::SizeMismatch(format!(
            "{} abscissae for {} ordinates",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "a line fit needs at least two points".into(),
        ));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidParameter("abscissae do not vary".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let df = n - 2;
    let (residual_sd, slope_stderr, intercept_stderr) = if df > 0 {
        let s = (sse / df as f64).sqrt();
        (s, s / sxx.sqrt(), s * (1.0 / nf + mx * mx / sxx).sqrt())
    } else {
        (0.0, f64::NAN, f64::NAN)
    };
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr,
        intercept_stderr,
        residual_sd,
        df,
    })
}

/// Quantile of Student's t distribution with `df` degrees of freedom.
pub fn student_t_quantile(p: f64, df: f64) -> Result<f64> {
    let t = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::InvalidParameter(format!("t distribution: {e}")))?;
    Ok(t.inverse_cdf(p))
}
