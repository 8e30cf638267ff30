//! Distribution tails used for p-values and critical values.

use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};

/// Upper-tail probability `P(X > x)` of a chi-square variable with `df` degrees of freedom.
pub fn chi_square_sf(x: f64, df: usize) -> Result<f64> {
    if df == 0 {
        return Err(Error::InvalidArgument("chi-square needs df >= 1".into()));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::InvalidArgument(format!("chi-square statistic {x} is negative")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(gamma_ur(df as f64 / 2.0, x / 2.0).clamp(0.0, 1.0))
}

/// `z` such that `P(Z > z) = upper_tail` for a standard normal `Z`.
pub fn normal_upper_quantile(upper_tail: f64) -> f64 {
    let normal = Normal::standard();
    // 1 - p loses digits for tiny p; use symmetry instead
    -normal.inverse_cdf(upper_tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn df2_closed_form() {
        for x in [0.1, 1.0, 5.991, 12.0] {
            let p = chi_square_sf(x, 2).unwrap();
            assert!((p - (-x / 2.0f64).exp()).abs() < 1e-14);
        }
        assert!((chi_square_sf(5.991, 2).unwrap() - 0.05).abs() < 1e-4);
    }

    #[test]
    fn endpoints() {
        assert_eq!(chi_square_sf(0.0, 3).unwrap(), 1.0);
        assert_eq!(chi_square_sf(f64::INFINITY, 3).unwrap(), 0.0);
        assert!(chi_square_sf(1e4, 1).unwrap() < 1e-300);
        assert!(chi_square_sf(-1.0, 1).is_err());
        assert!(chi_square_sf(1.0, 0).is_err());
    }

    #[test]
    fn normal_quantiles() {
        assert!((normal_upper_quantile(0.05) - 1.6448536269514722).abs() < 1e-9);
        assert!((normal_upper_quantile(0.025) - 1.959963984540054).abs() < 1e-9);
    }
}
