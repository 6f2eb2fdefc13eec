//! Display-only decimal renderings. Never used in a verdict.

use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::RadicalExpr;

pub const SIG_DIGITS: usize = 6;

pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (SIG_DIGITS as i32 - 1 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{:.*e}", SIG_DIGITS - 1, x)
    }
}

pub fn format_rational(q: &BigRational) -> String {
    format_f64(q.to_f64().unwrap_or(f64::NAN))
}

/// `sqrt(q)` rendered to six significant digits.
pub fn format_sqrt(q: &BigRational) -> String {
    match RadicalExpr::sqrt(BigRational::from_integer(1.into()), q.clone()) {
        Ok(e) => format_f64(e.approx_f64()),
        Err(_) => "NaN".into(),
    }
}
