//! Shared pieces of the JSON reports.

use serde::Serialize;

use crate::cyclo::CycNum;

/// `a+bi` with 15 significant digits; tiny components print as zero.
pub fn format_complex(re: f64, im: f64) -> String {
    let clean = |x: f64| if x.abs() < 1e-9 { 0.0 } else { x };
    let (re, im) = (clean(re), clean(im));
    let sign = if im < 0.0 { '-' } else { '+' };
    format!("{:.14e}{}{:.14e}i", re, sign, im.abs())
}

/// Exact cyclotomic value plus an advisory complex approximation.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CycSummary {
    pub cyclotomic: String,
    pub complex: String,
}

impl From<&CycNum> for CycSummary {
    fn from(c: &CycNum) -> Self {
        let (re, im) = c.to_complex();
        CycSummary {
            cyclotomic: format!("{} (z = zeta_{})", c.render(), c.conductor()),
            complex: format_complex(re, im),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_text() {
        assert_eq!(format_complex(1.0, 0.0), "1.00000000000000e0+0.00000000000000e0i");
        assert_eq!(format_complex(-0.5, -2.0), "-5.00000000000000e-1-2.00000000000000e0i");
        assert_eq!(format_complex(1e-13, -1e-13), format_complex(0.0, 0.0));
    }
}
