//! Decimal formatting with 17 significant digits, enough to round-trip any
//! `f64`. Trailing zeros after the decimal point are dropped.

pub fn full_precision(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci.rsplit_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    let decimals = (16 - exp).max(0) as usize;
    let mut out = format!("{x:.decimals$}");
    if out.contains('.') {
        let trimmed = out.trim_end_matches('0').trim_end_matches('.').len();
        out.truncate(trimmed);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(full_precision(75.0), "75");
        assert_eq!(full_precision(0.02), "0.02");
        assert_eq!(full_precision(0.1), "0.10000000000000001");
        assert_eq!(full_precision(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(full_precision(0.0), "0");
        assert_eq!(full_precision(-2.5), "-2.5");
        assert_eq!(full_precision(f64::INFINITY), "inf");
    }

    proptest! {
        #[test]
        fn round_trips(x in -1e12f64..1e12) {
            prop_assert_eq!(full_precision(x).parse::<f64>().unwrap(), x);
        }
    }
}
