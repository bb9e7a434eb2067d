//! Upward rounding of reported bounds.
//!
//! Every printed bound must stay a valid upper bound, so cells are rounded
//! toward +∞ at the requested precision. The result is produced as a decimal
//! string so that no binary rounding sneaks back in.

/// Smallest integer `c` with `x ≤ c / 10^decimals`.
fn ceil_scaled(x: f64, decimals: i32) -> i128 {
    let scale = 10f64.powi(decimals);
    let mut c = (x * scale).ceil() as i128;
    // The product can be off by one ulp in either direction.
    while (c - 1) as f64 / scale >= x {
        c -= 1;
    }
    while (c as f64) / scale < x {
        c += 1;
    }
    c
}

fn render(c: i128, decimals: usize) -> String {
    let neg = c < 0;
    let digits = c.unsigned_abs().to_string();
    let padded = format!("{digits:0>width$}", width = decimals + 1);
    let (int, frac) = padded.split_at(padded.len() - decimals);
    let sign = if neg { "-" } else { "" };
    if decimals == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// `x` rounded upward to `decimals` places, as text.
pub fn round_up_str(x: f64, decimals: usize) -> String {
    render(ceil_scaled(x, decimals as i32), decimals)
}

/// `x` rounded upward to `decimals` places.
pub fn round_up(x: f64, decimals: usize) -> f64 {
    round_up_str(x, decimals).parse().expect("rendered decimal parses")
}

/// Upward rounding to `sig` significant digits, returned as mantissa text
/// and decimal exponent, e.g. `("8.4300", -3)`.
pub fn round_up_sig(x: f64, sig: usize) -> (String, i32) {
    assert!(x > 0.0 && sig >= 1);
    let mut exp = x.log10().floor() as i32;
    loop {
        let decimals = sig as i32 - 1 - exp;
        let c = ceil_scaled(x, decimals);
        // Rounding up may carry into a new leading digit.
        if c.unsigned_abs().to_string().len() > sig {
            exp += 1;
            continue;
        }
        let mantissa = render(c, (sig - 1) as usize);
        return (mantissa, exp);
    }
}

/// `round_up_sig` in `m·10^e` notation, e.g. `8.4300e-3`.
pub fn round_up_sig_str(x: f64, sig: usize) -> String {
    let (m, e) = round_up_sig(x, sig);
    format!("{m}e{e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_places() {
        assert_eq!(round_up_str(0.168933, 5), "0.16894");
        assert_eq!(round_up_str(0.192, 5), "0.19200");
        assert_eq!(round_up_str(5.0 / 59.0, 5), "0.08475");
        assert_eq!(round_up_str(2.81342, 5), "2.81342");
        assert_eq!(round_up_str(0.000001, 5), "0.00001");
        assert_eq!(round_up_str(0.0, 5), "0.00000");
        assert_eq!(round_up_str(1.5, 0), "2");
        assert_eq!(round_up(0.0408977, 5), 0.0409);
    }

    #[test]
    fn exact_decimals_stay_put() {
        for v in ["0.5", "0.25", "0.19200", "1.00000"] {
            let x: f64 = v.parse().unwrap();
            assert_eq!(round_up_str(x, 5).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn significant_digits() {
        assert_eq!(round_up_sig(8.43e-3, 5), ("8.4300".to_string(), -3));
        assert_eq!(round_up_sig(9.99991e-3, 4), ("1.000".to_string(), -2));
        assert_eq!(round_up_sig_str(1.2185993e-3, 7), "1.218600e-3");
        assert_eq!(round_up_sig_str(3.4e-9, 2), "3.4e-9");
    }
}
