/// Scientific notation with nine significant digits.
pub fn fmt_value(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn fmt_prob(p: f64) -> String {
    fmt_value(p)
}

pub fn fmt_opt_prob(p: Option<f64>) -> String {
    p.map(fmt_value).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_value(0.0155), "1.55000000e-2");
        assert_eq!(fmt_value(15.0), "1.50000000e1");
        assert_eq!(fmt_value(1.0 / 3.0), "3.33333333e-1");
        assert_eq!(fmt_opt_prob(None), "");
    }
}
