//! CSV tables and JSON records.

use serde::Serialize;

use crate::verify::SweepRow;

pub const CSV_HEADER: &str = "kappa,dim,radius,alpha,lambda1,lambda2,sigma1,source,residual";

/// Shortest of fixed or scientific notation with `digits` significant
/// digits, trailing zeros removed (like C's `%.{digits}g`).
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        return format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Fixed notation with 12 decimals; negative zero prints as zero.
pub fn fmt_value(x: f64) -> String {
    let s = format!("{x:.12}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

pub fn csv_table(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let f = |x: f64| fmt_sig(x, 15);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            f(r.kappa),
            r.dim,
            f(r.radius),
            f(r.alpha),
            f(r.lambda1),
            f(r.lambda2),
            f(r.sigma1),
            r.source,
            f(r.residual)
        ));
    }
    out
}

/// JSON document with the tool version and a hash of the inputs.
#[derive(Debug, Serialize)]
pub struct Record<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config_hash: String,
    #[serde(flatten)]
    pub body: T,
}

impl<'a, T: Serialize> Record<'a, T> {
    pub fn new(command: &'a str, config_hash: String, body: T) -> Self {
        Record { tool: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION"), command, config_hash, body }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("records serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(3.38995771668244, 15), "3.38995771668244");
        assert_eq!(fmt_sig(-0.5, 15), "-0.5");
        assert_eq!(fmt_sig(1e-12, 15), "1e-12");
        assert_eq!(fmt_sig(123456.0, 15), "123456");
        assert_eq!(fmt_sig(1.0 / 3.0, 15), "0.333333333333333");
        assert_eq!(fmt_sig(2.5e20, 15), "2.5e+20");
        assert_eq!(fmt_sig(0.0, 15), "0");
        assert_eq!(fmt_sig(f64::NAN, 15), "nan");
    }

    #[test]
    fn fifteen_digits_round_trip_closely() {
        for x in [std::f64::consts::PI, -1.234567890123456e-7, 98765.43210987654] {
            let y: f64 = fmt_sig(x, 15).parse().unwrap();
            assert!((x - y).abs() <= 1e-14 * x.abs());
        }
    }

    #[test]
    fn value_format_suppresses_negative_zero() {
        assert_eq!(fmt_value(-1e-15), "0.000000000000");
        assert_eq!(fmt_value(3.38995771668244), "3.389957716682");
        assert_eq!(fmt_value(-0.25), "-0.250000000000");
    }
}
