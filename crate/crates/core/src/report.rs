//! Deterministic number formatting and the per-n fidelity report.

use crate::error::Result;
use crate::fidelity::FidelityReport;

/// Format with 16 significant digits, scientific notation for |x| < 1e-4,
/// locale-independent decimal point. Identical input bits give identical
/// bytes.
pub fn format_sig16(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return format!("{:.15e}", 0.0_f64);
    }
    if x.abs() < 1e-4 {
        return format!("{x:.15e}");
    }
    // Exponent taken from the exact scientific rendering.
    let sci = format!("{x:e}");
    let exp: i32 = sci
        .split('e')
        .nth(1)
        .expect("scientific format has an exponent")
        .parse()
        .expect("exponent parses");
    let decimals = (15 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Column order of the table output; shared by the CSV header, the CSV
/// rows, and the JSON keys.
pub const REPORT_COLUMNS: [&str; 12] = [
    "n",
    "theta",
    "mu_n",
    "lambda_n",
    "f_opt",
    "f_v",
    "f_uniform",
    "lower_bound",
    "upper_bound",
    "asymptotic_f_opt",
    "p_u_plus",
    "p_v_plus",
];

pub fn csv_header() -> String {
    REPORT_COLUMNS.join(",")
}

pub fn csv_row(report: &FidelityReport) -> String {
    let mut fields = vec![report.n.to_string()];
    fields.extend(report.numeric_fields().iter().map(|v| format_sig16(*v)));
    fields.join(",")
}

/// One JSON object per report, numeric values at 16 significant digits.
pub fn json_object(report: &FidelityReport) -> String {
    let mut parts = vec![format!("\"n\":{}", report.n)];
    for (name, value) in REPORT_COLUMNS[1..].iter().zip(report.numeric_fields()) {
        parts.push(format!("\"{name}\":{}", format_sig16(value)));
    }
    format!("{{{}}}", parts.join(","))
}

/// Full CSV table (header plus one row per n).
pub fn csv_table(n_min: usize, n_max: usize) -> Result<String> {
    let mut out = csv_header();
    out.push('\n');
    for n in n_min..=n_max {
        out.push_str(&csv_row(&crate::fidelity::report(n)?));
        out.push('\n');
    }
    Ok(out)
}

/// JSON array of report objects.
pub fn json_table(n_min: usize, n_max: usize) -> Result<String> {
    let mut rows = Vec::with_capacity(n_max - n_min + 1);
    for n in n_min..=n_max {
        rows.push(json_object(&crate::fidelity::report(n)?));
    }
    Ok(format!("[{}]", rows.join(",")))
}

/// Parse one CSV row back into its numeric fields (n plus the 11 values).
pub fn parse_csv_row(row: &str) -> Option<(usize, Vec<f64>)> {
    let mut fields = row.split(',');
    let n: usize = fields.next()?.parse().ok()?;
    let values: Option<Vec<f64>> = fields.map(|f| f.parse().ok()).collect();
    let values = values?;
    if values.len() == REPORT_COLUMNS.len() - 1 {
        Some((n, values))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_is_sixteen_significant_digits() {
        assert_eq!(format_sig16(0.5), "0.5000000000000000");
        assert_eq!(format_sig16(1.0), "1.000000000000000");
        assert_eq!(format_sig16(2.0 / 3.0), "0.6666666666666666");
        assert_eq!(format_sig16(123.456), "123.4560000000000");
        assert_eq!(format_sig16(1e-5), "1.000000000000000e-5");
        assert_eq!(format_sig16(-3.25e-7), "-3.250000000000000e-7");
        assert_eq!(format_sig16(0.0), "0.000000000000000e0");
    }

    #[test]
    fn formatting_boundary_at_1e_minus_4() {
        assert_eq!(format_sig16(1e-4), "0.0001000000000000000");
        assert!(format_sig16(9.9e-5).contains('e'));
    }

    #[test]
    fn formatted_values_reparse_to_16_digits() {
        for &x in &[
            0.788675134594813,
            1.0 / 3.0,
            std::f64::consts::PI,
            1.234567890123456e-9,
            0.999999999999999,
        ] {
            let s = format_sig16(x);
            let back: f64 = s.parse().unwrap();
            assert!(
                (back - x).abs() <= 1e-15 * x.abs().max(1e-30),
                "{x} -> {s} -> {back}"
            );
            // Re-formatting the parsed value reproduces the bytes.
            assert_eq!(format_sig16(back), s);
        }
    }

    #[test]
    fn csv_row_round_trip() {
        let report = crate::fidelity::report(3).unwrap();
        let row = csv_row(&report);
        let (n, values) = parse_csv_row(&row).unwrap();
        assert_eq!(n, 3);
        for (parsed, original) in values.iter().zip(report.numeric_fields()) {
            assert_eq!(format_sig16(*parsed), format_sig16(original));
        }
    }

    #[test]
    fn json_object_is_valid_json() {
        let report = crate::fidelity::report(2).unwrap();
        let text = json_object(&report);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["n"], 2);
        assert!((value["f_uniform"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }
}
