//! Fixed-width number formatting and plain-text tables.

/// Twelve significant digits, fixed notation for exponents in `-5..12` and
/// scientific otherwise. Trailing zeros are kept so columns diff cleanly.
pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0.00000000000".into();
    }
    let sci = format!("{x:.11e}");
    // The exponent is taken after rounding, so 9.9999999999996 counts as 10.
    let (_, exponent) = sci.split_once('e').expect("scientific format");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if !(-5..12).contains(&exponent) {
        return sci;
    }
    let decimals = (11 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(sig12).unwrap_or_default()
}

/// Escapes a CSV field only when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let fields: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Left-aligned columns separated by two spaces.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.5), "0.500000000000");
        assert_eq!(sig12(2f64.sqrt() / 2.0), "0.707106781187");
        assert_eq!(sig12(1.0), "1.00000000000");
        assert_eq!(sig12(-12.5), "-12.5000000000");
        assert_eq!(sig12(9.9999999999996), "10.0000000000");
        assert_eq!(sig12(1.5e-7), "1.50000000000e-7");
        assert_eq!(sig12(0.0), "0.00000000000");
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv(&["x", "y"], &[vec!["1".into(), "2".into()]]), "x,y\n1,2\n");
    }

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(table(&["a", "bb"], &[]), "a  bb\n");
    }
}
