//! CSV output with comment preambles and fixed-precision number formatting.

use std::io::{self, Write};

/// Significant digits of every float written to CSV.
pub const SIG_DIGITS: usize = 12;

/// Formats `x` with [`SIG_DIGITS`] significant digits, trailing zeros removed.
/// Plain notation is used for decimal exponents in `[-5, 12)`.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if !(-5..SIG_DIGITS as i32).contains(&exp) {
        let m = trim_fraction(mantissa);
        return format!("{sign}{m}e{exp}");
    }
    let body = if exp >= 0 {
        let split = exp as usize + 1;
        format!("{}.{}", &digits[..split], &digits[split..])
    } else {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    };
    format!("{sign}{}", trim_fraction(&body))
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes `# line` comments, a header row, then rows of equal width.
pub struct CsvWriter<W: Write> {
    inner: W,
    columns: usize,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut inner: W, comments: &[String], header: &[&str]) -> io::Result<Self> {
        for c in comments {
            for line in c.lines() {
                writeln!(inner, "# {line}")?;
            }
        }
        writeln!(inner, "{}", header.join(","))?;
        Ok(Self {
            inner,
            columns: header.len(),
        })
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) -> io::Result<()> {
        assert_eq!(fields.len(), self.columns, "row width must match the header");
        let line: Vec<&str> = fields.iter().map(AsRef::as_ref).collect();
        writeln!(self.inner, "{}", line.join(","))
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.inner.flush()?;
        Ok(self.inner)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.05), "0.05");
        assert_eq!(fmt_sig(-2.5), "-2.5");
        assert_eq!(fmt_sig(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(123456.0), "123456");
        assert_eq!(fmt_sig(1e-7), "1e-7");
        assert_eq!(fmt_sig(2.0f64.powi(50)), "1.12589990684e15");
        assert_eq!(fmt_sig(0.999999999999999), "1");
        assert_eq!(fmt_sig(1.5e-5), "0.000015");
        assert_eq!(fmt_sig(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_layout() {
        let mut w = CsvWriter::new(Vec::new(), &["eqdist 0".into()], &["a", "b"]).unwrap();
        w.row(&["1", "2"]).unwrap();
        let out = String::from_utf8(w.finish().unwrap()).unwrap();
        assert_eq!(out, "# eqdist 0\na,b\n1,2\n");
    }
}
