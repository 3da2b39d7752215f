//! Number formatting and CSV files.

use std::fmt::Write as _;
use std::path::Path;

use coaltm::GridRow;

use crate::error::CliError;

pub const GRID_HEADER: &str = "mu,ntm,mean_loglik,sd_loglik,mean_events,mean_wall_ms,n,repeats,seed";

/// `printf("%.12g")`: 12 significant digits, trailing zeros dropped,
/// exponent form outside `1e-5 <= |x| < 1e12`.
pub fn g12(x: f64) -> String {
    const SIG: usize = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{:.*e}", SIG - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIG as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (SIG as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn timestamp_line() -> String {
    format!(
        "# generated {} by coaltm {}",
        chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        env!("CARGO_PKG_VERSION")
    )
}

pub fn grid_row(row: &GridRow, timing: bool) -> String {
    let wall = if timing { g12(row.mean_wall_ms) } else { "nan".into() };
    format!(
        "{},{},{},{},{},{},{},{},{}",
        g12(row.mu),
        row.ntm,
        g12(row.mean_loglik),
        g12(row.sd_loglik),
        g12(row.mean_events),
        wall,
        row.replicates,
        row.repeats,
        row.seed
    )
}

/// Writes a timestamp comment, the header and the rows.
pub fn write_csv<I>(path: &Path, header: &str, rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = String>,
{
    let mut out = String::new();
    writeln!(out, "{}", timestamp_line()).unwrap();
    writeln!(out, "{header}").unwrap();
    for row in rows {
        writeln!(out, "{row}").unwrap();
    }
    std::fs::write(path, out).map_err(|e| CliError::io(path, e))
}

/// Quotes a CSV field when it contains a comma or quote.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
