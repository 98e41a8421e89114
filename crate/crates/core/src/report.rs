//! Output formats: the sweep CSV, the per-article simulation CSV, and the
//! plain-text scenario report.

use std::cmp::Ordering;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::SweepCell;
use crate::scenario::{journal_label, JournalBreakdown, Rational, ScenarioResults};
use crate::simulation::SimulationOutcome;

/// Bumped whenever sweep CSV columns change.
pub const SWEEP_SCHEMA_VERSION: u32 = 1;

pub const SWEEP_COLUMNS: [&str; 13] = [
    "schema_version",
    "sigma_r2",
    "sigma_c2",
    "sigma_v2",
    "m",
    "n",
    "alpha",
    "indicator",
    "weight_if",
    "runs",
    "accuracy_mean",
    "accuracy_stderr",
    "master_seed",
];

pub const SIMULATION_COLUMNS: [&str; 4] = ["article_id", "journal", "value", "citations"];

fn row_order(a: &SweepCell, b: &SweepCell) -> Ordering {
    a.sigma_r2
        .total_cmp(&b.sigma_r2)
        .then(a.m.cmp(&b.m))
        .then(a.indicator.kind_rank().cmp(&b.indicator.kind_rank()))
        .then(a.weight_if().total_cmp(&b.weight_if()))
        .then(a.sigma_c2.total_cmp(&b.sigma_c2))
}

/// Header plus one row per cell, sorted by
/// `(sigma_r2, m, indicator, weight_if, sigma_c2)`. Reals use six decimals.
pub fn emit_sweep_csv<W: Write>(cells: &[SweepCell], mut out: W) -> Result<()> {
    if cells.is_empty() {
        return Err(Error::param("cells", "nothing to write"));
    }
    let mut rows: Vec<&SweepCell> = cells.iter().collect();
    rows.sort_by(|a, b| row_order(a, b));

    writeln!(out, "{}", SWEEP_COLUMNS.join(","))?;
    for c in rows {
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{},{},{:.6},{},{:.6},{},{:.6},{:.6},{}",
            SWEEP_SCHEMA_VERSION,
            c.sigma_r2,
            c.sigma_c2,
            c.sigma_v2,
            c.m,
            c.n,
            c.alpha,
            c.indicator.name(),
            c.weight_if(),
            c.runs,
            c.accuracy_mean,
            c.accuracy_stderr,
            c.master_seed,
        )?;
    }
    out.flush()?;
    Ok(())
}

/// One row per article in id order. Reals use the shortest representation
/// that parses back to the same `f64`.
pub fn emit_simulation_csv<W: Write>(outcome: &SimulationOutcome, mut out: W) -> Result<()> {
    let mut articles: Vec<_> = outcome.articles.iter().collect();
    articles.sort_by_key(|a| a.id);
    writeln!(out, "{}", SIMULATION_COLUMNS.join(","))?;
    for a in articles {
        writeln!(out, "{},{},{},{}", a.id, a.journal, a.value, a.citations)?;
    }
    out.flush()?;
    Ok(())
}

/// Renders `x` in decimal: exactly when it terminates within `max_decimals`
/// digits, otherwise rounded half away from zero to `max_decimals`.
pub fn format_rational(x: &Rational, max_decimals: u32) -> String {
    let mut scale = 1i128;
    let mut digits = 0;
    while digits < max_decimals && !(x * scale).is_integer() {
        scale *= 10;
        digits += 1;
    }
    let scaled = (x * scale).round().to_integer();
    let sign = if scaled < 0 { "-" } else { "" };
    let (int, frac) = (scaled.abs() / scale, scaled.abs() % scale);
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac:0width$}", width = digits as usize)
    }
}

/// Fixed number of decimals, for percentages.
fn format_fixed(x: &Rational, decimals: u32) -> String {
    let scale = 10i128.pow(decimals);
    let scaled = (x * scale).round().to_integer();
    let sign = if scaled < 0 { "-" } else { "" };
    let (int, frac) = (scaled.abs() / scale, scaled.abs() % scale);
    if decimals == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac:0width$}", width = decimals as usize)
    }
}

fn table<W: Write>(out: &mut W, header: &[&str], rows: &[(&str, Vec<String>)]) -> io::Result<()> {
    const LABEL: usize = 12;
    const CELL: usize = 14;
    write!(out, "{:<LABEL$}", "")?;
    for h in header {
        write!(out, "{h:>CELL$}")?;
    }
    writeln!(out)?;
    for (label, cells) in rows {
        write!(out, "{label:<LABEL$}")?;
        for c in cells {
            write!(out, "{c:>CELL$}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn journal_table<W: Write>(out: &mut W, b: &JournalBreakdown) -> io::Result<()> {
    let f = |x: Rational| format_rational(&x, 6);
    table(
        out,
        &["Lowly cited", "Highly cited", "Total"],
        &[
            (
                "Low value",
                vec![
                    f(b.low_value_lowly_cited),
                    f(b.low_value_highly_cited),
                    f(b.low_value_total()),
                ],
            ),
            (
                "High value",
                vec![
                    f(b.high_value_lowly_cited),
                    f(b.high_value_highly_cited),
                    f(b.high_value_total()),
                ],
            ),
            (
                "Total",
                vec![
                    f(b.lowly_cited_total()),
                    f(b.highly_cited_total()),
                    f(b.total()),
                ],
            ),
        ],
    )
}

/// Probability table, one breakdown table per journal, then both accuracies.
/// The last line reads `IF selection: X%  citation selection: Y%`.
pub fn emit_scenario_report<W: Write>(results: &ScenarioResults, mut out: W) -> Result<()> {
    let s = &results.scenario;
    let one = Rational::from_integer(1);
    let p = |x: Rational| format_rational(&x, 6);

    writeln!(out, "Probability of being lowly or highly cited, by value")?;
    table(
        &mut out,
        &["Lowly cited", "Highly cited"],
        &[
            ("Low value", vec![p(one - s.r), p(s.r)]),
            ("High value", vec![p(one - s.q), p(s.q)]),
        ],
    )?;

    for (i, b) in results.breakdown.journals.iter().enumerate() {
        writeln!(out)?;
        writeln!(out, "Journal {}", journal_label(i))?;
        journal_table(&mut out, b)?;
    }

    let totals = results.breakdown.totals();
    writeln!(out)?;
    let ranking: Vec<String> = results.ranking.iter().map(|&j| journal_label(j)).collect();
    writeln!(out, "IF ranking: {}", ranking.join(" > "))?;
    writeln!(
        out,
        "IF rule selects {} articles; citation rule selects {} highly cited articles",
        results.select_count,
        p(totals.highly_cited_total()),
    )?;
    let pct = |x: &Rational| format_fixed(x, 1);
    writeln!(
        out,
        "IF selection: {}%  citation selection: {}%",
        pct(&results.if_accuracy),
        pct(&results.citation_accuracy)
    )?;
    out.flush()?;
    Ok(())
}

/// Writes `bytes` to `path` through a sibling temporary file and a rename, so
/// a failed write never leaves a partial file behind.
pub fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path.file_name().ok_or_else(|| {
        io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name")
    })?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = fs::write(&tmp, bytes).and_then(|()| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

/// Renders into memory first; `None` means stdout.
pub fn deliver(path: Option<&Path>, render: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    render(&mut buf)?;
    match path {
        Some(p) => write_atomically(p, &buf),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(&buf)?;
            lock.flush()?;
            Ok(())
        }
    }
}
