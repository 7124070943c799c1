//! CSV emission/ingestion, run comparison and a minimal SVG plot.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sweep::{SweepMode, SweepResult, SweepRow};

pub const CSV_HEADER: [&str; 6] = ["mode", "theta_h", "step", "observable", "value", "stderr"];

/// Formats with 12 significant digits, trailing zeros trimmed (like `%.12g`).
pub fn format_sig(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<W: std::io::Write>(result: &SweepResult, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &result.rows {
        w.write_record([
            r.mode.name().to_string(),
            format_sig(r.theta_h),
            r.step.to_string(),
            r.observable.clone(),
            format_sig(r.value),
            r.stderr.map(format_sig).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(result, std::io::BufWriter::new(file)).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<SweepResult> {
    let mut rdr = csv::Reader::from_reader(input);
    let header_err = |message: String| Error::Parse { line: 1, message };
    let headers = rdr
        .headers()
        .map_err(|e| header_err(e.to_string()))?
        .clone();
    if headers.iter().ne(CSV_HEADER) {
        return Err(header_err(format!(
            "expected header `{}`",
            CSV_HEADER.join(",")
        )));
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let bad = |what: &str, text: &str| Error::Parse {
            line,
            message: format!("invalid {what} `{text}`"),
        };
        let num = |what: &str, text: &str| text.parse::<f64>().map_err(|_| bad(what, text));
        let mode: SweepMode = record[0].parse().map_err(|_| bad("mode", &record[0]))?;
        let stderr = match &record[5] {
            "" => None,
            s => Some(num("stderr", s)?),
        };
        rows.push(SweepRow {
            mode,
            theta_h: num("theta_h", &record[1])?,
            step: record[2].parse().map_err(|_| bad("step", &record[2]))?,
            observable: record[3].to_string(),
            value: num("value", &record[4])?,
            stderr,
        });
    }
    Ok(SweepResult { rows })
}

pub fn load_csv(path: &Path) -> Result<SweepResult> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(std::io::BufReader::new(file))
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyDiff {
    pub key: String,
    pub a: f64,
    pub b: f64,
    pub diff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub diffs: Vec<KeyDiff>,
    pub max_diff: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CompareReport {
    /// Keys whose difference exceeds the tolerance.
    pub fn failures(&self) -> impl Iterator<Item = &KeyDiff> {
        self.diffs
            .iter()
            .filter(|d| d.diff.is_nan() || d.diff > self.tolerance)
    }
}

/// Rows are matched on (θ_h at 12 digits, step, observable); the mode column is
/// ignored so that different engines can be compared directly.
fn keyed(result: &SweepResult, which: &str) -> Result<BTreeMap<(String, usize, String), f64>> {
    let mut map = BTreeMap::new();
    for r in &result.rows {
        let key = (format_sig(r.theta_h), r.step, r.observable.clone());
        if map.insert(key.clone(), r.value).is_some() {
            return Err(Error::validation(format!(
                "{which} run has duplicate key {}; compare single-mode files",
                fmt_key(&key)
            )));
        }
    }
    Ok(map)
}

fn fmt_key((theta, step, obs): &(String, usize, String)) -> String {
    format!("theta_h={theta},step={step},observable={obs}")
}

pub fn compare_results(a: &SweepResult, b: &SweepResult, tolerance: f64) -> Result<CompareReport> {
    if tolerance.is_nan() || tolerance < 0.0 {
        return Err(Error::Usage(format!(
            "tolerance must be >= 0, got {tolerance}"
        )));
    }
    let ka = keyed(a, "first")?;
    let kb = keyed(b, "second")?;
    let only = |x: &BTreeMap<_, f64>, y: &BTreeMap<_, f64>| -> Vec<String> {
        x.keys()
            .filter(|k| !y.contains_key(*k))
            .map(fmt_key)
            .collect()
    };
    let (only_a, only_b) = (only(&ka, &kb), only(&kb, &ka));
    if !only_a.is_empty() || !only_b.is_empty() {
        return Err(Error::KeyMismatch { only_a, only_b });
    }
    let diffs: Vec<KeyDiff> = ka
        .iter()
        .map(|(k, &va)| {
            let vb = kb[k];
            KeyDiff {
                key: fmt_key(k),
                a: va,
                b: vb,
                diff: (va - vb).abs(),
            }
        })
        .collect();
    // NaN differences propagate as failures.
    let max_diff = diffs.iter().map(|d| d.diff).fold(0.0, |m: f64, d| {
        if d.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            m.max(d)
        }
    });
    Ok(CompareReport {
        pass: max_diff <= tolerance,
        diffs,
        max_diff,
        tolerance,
    })
}

pub fn compare(run_a: &Path, run_b: &Path, tolerance: f64) -> Result<CompareReport> {
    compare_results(&load_csv(run_a)?, &load_csv(run_b)?, tolerance)
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

/// One polyline per (mode, observable). With several θ_h values the x axis is
/// θ_h at each series' final step; otherwise it is the step index.
pub fn render_svg(result: &SweepResult) -> String {
    let thetas: BTreeSet<u64> = result.rows.iter().map(|r| r.theta_h.to_bits()).collect();
    let vs_theta = thetas.len() > 1;

    let mut series: BTreeMap<(SweepMode, String), Vec<&SweepRow>> = BTreeMap::new();
    for r in &result.rows {
        series
            .entry((r.mode, r.observable.clone()))
            .or_default()
            .push(r);
    }
    let curves: Vec<(String, Vec<(f64, f64)>)> = series
        .into_iter()
        .map(|((mode, obs), rows)| {
            let pts = if vs_theta {
                let last = rows.iter().map(|r| r.step).max().unwrap_or(0);
                rows.iter()
                    .filter(|r| r.step == last)
                    .map(|r| (r.theta_h, r.value))
                    .collect()
            } else {
                rows.iter().map(|r| (r.step as f64, r.value)).collect()
            };
            (format!("{mode} {obs}"), pts)
        })
        .collect();

    let all = curves
        .iter()
        .flat_map(|(_, p)| p.iter())
        .filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }

    let (w, h, ml, mr, mt, mb) = (720.0, 480.0, 70.0, 200.0, 20.0, 50.0);
    let pw = w - ml - mr;
    let ph = h - mt - mb;
    let sx = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| mt + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            mt + ph + 18.0,
            fmt_tick(xv)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            ml - 6.0,
            py + 4.0,
            fmt_tick(yv)
        );
    }
    let xlabel = if vs_theta { "theta_h" } else { "step" };
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{xlabel}</text>"#,
        ml + pw / 2.0,
        h - 8.0
    );
    for (i, (label, pts)) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = pts
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        let ly = mt + 16.0 * (i as f64 + 1.0);
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
            w - mr + 10.0,
            w - mr + 30.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            w - mr + 36.0,
            ly + 4.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn fmt_tick(v: f64) -> String {
    let t = format!("{v:.3}");
    trim_zeros(&t).to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn emit_plot(result: &SweepResult, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(render_svg(result).as_bytes())
        .map_err(|e| Error::io(path, e))
}
