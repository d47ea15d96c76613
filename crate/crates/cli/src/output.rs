//! CSV, JSON and SVG rendering of sweep tables.

use std::fmt::Write as _;

use anyhow::Result;
use islocc_core::scan::{BellRegionRow, SweepRecord, ThresholdResult};
use serde::Serialize;

pub const SWEEP_HEADER: [&str; 10] =
    ["p", "l", "lprime", "theta", "statistics", "indist", "concurrence", "eof", "p_lr", "bell"];
pub const BELL_HEADER: [&str; 4] = ["p", "indist", "bell", "violated"];
pub const THRESHOLD_HEADER: [&str; 5] = ["indist", "l", "worst_p", "worst_bell", "min_concurrence"];

const DIGITS: usize = 12;

/// `%.12g`: 12 significant digits, trailing zeros trimmed, scientific
/// notation outside `[1e-4, 1e12)`.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= DIGITS as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// The value a 12-digit CSV cell reads back as.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        fmt_g(x).parse().expect("formatted float parses")
    } else {
        x
    }
}

fn cell(x: Option<f64>) -> String {
    x.map(fmt_g).unwrap_or_default()
}

/// Rounds every float to what the CSV encodes, so JSON and CSV agree.
pub fn rounded(r: &SweepRecord) -> SweepRecord {
    let o = |x: Option<f64>| x.map(round_sig);
    SweepRecord {
        p: round_sig(r.p),
        l: round_sig(r.l),
        lprime: round_sig(r.lprime),
        theta: round_sig(r.theta),
        statistics: r.statistics,
        indist: o(r.indist),
        concurrence: o(r.concurrence),
        eof: o(r.eof),
        p_lr: round_sig(r.p_lr),
        bell: o(r.bell),
    }
}

fn csv_string<F>(header: &[&str], rows: usize, mut row: F) -> Result<String>
where
    F: FnMut(usize) -> Vec<String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for i in 0..rows {
        w.write_record(row(i))?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)?)
}

pub fn sweep_csv(records: &[SweepRecord]) -> Result<String> {
    csv_string(&SWEEP_HEADER, records.len(), |i| {
        let r = &records[i];
        vec![
            fmt_g(r.p),
            fmt_g(r.l),
            fmt_g(r.lprime),
            fmt_g(r.theta),
            r.statistics.to_string(),
            cell(r.indist),
            cell(r.concurrence),
            cell(r.eof),
            fmt_g(r.p_lr),
            cell(r.bell),
        ]
    })
}

pub fn bell_csv(rows: &[BellRegionRow]) -> Result<String> {
    csv_string(&BELL_HEADER, rows.len(), |i| {
        let r = &rows[i];
        vec![fmt_g(r.p), cell(r.indist), cell(r.bell), r.violated.to_string()]
    })
}

pub fn threshold_csv(result: Option<&ThresholdResult>) -> Result<String> {
    match result {
        Some(t) => csv_string(&THRESHOLD_HEADER, 1, |_| {
            [t.indist, t.l, t.worst_p, t.worst_bell, t.min_concurrence].into_iter().map(fmt_g).collect()
        }),
        None => Ok("none\n".into()),
    }
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn rounded_bell(r: &BellRegionRow) -> BellRegionRow {
    BellRegionRow { p: round_sig(r.p), indist: r.indist.map(round_sig), bell: r.bell.map(round_sig), violated: r.violated }
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn frame(svg: &mut String, title: &str, x_label: &str, y_label: &str) {
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let (x0, y0, x1, y1) = (MARGIN, H - MARGIN, W - MARGIN, MARGIN);
    let _ = writeln!(svg, r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" stroke="black" fill="none"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{title}</text>"#, W / 2.0, MARGIN / 2.0);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#, W / 2.0, H - 15.0);
    let _ = writeln!(svg, r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">{y_label}</text>"#, H / 2.0, H / 2.0);
    for (v, anchor) in [(0.0, "start"), (1.0, "end")] {
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="{anchor}">{v}</text>"#, sx(v), y0 + 15.0);
    }
}

fn sx(x: f64) -> f64 {
    MARGIN + x.clamp(0.0, 1.0) * (W - 2.0 * MARGIN)
}

fn sy(y: f64, max: f64) -> f64 {
    H - MARGIN - (y / max).clamp(0.0, 1.0) * (H - 2.0 * MARGIN)
}

/// Concurrence against `p`, one polyline per outer grid value.
pub fn sweep_svg(records: &[SweepRecord]) -> String {
    let mut svg = String::new();
    frame(&mut svg, "concurrence vs noise", "p", "C");
    let mut series: Vec<(f64, f64, Vec<(f64, f64)>)> = Vec::new();
    for r in records {
        let fresh = series.last().is_none_or(|s| (s.0, s.1) != (r.l, r.lprime));
        if fresh {
            series.push((r.l, r.lprime, Vec::new()));
        }
        if let (Some(c), Some(s)) = (r.concurrence, series.last_mut()) {
            s.2.push((r.p, c));
        }
    }
    for (k, (l, lp, pts)) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let path: Vec<String> = pts.iter().map(|&(p, c)| format!("{:.2},{:.2}", sx(p), sy(c, 1.0))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{colour}" points="{}"><title>l={} l'={}</title></polyline>"#,
            path.join(" "),
            fmt_g(*l),
            fmt_g(*lp)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Cells coloured by Bell value, violations outlined.
pub fn bell_svg(rows: &[BellRegionRow]) -> String {
    let mut svg = String::new();
    frame(&mut svg, "Bell function", "p", "I_LR");
    let mut ps: Vec<f64> = rows.iter().map(|r| r.p).collect();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    let mut is: Vec<f64> = rows.iter().filter_map(|r| r.indist).collect();
    is.sort_by(f64::total_cmp);
    is.dedup();
    let cw = (W - 2.0 * MARGIN) / ps.len().max(1) as f64;
    let ch = (H - 2.0 * MARGIN) / is.len().max(1) as f64;
    for r in rows {
        let (Some(i), Some(b)) = (r.indist, r.bell) else { continue };
        let col = ps.partition_point(|&x| x < r.p) as f64;
        let row = is.partition_point(|&x| x < i) as f64;
        let shade = (255.0 * (1.0 - b / (2.0 * std::f64::consts::SQRT_2))).clamp(0.0, 255.0) as u8;
        let stroke = if r.violated { r##" stroke="#d62728""## } else { "" };
        let _ = writeln!(
            svg,
            r#"<rect x="{:.2}" y="{:.2}" width="{cw:.2}" height="{ch:.2}" fill="rgb({shade},{shade},255)"{stroke}/>"#,
            MARGIN + col * cw,
            H - MARGIN - (row + 1.0) * ch,
        );
    }
    svg.push_str("</svg>\n");
    svg
}
