//! Phase-diagram figure on a fixed 800x600 canvas.
//!
//! Left: one square per sweep point, kinds on rows and volume fractions on
//! columns; red marks loss of ellipticity, green its absence, grey a failed
//! row. Right: `lambda4` against `theta`, one polyline per kind.

use std::fmt::Write;

use crate::config::SweepKind;
use crate::sweep::PhaseDiagramRow;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;

const LOSS: &str = "#d62728";
const NO_LOSS: &str = "#2ca02c";
const FAILED: &str = "#7f7f7f";
const SERIES: [&str; 5] = ["#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"];

fn fmt_num(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

pub fn render(rows: &[PhaseDiagramRow]) -> String {
    let mut kinds: Vec<SweepKind> = Vec::new();
    for r in rows {
        if !kinds.contains(&r.kind) {
            kinds.push(r.kind);
        }
    }
    let thetas = sorted_unique(rows.iter().map(|r| r.theta).collect());
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // left panel: classification grid
    let (x0, y0, pw, ph) = (110.0, 60.0, 250.0, 440.0);
    let _ = writeln!(s, r#"<text x="{}" y="30" text-anchor="middle" font-size="14">loss of ellipticity</text>"#, x0 + pw / 2.0);
    let cw = pw / thetas.len().max(1) as f64;
    let ch = (ph / kinds.len().max(1) as f64).min(cw);
    for (ki, kind) in kinds.iter().enumerate() {
        let y = y0 + ki as f64 * ch;
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, x0 - 8.0, fmt_num(y + ch / 2.0 + 4.0), kind.as_str());
        for (ti, theta) in thetas.iter().enumerate() {
            let x = x0 + ti as f64 * cw;
            let cell = rows.iter().find(|r| r.kind == *kind && r.theta == *theta);
            let fill = match cell {
                None => continue,
                Some(r) if r.error.is_some() => FAILED,
                Some(r) if r.loss_flag => LOSS,
                Some(_) => NO_LOSS,
            };
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{fill}" stroke="white" stroke-width="2"/>"#,
                fmt_num(x),
                fmt_num(y),
                fmt_num(cw),
                fmt_num(ch)
            );
        }
    }
    let grid_bottom = y0 + kinds.len() as f64 * ch;
    for (ti, theta) in thetas.iter().enumerate() {
        let x = x0 + (ti as f64 + 0.5) * cw;
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, fmt_num(x), fmt_num(grid_bottom + 18.0), fmt_num(*theta));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">theta</text>"#, fmt_num(x0 + pw / 2.0), fmt_num(grid_bottom + 38.0));
    for (i, (label, color)) in [("loss", LOSS), ("no loss", NO_LOSS), ("failed", FAILED)].iter().enumerate() {
        let y = HEIGHT - 60.0 + i as f64 * 18.0;
        let _ = writeln!(s, r#"<rect x="{x0}" y="{}" width="12" height="12" fill="{color}"/>"#, fmt_num(y - 10.0));
        let _ = writeln!(s, r#"<text x="{}" y="{}">{label}</text>"#, x0 + 18.0, fmt_num(y));
    }

    // right panel: lambda4 curves
    let (x0, y0, pw, ph) = (470.0, 60.0, 290.0, 440.0);
    let _ = writeln!(s, r#"<text x="{}" y="30" text-anchor="middle" font-size="14">lambda4 vs theta</text>"#, x0 + pw / 2.0);
    let ok: Vec<&PhaseDiagramRow> = rows.iter().filter(|r| r.error.is_none() && r.lambda4.is_finite()).collect();
    let (mut lo, mut hi) = ok.iter().fold((0.0f64, 0.0f64), |(a, b), r| (a.min(r.lambda4), b.max(r.lambda4)));
    if hi - lo < 1e-12 {
        hi = lo + 1.0;
    }
    let pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    let px = |t: f64| x0 + t * pw;
    let py = |v: f64| y0 + ph - (v - lo) / (hi - lo) * ph;
    let _ = writeln!(s, r#"<rect x="{x0}" y="{y0}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    if lo < 0.0 && hi > 0.0 {
        let _ = writeln!(
            s,
            r##"<line x1="{x0}" y1="{y}" x2="{}" y2="{y}" stroke="#999" stroke-dasharray="4 3"/>"##,
            x0 + pw,
            y = fmt_num(py(0.0))
        );
    }
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, x0 - 6.0, fmt_num(py(v) + 4.0), fmt_num(v));
    }
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, fmt_num(px(t)), y0 + ph + 18.0, fmt_num(t));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">theta</text>"#, x0 + pw / 2.0, y0 + ph + 38.0);
    for (ki, kind) in kinds.iter().enumerate() {
        let color = SERIES[ki % SERIES.len()];
        let mut pts: Vec<&&PhaseDiagramRow> = ok.iter().filter(|r| r.kind == *kind).collect();
        pts.sort_by(|a, b| a.theta.total_cmp(&b.theta));
        let coords: Vec<String> = pts.iter().map(|r| format!("{},{}", fmt_num(px(r.theta)), fmt_num(py(r.lambda4)))).collect();
        if coords.len() > 1 {
            let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, coords.join(" "));
        }
        for r in &pts {
            let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="3.5" fill="{color}"/>"#, fmt_num(px(r.theta)), fmt_num(py(r.lambda4)));
        }
        let ly = y0 + 14.0 + ki as f64 * 16.0;
        let _ = writeln!(s, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="2"/>"#, x0 + 8.0, fmt_num(ly - 4.0), x0 + 24.0, fmt_num(ly - 4.0));
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, x0 + 28.0, fmt_num(ly), kind.as_str());
    }
    s.push_str("</svg>\n");
    s
}
