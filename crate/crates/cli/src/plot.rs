//! BER versus Eb/N0 as a standalone SVG, log-scaled BER axis.

use std::collections::BTreeMap;
use std::fmt::Write;

use anyhow::{bail, Result};

use crate::results::Row;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

type Key = (String, String, usize);

/// Renders one polyline per (channel, algorithm, iteration).
///
/// Zero-BER points sit on the bottom edge of the axis.
pub fn render_svg(rows: &[Row]) -> Result<String> {
    if rows.is_empty() {
        bail!("no data to plot");
    }
    let mut groups: BTreeMap<Key, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.channel.clone(), r.algorithm.clone(), r.iteration))
            .or_default()
            .push((r.ebn0_db, r.ber));
    }
    for pts in groups.values_mut() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    let (mut x_lo, mut x_hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.ebn0_db), hi.max(r.ebn0_db)));
    if x_hi - x_lo < 1e-9 {
        x_lo -= 1.0;
        x_hi += 1.0;
    }
    let positive = rows.iter().map(|r| r.ber).filter(|&b| b > 0.0);
    let min_ber = positive.clone().fold(f64::INFINITY, f64::min);
    let max_ber = positive.fold(0.0, f64::max);
    let (d_lo, d_hi) = if max_ber > 0.0 {
        (min_ber.log10().floor().max(-12.0), max_ber.log10().ceil().min(0.0))
    } else {
        (-6.0, 0.0)
    };
    let d_hi = if d_hi <= d_lo { d_lo + 1.0 } else { d_hi };

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * pw;
    let py = |ber: f64| {
        let d = if ber > 0.0 { ber.log10().clamp(d_lo, d_hi) } else { d_lo };
        TOP + (d_hi - d) / (d_hi - d_lo) * ph
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);

    // Decade grid and labels.
    for d in (d_lo as i32)..=(d_hi as i32) {
        let y = py(10f64.powi(d));
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            LEFT + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
    }
    for i in 0..=5 {
        let x = x_lo + (x_hi - x_lo) * i as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(x),
            TOP + ph + 18.0,
            trim_float(x)
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Eb/N0 (dB)</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">BER</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    for (i, ((channel, alg, iter), pts)) in groups.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let dash = if alg == "map-sbvp" { r#" stroke-dasharray="6 3""# } else { "" };
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, b)| format!("{:.2},{:.2}", px(x), py(b)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            coords.join(" ")
        );
        for c in &coords {
            let (cx, cy) = c.split_once(',').expect("formatted pair");
            let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="2.5" fill="{color}"/>"#);
        }
        let ly = TOP + 10.0 + 16.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{} {} it{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            escape(channel),
            escape(alg),
            iter
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn trim_float(x: f64) -> String {
    let t = format!("{x:.2}");
    t.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
