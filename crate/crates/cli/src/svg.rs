//! Minimal SVG barcode: one horizontal bar per persistence interval, grouped
//! by dimension, over a labelled radius axis.

use std::fmt::Write as _;

use nctda::tda::PersistencePairs;

const WIDTH: f64 = 640.0;
const MARGIN: f64 = 40.0;
const BAR: f64 = 4.0;
const GAP: f64 = 2.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Bars clipped to `[t_min, t_max]`; infinite bars run to the right edge.
pub fn barcode(bars: &PersistencePairs, t_min: f64, t_max: f64) -> String {
    let span = (t_max - t_min).max(f64::MIN_POSITIVE);
    let x = |t: f64| MARGIN + (t.clamp(t_min, t_max) - t_min) / span * (WIDTH - 2.0 * MARGIN);
    let mut body = String::new();
    let mut y = MARGIN;
    for dim in 0..=bars.maxdim() {
        let visible: Vec<&(f64, f64)> = bars.bars(dim).iter().filter(|(b, _)| *b <= t_max).collect();
        let _ = writeln!(
            body,
            r#"<text x="4" y="{:.1}" font-size="10">H{dim}</text>"#,
            y + 8.0
        );
        for (b, d) in visible {
            let _ = writeln!(
                body,
                r#"<rect x="{:.2}" y="{:.1}" width="{:.2}" height="{BAR}" fill="{}"/>"#,
                x(*b),
                y,
                (x(*d) - x(*b)).max(0.5),
                COLORS[dim % COLORS.len()]
            );
            y += BAR + GAP;
        }
        y += 3.0 * GAP + 10.0;
    }
    let height = y + MARGIN;
    let axis = height - MARGIN + 10.0;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height:.0}\" viewBox=\"0 0 {WIDTH} {height:.0}\">\n"
    );
    s.push_str(&body);
    let _ = writeln!(
        s,
        r#"<line x1="{MARGIN}" y1="{axis:.1}" x2="{:.1}" y2="{axis:.1}" stroke="black"/>"#,
        WIDTH - MARGIN
    );
    for k in 0..=4 {
        let t = t_min + span * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">{:.3}</text>"#,
            x(t),
            axis + 14.0,
            t
        );
    }
    s.push_str("</svg>\n");
    s
}
