//! Static SVG charts. Every element drawn for a CSV data row carries a
//! `data-row` attribute holding the zero-based row index.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// One marker; `y = None` marks a row without a value.
#[derive(Clone, Debug)]
pub struct Point {
    pub row: usize,
    pub x: f64,
    pub y: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub points: Vec<Point>,
}

/// Dashed guide `y = y0 (x / x0)^slope` over the x-range of the plot.
#[derive(Clone, Debug)]
pub struct Slope {
    pub label: String,
    pub slope: f64,
    pub x0: f64,
    pub y0: f64,
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(title));
}

fn axis_labels(out: &mut String, xlabel: &str, ylabel: &str) {
    let (x1, y1) = (WIDTH - RIGHT, HEIGHT - BOTTOM);
    let _ = writeln!(out, r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - LEFT, y1 - TOP);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (LEFT + x1) / 2.0, HEIGHT - 15.0, escape(xlabel));
    let _ = writeln!(
        out,
        r#"<text transform="translate(20 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
        (TOP + y1) / 2.0,
        escape(ylabel)
    );
}

/// Decade range `[10^lo, 10^hi]` covering all finite positive values.
fn decades(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite() && *v > 0.0) {
        lo = lo.min(v.log10());
        hi = hi.max(v.log10());
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let (lo, hi) = (lo.floor(), hi.ceil());
    (lo, if hi > lo { hi } else { lo + 1.0 })
}

/// Log-log scatter with connected series and reference slopes.
pub fn loglog(title: &str, xlabel: &str, ylabel: &str, series: &[Series], slopes: &[Slope]) -> String {
    let xs = || series.iter().flat_map(|s| s.points.iter().map(|p| p.x));
    let (xa, xb) = decades(xs());
    let (xmin, xmax) = (xs().fold(f64::INFINITY, f64::min), xs().fold(f64::NEG_INFINITY, f64::max));
    let guide = |s: &Slope, x: f64| s.y0 * (x / s.x0).powf(s.slope);
    let ys = series.iter().flat_map(|s| s.points.iter().filter_map(|p| p.y));
    let (ya, yb) = decades(ys.chain(slopes.iter().flat_map(|s| [guide(s, xmin), guide(s, xmax)])));
    let px = |x: f64| LEFT + (x.log10() - xa) / (xb - xa) * (WIDTH - RIGHT - LEFT);
    let py = |y: f64| HEIGHT - BOTTOM - (y.log10() - ya) / (yb - ya) * (HEIGHT - BOTTOM - TOP);

    let mut out = String::new();
    header(&mut out, title);
    axis_labels(&mut out, xlabel, ylabel);
    for e in xa as i32..=xb as i32 {
        let x = px(10f64.powi(e));
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{}" text-anchor="middle">1e{e}</text>"#, HEIGHT - BOTTOM + 16.0);
    }
    for e in ya as i32..=yb as i32 {
        let y = py(10f64.powi(e));
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{e}</text>"#, LEFT - 6.0, y + 4.0);
    }
    for (i, s) in slopes.iter().enumerate() {
        let c = COLORS[i % COLORS.len()];
        let _ = writeln!(
            out,
            r#"<line class="reference" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{c}" stroke-dasharray="5 4"/>"#,
            px(xmin),
            py(guide(s, xmin)),
            px(xmax),
            py(guide(s, xmax))
        );
    }
    for (i, s) in series.iter().enumerate() {
        let c = COLORS[i % COLORS.len()];
        let path: Vec<String> =
            s.points.iter().filter_map(|p| p.y.map(|y| format!("{:.2},{:.2}", px(p.x), py(y)))).collect();
        if path.len() > 1 {
            let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{c}"/>"#, path.join(" "));
        }
        for p in &s.points {
            match p.y {
                Some(y) => {
                    let _ = writeln!(
                        out,
                        r#"<circle data-row="{}" cx="{:.2}" cy="{:.2}" r="3.5" fill="{c}"/>"#,
                        p.row,
                        px(p.x),
                        py(y)
                    );
                }
                None => {
                    let _ = writeln!(
                        out,
                        r#"<text data-row="{}" x="{:.2}" y="{}" text-anchor="middle" fill="{c}">×</text>"#,
                        p.row,
                        px(p.x),
                        HEIGHT - BOTTOM - 4.0
                    );
                }
            }
        }
    }
    legend(&mut out, series.iter().map(|s| s.label.as_str()).chain(slopes.iter().map(|s| s.label.as_str())), series.len());
    out.push_str("</svg>\n");
    out
}

fn legend<'a>(out: &mut String, labels: impl Iterator<Item = &'a str>, solid: usize) {
    let x = WIDTH - RIGHT + 12.0;
    for (i, label) in labels.enumerate() {
        let y = TOP + 10.0 + 18.0 * i as f64;
        let (c, dash) = if i < solid {
            (COLORS[i % COLORS.len()], "")
        } else {
            (COLORS[(i - solid) % COLORS.len()], r#" stroke-dasharray="5 4""#)
        };
        let _ = writeln!(out, r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{c}"{dash}/>"#, x + 20.0);
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, x + 26.0, y + 4.0, escape(label));
    }
}

#[derive(Clone, Debug)]
pub struct Segment {
    pub row: usize,
    pub label: String,
    pub value: f64,
}

#[derive(Clone, Debug)]
pub struct Bar {
    pub label: String,
    pub segments: Vec<Segment>,
}

/// Vertical stacked bars; segment colors follow their order within a bar.
pub fn stacked_bars(title: &str, ylabel: &str, bars: &[Bar]) -> String {
    let top = bars
        .iter()
        .map(|b| b.segments.iter().map(|s| s.value.max(0.0)).sum::<f64>())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let plot_w = WIDTH - RIGHT - LEFT;
    let plot_h = HEIGHT - BOTTOM - TOP;
    let slot = plot_w / bars.len().max(1) as f64;
    let mut out = String::new();
    header(&mut out, title);
    axis_labels(&mut out, "", ylabel);
    for t in 0..=4 {
        let v = top * t as f64 / 4.0;
        let y = HEIGHT - BOTTOM - plot_h * t as f64 / 4.0;
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">{v:.3}</text>"#, LEFT - 6.0, y + 4.0);
    }
    for (i, b) in bars.iter().enumerate() {
        let x = LEFT + slot * (i as f64 + 0.2);
        let mut y = HEIGHT - BOTTOM;
        for (j, s) in b.segments.iter().enumerate() {
            let h = plot_h * s.value.max(0.0) / top;
            y -= h;
            let _ = writeln!(
                out,
                r#"<rect data-row="{}" x="{x:.2}" y="{y:.2}" width="{:.2}" height="{h:.2}" fill="{}"><title>{}: {}</title></rect>"#,
                s.row,
                slot * 0.6,
                COLORS[j % COLORS.len()],
                escape(&s.label),
                s.value
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            x + slot * 0.3,
            HEIGHT - BOTTOM + 16.0,
            escape(&b.label)
        );
    }
    if let Some(b) = bars.first() {
        legend(&mut out, b.segments.iter().map(|s| s.label.as_str()), b.segments.len());
    }
    out.push_str("</svg>\n");
    out
}
