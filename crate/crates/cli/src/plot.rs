//! Minimal static SVG line charts.

use std::fmt::Write as _;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 360.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

pub struct Chart<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
    /// Fixed y range; data range when `None`.
    pub y_range: Option<(f64, f64)>,
    /// Labelled y ticks; five even ticks when empty.
    pub y_ticks: Vec<(f64, String)>,
    /// Break the line where consecutive points differ by more than this
    /// (for wrapped angles).
    pub break_above: Option<f64>,
}

fn range(v: &[f64]) -> (f64, f64) {
    let (lo, hi) = v
        .iter()
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn even_ticks(lo: f64, hi: f64) -> Vec<(f64, String)> {
    (0..=4)
        .map(|k| {
            let v = lo + (hi - lo) * k as f64 / 4.0;
            (v, format!("{v:.3}"))
        })
        .collect()
}

impl Chart<'_> {
    pub fn to_svg(&self) -> String {
        let (x0, x1) = range(self.x);
        let (y0, y1) = self.y_range.unwrap_or_else(|| range(self.y));
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

        let mut s = String::new();
        let w = &mut s;
        writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
        writeln!(
            w,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        )
        .unwrap();
        writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
        writeln!(
            w,
            r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            self.title
        )
        .unwrap();
        writeln!(
            w,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        )
        .unwrap();

        let ticks = if self.y_ticks.is_empty() {
            even_ticks(y0, y1)
        } else {
            self.y_ticks.clone()
        };
        for (v, label) in &ticks {
            let y = sy(*v);
            writeln!(
                w,
                r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{label}</text>"##,
                LEFT + pw,
                LEFT - 6.0,
                y + 4.0
            )
            .unwrap();
        }
        for (v, label) in even_ticks(x0, x1) {
            let x = sx(v);
            writeln!(
                w,
                r#"<text x="{x:.2}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
                TOP + ph + 16.0,
                label.trim_end_matches('0').trim_end_matches('.')
            )
            .unwrap();
        }
        writeln!(
            w,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 10.0,
            self.x_label
        )
        .unwrap();
        writeln!(
            w,
            r#"<text x="16" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            self.y_label
        )
        .unwrap();

        let mut segment = String::new();
        let mut prev: Option<f64> = None;
        let flush = |w: &mut String, seg: &mut String| {
            if seg.contains(' ') {
                writeln!(
                    w,
                    r##"<polyline fill="none" stroke="#1f5fa8" stroke-width="1" points="{}"/>"##,
                    seg.trim()
                )
                .unwrap();
            }
            seg.clear();
        };
        for (&x, &y) in self.x.iter().zip(self.y) {
            if !y.is_finite() || !x.is_finite() {
                flush(w, &mut segment);
                prev = None;
                continue;
            }
            if let (Some(p), Some(b)) = (prev, self.break_above) {
                if (y - p).abs() > b {
                    flush(w, &mut segment);
                }
            }
            write!(segment, "{:.2},{:.2} ", sx(x), sy(y.clamp(y0, y1))).unwrap();
            prev = Some(y);
        }
        flush(w, &mut segment);
        writeln!(w, "</svg>").unwrap();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrapped_angle_breaks_the_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [3.0, 3.1, -3.1, -3.0];
        let svg = Chart {
            title: "t",
            x_label: "x",
            y_label: "y",
            x: &x,
            y: &y,
            y_range: Some((-3.2, 3.2)),
            y_ticks: Vec::new(),
            break_above: Some(3.0),
        }
        .to_svg();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
    }
}
