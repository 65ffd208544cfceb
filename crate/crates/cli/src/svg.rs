//! Minimal SVG polyline plots.

use std::fmt::Write as _;

const W: f64 = 480.0;
const H: f64 = 480.0;
const PAD: f64 = 40.0;

pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

impl Series {
    pub fn new(label: &str, color: &'static str, points: Vec<(f64, f64)>) -> Self {
        Series {
            label: label.to_string(),
            color,
            points,
            dashed: false,
        }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn polyline(s: &mut String, pts: &[(f64, f64)], color: &str, dashed: bool) {
    if pts.len() < 2 {
        if let Some(&(x, y)) = pts.first() {
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#);
        }
        return;
    }
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let dash = if dashed { r#" stroke-dasharray="4 3""# } else { "" };
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
        coords.join(" ")
    );
}

fn legend(s: &mut String, series: &[Series]) {
    for (i, ser) in series.iter().enumerate() {
        let y = H - 12.0 - 14.0 * (series.len() - 1 - i) as f64;
        let _ = writeln!(
            s,
            r#"<text x="{PAD}" y="{y}" font-family="sans-serif" font-size="11" fill="{}">{}</text>"#,
            ser.color,
            escape(&ser.label)
        );
    }
}

/// Axis plot of `(x, y)` series scaled to a common box.
pub fn axis_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
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
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        (y0, y1) = (y0 - 0.5, y1 + 0.5);
    }
    let bottom = H - PAD - 30.0;
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| bottom - (y - y0) / (y1 - y0) * (bottom - PAD);
    let mut s = header(title);
    let _ = writeln!(
        s,
        r##"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="#999"/>"##,
        W - 2.0 * PAD,
        bottom - PAD
    );
    for (x, y, anchor, text) in [
        (PAD, bottom + 14.0, "start", format!("{x0:.3}")),
        (W - PAD, bottom + 14.0, "end", format!("{x1:.3}")),
        (PAD - 4.0, bottom, "end", format!("{y0:.3}")),
        (PAD - 4.0, PAD + 10.0, "end", format!("{y1:.3}")),
        (W / 2.0, bottom + 14.0, "middle", x_label.to_string()),
        (PAD - 4.0, (PAD + bottom) / 2.0, "end", y_label.to_string()),
    ] {
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="10" text-anchor="{anchor}">{}</text>"#,
            escape(&text)
        );
    }
    for ser in series {
        let pts: Vec<(f64, f64)> = ser.points.iter().map(|&(x, y)| (sx(x), sy(y))).collect();
        polyline(&mut s, &pts, ser.color, ser.dashed);
    }
    legend(&mut s, series);
    s.push_str("</svg>\n");
    s
}

/// Orthographic view of curves on a sphere of the given radius; the hidden
/// half of each curve is dashed.
pub fn sphere_plot(title: &str, radius: f64, series: &[(String, &'static str, Vec<[f64; 3]>)]) -> String {
    // View direction: azimuth 35°, elevation 25°.
    let (az, el) = (35f64.to_radians(), 25f64.to_radians());
    let view = [el.cos() * az.cos(), el.cos() * az.sin(), el.sin()];
    let right = [-az.sin(), az.cos(), 0.0];
    let up = [-el.sin() * az.cos(), -el.sin() * az.sin(), el.cos()];
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let scale = (W / 2.0 - PAD) / radius;
    let (cx, cy) = (W / 2.0, H / 2.0);
    let mut s = header(title);
    let _ = writeln!(
        s,
        r##"<circle cx="{cx}" cy="{cy}" r="{}" fill="none" stroke="#999"/>"##,
        radius * scale
    );
    let mut legends = Vec::new();
    for (label, color, pts) in series {
        let mut runs: Vec<(bool, Vec<(f64, f64)>)> = Vec::new();
        for p in pts {
            let front = dot(p, &view) >= 0.0;
            let q = (cx + scale * dot(p, &right), cy - scale * dot(p, &up));
            match runs.last_mut() {
                Some((f, run)) if *f == front => run.push(q),
                Some((_, run)) => {
                    let last = *run.last().expect("runs are nonempty");
                    runs.push((front, vec![last, q]));
                }
                None => runs.push((front, vec![q])),
            }
        }
        for (front, run) in &runs {
            polyline(&mut s, run, color, !front);
        }
        legends.push(Series::new(label, color, Vec::new()));
    }
    legend(&mut s, &legends);
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_plot_is_well_formed() {
        let svg = axis_plot(
            "a < b",
            "t",
            "x",
            &[Series::new("x(t)", "black", vec![(0.0, 0.0), (1.0, 2.0)]), Series::new("flat", "red", vec![(0.0, 1.0)])],
        );
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("a &lt; b"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 1);
    }

    #[test]
    fn hidden_half_is_dashed() {
        let arc: Vec<[f64; 3]> = (0..=20)
            .map(|i| {
                let a = std::f64::consts::PI * i as f64 / 20.0;
                [a.cos(), a.sin(), 0.0]
            })
            .collect();
        let svg = sphere_plot("arc", 1.0, &[("arc".into(), "blue", arc)]);
        assert!(svg.contains("stroke-dasharray"));
    }
}
