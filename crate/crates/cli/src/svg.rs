//! Self-contained SVG plot: one histogram series, one theory curve, and an
//! optional atom marker. No external plotting dependency.

use kspec::spectra::Histogram;
use kspec::theory::DensityCurve;
use std::fmt::Write;

const W: f64 = 900.0;
const H: f64 = 560.0;
const ML: f64 = 70.0;
const MR: f64 = 25.0;
const MT: f64 = 30.0;
const MB: f64 = 55.0;

struct Axes {
    x0: f64,
    x1: f64,
    y1: f64,
}

impl Axes {
    fn sx(&self, x: f64) -> f64 {
        ML + (x - self.x0) / (self.x1 - self.x0) * (W - ML - MR)
    }

    fn sy(&self, y: f64) -> f64 {
        H - MB - y / self.y1 * (H - MT - MB)
    }
}

fn tick_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    step * mag
}

/// Renders the histogram of an empirical spectrum against a limiting density
/// curve, with the point mass (when present) drawn as a vertical marker.
pub fn render_plot(hist: &Histogram, curve: &DensityCurve, title: &str) -> String {
    let x0 = hist.bin_edges[0].min(curve.grid[0]);
    let x1 = hist
        .bin_edges
        .last()
        .copied()
        .unwrap()
        .max(*curve.grid.last().unwrap());
    let y_hist = hist.densities.iter().fold(0.0f64, |m, &v| m.max(v));
    let y_curve = curve.values.iter().fold(0.0f64, |m, &v| m.max(v));
    let y1 = (y_hist.max(y_curve) * 1.12).max(1e-6);
    let ax = Axes { x0, x1, y1 };

    let mut s = String::with_capacity(16 * 1024);
    let _ = write!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = write!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = write!(
        s,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="15" text-anchor="middle">{title}</text>"#,
        W / 2.0
    );

    // histogram bars
    let _ = write!(s, r##"<g fill="#9ecae1" stroke="none">"##);
    for (i, &rho) in hist.densities.iter().enumerate() {
        if rho <= 0.0 {
            continue;
        }
        let xl = ax.sx(hist.bin_edges[i]);
        let xr = ax.sx(hist.bin_edges[i + 1]);
        let yt = ax.sy(rho);
        let _ = write!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#,
            xl,
            yt,
            (xr - xl).max(0.5),
            (H - MB - yt).max(0.0)
        );
    }
    let _ = write!(s, "</g>");

    // theory curve
    let mut points = String::new();
    for (x, y) in curve.grid.iter().zip(&curve.values) {
        let _ = write!(points, "{:.2},{:.2} ", ax.sx(*x), ax.sy(*y));
    }
    let _ = write!(
        s,
        r##"<polyline fill="none" stroke="#d62728" stroke-width="2" points="{}"/>"##,
        points.trim_end()
    );

    // atom marker
    if let Some(atom) = curve.atom {
        if atom.mass > 0.0 {
            let x = ax.sx(atom.location);
            let _ = write!(
                s,
                r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#d62728" stroke-width="2" stroke-dasharray="6 4"/>"##,
                H - MB,
                MT
            );
            let _ = write!(
                s,
                r##"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle" fill="#d62728">mass {:.3}</text>"##,
                MT + 14.0,
                atom.mass
            );
        }
    }

    // axes
    let _ = write!(
        s,
        r#"<line x1="{ML}" y1="{0}" x2="{1}" y2="{0}" stroke="black"/>"#,
        H - MB,
        W - MR
    );
    let _ = write!(s, r#"<line x1="{ML}" y1="{MT}" x2="{ML}" y2="{}" stroke="black"/>"#, H - MB);
    let xstep = tick_step(x1 - x0);
    let mut t = (x0 / xstep).ceil() * xstep;
    while t <= x1 + 1e-12 {
        let sx = ax.sx(t);
        let _ = write!(s, r#"<line x1="{sx:.2}" y1="{0}" x2="{sx:.2}" y2="{1}" stroke="black"/>"#, H - MB, H - MB + 5.0);
        let _ = write!(
            s,
            r#"<text x="{sx:.2}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            H - MB + 20.0,
            (t * 1000.0).round() / 1000.0
        );
        t += xstep;
    }
    let ystep = tick_step(y1);
    let mut t = 0.0;
    while t <= y1 + 1e-12 {
        let sy = ax.sy(t);
        let _ = write!(s, r#"<line x1="{}" y1="{sy:.2}" x2="{ML}" y2="{sy:.2}" stroke="black"/>"#, ML - 5.0);
        let _ = write!(
            s,
            r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="end">{}</text>"#,
            ML - 9.0,
            sy + 4.0,
            (t * 1000.0).round() / 1000.0
        );
        t += ystep;
    }
    let _ = write!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">eigenvalue</text>"#,
        (ML + W - MR) / 2.0,
        H - 12.0
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use kspec::spectra::Esd;

    #[test]
    fn plot_has_one_histogram_and_one_curve() {
        let esd = Esd::from_eigenvalues((0..200).map(|i| (i as f64 / 40.0).sin()).collect());
        let hist = Histogram::freedman_diaconis(&esd);
        let curve = DensityCurve {
            grid: vec![-1.0, 0.0, 1.0],
            values: vec![0.1, 0.5, 0.1],
            atom: None,
        };
        let svg = render_plot(&hist, &curve, "test");
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches(r##"<g fill="#9ecae1""##).count(), 1);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
