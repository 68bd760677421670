//! Standalone SVG 1.1 plots in chart (or profile-plane) units.

use std::fmt::Write as _;

use crate::error::Result;
use crate::morin::Sign;
use crate::strata::Strata;
use crate::surfaces::{blaschke_normal, RotationalGamma, SurfaceDomain};
use crate::ChartPoint;

const PLUS: &str = "#c0392b";
const MINUS: &str = "#2471a3";

/// A drawing canvas mapping a data box to a fixed-size SVG with `y` pointing up.
struct Canvas {
    x0: f64,
    y1: f64,
    scale: f64,
    margin: f64,
    body: String,
}

impl Canvas {
    fn new(x: (f64, f64), y: (f64, f64), width: f64) -> Self {
        let scale = width / (x.1 - x.0);
        Canvas { x0: x.0, y1: y.1, scale, margin: 40.0, body: String::new() }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (self.margin + (x - self.x0) * self.scale, self.margin + (self.y1 - y) * self.scale)
    }

    fn polyline(&mut self, pts: &[[f64; 2]], color: &str, width: f64) {
        if pts.len() < 2 {
            return;
        }
        let mut d = String::new();
        for p in pts {
            let (x, y) = self.px(p[0], p[1]);
            let _ = write!(d, "{x:.2},{y:.2} ");
        }
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{width}"/>"#,
            d.trim_end()
        );
    }

    fn marker(&mut self, x: f64, y: f64, label: &str, color: &str) {
        let (x, y) = self.px(x, y);
        let _ = writeln!(
            self.body,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{color}"/><text x="{:.2}" y="{:.2}" font-size="14" fill="{color}">{label}</text>"#,
            x + 6.0,
            y - 6.0
        );
    }

    fn rect(&mut self, x: (f64, f64), y: (f64, f64)) {
        let (a, b) = self.px(x.0, y.1);
        let (c, d) = self.px(x.1, y.0);
        let _ = writeln!(
            self.body,
            r##"<rect x="{a:.2}" y="{b:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444"/>"##,
            c - a,
            d - b
        );
    }

    fn finish(self, title: &str, height: f64, width: f64, legend: &[(&str, &str)]) -> String {
        let w = width + 2.0 * self.margin + 160.0;
        let h = height + 2.0 * self.margin;
        let mut s = format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">\n<title>{}</title>\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
            escape(title)
        );
        s.push_str(&self.body);
        let lx = width + 2.0 * self.margin;
        for (k, (label, color)) in legend.iter().enumerate() {
            let y = self.margin + 20.0 * k as f64;
            let _ = writeln!(
                s,
                r#"<line x1="{lx}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="3"/><text x="{}" y="{}" font-size="12">{}</text>"#,
                lx + 20.0,
                lx + 26.0,
                y + 4.0,
                escape(label)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="20" font-size="14">{}</text>"#,
            self.margin,
            escape(title)
        );
        s.push_str("</svg>\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Singular curves on the parameter domain, coloured by the sign of `λ̇` along a
/// continuous null field, with `A₃` points marked by their sign.
pub fn strata_svg(title: &str, domain: &SurfaceDomain, strata: &Strata) -> String {
    let xr = domain.u_range();
    let yr = domain.strata_v_range();
    let width = 640.0;
    let height = width * (yr.1 - yr.0) / (xr.1 - xr.0);
    let mut c = Canvas::new(xr, yr, width);
    c.rect(xr, yr);
    let period = (xr.1 - xr.0).min(yr.1 - yr.0) * 0.5;
    for curve in &strata.curves {
        let n = curve.points.len();
        let segs = if curve.closed { n } else { n.saturating_sub(1) };
        let mut run: Vec<[f64; 2]> = Vec::new();
        let mut run_sign = None;
        for k in 0..segs {
            let (a, b) = (curve.points[k], curve.points[(k + 1) % n]);
            let sign = curve.lambda_dot[k] > 0.0;
            let jump = (a.u - b.u).abs() > period || (a.v - b.v).abs() > period;
            if run_sign != Some(sign) || jump {
                let color = if run_sign == Some(true) { PLUS } else { MINUS };
                c.polyline(&run, color, 2.0);
                run.clear();
                run_sign = Some(sign);
            }
            if run.is_empty() {
                run.push([a.u, a.v]);
            }
            if !jump {
                run.push([b.u, b.v]);
            }
        }
        let color = if run_sign == Some(true) { PLUS } else { MINUS };
        c.polyline(&run, color, 2.0);
    }
    for a in &strata.a3_points {
        let (label, color) = match a.sign {
            Sign::Plus => ("+", PLUS),
            Sign::Minus => ("−", MINUS),
        };
        c.marker(a.point.u, a.point.v, label, color);
    }
    c.finish(
        title,
        height,
        width,
        &[("λ̇ > 0", PLUS), ("λ̇ < 0", MINUS), ("A₃ points ±", "#000")],
    )
}

fn profile_canvas(pts: &[[f64; 2]]) -> (Canvas, f64, f64) {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, 0.0f64, f64::MIN);
    for p in pts {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let pad = 0.05 * (x1 - x0).max(y1 - y0);
    let (xr, yr) = ((x0 - pad, x1 + pad), (y0 - pad, y1 + pad));
    let width = 480.0;
    let height = width * (yr.1 - yr.0) / (xr.1 - xr.0);
    let mut c = Canvas::new(xr, yr, width);
    c.polyline(&[[xr.0, 0.0], [xr.1, 0.0]], "#999", 1.0);
    (c, width, height)
}

/// The plane profile curve `γ(t)`, `−π/2 ≤ t ≤ π/2`, in the upper half plane.
pub fn gamma_profile_svg(body: &RotationalGamma) -> String {
    let n = 400;
    let pts: Vec<[f64; 2]> = (0..=n)
        .map(|k| body.profile(-std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    let (mut c, w, h) = profile_canvas(&pts);
    c.polyline(&pts, "#000", 2.0);
    c.finish(
        &format!("profile curve γ, ε = {}", body.epsilon),
        h,
        w,
        &[("γ(t)", "#000"), ("rotation axis", "#999")],
    )
}

/// Profile of the Blaschke normal map of a rotational body: `ξ` along the meridian
/// `u = 0` as (axial, radial) coordinates; singular latitudes are marked.
pub fn blaschke_profile_svg(body: &RotationalGamma, strata: &Strata) -> Result<String> {
    let (v0, v1) = body.domain.strata_v_range();
    let n = 600;
    let mut pts = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let v = v0 + (v1 - v0) * k as f64 / n as f64;
        let xi = blaschke_normal(body, ChartPoint::new(0.0, v))?.xi;
        pts.push([xi[2], xi[0]]);
    }
    let (mut c, w, h) = profile_canvas(&pts);
    c.polyline(&pts, "#000", 2.0);
    let mut lats: Vec<f64> = strata.curves.iter().filter_map(|cv| cv.points.first().map(|p| p.v)).collect();
    lats.sort_by(f64::total_cmp);
    for v in lats {
        let xi = blaschke_normal(body, ChartPoint::new(0.0, v))?.xi;
        c.marker(xi[2], xi[0], "", "#7d3c98");
    }
    for a in &strata.a3_points {
        let xi = blaschke_normal(body, ChartPoint::new(0.0, a.point.v))?.xi;
        let label = if a.sign == Sign::Plus { "+" } else { "−" };
        c.marker(xi[2], xi[0], label, PLUS);
    }
    Ok(c.finish(
        &format!("profile curve of ξ, ε = {}", body.epsilon),
        h,
        w,
        &[("ξ(0, v)", "#000"), ("singular latitudes", "#7d3c98"), ("rotation axis", "#999")],
    ))
}
