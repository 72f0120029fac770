//! Objective sampled on a grid, exported as CSV or an SVG heatmap.

use std::fmt::Write;

use crate::error::Result;
use crate::objective::Objective;
use crate::oracle::GridSpec;
use crate::real::Real;
use crate::scenario::{AreaBounds, UserDevice};

#[derive(Debug, Clone, PartialEq)]
pub struct Surface<T> {
    pub xs: Vec<T>,
    pub ys: Vec<T>,
    /// `values[i * ys.len() + j]` is the objective at `(xs[i], ys[j])`.
    pub values: Vec<T>,
    pub altitude: T,
    pub bounds: AreaBounds<T>,
    /// Nodes where the summed Hessian fails the NSD test.
    pub non_nsd_nodes: usize,
}

pub fn sample_surface<T: Real>(
    users: &[UserDevice<T>],
    altitude: T,
    bounds: &AreaBounds<T>,
    spacing: T,
) -> Result<Surface<T>> {
    let f = Objective::new(users, altitude)?;
    let grid = GridSpec::new(spacing, *bounds)?;
    let (xs, ys) = (grid.xs(), grid.ys());
    let mut values = Vec::with_capacity(xs.len() * ys.len());
    let mut non_nsd_nodes = 0;
    for &x in &xs {
        for &y in &ys {
            values.push(f.value(x, y));
            if !f.hessian(x, y).is_nsd() {
                non_nsd_nodes += 1;
            }
        }
    }
    Ok(Surface {
        xs,
        ys,
        values,
        altitude,
        bounds: *bounds,
        non_nsd_nodes,
    })
}

impl<T: Real> Surface<T> {
    pub fn value(&self, i: usize, j: usize) -> T {
        self.values[i * self.ys.len() + j]
    }

    pub fn range(&self) -> (T, T) {
        self.values
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Rows `x,y,value` after a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 24 + 12);
        out.push_str("x,y,value\n");
        for (i, x) in self.xs.iter().enumerate() {
            for (j, y) in self.ys.iter().enumerate() {
                let _ = writeln!(out, "{},{},{}", x, y, self.value(i, j));
            }
        }
        out
    }

    /// Heatmap of rectangles with a linear color scale and metric axes.
    pub fn to_svg(&self) -> String {
        const W: f64 = 600.0;
        const H: f64 = 600.0;
        const LEFT: f64 = 70.0;
        const TOP: f64 = 40.0;
        const BAR: f64 = 110.0;
        let b = &self.bounds;
        let (x0, x1) = (b.x_min.to_f64_lossy(), b.x_max.to_f64_lossy());
        let (y0, y1) = (b.y_min.to_f64_lossy(), b.y_max.to_f64_lossy());
        let span_x = (x1 - x0).max(f64::MIN_POSITIVE);
        let span_y = (y1 - y0).max(f64::MIN_POSITIVE);
        let sx = |x: f64| LEFT + (x - x0) / span_x * W;
        let sy = |y: f64| TOP + H - (y - y0) / span_y * H;
        let (lo, hi) = self.range();
        let (lo, hi) = (lo.to_f64_lossy(), hi.to_f64_lossy());
        let norm = |v: f64| if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };

        // Cell edges sit halfway between nodes, clipped to the area.
        let edges = |nodes: &[T], lo: f64, hi: f64| -> Vec<f64> {
            let n: Vec<f64> = nodes.iter().map(|v| v.to_f64_lossy()).collect();
            let mut e = Vec::with_capacity(n.len() + 1);
            e.push(lo);
            for w in n.windows(2) {
                e.push(0.5 * (w[0] + w[1]));
            }
            e.push(hi);
            e
        };
        let ex = edges(&self.xs, x0, x1);
        let ey = edges(&self.ys, y0, y1);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">"#,
            LEFT + W + BAR,
            TOP + H + 60.0,
            LEFT + W + BAR,
            TOP + H + 60.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">Objective (J/m^2) at z = {} m</text>"#,
            LEFT + W / 2.0,
            self.altitude
        );
        let _ = writeln!(s, r#"<g shape-rendering="crispEdges">"#);
        for i in 0..self.xs.len() {
            for j in 0..self.ys.len() {
                let (xa, xb) = (sx(ex[i]), sx(ex[i + 1]));
                let (ya, yb) = (sy(ey[j + 1]), sy(ey[j]));
                let v = self.value(i, j).to_f64_lossy();
                let _ = writeln!(
                    s,
                    r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                    xa,
                    ya,
                    (xb - xa).max(0.0),
                    (yb - ya).max(0.0),
                    color(norm(v))
                );
            }
        }
        let _ = writeln!(s, "</g>");

        // Axes and ticks.
        let _ = writeln!(
            s,
            r#"<rect x="{LEFT}" y="{TOP}" width="{W}" height="{H}" fill="none" stroke="black"/>"#
        );
        for t in 0..=5 {
            let fx = x0 + span_x * t as f64 / 5.0;
            let fy = y0 + span_y * t as f64 / 5.0;
            let (px, py) = (sx(fx), sy(fy));
            let _ = writeln!(
                s,
                r#"<line x1="{px:.3}" y1="{}" x2="{px:.3}" y2="{}" stroke="black"/><text x="{px:.3}" y="{}" text-anchor="middle">{}</text>"#,
                TOP + H,
                TOP + H + 5.0,
                TOP + H + 20.0,
                tick(fx)
            );
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{py:.3}" x2="{LEFT}" y2="{py:.3}" stroke="black"/><text x="{}" y="{:.3}" text-anchor="end">{}</text>"#,
                LEFT - 5.0,
                LEFT - 8.0,
                py + 4.0,
                tick(fy)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">x (m)</text>"#,
            LEFT + W / 2.0,
            TOP + H + 45.0
        );
        let _ = writeln!(
            s,
            r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">y (m)</text>"#,
            TOP + H / 2.0,
            TOP + H / 2.0
        );

        // Color bar.
        let bx = LEFT + W + 25.0;
        let steps = 50;
        for k in 0..steps {
            let t0 = k as f64 / steps as f64;
            let y = TOP + H - (k + 1) as f64 * H / steps as f64;
            let _ = writeln!(
                s,
                r#"<rect x="{bx}" y="{y:.3}" width="20" height="{:.3}" fill="{}"/>"#,
                H / steps as f64 + 0.5,
                color(t0 + 0.5 / steps as f64)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{:.4}</text><text x="{}" y="{}">{:.4}</text>"#,
            bx + 24.0,
            TOP + 10.0,
            hi,
            bx + 24.0,
            TOP + H,
            lo
        );
        s.push_str("</svg>\n");
        s
    }
}

fn tick(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 {
        format!("{}", v.round())
    } else {
        format!("{v:.1}")
    }
}

/// Linear interpolation through a five-stop blue-to-yellow palette.
fn color(t: f64) -> String {
    const STOPS: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let t = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (t.floor() as usize).min(STOPS.len() - 2);
    let f = t - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let mix = |p: f64, q: f64| (p + (q - p) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}
