use super::basin::{classify_start, BasinLabel};
use super::field::eval_v;
use super::integrator::{IntegratorConfig, Trajectory};
use crate::error::{Error, Result};
use crate::par::map_range;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// `t,re,im` rows with 17 significant digits.
pub fn trajectory_csv(tr: &Trajectory) -> String {
    let mut out = String::with_capacity(64 * tr.samples.len() + 16);
    out.push_str("t,re,im\n");
    for (t, z) in &tr.samples {
        let _ = writeln!(out, "{t:.16e},{:.16e},{:.16e}", z.re, z.im);
    }
    out
}

/// Phase-portrait layout: `nx × ny` cells over the rectangle, one arrow
/// (and one basin label) at each cell centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortraitSpec {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    /// Width of the SVG canvas in pixels; height follows the aspect ratio.
    pub width_px: f64,
}

impl Default for PortraitSpec {
    fn default() -> Self {
        Self { x: (-0.5, 2.5), y: (-1.5, 1.5), nx: 24, ny: 24, width_px: 640.0 }
    }
}

impl PortraitSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 || !(self.x.1 > self.x.0 && self.y.1 > self.y.0) || !(self.width_px > 0.0) {
            return Err(Error::InvalidConfig("portrait grid needs at least one cell and positive extent".into()));
        }
        Ok(())
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Complex64 {
        let dx = (self.x.1 - self.x.0) / self.nx as f64;
        let dy = (self.y.1 - self.y.0) / self.ny as f64;
        Complex64::new(self.x.0 + (i as f64 + 0.5) * dx, self.y.0 + (j as f64 + 0.5) * dy)
    }

    fn cells(&self) -> usize {
        self.nx * self.ny
    }

    /// Basin labels at the cell centres, row-major.
    pub fn labels(&self, cfg: &IntegratorConfig) -> Result<Vec<(Complex64, BasinLabel)>> {
        self.validate()?;
        map_range(self.cells(), |k| {
            let z = self.cell_center(k % self.nx, k / self.nx);
            classify_start(z, cfg).map(|l| (z, l))
        })
        .into_iter()
        .collect()
    }
}

fn label_color(l: BasinLabel) -> &'static str {
    match l {
        BasinLabel::One => "#cfe8cf",
        BasinLabel::Two => "#f3d6b3",
        BasinLabel::Zero => "#d6d6f3",
        BasinLabel::MinusOne => "#f3c9d9",
        BasinLabel::Diverged => "#eeeeee",
        BasinLabel::MaxTime => "#ffffff",
    }
}

/// SVG with the (normalised) arrow field of `v` at the cell centres, the
/// circle `|z − 1| = 1`, and optional basin-label shading.
pub fn phase_portrait_svg(spec: &PortraitSpec, labels: Option<&[(Complex64, BasinLabel)]>) -> Result<String> {
    spec.validate()?;
    let w = spec.width_px;
    let scale = w / (spec.x.1 - spec.x.0);
    let h = scale * (spec.y.1 - spec.y.0);
    let px = |z: Complex64| ((z.re - spec.x.0) * scale, (spec.y.1 - z.im) * scale);
    let cell_w = w / spec.nx as f64;
    let cell_h = h / spec.ny as f64;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1}" height="{h:.1}" viewBox="0 0 {w:.3} {h:.3}">"#);
    let _ = writeln!(
        svg,
        r##"<defs><marker id="head" markerWidth="6" markerHeight="6" refX="5" refY="3" orient="auto"><path d="M0,0 L6,3 L0,6 z" fill="#333"/></marker></defs>"##
    );
    if let Some(labels) = labels {
        for (z, l) in labels {
            let (cx, cy) = px(*z);
            let _ = writeln!(
                svg,
                r#"<rect x="{:.3}" y="{:.3}" width="{cell_w:.3}" height="{cell_h:.3}" fill="{}"/>"#,
                cx - 0.5 * cell_w,
                cy - 0.5 * cell_h,
                label_color(*l)
            );
        }
    }
    let arrow = 0.4 * cell_w.min(cell_h);
    for k in 0..spec.cells() {
        let z = spec.cell_center(k % spec.nx, k / spec.nx);
        let v = eval_v(z);
        let (x0, y0) = px(z);
        if v.norm() == 0.0 {
            let _ = writeln!(svg, r##"<circle cx="{x0:.3}" cy="{y0:.3}" r="2" fill="#333"/>"##);
            continue;
        }
        let d = v / v.norm();
        let (x1, y1) = (x0 + arrow * d.re, y0 - arrow * d.im);
        let _ = writeln!(
            svg,
            r##"<line x1="{x0:.3}" y1="{y0:.3}" x2="{x1:.3}" y2="{y1:.3}" stroke="#333" stroke-width="1" marker-end="url(#head)"/>"##
        );
    }
    let (cx, cy) = px(Complex64::new(1.0, 0.0));
    let _ = writeln!(svg, r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="{scale:.3}" fill="none" stroke="#c0392b" stroke-width="1.5"/>"##);
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// `re,im,label` rows for the cell-centre labels.
pub fn labels_csv(labels: &[(Complex64, BasinLabel)]) -> String {
    let mut out = String::from("re,im,label\n");
    for (z, l) in labels {
        let _ = writeln!(out, "{:.16e},{:.16e},{l}", z.re, z.im);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_flow::integrate;

    #[test]
    fn csv_header_and_precision() {
        let tr = integrate(Complex64::new(0.3, 0.2), &IntegratorConfig::rk4(0.5, 1.0), None).unwrap();
        let csv = trajectory_csv(&tr);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,re,im"));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[1], "2.9999999999999999e-1");
        let parsed: f64 = first[1].parse().unwrap();
        assert_eq!(parsed, 0.3);
        assert_eq!(csv.lines().count(), 1 + tr.samples.len());
    }

    #[test]
    fn single_cell_portrait_has_one_arrow() {
        let spec = PortraitSpec { x: (0.2, 0.8), y: (0.1, 0.5), nx: 1, ny: 1, ..PortraitSpec::default() };
        let svg = phase_portrait_svg(&spec, None).unwrap();
        assert_eq!(svg.matches("<line").count(), 1);
        // the default window is centred on the zero at 1, drawn as a dot
        let spec = PortraitSpec { nx: 1, ny: 1, ..PortraitSpec::default() };
        let svg = phase_portrait_svg(&spec, None).unwrap();
        assert_eq!(svg.matches("<line").count(), 0);
        assert_eq!(svg.matches("r=\"2\"").count(), 1);
        assert!(svg.contains("stroke=\"#c0392b\""));
    }

    #[test]
    fn labels_cover_every_cell() {
        let spec = PortraitSpec { x: (0.0, 2.0), y: (0.0, 2.0), nx: 4, ny: 4, ..PortraitSpec::default() };
        let labels = spec.labels(&IntegratorConfig::default()).unwrap();
        assert_eq!(labels.len(), 16);
        assert_eq!(labels_csv(&labels).lines().count(), 17);
    }
}
