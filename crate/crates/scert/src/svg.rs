//! SVG 1.1 drawings of planar certificates.
//!
//! Each certificate is one `<g class="layer">` holding the region clipped
//! to the window. Halfspace regions also carry one `<line class="halfplane">`
//! per constraint, annotated with `data-normal` and `data-offset` (scaled to
//! offset 1 when the offset is positive). Where a region leaves the window
//! its cut edges are drawn dashed.

use std::fmt::Write;

use scert_core::certificates::s_certificate;
use scert_core::geometry::{BallShape, HalfspaceRegion, Region};
use scert_core::Norm;

use crate::problem::{Problem, Window};
use crate::report::{display_rows, num};
use crate::{AppError, CertMode};

/// Samples along curved boundaries.
pub const BOUNDARY_SAMPLES: usize = 256;

const WIDTH: f64 = 600.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, Clone)]
pub struct Layer {
    pub id: String,
    pub region: Region,
}

/// S-certificate layers: one per mode of a single classifier, or per member
/// and for the ensemble when there are several members.
pub fn certificate_layers(problem: &Problem) -> Result<Vec<Layer>, AppError> {
    if problem.dimension != 2 {
        return Err(AppError::Usage(format!(
            "rendering needs a two-dimensional problem, this one has dimension {}",
            problem.dimension
        )));
    }
    let mut layers = Vec::new();
    if problem.members.len() == 1 {
        for s in &problem.members[0].smoothness {
            let mode = s.mode();
            let clf = problem.members[0].classifier(mode)?;
            layers.push(Layer {
                id: format!("cert-{}", CertMode::from_mode(mode)),
                region: s_certificate(&clf, mode)?.region,
            });
        }
        return Ok(layers);
    }
    for mode in problem.common_modes() {
        let name = CertMode::from_mode(mode);
        for (j, m) in problem.members.iter().enumerate() {
            layers.push(Layer {
                id: format!("member{}-{name}", j + 1),
                region: s_certificate(&m.classifier(mode)?, mode)?.region,
            });
        }
        let ens = problem.ensemble(mode, None)?.ensemble_classifier()?;
        layers.push(Layer {
            id: format!("ensemble-{name}"),
            region: s_certificate(&ens, mode)?.region,
        });
    }
    Ok(layers)
}

type Pt = [f64; 2];

fn window_poly(w: &Window) -> Vec<Pt> {
    vec![[w.x[0], w.y[0]], [w.x[1], w.y[0]], [w.x[1], w.y[1]], [w.x[0], w.y[1]]]
}

/// Sutherland–Hodgman clip of `poly` to `a·p <= b`.
fn clip(poly: &[Pt], a: Pt, b: f64) -> Vec<Pt> {
    let f = |p: &Pt| a[0] * p[0] + a[1] * p[1] - b;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let (fp, fq) = (f(&p), f(&q));
        if fp <= 0.0 {
            out.push(p);
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            let t = fp / (fp - fq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

fn clip_to_window(poly: &[Pt], w: &Window) -> Vec<Pt> {
    let mut p = poly.to_vec();
    for (a, b) in [
        ([1.0, 0.0], w.x[1]),
        ([-1.0, 0.0], -w.x[0]),
        ([0.0, 1.0], w.y[1]),
        ([0.0, -1.0], -w.y[0]),
    ] {
        p = clip(&p, a, b);
    }
    p
}

fn clip_hrep(h: &HalfspaceRegion, w: &Window) -> Vec<Pt> {
    let mut p = window_poly(w);
    for hs in h.halfspaces() {
        let a = hs.normal.as_slice();
        p = clip(&p, [a[0], a[1]], hs.offset);
        if p.is_empty() {
            break;
        }
    }
    p
}

/// Visible outline and whether the region is unbounded.
fn outline(region: &Region, w: &Window) -> Result<(Vec<Pt>, bool), AppError> {
    match region {
        Region::Whole { .. } => Ok((window_poly(w), true)),
        Region::Halfspaces(h) => Ok((clip_hrep(h, w), region.is_bounded()? != Some(true))),
        Region::Ball(b) if matches!(b.shape(), BallShape::Lp(Norm::L1 | Norm::LInf)) => {
            let h = region.to_hrep().expect("polyhedral ball");
            Ok((clip_hrep(&h, w), false))
        }
        _ => {
            let reach = 2.0
                * [w.x[0], w.x[1]]
                    .iter()
                    .flat_map(|x| [w.y[0], w.y[1]].map(|y| x.hypot(y)))
                    .fold(0.0, f64::max);
            let mut unbounded = false;
            let pts: Vec<Pt> = (0..BOUNDARY_SAMPLES)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / BOUNDARY_SAMPLES as f64;
                    let u = [t.cos(), t.sin()];
                    let r = region.radial(&u);
                    if !r.is_finite() {
                        unbounded = true;
                    }
                    let r = r.min(reach);
                    [u[0] * r, u[1] * r]
                })
                .collect();
            Ok((clip_to_window(&pts, w), unbounded))
        }
    }
}

/// Endpoints of the line `a·p = b` inside the window, if it crosses it.
fn line_in_window(a: Pt, b: f64, w: &Window) -> Option<(Pt, Pt)> {
    let nn = a[0] * a[0] + a[1] * a[1];
    if nn == 0.0 {
        return None;
    }
    let p0 = [a[0] * b / nn, a[1] * b / nn];
    let d = [-a[1], a[0]];
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (i, (min, max)) in [(w.x[0], w.x[1]), (w.y[0], w.y[1])].into_iter().enumerate() {
        if d[i].abs() < 1e-15 {
            if p0[i] < min || p0[i] > max {
                return None;
            }
        } else {
            let (t1, t2) = ((min - p0[i]) / d[i], (max - p0[i]) / d[i]);
            lo = lo.max(t1.min(t2));
            hi = hi.min(t1.max(t2));
        }
    }
    (lo < hi).then(|| ([p0[0] + lo * d[0], p0[1] + lo * d[1]], [p0[0] + hi * d[0], p0[1] + hi * d[1]]))
}

struct Frame {
    w: Window,
    width: f64,
    height: f64,
}

impl Frame {
    fn new(w: Window) -> Frame {
        let height = WIDTH * (w.y[1] - w.y[0]) / (w.x[1] - w.x[0]);
        Frame {
            w,
            width: WIDTH,
            height,
        }
    }

    fn px(&self, p: Pt) -> (f64, f64) {
        (
            (p[0] - self.w.x[0]) / (self.w.x[1] - self.w.x[0]) * self.width,
            (self.w.y[1] - p[1]) / (self.w.y[1] - self.w.y[0]) * self.height,
        )
    }

    fn path(&self, pts: &[Pt]) -> String {
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = self.px(*p);
            let _ = write!(d, "{}{:.3},{:.3} ", if i == 0 { "M" } else { "L" }, x, y);
        }
        d.push('Z');
        d
    }

    fn on_border(&self, p: Pt, q: Pt) -> bool {
        let e = 1e-9 * (self.w.x[1] - self.w.x[0]).max(self.w.y[1] - self.w.y[0]);
        let same = |a: f64, b: f64, v: f64| (a - v).abs() <= e && (b - v).abs() <= e;
        same(p[0], q[0], self.w.x[0])
            || same(p[0], q[0], self.w.x[1])
            || same(p[1], q[1], self.w.y[0])
            || same(p[1], q[1], self.w.y[1])
    }
}

pub fn render(layers: &[Layer], window: Window) -> Result<String, AppError> {
    window.validate().map_err(AppError::Usage)?;
    let f = Frame::new(window);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#,
        w = f.width,
        h = f.height
    );
    let _ = writeln!(
        s,
        r#"<rect class="background" x="0" y="0" width="{:.3}" height="{:.3}" fill="white"/>"#,
        f.width, f.height
    );
    for (i, layer) in layers.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let (poly, unbounded) = outline(&layer.region, &window)?;
        let _ = writeln!(s, r#"<g id="{}" class="layer" stroke="{colour}" fill="{colour}">"#, layer.id);
        if poly.len() >= 3 {
            let _ = writeln!(
                s,
                r#"  <path class="region" d="{}" fill-opacity="0.2" stroke-width="1.5"/>"#,
                f.path(&poly)
            );
        } else {
            let (x, y) = f.px([0.0, 0.0]);
            let _ = writeln!(s, r#"  <circle class="origin-only" cx="{x:.3}" cy="{y:.3}" r="3"/>"#);
        }
        if let Region::Halfspaces(h) = &layer.region {
            for (a, b) in display_rows(h) {
                let seg = line_in_window([a[0], a[1]], b, &window);
                let (x1, y1, x2, y2) = seg.map_or((0.0, 0.0, 0.0, 0.0), |(p, q)| {
                    let (x1, y1) = f.px(p);
                    let (x2, y2) = f.px(q);
                    (x1, y1, x2, y2)
                });
                let _ = writeln!(
                    s,
                    r#"  <line class="halfplane" data-normal="{} {}" data-offset="{}" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke-opacity="0.5" stroke-width="0.75"{}/>"#,
                    num(a[0]),
                    num(a[1]),
                    num(b),
                    if seg.is_none() { r#" visibility="hidden""# } else { "" }
                );
            }
        }
        if unbounded && poly.len() >= 3 {
            for k in 0..poly.len() {
                let (p, q) = (poly[k], poly[(k + 1) % poly.len()]);
                if f.on_border(p, q) {
                    let (x1, y1) = f.px(p);
                    let (x2, y2) = f.px(q);
                    let _ = writeln!(
                        s,
                        r#"  <line class="unbounded-marker" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke-width="3" stroke-dasharray="8 6"/>"#
                    );
                }
            }
        }
        s.push_str("</g>\n");
    }
    let (ox, oy) = f.px([0.0, 0.0]);
    let _ = writeln!(
        s,
        r##"<g class="axes" stroke="#444" stroke-width="0.5"><line x1="0" y1="{oy:.3}" x2="{:.3}" y2="{oy:.3}"/><line x1="{ox:.3}" y1="0" x2="{ox:.3}" y2="{:.3}"/></g>"##,
        f.width, f.height
    );
    s.push_str("</svg>\n");
    Ok(s)
}
