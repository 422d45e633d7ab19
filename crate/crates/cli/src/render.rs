//! SVG figures of scenes and head-to-tail compositions.
//!
//! `E2` is drawn as is, `E3` and `H3` as sketches projected on the `xy`
//! plane, `S2` and `RP2` by stereographic projection from the south pole,
//! `H2` in the Poincare disk and `MOEB` by stereographic projection from the
//! north pole. Arrows run from tail to head: a straight arrow between the
//! flippers, or an arc-arrow around the meeting point of two intersecting
//! lines.

use std::fmt::Write as _;

use flipcalc::biflipper::Biflipper;
use flipcalc::flips::{Flipper, FlipperKind};
use flipcalc::headtotail::H2TResult;
use flipcalc::numkernel::{cross3, hyperboloid_normalize, lorentz_cross, BilinearForm, Vector};
use flipcalc::SpaceTag;

use crate::scene::Scene;

const SIZE: f64 = 600.0;
const ARC_RADIUS: f64 = 36.0;
const PALETTE: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const GHOST: &str = "#9a9a9a";

type P2 = [f64; 2];

fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Square world window mapped onto the canvas, `y` pointing up.
#[derive(Debug, Clone, Copy)]
struct View {
    min: P2,
    span: f64,
}

impl View {
    fn px(&self, p: P2) -> P2 {
        [(p[0] - self.min[0]) / self.span * SIZE, (self.min[1] + self.span - p[1]) / self.span * SIZE]
    }

    fn centered(half: f64) -> View {
        View { min: [-half, -half], span: 2.0 * half }
    }
}

/// Model point to the plane of the figure.
fn project(space: SpaceTag, x: &Vector) -> Option<P2> {
    match space {
        SpaceTag::E1 => Some([x[0], 0.0]),
        SpaceTag::E2 | SpaceTag::E3 => Some([x[0], x[1]]),
        SpaceTag::S2 | SpaceTag::RP2 => {
            let x = x.normalize();
            let x = if space == SpaceTag::RP2 && x[2] < 0.0 { -x } else { x };
            let d = 1.0 + x[2];
            (d > 0.05).then(|| [x[0] / d, x[1] / d])
        }
        SpaceTag::Moeb => {
            let d = 1.0 - x[2];
            (d > 0.05).then(|| [x[0] / d, x[1] / d])
        }
        SpaceTag::H2 | SpaceTag::H3 => {
            let form = BilinearForm::lorentz(x.len() - 1);
            if form.norm_sq(x).abs() <= 1e-9 * x.norm_squared() {
                Some([x[1] / x[0], x[2] / x[0]])
            } else {
                let y = hyperboloid_normalize(x)?;
                Some([y[1] / (1.0 + y[0]), y[2] / (1.0 + y[0])])
            }
        }
    }
}

/// Drawable pieces of a flipper in world coordinates.
#[derive(Debug, Clone, Default)]
struct Shape {
    dots: Vec<P2>,
    /// Polylines; `None` breaks a polyline where the projection leaves the chart.
    paths: Vec<Vec<Option<P2>>>,
}

fn lorentz_form(x: &Vector) -> BilinearForm {
    BilinearForm::lorentz(x.len() - 1)
}

/// The point of the hyperplane `n^perp` nearest to the origin of the model.
fn foot_of_origin(n: &Vector) -> Option<Vector> {
    let form = lorentz_form(n);
    let mut e0 = Vector::zeros(n.len());
    e0[0] = 1.0;
    let p = &e0 - n * (form.inner(&e0, n) / form.norm_sq(n));
    hyperboloid_normalize(&p)
}

fn geodesic(p0: &Vector, d: &Vector, space: SpaceTag) -> Vec<Option<P2>> {
    (-70..=70)
        .map(|k| {
            let t = k as f64 * 0.1;
            project(space, &(p0 * t.cosh() + d * t.sinh()))
        })
        .collect()
}

/// Spacelike unit vectors completing `p0` (timelike unit) to a frame of `v^perp`
/// for each `v` in `against`.
fn spacelike_frame(p0: &Vector, against: &[Vector]) -> Vec<Vector> {
    let form = lorentz_form(p0);
    let mut basis: Vec<Vector> = vec![p0.clone()];
    basis.extend(against.iter().cloned());
    let mut out = Vec::new();
    for i in 1..p0.len() {
        let mut e = Vector::zeros(p0.len());
        e[i] = 1.0;
        for b in basis.iter().chain(out.iter()) {
            let q = form.norm_sq(b);
            if q.abs() > 1e-12 {
                e -= b * (form.inner(&e, b) / q);
            }
        }
        let q = form.norm_sq(&e);
        if q < -1e-9 {
            out.push(e / (-q).sqrt());
        }
    }
    out
}

fn circle_on_sphere(center: &Vector, cos_r: f64, space: SpaceTag) -> Vec<Option<P2>> {
    let c = center.normalize();
    let e1 = flipcalc::numkernel::reference_perpendicular(&c);
    let e2 = cross3(&c, &e1);
    let sin_r = (1.0 - cos_r * cos_r).max(0.0).sqrt();
    (0..=180)
        .map(|k| {
            let t = k as f64 * std::f64::consts::PI / 90.0;
            project(space, &(&c * cos_r + (&e1 * t.cos() + &e2 * t.sin()) * sin_r))
        })
        .collect()
}

fn shape(f: &Flipper, reach: f64) -> Shape {
    let space = f.space();
    let mut s = Shape::default();
    if f.is_whole() {
        return s;
    }
    let coords = f.to_coords().coords;
    let vecn = |a: usize, b: usize| Vector::from_column_slice(&coords[a..b]);
    match (space, f.kind()) {
        (SpaceTag::E1 | SpaceTag::E2 | SpaceTag::E3, FlipperKind::Point) => {
            s.dots.extend(project(space, &f.affine().unwrap().anchor().clone()))
        }
        (SpaceTag::E2 | SpaceTag::E3, FlipperKind::Line) => {
            let a = f.affine().unwrap().anchor().clone();
            let d = f.direction().unwrap();
            s.paths.push(vec![project(space, &(&a - &d * reach)), project(space, &(&a + &d * reach))]);
        }
        (SpaceTag::E3, FlipperKind::Plane) => {
            let a = f.affine().unwrap().anchor().clone();
            let n = f.normal().unwrap();
            let e1 = flipcalc::numkernel::reference_perpendicular(&n);
            let e2 = cross3(&n, &e1);
            let h = reach / 4.0;
            let corner = |x: f64, y: f64| project(space, &(&a + &e1 * (x * h) + &e2 * (y * h)));
            s.paths.push(vec![corner(-1.0, -1.0), corner(1.0, -1.0), corner(1.0, 1.0), corner(-1.0, 1.0), corner(-1.0, -1.0)]);
        }
        (SpaceTag::S2, FlipperKind::PointPair) => {
            let v = vecn(0, 3);
            s.dots.extend(project(space, &v));
            s.dots.extend(project(space, &-v));
        }
        (SpaceTag::S2, FlipperKind::Circle) => s.paths.push(circle_on_sphere(&vecn(0, 3), 0.0, space)),
        (SpaceTag::RP2, _) => s.dots.extend(project(space, &vecn(0, 3))),
        (SpaceTag::H2 | SpaceTag::H3, FlipperKind::Point) => s.dots.extend(project(space, &vecn(0, coords.len()))),
        (SpaceTag::H2, FlipperKind::Line) => {
            let n = vecn(0, 3);
            if let Some(p0) = foot_of_origin(&n) {
                let d = lorentz_cross(&p0, &n);
                let d = &d / (-lorentz_form(&d).norm_sq(&d)).sqrt();
                s.paths.push(geodesic(&p0, &d, space));
            }
        }
        (SpaceTag::H3, FlipperKind::Line) => s.paths.push(geodesic(&vecn(0, 4), &vecn(4, 8), space)),
        (SpaceTag::H3, FlipperKind::Plane) => {
            let n = vecn(0, 4);
            if let Some(p0) = foot_of_origin(&n) {
                let frame = spacelike_frame(&p0, &[n]);
                if frame.len() >= 2 {
                    let ring = (0..=180)
                        .map(|k| {
                            let t = k as f64 * std::f64::consts::PI / 90.0;
                            project(space, &(&p0 + &frame[0] * t.cos() + &frame[1] * t.sin()))
                        })
                        .collect();
                    s.paths.push(ring);
                }
            }
        }
        (SpaceTag::Moeb, FlipperKind::Circle) => s.paths.push(circle_on_sphere(&vecn(0, 3), coords[3], space)),
        (SpaceTag::Moeb, _) => {
            s.dots.extend(project(space, &vecn(0, 3)));
            s.dots.extend(project(space, &vecn(3, 6)));
        }
        _ => {}
    }
    s
}

/// Where a straight arrow attaches to a flipper: its dot, or the sampled
/// point nearest to `toward`.
fn anchor_point(s: &Shape, toward: P2) -> Option<P2> {
    let dist = |p: &P2| (p[0] - toward[0]).hypot(p[1] - toward[1]);
    let mut best: Option<P2> = None;
    let candidates = s.dots.iter().copied().chain(s.paths.iter().flat_map(|p| densify(p)));
    for p in candidates {
        if best.map_or(true, |b| dist(&p) < dist(&b) - 1e-12) {
            best = Some(p);
        }
    }
    best
}

/// Polyline vertices with extra points along each segment.
fn densify(path: &[Option<P2>]) -> Vec<P2> {
    let mut out = Vec::new();
    for w in path.windows(2) {
        if let [Some(a), Some(b)] = w {
            for k in 0..16 {
                let t = k as f64 / 16.0;
                out.push([a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t]);
            }
        }
    }
    if let Some(Some(last)) = path.last() {
        out.push(*last);
    }
    out
}

/// Meeting point of two line-like flippers and their directions there.
fn crossing(tail: &Flipper, head: &Flipper) -> Option<(P2, P2, P2)> {
    let space = tail.space();
    let linear = |f: &Flipper| matches!(f.kind(), FlipperKind::Line | FlipperKind::Circle);
    if !linear(tail) || !linear(head) {
        return None;
    }
    match space {
        SpaceTag::E2 => {
            let (n1, n2) = (tail.normal()?, head.normal()?);
            let det = n1[0] * n2[1] - n1[1] * n2[0];
            if det.abs() < 1e-9 {
                return None;
            }
            let (a1, a2) = (tail.affine()?.anchor().clone(), head.affine()?.anchor().clone());
            let (c1, c2) = (n1.dot(&a1), n2.dot(&a2));
            let x = [(c1 * n2[1] - c2 * n1[1]) / det, (n1[0] * c2 - n2[0] * c1) / det];
            let (d1, d2) = (tail.direction()?, head.direction()?);
            Some((x, [d1[0], d1[1]], [d2[0], d2[1]]))
        }
        SpaceTag::S2 => {
            let (n1, n2) = (tail.normal()?, head.normal()?);
            let mut x = cross3(&n1, &n2);
            if x.norm() < 1e-9 {
                return None;
            }
            x = x.normalize();
            if x[2] < 0.0 {
                x = -x;
            }
            let dir = |n: &Vector| tangent(space, &x, &cross3(n, &x));
            Some((project(space, &x)?, dir(&n1)?, dir(&n2)?))
        }
        SpaceTag::H2 => {
            let (n1, n2) = (tail.normal()?, head.normal()?);
            let x = hyperboloid_normalize(&lorentz_cross(&n1, &n2))?;
            let dir = |n: &Vector| tangent(space, &x, &lorentz_cross(&x, n));
            Some((project(space, &x)?, dir(&n1)?, dir(&n2)?))
        }
        _ => None,
    }
}

/// Projected direction of the model tangent `w` at `x`.
fn tangent(space: SpaceTag, x: &Vector, w: &Vector) -> Option<P2> {
    let eps = 1e-4 / w.norm().max(1e-300);
    let (a, b) = (project(space, x)?, project(space, &(x + w * eps))?);
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len = dx.hypot(dy);
    (len > 0.0).then(|| [dx / len, dy / len])
}

struct Svg {
    view: View,
    space: SpaceTag,
    reach: f64,
    out: String,
}

impl Svg {
    fn new(space: SpaceTag, view: View) -> Svg {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#,
            s = SIZE
        );
        let _ = writeln!(out, r#"<rect x="0" y="0" width="{s}" height="{s}" fill="white"/>"#, s = SIZE);
        let mut svg = Svg { view, space, reach: view.span * 2.0, out };
        svg.frame();
        svg
    }

    fn frame(&mut self) {
        let circle = match self.space {
            SpaceTag::H2 | SpaceTag::H3 | SpaceTag::S2 | SpaceTag::RP2 => Some(1.0),
            _ => None,
        };
        if let Some(r) = circle {
            let c = self.view.px([0.0, 0.0]);
            let rr = r / self.view.span * SIZE;
            let _ = writeln!(
                self.out,
                r#"<circle class="absolute" cx="{}" cy="{}" r="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
                num(c[0]),
                num(c[1]),
                num(rr)
            );
        }
    }

    fn points(&self, path: &[Option<P2>]) -> Vec<String> {
        let mut runs = Vec::new();
        let mut cur: Vec<String> = Vec::new();
        for p in path {
            match p {
                Some(p) => {
                    let q = self.view.px(*p);
                    cur.push(format!("{},{}", num(q[0]), num(q[1])));
                }
                None => {
                    if cur.len() > 1 {
                        runs.push(cur.join(" "));
                    }
                    cur.clear();
                }
            }
        }
        if cur.len() > 1 {
            runs.push(cur.join(" "));
        }
        runs
    }

    fn flipper(&mut self, id: &str, f: &Flipper, color: &str, dashed: bool) {
        let s = shape(f, self.reach);
        let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(self.out, r#"<g class="flipper" data-kind="{}"><title>{}</title>"#, f.kind(), escape(id));
        for path in &s.paths {
            for run in self.points(path) {
                let _ = writeln!(
                    self.out,
                    r#"<polyline points="{run}" fill="none" stroke="{color}" stroke-width="2"{dash}/>"#
                );
            }
        }
        for d in &s.dots {
            let q = self.view.px(*d);
            let _ = writeln!(self.out, r#"<circle cx="{}" cy="{}" r="4.5" fill="{color}"/>"#, num(q[0]), num(q[1]));
        }
        if f.is_whole() {
            let _ = writeln!(self.out, r#"<text x="8" y="20" font-size="14" fill="{color}">whole space</text>"#);
        }
        let _ = writeln!(self.out, "</g>");
    }

    fn head(&mut self, tip: P2, dir: P2, color: &str) {
        let (l, w) = (12.0, 5.0);
        let base = [tip[0] - dir[0] * l, tip[1] - dir[1] * l];
        let (nx, ny) = (-dir[1] * w, dir[0] * w);
        let _ = writeln!(
            self.out,
            r#"<polygon points="{},{} {},{} {},{}" fill="{color}"/>"#,
            num(tip[0]),
            num(tip[1]),
            num(base[0] + nx),
            num(base[1] + ny),
            num(base[0] - nx),
            num(base[1] - ny)
        );
    }

    fn straight_arrow(&mut self, a: P2, b: P2, color: &str) {
        let (pa, pb) = (self.view.px(a), self.view.px(b));
        let (dx, dy) = (pb[0] - pa[0], pb[1] - pa[1]);
        let len = dx.hypot(dy);
        if len < 1.0 {
            let _ = writeln!(
                self.out,
                r#"<circle cx="{}" cy="{}" r="8" fill="none" stroke="{color}" stroke-width="2"/>"#,
                num(pa[0]),
                num(pa[1])
            );
            return;
        }
        let _ = writeln!(
            self.out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="2.5"/>"#,
            num(pa[0]),
            num(pa[1]),
            num(pb[0]),
            num(pb[1])
        );
        self.head(pb, [dx / len, dy / len], color);
    }

    /// Arc around `x` from the tail direction to the head direction, turning
    /// by the angle between the lines taken in `(-pi/2, pi/2]`.
    fn arc_arrow(&mut self, x: P2, dt: P2, dh: P2, color: &str) {
        use std::f64::consts::{FRAC_PI_2, PI};
        let c = self.view.px(x);
        // screen directions: y points down
        let (st, sh) = ([dt[0], -dt[1]], [dh[0], -dh[1]]);
        let mut a = (st[0] * sh[1] - st[1] * sh[0]).atan2(st[0] * sh[0] + st[1] * sh[1]);
        if a > FRAC_PI_2 {
            a -= PI;
        } else if a <= -FRAC_PI_2 {
            a += PI;
        }
        let t0 = st[1].atan2(st[0]);
        let t1 = t0 + a;
        let r = ARC_RADIUS;
        let start = [c[0] + r * t0.cos(), c[1] + r * t0.sin()];
        let end = [c[0] + r * t1.cos(), c[1] + r * t1.sin()];
        let sweep = if a > 0.0 { 1 } else { 0 };
        let _ = writeln!(
            self.out,
            r#"<path d="M {} {} A {r} {r} 0 0 {sweep} {} {}" fill="none" stroke="{color}" stroke-width="2.5"/>"#,
            num(start[0]),
            num(start[1]),
            num(end[0]),
            num(end[1])
        );
        let s = if a >= 0.0 { 1.0 } else { -1.0 };
        self.head(end, [-t1.sin() * s, t1.cos() * s], color);
    }

    fn arrow(&mut self, b: &Biflipper, color: &str) {
        if let Some((x, dt, dh)) = crossing(b.tail(), b.head()) {
            self.arc_arrow(x, dt, dh, color);
            return;
        }
        let (st, sh) = (shape(b.tail(), self.reach), shape(b.head(), self.reach));
        let center = [self.view.min[0] + self.view.span / 2.0, self.view.min[1] + self.view.span / 2.0];
        // attach to dots first so point-line arrows drop a perpendicular
        let (a, h) = match (st.dots.first(), sh.dots.first()) {
            (Some(a), _) => (Some(*a), anchor_point(&sh, *a)),
            (None, Some(h)) => (anchor_point(&st, *h), Some(*h)),
            (None, None) => {
                let a = anchor_point(&st, center);
                (a, a.and_then(|a| anchor_point(&sh, a)))
            }
        };
        if let (Some(a), Some(h)) = (a, h) {
            self.straight_arrow(a, h, color);
        }
    }

    fn biflipper(&mut self, class: &str, id: &str, b: &Biflipper, color: &str, dashed: bool) {
        let _ = writeln!(self.out, r#"<g class="{class}"><title>{}</title>"#, escape(id));
        self.flipper(&format!("{id}.tail"), b.tail(), color, dashed);
        self.flipper(&format!("{id}.head"), b.head(), color, dashed);
        self.arrow(b, color);
        let _ = writeln!(self.out, "</g>");
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn e2_view<'a>(flippers: impl Iterator<Item = &'a Flipper>) -> View {
    let fs: Vec<&Flipper> = flippers.collect();
    let mut pts: Vec<P2> = Vec::new();
    for f in &fs {
        if let Some(a) = f.affine() {
            let x = a.anchor();
            pts.push([x[0], x.get(1).copied().unwrap_or(0.0)]);
        }
    }
    for (i, f) in fs.iter().enumerate() {
        for g in &fs[i + 1..] {
            if let Some((x, _, _)) = crossing(f, g) {
                if x[0].hypot(x[1]) < 1e3 {
                    pts.push(x);
                }
            }
        }
    }
    if pts.is_empty() {
        return View::centered(5.0);
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = ((hi[0] - lo[0]).max(hi[1] - lo[1]) + 4.0).max(6.0);
    let mid = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    View { min: [mid[0] - span / 2.0, mid[1] - span / 2.0], span }
}

fn view_for<'a>(space: SpaceTag, flippers: impl Iterator<Item = &'a Flipper>) -> View {
    match space {
        SpaceTag::E1 | SpaceTag::E2 | SpaceTag::E3 => e2_view(flippers),
        SpaceTag::H2 | SpaceTag::H3 => View::centered(1.1),
        SpaceTag::S2 | SpaceTag::RP2 => View::centered(2.2),
        SpaceTag::Moeb => View::centered(3.0),
    }
}

/// Every flipper and biflipper of a scene.
pub fn scene_svg(scene: &Scene) -> String {
    let view = view_for(scene.space, scene.flippers.values());
    let mut svg = Svg::new(scene.space, view);
    for (id, f) in &scene.flippers {
        svg.flipper(id, f, "black", false);
    }
    for (k, (id, b)) in scene.biflippers.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let _ = writeln!(svg.out, r#"<g class="biflipper-arrow"><title>{}</title>"#, escape(id));
        svg.arrow(b, color);
        let _ = writeln!(svg.out, "</g>");
    }
    svg.finish()
}

/// The operands, one group per move in step order, and the result.
pub fn composition_svg(space: SpaceTag, first: &Biflipper, second: &Biflipper, result: &H2TResult) -> String {
    let mut all: Vec<&Flipper> = vec![first.tail(), first.head(), second.tail(), second.head()];
    all.extend([result.biflipper.tail(), result.biflipper.head()]);
    for m in &result.steps {
        all.extend([m.after.tail(), m.after.head()]);
    }
    let view = view_for(space, all.into_iter());
    let mut svg = Svg::new(space, view);
    let _ = writeln!(svg.out, r#"<g class="operands">"#);
    svg.biflipper("operand", "first", first, PALETTE[0], false);
    svg.biflipper("operand", "second", second, PALETTE[1], false);
    let _ = writeln!(svg.out, "</g>");
    for (k, m) in result.steps.iter().enumerate() {
        let _ = writeln!(svg.out, r#"<g class="move" data-step="{k}" data-kind="{}">"#, m.kind.as_str());
        svg.biflipper("before", &format!("step{k}.before"), &m.before, GHOST, true);
        svg.biflipper("after", &format!("step{k}.after"), &m.after, PALETTE[2 + k % 3], false);
        let _ = writeln!(svg.out, "</g>");
    }
    let _ = writeln!(svg.out, r#"<g class="result">"#);
    svg.biflipper("composite", "result", &result.biflipper, "black", false);
    let _ = writeln!(svg.out, "</g>");
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use flipcalc::headtotail::{head_to_tail, Mode};
    use flipcalc::Tolerance;

    fn line(p: [f64; 2], d: [f64; 2]) -> Flipper {
        Flipper::e_line(&p, &d).unwrap()
    }

    #[test]
    fn one_group_per_move() {
        let bt = Biflipper::new(line([0.0, 0.0], [1.0, 0.0]), line([0.0, 0.0], [0.0, 1.0])).unwrap();
        let bs = Biflipper::new(line([2.0, 0.0], [1.0, 1.0]), line([2.0, 0.0], [0.0, 1.0])).unwrap();
        let res = head_to_tail(&bt, &bs, Mode::Fallback, Tolerance::default()).unwrap();
        let svg = composition_svg(SpaceTag::E2, &bt, &bs, &res);
        assert_eq!(svg.matches(r#"<g class="move""#).count(), res.steps.len());
        assert!(svg.contains("<path d=\"M "), "intersecting lines get an arc-arrow");
        assert_eq!(svg, composition_svg(SpaceTag::E2, &bt, &bs, &res));
    }

    #[test]
    fn projections() {
        assert_eq!(project(SpaceTag::S2, &Vector::from_vec(vec![0.0, 0.0, 1.0])), Some([0.0, 0.0]));
        assert_eq!(project(SpaceTag::S2, &Vector::from_vec(vec![0.0, 0.0, -1.0])), None);
        let ideal = project(SpaceTag::H2, &Vector::from_vec(vec![1.0, 1.0, 0.0])).unwrap();
        assert!((ideal[0] - 1.0).abs() < 1e-12);
        let origin = project(SpaceTag::H2, &Vector::from_vec(vec![1.0, 0.0, 0.0])).unwrap();
        assert_eq!(origin, [0.0, 0.0]);
    }

    #[test]
    fn numbers_have_no_negative_zero() {
        assert_eq!(num(-0.0001), "0.000");
        assert_eq!(num(1.23456), "1.235");
    }

    #[test]
    fn disk_scene_draws_the_absolute() {
        let doc = r#"{"space": "H2", "flippers": [
            {"id": "a", "kind": "line", "coords": [0, 1, 0], "chart": "hyperboloid"},
            {"id": "b", "kind": "line", "coords": [0, 0, 1], "chart": "hyperboloid"}],
            "biflippers": [{"id": "r", "tail": "a", "head": "b"}]}"#;
        let scene = Scene::parse(doc).unwrap();
        let svg = scene_svg(&scene);
        assert!(svg.contains(r#"class="absolute""#));
        assert!(svg.contains("<path d=\"M "));
    }
}
