//! SVG weight diagrams for rank one and two: windows, wall faces and μ-arrows.

use std::fmt::Write;

use num_traits::ToPrimitive;

use crate::arrangement::Arrangement;
use crate::error::{Error, Result};
use crate::geometry::Polytope;
use crate::linalg::{qadd, qv, QVec, Rat, Weight};
use crate::rep::QSRep;
use crate::windows::{dagger, wall_crossing, window};

const SCALE: f64 = 36.0;

struct Canvas {
    dim: usize,
    lo: [f64; 2],
    hi: [f64; 2],
    body: String,
}

fn f(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(0.0)
}

fn pt2(v: &[Rat]) -> [f64; 2] {
    [f(&v[0]), v.get(1).map_or(0.0, f)]
}

impl Canvas {
    fn new(dim: usize, points: impl IntoIterator<Item = [f64; 2]>) -> Canvas {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for i in 0..2 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        for i in 0..2 {
            lo[i] = (lo[i] - 1.0).floor();
            hi[i] = (hi[i] + 1.0).ceil();
        }
        Canvas { dim, lo, hi, body: String::new() }
    }

    fn xy(&self, p: [f64; 2]) -> (f64, f64) {
        ((p[0] - self.lo[0]) * SCALE, (self.hi[1] - p[1]) * SCALE)
    }

    fn lattice(&mut self) {
        if self.dim == 1 {
            let (x0, y) = self.xy([self.lo[0], 0.0]);
            let (x1, _) = self.xy([self.hi[0], 0.0]);
            let _ = writeln!(self.body, r#"<line class="axis" x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="black"/>"#);
        }
        for i in (self.lo[0] as i64)..=(self.hi[0] as i64) {
            for j in (self.lo[1] as i64)..=(self.hi[1] as i64) {
                let (x, y) = self.xy([i as f64, j as f64]);
                let _ = writeln!(self.body, r#"<circle class="lattice" cx="{x}" cy="{y}" r="1.2" fill="gray"/>"#);
            }
        }
    }

    fn polygon(&mut self, class: &str, p: &Polytope, color: &str) {
        let pts = ordered_vertices(p);
        if self.dim == 1 {
            let (x0, y) = self.xy(pts[0]);
            let (x1, _) = self.xy(*pts.last().unwrap());
            let _ = writeln!(self.body, r#"<line class="{class}" x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="{color}" stroke-width="4" opacity="0.5"/>"#);
            return;
        }
        let s: Vec<String> = pts.iter().map(|&q| self.xy(q)).map(|(x, y)| format!("{x},{y}")).collect();
        let _ = writeln!(self.body, r#"<polygon class="{class}" points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, s.join(" "));
    }

    fn segment(&mut self, class: &str, a: [f64; 2], b: [f64; 2], color: &str) {
        let (x0, y0) = self.xy(a);
        let (x1, y1) = self.xy(b);
        let _ = writeln!(self.body, r#"<line class="{class}" x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="{color}" stroke-width="5" opacity="0.4"/>"#);
    }

    fn bullet(&mut self, class: &str, p: [f64; 2], color: &str, label: Option<&str>) {
        let (x, y) = self.xy(p);
        let _ = writeln!(self.body, r#"<circle class="{class}" cx="{x}" cy="{y}" r="4" fill="{color}"/>"#);
        if let Some(l) = label {
            let _ = writeln!(self.body, r#"<text x="{}" y="{}" font-size="11" fill="{color}">{l}</text>"#, x + 5.0, y + 14.0);
        }
    }

    fn arrow(&mut self, a: [f64; 2], b: [f64; 2]) {
        let (x0, y0) = self.xy(a);
        let (x1, y1) = self.xy(b);
        let (mx, my) = ((x0 + x1) / 2.0 - (y1 - y0) * 0.15, (y0 + y1) / 2.0 + (x1 - x0) * 0.15);
        let _ = writeln!(
            self.body,
            r#"<path class="mu-arrow" d="M {x0} {y0} Q {mx} {my} {x1} {y1}" fill="none" stroke="black" stroke-width="1.2" marker-end="url(#head)"/>"#
        );
    }

    fn finish(self, title: &str) -> String {
        let w = (self.hi[0] - self.lo[0]) * SCALE;
        let h = if self.dim == 1 { 2.0 * SCALE } else { (self.hi[1] - self.lo[1]) * SCALE };
        let shift = if self.dim == 1 { -(self.hi[1] * SCALE - SCALE) } else { 0.0 };
        format!(
            concat!(
                r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
                "\n<title>{title}</title>\n",
                r#"<defs><marker id="head" markerWidth="8" markerHeight="8" refX="7" refY="4" orient="auto"><path d="M0,0 L8,4 L0,8 z"/></marker></defs>"#,
                "\n<g transform=\"translate(0,{shift})\">\n{body}</g>\n</svg>\n"
            ),
            w = w,
            h = h,
            title = title,
            shift = shift,
            body = self.body
        )
    }
}

/// Vertices in counterclockwise order around their centroid (rank 2) or sorted (rank 1).
fn ordered_vertices(p: &Polytope) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = p.vertices.iter().map(|v| pt2(v)).collect();
    let n = pts.len() as f64;
    let c = pts.iter().fold([0.0, 0.0], |a, b| [a[0] + b[0] / n, a[1] + b[1] / n]);
    pts.sort_by(|a, b| {
        let ta = (a[1] - c[1]).atan2(a[0] - c[0]);
        let tb = (b[1] - c[1]).atan2(b[0] - c[0]);
        ta.partial_cmp(&tb).unwrap()
    });
    pts
}

fn check_rank(rep: &QSRep) -> Result<()> {
    if rep.rank() > 2 {
        return Err(Error::UnsupportedDimensionForSvg(rep.rank()));
    }
    Ok(())
}

fn wpt(w: &Weight) -> [f64; 2] {
    pt2(&qv(w))
}

/// The polytope `δ+∇` with the window `C_δ`.
pub fn window_svg(rep: &QSRep, arr: &Arrangement, delta: &[Rat]) -> Result<String> {
    check_rank(rep)?;
    let w = window(rep, arr, delta)?;
    let poly = rep.nabla.translate(delta);
    let mut c = Canvas::new(rep.rank(), poly.vertices.iter().map(|v| pt2(v)));
    c.lattice();
    c.polygon("nabla", &poly, "black");
    for chi in &w.chars {
        c.bullet("window", wpt(chi), "red", None);
    }
    c.bullet("delta", pt2(delta), "blue", Some("δ"));
    Ok(c.finish("window"))
}

/// `δ₀+½Σ` with the faces of `ℱ_(δ,δ′)` and their daggers, marking `ρ+χ` and `ρ+μ(χ)`.
pub fn faces_svg(rep: &QSRep, arr: &Arrangement, delta: &[Rat], delta_prime: &[Rat]) -> Result<String> {
    check_rank(rep)?;
    let cr = wall_crossing(rep, arr, delta, delta_prime)?;
    let rho = rep.root_datum.rho();
    let poly = rep.half_sigma.translate(&cr.delta0);
    let mut c = Canvas::new(rep.rank(), poly.vertices.iter().map(|v| pt2(v)));
    c.lattice();
    c.polygon("half-sigma", &poly, "black");
    for (k, fc) in cr.faces.iter().enumerate() {
        let dag = dagger(rep, &fc.face)?;
        for (face, class, color) in [(&fc.face, "face", "red"), (&dag, "face-dagger", "blue")] {
            let vs: Vec<&QVec> = face.face.vertex_indices.iter().map(|&i| &poly.vertices[i]).collect();
            let a = pt2(vs[0]);
            let b = pt2(vs[vs.len() - 1]);
            if vs.len() == 1 {
                c.bullet(class, a, color, Some(&format!("F{}{}", k + 1, if class == "face" { "" } else { "†" })));
            } else {
                c.segment(class, a, b, color);
            }
        }
        for (chi, img) in fc.chars.iter().zip(&fc.images) {
            c.bullet("chi", pt2(&qadd(&rho, &qv(chi))), "black", None);
            c.bullet("chi-image", pt2(&qadd(&rho, &qv(img))), "black", None);
        }
    }
    for (p, name, color) in [(delta, "δ", "red"), (&cr.delta0[..], "δ₀", "teal"), (delta_prime, "δ′", "blue")] {
        c.bullet("delta", pt2(p), color, Some(name));
    }
    Ok(c.finish("faces"))
}

/// The polytopes `δ+∇`, `δ₀+∇`, `δ′+∇` with the arrows `χ ↦ μ(χ)`.
pub fn mu_svg(rep: &QSRep, arr: &Arrangement, delta: &[Rat], delta_prime: &[Rat]) -> Result<String> {
    check_rank(rep)?;
    let cr = wall_crossing(rep, arr, delta, delta_prime)?;
    let polys: Vec<(Polytope, &str)> = vec![
        (rep.nabla.translate(delta), "red"),
        (rep.nabla.translate(&cr.delta0), "teal"),
        (rep.nabla.translate(delta_prime), "blue"),
    ];
    let mut c = Canvas::new(rep.rank(), polys.iter().flat_map(|(p, _)| p.vertices.iter().map(|v| pt2(v))));
    c.lattice();
    if rep.rank() == 2 && arr.dim() == 1 {
        let b = qv(&arr.basis[0]);
        let k = Rat::from_integer(((c.hi[0] - c.lo[0]).abs() + (c.hi[1] - c.lo[1]).abs()) as i128);
        let ends: Vec<QVec> = [-k, k].iter().map(|s| b.iter().map(|x| x * s).collect()).collect();
        c.segment("invariant-line", pt2(&ends[0]), pt2(&ends[1]), "purple");
    }
    for (p, color) in &polys {
        c.polygon("nabla", p, color);
    }
    for fc in &cr.faces {
        for (chi, img) in fc.chars.iter().zip(&fc.images) {
            c.bullet("chi", wpt(chi), "black", None);
            c.bullet("chi-image", wpt(img), "black", None);
            c.arrow(wpt(chi), wpt(img));
        }
    }
    for (p, name, color) in [(delta, "δ", "red"), (&cr.delta0[..], "δ₀", "teal"), (delta_prime, "δ′", "blue")] {
        c.bullet("delta", pt2(p), color, Some(name));
    }
    Ok(c.finish("mu"))
}

/// Number of elements of the given class in an SVG produced here.
pub fn count_class(svg: &str, class: &str) -> usize {
    svg.matches(&format!("class=\"{class}\"")).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{gl2_sym3, torus1};
    use crate::linalg::q;

    #[test]
    fn gl2_pictures() {
        let rep = gl2_sym3();
        let arr = Arrangement::build(&rep).unwrap();
        let d = vec![Rat::new(-1, 4), Rat::new(-1, 4)];
        let s = window_svg(&rep, &arr, &d).unwrap();
        assert_eq!(count_class(&s, "window"), 12);
        assert_eq!(count_class(&s, "nabla"), 1);
        let (a, b) = (vec![q(0), q(0)], vec![q(1), q(1)]);
        let s = faces_svg(&rep, &arr, &a, &b).unwrap();
        assert_eq!(count_class(&s, "chi"), 3);
        assert_eq!(count_class(&s, "face") + count_class(&s, "face-dagger"), 4);
        let s = mu_svg(&rep, &arr, &a, &b).unwrap();
        assert_eq!(count_class(&s, "mu-arrow"), 3);
        assert_eq!(count_class(&s, "nabla"), 3);
    }

    #[test]
    fn number_line_and_rank_limit() {
        let rep = torus1(&[1, 1, -1, -1]).unwrap();
        let arr = Arrangement::build(&rep).unwrap();
        let s = window_svg(&rep, &arr, &[Rat::new(1, 2)]).unwrap();
        assert_eq!(count_class(&s, "window"), 2);
        assert_eq!(count_class(&s, "axis"), 1);
        let rep3 = QSRep::from_torus(vec![vec![1, 0, 0], vec![-1, 0, 0], vec![0, 1, 0], vec![0, -1, 0], vec![0, 0, 1], vec![0, 0, -1]]).unwrap();
        let arr3 = Arrangement::build(&rep3).unwrap();
        let h = vec![Rat::new(1, 2); 3];
        assert_eq!(window_svg(&rep3, &arr3, &h).unwrap_err(), Error::UnsupportedDimensionForSvg(3));
    }
}
