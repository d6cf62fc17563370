//! Two-panel SVG rendering of a finished extension: the source square
//! triangulation on the left, the image polygon triangulation on the
//! right, with matching piece colors, the inscribed ball, contact points,
//! sector chords, and the fan center overlaid. Pure SVG 1.1, no external
//! assets, every panel scaled into a 1000-unit box.

use std::fmt::Write as _;

use crate::ball::CentralBall;
use crate::extend::{CaseKind, Extension};
use crate::geom::Point2;

const PANEL: f64 = 1000.0;
const GAP: f64 = 50.0;

struct Panel {
    ox: f64,
    min: Point2,
    max: Point2,
    scale: f64,
}

impl Panel {
    fn fit(ox: f64, min: Point2, max: Point2) -> Panel {
        let w = (max.x - min.x).max(1e-12);
        let h = (max.y - min.y).max(1e-12);
        let pad = 0.03 * w.max(h);
        let min = Point2::new(min.x - pad, min.y - pad);
        let max = Point2::new(max.x + pad, max.y + pad);
        let scale = PANEL / (max.x - min.x).max(max.y - min.y);
        Panel {
            ox,
            min,
            max,
            scale,
        }
    }

    fn x(&self, p: Point2) -> f64 {
        self.ox + (p.x - self.min.x) * self.scale
    }

    fn y(&self, p: Point2) -> f64 {
        (self.max.y - p.y) * self.scale
    }
}

fn piece_color(i: usize) -> String {
    // Golden-ratio hue walk keeps adjacent pieces distinguishable.
    let h = (i as f64 * 0.618033988749895).fract() * 360.0;
    let (s, v) = (0.55, 0.88);
    let c = v * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let to8 = |f: f64| ((f + m) * 255.0).round() as u8;
    format!("#{:02x}{:02x}{:02x}", to8(r), to8(g), to8(b))
}

fn tri_path(panel: &Panel, t: &[Point2; 3], fill: &str) -> String {
    format!(
        "<path d=\"M {:.2} {:.2} L {:.2} {:.2} L {:.2} {:.2} Z\" fill=\"{fill}\" \
         fill-opacity=\"0.85\" stroke=\"#333333\" stroke-width=\"0.6\"/>\n",
        panel.x(t[0]),
        panel.y(t[0]),
        panel.x(t[1]),
        panel.y(t[1]),
        panel.x(t[2]),
        panel.y(t[2]),
    )
}

fn dot(panel: &Panel, p: Point2, r: f64, fill: &str) -> String {
    format!(
        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{r}\" fill=\"{fill}\"/>\n",
        panel.x(p),
        panel.y(p)
    )
}

/// Chord-normal clearance markers of one corrected sector, recovered
/// from the ball and the chord: the cell apex and the pulled midpoint.
fn wedge_markers(ball: &CentralBall, case: CaseKind, si: usize) -> Option<(Point2, Point2)> {
    let k = ball.contacts.len();
    let a1 = ball.contacts[si].point;
    let a2 = ball.contacts[(si + 1) % k].point;
    let m = a1.add(a2).scale(0.5);
    let dir = a2.sub(a1).unit()?;
    let mut n = Point2::new(-dir.y, dir.x);
    let toward_center = ball.center.sub(m);
    match case {
        CaseKind::B => {
            if n.dot(toward_center) > 0.0 {
                n = n.scale(-1.0);
            }
            let c = ball.center.add(n.scale(ball.r));
            let d = ball.center.add(n.scale(ball.r / 4.0));
            Some((c, d))
        }
        CaseKind::C => {
            if n.dot(toward_center) < 0.0 {
                n = n.scale(-1.0);
            }
            let c = m.add(n.scale(3f64.sqrt() / 2.0 * a1.dist(a2)));
            let d = c.add(m.sub(c).scale(1.0 / 3.0));
            Some((c, d))
        }
        CaseKind::A => None,
    }
}

/// Renders the extension as a standalone two-panel SVG document.
pub fn render_svg(ext: &Extension, ball: &CentralBall) -> String {
    let mut dmin = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut dmax = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in &ext.pieces {
        for &v in &p.dst {
            dmin = Point2::new(dmin.x.min(v.x), dmin.y.min(v.y));
            dmax = Point2::new(dmax.x.max(v.x), dmax.y.max(v.y));
        }
    }
    let left = Panel::fit(0.0, Point2::new(-0.5, -0.5), Point2::new(0.5, 0.5));
    let right = Panel::fit(PANEL + GAP, dmin, dmax);
    let width = 2.0 * PANEL + GAP;

    let mut s = String::new();
    let _ = write!(
        s,
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         viewBox=\"0 0 {width:.0} {PANEL:.0}\">\n\
         <rect x=\"0\" y=\"0\" width=\"{width:.0}\" height=\"{PANEL:.0}\" fill=\"#ffffff\"/>\n"
    );
    for (i, p) in ext.pieces.iter().enumerate() {
        let fill = piece_color(i);
        s.push_str(&tri_path(&left, &p.src, &fill));
        s.push_str(&tri_path(&right, &p.dst, &fill));
    }

    let _ = write!(
        s,
        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"none\" stroke=\"#000000\" \
         stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n",
        right.x(ball.center),
        right.y(ball.center),
        ball.r * right.scale
    );
    let k = ball.contacts.len();
    for i in 0..k {
        let a = ball.contacts[i].point;
        let b = ball.contacts[(i + 1) % k].point;
        let _ = write!(
            s,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#000000\" \
             stroke-width=\"1.2\"/>\n",
            right.x(a),
            right.y(a),
            right.x(b),
            right.y(b)
        );
        s.push_str(&dot(&right, a, 5.0, "#d62728"));
    }
    for &si in &ext.phi_sectors {
        if let Some((c, d)) = wedge_markers(ball, ext.case, si) {
            s.push_str(&dot(&right, c, 5.0, "#1f77b4"));
            s.push_str(&dot(&right, d, 5.0, "#2ca02c"));
        }
    }
    s.push_str(&dot(&left, ext.o_src, 5.0, "#000000"));
    s.push_str(&dot(&right, ext.o_dst, 5.0, "#000000"));
    let _ = write!(
        s,
        "<text x=\"10\" y=\"24\" font-family=\"sans-serif\" font-size=\"20\" fill=\"#000000\">\
         source (case {})</text>\n\
         <text x=\"{:.0}\" y=\"24\" font-family=\"sans-serif\" font-size=\"20\" \
         fill=\"#000000\">image ({} pieces)</text>\n",
        ext.case.as_str(),
        PANEL + GAP + 10.0,
        ext.pieces.len()
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{point_on_square, RawVertex};
    use crate::pipeline::{run, PipelineOptions};
    use crate::tolerances::Tol;

    #[test]
    fn identity_svg_has_two_panels_and_matched_pieces() {
        let raw: Vec<RawVertex> = (0..8)
            .map(|i| {
                let t = i as f64 * 0.5;
                RawVertex {
                    t,
                    img: point_on_square(t),
                }
            })
            .collect();
        let tol = Tol::default();
        let opts = PipelineOptions {
            sample_pairs: 200,
            ..Default::default()
        };
        let res = run(&raw, None, false, &tol, &opts).unwrap();
        let svg = render_svg(&res.extension, &res.ball);
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains("viewBox=\"0 0 2050 1000\""));
        let paths = svg.matches("<path ").count();
        assert_eq!(paths, 2 * res.extension.pieces.len());
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.ends_with("</svg>\n"));
    }
}
