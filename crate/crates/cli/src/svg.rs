//! Scatter plots of point snapshots. All frames of one render share a
//! viewBox so they can be flipped through without the axes jumping.

use std::fmt::Write;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
const UNLABELLED: &str = "#333333";

/// Plane position of a point: the first two coordinates, padded with 0.
fn planar(p: &[f64]) -> (f64, f64) {
    (
        p.first().copied().unwrap_or(0.0),
        p.get(1).copied().unwrap_or(0.0),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewBox {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl ViewBox {
    /// Bounding box of every point in every frame, with a 5% margin. SVG's
    /// y axis points down, so y is negated.
    pub fn covering<'a>(frames: impl IntoIterator<Item = &'a [Vec<f64>]>) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for frame in frames {
            for p in frame {
                let (x, y) = planar(p);
                x0 = x0.min(x);
                x1 = x1.max(x);
                y0 = y0.min(-y);
                y1 = y1.max(-y);
            }
        }
        if !x0.is_finite() {
            return Self {
                x: -1.0,
                y: -1.0,
                width: 2.0,
                height: 2.0,
            };
        }
        let side = (x1 - x0).max(y1 - y0).max(1e-9);
        let margin = 0.05 * side;
        Self {
            x: x0 - margin,
            y: y0 - margin,
            width: (x1 - x0) + 2.0 * margin,
            height: (y1 - y0) + 2.0 * margin,
        }
    }
}

pub fn render_frame(
    points: &[Vec<f64>],
    labels: Option<&[usize]>,
    view: &ViewBox,
    pixels: u32,
    title: &str,
) -> String {
    let longest = view.width.max(view.height);
    let radius = 0.008 * longest;
    let (w, h) = (
        (pixels as f64 * view.width / longest).round(),
        (pixels as f64 * view.height / longest).round(),
    );
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.6} {:.6} {:.6} {:.6}" width="{w}" height="{h}">"#,
        view.x, view.y, view.width, view.height
    );
    let _ = writeln!(s, "<title>{title}</title>");
    let _ = writeln!(
        s,
        r#"<rect x="{:.6}" y="{:.6}" width="{:.6}" height="{:.6}" fill="white"/>"#,
        view.x, view.y, view.width, view.height
    );
    for (i, p) in points.iter().enumerate() {
        let (x, y) = planar(p);
        let fill = labels.map_or(UNLABELLED, |l| PALETTE[l[i] % PALETTE.len()]);
        let _ = writeln!(
            s,
            r#"<circle cx="{x:.6}" cy="{:.6}" r="{radius:.6}" fill="{fill}"/>"#,
            -y
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_circle_per_point() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 2.0], vec![-1.0, 0.5]];
        let view = ViewBox::covering([pts.as_slice()]);
        let svg = render_frame(&pts, Some(&[0, 1, 1]), &view, 400, "t");
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches(PALETTE[1]).count(), 2);
    }

    #[test]
    fn view_covers_all_frames() {
        let a = vec![vec![0.0, 0.0]];
        let b = vec![vec![10.0, -4.0]];
        let v = ViewBox::covering([a.as_slice(), b.as_slice()]);
        assert!(v.x < 0.0 && v.x + v.width > 10.0);
        assert!(v.y < 0.0 && v.y + v.height > 4.0);
    }
}
