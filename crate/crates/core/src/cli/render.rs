//! Deterministic SVG and CSV output.

use std::fmt::Write as _;

use crate::delone::MSet;
use crate::error::{Error, Result};
use crate::geometry::{min_pairwise_distance, Region};
use crate::tiling::{AdjointSolution, Patch, Raster, Support};

pub const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

struct View {
    lo: [f64; 2],
    hi: [f64; 2],
}

impl View {
    /// Bounding box with a 5% margin; 1D data gets a band of height 10% of its width.
    fn new(b: &Region) -> Self {
        let (lo, hi) = if b.dim() == 1 {
            let w = (b.hi[0] - b.lo[0]).max(1.0);
            ([b.lo[0], -0.05 * w], [b.hi[0], 0.05 * w])
        } else {
            ([b.lo[0], b.lo[1]], [b.hi[0], b.hi[1]])
        };
        let m = [0.05 * (hi[0] - lo[0]).max(1e-9), 0.05 * (hi[1] - lo[1]).max(1e-9)];
        View { lo: [lo[0] - m[0], lo[1] - m[1]], hi: [hi[0] + m[0], hi[1] + m[1]] }
    }

    fn header(&self, s: &mut String) {
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\">",
            fmt(self.lo[0]),
            fmt(-self.hi[1]),
            fmt(self.hi[0] - self.lo[0]),
            fmt(self.hi[1] - self.lo[1])
        );
    }
}

fn fmt(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn empty_svg() -> String {
    "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 1 1\">\n<desc>empty dataset</desc>\n</svg>\n"
        .into()
}

fn check_dim(d: usize) -> Result<()> {
    if d > 2 {
        return Err(Error::Unsupported(format!("SVG rendering needs d <= 2, got {d}; export CSV instead")));
    }
    Ok(())
}

/// Points as circles of radius r/4, colored by color index. y is flipped so that up is up.
pub fn render_points(x: &MSet) -> Result<String> {
    let d = x.frame().dim();
    check_dim(d)?;
    let flat = x.flattened();
    let Some(b) = x.bounding_box() else { return Ok(empty_svg()) };
    let (_, pos) = x.support_with_positions();
    let r = if pos.len() > 1 { 0.5 * min_pairwise_distance(&pos) } else { 1.0 };
    let view = View::new(&b);
    let mut s = String::new();
    view.header(&mut s);
    for (c, _, p) in &flat {
        let (px, py) = (p[0], if d == 2 { p[1] } else { 0.0 });
        let _ = writeln!(
            s,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>",
            fmt(px),
            fmt(-py),
            fmt(r / 4.0),
            color(*c)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn inner_bounds(r: &Raster) -> Option<Region> {
    let centers: Vec<Vec<f64>> = r.inner.iter().map(|c| r.cell_center(c)).collect();
    let b = Region::bounding(&centers)?;
    let h = r.eps / 2.0;
    Some(Region { lo: b.lo.iter().map(|v| v - h).collect(), hi: b.hi.iter().map(|v| v + h).collect() })
}

/// One filled rectangle per interval (1D) or per bounding box of the tile interior (2D) of each placement.
pub fn render_tiling(patch: &Patch, tiles: &AdjointSolution) -> Result<String> {
    let d = patch.frame.dim();
    check_dim(d)?;
    if patch.placements.is_empty() {
        return Ok(empty_svg());
    }
    let positions = patch.positions();
    let mut rects: Vec<(usize, [f64; 2], [f64; 2])> = Vec::new();
    for (pl, t) in patch.placements.iter().zip(&positions) {
        let tile = &tiles.tiles[pl.tile];
        match &tile.support {
            Support::Intervals { approx, .. } => {
                for (a, b) in approx {
                    rects.push((pl.tile, [t[0] + a, -0.5], [t[0] + b, 0.5]));
                }
            }
            Support::Raster(ra) => {
                if let Some(bb) = inner_bounds(ra) {
                    let ty = if d == 2 { t[1] } else { 0.0 };
                    let (ly, hy) = if d == 2 { (bb.lo[1], bb.hi[1]) } else { (-0.5, 0.5) };
                    rects.push((pl.tile, [t[0] + bb.lo[0], ty + ly], [t[0] + bb.hi[0], ty + hy]));
                }
            }
        }
    }
    let lo: Vec<f64> = (0..2).map(|k| rects.iter().map(|r| r.1[k]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..2).map(|k| rects.iter().map(|r| r.2[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let view = View::new(&if d == 1 { Region::interval(lo[0], hi[0]) } else { Region { lo, hi } });
    let mut s = String::new();
    view.header(&mut s);
    let stroke = 0.002 * (view.hi[0] - view.lo[0]);
    for (c, a, b) in &rects {
        let (y0, y1) = if d == 1 { (0.8 * view.lo[1], 0.8 * view.hi[1]) } else { (a[1], b[1]) };
        let _ = writeln!(
            s,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"#000000\" stroke-width=\"{}\"/>",
            fmt(a[0]),
            fmt(-y1),
            fmt(b[0] - a[0]),
            fmt(y1 - y0),
            color(*c),
            fmt(stroke)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// RFC 4180 quoting.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// color, module coordinates, positions.
pub fn points_csv(x: &MSet) -> String {
    let s_rank = x.frame().rank();
    let d = x.frame().dim();
    let mut out = String::from("color");
    for k in 0..s_rank {
        let _ = write!(out, ",n{k}");
    }
    for k in 0..d {
        let _ = write!(out, ",x{k}");
    }
    out.push('\n');
    let mut rows = x.flattened();
    rows.sort_by(|a, b| {
        a.2.iter()
            .zip(&b.2)
            .map(|(u, v)| u.total_cmp(v))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });
    for (c, p, pos) in rows {
        out.push_str(&c.to_string());
        for v in p {
            let _ = write!(out, ",{v}");
        }
        for v in pos {
            let _ = write!(out, ",{v:.12}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substitution::{fibonacci, find_generating_cluster, generate_patch};
    use crate::tiling::{mset_to_tiling, solve_adjoint};

    #[test]
    fn fibonacci_svg() {
        let phi = fibonacci();
        let g = find_generating_cluster(&phi).unwrap();
        let region = Region::interval(0.0, 30.0);
        let x = generate_patch(&phi, &g, &region).unwrap().restrict(&region);
        let tiles = solve_adjoint(&phi, 1e-9).unwrap();
        let (patch, _) = mset_to_tiling(&x, &tiles, &region).unwrap();
        let svg = render_tiling(&patch, &tiles).unwrap();
        assert_eq!(svg.matches("<rect").count(), patch.placements.len());
        assert_eq!(svg, render_tiling(&patch, &tiles).unwrap());
        assert_eq!(render_points(&x).unwrap().matches("<circle").count(), x.len());
        let empty = MSet::empty(x.frame().clone(), 2);
        assert!(render_points(&empty).unwrap().contains("empty dataset"));
    }

    #[test]
    fn quoting() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
        assert_eq!(csv_field("plain"), "plain");
    }
}
