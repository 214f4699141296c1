//! Boxes and a uniform-grid spatial index for float positions.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Axis-aligned closed box.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Region {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Dimension("box corners must have equal positive length".into()));
        }
        if lo.iter().chain(&hi).any(|x| !x.is_finite()) {
            return Err(Error::Unbounded("box has a non-finite corner".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::Precondition("box lower corner exceeds upper corner".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn interval(a: f64, b: f64) -> Self {
        Self { lo: vec![a.min(b)], hi: vec![a.max(b)] }
    }

    /// The cube [c − h, c + h]^d.
    pub fn cube(center: &[f64], half: f64) -> Self {
        Self { lo: center.iter().map(|c| c - half).collect(), hi: center.iter().map(|c| c + half).collect() }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (a, b))| *a <= *x && *x <= *b)
    }

    pub fn contains_ball(&self, p: &[f64], r: f64) -> bool {
        p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (a, b))| *a <= x - r && x + r <= *b)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).collect()
    }

    pub fn min_width(&self) -> f64 {
        self.widths().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn volume(&self) -> f64 {
        self.widths().iter().product()
    }

    pub fn diameter(&self) -> f64 {
        self.widths().iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    /// Scale about the center.
    pub fn scaled(&self, f: f64) -> Self {
        let c = self.center();
        Self {
            lo: c.iter().zip(&self.lo).map(|(c, a)| c + f * (a - c)).collect(),
            hi: c.iter().zip(&self.hi).map(|(c, b)| c + f * (b - c)).collect(),
        }
    }

    /// Shrink by `m` on every side (may become empty, with lo > hi).
    pub fn shrunk(&self, m: f64) -> Self {
        Self { lo: self.lo.iter().map(|a| a + m).collect(), hi: self.hi.iter().map(|b| b - m).collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(a, b)| a > b)
    }

    pub fn translated(&self, t: &[f64]) -> Self {
        Self {
            lo: self.lo.iter().zip(t).map(|(a, x)| a + x).collect(),
            hi: self.hi.iter().zip(t).map(|(b, x)| b + x).collect(),
        }
    }

    pub fn contains_region(&self, o: &Region) -> bool {
        self.lo.iter().zip(&o.lo).all(|(a, b)| a <= b) && self.hi.iter().zip(&o.hi).all(|(a, b)| a >= b)
    }

    pub fn union_hull(&self, o: &Region) -> Region {
        Region {
            lo: self.lo.iter().zip(&o.lo).map(|(a, b)| a.min(*b)).collect(),
            hi: self.hi.iter().zip(&o.hi).map(|(a, b)| a.max(*b)).collect(),
        }
    }

    /// Smallest box containing the given points.
    pub fn bounding(points: &[Vec<f64>]) -> Option<Region> {
        let first = points.first()?;
        let mut lo = first.clone();
        let mut hi = first.clone();
        for p in points {
            for k in 0..p.len() {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        Some(Region { lo, hi })
    }
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Uniform grid over a fixed list of positions.
pub struct PointIndex<'a> {
    points: &'a [Vec<f64>],
    cell: f64,
    grid: HashMap<Vec<i64>, Vec<usize>>,
}

impl<'a> PointIndex<'a> {
    pub fn new(points: &'a [Vec<f64>], cell: f64) -> Self {
        let cell = if cell > 0.0 && cell.is_finite() { cell } else { 1.0 };
        let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            grid.entry(Self::key(p, cell)).or_default().push(i);
        }
        Self { points, cell, grid }
    }

    /// Index with a cell size matched to the average spacing.
    pub fn auto(points: &'a [Vec<f64>]) -> Self {
        let cell = match Region::bounding(points) {
            Some(b) if points.len() > 1 => {
                let d = b.dim() as f64;
                let vol: f64 = b.widths().iter().map(|w| w.max(1e-9)).product();
                (vol / points.len() as f64).powf(1.0 / d) * 2.0
            }
            _ => 1.0,
        };
        Self::new(points, cell)
    }

    fn key(p: &[f64], cell: f64) -> Vec<i64> {
        p.iter().map(|x| (x / cell).floor() as i64).collect()
    }

    fn visit_ring(&self, center: &[i64], ring: i64, f: &mut impl FnMut(usize)) {
        let d = center.len();
        let mut offset = vec![-ring; d];
        loop {
            if offset.iter().any(|o| o.abs() == ring) {
                let k: Vec<i64> = center.iter().zip(&offset).map(|(c, o)| c + o).collect();
                if let Some(ids) = self.grid.get(&k) {
                    ids.iter().for_each(|&i| f(i));
                }
            }
            let mut t = 0;
            loop {
                if t == d {
                    return;
                }
                offset[t] += 1;
                if offset[t] <= ring {
                    break;
                }
                offset[t] = -ring;
                t += 1;
            }
        }
    }

    /// Index and distance of the nearest indexed point.
    pub fn nearest(&self, q: &[f64]) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let c = Self::key(q, self.cell);
        let mut best: Option<(usize, f64)> = None;
        let max_ring = 1 << 20;
        let mut ring = 0;
        while ring < max_ring {
            self.visit_ring(&c, ring, &mut |i| {
                let dd = dist(q, &self.points[i]);
                if best.is_none_or(|(_, b)| dd < b) {
                    best = Some((i, dd));
                }
            });
            if let Some((_, b)) = best {
                if b <= ring as f64 * self.cell {
                    break;
                }
            }
            ring += 1;
            if best.is_none() && ring > 64 {
                // Sparse query far from the data: fall back to a scan.
                return self.points.iter().enumerate().map(|(i, p)| (i, dist(q, p))).min_by(|a, b| a.1.total_cmp(&b.1));
            }
        }
        best
    }

    /// Indices of points within distance `r` of `q`.
    pub fn within(&self, q: &[f64], r: f64) -> Vec<usize> {
        let c = Self::key(q, self.cell);
        let rings = (r / self.cell).ceil() as i64 + 1;
        let mut out = Vec::new();
        for ring in 0..=rings {
            self.visit_ring(&c, ring, &mut |i| {
                if dist(q, &self.points[i]) <= r {
                    out.push(i);
                }
            });
        }
        out.sort_unstable();
        out
    }
}

/// Smallest distance between two distinct positions (∞ for fewer than two).
pub fn min_pairwise_distance(points: &[Vec<f64>]) -> f64 {
    if points.len() < 2 {
        return f64::INFINITY;
    }
    if points[0].len() == 1 {
        let mut xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
        xs.sort_by(f64::total_cmp);
        return xs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    }
    let index = PointIndex::auto(points);
    let mut best = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        let probe = if best.is_finite() { best } else { index.cell };
        for j in index.within(p, probe) {
            if j != i {
                best = best.min(dist(p, &points[j]));
            }
        }
        if !best.is_finite() {
            for (j, q) in points.iter().enumerate() {
                if j != i {
                    best = best.min(dist(p, q));
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_and_within() {
        let pts: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 0.0]).collect();
        let idx = PointIndex::new(&pts, 1.0);
        assert_eq!(idx.nearest(&[3.4, 0.2]).unwrap().0, 3);
        assert_eq!(idx.within(&[5.0, 0.0], 1.0), vec![4, 5, 6]);
        assert_eq!(idx.nearest(&[100.0, 0.0]).unwrap().0, 9);
    }

    #[test]
    fn min_distance() {
        let pts = vec![vec![0.0, 0.0], vec![3.0, 0.0], vec![3.0, 0.5]];
        assert!((min_pairwise_distance(&pts) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn scaling() {
        let r = Region::interval(-1.0, 1.0).scaled(2.0);
        assert_eq!(r, Region::interval(-2.0, 2.0));
    }
}
