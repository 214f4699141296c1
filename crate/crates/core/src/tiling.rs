//! Prototiles from the adjoint system, tiling ↔ m-set duality and control points.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use num_rational::BigRational;

use crate::delone::{MSet, ModuleFrame, Point};
use crate::error::{Error, Result};
use crate::field::{Elem, NumberField};
use crate::geometry::{PointIndex, Region};
use crate::matrix::{field_apply, field_inverse, int_apply, FieldMatrix};
use crate::substitution::{adapted_contraction, MSetSubstitution, OverlapMode};

/// Cell grid approximation of a compact set: inner cells lie in the set, outer cells cover it.
#[derive(Clone, Debug)]
pub struct Raster {
    pub origin: Vec<f64>,
    pub eps: f64,
    pub outer: BTreeSet<Vec<i64>>,
    pub inner: BTreeSet<Vec<i64>>,
}

impl Raster {
    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn key(&self, p: &[f64]) -> Vec<i64> {
        p.iter().zip(&self.origin).map(|(x, o)| ((x - o) / self.eps).floor() as i64).collect()
    }

    pub fn cell_center(&self, k: &[i64]) -> Vec<f64> {
        k.iter().zip(&self.origin).map(|(&i, o)| o + (i as f64 + 0.5) * self.eps).collect()
    }

    /// Outer cells with a face neighbor outside, times the face measure.
    pub fn perimeter(&self) -> f64 {
        let d = self.dim();
        let mut faces = 0usize;
        for c in &self.outer {
            for ax in 0..d {
                for s in [-1, 1] {
                    let mut n = c.clone();
                    n[ax] += s;
                    if !self.outer.contains(&n) {
                        faces += 1;
                    }
                }
            }
        }
        faces as f64 * self.eps.powi(d as i32 - 1)
    }

    /// Bounding box of the outer cells.
    pub fn bounds(&self) -> Option<Region> {
        let d = self.dim();
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        for c in &self.outer {
            for k in 0..d {
                lo[k] = lo[k].min(c[k]);
                hi[k] = hi[k].max(c[k] + 1);
            }
        }
        if self.outer.is_empty() {
            return None;
        }
        Some(Region {
            lo: lo.iter().zip(&self.origin).map(|(&i, o)| o + i as f64 * self.eps).collect(),
            hi: hi.iter().zip(&self.origin).map(|(&i, o)| o + i as f64 * self.eps).collect(),
        })
    }

    /// Portable bitmap (P1) of the outer cells of a 2D raster, with a comment header.
    pub fn to_pbm(&self) -> Result<String> {
        if self.dim() != 2 {
            return Err(Error::Unsupported("bitmap export needs a 2D raster".into()));
        }
        let Some(b) = self.bounds() else { return Err(Error::Precondition("empty raster".into())) };
        let k0 = self.key(&b.center().iter().zip(&b.lo).map(|(_, l)| l + 0.5 * self.eps).collect::<Vec<_>>());
        let w = ((b.hi[0] - b.lo[0]) / self.eps).round() as i64;
        let h = ((b.hi[1] - b.lo[1]) / self.eps).round() as i64;
        let mut s = format!("P1\n# origin {} {}\n# eps {}\n{} {}\n", b.lo[0], b.lo[1], self.eps, w, h);
        for row in (0..h).rev() {
            let line: Vec<&str> = (0..w)
                .map(|col| if self.outer.contains(&vec![k0[0] + col, k0[1] + row]) { "1" } else { "0" })
                .collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        Ok(s)
    }
}

#[derive(Clone, Debug)]
pub enum Support {
    /// Finite interval union; `exact` holds field endpoints when the attractor was certified.
    Intervals {
        exact: Option<Vec<(Elem, Elem)>>,
        approx: Vec<(f64, f64)>,
    },
    Raster(Raster),
}

#[derive(Clone, Debug)]
pub struct Prototile {
    pub index: usize,
    pub support: Support,
    pub volume: f64,
    pub volume_err: f64,
    pub empty_interior: bool,
}

impl Prototile {
    pub fn exact_intervals(&self) -> Option<&[(Elem, Elem)]> {
        match &self.support {
            Support::Intervals { exact: Some(e), .. } => Some(e),
            _ => None,
        }
    }

    /// Largest distance from the origin of a support point.
    pub fn reach(&self) -> f64 {
        match &self.support {
            Support::Intervals { approx, .. } => approx.iter().map(|(a, b)| a.abs().max(b.abs())).fold(0.0, f64::max),
            Support::Raster(r) => r
                .bounds()
                .map_or(0.0, |b| b.lo.iter().zip(&b.hi).map(|(l, h)| l.abs().max(h.abs()).powi(2)).sum::<f64>().sqrt()),
        }
    }

    /// Membership of a float point, with the closed support (`inner = false`) or the interior
    /// approximant (`inner = true`).
    pub fn contains(&self, p: &[f64], inner: bool) -> bool {
        match &self.support {
            Support::Intervals { approx, .. } => {
                let slack = if inner { -1e-9 } else { 1e-9 };
                approx.iter().any(|(a, b)| a - slack <= p[0] && p[0] <= b + slack)
            }
            Support::Raster(r) => {
                let set = if inner { &r.inner } else { &r.outer };
                set.contains(&r.key(p))
            }
        }
    }

    /// Bounding box of the support.
    pub fn bounds(&self) -> Option<Region> {
        match &self.support {
            Support::Intervals { approx, .. } => {
                let lo = approx.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
                let hi = approx.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
                (lo <= hi).then(|| Region::interval(lo, hi))
            }
            Support::Raster(r) => r.bounds(),
        }
    }

    /// A point deep inside the support.
    pub fn interior_point(&self) -> Option<Vec<f64>> {
        match &self.support {
            Support::Intervals { approx, .. } => approx
                .iter()
                .max_by(|x, y| (x.1 - x.0).total_cmp(&(y.1 - y.0)))
                .filter(|(a, b)| b > a)
                .map(|(a, b)| vec![0.5 * (a + b)]),
            Support::Raster(r) => {
                let d = r.dim();
                let deep = r.inner.iter().find(|c| {
                    (0..d).all(|ax| {
                        [-1, 1].iter().all(|s| {
                            let mut n = (*c).clone();
                            n[ax] += s;
                            r.inner.contains(&n)
                        })
                    })
                });
                deep.or_else(|| r.inner.iter().next()).map(|c| r.cell_center(c))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct AdjointSolution {
    pub tiles: Vec<Prototile>,
    pub volumes: Vec<f64>,
    /// Contraction rate of Q⁻¹ in the adapted norm and the norm-equivalence constant.
    pub contraction: (f64, f64),
    /// Hausdorff distances between consecutive iterates.
    pub steps: Vec<f64>,
    pub exact: bool,
}

impl AdjointSolution {
    pub fn any_empty_interior(&self) -> bool {
        self.tiles.iter().any(|t| t.empty_interior)
    }
}

const MAX_ITER: usize = 10_000;
const MAX_INTERVALS: usize = 200_000;
const MAX_CELLS: usize = 4_000_000;

/// Solve A_j = Q⁻¹ ⋃ᵢ (𝒟ᵢⱼ + Aᵢ) at resolution `eps`.
pub fn solve_adjoint(phi: &MSetSubstitution, eps: f64) -> Result<AdjointSolution> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidPrecision(eps));
    }
    let contraction = adapted_contraction(phi)?;
    if phi.dim() == 1 {
        solve_1d(phi, eps, contraction)
    } else {
        solve_raster(phi, eps, contraction)
    }
}

fn digit_positions(phi: &MSetSubstitution) -> Vec<Vec<Vec<Vec<f64>>>> {
    let m = phi.colors();
    (0..m)
        .map(|i| (0..m).map(|j| phi.digits(i, j).iter().map(|a| phi.frame().position(a)).collect()).collect())
        .collect()
}

fn merge(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

fn dist_to_union(x: f64, u: &[(f64, f64)]) -> f64 {
    let k = u.partition_point(|iv| iv.1 < x);
    let mut best = f64::INFINITY;
    if let Some(iv) = u.get(k) {
        best = if iv.0 <= x { 0.0 } else { iv.0 - x };
    }
    if k > 0 {
        best = best.min(x - u[k - 1].1);
    }
    best
}

fn directed_hausdorff(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut worst: f64 = 0.0;
    for &(s, t) in a {
        worst = worst.max(dist_to_union(s, b)).max(dist_to_union(t, b));
        // Midpoints of gaps of b inside [s, t].
        let k = b.partition_point(|iv| iv.1 < s);
        for w in b[k.saturating_sub(1)..].windows(2) {
            if w[0].1 > t {
                break;
            }
            let mid = 0.5 * (w[0].1 + w[1].0);
            if s <= mid && mid <= t {
                worst = worst.max(0.5 * (w[1].0 - w[0].1));
            }
        }
    }
    worst
}

pub fn hausdorff_1d(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

fn solve_1d(phi: &MSetSubstitution, eps: f64, contraction: (f64, f64)) -> Result<AdjointSolution> {
    let m = phi.colors();
    let eta = phi.expansion_f64()[0][0];
    let digits = digit_positions(phi);
    // Invariant seed ball around the mean single-branch fixed point a/(η−1).
    let fixed: Vec<f64> = digits.iter().flatten().flatten().map(|a| a[0] / (eta - 1.0)).collect();
    if fixed.is_empty() {
        return Err(Error::Precondition("substitution has no digits".into()));
    }
    let c = fixed.iter().sum::<f64>() / fixed.len() as f64;
    let rho = fixed.iter().map(|x| (eta - 1.0).abs() * (x - c).abs() / (eta.abs() - 1.0)).fold(0.0, f64::max) + 1.0;
    let mut sets: Vec<Vec<(f64, f64)>> = vec![vec![(c - rho, c + rho)]; m];
    let mut steps = Vec::new();
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let next: Vec<Vec<(f64, f64)>> = (0..m)
            .map(|j| {
                let mut pieces = Vec::new();
                for i in 0..m {
                    for a in &digits[i][j] {
                        for &(s, t) in &sets[i] {
                            let (u, v) = ((s + a[0]) / eta, (t + a[0]) / eta);
                            pieces.push((u.min(v), u.max(v)));
                        }
                    }
                }
                merge(pieces)
            })
            .collect();
        let h = sets.iter().zip(&next).map(|(a, b)| hausdorff_1d(a, b)).fold(0.0, f64::max);
        steps.push(h);
        sets = next;
        if h < eps {
            converged = true;
            break;
        }
        if sets.iter().map(Vec::len).sum::<usize>() > MAX_INTERVALS {
            break;
        }
    }
    if !converged && sets.iter().map(Vec::len).sum::<usize>() <= MAX_INTERVALS {
        return Err(Error::IterationCap(format!("adjoint iteration did not reach {eps}")));
    }
    let exact = if sets.iter().all(|s| s.len() == 1) { exact_hulls(phi, &sets)? } else { None };
    let tiles: Vec<Prototile> = (0..m)
        .map(|j| {
            let (exact_iv, approx) = match &exact {
                Some(e) => {
                    let f = phi.frame().field();
                    (Some(vec![e[j].clone()]), vec![(f.to_f64(&e[j].0), f.to_f64(&e[j].1))])
                }
                None => (None, sets[j].clone()),
            };
            let volume: f64 = approx.iter().map(|(a, b)| b - a).sum();
            let widest = approx.iter().map(|(a, b)| b - a).fold(0.0, f64::max);
            Prototile {
                index: j,
                volume,
                volume_err: if exact_iv.is_some() { 0.0 } else { 2.0 * eps * approx.len() as f64 },
                empty_interior: widest <= 2.0 * eps,
                support: Support::Intervals { exact: exact_iv, approx },
            }
        })
        .collect();
    Ok(AdjointSolution {
        volumes: tiles.iter().map(|t| t.volume).collect(),
        tiles,
        contraction,
        steps,
        exact: exact.is_some(),
    })
}

/// Exact hull endpoints from the min/max selections of the float iterate, verified to solve
/// the adjoint equations over the field.
fn exact_hulls(phi: &MSetSubstitution, approx: &[Vec<(f64, f64)>]) -> Result<Option<Vec<(Elem, Elem)>>> {
    let f = phi.frame().field().clone();
    let m = phi.colors();
    let eta = phi.expansion()[0][0].clone();
    let inv = f.inv(&eta)?;
    let pos = f.sign(&eta)? == Ordering::Greater;
    let e = |i: usize, lower: bool| 2 * i + usize::from(!lower);
    let val = |k: usize| if k.is_multiple_of(2) { approx[k / 2][0].0 } else { approx[k / 2][0].1 };
    let n = 2 * m;
    let mut a: FieldMatrix =
        (0..n).map(|r| (0..n).map(|c| if r == c { f.one() } else { f.zero() }).collect()).collect();
    let mut b = vec![f.zero(); n];
    let eta_f = f.to_f64(&eta);
    for j in 0..m {
        for lower in [true, false] {
            let mut best: Option<(f64, usize, Point)> = None;
            for i in 0..m {
                for d in phi.digits(i, j) {
                    let src = e(i, lower == pos);
                    let v = (val(src) + phi.frame().position(d)[0]) / eta_f;
                    let better = match &best {
                        None => true,
                        Some((bv, _, _)) => {
                            if lower {
                                v < *bv
                            } else {
                                v > *bv
                            }
                        }
                    };
                    if better {
                        best = Some((v, src, d.clone()));
                    }
                }
            }
            let Some((_, src, d)) = best else { return Ok(None) };
            let row = e(j, lower);
            a[row][src] = f.sub(&a[row][src], &inv);
            b[row] = f.mul(&phi.frame().exact_position(&d)[0], &inv);
        }
    }
    let Ok(ainv) = field_inverse(&f, &a) else { return Ok(None) };
    let x: Vec<Elem> = field_apply(&f, &ainv, &b);
    let hulls: Vec<(Elem, Elem)> = (0..m).map(|j| (x[2 * j].clone(), x[2 * j + 1].clone())).collect();
    for j in 0..m {
        let mut pieces: Vec<(Elem, Elem)> = Vec::new();
        for i in 0..m {
            for d in phi.digits(i, j) {
                let dp = phi.frame().exact_position(d)[0].clone();
                let u = f.mul(&f.add(&hulls[i].0, &dp), &inv);
                let v = f.mul(&f.add(&hulls[i].1, &dp), &inv);
                pieces.push(if pos { (u, v) } else { (v, u) });
            }
        }
        pieces.sort_by(|p, q| f.to_f64(&p.0).total_cmp(&f.to_f64(&q.0)));
        let (lo, hi) = &hulls[j];
        if f.cmp(lo, hi)? != Ordering::Less {
            return Ok(None);
        }
        let mut reach = lo.clone();
        for (u, v) in &pieces {
            if f.cmp(u, lo)? == Ordering::Less || f.cmp(v, hi)? == Ordering::Greater {
                return Ok(None);
            }
            if f.cmp(u, &reach)? == Ordering::Greater {
                return Ok(None);
            }
            if f.cmp(v, &reach)? == Ordering::Greater {
                reach = v.clone();
            }
        }
        if f.cmp(&reach, hi)? != Ordering::Equal {
            return Ok(None);
        }
    }
    Ok(Some(hulls))
}

fn inverse_f64(q: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = q.len();
    let mut inv = vec![vec![0.0; d]; d];
    for k in 0..d {
        let e: Vec<f64> = (0..d).map(|i| if i == k { 1.0 } else { 0.0 }).collect();
        let col = crate::matrix::solve_f64(q, &e).ok_or(Error::Singular)?;
        for i in 0..d {
            inv[i][k] = col[i];
        }
    }
    Ok(inv)
}

fn apply_f64(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

fn cell_corners(r: &Raster, k: &[i64]) -> Vec<Vec<f64>> {
    let d = k.len();
    (0..1usize << d)
        .map(|mask| (0..d).map(|ax| r.origin[ax] + (k[ax] + ((mask >> ax) & 1) as i64) as f64 * r.eps).collect())
        .collect()
}

/// Sample points of a cell on a 3^d lattice (corners, face midpoints, center).
fn cell_samples(r: &Raster, k: &[i64]) -> Vec<Vec<f64>> {
    let d = k.len();
    let total = 3usize.pow(d as u32);
    (0..total)
        .map(|mut t| {
            (0..d)
                .map(|ax| {
                    let s = t % 3;
                    t /= 3;
                    r.origin[ax] + (k[ax] as f64 + 0.5 * s as f64) * r.eps
                })
                .collect()
        })
        .collect()
}

fn for_each_key(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64])) {
    let d = lo.len();
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return;
    }
    let mut k = lo.to_vec();
    loop {
        f(&k);
        let mut ax = 0;
        loop {
            if ax == d {
                return;
            }
            k[ax] += 1;
            if k[ax] <= hi[ax] {
                break;
            }
            k[ax] = lo[ax];
            ax += 1;
        }
    }
}

fn solve_raster(phi: &MSetSubstitution, eps: f64, contraction: (f64, f64)) -> Result<AdjointSolution> {
    let m = phi.colors();
    let d = phi.dim();
    let qinv = inverse_f64(&phi.expansion_f64())?;
    let digits = digit_positions(phi);
    // Level-k point approximations bound the attractor.
    let mut pts: Vec<Vec<Vec<f64>>> = vec![vec![vec![0.0; d]]; m];
    let mut level = 0;
    while level < 40 && pts.iter().map(Vec::len).sum::<usize>() < 20_000 {
        pts = (0..m)
            .map(|j| {
                let mut out = Vec::new();
                for i in 0..m {
                    for a in &digits[i][j] {
                        for p in &pts[i] {
                            let s: Vec<f64> = p.iter().zip(a).map(|(x, y)| x + y).collect();
                            out.push(apply_f64(&qinv, &s));
                        }
                    }
                }
                out
            })
            .collect();
        level += 1;
    }
    let (rate, cst) = contraction;
    let radius = phi.tile_radius()?;
    let margin = cst * rate.powi(level) * (radius + 1.0) + eps;
    let origin = vec![0.0; d];
    let mut outer: Vec<BTreeSet<Vec<i64>>> = Vec::with_capacity(m);
    for p in &pts {
        let b = Region::bounding(p).ok_or_else(|| Error::Precondition("empty digit graph".into()))?;
        let lo: Vec<i64> = b.lo.iter().map(|x| ((x - margin) / eps).floor() as i64).collect();
        let hi: Vec<i64> = b.hi.iter().map(|x| ((x + margin) / eps).ceil() as i64).collect();
        let count: f64 = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as f64).product();
        if count > MAX_CELLS as f64 {
            return Err(Error::Precondition(format!("resolution {eps} needs {count:.0} cells per tile")));
        }
        let mut set = BTreeSet::new();
        for_each_key(&lo, &hi, |k| {
            set.insert(k.to_vec());
        });
        outer.push(set);
    }
    let proto =
        |cells: BTreeSet<Vec<i64>>| Raster { origin: origin.clone(), eps, outer: cells, inner: BTreeSet::new() };
    let mut rasters: Vec<Raster> = outer.into_iter().map(proto).collect();
    let mut steps = Vec::new();
    for it in 0..MAX_ITER {
        let mut changed = false;
        let mut step: f64 = 0.0;
        let next: Vec<BTreeSet<Vec<i64>>> = (0..m)
            .map(|j| {
                let mut touched: HashSet<Vec<i64>> = HashSet::new();
                for i in 0..m {
                    for a in &digits[i][j] {
                        for c in &rasters[i].outer {
                            let img: Vec<Vec<f64>> = cell_corners(&rasters[i], c)
                                .iter()
                                .map(|p| apply_f64(&qinv, &p.iter().zip(a).map(|(x, y)| x + y).collect::<Vec<_>>()))
                                .collect();
                            let b = Region::bounding(&img).expect("corners");
                            let lo: Vec<i64> = b.lo.iter().map(|x| (x / eps + 1e-7).floor() as i64).collect();
                            let hi: Vec<i64> = b.hi.iter().map(|x| (x / eps - 1e-7).ceil() as i64 - 1).collect();
                            for_each_key(&lo, &hi, |k| {
                                touched.insert(k.to_vec());
                            });
                        }
                    }
                }
                rasters[j].outer.iter().filter(|k| touched.contains(*k)).cloned().collect()
            })
            .collect();
        for (j, n) in next.into_iter().enumerate() {
            if n.len() != rasters[j].outer.len() {
                changed = true;
                let kept: Vec<Vec<f64>> = n.iter().map(|k| rasters[j].cell_center(k)).collect();
                let index = PointIndex::auto(&kept);
                for k in rasters[j].outer.difference(&n) {
                    let c = rasters[j].cell_center(k);
                    step = step.max(index.nearest(&c).map_or(f64::INFINITY, |(_, dd)| dd));
                }
                rasters[j].outer = n;
            }
        }
        steps.push(step);
        if !changed {
            break;
        }
        if it + 1 == MAX_ITER {
            return Err(Error::IterationCap("raster adjoint iteration".into()));
        }
    }
    // Greatest set of cells covered by the images of its own cells lies inside the attractor.
    let mut inner: Vec<BTreeSet<Vec<i64>>> = rasters.iter().map(|r| r.outer.clone()).collect();
    let q = phi.expansion_f64();
    loop {
        let mut changed = false;
        let next: Vec<BTreeSet<Vec<i64>>> = (0..m)
            .map(|j| {
                inner[j]
                    .iter()
                    .filter(|c| {
                        cell_samples(&rasters[j], c).iter().all(|p| {
                            let qp = apply_f64(&q, p);
                            (0..m).any(|i| {
                                digits[i][j].iter().any(|a| {
                                    let y: Vec<f64> = qp.iter().zip(a).map(|(x, t)| x - t).collect();
                                    closed_member(&inner[i], &y, eps)
                                })
                            })
                        })
                    })
                    .cloned()
                    .collect()
            })
            .collect();
        for (j, n) in next.into_iter().enumerate() {
            if n.len() != inner[j].len() {
                changed = true;
            }
            inner[j] = n;
        }
        if !changed {
            break;
        }
    }
    let cell = eps.powi(d as i32);
    let tiles: Vec<Prototile> = rasters
        .into_iter()
        .zip(inner)
        .enumerate()
        .map(|(j, (mut r, inn))| {
            r.inner = inn;
            let lo = r.inner.len() as f64 * cell;
            let hi = r.outer.len() as f64 * cell;
            Prototile {
                index: j,
                volume: 0.5 * (lo + hi),
                volume_err: 0.5 * (hi - lo),
                empty_interior: r.inner.is_empty(),
                support: Support::Raster(r),
            }
        })
        .collect();
    Ok(AdjointSolution { volumes: tiles.iter().map(|t| t.volume).collect(), tiles, contraction, steps, exact: false })
}

fn closed_member(set: &BTreeSet<Vec<i64>>, y: &[f64], eps: f64) -> bool {
    let ranges: Vec<(i64, i64)> = y
        .iter()
        .map(|x| {
            let u = x / eps;
            ((u - 1e-7).floor() as i64, (u + 1e-7).floor() as i64)
        })
        .collect();
    let lo: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let hi: Vec<i64> = ranges.iter().map(|r| r.1).collect();
    let mut hit = false;
    for_each_key(&lo, &hi, |k| hit |= set.contains(k));
    hit
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Placement {
    pub tile: usize,
    pub translation: Point,
}

#[derive(Clone, Debug)]
pub struct Patch {
    pub frame: Arc<ModuleFrame>,
    pub placements: Vec<Placement>,
}

impl Patch {
    pub fn positions(&self) -> Vec<Vec<f64>> {
        self.placements.iter().map(|p| self.frame.position(&p.translation)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct CoverageReport {
    pub uncovered: f64,
    pub overlap: f64,
    pub tolerance: f64,
    pub exact: bool,
    pub consistent: bool,
}

/// Place the type-i prototile at every point of Λᵢ and measure coverage of `region`.
pub fn mset_to_tiling(x: &MSet, tiles: &AdjointSolution, region: &Region) -> Result<(Patch, CoverageReport)> {
    if tiles.tiles.len() != x.colors() {
        return Err(Error::Dimension("one prototile per color is required".into()));
    }
    let mut placements: Vec<Placement> = (0..x.colors())
        .flat_map(|i| x.color(i).iter().map(move |p| Placement { tile: i, translation: p.clone() }))
        .collect();
    placements.sort();
    let patch = Patch { frame: x.frame().clone(), placements };
    let report = if region.dim() == 1 && tiles.exact {
        coverage_exact_1d(&patch, tiles, region)?
    } else if region.dim() == 1 {
        coverage_float_1d(&patch, tiles, region)
    } else {
        coverage_raster(&patch, tiles, region)?
    };
    Ok((patch, report))
}

fn coverage_exact_1d(patch: &Patch, tiles: &AdjointSolution, region: &Region) -> Result<CoverageReport> {
    let f = patch.frame.field().clone();
    let to_elem = |v: f64| -> Result<Elem> {
        Ok(f.from_rational(BigRational::from_float(v).ok_or(Error::Unbounded("region".into()))?))
    };
    let (ra, rb) = (to_elem(region.lo[0])?, to_elem(region.hi[0])?);
    let mut ivs: Vec<(f64, Elem, Elem)> = Vec::new();
    for p in &patch.placements {
        let x = patch.frame.exact_position(&p.translation)[0].clone();
        for (a, b) in tiles.tiles[p.tile].exact_intervals().expect("exact tiles") {
            let lo = f.add(&x, a);
            let hi = f.add(&x, b);
            let lo = if f.cmp(&lo, &ra)? == Ordering::Less { ra.clone() } else { lo };
            let hi = if f.cmp(&hi, &rb)? == Ordering::Greater { rb.clone() } else { hi };
            if f.cmp(&lo, &hi)? == Ordering::Less {
                ivs.push((f.to_f64(&lo), lo, hi));
            }
        }
    }
    ivs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut gaps = f.zero();
    let mut total = f.zero();
    let mut reach = ra.clone();
    for (_, lo, hi) in &ivs {
        total = f.add(&total, &f.sub(hi, lo));
        if f.cmp(lo, &reach)? == Ordering::Greater {
            gaps = f.add(&gaps, &f.sub(lo, &reach));
        }
        if f.cmp(hi, &reach)? == Ordering::Greater {
            reach = hi.clone();
        }
    }
    if f.cmp(&rb, &reach)? == Ordering::Greater {
        gaps = f.add(&gaps, &f.sub(&rb, &reach));
    }
    // Σ lengths − |union| = overlap.
    let union = f.sub(&f.sub(&rb, &ra), &gaps);
    let overlap = f.sub(&total, &union);
    let consistent = gaps.is_zero() && overlap.is_zero();
    Ok(CoverageReport {
        uncovered: f.to_f64(&gaps),
        overlap: f.to_f64(&overlap),
        tolerance: 0.0,
        exact: true,
        consistent,
    })
}

fn coverage_float_1d(patch: &Patch, tiles: &AdjointSolution, region: &Region) -> CoverageReport {
    let (ra, rb) = (region.lo[0], region.hi[0]);
    let mut ivs = Vec::new();
    let mut tol = 0.0;
    for (p, x) in patch.placements.iter().zip(patch.positions()) {
        let t = &tiles.tiles[p.tile];
        tol += t.volume_err.max(1e-12);
        if let Support::Intervals { approx, .. } = &t.support {
            for (a, b) in approx {
                let (lo, hi) = ((x[0] + a).max(ra), (x[0] + b).min(rb));
                if lo < hi {
                    ivs.push((lo, hi));
                }
            }
        }
    }
    let total: f64 = ivs.iter().map(|(a, b)| b - a).sum();
    let merged = merge(ivs);
    let union: f64 = merged.iter().map(|(a, b)| b - a).sum();
    let uncovered = (rb - ra - union).max(0.0);
    let overlap = (total - union).max(0.0);
    CoverageReport { uncovered, overlap, tolerance: tol, exact: false, consistent: uncovered <= tol && overlap <= tol }
}

fn coverage_raster(patch: &Patch, tiles: &AdjointSolution, region: &Region) -> Result<CoverageReport> {
    let rasters: Vec<&Raster> = tiles
        .tiles
        .iter()
        .map(|t| match &t.support {
            Support::Raster(r) => Ok(r),
            _ => Err(Error::Unsupported("raster coverage needs raster tiles".into())),
        })
        .collect::<Result<_>>()?;
    let eps = rasters[0].eps;
    let d = region.dim();
    let counts: Vec<i64> = region.widths().iter().map(|w| (w / eps).round().max(1.0) as i64).collect();
    let total: f64 = counts.iter().map(|&c| c as f64).product();
    if total > 2e7 {
        return Err(Error::Precondition(format!("region needs {total:.0} raster cells")));
    }
    let pos = patch.positions();
    let index = PointIndex::auto(&pos);
    let reach = tiles.tiles.iter().map(Prototile::reach).fold(0.0, f64::max) + eps;
    let mut uncovered = 0usize;
    let mut overlap = 0usize;
    let lo = vec![0i64; d];
    let hi: Vec<i64> = counts.iter().map(|c| c - 1).collect();
    for_each_key(&lo, &hi, |k| {
        let c: Vec<f64> = k.iter().zip(&region.lo).map(|(&i, l)| l + (i as f64 + 0.5) * eps).collect();
        let mut outer = 0;
        let mut inner = 0;
        for t in index.within(&c, reach) {
            let rel: Vec<f64> = c.iter().zip(&pos[t]).map(|(a, b)| a - b).collect();
            let tile = &tiles.tiles[patch.placements[t].tile];
            if tile.contains(&rel, false) {
                outer += 1;
            }
            if tile.contains(&rel, true) {
                inner += 1;
            }
        }
        if outer == 0 {
            uncovered += 1;
        }
        if inner >= 2 {
            overlap += 1;
        }
    });
    let cell = eps.powi(d as i32);
    let inside = patch
        .placements
        .iter()
        .zip(&pos)
        .filter(|(_, x)| region.shrunk(-reach).contains(x))
        .map(|(p, _)| match &tiles.tiles[p.tile].support {
            Support::Raster(r) => r.perimeter(),
            _ => 0.0,
        })
        .sum::<f64>();
    let tolerance = inside * eps;
    let (uncovered, overlap) = (uncovered as f64 * cell, overlap as f64 * cell);
    Ok(CoverageReport {
        uncovered,
        overlap,
        tolerance,
        exact: false,
        consistent: uncovered <= tolerance && overlap <= tolerance,
    })
}

#[derive(Clone, Debug)]
pub struct ControlPoints {
    /// Control point of the type-j tile placed at the origin.
    pub offsets: Vec<Vec<Elem>>,
    pub offsets_f64: Vec<Vec<f64>>,
}

/// Control points for a tile map γ: `gamma[j] = (i, a)` picks the type-i child at offset a ∈ 𝒟ᵢⱼ.
///
/// Solves Q c_j = c_i + a exactly.
pub fn control_points(phi: &MSetSubstitution, gamma: &[(usize, Point)]) -> Result<ControlPoints> {
    let m = phi.colors();
    let d = phi.dim();
    if gamma.len() != m {
        return Err(Error::BadTileMap(format!("tile map needs {m} entries")));
    }
    for (j, (i, a)) in gamma.iter().enumerate() {
        if *i >= m || !phi.digits(*i, j).contains(a) {
            return Err(Error::BadTileMap(format!("type {j}: {a:?} is not a digit of D[{i}][{j}]")));
        }
    }
    let f: &NumberField = phi.frame().field();
    let q = phi.expansion();
    let n = m * d;
    let mut sys: FieldMatrix = vec![vec![f.zero(); n]; n];
    let mut rhs = vec![f.zero(); n];
    for (j, (i, a)) in gamma.iter().enumerate() {
        let ap = phi.frame().exact_position(a);
        for r in 0..d {
            for c in 0..d {
                sys[j * d + r][j * d + c] = f.add(&sys[j * d + r][j * d + c], &q[r][c]);
            }
            sys[j * d + r][i * d + r] = f.sub(&sys[j * d + r][i * d + r], &f.one());
            rhs[j * d + r] = ap[r].clone();
        }
    }
    let inv = field_inverse(f, &sys).map_err(|_| Error::BadTileMap("control point system is singular".into()))?;
    let x = field_apply(f, &inv, &rhs);
    let offsets: Vec<Vec<Elem>> = (0..m).map(|j| x[j * d..(j + 1) * d].to_vec()).collect();
    for (j, (i, a)) in gamma.iter().enumerate() {
        let lhs = field_apply(f, q, &offsets[j]);
        let ap = phi.frame().exact_position(a);
        let ok = (0..d).all(|r| f.sub(&lhs[r], &f.add(&offsets[*i][r], &ap[r])).is_zero());
        if !ok {
            return Err(Error::BadTileMap(format!("Q c({j}) differs from c(γ T)")));
        }
    }
    let offsets_f64 = offsets.iter().map(|o| o.iter().map(|e| f.to_f64(e)).collect()).collect();
    Ok(ControlPoints { offsets, offsets_f64 })
}

/// The m-set of control points of a patch.
pub fn control_point_mset(patch: &Patch, m: usize, cp: &ControlPoints) -> Result<MSet> {
    let shift: Vec<Point> = cp
        .offsets
        .iter()
        .map(|o| patch.frame.address(o).ok_or_else(|| Error::NotInModule("control point offset".into())))
        .collect::<Result<_>>()?;
    let mut colors = vec![Vec::new(); m];
    for p in &patch.placements {
        colors[p.tile].push(p.translation.iter().zip(&shift[p.tile]).map(|(a, b)| a + b).collect());
    }
    MSet::new(patch.frame.clone(), colors)
}

/// Recover Λᵢ = markers of the type-i tiles and the induced digit sets from a fixed-point patch of ω.
pub fn tiling_to_mset(
    omega: &MSetSubstitution,
    tiles: &AdjointSolution,
    patch: &Patch,
    markers: &[Vec<Elem>],
) -> Result<(MSet, MSetSubstitution)> {
    let m = omega.colors();
    let frame = omega.frame();
    if markers.len() != m || tiles.tiles.len() != m {
        return Err(Error::MarkerMismatch(format!("need {m} markers and prototiles")));
    }
    let f = frame.field();
    let mut shift = Vec::with_capacity(m);
    for (j, mk) in markers.iter().enumerate() {
        let p: Vec<f64> = mk.iter().map(|e| f.to_f64(e)).collect();
        if !tiles.tiles[j].contains(&p, false) {
            return Err(Error::MarkerMismatch(format!("marker of type {j} lies outside its tile")));
        }
        shift.push(frame.address(mk).ok_or_else(|| Error::NotInModule(format!("marker of type {j}")))?);
    }
    let probes: Vec<Vec<f64>> = tiles
        .tiles
        .iter()
        .map(|t| t.interior_point().ok_or_else(|| Error::MarkerMismatch("prototile without interior".into())))
        .collect::<Result<_>>()?;
    let mark = |p: &Placement| -> Point { p.translation.iter().zip(&shift[p.tile]).map(|(a, b)| a + b).collect() };
    let mut colors = vec![Vec::new(); m];
    for p in &patch.placements {
        colors[p.tile].push(mark(p));
    }
    let lambda = MSet::new(frame.clone(), colors)?;
    let pos = patch.positions();
    let Some(hull) = Region::bounding(&pos) else {
        return Err(Error::MarkerMismatch("empty patch".into()));
    };
    let reach = tiles.tiles.iter().map(Prototile::reach).fold(0.0, f64::max);
    let qf = omega.expansion_f64();
    let qinv = inverse_f64(&qf)?;
    let qnorm = qf.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let index = PointIndex::auto(&pos);
    let boxes: Vec<Region> = tiles
        .tiles
        .iter()
        .map(|t| t.bounds().ok_or_else(|| Error::MarkerMismatch("empty prototile".into())))
        .collect::<Result<_>>()?;
    let mmat = omega.module_matrix();
    let mut found: Vec<Option<Vec<BTreeSet<Point>>>> = vec![None; m];
    for (t, p) in patch.placements.iter().enumerate() {
        let qt = apply_f64(&qf, &pos[t]);
        let corners: Vec<Vec<f64>> = (0..1usize << qf.len())
            .map(|mask| {
                let b = &boxes[p.tile];
                let c: Vec<f64> = (0..qf.len())
                    .map(|ax| pos[t][ax] + if (mask >> ax) & 1 == 1 { b.hi[ax] } else { b.lo[ax] })
                    .collect();
                apply_f64(&qf, &c)
            })
            .collect();
        let parent = Region::bounding(&corners).expect("corners");
        if !hull.contains_region(&parent) {
            continue;
        }
        let base = int_apply(mmat, &mark(p))?;
        let mut digits = vec![BTreeSet::new(); m];
        for s in index.within(&qt, qnorm * reach + reach) {
            let child = &patch.placements[s];
            let probe: Vec<f64> = pos[s].iter().zip(&probes[child.tile]).map(|(a, b)| a + b).collect();
            let back: Vec<f64> = apply_f64(&qinv, &probe).iter().zip(&pos[t]).map(|(a, b)| a - b).collect();
            if tiles.tiles[p.tile].contains(&back, true) {
                digits[child.tile].insert(mark(child).iter().zip(&base).map(|(a, b)| a - b).collect());
            }
        }
        match &found[p.tile] {
            None => found[p.tile] = Some(digits),
            Some(prev) if *prev == digits => {}
            Some(_) => {
                return Err(Error::MarkerMismatch(format!("type {} tiles have different children", p.tile)));
            }
        }
    }
    let mut dig = vec![vec![Vec::new(); m]; m];
    for (j, fj) in found.into_iter().enumerate() {
        let fj = fj.ok_or_else(|| Error::MarkerMismatch(format!("no complete supertile of type {j} in the patch")))?;
        for (i, set) in fj.into_iter().enumerate() {
            dig[i][j] = set.into_iter().collect();
        }
    }
    let derived = MSetSubstitution::new(frame.clone(), omega.expansion().clone(), dig)?;
    let (img, _) = derived.apply(&lambda, 1, OverlapMode::Lenient)?;
    let inner = hull.shrunk(reach);
    if !inner.is_empty() && img.restrict(&inner) != lambda.restrict(&inner) {
        return Err(Error::MarkerMismatch("derived digit sets do not reproduce the patch".into()));
    }
    Ok((lambda, derived))
}

/// Exact 1D tile intervals of a solution, keyed by type.
pub fn interval_table(sol: &AdjointSolution, field: &NumberField) -> BTreeMap<usize, Vec<(f64, f64)>> {
    sol.tiles
        .iter()
        .map(|t| {
            let iv = match &t.support {
                Support::Intervals { exact: Some(e), .. } => {
                    e.iter().map(|(a, b)| (field.to_f64(a), field.to_f64(b))).collect()
                }
                Support::Intervals { approx, .. } => approx.clone(),
                Support::Raster(r) => r.bounds().map(|b| vec![(b.lo[0], b.hi[0])]).unwrap_or_default(),
            };
            (t.index, iv)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substitution::{binary, fibonacci, find_generating_cluster, generate_patch, square};

    const PHI: f64 = 1.618_033_988_749_895;

    #[test]
    fn fibonacci_tiles_exact() {
        let phi = fibonacci();
        let sol = solve_adjoint(&phi, 1e-9).unwrap();
        assert!(sol.exact);
        let f = phi.frame().field();
        let a = sol.tiles[0].exact_intervals().unwrap();
        assert!(a[0].0.is_zero());
        assert_eq!(a[0].1, f.beta());
        let b = sol.tiles[1].exact_intervals().unwrap();
        assert!(b[0].0.is_zero());
        assert_eq!(b[0].1, f.one());
        assert!((sol.volumes[0] - PHI).abs() < 1e-12);
        assert!(sol.steps.windows(2).skip(1).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn cantor_has_empty_interior() {
        let frame = ModuleFrame::standard(1);
        let q = vec![vec![frame.field().from_int(3)]];
        let phi = MSetSubstitution::new(frame, q, vec![vec![vec![vec![0], vec![2]]]]).unwrap();
        let sol = solve_adjoint(&phi, 1e-5).unwrap();
        assert!(!sol.exact);
        assert!(sol.any_empty_interior());
    }

    #[test]
    fn square_tile() {
        let phi = square();
        let sol = solve_adjoint(&phi, 1.0 / 64.0).unwrap();
        let t = &sol.tiles[0];
        let Support::Raster(r) = &t.support else { panic!("raster expected") };
        assert_eq!(r.inner.len(), 64 * 64);
        assert!(2.0 * t.volume_err <= r.perimeter() / 64.0 + 1e-12);
    }

    #[test]
    fn fibonacci_tiling_and_roundtrip() {
        let phi = fibonacci();
        let sol = solve_adjoint(&phi, 1e-9).unwrap();
        let g = find_generating_cluster(&phi).unwrap();
        let x = generate_patch(&phi, &g, &Region::interval(0.0, 120.0)).unwrap();
        let (patch, rep) = mset_to_tiling(&x, &sol, &Region::interval(0.0, 100.0)).unwrap();
        assert!(rep.consistent && rep.uncovered == 0.0 && rep.overlap == 0.0);
        let y = x.without(1, &x.color(1)[10]);
        let (_, rep) = mset_to_tiling(&y, &sol, &Region::interval(0.0, 100.0)).unwrap();
        assert!((rep.uncovered - 1.0).abs() < 1e-9);
        let f = phi.frame().field();
        let (lambda, derived) = tiling_to_mset(&phi, &sol, &patch, &[vec![f.zero()], vec![f.zero()]]).unwrap();
        assert_eq!(lambda, x);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(derived.digits(i, j), phi.digits(i, j));
            }
        }
    }

    #[test]
    fn control_points_examples() {
        let phi = fibonacci();
        let cp = control_points(&phi, &[(0, vec![0, 0]), (0, vec![0, 0])]).unwrap();
        assert!(cp.offsets.iter().all(|o| o[0].is_zero()));
        let bin = binary();
        let cp = control_points(&bin, &[(0, vec![1])]).unwrap();
        assert_eq!(cp.offsets[0][0], bin.frame().field().one());
        assert!(control_points(&phi, &[(1, vec![0, 0]), (1, vec![0, 0])]).is_err());
    }

    #[test]
    fn square_coverage() {
        let phi = square();
        let sol = solve_adjoint(&phi, 1.0 / 16.0).unwrap();
        let g = find_generating_cluster(&phi).unwrap();
        let x = generate_patch(&phi, &g, &Region::new(vec![0.0, 0.0], vec![9.0, 9.0]).unwrap()).unwrap();
        let region = Region::new(vec![0.0, 0.0], vec![8.0, 8.0]).unwrap();
        let (patch, rep) = mset_to_tiling(&x, &sol, &region).unwrap();
        assert!(rep.consistent && rep.uncovered == 0.0 && rep.overlap == 0.0, "{rep:?}");
        let (_, derived) = tiling_to_mset(&phi, &sol, &patch, &[vec![phi.frame().field().zero(); 2]]).unwrap();
        assert_eq!(derived.digits(0, 0), phi.digits(0, 0));
    }
}
