//! Colored Delone point sets with exact module coordinates, and the finite-type, Meyer,
//! address-map and inflation probes.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebraic::{classify, NumberClass};
use crate::error::{Error, Result};
use crate::field::{Elem, NumberField};
use crate::geometry::{dist, min_pairwise_distance, norm, PointIndex, Region};
use crate::matrix::{
    field_to_f64, frame_coordinates, frame_rank, induced_integer_matrix, int_apply, scalar_matrix, solve_f64,
    FieldMatrix, IntMatrix,
};

/// Default tolerance for metric comparisons.
pub const TAU: f64 = 1e-9;

/// Integer module coordinates of a point.
pub type Point = Vec<i64>;

/// Free generators v_1, …, v_s of a module in R^d, with entries in a real number field.
pub struct ModuleFrame {
    field: Arc<NumberField>,
    v: FieldMatrix,
    v_f64: Vec<Vec<f64>>,
}

impl fmt::Debug for ModuleFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModuleFrame(d={}, s={}, {:?})", self.dim(), self.rank(), self.field)
    }
}

impl ModuleFrame {
    pub fn new(field: Arc<NumberField>, v: FieldMatrix) -> Result<Self> {
        let d = v.len();
        let s = v.first().map_or(0, Vec::len);
        if d == 0 || s < d || v.iter().any(|r| r.len() != s) {
            return Err(Error::Dimension(format!("frame must be d x s with s >= d >= 1, got {d} x {s}")));
        }
        if v.iter().flatten().any(|e| e.0.len() != field.degree()) {
            return Err(Error::Dimension("frame entries do not match the field degree".into()));
        }
        if frame_rank(&field, &v) != s {
            return Err(Error::DependentFrame("generators satisfy a rational relation".into()));
        }
        let v_f64 = field_to_f64(&field, &v);
        // Spanning R^d: the d x d Gram matrix must be invertible.
        let gram: Vec<Vec<f64>> =
            (0..d).map(|i| (0..d).map(|j| (0..s).map(|k| v_f64[i][k] * v_f64[j][k]).sum()).collect()).collect();
        if d > 1 && solve_f64(&gram, &vec![1.0; d]).is_none() {
            return Err(Error::DependentFrame("generators do not span R^d".into()));
        }
        Ok(Self { field, v, v_f64 })
    }

    /// Z^d with the standard basis.
    pub fn standard(d: usize) -> Arc<Self> {
        Self::scaled_standard(d, 1)
    }

    /// (1/q) Z^d.
    pub fn scaled_standard(d: usize, q: i64) -> Arc<Self> {
        let field = Arc::new(NumberField::rationals());
        let entry = field.from_rational(BigRational::new(BigInt::from(1), BigInt::from(q)));
        let v = (0..d).map(|i| (0..d).map(|j| if i == j { entry.clone() } else { field.zero() }).collect()).collect();
        Arc::new(Self::new(field, v).expect("scaled identity is a free frame"))
    }

    /// The power basis 1, β, …, β^{s−1} of Z[β] in R.
    pub fn power_basis(field: Arc<NumberField>) -> Arc<Self> {
        let s = field.degree();
        let v = vec![(0..s).map(|k| field.beta_pow(k)).collect()];
        Arc::new(Self::new(field, v).expect("power basis is free"))
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn matrix(&self) -> &FieldMatrix {
        &self.v
    }

    pub fn matrix_f64(&self) -> &[Vec<f64>] {
        &self.v_f64
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn rank(&self) -> usize {
        self.v.first().map_or(0, Vec::len)
    }

    pub fn position(&self, n: &[i64]) -> Vec<f64> {
        self.v_f64.iter().map(|row| row.iter().zip(n).map(|(v, &k)| v * k as f64).sum()).collect()
    }

    pub fn exact_position(&self, n: &[i64]) -> Vec<Elem> {
        let f = &self.field;
        self.v
            .iter()
            .map(|row| {
                row.iter().zip(n).fold(f.zero(), |acc, (v, &k)| {
                    f.add(&acc, &f.scale(v, &BigRational::from_integer(BigInt::from(k))))
                })
            })
            .collect()
    }

    /// Address map: integer coordinates of an exact position, if it lies in the module.
    pub fn address(&self, w: &[Elem]) -> Option<Point> {
        let x = frame_coordinates(&self.field, &self.v, w)?;
        x.iter().map(|c| if c.is_integer() { c.to_integer().to_i64() } else { None }).collect()
    }

    /// Integer matrix M with QV = VM.
    pub fn induced_matrix(&self, q: &FieldMatrix) -> Result<IntMatrix> {
        induced_integer_matrix(&self.field, q, &self.v)
    }

    /// Integer matrix of multiplication by the scalar `eta`.
    pub fn scalar_action(&self, eta: &Elem) -> Result<IntMatrix> {
        self.induced_matrix(&scalar_matrix(&self.field, eta, self.dim()))
    }

    pub fn same(&self, other: &ModuleFrame) -> bool {
        std::ptr::eq(self, other) || (self.v == other.v && self.field.generator() == other.field.generator())
    }
}

/// An m-colored point set; colors may share points.
#[derive(Clone, Debug)]
pub struct MSet {
    frame: Arc<ModuleFrame>,
    colors: Vec<Vec<Point>>,
    positions: Vec<Vec<Vec<f64>>>,
    params: Option<(f64, f64)>,
}

/// A finite family of per-color point lists.
pub type Cluster = MSet;

impl MSet {
    /// Sort each color canonically; duplicates within a color are an error.
    pub fn new(frame: Arc<ModuleFrame>, colors: Vec<Vec<Point>>) -> Result<Self> {
        let s = frame.rank();
        let mut sorted = Vec::with_capacity(colors.len());
        for (i, mut c) in colors.into_iter().enumerate() {
            if c.iter().any(|p| p.len() != s) {
                return Err(Error::Dimension(format!("color {i} has a point without {s} coordinates")));
            }
            c.sort();
            if let Some(w) = c.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::Overlap(format!("color {i} repeats point {:?}", w[0])));
            }
            sorted.push(c);
        }
        Ok(Self::from_sorted(frame, sorted))
    }

    /// Like [`MSet::new`], silently merging duplicates.
    pub fn new_dedup(frame: Arc<ModuleFrame>, mut colors: Vec<Vec<Point>>) -> Result<Self> {
        for c in &mut colors {
            c.sort();
            c.dedup();
        }
        Self::new(frame, colors)
    }

    fn from_sorted(frame: Arc<ModuleFrame>, colors: Vec<Vec<Point>>) -> Self {
        let positions = colors.iter().map(|c| c.iter().map(|p| frame.position(p)).collect()).collect();
        Self { frame, colors, positions, params: None }
    }

    pub fn empty(frame: Arc<ModuleFrame>, m: usize) -> Self {
        Self::from_sorted(frame, vec![Vec::new(); m])
    }

    pub fn with_params(mut self, r: f64, big_r: f64) -> Self {
        self.params = Some((r, big_r));
        self
    }

    pub fn params(&self) -> Option<(f64, f64)> {
        self.params
    }

    pub fn frame(&self) -> &Arc<ModuleFrame> {
        &self.frame
    }

    pub fn colors(&self) -> usize {
        self.colors.len()
    }

    pub fn color(&self, i: usize) -> &[Point] {
        &self.colors[i]
    }

    pub fn color_positions(&self, i: usize) -> &[Vec<f64>] {
        &self.positions[i]
    }

    pub fn all_colors(&self) -> &[Vec<Point>] {
        &self.colors
    }

    pub fn counts(&self) -> Vec<usize> {
        self.colors.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.colors.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, color: usize, p: &[i64]) -> bool {
        self.colors[color].binary_search_by(|q| q.as_slice().cmp(p)).is_ok()
    }

    /// Union of all colors, canonically sorted, without repetition.
    pub fn support(&self) -> Vec<Point> {
        let set: BTreeSet<&Point> = self.colors.iter().flatten().collect();
        set.into_iter().cloned().collect()
    }

    /// Support points with their positions.
    pub fn support_with_positions(&self) -> (Vec<Point>, Vec<Vec<f64>>) {
        let pts = self.support();
        let pos = pts.iter().map(|p| self.frame.position(p)).collect();
        (pts, pos)
    }

    /// (color, point, position) triples.
    pub fn flattened(&self) -> Vec<(usize, Point, Vec<f64>)> {
        let mut out = Vec::with_capacity(self.len());
        for (i, c) in self.colors.iter().enumerate() {
            for (p, x) in c.iter().zip(&self.positions[i]) {
                out.push((i, p.clone(), x.clone()));
            }
        }
        out
    }

    pub fn restrict(&self, region: &Region) -> MSet {
        let colors = self
            .colors
            .iter()
            .zip(&self.positions)
            .map(|(c, xs)| c.iter().zip(xs).filter(|(_, x)| region.contains(x)).map(|(p, _)| p.clone()).collect())
            .collect();
        Self { params: self.params, ..Self::from_sorted(self.frame.clone(), colors) }
    }

    pub fn translate(&self, t: &[i64]) -> MSet {
        let colors = self
            .colors
            .iter()
            .map(|c| {
                let mut v: Vec<Point> = c.iter().map(|p| p.iter().zip(t).map(|(a, b)| a + b).collect()).collect();
                v.sort();
                v
            })
            .collect();
        Self { params: self.params, ..Self::from_sorted(self.frame.clone(), colors) }
    }

    /// Color-wise union; duplicates within a color are merged.
    pub fn union(&self, other: &MSet) -> MSet {
        let colors = self
            .colors
            .iter()
            .zip(&other.colors)
            .map(|(a, b)| {
                let set: BTreeSet<&Point> = a.iter().chain(b).collect();
                set.into_iter().cloned().collect()
            })
            .collect();
        Self::from_sorted(self.frame.clone(), colors)
    }

    /// Color-wise inclusion self ⊆ other.
    pub fn is_subset(&self, other: &MSet) -> bool {
        self.colors.len() == other.colors.len()
            && self.colors.iter().enumerate().all(|(i, c)| c.iter().all(|p| other.contains(i, p)))
    }

    pub fn bounding_box(&self) -> Option<Region> {
        let all: Vec<Vec<f64>> = self.positions.iter().flatten().cloned().collect();
        Region::bounding(&all)
    }

    /// Remove one point from a color.
    pub fn without(&self, color: usize, p: &[i64]) -> MSet {
        let mut colors = self.colors.clone();
        colors[color].retain(|q| q.as_slice() != p);
        Self { params: self.params, ..Self::from_sorted(self.frame.clone(), colors) }
    }
}

impl PartialEq for MSet {
    fn eq(&self, other: &Self) -> bool {
        self.frame.same(&other.frame) && self.colors == other.colors
    }
}

/// Translation taking cluster `a` onto cluster `b`, if one exists.
pub fn translation_between(a: &Cluster, b: &Cluster) -> Option<Point> {
    if a.counts() != b.counts() {
        return None;
    }
    let (i, pa) = a.colors.iter().enumerate().find_map(|(i, c)| c.first().map(|p| (i, p)))?;
    let pb = b.colors[i].first()?;
    let t: Point = pb.iter().zip(pa).map(|(x, y)| x - y).collect();
    (a.translate(&t).colors == b.colors).then_some(t)
}

fn sub(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// The probe windows W/4, W/2, W (nested about the center of `window`).
pub fn probe_windows(window: &Region) -> [Region; 3] {
    [window.scaled(0.25), window.scaled(0.5), window.clone()]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Inconsistent,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Consistent
        } else {
            Verdict::Inconsistent
        }
    }

    pub fn ok(self) -> bool {
        self == Verdict::Consistent
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "consistent",
            Verdict::Inconsistent => "inconsistent",
        })
    }
}

/// Estimate of the Delone parameters (r, R) on a region.
pub fn estimate_parameters(x: &MSet, region: &Region) -> Result<(f64, f64)> {
    let (_, all_pos) = x.support_with_positions();
    let inside: Vec<Vec<f64>> = all_pos.iter().filter(|p| region.contains(p)).cloned().collect();
    if inside.len() < 2 {
        return Err(Error::TooFewPoints(format!("{} point(s) in region", inside.len())));
    }
    let r = 0.5 * min_pairwise_distance(&inside);
    if region.dim() == 1 {
        let mut xs: Vec<f64> = inside.iter().map(|p| p[0]).collect();
        xs.sort_by(f64::total_cmp);
        let big_r = 0.5 * xs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        return Ok((r, big_r));
    }
    let index = PointIndex::auto(&all_pos);
    let spacing = (region.volume() / inside.len() as f64).powf(1.0 / region.dim() as f64);
    let scan = region.shrunk(2.0 * spacing);
    if scan.is_empty() {
        return Err(Error::WindowTooSmall("region too small for a covering-radius scan".into()));
    }
    let mut pitch = r / 4.0;
    while scan.widths().iter().map(|w| w / pitch + 1.0).product::<f64>() > 2e6 {
        pitch *= 1.5;
    }
    let counts: Vec<usize> = scan.widths().iter().map(|w| (w / pitch).floor() as usize + 1).collect();
    let mut idx = vec![0usize; counts.len()];
    let mut big_r: f64 = 0.0;
    loop {
        let q: Vec<f64> = idx.iter().zip(&scan.lo).map(|(&i, lo)| lo + i as f64 * pitch).collect();
        if let Some((_, dd)) = index.nearest(&q) {
            big_r = big_r.max(dd);
        }
        let mut t = 0;
        loop {
            if t == idx.len() {
                return Ok((r, big_r));
            }
            idx[t] += 1;
            if idx[t] < counts[t] {
                break;
            }
            idx[t] = 0;
            t += 1;
        }
    }
}

fn difference_census(points: &[Point], pos: &[Vec<f64>], t: f64) -> BTreeSet<Point> {
    let index = PointIndex::auto(pos);
    let mut set = BTreeSet::new();
    for (i, p) in pos.iter().enumerate() {
        for j in index.within(p, t + TAU) {
            set.insert(sub(&points[j], &points[i]));
        }
    }
    set
}

fn local_cluster_census(x: &MSet, window: &Region, t: f64) -> usize {
    let flat = x.flattened();
    let pos: Vec<Vec<f64>> = flat.iter().map(|f| f.2.clone()).collect();
    let index = PointIndex::auto(&pos);
    let mut clusters: BTreeSet<Vec<(usize, Point)>> = BTreeSet::new();
    let (support, spos) = x.support_with_positions();
    for (p, xp) in support.iter().zip(&spos) {
        if !window.contains_ball(xp, t) {
            continue;
        }
        let mut c: Vec<(usize, Point)> =
            index.within(xp, t + TAU).into_iter().map(|j| (flat[j].0, sub(&flat[j].1, p))).collect();
        c.sort();
        clusters.insert(c);
    }
    clusters.len()
}

#[derive(Clone, Debug)]
pub struct FiniteTypeReport {
    pub radius: f64,
    /// |(X − X) ∩ B(0, T)| on W/4, W/2, W.
    pub census: [usize; 3],
    /// Number of distinct radius-T local clusters on W/4, W/2, W.
    pub clusters: [usize; 3],
    pub verdict: Verdict,
}

/// Census of difference vectors of length ≤ T on nested windows W/4, W/2, W.
pub fn finite_type_probe(x: &MSet, t: f64, window: &Region) -> Result<FiniteTypeReport> {
    let windows = probe_windows(window);
    if windows[0].min_width() < 10.0 * t {
        return Err(Error::WindowTooSmall(format!("innermost probe window must have width >= 10T = {}", 10.0 * t)));
    }
    let mut census = [0; 3];
    let mut clusters = [0; 3];
    for (k, w) in windows.iter().enumerate() {
        let sub_set = x.restrict(w);
        let (pts, pos) = sub_set.support_with_positions();
        census[k] = difference_census(&pts, &pos, t).len();
        clusters[k] = local_cluster_census(&sub_set, w, t);
    }
    let verdict = Verdict::from_bool(census[0] == census[1] && census[1] == census[2]);
    Ok(FiniteTypeReport { radius: t, census, clusters, verdict })
}

#[derive(Clone, Debug)]
pub struct MeyerReport {
    /// |F| on W/4, W/2, W.
    pub f_sizes: [usize; 3],
    /// F on the full window, canonically sorted.
    pub f: Vec<Point>,
    /// Smallest distance between distinct elements of X − X, per window.
    pub min_gap: [f64; 3],
    pub delta0: f64,
    pub finite_type: Verdict,
    pub verdict: Verdict,
}

/// Decompose X − X as X + F on nested windows and watch whether F stays fixed.
pub fn meyer_probe(x: &MSet, window: &Region) -> Result<MeyerReport> {
    let (r, big_r) = match x.params() {
        Some(p) => p,
        None => estimate_parameters(x, window)?,
    };
    let t = (2.0 * big_r).min(window.scaled(0.25).min_width() / 10.0);
    let finite_type = finite_type_probe(x, t, window)?.verdict;
    let (all_pts, all_pos) = x.support_with_positions();
    let index = PointIndex::auto(&all_pos);
    let mut f_sizes = [0; 3];
    let mut min_gap = [0.0; 3];
    let mut f_last = BTreeSet::new();
    let mut f_prev = BTreeSet::new();
    for (k, w) in probe_windows(window).iter().enumerate() {
        let inner = w.shrunk(big_r);
        let ids: Vec<usize> = (0..all_pts.len()).filter(|&i| w.contains(&all_pos[i])).collect();
        let mut diffs: BTreeSet<Point> = BTreeSet::new();
        for &i in &ids {
            for &j in &ids {
                diffs.insert(sub(&all_pts[i], &all_pts[j]));
            }
        }
        let mut f = BTreeSet::new();
        let mut zpos = Vec::with_capacity(diffs.len());
        for z in &diffs {
            let pz = x.frame().position(z);
            zpos.push(pz.clone());
            if !inner.contains(&pz) {
                continue;
            }
            if let Some((j, _)) = index.nearest(&pz) {
                f.insert(sub(z, &all_pts[j]));
            }
        }
        min_gap[k] = min_pairwise_distance(&zpos);
        f_sizes[k] = f.len();
        f_prev = std::mem::replace(&mut f_last, f);
    }
    let delta0 = r / 2.0;
    let stable = f_prev == f_last;
    let verdict = Verdict::from_bool(finite_type.ok() && stable && min_gap[2] >= delta0 - TAU);
    Ok(MeyerReport { f_sizes, f: f_last.into_iter().collect(), min_gap, delta0, finite_type, verdict })
}

#[derive(Clone, Debug)]
pub struct Chain {
    pub points: Vec<Point>,
    pub max_step: f64,
    /// 4R.
    pub step_bound: f64,
    /// ((2R)⁻¹ + r⁻¹)·‖x − x′‖ + 1.
    pub length_bound: f64,
}

impl Chain {
    pub fn within_bounds(&self) -> bool {
        self.max_step <= self.step_bound + TAU && (self.points.len() as f64) <= self.length_bound + TAU
    }
}

/// Chain of X-points from `a` to `b` with steps at most 4R.
pub fn chain(x: &MSet, a: &[i64], b: &[i64]) -> Result<Chain> {
    let (r, big_r) = x.params().ok_or_else(|| Error::Precondition("chain needs declared (r, R)".into()))?;
    let (pts, pos) = x.support_with_positions();
    let find = |p: &[i64]| pts.binary_search_by(|q| q.as_slice().cmp(p)).ok();
    let ia = find(a).ok_or_else(|| Error::Precondition(format!("{a:?} is not in X")))?;
    let ib = find(b).ok_or_else(|| Error::Precondition(format!("{b:?} is not in X")))?;
    let (xa, xb) = (&pos[ia], &pos[ib]);
    let len = dist(xa, xb);
    let m = (len / (2.0 * big_r)).floor() as usize + 1;
    let index = PointIndex::auto(&pos);
    let mut chain_ids = vec![ia];
    for k in 1..m {
        let t = k as f64 / m as f64;
        let w: Vec<f64> = xa.iter().zip(xb).map(|(p, q)| p + t * (q - p)).collect();
        let (j, dd) = index.nearest(&w).ok_or_else(|| Error::SnapFailure(format!("{w:?}")))?;
        if dd > big_r + TAU {
            return Err(Error::SnapFailure(format!("{w:?} (nearest at {dd:.6})")));
        }
        if chain_ids.last() != Some(&j) {
            chain_ids.push(j);
        }
    }
    if chain_ids.last() != Some(&ib) {
        chain_ids.push(ib);
    }
    let max_step = chain_ids.windows(2).map(|w| dist(&pos[w[0]], &pos[w[1]])).fold(0.0, f64::max);
    Ok(Chain {
        points: chain_ids.iter().map(|&i| pts[i].clone()).collect(),
        max_step,
        step_bound: 4.0 * big_r,
        length_bound: (1.0 / (2.0 * big_r) + 1.0 / r) * len + 1.0,
    })
}

#[derive(Clone, Debug)]
pub struct AddressReport {
    /// Largest sampled ratio ‖φ(x) − φ(x′)‖ / ‖x − x′‖.
    pub lipschitz: f64,
    /// Least-squares linear part, s × d.
    pub linear: Vec<Vec<f64>>,
    /// sup ‖φ(x) − Lx‖ on W/4, W/2, W.
    pub residual_sups: [f64; 3],
    pub bounded: bool,
}

fn apply_linear(l: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    l.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

fn residual(l: &[Vec<f64>], p: &[i64], x: &[f64]) -> f64 {
    let lx = apply_linear(l, x);
    p.iter().zip(&lx).map(|(&n, y)| (n as f64 - y).powi(2)).sum::<f64>().sqrt()
}

/// Least-squares fit of the address map on all stored points.
pub fn fit_linear(points: &[Point], pos: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = pos.first().map_or(0, Vec::len);
    let s = points.first().map_or(0, Vec::len);
    let mut xtx = vec![vec![0.0; d]; d];
    let mut ntx = vec![vec![0.0; d]; s];
    for (p, x) in points.iter().zip(pos) {
        for a in 0..d {
            for b in 0..d {
                xtx[a][b] += x[a] * x[b];
            }
            for i in 0..s {
                ntx[i][a] += p[i] as f64 * x[a];
            }
        }
    }
    // L = N X^T (X X^T)^{-1}; solve row by row with the symmetric Gram matrix.
    ntx.iter().map(|row| solve_f64(&xtx, row).ok_or(Error::Singular)).collect()
}

/// Lipschitz estimate, linear fit and residual growth of the address map.
pub fn address_audit(x: &MSet, window: &Region) -> Result<AddressReport> {
    let s = x.frame().rank();
    let (pts, pos) = x.support_with_positions();
    if pts.len() < s + 1 {
        return Err(Error::TooFewPoints(format!("need at least {} points", s + 1)));
    }
    let mut lipschitz: f64 = 0.0;
    let mut ratio = |i: usize, j: usize| {
        let dx = dist(&pos[i], &pos[j]);
        if dx > 0.0 {
            let dn = norm(&sub(&pts[i], &pts[j]).iter().map(|&v| v as f64).collect::<Vec<_>>());
            lipschitz = lipschitz.max(dn / dx);
        }
    };
    for i in 1..pts.len() {
        ratio(i - 1, i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..2000 {
        let i = rng.gen_range(0..pts.len());
        let j = rng.gen_range(0..pts.len());
        ratio(i, j);
    }
    let linear = fit_linear(&pts, &pos)?;
    let mut residual_sups = [0.0; 3];
    for (k, w) in probe_windows(window).iter().enumerate() {
        residual_sups[k] = pts
            .iter()
            .zip(&pos)
            .filter(|(_, x)| w.contains(x))
            .map(|(p, x)| residual(&linear, p, x))
            .fold(0.0, f64::max);
    }
    let bounded = residual_sups[2] <= 1.25 * residual_sups[0] + TAU;
    Ok(AddressReport { lipschitz, linear, residual_sups, bounded })
}

/// Linear part by the doubling limit φ(x_k)/2^k along each coordinate axis.
pub fn doubling_linear_part(x: &MSet, window: &Region) -> Result<Vec<Vec<f64>>> {
    let d = x.frame().dim();
    let s = x.frame().rank();
    let (pts, pos) = x.support_with_positions();
    if pts.is_empty() {
        return Err(Error::TooFewPoints("empty set".into()));
    }
    let index = PointIndex::auto(&pos);
    let c = window.center();
    let reach = 0.5 * window.min_width();
    let mut l = vec![vec![0.0; d]; s];
    for axis in 0..d {
        let mut k = 0;
        while 2f64.powi(k + 1) <= reach {
            k += 1;
        }
        let scale = 2f64.powi(k);
        let mut q = c.clone();
        q[axis] += scale;
        let (i, _) = index.nearest(&q).ok_or_else(|| Error::TooFewPoints("no points".into()))?;
        let (j, _) = index.nearest(&c).ok_or_else(|| Error::TooFewPoints("no points".into()))?;
        let diff = sub(&pts[i], &pts[j]);
        for r in 0..s {
            l[r][axis] = diff[r] as f64 / scale;
        }
    }
    Ok(l)
}

#[derive(Clone, Debug)]
pub struct InflationReport {
    pub eta: String,
    pub class: NumberClass,
    pub inclusion_checked: usize,
    pub finite_type: Verdict,
    pub meyer: Verdict,
    /// Classes compatible with each empirical verdict.
    pub allowed_finite_type: Vec<NumberClass>,
    pub allowed_meyer: Vec<NumberClass>,
    pub contradiction: bool,
}

/// Cross-check of inflation symmetry ηX ⊆ X, the probes and the class of η.
pub fn inflation_audit(x: &MSet, eta: &Elem, window: &Region, t: f64) -> Result<InflationReport> {
    let frame = x.frame();
    let field = frame.field();
    let alg = field.minimal_polynomial(eta)?;
    let class = classify(&alg)?.class;
    let m = frame.scalar_action(eta)?;
    let (pts, pos) = x.support_with_positions();
    let mut checked = 0;
    for (p, xp) in pts.iter().zip(&pos) {
        if !window.contains(xp) {
            continue;
        }
        let img = int_apply(&m, p)?;
        if !window.contains(&frame.position(&img)) {
            continue;
        }
        checked += 1;
        if pts.binary_search(&img).is_err() {
            return Err(Error::InflationFails(format!("η·{p:?} = {img:?} is not in X")));
        }
    }
    let finite_type = finite_type_probe(x, t, window)?.verdict;
    let meyer = meyer_probe(x, window)?.verdict;
    let allowed_finite_type = vec![NumberClass::Pisot, NumberClass::Salem, NumberClass::Perron, NumberClass::Lind];
    let allowed_meyer = vec![NumberClass::Pisot, NumberClass::Salem];
    let contradiction =
        (finite_type.ok() && !allowed_finite_type.contains(&class)) || (meyer.ok() && !allowed_meyer.contains(&class));
    Ok(InflationReport {
        eta: alg.to_string(),
        class,
        inclusion_checked: checked,
        finite_type,
        meyer,
        allowed_finite_type,
        allowed_meyer,
        contradiction,
    })
}

/// Z^d restricted to a box, in the standard frame.
pub fn lattice_patch(d: usize, half: i64) -> MSet {
    let frame = ModuleFrame::standard(d);
    let mut pts = vec![Vec::new()];
    for _ in 0..d {
        pts = pts
            .into_iter()
            .flat_map(|p: Point| {
                (-half..=half).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    MSet::new(frame, vec![pts]).expect("lattice points are distinct").with_params(0.5, 0.5 * (d as f64).sqrt())
}

/// Z with a deterministic pseudo-random perturbation in (0, 0.1) at each site.
///
/// The frame is [1, α] with α = √2·10⁻⁷/2, so every perturbation is a module element.
pub fn perturbed_integers(half: i64, seed: u64) -> MSet {
    let field = Arc::new(
        NumberField::from_poly(crate::poly::IntPolynomial::from_i64(&[-2, 0, 1])).expect("x^2-2 is irreducible"),
    );
    let alpha = field.scale(&field.beta(), &BigRational::new(BigInt::from(1), BigInt::from(20_000_000)));
    let frame = Arc::new(ModuleFrame::new(field.clone(), vec![vec![field.one(), alpha]]).expect("free frame"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (-half..=half).map(|n| vec![n, rng.gen_range(1..1_000_000)]).collect();
    MSet::new(frame, vec![pts]).expect("distinct sites")
}

/// Convert an exact position to float.
pub fn elem_position(field: &NumberField, w: &[Elem]) -> Vec<f64> {
    w.iter().map(|e| field.to_f64(e)).collect()
}

/// The integer vector as f64.
pub fn to_f64_vec(p: &[i64]) -> Vec<f64> {
    p.iter().map(|&v| v as f64).collect()
}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn check<T: Send + Sync>() {}
    check::<MSet>();
    check::<ModuleFrame>();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_parameters_and_census() {
        let z = lattice_patch(1, 300);
        let (r, big_r) = estimate_parameters(&z, &Region::interval(-10.0, 10.0)).unwrap();
        assert_eq!((r, big_r), (0.5, 0.5));
        let rep = finite_type_probe(&z, 5.0, &Region::interval(-200.0, 200.0)).unwrap();
        assert_eq!(rep.census, [11, 11, 11]);
        assert!(rep.verdict.ok());
        let m = meyer_probe(&z, &Region::interval(-200.0, 200.0)).unwrap();
        assert_eq!(m.f, vec![vec![0]]);
        assert!(m.verdict.ok());
    }

    #[test]
    fn two_lattice_union() {
        let frame = ModuleFrame::scaled_standard(1, 2);
        let pts: Vec<Point> = (-20..=20).flat_map(|k| [vec![4 * k], vec![4 * k + 1]]).collect();
        let x = MSet::new(frame, vec![pts]).unwrap();
        let (r, big_r) = estimate_parameters(&x, &Region::interval(-30.0, 30.0)).unwrap();
        assert!((r - 0.25).abs() < 1e-12 && (big_r - 0.75).abs() < 1e-12);
    }

    #[test]
    fn perturbed_set_is_not_finite_type() {
        let x = perturbed_integers(400, 7);
        let rep = finite_type_probe(&x, 2.0, &Region::interval(-400.0, 400.0)).unwrap();
        assert!(!rep.verdict.ok());
        assert!(rep.census[2] > rep.census[1] && rep.census[1] > rep.census[0]);
    }

    #[test]
    fn chain_on_integers() {
        let z = lattice_patch(1, 50);
        let c = chain(&z, &[0], &[10]).unwrap();
        assert_eq!(c.points, (0..=10).map(|k| vec![k]).collect::<Vec<_>>());
        assert!(c.within_bounds());
        let c = chain(&z, &[3], &[3]).unwrap();
        assert_eq!(c.points, vec![vec![3]]);
    }

    #[test]
    fn address_of_lattice_is_linear() {
        let z = lattice_patch(2, 10);
        let rep = address_audit(&z, &Region::cube(&[0.0, 0.0], 10.0)).unwrap();
        assert!(rep.residual_sups.iter().all(|&v| v < 1e-9));
        assert!((rep.linear[0][0] - 1.0).abs() < 1e-12 && rep.linear[0][1].abs() < 1e-12);
    }

    #[test]
    fn address_map_is_additive() {
        let k = Arc::new(NumberField::from_poly(crate::poly::IntPolynomial::from_i64(&[-1, -1, 1])).unwrap());
        let frame = ModuleFrame::power_basis(k.clone());
        let a = frame.exact_position(&[2, -3]);
        let b = frame.exact_position(&[-1, 5]);
        let sum: Vec<Elem> = a.iter().zip(&b).map(|(x, y)| k.add(x, y)).collect();
        assert_eq!(frame.address(&sum), Some(vec![1, 2]));
    }

    #[test]
    fn inflation_of_integers() {
        let z = lattice_patch(1, 400);
        let two = z.frame().field().from_int(2);
        let rep = inflation_audit(&z, &two, &Region::interval(-200.0, 200.0), 3.0).unwrap();
        assert_eq!(rep.class, NumberClass::Pisot);
        assert!(rep.finite_type.ok() && rep.meyer.ok() && !rep.contradiction);
    }
}
