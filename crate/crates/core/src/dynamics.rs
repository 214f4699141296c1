//! Finite-patch probes of translation dynamics: the big-ball metric, cluster frequencies,
//! almost-periods and eigenvalue tests.

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use crate::delone::{Cluster, MSet, Point};
use crate::error::{Error, Result};
use crate::field::Elem;
use crate::geometry::{norm, PointIndex, Region};
use crate::matrix::{field_apply, FieldMatrix};
use crate::substitution::MSetSubstitution;

/// Upper cap of the metric.
pub const METRIC_CAP: f64 = std::f64::consts::FRAC_1_SQRT_2;
const MATCH_TOL: f64 = 1e-7;

/// Regions F_n.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VanHove {
    /// [−n, n]^d.
    Cubes,
    /// Euclidean balls of radius n.
    Balls,
}

impl VanHove {
    /// Bounding cube of F_n centered at x.
    pub fn region(&self, x: &[f64], n: f64) -> Region {
        Region::cube(x, n)
    }

    pub fn contains(&self, x: &[f64], n: f64, p: &[f64]) -> bool {
        match self {
            VanHove::Cubes => p.iter().zip(x).all(|(a, b)| (a - b).abs() <= n),
            VanHove::Balls => p.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() <= n,
        }
    }

    pub fn volume(&self, d: usize, n: f64) -> f64 {
        match self {
            VanHove::Cubes => (2.0 * n).powi(d as i32),
            VanHove::Balls => unit_ball_volume(d) * n.powi(d as i32),
        }
    }

    /// vol((∂F_n)^{+r}) / vol(F_n).
    pub fn boundary_ratio(&self, d: usize, n: f64, r: f64) -> f64 {
        let inner = (n - r).max(0.0);
        (self.volume(d, n + r) - self.volume(d, inner)) / self.volume(d, n)
    }
}

fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(d - 2) * 2.0 * std::f64::consts::PI / d as f64,
    }
}

fn restricted(x: &MSet, center: &[f64], radius: f64) -> Vec<(usize, Vec<f64>)> {
    let mut out = Vec::new();
    for i in 0..x.colors() {
        for p in x.color_positions(i) {
            let rel: Vec<f64> = p.iter().zip(center).map(|(a, b)| a - b).collect();
            if norm(&rel) < radius {
                out.push((i, rel));
            }
        }
    }
    out
}

fn same_restricted(a: &[(usize, Vec<f64>)], b: &[(usize, Vec<f64>)], colors: usize) -> bool {
    if a.len() != b.len() {
        return false;
    }
    for c in 0..colors {
        let pa: Vec<Vec<f64>> = a.iter().filter(|e| e.0 == c).map(|e| e.1.clone()).collect();
        let pb: Vec<Vec<f64>> = b.iter().filter(|e| e.0 == c).map(|e| e.1.clone()).collect();
        if pa.len() != pb.len() {
            return false;
        }
        if pa.is_empty() {
            continue;
        }
        let index = PointIndex::auto(&pb);
        let mut used = HashSet::new();
        for p in &pa {
            match index.nearest(p) {
                Some((j, d)) if d <= MATCH_TOL && used.insert(j) => {}
                _ => return false,
            }
        }
    }
    true
}

/// Outcome of the big-ball metric search.
#[derive(Clone, Debug)]
pub struct BallDistance {
    pub distance: f64,
    /// Translations realizing the reported value.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Smallest ε the patches can resolve; values below it rest on the best data translation.
    pub resolution: f64,
}

/// Radius of the largest origin-centered cube inside the bounding box.
fn coverage(x: &MSet) -> f64 {
    x.bounding_box()
        .map_or(0.0, |b| b.lo.iter().zip(&b.hi).map(|(l, h)| (-l).min(*h)).fold(f64::INFINITY, f64::min).max(0.0))
}

/// min{ρ̃(Λ₁, Λ₂), 2^{−1/2}} on finite patches around the origin.
pub fn big_ball_distance(a: &MSet, b: &MSet) -> Result<BallDistance> {
    let d = a.frame().dim();
    if b.frame().dim() != d || a.colors() != b.colors() {
        return Err(Error::Dimension("sets must share dimension and color count".into()));
    }
    let zero = vec![0.0; d];
    if a == b {
        return Ok(BallDistance { distance: 0.0, x: zero.clone(), y: zero, resolution: 0.0 });
    }
    let cov = coverage(a).min(coverage(b));
    let resolution = if cov > 2.0 { (1.0 / (cov - 1.0)).min(METRIC_CAP) } else { METRIC_CAP };
    // Relative translations t = x − y that can align the point of Λ₁ nearest the origin.
    let anchor = (0..a.colors())
        .flat_map(|i| a.color_positions(i).iter().map(move |p| (i, p)))
        .min_by(|p, q| norm(p.1).total_cmp(&norm(q.1)));
    let Some((ac, ap)) = anchor else {
        let empty_b = (0..b.colors()).all(|i| b.color(i).is_empty());
        let dist = if empty_b { 0.0 } else { METRIC_CAP };
        return Ok(BallDistance { distance: dist, x: zero.clone(), y: zero, resolution });
    };
    let reach = norm(ap) + 2.0 * METRIC_CAP;
    let mut cands: Vec<Vec<f64>> = b
        .color_positions(ac)
        .iter()
        .filter(|q| norm(q) <= reach)
        .map(|q| ap.iter().zip(q.iter()).map(|(u, v)| u - v).collect())
        .collect();
    cands.sort_by(|u, v| norm(u).total_cmp(&norm(v)));
    let try_eps = |eps: f64| -> Option<(Vec<f64>, Vec<f64>)> {
        let r = 1.0 / eps;
        for t in cands.iter().filter(|t| norm(t) <= 2.0 * eps + TAU_MATCH) {
            for (x, y) in splits(t, eps) {
                if same_restricted(&restricted(a, &x, r), &restricted(b, &y, r), a.colors()) {
                    return Some((x, y));
                }
            }
        }
        None
    };
    if let Some((x, y)) = try_eps(resolution) {
        // The data cannot refute anything smaller; report the aligning translation itself.
        let (mut best, mut bx, mut by) = (norm(&x).max(norm(&y)), x, y);
        for t in cands.iter().filter(|t| norm(t) <= 2.0 * resolution + TAU_MATCH) {
            let h: Vec<f64> = t.iter().map(|v| v / 2.0).collect();
            let mh: Vec<f64> = h.iter().map(|v| -v).collect();
            if norm(&h) < best
                && same_restricted(
                    &restricted(a, &h, 1.0 / resolution),
                    &restricted(b, &mh, 1.0 / resolution),
                    a.colors(),
                )
            {
                best = norm(&h);
                bx = h;
                by = mh;
            }
        }
        return Ok(BallDistance { distance: best, x: bx, y: by, resolution });
    }
    let mut lo = resolution;
    let mut eps = resolution * 1.05;
    while eps < METRIC_CAP {
        if let Some(mut hit) = try_eps(eps) {
            let mut hi = eps;
            for _ in 0..30 {
                let mid = 0.5 * (lo + hi);
                match try_eps(mid) {
                    Some(h) => {
                        hi = mid;
                        hit = h;
                    }
                    None => lo = mid,
                }
            }
            return Ok(BallDistance { distance: hi, x: hit.0, y: hit.1, resolution });
        }
        lo = eps;
        eps *= 1.05;
    }
    Ok(BallDistance { distance: METRIC_CAP, x: zero.clone(), y: zero, resolution })
}

const TAU_MATCH: f64 = 1e-12;

/// Candidate (x, y) in B_ε(0)² with x − y = t: the symmetric split, then a grid of pitch ε/8.
fn splits(t: &[f64], eps: f64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let d = t.len();
    let half: Vec<f64> = t.iter().map(|v| v / 2.0).collect();
    let mut out = vec![(half.clone(), half.iter().map(|v| -v).collect::<Vec<f64>>())];
    let pitch = eps / 8.0;
    let steps = 8i64;
    let mut idx = vec![-steps; d];
    loop {
        let x: Vec<f64> = idx.iter().map(|&i| i as f64 * pitch).collect();
        let y: Vec<f64> = x.iter().zip(t).map(|(u, v)| u - v).collect();
        if norm(&x) <= eps + TAU_MATCH && norm(&y) <= eps + TAU_MATCH {
            out.push((x, y));
        }
        let mut ax = 0;
        loop {
            if ax == d {
                return out;
            }
            idx[ax] += 1;
            if idx[ax] <= steps {
                break;
            }
            idx[ax] = -steps;
            ax += 1;
        }
    }
}

/// Translates t with P + t ⊆ Λ ∩ A, where A = x + F_n.
pub fn count_translates(x: &MSet, p: &Cluster, seq: VanHove, center: &[f64], n: f64) -> Result<usize> {
    if !x.frame().same(p.frame()) || x.colors() != p.colors() {
        return Err(Error::Dimension("cluster must share frame and colors with the set".into()));
    }
    let Some(c0) = (0..p.colors()).find(|&i| !p.color(i).is_empty()) else {
        return Err(Error::Precondition("empty cluster".into()));
    };
    let anchor = &p.color(c0)[0];
    let frame = x.frame();
    let mut count = 0;
    for (q, pos) in x.color(c0).iter().zip(x.color_positions(c0)) {
        if !seq.contains(center, n, pos) {
            continue;
        }
        let t: Point = q.iter().zip(anchor).map(|(a, b)| a - b).collect();
        let fits = (0..p.colors()).all(|i| {
            p.color(i).iter().all(|r| {
                let s: Point = r.iter().zip(&t).map(|(a, b)| a + b).collect();
                x.contains(i, &s) && seq.contains(center, n, &frame.position(&s))
            })
        });
        if fits {
            count += 1;
        }
    }
    Ok(count)
}

#[derive(Clone, Debug)]
pub struct FrequencyRow {
    pub n: f64,
    pub counts: Vec<usize>,
    pub frequencies: Vec<f64>,
    pub spread: f64,
}

#[derive(Clone, Debug)]
pub struct FrequencyReport {
    pub cluster: Cluster,
    pub samples: Vec<Vec<f64>>,
    pub rows: Vec<FrequencyRow>,
    pub limit: f64,
    /// Spread at the largest n is no larger than at the smallest.
    pub spread_decreasing: bool,
}

impl FrequencyReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,mean,min,max,spread\n");
        for r in &self.rows {
            let mean = r.frequencies.iter().sum::<f64>() / r.frequencies.len() as f64;
            let min = r.frequencies.iter().copied().fold(f64::INFINITY, f64::min);
            let max = r.frequencies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let _ = writeln!(s, "{},{mean},{min},{max},{}", r.n, r.spread);
        }
        s
    }
}

/// L_P(x + F_n)/vol(F_n) for each sample x and each n.
pub fn cluster_frequency(
    x: &MSet,
    p: &Cluster,
    seq: VanHove,
    samples: &[Vec<f64>],
    ns: &[f64],
) -> Result<FrequencyReport> {
    let d = x.frame().dim();
    if samples.is_empty() || ns.is_empty() {
        return Err(Error::Precondition("need at least one sample and one n".into()));
    }
    let bbox = x.bounding_box().ok_or_else(|| Error::TooFewPoints("empty patch".into()))?;
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let mut counts = Vec::with_capacity(samples.len());
        for s in samples {
            if s.len() != d {
                return Err(Error::Dimension(format!("sample needs {d} coordinates")));
            }
            if !bbox.contains_region(&seq.region(s, n)) {
                return Err(Error::WindowTooSmall(format!("patch does not cover F_{n} at {s:?}")));
            }
            counts.push(count_translates(x, p, seq, s, n)?);
        }
        let vol = seq.volume(d, n);
        let frequencies: Vec<f64> = counts.iter().map(|&c| c as f64 / vol).collect();
        let spread = frequencies.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - frequencies.iter().copied().fold(f64::INFINITY, f64::min);
        rows.push(FrequencyRow { n, counts, frequencies, spread });
    }
    let last = rows.last().expect("nonempty");
    let limit = last.frequencies.iter().sum::<f64>() / last.frequencies.len() as f64;
    let spread_decreasing = last.spread <= rows[0].spread;
    Ok(FrequencyReport { cluster: p.clone(), samples: samples.to_vec(), rows, limit, spread_decreasing })
}

/// Per-color point densities predicted by the PF right eigenvector, normalized so that the tiles
/// with the given volumes fill space.
pub fn pf_point_densities(phi: &MSetSubstitution, volumes: &[f64]) -> Result<Vec<f64>> {
    let rep = crate::spectral::pf_analysis(&phi.substitution_matrix())?;
    if volumes.len() != rep.right.len() {
        return Err(Error::Dimension("one volume per color".into()));
    }
    let total: f64 = rep.right.iter().zip(volumes).map(|(r, v)| r * v).sum();
    if total <= 0.0 {
        return Err(Error::Precondition("tiles have zero total volume".into()));
    }
    Ok(rep.right.iter().map(|r| r / total).collect())
}

/// Ψ_δ restricted to a search window.
#[derive(Clone, Debug)]
pub struct AlmostPeriods {
    pub delta: f64,
    pub periods: Vec<Point>,
    pub positions: Vec<Vec<f64>>,
}

/// All y ∈ (Λ − Λ) ∩ window with Λ ∩ B_{1/δ}(0) = (Λ − y) ∩ B_{1/δ}(0), compared on module coordinates.
pub fn almost_periods(x: &MSet, delta: f64, window: &Region) -> Result<AlmostPeriods> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::Precondition("δ must be positive".into()));
    }
    let d = x.frame().dim();
    if window.dim() != d {
        return Err(Error::Dimension(format!("window must be {d}-dimensional")));
    }
    let r = 1.0 / delta;
    let wr = window.lo.iter().chain(&window.hi).map(|v| v.abs()).fold(0.0, f64::max);
    let bbox = x.bounding_box().ok_or_else(|| Error::TooFewPoints("empty patch".into()))?;
    if !bbox.contains_region(&Region::cube(&vec![0.0; d], r + wr)) {
        return Err(Error::WindowTooSmall(format!("patch must contain the cube of half-width {}", r + wr)));
    }
    let frame = x.frame();
    let ball = |shift: &[i64]| -> Vec<HashSet<Point>> {
        let center = frame.position(shift);
        (0..x.colors())
            .map(|i| {
                x.color(i)
                    .iter()
                    .zip(x.color_positions(i))
                    .filter(|(_, p)| p.iter().zip(&center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() < r)
                    .map(|(q, _)| q.iter().zip(shift).map(|(a, b)| a - b).collect())
                    .collect()
            })
            .collect()
    };
    let zero = vec![0i64; frame.rank()];
    let base = ball(&zero);
    let anchor = base
        .iter()
        .enumerate()
        .flat_map(|(i, s)| s.iter().map(move |p| (i, p.clone())))
        .min_by(|a, b| norm(&frame.position(&a.1)).total_cmp(&norm(&frame.position(&b.1))).then(a.1.cmp(&b.1)));
    let Some((ac, ap)) = anchor else {
        return Err(Error::Precondition("no point within 1/δ of the origin".into()));
    };
    let mut periods = Vec::new();
    for q in x.color(ac) {
        // p₀ − y ∈ Λ forces y = p₀ − q.
        let y: Point = ap.iter().zip(q).map(|(a, b)| a - b).collect();
        let pos = frame.position(&y);
        if !window.contains(&pos) {
            continue;
        }
        if ball(&y.iter().map(|v| -v).collect::<Vec<_>>()) == base {
            periods.push(y);
        }
    }
    periods.sort();
    let positions = periods.iter().map(|p| frame.position(p)).collect();
    Ok(AlmostPeriods { delta, periods, positions })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenVerdict {
    Consistent,
    Rejected,
    Inconclusive,
}

impl fmt::Display for EigenVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EigenVerdict::Consistent => "eigenvalue-consistent",
            EigenVerdict::Rejected => "rejected",
            EigenVerdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug)]
pub struct EigenRow {
    pub delta: f64,
    pub periods: usize,
    pub sup: f64,
    pub argmax: Option<Point>,
}

#[derive(Clone, Debug)]
pub struct TopologicalReport {
    pub rows: Vec<EigenRow>,
    pub verdict: EigenVerdict,
}

impl TopologicalReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("delta,periods,sup\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{}", r.delta, r.periods, r.sup);
        }
        s
    }
}

/// sup over y ∈ Ψ_δ ∩ window of |e^{2πi⟨y,α⟩} − 1| for each δ (decreasing).
/// Consistent: non-increasing with final value below 0.1. Rejected: final value above 1.
/// Rows with Ψ_δ ∩ window = {0} are reported but do not enter the verdict.
pub fn topological_eigenvalue_test(
    x: &MSet,
    alpha: &[f64],
    deltas: &[f64],
    window: &Region,
) -> Result<TopologicalReport> {
    if deltas.is_empty() || deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Precondition("δ list must be nonempty and decreasing".into()));
    }
    if alpha.len() != x.frame().dim() {
        return Err(Error::Dimension("α must match the dimension".into()));
    }
    let mut rows = Vec::with_capacity(deltas.len());
    let mut nontrivial = false;
    for &delta in deltas {
        let ap = almost_periods(x, delta, window)?;
        let mut sup = 0.0;
        let mut argmax = None;
        for (y, pos) in ap.periods.iter().zip(&ap.positions) {
            if y.iter().any(|&v| v != 0) {
                nontrivial = true;
            }
            let dot: f64 = pos.iter().zip(alpha).map(|(a, b)| a * b).sum();
            let v = 2.0 * (std::f64::consts::PI * dot).sin().abs();
            if v > sup {
                sup = v;
                argmax = Some(y.clone());
            }
        }
        rows.push(EigenRow { delta, periods: ap.periods.len(), sup, argmax });
    }
    if !nontrivial {
        return Err(Error::Inconclusive("Ψ_δ is {0} at every δ".into()));
    }
    // Rows where only y = 0 survives inside the window carry no information.
    let informative: Vec<&EigenRow> = rows.iter().filter(|r| r.periods > 1).collect();
    let last = informative.last().expect("nontrivial row").sup;
    let decreasing = informative.windows(2).all(|w| w[1].sup <= w[0].sup + 1e-12);
    let verdict = if decreasing && last < 0.1 {
        EigenVerdict::Consistent
    } else if last > 1.0 {
        EigenVerdict::Rejected
    } else {
        EigenVerdict::Inconclusive
    };
    Ok(TopologicalReport { rows, verdict })
}

/// Nonzero inter-atomic vectors ⋃ᵢ(Λᵢ − Λᵢ), shortest first, from points near the patch center.
pub fn interatomic_sample(x: &MSet, count: usize) -> Result<Vec<Point>> {
    let center = x.bounding_box().ok_or_else(|| Error::TooFewPoints("empty patch".into()))?.center();
    let mut set = HashSet::new();
    for i in 0..x.colors() {
        let mut pts: Vec<(f64, &Point)> = x
            .color(i)
            .iter()
            .zip(x.color_positions(i))
            .map(|(p, pos)| (pos.iter().zip(&center).map(|(a, b)| (a - b).powi(2)).sum::<f64>(), p))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(b.1)));
        let near: Vec<&Point> = pts.iter().take(4 * count).map(|e| e.1).collect();
        for a in &near {
            for b in &near {
                let v: Point = a.iter().zip(b.iter()).map(|(u, w)| u - w).collect();
                if v.iter().any(|&c| c != 0) {
                    set.insert(v);
                }
            }
        }
    }
    let frame = x.frame();
    let mut all: Vec<Point> = set.into_iter().collect();
    all.sort_by(|a, b| norm(&frame.position(a)).total_cmp(&norm(&frame.position(b))).then(a.cmp(b)));
    all.truncate(count);
    let d = frame.dim();
    let rows: Vec<Vec<f64>> = all.iter().map(|p| frame.position(p)).collect();
    if all.len() < count || float_rank(&rows) < d {
        return Err(Error::Precondition(format!("inter-atomic sample does not span R^{d}")));
    }
    Ok(all)
}

fn float_rank(rows: &[Vec<f64>]) -> usize {
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())) else { break };
        if m[p][c].abs() <= 1e-9 * scale {
            continue;
        }
        m.swap(rank, p);
        for i in 0..m.len() {
            if i != rank {
                let f = m[i][c] / m[rank][c];
                for k in 0..cols {
                    m[i][k] -= f * m[rank][k];
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Clone, Debug, PartialEq)]
pub enum QnVerdict {
    /// Every sequence is below 10⁻³ from some n ≤ N on. Necessary, not sufficient.
    Passed,
    Failed {
        witness: Point,
    },
}

#[derive(Clone, Debug)]
pub struct QnReport {
    pub samples: Vec<Point>,
    /// ‖⟨Qⁿx, α⟩‖ for n = 0..=N + 10, one row per sample.
    pub sequences: Vec<Vec<f64>>,
    pub verdict: QnVerdict,
}

impl QnReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,max_over_samples\n");
        let len = self.sequences.first().map_or(0, Vec::len);
        for n in 0..len {
            let m = self.sequences.iter().map(|q| q[n]).fold(0.0, f64::max);
            let _ = writeln!(s, "{n},{m}");
        }
        s
    }
}

pub const QN_THRESHOLD: f64 = 1e-3;
const QN_TAIL: usize = 10;

/// Exact ‖⟨Qⁿx, α⟩‖ over an inter-atomic sample, with α and Q over the frame's field.
pub fn qn_eigenvalue_test(x: &MSet, q: &FieldMatrix, alpha: &[Elem], n: usize, sample: usize) -> Result<QnReport> {
    let frame = x.frame();
    let field = frame.field();
    let d = frame.dim();
    if q.len() != d || q.iter().any(|r| r.len() != d) || alpha.len() != d {
        return Err(Error::Dimension(format!("Q must be {d} x {d} and α of length {d}")));
    }
    let samples = interatomic_sample(x, sample.max(20))?;
    let mut sequences = Vec::with_capacity(samples.len());
    let mut witness = None;
    for s in &samples {
        let mut v = frame.exact_position(s);
        let mut seq = Vec::with_capacity(n + QN_TAIL + 1);
        for _ in 0..=n + QN_TAIL {
            let dot = v.iter().zip(alpha).fold(field.zero(), |acc, (a, b)| field.add(&acc, &field.mul(a, b)));
            seq.push(field.dist_to_int(&dot, 1e-15)?);
            v = field_apply(field, q, &v);
        }
        let settled = seq.iter().rposition(|&e| e >= QN_THRESHOLD).map_or(0, |i| i + 1);
        if settled > n && witness.is_none() {
            witness = Some(s.clone());
        }
        sequences.push(seq);
    }
    let verdict = match witness {
        None => QnVerdict::Passed,
        Some(w) => QnVerdict::Failed { witness: w },
    };
    Ok(QnReport { samples, sequences, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delone::{lattice_patch, ModuleFrame};
    use crate::substitution::{fibonacci, find_two_sided_cluster, generate_patch};
    use std::sync::Arc;

    fn rat(a: i64, b: i64) -> num_rational::BigRational {
        num_rational::BigRational::new(a.into(), b.into())
    }

    fn fib_patch(half: f64) -> MSet {
        let phi = fibonacci();
        let g = find_two_sided_cluster(&phi).unwrap();
        generate_patch(&phi, &g, &Region::interval(-half, half)).unwrap()
    }

    #[test]
    fn metric_examples() {
        let z = lattice_patch(1, 300);
        assert_eq!(big_ball_distance(&z, &z).unwrap().distance, 0.0);
        let field = z.frame().field().clone();
        let half = Arc::new(ModuleFrame::new(field.clone(), vec![vec![field.from_rational(rat(1, 2))]]).unwrap());
        let shifted = MSet::new(half.clone(), vec![(-300..300).map(|k| vec![2 * k + 1]).collect()]).unwrap();
        let zz = MSet::new(half, vec![(-300..=300).map(|k| vec![2 * k]).collect()]).unwrap();
        let r = big_ball_distance(&zz, &shifted).unwrap();
        assert!((r.distance - 0.25).abs() < 1e-6, "{}", r.distance);
        let r2 = big_ball_distance(&shifted, &zz).unwrap();
        assert!((r.distance - r2.distance).abs() < 1e-9);
    }

    #[test]
    fn frequencies() {
        let z = lattice_patch(1, 60);
        let p = MSet::new(z.frame().clone(), vec![vec![vec![0]]]).unwrap();
        let rep = cluster_frequency(&z, &p, VanHove::Cubes, &[vec![0.0], vec![7.3]], &[10.5, 40.5]).unwrap();
        assert!(rep.rows.iter().all(|r| r.frequencies.iter().all(|f| (f - 1.0).abs() < 0.05)));

        let x = fib_patch(700.0);
        let phi = fibonacci();
        let a = phi.single(0, vec![0, 0]);
        let samples: Vec<Vec<f64>> = (0..25).map(|k| vec![-150.0 + 11.3 * k as f64]).collect();
        let rep = cluster_frequency(&x, &a, VanHove::Cubes, &samples, &[20.0, 100.0, 400.0]).unwrap();
        assert!((rep.limit - 1.0 / 5f64.sqrt()).abs() < 5e-3, "{}", rep.limit);
        assert!(rep.spread_decreasing, "{}", rep.to_csv());
        let dens = pf_point_densities(&phi, &[1.618_033_988_749_895, 1.0]).unwrap();
        assert!((dens[0] - 1.0 / 5f64.sqrt()).abs() < 1e-9);
        assert!((dens[0] / (dens[0] + dens[1]) - 0.618_033_988_749_895).abs() < 1e-9);
    }

    #[test]
    fn van_hove() {
        for r in [1.0, 5.0] {
            let a = VanHove::Cubes.boundary_ratio(2, 10.0, r);
            let b = VanHove::Cubes.boundary_ratio(2, 100.0, r);
            assert!(b < a && b < 0.25);
        }
    }

    #[test]
    fn fibonacci_almost_periods_and_eigenvalues() {
        let x = fib_patch(600.0);
        let w = Region::interval(-400.0, 400.0);
        let ap = almost_periods(&x, 0.2, &w).unwrap();
        assert!(ap.periods.contains(&vec![0, 0]) && ap.periods.len() > 1);
        let deltas = [0.2, 0.1, 0.05, 0.02, 0.01];
        let one = topological_eigenvalue_test(&x, &[1.0], &deltas, &w).unwrap();
        assert_eq!(one.verdict, EigenVerdict::Consistent, "{:?}", one.rows);
        let third = topological_eigenvalue_test(&x, &[1.0 / 3.0], &deltas, &w).unwrap();
        assert_eq!(third.verdict, EigenVerdict::Rejected, "{:?}", third.rows);

        let field = x.frame().field().clone();
        let q = vec![vec![field.beta()]];
        let rep = qn_eigenvalue_test(&x, &q, &[field.one()], 30, 20).unwrap();
        assert_eq!(rep.verdict, QnVerdict::Passed);
        let sqrt5 = field.sub(&field.scale(&field.beta(), &rat(2, 1)), &field.one());
        let inv = field.inv(&sqrt5).unwrap();
        assert_eq!(qn_eigenvalue_test(&x, &q, &[inv], 30, 20).unwrap().verdict, QnVerdict::Passed);
        let third = field.from_rational(rat(1, 3));
        assert!(matches!(qn_eigenvalue_test(&x, &q, &[third], 30, 20).unwrap().verdict, QnVerdict::Failed { .. }));
    }
}
