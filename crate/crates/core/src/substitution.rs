//! Substitution Delone m-sets Λᵢ = ⊎ⱼ (QΛⱼ + 𝒟ᵢⱼ).

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::delone::{MSet, ModuleFrame, Point, TAU};
use crate::error::{Error, Result};
use crate::field::{Elem, NumberField};
use crate::geometry::{norm, PointIndex, Region};
use crate::matrix::{
    charpoly, field_det, field_to_f64, int_apply, solve_rational, to_rational, FieldMatrix, IntMatrix,
};
use crate::poly::IntPolynomial;
use crate::roots::isolate_roots;
use crate::spectral::{pf_analysis, SpectralReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OverlapMode {
    #[default]
    Strict,
    Lenient,
}

/// Expansion Q with digit sets 𝒟ᵢⱼ in module coordinates.
#[derive(Clone)]
pub struct MSetSubstitution {
    frame: Arc<ModuleFrame>,
    q: FieldMatrix,
    m_int: IntMatrix,
    digits: Vec<Vec<Vec<Point>>>,
}

impl fmt::Debug for MSetSubstitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MSetSubstitution(m={}, S={:?})", self.colors(), self.substitution_matrix())
    }
}

impl MSetSubstitution {
    /// `digits[i][j]` is 𝒟ᵢⱼ, given by module coordinates.
    pub fn new(frame: Arc<ModuleFrame>, q: FieldMatrix, digits: Vec<Vec<Vec<Point>>>) -> Result<Self> {
        let m = digits.len();
        if m == 0 || digits.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension("digit matrix must be square and nonempty".into()));
        }
        let s = frame.rank();
        if digits.iter().flatten().flatten().any(|p| p.len() != s) {
            return Err(Error::NotInModule(format!("digits need {s} module coordinates")));
        }
        let m_int = frame.induced_matrix(&q)?;
        let mut digits = digits;
        for d in digits.iter_mut().flatten() {
            d.sort();
        }
        Ok(Self { frame, q, m_int, digits })
    }

    /// Digit sets given by exact positions, converted through the address map.
    pub fn from_positions(frame: Arc<ModuleFrame>, q: FieldMatrix, digits: Vec<Vec<Vec<Vec<Elem>>>>) -> Result<Self> {
        let conv = digits
            .iter()
            .map(|row| {
                row.iter()
                    .map(|set| {
                        set.iter()
                            .map(|w| {
                                frame
                                    .address(w)
                                    .ok_or_else(|| Error::NotInModule(format!("{:?}", frame_pos(&frame, w))))
                            })
                            .collect::<Result<Vec<Point>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(frame, q, conv)
    }

    pub fn frame(&self) -> &Arc<ModuleFrame> {
        &self.frame
    }

    pub fn expansion(&self) -> &FieldMatrix {
        &self.q
    }

    pub fn expansion_f64(&self) -> Vec<Vec<f64>> {
        field_to_f64(self.frame.field(), &self.q)
    }

    /// Integer matrix M with QV = VM.
    pub fn module_matrix(&self) -> &IntMatrix {
        &self.m_int
    }

    pub fn colors(&self) -> usize {
        self.digits.len()
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn digits(&self, i: usize, j: usize) -> &[Point] {
        &self.digits[i][j]
    }

    pub fn substitution_matrix(&self) -> IntMatrix {
        self.digits.iter().map(|r| r.iter().map(|d| d.len() as i64).collect()).collect()
    }

    pub fn det_q(&self) -> Result<f64> {
        Ok(self.frame.field().to_f64(&field_det(self.frame.field(), &self.q)?))
    }

    /// Largest digit norm.
    pub fn max_digit_norm(&self) -> f64 {
        self.digits.iter().flatten().flatten().map(|p| norm(&self.frame.position(p))).fold(0.0, f64::max)
    }

    /// Moduli of the eigenvalues of Q, certified through the integer matrix M.
    pub fn expansion_moduli(&self) -> Result<Vec<(f64, f64)>> {
        let cp = charpoly(&self.m_int);
        let roots = isolate_roots(&cp, 1e-12)?;
        let qf = self.expansion_f64();
        let d = qf.len();
        let mut out = Vec::new();
        for r in &roots {
            // λ is an eigenvalue of Q when det(Q − λI) vanishes.
            let det = complex_det(&qf, r.center);
            let scale = qf.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max).max(r.center.norm()).max(1.0);
            if det.norm() <= 1e-7 * scale.powi(d as i32) {
                let (lo, hi) = r.modulus_bounds();
                for _ in 0..r.multiplicity.min(d) {
                    out.push((lo, hi));
                }
            }
        }
        out.truncate(d);
        Ok(out)
    }

    /// Operator-norm bound of Q⁻¹ (Euclidean) from the float matrix.
    pub fn inverse_norm(&self) -> Result<f64> {
        let qf = self.expansion_f64();
        let d = qf.len();
        let mut cols = Vec::with_capacity(d);
        for k in 0..d {
            let e: Vec<f64> = (0..d).map(|i| if i == k { 1.0 } else { 0.0 }).collect();
            cols.push(crate::matrix::solve_f64(&qf, &e).ok_or(Error::Singular)?);
        }
        // Frobenius norm bounds the operator norm.
        Ok(cols.iter().flatten().map(|x| x * x).sum::<f64>().sqrt())
    }

    /// Bound on the distance from a point to all its descendants' tiles.
    pub fn tile_radius(&self) -> Result<f64> {
        let (rate, c) = adapted_contraction(self)?;
        Ok(c * self.max_digit_norm() * rate / (1.0 - rate))
    }

    /// One application of Φ with overlap bookkeeping.
    pub fn apply_once(&self, x: &MSet) -> Result<(MSet, Vec<OverlapWitness>)> {
        if x.colors() != self.colors() {
            return Err(Error::Dimension(format!(
                "m-set has {} colors, substitution has {}",
                x.colors(),
                self.colors()
            )));
        }
        let m = self.colors();
        let mut out: Vec<Vec<Point>> = vec![Vec::new(); m];
        let mut overlaps = Vec::new();
        for i in 0..m {
            let mut seen: HashMap<Point, (usize, Point, Point)> = HashMap::new();
            for j in 0..m {
                if self.digits[i][j].is_empty() {
                    continue;
                }
                for n in x.color(j) {
                    let mn = int_apply(&self.m_int, n)?;
                    for a in &self.digits[i][j] {
                        let y: Point = mn.iter().zip(a).map(|(u, v)| u + v).collect();
                        if let Some(first) = seen.get(&y) {
                            overlaps.push(OverlapWitness {
                                color: i,
                                point: y.clone(),
                                first: first.clone(),
                                second: (j, n.clone(), a.clone()),
                            });
                        } else {
                            seen.insert(y.clone(), (j, n.clone(), a.clone()));
                            out[i].push(y);
                        }
                    }
                }
            }
        }
        Ok((MSet::new(self.frame.clone(), out)?, overlaps))
    }

    /// Φᵏ(x); overlaps are an error in strict mode and merged in lenient mode.
    pub fn apply(&self, x: &MSet, k: usize, mode: OverlapMode) -> Result<(MSet, Vec<OverlapWitness>)> {
        let mut cur = x.clone();
        let mut all = Vec::new();
        for _ in 0..k {
            let (next, ov) = self.apply_once(&cur)?;
            if mode == OverlapMode::Strict {
                if let Some(w) = ov.first() {
                    return Err(Error::Overlap(w.to_string()));
                }
            }
            all.extend(ov);
            cur = next;
        }
        Ok((cur, all))
    }

    /// Digit sets of Φᵖ: 𝒟⁽ᵖ⁾ᵢⱼ = ⋃ₖ (Q𝒟⁽ᵖ⁻¹⁾ₖⱼ + 𝒟ᵢₖ).
    pub fn power(&self, p: usize) -> Result<MSetSubstitution> {
        let mut cur = self.clone();
        for _ in 1..p {
            let m = self.colors();
            let mut digits = vec![vec![Vec::new(); m]; m];
            for i in 0..m {
                for j in 0..m {
                    let mut set = BTreeSet::new();
                    for k in 0..m {
                        for b in &cur.digits[k][j] {
                            let qb = int_apply(&self.m_int, b)?;
                            for a in &self.digits[i][k] {
                                set.insert(qb.iter().zip(a).map(|(u, v)| u + v).collect::<Point>());
                            }
                        }
                    }
                    digits[i][j] = set.into_iter().collect();
                }
            }
            let q = mul_field(self.frame.field(), &self.q, &cur.q);
            cur = MSetSubstitution::new(self.frame.clone(), q, digits)?;
        }
        Ok(cur)
    }

    pub fn single(&self, color: usize, p: Point) -> MSet {
        let mut colors = vec![Vec::new(); self.colors()];
        colors[color].push(p);
        MSet::new(self.frame.clone(), colors).expect("a single point")
    }
}

fn frame_pos(frame: &ModuleFrame, w: &[Elem]) -> Vec<f64> {
    w.iter().map(|e| frame.field().to_f64(e)).collect()
}

fn mul_field(field: &NumberField, a: &FieldMatrix, b: &FieldMatrix) -> FieldMatrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(field.zero(), |acc, k| field.add(&acc, &field.mul(&a[i][k], &b[k][j]))))
                .collect()
        })
        .collect()
}

fn complex_det(a: &[Vec<f64>], lambda: Complex64) -> Complex64 {
    let n = a.len();
    let mut m: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Complex64::new(a[i][j], 0.0) - if i == j { lambda } else { Complex64::new(0.0, 0.0) })
                .collect()
        })
        .collect();
    let mut det = Complex64::new(1.0, 0.0);
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| m[x][c].norm().total_cmp(&m[y][c].norm())).unwrap_or(c);
        if m[p][c].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for j in c..n {
                let t = f * m[c][j];
                m[i][j] -= t;
            }
        }
    }
    det
}

/// Contraction rate of Q⁻¹ in an adapted norm, with the norm-equivalence constant.
///
/// The adapted norm is ‖x‖' = Σ_{k<K} ρ⁻ᵏ‖Q⁻ᵏx‖ for a power K where ‖Q⁻ᴷ‖ < ρᴷ.
pub fn adapted_contraction(phi: &MSetSubstitution) -> Result<(f64, f64)> {
    let qf = phi.expansion_f64();
    let d = qf.len();
    let mut inv = vec![vec![0.0; d]; d];
    for k in 0..d {
        let e: Vec<f64> = (0..d).map(|i| if i == k { 1.0 } else { 0.0 }).collect();
        let col = crate::matrix::solve_f64(&qf, &e).ok_or(Error::Singular)?;
        for i in 0..d {
            inv[i][k] = col[i];
        }
    }
    let op_norm = |m: &Vec<Vec<f64>>| m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let mut pow = inv.clone();
    let mut norms = vec![1.0, op_norm(&inv)];
    for _ in 2..=64 {
        pow = (0..d).map(|i| (0..d).map(|j| (0..d).map(|t| pow[i][t] * inv[t][j]).sum()).collect()).collect();
        norms.push(op_norm(&pow));
    }
    for kk in 1..=64usize {
        let rho = norms[kk].powf(1.0 / kk as f64);
        if rho < 1.0 {
            let rate = rho.max(1e-12);
            let c = (0..kk).map(|t| norms[t] / rate.powi(t as i32)).sum::<f64>();
            return Ok((rate, c));
        }
    }
    Err(Error::NotContracting("no power of Q⁻¹ contracts".into()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverlapWitness {
    pub color: usize,
    pub point: Point,
    pub first: (usize, Point, Point),
    pub second: (usize, Point, Point),
}

impl fmt::Display for OverlapWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "color {} point {:?} produced by (color {}, {:?}, digit {:?}) and (color {}, {:?}, digit {:?})",
            self.color,
            self.point,
            self.first.0,
            self.first.1,
            self.first.2,
            self.second.0,
            self.second.1,
            self.second.2
        )
    }
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub expanding: bool,
    pub expansion_moduli: Vec<(f64, f64)>,
    pub substitution_matrix: IntMatrix,
    pub spectral: SpectralReport,
    pub det_q: f64,
    /// |λ(S) − |det Q||.
    pub pf_gap: f64,
    pub overlaps: Vec<OverlapWitness>,
}

impl ValidationReport {
    pub fn pf_matches(&self) -> bool {
        self.pf_gap < 1e-9
    }

    pub fn disjoint(&self) -> bool {
        self.overlaps.is_empty()
    }

    pub fn ok(&self) -> bool {
        self.expanding && self.spectral.primitive && self.pf_matches() && self.disjoint()
    }
}

/// Expansion, primitivity, the λ(S) = |det Q| identity and disjointness on a seed.
pub fn validate(phi: &MSetSubstitution, seed: &MSet, window: &Region) -> Result<ValidationReport> {
    let expansion_moduli = phi.expansion_moduli()?;
    let expanding = expansion_moduli.len() == phi.dim() && expansion_moduli.iter().all(|(lo, _)| *lo > 1.0);
    let s = phi.substitution_matrix();
    let spectral = pf_analysis(&s)?;
    let det_q = phi.det_q()?;
    let pf_gap = (spectral.pf_eigenvalue - det_q.abs()).abs();
    let (_, overlaps) = phi.apply_once(seed)?;
    let overlaps = overlaps.into_iter().filter(|w| window.contains(&phi.frame().position(&w.point))).collect();
    Ok(ValidationReport { expanding, expansion_moduli, substitution_matrix: s, spectral, det_q, pf_gap, overlaps })
}

/// A cluster P with Φᵖ(P) ⊇ P.
#[derive(Clone, Debug)]
pub struct GeneratingCluster {
    pub cluster: MSet,
    pub period: usize,
}

impl GeneratingCluster {
    pub fn new(phi: &MSetSubstitution, cluster: MSet, period: usize) -> Result<Self> {
        if cluster.is_empty() || period == 0 {
            return Err(Error::Precondition("generating cluster must be nonempty with period >= 1".into()));
        }
        let (img, _) = phi.apply(&cluster, period, OverlapMode::Lenient)?;
        if !cluster.is_subset(&img) {
            return Err(Error::Precondition("Φᵖ(P) does not contain P".into()));
        }
        Ok(Self { cluster, period })
    }
}

/// Points x of color i with x = Q^p x + a, a ∈ 𝒟⁽ᵖ⁾ᵢᵢ.
pub fn periodic_seeds(phi: &MSetSubstitution, p: usize) -> Result<Vec<(usize, Point)>> {
    let pw = phi.power(p)?;
    let m = pw.module_matrix();
    let s = m.len();
    // (I − M) n = a
    let a_mat: IntMatrix = (0..s).map(|i| (0..s).map(|j| i64::from(i == j) - m[i][j]).collect()).collect();
    let ar = to_rational(&a_mat);
    let mut out = Vec::new();
    for i in 0..phi.colors() {
        for a in pw.digits(i, i) {
            let rhs: Vec<_> = a.iter().map(|&v| num_rational::BigRational::from_integer(v.into())).collect();
            if let Some(x) = solve_rational(&ar, &rhs) {
                let n: Option<Point> = x
                    .iter()
                    .map(|c| if c.is_integer() { num_traits::ToPrimitive::to_i64(&c.to_integer()) } else { None })
                    .collect();
                if let Some(n) = n {
                    out.push((i, n));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out.sort_by(|a, b| norm(&phi.frame().position(&a.1)).total_cmp(&norm(&phi.frame().position(&b.1))));
    Ok(out)
}

/// Search for a generating cluster: single fixed seeds first, then legal two-point clusters.
pub fn find_generating_cluster(phi: &MSetSubstitution) -> Result<GeneratingCluster> {
    for p in 1..=2 {
        if let Some((c, n)) = periodic_seeds(phi, p)?.into_iter().next() {
            return GeneratingCluster::new(phi, phi.single(c, n), p);
        }
    }
    two_point_search(phi, false)?.ok_or(Error::NoGeneratingCluster)
}

/// A generating cluster whose iterates grow in every direction, when one is found.
pub fn find_two_sided_cluster(phi: &MSetSubstitution) -> Result<GeneratingCluster> {
    two_point_search(phi, true)?.ok_or(Error::NoGeneratingCluster)
}

fn two_point_search(phi: &MSetSubstitution, two_sided: bool) -> Result<Option<GeneratingCluster>> {
    let moduli = phi.expansion_moduli()?;
    let min_mod = moduli.iter().map(|m| m.0).fold(f64::INFINITY, f64::min);
    if min_mod <= 1.0 {
        return Err(Error::NotExpanding("expansion has an eigenvalue of modulus <= 1".into()));
    }
    let radius = 2.0 * phi.max_digit_norm() / (min_mod - 1.0) + TAU;
    for p in 1..=2 {
        let seeds = periodic_seeds(phi, p)?;
        for (k, (ci, xi)) in seeds.iter().enumerate() {
            for (cj, xj) in seeds.iter().skip(k) {
                let single = ci == cj && xi == xj;
                if !single {
                    let d = norm(&phi.frame().position(&xi.iter().zip(xj).map(|(a, b)| a - b).collect::<Vec<_>>()));
                    if d > radius {
                        continue;
                    }
                }
                let mut colors = vec![Vec::new(); phi.colors()];
                colors[*ci].push(xi.clone());
                if !single {
                    colors[*cj].push(xj.clone());
                }
                let Ok(cluster) = MSet::new_dedup(phi.frame().clone(), colors) else { continue };
                if !single && is_legal(phi, &cluster, 12)?.is_none() {
                    continue;
                }
                let Ok(g) = GeneratingCluster::new(phi, cluster, p) else { continue };
                if !two_sided || grows_everywhere(phi, &g)? {
                    return Ok(Some(g));
                }
            }
        }
    }
    Ok(None)
}

fn grows_everywhere(phi: &MSetSubstitution, g: &GeneratingCluster) -> Result<bool> {
    let center = g.cluster.bounding_box().map(|b| b.center()).unwrap_or_default();
    let mut cur = g.cluster.clone();
    let mut reach = 0.0;
    for _ in 0..6 {
        cur = phi.apply(&cur, g.period, OverlapMode::Lenient)?.0;
        if cur.len() > 200_000 {
            break;
        }
        reach = inscribed_reach(&cur, &center);
    }
    Ok(reach > 2.0 * phi.max_digit_norm().max(1.0))
}

/// Largest h such that the point hull extends at least h from `center` along every axis direction.
fn inscribed_reach(x: &MSet, center: &[f64]) -> f64 {
    let Some(b) = x.bounding_box() else { return 0.0 };
    b.lo.iter().zip(&b.hi).zip(center).map(|((lo, hi), c)| (c - lo).min(hi - c)).fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LegalWitness {
    pub color: usize,
    pub k: usize,
    /// P = translation + (subcluster of Φᵏ({0}_color)).
    pub translation: Point,
}

/// Search for P as a translate of a subcluster of Φᵏ({x_j}), k ≤ k_max.
///
/// `None` means "not found up to k_max", not a disproof.
pub fn is_legal(phi: &MSetSubstitution, p: &MSet, k_max: usize) -> Result<Option<LegalWitness>> {
    let s = phi.frame().rank();
    if p.is_empty() {
        return Ok(Some(LegalWitness { color: 0, k: 0, translation: vec![0; s] }));
    }
    let (anchor_color, anchor) =
        (0..p.colors()).find_map(|c| p.color(c).first().map(|q| (c, q.clone()))).expect("nonempty");
    for j in 0..phi.colors() {
        let mut img = phi.single(j, vec![0; s]);
        for k in 0..=k_max {
            if k > 0 {
                img = phi.apply(&img, 1, OverlapMode::Lenient)?.0;
            }
            if img.len() > 300_000 {
                break;
            }
            for q in img.color(anchor_color) {
                let t: Point = q.iter().zip(&anchor).map(|(a, b)| a - b).collect();
                let fits = (0..p.colors()).all(|c| {
                    p.color(c).iter().all(|x| {
                        let y: Point = x.iter().zip(&t).map(|(a, b)| a + b).collect();
                        img.contains(c, &y)
                    })
                });
                if fits {
                    let translation = t.iter().map(|v| -v).collect();
                    return Ok(Some(LegalWitness { color: j, k, translation }));
                }
            }
        }
    }
    Ok(None)
}

/// Patch of the fixed point generated by `seed`, restricted to `region`.
pub fn generate_patch(phi: &MSetSubstitution, seed: &GeneratingCluster, region: &Region) -> Result<MSet> {
    let rho = phi.tile_radius()?.max(TAU);
    let mut cur = seed.cluster.clone();
    let mut progress: Option<(Region, usize)> = None;
    let mut stalled = 0;
    for _ in 0..200 {
        let inside = cur.restrict(region);
        if covers(&inside, region, rho) {
            let next = phi.apply(&cur, seed.period, OverlapMode::Strict)?.0.restrict(region);
            if next == inside {
                return Ok(inside);
            }
        }
        let clip = cur.restrict(&region.shrunk(-rho)).bounding_box();
        let state = clip.map(|b| (b, inside.len()));
        stalled = if state.is_some() && state == progress { stalled + 1 } else { 0 };
        if stalled >= 3 || cur.len() > 5_000_000 {
            break;
        }
        progress = state;
        cur = phi.apply(&cur, seed.period, OverlapMode::Strict)?.0;
    }
    Err(Error::NotCovered(covered_description(&cur.restrict(region))))
}

fn covered_description(x: &MSet) -> String {
    match x.bounding_box() {
        Some(b) => format!("points only in {:?}..{:?}", b.lo, b.hi),
        None => "no points in region".into(),
    }
}

/// Every point of `region` lies within `rho` of a point of `x`.
fn covers(x: &MSet, region: &Region, rho: f64) -> bool {
    let (_, pos) = x.support_with_positions();
    if pos.is_empty() {
        return false;
    }
    if region.dim() == 1 {
        let mut xs: Vec<f64> = pos.iter().map(|p| p[0]).collect();
        xs.sort_by(f64::total_cmp);
        return xs[0] <= region.lo[0] + rho
            && xs[xs.len() - 1] >= region.hi[0] - rho
            && xs.windows(2).all(|w| w[1] - w[0] <= 2.0 * rho);
    }
    let index = PointIndex::auto(&pos);
    let pitch = rho / 2.0;
    let counts: Vec<usize> = region.widths().iter().map(|w| (w / pitch) as usize + 1).collect();
    if counts.iter().product::<usize>() > 4_000_000 {
        return false;
    }
    let mut idx = vec![0usize; counts.len()];
    loop {
        let q: Vec<f64> = idx.iter().zip(&region.lo).map(|(&i, lo)| lo + i as f64 * pitch).collect();
        if index.nearest(&q).is_none_or(|(_, d)| d > rho) {
            return false;
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return true;
            }
            idx[k] += 1;
            if idx[k] < counts[k] {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[derive(Clone, Debug)]
pub struct RepetitivityReport {
    pub radius: f64,
    pub cluster_types: usize,
    /// Smallest M such that every M-ball in the patch contains every cluster type; `None`
    /// when some type occurs only once (no repetition seen in the patch).
    pub m_estimate: Option<f64>,
}

/// Patch-relative repetitivity function M_X(T).
pub fn repetitivity_probe(x: &MSet, t: f64) -> Result<RepetitivityReport> {
    let bbox = x.bounding_box().ok_or_else(|| Error::TooFewPoints("empty patch".into()))?;
    if bbox.min_width() < 10.0 * t {
        return Err(Error::WindowTooSmall(format!("patch width must be >= 10T = {}", 10.0 * t)));
    }
    let flat = x.flattened();
    let pos: Vec<Vec<f64>> = flat.iter().map(|f| f.2.clone()).collect();
    let index = PointIndex::auto(&pos);
    let (support, spos) = x.support_with_positions();
    let mut occurrences: HashMap<Vec<(usize, Point)>, Vec<Vec<f64>>> = HashMap::new();
    for (p, xp) in support.iter().zip(&spos) {
        if !bbox.contains_ball(xp, t) {
            continue;
        }
        let mut c: Vec<(usize, Point)> = index
            .within(xp, t + TAU)
            .into_iter()
            .map(|j| (flat[j].0, flat[j].1.iter().zip(p).map(|(a, b)| a - b).collect()))
            .collect();
        c.sort();
        occurrences.entry(c).or_default().push(xp.clone());
    }
    let types = occurrences.len();
    let mut worst: f64 = 0.0;
    for occ in occurrences.values() {
        if occ.len() < 2 {
            return Ok(RepetitivityReport { radius: t, cluster_types: types, m_estimate: None });
        }
        worst = worst.max(covering_radius(occ, &bbox.shrunk(t)));
    }
    Ok(RepetitivityReport { radius: t, cluster_types: types, m_estimate: Some(worst + t) })
}

/// Largest distance from a point of `within` (between the occurrences' extremes) to the nearest occurrence.
fn covering_radius(occ: &[Vec<f64>], within: &Region) -> f64 {
    if occ[0].len() == 1 {
        let mut xs: Vec<f64> = occ.iter().map(|p| p[0]).collect();
        xs.sort_by(f64::total_cmp);
        return 0.5 * xs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    }
    let hull = Region::bounding(occ).expect("nonempty");
    let scan = Region {
        lo: hull.lo.iter().zip(&within.lo).map(|(a, b)| a.max(*b)).collect(),
        hi: hull.hi.iter().zip(&within.hi).map(|(a, b)| a.min(*b)).collect(),
    };
    if scan.is_empty() {
        return 0.0;
    }
    let index = PointIndex::auto(occ);
    let pitch = (scan.volume() / 20_000.0).powf(1.0 / scan.dim() as f64).max(1e-6);
    let counts: Vec<usize> = scan.widths().iter().map(|w| (w / pitch) as usize + 1).collect();
    let mut idx = vec![0usize; counts.len()];
    let mut worst: f64 = 0.0;
    loop {
        let q: Vec<f64> = idx.iter().zip(&scan.lo).map(|(&i, lo)| lo + i as f64 * pitch).collect();
        if let Some((_, dd)) = index.nearest(&q) {
            worst = worst.max(dd);
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return worst;
            }
            idx[k] += 1;
            if idx[k] < counts[k] {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// The golden-mean substitution: colors a (tile length φ) and b (tile length 1).
pub fn fibonacci() -> MSetSubstitution {
    let field = Arc::new(NumberField::from_poly(IntPolynomial::from_i64(&[-1, -1, 1])).expect("golden field"));
    let frame = ModuleFrame::power_basis(field.clone());
    let q = vec![vec![field.beta()]];
    let z = vec![0, 0];
    let phi = vec![0, 1];
    MSetSubstitution::new(frame, q, vec![vec![vec![z.clone()], vec![z]], vec![vec![phi], vec![]]])
        .expect("valid substitution")
}

/// Q = ×2 on Z with digits {0, 1}.
pub fn binary() -> MSetSubstitution {
    let frame = ModuleFrame::standard(1);
    let q = vec![vec![frame.field().from_int(2)]];
    MSetSubstitution::new(frame, q, vec![vec![vec![vec![0], vec![1]]]]).expect("valid substitution")
}

/// Q = ×2 on (1/2)Z with the overlapping digits {0, 1/2, 1}.
pub fn overlapping_binary() -> MSetSubstitution {
    let frame = ModuleFrame::scaled_standard(1, 2);
    let q = vec![vec![frame.field().from_int(2)]];
    MSetSubstitution::new(frame, q, vec![vec![vec![vec![0], vec![1], vec![2]]]]).expect("valid substitution")
}

/// Q = 2I on Z² with digits {0, 1}².
pub fn square() -> MSetSubstitution {
    let frame = ModuleFrame::standard(2);
    let f = frame.field().clone();
    let q = vec![vec![f.from_int(2), f.zero()], vec![f.zero(), f.from_int(2)]];
    let digits = vec![vec![vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]]];
    MSetSubstitution::new(frame, q, digits).expect("valid substitution")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_one_step() {
        let phi = fibonacci();
        let (img, ov) = phi.apply(&phi.single(0, vec![0, 0]), 1, OverlapMode::Strict).unwrap();
        assert!(ov.is_empty());
        assert_eq!(img.color(0), &[vec![0, 0]]);
        assert_eq!(img.color(1), &[vec![0, 1]]);
    }

    #[test]
    fn counts_follow_matrix_powers() {
        let phi = fibonacci();
        let (img, _) = phi.apply(&phi.single(0, vec![0, 0]), 8, OverlapMode::Strict).unwrap();
        // S^8 e_a = (F_9, F_8) = (34, 21)
        assert_eq!(img.counts(), vec![34, 21]);
    }

    #[test]
    fn validation() {
        let phi = fibonacci();
        let seed = phi.single(0, vec![0, 0]);
        let rep = validate(&phi, &seed, &Region::interval(-10.0, 10.0)).unwrap();
        assert!(rep.ok(), "{rep:?}");
        assert_eq!(rep.substitution_matrix, vec![vec![1, 1], vec![1, 0]]);
        let bad = overlapping_binary();
        let seed = bad.apply(&bad.single(0, vec![0]), 1, OverlapMode::Strict).unwrap().0;
        let rep = validate(&bad, &seed, &Region::interval(-10.0, 10.0)).unwrap();
        assert!(!rep.pf_matches() && !rep.disjoint());
    }

    #[test]
    fn generating_clusters() {
        let phi = fibonacci();
        let g = find_generating_cluster(&phi).unwrap();
        assert_eq!(g.cluster.color(0), &[vec![0, 0]]);
        let frame = ModuleFrame::standard(1);
        let q = vec![vec![frame.field().from_int(2)]];
        let one = MSetSubstitution::new(frame, q, vec![vec![vec![vec![1]]]]).unwrap();
        let g = find_generating_cluster(&one).unwrap();
        assert_eq!(g.cluster.color(0), &[vec![-1]]);
    }

    #[test]
    fn legality() {
        let phi = fibonacci();
        let f = phi.frame().clone();
        let pair = MSet::new(f.clone(), vec![vec![vec![0, 0]], vec![vec![0, 1]]]).unwrap();
        assert_eq!(is_legal(&phi, &pair, 12).unwrap().map(|w| w.k), Some(1));
        let bb = MSet::new(f.clone(), vec![vec![], vec![vec![0, 0], vec![1, 0]]]).unwrap();
        assert!(is_legal(&phi, &bb, 12).unwrap().is_none());
        assert!(is_legal(&phi, &MSet::empty(f, 2), 12).unwrap().is_some());
    }

    #[test]
    fn patches() {
        let phi = binary();
        let g = find_generating_cluster(&phi).unwrap();
        let p = generate_patch(&phi, &g, &Region::interval(0.0, 63.0)).unwrap();
        assert_eq!(p.color(0), (0..=63).map(|k| vec![k]).collect::<Vec<_>>().as_slice());
        let fib = fibonacci();
        let g = find_generating_cluster(&fib).unwrap();
        assert!(matches!(generate_patch(&fib, &g, &Region::interval(-100.0, 0.0)), Err(Error::NotCovered(_))));
        let two = find_two_sided_cluster(&fib).unwrap();
        let p = generate_patch(&fib, &two, &Region::interval(-50.0, 50.0)).unwrap();
        assert!(p.len() > 50);
    }

    #[test]
    fn repetitivity_of_integers() {
        let z = crate::delone::lattice_patch(1, 30);
        let r = repetitivity_probe(&z, 1.0).unwrap();
        assert_eq!(r.cluster_types, 1);
        assert!((r.m_estimate.unwrap() - 1.5).abs() < 1e-12);
    }
}
