//! Cut-and-project schemes and model sets.

use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::algebraic::{classify, AlgebraicInteger, NumberClass};
use crate::delone::{MSet, ModuleFrame, TAU};
use crate::error::{Error, Result};
use crate::field::NumberField;
use crate::geometry::{PointIndex, Region};
use crate::matrix::{
    companion, field_inverse, field_kernel, field_to_f64, int_apply, solve_f64, FieldMatrix, IntMatrix,
};
use crate::poly::IntPolynomial;

/// Bounded open window in internal coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum Window {
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// max over coordinate groups of the Euclidean norm of (y − center) restricted to the group.
    Product {
        center: Vec<f64>,
        groups: Vec<Vec<usize>>,
        radius: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside,
    /// Within τ of the boundary; excluded.
    BoundaryHit,
}

impl Window {
    pub fn dim(&self) -> usize {
        match self {
            Window::Box { lo, .. } => lo.len(),
            Window::Ball { center, .. } | Window::Product { center, .. } => center.len(),
        }
    }

    /// Signed distance-like margin: positive inside, zero on the boundary.
    pub fn margin(&self, y: &[f64]) -> f64 {
        match self {
            Window::Box { lo, hi } => {
                lo.iter().zip(hi).zip(y).map(|((a, b), v)| (v - a).min(b - v)).fold(f64::INFINITY, f64::min)
            }
            Window::Ball { center, radius } => {
                radius - center.iter().zip(y).map(|(c, v)| (v - c).powi(2)).sum::<f64>().sqrt()
            }
            Window::Product { center, groups, radius } => {
                radius
                    - groups
                        .iter()
                        .map(|g| g.iter().map(|&k| (y[k] - center[k]).powi(2)).sum::<f64>().sqrt())
                        .fold(0.0, f64::max)
            }
        }
    }

    pub fn classify(&self, y: &[f64], tau: f64) -> Membership {
        if self.dim() == 0 {
            return Membership::Inside;
        }
        let m = self.margin(y);
        if m > tau {
            Membership::Inside
        } else if m < -tau {
            Membership::Outside
        } else {
            Membership::BoundaryHit
        }
    }

    /// Ω − Ω.
    pub fn difference(&self) -> Window {
        match self {
            Window::Box { lo, hi } => Window::Box {
                lo: lo.iter().zip(hi).map(|(a, b)| a - b).collect(),
                hi: lo.iter().zip(hi).map(|(a, b)| b - a).collect(),
            },
            Window::Ball { center, radius } => Window::Ball { center: vec![0.0; center.len()], radius: 2.0 * radius },
            Window::Product { center, groups, radius } => {
                Window::Product { center: vec![0.0; center.len()], groups: groups.clone(), radius: 2.0 * radius }
            }
        }
    }

    /// Scale about the center.
    pub fn scaled(&self, f: f64) -> Window {
        match self {
            Window::Box { lo, hi } => {
                let r = Region { lo: lo.clone(), hi: hi.clone() }.scaled(f);
                Window::Box { lo: r.lo, hi: r.hi }
            }
            Window::Ball { center, radius } => Window::Ball { center: center.clone(), radius: radius * f },
            Window::Product { center, groups, radius } => {
                Window::Product { center: center.clone(), groups: groups.clone(), radius: radius * f }
            }
        }
    }

    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Window::Box { lo, hi } => (lo.clone(), hi.clone()),
            Window::Ball { center, radius } | Window::Product { center, radius, .. } => {
                (center.iter().map(|c| c - radius).collect(), center.iter().map(|c| c + radius).collect())
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounds();
        lo.iter().zip(&hi).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt()
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bounds();
        if lo.iter().chain(&hi).any(|v| !v.is_finite()) {
            return Err(Error::Unbounded("window".into()));
        }
        if self.dim() > 0 && lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(Error::Precondition("window has empty interior".into()));
        }
        Ok(())
    }
}

/// Lattice B Zⁿ with physical map P (d × n, exact) and internal map P_int ((n − d) × n).
#[derive(Clone, Debug)]
pub struct CutProjectScheme {
    field: Arc<NumberField>,
    lattice: FieldMatrix,
    physical: FieldMatrix,
    internal: Vec<Vec<f64>>,
    window: Window,
    // P B and P_int B.
    a_exact: FieldMatrix,
    a_phys: Vec<Vec<f64>>,
    a_int: Vec<Vec<f64>>,
}

impl CutProjectScheme {
    pub fn new(
        field: Arc<NumberField>,
        lattice: FieldMatrix,
        physical: FieldMatrix,
        internal: Vec<Vec<f64>>,
        window: Window,
    ) -> Result<Self> {
        let n = lattice.len();
        if n == 0 || lattice.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("lattice basis must be n x n".into()));
        }
        let d = physical.len();
        if d == 0 || d > n || physical.iter().any(|r| r.len() != n) || internal.len() != n - d {
            return Err(Error::Dimension(format!("projections must be d x n and (n-d) x n with n = {n}")));
        }
        if internal.iter().any(|r| r.len() != n) || window.dim() != n - d {
            return Err(Error::Dimension(format!("internal space has dimension {}", n - d)));
        }
        window.validate()?;
        let a_exact: FieldMatrix = physical
            .iter()
            .map(|row| {
                (0..n)
                    .map(|j| (0..n).fold(field.zero(), |acc, k| field.add(&acc, &field.mul(&row[k], &lattice[k][j]))))
                    .collect()
            })
            .collect();
        let b = field_to_f64(&field, &lattice);
        let a_phys = field_to_f64(&field, &a_exact);
        let a_int: Vec<Vec<f64>> =
            internal.iter().map(|row| (0..n).map(|j| (0..n).map(|k| row[k] * b[k][j]).sum()).collect()).collect();
        let full: Vec<Vec<f64>> = a_phys.iter().chain(&a_int).cloned().collect();
        if crate::matrix::det_rational(&rationalize(&full)) == BigRational::from_integer(BigInt::from(0))
            || solve_f64(&full, &vec![1.0; n]).is_none()
        {
            return Err(Error::Singular);
        }
        Ok(Self { field, lattice, physical, internal, window, a_exact, a_phys, a_int })
    }

    /// Splitting Rⁿ = E ⊕ H given by basis columns; projections read off [E | H]⁻¹.
    pub fn from_subspaces(
        field: Arc<NumberField>,
        lattice: FieldMatrix,
        e: FieldMatrix,
        h: FieldMatrix,
        window: Window,
    ) -> Result<Self> {
        let n = lattice.len();
        if e.len() != n || h.len() != n {
            return Err(Error::Dimension("subspace bases need n rows".into()));
        }
        let d = e.first().map_or(0, Vec::len);
        let s: FieldMatrix = (0..n).map(|i| e[i].iter().chain(&h[i]).cloned().collect()).collect();
        let t = field_inverse(&field, &s)?;
        let physical = t[..d].to_vec();
        let internal = field_to_f64(&field, &t[d..].to_vec());
        Self::new(field, lattice, physical, internal, window)
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.lattice.len()
    }

    pub fn d(&self) -> usize {
        self.physical.len()
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn lattice(&self) -> &FieldMatrix {
        &self.lattice
    }

    pub fn physical_map(&self) -> &FieldMatrix {
        &self.physical
    }

    pub fn internal_map(&self) -> &[Vec<f64>] {
        &self.internal
    }

    pub fn with_window(&self, window: Window) -> Result<Self> {
        Self::new(self.field.clone(), self.lattice.clone(), self.physical.clone(), self.internal.clone(), window)
    }

    pub fn physical_position(&self, k: &[i64]) -> Vec<f64> {
        self.a_phys.iter().map(|r| r.iter().zip(k).map(|(a, &b)| a * b as f64).sum()).collect()
    }

    pub fn internal_position(&self, k: &[i64]) -> Vec<f64> {
        self.a_int.iter().map(|r| r.iter().zip(k).map(|(a, &b)| a * b as f64).sum()).collect()
    }

    /// The physical images of the lattice basis as a module frame.
    pub fn frame(&self) -> Result<Arc<ModuleFrame>> {
        Ok(Arc::new(ModuleFrame::new(self.field.clone(), self.a_exact.clone())?))
    }
}

fn rationalize(m: &[Vec<f64>]) -> Vec<Vec<BigRational>> {
    m.iter()
        .map(|r| {
            r.iter()
                .map(|&x| BigRational::from_float(x).unwrap_or_else(|| BigRational::from_integer(0.into())))
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelPoint {
    pub lift: Vec<i64>,
    pub physical: Vec<f64>,
    pub internal: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ModelSet {
    /// Sorted by physical coordinate, then lift.
    pub points: Vec<ModelPoint>,
    pub boundary_hits: usize,
    /// π is injective on the enumerated lattice points.
    pub nondegenerate: bool,
    /// Internal images come within window-diameter/10 of every sample of the window.
    pub dense_evidence: bool,
    pub enumerated: usize,
}

impl ModelSet {
    pub fn lifts(&self) -> HashSet<Vec<i64>> {
        self.points.iter().map(|p| p.lift.clone()).collect()
    }

    pub fn to_mset(&self, scheme: &CutProjectScheme) -> Result<MSet> {
        MSet::new(scheme.frame()?, vec![self.points.iter().map(|p| p.lift.clone()).collect()])
    }
}

/// All lattice points whose projections fall in `region` and in the open window.
pub fn generate_model_set(scheme: &CutProjectScheme, region: &Region) -> Result<ModelSet> {
    let n = scheme.n();
    let d = scheme.d();
    if region.dim() != d {
        return Err(Error::Dimension(format!("region must be {d}-dimensional")));
    }
    if region.lo.iter().chain(&region.hi).any(|v| !v.is_finite()) {
        return Err(Error::Unbounded("region".into()));
    }
    let (wlo, whi) = scheme.window.bounds();
    let lo: Vec<f64> = region.lo.iter().chain(&wlo).copied().collect();
    let hi: Vec<f64> = region.hi.iter().chain(&whi).copied().collect();
    let c: Vec<Vec<f64>> = scheme.a_phys.iter().chain(&scheme.a_int).cloned().collect();
    // Integer box from the inverse of the combined map.
    let mut cinv = vec![vec![0.0; n]; n];
    for k in 0..n {
        let e: Vec<f64> = (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect();
        let col = solve_f64(&c, &e).ok_or(Error::Singular)?;
        for i in 0..n {
            cinv[i][k] = col[i];
        }
    }
    let ranges: Vec<(i64, i64)> = cinv
        .iter()
        .map(|row| {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, &m) in row.iter().enumerate() {
                let (u, v) = (m * lo[j], m * hi[j]);
                a += u.min(v);
                b += u.max(v);
            }
            let slack = 1e-7 * (1.0 + a.abs().max(b.abs()));
            ((a - slack).floor() as i64, (b + slack).ceil() as i64)
        })
        .collect();
    let count: f64 = ranges[..n - 1].iter().map(|(a, b)| (b - a + 1) as f64).product();
    if count > 5e8 {
        return Err(Error::Precondition(format!("enumeration box has {count:.0} cells")));
    }
    let mut points = Vec::new();
    let mut boundary_hits = 0;
    let mut enumerated = 0usize;
    let mut k = vec![0i64; n];
    let mut idx: Vec<i64> = ranges[..n - 1].iter().map(|r| r.0).collect();
    loop {
        k[..n - 1].copy_from_slice(&idx);
        // Feasible interval for the last coordinate.
        let (mut t0, mut t1) = (ranges[n - 1].0 as f64, ranges[n - 1].1 as f64);
        let mut feasible = true;
        for (r, row) in c.iter().enumerate() {
            let s: f64 = row[..n - 1].iter().zip(&k[..n - 1]).map(|(a, &b)| a * b as f64).sum();
            let cr = row[n - 1];
            let slack = 1e-7 * (1.0 + s.abs() + lo[r].abs() + hi[r].abs());
            if cr.abs() < 1e-14 {
                if s < lo[r] - slack || s > hi[r] + slack {
                    feasible = false;
                    break;
                }
                continue;
            }
            let (u, v) = ((lo[r] - s - slack) / cr, (hi[r] - s + slack) / cr);
            t0 = t0.max(u.min(v));
            t1 = t1.min(u.max(v));
        }
        if feasible && t0 <= t1 {
            for last in t0.ceil() as i64..=t1.floor() as i64 {
                k[n - 1] = last;
                enumerated += 1;
                let x = scheme.physical_position(&k);
                if !region.contains(&x) {
                    continue;
                }
                let y = scheme.internal_position(&k);
                match scheme.window.classify(&y, TAU) {
                    Membership::Inside => points.push(ModelPoint { lift: k.clone(), physical: x, internal: y }),
                    Membership::BoundaryHit => boundary_hits += 1,
                    Membership::Outside => {}
                }
            }
        }
        let mut ax = 0;
        loop {
            if ax == n - 1 {
                return finish(scheme, points, boundary_hits, enumerated);
            }
            idx[ax] += 1;
            if idx[ax] <= ranges[ax].1 {
                break;
            }
            idx[ax] = ranges[ax].0;
            ax += 1;
        }
    }
}

fn finish(
    scheme: &CutProjectScheme,
    mut points: Vec<ModelPoint>,
    boundary_hits: usize,
    enumerated: usize,
) -> Result<ModelSet> {
    points.sort_by(|a, b| {
        a.physical
            .iter()
            .zip(&b.physical)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.lift.cmp(&b.lift))
    });
    let f = &scheme.field;
    let mut nondegenerate = true;
    let pos: Vec<Vec<f64>> = points.iter().map(|p| p.physical.clone()).collect();
    if !pos.is_empty() {
        let index = PointIndex::auto(&pos);
        'outer: for (i, p) in points.iter().enumerate() {
            for j in index.within(&p.physical, 1e-9) {
                if j != i {
                    let diff: Vec<i64> = p.lift.iter().zip(&points[j].lift).map(|(a, b)| a - b).collect();
                    let same = scheme.a_exact.iter().all(|row| {
                        row.iter()
                            .zip(&diff)
                            .fold(f.zero(), |acc, (a, &b)| {
                                f.add(&acc, &f.scale(a, &BigRational::from_integer(b.into())))
                            })
                            .is_zero()
                    });
                    if same {
                        nondegenerate = false;
                        break 'outer;
                    }
                }
            }
        }
    }
    let dense_evidence = density_evidence(&scheme.window, &points);
    Ok(ModelSet { points, boundary_hits, nondegenerate, dense_evidence, enumerated })
}

fn density_evidence(window: &Window, points: &[ModelPoint]) -> bool {
    let m = window.dim();
    if m == 0 {
        return true;
    }
    if points.is_empty() {
        return false;
    }
    let eps = window.diameter() / 10.0;
    let internal: Vec<Vec<f64>> = points.iter().map(|p| p.internal.clone()).collect();
    let index = PointIndex::auto(&internal);
    let (lo, hi) = window.bounds();
    let counts: Vec<usize> = lo.iter().zip(&hi).map(|(a, b)| ((b - a) / eps).ceil() as usize).collect();
    let mut idx = vec![0usize; m];
    loop {
        let q: Vec<f64> = idx.iter().zip(&lo).map(|(&i, l)| l + (i as f64 + 0.5) * eps).collect();
        if window.margin(&q) > 0.0 && index.nearest(&q).is_none_or(|(_, dd)| dd > eps) {
            return false;
        }
        let mut ax = 0;
        loop {
            if ax == m {
                return true;
            }
            idx[ax] += 1;
            if idx[ax] < counts[ax] {
                break;
            }
            idx[ax] = 0;
            ax += 1;
        }
    }
}

/// Z² with π(a, b) = a + bφ, π_int(a, b) = a + bφ′ and window (−1, 1/φ).
pub fn fibonacci_scheme() -> CutProjectScheme {
    let field = Arc::new(NumberField::from_poly(IntPolynomial::from_i64(&[-1, -1, 1])).expect("golden field"));
    let phi = field.beta();
    let lattice = vec![vec![field.one(), field.zero()], vec![field.zero(), field.one()]];
    let physical = vec![vec![field.one(), phi.clone()]];
    let conj = 1.0 - field.beta_f64();
    let window = Window::Box { lo: vec![-1.0], hi: vec![field.beta_f64() - 1.0] };
    CutProjectScheme::new(field, lattice, physical, vec![vec![1.0, conj]], window).expect("valid scheme")
}

/// Model set over Zˢ for a Salem number: physical coordinate Σ y_j β^j, internal coordinates
/// the other conjugate embeddings in real form, window max_k |σ_k(y)| < radius.
pub fn salem_scheme(p: &IntPolynomial, radius: f64) -> Result<CutProjectScheme> {
    let beta = AlgebraicInteger::largest_real(p.clone())?;
    let class = classify(&beta)?.class;
    if class != NumberClass::Salem {
        return Err(Error::Precondition(format!("{beta} is {class}, not Salem")));
    }
    let s = beta.degree();
    let field = Arc::new(NumberField::new(beta.clone())?);
    let lattice: FieldMatrix =
        (0..s).map(|i| (0..s).map(|j| if i == j { field.one() } else { field.zero() }).collect()).collect();
    let physical = vec![(0..s).map(|k| field.beta_pow(k)).collect()];
    let mut internal = Vec::new();
    let mut groups = Vec::new();
    for (i, r) in beta.roots().iter().enumerate() {
        if i == beta.index() {
            continue;
        }
        let z = r.center;
        if r.is_real() {
            groups.push(vec![internal.len()]);
            internal.push((0..s).map(|j| z.re.powi(j as i32)).collect());
        } else if z.im > 0.0 {
            groups.push(vec![internal.len(), internal.len() + 1]);
            internal.push((0..s).map(|j| z.powi(j as i32).re).collect());
            internal.push((0..s).map(|j| z.powi(j as i32).im).collect());
        }
    }
    let window = Window::Product { center: vec![0.0; s - 1], groups, radius };
    CutProjectScheme::new(field, lattice, physical, internal, window)
}

/// Companion matrix of the scheme's generator: coordinates of β·x from those of x.
pub fn multiplication_matrix(scheme: &CutProjectScheme) -> Result<IntMatrix> {
    companion(scheme.field.generator().poly())
}

/// Check that y ↦ My maps generated points into the generated set wherever βx stays in `region`.
pub fn check_salem_invariance(scheme: &CutProjectScheme, set: &ModelSet, region: &Region) -> Result<usize> {
    let m = multiplication_matrix(scheme)?;
    let lifts = set.lifts();
    let mut checked = 0;
    for p in &set.points {
        let my = int_apply(&m, &p.lift)?;
        let x = scheme.physical_position(&my);
        if region.shrunk(TAU).contains(&x) {
            if !lifts.contains(&my) {
                return Err(Error::NotInvariant(format!("β times lift {:?} is missing", p.lift)));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

#[derive(Clone, Debug)]
pub struct DifferenceReport {
    pub points: usize,
    pub pairs: usize,
    pub violations: Vec<(Vec<i64>, Vec<i64>)>,
}

/// X(Λ,Ω) − X(Λ,Ω) ⊆ X(Λ,Ω−Ω) on lifts.
pub fn difference_law(scheme: &CutProjectScheme, region: &Region) -> Result<DifferenceReport> {
    let x = generate_model_set(scheme, region)?;
    let w = region.widths();
    let diff_region = Region { lo: w.iter().map(|v| -v).collect(), hi: w };
    let dscheme = scheme.with_window(scheme.window.difference())?;
    let dlifts = generate_model_set(&dscheme, &diff_region)?.lifts();
    let mut violations = Vec::new();
    let mut pairs = 0;
    for a in &x.points {
        for b in &x.points {
            pairs += 1;
            let dl: Vec<i64> = a.lift.iter().zip(&b.lift).map(|(u, v)| u - v).collect();
            if !dlifts.contains(&dl) {
                violations.push((a.lift.clone(), b.lift.clone()));
            }
        }
    }
    Ok(DifferenceReport { points: x.points.len(), pairs, violations })
}

/// Lift a Meyer-consistent set: lattice Zˢ, physical map the frame V, internal space ker V with
/// physical complement L(R^d), window the 1%-inflated box of internal lifts.
pub fn scheme_from_address(x: &MSet, linear: &[Vec<f64>], bounded: bool) -> Result<CutProjectScheme> {
    if !bounded {
        return Err(Error::NotMeyer("address residual is not bounded".into()));
    }
    let frame = x.frame();
    let field = frame.field().clone();
    let s = frame.rank();
    let d = frame.dim();
    if linear.len() != s || linear.iter().any(|r| r.len() != d) {
        return Err(Error::Dimension(format!("linear part must be {s} x {d}")));
    }
    let lattice: FieldMatrix =
        (0..s).map(|i| (0..s).map(|j| if i == j { field.one() } else { field.zero() }).collect()).collect();
    let physical = frame.matrix().clone();
    let internal: Vec<Vec<f64>> = if s == d {
        Vec::new()
    } else {
        let h = field_kernel(&field, &physical)?;
        let scale = BigRational::from_integer(BigInt::from(1_000_000_000_000i64));
        let e: FieldMatrix = linear
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| {
                        field.from_rational(BigRational::from_integer(BigInt::from((v * 1e12).round() as i64)) / &scale)
                    })
                    .collect()
            })
            .collect();
        let split: FieldMatrix = (0..s).map(|i| e[i].iter().chain(&h[i]).cloned().collect()).collect();
        let t = field_inverse(&field, &split)?;
        field_to_f64(&field, &t[d..].to_vec())
    };
    let lifts = x.support();
    let ys: Vec<Vec<f64>> = lifts
        .iter()
        .map(|k| internal.iter().map(|r| r.iter().zip(k).map(|(a, &b)| a * b as f64).sum()).collect())
        .collect();
    let m = s - d;
    let window = if m == 0 {
        Window::Box { lo: Vec::new(), hi: Vec::new() }
    } else {
        let b = Region::bounding(&ys).ok_or_else(|| Error::TooFewPoints("empty set".into()))?;
        let pad: Vec<f64> = b.widths().iter().map(|w| 0.01 * w.max(1e-6)).collect();
        Window::Box {
            lo: b.lo.iter().zip(&pad).map(|(a, p)| a - p).collect(),
            hi: b.hi.iter().zip(&pad).map(|(a, p)| a + p).collect(),
        }
    };
    let scheme = CutProjectScheme::new(field, lattice, physical, internal, window)?;
    let bbox = x.bounding_box().ok_or_else(|| Error::TooFewPoints("empty set".into()))?;
    let got = generate_model_set(&scheme, &bbox.shrunk(-TAU))?.lifts();
    if let Some(p) = lifts.iter().find(|p| !got.contains(*p)) {
        return Err(Error::NotMeyer(format!("lift {p:?} is not in the model set")));
    }
    Ok(scheme)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PHI: f64 = 1.618_033_988_749_895;

    #[test]
    fn fibonacci_gaps() {
        let s = fibonacci_scheme();
        let x = generate_model_set(&s, &Region::interval(0.0, 50.0)).unwrap();
        assert!(x.nondegenerate && x.dense_evidence);
        let mut gaps: Vec<f64> = x.points.windows(2).map(|w| w[1].physical[0] - w[0].physical[0]).collect();
        gaps.sort_by(f64::total_cmp);
        gaps.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        assert_eq!(gaps.len(), 2);
        assert!((gaps[1] / gaps[0] - PHI).abs() < 1e-9);
    }

    #[test]
    fn window_monotone_and_difference_law() {
        let s = fibonacci_scheme();
        let region = Region::interval(-20.0, 20.0);
        let big = generate_model_set(&s, &region).unwrap().lifts();
        let small = generate_model_set(&s.with_window(s.window().scaled(0.5)).unwrap(), &region).unwrap().lifts();
        assert!(small.is_subset(&big));
        let rep = difference_law(&s, &Region::interval(0.0, 15.0)).unwrap();
        assert!(rep.violations.is_empty() && rep.pairs > 50);
    }

    #[test]
    fn salem() {
        let p = IntPolynomial::from_i64(&[1, -1, -1, -1, 1]);
        let s = salem_scheme(&p, 1.0).unwrap();
        let region = Region::interval(0.0, 20.0);
        let x = generate_model_set(&s, &region).unwrap();
        assert!(!x.points.is_empty());
        assert!(check_salem_invariance(&s, &x, &region).unwrap() > 0);
        let half = generate_model_set(&salem_scheme(&p, 0.5).unwrap(), &region).unwrap();
        assert!(half.lifts().is_subset(&x.lifts()));
        assert!(salem_scheme(&IntPolynomial::from_i64(&[-1, -1, 1]), 1.0).is_err());
    }

    #[test]
    fn lift_of_integers_and_beta_integers() {
        let z = crate::delone::lattice_patch(1, 20);
        let s = scheme_from_address(&z, &[vec![1.0]], true).unwrap();
        assert_eq!(s.n(), 1);
        let mut sys = crate::onedim::BetaSystem::from_poly(&[-1, -1, 1]).unwrap();
        let x = crate::onedim::beta_integers(&mut sys, 100.0).unwrap();
        let rep = crate::delone::address_audit(&x, &Region::interval(-100.0, 100.0)).unwrap();
        let s = scheme_from_address(&x, &rep.linear, rep.bounded).unwrap();
        assert_eq!(s.n(), 2);
    }
}
