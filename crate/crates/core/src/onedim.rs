//! β-expansions, Parry orbits, β-integers and inflation-invariant sets on the line.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::algebraic::{real_above_one, AlgebraicInteger};
use crate::delone::{MSet, ModuleFrame, Point};
use crate::error::{Error, Result};
use crate::field::{Elem, NumberField};

/// β with its field and power basis.
pub struct BetaSystem {
    beta: AlgebraicInteger,
    field: Arc<NumberField>,
    frame: Arc<ModuleFrame>,
    powers: Vec<(Point, f64)>,
}

impl BetaSystem {
    pub fn new(beta: AlgebraicInteger) -> Result<Self> {
        if !real_above_one(&beta)? {
            return Err(Error::NotRealAboveOne(beta.to_string()));
        }
        let field = Arc::new(NumberField::new(beta.clone())?);
        let frame = ModuleFrame::power_basis(field.clone());
        Ok(Self { beta, field, frame, powers: Vec::new() })
    }

    pub fn from_poly(coeffs: &[i64]) -> Result<Self> {
        Self::new(AlgebraicInteger::largest_real(crate::poly::IntPolynomial::from_i64(coeffs))?)
    }

    pub fn beta(&self) -> &AlgebraicInteger {
        &self.beta
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn frame(&self) -> &Arc<ModuleFrame> {
        &self.frame
    }

    pub fn is_integer(&self) -> bool {
        self.field.degree() == 1
    }

    pub fn beta_f64(&self) -> f64 {
        self.field.beta_f64()
    }

    /// ⌊β⌋, the largest digit.
    pub fn max_digit(&self) -> Result<i64> {
        self.field.floor(&self.field.beta())?.to_i64().ok_or_else(|| Error::Unsupported("digit exceeds i64".into()))
    }

    fn power(&mut self, j: usize) -> Result<(Point, f64)> {
        while self.powers.len() <= j {
            let k = self.powers.len();
            let e = self.field.beta_pow(k);
            let c = e.integer_coords().ok_or_else(|| Error::Unsupported("power coordinate exceeds i64".into()))?;
            self.powers.push((c, self.field.to_f64(&e)));
        }
        Ok(self.powers[j].clone())
    }

    pub fn value(&self, p: &[i64]) -> Elem {
        self.field.from_coords(p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParryVerdict {
    /// T_β^{preperiod + period}(1) = T_β^{preperiod}(1).
    Finite {
        preperiod: usize,
        period: usize,
    },
    NotDecided,
}

#[derive(Clone, Debug)]
pub struct OrbitReport {
    /// T_β^n(1), n = 0, 1, …; exact.
    pub values: Vec<Elem>,
    /// ⌊β T_β^{n}(1)⌋ for each step.
    pub digits: Vec<i64>,
    pub verdict: ParryVerdict,
    pub min_value: f64,
    /// Steps where βx was within 10⁻⁹ of an integer and the exact test decided.
    pub ties: usize,
}

/// Orbit of 1 under T_β(x) = βx − ⌊βx⌋, with exact floors.
pub fn t_beta_orbit(sys: &BetaSystem, max_iter: usize) -> Result<OrbitReport> {
    let f = &sys.field;
    let beta = f.beta();
    let mut values = vec![f.one()];
    let mut digits = Vec::new();
    let mut seen: HashMap<Vec<num_rational::BigRational>, usize> = HashMap::new();
    seen.insert(f.one().0.clone(), 0);
    let mut ties = 0;
    let mut min_value: f64 = 1.0;
    for n in 0..max_iter {
        let y = f.mul(&beta, &values[n]);
        let approx = f.to_f64(&y);
        if (approx - approx.round()).abs() < 1e-9 {
            ties += 1;
        }
        let d = f.floor(&y)?;
        let d = d.to_i64().ok_or_else(|| Error::Unsupported("digit exceeds i64".into()))?;
        let next = f.sub(&y, &f.from_int(d));
        digits.push(d);
        min_value = min_value.min(f.to_f64(&next));
        if let Some(&k) = seen.get(&next.0) {
            return Ok(OrbitReport {
                values,
                digits,
                verdict: ParryVerdict::Finite { preperiod: k, period: n + 1 - k },
                min_value,
                ties,
            });
        }
        seen.insert(next.0.clone(), n + 1);
        values.push(next);
    }
    Ok(OrbitReport { values, digits, verdict: ParryVerdict::NotDecided, min_value, ties })
}

/// First `len` digits of the quasi-greedy expansion d*_β(1).
pub fn quasi_greedy_digits(sys: &BetaSystem, len: usize) -> Result<Vec<i64>> {
    let orbit = t_beta_orbit(sys, len + 1)?;
    let mut d = orbit.digits.clone();
    // Simple Parry: d(1) = t_1 … t_n 0^ω becomes (t_1 … t_{n−1} (t_n − 1))^ω.
    if let Some(pos) = orbit.values.iter().position(Elem::is_zero) {
        let mut block = d[..pos].to_vec();
        if let Some(last) = block.last_mut() {
            *last -= 1;
        }
        d = block.iter().cycle().take(len).copied().collect();
    } else if let ParryVerdict::Finite { preperiod, period } = orbit.verdict {
        let head = d[..preperiod].to_vec();
        let cycle = d[preperiod..preperiod + period].to_vec();
        d = head.into_iter().chain(cycle.into_iter().cycle()).take(len).collect();
    }
    d.truncate(len);
    Ok(d)
}

/// Admissible strings by the β-shift automaton: digit a in state k (a match of length k
/// with d*) moves to k+1 if a = d*_{k+1}, to 0 if a < d*_{k+1}, and is rejected otherwise.
fn enumerate(sys: &mut BetaSystem, bound: f64) -> Result<Vec<(Point, f64)>> {
    let s = sys.field.degree();
    let beta = sys.beta_f64();
    let top = if bound < 1.0 { 0 } else { (bound.ln() / beta.ln()).floor() as usize + 1 };
    let dstar = quasi_greedy_digits(sys, top + 2)?;
    let amax = sys.max_digit()?;
    for j in 0..=top {
        sys.power(j)?;
    }
    let powers = sys.powers.clone();
    let mut out = Vec::new();
    // (position, state, coords, value)
    let mut stack: Vec<(isize, usize, Point, f64)> = vec![(top as isize, 0, vec![0; s], 0.0)];
    while let Some((pos, state, c, v)) = stack.pop() {
        if pos < 0 {
            out.push((c, v));
            continue;
        }
        let j = pos as usize;
        for a in (0..=amax).rev() {
            let next_state = match a.cmp(&dstar[state]) {
                Ordering::Less => 0,
                Ordering::Equal => state + 1,
                Ordering::Greater => continue,
            };
            let nv = v + a as f64 * powers[j].1;
            if nv > bound + 1e-6 {
                continue;
            }
            let nc: Point = c.iter().zip(&powers[j].0).map(|(x, p)| x + a * p).collect();
            stack.push((pos - 1, next_state, nc, nv));
        }
    }
    let f = sys.field.clone();
    let mut kept = Vec::with_capacity(out.len());
    for (c, v) in out {
        if v > bound - 1e-6 {
            let bound_elem =
                f.from_rational(num_rational::BigRational::from_float(bound).ok_or(Error::Unbounded("bound".into()))?);
            if f.cmp(&f.from_coords(&c), &bound_elem)? == Ordering::Greater {
                continue;
            }
        }
        kept.push((c, v));
    }
    kept.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(kept)
}

/// X_β ∩ [−bound, bound] for a Parry β.
pub fn beta_integers(sys: &mut BetaSystem, bound: f64) -> Result<MSet> {
    let orbit = t_beta_orbit(sys, 256)?;
    if orbit.verdict == ParryVerdict::NotDecided {
        return Err(Error::NotParry(format!(
            "{}: orbit of 1 not finite within 256 steps; use is_beta_integer per point",
            sys.beta
        )));
    }
    let pts = enumerate(sys, bound)?;
    let mut all: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for (c, _) in pts {
        if c.iter().any(|&x| x != 0) {
            all.push(c.iter().map(|x| -x).collect());
        }
        all.push(c);
    }
    MSet::new(sys.frame.clone(), vec![all])
}

/// Whether x ≥ 0 equals the value of its own greedy β-expansion with integer part only.
pub fn is_beta_integer(sys: &mut BetaSystem, x: &Elem) -> Result<bool> {
    let f = sys.field.clone();
    match f.sign(x)? {
        Ordering::Less => return Ok(false),
        Ordering::Equal => return Ok(true),
        Ordering::Greater => {}
    }
    let mut n = 0usize;
    while f.cmp(&f.beta_pow(n + 1), x)? != Ordering::Greater {
        n += 1;
    }
    let mut rest = x.clone();
    for j in (0..=n).rev() {
        let bj = f.beta_pow(j);
        let a = f.floor(&f.div(&rest, &bj)?)?;
        rest = f.sub(&rest, &f.mul(&f.from_rational(num_rational::BigRational::from_integer(a)), &bj));
    }
    Ok(rest.is_zero())
}

#[derive(Clone, Debug)]
pub struct ResidualReport {
    /// [0,1], then [2^{k−1}, 2^k] up to the bound.
    pub windows: Vec<(f64, f64)>,
    pub sups: Vec<f64>,
    /// Dominant eigen-direction e_β of the companion action in power-basis coordinates.
    pub eigenvector: Vec<f64>,
    pub points: usize,
    /// Largest modulus among the other conjugates.
    pub rho: f64,
    /// Σ over subdominant conjugates of ⌊β⌋·‖column‖/(1 − |β_i|), infinite unless Pisot.
    pub predicted: f64,
}

/// sup ‖φ(x) − x e_β‖ over X_β⁺ ∩ [0, bound] per dyadic window.
///
/// Non-Parry β are enumerated through the same automaton, fed by the first digits of d_β(1).
pub fn meyer_residual(sys: &mut BetaSystem, bound: f64) -> Result<ResidualReport> {
    let pts = enumerate(sys, bound)?;
    let s = sys.field.degree();
    let roots: Vec<Complex64> = sys.beta.roots().iter().map(|r| r.center).collect();
    let dom = sys.beta.index();
    // Columns of the inverse Vandermonde matrix give c(x) = Σ σ_i(x) col_i.
    let vander: Vec<Vec<Complex64>> = roots.iter().map(|r| (0..s).map(|k| r.powi(k as i32)).collect()).collect();
    let inv = complex_inverse(&vander).ok_or(Error::Singular)?;
    let col = |i: usize| -> Vec<Complex64> { (0..s).map(|k| inv[k][i]).collect() };
    let eigenvector: Vec<f64> = col(dom).iter().map(|z| z.re).collect();
    let amax = sys.max_digit()? as f64;
    let mut rho: f64 = 0.0;
    let mut predicted = 0.0;
    for (i, r) in roots.iter().enumerate() {
        if i == dom {
            continue;
        }
        rho = rho.max(r.norm());
        let cn = col(i).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        predicted += if r.norm() < 1.0 { amax * cn / (1.0 - r.norm()) } else { f64::INFINITY };
    }
    let mut windows = vec![(0.0, 1.0f64.min(bound))];
    let mut hi = 1.0;
    while hi < bound {
        windows.push((hi, (2.0 * hi).min(bound)));
        hi *= 2.0;
    }
    let mut sups = vec![0.0f64; windows.len()];
    for (c, x) in &pts {
        let r: f64 = (0..s).map(|k| (c[k] as f64 - x * eigenvector[k]).powi(2)).sum::<f64>().sqrt();
        let w = if *x <= 1.0 { 0 } else { (x.log2().ceil() as usize).min(windows.len() - 1) };
        sups[w] = sups[w].max(r);
    }
    Ok(ResidualReport { windows, sups, eigenvector, points: pts.len(), rho, predicted })
}

fn complex_inverse(a: &[Vec<Complex64>]) -> Option<Vec<Vec<Complex64>>> {
    let n = a.len();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut m: Vec<Vec<Complex64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { one } else { zero }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| m[x][c].norm().total_cmp(&m[y][c].norm()))?;
        if m[p][c].norm() < 1e-300 {
            return None;
        }
        m.swap(p, c);
        let piv = m[c][c];
        for v in m[c].iter_mut() {
            *v /= piv;
        }
        for i in 0..n {
            if i != c {
                let f = m[i][c];
                if f != zero {
                    for j in 0..2 * n {
                        let t = f * m[c][j];
                        m[i][j] -= t;
                    }
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Symmetric η-invariant set on [−bound, bound] grown annulus by annulus from {0, 1}.
///
/// Gaps larger than `rho_max` are filled with the first points of Z[η] in height-then-
/// lexicographic order that keep every gap at least `rho_min`.
pub fn example_i_set(eta: &AlgebraicInteger, bound: f64, rho_min: f64, rho_max: f64) -> Result<MSet> {
    if !(rho_min > 0.0 && rho_min < rho_max) {
        return Err(Error::InconsistentGaps(format!("need 0 < rho_min < rho_max, got {rho_min}, {rho_max}")));
    }
    if eta.degree() < 2 || !real_above_one(eta)? {
        return Err(Error::NotRealAboveOne(format!("{eta} must be an irrational real number above 1")));
    }
    let field = Arc::new(NumberField::new(eta.clone())?);
    let frame = ModuleFrame::power_basis(field.clone());
    let f = field.as_ref();
    let s = f.degree();
    let etaf = f.beta_f64();
    let e = f.beta();
    let one: Point = (0..s).map(|k| i64::from(k == 0)).collect();
    let zero: Point = vec![0; s];
    // Points as (value, coords), sorted by value.
    let mut pts: Vec<(f64, Point)> = vec![(0.0, zero), (1.0, one.clone())];
    let seed_gaps = [1.0, etaf - 1.0];
    if seed_gaps.iter().any(|&g| g < rho_min - 1e-12 || g > rho_max + 1e-12) {
        return Err(Error::InconsistentGaps(format!("seed gaps {seed_gaps:?} are outside [{rho_min}, {rho_max}]")));
    }
    let mul_eta = |c: &Point| -> Result<Point> {
        f.mul(&e, &f.from_coords(c)).integer_coords().ok_or_else(|| Error::Unsupported("coordinate exceeds i64".into()))
    };
    let mut lo_k = 1.0; // η^{k−1}
    let mut hi_k = etaf; // η^k
    while hi_k <= bound {
        let upper = hi_k * etaf;
        let mut annulus: Vec<(f64, Point)> = Vec::new();
        for (v, c) in &pts {
            if *v >= lo_k - 1e-12 && *v < hi_k - 1e-12 {
                let nc = mul_eta(c)?;
                annulus.push((f.to_f64(&f.from_coords(&nc)), nc));
            }
        }
        annulus.sort_by(|a, b| a.0.total_cmp(&b.0));
        // The annulus starts at η^k; η^{k+1} closes it and arrives in the next round.
        let top_c = mul_eta(&annulus[0].1)?;
        let mut line: Vec<(f64, Point)> = annulus.clone();
        line.push((upper, top_c));
        if line.windows(2).any(|w| w[1].0 - w[0].0 < rho_min - 1e-12) {
            return Err(Error::InconsistentGaps(format!(
                "inflated points in [{hi_k}, {upper}) are closer than {rho_min}"
            )));
        }
        let mut i = 0;
        while i + 1 < line.len() {
            let (a, b) = (line[i].0, line[i + 1].0);
            if b - a <= rho_max + 1e-12 {
                i += 1;
                continue;
            }
            let (lo, hi) = (a + rho_min, (b - rho_min).min(a + rho_max));
            if lo > hi {
                return Err(Error::InconsistentGaps(format!(
                    "gap ({a}, {b}) exceeds {rho_max} but cannot be split keeping {rho_min}"
                )));
            }
            let y = first_in_interval(f, lo, hi)?;
            line.insert(i + 1, y);
            i += 1;
        }
        line.pop();
        pts.extend(line);
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        lo_k = hi_k;
        hi_k = upper;
    }
    let mut all: Vec<Point> = Vec::new();
    for (v, c) in pts {
        if v <= bound + 1e-12 || v <= 1.0 {
            if c.iter().any(|&x| x != 0) {
                all.push(c.iter().map(|x| -x).collect());
            }
            all.push(c);
        }
    }
    MSet::new(frame, vec![all])
}

/// First element of Z[η] with value in [lo, hi], by coordinate height then lexicographically.
fn first_in_interval(f: &NumberField, lo: f64, hi: f64) -> Result<(f64, Point)> {
    let s = f.degree();
    let basis: Vec<f64> = (0..s).map(|k| f.to_f64(&f.beta_pow(k))).collect();
    for h in 0..=20_000i64 {
        let width = (2 * h + 1) as u64;
        for idx in 0..width.pow(s as u32) {
            let mut rest = idx;
            let mut c = vec![0i64; s];
            for k in (0..s).rev() {
                c[k] = (rest % width) as i64 - h;
                rest /= width;
            }
            if c.iter().all(|x| x.abs() < h) {
                continue;
            }
            let v: f64 = c.iter().zip(&basis).map(|(a, b)| *a as f64 * b).sum();
            if v >= lo && v <= hi {
                return Ok((f.to_f64(&f.from_coords(&c)), c));
            }
        }
    }
    Err(Error::InconsistentGaps(format!("no point of the ring found in [{lo}, {hi}]")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parry_orbits() {
        let sys = BetaSystem::from_poly(&[-1, -1, 1]).unwrap();
        let o = t_beta_orbit(&sys, 10).unwrap();
        assert_eq!(o.values.len(), 3);
        assert_eq!(o.values[1], sys.value(&[-1, 1]));
        assert!(o.values[2].is_zero());
        assert_eq!(o.verdict, ParryVerdict::Finite { preperiod: 2, period: 1 });
        assert!(o.ties >= 1);
        let silver = BetaSystem::from_poly(&[-1, -2, 1]).unwrap();
        let o = t_beta_orbit(&silver, 10).unwrap();
        assert_eq!(o.values[1], silver.value(&[-2, 1]));
        assert!(o.values[2].is_zero());
        let two = BetaSystem::from_poly(&[-2, 1]).unwrap();
        assert!(two.is_integer());
        assert!(t_beta_orbit(&two, 5).unwrap().values[1].is_zero());
    }

    #[test]
    fn golden_beta_integers() {
        let mut sys = BetaSystem::from_poly(&[-1, -1, 1]).unwrap();
        assert_eq!(quasi_greedy_digits(&sys, 6).unwrap(), vec![1, 0, 1, 0, 1, 0]);
        let x = beta_integers(&mut sys, 50.0).unwrap();
        let mut v: Vec<f64> = x.color_positions(0).iter().map(|p| p[0]).collect();
        v.sort_by(f64::total_cmp);
        let phi = sys.beta_f64();
        for w in v.windows(2) {
            let g = w[1] - w[0];
            assert!((g - 1.0).abs() < 1e-9 || (g - (phi - 1.0)).abs() < 1e-9, "gap {g}");
        }
        let f = sys.field().clone();
        for p in x.color(0) {
            let xp = f.from_coords(p);
            if f.sign(&xp).unwrap() != Ordering::Less {
                assert!(is_beta_integer(&mut sys, &xp).unwrap());
            }
        }
        assert!(!is_beta_integer(&mut sys, &f.from_int(2)).unwrap());
    }

    #[test]
    fn integer_base() {
        let mut sys = BetaSystem::from_poly(&[-2, 1]).unwrap();
        let x = beta_integers(&mut sys, 20.0).unwrap();
        assert_eq!(x.len(), 41);
        let r = meyer_residual(&mut sys, 100.0).unwrap();
        assert!(r.sups.iter().all(|&s| s < 1e-12));
    }

    #[test]
    fn perron_is_not_parry() {
        let mut sys = BetaSystem::from_poly(&[-3, -1, 1]).unwrap();
        assert!(matches!(beta_integers(&mut sys, 10.0), Err(Error::NotParry(_))));
        let r = meyer_residual(&mut sys, 1000.0).unwrap();
        assert!(r.predicted.is_infinite());
    }

    #[test]
    fn example_i() {
        let eta = AlgebraicInteger::largest_real(crate::poly::IntPolynomial::from_i64(&[-1, -1, 1])).unwrap();
        let x = example_i_set(&eta, 18.0, 0.5, 1.7).unwrap();
        let f = x.frame().field().clone();
        let e = f.beta();
        let mut v: Vec<f64> = x.color_positions(0).iter().map(|p| p[0]).collect();
        v.sort_by(f64::total_cmp);
        assert!(v.windows(2).all(|w| w[1] - w[0] >= 0.5 - 1e-12 && w[1] - w[0] <= 1.7 + 1e-12));
        for p in x.color(0) {
            let q = f.mul(&e, &f.from_coords(p)).integer_coords().unwrap();
            if f.to_f64(&f.from_coords(&q)).abs() <= 18.0 {
                assert!(x.contains(0, &q));
            }
            let neg: Point = p.iter().map(|c| -c).collect();
            assert!(x.contains(0, &neg));
        }
        let small = example_i_set(&eta, 1.2, 0.5, 1.7).unwrap();
        assert_eq!(small.len(), 3);
        assert!(matches!(example_i_set(&eta, 18.0, 0.9, 1.0), Err(Error::InconsistentGaps(_))));
    }
}
