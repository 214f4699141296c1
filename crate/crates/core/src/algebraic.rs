//! Algebraic integers given by a minimal polynomial and a root selector, and the
//! Pisot / Salem / Perron / Lind classification.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::IntPolynomial;
use crate::roots::{isolate_roots, RootEnclosure};

/// Working precision for root enclosures.
pub const ROOT_PRECISION: f64 = 1e-12;

const MAX_FACTOR_DEGREE: usize = 16;

/// Find a nontrivial monic factor of a square-free monic polynomial, using root subsets.
///
/// Candidate factors are products of root subsets whose coefficients round to integers; each
/// candidate is confirmed by exact division, so a returned factor is always genuine.
pub fn find_factor(p: &IntPolynomial) -> Result<Option<IntPolynomial>> {
    let n = p.degree().unwrap_or(0);
    if n <= 1 {
        return Ok(None);
    }
    let sqf = p.square_free_decomposition();
    if sqf.len() != 1 || sqf[0].1 != 1 {
        let f = sqf[0].0.clone();
        let f = if f.leading().is_negative() { f.neg() } else { f };
        return Ok(Some(f));
    }
    if n > MAX_FACTOR_DEGREE {
        return Err(Error::Unsupported(format!("factorization above degree {MAX_FACTOR_DEGREE}")));
    }
    if p.eval_int(&BigInt::zero()).is_zero() {
        return Ok(Some(IntPolynomial::x()));
    }
    let roots = isolate_roots(p, 1e-10)?;
    let z: Vec<Complex64> = roots.iter().map(|e| e.center).collect();
    for mask in 1u32..(1u32 << (n - 1)) {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for (i, zi) in z.iter().enumerate() {
            if mask & (1 << i) != 0 {
                let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
                for (j, cj) in c.iter().enumerate() {
                    next[j + 1] += cj;
                    next[j] -= cj * zi;
                }
                c = next;
            }
        }
        let mut ints = Vec::with_capacity(c.len());
        let mut ok = true;
        for cj in &c {
            let r = cj.re.round();
            if (cj.re - r).abs() > 1e-4 * cj.re.abs().max(1.0) || cj.im.abs() > 1e-4 * cj.norm().max(1.0) {
                ok = false;
                break;
            }
            ints.push(BigInt::from(r as i128));
        }
        if !ok {
            continue;
        }
        let g = IntPolynomial::new(ints);
        if p.exact_div(&g).is_some() {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

pub fn is_irreducible(p: &IntPolynomial) -> Result<bool> {
    Ok(find_factor(p)?.is_none())
}

/// A root of a monic irreducible integer polynomial.
#[derive(Clone, Debug)]
pub struct AlgebraicInteger {
    poly: IntPolynomial,
    index: usize,
    roots: Vec<RootEnclosure>,
    products: OnceLock<std::result::Result<Vec<RootEnclosure>, String>>,
}

impl PartialEq for AlgebraicInteger {
    fn eq(&self, other: &Self) -> bool {
        self.poly == other.poly && self.index == other.index
    }
}

impl Eq for AlgebraicInteger {}

impl AlgebraicInteger {
    /// Root number `index` (canonical order) of the minimal polynomial `poly`.
    pub fn new(poly: IntPolynomial, index: usize) -> Result<Self> {
        if !poly.is_monic() || poly.degree().unwrap_or(0) < 1 {
            return Err(Error::InvalidPolynomial(format!("{poly} must be monic of degree >= 1")));
        }
        if !is_irreducible(&poly)? {
            return Err(Error::Reducible(poly.to_string()));
        }
        let roots = isolate_roots(&poly, ROOT_PRECISION)?;
        if index >= roots.len() {
            return Err(Error::RootIndex { index, degree: roots.len() });
        }
        Ok(Self { poly, index, roots, products: OnceLock::new() })
    }

    /// The largest real root of `poly`.
    pub fn largest_real(poly: IntPolynomial) -> Result<Self> {
        let tmp = Self::new(poly, 0)?;
        let idx = tmp
            .roots
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_real())
            .max_by(|a, b| a.1.center.re.partial_cmp(&b.1.center.re).unwrap_or(Ordering::Equal))
            .map(|(i, _)| i)
            .ok_or_else(|| Error::NotRealAboveOne(format!("{} has no real root", tmp.poly)))?;
        Ok(Self { index: idx, ..tmp })
    }

    /// The root of `poly` closest to `approx`.
    pub fn nearest(poly: IntPolynomial, approx: Complex64) -> Result<Self> {
        let tmp = Self::new(poly, 0)?;
        let idx = tmp
            .roots
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1.center - approx).norm().partial_cmp(&(b.1.center - approx).norm()).unwrap_or(Ordering::Equal)
            })
            .map(|(i, _)| i)
            .unwrap_or(0);
        Ok(Self { index: idx, ..tmp })
    }

    pub fn integer(n: i64) -> Self {
        Self::new(IntPolynomial::from_i64(&[-n, 1]), 0).expect("linear polynomials are irreducible")
    }

    pub fn poly(&self) -> &IntPolynomial {
        &self.poly
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn roots(&self) -> &[RootEnclosure] {
        &self.roots
    }

    pub fn enclosure(&self) -> &RootEnclosure {
        &self.roots[self.index]
    }

    pub fn value(&self) -> Complex64 {
        self.roots[self.index].center
    }

    pub fn is_real(&self) -> bool {
        self.enclosure().is_real()
    }

    /// Float value of a real root.
    pub fn real_value(&self) -> Option<f64> {
        self.is_real().then(|| self.value().re)
    }

    /// Indices of the other roots of the minimal polynomial.
    pub fn conjugate_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.roots.len()).filter(move |&j| j != self.index)
    }

    pub fn conjugates(&self) -> Vec<Complex64> {
        self.conjugate_indices().map(|j| self.roots[j].center).collect()
    }

    /// The same minimal polynomial with another selected root.
    pub fn conjugate(&self, j: usize) -> Self {
        Self { index: j, ..self.clone() }
    }

    /// Largest conjugate modulus (the root itself excluded); 0 in degree one.
    pub fn max_conjugate_modulus(&self) -> f64 {
        self.conjugate_indices().map(|j| self.roots[j].center.norm()).fold(0.0, f64::max)
    }

    fn product_roots(&self) -> Result<&[RootEnclosure]> {
        let r = self.products.get_or_init(|| {
            let q = self.poly.pairwise_products().square_free_part();
            let q = if q.leading().is_negative() { q.neg() } else { q };
            isolate_roots(&q, ROOT_PRECISION).map_err(|e| e.to_string())
        });
        r.as_deref().map_err(|e| Error::Undecidable(format!("product polynomial: {e}")))
    }

    /// Index of the product-polynomial root equal to r_i * r_j.
    fn locate_product(&self, i: usize, j: usize, conj_j: bool) -> Result<usize> {
        let (a, b) = (&self.roots[i], &self.roots[j]);
        let cb = if conj_j { b.center.conj() } else { b.center };
        let c = a.center * cb;
        let r = a.center.norm() * b.radius + b.center.norm() * a.radius + a.radius * b.radius;
        let prods = self.product_roots()?;
        let hits: Vec<usize> =
            prods.iter().enumerate().filter(|(_, e)| (e.center - c).norm() <= e.radius + r).map(|(k, _)| k).collect();
        match hits.as_slice() {
            [k] => Ok(*k),
            _ => Err(Error::Undecidable(format!("product of roots {i} and {j} not isolated"))),
        }
    }

    /// Certified comparison of |r_i| with 1, with exact resolution of ties.
    pub fn compare_modulus_to_one(&self, i: usize) -> Result<Ordering> {
        let (lo, hi) = self.roots[i].modulus_bounds();
        if hi < 1.0 {
            return Ok(Ordering::Less);
        }
        if lo > 1.0 {
            return Ok(Ordering::Greater);
        }
        let e = &self.roots[i];
        if e.is_real() {
            for s in [1i64, -1] {
                if e.contains(Complex64::new(s as f64, 0.0)) && self.poly.eval_int(&BigInt::from(s)).is_zero() {
                    return Ok(Ordering::Equal);
                }
            }
            return Err(Error::Undecidable(format!("|root {i}| vs 1")));
        }
        // For an irreducible p a non-real root on the unit circle forces p to be reciprocal,
        // with 1/r = conj(r).
        let reciprocal = self.poly.reversed() == self.poly || self.poly.reversed() == self.poly.neg();
        if reciprocal {
            let c = e.center;
            let inv = c.inv();
            let rad = e.radius / (c.norm() * (c.norm() - e.radius));
            let hits: Vec<usize> = self
                .roots
                .iter()
                .enumerate()
                .filter(|(_, f)| (f.center - inv).norm() <= f.radius + rad)
                .map(|(k, _)| k)
                .collect();
            if let [k] = hits.as_slice() {
                let conj = c.conj();
                if (self.roots[*k].center - conj).norm() <= self.roots[*k].radius + e.radius {
                    return Ok(Ordering::Equal);
                }
            }
        }
        Err(Error::Undecidable(format!("|root {i}| vs 1")))
    }

    /// Certified comparison of |r_i| with |r_j|, with exact resolution of ties.
    pub fn compare_moduli(&self, i: usize, j: usize) -> Result<Ordering> {
        if i == j {
            return Ok(Ordering::Equal);
        }
        let (lo_i, hi_i) = self.roots[i].modulus_bounds();
        let (lo_j, hi_j) = self.roots[j].modulus_bounds();
        if hi_i < lo_j {
            return Ok(Ordering::Less);
        }
        if lo_i > hi_j {
            return Ok(Ordering::Greater);
        }
        let ci = self.roots[i].center;
        let cj = self.roots[j].center;
        if (ci.conj() - cj).norm() <= self.roots[i].radius + self.roots[j].radius {
            return Ok(Ordering::Equal);
        }
        // |r_i|^2 and |r_j|^2 are both roots of the product polynomial.
        let ki = self.locate_product(i, self.conj_index(i)?, false)?;
        let kj = self.locate_product(j, self.conj_index(j)?, false)?;
        if ki == kj {
            return Ok(Ordering::Equal);
        }
        let prods = self.product_roots()?;
        Ok(prods[ki].center.re.partial_cmp(&prods[kj].center.re).unwrap_or(Ordering::Equal))
    }

    fn conj_index(&self, i: usize) -> Result<usize> {
        let c = self.roots[i].center.conj();
        self.roots
            .iter()
            .position(|e| e.contains(c) || (e.center - c).norm() <= e.radius + self.roots[i].radius)
            .ok_or_else(|| Error::Certification(format!("no conjugate found for root {i}")))
    }
}

impl fmt::Display for AlgebraicInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.value();
        if self.is_real() {
            write!(f, "root {} of {} (~{:.12})", self.index, self.poly, z.re)
        } else {
            write!(f, "root {} of {} (~{:.12}{:+.12}i)", self.index, self.poly, z.re, z.im)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NumberClass {
    Pisot,
    Salem,
    Perron,
    Lind,
    None,
}

impl NumberClass {
    pub fn name(self) -> &'static str {
        match self {
            NumberClass::Pisot => "Pisot",
            NumberClass::Salem => "Salem",
            NumberClass::Perron => "Perron",
            NumberClass::Lind => "Lind",
            NumberClass::None => "None",
        }
    }
}

impl fmt::Display for NumberClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub class: NumberClass,
    /// Conjugate moduli, in canonical root order with the root itself omitted.
    pub conjugate_moduli: Vec<f64>,
    pub vs_one: Vec<Ordering>,
    pub vs_self: Vec<Ordering>,
}

/// Exact test that the selected root is real and greater than one.
pub fn real_above_one(a: &AlgebraicInteger) -> Result<bool> {
    let Some((mut lo, mut hi)) = a.enclosure().interval.clone() else {
        return Ok(false);
    };
    let one = num_rational::BigRational::one();
    let mut tol = 1e-15;
    loop {
        if hi <= one {
            return Ok(false);
        }
        if lo > one {
            return Ok(true);
        }
        if lo == hi {
            return Ok(false);
        }
        (lo, hi) = crate::roots::refine_interval(&a.enclosure().factor, lo, hi, tol)?;
        tol *= 1e-6;
    }
}

/// Classify a real algebraic integer greater than one.
pub fn classify(a: &AlgebraicInteger) -> Result<Classification> {
    if !real_above_one(a)? {
        return Err(Error::NotRealAboveOne(a.to_string()));
    }
    let mut moduli = Vec::new();
    let mut vs_one = Vec::new();
    let mut vs_self = Vec::new();
    for j in a.conjugate_indices() {
        moduli.push(a.roots()[j].center.norm());
        vs_one.push(a.compare_modulus_to_one(j)?);
        vs_self.push(a.compare_moduli(j, a.index())?);
    }
    let all = |v: &[Ordering], ok: &[Ordering]| v.iter().all(|o| ok.contains(o));
    let any_eq = |v: &[Ordering]| v.contains(&Ordering::Equal);
    let class = if all(&vs_one, &[Ordering::Less]) {
        NumberClass::Pisot
    } else if all(&vs_one, &[Ordering::Less, Ordering::Equal]) && any_eq(&vs_one) {
        NumberClass::Salem
    } else if all(&vs_self, &[Ordering::Less]) {
        NumberClass::Perron
    } else if all(&vs_self, &[Ordering::Less, Ordering::Equal]) && any_eq(&vs_self) {
        NumberClass::Lind
    } else {
        NumberClass::None
    };
    if class == NumberClass::Pisot {
        debug_assert!(vs_self.iter().all(|o| *o == Ordering::Less));
    }
    Ok(Classification { class, conjugate_moduli: moduli, vs_one, vs_self })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyVerdict {
    pub holds: bool,
    /// Offending member index and the root index of its conjugate.
    pub witness: Option<(usize, usize)>,
}

/// Check that every conjugate of modulus at least one of a member is itself a member.
pub fn pisot_family_check(family: &[AlgebraicInteger]) -> Result<FamilyVerdict> {
    if family.is_empty() {
        return Err(Error::Precondition("family must be nonempty".into()));
    }
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            if family[i] == family[j] {
                return Err(Error::Precondition(format!("members {i} and {j} coincide")));
            }
        }
    }
    for (m, lam) in family.iter().enumerate() {
        for j in lam.conjugate_indices() {
            if lam.compare_modulus_to_one(j)? == Ordering::Less {
                continue;
            }
            let present = family.iter().any(|mu| mu.poly() == lam.poly() && mu.index() == j);
            if !present {
                return Ok(FamilyVerdict { holds: false, witness: Some((m, j)) });
            }
        }
    }
    Ok(FamilyVerdict { holds: true, witness: None })
}

#[derive(Clone, Debug)]
pub struct KsReport {
    pub admissible: bool,
    /// (member index, conjugate root index) pairs breaking the condition.
    pub violations: Vec<(usize, usize)>,
}

/// Admissibility of a diagonalizable expansion spectrum: each conjugate of a member either
/// has strictly smaller modulus or occurs in the spectrum with at least the same multiplicity.
pub fn ks_admissibility(spectrum: &[(AlgebraicInteger, usize)]) -> Result<KsReport> {
    for (lam, _) in spectrum {
        let lo = lam.enclosure().modulus_bounds().0;
        if lo <= 1.0 {
            return Err(Error::NotExpanding(lam.to_string()));
        }
    }
    let mut violations = Vec::new();
    for (m, (lam, k)) in spectrum.iter().enumerate() {
        for j in lam.conjugate_indices() {
            if lam.compare_moduli(j, lam.index())? == Ordering::Less {
                continue;
            }
            let mult: usize =
                spectrum.iter().filter(|(mu, _)| mu.poly() == lam.poly() && mu.index() == j).map(|(_, c)| *c).sum();
            if mult < *k {
                violations.push((m, j));
            }
        }
    }
    Ok(KsReport { admissible: violations.is_empty(), violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn largest(c: &[i64]) -> AlgebraicInteger {
        AlgebraicInteger::largest_real(IntPolynomial::from_i64(c)).unwrap()
    }

    #[test]
    fn classes() {
        assert_eq!(classify(&largest(&[-1, -1, 1])).unwrap().class, NumberClass::Pisot);
        assert_eq!(classify(&largest(&[-2, 0, 1])).unwrap().class, NumberClass::Lind);
        assert_eq!(classify(&largest(&[1, -1, -1, -1, 1])).unwrap().class, NumberClass::Salem);
        assert_eq!(classify(&largest(&[-3, -1, 1])).unwrap().class, NumberClass::Perron);
        assert_eq!(classify(&largest(&[-2, 1])).unwrap().class, NumberClass::Pisot);
    }

    #[test]
    fn reducible_rejected() {
        let r = AlgebraicInteger::new(IntPolynomial::from_i64(&[0, -2, 1]), 0);
        assert!(matches!(r, Err(Error::Reducible(_))));
        let r = AlgebraicInteger::new(IntPolynomial::from_i64(&[-1, 0, 0, 0, 1]), 0);
        assert!(matches!(r, Err(Error::Reducible(_))));
    }

    #[test]
    fn classify_needs_real_above_one() {
        let p = IntPolynomial::from_i64(&[-1, -1, 1]);
        let small = AlgebraicInteger::new(p, 0).unwrap();
        assert!(classify(&small).is_err());
    }

    #[test]
    fn families() {
        let sqrt2 = largest(&[-2, 0, 1]);
        let v = pisot_family_check(std::slice::from_ref(&sqrt2)).unwrap();
        assert!(!v.holds);
        assert_eq!(v.witness, Some((0, 0)));
        let both = [sqrt2.clone(), sqrt2.conjugate(0)];
        assert!(pisot_family_check(&both).unwrap().holds);
        assert!(pisot_family_check(&[largest(&[-1, -1, 1])]).unwrap().holds);
    }

    #[test]
    fn ks() {
        let sqrt2 = largest(&[-2, 0, 1]);
        assert!(!ks_admissibility(&[(sqrt2.clone(), 1)]).unwrap().admissible);
        assert!(ks_admissibility(&[(sqrt2.clone(), 1), (sqrt2.conjugate(0), 1)]).unwrap().admissible);
        assert!(ks_admissibility(&[(largest(&[-1, -1, 1]), 1)]).unwrap().admissible);
        assert!(
            ks_admissibility(&[(AlgebraicInteger::new(IntPolynomial::from_i64(&[-1, -1, 1]), 0).unwrap(), 1)]).is_err()
        );
    }
}
