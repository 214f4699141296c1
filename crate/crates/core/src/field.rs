//! Arithmetic in Q(β) for a real algebraic integer β, in power-basis coordinates.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebraic::AlgebraicInteger;
use crate::error::{Error, Result};
use crate::poly::IntPolynomial;
use crate::roots::refine_interval;

/// Element of Q(β): coordinates on 1, β, …, β^{s-1}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(pub Vec<BigRational>);

impl Elem {
    pub fn coords(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Integer coordinates, when all coordinates are integers.
    pub fn integer_coords(&self) -> Option<Vec<i64>> {
        self.0.iter().map(|c| if c.is_integer() { c.to_integer().to_i64() } else { None }).collect()
    }
}

/// A closed rational interval.
#[derive(Clone, Debug, PartialEq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn point(x: BigRational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().cloned().unwrap_or_default();
        let hi = c.iter().max().cloned().unwrap_or_default();
        Self { lo, hi }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }

    pub fn mid_f64(&self) -> f64 {
        ((&self.lo + &self.hi) / BigRational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN)
    }
}

/// The field Q(β) embedded in R through a real root β.
pub struct NumberField {
    generator: AlgebraicInteger,
    beta: f64,
    /// Reductions of β^s, …, β^{2s-2} in the power basis.
    reductions: Vec<Vec<BigRational>>,
    interval: Mutex<(BigRational, BigRational)>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({})", self.generator)
    }
}

impl NumberField {
    pub fn new(generator: AlgebraicInteger) -> Result<Self> {
        let (lo, hi) = generator
            .enclosure()
            .interval
            .clone()
            .ok_or_else(|| Error::Precondition(format!("{generator} is not real")))?;
        let s = generator.degree();
        let p = generator.poly();
        let mut reductions = Vec::new();
        // β^s = -(c_0 + … + c_{s-1} β^{s-1})
        let mut cur: Vec<BigRational> = (0..s).map(|k| -BigRational::from_integer(p.coeff(k))).collect();
        for _ in s..(2 * s).saturating_sub(1) {
            reductions.push(cur.clone());
            // multiply by β
            let top = cur[s - 1].clone();
            let mut next = vec![BigRational::zero(); s];
            next[1..s].clone_from_slice(&cur[..s - 1]);
            for k in 0..s {
                next[k] -= &top * BigRational::from_integer(p.coeff(k));
            }
            cur = next;
        }
        let beta = generator.value().re;
        Ok(Self { generator, beta, reductions, interval: Mutex::new((lo, hi)) })
    }

    /// Q, presented as Q(0) with minimal polynomial x.
    pub fn rationals() -> Self {
        let g = AlgebraicInteger::new(IntPolynomial::x(), 0).expect("x is irreducible");
        Self::new(g).expect("0 is real")
    }

    /// Q(β) for the largest real root of `poly`.
    pub fn from_poly(poly: IntPolynomial) -> Result<Self> {
        Self::new(AlgebraicInteger::largest_real(poly)?)
    }

    pub fn generator(&self) -> &AlgebraicInteger {
        &self.generator
    }

    pub fn degree(&self) -> usize {
        self.generator.degree()
    }

    pub fn beta_f64(&self) -> f64 {
        self.beta
    }

    pub fn zero(&self) -> Elem {
        Elem(vec![BigRational::zero(); self.degree()])
    }

    pub fn from_rational(&self, q: BigRational) -> Elem {
        let mut e = self.zero();
        e.0[0] = q;
        e
    }

    pub fn from_int(&self, n: i64) -> Elem {
        self.from_rational(BigRational::from_integer(n.into()))
    }

    pub fn one(&self) -> Elem {
        self.from_int(1)
    }

    /// The generator β as an element.
    pub fn beta(&self) -> Elem {
        if self.degree() == 1 {
            return self.from_rational(BigRational::from_integer(-self.generator.poly().coeff(0)));
        }
        let mut e = self.zero();
        e.0[1] = BigRational::one();
        e
    }

    pub fn beta_pow(&self, k: usize) -> Elem {
        if k < self.degree() && self.degree() > 1 {
            let mut e = self.zero();
            e.0[k] = BigRational::one();
            return e;
        }
        let b = self.beta();
        (0..k).fold(self.one(), |acc, _| self.mul(&acc, &b))
    }

    /// Element with the given integer power-basis coordinates.
    pub fn from_coords(&self, c: &[i64]) -> Elem {
        let mut e = self.zero();
        for (k, v) in c.iter().enumerate().take(self.degree()) {
            e.0[k] = BigRational::from_integer((*v).into());
        }
        e
    }

    pub fn from_rationals(&self, c: Vec<BigRational>) -> Result<Elem> {
        if c.len() != self.degree() {
            return Err(Error::Dimension(format!(
                "field element needs {} coordinates, got {}",
                self.degree(),
                c.len()
            )));
        }
        Ok(Elem(c))
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        Elem(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        Elem(a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        Elem(a.0.iter().map(|x| -x).collect())
    }

    pub fn scale(&self, a: &Elem, k: &BigRational) -> Elem {
        Elem(a.0.iter().map(|x| x * k).collect())
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let s = self.degree();
        let mut full = vec![BigRational::zero(); 2 * s - 1];
        for (i, x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                full[i + j] += x * y;
            }
        }
        let mut out: Vec<BigRational> = full[..s].to_vec();
        for (k, c) in full[s..].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (t, r) in self.reductions[k].iter().enumerate() {
                out[t] += c * r;
            }
        }
        Elem(out)
    }

    /// Matrix of multiplication by `a` on power-basis coordinates (column k is a·β^k).
    pub fn mul_matrix(&self, a: &Elem) -> Vec<Vec<BigRational>> {
        let s = self.degree();
        let cols: Vec<Elem> = (0..s).map(|k| self.mul(a, &self.beta_pow(k))).collect();
        (0..s).map(|i| (0..s).map(|k| cols[k].0[i].clone()).collect()).collect()
    }

    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::Singular);
        }
        let m = self.mul_matrix(a);
        let rhs = self.one().0;
        let x = crate::matrix::solve_rational(&m, &rhs).ok_or(Error::Singular)?;
        Ok(Elem(x))
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Minimal polynomial of an element of Z[β], with the element selected as a root.
    pub fn minimal_polynomial(&self, a: &Elem) -> Result<AlgebraicInteger> {
        let m = self.mul_matrix(a);
        let ints: Option<Vec<Vec<i64>>> = m
            .iter()
            .map(|r| r.iter().map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None }).collect())
            .collect();
        let ints = ints.ok_or_else(|| Error::Precondition("element is not in Z[β]".into()))?;
        let mut f = crate::matrix::charpoly(&ints).square_free_part();
        if f.leading().is_negative() {
            f = f.neg();
        }
        let v = self.to_f64(a);
        let rel = |g: &IntPolynomial| g.eval_f64(v).abs() / g.abs_eval(v.abs()).max(1e-300);
        while let Some(g) = crate::algebraic::find_factor(&f)? {
            let h = f.exact_div(&g).ok_or_else(|| Error::Certification("factor does not divide".into()))?;
            let h = if h.leading().is_negative() { h.neg() } else { h };
            f = if rel(&g) <= rel(&h) { g } else { h };
        }
        AlgebraicInteger::nearest(f, num_complex::Complex64::new(v, 0.0))
    }

    /// Rational integer test: β-coordinates vanish and the constant is integral.
    pub fn is_integer(&self, a: &Elem) -> bool {
        a.0[0].is_integer() && a.0[1..].iter().all(Zero::is_zero)
    }

    pub fn to_f64(&self, a: &Elem) -> f64 {
        a.0.iter().rev().fold(0.0, |acc, c| acc * self.beta + c.to_f64().unwrap_or(f64::NAN))
    }

    fn beta_interval(&self, width: &BigRational) -> Result<RatInterval> {
        let mut guard = self.interval.lock().unwrap_or_else(|e| e.into_inner());
        let (lo, hi) = guard.clone();
        if &(&hi - &lo) <= width {
            return Ok(RatInterval { lo, hi });
        }
        let tol = width.to_f64().unwrap_or(0.0) / 2.0;
        let tol = if tol > 0.0 { tol } else { f64::MIN_POSITIVE };
        let (lo, hi) = refine_interval(&self.generator.enclosure().factor, lo, hi, tol)?;
        *guard = (lo.clone(), hi.clone());
        Ok(RatInterval { lo, hi })
    }

    /// Rational interval of width at most `tol` containing the real value of `a`.
    pub fn enclose(&self, a: &Elem, tol: f64) -> Result<RatInterval> {
        let tol_r = num_rational::BigRational::from_float(tol)
            .filter(|t| t.is_positive())
            .ok_or(Error::InvalidPrecision(tol))?;
        if a.0[1..].iter().all(Zero::is_zero) {
            return Ok(RatInterval::point(a.0[0].clone()));
        }
        let mut w = BigRational::new(BigInt::one(), BigInt::from(1u64 << 40));
        for _ in 0..200 {
            let b = self.beta_interval(&w)?;
            let mut acc = RatInterval::point(BigRational::zero());
            for c in a.0.iter().rev() {
                acc = acc.mul(&b).add(&RatInterval::point(c.clone()));
            }
            if acc.width() <= tol_r {
                return Ok(acc);
            }
            w /= BigRational::from_integer(BigInt::from(1u64 << 32));
        }
        Err(Error::PrecisionExhausted("field element enclosure".into()))
    }

    /// Exact sign of the real value.
    pub fn sign(&self, a: &Elem) -> Result<Ordering> {
        if a.is_zero() {
            return Ok(Ordering::Equal);
        }
        let mut tol = self.to_f64(a).abs().max(1e-3) / 4.0;
        for _ in 0..64 {
            let iv = self.enclose(a, tol)?;
            if iv.lo.is_positive() {
                return Ok(Ordering::Greater);
            }
            if iv.hi.is_negative() {
                return Ok(Ordering::Less);
            }
            tol *= 1e-8;
        }
        Err(Error::PrecisionExhausted("sign of a field element".into()))
    }

    pub fn cmp(&self, a: &Elem, b: &Elem) -> Result<Ordering> {
        self.sign(&self.sub(a, b))
    }

    /// Exact floor of the real value.
    pub fn floor(&self, a: &Elem) -> Result<BigInt> {
        if self.is_integer(a) {
            return Ok(a.0[0].to_integer());
        }
        let iv = self.enclose(a, 0.25)?;
        let n = iv.hi.floor().to_integer();
        let diff = self.sub(a, &self.from_rational(BigRational::from_integer(n.clone())));
        Ok(if self.sign(&diff)? == Ordering::Less { n - 1 } else { n })
    }

    /// Certified distance to the nearest integer, accurate to `tol`.
    pub fn dist_to_int(&self, a: &Elem, tol: f64) -> Result<f64> {
        let n = self.floor(a)?;
        let frac = self.sub(a, &self.from_rational(BigRational::from_integer(n)));
        let iv = self.enclose(&frac, tol)?;
        let f = iv.mid_f64();
        Ok(f.min(1.0 - f).max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> NumberField {
        NumberField::from_poly(IntPolynomial::from_i64(&[-1, -1, 1])).unwrap()
    }

    #[test]
    fn golden_arithmetic() {
        let k = golden();
        let phi = k.beta_pow(1);
        let sq = k.mul(&phi, &phi);
        assert_eq!(sq, k.from_coords(&[1, 1]));
        let inv = k.inv(&phi).unwrap();
        assert_eq!(inv, k.from_coords(&[-1, 1]));
        assert_eq!(k.beta_pow(3), k.from_coords(&[1, 2]));
    }

    #[test]
    fn exact_floor_at_integer_tie() {
        let k = golden();
        // φ·(φ-1) = 1 exactly
        let x = k.mul(&k.beta_pow(1), &k.from_coords(&[-1, 1]));
        assert_eq!(k.floor(&x).unwrap(), BigInt::from(1));
        assert_eq!(k.floor(&k.from_coords(&[-1, 1])).unwrap(), BigInt::zero());
        assert_eq!(k.floor(&k.from_coords(&[1, -1])).unwrap(), BigInt::from(-1));
    }

    #[test]
    fn signs_of_tiny_values() {
        let k = golden();
        // F_41 φ - F_42 is tiny but nonzero
        let (mut a, mut b) = (0i64, 1i64);
        for _ in 0..41 {
            let c = a + b;
            a = b;
            b = c;
        }
        let e = k.from_coords(&[-b, a]);
        assert!(k.to_f64(&e).abs() < 1e-8);
        assert_eq!(k.sign(&e).unwrap(), Ordering::Greater);
        assert_eq!(k.sign(&k.neg(&e)).unwrap(), Ordering::Less);
    }

    #[test]
    fn distance_to_integer() {
        let k = golden();
        let mut x = k.one();
        for _ in 0..10 {
            x = k.mul(&x, &k.beta_pow(1));
        }
        let d = k.dist_to_int(&x, 1e-12).unwrap();
        assert!((d - 0.618_033_988_749_895f64.powi(10)).abs() < 1e-10);
    }
}
