//! Univariate polynomials with arbitrary-precision integer coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Integer polynomial, coefficients stored lowest degree first.
///
/// The zero polynomial is represented by an empty coefficient list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Monic polynomial of degree at least one, or an error.
    pub fn monic(coeffs: Vec<BigInt>) -> Result<Self> {
        let p = Self::new(coeffs);
        if p.degree().unwrap_or(0) < 1 {
            return Err(Error::InvalidPolynomial("degree must be at least 1".into()));
        }
        if !p.is_monic() {
            return Err(Error::InvalidPolynomial(format!("{p} is not monic")));
        }
        Ok(p)
    }

    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeffs_i64(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(ToPrimitive::to_i64).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Sum of |c_j| |z|^j, the scale used for rounding-error bounds of Horner evaluation.
    pub fn abs_eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.to_f64().unwrap_or(f64::INFINITY).abs())
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::new(vec![]);
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// p(-x).
    pub fn reflect(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() }).collect())
    }

    /// x^deg p(1/x).
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    /// True when p(x) = ± x^s p(1/x).
    pub fn is_reciprocal(&self) -> bool {
        let r = self.reversed();
        r == *self || r == self.neg()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Exact quotient when `divisor` divides `self` over Z.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = rat_div_rem(&to_rat(self), &to_rat(divisor));
        if !r.is_empty() {
            return None;
        }
        let mut out = Vec::with_capacity(q.len());
        for c in q {
            if !c.is_integer() {
                return None;
            }
            out.push(c.to_integer());
        }
        Some(Self::new(out))
    }

    /// Greatest common divisor over Q, returned primitive with positive leading coefficient.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = to_rat(self);
        let mut b = to_rat(other);
        while !b.is_empty() {
            let (_, r) = rat_div_rem(&a, &b);
            a = b;
            b = r;
        }
        from_rat_primitive(&a)
    }

    /// Square-free decomposition (Yun): factors `f_k` with `self = c * prod f_k^k`.
    pub fn square_free_decomposition(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = to_rat(&self.primitive_part());
        let fp = rat_derivative(&f);
        let a0 = rat_gcd(&f, &fp);
        let mut b = rat_div_rem(&f, &a0).0;
        let c = rat_div_rem(&fp, &a0).0;
        let mut d = rat_sub(&c, &rat_derivative(&b));
        let mut k = 1;
        while b.len() > 1 {
            let a = rat_gcd(&b, &d);
            if a.len() > 1 {
                out.push((from_rat_primitive(&a), k));
            }
            b = rat_div_rem(&b, &a).0;
            let c = rat_div_rem(&d, &a).0;
            d = rat_sub(&c, &rat_derivative(&b));
            k += 1;
        }
        out
    }

    /// Square-free part (product of distinct irreducible factors).
    pub fn square_free_part(&self) -> Self {
        self.square_free_decomposition().into_iter().fold(Self::from_i64(&[1]), |acc, (f, _)| acc.mul(&f))
    }

    /// Power sums p_k = sum of k-th powers of the roots, k = 1..=n, for a monic polynomial.
    pub fn power_sums(&self, n: usize) -> Vec<BigInt> {
        let deg = self.degree().unwrap_or(0);
        // e_k with sign: monic x^s + c_{s-1} x^{s-1} + ... ; Newton: p_k + sum_{i=1}^{k-1} a_i p_{k-i} + k a_k = 0
        // where a_i = c_{s-i}.
        let a = |i: usize| -> BigInt {
            if i > deg {
                BigInt::zero()
            } else {
                self.coeff(deg - i)
            }
        };
        let mut p: Vec<BigInt> = Vec::with_capacity(n + 1);
        p.push(BigInt::from(deg));
        for k in 1..=n {
            let mut s = BigInt::from(k) * a(k);
            for i in 1..k {
                s += a(i) * &p[k - i];
            }
            p.push(-s);
        }
        p.remove(0);
        p
    }

    /// Monic polynomial of degree `deg` with the given root power sums p_1..p_deg.
    pub fn from_power_sums(sums: &[BigInt], deg: usize) -> Self {
        // k a_k = -(p_k + sum_{i=1}^{k-1} a_i p_{k-i})
        let mut a: Vec<BigRational> = vec![BigRational::one()];
        for k in 1..=deg {
            let mut s = BigRational::from_integer(sums[k - 1].clone());
            for i in 1..k {
                s += &a[i] * BigRational::from_integer(sums[k - i - 1].clone());
            }
            a.push(-s / BigRational::from_integer(BigInt::from(k)));
        }
        let coeffs: Vec<BigInt> = a.iter().rev().map(|c| c.to_integer()).collect();
        Self::new(coeffs)
    }

    /// Monic polynomial whose roots are all products r_i r_j of roots of `self` (i, j ranging
    /// independently), computed from power sums.
    pub fn pairwise_products(&self) -> Self {
        let s = self.degree().unwrap_or(0);
        let n = s * s;
        let ps = self.power_sums(n);
        let sq: Vec<BigInt> = ps.iter().map(|p| p * p).collect();
        Self::from_power_sums(&sq, n)
    }

    /// Parse a polynomial in `x` such as `x^4-x^3-x^2-x+1` or `2x^2 + 3`.
    pub fn parse(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse { line: 1, col: 1, msg: "empty polynomial".into() });
        }
        let bytes = s.as_bytes();
        let mut coeffs: Vec<BigInt> = Vec::new();
        let mut i = 0;
        let err = |pos: usize, msg: &str| Error::Parse { line: 1, col: pos + 1, msg: msg.into() };
        while i < bytes.len() {
            let mut sign = BigInt::one();
            if bytes[i] == b'+' || bytes[i] == b'-' {
                if bytes[i] == b'-' {
                    sign = -sign;
                }
                i += 1;
            } else if i != 0 {
                return Err(err(i, "expected '+' or '-'"));
            }
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let coef = if i > start {
                s[start..i].parse::<BigInt>().map_err(|_| err(start, "bad coefficient"))?
            } else {
                BigInt::one()
            };
            if i < bytes.len() && bytes[i] == b'*' {
                i += 1;
            }
            let mut power = 0usize;
            if i < bytes.len() && bytes[i] == b'x' {
                i += 1;
                power = 1;
                if i < bytes.len() && bytes[i] == b'^' {
                    i += 1;
                    let ps = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if i == ps {
                        return Err(err(ps, "expected exponent"));
                    }
                    power = s[ps..i].parse().map_err(|_| err(ps, "bad exponent"))?;
                }
            } else if i == start {
                return Err(err(i, "expected coefficient or x"));
            }
            if coeffs.len() <= power {
                coeffs.resize(power + 1, BigInt::zero());
            }
            coeffs[power] += sign * coef;
        }
        Ok(Self::new(coeffs))
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coef = !a.is_one() || i == 0;
            if show_coef {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

type RatPoly = Vec<BigRational>;

fn to_rat(p: &IntPolynomial) -> RatPoly {
    p.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

fn trim(mut p: RatPoly) -> RatPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn rat_sub(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let n = a.len().max(b.len());
    let z = BigRational::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
}

fn rat_div_rem(a: &RatPoly, b: &RatPoly) -> (RatPoly, RatPoly) {
    let b = trim(b.clone());
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = trim(a.clone());
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![BigRational::zero(); r.len() - b.len() + 1];
    let lb = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let factor = r.last().unwrap() / &lb;
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] -= &factor * bc;
        }
        q[shift] = factor;
        r.pop();
        r = trim(r);
    }
    (trim(q), r)
}

fn rat_gcd(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let mut a = trim(a.clone());
    let mut b = trim(b.clone());
    while !b.is_empty() {
        let (_, r) = rat_div_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn from_rat_primitive(p: &RatPoly) -> IntPolynomial {
    if p.is_empty() {
        return IntPolynomial::new(vec![]);
    }
    let l = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    IntPolynomial::new(p.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect())
        .primitive_part()
}

fn rat_derivative(p: &RatPoly) -> RatPoly {
    trim(p.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let p = IntPolynomial::parse("x^4-x^3-x^2-x+1").unwrap();
        assert_eq!(p.coeffs_i64().unwrap(), vec![1, -1, -1, -1, 1]);
        assert_eq!(p.to_string(), "x^4-x^3-x^2-x+1");
        let q = IntPolynomial::parse("2x^2 + 3*x - 7").unwrap();
        assert_eq!(q.coeffs_i64().unwrap(), vec![-7, 3, 2]);
        assert_eq!(IntPolynomial::parse("x-2").unwrap().to_string(), "x-2");
        assert!(IntPolynomial::parse("x^").is_err());
        assert!(IntPolynomial::parse("x y").is_err());
    }

    #[test]
    fn monic_rejects() {
        assert!(IntPolynomial::monic(vec![BigInt::from(1), BigInt::from(2)]).is_err());
        assert!(IntPolynomial::monic(vec![BigInt::from(3)]).is_err());
    }

    #[test]
    fn square_free() {
        // (x-1)^2 (x+2)
        let p = IntPolynomial::from_i64(&[-1, 1]).mul(&IntPolynomial::from_i64(&[-1, 1]));
        let p = p.mul(&IntPolynomial::from_i64(&[2, 1]));
        let dec = p.square_free_decomposition();
        assert_eq!(dec.len(), 2);
        assert_eq!(dec[0], (IntPolynomial::from_i64(&[2, 1]), 1));
        assert_eq!(dec[1], (IntPolynomial::from_i64(&[-1, 1]), 2));
        let sf = IntPolynomial::from_i64(&[-1, -1, 1]);
        assert_eq!(sf.square_free_decomposition(), vec![(sf.clone(), 1)]);
    }

    #[test]
    fn power_sum_roundtrip() {
        let p = IntPolynomial::from_i64(&[1, -1, -1, -1, 1]);
        let ps = p.power_sums(4);
        assert_eq!(IntPolynomial::from_power_sums(&ps, 4), p);
        // products of roots of x^2-2: {2, -2, -2, 2}
        let q = IntPolynomial::from_i64(&[-2, 0, 1]).pairwise_products();
        let expected = IntPolynomial::from_i64(&[-2, 1])
            .mul(&IntPolynomial::from_i64(&[-2, 1]))
            .mul(&IntPolynomial::from_i64(&[2, 1]))
            .mul(&IntPolynomial::from_i64(&[2, 1]));
        assert_eq!(q, expected);
    }

    #[test]
    fn reciprocal_and_gcd() {
        assert!(IntPolynomial::from_i64(&[1, -1, -1, -1, 1]).is_reciprocal());
        assert!(!IntPolynomial::from_i64(&[-1, -1, 1]).is_reciprocal());
        let a = IntPolynomial::from_i64(&[-1, 0, 1]);
        let b = IntPolynomial::from_i64(&[1, 2, 1]);
        assert_eq!(a.gcd(&b), IntPolynomial::from_i64(&[1, 1]));
    }
}
