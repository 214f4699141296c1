//! Perron–Frobenius analysis of nonnegative integer matrices and the ‖aⁿx‖ sequence.

use crate::algebraic::{AlgebraicInteger, ROOT_PRECISION};
use crate::error::{Error, Result};
use crate::field::{Elem, NumberField};
use crate::matrix::{charpoly, is_nonnegative, transpose, IntMatrix};
use crate::poly::IntPolynomial;
use crate::roots::{isolate_roots, RootEnclosure};

#[derive(Clone, Debug)]
pub struct SpectralReport {
    pub charpoly: IntPolynomial,
    /// Distinct eigenvalues with multiplicities, canonical order.
    pub eigenvalues: Vec<RootEnclosure>,
    pub pf_eigenvalue: f64,
    pub pf_radius: f64,
    /// Right PF eigenvector, entries summing to one.
    pub right: Vec<f64>,
    /// Left PF eigenvector, entries summing to one.
    pub left: Vec<f64>,
    pub primitive: bool,
    /// Smallest k with S^k strictly positive.
    pub exponent: Option<usize>,
}

/// Smallest k ≤ (m−1)²+1 with S^k > 0, if any.
pub fn primitivity_exponent(s: &IntMatrix) -> Option<usize> {
    let m = s.len();
    let b: Vec<Vec<bool>> = s.iter().map(|r| r.iter().map(|&x| x > 0).collect()).collect();
    let mut p = b.clone();
    let bound = (m - 1) * (m - 1) + 1;
    for k in 1..=bound {
        if p.iter().flatten().all(|&x| x) {
            return Some(k);
        }
        let mut next = vec![vec![false; m]; m];
        for i in 0..m {
            for j in 0..m {
                next[i][j] = (0..m).any(|t| p[i][t] && b[t][j]);
            }
        }
        p = next;
    }
    None
}

fn pf_vector(s: &IntMatrix) -> Vec<f64> {
    let m = s.len();
    let mut v = vec![1.0 / m as f64; m];
    for _ in 0..100_000 {
        let mut w: Vec<f64> = (0..m).map(|i| v[i] + (0..m).map(|j| s[i][j] as f64 * v[j]).sum::<f64>()).collect();
        let total: f64 = w.iter().sum();
        if total <= 0.0 {
            break;
        }
        w.iter_mut().for_each(|x| *x /= total);
        let diff = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = w;
        if diff < 1e-16 {
            break;
        }
    }
    v
}

pub fn pf_analysis(s: &IntMatrix) -> Result<SpectralReport> {
    let m = s.len();
    if m == 0 || s.iter().any(|r| r.len() != m) {
        return Err(Error::Dimension("matrix must be square and nonempty".into()));
    }
    if !is_nonnegative(s) {
        return Err(Error::NegativeEntry);
    }
    if s.iter().flatten().all(|&x| x == 0) {
        return Err(Error::ZeroMatrix);
    }
    let cp = charpoly(s);
    let eigenvalues = isolate_roots(&cp, ROOT_PRECISION)?;
    let pf = eigenvalues.iter().filter(|e| e.is_real()).map(|e| e.center.re).fold(f64::NEG_INFINITY, f64::max);
    let radius = eigenvalues.iter().map(|e| e.center.norm()).fold(0.0, f64::max);
    let exponent = primitivity_exponent(s);
    Ok(SpectralReport {
        charpoly: cp,
        eigenvalues,
        pf_eigenvalue: pf,
        pf_radius: radius,
        right: pf_vector(s),
        left: pf_vector(&transpose(s)),
        primitive: exponent.is_some(),
        exponent,
    })
}

/// ‖aⁿ x‖ for n = 0..=N, where x is given by integer power-basis coordinates.
pub fn power_mod1_test(a: &AlgebraicInteger, x: &[i64], n: usize) -> Result<Vec<f64>> {
    let field = NumberField::new(a.clone())?;
    if x.len() != field.degree() {
        return Err(Error::Dimension(format!("x needs {} coordinates, got {}", field.degree(), x.len())));
    }
    power_mod1_elem(&field, &field.from_coords(x), &field.beta(), n)
}

/// ‖cⁿ y‖ for n = 0..=N with c and y in the field.
pub fn power_mod1_elem(field: &NumberField, y: &Elem, c: &Elem, n: usize) -> Result<Vec<f64>> {
    let mut cur = y.clone();
    let mut out = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        out.push(field.dist_to_int(&cur, 1e-12)?);
        cur = field.mul(&cur, c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_matrix() {
        let r = pf_analysis(&vec![vec![1, 1], vec![1, 0]]).unwrap();
        assert!(r.primitive);
        assert!((r.pf_eigenvalue - 1.618_033_988_749_895).abs() < 1e-12);
        assert!((r.right[0] / r.right[1] - 1.618_033_988_749_895).abs() < 1e-9);
    }

    #[test]
    fn permutation_not_primitive() {
        let r = pf_analysis(&vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(!r.primitive);
        assert!((r.pf_eigenvalue - 1.0).abs() < 1e-12);
        assert!(matches!(pf_analysis(&vec![vec![0]]), Err(Error::ZeroMatrix)));
    }

    #[test]
    fn golden_powers() {
        let phi = AlgebraicInteger::largest_real(IntPolynomial::from_i64(&[-1, -1, 1])).unwrap();
        let d = power_mod1_test(&phi, &[1, 0], 20).unwrap();
        // Lucas numbers: φⁿ + ψⁿ is an integer, so ‖φⁿ‖ = |ψ|ⁿ for n ≥ 2.
        for (k, v) in d.iter().enumerate().skip(2) {
            assert!((v - 0.618_033_988_749_895f64.powi(k as i32)).abs() < 1e-9);
        }
        let two = AlgebraicInteger::integer(2);
        assert!(power_mod1_test(&two, &[1], 5).unwrap().iter().all(|&v| v == 0.0));
    }
}
