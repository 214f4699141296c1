//! Exact linear algebra over Q and Z, and matrices over a number field.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{Elem, NumberField};
use crate::poly::IntPolynomial;

pub type IntMatrix = Vec<Vec<i64>>;
pub type RatMatrix = Vec<Vec<BigRational>>;
pub type FieldMatrix = Vec<Vec<Elem>>;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(a: &mut RatMatrix) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(a: &RatMatrix) -> usize {
    let mut m = a.clone();
    rref(&mut m).len()
}

/// Unique solution of A x = b for a possibly overdetermined system, if it exists.
pub fn solve_rational(a: &RatMatrix, b: &[BigRational]) -> Option<Vec<BigRational>> {
    let cols = a.first().map_or(0, Vec::len);
    let mut aug: RatMatrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&cols) || pivots.len() != cols {
        return None;
    }
    Some((0..cols).map(|k| aug[k][cols].clone()).collect())
}

pub fn inverse_rational(a: &RatMatrix) -> Option<RatMatrix> {
    let n = a.len();
    let mut aug: RatMatrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn det_rational(a: &RatMatrix) -> BigRational {
    let n = a.len();
    let mut m = a.clone();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for i in c + 1..n {
            let f = &m[i][c] / &m[c][c];
            for j in c..n {
                let t = &f * &m[c][j];
                m[i][j] -= t;
            }
        }
    }
    det
}

pub fn to_rational(a: &IntMatrix) -> RatMatrix {
    a.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn int_mul(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![0i64; m]; n];
    for i in 0..n {
        for j in 0..m {
            let mut s: i64 = 0;
            for t in 0..k {
                s = a[i][t]
                    .checked_mul(b[t][j])
                    .and_then(|p| s.checked_add(p))
                    .ok_or_else(|| Error::Unsupported("integer overflow in matrix product".into()))?;
            }
            out[i][j] = s;
        }
    }
    Ok(out)
}

pub fn int_pow(a: &IntMatrix, k: usize) -> Result<IntMatrix> {
    let mut out = identity(a.len());
    for _ in 0..k {
        out = int_mul(&out, a)?;
    }
    Ok(out)
}

pub fn int_apply(a: &IntMatrix, v: &[i64]) -> Result<Vec<i64>> {
    a.iter()
        .map(|row| {
            row.iter().zip(v).try_fold(0i64, |s, (x, y)| {
                x.checked_mul(*y)
                    .and_then(|p| s.checked_add(p))
                    .ok_or_else(|| Error::Unsupported("integer overflow in matrix action".into()))
            })
        })
        .collect()
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Companion matrix with ones on the subdiagonal and last column −c_0, …, −c_{s−1}.
pub fn companion(p: &IntPolynomial) -> Result<IntMatrix> {
    let s = p.degree().unwrap_or(0);
    if !p.is_monic() || s == 0 {
        return Err(Error::InvalidPolynomial(format!("{p} must be monic of degree >= 1")));
    }
    let mut m = vec![vec![0i64; s]; s];
    for i in 1..s {
        m[i][i - 1] = 1;
    }
    for i in 0..s {
        m[i][s - 1] = (-p.coeff(i)).to_i64().ok_or_else(|| Error::Unsupported("coefficient exceeds i64".into()))?;
    }
    Ok(m)
}

/// Characteristic polynomial det(xI − A) by the Faddeev–LeVerrier recursion.
pub fn charpoly(a: &IntMatrix) -> IntPolynomial {
    let n = a.len();
    let ar = to_rational(a);
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut m: RatMatrix = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for t in 0..n {
                    s += &ar[i][t] * &m[t][j];
                }
                next[i][j] = s;
            }
            next[i][i] += &coeffs[n - k + 1];
        }
        m = next;
        let mut tr = BigRational::zero();
        for i in 0..n {
            for t in 0..n {
                tr += &ar[i][t] * &m[t][i];
            }
        }
        coeffs[n - k] = -tr / rat(k as i64);
    }
    IntPolynomial::new(coeffs.iter().map(|c| c.to_integer()).collect())
}

/// Linear map from Q^s to (field)^d given by columns of `v`, written out on rational coordinates.
fn frame_system(field: &NumberField, v: &FieldMatrix) -> RatMatrix {
    let d = v.len();
    let s = v.first().map_or(0, Vec::len);
    let deg = field.degree();
    let mut a = Vec::with_capacity(d * deg);
    for row in v.iter().take(d) {
        for t in 0..deg {
            a.push((0..s).map(|j| row[j].0[t].clone()).collect());
        }
    }
    a
}

fn flatten(field: &NumberField, w: &[Elem]) -> Vec<BigRational> {
    let deg = field.degree();
    w.iter().flat_map(|e| (0..deg).map(move |t| e.0[t].clone())).collect()
}

/// Rank over Q of the generators given by the columns of `v` (viewed as a Q-linear map).
pub fn frame_rank(field: &NumberField, v: &FieldMatrix) -> usize {
    rank(&frame_system(field, v))
}

/// Rational coordinates n with V n = w, when they exist and are unique.
pub fn frame_coordinates(field: &NumberField, v: &FieldMatrix, w: &[Elem]) -> Option<Vec<BigRational>> {
    solve_rational(&frame_system(field, v), &flatten(field, w))
}

pub fn field_apply(field: &NumberField, q: &FieldMatrix, x: &[Elem]) -> Vec<Elem> {
    q.iter().map(|row| row.iter().zip(x).fold(field.zero(), |acc, (a, b)| field.add(&acc, &field.mul(a, b)))).collect()
}

/// The integer matrix M with QV = VM.
pub fn induced_integer_matrix(field: &NumberField, q: &FieldMatrix, v: &FieldMatrix) -> Result<IntMatrix> {
    let d = v.len();
    let s = v.first().map_or(0, Vec::len);
    if q.len() != d || q.iter().any(|r| r.len() != d) {
        return Err(Error::Dimension(format!("Q must be {d}x{d}")));
    }
    if frame_rank(field, v) != s {
        return Err(Error::DependentFrame("columns of V have a rational relation".into()));
    }
    let mut m = vec![vec![0i64; s]; s];
    for j in 0..s {
        let col: Vec<Elem> = (0..d).map(|r| v[r][j].clone()).collect();
        let qv = field_apply(field, q, &col);
        let x = frame_coordinates(field, v, &qv)
            .ok_or_else(|| Error::NotInvariant(format!("Q v_{j} is outside the span of V")))?;
        for (i, xi) in x.iter().enumerate() {
            if !xi.is_integer() {
                return Err(Error::NotInvariant(format!("Q v_{j} has non-integer coordinate {xi}")));
            }
            m[i][j] = xi.to_integer().to_i64().ok_or_else(|| Error::Unsupported("matrix entry exceeds i64".into()))?;
        }
    }
    Ok(m)
}

/// Scalar multiplication by `a` as a d×d field matrix.
pub fn scalar_matrix(field: &NumberField, a: &Elem, d: usize) -> FieldMatrix {
    (0..d).map(|i| (0..d).map(|j| if i == j { a.clone() } else { field.zero() }).collect()).collect()
}

pub fn field_det(field: &NumberField, a: &FieldMatrix) -> Result<Elem> {
    let n = a.len();
    let mut m = a.clone();
    let mut det = field.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Ok(field.zero());
        };
        if p != c {
            m.swap(p, c);
            det = field.neg(&det);
        }
        det = field.mul(&det, &m[c][c]);
        let inv = field.inv(&m[c][c])?;
        for i in c + 1..n {
            let f = field.mul(&m[i][c], &inv);
            for j in c..n {
                let t = field.mul(&f, &m[c][j]);
                m[i][j] = field.sub(&m[i][j], &t);
            }
        }
    }
    Ok(det)
}

pub fn field_inverse(field: &NumberField, a: &FieldMatrix) -> Result<FieldMatrix> {
    let n = a.len();
    let mut m: FieldMatrix = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { field.one() } else { field.zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero()).ok_or(Error::Singular)?;
        m.swap(p, c);
        let inv = field.inv(&m[c][c])?;
        for j in 0..2 * n {
            m[c][j] = field.mul(&m[c][j], &inv);
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..2 * n {
                    let t = field.mul(&f, &m[c][j]);
                    m[i][j] = field.sub(&m[i][j], &t);
                }
            }
        }
    }
    Ok(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Basis (as columns) of the right kernel of a field matrix.
pub fn field_kernel(field: &NumberField, a: &FieldMatrix) -> Result<FieldMatrix> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(p, r);
        let inv = field.inv(&m[r][c])?;
        for j in 0..cols {
            m[r][j] = field.mul(&m[r][j], &inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = field.mul(&f, &m[r][j]);
                    m[i][j] = field.sub(&m[i][j], &t);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = vec![vec![field.zero(); free.len()]; cols];
    for (k, &fc) in free.iter().enumerate() {
        basis[fc][k] = field.one();
        for (row, &pc) in pivots.iter().enumerate() {
            basis[pc][k] = field.neg(&m[row][fc]);
        }
    }
    Ok(basis)
}

pub fn field_to_f64(field: &NumberField, a: &FieldMatrix) -> Vec<Vec<f64>> {
    a.iter().map(|r| r.iter().map(|e| field.to_f64(e)).collect()).collect()
}

/// Solve a small dense real system by Gaussian elimination with partial pivoting.
pub fn solve_f64(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(r, &bi)| {
            let mut row = r.clone();
            row.push(bi);
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() < 1e-300 {
            return None;
        }
        m.swap(p, c);
        for i in 0..n {
            if i != c {
                let f = m[i][c] / m[c][c];
                for j in c..=n {
                    m[i][j] -= f * m[c][j];
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

pub fn max_abs(a: &IntMatrix) -> i64 {
    a.iter().flatten().map(|x| x.abs()).max().unwrap_or(0)
}

pub fn is_nonnegative(a: &IntMatrix) -> bool {
    a.iter().flatten().all(|x| !x.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(c: &[i64]) -> NumberField {
        NumberField::from_poly(IntPolynomial::from_i64(c)).unwrap()
    }

    #[test]
    fn companion_layout() {
        let m = companion(&IntPolynomial::from_i64(&[-1, -1, 1])).unwrap();
        assert_eq!(m, vec![vec![0, 1], vec![1, 1]]);
        assert_eq!(charpoly(&m), IntPolynomial::from_i64(&[-1, -1, 1]));
    }

    #[test]
    fn charpoly_of_permutation() {
        assert_eq!(charpoly(&vec![vec![0, 1], vec![1, 0]]), IntPolynomial::from_i64(&[-1, 0, 1]));
    }

    #[test]
    fn induced_golden() {
        let k = field(&[-1, -1, 1]);
        let q = scalar_matrix(&k, &k.beta(), 1);
        let v = vec![vec![k.one(), k.beta()]];
        assert_eq!(induced_integer_matrix(&k, &q, &v).unwrap(), vec![vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn induced_silver() {
        let k = field(&[-2, 0, 1]);
        let q = scalar_matrix(&k, &k.from_coords(&[1, 1]), 1);
        let v = vec![vec![k.one(), k.beta()]];
        assert_eq!(induced_integer_matrix(&k, &q, &v).unwrap(), vec![vec![1, 2], vec![1, 1]]);
    }

    #[test]
    fn induced_rejects_non_invariant() {
        let k = NumberField::rationals();
        let q = scalar_matrix(&k, &k.from_rational(BigRational::new(1.into(), 2.into())), 1);
        let v = vec![vec![k.one()]];
        assert!(matches!(induced_integer_matrix(&k, &q, &v), Err(Error::NotInvariant(_))));
    }

    #[test]
    fn inverse_and_det() {
        let a = to_rational(&vec![vec![2, 1], vec![1, 1]]);
        assert_eq!(det_rational(&a), rat(1));
        let inv = inverse_rational(&a).unwrap();
        assert_eq!(inv, to_rational(&vec![vec![1, -1], vec![-1, 2]]));
    }
}
