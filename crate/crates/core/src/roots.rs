//! Certified complex root isolation for integer polynomials.
//!
//! Roots are approximated by Aberth iteration in double precision and then
//! certified with Weierstrass inclusion disks whose radii include a rounding
//! bound for the Horner evaluation. Real roots additionally carry an exact
//! rational isolating interval that can be refined by bisection.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::IntPolynomial;

const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// A certified enclosure of one distinct root.
#[derive(Clone, Debug)]
pub struct RootEnclosure {
    pub center: Complex64,
    pub radius: f64,
    pub multiplicity: usize,
    /// Square-free factor the root belongs to.
    pub factor: IntPolynomial,
    /// Exact isolating interval for real roots.
    pub interval: Option<(BigRational, BigRational)>,
}

impl RootEnclosure {
    pub fn is_real(&self) -> bool {
        self.interval.is_some()
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() <= self.radius
    }

    /// Bounds on the modulus of the enclosed root.
    pub fn modulus_bounds(&self) -> (f64, f64) {
        let m = self.center.norm();
        ((m - self.radius).max(0.0), m + self.radius)
    }

    /// Shrink a real enclosure to width at most `2 * tol` by exact bisection.
    pub fn refine_real(&mut self, tol: f64) -> Result<()> {
        let (a, b) = match &self.interval {
            Some(iv) => iv.clone(),
            None => return Ok(()),
        };
        let (a, b) = refine_interval(&self.factor, a, b, tol)?;
        let lo = a.to_f64().unwrap_or(f64::NAN);
        let hi = b.to_f64().unwrap_or(f64::NAN);
        self.center = Complex64::new(0.5 * (lo + hi), 0.0);
        self.radius = 0.5 * (hi - lo) + (lo.abs().max(hi.abs())) * f64::EPSILON;
        self.interval = Some((a, b));
        Ok(())
    }
}

/// Bisect an isolating interval of a square-free polynomial until its width is at most `2 * tol`.
pub fn refine_interval(
    f: &IntPolynomial,
    mut a: BigRational,
    mut b: BigRational,
    tol: f64,
) -> Result<(BigRational, BigRational)> {
    let target = BigRational::from_f64(2.0 * tol).ok_or(Error::InvalidPrecision(tol))?;
    let mut sa = f.eval_rational(&a).signum();
    if sa.is_zero() {
        return Ok((a.clone(), a));
    }
    let mut steps = 0;
    while &b - &a > target {
        let mid = (&a + &b) / BigRational::from_integer(BigInt::from(2));
        let sm = f.eval_rational(&mid).signum();
        if sm.is_zero() {
            return Ok((mid.clone(), mid));
        }
        if sm == sa {
            a = mid;
            sa = sm;
        } else {
            b = mid;
        }
        steps += 1;
        if steps > 4000 {
            return Err(Error::PrecisionExhausted("bisection step cap".into()));
        }
    }
    Ok((a, b))
}

/// Certified enclosures of the distinct roots of a monic polynomial, in canonical order
/// (real part, then imaginary part).
pub fn isolate_roots(p: &IntPolynomial, precision: f64) -> Result<Vec<RootEnclosure>> {
    if precision.is_nan() || precision <= 0.0 || !precision.is_finite() {
        return Err(Error::InvalidPrecision(precision));
    }
    if !p.is_monic() || p.degree().unwrap_or(0) < 1 {
        return Err(Error::InvalidPolynomial(format!("{p} must be monic of degree >= 1")));
    }
    let mut out = Vec::new();
    for (factor, mult) in p.square_free_decomposition() {
        for mut enc in isolate_square_free(&factor)? {
            enc.multiplicity = mult;
            out.push(enc);
        }
    }
    check_disjoint(&out)?;
    for enc in &mut out {
        if enc.radius > precision {
            if enc.is_real() {
                enc.refine_real(precision * 0.5)?;
            }
            if enc.radius > precision {
                return Err(Error::PrecisionExhausted(format!(
                    "root near {} certified only to radius {:.3e}",
                    enc.center, enc.radius
                )));
            }
        }
    }
    out.sort_by(canonical_cmp);
    Ok(out)
}

/// Canonical order on enclosures: real part, then imaginary part.
pub fn canonical_cmp(a: &RootEnclosure, b: &RootEnclosure) -> Ordering {
    a.center
        .re
        .partial_cmp(&b.center.re)
        .unwrap_or(Ordering::Equal)
        .then(a.center.im.partial_cmp(&b.center.im).unwrap_or(Ordering::Equal))
}

fn check_disjoint(encs: &[RootEnclosure]) -> Result<()> {
    for i in 0..encs.len() {
        for j in i + 1..encs.len() {
            let d = (encs[i].center - encs[j].center).norm();
            if d <= encs[i].radius + encs[j].radius {
                return Err(Error::Certification(format!(
                    "enclosures around {} and {} overlap",
                    encs[i].center, encs[j].center
                )));
            }
        }
    }
    Ok(())
}

fn isolate_square_free(f: &IntPolynomial) -> Result<Vec<RootEnclosure>> {
    let f = if f.leading().is_negative() { f.neg() } else { f.clone() };
    let n = f.degree().unwrap_or(0);
    if n == 1 {
        let root = BigRational::new(-f.coeff(0), f.coeff(1));
        let x = root.to_f64().unwrap_or(f64::NAN);
        return Ok(vec![RootEnclosure {
            center: Complex64::new(x, 0.0),
            radius: x.abs() * f64::EPSILON,
            multiplicity: 1,
            factor: f.clone(),
            interval: Some((root.clone(), root)),
        }]);
    }
    let mut z = aberth(&f)?;
    symmetrize(&mut z);
    let radii = inclusion_radii(&f, &z);
    let mut out: Vec<RootEnclosure> = z
        .iter()
        .zip(&radii)
        .map(|(&c, &r)| RootEnclosure { center: c, radius: r, multiplicity: 1, factor: f.clone(), interval: None })
        .collect();
    check_disjoint(&out)?;
    for i in 0..out.len() {
        let c = out[i].center;
        let r = out[i].radius;
        if c.im.abs() > r {
            continue;
        }
        let conj_isolated = out.iter().enumerate().all(|(j, e)| j == i || (c.conj() - e.center).norm() > r + e.radius);
        if !conj_isolated {
            continue;
        }
        let a = BigRational::from_f64(c.re - r).ok_or_else(|| cert_err(c))?;
        let b = BigRational::from_f64(c.re + r).ok_or_else(|| cert_err(c))?;
        let sa = f.eval_rational(&a).signum();
        let sb = f.eval_rational(&b).signum();
        let interval = if sa.is_zero() {
            (a.clone(), a)
        } else if sb.is_zero() {
            (b.clone(), b)
        } else if sa != sb {
            (a, b)
        } else {
            return Err(cert_err(c));
        };
        out[i].center = Complex64::new(c.re, 0.0);
        out[i].interval = Some(interval);
    }
    Ok(out)
}

fn cert_err(c: Complex64) -> Error {
    Error::Certification(format!("cannot certify real root near {c}"))
}

fn aberth(f: &IntPolynomial) -> Result<Vec<Complex64>> {
    let n = f.degree().unwrap_or(0);
    let fp = f.derivative();
    let lead = f.leading().to_f64().unwrap_or(1.0);
    // Fujiwara-type bound on root moduli.
    let bound = (0..n)
        .map(|k| {
            let c = (f.coeff(k).to_f64().unwrap_or(f64::INFINITY) / lead).abs();
            2.0 * c.powf(1.0 / (n - k) as f64)
        })
        .fold(0.0, f64::max)
        .max(1.0);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            Complex64::from_polar(0.5 * bound, t)
        })
        .collect();
    for _ in 0..2000 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let pz = f.eval_complex(z[i]);
            if pz.norm() == 0.0 {
                continue;
            }
            let ratio = pz / fp.eval_complex(z[i]);
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                max_step = max_step.max(w.norm() / z[i].norm().max(1e-300));
            }
        }
        if max_step < 1e-17 {
            break;
        }
    }
    // A few Newton steps to settle into the attainable accuracy.
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let d = fp.eval_complex(*zi);
            if d.norm() == 0.0 {
                break;
            }
            let step = f.eval_complex(*zi) / d;
            if step.is_finite() {
                *zi -= step;
            }
        }
    }
    if z.iter().any(|w| !w.is_finite()) {
        return Err(Error::Certification("root iteration diverged".into()));
    }
    Ok(z)
}

/// Pair approximations into exact conjugates and pin near-real ones to the axis.
fn symmetrize(z: &mut [Complex64]) {
    let n = z.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] || z[i].im.abs() < 1e-300 {
            continue;
        }
        let best = (0..n).filter(|&j| j != i && !used[j]).min_by(|&a, &b| {
            (z[a] - z[i].conj()).norm().partial_cmp(&(z[b] - z[i].conj()).norm()).unwrap_or(Ordering::Equal)
        });
        if let Some(j) = best {
            let tol = 1e-6 * z[i].norm().max(1.0);
            if (z[j] - z[i].conj()).norm() < tol && z[i].im.abs() > tol {
                let m = 0.5 * (z[i] + z[j].conj());
                let m = if m.im > 0.0 { m } else { m.conj() };
                z[i] = m;
                z[j] = m.conj();
                used[i] = true;
                used[j] = true;
            }
        }
    }
}

fn inclusion_radii(f: &IntPolynomial, z: &[Complex64]) -> Vec<f64> {
    let n = z.len();
    let lead = f.leading().to_f64().unwrap_or(1.0);
    let gamma = 8.0 * (n as f64 + 2.0) * UNIT_ROUNDOFF;
    (0..n)
        .map(|i| {
            let val = f.eval_complex(z[i]).norm() + gamma * f.abs_eval(z[i].norm());
            let mut denom = lead.abs();
            for j in 0..n {
                if j != i {
                    denom *= (z[i] - z[j]).norm();
                }
            }
            let denom = denom * (1.0 - gamma);
            let r = (n as f64) * val / denom;
            r * (1.0 + 1e-9) + f64::MIN_POSITIVE
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roots(c: &[i64]) -> Vec<RootEnclosure> {
        isolate_roots(&IntPolynomial::from_i64(c), 1e-12).unwrap()
    }

    #[test]
    fn golden_ratio() {
        let r = roots(&[-1, -1, 1]);
        assert_eq!(r.len(), 2);
        assert!((r[0].center.re + 0.618_033_988_749_895).abs() < 1e-12);
        assert!((r[1].center.re - 1.618_033_988_749_895).abs() < 1e-12);
        assert!(r.iter().all(RootEnclosure::is_real));
    }

    #[test]
    fn linear_is_exact() {
        let r = roots(&[-2, 1]);
        assert_eq!(r[0].interval.as_ref().unwrap().0, BigRational::from_integer(2.into()));
    }

    #[test]
    fn salem_quartic() {
        let r = roots(&[1, -1, -1, -1, 1]);
        assert_eq!(r.len(), 4);
        let on_circle = r.iter().filter(|e| (e.center.norm() - 1.0).abs() < 1e-9).count();
        assert_eq!(on_circle, 2);
        assert!(r[0].center.im == -r[1].center.im || r[1].center.im == -r[2].center.im);
    }

    #[test]
    fn multiplicities_sum_to_degree() {
        // (x-1)^2 (x^2+1)
        let p = IntPolynomial::from_i64(&[1, -2, 2, -2, 1]);
        let r = isolate_roots(&p, 1e-10).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r.iter().map(|e| e.multiplicity).sum::<usize>(), 4);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(isolate_roots(&IntPolynomial::from_i64(&[1, 2]), 1e-6).is_err());
        assert!(isolate_roots(&IntPolynomial::from_i64(&[1, 1]), 0.0).is_err());
    }
}
