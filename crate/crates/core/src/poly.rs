//! Real univariate polynomials and a companion-matrix real-root finder.

use std::ops::{Add, Mul};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Polynomial with coefficients in ascending degree; trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `c0 + c1·x`
    pub fn linear(c0: f64, c1: f64) -> Self {
        Self::new(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Value and first derivative by Horner's scheme.
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &c in self.coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Divides by the largest coefficient magnitude.
    pub fn normalized(&self) -> Self {
        let m = self.max_abs_coeff();
        if m == 0.0 {
            self.clone()
        } else {
            self.scale(1.0 / m)
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let c = (0..n)
            .map(|k| self.coeffs.get(k).unwrap_or(&0.0) + rhs.coeffs.get(k).unwrap_or(&0.0))
            .collect();
        Polynomial::new(c)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut c = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            for (j, y) in rhs.coeffs.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        Polynomial::new(c)
    }
}

/// Parlett-Reinsch balancing with radix 2, in place.
fn balance(m: &mut DMatrix<f64>) {
    const RADIX: f64 = 2.0;
    let n = m.nrows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

fn polish(q: &Polynomial, mut x: f64) -> f64 {
    let mut best = q.eval(x).abs();
    for _ in 0..20 {
        let (p, dp) = q.eval_with_derivative(x);
        if dp == 0.0 || p == 0.0 {
            break;
        }
        let next = x - p / dp;
        let val = q.eval(next).abs();
        if val < best {
            best = val;
            x = next;
        } else {
            break;
        }
    }
    x
}

/// All real roots of `q`, strictly descending.
///
/// Eigenvalues of the balanced companion matrix are accepted as real when
/// `|Im| ≤ tol·(1 + |Re|)`, refined by Newton steps on `q`, and merged when
/// closer than `tol·(1 + |r|)`. Exact zero low-order coefficients are peeled
/// off as the root 0.
pub fn find_real_roots(q: &Polynomial, tol: f64) -> Result<Vec<f64>> {
    let degree = match q.degree() {
        Some(d) if d >= 1 => d,
        _ => return domain("root finding needs a polynomial of degree >= 1"),
    };
    let zeros = q.coeffs().iter().take_while(|&&c| c == 0.0).count();
    let reduced = Polynomial::new(q.coeffs()[zeros..].to_vec());
    let mut roots = Vec::with_capacity(degree);
    if zeros > 0 {
        roots.push(0.0);
    }
    if let Some(d) = reduced.degree().filter(|&d| d >= 1) {
        let lead = reduced.leading();
        let mut companion = DMatrix::<f64>::zeros(d, d);
        for k in 0..d {
            companion[(0, k)] = -reduced.coeffs()[d - 1 - k] / lead;
        }
        for k in 1..d {
            companion[(k, k - 1)] = 1.0;
        }
        balance(&mut companion);
        for z in companion.complex_eigenvalues().iter() {
            if z.im.abs() <= tol * (1.0 + z.re.abs()) {
                roots.push(polish(&reduced, z.re));
            }
        }
    }
    roots.sort_by(|x, y| y.total_cmp(x));
    roots.dedup_by(|later, kept| (*kept - *later).abs() <= tol * (1.0 + kept.abs()));
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn trims_trailing_zeros() {
        let p = Polynomial::new(vec![1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(Polynomial::new(vec![0.0]).degree(), None);
    }

    #[test]
    fn arithmetic() {
        let p = Polynomial::linear(1.0, 1.0);
        let q = &p * &p;
        assert_eq!(q.coeffs(), &[1.0, 2.0, 1.0]);
        let r = &q + &Polynomial::constant(-1.0);
        assert_eq!(r.coeffs(), &[0.0, 2.0, 1.0]);
        let (v, d) = q.eval_with_derivative(2.0);
        assert_eq!((v, d), (9.0, 6.0));
    }

    #[test]
    fn quadratic_roots() {
        let q = Polynomial::new(vec![-0.5, 0.0, 0.25]);
        let r = find_real_roots(&q, 1e-9).unwrap();
        assert_eq!(r.len(), 2);
        assert_relative_eq!(r[0], 2f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(r[1], -(2f64.sqrt()), epsilon = 1e-14);
    }

    #[test]
    fn cubic_roots_with_zero() {
        // (a/36)(a² - 12)
        let q = Polynomial::new(vec![0.0, -12.0 / 36.0, 0.0, 1.0 / 36.0]);
        let r = find_real_roots(&q, 1e-9).unwrap();
        assert_eq!(r.len(), 3);
        assert_relative_eq!(r[0], 12f64.sqrt(), epsilon = 1e-13);
        assert_eq!(r[1], 0.0);
        assert_relative_eq!(r[2], -(12f64.sqrt()), epsilon = 1e-13);
    }

    #[test]
    fn quadratic_in_b() {
        let q = Polynomial::new(vec![-0.5, 0.0, 3.0 / 16.0]);
        let r = find_real_roots(&q, 1e-9).unwrap();
        assert_relative_eq!(r[0], 1.632993, epsilon = 1e-6);
        assert_relative_eq!(r[1], -1.632993, epsilon = 1e-6);
    }

    #[test]
    fn complex_roots_rejected() {
        let q = Polynomial::new(vec![1.0, 0.0, 1.0]);
        assert!(find_real_roots(&q, 1e-9).unwrap().is_empty());
        let mixed = &q * &Polynomial::linear(-3.0, 1.0);
        assert_eq!(find_real_roots(&mixed, 1e-9).unwrap(), vec![3.0]);
    }

    #[test]
    fn constant_rejected() {
        assert!(find_real_roots(&Polynomial::constant(2.0), 1e-9).is_err());
        assert!(find_real_roots(&Polynomial::zero(), 1e-9).is_err());
    }

    #[test]
    fn wide_dynamic_range() {
        // roots 1e-3, 1, 1e3
        let q = &(&Polynomial::linear(-1e-3, 1.0) * &Polynomial::linear(-1.0, 1.0))
            * &Polynomial::linear(-1e3, 1.0);
        let r = find_real_roots(&q, 1e-9).unwrap();
        assert_eq!(r.len(), 3);
        assert_relative_eq!(r[0], 1e3, max_relative = 1e-12);
        assert_relative_eq!(r[1], 1.0, max_relative = 1e-12);
        assert_relative_eq!(r[2], 1e-3, max_relative = 1e-10);
    }

    proptest! {
        #[test]
        fn recovers_distinct_real_roots(mut rs in prop::collection::vec(-5.0f64..5.0, 1..8)) {
            rs.sort_by(|x, y| y.total_cmp(x));
            prop_assume!(rs.windows(2).all(|w| w[0] - w[1] > 0.05));
            let q = rs.iter().fold(Polynomial::constant(1.0), |acc, &r| &acc * &Polynomial::linear(-r, 1.0));
            let found = find_real_roots(&q, 1e-6).unwrap();
            prop_assert_eq!(found.len(), rs.len());
            for (f, r) in found.iter().zip(&rs) {
                prop_assert!((f - r).abs() < 1e-8, "{} vs {}", f, r);
            }
        }
    }
}
