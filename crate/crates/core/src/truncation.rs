//! Frobenius series of the radial equation and its truncation condition.
//!
//! With `u = x^s exp(-b x/2 - x²/2) Σ c_j x^j` the coefficients obey
//! `c_{j+2} = A_j c_{j+1} + B_j c_j`, `c_{-1} = 0`, `c_0 = 1`. The series
//! terminates at degree `n` when `B_n = 0` and `c_{n+1} = 0`; the first fixes
//! `W = 2(n+s+1) - b²/4`, the second is a polynomial equation of degree
//! `n+1` in whichever of `a`, `b` is left free.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, RadialWavefunction};
use crate::poly::{find_real_roots, Polynomial};

/// Default acceptance tolerance for real roots of truncation polynomials.
pub const ROOT_TOL: f64 = 1e-9;

fn denominator(j: i64, s: f64) -> f64 {
    let j = j as f64;
    (j + 2.0) * (j + 2.0 * (s + 1.0))
}

/// `A_j = [2a + b(2j+2s+3)] / [2(j+2)(j+2(s+1))]`
pub fn recur_a(j: i64, s: f64, a: f64, b: f64) -> f64 {
    assert!(j >= -1, "A_j defined for j >= -1");
    (2.0 * a + b * (2.0 * j as f64 + 2.0 * s + 3.0)) / (2.0 * denominator(j, s))
}

/// `B_j = [4(2j+2s-W+2) - b²] / [4(j+2)(j+2(s+1))]`
pub fn recur_b(j: i64, s: f64, b: f64, w: f64) -> f64 {
    assert!(j >= 0, "B_j needed only for j >= 0");
    (4.0 * (2.0 * j as f64 + 2.0 * s - w + 2.0) - b * b) / (4.0 * denominator(j, s))
}

/// `B_j` on the truncation energy of order `n`: `2(j-n) / [(j+2)(j+2(s+1))]`.
pub fn recur_b_truncated(j: i64, n: usize, s: f64) -> f64 {
    2.0 * (j - n as i64) as f64 / denominator(j, s)
}

/// Series coefficients `c_0..=c_jmax` at energy `w`.
pub fn series_coefficients(p: &ModelParams, w: f64, jmax: usize) -> Result<Vec<f64>> {
    let s = p.s();
    let mut c = Vec::with_capacity(jmax + 1);
    c.push(1.0);
    if jmax >= 1 {
        c.push(recur_a(-1, s, p.a, p.b));
    }
    for j in 0..jmax.saturating_sub(1) {
        let next = recur_a(j as i64, s, p.a, p.b) * c[j + 1] + recur_b(j as i64, s, p.b, w) * c[j];
        if !next.is_finite() {
            return Err(Error::Overflow { index: j + 2 });
        }
        c.push(next);
    }
    if !c[jmax.min(1)].is_finite() {
        return Err(Error::Overflow { index: 1 });
    }
    Ok(c)
}

/// `W_s^{(n)} = 2(n+s+1) - b²/4`
pub fn truncation_energy(n: usize, s: f64, b: f64) -> f64 {
    2.0 * (n as f64 + s + 1.0) - 0.25 * b * b
}

/// Which of `a`, `b` is held fixed while the other solves `c_{n+1} = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FixedParam {
    /// `a` fixed at the value; the root variable is `b`.
    A(f64),
    /// `b` fixed at the value; the root variable is `a`.
    B(f64),
}

impl FixedParam {
    pub fn free(&self) -> FreeParam {
        match self {
            FixedParam::A(_) => FreeParam::B,
            FixedParam::B(_) => FreeParam::A,
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            FixedParam::A(v) | FixedParam::B(v) => v,
        }
    }

    /// `(a, b)` with the free variable set to `root`.
    pub fn point(&self, root: f64) -> (f64, f64) {
        match *self {
            FixedParam::A(a) => (a, root),
            FixedParam::B(b) => (root, b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FreeParam {
    A,
    B,
}

impl FreeParam {
    pub fn name(&self) -> &'static str {
        match self {
            FreeParam::A => "a",
            FreeParam::B => "b",
        }
    }
}

/// `c_{n+1}` as a polynomial in the free parameter, up to a positive factor.
///
/// On the truncation energy `B_j` no longer depends on `b`, so only `A_j`
/// carries the free variable. Both running coefficients are rescaled by the
/// largest magnitude after every step; the roots are unaffected.
pub fn truncation_polynomial(n: usize, s: f64, fixed: FixedParam) -> Polynomial {
    let a_coefficient = |j: i64| -> Polynomial {
        let d = 2.0 * denominator(j, s);
        let slope_b = (2.0 * j as f64 + 2.0 * s + 3.0) / d;
        match fixed {
            FixedParam::B(b) => Polynomial::linear(b * slope_b, 2.0 / d),
            FixedParam::A(a) => Polynomial::linear(2.0 * a / d, slope_b),
        }
    };
    let mut prev = Polynomial::constant(1.0);
    let mut cur = a_coefficient(-1);
    for j in 0..n as i64 {
        let next = &(&a_coefficient(j) * &cur) + &prev.scale(recur_b_truncated(j, n, s));
        let m = next.max_abs_coeff();
        prev = cur.scale(1.0 / m);
        cur = next.scale(1.0 / m);
    }
    cur
}

/// One exact polynomial eigenfunction on a truncation curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationSolution {
    pub n: usize,
    pub s: f64,
    pub fixed: FixedParam,
    pub root: f64,
    /// Rank of the root, 1 for the largest.
    pub index: usize,
    pub w: f64,
    /// `c_0..=c_n`
    pub poly_coeffs: Vec<f64>,
}

impl TruncationSolution {
    pub fn free(&self) -> FreeParam {
        self.fixed.free()
    }

    pub fn a(&self) -> f64 {
        self.fixed.point(self.root).0
    }

    pub fn b(&self) -> f64 {
        self.fixed.point(self.root).1
    }

    pub fn params(&self) -> ModelParams {
        ModelParams::from_s(self.s, self.a(), self.b()).expect("finite truncation root")
    }

    pub fn wavefunction(&self) -> RadialWavefunction {
        RadialWavefunction::new(self.s, self.b(), self.poly_coeffs.clone())
            .expect("truncation coefficients start at c_0 = 1")
    }

    /// Variational band this point lies on.
    pub fn band(&self) -> usize {
        self.index - 1
    }
}

/// All real roots of `c_{n+1}` with their eigenvalues and eigenfunctions,
/// ordered by descending root.
pub fn truncation_solutions(n: usize, s: f64, fixed: FixedParam) -> Result<Vec<TruncationSolution>> {
    let q = truncation_polynomial(n, s, fixed);
    let roots = find_real_roots(&q, ROOT_TOL)?;
    if roots.len() != n + 1 {
        return Err(Error::RootCount {
            expected: n + 1,
            found: roots.len(),
        });
    }
    roots
        .into_iter()
        .enumerate()
        .map(|(k, root)| {
            let (a, b) = fixed.point(root);
            let w = truncation_energy(n, s, b);
            let p = ModelParams::from_s(s, a, b)?;
            let poly_coeffs = series_coefficients(&p, w, n)?;
            Ok(TruncationSolution {
                n,
                s,
                fixed,
                root,
                index: k + 1,
                w,
                poly_coeffs,
            })
        })
        .collect()
}

/// Factorization `q(x) = x^{j_n} Q(x²)` of a symmetric-case truncation
/// polynomial, with `j_n = 1` for even `n` and `0` for odd `n`.
pub fn parity_structure(n: usize, q: &Polynomial) -> Result<(usize, Polynomial)> {
    let j_n = if n.is_multiple_of(2) { 1 } else { 0 };
    let scale = q.max_abs_coeff();
    let mut reduced = Vec::new();
    for (k, &c) in q.coeffs().iter().enumerate() {
        if k % 2 == j_n {
            reduced.push(c);
        } else if c.abs() > 1e-10 * scale {
            return Err(Error::Parity { degree: k, value: c });
        }
    }
    Ok((j_n, Polynomial::new(reduced)))
}
