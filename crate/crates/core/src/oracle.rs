//! Finite-difference eigenvalues of the radial problem.
//!
//! With `u = x^s w`, `s = |γ|`, the centrifugal term cancels and
//! `-(x^{2s+1} w')'/x^{2s+1} + (a/x + b x + x²) w = W w`, with `w` smooth at
//! the origin. This is discretized in flux form on the cell centres
//! `x_k = (k - 1/2) h`, with zero flux through `x = 0` and `w = 0` one node
//! past `L`, and symmetrized by `v_k = x_k^{s+1/2} w_k`. The scheme is second
//! order for every `s`; the x^{-s} branch that is square integrable for
//! `s < 1` never enters. Eigenvalues come from Sturm-count bisection.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::ModelParams;

pub const DEFAULT_LENGTH: f64 = 12.0;
pub const DEFAULT_POINTS: usize = 4000;
pub const DECAY_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleGrid {
    pub length: f64,
    pub points: usize,
}

impl Default for OracleGrid {
    fn default() -> Self {
        Self {
            length: DEFAULT_LENGTH,
            points: DEFAULT_POINTS,
        }
    }
}

impl OracleGrid {
    pub fn new(length: f64, points: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return domain(format!("box length must be positive, got {length}"));
        }
        if points < 10 {
            return domain(format!("need at least 10 interior points, got {points}"));
        }
        Ok(Self { length, points })
    }

    /// `h = L/K`; the Dirichlet node sits at `L + h/2`.
    pub fn step(&self) -> f64 {
        self.length / self.points as f64
    }

    /// Same box with the step halved.
    pub fn refined(&self) -> Self {
        Self {
            length: self.length,
            points: 2 * self.points,
        }
    }
}

struct Tridiagonal {
    diag: Vec<f64>,
    /// `off[k]` couples rows `k` and `k + 1`.
    off: Vec<f64>,
}

impl Tridiagonal {
    fn build(p: &ModelParams, grid: &OracleGrid) -> Self {
        let h = grid.step();
        let h2 = h * h;
        let weight = 2.0 * p.s() + 1.0;
        let centre = |k: usize| (k as f64 + 0.5) * h;
        let diag = (0..grid.points)
            .map(|k| {
                let x = centre(k);
                let faces = ((x + 0.5 * h) / x).powf(weight) + ((x - 0.5 * h) / x).powf(weight);
                faces / h2 + p.a / x + p.b * x + x * x
            })
            .collect();
        let off = (0..grid.points - 1)
            .map(|k| {
                let (x, y) = (centre(k), centre(k + 1));
                let face = x + 0.5 * h;
                -(face * face / (x * y)).powf(0.5 * weight) / h2
            })
            .collect();
        Self { diag, off }
    }

    fn off_at(&self, k: usize) -> f64 {
        self.off.get(k).copied().unwrap_or(0.0)
    }

    /// Number of eigenvalues strictly below `lambda`.
    fn count_below(&self, lambda: f64) -> usize {
        let mut d = 1.0;
        let mut count = 0;
        for (k, &t) in self.diag.iter().enumerate() {
            let e2 = if k == 0 { 0.0 } else { self.off[k - 1].powi(2) };
            d = t - lambda - e2 / d;
            if d == 0.0 {
                d = -f64::EPSILON * (1.0 + t.abs());
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn radius(&self, k: usize) -> f64 {
        let left = if k == 0 { 0.0 } else { self.off[k - 1].abs() };
        left + self.off_at(k).abs()
    }

    fn bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (k, &d) in self.diag.iter().enumerate() {
            lo = lo.min(d - self.radius(k));
            hi = hi.max(d + self.radius(k));
        }
        (lo, hi)
    }

    /// `k`-th eigenvalue (0-based) by bisection on the Sturm count.
    fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Largest `|v|` over the outer tenth of the box relative to the peak,
    /// from recursions run inward from both walls and joined at the outer
    /// turning point.
    fn tail_ratio(&self, lambda: f64) -> f64 {
        let n = self.diag.len();
        let join = (0..n)
            .rposition(|k| self.diag[k] - self.radius(k) < lambda)
            .unwrap_or(n / 2)
            .clamp(1, n - 2);
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        for k in 0..join {
            let prev = if k == 0 { 0.0 } else { self.off[k - 1] * v[k - 1] };
            v[k + 1] = -((self.diag[k] - lambda) * v[k] + prev) / self.off[k];
            if !v[k + 1].is_finite() {
                return f64::INFINITY;
            }
        }
        let mut w = vec![0.0; n];
        w[n - 1] = 1.0;
        for k in (join + 1..n).rev() {
            let next = if k + 1 == n { 0.0 } else { self.off[k] * w[k + 1] };
            w[k - 1] = -((self.diag[k] - lambda) * w[k] + next) / self.off[k - 1];
        }
        let scale = v[join] / w[join];
        for k in join + 1..n {
            v[k] = w[k] * scale;
        }
        let peak = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let tail = v[n - n / 10..].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        tail / peak
    }
}

/// Lowest `count` eigenvalues, ascending.
pub fn oracle_eigenvalues(p: &ModelParams, grid: &OracleGrid, count: usize) -> Result<Vec<f64>> {
    if count > grid.points {
        return domain(format!("requested {count} eigenvalues from {} points", grid.points));
    }
    let t = Tridiagonal::build(p, grid);
    let values: Vec<f64> = (0..count).map(|k| t.eigenvalue(k)).collect();
    for &w in &values {
        let ratio = t.tail_ratio(w);
        if !(ratio <= DECAY_LIMIT) {
            return Err(Error::Decay { ratio });
        }
    }
    Ok(values)
}

/// `(4 E_{h/2} - E_h) / 3` per band.
pub fn richardson_refine(p: &ModelParams, grid: &OracleGrid, count: usize) -> Result<Vec<f64>> {
    let coarse = oracle_eigenvalues(p, grid, count)?;
    let fine = oracle_eigenvalues(p, &grid.refined(), count)?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn params(a: f64, b: f64) -> ModelParams {
        ModelParams::from_s(0.0, a, b).unwrap()
    }

    #[test]
    fn harmonic_levels() {
        let w = oracle_eigenvalues(&params(0.0, 0.0), &OracleGrid::default(), 2).unwrap();
        assert!((w[0] - 2.0).abs() < 1e-2 && (w[1] - 6.0).abs() < 1e-2, "{w:?}");
        let w = richardson_refine(&params(0.0, 0.0), &OracleGrid::default(), 2).unwrap();
        assert!((w[0] - 2.0).abs() < 1e-3 && (w[1] - 6.0).abs() < 1e-3, "{w:?}");
    }

    #[test]
    fn truncation_points() {
        let g = OracleGrid::default();
        let w = oracle_eigenvalues(&params(SQRT_2, 0.0), &g, 1).unwrap();
        assert!((w[0] - 4.0).abs() < 1e-2, "{w:?}");
        let w = richardson_refine(&params(SQRT_2, 0.0), &g, 1).unwrap();
        assert!((w[0] - 4.0).abs() < 1e-3, "{w:?}");
        let w = oracle_eigenvalues(&params(0.0, 1.632993), &g, 1).unwrap();
        assert!((w[0] - 10.0 / 3.0).abs() < 1e-2, "{w:?}");
        let w = richardson_refine(&params(0.5, 1.0), &g, 1).unwrap();
        assert!((w[0] - 3.75).abs() < 5e-3, "{w:?}");
    }

    #[test]
    fn fractional_spin_converges() {
        for s in [0.05, 0.2265, 0.5, 0.75, 5.744562646538029] {
            let p = ModelParams::from_s(s, 0.0, 0.0).unwrap();
            let w = richardson_refine(&p, &OracleGrid::default(), 3).unwrap();
            for (nu, w) in w.iter().enumerate() {
                let exact = 2.0 * (2.0 * nu as f64 + s + 1.0);
                assert!((w - exact).abs() < 1e-6, "s={s} ν={nu}: {w} vs {exact}");
            }
        }
    }

    #[test]
    fn second_order_convergence() {
        let p = params(0.0, 0.0);
        let g = OracleGrid::new(12.0, 1000).unwrap();
        let e1 = (oracle_eigenvalues(&p, &g, 1).unwrap()[0] - 2.0).abs();
        let e2 = (oracle_eigenvalues(&p, &g.refined(), 1).unwrap()[0] - 2.0).abs();
        assert!(e1 / e2 >= 2.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn short_box_fails_decay_check() {
        let g = OracleGrid::new(2.0, 400).unwrap();
        assert!(matches!(
            oracle_eigenvalues(&params(0.0, 0.0), &g, 1),
            Err(Error::Decay { .. })
        ));
    }

    #[test]
    fn grid_validation() {
        assert!(OracleGrid::new(0.0, 100).is_err());
        assert!(OracleGrid::new(1.0, 5).is_err());
        let g = OracleGrid::new(1.0, 10).unwrap();
        assert!(oracle_eigenvalues(&params(0.0, 0.0), &g, 11).is_err());
    }
}
