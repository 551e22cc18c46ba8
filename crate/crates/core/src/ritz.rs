//! Rayleigh-Ritz diagonalization in the span of `φ_j(x) = x^{s+j} e^{-x²/2}`.
//!
//! The generalized problem `H v = W S v` is solved by canonical
//! orthogonalization: overlap directions whose eigenvalue falls below
//! `cutoff·max` are dropped. The default path builds `H` and `S` in the
//! orthonormalized representation of the span, where nothing is dropped.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use crate::basis::{BasisRepresentation, BasisSpec, MonomialBasis, OrthonormalBasis};
use crate::error::{domain, Error, Result};
use crate::model::ModelParams;
use crate::truncation::FreeParam;

pub const DEFAULT_BASIS: usize = 30;
pub const DEFAULT_CUTOFF: f64 = 1e-12;

/// `S_ij = M(2s + i + j + 1)` in the raw basis.
pub fn overlap_matrix(basis: &BasisSpec) -> DMatrix<f64> {
    MonomialBasis::new(*basis).overlap()
}

/// Weak form `∫ φ_i' φ_j' x dx + ∫ φ_i V φ_j x dx` in the raw basis.
pub fn hamiltonian_matrix(basis: &BasisSpec, p: &ModelParams) -> Result<DMatrix<f64>> {
    MonomialBasis::new(*basis).hamiltonian(p)
}

/// Ascending eigenvalues with coefficient vectors in the representation the
/// problem was solved in (see [`OrthonormalBasis::monomial_coefficients`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalResult {
    pub eigenvalues: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub retained_dim: usize,
    /// Smallest kept overlap eigenvalue over the largest, after unit-diagonal
    /// scaling.
    pub smin_ratio: f64,
    /// Largest `‖(H - W S) v‖ / (‖H‖ ‖v‖)` over the returned pairs.
    pub max_residual: f64,
}

impl VariationalResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    fn vector(&self, nu: usize) -> Result<DVector<f64>> {
        self.vectors
            .get(nu)
            .map(|v| DVector::from_column_slice(v))
            .ok_or(Error::Index {
                index: nu,
                available: self.len(),
            })
    }
}

fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_columns(&order.iter().map(|&k| eig.eigenvectors.column(k)).collect::<Vec<_>>());
    (values, vectors)
}

/// Solves `H v = W S v` by canonical orthogonalization.
///
/// Both matrices are first scaled to unit overlap diagonal; the reported
/// residual is measured in that scaled basis.
pub fn solve_generalized(h: &DMatrix<f64>, s: &DMatrix<f64>, cutoff: f64) -> Result<VariationalResult> {
    let n = s.nrows();
    if h.shape() != s.shape() || s.nrows() != s.ncols() {
        return domain("H and S must be square and of equal dimension");
    }
    if !(cutoff > 0.0 && cutoff < 1.0) {
        return domain(format!("cutoff must lie in (0, 1), got {cutoff}"));
    }
    let d = DVector::from_iterator(n, (0..n).map(|i| 1.0 / s[(i, i)].sqrt()));
    let scale = |m: &DMatrix<f64>| DMatrix::from_fn(n, n, |i, j| m[(i, j)] * d[i] * d[j]);
    let hs = scale(h);
    let ss = scale(s);

    let (sigma, u) = sorted_eigen(ss.clone());
    let smax = *sigma.last().unwrap();
    let kept: Vec<usize> = (0..n).filter(|&k| sigma[k] >= cutoff * smax).collect();
    if kept.is_empty() {
        return Err(Error::EmptyBasis);
    }
    let x = DMatrix::from_columns(
        &kept
            .iter()
            .map(|&k| u.column(k) / sigma[k].sqrt())
            .collect::<Vec<_>>(),
    );
    let reduced = x.transpose() * &hs * &x;
    let reduced = (&reduced + reduced.transpose()) * 0.5;
    let (w, y) = sorted_eigen(reduced);
    let scaled_vectors = &x * y;

    let h_norm = hs.norm();
    let mut max_residual = 0.0_f64;
    let mut vectors = Vec::with_capacity(w.len());
    for (k, &wk) in w.iter().enumerate() {
        let v = scaled_vectors.column(k).into_owned();
        let r = (&hs * &v - (&ss * &v) * wk).norm();
        let rel = r / (h_norm * v.norm());
        if rel > 1e-8 {
            return Err(Error::Residual {
                index: k,
                residual: rel,
                bound: 1e-8,
            });
        }
        max_residual = max_residual.max(rel);
        vectors.push(v.iter().zip(d.iter()).map(|(vi, di)| vi * di).collect());
    }
    Ok(VariationalResult {
        eigenvalues: w,
        vectors,
        retained_dim: kept.len(),
        smin_ratio: sigma[kept[0]] / smax,
        max_residual,
    })
}

/// Builds and solves the problem for `p` in the orthonormalized span of
/// `size` Gaussian functions.
pub fn variational(p: &ModelParams, size: usize) -> Result<VariationalResult> {
    let basis = OrthonormalBasis::new(BasisSpec::for_params(p, size)?);
    solve_in(&basis, p, DEFAULT_CUTOFF)
}

pub fn solve_in<R: BasisRepresentation + ?Sized>(basis: &R, p: &ModelParams, cutoff: f64) -> Result<VariationalResult> {
    solve_generalized(&basis.hamiltonian(p)?, &basis.overlap(), cutoff)
}

fn expectation<R: BasisRepresentation + ?Sized>(r: &VariationalResult, basis: &R, nu: usize, power: i32) -> Result<f64> {
    let v = r.vector(nu)?;
    if v.len() != basis.spec().size {
        return domain("state vector does not match the basis size");
    }
    let c = basis.moment(power)?;
    let s = basis.overlap();
    Ok(v.dot(&(&c * &v)) / v.dot(&(&s * &v)))
}

/// `⟨1/x⟩` in state `nu`.
pub fn expectation_inv_x<R: BasisRepresentation + ?Sized>(r: &VariationalResult, basis: &R, nu: usize) -> Result<f64> {
    expectation(r, basis, nu, -1)
}

/// `⟨x⟩` in state `nu`.
pub fn expectation_x<R: BasisRepresentation + ?Sized>(r: &VariationalResult, basis: &R, nu: usize) -> Result<f64> {
    expectation(r, basis, nu, 1)
}

/// Central-difference derivatives of `W_ν` against the Hellmann-Feynman
/// expectation values, at fixed basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HftCheck {
    pub w: f64,
    pub dw_da: f64,
    pub inv_x: f64,
    pub res_a: f64,
    pub dw_db: f64,
    pub mean_x: f64,
    pub res_b: f64,
}

impl HftCheck {
    pub fn rel_a(&self) -> f64 {
        self.res_a / self.inv_x.abs()
    }

    pub fn rel_b(&self) -> f64 {
        self.res_b / self.mean_x.abs()
    }
}

/// Step `1e-4·max(1, |value|)` used for the difference quotients.
pub fn default_step(value: f64) -> f64 {
    1e-4 * value.abs().max(1.0)
}

pub fn hft_residuals(p: &ModelParams, nu: usize, basis_n: usize, h: f64) -> Result<HftCheck> {
    if !(h > 0.0) {
        return domain(format!("difference step must be positive, got {h}"));
    }
    let basis = OrthonormalBasis::new(BasisSpec::for_params(p, basis_n)?);
    let band = |q: ModelParams| -> Result<f64> {
        let r = solve_in(&basis, &q, DEFAULT_CUTOFF)?;
        r.eigenvalues.get(nu).copied().ok_or(Error::Index {
            index: nu,
            available: r.len(),
        })
    };
    let centre = solve_in(&basis, p, DEFAULT_CUTOFF)?;
    let w = *centre.eigenvalues.get(nu).ok_or(Error::Index {
        index: nu,
        available: centre.len(),
    })?;
    let inv_x = expectation_inv_x(&centre, &basis, nu)?;
    let mean_x = expectation_x(&centre, &basis, nu)?;
    let dw_da = (band(p.with_a(p.a + h))? - band(p.with_a(p.a - h))?) / (2.0 * h);
    let dw_db = (band(p.with_b(p.b + h))? - band(p.with_b(p.b - h))?) / (2.0 * h);
    Ok(HftCheck {
        w,
        dw_da,
        inv_x,
        res_a: (dw_da - inv_x).abs(),
        dw_db,
        mean_x,
        res_b: (dw_db - mean_x).abs(),
    })
}

/// Uniform grid of `count` points on `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if count == 0 || !(min.is_finite() && max.is_finite()) || max < min {
            return domain("grid needs finite min <= max and at least one point");
        }
        if count == 1 && min != max {
            return domain("a single-point grid needs min == max");
        }
        Ok(Self { min, max, count })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.max } else { self.min + step * k as f64 })
            .collect()
    }
}

/// Eigenvalue bands sampled along one parameter axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCurve {
    pub axis: FreeParam,
    pub grid: Vec<f64>,
    /// `bands[ν][k]` is `W_ν` at `grid[k]`; NaN where the solve failed.
    pub bands: Vec<Vec<f64>>,
    pub template: ModelParams,
    pub basis_n: usize,
    pub cutoff: f64,
    pub failures: Vec<(usize, String)>,
}

impl SpectralCurve {
    pub fn axis_name(&self) -> &'static str {
        self.axis.name()
    }

    pub fn band_count(&self) -> usize {
        self.bands.len()
    }
}

/// Lowest `nu_max + 1` eigenvalues at every grid point of `axis`, with the
/// other parameter taken from `template`.
pub fn scan_curve(
    template: &ModelParams,
    axis: FreeParam,
    grid: Grid,
    nu_max: usize,
    basis_n: usize,
) -> Result<SpectralCurve> {
    let basis = OrthonormalBasis::new(BasisSpec::for_params(template, basis_n)?);
    let xs = grid.points();
    let per_point: Vec<Result<Vec<f64>>> = xs
        .par_iter()
        .map(|&x| {
            let p = match axis {
                FreeParam::A => template.with_a(x),
                FreeParam::B => template.with_b(x),
            };
            let r = solve_in(&basis, &p, DEFAULT_CUTOFF)?;
            if r.len() <= nu_max {
                return Err(Error::Index {
                    index: nu_max,
                    available: r.len(),
                });
            }
            Ok(r.eigenvalues[..=nu_max].to_vec())
        })
        .collect();
    let mut bands = vec![Vec::with_capacity(xs.len()); nu_max + 1];
    let mut failures = Vec::new();
    for (k, point) in per_point.into_iter().enumerate() {
        match point {
            Ok(ws) => bands.iter_mut().zip(ws).for_each(|(band, w)| band.push(w)),
            Err(e) => {
                bands.iter_mut().for_each(|band| band.push(f64::NAN));
                failures.push((k, e.to_string()));
            }
        }
    }
    Ok(SpectralCurve {
        axis,
        grid: xs,
        bands,
        template: *template,
        basis_n,
        cutoff: DEFAULT_CUTOFF,
        failures,
    })
}
