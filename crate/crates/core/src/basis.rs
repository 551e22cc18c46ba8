//! Matrix representations of the Gaussian basis `φ_j(x) = x^{s+j} e^{-x²/2}`.
//!
//! [`MonomialBasis`] evaluates overlap and Hamiltonian elements from closed
//! form moments. Its Gram matrix is numerically singular beyond roughly
//! fifteen functions, so the default solver uses [`OrthonormalBasis`]
//! instead: the same span rewritten as `x^s p_k(x) e^{-x²/2}` with `p_k`
//! orthonormal for the weight `x^{2s+1} e^{-x²}` on the half line. The
//! recurrence of `p_k` comes from a reorthogonalized Lanczos run on a
//! positive composite quadrature, and matrix elements are integrated on the
//! same nodes.

use gauss_quad::{GaussJacobi, GaussLegendre};
use nalgebra::{DMatrix, DVector};

use crate::error::{domain, Result};
use crate::model::{moment_integral, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BasisSpec {
    pub s: f64,
    pub size: usize,
}

impl BasisSpec {
    pub fn new(s: f64, size: usize) -> Result<Self> {
        if size == 0 {
            return domain("basis needs at least one function");
        }
        if !(s >= 0.0) || !s.is_finite() {
            return domain(format!("basis exponent must be finite and >= 0, got {s}"));
        }
        Ok(Self { s, size })
    }

    /// Basis matched to the indicial exponent of `p`.
    pub fn for_params(p: &ModelParams, size: usize) -> Result<Self> {
        Self::new(p.s(), size)
    }
}

/// Matrices of one concrete representation of a [`BasisSpec`] span.
pub trait BasisRepresentation: Sync {
    fn spec(&self) -> BasisSpec;

    fn overlap(&self) -> DMatrix<f64>;

    fn hamiltonian(&self, p: &ModelParams) -> Result<DMatrix<f64>>;

    /// `∫ χ_i x^power χ_j x dx` for `power` in `{-1, 1}`.
    fn moment(&self, power: i32) -> Result<DMatrix<f64>>;
}

fn check_centrifugal(spec: &BasisSpec, p: &ModelParams) -> Result<()> {
    if spec.s == 0.0 && p.gamma() != 0.0 {
        return domain("centrifugal term diverges in a basis with s = 0 and gamma != 0");
    }
    Ok(())
}

/// Raw basis `φ_j`, all elements from `M(p) = Γ((p+1)/2)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonomialBasis {
    spec: BasisSpec,
}

impl MonomialBasis {
    pub fn new(spec: BasisSpec) -> Self {
        Self { spec }
    }

    fn q(&self, i: usize, j: usize) -> f64 {
        2.0 * self.spec.s + (i + j) as f64 + 1.0
    }

    fn moment_matrix(&self, shift: f64) -> Result<DMatrix<f64>> {
        let n = self.spec.size;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = moment_integral(self.q(i, j) + shift)?;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }
}

impl BasisRepresentation for MonomialBasis {
    fn spec(&self) -> BasisSpec {
        self.spec
    }

    /// `S_ij = M(2s + i + j + 1)`
    fn overlap(&self) -> DMatrix<f64> {
        self.moment_matrix(0.0).expect("overlap moments converge for s >= 0")
    }

    /// With `q = 2s + i + j + 1`:
    /// `H_ij = [(s+i)(s+j) + γ²] M(q-2) - (q-1) M(q) + 2 M(q+2) + a M(q-1) + b M(q+1)`.
    /// Zero-coefficient terms are skipped so `M(-1)` is never requested.
    fn hamiltonian(&self, p: &ModelParams) -> Result<DMatrix<f64>> {
        check_centrifugal(&self.spec, p)?;
        let n = self.spec.size;
        let s = self.spec.s;
        let g2 = p.gamma() * p.gamma();
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let q = self.q(i, j);
                let singular = (s + i as f64) * (s + j as f64) + g2;
                let mut v = -(q - 1.0) * moment_integral(q)? + 2.0 * moment_integral(q + 2.0)?;
                if singular != 0.0 {
                    v += singular * moment_integral(q - 2.0)?;
                }
                if p.a != 0.0 {
                    v += p.a * moment_integral(q - 1.0)?;
                }
                if p.b != 0.0 {
                    v += p.b * moment_integral(q + 1.0)?;
                }
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        Ok(h)
    }

    fn moment(&self, power: i32) -> Result<DMatrix<f64>> {
        match power {
            -1 | 1 => self.moment_matrix(power as f64),
            _ => domain(format!("moment power {power} not supported")),
        }
    }
}

const JACOBI_POINTS: usize = 40;
const LEGENDRE_POINTS: usize = 30;
const PANEL: f64 = 0.5;

/// Orthonormalized representation of the Gaussian span.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    spec: BasisSpec,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    norm0: f64,
    overlap: DMatrix<f64>,
    kinetic: DMatrix<f64>,
    inv_x2: Option<DMatrix<f64>>,
    inv_x: DMatrix<f64>,
    x: DMatrix<f64>,
    x2: DMatrix<f64>,
}

/// Nodes and weights for `∫₀^L x^c g(x) dx`: one Gauss-Jacobi panel carrying
/// the power at the origin, Gauss-Legendre panels after it.
fn half_line_rule(c: f64, upper: f64) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    let jacobi = GaussJacobi::new(
        JACOBI_POINTS.try_into().unwrap(),
        0.0.try_into().unwrap(),
        c.try_into().expect("Jacobi exponent exceeds -1"),
    );
    // x = PANEL (1 + y) / 2, so x^c dx = (PANEL/2)^{c+1} (1+y)^c dy
    let jac = (0.5 * PANEL).powf(c + 1.0);
    for (y, w) in jacobi.iter() {
        xs.push(0.5 * PANEL * (1.0 + y));
        ws.push(w * jac);
    }
    let legendre = GaussLegendre::new(LEGENDRE_POINTS.try_into().unwrap());
    let mut lo = PANEL;
    while lo < upper {
        let hi = lo + PANEL;
        for (y, w) in legendre.iter() {
            let x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * y;
            xs.push(x);
            ws.push(0.5 * (hi - lo) * w * x.powf(c));
        }
        lo = hi;
    }
    (xs, ws)
}

impl OrthonormalBasis {
    pub fn new(spec: BasisSpec) -> Self {
        let n = spec.size;
        let s = spec.s;
        let c0 = if s == 0.0 { 0.0 } else { 2.0 * s - 1.0 };
        let upper = (2.0 * ((n as f64) + s + 1.0).sqrt() + 6.0).max(12.0);
        let (xs, ws) = half_line_rule(c0, upper);
        // ρ carries e^{-x²} x^{2s-1}; every integrand used below is ρ times a
        // polynomial with no negative powers left over
        let rho: Vec<f64> = xs
            .iter()
            .zip(&ws)
            .map(|(&x, &w)| w * (-x * x).exp() * x.powf(2.0 * s - 1.0 - c0))
            .collect();
        let measure: Vec<f64> = xs.iter().zip(&rho).map(|(&x, &r)| r * x * x).collect();

        let (alpha, beta, norm0) = lanczos(&xs, &measure, n);
        let (p, dp) = evaluate_orthonormal(&alpha, &beta, norm0, &xs, n);

        let weighted = |f: &dyn Fn(usize) -> f64, vals: &DMatrix<f64>| {
            let m = xs.len();
            let diag = DVector::from_iterator(m, (0..m).map(f));
            let scaled = DMatrix::from_fn(n, m, |k, j| vals[(k, j)] * diag[j]);
            let g = &scaled * vals.transpose();
            (&g + g.transpose()) * 0.5
        };
        let power = |k: i32| {
            let xs = &xs;
            let rho = &rho;
            move |j: usize| rho[j] * xs[j].powi(k)
        };
        let overlap = weighted(&power(2), &p);
        let inv_x = weighted(&power(1), &p);
        let x = weighted(&power(3), &p);
        let x2 = weighted(&power(4), &p);
        let inv_x2 = (s > 0.0).then(|| weighted(&power(0), &p));
        // χ' = e^{-x²/2} x^{s-1} R with R = s p + x p' - x² p
        let r = DMatrix::from_fn(n, xs.len(), |k, j| {
            let x = xs[j];
            s * p[(k, j)] + x * dp[(k, j)] - x * x * p[(k, j)]
        });
        let kinetic = weighted(&power(0), &r);
        Self {
            spec,
            alpha,
            beta,
            norm0,
            overlap,
            kinetic,
            inv_x2,
            inv_x,
            x,
            x2,
        }
    }

    /// Monomial coefficients `d_j` with `Σ_k v_k χ_k = Σ_j d_j φ_j`.
    pub fn monomial_coefficients(&self, v: &[f64]) -> Vec<f64> {
        let n = self.spec.size;
        let mut out = vec![0.0; n];
        let mut prev = vec![0.0; n];
        let mut cur = vec![0.0; n];
        cur[0] = 1.0 / self.norm0;
        for (k, &vk) in v.iter().enumerate().take(n) {
            for (o, c) in out.iter_mut().zip(&cur) {
                *o += vk * c;
            }
            if k + 1 < n {
                let mut next = vec![0.0; n];
                for j in 0..n {
                    let shifted = if j > 0 { cur[j - 1] } else { 0.0 };
                    next[j] = (shifted - self.alpha[k] * cur[j] - self.beta[k] * prev[j]) / self.beta[k + 1];
                }
                prev = std::mem::replace(&mut cur, next);
            }
        }
        out
    }
}

impl BasisRepresentation for OrthonormalBasis {
    fn spec(&self) -> BasisSpec {
        self.spec
    }

    fn overlap(&self) -> DMatrix<f64> {
        self.overlap.clone()
    }

    fn hamiltonian(&self, p: &ModelParams) -> Result<DMatrix<f64>> {
        check_centrifugal(&self.spec, p)?;
        let mut h = &self.kinetic + &self.x2;
        let g2 = p.gamma() * p.gamma();
        if g2 != 0.0 {
            h += self.inv_x2.as_ref().expect("s > 0 when gamma != 0") * g2;
        }
        if p.a != 0.0 {
            h += &self.inv_x * p.a;
        }
        if p.b != 0.0 {
            h += &self.x * p.b;
        }
        Ok(h)
    }

    fn moment(&self, power: i32) -> Result<DMatrix<f64>> {
        match power {
            -1 => Ok(self.inv_x.clone()),
            1 => Ok(self.x.clone()),
            _ => domain(format!("moment power {power} not supported")),
        }
    }
}

/// Recurrence `x p_k = β_{k+1} p_{k+1} + α_k p_k + β_k p_{k-1}` of the
/// polynomials orthonormal under the discrete measure.
fn lanczos(xs: &[f64], measure: &[f64], n: usize) -> (Vec<f64>, Vec<f64>, f64) {
    let m = xs.len();
    let root: Vec<f64> = measure.iter().map(|w| w.sqrt()).collect();
    let norm0 = root.iter().map(|r| r * r).sum::<f64>().sqrt();
    let mut q: Vec<Vec<f64>> = vec![root.iter().map(|r| r / norm0).collect()];
    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n + 1];
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    for k in 0..n {
        let mut r: Vec<f64> = (0..m).map(|j| xs[j] * q[k][j]).collect();
        alpha[k] = dot(&r, &q[k]);
        for j in 0..m {
            r[j] -= alpha[k] * q[k][j] + if k > 0 { beta[k] * q[k - 1][j] } else { 0.0 };
        }
        for _ in 0..2 {
            for qi in &q {
                let c = dot(&r, qi);
                r.iter_mut().zip(qi).for_each(|(x, y)| *x -= c * y);
            }
        }
        beta[k + 1] = dot(&r, &r).sqrt();
        if k + 1 < n {
            q.push(r.iter().map(|x| x / beta[k + 1]).collect());
        }
    }
    (alpha, beta, norm0)
}

/// `p_k(x_j)` and `p_k'(x_j)` as `n × m` matrices.
fn evaluate_orthonormal(
    alpha: &[f64],
    beta: &[f64],
    norm0: f64,
    xs: &[f64],
    n: usize,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let m = xs.len();
    let mut p = DMatrix::zeros(n, m);
    let mut dp = DMatrix::zeros(n, m);
    for (j, &x) in xs.iter().enumerate() {
        p[(0, j)] = 1.0 / norm0;
        for k in 0..n - 1 {
            let (prev, dprev) = if k > 0 { (p[(k - 1, j)], dp[(k - 1, j)]) } else { (0.0, 0.0) };
            p[(k + 1, j)] = ((x - alpha[k]) * p[(k, j)] - beta[k] * prev) / beta[k + 1];
            dp[(k + 1, j)] = ((x - alpha[k]) * dp[(k, j)] + p[(k, j)] - beta[k] * dprev) / beta[k + 1];
        }
    }
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn monomial_overlap_examples() {
        let s0 = MonomialBasis::new(BasisSpec::new(0.0, 2).unwrap()).overlap();
        assert_relative_eq!(s0[(0, 0)], 0.5, epsilon = 1e-15);
        assert_relative_eq!(s0[(0, 1)], PI.sqrt() / 4.0, epsilon = 1e-15);
        assert_eq!(s0[(0, 1)], s0[(1, 0)]);
        let s1 = MonomialBasis::new(BasisSpec::new(1.0, 1).unwrap()).overlap();
        assert_relative_eq!(s1[(0, 0)], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn monomial_hamiltonian_examples() {
        let p = ModelParams::from_s(0.0, 0.0, 0.0).unwrap();
        let h = MonomialBasis::new(BasisSpec::new(0.0, 2).unwrap()).hamiltonian(&p).unwrap();
        assert_relative_eq!(h[(0, 0)], 1.0, epsilon = 1e-14);
        assert_relative_eq!(h[(0, 1)], PI.sqrt() / 2.0, epsilon = 1e-14);
        assert_relative_eq!(h[(1, 1)], 1.5, epsilon = 1e-14);
    }

    #[test]
    fn divergent_centrifugal_term_rejected() {
        let p = ModelParams::new(1.0, 0.0, 0.0).unwrap();
        let spec = BasisSpec::new(0.0, 3).unwrap();
        assert!(MonomialBasis::new(spec).hamiltonian(&p).is_err());
        assert!(OrthonormalBasis::new(spec).hamiltonian(&p).is_err());
        assert!(BasisSpec::new(0.0, 0).is_err());
        assert!(BasisSpec::new(-0.5, 3).is_err());
    }

    #[test]
    fn orthonormal_overlap_is_identity() {
        for &s in &[0.0, 0.05, 0.5, 1.0, 33f64.sqrt()] {
            for &n in &[1, 10, 30, 45] {
                let b = OrthonormalBasis::new(BasisSpec::new(s, n).unwrap());
                let err = (b.overlap() - DMatrix::identity(n, n)).amax();
                assert!(err < 1e-12, "s={s} n={n} err={err:e}");
            }
        }
    }

    /// Both representations describe the same span, so the congruence
    /// `D^T M D` with the monomial expansion `D` reproduces the orthonormal
    /// matrices while the monomial Gram matrix is still well conditioned.
    #[test]
    fn representations_agree_on_small_spans() {
        for &s in &[0.0, 0.3, 1.0, 2.5] {
            let spec = BasisSpec::new(s, 6).unwrap();
            let mono = MonomialBasis::new(spec);
            let orth = OrthonormalBasis::new(spec);
            let d = DMatrix::from_fn(6, 6, |j, k| {
                let mut e = vec![0.0; 6];
                e[k] = 1.0;
                orth.monomial_coefficients(&e)[j]
            });
            let p = ModelParams::from_s(s, 0.7, -0.4).unwrap();
            let pairs = [
                (mono.overlap(), orth.overlap()),
                (mono.hamiltonian(&p).unwrap(), orth.hamiltonian(&p).unwrap()),
                (mono.moment(-1).unwrap(), orth.moment(-1).unwrap()),
                (mono.moment(1).unwrap(), orth.moment(1).unwrap()),
            ];
            // rounding grows with the size of the expansion coefficients
            let scale = 1e-14 * d.amax().powi(2);
            for (m, o) in pairs {
                let err = (d.transpose() * &m * &d - &o).amax();
                assert!(err < scale * m.amax(), "s={s}: {err:e} vs {:e}", scale * m.amax());
            }
        }
    }

    #[test]
    fn moment_powers_checked() {
        let spec = BasisSpec::new(0.0, 3).unwrap();
        assert!(MonomialBasis::new(spec).moment(2).is_err());
        assert!(OrthonormalBasis::new(spec).moment(0).is_err());
    }
}
