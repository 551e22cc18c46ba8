//! Harmonic oscillator with a pointlike defect, plus Coulomb and/or linear
//! terms, mapped onto the dimensionless radial problem.
//!
//! For `V(r) = k/r + η r + m ω² r²/2` with monopole parameter `α` the radial
//! equation becomes the dimensionless one with
//!
//! ```text
//! γ² = ι² = (4l(l+1) + α²)/α²,   a = 2k √(m/ω) / (αħ)^{3/2},
//! b = 2η / √(αħ m ω³),           δ = W = 2ℰ/(αħω).
//! ```
//!
//! Truncation orders are labelled `n = 0, 1, …`; the conventional radial-mode
//! label is `n̄ = n + 1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisSpec, OrthonormalBasis};
use crate::error::{domain, Error, Result};
use crate::model::ModelParams;
use crate::ritz::{solve_in, Grid, DEFAULT_CUTOFF};
use crate::truncation::{series_coefficients, truncation_energy, truncation_solutions, FixedParam};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    /// `k/r + m ω² r²/2`
    CoulombHO,
    /// `η r + m ω² r²/2`
    LinearHO,
    /// `k/r + η r + m ω² r²/2`
    CoulombLinearHO,
}

impl ModelKind {
    pub fn uses_coulomb(&self) -> bool {
        matches!(self, ModelKind::CoulombHO | ModelKind::CoulombLinearHO)
    }

    pub fn uses_linear(&self) -> bool {
        matches!(self, ModelKind::LinearHO | ModelKind::CoulombLinearHO)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalModel {
    pub kind: ModelKind,
    pub m: f64,
    pub omega: f64,
    pub k: f64,
    pub eta: f64,
    pub alpha: f64,
    pub hbar: f64,
    pub l: u32,
}

impl PhysicalModel {
    /// Model in units `m = ħ = 1`, with no defect (`α = 1`), `l = 0` and no
    /// couplings.
    pub fn unit(kind: ModelKind, omega: f64) -> Self {
        Self {
            kind,
            m: 1.0,
            omega,
            k: 0.0,
            eta: 0.0,
            alpha: 1.0,
            hbar: 1.0,
            l: 0,
        }
    }

    pub fn with_omega(self, omega: f64) -> Self {
        Self { omega, ..self }
    }

    fn validate_static(&self) -> Result<()> {
        if !(self.m > 0.0 && self.hbar > 0.0) {
            return domain("mass and ħ must be positive");
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return domain(format!("monopole parameter must lie in (0, 1], got {}", self.alpha));
        }
        if !(self.k.is_finite() && self.eta.is_finite()) {
            return domain("couplings must be finite");
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        self.validate_static()?;
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return domain(format!("angular frequency must be positive, got {}", self.omega));
        }
        Ok(())
    }

    /// `|ι| = √((4l(l+1) + α²)/α²)`
    pub fn iota(&self) -> f64 {
        let l = self.l as f64;
        ((4.0 * l * (l + 1.0) + self.alpha * self.alpha) / (self.alpha * self.alpha)).sqrt()
    }

    fn coulomb_at(&self, omega: f64) -> f64 {
        if !self.kind.uses_coulomb() {
            return 0.0;
        }
        2.0 * self.k * (self.m / omega).sqrt() / (self.alpha * self.hbar).powf(1.5)
    }

    fn linear_at(&self, omega: f64) -> f64 {
        if !self.kind.uses_linear() {
            return 0.0;
        }
        2.0 * self.eta / (self.alpha * self.hbar * self.m * omega.powi(3)).sqrt()
    }

    fn params_at(&self, omega: f64) -> Result<ModelParams> {
        ModelParams::new(self.iota(), self.coulomb_at(omega), self.linear_at(omega))
    }

    /// `αħω/2`, so that `ℰ = W · energy_scale`.
    pub fn energy_scale(&self) -> f64 {
        0.5 * self.alpha * self.hbar * self.omega
    }
}

/// Dimensionless parameters and the energy unit `αħω/2`.
pub fn to_dimensionless(pm: &PhysicalModel) -> Result<(ModelParams, f64)> {
    pm.validate()?;
    Ok((pm.params_at(pm.omega)?, pm.energy_scale()))
}

/// Energy formula `ℰ = αħω(1 + n + |ι|)`, less `η²/(2mω²)` when the linear
/// term is present.
pub fn claimed_energy(pm: &PhysicalModel, n: usize) -> Result<f64> {
    pm.validate()?;
    let base = pm.alpha * pm.hbar * pm.omega * (1.0 + n as f64 + pm.iota());
    Ok(if pm.kind.uses_linear() {
        base - pm.eta * pm.eta / (2.0 * pm.m * pm.omega * pm.omega)
    } else {
        base
    })
}

/// A frequency at which the order-`n` truncation condition holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllowedFrequency {
    /// Rank of the truncation root this frequency came from (1 = largest);
    /// for the Coulomb-plus-linear model, the rank in ascending `ω`.
    pub index: usize,
    /// Value of the free dimensionless coupling at `omega`.
    pub root: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AllowedFrequencies {
    /// The coupling vanishes and zero is a truncation root: every frequency
    /// reproduces it.
    Unrestricted,
    Discrete(Vec<AllowedFrequency>),
}

/// Frequencies `ω` for which the model at `ω` satisfies `c_{n+1} = 0`.
/// The `omega` field of `pm` is ignored.
pub fn claimed_allowed_frequency(pm: &PhysicalModel, n: usize) -> Result<AllowedFrequencies> {
    pm.validate_static()?;
    let s = pm.iota();
    let ah = pm.alpha * pm.hbar;
    let (fixed, coupling) = match pm.kind {
        ModelKind::CoulombHO => (FixedParam::B(0.0), pm.k),
        ModelKind::LinearHO => (FixedParam::A(0.0), pm.eta),
        ModelKind::CoulombLinearHO => return coulomb_linear_frequencies(pm, n),
    };
    let roots = truncation_solutions(n, s, fixed)?;
    if coupling == 0.0 {
        return if roots.iter().any(|r| r.root == 0.0) {
            Ok(AllowedFrequencies::Unrestricted)
        } else {
            Err(Error::NoFrequency)
        };
    }
    let found: Vec<AllowedFrequency> = roots
        .iter()
        .filter(|r| r.root != 0.0 && r.root.signum() == coupling.signum())
        .map(|r| {
            let omega = match pm.kind {
                // a² = 4k²m / (ω (αħ)³)
                ModelKind::CoulombHO => 4.0 * coupling * coupling * pm.m / (r.root * r.root * ah.powi(3)),
                // b² = 4η² / (αħ m ω³)
                _ => (4.0 * coupling * coupling / (r.root * r.root * ah * pm.m)).cbrt(),
            };
            AllowedFrequency {
                index: r.index,
                root: r.root,
                omega,
            }
        })
        .collect();
    if found.is_empty() {
        return Err(Error::NoFrequency);
    }
    Ok(AllowedFrequencies::Discrete(found))
}

/// `c_{n+1}` at the truncation energy for the model at `omega`, relative to
/// the largest lower coefficient.
pub fn truncation_residual(pm: &PhysicalModel, n: usize, omega: f64) -> Result<f64> {
    let p = pm.params_at(omega)?;
    let w = truncation_energy(n, p.s(), p.b);
    let c = series_coefficients(&p, w, n + 1)?;
    let scale = c[..=n].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    Ok(c[n + 1] / scale)
}

const BRACKET: (f64, f64) = (1e-3, 1e3);
const BRACKET_SAMPLES: usize = 2000;

fn coulomb_linear_frequencies(pm: &PhysicalModel, n: usize) -> Result<AllowedFrequencies> {
    let g = |ln_w: f64| truncation_residual(pm, n, ln_w.exp());
    let (lo, hi) = (BRACKET.0.ln(), BRACKET.1.ln());
    let step = (hi - lo) / (BRACKET_SAMPLES - 1) as f64;
    let mut found = Vec::new();
    let mut prev_x = lo;
    let mut prev_g = g(lo)?;
    for k in 1..BRACKET_SAMPLES {
        let x = lo + step * k as f64;
        let gx = g(x)?;
        if gx == 0.0 || prev_g.signum() != gx.signum() {
            let (mut a, mut b, mut ga) = (prev_x, x, prev_g);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let gm = g(mid)?;
                if gm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if gm.signum() == ga.signum() {
                    a = mid;
                    ga = gm;
                } else {
                    b = mid;
                }
            }
            let omega = (0.5 * (a + b)).exp();
            if found.last().is_none_or(|f: &AllowedFrequency| (f.omega - omega).abs() > 1e-12 * omega) {
                found.push(AllowedFrequency {
                    index: found.len() + 1,
                    root: pm.coulomb_at(omega),
                    omega,
                });
            }
        }
        prev_x = x;
        prev_g = gx;
    }
    if found.is_empty() {
        return Err(Error::NoFrequency);
    }
    Ok(AllowedFrequencies::Discrete(found))
}

/// Variational `δ_ν(ω)` over a frequency sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityTable {
    pub omegas: Vec<f64>,
    /// `bands[ν][k]` = `δ_ν` at `omegas[k]`; NaN where the solve failed.
    pub bands: Vec<Vec<f64>>,
    /// Largest `|δ_ν(ω_{k+1}) - δ_ν(ω_k)|` per band.
    pub max_jump: Vec<f64>,
    /// Largest `|dδ_ν/dω|` estimated by differences on the grid, per band.
    pub max_slope: Vec<f64>,
    pub failures: Vec<(usize, String)>,
}

pub fn continuity_demo(pm: &PhysicalModel, grid: Grid, nu_max: usize, basis_n: usize) -> Result<ContinuityTable> {
    pm.validate_static()?;
    if grid.min <= 0.0 {
        return domain("frequency grid must be positive");
    }
    let omegas = grid.points();
    let basis = OrthonormalBasis::new(BasisSpec::new(pm.iota(), basis_n)?);
    let per_point: Vec<Result<Vec<f64>>> = omegas
        .par_iter()
        .map(|&w| {
            let p = pm.params_at(w)?;
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
    let mut bands = vec![Vec::with_capacity(omegas.len()); nu_max + 1];
    let mut failures = Vec::new();
    for (k, point) in per_point.into_iter().enumerate() {
        match point {
            Ok(ws) => bands.iter_mut().zip(ws).for_each(|(b, w)| b.push(w)),
            Err(e) => {
                bands.iter_mut().for_each(|b| b.push(f64::NAN));
                failures.push((k, e.to_string()));
            }
        }
    }
    let max_jump = bands
        .iter()
        .map(|b| b.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max))
        .collect();
    let max_slope = bands.iter().map(|b| max_grid_slope(&omegas, b)).collect();
    Ok(ContinuityTable {
        omegas,
        bands,
        max_jump,
        max_slope,
        failures,
    })
}

/// Central differences inside, one-sided at the ends.
fn max_grid_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    (0..n)
        .map(|k| {
            let (i, j) = (k.saturating_sub(1), (k + 1).min(n - 1));
            ((ys[j] - ys[i]) / (xs[j] - xs[i])).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn coulomb(omega: f64) -> PhysicalModel {
        PhysicalModel {
            k: 1.0,
            ..PhysicalModel::unit(ModelKind::CoulombHO, omega)
        }
    }

    fn linear(omega: f64) -> PhysicalModel {
        PhysicalModel {
            eta: 1.0,
            ..PhysicalModel::unit(ModelKind::LinearHO, omega)
        }
    }

    #[test]
    fn dimensionless_examples() {
        let (p, _) = to_dimensionless(&PhysicalModel::unit(ModelKind::CoulombHO, 1.0)).unwrap();
        assert_eq!((p.s(), p.a, p.b), (1.0, 0.0, 0.0));
        let pm = PhysicalModel {
            alpha: 0.5,
            l: 1,
            ..PhysicalModel::unit(ModelKind::CoulombHO, 1.0)
        };
        let (p, _) = to_dimensionless(&pm).unwrap();
        assert_relative_eq!(p.s() * p.s(), 33.0, epsilon = 1e-12);
        let (p, scale) = to_dimensionless(&coulomb(2.0 / 3.0)).unwrap();
        assert_relative_eq!(p.a, 6f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(scale, 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn invalid_models_rejected() {
        assert!(to_dimensionless(&coulomb(0.0)).is_err());
        assert!(to_dimensionless(&PhysicalModel { m: -1.0, ..coulomb(1.0) }).is_err());
        assert!(to_dimensionless(&PhysicalModel { alpha: 1.5, ..coulomb(1.0) }).is_err());
        assert!(to_dimensionless(&PhysicalModel { hbar: 0.0, ..coulomb(1.0) }).is_err());
    }

    #[test]
    fn kind_gates_couplings() {
        let pm = PhysicalModel {
            eta: 3.0,
            ..coulomb(1.0)
        };
        assert_eq!(to_dimensionless(&pm).unwrap().0.b, 0.0);
        let pm = PhysicalModel { k: 3.0, ..linear(1.0) };
        assert_eq!(to_dimensionless(&pm).unwrap().0.a, 0.0);
    }

    #[test]
    fn energy_examples() {
        assert_relative_eq!(claimed_energy(&coulomb(2.0 / 3.0), 1).unwrap(), 2.0, epsilon = 1e-14);
        let w = 2.5f64.cbrt();
        assert_relative_eq!(claimed_energy(&linear(w), 1).unwrap(), 3.0 * w - 0.5 / (w * w), epsilon = 1e-14);
        assert_relative_eq!(claimed_energy(&linear(w), 1).unwrap(), 3.800184, epsilon = 1e-6);
        let free = PhysicalModel::unit(ModelKind::CoulombHO, 1.7);
        assert_relative_eq!(claimed_energy(&free, 0).unwrap(), 2.0 * 1.7, epsilon = 1e-14);
    }

    #[test]
    fn energy_matches_truncation_energy() {
        for pm in [coulomb(0.37), linear(1.9), PhysicalModel { k: -0.4, eta: 2.0, l: 2, alpha: 0.6, ..PhysicalModel::unit(ModelKind::CoulombLinearHO, 0.8) }] {
            let (p, scale) = to_dimensionless(&pm).unwrap();
            for n in 0..6 {
                let lhs = claimed_energy(&pm, n).unwrap();
                let rhs = truncation_energy(n, p.s(), p.b) * scale;
                assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn coulomb_frequency() {
        let AllowedFrequencies::Discrete(f) = claimed_allowed_frequency(&coulomb(9.0), 1).unwrap() else {
            panic!("expected discrete frequencies");
        };
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].index, 1);
        assert_relative_eq!(f[0].omega, 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(claimed_energy(&coulomb(f[0].omega), 1).unwrap(), 2.0, epsilon = 1e-12);
        let negative = PhysicalModel { k: -1.0, ..coulomb(1.0) };
        let AllowedFrequencies::Discrete(f) = claimed_allowed_frequency(&negative, 1).unwrap() else {
            panic!()
        };
        assert_eq!(f[0].index, 2);
        assert_relative_eq!(f[0].omega, 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn linear_frequency() {
        let AllowedFrequencies::Discrete(f) = claimed_allowed_frequency(&linear(1.0), 1).unwrap() else {
            panic!()
        };
        assert_relative_eq!(f[0].omega, 2.5f64.cbrt(), epsilon = 1e-12);
        assert_relative_eq!(f[0].omega, 1.357209, epsilon = 1e-6);
    }

    #[test]
    fn harmonic_limit_unrestricted() {
        let free = PhysicalModel::unit(ModelKind::CoulombHO, 1.0);
        assert_eq!(claimed_allowed_frequency(&free, 2).unwrap(), AllowedFrequencies::Unrestricted);
        assert_eq!(claimed_allowed_frequency(&free, 1), Err(Error::NoFrequency));
    }

    #[test]
    fn distinct_roots_give_distinct_frequencies() {
        for pm in [coulomb(1.0), linear(1.0)] {
            assert_eq!(claimed_allowed_frequency(&pm, 0), Err(Error::NoFrequency));
        }
        for n in 1..8 {
            for pm in [coulomb(1.0), linear(1.0)] {
                let AllowedFrequencies::Discrete(f) = claimed_allowed_frequency(&pm, n).unwrap() else {
                    panic!()
                };
                for x in &f {
                    assert!(truncation_residual(&pm, n, x.omega).unwrap().abs() < 1e-8);
                }
                for (i, x) in f.iter().enumerate() {
                    for y in &f[i + 1..] {
                        assert!((x.omega - y.omega).abs() > 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn coulomb_linear_bisection() {
        let pm = PhysicalModel {
            k: 1.0,
            eta: 0.5,
            ..PhysicalModel::unit(ModelKind::CoulombLinearHO, 1.0)
        };
        let AllowedFrequencies::Discrete(f) = claimed_allowed_frequency(&pm, 1).unwrap() else {
            panic!()
        };
        assert!(!f.is_empty());
        for x in &f {
            assert!(truncation_residual(&pm, 1, x.omega).unwrap().abs() < 1e-8, "{x:?}");
        }
        // with η → 0 the bisection recovers the Coulomb-only frequency
        let pm = PhysicalModel { eta: 1e-9, ..pm };
        let AllowedFrequencies::Discrete(f) = claimed_allowed_frequency(&pm, 1).unwrap() else {
            panic!()
        };
        assert!(f.iter().any(|x| (x.omega - 2.0 / 3.0).abs() < 1e-6), "{f:?}");
    }

    #[test]
    fn harmonic_sweep_is_flat() {
        let pm = PhysicalModel::unit(ModelKind::CoulombHO, 1.0);
        let t = continuity_demo(&pm, Grid::new(0.2, 3.0, 8).unwrap(), 2, 20).unwrap();
        for (nu, band) in t.bands.iter().enumerate() {
            for w in band {
                assert!((w - 2.0 * (2.0 * nu as f64 + 2.0)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sweep_passes_through_truncation_point() {
        let t = continuity_demo(&coulomb(1.0), Grid::new(2.0 / 3.0, 2.0 / 3.0, 1).unwrap(), 1, 30).unwrap();
        assert!((t.bands[0][0] - 6.0).abs() < 1e-4, "{}", t.bands[0][0]);
    }
}
