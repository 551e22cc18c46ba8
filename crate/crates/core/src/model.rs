//! Dimensionless radial problem, the ansatz wavefunction and Gaussian moments.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{domain, Result};
use crate::quad;

/// Parameters of `u'' + u'/x - γ²/x² u - a/x u - b x u - x² u + W u = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    gamma: f64,
    s: f64,
    pub a: f64,
    pub b: f64,
}

impl ModelParams {
    pub fn new(gamma: f64, a: f64, b: f64) -> Result<Self> {
        if !(gamma.is_finite() && a.is_finite() && b.is_finite()) {
            return domain("model parameters must be finite");
        }
        Ok(Self {
            gamma,
            s: gamma.abs(),
            a,
            b,
        })
    }

    /// Builds the parameters from the indicial exponent, taking `γ = s`.
    pub fn from_s(s: f64, a: f64, b: f64) -> Result<Self> {
        if s < 0.0 {
            return domain(format!("indicial exponent must be nonnegative, got {s}"));
        }
        Self::new(s, a, b)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Indicial exponent `s = |γ|`.
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn with_a(self, a: f64) -> Self {
        Self { a, ..self }
    }

    pub fn with_b(self, b: f64) -> Self {
        Self { b, ..self }
    }
}

/// `V(x) = γ²/x² + a/x + b x + x²`.
pub fn effective_potential(p: &ModelParams, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("potential requires x > 0, got {x}"));
    }
    Ok(p.gamma * p.gamma / (x * x) + p.a / x + p.b * x + x * x)
}

/// `∫₀^∞ x^p e^{-x²} dx = Γ((p+1)/2)/2`.
pub fn moment_integral(p: f64) -> Result<f64> {
    if !(p > -1.0) {
        return domain(format!("moment integral diverges for p = {p}"));
    }
    Ok(0.5 * gamma(0.5 * (p + 1.0)))
}

/// `u(x) = x^s exp(-b x/2 - x²/2) Σ c_j x^j` with `c_0 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialWavefunction {
    s: f64,
    b: f64,
    coeffs: Vec<f64>,
}

impl RadialWavefunction {
    pub fn new(s: f64, b: f64, coeffs: Vec<f64>) -> Result<Self> {
        if s < 0.0 || !s.is_finite() || !b.is_finite() {
            return domain("wavefunction needs finite s >= 0 and finite b");
        }
        match coeffs.first() {
            Some(&1.0) => {}
            _ => return domain("polynomial part must start with c_0 = 1"),
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return domain("polynomial coefficients must be finite");
        }
        Ok(Self { s, b, coeffs })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    fn poly_part(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Value of the ansatz at `x ≥ 0`; at the origin this is `P(0)` for
    /// `s = 0` and zero otherwise.
    pub fn value(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return domain(format!("wavefunction requires x >= 0, got {x}"));
        }
        if x == 0.0 {
            return Ok(if self.s == 0.0 { self.coeffs[0] } else { 0.0 });
        }
        let envelope = (self.s * x.ln() - 0.5 * self.b * x - 0.5 * x * x).exp();
        Ok(envelope * self.poly_part(x))
    }

    /// `∫₀^∞ |u|² x dx`, in closed form when `b = 0`.
    pub fn norm_squared(&self) -> Result<f64> {
        if self.b == 0.0 {
            self.norm_squared_moments()
        } else {
            self.norm_squared_quadrature()
        }
    }

    /// Closed-form norm `Σ c_j c_k M(2s+1+j+k)`, valid only for `b = 0`.
    pub fn norm_squared_moments(&self) -> Result<f64> {
        if self.b != 0.0 {
            return domain("moment expansion of the norm requires b = 0");
        }
        let mut total = 0.0;
        for (j, cj) in self.coeffs.iter().enumerate() {
            for (k, ck) in self.coeffs.iter().enumerate() {
                total += cj * ck * moment_integral(2.0 * self.s + 1.0 + (j + k) as f64)?;
            }
        }
        Ok(total)
    }

    /// Norm by adaptive quadrature on `[0, x_cut]`, where past `x_cut` the
    /// integrand stays below `1e-14` of its peak.
    pub fn norm_squared_quadrature(&self) -> Result<f64> {
        let integrand = |x: f64| {
            let u = self.value(x).unwrap_or(0.0);
            u * u * x
        };
        const STEP: f64 = 0.05;
        // the Gaussian envelope is centred at -b/2; scan past it and past the
        // polynomial's outermost growth before testing the tail
        let min_reach = (-0.5 * self.b).max(0.0) + 1.0;
        let mut peak = 0.0_f64;
        let mut x_cut = STEP;
        loop {
            let v = integrand(x_cut);
            peak = peak.max(v);
            if x_cut > min_reach && v < 1e-14 * peak && peak > 0.0 {
                break;
            }
            if x_cut > 1e3 {
                return domain("norm integrand does not decay");
            }
            x_cut += STEP;
        }
        // scale the absolute tolerance with the integrand size
        let tol = 1e-12 * (peak * x_cut).max(1.0);
        quad::integrate(integrand, 0.0, x_cut, tol)
    }
}

pub fn wavefunction_value(w: &RadialWavefunction, x: f64) -> Result<f64> {
    w.value(x)
}

pub fn norm_squared(w: &RadialWavefunction) -> Result<f64> {
    w.norm_squared()
}
