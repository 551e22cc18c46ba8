//! Browser bindings. Each export returns a JSON string; the plain Rust
//! functions behind them are usable (and tested) natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use radial_qes::physical::{claimed_allowed_frequency, claimed_energy, continuity_demo, AllowedFrequencies, ModelKind, PhysicalModel};
use radial_qes::ritz::{scan_curve, Grid};
use radial_qes::truncation::truncation_solutions;
use radial_qes::{FixedParam, ModelParams};

const MAX_ORDER: usize = 20;
const MAX_POINTS: usize = 1001;
const MAX_BASIS: usize = 80;

#[derive(Serialize)]
pub struct Point {
    pub n: usize,
    pub i: usize,
    pub param: f64,
    pub w: f64,
}

#[derive(Serialize)]
pub struct Bands {
    pub param: Vec<f64>,
    pub bands: Vec<Vec<f64>>,
}

#[derive(Serialize)]
pub struct Allowed {
    pub omega: f64,
    pub energy: f64,
}

#[derive(Serialize)]
pub struct Sweep {
    pub allowed: Vec<Allowed>,
    pub unrestricted: bool,
    pub omega: Vec<f64>,
    pub delta: Vec<f64>,
}

fn fixed_param(axis: &str, fixed: f64) -> Result<FixedParam, String> {
    match axis {
        "a" => Ok(FixedParam::B(fixed)),
        "b" => Ok(FixedParam::A(fixed)),
        _ => Err(format!("axis must be \"a\" or \"b\", got {axis:?}")),
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// All truncation points of order `0..=n_max` on the `axis` line; the other
/// parameter is held at `fixed`.
pub fn truncation_points_json(axis: &str, fixed: f64, s: f64, n_max: usize) -> Result<String, String> {
    if n_max > MAX_ORDER {
        return Err(format!("order above {MAX_ORDER} not offered here"));
    }
    let fixed = fixed_param(axis, fixed)?;
    let mut points = Vec::new();
    for n in 0..=n_max {
        for sol in truncation_solutions(n, s, fixed).map_err(|e| e.to_string())? {
            points.push(Point {
                n,
                i: sol.index,
                param: sol.root,
                w: sol.w,
            });
        }
    }
    to_json(&points)
}

/// Variational bands `W_0..W_{bands-1}` along `axis`.
#[allow(clippy::too_many_arguments)]
pub fn band_scan_json(
    axis: &str,
    fixed: f64,
    s: f64,
    min: f64,
    max: f64,
    points: usize,
    bands: usize,
    basis: usize,
) -> Result<String, String> {
    if !(2..=MAX_POINTS).contains(&points) || bands == 0 || basis > MAX_BASIS {
        return Err(format!(
            "need 2..={MAX_POINTS} points, at least one band and basis ≤ {MAX_BASIS}"
        ));
    }
    let fixed = fixed_param(axis, fixed)?;
    let (a, b) = fixed.point(0.0);
    let template = ModelParams::from_s(s, a, b).map_err(|e| e.to_string())?;
    let grid = Grid::new(min, max, points).map_err(|e| e.to_string())?;
    let curve = scan_curve(&template, fixed.free(), grid, bands - 1, basis.max(bands)).map_err(|e| e.to_string())?;
    to_json(&Bands {
        param: curve.grid,
        bands: curve.bands,
    })
}

/// Coulomb-plus-oscillator model (`m = ħ = 1`): the frequencies the order-`n`
/// truncation singles out, and the ground-state `δ_0(ω)` over the sweep.
pub fn frequency_sweep_json(k: f64, l: u32, alpha: f64, n: usize, min: f64, max: f64, points: usize) -> Result<String, String> {
    if !(2..=MAX_POINTS).contains(&points) || n > MAX_ORDER {
        return Err(format!("need 2..={MAX_POINTS} points and order ≤ {MAX_ORDER}"));
    }
    let pm = PhysicalModel {
        k,
        l,
        alpha,
        ..PhysicalModel::unit(ModelKind::CoulombHO, 1.0)
    };
    let (allowed, unrestricted) = match claimed_allowed_frequency(&pm, n) {
        Ok(AllowedFrequencies::Discrete(fs)) => {
            let allowed = fs
                .iter()
                .map(|f| {
                    let energy = claimed_energy(&pm.with_omega(f.omega), n).map_err(|e| e.to_string())?;
                    Ok(Allowed { omega: f.omega, energy })
                })
                .collect::<Result<Vec<_>, String>>()?;
            (allowed, false)
        }
        Ok(AllowedFrequencies::Unrestricted) => (Vec::new(), true),
        Err(radial_qes::Error::NoFrequency) => (Vec::new(), false),
        Err(e) => return Err(e.to_string()),
    };
    let grid = Grid::new(min, max, points).map_err(|e| e.to_string())?;
    if min <= 0.0 {
        return Err("frequencies must be positive".into());
    }
    let table = continuity_demo(&pm, grid, 0, radial_qes::ritz::DEFAULT_BASIS).map_err(|e| e.to_string())?;
    to_json(&Sweep {
        allowed,
        unrestricted,
        omega: table.omegas,
        delta: table.bands.into_iter().next().unwrap_or_default(),
    })
}

#[wasm_bindgen]
pub fn truncation_points(axis: &str, fixed: f64, s: f64, n_max: usize) -> Result<String, JsValue> {
    truncation_points_json(axis, fixed, s, n_max).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn band_scan(
    axis: &str,
    fixed: f64,
    s: f64,
    min: f64,
    max: f64,
    points: usize,
    bands: usize,
    basis: usize,
) -> Result<String, JsValue> {
    band_scan_json(axis, fixed, s, min, max, points, bands, basis).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn frequency_sweep(k: f64, l: u32, alpha: f64, n: usize, min: f64, max: f64, points: usize) -> Result<String, JsValue> {
    frequency_sweep_json(k, l, alpha, n, min, max, points).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn points_for_the_coulomb_slice() {
        let v = parse(truncation_points_json("a", 0.0, 0.0, 2).unwrap());
        let pts = v.as_array().unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[1]["n"], 1);
        assert!((pts[1]["param"].as_f64().unwrap() - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert_eq!(pts[1]["w"], 4.0);
        assert!(truncation_points_json("c", 0.0, 0.0, 2).is_err());
        assert!(truncation_points_json("a", 0.0, 0.0, 99).is_err());
    }

    #[test]
    fn scan_hits_truncation_point() {
        let v = parse(band_scan_json("a", 0.0, 0.0, 0.0, std::f64::consts::SQRT_2, 3, 2, 30).unwrap());
        assert_eq!(v["param"].as_array().unwrap().len(), 3);
        let w0 = v["bands"][0][2].as_f64().unwrap();
        assert!((w0 - 4.0).abs() < 1e-9);
        assert!(band_scan_json("a", 0.0, 0.0, 0.0, 1.0, 1, 2, 30).is_err());
    }

    #[test]
    fn sweep_through_allowed_frequency() {
        let v = parse(frequency_sweep_json(1.0, 0, 1.0, 1, 0.5, 2.0 / 3.0, 5).unwrap());
        assert_eq!(v["allowed"].as_array().unwrap().len(), 1);
        assert!((v["allowed"][0]["omega"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((v["allowed"][0]["energy"].as_f64().unwrap() - 2.0).abs() < 1e-12);
        let delta = v["delta"].as_array().unwrap();
        assert!(delta.iter().all(|d| d.as_f64().unwrap().is_finite()));
        assert!((delta[4].as_f64().unwrap() - 6.0).abs() < 1e-4);
        let v = parse(frequency_sweep_json(0.0, 0, 1.0, 2, 0.5, 1.0, 3).unwrap());
        assert_eq!(v["unrestricted"], true);
    }
}
