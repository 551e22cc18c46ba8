//! Tables behind the command-line tool and their CSV/JSON rendering.
//!
//! CSV is byte-stable: header first, `'\n'` line endings and reals printed
//! with 12 significant digits in `%g` style.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::basis::{BasisSpec, OrthonormalBasis};
use crate::error::{domain, Result};
use crate::model::ModelParams;
use crate::oracle::{richardson_refine, OracleGrid};
use crate::physical::{
    claimed_allowed_frequency, claimed_energy, continuity_demo, to_dimensionless, AllowedFrequencies,
    ContinuityTable, PhysicalModel,
};
use crate::ritz::{default_step, hft_residuals, scan_curve, solve_in, Grid, SpectralCurve, DEFAULT_BASIS, DEFAULT_CUTOFF};
use crate::truncation::{
    parity_structure, truncation_polynomial, truncation_solutions, FixedParam, FreeParam, ROOT_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format_g12(*v),
            Cell::Text(s) => csv_escape(s),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Real(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(v) => Some(v as f64),
            Cell::Real(v) => Some(v),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `printf("%.12g", v)`, with `nan`, `inf` and `-inf` for non-finite values.
pub fn format_g12(v: f64) -> String {
    const DIGITS: i32 = 12;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (DIGITS - 1 - exp) as usize, v)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn real(&self, row: usize, name: &str) -> Option<f64> {
        self.rows.get(row)?.get(self.column(name)?)?.as_f64()
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.iter().map(|c| csv_escape(c)).collect::<Vec<_>>().join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> =
                        self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => pretty(&self.to_json_value()),
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Rows `(n, s, i, root, W, c_0..c_n)` in descending root order.
pub fn truncate_table(n: usize, s: f64, fixed: FixedParam) -> Result<Table> {
    let sols = truncation_solutions(n, s, fixed)?;
    let mut columns: Vec<String> = ["n", "s", "i", "root", "W"].map(String::from).into();
    columns.extend((0..=n).map(|j| format!("c_{j}")));
    let mut t = Table::new(columns);
    for sol in sols {
        let mut row = vec![sol.n.into(), sol.s.into(), sol.index.into(), sol.root.into(), sol.w.into()];
        row.extend(sol.poly_coeffs.iter().map(|&c| Cell::Real(c)));
        t.push(row);
    }
    Ok(t)
}

/// Lowest `count` variational eigenvalues with basis size `basis_n`.
pub fn variational_table(p: &ModelParams, basis_n: usize, count: usize) -> Result<Table> {
    let basis = OrthonormalBasis::new(BasisSpec::for_params(p, basis_n)?);
    let r = solve_in(&basis, p, DEFAULT_CUTOFF)?;
    let mut t = Table::new(["nu", "W"]);
    for (nu, &w) in r.eigenvalues.iter().take(count).enumerate() {
        t.push(vec![nu.into(), w.into()]);
    }
    Ok(t)
}

/// One row per grid point: `(param, W_0..W_νmax)`.
pub fn curve_table(curve: &SpectralCurve, param_header: &str) -> Table {
    let mut columns = vec![param_header.to_string()];
    columns.extend((0..curve.band_count()).map(|nu| format!("W_{nu}")));
    let mut t = Table::new(columns);
    for (k, &x) in curve.grid.iter().enumerate() {
        let mut row = vec![Cell::Real(x)];
        row.extend(curve.bands.iter().map(|b| Cell::Real(b[k])));
        t.push(row);
    }
    t
}

pub fn scan_table(template: &ModelParams, axis: FreeParam, grid: Grid, nu_max: usize, basis_n: usize) -> Result<Table> {
    let curve = scan_curve(template, axis, grid, nu_max, basis_n)?;
    Ok(curve_table(&curve, axis.name()))
}

/// Points, curves and guide line for one of the three truncation figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureBundle {
    pub id: u8,
    pub points: Table,
    pub curves: Table,
    pub guide: Table,
}

impl FigureBundle {
    pub fn to_json(&self) -> String {
        let mut obj = Map::new();
        obj.insert("id".into(), Value::from(self.id));
        obj.insert("points".into(), self.points.to_json_value());
        obj.insert("curves".into(), self.curves.to_json_value());
        obj.insert("guide".into(), self.guide.to_json_value());
        pretty(&Value::Object(obj))
    }

    /// `(file name, contents)` for each of the three tables.
    pub fn files(&self, format: Format) -> Vec<(String, String)> {
        let ext = match format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        [("points", &self.points), ("curves", &self.curves), ("guide", &self.guide)]
            .into_iter()
            .map(|(name, t)| (format!("fig{}_{name}.{ext}", self.id), t.render(format)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FigureOptions {
    pub grid_points: usize,
    /// Parameter range of the curves; defaults to 1.05 times the extreme roots.
    pub range: Option<(f64, f64)>,
    /// Basis size of the curves; defaults to the figure's own.
    pub basis_n: Option<usize>,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            grid_points: 201,
            range: None,
            basis_n: None,
        }
    }
}

/// Figure layout: which parameter is fixed, the highest order, and the guide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureSpec {
    pub fixed: FixedParam,
    pub n_max: usize,
    /// Symmetric range about zero (false for the shifted `b = 1` slice).
    pub symmetric: bool,
    /// Default basis size of the curves.
    pub basis_n: usize,
}

pub fn figure_spec(id: u8) -> Result<FigureSpec> {
    match id {
        1 => Ok(FigureSpec {
            fixed: FixedParam::B(0.0),
            n_max: 10,
            symmetric: true,
            basis_n: DEFAULT_BASIS,
        }),
        2 => Ok(FigureSpec {
            fixed: FixedParam::A(0.0),
            n_max: 15,
            symmetric: true,
            basis_n: 60,
        }),
        3 => Ok(FigureSpec {
            fixed: FixedParam::B(1.0),
            n_max: 10,
            symmetric: false,
            basis_n: DEFAULT_BASIS,
        }),
        _ => domain(format!("figure id must be 1, 2 or 3, got {id}")),
    }
}

pub fn figure_bundle(id: u8, opts: &FigureOptions) -> Result<FigureBundle> {
    let spec = figure_spec(id)?;
    let s = 0.0;
    let mut points = Table::new(["n", "i", "param", "W"]);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for n in 0..=spec.n_max {
        for sol in truncation_solutions(n, s, spec.fixed)? {
            lo = lo.min(sol.root);
            hi = hi.max(sol.root);
            points.push(vec![n.into(), sol.index.into(), sol.root.into(), sol.w.into()]);
        }
    }
    let (min, max) = match opts.range {
        Some(r) => r,
        None if spec.symmetric => {
            let m = 1.05 * lo.abs().max(hi.abs());
            (-m, m)
        }
        None => (1.05 * lo.min(0.0), 1.05 * hi.max(0.0)),
    };
    let grid = Grid::new(min, max, opts.grid_points)?;
    let template = match spec.fixed {
        FixedParam::A(a) => ModelParams::from_s(s, a, 0.0)?,
        FixedParam::B(b) => ModelParams::from_s(s, 0.0, b)?,
    };
    let curve = scan_curve(&template, spec.fixed.free(), grid, spec.n_max, opts.basis_n.unwrap_or(spec.basis_n))?;
    let curves = curve_table(&curve, "param");
    let mut guide = Table::new(["param", "W"]);
    for &x in &curve.grid {
        // top order: W = 2(n+s+1) - b²/4 along the figure's free or fixed b
        let b = spec.fixed.point(x).1;
        guide.push(vec![x.into(), crate::truncation::truncation_energy(spec.n_max, s, b).into()]);
    }
    Ok(FigureBundle {
        id,
        points,
        curves,
        guide,
    })
}

/// Outcome of one verification suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: String,
    pub passed: bool,
    pub table: Table,
}

impl CheckReport {
    fn from_table(suite: &str, table: Table) -> Self {
        let col = table.column("pass").expect("check tables carry a pass column");
        let passed = table.rows.iter().all(|r| r[col] == Cell::Bool(true));
        Self {
            suite: suite.into(),
            passed,
            table,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.table.to_csv(),
            Format::Json => {
                let mut obj = Map::new();
                obj.insert("suite".into(), Value::from(self.suite.as_str()));
                obj.insert("passed".into(), Value::from(self.passed));
                obj.insert("rows".into(), self.table.to_json_value());
                pretty(&Value::Object(obj))
            }
        }
    }
}

pub const HFT_TOL: f64 = 1e-3;
pub const POINT_ON_CURVE_TOL: f64 = 1e-4;
pub const ORACLE_TOL: f64 = 1e-2;
pub const UPPER_BOUND_MARGIN: f64 = 5e-3;

/// Difference quotients of `W_ν` against `<1/x>` and `<x>` for `ν ≤ nu_max`.
pub fn check_hft(p: &ModelParams, nu_max: usize, basis_n: usize) -> Result<CheckReport> {
    let mut t = Table::new([
        "nu", "W", "dW_da", "inv_x", "rel_a", "dW_db", "mean_x", "rel_b", "pass",
    ]);
    let h = default_step(p.a).max(default_step(p.b));
    for nu in 0..=nu_max {
        let c = hft_residuals(p, nu, basis_n, h)?;
        let pass = c.rel_a() <= HFT_TOL && c.rel_b() <= HFT_TOL && c.dw_da > 0.0 && c.dw_db > 0.0;
        t.push(vec![
            nu.into(),
            c.w.into(),
            c.dw_da.into(),
            c.inv_x.into(),
            c.rel_a().into(),
            c.dw_db.into(),
            c.mean_x.into(),
            c.rel_b().into(),
            pass.into(),
        ]);
    }
    Ok(CheckReport::from_table("hft", t))
}

/// Every truncation root `i` of order `n ≤ n_max` against `W_{i-1}` at the
/// same parameters.
pub fn check_point_on_curve(n_max: usize, s: f64, fixed: FixedParam, basis_n: usize) -> Result<CheckReport> {
    let basis = OrthonormalBasis::new(BasisSpec::new(s, basis_n)?);
    let sols: Vec<_> = (0..=n_max)
        .map(|n| truncation_solutions(n, s, fixed))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let rows: Vec<Result<Vec<Cell>>> = sols
        .par_iter()
        .map(|sol| {
            let r = solve_in(&basis, &sol.params(), DEFAULT_CUTOFF)?;
            let w_var = r.eigenvalues.get(sol.band()).copied().unwrap_or(f64::NAN);
            let rel = (w_var - sol.w).abs() / sol.w.abs().max(1.0);
            Ok(vec![
                sol.n.into(),
                sol.index.into(),
                sol.root.into(),
                sol.w.into(),
                w_var.into(),
                rel.into(),
                (rel <= POINT_ON_CURVE_TOL).into(),
            ])
        })
        .collect();
    let mut t = Table::new(["n", "i", "param", "W_trunc", "W_var", "rel", "pass"]);
    for row in rows {
        t.push(row?);
    }
    Ok(CheckReport::from_table("point-on-curve", t))
}

/// Parameter sets compared against the finite-difference oracle by default.
pub fn default_oracle_cases() -> Vec<ModelParams> {
    [
        (0.0, 0.0, 0.0),
        (0.0, std::f64::consts::SQRT_2, 0.0),
        (0.0, 0.0, (8.0f64 / 3.0).sqrt()),
        (0.0, 0.5, 1.0),
        (1.0, -1.0, 1.0),
    ]
    .into_iter()
    .map(|(s, a, b)| ModelParams::from_s(s, a, b).expect("finite defaults"))
    .collect()
}

/// Variational bands against the Richardson-refined oracle: agreement within
/// `1e-2` and the variational value no lower than the oracle less `5e-3`.
pub fn check_oracle(cases: &[ModelParams], bands: usize, basis_n: usize) -> Result<CheckReport> {
    let grid = OracleGrid::default();
    let rows: Vec<Result<Vec<Vec<Cell>>>> = cases
        .par_iter()
        .map(|p| {
            let basis = OrthonormalBasis::new(BasisSpec::for_params(p, basis_n)?);
            let var = solve_in(&basis, p, DEFAULT_CUTOFF)?;
            let fd = richardson_refine(p, &grid, bands)?;
            Ok((0..bands)
                .map(|nu| {
                    let w = var.eigenvalues.get(nu).copied().unwrap_or(f64::NAN);
                    let diff = w - fd[nu];
                    let pass = diff.abs() <= ORACLE_TOL && diff >= -UPPER_BOUND_MARGIN;
                    vec![
                        p.s().into(),
                        p.a.into(),
                        p.b.into(),
                        nu.into(),
                        w.into(),
                        fd[nu].into(),
                        diff.into(),
                        pass.into(),
                    ]
                })
                .collect())
        })
        .collect();
    let mut t = Table::new(["s", "a", "b", "nu", "W_var", "W_oracle", "diff", "pass"]);
    for rows in rows {
        for row in rows? {
            t.push(row);
        }
    }
    Ok(CheckReport::from_table("oracle", t))
}

/// `x^{j_n} Q(x²)` structure of the symmetric families and whether zero is
/// a root exactly for even `n`.
pub fn check_parity(n_max: usize, s: f64) -> Result<CheckReport> {
    let mut t = Table::new(["n", "fixed", "j_n", "zero_root", "pass"]);
    for fixed in [FixedParam::B(0.0), FixedParam::A(0.0)] {
        for n in 0..=n_max {
            let q = truncation_polynomial(n, s, fixed);
            let structure = parity_structure(n, &q);
            let sols = truncation_solutions(n, s, fixed)?;
            let zero_root = sols.iter().any(|x| x.root.abs() <= ROOT_TOL);
            let pass = structure.is_ok() && zero_root == (n % 2 == 0);
            let j_n = structure.map_or(-1, |(j, _)| j as i64);
            t.push(vec![
                n.into(),
                fixed_label(fixed).into(),
                Cell::Int(j_n),
                zero_root.into(),
                pass.into(),
            ]);
        }
    }
    Ok(CheckReport::from_table("parity", t))
}

/// Exactly `n + 1` real roots for every family, and sign symmetry of the
/// `a = 0` and `b = 0` root sets.
pub fn check_rootcount(n_max: usize, s: f64) -> Result<CheckReport> {
    let mut t = Table::new(["n", "fixed", "expected", "found", "asymmetry", "pass"]);
    for fixed in [FixedParam::B(0.0), FixedParam::A(0.0), FixedParam::B(1.0)] {
        for n in 0..=n_max {
            let (found, asym) = match truncation_solutions(n, s, fixed) {
                Ok(sols) => {
                    let roots: Vec<f64> = sols.iter().map(|x| x.root).collect();
                    let asym = if fixed.value() == 0.0 {
                        roots
                            .iter()
                            .zip(roots.iter().rev())
                            .map(|(x, y)| (x + y).abs() / (1.0 + x.abs()))
                            .fold(0.0, f64::max)
                    } else {
                        0.0
                    };
                    (roots.len(), asym)
                }
                Err(crate::Error::RootCount { found, .. }) => (found, f64::NAN),
                Err(e) => return Err(e),
            };
            let pass = found == n + 1 && asym <= ROOT_TOL;
            t.push(vec![
                n.into(),
                fixed_label(fixed).into(),
                (n + 1).into(),
                found.into(),
                asym.into(),
                pass.into(),
            ]);
        }
    }
    Ok(CheckReport::from_table("rootcount", t))
}

fn fixed_label(fixed: FixedParam) -> String {
    match fixed {
        FixedParam::A(v) => format!("a={}", format_g12(v)),
        FixedParam::B(v) => format!("b={}", format_g12(v)),
    }
}

/// Allowed frequencies for order `n`, with `n̄ = n + 1` and the energy each
/// frequency implies.
pub fn allowed_frequency_table(pm: &PhysicalModel, n: usize) -> Result<Table> {
    let mut t = Table::new(["n", "n_bar", "i", "root", "omega", "energy"]);
    match claimed_allowed_frequency(pm, n)? {
        AllowedFrequencies::Unrestricted => {
            let e = claimed_energy(pm, n)?;
            t.push(vec![
                n.into(),
                (n + 1).into(),
                Cell::Text("any".into()),
                0.0.into(),
                pm.omega.into(),
                e.into(),
            ]);
        }
        AllowedFrequencies::Discrete(fs) => {
            for f in fs {
                let e = claimed_energy(&pm.with_omega(f.omega), n)?;
                t.push(vec![n.into(), (n + 1).into(), f.index.into(), f.root.into(), f.omega.into(), e.into()]);
            }
        }
    }
    Ok(t)
}

/// Energy formula at the model's own frequency with `δ = 2ℰ/(αħω)`.
pub fn claimed_energy_table(pm: &PhysicalModel, n: usize) -> Result<Table> {
    let (p, scale) = to_dimensionless(pm)?;
    let e = claimed_energy(pm, n)?;
    let mut t = Table::new(["n", "n_bar", "omega", "s", "a", "b", "energy", "delta"]);
    t.push(vec![
        n.into(),
        (n + 1).into(),
        pm.omega.into(),
        p.s().into(),
        p.a.into(),
        p.b.into(),
        e.into(),
        (e / scale).into(),
    ]);
    Ok(t)
}

pub fn continuity_table(table: &ContinuityTable) -> Table {
    let mut columns = vec!["omega".to_string()];
    columns.extend((0..table.bands.len()).map(|nu| format!("delta_{nu}")));
    let mut t = Table::new(columns);
    for (k, &w) in table.omegas.iter().enumerate() {
        let mut row = vec![Cell::Real(w)];
        row.extend(table.bands.iter().map(|b| Cell::Real(b[k])));
        t.push(row);
    }
    t
}

pub fn continuity_report(pm: &PhysicalModel, grid: Grid, nu_max: usize, basis_n: usize) -> Result<Table> {
    Ok(continuity_table(&continuity_demo(pm, grid, nu_max, basis_n)?))
}
