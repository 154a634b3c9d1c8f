//! Scenario runners. Each returns a flat list of checks; the report sorts
//! them by id.

mod counterexamples;
mod identities;
mod lemmas;
mod normequiv;
mod theorems;

use maxlip_core::{par, BankEntry, Cube, CubeFamily, Grid, GridFunction, VariableExponent, Witness};

use crate::catalog::{build_exponent, build_function};
use crate::config::{ExponentSpec, GridSpec, Scenario, ScenarioConfig};
use crate::error::VerifyError;
use crate::report::{merge_sweeps, Check, Relation, Report, Sweep};

pub type Result<T> = std::result::Result<T, VerifyError>;

/// Banks and exponents evaluated on one grid.
pub struct GridData {
    pub spec: GridSpec,
    pub grid: Grid,
    pub b: Vec<GridFunction>,
    pub f: Vec<GridFunction>,
    /// `None` for CSV exponents away from the base grid.
    pub q: Vec<Option<VariableExponent>>,
}

impl GridData {
    pub fn build(cfg: &ScenarioConfig, spec: &GridSpec, base: bool) -> Result<Self> {
        let grid = spec.build()?;
        let b = cfg
            .functions
            .b
            .iter()
            .map(|s| build_function(s, grid))
            .collect::<Result<Vec<_>>>()?;
        let f = cfg
            .functions
            .f
            .iter()
            .map(|s| build_function(s, grid))
            .collect::<Result<Vec<_>>>()?;
        let q = cfg
            .exponents
            .iter()
            .map(|s| match s {
                ExponentSpec::Csv { .. } if !base => Ok(None),
                _ => build_exponent(s, grid).map(Some),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GridData {
            spec: spec.clone(),
            grid,
            b,
            f,
            q,
        })
    }

    pub fn label(&self) -> String {
        format!("d{}n{}", self.grid.dim(), self.grid.cells_per_axis())
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Exponents available on this grid, with their bank index.
    pub fn exponents(&self) -> impl Iterator<Item = (usize, &VariableExponent)> {
        self.q
            .iter()
            .enumerate()
            .filter_map(|(i, q)| q.as_ref().map(|q| (i, q)))
    }

    /// Nonnegative symbols, with their bank index.
    pub fn nonneg_b(&self) -> impl Iterator<Item = (usize, &GridFunction)> {
        self.b
            .iter()
            .enumerate()
            .filter(|(_, b)| b.values().iter().all(|v| *v >= 0.0))
    }
}

pub struct Context<'a> {
    pub cfg: &'a ScenarioConfig,
    pub grids: Vec<GridData>,
    pub tol: f64,
}

impl<'a> Context<'a> {
    /// Validates the whole config and evaluates every bank on every grid.
    pub fn new(cfg: &'a ScenarioConfig) -> Result<Self> {
        validate(cfg)?;
        let grids = cfg
            .grids
            .iter()
            .enumerate()
            .map(|(i, g)| GridData::build(cfg, g, i == 0))
            .collect::<Result<Vec<_>>>()?;
        Ok(Context {
            cfg,
            grids,
            tol: cfg.tolerances.identity_tol,
        })
    }

    pub fn base(&self) -> &GridData {
        &self.grids[0]
    }

    pub fn beta(&self) -> f64 {
        self.cfg.beta
    }

    /// The base box at another resolution.
    pub fn refined(&self, cells: usize) -> Result<GridData> {
        GridData::build(self.cfg, &self.cfg.base_grid().with_cells(cells), false)
    }

    /// A one-dimensional grid on the base box (or the unit interval when the
    /// base grid is two-dimensional).
    pub fn line(&self, cells: usize) -> Result<GridData> {
        let base = self.cfg.base_grid();
        let spec = if base.dim == 1 {
            base.with_cells(cells)
        } else {
            GridSpec::unit(1, cells)
        };
        GridData::build(self.cfg, &spec, false)
    }
}

fn config_err(msg: String) -> VerifyError {
    VerifyError::Config(msg)
}

fn validate(cfg: &ScenarioConfig) -> Result<()> {
    if cfg.grids.is_empty() {
        return Err(config_err("at least one grid is required".into()));
    }
    if !(cfg.beta > 0.0 && cfg.beta < 1.0) {
        return Err(config_err(format!("beta = {} must satisfy 0 < beta < 1", cfg.beta)));
    }
    if cfg.exponents.is_empty() || cfg.functions.b.is_empty() || cfg.functions.f.is_empty() {
        return Err(config_err("exponent, b and f banks must be nonempty".into()));
    }
    if cfg.refinement.len() < 2 || cfg.refinement.windows(2).any(|w| w[0] >= w[1]) {
        return Err(config_err(
            "refinement must list at least two increasing cell counts".into(),
        ));
    }
    let tol = &cfg.tolerances;
    if !(tol.identity_tol >= 0.0 && tol.oracle_tol >= 0.0) {
        return Err(config_err("tolerances must be nonnegative".into()));
    }
    let ce = &cfg.counterexample;
    if !(ce.gamma > 0.0 && ce.gamma < cfg.beta) {
        return Err(config_err(format!(
            "counterexample gamma = {} must lie in (0, beta)",
            ce.gamma
        )));
    }
    let o = &cfg.oracle;
    use maxlip_core::maximal::oracle::{ORACLE_MAX_CELLS_1D, ORACLE_MAX_CELLS_2D};
    if o.cells_1d > ORACLE_MAX_CELLS_1D || o.cells_2d > ORACLE_MAX_CELLS_2D {
        return Err(config_err(format!(
            "oracle grids are limited to {ORACLE_MAX_CELLS_1D} cells (dim 1) and {ORACLE_MAX_CELLS_2D} (dim 2)"
        )));
    }
    for &a in &o.alphas {
        if !(a > 0.0 && a < 1.0) {
            return Err(config_err(format!("oracle alpha = {a} must lie in (0, 1)")));
        }
    }
    if !(cfg.normequiv.max_variation >= 1.0) {
        return Err(config_err("normequiv.max_variation must be at least 1".into()));
    }
    for (i, spec) in cfg.grids.iter().enumerate() {
        let grid = spec.build()?;
        for (j, s) in cfg.exponents.iter().enumerate() {
            if matches!(s, ExponentSpec::Csv { .. }) && i > 0 {
                continue;
            }
            build_exponent(s, grid).map_err(|e| config_err(format!("exponent {j}: {e}")))?;
        }
    }
    for &n in cfg.refinement.iter().chain([&ce.cells]) {
        cfg.base_grid()
            .with_cells(n)
            .build()
            .map_err(|e| config_err(format!("refinement grid with {n} cells: {e}")))?;
    }
    Ok(())
}

pub fn cube_str(q: &Cube, dim: usize) -> String {
    format!("cube start={:?} side={}", &q.start()[..dim], q.side())
}

pub fn cell_str(grid: &Grid, idx: usize) -> String {
    format!("cell {:?}", &grid.multi_index(idx)[..grid.dim()])
}

pub fn witness_str(w: &Witness, grid: &Grid) -> String {
    match w {
        Witness::Pair(a, b) => format!("{} / {}", cell_str(grid, *a), cell_str(grid, *b)),
        Witness::Cube(q) => cube_str(q, grid.dim()),
        Witness::None => "none".to_string(),
    }
}

pub fn entry_str(e: &BankEntry, grid: &Grid) -> String {
    match e {
        BankEntry::Bank(i) => format!("f{i}"),
        BankEntry::Indicator(q) => format!("indicator of {}", cube_str(q, grid.dim())),
    }
}

/// Runs `visit` on every cube of the family in parallel, each filling its own
/// set of sweeps, and merges the results in cube order.
pub fn sweep_cubes<F>(grid: &Grid, mode: CubeFamily, relations: &[Relation], visit: F) -> Result<Vec<Sweep>>
where
    F: Fn(&Cube, &mut [Sweep]) -> Result<()> + Sync + Send,
{
    let cubes = grid.cubes(mode);
    sweep_items(&cubes, relations, visit)
}

pub fn sweep_items<T, F>(items: &[T], relations: &[Relation], visit: F) -> Result<Vec<Sweep>>
where
    T: Sync,
    F: Fn(&T, &mut [Sweep]) -> Result<()> + Sync + Send,
{
    let parts = par::map_slice(items, |item| -> Result<Vec<Sweep>> {
        let mut s: Vec<Sweep> = relations.iter().map(|r| Sweep::new(*r)).collect();
        visit(item, &mut s)?;
        Ok(s)
    });
    let mut columns: Vec<Vec<Sweep>> = relations.iter().map(|_| Vec::with_capacity(items.len())).collect();
    for part in parts {
        for (col, s) in columns.iter_mut().zip(part?) {
            col.push(s);
        }
    }
    Ok(relations
        .iter()
        .zip(columns)
        .map(|(r, col)| merge_sweeps(*r, col))
        .collect())
}

/// Records every cell of `cells` into `sweep`, comparing `lhs[i]` with `rhs[i]`.
pub fn push_cells(
    sweep: &mut Sweep,
    grid: &Grid,
    cells: &[usize],
    lhs: &[f64],
    rhs: &[f64],
    context: &dyn Fn() -> String,
) {
    for ((&idx, &l), &r) in cells.iter().zip(lhs).zip(rhs) {
        sweep.push(l, r, || format!("{}, {}", context(), cell_str(grid, idx)));
    }
}

/// Ratio spread `max/min` over a table, with the extreme entries as witness.
pub fn spread_check(id: String, anchor: &str, entries: &[(f64, String)], limit: f64, hard: bool) -> Check {
    let positive: Vec<&(f64, String)> = entries.iter().filter(|(v, _)| *v > 0.0).collect();
    let (lo, hi) = positive
        .iter()
        .fold((None::<&(f64, String)>, None::<&(f64, String)>), |(lo, hi), e| {
            (
                Some(lo.map_or(*e, |l| if e.0 < l.0 { *e } else { l })),
                Some(hi.map_or(*e, |h| if e.0 > h.0 { *e } else { h })),
            )
        });
    let (spread, witness) = match (lo, hi) {
        (Some(lo), Some(hi)) if positive.len() == entries.len() => (
            hi.0 / lo.0,
            format!("min {} at {}, max {} at {}", lo.0, lo.1, hi.0, hi.1),
        ),
        _ => (f64::INFINITY, "table contains nonpositive entries".to_string()),
    };
    if hard {
        Check::hard(id, anchor, Relation::Le, spread, limit, 0.0, witness)
    } else {
        Check::monitored(id, anchor, Relation::Le, spread, limit, 0.0, witness)
    }
}

/// Runs one scenario (or all of them) and returns the unsorted checks.
pub fn run_checks(cfg: &ScenarioConfig, scenario: Scenario) -> Result<Vec<Check>> {
    let cx = Context::new(cfg)?;
    let parts: Vec<Scenario> = match scenario {
        Scenario::All => Scenario::PARTS.to_vec(),
        s => vec![s],
    };
    let mut checks = Vec::new();
    for s in parts {
        let mut part = match s {
            Scenario::Lemmas => lemmas::run(&cx)?,
            Scenario::Identities => identities::run(&cx)?,
            Scenario::Theorem1 => theorems::theorem1(&cx)?,
            Scenario::Theorem2 => theorems::theorem2(&cx)?,
            Scenario::Theorem3 => theorems::theorem3(&cx)?,
            Scenario::Normequiv => normequiv::run(&cx)?,
            Scenario::Counterexamples => counterexamples::run(&cx)?,
            Scenario::All => unreachable!(),
        };
        checks.append(&mut part);
    }
    Ok(checks)
}

/// Runs a scenario and assembles the report, stamped with the current time.
pub fn run_scenario(cfg: &ScenarioConfig, scenario: Scenario) -> Result<Report> {
    let checks = run_checks(cfg, scenario)?;
    let mut echo = cfg.clone();
    echo.scenario = Some(scenario);
    let stamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    Ok(Report::new(scenario.name(), echo, checks, stamp))
}
