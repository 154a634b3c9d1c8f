//! Naive nested-loop evaluations used as reference values. Single-threaded,
//! no prefix sums, no window scatter: for each cell, enumerate the containing
//! cubes and sum over their cells directly.

use super::{check_alpha, OperatorTag};
use crate::error::{Error, Result};
use crate::grid::{Cube, CubeFamily, Grid, GridFunction};

/// Largest grids the oracle accepts.
pub const ORACLE_MAX_CELLS_1D: usize = 64;
pub const ORACLE_MAX_CELLS_2D: usize = 16;

fn naive_sum(grid: &Grid, vals: &[f64], cube: &Cube) -> f64 {
    let mut s = 0.0;
    for i in cube.cells(grid) {
        s += vals[i];
    }
    s
}

fn naive_avg(grid: &Grid, vals: &[f64], cube: &Cube) -> f64 {
    naive_sum(grid, vals, cube) / cube.cell_count(grid.dim()) as f64
}

fn naive_osc(grid: &Grid, vals: &[f64], cube: &Cube) -> f64 {
    let avg = naive_avg(grid, vals, cube);
    let mut s = 0.0;
    for i in cube.cells(grid) {
        s += (vals[i] - avg).abs();
    }
    s / cube.cell_count(grid.dim()) as f64
}

fn sup_over_containing<F: Fn(usize, &Cube) -> f64>(grid: &Grid, mode: CubeFamily, value: F) -> Vec<f64> {
    (0..grid.len())
        .map(|x| {
            grid.cubes_containing_index(x, mode)
                .iter()
                .map(|q| value(x, q))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

pub fn hl_max(f: &GridFunction, mode: CubeFamily) -> GridFunction {
    let grid = f.grid();
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let vals = sup_over_containing(grid, mode, |_, q| naive_avg(grid, &abs, q));
    GridFunction::from_finite(*grid, vals)
}

pub fn sharp_max(f: &GridFunction, mode: CubeFamily) -> GridFunction {
    let grid = f.grid();
    let vals = sup_over_containing(grid, mode, |_, q| naive_osc(grid, f.values(), q));
    GridFunction::from_finite(*grid, vals)
}

pub fn frac_max(f: &GridFunction, alpha: f64, mode: CubeFamily) -> Result<GridFunction> {
    let grid = f.grid();
    check_alpha(alpha, grid.dim())?;
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let n = grid.dim() as f64;
    let vals = sup_over_containing(grid, mode, |_, q| {
        q.measure(grid).powf(alpha / n - 1.0) * naive_sum(grid, &abs, q) * grid.cell_measure()
    });
    Ok(GridFunction::from_finite(*grid, vals))
}

/// Local maximal function extended by zero outside `q0`.
pub fn local_max(b: &GridFunction, q0: &Cube, mode: CubeFamily) -> Result<GridFunction> {
    let grid = b.grid();
    grid.check_cube(q0)?;
    let abs: Vec<f64> = b.values().iter().map(|v| v.abs()).collect();
    let sides = mode.sides(q0.side());
    let vals = (0..grid.len())
        .map(|x| {
            if !q0.contains_cell(grid, x) {
                return 0.0;
            }
            grid.cubes_containing_index(x, CubeFamily::Full)
                .iter()
                .filter(|q| sides.contains(&q.side()) && q0.contains(q, grid.dim()))
                .map(|q| naive_avg(grid, &abs, q))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    Ok(GridFunction::from_finite(*grid, vals))
}

pub fn max_commutator(b: &GridFunction, f: &GridFunction, mode: CubeFamily) -> Result<GridFunction> {
    b.same_grid(f)?;
    let grid = b.grid();
    let (bv, fv) = (b.values(), f.values());
    let vals = sup_over_containing(grid, mode, |x, q| {
        let mut s = 0.0;
        for y in q.cells(grid) {
            s += (bv[x] - bv[y]).abs() * fv[y].abs();
        }
        s / q.cell_count(grid.dim()) as f64
    });
    Ok(GridFunction::from_finite(*grid, vals))
}

pub fn comm_m(b: &GridFunction, f: &GridFunction, mode: CubeFamily) -> Result<GridFunction> {
    let bf = b.mul(f)?;
    b.mul(&hl_max(f, mode))?.sub(&hl_max(&bf, mode))
}

pub fn comm_sharp(b: &GridFunction, f: &GridFunction, mode: CubeFamily) -> Result<GridFunction> {
    let bf = b.mul(f)?;
    b.mul(&sharp_max(f, mode))?.sub(&sharp_max(&bf, mode))
}

/// Naive evaluation of any tagged operator.
pub fn apply(tag: &OperatorTag, f: &GridFunction, mode: CubeFamily) -> Result<GridFunction> {
    tag.validate(f.grid())?;
    match tag {
        OperatorTag::Hl => Ok(hl_max(f, mode)),
        OperatorTag::Sharp => Ok(sharp_max(f, mode)),
        OperatorTag::Fractional(alpha) => frac_max(f, *alpha, mode),
        OperatorTag::Local(q0) => local_max(f, q0, mode),
        OperatorTag::MaxCommutator(b) => max_commutator(b, f, mode),
        OperatorTag::CommM(b) => comm_m(b, f, mode),
        OperatorTag::CommSharp(b) => comm_sharp(b, f, mode),
    }
}

/// Max absolute cellwise deviation between the fast path and the naive
/// oracle, on the full cube family. Refuses grids above the oracle limits.
pub fn oracle_check(tag: &OperatorTag, f: &GridFunction) -> Result<f64> {
    let grid = f.grid();
    let limit = match grid.dim() {
        1 => ORACLE_MAX_CELLS_1D,
        _ => ORACLE_MAX_CELLS_2D,
    };
    if grid.cells_per_axis() > limit {
        return Err(Error::OracleTooLarge {
            dim: grid.dim(),
            cells: grid.cells_per_axis(),
        });
    }
    let fast = super::apply(tag, f, CubeFamily::Full)?;
    let slow = apply(tag, f, CubeFamily::Full)?;
    Ok(fast
        .values()
        .iter()
        .zip(slow.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refuses_large_grids() {
        let f = GridFunction::constant(Grid::unit(1, 65).unwrap(), 1.0).unwrap();
        assert!(matches!(
            oracle_check(&OperatorTag::Hl, &f),
            Err(Error::OracleTooLarge { .. })
        ));
        let f = GridFunction::constant(Grid::unit(2, 17).unwrap(), 1.0).unwrap();
        assert!(matches!(
            oracle_check(&OperatorTag::Hl, &f),
            Err(Error::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn local_oracle_matches_enumeration_example() {
        let g = Grid::unit(1, 4).unwrap();
        let b = GridFunction::sample(g, |x| x[0]).unwrap();
        let lm = local_max(&b, &g.whole(), CubeFamily::Full).unwrap();
        assert!((lm.values()[3] - 0.875).abs() < 1e-15);
    }
}
