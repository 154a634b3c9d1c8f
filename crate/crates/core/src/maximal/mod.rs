//! Maximal operators over the discrete cube family.
//!
//! Fast paths evaluate one scalar per cube (an average from prefix sums, a
//! mean oscillation, ...) and scatter it to cells with sliding-window maxima.
//! The maximal commutator has a kernel that depends on the evaluation point,
//! so it builds one prefix table per cell instead. Naive nested-loop versions
//! live in [`oracle`].

pub mod oracle;

use crate::error::{Error, Result};
use crate::grid::{Cube, CubeFamily, Grid, GridFunction, PrefixSums};
use crate::par;
use crate::window::{cover_max_1d, cover_max_2d, Span};

/// Which cubes take part when evaluating on a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Scope {
    /// Only cubes contained in the region.
    Inside,
    /// Every cube of the grid meeting the region.
    Meeting,
}

/// For each cell of `region` (in `region.cells` order), the max of `value`
/// over the family cubes that contain the cell and respect `scope`.
pub(crate) fn region_cover<F>(grid: &Grid, region: &Cube, mode: CubeFamily, scope: Scope, value: F) -> Vec<f64>
where
    F: Fn(&Cube) -> f64 + Sync + Send,
{
    let dim = grid.dim();
    let n = grid.cells_per_axis();
    let m = region.side();
    let r = region.start();
    let sides = match scope {
        Scope::Inside => mode.sides(m),
        Scope::Meeting => mode.sides(n),
    };
    let mut plan = Vec::with_capacity(sides.len());
    let mut cubes = Vec::new();
    for k in sides {
        let span = |axis: usize| {
            if axis >= dim {
                Span::unit()
            } else {
                match scope {
                    Scope::Inside => Span::inside(r[axis], m, k),
                    Scope::Meeting => Span::meeting(n, r[axis], m, k),
                }
            }
        };
        let (rows, cols) = (span(0), span(1));
        let offset = cubes.len();
        for i in 0..rows.s_count {
            for j in 0..cols.s_count {
                cubes.push(Cube::new(&[rows.s_lo + i, cols.s_lo + j][..dim], k));
            }
        }
        plan.push((rows, cols, offset));
    }
    let values = par::map_slice(&cubes, |q| value(q));
    let mut out = vec![f64::NEG_INFINITY; region.cell_count(dim)];
    for (rows, cols, offset) in plan {
        let starts = &values[offset..offset + rows.s_count * cols.s_count];
        let covered = if dim == 1 {
            cover_max_1d(starts, rows)
        } else {
            cover_max_2d(starts, rows, cols)
        };
        for (o, c) in out.iter_mut().zip(covered) {
            *o = o.max(c);
        }
    }
    out
}

fn whole_cover<F>(grid: &Grid, mode: CubeFamily, value: F) -> GridFunction
where
    F: Fn(&Cube) -> f64 + Sync + Send,
{
    let vals = region_cover(grid, &grid.whole(), mode, Scope::Inside, value);
    GridFunction::from_finite(*grid, vals)
}

/// Mean oscillation `|Q|^{-1} sum_Q |g - g_Q| h^dim` with `g_Q` from prefix sums.
pub(crate) fn mean_oscillation(grid: &Grid, vals: &[f64], sums: &PrefixSums, cube: &Cube) -> f64 {
    let count = cube.cell_count(grid.dim()) as f64;
    let avg = sums.sum(cube) / count;
    cube.cell_iter(grid).map(|i| (vals[i] - avg).abs()).sum::<f64>() / count
}

/// Calls `visit` on every family cube containing cell `idx`.
pub(crate) fn for_each_containing<F: FnMut(&Cube)>(grid: &Grid, idx: usize, sides: &[usize], mut visit: F) {
    let n = grid.cells_per_axis();
    let m = grid.multi_index(idx);
    for &k in sides {
        let lo = |x: usize| (x + 1).saturating_sub(k);
        let hi = |x: usize| x.min(n - k);
        if grid.dim() == 1 {
            for s in lo(m[0])..=hi(m[0]) {
                visit(&Cube::interval(s, k));
            }
        } else {
            for i in lo(m[0])..=hi(m[0]) {
                for j in lo(m[1])..=hi(m[1]) {
                    visit(&Cube::square(i, j, k));
                }
            }
        }
    }
}

/// Hardy–Littlewood maximal function: max over containing cubes of the
/// average of `|f|`.
pub fn hl_max(f: &GridFunction, mode: CubeFamily) -> GridFunction {
    let grid = f.grid();
    let abs = f.abs();
    let sums = abs.prefix_sums();
    let d = grid.dim();
    whole_cover(grid, mode, |q| sums.sum(q) / q.cell_count(d) as f64)
}

/// Sharp maximal function: max over containing cubes of the mean oscillation.
pub fn sharp_max(f: &GridFunction, mode: CubeFamily) -> GridFunction {
    let grid = f.grid();
    let sums = f.prefix_sums();
    whole_cover(grid, mode, |q| mean_oscillation(grid, f.values(), sums, q))
}

/// `M♯(g)` on the cells of `region` only, using every family cube of the grid
/// that meets the region.
pub(crate) fn sharp_on_region(g: &GridFunction, region: &Cube, mode: CubeFamily) -> Vec<f64> {
    let grid = g.grid();
    let sums = g.prefix_sums();
    region_cover(grid, region, mode, Scope::Meeting, |q| {
        mean_oscillation(grid, g.values(), sums, q)
    })
}

pub(crate) fn check_alpha(alpha: f64, dim: usize) -> Result<()> {
    if alpha > 0.0 && alpha < dim as f64 {
        Ok(())
    } else {
        Err(Error::AlphaRange { alpha, dim })
    }
}

/// Fractional maximal function `max |Q|^{alpha/n - 1} int_Q |f|`.
pub fn frac_max(f: &GridFunction, alpha: f64, mode: CubeFamily) -> Result<GridFunction> {
    let grid = f.grid();
    check_alpha(alpha, grid.dim())?;
    let abs = f.abs();
    let sums = abs.prefix_sums();
    let d = grid.dim();
    let expo = alpha / d as f64;
    Ok(whole_cover(grid, mode, |q| {
        q.measure(grid).powf(expo) * (sums.sum(q) / q.cell_count(d) as f64)
    }))
}

/// The local maximal function `M_{Q0}(b)`, defined on the cells of `Q0` only.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMax {
    grid: Grid,
    cube: Cube,
    values: Vec<f64>,
}

impl LocalMax {
    pub fn cube(&self) -> &Cube {
        &self.cube
    }

    /// Values in `cube.cells(grid)` order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at a flat cell index; errors outside `Q0`.
    pub fn at(&self, idx: usize) -> Result<f64> {
        if idx >= self.grid.len() || !self.cube.contains_cell(&self.grid, idx) {
            return Err(Error::OutsideLocalCube {
                cell: idx,
                cube: self.cube,
            });
        }
        let m = self.grid.multi_index(idx);
        let s = self.cube.start();
        let k = self.cube.side();
        let local = match self.grid.dim() {
            1 => m[0] - s[0],
            _ => (m[0] - s[0]) * k + (m[1] - s[1]),
        };
        Ok(self.values[local])
    }

    /// Extends by zero outside `Q0`.
    pub fn to_grid_function(&self) -> GridFunction {
        let mut vals = vec![0.0; self.grid.len()];
        for (i, v) in self.cube.cell_iter(&self.grid).zip(&self.values) {
            vals[i] = *v;
        }
        GridFunction::from_finite(self.grid, vals)
    }
}

/// `M_{Q0}(b)(x) = max { avg_Q |b| : x in Q, Q ⊆ Q0 }` over every subcube.
pub fn local_max(b: &GridFunction, q0: &Cube) -> Result<LocalMax> {
    local_max_in(b, q0, CubeFamily::Full)
}

/// [`local_max`] restricted to subcubes whose side belongs to the family.
pub fn local_max_in(b: &GridFunction, q0: &Cube, mode: CubeFamily) -> Result<LocalMax> {
    let grid = b.grid();
    grid.check_cube(q0)?;
    let abs = b.abs();
    let sums = abs.prefix_sums();
    let d = grid.dim();
    let values = region_cover(grid, q0, mode, Scope::Inside, |q| sums.sum(q) / q.cell_count(d) as f64);
    Ok(LocalMax {
        grid: *grid,
        cube: *q0,
        values,
    })
}

/// Maximal commutator `M_b f(x) = max |Q|^{-1} int_Q |b(x) - b(y)| |f(y)| dy`.
pub fn max_commutator(b: &GridFunction, f: &GridFunction, mode: CubeFamily) -> Result<GridFunction> {
    b.same_grid(f)?;
    let grid = *b.grid();
    let sides = grid.sides(mode);
    let d = grid.dim();
    let (bv, fv) = (b.values(), f.values());
    let vals = par::map_indices(grid.len(), |x| {
        let bx = bv[x];
        let kernel: Vec<f64> = bv.iter().zip(fv).map(|(by, fy)| (bx - by).abs() * fy.abs()).collect();
        let sums = PrefixSums::new(&grid, &kernel);
        let mut best = f64::NEG_INFINITY;
        for_each_containing(&grid, x, &sides, |q| {
            best = best.max(sums.sum(q) / q.cell_count(d) as f64);
        });
        best
    });
    Ok(GridFunction::from_finite(grid, vals))
}

/// Nonlinear commutator `[b, M] f = b M(f) - M(b f)`.
pub fn comm_m(b: &GridFunction, f: &GridFunction, mode: CubeFamily) -> Result<GridFunction> {
    b.same_grid(f)?;
    let bf = b.mul(f)?;
    let (mf, mbf) = par::join(|| hl_max(f, mode), || hl_max(&bf, mode));
    b.mul(&mf)?.sub(&mbf)
}

/// `[b, M♯] f = b M♯(f) - M♯(b f)`.
pub fn comm_sharp(b: &GridFunction, f: &GridFunction, mode: CubeFamily) -> Result<GridFunction> {
    b.same_grid(f)?;
    let bf = b.mul(f)?;
    let (sf, sbf) = par::join(|| sharp_max(f, mode), || sharp_max(&bf, mode));
    b.mul(&sf)?.sub(&sbf)
}

/// Operator selector shared by the oracle check and norm estimates.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorTag {
    Hl,
    Sharp,
    Fractional(f64),
    Local(Cube),
    MaxCommutator(GridFunction),
    CommM(GridFunction),
    CommSharp(GridFunction),
}

impl OperatorTag {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorTag::Hl => "hl_max",
            OperatorTag::Sharp => "sharp_max",
            OperatorTag::Fractional(_) => "frac_max",
            OperatorTag::Local(_) => "local_max",
            OperatorTag::MaxCommutator(_) => "max_commutator",
            OperatorTag::CommM(_) => "comm_m",
            OperatorTag::CommSharp(_) => "comm_sharp",
        }
    }

    /// Checks the tag's own invariants against `grid`.
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        match self {
            OperatorTag::Fractional(alpha) => check_alpha(*alpha, grid.dim()),
            OperatorTag::Local(q0) => grid.check_cube(q0),
            OperatorTag::MaxCommutator(b) | OperatorTag::CommM(b) | OperatorTag::CommSharp(b) => {
                if b.grid() == grid {
                    Ok(())
                } else {
                    Err(Error::GridMismatch)
                }
            }
            OperatorTag::Hl | OperatorTag::Sharp => Ok(()),
        }
    }
}

/// Evaluates the tagged operator on `f`. The local operator is extended by
/// zero outside its cube.
pub fn apply(tag: &OperatorTag, f: &GridFunction, mode: CubeFamily) -> Result<GridFunction> {
    tag.validate(f.grid())?;
    match tag {
        OperatorTag::Hl => Ok(hl_max(f, mode)),
        OperatorTag::Sharp => Ok(sharp_max(f, mode)),
        OperatorTag::Fractional(alpha) => frac_max(f, *alpha, mode),
        OperatorTag::Local(q0) => Ok(local_max_in(f, q0, mode)?.to_grid_function()),
        OperatorTag::MaxCommutator(b) => max_commutator(b, f, mode),
        OperatorTag::CommM(b) => comm_m(b, f, mode),
        OperatorTag::CommSharp(b) => comm_sharp(b, f, mode),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid {
        Grid::unit(1, n).unwrap()
    }

    #[test]
    fn hl_of_indicator_and_constant() {
        let g = grid(8);
        let q = Cube::interval(2, 3);
        let m = hl_max(&GridFunction::indicator(g, &q).unwrap(), CubeFamily::Full);
        for i in q.cells(&g) {
            assert_eq!(m.values()[i], 1.0);
        }
        let c = hl_max(&GridFunction::constant(g, -2.5).unwrap(), CubeFamily::Full);
        assert!(c.values().iter().all(|&v| v == 2.5));
    }

    #[test]
    fn sharp_of_constant_and_indicator() {
        let g = grid(8);
        let s = sharp_max(&GridFunction::constant(g, 3.0).unwrap(), CubeFamily::Full);
        assert!(s.values().iter().all(|&v| v == 0.0));
        let q = Cube::interval(1, 3);
        let s = sharp_max(&GridFunction::indicator(g, &q).unwrap(), CubeFamily::Full);
        for i in q.cells(&g) {
            assert_eq!(s.values()[i], 0.5);
        }
        assert!(s.values().iter().all(|&v| v <= 0.5));
    }

    #[test]
    fn frac_examples() {
        let g = grid(8);
        let q = Cube::interval(4, 2);
        let m = frac_max(&GridFunction::indicator(g, &q).unwrap(), 0.5, CubeFamily::Full).unwrap();
        for i in q.cells(&g) {
            assert!((m.values()[i] - q.measure(&g).powf(0.5)).abs() < 1e-15);
        }
        let c = frac_max(&GridFunction::constant(g, 1.5).unwrap(), 0.3, CubeFamily::Full).unwrap();
        assert!(c.values().iter().all(|&v| (v - 1.5).abs() < 1e-15));
        assert!(frac_max(&c, 1.0, CubeFamily::Full).is_err());
        assert!(frac_max(&c, 0.0, CubeFamily::Full).is_err());
    }

    #[test]
    fn local_max_rightmost_cell() {
        let g = grid(4);
        let b = GridFunction::sample(g, |x| x[0]).unwrap();
        let lm = local_max(&b, &g.whole()).unwrap();
        assert!((lm.at(3).unwrap() - 0.875).abs() < 1e-15);
        for i in 0..4 {
            assert!(lm.at(i).unwrap() >= b.values()[i]);
        }
        let part = local_max(&b, &Cube::interval(1, 2)).unwrap();
        assert!(matches!(part.at(0), Err(Error::OutsideLocalCube { .. })));
        assert!(matches!(part.at(3), Err(Error::OutsideLocalCube { .. })));
        let c = local_max(&GridFunction::constant(g, -0.75).unwrap(), &Cube::interval(0, 3)).unwrap();
        assert!(c.values().iter().all(|&v| v == 0.75));
    }

    #[test]
    fn commutators_vanish_for_constant_symbol() {
        let g = grid(8);
        let f = GridFunction::sample(g, |x| (9.0 * x[0]).cos()).unwrap();
        let b = GridFunction::constant(g, 1.75).unwrap();
        assert!(max_commutator(&b, &f, CubeFamily::Full)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.0));
        assert!(comm_m(&b, &f, CubeFamily::Full)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v.abs() < 1e-15));
        assert!(comm_sharp(&b, &f, CubeFamily::Full)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v.abs() < 1e-14));
    }

    #[test]
    fn operator_tag_validation() {
        let g = grid(8);
        let f = GridFunction::constant(g, 1.0).unwrap();
        assert!(apply(&OperatorTag::Fractional(2.0), &f, CubeFamily::Full).is_err());
        assert!(apply(&OperatorTag::Local(Cube::interval(6, 3)), &f, CubeFamily::Full).is_err());
        let other = GridFunction::constant(grid(4), 1.0).unwrap();
        assert_eq!(
            apply(&OperatorTag::MaxCommutator(other), &f, CubeFamily::Full),
            Err(Error::GridMismatch)
        );
        let local = apply(&OperatorTag::Local(Cube::interval(2, 2)), &f, CubeFamily::Full).unwrap();
        assert_eq!(local.values(), &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    }
}
