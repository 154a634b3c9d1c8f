//! Cell-centered grids on a bounded box, cell-aligned cubes and exact
//! integration by summed-area tables.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Uniform cell-centered partition of the box `origin + [0, side]^dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    cells: usize,
    origin: [f64; 2],
    side: f64,
    spacing: f64,
}

impl Grid {
    pub fn new(dim: usize, cells_per_axis: usize, box_origin: &[f64], box_side: f64) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::Dimension(dim));
        }
        if cells_per_axis < 2 {
            return Err(Error::TooFewCells(cells_per_axis));
        }
        if !(box_side.is_finite() && box_side > 0.0) {
            return Err(Error::BoxSide(box_side));
        }
        if box_origin.len() != dim {
            return Err(Error::OriginLength {
                expected: dim,
                got: box_origin.len(),
            });
        }
        let mut origin = [0.0; 2];
        origin[..dim].copy_from_slice(box_origin);
        Ok(Grid {
            dim,
            cells: cells_per_axis,
            origin,
            side: box_side,
            spacing: box_side / cells_per_axis as f64,
        })
    }

    /// Grid on the unit box `[0, 1]^dim`.
    pub fn unit(dim: usize, cells_per_axis: usize) -> Result<Self> {
        Self::new(dim, cells_per_axis, &[0.0; 2][..dim.min(2)], 1.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn box_side(&self) -> f64 {
        self.side
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin[..self.dim]
    }

    /// Number of cells, `N^dim`.
    pub fn len(&self) -> usize {
        self.cells.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Measure of one cell, `h^dim`.
    pub fn cell_measure(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    pub fn total_measure(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    /// Flat (row-major) index of a multi-index.
    pub fn index(&self, cell: &[usize]) -> Result<usize> {
        if cell.len() != self.dim || cell.iter().any(|&c| c >= self.cells) {
            return Err(Error::CellOutsideGrid(cell.to_vec()));
        }
        Ok(match self.dim {
            1 => cell[0],
            _ => cell[0] * self.cells + cell[1],
        })
    }

    /// Multi-index of a flat index; the second entry is 0 in dimension 1.
    pub fn multi_index(&self, idx: usize) -> [usize; 2] {
        match self.dim {
            1 => [idx, 0],
            _ => [idx / self.cells, idx % self.cells],
        }
    }

    /// Cell center; the second coordinate is unused in dimension 1.
    pub fn center(&self, idx: usize) -> [f64; 2] {
        let m = self.multi_index(idx);
        let mut c = [0.0; 2];
        for a in 0..self.dim {
            c[a] = self.origin[a] + (m[a] as f64 + 0.5) * self.spacing;
        }
        c
    }

    /// Euclidean distance between two cell centers.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let (ma, mb) = (self.multi_index(a), self.multi_index(b));
        let mut s = 0.0;
        for axis in 0..self.dim {
            let d = (ma[axis] as f64 - mb[axis] as f64) * self.spacing;
            s += d * d;
        }
        s.sqrt()
    }

    /// The cube covering the whole box.
    pub fn whole(&self) -> Cube {
        Cube {
            start: [0, 0],
            side: self.cells,
        }
    }

    pub fn check_cube(&self, cube: &Cube) -> Result<()> {
        let ok = cube.side >= 1
            && (0..self.dim).all(|a| cube.start[a] + cube.side <= self.cells)
            && (self.dim == 2 || cube.start[1] == 0);
        if ok {
            Ok(())
        } else {
            Err(Error::CubeOutsideGrid(*cube))
        }
    }

    /// Admissible sides of the family, ascending.
    pub fn sides(&self, mode: CubeFamily) -> Vec<usize> {
        mode.sides(self.cells)
    }

    /// Every cube of the family, ordered by side then lexicographic start.
    pub fn cubes(&self, mode: CubeFamily) -> Vec<Cube> {
        let mut out = Vec::new();
        for k in self.sides(mode) {
            let m = self.cells - k + 1;
            match self.dim {
                1 => out.extend((0..m).map(|s| Cube { start: [s, 0], side: k })),
                _ => {
                    for i in 0..m {
                        out.extend((0..m).map(|j| Cube { start: [i, j], side: k }));
                    }
                }
            }
        }
        out
    }

    /// The cubes of the family whose cell range contains `cell`, in the same
    /// order as [`Grid::cubes`].
    pub fn cubes_containing(&self, cell: &[usize], mode: CubeFamily) -> Result<Vec<Cube>> {
        let idx = self.index(cell)?;
        Ok(self.cubes_containing_index(idx, mode))
    }

    pub(crate) fn cubes_containing_index(&self, idx: usize, mode: CubeFamily) -> Vec<Cube> {
        let m = self.multi_index(idx);
        let mut out = Vec::new();
        for k in self.sides(mode) {
            let range = |x: usize| (x + 1).saturating_sub(k)..=x.min(self.cells - k);
            match self.dim {
                1 => out.extend(range(m[0]).map(|s| Cube { start: [s, 0], side: k })),
                _ => {
                    for i in range(m[0]) {
                        out.extend(range(m[1]).map(|j| Cube { start: [i, j], side: k }));
                    }
                }
            }
        }
        out
    }
}

/// Which cube sides take part in discrete suprema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CubeFamily {
    /// Every side `1..=N`.
    #[default]
    Full,
    /// Sides `1, 2, 4, ...` not exceeding `N`.
    DyadicSides,
}

impl CubeFamily {
    pub fn sides(self, n: usize) -> Vec<usize> {
        match self {
            CubeFamily::Full => (1..=n).collect(),
            CubeFamily::DyadicSides => std::iter::successors(Some(1usize), |k| Some(k * 2))
                .take_while(|&k| k <= n)
                .collect(),
        }
    }
}

/// Axis-aligned cube made of whole cells: `side` cells per axis starting at
/// `start`. In dimension 1 the second start coordinate is always 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cube {
    start: [usize; 2],
    side: usize,
}

impl Cube {
    /// `start` has one entry per axis.
    pub fn new(start: &[usize], side: usize) -> Self {
        let mut s = [0; 2];
        for (dst, src) in s.iter_mut().zip(start) {
            *dst = *src;
        }
        Cube { start: s, side }
    }

    pub fn interval(start: usize, side: usize) -> Self {
        Cube {
            start: [start, 0],
            side,
        }
    }

    pub fn square(row: usize, col: usize, side: usize) -> Self {
        Cube {
            start: [row, col],
            side,
        }
    }

    pub fn start(&self) -> [usize; 2] {
        self.start
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn cell_count(&self, dim: usize) -> usize {
        self.side.pow(dim as u32)
    }

    pub fn measure(&self, grid: &Grid) -> f64 {
        (self.side as f64 * grid.spacing()).powi(grid.dim() as i32)
    }

    pub(crate) fn contains_multi(&self, dim: usize, m: [usize; 2]) -> bool {
        (0..dim).all(|a| self.start[a] <= m[a] && m[a] < self.start[a] + self.side)
    }

    pub fn contains_cell(&self, grid: &Grid, idx: usize) -> bool {
        self.contains_multi(grid.dim(), grid.multi_index(idx))
    }

    /// Whether `other` lies inside `self`.
    pub fn contains(&self, other: &Cube, dim: usize) -> bool {
        (0..dim).all(|a| self.start[a] <= other.start[a] && other.start[a] + other.side <= self.start[a] + self.side)
    }

    pub fn intersects(&self, other: &Cube, dim: usize) -> bool {
        (0..dim).all(|a| self.start[a] < other.start[a] + other.side && other.start[a] < self.start[a] + self.side)
    }

    /// Flat indices of the cells in the cube, row-major.
    pub fn cells(&self, grid: &Grid) -> Vec<usize> {
        self.cell_iter(grid).collect()
    }

    pub fn cell_iter(&self, grid: &Grid) -> impl Iterator<Item = usize> {
        let n = grid.cells_per_axis();
        let [a, b] = self.start;
        let side = self.side;
        let (rows, planar) = if grid.dim() == 1 { (1, false) } else { (side, true) };
        (0..rows).flat_map(move |r| {
            let base = if planar { (a + r) * n + b } else { a };
            base..base + side
        })
    }
}

/// Inclusive prefix sums with a zero border: `(N+1)^dim` entries.
#[derive(Debug, Clone)]
pub struct PrefixSums {
    dim: usize,
    stride: usize,
    table: Vec<f64>,
}

impl PrefixSums {
    pub fn new(grid: &Grid, values: &[f64]) -> Self {
        let n = grid.cells_per_axis();
        let stride = n + 1;
        match grid.dim() {
            1 => {
                let mut table = Vec::with_capacity(stride);
                table.push(0.0);
                let mut acc = 0.0;
                for v in values {
                    acc += v;
                    table.push(acc);
                }
                PrefixSums { dim: 1, stride, table }
            }
            _ => {
                let mut table = vec![0.0; stride * stride];
                for i in 0..n {
                    let mut row = 0.0;
                    for j in 0..n {
                        row += values[i * n + j];
                        table[(i + 1) * stride + j + 1] = table[i * stride + j + 1] + row;
                    }
                }
                PrefixSums { dim: 2, stride, table }
            }
        }
    }

    /// Plain sum of the values over the cells of `cube` (no measure factor).
    pub fn sum(&self, cube: &Cube) -> f64 {
        let [a, b] = cube.start;
        let k = cube.side;
        match self.dim {
            1 => self.table[a + k] - self.table[a],
            _ => {
                let s = self.stride;
                self.table[(a + k) * s + b + k] - self.table[a * s + b + k] - self.table[(a + k) * s + b]
                    + self.table[a * s + b]
            }
        }
    }
}

/// Real values on the cells of a grid, row-major in dimension 2.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
    prefix: OnceLock<PrefixSums>,
}

impl PartialEq for GridFunction {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.values == other.values
    }
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Length {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some((cell, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { cell, value });
        }
        Ok(Self::from_finite(grid, values))
    }

    pub(crate) fn from_finite(grid: Grid, values: Vec<f64>) -> Self {
        GridFunction {
            grid,
            values,
            prefix: OnceLock::new(),
        }
    }

    /// Evaluates `formula` at every cell center. The closure receives the
    /// center coordinates (one per axis).
    pub fn sample<F>(grid: Grid, formula: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        let dim = grid.dim();
        let values = (0..grid.len()).map(|i| formula(&grid.center(i)[..dim])).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: Grid, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.len()])
    }

    pub fn indicator(grid: Grid, cube: &Cube) -> Result<Self> {
        grid.check_cube(cube)?;
        let mut values = vec![0.0; grid.len()];
        for i in cube.cells(&grid) {
            values[i] = 1.0;
        }
        Ok(Self::from_finite(grid, values))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Applies `op` cellwise; fails if it produces a non-finite value.
    pub fn map<F: Fn(f64) -> f64>(&self, op: F) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| op(v)).collect())
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &GridFunction, op: F) -> Result<Self> {
        self.same_grid(other)?;
        Self::new(
            self.grid,
            self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect(),
        )
    }

    pub fn abs(&self) -> Self {
        Self::from_finite(self.grid, self.values.iter().map(|v| v.abs()).collect())
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    pub fn mul(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self * chi_Q`.
    pub fn restrict(&self, cube: &Cube) -> Result<Self> {
        self.grid.check_cube(cube)?;
        let mut values = vec![0.0; self.values.len()];
        for i in cube.cells(&self.grid) {
            values[i] = self.values[i];
        }
        Ok(Self::from_finite(self.grid, values))
    }

    pub fn prefix_sums(&self) -> &PrefixSums {
        self.prefix.get_or_init(|| PrefixSums::new(&self.grid, &self.values))
    }

    /// `sum over cells of Q of f(c) h^dim`, by prefix sums.
    pub fn integrate(&self, cube: &Cube) -> Result<f64> {
        self.grid.check_cube(cube)?;
        Ok(self.prefix_sums().sum(cube) * self.grid.cell_measure())
    }

    /// Mean value over `cube`, the cell sum divided by the cell count.
    pub fn average(&self, cube: &Cube) -> Result<f64> {
        self.grid.check_cube(cube)?;
        Ok(self.prefix_sums().sum(cube) / cube.cell_count(self.grid.dim()) as f64)
    }

    /// Integral over the whole box.
    pub fn total(&self) -> f64 {
        self.prefix_sums().sum(&self.grid.whole()) * self.grid.cell_measure()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_grid_geometry() {
        let g = Grid::new(1, 4, &[0.0], 1.0).unwrap();
        assert_eq!(g.spacing(), 0.25);
        let centers: Vec<f64> = (0..4).map(|i| g.center(i)[0]).collect();
        assert_eq!(centers, vec![0.125, 0.375, 0.625, 0.875]);
        assert!((g.spacing() * 4.0 - 1.0).abs() <= f64::EPSILON);
    }

    #[test]
    fn two_dimensional_grid_counts() {
        let g = Grid::new(2, 8, &[0.0, 0.0], 1.0).unwrap();
        assert_eq!(g.len(), 64);
        assert_eq!(g.spacing(), 0.125);
        assert_eq!(g.center(9), [0.1875, 0.1875]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(Grid::new(1, 0, &[0.0], 1.0), Err(Error::TooFewCells(0)));
        assert_eq!(Grid::new(3, 4, &[0.0; 3], 1.0), Err(Error::Dimension(3)));
        assert!(matches!(Grid::new(1, 4, &[0.0], 0.0), Err(Error::BoxSide(_))));
        assert!(matches!(Grid::new(1, 4, &[0.0], -1.0), Err(Error::BoxSide(_))));
        assert!(matches!(Grid::new(2, 4, &[0.0], 1.0), Err(Error::OriginLength { .. })));
    }

    #[test]
    fn sample_uses_cell_centers() {
        let g = Grid::unit(1, 4).unwrap();
        let f = GridFunction::sample(g, |x| x[0]).unwrap();
        assert_eq!(f.values(), &[0.125, 0.375, 0.625, 0.875]);
        let one = GridFunction::sample(g, |_| 1.0).unwrap();
        assert!(one.values().iter().all(|&v| v == 1.0));
        // centers never touch 0
        let inv = GridFunction::sample(g, |x| 1.0 / x[0]).unwrap();
        assert_eq!(inv.values()[0], 8.0);
    }

    #[test]
    fn sample_reports_non_finite_cell() {
        let g = Grid::new(1, 4, &[-0.625], 1.0).unwrap();
        // centers: -0.5, -0.25, 0.0, 0.25
        let err = GridFunction::sample(g, |x| 1.0 / x[0]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { cell: 2, .. }));
    }

    #[test]
    fn integrate_and_average_examples() {
        let g = Grid::unit(1, 4).unwrap();
        let one = GridFunction::constant(g, 1.0).unwrap();
        for k in 1..=4 {
            assert_eq!(one.integrate(&Cube::interval(0, k)).unwrap(), k as f64 * 0.25);
        }
        let x = GridFunction::sample(g, |x| x[0]).unwrap();
        assert_eq!(x.integrate(&g.whole()).unwrap(), 0.5);
        assert_eq!(x.average(&g.whole()).unwrap(), 0.5);
        let c = GridFunction::constant(g, 3.5).unwrap();
        for q in g.cubes(CubeFamily::Full) {
            assert_eq!(c.average(&q).unwrap(), 3.5);
        }
        let left = GridFunction::indicator(g, &Cube::interval(0, 2)).unwrap();
        assert_eq!(left.average(&g.whole()).unwrap(), 0.5);
        assert_eq!(left.integrate(&Cube::interval(2, 2)).unwrap(), 0.0);
        assert!(matches!(
            left.integrate(&Cube::interval(3, 2)),
            Err(Error::CubeOutsideGrid(_))
        ));
    }

    #[test]
    fn indicator_examples() {
        let g = Grid::unit(1, 4).unwrap();
        let q = Cube::interval(0, 2);
        let chi = GridFunction::indicator(g, &q).unwrap();
        assert_eq!(chi.values(), &[1.0, 1.0, 0.0, 0.0]);
        assert_eq!(chi.integrate(&q).unwrap(), q.measure(&g));
        let all = GridFunction::indicator(g, &g.whole()).unwrap();
        assert!(all.values().iter().all(|&v| v == 1.0));
        assert!(GridFunction::indicator(g, &Cube::interval(2, 3)).is_err());
    }

    #[test]
    fn enumeration_counts() {
        let g = Grid::unit(1, 4).unwrap();
        assert_eq!(g.cubes(CubeFamily::Full).len(), 10);
        assert_eq!(g.cubes(CubeFamily::DyadicSides).len(), 8);
        let g2 = Grid::unit(2, 2).unwrap();
        assert_eq!(g2.cubes(CubeFamily::Full).len(), 5);
        let cubes = g.cubes(CubeFamily::Full);
        assert_eq!(cubes[0], Cube::interval(0, 1));
        assert_eq!(cubes[4], Cube::interval(0, 2));
        assert_eq!(cubes[9], Cube::interval(0, 4));
    }

    #[test]
    fn containing_cubes() {
        let g = Grid::unit(1, 4).unwrap();
        let at0 = g.cubes_containing(&[0], CubeFamily::Full).unwrap();
        assert_eq!(at0, (1..=4).map(|k| Cube::interval(0, k)).collect::<Vec<_>>());
        // brute force over the 10 cubes
        let all = g.cubes(CubeFamily::Full);
        let brute: Vec<Cube> = all.iter().copied().filter(|q| q.contains_cell(&g, 1)).collect();
        // k = 1: {1}; k = 2: {0, 1}; k = 3: {0, 1}; k = 4: {0}
        assert_eq!(brute.len(), 6);
        assert_eq!(g.cubes_containing(&[1], CubeFamily::Full).unwrap(), brute);
        assert!(g.cubes_containing(&[4], CubeFamily::Full).is_err());
    }
}
