//! Modulars and Luxemburg norms on the discrete measure space.
//!
//! The norm of `f != 0` is the unique root of `lambda -> rho(f / lambda) - 1`,
//! where `rho(g) = sum |g(c)|^{p(c)} h^dim`. The map is continuous and strictly
//! decreasing, so a doubling/halving bracket seeded at `max |f|` followed by
//! bisection finds it.

use crate::error::{Error, Result};
use crate::exponents::{ExponentPair, VariableExponent};
use crate::grid::{Cube, Grid, GridFunction};

/// Relative width at which bisection stops.
pub const NORM_REL_TOL: f64 = 1e-12;
/// Combined budget for bracketing and bisection steps.
pub const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormResult {
    pub value: f64,
    pub iterations: usize,
    pub bracket: (f64, f64),
    pub converged: bool,
}

impl NormResult {
    fn zero() -> Self {
        NormResult {
            value: 0.0,
            iterations: 0,
            bracket: (0.0, 0.0),
            converged: true,
        }
    }
}

fn check_same(f: &GridFunction, p: &VariableExponent) -> Result<()> {
    if f.grid() == p.grid() {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// `sum |a_i / lambda|^{e_i} * weight` over entries with `a_i != 0`.
pub(crate) fn modular_raw(abs: &[f64], exps: &[f64], weight: f64, lambda: f64) -> f64 {
    abs.iter()
        .zip(exps)
        .filter(|(a, _)| **a != 0.0)
        .map(|(a, e)| (a / lambda).powf(*e))
        .sum::<f64>()
        * weight
}

/// Luxemburg norm of the values `vals` (any sign) carrying exponents `exps`,
/// each cell weighing `weight`.
pub(crate) fn luxemburg(vals: &[f64], exps: &[f64], weight: f64) -> Result<NormResult> {
    debug_assert_eq!(vals.len(), exps.len());
    let abs: Vec<f64> = vals.iter().map(|v| v.abs()).collect();
    let seed = abs.iter().fold(0.0, |m: f64, v| m.max(*v));
    if seed == 0.0 {
        return Ok(NormResult::zero());
    }
    let rho = |lambda: f64| modular_raw(&abs, exps, weight, lambda);
    let mut iterations = 0;
    let fail = |lo: f64, hi: f64, iterations: usize| Error::NoConvergence { iterations, lo, hi };

    // bracket with rho(lo) > 1 >= rho(hi)
    let (mut lo, mut hi);
    if rho(seed) > 1.0 {
        lo = seed;
        hi = 2.0 * seed;
        while rho(hi) > 1.0 {
            iterations += 1;
            if iterations >= MAX_ITERATIONS || !hi.is_finite() {
                return Err(fail(lo, hi, iterations));
            }
            lo = hi;
            hi *= 2.0;
        }
    } else {
        hi = seed;
        lo = 0.5 * seed;
        while rho(lo) <= 1.0 {
            iterations += 1;
            if iterations >= MAX_ITERATIONS || lo == 0.0 {
                return Err(fail(lo, hi, iterations));
            }
            hi = lo;
            lo *= 0.5;
        }
    }
    while hi - lo > NORM_REL_TOL * hi {
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(fail(lo, hi, iterations));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if rho(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(NormResult {
        value: 0.5 * (lo + hi),
        iterations,
        bracket: (lo, hi),
        converged: true,
    })
}

/// `sum |f(c)|^{p(c)} h^dim`.
pub fn modular(f: &GridFunction, p: &VariableExponent) -> Result<f64> {
    check_same(f, p)?;
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    Ok(modular_raw(&abs, p.values(), f.grid().cell_measure(), 1.0))
}

/// Luxemburg norm `inf { lambda > 0 : rho(f / lambda) <= 1 }`.
pub fn lux_norm(f: &GridFunction, p: &VariableExponent) -> Result<NormResult> {
    check_same(f, p)?;
    luxemburg(f.values(), p.values(), f.grid().cell_measure())
}

/// Norm of `g * chi_Q` where `on_cube[i]` is the value at the `i`-th cell of
/// `cube.cells(grid)`.
pub(crate) fn norm_on_cube(grid: &Grid, cube: &Cube, on_cube: &[f64], exps: &[f64]) -> Result<f64> {
    let cells = cube.cells(grid);
    let e: Vec<f64> = cells.iter().map(|&i| exps[i]).collect();
    Ok(luxemburg(on_cube, &e, grid.cell_measure())?.value)
}

/// `||chi_Q||` for the exponent values `exps` (one per grid cell).
pub(crate) fn indicator_norm_raw(grid: &Grid, cube: &Cube, exps: &[f64]) -> Result<f64> {
    let ones = vec![1.0; cube.cell_count(grid.dim())];
    norm_on_cube(grid, cube, &ones, exps)
}

/// `||chi_Q||_{p(.)}`.
pub fn indicator_norm(cube: &Cube, p: &VariableExponent) -> Result<f64> {
    p.grid().check_cube(cube)?;
    indicator_norm_raw(p.grid(), cube, p.values())
}

/// Hölder constant `r_p = 1 + 1/p_- - 1/p_+`.
pub fn holder_constant(p: &VariableExponent) -> f64 {
    1.0 + 1.0 / p.p_minus() - 1.0 / p.p_plus()
}

/// `r_p ||f||_p ||g||_{p'} - sum |f g| h^dim`; nonnegative by the generalized
/// Hölder inequality.
pub fn holder_defect(f: &GridFunction, g: &GridFunction, p: &VariableExponent) -> Result<f64> {
    f.same_grid(g)?;
    check_same(f, p)?;
    let nf = lux_norm(f, p)?.value;
    let ng = lux_norm(g, &p.conjugate())?.value;
    let integral: f64 = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| (a * b).abs())
        .sum::<f64>()
        * f.grid().cell_measure();
    Ok(holder_constant(p) * nf * ng - integral)
}

/// `| || |f|^s ||_p - ||f||_{s p}^s |`, which vanishes identically. The right
/// side only needs `(s p)_- >= 1` for the Luxemburg functional to be defined.
pub fn check_s_norm(f: &GridFunction, p: &VariableExponent, s: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::SPower(s));
    }
    check_same(f, p)?;
    let sp: Vec<f64> = p.values().iter().map(|v| s * v).collect();
    if let Some((cell, &value)) = sp.iter().enumerate().find(|(_, v)| !(**v >= 1.0)) {
        return Err(Error::ExponentBelowOne { cell, value });
    }
    let w = f.grid().cell_measure();
    let powered: Vec<f64> = f.values().iter().map(|v| v.abs().powf(s)).collect();
    let lhs = luxemburg(&powered, p.values(), w)?.value;
    let rhs = luxemburg(f.values(), &sp, w)?.value.powf(s);
    Ok((lhs - rhs).abs())
}

/// `|Q|^{-1} ||chi_Q||_q ||chi_Q||_{q'}`.
pub fn cube_duality_product(cube: &Cube, q: &VariableExponent) -> Result<f64> {
    let grid = q.grid();
    grid.check_cube(cube)?;
    let conj: Vec<f64> = q.values().iter().map(|&v| v / (v - 1.0)).collect();
    let a = indicator_norm_raw(grid, cube, q.values())?;
    let b = indicator_norm_raw(grid, cube, &conj)?;
    Ok(a * b / cube.measure(grid))
}

/// `||chi_Q||_p / (|Q|^{beta/n} ||chi_Q||_q)`.
pub fn cube_embedding_ratio(cube: &Cube, pair: &ExponentPair) -> Result<f64> {
    let grid = pair.p().grid();
    grid.check_cube(cube)?;
    let n = grid.dim() as f64;
    let np = indicator_norm_raw(grid, cube, pair.p().values())?;
    let nq = indicator_norm_raw(grid, cube, pair.q().values())?;
    Ok(np / (cube.measure(grid).powf(pair.beta() / n) * nq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::CubeFamily;

    fn unit(n: usize) -> Grid {
        Grid::unit(1, n).unwrap()
    }

    #[test]
    fn modular_examples() {
        let g = unit(8);
        let p = VariableExponent::new(GridFunction::sample(g, |x| 2.0 + x[0]).unwrap()).unwrap();
        let one = GridFunction::constant(g, 1.0).unwrap();
        assert!((modular(&one, &p).unwrap() - 1.0).abs() < 1e-15);
        let two = GridFunction::constant(g, 2.0).unwrap();
        let p2 = VariableExponent::constant(g, 2.0).unwrap();
        assert!((modular(&two, &p2).unwrap() - 4.0).abs() < 1e-14);
        let half = GridFunction::indicator(g, &Cube::interval(0, 4))
            .unwrap()
            .scale(2.0)
            .unwrap();
        assert!((modular(&half, &p2).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn norm_examples() {
        let g = unit(16);
        let p = VariableExponent::constant(g, 3.0).unwrap();
        for c in [0.3, 1.0, 7.5] {
            let f = GridFunction::constant(g, c).unwrap();
            let r = lux_norm(&f, &p).unwrap();
            assert!(r.converged);
            assert!((r.value - c).abs() <= 1e-11 * c);
        }
        let p2 = VariableExponent::constant(g, 2.0).unwrap();
        let f = GridFunction::indicator(g, &Cube::interval(0, 8))
            .unwrap()
            .scale(2.0)
            .unwrap();
        assert!((lux_norm(&f, &p2).unwrap().value - 2f64.sqrt()).abs() < 1e-10);
        let zero = GridFunction::constant(g, 0.0).unwrap();
        assert_eq!(lux_norm(&zero, &p2).unwrap().value, 0.0);
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let f = GridFunction::constant(unit(8), 1.0).unwrap();
        let p = VariableExponent::constant(unit(16), 2.0).unwrap();
        assert_eq!(modular(&f, &p), Err(Error::GridMismatch));
        assert_eq!(lux_norm(&f, &p), Err(Error::GridMismatch));
    }

    #[test]
    fn holder_examples() {
        let g = unit(16);
        let p = VariableExponent::constant(g, 2.0).unwrap();
        let one = GridFunction::constant(g, 1.0).unwrap();
        assert!(holder_defect(&one, &one, &p).unwrap().abs() < 1e-11);
        let q = Cube::interval(0, 8);
        let f = GridFunction::indicator(g, &q).unwrap();
        let gc = GridFunction::indicator(g, &Cube::interval(8, 8)).unwrap();
        let d = holder_defect(&f, &gc, &p).unwrap();
        let expect = lux_norm(&f, &p).unwrap().value * lux_norm(&gc, &p).unwrap().value;
        assert!((d - expect).abs() < 1e-12);
    }

    #[test]
    fn s_norm_examples() {
        let g = unit(16);
        let p = VariableExponent::new(GridFunction::sample(g, |x| 2.0 + x[0]).unwrap()).unwrap();
        let chi = GridFunction::indicator(g, &Cube::interval(3, 5)).unwrap();
        assert!(check_s_norm(&chi, &p, 2.0).unwrap() < 1e-9);
        let f = GridFunction::sample(g, |x| (5.0 * x[0]).sin()).unwrap();
        assert_eq!(check_s_norm(&f, &p, 1.0).unwrap(), 0.0);
        assert!(matches!(check_s_norm(&f, &p, 0.4), Err(Error::ExponentBelowOne { .. })));
        assert!(matches!(check_s_norm(&f, &p, 0.0), Err(Error::SPower(_))));
    }

    #[test]
    fn duality_and_embedding_for_constant_exponents() {
        let g = unit(8);
        let q = VariableExponent::constant(g, 3.0).unwrap();
        let pair = ExponentPair::new(VariableExponent::constant(g, 1.5).unwrap(), 0.25).unwrap();
        for cube in g.cubes(CubeFamily::Full) {
            assert!((cube_duality_product(&cube, &q).unwrap() - 1.0).abs() < 1e-10);
            assert!((cube_embedding_ratio(&cube, &pair).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn duality_inside_constant_piece_of_step_exponent() {
        let g = unit(8);
        let q =
            VariableExponent::new(GridFunction::sample(g, |x| if x[0] < 0.5 { 2.0 } else { 5.0 }).unwrap()).unwrap();
        for cube in [Cube::interval(0, 4), Cube::interval(1, 2), Cube::interval(5, 3)] {
            assert!((cube_duality_product(&cube, &q).unwrap() - 1.0).abs() < 1e-10);
        }
        let straddle = cube_duality_product(&Cube::interval(2, 4), &q).unwrap();
        assert!(straddle.is_finite() && straddle > 0.0);
    }
}
