//! Lipschitz seminorm, mean-oscillation norms and the three variable-exponent
//! Lipschitz functionals, each a supremum over the cube family with a
//! recorded witness.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exponents::VariableExponent;
use crate::grid::{Cube, CubeFamily, Grid, GridFunction};
use crate::lux;
use crate::maximal::{self, OperatorTag};
use crate::par;

/// Exact pair sweeps up to this many cells per axis.
pub const LIP_EXACT_1D: usize = 4096;
pub const LIP_EXACT_2D: usize = 64;

/// Where a supremum was attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Witness {
    Pair(usize, usize),
    Cube(Cube),
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipResult {
    pub value: f64,
    pub witness: Witness,
    /// `false` when only a sample of pairs was examined.
    pub exact: bool,
}

/// Pair sampling used when the exact sweep is too large.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling {
    pub random_pairs: usize,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            random_pairs: 200_000,
            seed: 0x11b_5eed,
        }
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(Error::BetaRange { beta })
    }
}

fn check_grid(b: &GridFunction, q: &VariableExponent) -> Result<()> {
    if b.grid() == q.grid() {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// First strict maximum; ties keep the earlier entry so results do not depend
/// on the backend.
fn first_max<W: Copy>(items: impl IntoIterator<Item = (f64, W)>, empty: W) -> (f64, W) {
    let mut best = (0.0, empty);
    let mut seen = false;
    for (v, w) in items {
        if !seen || v > best.0 {
            best = (v, w);
            seen = true;
        }
    }
    best
}

/// Supremum of `per_cube` over the family, with witness.
fn sup_over_cubes<F>(grid: &Grid, mode: CubeFamily, per_cube: F) -> Result<LipResult>
where
    F: Fn(&Cube) -> Result<f64> + Sync + Send,
{
    let cubes = grid.cubes(mode);
    let values = par::map_slice(&cubes, |q| per_cube(q));
    let mut pairs = Vec::with_capacity(values.len());
    for (v, q) in values.into_iter().zip(&cubes) {
        pairs.push((v?, Witness::Cube(*q)));
    }
    let (value, witness) = first_max(pairs, Witness::None);
    Ok(LipResult {
        value,
        witness,
        exact: true,
    })
}

/// `max |b(x) - b(y)| / |x - y|^beta` over distinct cell centers.
pub fn lip_seminorm(b: &GridFunction, beta: f64) -> Result<LipResult> {
    lip_seminorm_with(b, beta, Sampling::default())
}

pub fn lip_seminorm_with(b: &GridFunction, beta: f64, sampling: Sampling) -> Result<LipResult> {
    check_beta(beta)?;
    let grid = *b.grid();
    let vals = b.values();
    let ratio = |x: usize, y: usize| (vals[x] - vals[y]).abs() / grid.distance(x, y).powf(beta);
    let len = grid.len();
    let exact = match grid.dim() {
        1 => grid.cells_per_axis() <= LIP_EXACT_1D,
        _ => grid.cells_per_axis() <= LIP_EXACT_2D,
    };
    if exact {
        let rows = par::map_indices(len, |x| {
            first_max(
                ((x + 1)..len).map(|y| (ratio(x, y), Witness::Pair(x, y))),
                Witness::None,
            )
        });
        let (value, witness) = first_max(rows, Witness::None);
        return Ok(LipResult { value, witness, exact });
    }
    let n = grid.cells_per_axis();
    let dim = grid.dim();
    let adjacent = par::map_indices(len, |x| {
        let m = grid.multi_index(x);
        let mut cands = Vec::with_capacity(2);
        for (axis, &i) in m[..dim].iter().enumerate() {
            if i + 1 < n {
                let y = if dim == 2 && axis == 0 { x + n } else { x + 1 };
                cands.push((ratio(x, y), Witness::Pair(x, y)));
            }
        }
        first_max(cands, Witness::None)
    });
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let random: Vec<(usize, usize)> = (0..sampling.random_pairs)
        .map(|_| (rng.gen_range(0..len), rng.gen_range(0..len)))
        .filter(|(x, y)| x != y)
        .map(|(x, y)| (x.min(y), x.max(y)))
        .collect();
    let sampled = par::map_slice(&random, |&(x, y)| (ratio(x, y), Witness::Pair(x, y)));
    let (value, witness) = first_max(adjacent.into_iter().chain(sampled), Witness::None);
    Ok(LipResult {
        value,
        witness,
        exact: false,
    })
}

/// `max_Q |Q|^{-beta/n} (avg_Q |b - b_Q|^q)^{1/q}` for a constant `q >= 1`.
pub fn osc_norm_q(b: &GridFunction, beta: f64, q_const: f64, mode: CubeFamily) -> Result<LipResult> {
    check_beta(beta)?;
    if !(q_const >= 1.0 && q_const.is_finite()) {
        return Err(Error::OscExponent(q_const));
    }
    let grid = *b.grid();
    let sums = b.prefix_sums();
    let vals = b.values();
    let n = grid.dim() as f64;
    sup_over_cubes(&grid, mode, |cube| {
        let count = cube.cell_count(grid.dim()) as f64;
        let avg = sums.sum(cube) / count;
        let mean = cube
            .cell_iter(&grid)
            .map(|i| (vals[i] - avg).abs().powf(q_const))
            .sum::<f64>()
            / count;
        Ok(cube.measure(&grid).powf(-beta / n) * mean.powf(1.0 / q_const))
    })
}

/// `|Q|^{-beta/n} ||g chi_Q||_q / ||chi_Q||_q` with `g` given on the cube cells.
fn cube_ratio(grid: &Grid, cube: &Cube, on_cube: &[f64], q: &VariableExponent, beta: f64) -> Result<f64> {
    let num = lux::norm_on_cube(grid, cube, on_cube, q.values())?;
    if num == 0.0 {
        return Ok(0.0);
    }
    let den = lux::indicator_norm_raw(grid, cube, q.values())?;
    let n = grid.dim() as f64;
    Ok(cube.measure(grid).powf(-beta / n) * num / den)
}

/// `(b - b_Q)` on the cells of `cube`.
pub fn deviation_from_mean(b: &GridFunction, cube: &Cube) -> Result<Vec<f64>> {
    let avg = b.average(cube)?;
    Ok(cube.cell_iter(b.grid()).map(|i| b.values()[i] - avg).collect())
}

/// `(b - M_Q(b))` on the cells of `cube`.
pub fn deviation_from_local_max(b: &GridFunction, cube: &Cube, mode: CubeFamily) -> Result<Vec<f64>> {
    let lm = maximal::local_max_in(b, cube, mode)?;
    Ok(cube
        .cell_iter(b.grid())
        .zip(lm.values())
        .map(|(i, m)| b.values()[i] - m)
        .collect())
}

/// `M♯(b chi_Q)` on the cells of `cube`.
pub fn sharp_of_restriction(b: &GridFunction, cube: &Cube, mode: CubeFamily) -> Result<Vec<f64>> {
    let g = b.restrict(cube)?;
    Ok(maximal::sharp_on_region(&g, cube, mode))
}

/// `(b - 2 M♯(b chi_Q))` on the cells of `cube`.
pub fn deviation_from_sharp(b: &GridFunction, cube: &Cube, mode: CubeFamily) -> Result<Vec<f64>> {
    let s = sharp_of_restriction(b, cube, mode)?;
    Ok(cube
        .cell_iter(b.grid())
        .zip(&s)
        .map(|(i, m)| b.values()[i] - 2.0 * m)
        .collect())
}

/// Per-cube term of [`lambda_var`].
pub fn lambda_var_on(b: &GridFunction, beta: f64, q: &VariableExponent, cube: &Cube) -> Result<f64> {
    check_grid(b, q)?;
    cube_ratio(b.grid(), cube, &deviation_from_mean(b, cube)?, q, beta)
}

/// Per-cube term of [`lambda_star`].
pub fn lambda_star_on(b: &GridFunction, beta: f64, q: &VariableExponent, cube: &Cube, mode: CubeFamily) -> Result<f64> {
    check_grid(b, q)?;
    cube_ratio(b.grid(), cube, &deviation_from_local_max(b, cube, mode)?, q, beta)
}

/// Per-cube term of [`lambda_sharp`].
pub fn lambda_sharp_on(
    b: &GridFunction,
    beta: f64,
    q: &VariableExponent,
    cube: &Cube,
    mode: CubeFamily,
) -> Result<f64> {
    check_grid(b, q)?;
    cube_ratio(b.grid(), cube, &deviation_from_sharp(b, cube, mode)?, q, beta)
}

/// `sup_Q |Q|^{-beta/n} ||(b - b_Q) chi_Q||_q / ||chi_Q||_q`.
pub fn lambda_var(b: &GridFunction, beta: f64, q: &VariableExponent, mode: CubeFamily) -> Result<LipResult> {
    check_beta(beta)?;
    check_grid(b, q)?;
    sup_over_cubes(b.grid(), mode, |cube| lambda_var_on(b, beta, q, cube))
}

/// `sup_Q |Q|^{-beta/n} ||(b - M_Q b) chi_Q||_q / ||chi_Q||_q`. Local maxima use
/// the same cube family as the outer supremum.
pub fn lambda_star(b: &GridFunction, beta: f64, q: &VariableExponent, mode: CubeFamily) -> Result<LipResult> {
    check_beta(beta)?;
    check_grid(b, q)?;
    sup_over_cubes(b.grid(), mode, |cube| lambda_star_on(b, beta, q, cube, mode))
}

/// `sup_Q |Q|^{-beta/n} ||(b - 2 M♯(b chi_Q)) chi_Q||_q / ||chi_Q||_q`.
pub fn lambda_sharp(b: &GridFunction, beta: f64, q: &VariableExponent, mode: CubeFamily) -> Result<LipResult> {
    check_beta(beta)?;
    check_grid(b, q)?;
    sup_over_cubes(b.grid(), mode, |cube| lambda_sharp_on(b, beta, q, cube, mode))
}

/// Which test function attained an operator-norm lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BankEntry {
    Bank(usize),
    Indicator(Cube),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormLowerBound {
    pub value: f64,
    pub argmax: BankEntry,
}

/// `max ||T f||_q / ||f||_p` over the bank plus every cube indicator of the
/// family: a certified lower bound for the discrete operator norm.
pub fn opnorm_lower(
    tag: &OperatorTag,
    p: &VariableExponent,
    q: &VariableExponent,
    bank: &[GridFunction],
    mode: CubeFamily,
) -> Result<NormLowerBound> {
    if bank.is_empty() {
        return Err(Error::EmptyBank);
    }
    if let Some(i) = bank.iter().position(GridFunction::is_zero) {
        return Err(Error::ZeroInBank(i));
    }
    let grid = *p.grid();
    if q.grid() != &grid || bank.iter().any(|f| f.grid() != &grid) {
        return Err(Error::GridMismatch);
    }
    tag.validate(&grid)?;
    let mut entries: Vec<BankEntry> = (0..bank.len()).map(BankEntry::Bank).collect();
    entries.extend(grid.cubes(mode).into_iter().map(BankEntry::Indicator));
    let ratios = par::map_slice(&entries, |entry| -> Result<f64> {
        let owned;
        let f = match entry {
            BankEntry::Bank(i) => &bank[*i],
            BankEntry::Indicator(cube) => {
                owned = GridFunction::indicator(grid, cube)?;
                &owned
            }
        };
        let tf = maximal::apply(tag, f, mode)?;
        Ok(lux::lux_norm(&tf, q)?.value / lux::lux_norm(f, p)?.value)
    });
    let mut pairs = Vec::with_capacity(ratios.len());
    for (r, e) in ratios.into_iter().zip(entries) {
        pairs.push((r?, e));
    }
    let (value, argmax) = first_max(pairs, BankEntry::Bank(0));
    Ok(NormLowerBound { value, argmax })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid {
        Grid::unit(1, n).unwrap()
    }

    #[test]
    fn seminorm_examples() {
        let g = grid(4);
        let c = GridFunction::constant(g, 2.0).unwrap();
        assert_eq!(lip_seminorm(&c, 0.5).unwrap().value, 0.0);
        let x = GridFunction::sample(g, |x| x[0]).unwrap();
        let r = lip_seminorm(&x, 0.5).unwrap();
        assert!(r.exact);
        assert!((r.value - 0.75f64.sqrt()).abs() < 1e-15);
        assert_eq!(r.witness, Witness::Pair(0, 3));
        assert!(lip_seminorm(&x, 1.0).is_err());
        assert!(lip_seminorm(&x, 0.0).is_err());
    }

    #[test]
    fn seminorm_of_power_function_approaches_one() {
        let mut last = 0.0;
        for n in [16, 64, 256] {
            let b = GridFunction::sample(grid(n), |x| x[0].powf(0.5)).unwrap();
            let v = lip_seminorm(&b, 0.5).unwrap().value;
            assert!(v <= 1.0 + 1e-12);
            assert!(v >= last);
            last = v;
        }
        assert!(last > 0.9);
    }

    #[test]
    fn sampled_seminorm_is_a_lower_bound() {
        let g = Grid::unit(2, 65).unwrap();
        let b = GridFunction::sample(g, |x| x[0] + 0.5 * x[1]).unwrap();
        let s = lip_seminorm(&b, 0.5).unwrap();
        assert!(!s.exact);
        assert!(s.value > 0.0);
        assert!(s.value <= 1.5f64 * 2f64.sqrt().powf(0.5) + 1e-12);
    }

    #[test]
    fn oscillation_norms_vanish_on_constants() {
        let g = grid(8);
        let c = GridFunction::constant(g, -3.0).unwrap();
        let q = VariableExponent::constant(g, 2.0).unwrap();
        assert_eq!(osc_norm_q(&c, 0.5, 1.0, CubeFamily::Full).unwrap().value, 0.0);
        assert_eq!(lambda_var(&c, 0.5, &q, CubeFamily::Full).unwrap().value, 0.0);
        assert!(osc_norm_q(&c, 0.5, 0.5, CubeFamily::Full).is_err());
    }

    #[test]
    fn star_of_minus_one_is_two_over_h_to_beta() {
        let g = grid(16);
        let b = GridFunction::constant(g, -1.0).unwrap();
        let q = VariableExponent::constant(g, 2.0).unwrap();
        let r = lambda_star(&b, 0.5, &q, CubeFamily::Full).unwrap();
        assert!((r.value - 2.0 * 16f64.sqrt()).abs() < 1e-9);
        assert!(matches!(r.witness, Witness::Cube(c) if c.side() == 1));
        let one = GridFunction::constant(g, 1.0).unwrap();
        assert_eq!(lambda_star(&one, 0.5, &q, CubeFamily::Full).unwrap().value, 0.0);
        let zero = GridFunction::constant(g, 0.0).unwrap();
        assert_eq!(lambda_sharp(&zero, 0.5, &q, CubeFamily::Full).unwrap().value, 0.0);
    }

    #[test]
    fn opnorm_bank_rules() {
        let g = grid(8);
        let p = VariableExponent::constant(g, 2.0).unwrap();
        let f = GridFunction::sample(g, |x| x[0]).unwrap();
        let zero = GridFunction::constant(g, 0.0).unwrap();
        assert_eq!(
            opnorm_lower(&OperatorTag::Hl, &p, &p, &[], CubeFamily::Full),
            Err(Error::EmptyBank)
        );
        assert_eq!(
            opnorm_lower(&OperatorTag::Hl, &p, &p, &[f.clone(), zero], CubeFamily::Full),
            Err(Error::ZeroInBank(1))
        );
        let hl = opnorm_lower(&OperatorTag::Hl, &p, &p, std::slice::from_ref(&f), CubeFamily::Full).unwrap();
        assert!(hl.value >= 1.0);
        let b = GridFunction::constant(g, 4.0).unwrap();
        let zero_op = opnorm_lower(&OperatorTag::MaxCommutator(b), &p, &p, &[f], CubeFamily::Full).unwrap();
        assert_eq!(zero_op.value, 0.0);
    }
}
