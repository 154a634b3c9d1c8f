//! Variable exponents `p(.)` with `1 < p_- <= p_+ < inf`, conjugation,
//! exponent pairs linked by `1/q = 1/p - beta/n`, and the splitting exponents
//! `q0 = r q`, `r' q`, `p0` used when passing between Lipschitz-type norms.

use std::sync::OnceLock;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::par;

/// Above this many cells the log-Hölder constant is estimated on a sample.
pub const LOG_HOLDER_EXACT_LIMIT: usize = 4096;
const LOG_HOLDER_SAMPLE: usize = 1024;
const LOG_HOLDER_SEED: u64 = 0x5eed_1095;

/// Discrete log-Hölder constant `max |p(x) - p(y)| log(e + 1/|x - y|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogHolder {
    pub value: f64,
    /// `false` when only a sample of pairs was examined (a lower bound).
    pub exact: bool,
}

/// A cellwise exponent in class P.
#[derive(Debug, Clone)]
pub struct VariableExponent {
    values: GridFunction,
    p_minus: f64,
    p_plus: f64,
    log_holder: OnceLock<LogHolder>,
}

impl PartialEq for VariableExponent {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}

impl VariableExponent {
    /// Validates membership in class P: every value finite and `p_- > 1`.
    pub fn new(values: GridFunction) -> Result<Self> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (cell, &v) in values.values().iter().enumerate() {
            if !(v > 1.0) {
                return Err(Error::ExponentTooSmall { cell, value: v });
            }
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok(VariableExponent {
            values,
            p_minus: lo,
            p_plus: hi,
            log_holder: OnceLock::new(),
        })
    }

    pub fn constant(grid: Grid, p: f64) -> Result<Self> {
        Self::new(GridFunction::constant(grid, p)?)
    }

    pub fn grid(&self) -> &Grid {
        self.values.grid()
    }

    pub fn function(&self) -> &GridFunction {
        &self.values
    }

    pub fn values(&self) -> &[f64] {
        self.values.values()
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn is_constant(&self) -> bool {
        self.p_minus == self.p_plus
    }

    /// `p' = p / (p - 1)` cellwise.
    pub fn conjugate(&self) -> Self {
        let vals = self.values().iter().map(|&p| p / (p - 1.0)).collect();
        let f = GridFunction::from_finite(*self.grid(), vals);
        VariableExponent {
            p_minus: self.p_plus / (self.p_plus - 1.0),
            p_plus: self.p_minus / (self.p_minus - 1.0),
            values: f,
            log_holder: OnceLock::new(),
        }
    }

    /// `lambda * p`; stays in class P for `lambda >= 1`.
    pub fn scale(&self, lambda: f64) -> Result<Self> {
        Self::new(self.values.scale(lambda)?)
    }

    /// Cached discrete log-Hölder constant.
    pub fn log_holder(&self) -> LogHolder {
        *self.log_holder.get_or_init(|| log_holder_constant(self))
    }
}

/// Validates a grid function as an exponent of class P.
pub fn validate_p(values: GridFunction) -> Result<VariableExponent> {
    VariableExponent::new(values)
}

/// Discrete log-Hölder constant. Exact over all pairs of distinct cell
/// centers when the grid has at most [`LOG_HOLDER_EXACT_LIMIT`] cells;
/// otherwise the maximum over all adjacent pairs and all pairs inside a
/// seeded random subset of cells.
pub fn log_holder_constant(p: &VariableExponent) -> LogHolder {
    let grid = *p.grid();
    let vals = p.values();
    let term = |a: usize, b: usize| {
        let d = grid.distance(a, b);
        (vals[a] - vals[b]).abs() * (std::f64::consts::E + 1.0 / d).ln()
    };
    if p.is_constant() {
        return LogHolder {
            value: 0.0,
            exact: true,
        };
    }
    let len = grid.len();
    if len <= LOG_HOLDER_EXACT_LIMIT {
        let rows = par::map_indices(len, |a| ((a + 1)..len).map(|b| term(a, b)).fold(0.0, f64::max));
        return LogHolder {
            value: rows.into_iter().fold(0.0, f64::max),
            exact: true,
        };
    }
    let n = grid.cells_per_axis();
    let dim = grid.dim();
    let adjacent = par::map_indices(len, |a| {
        let m = grid.multi_index(a);
        let mut best: f64 = 0.0;
        for (axis, &i) in m[..dim].iter().enumerate() {
            if i + 1 < n {
                let b = if axis == 0 && dim == 2 { a + n } else { a + 1 };
                best = best.max(term(a, b));
            }
        }
        best
    });
    let mut rng = ChaCha8Rng::seed_from_u64(LOG_HOLDER_SEED);
    let subset: Vec<usize> = (0..LOG_HOLDER_SAMPLE).map(|_| rng.gen_range(0..len)).collect();
    let sampled = par::map_indices(subset.len(), |i| {
        subset[i + 1..]
            .iter()
            .filter(|&&b| b != subset[i])
            .map(|&b| term(subset[i], b))
            .fold(0.0, f64::max)
    });
    LogHolder {
        value: adjacent.into_iter().chain(sampled).fold(0.0, f64::max),
        exact: false,
    }
}

/// Exponents `(p, q)` with `1/q = 1/p - beta/n` cellwise, `beta < n/p_+`,
/// and `q_- (n - beta)/n > 1`.
#[derive(Debug, Clone)]
pub struct ExponentPair {
    p: VariableExponent,
    q: VariableExponent,
    beta: f64,
    q0_check: f64,
}

impl ExponentPair {
    /// Builds `q = n p / (n - beta p)` from `p`.
    pub fn new(p: VariableExponent, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        let n = p.grid().dim() as f64;
        let bound = n / p.p_plus();
        if beta >= bound {
            return Err(Error::BetaTooLarge { beta, bound });
        }
        let q_vals = p.values().iter().map(|&pv| n * pv / (n - beta * pv)).collect();
        let q = VariableExponent::new(GridFunction::new(*p.grid(), q_vals)?)?;
        Self::finish(p, q, beta)
    }

    /// Builds `p` from a target `q` via `1/p = 1/q + beta/n`.
    pub fn from_target(q: VariableExponent, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        let n = q.grid().dim() as f64;
        let q0_check = q.p_minus() * (n - beta) / n;
        if !(q0_check > 1.0) {
            return Err(Error::PairCheck { value: q0_check });
        }
        let p_vals = q.values().iter().map(|&qv| 1.0 / (1.0 / qv + beta / n)).collect();
        let p = VariableExponent::new(GridFunction::new(*q.grid(), p_vals)?)?;
        let bound = n / p.p_plus();
        if beta >= bound {
            return Err(Error::BetaTooLarge { beta, bound });
        }
        Self::finish(p, q, beta)
    }

    fn finish(p: VariableExponent, q: VariableExponent, beta: f64) -> Result<Self> {
        let n = p.grid().dim() as f64;
        let q0_check = q.p_minus() * (n - beta) / n;
        if !(q0_check > 1.0) {
            return Err(Error::PairCheck { value: q0_check });
        }
        Ok(ExponentPair { p, q, beta, q0_check })
    }

    pub fn p(&self) -> &VariableExponent {
        &self.p
    }

    pub fn q(&self) -> &VariableExponent {
        &self.q
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn q0_check(&self) -> f64 {
        self.q0_check
    }
}

/// Convenience wrapper for [`ExponentPair::new`].
pub fn build_pair(p: VariableExponent, beta: f64) -> Result<ExponentPair> {
    ExponentPair::new(p, beta)
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(Error::BetaRange { beta })
    }
}

/// Result of [`split_exponents`].
#[derive(Debug, Clone)]
pub struct SplitExponents {
    /// `r q`
    pub q0: VariableExponent,
    /// `r' q` with `1/r + 1/r' = 1`
    pub r_conj_q: VariableExponent,
    /// `1/p0 = 1/q0 + beta/n`
    pub p0: VariableExponent,
    pub r_conj: f64,
}

/// Splits `1/q = 1/(r q) + 1/(r' q)` for `r > n/(n - beta)`.
pub fn split_exponents(q: &VariableExponent, beta: f64, r: f64) -> Result<SplitExponents> {
    let n = q.grid().dim() as f64;
    if !(beta > 0.0 && beta < n) {
        return Err(Error::BetaRange { beta });
    }
    let bound = n / (n - beta);
    if !(r > bound) {
        return Err(Error::SplitRatio { r, bound });
    }
    let grid = *q.grid();
    let r_conj = r / (r - 1.0);
    let q0 = q.scale(r)?;
    let r_conj_q = q.scale(r_conj)?;
    let p0_vals = q0.values().iter().map(|&v| 1.0 / (1.0 / v + beta / n)).collect();
    let p0 = VariableExponent::new(GridFunction::new(grid, p0_vals)?)?;
    Ok(SplitExponents {
        q0,
        r_conj_q,
        p0,
        r_conj,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Cube;

    fn unit(dim: usize, n: usize) -> Grid {
        Grid::unit(dim, n).unwrap()
    }

    fn step(grid: Grid, left: f64, right: f64) -> VariableExponent {
        let f = GridFunction::sample(grid, |x| if x[0] < 0.5 { left } else { right }).unwrap();
        VariableExponent::new(f).unwrap()
    }

    #[test]
    fn constant_exponent_bounds() {
        let p = VariableExponent::constant(unit(1, 8), 2.0).unwrap();
        assert_eq!((p.p_minus(), p.p_plus()), (2.0, 2.0));
        assert_eq!(
            p.log_holder(),
            LogHolder {
                value: 0.0,
                exact: true
            }
        );
    }

    #[test]
    fn rejects_exponent_one() {
        let err = VariableExponent::constant(unit(1, 8), 1.0).unwrap_err();
        assert!(matches!(err, Error::ExponentTooSmall { cell: 0, .. }));
        assert!(err.to_string().contains("1 < p_-"));
        let g = unit(1, 4);
        let f = GridFunction::new(g, vec![2.0, 2.0, 0.5, 2.0]).unwrap();
        assert!(matches!(
            VariableExponent::new(f),
            Err(Error::ExponentTooSmall { cell: 2, .. })
        ));
    }

    #[test]
    fn affine_exponent_extremes() {
        let g = unit(1, 8);
        let h = g.spacing();
        let p = VariableExponent::new(GridFunction::sample(g, |x| 2.0 + x[0]).unwrap()).unwrap();
        assert_eq!(p.p_minus(), 2.0 + h / 2.0);
        assert_eq!(p.p_plus(), 3.0 - h / 2.0);
    }

    #[test]
    fn conjugate_examples() {
        let g = unit(1, 4);
        let two = VariableExponent::constant(g, 2.0).unwrap().conjugate();
        assert!(two.values().iter().all(|&v| v == 2.0));
        let three = VariableExponent::constant(g, 3.0).unwrap().conjugate();
        assert!(three.values().iter().all(|&v| v == 1.5));
        let s = step(g, 2.0, 4.0).conjugate();
        assert_eq!(s.values()[0], 2.0);
        assert!((s.values()[3] - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!((s.p_minus(), s.p_plus()), (4.0 / 3.0, 2.0));
    }

    #[test]
    fn build_pair_examples() {
        let p = VariableExponent::constant(unit(1, 8), 2.0).unwrap();
        let pair = build_pair(p.clone(), 0.25).unwrap();
        assert!(pair.q().values().iter().all(|&q| (q - 4.0).abs() < 1e-12));
        assert!((pair.q0_check() - 3.0).abs() < 1e-12);
        assert!(matches!(build_pair(p, 0.6), Err(Error::BetaTooLarge { .. })));

        let p2 = VariableExponent::constant(unit(2, 4), 2.0).unwrap();
        let pair2 = build_pair(p2, 0.5).unwrap();
        for &q in pair2.q().values() {
            assert!((q - 4.0).abs() < 1e-12);
            assert!((1.0 / 2.0 - 1.0 / q - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn pair_check_rejects_small_q() {
        // q = 2, beta = 1/2 in dimension 1: q(n - beta)/n = 1
        let q = VariableExponent::constant(unit(1, 8), 2.0).unwrap();
        assert!(matches!(
            ExponentPair::from_target(q, 0.5),
            Err(Error::PairCheck { .. })
        ));
        let q = VariableExponent::constant(unit(1, 8), 4.0).unwrap();
        let pair = ExponentPair::from_target(q, 0.5).unwrap();
        assert!(pair.p().values().iter().all(|&p| (p - 4.0 / 3.0).abs() < 1e-12));
    }

    #[test]
    fn split_examples() {
        let q = VariableExponent::constant(unit(1, 8), 2.0).unwrap();
        let s = split_exponents(&q, 0.5, 3.0).unwrap();
        assert!(s.q0.values().iter().all(|&v| (v - 6.0).abs() < 1e-12));
        assert!((s.r_conj - 1.5).abs() < 1e-15);
        assert!(s.r_conj_q.values().iter().all(|&v| (v - 3.0).abs() < 1e-12));
        assert!(s.p0.values().iter().all(|&v| (v - 1.5).abs() < 1e-12));
        assert!(matches!(split_exponents(&q, 0.5, 2.0), Err(Error::SplitRatio { .. })));
    }

    #[test]
    fn log_holder_brute_force_on_four_cells() {
        let g = unit(1, 4);
        let p = VariableExponent::new(GridFunction::sample(g, |x| 2.0 + x[0]).unwrap()).unwrap();
        // |p(x) - p(y)| = |x - y| for this exponent
        let mut want: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                if a != b {
                    let d = (a as f64 - b as f64).abs() * 0.25;
                    want = want.max(d * (std::f64::consts::E + 1.0 / d).ln());
                }
            }
        }
        let got = p.log_holder();
        assert!(got.exact);
        assert!((got.value - want).abs() < 1e-14);
    }

    #[test]
    fn log_holder_sampled_for_large_planar_grids() {
        let g = unit(2, 65);
        let p = VariableExponent::new(GridFunction::sample(g, |x| 2.0 + x[0] * x[1]).unwrap()).unwrap();
        let lh = p.log_holder();
        assert!(!lh.exact);
        assert!(lh.value > 0.0);
        let small = unit(2, 64);
        let p = VariableExponent::new(GridFunction::sample(small, |x| 2.0 + x[0]).unwrap()).unwrap();
        assert!(p.log_holder().exact);
    }

    #[test]
    fn step_exponent_is_constant_inside_each_half() {
        let g = unit(1, 8);
        let s = step(g, 2.0, 4.0);
        let left = Cube::interval(0, 4);
        assert!(left.cells(&g).iter().all(|&i| s.values()[i] == 2.0));
    }
}
