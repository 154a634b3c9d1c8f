//! Turns function and exponent specs into grid data.

use std::f64::consts::PI;
use std::fs::File;

use maxlip_core::io::read_csv;
use maxlip_core::{Grid, GridFunction, VariableExponent};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ExponentSpec, FunctionSpec};
use crate::error::VerifyError;

/// Uniform values in `[lo, hi)`, one per cell, from a seeded stream.
pub fn random_function(grid: Grid, seed: u64, lo: f64, hi: f64) -> Result<GridFunction, VerifyError> {
    if !(lo < hi) {
        return Err(VerifyError::Config(format!(
            "random function needs lo < hi, got [{lo}, {hi})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len()).map(|_| rng.gen_range(lo..hi)).collect();
    Ok(GridFunction::new(grid, values)?)
}

fn coord_vec(v: &[f64], dim: usize) -> Vec<f64> {
    match v.len() {
        0 => vec![0.0; dim],
        1 => vec![v[0]; dim],
        _ => v.to_vec(),
    }
}

pub fn build_function(spec: &FunctionSpec, grid: Grid) -> Result<GridFunction, VerifyError> {
    let dim = grid.dim();
    let f = match spec {
        FunctionSpec::Const { value } => GridFunction::constant(grid, *value)?,
        FunctionSpec::Affine { coeffs, offset } => {
            if coeffs.len() > dim {
                return Err(VerifyError::Config(format!(
                    "affine function has {} coefficients for dimension {dim}",
                    coeffs.len()
                )));
            }
            GridFunction::sample(grid, |x| {
                offset + coeffs.iter().zip(x).map(|(c, xi)| c * xi).sum::<f64>()
            })?
        }
        FunctionSpec::Power { center, gamma, scale } => {
            if !(*gamma > 0.0) {
                return Err(VerifyError::Config(format!(
                    "power function needs gamma > 0, got {gamma}"
                )));
            }
            let c = coord_vec(center, dim);
            if c.len() != dim {
                return Err(VerifyError::Config(format!(
                    "power center has {} coordinates for dimension {dim}",
                    c.len()
                )));
            }
            GridFunction::sample(grid, |x| {
                let r = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                scale * r.powf(*gamma)
            })?
        }
        FunctionSpec::Step { at, left, right } => {
            GridFunction::sample(grid, |x| if x[0] < *at { *left } else { *right })?
        }
        FunctionSpec::Sine {
            freq,
            amplitude,
            offset,
            phase,
        } => GridFunction::sample(grid, |x| {
            offset + amplitude * (2.0 * PI * freq * x.iter().sum::<f64>() + phase).sin()
        })?,
        FunctionSpec::Random { seed, lo, hi } => random_function(grid, *seed, *lo, *hi)?,
    };
    Ok(f)
}

/// Position along the first axis rescaled to `[0, 1]` over the box.
fn along(grid: &Grid, x: &[f64]) -> f64 {
    (x[0] - grid.origin()[0]) / grid.box_side()
}

/// Builds and validates an exponent. CSV exponents exist only on grids of
/// the size they were written for.
pub fn build_exponent(spec: &ExponentSpec, grid: Grid) -> Result<VariableExponent, VerifyError> {
    let values = match spec {
        ExponentSpec::Const { value } => GridFunction::constant(grid, *value)?,
        ExponentSpec::Affine { from, to } => GridFunction::sample(grid, |x| from + (to - from) * along(&grid, x))?,
        ExponentSpec::Step { left, right, at } => {
            GridFunction::sample(grid, |x| if along(&grid, x) < *at { *left } else { *right })?
        }
        ExponentSpec::Csv { path } => {
            let file = File::open(path)
                .map_err(|e| VerifyError::Config(format!("cannot open exponent csv {}: {e}", path.display())))?;
            read_csv(grid, file)?
        }
    };
    Ok(VariableExponent::new(values)?)
}

/// A short human-readable label used in witnesses.
pub fn describe_function(spec: &FunctionSpec) -> String {
    match spec {
        FunctionSpec::Const { value } => format!("const({value})"),
        FunctionSpec::Affine { coeffs, offset } => format!("affine({coeffs:?}, {offset})"),
        FunctionSpec::Power { center, gamma, scale } => format!("{scale}*|x-{center:?}|^{gamma}"),
        FunctionSpec::Step { at, left, right } => format!("step({left}|{right} at {at})"),
        FunctionSpec::Sine {
            freq,
            amplitude,
            offset,
            phase,
        } => format!("{offset}+{amplitude}*sin(2pi*{freq}*x+{phase})"),
        FunctionSpec::Random { seed, lo, hi } => format!("random(seed={seed}, [{lo},{hi}))"),
    }
}

pub fn describe_exponent(spec: &ExponentSpec) -> String {
    match spec {
        ExponentSpec::Const { value } => format!("const({value})"),
        ExponentSpec::Affine { from, to } => format!("affine({from}->{to})"),
        ExponentSpec::Step { left, right, at } => format!("step({left}|{right} at {at})"),
        ExponentSpec::Csv { path } => format!("csv({})", path.display()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_functions_are_reproducible() {
        let g = Grid::unit(1, 16).unwrap();
        let a = random_function(g, 7, 0.0, 1.0).unwrap();
        let b = random_function(g, 7, 0.0, 1.0).unwrap();
        let c = random_function(g, 8, 0.0, 1.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.values().iter().all(|v| (0.0..1.0).contains(v)));
    }

    #[test]
    fn power_center_broadcasts() {
        let g = Grid::unit(2, 4).unwrap();
        let spec = FunctionSpec::Power {
            center: vec![0.5],
            gamma: 1.0,
            scale: 1.0,
        };
        let f = build_function(&spec, g).unwrap();
        let expected = (2.0 * 0.125f64 * 0.125).sqrt();
        assert!((f.values()[g.index(&[1, 1]).unwrap()] - expected).abs() < 1e-15);
    }

    #[test]
    fn exponent_profiles() {
        let g = Grid::unit(1, 4).unwrap();
        let step = build_exponent(
            &ExponentSpec::Step {
                left: 2.0,
                right: 4.0,
                at: 0.5,
            },
            g,
        )
        .unwrap();
        assert_eq!(step.values(), &[2.0, 2.0, 4.0, 4.0]);
        let affine = build_exponent(&ExponentSpec::Affine { from: 2.0, to: 3.0 }, g).unwrap();
        assert_eq!(affine.values(), &[2.125, 2.375, 2.625, 2.875]);
        let err = build_exponent(&ExponentSpec::Const { value: 1.0 }, g).unwrap_err();
        assert!(err.to_string().contains("1 < p_-"));
    }
}
