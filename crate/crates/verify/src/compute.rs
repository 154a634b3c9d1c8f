//! Single-operator evaluation for the `compute` subcommand.

use std::io::Write;

use maxlip_core::io::write_csv;
use maxlip_core::{
    apply, lambda_sharp, lambda_star, lambda_var, lip_seminorm, lux_norm, Cube, GridFunction, OperatorTag,
};
use serde::Serialize;

use crate::catalog::{build_exponent, build_function};
use crate::config::ScenarioConfig;
use crate::error::VerifyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ComputeOp {
    Hl,
    Sharp,
    Fractional,
    Local,
    MaxCommutator,
    CommM,
    CommSharp,
    LuxNorm,
    LipSeminorm,
    LambdaVar,
    LambdaStar,
    LambdaSharp,
}

/// A scalar result with the witness of its supremum, if any.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scalar {
    pub op: String,
    pub value: f64,
    pub witness: String,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Function(GridFunction),
    Scalar(Scalar),
}

fn pick<'a, T>(items: &'a [T], i: usize, what: &str) -> Result<&'a T, VerifyError> {
    items.get(i).ok_or_else(|| {
        VerifyError::Config(format!(
            "compute.{what} = {i} is out of range (bank has {})",
            items.len()
        ))
    })
}

/// Evaluates `op` on the base grid with the inputs named in `cfg.compute`.
pub fn compute(cfg: &ScenarioConfig, op: ComputeOp) -> Result<Output, VerifyError> {
    let spec = cfg
        .grids
        .first()
        .ok_or_else(|| VerifyError::Config("at least one grid is required".into()))?;
    let grid = spec.build()?;
    let c = &cfg.compute;
    let f = build_function(pick(&cfg.functions.f, c.f, "f")?, grid)?;
    let b = build_function(pick(&cfg.functions.b, c.b, "b")?, grid)?;
    let mode = cfg.family_for(grid.cells_per_axis());
    let beta = cfg.beta;
    let tag = match op {
        ComputeOp::Hl => Some(OperatorTag::Hl),
        ComputeOp::Sharp => Some(OperatorTag::Sharp),
        ComputeOp::Fractional => Some(OperatorTag::Fractional(c.alpha.unwrap_or(beta))),
        ComputeOp::Local => {
            let cube = match &c.cube {
                Some(cs) => {
                    if cs.start.len() != grid.dim() {
                        return Err(VerifyError::Config(format!(
                            "compute.cube needs {} start coordinates",
                            grid.dim()
                        )));
                    }
                    Cube::new(&cs.start, cs.side)
                }
                None => grid.whole(),
            };
            Some(OperatorTag::Local(cube))
        }
        ComputeOp::MaxCommutator => Some(OperatorTag::MaxCommutator(b.clone())),
        ComputeOp::CommM => Some(OperatorTag::CommM(b.clone())),
        ComputeOp::CommSharp => Some(OperatorTag::CommSharp(b.clone())),
        _ => None,
    };
    if let Some(tag) = tag {
        return Ok(Output::Function(apply(&tag, &f, mode)?));
    }
    let q = || build_exponent(pick(&cfg.exponents, c.exponent, "exponent")?, grid);
    let name = format!("{op:?}");
    let scalar = match op {
        ComputeOp::LuxNorm => {
            let r = lux_norm(&f, &q()?)?;
            Scalar {
                op: name,
                value: r.value,
                witness: format!("{} iterations, bracket {:?}", r.iterations, r.bracket),
                exact: r.converged,
            }
        }
        _ => {
            let r = match op {
                ComputeOp::LipSeminorm => lip_seminorm(&b, beta)?,
                ComputeOp::LambdaVar => lambda_var(&b, beta, &q()?, mode)?,
                ComputeOp::LambdaStar => lambda_star(&b, beta, &q()?, mode)?,
                _ => lambda_sharp(&b, beta, &q()?, mode)?,
            };
            Scalar {
                op: name,
                value: r.value,
                witness: crate::scenarios::witness_str(&r.witness, &grid),
                exact: r.exact,
            }
        }
    };
    Ok(Output::Scalar(scalar))
}

/// Grid functions go out as CSV, scalars as a JSON object.
pub fn write_output<W: Write>(out: &Output, mut w: W) -> Result<(), VerifyError> {
    match out {
        Output::Function(f) => write_csv(f, w).map_err(|e| VerifyError::Io(e.to_string())),
        Output::Scalar(s) => {
            let text = serde_json::to_string_pretty(s).expect("scalar serializes");
            w.write_all(text.as_bytes())?;
            w.write_all(b"\n")?;
            Ok(())
        }
    }
}
