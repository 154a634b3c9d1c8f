//! Counterexamples: `b = -1` separates the functionals that see the sign
//! from the one that does not, and `|x - 1/2|^gamma` with `gamma < beta`
//! has seminorms that grow without bound under refinement.

use maxlip_core::{lambda_sharp, lambda_star, lambda_var, lip_seminorm, GridFunction};

use super::{witness_str, Context, Result};
use crate::catalog::build_function;
use crate::config::FunctionSpec;
use crate::report::{Check, Relation};

pub fn run(cx: &Context) -> Result<Vec<Check>> {
    let mut checks = minus_one(cx)?;
    checks.extend(non_lipschitz(cx)?);
    Ok(checks)
}

fn minus_one(cx: &Context) -> Result<Vec<Check>> {
    let beta = cx.beta();
    let tol = cx.tol;
    let cells = cx.cfg.counterexample.cells;
    let g = cx.line(cells)?;
    let grid = g.grid;
    let label = g.label();
    let mode = cx.cfg.family_for(cells);
    let exact = 2.0 * grid.spacing().powf(-beta);
    let minus = GridFunction::constant(grid, -1.0)?;
    let plus = GridFunction::constant(grid, 1.0)?;
    let mut checks = Vec::new();
    for (qi, q) in g.exponents() {
        let star = lambda_star(&minus, beta, q, mode)?;
        checks.push(Check::hard(
            format!("counterexamples.star_minus_one.q{qi}.{label}"),
            "Lambda*(-1) = 2 h^{-beta}",
            Relation::Eq,
            star.value,
            exact,
            tol,
            witness_str(&star.witness, &grid),
        ));
        let sharp = lambda_sharp(&minus, beta, q, mode)?;
        checks.push(Check::hard(
            format!("counterexamples.sharp_minus_one.q{qi}.{label}"),
            "Lambda#(-1) = 2 h^{-beta}",
            Relation::Eq,
            sharp.value,
            exact,
            tol,
            witness_str(&sharp.witness, &grid),
        ));
        let var = lambda_var(&minus, beta, q, mode)?;
        checks.push(Check::hard(
            format!("counterexamples.var_minus_one.q{qi}.{label}"),
            "Lambda(-1) = 0",
            Relation::Eq,
            var.value,
            0.0,
            tol,
            witness_str(&var.witness, &grid),
        ));
        let star_plus = lambda_star(&plus, beta, q, mode)?;
        checks.push(Check::hard(
            format!("counterexamples.star_plus_one.q{qi}.{label}"),
            "Lambda*(1) = 0",
            Relation::Eq,
            star_plus.value,
            0.0,
            tol,
            witness_str(&star_plus.witness, &grid),
        ));
    }
    Ok(checks)
}

fn non_lipschitz(cx: &Context) -> Result<Vec<Check>> {
    let beta = cx.beta();
    let gamma = cx.cfg.counterexample.gamma;
    let mut checks = Vec::new();
    let mut previous: Option<(usize, f64, Vec<Option<f64>>)> = None;
    for &n in &cx.cfg.refinement {
        let g = cx.line(n)?;
        let label = g.label();
        let grid = g.grid;
        let mid = grid.origin()[0] + grid.box_side() / 2.0;
        let spec = FunctionSpec::Power {
            center: vec![mid],
            gamma,
            scale: 1.0,
        };
        let b = build_function(&spec, grid)?;
        let lip = lip_seminorm(&b, beta)?.value;
        let mode = cx.cfg.family_for(n);
        let mut stars = vec![None; g.q.len()];
        for (qi, q) in g.exponents() {
            let star = lambda_star(&b, beta, q, mode)?.value;
            checks.push(Check::monitored(
                format!("counterexamples.nonlip_star.q{qi}.{label}"),
                "Lambda*(|x - 1/2|^gamma) grows under refinement",
                Relation::Ge,
                star,
                0.0,
                0.0,
                format!("gamma = {gamma}"),
            ));
            stars[qi] = Some(star);
        }
        checks.push(Check::monitored(
            format!("counterexamples.nonlip_seminorm.{label}"),
            "||b||_Lip of |x - 1/2|^gamma, gamma < beta",
            Relation::Ge,
            lip,
            0.0,
            0.0,
            format!("gamma = {gamma}"),
        ));
        if let Some((m, prev_lip, prev_stars)) = &previous {
            checks.push(Check::hard(
                format!("counterexamples.nonlip_growth.n{m}_n{n}"),
                "||b||_Lip strictly increases under refinement",
                Relation::Gt,
                lip,
                *prev_lip,
                0.0,
                format!("n{m} -> n{n}"),
            ));
            for (qi, (now, before)) in stars.iter().zip(prev_stars).enumerate() {
                if let (Some(now), Some(before)) = (now, before) {
                    checks.push(Check::monitored(
                        format!("counterexamples.nonlip_star_growth.q{qi}.n{m}_n{n}"),
                        "Lambda*(b) increases under refinement",
                        Relation::Gt,
                        *now,
                        *before,
                        0.0,
                        format!("n{m} -> n{n}"),
                    ));
                }
            }
        }
        previous = Some((n, lip, stars));
    }
    Ok(checks)
}
