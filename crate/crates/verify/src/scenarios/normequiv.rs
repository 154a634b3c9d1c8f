//! Ratio tables of the three variable-exponent Lipschitz functionals against
//! the Lipschitz seminorm across exponents and refinements, and the exponent
//! splitting used to pass between them.

use maxlip_core::lux::indicator_norm;
use maxlip_core::{lambda_sharp, lambda_star, lambda_var, lip_seminorm, split_exponents, CubeFamily, ExponentPair};

use super::{cube_str, spread_check, sweep_cubes, witness_str, Context, Result};
use crate::report::{Check, Relation, Sweep};

#[derive(Clone, Copy)]
enum Functional {
    Var,
    Star,
    Sharp,
}

impl Functional {
    fn name(self) -> &'static str {
        match self {
            Functional::Var => "var",
            Functional::Star => "star",
            Functional::Sharp => "sharp",
        }
    }
}

pub fn run(cx: &Context) -> Result<Vec<Check>> {
    let mut checks = tables(cx)?;
    checks.extend(splitting(cx)?);
    Ok(checks)
}

fn tables(cx: &Context) -> Result<Vec<Check>> {
    let beta = cx.beta();
    let ne = &cx.cfg.normequiv;
    let mut checks = Vec::new();
    let mut tables = std::collections::BTreeMap::<(usize, &'static str), Vec<(f64, String)>>::new();
    for &n in &cx.cfg.refinement {
        let g = cx.refined(n)?;
        let label = g.label();
        let mode = cx.cfg.family_for(n);
        let c2 = (g.dim() as f64).powf(beta / 2.0);
        let nonneg: Vec<usize> = g.nonneg_b().map(|(k, _)| k).collect();
        for (k, b) in g.b.iter().enumerate() {
            let lip = lip_seminorm(b, beta)?;
            let functionals: &[Functional] = if nonneg.contains(&k) {
                &[Functional::Var, Functional::Star, Functional::Sharp]
            } else {
                &[Functional::Var]
            };
            for (qi, q) in g.exponents() {
                for &fun in functionals {
                    let r = match fun {
                        Functional::Var => lambda_var(b, beta, q, mode)?,
                        Functional::Star => lambda_star(b, beta, q, mode)?,
                        Functional::Sharp => lambda_sharp(b, beta, q, mode)?,
                    };
                    let name = fun.name();
                    let ratio = if lip.value > 0.0 { r.value / lip.value } else { 0.0 };
                    let witness = format!(
                        "{}; seminorm witness {}",
                        witness_str(&r.witness, &g.grid),
                        witness_str(&lip.witness, &g.grid)
                    );
                    if let Functional::Var = fun {
                        checks.push(Check::hard(
                            format!("normequiv.var_upper.b{k}.q{qi}.{label}"),
                            "Lambda_{beta,q}(b) <= n^{beta/2} ||b||_Lip",
                            Relation::Le,
                            r.value,
                            c2 * lip.value,
                            cx.tol,
                            witness.clone(),
                        ));
                    }
                    checks.push(Check::monitored(
                        format!("normequiv.{name}_ratio.b{k}.q{qi}.{label}"),
                        "Lambda(b)/||b||_Lip >= ratio floor",
                        Relation::Ge,
                        ratio,
                        ne.ratio_floor,
                        0.0,
                        witness,
                    ));
                    tables
                        .entry((k, name))
                        .or_default()
                        .push((ratio, format!("q{qi} {label}")));
                }
            }
        }
    }
    for ((k, name), t) in tables {
        checks.push(spread_check(
            format!("normequiv.{name}_spread.b{k}"),
            "max/min of Lambda(b)/||b||_Lip over exponents and refinements",
            &t,
            ne.max_variation,
            ne.fail_on_variation,
        ));
    }
    Ok(checks)
}

/// `q0 = r q`, `r' q`, `p0` on the base grid: reciprocal bookkeeping, the
/// admissibility of `(p0, q0)`, and the indicator power identity for `q0`.
fn splitting(cx: &Context) -> Result<Vec<Check>> {
    let beta = cx.beta();
    let g = cx.base();
    let grid = g.grid;
    let dim = g.dim();
    let n = dim as f64;
    let label = g.label();
    let mut checks = Vec::new();
    for (qi, q) in g.exponents() {
        for &r in &cx.cfg.normequiv.split_r {
            let id = |what: &str| format!("normequiv.split_{what}.q{qi}.r{r}.{label}");
            let split = match split_exponents(q, beta, r) {
                Ok(s) => s,
                Err(e) => {
                    checks.push(Check::monitored(
                        id("skipped"),
                        "r > n/(n - beta)",
                        Relation::Gt,
                        r,
                        n / (n - beta),
                        0.0,
                        e.to_string(),
                    ));
                    continue;
                }
            };
            let mut recip = Sweep::new(Relation::Eq);
            let mut gap = Sweep::new(Relation::Eq);
            for i in 0..grid.len() {
                let (qv, q0, rq, p0) = (
                    q.values()[i],
                    split.q0.values()[i],
                    split.r_conj_q.values()[i],
                    split.p0.values()[i],
                );
                recip.push(1.0 / q0 + 1.0 / rq, 1.0 / qv, || super::cell_str(&grid, i));
                gap.push(1.0 / p0 - 1.0 / q0, beta / n, || super::cell_str(&grid, i));
            }
            checks.push(recip.hard(id("reciprocals"), "1/q = 1/(r q) + 1/(r' q)", 1e-12));
            checks.push(gap.hard(id("gap"), "1/p0 - 1/q0 = beta/n", 1e-12));
            let admissible = ExponentPair::from_target(split.q0.clone(), beta).map(|p| p.q0_check());
            let value = match &admissible {
                Ok(v) => *v,
                Err(maxlip_core::Error::PairCheck { value }) => *value,
                Err(e) => return Err(e.clone().into()),
            };
            checks.push(Check::hard(
                id("pair"),
                "(q0)_- (n - beta)/n > 1",
                Relation::Gt,
                value,
                1.0,
                0.0,
                String::new(),
            ));
            let power = sweep_cubes(&grid, CubeFamily::Full, &[Relation::Eq], |cube, s| {
                let lhs = indicator_norm(cube, &split.q0)?;
                let rhs = indicator_norm(cube, q)?.powf(1.0 / r);
                s[0].push(lhs, rhs, || cube_str(cube, dim));
                Ok(())
            })?;
            checks.push(power.into_iter().next().unwrap().hard(
                id("indicator_power"),
                "||chi_Q||_{q0} = ||chi_Q||_q^{1/r}",
                cx.tol,
            ));
        }
    }
    Ok(checks)
}
