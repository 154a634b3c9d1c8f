//! Proof-step inequalities for the maximal commutator and the two nonlinear
//! commutators, plus monitored operator-norm ratio tables.

use maxlip_core::lip::{lambda_var_on, sharp_of_restriction};
use maxlip_core::{
    comm_m, comm_sharp, cube_duality_product, frac_max, holder_constant, lip_seminorm, local_max, lux_norm,
    max_commutator, opnorm_lower, Cube, CubeFamily, ExponentPair, GridFunction, OperatorTag,
};

use super::{cube_str, entry_str, push_cells, spread_check, sweep_cubes, Context, GridData, Result};
use crate::report::{Check, Relation, Sweep};

const FULL: CubeFamily = CubeFamily::Full;

fn lip_const(cx: &Context, b: &GridFunction) -> Result<f64> {
    Ok(lip_seminorm(b, cx.beta())?.value)
}

/// `n^{beta/2}`.
fn c2(cx: &Context, g: &GridData) -> f64 {
    (g.dim() as f64).powf(cx.beta() / 2.0)
}

/// Cellwise `lhs(f) <= factor * M_beta f` over the `f` bank.
fn dominated_by_fractional<F>(cx: &Context, g: &GridData, factor: f64, lhs: F, bk: usize) -> Result<Sweep>
where
    F: Fn(&GridFunction) -> Result<GridFunction>,
{
    let mut s = Sweep::new(Relation::Le);
    for (j, f) in g.f.iter().enumerate() {
        let l = lhs(f)?;
        let r = frac_max(f, cx.beta(), FULL)?;
        let cells: Vec<usize> = (0..g.grid.len()).collect();
        let rhs: Vec<f64> = r.values().iter().map(|v| factor * v).collect();
        push_cells(&mut s, &g.grid, &cells, l.values(), &rhs, &|| format!("b{bk}, f{j}"));
    }
    Ok(s)
}

/// Monitored `opnorm_lower(T_b)/||b||_Lip` tables across refinements, and
/// optionally the hard transfer bound against the fractional maximal
/// function.
fn operator_tables<T>(
    cx: &Context,
    prefix: &str,
    make: T,
    transfer: Option<f64>,
    nonneg_only: bool,
) -> Result<Vec<Check>>
where
    T: Fn(&GridFunction) -> OperatorTag,
{
    let beta = cx.beta();
    let mut checks = Vec::new();
    let mut tables = std::collections::BTreeMap::<(usize, usize), Vec<(f64, String)>>::new();
    for &n in &cx.cfg.refinement {
        let g = cx.refined(n)?;
        let label = g.label();
        let pairs: Vec<(usize, ExponentPair)> = g
            .exponents()
            .filter_map(|(qi, q)| ExponentPair::from_target(q.clone(), beta).ok().map(|p| (qi, p)))
            .collect();
        let symbols: Vec<(usize, &GridFunction)> = if nonneg_only {
            g.nonneg_b().collect()
        } else {
            g.b.iter().enumerate().collect()
        };
        for (qi, pair) in &pairs {
            let frac = match transfer {
                Some(_) => Some(opnorm_lower(
                    &OperatorTag::Fractional(beta),
                    pair.p(),
                    pair.q(),
                    &g.f,
                    CubeFamily::DyadicSides,
                )?),
                None => None,
            };
            for &(k, b) in &symbols {
                let lip = lip_const(cx, b)?;
                let lb = opnorm_lower(&make(b), pair.p(), pair.q(), &g.f, CubeFamily::DyadicSides)?;
                let ratio = if lip > 0.0 { lb.value / lip } else { 0.0 };
                checks.push(Check::monitored(
                    format!("{prefix}.norm_ratio.b{k}.q{qi}.{label}"),
                    "||T_b||_{p->q} / ||b||_Lip bounded",
                    Relation::Ge,
                    ratio,
                    0.0,
                    0.0,
                    entry_str(&lb.argmax, &g.grid),
                ));
                tables.entry((k, *qi)).or_default().push((ratio, label.clone()));
                if let (Some(factor), Some(frac)) = (transfer, &frac) {
                    checks.push(Check::hard(
                        format!("{prefix}.norm_transfer.b{k}.q{qi}.{label}"),
                        "lower bound for ||T_b||_{p->q} <= c n^{beta/2} ||b||_Lip * lower bound for ||M_beta||_{p->q}",
                        Relation::Le,
                        lb.value,
                        factor * c2(cx, &g) * lip * frac.value,
                        cx.tol,
                        format!(
                            "{} vs {}",
                            entry_str(&lb.argmax, &g.grid),
                            entry_str(&frac.argmax, &g.grid)
                        ),
                    ));
                }
            }
        }
    }
    for ((k, qi), t) in tables {
        checks.push(spread_check(
            format!("{prefix}.norm_ratio_spread.b{k}.q{qi}"),
            "max/min of operator norm ratios across refinements",
            &t,
            cx.cfg.normequiv.max_variation,
            false,
        ));
    }
    Ok(checks)
}

/// The maximal commutator `M_b`.
pub fn theorem1(cx: &Context) -> Result<Vec<Check>> {
    let beta = cx.beta();
    let tol = cx.tol;
    let mut checks = Vec::new();
    for g in &cx.grids {
        let label = g.label();
        let grid = g.grid;
        let dim = g.dim();
        let n = dim as f64;
        for (k, b) in g.b.iter().enumerate() {
            let lip = lip_const(cx, b)?;
            let dom = dominated_by_fractional(cx, g, c2(cx, g) * lip, |f| Ok(max_commutator(b, f, FULL)?), k)?;
            checks.push(dom.hard(
                format!("theorem1.frac_domination.b{k}.{label}"),
                "M_b f <= n^{beta/2} ||b||_Lip M_beta f",
                tol,
            ));
            if dim != 1 {
                continue;
            }
            let exps: Vec<_> = g.exponents().collect();
            let mut rels = vec![Relation::Le];
            rels.extend(exps.iter().flat_map(|_| [Relation::Le, Relation::Le]));
            let s = sweep_cubes(&grid, FULL, &rels, |q, s| {
                let ctx = || cube_str(q, dim);
                let cells = q.cells(&grid);
                let chi = GridFunction::indicator(grid, q)?;
                let mb = max_commutator(b, &chi, FULL)?;
                let avg = b.average(q)?;
                let dev: Vec<f64> = cells.iter().map(|&i| (b.values()[i] - avg).abs()).collect();
                let mb_on: Vec<f64> = cells.iter().map(|&i| mb.values()[i]).collect();
                push_cells(&mut s[0], &grid, &cells, &dev, &mb_on, &ctx);
                let mut dev_full = vec![0.0; grid.len()];
                for (&i, d) in cells.iter().zip(&dev) {
                    dev_full[i] = *d;
                }
                let dev_gf = GridFunction::new(grid, dev_full)?;
                let measure = q.measure(&grid);
                let lower = dev.iter().sum::<f64>() * grid.cell_measure() / measure.powf(1.0 + beta / n);
                for (e, (_, qv)) in exps.iter().enumerate() {
                    let lhs = lux_norm(&dev_gf, qv)?.value;
                    let rhs = lux_norm(&mb, qv)?.value;
                    s[1 + 2 * e].push(lhs, rhs, ctx);
                    let lam = lambda_var_on(b, beta, qv, q)?;
                    let chain = holder_constant(qv) * lam * cube_duality_product(q, qv)?;
                    s[2 + 2 * e].push(lower, chain, ctx);
                }
                Ok(())
            })?;
            let mut it = s.into_iter();
            checks.push(it.next().unwrap().hard(
                format!("theorem1.pointwise_deviation.b{k}.{label}"),
                "|b - b_Q| <= M_b(chi_Q) on Q",
                tol,
            ));
            for (qi, _) in &exps {
                checks.push(it.next().unwrap().hard(
                    format!("theorem1.norm_deviation.b{k}.q{qi}.{label}"),
                    "||(b - b_Q) chi_Q||_q <= ||M_b(chi_Q)||_q",
                    tol,
                ));
                checks.push(it.next().unwrap().hard(
                    format!("theorem1.lower_chain.b{k}.q{qi}.{label}"),
                    "|Q|^{-1-beta/n} int_Q |b - b_Q| <= r_q Lambda_Q(b) |Q|^{-1} ||chi_Q||_q ||chi_Q||_q'",
                    tol,
                ));
            }
        }
    }
    checks.extend(operator_tables(
        cx,
        "theorem1",
        |b| OperatorTag::MaxCommutator(b.clone()),
        Some(1.0),
        false,
    )?);
    Ok(checks)
}

/// The nonlinear commutator `[b, M]`.
pub fn theorem2(cx: &Context) -> Result<Vec<Check>> {
    let tol = cx.tol;
    let mut checks = Vec::new();
    for g in &cx.grids {
        let label = g.label();
        let grid = g.grid;
        let dim = g.dim();
        for (k, b) in g.nonneg_b() {
            let mut by_mb = Sweep::new(Relation::Le);
            for (j, f) in g.f.iter().enumerate() {
                let c = comm_m(b, f, FULL)?;
                let mb = max_commutator(b, f, FULL)?;
                let cells: Vec<usize> = (0..grid.len()).collect();
                let abs: Vec<f64> = c.values().iter().map(|v| v.abs()).collect();
                push_cells(&mut by_mb, &grid, &cells, &abs, mb.values(), &|| format!("b{k}, f{j}"));
            }
            checks.push(by_mb.hard(
                format!("theorem2.comm_by_max_commutator.b{k}.{label}"),
                "|[b,M] f| <= M_b f",
                tol,
            ));
            let lip = lip_const(cx, b)?;
            let dom = dominated_by_fractional(cx, g, c2(cx, g) * lip, |f| Ok(max_commutator(b, f, FULL)?), k)?;
            checks.push(dom.hard(
                format!("theorem2.frac_domination.b{k}.{label}"),
                "M_b f <= n^{beta/2} ||b||_Lip M_beta f",
                tol,
            ));
        }
        let exps: Vec<_> = g.exponents().collect();
        for (k, b) in g.b.iter().enumerate() {
            let mut rels = vec![Relation::Eq];
            rels.extend(exps.iter().map(|_| Relation::Le));
            let s = sweep_cubes(&grid, FULL, &rels, |q, s| {
                let ctx = || cube_str(q, dim);
                let cells = q.cells(&grid);
                let chi = GridFunction::indicator(grid, q)?;
                let c = comm_m(b, &chi, FULL)?;
                let lm = local_max(b, q)?;
                let c_on: Vec<f64> = cells.iter().map(|&i| c.values()[i]).collect();
                let expected: Vec<f64> = cells.iter().zip(lm.values()).map(|(&i, m)| b.values()[i] - m).collect();
                push_cells(&mut s[0], &grid, &cells, &c_on, &expected, &ctx);
                let mut dev = vec![0.0; grid.len()];
                for (&i, e) in cells.iter().zip(&expected) {
                    dev[i] = *e;
                }
                let dev = GridFunction::new(grid, dev)?;
                for (e, (_, qv)) in exps.iter().enumerate() {
                    s[1 + e].push(lux_norm(&dev, qv)?.value, lux_norm(&c, qv)?.value, ctx);
                }
                Ok(())
            })?;
            let mut it = s.into_iter();
            checks.push(it.next().unwrap().hard(
                format!("theorem2.comm_indicator.b{k}.{label}"),
                "[b,M](chi_Q) = b - M_Q(b) on Q",
                tol,
            ));
            for (qi, _) in &exps {
                checks.push(it.next().unwrap().hard(
                    format!("theorem2.norm_star.b{k}.q{qi}.{label}"),
                    "||(b - M_Q(b)) chi_Q||_q <= ||[b,M](chi_Q)||_q",
                    tol,
                ));
            }
        }
    }
    checks.extend(operator_tables(
        cx,
        "theorem2",
        |b| OperatorTag::CommM(b.clone()),
        Some(1.0),
        true,
    )?);
    Ok(checks)
}

/// Smallest `t^2/(2(t - 1))` over containing cube sizes, `t = (k'/k)^n`;
/// `None` when `Q` has no strictly larger cube.
fn mean_constant(side: usize, cells: usize, dim: usize) -> Option<f64> {
    ((side + 1)..=cells)
        .map(|big| {
            let t = (big as f64 / side as f64).powi(dim as i32);
            t * t / (2.0 * (t - 1.0))
        })
        .reduce(f64::min)
}

/// The nonlinear commutator `[b, M#]`.
pub fn theorem3(cx: &Context) -> Result<Vec<Check>> {
    let tol = cx.tol;
    let mut checks = Vec::new();
    for g in &cx.grids {
        let label = g.label();
        let grid = g.grid;
        let dim = g.dim();
        let n_cells = grid.cells_per_axis();
        for (k, b) in g.nonneg_b() {
            let lip = lip_const(cx, b)?;
            let dom = dominated_by_fractional(cx, g, 2.0 * c2(cx, g) * lip, |f| Ok(comm_sharp(b, f, FULL)?.abs()), k)?;
            checks.push(dom.hard(
                format!("theorem3.frac_domination.b{k}.{label}"),
                "|[b,M#] f| <= 2 n^{beta/2} ||b||_Lip M_beta f",
                tol,
            ));
        }
        let exps: Vec<_> = g.exponents().collect();
        for (k, b) in g.b.iter().enumerate() {
            let mut rels = vec![Relation::Le, Relation::Eq];
            rels.extend(exps.iter().map(|_| Relation::Le));
            let s = sweep_cubes(&grid, FULL, &rels, |q: &Cube, s| {
                let ctx = || cube_str(q, dim);
                let Some(c) = mean_constant(q.side(), n_cells, dim) else {
                    return Ok(());
                };
                let cells = q.cells(&grid);
                let sh = sharp_of_restriction(b, q, FULL)?;
                let avg = b.average(q)?.abs();
                let lhs = vec![avg; cells.len()];
                let rhs: Vec<f64> = sh.iter().map(|v| c * v).collect();
                push_cells(&mut s[0], &grid, &cells, &lhs, &rhs, &|| format!("{}, c = {c}", ctx()));
                if dim != 1 || 2 * q.side() > n_cells {
                    return Ok(());
                }
                let chi = GridFunction::indicator(grid, q)?;
                let comm = comm_sharp(b, &chi, FULL)?;
                let twice: Vec<f64> = cells.iter().map(|&i| 2.0 * comm.values()[i]).collect();
                let dev: Vec<f64> = cells.iter().zip(&sh).map(|(&i, m)| b.values()[i] - 2.0 * m).collect();
                push_cells(&mut s[1], &grid, &cells, &dev, &twice, &ctx);
                let mut full = vec![0.0; grid.len()];
                for (&i, d) in cells.iter().zip(&dev) {
                    full[i] = *d;
                }
                let dev = GridFunction::new(grid, full)?;
                let comm2 = comm.scale(2.0)?;
                for (e, (_, qv)) in exps.iter().enumerate() {
                    s[2 + e].push(lux_norm(&dev, qv)?.value, lux_norm(&comm2, qv)?.value, ctx);
                }
                Ok(())
            })?;
            let mut it = s.into_iter();
            checks.push(it.next().unwrap().hard(
                format!("theorem3.mean_by_sharp.b{k}.{label}"),
                "|b_Q| <= c M#(b chi_Q) on Q (c = 2 when a cube of twice the measure exists)",
                tol,
            ));
            let ident = it.next().unwrap();
            if dim == 1 {
                checks.push(ident.hard(
                    format!("theorem3.comm_indicator.b{k}.{label}"),
                    "b - 2 M#(b chi_Q) = 2 [b,M#](chi_Q) on Q",
                    tol,
                ));
                for (qi, _) in &exps {
                    checks.push(it.next().unwrap().hard(
                        format!("theorem3.norm_sharp.b{k}.q{qi}.{label}"),
                        "||(b - 2 M#(b chi_Q)) chi_Q||_q <= 2 ||[b,M#](chi_Q)||_q",
                        tol,
                    ));
                }
            }
        }
    }
    checks.extend(operator_tables(
        cx,
        "theorem3",
        |b| OperatorTag::CommSharp(b.clone()),
        Some(2.0),
        true,
    )?);
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::mean_constant;

    #[test]
    fn mean_constant_is_two_with_room_to_double() {
        assert_eq!(mean_constant(4, 8, 1), Some(2.0));
        assert_eq!(mean_constant(8, 8, 1), None);
        let c = mean_constant(5, 8, 1).unwrap();
        assert!((c - (1.6f64 * 1.6 / 1.2)).abs() < 1e-12);
        let c2 = mean_constant(2, 8, 2).unwrap();
        assert!((c2 - 2.25 * 2.25 / 2.5).abs() < 1e-12);
    }
}
