//! Norm lemmas: Hölder, the power identity, cube duality and embedding,
//! the oscillation characterization, and monitored fractional-maximal ratios.

use maxlip_core::lip::osc_norm_q;
use maxlip_core::lux::indicator_norm;
use maxlip_core::{
    check_s_norm, cube_duality_product, cube_embedding_ratio, holder_constant, holder_defect, lambda_var, lip_seminorm,
    lux_norm, modular, opnorm_lower, CubeFamily, Error as CoreError, ExponentPair, OperatorTag, VariableExponent,
};

use super::{cube_str, entry_str, spread_check, sweep_cubes, witness_str, Context, GridData, Result};
use crate::catalog::random_function;
use crate::report::{Check, Relation, Sweep};

const LUX_REL_TOL: f64 = 1e-10;
const S_POWERS: [f64; 4] = [0.5, 1.0, 1.5, 2.0];
const INDICATOR_POWERS: [f64; 2] = [2.0, 3.0];

pub fn run(cx: &Context) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    checks.extend(holder(cx)?);
    checks.extend(norm_laws(cx)?);
    for g in &cx.grids {
        checks.extend(cube_lemmas(cx, g)?);
        checks.extend(oscillation(cx, g)?);
    }
    checks.extend(fractional_ratios(cx)?);
    Ok(checks)
}

/// Generalized Hölder on seeded random pairs, spread evenly over exponents.
fn holder(cx: &Context) -> Result<Vec<Check>> {
    let g = cx.base();
    let exps: Vec<(usize, &VariableExponent)> = g.exponents().collect();
    let per = cx.cfg.holder_triples.div_ceil(exps.len());
    let mut checks = Vec::new();
    for (qi, p) in exps {
        let mut s = Sweep::new(Relation::Ge);
        for t in 0..per {
            let seed = cx.cfg.seed.wrapping_add(1_000 * qi as u64 + 2 * t as u64);
            let f = random_function(g.grid, seed, -1.0, 1.0)?;
            let h = random_function(g.grid, seed + 1, -1.0, 1.0)?;
            s.push(holder_defect(&f, &h, p)?, 0.0, || format!("seeds {seed}, {}", seed + 1));
        }
        checks.push(s.hard(
            format!("lemmas.holder.q{qi}.{}", g.label()),
            "r_p ||f||_p ||g||_p' - int |f g| >= 0",
            cx.tol,
        ));
        checks.push(Check::monitored(
            format!("lemmas.log_holder.q{qi}.{}", g.label()),
            "discrete log-Hölder constant of p",
            Relation::Ge,
            p.log_holder().value,
            0.0,
            0.0,
            if p.log_holder().exact { "exact" } else { "sampled" }.to_string(),
        ));
        for lam in [1.5, 2.0] {
            let scaled = p.scale(lam)?;
            checks.push(Check::hard(
                format!("lemmas.jensen_closure.q{qi}.l{lam}"),
                "(lambda p)_- = lambda p_-",
                Relation::Eq,
                scaled.p_minus(),
                lam * p.p_minus(),
                1e-12,
                format!("lambda = {lam}"),
            ));
        }
    }
    Ok(checks)
}

/// Power identity, closed forms for constant exponents, and the unit-modular
/// law, over both banks on the base grid.
fn norm_laws(cx: &Context) -> Result<Vec<Check>> {
    let g = cx.base();
    let label = g.label();
    let bank: Vec<(String, _)> = (g.f.iter().enumerate().map(|(i, f)| (format!("f{i}"), f)))
        .chain(g.b.iter().enumerate().map(|(i, b)| (format!("b{i}"), b)))
        .filter(|(_, f)| !f.is_zero())
        .collect();
    let mut checks = Vec::new();
    for (qi, p) in g.exponents() {
        for s in S_POWERS {
            let id = format!("lemmas.s_norm.q{qi}.s{s}.{label}");
            let anchor = "|| |f|^s ||_p = ||f||_{s p}^s";
            if s * p.p_minus() < 1.0 {
                checks.push(Check::monitored(
                    id,
                    anchor,
                    Relation::Ge,
                    s * p.p_minus(),
                    1.0,
                    0.0,
                    "skipped: (s p)_- < 1".into(),
                ));
                continue;
            }
            let mut sweep = Sweep::new(Relation::Le);
            for (name, f) in &bank {
                sweep.push(check_s_norm(f, p, s)?, 0.0, || name.clone());
            }
            checks.push(sweep.hard(id, anchor, cx.tol));
        }
        let mut unit = Sweep::new(Relation::Le);
        for (name, f) in &bank {
            let n = lux_norm(f, p)?.value;
            unit.push((modular(&f.scale(1.0 / n)?, p)? - 1.0).abs(), 0.0, || name.clone());
        }
        checks.push(unit.hard(
            format!("lemmas.unit_modular.q{qi}.{label}"),
            "rho(f / ||f||_p) = 1",
            cx.tol,
        ));
        if p.is_constant() {
            let p0 = p.p_minus();
            let w = g.grid.cell_measure();
            let mut closed = Sweep::new(Relation::Le);
            for (name, f) in &bank {
                let exact = (f.values().iter().map(|v| v.abs().powf(p0)).sum::<f64>() * w).powf(1.0 / p0);
                let rel = (lux_norm(f, p)?.value - exact).abs() / exact;
                closed.push(rel, 0.0, || name.clone());
            }
            checks.push(closed.hard(
                format!("lemmas.lux_closed_form.q{qi}.{label}"),
                "||f||_p0 = (int |f|^p0)^{1/p0}, relative",
                LUX_REL_TOL,
            ));
        }
    }
    Ok(checks)
}

/// Cube duality, cube embedding, and the indicator power identity.
fn cube_lemmas(cx: &Context, g: &GridData) -> Result<Vec<Check>> {
    let grid = g.grid;
    let dim = g.dim();
    let label = g.label();
    let beta = cx.beta();
    let mut checks = Vec::new();
    for (qi, q) in g.exponents() {
        let pair = match ExponentPair::from_target(q.clone(), beta) {
            Ok(p) => Some(p),
            Err(CoreError::PairCheck { value }) => {
                checks.push(Check::monitored(
                    format!("lemmas.pair_check.q{qi}.{label}"),
                    "q_- (n - beta)/n > 1",
                    Relation::Gt,
                    value,
                    1.0,
                    0.0,
                    "not an admissible pair; embedding checks skipped".into(),
                ));
                None
            }
            Err(e) => return Err(e.into()),
        };
        let rel_dual = if q.is_constant() { Relation::Eq } else { Relation::Ge };
        let rel_emb = if q.is_constant() { Relation::Eq } else { Relation::Le };
        let rels = [
            rel_dual,
            Relation::Le,
            rel_emb,
            Relation::Ge,
            Relation::Eq,
            Relation::Eq,
        ];
        let dual_floor = if q.is_constant() { 1.0 } else { 1.0 / holder_constant(q) };
        let powered: Vec<VariableExponent> = INDICATOR_POWERS
            .iter()
            .map(|&r| q.scale(r))
            .collect::<std::result::Result<_, _>>()?;
        let s = sweep_cubes(&grid, CubeFamily::Full, &rels, |cube, s| {
            let ctx = || cube_str(cube, dim);
            let d = cube_duality_product(cube, q)?;
            s[0].push(d, dual_floor, ctx);
            s[1].push(d, 1.0, ctx);
            if let Some(pair) = &pair {
                let e = cube_embedding_ratio(cube, pair)?;
                s[2].push(e, 1.0, ctx);
                s[3].push(e, 1.0, ctx);
            }
            let base = indicator_norm(cube, q)?;
            for (k, (r, qr)) in INDICATOR_POWERS.iter().zip(&powered).enumerate() {
                s[4 + k].push(indicator_norm(cube, qr)?, base.powf(1.0 / r), ctx);
            }
            Ok(())
        })?;
        let mut it = s.into_iter();
        let tol = cx.tol;
        let dual = it.next().unwrap();
        let dual_max = it.next().unwrap();
        if q.is_constant() {
            checks.push(dual.hard(
                format!("lemmas.duality.q{qi}.{label}"),
                "|Q|^{-1} ||chi_Q||_q ||chi_Q||_q' = 1",
                tol,
            ));
        } else {
            checks.push(dual.hard(
                format!("lemmas.duality.q{qi}.{label}"),
                "|Q|^{-1} ||chi_Q||_q ||chi_Q||_q' >= 1/r_q",
                tol,
            ));
            checks.push(dual_max.monitored(
                format!("lemmas.duality_max.q{qi}.{label}"),
                "sup_Q |Q|^{-1} ||chi_Q||_q ||chi_Q||_q' bounded",
                0.0,
            ));
        }
        let (emb_hi, emb_lo) = (it.next().unwrap(), it.next().unwrap());
        if pair.is_some() {
            let anchor = "||chi_Q||_p = |Q|^{beta/n} ||chi_Q||_q";
            if q.is_constant() {
                checks.push(emb_hi.hard(format!("lemmas.embedding.q{qi}.{label}"), anchor, tol));
            } else {
                checks.push(emb_hi.monitored(format!("lemmas.embedding_max.q{qi}.{label}"), anchor, 0.0));
                checks.push(emb_lo.monitored(format!("lemmas.embedding_min.q{qi}.{label}"), anchor, 0.0));
            }
        }
        for (r, sweep) in INDICATOR_POWERS.iter().zip(it) {
            checks.push(sweep.hard(
                format!("lemmas.indicator_power.q{qi}.r{r}.{label}"),
                "||chi_Q||_{r q} = ||chi_Q||_q^{1/r}",
                tol,
            ));
        }
    }
    Ok(checks)
}

/// Oscillation norms: power-mean monotonicity, the Lipschitz upper bound,
/// and agreement with the variable functional for constant exponents.
fn oscillation(cx: &Context, g: &GridData) -> Result<Vec<Check>> {
    let beta = cx.beta();
    let label = g.label();
    let mode = cx.cfg.family_for(g.grid.cells_per_axis());
    let c2 = (g.dim() as f64).powf(beta / 2.0);
    let mut checks = Vec::new();
    for (k, b) in g.b.iter().enumerate() {
        let o1 = osc_norm_q(b, beta, 1.0, mode)?;
        let o2 = osc_norm_q(b, beta, 2.0, mode)?;
        let lip = lip_seminorm(b, beta)?;
        checks.push(Check::hard(
            format!("lemmas.osc_power_mean.b{k}.{label}"),
            "osc_1(b) <= osc_2(b)",
            Relation::Le,
            o1.value,
            o2.value,
            cx.tol,
            witness_str(&o1.witness, &g.grid),
        ));
        checks.push(Check::hard(
            format!("lemmas.osc_lipschitz.b{k}.{label}"),
            "osc_1(b) <= n^{beta/2} ||b||_Lip",
            Relation::Le,
            o1.value,
            c2 * lip.value,
            cx.tol,
            witness_str(&o1.witness, &g.grid),
        ));
        for (qi, q) in g.exponents().filter(|(_, q)| q.is_constant()) {
            let lv = lambda_var(b, beta, q, mode)?;
            let oq = osc_norm_q(b, beta, q.p_minus(), mode)?;
            checks.push(Check::hard(
                format!("lemmas.var_matches_osc.b{k}.q{qi}.{label}"),
                "Lambda_{beta,q}(b) = osc_q(b) for constant q",
                Relation::Eq,
                lv.value,
                oq.value,
                cx.tol,
                witness_str(&lv.witness, &g.grid),
            ));
        }
    }
    Ok(checks)
}

/// Monitored lower bounds for `||M_beta||_{p -> q}` across refinements.
fn fractional_ratios(cx: &Context) -> Result<Vec<Check>> {
    let beta = cx.beta();
    let mut tables: Vec<Vec<(f64, String)>> = vec![Vec::new(); cx.cfg.exponents.len()];
    let mut checks = Vec::new();
    for &n in &cx.cfg.refinement {
        let g = cx.refined(n)?;
        for (qi, q) in g.exponents() {
            let Ok(pair) = ExponentPair::from_target(q.clone(), beta) else {
                continue;
            };
            let lb = opnorm_lower(
                &OperatorTag::Fractional(beta),
                pair.p(),
                pair.q(),
                &g.f,
                CubeFamily::DyadicSides,
            )?;
            let witness = entry_str(&lb.argmax, &g.grid);
            checks.push(Check::monitored(
                format!("lemmas.frac_bound.q{qi}.{}", g.label()),
                "||M_beta f||_q / ||f||_p bounded",
                Relation::Ge,
                lb.value,
                0.0,
                0.0,
                witness.clone(),
            ));
            tables[qi].push((lb.value, format!("n{n}")));
        }
    }
    for (qi, t) in tables.iter().enumerate().filter(|(_, t)| !t.is_empty()) {
        checks.push(spread_check(
            format!("lemmas.frac_bound_spread.q{qi}"),
            "max/min of ||M_beta||_{p->q} lower bounds across refinements",
            t,
            cx.cfg.normequiv.max_variation,
            false,
        ));
    }
    Ok(checks)
}
