//! Exact identities of the maximal operators and oracle equivalence of the
//! fast paths.

use maxlip_core::maximal::oracle::oracle_check;
use maxlip_core::{frac_max, hl_max, local_max, sharp_max, Cube, CubeFamily, Grid, GridFunction, OperatorTag};

use super::{cell_str, cube_str, push_cells, sweep_cubes, sweep_items, Context, GridData, Result};
use crate::catalog::random_function;
use crate::report::{Check, Relation, Sweep};

const FULL: CubeFamily = CubeFamily::Full;

pub fn run(cx: &Context) -> Result<Vec<Check>> {
    let mut checks = oracle(cx)?;
    for g in &cx.grids {
        checks.extend(indicators(cx, g)?);
        checks.extend(bank_bounds(cx, g)?);
        checks.extend(symbol_identities(cx, g)?);
    }
    Ok(checks)
}

fn oracle_tags(b: &GridFunction, alphas: &[f64], grid: &Grid) -> Vec<(String, OperatorTag)> {
    let n = grid.cells_per_axis();
    let local = Cube::new(&[n / 4, n / 4][..grid.dim()], n / 2);
    let mut tags = vec![
        ("hl".to_string(), OperatorTag::Hl),
        ("sharp".to_string(), OperatorTag::Sharp),
    ];
    for &a in alphas {
        tags.push((format!("fractional_a{a}"), OperatorTag::Fractional(a)));
    }
    tags.push(("local".to_string(), OperatorTag::Local(local)));
    tags.push(("max_commutator".to_string(), OperatorTag::MaxCommutator(b.clone())));
    tags.push(("comm_m".to_string(), OperatorTag::CommM(b.clone())));
    tags.push(("comm_sharp".to_string(), OperatorTag::CommSharp(b.clone())));
    tags
}

/// Fast paths against the naive oracle on seeded random `(b, f)` pairs.
fn oracle(cx: &Context) -> Result<Vec<Check>> {
    let o = &cx.cfg.oracle;
    let mut checks = Vec::new();
    for (dim, cells) in [(1, o.cells_1d), (2, o.cells_2d)] {
        let grid = Grid::unit(dim, cells)?;
        let seeds: Vec<usize> = (0..o.pairs).collect();
        let probe = GridFunction::constant(grid, 0.0)?;
        let names: Vec<String> = oracle_tags(&probe, &o.alphas, &grid).into_iter().map(|t| t.0).collect();
        let rels = vec![Relation::Le; names.len()];
        let sweeps = sweep_items(&seeds, &rels, |&i, s| {
            let seed = cx.cfg.seed.wrapping_add(((dim as u64) << 32) + 2 * i as u64);
            let b = random_function(grid, seed, -1.0, 1.0)?;
            let f = random_function(grid, seed + 1, -1.0, 1.0)?;
            for (k, (_, tag)) in oracle_tags(&b, &o.alphas, &grid).into_iter().enumerate() {
                let dev = oracle_check(&tag, &f)?;
                s[k].push(dev, 0.0, || format!("pair {i} (seeds {seed}, {})", seed + 1));
            }
            Ok(())
        })?;
        for (name, sweep) in names.into_iter().zip(sweeps) {
            checks.push(sweep.hard(
                format!("identities.oracle.{name}.d{dim}"),
                "max |fast - naive| = 0",
                cx.cfg.tolerances.oracle_tol,
            ));
        }
    }
    Ok(checks)
}

/// `M(chi_Q) = 1`, `M#(chi_Q) <= 1/2` (with equality when a half-overlapping
/// containing cube exists), `M_alpha(chi_Q) = |Q|^{alpha/n}` on `Q`.
fn indicators(cx: &Context, g: &GridData) -> Result<Vec<Check>> {
    let grid = g.grid;
    let dim = g.dim();
    let n = grid.cells_per_axis();
    let alphas = &cx.cfg.oracle.alphas;
    let mut rels = vec![Relation::Eq, Relation::Le, Relation::Eq];
    rels.extend(alphas.iter().map(|_| Relation::Eq));
    let s = sweep_cubes(&grid, FULL, &rels, |q, s| {
        let chi = GridFunction::indicator(grid, q)?;
        let cells = q.cells(&grid);
        let ctx = || cube_str(q, dim);
        let m = hl_max(&chi, FULL);
        for &i in &cells {
            s[0].push(m.values()[i], 1.0, || format!("{}, {}", ctx(), cell_str(&grid, i)));
        }
        let sh = sharp_max(&chi, FULL);
        for (i, v) in sh.values().iter().enumerate() {
            s[1].push(*v, 0.5, || format!("{}, {}", ctx(), cell_str(&grid, i)));
        }
        if dim == 1 && 2 * q.side() <= n {
            for &i in &cells {
                s[2].push(sh.values()[i], 0.5, || format!("{}, {}", ctx(), cell_str(&grid, i)));
            }
        }
        for (k, &a) in alphas.iter().enumerate() {
            let fm = frac_max(&chi, a, FULL)?;
            let target = q.measure(&grid).powf(a / dim as f64);
            for &i in &cells {
                s[3 + k].push(fm.values()[i], target, || format!("{}, {}", ctx(), cell_str(&grid, i)));
            }
        }
        Ok(())
    })?;
    let label = g.label();
    let tol = cx.tol;
    let mut it = s.into_iter();
    let mut checks = vec![
        it.next()
            .unwrap()
            .hard(format!("identities.hl_indicator.{label}"), "M(chi_Q) = 1 on Q", tol),
        it.next().unwrap().hard(
            format!("identities.sharp_indicator_bound.{label}"),
            "M#(chi_Q) <= 1/2",
            tol,
        ),
    ];
    let half = it.next().unwrap();
    if dim == 1 {
        checks.push(half.hard(
            format!("identities.sharp_indicator.{label}"),
            "M#(chi_Q) = 1/2 on Q when 2|Q| <= |box|",
            tol,
        ));
    }
    for (a, sweep) in alphas.iter().zip(it) {
        checks.push(sweep.hard(
            format!("identities.frac_indicator_a{a}.{label}"),
            "M_alpha(chi_Q) = |Q|^{alpha/n} on Q",
            tol,
        ));
    }
    Ok(checks)
}

/// Pointwise lower bounds and sublinearity over the `f` bank.
fn bank_bounds(cx: &Context, g: &GridData) -> Result<Vec<Check>> {
    let grid = g.grid;
    let label = g.label();
    let mut lower = Sweep::new(Relation::Ge);
    let mut sharp_pos = Sweep::new(Relation::Ge);
    let mut sub = Sweep::new(Relation::Le);
    let maxes: Vec<GridFunction> = g.f.iter().map(|f| hl_max(f, FULL)).collect();
    for (k, f) in g.f.iter().enumerate() {
        for (i, (m, v)) in maxes[k].values().iter().zip(f.values()).enumerate() {
            lower.push(*m, v.abs(), || format!("f{k}, {}", cell_str(&grid, i)));
        }
        for (i, v) in sharp_max(f, FULL).values().iter().enumerate() {
            sharp_pos.push(*v, 0.0, || format!("f{k}, {}", cell_str(&grid, i)));
        }
        for (j, h) in g.f.iter().enumerate().skip(k + 1) {
            let m = hl_max(&f.add(h)?, FULL);
            for i in 0..grid.len() {
                sub.push(m.values()[i], maxes[k].values()[i] + maxes[j].values()[i], || {
                    format!("f{k} + f{j}, {}", cell_str(&grid, i))
                });
            }
        }
    }
    Ok(vec![
        lower.hard(format!("identities.hl_lower_bound.{label}"), "M f >= |f|", cx.tol),
        sharp_pos.hard(format!("identities.sharp_nonnegative.{label}"), "M# f >= 0", cx.tol),
        sub.hard(
            format!("identities.hl_sublinear.{label}"),
            "M(f + g) <= M f + M g",
            cx.tol,
        ),
    ])
}

/// Per-cube identities for each symbol `b`: the local identity, the median
/// split, the factor-2 oscillation bound and the negative-part bound.
fn symbol_identities(cx: &Context, g: &GridData) -> Result<Vec<Check>> {
    let grid = g.grid;
    let dim = g.dim();
    let n = dim as f64;
    let beta = cx.beta();
    let h = grid.cell_measure();
    let label = g.label();
    let mut checks = Vec::new();
    for (k, b) in g.b.iter().enumerate() {
        let rels = [Relation::Eq, Relation::Eq, Relation::Le, Relation::Le];
        let s = sweep_cubes(&grid, FULL, &rels, |q, s| {
            let cells = q.cells(&grid);
            let ctx = || cube_str(q, dim);
            let lm = local_max(b, q)?;
            let m = hl_max(&b.restrict(q)?, FULL);
            let on_q: Vec<f64> = cells.iter().map(|&i| m.values()[i]).collect();
            push_cells(&mut s[0], &grid, &cells, &on_q, lm.values(), &ctx);

            let avg = b.average(q)?;
            let (mut below, mut above, mut dev, mut gap, mut neg) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for (&i, &mq) in cells.iter().zip(lm.values()) {
                let v = b.values()[i];
                if v <= avg {
                    below += (v - avg).abs();
                } else {
                    above += (v - avg).abs();
                }
                dev += (v - avg).abs();
                gap += (mq - v).abs();
                neg += (-v).max(0.0);
            }
            s[1].push(below * h, above * h, ctx);
            let measure = q.measure(&grid);
            let scale = measure.powf(1.0 + beta / n);
            s[2].push(dev * h / scale, 2.0 * gap * h / scale, ctx);
            s[3].push(neg * h / measure, gap * h / measure, ctx);
            Ok(())
        })?;
        let mut it = s.into_iter();
        let tol = cx.tol;
        checks.push(it.next().unwrap().hard(
            format!("identities.local_identity.b{k}.{label}"),
            "M(b chi_Q) = M_Q(b) on Q",
            tol,
        ));
        checks.push(it.next().unwrap().hard(
            format!("identities.median_split.b{k}.{label}"),
            "int_E |b - b_Q| = int_{Q\\E} |b - b_Q|, E = {b <= b_Q}",
            tol,
        ));
        checks.push(it.next().unwrap().hard(
            format!("identities.factor_two.b{k}.{label}"),
            "|Q|^{-1-beta/n} int_Q |b - b_Q| <= 2 |Q|^{-1-beta/n} int_Q |b - M_Q(b)|",
            tol,
        ));
        checks.push(it.next().unwrap().hard(
            format!("identities.negative_part.b{k}.{label}"),
            "|Q|^{-1} int_Q b^- <= |Q|^{-1} int_Q |M_Q(b) - b|",
            tol,
        ));
    }
    Ok(checks)
}
