//! Runnable verification suites behind the command-line interface.
//!
//! Each suite sweeps its configured grid of parameters and random data,
//! writes one CSV of measurements, and reports pass/fail. Failures of
//! numeric checks yield `pass = false`; malformed or inadmissible
//! configurations yield `Err(Error::Config)` / `Err(Error::Inadmissible)`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::coeffs::{classify_regime, CoefficientField, SampleGrid, Side, SymbolBounds};
use crate::config::{RunConfig, Suite};
use crate::ensemble::{field_preset, random_slice, random_trace, random_two_sided, seeded_rng};
use crate::error::{Error, Result};
use crate::freq::{
    factorization_residual, prop31_sides, symbol_bound_audit, AuditPoint,
};
use crate::global::{
    conjugation_consistency, partition_assembly_check, sign_identity_residual, theorem21_sides,
    theorem31_sides, TwoSidedField,
};
use crate::grid::{Grid1, HalfGrid, TensorGrid};
use crate::partition::{
    prop41_check, prop42_check, prop43_check, prop44_check, PartitionFamily,
};
use crate::report::{fmt_float, CsvReport};
use crate::seminorms::{equivalence_constant, gagliardo_sq, h12_fourier, lemma41_check,
    InterfaceTrace, Region};
use crate::weights::WeightParams;

#[derive(Debug)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub pass: bool,
    pub rows: usize,
    pub failures: Vec<String>,
    pub csv: std::path::PathBuf,
}

/// Resolve the coefficient preset and check parameter admissibility
/// against its measured spectral constants.
fn setup(cfg: &RunConfig) -> Result<(CoefficientField, SymbolBounds, WeightParams)> {
    cfg.validate()?;
    let field = field_preset(&cfg.field)?;
    let sample = SampleGrid::default_2d(cfg.x_half, cfg.y_half, 33);
    field.validate_hypotheses(&sample, 1e-7)?;
    let bounds = field.spectral_bounds(&sample)?;
    let params = cfg.params.clone();
    let adm = params.validate(&bounds);
    if !adm.admissible {
        return Err(Error::Inadmissible(format!(
            "condition (3.42) fails: need alpha_plus > L * alpha_minus with L = {:.6}, \
             got alpha_plus = {}, alpha_minus = {} ({})",
            bounds.l_ratio,
            params.alpha_plus,
            params.alpha_minus,
            adm.reasons.join("; ")
        )));
    }
    Ok((field, bounds, params))
}

pub fn run(suite: Suite, cfg: &RunConfig) -> Result<SuiteOutcome> {
    match suite {
        Suite::Freq => run_freq(cfg),
        Suite::Global31 => run_global31(cfg),
        Suite::Global21 => run_global21(cfg),
        Suite::Seminorm => run_seminorm(cfg),
        Suite::Partition => run_partition(cfg),
        Suite::Assembly => run_assembly(cfg),
        Suite::Calibrate => run_calibrate(cfg),
    }
}

fn outcome(
    suite: Suite,
    rows: usize,
    failures: Vec<String>,
    csv: std::path::PathBuf,
) -> SuiteOutcome {
    SuiteOutcome {
        suite,
        pass: failures.is_empty(),
        rows,
        failures,
        csv,
    }
}

// ---------------------------------------------------------------- freq

fn run_freq(cfg: &RunConfig) -> Result<SuiteOutcome> {
    let (field, bounds, params) = setup(cfg)?;
    let mut csv = CsvReport::create(
        &cfg.out_dir,
        "freq",
        &[
            "tau", "xi", "sample", "regime", "lhs", "rhs_core", "ratio", "fact_residual",
        ],
        &params,
        cfg.seed,
    )?;
    let y = HalfGrid::new(cfg.y_half, cfg.grid_y);
    let rho = cfg.y_half / 2.0;
    let h = y.h();
    // discrete-Leibniz defect floor for Lipschitz coefficients
    let fact_tol = 1e-9 + 100.0 * h * h;
    let mut failures = Vec::new();
    let mut rows = 0usize;

    let mut cases = Vec::new();
    for &tau in &cfg.tau_list {
        for &xi in &cfg.xi_list {
            for k in 0..cfg.ensemble {
                cases.push((tau, xi, k));
            }
        }
    }
    let results: Vec<Result<(f64, f64, usize, &'static str, f64, f64, f64)>> = cases
        .par_iter()
        .map(|&(tau, xi, k)| {
            let mut rng = seeded_rng(cfg.seed ^ (k as u64).wrapping_mul(0x9e3779b97f4a7c15));
            let slice = random_slice(&mut rng, &y, vec![xi], rho);
            let mut p = params.clone();
            p.tau = tau.max(p.tau0);
            let m_plus = field.principal_root(Side::Plus, &[0.0], 0.0, &slice.xi)?;
            let regime = classify_regime(&slice.xi, p.tau, &p, &bounds, m_plus);
            let (lhs, rhs, _) = prop31_sides(&slice, &p, &field)?;
            let mut fr = 0.0f64;
            for side in Side::BOTH {
                fr = fr.max(factorization_residual(&slice, side, &p, &field)?);
            }
            Ok((tau, xi, k, regime_name(regime), lhs, rhs, fr))
        })
        .collect();
    for r in results {
        let (tau, xi, k, regime, lhs, rhs, fr) = r?;
        let ratio = if rhs > 0.0 { lhs / rhs } else { f64::NAN };
        if rhs > 0.0 && !ratio.is_finite() {
            failures.push(format!("freq: non-finite ratio at tau={tau}, xi={xi}"));
        }
        if lhs > 0.0 && rhs == 0.0 {
            failures.push(format!("freq: zero rhs with nonzero lhs (tau={tau}, xi={xi})"));
        }
        if fr > fact_tol {
            failures.push(format!(
                "freq: factorization residual {fr:.3e} above {fact_tol:.3e} (tau={tau}, xi={xi})"
            ));
        }
        csv.row(&[
            fmt_float(tau),
            fmt_float(xi),
            k.to_string(),
            regime.to_string(),
            fmt_float(lhs),
            fmt_float(rhs),
            fmt_float(ratio),
            fmt_float(fr),
        ])?;
        rows += 1;
    }

    // symbol-bound audit over the same sweep at a few depths
    let mut points = Vec::new();
    for &tau in &cfg.tau_list {
        for &xi in &cfg.xi_list {
            for &yv in &[-0.8 * cfg.y_half, -0.1, 0.05, 0.7 * cfg.y_half] {
                let m_plus = field.principal_root(Side::Plus, &[0.0], 0.0, &[xi])?;
                let regime = classify_regime(&[xi], tau.max(params.tau0), &params, &bounds, m_plus);
                points.push(AuditPoint {
                    xi: vec![xi],
                    y: yv,
                    tau: tau.max(params.tau0),
                    regime,
                });
            }
        }
    }
    let violations = symbol_bound_audit(&points, &params, &field, &bounds)?;
    for v in &violations {
        failures.push(format!(
            "freq: symbol bound {} violated by {:.3e} at xi={:?}, y={}, tau={}",
            v.bound, -v.slack, v.point.xi, v.point.y, v.point.tau
        ));
    }
    Ok(outcome(Suite::Freq, rows, failures, csv.finish()?))
}

fn regime_name(r: crate::coeffs::Regime) -> &'static str {
    match r {
        crate::coeffs::Regime::Case1 => "case1",
        crate::coeffs::Regime::Case2 => "case2",
        crate::coeffs::Regime::Case3 => "case3",
    }
}

// ------------------------------------------------------------ global31

/// Single low mode for the conjugation cross-check: both the direct and
/// the spectral path resolve it well on the configured grid.
fn single_mode_field(grid: &TensorGrid, rx: f64, ry: f64) -> TwoSidedField {
    let k = std::f64::consts::TAU * 2.0 / grid.x.width();
    TwoSidedField::from_fn(
        grid.clone(),
        (-rx, rx),
        (-ry, ry),
        move |x, y| {
            Complex64::new(0.0, k * x).exp()
                * crate::ensemble::smooth_window(x / rx)
                * crate::ensemble::smooth_window(y / ry)
        },
        move |x, y| {
            Complex64::new(0.0, k * x).exp()
                * crate::ensemble::smooth_window(x / rx)
                * crate::ensemble::smooth_window(y / ry)
        },
    )
}

fn run_global31(cfg: &RunConfig) -> Result<SuiteOutcome> {
    let (field, _bounds, params) = setup(cfg)?;
    let mut csv = CsvReport::create(
        &cfg.out_dir,
        "global31",
        &[
            "tau", "sample", "lhs", "rhs", "ratio", "sign_residual", "conj_mismatch",
        ],
        &params,
        cfg.seed,
    )?;
    let grid = TensorGrid::new(
        Grid1::symmetric(cfg.x_half, cfg.grid_x),
        HalfGrid::new((2.0 * params.r0).min(cfg.y_half), cfg.grid_y),
    );
    let rx = cfg.support_x.min(0.9);
    let ry = (cfg.support_y).min(0.9 * params.r0);
    let mut failures = Vec::new();
    let mut rows = 0usize;

    // grid-level cross-checks once per run
    let probe = single_mode_field(&grid, rx, ry);
    let mut pc = params.clone();
    pc.tau = params.tau0;
    let conj = conjugation_consistency(&probe, &pc, &field)?;
    if conj > 1e-2 {
        failures.push(format!("global31: conjugation mismatch {conj:.3e} above 1e-2"));
    }

    let cases: Vec<(f64, usize)> = cfg
        .tau_list
        .iter()
        .flat_map(|&t| (0..cfg.ensemble).map(move |k| (t, k)))
        .collect();
    let results: Vec<Result<(f64, usize, f64, f64, f64)>> = cases
        .par_iter()
        .map(|&(tau, k)| {
            let mut rng = seeded_rng(cfg.seed ^ (k as u64).wrapping_mul(0xd1342543de82ef95));
            let w = random_two_sided(&mut rng, &grid, rx, ry, false);
            let mut p = params.clone();
            p.tau = tau.max(p.tau0);
            let rep = theorem31_sides(&w, &p, &field)?;
            let sr = sign_identity_residual(&w, &field)?;
            Ok((tau, k, rep.lhs_total, rep.rhs_total, sr))
        })
        .collect();
    for r in results {
        let (tau, k, lhs, rhs, sr) = r?;
        let ratio = if rhs > 0.0 { lhs / rhs } else { f64::NAN };
        if rhs > 0.0 && !ratio.is_finite() {
            failures.push(format!("global31: non-finite ratio at tau={tau}"));
        }
        csv.row(&[
            fmt_float(tau),
            k.to_string(),
            fmt_float(lhs),
            fmt_float(rhs),
            fmt_float(ratio),
            fmt_float(sr),
            fmt_float(conj),
        ])?;
        rows += 1;
    }
    Ok(outcome(Suite::Global31, rows, failures, csv.finish()?))
}

// ------------------------------------------------------------ global21

fn run_global21(cfg: &RunConfig) -> Result<SuiteOutcome> {
    let (field, _bounds, params) = setup(cfg)?;
    let mut csv = CsvReport::create(
        &cfg.out_dir,
        "global21",
        &[
            "delta", "tau", "sample", "lhs", "rhs", "ratio", "rescale_mismatch",
        ],
        &params,
        cfg.seed,
    )?;
    let mut failures = Vec::new();
    let mut rows = 0usize;
    for &delta in &cfg.delta_list {
        if delta > params.delta0 + 1e-12 {
            return Err(Error::Config(format!(
                "delta = {delta} above the admissible ceiling {}",
                params.delta0
            )));
        }
        // dedicated grid resolving the delta-sized support box
        let grid = TensorGrid::new(
            Grid1::symmetric(0.6 * delta, cfg.grid_x / 4 + 1),
            HalfGrid::new(2.0 * delta * params.r0, cfg.grid_y / 2),
        );
        let rx = 0.45 * delta;
        let ry = 0.9 * delta * params.r0;
        let cases: Vec<(f64, usize)> = cfg
            .tau_list
            .iter()
            .flat_map(|&t| (0..cfg.ensemble).map(move |k| (t, k)))
            .collect();
        let results: Vec<Result<(f64, usize, f64, f64, f64)>> = cases
            .par_iter()
            .map(|&(tau, k)| {
                let mut rng =
                    seeded_rng(cfg.seed ^ (k as u64).wrapping_mul(0xaf251af3b0f025b5));
                let u = random_two_sided(&mut rng, &grid, rx, ry, false);
                let mut p = params.clone();
                p.tau = tau.max(p.tau0);
                p.delta = delta;
                let (rep, mism) = theorem21_sides(&u, &p, &field)?;
                Ok((tau, k, rep.lhs_total, rep.rhs_total, mism))
            })
            .collect();
        for r in results {
            let (tau, k, lhs, rhs, mism) = r?;
            let ratio = if rhs > 0.0 { lhs / rhs } else { f64::NAN };
            if rhs > 0.0 && !ratio.is_finite() {
                failures.push(format!("global21: non-finite ratio at delta={delta}"));
            }
            if mism > 1e-8 {
                failures.push(format!(
                    "global21: rescaling mismatch {mism:.3e} above 1e-8 (delta={delta}, tau={tau})"
                ));
            }
            csv.row(&[
                fmt_float(delta),
                fmt_float(tau),
                k.to_string(),
                fmt_float(lhs),
                fmt_float(rhs),
                fmt_float(ratio),
                fmt_float(mism),
            ])?;
            rows += 1;
        }
    }
    Ok(outcome(Suite::Global21, rows, failures, csv.finish()?))
}

// ------------------------------------------------------------ seminorm

fn run_seminorm(cfg: &RunConfig) -> Result<SuiteOutcome> {
    let params = cfg.params.clone();
    cfg.validate()?;
    let mut csv = CsvReport::create(
        &cfg.out_dir,
        "seminorm",
        &["check", "measured", "reference", "tolerance"],
        &params,
        cfg.seed,
    )?;
    let mut failures = Vec::new();
    let mut rows = 0usize;
    let push = |csv: &mut CsvReport,
                    failures: &mut Vec<String>,
                    rows: &mut usize,
                    name: &str,
                    measured: f64,
                    reference: f64,
                    tol: f64|
     -> Result<()> {
        let ok = if reference == 0.0 {
            measured.abs() <= tol
        } else {
            (measured - reference).abs() <= tol * reference.abs()
        };
        if !ok || !measured.is_finite() {
            failures.push(format!(
                "seminorm: {name} measured {measured:.6e}, reference {reference:.6e}"
            ));
        }
        csv.row(&[
            name.to_string(),
            fmt_float(measured),
            fmt_float(reference),
            fmt_float(tol),
        ])?;
        *rows += 1;
        Ok(())
    };

    // closed-form oracle: the half-order seminorm of a unit Gaussian is 2π
    let oracle_grid = Grid1::symmetric(16.0, 2049);
    let gauss: Vec<f64> = oracle_grid
        .nodes()
        .iter()
        .map(|&x| (-x * x / 2.0).exp())
        .collect();
    let gt = InterfaceTrace::from_real(oracle_grid.clone(), &gauss, (-10.0, 10.0));
    let g12 = h12_fourier(&gt);
    push(
        &mut csv,
        &mut failures,
        &mut rows,
        "gaussian_h12",
        g12.seminorm_sq,
        std::f64::consts::TAU,
        1e-4,
    )?;

    // double-integral form against the spectral form on the same data
    let gag = gagliardo_sq(&gt, Region::Full);
    push(
        &mut csv,
        &mut failures,
        &mut rows,
        "gagliardo_vs_fourier",
        gag,
        g12.seminorm_sq,
        2e-2,
    )?;

    // random ensemble: two-sided equivalence bracket must stay O(1)
    let grid = Grid1::symmetric(cfg.x_half, cfg.grid_x);
    let mut rng = seeded_rng(cfg.seed);
    let ensemble: Vec<InterfaceTrace> = (0..cfg.ensemble)
        .map(|_| random_trace(&mut rng, &grid, cfg.support_x))
        .collect();
    let (lo, hi) = equivalence_constant(&ensemble)?;
    push(&mut csv, &mut failures, &mut rows, "equiv_lo", lo, 1.0, 0.5)?;
    push(&mut csv, &mut failures, &mut rows, "equiv_hi", hi, 1.0, 0.5)?;

    // localization bound on compactly supported data
    let r = (cfg.support_x * 2.0).min(cfg.x_half / 2.0).min(1.0);
    let mut worst_c = 0.0f64;
    for f in &ensemble {
        let mut g = f.clone();
        g.declared_support = (-0.7 * r, 0.7 * r);
        let scaled: Vec<Complex64> = grid
            .nodes()
            .iter()
            .zip(&f.values)
            .map(|(&x, &v)| v * crate::ensemble::bump(x / (0.7 * r)))
            .collect();
        g.values = scaled;
        let check = lemma41_check(&g, r)?;
        worst_c = worst_c.max(check.c_measured);
    }
    if !worst_c.is_finite() {
        failures.push("seminorm: localization constant not finite".into());
    }
    csv.row(&[
        "lemma41_constant".to_string(),
        fmt_float(worst_c),
        fmt_float(1.0),
        fmt_float(f64::INFINITY),
    ])?;
    rows += 1;

    Ok(outcome(Suite::Seminorm, rows, failures, csv.finish()?))
}

// ------------------------------------------------------------ partition

fn run_partition(cfg: &RunConfig) -> Result<SuiteOutcome> {
    let params = cfg.params.clone();
    cfg.validate()?;
    let mut csv = CsvReport::create(
        &cfg.out_dir,
        "partition",
        &["mu", "check", "value"],
        &params,
        cfg.seed,
    )?;
    let mut failures = Vec::new();
    let mut rows = 0usize;
    let grid = Grid1::symmetric(cfg.x_half, cfg.grid_x);
    let mut c3_values = Vec::new();
    let mut prop_spread: Vec<(&str, Vec<f64>)> = vec![
        ("prop41", Vec::new()),
        ("prop42", Vec::new()),
        ("prop43", Vec::new()),
        ("prop44", Vec::new()),
    ];
    for &mu in &cfg.mu_list {
        if mu < 4.0 {
            return Err(Error::Config(format!("mu = {mu} below the minimum 4")));
        }
        let family = PartitionFamily::build(mu, grid.clone())?;
        // partition of unity on the interior window
        let mut dev = 0.0f64;
        for &x in &grid.nodes() {
            if family.is_interior(x) {
                dev = dev.max((family.eta_sum(x) - 1.0).abs());
            }
        }
        if dev > 1e-12 {
            failures.push(format!("partition: sum deviates by {dev:.3e} at mu={mu}"));
        }
        let consts = family.measure_constants();
        if consts.overlap != 3 {
            failures.push(format!(
                "partition: overlap {} (expected 3) at mu={mu}",
                consts.overlap
            ));
        }
        c3_values.push(consts.c3);
        let mut rng = seeded_rng(cfg.seed ^ mu.to_bits());
        let r_tr = (1.0 / mu).min(cfg.support_x);
        let mut p41 = 0.0f64;
        let mut p42 = 0.0f64;
        let mut p43 = 0.0f64;
        let mut p44 = 0.0f64;
        for _ in 0..cfg.ensemble {
            let f = random_trace(&mut rng, &grid, cfg.support_x);
            p43 = p43.max(prop43_check(&family, &f));
            p44 = p44.max(prop44_check(&family, &f));
            // per-cell pieces supported in the cell boxes
            let mut pieces = Vec::new();
            for &g in family.indices.iter().filter(|&&g| g.abs() <= 1) {
                let xg = family.center(g);
                let vals: Vec<Complex64> = grid
                    .nodes()
                    .iter()
                    .zip(&f.values)
                    .map(|(&x, &v)| v * crate::ensemble::bump((x - xg) / r_tr))
                    .collect();
                pieces.push((
                    g,
                    InterfaceTrace::new(grid.clone(), vals, (xg - r_tr, xg + r_tr)),
                ));
            }
            p41 = p41.max(prop41_check(&family, &pieces)?);
            let a = |x: f64| 2.0 + x.sin();
            let piece = pieces[0].1.clone();
            p42 = p42.max(prop42_check(&family, pieces[0].0, &piece, &a, 3.0, 1.0)?);
        }
        for (val, slot) in [p41, p42, p43, p44].iter().zip(prop_spread.iter_mut()) {
            slot.1.push(*val);
        }
        for (name, value) in [
            ("sum_dev", dev),
            ("c1", consts.c1),
            ("c2", consts.c2),
            ("c3", consts.c3),
            ("overlap", consts.overlap as f64),
            ("prop41", p41),
            ("prop42", p42),
            ("prop43", p43),
            ("prop44", p44),
        ] {
            csv.row(&[fmt_float(mu), name.to_string(), fmt_float(value)])?;
            rows += 1;
        }
    }
    // scale independence of the measured constants
    let c3_lo = c3_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let c3_hi = c3_values.iter().cloned().fold(0.0f64, f64::max);
    if c3_hi > c3_lo * 1.05 {
        failures.push(format!(
            "partition: c3 varies with mu beyond 5% ({c3_lo:.6e}..{c3_hi:.6e})"
        ));
    }
    for (name, vals) in &prop_spread {
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(0.0f64, f64::max);
        if !(hi.is_finite()) || (lo > 0.0 && hi > 4.0 * lo) {
            failures.push(format!(
                "partition: {name} constant unstable across mu ({lo:.3e}..{hi:.3e})"
            ));
        }
    }
    Ok(outcome(Suite::Partition, rows, failures, csv.finish()?))
}

// ------------------------------------------------------------- assembly

fn run_assembly(cfg: &RunConfig) -> Result<SuiteOutcome> {
    let (_field, _bounds, params) = setup(cfg)?;
    let mut csv = CsvReport::create(
        &cfg.out_dir,
        "assembly",
        &[
            "epsilon", "tau", "mu", "cells", "xi_total", "cell_sum", "r1", "c_measured",
        ],
        &params,
        cfg.seed,
    )?;
    let mut failures = Vec::new();
    let mut rows = 0usize;
    let grid = TensorGrid::new(
        Grid1::symmetric(1.0, cfg.grid_x / 4 + 1),
        HalfGrid::new(params.r0, cfg.grid_y / 4),
    );
    let rx = cfg.support_x.min(0.45);
    let ry = (cfg.support_y).min(0.9 * params.r0);
    for &eps in &cfg.eps_list {
        // mu = sqrt(eps * tau) must reach the minimum cell count of 4
        let tau_floor = 16.0 / eps;
        for &tau in &cfg.tau_list {
            let mut p = params.clone();
            p.epsilon = eps;
            p.tau = tau.max(tau_floor).max(p.tau0);
            let mut rng = seeded_rng(cfg.seed ^ eps.to_bits() ^ tau.to_bits());
            let w = random_two_sided(&mut rng, &grid, rx, ry, false);
            let check = partition_assembly_check(&w, &p)?;
            if !check.c_measured.is_finite() || check.cells_used == 0 {
                failures.push(format!(
                    "assembly: degenerate check at eps={eps}, tau={}",
                    p.tau
                ));
            }
            csv.row(&[
                fmt_float(eps),
                fmt_float(p.tau),
                fmt_float(check.mu),
                check.cells_used.to_string(),
                fmt_float(check.xi_total),
                fmt_float(check.cell_sum),
                fmt_float(check.r1),
                fmt_float(check.c_measured),
            ])?;
            rows += 1;
        }
    }
    Ok(outcome(Suite::Assembly, rows, failures, csv.finish()?))
}

// ------------------------------------------------------------ calibrate

/// Search for defaults that pass the admissibility validation with at
/// least 10% margin on the measured constants of the configured preset.
fn run_calibrate(cfg: &RunConfig) -> Result<SuiteOutcome> {
    cfg.validate()?;
    let field = field_preset(&cfg.field)?;
    let sample = SampleGrid::default_2d(cfg.x_half, cfg.y_half, 33);
    let bounds = field.spectral_bounds(&sample)?;
    let l = bounds.l_ratio;
    let base = cfg.params.clone().with_measured_l(l);
    if base.alpha_plus <= l * base.alpha_minus {
        // the requested slopes cannot work for this preset at any tau
        return Err(Error::Inadmissible(format!(
            "condition (3.42) forces alpha_plus > L * alpha_minus = {:.6}; \
             requested alpha_plus = {} is too small for preset '{}'",
            l * base.alpha_minus,
            base.alpha_plus,
            cfg.field
        )));
    }
    let margin_target = 0.10;
    // bisect the smallest alpha_plus with validation margin >= 10%
    let margin_at = |ap: f64| {
        let mut p = base.clone();
        p.alpha_plus = ap;
        p.validate(&bounds).margin
    };
    let mut lo = l * base.alpha_minus * (1.0 + 1e-9);
    let mut hi = base.alpha_plus.max(l * base.alpha_minus + 2.0);
    while margin_at(hi) < margin_target {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Inadmissible(
                "no alpha_plus reaches a 10% admissibility margin".into(),
            ));
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if margin_at(mid) >= margin_target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let alpha_rec = hi;

    // smallest tau floor in the sweep keeping every configured epsilon
    // above the tau*eps >= 1 threshold
    let eps_min = cfg
        .eps_list
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let tau_rec = cfg
        .tau_list
        .iter()
        .cloned()
        .filter(|&t| t >= 1.0 / eps_min && t >= base.tau0)
        .fold(f64::INFINITY, f64::min);
    let tau_rec = if tau_rec.is_finite() {
        tau_rec
    } else {
        (1.0 / eps_min).max(base.tau0)
    };

    let mut rec = base.clone();
    rec.alpha_plus = alpha_rec;
    rec.tau0 = tau_rec;
    let final_margin = rec.validate(&bounds).margin;
    let mut csv = CsvReport::create(
        &cfg.out_dir,
        "calibrate",
        &["parameter", "recommended", "measured_margin"],
        &rec,
        cfg.seed,
    )?;
    let mut rows = 0usize;
    for (name, value) in [
        ("l_ratio", l),
        ("alpha_plus", alpha_rec),
        ("alpha_minus", rec.alpha_minus),
        ("beta", rec.beta),
        ("s0", rec.s0),
        ("tau0", tau_rec),
    ] {
        csv.row(&[name.to_string(), fmt_float(value), fmt_float(final_margin)])?;
        rows += 1;
    }
    let mut failures = Vec::new();
    if final_margin < margin_target {
        failures.push(format!(
            "calibrate: final margin {final_margin:.3} below {margin_target}"
        ));
    }
    Ok(outcome(Suite::Calibrate, rows, failures, csv.finish()?))
}
