//! Figure-reproduction recipes: each writes one or more deterministic CSV
//! files plus a `.meta.json` sidecar with the configuration and runtime.

use std::path::Path;
use std::time::Instant;

use anyhow::Result;
use rayon::prelude::*;

use gadgetforge::gadgets::{
    build_parallel_three_to_two_gadget, build_subdivision_gadget, build_three_to_two_gadget,
    ot06_subdivision_delta_bound, parallel_high_order_bound, subdivision_delta_bound,
    three_to_two_delta_bound, ParallelThreeToTwoOptions, ThreeToTwoVariant,
};
use gadgetforge::pauli::{Axis, OperatorSum, PauliString};
use gadgetforge::reduction::{reduce_k_to_3, DeltaMode, ReduceOptions};
use gadgetforge::search::{fit_points, log_epsilon_grid, minimal_delta_fn};
use gadgetforge::spectral::{
    block, high_order_term_norm, matrix_operator_norm, self_energy_series, symmetric_z_grid,
};
use gadgetforge::TargetSpec;

use crate::output::{write_csv, write_sidecar, Cell};
use crate::{optimize_gadget, GadgetKind, GadgetOptions};

fn zz_target(alpha: f64) -> TargetSpec {
    TargetSpec::product(
        2,
        alpha,
        vec![
            PauliString::single(0, Axis::Z),
            PauliString::single(1, Axis::Z),
        ],
    )
    .expect("static target")
}

fn zzz_target(alpha: f64) -> TargetSpec {
    TargetSpec::product(
        3,
        alpha,
        vec![
            PauliString::single(0, Axis::Z),
            PauliString::single(1, Axis::Z),
            PauliString::single(2, Axis::Z),
        ],
    )
    .expect("static target")
}

fn fig7_target() -> TargetSpec {
    TargetSpec::new(
        OperatorSum::zero(3),
        vec![
            (
                0.1,
                vec![
                    PauliString::single(0, Axis::X),
                    PauliString::single(1, Axis::Z),
                    PauliString::single(2, Axis::Z),
                ],
            ),
            (
                -0.2,
                vec![
                    PauliString::single(0, Axis::X),
                    PauliString::single(1, Axis::X),
                    PauliString::single(2, Axis::Z),
                ],
            ),
        ],
    )
    .expect("static target")
}

fn fig8_target() -> TargetSpec {
    TargetSpec::new(
        OperatorSum::zero(3),
        vec![
            (
                1.0,
                vec![
                    PauliString::single(0, Axis::Z),
                    PauliString::single(1, Axis::Z),
                    PauliString::single(2, Axis::Z),
                ],
            ),
            (
                -1.0,
                vec![
                    PauliString::single(0, Axis::X),
                    PauliString::single(1, Axis::X),
                    PauliString::single(2, Axis::X),
                ],
            ),
        ],
    )
    .expect("static target")
}

/// Subdivision demonstration: spectral error across alpha at the analytical
/// and the numerically minimal gap, plus the third-order self-energy
/// deviation across z at alpha = 1.
pub fn fig2(out: &Path) -> Result<()> {
    let t0 = Instant::now();
    let eps = 0.05;
    let delta_analytical = subdivision_delta_bound(1.0, 0.0, eps)?;
    let res = optimize_gadget(
        GadgetKind::Subdivision,
        &zz_target(1.0),
        eps,
        1e-5,
        None,
        &GadgetOptions::none(),
    )?;
    let delta_numerical = res.delta_min;

    let alphas: Vec<f64> = (0..21).map(|i| -1.0 + 2.0 * i as f64 / 20.0).collect();
    let rows: Vec<Vec<Cell>> = alphas
        .par_iter()
        .map(|&alpha| {
            let t = zz_target(alpha);
            let top = t.operator()?;
            let ea = build_subdivision_gadget(&t, delta_analytical)?
                .spectral_error(&top)?
                .max_error;
            let en = build_subdivision_gadget(&t, delta_numerical)?
                .spectral_error(&top)?
                .max_error;
            Ok(vec![Cell::Num(alpha), Cell::Num(ea), Cell::Num(en)])
        })
        .collect::<gadgetforge::Result<_>>()?;
    write_csv(
        out,
        &["alpha", "error_analytical", "error_numerical"],
        &rows,
    )?;

    // companion: third-order self-energy deviation over z at alpha = 1
    let t = zz_target(1.0);
    let zs = symmetric_z_grid(1.0 + eps, 201);
    let sigma_rows: Vec<Vec<Cell>> = zs
        .par_iter()
        .map(|&z| {
            let mut row = vec![Cell::Num(z)];
            for delta in [delta_analytical, delta_numerical] {
                let g = build_subdivision_gadget(&t, delta)?;
                let split = g.split();
                let eff = g.effective_target.to_matrix()?;
                let eff_low = block(&eff, split.low_indices(), split.low_indices());
                let sigma = self_energy_series(&g.penalty, &g.perturbation, &split, z, 3)?;
                row.push(Cell::Num(matrix_operator_norm(&(&sigma - &eff_low))?));
            }
            Ok(row)
        })
        .collect::<gadgetforge::Result<_>>()?;
    let sigma_path = crate::output::derived_path(out, "sigma");
    write_csv(
        &sigma_path,
        &["z", "deviation_analytical", "deviation_numerical"],
        &sigma_rows,
    )?;

    write_sidecar(
        out,
        &serde_json::json!({
            "recipe": "fig2", "eps": eps,
            "delta_analytical": delta_analytical, "delta_numerical": delta_numerical,
            "alpha_points": 21, "z_points": 201, "sigma_order": 3,
            "version": env!("CARGO_PKG_VERSION"),
            "runtime_seconds": t0.elapsed().as_secs_f64(),
        }),
    )?;
    Ok(())
}

/// Subdivision gap comparison over eps and over alpha: analytical bound,
/// numerically minimal gap, and the prior assignment.
pub fn fig_sub_compare(out: &Path) -> Result<()> {
    let t0 = Instant::now();
    let eps_grid = log_epsilon_grid(10f64.powf(-0.5), 10f64.powf(-2.5), 21);
    let eps_rows: Vec<Vec<Cell>> = eps_grid
        .par_iter()
        .map(|&eps| {
            let bound = subdivision_delta_bound(1.0, 0.0, eps)?;
            let res = optimize_gadget(
                GadgetKind::Subdivision,
                &zz_target(1.0),
                eps,
                1e-5,
                None,
                &GadgetOptions::none(),
            )?;
            let prior = ot06_subdivision_delta_bound(1.0, 0.0, eps)?;
            Ok(vec![
                Cell::Num(eps),
                Cell::Num(1.0 / eps),
                Cell::Num(bound),
                Cell::Num(res.delta_min),
                Cell::Num(prior),
            ])
        })
        .collect::<gadgetforge::Result<_>>()?;
    let eps_path = crate::output::derived_path(out, "eps");
    write_csv(
        &eps_path,
        &[
            "eps",
            "eps_inv",
            "delta_analytical",
            "delta_numerical",
            "delta_ot06",
        ],
        &eps_rows,
    )?;

    let eps = 0.05;
    let alphas: Vec<f64> = (0..21).map(|i| -1.0 + 2.0 * i as f64 / 20.0).collect();
    let alpha_rows: Vec<Vec<Cell>> = alphas
        .par_iter()
        .map(|&alpha| {
            let bound = subdivision_delta_bound(alpha, 0.0, eps)?;
            let res = optimize_gadget(
                GadgetKind::Subdivision,
                &zz_target(alpha),
                eps,
                1e-5,
                None,
                &GadgetOptions::none(),
            )?;
            let prior = ot06_subdivision_delta_bound(alpha, 0.0, eps)?;
            Ok(vec![
                Cell::Num(alpha),
                Cell::Num(bound),
                Cell::Num(res.delta_min),
                Cell::Num(prior),
            ])
        })
        .collect::<gadgetforge::Result<_>>()?;
    let alpha_path = crate::output::derived_path(out, "alpha");
    write_csv(
        &alpha_path,
        &["alpha", "delta_analytical", "delta_numerical", "delta_ot06"],
        &alpha_rows,
    )?;

    write_sidecar(
        out,
        &serde_json::json!({
            "recipe": "fig-sub-compare",
            "eps_grid": {"hi": 10f64.powf(-0.5), "lo": 10f64.powf(-2.5), "points": 21, "spacing": "log"},
            "alpha_grid": {"lo": -1.0, "hi": 1.0, "points": 21},
            "alpha_fixed": 1.0, "eps_fixed": eps,
            "version": env!("CARGO_PKG_VERSION"),
            "runtime_seconds": t0.elapsed().as_secs_f64(),
        }),
    )?;
    Ok(())
}

/// 7-body to 3-body reduction: per-iteration gaps and spectral errors for
/// the analytical bound and the per-iteration optimized gap.
pub fn fig_par_sub(out: &Path, tol_rel: f64) -> Result<()> {
    let t0 = Instant::now();
    let eps = 5e-4;
    let target = TargetSpec::product(
        7,
        5e-3,
        (0..7).map(|q| PauliString::single(q, Axis::X)).collect(),
    )?;
    let analytical = reduce_k_to_3(&target, eps, &ReduceOptions::default())?;
    let optimized = reduce_k_to_3(
        &target,
        eps,
        &ReduceOptions {
            mode: DeltaMode::Optimized { tol_rel },
            ..Default::default()
        },
    )?;
    let rows: Vec<Vec<Cell>> = analytical
        .iterations
        .iter()
        .zip(&optimized.iterations)
        .enumerate()
        .map(|(i, (a, o))| {
            vec![
                Cell::Int((i + 1) as i64),
                Cell::Int(a.ancillas_added as i64),
                Cell::Num(a.delta),
                Cell::Num(a.measured_error),
                Cell::Num(o.delta),
                Cell::Num(o.measured_error),
            ]
        })
        .collect();
    write_csv(
        out,
        &[
            "iteration",
            "ancillas_added",
            "delta_analytical",
            "error_analytical",
            "delta_numerical",
            "error_numerical",
        ],
        &rows,
    )?;
    write_sidecar(
        out,
        &serde_json::json!({
            "recipe": "fig-par-sub", "k": 7, "alpha": 5e-3, "eps": eps,
            "optimizer_tol_rel": tol_rel,
            "final_error_analytical": analytical.final_error,
            "final_error_numerical": optimized.final_error,
            "cumulative_budget": analytical.cumulative_error_budget,
            "version": env!("CARGO_PKG_VERSION"),
            "runtime_seconds": t0.elapsed().as_secs_f64(),
        }),
    )?;
    Ok(())
}

/// 3-to-2 gap comparison: improved analytical bound plus optimized gaps for
/// the improved and prior variants, over eps and over alpha.
pub fn fig_32_compare(out: &Path) -> Result<()> {
    let t0 = Instant::now();
    let optimize_variant = |alpha: f64, eps: f64, variant: ThreeToTwoVariant| {
        let t = zzz_target(alpha);
        let top = t.operator()?;
        let lo = alpha.abs() + eps + 1e-6;
        let hi = match variant {
            ThreeToTwoVariant::Improved => Some(three_to_two_delta_bound(alpha, 0.0, eps)?),
            ThreeToTwoVariant::Ot06 => None,
        };
        let err = |d: f64| -> gadgetforge::Result<f64> {
            let g = build_three_to_two_gadget(&t, d, variant)?;
            Ok(g.spectral_error(&top)?.max_error)
        };
        minimal_delta_fn(&err, lo, hi, eps, 1e-5)
    };

    let eps_grid = log_epsilon_grid(10f64.powf(-1.0), 10f64.powf(-2.4), 12);
    let eps_rows: Vec<Vec<Cell>> = eps_grid
        .par_iter()
        .map(|&eps| {
            let bound = three_to_two_delta_bound(1.0, 0.0, eps)?;
            let improved = optimize_variant(1.0, eps, ThreeToTwoVariant::Improved)?;
            let prior = optimize_variant(1.0, eps, ThreeToTwoVariant::Ot06)?;
            Ok(vec![
                Cell::Num(eps),
                Cell::Num(1.0 / eps),
                Cell::Num(bound),
                Cell::Num(improved.delta_min),
                Cell::Num(prior.delta_min),
            ])
        })
        .collect::<gadgetforge::Result<_>>()?;
    let eps_path = crate::output::derived_path(out, "eps");
    write_csv(
        &eps_path,
        &[
            "eps",
            "eps_inv",
            "delta_analytical",
            "delta_numerical",
            "delta_ot06",
        ],
        &eps_rows,
    )?;

    let eps = 0.01;
    let alphas: Vec<f64> = (1..=10)
        .flat_map(|i| {
            let a = i as f64 / 10.0;
            [-a, a]
        })
        .collect();
    let mut alphas = alphas;
    alphas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let alpha_rows: Vec<Vec<Cell>> = alphas
        .par_iter()
        .map(|&alpha| {
            let bound = three_to_two_delta_bound(alpha, 0.0, eps)?;
            let improved = optimize_variant(alpha, eps, ThreeToTwoVariant::Improved)?;
            let prior = optimize_variant(alpha, eps, ThreeToTwoVariant::Ot06)?;
            Ok(vec![
                Cell::Num(alpha),
                Cell::Num(bound),
                Cell::Num(improved.delta_min),
                Cell::Num(prior.delta_min),
            ])
        })
        .collect::<gadgetforge::Result<_>>()?;
    let alpha_path = crate::output::derived_path(out, "alpha");
    write_csv(
        &alpha_path,
        &["alpha", "delta_analytical", "delta_numerical", "delta_ot06"],
        &alpha_rows,
    )?;

    write_sidecar(
        out,
        &serde_json::json!({
            "recipe": "fig-32-compare",
            "eps_grid": {"hi": 0.1, "lo": 10f64.powf(-2.4), "points": 12, "spacing": "log"},
            "alpha_grid": {"magnitudes": "0.1..1.0 in 0.1 steps, both signs"},
            "alpha_fixed": 1.0, "eps_fixed": eps,
            "version": env!("CARGO_PKG_VERSION"),
            "runtime_seconds": t0.elapsed().as_secs_f64(),
        }),
    )?;
    Ok(())
}

/// Fifth-order ZZZ gadget: minimal gap against eps (slope in the sidecar)
/// and against alpha at fixed eps.
pub fn fig_5th(out: &Path) -> Result<()> {
    let t0 = Instant::now();
    let eps_grid = log_epsilon_grid(10f64.powf(-0.7), 10f64.powf(-2.3), 12);
    let results: Vec<(f64, gadgetforge::search::DeltaSearchResult)> = eps_grid
        .par_iter()
        .map(|&eps| {
            let res = optimize_gadget(
                GadgetKind::FifthZzz,
                &zzz_target(0.1),
                eps,
                1e-5,
                None,
                &GadgetOptions::none(),
            )?;
            Ok((eps, res))
        })
        .collect::<gadgetforge::Result<_>>()?;
    let rows: Vec<Vec<Cell>> = results
        .iter()
        .map(|(eps, r)| {
            vec![
                Cell::Num(*eps),
                Cell::Num(1.0 / eps),
                Cell::Num(r.delta_min),
                Cell::Num(r.achieved_error),
                Cell::Text(r.converged.to_string()),
            ]
        })
        .collect();
    write_csv(
        out,
        &["eps", "eps_inv", "delta_min", "achieved_error", "converged"],
        &rows,
    )?;
    let fit = fit_points(
        results
            .iter()
            .filter(|(_, r)| r.converged)
            .map(|(eps, r)| ((1.0 / eps).ln(), r.delta_min.ln()))
            .collect(),
    );

    let eps = 0.01;
    let alphas: Vec<f64> = (1..=10).map(|i| 0.02 * i as f64).collect();
    let alpha_rows: Vec<Vec<Cell>> = alphas
        .par_iter()
        .map(|&alpha| {
            let res = optimize_gadget(
                GadgetKind::FifthZzz,
                &zzz_target(alpha),
                eps,
                1e-5,
                None,
                &GadgetOptions::none(),
            )?;
            Ok(vec![
                Cell::Num(alpha),
                Cell::Num(res.delta_min),
                Cell::Num(res.achieved_error),
                Cell::Text(res.converged.to_string()),
            ])
        })
        .collect::<gadgetforge::Result<_>>()?;
    let alpha_path = crate::output::derived_path(out, "alpha");
    write_csv(
        &alpha_path,
        &["alpha", "delta_min", "achieved_error", "converged"],
        &alpha_rows,
    )?;

    write_sidecar(
        out,
        &serde_json::json!({
            "recipe": "fig-5th", "alpha": 0.1,
            "eps_grid": {"hi": 10f64.powf(-0.7), "lo": 10f64.powf(-2.3), "points": 12, "spacing": "log"},
            "slope": fit.as_ref().map(|f| f.slope).ok(),
            "slope_r_squared": fit.as_ref().map(|f| f.r_squared).ok(),
            "alpha_sweep": {"lo": 0.02, "hi": 0.2, "points": 10, "eps": eps},
            "version": env!("CARGO_PKG_VERSION"),
            "runtime_seconds": t0.elapsed().as_secs_f64(),
        }),
    )?;
    Ok(())
}

/// High-order series term norms of the parallel 3-to-2 gadget against the
/// analytical bound, at the numerically minimal gap.
pub fn fig_par3_bound(out: &Path) -> Result<()> {
    let t0 = Instant::now();
    let t = fig7_target();
    let top = t.operator()?;
    let eps = 0.01;
    let opts = ParallelThreeToTwoOptions::default();
    let err = |d: f64| -> gadgetforge::Result<f64> {
        let g = build_parallel_three_to_two_gadget(&t, d, &opts)?;
        Ok(g.spectral_error(&top)?.max_error)
    };
    let res = minimal_delta_fn(&err, 0.3 + eps + 1e-6, None, eps, 1e-5)?;
    let dstar = res.delta_min;

    let g = build_parallel_three_to_two_gadget(&t, dstar, &opts)?;
    let split = g.split();
    let max_z = 0.3 + eps;
    let zs = symmetric_z_grid(max_z, 11);
    let mut rows = Vec::new();
    let mut bound_info = Vec::new();
    for k in 3..=8usize {
        let mut measured = 0.0f64;
        for &z in &zs {
            measured = measured.max(high_order_term_norm(
                &g.penalty,
                &g.perturbation,
                &split,
                z,
                k,
            )?);
        }
        let bound = parallel_high_order_bound(k, 2, &[0.1, -0.2], 0.0, dstar, max_z)?;
        rows.push(vec![
            Cell::Int((k + 2) as i64),
            Cell::Int(k as i64),
            Cell::Num(measured),
            Cell::Num(bound.order_bound),
        ]);
        bound_info.push((k, bound.tail_bound, bound.v_s, bound.v_f));
    }
    write_csv(out, &["order", "k", "measured_norm", "bound"], &rows)?;
    write_sidecar(
        out,
        &serde_json::json!({
            "recipe": "fig-par3-bound",
            "target": "0.1 X1 Z2 Z3 - 0.2 X1 X2 Z3",
            "eps": eps, "delta_min": dstar, "max_z": max_z,
            "tail_bound": bound_info[0].1, "v_s": bound_info[0].2, "v_f": bound_info[0].3,
            "z_points": zs.len(),
            "version": env!("CARGO_PKG_VERSION"),
            "runtime_seconds": t0.elapsed().as_secs_f64(),
        }),
    )?;
    Ok(())
}

/// Parallel 3-to-2 scaling on Z1Z2Z3 - X1X2X3: the improved construction
/// (with pair sub-gadget and channel compensation) against the prior
/// variant applied in parallel.
pub fn fig_par3_scaling(out: &Path) -> Result<()> {
    let t0 = Instant::now();
    let t = fig8_target();
    let top = t.operator()?;
    let eps_grid = log_epsilon_grid(10f64.powf(-1.33), 10f64.powf(-2.33), 7);
    let optimize = |eps: f64, variant: ThreeToTwoVariant| {
        let opts = ParallelThreeToTwoOptions {
            variant,
            ..Default::default()
        };
        let err = |d: f64| -> gadgetforge::Result<f64> {
            let g = build_parallel_three_to_two_gadget(&t, d, &opts)?;
            Ok(g.spectral_error(&top)?.max_error)
        };
        minimal_delta_fn(&err, 2.0 + eps + 1e-6, None, eps, 1e-4)
    };
    let rows: Vec<Vec<Cell>> = eps_grid
        .par_iter()
        .map(|&eps| {
            let improved = optimize(eps, ThreeToTwoVariant::Improved)?;
            let prior = optimize(eps, ThreeToTwoVariant::Ot06)?;
            Ok(vec![
                Cell::Num(eps),
                Cell::Num(1.0 / eps),
                Cell::Num(improved.delta_min),
                Cell::Num(improved.achieved_error),
                Cell::Num(prior.delta_min),
                Cell::Num(prior.achieved_error),
            ])
        })
        .collect::<gadgetforge::Result<_>>()?;
    write_csv(
        out,
        &[
            "eps",
            "eps_inv",
            "delta_improved",
            "error_improved",
            "delta_prior",
            "error_prior",
        ],
        &rows,
    )?;
    write_sidecar(
        out,
        &serde_json::json!({
            "recipe": "fig-par3-scaling",
            "target": "Z1Z2Z3 - X1X2X3",
            "eps_grid": {"hi": 10f64.powf(-1.33), "lo": 10f64.powf(-2.33), "points": 7, "spacing": "log"},
            "optimizer_tol_rel": 1e-4,
            "version": env!("CARGO_PKG_VERSION"),
            "runtime_seconds": t0.elapsed().as_secs_f64(),
        }),
    )?;
    Ok(())
}
