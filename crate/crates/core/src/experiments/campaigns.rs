//! The Monte Carlo campaign runners.
//!
//! Every campaign is a sweep over one parameter list crossed with a
//! trial range. Trials are independent: each derives its own seed
//! from the master seed and the flat job index, so the runner can
//! execute them on any number of workers and still produce identical
//! records. Grids that would exceed the node budget yield an aborted
//! record instead of running.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::boundary_geom::extract_contours;
use crate::chem_dist::{chemical_distance, s_statistic_with_cap, DiameterMode};
use crate::error::Error;
use crate::excursion::{detect_crossing, excursion_mask, label_components, CrossDir};
use crate::experiments::config::{CampaignKind, ExperimentConfig};
use crate::experiments::report::{observable_columns, sort_records, ExperimentRecord};
use crate::geom::{Point, Rect};
use crate::global_structure::{
    build_geometry, detect_structure_events, verify_connection_structure,
};
use crate::grid::GridSpec;
use crate::synth::{derive_seed, discretize, sample_field, sup_abs_diff};
use crate::Result;

/// Identity of one completed sweep point, used to skip work on
/// resume: the sweep value's bits plus the trial index.
pub type JobKey = (u64, u64);

/// The resume key of a record.
pub fn record_key(record: &ExperimentRecord) -> JobKey {
    (record.param.to_bits(), record.trial)
}

/// The parameter list the campaign sweeps over.
pub fn sweep_values(config: &ExperimentConfig) -> Vec<f64> {
    match config.campaign {
        CampaignKind::Connection => config.x_values.clone(),
        CampaignKind::CrossingScaling => config.lambda_values.clone(),
        CampaignKind::Concentration => config.epsilon_values.clone(),
        CampaignKind::KacRiceMoments => vec![0.0],
        CampaignKind::SbMoments | CampaignKind::LemmaSweep => config.lambda_values.clone(),
    }
}

/// Runs the configured campaign and returns its sorted records.
pub fn run_campaign(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    run_campaign_skipping(config, &HashSet::new())
}

/// Like [`run_campaign`] but skipping sweep points whose keys are in
/// `done` (their records are assumed to exist already).
pub fn run_campaign_skipping(
    config: &ExperimentConfig,
    done: &HashSet<JobKey>,
) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let params = sweep_values(config);
    let mut jobs = Vec::new();
    for (pi, &param) in params.iter().enumerate() {
        for trial in 0..config.n_trials {
            if !done.contains(&(param.to_bits(), trial)) {
                jobs.push((pi, trial));
            }
        }
    }
    let nested: Vec<Vec<ExperimentRecord>> = jobs
        .par_iter()
        .map(|&(pi, trial)| run_trial(config, params[pi], pi, trial))
        .collect::<Result<_>>()?;
    let mut records: Vec<ExperimentRecord> = nested.into_iter().flatten().collect();
    sort_records(&mut records);
    Ok(records)
}

fn expect_campaign(config: &ExperimentConfig, allowed: &[CampaignKind]) -> Result<()> {
    if allowed.contains(&config.campaign) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "campaign {} does not belong to this runner",
            config.campaign
        )))
    }
}

/// Long-range connectivity, chemical distance, and structure events.
pub fn run_connection(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    expect_campaign(config, &[CampaignKind::Connection])?;
    run_campaign(config)
}

/// Rectangle crossing probabilities across scales.
pub fn run_crossing_scaling(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    expect_campaign(config, &[CampaignKind::CrossingScaling])?;
    run_campaign(config)
}

/// Coarsening error tails.
pub fn run_concentration(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    expect_campaign(config, &[CampaignKind::Concentration])?;
    run_campaign(config)
}

/// Level-set length moments, and the summed-diameter moments when the
/// config selects that campaign.
pub fn run_kac_rice_moments(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    expect_campaign(config, &[CampaignKind::KacRiceMoments, CampaignKind::SbMoments])?;
    run_campaign(config)
}

/// Per-component diameter certificates.
pub fn run_lemma_sweep(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    expect_campaign(config, &[CampaignKind::LemmaSweep])?;
    run_campaign(config)
}

fn run_trial(
    config: &ExperimentConfig,
    param: f64,
    param_idx: usize,
    trial: u64,
) -> Result<Vec<ExperimentRecord>> {
    let seed = derive_seed(
        config.master_seed,
        param_idx as u64 * config.n_trials + trial,
    );
    match config.campaign {
        CampaignKind::Connection => connection_trial(config, param, trial, seed),
        CampaignKind::CrossingScaling => crossing_trial(config, param, trial, seed),
        CampaignKind::Concentration => concentration_trial(config, param, trial, seed),
        CampaignKind::KacRiceMoments => kac_rice_trial(config, trial, seed),
        CampaignKind::SbMoments => sb_trial(config, param, trial, seed),
        CampaignKind::LemmaSweep => lemma_trial(config, param, trial, seed),
    }
}

/// Smallest rect with corners on the `unit` lattice containing the
/// given corners.
fn snapped_rect(x0: f64, y0: f64, x1: f64, y1: f64, unit: f64) -> Result<Rect> {
    Rect::new(
        (x0 / unit).floor() * unit,
        (y0 / unit).floor() * unit,
        (x1 / unit).ceil() * unit,
        (y1 / unit).ceil() * unit,
    )
}

/// Builds the sampling grid, or None when it would blow the node
/// budget and the trial must be recorded as aborted.
fn budgeted_grid(config: &ExperimentConfig, extent: Rect) -> Result<Option<GridSpec>> {
    let grid = GridSpec::new(config.pitch, extent, config.kernel.truncation_radius)?;
    if grid.node_count() > config.max_grid_nodes {
        return Ok(None);
    }
    Ok(Some(grid))
}

fn record(
    config: &ExperimentConfig,
    param: f64,
    trial: u64,
    seed: u64,
    values: Vec<f64>,
) -> ExperimentRecord {
    debug_assert_eq!(values.len(), observable_columns(config.campaign).len());
    ExperimentRecord {
        campaign: config.campaign,
        param,
        trial,
        seed,
        values,
    }
}

/// An all-zero record with the trailing aborted flag set and any
/// leading columns that are known without sampling filled in.
fn aborted_record(
    config: &ExperimentConfig,
    param: f64,
    trial: u64,
    seed: u64,
    known: &[f64],
) -> ExperimentRecord {
    let mut values = vec![0.0; observable_columns(config.campaign).len()];
    values[..known.len()].copy_from_slice(known);
    *values.last_mut().expect("campaigns with abort flags have columns") = 1.0;
    record(config, param, trial, seed, values)
}

fn as01(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// The coarsening scale for separation `x`: `(ln x)^(-(1/2+delta))`
/// rounded to the nearest positive multiple of the pitch.
pub fn connection_epsilon(x: f64, delta: f64, pitch: f64) -> f64 {
    let target = x.ln().powf(-(0.5 + delta));
    (target / pitch).round().max(1.0) * pitch
}

fn connection_trial(
    config: &ExperimentConfig,
    x: f64,
    trial: u64,
    seed: u64,
) -> Result<Vec<ExperimentRecord>> {
    let geom = build_geometry(x, config.delta)?;
    let eps = connection_epsilon(x, config.delta, config.pitch);
    let base = x * x.ln().powf(1.5 + config.delta);
    let threshold = config.c1 * base;

    // Paths may wander outside H before the structure forms; the box
    // extends 2 l(x) past H on every side as a pragmatic cutoff.
    let margin = 2.0 * geom.l;
    let extent = snapped_rect(
        geom.h_rect.x0 - margin,
        geom.h_rect.y0 - margin,
        geom.h_rect.x1 + margin,
        geom.h_rect.y1 + margin,
        eps,
    )?;
    let Some(grid) = budgeted_grid(config, extent)? else {
        return Ok(vec![aborted_record(config, x, trial, seed, &[eps])]);
    };

    let f = sample_field(&config.kernel, &grid, seed)?;
    let f_eps = discretize(&f, eps)?;
    let labeling_f = label_components(&excursion_mask(&f, config.level)?);
    let path = chemical_distance(&labeling_f, Point::new(0.0, 0.0), Point::new(x, 0.0))?;
    let report = detect_structure_events(&f, &f_eps, &geom, config.level)?;

    let (checked, ok) = if report.g1 && path.reachable {
        let labeling_eps = label_components(&excursion_mask(&f_eps, config.level / 2.0)?);
        let s = verify_connection_structure(&labeling_f, &labeling_eps, &geom)?;
        (true, s.verified)
    } else {
        (false, false)
    };

    let values = vec![
        eps,
        as01(path.reachable),
        path.length,
        x,
        threshold,
        as01(path.reachable && path.length > threshold),
        path.length / base,
        as01(report.g1),
        as01(report.g2.unwrap_or(false)),
        report.sup_diff.unwrap_or(f64::INFINITY),
        as01(checked),
        as01(ok),
        0.0,
    ];
    Ok(vec![record(config, x, trial, seed, values)])
}

fn crossing_trial(
    config: &ExperimentConfig,
    lambda: f64,
    trial: u64,
    seed: u64,
) -> Result<Vec<ExperimentRecord>> {
    let eps = config.epsilon_values[0];
    let extent = snapped_rect(0.0, 0.0, 2.0 * lambda, lambda, eps)?;
    let Some(grid) = budgeted_grid(config, extent)? else {
        return Ok(vec![aborted_record(config, lambda, trial, seed, &[eps])]);
    };

    let f = sample_field(&config.kernel, &grid, seed)?;
    let labeling = label_components(&excursion_mask(&f, config.level)?);
    let rect = Rect::new(0.0, 0.0, 2.0 * lambda, lambda)?;
    let square = Rect::new(0.0, 0.0, lambda, lambda)?;
    let crossing_f = detect_crossing(&labeling, &rect, CrossDir::LeftRight)?;
    let crossing_square = detect_crossing(&labeling, &square, CrossDir::LeftRight)?;

    let f_eps = discretize(&f, eps)?;
    let labeling_eps = label_components(&excursion_mask(&f_eps, config.level)?);
    let crossing_eps = detect_crossing(&labeling_eps, &rect, CrossDir::LeftRight)?;

    let values = vec![
        eps,
        as01(crossing_f),
        as01(crossing_eps),
        as01(crossing_square),
        0.0,
    ];
    Ok(vec![record(config, lambda, trial, seed, values)])
}

fn concentration_trial(
    config: &ExperimentConfig,
    eps: f64,
    trial: u64,
    seed: u64,
) -> Result<Vec<ExperimentRecord>> {
    let s = config.s_values[0];
    // The sup is taken over the unit box; the extent rounds up to the
    // epsilon lattice.
    let half = (1.05 / eps).ceil() * eps;
    let extent = Rect::new(-half, -half, half, half)?;
    let Some(grid) = budgeted_grid(config, extent)? else {
        return Ok(vec![aborted_record(config, eps, trial, seed, &[s])]);
    };

    let f = sample_field(&config.kernel, &grid, seed)?;
    let f_eps = discretize(&f, eps)?;
    let sup = sup_abs_diff(&f, &f_eps, &Rect::new(-1.0, -1.0, 1.0, 1.0)?)?;
    let values = vec![s, sup, as01(sup >= s), 0.0];
    Ok(vec![record(config, eps, trial, seed, values)])
}

fn kac_rice_trial(
    config: &ExperimentConfig,
    trial: u64,
    seed: u64,
) -> Result<Vec<ExperimentRecord>> {
    let h = config.pitch;
    let side = (1.0 / h).ceil() * h;
    let extent = Rect::new(0.0, 0.0, side, side)?;
    let Some(grid) = budgeted_grid(config, extent)? else {
        return Ok(vec![aborted_record(config, 0.0, trial, seed, &[])]);
    };

    let f = sample_field(&config.kernel, &grid, seed)?;
    let set = extract_contours(&f, config.level, &Rect::new(0.0, 0.0, 1.0, 1.0)?)?;
    let values = vec![set.level_set_length(), 0.0];
    Ok(vec![record(config, 0.0, trial, seed, values)])
}

fn sb_trial(
    config: &ExperimentConfig,
    r: f64,
    trial: u64,
    seed: u64,
) -> Result<Vec<ExperimentRecord>> {
    let boxr = Rect::new(0.0, 0.0, r, r)?;
    let extent = snapped_rect(0.0, 0.0, r, r, config.pitch)?;
    let Some(grid) = budgeted_grid(config, extent)? else {
        return Ok(vec![aborted_record(config, r, trial, seed, &[])]);
    };

    let f = sample_field(&config.kernel, &grid, seed)?;
    let labeling = label_components(&excursion_mask(&f, config.level)?);
    let stat = match s_statistic_with_cap(
        &labeling,
        &boxr,
        DiameterMode::Exact,
        Some(config.diameter_cap),
    ) {
        Ok(stat) => stat,
        // A component too large for the exact-diameter budget aborts
        // the trial rather than degrading the estimate.
        Err(Error::CapExceeded { .. }) => {
            return Ok(vec![aborted_record(config, r, trial, seed, &[])]);
        }
        Err(e) => return Err(e),
    };
    let set = extract_contours(&f, config.level, &boxr)?;
    let level_length = set.level_set_length();
    // Chain bound: every component's diameter is at most twice its
    // boundary length, and the boundary lengths sum to at most the
    // box's level-set length plus its perimeter.
    let rhs = 2.0 * (8.0 * r + level_length);
    let values = vec![
        stat.total,
        level_length,
        rhs,
        as01(stat.total <= rhs * 1.10),
        0.0,
    ];
    Ok(vec![record(config, r, trial, seed, values)])
}

fn lemma_trial(
    config: &ExperimentConfig,
    r: f64,
    trial: u64,
    seed: u64,
) -> Result<Vec<ExperimentRecord>> {
    let boxr = Rect::new(0.0, 0.0, r, r)?;
    let extent = snapped_rect(0.0, 0.0, r, r, config.pitch)?;
    // This campaign's schema has no abort flag; an over-budget grid
    // contributes no records, which the header-only output makes
    // visible.
    let Some(grid) = budgeted_grid(config, extent)? else {
        return Ok(Vec::new());
    };

    let f = sample_field(&config.kernel, &grid, seed)?;
    let set = extract_contours(&f, config.level, &boxr)?;
    let labeling = set.labeling();
    let mut records = Vec::new();
    for label in 1..=labeling.n_components() as u32 {
        let check = match crate::boundary_geom::verify_diameter_bound(
            &set,
            label,
            0.10,
            Some(config.diameter_cap),
        ) {
            Ok(check) => check,
            // Components above the exact-diameter cap are out of
            // scope; ones whose boundary fails to decompose cannot be
            // measured at all. Both are skipped, not fudged.
            Err(Error::CapExceeded { .. }) | Err(Error::ClassificationFailure { .. }) => continue,
            Err(e) => return Err(e),
        };
        let values = vec![
            label as f64,
            labeling.component_size(label) as f64,
            check.diameter,
            check.boundary_length,
            check.diameter / check.boundary_length,
            as01(check.holds),
        ];
        records.push(record(config, r, trial, seed, values));
    }
    Ok(records)
}

/// Wilson score interval for a binomial proportion at normal quantile
/// `z`; the standard way to report the campaign frequencies.
pub fn wilson_interval(hits: u64, n: u64, z: f64) -> (f64, f64) {
    assert!(n > 0 && hits <= n && z > 0.0);
    let (h, n) = (hits as f64, n as f64);
    let p = h / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Mean of `f(record)` over records, used by reports and tests.
pub fn mean_over(records: &[ExperimentRecord], f: impl Fn(&ExperimentRecord) -> f64) -> f64 {
    if records.is_empty() {
        return f64::NAN;
    }
    records.iter().map(f).sum::<f64>() / records.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::report::render_csv;

    fn quick_config(campaign: CampaignKind) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(campaign);
        cfg.pitch = 0.25;
        cfg.n_trials = 4;
        cfg.master_seed = 7;
        cfg.epsilon_values = vec![0.5];
        cfg.lambda_values = vec![2.0];
        cfg.x_values = vec![4.0];
        cfg
    }

    #[test]
    fn runner_rejects_foreign_campaigns() {
        let cfg = quick_config(CampaignKind::Connection);
        assert!(run_crossing_scaling(&cfg).is_err());
        assert!(run_lemma_sweep(&cfg).is_err());
        assert!(run_connection(&cfg).is_ok());
    }

    #[test]
    fn connection_extremes_track_the_level() {
        let mut cfg = quick_config(CampaignKind::Connection);
        cfg.level = 10.0;
        let records = run_connection(&cfg).unwrap();
        assert_eq!(records.len(), 4);
        for rec in &records {
            assert_eq!(rec.value("connected"), Some(1.0));
            assert_eq!(rec.value("aborted"), Some(0.0));
            // A fully open plane leaves only the octile overhead.
            let d = rec.value("d_chem").unwrap();
            assert!(d <= 1.1 * rec.value("euclid").unwrap());
            assert!(rec.value("g1") == Some(1.0) && rec.value("g2") == Some(1.0));
            assert_eq!(rec.value("struct_ok"), Some(1.0));
            assert_eq!(rec.value("exceeds"), Some(0.0));
        }

        cfg.level = -10.0;
        let records = run_connection(&cfg).unwrap();
        for rec in &records {
            assert_eq!(rec.value("connected"), Some(0.0));
            assert_eq!(rec.value("d_chem"), Some(f64::INFINITY));
            assert_eq!(rec.value("g1"), Some(0.0));
        }
    }

    #[test]
    fn records_recompute_from_their_stored_seeds() {
        // An independent re-scan of the stored seed must land on the
        // same observables the campaign recorded.
        let mut cfg = quick_config(CampaignKind::Connection);
        cfg.level = 1.0;
        cfg.x_values = vec![4.0, 5.0];
        cfg.n_trials = 3;
        let records = run_connection(&cfg).unwrap();
        assert_eq!(records.len(), 6);
        for rec in &records {
            let x = rec.param;
            let eps = rec.value("epsilon").unwrap();
            let geom = build_geometry(x, cfg.delta).unwrap();
            let margin = 2.0 * geom.l;
            let extent = snapped_rect(
                geom.h_rect.x0 - margin,
                geom.h_rect.y0 - margin,
                geom.h_rect.x1 + margin,
                geom.h_rect.y1 + margin,
                eps,
            )
            .unwrap();
            let grid = GridSpec::new(cfg.pitch, extent, cfg.kernel.truncation_radius).unwrap();
            let f = sample_field(&cfg.kernel, &grid, rec.seed).unwrap();
            let labeling = label_components(&excursion_mask(&f, cfg.level).unwrap());
            let path =
                chemical_distance(&labeling, Point::new(0.0, 0.0), Point::new(x, 0.0)).unwrap();
            assert_eq!(rec.value("connected"), Some(as01(path.reachable)));
            assert_eq!(rec.value("d_chem"), Some(path.length));
            let threshold = rec.value("threshold").unwrap();
            assert_eq!(
                rec.value("exceeds"),
                Some(as01(path.reachable && path.length > threshold))
            );
        }
    }

    #[test]
    fn crossing_extremes_and_epsilon_column() {
        let mut cfg = quick_config(CampaignKind::CrossingScaling);
        cfg.level = 10.0;
        let records = run_crossing_scaling(&cfg).unwrap();
        for rec in &records {
            assert_eq!(rec.value("crossing_f"), Some(1.0));
            assert_eq!(rec.value("crossing_eps"), Some(1.0));
            assert_eq!(rec.value("crossing_square"), Some(1.0));
            assert_eq!(rec.value("epsilon"), Some(0.5));
        }
    }

    #[test]
    fn concentration_flags_the_tail_threshold() {
        let mut cfg = quick_config(CampaignKind::Concentration);
        cfg.s_values = vec![0.05];
        let records = run_concentration(&cfg).unwrap();
        assert_eq!(records.len(), 4);
        for rec in &records {
            let sup = rec.value("sup_diff").unwrap();
            assert!(sup > 0.0 && sup.is_finite());
            assert_eq!(rec.value("exceeds_s"), Some(as01(sup >= 0.05)));
        }
    }

    #[test]
    fn lemma_sweep_extreme_levels() {
        // An empty excursion set contributes nothing.
        let mut cfg = quick_config(CampaignKind::LemmaSweep);
        cfg.n_trials = 2;
        cfg.level = -10.0;
        assert!(run_lemma_sweep(&cfg).unwrap().is_empty());

        // A fully open box is one component: diagonal diameter
        // r*sqrt(2) against the 4r clip frame.
        cfg.level = 10.0;
        let records = run_lemma_sweep(&cfg).unwrap();
        assert_eq!(records.len(), 2);
        for rec in &records {
            assert_eq!(rec.value("component"), Some(1.0));
            let ratio = rec.value("ratio").unwrap();
            assert!((ratio - std::f64::consts::SQRT_2 / 4.0).abs() < 0.05, "ratio {ratio}");
            assert_eq!(rec.value("holds"), Some(1.0));
        }
    }

    #[test]
    fn sb_moments_chain_bound_on_open_field() {
        let mut cfg = quick_config(CampaignKind::SbMoments);
        cfg.level = 10.0;
        cfg.n_trials = 2;
        let records = run_kac_rice_moments(&cfg).unwrap();
        for rec in &records {
            // One full-box component: S(B) = 2*sqrt(2), level length 0.
            assert!((rec.value("s_b").unwrap() - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-9);
            assert_eq!(rec.value("level_length"), Some(0.0));
            assert_eq!(rec.value("bound_ok"), Some(1.0));
        }
    }

    #[test]
    fn kac_rice_campaign_records_lengths() {
        let mut cfg = quick_config(CampaignKind::KacRiceMoments);
        cfg.level = 0.0;
        cfg.n_trials = 6;
        let records = run_kac_rice_moments(&cfg).unwrap();
        assert_eq!(records.len(), 6);
        assert!(records.iter().any(|r| r.value("length").unwrap() > 0.0));
    }

    #[test]
    fn over_budget_trials_abort_without_sampling() {
        let mut cfg = quick_config(CampaignKind::CrossingScaling);
        cfg.max_grid_nodes = 10;
        let records = run_crossing_scaling(&cfg).unwrap();
        assert_eq!(records.len(), 4);
        for rec in &records {
            assert_eq!(rec.value("aborted"), Some(1.0));
            assert_eq!(rec.value("crossing_f"), Some(0.0));
        }
    }

    #[test]
    fn skipping_a_trial_leaves_the_others_untouched() {
        let cfg = quick_config(CampaignKind::CrossingScaling);
        let all = run_campaign(&cfg).unwrap();
        let mut done = HashSet::new();
        done.insert((2.0f64.to_bits(), 1u64));
        let partial = run_campaign_skipping(&cfg, &done).unwrap();
        assert_eq!(partial.len(), all.len() - 1);
        let kept: Vec<_> = all.iter().filter(|r| r.trial != 1).cloned().collect();
        assert_eq!(partial, kept);
    }

    #[test]
    fn output_is_identical_across_thread_counts() {
        let cfg = quick_config(CampaignKind::CrossingScaling);
        let mut renders = Vec::new();
        for threads in [1usize, 3] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            let records = pool.install(|| run_campaign(&cfg)).unwrap();
            renders.push(render_csv(cfg.campaign, &records).unwrap());
        }
        assert_eq!(renders[0], renders[1]);
    }

    #[test]
    fn wilson_interval_matches_reference_values() {
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!((lo - 0.40383).abs() < 1e-4, "lo {lo}");
        assert!((hi - 0.59617).abs() < 1e-4, "hi {hi}");
        let (lo, hi) = wilson_interval(0, 20, 1.96);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.2);
    }
}
