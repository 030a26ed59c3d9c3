//! Monte Carlo campaigns: configuration, deterministic parallel
//! execution, and CSV reporting.

mod campaigns;
pub mod config;
pub mod report;

pub use campaigns::{
    connection_epsilon, mean_over, record_key, run_campaign, run_campaign_skipping,
    run_concentration, run_connection, run_crossing_scaling, run_kac_rice_moments,
    run_lemma_sweep, sweep_values, wilson_interval, JobKey,
};
pub use config::{CampaignKind, ExperimentConfig};
pub use report::{
    emit_report, header, observable_columns, param_column, parse_report, render_csv,
    sidecar_path, sort_records, ExperimentRecord,
};
