//! Record schemas and CSV plumbing.
//!
//! Every campaign has a fixed column order: the sweep parameter
//! (when it has one), the trial index, the derived seed, then the
//! campaign's observables. Numbers are written with the shortest
//! round-trip decimal form, so a parsed report compares equal to the
//! records it came from and re-emission is byte-identical.

use std::fs;
use std::path::Path;

use crate::error::Error;
use crate::experiments::config::{CampaignKind, ExperimentConfig};
use crate::Result;

/// One observation row. `param` is the value of the campaign's sweep
/// column (x, lambda, epsilon, or R) and is ignored for campaigns
/// without one; `values` follow [`observable_columns`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub campaign: CampaignKind,
    pub param: f64,
    pub trial: u64,
    pub seed: u64,
    pub values: Vec<f64>,
}

impl ExperimentRecord {
    /// Observable by column name; None if the campaign lacks it.
    pub fn value(&self, name: &str) -> Option<f64> {
        let pos = observable_columns(self.campaign).iter().position(|c| *c == name)?;
        self.values.get(pos).copied()
    }
}

/// Name of the sweep column, when the campaign has one.
pub fn param_column(campaign: CampaignKind) -> Option<&'static str> {
    match campaign {
        CampaignKind::Connection => Some("x"),
        CampaignKind::CrossingScaling => Some("lambda"),
        CampaignKind::Concentration => Some("epsilon"),
        CampaignKind::KacRiceMoments => None,
        CampaignKind::SbMoments | CampaignKind::LemmaSweep => Some("r"),
    }
}

/// Observable columns, in emission order.
pub fn observable_columns(campaign: CampaignKind) -> &'static [&'static str] {
    match campaign {
        CampaignKind::Connection => &[
            "epsilon",
            "connected",
            "d_chem",
            "euclid",
            "threshold",
            "exceeds",
            "ratio",
            "g1",
            "g2",
            "sup_diff",
            "struct_checked",
            "struct_ok",
            "aborted",
        ],
        CampaignKind::CrossingScaling => {
            &["epsilon", "crossing_f", "crossing_eps", "crossing_square", "aborted"]
        }
        CampaignKind::Concentration => &["s", "sup_diff", "exceeds_s", "aborted"],
        CampaignKind::KacRiceMoments => &["length", "aborted"],
        CampaignKind::SbMoments => {
            &["s_b", "level_length", "bound_rhs", "bound_ok", "aborted"]
        }
        CampaignKind::LemmaSweep => {
            &["component", "cells", "diameter", "boundary_len", "ratio", "holds"]
        }
    }
}

/// The CSV header line for a campaign.
pub fn header(campaign: CampaignKind) -> String {
    let mut cols: Vec<&str> = Vec::new();
    if let Some(p) = param_column(campaign) {
        cols.push(p);
    }
    cols.push("trial");
    cols.push("seed");
    cols.extend_from_slice(observable_columns(campaign));
    cols.join(",")
}

/// Orders records for emission: sweep value, then trial, preserving
/// the per-trial record order.
pub fn sort_records(records: &mut [ExperimentRecord]) {
    records.sort_by(|a, b| {
        a.param
            .total_cmp(&b.param)
            .then(a.trial.cmp(&b.trial))
    });
}

/// Renders header plus rows as CSV text.
pub fn render_csv(campaign: CampaignKind, records: &[ExperimentRecord]) -> Result<String> {
    let n_cols = observable_columns(campaign).len();
    let mut out = header(campaign);
    out.push('\n');
    for rec in records {
        if rec.campaign != campaign {
            return Err(Error::Config(format!(
                "record for campaign {} in a {} report",
                rec.campaign, campaign
            )));
        }
        if rec.values.len() != n_cols {
            return Err(Error::Config(format!(
                "record with {} observables where {} expects {n_cols}",
                rec.values.len(),
                campaign
            )));
        }
        let mut cols: Vec<String> = Vec::with_capacity(n_cols + 3);
        if param_column(campaign).is_some() {
            cols.push(rec.param.to_string());
        }
        cols.push(rec.trial.to_string());
        cols.push(rec.seed.to_string());
        cols.extend(rec.values.iter().map(|v| v.to_string()));
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Writes the report CSV plus a `.meta` sidecar holding the resolved
/// config. Records must already be sorted (see [`sort_records`]).
pub fn emit_report(
    config: &ExperimentConfig,
    records: &[ExperimentRecord],
    path: &Path,
) -> Result<()> {
    let body = render_csv(config.campaign, records)?;
    fs::write(path, body).map_err(|e| Error::io(path, e))?;
    let meta = sidecar_path(path);
    fs::write(&meta, config.render()).map_err(|e| Error::io(&meta, e))?;
    Ok(())
}

/// The sidecar file that accompanies a report.
pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta");
    path.with_file_name(name)
}

/// Reads a report back; the campaign is recognized from the header.
pub fn parse_report(path: &Path) -> Result<(CampaignKind, Vec<ExperimentRecord>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let head = lines
        .next()
        .ok_or_else(|| Error::format(path, "empty report"))?;
    let campaign = CampaignKind::ALL
        .into_iter()
        .find(|k| header(*k) == head)
        .ok_or_else(|| Error::format(path, format!("unrecognized header {head:?}")))?;
    let has_param = param_column(campaign).is_some();
    let n_cols = observable_columns(campaign).len() + 2 + has_param as usize;

    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != n_cols {
            return Err(Error::format(
                path,
                format!("line {} has {} columns, expected {n_cols}", lineno + 2, cells.len()),
            ));
        }
        let bad = |what: &str| Error::format(path, format!("line {}: bad {what}", lineno + 2));
        let mut it = cells.into_iter();
        let param = if has_param {
            it.next().unwrap().parse::<f64>().map_err(|_| bad("sweep value"))?
        } else {
            0.0
        };
        let trial = it.next().unwrap().parse::<u64>().map_err(|_| bad("trial"))?;
        let seed = it.next().unwrap().parse::<u64>().map_err(|_| bad("seed"))?;
        let values = it
            .map(|c| c.parse::<f64>().map_err(|_| bad("observable")))
            .collect::<Result<Vec<f64>>>()?;
        records.push(ExperimentRecord {
            campaign,
            param,
            trial,
            seed,
            values,
        });
    }
    Ok((campaign, records))
}
