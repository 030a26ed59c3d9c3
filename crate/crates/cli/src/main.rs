//! `excursion-lab`: sample Gaussian fields, query their excursion
//! sets, and drive Monte Carlo campaigns from config files.

use std::collections::HashSet;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use excursion_core::boundary_geom::{extract_contours, jordan_decompose, verify_diameter_bound};
use excursion_core::chem_dist::{
    chemical_distance, s_statistic, DiameterMode, DEFAULT_DIAMETER_CAP,
};
use excursion_core::excursion::{detect_crossing, excursion_mask, label_components, CrossDir};
use excursion_core::experiments::{
    emit_report, parse_report, record_key, run_campaign_skipping, sort_records, ExperimentConfig,
    JobKey,
};
use excursion_core::geom::{Point, Rect};
use excursion_core::global_structure::{build_geometry, detect_structure_events};
use excursion_core::grid::{read_field, write_field, GridSpec};
use excursion_core::kernel::KernelSpec;
use excursion_core::synth::{discretize, sample_field};

#[derive(Parser)]
#[command(name = "excursion-lab", version, about = "Excursion-set geometry toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a Gaussian field and dump it in the EXCF1 format.
    Sample {
        /// Filter to convolve with white noise; only `bargmann-fock`
        /// is available here.
        #[arg(long, default_value = "bargmann-fock")]
        kernel: String,
        #[arg(long)]
        pitch: f64,
        /// Sampled region as `X0,Y0,X1,Y1`.
        #[arg(long, allow_hyphen_values = true)]
        extent: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Test a rectangle crossing of the excursion set.
    Crossing {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        level: f64,
        /// Rectangle as `X0,Y0,X1,Y1`.
        #[arg(long, allow_hyphen_values = true)]
        rect: String,
        /// `lr` for left-right, `bt` for bottom-top.
        #[arg(long)]
        dir: String,
        /// Also print a CSV row with the query and the outcome.
        #[arg(long)]
        csv: bool,
    },
    /// Chemical distance between two points of the excursion set.
    Chemdist {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        level: f64,
        /// Start point as `X,Y`.
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        /// End point as `X,Y`.
        #[arg(long, allow_hyphen_values = true)]
        to: String,
    },
    /// Summed component diameters within a box.
    Sstat {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        level: f64,
        /// Box as `X0,Y0,X1,Y1`.
        #[arg(long = "box", allow_hyphen_values = true)]
        boxr: String,
        /// `exact` or `sweep` diameters.
        #[arg(long, default_value = "exact")]
        mode: String,
    },
    /// Boundary decomposition and diameter certificates per component.
    Boundary {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        level: f64,
        /// Box as `X0,Y0,X1,Y1`.
        #[arg(long = "box", allow_hyphen_values = true)]
        boxr: String,
    },
    /// Structure events of the thin-rectangle geometry.
    Gstruct {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, allow_negative_numbers = true)]
        level: f64,
        #[arg(long)]
        epsilon: f64,
    },
    /// Execute a campaign described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Worker count; defaults to one per core.
        #[arg(long)]
        threads: Option<usize>,
        /// Keep existing records in the output file and compute only
        /// the missing trials.
        #[arg(long)]
        resume: bool,
    },
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Sample {
            kernel,
            pitch,
            extent,
            seed,
            out,
        } => cmd_sample(&kernel, pitch, &extent, seed, &out),
        Cmd::Crossing {
            input,
            level,
            rect,
            dir,
            csv,
        } => cmd_crossing(&input, level, &rect, &dir, csv),
        Cmd::Chemdist {
            input,
            level,
            from,
            to,
        } => cmd_chemdist(&input, level, &from, &to),
        Cmd::Sstat {
            input,
            level,
            boxr,
            mode,
        } => cmd_sstat(&input, level, &boxr, &mode),
        Cmd::Boundary { input, level, boxr } => cmd_boundary(&input, level, &boxr),
        Cmd::Gstruct {
            input,
            x,
            delta,
            level,
            epsilon,
        } => cmd_gstruct(&input, x, delta, level, epsilon),
        Cmd::Run {
            config,
            threads,
            resume,
        } => cmd_run(&config, threads, resume),
    }
}

fn parse_rect(s: &str) -> Result<Rect> {
    let v = parse_floats(s, 4)?;
    Ok(Rect::new(v[0], v[1], v[2], v[3])?)
}

fn parse_point(s: &str) -> Result<Point> {
    let v = parse_floats(s, 2)?;
    Ok(Point::new(v[0], v[1]))
}

fn parse_floats(s: &str, n: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("cannot parse {s:?} as {n} comma-separated numbers"))?;
    if v.len() != n {
        bail!("expected {n} comma-separated numbers, got {s:?}");
    }
    Ok(v)
}

fn cmd_sample(kernel: &str, pitch: f64, extent: &str, seed: u64, out: &PathBuf) -> Result<()> {
    if kernel != "bargmann-fock" {
        bail!("unknown kernel {kernel:?}; only bargmann-fock is available");
    }
    let spec = KernelSpec::bargmann_fock();
    let grid = GridSpec::new(pitch, parse_rect(extent)?, spec.truncation_radius)?;
    let field = sample_field(&spec, &grid, seed)?;
    write_field(out, &field)?;
    println!("wrote {}x{} field to {}", grid.ny(), grid.nx(), out.display());
    Ok(())
}

fn cmd_crossing(input: &PathBuf, level: f64, rect: &str, dir: &str, csv: bool) -> Result<()> {
    let rect = parse_rect(rect)?;
    let dir_parsed = match dir {
        "lr" => CrossDir::LeftRight,
        "bt" => CrossDir::BottomTop,
        other => bail!("direction must be lr or bt, got {other:?}"),
    };
    let field = read_field(input)?;
    let labeling = label_components(&excursion_mask(&field, level)?);
    let hit = detect_crossing(&labeling, &rect, dir_parsed)?;
    println!("{hit}");
    if csv {
        println!(
            "x0,y0,x1,y1,dir,level,crossing\n{},{},{},{},{dir},{level},{}",
            rect.x0,
            rect.y0,
            rect.x1,
            rect.y1,
            hit as u8
        );
    }
    Ok(())
}

fn cmd_chemdist(input: &PathBuf, level: f64, from: &str, to: &str) -> Result<()> {
    let field = read_field(input)?;
    let labeling = label_components(&excursion_mask(&field, level)?);
    let path = chemical_distance(&labeling, parse_point(from)?, parse_point(to)?)?;
    let failure = match path.failure {
        None => "",
        Some(f) => match f {
            excursion_core::chem_dist::PathFailure::EndpointClosed => "endpoint-closed",
            excursion_core::chem_dist::PathFailure::NotConnected => "not-connected",
        },
    };
    println!("connected,length,failure");
    println!("{},{},{failure}", path.reachable as u8, path.length);
    Ok(())
}

fn cmd_sstat(input: &PathBuf, level: f64, boxr: &str, mode: &str) -> Result<()> {
    let mode = match mode {
        "exact" => DiameterMode::Exact,
        "sweep" => DiameterMode::DoubleSweep,
        other => bail!("mode must be exact or sweep, got {other:?}"),
    };
    let field = read_field(input)?;
    let labeling = label_components(&excursion_mask(&field, level)?);
    let stat = s_statistic(&labeling, &parse_rect(boxr)?, mode)?;
    println!("label,diameter");
    for report in &stat.reports {
        println!("{},{}", report.label, report.diameter);
    }
    println!("total,{}", stat.total);
    Ok(())
}

fn cmd_boundary(input: &PathBuf, level: f64, boxr: &str) -> Result<()> {
    let field = read_field(input)?;
    let set = extract_contours(&field, level, &parse_rect(boxr)?)?;
    println!("label,n_holes,boundary_length,diam_exact,ratio,holds");
    for label in 1..=set.labeling().n_components() as u32 {
        let boundary = match jordan_decompose(&set, label) {
            Ok(b) => b,
            Err(e) => {
                eprintln!("component {label}: {e}");
                continue;
            }
        };
        let check = match verify_diameter_bound(&set, label, 0.10, Some(DEFAULT_DIAMETER_CAP)) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("component {label}: {e}");
                continue;
            }
        };
        println!(
            "{label},{},{},{},{},{}",
            boundary.holes.len(),
            check.boundary_length,
            check.diameter,
            check.diameter / check.boundary_length,
            check.holds as u8
        );
    }
    Ok(())
}

fn cmd_gstruct(input: &PathBuf, x: f64, delta: f64, level: f64, epsilon: f64) -> Result<()> {
    let field = read_field(input)?;
    let field_eps = discretize(&field, epsilon)?;
    let geom = build_geometry(x, delta)?;
    let report = detect_structure_events(&field, &field_eps, &geom, level)?;
    let mut names = vec!["g1".to_string()];
    let mut row = vec![(report.g1 as u8).to_string()];
    for (name, hit) in &report.per_subevent {
        names.push(name.to_lowercase());
        row.push((*hit as u8).to_string());
    }
    names.push("g2".into());
    row.push((report.g2.unwrap_or(false) as u8).to_string());
    names.push("sup_diff".into());
    row.push(report.sup_diff.unwrap_or(f64::INFINITY).to_string());
    println!("{}", names.join(","));
    println!("{}", row.join(","));
    Ok(())
}

fn cmd_run(config: &PathBuf, threads: Option<usize>, resume: bool) -> Result<()> {
    let text = fs::read_to_string(config)
        .with_context(|| format!("cannot read config {}", config.display()))?;
    let cfg = ExperimentConfig::parse(&text)?;
    let out = cfg.resolved_output();

    let mut records = Vec::new();
    if resume && out.exists() {
        let (kind, existing) = parse_report(&out)?;
        if kind != cfg.campaign {
            bail!(
                "cannot resume: {} holds a {kind} report, config wants {}",
                out.display(),
                cfg.campaign
            );
        }
        records = existing;
    }
    let done: HashSet<JobKey> = records.iter().map(record_key).collect();
    let skipped = records.len();

    let fresh = match threads {
        None => run_campaign_skipping(&cfg, &done)?,
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("cannot build worker pool")?
            .install(|| run_campaign_skipping(&cfg, &done))?,
    };
    records.extend(fresh);
    sort_records(&mut records);
    emit_report(&cfg, &records, &out)?;
    println!(
        "wrote {} records to {} ({} kept from a previous run)",
        records.len(),
        out.display(),
        skipped
    );
    Ok(())
}
