use std::path::Path;
use std::time::Instant;

use evosand::engine::trace_line;
use evosand::lattice::finite::finite_lattice;
use evosand::stats::io::write_avalanche_csv;
use evosand::stats::{run_on_schedule_observed, DynamicsError};
use evosand::{Limits, Schedule};
use serde_json::json;

use crate::error::{code, CliError};
use crate::manifest::RunManifest;
use crate::output::{self, Trace};
use crate::pattern::load_lattice_schedule;
use crate::AvalancheArgs;

/// Lattice schedules (names or rule lists) become a finite lattice with a
/// sink; an explicit graph schedule is used as is.
fn load_schedule(args: &AvalancheArgs) -> Result<(Schedule, serde_json::Value), CliError> {
    let path = Path::new(&args.schedule);
    if path.exists() {
        let text = output::read_file(path)?;
        let doc: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| CliError::input(path, e))?;
        if doc.get("stages").is_some() {
            let s = Schedule::from_json(&text).map_err(|e| CliError::input(path, e))?;
            if s.sink().is_none() {
                return Err(CliError::input(path, "the schedule needs a sink"));
            }
            return Ok((s, json!({ "graph": args.schedule })));
        }
    }
    if args.width < 2 || args.height < 2 {
        return Err(CliError::usage("width and height must be at least 2"));
    }
    let lattice = load_lattice_schedule(&args.schedule)?;
    let rules: Vec<_> = lattice.rules().iter().map(|r| r.name()).collect();
    Ok((finite_lattice(args.width, args.height, &lattice), json!({ "rules": rules })))
}

pub fn run(args: AvalancheArgs) -> Result<i32, CliError> {
    let start = Instant::now();
    let (schedule, shape) = load_schedule(&args)?;
    let limits = Limits {
        max_rounds: args.max_rounds.unwrap_or(Limits::AVALANCHE.max_rounds),
        ..Limits::AVALANCHE
    };
    let mut manifest = RunManifest::new(
        "avalanche",
        json!({
            "schedule": args.schedule,
            "lattice": shape,
            "width": args.width,
            "height": args.height,
            "iterations": args.iterations,
            "seed": args.seed,
            "out": args.out,
            "mode": args.mode.name(),
            "max_rounds": limits.max_rounds,
            "trace": args.trace,
        }),
        Some(args.seed),
    );

    let mut trace = Trace::create(args.trace.clone())?;
    let result = run_on_schedule_observed(
        &schedule,
        args.iterations as usize,
        args.seed,
        args.mode.into(),
        limits,
        |i, e| {
            if trace.enabled() {
                trace.line(&format!("avalanche={i} {}", trace_line(e.t, e.report.toppled, e.config)));
            }
        },
    );
    if let Some(p) = trace.finish()? {
        manifest.outputs.push(p);
    }

    let exit = match result {
        Ok(records) => {
            let mut buf = Vec::new();
            write_avalanche_csv(&records, &mut buf).map_err(|e| CliError::output(&args.out, e))?;
            output::write_file(&args.out, &buf)?;
            manifest.outputs.push(args.out.clone());
            let total: u64 = records.iter().map(|r| r.size).sum();
            manifest.total_topplings = Some(total);
            let largest = records.iter().map(|r| r.size).max().unwrap_or(0);
            say!("avalanches={} topplings={} largest={}", records.len(), total, largest);
            code::OK
        }
        Err(e) => {
            eprintln!("evosand: {e}");
            match e {
                DynamicsError::LimitExceeded { .. } => code::LIMIT_EXCEEDED,
                DynamicsError::NonTerminating { .. } => code::NON_TERMINATING,
                _ => return Err(CliError::usage(e.to_string())),
            }
        }
    };
    manifest.exit_code = exit;
    manifest.write(&args.out, start.elapsed())?;
    Ok(exit)
}
