use std::time::Instant;

use evosand::engine::{stabilize_observed, trace_line};
use evosand::{Configuration, EngineState, Limits, Schedule, StabilizationOutcome};
use serde_json::json;

use crate::error::{code, CliError};
use crate::manifest::RunManifest;
use crate::output::{self, Trace};
use crate::StabilizeArgs;

pub fn run(args: StabilizeArgs) -> Result<i32, CliError> {
    let start = Instant::now();
    let text = output::read_file(&args.schedule)?;
    let schedule = Schedule::from_json(&text).map_err(|e| CliError::input(&args.schedule, e))?;
    let config = Configuration::from_non_sink(&schedule, &args.config)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let limits = Limits {
        max_rounds: args.max_rounds.unwrap_or(Limits::PATTERNS.max_rounds),
        ..Limits::PATTERNS
    };
    let mut manifest = RunManifest::new(
        "stabilize",
        json!({
            "schedule": args.schedule,
            "config": args.config,
            "mode": args.mode.name(),
            "max_rounds": limits.max_rounds,
            "trace": args.trace,
            "out": args.out,
        }),
        None,
    );
    let mut trace = Trace::create(args.trace.clone())?;
    let outcome = stabilize_observed(EngineState::new(config), &schedule, args.mode.into(), limits, |e| {
        if trace.enabled() {
            trace.line(&trace_line(e.t, e.report.toppled, e.config));
        }
    });
    if let Some(p) = trace.finish()? {
        manifest.outputs.push(p);
    }
    let (report, exit) = match &outcome {
        StabilizationOutcome::Stabilized { state, rounds, topplings } => (
            json!({
                "outcome": "stabilized",
                "config": state.config.non_sink_values(),
                "t": state.t,
                "rounds": rounds,
                "topplings": topplings,
            }),
            code::OK,
        ),
        StabilizationOutcome::NonTerminating { cycle_start, cycle_length, topplings } => (
            json!({
                "outcome": "non_terminating",
                "cycle_start": cycle_start,
                "cycle_length": cycle_length,
                "topplings": topplings,
            }),
            code::NON_TERMINATING,
        ),
        StabilizationOutcome::LimitExceeded { state, topplings } => (
            json!({
                "outcome": "limit_exceeded",
                "config": state.config.non_sink_values(),
                "t": state.t,
                "topplings": topplings,
            }),
            code::LIMIT_EXCEEDED,
        ),
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    output::write_file(&args.out, text.as_bytes())?;
    say!("{}", text.trim_end());
    manifest.outputs.push(args.out.clone());
    manifest.total_topplings = Some(outcome.topplings());
    manifest.exit_code = exit;
    manifest.write(&args.out, start.elapsed())?;
    Ok(exit)
}
