use std::path::{Path, PathBuf};
use std::time::Instant;

use evosand::lattice::{
    self, encode_pgm, encode_png, run_lattice, write_grid_csv, DenseGrid, LatticeSchedule,
    LatticeState, Palette, PatternOutcome, Raster,
};
use evosand::{Limits, TerminationMode};
use serde_json::json;

use crate::error::{code, CliError};
use crate::manifest::RunManifest;
use crate::output::{self, Trace};
use crate::{Format, PatternArgs};

const PROGRESS_EVERY: u64 = 10_000_000;

/// A built-in name, or a path to a JSON rule list.
pub fn load_lattice_schedule(spec: &str) -> Result<LatticeSchedule, CliError> {
    if LatticeSchedule::BUILT_IN.contains(&spec) {
        return Ok(LatticeSchedule::by_name(spec).expect("built-in"));
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(CliError::usage(format!(
            "unknown schedule `{spec}`: expected one of {} or a JSON file",
            LatticeSchedule::BUILT_IN.join(", ")
        )));
    }
    let text = output::read_file(path)?;
    LatticeSchedule::from_json(&text).map_err(|e| CliError::input(path, e))
}

fn formats_for(args: &PatternArgs) -> Vec<Format> {
    if !args.format.is_empty() {
        let mut seen = Vec::new();
        for f in &args.format {
            if !seen.contains(f) {
                seen.push(*f);
            }
        }
        return seen;
    }
    let by_ext = match args.out.extension().and_then(|e| e.to_str()) {
        Some("png") => Format::Png,
        Some("csv") => Format::Csv,
        _ => Format::Pgm,
    };
    vec![by_ext]
}

fn write_outputs(grid: &DenseGrid, out: &Path, formats: &[Format]) -> Result<Vec<PathBuf>, CliError> {
    let palette = Palette::default();
    let raster = Raster::crop(grid, 0);
    let mut written = Vec::new();
    for (k, &f) in formats.iter().enumerate() {
        let path = if k == 0 { out.to_path_buf() } else { output::sibling(out, f.extension()) };
        let bytes = match f {
            Format::Pgm => encode_pgm(&raster, &palette),
            Format::Png => encode_png(&raster, &palette),
            Format::Csv => {
                let mut buf = Vec::new();
                write_grid_csv(grid, &mut buf).map(|_| buf)
            }
        }
        .map_err(|e| CliError::output(&path, e))?;
        output::write_file(&path, &bytes)?;
        written.push(path);
    }
    Ok(written)
}

pub fn run(args: PatternArgs) -> Result<i32, CliError> {
    let start = Instant::now();
    let schedule = load_lattice_schedule(&args.schedule)?;
    let formats = formats_for(&args);
    let mode: TerminationMode = args.mode.into();
    let limits = Limits { max_rounds: args.max_rounds.unwrap_or(Limits::PATTERNS.max_rounds), ..Limits::PATTERNS };
    // the order-free solver applies only to the one-rule square grid
    let direct = schedule.rules() == [lattice::LatticeRule::Grid4]
        && args.trace.is_none()
        && args.max_rounds.is_none();

    let mut manifest = RunManifest::new(
        "pattern",
        json!({
            "schedule": args.schedule,
            "rules": schedule.rules().iter().map(|r| r.name()).collect::<Vec<_>>(),
            "grains": args.grains,
            "out": args.out,
            "format": formats.iter().map(|f| f.extension()).collect::<Vec<_>>(),
            "mode": args.mode.name(),
            "max_rounds": limits.max_rounds,
            "trace": args.trace,
            "solver": if direct { "direct" } else { "rounds" },
        }),
        None,
    );

    let outcome = if direct {
        eprintln!("solving {} grains on the static grid directly", args.grains);
        lattice::run_central_pile(&schedule, args.grains, limits)
    } else {
        let mut trace = Trace::create(args.trace.clone())?;
        let mut next_report = PROGRESS_EVERY;
        let outcome = run_lattice(LatticeState::central(args.grains), &schedule, mode, limits, |r| {
            if r.topplings_so_far >= next_report {
                eprintln!("t={} topplings={}", r.t, r.topplings_so_far);
                next_report = (r.topplings_so_far / PROGRESS_EVERY + 1) * PROGRESS_EVERY;
            }
            if trace.enabled() {
                trace.line(&lattice::trace_line(r));
            }
        });
        if let Some(p) = trace.finish()? {
            manifest.outputs.push(p);
        }
        outcome
    };

    manifest.total_topplings = Some(outcome.topplings());
    let exit = match &outcome {
        PatternOutcome::Stabilized(res) => {
            manifest.outputs.extend(write_outputs(&res.grid, &args.out, &formats)?);
            let (w, h) = res.grid.nonzero_bounds().map_or((1, 1), |(a, b, c, d)| (b - a + 1, d - c + 1));
            let rounds = res.rounds.map_or("n/a".to_string(), |r| r.to_string());
            say!(
                "stabilized: grains={} topplings={} rounds={} size={}x{} max={}",
                args.grains, res.topplings, rounds, w, h, res.max_value
            );
            code::OK
        }
        PatternOutcome::LimitExceeded { grid, t, topplings } => {
            manifest.outputs.extend(write_outputs(grid, &args.out, &formats)?);
            eprintln!("round limit reached at t={t} after {topplings} topplings");
            code::LIMIT_EXCEEDED
        }
        PatternOutcome::NonTerminating { cycle_start, cycle_length, .. } => {
            eprintln!("never stabilizes: the state at t={cycle_start} recurs every {cycle_length} rounds");
            code::NON_TERMINATING
        }
    };
    manifest.exit_code = exit;
    manifest.write(&args.out, start.elapsed())?;
    Ok(exit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Mode;

    fn args(out: &str, format: Vec<Format>) -> PatternArgs {
        PatternArgs {
            schedule: "static".into(),
            grains: 1,
            out: out.into(),
            format,
            mode: Mode::FullPeriodQuiet,
            max_rounds: None,
            trace: None,
        }
    }

    #[test]
    fn format_follows_the_extension() {
        assert_eq!(formats_for(&args("a.png", vec![])), vec![Format::Png]);
        assert_eq!(formats_for(&args("a.csv", vec![])), vec![Format::Csv]);
        assert_eq!(formats_for(&args("a.out", vec![])), vec![Format::Pgm]);
        let both = formats_for(&args("a.png", vec![Format::Csv, Format::Pgm, Format::Csv]));
        assert_eq!(both, vec![Format::Csv, Format::Pgm]);
    }

    #[test]
    fn schedules_by_name_or_file() {
        assert_eq!(load_lattice_schedule("model-g").unwrap(), LatticeSchedule::model_g());
        assert_eq!(load_lattice_schedule("no-such-thing").unwrap_err().code, code::USAGE);
        let dir = tempfile::TempDir::new().unwrap();
        let file = dir.path().join("s.json");
        std::fs::write(&file, LatticeSchedule::model_d().to_json()).unwrap();
        assert_eq!(load_lattice_schedule(file.to_str().unwrap()).unwrap(), LatticeSchedule::model_d());
        std::fs::write(&file, "{ not json").unwrap();
        assert_eq!(load_lattice_schedule(file.to_str().unwrap()).unwrap_err().code, code::NO_INPUT);
    }
}
