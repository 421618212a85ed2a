use std::fs::File;
use std::time::Instant;

use evosand::stats::io::{read_sizes_csv, write_histogram_csv, IoError};
use evosand::stats::{
    bootstrap_gof, fit_power_law, loglikelihood_ratio, survival_histogram, Alternative, FitError,
    FitReport,
};
use serde_json::json;

use crate::error::{code, CliError};
use crate::manifest::RunManifest;
use crate::output;
use crate::FitArgs;

pub fn run(args: FitArgs) -> Result<i32, CliError> {
    let start = Instant::now();
    let file = File::open(&args.input).map_err(|e| CliError::input(&args.input, e))?;
    let sizes = read_sizes_csv(file).map_err(|e| match e {
        IoError::Empty => CliError::input(&args.input, "no records"),
        other => CliError::input(&args.input, other),
    })?;
    let alternatives: Vec<Alternative> = {
        let mut v: Vec<Alternative> = args.compare.iter().map(|&c| c.into()).collect();
        v.dedup();
        v
    };
    let mut manifest = RunManifest::new(
        "fit",
        json!({
            "input": args.input,
            "out": args.out,
            "compare": alternatives.iter().map(|a| a.name()).collect::<Vec<_>>(),
            "bootstrap": args.bootstrap,
            "seed": args.seed,
        }),
        Some(args.seed),
    );

    let fit = match fit_power_law(&sizes) {
        Ok(f) => f,
        Err(e @ (FitError::Degenerate(_) | FitError::TooFewSamples { .. })) => {
            eprintln!("evosand: {e}");
            manifest.exit_code = code::DEGENERATE;
            manifest.write(&args.out, start.elapsed())?;
            return Ok(code::DEGENERATE);
        }
        Err(e) => return Err(CliError::input(&args.input, e)),
    };
    if let Some(w) = &fit.warning {
        eprintln!("warning: {w}");
    }
    let mut lrt = Vec::new();
    for &alt in &alternatives {
        match loglikelihood_ratio(&sizes, &fit, alt) {
            Ok(r) => lrt.push(r),
            Err(e) => eprintln!("warning: no {alt} comparison: {e}"),
        }
    }
    let bootstrap_p = match args.bootstrap {
        Some(n) if n > 0 => Some(
            bootstrap_gof(&sizes, &fit, n, args.seed).map_err(|e| CliError::input(&args.input, e))?,
        ),
        _ => None,
    };
    let report = FitReport::new(&fit, lrt, bootstrap_p);
    let text = report.to_json().map_err(|e| CliError::output(&args.out, e))?;
    output::write_file(&args.out, text.as_bytes())?;
    manifest.outputs.push(args.out.clone());

    let hist_path = output::sibling(&args.out, "histogram.csv");
    let mut buf = Vec::new();
    write_histogram_csv(&survival_histogram(&sizes), &mut buf)
        .map_err(|e| CliError::output(&hist_path, e))?;
    output::write_file(&hist_path, &buf)?;
    manifest.outputs.push(hist_path);

    say!(
        "x_min={} alpha={:.4} ks={:.5} n_tail={}",
        report.x_min, report.alpha, report.ks, report.n_tail
    );
    for r in &report.lrt {
        say!("  vs {}: R={:.4} p={:.4}", r.alternative, r.r, r.p);
    }
    manifest.write(&args.out, start.elapsed())?;
    Ok(code::OK)
}
