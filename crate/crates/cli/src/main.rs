use std::process::ExitCode;

use dfs_shape::harness::write_curve;
use dfs_shape::{run_experiment, Error};
use dfs_shape_cli::{parse_cli, SEED_ENV};

const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_ALL_REJECTED: u8 = 4;

fn failure(err: &Error) -> ExitCode {
    eprintln!("dfs-shape: {err}");
    match err {
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => ExitCode::from(EXIT_IO),
        _ => ExitCode::from(EXIT_USAGE),
    }
}

fn main() -> ExitCode {
    let env_seed = std::env::var(SEED_ENV).ok();
    let invocation = match parse_cli(std::env::args_os(), env_seed.as_deref()) {
        Ok(inv) => inv,
        Err(e) if e.informational => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            if !e.message.ends_with('\n') {
                eprintln!();
            }
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let config = invocation.config;

    if invocation.curve_only {
        return match write_curve(config.c, config.curve_points, &config.out_dir) {
            Ok(path) => {
                println!("wrote {}", path.display());
                ExitCode::SUCCESS
            }
            Err(e) => failure(&e),
        };
    }

    let summaries = match run_experiment(&config) {
        Ok(s) => s,
        Err(e) => return failure(&e),
    };
    println!("seed\taccepted\tresamples\tsize\tmax_height\tsup_distance\tms");
    for s in &summaries {
        let sup = s.sup_distance.map_or_else(|| "-".to_string(), |d| format!("{d:.5}"));
        println!(
            "{}\t{}\t{}\t{:.5}\t{:.5}\t{sup}\t{}",
            s.seed, s.accepted, s.resamples_used, s.component_fraction, s.max_height_fraction, s.wall_time_ms
        );
    }
    println!("summary: {}", config.out_dir.join("summary.json").display());
    if !summaries.is_empty() && summaries.iter().all(|s| !s.accepted) {
        eprintln!("dfs-shape: every seed exhausted its resampling budget");
        return ExitCode::from(EXIT_ALL_REJECTED);
    }
    ExitCode::SUCCESS
}
