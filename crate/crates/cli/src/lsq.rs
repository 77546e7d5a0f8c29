use nalgebra::DMatrix;
use recombination::lsq::{build_coreset, residual, solve_reduced};
use recombination::{synth, Registry};
use serde::Serialize;

use crate::cli::LsqArgs;
use crate::error::{CliError, CliResult};
use crate::input::read_table;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LsqOutput {
    pub coreset_indices: Vec<usize>,
    pub scales: Vec<f64>,
    pub solution: Vec<f64>,
    pub residual_full: f64,
    pub residual_coreset: f64,
}

/// `N=.., d=.., seed=..` pairs; `seed` falls back to `default_seed`.
pub fn parse_synth(pairs: &[String], default_seed: u64) -> CliResult<(usize, usize, u64)> {
    let (mut len, mut d, mut seed) = (None, None, default_seed);
    for pair in pairs {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected KEY=VALUE in --synth, got `{pair}`")))?;
        let bad = || CliError::Usage(format!("bad value in --synth `{pair}`"));
        match key {
            "N" => len = Some(value.parse().map_err(|_| bad())?),
            "d" => d = Some(value.parse().map_err(|_| bad())?),
            "seed" => seed = value.parse().map_err(|_| bad())?,
            _ => return Err(CliError::Usage(format!("unknown --synth key `{key}` (expected N, d, seed)"))),
        }
    }
    match (len, d) {
        (Some(len), Some(d)) if d > 0 => Ok((len, d, seed)),
        _ => Err(CliError::Usage("--synth needs N=<rows> and d=<features> (d >= 1)".into())),
    }
}

fn load_data(args: &LsqArgs) -> CliResult<(DMatrix<f64>, Vec<f64>)> {
    if let Some(pairs) = &args.synth {
        let (len, d, seed) = parse_synth(pairs, args.seed)?;
        let (x, y, _) = synth::regression(len, d, seed);
        return Ok((x, y));
    }
    let path = args.input.as_ref().ok_or_else(|| CliError::Usage("no input file".into()))?;
    let table = read_table(path, args.header)?;
    if table.width() < 2 {
        return Err(CliError::Usage("need at least one feature column and a response column".into()));
    }
    let y_col = match &args.y_col {
        Some(spec) => table.column_index(spec)?,
        None => table.width() - 1,
    };
    Ok((table.points_without(Some(y_col)).transpose(), table.column(y_col)))
}

pub fn run_lsq(args: &LsqArgs) -> CliResult<LsqOutput> {
    let (mut x, y) = load_data(args)?;
    if args.intercept {
        x = x.insert_column(0, 1.0);
    }
    let reducer = Registry::with_defaults(&args.algo_args.config()).get(&args.algo)?;
    let coreset = build_coreset(&x, &y, reducer.as_ref(), args.seed)?;
    let solution = solve_reduced(&x, &y, &coreset)?;
    let (xs, ys) = coreset.scaled_rows(&x, &y);
    Ok(LsqOutput {
        residual_full: residual(&x, &y, &solution),
        residual_coreset: residual(&xs, ys.as_slice(), &solution),
        solution: solution.iter().copied().collect(),
        coreset_indices: coreset.row_indices,
        scales: coreset.row_scales,
    })
}
