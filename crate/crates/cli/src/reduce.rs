use std::time::Instant;

use recombination::{validate_reduction, DiscreteMeasure, RecombinationSolution, Registry};
use serde::Serialize;

use crate::cli::ReduceArgs;
use crate::error::{CliError, CliResult};
use crate::input::read_table;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReduceOutput {
    pub method: String,
    pub n: usize,
    #[serde(rename = "N")]
    pub atoms: usize,
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
    pub tau: usize,
    pub resets: usize,
    pub fallback_used: bool,
    pub fallback_rounds: usize,
    pub wall_time_ms: Option<f64>,
    pub max_moment_error: f64,
}

pub fn load_measure(args: &ReduceArgs) -> CliResult<DiscreteMeasure> {
    let table = read_table(&args.input, args.header)?;
    let weight_col = args.weights.as_deref().map(|w| table.column_index(w)).transpose()?;
    let points = table.points_without(weight_col);
    if points.nrows() == 0 {
        return Err(CliError::Usage("no coordinate columns left besides the weights".into()));
    }
    let measure = match weight_col {
        Some(c) => DiscreteMeasure::normalized(points, table.column(c))?,
        None => DiscreteMeasure::uniform(points)?,
    };
    Ok(measure)
}

/// Runs the reducer, validates, and returns the JSON document. A result that
/// fails validation is returned alongside the error so it can still be shown.
pub fn run_reduce(args: &ReduceArgs) -> CliResult<(ReduceOutput, Option<CliError>)> {
    let measure = load_measure(args)?;
    let reducer = Registry::with_defaults(&args.algo_args.config()).get(&args.algo)?;
    let start = Instant::now();
    let sol: RecombinationSolution = reducer.reduce(&measure, args.seed)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let report = validate_reduction(&measure, &sol, args.tol)?;
    let out = ReduceOutput {
        method: sol.method.to_string(),
        n: measure.dim(),
        atoms: measure.len(),
        fallback_used: sol.fallback_used(),
        fallback_rounds: sol.stats.fallback_rounds,
        indices: sol.indices,
        weights: sol.weights,
        tau: sol.tau,
        resets: sol.resets,
        wall_time_ms: args.timing.then_some(elapsed),
        max_moment_error: report.max_moment_error,
    };
    let failure = (!report.passed).then_some(CliError::Invalid(report.max_moment_error));
    Ok((out, failure))
}
