use std::io::Write;
use std::time::Instant;

use recombination::synth::{exp_mixture_signs, Generator};
use recombination::{derive_seed, validate_reduction, Reducer, Registry};
use serde::Serialize;

use crate::cli::BenchArgs;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub algo: String,
    #[serde(rename = "N")]
    pub atoms: usize,
    pub n: usize,
    pub seed: u64,
    pub tau: Option<usize>,
    pub resets: Option<usize>,
    pub wall_time_ms: Option<f64>,
    pub valid: bool,
}

/// Seed of instance `rep` at size `len`; shared by every reducer so runs are paired.
pub fn instance_seed(master: u64, len: usize, rep: usize) -> u64 {
    derive_seed(master, &[len as u64, rep as u64])
}

pub fn bench_rows(args: &BenchArgs) -> CliResult<Vec<BenchRow>> {
    let registry = Registry::with_defaults(&args.algo_args.config());
    let reducers = args
        .algos
        .iter()
        .map(|name| registry.get(name.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for &len in &args.sizes {
        if len == 0 {
            return Err(CliError::Usage("sample sizes must be positive".into()));
        }
        for rep in 0..args.reps {
            let seed = instance_seed(args.seed, len, rep);
            let measure = args.gen.sample(len, seed, args.seed)?;
            for reducer in &reducers {
                rows.push(run_one(reducer.as_ref(), &measure, seed, args));
            }
        }
    }
    Ok(rows)
}

fn run_one(reducer: &dyn Reducer, measure: &recombination::DiscreteMeasure, seed: u64, args: &BenchArgs) -> BenchRow {
    let start = Instant::now();
    let result = reducer.reduce(measure, seed);
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let mut row = BenchRow {
        algo: reducer.name().to_string(),
        atoms: measure.len(),
        n: measure.dim(),
        seed,
        tau: None,
        resets: None,
        wall_time_ms: args.timing.then_some(elapsed),
        valid: false,
    };
    if let Ok(sol) = result {
        row.valid = validate_reduction(measure, &sol, args.tol).is_ok_and(|r| r.passed);
        row.tau = Some(sol.tau);
        row.resets = Some(sol.resets);
    }
    row
}

/// `#` metadata lines, then the CSV header and one row per run.
pub fn write_bench(args: &BenchArgs, rows: &[BenchRow], out: &mut dyn Write) -> CliResult<()> {
    let io = |source| CliError::Io { path: "<output>".into(), source };
    let dim = args.gen.dim();
    writeln!(out, "# generator={} n={dim} master_seed={} reps={}", args.gen, args.seed, args.reps).map_err(io)?;
    let resolved = args.algo_args.config().resolve(dim);
    writeln!(out, "# config={}", serde_json::to_string(&resolved).expect("config serializes")).map_err(io)?;
    if args.gen == Generator::ExpMix20 {
        let signs: String = exp_mixture_signs(dim, args.seed).iter().map(|&s| if s > 0.0 { '+' } else { '-' }).collect();
        writeln!(out, "# expmix20: coordinate k is sign_k * Exp(1), signs={signs}").map_err(io)?;
    }
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    writer.flush().map_err(io)?;
    Ok(())
}
