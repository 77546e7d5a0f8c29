//! End-to-end acceptance suite. Runs every check at its tolerance,
//! prints one PASS/FAIL line each and exits non-zero if any failed.
//!
//! `cargo test -p recombination-cli --test acceptance`

use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use recombination::lsq::{build_coreset, normal_matrix, solve_least_squares, solve_reduced};
use recombination::measure::CenteredCloud;
use recombination::oracle::{contains_zero, support_weights};
use recombination::recombine::{reduce_basic, reduce_greedy, reduce_with_resets, InnerReducer, ResetSchedule};
use recombination::seed::rng_from_seed;
use recombination::synth::{self, Generator};
use recombination::{
    center, derive_seed, normalize_sphere, reduce_hybrid, validate_reduction, ConeBasis, DiscreteMeasure, Error,
    RecombinationSolution, ReducerConfig, Registry, BUILTIN_REDUCERS,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn registry() -> Registry {
    Registry::with_defaults(&ReducerConfig::default())
}

/// Runs `job(i)` for `i in 0..count` on every available core.
fn parallel<F>(count: usize, job: F)
where
    F: Fn(usize) + Sync,
{
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(count.max(1));
    let next = AtomicUsize::new(0);
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                job(i);
            });
        }
    });
}

fn gaussian_points(rng: &mut recombination::seed::Rng, dim: usize, len: usize, shift: f64) -> DMatrix<f64> {
    let mut pts = synth::gaussian(dim, len, rng.gen()).unwrap().points().clone();
    pts.add_scalar_mut(shift);
    pts
}

fn bordered_solve(points: &DMatrix<f64>, indices: &[usize]) -> Option<Vec<f64>> {
    let dim = points.nrows();
    let mut m = DMatrix::zeros(dim + 1, indices.len());
    for (c, &i) in indices.iter().enumerate() {
        m.column_mut(c).rows_mut(0, dim).copy_from(&points.column(i));
        m[(dim, c)] = 1.0;
    }
    let mut rhs = DVector::zeros(dim + 1);
    rhs[dim] = 1.0;
    m.lu().solve(&rhs).map(|w| w.iter().copied().collect())
}

fn exactness(len: usize, dim: usize) -> Outcome {
    const INSTANCES: usize = 100;
    let reg = registry();
    let failures = Mutex::new(Vec::new());
    let worst_mass = Mutex::new(0.0f64);
    let start = Instant::now();
    parallel(INSTANCES, |i| {
        let seed = derive_seed(1, &[len as u64, dim as u64, i as u64]);
        let measure = synth::gaussian(dim, len, seed).unwrap();
        for name in BUILTIN_REDUCERS {
            let result = reg.get(name).unwrap().reduce(&measure, seed);
            let problem = match &result {
                Err(e) => Some(format!("{name}#{i}: {e}")),
                Ok(sol) => {
                    let report = validate_reduction(&measure, sol, 1e-8).unwrap();
                    let simplex = sol.weights.iter().all(|&w| w >= 0.0)
                        && (sol.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-8;
                    (!report.passed || !simplex || sol.support() > dim + 1)
                        .then(|| format!("{name}#{i}: error {:e}", report.max_moment_error))
                }
            };
            if let Some(p) = problem {
                failures.lock().unwrap().push(p);
            }
            if let (Ok(sol), "dnc" | "hybrid") = (&result, name) {
                let dev = sol.stats.round_mass.iter().fold(0.0f64, |m, r| m.max((r - 1.0).abs()));
                let mut worst = worst_mass.lock().unwrap();
                *worst = worst.max(if sol.stats.round_mass.is_empty() && len > dim + 1 { f64::INFINITY } else { dev });
            }
        }
    });
    let elapsed = start.elapsed();
    let failures = failures.into_inner().unwrap();
    MASS.lock().unwrap().push(worst_mass.into_inner().unwrap());
    let in_time = elapsed < Duration::from_secs(60);
    outcome(
        failures.is_empty() && in_time,
        format!(
            "N={len} n={dim}: {} failures over {INSTANCES}x{} runs, {:.1}s{}",
            failures.len(),
            BUILTIN_REDUCERS.len(),
            elapsed.as_secs_f64(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
        ),
    )
}

static MASS: Mutex<Vec<f64>> = Mutex::new(Vec::new());

fn oracle_equivalence() -> Outcome {
    let reg = registry();
    let (mut disagreements, mut feasible_count) = (Vec::new(), 0);
    for i in 0..500u64 {
        let mut rng = rng_from_seed(derive_seed(2, &[i]));
        let dim = rng.gen_range(1..=3);
        let len = rng.gen_range(dim + 1..=10);
        let shift = rng.gen_range(0.0..2.0);
        let pts = gaussian_points(&mut rng, dim, len, shift);
        let feasible = contains_zero(&pts).unwrap();
        feasible_count += usize::from(feasible);
        let (cloud, zeros) = normalize_sphere(&CenteredCloud::from_points(pts.clone()));
        if !zeros.is_empty() {
            continue;
        }
        let runs = [
            ("basic", reduce_basic(&cloud, i, 50 * dim)),
            ("greedy", reduce_greedy(&cloud, i, 50 * dim)),
            ("greedy-reset", reduce_with_resets(&cloud, i, ResetSchedule::for_dimension(dim), InnerReducer::Greedy)),
        ];
        for (name, run) in runs {
            let agrees = match (&run, feasible) {
                (Ok(sol), true) => support_weights(&pts, &sol.indices).is_some(),
                (Err(_), true) => false,
                (Ok(_), false) => false,
                (Err(e), false) => e.is_escalation(),
            };
            if !agrees {
                disagreements.push(format!("{name}#{i}"));
            }
        }
        // the uniform measure on the same atoms is always feasible after centering
        let measure = DiscreteMeasure::uniform(pts).unwrap();
        let centered = center(&measure);
        for name in BUILTIN_REDUCERS {
            let ok = reg.get(name).unwrap().reduce(&measure, i).is_ok_and(|sol| {
                validate_reduction(&measure, &sol, 1e-9).unwrap().passed
                    && support_weights(centered.points(), &sol.indices).is_some()
            });
            if !ok {
                disagreements.push(format!("{name}/measure#{i}"));
            }
        }
    }
    outcome(
        disagreements.is_empty(),
        format!("{} disagreements over 500 instances ({feasible_count} feasible) {:?}", disagreements.len(), disagreements.iter().take(5).collect::<Vec<_>>()),
    )
}

fn cone_characterization() -> Outcome {
    let (mut checked, mut disagreements, mut hits, mut skipped) = (0, 0, 0, 0);
    let mut i = 0u64;
    while checked < 1000 {
        i += 1;
        let mut rng = rng_from_seed(derive_seed(3, &[i]));
        let dim = rng.gen_range(1..=3);
        let shift = rng.gen_range(-0.5..0.5);
        let pts = gaussian_points(&mut rng, dim, dim + 1, shift);
        let cloud = CenteredCloud::from_points(pts.clone());
        let Ok(basis) = ConeBasis::build(&cloud, &(0..dim).collect::<Vec<_>>()) else {
            skipped += 1;
            continue;
        };
        // coordinates within 1e-9 of zero sit on the cone boundary, where the
        // two tests use different tolerances
        if basis.projections().column(dim).iter().any(|c| c.abs() <= 1e-9) {
            skipped += 1;
            continue;
        }
        let member = !basis.negative_cone_hits([dim]).is_empty();
        let all: Vec<usize> = (0..=dim).collect();
        disagreements += usize::from(member != support_weights(&pts, &all).is_some());
        hits += usize::from(member);
        checked += 1;
    }
    outcome(disagreements == 0, format!("{disagreements} disagreements over {checked} pairs ({hits} in the cone, {skipped} boundary/singular skipped)"))
}

fn weight_formula() -> Outcome {
    let mut worst = 0.0f64;
    let mut checked = 0;
    let mut i = 0u64;
    while checked < 1000 {
        i += 1;
        let mut rng = rng_from_seed(derive_seed(4, &[i]));
        let dim = rng.gen_range(1..=6);
        let mut pts = gaussian_points(&mut rng, dim, dim + 1, 0.0);
        let coeffs: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.05..2.0)).collect();
        let star = -(0..dim).fold(DVector::zeros(dim), |acc, k| acc + pts.column(k) * coeffs[k]);
        pts.set_column(dim, &star);
        let cloud = CenteredCloud::from_points(pts.clone());
        let Ok(basis) = ConeBasis::build(&cloud, &(0..dim).collect::<Vec<_>>()) else { continue };
        let (Ok(w), Some(direct)) = (basis.solve_weights(dim), bordered_solve(&pts, &(0..=dim).collect::<Vec<_>>())) else {
            continue;
        };
        worst = w.iter().zip(&direct).fold(worst, |m, (a, b)| m.max((a - b).abs()));
        checked += 1;
    }
    let tri = CenteredCloud::from_points(DMatrix::from_column_slice(2, 3, &[1.0, 0.0, 0.0, 1.0, -1.0, -1.0]));
    let w = ConeBasis::build(&tri, &[0, 1]).unwrap().solve_weights(2).unwrap();
    let tri_err = w.iter().fold(0.0f64, |m, x| m.max((x - 1.0 / 3.0).abs()));
    outcome(worst <= 1e-9 && tri_err <= 1e-12, format!("max deviation {worst:.2e} over {checked} instances, triangle error {tri_err:.2e}"))
}

fn rank_one_updates() -> Outcome {
    let (mut drift, mut rebuilt, mut table) = (0.0f64, 0.0f64, 0.0f64);
    let mut instances = 0;
    for i in 0..200u64 {
        let mut rng = rng_from_seed(derive_seed(5, &[i]));
        let dim = rng.gen_range(2..=10);
        let len = 4 * dim;
        let (cloud, _) = normalize_sphere(&CenteredCloud::from_points(gaussian_points(&mut rng, dim, len, 0.0)));
        let Ok(mut b) = ConeBasis::build(&cloud, &(0..dim).collect::<Vec<_>>()) else { continue };
        b.set_rebuild_interval(None);
        let mut swaps = 0;
        while swaps < 5 * dim {
            let slot = rng.gen_range(0..dim);
            let new = rng.gen_range(0..len);
            // a swap with a tiny pivot is refused (or would be) as degenerate
            if b.contains(new) || b.projections()[(slot, new)].abs() < 1e-3 {
                continue;
            }
            b.swap(slot, new, &cloud).unwrap();
            swaps += 1;
        }
        let basis = cloud.points().select_columns(b.indices());
        let eye = DMatrix::<f64>::identity(dim, dim);
        drift = drift.max((b.inverse() * &basis - &eye).amax());
        table = table.max((b.projections() - b.inverse() * cloud.points()).amax());
        b.rebuild(&cloud).unwrap();
        rebuilt = rebuilt.max((b.inverse() * &basis - &eye).amax());
        table = table.max((b.projections() - b.inverse() * cloud.points()).amax());
        instances += 1;
    }
    outcome(
        drift <= 1e-6 && rebuilt <= 1e-12 && table <= 1e-6,
        format!("{instances} bases: drift {drift:.2e} after 5n swaps, {rebuilt:.2e} after rebuild, table {table:.2e}"),
    )
}

fn luby_schedule() -> Outcome {
    let got: Vec<usize> = ResetSchedule::new(1).take(16).collect();
    let want = vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8, 1];
    outcome(got == want, format!("{got:?}"))
}

fn wendel() -> Outcome {
    let mut detail = Vec::new();
    let mut passed = true;
    for (dim, expected) in [(2usize, 0.25), (3, 0.125)] {
        let mut rng = rng_from_seed(derive_seed(7, &[dim as u64]));
        let trials = 10_000;
        let inside = (0..trials)
            .filter(|_| contains_zero(&synth::sphere_points(dim, dim + 1, &mut rng)).unwrap())
            .count();
        let p = inside as f64 / trials as f64;
        passed &= (p - expected).abs() <= 0.02;
        detail.push(format!("n={dim}: {p:.4} (expected {expected})"));
    }
    outcome(passed, detail.join(", "))
}

fn planar_greedy() -> Outcome {
    let (mut worst, mut exceptions) = (0, 0);
    for i in 0..1000u64 {
        let mut rng = rng_from_seed(derive_seed(8, &[i]));
        let len = rng.gen_range(3..200);
        let shift = rng.gen_range(-1.0..1.0);
        let measure = DiscreteMeasure::uniform(gaussian_points(&mut rng, 2, len, shift)).unwrap();
        let (cloud, _) = normalize_sphere(&center(&measure));
        match reduce_greedy(&cloud, i, 100) {
            Ok(sol) => {
                worst = worst.max(sol.tau);
                exceptions += usize::from(sol.tau > 2);
            }
            Err(_) => exceptions += 1,
        }
    }
    outcome(exceptions == 0, format!("{exceptions} exceptions over 1000 instances, max tau {worst}"))
}

fn median(v: &mut [usize]) -> f64 {
    v.sort_unstable();
    let m = v.len() / 2;
    if v.len() % 2 == 0 {
        (v[m - 1] + v[m]) as f64 / 2.0
    } else {
        v[m] as f64
    }
}

fn greedy_dominance() -> Outcome {
    let reg = registry();
    let taus = Mutex::new((Vec::new(), Vec::new()));
    let failures = AtomicUsize::new(0);
    parallel(70, |i| {
        let seed = derive_seed(9, &[i as u64]);
        let measure = Generator::Gauss15.sample(10_000, seed, 9).unwrap();
        let greedy = reg.get("greedy").unwrap().reduce(&measure, seed);
        let basic = reg.get("basic").unwrap().reduce(&measure, seed);
        match (greedy, basic) {
            (Ok(g), Ok(b)) => {
                let mut t = taus.lock().unwrap();
                t.0.push(g.tau);
                t.1.push(b.tau);
            }
            _ => {
                failures.fetch_add(1, Ordering::Relaxed);
            }
        }
    });
    let (mut g, mut b) = taus.into_inner().unwrap();
    let failures = failures.into_inner();
    let mean = |v: &[usize]| v.iter().sum::<usize>() as f64 / v.len().max(1) as f64;
    let (mean_g, mean_b) = (mean(&g), mean(&b));
    let (med_g, med_b) = (median(&mut g), median(&mut b));
    outcome(
        failures == 0 && med_g <= med_b && mean_g <= 0.5 * mean_b,
        format!("median {med_g} vs {med_b}, mean {mean_g:.2} vs {mean_b:.2} (greedy vs basic), {failures} failed runs"),
    )
}

fn lsq_identity() -> Outcome {
    let start = Instant::now();
    let (x, y, _) = synth::regression(100_000, 2, 10);
    let reducer = registry().get("hybrid").unwrap();
    let coreset = match build_coreset(&x, &y, reducer.as_ref(), 10) {
        Ok(c) => c,
        Err(e) => return outcome(false, format!("coreset failed: {e}")),
    };
    let (xs, ys) = coreset.scaled_rows(&x, &y);
    let full = normal_matrix(&x, &y);
    let reduced = normal_matrix(&xs, ys.as_slice());
    let gram_err = (&reduced - &full).norm() / full.norm();
    let theta_full = solve_least_squares(&x, &DVector::from_column_slice(&y)).unwrap();
    let theta_core = solve_reduced(&x, &y, &coreset).unwrap();
    let theta_err = (&theta_core - &theta_full).norm() / theta_full.norm();
    let elapsed = start.elapsed();
    outcome(
        coreset.len() <= 7 && gram_err <= 1e-8 && theta_err <= 1e-6 && elapsed < Duration::from_secs(30),
        format!(
            "{} rows, normal equations {gram_err:.2e}, argmin {theta_err:.2e}, {:.2}s",
            coreset.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn hybrid_robustness() -> Outcome {
    let (dim, len, seed) = (6, 5000, 11);
    let measure = synth::rank_deficient(dim, len, seed).unwrap();
    let cfg = ReducerConfig::default().resolve(dim);
    let greedy = registry().get("greedy").unwrap().reduce(&measure, seed);
    let greedy_ok = matches!(greedy, Err(Error::SingularBasisPersistent { .. }));
    let hybrid: Result<RecombinationSolution, Error> =
        reduce_hybrid(&measure, cfg.trials, cfg.groups, cfg.budget_per_trial, seed, false);
    match hybrid {
        Ok(sol) => {
            let valid = validate_reduction(&measure, &sol, 1e-8).unwrap().passed;
            let bound = cfg.trials * sol.stats.rounds;
            outcome(
                greedy_ok && valid && sol.fallback_used() && sol.stats.basis_attempts <= bound,
                format!(
                    "greedy alone: {}; hybrid valid={valid} fallback_used={} ({} of {} rounds), basis attempts {} <= {bound}",
                    greedy.err().map_or("succeeded".to_string(), |e| e.to_string()),
                    sol.fallback_used(),
                    sol.stats.fallback_rounds,
                    sol.stats.rounds,
                    sol.stats.basis_attempts
                ),
            )
        }
        Err(e) => outcome(false, format!("hybrid failed: {e}")),
    }
}

fn mass_conservation() -> Outcome {
    let worst = MASS.lock().unwrap().iter().fold(0.0f64, |m, &v| m.max(v));
    outcome(worst <= 1e-10, format!("max |round mass - 1| = {worst:.2e} over every dnc/hybrid round of the exactness runs"))
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("recombine-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("points.csv");
    let measure = synth::gaussian(4, 3000, 13).unwrap();
    let mut text = String::from("a,b,c,d,w\n");
    for j in 0..measure.len() {
        let p = measure.atom(j);
        text.push_str(&format!("{},{},{},{},{}\n", p[0], p[1], p[2], p[3], 1 + j % 5));
    }
    std::fs::write(&csv, text).unwrap();
    let path = csv.to_str().unwrap();
    let mut commands: Vec<Vec<&str>> = ["basic", "greedy", "greedy-reset", "det", "dnc", "hybrid"]
        .iter()
        .map(|algo| vec!["reduce", path, "--header", "--weights", "w", "--algo", algo, "--seed", "13"])
        .collect();
    commands.push(vec!["bench", "--gen", "expmix20", "--algos", "basic,greedy,hybrid", "--reps", "3", "--Ns", "500,2000", "--seed", "13"]);
    commands.push(vec!["lsq", "--synth", "N=5000", "d=3", "seed=13", "--intercept"]);
    let mut mismatched = Vec::new();
    for args in &commands {
        let run = || Command::new(env!("CARGO_BIN_EXE_recombine")).args(args).output().unwrap();
        let (a, b) = (run(), run());
        if !a.status.success() || a.stdout.is_empty() || a.stdout != b.stdout {
            mismatched.push(format!("{} {}", args[0], args.get(6).unwrap_or(&"")));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    outcome(mismatched.is_empty(), format!("{} commands run twice, {} differed or failed {mismatched:?}", commands.len(), mismatched.len()))
}

fn main() {
    let checks: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("1  exactness (N=1e3, n=5)", Box::new(|| exactness(1_000, 5))),
        ("1  exactness (N=1e4, n=15)", Box::new(|| exactness(10_000, 15))),
        ("1  exactness (N=1e5, n=20)", Box::new(|| exactness(100_000, 20))),
        ("2  oracle equivalence", Box::new(oracle_equivalence)),
        ("3  cone characterization", Box::new(cone_characterization)),
        ("4  weight formula", Box::new(weight_formula)),
        ("5  rank-1 updates", Box::new(rank_one_updates)),
        ("6  luby schedule", Box::new(luby_schedule)),
        ("7  wendel probabilities", Box::new(wendel)),
        ("8  planar greedy tau <= 2", Box::new(planar_greedy)),
        ("9  greedy dominance", Box::new(greedy_dominance)),
        ("10 lsq identity", Box::new(lsq_identity)),
        ("11 hybrid robustness", Box::new(hybrid_robustness)),
        ("12 mass conservation", Box::new(mass_conservation)),
        ("13 determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (name, check) in &checks {
        let start = Instant::now();
        let result = check();
        failed += usize::from(!result.passed);
        println!(
            "{} {name}: {} [{:.1}s]",
            if result.passed { "PASS" } else { "FAIL" },
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
