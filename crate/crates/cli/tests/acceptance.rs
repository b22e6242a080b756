//! Acceptance suite: one check per criterion, each printed as a PASS/FAIL
//! line. Runs as a plain binary so the report is visible under `cargo test`;
//! exits nonzero when any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use impact_core::model::{
    cumulative_rate, discrete_cumulative, peak_age, per_follower_rate, rate_bound, ModelParams,
    DEFAULT_REL_TOL,
};
use impact_core::pipeline::{aggregate_cohorts, follower_histories, LogIndex, Stratum};
use impact_core::{fit_power_law, simulate_population, SimConfig};
use impact_oracles::{brute, grid, quad, random_log::micro_log};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fixed seed for every randomized criterion; chosen before any run.
const SEED: u64 = 20210319;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(start: Instant, budget: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < budget, || format!("took {took:.2?}, budget {budget:?}"))
}

fn quadrature(params: &ModelParams, t: f64) -> f64 {
    let f = |tau: f64| params.c() * (tau + params.epsilon()).powf(-params.alpha());
    quad::integrate_from_zero(&f, t, params.epsilon(), 1e-13)
}

fn rel_err(value: f64, reference: f64) -> f64 {
    ((value - reference) / reference).abs()
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi / lo).ln()).exp()
}

fn closed_form_vs_quadrature() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < 1000 {
        let alpha = 3.0 * (1.0 - rng.random::<f64>());
        if (alpha - 1.0).abs() < 1e-6 {
            continue;
        }
        let c = log_uniform(&mut rng, 1e-2, 10.0);
        let eps = log_uniform(&mut rng, 1e-2, 5.0);
        let t = log_uniform(&mut rng, 1e-3, 1e4);
        let params = ModelParams::new(c, alpha, eps, 0.0).map_err(|e| e.to_string())?;
        let err = rel_err(cumulative_rate(&params, t).unwrap(), quadrature(&params, t));
        ensure(err <= 1e-9, || {
            format!("alpha={alpha} c={c} eps={eps} t={t}: relative error {err:e}")
        })?;
        worst = worst.max(err);
        n += 1;
    }
    within_budget(start, Duration::from_secs(5))?;
    Ok(format!("max relative error {worst:.1e} over {n} points"))
}

fn alpha_one_branch() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let (mut worst_quad, mut worst_cont) = (0.0f64, 0.0f64);
    for _ in 0..300 {
        let c = log_uniform(&mut rng, 1e-2, 10.0);
        let eps = log_uniform(&mut rng, 1e-2, 5.0);
        let t = log_uniform(&mut rng, 1e-3, 1e4);
        let at_one = ModelParams::new(c, 1.0, eps, 0.0).unwrap();
        let value = cumulative_rate(&at_one, t).unwrap();
        let err = rel_err(value, quadrature(&at_one, t));
        ensure(err <= 1e-9, || format!("c={c} eps={eps} t={t}: quadrature error {err:e}"))?;
        worst_quad = worst_quad.max(err);
        for alpha in [1.0 - 1e-6, 1.0 + 1e-6] {
            let near = cumulative_rate(&ModelParams::new(c, alpha, eps, 0.0).unwrap(), t).unwrap();
            let gap = rel_err(near, value);
            ensure(gap <= 1e-4, || format!("alpha={alpha} c={c} eps={eps} t={t}: gap {gap:e}"))?;
            worst_cont = worst_cont.max(gap);
        }
    }
    Ok(format!(
        "quadrature error {worst_quad:.1e}, continuity gap {worst_cont:.1e} over 300 points"
    ))
}

fn peak_age_vs_grid() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let alpha = rng.random_range(0.2..=3.0);
        let c = log_uniform(&mut rng, 0.1, 10.0);
        let eps = log_uniform(&mut rng, 0.1, 5.0);
        let s = log_uniform(&mut rng, 0.1, 50.0);
        let params = ModelParams::new(c, alpha, eps, s).unwrap();
        let peak = peak_age(&params, DEFAULT_REL_TOL).map_err(|e| e.to_string())?;
        let scan = grid::scan(|t| per_follower_rate(&params, t).unwrap(), 0.0, 1e-3, 1.0);
        let gap = (scan.argmax - peak.t_star).abs();
        ensure(peak.converged && gap <= 2e-3, || {
            format!("{params:?}: solver {} vs grid {} (converged {})", peak.t_star, scan.argmax, peak.converged)
        })?;
        ensure(scan.local_maxima == 1 && scan.argmax > 0.0, || {
            format!("{params:?}: {} local maxima, argmax {}", scan.local_maxima, scan.argmax)
        })?;
        worst = worst.max(gap);
    }
    for _ in 0..50 {
        let alpha = rng.random_range(0.2..=3.0);
        let params = ModelParams::new(log_uniform(&mut rng, 0.1, 10.0), alpha, log_uniform(&mut rng, 0.1, 5.0), 0.0)
            .unwrap();
        let dense: Vec<f64> = (1..=20_000).map(|k| per_follower_rate(&params, k as f64 * 1e-3).unwrap()).collect();
        let wide: Vec<f64> = (0..=600).map(|k| per_follower_rate(&params, 10f64.powf(k as f64 / 100.0)).unwrap()).collect();
        ensure(grid::non_increasing(&dense) && grid::non_increasing(&wide), || {
            format!("{params:?}: G_0 increases somewhere")
        })?;
    }
    within_budget(start, Duration::from_secs(30))?;
    Ok(format!("500 peaks within {worst:.1e} of the grid argmax, one local max each; 50 s=0 cases non-increasing"))
}

fn model_curve_shapes() -> Result<String, String> {
    let base = ModelParams::new(1.0, 0.8, 1.0, 0.0).unwrap();
    let h = 0.01;
    let big_f: Vec<f64> = (0..=20_000).map(|k| cumulative_rate(&base, k as f64 * h).unwrap()).collect();
    ensure(big_f.windows(2).all(|w| w[1] > w[0]), || "F not increasing".into())?;
    ensure(
        big_f.windows(3).all(|w| w[2] - 2.0 * w[1] + w[0] <= 1e-12 * w[1]),
        || "F not concave".into(),
    )?;
    let g0: Vec<f64> = (1..=20_000).map(|k| per_follower_rate(&base, k as f64 * h).unwrap()).collect();
    ensure(g0.windows(2).all(|w| w[1] < w[0]), || "G_0 not decreasing".into())?;
    let mut peaks = Vec::new();
    for s in [1.0, 10.0, 100.0] {
        let params = base.with_s(s).unwrap();
        let scan = grid::scan(|t| per_follower_rate(&params, t).unwrap(), 0.0, h, 10.0);
        ensure(scan.local_maxima == 1 && scan.argmax > 0.0, || {
            format!("s={s}: {} local maxima, argmax {}", scan.local_maxima, scan.argmax)
        })?;
        peaks.push(format!("s={s}: peak at {:.2}", scan.argmax));
    }
    Ok(format!("F increasing and concave, G_0 decreasing; {}", peaks.join(", ")))
}

fn bound_above_one() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut tightest = f64::INFINITY;
    for _ in 0..1000 {
        let alpha = 1.0 + 2.0 * (1.0 - rng.random::<f64>());
        let c = log_uniform(&mut rng, 1e-2, 10.0);
        let eps = log_uniform(&mut rng, 1e-2, 5.0);
        let t = if rng.random_bool(0.05) { 0.0 } else { log_uniform(&mut rng, 1e-6, 1e4) };
        let params = ModelParams::new(c, alpha, eps, 0.0).unwrap();
        let bound = rate_bound(&params).ok_or_else(|| format!("no bound for alpha={alpha}"))?;
        let value = cumulative_rate(&params, t).unwrap();
        ensure(value < bound, || format!("alpha={alpha} c={c} eps={eps} t={t}: {value} >= {bound}"))?;
        tightest = tightest.min((bound - value) / bound);
    }
    Ok(format!("1000 points, smallest relative gap to the bound {tightest:.1e}"))
}

fn simulation_expectation() -> Result<String, String> {
    let start = Instant::now();
    let n_seeds = 1000;
    let horizon = 300;
    let params = ModelParams::new(1.0, 0.8, 1.0, 10.0).unwrap();
    let config = SimConfig::new(params, 1.0, 1, horizon, n_seeds, SEED);
    let log = simulate_population(&config).map_err(|e| e.to_string())?;
    // counts[user][week]
    let mut counts = vec![vec![0.0f64; horizon as usize]; n_seeds as usize];
    for r in &log.retweets {
        counts[(r.tweet_id >> 32) as usize - 1][r.week as usize - 1] += 1.0;
    }
    let n = f64::from(n_seeds);
    let z: Vec<f64> = (1..=horizon)
        .map(|week| {
            let xs: Vec<f64> = counts.iter().map(|c| c[week as usize - 1]).collect();
            let mean = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let expected = discrete_cumulative(&params, u64::from(week)).unwrap();
            (mean - expected) / (var / n).sqrt()
        })
        .collect();
    within_budget(start, Duration::from_secs(120))?;
    let (worst_week, worst) = z
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |b, (i, &v)| if v.abs() > b.1 { (i + 1, v.abs()) } else { b });
    let outside = z.iter().filter(|v| v.abs() > 3.0).count();
    let mean_z = z.iter().sum::<f64>() / z.len() as f64;
    let summary = format!(
        "{n_seeds} seeds x {horizon} weeks, {outside} week(s) beyond 3 SE, largest {worst:.2} SE at week {worst_week}, mean z {mean_z:.3}"
    );
    ensure(outside == 0, || summary.clone())?;
    Ok(summary)
}

fn parameter_recovery() -> Result<String, String> {
    let start = Instant::now();
    let params = ModelParams::new(5.0, 0.8, 1.0, 10.0).unwrap();
    let config = SimConfig::new(params, 50.0, 1, 30, 200, SEED);
    let log = simulate_population(&config).map_err(|e| e.to_string())?;
    let index = LogIndex::new(&log);
    let per_user: Vec<_> = index
        .users()
        .map(|u| index.extract_cohorts(u))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut report = Vec::new();
    for t0 in 1..=3 {
        let agg = aggregate_cohorts(&per_user, t0).map_err(|e| e.to_string())?;
        let fit = fit_power_law(&agg).map_err(|e| e.to_string())?;
        let users = agg.support[0];
        ensure(users >= 200 && agg.cohort_size >= 1000, || {
            format!("cohort {t0}: {users} users, {} members", agg.cohort_size)
        })?;
        ensure((fit.alpha_hat - 0.8).abs() <= 0.05 && fit.r_squared >= 0.9, || {
            format!("cohort {t0}: alpha_hat {} r2 {}", fit.alpha_hat, fit.r_squared)
        })?;
        report.push(format!(
            "t0={t0}: alpha_hat {:.4}, r2 {:.4}, {} members",
            fit.alpha_hat, fit.r_squared, agg.cohort_size
        ));
    }
    within_budget(start, Duration::from_secs(120))?;
    Ok(report.join("; "))
}

fn pipeline_oracle() -> Result<String, String> {
    let mut compared = 0usize;
    for seed in 5000..5100 {
        let log = micro_log(seed);
        let index = LogIndex::new(&log);
        let histories = follower_histories(&log);
        let mut per_user = Vec::new();
        let mut brute_per_user = Vec::new();
        for user in log.users() {
            let means = index.weekly_user_means(user).map_err(|e| e.to_string())?;
            ensure(Some(means) == brute::weekly_means(&log, user), || {
                format!("seed {seed} user {user}: weekly means differ")
            })?;
            let cohorts = index.extract_cohorts(user).map_err(|e| e.to_string())?;
            let got: Vec<(u32, Vec<f64>, usize)> =
                cohorts.iter().map(|c| (c.start_week, c.values.clone(), c.cohort_size)).collect();
            let expected = brute::cohorts(&log, user);
            ensure(got == expected, || format!("seed {seed} user {user}: cohorts differ"))?;
            per_user.push(cohorts);
            brute_per_user.push(expected);
            compared += 2;
        }
        for (lo, hi) in [(1, 5), (5, 15), (15, 60)] {
            let stratum = Stratum::new(lo, hi).unwrap();
            for normalize in [false, true] {
                let (curve, _) = index.career_curve(&stratum, normalize.then_some(&histories));
                let rows: Vec<(u32, f64, usize)> = curve
                    .weeks
                    .iter()
                    .zip(&curve.values)
                    .zip(&curve.n_users)
                    .map(|((&w, &v), &n)| (w, v, n))
                    .collect();
                ensure(rows == brute::career_curve(&log, lo, hi, normalize), || {
                    format!("seed {seed} stratum {stratum} normalize {normalize}: curves differ")
                })?;
                compared += 1;
            }
        }
        for t0 in 1..=40 {
            let got = aggregate_cohorts(&per_user, t0).ok().map(|a| (a.values, a.support));
            ensure(got == brute::aggregate(&brute_per_user, t0), || {
                format!("seed {seed} t0 {t0}: aggregates differ")
            })?;
            compared += 1;
        }
    }
    Ok(format!("100 micro-logs, {compared} exact comparisons"))
}

fn impact(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_impact"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("impact {} failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr))
    })?;
    Ok(out.stdout)
}

fn stratum_curve(csv: &[u8], stratum: &str) -> Vec<f64> {
    let mut reader = csv::Reader::from_reader(csv);
    reader
        .records()
        .map(|r| r.unwrap())
        .filter(|r| &r[0] == stratum)
        .map(|r| r[2].parse().unwrap())
        .collect()
}

fn end_to_end_shape() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let log = dir.path().join("sim.jsonl");
    let log = log.to_str().unwrap();
    impact(&[
        "simulate", "--s", "10", "--horizon-weeks", "300", "--n-users", "200", "--seed", &SEED.to_string(),
        "--output", log,
    ])?;
    let normalized = impact(&["analyze", "--input", log, "--normalize"])?;
    let raw = impact(&["analyze", "--input", log])?;
    // Horizon 300 means career length 299.
    let g = stratum_curve(&normalized, "200..300");
    let m = stratum_curve(&raw, "200..300");
    ensure(g.len() == 300 && m.len() == 300, || format!("curve lengths {} and {}", g.len(), m.len()))?;

    let (peak, peak_value) = g
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
    ensure(peak > 0 && peak + 1 < g.len(), || format!("normalized maximum at index {peak}"))?;
    ensure(peak_value > 1.5 * g[0] && peak_value > 1.5 * g[g.len() - 1], || {
        format!("normalized peak {peak_value} not clear of ends {} and {}", g[0], g[g.len() - 1])
    })?;

    let third = m.len() / 3;
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let (m1, m2, m3) = (mean(&m[..third]), mean(&m[third..2 * third]), mean(&m[2 * third..]));
    ensure(m1 < m2 && m2 < m3, || format!("segment means {m1} {m2} {m3} not increasing"))?;
    ensure(m2 - m1 > m3 - m2, || format!("segment gains {} then {} not concave", m2 - m1, m3 - m2))?;
    Ok(format!(
        "normalized peak at week {}, segment means {m1:.3} < {m2:.3} < {m3:.3}",
        peak + 1
    ))
}

fn read(path: &Path) -> Result<Vec<u8>, String> {
    std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn determinism() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let sim = ["simulate", "--s", "10", "--n-users", "60", "--horizon-weeks", "150", "--seed", "99"];
    impact(&[&sim[..], &["--output", &p("a.jsonl")]].concat())?;
    impact(&[&sim[..], &["--output", &p("b.jsonl")]].concat())?;
    let a = read(Path::new(&p("a.jsonl")))?;
    ensure(!a.is_empty() && a == read(Path::new(&p("b.jsonl")))?, || "simulate outputs differ".into())?;

    let log = p("a.jsonl");
    let runs: [Vec<&str>; 6] = [
        vec!["analyze", "--input", &log],
        vec!["analyze", "--input", &log, "--normalize", "--format", "jsonl"],
        vec!["analyze", "--input", &log, "--stratum", "50..150", "--smooth-width", "1"],
        vec!["fit", "--input", &log],
        vec!["model-curves", "--s", "10", "--t-max", "50", "--step", "0.1"],
        vec!["peak-age", "--s", "10"],
    ];
    for args in &runs {
        let first = impact(args)?;
        ensure(!first.is_empty() && first == impact(args)?, || format!("{} differs", args.join(" ")))?;
    }
    let cohorts = |name: &str| {
        impact(&["fit", "--input", &log, "--cohorts-output", &p(name)])?;
        read(Path::new(&p(name)))
    };
    ensure(cohorts("c1.csv")? == cohorts("c2.csv")?, || "cohort tables differ".into())?;
    Ok(format!("simulate ({} bytes) and {} table commands byte-identical", a.len(), runs.len() + 1))
}

fn main() {
    let criteria: [(u32, &str, Check); 10] = [
        (1, "closed-form F vs quadrature", closed_form_vs_quadrature),
        (2, "alpha = 1 branch", alpha_one_branch),
        (3, "peak age vs grid search", peak_age_vs_grid),
        (4, "model curve shapes at alpha 0.8, c 1", model_curve_shapes),
        (5, "bound on F for alpha > 1", bound_above_one),
        (6, "simulated weekly totals vs discrete sum", simulation_expectation),
        (7, "round-trip parameter recovery", parameter_recovery),
        (8, "pipeline vs brute force", pipeline_oracle),
        (9, "end-to-end curve shapes", end_to_end_shape),
        (10, "deterministic outputs", determinism),
    ];
    let mut failed = 0;
    let mut timings = BTreeMap::new();
    for (id, name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        timings.insert(id, start.elapsed());
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail} [{:.2?}]", start.elapsed()),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {detail} [{:.2?}]", start.elapsed());
            }
        }
    }
    let total: Duration = timings.values().sum();
    println!("acceptance: {} passed, {failed} failed in {total:.2?}", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
