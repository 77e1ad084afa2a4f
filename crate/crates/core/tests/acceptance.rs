//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::Rng;
use signsgd_bft::bounds::{self, exact_vote_failure, lemma1_bound, verify_appendix_cases};
use signsgd_bft::cli::{run_cli, verify};
use signsgd_bft::rng::{derive_stream, SUBSTREAM_FROZEN_POINT, SUBSTREAM_SIGN_ACCURACY};
use signsgd_bft::sim::{estimate_p, frozen_vote_rounds, run, FleetConfig, InitialPoint, LrSchedule, RunConfig};
use signsgd_bft::{AttackStrategy, BatchSchedule, GradVector, NoiseModel, Objective};
use statrs::distribution::{ContinuousCDF, Normal};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn c1_lemma1() -> Outcome {
    let started = Instant::now();
    let normal = Normal::new(0.0, 1.0).unwrap();
    let noise = NoiseModel::gaussian(1.0).unwrap();
    let samples = 100_000u64;
    let mut notes = Vec::new();
    let mut ok = true;
    for (i, s) in verify::DEFAULT_SNR_GRID.into_iter().enumerate() {
        let mut stream = derive_stream(1, i as u64, 0, SUBSTREAM_SIGN_ACCURACY);
        let est = estimate_p(&noise, s, 1, samples, &mut stream).unwrap();
        let wrong = est.wrong_sign_rate();
        let bound = lemma1_bound(s).unwrap();
        let phi = normal.cdf(-s);
        let se = (phi * (1.0 - phi) / samples as f64).sqrt();
        let z = (wrong - phi) / se;
        ok &= wrong <= bound && z.abs() <= 3.0;
        notes.push(format!("S={s}: {wrong:.5}<= {bound:.5}, z={z:+.2}"));
    }
    let elapsed = started.elapsed();
    ok &= elapsed < Duration::from_secs(10);
    outcome(ok, format!("{}; {:.2?}", notes.join("; "), elapsed))
}

fn c2_appendix() -> Outcome {
    let r = verify_appendix_cases(10.0, 0.01);
    let at_boundary_ok = (r.high_snr_at_boundary - 0.4167).abs() <= 1e-3;
    outcome(
        r.passed() && at_boundary_ok,
        format!(
            "{} grid points, value at 2/sqrt3 = {:.6}, violations = {}, piecewise min margin = {:.3e}",
            r.grid_points,
            r.high_snr_at_boundary,
            r.violations.len(),
            r.piecewise_min_margin
        ),
    )
}

/// Independent oracle: direct sum over honest outcomes.
fn failure_by_enumeration(q: u64, b: u64, p: f64) -> f64 {
    let h = q - b;
    let mut total = 0.0;
    for z in 0..=h {
        let margin = z as i64 - (h - z) as i64 - b as i64;
        if margin <= 0 {
            let mut c = 1.0;
            for i in 0..z {
                c = c * (h - i) as f64 / (i + 1) as f64;
            }
            total += c * p.powi(z as i32) * (1.0 - p).powi((h - z) as i32);
        }
    }
    total
}

fn c3_vote_failure() -> Outcome {
    let started = Instant::now();
    let checks = verify::vote_checks(&verify::Budget { trials: 100_000, seed: 3, ..verify::Budget::default() });
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(ToString::to_string).collect();
    let spot = exact_vote_failure(9, bounds::adversary_count(9, 1.0 / 3.0), 0.8);
    let oracle = failure_by_enumeration(9, 3, 0.8);
    let elapsed = started.elapsed();
    let ok = failed.is_empty()
        && (spot - 0.34464).abs() <= 1e-5
        && (oracle - spot).abs() <= 1e-12
        && elapsed < Duration::from_secs(30);
    outcome(
        ok,
        format!(
            "{} points, {} failed{}; spot exact = {spot:.6} (enumeration {oracle:.6}); {:.2?}",
            checks.len(),
            failed.len(),
            if failed.is_empty() { String::new() } else { format!(" [{}]", failed.join(" | ")) },
            elapsed
        ),
    )
}

fn c4_threshold() -> Outcome {
    let mut violations = 0u64;
    let mut cases = 0u64;
    let mut first = None;
    for q in 3i64..=1000 {
        for k in 501i64..=1000 {
            // p = k / 1000
            let max_a = (0..q).rev().find(|&kk| kk * 1000 < (2 * k - 1000) * (q - kk)).unwrap_or(-1);
            let max_b = (0..q).rev().find(|&kk| kk * 2 * k < q * (2 * k - 1000)).unwrap_or(-1);
            let lib = bounds::tolerable_byzantine_count(q as u64, k as f64 / 1000.0).map(|v| v as i64);
            cases += 1;
            if max_a != max_b || lib != Ok(max_a) {
                violations += 1;
                first.get_or_insert((q, k, max_a, max_b, lib));
            }
        }
    }
    outcome(violations == 0, format!("{cases} (q, p) pairs, {violations} violations, first = {first:?}"))
}

fn frozen_point(seed: u64, dim: usize, scale: f64) -> GradVector {
    let mut rng = derive_stream(seed, u64::MAX, 0, SUBSTREAM_FROZEN_POINT);
    GradVector::new((0..dim).map(|_| rng.random_range(-scale..scale)).collect()).unwrap()
}

fn c5_dominance() -> Outcome {
    let obj = Objective::quadratic(1000).unwrap();
    let steps = 10;
    let mut configs = 0;
    let mut violations = Vec::new();
    let mut sum = [0usize; 3];
    for n in [1usize, 500] {
        // SNR |x_i| sqrt(n) spread over (0, 2)
        let scale = 2.0 / (n as f64).sqrt();
        for b in 1..=13 {
            for seed in 0..3u64 {
                let x = frozen_point(seed, 1000, scale);
                let flips: Vec<Vec<usize>> = [AttackStrategy::OmniscientOptimal, AttackStrategy::BlindFlip, AttackStrategy::AdversaryServer]
                    .into_iter()
                    .map(|attack| {
                        let fleet = FleetConfig {
                            q: 27,
                            byzantine_count: b,
                            attack,
                            batch: BatchSchedule::constant(n).unwrap(),
                            noise: NoiseModel::gaussian(1.0).unwrap(),
                        };
                        frozen_vote_rounds(&obj, &fleet, &x, steps, seed).unwrap().iter().map(|r| r.flipped).collect()
                    })
                    .collect();
                configs += 1;
                for t in 0..steps {
                    for (a, f) in flips.iter().enumerate() {
                        sum[a] += f[t];
                    }
                    if flips[0][t] < flips[1][t] || flips[0][t] < flips[2][t] {
                        violations.push((n, b, seed, t));
                    }
                }
            }
        }
    }
    outcome(
        violations.is_empty(),
        format!(
            "{configs} configs x {steps} steps, total flips omniscient/blind/server = {}/{}/{}, violations = {}",
            sum[0],
            sum[1],
            sum[2],
            violations.len()
        ),
    )
}

fn toy(b: usize, batch: usize, seed: u64) -> RunConfig {
    let mut c = RunConfig::default();
    c.fleet.byzantine_count = b;
    c.fleet.batch = BatchSchedule::constant(batch).unwrap();
    c.master_seed = seed;
    c
}

fn c6_toy() -> Outcome {
    let started = Instant::now();
    let a = run(&toy(0, 500, 0)).unwrap();
    let f0 = a.initial_objective();
    let ok_a = a.final_objective < 1e-2 * f0;

    let mean = |batch: usize| -> f64 {
        (0..3u64).map(|s| run(&toy(13, batch, s)).unwrap().final_objective).sum::<f64>() / 3.0
    };
    let (b500, b1) = (mean(500), mean(1));
    let ok_b = b500 < b1;

    let c = run(&toy(14, 500, 0)).unwrap();
    let ok_c = c.final_objective > c.initial_objective();
    outcome(
        ok_a && ok_b && ok_c,
        format!(
            "(a) b=0: {:.4} < {:.1} {}; (b) b=13 mean over 3 seeds: batch 500 {b500:.3} < batch 1 {b1:.3} {}; \
             (c) b=14: {:.1} > {:.1} {}; {:.2?}",
            a.final_objective,
            1e-2 * f0,
            ok_a,
            ok_b,
            c.final_objective,
            c.initial_objective(),
            ok_c,
            started.elapsed()
        ),
    )
}

fn cli(args: &[&str]) -> i32 {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(std::iter::once("signsgd-bft").chain(args.iter().copied()), &mut out, &mut err);
    if code != 0 {
        eprintln!("{}", String::from_utf8_lossy(&err));
    }
    code
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "csv") {
                let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                files.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

fn c7_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("config.json");
    fs::write(
        &config,
        r#"{"iterations": 200, "fleet": {"byzantine_count": 9, "attack": "adversary_server", "batch": {"mode": "iteration_counter"}}}"#,
    )
    .unwrap();
    let config = config.to_str().unwrap();
    let mut codes = Vec::new();
    let mut trees = Vec::new();
    for threads in ["1", "3", "8"] {
        let out = tmp.path().join(format!("t{threads}"));
        let run_out = out.join("run");
        let sweep_out = out.join("sweep");
        codes.push(cli(&["--threads", threads, "run", "--config", config, "--seed", "11", "--out", run_out.to_str().unwrap()]));
        codes.push(cli(&[
            "--threads",
            threads,
            "sweep",
            "--config",
            config,
            "--axis",
            "byzantine_count",
            "--values",
            "0,5,13",
            "--panel-axis",
            "batch_size",
            "--panel-values",
            "1,t",
            "--repeats",
            "2",
            "--seed",
            "11",
            "--out",
            sweep_out.to_str().unwrap(),
        ]));
        trees.push(csv_files(&out));
    }
    let files = trees[0].len();
    let identical = trees.windows(2).all(|w| w[0] == w[1]);
    outcome(
        codes.iter().all(|&c| c == 0) && identical && files == 15,
        format!("threads 1/3/8, {files} CSVs per tree, byte-identical = {identical}, exit codes = {codes:?}"),
    )
}

fn c8_noiseless() -> Outcome {
    let obj = Objective::quadratic(1000).unwrap();
    let fleet = |b| FleetConfig {
        q: 27,
        byzantine_count: b,
        attack: AttackStrategy::OmniscientOptimal,
        batch: BatchSchedule::constant(1).unwrap(),
        noise: NoiseModel::gaussian(0.0).unwrap(),
    };
    // frozen point with some exact zeros
    let mut x = frozen_point(8, 1000, 5.0).into_vec();
    for v in x.iter_mut().step_by(7) {
        *v = 0.0;
    }
    let nonzero = x.iter().filter(|v| **v != 0.0).count();
    let x = GradVector::new(x).unwrap();
    let r13 = frozen_vote_rounds(&obj, &fleet(13), &x, 20, 0).unwrap();
    let r14 = frozen_vote_rounds(&obj, &fleet(14), &x, 20, 0).unwrap();
    let frozen_ok = r13.iter().all(|r| r.flipped == 0) && r14.iter().all(|r| r.flipped == nonzero);

    // full trajectories: the iterate never reaches zero, so every coordinate is live
    let traj = |b| {
        let c = RunConfig {
            fleet: fleet(b),
            iterations: 100,
            initial_lr: 0.01,
            lr_schedule: LrSchedule::Constant,
            x0: InitialPoint::Values(frozen_point(9, 1000, 10.0).into_vec()),
            ..RunConfig::default()
        };
        run(&c).unwrap()
    };
    let t13 = traj(13);
    let t14 = traj(14);
    let run_ok = t13.trajectory.iter().all(|r| r.flipped_coords == 0)
        && t14.trajectory.iter().all(|r| r.flipped_coords == 1000);
    outcome(
        frozen_ok && run_ok,
        format!(
            "frozen: b=13 max flips {}, b=14 flips {:?} of {nonzero} non-zero; runs: b=13 total flips {}, b=14 min flips per step {}",
            r13.iter().map(|r| r.flipped).max().unwrap(),
            r14.iter().map(|r| r.flipped).min().zip(r14.iter().map(|r| r.flipped).max()),
            t13.trajectory.iter().map(|r| r.flipped_coords).sum::<usize>(),
            t14.trajectory.iter().map(|r| r.flipped_coords).min().unwrap()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 wrong-sign bound dominance", c1_lemma1),
        ("2 case analysis grid", c2_appendix),
        ("3 vote-failure bound dominance", c3_vote_failure),
        ("4 threshold equivalence", c4_threshold),
        ("5 omniscient attack dominance", c5_dominance),
        ("6 toy reproduction", c6_toy),
        ("7 determinism across threads", c7_determinism),
        ("8 noiseless exactness", c8_noiseless),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let started = Instant::now();
        let o = check();
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {name}: {verdict} ({:.2?}) {}", started.elapsed(), o.detail);
        failures += usize::from(!o.passed);
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
