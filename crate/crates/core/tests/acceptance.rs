//! End-to-end acceptance checks. Each test prints one `criterion N: PASS|FAIL`
//! line (visible with `--nocapture`) before asserting.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use bernlat::analysis::{
    bound_main, bound_simple, brute_force_best, default_grid, eval_bernstein_rational, grid_slack,
    monomial_membership_check, sup_error, to_power_basis,
};
use bernlat::function::ModulusSpec;
use bernlat::quantizer::{choose_t, quantize_function, quantize_with, rho, theta, CutoffMode, RoundingRule};
use bernlat::{FunctionSpec, LatticeApproximant};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, pass: bool, detail: &str) {
    println!("criterion {id}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {detail}");
}

const MAIN_DEGREES: [usize; 5] = [16, 64, 256, 1024, 4096];

fn approximant(f: &FunctionSpec, n: usize) -> LatticeApproximant {
    let t = choose_t(n, CutoffMode::Default).unwrap();
    quantize_function(f, n, t).unwrap().0
}

#[test]
fn criterion_01_main_bound_holds() {
    let start = Instant::now();
    let f = common::sine();
    let mut failures = Vec::new();
    let mut worst_margin = f64::INFINITY;
    for n in MAIN_DEGREES {
        let m = default_grid(n);
        assert_eq!(m, 2049.max(8 * n + 1));
        let err = sup_error(&f, &approximant(&f, n), m).unwrap();
        let slack = grid_slack(&f, m).unwrap();
        assert!((slack - 2.0 * std::f64::consts::PI / (m - 1) as f64).abs() <= 1e-15);
        let limit = bound_main(&f, n, true).unwrap() + slack;
        worst_margin = worst_margin.min(limit - err);
        if err > limit {
            failures.push(format!("n={n}: {err} > {limit}"));
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed < Duration::from_secs(30);
    report(1, pass, &format!("min margin {worst_margin:.4e}, {elapsed:.2?} {failures:?}"));
}

#[test]
fn criterion_02_simple_bound_chain() {
    let f = common::sine();
    let mut pass = true;
    let mut detail = String::new();
    for n in MAIN_DEGREES {
        let main = bound_main(&f, n, true).unwrap();
        let simple = bound_simple(&f, n, true).unwrap();
        if main > simple + 1e-12 {
            pass = false;
            detail.push_str(&format!("n={n}: {main} > {simple}; "));
        }
    }
    let at_4096 = bound_simple(&f, 4096, true).unwrap();
    let expected = 2.25 * std::f64::consts::PI / 16.0 + 2.0 / 16.0;
    pass &= (at_4096 - expected).abs() <= 1e-12 && (at_4096 - 0.5667).abs() < 5e-4;
    report(2, pass, &format!("bound_simple(4096) = {at_4096:.6} {detail}"));
}

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite")
}

#[test]
fn criterion_03_quantizer_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let mut violations = 0usize;
    for _ in 0..1000 {
        let len = rng.gen_range(1..=2048);
        let y: Vec<f64> = (0..len).map(|_| rng.gen_range(-10.0..=10.0)).collect();
        let (q, trace) = quantize_with(&y, RoundingRule::TiesToEven).unwrap();
        let mut running = BigRational::zero();
        for k in 0..len {
            running += exact(y[k]) - BigRational::from_integer(BigInt::from(q[k]));
            let u = trace.u[k];
            let bounded = u.abs() <= 0.5 && running.abs() <= half;
            // The stored residue is the running sum, rounded once to f64.
            let conserved = running.to_f64() == Some(u);
            if !(bounded && conserved) {
                violations += 1;
            }
        }
    }
    report(3, violations == 0, &format!("{violations} violations over 1000 sequences"));
}

#[test]
fn criterion_04_structural_zeroing() {
    let mut failures = Vec::new();
    for member in common::corpus() {
        let f = &member.spec;
        for n in [8usize, 64, 512, 2048] {
            let t = choose_t(n, CutoffMode::Default).unwrap();
            let (a, trace) = quantize_function(f, n, t).unwrap();
            let residue_ok = trace.u[n - t].abs() <= 1e-6;
            let locked = a.q[..t].iter().all(|&v| v == f.f0()) && a.q[n + 1 - t..].iter().all(|&v| v == f.f1());
            let ends = a.eval(0.0).unwrap() == f.f0() as f64 && a.eval(1.0).unwrap() == f.f1() as f64;
            if !(residue_ok && locked && ends) {
                failures.push(format!("{} n={n}", member.name));
            }
        }
    }
    report(4, failures.is_empty(), &format!("12 functions x 4 degrees {failures:?}"));
}

#[test]
fn criterion_05_identity_suites() {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_bernlat"))
        .args(["verify", "--n-max", "256", "--grid", "101"])
        .output()
        .unwrap();
    let elapsed = start.elapsed();
    let text = String::from_utf8(out.stdout).unwrap();
    let passes = text.lines().filter(|l| l.starts_with("PASS")).count();
    let fails = text.lines().filter(|l| l.starts_with("FAIL")).count();
    let pass = out.status.code() == Some(0) && passes == 5 && fails == 0 && elapsed < Duration::from_secs(10);
    report(5, pass, &format!("{passes} suites passed in {elapsed:.2?}\n{text}"));
}

#[test]
fn criterion_06_oracle_equivalence() {
    let start = Instant::now();
    let m = 2001;
    let mut failures = Vec::new();
    for member in common::corpus() {
        let f = &member.spec;
        let slack = grid_slack(f, m).unwrap();
        for n in [2usize, 3, 4] {
            let (_, best) = brute_force_best(f, n, 2, m).unwrap();
            let built = sup_error(f, &approximant(f, n), m).unwrap();
            let simple = bound_simple(f, n, true).unwrap();
            if !(best <= built && built <= simple + slack) {
                failures.push(format!("{} n={n}: {best} / {built} / {simple}", member.name));
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed < Duration::from_secs(60);
    report(6, pass, &format!("{elapsed:.2?} {failures:?}"));
}

#[test]
fn criterion_07_exact_certification() {
    let points: Vec<BigRational> = [(1, 3), (2, 7), (1, 2), (5, 9), (11, 13)]
        .iter()
        .map(|&(a, b)| BigRational::new(BigInt::from(a), BigInt::from(b)))
        .collect();
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for member in common::corpus() {
        for n in [1usize, 2, 3, 4, 5, 8, 12, 16, 20] {
            let a = approximant(&member.spec, n);
            let power = to_power_basis(&a);
            for x in &points {
                checked += 1;
                if power.eval_rational(x) != eval_bernstein_rational(n, &a.q, x) {
                    mismatches.push(format!("{} n={n} x={x}", member.name));
                }
            }
        }
    }
    let monomials = (0..=20).all(|n| (0..=n).all(|k| monomial_membership_check(n, k)));
    report(7, mismatches.is_empty() && monomials, &format!("{checked} exact comparisons {mismatches:?}"));
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn criterion_08_theta_scaling() {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = String::new();
    for alpha in [0.3, 0.5, 0.75, 1.0] {
        let f = FunctionSpec::from_fn(|_| 0.0, 1e-9).unwrap().with_modulus(ModulusSpec::hoelder(1.0, alpha)).unwrap();
        let points: Vec<(f64, f64)> = (10..=20)
            .step_by(2)
            .map(|e| {
                let n = 1usize << e;
                (n as f64, rho(&f, n).unwrap().t as f64)
            })
            .collect();
        let slope = log_log_slope(&points);
        let target = theta(alpha).unwrap();
        let ok = (slope - target).abs() <= 0.1;
        pass &= ok;
        detail.push_str(&format!("alpha={alpha}: slope {slope:.4} vs {target:.4}{}; ", if ok { "" } else { " (off)" }));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    report(8, pass, &format!("{detail}{elapsed:.2?}"));
}

#[test]
fn criterion_09_rate_sanity() {
    let mut failures = Vec::new();
    for member in common::corpus().into_iter().filter(|m| m.lipschitz) {
        let f = &member.spec;
        let coarse = sup_error(f, &approximant(f, 16), default_grid(16)).unwrap();
        let fine = sup_error(f, &approximant(f, 4096), default_grid(4096)).unwrap();
        if fine >= coarse {
            failures.push(format!("{}: {fine} >= {coarse}", member.name));
        }
        let scaled: Vec<f64> = MAIN_DEGREES
            .iter()
            .map(|&n| bound_simple(f, n, true).unwrap() * (n as f64).cbrt())
            .collect();
        let hi = scaled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
        if hi / lo > 1.01 {
            failures.push(format!("{}: n^(1/3) bound_simple spans {lo}..{hi}", member.name));
        }
    }
    report(9, failures.is_empty(), &format!("{failures:?}"));
}

fn run_cli(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_bernlat"))
        .args(args)
        .env_remove("SOURCE_DATE_EPOCH")
        .output()
        .unwrap();
    (out.status.code(), out.stdout)
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap()
}

#[test]
fn criterion_10_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("q.json");
    let csv = dir.path().join("sweep.csv");
    let json_s = json.to_str().unwrap();
    let csv_s = csv.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["approximate", "--f", "sin(pi*x)", "--n", "256", "--modulus", "lipschitz:3.141592653589793,2", "--out", json_s, "--deterministic"],
        vec!["approximate", "--f", "min(x,1-x)", "--n", "64", "--deterministic"],
        vec!["sweep", "--f", "x*(1-x)", "--n-list", "8,64,512", "--modulus", "lipschitz:1", "--out", csv_s, "--deterministic"],
        vec!["sweep", "--f", "2", "--n-list", "2,4", "--deterministic"],
        vec!["verify", "--n-max", "64", "--grid", "51", "--seed", "11"],
        vec!["bound", "--modulus", "hoelder:1,0.5", "--n-geom", "16,4,5"],
    ];
    let mut differing = Vec::new();
    for args in &commands {
        let first = run_cli(args);
        let files = (json.exists().then(|| read(&json)), csv.exists().then(|| read(&csv)));
        let second = run_cli(args);
        let files_again = (json.exists().then(|| read(&json)), csv.exists().then(|| read(&csv)));
        if first != second || files != files_again || first.0 != Some(0) {
            differing.push(args[0].to_string() + " " + args[1] + " " + args[2]);
        }
    }
    report(10, differing.is_empty(), &format!("{} commands run twice {differing:?}", commands.len()));
}

#[test]
fn sweep_of_integer_constant_has_zero_error() {
    let (code, out) = run_cli(&["sweep", "--f", "2", "--n-list", "2,4", "--deterministic"]);
    assert_eq!(code, Some(0));
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,t,sup_error,bernstein_error,bound_main,bound_simple,grid_points,wall_time_ms"));
    for line in lines {
        let sup: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(sup, 0.0, "{line}");
    }
}

#[test]
fn seeded_corpus_is_stable() {
    let a: Vec<String> = common::random_members(6, common::RANDOM_SEED).into_iter().map(|m| m.name).collect();
    let b: Vec<String> = common::random_members(6, common::RANDOM_SEED).into_iter().map(|m| m.name).collect();
    assert_eq!(a, b);
}
