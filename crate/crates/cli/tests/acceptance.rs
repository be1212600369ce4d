//! Acceptance suite. Runs every exit criterion at its stated tolerance and
//! prints one PASS/FAIL line per criterion; exits nonzero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use hirzebruch_core::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn fib(d: u64, a: u64, b: u64, n: u64) -> FibrationParams {
    FibrationParams::new(d, a, b, n).unwrap()
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

/// Criterion 1: brute force = slice sum = Q on d ∈ {1,2,3}, a, b, n ∈ {0..3}; under 60 s.
fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    let mut bad = Vec::new();
    for d in 1..=3 {
        for a in 0..=3 {
            for b in 0..=3 {
                for n in 0..=3 {
                    let p = fib(d, a, b, n);
                    let brute = count_brute_force(&build_hirzebruch_polytope(p)).unwrap().value;
                    let sliced = count_slice_sum(p).value;
                    let q = quantization_dimension(p).dimension;
                    cases += 1;
                    if brute != sliced || sliced != q {
                        bad.push(p.to_string());
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        bad.is_empty() && elapsed < Duration::from_secs(60),
        format!("{cases} polytopes, {} mismatches, {elapsed:.2?}", bad.len()),
    )
}

/// Criterion 2: simplex counts equal C(b + N, N) for N ≤ 4, b ≤ 6.
fn projective_space() -> Outcome {
    let mut cases = 0;
    let mut bad = 0;
    for dim in 1..=4 {
        for b in 0..=6 {
            let s = SimplexParams::new(dim, b).unwrap();
            cases += 1;
            if count_brute_force(&build_simplex(s)).unwrap().value != binomial(b + dim, dim) {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("{cases} simplices, {bad} mismatches"))
}

/// Criterion 3: (a + 1 + nb/2)(b + 1) equals the binomial sum for a, b, n ≤ 10.
fn surface_formula() -> Outcome {
    let mut cases = 0;
    let mut bad = 0;
    for a in 0..=10 {
        for b in 0..=10 {
            for n in 0..=10 {
                cases += 1;
                if hirzebruch_surface_closed_form(a, b, n).unwrap() != quantization_dimension(fib(1, a, b, n)).dimension {
                    bad += 1;
                }
            }
        }
    }
    outcome(bad == 0 && cases == 1331, format!("{cases} cases, {bad} mismatches"))
}

/// Criterion 4: n = 0 factorization residual is 0 for d ≤ 3, a, b ≤ 4.
fn untwisted_factorization() -> Outcome {
    let mut cases = 0;
    let mut bad = 0;
    for d in 1..=3 {
        for a in 0..=4 {
            for b in 0..=4 {
                cases += 1;
                if !untwisted_product_formula(fib(d, a, b, 0)).unwrap().residual.is_zero() {
                    bad += 1;
                }
            }
        }
    }
    outcome(bad == 0, format!("{cases} cases, {bad} nonzero residuals"))
}

/// Criterion 5: n = 1 binomial formula and corrected decomposition have residual 0;
/// the printed decomposition gives rhs 4 against lhs 5 at d = 1, a = 1, b = 1.
fn blowup_identities() -> Outcome {
    let mut cases = 0;
    let mut bad = 0;
    for d in 1..=3 {
        for a in 0..=4 {
            for b in 0..=4 {
                let p = fib(d, a, b, 1);
                cases += 1;
                let count_ok = blowup_count_formula(p).unwrap().residual.is_zero();
                let corrected_ok = blowup_decomposition(p, true).unwrap().residual.is_zero();
                if !(count_ok && corrected_ok) {
                    bad += 1;
                }
            }
        }
    }
    let printed = blowup_decomposition(fib(1, 1, 1, 1), false).unwrap();
    let reproduced = printed.lhs == BigInt::from(5) && printed.rhs == BigInt::from(4);
    outcome(
        bad == 0 && reproduced,
        format!(
            "{cases} cases, {bad} nonzero residuals; printed variant at (1,1,1): lhs {} rhs {}",
            printed.lhs, printed.rhs
        ),
    )
}

/// Criterion 6: recurrence residual is exactly 0 for d ≤ 4, a, b ≤ 3, n0 ≤ 3.
fn recurrence() -> Outcome {
    let mut cases = 0;
    let mut bad = 0;
    for d in 1..=4 {
        for a in 0..=3 {
            for b in 0..=3 {
                for n0 in 0..=3 {
                    cases += 1;
                    if !recurrence_residual(d, a, b, n0).unwrap().residual.is_zero() {
                        bad += 1;
                    }
                }
            }
        }
    }
    outcome(bad == 0, format!("{cases} cases, {bad} nonzero residuals"))
}

/// Criterion 7: closed-form volume equals slice integration on the grid; the k = 100
/// dilate of (1,1,2,1) satisfies |count/k² − 4|/4 < 0.05.
fn volume() -> Outcome {
    let mut cases = 0;
    let mut bad = 0;
    for d in 1..=3 {
        for a in 0..=3 {
            for b in 0..=3 {
                for n in 0..=3 {
                    let p = fib(d, a, b, n);
                    cases += 1;
                    if symplectic_volume(p) != slice_integral_volume(p) {
                        bad += 1;
                    }
                }
            }
        }
    }
    let p = fib(1, 1, 2, 1);
    let vol = symplectic_volume(p);
    let k: u64 = 100;
    let count = count_brute_force(&build_hirzebruch_polytope(p).dilate(k).unwrap()).unwrap().value;
    let scaled = BigRational::new(BigInt::from(count.clone()), BigInt::from(k * k));
    let rel = ((&scaled - &vol) / &vol).abs();
    outcome(
        bad == 0 && vol == ratio(4, 1) && rel < ratio(5, 100),
        format!("{cases} volumes, {bad} mismatches; k=100 count {count}, relative gap {rel}"),
    )
}

/// Criterion 8: B_1 = +1/2 gaps strictly decrease over n ∈ {10, 100, 1000} and fall
/// below 1/100 at n = 1000 on d ∈ {1,2}, a ∈ {0,1}, b ∈ {1,2,5}; the
/// B_1 = −1/2 gap at d = 1, b = 1, n = 1000 exceeds 1. Under 10 s.
fn asymptotics() -> Outcome {
    let start = Instant::now();
    let n_list = [10, 100, 1000];
    let mut cases = 0;
    let mut bad = Vec::new();
    let mut worst = BigRational::zero();
    for d in [1, 2] {
        for a in [0, 1] {
            for b in [1, 2, 5] {
                let rows = ratio_convergence(a, b, d, &n_list, BernoulliConvention::BPlus).unwrap();
                cases += 1;
                let decreasing = rows.windows(2).all(|w| w[1].gap < w[0].gap);
                let last = &rows[2].gap;
                if last > &worst {
                    worst = last.clone();
                }
                if !(decreasing && *last < ratio(1, 100)) {
                    bad.push(format!("(d={d},a={a},b={b})"));
                }
            }
        }
    }
    let minus = ratio_convergence(0, 1, 1, &[1000], BernoulliConvention::BMinus).unwrap();
    let minus_gap = minus[0].gap.clone();
    let elapsed = start.elapsed();
    outcome(
        bad.is_empty() && minus_gap > BigRational::one() && elapsed < Duration::from_secs(10),
        format!(
            "{cases} families, failing {bad:?}, worst gap at n=1000 {worst}; B_1=-1/2 gap {minus_gap}; {elapsed:.2?}"
        ),
    )
}

fn run_sweep_binary(out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_hirzebruch"))
        .args([
            "sweep", "--d", "1:2", "--a", "0:2", "--b", "1:2", "--n", "0:3", "--methods", "slice-sum,brute-force",
        ])
        .arg("--output")
        .arg(out)
        .output()
        .expect("run hirzebruch")
}

/// Criterion 9: two sweeps on one spec are byte-identical; brute-force counts do not
/// depend on the worker count.
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (first, second) = (dir.path().join("one.csv"), dir.path().join("two.csv"));
    let ok_runs = run_sweep_binary(&first).status.success() && run_sweep_binary(&second).status.success();
    let (x, y) = (std::fs::read(&first).unwrap_or_default(), std::fs::read(&second).unwrap_or_default());
    let identical = ok_runs && !x.is_empty() && x == y;

    let mut worker_mismatch = 0;
    let mut cases = 0;
    for d in 1..=3 {
        for a in 0..=3 {
            for b in 0..=3 {
                for n in 0..=3 {
                    let poly = build_hirzebruch_polytope(fib(d, a, b, n));
                    let one = count_brute_force_with_workers(&poly, 1).unwrap().value;
                    cases += 1;
                    for w in [2, 4, 8] {
                        if count_brute_force_with_workers(&poly, w).unwrap().value != one {
                            worker_mismatch += 1;
                        }
                    }
                }
            }
        }
    }
    let big = build_hirzebruch_polytope(fib(1, 1, 2, 1)).dilate(100).unwrap();
    let big_same = count_brute_force_with_workers(&big, 1).unwrap().value
        == count_brute_force_with_workers(&big, 6).unwrap().value;
    outcome(
        identical && worker_mismatch == 0 && big_same,
        format!(
            "sweep files identical: {identical} ({} bytes); {cases} polytopes x 3 worker counts, {worker_mismatch} mismatches",
            x.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("projective space closed form", projective_space),
        ("Hirzebruch surface formula", surface_formula),
        ("n=0 factorization", untwisted_factorization),
        ("n=1 blow-up identities", blowup_identities),
        ("recurrence", recurrence),
        ("volume and dilation", volume),
        ("Bernoulli asymptotics", asymptotics),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let status = if o.ok { "PASS" } else { "FAIL" };
        println!("criterion {} {status} {name}: {}", i + 1, o.detail);
        failed += usize::from(!o.ok);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
