//! Acceptance gate. Every criterion runs at its pinned tolerance and
//! runtime budget; one PASS/FAIL line is printed per criterion.
//!
//! Run with `cargo test -p maac --test acceptance -- --nocapture` to see the
//! report.

use std::time::{Duration, Instant};

use rand::Rng;

use maac::entcalc::{
    binomial_entropy, directional_second_derivative, entropy_bits, entropy_derivatives, oracle,
    Direction,
};
use maac::pbin::{pmf_bruteforce, pmf_dp, ProbVector};
use maac::region::{
    build_region, conditional_mutual_info, conditional_mutual_info_routes, is_member,
    is_member_naive, sum_rate_bound, RateTuple, DEFAULT_TOL,
};
use maac::verify::{
    binomial_entropy_scan, certify_lindstrom, dominance_check, log_concavity_margin,
    sample_interior, trial_rng,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    check: fn() -> Outcome,
}

fn interior_point(seed: u64, index: u64, sizes: std::ops::RangeInclusive<usize>) -> ProbVector {
    let mut rng = trial_rng(seed, index);
    let n = rng.gen_range(sizes);
    sample_interior(n, &mut rng)
}

fn ac1_sum_rate_constant() -> Outcome {
    let expected = 3.0 - 0.75 * 3f64.log2();
    let got = sum_rate_bound(3);
    let err = (got - expected).abs();
    outcome(err <= 1e-12, format!("H_3(1/2) = {got}, |error| = {err:e}"))
}

fn ac2_region_examples() -> Outcome {
    // Independent oracle: entropy summed by hand over the enumerated PMF.
    let oracle = |j: usize| -> f64 {
        let f = pmf_bruteforce(&ProbVector::constant(j, 0.5).unwrap()).unwrap();
        f.masses()
            .iter()
            .filter(|&&m| m > 0.0)
            .map(|m| -m * m.log2())
            .sum()
    };
    let r2 = build_region(2).unwrap();
    let r3 = build_region(3).unwrap();
    let b2: Vec<f64> = r2.constraints().iter().map(|c| c.bound_bits).collect();
    let b3: Vec<f64> = r3.constraints().iter().map(|c| c.bound_bits).collect();
    let passed = b2 == [1.0, 1.5]
        && b3[..2] == [1.0, 1.5]
        && (b3[2] - 1.811278).abs() < 1e-6
        && (oracle(2) - 1.5).abs() <= 1e-15
        && (oracle(3) - b3[2]).abs() <= 1e-12
        && (oracle(1) - 1.0).abs() <= 1e-15;
    outcome(
        passed,
        format!("s=2 {b2:?}; s=3 {b3:?}; oracle H_2(1/2) = {}", oracle(2)),
    )
}

fn ac3_pmf_oracle() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..200 {
        let mut rng = trial_rng(3, i);
        let n = rng.gen_range(1..=12);
        let p = ProbVector::new((0..n).map(|_| rng.gen_range(0.0..=1.0)).collect()).unwrap();
        let dp = pmf_dp(&p);
        let bf = pmf_bruteforce(&p).unwrap();
        for (a, b) in dp.masses().iter().zip(bf.masses()) {
            worst = worst.max((a - b).abs());
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max |dp - enumeration| = {worst:e} over 200 vectors"),
    )
}

fn ac4_derivative_fidelity() -> Outcome {
    let (mut grad_worst, mut hess_worst) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let p = interior_point(4, i, 2..=10);
        let d = entropy_derivatives(&p).unwrap();
        let fd = oracle::gradient(&p, 1e-5);
        for (a, b) in d.gradient.iter().zip(&fd) {
            grad_worst = grad_worst.max((a - b).abs());
        }
        for l in 0..p.len() {
            for m in 0..p.len() {
                let fd = oracle::hessian_entry_extrapolated(&p, l, m, 1e-4);
                hess_worst = hess_worst.max((d.hessian_entry(l, m) - fd).abs());
            }
        }
    }
    outcome(
        grad_worst <= 1e-6 && hess_worst <= 1e-5,
        format!("gradient max |error| {grad_worst:e} (tol 1e-6), Hessian max |error| {hess_worst:e} (tol 1e-5)"),
    )
}

fn ac5_line_concavity() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut evaluations = 0;
    for i in 0..1000 {
        let p = interior_point(5, i, 2..=10);
        for l in 0..p.len() {
            for m in l + 1..p.len() {
                let c = directional_second_derivative(&p, Direction::new(l, m).unwrap()).unwrap();
                worst = worst.max(c);
                evaluations += 1;
            }
        }
    }
    outcome(
        worst < 0.0,
        format!("max D²_u H = {worst:e} over {evaluations} (point, pair) cases"),
    )
}

fn ac6_log_concavity() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut worst_rel = f64::INFINITY;
    let mut all_checked = true;
    for i in 0..1000 {
        let p = interior_point(6, i, 2..=12);
        let r = log_concavity_margin(&p);
        all_checked &= r.checked == p.len() - 1 && r.skipped == 0;
        worst = worst.min(r.min_margin.unwrap());
        worst_rel = worst_rel.min(r.min_relative_margin.unwrap());
    }
    outcome(
        worst > 0.0 && all_checked,
        format!("min margin {worst:e}, min relative margin {worst_rel:.4}"),
    )
}

fn ac7_maximum_at_half() -> Outcome {
    let mut failures = Vec::new();
    let mut worst_distance = 0.0f64;
    let mut worst_entropy_err = 0.0f64;
    let mut worst_excess = f64::NEG_INFINITY;
    for n in 1..=10 {
        let c = certify_lindstrom(n, 100, 70 + n as u64).unwrap();
        worst_distance = worst_distance.max(c.max_final_distance);
        worst_entropy_err = worst_entropy_err.max(c.max_final_entropy_error);
        if !c.passed() || c.max_final_distance > 1e-6 || c.max_final_entropy_error > 1e-9 {
            failures.push(format!("certify n={n}"));
        }
        let d = dominance_check(n, 10_000, 700 + n as u64).unwrap();
        worst_excess = worst_excess.max(d.max_excess_bits);
        if !d.holds() {
            failures.push(format!("dominance n={n}"));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "max |p - 1/2| {worst_distance:e}, max |H - H_n(1/2)| {worst_entropy_err:e}, \
             max H(Z_p) - H_n(1/2) {worst_excess:e}; failures {failures:?}"
        ),
    )
}

fn ac8_binomial_scan() -> Outcome {
    let mut bad = Vec::new();
    for n in 1..=30 {
        let r = binomial_entropy_scan(n, 1001).unwrap();
        let target = binomial_entropy(n, 0.5).unwrap();
        if r.argmax_p != 0.5 || (r.max_value - target).abs() > 1e-12 {
            bad.push(n);
        }
    }
    outcome(
        bad.is_empty(),
        format!("argmax = 0.5 for n = 1..=30; exceptions {bad:?}"),
    )
}

fn ac9_membership_reduction() -> Outcome {
    let mut disagreements = 0;
    let mut members = 0;
    let mut total = 0;
    for s in 2..=8usize {
        let region = build_region(s).unwrap();
        for i in 0..10_000u64 {
            let mut rng = trial_rng(900 + s as u64, i);
            let rates = RateTuple::new((0..s).map(|_| rng.gen_range(0.0..=1.2)).collect()).unwrap();
            let fast = is_member(&region, &rates, DEFAULT_TOL).unwrap().member;
            let slow = is_member_naive(&region, &rates, DEFAULT_TOL).unwrap();
            disagreements += usize::from(fast != slow);
            members += usize::from(fast);
            total += 1;
        }
    }
    outcome(
        disagreements == 0,
        format!("{disagreements} disagreements over {total} tuples ({members} members)"),
    )
}

fn ac10_mutual_information() -> Outcome {
    let mut route_worst = 0.0f64;
    let mut max_excess = f64::NEG_INFINITY;
    let mut half_worst = 0.0f64;
    for i in 0..200u64 {
        let mut rng = trial_rng(10, i);
        let s = rng.gen_range(1..=10);
        let p = ProbVector::new((0..s).map(|_| rng.gen_range(0.0..=1.0)).collect()).unwrap();
        let mut subset: Vec<usize> = (0..s).filter(|_| rng.gen_bool(0.5)).collect();
        if subset.is_empty() {
            subset.push(rng.gen_range(0..s));
        }
        let r = conditional_mutual_info_routes(&p, &subset).unwrap();
        route_worst = route_worst.max((r.closed_form - r.enumerated).abs());

        let bound = binomial_entropy(subset.len(), 0.5).unwrap();
        let at_half =
            conditional_mutual_info(&ProbVector::constant(s, 0.5).unwrap(), &subset).unwrap();
        half_worst = half_worst.max((at_half - bound).abs());
        max_excess = max_excess.max(r.closed_form - at_half);
    }
    outcome(
        route_worst <= 1e-10 && half_worst <= 1e-12 && max_excess <= 1e-12,
        format!(
            "route |a - b| {route_worst:e}; |I(1/2) - H_|A|(1/2)| {half_worst:e}; \
             max I(p) - I(1/2) {max_excess:e}"
        ),
    )
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        name: "sum-rate constant 3 - (3/4) log2 3",
        budget: Duration::from_millis(1),
        check: ac1_sum_rate_constant,
    },
    Criterion {
        id: 2,
        name: "region bounds for s = 2, 3",
        budget: Duration::from_millis(1),
        check: ac2_region_examples,
    },
    Criterion {
        id: 3,
        name: "PMF DP vs enumeration",
        budget: Duration::from_secs(5),
        check: ac3_pmf_oracle,
    },
    Criterion {
        id: 4,
        name: "gradient / Hessian vs finite differences",
        budget: Duration::from_secs(30),
        check: ac4_derivative_fidelity,
    },
    Criterion {
        id: 5,
        name: "strict concavity along e_l - e_m",
        budget: Duration::from_secs(60),
        check: ac5_line_concavity,
    },
    Criterion {
        id: 6,
        name: "strict log-concavity of b(k, p)",
        budget: Duration::from_secs(10),
        check: ac6_log_concavity,
    },
    Criterion {
        id: 7,
        name: "entropy maximized at p = 1/2",
        budget: Duration::from_secs(120),
        check: ac7_maximum_at_half,
    },
    Criterion {
        id: 8,
        name: "binomial entropy grid argmax",
        budget: Duration::from_secs(5),
        check: ac8_binomial_scan,
    },
    Criterion {
        id: 9,
        name: "prefix-sum membership vs subsets",
        budget: Duration::from_secs(30),
        check: ac9_membership_reduction,
    },
    Criterion {
        id: 10,
        name: "conditional MI identity",
        budget: Duration::from_secs(30),
        check: ac10_mutual_information,
    },
];

#[test]
fn acceptance() {
    // Exercise the code once so the microsecond-scale criteria are not timed
    // against page faults and lazy initialization.
    let _ = entropy_bits(&pmf_dp(&ProbVector::constant(3, 0.5).unwrap()));
    let _ = build_region(3);

    println!();
    let mut failed = Vec::new();
    for c in CRITERIA {
        let start = Instant::now();
        let result = (c.check)();
        let elapsed = start.elapsed();
        let in_budget = elapsed < c.budget;
        let passed = result.passed && in_budget;
        println!(
            "[{}] AC{:<2} {} ({:.3?}, budget {:?}): {}",
            if passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            elapsed,
            c.budget,
            result.detail
        );
        if !passed {
            failed.push(c.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
