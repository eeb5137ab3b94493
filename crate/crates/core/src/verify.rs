//! Numerical certificates for the maximum-entropy property of Bernoulli sums:
//! the entropy of `Z_p` is maximized at `p = (1/2, ..., 1/2)`.
//!
//! The argument has three computational pieces:
//!
//! * `b(k, p)` is strictly log-concave in `k` on the interior ([`log_concavity_margin`]);
//! * hence `H` is strictly concave along every `e_l - e_m` line ([`curvature_scan`]),
//!   so replacing `(p_l, p_m)` by their mean never lowers `H`
//!   ([`pairwise_equalization_ascent`]);
//! * on constant vectors `H_n(p)` peaks at `p = 1/2` ([`binomial_entropy_scan`]).
//!
//! [`certify_lindstrom`] chains the last two over seeded random starts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::entcalc::{binomial_entropy, directional_second_derivative, entropy_bits, Direction};
use crate::pbin::{pmf_dp, ProbVector};
use crate::{Error, Result};

/// Sampling range for random interior points.
pub const SAMPLE_LOW: f64 = 0.01;
pub const SAMPLE_HIGH: f64 = 0.99;

/// Entropy may drop by at most this much between ascent iterates.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// Ascent tolerance used inside [`certify_lindstrom`].
pub const CERTIFY_ASCENT_TOL: f64 = 1e-12;
/// Every certified run must end this close to `p = 1/2`...
pub const CERTIFY_POINT_TOL: f64 = 1e-6;
/// ...with entropy this close to `H_n(1/2)`.
pub const CERTIFY_ENTROPY_TOL: f64 = 1e-9;
/// Sampled entropies may exceed `H_n(1/2)` by at most this much.
pub const DOMINANCE_SLACK: f64 = 1e-12;

const MAX_ASCENT_STEPS: usize = 100_000;

/// Draws `n` coordinates uniformly from `[SAMPLE_LOW, SAMPLE_HIGH]`.
pub fn sample_interior<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ProbVector {
    let probs = (0..n)
        .map(|_| rng.gen_range(SAMPLE_LOW..=SAMPLE_HIGH))
        .collect();
    ProbVector::new(probs).expect("samples lie in [0, 1]")
}

/// The PRNG owned by trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Result of checking `b(k-1) b(k+1) < b(k)²` for `1 <= k <= n-1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogConcavityReport {
    /// Minimum of `b(k)² - b(k-1) b(k+1)` over the checked `k`.
    pub min_margin: Option<f64>,
    /// Minimum of `1 - b(k-1) b(k+1) / b(k)²`, scale-free companion of `min_margin`.
    pub min_relative_margin: Option<f64>,
    pub witness_k: Option<usize>,
    pub checked: usize,
    /// Indices where one of the three masses is zero.
    pub skipped: usize,
}

impl LogConcavityReport {
    /// True when every checked index has a strictly positive margin.
    pub fn is_strict(&self) -> bool {
        self.min_margin.is_none_or(|m| m > 0.0)
    }
}

/// Log-concavity margins of `b(., p)`. Degenerate `p` is accepted; indices
/// touching a zero mass are skipped and counted.
pub fn log_concavity_margin(p: &ProbVector) -> LogConcavityReport {
    let f = pmf_dp(p);
    let n = p.len();
    let mut report = LogConcavityReport {
        min_margin: None,
        min_relative_margin: None,
        witness_k: None,
        checked: 0,
        skipped: 0,
    };
    for k in 1..n {
        let (lo, mid, hi) = (f.masses()[k - 1], f.masses()[k], f.masses()[k + 1]);
        if lo <= 0.0 || mid <= 0.0 || hi <= 0.0 {
            report.skipped += 1;
            continue;
        }
        report.checked += 1;
        let margin = mid * mid - lo * hi;
        let relative = 1.0 - (lo / mid) * (hi / mid);
        if report.min_margin.is_none_or(|m| margin < m) {
            report.min_margin = Some(margin);
            report.witness_k = Some(k);
        }
        if report.min_relative_margin.is_none_or(|m| relative < m) {
            report.min_relative_margin = Some(relative);
        }
    }
    report
}

/// Largest `D²_u H` over all coordinate pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureReport {
    /// The value closest to zero; strict line concavity needs it negative.
    pub max_curvature: f64,
    pub witness_pair: (usize, usize),
    pub pairs: usize,
}

impl CurvatureReport {
    pub fn all_negative(&self) -> bool {
        self.max_curvature < 0.0
    }
}

/// Evaluates `D²_u H` for every `u = e_l - e_m`, `l < m`.
pub fn curvature_scan(p: &ProbVector) -> Result<CurvatureReport> {
    let n = p.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "curvature scan needs at least two coordinates",
        ));
    }
    let mut best: Option<(f64, (usize, usize))> = None;
    for l in 0..n {
        for m in l + 1..n {
            let c = directional_second_derivative(p, Direction::new(l, m)?)?;
            if best.is_none_or(|(b, _)| c > b) {
                best = Some((c, (l, m)));
            }
        }
    }
    let (max_curvature, witness_pair) = best.expect("at least one pair");
    Ok(CurvatureReport {
        max_curvature,
        witness_pair,
        pairs: n * (n - 1) / 2,
    })
}

/// Iterates of a pairwise-equalization run, starting point included.
#[derive(Debug, Clone, PartialEq)]
pub struct AscentTrace {
    pub iterates: Vec<(ProbVector, f64)>,
    pub converged: bool,
    pub final_p: ProbVector,
}

impl AscentTrace {
    pub fn steps(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn initial_entropy(&self) -> f64 {
        self.iterates[0].1
    }

    pub fn final_entropy(&self) -> f64 {
        self.iterates[self.iterates.len() - 1].1
    }

    /// Largest drop in entropy between consecutive iterates (zero if none).
    pub fn max_decrease(&self) -> f64 {
        self.iterates
            .windows(2)
            .map(|w| w[0].1 - w[1].1)
            .fold(0.0, f64::max)
    }

    pub fn is_monotone(&self) -> bool {
        self.max_decrease() <= MONOTONE_SLACK
    }
}

/// The most unequal pair `(l, m)`, `l < m`, lexicographically smallest on
/// ties, together with its spread `max - min`.
fn most_unequal_pair(p: &[f64]) -> (usize, usize, f64) {
    let mut hi = 0;
    let mut lo = 0;
    for (i, &v) in p.iter().enumerate() {
        if v > p[hi] {
            hi = i;
        }
        if v < p[lo] {
            lo = i;
        }
    }
    (hi.min(lo), hi.max(lo), p[hi] - p[lo])
}

/// Repeatedly replaces the most unequal pair by its mean until the spread of
/// `p` falls below `tol`. The sum of `p` is preserved, so the run ends near
/// the constant vector at the mean of `p0`.
pub fn pairwise_equalization_ascent(p0: &ProbVector, tol: f64) -> Result<AscentTrace> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    p0.ensure_interior(crate::entcalc::INTERIOR_MARGIN)?;
    let entropy = |p: &ProbVector| entropy_bits(&pmf_dp(p));
    let mut current = p0.as_slice().to_vec();
    let mut iterates = vec![(p0.clone(), entropy(p0))];
    let mut converged = false;
    for _ in 0..=MAX_ASCENT_STEPS {
        let (l, m, spread) = most_unequal_pair(&current);
        if spread < tol || current.len() < 2 {
            converged = true;
            break;
        }
        let mean = (current[l] + current[m]) / 2.0;
        current[l] = mean;
        current[m] = mean;
        let p = ProbVector::new(current.clone())?;
        let h = entropy(&p);
        iterates.push((p, h));
    }
    let final_p = ProbVector::new(current)?;
    Ok(AscentTrace {
        iterates,
        converged,
        final_p,
    })
}

/// Maximizes a unimodal `f` on `[lo, hi]` by golden-section search.
pub fn golden_section_max<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > xtol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        }
    }
    let x = (lo + hi) / 2.0;
    (x, f(x))
}

/// Grid argmax of `H_n(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanResult {
    pub argmax_p: f64,
    pub max_value: f64,
}

/// Evaluates `H_n(i / (grid_points - 1))` for every grid index and returns the
/// first maximizer. An odd grid puts `p = 1/2` exactly on the grid.
pub fn binomial_entropy_scan(n: usize, grid_points: usize) -> Result<ScanResult> {
    if grid_points < 3 || grid_points.is_multiple_of(2) {
        return Err(Error::InvalidGrid(grid_points));
    }
    let last = (grid_points - 1) as f64;
    let mut best = ScanResult {
        argmax_p: 0.0,
        max_value: f64::NEG_INFINITY,
    };
    for i in 0..grid_points {
        let p = i as f64 / last;
        let h = binomial_entropy(n, p)?;
        if h > best.max_value {
            best = ScanResult {
                argmax_p: p,
                max_value: h,
            };
        }
    }
    Ok(best)
}

/// One certified start: ascent to a constant vector, then a line search on
/// the common value.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub start: ProbVector,
    pub start_entropy: f64,
    /// `H_n(1/2) - H(Z_start)`; negative would contradict the maximum.
    pub gap_bits: f64,
    pub ascent_steps: usize,
    pub ascent_monotone: bool,
    /// Common value after the golden-section step.
    pub final_value: f64,
    pub final_entropy: f64,
    pub converged: bool,
}

impl TrialOutcome {
    pub fn bound_holds(&self) -> bool {
        self.gap_bits >= -DOMINANCE_SLACK
    }
}

/// Runs the ascent and the line search from `p0`.
pub fn certify_trial(p0: &ProbVector) -> Result<TrialOutcome> {
    let n = p0.len();
    let target = binomial_entropy(n, 0.5)?;
    let trace = pairwise_equalization_ascent(p0, CERTIFY_ASCENT_TOL)?;
    let fin = trace.final_p.as_slice();
    let common = fin.iter().sum::<f64>() / n as f64;
    // H_n is symmetric about 1/2 and unimodal, so its maximizer lies between
    // the common value and its reflection.
    let (lo, hi) = (common.min(1.0 - common), common.max(1.0 - common));
    let (final_value, final_entropy) = if hi - lo > 0.0 {
        golden_section_max(
            |t| binomial_entropy(n, t).unwrap_or(f64::NEG_INFINITY),
            lo,
            hi,
            1e-10,
        )
    } else {
        (common, binomial_entropy(n, common)?)
    };
    let converged = trace.converged
        && (final_value - 0.5).abs() <= CERTIFY_POINT_TOL
        && (final_entropy - target).abs() <= CERTIFY_ENTROPY_TOL;
    Ok(TrialOutcome {
        start: p0.clone(),
        start_entropy: trace.initial_entropy(),
        gap_bits: target - trace.initial_entropy(),
        ascent_steps: trace.steps(),
        ascent_monotone: trace.is_monotone(),
        final_value,
        final_entropy,
        converged,
    })
}

/// Summary of a [`certify_lindstrom`] run. Serializes to
/// `{n, trials, seed, worst_gap_bits, all_converged, worst_final_p}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Smallest `H_n(1/2) - H(Z_p0)` over the sampled starts.
    pub worst_gap_bits: f64,
    pub all_converged: bool,
    /// Final point farthest from `1/2`.
    pub worst_final_p: Vec<f64>,
    #[serde(skip)]
    pub target_entropy: f64,
    #[serde(skip)]
    pub max_final_distance: f64,
    #[serde(skip)]
    pub max_final_entropy_error: f64,
    /// Entropy reached by the run farthest from `H_n(1/2)`.
    #[serde(skip)]
    pub worst_final_entropy: f64,
    #[serde(skip)]
    pub all_monotone: bool,
}

impl Certificate {
    pub fn bound_holds(&self) -> bool {
        self.worst_gap_bits >= -DOMINANCE_SLACK
    }

    /// True when every run converged, every ascent was monotone and no
    /// sample exceeded the bound.
    pub fn passed(&self) -> bool {
        self.all_converged && self.all_monotone && self.bound_holds()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }
}

fn check_run(n: usize, trials: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1"));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1"));
    }
    Ok(())
}

fn run_trial(n: usize, seed: u64, trial: usize) -> Result<TrialOutcome> {
    let p0 = sample_interior(n, &mut trial_rng(seed, trial as u64));
    certify_trial(&p0)
}

fn summarize(n: usize, seed: u64, outcomes: &[TrialOutcome]) -> Result<Certificate> {
    let target = binomial_entropy(n, 0.5)?;
    let mut cert = Certificate {
        n,
        trials: outcomes.len(),
        seed,
        worst_gap_bits: f64::INFINITY,
        all_converged: true,
        worst_final_p: Vec::new(),
        target_entropy: target,
        max_final_distance: -1.0,
        max_final_entropy_error: 0.0,
        worst_final_entropy: target,
        all_monotone: true,
    };
    for o in outcomes {
        cert.worst_gap_bits = cert.worst_gap_bits.min(o.gap_bits);
        cert.all_converged &= o.converged;
        cert.all_monotone &= o.ascent_monotone;
        let distance = (o.final_value - 0.5).abs();
        if distance > cert.max_final_distance {
            cert.max_final_distance = distance;
            cert.worst_final_p = vec![o.final_value; n];
        }
        let err = (o.final_entropy - target).abs();
        if err > cert.max_final_entropy_error {
            cert.max_final_entropy_error = err;
            cert.worst_final_entropy = o.final_entropy;
        }
    }
    Ok(cert)
}

/// Certifies the all-½ maximum for length-`n` vectors over `trials` seeded
/// random starts. Trial `i` draws from [`trial_rng`]`(seed, i)`.
pub fn certify_lindstrom(n: usize, trials: usize, seed: u64) -> Result<Certificate> {
    check_run(n, trials)?;
    let outcomes = (0..trials)
        .map(|t| run_trial(n, seed, t))
        .collect::<Result<Vec<_>>>()?;
    summarize(n, seed, &outcomes)
}

/// [`certify_lindstrom`] with trials spread over the rayon pool. The output
/// is identical to the sequential run.
pub fn certify_lindstrom_parallel(n: usize, trials: usize, seed: u64) -> Result<Certificate> {
    check_run(n, trials)?;
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(n, seed, t))
        .collect::<Result<Vec<_>>>()?;
    summarize(n, seed, &outcomes)
}

/// Largest excess of `H(Z_p)` over `H_n(1/2)` among random samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    /// `max_p H(Z_p) - H_n(1/2)`; at most [`DOMINANCE_SLACK`] when the bound holds.
    pub max_excess_bits: f64,
    pub witness: Vec<f64>,
}

impl DominanceReport {
    pub fn holds(&self) -> bool {
        self.max_excess_bits <= DOMINANCE_SLACK
    }
}

/// Samples `samples` random interior vectors of length `n` from one seeded
/// stream and compares their entropy with `H_n(1/2)`.
pub fn dominance_check(n: usize, samples: usize, seed: u64) -> Result<DominanceReport> {
    check_run(n, samples)?;
    let target = binomial_entropy(n, 0.5)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = DominanceReport {
        n,
        samples,
        seed,
        max_excess_bits: f64::NEG_INFINITY,
        witness: Vec::new(),
    };
    for _ in 0..samples {
        let p = sample_interior(n, &mut rng);
        let excess = entropy_bits(&pmf_dp(&p)) - target;
        if excess > report.max_excess_bits {
            report.max_excess_bits = excess;
            report.witness = p.into_inner();
        }
    }
    Ok(report)
}
