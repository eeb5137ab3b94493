//! Capacity region of the `s`-user multiple access adder channel.
//!
//! Each user sends one bit and the receiver sees `Y = X_1 + ... + X_s`. A
//! rate tuple is achievable iff `Σ_{i∈A} R_i <= H_{|A|}(1/2)` for every
//! nonempty `A ⊆ [s]`. The bound depends on `A` only through `|A|`, so the
//! region is stored as one constraint per subset size.

use std::fmt::Write as _;

use serde::Deserialize;

use crate::entcalc::{binomial_entropy, entropy_bits};
use crate::fmt::g17;
use crate::pbin::{pmf_dp, ProbVector};
use crate::{Error, Result};

/// Largest supported user count.
pub const MAX_USERS: usize = 64;
/// Largest `s` accepted by [`is_member_naive`].
pub const NAIVE_LIMIT: usize = 20;
/// Largest `s` for the enumerated mutual-information route.
pub const ENUMERATION_LIMIT: usize = 24;
/// Default slack for membership tests; the region is closed.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Rates `(R_1, ..., R_s)` in bits per transmission.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTuple(Vec<f64>);

impl RateTuple {
    /// Rejects negative or non-finite rates.
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        for (index, &value) in rates.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidRate { index, value });
            }
        }
        Ok(Self(rates))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `R(A) <= bound_bits` for every `A` with `|A| = subset_size`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct RegionConstraint {
    pub subset_size: usize,
    pub bound_bits: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityRegion {
    s: usize,
    constraints: Vec<RegionConstraint>,
}

impl CapacityRegion {
    pub fn users(&self) -> usize {
        self.s
    }

    pub fn constraints(&self) -> &[RegionConstraint] {
        &self.constraints
    }

    /// `H_j(1/2)` for `j = 1..=s`.
    pub fn bound(&self, subset_size: usize) -> f64 {
        self.constraints[subset_size - 1].bound_bits
    }

    /// Builds a region from explicit constraints, checking one constraint
    /// per size `1..=s` in order with bounds positive, at most `j`, and
    /// strictly increasing.
    pub fn from_constraints(s: usize, constraints: Vec<RegionConstraint>) -> Result<Self> {
        check_users(s)?;
        if constraints.len() != s {
            return Err(Error::DimensionMismatch {
                expected: s,
                got: constraints.len(),
            });
        }
        let mut previous = 0.0;
        for (i, c) in constraints.iter().enumerate() {
            let j = i + 1;
            if c.subset_size != j {
                return Err(Error::Parse(format!(
                    "constraint {j} has subset_size {}",
                    c.subset_size
                )));
            }
            if !(c.bound_bits.is_finite() && c.bound_bits > previous && c.bound_bits <= j as f64) {
                return Err(Error::Parse(format!(
                    "bound {} for subset size {j} is not in ({previous}, {j}]",
                    c.bound_bits
                )));
            }
            previous = c.bound_bits;
        }
        Ok(Self { s, constraints })
    }

    /// Parses the JSON produced by [`export_region`].
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            s: usize,
            constraints: Vec<RegionConstraint>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_constraints(raw.s, raw.constraints)
    }

    /// Parses the CSV produced by [`export_region`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(CSV_HEADER) => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header {CSV_HEADER:?}, got {other:?}"
                )))
            }
        }
        let constraints = lines
            .map(|line| {
                let (j, b) = line
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("malformed row {line:?}")))?;
                let subset_size = j
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad subset size {j:?}")))?;
                let bound_bits = b
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad bound {b:?}")))?;
                Ok(RegionConstraint {
                    subset_size,
                    bound_bits,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_constraints(constraints.len(), constraints)
    }
}

fn check_users(s: usize) -> Result<()> {
    if !(1..=MAX_USERS).contains(&s) {
        return Err(Error::InvalidUserCount(s));
    }
    Ok(())
}

/// The capacity region for `s` users: bound `H_j(1/2)` for each size `j`.
pub fn build_region(s: usize) -> Result<CapacityRegion> {
    check_users(s)?;
    let constraints = (1..=s)
        .map(|j| RegionConstraint {
            subset_size: j,
            bound_bits: sum_rate_bound(j),
        })
        .collect();
    Ok(CapacityRegion { s, constraints })
}

/// `H_s(1/2)`, the largest achievable total rate for `s` users.
pub fn sum_rate_bound(s: usize) -> f64 {
    binomial_entropy(s, 0.5).expect("1/2 is a probability")
}

/// A violated constraint: the `subset_size` largest rates exceed their bound
/// by `margin` bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub subset_size: usize,
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// The most violated constraint, absent for members.
    pub violation: Option<Violation>,
}

fn check_dims(region: &CapacityRegion, r: &RateTuple, tol: f64) -> Result<()> {
    if r.len() != region.s {
        return Err(Error::DimensionMismatch {
            expected: region.s,
            got: r.len(),
        });
    }
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    Ok(())
}

/// Membership via sorted prefix sums: among subsets of size `j` the `j`
/// largest rates have the largest sum, so `s` checks replace `2^s - 1`.
pub fn is_member(region: &CapacityRegion, r: &RateTuple, tol: f64) -> Result<Membership> {
    check_dims(region, r, tol)?;
    let mut sorted = r.as_slice().to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut prefix = 0.0;
    let mut violation: Option<Violation> = None;
    for (c, rate) in region.constraints.iter().zip(&sorted) {
        prefix += rate;
        let margin = prefix - c.bound_bits;
        if margin > tol && violation.is_none_or(|v| margin > v.margin) {
            violation = Some(Violation {
                subset_size: c.subset_size,
                margin,
            });
        }
    }
    Ok(Membership {
        member: violation.is_none(),
        violation,
    })
}

/// Membership by checking every nonempty subset. Reference for [`is_member`].
pub fn is_member_naive(region: &CapacityRegion, r: &RateTuple, tol: f64) -> Result<bool> {
    check_dims(region, r, tol)?;
    let s = region.s;
    if s > NAIVE_LIMIT {
        return Err(Error::TooLarge {
            size: s,
            limit: NAIVE_LIMIT,
        });
    }
    let rates = r.as_slice();
    for mask in 1u32..(1u32 << s) {
        let sum: f64 = (0..s)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| rates[i])
            .sum();
        if sum > region.bound(mask.count_ones() as usize) + tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Both evaluations of `I(X(A); Y | X(A^c))` for independent
/// `X_i ~ Bernoulli(p_i)` into the adder channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutualInformation {
    /// `H(Σ_{i∈A} X_i)`.
    pub closed_form: f64,
    /// `H(Y | X(A^c))` from the enumerated joint law.
    pub enumerated: f64,
}

fn check_subset(subset: &[usize], s: usize) -> Result<Vec<bool>> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut inside = vec![false; s];
    for &i in subset {
        if i >= s {
            return Err(Error::IndexOutOfRange { index: i, len: s });
        }
        if std::mem::replace(&mut inside[i], true) {
            return Err(Error::DuplicateIndex(i));
        }
    }
    Ok(inside)
}

/// `I(X(A); Y | X(A^c)) = H(Σ_{i∈A} X_i)`, in bits.
pub fn conditional_mutual_info(p: &ProbVector, subset: &[usize]) -> Result<f64> {
    let inside = check_subset(subset, p.len())?;
    Ok(closed_form(p, &inside))
}

fn closed_form(p: &ProbVector, inside: &[bool]) -> f64 {
    let restricted = p
        .as_slice()
        .iter()
        .zip(inside)
        .filter(|(_, &a)| a)
        .map(|(&v, _)| v)
        .collect();
    let restricted = ProbVector::new(restricted).expect("subvector of a probability vector");
    entropy_bits(&pmf_dp(&restricted))
}

/// Computes [`conditional_mutual_info`] and, independently, the same
/// quantity from the joint law of `(X(A^c), X(A), Y)` enumerated over all
/// `2^s` inputs.
pub fn conditional_mutual_info_routes(
    p: &ProbVector,
    subset: &[usize],
) -> Result<MutualInformation> {
    let s = p.len();
    let inside = check_subset(subset, s)?;
    if s > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            size: s,
            limit: ENUMERATION_LIMIT,
        });
    }
    let probs = p.as_slice();
    let outside: Vec<usize> = (0..s).filter(|&i| !inside[i]).collect();
    let members: Vec<usize> = (0..s).filter(|&i| inside[i]).collect();
    let prob_of = |indices: &[usize], bits: u32| -> f64 {
        indices
            .iter()
            .enumerate()
            .map(|(j, &i)| {
                if bits >> j & 1 == 1 {
                    probs[i]
                } else {
                    1.0 - probs[i]
                }
            })
            .product()
    };

    // I(X(A); Y | X(A^c)) = H(Y | X(A^c)) - H(Y | X(A), X(A^c)), and the
    // second term vanishes because Y is a function of the full input.
    // H(Y | X(A^c)) = Σ_x Pr(X(A^c) = x) H(Y | X(A^c) = x).
    let mut h_given_outside = 0.0;
    let mut conditional = vec![0.0; s + 1];
    for xc in 0u32..(1u32 << outside.len()) {
        conditional.iter_mut().for_each(|m| *m = 0.0);
        for xa in 0u32..(1u32 << members.len()) {
            let y = (xc.count_ones() + xa.count_ones()) as usize;
            conditional[y] += prob_of(&members, xa);
        }
        h_given_outside += prob_of(&outside, xc) * plain_entropy(&conditional);
    }
    Ok(MutualInformation {
        closed_form: closed_form(p, &inside),
        enumerated: h_given_outside,
    })
}

fn plain_entropy(mass: &[f64]) -> f64 {
    mass.iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| -m * m.log2())
        .sum()
}

/// Export encodings for [`export_region`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionFormat {
    Json,
    Csv,
}

pub const CSV_HEADER: &str = "subset_size,bound_bits";

/// Renders the constraint list. Bounds use 17 significant digits, so the
/// output parses back to the identical region.
///
/// JSON: `{"s": 2, "constraints": [{"subset_size": 1, "bound_bits": 1}, ...]}`
/// without a trailing newline. CSV: header line, then `j,bound` rows, each
/// terminated by `\n`.
pub fn export_region(region: &CapacityRegion, format: RegionFormat) -> String {
    let mut out = String::new();
    match format {
        RegionFormat::Json => {
            write!(out, "{{\"s\": {}, \"constraints\": [", region.s).unwrap();
            for (i, c) in region.constraints.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write!(
                    out,
                    "{{\"subset_size\": {}, \"bound_bits\": {}}}",
                    c.subset_size,
                    g17(c.bound_bits)
                )
                .unwrap();
            }
            out.push_str("]}");
        }
        RegionFormat::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for c in &region.constraints {
                writeln!(out, "{},{}", c.subset_size, g17(c.bound_bits)).unwrap();
            }
        }
    }
    out
}
