//! Shannon entropy of a Bernoulli sum and its first and second derivatives.
//!
//! With `b(k) = b(k, p)` and `p^l` the vector with coordinate `l` removed,
//! the PMF is affine in each coordinate:
//!
//! ```text
//! ∂b(k)/∂p_l       = -Δ b(k, p^l)
//! ∂²b(k)/∂p_l∂p_m  =  Δ² b(k, p^{l,m})     (l != m)
//! ∂²b(k)/∂p_l²     =  0
//! ```
//!
//! from which, in bits,
//!
//! ```text
//! ∂H/∂p_l       =  Σ_k Δb(k, p^l) · log2 b(k)
//! ∂²H/∂p_l∂p_m  = -Σ_k Δ²b(k, p^{l,m}) · log2 b(k) - Σ_k Δb(k, p^l) Δb(k, p^m) / (ln2 · b(k))
//! ∂²H/∂p_l²     = -Σ_k (Δb(k, p^l))² / (ln2 · b(k))
//! ```
//!
//! All sums run over `k = 0..=n`. Every derivative requires `b(k) > 0`, so
//! the inputs must be strictly interior, see [`INTERIOR_MARGIN`].

use std::f64::consts::LN_2;

use crate::pbin::{leave_out, pmf_dp, LeaveOutSet, Pmf, ProbVector};
use crate::{Error, Result};

/// Minimum distance of every `p_i` from `{0, 1}` for derivative evaluation.
pub const INTERIOR_MARGIN: f64 = 1e-9;

/// `-Σ f(k) log2 f(k)` with `0 log 0 = 0`.
pub fn entropy_bits(f: &Pmf) -> f64 {
    let h: f64 = f
        .masses()
        .iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| -m * m.log2())
        .sum();
    // A point mass sums to -0.0.
    h.max(0.0)
}

/// `H_n(p)`, the entropy of `Binomial(n, p)` in bits.
pub fn binomial_entropy(n: usize, p: f64) -> Result<f64> {
    Ok(entropy_bits(&crate::pbin::binomial_pmf(n, p)?))
}

/// Gradient and full Hessian of `H(Z_p)` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyDerivatives {
    pub gradient: Vec<f64>,
    hessian: Vec<f64>,
    n: usize,
}

impl EntropyDerivatives {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `∂²H/∂p_l∂p_m` for `l != m`; symmetric in its arguments.
    pub fn hessian_offdiag(&self, l: usize, m: usize) -> f64 {
        assert_ne!(l, m, "use hessian_diag for diagonal entries");
        self.hessian[l * self.n + m]
    }

    /// `∂²H/∂p_l²`, never positive.
    pub fn hessian_diag(&self, l: usize) -> f64 {
        self.hessian[l * self.n + l]
    }

    pub fn hessian_entry(&self, l: usize, m: usize) -> f64 {
        self.hessian[l * self.n + m]
    }
}

/// The direction `u = e_l - e_m` along which `p_l + p_m` changes while the
/// other coordinates stay fixed. Requires `l < m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Direction {
    l: usize,
    m: usize,
}

impl Direction {
    pub fn new(l: usize, m: usize) -> Result<Self> {
        if l >= m {
            return Err(Error::InvalidDirection { l, m });
        }
        Ok(Self { l, m })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.m >= n {
            return Err(Error::IndexOutOfRange {
                index: self.m,
                len: n,
            });
        }
        Ok(())
    }
}

/// The two summands of `D²_u H`:
/// `2 Σ Δ²b(k, p^{l,m}) log2 b(k)` and `-Σ (Δb(k, p^l) - Δb(k, p^m))² / (ln2 b(k))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureTerms {
    pub log_term: f64,
    pub square_term: f64,
}

impl CurvatureTerms {
    pub fn total(&self) -> f64 {
        self.log_term + self.square_term
    }
}

/// The PMF of `p` and its logarithms, shared by every derivative formula.
struct Expansion {
    n: isize,
    mass: Vec<f64>,
    log2_mass: Vec<f64>,
}

impl Expansion {
    fn new(p: &ProbVector) -> Result<Self> {
        p.ensure_interior(INTERIOR_MARGIN)?;
        let pmf = pmf_dp(p);
        let mass = pmf.masses().to_vec();
        let log2_mass = mass.iter().map(|m| m.log2()).collect();
        Ok(Self {
            n: p.len() as isize,
            mass,
            log2_mass,
        })
    }

    fn ks(&self) -> impl Iterator<Item = (usize, isize)> {
        (0..=self.n).map(|k| (k as usize, k))
    }

    /// `Δb(k, p^l)` for `k = 0..=n`.
    fn first_differences(&self, p: &ProbVector, l: usize) -> Result<Vec<f64>> {
        let reduced = pmf_dp(&leave_out(p, &LeaveOutSet::single(l))?);
        Ok(self.ks().map(|(_, k)| reduced.difference(k)).collect())
    }

    /// `Δ²b(k, p^{l,m})` for `k = 0..=n`.
    fn second_differences(&self, p: &ProbVector, l: usize, m: usize) -> Result<Vec<f64>> {
        let reduced = pmf_dp(&leave_out(p, &LeaveOutSet::pair(l, m)?)?);
        Ok(self
            .ks()
            .map(|(_, k)| reduced.second_difference(k))
            .collect())
    }

    fn gradient_component(&self, dl: &[f64]) -> f64 {
        dl.iter().zip(&self.log2_mass).map(|(d, lb)| d * lb).sum()
    }

    fn offdiag(&self, d2: &[f64], dl: &[f64], dm: &[f64]) -> f64 {
        let log_part: f64 = d2.iter().zip(&self.log2_mass).map(|(d, lb)| d * lb).sum();
        let cross: f64 = self
            .ks()
            .map(|(k, _)| dl[k] * dm[k] / (LN_2 * self.mass[k]))
            .sum();
        -log_part - cross
    }

    fn diag(&self, dl: &[f64]) -> f64 {
        -self
            .ks()
            .map(|(k, _)| dl[k] * dl[k] / (LN_2 * self.mass[k]))
            .sum::<f64>()
    }
}

fn check_index(index: usize, len: usize) -> Result<()> {
    if index >= len {
        return Err(Error::IndexOutOfRange { index, len });
    }
    Ok(())
}

/// `∂H(Z_p)/∂p_l` for every `l`, in bits per unit probability.
pub fn entropy_gradient(p: &ProbVector) -> Result<Vec<f64>> {
    let exp = Expansion::new(p)?;
    (0..p.len())
        .map(|l| Ok(exp.gradient_component(&exp.first_differences(p, l)?)))
        .collect()
}

/// One entry of the Hessian of `H(Z_p)`.
pub fn entropy_hessian_entry(p: &ProbVector, l: usize, m: usize) -> Result<f64> {
    let exp = Expansion::new(p)?;
    check_index(l, p.len())?;
    check_index(m, p.len())?;
    let dl = exp.first_differences(p, l)?;
    if l == m {
        return Ok(exp.diag(&dl));
    }
    let dm = exp.first_differences(p, m)?;
    let d2 = exp.second_differences(p, l, m)?;
    Ok(exp.offdiag(&d2, &dl, &dm))
}

/// Gradient and Hessian together, sharing the leave-one-out PMFs.
pub fn entropy_derivatives(p: &ProbVector) -> Result<EntropyDerivatives> {
    let exp = Expansion::new(p)?;
    let n = p.len();
    let firsts = (0..n)
        .map(|l| exp.first_differences(p, l))
        .collect::<Result<Vec<_>>>()?;
    let gradient = firsts.iter().map(|dl| exp.gradient_component(dl)).collect();
    let mut hessian = vec![0.0; n * n];
    for l in 0..n {
        hessian[l * n + l] = exp.diag(&firsts[l]);
        for m in l + 1..n {
            let d2 = exp.second_differences(p, l, m)?;
            let h = exp.offdiag(&d2, &firsts[l], &firsts[m]);
            hessian[l * n + m] = h;
            hessian[m * n + l] = h;
        }
    }
    Ok(EntropyDerivatives {
        gradient,
        hessian,
        n,
    })
}

/// `D²_u H = ∂²H/∂p_l² - 2 ∂²H/∂p_l∂p_m + ∂²H/∂p_m²` for `u = e_l - e_m`.
pub fn directional_second_derivative(p: &ProbVector, d: Direction) -> Result<f64> {
    d.check(p.len())?;
    let exp = Expansion::new(p)?;
    let dl = exp.first_differences(p, d.l)?;
    let dm = exp.first_differences(p, d.m)?;
    let d2 = exp.second_differences(p, d.l, d.m)?;
    Ok(exp.diag(&dl) - 2.0 * exp.offdiag(&d2, &dl, &dm) + exp.diag(&dm))
}

/// `D²_u H` regrouped into its log-term and negative square term.
pub fn curvature_terms(p: &ProbVector, d: Direction) -> Result<CurvatureTerms> {
    d.check(p.len())?;
    let exp = Expansion::new(p)?;
    let dl = exp.first_differences(p, d.l)?;
    let dm = exp.first_differences(p, d.m)?;
    let d2 = exp.second_differences(p, d.l, d.m)?;
    let log_term = 2.0
        * d2.iter()
            .zip(&exp.log2_mass)
            .map(|(a, lb)| a * lb)
            .sum::<f64>();
    let square_term = -exp
        .ks()
        .map(|(k, _)| (dl[k] - dm[k]).powi(2) / (LN_2 * exp.mass[k]))
        .sum::<f64>();
    Ok(CurvatureTerms {
        log_term,
        square_term,
    })
}

/// Finite-difference references for the analytic derivatives.
///
/// These only ever evaluate `entropy_bits(pmf_dp(.))`. Perturbed points are
/// clamped into `[INTERIOR_MARGIN, 1 - INTERIOR_MARGIN]`.
pub mod oracle {
    use super::*;

    fn entropy_at(x: &[f64]) -> f64 {
        let p = ProbVector::new(x.to_vec()).expect("clamped point is a probability vector");
        entropy_bits(&pmf_dp(&p))
    }

    fn clamp(x: f64) -> f64 {
        x.clamp(INTERIOR_MARGIN, 1.0 - INTERIOR_MARGIN)
    }

    fn shifted(p: &ProbVector, moves: &[(usize, f64)]) -> Vec<f64> {
        let mut x = p.as_slice().to_vec();
        for &(i, delta) in moves {
            x[i] = clamp(x[i] + delta);
        }
        x
    }

    /// Central differences `(H(p + h e_l) - H(p - h e_l)) / 2h`.
    pub fn gradient(p: &ProbVector, h: f64) -> Vec<f64> {
        (0..p.len())
            .map(|l| {
                let plus = shifted(p, &[(l, h)]);
                let minus = shifted(p, &[(l, -h)]);
                (entropy_at(&plus) - entropy_at(&minus)) / (plus[l] - minus[l])
            })
            .collect()
    }

    /// Three-point stencil on the diagonal, four-point stencil off it.
    pub fn hessian_entry(p: &ProbVector, l: usize, m: usize, h: f64) -> f64 {
        if l == m {
            let f0 = entropy_at(p.as_slice());
            let fp = entropy_at(&shifted(p, &[(l, h)]));
            let fm = entropy_at(&shifted(p, &[(l, -h)]));
            return (fp - 2.0 * f0 + fm) / (h * h);
        }
        let fpp = entropy_at(&shifted(p, &[(l, h), (m, h)]));
        let fpm = entropy_at(&shifted(p, &[(l, h), (m, -h)]));
        let fmp = entropy_at(&shifted(p, &[(l, -h), (m, h)]));
        let fmm = entropy_at(&shifted(p, &[(l, -h), (m, -h)]));
        (fpp - fpm - fmp + fmm) / (4.0 * h * h)
    }

    /// Richardson combination `(4 D(h) - D(2h)) / 3` of [`hessian_entry`],
    /// cancelling the `h²` truncation term. On the diagonal this is the
    /// five-point stencil.
    pub fn hessian_entry_extrapolated(p: &ProbVector, l: usize, m: usize, h: f64) -> f64 {
        (4.0 * hessian_entry(p, l, m, h) - hessian_entry(p, l, m, 2.0 * h)) / 3.0
    }

    /// Curvature of `t -> H(p + t u)` at `t = 0`.
    pub fn line_curvature(p: &ProbVector, d: Direction, h: f64) -> f64 {
        let f0 = entropy_at(p.as_slice());
        let fp = entropy_at(&shifted(p, &[(d.l, h), (d.m, -h)]));
        let fm = entropy_at(&shifted(p, &[(d.l, -h), (d.m, h)]));
        (fp - 2.0 * f0 + fm) / (h * h)
    }
}
