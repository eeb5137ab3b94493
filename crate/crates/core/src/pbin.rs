//! The Poisson-binomial distribution `b(k, p)`: the law of `Z = X_1 + ... + X_n`
//! for independent `X_i ~ Bernoulli(p_i)`.

use std::collections::BTreeSet;

use crate::{Error, Result};

/// Largest `n` accepted by [`pmf_bruteforce`].
pub const BRUTEFORCE_LIMIT: usize = 24;

/// Success probabilities `(p_1, ..., p_n)`, each in `[0, 1]`.
///
/// The empty vector is valid and describes the empty sum `Z = 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        for (index, &value) in probs.iter().enumerate() {
            // NaN fails the range check as well.
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::ProbabilityOutOfRange { index, value });
            }
        }
        Ok(Self(probs))
    }

    /// The vector `(p, ..., p)` of length `n`.
    pub fn constant(n: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; n])
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

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Checks `margin <= p_i <= 1 - margin` for every coordinate.
    pub fn ensure_interior(&self, margin: f64) -> Result<()> {
        for (index, &value) in self.0.iter().enumerate() {
            if value < margin || value > 1.0 - margin {
                return Err(Error::NotInterior {
                    index,
                    value,
                    margin,
                });
            }
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for ProbVector {
    type Error = Error;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Self::new(probs)
    }
}

impl AsRef<[f64]> for ProbVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Probability mass function on `{0, ..., n}`.
///
/// Queries outside the support return exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    mass: Vec<f64>,
}

impl Pmf {
    /// Wraps raw masses. The caller is responsible for nonnegativity and
    /// normalization; `masses` must be nonempty.
    pub fn from_masses(masses: Vec<f64>) -> Self {
        assert!(!masses.is_empty(), "a pmf needs at least one mass");
        Self { mass: masses }
    }

    /// Point mass at zero, the law of the empty sum.
    pub fn point_mass() -> Self {
        Self { mass: vec![1.0] }
    }

    /// Largest value in the support.
    pub fn support_size(&self) -> usize {
        self.mass.len() - 1
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    /// `Pr(Z = k)`, zero for `k < 0` or `k > n`.
    pub fn get(&self, k: isize) -> f64 {
        if k < 0 {
            return 0.0;
        }
        self.mass.get(k as usize).copied().unwrap_or(0.0)
    }

    /// `f(k) - f(k - 1)`.
    pub fn difference(&self, k: isize) -> f64 {
        self.get(k) - self.get(k - 1)
    }

    /// `f(k) - 2 f(k - 1) + f(k - 2)`.
    pub fn second_difference(&self, k: isize) -> f64 {
        self.get(k) - 2.0 * self.get(k - 1) + self.get(k - 2)
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }
}

/// Positions to drop from a [`ProbVector`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LeaveOutSet(BTreeSet<usize>);

impl LeaveOutSet {
    /// Rejects repeated positions.
    pub fn new<I: IntoIterator<Item = usize>>(indices: I) -> Result<Self> {
        let mut set = BTreeSet::new();
        for i in indices {
            if !set.insert(i) {
                return Err(Error::DuplicateIndex(i));
            }
        }
        Ok(Self(set))
    }

    pub fn single(index: usize) -> Self {
        Self(BTreeSet::from([index]))
    }

    pub fn pair(l: usize, m: usize) -> Result<Self> {
        Self::new([l, m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.contains(&index)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }
}

/// `b(., p)` by sequential convolution with each Bernoulli law.
///
/// The update runs right to left in place, so the arithmetic order is fixed
/// and results are bit-reproducible.
pub fn pmf_dp(p: &ProbVector) -> Pmf {
    let n = p.len();
    let mut mass = Vec::with_capacity(n + 1);
    mass.push(1.0);
    for (i, &pi) in p.as_slice().iter().enumerate() {
        let qi = 1.0 - pi;
        mass.push(mass[i] * pi);
        for k in (1..=i).rev() {
            mass[k] = mass[k] * qi + mass[k - 1] * pi;
        }
        mass[0] *= qi;
    }
    Pmf { mass }
}

/// `b(., p)` by enumerating all `2^n` outcomes. Reference oracle for [`pmf_dp`].
pub fn pmf_bruteforce(p: &ProbVector) -> Result<Pmf> {
    let n = p.len();
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::TooLarge {
            size: n,
            limit: BRUTEFORCE_LIMIT,
        });
    }
    let probs = p.as_slice();
    let mut mass = vec![0.0; n + 1];
    for outcome in 0u32..(1u32 << n) {
        let weight: f64 = probs
            .iter()
            .enumerate()
            .map(|(i, &pi)| if outcome >> i & 1 == 1 { pi } else { 1.0 - pi })
            .product();
        mass[outcome.count_ones() as usize] += weight;
    }
    Ok(Pmf { mass })
}

/// The subvector of `p` with the positions in `set` removed, order preserved.
pub fn leave_out(p: &ProbVector, set: &LeaveOutSet) -> Result<ProbVector> {
    let len = p.len();
    if let Some(index) = set.iter().find(|&i| i >= len) {
        return Err(Error::IndexOutOfRange { index, len });
    }
    let kept = p
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(i, _)| !set.contains(*i))
        .map(|(_, &v)| v)
        .collect();
    Ok(ProbVector(kept))
}

/// `Δf(k) = f(k) - f(k-1)` for `k = 0..=n+1`; the values sum to zero.
pub fn forward_difference(f: &Pmf) -> Vec<f64> {
    let top = f.support_size() as isize + 1;
    (0..=top).map(|k| f.difference(k)).collect()
}

/// `C(n, k) p^k (1-p)^(n-k)`.
pub fn binomial_pmf(n: usize, p: f64) -> Result<Pmf> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange { index: 0, value: p });
    }
    let mut mass = vec![0.0; n + 1];
    if p == 0.0 {
        mass[0] = 1.0;
    } else if p == 1.0 {
        mass[n] = 1.0;
    } else {
        let ln_p = p.ln();
        let ln_q = (-p).ln_1p();
        // ln C(n, k) accumulated as ln C(n, k-1) + ln(n-k+1) - ln k.
        let mut ln_choose = 0.0;
        for (k, m) in mass.iter_mut().enumerate() {
            if k > 0 {
                ln_choose += ((n - k + 1) as f64).ln() - (k as f64).ln();
            }
            *m = (ln_choose + k as f64 * ln_p + (n - k) as f64 * ln_q).exp();
        }
    }
    Ok(Pmf { mass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[f64]) -> ProbVector {
        ProbVector::new(v.to_vec()).unwrap()
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len(), "{a:?} vs {b:?}");
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn dp_examples() {
        assert_close(pmf_dp(&pv(&[0.5, 0.5])).masses(), &[0.25, 0.5, 0.25], 1e-15);
        assert_close(pmf_dp(&pv(&[0.5, 0.3])).masses(), &[0.35, 0.5, 0.15], 1e-15);
        assert_eq!(pmf_dp(&pv(&[])).masses(), &[1.0]);
    }

    #[test]
    fn bruteforce_examples() {
        assert_close(
            pmf_bruteforce(&pv(&[0.5, 0.3])).unwrap().masses(),
            &[0.35, 0.5, 0.15],
            1e-15,
        );
        assert_eq!(
            pmf_bruteforce(&pv(&[1.0, 1.0, 1.0])).unwrap().masses(),
            &[0.0, 0.0, 0.0, 1.0]
        );
        assert_eq!(pmf_bruteforce(&pv(&[0.0])).unwrap().masses(), &[1.0, 0.0]);
    }

    #[test]
    fn bruteforce_guard() {
        let p = ProbVector::constant(25, 0.5).unwrap();
        assert_eq!(
            pmf_bruteforce(&p),
            Err(Error::TooLarge {
                size: 25,
                limit: 24
            })
        );
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(
            ProbVector::new(vec![0.2, 1.5]),
            Err(Error::ProbabilityOutOfRange { index: 1, .. })
        ));
        assert!(ProbVector::new(vec![-0.0]).is_ok());
        assert!(ProbVector::new(vec![f64::NAN]).is_err());
        assert!(binomial_pmf(3, -0.1).is_err());
    }

    #[test]
    fn out_of_range_queries_are_zero() {
        let f = pmf_dp(&pv(&[0.3, 0.6]));
        assert_eq!(f.get(-1), 0.0);
        assert_eq!(f.get(3), 0.0);
        assert_eq!(f.get(100), 0.0);
    }

    #[test]
    fn leave_out_examples() {
        let p = pv(&[0.1, 0.2, 0.3]);
        assert_eq!(
            leave_out(&p, &LeaveOutSet::single(1)).unwrap(),
            pv(&[0.1, 0.3])
        );
        let p = pv(&[0.1, 0.2]);
        assert_eq!(
            leave_out(&p, &LeaveOutSet::new([0, 1]).unwrap()).unwrap(),
            pv(&[])
        );
        let p = pv(&[0.4, 0.5, 0.6]);
        assert_eq!(leave_out(&p, &LeaveOutSet::default()).unwrap(), p);
    }

    #[test]
    fn leave_out_errors() {
        assert_eq!(LeaveOutSet::new([1, 1]), Err(Error::DuplicateIndex(1)));
        let p = pv(&[0.1, 0.2]);
        assert_eq!(
            leave_out(&p, &LeaveOutSet::single(2)),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        );
    }

    #[test]
    fn forward_difference_examples() {
        let f = Pmf::from_masses(vec![0.25, 0.5, 0.25]);
        assert_eq!(forward_difference(&f), vec![0.25, 0.25, -0.25, -0.25]);
        assert_eq!(forward_difference(&Pmf::point_mass()), vec![1.0, -1.0]);
        let g = pmf_dp(&pv(&[0.13, 0.71, 0.42, 0.9]));
        assert!(forward_difference(&g).iter().sum::<f64>().abs() < 1e-15);
    }

    #[test]
    fn binomial_examples() {
        assert_close(
            binomial_pmf(2, 0.5).unwrap().masses(),
            &[0.25, 0.5, 0.25],
            1e-15,
        );
        assert_close(
            binomial_pmf(3, 0.5).unwrap().masses(),
            &[0.125, 0.375, 0.375, 0.125],
            1e-15,
        );
        assert_eq!(binomial_pmf(0, 0.7).unwrap().masses(), &[1.0]);
        assert_eq!(binomial_pmf(2, 1.0).unwrap().masses(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn binomial_matches_dp_on_constant_vectors() {
        for n in [1, 5, 17, 40, 64] {
            for p in [0.01, 0.3, 0.5, 0.77] {
                let dp = pmf_dp(&ProbVector::constant(n, p).unwrap());
                let closed = binomial_pmf(n, p).unwrap();
                assert_close(dp.masses(), closed.masses(), 1e-12);
            }
        }
    }

    #[test]
    fn boundary_identities() {
        let p = pv(&[0.2, 0.45, 0.9, 0.61]);
        let f = pmf_dp(&p);
        let prod_q: f64 = p.as_slice().iter().map(|x| 1.0 - x).product();
        let prod_p: f64 = p.as_slice().iter().product();
        assert!((f.get(0) - prod_q).abs() < 1e-14);
        assert!((f.get(4) - prod_p).abs() < 1e-14);
    }

    #[test]
    fn interior_check() {
        let p = pv(&[0.5, 1e-10]);
        assert!(matches!(
            p.ensure_interior(1e-9),
            Err(Error::NotInterior { index: 1, .. })
        ));
        assert!(pv(&[1e-9, 0.5]).ensure_interior(1e-9).is_ok());
    }
}
