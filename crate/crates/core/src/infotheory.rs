//! Shannon-information toolkit for finite distributions, the privacy-leakage
//! functional in both of its printed forms, the σ-informative predicate, and
//! the probabilistic-implication estimator with a one-sided Wilson bound.
//!
//! Conventions: logarithms are base 2 everywhere, 0·log 0 = 0, and terms with
//! zero conditioning probability are skipped.

use thiserror::Error;

/// Normalization tolerance for distributions.
pub const NORM_TOL: f64 = 1e-12;

/// One-sided 99% normal quantile used by every Wilson upper bound.
pub const Z_99: f64 = 2.326_347_874_040_841;

/// Errors from information-theoretic computations.
#[derive(Debug, Error, PartialEq)]
pub enum InfoError {
    #[error("distribution not normalized: total probability {0}")]
    NotNormalized(f64),
    #[error("negative probability {0}")]
    NegativeProbability(f64),
    #[error("support violation: {0}")]
    SupportViolation(String),
}

/// A finite probability distribution over indexed outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution {
    probs: Vec<f64>,
}

impl FiniteDistribution {
    /// Wraps a probability vector, checking normalization.
    pub fn new(probs: Vec<f64>) -> Result<Self, InfoError> {
        for &p in &probs {
            if p < 0.0 {
                return Err(InfoError::NegativeProbability(p));
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(InfoError::NotNormalized(total));
        }
        Ok(FiniteDistribution { probs })
    }

    /// Uniform distribution over `n` outcomes.
    pub fn uniform(n: usize) -> Self {
        FiniteDistribution {
            probs: vec![1.0 / n as f64; n],
        }
    }

    /// The probability vector.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// A joint distribution over two finite variables, stored row-major as
/// p(x, y) with x indexing rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Joint2 {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl Joint2 {
    /// Wraps a joint table, checking normalization.
    pub fn new(rows: usize, cols: usize, probs: Vec<f64>) -> Result<Self, InfoError> {
        assert_eq!(probs.len(), rows * cols);
        for &p in &probs {
            if p < 0.0 {
                return Err(InfoError::NegativeProbability(p));
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(InfoError::NotNormalized(total));
        }
        Ok(Joint2 { rows, cols, probs })
    }

    /// p(x, y).
    pub fn p(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.cols + y]
    }

    /// Marginal over the first variable.
    pub fn marginal_x(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|x| (0..self.cols).map(|y| self.p(x, y)).sum())
            .collect()
    }

    /// Marginal over the second variable.
    pub fn marginal_y(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|y| (0..self.rows).map(|x| self.p(x, y)).sum())
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }
}

/// A joint distribution over three finite variables, p(x, y, z).
#[derive(Debug, Clone, PartialEq)]
pub struct Joint3 {
    nx: usize,
    ny: usize,
    nz: usize,
    probs: Vec<f64>,
}

impl Joint3 {
    /// Wraps a joint table, checking normalization.
    pub fn new(nx: usize, ny: usize, nz: usize, probs: Vec<f64>) -> Result<Self, InfoError> {
        assert_eq!(probs.len(), nx * ny * nz);
        for &p in &probs {
            if p < 0.0 {
                return Err(InfoError::NegativeProbability(p));
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(InfoError::NotNormalized(total));
        }
        Ok(Joint3 { nx, ny, nz, probs })
    }

    /// p(x, y, z).
    pub fn p(&self, x: usize, y: usize, z: usize) -> f64 {
        self.probs[(x * self.ny + y) * self.nz + z]
    }

    /// The (x, (y,z)) flattening, for I(X; Y,Z).
    pub fn group_yz(&self) -> Joint2 {
        Joint2 {
            rows: self.nx,
            cols: self.ny * self.nz,
            probs: self.probs.clone(),
        }
    }

    /// The (x, z) marginal.
    pub fn marginal_xz(&self) -> Joint2 {
        let mut probs = vec![0.0; self.nx * self.nz];
        for x in 0..self.nx {
            for y in 0..self.ny {
                for z in 0..self.nz {
                    probs[x * self.nz + z] += self.p(x, y, z);
                }
            }
        }
        Joint2 {
            rows: self.nx,
            cols: self.nz,
            probs,
        }
    }
}

fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

/// Shannon entropy H(X) in bits.
pub fn entropy(dist: &FiniteDistribution) -> f64 {
    -dist.probs.iter().map(|&p| plogp(p)).sum::<f64>()
}

/// Conditional entropy H(X|Y) from a joint p(x, y).
pub fn cond_entropy(joint: &Joint2) -> f64 {
    let py = joint.marginal_y();
    let mut h = 0.0;
    for y in 0..joint.cols {
        if py[y] <= 0.0 {
            continue;
        }
        for x in 0..joint.rows {
            let p = joint.p(x, y);
            if p > 0.0 {
                h -= p * (p / py[y]).log2();
            }
        }
    }
    h
}

/// Mutual information I(X;Y) = H(X) − H(X|Y).
pub fn mutual_info(joint: &Joint2) -> f64 {
    let px = FiniteDistribution {
        probs: joint.marginal_x(),
    };
    entropy(&px) - cond_entropy(joint)
}

/// Conditional mutual information I(X;Y|Z) = Σ_z p(z) I(X;Y | Z=z).
pub fn cond_mutual_info(joint: &Joint3) -> f64 {
    let mut total = 0.0;
    for z in 0..joint.nz {
        let pz: f64 = (0..joint.nx)
            .flat_map(|x| (0..joint.ny).map(move |y| (x, y)))
            .map(|(x, y)| joint.p(x, y, z))
            .sum();
        if pz <= 0.0 {
            continue;
        }
        let slice: Vec<f64> = (0..joint.nx)
            .flat_map(|x| (0..joint.ny).map(move |y| (x, y)))
            .map(|(x, y)| joint.p(x, y, z) / pz)
            .collect();
        let sub = Joint2 {
            rows: joint.nx,
            cols: joint.ny,
            probs: slice,
        };
        total += pz * mutual_info(&sub);
    }
    total
}

/// One view row of an Eve-view joint: the view's probability, its key length
/// m(v), and the conditional key distribution p(k|v) over {0,1}^{m(v)}.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewRow {
    pub p_v: f64,
    pub m: usize,
    pub p_k_given_v: Vec<f64>,
}

fn check_views(views: &[ViewRow]) -> Result<(), InfoError> {
    let total: f64 = views.iter().map(|v| v.p_v).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(InfoError::NotNormalized(total));
    }
    for v in views {
        if v.p_k_given_v.len() != 1usize << v.m {
            return Err(InfoError::SupportViolation(format!(
                "view with m = {} carries {} conditional entries (expected {})",
                v.m,
                v.p_k_given_v.len(),
                1usize << v.m
            )));
        }
        let row: f64 = v.p_k_given_v.iter().sum();
        if v.p_v > 0.0 && (row - 1.0).abs() > 1e-9 {
            return Err(InfoError::NotNormalized(row));
        }
    }
    Ok(())
}

/// Privacy leakage, per-view form: Σ_{k,v} p(k,v)·(m(v) + log₂ p(k|v)).
///
/// Zero-length views contribute 0 (the key is the null string with
/// probability 1).
pub fn leakage_def1(views: &[ViewRow]) -> Result<f64, InfoError> {
    check_views(views)?;
    let mut total = 0.0;
    for v in views {
        if v.p_v <= 0.0 || v.m == 0 {
            continue;
        }
        for &pk in &v.p_k_given_v {
            if pk > 0.0 {
                total += v.p_v * pk * (v.m as f64 + pk.log2());
            }
        }
    }
    Ok(total)
}

/// Privacy leakage, grouped-by-length form: Σ_m p(m)·(m − H_m(k|v)),
/// where H_m(k|v) is the conditional key entropy restricted to views of
/// length m. Agrees with [`leakage_def1`] identically; both are exposed so
/// the two printed forms can be cross-validated.
pub fn leakage_def1_grouped(views: &[ViewRow]) -> Result<f64, InfoError> {
    check_views(views)?;
    let lengths: std::collections::BTreeSet<usize> = views.iter().map(|v| v.m).collect();
    let mut total = 0.0;
    for m in lengths {
        if m == 0 {
            continue;
        }
        let p_m: f64 = views.iter().filter(|v| v.m == m).map(|v| v.p_v).sum();
        if p_m <= 0.0 {
            continue;
        }
        let mut h_m = 0.0;
        for v in views.iter().filter(|v| v.m == m && v.p_v > 0.0) {
            let h_v = -v.p_k_given_v.iter().map(|&p| plogp(p)).sum::<f64>();
            h_m += v.p_v / p_m * h_v;
        }
        total += p_m * (m as f64 - h_m);
    }
    Ok(total)
}

/// Whether a conditional key distribution is σ-informative:
/// |p(k|v) − 2^{−m}| ≤ 2^{−m}·σ for every k.
pub fn sigma_informative(p_k_given_v: &[f64], m: usize, sigma: f64) -> bool {
    let u = (-(m as f64)).exp2();
    p_k_given_v.iter().all(|&p| (p - u).abs() <= u * sigma)
}

/// Boolean samples for estimating Pr(A ∧ ¬B).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventSample {
    /// Trials where A held and B failed.
    pub a_and_not_b: u64,
    /// Total trials.
    pub trials: u64,
}

impl EventSample {
    /// Tallies one trial.
    pub fn record(&mut self, a: bool, b: bool) {
        self.trials += 1;
        if a && !b {
            self.a_and_not_b += 1;
        }
    }
}

/// Point estimate plus one-sided 99% Wilson upper confidence bound for a
/// binomial proportion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProportionEstimate {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub wilson_upper: f64,
}

/// The one-sided 99% Wilson upper bound on a binomial proportion.
pub fn wilson_upper(successes: u64, trials: u64) -> f64 {
    assert!(trials >= 1, "Wilson bound needs at least one trial");
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_99 * Z_99;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let spread = Z_99 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center + spread) / denom).min(1.0)
}

/// Estimates Pr(A ∧ ¬B) from samples, with the Wilson upper bound attached.
pub fn prob_implication(samples: &EventSample) -> ProportionEstimate {
    ProportionEstimate {
        successes: samples.a_and_not_b,
        trials: samples.trials,
        estimate: samples.a_and_not_b as f64 / samples.trials as f64,
        wilson_upper: wilson_upper(samples.a_and_not_b, samples.trials),
    }
}

/// Chaining on implication slacks: if A ⇒_γ₁ B and B ⇒_γ₂ C then
/// A ⇒_{γ₁+γ₂} C; slacks add across each composition step.
pub fn chain_slacks(slacks: &[f64]) -> f64 {
    slacks.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_entropy_is_length() {
        for m in 1..6 {
            let d = FiniteDistribution::uniform(1 << m);
            assert!((entropy(&d) - m as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn independent_joint_has_zero_mutual_info() {
        // p(x,y) = p(x)q(y) over 3x4.
        let px = [0.2, 0.5, 0.3];
        let qy = [0.1, 0.4, 0.25, 0.25];
        let probs: Vec<f64> = px.iter().flat_map(|&a| qy.iter().map(move |&b| a * b)).collect();
        let j = Joint2::new(3, 4, probs).unwrap();
        assert!(mutual_info(&j).abs() < 1e-12);
    }

    #[test]
    fn information_nonneg_and_conditioning_reduces_entropy() {
        let mut state = 1u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (u32::MAX as f64 + 1.0)
        };
        for _ in 0..50 {
            let mut probs: Vec<f64> = (0..12).map(|_| next() + 1e-3).collect();
            let total: f64 = probs.iter().sum();
            probs.iter_mut().for_each(|p| *p /= total);
            let j = Joint2::new(3, 4, probs).unwrap();
            assert!(mutual_info(&j) >= -1e-12);
            let hx = entropy(&FiniteDistribution {
                probs: j.marginal_x(),
            });
            assert!(cond_entropy(&j) <= hx + 1e-12);
        }
    }

    #[test]
    fn chain_rule_identity_on_random_joints() {
        // I(X; Y,Z) = I(X;Y|Z) + I(X;Z) on random 4x4x4 joints.
        let mut state = 7u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (u32::MAX as f64 + 1.0)
        };
        for _ in 0..20 {
            let mut probs: Vec<f64> = (0..64).map(|_| next() + 1e-4).collect();
            let total: f64 = probs.iter().sum();
            probs.iter_mut().for_each(|p| *p /= total);
            let j = Joint3::new(4, 4, 4, probs).unwrap();
            let lhs = mutual_info(&j.group_yz());
            let rhs = cond_mutual_info(&j) + mutual_info(&j.marginal_xz());
            assert!((lhs - rhs).abs() < 1e-10, "chain rule gap {}", lhs - rhs);
        }
    }

    #[test]
    fn leakage_uniform_key_is_zero() {
        let views = vec![
            ViewRow {
                p_v: 0.6,
                m: 2,
                p_k_given_v: vec![0.25; 4],
            },
            ViewRow {
                p_v: 0.4,
                m: 1,
                p_k_given_v: vec![0.5, 0.5],
            },
        ];
        assert!(leakage_def1(&views).unwrap().abs() < 1e-15);
        assert!(leakage_def1_grouped(&views).unwrap().abs() < 1e-15);
    }

    #[test]
    fn leakage_deterministic_key_is_expected_length() {
        let views = vec![
            ViewRow {
                p_v: 0.7,
                m: 2,
                p_k_given_v: vec![0.0, 1.0, 0.0, 0.0],
            },
            ViewRow {
                p_v: 0.3,
                m: 3,
                p_k_given_v: vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
            },
        ];
        let expect = 0.7 * 2.0 + 0.3 * 3.0;
        assert!((leakage_def1(&views).unwrap() - expect).abs() < 1e-12);
        assert!((leakage_def1_grouped(&views).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn leakage_two_forms_agree_on_random_joints() {
        let mut state = 99u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (u32::MAX as f64 + 1.0)
        };
        for _ in 0..30 {
            let mut views = Vec::new();
            let mut mass = Vec::new();
            for _ in 0..6 {
                let m = (next() * 3.0) as usize; // 0..2
                let mut row: Vec<f64> = (0..1usize << m).map(|_| next() + 1e-3).collect();
                let t: f64 = row.iter().sum();
                row.iter_mut().for_each(|p| *p /= t);
                mass.push(next() + 1e-3);
                views.push(ViewRow {
                    p_v: 0.0,
                    m,
                    p_k_given_v: row,
                });
            }
            let t: f64 = mass.iter().sum();
            for (v, w) in views.iter_mut().zip(mass) {
                v.p_v = w / t;
            }
            let a = leakage_def1(&views).unwrap();
            let b = leakage_def1_grouped(&views).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn leakage_equals_conditional_mutual_info_for_uniform_keys() {
        // Two views of length m = 1 with skewed conditionals whose mixture
        // keeps the key marginal uniform; leakage must equal I(k; v | m)
        // (here m is constant, so that is I(k; v)).
        let views = vec![
            ViewRow {
                p_v: 0.5,
                m: 1,
                p_k_given_v: vec![0.8, 0.2],
            },
            ViewRow {
                p_v: 0.5,
                m: 1,
                p_k_given_v: vec![0.2, 0.8],
            },
        ];
        let leak = leakage_def1(&views).unwrap();
        let probs = vec![0.5 * 0.8, 0.5 * 0.2, 0.5 * 0.2, 0.5 * 0.8];
        let j = Joint2::new(2, 2, probs).unwrap();
        let i = mutual_info(&j);
        assert!((leak - i).abs() < 1e-12, "leakage {leak} vs I {i}");
    }

    #[test]
    fn sigma_informative_cases() {
        assert!(sigma_informative(&[0.25; 4], 2, 0.0));
        // One mass point is maximally informative.
        assert!(!sigma_informative(&[1.0, 0.0, 0.0, 0.0], 2, 2.9));
        assert!(sigma_informative(&[1.0, 0.0, 0.0, 0.0], 2, 3.0));
        // Threshold behavior at a crafted deviation.
        let sigma_star = 0.2;
        let u = 0.25;
        let row = [u * (1.0 + sigma_star), u * (1.0 - sigma_star), u, u];
        assert!(sigma_informative(&row, 2, sigma_star + 1e-12));
        assert!(!sigma_informative(&row, 2, sigma_star - 1e-9));
    }

    #[test]
    fn prob_implication_edge_cases() {
        let mut s = EventSample::default();
        for _ in 0..100 {
            s.record(false, false);
        }
        let est = prob_implication(&s);
        assert_eq!(est.estimate, 0.0);
        assert!(est.wilson_upper > 0.0 && est.wilson_upper < 0.1);

        let mut s = EventSample::default();
        for i in 0..100 {
            let a = i % 2 == 0;
            s.record(a, a); // A logically implies B
        }
        assert_eq!(prob_implication(&s).estimate, 0.0);
    }

    #[test]
    fn wilson_bound_monotone_in_successes() {
        let mut prev = 0.0;
        for k in 0..=20 {
            let w = wilson_upper(k, 1000);
            assert!(w > prev);
            prev = w;
        }
    }

    #[test]
    fn wilson_coverage_on_known_bernoulli() {
        // Known Pr(A and not B) = 0.05; the 99% upper bound should cover the
        // truth in at least ~99% of meta-trials.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(424242);
        let mut covered = 0;
        let meta = 1000;
        for _ in 0..meta {
            let mut s = EventSample::default();
            for _ in 0..400 {
                let hit = rng.random::<f64>() < 0.05;
                s.record(hit, false);
            }
            if prob_implication(&s).wilson_upper >= 0.05 {
                covered += 1;
            }
        }
        assert!(covered >= 985, "coverage {covered}/1000");
    }

    #[test]
    fn markov_style_mass_bound() {
        // For nonnegative a_y with sum <= mu and any q > 0, the p-mass of
        // {y : a_y >= q mu p(y)} is at most 1/q.
        let mut state = 3u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (u32::MAX as f64 + 1.0)
        };
        for _ in 0..50 {
            let n = 20;
            let mut p: Vec<f64> = (0..n).map(|_| next() + 1e-3).collect();
            let t: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= t);
            let mu = 0.3;
            let mut a: Vec<f64> = (0..n).map(|_| next()).collect();
            let ta: f64 = a.iter().sum();
            a.iter_mut().for_each(|x| *x *= mu / ta); // sum = mu exactly
            for &q in &[1.5, 2.0, 5.0, 10.0] {
                let mass: f64 = (0..n)
                    .filter(|&y| a[y] >= q * mu * p[y])
                    .map(|y| p[y])
                    .sum();
                assert!(mass <= 1.0 / q + 1e-12, "mass {mass} exceeds 1/{q}");
            }
        }
    }

    #[test]
    fn chaining_adds_slacks() {
        assert!((chain_slacks(&[0.01, 0.02, 0.005]) - 0.035).abs() < 1e-15);
    }
}
