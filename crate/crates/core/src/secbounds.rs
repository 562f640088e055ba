//! Closed-form finite-key security quantities.
//!
//! This module is pure scalar arithmetic: the binary entropy function and its
//! inverse, the ceiling-count threshold d₊, the Chernoff tail bound, the
//! fictive-test bound μ, the security-parameter chain
//! μ → γ → η, λ → ξ, σ → f, the fair key-length cap m^max, the maximum
//! tolerated error rate δ*, and the end-of-run validation constraints.

use thiserror::Error;

/// Bisection tolerance used by every 1-D root solve in this module.
pub const BISECT_TOL: f64 = 1e-12;

/// Errors from scalar bound computations.
#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("argument out of domain: {0}")]
    OutOfDomain(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// All tunable protocol parameters.
///
/// `p_E = 1 − p_T` throughout (every position is destined for the test side
/// or the key side). `delta` is the tolerated error rate, `beta` the
/// error-correction slack, `epsilon` the privacy slack, `tau` the random-code
/// slack, and `cap_slack` the headroom term (default 1/10) in the fair
/// key-length cap.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolParams {
    /// Number of photons sent.
    pub n_photons: usize,
    /// Tolerated error rate δ.
    pub delta: f64,
    /// Test probability p_T; the key-side probability is p_E = 1 − p_T.
    pub p_t: f64,
    /// Error-correction slack β.
    pub beta: f64,
    /// Privacy slack ε.
    pub epsilon: f64,
    /// Random-code slack τ.
    pub tau: f64,
    /// Floor on the key-side count n_E.
    pub n_e_min: usize,
    /// Floor on the sifted count n_Ω.
    pub n_omega_min: usize,
    /// Cap on the key length m.
    pub m_max: usize,
    /// Headroom Δ in the fair key-length cap (default 1/10).
    pub cap_slack: f64,
}

impl ProtocolParams {
    /// The key-side probability p_E = 1 − p_T.
    pub fn p_e(&self) -> f64 {
        1.0 - self.p_t
    }

    /// Validates the invariants (positivity, probabilities in range).
    pub fn check(&self) -> Result<(), BoundsError> {
        if !(self.delta > 0.0) {
            return Err(BoundsError::InvalidParams("delta must be positive".into()));
        }
        if !(self.p_t > 0.0 && self.p_t < 1.0) {
            return Err(BoundsError::InvalidParams("p_t must lie in (0,1)".into()));
        }
        for (name, v) in [
            ("beta", self.beta),
            ("epsilon", self.epsilon),
            ("tau", self.tau),
        ] {
            if !(v > 0.0) {
                return Err(BoundsError::InvalidParams(format!("{name} must be positive")));
            }
        }
        if !(self.cap_slack >= 0.0) {
            return Err(BoundsError::InvalidParams("cap_slack must be nonnegative".into()));
        }
        if self.n_e_min == 0 || self.n_omega_min == 0 {
            return Err(BoundsError::InvalidParams("floors must be positive".into()));
        }
        Ok(())
    }
}

impl Default for ProtocolParams {
    fn default() -> Self {
        ProtocolParams {
            n_photons: 2000,
            delta: 0.05,
            p_t: 0.5,
            beta: 0.05,
            epsilon: 0.01,
            tau: 0.01,
            n_e_min: 100,
            n_omega_min: 200,
            m_max: 0, // 0 means "derive from the fair estimates"; see config
            cap_slack: 0.1,
        }
    }
}

/// The security-parameter chain of scalars, from the fictive-test bound μ
/// down to the privacy parameter f.
#[derive(Debug, Clone, PartialEq)]
pub struct SecurityBundle {
    pub mu: f64,
    pub gamma: f64,
    pub eta: f64,
    pub lambda: f64,
    pub xi: f64,
    pub sigma: f64,
    pub f: f64,
}

/// Binary entropy H(p) = −p·log₂p − (1−p)·log₂(1−p), with 0·log 0 = 0.
pub fn binary_entropy(p: f64) -> Result<f64, BoundsError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(BoundsError::OutOfDomain(format!(
            "entropy argument {p} outside [0,1]"
        )));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-p * p.log2() - (1.0 - p) * (1.0 - p).log2())
}

/// The inverse of H on the increasing branch: the unique x ∈ [0, 1/2] with
/// H(x) = y, found by bisection to absolute tolerance 1e-12.
pub fn entropy_inv(y: f64) -> Result<f64, BoundsError> {
    if !(0.0..=1.0).contains(&y) {
        return Err(BoundsError::OutOfDomain(format!(
            "entropy_inv argument {y} outside [0,1]"
        )));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    if y == 1.0 {
        return Ok(0.5);
    }
    let mut lo = 0.0f64;
    let mut hi = 0.5f64;
    while hi - lo > BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid)? < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The error-count threshold d₊(y) = ⌈(δ + y)·p_E·n_Ω⌉.
///
/// The product is snapped to the nearest representable value before the
/// ceiling so that analytically integral products (e.g. 0.07·500 = 35) do not
/// round up from float noise one ulp above the integer.
pub fn d_plus(y: f64, delta: f64, p_e: f64, n_omega: usize) -> Result<usize, BoundsError> {
    if y < 0.0 || delta < 0.0 || !(0.0..=1.0).contains(&p_e) {
        return Err(BoundsError::OutOfDomain(
            "d_plus arguments must be nonnegative with p_E in [0,1]".into(),
        ));
    }
    let x = (delta + y) * p_e * n_omega as f64;
    Ok(ceil_snapped(x))
}

/// Ceiling with a 1e-9 snap-to-integer guard against float noise.
fn ceil_snapped(x: f64) -> usize {
    let nearest = x.round();
    if (x - nearest).abs() < 1e-9 {
        nearest as usize
    } else {
        x.ceil() as usize
    }
}

/// The two-sided Chernoff–Hoeffding tail bound exp(−2n·Δp²) for sums of n
/// independent Bernoulli variables deviating by Δp per sample.
pub fn chernoff_tail(n: usize, dp: f64) -> f64 {
    (-2.0 * n as f64 * dp * dp).exp()
}

/// Exact binomial upper tail Pr(S ≥ k) for S ~ Bin(n, p), by direct
/// summation in log space (stable for n up to a few thousand).
pub fn exact_binomial_upper_tail(n: usize, p: f64, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    (k..=n).map(|j| binomial_pmf(n, p, j)).sum()
}

/// Exact binomial lower tail Pr(S ≤ k).
pub fn exact_binomial_lower_tail(n: usize, p: f64, k: usize) -> f64 {
    if k >= n {
        return 1.0;
    }
    (0..=k).map(|j| binomial_pmf(n, p, j)).sum()
}

/// Binomial probability mass C(n,k) p^k (1−p)^{n−k} via log-gamma.
pub fn binomial_pmf(n: usize, p: f64, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let ln = ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln();
    ln.exp()
}

/// ln C(n, k) via the log-factorial recurrence (exact enough for n ≤ ~10^6).
pub fn ln_choose(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    let mut acc = 0.0f64;
    for i in 0..k {
        acc += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
    }
    acc
}

/// The fictive-test bound μ(β, n_D) together with its two proof components
/// μ_T and μ_E. Returns `(mu, mu_t, mu_e)` with `mu ≥ max(mu_t, mu_e)`.
pub fn mu_fictive(
    beta: f64,
    n_d: usize,
    delta: f64,
    p_t: f64,
    p_e: f64,
) -> Result<(f64, f64, f64), BoundsError> {
    if !(beta > 0.0) {
        return Err(BoundsError::OutOfDomain("beta must be positive".into()));
    }
    let denom = 2.0 * delta + beta;
    let b2 = beta * beta;
    let offset = 2.0 * b2 * p_e * p_e / (denom * denom);
    let p_min2 = (p_t * p_t).min(p_e * p_e);
    let mu = (-b2 * p_min2 / denom * n_d as f64 + offset).exp();
    let mu_t = (-b2 * p_t * p_t / denom * n_d as f64).exp();
    let mu_e = (-b2 * p_e * p_e / denom * n_d as f64 + offset).exp();
    Ok((mu, mu_t, mu_e))
}

/// The random-code failure bound λ = 2^{−τ·n_E^min} (the usage-consistent
/// form; see [`lambda_printed`] for the alternative
/// commonly quoted form).
pub fn lambda_code(tau: f64, n_e_min: usize) -> f64 {
    (-(tau * n_e_min as f64)).exp2()
}

/// The alternative λ = 2^{−m} sometimes quoted for the minimal-weight
/// bound; exposed so the Monte Carlo verifier can compare both candidates
/// empirically rather than guessing intent.
pub fn lambda_printed(m: usize) -> f64 {
    (-(m as f64)).exp2()
}

/// Computes the full security-parameter chain from the floors in `params`:
/// μ evaluated at (ε, n_Ω^min), γ = √μ, η = 2√γ + γ, λ = 2^{−τ n_E^min},
/// ξ = γ + λ + η + 2√(2η), σ = η + √(2η), f = σ/ln 2 + m^max·ξ.
pub fn security_bundle(params: &ProtocolParams) -> Result<SecurityBundle, BoundsError> {
    params.check()?;
    let (mu, _, _) = mu_fictive(
        params.epsilon,
        params.n_omega_min,
        params.delta,
        params.p_t,
        params.p_e(),
    )?;
    let gamma = mu.sqrt();
    let eta = 2.0 * gamma.sqrt() + gamma;
    let lambda = lambda_code(params.tau, params.n_e_min);
    let xi = gamma + lambda + eta + 2.0 * (2.0 * eta).sqrt();
    let sigma = eta + (2.0 * eta).sqrt();
    let f = sigma / std::f64::consts::LN_2 + params.m_max as f64 * xi;
    Ok(SecurityBundle {
        mu,
        gamma,
        eta,
        lambda,
        xi,
        sigma,
        f,
    })
}

/// The fair key-length cap
/// m^max = ⌊n_E^fair − r^fair − H(2·d₊^fair/n_E^fair)·n_E^fair + Δ·n_E^fair⌋,
/// clamped at 0 (no key).
pub fn m_max_fair(
    params: &ProtocolParams,
    n_e_fair: usize,
    r_fair: usize,
    d_plus_fair: usize,
) -> Result<usize, BoundsError> {
    if n_e_fair == 0 {
        return Ok(0);
    }
    let ratio = 2.0 * d_plus_fair as f64 / n_e_fair as f64;
    if ratio >= 1.0 {
        return Err(BoundsError::OutOfDomain(format!(
            "2 d_plus_fair / n_E_fair = {ratio} is >= 1; entropy undefined"
        )));
    }
    let n = n_e_fair as f64;
    let value = n - r_fair as f64 - binary_entropy(ratio)? * n + params.cap_slack * n;
    Ok(if value <= 0.0 { 0 } else { value.floor() as usize })
}

/// Fair (pre-run design) estimates of the sifted count, key-side count,
/// syndrome length, and error threshold, used to size m^max before any run.
#[derive(Debug, Clone, PartialEq)]
pub struct FairEstimates {
    pub n_omega_fair: usize,
    pub n_e_fair: usize,
    pub r_fair: usize,
    pub d_plus_fair: usize,
}

/// Default fair estimates: n_Ω^fair = N·p_detect/2 (half the detected photons
/// match bases), n_E^fair = p_E·n_Ω^fair, r^fair = ⌈H(min(δ+β, 1/2))·n_E^fair⌉
/// (Shannon-bound code sizing), d₊^fair = d₊(ε) at n_Ω^fair.
pub fn fair_estimates(params: &ProtocolParams, p_detect: f64) -> Result<FairEstimates, BoundsError> {
    let n_omega_fair = (params.n_photons as f64 * p_detect / 2.0).floor() as usize;
    let n_e_fair = (params.p_e() * n_omega_fair as f64).floor() as usize;
    let rate = (params.delta + params.beta).min(0.5);
    let r_fair = (binary_entropy(rate)? * n_e_fair as f64).ceil() as usize;
    let d_plus_fair = d_plus(params.epsilon, params.delta, params.p_e(), n_omega_fair)?;
    Ok(FairEstimates {
        n_omega_fair,
        n_e_fair,
        r_fair,
        d_plus_fair,
    })
}

/// The maximum tolerated error rate δ*: the root of 1 − H(2δ) − H(δ) = 0 on
/// (0, 1/4), by bisection to the given tolerance.
pub fn max_tolerated_delta(tolerance: f64) -> Result<f64, BoundsError> {
    if !(tolerance > 0.0) {
        return Err(BoundsError::InvalidParams("tolerance must be positive".into()));
    }
    let objective = |d: f64| -> f64 {
        1.0 - binary_entropy(2.0 * d).unwrap() - binary_entropy(d).unwrap()
    };
    let mut lo = 1e-9;
    let mut hi = 0.25 - 1e-9;
    debug_assert!(objective(lo) > 0.0 && objective(hi) < 0.0);
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if objective(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Realized counts fed into the end-of-run validation.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeSummary {
    /// Errors observed on the tested positions T.
    pub d_t: usize,
    /// Sifted count |Ω|.
    pub n_omega: usize,
    /// Key-side count |E|.
    pub n_e: usize,
    /// Declared correction capability d' of the error-correction procedure.
    pub d_prime: usize,
    /// Syndrome length r (check rows announced).
    pub r: usize,
    /// Key length m requested.
    pub m: usize,
}

/// The four validation constraints and their conjunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Validation {
    /// d_T < δ·p_T·n_Ω (strict).
    pub p_t_test: bool,
    /// d' ≥ d₊(β).
    pub x1: bool,
    /// H⁻¹(1 − (r+m)/n_E − τ)·n_E ≥ 2·d₊(ε).
    pub x2_prime: bool,
    /// n_E ≥ n_E^min ∧ n_Ω ≥ n_Ω^min ∧ m ≤ m^max.
    pub x3: bool,
    /// Conjunction; when false the protocol sets m = 0 and the key is null.
    pub accepted: bool,
}

/// Evaluates the validation constraints exactly as printed.
pub fn validate(outcome: &OutcomeSummary, params: &ProtocolParams) -> Result<Validation, BoundsError> {
    let p_e = params.p_e();
    let p_t_test = (outcome.d_t as f64) < params.delta * params.p_t * outcome.n_omega as f64;
    let x1 = outcome.d_prime >= d_plus(params.beta, params.delta, p_e, outcome.n_omega)?;
    let x2_prime = if outcome.n_e == 0 {
        false
    } else {
        let arg = 1.0 - (outcome.r + outcome.m) as f64 / outcome.n_e as f64 - params.tau;
        let lhs = if arg <= 0.0 {
            0.0
        } else {
            entropy_inv(arg.min(1.0))? * outcome.n_e as f64
        };
        let rhs = 2.0 * d_plus(params.epsilon, params.delta, p_e, outcome.n_omega)? as f64;
        lhs >= rhs
    };
    let x3 = outcome.n_e >= params.n_e_min
        && outcome.n_omega >= params.n_omega_min
        && outcome.m <= params.m_max;
    Ok(Validation {
        p_t_test,
        x1,
        x2_prime,
        x3,
        accepted: p_t_test && x1 && x2_prime && x3,
    })
}

/// The largest key length m ≥ 0 that satisfies the X'₂ inequality at the
/// realized counts (0 when even m = 0 fails). Used by the simulator to pick
/// m before validation.
pub fn max_m_for_x2(
    n_e: usize,
    n_omega: usize,
    r: usize,
    params: &ProtocolParams,
) -> Result<usize, BoundsError> {
    if n_e == 0 {
        return Ok(0);
    }
    let rhs = 2.0 * d_plus(params.epsilon, params.delta, params.p_e(), n_omega)? as f64;
    // H^{-1}(1 - (r+m)/n_E - tau) * n_E decreases in m, so scan down from the
    // information-theoretic ceiling. n_E is desk-scale; a linear scan is fine.
    let ceiling = n_e.saturating_sub(r);
    for m in (0..=ceiling).rev() {
        let arg = 1.0 - (r + m) as f64 / n_e as f64 - params.tau;
        if arg <= 0.0 {
            continue;
        }
        let lhs = entropy_inv(arg.min(1.0))? * n_e as f64;
        if lhs >= rhs {
            return Ok(m);
        }
    }
    Ok(0)
}
