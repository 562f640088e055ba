//! Monte Carlo and golden-check verification harness.
//!
//! Every closed-form tail bound in [`crate::secbounds`] is an *exact*
//! implication; checking it empirically needs statistical slack, so every
//! cell here compares the one-sided 99% Wilson upper bound of the empirical
//! rate against the claimed bound — never the raw point estimate. Cells with
//! a vacuous bound (≥ 1) are flagged rather than counted as evidence, and
//! cells whose bound sits below the zero-success Wilson floor are certified
//! through the exact binomial law of the simulated event instead.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::gf2codes::{self, BitMatrix, BitVec, Gf2Error};
use crate::infotheory::wilson_upper;
use crate::protocol::Basis;
use crate::quantum::{self, QuantumError};
use crate::secbounds::{self, BoundsError};

/// Errors from the verification harness.
#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// One verification cell: an empirical estimate against a claimed bound.
#[derive(Debug, Clone)]
pub struct Cell {
    /// Human-readable cell label (parameters baked in).
    pub label: String,
    /// Number of trials behind the estimate (0 for exact/deterministic cells).
    pub trials: u64,
    /// Event count.
    pub successes: u64,
    /// Point estimate (or deterministic value).
    pub estimate: f64,
    /// One-sided 99% Wilson upper bound on the estimate (equals `estimate`
    /// for deterministic cells).
    pub wilson: f64,
    /// The claimed bound the estimate must respect.
    pub bound: f64,
    /// Exact event probability where a closed-form law is available.
    pub exact: Option<f64>,
    /// True when the claimed bound is ≥ 1 and the cell proves nothing.
    pub vacuous: bool,
    /// Whether this cell passes.
    pub pass: bool,
}

impl Cell {
    fn from_counts(
        label: String,
        successes: u64,
        trials: u64,
        bound: f64,
        exact: Option<f64>,
    ) -> Cell {
        let estimate = successes as f64 / trials as f64;
        let wilson = wilson_upper(successes, trials);
        let vacuous = bound >= 1.0;
        // A bound far below the zero-success Wilson floor cannot be confirmed
        // statistically; with zero observed events and an exact event law
        // within the bound, the cell is certified exactly instead.
        let pass = vacuous
            || wilson <= bound
            || (successes == 0 && exact.is_some_and(|e| e <= bound));
        Cell {
            label,
            trials,
            successes,
            estimate,
            wilson,
            bound,
            exact,
            vacuous,
            pass,
        }
    }

    fn deterministic(label: String, value: f64, bound: f64) -> Cell {
        Cell {
            label,
            trials: 0,
            successes: 0,
            estimate: value,
            wilson: value,
            bound,
            exact: Some(value),
            vacuous: false,
            pass: value <= bound,
        }
    }
}

/// A full report for one verified statement.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    /// Which statement was verified.
    pub suite: String,
    pub seed: u64,
    pub cells: Vec<Cell>,
    /// Wall-clock milliseconds spent.
    pub wall_ms: u128,
}

impl VerificationReport {
    /// True when every cell passes.
    pub fn all_pass(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }

    /// One line per cell, suitable for terminal output.
    pub fn render(&self) -> String {
        let mut out = format!("suite {} (seed {})\n", self.suite, self.seed);
        for c in &self.cells {
            let exact = match c.exact {
                Some(e) => format!(" exact={e:.3e}"),
                None => String::new(),
            };
            let tag = if c.vacuous {
                "VACUOUS"
            } else if c.pass {
                "PASS"
            } else {
                "FAIL"
            };
            out.push_str(&format!(
                "  [{tag}] {}: estimate={:.3e} wilson={:.3e} bound={:.3e}{exact} ({} / {} trials)\n",
                c.label, c.estimate, c.wilson, c.bound, c.successes, c.trials
            ));
        }
        out
    }
}

fn strict_below(x: f64) -> i64 {
    // Largest integer strictly below x, with the same near-integer snapping
    // as the bound formulas.
    let snapped = if (x - x.round()).abs() < 1e-9 { x.round() } else { x };
    if snapped.fract() == 0.0 {
        snapped as i64 - 1
    } else {
        snapped.floor() as i64
    }
}

fn at_least(x: f64) -> i64 {
    let snapped = if (x - x.round()).abs() < 1e-9 { x.round() } else { x };
    snapped.ceil() as i64
}

/// Exact probability of the fictive-test failure event for `d_d` errors on
/// `n_d` detected positions: each error lands on the test side independently
/// with probability p_T, and the event is "real test passes while the fictive
/// test on the key side fails", i.e.
/// `d_T < δ·p_T·n_D  ∧  d_E ≥ (δ+β)·p_E·n_D` with `d_E = d_D − d_T`.
pub fn fictive_test_exact_prob(
    delta: f64,
    p_t: f64,
    beta: f64,
    n_d: usize,
    d_d: usize,
) -> Result<f64, VerifyError> {
    let p_e = 1.0 - p_t;
    let a = strict_below(delta * p_t * n_d as f64);
    let b = at_least((delta + beta) * p_e * n_d as f64);
    let t = a.min(d_d as i64 - b);
    if t < 0 {
        return Ok(0.0);
    }
    // d_T ~ Bin(d_D, p_T); the event is d_T ≤ t.
    Ok(secbounds::exact_binomial_lower_tail(d_d, p_t, t as usize))
}

/// The adversarial error count maximizing the exact failure probability.
pub fn fictive_test_worst_d_d(
    delta: f64,
    p_t: f64,
    beta: f64,
    n_d: usize,
) -> Result<usize, VerifyError> {
    let mut best = (0usize, -1.0f64);
    for d_d in 0..=n_d {
        let p = fictive_test_exact_prob(delta, p_t, beta, n_d, d_d)?;
        if p > best.1 {
            best = (d_d, p);
        }
    }
    Ok(best.0)
}

fn fictive_test_mc_cell(
    delta: f64,
    p_t: f64,
    beta: f64,
    n_d: usize,
    d_d: usize,
    trials: u64,
    seed: u64,
) -> Result<Cell, VerifyError> {
    let p_e = 1.0 - p_t;
    let a = strict_below(delta * p_t * n_d as f64);
    let b = at_least((delta + beta) * p_e * n_d as f64);
    let t = a.min(d_d as i64 - b);
    let successes: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            // Error placement is a fixed prefix of D; T/E membership is drawn
            // i.i.d. per position, so placement is exchangeable and only the
            // error *count* matters (unit-tested via permutation invariance).
            let mut d_t = 0i64;
            for _ in 0..d_d {
                if rng.random::<f64>() < p_t {
                    d_t += 1;
                }
            }
            u64::from(d_t <= t)
        })
        .sum();
    let (mu, _, _) = secbounds::mu_fictive(beta, n_d, delta, p_t, p_e)?;
    let exact = fictive_test_exact_prob(delta, p_t, beta, n_d, d_d)?;
    Ok(Cell::from_counts(
        format!("n_D={n_d} d_D={d_d}"),
        successes,
        trials,
        mu,
        Some(exact),
    ))
}

/// Monte Carlo verification of the fictive-test bound
/// `Pr(P_T ∧ ¬P_E) ≤ μ(β, n_D)` across a grid of detected-set sizes, with
/// adversarial, boundary, and random error counts per size, plus one
/// aggregation cell where n_D itself is random and the bound is the
/// `μ(β, n_D^min)` floor.
pub fn mc_fictive_test(
    delta: f64,
    p_t: f64,
    beta: f64,
    n_d_grid: &[usize],
    trials: u64,
    seed: u64,
) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let p_e = 1.0 - p_t;
    let mut cells = Vec::new();
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x5eed);
    for (gi, &n_d) in n_d_grid.iter().enumerate() {
        let mid = (delta + beta / 2.0) * n_d as f64;
        let mut d_ds = vec![
            0,
            mid.floor() as usize,
            mid.ceil() as usize,
            n_d,
            fictive_test_worst_d_d(delta, p_t, beta, n_d)?,
        ];
        d_ds.push(rng.random_range(0..=n_d));
        d_ds.push(rng.random_range(0..=n_d));
        d_ds.sort_unstable();
        d_ds.dedup();
        for d_d in d_ds {
            cells.push(fictive_test_mc_cell(
                delta,
                p_t,
                beta,
                n_d,
                d_d,
                trials,
                seed.wrapping_add(1 + gi as u64 * 1000 + d_d as u64),
            )?);
        }
    }

    // Aggregation across random sizes: n_D uniform on [n_min, 2·n_min], each
    // trial adversarial for its own size; bound is the floor μ(β, n_min).
    if let Some(&n_min) = n_d_grid.iter().min() {
        let worst: Vec<usize> = (n_min..=2 * n_min)
            .map(|n_d| fictive_test_worst_d_d(delta, p_t, beta, n_d))
            .collect::<Result<_, _>>()?;
        let successes: u64 = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0xa66);
                rng.set_stream(trial);
                let n_d = rng.random_range(n_min..=2 * n_min);
                let d_d = worst[n_d - n_min];
                let a = strict_below(delta * p_t * n_d as f64);
                let b = at_least((delta + beta) * (1.0 - p_t) * n_d as f64);
                let t = a.min(d_d as i64 - b);
                let mut d_t = 0i64;
                for _ in 0..d_d {
                    if rng.random::<f64>() < p_t {
                        d_t += 1;
                    }
                }
                u64::from(d_t <= t)
            })
            .sum();
        let (mu_floor, _, _) = secbounds::mu_fictive(beta, n_min, delta, p_t, p_e)?;
        let exact_worst = fictive_test_exact_prob(
            delta,
            p_t,
            beta,
            n_min,
            fictive_test_worst_d_d(delta, p_t, beta, n_min)?,
        )?;
        cells.push(Cell::from_counts(
            format!("aggregate n_D~U[{n_min},{}] floor", 2 * n_min),
            successes,
            trials,
            mu_floor,
            Some(exact_worst),
        ));
    }

    Ok(VerificationReport {
        suite: "fictive-test-bound".into(),
        seed,
        cells,
        wall_ms: start.elapsed().as_millis(),
    })
}

/// Monte Carlo verification of the Hoeffding-style binomial tail bound
/// `Pr(S ≥ n(p + Δp)) ≤ exp(−2n·Δp²)` on both sides.
pub fn mc_chernoff(
    n: usize,
    p: f64,
    dp_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    if !(0.0..=1.0).contains(&p) {
        return Err(VerifyError::InvalidInput("p must lie in [0, 1]".into()));
    }
    let mut cells = Vec::new();
    for (gi, &dp) in dp_grid.iter().enumerate() {
        let bound = secbounds::chernoff_tail(n, dp);
        for upper in [true, false] {
            let threshold = if upper {
                at_least(n as f64 * (p + dp))
            } else {
                strict_below(n as f64 * (p - dp)) + 1
            };
            let cell_seed = seed.wrapping_add(17 + 2 * gi as u64 + u64::from(upper));
            let successes: u64 = (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = ChaCha12Rng::seed_from_u64(cell_seed);
                    rng.set_stream(trial);
                    let mut s = 0i64;
                    for _ in 0..n {
                        if rng.random::<f64>() < p {
                            s += 1;
                        }
                    }
                    u64::from(if upper { s >= threshold } else { s <= threshold })
                })
                .sum();
            let exact = if n <= 30 {
                Some(if upper {
                    secbounds::exact_binomial_upper_tail(n, p, threshold.max(0) as usize)
                } else if threshold < 0 {
                    0.0
                } else {
                    secbounds::exact_binomial_lower_tail(n, p, threshold as usize)
                })
            } else {
                None
            };
            cells.push(Cell::from_counts(
                format!("n={n} p={p} dp={dp} {}", if upper { "upper" } else { "lower" }),
                successes,
                trials,
                bound,
                exact,
            ));
        }
    }
    Ok(VerificationReport {
        suite: "binomial-tail-bound".into(),
        seed,
        cells,
        wall_ms: start.elapsed().as_millis(),
    })
}

/// How the fixed parity matrix for [`mc_code_weight`] is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeWeightFixture {
    /// F drawn uniformly once from the seed.
    RandomF,
    /// Adversarial degenerate F: every row identical.
    RepeatedRowsF,
}

/// Monte Carlo verification of the random-code minimal-weight bound: over
/// random m×n privacy matrices K (F fixed),
/// `Pr(d_W < H^{−1}(1 − (m+r)/n − τ)·n)` is at most λ. Both λ candidates —
/// the usage-consistent `2^{−τn}` and the printed `2^{−m}` — get a cell, so
/// the discrepancy between them stays visible in every report.
pub fn mc_code_weight(
    n: usize,
    r: usize,
    m: usize,
    tau: f64,
    trials: u64,
    seed: u64,
    fixture: CodeWeightFixture,
) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    if r + m > 20 {
        return Err(VerifyError::InvalidInput(
            "brute-force d_W needs r + m <= 20".into(),
        ));
    }
    let arg = 1.0 - (m + r) as f64 / n as f64 - tau;
    let threshold = if arg <= 0.0 {
        0.0
    } else {
        secbounds::entropy_inv(arg)? * n as f64
    };
    let f = match fixture {
        CodeWeightFixture::RandomF => gf2codes::random_matrix(r, n, seed ^ 0xf00d),
        CodeWeightFixture::RepeatedRowsF => {
            let row = gf2codes::random_matrix(1, n, seed ^ 0xf00d);
            let rows = vec![row.row(0).clone(); r];
            BitMatrix::from_rows(rows)?
        }
    };
    let successes: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            let k = gf2codes::random_matrix_from(m, n, &mut rng);
            let d_w = gf2codes::minimal_weight_dw(&f, &k)?;
            Ok(u64::from((d_w as f64) < threshold))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
        .map_err(VerifyError::Gf2)?;
    let lambda_used = secbounds::lambda_code(tau, n);
    let lambda_printed = secbounds::lambda_printed(m);
    // With a zero threshold the event d_W < 0 is impossible: certify exactly.
    let exact = if threshold <= 0.0 { Some(0.0) } else { None };
    let label = format!("n={n} r={r} m={m} tau={tau} thr={threshold:.3}");
    let cells = vec![
        Cell::from_counts(format!("{label} lambda=2^-tau*n"), successes, trials, lambda_used, exact),
        Cell::from_counts(format!("{label} lambda=2^-m"), successes, trials, lambda_printed, exact),
    ];
    Ok(VerificationReport {
        suite: "random-code-minimal-weight".into(),
        seed,
        cells,
        wall_ms: start.elapsed().as_millis(),
    })
}

/// Closed-form conjugate-basis density matrix with the phase factor
/// deliberately dropped — the mutation target for the golden quantum suite.
/// With it in place a broken build of the closed form cannot slip through:
/// the suite must distinguish the correct matrix from this one.
fn rho_closed_form_unsigned(
    f: &BitMatrix,
    k_mat: &BitMatrix,
) -> Result<quantum::DensityMat, VerifyError> {
    let g = f.stack(k_mat)?;
    let n = g.cols();
    let dim = 1usize << n;
    let mut rho = quantum::DensityMat::zeros(n)?;
    for i in 0..dim {
        for j in 0..dim {
            let w = quantum::index_to_bits(i ^ j, n);
            if gf2codes::solve_row_combination(&g, &w)?.is_some() {
                rho.set(i, j, 1.0 / dim as f64);
            }
        }
    }
    Ok(rho)
}

fn random_independent_system(
    rng: &mut ChaCha12Rng,
) -> (BitMatrix, BitMatrix, BitVec, BitVec) {
    loop {
        let n = rng.random_range(2..=6usize);
        let r = rng.random_range(0..n);
        let m = rng.random_range(1..=(n - r).min(3));
        let f = gf2codes::random_matrix_from(r, n, rng);
        let k = gf2codes::random_matrix_from(m, n, rng);
        let g = f.stack(&k).unwrap();
        if g.rank() < g.rows() {
            continue;
        }
        let mut s = BitVec::zeros(r);
        for i in 0..r {
            s.set(i, rng.random::<bool>());
        }
        let mut kv = BitVec::zeros(m);
        for i in 0..m {
            kv.set(i, rng.random::<bool>());
        }
        return (f, k, s, kv);
    }
}

/// The golden quantum suite: deterministic desk-scale checks of the exact
/// oracles against the closed forms. `mutate_sign` deliberately breaks the
/// closed form's phase factor; a correct harness must then fail (exercised
/// by the CLI's hidden mutation flag).
pub fn quantum_suite(seed: u64, instances: usize, mutate_sign: bool) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let mut cells = Vec::new();

    // Worked minimal-weight example: F = rows{10000, 01000}, K = 11111.
    let f = BitMatrix::parse_rows(&["10000", "01000"])?;
    let k = BitMatrix::parse_rows(&["11111"])?;
    let (d_w, members) = gf2codes::g_star(&f, &k)?;
    let members_ok = members.len() == 4
        && ["11111", "01111", "10111", "00111"]
            .iter()
            .all(|w| members.contains(&BitVec::parse(w).unwrap()));
    cells.push(Cell::deterministic(
        "worked example d_W=3 with 4 G* members".into(),
        if d_w == 3 && members_ok { 0.0 } else { 1.0 },
        0.0,
    ));

    // Maximum tolerated error rate.
    let delta_star = secbounds::max_tolerated_delta(1e-9)?;
    cells.push(Cell::deterministic(
        format!("delta*={delta_star:.6} in [0.073, 0.078]"),
        if (0.073..=0.078).contains(&delta_star) { 0.0 } else { 1.0 },
        0.0,
    ));

    // Closed form vs recurrence vs basis-changed brute force.
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let (f, k, s, kv) = random_independent_system(&mut rng);
        let n = f.cols();
        let a: Vec<Basis> = (0..n)
            .map(|_| if rng.random::<bool>() { Basis::Times } else { Basis::Plus })
            .collect();
        let btilde: Vec<Basis> = a.iter().map(|b| b.conjugate()).collect();
        let brute = quantum::rho_brute(Some(&f), Some(&k), &s, &kv, &a)?
            .in_basis(&btilde)?;
        let closed = if mutate_sign {
            rho_closed_form_unsigned(&f, &k)?
        } else {
            quantum::rho_closed_form(&f, &k, &s, &kv)?
        };
        let rec = quantum::rho_recurrence(&f, &k, &s, &kv)?;
        worst = worst
            .max(brute.max_abs_diff(&closed)?)
            .max(closed.max_abs_diff(&rec)?);
    }
    cells.push(Cell::deterministic(
        format!("closed form = recurrence = brute over {instances} instances"),
        worst,
        1e-10,
    ));

    // Two-flipped-bases sphere radius is exactly 3.
    let n = 5;
    let h = BitVec::parse("01101")?;
    let btilde = vec![Basis::Times; n];
    let mut bstar = btilde.clone();
    bstar[1] = bstar[1].conjugate();
    bstar[3] = bstar[3].conjugate();
    let phi = quantum::bb84_state(&h, &bstar)?;
    let radius = quantum::ssp_min_radius(&phi, &h, &btilde, &(0..n).collect::<Vec<_>>())?;
    cells.push(Cell::deterministic(
        format!("two-flipped-bases sphere radius = {radius}"),
        if radius == 3 { 0.0 } else { 1.0 },
        0.0,
    ));

    // Exact sphere sizes respect the entropy sandwich for all n ≤ 24.
    let mut sphere_ok = true;
    for n in 1..=24usize {
        for d in 1..n.div_ceil(2) {
            let exact = gf2codes::sphere_size(n, d) as f64;
            let (lo, hi) = gf2codes::sphere_entropy_bounds(n, d)?;
            if !(lo <= exact && exact <= hi) {
                sphere_ok = false;
            }
        }
    }
    cells.push(Cell::deterministic(
        "sphere sizes within entropy bounds for n<=24".into(),
        if sphere_ok { 0.0 } else { 1.0 },
        0.0,
    ));

    Ok(VerificationReport {
        suite: "quantum-golden".into(),
        seed,
        cells,
        wall_ms: start.elapsed().as_millis(),
    })
}
