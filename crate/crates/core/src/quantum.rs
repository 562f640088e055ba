//! Exact desk-scale quantum oracles.
//!
//! Everything here works with explicit state vectors and density matrices
//! over a handful of photons, so results are exact up to floating-point
//! roundoff and serve as ground truth for the large-scale classical
//! simulation and for the closed-form results.
//!
//! # Index convention
//!
//! A system of `n` photons is indexed by `alpha ∈ 0..2^n`; the bit of
//! position `i` (0-indexed) is the *most significant first*:
//! `bit_i(alpha) = (alpha >> (n-1-i)) & 1`. All BB84 states are real, so
//! amplitudes are `f64` and adjoints are plain transposes.
//!
//! The state a sender prepares for bit `g` in basis `b` is `|g⟩` for the
//! rectilinear basis and `(|0⟩ + (−1)^g |1⟩)/√2` for the diagonal one.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::gf2codes::{self, BitMatrix, BitVec, Gf2Error};
use crate::infotheory::ViewRow;
use crate::protocol::{AttackStrategy, Basis};

/// Amplitudes below this are treated as exact zeros when measuring support.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Largest photon count for dense enumeration.
pub const MAX_QUBITS: usize = 12;

/// Errors from the quantum oracles.
#[derive(Debug, Error)]
pub enum QuantumError {
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no state satisfies the requested constraints")]
    Unattainable,
    #[error("problem too large: {0}")]
    TooLarge(String),
}

fn check_qubits(n: usize) -> Result<(), QuantumError> {
    if n > MAX_QUBITS {
        return Err(QuantumError::TooLarge(format!(
            "{n} photons exceed the dense-enumeration cap of {MAX_QUBITS}"
        )));
    }
    Ok(())
}

/// Converts a basis index to its MSB-first bit vector.
pub fn index_to_bits(alpha: usize, n: usize) -> BitVec {
    let mut v = BitVec::zeros(n);
    for i in 0..n {
        v.set(i, (alpha >> (n - 1 - i)) & 1 == 1);
    }
    v
}

/// Converts an MSB-first bit vector to its basis index.
pub fn bits_to_index(bits: &BitVec) -> usize {
    let mut alpha = 0usize;
    for i in 0..bits.len() {
        alpha = (alpha << 1) | usize::from(bits.get(i));
    }
    alpha
}

/// In-place Hadamard transform on the qubits selected by `mask` (bit `n-1-i`
/// of the mask selects position `i`), with 1/√2 normalization per qubit.
fn hadamard_on_mask(amps: &mut [f64], n: usize, mask: usize) {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for q in 0..n {
        if (mask >> q) & 1 == 0 {
            continue;
        }
        let stride = 1usize << q;
        let mut base = 0;
        while base < amps.len() {
            for off in base..base + stride {
                let a = amps[off];
                let b = amps[off + stride];
                amps[off] = (a + b) * inv_sqrt2;
                amps[off + stride] = (a - b) * inv_sqrt2;
            }
            base += 2 * stride;
        }
    }
}

fn times_mask(bases: &[Basis]) -> usize {
    let n = bases.len();
    let mut mask = 0usize;
    for (i, b) in bases.iter().enumerate() {
        if *b == Basis::Times {
            mask |= 1 << (n - 1 - i);
        }
    }
    mask
}

/// A real pure state over `n` photons.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVec {
    n: usize,
    amps: Vec<f64>,
}

impl StateVec {
    /// Builds a state from raw amplitudes (length must be a power of two).
    pub fn from_amps(amps: Vec<f64>) -> Result<StateVec, QuantumError> {
        let dim = amps.len();
        if dim == 0 || dim & (dim - 1) != 0 {
            return Err(QuantumError::InvalidInput(
                "amplitude vector length must be a nonzero power of two".into(),
            ));
        }
        let n = dim.trailing_zeros() as usize;
        check_qubits(n)?;
        Ok(StateVec { n, amps })
    }

    /// Photon count.
    pub fn qubits(&self) -> usize {
        self.n
    }

    /// Raw amplitudes in the computational basis.
    pub fn amps(&self) -> &[f64] {
        &self.amps
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// Scales to unit norm.
    pub fn normalized(&self) -> Result<StateVec, QuantumError> {
        let nrm = self.norm();
        if nrm < SUPPORT_TOL {
            return Err(QuantumError::InvalidInput("cannot normalize the zero vector".into()));
        }
        Ok(StateVec {
            n: self.n,
            amps: self.amps.iter().map(|a| a / nrm).collect(),
        })
    }

    /// Inner product ⟨self|other⟩.
    pub fn inner(&self, other: &StateVec) -> Result<f64, QuantumError> {
        if self.n != other.n {
            return Err(QuantumError::InvalidInput("qubit counts differ".into()));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a * b)
            .sum())
    }

    /// Coefficients of this state in the product basis {Ψ(α, bases)}:
    /// `c_α = ⟨Ψ(α, bases)|self⟩`.
    pub fn basis_coeffs(&self, bases: &[Basis]) -> Result<Vec<f64>, QuantumError> {
        if bases.len() != self.n {
            return Err(QuantumError::InvalidInput("basis list length mismatch".into()));
        }
        let mut c = self.amps.clone();
        hadamard_on_mask(&mut c, self.n, times_mask(bases));
        Ok(c)
    }

    /// Sum over all states: self + other.
    pub fn add(&self, other: &StateVec) -> Result<StateVec, QuantumError> {
        if self.n != other.n {
            return Err(QuantumError::InvalidInput("qubit counts differ".into()));
        }
        Ok(StateVec {
            n: self.n,
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect(),
        })
    }
}

/// The n-photon product state Ψ(bits, bases).
pub fn bb84_state(bits: &BitVec, bases: &[Basis]) -> Result<StateVec, QuantumError> {
    let n = bits.len();
    if bases.len() != n {
        return Err(QuantumError::InvalidInput("bit/basis length mismatch".into()));
    }
    check_qubits(n)?;
    let mut amps = vec![0.0; 1 << n];
    let alpha = bits_to_index(bits);
    amps[alpha] = 1.0;
    // In the rectilinear basis the state is the computational unit vector; a
    // Hadamard on each diagonal position turns |g⟩ into (|0⟩+(−1)^g|1⟩)/√2.
    hadamard_on_mask(&mut amps, n, times_mask(bases));
    Ok(StateVec { n, amps })
}

/// Builds the state with given coefficients in the product basis
/// {Ψ(α, bases)} (the inverse of [`StateVec::basis_coeffs`]).
pub fn state_from_basis_coeffs(coeffs: Vec<f64>, bases: &[Basis]) -> Result<StateVec, QuantumError> {
    let st = StateVec::from_amps(coeffs)?;
    if bases.len() != st.n {
        return Err(QuantumError::InvalidInput("basis list length mismatch".into()));
    }
    let mut amps = st.amps;
    // The per-qubit change of basis is its own inverse.
    hadamard_on_mask(&mut amps, st.n, times_mask(bases));
    Ok(StateVec { n: st.n, amps })
}

/// Probability of observing `outcome` when measuring `state` photon-wise in
/// `bases`.
pub fn measurement_prob(
    state: &StateVec,
    outcome: &BitVec,
    bases: &[Basis],
) -> Result<f64, QuantumError> {
    if outcome.len() != state.n {
        return Err(QuantumError::InvalidInput("outcome length mismatch".into()));
    }
    let c = state.basis_coeffs(bases)?;
    let amp = c[bits_to_index(outcome)];
    Ok(amp * amp)
}

/// A real symmetric density matrix over `n` photons, stored dense
/// (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMat {
    n: usize,
    dim: usize,
    data: Vec<f64>,
}

impl DensityMat {
    /// The all-zero matrix.
    pub fn zeros(n: usize) -> Result<DensityMat, QuantumError> {
        check_qubits(n)?;
        let dim = 1usize << n;
        Ok(DensityMat {
            n,
            dim,
            data: vec![0.0; dim * dim],
        })
    }

    /// Photon count.
    pub fn qubits(&self) -> usize {
        self.n
    }

    /// Matrix dimension 2^n.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry (i, j).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Sets entry (i, j).
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    /// Adds `w · |φ⟩⟨φ|`.
    pub fn add_outer(&mut self, phi: &StateVec, w: f64) -> Result<(), QuantumError> {
        if phi.n != self.n {
            return Err(QuantumError::InvalidInput("qubit counts differ".into()));
        }
        for i in 0..self.dim {
            if phi.amps[i] == 0.0 {
                continue;
            }
            for j in 0..self.dim {
                self.data[i * self.dim + j] += w * phi.amps[i] * phi.amps[j];
            }
        }
        Ok(())
    }

    /// Trace.
    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest absolute entrywise difference to another matrix.
    pub fn max_abs_diff(&self, other: &DensityMat) -> Result<f64, QuantumError> {
        if self.n != other.n {
            return Err(QuantumError::InvalidInput("qubit counts differ".into()));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Largest absolute asymmetry |ρ_ij − ρ_ji|.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Quadratic form φᵀ ρ φ.
    pub fn quadratic_form(&self, phi: &StateVec) -> Result<f64, QuantumError> {
        if phi.n != self.n {
            return Err(QuantumError::InvalidInput("qubit counts differ".into()));
        }
        let mut acc = 0.0;
        for i in 0..self.dim {
            if phi.amps[i] == 0.0 {
                continue;
            }
            let mut row = 0.0;
            for j in 0..self.dim {
                row += self.get(i, j) * phi.amps[j];
            }
            acc += phi.amps[i] * row;
        }
        Ok(acc)
    }

    /// Applies ρ to a vector.
    pub fn apply(&self, phi: &StateVec) -> Result<StateVec, QuantumError> {
        if phi.n != self.n {
            return Err(QuantumError::InvalidInput("qubit counts differ".into()));
        }
        let mut out = vec![0.0; self.dim];
        for i in 0..self.dim {
            let mut acc = 0.0;
            for j in 0..self.dim {
                acc += self.get(i, j) * phi.amps[j];
            }
            out[i] = acc;
        }
        Ok(StateVec { n: self.n, amps: out })
    }

    /// Re-expresses the matrix in the product basis {Ψ(α, bases)}: entries
    /// become ⟨Ψ(α, bases)| ρ |Ψ(α', bases)⟩.
    pub fn in_basis(&self, bases: &[Basis]) -> Result<DensityMat, QuantumError> {
        if bases.len() != self.n {
            return Err(QuantumError::InvalidInput("basis list length mismatch".into()));
        }
        let mask = times_mask(bases);
        let mut out = self.clone();
        // Transform every row, then every column; the change of basis is
        // symmetric so no transposes are needed.
        for i in 0..self.dim {
            hadamard_on_mask(&mut out.data[i * self.dim..(i + 1) * self.dim], self.n, mask);
        }
        let mut col = vec![0.0; self.dim];
        for j in 0..self.dim {
            for i in 0..self.dim {
                col[i] = out.get(i, j);
            }
            hadamard_on_mask(&mut col, self.n, mask);
            for i in 0..self.dim {
                out.set(i, j, col[i]);
            }
        }
        Ok(out)
    }

    /// All eigenvalues, by cyclic Jacobi rotations (the matrix must be
    /// symmetric, which every oracle here produces).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let dim = self.dim;
        let mut a = self.data.clone();
        let idx = |i: usize, j: usize| i * dim + j;
        for _sweep in 0..100 {
            let mut off = 0.0;
            for i in 0..dim {
                for j in (i + 1)..dim {
                    off += a[idx(i, j)] * a[idx(i, j)];
                }
            }
            if off < 1e-24 {
                break;
            }
            for p in 0..dim {
                for q in (p + 1)..dim {
                    let apq = a[idx(p, q)];
                    if apq.abs() < 1e-18 {
                        continue;
                    }
                    let app = a[idx(p, p)];
                    let aqq = a[idx(q, q)];
                    // Jacobi rotation angle: tan(2θ) = 2a_pq/(a_pp−a_qq).
                    let phi = 0.5 * (2.0 * apq).atan2(app - aqq);
                    let (s, c) = phi.sin_cos();
                    for k in 0..dim {
                        let akp = a[idx(k, p)];
                        let akq = a[idx(k, q)];
                        a[idx(k, p)] = c * akp + s * akq;
                        a[idx(k, q)] = -s * akp + c * akq;
                    }
                    for k in 0..dim {
                        let apk = a[idx(p, k)];
                        let aqk = a[idx(q, k)];
                        a[idx(p, k)] = c * apk + s * aqk;
                        a[idx(q, k)] = -s * apk + c * aqk;
                    }
                }
            }
        }
        (0..dim).map(|i| a[idx(i, i)]).collect()
    }

    /// Smallest eigenvalue (for positive-semidefiniteness checks).
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }
}

fn constraint_matrices(
    f: Option<&BitMatrix>,
    k: Option<&BitMatrix>,
) -> Result<(BitMatrix, BitVec, usize), QuantumError> {
    match (f, k) {
        (Some(f), Some(k)) => {
            if f.cols() != k.cols() {
                return Err(QuantumError::InvalidInput("F and K widths differ".into()));
            }
            Ok((f.stack(k)?, BitVec::zeros(0), f.cols()))
        }
        (Some(f), None) => Ok((f.clone(), BitVec::zeros(0), f.cols())),
        (None, Some(k)) => Ok((k.clone(), BitVec::zeros(0), k.cols())),
        (None, None) => Err(QuantumError::InvalidInput(
            "at least one of F, K must be given".into(),
        )),
    }
}

fn concat_bits(s: &BitVec, k: &BitVec) -> BitVec {
    let mut out = BitVec::zeros(s.len() + k.len());
    for i in 0..s.len() {
        out.set(i, s.get(i));
    }
    for i in 0..k.len() {
        out.set(s.len() + i, k.get(i));
    }
    out
}

/// Brute-force density matrix of the uniform mixture over all bit strings
/// `α` with `F·α = s` and `K·α = k`, each photon prepared in basis
/// `bases[i]`. Returned in the computational representation.
pub fn rho_brute(
    f: Option<&BitMatrix>,
    k_mat: Option<&BitMatrix>,
    s: &BitVec,
    k: &BitVec,
    bases: &[Basis],
) -> Result<DensityMat, QuantumError> {
    let (_, _, n) = constraint_matrices(f, k_mat)?;
    if bases.len() != n {
        return Err(QuantumError::InvalidInput("basis list length mismatch".into()));
    }
    check_qubits(n)?;
    let mut members = Vec::new();
    for alpha in 0..(1usize << n) {
        let bits = index_to_bits(alpha, n);
        let f_ok = match f {
            Some(f) => f.mul_vec(&bits)? == *s,
            None => true,
        };
        let k_ok = match k_mat {
            Some(km) => km.mul_vec(&bits)? == *k,
            None => true,
        };
        if f_ok && k_ok {
            members.push(bits);
        }
    }
    if members.is_empty() {
        return Err(QuantumError::Unattainable);
    }
    let w = 1.0 / members.len() as f64;
    let mut rho = DensityMat::zeros(n)?;
    for bits in &members {
        let psi = bb84_state(bits, bases)?;
        rho.add_outer(&psi, w)?;
    }
    Ok(rho)
}

fn stacked_system(
    f: &BitMatrix,
    k_mat: &BitMatrix,
    s: &BitVec,
    k: &BitVec,
) -> Result<(BitMatrix, BitVec), QuantumError> {
    if f.cols() != k_mat.cols() {
        return Err(QuantumError::InvalidInput("F and K widths differ".into()));
    }
    if s.len() != f.rows() || k.len() != k_mat.rows() {
        return Err(QuantumError::InvalidInput(
            "syndrome/key lengths do not match the matrices".into(),
        ));
    }
    let g = f.stack(k_mat)?;
    Ok((g, concat_bits(s, k)))
}

/// Closed-form conjugate-basis representation of the mixture `rho_brute`
/// describes: entry (α, α') is `2^{−n}·(−1)^{λ·(s,k)}` when the row
/// combination `λ·[F; K] = α ⊕ α'` exists, and 0 otherwise. Requires the
/// stacked rows of F and K to be linearly independent.
pub fn rho_closed_form(
    f: &BitMatrix,
    k_mat: &BitMatrix,
    s: &BitVec,
    k: &BitVec,
) -> Result<DensityMat, QuantumError> {
    let (g, x) = stacked_system(f, k_mat, s, k)?;
    let n = g.cols();
    check_qubits(n)?;
    if g.rank() < g.rows() {
        return Err(QuantumError::InvalidInput(
            "the stacked rows of F and K must be linearly independent".into(),
        ));
    }
    let dim = 1usize << n;
    // One linear solve per difference word α ⊕ α'.
    let mut entry_for_diff = vec![0.0f64; dim];
    for w in 0..dim {
        let bits = index_to_bits(w, n);
        if let Some(lambda) = gf2codes::solve_row_combination(&g, &bits)? {
            let sign = if lambda.dot(&x) { -1.0 } else { 1.0 };
            entry_for_diff[w] = sign / dim as f64;
        }
    }
    let mut rho = DensityMat::zeros(n)?;
    for i in 0..dim {
        for j in 0..dim {
            rho.set(i, j, entry_for_diff[i ^ j]);
        }
    }
    Ok(rho)
}

/// The same conjugate-basis representation built by the averaging recurrence:
/// start from the maximally mixed-phase matrix with every entry `2^{−n}`,
/// average with the phase-flipped copy `U_θ ρ U_θ` for each null-space basis
/// vector θ of `[F; K]`, and finally conjugate by a particular solution of
/// `[F; K]·θ₀ = (s, k)`.
pub fn rho_recurrence(
    f: &BitMatrix,
    k_mat: &BitMatrix,
    s: &BitVec,
    k: &BitVec,
) -> Result<DensityMat, QuantumError> {
    let (g, x) = stacked_system(f, k_mat, s, k)?;
    let n = g.cols();
    check_qubits(n)?;
    let dim = 1usize << n;
    let theta0 = gf2codes::solve_linear(&g, &x)?.ok_or(QuantumError::Unattainable)?;
    let mut rho = DensityMat::zeros(n)?;
    for i in 0..dim {
        for j in 0..dim {
            rho.set(i, j, 1.0 / dim as f64);
        }
    }
    for theta in gf2codes::null_space(&g) {
        // (U_θ ρ U_θ)_{αα'} = (−1)^{(α⊕α')·θ} ρ_{αα'}; averaging keeps an
        // entry when the difference word is orthogonal to θ and kills it
        // otherwise.
        let mut next = DensityMat::zeros(n)?;
        for i in 0..dim {
            for j in 0..dim {
                let diff = index_to_bits(i ^ j, n);
                let sign = if diff.dot(&theta) { -1.0 } else { 1.0 };
                next.set(i, j, 0.5 * (rho.get(i, j) + sign * rho.get(i, j)));
            }
        }
        rho = next;
    }
    for i in 0..dim {
        for j in 0..dim {
            let diff = index_to_bits(i ^ j, n);
            if diff.dot(&theta0) {
                rho.set(i, j, -rho.get(i, j));
            }
        }
    }
    Ok(rho)
}

/// Distance between α and h counted only on the positions in `x_set`
/// (0-indexed).
fn restricted_distance(alpha: &BitVec, h: &BitVec, x_set: &[usize]) -> usize {
    x_set
        .iter()
        .filter(|&&i| alpha.get(i) != h.get(i))
        .count()
}

/// The smallest sphere radius of `phi` around `h` in the product basis
/// {Ψ(α, bases)}: the least `d` such that `phi` lies in the span of the basis
/// states with `dist(α, h) < d` on `x_set`. Returns 0 only for the zero
/// vector.
pub fn ssp_min_radius(
    phi: &StateVec,
    h: &BitVec,
    bases: &[Basis],
    x_set: &[usize],
) -> Result<usize, QuantumError> {
    if h.len() != phi.n {
        return Err(QuantumError::InvalidInput("reference word length mismatch".into()));
    }
    let c = phi.basis_coeffs(bases)?;
    let mut radius = 0usize;
    for (alpha, amp) in c.iter().enumerate() {
        if amp.abs() > SUPPORT_TOL {
            let bits = index_to_bits(alpha, phi.n);
            radius = radius.max(1 + restricted_distance(&bits, h, x_set));
        }
    }
    Ok(radius)
}

/// Projector (computational representation) onto the span of the basis
/// states Ψ(α, bases) whose distance from `h` on `x_set` is at least `d`.
pub fn sphere_projection(
    d: usize,
    h: &BitVec,
    bases: &[Basis],
    x_set: &[usize],
) -> Result<DensityMat, QuantumError> {
    let n = h.len();
    if bases.len() != n {
        return Err(QuantumError::InvalidInput("basis list length mismatch".into()));
    }
    check_qubits(n)?;
    let dim = 1usize << n;
    let mut p = DensityMat::zeros(n)?;
    for alpha in 0..dim {
        let bits = index_to_bits(alpha, n);
        if restricted_distance(&bits, h, x_set) >= d {
            p.set(alpha, alpha, 1.0);
        }
    }
    p.in_basis(bases)
}

/// Evaluates both sides of a projected-overlap comparison: returns
/// `((Pφ)ᵀ ρ (Pφ), φᵀ ρ φ)`.
pub fn projected_overlap(
    phi: &StateVec,
    rho: &DensityMat,
    projector: &DensityMat,
) -> Result<(f64, f64), QuantumError> {
    let p_phi = projector.apply(phi)?;
    Ok((rho.quadratic_form(&p_phi)?, rho.quadratic_form(phi)?))
}

/// Overlaps ⟨φ|ρ_{s,k}|φ⟩ for every key value k, with ρ_{s,k} the brute
/// mixture over `F·α = s, K·α = k` in preparation bases `bases`. When φ's
/// smallest sphere radius is at most the minimal G* weight d_W(F, K), the
/// returned overlaps are all equal (key blindness).
pub fn key_overlaps(
    phi: &StateVec,
    f: &BitMatrix,
    k_mat: &BitMatrix,
    s: &BitVec,
    bases: &[Basis],
) -> Result<Vec<f64>, QuantumError> {
    let m = k_mat.rows();
    if m > 20 {
        return Err(QuantumError::TooLarge("more than 20 key bits".into()));
    }
    let mut out = Vec::with_capacity(1 << m);
    for kv in 0..(1usize << m) {
        let k = index_to_bits(kv, m);
        let rho = rho_brute(Some(f), Some(k_mat), s, &k, bases)?;
        out.push(rho.quadratic_form(phi)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Exhaustive tiny-N leakage enumeration
// ---------------------------------------------------------------------------

type Rat = BigRational;

fn rat_from_f64(x: f64, what: &str) -> Result<Rat, QuantumError> {
    BigRational::from_float(x)
        .ok_or_else(|| QuantumError::InvalidInput(format!("{what} must be finite")))
}

/// Parameters for the exact tiny-N leakage enumeration.
#[derive(Debug, Clone)]
pub struct TinyProtocol {
    /// Photon count N (enumeration cost is exponential; N ≤ 4 is practical).
    pub n_photons: usize,
    /// Bernoulli test-side probability p_T.
    pub p_t: f64,
    /// Tolerated test error rate δ (the P_T check is `d_T < δ·p_T·n_Ω`).
    pub delta: f64,
    /// Parity-check matrix; a run is accepted only when |E| equals its width.
    pub f: BitMatrix,
    /// Privacy-amplification matrix (same width as `f`).
    pub k: BitMatrix,
    /// Eve's per-photon strategy.
    pub attack: AttackStrategy,
    /// Diagnostic: credit Eve with Alice's full bit string `g`, including the
    /// secret E positions (breaks secrecy by construction; useful as a
    /// positive control for the leakage functional).
    pub eve_knows_g: bool,
}

/// One eavesdropper view with its exact probability mass split by key value.
#[derive(Debug, Clone)]
pub struct TinyView {
    /// Key length announced in this view (0 when the run was rejected).
    pub m: usize,
    /// Total view probability.
    pub p_v: Rat,
    /// Joint masses p(v, k), indexed by key value; length 2^m.
    pub p_k: Vec<Rat>,
}

/// Output of the exhaustive enumeration.
#[derive(Debug)]
pub struct LeakageReport {
    /// The leakage functional Σ_v p(v)·(m_v − H(k|v)) in bits, computed in
    /// floating point from the exact masses.
    pub leakage_bits: f64,
    /// True when every accepting view has exactly uniform p(k|v) as rational
    /// numbers — the leakage is then structurally zero, not merely small.
    pub exactly_zero: bool,
    /// Acceptance probability (mass of views with m > 0).
    pub p_accept: f64,
    /// Distribution of the announced key length: (m, probability).
    pub p_m: Vec<(usize, f64)>,
    /// Number of enumerated leaf branches.
    pub branches: u64,
    /// All views.
    pub views: Vec<TinyView>,
}

impl LeakageReport {
    /// Converts to the generic per-view rows used by the information-theory
    /// cross-checks.
    pub fn view_rows(&self) -> Vec<ViewRow> {
        self.views
            .iter()
            .map(|v| {
                let p_v = v.p_v.to_f64().unwrap_or(0.0);
                let p_k_given_v = v
                    .p_k
                    .iter()
                    .map(|p| (p / &v.p_v).to_f64().unwrap_or(0.0))
                    .collect();
                ViewRow {
                    p_v,
                    m: v.m,
                    p_k_given_v,
                }
            })
            .collect()
    }
}

struct PhotonRecord {
    g: bool,
    a: Basis,
    b: Basis,
    h: bool,
    in_r: bool,
    eve_basis: Option<Basis>,
    eve_bit: Option<bool>,
}

struct Enumerator<'a> {
    cfg: &'a TinyProtocol,
    p_t: Rat,
    half: Rat,
    p_attack: Rat,
    photons: Vec<PhotonRecord>,
    acc: BTreeMap<Vec<u8>, (usize, Vec<Rat>)>,
    branches: u64,
}

impl<'a> Enumerator<'a> {
    fn run(&mut self) -> Result<(), QuantumError> {
        let one = Rat::one();
        self.photon(0, one)
    }

    fn photon(&mut self, i: usize, p: Rat) -> Result<(), QuantumError> {
        if i == self.cfg.n_photons {
            self.branches += 1;
            return self.leaf(p);
        }
        for g in [false, true] {
            for a in [Basis::Plus, Basis::Times] {
                for b in [Basis::Plus, Basis::Times] {
                    let base = &p * &self.half * &self.half * &self.half;
                    self.attack_branches(i, g, a, b, base)?;
                }
            }
        }
        Ok(())
    }

    fn attack_branches(
        &mut self,
        i: usize,
        g: bool,
        a: Basis,
        b: Basis,
        p: Rat,
    ) -> Result<(), QuantumError> {
        match self.cfg.attack {
            AttackStrategy::None => self.bob_branches(i, g, a, b, None, None, p),
            AttackStrategy::FixedBasisMeasure { basis } => {
                self.eve_measures(i, g, a, b, basis, p)
            }
            AttackStrategy::InterceptResend { .. } => {
                let p_no = &p * (Rat::one() - &self.p_attack);
                if !p_no.is_zero() {
                    self.bob_branches(i, g, a, b, None, None, p_no)?;
                }
                let p_yes = &p * &self.p_attack;
                if !p_yes.is_zero() {
                    for e in [Basis::Plus, Basis::Times] {
                        let pe = &p_yes * &self.half;
                        self.eve_measures(i, g, a, b, e, pe)?;
                    }
                }
                Ok(())
            }
        }
    }

    fn eve_measures(
        &mut self,
        i: usize,
        g: bool,
        a: Basis,
        b: Basis,
        e: Basis,
        p: Rat,
    ) -> Result<(), QuantumError> {
        if e == a {
            self.bob_branches(i, g, a, b, Some(e), Some(g), p)
        } else {
            for o in [false, true] {
                let po = &p * &self.half;
                self.bob_branches(i, g, a, b, Some(e), Some(o), po)?;
            }
            Ok(())
        }
    }

    fn bob_branches(
        &mut self,
        i: usize,
        g: bool,
        a: Basis,
        b: Basis,
        eve_basis: Option<Basis>,
        eve_bit: Option<bool>,
        p: Rat,
    ) -> Result<(), QuantumError> {
        // Bob measures either the original photon (noiseless channel) or
        // Eve's resent state.
        let (src_bit, src_basis) = match (eve_basis, eve_bit) {
            (Some(e), Some(o)) => (o, e),
            _ => (g, a),
        };
        if b == src_basis {
            self.r_branches(i, g, a, b, eve_basis, eve_bit, src_bit, p)
        } else {
            for h in [false, true] {
                let ph = &p * &self.half;
                self.r_branches(i, g, a, b, eve_basis, eve_bit, h, ph)?;
            }
            Ok(())
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn r_branches(
        &mut self,
        i: usize,
        g: bool,
        a: Basis,
        b: Basis,
        eve_basis: Option<Basis>,
        eve_bit: Option<bool>,
        h: bool,
        p: Rat,
    ) -> Result<(), QuantumError> {
        for in_r in [true, false] {
            let pr = if in_r {
                &p * &self.p_t
            } else {
                &p * (Rat::one() - &self.p_t)
            };
            if pr.is_zero() {
                continue;
            }
            self.photons.push(PhotonRecord {
                g,
                a,
                b,
                h,
                in_r,
                eve_basis,
                eve_bit,
            });
            self.photon(i + 1, pr)?;
            self.photons.pop();
        }
        Ok(())
    }

    fn leaf(&mut self, p: Rat) -> Result<(), QuantumError> {
        let n = self.cfg.n_photons;
        let mut e_set = Vec::new();
        let mut t_set = Vec::new();
        let mut n_omega = 0usize;
        let mut d_t = 0usize;
        for (i, ph) in self.photons.iter().enumerate() {
            if ph.a == ph.b {
                n_omega += 1;
                if ph.in_r {
                    t_set.push(i);
                    if ph.h != ph.g {
                        d_t += 1;
                    }
                } else {
                    e_set.push(i);
                }
            }
        }
        // Tiny-N acceptance: enough key positions for the fixed matrices and
        // a clean parameter-estimation test.
        let p_t_ok = (d_t as f64) < self.cfg.delta * self.cfg.p_t * n_omega as f64;
        let accepted = e_set.len() == self.cfg.f.cols() && p_t_ok;
        let (m_v, s, key_index) = if accepted {
            let g_e = {
                let mut v = BitVec::zeros(e_set.len());
                for (j, &i) in e_set.iter().enumerate() {
                    v.set(j, self.photons[i].g);
                }
                v
            };
            let s = self.cfg.f.mul_vec(&g_e)?;
            let k = self.cfg.k.mul_vec(&g_e)?;
            (self.cfg.k.rows(), Some(s), bits_to_index(&k))
        } else {
            (0, None, 0)
        };

        // Canonical view encoding: everything public plus Eve's own records.
        let in_e = {
            let mut v = vec![false; n];
            for &i in &e_set {
                v[i] = true;
            }
            v
        };
        let mut key = Vec::with_capacity(6 * n + 4);
        for (i, ph) in self.photons.iter().enumerate() {
            key.push(u8::from(ph.a == Basis::Times));
            key.push(u8::from(ph.b == Basis::Times));
            key.push(u8::from(ph.in_r));
            // Alice's bit is public outside E (and everywhere under the
            // broken-by-construction diagnostic).
            key.push(if self.cfg.eve_knows_g || !in_e[i] {
                u8::from(ph.g)
            } else {
                2
            });
            // Bob announces his outcomes on T.
            key.push(if t_set.contains(&i) { u8::from(ph.h) } else { 2 });
            key.push(match (ph.eve_basis, ph.eve_bit) {
                (Some(e), Some(o)) => 4 + 2 * u8::from(e == Basis::Times) + u8::from(o),
                _ => 3,
            });
        }
        key.push(m_v as u8);
        if let Some(s) = &s {
            for i in 0..s.len() {
                key.push(u8::from(s.get(i)));
            }
        }

        let slot_count = 1usize << m_v;
        let entry = self
            .acc
            .entry(key)
            .or_insert_with(|| (m_v, vec![Rat::zero(); slot_count]));
        entry.1[key_index] += p;
        Ok(())
    }
}

/// Exhaustively enumerates every branch of the tiny protocol with exact
/// rational probabilities and evaluates the key-vs-view leakage functional.
///
/// The tiny model is lossless and noiseless; the only disturbance is the
/// attack. A branch-count estimate above 10^8 is rejected up front.
pub fn exhaustive_leakage(cfg: &TinyProtocol) -> Result<LeakageReport, QuantumError> {
    if cfg.f.cols() != cfg.k.cols() {
        return Err(QuantumError::InvalidInput("F and K widths differ".into()));
    }
    if cfg.k.rows() > 7 {
        return Err(QuantumError::TooLarge("more than 7 key bits".into()));
    }
    if !(cfg.p_t > 0.0 && cfg.p_t < 1.0) {
        return Err(QuantumError::InvalidInput("p_T must lie strictly in (0, 1)".into()));
    }
    // Conservative branch estimate: 8 (g, a, b) × attack factor × average
    // outcome branching × 2 (R membership) per photon.
    let per_photon: f64 = match cfg.attack {
        AttackStrategy::None => 8.0 * 1.5 * 2.0,
        AttackStrategy::FixedBasisMeasure { .. } => 8.0 * 1.5 * 1.5 * 2.0,
        AttackStrategy::InterceptResend { p_attack } => {
            if p_attack <= 0.0 {
                8.0 * 1.5 * 2.0
            } else if p_attack >= 1.0 {
                8.0 * 2.0 * 1.5 * 1.5 * 2.0
            } else {
                8.0 * (1.5 * 2.0 + 2.0 * 1.5 * 1.5 * 2.0)
            }
        }
    };
    let estimate = per_photon.powi(cfg.n_photons as i32);
    if estimate > 1e8 {
        return Err(QuantumError::TooLarge(format!(
            "estimated {estimate:.2e} branches exceed the 1e8 cap"
        )));
    }

    let p_attack = match cfg.attack {
        AttackStrategy::InterceptResend { p_attack } => {
            if !(0.0..=1.0).contains(&p_attack) {
                return Err(QuantumError::InvalidInput("p_attack must lie in [0, 1]".into()));
            }
            rat_from_f64(p_attack, "p_attack")?
        }
        _ => Rat::zero(),
    };
    let mut en = Enumerator {
        cfg,
        p_t: rat_from_f64(cfg.p_t, "p_T")?,
        half: Rat::new(BigInt::one(), BigInt::from(2)),
        p_attack,
        photons: Vec::with_capacity(cfg.n_photons),
        acc: BTreeMap::new(),
        branches: 0,
    };
    en.run()?;

    let mut views = Vec::with_capacity(en.acc.len());
    let mut total = Rat::zero();
    for (_, (m_v, p_k)) in en.acc {
        let p_v: Rat = p_k.iter().sum();
        total += &p_v;
        views.push(TinyView { m: m_v, p_v, p_k });
    }
    if !(total.clone() - Rat::one()).is_zero() {
        return Err(QuantumError::InvalidInput(format!(
            "internal error: total mass {total} is not exactly 1"
        )));
    }

    // Structural-zero test: every accepting view must split its mass exactly
    // uniformly over key values (p(k, v)·2^m == p(v) as rationals).
    let mut exactly_zero = true;
    let mut leakage = 0.0f64;
    for v in &views {
        if v.m == 0 {
            continue;
        }
        let scale = Rat::new(BigInt::from(1u64 << v.m), BigInt::one());
        let uniform = v.p_k.iter().all(|p| (p * &scale - &v.p_v).is_zero());
        if uniform {
            continue;
        }
        exactly_zero = false;
        let p_v = v.p_v.to_f64().unwrap();
        let mut h = 0.0;
        for p in &v.p_k {
            let c = (p / &v.p_v).to_f64().unwrap();
            if c > 0.0 {
                h -= c * c.log2();
            }
        }
        leakage += p_v * (v.m as f64 - h);
    }
    if exactly_zero {
        leakage = 0.0;
    }

    let mut p_accept = 0.0;
    let mut by_m: BTreeMap<usize, f64> = BTreeMap::new();
    for v in &views {
        let p = v.p_v.to_f64().unwrap();
        *by_m.entry(v.m).or_insert(0.0) += p;
        if v.m > 0 {
            p_accept += p;
        }
    }

    Ok(LeakageReport {
        leakage_bits: leakage,
        exactly_zero,
        p_accept,
        p_m: by_m.into_iter().collect(),
        branches: en.branches,
        views,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infotheory;

    fn bases(s: &str) -> Vec<Basis> {
        s.chars().map(|c| Basis::from_char(c).unwrap()).collect()
    }

    #[test]
    fn index_round_trip() {
        for n in 1..=6 {
            for alpha in 0..(1usize << n) {
                assert_eq!(bits_to_index(&index_to_bits(alpha, n)), alpha);
            }
        }
        // MSB-first: position 0 carries the top bit.
        let bits = index_to_bits(0b100, 3);
        assert!(bits.get(0) && !bits.get(1) && !bits.get(2));
    }

    #[test]
    fn bb84_single_photon_states() {
        let plus0 = bb84_state(&BitVec::parse("0").unwrap(), &bases("+")).unwrap();
        assert_eq!(plus0.amps(), &[1.0, 0.0]);
        let times1 = bb84_state(&BitVec::parse("1").unwrap(), &bases("x")).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((times1.amps()[0] - s).abs() < 1e-15);
        assert!((times1.amps()[1] + s).abs() < 1e-15);
    }

    #[test]
    fn bb84_states_are_unit_and_product() {
        for bits_val in 0..8u64 {
            let bits = BitVec::from_u64_lsb(bits_val, 3);
            for b in ["+++", "xxx", "+x+", "xx+"] {
                let st = bb84_state(&bits, &bases(b)).unwrap();
                assert!((st.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn measurement_matches_overlap_rules() {
        // Same basis: deterministic. Conjugate basis: 1/2.
        let g = BitVec::parse("0").unwrap();
        let st = bb84_state(&g, &bases("+")).unwrap();
        assert!((measurement_prob(&st, &g, &bases("+")).unwrap() - 1.0).abs() < 1e-12);
        let one = BitVec::parse("1").unwrap();
        assert!(measurement_prob(&st, &one, &bases("+")).unwrap().abs() < 1e-12);
        assert!((measurement_prob(&st, &g, &bases("x")).unwrap() - 0.5).abs() < 1e-12);
        assert!((measurement_prob(&st, &one, &bases("x")).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn basis_coeffs_round_trip() {
        let st = bb84_state(&BitVec::parse("101").unwrap(), &bases("x+x")).unwrap();
        let b = bases("+xx");
        let c = st.basis_coeffs(&b).unwrap();
        let back = state_from_basis_coeffs(c, &b).unwrap();
        for (x, y) in st.amps().iter().zip(back.amps()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn rho_brute_is_valid_density_matrix() {
        let f = BitMatrix::parse_rows(&["110", "011"]).unwrap();
        let s = BitVec::parse("10").unwrap();
        let rho = rho_brute(Some(&f), None, &s, &BitVec::zeros(0), &bases("x+x")).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        assert!(rho.max_asymmetry() < 1e-12);
        assert!(rho.min_eigenvalue() > -1e-10);
    }

    #[test]
    fn closed_form_matches_brute_and_recurrence() {
        // A representative instance; the acceptance suite sweeps many more.
        let f = BitMatrix::parse_rows(&["1100", "0110"]).unwrap();
        let k = BitMatrix::parse_rows(&["1111"]).unwrap();
        let s = BitVec::parse("01").unwrap();
        let kv = BitVec::parse("1").unwrap();
        let a = bases("++++");
        let btilde: Vec<Basis> = a.iter().map(|b| b.conjugate()).collect();
        let brute = rho_brute(Some(&f), Some(&k), &s, &kv, &a)
            .unwrap()
            .in_basis(&btilde)
            .unwrap();
        let closed = rho_closed_form(&f, &k, &s, &kv).unwrap();
        let rec = rho_recurrence(&f, &k, &s, &kv).unwrap();
        assert!(brute.max_abs_diff(&closed).unwrap() < 1e-10);
        assert!(closed.max_abs_diff(&rec).unwrap() < 1e-10);
    }

    #[test]
    fn closed_form_rejects_dependent_rows() {
        let f = BitMatrix::parse_rows(&["110", "110"]).unwrap();
        let k = BitMatrix::parse_rows(&["001"]).unwrap();
        let s = BitVec::parse("00").unwrap();
        let kv = BitVec::parse("0").unwrap();
        assert!(rho_closed_form(&f, &k, &s, &kv).is_err());
    }

    #[test]
    fn recurrence_detects_unattainable_syndrome() {
        // F has rank 1 written twice: inconsistent target.
        let f = BitMatrix::parse_rows(&["110", "110"]).unwrap();
        let k = BitMatrix::parse_rows(&["001"]).unwrap();
        let s = BitVec::parse("01").unwrap();
        let kv = BitVec::parse("0").unwrap();
        match rho_recurrence(&f, &k, &s, &kv) {
            Err(QuantumError::Unattainable) => {}
            other => panic!("expected Unattainable, got {other:?}"),
        }
    }

    #[test]
    fn ssp_radius_basic_cases() {
        let b = bases("xxx");
        let h = BitVec::parse("000").unwrap();
        let x_all: Vec<usize> = (0..3).collect();
        // A single conjugate-basis state at distance 0 has radius 1.
        let phi = bb84_state(&h, &b).unwrap();
        assert_eq!(ssp_min_radius(&phi, &h, &b, &x_all).unwrap(), 1);
        // A superposition reaching distance 2 has radius 3.
        let far = bb84_state(&BitVec::parse("110").unwrap(), &b).unwrap();
        let sum = phi.add(&far).unwrap().normalized().unwrap();
        assert_eq!(ssp_min_radius(&sum, &h, &b, &x_all).unwrap(), 3);
        // Restricting the distance to one position shrinks the radius.
        assert_eq!(ssp_min_radius(&sum, &h, &b, &[2]).unwrap(), 1);
    }

    #[test]
    fn sphere_projection_splits_identity() {
        let b = bases("xx+");
        let h = BitVec::parse("010").unwrap();
        let x_all: Vec<usize> = (0..3).collect();
        let near = sphere_projection(0, &h, &b, &x_all).unwrap(); // everything
        assert!((near.trace() - 8.0).abs() < 1e-10);
        let p2 = sphere_projection(2, &h, &b, &x_all).unwrap();
        // Complement has sphere-size many basis states: C(3,0)+C(3,1) = 4.
        assert!((p2.trace() - 4.0).abs() < 1e-10);
        // Projector: P² = P, checked via quadratic forms on random states.
        let phi = bb84_state(&BitVec::parse("101").unwrap(), &bases("+x+")).unwrap();
        let p_phi = p2.apply(&phi).unwrap();
        let pp_phi = p2.apply(&p_phi).unwrap();
        for (x, y) in p_phi.amps().iter().zip(pp_phi.amps()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn key_blindness_small_instance() {
        // r = 0 (F empty), K = all-ones over 5 positions: d_W = 5. A state
        // whose radius is below that sees identical overlaps for k = 0, 1.
        let n = 5;
        let f = BitMatrix::empty(n);
        let k = BitMatrix::parse_rows(&["11111"]).unwrap();
        let a = vec![Basis::Plus; n];
        let btilde: Vec<Basis> = a.iter().map(|b| b.conjugate()).collect();
        let h = BitVec::zeros(n);
        let x_all: Vec<usize> = (0..n).collect();
        // Radius-2 state: span of distance <= 1 basis states.
        let mut phi = bb84_state(&h, &btilde).unwrap();
        let mut w = BitVec::zeros(n);
        w.set(3, true);
        phi = phi.add(&bb84_state(&w, &btilde).unwrap()).unwrap().normalized().unwrap();
        assert_eq!(ssp_min_radius(&phi, &h, &btilde, &x_all).unwrap(), 2);
        let overlaps = key_overlaps(&phi, &f, &k, &BitVec::zeros(0), &a).unwrap();
        let spread = overlaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - overlaps.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread.abs() < 1e-10, "spread {spread}");
    }

    #[test]
    fn key_blindness_negative_control() {
        // A state concentrated on one full basis word (radius n) tells the
        // key values apart.
        let n = 3;
        let f = BitMatrix::empty(n);
        let k = BitMatrix::parse_rows(&["111"]).unwrap();
        let a = vec![Basis::Plus; n];
        let phi = bb84_state(&BitVec::zeros(n), &a).unwrap(); // computational word
        let overlaps = key_overlaps(&phi, &f, &k, &BitVec::zeros(0), &a).unwrap();
        let spread = (overlaps[0] - overlaps[1]).abs();
        assert!(spread > 1e-3, "spread {spread}");
    }

    fn tiny_cfg(n: usize, attack: AttackStrategy) -> TinyProtocol {
        TinyProtocol {
            n_photons: n,
            p_t: 0.5,
            delta: 0.9,
            f: BitMatrix::parse_rows(&["11"]).unwrap(),
            k: BitMatrix::parse_rows(&["10"]).unwrap(),
            attack,
            eve_knows_g: false,
        }
    }

    #[test]
    fn leakage_total_mass_and_acceptance() {
        let rep = exhaustive_leakage(&tiny_cfg(3, AttackStrategy::None)).unwrap();
        let total: f64 = rep.p_m.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(rep.p_accept > 0.0 && rep.p_accept < 1.0);
        assert!(rep.branches > 0);
    }

    #[test]
    fn passive_eve_leaks_exactly_zero() {
        let rep = exhaustive_leakage(&tiny_cfg(3, AttackStrategy::None)).unwrap();
        assert!(rep.exactly_zero);
        assert_eq!(rep.leakage_bits, 0.0);
    }

    #[test]
    fn omniscient_diagnostic_leaks_everything() {
        let mut cfg = tiny_cfg(3, AttackStrategy::None);
        cfg.eve_knows_g = true;
        let rep = exhaustive_leakage(&cfg).unwrap();
        assert!(!rep.exactly_zero);
        // Knowing g means knowing k exactly: leakage = Σ p(m)·m.
        let expect: f64 = rep.p_m.iter().map(|&(m, p)| m as f64 * p).collect::<Vec<_>>().iter().sum();
        assert!((rep.leakage_bits - expect).abs() < 1e-12);
    }

    #[test]
    fn leakage_agrees_with_generic_functional() {
        let mut cfg = tiny_cfg(3, AttackStrategy::InterceptResend { p_attack: 1.0 });
        cfg.eve_knows_g = false;
        let rep = exhaustive_leakage(&cfg).unwrap();
        let rows = rep.view_rows();
        let generic = infotheory::leakage_def1(&rows).unwrap();
        assert!((rep.leakage_bits - generic).abs() < 1e-9);
    }

    #[test]
    fn leakage_size_guard_rejects_large_n() {
        let cfg = tiny_cfg(8, AttackStrategy::InterceptResend { p_attack: 1.0 });
        match exhaustive_leakage(&cfg) {
            Err(QuantumError::TooLarge(_)) => {}
            other => panic!("expected TooLarge, got {other:?}"),
        }
    }
}
