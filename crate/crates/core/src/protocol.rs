//! Classical Monte Carlo simulation of the BB84 protocol at scale.
//!
//! One run walks the six protocol steps: Alice draws bits `g` and bases `a`
//! and sends N photons; Bob measures in bases `b`; the test set R is drawn by
//! independent Bernoulli(p_T) over all of {1..N}; tested positions T = R∩Ω
//! are compared in the open; the key-side positions E = Ω−R are error
//! corrected from the announced syndrome `s = F·g[E]` and compressed to the
//! key `k = K·g[E]`.
//!
//! The quantum transmission is replaced by an exact per-photon outcome table
//! (validated against the small-scale quantum oracle in the test suite):
//!
//! * matched bases, no attack: Bob sees `g[i]` flipped with probability
//!   `p_err`;
//! * mismatched bases: Bob's bit is uniform;
//! * intercept-resend on photon i: Eve's basis is uniform; if it equals
//!   `a[i]` she relays faithfully, otherwise Bob's matched-basis bit is
//!   uniform — 25% matched-basis error rate under full attack. Attacked
//!   photons bypass the channel flip noise (the attack replaces the channel).
//!
//! # Error-correction capability: declared vs guaranteed
//!
//! Desk-scale decodable code families are block-composed (e.g. Hamming(7,4)
//! blocks across E). Such a procedure corrects up to `cap_b` errors *per
//! block*; its declared capability `d_prime` is the sum of the block caps and
//! is what the X₁ validation constraint consumes. The *guaranteed* radius —
//! the largest t such that every error pattern of total weight ≤ t is
//! corrected — is the minimum block cap, recorded separately as
//! `guaranteed_radius`. Error patterns between the two can trip a per-block
//! bounded-distance failure (an honest abort that forces `accepted = false`)
//! or, beyond a block's design distance, a silent miscorrection; the
//! transcript always records both keys so agreement can be audited.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::gf2codes::{self, BitMatrix, BitVec, DecodeFailure, Gf2Error, LinearCode};
use crate::secbounds::{self, BoundsError, OutcomeSummary, ProtocolParams, Validation};

/// Errors from protocol simulation.
#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// A measurement/encoding basis: rectilinear (+) or diagonal (×).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    Plus,
    Times,
}

impl Basis {
    /// The conjugate (other) basis.
    pub fn conjugate(self) -> Basis {
        match self {
            Basis::Plus => Basis::Times,
            Basis::Times => Basis::Plus,
        }
    }

    /// Single-character form: '+' or 'x'.
    pub fn to_char(self) -> char {
        match self {
            Basis::Plus => '+',
            Basis::Times => 'x',
        }
    }

    /// Parses '+'/'x'.
    pub fn from_char(c: char) -> Result<Basis, ProtocolError> {
        match c {
            '+' => Ok(Basis::Plus),
            'x' => Ok(Basis::Times),
            _ => Err(ProtocolError::InvalidInput(format!(
                "basis character must be '+' or 'x', found {c:?}"
            ))),
        }
    }
}

/// Formats a basis string like `"++x+x"`.
pub fn bases_to_string(bases: &[Basis]) -> String {
    bases.iter().map(|b| b.to_char()).collect()
}

/// Channel imperfections applied per photon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    /// Per-photon loss probability (no detection).
    pub p_loss: f64,
    /// Per-photon matched-basis flip probability.
    pub p_err: f64,
}

impl ChannelModel {
    /// A perfect channel.
    pub fn noiseless() -> Self {
        ChannelModel {
            p_loss: 0.0,
            p_err: 0.0,
        }
    }
}

/// Per-photon eavesdropping strategies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttackStrategy {
    /// Eve does nothing.
    None,
    /// Eve measures each photon independently with probability `p_attack`,
    /// in a uniformly random basis, and resends her outcome.
    InterceptResend { p_attack: f64 },
    /// Eve measures every photon in one fixed basis and resends.
    FixedBasisMeasure { basis: Basis },
}

/// The code family used for information reconciliation on E.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeFamily {
    /// Length-`block_len` repetition blocks tiled across E.
    Repetition { block_len: usize },
    /// Hamming(7,4) blocks tiled across E.
    Hamming74,
    /// One random systematic code over all of E (desk scale only, n_E ≤ 22).
    SystematicRandom { rows: usize },
}

/// One reconciliation block: a small decodable code over a contiguous slice
/// of E.
#[derive(Debug, Clone)]
struct Block {
    code: LinearCode,
    /// Start offset within E (0-indexed).
    offset: usize,
    /// Bounded-distance cap for this block.
    cap: usize,
}

/// The block-composed reconciliation code over E.
#[derive(Debug, Clone)]
pub struct BlockCode {
    blocks: Vec<Block>,
    n: usize,
    r: usize,
    d_prime: usize,
    guaranteed_radius: usize,
}

/// How a reconciliation attempt ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EcStatus {
    /// All blocks decoded within their caps.
    Ok,
    /// Some block saw more errors than its bounded-distance cap.
    TooManyErrors,
    /// Some block hit a decoding tie.
    Ambiguous,
}

fn block_cap(code: &LinearCode) -> Result<usize, Gf2Error> {
    // A full-rank check matrix pins the block down to a single coset member:
    // the syndrome reveals the bits outright, so any error count is
    // recoverable. Otherwise the bounded-distance cap is the code's radius.
    if code.rank() == code.len() {
        Ok(code.len())
    } else {
        code.correction_radius()
    }
}

impl BlockCode {
    /// Plans the reconciliation code for `n_e` key-side positions. A short
    /// tail that cannot host a full block falls back to an identity check
    /// (those bits are announced outright and counted in r).
    pub fn build(family: CodeFamily, n_e: usize, code_seed: u64) -> Result<BlockCode, ProtocolError> {
        let mut blocks = Vec::new();
        let mut offset = 0;
        match family {
            CodeFamily::Repetition { block_len } => {
                if block_len < 2 {
                    return Err(ProtocolError::InvalidInput(
                        "repetition block length must be at least 2".into(),
                    ));
                }
                while n_e - offset >= block_len {
                    blocks.push((gf2codes::repetition_code(block_len), offset));
                    offset += block_len;
                }
                let tail = n_e - offset;
                if tail == 1 {
                    blocks.push((LinearCode::new(BitMatrix::identity(1)), offset));
                } else if tail >= 2 {
                    blocks.push((gf2codes::repetition_code(tail), offset));
                }
            }
            CodeFamily::Hamming74 => {
                while n_e - offset >= 7 {
                    blocks.push((gf2codes::hamming74_code(), offset));
                    offset += 7;
                }
                let tail = n_e - offset;
                if tail > 0 {
                    blocks.push((LinearCode::new(BitMatrix::identity(tail)), offset));
                }
            }
            CodeFamily::SystematicRandom { rows } => {
                if n_e > gf2codes::MAX_ENUM_BITS {
                    return Err(ProtocolError::Gf2(Gf2Error::CapacityExceeded(format!(
                        "systematic-random reconciliation needs a decode table; n_E={n_e} \
                         exceeds the cap {}",
                        gf2codes::MAX_ENUM_BITS
                    ))));
                }
                if n_e > 0 {
                    let code = if rows >= n_e {
                        LinearCode::new(BitMatrix::identity(n_e))
                    } else {
                        let ftilde = gf2codes::random_matrix(rows, n_e - rows, code_seed);
                        gf2codes::systematic_code(&ftilde)?
                    };
                    blocks.push((code, 0));
                }
            }
        }
        let mut built = Vec::with_capacity(blocks.len());
        let mut r = 0;
        let mut d_prime = 0;
        let mut guaranteed = usize::MAX;
        for (code, offset) in blocks {
            let code = code.with_decode_table()?;
            let cap = block_cap(&code)?;
            r += code.check_rows();
            d_prime += cap;
            guaranteed = guaranteed.min(cap);
            built.push(Block { code, offset, cap });
        }
        if built.is_empty() {
            guaranteed = 0;
        }
        Ok(BlockCode {
            blocks: built,
            n: n_e,
            r,
            d_prime,
            guaranteed_radius: guaranteed,
        })
    }

    /// Block length n_E.
    pub fn len(&self) -> usize {
        self.n
    }

    /// True when E is empty.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Total announced check bits r.
    pub fn check_rows(&self) -> usize {
        self.r
    }

    /// Declared correction capability: the sum of per-block caps. This is the
    /// procedure's design capability when errors are dispersed; it is the d'
    /// that the X₁ constraint consumes.
    pub fn d_prime(&self) -> usize {
        self.d_prime
    }

    /// The worst-case guarantee: every error pattern of total weight at most
    /// this value decodes correctly (each block then sees at most its cap).
    pub fn guaranteed_radius(&self) -> usize {
        self.guaranteed_radius
    }

    /// Assembles the full block-diagonal parity-check matrix F.
    pub fn parity_matrix(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.r, self.n);
        let mut row = 0;
        for b in &self.blocks {
            let f = b.code.parity_check();
            for i in 0..f.rows() {
                for j in 0..f.cols() {
                    if f.get(i, j) {
                        m.set(row + i, b.offset + j, true);
                    }
                }
            }
            row += f.rows();
        }
        m
    }

    /// The syndrome s = F·g_E, computed block-wise.
    pub fn syndrome(&self, g_e: &BitVec) -> Result<BitVec, ProtocolError> {
        if g_e.len() != self.n {
            return Err(ProtocolError::Gf2(Gf2Error::DimensionMismatch(format!(
                "string length {} does not match n_E = {}",
                g_e.len(),
                self.n
            ))));
        }
        let mut s = BitVec::zeros(self.r);
        let mut row = 0;
        for b in &self.blocks {
            let slice = g_e.restrict(&(b.offset..b.offset + b.code.len()).collect::<Vec<_>>());
            let syn = b.code.syndrome(&slice)?;
            for i in 0..syn.len() {
                s.set(row + i, syn.get(i));
            }
            row += syn.len();
        }
        Ok(s)
    }

    /// Corrects `h_e` toward the coset with syndrome `s`, block by block,
    /// each block bounded-distance capped at its design radius.
    pub fn decode(
        &self,
        h_e: &BitVec,
        s: &BitVec,
    ) -> Result<Result<BitVec, EcStatus>, ProtocolError> {
        if h_e.len() != self.n || s.len() != self.r {
            return Err(ProtocolError::Gf2(Gf2Error::DimensionMismatch(
                "decode input lengths do not match the block plan".into(),
            )));
        }
        let mut out = BitVec::zeros(self.n);
        let mut row = 0;
        for b in &self.blocks {
            let len = b.code.len();
            let positions: Vec<usize> = (b.offset..b.offset + len).collect();
            let word = h_e.restrict(&positions);
            let target = s.restrict(&(row..row + b.code.check_rows()).collect::<Vec<_>>());
            match b.code.decode_toward(&word, &target, b.cap)? {
                Ok(corrected) => {
                    for (j, &pos) in positions.iter().enumerate() {
                        out.set(pos, corrected.get(j));
                    }
                }
                Err(DecodeFailure::Ambiguous { .. }) => return Ok(Err(EcStatus::Ambiguous)),
                Err(_) => return Ok(Err(EcStatus::TooManyErrors)),
            }
            row += b.code.check_rows();
        }
        Ok(Ok(out))
    }
}

/// One full protocol run's random outcome.
#[derive(Debug, Clone)]
pub struct Transcript {
    /// Alice's bases.
    pub a: Vec<Basis>,
    /// Alice's bits.
    pub g: BitVec,
    /// Bob's bases.
    pub b: Vec<Basis>,
    /// Bob's outcomes; `None` marks a lost photon.
    pub h: Vec<Option<bool>>,
    /// Detected positions (0-indexed internally; serialized 1-indexed).
    pub d_set: Vec<usize>,
    /// Matched detected positions Ω.
    pub omega: Vec<usize>,
    /// Test-candidate set R.
    pub r_set: Vec<usize>,
    /// Tested positions T = R ∩ Ω.
    pub t_set: Vec<usize>,
    /// Key-side positions E = Ω − R.
    pub e_set: Vec<usize>,
    /// Error count on T.
    pub d_t: usize,
    /// Parity-check matrix over E.
    pub f: BitMatrix,
    /// Privacy-amplification matrix.
    pub k_matrix: BitMatrix,
    /// Announced syndrome s = F·g[E].
    pub s: BitVec,
    /// Alice's key K·g[E].
    pub k_alice: BitVec,
    /// Bob's key K·(corrected h)[E].
    pub k_bob: BitVec,
    /// Final acceptance (validation constraints and reconciliation both ok).
    pub accepted: bool,
    /// Key length (0 when rejected).
    pub m: usize,
    /// Declared correction capability d' fed to X₁.
    pub d_prime: usize,
    /// Worst-case guaranteed correction radius of the block procedure.
    pub guaranteed_radius: usize,
    /// Announced check bits r.
    pub r: usize,
    /// How reconciliation ended.
    pub ec_status: EcStatus,
    /// The four validation constraints.
    pub validation: Validation,
    /// True error count on E (simulator-side bookkeeping for audits).
    pub e_errors: usize,
}

impl Transcript {
    /// Serializes the transcript as one JSON object (field names match the
    /// struct; sets are 1-indexed position arrays; matrices are row-string
    /// arrays). Line-oriented: no internal newlines.
    pub fn to_json(&self) -> String {
        fn set_json(v: &[usize]) -> String {
            let inner: Vec<String> = v.iter().map(|i| (i + 1).to_string()).collect();
            format!("[{}]", inner.join(","))
        }
        fn matrix_json(m: &BitMatrix) -> String {
            let rows: Vec<String> = (0..m.rows()).map(|i| format!("\"{}\"", m.row(i))).collect();
            format!("[{}]", rows.join(","))
        }
        let h: String = self
            .h
            .iter()
            .map(|o| match o {
                None => '-',
                Some(false) => '0',
                Some(true) => '1',
            })
            .collect();
        format!(
            "{{\"a\":\"{}\",\"g\":\"{}\",\"b\":\"{}\",\"h\":\"{}\",\"D\":{},\"Omega\":{},\"R\":{},\"T\":{},\"E\":{},\"d_T\":{},\"F\":{},\"K\":{},\"s\":\"{}\",\"k_alice\":\"{}\",\"k_bob\":\"{}\",\"accepted\":{},\"m\":{},\"d_prime\":{},\"guaranteed_radius\":{},\"r\":{},\"ec_status\":\"{}\",\"e_errors\":{}}}",
            bases_to_string(&self.a),
            self.g,
            bases_to_string(&self.b),
            h,
            set_json(&self.d_set),
            set_json(&self.omega),
            set_json(&self.r_set),
            set_json(&self.t_set),
            set_json(&self.e_set),
            self.d_t,
            matrix_json(&self.f),
            matrix_json(&self.k_matrix),
            self.s,
            self.k_alice,
            self.k_bob,
            self.accepted,
            self.m,
            self.d_prime,
            self.guaranteed_radius,
            self.r,
            match self.ec_status {
                EcStatus::Ok => "ok",
                EcStatus::TooManyErrors => "too_many_errors",
                EcStatus::Ambiguous => "ambiguous",
            },
            self.e_errors,
        )
    }
}

/// Splits positions into the sifting sets: detected D, matched Ω, test
/// candidates R (independent Bernoulli(p_T) over all of {1..N}), tested
/// T = R∩Ω, and key side E = Ω−R.
pub fn sift_and_partition(
    a: &[Basis],
    b: &[Basis],
    h: &[Option<bool>],
    p_t: f64,
    rng: &mut impl Rng,
) -> (Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>) {
    assert!(a.len() == b.len() && b.len() == h.len());
    let n = a.len();
    let mut d_set = Vec::new();
    let mut omega = Vec::new();
    for i in 0..n {
        if h[i].is_some() {
            d_set.push(i);
            if a[i] == b[i] {
                omega.push(i);
            }
        }
    }
    let mut r_set = Vec::new();
    for i in 0..n {
        if rng.random::<f64>() < p_t {
            r_set.push(i);
        }
    }
    let in_r: Vec<bool> = {
        let mut v = vec![false; n];
        for &i in &r_set {
            v[i] = true;
        }
        v
    };
    let t_set: Vec<usize> = omega.iter().copied().filter(|&i| in_r[i]).collect();
    let e_set: Vec<usize> = omega.iter().copied().filter(|&i| !in_r[i]).collect();
    (d_set, omega, r_set, t_set, e_set)
}

/// Syndrome-flow reconciliation: Alice announces s = F·g_E and Bob corrects
/// h_E into the coset with that syndrome.
pub fn error_correct_syndrome(
    g_e: &BitVec,
    h_e: &BitVec,
    code: &LinearCode,
    d_prime: usize,
) -> Result<Result<BitVec, DecodeFailure>, ProtocolError> {
    let s = code.syndrome(g_e)?;
    Ok(code.decode_toward(h_e, &s, d_prime)?)
}

/// Codeword-flow reconciliation: Alice draws a random codeword c_x, announces
/// ŝ = g_E ⊕ c_x; Bob corrects ŝ ⊕ h_E to a codeword and recovers
/// g_E = codeword ⊕ ŝ. Information-theoretically equivalent to announcing the
/// syndrome.
pub fn error_correct_codeword(
    g_e: &BitVec,
    h_e: &BitVec,
    code: &LinearCode,
    d_prime: usize,
    seed: u64,
) -> Result<Result<BitVec, DecodeFailure>, ProtocolError> {
    let basis = gf2codes::null_space(code.parity_check());
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut c_x = BitVec::zeros(code.len());
    for v in &basis {
        if rng.random::<bool>() {
            c_x.xor_assign(v);
        }
    }
    let s_hat = g_e.xor(&c_x);
    let received = s_hat.xor(h_e);
    match code.decode(&received, d_prime)? {
        Ok(cw) => Ok(Ok(cw.xor(&s_hat))),
        Err(e) => Ok(Err(e)),
    }
}

/// The systematic-code shortcut of the codeword flow: Alice sends only the
/// syndrome s; Bob pads it to ŝ = [0 s], corrects w = h_E ⊕ ŝ to a codeword,
/// and recovers g_E = codeword ⊕ ŝ.
pub fn error_correct_systematic_shortcut(
    g_e: &BitVec,
    h_e: &BitVec,
    ftilde: &BitMatrix,
    d_prime: usize,
) -> Result<Result<BitVec, DecodeFailure>, ProtocolError> {
    let code = gf2codes::systematic_code(ftilde)?.with_decode_table()?;
    let s = code.syndrome(g_e)?;
    let mut s_hat = BitVec::zeros(code.len());
    for i in 0..s.len() {
        s_hat.set(ftilde.cols() + i, s.get(i));
    }
    let w = h_e.xor(&s_hat);
    match code.decode(&w, d_prime)? {
        Ok(cw) => Ok(Ok(cw.xor(&s_hat))),
        Err(e) => Ok(Err(e)),
    }
}

/// Privacy amplification: k = K·g_E.
pub fn privacy_amplify(k_matrix: &BitMatrix, g_e: &BitVec) -> Result<BitVec, ProtocolError> {
    Ok(k_matrix.mul_vec(g_e)?)
}

/// Resolves the effective m_max cap: an explicit positive `params.m_max` is
/// used as-is; 0 means "derive from the fair estimates".
pub fn effective_m_max(params: &ProtocolParams, channel: &ChannelModel) -> Result<usize, BoundsError> {
    if params.m_max > 0 {
        return Ok(params.m_max);
    }
    let fair = secbounds::fair_estimates(params, 1.0 - channel.p_loss)?;
    if fair.n_e_fair == 0 || 2 * fair.d_plus_fair >= fair.n_e_fair {
        return Ok(0);
    }
    secbounds::m_max_fair(params, fair.n_e_fair, fair.r_fair, fair.d_plus_fair)
}

/// Runs one full protocol instance.
///
/// All randomness comes from one ChaCha stream seeded by `seed`, drawn in a
/// fixed documented order (g, a, b, loss, per-photon attack/channel outcomes,
/// R memberships, code randomness, K entries), so runs are bit-reproducible
/// and trials parallelize by seed.
pub fn run_protocol(
    params: &ProtocolParams,
    channel: &ChannelModel,
    attack: &AttackStrategy,
    family: CodeFamily,
    seed: u64,
) -> Result<Transcript, ProtocolError> {
    params.check()?;
    let n = params.n_photons;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    // Step 1-2: Alice's bits/bases, Bob's bases.
    let mut g = BitVec::zeros(n);
    for i in 0..n {
        g.set(i, rng.random::<bool>());
    }
    let a: Vec<Basis> = (0..n)
        .map(|_| if rng.random::<bool>() { Basis::Times } else { Basis::Plus })
        .collect();
    let b: Vec<Basis> = (0..n)
        .map(|_| if rng.random::<bool>() { Basis::Times } else { Basis::Plus })
        .collect();

    // Loss flags, independent of every basis choice.
    let lost: Vec<bool> = (0..n).map(|_| rng.random::<f64>() < channel.p_loss).collect();

    // Per-photon transmission via the exact outcome table.
    let mut h: Vec<Option<bool>> = Vec::with_capacity(n);
    for i in 0..n {
        if lost[i] {
            h.push(None);
            continue;
        }
        let attacked = match attack {
            AttackStrategy::None => false,
            AttackStrategy::InterceptResend { p_attack } => rng.random::<f64>() < *p_attack,
            AttackStrategy::FixedBasisMeasure { .. } => true,
        };
        let bit = if attacked {
            let eve_basis = match attack {
                AttackStrategy::FixedBasisMeasure { basis } => *basis,
                _ => {
                    if rng.random::<bool>() {
                        Basis::Times
                    } else {
                        Basis::Plus
                    }
                }
            };
            let eve_bit = if eve_basis == a[i] { g.get(i) } else { rng.random::<bool>() };
            if b[i] == eve_basis {
                eve_bit
            } else {
                rng.random::<bool>()
            }
        } else if a[i] == b[i] {
            g.get(i) ^ (rng.random::<f64>() < channel.p_err)
        } else {
            rng.random::<bool>()
        };
        h.push(Some(bit));
    }

    // Step 3-4: sifting and testing.
    let (d_set, omega, r_set, t_set, e_set) = sift_and_partition(&a, &b, &h, params.p_t, &mut rng);
    let d_t = t_set
        .iter()
        .filter(|&&i| h[i] != Some(g.get(i)))
        .count();

    // Step 5: reconciliation over E.
    let n_e = e_set.len();
    let code_seed = rng.random::<u64>();
    let plan = BlockCode::build(family, n_e, code_seed)?;
    let g_e = g.restrict(&e_set);
    let h_e_raw = {
        let mut v = BitVec::zeros(n_e);
        for (j, &i) in e_set.iter().enumerate() {
            v.set(j, h[i] == Some(true));
        }
        v
    };
    let e_errors = g_e.hamming_distance(&h_e_raw);
    let s = plan.syndrome(&g_e)?;
    let (ec_status, h_e_corrected) = match plan.decode(&h_e_raw, &s)? {
        Ok(corrected) => (EcStatus::Ok, corrected),
        Err(status) => (status, h_e_raw.clone()),
    };

    // Step 6: key sizing and privacy amplification.
    let m_cap = effective_m_max(params, channel)?;
    let m_x2 = secbounds::max_m_for_x2(n_e, omega.len(), plan.check_rows(), params)?;
    let m = m_x2.min(m_cap);
    let k_matrix = gf2codes::random_matrix_from(m, n_e, &mut rng);
    let k_alice = privacy_amplify(&k_matrix, &g_e)?;
    let k_bob = privacy_amplify(&k_matrix, &h_e_corrected)?;

    // Validation runs at the very end, when every variable is defined.
    let resolved_params = ProtocolParams {
        m_max: m_cap,
        ..params.clone()
    };
    let validation = secbounds::validate(
        &OutcomeSummary {
            d_t,
            n_omega: omega.len(),
            n_e,
            d_prime: plan.d_prime(),
            r: plan.check_rows(),
            m,
        },
        &resolved_params,
    )?;
    let accepted = validation.accepted && ec_status == EcStatus::Ok && m > 0;

    let (m, k_alice, k_bob) = if accepted {
        (m, k_alice, k_bob)
    } else {
        (0, BitVec::zeros(0), BitVec::zeros(0))
    };

    Ok(Transcript {
        a,
        g,
        b,
        h,
        d_set,
        omega,
        r_set,
        t_set,
        e_set,
        d_t,
        f: plan.parity_matrix(),
        k_matrix,
        s,
        k_alice,
        k_bob,
        accepted,
        m,
        d_prime: plan.d_prime(),
        guaranteed_radius: plan.guaranteed_radius(),
        r: plan.check_rows(),
        ec_status,
        validation,
        e_errors,
    })
}

/// Aggregate statistics over a batch of independent protocol runs.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchSummary {
    pub trials: usize,
    pub accepted: usize,
    /// Fraction of runs that passed all validation constraints.
    pub accept_rate: f64,
    /// Mean d_T/|T| over runs with a nonempty test set.
    pub mean_qber_t: f64,
    /// Fraction of accepted runs whose keys agree (1.0 when none accepted).
    pub key_agree_rate: f64,
    /// Mean key length over accepted runs (0 when none accepted).
    pub mean_m: f64,
}

/// Runs `trials` independent protocol instances (seeds `seed..seed+trials`)
/// in parallel and aggregates.
pub fn run_batch(
    params: &ProtocolParams,
    channel: &ChannelModel,
    attack: &AttackStrategy,
    family: CodeFamily,
    trials: usize,
    seed: u64,
) -> Result<BatchSummary, ProtocolError> {
    use rayon::prelude::*;
    let per_run: Vec<(bool, Option<f64>, bool, usize)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let tr = run_protocol(params, channel, attack, family, seed.wrapping_add(t))?;
            let qber = if tr.t_set.is_empty() {
                None
            } else {
                Some(tr.d_t as f64 / tr.t_set.len() as f64)
            };
            Ok((tr.accepted, qber, tr.k_alice == tr.k_bob, tr.m))
        })
        .collect::<Result<_, ProtocolError>>()?;
    let accepted = per_run.iter().filter(|r| r.0).count();
    let qbers: Vec<f64> = per_run.iter().filter_map(|r| r.1).collect();
    let agree = per_run.iter().filter(|r| r.0 && r.2).count();
    let m_sum: usize = per_run.iter().filter(|r| r.0).map(|r| r.3).sum();
    Ok(BatchSummary {
        trials,
        accepted,
        accept_rate: accepted as f64 / trials as f64,
        mean_qber_t: if qbers.is_empty() {
            0.0
        } else {
            qbers.iter().sum::<f64>() / qbers.len() as f64
        },
        key_agree_rate: if accepted == 0 {
            1.0
        } else {
            agree as f64 / accepted as f64
        },
        mean_m: if accepted == 0 {
            0.0
        } else {
            m_sum as f64 / accepted as f64
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lax_params(n: usize) -> ProtocolParams {
        ProtocolParams {
            n_photons: n,
            ..ProtocolParams::default()
        }
    }

    #[test]
    fn noiseless_run_accepts_with_matching_keys() {
        let params = lax_params(2000);
        let t = run_protocol(
            &params,
            &ChannelModel::noiseless(),
            &AttackStrategy::None,
            CodeFamily::Hamming74,
            7,
        )
        .unwrap();
        assert_eq!(t.d_t, 0);
        assert!(t.accepted, "validation: {:?}", t.validation);
        assert!(t.m > 0);
        assert_eq!(t.k_alice, t.k_bob);
    }

    #[test]
    fn total_loss_rejects() {
        let params = lax_params(500);
        let channel = ChannelModel {
            p_loss: 1.0,
            p_err: 0.0,
        };
        let t = run_protocol(&params, &channel, &AttackStrategy::None, CodeFamily::Hamming74, 3)
            .unwrap();
        assert!(t.d_set.is_empty());
        assert!(!t.accepted);
        assert_eq!(t.m, 0);
        assert!(t.k_alice.is_empty());
    }

    #[test]
    fn intercept_resend_qber_quarter() {
        // Mean d_T/|T| over enough tested positions approaches 1/4.
        let params = lax_params(2000);
        let channel = ChannelModel::noiseless();
        let attack = AttackStrategy::InterceptResend { p_attack: 1.0 };
        let mut errors = 0usize;
        let mut tested = 0usize;
        let mut seed = 1000;
        while tested < 100_000 {
            let t = run_protocol(&params, &channel, &attack, CodeFamily::Repetition { block_len: 5 }, seed)
                .unwrap();
            errors += t.d_t;
            tested += t.t_set.len();
            seed += 1;
        }
        let qber = errors as f64 / tested as f64;
        assert!((qber - 0.25).abs() < 0.01, "QBER {qber}");
    }

    #[test]
    fn sift_partition_properties() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let n = 200;
        let a: Vec<Basis> = (0..n).map(|i| if i % 2 == 0 { Basis::Plus } else { Basis::Times }).collect();
        // Full match, no loss.
        let h: Vec<Option<bool>> = vec![Some(false); n];
        let (_d, omega, _r, t, e) = sift_and_partition(&a, &a, &h, 0.5, &mut rng);
        assert_eq!(omega.len(), n);
        assert_eq!(t.len() + e.len(), n);

        // p_T = 0 puts everything on the key side.
        let (_d, omega, r, t, e) = sift_and_partition(&a, &a, &h, 0.0, &mut rng);
        assert!(r.is_empty() && t.is_empty());
        assert_eq!(e, omega);
    }

    #[test]
    fn test_fraction_matches_p_t() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let n = 500;
        let a = vec![Basis::Plus; n];
        let h = vec![Some(false); n];
        let trials = 10_000 / 10;
        let mut total_t = 0usize;
        for _ in 0..trials {
            let (_, _, _, t, _) = sift_and_partition(&a, &a, &h, 0.3, &mut rng);
            total_t += t.len();
        }
        let samples = (trials * n) as f64;
        let rate = total_t as f64 / samples;
        let sigma = (0.3f64 * 0.7 / samples).sqrt();
        assert!((rate - 0.3).abs() < 3.0 * sigma + 1e-9, "rate {rate}");
    }

    #[test]
    fn syndrome_flow_recovers_small_errors() {
        let code = gf2codes::hamming74_code().with_decode_table().unwrap();
        let g_e = BitVec::parse("1011010").unwrap();
        // Zero errors: unchanged.
        assert_eq!(
            error_correct_syndrome(&g_e, &g_e, &code, 1).unwrap().unwrap(),
            g_e
        );
        // Every single-bit corruption recovers.
        for i in 0..7 {
            let mut h_e = g_e.clone();
            h_e.set(i, !h_e.get(i));
            assert_eq!(
                error_correct_syndrome(&g_e, &h_e, &code, 1).unwrap().unwrap(),
                g_e
            );
        }
    }

    #[test]
    fn repetition_syndrome_flow_majority() {
        let code = gf2codes::repetition_code(3).with_decode_table().unwrap();
        let g_e = BitVec::parse("111").unwrap();
        let h_e = BitVec::parse("101").unwrap();
        assert_eq!(
            error_correct_syndrome(&g_e, &h_e, &code, 1).unwrap().unwrap(),
            g_e
        );
    }

    #[test]
    fn codeword_flow_equivalent_to_syndrome_flow() {
        let code = gf2codes::hamming74_code().with_decode_table().unwrap();
        let g_e = BitVec::parse("0110011").unwrap();
        for pattern in 0u64..128 {
            let e = BitVec::from_u64_lsb(pattern, 7);
            let h_e = g_e.xor(&e);
            let syn = error_correct_syndrome(&g_e, &h_e, &code, 1).unwrap();
            let cw = error_correct_codeword(&g_e, &h_e, &code, 1, 99).unwrap();
            match (syn, cw) {
                (Ok(x), Ok(y)) => {
                    assert_eq!(x, y);
                    if e.weight() <= 1 {
                        assert_eq!(x, g_e);
                    }
                }
                (Err(_), Err(_)) => {}
                other => panic!("flows disagree on pattern {pattern}: {other:?}"),
            }
        }
    }

    #[test]
    fn systematic_shortcut_agrees_with_general_flow() {
        // A systematic Hamming-like code: random F-tilde with 3 checks.
        let ftilde = gf2codes::random_matrix(3, 4, 31);
        let code = gf2codes::systematic_code(&ftilde).unwrap().with_decode_table().unwrap();
        let g_e = BitVec::parse("1100101").unwrap();
        for pattern in 0u64..128 {
            let e = BitVec::from_u64_lsb(pattern, 7);
            let h_e = g_e.xor(&e);
            let a = error_correct_syndrome(&g_e, &h_e, &code, 1).unwrap();
            let b = error_correct_systematic_shortcut(&g_e, &h_e, &ftilde, 1).unwrap();
            match (a, b) {
                (Ok(x), Ok(y)) => assert_eq!(x, y),
                (Err(_), Err(_)) => {}
                other => panic!("shortcut disagrees on pattern {pattern}: {other:?}"),
            }
        }
    }

    #[test]
    fn privacy_amplify_cases() {
        let g_e = BitVec::parse("10110").unwrap();
        assert_eq!(
            privacy_amplify(&BitMatrix::identity(5), &g_e).unwrap(),
            g_e
        );
        let parity = BitMatrix::parse_rows(&["11111"]).unwrap();
        assert_eq!(privacy_amplify(&parity, &g_e).unwrap(), BitVec::parse("1").unwrap());
        // Linearity on random triples.
        let k = gf2codes::random_matrix(3, 8, 15);
        for seed in 0..10 {
            let x = gf2codes::random_matrix(1, 8, 100 + seed).row(0).clone();
            let y = gf2codes::random_matrix(1, 8, 200 + seed).row(0).clone();
            let lhs = privacy_amplify(&k, &x.xor(&y)).unwrap();
            let rhs = privacy_amplify(&k, &x).unwrap().xor(&privacy_amplify(&k, &y).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn block_code_counts_and_matrix_shape() {
        let plan = BlockCode::build(CodeFamily::Hamming74, 500, 0).unwrap();
        // 71 full blocks and a 3-bit identity tail.
        assert_eq!(plan.check_rows(), 71 * 3 + 3);
        assert_eq!(plan.d_prime(), 71 + 3);
        assert_eq!(plan.guaranteed_radius(), 1);
        let f = plan.parity_matrix();
        assert_eq!((f.rows(), f.cols()), (216, 500));

        let plan = BlockCode::build(CodeFamily::Repetition { block_len: 5 }, 17, 0).unwrap();
        // Three length-5 blocks plus a 2-bit repetition tail.
        assert_eq!(plan.check_rows(), 3 * 4 + 1);
        assert_eq!(plan.d_prime(), 3 * 2); // the 2-bit tail has radius 0
        assert_eq!(plan.guaranteed_radius(), 0);
    }

    #[test]
    fn block_decode_guarantee_within_radius() {
        // Any pattern of weight <= guaranteed radius decodes correctly.
        let plan = BlockCode::build(CodeFamily::Repetition { block_len: 5 }, 20, 0).unwrap();
        assert_eq!(plan.guaranteed_radius(), 2);
        let g_e = gf2codes::random_matrix(1, 20, 9).row(0).clone();
        let s = plan.syndrome(&g_e).unwrap();
        let mut checked = 0;
        for pattern in 0u64..(1 << 20) {
            let w = (pattern as u64).count_ones();
            if w > 2 {
                continue;
            }
            let e = BitVec::from_u64_lsb(pattern, 20);
            let h_e = g_e.xor(&e);
            let decoded = plan.decode(&h_e, &s).unwrap().unwrap();
            assert_eq!(decoded, g_e);
            checked += 1;
        }
        assert_eq!(checked, 1 + 20 + 190);
    }

    #[test]
    fn block_decode_failure_modes() {
        // Three errors in a length-5 repetition block land within radius 2 of
        // the opposite codeword: a silent miscorrection, which is exactly why
        // the guarantee is stated per block and audited via e_errors.
        let plan = BlockCode::build(CodeFamily::Repetition { block_len: 5 }, 10, 0).unwrap();
        let g_e = BitVec::zeros(10);
        let s = plan.syndrome(&g_e).unwrap();
        let h_e = BitVec::parse("1110000000").unwrap();
        let decoded = plan.decode(&h_e, &s).unwrap().unwrap();
        assert_eq!(decoded, BitVec::parse("1111100000").unwrap());
        assert_ne!(decoded, g_e);

        // Two errors in a length-4 repetition block exceed the radius-1 cap:
        // the block aborts instead of guessing.
        let plan = BlockCode::build(CodeFamily::Repetition { block_len: 4 }, 8, 0).unwrap();
        let g_e = BitVec::zeros(8);
        let s = plan.syndrome(&g_e).unwrap();
        let h_e = BitVec::parse("11000000").unwrap();
        assert_eq!(plan.decode(&h_e, &s).unwrap(), Err(EcStatus::TooManyErrors));
    }

    #[test]
    fn reproducible_runs() {
        let params = lax_params(300);
        let channel = ChannelModel {
            p_loss: 0.1,
            p_err: 0.02,
        };
        let t1 = run_protocol(&params, &channel, &AttackStrategy::None, CodeFamily::Hamming74, 11)
            .unwrap();
        let t2 = run_protocol(&params, &channel, &AttackStrategy::None, CodeFamily::Hamming74, 11)
            .unwrap();
        assert_eq!(t1.to_json(), t2.to_json());
        let t3 = run_protocol(&params, &channel, &AttackStrategy::None, CodeFamily::Hamming74, 12)
            .unwrap();
        assert_ne!(t1.to_json(), t3.to_json());
    }

    #[test]
    fn acceptance_rate_majority_in_quiet_regime() {
        // Sanity: with default floors, a quiet channel
        // (p_err < delta p_T / 2) and the Hamming family, most runs accept.
        let params = ProtocolParams {
            n_photons: 10_000,
            ..ProtocolParams::default()
        };
        let channel = ChannelModel {
            p_loss: 0.0,
            p_err: 0.01,
        };
        let mut accepted = 0;
        let runs = 60;
        for seed in 0..runs {
            let t = run_protocol(&params, &channel, &AttackStrategy::None, CodeFamily::Hamming74, seed)
                .unwrap();
            if t.accepted {
                accepted += 1;
            }
        }
        assert!(accepted * 2 > runs, "accepted {accepted}/{runs}");
    }

    #[test]
    fn accepted_runs_within_guarantee_agree() {
        // The deterministic part of the correctness claim: whenever the true
        // E-error count is within the worst-case guarantee and decoding
        // reports success, the keys agree.
        let params = ProtocolParams {
            n_photons: 10_000,
            ..ProtocolParams::default()
        };
        let channel = ChannelModel {
            p_loss: 0.0,
            p_err: 0.001,
        };
        for seed in 0..40 {
            let t = run_protocol(&params, &channel, &AttackStrategy::None, CodeFamily::Hamming74, seed)
                .unwrap();
            if t.accepted && t.e_errors <= t.guaranteed_radius {
                assert_eq!(t.k_alice, t.k_bob, "seed {seed}");
            }
        }
    }

    #[test]
    fn transcript_json_shape() {
        let params = lax_params(50);
        let t = run_protocol(
            &params,
            &ChannelModel::noiseless(),
            &AttackStrategy::None,
            CodeFamily::Repetition { block_len: 3 },
            1,
        )
        .unwrap();
        let json = t.to_json();
        for field in [
            "\"a\":", "\"g\":", "\"b\":", "\"h\":", "\"D\":", "\"Omega\":", "\"R\":", "\"T\":",
            "\"E\":", "\"d_T\":", "\"F\":", "\"K\":", "\"s\":", "\"k_alice\":", "\"k_bob\":",
            "\"accepted\":", "\"m\":",
        ] {
            assert!(json.contains(field), "missing {field} in {json}");
        }
        assert!(!json.contains('\n'));
    }
}
