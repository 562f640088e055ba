//! A BB84 quantum-key-distribution security toolkit.
//!
//! The crate has three layers:
//!
//! * **Simulation** — [`protocol`] runs the classical Monte Carlo view of the
//!   BB84 protocol at scale (thousands of photons), with pluggable channel
//!   noise, loss, and per-photon eavesdropping strategies, and with both
//!   syndrome- and codeword-style error-correction flows.
//! * **Bounds** — [`secbounds`] computes every closed-form finite-key security
//!   quantity: the binary entropy function and its inverse, the fictive-test
//!   tail bound, the Chernoff bound, the random-code minimal-weight bound, the
//!   full security-parameter chain (mu, gamma, eta, lambda, xi, sigma, f), the
//!   fair key-length cap, and the maximum tolerated error rate.
//! * **Verification** — [`gf2codes`], [`quantum`], [`infotheory`], and
//!   [`verify`] provide independent brute-force oracles at desk scale: exact
//!   GF(2) coset enumeration, exact density-matrix computations for small
//!   photon counts, exhaustive privacy-leakage enumeration at tiny N, and
//!   Monte Carlo tail-bound verification with Wilson confidence bounds.
//!
//! The primary interface is the `examples/` directory (one runnable example
//! per capability); the thin `bb84` binary exposes the same entry points as
//! subcommands (`simulate`, `bounds`, `sweep`, `verify`, `maxrate`,
//! `leakage`).

pub mod cli;
pub mod config;
pub mod gf2codes;
pub mod infotheory;
pub mod protocol;
pub mod quantum;
pub mod secbounds;
pub mod verify;
