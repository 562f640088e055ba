//! Computes the full finite-key security-parameter chain for a parameter
//! set: the fictive-test bound mu, its derived chain (gamma, eta, lambda,
//! xi, sigma), the privacy bound f, the fair key-length cap, and the maximum
//! tolerated error rate.
//!
//! Run with: `cargo run --example security_bounds`

use bb84_toolkit::protocol::{self, ChannelModel};
use bb84_toolkit::secbounds::{self, ProtocolParams};

fn main() {
    let params = ProtocolParams {
        n_photons: 10_000,
        ..ProtocolParams::default()
    };
    let channel = ChannelModel {
        p_loss: 0.05,
        p_err: 0.01,
    };

    println!("parameters: N={} delta={} p_T={} beta={} epsilon={} tau={}",
        params.n_photons, params.delta, params.p_t, params.beta, params.epsilon, params.tau);

    let fair = secbounds::fair_estimates(&params, 1.0 - channel.p_loss).unwrap();
    println!("fair-case estimates: n_Omega={} n_E={} r={} d_plus={}",
        fair.n_omega_fair, fair.n_e_fair, fair.r_fair, fair.d_plus_fair);

    let m_max = protocol::effective_m_max(&params, &channel).unwrap();
    println!("fair key-length cap m_max = {m_max}");

    let resolved = ProtocolParams { m_max, ..params.clone() };
    let b = secbounds::security_bundle(&resolved).unwrap();
    println!("security chain:");
    println!("  mu     = {:.6e}   (fictive-test bound)", b.mu);
    println!("  gamma  = {:.6e}", b.gamma);
    println!("  eta    = {:.6e}", b.eta);
    println!("  lambda = {:.6e}   (random-code bound)", b.lambda);
    println!("  xi     = {:.6e}", b.xi);
    println!("  sigma  = {:.6e}", b.sigma);
    println!("  f      = {:.6e}   (privacy bound in bits)", b.f);

    let delta_star = secbounds::max_tolerated_delta(1e-9).unwrap();
    println!("maximum tolerated error rate delta* = {delta_star:.6}");
    println!("(positive asymptotic key rate requires delta below that threshold)");
}
