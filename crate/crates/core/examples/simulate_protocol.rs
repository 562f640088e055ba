//! Simulates batches of full protocol runs: a quiet channel, a noisy
//! channel, and a full intercept-resend attack, printing acceptance rates,
//! observed error rates, and key agreement. Also dumps one complete
//! transcript as JSON.
//!
//! Run with: `cargo run --example simulate_protocol`

use bb84_toolkit::protocol::{
    self, AttackStrategy, ChannelModel, CodeFamily, ProtocolError,
};
use bb84_toolkit::secbounds::ProtocolParams;

fn main() -> Result<(), ProtocolError> {
    let params = ProtocolParams {
        n_photons: 10_000,
        ..ProtocolParams::default()
    };
    let family = CodeFamily::Hamming74;
    let trials = 200;

    let cases = [
        ("quiet channel", ChannelModel { p_loss: 0.0, p_err: 0.01 }, AttackStrategy::None),
        ("noisy channel", ChannelModel { p_loss: 0.1, p_err: 0.04 }, AttackStrategy::None),
        (
            "intercept-resend",
            ChannelModel { p_loss: 0.0, p_err: 0.0 },
            AttackStrategy::InterceptResend { p_attack: 1.0 },
        ),
    ];
    for (label, channel, attack) in cases {
        let s = protocol::run_batch(&params, &channel, &attack, family, trials, 7)?;
        println!(
            "{label:18} accept={:5.1}%  QBER_T={:.4}  key-agree={:.3}  mean m={:.1}",
            100.0 * s.accept_rate,
            s.mean_qber_t,
            s.key_agree_rate,
            s.mean_m
        );
    }

    // One small run in full, as JSON.
    let small = ProtocolParams { n_photons: 60, ..ProtocolParams::default() };
    let t = protocol::run_protocol(
        &small,
        &ChannelModel::noiseless(),
        &AttackStrategy::None,
        CodeFamily::Repetition { block_len: 3 },
        1,
    )?;
    println!("\none complete transcript (N=60):\n{}", t.to_json());
    Ok(())
}
