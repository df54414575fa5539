//! Cross-cutting pipeline checks on the bundled models beyond the
//! acceptance criteria: tolerance sweeps on the commuting quench and
//! unitarity of everything the pipeline hands back.

use std::path::Path;

use tdqsp::blockenc::{be_verify, QueryLedger};
use tdqsp::config::{ModelConfig, RunConfig};
use tdqsp::matrix::{expm_i, spectral_norm};
use tdqsp::tdsim::{h_integral, simulate_td, SimMode};

fn load_config(name: &str) -> RunConfig {
    let path = format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"));
    RunConfig::load(Path::new(&path)).unwrap()
}

#[test]
fn commuting_quench_meets_tolerance_sweep() {
    let mut config = load_config("ising_quench.json");
    if let ModelConfig::IsingQuench { ref mut j, .. } = config.model {
        *j = 0.0;
    }
    let td = config.model.build().unwrap();
    let want = expm_i(&h_integral(&td, config.t).unwrap(), 1.0).unwrap();
    for eps in [1e-4, 1e-6, 1e-8] {
        let mut ledger = QueryLedger::new();
        let out = simulate_td(&td, config.t, eps, SimMode::EffectiveTime, false, &mut ledger)
            .unwrap();
        let dist = be_verify(&out, &want).unwrap();
        assert!(dist <= eps, "eps {eps:e}: measured {dist:.3e}");
        assert!((spectral_norm(out.unitary()) - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn floquet_full_period_reduces_to_static_mode() {
    // Over one full period the oscillating modes integrate to zero, so the
    // propagator collapses to the static part alone.
    let config = load_config("floquet_2q.json");
    let td = config.model.build().unwrap();
    let integrated = h_integral(&td, 1.0).unwrap();
    let static_term = td
        .terms()
        .iter()
        .find(|term| !term.coeff.is_complex())
        .expect("static mode present");
    assert!(integrated.sub(&static_term.h).max_abs_entry() <= 1e-12);

    let mut ledger = QueryLedger::new();
    let out = simulate_td(&td, 1.0, 1e-6, SimMode::EffectiveTime, false, &mut ledger).unwrap();
    let want = expm_i(&static_term.h, 1.0).unwrap();
    assert!(be_verify(&out, &want).unwrap() <= 1e-6);
}

#[test]
fn lattice_m_fold_mode_through_config() {
    let mut config = load_config("lattice_n3.json");
    config.mode = tdqsp::config::ModeConfig::MFold;
    let td = config.model.build().unwrap();
    let mut ledger = QueryLedger::new();
    let out = simulate_td(&td, config.t, config.eps, config.mode.into(), false, &mut ledger)
        .unwrap();
    let want = expm_i(&h_integral(&td, config.t).unwrap(), 1.0).unwrap();
    assert!(be_verify(&out, &want).unwrap() <= config.eps);
    assert!(ledger.degrees["m_fold_reps"] >= 1);
}
