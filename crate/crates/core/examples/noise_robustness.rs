//! Set-level accuracy when gallery and/or probe sets are corrupted with one
//! sample of every other class.

use delm::classifier::TrainConfig;
use delm::dataset::{synth_generate, SynthParams};
use delm::harness::{run_kfold, NoiseMode, ProtocolSpec};

fn main() -> delm::Result<()> {
    let data = synth_generate(&SynthParams {
        samples_per_set: 30,
        seed: 5,
        ..SynthParams::default()
    })?;
    let config = TrainConfig::default();
    println!(
        "{:<6}{:>10}{:>8}{:>14}",
        "mode", "accuracy", "std", "set growth"
    );
    for noise in [NoiseMode::Nc, NoiseMode::Ng, NoiseMode::Np, NoiseMode::Ngp] {
        let spec = ProtocolSpec {
            folds: 5,
            noise,
            seed: 5,
            ..ProtocolSpec::default()
        };
        let r = run_kfold(&data, &spec, &config)?;
        println!(
            "{:<6}{:>9.1}%{:>8.1}{:>14}",
            noise.name(),
            r.mean_accuracy,
            r.std_accuracy,
            r.noise_growth.map_or("-".into(), |g| format!("+{g}"))
        );
    }
    Ok(())
}
