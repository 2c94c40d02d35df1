//! Accuracy as every set is capped at `N_r` samples.

use delm::classifier::TrainConfig;
use delm::dataset::{synth_generate, SynthParams};
use delm::harness::{run_kfold, ProtocolSpec};

fn main() -> delm::Result<()> {
    let data = synth_generate(&SynthParams {
        noise_sigma: 0.15,
        seed: 9,
        ..SynthParams::default()
    })?;
    let config = TrainConfig::default();
    println!("{:>5}{:>10}{:>10}", "N_r", "largest", "accuracy");
    for n_r in [Some(1), Some(2), Some(3), Some(5), Some(10), None] {
        let spec = ProtocolSpec {
            folds: 5,
            n_r,
            seed: 9,
            ..ProtocolSpec::default()
        };
        let r = run_kfold(&data, &spec, &config)?;
        let label = n_r.map_or("all".into(), |n| n.to_string());
        println!("{label:>5}{:>10}{:>9.1}%", r.max_set_size, r.mean_accuracy);
    }
    Ok(())
}
