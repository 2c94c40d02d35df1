//! Command-line frontend. Each command returns a process exit code:
//! 0 success, 2 input error, 3 configuration error, 4 numeric failure.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::autoencoder::Refit;
use crate::classifier::{classify_set, train_all, ImageSet, SetPrediction, TrainConfig};
use crate::dataset::format::write_atomic;
use crate::dataset::{
    load_class_models, load_gallery, load_sets, save_class_models, save_gallery, synth_generate,
    GalleryManifest, Manifold, SynthParams,
};
use crate::error::{Error, Result};
use crate::harness::{measure_run, run_kfold, split_fold, GalleryRule, ProtocolSpec, RunReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter(_) | Error::Protocol(_) => EXIT_CONFIG,
        Error::Numeric(_) => EXIT_NUMERIC,
        Error::Shape { .. }
        | Error::NonFinite(_)
        | Error::Unnormalized { .. }
        | Error::EmptyGallery
        | Error::EmptySet(_)
        | Error::Manifest(_)
        | Error::Io { .. }
        | Error::Format(_) => EXIT_INPUT,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "delm",
    version,
    about = "Deep ELM auto-encoders for image-set classification"
)]
pub struct Cli {
    /// Suppress the configuration banner.
    #[arg(short, long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train class models on a labeled gallery.
    Train {
        /// Gallery manifest.
        manifest: PathBuf,
        #[command(flatten)]
        model: ModelFlags,
        /// Output model file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify probe sets with a trained model.
    Classify {
        /// Probe manifest (labels optional).
        manifest: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Report file; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic gallery.
    Synth {
        #[command(flatten)]
        params: SynthFlags,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Repeated gallery/probe evaluation with optional noise and subsampling.
    Eval {
        manifest: PathBuf,
        #[command(flatten)]
        model: ModelFlags,
        #[command(flatten)]
        protocol: ProtocolFlags,
        /// Report file; a `.kv` sibling is written alongside.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time training and testing on one half/half split.
    Bench {
        manifest: PathBuf,
        #[command(flatten)]
        model: ModelFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ModelFlags {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of hidden layers `h`.
    #[arg(long, default_value_t = 2)]
    pub hidden_layers: usize,
    /// Layer width; repeat once per layer, or give once for all layers.
    #[arg(long = "width")]
    pub widths: Vec<usize>,
    /// Ridge tradeoff of every hidden layer.
    #[arg(long, default_value_t = 1e6)]
    pub c_first: f64,
    /// Ridge tradeoff of the decoder.
    #[arg(long, default_value_t = 1e18)]
    pub c_final: f64,
    /// all-layers or decoder-only.
    #[arg(long, default_value = "all-layers")]
    pub refit: String,
}

impl ModelFlags {
    pub fn to_config(&self) -> Result<TrainConfig> {
        let h = self.hidden_layers;
        let widths = match self.widths.len() {
            0 => vec![20; h],
            1 => vec![self.widths[0]; h],
            n if n == h => self.widths.clone(),
            n => {
                return Err(Error::InvalidParameter(format!(
                    "--width given {n} times for {h} hidden layers"
                )))
            }
        };
        let mut config = TrainConfig::new(widths, self.c_first, self.c_final, self.seed);
        config.refit = self.refit.parse::<Refit>()?;
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ProtocolFlags {
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// nc, ng, np or ngp.
    #[arg(long, default_value = "nc")]
    pub noise_mode: String,
    /// Per-set sample cap; all samples when omitted.
    #[arg(long)]
    pub nr: Option<usize>,
    /// Gallery sets per class; half of each class when omitted.
    #[arg(long)]
    pub gallery_sets: Option<usize>,
}

impl ProtocolFlags {
    fn to_spec(&self, seed: u64) -> Result<ProtocolSpec> {
        let spec = ProtocolSpec {
            folds: self.folds,
            split: self
                .gallery_sets
                .map_or(GalleryRule::Half, GalleryRule::Count),
            seed,
            noise: self.noise_mode.parse()?,
            n_r: self.nr,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SynthFlags {
    #[arg(long, default_value_t = 5)]
    pub classes: usize,
    #[arg(long, default_value_t = 4)]
    pub sets_per_class: usize,
    #[arg(long, default_value_t = 20)]
    pub samples_per_set: usize,
    #[arg(long, default_value_t = 50)]
    pub dim: usize,
    /// blob or sine.
    #[arg(long, default_value = "blob")]
    pub manifold: String,
    #[arg(long, default_value_t = 0.05)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SynthFlags {
    fn to_params(&self) -> Result<SynthParams> {
        let params = SynthParams {
            classes: self.classes,
            sets_per_class: self.sets_per_class,
            samples_per_set: self.samples_per_set,
            dim: self.dim,
            manifold: self.manifold.parse::<Manifold>()?,
            noise_sigma: self.sigma,
            seed: self.seed,
        };
        params.validate()?;
        Ok(params)
    }
}

pub const SYNTH_MANIFEST: &str = "manifest.tsv";

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{shown}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{shown}");
                    EXIT_CONFIG
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let banner = |out: &mut dyn Write, lines: &[(&str, String)]| {
        if !cli.quiet {
            let _ = writeln!(out, "{}", render_banner(&cli.command, lines));
        }
    };
    match &cli.command {
        Command::Train {
            manifest,
            model,
            out: path,
        } => {
            let config = model.to_config()?;
            banner(out, &config_lines(&config));
            cmd_train(manifest, &config, path, out)
        }
        Command::Classify {
            manifest,
            model,
            out: path,
        } => {
            banner(out, &[("model", model.display().to_string())]);
            cmd_classify(model, manifest, path.as_deref(), out)
        }
        Command::Synth { params, out: dir } => {
            let params = params.to_params()?;
            banner(out, &synth_lines(&params));
            cmd_synth(&params, dir, out)
        }
        Command::Eval {
            manifest,
            model,
            protocol,
            out: path,
        } => {
            let config = model.to_config()?;
            let spec = protocol.to_spec(model.seed)?;
            banner(out, &config_lines(&config));
            cmd_eval(manifest, &spec, &config, path.as_deref(), out)
        }
        Command::Bench {
            manifest,
            model,
            out: path,
        } => {
            let config = model.to_config()?;
            banner(out, &config_lines(&config));
            cmd_bench(manifest, &config, path.as_deref(), out)
        }
    }
}

fn render_banner(command: &Command, lines: &[(&str, String)]) -> String {
    let name = match command {
        Command::Train { .. } => "train",
        Command::Classify { .. } => "classify",
        Command::Synth { .. } => "synth",
        Command::Eval { .. } => "eval",
        Command::Bench { .. } => "bench",
    };
    let body: Vec<String> = lines.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!(
        "delm {name} {} [{}]",
        env!("CARGO_PKG_VERSION"),
        body.join(" ")
    )
}

fn config_lines(config: &TrainConfig) -> Vec<(&'static str, String)> {
    let join = |v: Vec<String>| v.join(",");
    vec![
        ("seed", config.seed.to_string()),
        ("hidden_layers", config.hidden_layers().to_string()),
        (
            "widths",
            join(config.widths.iter().map(ToString::to_string).collect()),
        ),
        (
            "c",
            join(
                config
                    .c_per_layer
                    .iter()
                    .map(|c| format!("{c:e}"))
                    .collect(),
            ),
        ),
        ("activation", config.activation.name().to_string()),
        ("refit", config.refit.name().to_string()),
        ("epsilon", format!("{:e}", config.epsilon)),
    ]
}

fn synth_lines(p: &SynthParams) -> Vec<(&'static str, String)> {
    vec![
        ("seed", p.seed.to_string()),
        ("classes", p.classes.to_string()),
        ("sets_per_class", p.sets_per_class.to_string()),
        ("samples_per_set", p.samples_per_set.to_string()),
        ("dim", p.dim.to_string()),
        ("manifold", format!("{:?}", p.manifold)),
        ("sigma", p.noise_sigma.to_string()),
    ]
}

fn read_gallery(path: &Path) -> Result<crate::classifier::Gallery> {
    load_gallery(&GalleryManifest::read(path)?)
}

pub fn cmd_train(
    manifest: &Path,
    config: &TrainConfig,
    model_out: &Path,
    out: &mut dyn Write,
) -> Result<()> {
    let gallery = read_gallery(manifest)?;
    let start = Instant::now();
    let models = train_all(&gallery, config)?;
    let seconds = start.elapsed().as_secs_f64();
    save_class_models(model_out, &models)?;
    let _ = writeln!(
        out,
        "trained {} classes on N={} samples, d={} in {seconds:.2} s -> {}",
        models.labels().len(),
        gallery.total_samples(),
        gallery.dim(),
        model_out.display()
    );
    Ok(())
}

/// Per-set predictions, one tab-separated line each, then accuracy when
/// every probe carries a label.
pub fn classify_report(probes: &[ImageSet], predictions: &[SetPrediction]) -> String {
    let mut text = String::from("set_id\tpredicted\tvotes\tclass_errors\n");
    for p in predictions {
        let votes: Vec<String> = p
            .vote_counts
            .iter()
            .map(|(l, n)| format!("{l}:{n}"))
            .collect();
        let errors: Vec<String> = p
            .labels
            .iter()
            .zip(p.class_error_totals())
            .map(|(l, e)| format!("{l}:{e:.6e}"))
            .collect();
        let _ = writeln!(
            text,
            "{}\t{}\t{}\t{}",
            p.set_id,
            p.set_label,
            votes.join(","),
            errors.join(",")
        );
    }
    if !probes.is_empty() && probes.iter().all(|s| s.label.is_some()) {
        let correct = probes
            .iter()
            .zip(predictions)
            .filter(|(s, p)| s.label.as_deref() == Some(p.set_label.as_str()))
            .count();
        let _ = writeln!(
            text,
            "accuracy={:.2}",
            100.0 * correct as f64 / probes.len() as f64
        );
    }
    text
}

pub fn cmd_classify(
    model: &Path,
    manifest: &Path,
    report: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    let models = load_class_models(model)?;
    let manifest = GalleryManifest::read(manifest)?;
    if manifest.feature_dim != models.input_dim() {
        return Err(Error::shape(
            "probe manifest",
            format!("d={} (model)", models.input_dim()),
            format!("d={} (probes)", manifest.feature_dim),
        ));
    }
    let probes = load_sets(&manifest)?;
    let predictions = probes
        .iter()
        .map(|p| classify_set(p, &models))
        .collect::<Result<Vec<_>>>()?;
    let text = classify_report(&probes, &predictions);
    match report {
        Some(path) => {
            write_atomic(path, text.as_bytes())?;
            let _ = writeln!(
                out,
                "classified {} sets -> {}",
                probes.len(),
                path.display()
            );
        }
        None => {
            let _ = write!(out, "{text}");
        }
    }
    Ok(())
}

pub fn cmd_synth(params: &SynthParams, dir: &Path, out: &mut dyn Write) -> Result<()> {
    let gallery = synth_generate(params)?;
    let path = save_gallery(&gallery, dir, SYNTH_MANIFEST)?;
    let _ = writeln!(
        out,
        "wrote {} sets -> {}",
        gallery.sets().len(),
        path.display()
    );
    Ok(())
}

fn write_report(report: &RunReport, path: &Path) -> Result<()> {
    let mut kv = path.as_os_str().to_owned();
    kv.push(".kv");
    write_atomic(path, report.to_text().as_bytes())?;
    write_atomic(Path::new(&kv), report.to_key_values().as_bytes())
}

pub fn cmd_eval(
    manifest: &Path,
    spec: &ProtocolSpec,
    config: &TrainConfig,
    report: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    let gallery = read_gallery(manifest)?;
    let run = run_kfold(&gallery, spec, config)?;
    let _ = write!(out, "{}", run.to_text());
    if let Some(path) = report {
        write_report(&run, path)?;
    }
    Ok(())
}

pub fn cmd_bench(
    manifest: &Path,
    config: &TrainConfig,
    report: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    let gallery = read_gallery(manifest)?;
    let (train, probes) = split_fold(&gallery, GalleryRule::Half, config.seed, 0)?;
    let run = measure_run(&train, &probes, config)?;
    let _ = writeln!(out, "{:<28}{:>12}", "metric", "value");
    let _ = writeln!(out, "{:<28}{:>12.2}", "train time (s)", run.train_seconds);
    let _ = writeln!(
        out,
        "{:<28}{:>12.4}",
        "test time per set (s)", run.test_seconds
    );
    let _ = writeln!(
        out,
        "{:<28}{:>12.2}",
        "training memory (MB)",
        run.peak_memory_bytes as f64 / (1024.0 * 1024.0)
    );
    let _ = writeln!(out, "{:<28}{:>12.2}", "accuracy (%)", run.mean_accuracy);
    if let Some(path) = report {
        write_report(&run, path)?;
    }
    Ok(())
}
