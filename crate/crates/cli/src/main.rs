//! `raekit`: runs the replacement-autoencoder experiment stage by stage.
//!
//! Every stage reads its inputs from and writes its outputs to the configured
//! output directory, so stages can be rerun independently.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use raekit::archive::PreparedWindows;
use raekit::config::{DataSource, ExperimentConfig};
use raekit::data::{gen_synthetic, write_csv};
use raekit::eval::{load_classifier, save_classifier};
use raekit::pipeline::*;
use raekit::rae::{load_model, save_model, WindowTransform};
use raekit_mediator::Server;

const SYNTHETIC_CSV: &str = "synthetic.csv";
const PARTITION_JSON: &str = "partition.json";
const TRANSFORMED_FILE: &str = "transformed.bin";

#[derive(Parser)]
#[command(
    name = "raekit",
    version,
    about = "Replacement autoencoder experiments"
)]
struct Cli {
    /// Experiment config (JSON). Without one, the built-in synthetic defaults apply.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config's output directory.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Writes the synthetic series as CSV plus its partition.
    GenData,
    /// Windows, splits and normalizes the data into the prepared archive.
    Prepare,
    /// Trains the replacement autoencoder on the prepared archive.
    TrainRae {
        /// Where to write the model (default: <output_dir>/rae.model).
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Applies the model to every prepared window and writes a new archive.
    Transform {
        #[arg(long)]
        model: Option<PathBuf>,
        /// Default: <output_dir>/transformed.bin.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Trains the activity classifier on the prepared training windows.
    TrainClassifier,
    /// Scores the classifier on original and transformed test windows.
    Evaluate {
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Trains same-user and cross-user GANs against the released data.
    Attack {
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Serves the model over the framed TCP protocol.
    Serve {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1:7878")]
        listen: String,
    },
}

/// Exit 2 for anything the user has to fix in the config or arguments,
/// exit 1 for failures while running.
enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<raekit::Error> for Failure {
    fn from(e: raekit::Error) -> Self {
        if e.is_config() {
            Failure::Config(e.into())
        } else {
            Failure::Runtime(e.into())
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<raekit::Error>() {
            Some(inner) if inner.is_config() => Failure::Config(e),
            _ => Failure::Runtime(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("raekit: invalid configuration: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("raekit: {e:#}");
            ExitCode::from(1)
        }
    }
}

struct Workspace {
    cfg: ExperimentConfig,
    dir: PathBuf,
}

impl Workspace {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn model_path(&self, flag: Option<PathBuf>) -> PathBuf {
        flag.unwrap_or_else(|| self.path(MODEL_FILE))
    }

    fn prepared(&self) -> anyhow::Result<PreparedWindows> {
        let path = self.path(PREPARED_FILE);
        PreparedWindows::load(&path)
            .with_context(|| format!("reading {} (run `raekit prepare` first)", path.display()))
    }
}

fn load_config(cli: &Cli) -> Result<Workspace, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path).map_err(|e| Failure::Config(e.into()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(dir) = &cli.output_dir {
        cfg.output_dir = dir.clone();
    }
    let dir = cfg.output_dir.clone();
    Ok(Workspace { cfg, dir })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let ctx = load_config(&cli)?;
    match cli.command {
        Command::GenData => gen_data(&ctx),
        Command::Prepare => {
            let prepared = prepare(&ctx.cfg)?;
            fs::create_dir_all(&ctx.dir)?;
            prepared.save(ctx.path(PREPARED_FILE))?;
            eprintln!(
                "{} train / {} test windows of shape {}x{} -> {}",
                prepared.train.len(),
                prepared.test.len(),
                prepared.channels,
                prepared.window_len,
                ctx.path(PREPARED_FILE).display()
            );
            Ok(())
        }
        Command::TrainRae { model } => {
            let prepared = ctx.prepared()?;
            let rae = train_rae_stage(&ctx.cfg, &prepared)?;
            let path = ctx.model_path(model);
            save_model(&rae, &path)?;
            let last = rae.loss_history().last().copied().unwrap_or(f64::NAN);
            eprintln!("final training loss {last:.6} -> {}", path.display());
            Ok(())
        }
        Command::Transform { model, output } => {
            let prepared = ctx.prepared()?;
            let rae = load(&ctx.model_path(model))?;
            let out = PreparedWindows {
                train: rae.transform_batch(&prepared.train)?,
                test: rae.transform_batch(&prepared.test)?,
                ..prepared
            };
            let path = output.unwrap_or_else(|| ctx.path(TRANSFORMED_FILE));
            out.save(&path)?;
            eprintln!("transformed windows -> {}", path.display());
            Ok(())
        }
        Command::TrainClassifier => {
            let prepared = ctx.prepared()?;
            let clf = train_classifier_stage(&ctx.cfg, &prepared)?;
            save_classifier(&clf, ctx.path(CLASSIFIER_FILE))?;
            eprintln!("classifier -> {}", ctx.path(CLASSIFIER_FILE).display());
            Ok(())
        }
        Command::Evaluate { model } => {
            let prepared = ctx.prepared()?;
            let rae = load(&ctx.model_path(model))?;
            let clf_path = ctx.path(CLASSIFIER_FILE);
            let clf = if clf_path.exists() {
                load_classifier(&clf_path)?
            } else {
                let clf = train_classifier_stage(&ctx.cfg, &prepared)?;
                save_classifier(&clf, &clf_path)?;
                clf
            };
            let report = evaluate_stage(&clf, &rae, &prepared)?;
            write_eval_reports(&ctx.dir, &report)?;
            print!("{}", report.to_text());
            Ok(())
        }
        Command::Attack { model } => {
            let prepared = ctx.prepared()?;
            let rae = load(&ctx.model_path(model))?;
            let outcome = attack_stage(&ctx.cfg, &prepared, &rae)?;
            write_attack_reports(&ctx.dir, &outcome)?;
            println!("same user\n{}", outcome.same_user.to_csv());
            if let Some(cross) = &outcome.cross_user {
                println!("cross user\n{}", cross.to_csv());
            }
            Ok(())
        }
        Command::Serve { model, listen } => {
            let rae = load(&ctx.model_path(model))?;
            let (k, d) = rae.window_shape();
            let server = Server::bind(listen.as_str(), rae)
                .with_context(|| format!("cannot listen on {listen}"))?;
            eprintln!("serving {k}x{d} windows on {}", server.local_addr()?);
            server.run()?;
            Ok(())
        }
    }
}

fn load(path: &Path) -> anyhow::Result<raekit::rae::TrainedRae> {
    load_model(path).with_context(|| format!("loading model {}", path.display()))
}

fn gen_data(ctx: &Workspace) -> Result<(), Failure> {
    let DataSource::Synthetic(synth) = &ctx.cfg.data else {
        return Err(Failure::Config(anyhow::anyhow!(
            "gen-data needs a synthetic data source"
        )));
    };
    let data = gen_synthetic(synth)?;
    fs::create_dir_all(&ctx.dir)?;
    let csv = ctx.path(SYNTHETIC_CSV);
    let file = fs::File::create(&csv).with_context(|| format!("creating {}", csv.display()))?;
    let mut out = BufWriter::new(file);
    write_csv(&data.series, &mut out)?;
    out.flush()?;
    let partition = serde_json::to_string_pretty(&data.partition).expect("partition serializes");
    fs::write(ctx.path(PARTITION_JSON), partition + "\n")?;
    eprintln!(
        "{} records, {} channels -> {}",
        data.series.len(),
        data.series.channels(),
        csv.display()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::error::ErrorKind;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("raekit").chain(args.iter().copied())).unwrap()
    }

    fn exit_code(result: Result<(), Failure>) -> u8 {
        match result {
            Ok(()) => 0,
            Err(Failure::Config(_)) => 2,
            Err(Failure::Runtime(_)) => 1,
        }
    }

    /// A fast synthetic experiment written to `dir`.
    fn small_config(dir: &Path) -> PathBuf {
        let mut cfg = ExperimentConfig::default();
        if let DataSource::Synthetic(s) = &mut cfg.data {
            s.windows_per_class = 60;
        }
        cfg.output_dir = dir.join("out");
        cfg.rae.train.fit.epochs = 3;
        cfg.classifier.fit.epochs = 3;
        cfg.attack.gan.epochs = 2;
        cfg.attack.gan.snapshots = vec![1, 2];
        cfg.attack.gan.n_generated = 20;
        let path = dir.join("experiment.json");
        fs::write(&path, cfg.to_json()).unwrap();
        path
    }

    #[test]
    fn unknown_subcommand_is_a_usage_error() {
        let err = Cli::try_parse_from(["raekit", "frobnicate"]).err().unwrap();
        assert_eq!(err.kind(), ErrorKind::InvalidSubcommand);
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn serve_flags() {
        let c = cli(&["serve", "--model", "m.bin", "--listen", "0.0.0.0:9000"]);
        match c.command {
            Command::Serve { model, listen } => {
                assert_eq!(model, Some(PathBuf::from("m.bin")));
                assert_eq!(listen, "0.0.0.0:9000");
            }
            _ => panic!("parsed the wrong subcommand"),
        }
    }

    #[test]
    fn invalid_config_exits_2() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.json");
        fs::write(&bad, r#"{"window": {"length": 0}}"#).unwrap();
        let c = cli(&["--config", bad.to_str().unwrap(), "prepare"]);
        assert_eq!(exit_code(run(c)), 2);

        fs::write(&bad, r#"{"no_such_field": 1}"#).unwrap();
        let c = cli(&["--config", bad.to_str().unwrap(), "prepare"]);
        assert_eq!(exit_code(run(c)), 2);

        let missing = dir.path().join("missing.json");
        let c = cli(&["--config", missing.to_str().unwrap(), "prepare"]);
        assert_eq!(exit_code(run(c)), 2);
    }

    #[test]
    fn missing_artifacts_exit_1() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("empty");
        let c = cli(&["--output-dir", out.to_str().unwrap(), "evaluate"]);
        assert_eq!(exit_code(run(c)), 1);
    }

    #[test]
    fn stages_write_their_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let config = small_config(dir.path());
        let config = config.to_str().unwrap();
        for stage in [
            "gen-data",
            "prepare",
            "train-rae",
            "evaluate",
            "transform",
            "attack",
        ] {
            assert_eq!(
                exit_code(run(cli(&["--config", config, stage]))),
                0,
                "{stage}"
            );
        }
        let out = dir.path().join("out");
        for f in [
            SYNTHETIC_CSV,
            PARTITION_JSON,
            PREPARED_FILE,
            MODEL_FILE,
            CLASSIFIER_FILE,
            F1_CSV,
            CONFUSION_CSV,
            EVAL_TEXT,
            TRANSFORMED_FILE,
            ATTACK_SAME_CSV,
            ATTACK_CROSS_CSV,
        ] {
            assert!(out.join(f).is_file(), "{f} missing");
        }
        let transformed = PreparedWindows::load(out.join(TRANSFORMED_FILE)).unwrap();
        let prepared = PreparedWindows::load(out.join(PREPARED_FILE)).unwrap();
        assert_eq!(transformed.test.len(), prepared.test.len());
        assert_ne!(transformed.test, prepared.test);

        // A model path given on the command line is used as is.
        let custom = dir.path().join("custom.model");
        let c = cli(&[
            "--config",
            config,
            "train-rae",
            "--model",
            custom.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(run(c)), 0);
        assert_eq!(
            fs::read(&custom).unwrap(),
            fs::read(out.join(MODEL_FILE)).unwrap()
        );
    }

    #[test]
    fn gen_data_rejects_csv_sources() {
        let dir = tempfile::tempdir().unwrap();
        let config = dir.path().join("csv.json");
        fs::write(
            &config,
            r#"{"data": {"csv": {"path": "x.csv", "channels": 3}},
                "partition": {"white": [1], "black": [2], "gray": [0]},
                "attack": {"cross_user": null}}"#,
        )
        .unwrap();
        let c = cli(&["--config", config.to_str().unwrap(), "gen-data"]);
        assert_eq!(exit_code(run(c)), 2);
        // Loading the missing CSV is a runtime failure, not a config error.
        let c = cli(&["--config", config.to_str().unwrap(), "prepare"]);
        assert_eq!(exit_code(run(c)), 1);
    }
}
