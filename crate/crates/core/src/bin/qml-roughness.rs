use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};

use qml_roughness::runner::{self, Algorithm, RunConfig};
use qml_roughness::Error;

/// Train and evaluate quantum regressors on FDM surface-roughness data.
#[derive(Parser, Debug)]
#[command(name = "qml-roughness", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train one model and write metrics.json, history.csv and model.json.
    Run {
        #[arg(long, value_enum)]
        algorithm: Algorithm,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run several models on the same split and rank them by test MSE.
    Compare {
        #[arg(long, value_enum, value_delimiter = ',', default_value = "qnn,vqc,qforest")]
        algorithms: Vec<Algorithm>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// CSV dataset with the nine-column print-parameter schema.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    test_fraction: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    layers: usize,
    #[arg(long, default_value_t = 100)]
    iterations: usize,
    #[arg(long, default_value_t = 0.1)]
    learning_rate: f64,
    #[arg(long, default_value_t = 25)]
    num_trees: usize,
    #[arg(long, default_value_t = 4)]
    max_depth: usize,
    #[arg(long, default_value_t = 2)]
    min_leaf: usize,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    bootstrap: bool,
    #[arg(long, default_value = "./out")]
    out: PathBuf,
}

impl CommonArgs {
    fn config(&self, algorithm: Algorithm) -> RunConfig {
        RunConfig {
            algorithm,
            data: self.data.clone(),
            test_fraction: self.test_fraction,
            seed: self.seed,
            layers: self.layers,
            iterations: self.iterations,
            learning_rate: self.learning_rate,
            num_trees: self.num_trees,
            max_depth: self.max_depth,
            min_leaf: self.min_leaf,
            bootstrap: self.bootstrap,
            out: self.out.clone(),
        }
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { algorithm, common } => {
            let outcome = runner::run(&common.config(algorithm))?;
            let t = outcome.metrics.test;
            println!(
                "{algorithm}: test mse={:.6} mae={:.6} evs={:.6} (n={}) -> {}",
                t.mse,
                t.mae,
                t.evs,
                t.n,
                common.out.display()
            );
        }
        Command::Compare { algorithms, common } => {
            let configs: Vec<_> = algorithms.iter().map(|&a| common.config(a)).collect();
            let comparison = runner::compare(&configs, &common.out)?;
            print!("{}", comparison.to_table());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
