mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, OutputMode};
use commands::{Context, EXIT_ERROR};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    if cli.tolerance.is_nan() || cli.tolerance <= 0.0 {
        eprintln!("error: tolerance must be positive");
        return ExitCode::from(EXIT_ERROR);
    }
    let ctx = Context {
        mode: cli.mode(),
        tolerance: cli.tolerance,
    };
    let outcome = match &cli.command {
        Command::Check(a) => commands::check(&ctx, a),
        Command::Run(a) => commands::run(&ctx, a),
        Command::Batch(a) => commands::batch(&ctx, a),
        Command::CompileDfa(a) => commands::compile_dfa(&ctx, a),
        Command::Matrix(a) => commands::matrix(&ctx, a),
        Command::Zoo(z) => commands::zoo_cmd(&ctx, z),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if ctx.mode == OutputMode::Json {
                println!("{}", serde_json::json!({ "error": e.to_string() }));
            }
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
