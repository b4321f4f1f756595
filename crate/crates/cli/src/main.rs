mod args;
mod commands;
mod error;
mod output;
mod selftest;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;
use output::Output;

fn dispatch(cli: &Cli, out: &mut Output) -> Result<i32, CliError> {
    let debug = cli.debug_oracle;
    match &cli.command {
        Command::Verify { kind, s, t, f } => commands::verify(out, kind.kind, s, t, f),
        Command::Classify { s, t, f } => commands::classify(out, s, t, f),
        Command::Intersect { kind, files } => commands::intersect(out, kind.kind, files),
        Command::Join { kind, files } => commands::join_cmd(out, kind.kind, files),
        Command::Sum { kind, files } => commands::sum_cmd(out, kind.kind, files, debug),
        Command::Lcst { kind, max, t1, t2 } => {
            commands::lcst(out, kind.kind, max.max_nodes, t1, t2, debug)
        }
        Command::Scst { kind, max, t1, t2 } => {
            commands::scst(out, kind.kind, max.max_nodes, t1, t2, debug)
        }
        Command::SubToSuper { kind, max, files } => {
            commands::sub_to_super(out, kind.kind, max.max_nodes, files, debug)
        }
        Command::SuperToSub { kind, max, files } => {
            commands::super_to_sub(out, kind.kind, max.max_nodes, files, debug)
        }
        Command::CheckPullback { kind, probe, files } => {
            commands::check_pullback_cmd(out, kind.kind, probe, files)
        }
        Command::CheckPushout { kind, probe, files } => {
            commands::check_pushout_cmd(out, kind.kind, probe, files)
        }
        Command::Proptest { seed, cases } => selftest::run(out, *seed, *cases),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Output::new(cli.plain, cli.dot.clone(), cli.out.clone());
    let result = dispatch(&cli, &mut out);
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.text.as_bytes());
    let _ = stdout.flush();
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
