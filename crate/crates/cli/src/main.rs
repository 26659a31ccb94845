mod args;
mod commands;
mod exit;

use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::CONFIG } else { exit::OK });
        }
    };
    let r = match &cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::VerifyBounds(a) => commands::verify(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::DumpField(a) => commands::dump_field(a),
        Command::CheckSymmetry(a) => commands::check_symmetry(a),
    };
    let usage = matches!(&r, Err(e) if e.code == exit::CONFIG);
    let code = exit::finish(r);
    if usage {
        let name = match &cli.command {
            Command::Solve(_) => "solve",
            Command::VerifyBounds(_) => "verify-bounds",
            Command::Sweep(_) => "sweep",
            Command::DumpField(_) => "dump-field",
            Command::CheckSymmetry(_) => "check-symmetry",
        };
        let mut cmd = Cli::command();
        cmd.build();
        if let Some(sub) = cmd.find_subcommand_mut(name) {
            eprintln!("{}", sub.render_usage());
        }
    }
    code
}
