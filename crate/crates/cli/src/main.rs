//! `optomech` command-line front end.
//!
//! Every command writes its files plus one `manifest.json` into the output
//! directory (`--out`, else `$OPTOMECH_OUT`, else `./optomech-out`).
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 numerical or
//! stability error, 4 fit did not converge.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod failure;
mod run;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::failure::Failure;

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match cli.command {
        Command::Spectrum(a) => commands::spectrum::run(&cli.out, argv, a),
        Command::Sweep(a) => commands::sweep::run(&cli.out, argv, a),
        Command::Calibrate(a) => commands::calibrate::run(&cli.out, argv, a),
        Command::CavityScan(a) => commands::cavity::run(&cli.out, argv, a),
        Command::Validate(a) => commands::validate::run(&cli.out, argv, a),
        Command::Fit(a) => commands::fit::run(&cli.out, argv, a),
        Command::Deconvolve(a) => commands::deconvolve::run(&cli.out, argv, a),
        Command::Synth(a) => commands::synth::run(&cli.out, argv, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
