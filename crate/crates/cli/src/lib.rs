//! Command-line driver: `train`, `eval`, `predict`, `synth`, `gradcheck` and
//! `verify-bound`.

pub mod args;
pub mod evaluate;
pub mod load;
pub mod manifest;
pub mod synth;
pub mod train;
pub mod verify;

pub use args::{Cli, Command};

use rankforge_core::Error;

/// Process exit status for a failed command: 2 for configuration errors,
/// 1 for everything else.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Config(_)) => 2,
        _ => 1,
    }
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Train(a) => train::run(a),
        Command::Eval(a) => evaluate::run_eval(a),
        Command::Predict(a) => evaluate::run_predict(a),
        Command::Synth(a) => synth::run(a),
        Command::Gradcheck(a) => verify::run_gradcheck(a),
        Command::VerifyBound(a) => verify::run_verify_bound(a),
    }
}
