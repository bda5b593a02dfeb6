mod bound;
mod check;
mod pmf;
mod sweep;

use std::io::Write;

use anyhow::Result;

use crate::args::{Cli, Command, CommonArgs, Format};
use crate::{config, exit, output};

/// Exit status of a command that ran to completion, with an optional note
/// for standard error.
#[derive(Debug)]
pub struct Status {
    pub code: i32,
    pub message: Option<String>,
}

impl Status {
    fn ok() -> Self {
        Self {
            code: exit::SUCCESS,
            message: None,
        }
    }

    fn with(code: i32, message: String) -> Self {
        Self {
            code,
            message: Some(message),
        }
    }
}

/// Settings shared by every command after merging the config file.
pub(crate) struct Context {
    pub common: CommonArgs,
    pub config: serde_json::Map<String, serde_json::Value>,
}

impl Context {
    fn format_or(&self, default: Format) -> Format {
        self.common.format.unwrap_or(default)
    }

    fn emit(&self, bytes: &[u8], out: &mut dyn Write) -> Result<()> {
        output::emit(bytes, self.common.output.as_deref(), out)
    }
}

pub fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<Status> {
    let config = config::load(cli.common.config.as_deref())?;
    let mut common: CommonArgs = config::merge(&cli.common, &config)?;
    common.config = cli.common.config;
    let ctx = Context { common, config };
    match cli.command {
        Command::Pmf(a) => pmf::run(&ctx, &config::merge(&a, &ctx.config)?, out),
        Command::CheckOperator(a) => check::run(&ctx, &config::merge(&a, &ctx.config)?, out),
        Command::Bound(a) => bound::run(&ctx, &config::merge(&a, &ctx.config)?, out),
        Command::Sweep(a) => sweep::run(&ctx, &config::merge(&a, &ctx.config)?, out),
    }
}
