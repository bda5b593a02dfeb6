use std::io::Write;

use anyhow::Result;
use serde::Serialize;
use steinops::{formats, Pmf};

use super::{Context, Status};
use crate::args::{Format, PmfArgs};
use crate::{config, exit, family, output};

#[derive(Serialize)]
struct PmfOutput<'a> {
    family: &'a str,
    #[serde(flatten)]
    pmf: &'a Pmf,
    /// L1 distance between the recursion and the convolution-power sum.
    #[serde(skip_serializing_if = "Option::is_none")]
    cross_check_l1: Option<f64>,
}

pub fn run(ctx: &Context, args: &PmfArgs, out: &mut dyn Write) -> Result<Status> {
    let tol = config::resolve_tol(ctx.common.tol)?;
    let (pmf, check) = family::build_pmf(args, tol)?;
    let name = serde_json::to_value(args.family)?;
    let name = name.as_str().unwrap_or_default();
    let bytes = match ctx.format_or(Format::Json) {
        Format::Json => output::json_bytes(&PmfOutput {
            family: name,
            pmf: &pmf,
            cross_check_l1: check,
        })?,
        Format::Csv => {
            let mut buf = Vec::new();
            formats::write_pmf_csv(&pmf, &mut buf)?;
            buf
        }
    };
    ctx.emit(&bytes, out)?;
    Ok(match check {
        Some(d) if ctx.format_or(Format::Json) == Format::Csv => {
            Status::with(exit::SUCCESS, format!("cross-check L1 distance: {d:e}"))
        }
        _ => Status::ok(),
    })
}
