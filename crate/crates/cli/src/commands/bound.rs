use std::io::Write;

use anyhow::{anyhow, bail, Context as _, Result};
use steinops::bcp_indicators::{
    bound_cor42, bound_cor45, bound_thm41, bound_thm44, BoundReport, IndicatorModel, Theorem,
};
use steinops::runs_model::{bound_cor48, RunsModel};

use super::{Context, Status};
use crate::args::{BoundArgs, Format};
use crate::{exit, family, output};

fn load_model(args: &BoundArgs) -> Result<IndicatorModel> {
    if let Some(path) = &args.probs {
        return Ok(IndicatorModel::independent(family::read_numbers(path)?)?);
    }
    if let Some(path) = &args.model {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return IndicatorModel::from_json(&text)
            .with_context(|| format!("model {}", path.display()));
    }
    match (args.n, args.pstar) {
        (Some(n), Some(p)) => Ok(IndicatorModel::runs(RunsModel::new(n, p)?)),
        (None, None) => bail!("give --probs, --model, or --n with --pstar"),
        _ => bail!("--n and --pstar go together"),
    }
}

/// Evaluates `theorem` on `model`, checking that the model has the shape the
/// bound needs.
pub fn evaluate(theorem: Theorem, model: &IndicatorModel) -> Result<BoundReport> {
    let independent_probs = || {
        if model.is_independent() {
            Ok(model.marginals())
        } else {
            Err(anyhow!("{theorem} needs independent indicators"))
        }
    };
    Ok(match theorem {
        Theorem::Thm41 => bound_thm41(model)?,
        Theorem::Thm44 => bound_thm44(model)?,
        Theorem::Cor42 => bound_cor42(&independent_probs()?)?,
        Theorem::Cor45 => bound_cor45(&independent_probs()?)?,
        Theorem::Cor48 => match model {
            IndicatorModel::Runs(r) => bound_cor48(r)?,
            _ => bail!("cor48 needs a runs model (--n and --pstar)"),
        },
    })
}

/// Note for standard error, and whether `--strict` should fail.
pub fn verdict_note(report: &BoundReport) -> Option<(String, bool)> {
    match report.dominant {
        Some(true) => None,
        Some(false) => Some((
            format!(
                "{}: bound {:e} is below the exact distance {:e}",
                report.theorem, report.total, report.exact_tv.upper
            ),
            true,
        )),
        None => {
            let failed: Vec<&str> = report
                .hypotheses
                .iter()
                .filter(|h| !h.holds)
                .map(|h| h.name.as_str())
                .collect();
            Some((
                format!(
                    "{}: hypotheses not satisfied: {}",
                    report.theorem,
                    failed.join(", ")
                ),
                false,
            ))
        }
    }
}

pub fn run(ctx: &Context, args: &BoundArgs, out: &mut dyn Write) -> Result<Status> {
    let theorem = args
        .theorem
        .ok_or_else(|| anyhow!("--theorem is required"))?;
    let report = evaluate(theorem, &load_model(args)?)?;
    let bytes = match ctx.format_or(Format::Json) {
        Format::Json => output::json_bytes(&report)?,
        Format::Csv => {
            let (header, row): (Vec<String>, Vec<String>) = report.csv_fields().into_iter().unzip();
            output::csv_bytes("steinops-bound/1", &[], &header, &[row])?
        }
    };
    ctx.emit(&bytes, out)?;
    Ok(match verdict_note(&report) {
        None => Status::ok(),
        Some((msg, violation)) => {
            let code = if violation && ctx.common.strict {
                exit::VIOLATION
            } else {
                exit::SUCCESS
            };
            Status::with(code, format!("note: {msg}"))
        }
    })
}
