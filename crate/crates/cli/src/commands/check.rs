use std::io::Write;

use anyhow::{Context as _, Result};
use serde::Serialize;
use steinops::stein_catalog::{catalog_cases, CatalogCase, CatalogGrid};

use super::{Context, Status};
use crate::args::{CheckArgs, Format};
use crate::{config, exit, family, output};

/// Default largest acceptable indicator-basis defect.
pub const DEFAULT_THRESHOLD: f64 = 1e-9;

#[derive(Serialize)]
struct Row {
    label: String,
    max_defect: f64,
    passed: bool,
}

#[derive(Serialize)]
struct CheckOutput {
    threshold: f64,
    max_defect: f64,
    passed: bool,
    cases: Vec<Row>,
}

fn cases(ctx: &Context, args: &CheckArgs) -> Result<Vec<CatalogCase>> {
    let tol = config::explicit_tol(ctx.common.tol)?;
    if let (Some(op), Some(law)) = (&args.operator, &args.law) {
        return Ok(vec![CatalogCase {
            label: format!("{op} vs {law}"),
            operator: family::operator_from_spec(op)?,
            law: family::law_from_spec(law, tol.unwrap_or(crate::DEFAULT_TOL))?,
        }]);
    }
    let mut grid = match &args.grid {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<CatalogGrid>(&text)
                .with_context(|| format!("parsing grid {}", path.display()))?
        }
        None => CatalogGrid::default(),
    };
    if let Some(t) = tol {
        grid.tol = t;
    }
    Ok(catalog_cases(&grid)?)
}

pub fn run(ctx: &Context, args: &CheckArgs, out: &mut dyn Write) -> Result<Status> {
    let threshold = args.threshold.unwrap_or(DEFAULT_THRESHOLD);
    anyhow::ensure!(threshold >= 0.0, "threshold must be nonnegative");
    let rows: Vec<Row> = cases(ctx, args)?
        .into_iter()
        .map(|c| {
            let d = c.max_defect();
            Row {
                label: c.label,
                max_defect: d,
                passed: d <= threshold,
            }
        })
        .collect();
    let failed = rows.iter().filter(|r| !r.passed).count();
    let worst = rows.iter().map(|r| r.max_defect).fold(0.0, f64::max);
    let bytes = match ctx.format_or(Format::Json) {
        Format::Json => output::json_bytes(&CheckOutput {
            threshold,
            max_defect: worst,
            passed: failed == 0,
            cases: rows,
        })?,
        Format::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.label.clone(),
                        output::num(r.max_defect),
                        r.passed.to_string(),
                    ]
                })
                .collect();
            let header = ["operator", "max_defect", "passed"].map(String::from);
            output::csv_bytes(
                "steinops-check/1",
                &[("threshold", output::num(threshold))],
                &header,
                &table,
            )?
        }
    };
    ctx.emit(&bytes, out)?;
    if failed == 0 {
        return Ok(Status::ok());
    }
    let code = if ctx.common.strict {
        exit::VIOLATION
    } else {
        exit::INPUT
    };
    Ok(Status::with(
        code,
        format!("{failed} operator(s) exceed the defect threshold {threshold:e} (worst {worst:e})"),
    ))
}
