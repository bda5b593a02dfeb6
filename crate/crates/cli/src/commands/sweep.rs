use std::io::Write;

use anyhow::{bail, Result};
use rayon::prelude::*;
use serde::Serialize;
use steinops::bcp_indicators::{BoundReport, IndicatorModel, Theorem};
use steinops::runs_model::RunsModel;

use super::bound::{evaluate, verdict_note};
use super::{Context, Status};
use crate::args::{Format, SweepArgs, SweepFamily};
use crate::{exit, output};

const DEFAULT_SIZES: [usize; 3] = [64, 128, 256];
const DEFAULT_RUNS_SIZES: [usize; 3] = [100, 200, 400];
const DEFAULT_PSTARS: [f64; 2] = [0.4, 0.5];

/// Independent success probabilities of size `n` for a sweep family.
pub fn family_probs(family: SweepFamily, levels: &[f64], n: usize) -> Vec<f64> {
    let lo = levels[0];
    let hi = levels.get(1).copied().unwrap_or(lo);
    match family {
        SweepFamily::Equal => vec![lo; n],
        SweepFamily::TwoLevel => (0..n).map(|i| if i < n / 2 { lo } else { hi }).collect(),
        SweepFamily::Linear if n == 1 => vec![lo],
        SweepFamily::Linear => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

struct Point {
    series: String,
    model: Box<dyn Fn() -> Result<IndicatorModel> + Send + Sync>,
}

#[derive(Serialize)]
struct Row {
    series: String,
    ratio: Option<f64>,
    report: BoundReport,
}

fn points(theorem: Theorem, args: &SweepArgs) -> Result<Vec<Point>> {
    let mut pts = Vec::new();
    if theorem == Theorem::Cor48 {
        let sizes = args.sizes.clone().unwrap_or(DEFAULT_RUNS_SIZES.to_vec());
        for &p in args.pstars.as_deref().unwrap_or(&DEFAULT_PSTARS) {
            for &n in &sizes {
                pts.push(Point {
                    series: format!("pstar={p}"),
                    model: Box::new(move || Ok(IndicatorModel::runs(RunsModel::new(n, p)?))),
                });
            }
        }
        return Ok(pts);
    }
    if args.pstars.is_some() {
        bail!("--pstars applies to cor48 only");
    }
    let family = args.family.unwrap_or(SweepFamily::TwoLevel);
    let levels = args.levels.clone().unwrap_or(vec![1.0 / 6.0, 1.0 / 12.0]);
    if levels.is_empty() {
        bail!("--levels needs at least one probability");
    }
    let series = serde_json::to_value(family)?
        .as_str()
        .unwrap_or_default()
        .to_string();
    for &n in args.sizes.as_deref().unwrap_or(&DEFAULT_SIZES) {
        let levels = levels.clone();
        pts.push(Point {
            series: series.clone(),
            model: Box::new(move || {
                Ok(IndicatorModel::independent(family_probs(
                    family, &levels, n,
                ))?)
            }),
        });
    }
    Ok(pts)
}

pub fn run(ctx: &Context, args: &SweepArgs, out: &mut dyn Write) -> Result<Status> {
    let theorem = args.theorem.unwrap_or(Theorem::Cor42);
    let pts = points(theorem, args)?;
    // rayon keeps the input order in an indexed collect
    let reports: Vec<BoundReport> = pts
        .par_iter()
        .map(|pt| evaluate(theorem, &(pt.model)()?))
        .collect::<Result<_>>()?;

    let mut rows: Vec<Row> = Vec::with_capacity(reports.len());
    for (pt, report) in pts.iter().zip(reports) {
        let ratio = rows
            .last()
            .filter(|prev| prev.series == pt.series)
            .map(|prev| report.total / prev.report.total);
        rows.push(Row {
            series: pt.series.clone(),
            ratio,
            report,
        });
    }

    let bytes = match ctx.format_or(Format::Csv) {
        Format::Json => output::json_bytes(&rows)?,
        Format::Csv => {
            let mut header = vec!["series".to_string()];
            header.extend(theorem.csv_columns());
            header.push("ratio".into());
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut row = vec![r.series.clone()];
                    row.extend(r.report.csv_fields().into_iter().map(|(_, v)| v));
                    row.push(r.ratio.map_or(String::new(), output::num));
                    row
                })
                .collect();
            output::csv_bytes("steinops-sweep/1", &[], &header, &table)?
        }
    };
    ctx.emit(&bytes, out)?;

    let violations = rows
        .iter()
        .filter(|r| matches!(verdict_note(&r.report), Some((_, true))))
        .count();
    if violations > 0 {
        let code = if ctx.common.strict {
            exit::VIOLATION
        } else {
            exit::SUCCESS
        };
        return Ok(Status::with(
            code,
            format!("note: {violations} grid point(s) where the bound is below the exact distance"),
        ));
    }
    Ok(Status::ok())
}
