//! Building laws and operators from flags, files and `name:key=value` specs.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{Map, Value};
use steinops::distributions::{
    pmf_bcp, pmf_binomial, pmf_compound_explicit, pmf_compound_panjer, pmf_negative_binomial,
    pmf_poisson, pmf_poisson_binomial, pmf_pseudo_binomial, PanjerCounting, Pmf, SeverityLaw,
};
use steinops::formats;
use steinops::runs_model::{exact_runs_law, RunsModel};
use steinops::stein_catalog::{
    op_bcp_binomial_perturbation, op_negative_binomial, op_poisson, op_pseudo_binomial,
    AffineOperator,
};

use crate::args::{Family, PmfArgs};

fn need<T>(value: Option<T>, flag: &str, family: &str) -> Result<T> {
    value.ok_or_else(|| anyhow!("--{flag} is required for family {family}"))
}

/// Parses `key=value` pairs separated by commas. Values that read as integers
/// stay integers so they can fill count parameters.
pub fn parse_pairs(text: &str) -> Result<Map<String, Value>> {
    let mut map = Map::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("expected key=value, got `{part}`"))?;
        let v = v.trim();
        let value = if let Ok(i) = v.parse::<u64>() {
            Value::from(i)
        } else {
            let x: f64 = v
                .parse()
                .with_context(|| format!("`{v}` is not a number"))?;
            Value::from(x)
        };
        map.insert(k.trim().replace('-', "_"), value);
    }
    Ok(map)
}

/// Splits `name:key=value,...` into the name and its parameters.
pub fn parse_spec(text: &str) -> Result<(String, Map<String, Value>)> {
    let (name, rest) = text.split_once(':').unwrap_or((text, ""));
    Ok((name.trim().to_string(), parse_pairs(rest)?))
}

fn number(params: &Map<String, Value>, keys: &[&str], spec: &str) -> Result<f64> {
    keys.iter()
        .find_map(|k| params.get(*k).and_then(Value::as_f64))
        .ok_or_else(|| anyhow!("`{spec}` needs parameter {}", keys[0]))
}

fn count(params: &Map<String, Value>, keys: &[&str], spec: &str) -> Result<u64> {
    let x = number(params, keys, spec)?;
    if x < 0.0 || x.fract() != 0.0 {
        bail!("`{spec}`: {} must be a nonnegative integer", keys[0]);
    }
    Ok(x as u64)
}

/// Operator from a spec such as `poisson:lambda=1` or `bcp:m=5,p=0.1,alpha=2`.
pub fn operator_from_spec(text: &str) -> Result<AffineOperator> {
    let (name, params) = parse_spec(text)?;
    let op = match name.as_str() {
        "poisson" => op_poisson(number(&params, &["lambda", "alpha"], text)?)?,
        "binomial" => op_pseudo_binomial(
            count(&params, &["n", "m"], text)? as f64,
            number(&params, &["p"], text)?,
        )?,
        "pseudo-binomial" => op_pseudo_binomial(
            number(&params, &["m_tilde", "m"], text)?,
            number(&params, &["p"], text)?,
        )?,
        "nb" => op_negative_binomial(
            number(&params, &["r"], text)?,
            number(&params, &["p_bar"], text)?,
        )?,
        "bcp" => op_bcp_binomial_perturbation(
            count(&params, &["m"], text)?,
            number(&params, &["p"], text)?,
            number(&params, &["alpha", "lambda"], text)?,
        )?,
        other => bail!("unknown operator `{other}` (poisson, binomial, pseudo-binomial, nb, bcp)"),
    };
    Ok(op)
}

/// Law from a spec such as `poisson:alpha=2`, using the `pmf` parameter names.
pub fn law_from_spec(text: &str, tol: f64) -> Result<Pmf> {
    let (name, mut params) = parse_spec(text)?;
    params.insert("family".into(), Value::from(name));
    let args: PmfArgs =
        serde_json::from_value(Value::Object(params)).with_context(|| format!("law `{text}`"))?;
    Ok(build_pmf(&args, tol)?.0)
}

/// Numbers from JSON (an array, or an object with `masses`), from
/// `index,value` CSV rows, or from a single CSV column with an optional
/// header. `#` lines are comments.
pub fn read_numbers(path: &Path) -> Result<Vec<f64>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let trimmed = text.trim_start();
    let parsed = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        formats::masses_from_json(text.as_bytes())?
    } else {
        let mut data = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .peekable();
        if data.peek().is_some_and(|l| l.contains(',')) {
            formats::masses_from_csv(text.as_bytes())?
        } else {
            let mut values = Vec::new();
            for (row, line) in data.enumerate() {
                match line.parse::<f64>() {
                    Ok(v) => values.push(v),
                    Err(_) if row == 0 => continue,
                    Err(_) => bail!("{}: `{line}` is not a number", path.display()),
                }
            }
            values
        }
    };
    if parsed.is_empty() {
        bail!("{} holds no numbers", path.display());
    }
    Ok(parsed)
}

/// Severity masses indexed from 0; see [`read_numbers`] for the formats.
pub fn read_severity(path: &Path) -> Result<SeverityLaw> {
    Ok(SeverityLaw::new(read_numbers(path)?)?)
}

/// Counting law from `a=..,b=..`.
pub fn panjer_counting(text: &str) -> Result<PanjerCounting> {
    let params = parse_pairs(text)?;
    let a = number(&params, &["a"], text)?;
    let b = number(&params, &["b"], text)?;
    Ok(PanjerCounting::from_ab(a, b)?)
}

/// The requested law, plus the L1 distance to the convolution-power
/// computation when a compound cross-check was asked for.
pub fn build_pmf(args: &PmfArgs, tol: f64) -> Result<(Pmf, Option<f64>)> {
    let family = args.family.ok_or_else(|| anyhow!("--family is required"))?;
    let name = serde_json::to_value(family)?
        .as_str()
        .unwrap_or_default()
        .to_string();
    let f = name.as_str();
    let pmf = match family {
        Family::Poisson => pmf_poisson(need(args.alpha, "alpha", f)?, tol)?,
        Family::Binomial => pmf_binomial(need(args.n, "n", f)?, need(args.p, "p", f)?)?,
        Family::PseudoBinomial => {
            pmf_pseudo_binomial(need(args.m_tilde, "m-tilde", f)?, need(args.p, "p", f)?)?
        }
        Family::Nb => {
            pmf_negative_binomial(need(args.r, "r", f)?, need(args.p_bar, "p-bar", f)?, tol)?
        }
        Family::Bcp => pmf_bcp(
            need(args.m, "m", f)?,
            need(args.p, "p", f)?,
            need(args.alpha, "alpha", f)?,
            tol,
        )?,
        Family::Compound => {
            let counting = panjer_counting(need(args.panjer.as_deref(), "panjer", f)?)?;
            let sev = read_severity(need(args.severity.as_deref(), "severity", f)?)?;
            let pmf = pmf_compound_panjer(&counting, &sev, tol)?;
            let check = if args.cross_check {
                let explicit = pmf_compound_explicit(&counting.pmf(tol)?, &sev, tol)?;
                Some(steinops::distributions::l1_distance(&pmf, &explicit))
            } else {
                None
            };
            return Ok((pmf, check));
        }
        Family::PoissonBinomial => {
            pmf_poisson_binomial(&read_numbers(need(args.probs.as_deref(), "probs", f)?)?)?
        }
        Family::Runs => {
            let n = need(args.n, "n", f)?;
            let n = usize::try_from(n).context("--n is too large")?;
            exact_runs_law(&RunsModel::new(n, need(args.pstar, "pstar", f)?)?)
        }
    };
    if args.cross_check {
        bail!("--cross-check applies to the compound family only");
    }
    Ok((pmf, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs_split_into_name_and_numbers() {
        let (name, params) = parse_spec("bcp:m=5,p=0.1,alpha=2.5").unwrap();
        assert_eq!(name, "bcp");
        assert_eq!(params["m"], Value::from(5u64));
        assert_eq!(params["alpha"].as_f64(), Some(2.5));
        assert!(parse_spec("poisson:lambda").is_err());
    }

    #[test]
    fn law_specs_reuse_pmf_names() {
        let a = law_from_spec("poisson:alpha=2", 1e-12).unwrap();
        let b = law_from_spec("poisson:lambda=2", 1e-12).unwrap();
        assert_eq!(a, b);
        assert!(law_from_spec("binomial:n=4,p=0.3", 1e-12).is_ok());
        assert!(law_from_spec("binomial:n=4.5,p=0.3", 1e-12).is_err());
    }
}
