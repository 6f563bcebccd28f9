use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use pathwise::partition::{Partition, PartitionFamily};
use pathwise::qv::paired_ladder;
use pathwise::{make_named_path, make_random_walk, CadlagPath, PathSpec};

use crate::args::NGrid;

/// Named path, `random_walk:STEPS`, inline JSON (`{...}`) or a JSON file.
pub fn parse_path(spec: &str, seed: u64) -> Result<CadlagPath> {
    let spec = spec.trim();
    if let Some(steps) = spec.strip_prefix("random_walk:") {
        let steps: usize = steps
            .parse()
            .with_context(|| format!("bad step count '{steps}'"))?;
        return Ok(make_random_walk(steps, 1.0, seed)?);
    }
    if spec.starts_with('{') {
        return Ok(PathSpec::from_json(spec)?.build()?);
    }
    if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
        return Ok(PathSpec::from_json(&text)?.build()?);
    }
    Ok(make_named_path(spec)?)
}

fn optional_f64(arg: Option<&str>, default: f64) -> Result<f64> {
    match arg {
        None | Some("") => Ok(default),
        Some(s) => s.parse().with_context(|| format!("bad number '{s}'")),
    }
}

pub fn parse_partition(spec: &str, domain_end: f64) -> Result<PartitionFamily> {
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (spec, None),
    };
    Ok(match kind {
        "fixed" => {
            let points =
                parse_f64_list(arg.ok_or_else(|| anyhow!("fixed partition needs points"))?)?;
            PartitionFamily::Fixed(Partition::from_f64(&points)?)
        }
        "uniform" => PartitionFamily::Uniform {
            t_end: optional_f64(arg, domain_end)?,
        },
        "dyadic" => PartitionFamily::Dyadic {
            t_end: optional_f64(arg, domain_end)?,
        },
        "rho" => PartitionFamily::Rho {
            alpha: optional_f64(arg, 0.0)?,
        },
        "sigma" => PartitionFamily::Sigma,
        "tau" => PartitionFamily::Tau,
        "file" => {
            let file = arg.ok_or_else(|| anyhow!("file partition needs a path"))?;
            let text = std::fs::read_to_string(file).with_context(|| format!("reading {file}"))?;
            PartitionFamily::Fixed(Partition::from_json(&text)?)
        }
        other => bail!("unknown partition family '{other}'"),
    })
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    let v = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number '{x}'"))
        })
        .collect::<Result<Vec<_>>>()?;
    if v.iter().any(|x| !x.is_finite()) {
        bail!("numbers must be finite");
    }
    Ok(v)
}

/// Comma list, or inclusive range `a..b`.
pub fn parse_u64_list(s: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a
            .trim()
            .parse()
            .with_context(|| format!("bad range start '{a}'"))?;
        let b: u64 = b
            .trim()
            .parse()
            .with_context(|| format!("bad range end '{b}'"))?;
        if a > b {
            bail!("empty range {s}");
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<u64>()
                .with_context(|| format!("bad integer '{x}'"))
        })
        .collect()
}

pub fn parse_u32_list(s: &str) -> Result<Vec<u32>> {
    parse_u64_list(s)?
        .into_iter()
        .map(|v| u32::try_from(v).map_err(|_| anyhow!("{v} is too large")))
        .collect()
}

pub fn n_grid(grid: &NGrid) -> Result<Vec<u64>> {
    let v = match &grid.n {
        Some(s) => parse_u64_list(s)?,
        None => paired_ladder(grid.nmax),
    };
    if v.windows(2).any(|w| w[0] >= w[1]) {
        bail!("n values must be strictly increasing");
    }
    Ok(v)
}
