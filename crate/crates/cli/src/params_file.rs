//! Parameter resolution: built-in presets by name, or a `key = value`
//! config file validated through the usual constructor.

use anyhow::Context;
use fsgs_core::params::Params;
use num_rational::Ratio;

pub fn resolve(spec: &str) -> anyhow::Result<Params> {
    match spec {
        "small" => Ok(Params::small()),
        "medium" => Ok(Params::medium()),
        path => from_file(path).with_context(|| format!("loading parameters from {path}")),
    }
}

/// Accepted keys: n, q, m, ell, d, kappa, s_ell (integer or a/b), b_noise.
fn from_file(path: &str) -> anyhow::Result<Params> {
    let text = std::fs::read_to_string(path)?;
    let mut n = None;
    let mut q = None;
    let mut m = None;
    let mut ell = None;
    let mut d = None;
    let mut kappa = None;
    let mut s_ell: Option<Ratio<i64>> = None;
    let mut b_noise = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow::anyhow!("line {}: expected key = value", lineno + 1))?;
        let key = key.trim();
        let value = value.trim();
        let parse_u = |v: &str| -> anyhow::Result<u64> {
            v.parse::<u64>()
                .map_err(|e| anyhow::anyhow!("line {}: {e}", lineno + 1))
        };
        match key {
            "n" => n = Some(parse_u(value)? as usize),
            "q" => q = Some(parse_u(value)?),
            "m" => m = Some(parse_u(value)? as usize),
            "ell" => ell = Some(parse_u(value)? as usize),
            "d" => d = Some(parse_u(value)? as usize),
            "kappa" => kappa = Some(parse_u(value)? as usize),
            "b_noise" => b_noise = Some(parse_u(value)? as i64),
            "s_ell" => {
                let r = if let Some((num, den)) = value.split_once('/') {
                    Ratio::new(num.trim().parse()?, den.trim().parse()?)
                } else {
                    Ratio::from_integer(value.parse()?)
                };
                s_ell = Some(r);
            }
            other => anyhow::bail!("line {}: unknown key {other}", lineno + 1),
        }
    }
    let missing = |what: &str| anyhow::anyhow!("missing key {what}");
    Ok(Params::new(
        n.ok_or_else(|| missing("n"))?,
        q.ok_or_else(|| missing("q"))?,
        m.ok_or_else(|| missing("m"))?,
        ell.ok_or_else(|| missing("ell"))?,
        d.ok_or_else(|| missing("d"))?,
        kappa.ok_or_else(|| missing("kappa"))?,
        s_ell.ok_or_else(|| missing("s_ell"))?,
        b_noise.ok_or_else(|| missing("b_noise"))?,
    )?)
}
