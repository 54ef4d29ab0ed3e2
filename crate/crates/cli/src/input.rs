use anyhow::{bail, Context, Result};
use serde_json::Value;
use uqchain::chain::{ChainSpec, CouplingSchedule};
use uqchain::Spin;

use crate::args::ChainArgs;

fn schedule(text: &str, channel: Option<u32>) -> Result<CouplingSchedule> {
    let value: Value = serde_json::from_str(text).context("--coupling is not valid JSON")?;
    let floats = |v: &Value| -> Result<Vec<f64>> {
        v.as_array()
            .context("expected an array of numbers")?
            .iter()
            .map(|x| x.as_f64().context("coupling entries must be numbers"))
            .collect()
    };
    match &value {
        Value::Object(_) => {
            if channel.is_some() {
                bail!("--s cannot be combined with a tagged coupling object");
            }
            Ok(serde_json::from_value(value).context("bad coupling object")?)
        }
        Value::Array(items) if items.iter().all(Value::is_array) && !items.is_empty() => {
            if channel.is_some() {
                bail!("--s cannot be combined with a coupling table");
            }
            let b = items.iter().map(floats).collect::<Result<_>>()?;
            Ok(CouplingSchedule::General { b })
        }
        Value::Array(_) => Ok(CouplingSchedule::SingleS {
            s: channel.unwrap_or(0),
            a: floats(&value)?,
        }),
        _ => bail!("--coupling must be a JSON array or object"),
    }
}

pub fn chain_spec(args: &ChainArgs, default_gamma: Option<f64>) -> Result<ChainSpec> {
    if let Some(path) = &args.spec {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        return Ok(ChainSpec::from_json(&text)?);
    }
    let spin: Spin = args.spin.context("--S is required without --spec")?;
    let coupling = schedule(
        args.coupling
            .as_deref()
            .context("--coupling is required without --spec")?,
        args.channel,
    )?;
    let sites = args.sites.unwrap_or(coupling.bonds() + 1);
    let gamma = args
        .gamma
        .or(default_gamma)
        .context("--gamma is required")?;
    Ok(ChainSpec::new(spin, sites, gamma, coupling)?)
}
