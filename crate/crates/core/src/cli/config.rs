use std::fs;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::params::{reduce_with_record, DimensionlessParams, PhysicalParams};
use crate::rational::{self, int, Rational, Rationalization};

use super::ParamArgs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamSource {
    Flags,
    PhysicalFile,
    DimensionlessFile,
    Default,
}

/// Everything that determines a run's outputs. The output directory is left
/// out so that the manifest does not depend on where files are written.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub source: ParamSource,
    pub params: DimensionlessParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub physical: Option<PhysicalParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max_cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

fn exact_input(field: &'static str, input: &str, record: &mut Vec<Rationalization>) -> Result<Rational> {
    let q = rational::parse_rational(input).map_err(|e| Error::Config(format!("--{field}: {e}")))?;
    record.push(Rationalization::new(field, input, &q, true));
    Ok(q)
}

fn json_rational(field: &'static str, v: &Value, record: &mut Vec<Rationalization>) -> Result<Rational> {
    match v {
        Value::String(s) => exact_input(field, s, record),
        Value::Number(n) => exact_input(field, &n.to_string(), record),
        _ => Err(Error::Config(format!("dimensionless.{field} must be a number or a rational string"))),
    }
}

/// Resolves the parameter group: either all of `--r --b --kappa`, or a
/// `--physical` file, never both.
pub fn load_params(
    args: &ParamArgs,
) -> Result<(DimensionlessParams, Vec<Rationalization>, ParamSource, Option<PhysicalParams>)> {
    let flags = [("r", &args.r), ("b", &args.b), ("kappa", &args.kappa)];
    let given: Vec<_> = flags.iter().filter(|(_, v)| v.is_some()).collect();
    let mut record = Vec::new();
    match (&args.physical, given.len()) {
        (Some(_), n) if n > 0 => Err(Error::Config(
            "give either --physical or --r/--b/--kappa, not both".into(),
        )),
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("--physical {}: {e}", path.display())))?;
            let root: Value =
                serde_json::from_str(&text).map_err(|e| Error::Config(format!("--physical {}: {e}", path.display())))?;
            let obj = root
                .as_object()
                .ok_or_else(|| Error::Config("parameter file must hold a JSON object".into()))?;
            match (obj.get("physical"), obj.get("dimensionless")) {
                (Some(_), Some(_)) => Err(Error::Config(
                    "parameter file has both `physical` and `dimensionless` groups".into(),
                )),
                (Some(phys), None) => {
                    let phys: PhysicalParams = serde_json::from_value(phys.clone())
                        .map_err(|e| Error::Config(format!("physical: {e}")))?;
                    let (p, rec) = reduce_with_record(&phys)?;
                    Ok((p, rec, ParamSource::PhysicalFile, Some(phys)))
                }
                (None, Some(dim)) => {
                    let get = |field: &'static str| {
                        dim.get(field).ok_or_else(|| Error::Config(format!("dimensionless.{field} is missing")))
                    };
                    let r = json_rational("r", get("r")?, &mut record)?;
                    let b = json_rational("b", get("b")?, &mut record)?;
                    let kappa = json_rational("kappa", get("kappa")?, &mut record)?;
                    Ok((DimensionlessParams::new(r, b, kappa)?, record, ParamSource::DimensionlessFile, None))
                }
                (None, None) => Err(Error::Config(
                    "parameter file needs a `physical` or `dimensionless` group".into(),
                )),
            }
        }
        (None, 3) => {
            let r = exact_input("r", args.r.as_deref().unwrap(), &mut record)?;
            let b = exact_input("b", args.b.as_deref().unwrap(), &mut record)?;
            let kappa = exact_input("kappa", args.kappa.as_deref().unwrap(), &mut record)?;
            Ok((DimensionlessParams::new(r, b, kappa)?, record, ParamSource::Flags, None))
        }
        (None, 0) => Err(Error::Config(
            "missing parameter group: give --r, --b and --kappa, or --physical FILE".into(),
        )),
        (None, _) => {
            let missing: Vec<String> = flags.iter().filter(|(_, v)| v.is_none()).map(|(f, _)| format!("--{f}")).collect();
            Err(Error::Config(format!("incomplete parameter group: missing {}", missing.join(", "))))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Kappa,
    R,
    B,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Kappa => "kappa",
            SweepAxis::R => "r",
            SweepAxis::B => "b",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    #[serde(with = "crate::rational::as_string")]
    pub start: Rational,
    #[serde(with = "crate::rational::as_string")]
    pub end: Rational,
    pub points: usize,
}

impl SweepSpec {
    /// Parses `axis:start:end:points`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(Error::Config(format!("--sweep expects axis:start:end:points, got `{s}`")));
        }
        let axis = match parts[0] {
            "kappa" => SweepAxis::Kappa,
            "r" => SweepAxis::R,
            "b" => SweepAxis::B,
            other => return Err(Error::Config(format!("--sweep axis must be kappa, r or b, got `{other}`"))),
        };
        let bound = |x: &str| rational::parse_rational(x).map_err(|e| Error::Config(format!("--sweep: {e}")));
        let points: usize = parts[3]
            .parse()
            .map_err(|_| Error::Config(format!("--sweep point count `{}` is not a positive integer", parts[3])))?;
        if points == 0 {
            return Err(Error::Config("--sweep needs at least one point".into()));
        }
        Ok(Self { axis, start: bound(parts[1])?, end: bound(parts[2])?, points })
    }

    /// Evenly spaced values, both endpoints included.
    pub fn values(&self) -> Vec<Rational> {
        if self.points == 1 {
            return vec![self.start.clone()];
        }
        let step = (&self.end - &self.start) / int(self.points as i64 - 1);
        (0..self.points).map(|i| &self.start + &step * int(i as i64)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn sweep_spec_values() {
        let s = SweepSpec::parse("kappa:0:1:11").unwrap();
        let v = s.values();
        assert_eq!(v.len(), 11);
        assert_eq!(v[3], frac(3, 10));
        assert_eq!(v[10], int(1));
        assert!(SweepSpec::parse("kappa:0:1").is_err());
        assert!(SweepSpec::parse("x:0:1:3").is_err());
        assert!(SweepSpec::parse("r:0:1:0").is_err());
    }

    #[test]
    fn parameter_groups() {
        let mut a = ParamArgs { r: Some("1/2".into()), b: Some("0.25".into()), kappa: None, physical: None };
        assert!(matches!(load_params(&a), Err(Error::Config(m)) if m.contains("--kappa")));
        a.kappa = Some("3/10".into());
        let (p, rec, src, _) = load_params(&a).unwrap();
        assert_eq!(*p.b(), frac(1, 4));
        assert_eq!(rec.len(), 3);
        assert_eq!(src, ParamSource::Flags);
    }
}
