//! File formats: instances, policies, and solve reports.
//!
//! Everything is schema-versioned JSON. An instance file carries the demand
//! family, the per-product price grids, the nominal parameters, and
//! optionally the uncertainty set (without repeating the nominal vector,
//! which the set types carry in memory):
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "family": "loglog",
//!   "I": 11,
//!   "grids": [[1.29, 2.49, 2.99, 3.19, 3.87], ...],
//!   "alpha": [...], "beta": [...], "gamma": [[...zero diagonal...]],
//!   "uncertainty": {"type": "l1", "theta": 0.8}
//! }
//! ```
//!
//! Budget sets serialize as `{"type": "budget", "gamma": 5, "u_hi": {...},
//! "u_lo": {...}}` and explicit sets as `{"type": "explicit", "members":
//! [...]}`, where members may carry a per-member `"family"` override.
//! Policy files store level indices, resolved prices, and probabilities;
//! floats round-trip bit-exactly through JSON.

use crate::analysis::MetricsRow;
use crate::convex::IterTrace;
use crate::demand::{DemandFamily, Instance, ParamVector, PriceVector};
use crate::oracles::RandomizedPolicy;
use crate::uncertainty::{DiscreteBudgetSet, ExplicitSet, L1Set, Scenario, UncertaintySet};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

pub const INSTANCE_SCHEMA_VERSION: u32 = 1;
pub const POLICY_SCHEMA_VERSION: u32 = 1;
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ParamsJson {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<Vec<f64>>,
}

impl From<&ParamVector> for ParamsJson {
    fn from(u: &ParamVector) -> Self {
        ParamsJson {
            alpha: u.alpha.clone(),
            beta: u.beta.clone(),
            gamma: u.gamma.clone(),
        }
    }
}

impl ParamsJson {
    fn to_params(&self) -> Result<ParamVector> {
        ParamVector::new(self.alpha.clone(), self.beta.clone(), self.gamma.clone())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MemberJson {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    family: Option<DemandFamily>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type")]
enum UncertaintyJson {
    #[serde(rename = "l1")]
    L1 { theta: f64 },
    #[serde(rename = "budget")]
    Budget {
        gamma: usize,
        u_hi: ParamsJson,
        u_lo: ParamsJson,
    },
    #[serde(rename = "explicit")]
    Explicit { members: Vec<MemberJson> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InstanceJson {
    schema_version: u32,
    family: DemandFamily,
    #[serde(rename = "I")]
    products: usize,
    grids: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    uncertainty: Option<UncertaintyJson>,
}

fn uncertainty_to_json(set: &UncertaintySet) -> UncertaintyJson {
    match set {
        UncertaintySet::L1(l1) => UncertaintyJson::L1 { theta: l1.theta },
        UncertaintySet::Budget(b) => UncertaintyJson::Budget {
            gamma: b.gamma_budget,
            u_hi: (&b.u_hi).into(),
            u_lo: (&b.u_lo).into(),
        },
        UncertaintySet::Explicit(e) => UncertaintyJson::Explicit {
            members: e
                .members
                .iter()
                .map(|s| MemberJson {
                    alpha: s.params.alpha.clone(),
                    beta: s.params.beta.clone(),
                    gamma: s.params.gamma.clone(),
                    family: s.family,
                })
                .collect(),
        },
    }
}

fn uncertainty_from_json(json: UncertaintyJson, u0: &ParamVector) -> Result<UncertaintySet> {
    Ok(match json {
        UncertaintyJson::L1 { theta } => UncertaintySet::L1(L1Set::new(theta, u0.clone())?),
        UncertaintyJson::Budget { gamma, u_hi, u_lo } => UncertaintySet::Budget(
            DiscreteBudgetSet::new(gamma, u0.clone(), u_hi.to_params()?, u_lo.to_params()?)?,
        ),
        UncertaintyJson::Explicit { members } => {
            let members = members
                .into_iter()
                .map(|m| {
                    Ok(Scenario {
                        params: ParamVector::new(m.alpha, m.beta, m.gamma)?,
                        family: m.family,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            UncertaintySet::Explicit(ExplicitSet::new(members)?)
        }
    })
}

fn parse_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::ParseError {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Serialize an instance (and optional uncertainty set) to JSON text.
pub fn instance_to_json(instance: &Instance, set: Option<&UncertaintySet>) -> Result<String> {
    let json = InstanceJson {
        schema_version: INSTANCE_SCHEMA_VERSION,
        family: instance.family,
        products: instance.products(),
        grids: instance.grids.clone(),
        alpha: instance.u0.alpha.clone(),
        beta: instance.u0.beta.clone(),
        gamma: instance.u0.gamma.clone(),
        uncertainty: set.map(uncertainty_to_json),
    };
    serde_json::to_string_pretty(&json).map_err(|e| Error::ParseError {
        path: "<memory>".into(),
        message: e.to_string(),
    })
}

/// Parse an instance (and optional uncertainty set) from JSON text.
pub fn instance_from_json(text: &str, origin: &Path) -> Result<(Instance, Option<UncertaintySet>)> {
    let json: InstanceJson = serde_json::from_str(text).map_err(|e| parse_err(origin, e))?;
    if json.schema_version != INSTANCE_SCHEMA_VERSION {
        return Err(Error::SchemaVersionMismatch {
            found: json.schema_version,
            expected: INSTANCE_SCHEMA_VERSION,
        });
    }
    if json.products != json.grids.len() {
        return Err(parse_err(
            origin,
            format!(
                "field I = {} does not match {} grids",
                json.products,
                json.grids.len()
            ),
        ));
    }
    let u0 = ParamVector::new(json.alpha, json.beta, json.gamma)?;
    let instance = Instance::new(json.family, json.grids, u0)?;
    let set = json
        .uncertainty
        .map(|u| uncertainty_from_json(u, &instance.u0))
        .transpose()?;
    Ok((instance, set))
}

pub fn write_instance(
    path: &Path,
    instance: &Instance,
    set: Option<&UncertaintySet>,
) -> Result<()> {
    std::fs::write(path, instance_to_json(instance, set)? + "\n")?;
    Ok(())
}

pub fn read_instance(path: &Path) -> Result<(Instance, Option<UncertaintySet>)> {
    let text = std::fs::read_to_string(path)?;
    instance_from_json(&text, path)
}

/// SHA-256 of the canonical instance serialization, hex-encoded. Ties a
/// report to the exact instance it was computed from.
pub fn instance_digest(instance: &Instance, set: Option<&UncertaintySet>) -> Result<String> {
    let text = instance_to_json(instance, set)?;
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    Ok(format!("{:x}", hasher.finalize()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PolicyAtomJson {
    levels: Vec<usize>,
    prices: Vec<f64>,
    prob: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PolicyJson {
    schema_version: u32,
    support: Vec<PolicyAtomJson>,
}

/// Serialize a policy against its instance (resolving prices).
pub fn policy_to_json(instance: &Instance, policy: &RandomizedPolicy) -> Result<String> {
    let support = policy
        .support
        .iter()
        .map(|(p, prob)| {
            Ok(PolicyAtomJson {
                levels: p.levels.clone(),
                prices: instance.prices(p)?,
                prob: *prob,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let json = PolicyJson {
        schema_version: POLICY_SCHEMA_VERSION,
        support,
    };
    serde_json::to_string_pretty(&json).map_err(|e| Error::ParseError {
        path: "<memory>".into(),
        message: e.to_string(),
    })
}

/// Parse a policy and check it against an instance. Probabilities are
/// renormalized only when their sum drifts by more than 1e-12; larger drift
/// up to 1e-9 is accepted and rescaled, beyond that it is an error.
pub fn policy_from_json(
    text: &str,
    origin: &Path,
    instance: &Instance,
) -> Result<RandomizedPolicy> {
    let json: PolicyJson = serde_json::from_str(text).map_err(|e| parse_err(origin, e))?;
    if json.schema_version != POLICY_SCHEMA_VERSION {
        return Err(Error::SchemaVersionMismatch {
            found: json.schema_version,
            expected: POLICY_SCHEMA_VERSION,
        });
    }
    let mut support = Vec::with_capacity(json.support.len());
    for atom in &json.support {
        let p = PriceVector::new(atom.levels.clone());
        let resolved = instance.prices(&p).map_err(|_| {
            Error::SupportMismatch(format!(
                "policy levels {:?} are not on the instance grids",
                atom.levels
            ))
        })?;
        for (a, b) in resolved.iter().zip(&atom.prices) {
            if (a - b).abs() > 1e-9 * a.abs().max(1.0) {
                return Err(Error::SupportMismatch(format!(
                    "stored price {b} disagrees with grid price {a}"
                )));
            }
        }
        support.push((p, atom.prob));
    }
    let total: f64 = support.iter().map(|(_, prob)| prob).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InconsistentInputs(format!(
            "policy probabilities sum to {total}"
        )));
    }
    let mut policy = RandomizedPolicy { support };
    if (total - 1.0).abs() > 1e-12 {
        policy = policy.normalized();
    }
    policy.validate(instance)?;
    Ok(policy)
}

pub fn write_policy(path: &Path, instance: &Instance, policy: &RandomizedPolicy) -> Result<()> {
    std::fs::write(path, policy_to_json(instance, policy)? + "\n")?;
    Ok(())
}

pub fn read_policy(path: &Path, instance: &Instance) -> Result<RandomizedPolicy> {
    let text = std::fs::read_to_string(path)?;
    policy_from_json(&text, path, instance)
}

/// A solve report: configuration echo, headline metrics, the policy, and
/// the bound trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema_version: u32,
    pub instance_digest: String,
    /// Echo of the solver configuration, free-form.
    pub config: serde_json::Value,
    pub metrics: MetricsRow,
    pub policy: serde_json::Value,
    pub trace: Vec<IterTrace>,
}

impl ReportFile {
    pub fn new(
        instance: &Instance,
        set: Option<&UncertaintySet>,
        config: serde_json::Value,
        metrics: MetricsRow,
        policy: &RandomizedPolicy,
        trace: Vec<IterTrace>,
    ) -> Result<Self> {
        Ok(ReportFile {
            schema_version: REPORT_SCHEMA_VERSION,
            instance_digest: instance_digest(instance, set)?,
            config,
            metrics,
            policy: serde_json::from_str(&policy_to_json(instance, policy)?).map_err(|e| {
                Error::ParseError {
                    path: "<memory>".into(),
                    message: e.to_string(),
                }
            })?,
            trace,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::ParseError {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let report: ReportFile = serde_json::from_str(&text).map_err(|e| parse_err(path, e))?;
        if report.schema_version != REPORT_SCHEMA_VERSION {
            return Err(Error::SchemaVersionMismatch {
                found: report.schema_version,
                expected: REPORT_SCHEMA_VERSION,
            });
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn orange_juice_path(name: &str) -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
    }

    #[test]
    fn orange_juice_loglog_file() {
        let (inst, set) = read_instance(&orange_juice_path("orange_juice_loglog.json")).unwrap();
        assert_eq!(inst.products(), 11);
        assert_eq!(inst.family, DemandFamily::LogLog);
        assert_eq!(inst.grids[0], vec![1.29, 2.49, 2.99, 3.19, 3.87]);
        assert!((inst.u0.beta[10] - 0.1542).abs() < 1e-12);
        assert!(set.is_none());
    }

    #[test]
    fn orange_juice_semilog_file() {
        let (inst, _) = read_instance(&orange_juice_path("orange_juice_semilog.json")).unwrap();
        assert_eq!(inst.products(), 11);
        assert_eq!(inst.family, DemandFamily::SemiLog);
        assert!((inst.u0.alpha[0] - 9.873).abs() < 1e-12);
        assert!((inst.u0.gamma[0][1] - 0.0571).abs() < 1e-12);
        assert_eq!(inst.u0.gamma[4][4], 0.0);
    }

    #[test]
    fn instance_round_trip() {
        let u0 = ParamVector::new(
            vec![2.5, 3.5],
            vec![0.7, 0.9],
            vec![vec![0.0, 0.25], vec![-0.125, 0.0]],
        )
        .unwrap();
        let inst = Instance::new(
            DemandFamily::SemiLog,
            vec![vec![1.0, 2.0], vec![1.5, 2.5, 3.5]],
            u0.clone(),
        )
        .unwrap();
        let set = UncertaintySet::Budget(
            DiscreteBudgetSet::from_multipliers(2, u0, 0.7, 1.3).unwrap(),
        );
        let text = instance_to_json(&inst, Some(&set)).unwrap();
        let (inst2, set2) =
            instance_from_json(&text, Path::new("<test>")).unwrap();
        assert_eq!(inst.u0, inst2.u0);
        assert_eq!(inst.grids, inst2.grids);
        assert_eq!(inst.family, inst2.family);
        match set2 {
            Some(UncertaintySet::Budget(b)) => {
                assert_eq!(b.gamma_budget, 2);
                assert_eq!(b.u0, inst.u0);
            }
            other => panic!("unexpected uncertainty {other:?}"),
        }
        // Serialization is stable.
        let text2 = instance_to_json(&inst2, None).unwrap();
        let (inst3, _) = instance_from_json(&text2, Path::new("<test>")).unwrap();
        assert_eq!(inst2.u0, inst3.u0);
    }

    #[test]
    fn policy_round_trip_is_bit_exact() {
        let inst = Instance::new(
            DemandFamily::Linear,
            vec![vec![1.0, 2.5]],
            ParamVector::single(10.0, 2.0),
        )
        .unwrap();
        let policy = RandomizedPolicy {
            support: vec![
                (PriceVector::new(vec![0]), 17.0 / 21.0),
                (PriceVector::new(vec![1]), 4.0 / 21.0),
            ],
        };
        let text = policy_to_json(&inst, &policy).unwrap();
        let back = policy_from_json(&text, Path::new("<test>"), &inst).unwrap();
        assert_eq!(policy.support[0].1.to_bits(), back.support[0].1.to_bits());
        assert_eq!(policy.support[1].1.to_bits(), back.support[1].1.to_bits());
    }

    #[test]
    fn policy_off_grid_is_support_mismatch() {
        let inst = Instance::new(
            DemandFamily::Linear,
            vec![vec![1.0, 2.5]],
            ParamVector::single(10.0, 2.0),
        )
        .unwrap();
        let text = r#"{"schema_version":1,"support":[{"levels":[7],"prices":[9.0],"prob":1.0}]}"#;
        let err = policy_from_json(text, Path::new("<test>"), &inst).unwrap_err();
        assert!(matches!(err, Error::SupportMismatch(_)));
    }

    #[test]
    fn schema_version_is_checked() {
        let text = r#"{"schema_version":99,"family":"linear","I":1,"grids":[[1.0]],"alpha":[1.0],"beta":[1.0],"gamma":[[0.0]]}"#;
        let err = instance_from_json(text, Path::new("<test>")).unwrap_err();
        assert!(matches!(err, Error::SchemaVersionMismatch { found: 99, .. }));
    }

    #[test]
    fn parse_error_carries_path() {
        let err = instance_from_json("{ not json", Path::new("/tmp/broken.json")).unwrap_err();
        match err {
            Error::ParseError { path, .. } => assert!(path.contains("broken.json")),
            other => panic!("unexpected {other:?}"),
        }
    }
}
