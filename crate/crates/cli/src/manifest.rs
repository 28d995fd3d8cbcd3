//! Run manifests and the JSON artifact envelope every command emits.

use crate::format::Input;
use resfin_core::paradox::{
    Equidecomposition, FixedPointModel, InvariantMeasureCertificate, LiftedWitness, MeasureModel, ParadoxCertificate,
};
use resfin_core::zsystems::ClopenSet;
use resfin_core::{FiniteAction, Witness};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const TOOL_VERSION: &str = concat!("resfin ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub seed: Option<u64>,
    /// `--tol` overrides, rendered as given.
    pub tolerances: BTreeMap<String, String>,
    /// Other flags that shape the output (`epsilon`, `window`, ...).
    pub parameters: BTreeMap<String, String>,
    pub version: String,
}

impl RunManifest {
    pub fn new(command: &str, inputs: &[Input]) -> Self {
        Self {
            command: command.into(),
            inputs: inputs.iter().map(|i| InputDigest { name: i.name.clone(), sha256: i.digest() }).collect(),
            seed: None,
            tolerances: BTreeMap::new(),
            parameters: BTreeMap::new(),
            version: TOOL_VERSION.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Verified,
    Found,
    Refuted,
    NoneAtContext,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Verified | Status::Found => 0,
            Status::Refuted | Status::NoneAtContext => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "data", rename_all = "kebab-case")]
pub enum Certificate {
    Witness(Witness),
    Clopen(ClopenSet),
    Paradox(ParadoxCertificate),
    InvariantMeasure(InvariantMeasureCertificate),
    Equidecomposition(Equidecomposition),
    MeasureModel(MeasureModel),
    LiftedWitness(LiftedWitness),
    FixedPointModel(FixedPointModel),
    Action(FiniteAction),
}

impl Certificate {
    /// The finite model inside, when there is one with points of the system.
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Certificate::Witness(w) => Some(w),
            Certificate::MeasureModel(m) => Some(&m.witness),
            Certificate::FixedPointModel(m) => Some(&m.witness),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub manifest: RunManifest,
    pub status: Status,
    pub report: serde_json::Value,
    pub certificate: Option<Certificate>,
}

impl Artifact {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("artifacts serialize");
        s.push('\n');
        s
    }

    pub fn from_json(name: &str, bytes: &[u8]) -> crate::error::CliResult<Self> {
        serde_json::from_slice(bytes).map_err(|e| crate::error::CliError::Parse {
            file: name.into(),
            line: Some(e.line()),
            field: "(artifact)".into(),
            message: e.to_string(),
        })
    }
}
