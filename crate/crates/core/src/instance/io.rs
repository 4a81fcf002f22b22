//! Instance files: one JSON document whose fields mirror the in-memory types
//! with 1-based qubit and state ids and integer clock cycles.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Chip, Goal, InitialMapping, Instance, InstanceError, Variant};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    chip: Chip,
    goals: Vec<[usize; 2]>,
    stages: u8,
    variant: Variant,
    initial_mapping: InitialMapping,
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        InstanceFile {
            chip: inst.chip.clone(),
            goals: inst.goals.iter().map(|g| [g.0 + 1, g.1 + 1]).collect(),
            stages: inst.stages,
            variant: inst.variant,
            initial_mapping: inst.initial_mapping,
        }
    }
}

impl TryFrom<InstanceFile> for Instance {
    type Error = InstanceError;

    fn try_from(f: InstanceFile) -> Result<Self, Self::Error> {
        let mut goals = Vec::with_capacity(f.goals.len());
        for [a, b] in f.goals {
            if a == 0 || b == 0 {
                return Err(InstanceError::InvalidInstance(
                    "goal state ids are 1-based".into(),
                ));
            }
            goals.push(Goal(a - 1, b - 1));
        }
        Instance::with_mapping(f.chip, goals, f.stages, f.variant, f.initial_mapping)
    }
}

impl Serialize for Instance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        InstanceFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Instance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let file = InstanceFile::deserialize(d)?;
        Instance::try_from(file).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(inst).expect("instances always serialize")
}

/// Parses an instance document, reporting the JSON path of the first problem.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: InstanceFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        InstanceError::Parse {
            path,
            message: e.into_inner().to_string(),
        }
    })?;
    Instance::try_from(file)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance, InstanceError> {
    parse_instance(&fs::read_to_string(path)?)
}

pub fn write_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<(), InstanceError> {
    let mut text = to_json(inst);
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
