//! Puzzle variants: which statistics wizard B would be told (the key) and
//! which one of them B finally claims to know (the target).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{validate_count_bounds, PartitionConstraints};
use crate::stats::StatDescriptor;

/// Count bounds applied to every bus a variant is analyzed at.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CountBounds {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_count: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_count: Option<u32>,
}

impl CountBounds {
    pub fn exactly(count: u32) -> Self {
        CountBounds {
            min_count: Some(count),
            max_count: Some(count),
        }
    }

    pub fn for_bus(&self, bus: u32) -> PartitionConstraints {
        PartitionConstraints::new(bus).with_count(self.min_count, self.max_count)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawVariant")]
pub struct VariantSpec {
    name: String,
    key: Vec<StatDescriptor>,
    target_index: usize,
    #[serde(default)]
    constraints: CountBounds,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariant {
    name: String,
    key: Vec<StatDescriptor>,
    target_index: usize,
    #[serde(default)]
    constraints: CountBounds,
}

impl TryFrom<RawVariant> for VariantSpec {
    type Error = Error;

    fn try_from(raw: RawVariant) -> Result<Self> {
        custom_variant(raw.name, raw.key, raw.target_index, raw.constraints)
    }
}

impl VariantSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn key(&self) -> &[StatDescriptor] {
        &self.key
    }

    pub fn target_index(&self) -> usize {
        self.target_index
    }

    pub fn target(&self) -> StatDescriptor {
        self.key[self.target_index]
    }

    pub fn constraints(&self) -> CountBounds {
        self.constraints
    }

    /// Replaces the count bounds, revalidating.
    pub fn with_count_bounds(&self, bounds: CountBounds) -> Result<VariantSpec> {
        custom_variant(
            self.name.clone(),
            self.key.clone(),
            self.target_index,
            bounds,
        )
    }

    /// Whether appending a child of age 1 keeps every admissible partition
    /// admissible. An upper count bound breaks this, and with it the
    /// early-stop certificate.
    pub fn supports_append_one(&self) -> bool {
        self.constraints.max_count.is_none()
    }

    pub fn from_json_file(path: &Path) -> Result<VariantSpec> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Validates and builds a variant. Every violated rule is listed.
pub fn custom_variant(
    name: impl Into<String>,
    key: Vec<StatDescriptor>,
    target_index: usize,
    constraints: CountBounds,
) -> Result<VariantSpec> {
    let name = name.into();
    let mut problems = Vec::new();
    if name.trim().is_empty() {
        problems.push("name is empty".to_string());
    }
    if key.is_empty() {
        problems.push("key has no statistics".to_string());
    }
    if target_index >= key.len() {
        problems.push(format!(
            "target_index {target_index} is out of range for a key of {} statistics",
            key.len()
        ));
    }
    for (i, d) in key.iter().enumerate() {
        if key[..i].contains(d) {
            problems.push(format!("duplicate statistic `{d}` in key"));
        }
    }
    if key.contains(&StatDescriptor::PowerSum(1)) {
        problems.push("`power_sum:1` is the bus number and may not be part of the key".to_string());
    }
    if key.contains(&StatDescriptor::PowerSum(0)) {
        problems.push("`power_sum:0` is not a valid statistic".to_string());
    }
    if let Err(e) = validate_count_bounds(constraints.min_count, constraints.max_count) {
        problems.push(e.to_string());
    }
    if !problems.is_empty() {
        return Err(Error::InvalidVariant(problems.join("; ")));
    }
    Ok(VariantSpec {
        name,
        key,
        target_index,
        constraints,
    })
}

/// Named variants, unique by name.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    variants: BTreeMap<String, VariantSpec>,
}

impl Registry {
    /// The built-in variants: `original`, `simplified`, `generalized`,
    /// `cubes` and `original_c3` (original restricted to three children).
    pub fn builtin() -> Registry {
        use StatDescriptor::*;
        let mut registry = Registry::default();
        let builtins = [
            ("original", vec![Product, Count], 0, CountBounds::default()),
            ("simplified", vec![Count], 0, CountBounds::default()),
            (
                "generalized",
                vec![Product, Count, PowerSum(2)],
                0,
                CountBounds::default(),
            ),
            (
                "cubes",
                vec![Product, Count, PowerSum(2), PowerSum(3)],
                0,
                CountBounds::default(),
            ),
            (
                "original_c3",
                vec![Product, Count],
                0,
                CountBounds::exactly(3),
            ),
        ];
        for (name, key, target, bounds) in builtins {
            let spec =
                custom_variant(name, key, target, bounds).expect("builtin variants are valid");
            registry.insert(spec).expect("builtin names are unique");
        }
        registry
    }

    pub fn insert(&mut self, spec: VariantSpec) -> Result<()> {
        if self.variants.contains_key(spec.name()) {
            return Err(Error::InvalidVariant(format!(
                "a variant named `{}` is already registered",
                spec.name()
            )));
        }
        self.variants.insert(spec.name.clone(), spec);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<VariantSpec> {
        self.variants
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownVariant {
                name: name.to_string(),
                available: self.names(),
            })
    }

    pub fn names(&self) -> Vec<String> {
        self.variants.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &VariantSpec> {
        self.variants.values()
    }
}

pub fn builtin_variant(name: &str) -> Result<VariantSpec> {
    Registry::builtin().get(name)
}
