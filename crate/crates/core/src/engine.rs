//! Ambiguity analysis and the solve loop.
//!
//! For one bus, every admissible partition is evaluated on the variant's key
//! and grouped; keys shared by two or more partitions are the ambiguity
//! classes (wizard A's "No"). A bus is valid when the classes carry exactly
//! one distinct target value (wizard B's "Aha!").
//!
//! Adding a child of age 1 maps an ambiguity class at bus `b` to one at
//! `b + 1` and maps distinct targets to distinct targets, so the number of
//! ambiguous targets never decreases with the bus. The first bus with two or
//! more ambiguous targets therefore certifies that no larger bus is valid.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{Partition, Partitions};
use crate::stats::{evaluate_parts, KeyValue, StatDescriptor};
use crate::variant::VariantSpec;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbiguityClass {
    pub key: KeyValue,
    pub target: u128,
    /// At least two, in canonical lexicographic order.
    pub partitions: Vec<Partition>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BusAnalysis {
    pub bus: u32,
    pub variant: VariantSpec,
    /// Admissible partitions seen, after any realism filter.
    pub partition_total: u64,
    /// Sorted by key.
    pub classes: Vec<AmbiguityClass>,
    pub ambiguous_targets: BTreeSet<u128>,
}

impl BusAnalysis {
    pub fn new(
        bus: u32,
        variant: VariantSpec,
        partition_total: u64,
        classes: Vec<AmbiguityClass>,
    ) -> Self {
        let ambiguous_targets = classes.iter().map(|c| c.target).collect();
        BusAnalysis {
            bus,
            variant,
            partition_total,
            classes,
            ambiguous_targets,
        }
    }

    /// The single ambiguous target, if the bus is valid.
    pub fn unique_target(&self) -> Option<u128> {
        if self.ambiguous_targets.len() == 1 {
            self.ambiguous_targets.first().copied()
        } else {
            None
        }
    }
}

/// B can announce the target iff exactly one ambiguous target exists. With
/// none, A could not have said "No".
pub fn is_valid_bus(analysis: &BusAnalysis) -> bool {
    analysis.ambiguous_targets.len() == 1
}

/// Optional plausibility filter on the hidden partition. Off by default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealismFilter {
    pub min_parent_age: Option<u128>,
    pub children_younger_than_parent: bool,
}

impl RealismFilter {
    pub fn is_active(&self) -> bool {
        self.min_parent_age.is_some() || self.children_younger_than_parent
    }

    fn admits(&self, parts: &[u32]) -> Result<bool> {
        if !self.is_active() {
            return Ok(true);
        }
        let age = StatDescriptor::Product.evaluate_parts(parts)?;
        if self.min_parent_age.is_some_and(|min| age < min) {
            return Ok(false);
        }
        if self.children_younger_than_parent {
            let oldest = parts.last().copied().unwrap_or(0);
            return Ok(u128::from(oldest) < age);
        }
        Ok(true)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// Worker threads; 1 runs everything on the calling thread.
    pub jobs: usize,
    /// Fail instead of enumerating more than this many partitions per bus.
    pub max_partitions: Option<u64>,
    pub realism: RealismFilter,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            jobs: 1,
            max_partitions: None,
            realism: RealismFilter::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    /// First bus with two or more ambiguous targets; no bus from here on
    /// can be valid.
    Certified { stop_bus: u32 },
    /// Every bus up to `max_bus` was analyzed without reaching a certificate.
    BudgetExhausted { max_bus: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOutcome {
    pub variant: VariantSpec,
    /// Every analyzed bus, in increasing order starting at 1.
    pub analyses: Vec<BusAnalysis>,
    pub termination: Termination,
}

impl SolveOutcome {
    pub fn valid(&self) -> impl Iterator<Item = &BusAnalysis> {
        self.analyses.iter().filter(|a| is_valid_bus(a))
    }

    pub fn valid_buses(&self) -> Vec<u32> {
        self.valid().map(|a| a.bus).collect()
    }

    pub fn analysis(&self, bus: u32) -> Option<&BusAnalysis> {
        self.analyses.iter().find(|a| a.bus == bus)
    }
}

type Groups = HashMap<KeyValue, Vec<Partition>>;

/// Analysis driver holding options and, for `jobs > 1`, a thread pool.
#[derive(Default)]
pub struct Engine {
    options: AnalysisOptions,
    pool: Option<rayon::ThreadPool>,
}

impl Engine {
    pub fn new(options: AnalysisOptions) -> Result<Engine> {
        let pool = if options.jobs > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(options.jobs)
                    .build()
                    .map_err(|e| Error::ThreadPool(e.to_string()))?,
            )
        } else {
            None
        };
        Ok(Engine { options, pool })
    }

    pub fn options(&self) -> &AnalysisOptions {
        &self.options
    }

    pub fn analyze_bus(&self, bus: u32, variant: &VariantSpec) -> Result<BusAnalysis> {
        self.analyze_inner(bus, variant).map_err(|e| e.at_bus(bus))
    }

    fn analyze_inner(&self, bus: u32, variant: &VariantSpec) -> Result<BusAnalysis> {
        variant.constraints().for_bus(bus).validate()?;
        // Shard m holds the partitions whose largest part is m.
        let shards: Vec<u32> = (1..=bus).collect();
        let results: Vec<Result<(u64, Groups)>> = match &self.pool {
            Some(pool) => pool.install(|| {
                shards
                    .par_iter()
                    .map(|&m| self.group_shard(bus, m, variant))
                    .collect()
            }),
            None => shards
                .iter()
                .map(|&m| self.group_shard(bus, m, variant))
                .collect(),
        };

        let mut total = 0u64;
        let mut groups: Groups = HashMap::new();
        for shard in results {
            let (count, shard_groups) = shard?;
            total += count;
            for (key, mut members) in shard_groups {
                groups.entry(key).or_default().append(&mut members);
            }
        }
        if let Some(limit) = self.options.max_partitions {
            if total > limit {
                return Err(Error::BudgetExceeded { bus, limit });
            }
        }

        let target_index = variant.target_index();
        let mut classes: Vec<AmbiguityClass> = groups
            .into_iter()
            .filter(|(_, members)| members.len() >= 2)
            .map(|(key, mut partitions)| {
                partitions.sort_unstable();
                AmbiguityClass {
                    target: key.get(target_index),
                    key,
                    partitions,
                }
            })
            .collect();
        classes.sort_unstable_by(|a, b| a.key.cmp(&b.key));
        Ok(BusAnalysis::new(bus, variant.clone(), total, classes))
    }

    fn group_shard(&self, bus: u32, largest: u32, variant: &VariantSpec) -> Result<(u64, Groups)> {
        let bounds = variant.constraints();
        let min_rest = bounds.min_count.unwrap_or(0).saturating_sub(1);
        let max_rest = match bounds.max_count {
            Some(0) => return Ok((0, HashMap::new())),
            Some(m) => m - 1,
            None => u32::MAX,
        };
        let mut rest = Partitions::raw(bus - largest, min_rest, max_rest, largest);
        let mut groups: Groups = HashMap::new();
        let mut count = 0u64;
        let mut parts: Vec<u32> = Vec::new();
        while let Some(prefix) = rest.next_slice() {
            parts.clear();
            parts.extend_from_slice(prefix);
            parts.push(largest);
            if !self.options.realism.admits(&parts)? {
                continue;
            }
            count += 1;
            if let Some(limit) = self.options.max_partitions {
                if count > limit {
                    return Err(Error::BudgetExceeded { bus, limit });
                }
            }
            let key = evaluate_parts(&parts, variant.key())?;
            groups
                .entry(key)
                .or_default()
                .push(Partition::from_sorted(parts.clone()));
        }
        Ok((count, groups))
    }

    /// Analyzes buses 1, 2, ... and stops at the first bus with two or more
    /// ambiguous targets, or after `max_bus`.
    pub fn solve(&self, variant: &VariantSpec, max_bus: u32) -> Result<SolveOutcome> {
        solve_with(variant, max_bus, |bus| self.analyze_bus(bus, variant))
    }

    /// Analyzes every bus in `1..=max_bus` with no early stop.
    pub fn scan(&self, variant: &VariantSpec, max_bus: u32) -> Result<Vec<BusAnalysis>> {
        (1..=max_bus)
            .map(|bus| self.analyze_bus(bus, variant))
            .collect()
    }
}

/// Solve loop over an arbitrary per-bus analyzer (for example a cached one).
///
/// The certificate is only issued for variants where appending a child of
/// age 1 preserves admissibility; otherwise the loop runs to `max_bus`.
pub fn solve_with<F>(variant: &VariantSpec, max_bus: u32, mut analyze: F) -> Result<SolveOutcome>
where
    F: FnMut(u32) -> Result<BusAnalysis>,
{
    if max_bus == 0 {
        return Err(Error::InvalidConstraints(
            "max_bus must be at least 1".into(),
        ));
    }
    let certifiable = variant.supports_append_one();
    let mut analyses = Vec::new();
    for bus in 1..=max_bus {
        let analysis = analyze(bus).map_err(|e| e.at_bus(bus))?;
        let stop = certifiable && analysis.ambiguous_targets.len() >= 2;
        analyses.push(analysis);
        if stop {
            return Ok(SolveOutcome {
                variant: variant.clone(),
                analyses,
                termination: Termination::Certified { stop_bus: bus },
            });
        }
    }
    Ok(SolveOutcome {
        variant: variant.clone(),
        analyses,
        termination: Termination::BudgetExhausted { max_bus },
    })
}

pub fn analyze_bus(bus: u32, variant: &VariantSpec) -> Result<BusAnalysis> {
    Engine::default().analyze_bus(bus, variant)
}

pub fn solve(variant: &VariantSpec, max_bus: u32) -> Result<SolveOutcome> {
    Engine::default().solve(variant, max_bus)
}

/// One ambiguity class at `bus` and its image under appending a 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AppendOneWitness {
    pub from_target: u128,
    pub to_target: u128,
    pub key: KeyValue,
    pub image_key: KeyValue,
    pub images: Vec<Partition>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityReport {
    pub bus: u32,
    pub witnesses: Vec<AppendOneWitness>,
    /// Ambiguous targets at `bus` mapped to ambiguous targets at `bus + 1`.
    pub injection: BTreeMap<u128, u128>,
    /// Empty unless the append-one map failed somewhere.
    pub defects: Vec<String>,
}

impl MonotonicityReport {
    pub fn holds(&self) -> bool {
        self.defects.is_empty()
    }
}

/// Checks, class by class, that appending a 1 to every member of an
/// ambiguity class at `bus` lands inside one ambiguity class at `bus + 1`,
/// and that the induced map on targets is injective.
pub fn verify_append_one_monotonicity(
    bus: u32,
    variant: &VariantSpec,
) -> Result<MonotonicityReport> {
    verify_with(&Engine::default(), bus, variant)
}

pub fn verify_with(engine: &Engine, bus: u32, variant: &VariantSpec) -> Result<MonotonicityReport> {
    let here = engine.analyze_bus(bus, variant)?;
    let next = engine.analyze_bus(bus + 1, variant)?;
    let next_constraints = variant.constraints().for_bus(bus + 1);
    let target_stat = variant.target();

    let mut witnesses = Vec::new();
    let mut injection = BTreeMap::new();
    let mut defects = Vec::new();

    for class in &here.classes {
        let images: Vec<Partition> = class.partitions.iter().map(Partition::append_one).collect();
        let expected = KeyValue(
            variant
                .key()
                .iter()
                .zip(class.key.values())
                .map(|(d, &v)| d.shift_under_append_one(v))
                .collect(),
        );
        for image in &images {
            if !next_constraints.admits(image) {
                defects.push(format!(
                    "image {{{image}}} is not admissible at bus {}",
                    bus + 1
                ));
                continue;
            }
            let key = evaluate_parts(image.parts(), variant.key())?;
            if key != expected {
                defects.push(format!(
                    "image {{{image}}} has key {key}, expected {expected}"
                ));
            }
        }
        let landed = next
            .classes
            .binary_search_by(|c| c.key.cmp(&expected))
            .ok()
            .map(|i| &next.classes[i]);
        match landed {
            Some(target_class) if images.iter().all(|p| target_class.partitions.contains(p)) => {}
            _ => defects.push(format!(
                "images of class {} do not form an ambiguity class at bus {}",
                class.key,
                bus + 1
            )),
        }

        let to = target_stat.shift_under_append_one(class.target);
        if !next.ambiguous_targets.contains(&to) {
            defects.push(format!(
                "target {} maps to {to}, which is not ambiguous at bus {}",
                class.target,
                bus + 1
            ));
        }
        if let Some(prev) = injection.insert(class.target, to) {
            if prev != to {
                defects.push(format!(
                    "target {} maps to both {prev} and {to}",
                    class.target
                ));
            }
        }
        witnesses.push(AppendOneWitness {
            from_target: class.target,
            to_target: to,
            key: class.key.clone(),
            image_key: expected,
            images,
        });
    }

    let image_set: BTreeSet<u128> = injection.values().copied().collect();
    if image_set.len() != injection.len() {
        defects.push("target map is not injective".to_string());
    }

    Ok(MonotonicityReport {
        bus,
        witnesses,
        injection,
        defects,
    })
}
