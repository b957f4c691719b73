//! Stable JSON/CSV records and text explanations.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{is_valid_bus, AmbiguityClass, BusAnalysis, SolveOutcome, Termination};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::stats::{evaluate, KeyValue, StatDescriptor};
use crate::variant::VariantSpec;

/// Bump whenever a change to the engine could alter analysis results.
pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: &str = "bus,partition_total,ambiguous_target_count,valid";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub key: Vec<String>,
    pub target: String,
    pub partitions: Vec<Vec<u32>>,
}

/// Serialized form of one [`BusAnalysis`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub variant: VariantSpec,
    pub bus: u32,
    pub partition_total: u64,
    pub classes: Vec<ClassRecord>,
    pub ambiguous_target_count: usize,
}

impl From<&BusAnalysis> for ResultRecord {
    fn from(a: &BusAnalysis) -> Self {
        ResultRecord {
            schema_version: SCHEMA_VERSION,
            variant: a.variant.clone(),
            bus: a.bus,
            partition_total: a.partition_total,
            classes: a
                .classes
                .iter()
                .map(|c| ClassRecord {
                    key: c.key.to_strings(),
                    target: c.target.to_string(),
                    partitions: c.partitions.iter().map(|p| p.parts().to_vec()).collect(),
                })
                .collect(),
            ambiguous_target_count: a.ambiguous_targets.len(),
        }
    }
}

impl TryFrom<ResultRecord> for BusAnalysis {
    type Error = Error;

    /// Rebuilds an analysis, checking the record is internally consistent.
    fn try_from(r: ResultRecord) -> Result<BusAnalysis> {
        let bad = |msg: String| Error::MalformedRecord(format!("bus {}: {msg}", r.bus));
        if r.schema_version != SCHEMA_VERSION {
            return Err(bad(format!(
                "schema version {} != {SCHEMA_VERSION}",
                r.schema_version
            )));
        }
        let mut classes = Vec::with_capacity(r.classes.len());
        for c in &r.classes {
            let key = KeyValue::from_strings(&c.key)?;
            let target = KeyValue::from_strings(&[&c.target])?.get(0);
            if key.arity() != r.variant.key().len() {
                return Err(bad(format!("key {key} has the wrong arity")));
            }
            if key.get(r.variant.target_index()) != target {
                return Err(bad(format!("target {target} does not match key {key}")));
            }
            if c.partitions.len() < 2 {
                return Err(bad(format!("class {key} has fewer than two partitions")));
            }
            let mut partitions = Vec::with_capacity(c.partitions.len());
            for parts in &c.partitions {
                let p = Partition::new(parts.clone())?;
                if p.sum() != u64::from(r.bus) || evaluate(&p, r.variant.key())? != key {
                    return Err(bad(format!(
                        "partition {{{p}}} does not belong to class {key}"
                    )));
                }
                partitions.push(p);
            }
            classes.push(AmbiguityClass {
                key,
                target,
                partitions,
            });
        }
        let analysis = BusAnalysis::new(r.bus, r.variant.clone(), r.partition_total, classes);
        if analysis.ambiguous_targets.len() != r.ambiguous_target_count {
            return Err(bad("ambiguous_target_count disagrees with classes".into()));
        }
        Ok(analysis)
    }
}

/// JSON document for a whole solve or scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeDocument {
    pub schema_version: u32,
    pub variant: VariantSpec,
    pub valid_buses: Vec<u32>,
    pub termination: Option<Termination>,
    pub records: Vec<ResultRecord>,
}

impl OutcomeDocument {
    pub fn from_outcome(outcome: &SolveOutcome) -> Self {
        OutcomeDocument {
            schema_version: SCHEMA_VERSION,
            variant: outcome.variant.clone(),
            valid_buses: outcome.valid_buses(),
            termination: Some(outcome.termination),
            records: outcome.analyses.iter().map(ResultRecord::from).collect(),
        }
    }

    /// A scan has no termination certificate.
    pub fn from_scan(variant: &VariantSpec, analyses: &[BusAnalysis]) -> Self {
        OutcomeDocument {
            schema_version: SCHEMA_VERSION,
            variant: variant.clone(),
            valid_buses: analyses
                .iter()
                .filter(|a| is_valid_bus(a))
                .map(|a| a.bus)
                .collect(),
            termination: None,
            records: analyses.iter().map(ResultRecord::from).collect(),
        }
    }

    pub fn into_outcome(self) -> Result<SolveOutcome> {
        let termination = self
            .termination
            .ok_or_else(|| Error::MalformedRecord("document has no termination".into()))?;
        let analyses = self
            .records
            .into_iter()
            .map(BusAnalysis::try_from)
            .collect::<Result<Vec<_>>>()?;
        Ok(SolveOutcome {
            variant: self.variant,
            analyses,
            termination,
        })
    }
}

/// Text display options.
#[derive(Clone, Copy, Debug, Default)]
pub struct TextOptions {
    /// Show at most this many classes per bus. Counts are never truncated.
    pub max_classes_shown: Option<usize>,
}

pub fn render_report(outcome: &SolveOutcome, format: Format, text: TextOptions) -> Result<String> {
    match format {
        Format::Json => to_json(&OutcomeDocument::from_outcome(outcome)),
        Format::Csv => Ok(render_csv(&outcome.analyses)),
        Format::Text => Ok(render_outcome_text(outcome, text)),
    }
}

pub fn render_scan(
    variant: &VariantSpec,
    analyses: &[BusAnalysis],
    format: Format,
    text: TextOptions,
) -> Result<String> {
    match format {
        Format::Json => to_json(&OutcomeDocument::from_scan(variant, analyses)),
        Format::Csv => Ok(render_csv(analyses)),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "Variant {}: {}",
                variant.name(),
                describe_variant(variant)
            );
            for a in analyses {
                let _ = writeln!(
                    out,
                    "bus {:>3}: {} partitions, {} ambiguous {}{}",
                    a.bus,
                    a.partition_total,
                    a.ambiguous_targets.len(),
                    plural(&variant.target().noun()),
                    if is_valid_bus(a) { " (valid)" } else { "" }
                );
            }
            for a in analyses.iter().filter(|a| is_valid_bus(a)) {
                out.push('\n');
                render_valid_bus(&mut out, a, text);
            }
            Ok(out)
        }
    }
}

pub fn render_analysis(
    analysis: &BusAnalysis,
    format: Format,
    text: TextOptions,
) -> Result<String> {
    match format {
        Format::Json => to_json(&ResultRecord::from(analysis)),
        Format::Csv => Ok(render_csv(std::slice::from_ref(analysis))),
        Format::Text => Ok(render_explanation(analysis, text)),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn render_csv(analyses: &[BusAnalysis]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for a in analyses {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            a.bus,
            a.partition_total,
            a.ambiguous_targets.len(),
            is_valid_bus(a)
        );
    }
    out
}

fn plural(noun: &str) -> String {
    match noun {
        "number of children" => "numbers of children".into(),
        "number of dolls" => "numbers of dolls".into(),
        "bus number" => "bus numbers".into(),
        n if n.starts_with("sum of ") => format!("sums of {}", &n[7..]),
        n => format!("{n}s"),
    }
}

fn join_and(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

fn join_values(values: impl IntoIterator<Item = u128>) -> String {
    values
        .into_iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn describe_variant(v: &VariantSpec) -> String {
    let key: Vec<String> = v.key().iter().map(|d| d.noun()).collect();
    let mut s = format!(
        "B is told the {}; B claims to know the {}",
        join_and(&key),
        v.target().noun()
    );
    let bounds = v.constraints();
    match (bounds.min_count, bounds.max_count) {
        (Some(lo), Some(hi)) if lo == hi => {
            let _ = write!(s, "; exactly {lo} children");
        }
        (lo, hi) => {
            if let Some(lo) = lo {
                let _ = write!(s, "; at least {lo} children");
            }
            if let Some(hi) = hi {
                let _ = write!(s, "; at most {hi} children");
            }
        }
    }
    s
}

/// Statistics shown next to each partition: age and children always, plus
/// whatever else the key discloses.
fn shown_stats(v: &VariantSpec) -> Vec<StatDescriptor> {
    let mut stats = vec![StatDescriptor::Product, StatDescriptor::Count];
    for &d in v.key() {
        if !stats.contains(&d) {
            stats.push(d);
        }
    }
    stats
}

fn describe_partition(p: &Partition, stats: &[StatDescriptor]) -> String {
    let values: Vec<String> = stats
        .iter()
        .map(|d| match d.evaluate_parts(p.parts()) {
            Ok(v) => format!("{} {v}", d.noun()),
            Err(_) => format!("{} overflow", d.noun()),
        })
        .collect();
    format!("{{{p}}} ({})", values.join(", "))
}

fn render_classes(out: &mut String, a: &BusAnalysis, text: TextOptions) {
    let stats = shown_stats(&a.variant);
    let has_age = a.variant.key().contains(&StatDescriptor::Product);
    let shown = text.max_classes_shown.unwrap_or(usize::MAX);
    for class in a.classes.iter().take(shown) {
        let _ = writeln!(
            out,
            "  key {} -> {} {}:",
            class.key,
            a.variant.target().noun(),
            class.target
        );
        for p in &class.partitions {
            let _ = writeln!(out, "    {}", describe_partition(p, &stats));
        }
        if !has_age {
            let ages: std::collections::BTreeSet<u128> = class
                .partitions
                .iter()
                .filter_map(|p| StatDescriptor::Product.evaluate_parts(p.parts()).ok())
                .collect();
            let _ = writeln!(out, "    candidate ages: {}", join_values(ages));
        }
    }
    if a.classes.len() > shown {
        let _ = writeln!(
            out,
            "  ... {} more classes not shown",
            a.classes.len() - shown
        );
    }
}

fn render_valid_bus(out: &mut String, a: &BusAnalysis, text: TextOptions) {
    let target = a.variant.target();
    let others: Vec<String> = a
        .variant
        .key()
        .iter()
        .filter(|&&d| d != target)
        .map(|d| format!("the {}", d.noun()))
        .collect();
    let given = if others.is_empty() {
        "the bus number does not".to_string()
    } else {
        format!("the bus number and {} do not", join_and(&others))
    };
    let value = a.unique_target().expect("valid bus has one target");
    let _ = writeln!(
        out,
        "Bus {}: the only {} for which {given} determine the ages of the children is {value}.",
        a.bus,
        target.noun()
    );
    render_classes(out, a, text);
}

fn render_outcome_text(outcome: &SolveOutcome, text: TextOptions) -> String {
    let v = &outcome.variant;
    let target = v.target().noun();
    let mut out = String::new();
    let _ = writeln!(out, "Variant {}: {}", v.name(), describe_variant(v));
    let valid: Vec<&BusAnalysis> = outcome.valid().collect();
    if valid.is_empty() {
        let _ = writeln!(out, "No valid bus found.");
    } else {
        let buses: Vec<String> = valid.iter().map(|a| a.bus.to_string()).collect();
        let _ = writeln!(out, "Valid bus numbers: {}", buses.join(", "));
    }
    for a in &valid {
        out.push('\n');
        render_valid_bus(&mut out, a, text);
    }
    out.push('\n');
    match outcome.termination {
        Termination::Certified { stop_bus } => {
            let targets = outcome
                .analysis(stop_bus)
                .map(|a| join_values(a.ambiguous_targets.iter().copied()))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "Certified at bus {stop_bus}: ambiguous {} {targets}. Adding a child of age 1 carries \
                 every ambiguity to the next bus, so no bus from {stop_bus} on is valid.",
                plural(&target)
            );
        }
        Termination::BudgetExhausted { max_bus } => {
            let _ = writeln!(
                out,
                "Inconclusive: no bus up to {max_bus} has two or more ambiguous {}.",
                plural(&target)
            );
            for a in &outcome.analyses {
                let _ = writeln!(
                    out,
                    "  bus {:>3}: {} ambiguous",
                    a.bus,
                    a.ambiguous_targets.len()
                );
            }
        }
    }
    out
}

/// Narrative for one bus: what A's "No" means and whether B can conclude.
pub fn render_explanation(a: &BusAnalysis, text: TextOptions) -> String {
    let v = &a.variant;
    let target = v.target().noun();
    let key: Vec<String> = v.key().iter().map(|d| d.noun()).collect();
    let mut out = String::new();
    let _ = writeln!(out, "Variant {}: {}", v.name(), describe_variant(v));
    let _ = writeln!(
        out,
        "Bus {} admits {} partitions.",
        a.bus, a.partition_total
    );
    if a.classes.is_empty() {
        let _ = writeln!(
            out,
            "Every {} identifies the ages of the children, so wizard A could not have said \"No\". Bus {} is not valid.",
            join_and(&key),
            a.bus
        );
        return out;
    }
    let _ = writeln!(
        out,
        "Wizard A can say \"No\" in {} way{}: these keys are shared by more than one set of ages.",
        a.classes.len(),
        if a.classes.len() == 1 { "" } else { "s" }
    );
    render_classes(&mut out, a, text);
    match a.unique_target() {
        Some(t) => {
            let _ = writeln!(
                out,
                "Every ambiguity has {target} {t}, so wizard B can deduce it. Bus {} is valid.",
                a.bus
            );
        }
        None => {
            let _ = writeln!(
                out,
                "The ambiguities allow {} different {}: {}. Wizard B cannot deduce the {target}, so bus {} is not valid.",
                a.ambiguous_targets.len(),
                plural(&target),
                join_values(a.ambiguous_targets.iter().copied()),
                a.bus
            );
        }
    }
    out
}
