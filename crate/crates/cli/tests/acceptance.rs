//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Criteria that name a CLI command run the built `wizards` binary; the rest
//! call the library directly. Timing limits are checked on the measured wall
//! clock of each criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::panic;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;
use wizards_core::{
    analyze_bus, builtin_variant, count_partitions, enumerate_partitions,
    verify_append_one_monotonicity, BusAnalysis, PartitionConstraints,
};

type Check = fn() -> Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn wizards(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wizards"))
        .args(args)
        .output()
        .expect("failed to run wizards binary")
}

fn stdout_json(out: &Output) -> Result<Value, String> {
    serde_json::from_slice(&out.stdout).map_err(|e| format!("stdout is not JSON: {e}"))
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure!(took < limit, "took {took:?}, limit {limit:?}");
    Ok(())
}

fn record(doc: &Value, bus: u64) -> Result<&Value, String> {
    doc["records"]
        .as_array()
        .and_then(|r| r.iter().find(|r| r["bus"] == bus))
        .ok_or_else(|| format!("no record for bus {bus}"))
}

fn strings(v: &[&str]) -> Value {
    Value::from(v.iter().map(|s| s.to_string()).collect::<Vec<_>>())
}

fn parts(v: &[&[u32]]) -> Value {
    Value::from(
        v.iter()
            .map(|p| Value::from(p.to_vec()))
            .collect::<Vec<_>>(),
    )
}

fn analysis(bus: u32, variant: &str) -> BusAnalysis {
    analyze_bus(bus, &builtin_variant(variant).unwrap()).unwrap()
}

fn class_map(a: &BusAnalysis) -> BTreeMap<Vec<u128>, Vec<Vec<u32>>> {
    a.classes
        .iter()
        .map(|c| {
            (
                c.key.values().to_vec(),
                c.partitions.iter().map(|p| p.parts().to_vec()).collect(),
            )
        })
        .collect()
}

// Independent oracle: recursive partitions and pairwise key comparison.

fn oracle_partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, lo: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
        }
        for x in lo..=n {
            prefix.push(x);
            go(n - x, x, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, 1, &mut Vec::new(), &mut out);
    out
}

fn oracle_classes(bus: u32, key: fn(&[u32]) -> Vec<u128>) -> BTreeMap<Vec<u128>, Vec<Vec<u32>>> {
    let all = oracle_partitions(bus);
    let keys: Vec<Vec<u128>> = all.iter().map(|p| key(p)).collect();
    let mut classes: BTreeMap<Vec<u128>, BTreeSet<Vec<u32>>> = BTreeMap::new();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if keys[i] == keys[j] {
                let c = classes.entry(keys[i].clone()).or_default();
                c.insert(all[i].clone());
                c.insert(all[j].clone());
            }
        }
    }
    classes
        .into_iter()
        .map(|(k, v)| (k, v.into_iter().collect()))
        .collect()
}

fn product(p: &[u32]) -> u128 {
    p.iter().map(|&x| u128::from(x)).product()
}

fn original_key(p: &[u32]) -> Vec<u128> {
    vec![product(p), p.len() as u128]
}

fn generalized_key(p: &[u32]) -> Vec<u128> {
    let squares = p.iter().map(|&x| u128::from(x) * u128::from(x)).sum();
    vec![product(p), p.len() as u128, squares]
}

fn simplified_key(p: &[u32]) -> Vec<u128> {
    vec![p.len() as u128]
}

fn ac1_original_solve() -> Result<(), String> {
    let start = Instant::now();
    let out = wizards(&["solve", "--variant", "original", "--format", "json"]);
    within(start, Duration::from_secs(1))?;
    ensure!(out.status.code() == Some(0), "exit {:?}", out.status.code());
    let doc = stdout_json(&out)?;
    ensure!(
        doc["valid_buses"] == Value::from(vec![12]),
        "valid buses {}",
        doc["valid_buses"]
    );
    ensure!(
        doc["termination"] == serde_json::json!({"kind": "certified", "stop_bus": 13}),
        "termination {}",
        doc["termination"]
    );
    let r = record(&doc, 12)?;
    let classes = r["classes"].as_array().ok_or("classes missing")?;
    ensure!(classes.len() == 1, "{} classes at bus 12", classes.len());
    ensure!(
        classes[0]["target"] == "48",
        "target {}",
        classes[0]["target"]
    );
    ensure!(
        classes[0]["key"] == strings(&["48", "4"]),
        "key {}",
        classes[0]["key"]
    );
    ensure!(
        classes[0]["partitions"] == parts(&[&[1, 3, 4, 4], &[2, 2, 2, 6]]),
        "partitions {}",
        classes[0]["partitions"]
    );
    Ok(())
}

fn ac2_no_ambiguity_below_twelve() -> Result<(), String> {
    let start = Instant::now();
    for bus in 1..=11 {
        let a = analysis(bus, "original");
        ensure!(
            a.classes.is_empty(),
            "bus {bus} has {} classes",
            a.classes.len()
        );
    }
    within(start, Duration::from_secs(1))
}

fn ac3_bus_thirteen() -> Result<(), String> {
    let a = analysis(13, "original");
    ensure!(
        a.ambiguous_targets == BTreeSet::from([36, 48]),
        "targets {:?}",
        a.ambiguous_targets
    );
    let want = BTreeMap::from([
        (vec![36, 3], vec![vec![1, 6, 6], vec![2, 2, 9]]),
        (vec![48, 5], vec![vec![1, 1, 3, 4, 4], vec![1, 2, 2, 2, 6]]),
    ]);
    ensure!(class_map(&a) == want, "classes {:?}", class_map(&a));
    Ok(())
}

fn ac4_three_children() -> Result<(), String> {
    let a = analysis(13, "original_c3");
    ensure!(
        a.ambiguous_targets == BTreeSet::from([36]),
        "bus 13 targets {:?}",
        a.ambiguous_targets
    );
    let a = analysis(14, "original_c3");
    ensure!(
        a.ambiguous_targets == BTreeSet::from([40, 72]),
        "bus 14 targets {:?}",
        a.ambiguous_targets
    );
    let want = BTreeMap::from([
        (vec![40, 3], vec![vec![1, 5, 8], vec![2, 2, 10]]),
        (vec![72, 3], vec![vec![2, 6, 6], vec![3, 3, 8]]),
    ]);
    ensure!(class_map(&a) == want, "classes {:?}", class_map(&a));
    Ok(())
}

fn ac5_bus_twenty_one() -> Result<(), String> {
    let a = analysis(21, "original");
    let classes = class_map(&a);
    for (age, first, second) in [
        (96u128, vec![1, 8, 12], vec![2, 3, 16]),
        (240, vec![4, 5, 12], vec![3, 8, 10]),
    ] {
        ensure!(a.ambiguous_targets.contains(&age), "{age} not ambiguous");
        let members = classes
            .get(&vec![age, 3])
            .ok_or(format!("no class ({age}, 3)"))?;
        ensure!(
            members.contains(&first) && members.contains(&second),
            "class ({age}, 3) = {members:?}"
        );
    }
    Ok(())
}

fn ac6_generalized() -> Result<(), String> {
    let start = Instant::now();
    let out = wizards(&["solve", "--variant", "generalized", "--format", "json"]);
    ensure!(out.status.code() == Some(0), "exit {:?}", out.status.code());
    let doc = stdout_json(&out)?;
    ensure!(
        doc["valid_buses"] == Value::from(vec![26]),
        "valid buses {}",
        doc["valid_buses"]
    );
    ensure!(
        doc["termination"] == serde_json::json!({"kind": "certified", "stop_bus": 27}),
        "termination {}",
        doc["termination"]
    );
    let r26 = record(&doc, 26)?;
    let c = r26["classes"].as_array().ok_or("classes missing")?;
    ensure!(c.len() == 1, "{} classes at bus 26", c.len());
    ensure!(
        c[0]["key"] == strings(&["3456", "7", "124"]),
        "key {}",
        c[0]["key"]
    );
    ensure!(c[0]["target"] == "3456", "target {}", c[0]["target"]);
    ensure!(
        c[0]["partitions"] == parts(&[&[1, 3, 3, 3, 4, 4, 8], &[2, 2, 2, 2, 6, 6, 6]]),
        "partitions {}",
        c[0]["partitions"]
    );
    let r27 = record(&doc, 27)?;
    let c27 = r27["classes"].as_array().ok_or("classes missing")?;
    let targets: BTreeSet<&str> = c27.iter().filter_map(|c| c["target"].as_str()).collect();
    ensure!(
        targets.is_superset(&BTreeSet::from(["3456", "2560"])),
        "bus 27 targets {targets:?}"
    );
    let young = c27
        .iter()
        .find(|c| c["target"] == "2560")
        .ok_or("no 2560 class")?;
    ensure!(
        young["key"] == strings(&["2560", "6", "165"]),
        "key {}",
        young["key"]
    );
    ensure!(
        young["partitions"] == parts(&[&[1, 4, 4, 4, 4, 10], &[2, 2, 2, 5, 8, 8]]),
        "partitions {}",
        young["partitions"]
    );
    within(start, Duration::from_secs(30))
}

fn ac7_generalized_below_answer() -> Result<(), String> {
    for bus in 1..=24 {
        let a = analysis(bus, "generalized");
        ensure!(
            a.classes.is_empty(),
            "bus {bus} has {} classes",
            a.classes.len()
        );
    }
    // Frozen from the pairwise oracle: bus 25 has no ambiguity either.
    let oracle = oracle_classes(25, generalized_key);
    ensure!(
        oracle.is_empty(),
        "oracle found classes at bus 25: {oracle:?}"
    );
    let a = analysis(25, "generalized");
    ensure!(
        class_map(&a) == oracle,
        "engine classes at bus 25: {:?}",
        class_map(&a)
    );
    println!(
        "    bus 25 (generalized): {} partitions, {} ambiguity classes",
        a.partition_total,
        a.classes.len()
    );
    Ok(())
}

fn ac8_simplified() -> Result<(), String> {
    let mut oracle_valid = Vec::new();
    let mut oracle_stop = None;
    for bus in 1..=60 {
        let targets: BTreeSet<u128> = oracle_classes(bus, simplified_key)
            .keys()
            .map(|k| k[0])
            .collect();
        match targets.len() {
            1 => oracle_valid.push(bus as u64),
            n if n >= 2 => {
                oracle_stop = Some(bus as u64);
                break;
            }
            _ => {}
        }
    }
    let stop = oracle_stop.ok_or("oracle found no stopping bus")?;

    let out = wizards(&["solve", "--variant", "simplified", "--format", "json"]);
    ensure!(out.status.code() == Some(0), "exit {:?}", out.status.code());
    let doc = stdout_json(&out)?;
    ensure!(
        doc["valid_buses"] == Value::from(oracle_valid.clone()),
        "valid {} vs oracle {oracle_valid:?}",
        doc["valid_buses"]
    );
    ensure!(
        doc["termination"]["stop_bus"] == stop,
        "stop {} vs oracle {stop}",
        doc["termination"]
    );
    for &bus in &oracle_valid {
        let oracle = oracle_classes(bus as u32, simplified_key);
        let r = record(&doc, bus)?;
        let got: Vec<(Value, Value)> = r["classes"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| (c["key"].clone(), c["partitions"].clone()))
            .collect();
        let want: Vec<(Value, Value)> = oracle
            .iter()
            .map(|(k, v)| {
                (
                    Value::from(k.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
                    Value::from(v.iter().map(|p| Value::from(p.clone())).collect::<Vec<_>>()),
                )
            })
            .collect();
        ensure!(got == want, "bus {bus}: {got:?} vs oracle {want:?}");
    }

    let text = wizards(&["solve", "--variant", "simplified"]);
    let text = String::from_utf8_lossy(&text.stdout);
    for &bus in &oracle_valid {
        let ages: BTreeSet<u128> = oracle_classes(bus as u32, simplified_key)
            .values()
            .flatten()
            .map(|p| product(p))
            .collect();
        let line = format!(
            "candidate ages: {}",
            ages.iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        );
        ensure!(text.contains(&line), "text report lacks `{line}`:\n{text}");
    }
    println!("    simplified: valid buses {oracle_valid:?}, certified at {stop}");
    Ok(())
}

fn ac9_monotonicity() -> Result<(), String> {
    let start = Instant::now();
    for name in ["original", "simplified", "generalized"] {
        let v = builtin_variant(name).unwrap();
        let counts: Vec<usize> = (1..=31)
            .map(|b| analyze_bus(b, &v).unwrap().ambiguous_targets.len())
            .collect();
        for b in 1..=30usize {
            ensure!(
                counts[b - 1] <= counts[b],
                "{name}: |targets({b})| > |targets({})|",
                b + 1
            );
            let r = verify_append_one_monotonicity(b as u32, &v).map_err(|e| e.to_string())?;
            ensure!(r.holds(), "{name} bus {b}: {:?}", r.defects);
            ensure!(
                r.injection.len() == counts[b - 1],
                "{name} bus {b}: injection covers {} of {}",
                r.injection.len(),
                counts[b - 1]
            );
        }
    }
    within(start, Duration::from_secs(10))
}

fn ac10_enumeration_counts() -> Result<(), String> {
    for n in 1..=40 {
        let yielded = enumerate_partitions(&PartitionConstraints::new(n))
            .unwrap()
            .count() as u128;
        let euler = count_partitions(n).unwrap();
        ensure!(
            yielded == euler,
            "n={n}: enumerated {yielded}, Euler {euler}"
        );
    }
    for (n, p) in [(5, 7), (12, 77), (20, 627)] {
        ensure!(count_partitions(n).unwrap() == p, "p({n}) != {p}");
    }
    Ok(())
}

fn ac11_engine_vs_oracle() -> Result<(), String> {
    for bus in 1..=15 {
        for (name, key) in [
            ("original", original_key as fn(&[u32]) -> Vec<u128>),
            ("generalized", generalized_key),
        ] {
            let engine = class_map(&analysis(bus, name));
            let oracle = oracle_classes(bus, key);
            ensure!(
                engine == oracle,
                "{name} bus {bus}: {engine:?} vs {oracle:?}"
            );
        }
    }
    Ok(())
}

fn ac12_determinism() -> Result<(), String> {
    let one = wizards(&[
        "solve",
        "--variant",
        "generalized",
        "--format",
        "json",
        "--jobs",
        "1",
    ]);
    let many = wizards(&[
        "solve",
        "--variant",
        "generalized",
        "--format",
        "json",
        "--jobs",
        "8",
    ]);
    ensure!(
        one.status.success() && many.status.success(),
        "a run failed"
    );
    ensure!(!one.stdout.is_empty(), "empty output");
    ensure!(
        one.stdout == many.stdout,
        "JSON differs between --jobs 1 and --jobs 8"
    );
    Ok(())
}

fn ac13_cubes_scan() -> Result<(), String> {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cache = dir.path().join("cubes.jsonl");
    let cache = cache.to_str().unwrap();

    let cold = wizards(&[
        "scan",
        "--variant",
        "cubes",
        "--max-bus",
        "40",
        "--format",
        "csv",
    ]);
    ensure!(
        cold.status.code() == Some(0),
        "cold scan exit {:?}",
        cold.status.code()
    );
    let csv = String::from_utf8_lossy(&cold.stdout).to_string();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    ensure!(
        csv.starts_with("bus,partition_total,ambiguous_target_count,valid\n"),
        "bad header"
    );
    ensure!(rows.len() == 40, "{} rows", rows.len());

    // Interrupted scan: only the first 20 buses reach the cache.
    let partial = wizards(&[
        "scan",
        "--variant",
        "cubes",
        "--max-bus",
        "20",
        "--format",
        "csv",
        "--cache",
        cache,
    ]);
    ensure!(partial.status.success(), "partial scan failed");
    let resumed = wizards(&[
        "scan",
        "--variant",
        "cubes",
        "--max-bus",
        "40",
        "--format",
        "csv",
        "--cache",
        cache,
    ]);
    ensure!(resumed.status.success(), "resumed scan failed");
    ensure!(
        resumed.stdout == cold.stdout,
        "resumed output differs from cold output"
    );
    let warm = wizards(&[
        "scan",
        "--variant",
        "cubes",
        "--max-bus",
        "40",
        "--format",
        "csv",
        "--cache",
        cache,
    ]);
    ensure!(
        warm.stdout == cold.stdout,
        "fully cached output differs from cold output"
    );

    let json_cold = wizards(&[
        "scan",
        "--variant",
        "cubes",
        "--max-bus",
        "40",
        "--format",
        "json",
    ]);
    let json_warm = wizards(&[
        "scan",
        "--variant",
        "cubes",
        "--max-bus",
        "40",
        "--format",
        "json",
        "--cache",
        cache,
    ]);
    ensure!(
        json_cold.stdout == json_warm.stdout,
        "JSON differs after resume"
    );

    let counts: Vec<&str> = rows
        .iter()
        .map(|r| r.split(',').nth(2).unwrap_or("?"))
        .collect();
    println!(
        "    cubes ambiguous-age counts, buses 1..=40: {}",
        counts.join(" ")
    );
    within(start, Duration::from_secs(600))
}

fn main() {
    let criteria: [(&str, &str, Check); 13] = [
        (
            "AC1",
            "original puzzle: bus 12, age 48, certified at 13",
            ac1_original_solve,
        ),
        (
            "AC2",
            "original buses 1-11 have no ambiguity",
            ac2_no_ambiguity_below_twelve,
        ),
        ("AC3", "original bus 13: ages {36, 48}", ac3_bus_thirteen),
        (
            "AC4",
            "three-children mode: bus 13 {36}, bus 14 {40, 72}",
            ac4_three_children,
        ),
        (
            "AC5",
            "original bus 21 contains ages 96 and 240",
            ac5_bus_twenty_one,
        ),
        (
            "AC6",
            "generalized puzzle: bus 26, age 3456; bus 27 double",
            ac6_generalized,
        ),
        (
            "AC7",
            "generalized buses 1-24 unambiguous; bus 25 per oracle",
            ac7_generalized_below_answer,
        ),
        (
            "AC8",
            "simplified puzzle matches brute-force oracle",
            ac8_simplified,
        ),
        (
            "AC9",
            "append-one monotonicity for b in 1..=30",
            ac9_monotonicity,
        ),
        (
            "AC10",
            "partition counts match Euler recurrence, n <= 40",
            ac10_enumeration_counts,
        ),
        (
            "AC11",
            "engine classes equal pairwise oracle, b <= 15",
            ac11_engine_vs_oracle,
        ),
        (
            "AC12",
            "solve generalized is byte-identical across --jobs",
            ac12_determinism,
        ),
        (
            "AC13",
            "cubes scan to 40 completes and resumes identically",
            ac13_cubes_scan,
        ),
    ];

    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(check).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let took = start.elapsed();
        match result {
            Ok(()) => println!("PASS {id:<5} {name} ({took:.2?})"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {id:<5} {name} ({took:.2?}): {msg}");
            }
        }
    }
    println!("{} of {} acceptance criteria passed", 13 - failed, 13);
    if failed > 0 {
        std::process::exit(1);
    }
}
