use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::Context;
use serde_json::{json, Value};
use ztwist::code::{build_z2_toric, build_z4_toric, condense_ds, explicit_ds_generators, GeneratorKind, StabilizerCode};
use ztwist::decoder::{extract_syndrome, logical_failure, run_bench, BenchResult, Decoder};
use ztwist::group::StabilizerGroup;
use ztwist::lattice::{RegionMask, RegionRole, TorusLattice};
use ztwist::logical::{
    code_distance, conjugacy_class, logical_dimension, twisted_logicals, AnyonLabel, Distance, DistanceBudget,
    DistanceMethod, LogicalBasis, LogicalError,
};
use ztwist::pauli::{PauliOperator, QuditDim};
use ztwist::scattering::{
    classify_scattering, find_probe, lifetime_experiment, scatter_trace, transport, LifetimeConfig, Scattering,
};

use crate::config::{invalid, Command, ExperimentConfig};

pub const ARTIFACT_SCHEMA: u32 = 1;

/// Enumeration budget exhausted; maps to exit status 3.
#[derive(Debug, thiserror::Error)]
#[error("enumeration budget exhausted after {0} nodes")]
pub struct OverflowError(pub u64);

/// A selftest check failed.
#[derive(Debug, thiserror::Error)]
#[error("selftest failed: {0}")]
pub struct SelftestFailed(pub String);

pub fn run(cfg: &ExperimentConfig) -> anyhow::Result<()> {
    match cfg.command {
        Command::Info => info(cfg),
        Command::Distance => distance(cfg),
        Command::DecodeBench => decode_bench(cfg),
        Command::Scatter => scatter(cfg),
        Command::Selftest => selftest(cfg),
    }
}

fn envelope(cfg: &ExperimentConfig, result: Value) -> Value {
    json!({
        "tool": "ztwist",
        "version": env!("CARGO_PKG_VERSION"),
        "schema": ARTIFACT_SCHEMA,
        "config_hash": cfg.hash(),
        "seed": cfg.seed,
        "config": cfg,
        "result": result,
    })
}

fn provenance_line(cfg: &ExperimentConfig) -> String {
    format!(
        "# tool=ztwist version={} config_sha256={} seed={}\n",
        env!("CARGO_PKG_VERSION"),
        cfg.hash(),
        cfg.seed
    )
}

fn emit(cfg: &ExperimentConfig, result: Value) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(&envelope(cfg, result))? + "\n";
    print!("{text}");
    if let Some(out) = &cfg.out {
        write(out, &text)?;
    }
    Ok(())
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn info(cfg: &ExperimentConfig) -> anyhow::Result<()> {
    let code = cfg.build()?;
    let mut kinds: BTreeMap<&str, usize> = BTreeMap::new();
    for g in code.generators() {
        *kinds.entry(g.kind.as_str()).or_default() += 1;
    }
    let regions: Vec<Value> = code
        .regions()
        .iter()
        .map(|r| json!({ "role": r.role.as_str(), "cells": r.cells() }))
        .collect();
    emit(
        cfg,
        json!({
            "qudits": code.n_sites(),
            "modulus": code.dim().modulus(),
            "generators": code.generators().len(),
            "generators_by_kind": kinds,
            "logical_dimension": logical_dimension(&code),
            "logical_dimension_log2": code.logical_dimension_log2(),
            "regions": regions,
        }),
    )
}

fn method_name(m: DistanceMethod) -> &'static str {
    match m {
        DistanceMethod::Coset => "coset",
        DistanceMethod::WeightOrdered => "weight-ordered",
    }
}

fn distance_json(name: &str, d: &Distance) -> Value {
    json!({
        "class": name,
        "weight": d.weight,
        "method": method_name(d.method),
        "nodes": d.nodes,
        "witness": d.witness.to_string(),
    })
}

fn measured(r: Result<Distance, LogicalError>) -> anyhow::Result<Distance> {
    match r {
        Err(LogicalError::BudgetExceeded { nodes }) => Err(OverflowError(nodes).into()),
        Err(LogicalError::NoLogicals) => Err(invalid("code has no logical operators")),
        other => Ok(other?),
    }
}

fn distance(cfg: &ExperimentConfig) -> anyhow::Result<()> {
    let code = cfg.build()?;
    let budget = DistanceBudget { max_nodes: cfg.budget, ..DistanceBudget::default() };
    let basis = LogicalBasis::new(&code);
    let overall = measured(code_distance(&code, None, budget))?;
    let mut classes = Vec::new();
    let mut named: Vec<(String, PauliOperator)> = Vec::new();
    if cfg.twist.as_deref().is_some_and(|t| !t.starts_with("strip")) {
        let tl = twisted_logicals(&code)?;
        named.push(("Z_t".into(), tl.z_t));
        named.push(("X_t".into(), tl.x_t));
        named.push(("Y_t".into(), tl.y_t));
    } else {
        for (i, op) in basis.logicals().iter().enumerate() {
            named.push((format!("logical-{i}"), op.clone()));
        }
    }
    for (name, op) in &named {
        let class = basis.classify(op)?;
        classes.push(distance_json(name, &measured(code_distance(&code, Some(&class), budget))?));
    }
    let mut result = json!({ "distance": distance_json("any", &overall), "classes": classes });
    if cfg.twist.is_some() {
        let base = build_z2_toric(code.lattice());
        let d = measured(code_distance(&base, None, budget))?;
        result["untwisted_distance"] = json!(d.weight);
    }
    emit(cfg, result)
}

fn decode_bench(cfg: &ExperimentConfig) -> anyhow::Result<()> {
    let sizes: Vec<(usize, usize)> = if cfg.sweep.is_empty() {
        vec![(cfg.rows, cfg.cols)]
    } else {
        cfg.sweep.iter().map(|&n| (n, n)).collect()
    };
    let mut rows = Vec::new();
    for (r, c) in sizes {
        let code = cfg.build_at(r, c)?;
        if code.dim() != QuditDim::Ququart || code.region(RegionRole::CondensedDs).is_none() {
            return Err(invalid("decode-bench needs a condensed model (ds, hybrid or island)"));
        }
        rows.push(run_bench(&code, cfg.p, cfg.trials, cfg.seed, cfg.timed)?);
    }
    let mut csv = provenance_line(cfg);
    csv.push_str(BenchResult::csv_header());
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    if let Some(out) = &cfg.out {
        write(out, &csv)?;
    }
    let summary: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "rows": r.rows,
                "cols": r.cols,
                "trials": r.trials,
                "failures": r.failures,
                "failure_rate": r.failure_rate(),
                "fallback_trials": r.fallback_trials,
                "failures_by_class": r.by_class,
                "wall_time_s": r.wall_time_s,
            })
        })
        .collect();
    let text = serde_json::to_string_pretty(&envelope(cfg, json!({ "bench_schema": 1, "runs": summary })))?;
    println!("{text}");
    Ok(())
}

fn scatter(cfg: &ExperimentConfig) -> anyhow::Result<()> {
    let code = cfg.build()?;
    let label = cfg.label();
    let lc = LifetimeConfig {
        p: cfg.p,
        rounds: cfg.rounds,
        trials: cfg.trials,
        seed: cfg.seed,
        zone_width: cfg.zone_width,
    };
    let st = lifetime_experiment(&code, label, &lc).map_err(|e| invalid(e.to_string()))?;
    let elapsed: u64 = st.lifetimes.iter().map(|t| t.unwrap_or(cfg.rounds)).sum();
    let result = json!({
        "label": label.name(),
        "class": conjugacy_class(label).name(),
        "scattering": match classify_scattering(label) {
            Scattering::Reflect => "reflect",
            Scattering::Transmit => "transmit",
        },
        "park_site": st.park,
        "zone_edges": st.zone_size,
        "bounce_energy": st.bounce_energy,
        "class_change_fraction": st.f,
        "q": st.q,
        "analytic_mean": st.analytic_mean(),
        "mean": st.mean,
        "variance": st.variance,
        "std_error": st.std_error,
        "z_score": st.z_score(),
        "censored": st.censored,
        "reflections": st.reflections,
        "reflection_frequency": if elapsed > 0 { st.reflections as f64 / elapsed as f64 } else { 0.0 },
        "fit": st.fit.as_ref().map(|f| json!({ "statistic": f.statistic, "dof": f.dof, "p_value": f.p_value })),
        "histogram": st.histogram,
    });
    let text = serde_json::to_string_pretty(&envelope(cfg, result))? + "\n";
    print!("{text}");
    if let Some(out) = &cfg.out {
        let mut csv = provenance_line(cfg);
        csv.push_str("trial,lifetime\n");
        for (t, l) in st.lifetimes.iter().enumerate() {
            let _ = writeln!(csv, "{t},{}", l.map_or(String::new(), |v| v.to_string()));
        }
        write(out, &csv)?;
        write(&out.with_extension("json"), &text)?;
        let trace = scatter_trace(&code, label, cfg.p, cfg.rounds, cfg.seed, cfg.zone_width)
            .map_err(|e| invalid(e.to_string()))?;
        let mut tcsv = provenance_line(cfg);
        tcsv.push_str("round,site,label,class,energy,poisoned\n");
        for e in &trace.entries {
            let _ = writeln!(tcsv, "{},{},{},{},{},{}", e.round, e.site, e.label.name(), e.class.name(), e.energy, e.poisoned);
        }
        write(&out.with_extension("trace.csv"), &tcsv)?;
    }
    Ok(())
}

fn check(results: &mut Vec<Value>, name: &str, ok: bool) {
    results.push(json!({ "check": name, "pass": ok }));
}

fn selftest(cfg: &ExperimentConfig) -> anyhow::Result<()> {
    let mut results = Vec::new();
    let mut dims_ok = true;
    let mut commute_ok = true;
    for n in 2..=4 {
        let l = TorusLattice::new(n, n)?;
        let ds = condense_ds(&build_z4_toric(&l), &RegionMask::full(&l, RegionRole::CondensedDs))?;
        for (code, want) in [(build_z2_toric(&l), 4), (build_z4_toric(&l), 16), (ds, 4)] {
            dims_ok &= logical_dimension(&code) == want;
            commute_ok &= code.matrix().find_noncommuting_pair().is_none();
        }
    }
    check(&mut results, "logical-dimensions", dims_ok);
    check(&mut results, "generators-commute", commute_ok);

    let l = TorusLattice::new(3, 3)?;
    let ds = condense_ds(&build_z4_toric(&l), &RegionMask::full(&l, RegionRole::CondensedDs))?;
    let explicit = StabilizerGroup::new(explicit_ds_generators(&l))?;
    check(&mut results, "condensation-explicit", ds.group().howell_rows() == explicit.howell_rows());
    check(&mut results, "single-error-decoding", single_error_sweep(&ds)?);

    let parity = AnyonLabel::all().all(|u| (classify_scattering(u) == Scattering::Reflect) == ((u.a + u.b) % 2 == 1));
    check(&mut results, "scattering-parity", parity);

    let hl = TorusLattice::new(8, 8)?;
    let hybrid = condense_ds(&build_z4_toric(&hl), &RegionMask::rect(&hl, RegionRole::CondensedDs, 2, 2, 4, 4))?;
    let probe = find_probe(&hybrid).map_err(|e| anyhow::anyhow!(e.to_string()))?;
    let mut path = probe.inward(&hl, 3);
    path.extend(path.clone().into_iter().rev().skip(1));
    let id = PauliOperator::identity(QuditDim::Ququart, hybrid.n_sites());
    let reversible = AnyonLabel::all().all(|u| {
        let prof = transport(&hybrid, &id, u, &path);
        prof.first() == prof.last()
    });
    check(&mut results, "transport-reversible", reversible);
    let ds_terms = hybrid.of_kind(GeneratorKind::DsVertex).count() > 0;
    check(&mut results, "hybrid-has-condensate", ds_terms);

    let failed: Vec<String> = results
        .iter()
        .filter(|r| r["pass"] == json!(false))
        .map(|r| r["check"].as_str().unwrap_or_default().to_string())
        .collect();
    emit(cfg, json!({ "checks": results, "pass": failed.is_empty() }))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(SelftestFailed(failed.join(", ")).into())
    }
}

fn single_error_sweep(code: &StabilizerCode) -> anyhow::Result<bool> {
    let basis = LogicalBasis::new(code);
    let decoder = Decoder::new(code);
    for e in 0..code.n_sites() {
        for k in 1..16u8 {
            let err = PauliOperator::single(code.dim(), code.n_sites(), e, k / 4, k % 4);
            let out = decoder.run(&extract_syndrome(code, &err))?;
            if !logical_failure(code, &basis, &err, &out.recovery)?.is_identity() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
