//! Acceptance suite. Each test writes one `PASS`/`FAIL` line to stderr
//! (bypassing output capture) and then asserts.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ztwist::code::*;
use ztwist::decoder::{extract_syndrome, identify_excitations, logical_failure, run_bench, Decoder, ExcitationSpecies};
use ztwist::lattice::{Orientation, RegionMask, RegionRole, TorusLattice};
use ztwist::logical::*;
use ztwist::pauli::{PauliOperator, QuditDim};
use ztwist::scattering::*;

const LIMIT_DIMENSIONS: Duration = Duration::from_secs(1);
const LIMIT_COMMUTATION: Duration = Duration::from_secs(10);
const LIMIT_CONDENSATION: Duration = Duration::from_secs(5);
const LIMIT_DISTANCE_L2: Duration = Duration::from_secs(60);
const LIMIT_DISTANCE_L3: Duration = Duration::from_secs(30 * 60);
const LIMIT_SINGLE_ERRORS: Duration = Duration::from_secs(60);
const LIMIT_SCALING: Duration = Duration::from_secs(10 * 60);
const LIMIT_CONFINEMENT: Duration = Duration::from_secs(10);
const LIMIT_CLASSIFICATION: Duration = Duration::from_secs(1);
const LIMIT_LIFETIME: Duration = Duration::from_secs(5 * 60);
const LIMIT_ORACLE: Duration = Duration::from_secs(60);

const SCALING_P: f64 = 0.01;
const SCALING_TRIALS: u64 = 10_000;
/// One-sided 95% critical value of the standard normal.
const SCALING_Z_CRIT: f64 = 1.6449;
const LIFETIME_RATES: [f64; 2] = [0.01, 0.02];
const LIFETIME_TRIALS: u64 = 10_000;
const LIFETIME_MAX_SE: f64 = 3.0;
const LIFETIME_FIT_ALPHA: f64 = 0.01;
const ORACLE_PAIRS: usize = 10_000;
const DISTANCE_BUDGET_NODES: u64 = 2_000_000_000;

fn report(id: u32, name: &str, ok: bool, detail: &str) {
    let line = format!("[acceptance] criterion {id:>2} {:<4} {name}: {detail}\n", if ok { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn sizes(max: usize) -> impl Iterator<Item = TorusLattice> {
    (2..=max).flat_map(move |r| (2..=max).map(move |c| TorusLattice::new(r, c).unwrap()))
}

fn full_ds(l: &TorusLattice) -> StabilizerCode {
    condense_ds(&build_z4_toric(l), &RegionMask::full(l, RegionRole::CondensedDs)).unwrap()
}

fn twisted(l: &TorusLattice, o: Orientation) -> StabilizerCode {
    insert_noncontractible_twist(&build_z2_toric(l), o, 0).unwrap()
}

#[test]
fn c01_logical_dimensions() {
    let mut bad = Vec::new();
    let mut slowest = Duration::ZERO;
    for l in sizes(4) {
        type Case<'a> = (&'a str, Box<dyn Fn() -> StabilizerCode + 'a>, u128);
        let cases: Vec<Case> = vec![
            ("z2", Box::new(|| build_z2_toric(&l)), 4),
            ("z4", Box::new(|| build_z4_toric(&l)), 16),
            ("ds", Box::new(|| full_ds(&l)), 4),
            ("twist-v", Box::new(|| twisted(&l, Orientation::Vertical)), 2),
            ("twist-h", Box::new(|| twisted(&l, Orientation::Horizontal)), 2),
        ];
        for (name, build, want) in cases {
            let t = Instant::now();
            let got = logical_dimension(&build());
            slowest = slowest.max(t.elapsed());
            if got != want {
                bad.push(format!("{name} {}x{} = {got}", l.rows(), l.cols()));
            }
        }
    }
    let ok = bad.is_empty() && slowest < LIMIT_DIMENSIONS;
    report(1, "logical dimensions", ok, &format!("mismatches {bad:?}, slowest {slowest:?}"));
    assert!(ok);
}

fn product_of(code: &StabilizerCode, kind: GeneratorKind, count: usize) -> Option<PauliOperator> {
    let ops: Vec<&PauliOperator> = code.of_kind(kind).map(|(_, g)| &g.op).collect();
    (ops.len() == count).then(|| {
        ops.iter().fold(PauliOperator::identity(code.dim(), code.n_sites()), |mut acc, g| {
            acc.mul_assign_unchecked(g);
            acc
        })
    })
}

#[test]
fn c02_commutation_and_redundancy() {
    let t = Instant::now();
    let mut bad = Vec::new();
    let mut products = 0;
    for l in sizes(6) {
        let hybrid_region = RegionMask::rect(&l, RegionRole::CondensedDs, 0, 0, l.rows() - 1, l.cols() - 1);
        let codes = [
            ("z2", build_z2_toric(&l)),
            ("z4", build_z4_toric(&l)),
            ("ds", full_ds(&l)),
            ("twist-v", twisted(&l, Orientation::Vertical)),
            ("twist-h", twisted(&l, Orientation::Horizontal)),
            ("hybrid", condense_ds(&build_z4_toric(&l), &hybrid_region).unwrap()),
        ];
        for (name, code) in codes {
            if code.matrix().find_noncommuting_pair().is_some() {
                bad.push(format!("{name} {}x{} noncommuting", l.rows(), l.cols()));
            }
            let kinds = [
                (GeneratorKind::AVertex, l.n_vertices()),
                (GeneratorKind::BPlaquette, l.n_plaquettes()),
                (GeneratorKind::DsVertex, l.n_vertices()),
                (GeneratorKind::DsPlaquette, l.n_plaquettes()),
            ];
            for (kind, count) in kinds {
                if let Some(p) = product_of(&code, kind, count) {
                    products += 1;
                    if !p.is_identity() {
                        bad.push(format!("{name} {}x{} product of {} = {p}", l.rows(), l.cols(), kind.as_str()));
                    }
                }
            }
        }
    }
    let el = t.elapsed();
    let ok = bad.is_empty() && products > 0 && el < LIMIT_COMMUTATION;
    report(2, "commutation and redundancy", ok, &format!("{products} global products checked, issues {bad:?}, {el:?}"));
    assert!(ok);
}

#[test]
fn c03_condensation_matches_explicit_construction() {
    let l = TorusLattice::new(3, 3).unwrap();
    let t = Instant::now();
    let condensed = full_ds(&l);
    let explicit = ztwist::group::StabilizerGroup::new(explicit_ds_generators(&l)).unwrap();
    let equal = condensed.group().howell_rows() == explicit.howell_rows();
    let el = t.elapsed();
    let ok = equal && el < LIMIT_CONDENSATION;
    report(3, "condensation equals explicit generators", ok, &format!("howell equal {equal}, {el:?}"));
    assert!(ok);
}

fn class_distance(code: &StabilizerCode, op: &PauliOperator) -> Distance {
    let basis = LogicalBasis::new(code);
    let class = basis.classify(op).unwrap();
    let budget = DistanceBudget { max_nodes: DISTANCE_BUDGET_NODES, ..DistanceBudget::default() };
    code_distance(code, Some(&class), budget).unwrap()
}

#[test]
fn c04_distances() {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in [2, 3] {
        let l = TorusLattice::new(n, n).unwrap();
        let t = Instant::now();
        let d = code_distance(&build_z2_toric(&l), None, DistanceBudget::default()).unwrap().weight;
        ok &= d == n;
        notes.push(format!("z2 L={n} d={d}"));
        for o in [Orientation::Vertical, Orientation::Horizontal] {
            let code = twisted(&l, o);
            let tl = twisted_logicals(&code).unwrap();
            let dz = class_distance(&code, &tl.z_t).weight;
            let dx = class_distance(&code, &tl.x_t).weight;
            let dy = class_distance(&code, &tl.y_t).weight;
            let tag = if o == Orientation::Vertical { "v" } else { "h" };
            let matches = dy == 2 * n && dx == 3 * n;
            notes.push(format!(
                "twist-{tag} L={n} d(Zt)={dz} d(Xt)={dx} d(Yt)={dy} [ratio claim Yt=2d,Xt=3d {}]",
                if matches { "holds" } else { "not reproduced; recorded as finding" }
            ));
        }
        let limit = if n == 2 { LIMIT_DISTANCE_L2 } else { LIMIT_DISTANCE_L3 };
        ok &= t.elapsed() < limit;
        notes.push(format!("L={n} {:?}", t.elapsed()));
    }
    report(4, "distances", ok, &notes.join("; "));
    assert!(ok);
}

#[test]
fn c05_single_error_sweep() {
    let l = TorusLattice::new(3, 3).unwrap();
    let code = full_ds(&l);
    let basis = LogicalBasis::new(&code);
    let decoder = Decoder::new(&code);
    let t = Instant::now();
    let mut bad = Vec::new();
    let mut count = 0;
    for e in 0..code.n_sites() {
        for a in 0..4 {
            for b in 0..4 {
                if a == 0 && b == 0 {
                    continue;
                }
                count += 1;
                let err = PauliOperator::single(QuditDim::Ququart, code.n_sites(), e, a, b);
                let syn = extract_syndrome(&code, &err);
                let ex = identify_excitations(&code, &syn).unwrap();
                let identified = !ex.is_empty() && ex.iter().all(|x| x.species != ExcitationSpecies::Opaque);
                let out = decoder.run(&syn).unwrap();
                let cls = logical_failure(&code, &basis, &err, &out.recovery).unwrap();
                if !identified || !cls.is_identity() || out.used_fallback {
                    bad.push(format!("edge {e} X^{a}Z^{b}"));
                }
            }
        }
    }
    let el = t.elapsed();
    let ok = bad.is_empty() && count == 18 * 15 && el < LIMIT_SINGLE_ERRORS;
    report(5, "single-error identification and correction", ok, &format!("{count} errors, failures {bad:?}, {el:?}"));
    assert!(ok);
}

#[test]
fn c06_decoder_scaling() {
    let t = Instant::now();
    let rates: Vec<(usize, u64)> = [2, 3, 4]
        .iter()
        .map(|&n| {
            let r = run_bench(&full_ds(&TorusLattice::new(n, n).unwrap()), SCALING_P, SCALING_TRIALS, 2024, false).unwrap();
            (n, r.failures)
        })
        .collect();
    let mut ok = true;
    let mut notes: Vec<String> = rates
        .iter()
        .map(|(n, f)| format!("L={n} rate={:.4}", *f as f64 / SCALING_TRIALS as f64))
        .collect();
    for w in rates.windows(2) {
        let z = increase_z(w[0].1, w[1].1, SCALING_TRIALS);
        ok &= z < SCALING_Z_CRIT;
        notes.push(format!("z(L={}->{})={z:.2}", w[0].0, w[1].0));
    }
    let el = t.elapsed();
    ok &= el < LIMIT_SCALING;
    notes.push(format!("{el:?}"));
    report(6, "decoder scaling", ok, &notes.join(", "));
    assert!(ok);
}

/// Pooled two-proportion statistic for an increase from `f1` to `f2` failures.
fn increase_z(f1: u64, f2: u64, n: u64) -> f64 {
    let (p1, p2) = (f1 as f64 / n as f64, f2 as f64 / n as f64);
    let pooled = (f1 + f2) as f64 / (2 * n) as f64;
    let se = (pooled * (1.0 - pooled) * 2.0 / n as f64).sqrt();
    if se == 0.0 {
        0.0
    } else {
        (p2 - p1) / se
    }
}

#[test]
fn c07_confinement() {
    let t = Instant::now();
    let l = TorusLattice::new(8, 8).unwrap();
    let code = build_hybrid(&l, &RegionMask::rect(&l, RegionRole::CondensedDs, 2, 2, 4, 4)).unwrap();
    let region = code.region(RegionRole::CondensedDs).unwrap().clone();
    let probe = find_probe(&code).unwrap();
    let line = probe.inward(&l, 4);
    let mut bad = Vec::new();
    let mut notes = Vec::new();
    for u in AnyonLabel::all() {
        let inc = penetration_increments(&code, &probe, u, 4);
        let bulk: Vec<i64> = (1..line.len())
            .filter(|&k| site_in_region(&l, &region, line[k - 1]) && site_in_region(&l, &region, line[k]))
            .map(|k| inc[k - 1])
            .collect();
        let confined = (u.a + u.b) % 2 == 1;
        let good = if confined {
            bulk.iter().all(|&s| s >= 1)
        } else if u == AnyonLabel::new(2, 2) {
            bulk.iter().all(|&s| s == 0)
        } else {
            true
        };
        if confined || u == AnyonLabel::new(2, 2) {
            notes.push(format!("{}:{bulk:?}", u.name()));
        }
        if bulk.is_empty() || !good {
            bad.push(u.name());
        }
    }
    let el = t.elapsed();
    let ok = bad.is_empty() && el < LIMIT_CONFINEMENT;
    report(7, "confinement slopes", ok, &format!("{} bad {bad:?}, {el:?}", notes.join(" ")));
    assert!(ok);
}

#[test]
fn c08_scattering_classification() {
    let t = Instant::now();
    let reflect = ["e", "e3", "m", "m3", "em2", "e3m2", "e2m", "e2m3"];
    let bad: Vec<String> = AnyonLabel::all()
        .filter(|u| (classify_scattering(*u) == Scattering::Reflect) != reflect.contains(&u.name().as_str()))
        .map(|u| u.name())
        .collect();
    let el = t.elapsed();
    let ok = bad.is_empty() && el < LIMIT_CLASSIFICATION;
    report(8, "scattering classification", ok, &format!("16 labels, mismatches {bad:?}, {el:?}"));
    assert!(ok);
}

#[test]
fn c09_lifetimes() {
    let t = Instant::now();
    let l = TorusLattice::new(8, 8).unwrap();
    let code = build_hybrid(&l, &RegionMask::rect(&l, RegionRole::CondensedDs, 2, 2, 4, 4)).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for p in LIFETIME_RATES {
        let cfg = LifetimeConfig { p, rounds: 10_000_000, trials: LIFETIME_TRIALS, seed: 99, zone_width: 1 };
        let st = lifetime_experiment(&code, AnyonLabel::new(1, 0), &cfg).unwrap();
        let z = st.z_score().unwrap_or(f64::INFINITY);
        let fit_p = st.fit.as_ref().map_or(0.0, |f| f.p_value);
        ok &= z <= LIFETIME_MAX_SE && fit_p >= LIFETIME_FIT_ALPHA;
        notes.push(format!(
            "p={p} q={:.6} mean={:.1} 1/q={:.1} z={z:.2} chi2 p={fit_p:.3}",
            st.q,
            st.mean.unwrap_or(f64::NAN),
            st.analytic_mean().unwrap_or(f64::NAN)
        ));
    }
    let el = t.elapsed();
    ok &= el < LIMIT_LIFETIME;
    notes.push(format!("{el:?}"));
    report(9, "lifetime statistics", ok, &notes.join(", "));
    assert!(ok);
}

#[test]
fn c10_matrix_oracle() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut bad = 0;
    for _ in 0..ORACLE_PAIRS {
        let n = rng.gen_range(1..=3);
        let draw = |rng: &mut ChaCha8Rng| {
            let x = (0..n).map(|_| rng.gen_range(0..4)).collect();
            let z = (0..n).map(|_| rng.gen_range(0..4)).collect();
            PauliOperator::from_parts(QuditDim::Ququart, x, z, rng.gen_range(0..4))
        };
        let (p, q) = (draw(&mut rng), draw(&mut rng));
        let sym = common::to_matrix(&p.multiply(&q).unwrap());
        let dense = common::matmul(&common::to_matrix(&p), &common::to_matrix(&q));
        if !common::approx_eq(&sym, &dense) {
            bad += 1;
        }
    }
    let el = t.elapsed();
    let ok = bad == 0 && el < LIMIT_ORACLE;
    report(10, "matrix oracle", ok, &format!("{ORACLE_PAIRS} pairs, {bad} mismatches, {el:?}"));
    assert!(ok);
}
