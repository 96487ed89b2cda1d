//! Reflection of confined quasiparticles off a double-semion region and the
//! lifetime of their conjugacy class under boundary noise.
//!
//! A bounce is one attempted hop from the parking site into the condensate
//! followed by a retreat when the hop raises the energy. After each bounce a
//! single random error hits the boundary zone with probability `p`; the
//! particle is poisoned when its label moves out of its class.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::code::{build_z4_toric, condense_ds, CodeError, GeneratorKind, StabilizerCode};
use crate::decoder::trial_rng;
use crate::lattice::{RegionMask, RegionRole, TorusLattice};
use crate::logical::{anyon_string, conjugacy_class, site_vertex, AnyonLabel, ConjugacyClass};
use crate::pauli::{PauliOperator, QuditDim};

#[derive(Debug, Error)]
pub enum ScatterError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("condensed region wraps a handle of the torus")]
    RegionWrapsHandle,
    #[error("code has no condensed region")]
    NoRegion,
    #[error("no site with plain vertex and plaquette terms borders the condensate")]
    NoParkingSite,
    #[error("label {0} is deconfined; it does not reflect")]
    Deconfined(AnyonLabel),
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
}

/// Z_4 toric code with `region` condensed. The region must leave a toric
/// bulk around it; the full lattice is accepted and gives the plain
/// double-semion code.
pub fn build_hybrid(lattice: &TorusLattice, region: &RegionMask) -> Result<StabilizerCode, ScatterError> {
    if !region.is_full() && region.spans_handle(lattice) {
        return Err(ScatterError::RegionWrapsHandle);
    }
    Ok(condense_ds(&build_z4_toric(lattice), region)?)
}

/// Inverted geometry: everything except `island` is condensed.
pub fn build_island(lattice: &TorusLattice, island: &RegionMask) -> Result<StabilizerCode, ScatterError> {
    if island.spans_handle(lattice) {
        return Err(ScatterError::RegionWrapsHandle);
    }
    let cells: Vec<usize> = (0..lattice.n_cells()).filter(|&c| !island.contains_cell(c)).collect();
    let region = RegionMask::from_cells(lattice, RegionRole::CondensedDs, &cells);
    Ok(condense_ds(&build_z4_toric(lattice), &region)?)
}

/// Energy after each hop of `label` along adjacent `sites`; entry 0 is the
/// baseline energy of `frame`.
pub fn transport(code: &StabilizerCode, frame: &PauliOperator, label: AnyonLabel, sites: &[usize]) -> Vec<usize> {
    let l = code.lattice();
    let mut op = frame.clone();
    let mut out = vec![code.energy(&op)];
    for w in sites.windows(2) {
        op.mul_assign_unchecked(&anyon_string(l, code.dim(), label, w));
        out.push(code.energy(&op));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scattering {
    Reflect,
    Transmit,
}

pub fn classify_scattering(label: AnyonLabel) -> Scattering {
    if conjugacy_class(label).is_deconfined() {
        Scattering::Transmit
    } else {
        Scattering::Reflect
    }
}

/// A parking site next to the condensate and the straight line into it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Probe {
    pub park: usize,
    /// Row and column step pointing into the condensate.
    pub direction: (isize, isize),
}

impl Probe {
    /// `park` followed by `depth` sites along the direction.
    pub fn inward(&self, l: &TorusLattice, depth: usize) -> Vec<usize> {
        self.line(l, depth as isize, 1)
    }

    /// `park` followed by `len` sites away from the condensate.
    pub fn outward(&self, l: &TorusLattice, len: usize) -> Vec<usize> {
        self.line(l, len as isize, -1)
    }

    fn line(&self, l: &TorusLattice, len: isize, sign: isize) -> Vec<usize> {
        let (r, c) = l.coords(self.park);
        let (dr, dc) = self.direction;
        (0..=len)
            .map(|k| l.site(r as isize + sign * k * dr, c as isize + sign * k * dc))
            .collect()
    }
}

/// Whether both the plaquette and the charge vertex of `site` are condensed.
pub fn site_in_region(l: &TorusLattice, region: &RegionMask, site: usize) -> bool {
    region.contains_cell(site) && region.contains_vertex(site_vertex(l, site))
}

fn has_plain_terms(code: &StabilizerCode, site: usize) -> bool {
    let l = code.lattice();
    code.index_of(GeneratorKind::AVertex, site_vertex(l, site)).is_some()
        && code.index_of(GeneratorKind::BPlaquette, site).is_some()
}

/// Parking site whose straight line into the condensate stays inside it the
/// longest over the next four sites, preferring lines flanked by condensed
/// sites on both sides. The park has plain terms and its first neighbour
/// along the line lacks them. Remaining ties go to the lowest site, then to
/// the direction order east, south, west, north.
pub fn find_probe(code: &StabilizerCode) -> Result<Probe, ScatterError> {
    let l = code.lattice();
    let region = code.region(RegionRole::CondensedDs).ok_or(ScatterError::NoRegion)?;
    let mut best: Option<((usize, usize), Probe)> = None;
    for s in 0..l.n_cells() {
        if !has_plain_terms(code, s) {
            continue;
        }
        let (r, c) = l.coords(s);
        let at = |k: isize, d: (isize, isize)| l.site(r as isize + k * d.0, c as isize + k * d.1);
        for d in [(0, 1), (1, 0), (0, -1), (-1, 0)] {
            if has_plain_terms(code, at(1, d)) {
                continue;
            }
            let inside = |k: isize, off: isize| {
                let (rr, cc) = l.coords(at(k, d));
                let t = l.site(rr as isize + off * d.1, cc as isize + off * d.0);
                site_in_region(l, region, t) as usize
            };
            let depth = (1..=4).map(|k| inside(k, 0)).sum::<usize>();
            let flank = (1..=4).map(|k| inside(k, 1) + inside(k, -1)).sum::<usize>();
            let score = (depth, flank);
            if depth > 0 && best.as_ref().is_none_or(|b| score > b.0) {
                best = Some((score, Probe { park: s, direction: d }));
            }
        }
    }
    best.map(|b| b.1).ok_or(ScatterError::NoParkingSite)
}

/// Energy increments for `depth` hops into the condensate starting from a
/// freshly created pair at the probe.
pub fn penetration_increments(code: &StabilizerCode, probe: &Probe, label: AnyonLabel, depth: usize) -> Vec<i64> {
    let l = code.lattice();
    let back = probe.outward(l, 2);
    let mut creation: Vec<usize> = back.into_iter().rev().collect();
    creation.dedup();
    let frame = anyon_string(l, code.dim(), label, &creation);
    let profile = transport(code, &frame, label, &probe.inward(l, depth));
    profile.windows(2).map(|w| w[1] as i64 - w[0] as i64).collect()
}

/// Energy paid to reach the first fully condensed site on the probe line.
pub fn bounce_energy(code: &StabilizerCode, probe: &Probe, label: AnyonLabel) -> i64 {
    let l = code.lattice();
    let region = code.region(RegionRole::CondensedDs).expect("probe implies a region");
    let line = probe.inward(l, 4);
    let k0 = line.iter().position(|&s| site_in_region(l, region, s)).unwrap_or(1);
    penetration_increments(code, probe, label, k0).iter().sum()
}

/// Boundary-zone errors that move `site`'s label out of its class, counted
/// over every zone edge and every nontrivial single-qudit operator.
pub fn class_change_count(code: &StabilizerCode, site: usize, zone: &[usize]) -> (u64, u64) {
    let shifts = ShiftTable::new(code, site);
    let n = code.dim().modulus();
    let mut changing = 0;
    let mut total = 0;
    for &e in zone {
        for a in 0..n {
            for b in 0..n {
                if a == 0 && b == 0 {
                    continue;
                }
                total += 1;
                let d = shifts.shift(e, a, b);
                if conjugacy_class(d) != conjugacy_class(AnyonLabel::VACUUM) {
                    changing += 1;
                }
            }
        }
    }
    (changing, total)
}

/// Label change at one site caused by a single-qudit operator.
struct ShiftTable {
    a_op: PauliOperator,
    b_op: PauliOperator,
    step: u8,
    dim: QuditDim,
    n_sites: usize,
}

impl ShiftTable {
    fn new(code: &StabilizerCode, site: usize) -> Self {
        let l = code.lattice();
        let ai = code.index_of(GeneratorKind::AVertex, site_vertex(l, site)).expect("plain vertex term");
        let bi = code.index_of(GeneratorKind::BPlaquette, site).expect("plain plaquette term");
        ShiftTable {
            a_op: code.generators()[ai].op.clone(),
            b_op: code.generators()[bi].op.clone(),
            step: code.dim().phase_step(),
            dim: code.dim(),
            n_sites: code.n_sites(),
        }
    }

    fn shift(&self, edge: usize, a: u8, b: u8) -> AnyonLabel {
        let op = PauliOperator::single(self.dim, self.n_sites, edge, a, b);
        AnyonLabel::new(
            self.a_op.commutation_exponent_unchecked(&op) / self.step,
            self.b_op.commutation_exponent_unchecked(&op) / self.step,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifetimeConfig {
    pub p: f64,
    pub rounds: u64,
    pub trials: u64,
    pub seed: u64,
    pub zone_width: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareFit {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LifetimeStats {
    pub initial: AnyonLabel,
    pub park: usize,
    pub zone_size: usize,
    /// Fraction of zone errors that change the class.
    pub f: f64,
    /// Per-round class-change probability `p * f`.
    pub q: f64,
    /// Energy cost of one attempted penetration.
    pub bounce_energy: i64,
    pub reflections: u64,
    /// `None` for trials that survived every round.
    pub lifetimes: Vec<Option<u64>>,
    pub censored: u64,
    pub mean: Option<f64>,
    pub variance: Option<f64>,
    pub std_error: Option<f64>,
    pub histogram: BTreeMap<u64, u64>,
    pub fit: Option<ChiSquareFit>,
}

impl LifetimeStats {
    pub fn analytic_mean(&self) -> Option<f64> {
        (self.q > 0.0).then(|| 1.0 / self.q)
    }

    /// Distance of the empirical mean from `1/q` in standard errors.
    pub fn z_score(&self) -> Option<f64> {
        let (m, se, a) = (self.mean?, self.std_error?, self.analytic_mean()?);
        Some((m - a).abs() / se)
    }
}

/// One round of a single trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub round: u64,
    pub site: usize,
    pub label: AnyonLabel,
    pub class: ConjugacyClass,
    pub energy: usize,
    pub poisoned: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterTrace {
    pub initial: AnyonLabel,
    pub p: f64,
    pub seed: u64,
    pub entries: Vec<TraceEntry>,
}

struct Setup {
    probe: Probe,
    zone: Vec<usize>,
    shifts: ShiftTable,
    frame: PauliOperator,
    bounce_energy: i64,
}

fn setup(code: &StabilizerCode, initial: AnyonLabel, p: f64, zone_width: usize) -> Result<Setup, ScatterError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ScatterError::BadProbability(p));
    }
    if conjugacy_class(initial).is_deconfined() {
        return Err(ScatterError::Deconfined(initial));
    }
    let l = code.lattice();
    let region = code.region(RegionRole::CondensedDs).ok_or(ScatterError::NoRegion)?;
    let probe = find_probe(code)?;
    let zone = region.boundary_zone(l, zone_width);
    let mut creation: Vec<usize> = probe.outward(l, 2).into_iter().rev().collect();
    creation.dedup();
    let frame = anyon_string(l, code.dim(), initial, &creation);
    let bounce_energy = bounce_energy(code, &probe, initial);
    let shifts = ShiftTable::new(code, probe.park);
    Ok(Setup { probe, zone, shifts, frame, bounce_energy })
}

/// Draws one zone error: uniform edge, uniform nontrivial operator.
fn draw_error<R: Rng>(rng: &mut R, zone: &[usize], n: u8) -> (usize, u8, u8) {
    let e = zone[rng.gen_range(0..zone.len())];
    let k = rng.gen_range(1..u32::from(n) * u32::from(n)) as u8;
    (e, k / n, k % n)
}

/// Lifetime of the initial conjugacy class over independent trials.
pub fn lifetime_experiment(
    code: &StabilizerCode,
    initial: AnyonLabel,
    cfg: &LifetimeConfig,
) -> Result<LifetimeStats, ScatterError> {
    let s = setup(code, initial, cfg.p, cfg.zone_width)?;
    let n = code.dim().modulus();
    let (changing, total) = class_change_count(code, s.probe.park, &s.zone);
    let f = changing as f64 / total as f64;
    let q = cfg.p * f;
    let start_class = conjugacy_class(initial);
    let results: Vec<(Option<u64>, u64)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t);
            let mut label = initial;
            let mut reflections = 0;
            for round in 1..=cfg.rounds {
                if s.bounce_energy > 0 {
                    reflections += 1;
                }
                if cfg.p > 0.0 && rng.gen::<f64>() < cfg.p {
                    let (e, a, b) = draw_error(&mut rng, &s.zone, n);
                    label = label.fuse(s.shifts.shift(e, a, b));
                    if conjugacy_class(label) != start_class {
                        return (Some(round), reflections);
                    }
                }
            }
            (None, reflections)
        })
        .collect();
    let reflections = results.iter().map(|r| r.1).sum();
    let lifetimes: Vec<Option<u64>> = results.into_iter().map(|r| r.0).collect();
    Ok(summarize(initial, s.probe.park, s.zone.len(), f, q, s.bounce_energy, reflections, lifetimes, cfg.rounds))
}

#[allow(clippy::too_many_arguments)]
fn summarize(
    initial: AnyonLabel,
    park: usize,
    zone_size: usize,
    f: f64,
    q: f64,
    bounce_energy: i64,
    reflections: u64,
    lifetimes: Vec<Option<u64>>,
    rounds: u64,
) -> LifetimeStats {
    let mut histogram = BTreeMap::new();
    for t in lifetimes.iter().flatten() {
        *histogram.entry(*t).or_insert(0) += 1;
    }
    let censored = lifetimes.iter().filter(|t| t.is_none()).count() as u64;
    let observed: Vec<f64> = lifetimes.iter().flatten().map(|&t| t as f64).collect();
    let (mean, variance, std_error) = if censored == 0 && observed.len() >= 2 {
        let k = observed.len() as f64;
        let m = observed.iter().sum::<f64>() / k;
        let v = observed.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (k - 1.0);
        (Some(m), Some(v), Some((v / k).sqrt()))
    } else {
        (None, None, None)
    };
    let fit = geometric_fit(&histogram, lifetimes.len() as u64, censored, q, rounds);
    LifetimeStats {
        initial,
        park,
        zone_size,
        f,
        q,
        bounce_energy,
        reflections,
        lifetimes,
        censored,
        mean,
        variance,
        std_error,
        histogram,
        fit,
    }
}

/// Pearson goodness of fit against `Geometric(q)` on support `1, 2, ...`.
///
/// Bins run while the expected count stays at least 5; everything beyond,
/// including censored trials, goes in one tail bin.
pub fn geometric_fit(
    histogram: &BTreeMap<u64, u64>,
    n: u64,
    censored: u64,
    q: f64,
    rounds: u64,
) -> Option<ChiSquareFit> {
    if q <= 0.0 || q >= 1.0 || n == 0 {
        return None;
    }
    let nf = n as f64;
    let mut stat = 0.0;
    let mut bins = 0;
    let mut k = 1u64;
    let mut survive = 1.0;
    while k < rounds {
        let expected = nf * survive * q;
        let tail_after = nf * survive * (1.0 - q);
        if expected < 5.0 || tail_after < 5.0 {
            break;
        }
        let obs = *histogram.get(&k).unwrap_or(&0) as f64;
        stat += (obs - expected).powi(2) / expected;
        bins += 1;
        survive *= 1.0 - q;
        k += 1;
    }
    let tail_expected = nf * survive;
    let tail_obs = histogram.range(k..).map(|(_, v)| *v).sum::<u64>() + censored;
    stat += (tail_obs as f64 - tail_expected).powi(2) / tail_expected;
    bins += 1;
    if bins < 2 {
        return None;
    }
    let dof = bins - 1;
    let dist = ChiSquared::new(dof as f64).ok()?;
    Some(ChiSquareFit { statistic: stat, dof, p_value: 1.0 - dist.cdf(stat) })
}

/// Round-by-round record of one trial, with exact energies.
pub fn scatter_trace(
    code: &StabilizerCode,
    initial: AnyonLabel,
    p: f64,
    rounds: u64,
    seed: u64,
    zone_width: usize,
) -> Result<ScatterTrace, ScatterError> {
    let s = setup(code, initial, p, zone_width)?;
    let n = code.dim().modulus();
    let mut rng = trial_rng(seed, 0);
    let mut frame = s.frame.clone();
    let mut label = initial;
    let start_class = conjugacy_class(initial);
    let mut entries = Vec::new();
    for round in 1..=rounds {
        let mut poisoned = false;
        if p > 0.0 && rng.gen::<f64>() < p {
            let (e, a, b) = draw_error(&mut rng, &s.zone, n);
            frame.mul_assign_unchecked(&PauliOperator::single(code.dim(), code.n_sites(), e, a, b));
            label = label.fuse(s.shifts.shift(e, a, b));
            poisoned = conjugacy_class(label) != start_class;
        }
        entries.push(TraceEntry {
            round,
            site: s.probe.park,
            label,
            class: conjugacy_class(label),
            energy: code.energy(&frame),
            poisoned,
        });
        if poisoned {
            break;
        }
    }
    Ok(ScatterTrace { initial, p, seed, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::extract_syndrome;
    use crate::logical::label_from_syndrome;

    fn hybrid() -> StabilizerCode {
        let l = TorusLattice::new(6, 6).unwrap();
        build_hybrid(&l, &RegionMask::rect(&l, RegionRole::CondensedDs, 2, 2, 2, 2)).unwrap()
    }

    #[test]
    fn hybrid_guards() {
        let l = TorusLattice::new(6, 6).unwrap();
        let wrap = RegionMask::rect(&l, RegionRole::CondensedDs, 0, 0, 6, 1);
        assert!(matches!(build_hybrid(&l, &wrap), Err(ScatterError::RegionWrapsHandle)));
        let empty = build_hybrid(&l, &RegionMask::empty(&l, RegionRole::CondensedDs)).unwrap();
        assert_eq!(empty.to_text(), build_z4_toric(&l).to_text());
        let h = hybrid();
        assert!(h.matrix().find_noncommuting_pair().is_none());
        let island = build_island(&l, &RegionMask::rect(&l, RegionRole::BulkTc, 2, 2, 3, 3)).unwrap();
        assert!(island.group().is_phase_consistent());
        assert!(find_probe(&island).is_ok());
    }

    #[test]
    fn classification_follows_parity() {
        for u in AnyonLabel::all() {
            let reflect = (u.a + u.b) % 2 == 1;
            assert_eq!(classify_scattering(u) == Scattering::Reflect, reflect);
        }
    }

    #[test]
    fn transport_is_reversible() {
        let h = hybrid();
        let l = h.lattice();
        let probe = find_probe(&h).unwrap();
        let id = PauliOperator::identity(QuditDim::Ququart, h.n_sites());
        for u in AnyonLabel::all() {
            let mut there = probe.inward(l, 2);
            let back: Vec<usize> = there.iter().rev().skip(1).copied().collect();
            there.extend(back);
            let prof = transport(&h, &id, u, &there);
            assert_eq!(prof.first(), prof.last());
            assert_eq!(transport(&h, &id, u, &[probe.park]), vec![0]);
        }
    }

    #[test]
    fn condensed_boson_leaks_out_as_charge_and_flux() {
        let h = hybrid();
        let l = h.lattice();
        let probe = find_probe(&h).unwrap();
        let mut sites = probe.inward(l, 1);
        sites.reverse();
        sites.extend(probe.outward(l, 1).into_iter().skip(1));
        let op = anyon_string(l, QuditDim::Ququart, AnyonLabel::new(2, 2), &sites);
        let syn = extract_syndrome(&h, &op);
        let end = *sites.last().unwrap();
        assert_eq!(label_from_syndrome(&h, &syn, end).unwrap(), AnyonLabel::new(2, 2));
    }

    #[test]
    fn zero_rate_is_censored() {
        let h = hybrid();
        let cfg = LifetimeConfig { p: 0.0, rounds: 50, trials: 20, seed: 1, zone_width: 1 };
        let st = lifetime_experiment(&h, AnyonLabel::new(1, 0), &cfg).unwrap();
        assert_eq!(st.censored, 20);
        assert!(st.mean.is_none());
        assert_eq!(st.reflections, 50 * 20);
        assert!(lifetime_experiment(&h, AnyonLabel::new(1, 1), &cfg).is_err());
    }

    #[test]
    fn trace_flags_only_poisoning_rounds() {
        let h = hybrid();
        let tr = scatter_trace(&h, AnyonLabel::new(1, 0), 0.5, 400, 3, 1).unwrap();
        let start = conjugacy_class(AnyonLabel::new(1, 0));
        for e in &tr.entries {
            assert_eq!(e.class != start, e.poisoned);
        }
    }
}
