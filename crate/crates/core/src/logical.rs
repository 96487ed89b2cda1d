//! Logical operators, code distance, anyon labels and their classes.
//!
//! Anyon sites: site `(r, c)` is the plaquette `p(r, c)` (flux) together with
//! the vertex `(r + 1, c + 1)` at its south-east corner (charge). A label
//! `(a, b)` is read as `a = k(A at that vertex) / step` and
//! `b = k(B at p(r, c)) / step`, where `k_g = kappa(g, error)` and
//! `step = 4 / N`. Under this table a single `Z` on the edge `h(r, c)` of the
//! `Z_4` code leaves charge `+1` at vertex `(r, c)` (the edge is its daggered
//! east leg) and `-1` at vertex `(r, c + 1)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::code::{GeneratorKind, StabilizerCode};
use crate::decoder::SyndromeRecord;
use crate::group::{full_centralizer, gcd_with_modulus, EchelonBasis, Membership, ModRow, ZnRow};
use crate::lattice::{LoopKind, Orientation, RegionRole, TorusLattice};
use crate::pauli::{PauliOperator, QuditDim};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicalError {
    #[error("operation needs an untwisted toric code")]
    NotUntwisted,
    #[error("operation needs a code with a non-contractible twist")]
    NotTwisted,
    #[error("operator does not commute with the stabilizers")]
    NotLogical,
    #[error("operator shape does not match the code")]
    ShapeMismatch,
    #[error("code has no logical operators")]
    NoLogicals,
    #[error("enumeration budget exhausted after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },
    #[error("site {site}: {reason}")]
    Unresolvable { site: usize, reason: &'static str },
}

/// `N^n / |S|`.
pub fn logical_dimension(code: &StabilizerCode) -> u128 {
    1u128 << code.logical_dimension_log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Species {
    XType,
    ZType,
}

/// String operator for the logical pair living on one edge family.
///
/// `family = Horizontal` gives `Z` along a row of horizontal edges (a cycle)
/// or `X` along a column of horizontal edges (a co-cycle); `Vertical` gives
/// `Z` along a column of vertical edges or `X` along a row of vertical edges.
/// A uniform power commutes with both toric codes because every vertex or
/// plaquette meets the loop on one daggered and one plain leg.
pub fn handle_logical(
    code: &StabilizerCode,
    family: Orientation,
    species: Species,
    power: u8,
) -> Result<PauliOperator, LogicalError> {
    if !code.is_untwisted_toric() {
        return Err(LogicalError::NotUntwisted);
    }
    Ok(handle_string(code.lattice(), code.dim(), family, species, power, 0))
}

fn handle_string(
    l: &TorusLattice,
    dim: QuditDim,
    family: Orientation,
    species: Species,
    power: u8,
    offset: usize,
) -> PauliOperator {
    let (orientation, kind) = match (family, species) {
        (Orientation::Horizontal, Species::ZType) => (Orientation::Horizontal, LoopKind::Cycle),
        (Orientation::Horizontal, Species::XType) => (Orientation::Vertical, LoopKind::Cocycle),
        (Orientation::Vertical, Species::ZType) => (Orientation::Vertical, LoopKind::Cycle),
        (Orientation::Vertical, Species::XType) => (Orientation::Horizontal, LoopKind::Cocycle),
    };
    let edges = l.handle_cycle(orientation, kind, offset).expect("offset in range");
    let power = power % dim.modulus();
    match species {
        Species::XType => PauliOperator::x_on(dim, l.n_edges(), &edges, power),
        Species::ZType => PauliOperator::z_on(dim, l.n_edges(), &edges, power),
    }
}

/// Commutation signatures against a fixed generating set of the centralizer.
///
/// For `c` in the centralizer, the signature vanishes iff `c` is a stabilizer
/// up to phase, and two logicals share a class iff their signatures agree.
#[derive(Debug, Clone)]
pub struct LogicalBasis {
    dim: QuditDim,
    n_sites: usize,
    stabilizers: Vec<PauliOperator>,
    logicals: Vec<PauliOperator>,
}

impl LogicalBasis {
    pub fn new(code: &StabilizerCode) -> Self {
        let group = code.group();
        let logicals = full_centralizer(&code.matrix())
            .rows
            .into_iter()
            .filter(|p| group.is_member(p) == Membership::NonMember)
            .collect();
        LogicalBasis {
            dim: code.dim(),
            n_sites: code.n_sites(),
            stabilizers: code.ops().cloned().collect(),
            logicals,
        }
    }

    pub fn logicals(&self) -> &[PauliOperator] {
        &self.logicals
    }

    pub fn commutes_with_stabilizers(&self, p: &PauliOperator) -> bool {
        self.stabilizers.iter().all(|g| g.commutes_with(p))
    }

    pub fn signature(&self, p: &PauliOperator) -> Vec<u8> {
        self.logicals.iter().map(|l| l.commutation_exponent_unchecked(p)).collect()
    }

    pub fn classify(&self, p: &PauliOperator) -> Result<LogicalClass, LogicalError> {
        if p.dim() != self.dim || p.n_sites() != self.n_sites {
            return Err(LogicalError::ShapeMismatch);
        }
        if !self.commutes_with_stabilizers(p) {
            return Err(LogicalError::NotLogical);
        }
        Ok(LogicalClass { representative: p.clone(), signature: self.signature(p) })
    }
}

/// Coset of the stabilizer group inside its centralizer.
#[derive(Debug, Clone)]
pub struct LogicalClass {
    pub representative: PauliOperator,
    signature: Vec<u8>,
}

impl LogicalClass {
    pub fn signature(&self) -> &[u8] {
        &self.signature
    }

    pub fn is_identity(&self) -> bool {
        self.signature.iter().all(|&k| k == 0)
    }

    pub fn same_class(&self, other: &LogicalClass) -> bool {
        self.signature == other.signature
    }
}

impl PartialEq for LogicalClass {
    fn eq(&self, other: &Self) -> bool {
        self.same_class(other)
    }
}

impl Eq for LogicalClass {}

/// Logical operators of a code with one non-contractible twist.
#[derive(Debug, Clone)]
pub struct TwistedLogicals {
    pub z_t: PauliOperator,
    pub x_t: PauliOperator,
    pub y_t: PauliOperator,
}

/// Twisted representatives built from the untwisted handle strings.
///
/// For a vertical strip at column `j` (pairing `Z_v X_h`), `Z_t` is `X` on the
/// horizontal edges of column `j`, `X_t` is `Z_h X_v` along a row, and
/// `Y_t = X_t Z_t`. A horizontal strip swaps the roles of the two edge
/// families.
pub fn twisted_logicals(code: &StabilizerCode) -> Result<TwistedLogicals, LogicalError> {
    let l = code.lattice();
    let strip = code.region(RegionRole::TwistStrip).ok_or(LogicalError::NotTwisted)?;
    if code.dim() != QuditDim::Qubit || !strip.spans_handle(l) {
        return Err(LogicalError::NotTwisted);
    }
    let cells = strip.cells();
    let (r0, c0) = l.coords(cells[0]);
    let vertical = cells.iter().all(|&c| l.coords(c).1 == c0) && cells.len() == l.rows();
    let dim = code.dim();
    let (z_t, x_t) = if vertical {
        let xh = handle_string(l, dim, Orientation::Horizontal, Species::XType, 1, c0);
        let zh = handle_string(l, dim, Orientation::Horizontal, Species::ZType, 1, 0);
        let xv = handle_string(l, dim, Orientation::Vertical, Species::XType, 1, 0);
        (xh, zh.multiply(&xv).expect("same shape"))
    } else {
        let xv = handle_string(l, dim, Orientation::Vertical, Species::XType, 1, r0);
        let zv = handle_string(l, dim, Orientation::Vertical, Species::ZType, 1, 0);
        let xh = handle_string(l, dim, Orientation::Horizontal, Species::XType, 1, 0);
        (xv, zv.multiply(&xh).expect("same shape"))
    };
    let y_t = x_t.multiply(&z_t).expect("same shape");
    Ok(TwistedLogicals { z_t, x_t, y_t })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceBudget {
    /// Node limit for the weight-ordered search.
    pub max_nodes: u64,
    /// Largest coset (log2 of its size) enumerated directly.
    pub max_coset_log2: u32,
}

impl Default for DistanceBudget {
    fn default() -> Self {
        DistanceBudget { max_nodes: 2_000_000_000, max_coset_log2: 24 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMethod {
    Coset,
    WeightOrdered,
}

#[derive(Debug, Clone)]
pub struct Distance {
    pub weight: usize,
    pub witness: PauliOperator,
    pub method: DistanceMethod,
    pub nodes: u64,
}

/// Minimum weight of a nontrivial logical (or of one class, when filtered).
///
/// Small groups are scanned coset by coset; larger ones fall back to the
/// weight-ordered search.
pub fn code_distance(
    code: &StabilizerCode,
    class_filter: Option<&LogicalClass>,
    budget: DistanceBudget,
) -> Result<Distance, LogicalError> {
    let basis = LogicalBasis::new(code);
    if basis.logicals.is_empty() {
        return Err(LogicalError::NoLogicals);
    }
    let per_site = code.dim().modulus().trailing_zeros();
    let group_log2 = code.group().order().log2;
    let scan_log2 = match class_filter {
        Some(_) => group_log2,
        None => per_site * code.n_sites() as u32 * 2 - group_log2,
    };
    if scan_log2 <= budget.max_coset_log2 {
        Ok(distance_by_coset(code, &basis, class_filter))
    } else {
        distance_by_weight(code, &basis, class_filter, budget.max_nodes)
    }
}

/// Exhaustive scan of the class coset (or the whole centralizer).
pub fn distance_by_coset(
    code: &StabilizerCode,
    basis: &LogicalBasis,
    class_filter: Option<&LogicalClass>,
) -> Distance {
    let n = code.dim().modulus();
    let ncols = 2 * code.n_sites();
    let (start, rows): (Vec<u8>, Vec<ZnRow>) = match class_filter {
        Some(cls) => (
            cls.representative.symplectic(),
            code.group()
                .howell_rows()
                .into_iter()
                .map(|(_, r, _)| ZnRow::new(n, r.symplectic()))
                .collect(),
        ),
        None => {
            let mut rows: Vec<ZnRow> = code.ops().map(|g| ZnRow::new(n, g.symplectic())).collect();
            rows.extend(basis.logicals.iter().map(|g| ZnRow::new(n, g.symplectic())));
            let b = EchelonBasis::from_rows(n, ncols, rows);
            (vec![0; ncols], b.howell_rows().into_iter().map(|(_, r, _)| r).collect())
        }
    };
    let radix: Vec<u8> = rows
        .iter()
        .map(|r| {
            let lead = r.leading_col(0).expect("nonzero row");
            n / gcd_with_modulus(r.entry(lead), n)
        })
        .collect();
    let sig_rows: Vec<Vec<u8>> = rows
        .iter()
        .map(|r| basis.signature(&PauliOperator::from_symplectic(code.dim(), &r.data, 0)))
        .collect();
    let mut best: Option<(usize, Vec<u8>)> = None;
    let mut nodes = 0u64;
    let mut vec = start;
    let mut sig = vec![0u8; basis.logicals.len()];
    if class_filter.is_none() {
        coset_walk(&rows, &radix, &sig_rows, 0, &mut vec, &mut sig, n, true, &mut best, &mut nodes);
    } else {
        coset_walk(&rows, &radix, &sig_rows, 0, &mut vec, &mut sig, n, false, &mut best, &mut nodes);
    }
    let (weight, v) = best.expect("nonempty coset");
    Distance {
        weight,
        witness: PauliOperator::from_symplectic(code.dim(), &v, 0),
        method: DistanceMethod::Coset,
        nodes,
    }
}

#[allow(clippy::too_many_arguments)]
fn coset_walk(
    rows: &[ZnRow],
    radix: &[u8],
    sig_rows: &[Vec<u8>],
    depth: usize,
    vec: &mut Vec<u8>,
    sig: &mut Vec<u8>,
    n: u8,
    skip_trivial: bool,
    best: &mut Option<(usize, Vec<u8>)>,
    nodes: &mut u64,
) {
    if depth == rows.len() {
        *nodes += 1;
        if skip_trivial && sig.iter().all(|&k| k == 0) {
            return;
        }
        let w = vec.chunks(2).filter(|s| s[0] != 0 || s[1] != 0).count();
        if best.as_ref().is_none_or(|(bw, _)| w < *bw) {
            *best = Some((w, vec.clone()));
        }
        return;
    }
    for k in 0..radix[depth] {
        if k > 0 {
            for (x, &r) in vec.iter_mut().zip(&rows[depth].data) {
                *x = (*x + r) % n;
            }
            for (s, &r) in sig.iter_mut().zip(&sig_rows[depth]) {
                *s = (*s + r) % 4;
            }
        }
        coset_walk(rows, radix, sig_rows, depth + 1, vec, sig, n, skip_trivial, best, nodes);
    }
    // Undo the `radix - 1` additions by adding once more (radix * row = 0).
    if radix[depth] > 1 {
        for (x, &r) in vec.iter_mut().zip(&rows[depth].data) {
            *x = (*x + r) % n;
        }
        for (s, &r) in sig.iter_mut().zip(&sig_rows[depth]) {
            *s = (*s + r) % 4;
        }
    }
}

/// `(a, b, sparse deltas)` for one single-qudit operator.
type SiteOp = (u8, u8, Vec<(usize, u8)>);

/// Per-site effect of a single-qudit operator on the tracked exponents.
struct SiteTable {
    ops: Vec<Vec<SiteOp>>,
    n_stab: usize,
    n_track: usize,
    max_degree: usize,
}

impl SiteTable {
    fn new(code: &StabilizerCode, basis: &LogicalBasis) -> Self {
        let n = code.dim().modulus();
        let step = code.dim().phase_step();
        let tracked: Vec<&PauliOperator> = code.ops().chain(basis.logicals.iter()).collect();
        let mut touching: Vec<Vec<usize>> = vec![Vec::new(); code.n_sites()];
        for (gi, g) in tracked.iter().enumerate() {
            for j in g.support() {
                touching[j].push(gi);
            }
        }
        let n_stab = code.generators().len();
        let mut max_degree = 0;
        let ops = (0..code.n_sites())
            .map(|j| {
                max_degree = max_degree.max(touching[j].iter().filter(|&&g| g < n_stab).count());
                let mut list = Vec::new();
                for a in 0..n {
                    for b in 0..n {
                        if a == 0 && b == 0 {
                            continue;
                        }
                        let deltas = touching[j]
                            .iter()
                            .filter_map(|&gi| {
                                let g = tracked[gi];
                                let (x, z) = (g.x_exps()[j], g.z_exps()[j]);
                                let k = ((u32::from(z) * u32::from(a) + 4 * u32::from(n)
                                    - u32::from(x) * u32::from(b))
                                    % u32::from(n)) as u8;
                                (k != 0).then_some((gi, k * step))
                            })
                            .collect();
                        list.push((a, b, deltas));
                    }
                }
                list
            })
            .collect();
        SiteTable { ops, n_stab, n_track: tracked.len(), max_degree }
    }
}

struct SearchState<'a> {
    table: &'a SiteTable,
    acc: Vec<u8>,
    stab_violations: usize,
    /// Logical entries differing from the target (or nonzero, without target).
    sig_mismatch: usize,
    target: Option<&'a [u8]>,
    chosen: Vec<(usize, u8, u8)>,
}

impl<'a> SearchState<'a> {
    fn new(table: &'a SiteTable, target: Option<&'a [u8]>) -> Self {
        let sig_mismatch = target.map_or(0, |t| t.iter().filter(|&&k| k != 0).count());
        SearchState {
            table,
            acc: vec![0; table.n_track],
            stab_violations: 0,
            sig_mismatch,
            target,
            chosen: Vec::new(),
        }
    }

    fn want(&self, gi: usize) -> u8 {
        if gi < self.table.n_stab {
            0
        } else {
            self.target.map_or(0, |t| t[gi - self.table.n_stab])
        }
    }

    fn apply(&mut self, deltas: &[(usize, u8)], sign: bool) {
        for &(gi, k) in deltas {
            let want = self.want(gi);
            let before = self.acc[gi] != want;
            self.acc[gi] = if sign { (self.acc[gi] + k) % 4 } else { (self.acc[gi] + 4 - k) % 4 };
            let after = self.acc[gi] != want;
            let counter =
                if gi < self.table.n_stab { &mut self.stab_violations } else { &mut self.sig_mismatch };
            match (before, after) {
                (false, true) => *counter += 1,
                (true, false) => *counter -= 1,
                _ => {}
            }
        }
    }

    fn hit(&self) -> bool {
        if self.stab_violations != 0 {
            return false;
        }
        match self.target {
            Some(_) => self.sig_mismatch == 0,
            None => self.sig_mismatch != 0,
        }
    }

    /// DFS over `remaining` more sites chosen after `after`.
    fn search(&mut self, after: usize, remaining: usize, nodes: &AtomicU64, budget: u64, stop: &AtomicBool) -> bool {
        if remaining == 0 {
            return self.hit();
        }
        if self.stab_violations > remaining * self.table.max_degree {
            return false;
        }
        let n_sites = self.table.ops.len();
        for j in after..n_sites {
            if n_sites - j < remaining || stop.load(Ordering::Relaxed) {
                break;
            }
            if nodes.fetch_add(1, Ordering::Relaxed) >= budget {
                stop.store(true, Ordering::Relaxed);
                return false;
            }
            let table = self.table;
            for (a, b, deltas) in &table.ops[j] {
                self.apply(deltas, true);
                self.chosen.push((j, *a, *b));
                if self.search(j + 1, remaining - 1, nodes, budget, stop) {
                    return true;
                }
                self.chosen.pop();
                self.apply(deltas, false);
            }
        }
        false
    }
}

/// Weight-ordered exhaustive search with an explicit node budget.
pub fn distance_by_weight(
    code: &StabilizerCode,
    basis: &LogicalBasis,
    class_filter: Option<&LogicalClass>,
    max_nodes: u64,
) -> Result<Distance, LogicalError> {
    let table = SiteTable::new(code, basis);
    let target = class_filter.map(|c| c.signature());
    let nodes = AtomicU64::new(0);
    let exhausted = AtomicBool::new(false);
    let n_sites = code.n_sites();
    for w in 1..=n_sites {
        let best_first = AtomicUsize::new(usize::MAX);
        let found: Vec<Option<Vec<(usize, u8, u8)>>> = (0..=n_sites - w)
            .into_par_iter()
            .map(|first| {
                if first > best_first.load(Ordering::Relaxed) {
                    return None;
                }
                let mut st = SearchState::new(&table, target);
                for idx in 0..table.ops[first].len() {
                    let (a, b, ref deltas) = table.ops[first][idx];
                    st.apply(deltas, true);
                    st.chosen.push((first, a, b));
                    if st.search(first + 1, w - 1, &nodes, max_nodes, &exhausted) {
                        best_first.fetch_min(first, Ordering::Relaxed);
                        return Some(st.chosen);
                    }
                    st.chosen.pop();
                    st.apply(deltas, false);
                }
                None
            })
            .collect();
        if let Some(chosen) = found.into_iter().flatten().next() {
            let mut witness = PauliOperator::identity(code.dim(), n_sites);
            for (j, a, b) in chosen {
                witness.set_site(j, a, b);
            }
            return Ok(Distance {
                weight: w,
                witness,
                method: DistanceMethod::WeightOrdered,
                nodes: nodes.load(Ordering::Relaxed),
            });
        }
        if exhausted.load(Ordering::Relaxed) {
            return Err(LogicalError::BudgetExceeded { nodes: nodes.load(Ordering::Relaxed) });
        }
    }
    Err(LogicalError::NoLogicals)
}

/// Anyon `e^a m^b` over `Z_4` (or `Z_2`, using only the low values).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnyonLabel {
    pub a: u8,
    pub b: u8,
}

impl AnyonLabel {
    pub const VACUUM: AnyonLabel = AnyonLabel { a: 0, b: 0 };

    pub fn new(a: u8, b: u8) -> Self {
        AnyonLabel { a: a % 4, b: b % 4 }
    }

    pub fn all() -> impl Iterator<Item = AnyonLabel> {
        (0..4).flat_map(|a| (0..4).map(move |b| AnyonLabel::new(a, b)))
    }

    pub fn fuse(self, other: AnyonLabel) -> AnyonLabel {
        AnyonLabel::new(self.a + other.a, self.b + other.b)
    }

    pub fn conjugate(self) -> AnyonLabel {
        AnyonLabel::new(4 - self.a, 4 - self.b)
    }

    pub fn reduce(self, dim: QuditDim) -> AnyonLabel {
        let n = dim.modulus();
        AnyonLabel { a: self.a % n, b: self.b % n }
    }

    /// Names like `e`, `e3m2`, `m`; vacuum is `1`.
    pub fn name(self) -> String {
        let part = |sym: char, k: u8| match k {
            0 => String::new(),
            1 => sym.to_string(),
            k => format!("{sym}{k}"),
        };
        let s = format!("{}{}", part('e', self.a), part('m', self.b));
        if s.is_empty() {
            "1".to_string()
        } else {
            s
        }
    }

    pub fn parse(s: &str) -> Option<AnyonLabel> {
        let s = s.trim();
        if s == "1" || s.eq_ignore_ascii_case("vacuum") {
            return Some(AnyonLabel::VACUUM);
        }
        if let Some((a, b)) = s.split_once(',') {
            return Some(AnyonLabel::new(a.trim().parse().ok()?, b.trim().parse().ok()?));
        }
        let mut a = 0u8;
        let mut b = 0u8;
        let mut chars = s.chars().peekable();
        let mut seen = false;
        while let Some(c) = chars.next() {
            let mut k = 1u8;
            if let Some(d) = chars.peek().and_then(|d| d.to_digit(10)) {
                k = d as u8;
                chars.next();
            }
            match c {
                'e' => a += k,
                'm' => b += k,
                _ => return None,
            }
            seen = true;
        }
        seen.then(|| AnyonLabel::new(a, b))
    }
}

impl fmt::Display for AnyonLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Exponent of `i` picked up by a full braid of `u` around `v`.
pub fn braiding_exponent(u: AnyonLabel, v: AnyonLabel, dim: QuditDim) -> u8 {
    let (u, v) = (u.reduce(dim), v.reduce(dim));
    let s = u32::from(u.a) * u32::from(v.b) + u32::from(u.b) * u32::from(v.a);
    ((u32::from(dim.phase_step()) * s) % 4) as u8
}

/// Label modulo the condensed boson `e^2 m^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConjugacyClass {
    /// Lexicographically smallest member.
    pub rep: AnyonLabel,
}

impl ConjugacyClass {
    pub fn all() -> Vec<ConjugacyClass> {
        let mut v: Vec<_> = AnyonLabel::all().map(conjugacy_class).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn members(self) -> [AnyonLabel; 2] {
        [self.rep, self.rep.fuse(AnyonLabel::new(2, 2))]
    }

    pub fn is_deconfined(self) -> bool {
        (self.rep.a + self.rep.b).is_multiple_of(2)
    }

    pub fn name(self) -> &'static str {
        match (self.rep.a, self.rep.b) {
            (0, 0) => "vacuum",
            (1, 1) => "s",
            (1, 3) => "sbar",
            (0, 2) => "ssbar",
            (0, 1) => "confined-1",
            (0, 3) => "confined-2",
            (1, 0) => "confined-3",
            (1, 2) => "confined-4",
            _ => unreachable!("class representatives are canonical"),
        }
    }
}

impl fmt::Display for ConjugacyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn conjugacy_class(u: AnyonLabel) -> ConjugacyClass {
    let other = u.fuse(AnyonLabel::new(2, 2));
    ConjugacyClass { rep: u.min(other) }
}

/// Vertex carrying the charge of site `(r, c)`.
pub fn site_vertex(l: &TorusLattice, site: usize) -> usize {
    let (r, c) = l.coords(site);
    l.site(r as isize + 1, c as isize + 1)
}

/// Label at an anyon site read from the plain vertex and plaquette terms.
pub fn label_from_syndrome(
    code: &StabilizerCode,
    syndrome: &SyndromeRecord,
    site: usize,
) -> Result<AnyonLabel, LogicalError> {
    if syndrome.exponents.len() != code.generators().len() {
        return Err(LogicalError::ShapeMismatch);
    }
    let l = code.lattice();
    let step = code.dim().phase_step();
    let ai = code
        .index_of(GeneratorKind::AVertex, site_vertex(l, site))
        .ok_or(LogicalError::Unresolvable { site, reason: "no plain vertex term at the site" })?;
    let bi = code
        .index_of(GeneratorKind::BPlaquette, site)
        .ok_or(LogicalError::Unresolvable { site, reason: "no plain plaquette term at the site" })?;
    let (ka, kb) = (syndrome.exponents[ai], syndrome.exponents[bi]);
    if ka % step != 0 || kb % step != 0 {
        return Err(LogicalError::Unresolvable { site, reason: "exponent off the qudit grid" });
    }
    Ok(AnyonLabel::new(ka / step, kb / step))
}

/// String segment moving `label` from `site` to the neighbouring site across
/// the shared plaquette edge `edge`.
///
/// The flux part is `X^u` on `edge` and the charge part `Z^t` on the edge
/// joining the two charge vertices; exponents are chosen so the destination
/// gains exactly `+label` and the origin `-label`.
pub fn hop(code_lattice: &TorusLattice, dim: QuditDim, label: AnyonLabel, from: usize, to: usize) -> PauliOperator {
    let l = code_lattice;
    let n = dim.modulus();
    let label = label.reduce(dim);
    let mut op = PauliOperator::identity(dim, l.n_edges());
    let flux_edge = shared_edge(l, from, to);
    let role_b = role_in(l.plaquette_edges(to), flux_edge);
    let z_dest = toric_exponents(dim).1[role_b];
    let u = (label.b * z_dest) % n;
    let (vf, vt) = (site_vertex(l, from), site_vertex(l, to));
    let charge_edge = l
        .vertex_edges(vt)
        .into_iter()
        .find(|&e| l.edge_vertices(e).contains(&vf))
        .expect("sites are adjacent");
    let role_a = role_in(l.vertex_edges(vt), charge_edge);
    let x_dest = toric_exponents(dim).0[role_a];
    let t = ((n - label.a % n) % n * x_dest) % n;
    op.set_site(flux_edge, u, 0);
    let (x, z) = op.site(charge_edge);
    op.set_site(charge_edge, x, (z + t) % n);
    op
}

/// String operator carrying `label` along adjacent `sites`; the last site
/// ends up with `+label`, the first with `-label`.
pub fn anyon_string(l: &TorusLattice, dim: QuditDim, label: AnyonLabel, sites: &[usize]) -> PauliOperator {
    let mut op = PauliOperator::identity(dim, l.n_edges());
    for w in sites.windows(2) {
        op.mul_assign_unchecked(&hop(l, dim, label, w[0], w[1]));
    }
    op
}

/// `(A exponents, B exponents)` in `(N, E, S, W)` role order.
pub fn toric_exponents(dim: QuditDim) -> ([u8; 4], [u8; 4]) {
    match dim {
        QuditDim::Qubit => ([1; 4], [1; 4]),
        QuditDim::Ququart => ([3, 3, 1, 1], [3, 1, 1, 3]),
    }
}

fn role_in(edges: [usize; 4], e: usize) -> usize {
    edges.iter().position(|&x| x == e).expect("edge in star")
}

fn shared_edge(l: &TorusLattice, p: usize, q: usize) -> usize {
    let qs = l.plaquette_edges(q);
    l.plaquette_edges(p)
        .into_iter()
        .find(|e| qs.contains(e))
        .expect("plaquettes are adjacent")
}

/// Classify each of the 16 labels by the parity rule.
pub fn parity_table() -> HashMap<AnyonLabel, bool> {
    AnyonLabel::all().map(|u| (u, conjugacy_class(u).is_deconfined())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{build_z2_toric, build_z4_toric, insert_noncontractible_twist};
    use crate::decoder::extract_syndrome;

    fn lat(n: usize) -> TorusLattice {
        TorusLattice::new(n, n).unwrap()
    }

    #[test]
    fn handle_logicals_commute_and_are_nontrivial() {
        let code = build_z2_toric(&lat(3));
        let z = handle_logical(&code, Orientation::Horizontal, Species::ZType, 1).unwrap();
        assert_eq!(z.weight(), 3);
        assert!(code.ops().all(|g| g.commutes_with(&z)));
        assert_eq!(code.group().is_member(&z), Membership::NonMember);
        assert!(handle_logical(&code, Orientation::Vertical, Species::XType, 0).unwrap().is_identity());

        let code4 = build_z4_toric(&lat(3));
        let basis = LogicalBasis::new(&code4);
        let classes: Vec<LogicalClass> = (0..=4)
            .map(|k| basis.classify(&handle_logical(&code4, Orientation::Vertical, Species::XType, k).unwrap()).unwrap())
            .collect();
        assert!(classes[0].is_identity() && classes[4].is_identity());
        for i in 1..4 {
            assert!(!classes[i].is_identity());
            for j in 1..i {
                assert_ne!(classes[i], classes[j]);
            }
        }
        let t = insert_noncontractible_twist(&code, Orientation::Vertical, 0).unwrap();
        assert_eq!(handle_logical(&t, Orientation::Vertical, Species::ZType, 1), Err(LogicalError::NotUntwisted));
    }

    #[test]
    fn class_representatives_multiply_into_the_group() {
        let code = build_z2_toric(&lat(3));
        let basis = LogicalBasis::new(&code);
        let z0 = handle_string(code.lattice(), code.dim(), Orientation::Horizontal, Species::ZType, 1, 0);
        let z2 = handle_string(code.lattice(), code.dim(), Orientation::Horizontal, Species::ZType, 1, 2);
        assert_eq!(basis.classify(&z0).unwrap(), basis.classify(&z2).unwrap());
        assert!(code.group().is_member(&z0.multiply(&z2).unwrap()).is_member_ignoring_phase());
    }

    #[test]
    fn distances_agree_between_methods() {
        let cases = [build_z2_toric(&lat(2)), build_z4_toric(&lat(2)), build_z2_toric(&lat(3))];
        let expected = [2, 2, 3];
        for (code, d) in cases.iter().zip(expected) {
            let basis = LogicalBasis::new(code);
            let a = distance_by_coset(code, &basis, None);
            let b = distance_by_weight(code, &basis, None, u64::MAX).unwrap();
            assert_eq!((a.weight, b.weight), (d, d));
            assert!(!basis.classify(&b.witness).unwrap().is_identity());
            for rep in basis.logicals() {
                let cls = basis.classify(rep).unwrap();
                let a = distance_by_coset(code, &basis, Some(&cls));
                let b = distance_by_weight(code, &basis, Some(&cls), u64::MAX).unwrap();
                assert_eq!(a.weight, b.weight);
                assert!(a.weight >= d);
                assert_eq!(basis.classify(&b.witness).unwrap(), cls);
            }
        }
    }

    #[test]
    fn budget_overflow_is_explicit() {
        let code = build_z2_toric(&lat(3));
        let basis = LogicalBasis::new(&code);
        assert!(matches!(
            distance_by_weight(&code, &basis, None, 10),
            Err(LogicalError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn twisted_logicals_are_logical() {
        for o in [Orientation::Vertical, Orientation::Horizontal] {
            let t = insert_noncontractible_twist(&build_z2_toric(&lat(3)), o, 1).unwrap();
            let basis = LogicalBasis::new(&t);
            let tl = twisted_logicals(&t).unwrap();
            let z = basis.classify(&tl.z_t).unwrap();
            let x = basis.classify(&tl.x_t).unwrap();
            let y = basis.classify(&tl.y_t).unwrap();
            assert!(!z.is_identity() && !x.is_identity() && !y.is_identity());
            assert!(z != x && x != y && y != z);
            assert!(!tl.z_t.commutes_with(&tl.x_t));
        }
    }

    #[test]
    fn labels_and_classes() {
        assert_eq!(braiding_exponent(AnyonLabel::new(1, 0), AnyonLabel::new(0, 1), QuditDim::Ququart), 1);
        assert_eq!(braiding_exponent(AnyonLabel::new(2, 2), AnyonLabel::new(1, 0), QuditDim::Ququart), 2);
        for u in AnyonLabel::all() {
            assert_eq!(braiding_exponent(u, AnyonLabel::VACUUM, QuditDim::Ququart), 0);
            assert_eq!(AnyonLabel::parse(&u.name()), Some(u));
        }
        let classes = ConjugacyClass::all();
        assert_eq!(classes.len(), 8);
        assert_eq!(classes.iter().filter(|c| c.is_deconfined()).count(), 4);
        assert_eq!(conjugacy_class(AnyonLabel::new(2, 2)).name(), "vacuum");
        assert_eq!(conjugacy_class(AnyonLabel::new(3, 3)).name(), "s");
        assert_eq!(conjugacy_class(AnyonLabel::new(3, 1)).name(), "sbar");
        assert_eq!(conjugacy_class(AnyonLabel::new(2, 0)).name(), "ssbar");
        assert!(!conjugacy_class(AnyonLabel::new(1, 0)).is_deconfined());
    }

    #[test]
    fn single_z_makes_charge_pair() {
        let l = lat(3);
        let code = build_z4_toric(&l);
        let e = l.h_edge(1, 1);
        let z = PauliOperator::single(QuditDim::Ququart, l.n_edges(), e, 0, 1);
        let syn = extract_syndrome(&code, &z);
        // Vertex (1,1) is the charge vertex of site (0,0); vertex (1,2) of site (0,1).
        assert_eq!(label_from_syndrome(&code, &syn, l.site(0, 0)).unwrap(), AnyonLabel::new(1, 0));
        assert_eq!(label_from_syndrome(&code, &syn, l.site(0, 1)).unwrap(), AnyonLabel::new(3, 0));
        assert_eq!(label_from_syndrome(&code, &syn, l.site(2, 2)).unwrap(), AnyonLabel::VACUUM);
    }

    #[test]
    fn all_labels_round_trip_through_strings() {
        let l = lat(4);
        for dim in [QuditDim::Qubit, QuditDim::Ququart] {
            let code = if dim == QuditDim::Qubit { build_z2_toric(&l) } else { build_z4_toric(&l) };
            for u in AnyonLabel::all().map(|u| u.reduce(dim)) {
                for path in [
                    vec![l.site(1, 1), l.site(1, 2), l.site(2, 2)],
                    vec![l.site(2, 2), l.site(1, 2), l.site(1, 1), l.site(1, 0)],
                ] {
                    let op = anyon_string(&l, dim, u, &path);
                    let syn = extract_syndrome(&code, &op);
                    let end = *path.last().unwrap();
                    assert_eq!(label_from_syndrome(&code, &syn, end).unwrap(), u);
                    assert_eq!(label_from_syndrome(&code, &syn, path[0]).unwrap(), u.conjugate().reduce(dim));
                    for s in 0..l.n_cells() {
                        if s != end && s != path[0] {
                            assert_eq!(label_from_syndrome(&code, &syn, s).unwrap(), AnyonLabel::VACUUM);
                        }
                    }
                    let violated = syn.exponents.iter().filter(|&&k| k != 0).count();
                    assert_eq!(violated, 2 * (usize::from(u.a != 0) + usize::from(u.b != 0)));
                }
            }
        }
    }
}
