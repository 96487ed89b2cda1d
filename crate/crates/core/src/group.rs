//! Linear algebra over Z_N for stabilizer groups.
//!
//! Z_4 has the zero divisor 2, so plain row echelon form is neither canonical
//! nor sufficient for membership tests. Everything here runs on a strong
//! echelon basis with the Howell property: every pivot divides N, and for a
//! pivot `d != 1` the multiple `(N/d) * row` is itself reduced into the basis.
//! With that property a vector lies in the row span iff it reduces to zero,
//! and the span has exactly `prod N / d_i` elements.
//!
//! Rows are either plain vectors over Z_N or Pauli operators, in which case row
//! operations are literal group multiplications and phases are tracked exactly.

use std::fmt;

use thiserror::Error;

use crate::pauli::{PauliOperator, QuditDim};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("rows {0} and {1} do not commute; not a stabilizer group")]
    NonCommuting(usize, usize),
    #[error("constraints {0} and {1} do not commute")]
    NonCommutingConstraints(usize, usize),
    #[error("group contains a nontrivial scalar (i^{0} * identity)")]
    PhaseInconsistent(u8),
    #[error("operator shape does not match the group (dimension or site count)")]
    ShapeMismatch,
}

/// A row that supports the elementary operations of Howell reduction.
pub trait ModRow: Clone {
    fn ncols(&self) -> usize;
    fn entry(&self, col: usize) -> u8;
    /// `self <- self + k * other`
    fn add_scaled(&mut self, other: &Self, k: u8);
    /// `self <- k * self`
    fn scale(&mut self, k: u8);
    /// Phase left over when the vector part vanishes.
    fn scalar_phase(&self) -> u8 {
        0
    }

    fn leading_col(&self, from: usize) -> Option<usize> {
        (from..self.ncols()).find(|&c| self.entry(c) != 0)
    }
}

/// Dense vector over Z_N.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZnRow {
    pub modulus: u8,
    pub data: Vec<u8>,
}

impl ZnRow {
    pub fn new(modulus: u8, data: Vec<u8>) -> Self {
        let data = data.into_iter().map(|v| v % modulus).collect();
        ZnRow { modulus, data }
    }
}

impl ModRow for ZnRow {
    fn ncols(&self) -> usize {
        self.data.len()
    }

    fn entry(&self, col: usize) -> u8 {
        self.data[col]
    }

    fn add_scaled(&mut self, other: &Self, k: u8) {
        let n = u16::from(self.modulus);
        if k.is_multiple_of(self.modulus) {
            return;
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = ((u16::from(*a) + u16::from(k) * u16::from(*b)) % n) as u8;
        }
    }

    fn scale(&mut self, k: u8) {
        let n = u16::from(self.modulus);
        for a in &mut self.data {
            *a = ((u16::from(*a) * u16::from(k)) % n) as u8;
        }
    }
}

/// Pauli operators as rows of `(x_0, z_0, x_1, z_1, ...)`.
impl ModRow for PauliOperator {
    fn ncols(&self) -> usize {
        2 * self.n_sites()
    }

    fn entry(&self, col: usize) -> u8 {
        let (a, b) = self.site(col / 2);
        if col.is_multiple_of(2) {
            a
        } else {
            b
        }
    }

    fn add_scaled(&mut self, other: &Self, k: u8) {
        for _ in 0..(k % self.modulus()) {
            self.mul_assign_unchecked(other);
        }
    }

    fn scale(&mut self, k: u8) {
        *self = self.power(u32::from(k));
    }

    fn scalar_phase(&self) -> u8 {
        self.phase()
    }

    fn leading_col(&self, from: usize) -> Option<usize> {
        let start = from / 2;
        for j in start..self.n_sites() {
            let (a, b) = self.site(j);
            if a != 0 && 2 * j >= from {
                return Some(2 * j);
            }
            if b != 0 {
                return Some(2 * j + 1);
            }
        }
        None
    }
}

pub fn gcd_with_modulus(e: u8, n: u8) -> u8 {
    let (mut a, mut b) = (e % n, n);
    while a != 0 {
        let t = b % a;
        b = a;
        a = t;
    }
    b
}

/// Multiplicative inverse of a unit of Z_N (N a power of two: every odd element).
fn unit_inverse(u: u8, n: u8) -> u8 {
    (1..n).find(|&v| (u16::from(u) * u16::from(v)) % u16::from(n) == 1).expect("not a unit")
}

/// Outcome of reducing a row against a basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduction {
    /// Vector part vanished; the residual phase exponent is attached.
    Zero(u8),
    /// Reduction stopped at this column.
    Stuck(usize),
}

/// Strong echelon basis with the Howell property over Z_N.
#[derive(Debug, Clone)]
pub struct EchelonBasis<R: ModRow> {
    modulus: u8,
    ncols: usize,
    /// pivot row for each column, with the pivot value
    pivots: Vec<Option<(R, u8)>>,
    scalar_phases: Vec<u8>,
}

impl<R: ModRow> EchelonBasis<R> {
    pub fn new(modulus: u8, ncols: usize) -> Self {
        EchelonBasis {
            modulus,
            ncols,
            pivots: vec![None; ncols],
            scalar_phases: Vec::new(),
        }
    }

    pub fn from_rows<I: IntoIterator<Item = R>>(modulus: u8, ncols: usize, rows: I) -> Self {
        let mut b = Self::new(modulus, ncols);
        for r in rows {
            b.insert(r);
        }
        b
    }

    pub fn modulus(&self) -> u8 {
        self.modulus
    }

    /// Reduces `row` in place as far as the basis allows, stopping at the
    /// first column where no pivot applies (or at `stop_col`).
    pub fn reduce_until(&self, row: &mut R, stop_col: usize) -> Reduction {
        let n = self.modulus;
        let mut from = 0;
        loop {
            let Some(c) = row.leading_col(from) else {
                return Reduction::Zero(row.scalar_phase());
            };
            if c >= stop_col {
                return Reduction::Stuck(c);
            }
            match &self.pivots[c] {
                Some((prow, d)) => {
                    let e = row.entry(c);
                    if e % d != 0 {
                        return Reduction::Stuck(c);
                    }
                    let q = e / d;
                    row.add_scaled(prow, (n - q) % n);
                    from = c;
                }
                None => return Reduction::Stuck(c),
            }
        }
    }

    pub fn reduce(&self, row: &mut R) -> Reduction {
        self.reduce_until(row, self.ncols)
    }

    /// Adds `row` to the span; returns whether the span grew.
    pub fn insert(&mut self, row: R) -> bool {
        let n = self.modulus;
        let mut grew = false;
        let mut work = vec![row];
        while let Some(mut r) = work.pop() {
            match self.reduce(&mut r) {
                Reduction::Zero(phase) => {
                    if phase != 0 {
                        self.scalar_phases.push(phase);
                    }
                }
                Reduction::Stuck(c) => {
                    grew = true;
                    let e = r.entry(c);
                    let d = gcd_with_modulus(e, n);
                    let u = e / d;
                    r.scale(unit_inverse(u, n));
                    debug_assert_eq!(r.entry(c), d);
                    if d != 1 {
                        let mut ann = r.clone();
                        ann.scale(n / d);
                        work.push(ann);
                    }
                    if let Some((old, _)) = self.pivots[c].take() {
                        work.push(old);
                    }
                    self.pivots[c] = Some((r, d));
                }
            }
        }
        grew
    }

    /// Base-2 logarithm of the span size (N is a power of two).
    pub fn order_log2(&self) -> u32 {
        self.pivots
            .iter()
            .flatten()
            .map(|(_, d)| (self.modulus / d).trailing_zeros())
            .sum()
    }

    pub fn rank_rows(&self) -> usize {
        self.pivots.iter().flatten().count()
    }

    /// Nontrivial scalars met while inserting (non-empty means the generated
    /// Pauli group contains `i^k * identity` for some `k != 0`).
    pub fn scalar_phases(&self) -> &[u8] {
        &self.scalar_phases
    }

    /// Howell normal form: pivot rows sorted by column, entries above every
    /// pivot reduced modulo the pivot.
    pub fn howell_rows(&self) -> Vec<(usize, R, u8)> {
        let n = self.modulus;
        let mut rows: Vec<(usize, R, u8)> = self
            .pivots
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.as_ref().map(|(r, d)| (c, r.clone(), *d)))
            .collect();
        for i in 0..rows.len() {
            let (c, prow, d) = (rows[i].0, rows[i].1.clone(), rows[i].2);
            for row in rows.iter_mut().take(i) {
                let q = row.1.entry(c) / d;
                if q != 0 {
                    row.1.add_scaled(&prow, (n - q) % n);
                }
            }
        }
        rows
    }
}

/// Group order as a power of two (orders overflow machine integers quickly).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupOrder {
    pub log2: u32,
}

impl GroupOrder {
    pub fn value(self) -> Option<u128> {
        1u128.checked_shl(self.log2)
    }
}

impl fmt::Display for GroupOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "2^{}", self.log2),
        }
    }
}

/// Membership of a Pauli operator in a stabilizer group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    MemberWithPhase,
    /// The symplectic part is in the group but the operator is `i^k g`, `k != 0`.
    MemberUpToPhase(u8),
    NonMember,
}

impl Membership {
    pub fn is_member_ignoring_phase(self) -> bool {
        !matches!(self, Membership::NonMember)
    }
}

/// A list of Pauli rows over a common dimension and site count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    pub dim: QuditDim,
    pub n_sites: usize,
    pub rows: Vec<PauliOperator>,
}

impl GeneratorMatrix {
    pub fn new(dim: QuditDim, n_sites: usize, rows: Vec<PauliOperator>) -> Self {
        debug_assert!(rows.iter().all(|r| r.dim() == dim && r.n_sites() == n_sites));
        GeneratorMatrix { dim, n_sites, rows }
    }

    pub fn empty(dim: QuditDim, n_sites: usize) -> Self {
        Self::new(dim, n_sites, Vec::new())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// First non-commuting pair, if any.
    pub fn find_noncommuting_pair(&self) -> Option<(usize, usize)> {
        for i in 0..self.rows.len() {
            for j in (i + 1)..self.rows.len() {
                if !self.rows[i].commutes_with(&self.rows[j]) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn check_commuting(&self) -> Result<(), GroupError> {
        match self.find_noncommuting_pair() {
            Some((i, j)) => Err(GroupError::NonCommuting(i, j)),
            None => Ok(()),
        }
    }

    fn basis(&self) -> EchelonBasis<PauliOperator> {
        EchelonBasis::from_rows(self.dim.modulus(), 2 * self.n_sites, self.rows.iter().cloned())
    }

    /// Howell form of the row span; phases follow the row operations.
    pub fn howell_canonicalize(&self) -> GeneratorMatrix {
        let rows = self.basis().howell_rows().into_iter().map(|(_, r, _)| r).collect();
        GeneratorMatrix::new(self.dim, self.n_sites, rows)
    }

    /// Size of the generated group, phases ignored.
    pub fn group_order(&self) -> Result<GroupOrder, GroupError> {
        self.check_commuting()?;
        Ok(GroupOrder { log2: self.basis().order_log2() })
    }

    pub fn is_member(&self, p: &PauliOperator) -> Result<Membership, GroupError> {
        Ok(StabilizerGroup::new(self.clone())?.is_member(p))
    }
}

/// A validated stabilizer group with its echelon basis cached.
#[derive(Debug, Clone)]
pub struct StabilizerGroup {
    generators: GeneratorMatrix,
    basis: EchelonBasis<PauliOperator>,
}

impl StabilizerGroup {
    pub fn new(generators: GeneratorMatrix) -> Result<Self, GroupError> {
        generators.check_commuting()?;
        let basis = generators.basis();
        Ok(StabilizerGroup { generators, basis })
    }

    pub fn generators(&self) -> &GeneratorMatrix {
        &self.generators
    }

    pub fn dim(&self) -> QuditDim {
        self.generators.dim
    }

    pub fn n_sites(&self) -> usize {
        self.generators.n_sites
    }

    pub fn order(&self) -> GroupOrder {
        GroupOrder { log2: self.basis.order_log2() }
    }

    /// `N^n / |G|` as a power of two.
    pub fn logical_dimension_log2(&self) -> u32 {
        let per_site = self.dim().modulus().trailing_zeros();
        per_site * self.n_sites() as u32 - self.basis.order_log2()
    }

    pub fn is_phase_consistent(&self) -> bool {
        self.basis.scalar_phases().is_empty()
    }

    pub fn is_member(&self, p: &PauliOperator) -> Membership {
        let mut r = p.clone();
        match self.basis.reduce(&mut r) {
            Reduction::Zero(0) => Membership::MemberWithPhase,
            Reduction::Zero(k) => Membership::MemberUpToPhase(k),
            Reduction::Stuck(_) => Membership::NonMember,
        }
    }

    pub fn canonical(&self) -> GeneratorMatrix {
        let rows = self.basis.howell_rows().into_iter().map(|(_, r, _)| r).collect();
        GeneratorMatrix::new(self.dim(), self.n_sites(), rows)
    }

    /// Howell-form pivot rows as `(column, row, pivot)`; useful for enumeration.
    pub fn howell_rows(&self) -> Vec<(usize, PauliOperator, u8)> {
        self.basis.howell_rows()
    }

    pub fn basis(&self) -> &EchelonBasis<PauliOperator> {
        &self.basis
    }
}

/// Generators of the kernel `{ x : sum_i x_i rows_i = 0 }` over Z_N.
pub fn zn_left_kernel(modulus: u8, rows: &[Vec<u8>], ncols: usize) -> Vec<Vec<u8>> {
    let m = rows.len();
    let augmented = rows.iter().enumerate().map(|(i, r)| {
        let mut data = Vec::with_capacity(ncols + m);
        data.extend(r.iter().map(|v| v % modulus));
        data.extend((0..m).map(|j| u8::from(i == j)));
        ZnRow { modulus, data }
    });
    let basis = EchelonBasis::from_rows(modulus, ncols + m, augmented);
    basis
        .howell_rows()
        .into_iter()
        .filter(|(c, _, _)| *c >= ncols)
        .map(|(_, r, _)| r.data[ncols..].to_vec())
        .collect()
}

/// Precomputed solver for `sum_i x_i rows_i = target` over Z_N.
#[derive(Debug, Clone)]
pub struct LinearSolver {
    modulus: u8,
    ncols: usize,
    nrows: usize,
    basis: EchelonBasis<ZnRow>,
}

impl LinearSolver {
    pub fn new(modulus: u8, rows: &[Vec<u8>], ncols: usize) -> Self {
        let m = rows.len();
        let augmented = rows.iter().enumerate().map(|(i, r)| {
            let mut data = Vec::with_capacity(ncols + m);
            data.extend(r.iter().map(|v| v % modulus));
            data.extend((0..m).map(|j| u8::from(i == j)));
            ZnRow { modulus, data }
        });
        LinearSolver {
            modulus,
            ncols,
            nrows: m,
            basis: EchelonBasis::from_rows(modulus, ncols + m, augmented),
        }
    }

    pub fn solve(&self, target: &[u8]) -> Option<Vec<u8>> {
        let n = self.modulus;
        let mut data: Vec<u8> = target.iter().map(|v| v % n).collect();
        data.extend(std::iter::repeat_n(0, self.nrows));
        let mut row = ZnRow { modulus: n, data };
        match self.basis.reduce_until(&mut row, self.ncols) {
            Reduction::Stuck(c) if c < self.ncols => None,
            _ => Some(row.data[self.ncols..].iter().map(|&v| (n - v) % n).collect()),
        }
    }
}

/// Commutation exponent mapped into Z_N (`kappa / (4/N)`).
fn kappa_zn(a: &PauliOperator, b: &PauliOperator) -> u8 {
    a.commutation_exponent_unchecked(b) / a.dim().phase_step()
}

/// Elements of `<m>` commuting with every constraint.
pub fn centralizer_in_group(m: &GeneratorMatrix, constraints: &GeneratorMatrix) -> GeneratorMatrix {
    let n = m.dim.modulus();
    let mut good = Vec::new();
    let mut bad = Vec::new();
    for g in &m.rows {
        if constraints.rows.iter().all(|c| g.commutes_with(c)) {
            good.push(g.clone());
        } else {
            bad.push(g);
        }
    }
    if !bad.is_empty() {
        let table: Vec<Vec<u8>> = bad
            .iter()
            .map(|g| constraints.rows.iter().map(|c| kappa_zn(g, c)).collect())
            .collect();
        for combo in zn_left_kernel(n, &table, constraints.len()) {
            let mut p = PauliOperator::identity(m.dim, m.n_sites);
            for (g, &k) in bad.iter().zip(&combo) {
                if k != 0 {
                    p.mul_assign_unchecked(&g.power(u32::from(k)));
                }
            }
            if !p.is_identity() {
                good.push(p);
            }
        }
    }
    GeneratorMatrix::new(m.dim, m.n_sites, good)
}

/// `<constraints> . C_{<m>}(constraints)`: the group after measuring the constraints.
pub fn extend_with_constraints(
    m: &GeneratorMatrix,
    constraints: &GeneratorMatrix,
) -> Result<GeneratorMatrix, GroupError> {
    if let Some((i, j)) = constraints.find_noncommuting_pair() {
        return Err(GroupError::NonCommutingConstraints(i, j));
    }
    let mut rows = constraints.rows.clone();
    rows.extend(centralizer_in_group(m, constraints).rows);
    Ok(GeneratorMatrix::new(m.dim, m.n_sites, rows))
}

/// Generators of the centralizer of `m` inside the full Pauli group (phases dropped).
pub fn full_centralizer(m: &GeneratorMatrix) -> GeneratorMatrix {
    let n = m.dim.modulus();
    let n_sites = m.n_sites;
    let units: Vec<PauliOperator> = (0..n_sites)
        .flat_map(|j| {
            [
                PauliOperator::single(m.dim, n_sites, j, 1, 0),
                PauliOperator::single(m.dim, n_sites, j, 0, 1),
            ]
        })
        .collect();
    let table: Vec<Vec<u8>> = units
        .iter()
        .map(|u| m.rows.iter().map(|g| kappa_zn(u, g)).collect())
        .collect();
    let rows = zn_left_kernel(n, &table, m.len())
        .into_iter()
        .map(|combo| PauliOperator::from_symplectic(m.dim, &combo, 0))
        .filter(|p| !p.is_scalar())
        .collect();
    GeneratorMatrix::new(m.dim, n_sites, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    const Q4: QuditDim = QuditDim::Ququart;

    fn lit(s: &str, n: usize) -> PauliOperator {
        PauliOperator::parse_literal(s, Q4, n).unwrap()
    }

    /// Every element of the span as unsigned symplectic vectors, by brute force.
    fn enumerate_span(rows: &[PauliOperator]) -> HashSet<Vec<u8>> {
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        let n_sites = rows.first().map_or(0, |r| r.n_sites());
        seen.insert(vec![0; 2 * n_sites]);
        let mut frontier: Vec<PauliOperator> = vec![PauliOperator::identity(Q4, n_sites)];
        while let Some(p) = frontier.pop() {
            for r in rows {
                let q = p.multiply(r).unwrap();
                if seen.insert(q.symplectic()) {
                    frontier.push(q);
                }
            }
        }
        seen
    }

    #[test]
    fn duplicate_and_multiple_rows_collapse() {
        let m = GeneratorMatrix::new(Q4, 1, vec![lit("X2@e0", 1), lit("X2@e0", 1)]);
        assert_eq!(m.howell_canonicalize().rows, vec![lit("X2@e0", 1)]);
        let m = GeneratorMatrix::new(Q4, 1, vec![lit("X1@e0", 1), lit("X2@e0", 1)]);
        assert_eq!(m.howell_canonicalize().rows, vec![lit("X1@e0", 1)]);
    }

    #[test]
    fn howell_span_matches_enumeration() {
        let rows = vec![lit("X2 Z2@e0", 1), lit("Z2@e0", 1)];
        let m = GeneratorMatrix::new(Q4, 1, rows.clone());
        let h = m.howell_canonicalize();
        assert_eq!(enumerate_span(&h.rows), enumerate_span(&rows));
        assert_eq!(enumerate_span(&rows).len(), 4);
        assert_eq!(m.group_order().unwrap().value(), Some(4));
    }

    #[test]
    fn empty_group_has_order_one() {
        let m = GeneratorMatrix::empty(Q4, 3);
        assert_eq!(m.group_order().unwrap().value(), Some(1));
    }

    #[test]
    fn non_commuting_rows_rejected() {
        let m = GeneratorMatrix::new(Q4, 1, vec![lit("X1@e0", 1), lit("Z1@e0", 1)]);
        assert_eq!(m.group_order(), Err(GroupError::NonCommuting(0, 1)));
    }

    #[test]
    fn membership_verdicts() {
        let a = lit("X1@e0 X3@e1", 2);
        let m = GeneratorMatrix::new(Q4, 2, vec![a.clone()]);
        let g = StabilizerGroup::new(m).unwrap();
        assert_eq!(g.is_member(&a.power(3)), Membership::MemberWithPhase);
        assert_eq!(g.is_member(&a.clone().with_phase_shift(2)), Membership::MemberUpToPhase(2));
        assert_eq!(g.is_member(&lit("X1@e0", 2)), Membership::NonMember);
    }

    #[test]
    fn kernel_and_solver() {
        // x0 * 2 + x1 * 1 = 0 (mod 4)
        let rows = vec![vec![2], vec![1]];
        let k = zn_left_kernel(4, &rows, 1);
        for v in &k {
            assert_eq!((2 * v[0] + v[1]) % 4, 0);
        }
        // kernel has 4 elements: (x0, -2 x0)
        let solver = LinearSolver::new(4, &rows, 1);
        let x = solver.solve(&[3]).unwrap();
        assert_eq!((2 * x[0] + x[1]) % 4, 3);
        let solver = LinearSolver::new(4, &[vec![2]], 1);
        assert!(solver.solve(&[1]).is_none());
        assert!(solver.solve(&[2]).is_some());
    }

    #[test]
    fn constraint_identity_keeps_group() {
        let a = lit("X1@e0 X3@e1", 2);
        let b = lit("Z1@e0 Z1@e1", 2);
        let m = GeneratorMatrix::new(Q4, 2, vec![a, b]);
        let c = GeneratorMatrix::new(Q4, 2, vec![PauliOperator::identity(Q4, 2)]);
        let cent = centralizer_in_group(&m, &c);
        assert_eq!(cent.howell_canonicalize(), m.howell_canonicalize());
    }

    #[test]
    fn noncommuting_constraints_rejected() {
        let m = GeneratorMatrix::empty(Q4, 1);
        let c = GeneratorMatrix::new(Q4, 1, vec![lit("X1@e0", 1), lit("Z1@e0", 1)]);
        assert!(matches!(
            extend_with_constraints(&m, &c),
            Err(GroupError::NonCommutingConstraints(0, 1))
        ));
    }
}
