//! Stabilizer code construction: toric codes, twists and double-semion condensation.

use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::group::{extend_with_constraints, EchelonBasis, GeneratorMatrix, GroupError, StabilizerGroup};
use crate::lattice::{LatticeError, Orientation, RegionMask, RegionRole, TorusLattice};
use crate::pauli::{PauliError, PauliOperator, QuditDim};

#[derive(Debug, Error)]
pub enum CodeError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("operation needs a Z_{expected} code, got Z_{got}")]
    WrongDimension { expected: u8, got: u8 },
    #[error("strip closes around a handle; use the non-contractible twist")]
    StripWrapsHandle,
    #[error("condensed region wraps a handle")]
    RegionWrapsHandle,
    #[error("region mask size {got} does not match lattice ({expected} cells)")]
    RegionSize { expected: usize, got: usize },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Origin of a generator row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorKind {
    /// Toric vertex term `A_v`.
    AVertex,
    /// Toric plaquette term `B_p`.
    BPlaquette,
    /// Condensed vertex term `A_v B_p` (plaquette south-east of `v`).
    DsVertex,
    /// Condensed plaquette term `B_p^2`.
    DsPlaquette,
    /// Short-string constraint `X^2_h Z^2_v` of a unit cell.
    CondenseH,
    /// Short-string constraint `Z^2_h X^2_v` of a unit cell.
    CondenseV,
    /// Twist constraint `Z X` on one unit cell of a strip.
    Twist,
    /// Any other centralizer element.
    Derived,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 8] = [
        GeneratorKind::AVertex,
        GeneratorKind::BPlaquette,
        GeneratorKind::DsVertex,
        GeneratorKind::DsPlaquette,
        GeneratorKind::CondenseH,
        GeneratorKind::CondenseV,
        GeneratorKind::Twist,
        GeneratorKind::Derived,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorKind::AVertex => "a-vertex",
            GeneratorKind::BPlaquette => "b-plaquette",
            GeneratorKind::DsVertex => "ds-vertex",
            GeneratorKind::DsPlaquette => "ds-plaquette",
            GeneratorKind::CondenseH => "c-h",
            GeneratorKind::CondenseV => "c-v",
            GeneratorKind::Twist => "twist",
            GeneratorKind::Derived => "derived",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    pub fn is_constraint(self) -> bool {
        matches!(self, GeneratorKind::CondenseH | GeneratorKind::CondenseV | GeneratorKind::Twist)
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub kind: GeneratorKind,
    /// Vertex, plaquette or cell index the generator is attached to.
    pub anchor: Option<usize>,
    pub op: PauliOperator,
}

impl Generator {
    pub fn new(kind: GeneratorKind, anchor: Option<usize>, op: PauliOperator) -> Self {
        Generator { kind, anchor, op }
    }
}

#[derive(Debug, Clone)]
pub struct StabilizerCode {
    lattice: TorusLattice,
    dim: QuditDim,
    generators: Vec<Generator>,
    regions: Vec<RegionMask>,
    group: OnceLock<StabilizerGroup>,
}

impl PartialEq for StabilizerCode {
    fn eq(&self, other: &Self) -> bool {
        self.lattice == other.lattice
            && self.dim == other.dim
            && self.generators == other.generators
            && self.regions == other.regions
    }
}

impl StabilizerCode {
    /// Validates commutativity of the generators.
    pub fn new(
        lattice: TorusLattice,
        dim: QuditDim,
        generators: Vec<Generator>,
        regions: Vec<RegionMask>,
    ) -> Result<Self, CodeError> {
        let code = Self::new_unchecked(lattice, dim, generators, regions);
        code.matrix().check_commuting()?;
        Ok(code)
    }

    fn new_unchecked(
        lattice: TorusLattice,
        dim: QuditDim,
        generators: Vec<Generator>,
        regions: Vec<RegionMask>,
    ) -> Self {
        StabilizerCode { lattice, dim, generators, regions, group: OnceLock::new() }
    }

    pub fn lattice(&self) -> &TorusLattice {
        &self.lattice
    }

    pub fn dim(&self) -> QuditDim {
        self.dim
    }

    pub fn n_sites(&self) -> usize {
        self.lattice.n_edges()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn regions(&self) -> &[RegionMask] {
        &self.regions
    }

    pub fn region(&self, role: RegionRole) -> Option<&RegionMask> {
        self.regions.iter().find(|r| r.role == role)
    }

    pub fn is_untwisted_toric(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn ops(&self) -> impl Iterator<Item = &PauliOperator> {
        self.generators.iter().map(|g| &g.op)
    }

    pub fn matrix(&self) -> GeneratorMatrix {
        GeneratorMatrix::new(self.dim, self.n_sites(), self.ops().cloned().collect())
    }

    /// Generated stabilizer group (computed once).
    pub fn group(&self) -> &StabilizerGroup {
        self.group.get_or_init(|| {
            StabilizerGroup::new(self.matrix()).expect("generators are validated at construction")
        })
    }

    /// `log2` of the codespace dimension.
    pub fn logical_dimension_log2(&self) -> u32 {
        self.group().logical_dimension_log2()
    }

    pub fn of_kind(&self, kind: GeneratorKind) -> impl Iterator<Item = (usize, &Generator)> {
        self.generators.iter().enumerate().filter(move |(_, g)| g.kind == kind)
    }

    /// Index of the generator of `kind` anchored at `anchor`.
    pub fn index_of(&self, kind: GeneratorKind, anchor: usize) -> Option<usize> {
        self.generators.iter().position(|g| g.kind == kind && g.anchor == Some(anchor))
    }

    /// Syndrome exponents `kappa(g, error)` for every generator.
    pub fn syndrome_of(&self, error: &PauliOperator) -> Vec<u8> {
        self.generators.iter().map(|g| g.op.commutation_exponent_unchecked(error)).collect()
    }

    /// Number of violated generators.
    pub fn energy(&self, error: &PauliOperator) -> usize {
        self.generators
            .iter()
            .filter(|g| g.op.commutation_exponent_unchecked(error) != 0)
            .count()
    }

    /// Line-based text form; [`StabilizerCode::from_text`] reads it back.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("ztwist-code 1\n");
        s.push_str(&format!("lattice {} {}\n", self.lattice.rows(), self.lattice.cols()));
        s.push_str(&format!("modulus {}\n", self.dim.modulus()));
        for r in &self.regions {
            let cells: Vec<String> = r.cells().iter().map(|c| c.to_string()).collect();
            let cells = if cells.is_empty() { "-".to_string() } else { cells.join(",") };
            s.push_str(&format!("region {} {}\n", r.role.as_str(), cells));
        }
        for g in &self.generators {
            let anchor = g.anchor.map_or("-".to_string(), |a| a.to_string());
            s.push_str(&format!("gen {} {} {}\n", g.kind, anchor, g.op));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, CodeError> {
        let err = |line: usize, msg: &str| CodeError::Parse { line: line + 1, msg: msg.to_string() };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, "ztwist-code 1")) => {}
            _ => return Err(err(0, "missing header")),
        }
        let (i, l) = lines.next().ok_or_else(|| err(1, "missing lattice"))?;
        let dims: Vec<usize> = l
            .strip_prefix("lattice ")
            .ok_or_else(|| err(i, "expected lattice"))?
            .split(' ')
            .map(|t| t.parse().map_err(|_| err(i, "bad lattice size")))
            .collect::<Result<_, _>>()?;
        if dims.len() != 2 {
            return Err(err(i, "bad lattice size"));
        }
        let lattice = TorusLattice::new(dims[0], dims[1])?;
        let (i, l) = lines.next().ok_or_else(|| err(2, "missing modulus"))?;
        let n: u8 = l
            .strip_prefix("modulus ")
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(i, "bad modulus"))?;
        let dim = QuditDim::from_modulus(n)?;
        let mut regions = Vec::new();
        let mut generators = Vec::new();
        for (i, l) in lines {
            let mut parts = l.splitn(4, ' ');
            match parts.next() {
                Some("region") => {
                    let role = parts
                        .next()
                        .and_then(RegionRole::parse)
                        .ok_or_else(|| err(i, "bad region role"))?;
                    let cells = parts.next().ok_or_else(|| err(i, "missing cells"))?;
                    let cells: Vec<usize> = if cells == "-" {
                        Vec::new()
                    } else {
                        cells
                            .split(',')
                            .map(|c| match c.parse::<usize>() {
                                Ok(v) if v < lattice.n_cells() => Ok(v),
                                _ => Err(err(i, "bad cell")),
                            })
                            .collect::<Result<_, _>>()?
                    };
                    regions.push(RegionMask::from_cells(&lattice, role, &cells));
                }
                Some("gen") => {
                    let kind = parts
                        .next()
                        .and_then(GeneratorKind::parse)
                        .ok_or_else(|| err(i, "bad generator kind"))?;
                    let anchor = match parts.next() {
                        Some("-") => None,
                        Some(a) => Some(a.parse().map_err(|_| err(i, "bad anchor"))?),
                        None => return Err(err(i, "missing anchor")),
                    };
                    let lit = parts.next().ok_or_else(|| err(i, "missing operator"))?;
                    let op = PauliOperator::parse_literal(lit, dim, lattice.n_edges())?;
                    generators.push(Generator::new(kind, anchor, op));
                }
                _ => return Err(err(i, "unknown record")),
            }
        }
        Self::new(lattice, dim, generators, regions)
    }
}

/// Standard `Z_2` toric code.
pub fn build_z2_toric(lattice: &TorusLattice) -> StabilizerCode {
    build_toric(lattice, QuditDim::Qubit, [1, 1, 1, 1], [1, 1, 1, 1])
}

/// `Z_4` toric code with `A_v = X^3_N X^3_E X_S X_W` and `B_p = Z^3_N Z_E Z_S Z^3_W`.
pub fn build_z4_toric(lattice: &TorusLattice) -> StabilizerCode {
    build_toric(lattice, QuditDim::Ququart, [3, 3, 1, 1], [3, 1, 1, 3])
}

fn build_toric(lattice: &TorusLattice, dim: QuditDim, a: [u8; 4], b: [u8; 4]) -> StabilizerCode {
    let n = lattice.n_edges();
    let mut gens = Vec::with_capacity(2 * lattice.n_cells());
    for v in 0..lattice.n_vertices() {
        let mut op = PauliOperator::identity(dim, n);
        for (e, k) in lattice.vertex_edges(v).into_iter().zip(a) {
            op.set_site(e, k, 0);
        }
        gens.push(Generator::new(GeneratorKind::AVertex, Some(v), op));
    }
    for p in 0..lattice.n_plaquettes() {
        let mut op = PauliOperator::identity(dim, n);
        for (e, k) in lattice.plaquette_edges(p).into_iter().zip(b) {
            op.set_site(e, 0, k);
        }
        gens.push(Generator::new(GeneratorKind::BPlaquette, Some(p), op));
    }
    StabilizerCode::new_unchecked(*lattice, dim, gens, Vec::new())
}

/// Twist constraint on one cell. Vertical pairing couples `Z` on the cell's
/// vertical edge with `X` on its horizontal edge; horizontal pairing swaps them.
pub fn twist_constraint(lattice: &TorusLattice, cell: usize, pairing: Orientation) -> PauliOperator {
    let (r, c) = lattice.coords(cell);
    let (r, c) = (r as isize, c as isize);
    let h = lattice.h_edge(r, c);
    let v = lattice.v_edge(r, c);
    let n = lattice.n_edges();
    let mut op = PauliOperator::identity(QuditDim::Qubit, n);
    match pairing {
        Orientation::Vertical => {
            op.set_site(v, 0, 1);
            op.set_site(h, 1, 0);
        }
        Orientation::Horizontal => {
            op.set_site(h, 0, 1);
            op.set_site(v, 1, 0);
        }
    }
    op
}

/// Pairing used for a strip: strips lying in a single row (and longer than
/// one cell) pair horizontally, everything else vertically.
pub fn strip_pairing(lattice: &TorusLattice, strip: &RegionMask) -> Orientation {
    let cells = strip.cells();
    let rows: HashSet<usize> = cells.iter().map(|&c| lattice.coords(c).0).collect();
    if cells.len() > 1 && rows.len() == 1 {
        Orientation::Horizontal
    } else {
        Orientation::Vertical
    }
}

fn require_dim(code: &StabilizerCode, dim: QuditDim) -> Result<(), CodeError> {
    if code.dim != dim {
        return Err(CodeError::WrongDimension { expected: dim.modulus(), got: code.dim.modulus() });
    }
    Ok(())
}

fn check_region(code: &StabilizerCode, region: &RegionMask) -> Result<(), CodeError> {
    if region.n_cells() != code.lattice.n_cells() {
        return Err(CodeError::RegionSize { expected: code.lattice.n_cells(), got: region.n_cells() });
    }
    Ok(())
}

/// Twist strip closing around a handle: a full column (vertical) or full row
/// (horizontal) of unit cells.
pub fn insert_noncontractible_twist(
    code: &StabilizerCode,
    orientation: Orientation,
    offset: usize,
) -> Result<StabilizerCode, CodeError> {
    require_dim(code, QuditDim::Qubit)?;
    let l = code.lattice;
    let (limit, len) = match orientation {
        Orientation::Vertical => (l.cols(), l.rows()),
        Orientation::Horizontal => (l.rows(), l.cols()),
    };
    if offset >= limit {
        return Err(LatticeError::OffsetOutOfRange { offset, limit }.into());
    }
    let cells: Vec<usize> = (0..len)
        .map(|k| match orientation {
            Orientation::Vertical => l.site(k as isize, offset as isize),
            Orientation::Horizontal => l.site(offset as isize, k as isize),
        })
        .collect();
    let strip = RegionMask::from_cells(&l, RegionRole::TwistStrip, &cells);
    apply_twist(code, strip, orientation)
}

/// Twist on a contractible strip of unit cells.
pub fn insert_finite_twist(code: &StabilizerCode, strip: &RegionMask) -> Result<StabilizerCode, CodeError> {
    require_dim(code, QuditDim::Qubit)?;
    check_region(code, strip)?;
    if strip.is_empty() {
        return Ok(code.clone());
    }
    if strip.spans_handle(&code.lattice) {
        return Err(CodeError::StripWrapsHandle);
    }
    let mut strip = strip.clone();
    strip.role = RegionRole::TwistStrip;
    let pairing = strip_pairing(&code.lattice, &strip);
    apply_twist(code, strip, pairing)
}

fn apply_twist(
    code: &StabilizerCode,
    strip: RegionMask,
    pairing: Orientation,
) -> Result<StabilizerCode, CodeError> {
    let l = code.lattice;
    let constraints: Vec<Generator> = strip
        .cells()
        .into_iter()
        .map(|c| Generator::new(GeneratorKind::Twist, Some(c), twist_constraint(&l, c, pairing)))
        .collect();
    let mut regions = code.regions.clone();
    if !regions.contains(&strip) {
        regions.push(strip);
    }
    extend_code(code, constraints, regions)
}

/// Short-string constraints of one unit cell `(i, j)`:
/// `C_h = X^2_{h(i,j)} Z^2_{v(i-1,j)}` and `C_v = Z^2_{h(i,j)} X^2_{v(i,j+1)}`.
pub fn condensation_constraints(lattice: &TorusLattice, cell: usize) -> [PauliOperator; 2] {
    let (i, j) = lattice.coords(cell);
    let (i, j) = (i as isize, j as isize);
    let n = lattice.n_edges();
    let h = lattice.h_edge(i, j);
    let mut ch = PauliOperator::identity(QuditDim::Ququart, n);
    ch.set_site(h, 2, 0);
    ch.set_site(lattice.v_edge(i - 1, j), 0, 2);
    let mut cv = PauliOperator::identity(QuditDim::Ququart, n);
    cv.set_site(h, 0, 2);
    cv.set_site(lattice.v_edge(i, j + 1), 2, 0);
    [ch, cv]
}

/// Double-semion condensation of `region` in a `Z_4` toric code.
pub fn condense_ds(code: &StabilizerCode, region: &RegionMask) -> Result<StabilizerCode, CodeError> {
    require_dim(code, QuditDim::Ququart)?;
    check_region(code, region)?;
    if region.is_empty() {
        return Ok(code.clone());
    }
    let l = code.lattice;
    let mut constraints = Vec::new();
    for c in region.cells() {
        let [ch, cv] = condensation_constraints(&l, c);
        constraints.push(Generator::new(GeneratorKind::CondenseH, Some(c), ch));
        constraints.push(Generator::new(GeneratorKind::CondenseV, Some(c), cv));
    }
    let mut region = region.clone();
    region.role = RegionRole::CondensedDs;
    let mut regions = code.regions.clone();
    if !regions.contains(&region) {
        regions.push(region);
    }
    extend_code(code, constraints, regions)
}

/// Explicit condensed generators `A_v B_p`, `B_p^2` and the short-string
/// constraints over the whole lattice.
pub fn explicit_ds_generators(lattice: &TorusLattice) -> GeneratorMatrix {
    let base = build_z4_toric(lattice);
    let n_cells = lattice.n_cells();
    let a = &base.generators[..n_cells];
    let b = &base.generators[n_cells..];
    let mut rows = Vec::new();
    for v in 0..n_cells {
        let mut p = a[v].op.clone();
        p.mul_assign_unchecked(&b[v].op);
        rows.push(p);
    }
    for g in b {
        rows.push(g.op.power(2));
    }
    for c in 0..n_cells {
        rows.extend(condensation_constraints(lattice, c));
    }
    GeneratorMatrix::new(QuditDim::Ququart, lattice.n_edges(), rows)
}

/// Measures `constraints` on top of `code`: keeps the commuting generators,
/// replaces the others by short commuting products, and falls back to the
/// global centralizer for anything still missing.
fn extend_code(
    code: &StabilizerCode,
    constraints: Vec<Generator>,
    regions: Vec<RegionMask>,
) -> Result<StabilizerCode, CodeError> {
    let l = code.lattice;
    let dim = code.dim;
    let n = l.n_edges();
    let nmod = dim.modulus();
    let c_ops: Vec<PauliOperator> = constraints.iter().map(|g| g.op.clone()).collect();
    let c_matrix = GeneratorMatrix::new(dim, n, c_ops.clone());
    c_matrix.check_commuting().map_err(|e| match e {
        GroupError::NonCommuting(i, j) => GroupError::NonCommutingConstraints(i, j),
        other => other,
    })?;
    let ok = |p: &PauliOperator| c_ops.iter().all(|c| c.commutes_with(p));

    let mut basis: EchelonBasis<PauliOperator> = EchelonBasis::new(nmod, 2 * n);
    let mut out: Vec<Generator> = Vec::new();
    let push = |g: Generator, basis: &mut EchelonBasis<PauliOperator>, out: &mut Vec<Generator>| {
        if basis.insert(g.op.clone()) {
            out.push(g);
        }
    };

    let mut bad: Vec<&Generator> = Vec::new();
    for g in &code.generators {
        if ok(&g.op) {
            push(g.clone(), &mut basis, &mut out);
        } else {
            bad.push(g);
        }
    }
    for g in &constraints {
        push(g.clone(), &mut basis, &mut out);
    }

    let b_at = |p: usize| {
        code.generators
            .iter()
            .find(|g| g.kind == GeneratorKind::BPlaquette && g.anchor == Some(p))
    };
    let mut candidates: Vec<Generator> = Vec::new();
    for g in &bad {
        if g.kind == GeneratorKind::AVertex {
            if let Some(b) = g.anchor.and_then(b_at) {
                let mut p = g.op.clone();
                p.mul_assign_unchecked(&b.op);
                let kind = if nmod == 4 { GeneratorKind::DsVertex } else { GeneratorKind::Derived };
                candidates.push(Generator::new(kind, g.anchor, p));
            }
        }
    }
    let plaquettes_first = bad
        .iter()
        .filter(|g| g.kind == GeneratorKind::BPlaquette)
        .chain(bad.iter().filter(|g| g.kind != GeneratorKind::BPlaquette));
    for g in plaquettes_first {
        for k in 2..nmod {
            let kind = if g.kind == GeneratorKind::BPlaquette && k == 2 {
                GeneratorKind::DsPlaquette
            } else {
                GeneratorKind::Derived
            };
            candidates.push(Generator::new(kind, g.anchor, g.op.power(u32::from(k))));
        }
    }
    for (i, g) in bad.iter().enumerate() {
        let sup: HashSet<usize> = g.op.support().into_iter().collect();
        for h in &bad[i + 1..] {
            if !h.op.support().iter().any(|e| sup.contains(e)) {
                continue;
            }
            for a in 1..nmod {
                for b in 1..nmod {
                    let mut p = g.op.power(u32::from(a));
                    p.mul_assign_unchecked(&h.op.power(u32::from(b)));
                    candidates.push(Generator::new(GeneratorKind::Derived, g.anchor, p));
                }
            }
        }
    }
    for g in candidates {
        if g.op.is_scalar() || !ok(&g.op) {
            continue;
        }
        if matches!(g.kind, GeneratorKind::DsVertex | GeneratorKind::DsPlaquette) {
            basis.insert(g.op.clone());
            out.push(g);
        } else {
            push(g, &mut basis, &mut out);
        }
    }

    let global = extend_with_constraints(&code.matrix(), &c_matrix)?;
    for p in global.rows {
        if !p.is_scalar() {
            push(Generator::new(GeneratorKind::Derived, None, p), &mut basis, &mut out);
        }
    }
    if !basis.scalar_phases().is_empty() {
        return Err(GroupError::PhaseInconsistent(basis.scalar_phases()[0]).into());
    }
    out.sort_by_key(|g| (g.kind, g.anchor));
    StabilizerCode::new(l, dim, out, regions)
}
