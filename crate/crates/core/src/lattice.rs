//! Periodic square lattice bookkeeping.
//!
//! Vertices and plaquettes are indexed row-major, `r * cols + c`. Plaquette
//! `(r, c)` sits to the south-east of vertex `(r, c)`; row index grows
//! southward. Edge indexing puts all horizontal edges first:
//!
//! * `h(r, c) = r * cols + c` joins vertex `(r, c)` to `(r, c + 1)`;
//! * `v(r, c) = rows * cols + r * cols + c` joins vertex `(r, c)` to `(r + 1, c)`.
//!
//! The unit cell `(r, c)` holds `h(r, c)` and `v(r, c)`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("torus must be at least 2x2, got {0}x{1}")]
    Degenerate(usize, usize),
    #[error("offset {offset} out of range (limit {limit})")]
    OffsetOutOfRange { offset: usize, limit: usize },
    #[error("path endpoints must both be vertices or both be plaquettes")]
    MixedEndpoints,
    #[error("target unreachable under the given penalties")]
    Unreachable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// Position of an edge relative to a vertex star or a plaquette boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    N,
    E,
    S,
    W,
}

impl Role {
    pub const ALL: [Role; 4] = [Role::N, Role::E, Role::S, Role::W];
}

/// Primal cycle (`Z`-type loops along edges) or dual co-cycle (`X`-type loops
/// across edges).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LoopKind {
    Cycle,
    Cocycle,
}

/// Node of the primal (vertex) or dual (plaquette) lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Vertex(usize),
    Plaquette(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub from: Node,
    pub to: Node,
    pub edge: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub steps: Vec<Step>,
    pub weight: u64,
}

impl Path {
    pub fn edges(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.edge).collect()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TorusLattice {
    rows: usize,
    cols: usize,
}

impl TorusLattice {
    pub fn new(rows: usize, cols: usize) -> Result<Self, LatticeError> {
        if rows < 2 || cols < 2 {
            return Err(LatticeError::Degenerate(rows, cols));
        }
        Ok(TorusLattice { rows, cols })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn n_vertices(&self) -> usize {
        self.rows * self.cols
    }

    #[inline]
    pub fn n_plaquettes(&self) -> usize {
        self.rows * self.cols
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.rows * self.cols
    }

    #[inline]
    pub fn n_edges(&self) -> usize {
        2 * self.rows * self.cols
    }

    #[inline]
    fn wrap(&self, r: isize, c: isize) -> (usize, usize) {
        (
            r.rem_euclid(self.rows as isize) as usize,
            c.rem_euclid(self.cols as isize) as usize,
        )
    }

    /// Index of the vertex (or plaquette, or cell) at `(r, c)`, wrapping.
    #[inline]
    pub fn site(&self, r: isize, c: isize) -> usize {
        let (r, c) = self.wrap(r, c);
        r * self.cols + c
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx / self.cols, idx % self.cols)
    }

    #[inline]
    pub fn h_edge(&self, r: isize, c: isize) -> usize {
        self.site(r, c)
    }

    #[inline]
    pub fn v_edge(&self, r: isize, c: isize) -> usize {
        self.n_cells() + self.site(r, c)
    }

    pub fn edge_coords(&self, e: usize) -> (Orientation, usize, usize) {
        if e < self.n_cells() {
            let (r, c) = self.coords(e);
            (Orientation::Horizontal, r, c)
        } else {
            let (r, c) = self.coords(e - self.n_cells());
            (Orientation::Vertical, r, c)
        }
    }

    /// Star of a vertex in `(N, E, S, W)` order.
    pub fn vertex_edges(&self, v: usize) -> [usize; 4] {
        let (r, c) = self.coords(v);
        let (r, c) = (r as isize, c as isize);
        [
            self.v_edge(r - 1, c),
            self.h_edge(r, c),
            self.v_edge(r, c),
            self.h_edge(r, c - 1),
        ]
    }

    /// Boundary of a plaquette in `(N, E, S, W)` order.
    pub fn plaquette_edges(&self, p: usize) -> [usize; 4] {
        let (r, c) = self.coords(p);
        let (r, c) = (r as isize, c as isize);
        [
            self.h_edge(r, c),
            self.v_edge(r, c + 1),
            self.h_edge(r + 1, c),
            self.v_edge(r, c),
        ]
    }

    /// The two endpoint vertices, in increasing coordinate direction.
    pub fn edge_vertices(&self, e: usize) -> [usize; 2] {
        let (o, r, c) = self.edge_coords(e);
        let (r, c) = (r as isize, c as isize);
        match o {
            Orientation::Horizontal => [self.site(r, c), self.site(r, c + 1)],
            Orientation::Vertical => [self.site(r, c), self.site(r + 1, c)],
        }
    }

    /// The two plaquettes sharing the edge (north/west one first).
    pub fn edge_plaquettes(&self, e: usize) -> [usize; 2] {
        let (o, r, c) = self.edge_coords(e);
        let (r, c) = (r as isize, c as isize);
        match o {
            Orientation::Horizontal => [self.site(r - 1, c), self.site(r, c)],
            Orientation::Vertical => [self.site(r, c - 1), self.site(r, c)],
        }
    }

    /// Minimal non-contractible loop.
    ///
    /// A horizontal cycle is `Z`-able along row `offset`; a horizontal co-cycle
    /// runs left to right across the vertical edges of row `offset`. Vertical
    /// loops use column `offset`.
    pub fn handle_cycle(
        &self,
        orientation: Orientation,
        kind: LoopKind,
        offset: usize,
    ) -> Result<Vec<usize>, LatticeError> {
        let limit = match orientation {
            Orientation::Horizontal => self.rows,
            Orientation::Vertical => self.cols,
        };
        if offset >= limit {
            return Err(LatticeError::OffsetOutOfRange { offset, limit });
        }
        let k = offset as isize;
        let edges = match (orientation, kind) {
            (Orientation::Horizontal, LoopKind::Cycle) => {
                (0..self.cols as isize).map(|c| self.h_edge(k, c)).collect()
            }
            (Orientation::Horizontal, LoopKind::Cocycle) => {
                (0..self.cols as isize).map(|c| self.v_edge(k, c)).collect()
            }
            (Orientation::Vertical, LoopKind::Cycle) => {
                (0..self.rows as isize).map(|r| self.v_edge(r, k)).collect()
            }
            (Orientation::Vertical, LoopKind::Cocycle) => {
                (0..self.rows as isize).map(|r| self.h_edge(r, k)).collect()
            }
        };
        Ok(edges)
    }

    /// Neighbours of a node as `(neighbour, edge)` pairs.
    pub fn neighbours(&self, node: Node) -> [(Node, usize); 4] {
        match node {
            Node::Vertex(v) => {
                let edges = self.vertex_edges(v);
                edges.map(|e| {
                    let [a, b] = self.edge_vertices(e);
                    (Node::Vertex(if a == v { b } else { a }), e)
                })
            }
            Node::Plaquette(p) => {
                let edges = self.plaquette_edges(p);
                edges.map(|e| {
                    let [a, b] = self.edge_plaquettes(e);
                    (Node::Plaquette(if a == p { b } else { a }), e)
                })
            }
        }
    }

    /// Wrap-around Manhattan distance between two sites of the same kind.
    pub fn torus_distance(&self, a: usize, b: usize) -> usize {
        let (ra, ca) = self.coords(a);
        let (rb, cb) = self.coords(b);
        let dr = ra.abs_diff(rb);
        let dc = ca.abs_diff(cb);
        dr.min(self.rows - dr) + dc.min(self.cols - dc)
    }

    /// Uniform-cost search on the primal or dual lattice.
    ///
    /// `penalty[e]` is the cost of using edge `e` (`None` = impassable); ties
    /// are broken toward the lowest edge index.
    pub fn shortest_path(
        &self,
        from: Node,
        to: Node,
        penalty: &[Option<u32>],
    ) -> Result<Path, LatticeError> {
        let (src, dst, dual) = match (from, to) {
            (Node::Vertex(a), Node::Vertex(b)) => (a, b, false),
            (Node::Plaquette(a), Node::Plaquette(b)) => (a, b, true),
            _ => return Err(LatticeError::MixedEndpoints),
        };
        let node = |i: usize| if dual { Node::Plaquette(i) } else { Node::Vertex(i) };
        let idx = |n: Node| match n {
            Node::Vertex(i) | Node::Plaquette(i) => i,
        };
        let n = self.n_cells();
        let mut dist = vec![u64::MAX; n];
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[src] = 0;
        heap.push(Reverse((0u64, src)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            if u == dst {
                break;
            }
            for (nb, e) in self.neighbours(node(u)) {
                let Some(w) = penalty[e] else { continue };
                let v = idx(nb);
                if done[v] {
                    continue;
                }
                let nd = d + u64::from(w);
                let better = nd < dist[v]
                    || (nd == dist[v] && parent[v].is_some_and(|(_, pe)| e < pe));
                if better {
                    dist[v] = nd;
                    parent[v] = Some((u, e));
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        if dist[dst] == u64::MAX {
            return Err(LatticeError::Unreachable);
        }
        let mut steps = Vec::new();
        let mut cur = dst;
        while cur != src {
            let (prev, e) = parent[cur].expect("parent chain");
            steps.push(Step { from: node(prev), to: node(cur), edge: e });
            cur = prev;
        }
        steps.reverse();
        Ok(Path { steps, weight: dist[dst] })
    }

    pub fn unit_penalty(&self) -> Vec<Option<u32>> {
        vec![Some(1); self.n_edges()]
    }
}

/// What a region stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionRole {
    CondensedDs,
    TwistStrip,
    BulkTc,
}

impl RegionRole {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionRole::CondensedDs => "condensed-ds",
            RegionRole::TwistStrip => "twist-strip",
            RegionRole::BulkTc => "bulk-tc",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "condensed-ds" => Some(RegionRole::CondensedDs),
            "twist-strip" => Some(RegionRole::TwistStrip),
            "bulk-tc" => Some(RegionRole::BulkTc),
            _ => None,
        }
    }
}

/// A set of unit cells. Vertex `(r, c)` and plaquette `(r, c)` belong to the
/// region with cell `(r, c)`; an edge belongs iff both its endpoint vertices do.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RegionMask {
    pub role: RegionRole,
    cells: Vec<bool>,
}

impl RegionMask {
    pub fn empty(lattice: &TorusLattice, role: RegionRole) -> Self {
        RegionMask { role, cells: vec![false; lattice.n_cells()] }
    }

    pub fn full(lattice: &TorusLattice, role: RegionRole) -> Self {
        RegionMask { role, cells: vec![true; lattice.n_cells()] }
    }

    pub fn from_cells(lattice: &TorusLattice, role: RegionRole, cells: &[usize]) -> Self {
        let mut m = Self::empty(lattice, role);
        for &c in cells {
            m.cells[c] = true;
        }
        m
    }

    /// `height x width` block with north-west corner at `(r0, c0)`, wrapping.
    pub fn rect(
        lattice: &TorusLattice,
        role: RegionRole,
        r0: usize,
        c0: usize,
        height: usize,
        width: usize,
    ) -> Self {
        let mut m = Self::empty(lattice, role);
        for dr in 0..height {
            for dc in 0..width {
                m.cells[lattice.site((r0 + dr) as isize, (c0 + dc) as isize)] = true;
            }
        }
        m
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn contains_cell(&self, cell: usize) -> bool {
        self.cells[cell]
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.cells[v]
    }

    pub fn contains_plaquette(&self, p: usize) -> bool {
        self.cells[p]
    }

    pub fn contains_edge(&self, lattice: &TorusLattice, e: usize) -> bool {
        lattice.edge_vertices(e).iter().all(|&v| self.cells[v])
    }

    pub fn cells(&self) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i]).collect()
    }

    pub fn is_empty(&self) -> bool {
        !self.cells.iter().any(|&b| b)
    }

    pub fn is_full(&self) -> bool {
        self.cells.iter().all(|&b| b)
    }

    /// True when the region occupies every row or every column, i.e. it may
    /// close around a handle.
    pub fn spans_handle(&self, lattice: &TorusLattice) -> bool {
        let mut rows = vec![false; lattice.rows()];
        let mut cols = vec![false; lattice.cols()];
        for c in self.cells() {
            let (r, k) = lattice.coords(c);
            rows[r] = true;
            cols[k] = true;
        }
        rows.iter().all(|&b| b) || cols.iter().all(|&b| b)
    }

    /// Vertices on either side of the region boundary (a lattice neighbour
    /// lies on the other side).
    pub fn boundary_vertices(&self, lattice: &TorusLattice) -> Vec<usize> {
        (0..lattice.n_vertices())
            .filter(|&v| {
                lattice
                    .neighbours(Node::Vertex(v))
                    .iter()
                    .any(|(nb, _)| matches!(nb, Node::Vertex(w) if self.cells[*w] != self.cells[v]))
            })
            .collect()
    }

    /// Edges with an endpoint closer than `width` (in lattice steps) to the
    /// boundary vertex set; `width = 1` gives the edges touching the boundary.
    pub fn boundary_zone(&self, lattice: &TorusLattice, width: usize) -> Vec<usize> {
        let boundary = self.boundary_vertices(lattice);
        let mut dist = vec![usize::MAX; lattice.n_vertices()];
        let mut queue = std::collections::VecDeque::new();
        for v in boundary {
            dist[v] = 0;
            queue.push_back(v);
        }
        while let Some(v) = queue.pop_front() {
            for (nb, _) in lattice.neighbours(Node::Vertex(v)) {
                if let Node::Vertex(w) = nb {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        (0..lattice.n_edges())
            .filter(|&e| lattice.edge_vertices(e).iter().any(|&v| dist[v] < width))
            .collect()
    }

    /// Per-edge penalties: `inside` for edges of the region, 1 elsewhere.
    pub fn penalty(&self, lattice: &TorusLattice, inside: Option<u32>) -> Vec<Option<u32>> {
        (0..lattice.n_edges())
            .map(|e| if self.contains_edge(lattice, e) { inside } else { Some(1) })
            .collect()
    }
}
