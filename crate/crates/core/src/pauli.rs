//! Phase-tracked generalized Pauli operators over Z_2 and Z_4 qudits.
//!
//! An operator is stored in the canonical form `i^phase * prod_j X_j^{a_j} Z_j^{b_j}`
//! with `X` to the left of `Z` on every site. The clock and shift matrices are
//! `X|k> = |k+1>` and `Z|k> = w^k |k>` with `w = exp(2 pi i / N)`, so that
//! `Z X = w X Z`. For `N = 2` the phase group still runs over powers of `i`,
//! which is what makes `Y = i X Z` representable.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("qudit dimension mismatch: {0:?} vs {1:?}")]
    DimensionMismatch(QuditDim, QuditDim),
    #[error("site count mismatch: {0} vs {1}")]
    SiteCountMismatch(usize, usize),
    #[error("site {site} out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("unsupported qudit dimension {0} (only 2 and 4)")]
    UnsupportedDimension(u8),
    #[error("malformed Pauli literal: {0}")]
    Parse(String),
}

/// Local Hilbert space dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuditDim {
    Qubit,
    Ququart,
}

impl QuditDim {
    pub fn from_modulus(n: u8) -> Result<Self, PauliError> {
        match n {
            2 => Ok(QuditDim::Qubit),
            4 => Ok(QuditDim::Ququart),
            other => Err(PauliError::UnsupportedDimension(other)),
        }
    }

    #[inline]
    pub fn modulus(self) -> u8 {
        match self {
            QuditDim::Qubit => 2,
            QuditDim::Ququart => 4,
        }
    }

    /// Exponent of `i` corresponding to one power of `w`, i.e. `4 / N`.
    #[inline]
    pub fn phase_step(self) -> u8 {
        4 / self.modulus()
    }
}

/// The four two-qubit Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];
}

/// Signs of `(X1 X2, Y1 Y2, Z1 Z2)` stabilizing the given Bell state.
pub fn bell_stabilizer_signs(state: BellState) -> [i8; 3] {
    match state {
        BellState::PhiPlus => [1, -1, 1],
        BellState::PhiMinus => [-1, 1, 1],
        BellState::PsiPlus => [1, 1, -1],
        BellState::PsiMinus => [-1, -1, -1],
    }
}

/// The signed stabilizers `(s_x X1X2, s_y Y1Y2, s_z Z1Z2)` of a Bell state as
/// two-site qubit operators.
pub fn bell_stabilizers(state: BellState) -> [PauliOperator; 3] {
    let signs = bell_stabilizer_signs(state);
    let dim = QuditDim::Qubit;
    let xx = PauliOperator::from_parts(dim, vec![1, 1], vec![0, 0], 0);
    // Y = i X Z
    let y = PauliOperator::from_parts(dim, vec![1], vec![1], 1);
    let yy = y.tensor(&y);
    let zz = PauliOperator::from_parts(dim, vec![0, 0], vec![1, 1], 0);
    let sign = |p: PauliOperator, s: i8| if s < 0 { p.with_phase_shift(2) } else { p };
    [sign(xx, signs[0]), sign(yy, signs[1]), sign(zz, signs[2])]
}

/// Phase-tracked tensor product of `X^a Z^b` factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliOperator {
    dim: QuditDim,
    x: Vec<u8>,
    z: Vec<u8>,
    phase: u8,
}

impl PauliOperator {
    pub fn identity(dim: QuditDim, n_sites: usize) -> Self {
        PauliOperator {
            dim,
            x: vec![0; n_sites],
            z: vec![0; n_sites],
            phase: 0,
        }
    }

    /// Builds an operator from raw exponents; everything is reduced to canonical range.
    pub fn from_parts(dim: QuditDim, x: Vec<u8>, z: Vec<u8>, phase: u8) -> Self {
        assert_eq!(x.len(), z.len(), "x and z exponent vectors must match");
        let n = dim.modulus();
        PauliOperator {
            dim,
            x: x.into_iter().map(|a| a % n).collect(),
            z: z.into_iter().map(|b| b % n).collect(),
            phase: phase % 4,
        }
    }

    /// `X^a Z^b` on one site.
    pub fn single(dim: QuditDim, n_sites: usize, site: usize, a: u8, b: u8) -> Self {
        let mut p = Self::identity(dim, n_sites);
        p.set_site(site, a, b);
        p
    }

    pub fn x_on(dim: QuditDim, n_sites: usize, sites: &[usize], power: u8) -> Self {
        let mut p = Self::identity(dim, n_sites);
        for &s in sites {
            let a = p.x[s];
            p.x[s] = (a + power) % dim.modulus();
        }
        p
    }

    pub fn z_on(dim: QuditDim, n_sites: usize, sites: &[usize], power: u8) -> Self {
        let mut p = Self::identity(dim, n_sites);
        for &s in sites {
            let b = p.z[s];
            p.z[s] = (b + power) % dim.modulus();
        }
        p
    }

    #[inline]
    pub fn dim(&self) -> QuditDim {
        self.dim
    }

    #[inline]
    pub fn modulus(&self) -> u8 {
        self.dim.modulus()
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.x.len()
    }

    #[inline]
    pub fn phase(&self) -> u8 {
        self.phase
    }

    #[inline]
    pub fn x_exps(&self) -> &[u8] {
        &self.x
    }

    #[inline]
    pub fn z_exps(&self) -> &[u8] {
        &self.z
    }

    #[inline]
    pub fn site(&self, j: usize) -> (u8, u8) {
        (self.x[j], self.z[j])
    }

    /// Overwrites the exponents on one site (phase untouched).
    pub fn set_site(&mut self, j: usize, a: u8, b: u8) {
        let n = self.modulus();
        self.x[j] = a % n;
        self.z[j] = b % n;
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    pub fn with_phase_shift(mut self, shift: u8) -> Self {
        self.phase = (self.phase + shift) % 4;
        self
    }

    /// Same symplectic part with phase zero.
    pub fn unsigned(&self) -> Self {
        self.clone().with_phase(0)
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .filter(|(a, b)| **a != 0 || **b != 0)
            .count()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n_sites())
            .filter(|&j| self.x[j] != 0 || self.z[j] != 0)
            .collect()
    }

    /// True when the symplectic part vanishes (any phase allowed).
    pub fn is_scalar(&self) -> bool {
        self.x.iter().all(|&a| a == 0) && self.z.iter().all(|&b| b == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.phase == 0 && self.is_scalar()
    }

    fn check_compatible(&self, other: &Self) -> Result<(), PauliError> {
        if self.dim != other.dim {
            return Err(PauliError::DimensionMismatch(self.dim, other.dim));
        }
        if self.n_sites() != other.n_sites() {
            return Err(PauliError::SiteCountMismatch(self.n_sites(), other.n_sites()));
        }
        Ok(())
    }

    /// Canonical form of `self * other`.
    pub fn multiply(&self, other: &Self) -> Result<Self, PauliError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.mul_assign_unchecked(other);
        Ok(out)
    }

    /// `self <- self * other`; panics on mismatched operands in debug builds.
    pub fn mul_assign_unchecked(&mut self, other: &Self) {
        debug_assert_eq!(self.dim, other.dim);
        debug_assert_eq!(self.n_sites(), other.n_sites());
        let n = self.modulus();
        // Z^b X^c = w^{bc} X^c Z^b
        let mut acc: u32 = 0;
        for j in 0..self.x.len() {
            let c = other.x[j];
            if c != 0 {
                acc += u32::from(self.z[j]) * u32::from(c);
            }
            self.x[j] = (self.x[j] + c) % n;
            self.z[j] = (self.z[j] + other.z[j]) % n;
        }
        let step = u32::from(self.dim.phase_step());
        self.phase = ((u32::from(self.phase) + u32::from(other.phase) + step * acc) % 4) as u8;
    }

    /// `self^k` for `k >= 0`.
    pub fn power(&self, k: u32) -> Self {
        let mut out = Self::identity(self.dim, self.n_sites());
        // Order divides 8 for N = 4 and 4 for N = 2.
        for _ in 0..(k % 8) {
            out.mul_assign_unchecked(self);
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.modulus();
        let step = u32::from(self.dim.phase_step());
        let mut phase = (4 - u32::from(self.phase)) % 4;
        let mut x = Vec::with_capacity(self.n_sites());
        let mut z = Vec::with_capacity(self.n_sites());
        for j in 0..self.n_sites() {
            let (a, b) = (self.x[j], self.z[j]);
            phase += step * u32::from(a) * u32::from(b);
            x.push((n - a) % n);
            z.push((n - b) % n);
        }
        PauliOperator {
            dim: self.dim,
            x,
            z,
            phase: (phase % 4) as u8,
        }
    }

    /// `k` with `self * other = i^k * other * self`.
    pub fn commutation_exponent(&self, other: &Self) -> Result<u8, PauliError> {
        self.check_compatible(other)?;
        Ok(self.commutation_exponent_unchecked(other))
    }

    pub fn commutation_exponent_unchecked(&self, other: &Self) -> u8 {
        let n = i64::from(self.modulus());
        let mut acc: i64 = 0;
        for j in 0..self.x.len() {
            acc += i64::from(self.z[j]) * i64::from(other.x[j])
                - i64::from(self.x[j]) * i64::from(other.z[j]);
        }
        let acc = acc.rem_euclid(n);
        ((acc * i64::from(self.dim.phase_step())) % 4) as u8
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.commutation_exponent_unchecked(other) == 0
    }

    /// Tensor product `self (x) other`, with `other`'s sites appended.
    pub fn tensor(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut x = self.x.clone();
        x.extend_from_slice(&other.x);
        let mut z = self.z.clone();
        z.extend_from_slice(&other.z);
        PauliOperator {
            dim: self.dim,
            x,
            z,
            phase: (self.phase + other.phase) % 4,
        }
    }

    /// Symplectic vector `(x_0, z_0, x_1, z_1, ...)` with sites interleaved.
    pub fn symplectic(&self) -> Vec<u8> {
        let mut v = Vec::with_capacity(2 * self.n_sites());
        for j in 0..self.n_sites() {
            v.push(self.x[j]);
            v.push(self.z[j]);
        }
        v
    }

    pub fn from_symplectic(dim: QuditDim, v: &[u8], phase: u8) -> Self {
        let n_sites = v.len() / 2;
        let x = (0..n_sites).map(|j| v[2 * j]).collect();
        let z = (0..n_sites).map(|j| v[2 * j + 1]).collect();
        Self::from_parts(dim, x, z, phase)
    }

    /// Parses the literal format, e.g. `i^1 X3 Z3@e17 X1@e2`.
    pub fn parse_literal(s: &str, dim: QuditDim, n_sites: usize) -> Result<Self, PauliError> {
        let mut op = Self::identity(dim, n_sites);
        let mut pending: Vec<(char, u8)> = Vec::new();
        let bad = |msg: &str| PauliError::Parse(format!("{msg} in {s:?}"));
        for (i, tok) in s.split_whitespace().enumerate() {
            if i == 0 {
                if let Some(rest) = tok.strip_prefix("i^") {
                    let k: u8 = rest.parse().map_err(|_| bad("bad phase"))?;
                    op.phase = k % 4;
                    continue;
                }
            }
            if tok == "I" {
                continue;
            }
            let (ops, site) = match tok.split_once('@') {
                Some((o, e)) => (o, Some(e)),
                None => (tok, None),
            };
            let mut chars = ops.chars();
            let kind = chars.next().ok_or_else(|| bad("empty factor"))?;
            if kind != 'X' && kind != 'Z' {
                return Err(bad("unknown factor"));
            }
            let digits: String = chars.collect();
            let power: u8 = if digits.is_empty() {
                1
            } else {
                digits.parse().map_err(|_| bad("bad exponent"))?
            };
            pending.push((kind, power));
            if let Some(e) = site {
                let j: usize = e
                    .strip_prefix('e')
                    .ok_or_else(|| bad("site must look like e<index>"))?
                    .parse()
                    .map_err(|_| bad("bad site index"))?;
                if j >= n_sites {
                    return Err(PauliError::SiteOutOfRange { site: j, n_sites });
                }
                let factor = {
                    let mut f = Self::identity(dim, n_sites);
                    for (k, p) in pending.drain(..) {
                        let g = if k == 'X' {
                            Self::single(dim, n_sites, j, p, 0)
                        } else {
                            Self::single(dim, n_sites, j, 0, p)
                        };
                        f.mul_assign_unchecked(&g);
                    }
                    f
                };
                op.mul_assign_unchecked(&factor);
            }
        }
        if !pending.is_empty() {
            return Err(bad("factor without site"));
        }
        Ok(op)
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.phase != 0 {
            parts.push(format!("i^{}", self.phase));
        }
        for j in 0..self.n_sites() {
            match (self.x[j], self.z[j]) {
                (0, 0) => {}
                (a, 0) => parts.push(format!("X{a}@e{j}")),
                (0, b) => parts.push(format!("Z{b}@e{j}")),
                (a, b) => parts.push(format!("X{a} Z{b}@e{j}")),
            }
        }
        if self.is_scalar() {
            parts.push("I".to_string());
        }
        write!(f, "{}", parts.join(" "))
    }
}

/// Parsing helper bundling the context a bare literal lacks.
pub struct LiteralContext {
    pub dim: QuditDim,
    pub n_sites: usize,
}

impl LiteralContext {
    pub fn parse(&self, s: &str) -> Result<PauliOperator, PauliError> {
        PauliOperator::parse_literal(s, self.dim, self.n_sites)
    }
}

impl FromStr for QuditDim {
    type Err = PauliError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n: u8 = s
            .trim()
            .parse()
            .map_err(|_| PauliError::Parse(format!("bad qudit dimension {s:?}")))?;
        QuditDim::from_modulus(n)
    }
}
