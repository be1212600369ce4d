//! Moment polytopes of complex projective spaces and generalized Hirzebruch
//! fibrations, stored as integer half-space systems.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters `(N, b)` of the scaled projective space `(CP^N, b·ω_FS)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSimplexParams")]
pub struct SimplexParams {
    #[serde(rename = "N")]
    dim: u64,
    #[serde(rename = "b")]
    scale: u64,
}

#[derive(Deserialize)]
struct RawSimplexParams {
    #[serde(rename = "N")]
    dim: u64,
    b: u64,
}

impl TryFrom<RawSimplexParams> for SimplexParams {
    type Error = Error;
    fn try_from(raw: RawSimplexParams) -> Result<Self> {
        Self::new(raw.dim, raw.b)
    }
}

impl SimplexParams {
    pub fn new(dim: u64, scale: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        if scale > i64::MAX as u64 || dim > u32::MAX as u64 {
            return Err(Error::InvalidParameter(format!(
                "simplex (N={dim}, b={scale}) exceeds the supported range"
            )));
        }
        Ok(Self { dim, scale })
    }

    /// Complex dimension `N`.
    pub const fn dim(&self) -> u64 {
        self.dim
    }

    /// Symplectic scale `b`, which is also the simplex's edge length.
    pub const fn scale(&self) -> u64 {
        self.scale
    }
}

/// Parameters `(d, a, b, n)` of a generalized Hirzebruch fibration with
/// symplectic form `ω_{a,b}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFibrationParams")]
pub struct FibrationParams {
    d: u64,
    a: u64,
    b: u64,
    n: u64,
}

#[derive(Deserialize)]
struct RawFibrationParams {
    d: u64,
    a: u64,
    b: u64,
    n: u64,
}

impl TryFrom<RawFibrationParams> for FibrationParams {
    type Error = Error;
    fn try_from(raw: RawFibrationParams) -> Result<Self> {
        Self::new(raw.d, raw.a, raw.b, raw.n)
    }
}

impl FibrationParams {
    /// Validates `d ≥ 1` and that the largest polytope coordinate
    /// `a + n·b + d` fits in a signed 64-bit lattice coordinate.
    pub fn new(d: u64, a: u64, b: u64, n: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("d must be at least 1".into()));
        }
        let top = n
            .checked_mul(b)
            .and_then(|x| x.checked_add(a))
            .and_then(|x| x.checked_add(d));
        match top {
            Some(t) if t <= i64::MAX as u64 && d <= u32::MAX as u64 => {}
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "parameters (d={d}, a={a}, b={b}, n={n}) exceed the supported range"
                )))
            }
        }
        Ok(Self { d, a, b, n })
    }

    pub const fn d(&self) -> u64 {
        self.d
    }

    pub const fn a(&self) -> u64 {
        self.a
    }

    pub const fn b(&self) -> u64 {
        self.b
    }

    pub const fn n(&self) -> u64 {
        self.n
    }

    /// Same family with a different twist.
    pub fn with_twist(&self, n: u64) -> Result<Self> {
        Self::new(self.d, self.a, self.b, n)
    }

    /// `a + n·b`, the edge length of the bottom slice.
    pub const fn base_edge(&self) -> u64 {
        self.a + self.n * self.b
    }

    /// Scale `L_t = a + n(b − t)` of the slice at height `t`.
    pub fn slice_scale(&self, t: u64) -> Result<u64> {
        if t > self.b {
            return Err(Error::SliceOutOfRange { t, b: self.b });
        }
        Ok(self.a + self.n * (self.b - t))
    }
}

impl fmt::Display for FibrationParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(d={}, a={}, b={}, n={})", self.d, self.a, self.b, self.n)
    }
}

/// Integer lattice point; also read as a monomial exponent tuple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn origin(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

/// One inequality `coeffs · x ≤ bound`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HalfSpace {
    pub coeffs: Vec<i64>,
    pub bound: i64,
}

impl HalfSpace {
    pub fn new(coeffs: Vec<i64>, bound: i64) -> Self {
        Self { coeffs, bound }
    }

    fn lhs(&self, x: &[i64]) -> i128 {
        self.coeffs
            .iter()
            .zip(x)
            .map(|(&c, &v)| c as i128 * v as i128)
            .sum()
    }

    pub fn is_satisfied(&self, x: &[i64]) -> bool {
        self.lhs(x) <= self.bound as i128
    }

    pub fn is_tight(&self, x: &[i64]) -> bool {
        self.lhs(x) == self.bound as i128
    }
}

/// Polytope `{x : A·x ≤ c}` with exact integer data. Rows are kept exactly
/// as constructed, duplicates included.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawHPolytope")]
pub struct HPolytope {
    dim: usize,
    rows: Vec<HalfSpace>,
}

#[derive(Deserialize)]
struct RawHPolytope {
    dim: usize,
    rows: Vec<HalfSpace>,
}

impl TryFrom<RawHPolytope> for HPolytope {
    type Error = Error;
    fn try_from(raw: RawHPolytope) -> Result<Self> {
        Self::new(raw.dim, raw.rows)
    }
}

impl HPolytope {
    pub fn new(dim: usize, rows: Vec<HalfSpace>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("ambient dimension must be positive".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.coeffs.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.coeffs.len(),
            });
        }
        Ok(Self { dim, rows })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[HalfSpace] {
        &self.rows
    }

    /// Scales every bound by `k`, giving the `k`-th dilate of the polytope.
    pub fn dilate(&self, k: u64) -> Result<Self> {
        let k = i64::try_from(k).map_err(|_| Error::Overflow("dilating a polytope"))?;
        let rows = self
            .rows
            .iter()
            .map(|r| {
                r.bound
                    .checked_mul(k)
                    .map(|bound| HalfSpace::new(r.coeffs.clone(), bound))
                    .ok_or(Error::Overflow("dilating a polytope"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dim: self.dim, rows })
    }
}

fn unit(dim: usize, i: usize, value: i64) -> Vec<i64> {
    let mut v = vec![0; dim];
    v[i] = value;
    v
}

/// `Δ^N_b = {x ∈ R^N : x_i ≥ 0, Σ x_i ≤ b}`.
pub fn build_simplex(p: SimplexParams) -> HPolytope {
    let dim = p.dim() as usize;
    let mut rows: Vec<HalfSpace> = (0..dim).map(|i| HalfSpace::new(unit(dim, i, -1), 0)).collect();
    rows.push(HalfSpace::new(vec![1; dim], p.scale() as i64));
    HPolytope { dim, rows }
}

/// Moment polytope of the fibration:
/// `x_i ≥ 0`, `x_{d+1} ≤ b`, and `Σ_{i≤d} x_i + n·x_{d+1} ≤ a + n·b`.
pub fn build_hirzebruch_polytope(p: FibrationParams) -> HPolytope {
    let d = p.d() as usize;
    let dim = d + 1;
    let mut rows: Vec<HalfSpace> = (0..dim).map(|i| HalfSpace::new(unit(dim, i, -1), 0)).collect();
    rows.push(HalfSpace::new(unit(dim, d, 1), p.b() as i64));
    let mut slanted = vec![1; dim];
    slanted[d] = p.n() as i64;
    rows.push(HalfSpace::new(slanted, p.base_edge() as i64));
    HPolytope { dim, rows }
}

/// Vertex set of the fibration polytope, deduplicated and sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSet {
    pub vertices: Vec<LatticePoint>,
    /// Set when coincident fixed-point images leave fewer than `2d + 2` vertices.
    pub degenerate: bool,
}

/// Images of the `2d + 2` torus-fixed points: `0`, `b·e_{d+1}`,
/// `(a + n·b)·e_i` and `a·e_i + b·e_{d+1}` for `i = 1..d`.
pub fn vertices(p: FibrationParams) -> VertexSet {
    let d = p.d() as usize;
    let dim = d + 1;
    let (a, b, top) = (p.a() as i64, p.b() as i64, p.base_edge() as i64);
    let mut set = BTreeSet::new();
    set.insert(LatticePoint::origin(dim));
    set.insert(LatticePoint(unit(dim, d, b)));
    for i in 0..d {
        set.insert(LatticePoint(unit(dim, i, top)));
        let mut upper = unit(dim, i, a);
        upper[d] = b;
        set.insert(LatticePoint(upper));
    }
    let degenerate = set.len() < 2 * d + 2;
    VertexSet {
        vertices: set.into_iter().collect(),
        degenerate,
    }
}

pub fn contains(poly: &HPolytope, x: &LatticePoint) -> Result<bool> {
    if x.dim() != poly.dim {
        return Err(Error::DimensionMismatch {
            expected: poly.dim,
            got: x.dim(),
        });
    }
    Ok(poly.rows.iter().all(|r| r.is_satisfied(x.coords())))
}

/// The slice of the fibration polytope at height `x_{d+1} = t`, a standard
/// `d`-simplex of scale `a + n(b − t)`.
pub fn slice(p: FibrationParams, t: u64) -> Result<SimplexParams> {
    SimplexParams::new(p.d(), p.slice_scale(t)?)
}

/// Integer box `[lower, upper]` containing every lattice point of a polytope.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
}

impl BoundingBox {
    pub fn is_empty(&self) -> bool {
        self.lower.iter().zip(&self.upper).any(|(l, u)| l > u)
    }

    /// Number of integer cells in the box.
    pub fn cell_count(&self) -> BigUint {
        if self.is_empty() {
            return BigUint::from(0u32);
        }
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| BigUint::from((u as i128 - l as i128 + 1) as u128))
            .product()
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct WideRow {
    coeffs: Vec<i128>,
    bound: i128,
}

impl WideRow {
    fn normalized(mut self) -> Self {
        let g = self
            .coeffs
            .iter()
            .fold(0i128, |g, &c| g.gcd(&c));
        if g > 1 {
            for c in &mut self.coeffs {
                *c /= g;
            }
            // Integer points only: tighten the bound to the lattice.
            self.bound = Integer::div_floor(&self.bound, &g);
        }
        self
    }
}

/// Exact per-coordinate bounds by Fourier–Motzkin projection onto each axis.
///
/// Every row is gcd-normalized with its bound floored, so the box is tight
/// for the integer hull of each projection. An infeasible system yields an
/// empty box (`lower > upper` on every coordinate).
pub fn bounding_box(poly: &HPolytope) -> Result<BoundingBox> {
    let dim = poly.dim;
    let base: Vec<WideRow> = poly
        .rows
        .iter()
        .map(|r| WideRow {
            coeffs: r.coeffs.iter().map(|&c| c as i128).collect(),
            bound: r.bound as i128,
        })
        .collect();

    let mut lower = Vec::with_capacity(dim);
    let mut upper = Vec::with_capacity(dim);
    for axis in 0..dim {
        let mut rows = base.clone();
        for eliminate in (0..dim).filter(|&j| j != axis) {
            rows = eliminate_variable(rows, eliminate)?;
        }
        let mut lo: Option<i128> = None;
        let mut hi: Option<i128> = None;
        let mut infeasible = false;
        for r in &rows {
            let c = r.coeffs[axis];
            match c.signum() {
                1 => {
                    let v = Integer::div_floor(&r.bound, &c);
                    hi = Some(hi.map_or(v, |h| h.min(v)));
                }
                -1 => {
                    let v = Integer::div_ceil(&r.bound, &c);
                    lo = Some(lo.map_or(v, |l| l.max(v)));
                }
                _ => infeasible |= r.bound < 0,
            }
        }
        if infeasible {
            return Ok(BoundingBox {
                lower: vec![0; dim],
                upper: vec![-1; dim],
            });
        }
        let (lo, hi) = match (lo, hi) {
            (Some(l), Some(h)) => (l, h),
            _ => return Err(Error::Unbounded(axis)),
        };
        lower.push(i64::try_from(lo).map_err(|_| Error::Overflow("bounding a polytope"))?);
        upper.push(i64::try_from(hi).map_err(|_| Error::Overflow("bounding a polytope"))?);
    }
    Ok(BoundingBox { lower, upper })
}

fn eliminate_variable(rows: Vec<WideRow>, j: usize) -> Result<Vec<WideRow>> {
    let (mut pos, mut neg, mut kept) = (Vec::new(), Vec::new(), Vec::new());
    for r in rows {
        match r.coeffs[j].signum() {
            1 => pos.push(r),
            -1 => neg.push(r),
            _ => kept.push(r),
        }
    }
    for p in &pos {
        for q in &neg {
            let (sp, sq) = (-q.coeffs[j], p.coeffs[j]);
            let combine = |x: i128, y: i128| {
                x.checked_mul(sp)
                    .zip(y.checked_mul(sq))
                    .and_then(|(u, v)| u.checked_add(v))
                    .ok_or(Error::Overflow("projecting a polytope"))
            };
            let coeffs = p
                .coeffs
                .iter()
                .zip(&q.coeffs)
                .map(|(&x, &y)| combine(x, y))
                .collect::<Result<Vec<_>>>()?;
            let bound = combine(p.bound, q.bound)?;
            kept.push(WideRow { coeffs, bound }.normalized());
        }
    }
    let mut seen = std::collections::HashSet::new();
    kept.retain(|r| seen.insert(r.clone()));
    Ok(kept)
}
