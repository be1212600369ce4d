//! Lattice-point counts of moment polytopes by three independent routes:
//! box enumeration, summing slice simplices, and binomial closed forms.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decimal;
use crate::error::{Error, Result};
use crate::polytope::{bounding_box, BoundingBox, FibrationParams, HPolytope, LatticePoint, SimplexParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMethod {
    BruteForce,
    SliceSum,
    ClosedForm,
}

impl fmt::Display for CountMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountMethod::BruteForce => "brute_force",
            CountMethod::SliceSum => "slice_sum",
            CountMethod::ClosedForm => "closed_form",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountResult {
    #[serde(with = "decimal::biguint")]
    pub value: BigUint,
    pub method: CountMethod,
}

impl CountResult {
    fn new(value: BigUint, method: CountMethod) -> Self {
        Self { value, method }
    }
}

/// Lattice points of a polytope read as monomial exponents, in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MonomialBasis {
    pub exponents: Vec<LatticePoint>,
}

impl MonomialBasis {
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }
}

/// `C(n, k)` by the multiplicative formula; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Walks every cell of `bbox` restricted to `x[last] = height` and counts
/// those inside the polytope.
fn count_layer(poly: &HPolytope, bbox: &BoundingBox, height: i64) -> u64 {
    let dim = poly.dim();
    let last = dim - 1;
    let mut x = bbox.lower.clone();
    x[last] = height;
    if last == 0 {
        return poly.rows().iter().all(|r| r.is_satisfied(&x)) as u64;
    }
    let mut count = 0u64;
    loop {
        if poly.rows().iter().all(|r| r.is_satisfied(&x)) {
            count += 1;
        }
        // odometer over coordinates 0..last, fastest at last - 1
        let mut i = last;
        loop {
            if i == 0 {
                return count;
            }
            i -= 1;
            if x[i] < bbox.upper[i] {
                x[i] += 1;
                break;
            }
            x[i] = bbox.lower[i];
        }
    }
}

/// Per-height lattice counts along the last coordinate, lowest height first.
/// For the fibration polytope these are the slice counts `#Δ(t)`.
pub fn layer_counts(poly: &HPolytope) -> Result<Vec<(i64, u64)>> {
    let bbox = bounding_box(poly)?;
    if bbox.is_empty() {
        return Ok(Vec::new());
    }
    let last = poly.dim() - 1;
    Ok((bbox.lower[last]..=bbox.upper[last])
        .into_par_iter()
        .map(|h| (h, count_layer(poly, &bbox, h)))
        .collect())
}

/// Enumerates the bounding box and tests membership of every cell. Layers
/// along the last coordinate are counted on the global rayon pool.
pub fn count_brute_force(poly: &HPolytope) -> Result<CountResult> {
    let bbox = bounding_box(poly)?;
    Ok(CountResult::new(
        sum_layers(poly, &bbox, |heights, f| heights.into_par_iter().map(f).sum()),
        CountMethod::BruteForce,
    ))
}

/// Same as [`count_brute_force`] on a dedicated pool of `workers` threads
/// (`workers == 1` runs inline). The result does not depend on `workers`.
pub fn count_brute_force_with_workers(poly: &HPolytope, workers: usize) -> Result<CountResult> {
    let bbox = bounding_box(poly)?;
    let value = if workers <= 1 {
        sum_layers(poly, &bbox, |heights, f| heights.map(f).sum())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
        pool.install(|| sum_layers(poly, &bbox, |heights, f| heights.into_par_iter().map(f).sum()))
    };
    Ok(CountResult::new(value, CountMethod::BruteForce))
}

fn sum_layers<F>(poly: &HPolytope, bbox: &BoundingBox, reduce: F) -> BigUint
where
    F: FnOnce(std::ops::RangeInclusive<i64>, &(dyn Fn(i64) -> BigUint + Sync)) -> BigUint,
{
    if bbox.is_empty() {
        return BigUint::zero();
    }
    let last = poly.dim() - 1;
    let layer = |h: i64| BigUint::from(count_layer(poly, bbox, h));
    reduce(bbox.lower[last]..=bbox.upper[last], &layer)
}

/// Fails with [`Error::ResourceLimit`] when enumerating `poly` would visit
/// more than `max_cells` box cells.
pub fn ensure_cell_budget(poly: &HPolytope, max_cells: u64) -> Result<()> {
    let cells = bounding_box(poly)?.cell_count();
    if cells > BigUint::from(max_cells) {
        return Err(Error::ResourceLimit(format!(
            "bounding box has {cells} cells, limit is {max_cells}"
        )));
    }
    Ok(())
}

/// `#(Δ^N_b ∩ Z^N) = C(b + N, N)`.
pub fn count_simplex_closed_form(p: SimplexParams) -> CountResult {
    CountResult::new(binomial(p.scale() + p.dim(), p.dim()), CountMethod::ClosedForm)
}

/// Sum over heights `t = 0..=b` of the slice simplex counts
/// `C(a + n(b − t) + d, d)`.
pub fn count_slice_sum(p: FibrationParams) -> CountResult {
    let d = p.d();
    let value = (0..=p.b())
        .map(|t| {
            let scale = p.slice_scale(t).expect("t ranges over 0..=b");
            binomial(scale + d, d)
        })
        .sum();
    CountResult::new(value, CountMethod::SliceSum)
}

/// Closed-form count: `(a + 1 + nb/2)(b + 1)` on surfaces, the product and
/// blow-up binomials for `n ∈ {0, 1}`, and the binomial sum
/// `Σ_{i=0}^{b} C(a + d + n·i, d)` otherwise.
pub fn count_closed_form(p: FibrationParams) -> CountResult {
    let (d, a, b, n) = (p.d(), p.a(), p.b(), p.n());
    let value = if d == 1 {
        crate::quantization::hirzebruch_surface_closed_form(a, b, n)
            .expect("surface formula is integral for all nonnegative inputs")
    } else if n == 0 {
        binomial(a + d, d) * (b + 1)
    } else if n == 1 {
        binomial(a + b + d + 1, d + 1) - binomial(a + d, d + 1)
    } else {
        (0..=b).map(|i| binomial(a + d + n * i, d)).sum()
    };
    CountResult::new(value, CountMethod::ClosedForm)
}

/// All lattice points of `poly` in lexicographic order.
pub fn monomial_basis(poly: &HPolytope) -> Result<MonomialBasis> {
    let bbox = bounding_box(poly)?;
    let mut exponents = Vec::new();
    if bbox.is_empty() {
        return Ok(MonomialBasis { exponents });
    }
    let dim = poly.dim();
    let mut x = bbox.lower.clone();
    'outer: loop {
        if poly.rows().iter().all(|r| r.is_satisfied(&x)) {
            exponents.push(LatticePoint(x.clone()));
        }
        let mut i = dim;
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            if x[i] < bbox.upper[i] {
                x[i] += 1;
                break;
            }
            x[i] = bbox.lower[i];
        }
    }
    Ok(MonomialBasis { exponents })
}
