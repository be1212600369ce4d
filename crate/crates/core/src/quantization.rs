//! The quantization function `Q_{a,b,d}(n)` and its closed-form special
//! cases. Identity checks report exact residuals `lhs − rhs`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::counting::binomial;
use crate::decimal;
use crate::error::{Error, Result};
use crate::polytope::FibrationParams;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantizationRecord {
    pub params: FibrationParams,
    #[serde(with = "decimal::biguint")]
    pub dimension: BigUint,
    #[serde(flatten)]
    pub decomposition: Decomposition,
}

/// Split of `Q` into the base term `Q(CP^d, ω_a)` (height `i = 0`) and the
/// fiber terms `C(a + d + n·i, d)` for `i = 1..=b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    #[serde(with = "decimal::biguint")]
    pub base_term: BigUint,
    #[serde(with = "decimal::biguint_vec")]
    pub fiber_terms: Vec<BigUint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityName {
    /// `Q(0) = C(a + d, d)(b + 1)`
    UntwistedProduct,
    /// `Q(1) = C(a + b + d + 1, d + 1) − C(a + d, d + 1)`
    BlowupCount,
    /// `C(a+b+d+1, d+1) − C(a+d+1, d+1) + C(a+d, d)`
    BlowupDecompositionCorrected,
    /// `C(a+b+d+1, d+1) − C(a+d+1, d+1) + C(a+d−1, d−1)` as printed
    BlowupDecompositionPrinted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity_name: IdentityName,
    pub params: FibrationParams,
    #[serde(with = "decimal::bigint")]
    pub lhs: BigInt,
    #[serde(with = "decimal::bigint")]
    pub rhs: BigInt,
    #[serde(with = "decimal::bigint")]
    pub residual: BigInt,
}

impl IdentityReport {
    fn new(identity_name: IdentityName, params: FibrationParams, lhs: BigInt, rhs: BigInt) -> Self {
        let residual = &lhs - &rhs;
        Self {
            identity_name,
            params,
            lhs,
            rhs,
            residual,
        }
    }

    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

/// `Q_{a,b,d}(n) = Σ_{i=0}^{b} C(a + d + n·i, d)`.
pub fn quantization_dimension(p: FibrationParams) -> QuantizationRecord {
    let (d, a, n) = (p.d(), p.a(), p.n());
    let base_term = binomial(a + d, d);
    let fiber_terms: Vec<BigUint> = (1..=p.b()).map(|i| binomial(a + d + n * i, d)).collect();
    let dimension = fiber_terms.iter().fold(base_term.clone(), |acc, t| acc + t);
    QuantizationRecord {
        params: p,
        dimension,
        decomposition: Decomposition {
            base_term,
            fiber_terms,
        },
    }
}

/// `(a + 1 + nb/2)(b + 1)`, evaluated as `(2a + 2 + nb)(b + 1) / 2`.
pub fn hirzebruch_surface_closed_form(a: u64, b: u64, n: u64) -> Result<BigUint> {
    let twice = (BigUint::from(2 * (a as u128) + 2) + BigUint::from(n) * b) * (BigUint::from(b) + 1u32);
    let (q, r) = twice.div_rem(&BigUint::from(2u32));
    if !r.is_zero() {
        return Err(Error::NonIntegral(format!("(a={a}, b={b}, n={n}) gives {twice}/2")));
    }
    Ok(q)
}

fn signed(x: BigUint) -> BigInt {
    BigInt::from(x)
}

fn require_twist(p: FibrationParams, expected: u64) -> Result<()> {
    if p.n() != expected {
        return Err(Error::TwistMismatch { expected, got: p.n() });
    }
    Ok(())
}

/// Untwisted case: `Q(0) = Q(CP^d, ω_a) · Q(CP^1, ω_b)`.
pub fn untwisted_product_formula(p: FibrationParams) -> Result<IdentityReport> {
    require_twist(p, 0)?;
    let lhs = signed(quantization_dimension(p).dimension);
    let rhs = signed(binomial(p.a() + p.d(), p.d()) * (p.b() + 1));
    Ok(IdentityReport::new(IdentityName::UntwistedProduct, p, lhs, rhs))
}

/// `Q(1) = C(a + b + d + 1, d + 1) − C(a + d, d + 1)`.
pub fn blowup_count_formula(p: FibrationParams) -> Result<IdentityReport> {
    require_twist(p, 1)?;
    let (a, b, d) = (p.a(), p.b(), p.d());
    let lhs = signed(quantization_dimension(p).dimension);
    let rhs = signed(binomial(a + b + d + 1, d + 1)) - signed(binomial(a + d, d + 1));
    Ok(IdentityReport::new(IdentityName::BlowupCount, p, lhs, rhs))
}

/// Blow-up decomposition `Q(CP^{d+1}, ω_{a+b}) − Q(CP^{d+1}, ω_a) + last`.
///
/// With `corrected` the last term is `C(a + d, d) = Q(CP^d, ω_a)`, which
/// Pascal's rule forces. Without it the last term is `C(a + d − 1, d − 1)`,
/// the printed variant, which overshoots the residual by `C(a + d − 1, d)`.
/// At `d = 1` that term is `C(a, 0) = 1`, i.e. `Q(CP^0) = 1`.
pub fn blowup_decomposition(p: FibrationParams, corrected: bool) -> Result<IdentityReport> {
    require_twist(p, 1)?;
    let (a, b, d) = (p.a(), p.b(), p.d());
    let lhs = signed(quantization_dimension(p).dimension);
    let (name, last) = if corrected {
        (IdentityName::BlowupDecompositionCorrected, binomial(a + d, d))
    } else {
        (IdentityName::BlowupDecompositionPrinted, binomial(a + d - 1, d - 1))
    };
    let rhs = signed(binomial(a + b + d + 1, d + 1)) - signed(binomial(a + d + 1, d + 1)) + signed(last);
    Ok(IdentityReport::new(name, p, lhs, rhs))
}
