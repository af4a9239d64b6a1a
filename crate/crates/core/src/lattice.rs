//! The translation set `Λ = {0, r/N} + 2ℤ`, the offset set `Ω` and the
//! set `Γ` of cross-term frequencies.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cyclotomic::Cyclotomic;
use crate::rational::{self, int, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("N must be positive (got N = {0})")]
    NonPositive(i64),
    #[error("r must be odd (got r = {0})")]
    NotOdd(i64),
    #[error("r must lie in [1, 2N-1] (got r = {r}, N = {n})")]
    OutOfRange { n: i64, r: i64 },
    #[error("r, N must be coprime (gcd({r}, {n}) = {gcd})")]
    NotCoprime { n: i64, r: i64, gcd: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("empty interval [{lo}, {hi})")]
    EmptyInterval { lo: String, hi: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SpectralPairParams {
    n: i64,
    r: i64,
}

pub fn validate_params(n: i64, r: i64) -> Result<SpectralPairParams, ParamError> {
    if n < 1 {
        return Err(ParamError::NonPositive(n));
    }
    if r.rem_euclid(2) == 0 {
        return Err(ParamError::NotOdd(r));
    }
    if r < 1 || r > 2 * n - 1 {
        return Err(ParamError::OutOfRange { n, r });
    }
    let g = r.gcd(&n);
    if g > 1 {
        return Err(ParamError::NotCoprime { n, r, gcd: g });
    }
    Ok(SpectralPairParams { n, r })
}

impl SpectralPairParams {
    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    /// The dilation factor `2N`.
    pub fn dilation(&self) -> i64 {
        2 * self.n
    }

    /// `r/N`.
    pub fn coset_shift(&self) -> Rational {
        rat(self.r, self.n)
    }

    /// `(2N)^j`.
    pub fn scale(&self, j: i32) -> Rational {
        rational::pow(self.dilation(), j)
    }

    /// `e^{πi r d / N}` as an exact root of unity.
    pub fn phase(&self, d: i64) -> Cyclotomic {
        Cyclotomic::root_of_unity(self.dilation() as u32, self.r * d)
    }

    /// Coset weight `(1 + e^{πi r d / N}) / 2` attached to an offset `d`.
    pub fn weight(&self, d: i64) -> Cyclotomic {
        (&Cyclotomic::one() + &self.phase(d)).scale(&rat(1, 2))
    }

    /// Every valid `r` for a given `N`.
    pub fn valid_r(n: i64) -> Vec<i64> {
        (1..2 * n).filter(|&r| validate_params(n, r).is_ok()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticePoint {
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
    pub coset: u8,
    pub n: i64,
}

impl LatticePoint {
    pub fn new(params: &SpectralPairParams, coset: u8, n: i64) -> Self {
        let mut value = int(2 * n);
        if coset == 1 {
            value += params.coset_shift();
        }
        LatticePoint { value, coset, n }
    }

    /// Checks `value·N ≡ coset·r (mod 2N)`.
    pub fn is_consistent(&self, params: &SpectralPairParams) -> bool {
        let vn = &self.value * int(params.n);
        if !vn.is_integer() {
            return false;
        }
        let Some(k) = vn.to_integer().to_i64() else {
            return false;
        };
        k.rem_euclid(params.dilation()) == (self.coset as i64 * params.r) % params.dilation()
    }
}

/// Points of `Λ` in `[lo, hi)`, ascending.
pub fn lambda_range(
    params: &SpectralPairParams,
    lo: &Rational,
    hi: &Rational,
) -> Result<Vec<LatticePoint>, LatticeError> {
    if lo >= hi {
        return Err(LatticeError::EmptyInterval { lo: rational::format(lo), hi: rational::format(hi) });
    }
    let mut out = Vec::new();
    for coset in 0..2u8 {
        let off = if coset == 1 { params.coset_shift() } else { Rational::zero() };
        let first = ((lo - &off) / int(2)).ceil().to_integer().to_i64().expect("lattice index overflow");
        let mut n = first;
        loop {
            let p = LatticePoint::new(params, coset, n);
            if &p.value >= hi {
                break;
            }
            out.push(p);
            n += 1;
        }
    }
    out.sort_by(|a, b| a.value.cmp(&b.value));
    Ok(out)
}

/// `Ω` truncated at block `k_max`: `(2N)k + ℓ` with `0 ≤ k ≤ k_max`, `1 ≤ ℓ < 2N`.
pub fn omega_set(params: &SpectralPairParams, k_max: u32) -> Vec<i64> {
    let a = params.dilation();
    (0..=k_max as i64)
        .flat_map(|k| (1..a).map(move |l| a * k + l))
        .collect()
}

/// One way of writing `α = (2N)^j·d`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Realization {
    pub j: i32,
    /// The integer offset `d`; the wavelet is shifted by `d/2`.
    pub offset: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaElement {
    #[serde(with = "rational::serde_str")]
    pub alpha: Rational,
    pub realizations: Vec<Realization>,
}

impl GammaElement {
    /// The diagonal element `α = 0`.
    pub fn diagonal() -> Self {
        GammaElement { alpha: Rational::zero(), realizations: Vec::new() }
    }

    pub fn is_diagonal(&self) -> bool {
        self.alpha.is_zero()
    }

    /// `-α` with every offset negated.
    pub fn negated(&self) -> Self {
        GammaElement {
            alpha: -&self.alpha,
            realizations: self
                .realizations
                .iter()
                .map(|r| Realization { j: r.j, offset: -r.offset })
                .collect(),
        }
    }
}

/// All nonzero `α = (2N)^j·d` with `j_lo ≤ j ≤ j_hi` and `0 < |d| ≤ diff_bound`,
/// grouped by exact value and sorted ascending.
pub fn gamma_enumerate(
    params: &SpectralPairParams,
    j_lo: i32,
    j_hi: i32,
    diff_bound: &Rational,
) -> Vec<GammaElement> {
    let dmax = diff_bound.floor().to_integer().to_i64().unwrap_or(0);
    let mut groups: BTreeMap<Rational, Vec<Realization>> = BTreeMap::new();
    for j in j_lo..=j_hi {
        let s = params.scale(j);
        for d in (-dmax..=dmax).filter(|&d| d != 0) {
            groups
                .entry(&s * int(d))
                .or_default()
                .push(Realization { j, offset: d });
        }
    }
    groups
        .into_iter()
        .map(|(alpha, mut realizations)| {
            realizations.sort();
            GammaElement { alpha, realizations }
        })
        .collect()
}

/// Every realization of `α` over all `j ∈ ℤ` with `0 < |d| ≤ max_offset`.
pub fn complete_element(params: &SpectralPairParams, alpha: &Rational, max_offset: i64) -> GammaElement {
    let mut realizations = Vec::new();
    if !alpha.is_zero() && max_offset >= 1 {
        let a = params.dilation();
        let mag = alpha.abs();
        let mut j = rational::floor_log(a, &mag);
        loop {
            let d = alpha / params.scale(j);
            if d.abs() > int(max_offset) {
                break;
            }
            if d.is_integer() {
                realizations.push(Realization { j, offset: d.to_integer().to_i64().unwrap() });
            }
            j -= 1;
        }
        realizations.sort();
    }
    GammaElement { alpha: alpha.clone(), realizations }
}
