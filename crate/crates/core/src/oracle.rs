//! Brute-force frame sums.
//!
//! The oracle never touches the estimator machinery. It works level by
//! level with `g_j(ξ) = f̂(ξ) conj ψ̂(ξ/(2N)^j)`, whose analysis coefficients
//! are `c(j, λ) = (2N)^{-j/2} ∫ g_j(ξ) e^{2πiλξ/(2N)^j} dξ`. Every
//! breakpoint involved is rational, so each level is put on a common
//! integer grid and all cell lengths, shifts and phases are exact integers;
//! only the values are `f64`.
//!
//! Over one coset of `Λ` the translations step by 2, so Parseval with
//! period `P = (2N)^j/2` gives
//!
//! ```text
//! Σ_{λ∈Λ} |c(j, λ)|² = ½ ∫_0^P |Σ_k g_j(u + kP)|² + |Σ_k g_j(u + kP) ω^k|² du,
//! ```
//!
//! with `ω = e^{πi r/N}`. That is the periodized sum, exact up to rounding.
//!
//! The direct sum truncates `|λ| ≤ W`. Writing `J_b` for the jumps of
//! `g_j` at `ξ_b`, `c = -(2N)^{j/2} S(λ) / (2πiλ)` with
//! `S(λ) = Σ_b J_b e^{2πiλξ_b/(2N)^j}`. Grouping jumps by `ξ_b mod P` into
//! classes with amplitudes `A_c = Σ J_b ω^{κ m_b}` (`m_b` the period index,
//! `κ` the coset), `|S|² = Σ|A_c|² + Σ_{c≠c'} A_c conj A_c' e^{…}`. Summation
//! by parts on the oscillating part gives, per coset and side,
//!
//! ```text
//! tail ≤ (2N)^j / (4π²) · [E (1/λ0² + 1/(2λ0)) + X / λ0²],
//! E = Σ|A_c|²,  X = Σ_{c≠c'} |A_c A_c'| / |sin(π(ξ_c - ξ_c')/P)|,
//! ```
//!
//! `λ0` the first coset point beyond the window. The cruder bound with
//! `E + X` replaced by the squared total variation is also valid; the
//! smaller of the two is reported.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cyclotomic::Cyclotomic;
use crate::lattice::{LatticePoint, SpectralPairParams};
use crate::profile::{self, dilate, StepProfile, Support, SupportAnnulus};
use crate::rational::{self, int, Rational};
use crate::step::StepFunction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} support touches 0, the level window is infinite")]
    NotAnnular(&'static str),
    #[error("test function is zero")]
    ZeroFunction,
    #[error("grid arithmetic overflow: {0}")]
    Overflow(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub fhat: StepProfile,
    pub annular: bool,
}

impl TestFunction {
    pub fn new(fhat: StepProfile) -> Self {
        let annular = !matches!(profile::support(&fhat), Support::TouchesZero);
        TestFunction { fhat, annular }
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        TestFunction::new(self.fhat.map(|v| v.scale(c)))
    }

    /// `‖f‖² = ∫ |f̂|²`.
    pub fn norm_sqr(&self) -> f64 {
        profile::integrate(&self.fhat.map(Cyclotomic::norm_sqr_exact)).to_complex().re
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Periodized,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameSumReport {
    pub total: f64,
    pub per_level: BTreeMap<i32, f64>,
    pub method: Method,
    pub lambda_truncation: Option<u32>,
    pub tail_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual_re: f64,
    pub residual_im: f64,
    pub abs_error: f64,
}

/// A step function on the grid `ℤ / den` with `f64` values.
#[derive(Debug, Clone, Default)]
struct Grid {
    breaks: Vec<i128>,
    values: Vec<Complex64>,
}

impl Grid {
    fn from_profile(p: &StepProfile, scale: &Rational, den: &BigInt, conj: bool) -> Result<Grid, OracleError> {
        let breaks = p
            .breakpoints()
            .iter()
            .map(|b| {
                let x = b * scale * Rational::from_integer(den.clone());
                debug_assert!(x.is_integer());
                x.to_integer()
                    .to_i128()
                    .ok_or_else(|| OracleError::Overflow(format!("breakpoint {}", rational::format(b))))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let values = p
            .values()
            .iter()
            .map(|v| if conj { v.to_complex().conj() } else { v.to_complex() })
            .collect();
        Ok(Grid { breaks, values })
    }

    fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    fn shift(&self, s: i128) -> Grid {
        Grid { breaks: self.breaks.iter().map(|b| b - s).collect(), values: self.values.clone() }
    }

    /// Pointwise product on the merged partition.
    fn product(&self, other: &Grid, conj_other: bool) -> Grid {
        let mut pts: Vec<i128> = self.breaks.iter().chain(&other.breaks).copied().collect();
        pts.sort_unstable();
        pts.dedup();
        let (mut ia, mut ib) = (0usize, 0usize);
        let mut values = Vec::with_capacity(pts.len().saturating_sub(1));
        for &x in pts.iter().take(pts.len().saturating_sub(1)) {
            let a = at(&self.breaks, &self.values, x, &mut ia);
            let mut b = at(&other.breaks, &other.values, x, &mut ib);
            if conj_other {
                b = b.conj();
            }
            values.push(a * b);
        }
        Grid { breaks: pts, values }
    }

    /// `Σ v·length`, in grid units.
    fn integral(&self) -> Complex64 {
        self.breaks
            .windows(2)
            .zip(&self.values)
            .map(|(w, v)| v * (w[1] - w[0]) as f64)
            .sum()
    }

    fn abs2_integral(&self) -> f64 {
        self.breaks
            .windows(2)
            .zip(&self.values)
            .map(|(w, v)| v.norm_sqr() * (w[1] - w[0]) as f64)
            .sum()
    }

    /// `(position, g(x+) - g(x-))` for every breakpoint.
    fn jumps(&self) -> Vec<(i128, Complex64)> {
        let n = self.values.len();
        self.breaks
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                let right = if i < n { self.values[i] } else { Complex64::zero() };
                let left = if i > 0 { self.values[i - 1] } else { Complex64::zero() };
                (b, right - left)
            })
            .filter(|(_, j)| !j.is_zero())
            .collect()
    }
}

fn at(breaks: &[i128], values: &[Complex64], x: i128, idx: &mut usize) -> Complex64 {
    if breaks.is_empty() || x < breaks[0] {
        return Complex64::zero();
    }
    while *idx + 1 < breaks.len() && breaks[*idx + 1] <= x {
        *idx += 1;
    }
    if *idx + 1 >= breaks.len() {
        Complex64::zero()
    } else {
        values[*idx]
    }
}

/// `e^{iπ k / n}`.
fn root(k: i128, n: i128) -> Complex64 {
    let k = k.rem_euclid(2 * n);
    Complex64::from_polar(1.0, PI * k as f64 / n as f64)
}

/// `e^{2πi num/den}` after exact reduction of `num` modulo `den`.
fn turn(num: i128, den: i128) -> Complex64 {
    let r = num.rem_euclid(den);
    Complex64::from_polar(1.0, 2.0 * PI * (r as f64 / den as f64))
}

/// Per-level data on a common grid.
struct Levels {
    den: i128,
    /// `(j, g_j, P_j)`: the level function and the half period in grid units.
    levels: Vec<(i32, Grid, i128)>,
}

fn annulus_of(p: &StepProfile, what: &'static str) -> Result<Option<SupportAnnulus>, OracleError> {
    match profile::support(p) {
        Support::Empty => Ok(None),
        Support::Annular(a) => Ok(Some(a)),
        Support::TouchesZero => Err(OracleError::NotAnnular(what)),
    }
}

/// Levels `j` at which `f̂` and `ψ̂(·/(2N)^j)` can overlap.
pub fn level_window(
    f: &TestFunction,
    psi: &StepProfile,
    params: &SpectralPairParams,
) -> Result<Option<(i32, i32)>, OracleError> {
    let fa = annulus_of(&f.fhat, "test function")?;
    let pa = annulus_of(psi, "wavelet")?;
    let (Some(fa), Some(pa)) = (fa, pa) else {
        return Ok(None);
    };
    let a = params.dilation();
    let lo = rational::floor_log(a, &(&fa.xi_min / &pa.xi_max));
    let hi = rational::ceil_log(a, &(&fa.xi_max / &pa.xi_min));
    Ok(Some((lo, hi)))
}

fn build_levels(f: &TestFunction, psi: &StepProfile, params: &SpectralPairParams) -> Result<Levels, OracleError> {
    let Some((lo, hi)) = level_window(f, psi, params)? else {
        return Ok(Levels { den: 1, levels: Vec::new() });
    };
    let mut den = rational::lcm_denoms(f.fhat.breakpoints());
    for j in lo..=hi {
        let s = params.scale(j);
        for b in psi.breakpoints() {
            den = den.lcm((b * &s).denom());
        }
        den = den.lcm((&s / int(2)).denom());
    }
    let den_i = den.to_i128().ok_or_else(|| OracleError::Overflow("grid denominator".into()))?;
    let fg = Grid::from_profile(&f.fhat, &Rational::one(), &den, false)?;
    let mut levels = Vec::new();
    for j in lo..=hi {
        let s = params.scale(j);
        let pg = Grid::from_profile(psi, &s, &den, false)?;
        let g = fg.product(&pg, true);
        if g.is_zero() {
            continue;
        }
        let half = (&s / int(2)) * Rational::from_integer(den.clone());
        let period = half.to_integer().to_i128().ok_or_else(|| OracleError::Overflow("period".into()))?;
        levels.push((j, g, period));
    }
    Ok(Levels { den: den_i, levels })
}

/// `⟨f, ψ_{j,λ}⟩` through the exact profile calculus.
pub fn analysis_coefficient(
    f: &TestFunction,
    psi: &StepProfile,
    params: &SpectralPairParams,
    j: i32,
    lam: &LatticePoint,
) -> Complex64 {
    let g = profile::product(&f.fhat, &dilate(psi, j, params), true);
    let t = -(&lam.value / params.scale(j));
    let s = rational::to_f64(&params.scale(j));
    profile::integrate_modulated(&g, &t) / s.sqrt()
}

fn periodized_level(g: &Grid, period: i128, den: i128, params: &SpectralPairParams) -> f64 {
    let n = params.n() as i128;
    let r = params.r() as i128;
    let mut res: Vec<i128> = g.breaks.iter().map(|b| b.rem_euclid(period)).collect();
    res.push(0);
    res.push(period);
    res.sort_unstable();
    res.dedup();
    let cells = res.len() - 1;
    let mut s0 = vec![Complex64::zero(); cells];
    let mut s1 = vec![Complex64::zero(); cells];
    for (w, v) in g.breaks.windows(2).zip(&g.values) {
        if v.is_zero() {
            continue;
        }
        let (lo, hi) = (w[0], w[1]);
        let mut k = lo.div_euclid(period);
        while k * period < hi {
            let a = lo.max(k * period) - k * period;
            let b = hi.min((k + 1) * period) - k * period;
            if a < b {
                let phase = root(r * k, n);
                let i0 = res.partition_point(|&x| x < a);
                let i1 = res.partition_point(|&x| x < b);
                for i in i0..i1 {
                    s0[i] += v;
                    s1[i] += v * phase;
                }
            }
            k += 1;
        }
    }
    let mut total = 0.0;
    for i in 0..cells {
        let len = (res[i + 1] - res[i]) as f64 / den as f64;
        total += len * (s0[i].norm_sqr() + s1[i].norm_sqr());
    }
    0.5 * total
}

/// Exact frame sum by coset periodization.
pub fn frame_sum_periodized(
    f: &TestFunction,
    psi: &StepProfile,
    params: &SpectralPairParams,
) -> Result<FrameSumReport, OracleError> {
    let lv = build_levels(f, psi, params)?;
    let mut per_level = BTreeMap::new();
    for (j, g, period) in &lv.levels {
        per_level.insert(*j, periodized_level(g, *period, lv.den, params));
    }
    Ok(FrameSumReport {
        total: per_level.values().sum(),
        per_level,
        method: Method::Periodized,
        lambda_truncation: None,
        tail_bound: None,
    })
}

/// Coset points `λ = (2n N + κ r)/N`, returned as the numerator `2nN + κr`.
fn coset_numerators(params: &SpectralPairParams, kappa: i64, window: i64) -> Vec<i64> {
    let n = params.n();
    let off = kappa * params.r();
    let lo = (-window * n - off).div_euclid(2 * n) - 1;
    let hi = (window * n - off).div_euclid(2 * n) + 1;
    (lo..=hi)
        .map(|k| 2 * k * n + off)
        .filter(|l| l.abs() <= window * n)
        .collect()
}

/// First coset numerators beyond the window on each side.
fn first_outside(params: &SpectralPairParams, kappa: i64, window: i64) -> (i64, i64) {
    let n = params.n();
    let off = kappa * params.r();
    let mut k = (window * n - off).div_euclid(2 * n);
    while 2 * k * n + off <= window * n {
        k += 1;
    }
    let pos = 2 * k * n + off;
    let mut k = (-window * n - off).div_euclid(2 * n) + 1;
    while 2 * k * n + off >= -window * n {
        k -= 1;
    }
    let neg = 2 * k * n + off;
    (pos, -neg)
}

fn tail_bound_level(g: &Grid, period: i128, j: i32, params: &SpectralPairParams, window: i64) -> f64 {
    let jumps = g.jumps();
    if jumps.is_empty() {
        return 0.0;
    }
    let n = params.n();
    let scale = rational::to_f64(&params.scale(j));
    let tv: f64 = jumps.iter().map(|(_, j)| j.norm()).sum();
    let mut total = 0.0;
    for kappa in 0..2i64 {
        let mut classes: BTreeMap<i128, Complex64> = BTreeMap::new();
        for &(b, jump) in &jumps {
            let c = b.rem_euclid(period);
            let m = b.div_euclid(period);
            let phase = root((kappa as i128) * params.r() as i128 * m, n as i128);
            *classes.entry(c).or_default() += jump * phase;
        }
        let amps: Vec<(i128, f64)> = classes.into_iter().map(|(c, a)| (c, a.norm())).collect();
        let e: f64 = amps.iter().map(|(_, a)| a * a).sum();
        let mut x = 0.0;
        for (i, (ci, ai)) in amps.iter().enumerate() {
            for (k, (ck, ak)) in amps.iter().enumerate() {
                if i != k {
                    let s = (PI * (ci - ck) as f64 / period as f64).sin().abs();
                    x += ai * ak / s;
                }
            }
        }
        let (pos, neg) = first_outside(params, kappa, window);
        for l0 in [pos, neg] {
            let lam0 = l0 as f64 / n as f64;
            let sum_sq = 1.0 / (lam0 * lam0) + 1.0 / (2.0 * lam0);
            let refined = e * sum_sq + x / (lam0 * lam0);
            let crude = tv * tv * sum_sq;
            total += scale / (4.0 * PI * PI) * refined.min(crude);
        }
    }
    total
}

/// Frame sum over `|λ| ≤ lambda_window` with a rigorous tail bound.
pub fn frame_sum_direct(
    f: &TestFunction,
    psi: &StepProfile,
    params: &SpectralPairParams,
    lambda_window: u32,
) -> Result<FrameSumReport, OracleError> {
    let lv = build_levels(f, psi, params)?;
    let n = params.n() as i128;
    let window = lambda_window as i64;
    let mut per_level = BTreeMap::new();
    let mut tail = 0.0;
    for (j, g, period) in &lv.levels {
        let s = params.scale(*j);
        let s_f = rational::to_f64(&s);
        // phase of e^{2πiλξ/a^j} at ξ = B/den with λ = L/N: L·B·sd / (N·den·sn)
        let (sn, sd) = (
            s.numer().to_i128().expect("scale numerator"),
            s.denom().to_i128().expect("scale denominator"),
        );
        let pden = n * lv.den * sn;
        let jumps = g.jumps();
        let mut level = 0.0;
        for kappa in 0..2 {
            for l in coset_numerators(params, kappa, window) {
                let c = if l == 0 {
                    g.integral() / lv.den as f64
                } else {
                    let mut acc = Complex64::zero();
                    for &(b, jump) in &jumps {
                        acc += jump * turn(l as i128 * b * sd, pden);
                    }
                    let theta = 2.0 * PI * (l as f64 / n as f64) / s_f;
                    -acc / Complex64::new(0.0, theta)
                };
                level += c.norm_sqr() / s_f;
            }
        }
        per_level.insert(*j, level);
        tail += tail_bound_level(g, *period, *j, params, window);
    }
    Ok(FrameSumReport {
        total: per_level.values().sum(),
        per_level,
        method: Method::Direct,
        lambda_truncation: Some(lambda_window),
        tail_bound: Some(tail),
    })
}

/// `R_ψ(f) = Σ_p R_p`, each `R_p` summed term by term over `ℓ ≠ p`.
pub fn residual(f: &TestFunction, psi: &StepProfile, params: &SpectralPairParams) -> Result<Complex64, OracleError> {
    let lv = build_levels(f, psi, params)?;
    let n = params.n() as i128;
    let r = params.r() as i128;
    let two_n = 2 * n;
    let mut total = Complex64::zero();
    for (_, g, period) in &lv.levels {
        // u(ξ) = conj f̂(ξ) ψ̂(ξ/a^j); the shift by a^j p/2 is p half periods
        let u = Grid { breaks: g.breaks.clone(), values: g.values.iter().map(|v| v.conj()).collect() };
        let width = u.breaks.last().unwrap() - u.breaks[0];
        let reach = (width / period) as i64 + 1;
        for p in 0..two_n as i64 {
            let up = u.shift(p as i128 * period);
            for l in (p - reach)..=(p + reach) {
                if l == p {
                    continue;
                }
                let ul = u.shift(l as i128 * period);
                let integral = up.product(&ul, true).integral() / lv.den as f64;
                let factor = (Complex64::new(1.0, 0.0) + root(r * (l - p) as i128, n)) / (4.0 * n as f64);
                total += factor * integral;
            }
        }
    }
    Ok(total)
}

/// Checks `Σ_j Σ_λ |⟨f, ψ_{j,λ}⟩|² = ∫ |f̂|² Σ_j |ψ̂(ξ/(2N)^j)|² + R_ψ(f)`.
pub fn identity_check(
    f: &TestFunction,
    psi: &StepProfile,
    params: &SpectralPairParams,
) -> Result<IdentityCheck, OracleError> {
    let lhs = frame_sum_periodized(f, psi, params)?.total;
    let lv = build_levels(f, psi, params)?;
    let diag: f64 = lv.levels.iter().map(|(_, g, _)| g.abs2_integral() / lv.den as f64).sum();
    let res = residual(f, psi, params)?;
    let rhs = diag + res.re;
    Ok(IdentityCheck { lhs, rhs, residual_re: res.re, residual_im: res.im, abs_error: (lhs - rhs).abs() })
}

/// Frame sum divided by `‖f‖²`.
pub fn empirical_ratio(f: &TestFunction, psi: &StepProfile, params: &SpectralPairParams) -> Result<f64, OracleError> {
    let norm = f.norm_sqr();
    if norm <= 0.0 {
        return Err(OracleError::ZeroFunction);
    }
    Ok(frame_sum_periodized(f, psi, params)?.total / norm)
}

/// Grid resolution for random breakpoints on each half-line.
pub const GRID_STEPS: i64 = 64;

/// A seeded random step function on `±[xi_min, xi_max]` with Gaussian
/// rational values of modulus at most 1.
pub fn random_test_function(
    seed: u64,
    _params: &SpectralPairParams,
    piece_count: usize,
    support: &SupportAnnulus,
) -> TestFunction {
    assert!(piece_count >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_side = [0usize; 2];
    for _ in 0..piece_count {
        per_side[rng.gen_range(0..2)] += 1;
    }
    let steps = GRID_STEPS.max(piece_count as i64 + 1);
    let width = &support.xi_max - &support.xi_min;
    let point = |i: i64| &support.xi_min + &width * rational::rat(i, steps);
    let mut pieces: Vec<(Rational, Rational, Cyclotomic)> = Vec::new();
    for (side, &count) in per_side.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let mut idx = rand::seq::index::sample(&mut rng, steps as usize + 1, count + 1).into_vec();
        idx.sort_unstable();
        let mut prev: Option<Cyclotomic> = None;
        for w in idx.windows(2) {
            let v = loop {
                let re = rng.gen_range(-8i64..=8);
                let im = rng.gen_range(-8i64..=8);
                if re == 0 && im == 0 || re * re + im * im > 64 {
                    continue;
                }
                let v = Cyclotomic::gaussian(rational::rat(re, 8), rational::rat(im, 8));
                if prev.as_ref() != Some(&v) {
                    break v;
                }
            };
            prev = Some(v.clone());
            let (a, b) = (point(w[0] as i64), point(w[1] as i64));
            if side == 0 {
                pieces.push((a, b, v));
            } else {
                pieces.push((-b, -a, v));
            }
        }
    }
    pieces.sort_by(|x, y| x.0.cmp(&y.0));
    let mut breaks: Vec<Rational> = Vec::new();
    let mut values = Vec::new();
    for (lo, hi, v) in pieces {
        match breaks.last() {
            Some(last) if *last < lo => {
                values.push(Cyclotomic::zero());
                breaks.push(lo);
            }
            Some(_) => {}
            None => breaks.push(lo),
        }
        breaks.push(hi);
        values.push(v);
    }
    TestFunction::new(StepFunction::new(breaks, values).expect("sorted random pieces"))
}
