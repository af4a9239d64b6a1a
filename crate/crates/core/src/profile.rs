//! Frequency profiles: exact step functions with cyclotomic values.

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::Cyclotomic;
use crate::lattice::SpectralPairParams;
use crate::rational::{self, int, Rational};
use crate::step::{StepError, StepFunction};

pub type StepProfile = StepFunction<Cyclotomic>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error(transparent)]
    Step(#[from] StepError),
    #[error("profile support touches 0, the dilation sums are infinite")]
    NoAnnulus,
    #[error("bad profile literal: {0}")]
    Literal(String),
}

/// The profile vanishes on `(-xi_min, xi_min)` and outside `[-xi_max, xi_max]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportAnnulus {
    #[serde(with = "rational::serde_str")]
    pub xi_min: Rational,
    #[serde(with = "rational::serde_str")]
    pub xi_max: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Support {
    Empty,
    Annular(SupportAnnulus),
    TouchesZero,
}

pub fn make_step_profile(breakpoints: Vec<Rational>, values: Vec<Cyclotomic>) -> Result<StepProfile, ProfileError> {
    Ok(StepFunction::new(breakpoints, values)?)
}

pub fn support<T: crate::step::StepValue>(p: &StepFunction<T>) -> Support {
    let Some((lo, hi)) = p.extent() else {
        return Support::Empty;
    };
    let mut xi_min: Option<Rational> = None;
    for (a, b, v) in p.cells() {
        if v.is_zero() {
            continue;
        }
        let d = if a >= &Rational::zero() {
            a.clone()
        } else if b <= &Rational::zero() {
            -b
        } else {
            Rational::zero()
        };
        xi_min = Some(match xi_min {
            Some(m) if m <= d => m,
            _ => d,
        });
    }
    let xi_min = xi_min.unwrap_or_else(Rational::zero);
    if xi_min.is_zero() {
        return Support::TouchesZero;
    }
    let xi_max = lo.abs().max(hi.abs());
    Support::Annular(SupportAnnulus { xi_min, xi_max })
}

pub fn annulus(p: &StepProfile) -> Result<Option<SupportAnnulus>, ProfileError> {
    match support(p) {
        Support::Empty => Ok(None),
        Support::Annular(a) => Ok(Some(a)),
        Support::TouchesZero => Err(ProfileError::NoAnnulus),
    }
}

/// `ξ ↦ p((2N)^{-j} ξ)`.
pub fn dilate(p: &StepProfile, j: i32, params: &SpectralPairParams) -> StepProfile {
    p.stretch(&params.scale(j))
}

/// `ξ ↦ p(ξ + s)`.
pub fn shift(p: &StepProfile, s: &Rational) -> StepProfile {
    p.shift(s)
}

pub fn product(p: &StepProfile, q: &StepProfile, conjugate_q: bool) -> StepProfile {
    if conjugate_q {
        p.zip_with(q, |a, b| a * &b.conj())
    } else {
        p.zip_with(q, |a, b| a * b)
    }
}

pub fn integrate(p: &StepProfile) -> Cyclotomic {
    p.cells()
        .fold(Cyclotomic::zero(), |acc, (a, b, v)| &acc + &v.scale(&(b - a)))
}

/// `e^{-2πi q}` with `q` reduced exactly modulo 1 first.
pub fn unit_phase(q: &Rational) -> Complex64 {
    let f = rational::to_f64(&rational::frac(q));
    Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f)
}

/// `∫ p(ξ) e^{-2πi t ξ} dξ` in closed form per cell.
pub fn integrate_modulated(p: &StepProfile, t: &Rational) -> Complex64 {
    if t.is_zero() {
        return integrate(p).to_complex();
    }
    let denom = Complex64::new(0.0, -2.0 * std::f64::consts::PI * rational::to_f64(t));
    p.cells()
        .map(|(a, b, v)| v.to_complex() * (unit_phase(&(t * b)) - unit_phase(&(t * a))) / denom)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    Abs2,
    Abs,
    Real,
}

/// Essential minimum and maximum of the transformed profile on `[lo, hi)`.
pub fn ess_extrema(p: &StepProfile, lo: &Rational, hi: &Rational, transform: Transform) -> Result<(f64, f64), StepError> {
    p.extrema_on(&[(lo.clone(), hi.clone())], |v| apply(transform, v))
}

pub fn apply(transform: Transform, v: &Cyclotomic) -> f64 {
    match transform {
        Transform::Abs2 => v.norm_sqr_exact().to_complex().re,
        Transform::Abs => v.abs(),
        Transform::Real => v.to_complex().re,
    }
}

/// `[-2N, -1) ∪ [1, 2N)`, one period of the dilation on each half-line.
pub fn fundamental_domain(params: &SpectralPairParams) -> Vec<(Rational, Rational)> {
    let a = int(params.dilation());
    vec![(-a.clone(), int(-1)), (int(1), a)]
}

/// Range of `j` for which `p((2N)^{-j}ξ)` can be nonzero with `1 ≤ |ξ| < 2N`.
pub fn dilation_window(params: &SpectralPairParams, ann: &SupportAnnulus) -> (i32, i32) {
    let a = params.dilation();
    let lo = rational::floor_log(a, &(int(1) / &ann.xi_max));
    let hi = rational::ceil_log(a, &(int(a) / &ann.xi_min));
    (lo, hi)
}

/// `Σ_j |p((2N)^{-j}ξ)|²` on the fundamental domain.
pub fn calderon_sum(psi: &StepProfile, params: &SpectralPairParams) -> Result<StepProfile, ProfileError> {
    let Some(ann) = annulus(psi)? else {
        return Ok(StepProfile::zero());
    };
    let dom = fundamental_domain(params);
    let abs2 = psi.map(Cyclotomic::norm_sqr_exact);
    let (lo, hi) = dilation_window(params, &ann);
    let dilates: Vec<StepProfile> = (lo..=hi).map(|j| dilate(&abs2, j, params).restrict_to(&dom)).collect();
    let refs: Vec<&StepProfile> = dilates.iter().collect();
    Ok(StepFunction::combine(&refs, |vs| {
        vs.iter().fold(Cyclotomic::zero(), |acc, v| &acc + *v)
    }))
}

/// One record of the profile literal format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiteralPiece {
    pub lo: String,
    pub hi: String,
    #[serde(default = "zero_str")]
    pub re: String,
    #[serde(default = "zero_str")]
    pub im: String,
}

fn zero_str() -> String {
    "0".into()
}

pub fn from_literal(pieces: &[LiteralPiece]) -> Result<StepProfile, ProfileError> {
    let err = |e: rational::ParseRationalError| ProfileError::Literal(e.to_string());
    let mut rows = Vec::with_capacity(pieces.len());
    for p in pieces {
        let lo = rational::parse(&p.lo).map_err(err)?;
        let hi = rational::parse(&p.hi).map_err(err)?;
        if lo >= hi {
            return Err(ProfileError::Literal(format!("piece [{}, {}) is empty", p.lo, p.hi)));
        }
        let v = Cyclotomic::gaussian(rational::parse(&p.re).map_err(err)?, rational::parse(&p.im).map_err(err)?);
        rows.push((lo, hi, v));
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    let mut breaks: Vec<Rational> = Vec::new();
    let mut values = Vec::new();
    for (lo, hi, v) in rows {
        match breaks.last() {
            Some(last) if *last > lo => {
                return Err(ProfileError::Literal("pieces overlap".into()));
            }
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
    make_step_profile(breaks, values)
}

pub fn parse_literal(json: &str) -> Result<StepProfile, ProfileError> {
    let pieces: Vec<LiteralPiece> =
        serde_json::from_str(json).map_err(|e| ProfileError::Literal(e.to_string()))?;
    from_literal(&pieces)
}

/// Literal records for a profile whose values are Gaussian rationals.
pub fn to_literal(p: &StepProfile) -> Option<Vec<LiteralPiece>> {
    p.cells()
        .filter(|(_, _, v)| !v.is_zero())
        .map(|(a, b, v)| {
            let (re, im) = v.as_gaussian()?;
            Some(LiteralPiece {
                lo: rational::format(a),
                hi: rational::format(b),
                re: rational::format(&re),
                im: rational::format(&im),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::validate_params;
    use crate::rational::rat;

    fn ind(lo: Rational, hi: Rational) -> StepProfile {
        StepFunction::indicator(lo, hi, Cyclotomic::one())
    }

    fn c(q: Rational) -> Cyclotomic {
        Cyclotomic::from(q)
    }

    #[test]
    fn make_examples() {
        let p = make_step_profile(vec![int(0), int(1)], vec![Cyclotomic::one()]).unwrap();
        assert_eq!(p, ind(int(0), int(1)));
        assert!(make_step_profile(vec![int(0), int(1), int(1), int(2)], vec![c(int(1)); 3]).is_err());
        let p = make_step_profile(
            vec![int(-1), rat(-1, 2), rat(1, 2), int(1)],
            vec![c(int(1)), c(int(0)), c(int(1))],
        )
        .unwrap();
        assert_eq!(p.cell_count(), 3);
        assert_eq!(
            support(&p),
            Support::Annular(SupportAnnulus { xi_min: rat(1, 2), xi_max: int(1) })
        );
        assert_eq!(support(&ind(int(0), int(1))), Support::TouchesZero);
        assert_eq!(support(&StepProfile::zero()), Support::Empty);
    }

    #[test]
    fn dilate_and_shift_examples() {
        let p1 = validate_params(1, 1).unwrap();
        let p2 = validate_params(2, 1).unwrap();
        assert_eq!(dilate(&ind(rat(1, 2), int(1)), 1, &p1), ind(int(1), int(2)));
        assert_eq!(dilate(&ind(int(1), int(4)), -1, &p2), ind(rat(1, 4), int(1)));
        assert_eq!(dilate(&ind(int(1), int(4)), 0, &p2), ind(int(1), int(4)));
        assert_eq!(shift(&ind(int(0), int(1)), &rat(1, 2)), ind(rat(-1, 2), rat(1, 2)));
        assert_eq!(shift(&ind(int(1), int(2)), &int(-1)), ind(int(2), int(3)));
    }

    #[test]
    fn product_examples() {
        assert_eq!(product(&ind(int(0), int(2)), &ind(int(1), int(3)), false), ind(int(1), int(2)));
        assert!(product(&ind(int(0), int(2)), &StepProfile::zero(), false).is_zero());
        let z = StepFunction::indicator(int(0), int(1), Cyclotomic::gaussian(int(1), int(1)));
        assert_eq!(
            product(&z, &z, true),
            StepFunction::indicator(int(0), int(1), c(int(2)))
        );
    }

    #[test]
    fn integrate_examples() {
        assert_eq!(integrate(&ind(int(0), int(1))), Cyclotomic::one());
        assert_eq!(integrate(&StepProfile::zero()), Cyclotomic::zero());
        let p = StepFunction::indicator(int(-2), int(2), c(int(3)));
        assert_eq!(integrate(&p), c(int(12)));
    }

    #[test]
    fn modulated_examples() {
        let p = ind(int(0), int(1));
        assert!((integrate_modulated(&p, &int(0)) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(integrate_modulated(&p, &int(1)).norm() < 1e-15);
        let h = ind(int(0), rat(1, 2));
        let got = integrate_modulated(&h, &int(1));
        let want = Complex64::new(0.0, -1.0 / std::f64::consts::PI);
        // (e^{-πi} - 1)/(-2πi) = -2/(-2πi) = 1/(πi) = -i/π
        assert!((got - want).norm() < 1e-15);
        // midpoint quadrature as an independent check
        let n = 200_000;
        let mut q = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let x = (k as f64 + 0.5) / (2.0 * n as f64);
            q += Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * x);
        }
        q /= 2.0 * n as f64;
        assert!((got - q).norm() < 1e-10);
    }

    #[test]
    fn extrema_examples() {
        let p = ind(int(1), int(2));
        assert_eq!(ess_extrema(&p, &int(1), &int(2), Transform::Abs2).unwrap(), (1.0, 1.0));
        let p = ind(int(1), rat(3, 2));
        assert_eq!(ess_extrema(&p, &int(1), &int(2), Transform::Abs2).unwrap(), (0.0, 1.0));
        let p = make_step_profile(vec![int(0), int(1), int(2)], vec![c(int(2)), c(int(3))]).unwrap();
        assert_eq!(ess_extrema(&p, &int(0), &int(2), Transform::Abs).unwrap(), (2.0, 3.0));
    }

    #[test]
    fn calderon_examples() {
        let p1 = validate_params(1, 1).unwrap();
        let shannon = ind(int(-1), rat(-1, 2)).zip_with(&ind(rat(1, 2), int(1)), |a, b| a + b);
        let cal = calderon_sum(&shannon, &p1).unwrap();
        let dom = fundamental_domain(&p1);
        assert_eq!(cal, ind(int(-2), int(-1)).zip_with(&ind(int(1), int(2)), |a, b| a + b));
        assert_eq!(cal.extrema_on(&dom, |v| v.to_complex().re).unwrap(), (1.0, 1.0));
        for n in 1..=3 {
            let p = validate_params(n, 1).unwrap();
            let a = 2 * n;
            let cal = calderon_sum(&ind(int(1), int(a)), &p).unwrap();
            assert_eq!(cal, ind(int(1), int(a)));
            let cal = calderon_sum(&ind(int(1), int(a * a)), &p).unwrap();
            assert_eq!(cal, StepFunction::indicator(int(1), int(a), c(int(2))));
        }
        assert_eq!(calderon_sum(&ind(int(0), int(1)), &p1), Err(ProfileError::NoAnnulus));
    }

    #[test]
    fn literal_roundtrip() {
        let json = r#"[{"lo":"1/2","hi":"1","re":"1","im":"0"},{"lo":"-1","hi":"-0.5","re":"0","im":"1/2"}]"#;
        let p = parse_literal(json).unwrap();
        assert_eq!(p.cell_count(), 3);
        let back = to_literal(&p).unwrap();
        assert_eq!(from_literal(&back).unwrap(), p);
        assert!(parse_literal(r#"[{"lo":"1","hi":"1"}]"#).is_err());
    }
}
