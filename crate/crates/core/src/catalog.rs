//! Built-in wavelets, each a function of `(N, r)`.

use crate::cyclotomic::Cyclotomic;
use crate::lattice::SpectralPairParams;
use crate::profile::StepProfile;
use crate::rational::{int, rat, Rational};
use crate::step::StepFunction;

pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    build: fn(&SpectralPairParams) -> StepProfile,
}

impl CatalogEntry {
    pub fn build(&self, params: &SpectralPairParams) -> StepProfile {
        (self.build)(params)
    }
}

static ENTRIES: [CatalogEntry; 4] = [
    CatalogEntry {
        name: "shannon",
        summary: "indicator of ±[1/2, N); the classical orthonormal Shannon wavelet at N = 1",
        build: shannon,
    },
    CatalogEntry {
        name: "single_band",
        summary: "indicator of [1, 2N); Calderón sum 1 on the positive axis, 0 on the negative",
        build: single_band,
    },
    CatalogEntry {
        name: "two_band",
        summary: "indicator of ±[1, 2N) scaled by 1/√2; Calderón sum 1/2",
        build: two_band,
    },
    CatalogEntry {
        name: "rough_meyer",
        summary: "symmetric bump with four-level ramps; Calderón sum exactly 1, small cross terms",
        build: rough_meyer,
    },
];

pub fn entries() -> &'static [CatalogEntry] {
    &ENTRIES
}

pub fn lookup(name: &str) -> Option<&'static CatalogEntry> {
    ENTRIES.iter().find(|e| e.name == name)
}

/// `v` on `[lo, hi) ∪ [-hi, -lo)`.
fn symmetric(pieces: &[(Rational, Rational, Cyclotomic)]) -> StepProfile {
    let mut breaks: Vec<Rational> = Vec::new();
    let mut values = Vec::new();
    let mut push = |lo: Rational, hi: Rational, v: Cyclotomic| {
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
    };
    for (lo, hi, v) in pieces.iter().rev() {
        push(-hi, -lo, v.clone());
    }
    for (lo, hi, v) in pieces {
        push(lo.clone(), hi.clone(), v.clone());
    }
    StepFunction::new(breaks, values).expect("catalog pieces are sorted")
}

pub fn shannon(params: &SpectralPairParams) -> StepProfile {
    symmetric(&[(rat(1, 2), int(params.n()), Cyclotomic::one())])
}

pub fn single_band(params: &SpectralPairParams) -> StepProfile {
    StepFunction::indicator(int(1), int(params.dilation()), Cyclotomic::one())
}

pub fn two_band(params: &SpectralPairParams) -> StepProfile {
    let v = Cyclotomic::sqrt2().scale(&rat(1, 2));
    symmetric(&[(int(1), int(params.dilation()), v)])
}

/// Outer edge of the rough Meyer bump, just past `1/4` so that only the
/// `d = ±1` shifts see each other's last ramp step.
pub const ROUGH_MEYER_EDGE: (i64, i64) = (25, 96);

pub fn rough_meyer(params: &SpectralPairParams) -> StepProfile {
    // rising steps; squares pair up with the mirrored falling steps to 1
    let ramp = [rat(7, 25), rat(3, 5), rat(4, 5), rat(24, 25)];
    let a = params.dilation();
    let edge = rat(ROUGH_MEYER_EDGE.0, ROUGH_MEYER_EDGE.1);
    let b = int(2) * &edge / int(a * (a + 1));
    let h = int(a - 1) * &b / int(8);
    let ah = int(a) * &h;
    let ab = int(a) * &b;
    let mut pieces = Vec::new();
    for (i, v) in ramp.iter().enumerate() {
        let lo = &b + int(i as i64) * &h;
        pieces.push((lo.clone(), lo + &h, Cyclotomic::from(v.clone())));
    }
    pieces.push((&b + int(4) * &h, ab.clone(), Cyclotomic::one()));
    for (i, v) in ramp.iter().rev().enumerate() {
        let lo = &ab + int(i as i64) * &ah;
        pieces.push((lo.clone(), lo + &ah, Cyclotomic::from(v.clone())));
    }
    symmetric(&pieces)
}
