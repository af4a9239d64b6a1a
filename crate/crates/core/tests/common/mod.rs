#![allow(dead_code)]
//! Test matrix shared by the acceptance driver and the strict tail test.

use nuframe::catalog;
use nuframe::lattice::{validate_params, SpectralPairParams};
use nuframe::oracle::{self, random_test_function, TestFunction};
use nuframe::profile::{self, StepProfile};

pub const SEEDS: u64 = 20;
pub const PIECES: usize = 6;
pub const WINDOW: u32 = 512;

pub struct Cell {
    pub wavelet: &'static str,
    pub params: SpectralPairParams,
    pub psi: StepProfile,
    pub seed: u64,
    pub f: TestFunction,
}

pub fn all_params() -> Vec<SpectralPairParams> {
    (1..=3)
        .flat_map(|n| SpectralPairParams::valid_r(n).into_iter().map(move |r| validate_params(n, r).unwrap()))
        .collect()
}

/// Every catalog wavelet × N ∈ {1,2,3} × valid r.
pub fn wavelets() -> Vec<(&'static str, SpectralPairParams, StepProfile)> {
    let mut out = Vec::new();
    for p in all_params() {
        for e in catalog::entries() {
            out.push((e.name, p, e.build(&p)));
        }
    }
    out
}

pub fn matrix(seeds: u64) -> Vec<Cell> {
    let mut out = Vec::new();
    for (wavelet, params, psi) in wavelets() {
        let ann = profile::annulus(&psi).unwrap().unwrap();
        for seed in 0..seeds {
            let f = random_test_function(seed, &params, PIECES, &ann);
            out.push(Cell { wavelet, params, psi: psi.clone(), seed, f });
        }
    }
    out
}

pub fn label(c: &Cell) -> String {
    format!("{} N={} r={} seed={}", c.wavelet, c.params.n(), c.params.r(), c.seed)
}

pub struct TailStats {
    pub agreement_failures: Vec<String>,
    pub worst_ratio: f64,
    pub worst_cell: String,
    pub worst_true: f64,
    pub over: usize,
    pub cells: usize,
}

pub fn tail_stats() -> TailStats {
    let mut s = TailStats {
        agreement_failures: Vec::new(),
        worst_ratio: 0.0,
        worst_cell: String::new(),
        worst_true: 0.0,
        over: 0,
        cells: 0,
    };
    for c in matrix(SEEDS) {
        let exact = oracle::frame_sum_periodized(&c.f, &c.psi, &c.params).unwrap().total;
        let direct = oracle::frame_sum_direct(&c.f, &c.psi, &c.params, WINDOW).unwrap();
        let tail = direct.tail_bound.unwrap();
        s.cells += 1;
        if (direct.total - exact).abs() > tail {
            s.agreement_failures.push(format!("{}: gap {:e} > {tail:e}", label(&c), (direct.total - exact).abs()));
        }
        s.worst_true = s.worst_true.max((exact - direct.total) / exact);
        let ratio = tail / exact;
        if ratio > 1e-3 {
            s.over += 1;
        }
        if ratio > s.worst_ratio {
            s.worst_ratio = ratio;
            s.worst_cell = label(&c);
        }
    }
    s
}
