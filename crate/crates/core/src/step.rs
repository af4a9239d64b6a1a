//! Piecewise-constant functions on the real line with exact breakpoints.

use num_complex::Complex64;
use num_traits::Zero;
use thiserror::Error;

use crate::cyclotomic::Cyclotomic;
use crate::rational::{self, Rational};

pub trait StepValue: Clone + PartialEq {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
}

impl StepValue for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic::zero()
    }
    fn is_zero(&self) -> bool {
        Cyclotomic::is_zero(self)
    }
}

impl StepValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl StepValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("breakpoints must be strictly increasing")]
    UnsortedBreakpoints,
    #[error("expected {expected} values for the given breakpoints, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("empty interval")]
    EmptyInterval,
}

/// A function equal to `values[i]` on `[breaks[i], breaks[i+1])` and zero
/// elsewhere, always kept in normal form.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction<T> {
    breaks: Vec<Rational>,
    values: Vec<T>,
}

impl<T: StepValue> StepFunction<T> {
    pub fn new(breaks: Vec<Rational>, values: Vec<T>) -> Result<Self, StepError> {
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(StepError::UnsortedBreakpoints);
        }
        let expected = breaks.len().saturating_sub(1);
        if values.len() != expected || (breaks.len() == 1 && !values.is_empty()) {
            return Err(StepError::LengthMismatch { expected, got: values.len() });
        }
        Ok(Self::normalized(breaks, values))
    }

    pub fn zero() -> Self {
        StepFunction { breaks: Vec::new(), values: Vec::new() }
    }

    pub fn indicator(lo: Rational, hi: Rational, v: T) -> Self {
        if lo >= hi {
            return Self::zero();
        }
        Self::normalized(vec![lo, hi], vec![v])
    }

    /// Normal form: merge equal neighbours, trim zero ends.
    fn normalized(breaks: Vec<Rational>, values: Vec<T>) -> Self {
        if values.is_empty() {
            return Self::zero();
        }
        let mut nb: Vec<Rational> = Vec::with_capacity(breaks.len());
        let mut nv: Vec<T> = Vec::with_capacity(values.len());
        let mut it = breaks.into_iter();
        let mut lo = it.next().unwrap();
        for (hi, v) in it.zip(values) {
            if nv.is_empty() {
                if !v.is_zero() {
                    nb.push(lo);
                    nv.push(v);
                }
            } else if nv.last() != Some(&v) {
                nb.push(lo);
                nv.push(v);
            }
            lo = hi;
        }
        if nv.is_empty() {
            return Self::zero();
        }
        nb.push(lo);
        while nv.last().is_some_and(StepValue::is_zero) {
            nv.pop();
            nb.pop();
        }
        StepFunction { breaks: nb, values: nv }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breaks
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cell_count(&self) -> usize {
        self.values.len()
    }

    /// `[first, last)` breakpoint, if any.
    pub fn extent(&self) -> Option<(&Rational, &Rational)> {
        Some((self.breaks.first()?, self.breaks.last()?))
    }

    pub fn cells(&self) -> impl Iterator<Item = (&Rational, &Rational, &T)> {
        self.breaks
            .windows(2)
            .zip(&self.values)
            .map(|(w, v)| (&w[0], &w[1], v))
    }

    pub fn eval(&self, x: &Rational) -> T {
        let Some((lo, hi)) = self.extent() else {
            return T::zero();
        };
        if x < lo || x >= hi {
            return T::zero();
        }
        let i = self.breaks.partition_point(|b| b <= x) - 1;
        self.values[i].clone()
    }

    pub fn map<U: StepValue>(&self, f: impl Fn(&T) -> U) -> StepFunction<U> {
        StepFunction::normalized(self.breaks.clone(), self.values.iter().map(f).collect())
    }

    /// `ξ ↦ self(ξ / factor)` for `factor > 0`.
    pub fn stretch(&self, factor: &Rational) -> Self {
        assert!(factor > &Rational::zero());
        StepFunction {
            breaks: self.breaks.iter().map(|b| b * factor).collect(),
            values: self.values.clone(),
        }
    }

    /// `ξ ↦ self(ξ + s)`.
    pub fn shift(&self, s: &Rational) -> Self {
        StepFunction {
            breaks: self.breaks.iter().map(|b| b - s).collect(),
            values: self.values.clone(),
        }
    }

    /// Pointwise `f(self, other)` on the merged partition.
    pub fn zip_with<U: StepValue, V: StepValue>(
        &self,
        other: &StepFunction<U>,
        f: impl Fn(&T, &U) -> V,
    ) -> StepFunction<V> {
        let z0 = T::zero();
        let z1 = U::zero();
        let pts = merge_sorted(&self.breaks, &other.breaks);
        let mut c0 = Cursor::default();
        let mut c1 = Cursor::default();
        let mut values = Vec::with_capacity(pts.len().saturating_sub(1));
        for x in pts.iter().take(pts.len().saturating_sub(1)) {
            let a = c0.at(self, x, &z0);
            let b = c1.at(other, x, &z1);
            values.push(f(a, b));
        }
        StepFunction::normalized(pts, values)
    }

    /// Pointwise `f` over many functions on their common partition.
    pub fn combine<V: StepValue>(fs: &[&StepFunction<T>], f: impl Fn(&[&T]) -> V) -> StepFunction<V> {
        let pts = common_partition(fs);
        let z = T::zero();
        let mut cursors = vec![Cursor::default(); fs.len()];
        let mut values = Vec::with_capacity(pts.len().saturating_sub(1));
        let mut row: Vec<&T> = Vec::with_capacity(fs.len());
        for x in pts.iter().take(pts.len().saturating_sub(1)) {
            row.clear();
            for (g, c) in fs.iter().zip(cursors.iter_mut()) {
                row.push(c.at(g, x, &z));
            }
            values.push(f(&row));
        }
        StepFunction::normalized(pts, values)
    }

    /// Calls `f(lo, hi, values)` on every cell of the common partition of
    /// `fs` refined by `extra`, without normalising.
    pub fn scan(fs: &[&StepFunction<T>], extra: &[Rational], mut f: impl FnMut(&Rational, &Rational, &[&T])) {
        let mut pts = common_partition(fs);
        pts.extend(extra.iter().cloned());
        pts.sort();
        pts.dedup();
        let z = T::zero();
        let mut cursors = vec![Cursor::default(); fs.len()];
        let mut row: Vec<&T> = Vec::with_capacity(fs.len());
        for w in pts.windows(2) {
            row.clear();
            for (g, c) in fs.iter().zip(cursors.iter_mut()) {
                row.push(c.at(g, &w[0], &z));
            }
            f(&w[0], &w[1], &row);
        }
    }

    /// Zero outside `[lo, hi)`.
    pub fn restrict(&self, lo: &Rational, hi: &Rational) -> Self {
        let mut breaks = Vec::new();
        let mut values = Vec::new();
        for (a, b, v) in self.cells() {
            let l = a.max(lo);
            let h = b.min(hi);
            if l >= h {
                continue;
            }
            if breaks.last() != Some(l) {
                if !breaks.is_empty() {
                    values.push(T::zero());
                }
                breaks.push(l.clone());
            }
            breaks.push(h.clone());
            values.push(v.clone());
        }
        StepFunction::normalized(breaks, values)
    }

    /// Zero outside the union of the given disjoint intervals.
    pub fn restrict_to(&self, domain: &[(Rational, Rational)]) -> Self {
        let parts: Vec<Self> = domain.iter().map(|(lo, hi)| self.restrict(lo, hi)).collect();
        let refs: Vec<&Self> = parts.iter().collect();
        Self::combine(&refs, |vs| {
            vs.iter().find(|v| !v.is_zero()).map(|v| (*v).clone()).unwrap_or_else(T::zero)
        })
    }

    /// Lists every cell of `[lo, hi)` including gaps (as zero).
    pub fn cells_on(&self, lo: &Rational, hi: &Rational) -> Vec<(Rational, Rational, T)> {
        let mut out = Vec::new();
        let mut pos = lo.clone();
        for (a, b, v) in self.cells() {
            if b <= lo || a >= hi {
                continue;
            }
            let l = a.max(lo).clone();
            let h = b.min(hi).clone();
            if pos < l {
                out.push((pos.clone(), l.clone(), T::zero()));
            }
            out.push((l, h.clone(), v.clone()));
            pos = h;
        }
        if pos < *hi {
            out.push((pos, hi.clone(), T::zero()));
        }
        out
    }

    /// Minimum and maximum of `key` over the union of intervals, gaps
    /// counting as zero.
    pub fn extrema_on(
        &self,
        domain: &[(Rational, Rational)],
        key: impl Fn(&T) -> f64,
    ) -> Result<(f64, f64), StepError> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (a, b) in domain {
            if a >= b {
                continue;
            }
            for (_, _, v) in self.cells_on(a, b) {
                let k = key(&v);
                lo = lo.min(k);
                hi = hi.max(k);
            }
        }
        if lo > hi {
            return Err(StepError::EmptyInterval);
        }
        Ok((lo, hi))
    }
}

impl StepFunction<f64> {
    /// `Σ value·length` evaluated in f64 on exact cell lengths.
    pub fn integral(&self) -> f64 {
        self.cells().map(|(a, b, v)| v * rational::to_f64(&(b - a))).sum()
    }
}

impl<T: StepValue> Default for StepFunction<T> {
    fn default() -> Self {
        Self::zero()
    }
}

#[derive(Clone, Default)]
struct Cursor {
    idx: usize,
}

impl Cursor {
    /// Value at `x`; calls must come with nondecreasing `x`.
    fn at<'a, T: StepValue>(&mut self, f: &'a StepFunction<T>, x: &Rational, zero: &'a T) -> &'a T {
        let b = &f.breaks;
        if b.is_empty() || x < &b[0] {
            return zero;
        }
        while self.idx + 1 < b.len() && &b[self.idx + 1] <= x {
            self.idx += 1;
        }
        if self.idx + 1 >= b.len() {
            zero
        } else {
            &f.values[self.idx]
        }
    }
}

fn merge_sorted(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut k) = (0, 0);
    while i < a.len() || k < b.len() {
        let next = if k >= b.len() || (i < a.len() && a[i] <= b[k]) {
            i += 1;
            &a[i - 1]
        } else {
            k += 1;
            &b[k - 1]
        };
        if out.last() != Some(next) {
            out.push(next.clone());
        }
    }
    out
}

fn common_partition<T>(fs: &[&StepFunction<T>]) -> Vec<Rational> {
    let mut pts: Vec<Rational> = fs.iter().flat_map(|f| f.breaks.iter().cloned()).collect();
    pts.sort();
    pts.dedup();
    pts
}
