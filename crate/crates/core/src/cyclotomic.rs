//! Exact elements of cyclotomic fields `Q(ζ_M)`.
//!
//! Profile values, lattice phases and the `1/√2` normalisation all live in
//! some `Q(ζ_M)`. An element stores its order `M` and `φ(M)` rational
//! coefficients in the power basis `1, ζ, …, ζ^{φ(M)-1}`, reduced modulo the
//! cyclotomic polynomial `Φ_M`. Mixed orders are lifted to their lcm.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rational::{self, Rational};

fn cyclo_poly(m: u32) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&m) {
        return p.clone();
    }
    // x^m - 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m.is_multiple_of(d) {
            let div = cyclo_poly(d);
            num = poly_div_exact(&num, &div);
        }
    }
    let p = Arc::new(num);
    cache.lock().unwrap().insert(m, p.clone());
    p
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = num.len() - 1;
    let mut q = vec![0i64; nd - dd + 1];
    for i in (0..=nd - dd).rev() {
        let c = rem[i + dd];
        q[i] = c;
        if c != 0 {
            for (k, &dk) in den.iter().enumerate() {
                rem[i + k] -= c * dk;
            }
        }
    }
    q
}

#[cfg(test)]
fn totient(m: u32) -> usize {
    cyclo_poly(m).len() - 1
}

/// Reduces a polynomial in `ζ_m` to the canonical basis.
fn reduce(mut poly: Vec<Rational>, m: u32) -> Vec<Rational> {
    let phi_poly = cyclo_poly(m);
    let phi = phi_poly.len() - 1;
    for deg in (phi..poly.len()).rev() {
        if poly[deg].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut poly[deg]);
        for (i, &pi) in phi_poly.iter().take(phi).enumerate() {
            if pi != 0 {
                poly[deg - phi + i] -= &c * Rational::from_integer(pi.into());
            }
        }
    }
    poly.truncate(phi);
    poly.resize(phi, Rational::zero());
    poly
}

#[derive(Clone)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    fn canonical(order: u32, coeffs: Vec<Rational>) -> Self {
        if coeffs.iter().skip(1).all(Zero::is_zero) {
            let c0 = coeffs.into_iter().next().unwrap_or_else(Rational::zero);
            return Cyclotomic { order: 1, coeffs: vec![c0] };
        }
        Cyclotomic { order, coeffs }
    }

    pub fn zero() -> Self {
        Cyclotomic { order: 1, coeffs: vec![Rational::zero()] }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(q: Rational) -> Self {
        Cyclotomic { order: 1, coeffs: vec![q] }
    }

    /// `ζ_m^k`.
    pub fn root_of_unity(m: u32, k: i64) -> Self {
        assert!(m >= 1);
        let k = k.rem_euclid(m as i64) as usize;
        let mut poly = vec![Rational::zero(); m as usize];
        poly[k] = Rational::one();
        Self::canonical(m, reduce(poly, m))
    }

    /// `re + i·im`.
    pub fn gaussian(re: Rational, im: Rational) -> Self {
        Self::canonical(4, vec![re, im])
    }

    pub fn sqrt2() -> Self {
        Self::root_of_unity(8, 1) - Self::root_of_unity(8, 3)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The rational value, if the element is rational.
    pub fn as_rational(&self) -> Option<&Rational> {
        (self.order == 1).then(|| &self.coeffs[0])
    }

    /// `(re, im)` when the element lies in `Q(i)`.
    pub fn as_gaussian(&self) -> Option<(Rational, Rational)> {
        match self.order {
            1 => Some((self.coeffs[0].clone(), Rational::zero())),
            m if m % 4 == 0 => {
                let i = Self::root_of_unity(4, 1);
                let re = (self + &self.conj()).scale(&Rational::new(1.into(), 2.into()));
                let im = (&(self - &self.conj()) * &(-&i)).scale(&Rational::new(1.into(), 2.into()));
                Some((re.as_rational()?.clone(), im.as_rational()?.clone()))
            }
            _ => None,
        }
    }

    fn lift(&self, m: u32) -> Vec<Rational> {
        if m == self.order {
            return self.coeffs.clone();
        }
        let step = (m / self.order) as usize;
        let mut poly = vec![Rational::zero(); m as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            poly[k * step] = c.clone();
        }
        reduce(poly, m)
    }

    fn common(&self, other: &Self) -> (u32, Vec<Rational>, Vec<Rational>) {
        let m = self.order.lcm(&other.order);
        (m, self.lift(m), other.lift(m))
    }

    pub fn conj(&self) -> Self {
        if self.order == 1 {
            return self.clone();
        }
        let m = self.order as usize;
        let mut poly = vec![Rational::zero(); m];
        for (k, c) in self.coeffs.iter().enumerate() {
            poly[(m - k) % m] = c.clone();
        }
        Self::canonical(self.order, reduce(poly, self.order))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::canonical(self.order, self.coeffs.iter().map(|c| c * q).collect())
    }

    /// `|z|²` as an exact element (always real).
    pub fn norm_sqr_exact(&self) -> Self {
        self * &self.conj()
    }

    pub fn to_complex(&self) -> Complex64 {
        let m = self.order as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = rational::to_f64(c);
            let theta = 2.0 * std::f64::consts::PI * k as f64 / m;
            acc += Complex64::from_polar(v, theta);
        }
        acc
    }

    pub fn abs(&self) -> f64 {
        self.to_complex().norm()
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (_, a, b) = self.common(other);
        a == b
    }
}

impl Eq for Cyclotomic {}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{}", rational::format(q));
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("{}·ζ{}^{}", rational::format(c), self.order, k))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl<'a> Add<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (m, a, b) = self.common(rhs);
        Cyclotomic::canonical(m, a.into_iter().zip(b).map(|(x, y)| x + y).collect())
    }
}

impl<'a> Sub<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (m, a, b) = self.common(rhs);
        Cyclotomic::canonical(m, a.into_iter().zip(b).map(|(x, y)| x - y).collect())
    }
}

impl<'a> Mul<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        if let Some(q) = self.as_rational() {
            return rhs.scale(q);
        }
        if let Some(q) = rhs.as_rational() {
            return self.scale(q);
        }
        let (m, a, b) = self.common(rhs);
        let phi = a.len();
        let mut poly = vec![Rational::zero(); 2 * phi - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (k, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    poly[i + k] += x * y;
                }
            }
        }
        Cyclotomic::canonical(m, reduce(poly, m))
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Cyclotomic {
            type Output = Cyclotomic;
            fn $m(self, rhs: Cyclotomic) -> Cyclotomic {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -&self
    }
}

impl From<Rational> for Cyclotomic {
    fn from(q: Rational) -> Self {
        Cyclotomic::from_rational(q)
    }
}
