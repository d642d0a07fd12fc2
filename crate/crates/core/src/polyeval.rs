//! Evaluation of polynomials stored as root lists, and of sums of them.
//!
//! Coefficients are never formed. A product `Π (z - x_i)` is accumulated as a
//! complex mantissa times an exact power of two, which keeps degree-10⁴
//! products representable and lets a sum of such products be rescaled by its
//! largest term without leaving binary arithmetic.

use std::cmp::Ordering;
use std::f64::consts::{LN_2, PI};

use crate::{Error, Result, C64};

/// `exp(log_mag) · e^{i·phase}`; `log_mag = -inf` encodes exact zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogComplex {
    pub log_mag: f64,
    pub phase: f64,
}

impl LogComplex {
    pub const ZERO: Self = Self { log_mag: f64::NEG_INFINITY, phase: 0.0 };

    pub fn from_complex(z: C64) -> Self {
        if z == C64::new(0.0, 0.0) {
            Self::ZERO
        } else {
            Self { log_mag: z.norm().ln(), phase: principal(z.arg()) }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    /// The represented value; overflows to infinity for large `log_mag`.
    pub fn to_complex(&self) -> C64 {
        if self.is_zero() {
            C64::new(0.0, 0.0)
        } else {
            C64::from_polar(self.log_mag.exp(), self.phase)
        }
    }
}

/// Maps `-π` to `π` so phases live in `(-π, π]`.
fn principal(phase: f64) -> f64 {
    if phase <= -PI {
        phase + 2.0 * PI
    } else {
        phase
    }
}

/// `mant · 2^exp2` with `mant` kept near unit magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Scaled {
    pub mant: C64,
    pub exp2: i64,
}

const RESCALE_HI: f64 = 1e100;
const RESCALE_LO: f64 = 1e-100;

impl Scaled {
    pub const ONE: Self = Self { mant: C64 { re: 1.0, im: 0.0 }, exp2: 0 };

    pub fn is_zero(&self) -> bool {
        self.mant.re == 0.0 && self.mant.im == 0.0
    }

    #[inline]
    fn mul_assign(&mut self, f: C64) {
        self.mant *= f;
        let big = self.mant.re.abs().max(self.mant.im.abs());
        if !(RESCALE_LO..=RESCALE_HI).contains(&big) && big != 0.0 && big.is_finite() {
            let e = big.log2().floor() as i32;
            self.mant *= 2f64.powi(-e);
            self.exp2 += e as i64;
        }
    }

    pub fn log_mag(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mant.norm().ln() + self.exp2 as f64 * LN_2
        }
    }

    pub fn to_log(self) -> LogComplex {
        if self.is_zero() {
            LogComplex::ZERO
        } else {
            LogComplex { log_mag: self.log_mag(), phase: principal(self.mant.arg()) }
        }
    }

    /// `mant · 2^(exp2 - reference)` as an ordinary complex number.
    pub fn rescaled(&self, reference: i64) -> C64 {
        let d = (self.exp2 - reference).clamp(-1100, 1100) as i32;
        self.mant * 2f64.powi(d)
    }
}

/// A monic polynomial `Π (z - x_i)` stored by its roots.
#[derive(Debug, Clone, PartialEq)]
pub struct RootPoly {
    roots: Vec<C64>,
}

impl RootPoly {
    pub fn new(roots: Vec<C64>) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::InvalidPolynomial("a polynomial needs at least one root".into()));
        }
        Ok(Self { roots })
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn roots(&self) -> &[C64] {
        &self.roots
    }

    /// Largest root modulus.
    pub fn max_modulus(&self) -> f64 {
        self.roots.iter().map(|r| r.norm()).fold(0.0, f64::max)
    }

    pub(crate) fn product(&self, z: C64) -> Scaled {
        let mut acc = Scaled::ONE;
        for &x in &self.roots {
            let f = z - x;
            if f.re == 0.0 && f.im == 0.0 {
                return Scaled { mant: f, exp2: 0 };
            }
            acc.mul_assign(f);
        }
        acc
    }

    /// Product together with `Σ 1/(z - x_i)`; fails on an exact root hit.
    pub(crate) fn product_and_log_derivative(&self, z: C64) -> Result<(Scaled, C64)> {
        let mut acc = Scaled::ONE;
        let mut d = C64::new(0.0, 0.0);
        for &x in &self.roots {
            let f = z - x;
            if f.re == 0.0 && f.im == 0.0 {
                return Err(Error::EvaluationAtRoot);
            }
            acc.mul_assign(f);
            d += f.inv();
        }
        Ok((acc, d))
    }

    /// `Σ log|z - x_i|`, `-inf` at a root.
    pub fn log_abs(&self, z: C64) -> f64 {
        self.product(z).log_mag()
    }

    pub fn log_eval(&self, z: C64) -> LogComplex {
        self.product(z).to_log()
    }

    /// `p'(z)/p(z) = Σ 1/(z - x_i)`.
    pub fn log_derivative(&self, z: C64) -> Result<C64> {
        let mut d = C64::new(0.0, 0.0);
        for &x in &self.roots {
            let f = z - x;
            if f.re == 0.0 && f.im == 0.0 {
                return Err(Error::EvaluationAtRoot);
            }
            d += f.inv();
        }
        Ok(d)
    }
}

/// `S(z) = Σ_k p_k(z)` for equal-degree monic parts.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySum {
    parts: Vec<RootPoly>,
}

/// Orders terms by descending magnitude, ties broken by phase so that the
/// summation order does not depend on the order of the parts.
fn descending(a: &(f64, Scaled), b: &(f64, Scaled)) -> Ordering {
    b.0.total_cmp(&a.0).then_with(|| b.1.mant.arg().total_cmp(&a.1.mant.arg()))
}

impl PolySum {
    pub fn new(parts: Vec<RootPoly>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidPolynomial("a sum needs at least one part".into()));
        };
        let n = first.degree();
        if parts.iter().any(|p| p.degree() != n) {
            return Err(Error::InvalidPolynomial("all parts must have the same degree".into()));
        }
        Ok(Self { parts })
    }

    pub fn from_root_lists(lists: Vec<Vec<C64>>) -> Result<Self> {
        Self::new(lists.into_iter().map(RootPoly::new).collect::<Result<_>>()?)
    }

    pub fn parts(&self) -> &[RootPoly] {
        &self.parts
    }

    pub fn degree(&self) -> usize {
        self.parts[0].degree()
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    /// Largest root modulus over all parts.
    pub fn max_root_modulus(&self) -> f64 {
        self.parts.iter().map(RootPoly::max_modulus).fold(0.0, f64::max)
    }

    /// Exact-scale evaluation: `S(z) = scaled · 2^exp2`.
    pub(crate) fn eval_scaled(&self, z: C64) -> Scaled {
        let mut terms: Vec<(f64, Scaled)> = self
            .parts
            .iter()
            .map(|p| {
                let s = p.product(z);
                (s.log_mag(), s)
            })
            .collect();
        terms.sort_by(descending);
        let top = terms[0].1;
        if top.is_zero() {
            return Scaled { mant: C64::new(0.0, 0.0), exp2: 0 };
        }
        let mant = terms.iter().map(|t| t.1.rescaled(top.exp2)).fold(C64::new(0.0, 0.0), |a, b| a + b);
        Scaled { mant, exp2: top.exp2 }
    }

    /// `(scaled, scale)` with `S(z) = exp(scale) · scaled`, `scale` the largest
    /// part log-magnitude, so `|scaled| <= m`. All-zero parts give `(0, -inf)`.
    pub fn sum_eval(&self, z: C64) -> (C64, f64) {
        let mut terms: Vec<(f64, Scaled)> = self
            .parts
            .iter()
            .map(|p| {
                let s = p.product(z);
                (s.log_mag(), s)
            })
            .collect();
        terms.sort_by(descending);
        let (scale, top) = terms[0];
        if top.is_zero() {
            return (C64::new(0.0, 0.0), f64::NEG_INFINITY);
        }
        let norm = top.mant.norm();
        let scaled = terms.iter().map(|t| t.1.rescaled(top.exp2) / norm).fold(C64::new(0.0, 0.0), |a, b| a + b);
        (scaled, scale)
    }

    /// Newton step `S(z)/S'(z)`.
    pub fn sum_newton_ratio(&self, z: C64) -> Result<C64> {
        let mut terms: Vec<(f64, Scaled, C64)> = Vec::with_capacity(self.parts.len());
        for p in &self.parts {
            let (s, d) = p.product_and_log_derivative(z)?;
            terms.push((s.log_mag(), s, d));
        }
        terms.sort_by(|a, b| descending(&(a.0, a.1), &(b.0, b.1)));
        let top = terms[0].1.exp2;
        let mut num = C64::new(0.0, 0.0);
        let mut den = C64::new(0.0, 0.0);
        for (_, s, d) in &terms {
            let v = s.rescaled(top);
            num += v;
            den += v * d;
        }
        let (nn, dn) = (num.norm(), den.norm());
        if dn == 0.0 || dn < 1e-300 * nn || !dn.is_finite() {
            return Err(Error::DerivativeVanished);
        }
        Ok(num / den)
    }
}
