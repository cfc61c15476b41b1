//! Dense truncated power series in a few variables.
//!
//! A series records every coefficient `x^α` with `α_v ≤ degs[v]`. Binary
//! operations on series of different shapes work on the elementwise minimum,
//! so nothing is ever reported beyond the degrees actually known.

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<T> {
    degs: Vec<usize>,
    coeffs: Vec<T>,
}

fn volume(degs: &[usize]) -> usize {
    degs.iter().map(|d| d + 1).product()
}

impl<T: Scalar> TruncatedSeries<T> {
    pub fn zero(degs: &[usize]) -> Self {
        assert!(!degs.is_empty(), "a series needs at least one variable");
        TruncatedSeries {
            degs: degs.to_vec(),
            coeffs: vec![T::zero(); volume(degs)],
        }
    }

    pub fn constant(degs: &[usize], c: T) -> Self {
        let mut s = TruncatedSeries::zero(degs);
        s.coeffs[0] = c;
        s
    }

    pub fn one(degs: &[usize]) -> Self {
        TruncatedSeries::constant(degs, T::one())
    }

    /// The series `x_v` (zero when `x_v` is truncated at degree 0).
    pub fn var(degs: &[usize], v: usize) -> Self {
        let mut s = TruncatedSeries::zero(degs);
        if degs[v] > 0 {
            let mut e = vec![0; degs.len()];
            e[v] = 1;
            s.set(&e, T::one());
        }
        s
    }

    /// Builds a series from a coefficient function.
    pub fn from_fn(degs: &[usize], mut f: impl FnMut(&[usize]) -> T) -> Self {
        let mut s = TruncatedSeries::zero(degs);
        for flat in 0..s.coeffs.len() {
            let e = s.exponent(flat);
            s.coeffs[flat] = f(&e);
        }
        s
    }

    pub fn degs(&self) -> &[usize] {
        &self.degs
    }

    pub fn nvars(&self) -> usize {
        self.degs.len()
    }

    fn in_range(&self, e: &[usize]) -> bool {
        e.len() == self.degs.len() && e.iter().zip(&self.degs).all(|(a, d)| a <= d)
    }

    fn flat(&self, e: &[usize]) -> usize {
        let mut idx = 0;
        for (a, d) in e.iter().zip(&self.degs) {
            idx = idx * (d + 1) + a;
        }
        idx
    }

    /// Exponent vector of a flat index.
    pub fn exponent(&self, mut flat: usize) -> Vec<usize> {
        let mut e = vec![0; self.degs.len()];
        for v in (0..self.degs.len()).rev() {
            let w = self.degs[v] + 1;
            e[v] = flat % w;
            flat /= w;
        }
        e
    }

    /// Coefficient of `x^e`; zero outside the stored range.
    pub fn get(&self, e: &[usize]) -> T {
        if self.in_range(e) {
            self.coeffs[self.flat(e)].clone()
        } else {
            T::zero()
        }
    }

    pub fn set(&mut self, e: &[usize], c: T) {
        assert!(self.in_range(e), "exponent {e:?} outside {:?}", self.degs);
        let i = self.flat(e);
        self.coeffs[i] = c;
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, &T)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.exponent(i), c))
    }

    /// Restricts to smaller degrees.
    pub fn truncate(&self, degs: &[usize]) -> Self {
        assert_eq!(degs.len(), self.degs.len());
        assert!(degs.iter().zip(&self.degs).all(|(a, b)| a <= b));
        TruncatedSeries::from_fn(degs, |e| self.get(e))
    }

    fn common(&self, other: &Self) -> Vec<usize> {
        assert_eq!(self.degs.len(), other.degs.len(), "arity mismatch");
        self.degs
            .iter()
            .zip(&other.degs)
            .map(|(a, b)| *a.min(b))
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let degs = self.common(other);
        TruncatedSeries::from_fn(&degs, |e| self.get(e) + other.get(e))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let degs = self.common(other);
        TruncatedSeries::from_fn(&degs, |e| self.get(e) - other.get(e))
    }

    pub fn scale(&self, k: &T) -> Self {
        TruncatedSeries {
            degs: self.degs.clone(),
            coeffs: self.coeffs.iter().map(|c| c.clone() * k.clone()).collect(),
        }
    }

    fn nonzero_terms(&self) -> Vec<(Vec<usize>, T)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.exponent(i), c.clone()))
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let degs = self.common(other);
        let mut out: Self = TruncatedSeries::zero(&degs);
        let a = self.nonzero_terms();
        let b = other.nonzero_terms();
        let mut e = vec![0; degs.len()];
        for (ea, ca) in &a {
            if !out.in_range(ea) {
                continue;
            }
            'inner: for (eb, cb) in &b {
                for v in 0..degs.len() {
                    e[v] = ea[v] + eb[v];
                    if e[v] > degs[v] {
                        continue 'inner;
                    }
                }
                let i = out.flat(&e);
                out.coeffs[i] = out.coeffs[i].clone() + ca.clone() * cb.clone();
            }
        }
        out
    }

    /// Multiplies by `x_v^k`; the degree in `x_v` grows by `k`.
    pub fn shift(&self, v: usize, k: usize) -> Self {
        let mut degs = self.degs.clone();
        degs[v] += k;
        TruncatedSeries::from_fn(&degs, |e| {
            if e[v] < k {
                T::zero()
            } else {
                let mut src = e.to_vec();
                src[v] -= k;
                self.get(&src)
            }
        })
    }

    /// `∂/∂x_v`; the degree in `x_v` drops by one.
    pub fn derivative(&self, v: usize) -> Result<Self> {
        if self.degs[v] == 0 {
            return Err(Error::Precondition(format!(
                "derivative in variable {v} of a series truncated at degree 0"
            )));
        }
        let mut degs = self.degs.clone();
        degs[v] -= 1;
        Ok(TruncatedSeries::from_fn(&degs, |e| {
            let mut src = e.to_vec();
            src[v] += 1;
            self.get(&src) * T::from_u64(src[v] as u64)
        }))
    }

    pub fn constant_term(&self) -> T {
        self.coeffs[0].clone()
    }

    /// `Σ_t outer[t] · self^t` for a series without constant term.
    pub fn compose(&self, outer: &[T]) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::Precondition(
                "composition needs an inner series without constant term".into(),
            ));
        }
        let mut acc = TruncatedSeries::zero(&self.degs);
        let mut power = TruncatedSeries::one(&self.degs);
        let max_total: usize = self.degs.iter().sum();
        for (t, c) in outer.iter().enumerate() {
            if t > max_total {
                break;
            }
            if t > 0 {
                power = power.mul(self);
            }
            acc = acc.add(&power.scale(c));
        }
        Ok(acc)
    }

    /// Multiplicative inverse of a series with constant term one.
    pub fn inverse(&self) -> Result<Self> {
        if !self.constant_term().is_one() {
            return Err(Error::Precondition(
                "inverse needs a series with constant term one".into(),
            ));
        }
        let mut out = TruncatedSeries::zero(&self.degs);
        let terms: Vec<(Vec<usize>, T)> = self
            .nonzero_terms()
            .into_iter()
            .filter(|(e, _)| e.iter().any(|&a| a > 0))
            .collect();
        for flat in self.by_total_degree() {
            let e = self.exponent(flat);
            if flat == 0 {
                out.coeffs[0] = T::one();
                continue;
            }
            let mut acc = T::zero();
            for (b, c) in &terms {
                if let Some(rest) = sub_exp(&e, b) {
                    acc = acc + c.clone() * out.get(&rest);
                }
            }
            out.coeffs[flat] = T::zero() - acc;
        }
        Ok(out)
    }

    fn by_total_degree(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.coeffs.len()).collect();
        order.sort_by_key(|&i| self.exponent(i).iter().sum::<usize>());
        order
    }
}

fn sub_exp(a: &[usize], b: &[usize]) -> Option<Vec<usize>> {
    a.iter().zip(b).map(|(x, y)| x.checked_sub(*y)).collect()
}

impl<T: Field> TruncatedSeries<T> {
    /// `exp(self)` for a series without constant term.
    ///
    /// Uses `D(exp f) = exp f · D f` with `D = Σ x_v ∂/∂x_v`, which on the
    /// coefficient of `x^α` reads `|α| E_α = Σ_β |β| f_β E_{α-β}`.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::Precondition(
                "exponential needs a series without constant term".into(),
            ));
        }
        let terms: Vec<(Vec<usize>, T)> = self.nonzero_terms();
        let mut out = TruncatedSeries::zero(&self.degs);
        for flat in self.by_total_degree() {
            if flat == 0 {
                out.coeffs[0] = T::one();
                continue;
            }
            let e = self.exponent(flat);
            let n: usize = e.iter().sum();
            let mut acc = T::zero();
            for (b, c) in &terms {
                if let Some(rest) = sub_exp(&e, b) {
                    let weight = T::from_u64(b.iter().sum::<usize>() as u64);
                    acc = acc + weight * c.clone() * out.get(&rest);
                }
            }
            out.coeffs[flat] = acc / T::from_u64(n as u64);
        }
        Ok(out)
    }
}
