//! Sparse multivariate polynomials with per-variable degree caps.
//!
//! Terms whose exponent in some variable exceeds its cap are dropped on
//! construction and after every product, so a product of power series is
//! exact on every monomial that survives.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T> {
    caps: Vec<u32>,
    terms: BTreeMap<Vec<u32>, T>,
}

impl<T: Scalar> Poly<T> {
    pub fn zero(caps: Vec<u32>) -> Self {
        Poly {
            caps,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(caps: Vec<u32>, c: T) -> Self {
        let mut p = Poly::zero(caps);
        let e = vec![0; p.caps.len()];
        p.add_term(e, c);
        p
    }

    pub fn one(caps: Vec<u32>) -> Self {
        Poly::constant(caps, T::one())
    }

    /// The monomial `x_var`.
    pub fn var(caps: Vec<u32>, var: usize) -> Self {
        let mut e = vec![0; caps.len()];
        e[var] = 1;
        let mut p = Poly::zero(caps);
        p.add_term(e, T::one());
        p
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    pub fn nvars(&self) -> usize {
        self.caps.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &T)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn fits(&self, e: &[u32]) -> bool {
        e.iter().zip(&self.caps).all(|(a, c)| a <= c)
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: T) {
        if !self.fits(&e) || c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn coefficient(&self, e: &[u32]) -> T {
        self.terms.get(e).cloned().unwrap_or_else(T::zero)
    }

    pub fn constant_term(&self) -> T {
        self.coefficient(&vec![0; self.caps.len()])
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), T::zero() - c.clone());
        }
        out
    }

    pub fn scale(&self, k: &T) -> Self {
        let mut out = Poly::zero(self.caps.clone());
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone() * k.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Poly::zero(self.caps.clone());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Poly::one(self.caps.clone());
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `1 / (1 - self)` for `self` without constant term: the geometric sum
    /// up to the largest total degree the caps allow.
    pub fn geometric_inverse(&self) -> Self {
        assert!(
            self.constant_term().is_zero(),
            "geometric inverse needs a zero constant term"
        );
        let max_degree: u32 = self.caps.iter().sum();
        let mut acc = Poly::one(self.caps.clone());
        let mut power = Poly::one(self.caps.clone());
        for _ in 0..max_degree {
            power = power.mul(self);
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power);
        }
        acc
    }
}

/// Elementary symmetric polynomial `e_j` in the variables `vars`.
pub fn elementary_symmetric<T: Scalar>(caps: &[u32], vars: &[usize], j: usize) -> Poly<T> {
    // e_j of x_1..x_r from the product (1 + t x_1)...(1 + t x_r), tracked by degree
    let mut by_degree: Vec<Poly<T>> = vec![Poly::one(caps.to_vec())];
    for &v in vars {
        let x = Poly::var(caps.to_vec(), v);
        let mut next = by_degree.clone();
        next.push(Poly::zero(caps.to_vec()));
        for d in 1..next.len() {
            next[d] = next[d].add(&by_degree[d - 1].mul(&x));
        }
        by_degree = next;
    }
    by_degree
        .get(j)
        .cloned()
        .unwrap_or_else(|| Poly::zero(caps.to_vec()))
}
