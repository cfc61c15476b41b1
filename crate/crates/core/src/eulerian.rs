//! Eulerian numbers and their multiset generalization `A_{K,s}`: the number
//! of permutations of a multiset with multiplicities `K` having exactly `s`
//! ascents.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::distribution::count_with;
use crate::error::{Error, Result};
use crate::multiset::Multiset;
use crate::pattern::Pattern;
use crate::poly::{elementary_symmetric, Poly};
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;
use crate::{Budget, Count};

/// Eulerian numbers `E_{m,s}` for `m ≤ m_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerTriangle<T> {
    m_max: usize,
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> EulerTriangle<T> {
    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn row(&self, m: usize) -> &[T] {
        &self.rows[m]
    }

    pub fn get(&self, m: usize, s: usize) -> T {
        self.rows
            .get(m)
            .and_then(|r| r.get(s))
            .cloned()
            .unwrap_or_else(T::zero)
    }
}

pub fn eulerian_table<T: Scalar>(m_max: usize) -> EulerTriangle<T> {
    let mut rows: Vec<Vec<T>> = vec![vec![T::one()]];
    for m in 1..=m_max {
        let prev = &rows[m - 1];
        let at = |s: isize| -> T {
            if s < 0 {
                T::zero()
            } else {
                prev.get(s as usize).cloned().unwrap_or_else(T::zero)
            }
        };
        let row: Vec<T> = (0..m)
            .map(|s| {
                T::from_u64(s as u64 + 1) * at(s as isize)
                    + T::from_u64((m - s) as u64) * at(s as isize - 1)
            })
            .collect();
        rows.push(row);
    }
    EulerTriangle { m_max, rows }
}

fn ascent_pattern() -> Pattern {
    Pattern::consecutive(vec![1, 2]).expect("valid pattern")
}

fn descent_pattern() -> Pattern {
    Pattern::consecutive(vec![2, 1]).expect("valid pattern")
}

/// `A_{K,s}` by enumerating the multiset with multiplicities `K` sorted
/// in decreasing order.
pub fn a_bruteforce(k: &[usize], s: u64, budget: Budget) -> Result<Count> {
    let m = Multiset::new(k).canonical();
    count_with(&m, &ascent_pattern(), s, budget)
}

/// Right side of the insertion recurrence
/// `A_{K,s} = (s+1) A_{K',s} + (ΣK - s) A_{K',s-1}`, where `K'` drops one
/// letter of multiplicity one. Both `A_{K',·}` values come from enumeration.
pub fn a_recurrence_check(k: &[usize], s: u64, budget: Budget) -> Result<Count> {
    let pos = k
        .iter()
        .position(|&x| x == 1)
        .ok_or_else(|| Error::Precondition("K must contain a multiplicity equal to 1".into()))?;
    if s == 0 {
        return Err(Error::Precondition("s must be at least 1".into()));
    }
    let mut reduced = k.to_vec();
    reduced.remove(pos);
    let total: usize = k.iter().sum();
    let same = BigInt::from(a_bruteforce(&reduced, s, budget)?);
    let below = BigInt::from(a_bruteforce(&reduced, s - 1, budget)?);
    let value = BigInt::from(s + 1) * same + (BigInt::from(total) - BigInt::from(s)) * below;
    value
        .to_biguint()
        .ok_or_else(|| Error::Integrity(format!("negative recurrence value {value}")))
}

/// `A_{m,k,s}`: `k` letters doubled, `m - 2k` single, `m` letters in all.
#[derive(Clone, Debug, PartialEq)]
pub struct AscentTable<T> {
    m_max: usize,
    // data[m][k][s] for k ≤ m/2 and s ≤ m
    data: Vec<Vec<Vec<T>>>,
}

impl<T: Scalar> AscentTable<T> {
    pub fn m_max(&self) -> usize {
        self.m_max
    }

    /// Zero outside `k ≤ m/2`, `s ≤ m`.
    pub fn get(&self, m: usize, k: usize, s: usize) -> T {
        self.data
            .get(m)
            .and_then(|r| r.get(k))
            .and_then(|r| r.get(s))
            .cloned()
            .unwrap_or_else(T::zero)
    }

    /// The row `s ↦ A_{m,k,s}`, without trailing zeros.
    pub fn row(&self, m: usize, k: usize) -> Vec<T> {
        let mut r: Vec<T> = self
            .data
            .get(m)
            .and_then(|r| r.get(k))
            .cloned()
            .unwrap_or_default();
        while r.len() > 1 && r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
        r
    }

    /// All `(m, k, s, value)` entries with nonzero value, in order.
    pub fn entries(&self) -> Vec<(usize, usize, usize, T)> {
        let mut out = Vec::new();
        for (m, by_k) in self.data.iter().enumerate() {
            for (k, by_s) in by_k.iter().enumerate() {
                for (s, v) in by_s.iter().enumerate() {
                    if !v.is_zero() {
                        out.push((m, k, s, v.clone()));
                    }
                }
            }
        }
        out
    }
}

/// Multiplicity vector behind `A_{m,k,s}`.
pub fn witness_multiplicities(m: usize, k: usize) -> Vec<usize> {
    let mut v = vec![2; k];
    v.extend(std::iter::repeat_n(1, m.saturating_sub(2 * k)));
    v
}

/// Fills `A_{m,k,s}` from the boundary rows and
/// `2 A_{m,k,s} = A_{m,k-1,s} + A_{m-1,k-1,s} - A_{m-1,k-1,s-1}`.
pub fn a_table<T: Scalar + Integer>(m_max: usize) -> Result<AscentTable<T>> {
    let euler: EulerTriangle<T> = eulerian_table(m_max);
    let two = T::from_u64(2);
    let mut data: Vec<Vec<Vec<T>>> = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let mut by_k: Vec<Vec<T>> = Vec::with_capacity(m / 2 + 1);
        by_k.push((0..=m).map(|s| euler.get(m, s)).collect());
        for k in 1..=m / 2 {
            let mut row = Vec::with_capacity(m + 1);
            row.push(T::one());
            for s in 1..=m {
                let at = |mm: usize, kk: usize, ss: usize, cur: &Vec<Vec<T>>| -> T {
                    let src = if mm == m { cur } else { &data[mm] };
                    src.get(kk)
                        .and_then(|r| r.get(ss))
                        .cloned()
                        .unwrap_or_else(T::zero)
                };
                let numerator = at(m, k - 1, s, &by_k) + at(m - 1, k - 1, s, &by_k)
                    - at(m - 1, k - 1, s - 1, &by_k);
                let (q, r) = numerator.div_rem(&two);
                if !r.is_zero() || q < T::zero() {
                    return Err(Error::Integrity(format!(
                        "A table entry (m={m}, k={k}, s={s}) has odd or negative numerator {numerator:?}"
                    )));
                }
                row.push(q);
            }
            by_k.push(row);
        }
        data.push(by_k);
    }
    Ok(AscentTable { m_max, data })
}

/// `a_i^2 ≥ a_{i-1} a_{i+1}` at every interior index.
pub fn is_log_concave<T: Scalar + PartialOrd>(row: &[T]) -> bool {
    row.windows(3)
        .all(|w| w[1].clone() * w[1].clone() >= w[0].clone() * w[2].clone())
}

fn monomial_space(m: &Multiset, s: u64) -> BigUint {
    m.multiplicities()
        .iter()
        .fold(BigUint::from(s + 1), |acc, &k| acc * BigUint::from(k + 1))
}

fn target_exponent(m: &Multiset, s: u64) -> Vec<u32> {
    let mut e = vec![s as u32];
    e.extend(m.multiplicities().iter().map(|&k| k as u32));
    e
}

fn to_count(v: BigInt) -> Result<Count> {
    v.to_biguint()
        .ok_or_else(|| Error::Integrity(format!("negative coefficient {v}")))
}

/// Coefficient of `x0^s x1^k1 ... xn^kn` in
/// `Π_j (x1 + ... + xj + x0 (x_{j+1} + ... + xn))^{k_j}`, which counts the
/// permutations of `M` with `s` ascents.
pub fn macmahon_coefficient(m: &Multiset, s: u64, budget: Budget) -> Result<Count> {
    budget.check(&monomial_space(m, s))?;
    let n = m.letters();
    let caps = target_exponent(m, s);
    let mut product: Poly<BigInt> = Poly::one(caps.clone());
    for (j, &k) in m.multiplicities().iter().enumerate() {
        let mut factor: Poly<BigInt> = Poly::zero(caps.clone());
        for i in 1..=n {
            let x = Poly::var(caps.clone(), i);
            factor = if i <= j + 1 {
                factor.add(&x)
            } else {
                factor.add(&x.mul(&Poly::var(caps.clone(), 0)))
            };
        }
        product = product.mul(&factor.pow(k as u32));
    }
    to_count(product.coefficient(&caps))
}

/// Coefficient of `x0^s x1^k1 ... xn^kn` in
/// `1 / (1 - e1 + (1-x0) e2 - (1-x0)^2 e3 + ...)`, which counts the
/// permutations of `M` with `s` descents.
pub fn gf21_coefficient(m: &Multiset, s: u64, budget: Budget) -> Result<Count> {
    budget.check(&monomial_space(m, s))?;
    let n = m.letters();
    let caps = target_exponent(m, s);
    let vars: Vec<usize> = (1..=n).collect();
    let one_minus_x0 = Poly::<BigInt>::one(caps.clone()).sub(&Poly::var(caps.clone(), 0));
    let mut u: Poly<BigInt> = Poly::zero(caps.clone());
    for j in 1..=n {
        let term = one_minus_x0
            .pow(j as u32 - 1)
            .mul(&elementary_symmetric(&caps, &vars, j));
        u = if j % 2 == 1 {
            u.add(&term)
        } else {
            u.sub(&term)
        };
    }
    to_count(u.geometric_inverse().coefficient(&caps))
}

/// Outcome of a coefficientwise series identity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesCheck {
    pub holds: bool,
    pub degrees: Vec<usize>,
    pub coefficients_checked: usize,
    pub mismatch: Option<Mismatch>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub exponent: Vec<usize>,
    pub lhs: String,
    pub rhs: String,
}

fn compare(lhs: &TruncatedSeries<BigRational>, rhs: &TruncatedSeries<BigRational>) -> SeriesCheck {
    assert_eq!(lhs.degs(), rhs.degs());
    let mut checked = 0;
    for (e, a) in lhs.iter() {
        checked += 1;
        let b = rhs.get(&e);
        if *a != b {
            return SeriesCheck {
                holds: false,
                degrees: lhs.degs().to_vec(),
                coefficients_checked: checked,
                mismatch: Some(Mismatch {
                    exponent: e,
                    lhs: a.to_string(),
                    rhs: b.to_string(),
                }),
            };
        }
    }
    SeriesCheck {
        holds: true,
        degrees: lhs.degs().to_vec(),
        coefficients_checked: checked,
        mismatch: None,
    }
}

fn factorials(n: usize) -> Vec<BigInt> {
    let mut f = vec![BigInt::one()];
    for i in 1..=n {
        let next = f[i - 1].clone() * BigInt::from(i);
        f.push(next);
    }
    f
}

/// `(1-z) e^{x(1-z)} / (1 - z e^{x(1-z)})` in variables `(x, z)` placed at
/// positions `xv`, `zv` of a series with degrees `degs`.
fn eulerian_closed_form(
    degs: &[usize],
    xv: usize,
    zv: usize,
) -> Result<TruncatedSeries<BigRational>> {
    type S = TruncatedSeries<BigRational>;
    let one = S::one(degs);
    let x = S::var(degs, xv);
    let z = S::var(degs, zv);
    let one_minus_z = one.sub(&z);
    let e = x.mul(&one_minus_z).exp()?;
    let denominator = one.sub(&z.mul(&e));
    Ok(one_minus_z.mul(&e).mul(&denominator.inverse()?))
}

/// Checks `Σ E_{m,s} x^m/m! z^s = (1-z) e^{x(1-z)} / (1 - z e^{x(1-z)})`
/// through `x^x_deg z^z_deg`.
pub fn verify_eulerian_egf(x_deg: usize, z_deg: usize) -> Result<SeriesCheck> {
    let degs = [x_deg, z_deg];
    let euler: EulerTriangle<BigInt> = eulerian_table(x_deg);
    let fact = factorials(x_deg);
    let lhs = TruncatedSeries::from_fn(&degs, |e| {
        BigRational::new(euler.get(e[0], e[1]), fact[e[0]].clone())
    });
    let rhs = eulerian_closed_form(&degs, 0, 1)?;
    Ok(compare(&lhs, &rhs))
}

/// Minimal table depth for [`verify_pde_with`].
pub fn pde_table_depth(x_deg: usize, y_deg: usize) -> usize {
    x_deg + 2 * y_deg
}

/// Checks
/// `𝓐 = (y/2) 𝓐_xx + (y/2)(1-z) 𝓐_x + (1-z) e^{x(1-z)} / (1 - z e^{x(1-z)})`
/// where `𝓐 = Σ A_{m,k,s} x^{m-2k}/(m-2k)! y^k z^s`, through
/// `x^x_deg y^y_deg z^z_deg`.
pub fn verify_pde_with(
    table: &AscentTable<BigInt>,
    x_deg: usize,
    y_deg: usize,
    z_deg: usize,
) -> Result<SeriesCheck> {
    let depth = pde_table_depth(x_deg, y_deg);
    if table.m_max() < depth {
        return Err(Error::Precondition(format!(
            "A table covers m ≤ {} but the check needs m ≤ {depth}",
            table.m_max()
        )));
    }
    type S = TruncatedSeries<BigRational>;
    let fact = factorials(x_deg + 2);
    let coefficient = |e: &[usize]| {
        let (a, b, c) = (e[0], e[1], e[2]);
        BigRational::new(table.get(a + 2 * b, b, c), fact[a].clone())
    };
    let degs = [x_deg, y_deg, z_deg];
    let lhs = S::from_fn(&degs, coefficient);

    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let one_minus_z = S::one(&degs).sub(&S::var(&degs, 2));
    let mut rhs = eulerian_closed_form(&degs, 0, 2)?;
    if y_deg > 0 {
        // y · (...) only needs y-degrees below y_deg
        let inner = S::from_fn(&[x_deg + 2, y_deg - 1, z_deg], coefficient);
        let first = inner.derivative(0)?;
        let second = first.derivative(0)?;
        let first = first.truncate(&[x_deg, y_deg - 1, z_deg]);
        let bracket = second.add(&first.mul(&one_minus_z.truncate(&[x_deg, y_deg - 1, z_deg])));
        rhs = rhs.add(&bracket.scale(&half).shift(1, 1));
    }
    Ok(compare(&lhs, &rhs))
}

/// [`verify_pde_with`] on a freshly built table of the minimal depth.
pub fn verify_pde(x_deg: usize, y_deg: usize, z_deg: usize) -> Result<SeriesCheck> {
    let table = a_table::<BigInt>(pde_table_depth(x_deg, y_deg))?;
    verify_pde_with(&table, x_deg, y_deg, z_deg)
}

/// Brute-force comparison of a generating-function coefficient with the
/// occurrence count it is meant to produce.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GfCheck {
    pub pattern: String,
    pub multiset: Multiset,
    pub s: u64,
    #[serde(with = "decimal")]
    pub coefficient: Count,
    #[serde(with = "decimal")]
    pub bruteforce: Count,
    pub holds: bool,
}

/// Which generating function `verify_gf` expands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GfKind {
    Ascents,
    Descents,
}

pub fn verify_gf(kind: GfKind, m: &Multiset, s: u64, budget: Budget) -> Result<GfCheck> {
    let (coefficient, pattern) = match kind {
        GfKind::Ascents => (macmahon_coefficient(m, s, budget)?, ascent_pattern()),
        GfKind::Descents => (gf21_coefficient(m, s, budget)?, descent_pattern()),
    };
    let bruteforce = count_with(m, &pattern, s, budget)?;
    Ok(GfCheck {
        pattern: pattern.to_string(),
        multiset: m.clone(),
        s,
        holds: coefficient == bruteforce,
        coefficient,
        bruteforce,
    })
}

mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Converts a table entry to `u64` when it fits.
pub fn entry_u64(v: &BigInt) -> Option<u64> {
    if v.is_negative() {
        None
    } else {
        v.to_u64()
    }
}
