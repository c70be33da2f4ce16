//! Truncated power series in `q` and `(t, q)` with exact coefficients.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cartan::{RootSystem, WeightVector};
use crate::error::{Error, Result};
use crate::rational::{self, q, Q};

/// `q^offset * sum c[t][q] t^t q^q`, truncated at `t <= t_order`, `q <= q_order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QTSeries {
    coeffs: BTreeMap<(u32, u32), Q>,
    t_order: u32,
    q_order: u32,
    offset: Q,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SeriesJson {
    pub t_order: u32,
    pub q_order: u32,
    pub q_offset: String,
    /// `(t, q, coefficient)` triples in lexicographic `(t, q)` order
    pub terms: Vec<(u32, u32, String)>,
}

impl QTSeries {
    pub fn zero(t_order: u32, q_order: u32) -> Self {
        Self { coeffs: BTreeMap::new(), t_order, q_order, offset: Q::zero() }
    }

    pub fn one(t_order: u32, q_order: u32) -> Self {
        Self::monomial(t_order, q_order, 0, 0, Q::one())
    }

    pub fn monomial(t_order: u32, q_order: u32, t: u32, qe: u32, c: Q) -> Self {
        let mut s = Self::zero(t_order, q_order);
        s.set(t, qe, c);
        s
    }

    /// Series in `q` alone (`t_order = 0`) from a coefficient list.
    pub fn from_q_coeffs(coeffs: &[Q], offset: Q) -> Self {
        let q_order = coeffs.len().saturating_sub(1) as u32;
        let mut s = Self::zero(0, q_order);
        for (i, c) in coeffs.iter().enumerate() {
            s.set(0, i as u32, c.clone());
        }
        s.offset = offset;
        s
    }

    fn from_dense(grid: &[Vec<Q>], offset: Q) -> Self {
        let t_order = grid.len() as u32 - 1;
        let q_order = grid[0].len() as u32 - 1;
        let mut s = Self::zero(t_order, q_order);
        for (a, row) in grid.iter().enumerate() {
            for (b, c) in row.iter().enumerate() {
                s.set(a as u32, b as u32, c.clone());
            }
        }
        s.offset = offset;
        s
    }

    fn to_dense(&self) -> Vec<Vec<Q>> {
        let mut g = vec![vec![Q::zero(); self.q_order as usize + 1]; self.t_order as usize + 1];
        for (&(a, b), c) in &self.coeffs {
            g[a as usize][b as usize] = c.clone();
        }
        g
    }

    fn set(&mut self, t: u32, qe: u32, c: Q) {
        if t > self.t_order || qe > self.q_order || c.is_zero() {
            self.coeffs.remove(&(t, qe));
        } else {
            self.coeffs.insert((t, qe), c);
        }
    }

    pub fn t_order(&self) -> u32 {
        self.t_order
    }

    pub fn q_order(&self) -> u32 {
        self.q_order
    }

    pub fn offset(&self) -> &Q {
        &self.offset
    }

    pub fn with_offset(mut self, offset: Q) -> Self {
        self.offset = offset;
        self
    }

    pub fn coeff(&self, t: u32, qe: u32) -> Q {
        self.coeffs.get(&(t, qe)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &Q)> {
        self.coeffs.iter().map(|(&(a, b), c)| (a, b, c))
    }

    /// `t = 1` specialization, as a list of `q` coefficients.
    pub fn at_t_one(&self) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.q_order as usize + 1];
        for (&(_, b), c) in &self.coeffs {
            out[b as usize] += c;
        }
        out
    }

    /// Polynomial in `t` multiplying `q^n`.
    pub fn q_row(&self, n: u32) -> Vec<Q> {
        (0..=self.t_order).map(|a| self.coeff(a, n)).collect()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.offset != other.offset {
            return Err(Error::Invalid("adding series with different q-offsets".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut s = Self::zero(self.t_order.min(other.t_order), self.q_order.min(other.q_order));
        s.offset = self.offset.clone();
        for (&(a, b), c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            let v = s.coeff(a, b) + c;
            s.set(a, b, v);
        }
        Ok(s)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut s = Self::zero(self.t_order.min(other.t_order), self.q_order.min(other.q_order));
        s.offset = &self.offset + &other.offset;
        for (&(a, b), c) in &self.coeffs {
            for (&(x, y), d) in &other.coeffs {
                if a + x <= s.t_order && b + y <= s.q_order {
                    let v = s.coeff(a + x, b + y) + c * d;
                    s.set(a + x, b + y, v);
                }
            }
        }
        s
    }

    /// Inverse of a series with invertible constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.coeff(0, 0);
        if c0.is_zero() {
            return Err(Error::Invalid("series with zero constant term is not invertible".into()));
        }
        let f = self.to_dense();
        let (tn, qn) = (f.len(), f[0].len());
        let mut g = vec![vec![Q::zero(); qn]; tn];
        let inv0 = c0.recip();
        for a in 0..tn {
            for b in 0..qn {
                let mut acc = if a == 0 && b == 0 { Q::one() } else { Q::zero() };
                for x in 0..=a {
                    for y in 0..=b {
                        if (x, y) != (0, 0) && !f[x][y].is_zero() {
                            acc -= &f[x][y] * &g[a - x][b - y];
                        }
                    }
                }
                g[a][b] = acc * &inv0;
            }
        }
        Ok(Self::from_dense(&g, -self.offset.clone()))
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            t_order: self.t_order,
            q_order: self.q_order,
            q_offset: rational::to_string(&self.offset),
            terms: self.terms().map(|(a, b, c)| (a, b, rational::to_string(c))).collect(),
        }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Self> {
        let mut s = Self::zero(j.t_order, j.q_order);
        s.offset = rational::parse(&j.q_offset)?;
        for (a, b, c) in &j.terms {
            s.set(*a, *b, rational::parse(c)?);
        }
        Ok(s)
    }
}

/// Divides `grid` in place by `1 - t^dt q^dq` (`dt + dq > 0`).
fn divide_by_one_minus(grid: &mut [Vec<Q>], dt: usize, dq: usize) {
    for a in dt..grid.len() {
        for b in dq..grid[a].len() {
            let prev = grid[a - dt][b - dq].clone();
            if !prev.is_zero() {
                grid[a][b] += prev;
            }
        }
    }
}

/// `prod_k prod_{n>=1} (1 - t^{d_k} q^n)^{-1}` to orders `(t_order, q_order)`.
pub fn hilbert_grz(rs: &RootSystem, t_order: u32, q_order: u32) -> QTSeries {
    let mut g = vec![vec![Q::zero(); q_order as usize + 1]; t_order as usize + 1];
    g[0][0] = Q::one();
    for &d in &rs.degrees {
        for n in 1..=q_order as usize {
            divide_by_one_minus(&mut g, d as usize, n);
        }
    }
    QTSeries::from_dense(&g, Q::zero())
}

/// `1 / phi(q)^colors` to order `q_order`.
pub fn colored_partitions(colors: usize, q_order: u32) -> Vec<Q> {
    let mut g = vec![vec![Q::zero(); q_order as usize + 1]];
    g[0][0] = Q::one();
    for _ in 0..colors {
        for n in 1..=q_order as usize {
            divide_by_one_minus(&mut g, 0, n);
        }
    }
    g.pop().unwrap()
}

fn shifted_level(rs: &RootSystem, k: &Q) -> Result<Q> {
    let kh = k + q(rs.dual_coxeter as i64);
    if kh.is_zero() {
        return Err(Error::CriticalLevel(rational::to_string(k)));
    }
    Ok(kh)
}

/// `c(k) = l - 12((k+h)|rho|^2 - 2|rho|^2 + |rho|^2/(k+h))`, with the Weyl covector
/// identified with the Weyl vector.
pub fn central_charge(rs: &RootSystem, k: &Q) -> Result<Q> {
    let kh = shifted_level(rs, k)?;
    let rho2 = rs.norm2(&rs.weyl_vector);
    let bracket = &kh * &rho2 - q(2) * &rho2 + &rho2 / &kh;
    Ok(q(rs.rank as i64) - q(12) * bracket)
}

/// Leading exponent `|lambda + rho|^2 / (2(k+h)) + (c(k) - l)/24` of the Verma character.
pub fn verma_offset(rs: &RootSystem, lambda: &WeightVector, k: &Q) -> Result<Q> {
    let kh = shifted_level(rs, k)?;
    let lam = lambda.to_root_basis(rs).coords;
    if lam.len() != rs.rank {
        return Err(Error::BasisMismatch(format!("weight of length {} for rank {}", lam.len(), rs.rank)));
    }
    let shifted: Vec<Q> = lam.iter().zip(&rs.weyl_vector).map(|(a, b)| a + b).collect();
    let c = central_charge(rs, k)?;
    Ok(rs.norm2(&shifted) / (q(2) * kh) + (c - q(rs.rank as i64)) / q(24))
}

pub fn verma_character(rs: &RootSystem, lambda: &WeightVector, k: &Q, q_order: u32) -> Result<QTSeries> {
    let offset = verma_offset(rs, lambda, k)?;
    Ok(QTSeries::from_q_coeffs(&colored_partitions(rs.rank, q_order), offset))
}

/// Character of a vertex algebra freely generated in the degrees of `rs`.
pub fn w_vacuum_character(rs: &RootSystem, q_order: u32) -> QTSeries {
    let mut g = vec![vec![Q::zero(); q_order as usize + 1]];
    g[0][0] = Q::one();
    for &d in &rs.degrees {
        for n in d as usize..=q_order as usize {
            divide_by_one_minus(&mut g, 0, n);
        }
    }
    QTSeries::from_dense(&g, Q::zero())
}
