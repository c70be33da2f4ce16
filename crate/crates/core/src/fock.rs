//! Heisenberg Fock spaces `pi_{k,mu}` over the Cartan subalgebra, with the bosons
//! `b_i = alpha_i` paired through the Gram matrix.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cartan::{RootSystem, WeightVector};
use crate::error::{Error, Result};
use crate::linalg::{SparseMatrix, SparseVec};
use crate::rational::{self, q, Q};

/// Product of creation operators `b_i(-n)`, stored as sorted `(n, i)` pairs.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FockMonomial(Vec<(u32, u32)>);

impl FockMonomial {
    pub fn vacuum() -> Self {
        Self(Vec::new())
    }

    /// From `(boson, n)` pairs meaning `b_boson(-n)`, in any order.
    pub fn from_factors(factors: &[(usize, u32)]) -> Self {
        let mut v: Vec<(u32, u32)> = factors.iter().map(|&(i, n)| (n, i as u32)).collect();
        v.sort_unstable();
        Self(v)
    }

    /// `(boson, n)` pairs in canonical order.
    pub fn factors(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|&(n, i)| (i as usize, n))
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().map(|&(n, _)| n).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn times(&self, i: usize, n: u32) -> Self {
        let key = (n, i as u32);
        let pos = self.0.partition_point(|x| *x <= key);
        let mut v = self.0.clone();
        v.insert(pos, key);
        Self(v)
    }

    pub fn product(&self, other: &Self) -> Self {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        Self(v)
    }

    pub fn multiplicity(&self, i: usize, n: u32) -> usize {
        let key = (n, i as u32);
        self.0.iter().filter(|x| **x == key).count()
    }

    /// Removes one factor `b_i(-n)`, returning its multiplicity before removal.
    pub fn without(&self, i: usize, n: u32) -> Option<(usize, Self)> {
        let key = (n, i as u32);
        let pos = self.0.iter().position(|x| *x == key)?;
        let mult = self.multiplicity(i, n);
        let mut v = self.0.clone();
        v.remove(pos);
        Some((mult, Self(v)))
    }

    /// Distinct modes `n` occurring in the monomial.
    pub fn modes(&self) -> Vec<u32> {
        let mut m: Vec<u32> = self.0.iter().map(|&(n, _)| n).collect();
        m.dedup();
        m
    }

    /// `[[boson, -n], ...]`, used in JSON documents.
    pub fn to_pairs(&self) -> Vec<(usize, i64)> {
        self.factors().map(|(i, n)| (i, -(n as i64))).collect()
    }

    pub fn from_pairs(pairs: &[(usize, i64)]) -> Result<Self> {
        let mut f = Vec::with_capacity(pairs.len());
        for &(i, m) in pairs {
            if m >= 0 {
                return Err(Error::Invalid(format!("creation mode must be negative, got {m}")));
            }
            f.push((i, (-m) as u32));
        }
        Ok(Self::from_factors(&f))
    }
}

impl fmt::Debug for FockMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (i, n)) in self.factors().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "b{}(-{n})", i + 1)?;
        }
        Ok(())
    }
}

pub type FockVec = BTreeMap<FockMonomial, Q>;

pub fn push<K: Ord + Clone>(acc: &mut BTreeMap<K, Q>, k: K, c: Q) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match acc.entry(k) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

pub fn add_scaled<K: Ord + Clone>(acc: &mut BTreeMap<K, Q>, c: &Q, v: &BTreeMap<K, Q>) {
    if c.is_zero() {
        return;
    }
    for (k, x) in v {
        push(acc, k.clone(), c * x);
    }
}

/// Serializable form of a Fock vector: monomials as `[boson, -n]` lists.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FockTerm {
    pub monomial: Vec<(usize, i64)>,
    pub coeff: String,
}

pub fn vec_to_json(v: &FockVec) -> Vec<FockTerm> {
    v.iter().map(|(m, c)| FockTerm { monomial: m.to_pairs(), coeff: rational::to_string(c) }).collect()
}

pub fn vec_from_json(terms: &[FockTerm]) -> Result<FockVec> {
    let mut v = FockVec::new();
    for t in terms {
        push(&mut v, FockMonomial::from_pairs(&t.monomial)?, rational::parse(&t.coeff)?);
    }
    Ok(v)
}

/// Basis of the weight-`s` piece of an `l`-boson Fock space.
#[derive(Debug)]
pub struct GradedBasis {
    pub weight: u32,
    pub monomials: Vec<FockMonomial>,
    index: HashMap<FockMonomial, usize>,
}

impl GradedBasis {
    fn build(l: usize, s: u32) -> Self {
        let mut monomials = Vec::new();
        // parts ordered by (n, i); choose the largest part first so that the
        // resulting list is in colex order of the sorted factor sequences
        fn go(rest: u32, max_part: (u32, u32), l: u32, acc: &mut Vec<(u32, u32)>, out: &mut Vec<FockMonomial>) {
            if rest == 0 {
                let mut v = acc.clone();
                v.reverse();
                out.push(FockMonomial(v));
                return;
            }
            for n in 1..=rest.min(max_part.0) {
                let top = if n == max_part.0 { max_part.1 } else { l - 1 };
                for i in 0..=top {
                    acc.push((n, i));
                    go(rest - n, (n, i), l, acc, out);
                    acc.pop();
                }
            }
        }
        if l > 0 {
            go(s, (s.max(1), l as u32 - 1), l as u32, &mut Vec::new(), &mut monomials);
        } else if s == 0 {
            monomials.push(FockMonomial::vacuum());
        }
        let index = monomials.iter().cloned().enumerate().map(|(k, m)| (m, k)).collect();
        Self { weight: s, monomials, index }
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn index_of(&self, m: &FockMonomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn to_sparse(&self, v: &FockVec) -> Result<SparseVec> {
        let mut out = SparseVec::new();
        for (m, c) in v {
            let i = self
                .index_of(m)
                .ok_or_else(|| Error::Consistency(format!("{m:?} is not of weight {}", self.weight)))?;
            out.insert(i, c.clone());
        }
        Ok(out)
    }

    pub fn from_sparse(&self, v: &SparseVec) -> FockVec {
        v.iter().map(|(&i, c)| (self.monomials[i].clone(), c.clone())).collect()
    }
}

type BasisCache = Mutex<HashMap<(usize, u32), Arc<GradedBasis>>>;

/// Shared, append-only cache of graded bases.
pub fn fock_basis(l: usize, s: u32) -> Arc<GradedBasis> {
    static CACHE: OnceLock<BasisCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("basis cache poisoned");
    guard.entry((l, s)).or_insert_with(|| Arc::new(GradedBasis::build(l, s))).clone()
}

/// `pi_{k,mu}`: level `k`, highest weight `mu` (root-basis coordinates).
#[derive(Clone, Debug)]
pub struct FockModule {
    pub gram: Vec<Vec<i64>>,
    pub gram_inverse: Vec<Vec<Q>>,
    pub level: Q,
    pub mu: Vec<Q>,
    /// `(mu|alpha_i)`
    pub mu_pairing: Vec<Q>,
}

impl FockModule {
    pub fn new(rs: &RootSystem, level: Q, mu: &WeightVector) -> Result<Self> {
        let mu = mu.to_root_basis(rs).coords;
        if mu.len() != rs.rank {
            return Err(Error::BasisMismatch(format!("weight of length {} for rank {}", mu.len(), rs.rank)));
        }
        let mu_pairing = (0..rs.rank)
            .map(|i| (0..rs.rank).map(|j| q(rs.gram[i][j]) * &mu[j]).fold(Q::zero(), |a, b| a + b))
            .collect();
        Ok(Self {
            gram: rs.gram.clone(),
            gram_inverse: rs.gram_inverse().to_vec(),
            level,
            mu,
            mu_pairing,
        })
    }

    pub fn level_one(rs: &RootSystem, mu: &WeightVector) -> Result<Self> {
        Self::new(rs, Q::one(), mu)
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn basis(&self, s: u32) -> Arc<GradedBasis> {
        fock_basis(self.rank(), s)
    }

    /// `(mu|mu)`
    pub fn mu_norm2(&self) -> Q {
        self.mu.iter().zip(&self.mu_pairing).map(|(a, b)| a * b).fold(Q::zero(), |a, b| a + b)
    }

    /// `b_i(m)` on a single monomial.
    pub fn boson_on_monomial(&self, i: usize, m: i64, mono: &FockMonomial, out: &mut FockVec, c: &Q) {
        boson_apply(&self.gram, &self.level, &self.mu_pairing, i, m, mono, c, out);
    }

    pub fn boson(&self, i: usize, m: i64, v: &FockVec) -> FockVec {
        let mut out = FockVec::new();
        for (mono, c) in v {
            self.boson_on_monomial(i, m, mono, &mut out, c);
        }
        out
    }

    /// `h_m` for `h` given in root-basis coordinates.
    pub fn heisenberg(&self, h: &[Q], m: i64, v: &FockVec) -> FockVec {
        let mut out = FockVec::new();
        for (i, c) in h.iter().enumerate() {
            if !c.is_zero() {
                add_scaled(&mut out, c, &self.boson(i, m, v));
            }
        }
        out
    }

    /// Matrix of `h_s` from weight `w` to weight `w - s`.
    pub fn heisenberg_mode(&self, rs: &RootSystem, h: &WeightVector, s: i64, w: u32) -> Result<SparseMatrix> {
        let h = h.to_root_basis(rs).coords;
        let src = self.basis(w);
        let tw = w as i64 - s;
        if tw < 0 {
            return Ok(SparseMatrix::zeros(0, src.dim()));
        }
        let tgt = self.basis(tw as u32);
        let cols = src
            .monomials
            .iter()
            .map(|m| tgt.to_sparse(&self.heisenberg(&h, s, &FockVec::from([(m.clone(), Q::one())]))))
            .collect::<Result<Vec<_>>>()?;
        Ok(SparseMatrix::from_columns(tgt.dim(), cols))
    }

    /// `L_n = 1/2 sum_{ij} G^{ij} sum_m :b_i(m) b_j(n-m):` for level one, as a
    /// closed formula independent of the vertex-operator engine.
    pub fn sugawara_mode(&self, n: i64, v: &FockVec) -> FockVec {
        let mut out = FockVec::new();
        let half = Q::new(1.into(), 2.into());
        for (mono, c) in v {
            let w = mono.weight() as i64;
            let t = w - n;
            if t < 0 {
                continue;
            }
            let single = FockVec::from([(mono.clone(), c.clone())]);
            for m in -t..=w {
                let p = n - m;
                if p < -t || p > w {
                    continue;
                }
                // annihilation part acts first
                let (first, second) = if m >= 0 { (m, p) } else { (p, m) };
                for i in 0..self.rank() {
                    for j in 0..self.rank() {
                        let g = &self.gram_inverse[i][j];
                        if g.is_zero() {
                            continue;
                        }
                        let (a, b) = if m >= 0 { (i, j) } else { (j, i) };
                        let step = self.boson(b, second, &self.boson(a, first, &single));
                        add_scaled(&mut out, &(g * &half), &step);
                    }
                }
            }
        }
        out
    }

    pub fn sugawara_matrix(&self, n: i64, w: u32) -> Result<SparseMatrix> {
        let src = self.basis(w);
        let tw = w as i64 - n;
        if tw < 0 {
            return Ok(SparseMatrix::zeros(0, src.dim()));
        }
        let tgt = self.basis(tw as u32);
        let cols = src
            .monomials
            .iter()
            .map(|m| tgt.to_sparse(&self.sugawara_mode(n, &FockVec::from([(m.clone(), Q::one())]))))
            .collect::<Result<Vec<_>>>()?;
        Ok(SparseMatrix::from_columns(tgt.dim(), cols))
    }
}

/// `b_i(m)` on `mono` in a module whose zero modes act by `pairing[i]`, accumulated
/// into `out` with weight `c`.
#[allow(clippy::too_many_arguments)]
pub fn boson_apply(
    gram: &[Vec<i64>],
    level: &Q,
    pairing: &[Q],
    i: usize,
    m: i64,
    mono: &FockMonomial,
    c: &Q,
    out: &mut FockVec,
) {
    if m < 0 {
        push(out, mono.times(i, (-m) as u32), c.clone());
    } else if m == 0 {
        push(out, mono.clone(), c * &pairing[i]);
    } else {
        let n = m as u32;
        for (j, &g) in gram[i].iter().enumerate() {
            if g == 0 {
                continue;
            }
            if let Some((mult, rest)) = mono.without(j, n) {
                push(out, rest, c * level * q(m * g * mult as i64));
            }
        }
    }
}

/// `omega = 1/2 sum_i b_i(-1) b^i(-1) |0>` with `b^i` dual to `b_i` under the Gram form.
pub fn sugawara_vector(rs: &RootSystem) -> FockVec {
    let inv = rs.gram_inverse();
    let mut v = FockVec::new();
    let half = Q::new(1.into(), 2.into());
    for i in 0..rs.rank {
        for j in 0..rs.rank {
            push(&mut v, FockMonomial::from_factors(&[(i, 1), (j, 1)]), &half * &inv[i][j]);
        }
    }
    v
}

/// Conformal weight of a homogeneous Fock vector.
pub fn homogeneous_weight(v: &FockVec) -> Option<u32> {
    let mut it = v.keys().map(|m| m.weight());
    let w = it.next()?;
    it.all(|x| x == w).then_some(w)
}
