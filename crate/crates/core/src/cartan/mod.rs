//! Simply-laced root data: Cartan matrix, roots, degrees, exponents,
//! Coxeter numbers, the Weyl vector and the sign cocycle that fixes the
//! Chevalley structure constants.
//!
//! Roots and weights are stored in the simple-root basis. The bilinear form
//! is normalized so that `(a_i|a_i) = 2`, hence the Gram matrix equals the
//! Cartan matrix, `h = h^vee`, and the Weyl covector is identified with the
//! Weyl vector.

mod chevalley;
pub mod loop_algebra;

pub use chevalley::{chevalley_constants, ChevalleyBasis, GBasis, GElem};

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, frac, q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    D,
    E,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::D => "D",
            Family::E => "E",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Family::A),
            "D" | "d" => Ok(Family::D),
            "E" | "e" => Ok(Family::E),
            other => Err(Error::Unsupported(format!("family {other:?} (expected A, D or E)"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    pub family: Family,
    pub rank: usize,
    pub cartan_matrix: Vec<Vec<i64>>,
    pub gram: Vec<Vec<i64>>,
    /// Positive roots in the simple-root basis, sorted by height then lexicographically.
    pub positive_roots: Vec<Vec<i64>>,
    pub degrees: Vec<u32>,
    pub exponents: Vec<u32>,
    pub coxeter_number: u32,
    pub dual_coxeter: u32,
    pub weyl_vector: Vec<Q>,
    /// Order of the Weyl group when it was small enough to enumerate as an orbit.
    pub weyl_order_checked: Option<u64>,
    gram_inverse: Vec<Vec<Q>>,
    root_index: HashMap<Vec<i64>, usize>,
}

fn cartan_matrix(family: Family, rank: usize) -> Result<Vec<Vec<i64>>> {
    let supported = match family {
        Family::A => rank >= 1,
        Family::D => rank >= 4,
        Family::E => (6..=8).contains(&rank),
    };
    if !supported {
        return Err(Error::Unsupported(format!(
            "{family}{rank}: supported are A_l (l>=1), D_l (l>=4), E_6, E_7, E_8"
        )));
    }
    let mut c = vec![vec![0i64; rank]; rank];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut link = |i: usize, j: usize| {
        c[i][j] = -1;
        c[j][i] = -1;
    };
    // Bourbaki numbering, 0-based.
    match family {
        Family::A => (0..rank - 1).for_each(|i| link(i, i + 1)),
        Family::D => {
            (0..rank - 2).for_each(|i| link(i, i + 1));
            link(rank - 3, rank - 1);
        }
        Family::E => {
            link(0, 2);
            link(1, 3);
            (2..rank - 1).for_each(|i| link(i, i + 1));
        }
    }
    Ok(c)
}

fn invert(m: &[Vec<i64>]) -> Vec<Vec<Q>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Q> = row.iter().map(|&x| q(x)).collect();
            r.extend((0..n).map(|j| if i == j { q(1) } else { q(0) }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero()).expect("singular Cartan matrix");
        a.swap(col, p);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(pivot) {
                    *x -= &f * y;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

impl RootSystem {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        build_root_system(family, rank)
    }

    pub fn name(&self) -> String {
        format!("{}{}", self.family, self.rank)
    }

    pub fn gram_inverse(&self) -> &[Vec<Q>] {
        &self.gram_inverse
    }

    pub fn height(root: &[i64]) -> i64 {
        root.iter().sum()
    }

    /// All roots: positive roots followed by their negatives in the same order.
    pub fn roots(&self) -> Vec<Vec<i64>> {
        let mut all = self.positive_roots.clone();
        all.extend(self.positive_roots.iter().map(|r| r.iter().map(|x| -x).collect::<Vec<_>>()));
        all
    }

    pub fn num_roots(&self) -> usize {
        2 * self.positive_roots.len()
    }

    pub fn root(&self, idx: usize) -> Vec<i64> {
        let n = self.positive_roots.len();
        if idx < n {
            self.positive_roots[idx].clone()
        } else {
            self.positive_roots[idx - n].iter().map(|x| -x).collect()
        }
    }

    pub fn root_index(&self, v: &[i64]) -> Option<usize> {
        self.root_index.get(v).copied()
    }

    pub fn is_root(&self, v: &[i64]) -> bool {
        self.root_index.contains_key(v)
    }

    pub fn highest_root(&self) -> &[i64] {
        self.positive_roots.last().expect("nonempty root system")
    }

    pub fn form_int(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut s = 0;
        for (i, ai) in a.iter().enumerate() {
            if *ai == 0 {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                s += ai * self.gram[i][j] * bj;
            }
        }
        s
    }

    /// `(a|b)` for rational vectors in the simple-root basis.
    pub fn form(&self, a: &[Q], b: &[Q]) -> Q {
        let mut s = Q::zero();
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if self.gram[i][j] != 0 && !bj.is_zero() {
                    s += ai * bj * q(self.gram[i][j]);
                }
            }
        }
        s
    }

    pub fn norm2(&self, a: &[Q]) -> Q {
        self.form(a, a)
    }

    /// `rho / h` as a root-basis vector: the shift weight of the twisted realization.
    pub fn rho_over_h(&self) -> Vec<Q> {
        let h = q(self.coxeter_number as i64);
        self.weyl_vector.iter().map(|x| x / &h).collect()
    }

    pub fn to_json(&self) -> RootSystemJson {
        RootSystemJson {
            family: self.family,
            rank: self.rank,
            cartan_matrix: self.cartan_matrix.clone(),
            gram: self.gram.clone(),
            positive_roots: self.positive_roots.clone(),
            degrees: self.degrees.clone(),
            exponents: self.exponents.clone(),
            coxeter_number: self.coxeter_number,
            dual_coxeter: self.dual_coxeter,
            weyl_vector: self.weyl_vector.iter().map(rational::to_string).collect(),
            weyl_vector_norm2: rational::to_string(&self.norm2(&self.weyl_vector)),
            weyl_order: self.weyl_order_checked,
            weyl_covector_identified_with_weyl_vector: true,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RootSystemJson {
    pub family: Family,
    pub rank: usize,
    pub cartan_matrix: Vec<Vec<i64>>,
    pub gram: Vec<Vec<i64>>,
    pub positive_roots: Vec<Vec<i64>>,
    pub degrees: Vec<u32>,
    pub exponents: Vec<u32>,
    pub coxeter_number: u32,
    pub dual_coxeter: u32,
    pub weyl_vector: Vec<String>,
    pub weyl_vector_norm2: String,
    pub weyl_order: Option<u64>,
    pub weyl_covector_identified_with_weyl_vector: bool,
}

fn enumerate_positive_roots(cartan: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let l = cartan.len();
    let form = |a: &[i64], b: &[i64]| -> i64 {
        (0..l).map(|i| (0..l).map(|j| a[i] * cartan[i][j] * b[j]).sum::<i64>()).sum()
    };
    let mut all: Vec<Vec<i64>> = Vec::new();
    let mut seen = HashSet::new();
    let mut layer: Vec<Vec<i64>> = (0..l)
        .map(|i| {
            let mut v = vec![0; l];
            v[i] = 1;
            v
        })
        .collect();
    while !layer.is_empty() {
        let mut next = BTreeSet::new();
        for a in &layer {
            for i in 0..l {
                let mut e = vec![0; l];
                e[i] = 1;
                // norm-2 vectors of a simply-laced root lattice are roots
                if form(a, &e) == -1 {
                    let mut b = a.clone();
                    b[i] += 1;
                    next.insert(b);
                }
            }
        }
        for a in layer.drain(..) {
            if seen.insert(a.clone()) {
                all.push(a);
            }
        }
        layer = next.into_iter().filter(|b| !seen.contains(b)).collect();
    }
    all.sort_by(|a, b| RootSystem::height(a).cmp(&RootSystem::height(b)).then(a.cmp(b)));
    all
}

/// Size of the Weyl group orbit of `rho`, which is regular, so this is `|W|`.
fn weyl_orbit_size(cartan: &[Vec<i64>], rho_fund: Vec<i64>, cap: usize) -> Option<u64> {
    // rho in the fundamental-weight basis is (1,...,1); s_i acts on fundamental coordinates by
    // lambda -> lambda - lambda_i * (row i of the Cartan matrix).
    let l = cartan.len();
    let mut seen: HashSet<Vec<i64>> = HashSet::from([rho_fund.clone()]);
    let mut stack = vec![rho_fund];
    while let Some(v) = stack.pop() {
        for i in 0..l {
            let c = v[i];
            let w: Vec<i64> = (0..l).map(|j| v[j] - c * cartan[i][j]).collect();
            if seen.insert(w.clone()) {
                if seen.len() > cap {
                    return None;
                }
                stack.push(w);
            }
        }
    }
    Some(seen.len() as u64)
}

pub fn build_root_system(family: Family, rank: usize) -> Result<RootSystem> {
    let cartan = cartan_matrix(family, rank)?;
    let positive_roots = enumerate_positive_roots(&cartan);
    let max_height = positive_roots.iter().map(|r| RootSystem::height(r)).max().unwrap_or(0);
    let coxeter_number = (max_height + 1) as u32;

    let count_height =
        |m: i64| positive_roots.iter().filter(|r| RootSystem::height(r) == m).count();
    let mut exponents = Vec::new();
    for m in 1..=max_height {
        let mult = count_height(m) - count_height(m + 1);
        exponents.extend(std::iter::repeat(m as u32).take(mult));
    }
    let degrees: Vec<u32> = exponents.iter().map(|e| e + 1).collect();

    let mut weyl_vector = vec![Q::zero(); rank];
    for r in &positive_roots {
        for (w, x) in weyl_vector.iter_mut().zip(r) {
            *w += frac(*x, 2);
        }
    }

    let gram_inverse = invert(&cartan);
    let mut root_index = HashMap::new();
    let n = positive_roots.len();
    for (i, r) in positive_roots.iter().enumerate() {
        root_index.insert(r.clone(), i);
        root_index.insert(r.iter().map(|x| -x).collect(), i + n);
    }

    let mut rs = RootSystem {
        family,
        rank,
        cartan_matrix: cartan.clone(),
        gram: cartan.clone(),
        positive_roots,
        degrees,
        exponents,
        coxeter_number,
        dual_coxeter: 0,
        weyl_vector,
        weyl_order_checked: None,
        gram_inverse,
        root_index,
    };
    // h^vee = 1 + (rho | theta), computed independently of the height count.
    let theta: Vec<Q> = rs.highest_root().iter().map(|&x| q(x)).collect();
    let rho_theta = rs.form(&rs.weyl_vector, &theta);
    rs.dual_coxeter = rational::to_i64(&rho_theta)
        .map(|x| x as u32 + 1)
        .ok_or_else(|| Error::Consistency("(rho|theta) not integral".into()))?;

    check_invariants(&rs)?;
    let product: u64 = rs.degrees.iter().map(|&d| d as u64).product();
    if product <= 60_000 {
        let order = weyl_orbit_size(&cartan, vec![1; rank], 60_000)
            .ok_or_else(|| Error::Consistency("Weyl orbit enumeration overflowed".into()))?;
        if order != product {
            return Err(Error::Consistency(format!(
                "product of degrees {product} differs from |W| = {order}"
            )));
        }
        rs.weyl_order_checked = Some(order);
    }
    Ok(rs)
}

fn check_invariants(rs: &RootSystem) -> Result<()> {
    let fail = |m: String| Err(Error::Consistency(m));
    if rs.exponents.len() != rs.rank {
        return fail(format!("{} exponents for rank {}", rs.exponents.len(), rs.rank));
    }
    let sum: u32 = rs.exponents.iter().sum();
    if sum as usize != rs.positive_roots.len() {
        return fail("sum of exponents differs from number of positive roots".into());
    }
    if rs.coxeter_number != rs.dual_coxeter {
        return fail("h != h^vee for a simply-laced type".into());
    }
    for i in 0..rs.rank {
        let mut e = vec![Q::zero(); rs.rank];
        e[i] = q(1);
        if rs.form(&rs.weyl_vector, &e) != q(1) {
            return fail(format!("(rho|alpha_{}) != 1", i + 1));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Root,
    Fundamental,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector {
    pub coords: Vec<Q>,
    pub basis: Basis,
}

impl WeightVector {
    pub fn root(coords: Vec<Q>) -> Self {
        Self { coords, basis: Basis::Root }
    }

    pub fn fundamental(coords: Vec<Q>) -> Self {
        Self { coords, basis: Basis::Fundamental }
    }

    pub fn simple_root(rank: usize, i: usize) -> Self {
        let mut c = vec![Q::zero(); rank];
        c[i] = q(1);
        Self::root(c)
    }

    /// Root-basis coordinates: `lambda = sum_i c_i omega_i = sum_j (C^{-1} c)_j alpha_j`.
    pub fn to_root_basis(&self, rs: &RootSystem) -> WeightVector {
        match self.basis {
            Basis::Root => self.clone(),
            Basis::Fundamental => {
                let inv = rs.gram_inverse();
                let coords = (0..rs.rank)
                    .map(|j| {
                        (0..rs.rank).map(|i| &self.coords[i] * &inv[i][j]).fold(Q::zero(), |a, b| a + b)
                    })
                    .collect();
                WeightVector::root(coords)
            }
        }
    }

    pub fn to_fundamental_basis(&self, rs: &RootSystem) -> WeightVector {
        match self.basis {
            Basis::Fundamental => self.clone(),
            Basis::Root => {
                let coords = (0..rs.rank)
                    .map(|i| {
                        (0..rs.rank)
                            .map(|j| q(rs.cartan_matrix[i][j]) * &self.coords[j])
                            .fold(Q::zero(), |a, b| a + b)
                    })
                    .collect();
                WeightVector::fundamental(coords)
            }
        }
    }
}

/// `(a|b)`; both vectors must be given in the same basis.
pub fn inner_product(rs: &RootSystem, a: &WeightVector, b: &WeightVector) -> Result<Q> {
    if a.coords.len() != rs.rank || b.coords.len() != rs.rank {
        return Err(Error::Invalid(format!("weight length differs from rank {}", rs.rank)));
    }
    match (a.basis, b.basis) {
        (Basis::Root, Basis::Root) => Ok(rs.form(&a.coords, &b.coords)),
        (Basis::Fundamental, Basis::Fundamental) => {
            let inv = rs.gram_inverse();
            let mut s = Q::zero();
            for i in 0..rs.rank {
                for j in 0..rs.rank {
                    s += &a.coords[i] * &inv[i][j] * &b.coords[j];
                }
            }
            Ok(s)
        }
        _ => Err(Error::BasisMismatch(
            "convert both weights to a common basis before pairing".into(),
        )),
    }
}
