//! The positive principal Heisenberg `s+` and the Brylinski filtration
//! `F^i Z_n = {v : x^{i+1} v = 0 for all x in s+}` on the dominant weight spaces.
//!
//! Since `s+` is commutative, polarization turns the power condition into the
//! condition that every product `u_1 ... u_{i+1}` of basis elements kills `v`. That is
//! solved by a recursion over principal degrees:
//! `K^i(d) = {v in V^(d) : u v in K^{i-1}(d - m) for every basis u of degree m}`,
//! `K^{-1} = 0`, and `F^i Z_n` is the part of `K^i(h n)` at lattice point 0.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cartan::loop_algebra::{LoopAlgebra, LoopBasis, LoopElement};
use crate::cartan::{ChevalleyBasis, RootSystem};
use crate::error::{Error, Result};
use crate::linalg::{kernel, SparseMatrix, SparseVec, Subspace};
use crate::rational::{frac, q, Q};
use crate::series::hilbert_grz;
use crate::twisted::TwistedRealization;

/// Basis of `s+` per principal degree.
#[derive(Clone, Debug)]
pub struct SPlusBasis {
    pub by_degree: BTreeMap<i64, Vec<LoopElement>>,
}

impl SPlusBasis {
    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.by_degree.iter().map(|(&m, v)| (m, v.len())).collect()
    }

    /// `(degree, index)` of every basis element with degree at most `d`.
    pub fn labels_up_to(&self, d: i64) -> Vec<(i64, usize)> {
        self.by_degree
            .range(..=d)
            .flat_map(|(&m, v)| (0..v.len()).map(move |k| (m, k)))
            .collect()
    }

    pub fn element(&self, m: i64, k: usize) -> &LoopElement {
        &self.by_degree[&m][k]
    }
}

/// Expected `dim s+_m = #{k : e_k = m mod h}`.
pub fn exponent_multiplicity(rs: &RootSystem, m: i64) -> usize {
    let h = rs.coxeter_number as i64;
    rs.exponents.iter().filter(|&&e| (e as i64 - m).rem_euclid(h) == 0).count()
}

/// Solves `[x, e] = 0` in every principal degree `1..=max_degree`.
pub fn splus_basis(cb: &ChevalleyBasis, max_degree: i64) -> Result<SPlusBasis> {
    let la = LoopAlgebra::new(cb);
    let e = la.principal_nilpotent();
    let mut by_degree = BTreeMap::new();
    for m in 1..=max_degree {
        let comp = la.degree_component(m);
        let images: Vec<LoopElement> = comp.iter().map(|&b| la.bracket(&LoopElement::from([(b, q(1))]), &e)).collect();
        let mut index: BTreeMap<LoopBasis, usize> = BTreeMap::new();
        for img in &images {
            for b in img.keys() {
                let n = index.len();
                index.entry(*b).or_insert(n);
            }
        }
        let cols: Vec<SparseVec> = images.iter().map(|img| img.iter().map(|(b, c)| (index[b], c.clone())).collect()).collect();
        let ker = kernel(&SparseMatrix::from_columns(index.len(), cols));
        let expect = exponent_multiplicity(cb.root_system(), m);
        if ker.len() != expect {
            return Err(Error::Consistency(format!(
                "s+ has dimension {} in degree {m}, exponent multiplicity is {expect}",
                ker.len()
            )));
        }
        let elems: Vec<LoopElement> = ker.iter().map(|v| v.iter().map(|(&k, c)| (comp[k], c.clone())).collect()).collect();
        if !elems.is_empty() {
            by_degree.insert(m, elems);
        }
    }
    Ok(SPlusBasis { by_degree })
}

/// Dimensions `dim F^i Z_n` and their jumps, next to the series prediction.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ProfileRow {
    pub n: u32,
    pub dim_z: usize,
    /// `dim F^i Z_n` for `i = 0..=i_max`
    pub filtration_dims: Vec<usize>,
    /// `(i, dim F^i - dim F^{i-1})` for nonzero jumps
    pub jumps: Vec<(u32, usize)>,
    pub expected_jumps: Vec<(u32, usize)>,
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FiltrationProfile {
    pub n_max: u32,
    pub i_max: u32,
    pub rows: Vec<ProfileRow>,
    pub all_match: bool,
}

type Annihilator = Arc<Vec<SparseVec>>;

pub struct Brylinski {
    tw: Arc<TwistedRealization>,
    splus: SPlusBasis,
    n_max: u32,
    /// transposed realized operators keyed by `(degree, index, source piece)`
    ops: Mutex<HashMap<(i64, usize, i64), Arc<SparseMatrix>>>,
    /// functionals cutting out `K^i(d)`, keyed by `(i, d)`
    ann: Mutex<HashMap<(i64, i64), Annihilator>>,
}

impl Brylinski {
    pub fn new(tw: Arc<TwistedRealization>, n_max: u32) -> Result<Self> {
        let h = tw.root_system().coxeter_number as i64;
        let splus = splus_basis(tw.voa().chevalley(), h * n_max as i64)?;
        Ok(Self { tw, splus, n_max, ops: Mutex::new(HashMap::new()), ann: Mutex::new(HashMap::new()) })
    }

    pub fn splus(&self) -> &SPlusBasis {
        &self.splus
    }

    pub fn realization(&self) -> &TwistedRealization {
        &self.tw
    }

    fn h(&self) -> i64 {
        self.tw.root_system().coxeter_number as i64
    }

    fn check_range(&self, n: u32) -> Result<()> {
        if n > self.n_max {
            return Err(Error::Truncation(format!(
                "Z_{n} needs s+ through principal degree {}; realized only through n = {}",
                self.h() * n as i64,
                self.n_max
            )));
        }
        Ok(())
    }

    /// Realized `s+` basis element `(m, k)` from the piece of degree `d`.
    pub fn operator(&self, m: i64, k: usize, d: i64) -> Result<Arc<SparseMatrix>> {
        Ok(Arc::new(self.operator_t(m, k, d)?.transpose()))
    }

    fn operator_t(&self, m: i64, k: usize, d: i64) -> Result<Arc<SparseMatrix>> {
        let key = (m, k, d);
        if let Some(x) = self.ops.lock().expect("operator cache poisoned").get(&key) {
            return Ok(x.clone());
        }
        let mat = Arc::new(self.tw.affine_matrix(self.splus.element(m, k), d)?.transpose());
        self.ops.lock().expect("operator cache poisoned").entry(key).or_insert_with(|| mat.clone());
        Ok(mat)
    }

    /// Functionals on the piece of degree `d` whose common kernel is `K^i(d)`.
    fn annihilator(&self, i: i64, d: i64) -> Result<Annihilator> {
        if let Some(a) = self.ann.lock().expect("annihilator cache poisoned").get(&(i, d)) {
            return Ok(a.clone());
        }
        let dim = self.tw.piece(d).dim;
        let a = if i < 0 {
            (0..dim).map(|c| SparseVec::from([(c, q(1))])).collect()
        } else {
            let rows = self.constraint_rows(i, d)?;
            let span = Subspace::spanned_by(dim, &rows);
            span.basis().to_vec()
        };
        let a = Arc::new(a);
        self.ann.lock().expect("annihilator cache poisoned").entry((i, d)).or_insert_with(|| a.clone());
        Ok(a)
    }

    /// Rows `f . u` for every basis `u` of degree `m <= d` and every functional `f`
    /// cutting out `K^{i-1}(d - m)`.
    fn constraint_rows(&self, i: i64, d: i64) -> Result<Vec<SparseVec>> {
        let mut rows = Vec::new();
        for (m, k) in self.splus.labels_up_to(d) {
            let prev = self.annihilator(i - 1, d - m)?;
            if prev.is_empty() {
                continue;
            }
            let ut = self.operator_t(m, k, d)?;
            for f in prev.iter() {
                let r = ut.apply(f);
                if !r.is_empty() {
                    rows.push(r);
                }
            }
        }
        Ok(rows)
    }

    /// Fills the annihilator tables for all `(i, d)` needed below level `i_max`, in
    /// parallel over degrees for each `i`.
    fn prepare(&self, i_max: i64, d_max: i64) -> Result<()> {
        for i in 0..i_max {
            (0..d_max).into_par_iter().try_for_each(|d| self.annihilator(i, d).map(|_| ()))?;
        }
        Ok(())
    }

    /// Basis of `F^i Z_n` in the Fock basis of weight `n`.
    pub fn filtration_subspace(&self, n: u32, i: i64) -> Result<Subspace> {
        self.check_range(n)?;
        let (_, off, len) = self.tw.z_offset(n);
        if i < 0 {
            return Ok(Subspace::new(len));
        }
        let d = self.h() * n as i64;
        let rows = self.constraint_rows(i, d)?;
        let restricted: Vec<SparseVec> = rows
            .iter()
            .map(|r| r.range(off..off + len).map(|(&c, x)| (c - off, x.clone())).collect::<SparseVec>())
            .filter(|r: &SparseVec| !r.is_empty())
            .collect();
        let ker = Subspace::spanned_by(len, &restricted).annihilator_kernel();
        Ok(Subspace::spanned_by(len, &ker))
    }

    /// Jump table `dim F^i Z_n / F^{i-1} Z_n` for `n <= n_max`, compared with the
    /// expansion of `prod_k prod_n (1 - t^{d_k} q^n)^{-1}`.
    pub fn filtration_profile(&self, n_max: u32) -> Result<FiltrationProfile> {
        self.check_range(n_max)?;
        let dl = *self.tw.root_system().degrees.iter().max().expect("rank >= 1");
        let i_max = n_max * dl;
        self.prepare(i_max as i64, self.h() * n_max as i64)?;
        let series = hilbert_grz(self.tw.root_system(), i_max, n_max);
        let rows = (0..=n_max)
            .into_par_iter()
            .map(|n| {
                let dims = (0..=i_max as i64)
                    .map(|i| self.filtration_subspace(n, i).map(|s| s.dim()))
                    .collect::<Result<Vec<_>>>()?;
                let mut jumps = Vec::new();
                let mut prev = 0;
                for (i, &dm) in dims.iter().enumerate() {
                    if dm != prev {
                        jumps.push((i as u32, dm - prev));
                    }
                    prev = dm;
                }
                let expected_jumps: Vec<(u32, usize)> = (0..=i_max)
                    .filter_map(|i| {
                        let c = series.coeff(i, n);
                        crate::rational::to_i64(&c).filter(|&x| x != 0).map(|x| (i, x as usize))
                    })
                    .collect();
                let (_, _, dim_z) = self.tw.z_offset(n);
                let matches = jumps == expected_jumps && dims.last() == Some(&dim_z);
                Ok(ProfileRow { n, dim_z, filtration_dims: dims, jumps, expected_jumps, matches })
            })
            .collect::<Result<Vec<_>>>()?;
        let all_match = rows.iter().all(|r| r.matches);
        Ok(FiltrationProfile { n_max, i_max, rows, all_match })
    }

    /// Checks `u v = v u` for all pairs of realized basis elements on pieces `<= d_max`.
    pub fn operators_commute(&self, d_max: i64) -> Result<bool> {
        for d in 0..=d_max {
            let labels = self.splus.labels_up_to(d);
            for (a, &(ma, ka)) in labels.iter().enumerate() {
                for &(mb, kb) in &labels[a + 1..] {
                    if ma + mb > d {
                        continue;
                    }
                    let (a1, b0) = (self.operator(ma, ka, d - mb)?, self.operator(mb, kb, d)?);
                    let (b1, a0) = (self.operator(mb, kb, d - ma)?, self.operator(ma, ka, d)?);
                    let ab = a1.mul(&b0);
                    let ba = b1.mul(&a0);
                    if ab != ba {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Applies `x = sum_j c_j u_j` (all degrees `<= h n`) `i + 1` times to `v in Z_n`
    /// and reports whether the result vanishes.
    pub fn power_kills(&self, coeffs: &[((i64, usize), Q)], n: u32, v: &SparseVec, i: i64) -> Result<bool> {
        let (_, off, _) = self.tw.z_offset(n);
        let mut cur: BTreeMap<i64, SparseVec> = BTreeMap::new();
        cur.insert(self.h() * n as i64, v.iter().map(|(&c, x)| (c + off, x.clone())).collect());
        for _ in 0..=i {
            let mut next: BTreeMap<i64, SparseVec> = BTreeMap::new();
            for (&d, vec) in &cur {
                for ((m, k), c) in coeffs {
                    if *m > d {
                        continue;
                    }
                    let img = self.operator(*m, *k, d)?.apply(vec);
                    crate::linalg::axpy(next.entry(d - m).or_default(), c, &img);
                }
            }
            next.retain(|_, v| !v.is_empty());
            cur = next;
        }
        Ok(cur.is_empty())
    }

    /// Random rational combinations of the basis of degrees `<= h n` (fixed seed).
    pub fn random_combinations(&self, n: u32, count: usize, seed: u64) -> Vec<Vec<((i64, usize), Q)>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels = self.splus.labels_up_to(self.h() * n as i64);
        (0..count)
            .map(|_| labels.iter().map(|&l| (l, frac(rng.gen_range(-9..=9), rng.gen_range(1..=5)))).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{chevalley_constants, Family};
    use crate::cartan::GBasis;

    fn cb(f: Family, r: usize) -> ChevalleyBasis {
        chevalley_constants(Arc::new(RootSystem::new(f, r).unwrap()), None).unwrap()
    }

    #[test]
    fn splus_dimensions() {
        let a1 = splus_basis(&cb(Family::A, 1), 6).unwrap();
        let dims: Vec<usize> = (1..=6).map(|m| a1.dims().get(&m).copied().unwrap_or(0)).collect();
        assert_eq!(dims, [1, 0, 1, 0, 1, 0]);
        let d4 = splus_basis(&cb(Family::D, 4), 12).unwrap();
        assert_eq!(d4.dims()[&3], 2);
        assert_eq!(d4.dims()[&9], 2);
        assert!(!d4.dims().contains_key(&6));
        for (f, r) in [(Family::A, 3), (Family::E, 6)] {
            let c = cb(f, r);
            let s = splus_basis(&c, 2 * c.root_system().coxeter_number as i64).unwrap();
            for (&m, v) in &s.by_degree {
                assert_eq!(v.len(), exponent_multiplicity(c.root_system(), m));
            }
        }
    }

    #[test]
    fn degree_one_is_e() {
        let c = cb(Family::A, 2);
        let la = LoopAlgebra::new(&c);
        let s = splus_basis(&c, 1).unwrap();
        let x = &s.by_degree[&1][0];
        let e = la.principal_nilpotent();
        let (b, c0) = e.iter().next().unwrap();
        let ratio = &x[b] / c0;
        for (b, v) in &e {
            assert_eq!(&x[b], &(v * &ratio));
        }
        assert_eq!(x.len(), e.len());
        assert!(x.keys().all(|b| !matches!(b, LoopBasis::G(GBasis::H(_), _))));
    }

    #[test]
    fn a1_small_filtration() {
        let tw = Arc::new(TwistedRealization::new(Arc::new(RootSystem::new(Family::A, 1).unwrap())).unwrap());
        let b = Brylinski::new(tw, 2).unwrap();
        assert_eq!(b.filtration_subspace(0, -1).unwrap().dim(), 0);
        assert_eq!(b.filtration_subspace(0, 0).unwrap().dim(), 1);
        assert_eq!(b.filtration_subspace(1, 1).unwrap().dim(), 0);
        assert_eq!(b.filtration_subspace(1, 2).unwrap().dim(), 1);
        let p = b.filtration_profile(2).unwrap();
        assert!(p.all_match, "{p:?}");
        assert_eq!(p.rows[2].jumps, vec![(2, 1), (4, 1)]);
        assert!(matches!(b.filtration_subspace(3, 0), Err(Error::Truncation(_))));
    }

    #[test]
    fn a2_profile_and_commutation() {
        let tw = Arc::new(TwistedRealization::new(Arc::new(RootSystem::new(Family::A, 2).unwrap())).unwrap());
        let b = Brylinski::new(tw, 2).unwrap();
        let p = b.filtration_profile(2).unwrap();
        assert!(p.all_match, "{p:?}");
        assert_eq!(p.rows[1].jumps, vec![(2, 1), (3, 1)]);
        assert_eq!(p.rows[0].jumps, vec![(0, 1)]);
        assert!(b.operators_commute(6).unwrap());
    }

    #[test]
    fn random_powers_kill_filtration() {
        let tw = Arc::new(TwistedRealization::new(Arc::new(RootSystem::new(Family::A, 1).unwrap())).unwrap());
        let b = Brylinski::new(tw, 3).unwrap();
        for n in 0..=3u32 {
            for i in 0..=(2 * n as i64) {
                let f = b.filtration_subspace(n, i).unwrap();
                for x in b.random_combinations(n, 4, 11 + n as u64) {
                    for v in f.basis() {
                        assert!(b.power_kills(&x, n, v, i).unwrap());
                    }
                }
            }
        }
    }
}
