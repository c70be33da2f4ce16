//! The lattice vertex algebra `V_Q = pi_1 (x) C_eps[Q]` and the vertex operators of
//! its states, acting on `V_Q` itself or on Fock modules `pi_{1,mu}`.
//!
//! Fields are evaluated by the normal-ordered product formula
//! `Y(b_{i_1}(-n_1)...b_{i_r}(-n_r) e^beta, z) =
//!   :prod_j d^{(n_j-1)} b_{i_j}(z) Y(e^beta, z):`
//! with annihilation parts (including zero modes) acting first, and
//! `Y(e^beta, z) = e^beta z^{beta_0} E^-(beta, z) E^+(beta, z)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::cartan::{chevalley_constants, ChevalleyBasis, RootSystem};
use crate::error::{Error, Result};
use crate::fock::{add_scaled, boson_apply, fock_basis, push, FockMonomial, FockVec, GradedBasis};
use crate::linalg::{SparseMatrix, SparseVec};
use crate::rational::{self, binomial, q, Q};

pub type Lat = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeState {
    pub mono: FockMonomial,
    pub beta: Lat,
}

pub type LatticeElement = BTreeMap<LatticeState, Q>;

/// A homogeneous piece: fixed lattice point, fixed Fock weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sector {
    pub beta: Lat,
    pub fock_weight: u32,
}

pub fn state(mono: FockMonomial, beta: Lat) -> LatticeState {
    LatticeState { mono, beta }
}

pub fn single(mono: FockMonomial, beta: Lat) -> LatticeElement {
    LatticeElement::from([(state(mono, beta), Q::one())])
}

/// Embeds a Fock vector at lattice point `beta`.
pub fn from_fock(v: &FockVec, beta: &[i64]) -> LatticeElement {
    v.iter().map(|(m, c)| (state(m.clone(), beta.to_vec()), c.clone())).collect()
}

/// The Fock part of the components at lattice point `beta`.
pub fn fock_part(v: &LatticeElement, beta: &[i64]) -> FockVec {
    v.iter().filter(|(s, _)| s.beta == beta).map(|(s, c)| (s.mono.clone(), c.clone())).collect()
}

/// Lattice charge of a homogeneous element.
pub fn homogeneous_charge(v: &LatticeElement) -> Option<Lat> {
    let mut it = v.keys().map(|s| &s.beta);
    let b = it.next()?.clone();
    it.all(|x| *x == b).then_some(b)
}

/// Vertex operators of `V_Q` on the space `pi_1 (x) C[mu + Q]`; `mu = 0` is `V_Q` itself,
/// and for `mu` outside the weight lattice only lattice point 0 and states of `pi_1` are
/// meaningful (the Fock module `pi_{1,mu}`).
#[derive(Clone, Debug)]
pub struct LatticeVoa {
    rs: Arc<RootSystem>,
    cb: ChevalleyBasis,
    offset: Vec<Q>,
    offset_integral: bool,
}

impl LatticeVoa {
    pub fn new(rs: Arc<RootSystem>) -> Result<Self> {
        let l = rs.rank;
        Self::with_offset(rs, vec![Q::zero(); l])
    }

    /// `offset` in root-basis coordinates.
    pub fn with_offset(rs: Arc<RootSystem>, offset: Vec<Q>) -> Result<Self> {
        if offset.len() != rs.rank {
            return Err(Error::BasisMismatch(format!("offset of length {} for rank {}", offset.len(), rs.rank)));
        }
        let cb = chevalley_constants(rs.clone(), None)?;
        let offset_integral = offset.iter().all(rational::is_integer);
        Ok(Self { rs, cb, offset, offset_integral })
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn root_system_arc(&self) -> Arc<RootSystem> {
        self.rs.clone()
    }

    pub fn chevalley(&self) -> &ChevalleyBasis {
        &self.cb
    }

    pub fn offset(&self) -> &[Q] {
        &self.offset
    }

    pub fn rank(&self) -> usize {
        self.rs.rank
    }

    pub fn basis(&self, s: u32) -> Arc<GradedBasis> {
        fock_basis(self.rs.rank, s)
    }

    fn total_charge(&self, gamma: &[i64]) -> Vec<Q> {
        self.offset.iter().zip(gamma).map(|(o, g)| o + q(*g)).collect()
    }

    /// `(offset + gamma | alpha_i)` for every `i`.
    pub fn pairing(&self, gamma: &[i64]) -> Vec<Q> {
        let c = self.total_charge(gamma);
        (0..self.rs.rank)
            .map(|i| (0..self.rs.rank).map(|j| q(self.rs.gram[i][j]) * &c[j]).fold(Q::zero(), |a, b| a + b))
            .collect()
    }

    /// Conformal weight `n + |beta|^2/2` of a state of `V_Q`.
    pub fn state_weight(&self, s: &LatticeState) -> i64 {
        s.mono.weight() as i64 + self.rs.form_int(&s.beta, &s.beta) / 2
    }

    /// Fock weight of `v_{(n)} x` for `v = (mono, beta)`, `x` of Fock weight `s` at `gamma`.
    pub fn target_fock_weight(&self, v: &LatticeState, n: i64, s: u32, gamma: &[i64]) -> Result<i64> {
        let zero = v.beta.iter().all(|&b| b == 0);
        if zero {
            return Ok(s as i64 + v.mono.weight() as i64 - n - 1);
        }
        if !self.offset_integral {
            return Err(Error::IncompatibleMode(
                "charged vertex operators act only on integral-charge sectors".into(),
            ));
        }
        let c = self.total_charge(gamma);
        let cb: Vec<Q> = v.beta.iter().map(|&b| q(b)).collect();
        let pair = self.rs.form(&c, &cb);
        let pair = rational::to_i64(&pair).ok_or_else(|| Error::IncompatibleMode("non-integral pairing".into()))?;
        Ok(s as i64 + v.mono.weight() as i64 - n - 1 - pair)
    }

    fn boson(&self, i: usize, m: i64, v: &FockVec, pairing: &[Q]) -> FockVec {
        let mut out = FockVec::new();
        let one = Q::one();
        for (mono, c) in v {
            boson_apply(&self.rs.gram, &one, pairing, i, m, mono, c, &mut out);
        }
        out
    }

    /// `h(m)` for `h = sum_i beta_i alpha_i`.
    fn lattice_boson(&self, beta: &[i64], m: i64, v: &FockVec, pairing: &[Q]) -> FockVec {
        let mut out = FockVec::new();
        for (i, &b) in beta.iter().enumerate() {
            if b != 0 {
                add_scaled(&mut out, &q(b), &self.boson(i, m, v, pairing));
            }
        }
        out
    }

    /// `h(m)` for rational `h` (root-basis coordinates) on an arbitrary element.
    pub fn heisenberg_apply(&self, h: &[Q], m: i64, v: &LatticeElement) -> LatticeElement {
        let mut by_beta: BTreeMap<Lat, FockVec> = BTreeMap::new();
        for (s, c) in v {
            push(by_beta.entry(s.beta.clone()).or_default(), s.mono.clone(), c.clone());
        }
        let mut out = LatticeElement::new();
        for (beta, fv) in by_beta {
            let pairing = self.pairing(&beta);
            for (i, c) in h.iter().enumerate() {
                if !c.is_zero() {
                    add_scaled(&mut out, c, &from_fock(&self.boson(i, m, &fv, &pairing), &beta));
                }
            }
        }
        out
    }

    /// `E^+(beta, z) = exp(-sum_{n>0} beta(n) z^{-n}/n)` summed over all powers of `z`.
    fn exp_annihilate(&self, beta: &[i64], v: &FockVec, pairing: &[Q]) -> FockVec {
        if beta.iter().all(|&b| b == 0) {
            return v.clone();
        }
        let top = v.keys().map(|m| m.weight()).max().unwrap_or(0) as i64;
        // T_w = -(1/w) sum_{n=1}^{w} beta(n) T_{w-n}
        let mut t: Vec<FockVec> = vec![v.clone()];
        let mut total = v.clone();
        for w in 1..=top {
            let mut tw = FockVec::new();
            for n in 1..=w {
                let prev = &t[(w - n) as usize];
                if prev.is_empty() {
                    continue;
                }
                add_scaled(&mut tw, &q(1), &self.lattice_boson(beta, n, prev, pairing));
            }
            let tw: FockVec = tw.into_iter().map(|(m, c)| (m, -c / q(w))).collect();
            add_scaled(&mut total, &Q::one(), &tw);
            t.push(tw);
        }
        total
    }

    /// Weight-`r` part of `E^-(beta, z) = exp(sum_{n>0} beta(-n) z^n/n)`, as a polynomial
    /// in creation operators.
    fn exp_create_poly(&self, beta: &[i64], r: u32) -> Vec<FockVec> {
        let vac = FockVec::from([(FockMonomial::vacuum(), Q::one())]);
        let mut s: Vec<FockVec> = vec![vac];
        let none = vec![Q::zero(); self.rs.rank];
        for w in 1..=r as i64 {
            let mut sw = FockVec::new();
            for n in 1..=w {
                add_scaled(&mut sw, &q(1), &self.lattice_boson(beta, -n, &s[(w - n) as usize], &none));
            }
            s.push(sw.into_iter().map(|(m, c)| (m, c / q(w))).collect());
        }
        s
    }

    /// Creation polynomial of exact weight `r` for the deferred factors and `E^-(beta)`.
    fn creation_poly(&self, pending: &[(usize, u32)], beta: &[i64], r: u32) -> FockVec {
        // by_weight[w] = polynomial of weight w accumulated so far
        let mut by_weight: Vec<FockVec> = self.exp_create_poly(beta, r);
        for &(i, nj) in pending {
            let mut next = vec![FockVec::new(); r as usize + 1];
            for (w, poly) in by_weight.iter().enumerate() {
                if poly.is_empty() {
                    continue;
                }
                // b_i(-k) with coefficient C(k-1, nj-1), k >= nj
                for k in nj..=(r - w as u32) {
                    let c = binomial(k as i64 - 1, nj as u64 - 1);
                    for (m, x) in poly {
                        push(&mut next[w + k as usize], m.times(i, k), &c * x);
                    }
                }
            }
            by_weight = next;
        }
        by_weight.swap_remove(r as usize)
    }

    /// Annihilation stage: each factor either takes a mode `m >= 0` now or is deferred.
    #[allow(clippy::too_many_arguments)]
    fn annihilation_stage(
        &self,
        factors: &[(usize, u32)],
        k: usize,
        cur: FockVec,
        pending: &mut Vec<(usize, u32)>,
        pairing: &[Q],
        out: &mut Vec<(FockVec, Vec<(usize, u32)>)>,
    ) {
        if cur.is_empty() {
            return;
        }
        if k == factors.len() {
            out.push((cur, pending.clone()));
            return;
        }
        let (i, nj) = factors[k];
        let top = cur.keys().map(|m| m.weight()).max().unwrap_or(0) as i64;
        for m in 0..=top {
            let c = binomial(-m - 1, nj as u64 - 1);
            let next: FockVec = self.boson(i, m, &cur, pairing).into_iter().map(|(x, y)| (x, y * &c)).collect();
            self.annihilation_stage(factors, k + 1, next, pending, pairing, out);
        }
        pending.push((i, nj));
        self.annihilation_stage(factors, k + 1, cur, pending, pairing, out);
        pending.pop();
    }

    /// `v_{(n)}` applied to the basis state `x`, for a basis state `v` of `V_Q`.
    pub fn apply_basis(&self, v: &LatticeState, n: i64, x: &LatticeState) -> Result<LatticeElement> {
        let t = self.target_fock_weight(v, n, x.mono.weight(), &x.beta)?;
        let mut out = LatticeElement::new();
        if t < 0 {
            return Ok(out);
        }
        let t = t as u32;
        let pairing = self.pairing(&x.beta);
        let factors: Vec<(usize, u32)> = v.mono.factors().collect();
        let mut stage = Vec::new();
        let start = FockVec::from([(x.mono.clone(), Q::one())]);
        self.annihilation_stage(&factors, 0, start, &mut Vec::new(), &pairing, &mut stage);
        let charged = v.beta.iter().any(|&b| b != 0);
        let sign = if charged { q(self.cb.eps(&v.beta, &x.beta)) } else { Q::one() };
        let new_beta: Lat = v.beta.iter().zip(&x.beta).map(|(a, b)| a + b).collect();
        let mut memo: HashMap<(Vec<(usize, u32)>, u32), FockVec> = HashMap::new();
        for (cur, mut pending) in stage {
            let cur = self.exp_annihilate(&v.beta, &cur, &pairing);
            pending.sort_unstable();
            for (mono, c) in cur {
                let w = mono.weight();
                if w > t {
                    continue;
                }
                let r = t - w;
                let key = (pending.clone(), r);
                if !memo.contains_key(&key) {
                    let poly = self.creation_poly(&pending, &v.beta, r);
                    memo.insert(key.clone(), poly);
                }
                for (p, d) in &memo[&key] {
                    push(&mut out, state(mono.product(p), new_beta.clone()), &c * d * &sign);
                }
            }
        }
        debug_assert!(out.keys().all(|s| s.mono.weight() == t));
        Ok(out)
    }

    /// `v_{(n)} x` for arbitrary elements.
    pub fn apply(&self, v: &LatticeElement, n: i64, x: &LatticeElement) -> Result<LatticeElement> {
        let mut out = LatticeElement::new();
        for (vs, vc) in v {
            for (xs, xc) in x {
                let r = self.apply_basis(vs, n, xs)?;
                add_scaled(&mut out, &(vc * xc), &r);
            }
        }
        Ok(out)
    }

    /// Target sector of `v_{(n)}` on `src` for `v` of lattice charge `beta` built on
    /// Fock weight `v_weight` monomials; `None` if the target weight is negative.
    pub fn target_sector(&self, beta: &[i64], v_fock_weight: u32, n: i64, src: &Sector) -> Result<Option<Sector>> {
        let probe = state(FockMonomial::vacuum(), beta.to_vec());
        let t = self.target_fock_weight(&probe, n, src.fock_weight, &src.beta)? + v_fock_weight as i64;
        if t < 0 {
            return Ok(None);
        }
        let nb = beta.iter().zip(&src.beta).map(|(a, b)| a + b).collect();
        Ok(Some(Sector { beta: nb, fock_weight: t as u32 }))
    }

    /// Matrix of `v_{(n)}` from `src` to its target sector, for `v` homogeneous in
    /// lattice charge and conformal weight.
    pub fn descendant_mode(&self, v: &LatticeElement, n: i64, src: &Sector) -> Result<(Sector, SparseMatrix)> {
        let beta = homogeneous_charge(v).ok_or_else(|| Error::Invalid("state is not homogeneous in charge".into()))?;
        let fw = v.keys().map(|s| s.mono.weight()).collect::<Vec<_>>();
        if fw.windows(2).any(|p| p[0] != p[1]) {
            return Err(Error::Invalid("state is not homogeneous in weight".into()));
        }
        let sb = self.basis(src.fock_weight);
        let tgt = match self.target_sector(&beta, fw[0], n, src)? {
            Some(t) => t,
            None => {
                let tb: Lat = beta.iter().zip(&src.beta).map(|(a, b)| a + b).collect();
                return Ok((Sector { beta: tb, fock_weight: 0 }, SparseMatrix::zeros(0, sb.dim())));
            }
        };
        let tb = self.basis(tgt.fock_weight);
        let mut cols = Vec::with_capacity(sb.dim());
        for m in &sb.monomials {
            let x = single(m.clone(), src.beta.clone());
            let y = self.apply(v, n, &x)?;
            cols.push(self.to_sparse(&y, &tgt, &tb)?);
        }
        Ok((tgt, SparseMatrix::from_columns(tb.dim(), cols)))
    }

    pub fn to_sparse(&self, y: &LatticeElement, sector: &Sector, basis: &GradedBasis) -> Result<SparseVec> {
        let mut col = SparseVec::new();
        for (s, c) in y {
            if s.beta != sector.beta {
                return Err(Error::Consistency(format!("mode output left sector {:?}", sector.beta)));
            }
            let i = basis.index_of(&s.mono).ok_or_else(|| {
                Error::Consistency(format!("mode output {:?} has weight off {}", s.mono, sector.fock_weight))
            })?;
            col.insert(i, c.clone());
        }
        Ok(col)
    }

    /// `(1 (x) e^beta)_{(n)}` on a sector.
    pub fn exp_vertex_mode(&self, beta: &[i64], n: i64, src: &Sector) -> Result<(Sector, SparseMatrix)> {
        self.descendant_mode(&single(FockMonomial::vacuum(), beta.to_vec()), n, src)
    }

    /// Screening zero mode `(e^{-alpha_i})_{(0)}` on `pi_1` of weight `d`.
    pub fn screening_zero_mode(&self, i: usize, d: u32) -> Result<(Sector, SparseMatrix)> {
        let mut beta = vec![0; self.rs.rank];
        beta[i] = -1;
        let zero = vec![0; self.rs.rank];
        self.exp_vertex_mode(&beta, 0, &Sector { beta: zero, fock_weight: d })
    }

    /// `h(m)` for `h` in root-basis coordinates on a sector.
    pub fn heisenberg_mode(&self, h: &[Q], m: i64, src: &Sector) -> Result<(Sector, SparseMatrix)> {
        let sb = self.basis(src.fock_weight);
        let tw = src.fock_weight as i64 - m;
        let tgt = Sector { beta: src.beta.clone(), fock_weight: tw.max(0) as u32 };
        if tw < 0 {
            return Ok((tgt, SparseMatrix::zeros(0, sb.dim())));
        }
        let tb = self.basis(tgt.fock_weight);
        let pairing = self.pairing(&src.beta);
        let mut cols = Vec::with_capacity(sb.dim());
        for mono in &sb.monomials {
            let x = FockVec::from([(mono.clone(), Q::one())]);
            let mut y = FockVec::new();
            for (i, c) in h.iter().enumerate() {
                if !c.is_zero() {
                    add_scaled(&mut y, c, &self.boson(i, m, &x, &pairing));
                }
            }
            cols.push(tb.to_sparse(&y)?);
        }
        Ok((tgt, SparseMatrix::from_columns(tb.dim(), cols)))
    }
}
