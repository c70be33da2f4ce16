//! The basic representation realized on `V_Q` through the shift operator
//! `Delta(h, z) = z^{h_(0)} exp(sum_{k>=1} h_(k) (-z)^{-k} / (-k))` with `h = rho/h`.
//!
//! Twisted fields are `Y_zeta(v, z) = Y(Delta(h, z) v, z)`. The affine algebra acts by
//! `x_alpha (x) t^m -> (e^{-alpha})` twisted mode of index `m + ht(alpha)/h`,
//! `h (x) t^m -> -h` twisted mode of index `m` plus `delta_{m,0} (rho/h | h)`, `K -> 1`;
//! the constant is the central shift relating the principally graded loop algebra to
//! the homogeneous one.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::One;

use crate::cartan::loop_algebra::{LoopAlgebra, LoopBasis, LoopElement};
use crate::cartan::{GBasis, RootSystem};
use crate::error::{Error, Result};
use crate::fock::{add_scaled, fock_basis, FockMonomial};
use crate::lattice::{homogeneous_charge, single, Lat, LatticeElement, LatticeVoa, Sector};
use crate::linalg::{add_entry, SparseMatrix, SparseVec};
use crate::rational::{self, q, Q};

/// Direct sum of the sectors of `V_Q` with principal degree
/// `D = h (n + |beta|^2/2) + ht(beta)` equal to `degree`.
#[derive(Clone, Debug)]
pub struct Piece {
    pub degree: i64,
    pub sectors: Vec<Sector>,
    pub offsets: Vec<usize>,
    pub dim: usize,
    index: HashMap<Sector, usize>,
}

impl Piece {
    pub fn sector_offset(&self, s: &Sector) -> Option<usize> {
        self.index.get(s).map(|&k| self.offsets[k])
    }
}

pub struct TwistedRealization {
    voa: LatticeVoa,
    h_zeta: Vec<Q>,
    pieces: Mutex<HashMap<i64, Arc<Piece>>>,
}

impl TwistedRealization {
    pub fn new(rs: Arc<RootSystem>) -> Result<Self> {
        let h_zeta = rs.rho_over_h();
        let voa = LatticeVoa::new(rs)?;
        Ok(Self { voa, h_zeta, pieces: Mutex::new(HashMap::new()) })
    }

    pub fn voa(&self) -> &LatticeVoa {
        &self.voa
    }

    pub fn root_system(&self) -> &RootSystem {
        self.voa.root_system()
    }

    /// `rho/h` in root-basis coordinates.
    pub fn shift(&self) -> &[Q] {
        &self.h_zeta
    }

    fn coxeter(&self) -> i64 {
        self.root_system().coxeter_number as i64
    }

    /// `(rho/h | beta)`
    fn shift_pairing(&self, beta: &[i64]) -> Q {
        let b: Vec<Q> = beta.iter().map(|&x| q(x)).collect();
        self.root_system().form(&self.h_zeta, &b)
    }

    /// `Delta(h, z) v` as `(power of z, state)` pairs, for rational `h` in root coordinates.
    pub fn delta_apply(&self, h: &[Q], v: &LatticeElement) -> Result<Vec<(Q, LatticeElement)>> {
        let beta = homogeneous_charge(v).ok_or_else(|| Error::Invalid("state is not homogeneous in charge".into()))?;
        let hb: Vec<Q> = beta.iter().map(|&x| q(x)).collect();
        let lead = self.root_system().form(h, &hb);
        let top = v.keys().map(|s| s.mono.weight()).max().unwrap_or(0) as i64;
        // U_w = (1/w) sum_{k=1}^{w} (-1)^{k+1} h_(k) U_{w-k}
        let mut u: Vec<LatticeElement> = vec![v.clone()];
        let mut out = vec![(lead.clone(), v.clone())];
        for w in 1..=top {
            let mut uw = LatticeElement::new();
            for k in 1..=w {
                let prev = &u[(w - k) as usize];
                if prev.is_empty() {
                    continue;
                }
                let sign = if k % 2 == 1 { q(1) } else { q(-1) };
                add_scaled(&mut uw, &sign, &self.voa.heisenberg_apply(h, k, prev));
            }
            let uw: LatticeElement = uw.into_iter().map(|(s, c)| (s, c / q(w))).collect();
            if !uw.is_empty() {
                out.push((&lead - q(w), uw.clone()));
            }
            u.push(uw);
        }
        Ok(out)
    }

    /// Twisted mode: coefficient of `z^{-j-1}` in `Y_zeta(v, z)` on a sector.
    pub fn twisted_mode(&self, v: &LatticeElement, j: &Q, src: &Sector) -> Result<(Sector, SparseMatrix)> {
        let parts = self.delta_apply(&self.h_zeta, v)?;
        let mut acc: Option<(Sector, SparseMatrix)> = None;
        for (p, vp) in parts {
            let n = j + &p;
            let n = rational::to_i64(&n).ok_or_else(|| {
                Error::IncompatibleMode(format!(
                    "index {} is not in the mode lattice of this state",
                    rational::to_string(j)
                ))
            })?;
            // split by Fock weight so every piece is homogeneous
            let mut by_weight: BTreeMap<u32, LatticeElement> = BTreeMap::new();
            for (s, c) in vp {
                by_weight.entry(s.mono.weight()).or_default().insert(s, c);
            }
            for (_, piece) in by_weight {
                let (t, m) = self.voa.descendant_mode(&piece, n, src)?;
                acc = Some(match acc {
                    None => (t, m),
                    Some((t0, m0)) => {
                        if m.rows() == 0 {
                            (t0, m0)
                        } else if m0.rows() == 0 {
                            (t, m)
                        } else {
                            if t0 != t {
                                return Err(Error::Consistency("twisted mode parts land in different sectors".into()));
                            }
                            (t0, m0.add(&m))
                        }
                    }
                });
            }
        }
        acc.ok_or_else(|| Error::Invalid("empty state".into()))
    }

    /// Twisted index of `x_alpha (x) t^m`, acting through `e^{-alpha}`.
    pub fn root_mode_index(&self, alpha: &[i64], m: i64) -> Q {
        q(m) + q(RootSystem::height(alpha)) / q(self.coxeter())
    }

    /// Action of one loop-algebra basis element on a sector, as `(target, block)`.
    pub fn affine_basis_on_sector(&self, b: LoopBasis, src: &Sector) -> Result<Option<(Sector, SparseMatrix)>> {
        let l = self.root_system().rank;
        let dim = fock_basis(l, src.fock_weight).dim();
        match b {
            LoopBasis::K => Ok(Some((src.clone(), SparseMatrix::identity(dim)))),
            LoopBasis::G(GBasis::X(r), m) => {
                let alpha = self.voa.chevalley().roots()[r].clone();
                let neg: Lat = alpha.iter().map(|x| -x).collect();
                let v = single(FockMonomial::vacuum(), neg);
                let (t, mat) = self.twisted_mode(&v, &self.root_mode_index(&alpha, m), src)?;
                Ok((mat.rows() > 0).then_some((t, mat)))
            }
            LoopBasis::G(GBasis::H(i), m) => {
                let v = single(FockMonomial::from_factors(&[(i, 1)]), vec![0; l]);
                let (t, mat) = self.twisted_mode(&v, &q(m), src)?;
                if mat.rows() == 0 {
                    return Ok(None);
                }
                let mut mat = mat.scale(&q(-1));
                if m == 0 {
                    let mut a = vec![0; l];
                    a[i] = 1;
                    let c = self.shift_pairing(&a);
                    mat = mat.add(&SparseMatrix::scalar(dim, &c));
                }
                Ok(Some((t, mat)))
            }
        }
    }

    /// Sectors of principal degree `d`, enumerated over a box containing all lattice
    /// points with `h |beta|^2 / 2 + ht(beta) <= d`.
    pub fn piece(&self, d: i64) -> Arc<Piece> {
        if let Some(p) = self.pieces.lock().expect("piece cache poisoned").get(&d) {
            return p.clone();
        }
        let rs = self.root_system();
        let h = self.coxeter();
        let l = rs.rank;
        let mut sectors = Vec::new();
        if d >= 0 {
            let rho_norm = rational::to_f64(&rs.norm2(&rs.weyl_vector)).sqrt();
            let hf = h as f64;
            let radius = (rho_norm + (rho_norm * rho_norm + 2.0 * hf * d as f64).sqrt()) / hf;
            let inv = rs.gram_inverse();
            let bounds: Vec<i64> =
                (0..l).map(|i| (radius * rational::to_f64(&inv[i][i]).sqrt()).floor() as i64 + 1).collect();
            let mut beta = vec![0i64; l];
            fn rec(
                k: usize,
                beta: &mut Vec<i64>,
                bounds: &[i64],
                rs: &RootSystem,
                h: i64,
                d: i64,
                out: &mut Vec<Sector>,
            ) {
                if k == beta.len() {
                    let ht = RootSystem::height(beta);
                    let half_norm = rs.form_int(beta, beta) / 2;
                    let rest = d - ht - h * half_norm;
                    if rest >= 0 && rest % h == 0 {
                        out.push(Sector { beta: beta.clone(), fock_weight: (rest / h) as u32 });
                    }
                    return;
                }
                for x in -bounds[k]..=bounds[k] {
                    beta[k] = x;
                    rec(k + 1, beta, bounds, rs, h, d, out);
                }
                beta[k] = 0;
            }
            rec(0, &mut beta, &bounds, rs, h, d, &mut sectors);
        }
        sectors.sort();
        let mut offsets = Vec::with_capacity(sectors.len());
        let mut dim = 0;
        for s in &sectors {
            offsets.push(dim);
            dim += fock_basis(l, s.fock_weight).dim();
        }
        let index = sectors.iter().cloned().enumerate().map(|(k, s)| (s, k)).collect();
        let p = Arc::new(Piece { degree: d, sectors, offsets, dim, index });
        self.pieces.lock().expect("piece cache poisoned").entry(d).or_insert_with(|| p.clone());
        p
    }

    /// Principal degree of a homogeneous loop element.
    pub fn principal_degree(&self, x: &LoopElement) -> Result<i64> {
        let h = self.coxeter();
        let mut deg = None;
        for b in x.keys() {
            let e = match *b {
                LoopBasis::G(GBasis::X(r), m) => RootSystem::height(&self.voa.chevalley().roots()[r]) + m * h,
                LoopBasis::G(GBasis::H(_), m) => m * h,
                LoopBasis::K => 0,
            };
            if deg.is_some_and(|d| d != e) {
                return Err(Error::Invalid("loop element is not homogeneous".into()));
            }
            deg = Some(e);
        }
        Ok(deg.unwrap_or(0))
    }

    /// Matrix of a homogeneous loop element of principal degree `m` from the piece
    /// of degree `d` to the piece of degree `d - m`.
    pub fn affine_matrix(&self, x: &LoopElement, d: i64) -> Result<SparseMatrix> {
        let m = self.principal_degree(x)?;
        let src = self.piece(d);
        let tgt = self.piece(d - m);
        let mut cols = vec![SparseVec::new(); src.dim];
        for (k, sector) in src.sectors.iter().enumerate() {
            for (b, c) in x {
                let Some((t, block)) = self.affine_basis_on_sector(*b, sector)? else { continue };
                if block.is_zero() {
                    continue;
                }
                let off = tgt.sector_offset(&t).ok_or_else(|| {
                    Error::Consistency(format!("target sector {t:?} is not of principal degree {}", d - m))
                })?;
                for (j, col) in block.columns().iter().enumerate() {
                    for (i, v) in col {
                        add_entry(&mut cols[src.offsets[k] + j], off + i, c * v);
                    }
                }
            }
        }
        Ok(SparseMatrix::from_columns(tgt.dim, cols))
    }

    /// `Z_n = pi_1^{[n]} (x) e^0`, the lattice-zero part of the piece of degree `h n`.
    pub fn z_offset(&self, n: u32) -> (Arc<Piece>, usize, usize) {
        let p = self.piece(self.coxeter() * n as i64);
        let s = Sector { beta: vec![0; self.root_system().rank], fock_weight: n };
        let off = p.sector_offset(&s).expect("Z_n lies in its principal piece");
        (p, off, fock_basis(self.root_system().rank, n).dim())
    }

    /// Twisted modes of a state of `pi_1` on `Z_n`, as a matrix `Z_n -> Z_{n-k}`
    /// for the twisted index `k`.
    pub fn z_mode(&self, v: &LatticeElement, k: i64, n: u32) -> Result<SparseMatrix> {
        let src = Sector { beta: vec![0; self.root_system().rank], fock_weight: n };
        let (t, m) = self.twisted_mode(v, &q(k), &src)?;
        if m.rows() > 0 && t.beta.iter().any(|&b| b != 0) {
            return Err(Error::Consistency("pi_1 state moved Z off lattice point 0".into()));
        }
        Ok(m)
    }

    /// Twisted `L_0` eigenvalue on the vacuum `1 (x) e^0`: `|rho/h|^2 / 2`.
    pub fn vacuum_conformal_weight(&self) -> Q {
        self.root_system().norm2(&self.h_zeta) / q(2)
    }
}

/// Pairs checked and failures found by [`bracket_self_test`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketCheck {
    pub pairs: usize,
    pub failures: Vec<(LoopElement, LoopElement, i64)>,
}

/// Checks `[X(x), X(y)] = X([x, y])` on pieces of degree `<= d_max` for all basis
/// elements of the given principal degrees and the Cartan elements of `t^0`.
pub fn bracket_self_test(tw: &TwistedRealization, degrees: &[i64], d_max: i64) -> Result<BracketCheck> {
    let la = LoopAlgebra::new(tw.voa().chevalley());
    let mut elems: Vec<LoopElement> =
        degrees.iter().flat_map(|&m| la.degree_component(m)).map(loop_term).collect();
    for i in 0..tw.root_system().rank {
        let h = loop_term(LoopBasis::G(GBasis::H(i), 0));
        if !elems.contains(&h) {
            elems.push(h);
        }
    }
    let mut out = BracketCheck { pairs: 0, failures: Vec::new() };
    for x in &elems {
        let mx = tw.principal_degree(x)?;
        for y in &elems {
            let my = tw.principal_degree(y)?;
            for d in 0..=d_max {
                if d - my < 0 || d - mx < 0 || d - mx - my < 0 {
                    continue;
                }
                let xy = tw.affine_matrix(x, d - my)?.mul(&tw.affine_matrix(y, d)?);
                let yx = tw.affine_matrix(y, d - mx)?.mul(&tw.affine_matrix(x, d)?);
                let br = la.bracket(x, y);
                let rhs = if br.is_empty() {
                    SparseMatrix::zeros(tw.piece(d - mx - my).dim, tw.piece(d).dim)
                } else {
                    tw.affine_matrix(&br, d)?
                };
                out.pairs += 1;
                if xy.sub(&yx) != rhs {
                    out.failures.push((x.clone(), y.clone(), d));
                }
            }
        }
    }
    Ok(out)
}

/// Loop element with a single basis term.
pub fn loop_term(b: LoopBasis) -> LoopElement {
    LoopElement::from([(b, Q::one())])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::cartan::{Family, WeightVector};
    use crate::fock::{sugawara_vector, FockModule};
    use crate::lattice::from_fock;
    use crate::rational::frac;
    use crate::series::colored_partitions;

    fn tw(f: Family, r: usize) -> TwistedRealization {
        TwistedRealization::new(Arc::new(RootSystem::new(f, r).unwrap())).unwrap()
    }

    #[test]
    fn delta_examples() {
        let t = tw(Family::A, 2);
        let h = vec![frac(1, 3), frac(-2, 7)];
        let vac = single(FockMonomial::vacuum(), vec![0, 0]);
        assert_eq!(t.delta_apply(&h, &vac).unwrap(), vec![(q(0), vac.clone())]);
        let a = single(FockMonomial::from_factors(&[(1, 1)]), vec![0, 0]);
        let ha = t.root_system().form(&h, &[q(0), q(1)]);
        let d = t.delta_apply(&h, &a).unwrap();
        assert_eq!(d, vec![(q(0), a.clone()), (q(-1), vac.iter().map(|(s, _)| (s.clone(), ha.clone())).collect())]);
        let om = from_fock(&sugawara_vector(t.root_system()), &[0, 0]);
        let d = t.delta_apply(&h, &om).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d[0].1, om);
        let mut h1 = LatticeElement::new();
        for i in 0..2 {
            add_scaled(&mut h1, &h[i], &single(FockMonomial::from_factors(&[(i, 1)]), vec![0, 0]));
        }
        assert_eq!(d[1], (q(-1), h1));
        assert_eq!(d[2].0, q(-2));
        assert_eq!(d[2].1.values().next().unwrap(), &(t.root_system().norm2(&h) / q(2)));
    }

    #[test]
    fn z_carries_the_shifted_fock_module() {
        for (f, r) in [(Family::A, 1), (Family::A, 2)] {
            let t = tw(f, r);
            let rs = t.root_system().clone();
            let fm = FockModule::level_one(&rs, &WeightVector::root(rs.rho_over_h())).unwrap();
            let om = from_fock(&sugawara_vector(&rs), &vec![0; r]);
            for n in 0..=3u32 {
                for k in -2i64..=2 {
                    if n as i64 - k < 0 {
                        continue;
                    }
                    assert_eq!(t.z_mode(&om, k + 1, n).unwrap(), fm.sugawara_matrix(k, n).unwrap());
                    for i in 0..r {
                        let a = single(FockMonomial::from_factors(&[(i, 1)]), vec![0; r]);
                        let mut h = vec![Q::zero(); r];
                        h[i] = q(1);
                        let e = fm.heisenberg_mode(&rs, &WeightVector::root(h), k, n).unwrap();
                        assert_eq!(t.z_mode(&a, k, n).unwrap(), e);
                    }
                }
            }
            assert_eq!(t.z_mode(&om, 1, 0).unwrap().get(0, 0), t.vacuum_conformal_weight());
        }
    }

    #[test]
    fn incompatible_index_rejected() {
        let t = tw(Family::A, 1);
        let v = single(FockMonomial::vacuum(), vec![-1]);
        let src = Sector { beta: vec![0], fock_weight: 0 };
        assert!(matches!(t.twisted_mode(&v, &q(0), &src), Err(Error::IncompatibleMode(_))));
        assert!(t.twisted_mode(&v, &frac(1, 2), &src).is_ok());
    }

    #[test]
    fn piece_dimensions() {
        // A1: principally specialized character prod_{n odd} (1 - q^n)^{-1}
        let t = tw(Family::A, 1);
        let odd: Vec<i64> = vec![1, 1, 1, 2, 2, 3, 4, 5, 6, 8, 10, 12, 15];
        for d in 0..=12 {
            assert_eq!(t.piece(d).dim as i64, odd[d as usize], "degree {d}");
        }
        // the lattice-zero part of degree h n is Z_n
        let t2 = tw(Family::A, 2);
        let cp = colored_partitions(2, 3);
        for n in 0..=3u32 {
            let (_, _, dim) = t2.z_offset(n);
            assert_eq!(q(dim as i64), cp[n as usize]);
        }
    }

    #[test]
    fn affine_bracket_identity() {
        let t = tw(Family::A, 2);
        let cb = t.voa().chevalley().clone();
        let la = LoopAlgebra::new(&cb);
        let mut elems = Vec::new();
        for deg in [-2i64, -1, 0, 1, 2, 3] {
            for b in la.degree_component(deg) {
                elems.push(loop_term(b));
            }
        }
        for b in (0..2).map(|i| LoopBasis::G(GBasis::H(i), 0)) {
            elems.push(loop_term(b));
        }
        for x in &elems {
            for y in &elems {
                let mx = t.principal_degree(x).unwrap();
                let my = t.principal_degree(y).unwrap();
                for d in 0..=4i64 {
                    if d - my < 0 || d - mx < 0 || d - mx - my < 0 {
                        continue;
                    }
                    let xy = t.affine_matrix(x, d - my).unwrap().mul(&t.affine_matrix(y, d).unwrap());
                    let yx = t.affine_matrix(y, d - mx).unwrap().mul(&t.affine_matrix(x, d).unwrap());
                    let br = la.bracket(x, y);
                    let rhs = if br.is_empty() {
                        SparseMatrix::zeros(t.piece(d - mx - my).dim, t.piece(d).dim)
                    } else {
                        t.affine_matrix(&br, d).unwrap()
                    };
                    assert_eq!(xy.sub(&yx), rhs, "{x:?} {y:?} on degree {d}");
                }
            }
        }
    }

    #[test]
    fn chevalley_generators_kill_vacuum() {
        let t = tw(Family::A, 3);
        let cb = t.voa().chevalley().clone();
        let la = LoopAlgebra::new(&cb);
        for i in 0..=3 {
            let m = t.affine_matrix(&la.chevalley_e(i), 0).unwrap();
            assert_eq!(m.rows(), 0);
        }
        // and e_i (x) t^0 kills Z_0 inside its degree-0 piece: the degree-0 piece is Z_0
        assert_eq!(t.piece(0).dim, 1);
        assert_eq!(t.piece(-1).dim, 0);
    }
}
