use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use super::RootSystem;
use crate::error::{Error, Result};
use crate::rational::{q, Q};

/// Basis of the finite-dimensional algebra: `H(i)` is the Cartan element identified
/// with the simple root `alpha_i` through the form, `X(r)` the root vector of root `r`
/// (index into [`RootSystem::roots`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GBasis {
    H(usize),
    X(usize),
}

pub type GElem = BTreeMap<GBasis, Q>;

fn push(e: &mut GElem, b: GBasis, c: Q) {
    if c.is_zero() {
        return;
    }
    let v = e.entry(b).or_insert_with(Q::zero);
    *v += c;
    if v.is_zero() {
        e.remove(&b);
    }
}

/// The sign cocycle and the bracket of the simply-laced algebra it defines.
#[derive(Clone, Debug)]
pub struct ChevalleyBasis {
    rs: Arc<RootSystem>,
    /// position of each simple root in the chosen total order
    position: Vec<usize>,
    roots: Vec<Vec<i64>>,
}

impl ChevalleyBasis {
    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn roots(&self) -> &[Vec<i64>] {
        &self.roots
    }

    pub fn dim(&self) -> usize {
        self.rs.rank + self.roots.len()
    }

    pub fn basis(&self) -> Vec<GBasis> {
        (0..self.rs.rank).map(GBasis::H).chain((0..self.roots.len()).map(GBasis::X)).collect()
    }

    /// `eps(a_i, a_j) = 1` if `i <= j` in the order, `(-1)^{(a_i|a_j)}` otherwise,
    /// extended bimultiplicatively.
    pub fn eps(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut exponent = 0i64;
        let l = self.rs.rank;
        for i in 0..l {
            if a[i] == 0 {
                continue;
            }
            for j in 0..l {
                if self.position[i] > self.position[j] {
                    exponent += a[i] * b[j] * self.rs.gram[i][j];
                }
            }
        }
        if exponent.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    /// `N(a, b)` with `[x_a, x_b] = N(a,b) x_{a+b}` when `a + b` is a root.
    pub fn structure_constant(&self, a: &[i64], b: &[i64]) -> Option<i64> {
        let s: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.rs.is_root(&s).then(|| self.eps(a, b))
    }

    pub fn bracket_basis(&self, x: GBasis, y: GBasis) -> GElem {
        let mut out = GElem::new();
        match (x, y) {
            (GBasis::H(_), GBasis::H(_)) => {}
            (GBasis::H(i), GBasis::X(r)) => {
                let c = self.rs.gram[i].iter().zip(&self.roots[r]).map(|(g, a)| g * a).sum::<i64>();
                push(&mut out, GBasis::X(r), q(c));
            }
            (GBasis::X(_), GBasis::H(_)) => {
                for (b, c) in self.bracket_basis(y, x) {
                    push(&mut out, b, -c);
                }
            }
            (GBasis::X(r), GBasis::X(s)) => {
                let a = &self.roots[r];
                let b = &self.roots[s];
                let sum: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if sum.iter().all(|&v| v == 0) {
                    let e = q(self.eps(a, b));
                    for (i, &ai) in a.iter().enumerate() {
                        push(&mut out, GBasis::H(i), &e * q(ai));
                    }
                } else if let Some(t) = self.rs.root_index(&sum) {
                    push(&mut out, GBasis::X(t), q(self.eps(a, b)));
                }
            }
        }
        out
    }

    pub fn bracket(&self, x: &GElem, y: &GElem) -> GElem {
        let mut out = GElem::new();
        for (bx, cx) in x {
            for (by, cy) in y {
                for (b, c) in self.bracket_basis(*bx, *by) {
                    push(&mut out, b, c * cx * cy);
                }
            }
        }
        out
    }

    /// Invariant form: `(H_i|H_j) = C_ij`, `(x_a|x_{-a}) = eps(a, -a)`.
    pub fn form_basis(&self, x: GBasis, y: GBasis) -> Q {
        match (x, y) {
            (GBasis::H(i), GBasis::H(j)) => q(self.rs.gram[i][j]),
            (GBasis::X(r), GBasis::X(s)) => {
                let a = &self.roots[r];
                let b = &self.roots[s];
                if a.iter().zip(b).all(|(x, y)| x + y == 0) {
                    q(self.eps(a, b))
                } else {
                    Q::zero()
                }
            }
            _ => Q::zero(),
        }
    }

    pub fn form(&self, x: &GElem, y: &GElem) -> Q {
        let mut s = Q::zero();
        for (bx, cx) in x {
            for (by, cy) in y {
                let f = self.form_basis(*bx, *by);
                if !f.is_zero() {
                    s += f * cx * cy;
                }
            }
        }
        s
    }

    /// Exhaustive Jacobi identity on basis triples.
    pub fn check_jacobi(&self) -> Result<()> {
        let basis = self.basis();
        let n = basis.len();
        let single = |b: GBasis| GElem::from([(b, q(1))]);
        for i in 0..n {
            for j in i + 1..n {
                let xy = self.bracket_basis(basis[i], basis[j]);
                for k in j + 1..n {
                    let z = single(basis[k]);
                    let mut total = self.bracket(&xy, &z);
                    let yz = self.bracket_basis(basis[j], basis[k]);
                    for (b, c) in self.bracket(&yz, &single(basis[i])) {
                        push(&mut total, b, c);
                    }
                    let zx = self.bracket_basis(basis[k], basis[i]);
                    for (b, c) in self.bracket(&zx, &single(basis[j])) {
                        push(&mut total, b, c);
                    }
                    if !total.is_empty() {
                        return Err(Error::Consistency(format!(
                            "Jacobi identity fails on {:?}, {:?}, {:?}",
                            basis[i], basis[j], basis[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Builds the sign cocycle for the given total order of simple roots (a permutation of
/// `0..rank`; `None` means Bourbaki order) and verifies the Jacobi identity.
pub fn chevalley_constants(rs: Arc<RootSystem>, ordering: Option<&[usize]>) -> Result<ChevalleyBasis> {
    let l = rs.rank;
    let order: Vec<usize> = match ordering {
        Some(o) => o.to_vec(),
        None => (0..l).collect(),
    };
    let mut sorted = order.clone();
    sorted.sort_unstable();
    if sorted != (0..l).collect::<Vec<_>>() {
        return Err(Error::Invalid(format!("ordering {order:?} is not a permutation of 0..{l}")));
    }
    let mut position = vec![0; l];
    for (p, &i) in order.iter().enumerate() {
        position[i] = p;
    }
    let roots = rs.roots();
    let cb = ChevalleyBasis { rs, position, roots };
    cb.check_jacobi()?;
    Ok(cb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::Family;

    fn cb(f: Family, r: usize) -> ChevalleyBasis {
        chevalley_constants(Arc::new(RootSystem::new(f, r).unwrap()), None).unwrap()
    }

    #[test]
    fn cocycle_properties() {
        let c = cb(Family::A, 2);
        let a1 = [1, 0];
        let a2 = [0, 1];
        assert_eq!(c.eps(&a1, &a1), 1);
        assert_eq!(c.eps(&a1, &a2) * c.eps(&a2, &a1), -1);
        // bimultiplicativity and the commutator rule on a lattice box
        let rs = c.root_system().clone();
        for a in -2..=2 {
            for b in -2..=2 {
                for x in -2..=2 {
                    for y in -2..=2 {
                        let u = [a, b];
                        let v = [x, y];
                        let sign = if rs.form_int(&u, &v).rem_euclid(2) == 0 { 1 } else { -1 };
                        assert_eq!(c.eps(&u, &v) * c.eps(&v, &u), sign);
                        let w = [a + x, b + y];
                        assert_eq!(c.eps(&w, &a1), c.eps(&u, &a1) * c.eps(&v, &a1));
                    }
                }
            }
        }
    }

    #[test]
    fn a2_bracket_sign_follows_cocycle() {
        let c = cb(Family::A, 2);
        let i1 = c.root_system().root_index(&[1, 0]).unwrap();
        let i2 = c.root_system().root_index(&[0, 1]).unwrap();
        let i12 = c.root_system().root_index(&[1, 1]).unwrap();
        let br = c.bracket_basis(GBasis::X(i1), GBasis::X(i2));
        // eps(a1, a2) = 1 for the Bourbaki order
        assert_eq!(br, GElem::from([(GBasis::X(i12), q(1))]));
        let rev = chevalley_constants(Arc::new(c.root_system().clone()), Some(&[1, 0])).unwrap();
        assert_eq!(rev.bracket_basis(GBasis::X(i1), GBasis::X(i2)), GElem::from([(GBasis::X(i12), q(-1))]));
    }

    #[test]
    fn antisymmetry_rule_for_structure_constants() {
        for (f, r) in [(Family::A, 3), (Family::D, 4)] {
            let c = cb(f, r);
            let rs = c.root_system();
            for a in c.roots() {
                for b in c.roots() {
                    if let Some(n) = c.structure_constant(a, b) {
                        let m = c.structure_constant(b, a).unwrap();
                        let sign = if rs.form_int(a, b).rem_euclid(2) == 0 { 1 } else { -1 };
                        // bracket antisymmetry: N(a,b) = (-1)^{(a|b)} N(b,a) = -N(b,a)
                        assert_eq!(n, sign * m);
                        assert_eq!(n, -m);
                    }
                }
            }
        }
    }

    #[test]
    fn jacobi_for_small_types() {
        cb(Family::A, 1);
        cb(Family::A, 3);
        cb(Family::D, 4);
        assert!(chevalley_constants(Arc::new(RootSystem::new(Family::A, 2).unwrap()), Some(&[0, 0])).is_err());
    }

    #[test]
    fn form_is_invariant() {
        let c = cb(Family::A, 2);
        let basis = c.basis();
        let one = |b: GBasis| GElem::from([(b, q(1))]);
        for &x in &basis {
            for &y in &basis {
                for &z in &basis {
                    let l = c.form(&c.bracket_basis(x, y), &one(z));
                    let r = c.form(&one(x), &c.bracket_basis(y, z));
                    assert_eq!(l, r);
                }
            }
        }
    }
}
