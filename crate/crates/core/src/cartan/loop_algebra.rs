//! The untwisted affine algebra `g (x) C[t, t^-1] + C K` with its principal gradation.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{ChevalleyBasis, GBasis, RootSystem};
use crate::rational::{q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LoopBasis {
    /// `x (x) t^m`
    G(GBasis, i64),
    K,
}

pub type LoopElement = BTreeMap<LoopBasis, Q>;

fn push(e: &mut LoopElement, b: LoopBasis, c: Q) {
    if c.is_zero() {
        return;
    }
    let v = e.entry(b).or_insert_with(Q::zero);
    *v += c;
    if v.is_zero() {
        e.remove(&b);
    }
}

pub struct LoopAlgebra<'a> {
    pub cb: &'a ChevalleyBasis,
}

impl<'a> LoopAlgebra<'a> {
    pub fn new(cb: &'a ChevalleyBasis) -> Self {
        Self { cb }
    }

    fn rs(&self) -> &RootSystem {
        self.cb.root_system()
    }

    /// `ht(alpha) + m h` for `x_alpha (x) t^m`, `m h` for Cartan parts, 0 for `K`.
    pub fn principal_degree(&self, b: LoopBasis) -> i64 {
        let h = self.rs().coxeter_number as i64;
        match b {
            LoopBasis::G(GBasis::X(r), m) => RootSystem::height(&self.cb.roots()[r]) + m * h,
            LoopBasis::G(GBasis::H(_), m) => m * h,
            LoopBasis::K => 0,
        }
    }

    pub fn homogeneous_degree(&self, x: &LoopElement) -> Option<i64> {
        let mut degs = x.keys().map(|&b| self.principal_degree(b));
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    pub fn bracket_basis(&self, a: LoopBasis, b: LoopBasis) -> LoopElement {
        let mut out = LoopElement::new();
        if let (LoopBasis::G(x, m), LoopBasis::G(y, n)) = (a, b) {
            for (g, c) in self.cb.bracket_basis(x, y) {
                push(&mut out, LoopBasis::G(g, m + n), c);
            }
            if m + n == 0 {
                push(&mut out, LoopBasis::K, q(m) * self.cb.form_basis(x, y));
            }
        }
        out
    }

    pub fn bracket(&self, x: &LoopElement, y: &LoopElement) -> LoopElement {
        let mut out = LoopElement::new();
        for (a, ca) in x {
            for (b, cb) in y {
                for (e, c) in self.bracket_basis(*a, *b) {
                    push(&mut out, e, c * ca * cb);
                }
            }
        }
        out
    }

    /// Chevalley generator `e_i`, with `e_0 = x_{-theta} (x) t`.
    pub fn chevalley_e(&self, i: usize) -> LoopElement {
        let rs = self.rs();
        if i == 0 {
            let theta: Vec<i64> = rs.highest_root().iter().map(|x| -x).collect();
            let r = rs.root_index(&theta).expect("-theta is a root");
            LoopElement::from([(LoopBasis::G(GBasis::X(r), 1), q(1))])
        } else {
            let mut a = vec![0; rs.rank];
            a[i - 1] = 1;
            let r = rs.root_index(&a).expect("simple root");
            LoopElement::from([(LoopBasis::G(GBasis::X(r), 0), q(1))])
        }
    }

    /// The principal nilpotent `e = sum_{i=0}^{l} e_i`.
    pub fn principal_nilpotent(&self) -> LoopElement {
        let mut e = LoopElement::new();
        for i in 0..=self.rs().rank {
            for (b, c) in self.chevalley_e(i) {
                push(&mut e, b, c);
            }
        }
        e
    }

    /// Basis of the principal-degree-`m` component (`m != 0`), roots first then Cartan.
    pub fn degree_component(&self, m: i64) -> Vec<LoopBasis> {
        let h = self.rs().coxeter_number as i64;
        let mut out = Vec::new();
        for (r, root) in self.cb.roots().iter().enumerate() {
            let rest = m - RootSystem::height(root);
            if rest.rem_euclid(h) == 0 {
                out.push(LoopBasis::G(GBasis::X(r), rest / h));
            }
        }
        if m.rem_euclid(h) == 0 {
            out.extend((0..self.rs().rank).map(|i| LoopBasis::G(GBasis::H(i), m / h)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{chevalley_constants, Family};
    use std::sync::Arc;

    #[test]
    fn chevalley_generators_have_degree_one() {
        let cb = chevalley_constants(Arc::new(RootSystem::new(Family::A, 2).unwrap()), None).unwrap();
        let la = LoopAlgebra::new(&cb);
        for i in 0..=2 {
            assert_eq!(la.homogeneous_degree(&la.chevalley_e(i)), Some(1));
        }
        assert_eq!(la.degree_component(1).len(), 3);
        assert_eq!(la.degree_component(3).len(), 2);
        assert_eq!(la.degree_component(2).len(), 3);
    }

    #[test]
    fn central_term() {
        let cb = chevalley_constants(Arc::new(RootSystem::new(Family::A, 1).unwrap()), None).unwrap();
        let la = LoopAlgebra::new(&cb);
        let h = LoopBasis::G(GBasis::H(0), 2);
        let hm = LoopBasis::G(GBasis::H(0), -2);
        assert_eq!(la.bracket_basis(h, hm), LoopElement::from([(LoopBasis::K, q(4))]));
    }
}
