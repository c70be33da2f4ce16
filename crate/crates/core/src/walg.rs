//! The W-algebra inside `pi_1` as the joint kernel of the screening zero modes, a
//! choice of free generators, and their modes on Fock modules `pi_{1,lambda}`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cartan::{Family, RootSystem, WeightVector};
use crate::error::{Error, Result};
use crate::fock::{fock_basis, sugawara_vector, vec_from_json, vec_to_json, FockTerm, FockVec};
use crate::lattice::{from_fock, LatticeVoa, Sector};
use crate::linalg::{kernel, SparseMatrix, SparseVec, Subspace};
use crate::rational::{self, frac, q, Q};
use crate::series::w_vacuum_character;

/// Bumped whenever a sign or normalization convention changes.
pub const CONVENTION_VERSION: &str = "bourbaki-eps-v1";
pub const PIVOT_RULE: &str = "first kernel RREF rows independent modulo decomposables";

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub degree: u32,
    pub state: FockVec,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WGenerators {
    pub family: Family,
    pub rank: usize,
    pub cutoff: u32,
    pub generators: Vec<Generator>,
    /// `dim W^{[d]}` for `d = 0..=cutoff`
    pub kernel_dims: Vec<usize>,
    pub pivot_rule: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GeneratorJson {
    pub degree: u32,
    pub state: Vec<FockTerm>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct WGeneratorsJson {
    pub schema: String,
    pub convention: String,
    pub family: Family,
    pub rank: usize,
    pub cutoff: u32,
    pub kernel_dims: Vec<usize>,
    pub pivot_rule: String,
    pub generators: Vec<GeneratorJson>,
}

pub const WGENS_SCHEMA: &str = "brylinski/wgens/1";

impl WGenerators {
    pub fn degrees(&self) -> Vec<u32> {
        self.generators.iter().map(|g| g.degree).collect()
    }

    pub fn to_json(&self) -> WGeneratorsJson {
        WGeneratorsJson {
            schema: WGENS_SCHEMA.into(),
            convention: CONVENTION_VERSION.into(),
            family: self.family,
            rank: self.rank,
            cutoff: self.cutoff,
            kernel_dims: self.kernel_dims.clone(),
            pivot_rule: self.pivot_rule.clone(),
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorJson { degree: g.degree, state: vec_to_json(&g.state) })
                .collect(),
        }
    }

    pub fn from_json(j: &WGeneratorsJson) -> Result<Self> {
        if j.schema != WGENS_SCHEMA || j.convention != CONVENTION_VERSION {
            return Err(Error::Invalid(format!(
                "generator file has schema {} / convention {}, expected {WGENS_SCHEMA} / {CONVENTION_VERSION}",
                j.schema, j.convention
            )));
        }
        let generators = j
            .generators
            .iter()
            .map(|g| Ok(Generator { degree: g.degree, state: vec_from_json(&g.state)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            family: j.family,
            rank: j.rank,
            cutoff: j.cutoff,
            generators,
            kernel_dims: j.kernel_dims.clone(),
            pivot_rule: j.pivot_rule.clone(),
        })
    }

    /// Content hash identifying the inputs that determine these generators.
    pub fn cache_key(family: Family, rank: usize, cutoff: u32) -> String {
        let mut h = Sha256::new();
        h.update(format!("{WGENS_SCHEMA}|{CONVENTION_VERSION}|{family}{rank}|cutoff={cutoff}"));
        hex::encode(h.finalize())
    }
}

/// Default degree cutoff `max(2 d_l, d_l + 4)`.
pub fn default_cutoff(rs: &RootSystem) -> u32 {
    let dl = *rs.degrees.iter().max().expect("rank >= 1");
    (2 * dl).max(dl + 4)
}

/// Basis of `W^{[d]}`: the joint kernel of all screening zero modes on `pi_1^{[d]}`,
/// as sparse vectors over `fock_basis(l, d)`.
pub fn w_graded_kernel(voa: &LatticeVoa, d: u32) -> Result<Vec<SparseVec>> {
    let rs = voa.root_system();
    let blocks = (0..rs.rank)
        .into_par_iter()
        .map(|i| voa.screening_zero_mode(i, d).map(|(_, m)| m))
        .collect::<Result<Vec<_>>>()?;
    let ker = kernel(&SparseMatrix::vstack(&blocks));
    let expect = w_vacuum_character(rs, d).coeff(0, d);
    if q(ker.len() as i64) != expect {
        return Err(Error::Consistency(format!(
            "dim W^[{d}] = {} but the free-generation character predicts {}",
            ker.len(),
            rational::to_string(&expect)
        )));
    }
    Ok(ker)
}

/// Modes `omega^{(p)}_n` of the generators on `pi_{1,lambda}`, with
/// `Y(omega^{(p)}, z) = sum_n omega^{(p)}_n z^{-n-d_p}`, memoized per source weight.
pub struct WModule {
    voa: LatticeVoa,
    gens: Vec<Generator>,
    cache: Mutex<HashMap<(usize, i64, u32), Arc<SparseMatrix>>>,
}

impl WModule {
    pub fn new(rs: Arc<RootSystem>, gens: &[Generator], lambda: &WeightVector) -> Result<Self> {
        let coords = lambda.to_root_basis(&rs).coords;
        let voa = LatticeVoa::with_offset(rs, coords)?;
        Ok(Self { voa, gens: gens.to_vec(), cache: Mutex::new(HashMap::new()) })
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn rank(&self) -> usize {
        self.voa.rank()
    }

    /// Matrix of `omega^{(p)}_n` from Fock weight `s` to `s - n` (0 rows if negative).
    pub fn mode(&self, p: usize, n: i64, s: u32) -> Result<Arc<SparseMatrix>> {
        let key = (p, n, s);
        if let Some(m) = self.cache.lock().expect("mode cache poisoned").get(&key) {
            return Ok(m.clone());
        }
        let g = &self.gens[p];
        let src = Sector { beta: vec![0; self.rank()], fock_weight: s };
        let m = if s as i64 - n < 0 {
            SparseMatrix::zeros(0, fock_basis(self.rank(), s).dim())
        } else {
            let v = from_fock(&g.state, &vec![0; self.rank()]);
            let (t, m) = self.voa.descendant_mode(&v, n + g.degree as i64 - 1, &src)?;
            if t.fock_weight as i64 != s as i64 - n {
                return Err(Error::Consistency(format!("mode {n} of generator {p} moved weight {s} to {}", t.fock_weight)));
            }
            m
        };
        let m = Arc::new(m);
        self.cache.lock().expect("mode cache poisoned").entry(key).or_insert_with(|| m.clone());
        Ok(m)
    }

    /// `omega^{(p_1)}_{k_1} ... omega^{(p_r)}_{k_r} v` (rightmost first) for `v` of weight `s`.
    pub fn apply_word(&self, word: &[(usize, i64)], v: &SparseVec, s: u32) -> Result<(SparseVec, i64)> {
        let mut cur = v.clone();
        let mut w = s as i64;
        for &(p, k) in word.iter().rev() {
            if w - k < 0 {
                return Ok((SparseVec::new(), w - k));
            }
            cur = self.mode(p, k, w as u32)?.apply(&cur);
            w -= k;
            if cur.is_empty() {
                return Ok((cur, w));
            }
        }
        Ok((cur, w))
    }

    pub fn highest_weight_vector() -> SparseVec {
        SparseVec::from([(0, Q::one())])
    }
}

/// Words `omega^{(p_1)}_{k_1} ... omega^{(p_r)}_{k_r}` with `p_1 >= ... >= p_r`, `k_j <= -1`,
/// `k_i <= k_{i+1}` when `p_i = p_{i+1}`, total `sum(-k_j) = n`; `p` is 0-based.
pub fn ordered_words(num_gens: usize, n: u32) -> Vec<Vec<(usize, i64)>> {
    let mut out = Vec::new();
    // factors chosen right to left: (p ascending, then k descending)
    fn go(rest: i64, last: Option<(usize, i64)>, g: usize, acc: &mut Vec<(usize, i64)>, out: &mut Vec<Vec<(usize, i64)>>) {
        if rest == 0 {
            let mut w = acc.clone();
            w.reverse();
            out.push(w);
            return;
        }
        for p in last.map_or(0, |l| l.0)..g {
            let kmax = match last {
                Some((lp, lk)) if lp == p => lk,
                _ => -1,
            };
            // appended factor sits to the left of the previous one: needs k <= previous k
            let mut k = kmax;
            while -k <= rest {
                acc.push((p, k));
                go(rest + k, Some((p, k)), g, acc, out);
                acc.pop();
                k -= 1;
            }
        }
    }
    go(n as i64, None, num_gens, &mut Vec::new(), &mut out);
    out
}

/// Span in weight `d` of the ordered words with creation modes `k <= -d_p` applied to
/// the vacuum of `pi_1`, i.e. of normally ordered products of derivatives.
fn vacuum_span(module: &WModule, d: u32) -> Result<Subspace> {
    let dim = fock_basis(module.rank(), d).dim();
    let mut span = Subspace::new(dim);
    let vac = WModule::highest_weight_vector();
    let degs: Vec<i64> = module.generators().iter().map(|g| g.degree as i64).collect();
    for word in ordered_words(module.generators().len(), d) {
        if word.iter().any(|&(p, k)| k > -degs[p]) {
            continue;
        }
        let (v, _) = module.apply_word(&word, &vac, 0)?;
        span.insert(&v);
    }
    Ok(span)
}

/// Chooses `omega^{(1)} = omega^Sug` and, in every further degree, kernel elements that
/// complete a basis modulo the normally ordered products and derivatives of the
/// generators already chosen.
pub fn choose_generators(rs: Arc<RootSystem>, cutoff: u32) -> Result<WGenerators> {
    let voa = LatticeVoa::new(rs.clone())?;
    let mut degrees = rs.degrees.clone();
    degrees.sort_unstable();
    let top = *degrees.last().expect("rank >= 1");
    let cutoff = cutoff.max(top);
    let kernels = (0..=cutoff).into_par_iter().map(|d| w_graded_kernel(&voa, d)).collect::<Result<Vec<_>>>()?;
    let kernel_dims = kernels.iter().map(|k| k.len()).collect();
    let mut gens: Vec<Generator> = Vec::new();
    let zero = WeightVector::root(vec![Q::zero(); rs.rank]);
    let mut distinct = degrees.clone();
    distinct.dedup();
    for &d in &distinct {
        let need = degrees.iter().filter(|&&x| x == d).count();
        if d == 2 {
            let om = sugawara_vector(&rs);
            let ob = fock_basis(rs.rank, 2).to_sparse(&om)?;
            if !Subspace::spanned_by(fock_basis(rs.rank, 2).dim(), &kernels[2]).contains(&ob) {
                return Err(Error::Consistency("Sugawara vector is not screened".into()));
            }
            gens.push(Generator { degree: 2, state: om });
            if need != 1 {
                return Err(Error::Consistency("more than one generator of degree 2".into()));
            }
            continue;
        }
        let module = WModule::new(rs.clone(), &gens, &zero)?;
        let mut span = vacuum_span(&module, d)?;
        let basis = fock_basis(rs.rank, d);
        let mut fresh = 0;
        for k in &kernels[d as usize] {
            if fresh == need {
                break;
            }
            if span.insert(k) {
                gens.push(Generator { degree: d, state: basis.from_sparse(k) });
                fresh += 1;
            }
        }
        if fresh != need || span.dim() != kernels[d as usize].len() {
            return Err(Error::Consistency(format!(
                "degree {d}: found {fresh} fresh generators, expected {need}; span {} of kernel {}",
                span.dim(),
                kernels[d as usize].len()
            )));
        }
    }
    Ok(WGenerators {
        family: rs.family,
        rank: rs.rank,
        cutoff,
        generators: gens,
        kernel_dims,
        pivot_rule: PIVOT_RULE.into(),
    })
}

/// Adds to each generator of degree > 2 a random combination of decomposable states
/// of the same degree (fixed seed), keeping the screening property.
pub fn perturbed_generators(rs: Arc<RootSystem>, gens: &WGenerators, seed: u64) -> Result<WGenerators> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero = WeightVector::root(vec![Q::zero(); rs.rank]);
    let mut out = gens.clone();
    for idx in 0..out.generators.len() {
        let d = out.generators[idx].degree;
        if d == 2 {
            continue;
        }
        let lower: Vec<Generator> = out.generators.iter().filter(|g| g.degree < d).cloned().collect();
        let module = WModule::new(rs.clone(), &lower, &zero)?;
        let span = vacuum_span(&module, d)?;
        let basis = fock_basis(rs.rank, d);
        let mut extra = SparseVec::new();
        for v in span.basis() {
            let c = frac(rng.gen_range(-5..=5), rng.gen_range(1..=4));
            crate::linalg::axpy(&mut extra, &c, v);
        }
        let mut state = out.generators[idx].state.clone();
        crate::fock::add_scaled(&mut state, &Q::one(), &basis.from_sparse(&extra));
        out.generators[idx].state = state;
    }
    out.pivot_rule = format!("{PIVOT_RULE}; perturbed by decomposables, seed {seed}");
    Ok(out)
}

/// `dim` of the span of ordered words applied to the vacuum, for each degree `0..=cutoff`.
pub fn free_generation_dims(rs: Arc<RootSystem>, gens: &WGenerators, cutoff: u32) -> Result<Vec<usize>> {
    let zero = WeightVector::root(vec![Q::zero(); rs.rank]);
    let module = WModule::new(rs, &gens.generators, &zero)?;
    (0..=cutoff).map(|d| vacuum_span(&module, d).map(|s| s.dim())).collect()
}

/// Checks that every generator is annihilated by all screenings.
pub fn generators_screened(voa: &LatticeVoa, gens: &WGenerators) -> Result<bool> {
    for g in &gens.generators {
        let v = fock_basis(voa.rank(), g.degree).to_sparse(&g.state)?;
        for i in 0..voa.rank() {
            let (_, s) = voa.screening_zero_mode(i, g.degree)?;
            if !s.apply(&v).is_empty() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockMonomial;

    fn rs(f: Family, r: usize) -> Arc<RootSystem> {
        Arc::new(RootSystem::new(f, r).unwrap())
    }

    #[test]
    fn a1_kernel_dimensions() {
        let voa = LatticeVoa::new(rs(Family::A, 1)).unwrap();
        let dims: Vec<usize> = (0..=6).map(|d| w_graded_kernel(&voa, d).unwrap().len()).collect();
        assert_eq!(dims, [1, 0, 1, 1, 2, 2, 4]);
    }

    #[test]
    fn a2_kernel_degree_three() {
        let voa = LatticeVoa::new(rs(Family::A, 2)).unwrap();
        assert_eq!(w_graded_kernel(&voa, 3).unwrap().len(), 2);
        assert_eq!(w_graded_kernel(&voa, 1).unwrap().len(), 0);
    }

    #[test]
    fn ordered_word_counts() {
        assert_eq!(ordered_words(1, 3), vec![vec![(0, -1), (0, -1), (0, -1)], vec![(0, -2), (0, -1)], vec![(0, -3)]]);
        assert_eq!(ordered_words(2, 2).len(), 5);
        assert_eq!(ordered_words(3, 0), vec![Vec::<(usize, i64)>::new()]);
        for w in ordered_words(3, 5) {
            for p in w.windows(2) {
                assert!(p[0].0 > p[1].0 || (p[0].0 == p[1].0 && p[0].1 <= p[1].1), "{w:?}");
            }
        }
    }

    #[test]
    fn generators_a1_a2() {
        let g = choose_generators(rs(Family::A, 1), 6).unwrap();
        assert_eq!(g.degrees(), [2]);
        assert_eq!(g.generators[0].state, FockVec::from([(FockMonomial::from_factors(&[(0, 1), (0, 1)]), frac(1, 4))]));
        let r2 = rs(Family::A, 2);
        let g2 = choose_generators(r2.clone(), 6).unwrap();
        assert_eq!(g2.degrees(), [2, 3]);
        let voa = LatticeVoa::new(r2.clone()).unwrap();
        assert!(generators_screened(&voa, &g2).unwrap());
        let dims = free_generation_dims(r2.clone(), &g2, 6).unwrap();
        let ch = w_vacuum_character(&r2, 6);
        for d in 0..=6u32 {
            assert_eq!(q(dims[d as usize] as i64), ch.coeff(0, d));
            assert_eq!(dims[d as usize], g2.kernel_dims[d as usize]);
        }
    }

    #[test]
    fn sugawara_modes_virasoro_on_fock_module() {
        let r = rs(Family::A, 2);
        let g = choose_generators(r.clone(), 3).unwrap();
        let lam = WeightVector::root(vec![frac(1, 3), frac(1, 5)]);
        let m = WModule::new(r.clone(), &g.generators, &lam).unwrap();
        // omega_0 on |lambda> = |lambda|^2/2
        let l0 = m.mode(0, 0, 0).unwrap();
        assert_eq!(l0.get(0, 0), r.norm2(&lam.coords) / q(2));
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                for w in 0..=2i64 {
                    if w - b < 0 || w - a < 0 || w - a - b < 0 {
                        continue;
                    }
                    let ab = m.mode(0, a, (w - b) as u32).unwrap().mul(&m.mode(0, b, w as u32).unwrap());
                    let ba = m.mode(0, b, (w - a) as u32).unwrap().mul(&m.mode(0, a, w as u32).unwrap());
                    let mut expect = m.mode(0, a + b, w as u32).unwrap().scale(&q(a - b));
                    if a + b == 0 {
                        let dim = fock_basis(2, w as u32).dim();
                        expect = expect.add(&SparseMatrix::scalar(dim, &frac((a * a * a - a) * 2, 12)));
                    }
                    assert_eq!(ab.sub(&ba), expect);
                }
            }
        }
        for p in 0..2 {
            for n in 1..=3 {
                assert_eq!(m.mode(p, n, 0).unwrap().rows(), 0);
            }
        }
    }

    #[test]
    fn sugawara_degenerates_at_zero_weight() {
        let r = rs(Family::A, 1);
        let g = choose_generators(r.clone(), 2).unwrap();
        let m = WModule::new(r, &g.generators, &WeightVector::root(vec![q(0)])).unwrap();
        assert!(m.mode(0, -1, 0).unwrap().is_zero());
    }

    #[test]
    fn json_round_trip_and_key() {
        let r = rs(Family::A, 2);
        let g = choose_generators(r, 4).unwrap();
        let j = serde_json::to_string(&g.to_json()).unwrap();
        let back: WGeneratorsJson = serde_json::from_str(&j).unwrap();
        assert_eq!(WGenerators::from_json(&back).unwrap(), g);
        assert_ne!(WGenerators::cache_key(Family::A, 2, 4), WGenerators::cache_key(Family::A, 2, 5));
    }

    #[test]
    fn perturbation_keeps_screening() {
        let r = rs(Family::A, 2);
        let g = choose_generators(r.clone(), 3).unwrap();
        let p = perturbed_generators(r.clone(), &g, 7).unwrap();
        assert_ne!(p.generators[1].state, g.generators[1].state);
        assert!(generators_screened(&LatticeVoa::new(r).unwrap(), &p).unwrap());
    }
}
