//! Theorem-level checks: the PBW basis of `Z` and the filtration, Fock modules as
//! Verma modules, and the Kac–Kazhdan genericity calculus.

use std::sync::Arc;

use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::brylinski::{Brylinski, FiltrationProfile};
use crate::cartan::{Family, RootSystem, WeightVector};
use crate::error::{Error, Result};
use crate::fock::fock_basis;
use crate::linalg::{SparseVec, Subspace};
use crate::rational::{self, frac, q, Q};
use crate::series::{colored_partitions, hilbert_grz, verma_offset};
use crate::twisted::TwistedRealization;
use crate::walg::{ordered_words, WGenerators, WModule, CONVENTION_VERSION};

pub const REPORT_SCHEMA: &str = "brylinski/report/1";

/// `omega^{(p_1)}_{k_1} ... omega^{(p_r)}_{k_r}` with 1-based `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PbwTuple(pub Vec<(usize, i64)>);

impl PbwTuple {
    /// `sum d_{p_i}` for the generator degrees `degrees` (sorted, 1-based access).
    pub fn degree_sum(&self, degrees: &[u32]) -> u32 {
        self.0.iter().map(|&(p, _)| degrees[p - 1]).sum()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().map(|&(_, k)| (-k) as u32).sum()
    }

    fn word(&self) -> Vec<(usize, i64)> {
        self.0.iter().map(|&(p, k)| (p - 1, k)).collect()
    }
}

fn sorted_degrees(rs: &RootSystem) -> Vec<u32> {
    let mut d = rs.degrees.clone();
    d.sort_unstable();
    d
}

pub fn pbw_tuples(rs: &RootSystem, n: u32, d_cap: Option<u32>) -> Vec<PbwTuple> {
    let degrees = sorted_degrees(rs);
    ordered_words(rs.rank, n)
        .into_iter()
        .map(|w| PbwTuple(w.into_iter().map(|(p, k)| (p + 1, k)).collect()))
        .filter(|t| d_cap.map_or(true, |c| t.degree_sum(&degrees) <= c))
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FiltrationCheck {
    pub d: u32,
    pub pbw_dim: usize,
    pub filtration_dim: usize,
    /// partial sum `sum_{i <= d}` of the `q^n` row of the series
    pub expected_dim: usize,
    pub equal: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MainLevel {
    pub n: u32,
    pub tuples: usize,
    pub rank: usize,
    pub dim_z: usize,
    pub independent: bool,
    pub spanning: bool,
    pub monotone: bool,
    pub filtration: Vec<FiltrationCheck>,
}

impl MainLevel {
    pub fn ok(&self) -> bool {
        self.independent
            && self.spanning
            && self.monotone
            && self.filtration.iter().all(|c| c.equal && c.filtration_dim == c.expected_dim)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ReportMeta {
    pub schema: String,
    pub convention: String,
    pub pivot_rule: String,
    pub family: Family,
    pub rank: usize,
    pub n_max: u32,
}

impl ReportMeta {
    fn new(rs: &RootSystem, gens: &WGenerators, n_max: u32) -> Self {
        Self {
            schema: REPORT_SCHEMA.into(),
            convention: CONVENTION_VERSION.into(),
            pivot_rule: gens.pivot_rule.clone(),
            family: rs.family,
            rank: rs.rank,
            n_max,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MainReport {
    pub meta: ReportMeta,
    pub profile: FiltrationProfile,
    pub levels: Vec<MainLevel>,
    pub ok: bool,
}

impl MainReport {
    /// First failing `(n, d)`, with `d = None` for independence or spanning failures.
    pub fn witness(&self) -> Option<(u32, Option<u32>)> {
        for l in &self.levels {
            if !(l.independent && l.spanning && l.monotone) {
                return Some((l.n, None));
            }
            if let Some(c) = l.filtration.iter().find(|c| !c.equal || c.filtration_dim != c.expected_dim) {
                return Some((l.n, Some(c.d)));
            }
        }
        None
    }
}

fn check_generators(rs: &RootSystem, gens: &WGenerators) -> Result<()> {
    if gens.family != rs.family || gens.rank != rs.rank || gens.degrees() != sorted_degrees(rs) {
        return Err(Error::Invalid(format!(
            "generators for {:?}{} with degrees {:?} do not match {}",
            gens.family,
            gens.rank,
            gens.degrees(),
            rs.name()
        )));
    }
    Ok(())
}

/// PBW vectors of `Z_n` (via `Z = pi_{1, rho/h}`) against the Brylinski filtration.
pub fn check_theorem_main(rs: Arc<RootSystem>, gens: &WGenerators, n_max: u32) -> Result<MainReport> {
    check_generators(&rs, gens)?;
    let tw = Arc::new(TwistedRealization::new(rs.clone())?);
    let bry = Brylinski::new(tw, n_max)?;
    let profile = bry.filtration_profile(n_max)?;
    let module = WModule::new(rs.clone(), &gens.generators, &WeightVector::root(rs.rho_over_h()))?;
    let degrees = sorted_degrees(&rs);
    let dl = *degrees.last().expect("rank >= 1");
    let series = hilbert_grz(&rs, n_max * dl, n_max);
    let levels = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let dim_z = fock_basis(rs.rank, n).dim();
            let tuples = pbw_tuples(&rs, n, None);
            let vectors = pbw_vectors(&module, &tuples, n)?;
            let rank = Subspace::spanned_by(dim_z, &vectors).dim();
            let mut filtration = Vec::new();
            let mut expected = 0usize;
            let mut monotone = true;
            let mut prev = 0;
            for d in 0..=n * dl {
                expected += rational::to_i64(&series.coeff(d, n)).unwrap_or(0) as usize;
                let capped: Vec<&SparseVec> =
                    tuples.iter().zip(&vectors).filter(|(t, _)| t.degree_sum(&degrees) <= d).map(|(_, v)| v).collect();
                let span = Subspace::spanned_by(dim_z, capped);
                let f = bry.filtration_subspace(n, d as i64)?;
                monotone &= span.dim() >= prev;
                prev = span.dim();
                filtration.push(FiltrationCheck {
                    d,
                    pbw_dim: span.dim(),
                    filtration_dim: f.dim(),
                    expected_dim: expected,
                    equal: span.same_as(&f),
                });
            }
            Ok(MainLevel {
                n,
                tuples: tuples.len(),
                rank,
                dim_z,
                independent: rank == tuples.len(),
                spanning: rank == dim_z,
                monotone,
                filtration,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ok = profile.all_match && levels.iter().all(MainLevel::ok);
    Ok(MainReport { meta: ReportMeta::new(&rs, gens, n_max), profile, levels, ok })
}

fn pbw_vectors(module: &WModule, tuples: &[PbwTuple], n: u32) -> Result<Vec<SparseVec>> {
    let hw = WModule::highest_weight_vector();
    tuples
        .iter()
        .map(|t| {
            let (v, w) = module.apply_word(&t.word(), &hw, 0)?;
            if !v.is_empty() && w != n as i64 {
                return Err(Error::Consistency(format!("PBW vector {t:?} landed in weight {w}, expected {n}")));
            }
            Ok(v)
        })
        .collect()
}

/// `(lambda|beta)` is non-integral for every root.
pub fn nonintegral_on_roots(rs: &RootSystem, lambda: &WeightVector) -> bool {
    let fund = lambda.to_fundamental_basis(rs).coords;
    rs.positive_roots.iter().all(|b| {
        let v: Q = b.iter().zip(&fund).map(|(&m, c)| q(m) * c).fold(Q::zero(), |a, x| a + x);
        !rational::is_integer(&v)
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FockLevel {
    pub n: u32,
    pub tuples: usize,
    pub dim: usize,
    pub colored_partitions: usize,
    pub rank: usize,
    pub square: bool,
    pub invertible: bool,
    /// `omega^{(1)}_0` acts as `|lambda|^2/2 + n` on the whole level
    pub conformal_scalar: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FockReport {
    pub meta: ReportMeta,
    #[serde(with = "crate::rational::serde_q_vec")]
    pub weight: Vec<Q>,
    pub hypothesis: bool,
    pub levels: Vec<FockLevel>,
    #[serde(with = "crate::rational::serde_q")]
    pub lowest_eigenvalue: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub expected_eigenvalue: Q,
    /// leading exponent of the Verma character with weight `lambda - rho` at `k = 1 - h`
    #[serde(with = "crate::rational::serde_q")]
    pub verma_offset: Q,
    pub character_ok: bool,
    pub first_deficient_level: Option<u32>,
    /// false only when the hypothesis holds and a PBW matrix is singular
    pub ok: bool,
}

/// PBW matrices and the conformal weight on `pi_{1,lambda}`.
pub fn check_fock_pullback(rs: Arc<RootSystem>, gens: &WGenerators, lambda: &WeightVector, n_max: u32) -> Result<FockReport> {
    check_generators(&rs, gens)?;
    let lam = lambda.to_root_basis(&rs).coords;
    if lam.len() != rs.rank {
        return Err(Error::BasisMismatch(format!("weight of length {} for rank {}", lam.len(), rs.rank)));
    }
    let hypothesis = nonintegral_on_roots(&rs, lambda);
    let module = WModule::new(rs.clone(), &gens.generators, lambda)?;
    let expected_eigenvalue = rs.norm2(&lam) / q(2);
    let parts = colored_partitions(rs.rank, n_max);
    let levels = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let dim = fock_basis(rs.rank, n).dim();
            let tuples = pbw_tuples(&rs, n, None);
            let vectors = pbw_vectors(&module, &tuples, n)?;
            let rank = Subspace::spanned_by(dim, &vectors).dim();
            let l0 = module.mode(0, 0, n)?;
            let scalar = &expected_eigenvalue + q(n as i64);
            let conformal_scalar = (0..dim).all(|c| {
                let col = l0.column(c);
                col.keys().all(|&r| r == c) && l0.get(c, c) == scalar
            });
            let cp = rational::to_i64(&parts[n as usize]).unwrap_or(-1) as usize;
            Ok(FockLevel {
                n,
                tuples: tuples.len(),
                dim,
                colored_partitions: cp,
                rank,
                square: tuples.len() == dim && dim == cp,
                invertible: rank == dim && tuples.len() == dim,
                conformal_scalar,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let l0 = module.mode(0, 0, 0)?;
    let lowest_eigenvalue = l0.get(0, 0);
    let k = q(1 - rs.coxeter_number as i64);
    let shifted: Vec<Q> = lam.iter().zip(&rs.weyl_vector).map(|(a, r)| a - r).collect();
    let verma_offset = verma_offset(&rs, &WeightVector::root(shifted), &k)?;
    let character_ok = lowest_eigenvalue == expected_eigenvalue
        && verma_offset == expected_eigenvalue
        && levels.iter().all(|l| l.square && l.conformal_scalar);
    let first_deficient_level = levels.iter().find(|l| !l.invertible).map(|l| l.n);
    let ok = character_ok && (!hypothesis || first_deficient_level.is_none());
    Ok(FockReport {
        meta: ReportMeta::new(&rs, gens, n_max),
        weight: lam,
        hypothesis,
        levels,
        lowest_eigenvalue,
        expected_eigenvalue,
        verma_offset,
        character_ok,
        first_deficient_level,
        ok,
    })
}

/// Random weights (fundamental coordinates with small denominators) that are
/// non-integral on every root, from a fixed seed.
pub fn random_nonintegral_weights(rs: &RootSystem, count: usize, seed: u64) -> Vec<WeightVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let w = WeightVector::fundamental(
            (0..rs.rank).map(|_| frac(rng.gen_range(-12..=12), rng.gen_range(2..=9))).collect(),
        );
        if nonintegral_on_roots(rs, &w) {
            out.push(w);
        }
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KkWitness {
    /// `(lambda + rho | beta + n delta) = value`, a positive integer
    Real {
        beta: Vec<i64>,
        n: i64,
        #[serde(with = "crate::rational::serde_q")]
        value: Q,
    },
    /// `(lambda + rho | delta) = k + h = 0`
    Imaginary,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct KkResult {
    pub generic: bool,
    pub witness: Option<KkWitness>,
    /// number of consecutive `n` examined per root (the denominator of `k + h`)
    pub enumeration_bound: u64,
}

const KK_PERIOD_LIMIT: u64 = 1_000_000;

/// Genericity of `lambda = k Lambda_0 + lambda_bar`: no positive real root
/// `beta + n delta` has `(lambda_bar + rho | beta) + n (k + h)` a positive integer,
/// and `k + h != 0`.
///
/// For each root the integrality condition is periodic in `n` with period
/// `P = denom(k + h)`, so one period decides it; positivity is then settled by moving
/// along the residue class.
pub fn kac_kazhdan_generic(rs: &RootSystem, lambda: &WeightVector, k: &Q) -> Result<KkResult> {
    let lam = lambda.to_root_basis(rs).coords;
    if lam.len() != rs.rank {
        return Err(Error::BasisMismatch(format!("weight of length {} for rank {}", lam.len(), rs.rank)));
    }
    let c = k + q(rs.dual_coxeter as i64);
    if c.is_zero() {
        return Ok(KkResult { generic: false, witness: Some(KkWitness::Imaginary), enumeration_bound: 0 });
    }
    let period = c.denom().to_u64().filter(|&p| p <= KK_PERIOD_LIMIT).ok_or_else(|| {
        Error::ResourceLimit(format!("denominator of k + h is {}, limit {KK_PERIOD_LIMIT}", c.denom()))
    })?;
    let step = c.numer().abs();
    let shifted: Vec<Q> = lam.iter().zip(&rs.weyl_vector).map(|(a, r)| a + r).collect();
    for beta in rs.roots() {
        let bq: Vec<Q> = beta.iter().map(|&m| q(m)).collect();
        let a = rs.form(&shifted, &bq);
        let n_lo: i64 = if RootSystem::height(&beta) > 0 { 0 } else { 1 };
        for n in n_lo..n_lo + period as i64 {
            let value = &a + &c * q(n);
            if !rational::is_integer(&value) {
                continue;
            }
            // along n + jP the value moves by sign(c) |numer(c)|
            let witness = if c.is_positive() {
                let deficit = q(1) - &value;
                let j = if deficit.is_positive() {
                    rational::ceil_i64(&(deficit / Q::from_integer(step.clone())))
                } else {
                    0
                };
                Some((n + j * period as i64, value + Q::from_integer(step.clone()) * q(j)))
            } else if rational::is_positive_integer(&value) {
                Some((n, value))
            } else {
                None
            };
            if let Some((n, value)) = witness {
                return Ok(KkResult {
                    generic: false,
                    witness: Some(KkWitness::Real { beta, n, value }),
                    enumeration_bound: period,
                });
            }
        }
    }
    Ok(KkResult { generic: true, witness: None, enumeration_bound: period })
}

/// `lambda - rho` at `k = 1 - h`.
pub fn kac_kazhdan_shifted(rs: &RootSystem, lambda: &WeightVector) -> Result<KkResult> {
    let lam = lambda.to_root_basis(rs).coords;
    let shifted: Vec<Q> = lam.iter().zip(&rs.weyl_vector).map(|(a, r)| a - r).collect();
    kac_kazhdan_generic(rs, &WeightVector::root(shifted), &q(1 - rs.coxeter_number as i64))
}
