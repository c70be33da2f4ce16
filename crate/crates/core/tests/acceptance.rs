//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Tolerances: all comparisons are exact over the rationals; runtime limits are
//! 600 s per type for the filtration tables and 900 s for the A1 suite.

use std::sync::Arc;
use std::time::{Duration, Instant};

use brylinski_core::brylinski::{exponent_multiplicity, splus_basis, Brylinski, FiltrationProfile};
use brylinski_core::cartan::{chevalley_constants, Family, RootSystem, WeightVector};
use brylinski_core::linalg::SparseMatrix;
use brylinski_core::rational::{self, frac, q, Q};
use brylinski_core::series::w_vacuum_character;
use brylinski_core::twisted::{bracket_self_test, TwistedRealization};
use brylinski_core::verify::{
    check_fock_pullback, check_theorem_main, kac_kazhdan_generic, kac_kazhdan_shifted, random_nonintegral_weights,
    KkWitness, MainReport,
};
use brylinski_core::walg::{
    choose_generators, free_generation_dims, generators_screened, perturbed_generators, WGenerators, WGeneratorsJson,
    WModule,
};
use brylinski_core::lattice::LatticeVoa;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TYPE_LIMIT: Duration = Duration::from_secs(600);
const A1_SUITE_LIMIT: Duration = Duration::from_secs(900);

struct Outcome {
    pass: bool,
    detail: String,
}

fn rs(f: Family, r: usize) -> Arc<RootSystem> {
    Arc::new(RootSystem::new(f, r).expect("root system"))
}

fn report(id: u32, name: &str, o: &Outcome) {
    println!("criterion {id} [{name}]: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
}

struct TypeRun {
    name: String,
    report: MainReport,
    elapsed: Duration,
}

fn main_runs(gens: &[(Arc<RootSystem>, WGenerators)], ranges: &[u32]) -> Vec<TypeRun> {
    gens.iter()
        .zip(ranges)
        .map(|((r, g), &n)| {
            let t = Instant::now();
            let report = check_theorem_main(r.clone(), g, n).expect("main check");
            TypeRun { name: format!("{} n<={n}", r.name()), report, elapsed: t.elapsed() }
        })
        .collect()
}

fn criterion1(runs: &[TypeRun]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for r in runs {
        let p: &FiltrationProfile = &r.report.profile;
        let ok = p.all_match && r.elapsed < TYPE_LIMIT;
        pass &= ok;
        let bad: Vec<u32> = p.rows.iter().filter(|x| !x.matches).map(|x| x.n).collect();
        parts.push(format!("{} {:.1}s{}", r.name, r.elapsed.as_secs_f64(), if bad.is_empty() { String::new() } else { format!(" mismatch at n={bad:?}") }));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn criterion2(runs: &[TypeRun]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for r in runs {
        let ok = r.report.levels.iter().all(|l| l.ok());
        pass &= ok;
        let checks: usize = r.report.levels.iter().map(|l| l.filtration.len()).sum();
        parts.push(match r.report.witness() {
            None => format!("{}: {checks} (n,d) equalities", r.name),
            Some(w) => format!("{}: first failure {w:?}", r.name),
        });
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn criterion3(a1: &(Arc<RootSystem>, WGenerators), a2: &(Arc<RootSystem>, WGenerators)) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for ((r, g), n_max, count, seed) in [(a1, 6u32, 20usize, 101u64), (a2, 4, 20, 202)] {
        let mut weights = vec![WeightVector::root(r.rho_over_h())];
        weights.extend(random_nonintegral_weights(r, count, seed));
        let mut good = 0;
        for w in &weights {
            let rep = check_fock_pullback(r.clone(), g, w, n_max).expect("fock check");
            if rep.ok && rep.hypothesis && rep.first_deficient_level.is_none() && rep.character_ok {
                good += 1;
            }
        }
        pass &= good == weights.len();
        parts.push(format!("{} n<={n_max}: {good}/{} weights invertible with matching conformal weight", r.name(), weights.len()));
        let zero = check_fock_pullback(r.clone(), g, &WeightVector::root(vec![Q::from_integer(0.into()); r.rank]), 3)
            .expect("negative control");
        let deficient = zero.first_deficient_level;
        let ok = match r.rank {
            1 => deficient == Some(1),
            _ => deficient.is_some_and(|d| d <= 3),
        };
        pass &= ok && zero.character_ok;
        parts.push(format!("{} lambda=0 deficient at level {deficient:?}", r.name()));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn virasoro_holds(module: &WModule, l: usize, s_max: u32) -> bool {
    let c = q(l as i64);
    let mode = |n: i64, s: i64| -> Option<Arc<SparseMatrix>> {
        if s < 0 || s - n < 0 {
            None
        } else {
            Some(module.mode(0, n, s as u32).expect("mode"))
        }
    };
    for s in 0..=s_max as i64 {
        for m in -3i64..=3 {
            for n in -3i64..=3 {
                let t = s - m - n;
                if t < 0 {
                    continue;
                }
                let dim_s = brylinski_core::fock::fock_basis(l, s as u32).dim();
                let dim_t = brylinski_core::fock::fock_basis(l, t as u32).dim();
                let prod = |a: i64, b: i64| match (mode(b, s), mode(a, s - b)) {
                    (Some(x), Some(y)) => y.mul(&x),
                    _ => SparseMatrix::zeros(dim_t, dim_s),
                };
                let lhs = prod(m, n).sub(&prod(n, m));
                let mut rhs = match mode(m + n, s) {
                    Some(x) => x.scale(&q(m - n)),
                    None => SparseMatrix::zeros(dim_t, dim_s),
                };
                if m + n == 0 {
                    rhs = rhs.add(&SparseMatrix::scalar(dim_s, &(&c * q(m * m * m - m) / q(12))));
                }
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

fn criterion4(gens: &[(Arc<RootSystem>, WGenerators)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (r, g) in gens {
        let series = w_vacuum_character(r, g.cutoff);
        let expected: Vec<usize> = (0..=g.cutoff).map(|d| rational::to_i64(&series.coeff(0, d)).unwrap_or(-1) as usize).collect();
        let free = free_generation_dims(r.clone(), g, g.cutoff).expect("free generation");
        let voa = LatticeVoa::new(r.clone()).expect("voa");
        let screened = generators_screened(&voa, g).expect("screening");
        let module = WModule::new(r.clone(), &g.generators, &WeightVector::root(vec![Q::from_integer(0.into()); r.rank]))
            .expect("module");
        let vir = virasoro_holds(&module, r.rank, 4);
        let vir_twisted = {
            let m = WModule::new(r.clone(), &g.generators, &WeightVector::root(r.rho_over_h())).expect("module");
            virasoro_holds(&m, r.rank, 3)
        };
        let ok = g.kernel_dims == expected && free == expected && screened && vir && vir_twisted;
        pass &= ok;
        parts.push(format!(
            "{} d<={}: kernel {:?}{} screened={screened} virasoro={}",
            r.name(),
            g.cutoff,
            g.kernel_dims,
            if g.kernel_dims == expected { "" } else { " != character" },
            vir && vir_twisted
        ));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn criterion5() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (f, r) in [(Family::A, 1), (Family::A, 2), (Family::A, 3), (Family::D, 4), (Family::E, 6)] {
        let root = rs(f, r);
        let cb = chevalley_constants(root.clone(), None).expect("chevalley");
        let top = 2 * root.coxeter_number as i64;
        let s = splus_basis(&cb, top);
        let ok = s.as_ref().is_ok_and(|s| (1..=top).all(|m| s.dims().get(&m).copied().unwrap_or(0) == exponent_multiplicity(&root, m)));
        pass &= ok;
        parts.push(format!("{} dims ok={ok}", root.name()));
    }
    let d4 = splus_basis(&chevalley_constants(rs(Family::D, 4), None).expect("chevalley"), 3).expect("s+");
    let mult2 = d4.dims().get(&3) == Some(&2);
    pass &= mult2;
    parts.push(format!("D4 degree 3 multiplicity {:?}", d4.dims().get(&3)));
    for (f, r, n, d) in [(Family::A, 1, 6u32, 12i64), (Family::A, 2, 3, 9), (Family::D, 4, 1, 6)] {
        let tw = Arc::new(TwistedRealization::new(rs(f, r)).expect("twisted"));
        let b = Brylinski::new(tw, n).expect("brylinski");
        let ok = b.operators_commute(d).expect("commutation");
        pass &= ok;
        parts.push(format!("{} commute on pieces <= {d}: {ok}", b.realization().root_system().name()));
    }
    for (f, r, degs, d) in [
        (Family::A, 1, vec![-2i64, -1, 0, 1, 2, 3], 6i64),
        (Family::A, 2, vec![-2, -1, 0, 1, 2, 3], 4),
        (Family::D, 4, vec![-1, 0, 1, 3], 3),
    ] {
        let tw = TwistedRealization::new(rs(f, r)).expect("twisted");
        let chk = bracket_self_test(&tw, &degs, d).expect("bracket test");
        pass &= chk.failures.is_empty();
        parts.push(format!("{} brackets {}/{}", tw.root_system().name(), chk.pairs - chk.failures.len(), chk.pairs));
    }
    Outcome { pass, detail: parts.join("; ") }
}

/// Recomputes `(lambda + rho | beta + n delta)` and the positivity of `beta + n delta`.
fn witness_valid(r: &RootSystem, lam: &WeightVector, k: &Q, w: &KkWitness) -> bool {
    let c = k + q(r.dual_coxeter as i64);
    match w {
        KkWitness::Imaginary => c == Q::from_integer(0.into()),
        KkWitness::Real { beta, n, value } => {
            let l = lam.to_root_basis(r).coords;
            let shifted: Vec<Q> = l.iter().zip(&r.weyl_vector).map(|(a, b)| a + b).collect();
            let b: Vec<Q> = beta.iter().map(|&m| q(m)).collect();
            let v = r.form(&shifted, &b) + &c * q(*n);
            let positive = *n > 0 || (*n == 0 && RootSystem::height(beta) > 0);
            r.is_root(beta) && positive && &v == value && rational::is_positive_integer(&v)
        }
    }
}

fn criterion6() -> Outcome {
    let types = [(Family::A, 1), (Family::A, 2), (Family::A, 3), (Family::D, 4), (Family::E, 6)];
    let mut generic = 0;
    let mut total = 0;
    for (i, &(f, r)) in types.iter().enumerate() {
        let root = rs(f, r);
        for w in random_nonintegral_weights(&root, 20, 600 + i as u64) {
            total += 1;
            if kac_kazhdan_shifted(&root, &w).is_ok_and(|x| x.generic) {
                generic += 1;
            }
        }
    }
    let mut witnesses_ok = 0;
    let mut constructed = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    for &(f, r) in &types {
        let root = rs(f, r);
        for _ in 0..10 {
            let lam = WeightVector::fundamental((0..r).map(|_| q(rng.gen_range(0..=3))).collect());
            let k = frac(rng.gen_range(-20..=20), rng.gen_range(1..=5));
            constructed += 1;
            if let Ok(res) = kac_kazhdan_generic(&root, &lam, &k) {
                if !res.generic && res.witness.as_ref().is_some_and(|w| witness_valid(&root, &lam, &k, w)) {
                    witnesses_ok += 1;
                }
            }
        }
        let crit = q(-(root.dual_coxeter as i64));
        let lam = WeightVector::root(vec![frac(1, 3); r]);
        constructed += 1;
        if let Ok(res) = kac_kazhdan_generic(&root, &lam, &crit) {
            if res.witness == Some(KkWitness::Imaginary) {
                witnesses_ok += 1;
            }
        }
    }
    let a1 = rs(Family::A, 1);
    let minus_rho = WeightVector::root(vec![frac(-1, 2)]);
    let res = kac_kazhdan_generic(&a1, &minus_rho, &q(-1)).expect("kk");
    constructed += 1;
    if res.witness == Some(KkWitness::Real { beta: vec![1], n: 1, value: q(1) }) {
        witnesses_ok += 1;
    }
    let pass = generic == total && total == 100 && witnesses_ok == constructed;
    Outcome {
        pass,
        detail: format!("{generic}/{total} shifted non-integral weights generic; {witnesses_ok}/{constructed} constructed witnesses valid"),
    }
}

fn criterion7(a1: &(Arc<RootSystem>, WGenerators), a1_elapsed: Duration) -> Outcome {
    let (r, g) = a1;
    let t = Instant::now();
    let first = serde_json::to_string(&check_theorem_main(r.clone(), g, 4).expect("main")).expect("json");
    let again = serde_json::to_string(&check_theorem_main(r.clone(), g, 4).expect("main")).expect("json");
    let fresh_gens = choose_generators(r.clone(), g.cutoff).expect("generators");
    let w = WeightVector::root(r.rho_over_h());
    let f1 = serde_json::to_string(&check_fock_pullback(r.clone(), g, &w, 4).expect("fock")).expect("json");
    let f2 = serde_json::to_string(&check_fock_pullback(r.clone(), &fresh_gens, &w, 4).expect("fock")).expect("json");
    let deterministic = first == again && f1 == f2 && fresh_gens == *g;

    let mut round_trip = true;
    for (root, gens) in [(r.clone(), g.clone()), {
        let a2 = rs(Family::A, 2);
        let g2 = choose_generators(a2.clone(), 4).expect("generators");
        (a2, g2)
    }] {
        let text = serde_json::to_string_pretty(&gens.to_json()).expect("json");
        let parsed: WGeneratorsJson = serde_json::from_str(&text).expect("parse");
        let back = WGenerators::from_json(&parsed).expect("reload");
        let m1 = WModule::new(root.clone(), &gens.generators, &WeightVector::root(root.rho_over_h())).expect("module");
        let m2 = WModule::new(root.clone(), &back.generators, &WeightVector::root(root.rho_over_h())).expect("module");
        for p in 0..gens.generators.len() {
            for n in -3i64..=3 {
                for s in 0..=4u32 {
                    if s as i64 - n < 0 {
                        continue;
                    }
                    round_trip &= m1.mode(p, n, s).expect("mode") == m2.mode(p, n, s).expect("mode");
                }
            }
        }
        round_trip &= back == gens;
    }
    let a1_total = a1_elapsed + t.elapsed();
    Outcome {
        pass: deterministic && round_trip && a1_total < A1_SUITE_LIMIT,
        detail: format!("byte-identical={deterministic} round-trip={round_trip} A1 suite {:.1}s", a1_total.as_secs_f64()),
    }
}

fn main() {
    let start = Instant::now();
    let cutoffs = [(Family::A, 1, 8u32), (Family::A, 2, 8), (Family::A, 3, 6), (Family::D, 4, 6)];
    let mut gen_times = Vec::new();
    let gens: Vec<(Arc<RootSystem>, WGenerators)> = cutoffs
        .iter()
        .map(|&(f, r, c)| {
            let t = Instant::now();
            let root = rs(f, r);
            let g = choose_generators(root.clone(), c).expect("generators");
            gen_times.push(t.elapsed());
            (root, g)
        })
        .collect();

    let runs = main_runs(&gens[..3], &[6, 4, 3]);
    let a1_elapsed = gen_times[0] + runs[0].elapsed;

    let results = [
        (1, "filtration jump table", criterion1(&runs)),
        (2, "PBW basis and filtration", criterion2(&runs)),
        (3, "Fock modules as Verma modules", criterion3(&gens[0], &gens[1])),
        (4, "W structure", criterion4(&gens)),
        (5, "principal Heisenberg", criterion5()),
        (6, "genericity", criterion6()),
        (7, "engineering", criterion7(&gens[0], a1_elapsed)),
    ];
    for (id, name, o) in &results {
        report(*id, name, o);
    }

    let a2 = &gens[1];
    match perturbed_generators(a2.0.clone(), &a2.1, 7).and_then(|p| check_theorem_main(a2.0.clone(), &p, 3)) {
        Ok(r) => println!("info: perturbed A2 generators, n<=3: main theorem {}", if r.ok { "holds" } else { "fails" }),
        Err(e) => println!("info: perturbed A2 generators: {e}"),
    }
    println!("total {:.1}s", start.elapsed().as_secs_f64());
    if results.iter().any(|(_, _, o)| !o.pass) {
        std::process::exit(1);
    }
}
