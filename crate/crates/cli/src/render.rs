//! Plain-text tables.

use std::fmt::Write;

use brylinski_core::brylinski::FiltrationProfile;
use brylinski_core::cartan::RootSystem;
use brylinski_core::rational;
use brylinski_core::series::{w_vacuum_character, QTSeries};
use brylinski_core::verify::{FockReport, KkResult, KkWitness, MainReport};
use brylinski_core::walg::WGenerators;

fn list<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

pub fn roots(rs: &RootSystem) -> String {
    let mut s = String::new();
    writeln!(s, "type            {}", rs.name()).unwrap();
    writeln!(s, "Coxeter number  {}", rs.coxeter_number).unwrap();
    writeln!(s, "exponents       {}", list(&rs.exponents)).unwrap();
    writeln!(s, "degrees         {}", list(&rs.degrees)).unwrap();
    writeln!(s, "positive roots  {}", rs.positive_roots.len()).unwrap();
    let rho: Vec<String> = rs.weyl_vector.iter().map(rational::to_string).collect();
    writeln!(s, "rho (roots)     {}", rho.join(" ")).unwrap();
    writeln!(s, "Cartan matrix").unwrap();
    for row in &rs.cartan_matrix {
        writeln!(s, "  {}", row.iter().map(|x| format!("{x:>3}")).collect::<String>()).unwrap();
    }
    s
}

pub fn series(x: &QTSeries) -> String {
    let mut s = String::new();
    write!(s, "{:>6}", "t\\q").unwrap();
    for qe in 0..=x.q_order() {
        write!(s, "{qe:>6}").unwrap();
    }
    s.push('\n');
    for t in 0..=x.t_order() {
        let row: Vec<String> = (0..=x.q_order()).map(|qe| rational::to_string(&x.coeff(t, qe))).collect();
        if row.iter().all(|c| c == "0") {
            continue;
        }
        write!(s, "{t:>6}").unwrap();
        for c in row {
            write!(s, "{c:>6}").unwrap();
        }
        s.push('\n');
    }
    s
}

pub fn wgens(rs: &RootSystem, g: &WGenerators) -> String {
    let ch = w_vacuum_character(rs, g.cutoff);
    let mut s = String::new();
    writeln!(s, "{} generators in degrees {}", rs.name(), list(&g.degrees())).unwrap();
    writeln!(s, "{:>4} {:>8} {:>10}", "d", "kernel", "character").unwrap();
    for (d, k) in g.kernel_dims.iter().enumerate() {
        writeln!(s, "{d:>4} {k:>8} {:>10}", rational::to_string(&ch.coeff(0, d as u32))).unwrap();
    }
    for (p, gen) in g.generators.iter().enumerate() {
        writeln!(s, "omega^({}) degree {} with {} Fock terms", p + 1, gen.degree, gen.state.len()).unwrap();
    }
    s
}

fn jumps(js: &[(u32, usize)]) -> String {
    if js.is_empty() {
        return "-".into();
    }
    js.iter().map(|(i, m)| if *m == 1 { format!("t^{i}") } else { format!("{m} t^{i}") }).collect::<Vec<_>>().join(" + ")
}

pub fn profile(p: &FiltrationProfile) -> String {
    let mut s = String::new();
    writeln!(s, "{:>3} {:>6}  {:<28} {:<28} {}", "n", "dim Z", "jumps", "series", "match").unwrap();
    for r in &p.rows {
        writeln!(s, "{:>3} {:>6}  {:<28} {:<28} {}", r.n, r.dim_z, jumps(&r.jumps), jumps(&r.expected_jumps), r.matches).unwrap();
    }
    writeln!(s, "all rows match: {}", p.all_match).unwrap();
    s
}

pub fn main_report(r: &MainReport) -> String {
    let mut s = profile(&r.profile);
    writeln!(s).unwrap();
    writeln!(s, "{:>3} {:>7} {:>5} {:>6} {:>12} {:>9}  F^d dims (PBW = filtration)", "n", "tuples", "rank", "dim Z", "independent", "spanning").unwrap();
    for l in &r.levels {
        let dims: Vec<String> = l
            .filtration
            .iter()
            .map(|c| if c.equal { c.pbw_dim.to_string() } else { format!("{}!={}", c.pbw_dim, c.filtration_dim) })
            .collect();
        writeln!(s, "{:>3} {:>7} {:>5} {:>6} {:>12} {:>9}  {}", l.n, l.tuples, l.rank, l.dim_z, l.independent, l.spanning, dims.join(" ")).unwrap();
    }
    writeln!(s, "result: {}", if r.ok { "ok" } else { "VIOLATION" }).unwrap();
    if let Some(w) = r.witness() {
        writeln!(s, "first failure at n = {}, d = {:?}", w.0, w.1).unwrap();
    }
    s
}

pub fn fock_report(r: &FockReport) -> String {
    let mut s = String::new();
    let w: Vec<String> = r.weight.iter().map(rational::to_string).collect();
    writeln!(s, "weight (roots) {}   non-integral on roots: {}", w.join(" "), r.hypothesis).unwrap();
    writeln!(
        s,
        "lowest eigenvalue {}  |weight|^2/2 {}  Verma offset {}",
        rational::to_string(&r.lowest_eigenvalue),
        rational::to_string(&r.expected_eigenvalue),
        rational::to_string(&r.verma_offset)
    )
    .unwrap();
    writeln!(s, "{:>3} {:>6} {:>5} {:>11}", "n", "size", "rank", "invertible").unwrap();
    for l in &r.levels {
        writeln!(s, "{:>3} {:>6} {:>5} {:>11}", l.n, l.dim, l.rank, l.invertible).unwrap();
    }
    writeln!(s, "result: {}", if r.ok { "ok" } else { "VIOLATION" }).unwrap();
    s
}

pub fn generic(r: &KkResult) -> String {
    match &r.witness {
        None => format!("generic (checked one period of {} per root)\n", r.enumeration_bound),
        Some(KkWitness::Imaginary) => "not generic: k + h = 0\n".into(),
        Some(KkWitness::Real { beta, n, value }) => format!(
            "not generic: (lambda + rho | beta + {n} delta) = {} for beta = ({})\n",
            rational::to_string(value),
            list(beta)
        ),
    }
}
