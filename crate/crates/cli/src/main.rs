mod cache;
mod config;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use brylinski_core::brylinski::Brylinski;
use brylinski_core::cartan::{Family, RootSystem, WeightVector};
use brylinski_core::fock::fock_basis;
use brylinski_core::rational::{self, Q};
use brylinski_core::series::hilbert_grz;
use brylinski_core::twisted::TwistedRealization;
use brylinski_core::verify::{
    check_fock_pullback, check_theorem_main, kac_kazhdan_generic, kac_kazhdan_shifted, random_nonintegral_weights,
    KkResult,
};
use brylinski_core::walg::default_cutoff;
use brylinski_core::Error;

use config::{FileConfig, Format};

const DEFAULT_MAX_DIM: usize = 50_000;

#[derive(Parser, Debug)]
#[command(name = "brylinski", version, about = "Exact checks of the Brylinski filtration on the basic representation")]
struct Cli {
    /// TOML file with keys mirroring the flags; flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// overrides $BRYLINSKI_CACHE_DIR
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    no_cache: bool,
    /// largest graded piece the run may build
    #[arg(long, global = true)]
    max_dim: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct TypeArgs {
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    rank: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Root system data
    Roots {
        #[command(flatten)]
        ty: TypeArgs,
    },
    /// Expansion of prod_k prod_n (1 - t^{d_k} q^n)^{-1}
    Hilb {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        t: Option<u32>,
    },
    /// W-algebra generators from the screening kernels
    Wgens {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long)]
        cutoff: Option<u32>,
    },
    /// Jump table of the filtration on Z_n against the series
    Brylinski {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long)]
        n: Option<u32>,
    },
    /// PBW basis of Z_n and its filtration pieces
    VerifyMain {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        cutoff: Option<u32>,
    },
    /// PBW matrices and conformal weight on a Fock module
    VerifyFock {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long)]
        n: Option<u32>,
        /// comma-separated rationals; default rho/h
        #[arg(long, allow_hyphen_values = true)]
        weight: Option<String>,
        /// root or fundamental
        #[arg(long)]
        basis: Option<String>,
        /// also check this many random weights non-integral on all roots
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        cutoff: Option<u32>,
    },
    /// Kac-Kazhdan genericity of k Lambda_0 + weight
    Generic {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        weight: Option<String>,
        #[arg(long)]
        basis: Option<String>,
        /// probe weight - rho at k = 1 - h instead
        #[arg(long)]
        shift_rho: bool,
    },
}

enum Failure {
    Usage(String),
    Violation,
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invalid(m) | Error::BasisMismatch(m) | Error::Unsupported(m) => Failure::Usage(m),
            other => Failure::Core(other),
        }
    }
}

type Run<T> = Result<T, Failure>;

struct Ctx {
    file: FileConfig,
    format: Format,
    cache: Option<PathBuf>,
    max_dim: usize,
}

impl Ctx {
    fn root_system(&self, ty: &TypeArgs) -> Run<Arc<RootSystem>> {
        let family = config::pick(&ty.family, &self.file.family, None).ok_or_else(|| Failure::Usage("missing --family".into()))?;
        let family: Family = family.parse()?;
        let rank = config::pick(&ty.rank, &self.file.rank, None).ok_or_else(|| Failure::Usage("missing --rank".into()))?;
        Ok(Arc::new(RootSystem::new(family, rank)?))
    }

    fn positive(&self, name: &str, flag: &Option<u32>, file: &Option<u32>, default: u32) -> Run<u32> {
        let v = config::pick(flag, file, Some(default)).expect("default given");
        if v == 0 && name != "n" {
            return Err(Failure::Usage(format!("--{name} must be positive")));
        }
        Ok(v)
    }

    fn guard(&self, what: &str, dim: usize) -> Run<()> {
        if dim > self.max_dim {
            return Err(Failure::Core(Error::ResourceLimit(format!(
                "{what} has dimension {dim}, above --max-dim {}",
                self.max_dim
            ))));
        }
        Ok(())
    }

    fn emit<T: Serialize>(&self, value: &T, table: impl FnOnce() -> String) -> Run<()> {
        match self.format {
            Format::Json => println!("{}", serde_json::to_string_pretty(value).map_err(Error::Json)?),
            Format::Table => print!("{}", table()),
        }
        Ok(())
    }
}

fn parse_weight(rs: &RootSystem, text: &str, basis: Option<&str>) -> Run<WeightVector> {
    let coords = text
        .split(',')
        .map(|s| rational::parse(s.trim()))
        .collect::<brylinski_core::Result<Vec<Q>>>()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    if coords.len() != rs.rank {
        return Err(Failure::Usage(format!("weight has {} coordinates, rank is {}", coords.len(), rs.rank)));
    }
    match basis.unwrap_or("root") {
        "root" => Ok(WeightVector::root(coords)),
        "fundamental" => Ok(WeightVector::fundamental(coords)),
        other => Err(Failure::Usage(format!("unknown basis {other:?} (root or fundamental)"))),
    }
}

#[derive(Serialize)]
struct HilbOut {
    family: Family,
    rank: usize,
    series: brylinski_core::series::SeriesJson,
}

#[derive(Serialize)]
struct GenericOut {
    family: Family,
    rank: usize,
    #[serde(with = "brylinski_core::rational::serde_q")]
    k: Q,
    #[serde(with = "brylinski_core::rational::serde_q_vec")]
    weight: Vec<Q>,
    shift_rho: bool,
    result: KkResult,
}

fn run(cli: Cli) -> Run<()> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p).map_err(Failure::Usage)?,
        None => FileConfig::default(),
    };
    let format = config::pick(&cli.format, &file.format, Some(Format::Json)).expect("default given");
    let cache = if cli.no_cache { None } else { config::cache_dir(&cli.cache_dir, &file.cache_dir) };
    let max_dim = config::pick(&cli.max_dim, &file.max_dim, Some(DEFAULT_MAX_DIM)).expect("default given");
    let ctx = Ctx { file, format, cache, max_dim };

    match &cli.command {
        Command::Roots { ty } => {
            let rs = ctx.root_system(ty)?;
            ctx.emit(&rs.to_json(), || render::roots(&rs))
        }
        Command::Hilb { ty, q, t } => {
            let rs = ctx.root_system(ty)?;
            let qo = ctx.positive("q", q, &ctx.file.q, 6)?;
            let to = ctx.positive("t", t, &ctx.file.t, 6)?;
            let s = hilbert_grz(&rs, to, qo);
            ctx.emit(&HilbOut { family: rs.family, rank: rs.rank, series: s.to_json() }, || render::series(&s))
        }
        Command::Wgens { ty, cutoff } => {
            let rs = ctx.root_system(ty)?;
            let c = ctx.positive("cutoff", cutoff, &ctx.file.cutoff, default_cutoff(&rs))?;
            ctx.guard(&format!("pi_1 in degree {c}"), fock_basis(rs.rank, c).dim())?;
            let g = cache::generators(rs.clone(), c, ctx.cache.as_deref())?;
            ctx.emit(&g.to_json(), || render::wgens(&rs, &g))
        }
        Command::Brylinski { ty, n } => {
            let rs = ctx.root_system(ty)?;
            let n = ctx.positive("n", n, &ctx.file.n, 3)?;
            let tw = Arc::new(TwistedRealization::new(rs.clone())?);
            ctx.guard(&format!("principal piece {}", rs.coxeter_number as i64 * n as i64), tw.piece(rs.coxeter_number as i64 * n as i64).dim)?;
            let p = Brylinski::new(tw, n)?.filtration_profile(n)?;
            ctx.emit(&p, || render::profile(&p))?;
            if p.all_match { Ok(()) } else { Err(Failure::Violation) }
        }
        Command::VerifyMain { ty, n, cutoff } => {
            let rs = ctx.root_system(ty)?;
            let n = ctx.positive("n", n, &ctx.file.n, 3)?;
            let top = *rs.degrees.iter().max().expect("rank >= 1");
            let c = ctx.positive("cutoff", cutoff, &ctx.file.cutoff, top)?;
            let tw = TwistedRealization::new(rs.clone())?;
            ctx.guard(&format!("principal piece {}", rs.coxeter_number as i64 * n as i64), tw.piece(rs.coxeter_number as i64 * n as i64).dim)?;
            let g = cache::generators(rs.clone(), c, ctx.cache.as_deref())?;
            let r = check_theorem_main(rs, &g, n)?;
            ctx.emit(&r, || render::main_report(&r))?;
            if r.ok { Ok(()) } else { Err(Failure::Violation) }
        }
        Command::VerifyFock { ty, n, weight, basis, random, seed, cutoff } => {
            let rs = ctx.root_system(ty)?;
            let n = ctx.positive("n", n, &ctx.file.n, 3)?;
            let top = *rs.degrees.iter().max().expect("rank >= 1");
            let c = ctx.positive("cutoff", cutoff, &ctx.file.cutoff, top)?;
            ctx.guard(&format!("pi_1 in degree {n}"), fock_basis(rs.rank, n).dim())?;
            let basis = config::pick(basis, &ctx.file.basis, None);
            let mut weights = vec![match config::pick(weight, &ctx.file.weight, None) {
                Some(w) => parse_weight(&rs, &w, basis.as_deref())?,
                None => WeightVector::root(rs.rho_over_h()),
            }];
            weights.extend(random_nonintegral_weights(&rs, random.unwrap_or(0), *seed));
            let g = cache::generators(rs.clone(), c, ctx.cache.as_deref())?;
            let reports = weights
                .iter()
                .map(|w| check_fock_pullback(rs.clone(), &g, w, n))
                .collect::<brylinski_core::Result<Vec<_>>>()?;
            ctx.emit(&reports, || reports.iter().map(render::fock_report).collect::<Vec<_>>().join("\n"))?;
            if reports.iter().all(|r| r.ok) { Ok(()) } else { Err(Failure::Violation) }
        }
        Command::Generic { ty, k, weight, basis, shift_rho } => {
            let rs = ctx.root_system(ty)?;
            let weight = config::pick(weight, &ctx.file.weight, None).ok_or_else(|| Failure::Usage("missing --weight".into()))?;
            let basis = config::pick(basis, &ctx.file.basis, None);
            let w = parse_weight(&rs, &weight, basis.as_deref())?;
            let (k, result) = if *shift_rho {
                (Q::from_integer((1 - rs.coxeter_number as i64).into()), kac_kazhdan_shifted(&rs, &w)?)
            } else {
                let k = config::pick(k, &ctx.file.k, None).ok_or_else(|| Failure::Usage("missing --k".into()))?;
                let k = rational::parse(&k).map_err(|e| Failure::Usage(e.to_string()))?;
                let r = kac_kazhdan_generic(&rs, &w, &k)?;
                (k, r)
            };
            let out = GenericOut {
                family: rs.family,
                rank: rs.rank,
                k,
                weight: w.to_root_basis(&rs).coords,
                shift_rho: *shift_rho,
                result,
            };
            ctx.emit(&out, || render::generic(&out.result))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Violation) => {
            eprintln!("theorem check failed; see report");
            ExitCode::from(3)
        }
        Err(Failure::Core(e @ Error::ResourceLimit(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(4)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
