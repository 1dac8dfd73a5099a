//! Subcommand bodies. Each returns the bytes it produced; writing them out
//! and recording the run is left to the caller.

use rayon::prelude::*;

use mdslab_core::products::{torus_check, verify_product_embedding};
use mdslab_core::sphere::{asymptotic_scan, eigenvalue_quadrature, eigenvalue_series_sum, KernelKind};
use mdslab_core::stability::{convergence_row, ConvergenceRow};
use mdslab_core::table::{format_real, points_table, read_space, space_to_csv, Table, Value};
use mdslab_core::{classical_mds, sample, AnalyticSpace, Error, Result, SampleMode, SampleSpec};

use crate::args::*;

/// Seed used when neither `--seed` nor `MDSLAB_SEED` is given.
pub const DEFAULT_SEED: u64 = 0;

pub fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("MDSLAB_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| Error::Parse(format!("MDSLAB_SEED must be an unsigned integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Space-separated subcommand words, as used in configs and the claim list.
pub fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Space(SpaceCommand::Gen(_)) => "space gen",
        Command::Mds(MdsCommand::Embed(_)) => "mds embed",
        Command::Mds(MdsCommand::Krein(_)) => "mds krein",
        Command::Sphere(SphereCommand::Eigen(_)) => "sphere eigen",
        Command::Sphere(SphereCommand::Asymptotics(_)) => "sphere asymptotics",
        Command::Stability(StabilityCommand::Converge(_)) => "stability converge",
        Command::Product(ProductCommand::Check(_)) => "product check",
        Command::Torus(TorusCommand::Check(_)) => "torus check",
    }
}

pub fn out_path(cmd: &Command) -> Option<&std::path::Path> {
    let out = match cmd {
        Command::Space(SpaceCommand::Gen(a)) => &a.out,
        Command::Mds(MdsCommand::Embed(a)) => &a.out,
        Command::Mds(MdsCommand::Krein(a)) => &a.out,
        Command::Sphere(SphereCommand::Eigen(a)) => &a.out,
        Command::Sphere(SphereCommand::Asymptotics(a)) => &a.out,
        Command::Stability(StabilityCommand::Converge(a)) => &a.out,
        Command::Product(ProductCommand::Check(a)) => &a.out,
        Command::Torus(TorusCommand::Check(a)) => &a.out,
    };
    out.as_deref()
}

/// What a command produced.
pub enum Output {
    Table(Table),
    /// Already formatted text: a space file, or a bare number on stdout.
    Text { stdout: String, file: String },
}

impl Output {
    pub fn file_bytes(&self) -> String {
        match self {
            Output::Table(t) => t.to_csv(),
            Output::Text { file, .. } => file.clone(),
        }
    }

    pub fn stdout_bytes(&self) -> String {
        match self {
            Output::Table(t) => t.to_csv(),
            Output::Text { stdout, .. } => stdout.clone(),
        }
    }
}

pub fn execute(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Space(SpaceCommand::Gen(a)) => space_gen(a),
        Command::Mds(MdsCommand::Embed(a)) => mds_embed(a),
        Command::Mds(MdsCommand::Krein(a)) => mds_krein(a),
        Command::Sphere(SphereCommand::Eigen(a)) => sphere_eigen(a),
        Command::Sphere(SphereCommand::Asymptotics(a)) => sphere_asymptotics(a),
        Command::Stability(StabilityCommand::Converge(a)) => stability_converge(a),
        Command::Product(ProductCommand::Check(a)) => product_check(a),
        Command::Torus(TorusCommand::Check(a)) => torus(a),
    }
}

fn space_gen(a: &SpaceGen) -> Result<Output> {
    let space: AnalyticSpace = a.space.parse()?;
    let spec = match a.mode.parse::<SampleMode>()? {
        SampleMode::Grid => SampleSpec::grid(a.sizes),
        SampleMode::UniformRandom => SampleSpec::uniform(a.sizes, resolve_seed(a.seed)?),
    };
    let csv = space_to_csv(&sample(&space, &spec)?);
    Ok(Output::Text { stdout: csv.clone(), file: csv })
}

fn mds_embed(a: &MdsEmbed) -> Result<Output> {
    let space = read_space(&a.input)?;
    let r = classical_mds(&space)?;
    if a.m > r.positive_count() {
        return Err(Error::InvalidArgument(format!(
            "m = {} exceeds the {} positive eigenvalues",
            a.m,
            r.positive_count()
        )));
    }
    Ok(Output::Table(points_table(&r.embed(a.m), "x")))
}

fn mds_krein(a: &MdsKrein) -> Result<Output> {
    let space = read_space(&a.input)?;
    let r = classical_mds(&space)?;
    let pos = r.embed(r.positive_count());
    let neg = r.embed_negative();
    let header = (1..=pos.ncols()).map(|c| format!("p{c}")).chain((1..=neg.ncols()).map(|c| format!("n{c}")));
    let mut table = Table::new(header);
    for i in 0..space.len() {
        let row = pos.row(i).iter().chain(neg.row(i).iter()).map(|&x| Value::Real(x)).collect();
        table.push(row)?;
    }
    Ok(Output::Table(table))
}

fn sphere_eigen(a: &SphereEigen) -> Result<Output> {
    let kind: KernelKind = a.kind.parse()?;
    let value = match a.method.as_str() {
        "series" => eigenvalue_series_sum(kind, a.dim, a.degree, a.tol)?.value,
        "quadrature" => eigenvalue_quadrature(a.dim, a.degree, kind)?,
        other => return Err(Error::InvalidArgument(format!("unknown method {other:?}; expected series or quadrature"))),
    };
    let mut table = Table::new(["value"]);
    table.push(vec![Value::Real(value)])?;
    Ok(Output::Text { stdout: format!("{}\n", format_real(value)), file: table.to_csv() })
}

fn sphere_asymptotics(a: &SphereAsymptotics) -> Result<Output> {
    if a.nmin > a.nmax {
        return Err(Error::InvalidArgument(format!("nmin = {} exceeds nmax = {}", a.nmin, a.nmax)));
    }
    let scan = asymptotic_scan(a.dim, a.nmin..=a.nmax, a.tol)?;
    let mut table = Table::new(["n", "lambda", "normalized"]);
    for row in &scan.rows {
        table.push(vec![row.n.into(), row.lambda.into(), row.normalized.into()])?;
    }
    Ok(Output::Table(table))
}

fn stability_converge(a: &StabilityConverge) -> Result<Output> {
    let space: AnalyticSpace = a.space.parse()?;
    if space != AnalyticSpace::circle() {
        return Err(Error::InvalidArgument(format!("no limit map available for {space}")));
    }
    let rows: Vec<ConvergenceRow> = match a.jobs {
        Some(0) => return Err(Error::InvalidArgument("--jobs must be >= 1".into())),
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            pool.install(|| a.sizes.par_iter().map(|&n| convergence_row(n, a.m, a.p)).collect::<Result<_>>())?
        }
        None => a.sizes.par_iter().map(|&n| convergence_row(n, a.m, a.p)).collect::<Result<_>>()?,
    };
    let gw_col = format!("gw{}_images", a.p);
    let mut table = Table::new(["n", "aligned_L2", &gw_col, "w4", "hs_gap_bound_lhs", "hs_gap_bound_rhs"]);
    for r in rows {
        table.push(vec![
            r.n.into(),
            r.aligned_l2.into(),
            r.gw_images.into(),
            r.w4.into(),
            r.hs_gap_bound_lhs.into(),
            r.hs_gap_bound_rhs.into(),
        ])?;
    }
    Ok(Output::Table(table))
}

fn product_check(a: &ProductCheck) -> Result<Output> {
    let [first, second] = a.factors.as_slice() else {
        return Err(Error::InvalidArgument(format!("--factors takes exactly two files, got {}", a.factors.len())));
    };
    let report = verify_product_embedding(&read_space(first)?, &read_space(second)?)?;
    let mut table = Table::new(["spectrum_error", "additivity_error"]);
    table.push(vec![report.spectrum_error.into(), report.additivity_error.into()])?;
    Ok(Output::Table(table))
}

fn torus(a: &TorusCheck) -> Result<Output> {
    let r = torus_check(a.n, a.k, a.trunc, a.pairs, resolve_seed(a.seed)?)?;
    let mut table = Table::new(["pairs", "max_abs_error", "max_rel_error", "lower_margin", "upper_margin"]);
    table.push(vec![
        r.pairs.into(),
        r.max_abs_error.into(),
        r.max_rel_error.into(),
        r.lower_margin.into(),
        r.upper_margin.into(),
    ])?;
    Ok(Output::Table(table))
}
