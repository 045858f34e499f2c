//! Report payloads behind the command-line verbs, shared with the C API.

use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::covering::{orbit_report, MobiusCover, OrbitReport};
use crate::liealg::{euler, make_algebra, GradingDims, LieError};
use crate::modular::{
    axiom_suite, AffineDilationModel, AxiomReport, BglNet, HalfTurnModel, ModularError, OrthogonalModel,
    PerturbedNet, RepModel, SuiteConfig,
};
use crate::rootsys::{build_root_system, classification_sweep, EulerReport, Family, RootSystemError};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    RootSystem(#[from] RootSystemError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Modular(#[from] ModularError),
    #[error("invalid argument: {0}")]
    Usage(String),
}

impl ReportError {
    /// Usage problems map to exit code 2; everything else is a computation failure.
    pub fn is_usage(&self) -> bool {
        !matches!(self, ReportError::Modular(e) if !matches!(e, ModularError::InvalidModel(_)))
    }
}

/// Wrapper around every emitted payload.
#[derive(Debug, Clone, Serialize)]
pub struct ReportEnvelope {
    pub command: String,
    pub parameters: Value,
    /// Seconds since the Unix epoch; taken from `SOURCE_DATE_EPOCH` when set.
    pub timestamp: u64,
    pub version: String,
    pub payload: Value,
}

impl ReportEnvelope {
    pub fn new(command: &str, parameters: Value, payload: Value) -> Self {
        let timestamp = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or_else(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
        ReportEnvelope {
            command: command.to_string(),
            parameters,
            timestamp,
            version: env!("CARGO_PKG_VERSION").to_string(),
            payload,
        }
    }
}

pub fn classify(family: &str, rank: usize) -> Result<EulerReport, ReportError> {
    let fam = Family::parse(family, rank)?;
    Ok(build_root_system(fam, rank)?.euler_report())
}

/// Euler and symmetric lists for every family with rank at most 8.
pub fn classify_all() -> Vec<EulerReport> {
    classification_sweep(8)
}

#[derive(Debug, Clone, Serialize)]
pub struct GradingReport {
    pub algebra: String,
    pub params: Vec<usize>,
    pub euler: String,
    pub dims: GradingDims,
}

/// Eigenspace dimensions of `ad h` for a named Euler element.
///
/// `which` is `h<j>` or `hn`; `so p q h1` is the boost and `so n n hn` the split element.
pub fn grading(algebra: &str, params: &[usize], which: &str) -> Result<GradingReport, ReportError> {
    let alg = make_algebra(algebra, params)?;
    let idx = which
        .strip_prefix('h')
        .ok_or_else(|| ReportError::Usage(format!("Euler element must look like h1 or hn, got {which}")))?;
    let bad = || ReportError::Usage(format!("no Euler element {which} for {algebra} {params:?}"));
    let h = match (algebra.to_ascii_lowercase().as_str(), idx) {
        ("sl", j) => {
            let n = params[0];
            let j = if j == "n" { n / 2 } else { j.parse().map_err(|_| bad())? };
            if j == 0 || j >= n {
                return Err(bad());
            }
            euler::sl_h(n, j)
        }
        ("sp", "n") => euler::sp_h(params[0] / 2),
        ("so", "1") if params[0] >= 1 && params[1] >= 1 => euler::so_boost(params[0], params[1]),
        ("so", "n") if params[0] == params[1] => euler::so_split_h(params[0]),
        _ => return Err(bad()),
    };
    let dims = alg.grading(&h)?.dims();
    Ok(GradingReport {
        algebra: algebra.to_string(),
        params: params.to_vec(),
        euler: which.to_string(),
        dims,
    })
}

/// Wedge orbits over the base orbit for the `n`-fold cover; `None` is the universal cover.
pub fn orbits(cover: Option<u64>) -> Result<OrbitReport, ReportError> {
    if cover == Some(0) {
        return Err(ReportError::Usage("cover order must be positive".into()));
    }
    Ok(orbit_report(&MobiusCover { order: cover }))
}

/// Models accepted by [`bgl_demo`].
pub const BGL_MODELS: [&str; 5] = ["mobius", "affine", "orthogonal", "poincare-mock", "trivial"];

#[derive(Debug, Clone, Copy)]
pub struct DemoOptions {
    pub seed: u64,
    pub perturb: bool,
    pub tol: f64,
    /// Covering order for the Moebius model.
    pub cover: u64,
    pub samples: usize,
}

impl Default for DemoOptions {
    fn default() -> Self {
        DemoOptions {
            seed: 42,
            perturb: false,
            tol: crate::modular::AXIOM_TOL,
            cover: 2,
            samples: 20,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoReport {
    pub model: String,
    /// The representation is trivial on the wedge generators.
    pub degenerate: bool,
    pub perturbed: bool,
    pub passed: bool,
    pub report: AxiomReport,
}

fn run_suite<M: RepModel>(model: &M, opts: DemoOptions, degenerate: bool) -> Result<DemoReport, ReportError> {
    let cfg = SuiteConfig {
        samples: opts.samples,
        seed: opts.seed,
        tol: opts.tol,
    };
    let report = if opts.perturb {
        let net = PerturbedNet::new(model.base_wedge(), model.dim(), opts.seed);
        axiom_suite(model, &net, cfg)?
    } else {
        axiom_suite(model, &BglNet, cfg)?
    };
    Ok(DemoReport {
        model: model.name(),
        degenerate,
        perturbed: opts.perturb,
        passed: report.passed(),
        report,
    })
}

fn block_count(model: &str, dim: usize) -> Result<usize, ReportError> {
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(ReportError::Usage(format!("{model} needs a positive even dimension, got {dim}")));
    }
    Ok(dim / 2)
}

/// Runs the axiom suite on a finite-dimensional model of the given dimension.
pub fn bgl_demo(model: &str, dim: usize, opts: DemoOptions) -> Result<DemoReport, ReportError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut energies = |k: usize| -> Vec<f64> { (0..k).map(|_| rng.gen_range(0.1..0.8)).collect() };
    match model {
        "mobius" => {
            let n = opts.cover;
            if n == 0 {
                return Err(ReportError::Usage("cover order must be positive".into()));
            }
            let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / n as f64);
            let m = HalfTurnModel::new(n, zeta, energies(block_count(model, dim)?))?;
            run_suite(&m, opts, false)
        }
        "affine" => {
            let m = AffineDilationModel::new(&energies(block_count(model, dim)?))?;
            run_suite(&m, opts, false)
        }
        "trivial" => {
            let m = AffineDilationModel::trivial(block_count(model, dim)?);
            run_suite(&m, opts, true)
        }
        "orthogonal" => {
            if dim == 0 || !dim.is_multiple_of(OrthogonalModel::N) {
                return Err(ReportError::Usage(format!("orthogonal needs a multiple of 6, got {dim}")));
            }
            run_suite(&OrthogonalModel::new(dim / OrthogonalModel::N)?, opts, false)
        }
        "poincare-mock" => {
            if dim != 2 {
                return Err(ReportError::Usage("poincare-mock has dimension 2".into()));
            }
            run_suite(&HalfTurnModel::poincare_mock(), opts, false)
        }
        other => Err(ReportError::Usage(format!(
            "unknown model {other}; expected one of {}",
            BGL_MODELS.join(", ")
        ))),
    }
}

fn join(v: &[usize]) -> String {
    if v.is_empty() {
        "-".into()
    } else {
        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// Aligned plain-text table of classification results.
pub fn classify_table(reports: &[EulerReport]) -> String {
    let rows: Vec<[String; 5]> = reports
        .iter()
        .map(|r| {
            let pairing = r
                .pairing
                .iter()
                .filter(|(a, b)| a < b)
                .map(|(a, b)| format!("{a}<->{b}"))
                .collect::<Vec<_>>()
                .join(",");
            [
                r.family.clone(),
                r.rank.to_string(),
                join(&r.euler),
                join(&r.symmetric),
                if pairing.is_empty() { "-".into() } else { pairing },
            ]
        })
        .collect();
    table(&["family", "rank", "euler", "symmetric", "pairing"], &rows)
}

pub fn table<const N: usize>(header: &[&str; N], rows: &[[String; N]]) -> String {
    let mut widths = header.map(str::len);
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grading_examples() {
        assert_eq!(grading("sl", &[4], "h2").unwrap().dims.dim_plus, 4);
        assert_eq!(grading("so", &[3, 3], "h1").unwrap().dims.dim_plus, 4);
        assert_eq!(grading("sp", &[4], "hn").unwrap().dims.dim_plus, 3);
        assert!(grading("sl", &[4], "h4").is_err());
        assert!(grading("sl", &[4], "x").is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify("D", 4).unwrap().euler, vec![1, 3, 4]);
        assert!(classify("F4", 4).unwrap().euler.is_empty());
        assert_eq!(classify("A", 1).unwrap().symmetric, vec![1]);
        assert!(classify("D", 3).is_err());
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(orbits(Some(1)).unwrap().orbits, 1);
        assert_eq!(orbits(Some(2)).unwrap().orbits, 2);
        assert_eq!(orbits(Some(3)).unwrap().orbits, 1);
        assert!(orbits(Some(0)).is_err());
    }

    #[test]
    fn demo_paths() {
        let opts = DemoOptions { cover: 4, samples: 6, ..Default::default() };
        assert!(bgl_demo("mobius", 4, opts).unwrap().passed);
        let bad = bgl_demo("mobius", 4, DemoOptions { perturb: true, ..opts }).unwrap();
        assert!(!bad.passed && bad.report.hk2.failed());
        let triv = bgl_demo("trivial", 2, opts).unwrap();
        assert!(triv.degenerate && triv.passed);
        assert!(bgl_demo("mobius", 3, opts).is_err());
        assert!(bgl_demo("nope", 2, opts).is_err());
    }
}
