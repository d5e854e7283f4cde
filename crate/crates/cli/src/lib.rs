//! Subcommand implementations behind the `nctda` binary.
//!
//! Every command returns its primary output as a string and leaves writing it
//! to the caller, so the same code path serves both the binary and the tests.

pub mod svg;

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nctda::cumulants::{
    cumulants_to_moments, format_rational, moments_to_cumulants, parse_rational, CumulantKind, CumulantSequence,
    MomentSequence,
};
use nctda::randmat::{repulsive_circle_cloud, repulsive_disk_cloud, torus_cloud, TorusMode};
use nctda::simplicial::{boundary_operator, SimplicialComplex};
use nctda::snf::{betti_snf, smith_divisors, torsion_coefficients, Ring};
use nctda::spectra::{laplacian_spectrum, ZERO_TOL};
use nctda::tda::{
    betti_curves, linear_grid, persistence_pairs, BettiCurves, ComplexType, CurveConfig, Engine, Filtration,
    PointCloud,
};
use nctda::{Error, Rational};

pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;
pub const EXIT_SIZE: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;

#[derive(Debug)]
pub enum CliError {
    Io { path: PathBuf, source: std::io::Error },
    Usage(String),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Usage(_) => EXIT_PARSE,
            CliError::Core(e) => match e.root_cause() {
                Error::Tolerance(_) => EXIT_TOLERANCE,
                Error::SizeLimit { .. } => EXIT_SIZE,
                Error::Numerical(_) => EXIT_NUMERICAL,
                _ => EXIT_PARSE,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Core(Error::PartialCurves { t, cause, .. }) => {
                write!(f, "stopped at t = {t}: {cause}")
            }
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// `t_min:t_max:steps`, evaluated at `steps + 1` evenly spaced radii.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        linear_grid(self.t_min, self.t_max, self.steps).expect("validated on parse")
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, steps] = parts[..] else {
            return Err(format!("grid '{s}' is not of the form tmin:tmax:steps"));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("grid bound '{x}': {e}"));
        let (t_min, t_max) = (num(lo)?, num(hi)?);
        let steps: usize = steps.trim().parse().map_err(|e| format!("grid steps '{steps}': {e}"))?;
        if steps == 0 {
            return Err("grid needs at least one step".into());
        }
        if !(t_min < t_max) || !t_min.is_finite() || !t_max.is_finite() {
            return Err(format!("grid needs finite t_min < t_max, got {t_min}:{t_max}"));
        }
        Ok(GridSpec { t_min, t_max, steps })
    }
}

/// Which homology route `betti` takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BettiRoute {
    Spectral,
    Smith(Ring),
}

fn fmt_num(x: f64) -> String {
    let r = (x * 1e9).round() / 1e9;
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r}")
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

/// `1^9 2^1`-style run-length listing of a sorted divisor chain.
fn run_lengths<T: PartialEq + fmt::Display>(v: &[T]) -> String {
    let mut out = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let j = (i..v.len()).take_while(|&j| v[j] == v[i]).count();
        out.push(format!("{}^{}", v[i], j));
        i += j;
    }
    if out.is_empty() {
        "none".into()
    } else {
        out.join(" ")
    }
}

/// Face counts, Betti numbers, per-grade spectra or Smith divisors, and the
/// Euler characteristic of a complex file.
pub fn cmd_betti(text: &str, route: BettiRoute) -> CliResult<String> {
    let x = SimplicialComplex::parse_facet_text(text)?;
    let counts = x.counts();
    let mut out = String::new();
    let _ = writeln!(out, "faces: {}", join(&counts));
    match route {
        BettiRoute::Spectral => {
            let spectrum = laplacian_spectrum(&x, ZERO_TOL)?;
            let betti = nctda::spectra::betti_spectral(&x, ZERO_TOL)?;
            let _ = writeln!(out, "betti: {}", join(&betti));
            let _ = writeln!(out, "engine: spectral");
            for (i, g) in spectrum.grades.iter().enumerate() {
                let n = counts[i];
                let values: Vec<String> = g.eigenvalues.iter().map(|&v| fmt_num(v)).collect();
                let _ = writeln!(out, "grade {i} eigenvalues: {}", values.join(" "));
                let atoms: Vec<String> = g
                    .measure
                    .atoms()
                    .iter()
                    .map(|a| {
                        let mult = (a.weight * n as f64).round() as usize;
                        let w = Rational::new(mult.into(), n.into());
                        format!("{} d({})", format_rational(&w), fmt_num(a.value.re))
                    })
                    .collect();
                let _ = writeln!(out, "grade {i} measure: {}", atoms.join(" + "));
            }
        }
        BettiRoute::Smith(ring) => {
            let betti = betti_snf(&x, ring)?;
            let _ = writeln!(out, "betti: {}", join(&betti));
            let _ = writeln!(out, "engine: snf over {ring}");
            for r in 1..=x.dim() {
                let d = smith_divisors(&boundary_operator(&x, r)?, ring)?;
                let _ = writeln!(out, "boundary {r} divisors: {}", run_lengths(&d));
            }
            let mut torsion = Vec::new();
            for i in 0..x.dim() {
                let t = torsion_coefficients(&x, i)?;
                if !t.is_empty() {
                    torsion.push(format!("H{i} [{}]", t.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")));
                }
            }
            let _ = writeln!(
                out,
                "integer torsion: {}",
                if torsion.is_empty() { "none".to_string() } else { torsion.join("; ") }
            );
            if ring == Ring::Gf2 {
                let over_z = betti_snf(&x, Ring::Integers)?;
                if over_z != betti {
                    let _ = writeln!(
                        out,
                        "note: integer Betti ranks are {}; the difference comes from 2-torsion",
                        join(&over_z)
                    );
                }
            }
        }
    }
    let _ = writeln!(out, "euler: {}", x.euler_characteristic());
    Ok(out)
}

pub struct CurvesOutput {
    pub csv: String,
    pub svg: String,
    pub bars_csv: String,
    /// Human-readable plateau summary.
    pub report: String,
}

/// Longest run of each distinct Betti vector along the grid.
pub fn plateau_report(curves: &BettiCurves) -> String {
    let n = curves.grid.len();
    let mut best: Vec<(Vec<usize>, usize, usize)> = Vec::new();
    let mut k = 0;
    while k < n {
        let v = curves.at(k);
        let end = (k..n).take_while(|&j| curves.at(j) == v).last().unwrap_or(k);
        match best.iter_mut().find(|(b, _, _)| *b == v) {
            Some(entry) if entry.2 - entry.1 >= end - k => {}
            Some(entry) => *entry = (v, k, end),
            None => best.push((v, k, end)),
        }
        k = end + 1;
    }
    let mut out = String::new();
    for (v, s, e) in best {
        let _ = writeln!(
            out,
            "plateau ({}): t in [{}, {}] over {} grid points",
            v.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
            curves.grid[s],
            curves.grid[e],
            e - s + 1
        );
    }
    out
}

fn curves_outputs(cloud: &PointCloud, curves: &BettiCurves, cfg: &CurveConfig) -> CliResult<CurvesOutput> {
    let (t_min, t_max) = match (curves.grid.first(), curves.grid.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => {
            return Ok(CurvesOutput {
                csv: curves.to_csv(),
                svg: svg::barcode(&nctda::tda::PersistencePairs::new(vec![Vec::new(); cfg.maxdim + 1])?, 0.0, 1.0),
                bars_csv: String::from("dim,birth,death\n"),
                report: String::new(),
            })
        }
    };
    let f = Filtration::new(cloud, cfg.complex, cfg.maxdim, t_max)?;
    let bars = persistence_pairs(&f)?;
    Ok(CurvesOutput {
        csv: curves.to_csv(),
        svg: svg::barcode(&bars, t_min, t_max),
        bars_csv: bars.to_csv(),
        report: plateau_report(curves),
    })
}

/// Betti curves of a point cloud file. On a size cap the outputs for the
/// completed grid prefix come back alongside the error.
pub fn cmd_curves(text: &str, grid: GridSpec, cfg: &CurveConfig) -> (CliResult<CurvesOutput>, Option<CliError>) {
    let cloud = match PointCloud::from_csv(text) {
        Ok(c) => c,
        Err(e) => return (Err(e.into()), None),
    };
    match betti_curves(&cloud, &grid.points(), cfg) {
        Ok(curves) => (curves_outputs(&cloud, &curves, cfg), None),
        Err(Error::PartialCurves { t, completed, cause }) => {
            let partial = curves_outputs(&cloud, &completed, cfg);
            let err = Error::PartialCurves { t, completed, cause };
            (partial, Some(err.into()))
        }
        Err(e) => (Err(e.into()), None),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CloudKind {
    Disk,
    Circle,
    TorusIndependent,
    TorusRepulsive,
}

impl FromStr for CloudKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "disk" => Ok(CloudKind::Disk),
            "circle" => Ok(CloudKind::Circle),
            "torus-ind" => Ok(CloudKind::TorusIndependent),
            "torus-rep" => Ok(CloudKind::TorusRepulsive),
            other => Err(format!("unknown cloud kind '{other}' (disk, circle, torus-ind, torus-rep)")),
        }
    }
}

pub struct CloudOutput {
    pub csv: String,
    pub summary: String,
}

pub fn cmd_cloud(kind: CloudKind, n: usize, big_r: f64, r: f64, seed: u64) -> CliResult<CloudOutput> {
    let cloud = match kind {
        CloudKind::Disk => repulsive_disk_cloud(n, seed)?,
        CloudKind::Circle => repulsive_circle_cloud(n, seed)?,
        CloudKind::TorusIndependent => torus_cloud(n, big_r, r, TorusMode::Independent, seed)?,
        CloudKind::TorusRepulsive => torus_cloud(n, big_r, r, TorusMode::Repulsive, seed)?,
    };
    let mut summary = format!("{} points, dimension {}, kind {}, seed {seed}\n", cloud.len(), cloud.dim(), cloud.tag);
    let radii: Vec<f64> = cloud
        .points()
        .map(|p| p.iter().take(2).map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    let mean = radii.iter().sum::<f64>() / radii.len() as f64;
    let max = radii.iter().copied().fold(0.0, f64::max);
    let _ = writeln!(summary, "planar radius: mean {mean:.6}, max {max:.6}");
    if matches!(kind, CloudKind::TorusIndependent | CloudKind::TorusRepulsive) {
        let off = cloud
            .points()
            .map(|p| {
                let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
                (((rho - big_r).powi(2) + p[2] * p[2]).sqrt() - r).abs()
            })
            .fold(0.0, f64::max);
        let _ = writeln!(summary, "max distance from the torus surface: {off:e}");
    }
    Ok(CloudOutput {
        csv: cloud.to_csv(),
        summary,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformDirection {
    ToCumulants,
    ToMoments,
}

impl FromStr for TransformDirection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "to-cumulants" | "m2c" => Ok(TransformDirection::ToCumulants),
            "to-moments" | "c2m" => Ok(TransformDirection::ToMoments),
            other => Err(format!("unknown direction '{other}' (to-cumulants, to-moments)")),
        }
    }
}

pub fn parse_kind(s: &str) -> Result<CumulantKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Reads `k,value` rows with consecutive `k = 1..K`.
pub fn parse_sequence_csv(text: &str) -> CliResult<Vec<Rational>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let bad = |msg: String| Error::Parse { line, msg };
        if rec.len() != 2 {
            return Err(bad(format!("expected 'k,value', found {} fields", rec.len())).into());
        }
        let k: usize = rec[0].parse().map_err(|_| bad(format!("'{}' is not an order", &rec[0])))?;
        if k != values.len() + 1 {
            return Err(bad(format!("expected order {}, found {k}", values.len() + 1)).into());
        }
        let v = parse_rational(&rec[1]).map_err(|e| match e {
            Error::Parse { msg, .. } => bad(msg),
            other => other,
        })?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::Parse { line: 1, msg: "no values".into() }.into());
    }
    Ok(values)
}

pub fn sequence_csv(values: &[Rational]) -> String {
    let mut s = String::from("k,value\n");
    for (k, v) in values.iter().enumerate() {
        let _ = writeln!(s, "{},{}", k + 1, format_rational(v));
    }
    s
}

pub fn cmd_cumulants(text: &str, kind: CumulantKind, direction: TransformDirection) -> CliResult<String> {
    let values = parse_sequence_csv(text)?;
    let out = match direction {
        TransformDirection::ToCumulants => {
            moments_to_cumulants(&MomentSequence::new(values)?, kind)?.values().to_vec()
        }
        TransformDirection::ToMoments => {
            cumulants_to_moments(&CumulantSequence::new(kind, values)?)?.values().to_vec()
        }
    };
    Ok(sequence_csv(&out))
}

pub fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

pub fn parse_complex(s: &str) -> Result<ComplexType, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

pub fn parse_ring(s: &str) -> Result<Ring, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Input and output must not be the same file.
pub fn check_distinct(input: &Path, outputs: &[Option<&Path>]) -> CliResult<()> {
    let canon = |p: &Path| std::fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf());
    let inp = canon(input);
    for out in outputs.iter().flatten() {
        if canon(out) == inp {
            return Err(CliError::Usage(format!("output {} would overwrite the input", out.display())));
        }
    }
    Ok(())
}
