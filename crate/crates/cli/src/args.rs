//! Command-line grammar.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qflat_core::flatness::{FlatMode, DEFAULT_N_MAX, DEFAULT_TAU_GRID};
use qflat_core::quadrature::{self, DEFAULT_TOL, MAX_DEGREE, MAX_TOL, MIN_TOL};
use qflat_core::spaces::{parse_selectors, RootData};

#[derive(Debug, Parser)]
#[command(
    name = "qflat",
    version,
    about = "Curvature of the quantum Hilbert field over compact rank-one symmetric spaces",
    after_help = "Exit status: 0 success, 1 configuration error, 2 a numeric cell failed, \
                  3 scan verdicts differ from the expected pattern (--expect-theorem)."
)]
pub struct Cli {
    /// Worker threads [env: QFLAT_THREADS]; output does not depend on this.
    #[arg(long, global = true, value_parser = parse_threads)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the built-in spaces with root data and isotype parameters.
    List(ListArgs),
    /// Tabulate q_n(τ), its error estimate and (log q_n)″(τ).
    Qtable(QtableArgs),
    /// Curvature grid (log q_n)″ with flatness residuals; τ = B²·grid.
    Curvature(CurvatureArgs),
    /// Exact centrality certificates Γ(A+2n)Γ(c)/(Γ(A+n)Γ(c+n)) = 4^n (A/(A+2n))^μ.
    Centrality(CentralityArgs),
    /// Flatness verdict for each space.
    Scan(ScanArgs),
    /// Compare quadrature with the small-τ and large-τ laws.
    VerifyAsymptotics(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Mode {
    #[default]
    PrefactorCorrected,
    Literal,
}

impl From<Mode> for FlatMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::PrefactorCorrected => FlatMode::PrefactorCorrected,
            Mode::Literal => FlatMode::Literal,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format [default: csv for tables, json for centrality and scan].
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Write to this file instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,

    /// Record the generation time (JSON only).
    #[arg(long)]
    pub timestamps: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ListArgs {
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct QtableArgs {
    /// Space selectors: S<m>, CP<n>, HP<n>, OP2, all (comma separated).
    #[arg(long, visible_alias = "spaces", default_value = "S3")]
    pub space: Spaces,

    /// Isotypes: `k`, `a..b` (inclusive) or a comma list.
    #[arg(long, default_value = "0")]
    pub n: Degrees,

    /// τ values (comma separated).
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub tau: Taus,

    #[arg(long, default_value_t = DEFAULT_TOL, value_parser = parse_tol)]
    pub tol: f64,

    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = DEFAULT_N_MAX, value_parser = parse_degree)]
    pub n_max: u32,

    /// Grid in units of Im s; integrated at τ = B²·value.
    #[arg(long, default_value_t = default_grid(), allow_hyphen_values = true)]
    pub tau: Taus,

    #[arg(long, default_value_t = DEFAULT_TOL, value_parser = parse_tol)]
    pub tol: f64,

    #[arg(long, value_enum, default_value_t = Mode::PrefactorCorrected)]
    pub mode: Mode,

    /// Root-length scale B.
    #[arg(long, default_value_t = 1.0, value_parser = parse_scale)]
    pub b: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CurvatureArgs {
    #[arg(long, visible_alias = "spaces", default_value = "S3")]
    pub space: Spaces,

    #[command(flatten)]
    pub grid: GridArgs,

    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CentralityArgs {
    #[arg(long, visible_alias = "spaces", default_value = "all")]
    pub space: Spaces,

    /// Positive isotypes to certify.
    #[arg(long, default_value = "1..5")]
    pub n: Degrees,

    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long, visible_alias = "space", default_value = "all")]
    pub spaces: Spaces,

    #[command(flatten)]
    pub grid: GridArgs,

    /// Exit 3 unless S3 is flat and every other space is not projectively flat.
    #[arg(long)]
    pub expect_theorem: bool,

    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, visible_alias = "space", default_value = "all")]
    pub spaces: Spaces,

    #[arg(long, default_value = "0..3")]
    pub n: Degrees,

    #[arg(long, default_value_t = DEFAULT_TOL, value_parser = parse_tol)]
    pub tol: f64,

    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone)]
pub struct Spaces(pub Vec<RootData>);

impl FromStr for Spaces {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_selectors(s).map(Spaces).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Degrees(pub Vec<u32>);

impl FromStr for Degrees {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim) {
            if let Some((lo, hi)) = item.split_once("..") {
                let lo = parse_degree(lo)?;
                let hi = parse_degree(hi.trim_start_matches('='))?;
                if lo > hi {
                    return Err(format!("empty range {item}"));
                }
                out.extend(lo..=hi);
            } else {
                out.push(parse_degree(item)?);
            }
        }
        Ok(Degrees(out))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Taus(pub Vec<f64>);

impl FromStr for Taus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|item| {
                let tau: f64 = item
                    .trim()
                    .parse()
                    .map_err(|_| format!("invalid tau `{}`", item.trim()))?;
                quadrature::check_tau(tau).map_err(|e| match e {
                    qflat_core::Error::InvalidParameter(_) => format!("tau must be positive, got {tau}"),
                    other => other.to_string(),
                })?;
                Ok(tau)
            })
            .collect::<Result<_, _>>()
            .map(Taus)
    }
}

impl std::fmt::Display for Taus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|t| t.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

fn default_grid() -> Taus {
    Taus(DEFAULT_TAU_GRID.to_vec())
}

fn parse_degree(s: &str) -> Result<u32, String> {
    let n: u32 = s.trim().parse().map_err(|_| format!("invalid isotype `{}`", s.trim()))?;
    if n > MAX_DEGREE {
        return Err(format!("n = {n} is outside the supported range [0, {MAX_DEGREE}]"));
    }
    Ok(n)
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let tol: f64 = s.parse().map_err(|_| format!("invalid tolerance `{s}`"))?;
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(format!("tol = {tol} is outside the supported range [1e-13, 1e-4]"));
    }
    Ok(tol)
}

fn parse_scale(s: &str) -> Result<f64, String> {
    let b: f64 = s.parse().map_err(|_| format!("invalid scale `{s}`"))?;
    if !(b > 0.0 && b.is_finite()) {
        return Err(format!("B must be positive and finite, got {b}"));
    }
    Ok(b)
}

pub(crate) fn parse_threads(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => Err(format!("threads must be a positive integer, got `{s}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("qflat").chain(args.iter().copied()))
    }

    #[test]
    fn scan_all_expands_catalog() {
        let cli = parse(&["scan", "--spaces", "all", "--format", "json"]).unwrap();
        let Command::Scan(a) = cli.command else { panic!() };
        assert_eq!(a.spaces.0.len(), 9);
        assert_eq!(a.out.format, Some(Format::Json));
        assert_eq!(a.grid.tau.0, DEFAULT_TAU_GRID.to_vec());
    }

    #[test]
    fn qtable_cells() {
        let cli = parse(&["qtable", "--space", "S3", "--n", "0..3", "--tau", "0.5,1,2"]).unwrap();
        let Command::Qtable(a) = cli.command else { panic!() };
        assert_eq!(a.space.0.len() * a.n.0.len() * a.tau.0.len(), 12);
    }

    #[test]
    fn rejects_bad_input() {
        let err = parse(&["qtable", "--tau", "-1"]).unwrap_err().to_string();
        assert!(err.contains("tau must be positive"), "{err}");
        let err = parse(&["qtable", "--tau", "401"]).unwrap_err().to_string();
        assert!(err.contains("(0, 400]"), "{err}");
        assert!(parse(&["qtable", "--space", "S9x"]).is_err());
        assert!(parse(&["qtable", "--n", "17"]).is_err());
        assert!(parse(&["qtable", "--tol", "1e-20"]).is_err());
        assert!(parse(&["curvature", "--b", "0"]).is_err());
        assert!(parse(&["scan", "--bogus"]).is_err());
        assert!(parse(&["--threads", "0", "list"]).is_err());
    }

    #[test]
    fn degree_grammar() {
        assert_eq!("2".parse::<Degrees>().unwrap().0, vec![2]);
        assert_eq!("1..=3".parse::<Degrees>().unwrap().0, vec![1, 2, 3]);
        assert_eq!("0,4, 5".parse::<Degrees>().unwrap().0, vec![0, 4, 5]);
        assert!("3..1".parse::<Degrees>().is_err());
    }
}
