//! Flatness decisions: numeric curvature tests on a τ-grid, exact centrality
//! certificates, and the scan over the rank-one catalog.
//!
//! A field is projectively flat when (log q_n)″(τ) does not depend on the
//! isotype n, and flat when additionally (log(τ^{−m/2} q_n))″ vanishes
//! (prefactor-corrected mode) or (log q_n)″ vanishes (literal mode).

use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergeom::gamma_ratio_lhs;
use crate::quadrature::{self, DerivativeOrder, MIN_TOL};
use crate::rational::{format_rational, rational_pow, Rational, Surd};
use crate::spaces::{chi_params, RootData};

/// Curvature spreads at or below this are treated as zero.
pub const PASS_THRESHOLD: f64 = 1e-6;
/// Curvature spreads at or above this are treated as nonzero.
pub const FAIL_THRESHOLD: f64 = 1e-3;
/// Tolerance refinement factor applied once to inconclusive tests.
const REFINE_FACTOR: f64 = 1e-2;

pub const DEFAULT_N_MAX: u32 = 5;
pub const DEFAULT_TAU_GRID: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Flat,
    ProjectivelyFlatOnly,
    NotProjectivelyFlat,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectiveVerdict {
    ConsistentWithProjectivelyFlat,
    NotProjectivelyFlat,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlatVerdict {
    Flat,
    NotFlat,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlatMode {
    /// (log(τ^{−m/2} q))″ ≡ 0, i.e. (log q)″ = −(m/2)/τ².
    #[default]
    PrefactorCorrected,
    /// (log q)″ ≡ 0.
    Literal,
}

fn classify(spread: f64) -> Option<bool> {
    if spread <= PASS_THRESHOLD {
        Some(true)
    } else if spread >= FAIL_THRESHOLD {
        Some(false)
    } else {
        None
    }
}

/// One (n, τ) sample of (log q_n)″.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureCell {
    pub n: u32,
    pub tau: f64,
    pub q: Option<f64>,
    pub q_abs_error: Option<f64>,
    pub dlogq2: Option<f64>,
    pub cancellation_flag: bool,
    pub error: Option<String>,
}

/// (log q_n)″ samples, row-major by n then τ. `taus` are the τ values
/// actually integrated: the requested grid scaled by B².
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureGrid {
    pub n_max: u32,
    pub taus: Vec<f64>,
    pub cells: Vec<CurvatureCell>,
}

impl CurvatureGrid {
    pub fn cell(&self, n: u32, tau_index: usize) -> &CurvatureCell {
        &self.cells[n as usize * self.taus.len() + tau_index]
    }

    pub fn failed_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.dlogq2.is_none()).count()
    }

    /// Rows of (log q_n)″ indexed by n.
    pub fn matrix(&self) -> Vec<Vec<Option<f64>>> {
        self.cells
            .chunks(self.taus.len())
            .map(|row| row.iter().map(|c| c.dlogq2).collect())
            .collect()
    }

    /// max over τ of (max_n − min_n) of (log q_n)″, over valid cells.
    pub fn max_chi_deviation(&self) -> Option<f64> {
        let mut worst: Option<f64> = None;
        for (j, _) in self.taus.iter().enumerate() {
            let column: Vec<f64> = (0..=self.n_max)
                .filter_map(|n| self.cell(n, j).dlogq2)
                .collect();
            if column.len() < 2 {
                continue;
            }
            let hi = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = column.iter().copied().fold(f64::INFINITY, f64::min);
            worst = Some(worst.map_or(hi - lo, |w: f64| w.max(hi - lo)));
        }
        worst
    }

    /// max over valid cells of |(log q_n)″ − target(τ)|, with target
    /// −(m/2)/τ² in prefactor-corrected mode and 0 in literal mode.
    pub fn flat_residual(&self, m: u32, mode: FlatMode) -> Option<f64> {
        self.cells
            .iter()
            .filter_map(|c| c.dlogq2.map(|v| v - flat_target(m, c.tau, mode)))
            .map(f64::abs)
            .reduce(f64::max)
    }
}

pub fn flat_target(m: u32, tau: f64, mode: FlatMode) -> f64 {
    match mode {
        FlatMode::PrefactorCorrected => -(f64::from(m) / 2.0) / (tau * tau),
        FlatMode::Literal => 0.0,
    }
}

fn check_grid(tau_grid: &[f64]) -> Result<()> {
    if tau_grid.is_empty() {
        return Err(Error::InvalidParameter("empty tau grid".into()));
    }
    tau_grid.iter().try_for_each(|&t| quadrature::check_tau(t))
}

/// Evaluates (log q_n)″ at τ = B²·g for every n ≤ `n_max` and grid value g.
/// Cells that fail numerically are marked, not propagated.
pub fn curvature_samples(space: &RootData, n_max: u32, tau_grid: &[f64], tol: f64) -> Result<CurvatureGrid> {
    check_grid(tau_grid)?;
    let scale = space.b * space.b;
    let taus: Vec<f64> = tau_grid.iter().map(|g| g * scale).collect();
    taus.iter().try_for_each(|&t| quadrature::check_tau(t))?;
    let jobs: Vec<(u32, f64)> = (0..=n_max)
        .flat_map(|n| taus.iter().map(move |&t| (n, t)))
        .collect();
    let cells = jobs
        .par_iter()
        .map(|&(n, tau)| match quadrature::dlogq(space, n, tau, DerivativeOrder::Second, tol) {
            Ok(d) => CurvatureCell {
                n,
                tau,
                q: Some(d.q.value),
                q_abs_error: Some(d.q.abs_error),
                dlogq2: Some(d.value),
                cancellation_flag: d.cancellation_flag,
                error: None,
            },
            Err(e) => CurvatureCell {
                n,
                tau,
                q: None,
                q_abs_error: None,
                dlogq2: None,
                cancellation_flag: false,
                error: Some(e.to_string()),
            },
        })
        .collect();
    Ok(CurvatureGrid { n_max, taus, cells })
}

fn refined(tol: f64) -> f64 {
    (tol * REFINE_FACTOR).max(MIN_TOL)
}

fn projective_from(grid: &CurvatureGrid) -> (ProjectiveVerdict, f64) {
    match grid.max_chi_deviation() {
        None => (ProjectiveVerdict::Inconclusive, f64::NAN),
        Some(d) => {
            let v = match classify(d) {
                Some(true) if grid.failed_cells() == 0 => ProjectiveVerdict::ConsistentWithProjectivelyFlat,
                Some(true) => ProjectiveVerdict::Inconclusive,
                Some(false) => ProjectiveVerdict::NotProjectivelyFlat,
                None => ProjectiveVerdict::Inconclusive,
            };
            (v, d)
        }
    }
}

/// Checks whether (log q_n)″ is independent of n on the grid. Returns the
/// verdict and the largest spread across n.
pub fn projective_test(
    space: &RootData,
    n_max: u32,
    tau_grid: &[f64],
    tol: f64,
) -> Result<(ProjectiveVerdict, f64)> {
    if n_max < 1 {
        return Err(Error::InvalidParameter("projective test needs n_max >= 1".into()));
    }
    let grid = curvature_samples(space, n_max, tau_grid, tol)?;
    let first = projective_from(&grid);
    if first.0 != ProjectiveVerdict::Inconclusive || refined(tol) == tol {
        return Ok(first);
    }
    let grid = curvature_samples(space, n_max, tau_grid, refined(tol))?;
    Ok(projective_from(&grid))
}

fn flat_from(grid: &CurvatureGrid, m: u32, mode: FlatMode) -> (FlatVerdict, f64) {
    match grid.flat_residual(m, mode) {
        None => (FlatVerdict::Inconclusive, f64::NAN),
        Some(r) => {
            let v = match classify(r) {
                Some(true) if grid.failed_cells() == 0 => FlatVerdict::Flat,
                Some(true) | None => FlatVerdict::Inconclusive,
                Some(false) => FlatVerdict::NotFlat,
            };
            (v, r)
        }
    }
}

/// Checks whether every (log q_n)″ matches the flat target on the grid.
/// Returns the verdict and the largest residual.
pub fn flat_test(
    space: &RootData,
    n_max: u32,
    tau_grid: &[f64],
    tol: f64,
    mode: FlatMode,
) -> Result<(FlatVerdict, f64)> {
    let grid = curvature_samples(space, n_max, tau_grid, tol)?;
    let first = flat_from(&grid, space.m, mode);
    if first.0 != FlatVerdict::Inconclusive || refined(tol) == tol {
        return Ok(first);
    }
    let grid = curvature_samples(space, n_max, tau_grid, refined(tol))?;
    Ok(flat_from(&grid, space.m, mode))
}

/// One instance of Γ(A+2n)Γ(c)/(Γ(A+n)Γ(c+n)) = 4^n (A/(A+2n))^μ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityEntry {
    pub n: u32,
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub lhs: Rational,
    pub lhs_exact: bool,
    #[serde(serialize_with = "serialize_surd")]
    pub rhs: Surd,
    /// Whether the right-hand side is rational.
    pub rhs_exact: bool,
    pub pass: bool,
}

fn serialize_surd<S: serde::Serializer>(s: &Surd, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&s.to_string())
}

/// 4^n ρ^μ with ρ = A/(A+2n), exact for integer and half-integer μ.
pub fn centrality_rhs(a_param: &Rational, n: u32, mu: &Rational) -> Surd {
    let two = Rational::from_integer(2.into());
    let rho = a_param / (a_param + &two * Rational::from_integer(n.into()));
    let four_n = num_traits::pow(Rational::from_integer(4.into()), n as usize);
    let twice_mu = mu * &two;
    assert!(twice_mu.is_integer(), "mu must be an integer or half-integer");
    let twice: i64 = twice_mu.to_integer().try_into().expect("small exponent");
    if twice % 2 == 0 {
        Surd::rational(four_n * rational_pow(&rho, (twice / 2) as i32))
    } else {
        let floor = twice.div_euclid(2) as i32;
        Surd::with_sqrt(four_n * rational_pow(&rho, floor), &rho)
    }
}

pub fn centrality_entry(space: &RootData, n: u32) -> CentralityEntry {
    let p = chi_params(space, n);
    let lhs = gamma_ratio_lhs(&p.A, n, &p.c);
    let rhs = centrality_rhs(&p.A, n, &p.mu);
    let pass = rhs.is_rational() && rhs.coeff == lhs;
    CentralityEntry {
        n,
        lhs,
        lhs_exact: true,
        rhs_exact: rhs.is_rational(),
        rhs,
        pass,
    }
}

/// Exact centrality identity for each n in `n_set`; irrational right-hand
/// sides fail against the always-rational left-hand side.
pub fn centrality_check(space: &RootData, n_set: &[u32]) -> Result<Vec<CentralityEntry>> {
    if n_set.contains(&0) {
        return Err(Error::InvalidParameter("centrality indices must be positive".into()));
    }
    Ok(n_set.iter().map(|&n| centrality_entry(space, n)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RationalityConclusion {
    /// μ is a half-integer: the identity at n = 2A fails, so the space is not
    /// projectively flat (m even).
    MMustBeOdd,
    /// μ is an integer: no obstruction; decided by the dimension equation.
    PassesToNextStage,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalityArgument {
    pub n_used: u32,
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub lhs: Rational,
    pub lhs_rational: bool,
    #[serde(serialize_with = "serialize_surd")]
    pub rhs: Surd,
    pub rhs_rational: bool,
    pub conclusion: RationalityConclusion,
}

/// Evaluates the identity at n = 2A, where A/(A+2n) = 1/5 and the right side
/// is 4^{2A}·5^{−μ}.
pub fn rationality_argument(space: &RootData) -> RationalityArgument {
    let n_used = 2 * space.a_param();
    let entry = centrality_entry(space, n_used);
    let conclusion = if entry.rhs.is_rational() {
        RationalityConclusion::PassesToNextStage
    } else {
        RationalityConclusion::MMustBeOdd
    };
    RationalityArgument {
        n_used,
        lhs: entry.lhs,
        lhs_rational: true,
        rhs_rational: entry.rhs.is_rational(),
        rhs: entry.rhs,
        conclusion,
    }
}

/// (ν+κ+1)/(μ+κ+1) − 2((ν+κ)/(ν+κ+2))^μ, which vanishes when a central
/// sequence exists for these parameters.
pub fn parameter_constraints(mu: f64, kappa: f64, nu: f64) -> Result<f64> {
    if !(nu > 0.0 && kappa > 0.0 && mu + kappa > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "need nu > 0, kappa > 0, mu + kappa > -1 (got mu = {mu}, kappa = {kappa}, nu = {nu})"
        )));
    }
    let a = nu + kappa;
    Ok((a + 1.0) / (mu + kappa + 1.0) - 2.0 * (a / (a + 2.0)).powf(mu))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionPoint {
    pub m: u32,
    /// g(m) = (1 + 2/(m−1))^{(m−1)/2}, exact for odd m.
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub g: Rational,
    pub g_approx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionSolution {
    pub solutions: Vec<u32>,
    pub points: Vec<DimensionPoint>,
    /// g(m) strictly increases along the scanned odd m, checked exactly.
    pub strictly_increasing: bool,
}

/// All odd m in [3, m_max] with (1 + 2/(m−1))^{(m−1)/2} = 2.
pub fn solve_dimension_equation(m_max: u32) -> Result<DimensionSolution> {
    if m_max < 3 {
        return Err(Error::InvalidParameter(format!("m_max must be at least 3, got {m_max}")));
    }
    let two = Rational::from_integer(2.into());
    let points: Vec<DimensionPoint> = (3..=m_max)
        .step_by(2)
        .map(|m| {
            let k = (m - 1) / 2;
            let base = Rational::one() + Rational::new(1.into(), k.into());
            let g = num_traits::pow(base, k as usize);
            let g_approx = crate::rational::rational_to_f64(&g);
            DimensionPoint { m, g, g_approx }
        })
        .collect();
    let solutions = points.iter().filter(|p| p.g == two).map(|p| p.m).collect();
    let strictly_increasing = points.windows(2).all(|w| w[1].g > w[0].g);
    Ok(DimensionSolution {
        solutions,
        points,
        strictly_increasing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactWitness {
    pub n: u32,
    pub lhs: String,
    pub rhs: String,
}

impl From<&CentralityEntry> for ExactWitness {
    fn from(e: &CentralityEntry) -> Self {
        ExactWitness {
            n: e.n,
            lhs: format_rational(&e.lhs),
            rhs: e.rhs.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanOptions {
    pub n_max: u32,
    pub tol: f64,
    pub mode: FlatMode,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            n_max: DEFAULT_N_MAX,
            tol: quadrature::DEFAULT_TOL,
            mode: FlatMode::PrefactorCorrected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatnessReport {
    pub space: String,
    pub root_data: RootData,
    pub n_max: u32,
    pub tau_grid: Vec<f64>,
    pub mode: FlatMode,
    pub tol: f64,
    /// (log q_n)″ at each grid point; null where quadrature failed.
    pub curvature: Vec<Vec<Option<f64>>>,
    pub max_chi_deviation: Option<f64>,
    pub prefactor_residual: Option<f64>,
    pub centrality: Vec<CentralityEntry>,
    pub verdict: Verdict,
    pub exact_witness: Option<ExactWitness>,
    pub failed_cells: usize,
    pub errors: Vec<String>,
}

fn scan_one(space: &RootData, tau_grid: &[f64], opts: &ScanOptions) -> Result<FlatnessReport> {
    let mut n_set: Vec<u32> = (1..=opts.n_max).collect();
    let two_a = 2 * space.a_param();
    if !n_set.contains(&two_a) {
        n_set.push(two_a);
    }
    let centrality = centrality_check(space, &n_set)?;
    let witness = centrality.iter().find(|e| !e.pass).map(ExactWitness::from);

    let mut tol = opts.tol;
    let mut grid = curvature_samples(space, opts.n_max, tau_grid, tol)?;
    let needs_refinement = |g: &CurvatureGrid| {
        let dev = g.max_chi_deviation().is_none_or(|d| classify(d).is_none());
        let res = g.flat_residual(space.m, opts.mode).is_none_or(|r| classify(r).is_none());
        (opts.n_max >= 1 && dev) || res
    };
    if witness.is_none() && needs_refinement(&grid) && refined(tol) < tol {
        tol = refined(tol);
        grid = curvature_samples(space, opts.n_max, tau_grid, tol)?;
    }

    let deviation = grid.max_chi_deviation();
    let residual = grid.flat_residual(space.m, opts.mode);
    let all_valid = grid.failed_cells() == 0;

    let verdict = if witness.is_some() {
        Verdict::NotProjectivelyFlat
    } else {
        let projective = if opts.n_max == 0 {
            Some(true)
        } else {
            deviation.and_then(classify)
        };
        match projective {
            Some(false) => Verdict::NotProjectivelyFlat,
            None => Verdict::Inconclusive,
            Some(true) if !all_valid => Verdict::Inconclusive,
            Some(true) => match residual.and_then(classify) {
                Some(true) => Verdict::Flat,
                Some(false) => Verdict::ProjectivelyFlatOnly,
                None => Verdict::Inconclusive,
            },
        }
    };

    Ok(FlatnessReport {
        space: space.name(),
        root_data: space.clone(),
        n_max: opts.n_max,
        tau_grid: tau_grid.to_vec(),
        mode: opts.mode,
        tol,
        curvature: grid.matrix(),
        max_chi_deviation: deviation,
        prefactor_residual: residual,
        centrality,
        verdict,
        exact_witness: witness,
        failed_cells: grid.failed_cells(),
        errors: grid.cells.iter().filter_map(|c| c.error.clone()).collect(),
    })
}

/// Flatness report for each space, in input order. A space whose numeric
/// evaluation cannot start (e.g. outside the parameter box) yields an
/// inconclusive report carrying the error instead of aborting the scan.
pub fn theorem_scan(spaces: &[RootData], tau_grid: &[f64], opts: &ScanOptions) -> Result<Vec<FlatnessReport>> {
    if spaces.is_empty() {
        return Err(Error::EmptySpaceList);
    }
    check_grid(tau_grid)?;
    Ok(spaces
        .par_iter()
        .map(|space| {
            scan_one(space, tau_grid, opts).unwrap_or_else(|e| FlatnessReport {
                space: space.name(),
                root_data: space.clone(),
                n_max: opts.n_max,
                tau_grid: tau_grid.to_vec(),
                mode: opts.mode,
                tol: opts.tol,
                curvature: Vec::new(),
                max_chi_deviation: None,
                prefactor_residual: None,
                centrality: Vec::new(),
                verdict: Verdict::Inconclusive,
                exact_witness: None,
                failed_cells: 0,
                errors: vec![e.to_string()],
            })
        })
        .collect())
}

/// True when `reports` show S³ flat and every other space not projectively
/// flat.
pub fn matches_theorem(reports: &[FlatnessReport]) -> bool {
    reports.iter().all(|r| {
        let is_s3 = r.root_data.m == 3 && r.root_data.m_half == 0;
        if is_s3 {
            r.verdict == Verdict::Flat
        } else {
            r.verdict == Verdict::NotProjectivelyFlat
        }
    })
}
