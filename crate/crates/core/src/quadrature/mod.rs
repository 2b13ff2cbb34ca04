//! Gaussian-weighted radial integrals on the half line.
//!
//! Q_P(τ) = ∫₀^∞ e^{−t²/τ} P(−sh²t) t^μ sh(t)^κ ch(t)^ν dt
//!
//! The integrand is written as `exp(ℓ(t) − shift) · p̂(t)` where ℓ is the log
//! of the envelope e^{−t²/τ} t^μ sh^κ ch^{ν+2n} and p̂ = P(−sh²t)/ch^{2n}t is
//! bounded by ‖P‖₁ on the whole half line. Integrals are accumulated in this
//! scaled form and carried with their log scale, so values far beyond the
//! double range (e^{(κ+ν+2n)²τ/4} at τ = 400) stay representable.

mod adaptive;
mod legendre;

pub use adaptive::{integrate, Outcome};
pub use legendre::GaussLegendre;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergeom::chi_poly;
use crate::spaces::{sphere_volume, RootData};

pub const MAX_DEGREE: u32 = 16;
pub const MAX_TAU: f64 = 400.0;
pub const MAX_DIMENSION: u32 = 16;
pub const MIN_TOL: f64 = 1e-13;
pub const MAX_TOL: f64 = 1e-4;
pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_PANELS: usize = 200_000;
const MAX_INITIAL_PANELS: usize = 4096;
const MAX_TAIL_EXTENSIONS: usize = 256;
/// ln of the largest finite double, rounded down.
const LN_DOUBLE_MAX: f64 = 709.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QPParams {
    pub mu: f64,
    pub kappa: f64,
    pub nu: f64,
    pub tau: f64,
}

impl QPParams {
    pub fn new(mu: f64, kappa: f64, nu: f64, tau: f64) -> Result<Self> {
        let p = QPParams { mu, kappa, nu, tau };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu + self.kappa > -1.0) || !self.nu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "need mu + kappa > -1, got mu = {}, kappa = {}",
                self.mu, self.kappa
            )));
        }
        check_tau(self.tau)
    }

    pub fn for_space(space: &RootData, tau: f64) -> Result<Self> {
        let half = f64::from(space.m - 1) / 2.0;
        QPParams::new(half, half, f64::from(space.m_beta) / 2.0, tau)
    }
}

pub fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    if tau > MAX_TAU {
        return Err(Error::OutOfRange {
            name: "tau",
            value: tau,
            range: "(0, 400]",
        });
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol,
            range: "[1e-13, 1e-4]",
        });
    }
    Ok(())
}

fn check_degree(degree: usize) -> Result<()> {
    if degree > MAX_DEGREE as usize {
        return Err(Error::OutOfRange {
            name: "n",
            value: degree as f64,
            range: "[0, 16]",
        });
    }
    Ok(())
}

fn check_space(space: &RootData) -> Result<()> {
    space.validate()?;
    if space.m > MAX_DIMENSION {
        return Err(Error::OutOfRange {
            name: "m",
            value: f64::from(space.m),
            range: "[2, 16]",
        });
    }
    Ok(())
}

/// Value of a half-line integral. `value = mantissa · e^{ln_scale}`; the
/// plain `value` and `abs_error` fields overflow to infinity when the
/// integral is beyond the double range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error: f64,
    pub nodes: usize,
    pub truncation_t: f64,
    pub mantissa: f64,
    pub error_mantissa: f64,
    pub ln_scale: f64,
}

impl QuadratureResult {
    fn from_scaled(mantissa: f64, error_mantissa: f64, ln_scale: f64, nodes: usize, t: f64) -> Self {
        QuadratureResult {
            value: mantissa * ln_scale.exp(),
            abs_error: error_mantissa * ln_scale.exp(),
            nodes,
            truncation_t: t,
            mantissa,
            error_mantissa,
            ln_scale,
        }
    }

    /// ln |value|.
    pub fn ln_value(&self) -> f64 {
        self.mantissa.abs().ln() + self.ln_scale
    }

    pub fn rel_error(&self) -> f64 {
        (self.error_mantissa / self.mantissa).abs()
    }

    /// `self / other`, computed without forming either value.
    pub fn ratio(&self, other: &QuadratureResult) -> f64 {
        self.mantissa / other.mantissa * (self.ln_scale - other.ln_scale).exp()
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// ln(sh t / t) for t > 0.
fn ln_shc(t: f64) -> f64 {
    let t = t.abs();
    if t < 1e-4 {
        let t2 = t * t;
        (t2 / 6.0 * (1.0 + t2 / 20.0)).ln_1p()
    } else if t < 20.0 {
        (t.sinh() / t).ln()
    } else {
        t - std::f64::consts::LN_2 - t.ln() + (-(-2.0 * t).exp()).ln_1p()
    }
}

/// sech²t without overflow.
fn sech2(t: f64) -> f64 {
    let e = (-2.0 * t.abs()).exp();
    let s = 2.0 * (-t.abs()).exp() / (1.0 + e);
    s * s
}

/// Evaluation context for one polynomial and parameter set.
struct Setup<'a> {
    coeffs: &'a [f64],
    degree: usize,
    params: QPParams,
    norm1: f64,
}

impl<'a> Setup<'a> {
    fn new(coeffs: &'a [f64], params: QPParams) -> Result<Self> {
        params.validate()?;
        let degree = coeffs.len().saturating_sub(1);
        check_degree(degree)?;
        if coeffs.is_empty() || coeffs.iter().all(|c| *c == 0.0) {
            return Err(Error::InvalidParameter("polynomial is identically zero".into()));
        }
        let norm1 = coeffs.iter().map(|c| c.abs()).sum();
        Ok(Setup {
            coeffs,
            degree,
            params,
            norm1,
        })
    }

    /// ln of e^{−t²/τ} t^μ sh(t)^κ ch(t)^{ν+2n}, using the regrouped form
    /// t^{μ+κ} (sh t/t)^κ so the origin is handled for any μ + κ > −1.
    fn ln_envelope(&self, t: f64) -> f64 {
        let (hi, lo) = self.ln_envelope_parts(t);
        hi + lo
    }

    /// [`Self::ln_envelope`] as an unevaluated sum `hi + lo`. The terms that
    /// grow with t (−t²/τ and the linear part of the log-hyperbolics) are
    /// summed error-free, so `(hi − shift) + lo` keeps full relative
    /// accuracy in e^{ln_envelope − shift} even when ln_envelope ~ 10⁵.
    fn ln_envelope_parts(&self, t: f64) -> (f64, f64) {
        let QPParams { mu, kappa, nu, tau } = self.params;
        let power = mu + kappa;
        let origin = if power == 0.0 { 0.0 } else { power * t.ln() };
        let cosh_rate = nu + 2.0 * self.degree as f64;
        // ln ch t = t + (ln(1 + e^{−2t}) − ln 2)
        let mut rest = origin + cosh_rate * ((-2.0 * t).exp().ln_1p() - std::f64::consts::LN_2);
        let mut rate = cosh_rate;
        if t >= 20.0 {
            // ln(sh t/t) = t − ln 2 − ln t + ln(1 − e^{−2t})
            rate += kappa;
            rest += kappa * (-std::f64::consts::LN_2 - t.ln() + (-(-2.0 * t).exp()).ln_1p());
        } else {
            rest += kappa * ln_shc(t);
        }
        // −t²/τ = −(q + q_lo) exactly up to the last division
        let (sq, sq_lo) = two_prod(t, t);
        let q = sq / tau;
        let q_lo = ((-q).mul_add(tau, sq) + sq_lo) / tau;
        let (lin, lin_lo) = two_prod(rate, t);
        let (hi, hi_lo) = two_sum(-q, lin);
        (hi, hi_lo + lin_lo - q_lo + rest)
    }

    /// P(−sh²t) / ch^{2n}t = Σ c_j (−th²t)^j (sech²t)^{n−j}, evaluated as a
    /// homogeneous Horner scheme with compensated accumulation.
    fn normalized_poly(&self, t: f64) -> f64 {
        let th = t.tanh();
        let u = -th * th;
        let v = sech2(t);
        let mut acc = 0.0f64;
        let mut comp = 0.0f64;
        let n = self.degree;
        let mut v_powers = [1.0f64; MAX_DEGREE as usize + 1];
        for k in 1..=n {
            v_powers[k] = v_powers[k - 1] * v;
        }
        for j in (0..=n).rev() {
            let prod = acc * u;
            let prod_err = acc.mul_add(u, -prod);
            let term = self.coeffs[j] * v_powers[n - j];
            let s = prod + term;
            let bp = s - prod;
            let sum_err = (prod - (s - bp)) + (term - bp);
            comp = comp * u + (prod_err + sum_err);
            acc = s;
        }
        acc + comp
    }

    fn scaled(&self, t: f64, shift: f64) -> f64 {
        let p = self.normalized_poly(t);
        if p == 0.0 {
            return 0.0;
        }
        let (hi, lo) = self.ln_envelope_parts(t);
        ((hi - shift) + lo).exp() * p
    }

    /// ln of an upper bound for ∫_T^∞ (t/τ)^{2k} |integrand| dt using
    /// t^μ ≤ e^{μt}, sh^κ ≤ e^{κt}, ch^ν ≤ e^{νt}, |P(−sh²t)| ≤ ‖P‖₁e^{2nt}.
    fn tail_ln_bound(&self, t_cut: f64, moment: u32) -> f64 {
        let QPParams { mu, kappa, nu, tau } = self.params;
        let extra = 2.0 * f64::from(moment);
        let rate = mu.max(0.0) + kappa.max(0.0) + nu.max(0.0) + 2.0 * self.degree as f64 + extra;
        let mut ln_const = self.norm1.ln() - extra * tau.ln();
        if kappa < 0.0 {
            // sh t ≥ e^t/4 for t ≥ 1
            ln_const += -kappa * 4f64.ln();
        }
        // with negative exponents the bounds above only hold for t ≥ 1
        let needs_unit = kappa < 0.0 || mu < 0.0;
        let z = (t_cut - rate * tau / 2.0) / tau.sqrt();
        if z <= 0.0 || (needs_unit && t_cut < 1.0) {
            return f64::INFINITY;
        }
        ln_const + rate * rate * tau / 4.0 + 0.5 * tau.ln() - z * z - (2.0 * z).ln()
    }

    fn initial_cutoff(&self, tol: f64) -> f64 {
        let QPParams { kappa, nu, tau, .. } = self.params;
        let rate = kappa + nu + 2.0 * self.degree as f64;
        let c = (1.0 / tol).ln() + 40.0;
        let root = 0.5 * (rate * tau + (rate * rate * tau * tau + 4.0 * tau * c).sqrt());
        (8.0 * tau.sqrt()).max(root)
    }
}

/// Scaled integrals of several moments of one integrand.
struct Scaled<const K: usize> {
    value: [f64; K],
    error: [f64; K],
    shift: f64,
    evals: usize,
    cutoff: f64,
}

/// Integrates `weight(t) · integrand(t)` for K weights, extending the
/// cutoff until the analytic tail bound of every component is below
/// tol/2 of that component.
fn integrate_scaled<const K: usize>(
    setup: &Setup<'_>,
    tol: f64,
    weights: impl Fn(f64) -> [f64; K],
    tail_ln: impl Fn(&Setup<'_>, f64) -> [f64; K],
) -> Result<Scaled<K>> {
    let tau = setup.params.tau;
    let mut cutoff = setup.initial_cutoff(tol);
    let width = 0.5 * tau.sqrt();
    let count = ((cutoff / width).ceil() as usize).clamp(4, MAX_INITIAL_PANELS);
    let breaks: Vec<f64> = (0..=count).map(|i| cutoff * i as f64 / count as f64).collect();

    let shift = breaks
        .iter()
        .skip(1)
        .flat_map(|&b| [b, b - 0.5 * cutoff / count as f64])
        .map(|t| setup.ln_envelope(t))
        .fold(f64::NEG_INFINITY, f64::max);

    let f = |t: f64| {
        let w = setup.scaled(t, shift);
        let m = weights(t);
        std::array::from_fn(|k| m[k] * w)
    };
    let out = integrate(&f, &breaks, tol / 2.0, MAX_PANELS);
    let mut evals = out.evals;
    if !out.converged {
        return Err(Error::NonConvergence {
            best: out.value[0] * shift.exp(),
            abs_error: out.error[0] * shift.exp(),
            panels: out.panels,
        });
    }
    let mut value = out.value;
    let mut error = out.error;

    for _ in 0..=MAX_TAIL_EXTENSIONS {
        let bounds = tail_ln(setup, cutoff);
        let ok = (0..K).all(|k| {
            value[k] != 0.0 && bounds[k] - shift <= (tol / 2.0).ln() + value[k].abs().ln()
        });
        if ok {
            return Ok(Scaled {
                value,
                error,
                shift,
                evals,
                cutoff,
            });
        }
        let step = (0.25 * cutoff).max(2.0 * tau.sqrt());
        let piece_count = ((step / width).ceil() as usize).clamp(1, MAX_INITIAL_PANELS);
        let piece: Vec<f64> = (0..=piece_count)
            .map(|i| cutoff + step * i as f64 / piece_count as f64)
            .collect();
        let ext = integrate(&f, &piece, tol / 2.0, MAX_PANELS);
        evals += ext.evals;
        for k in 0..K {
            value[k] += ext.value[k];
            error[k] += ext.error[k];
        }
        cutoff += step;
    }
    Err(Error::NonConvergence {
        best: value[0] * shift.exp(),
        abs_error: error[0] * shift.exp(),
        panels: 0,
    })
}

/// Integrand of Q_P at `t`, in plain (unscaled) form.
pub fn integrand(coeffs: &[f64], params: &QPParams, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("t must be nonnegative, got {t}")));
    }
    let setup = Setup::new(coeffs, *params)?;
    let ln_env = setup.ln_envelope(t);
    let p = setup.normalized_poly(t);
    if ln_env + p.abs().max(f64::MIN_POSITIVE).ln() > LN_DOUBLE_MAX {
        return Err(Error::OutOfRange {
            name: "integrand magnitude",
            value: ln_env,
            range: "ln value <= 709",
        });
    }
    Ok(ln_env.exp() * p)
}

/// Q_P(τ) for float coefficients `coeffs` (index = degree).
pub fn q_p(coeffs: &[f64], params: &QPParams, tol: f64) -> Result<QuadratureResult> {
    check_tol(tol)?;
    let setup = Setup::new(coeffs, *params)?;
    let s = integrate_scaled(&setup, tol, |_| [1.0], |st, t| [st.tail_ln_bound(t, 0)])?;
    Ok(QuadratureResult::from_scaled(s.value[0], s.error[0], s.shift, s.evals, s.cutoff))
}

/// q_χ(τ) for the isotype `n` of `space`.
pub fn q_chi(space: &RootData, n: u32, tau: f64, tol: f64) -> Result<QuadratureResult> {
    check_space(space)?;
    check_degree(n as usize)?;
    let params = QPParams::for_space(space, tau)?;
    let coeffs = chi_poly(space, n).to_f64();
    q_p(&coeffs, &params, tol)
}

/// p_χ(s) with the isotype constant set to one:
/// Vol(S^{m−1}) 2^{m/2} / (B^m (Im s)^{m/2}) · q_χ(B² Im s).
pub fn p_chi(space: &RootData, n: u32, s: Complex64, tol: f64) -> Result<f64> {
    if !(s.im > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Im s must be positive, got {}",
            s.im
        )));
    }
    let m = f64::from(space.m);
    let tau = space.b * space.b * s.im;
    let q = q_chi(space, n, tau, tol)?;
    let ln_prefactor = sphere_volume(space.m).ln() + m / 2.0 * std::f64::consts::LN_2
        - m * space.b.ln()
        - m / 2.0 * s.im.ln();
    Ok(q.mantissa * (q.ln_scale + ln_prefactor).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DerivativeOrder {
    First,
    Second,
}

impl TryFrom<u32> for DerivativeOrder {
    type Error = Error;

    fn try_from(order: u32) -> Result<Self> {
        match order {
            1 => Ok(DerivativeOrder::First),
            2 => Ok(DerivativeOrder::Second),
            other => Err(Error::InvalidParameter(format!(
                "derivative order must be 1 or 2, got {other}"
            ))),
        }
    }
}

/// Digits lost to cancellation beyond which a second log-derivative is
/// flagged.
pub const CANCELLATION_DIGITS_LIMIT: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogDerivative {
    pub value: f64,
    /// Decimal digits the textbook form Q″/Q − (Q′/Q)² would lose.
    pub cancellation_digits: f64,
    pub cancellation_flag: bool,
    pub q: QuadratureResult,
}

/// (log Q_P)′(τ) or (log Q_P)″(τ) by differentiating under the integral
/// sign: Q′ = ∫ u w and Q″ = ∫ (u² − 2u/τ) w with u = t²/τ².
///
/// The second derivative is assembled as Var(u) − 2E[u]/τ, where the
/// variance is integrated directly as ∫ (u − E[u])² w / Q.
pub fn dlogq_p(
    coeffs: &[f64],
    params: &QPParams,
    order: DerivativeOrder,
    tol: f64,
) -> Result<LogDerivative> {
    check_tol(tol)?;
    let setup = Setup::new(coeffs, *params)?;
    let tau = params.tau;
    let u = |t: f64| (t / tau) * (t / tau);
    let first = integrate_scaled(
        &setup,
        tol,
        |t| [1.0, u(t)],
        |st, t| [st.tail_ln_bound(t, 0), st.tail_ln_bound(t, 1)],
    )?;
    let q = QuadratureResult::from_scaled(
        first.value[0],
        first.error[0],
        first.shift,
        first.evals,
        first.cutoff,
    );
    let mean = first.value[1] / first.value[0];
    if order == DerivativeOrder::First {
        return Ok(LogDerivative {
            value: mean,
            cancellation_digits: 0.0,
            cancellation_flag: false,
            q,
        });
    }

    let second = integrate_scaled(
        &setup,
        tol,
        |t| {
            let d = u(t) - mean;
            [d * d]
        },
        |st, t| {
            // (u − E u)² ≤ u² + (E u)²
            let a = st.tail_ln_bound(t, 2);
            let b = st.tail_ln_bound(t, 0) + 2.0 * mean.abs().ln();
            [ln_add_exp(a, b)]
        },
    )?;
    let shift_ratio = (second.shift - first.shift).exp();
    let variance = second.value[0] / first.value[0] * shift_ratio;
    let value = variance - 2.0 * mean / tau;

    let second_over_q = variance + mean * mean - 2.0 * mean / tau;
    let largest = second_over_q.abs().max(mean * mean);
    let cancellation_digits = if value == 0.0 {
        f64::INFINITY
    } else {
        (largest / value.abs()).log10().max(0.0)
    };
    Ok(LogDerivative {
        value,
        cancellation_digits,
        cancellation_flag: cancellation_digits > CANCELLATION_DIGITS_LIMIT,
        q,
    })
}

fn ln_add_exp(a: f64, b: f64) -> f64 {
    let hi = a.max(b);
    if hi == f64::INFINITY {
        return hi;
    }
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}

/// (log q_χ)′ or (log q_χ)″ at τ.
pub fn dlogq(
    space: &RootData,
    n: u32,
    tau: f64,
    order: DerivativeOrder,
    tol: f64,
) -> Result<LogDerivative> {
    check_space(space)?;
    check_degree(n as usize)?;
    let params = QPParams::for_space(space, tau)?;
    let coeffs = chi_poly(space, n).to_f64();
    dlogq_p(&coeffs, &params, order, tol)
}
