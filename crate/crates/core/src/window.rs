//! Window statistics: means, number variances and variance/mean ratios for
//! ball and polydisk windows, the Bernoulli spectrum of the restricted
//! kernel, and the limiting constants `C^{(m)}`.
//!
//! Ball windows (ground level) are available through two routes: a closed
//! form in scaled modified Bessel functions and a Bessel-`J` integral.
//! Polydisk windows, and the disk for any level, are computed from the
//! Bernoulli spectrum `p_n^{(R,m)}`, the eigenvalues of the kernel operator
//! restricted to a disk of radius `R`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::quadrature::integrate_panels;
use crate::specfun::{
    bessel_i_scaled, bessel_j, gamma_prefactor, hyp3f2_terminating, laguerre, ln_gamma,
    regularized_lower_gamma, regularized_upper_gamma,
};
use crate::sum::NeumaierSum;

/// Levels up to this value use exact rational coefficients for `p_n^{(R,m)}`.
pub const EXACT_LEVEL_LIMIT: u32 = 16;

/// Hard cap on the spectrum length.
pub const SPECTRUM_CAP: usize = 10_000_000;

/// Default certified tail tolerance for spectra.
pub const DEFAULT_TAIL_TOL: f64 = 1e-9;

/// Tolerance on `p_n` leaving `[0, 1]` before it is treated as a bug.
const PROB_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    Ball,
    Polydisk,
}

impl std::fmt::Display for WindowKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WindowKind::Ball => write!(f, "ball"),
            WindowKind::Polydisk => write!(f, "polydisk"),
        }
    }
}

/// Observation window in `C^D`: the ball `B_R^{(2D)}` or the polydisk `Δ_R^{(D)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub kind: WindowKind,
    pub radius: f64,
    pub dimension: usize,
}

impl Window {
    pub fn new(kind: WindowKind, radius: f64, dimension: usize) -> Result<Self> {
        check_radius(radius)?;
        check_dimension(dimension)?;
        Ok(Self {
            kind,
            radius,
            dimension,
        })
    }

    pub fn ball(radius: f64, dimension: usize) -> Result<Self> {
        Self::new(WindowKind::Ball, radius, dimension)
    }

    pub fn polydisk(radius: f64, dimension: usize) -> Result<Self> {
        Self::new(WindowKind::Polydisk, radius, dimension)
    }
}

/// Computational route behind a [`MomentReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    ClosedForm,
    Integral,
    Spectrum,
}

/// Mean, variance and variance/mean ratio of a window count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mean: f64,
    pub variance: f64,
    pub ratio: f64,
    pub route: Route,
    /// Estimated absolute error of the variance.
    pub error_estimate: f64,
}

/// Truncated list of Bernoulli parameters `p_0, ..., p_N` for one level and
/// radius, with a certified bound on the omitted mass `Σ_{k>N} p_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernoulliSpectrum {
    pub radius: f64,
    pub level: u32,
    pub probs: Vec<f64>,
    /// `1 - p_k`, evaluated directly so it stays accurate when `p_k ≈ 1`.
    pub complements: Vec<f64>,
    pub tail_bound: f64,
}

impl BernoulliSpectrum {
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `Σ p_k`.
    pub fn sum(&self) -> f64 {
        self.probs.iter().copied().collect::<NeumaierSum>().value()
    }

    /// `Σ p_k²`.
    pub fn sum_sq(&self) -> f64 {
        self.probs
            .iter()
            .map(|p| p * p)
            .collect::<NeumaierSum>()
            .value()
    }

    /// `Σ p_k (1 - p_k)`.
    pub fn sum_pq(&self) -> f64 {
        self.probs
            .iter()
            .zip(&self.complements)
            .map(|(p, q)| p * q)
            .collect::<NeumaierSum>()
            .value()
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidInput(format!(
            "radius must be finite and positive, got {r}"
        )));
    }
    Ok(())
}

fn check_dimension(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    Ok(())
}

/// `R^{2D} / D!`.
fn ball_volume_factor(d: usize, r: f64) -> Result<f64> {
    let v = (2.0 * d as f64 * r.ln() - ln_gamma(d as f64 + 1.0)?).exp();
    if !v.is_finite() {
        return Err(Error::Range(format!(
            "R^(2D)/D! overflows for D={d}, R={r}"
        )));
    }
    Ok(v)
}

/// Expected count in `B_R^{(2D)}` for the Heisenberg kernel: `R^{2D}/D!`.
pub fn mean_ball(d: usize, r: f64) -> Result<f64> {
    check_dimension(d)?;
    check_radius(r)?;
    ball_volume_factor(d, r)
}

/// Variance/mean ratio for the ball, `e^{-x} Σ_{n<D} [I_n(x) + I_{n+1}(x)]`, `x = 2R²`.
pub fn ratio_ball_closed(d: usize, r: f64) -> Result<f64> {
    check_dimension(d)?;
    check_radius(r)?;
    let x = 2.0 * r * r;
    let mut acc = NeumaierSum::new();
    let mut lower = bessel_i_scaled(0, x)?;
    for n in 0..d as u32 {
        let upper = bessel_i_scaled(n + 1, x)?;
        acc.add(lower + upper);
        lower = upper;
    }
    Ok(acc.value())
}

/// Number variance in `B_R^{(2D)}` from the scaled-Bessel closed form.
pub fn variance_ball_closed(d: usize, r: f64) -> Result<f64> {
    Ok(mean_ball(d, r)? * ratio_ball_closed(d, r)?)
}

/// Integrand of the `J`-integral variance formula in the original variable:
/// `J_D(κR)² / κ · (1 - e^{-κ²/4})`, with its limit 0 at `κ = 0`.
pub fn ball_variance_integrand(d: usize, r: f64, kappa: f64) -> Result<f64> {
    if kappa == 0.0 {
        return Ok(0.0);
    }
    let j = bessel_j(d as u32, kappa * r)?;
    Ok(j * j / kappa * -(-kappa * kappa / 4.0).exp_m1())
}

/// Value and absolute error of the `J`-integral variance route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralVariance {
    pub value: f64,
    pub abs_error: f64,
}

/// Number variance in `B_R^{(2D)}` from
/// `2R^{2D}/(D-1)! ∫_0^∞ J_D(κR)²/κ (1 - e^{-κ²/4}) dκ`.
///
/// With `t = κR` the integral splits as
/// `∫ J_D(t)²/t dt - ∫ J_D(t)² e^{-t²/(4R²)}/t dt`; the first part is
/// `1/(2D)` and the second is Gaussian-damped, so it is integrated with
/// adaptive Gauss–Kronrod on π-wide panels up to `t ≈ 12.6 R`, beyond which
/// the damping factor is below 1e-17.
pub fn variance_ball_integral_with_error(d: usize, r: f64, tol: f64) -> Result<IntegralVariance> {
    check_dimension(d)?;
    check_radius(r)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let nu = d as u32;
    let inv_four_r2 = 1.0 / (4.0 * r * r);
    let damped = |t: f64| -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let j = bessel_j(nu, t).unwrap_or(f64::NAN);
        j * j * (-t * t * inv_four_r2).exp() / t
    };
    let upper = 2.0 * r * 6.3 + PI;
    let panels = (upper / PI).ceil() as usize;
    let breaks: Vec<f64> = (0..=panels)
        .map(|k| upper * k as f64 / panels as f64)
        .collect();

    let half_inv_d = 0.5 / d as f64;
    // Lower estimate of the bracket 1/(2D) - G = ratio/(2D).
    let ratio_floor =
        0.25 * (d as f64 / (PI.sqrt() * r)).min(1.0) * (1.0 - (-2.0 * r * r).exp()).min(1.0);
    let bracket_floor = ratio_floor * half_inv_d;
    let abs_tol = (0.1 * tol * bracket_floor).max(1e-15);
    let est = integrate_panels(&damped, &breaks, abs_tol, 0.0, 200_000)?;
    if !est.value.is_finite() {
        return Err(Error::Range(format!(
            "J_{d} integrand not finite for R={r}"
        )));
    }
    let bracket = half_inv_d - est.value;
    let scale = 2.0 * ball_volume_factor(d, r)? * d as f64;
    let value = scale * bracket;
    let abs_error = scale * (est.abs_error + 4.0 * f64::EPSILON * half_inv_d);
    if abs_error > tol * value.abs() {
        return Err(Error::Quadrature {
            estimate: value,
            error: abs_error,
            tol: tol * value.abs(),
        });
    }
    Ok(IntegralVariance { value, abs_error })
}

/// Number variance in `B_R^{(2D)}` from the `J`-integral route.
pub fn variance_ball_integral(d: usize, r: f64, tol: f64) -> Result<f64> {
    Ok(variance_ball_integral_with_error(d, r, tol)?.value)
}

/// Moments of the ball count for the Heisenberg kernel by the given route.
pub fn ball_moments(d: usize, r: f64, route: Route, tol: f64) -> Result<MomentReport> {
    let mean = mean_ball(d, r)?;
    match route {
        Route::ClosedForm => {
            let ratio = ratio_ball_closed(d, r)?;
            let variance = mean * ratio;
            Ok(MomentReport {
                mean,
                variance,
                ratio,
                route,
                error_estimate: 1e-12 * variance,
            })
        }
        Route::Integral => {
            let iv = variance_ball_integral_with_error(d, r, tol)?;
            Ok(MomentReport {
                mean,
                variance: iv.value,
                ratio: iv.value / mean,
                route,
                error_estimate: iv.abs_error,
            })
        }
        Route::Spectrum => {
            if d != 1 {
                return Err(Error::Unsupported(format!(
                    "the spectrum route applies to balls only for D = 1 (got D = {d})"
                )));
            }
            polydisk_moments(&KernelSpec::heisenberg(1)?, r, DEFAULT_TAIL_TOL)
        }
    }
}

fn binomial(n: u64, r: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..r as u64 {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Weights `w_j = (m!/n!) c_j (a+j)!` where `u^a L_m^{(a)}(u)² = Σ_j c_j u^{a+j}`,
/// `a = n - m`, so that `p_n = Σ_j w_j P(a+j+1, R²)`. They sum to 1.
#[cfg(test)]
fn expansion_weights_exact(n: u64, m: u32) -> Vec<BigRational> {
    let m_fact: BigInt = (1..=m as u64).map(BigInt::from).product();
    let poch_top: BigInt = (n - m as u64 + 1..=n).map(BigInt::from).product();
    let a = n - m as u64;
    let scaled = scaled_square_coefficients(n, m);
    let mut poch = BigInt::one();
    scaled
        .into_iter()
        .enumerate()
        .map(|(j, c)| {
            if j > 0 {
                poch *= BigInt::from(a + j as u64);
            }
            BigRational::new(c * &poch, &m_fact * &poch_top)
        })
        .collect()
}

/// `m!² c_j`, the integer coefficients of `m!² u^{-a} (u^a L_m^{(a)}(u)²)`.
fn scaled_square_coefficients(n: u64, m: u32) -> Vec<BigInt> {
    // m! L_m^{(a)}(u) = Σ_k (-1)^k C(n, m-k) m!/k! u^k
    let mut ell = Vec::with_capacity(m as usize + 1);
    for k in 0..=m {
        let ratio: BigInt = (k as u64 + 1..=m as u64).map(BigInt::from).product();
        let v = binomial(n, m - k) * ratio;
        ell.push(if k % 2 == 1 { -v } else { v });
    }
    let mut coeffs = vec![BigInt::zero(); 2 * m as usize + 1];
    for (k, lk) in ell.iter().enumerate() {
        for (l, ll) in ell.iter().enumerate() {
            coeffs[k + l] += lk * ll;
        }
    }
    coeffs
}

/// `T(x) = Σ_{i=1}^{2m} W_i x^i / (a+1)_i` with `W_i = Σ_{j>=i} w_j`, so that
/// `p_n = P(a+1, x) - π_a(x) T(x)` where `π_a(x) = x^a e^{-x}/a!`.
///
/// With `S_i = m!² Σ_{j>=i} c_j (a+i+1)_{j-i}` the sum is
/// `Σ_i S_i x^i / (m! (a+1)_m)`, evaluated in integers with `x = u/v`.
fn correction_exact(n: u64, m: u32, u: &BigInt, v: &BigInt) -> f64 {
    let a = n - m as u64;
    let coeffs = scaled_square_coefficients(n, m);
    let top = coeffs.len() - 1;
    let mut s = vec![BigInt::zero(); top + 1];
    let mut acc = BigInt::zero();
    for i in (1..=top).rev() {
        acc = &coeffs[i] + acc * BigInt::from(a + i as u64 + 1);
        s[i] = acc.clone();
    }
    // G = Σ_i S_i u^{i-1} v^{top-i}
    let mut g = s[top].clone();
    let mut v_pow = BigInt::one();
    for si in s[1..top].iter().rev() {
        v_pow *= v;
        g = g * u + si * &v_pow;
    }
    let numer = g * u;
    let m_fact: BigInt = (1..=m as u64).map(BigInt::from).product();
    let poch: BigInt = (a + 1..=n).map(BigInt::from).product();
    let denom = m_fact * poch * v_pow * v;
    BigRational::new(numer, denom).to_f64().unwrap_or(f64::NAN)
}

/// `(p_n, 1 - p_n)` for `n >= m` by quadrature of the positive integrand;
/// used above [`EXACT_LEVEL_LIMIT`].
fn prob_pair_quadrature(n: u64, m: u32, x: f64) -> Result<(f64, f64, f64)> {
    let a = n - m as u64;
    let alpha = a as f64;
    let ln_norm = ln_gamma(m as f64 + 1.0)? - ln_gamma(n as f64 + 1.0)?;
    let integrand = |t: f64| -> f64 {
        if t <= 0.0 {
            return if a == 0 {
                (ln_norm).exp() * laguerre(m, 0.0, 0.0).map(|l| l * l).unwrap_or(f64::NAN)
            } else {
                0.0
            };
        }
        match laguerre(m, alpha, t) {
            Ok(0.0) => 0.0,
            Ok(l) => (ln_norm + alpha * t.ln() - t + 2.0 * l.abs().ln()).exp(),
            Err(_) => f64::NAN,
        }
    };
    let degree = (n + m as u64) as f64;
    let panels = 2 * m as usize + 16;
    let (lo, hi, lower_side) = if x < degree.max(1.0) {
        (0.0, x, true)
    } else {
        (x, x + 40.0 * (degree + 1.0).sqrt() + 80.0, false)
    };
    let breaks: Vec<f64> = (0..=panels)
        .map(|k| lo + (hi - lo) * k as f64 / panels as f64)
        .collect();
    let est = integrate_panels(&integrand, &breaks, 1e-16, 1e-13, 20_000)?;
    if !est.value.is_finite() {
        return Err(Error::Range(format!(
            "p_{n}^(R,{m}) integrand overflows at R² = {x}"
        )));
    }
    let err = est.abs_error + 1e-13 * est.value.abs();
    Ok(if lower_side {
        (est.value, 1.0 - est.value, err)
    } else {
        (1.0 - est.value, est.value, err)
    })
}

/// Precomputed state for evaluating `p_n^{(R,m)}` at a fixed radius.
struct SpectrumEvaluator {
    x: f64,
    x_numer: BigInt,
    x_denom: BigInt,
}

impl SpectrumEvaluator {
    fn new(r: f64) -> Result<Self> {
        check_radius(r)?;
        let x = r * r;
        let x_exact = BigRational::from_float(x).ok_or_else(|| {
            Error::InvalidInput(format!("radius {r} has no exact rational square"))
        })?;
        let (x_numer, x_denom) = x_exact.into_raw();
        Ok(Self {
            x,
            x_numer,
            x_denom,
        })
    }

    /// `(p_n, 1 - p_n, error bound)`.
    fn prob_pair(&self, n: u64, m: u32) -> Result<(f64, f64, f64)> {
        // p_n^{(R,m)} = p_m^{(R,n)}
        let (hi, lo) = if n >= m as u64 {
            (n, m)
        } else {
            (m as u64, n as u32)
        };
        let a = hi - lo as u64;
        let s = a as f64 + 1.0;
        let x = self.x;
        let exact_err = 8.0 * f64::EPSILON;
        let (p, q, err) = if lo == 0 {
            (
                regularized_lower_gamma(s, x)?,
                regularized_upper_gamma(s, x)?,
                exact_err,
            )
        } else if lo > EXACT_LEVEL_LIMIT {
            prob_pair_quadrature(hi, lo, x)?
        } else {
            let t = correction_exact(hi, lo, &self.x_numer, &self.x_denom);
            let corr = gamma_prefactor(a as f64, x)? * t;
            if x < s {
                let p = regularized_lower_gamma(s, x)? - corr;
                (p, 1.0 - p, exact_err)
            } else {
                let q = regularized_upper_gamma(s, x)? + corr;
                (1.0 - q, q, exact_err)
            }
        };
        if !p.is_finite() || !(-PROB_SLACK..=1.0 + PROB_SLACK).contains(&p) {
            return Err(Error::Consistency(format!(
                "p_{n}^(R,{m}) = {p} lies outside [0, 1] (R² = {x})"
            )));
        }
        Ok((p.clamp(0.0, 1.0), q.clamp(0.0, 1.0), err))
    }
}

/// Bernoulli parameter `p_n^{(R,m)} = (m!/n!) ∫_0^{R²} u^{n-m} e^{-u} |L_m^{(n-m)}(u)|² du`.
///
/// The integrand is a polynomial of degree `n + m` times `e^{-u}`, so the
/// integral is a finite combination of regularized incomplete gamma values.
/// Those values are rewritten with `P(s+1,x) = P(s,x) - x^s e^{-x}/Γ(s+1)` as
/// `P(n-m+1, R²)` minus a Poisson weight times a polynomial in `R²` whose
/// coefficients are exact rationals (levels up to [`EXACT_LEVEL_LIMIT`]).
pub fn bernoulli_prob(n: u64, m: u32, r: f64) -> Result<f64> {
    Ok(SpectrumEvaluator::new(r)?.prob_pair(n, m)?.0)
}

/// Default truncation `ceil(R²) + 12 ceil(R) + 50`, at least `m`.
pub fn default_truncation(m: u32, r: f64) -> usize {
    let base = (r * r).ceil() as usize + 12 * r.ceil() as usize + 50;
    base.max(m as usize)
}

/// Builds `p_0, ..., p_N` with `N` large enough that the omitted mass is
/// below `tail_tol`. The bound uses `Σ_k p_k = R²` (the mean count in the
/// disk) and the positivity of every `p_k`.
pub fn build_spectrum(m: u32, r: f64, tail_tol: f64) -> Result<BernoulliSpectrum> {
    if !(tail_tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tail tolerance must be positive, got {tail_tol}"
        )));
    }
    let eval = SpectrumEvaluator::new(r)?;
    let x = eval.x;
    let step = 50.max(2 * r.ceil() as usize);
    let mut target = default_truncation(m, r);
    let mut probs = Vec::with_capacity(target + 1);
    let mut complements = Vec::with_capacity(target + 1);
    let mut acc = NeumaierSum::new();
    let mut term_errors = 0.0;
    loop {
        while probs.len() <= target {
            let (p, q, err) = eval.prob_pair(probs.len() as u64, m)?;
            acc.add(p);
            term_errors += err;
            probs.push(p);
            complements.push(q);
        }
        let remaining = x - acc.value();
        let allowance = term_errors + 8.0 * f64::EPSILON * x;
        let tail_bound = remaining.abs() + allowance;
        if tail_bound < tail_tol {
            return Ok(BernoulliSpectrum {
                radius: r,
                level: m,
                probs,
                complements,
                tail_bound,
            });
        }
        let last = *probs.last().expect("non-empty");
        if target + step > SPECTRUM_CAP || (remaining <= allowance && last == 0.0) {
            return Err(Error::SpectrumCap {
                cap: probs.len(),
                tail_bound,
            });
        }
        target += step;
    }
}

/// Moments of the polydisk count `Ξ(Δ_R^{(D)})` from the Bernoulli spectra.
///
/// With `S_ℓ = Σ_k p_k^{(R,m_ℓ)}` and `Q_ℓ = Σ_k (p_k^{(R,m_ℓ)})²`:
/// mean `Π S_ℓ`, variance `Π S_ℓ - Π Q_ℓ`, ratio `1 - Π (Q_ℓ / S_ℓ)`.
/// The ratio is formed as `-expm1(Σ ln(1 - δ_ℓ))` with
/// `δ_ℓ = Σ p(1-p) / S_ℓ`, and the variance as mean × ratio.
pub fn polydisk_moments(spec: &KernelSpec, r: f64, tail_tol: f64) -> Result<MomentReport> {
    let spectra = coordinate_spectra(spec, r, tail_tol)?;
    Ok(moments_from_spectra(&spectra))
}

/// One spectrum per coordinate of `spec` (shared between equal levels).
pub fn coordinate_spectra(
    spec: &KernelSpec,
    r: f64,
    tail_tol: f64,
) -> Result<Vec<BernoulliSpectrum>> {
    let mut levels: Vec<u32> = spec.level().to_vec();
    levels.sort_unstable();
    levels.dedup();
    let built: Vec<BernoulliSpectrum> = levels
        .par_iter()
        .map(|&m| build_spectrum(m, r, tail_tol))
        .collect::<Result<_>>()?;
    Ok(spec
        .level()
        .iter()
        .map(|m| built[levels.binary_search(m).expect("level present")].clone())
        .collect())
}

/// Product-form moments for independent per-coordinate spectra.
pub fn moments_from_spectra(spectra: &[BernoulliSpectrum]) -> MomentReport {
    let mut mean = 1.0;
    let mut log_keep = 0.0;
    let mut rel_err = 0.0;
    for s in spectra {
        let total = s.sum();
        let delta = s.sum_pq() / total;
        mean *= total;
        log_keep += (-delta).ln_1p();
        rel_err += s.tail_bound / total;
    }
    let ratio = -log_keep.exp_m1();
    let variance = mean * ratio;
    MomentReport {
        mean,
        variance,
        ratio,
        route: Route::Spectrum,
        error_estimate: mean * rel_err + 1e-12 * variance,
    }
}

/// `C^{(m)} = (2Γ(m+3/2)/(π m!)) 3F2(-1/2, -1/2, -m; 1, -1/2-m; 1)`, the
/// limit of `R · Var/E` for the level-`m` process on `C`.
pub fn c_constant(m: u32) -> Result<f64> {
    let mf = m as f64;
    // Γ(m+3/2)/m! = Γ(3/2) Π_{k=1}^m (k + 1/2)/k and Γ(3/2) = √π/2.
    let gamma_ratio = if m <= 100_000 {
        (1..=m).fold(0.5 * PI.sqrt(), |acc, k| acc * (k as f64 + 0.5) / k as f64)
    } else {
        (ln_gamma(mf + 1.5)? - ln_gamma(mf + 1.0)?).exp()
    };
    let f = hyp3f2_terminating(-0.5, -0.5, m, 1.0, -0.5 - mf)?;
    Ok(2.0 * gamma_ratio / PI * f)
}

/// `Σ_ℓ C^{(m_ℓ)}`, the limit of `R · Var/E` for the polydisk.
pub fn polydisk_limit_constant(spec: &KernelSpec) -> Result<f64> {
    spec.level().iter().map(|&m| c_constant(m)).sum()
}

/// Moments of `Ξ(window)` for `spec` by the requested route.
///
/// Supported combinations: balls of any dimension at ground level via the
/// closed form or the integral; the disk (`D = 1`) at any level via the
/// spectrum; polydisks at any level via the spectrum, and at ground level
/// also via the one-dimensional closed form or integral, using
/// `ratio = 1 - (1 - ratio_disk)^D`.
pub fn window_moments(
    spec: &KernelSpec,
    window: &Window,
    route: Route,
    tail_tol: f64,
    integral_tol: f64,
) -> Result<MomentReport> {
    let d = spec.dimension();
    if window.dimension != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: window.dimension,
        });
    }
    let r = window.radius;
    match (window.kind, route) {
        (_, Route::Spectrum) if window.kind == WindowKind::Polydisk || d == 1 => {
            polydisk_moments(spec, r, tail_tol)
        }
        (WindowKind::Ball, Route::ClosedForm | Route::Integral) if spec.is_ground_level() => {
            ball_moments(d, r, route, integral_tol)
        }
        (WindowKind::Polydisk, Route::ClosedForm | Route::Integral) if spec.is_ground_level() => {
            let disk = ball_moments(1, r, route, integral_tol)?;
            let mean = disk.mean.powi(d as i32);
            let ratio = -(d as f64 * (-disk.ratio).ln_1p()).exp_m1();
            let variance = mean * ratio;
            let error_estimate =
                variance * d as f64 * disk.error_estimate / disk.variance.max(f64::MIN_POSITIVE);
            Ok(MomentReport {
                mean,
                variance,
                ratio,
                route,
                error_estimate,
            })
        }
        _ => Err(Error::Unsupported(format!(
            "{route:?} route for a {} window with D = {d}, level {:?}",
            window.kind,
            spec.level()
        ))),
    }
}
