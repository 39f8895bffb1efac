//! Large-`R` expansion of the ball variance/mean ratio, the matching
//! large-argument series of `e^{-x} I_ν(x)`, and the large-level growth of
//! `C^{(m)}`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Highest order ever summed.
pub const MAX_ORDER: u32 = 8;

/// `α_k(D) = Π_{ℓ=-k+1}^{k} (2D + 2ℓ - 1)`, with `α_0 = 1`.
///
/// Pairing `ℓ` with `1 - ℓ` gives `Π_{j=1}^{k} (4D² - (2j-1)²)`, the
/// numerator of the Hankel coefficients of `I_D`.
pub fn alpha_coefficient(k: u32, d: u32) -> f64 {
    let two_d = 2.0 * d as f64;
    (-(k as i64) + 1..=k as i64)
        .map(|l| two_d + 2.0 * l as f64 - 1.0)
        .product()
}

/// Coefficients `c_k` of `Var/E ~ (D/√π) R^{-1} Σ_k c_k R^{-2k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticSeries {
    pub dimension: u32,
    /// `c_k = (-1)^k α_k(D) / ((2k+1) k! 16^k)`; `c_0 = 1`.
    pub coefficients: Vec<f64>,
    /// `D/√π`, multiplied by `R^{-1}` at evaluation.
    pub prefactor: f64,
}

impl AsymptoticSeries {
    /// Coefficients through order `order` (at most `MAX_ORDER + 1`).
    pub fn new(dimension: u32, order: u32) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if order > MAX_ORDER + 1 {
            return Err(Error::InvalidInput(format!(
                "series order {order} exceeds {}",
                MAX_ORDER + 1
            )));
        }
        let mut coefficients = Vec::with_capacity(order as usize + 1);
        let mut fact = 1.0;
        for k in 0..=order {
            if k > 0 {
                fact *= k as f64;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let denom = (2 * k + 1) as f64 * fact * 16f64.powi(k as i32);
            coefficients.push(sign * alpha_coefficient(k, dimension) / denom);
        }
        Ok(Self {
            dimension,
            coefficients,
            prefactor: dimension as f64 / PI.sqrt(),
        })
    }

    /// Term `k` at radius `r`, prefactor included.
    pub fn term(&self, k: usize, r: f64) -> f64 {
        self.prefactor / r * self.coefficients[k] * r.powi(-2 * k as i32)
    }
}

/// Partial sum of an asymptotic series with its error proxy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Order of the last included term.
    pub order: u32,
    /// `|term K+1|`.
    pub first_omitted: f64,
    /// Order at which the smallest-term rule stops (the last term before
    /// the smallest one among orders `0..=MAX_ORDER + 1`).
    pub optimal_order: u32,
}

fn summarize(terms: &[f64], order: u32) -> SeriesValue {
    let value = terms[..=order as usize].iter().sum();
    let first_omitted = terms[order as usize + 1].abs();
    let smallest = terms
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(k, _)| k as u32)
        .unwrap_or(0);
    SeriesValue {
        value,
        order,
        first_omitted,
        optimal_order: smallest.saturating_sub(1),
    }
}

fn check_order(k: u32) -> Result<()> {
    if k > MAX_ORDER {
        return Err(Error::InvalidInput(format!(
            "asymptotic series are summed to order at most {MAX_ORDER}, got {k}"
        )));
    }
    Ok(())
}

/// `(D/√π) R^{-1} Σ_{k=0}^{K} (-1)^k α_k(D)/((2k+1) k! 2^{4k}) R^{-2k}`.
pub fn ratio_series_eval(d: u32, r: f64, k: u32) -> Result<SeriesValue> {
    check_order(k)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidInput(format!(
            "radius must be finite and positive, got {r}"
        )));
    }
    let series = AsymptoticSeries::new(d, MAX_ORDER + 1)?;
    let terms: Vec<f64> = (0..series.coefficients.len())
        .map(|j| series.term(j, r))
        .collect();
    Ok(summarize(&terms, k))
}

/// `(1/√(2πx)) Σ_{k=0}^{K} (-1)^k α_k(ν)/(k! 2^{3k}) x^{-k}`, the
/// large-argument expansion of `e^{-x} I_ν(x)`.
pub fn bessel_asymptotic_check(nu: u32, x: f64, k: u32) -> Result<SeriesValue> {
    check_order(k)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "x must be finite and positive, got {x}"
        )));
    }
    let lead = 1.0 / (2.0 * PI * x).sqrt();
    let mut terms = Vec::with_capacity(MAX_ORDER as usize + 2);
    let mut fact = 1.0;
    for j in 0..=MAX_ORDER + 1 {
        if j > 0 {
            fact *= j as f64;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        terms.push(
            lead * sign * alpha_coefficient(j, nu) / (fact * 8f64.powi(j as i32))
                * x.powi(-(j as i32)),
        );
    }
    Ok(summarize(&terms, k))
}

/// `(8/π²) √m`, the large-`m` growth of `C^{(m)}`.
pub fn c_asymptote(m: u32) -> f64 {
    8.0 / (PI * PI) * (m as f64).sqrt()
}
