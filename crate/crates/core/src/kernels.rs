//! Points in `C^D`, kernel specifications, kernel evaluation and
//! correlation determinants for the extended Heisenberg family.
//!
//! The raw kernel is `K(x, y) = e^{x·ȳ} Π_ℓ L_{m_ℓ}(|x_ℓ - y_ℓ|²)` with respect
//! to the complex Gaussian measure `e^{-|x|²} dx / π^D`. Determinants are
//! always formed from the hermitized kernel
//! `e^{-(|x|² + |y|²)/2} K(x, y) / π^D`, which is the gauge-equivalent kernel
//! with respect to Lebesgue measure and never overflows.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::{laguerre, ln_gamma};

/// Largest correlation order accepted by [`correlation_function`].
pub const MAX_CORRELATION_ORDER: usize = 12;

/// Largest real part of `x·ȳ` for which `e^{x·ȳ}` is formed directly.
const MAX_EXPONENT: f64 = 700.0;

/// A point of `C^D` stored as real and imaginary coordinate vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl ComplexPoint {
    pub fn new(re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        if re.is_empty() {
            return Err(Error::InvalidInput(
                "a point needs at least one coordinate".into(),
            ));
        }
        if re.len() != im.len() {
            return Err(Error::DimensionMismatch {
                expected: re.len(),
                found: im.len(),
            });
        }
        if re.iter().chain(&im).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "point coordinates must be finite".into(),
            ));
        }
        Ok(Self { re, im })
    }

    pub fn from_complex(coords: &[Complex64]) -> Result<Self> {
        Self::new(
            coords.iter().map(|z| z.re).collect(),
            coords.iter().map(|z| z.im).collect(),
        )
    }

    /// The origin of `C^D`.
    pub fn origin(dimension: usize) -> Result<Self> {
        Self::new(vec![0.0; dimension], vec![0.0; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.re.len()
    }

    pub fn re(&self) -> &[f64] {
        &self.re
    }

    pub fn im(&self) -> &[f64] {
        &self.im
    }

    pub fn coord(&self, l: usize) -> Complex64 {
        Complex64::new(self.re[l], self.im[l])
    }

    pub fn coords(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(&a, &b)| Complex64::new(a, b))
    }

    /// `|x|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.re.iter().chain(&self.im).map(|v| v * v).sum()
    }
}

/// Dimension `D` and multivariate level `m ∈ N_0^D`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "KernelSpecFields")]
pub struct KernelSpec {
    dimension: usize,
    level: Vec<u32>,
}

#[derive(Deserialize)]
struct KernelSpecFields {
    dimension: usize,
    level: Vec<u32>,
}

impl TryFrom<KernelSpecFields> for KernelSpec {
    type Error = Error;

    fn try_from(fields: KernelSpecFields) -> Result<Self> {
        Self::new(fields.dimension, fields.level)
    }
}

impl KernelSpec {
    pub fn new(dimension: usize, level: Vec<u32>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidSpec("dimension must be at least 1".into()));
        }
        if level.len() != dimension {
            return Err(Error::InvalidSpec(format!(
                "level has {} entries but dimension is {dimension}",
                level.len()
            )));
        }
        Ok(Self { dimension, level })
    }

    /// The Heisenberg kernel `e^{x·ȳ}` on `C^D` (all levels zero).
    pub fn heisenberg(dimension: usize) -> Result<Self> {
        Self::new(dimension, vec![0; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn level(&self) -> &[u32] {
        &self.level
    }

    pub fn is_ground_level(&self) -> bool {
        self.level.iter().all(|&m| m == 0)
    }

    fn check_point(&self, x: &ComplexPoint) -> Result<()> {
        if x.dimension() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: x.dimension(),
            });
        }
        Ok(())
    }

    /// `Π_ℓ L_{m_ℓ}(|x_ℓ - y_ℓ|²)`.
    fn laguerre_factor(&self, x: &ComplexPoint, y: &ComplexPoint) -> Result<f64> {
        let mut prod = 1.0;
        for (l, &m) in self.level.iter().enumerate() {
            let d = (x.coord(l) - y.coord(l)).norm_sqr();
            prod *= laguerre(m, 0.0, d)?;
        }
        Ok(prod)
    }
}

/// Standard Hermitian inner product `x·ȳ = Σ_ℓ x_ℓ conj(y_ℓ)`.
pub fn hermitian_inner(x: &ComplexPoint, y: &ComplexPoint) -> Result<Complex64> {
    if x.dimension() != y.dimension() {
        return Err(Error::DimensionMismatch {
            expected: x.dimension(),
            found: y.dimension(),
        });
    }
    Ok(x.coords().zip(y.coords()).map(|(a, b)| a * b.conj()).sum())
}

/// Raw kernel `e^{x·ȳ} Π_ℓ L_{m_ℓ}(|x_ℓ - y_ℓ|²)`.
pub fn kernel_eval(spec: &KernelSpec, x: &ComplexPoint, y: &ComplexPoint) -> Result<Complex64> {
    spec.check_point(x)?;
    spec.check_point(y)?;
    let z = hermitian_inner(x, y)?;
    if z.re > MAX_EXPONENT {
        return Err(Error::Range(format!(
            "e^(x·ȳ) overflows (Re x·ȳ = {})",
            z.re
        )));
    }
    Ok(z.exp() * spec.laguerre_factor(x, y)?)
}

/// Hermitized kernel `e^{-(|x|²+|y|²)/2} K(x, y) / π^D`.
pub fn hermitized_kernel(
    spec: &KernelSpec,
    x: &ComplexPoint,
    y: &ComplexPoint,
) -> Result<Complex64> {
    spec.check_point(x)?;
    spec.check_point(y)?;
    // x·ȳ - (|x|² + |y|²)/2 = -|x - y|²/2 + i Im(x·ȳ)
    let dist_sq: f64 = x
        .coords()
        .zip(y.coords())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    let damping = (-0.5 * dist_sq).exp();
    if damping == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let phase = hermitian_inner(x, y)?.im;
    let lag = spec.laguerre_factor(x, y)?;
    let scale = damping * lag / PI.powi(spec.dimension as i32);
    Ok(Complex64::from_polar(1.0, phase) * scale)
}

/// Matrix `[K_herm(x_i, x_j)]` for a finite point set.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    entries: DMatrix<Complex64>,
}

impl CorrelationMatrix {
    pub fn new(spec: &KernelSpec, points: &[ComplexPoint]) -> Result<Self> {
        Self::from_kernel(points, |x, y| hermitized_kernel(spec, x, y))
    }

    /// Builds the matrix from an arbitrary kernel function.
    pub fn from_kernel<F>(points: &[ComplexPoint], kernel: F) -> Result<Self>
    where
        F: Fn(&ComplexPoint, &ComplexPoint) -> Result<Complex64>,
    {
        let n = points.len();
        let mut entries = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for i in 0..n {
            for j in 0..n {
                entries[(i, j)] = kernel(&points[i], &points[j])?;
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.size();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Determinant via LU with full pivoting.
    pub fn determinant(&self) -> Complex64 {
        if self.size() == 0 {
            return Complex64::new(1.0, 0.0);
        }
        self.entries.clone().full_piv_lu().determinant()
    }
}

/// Determinant of `[kernel(x_i, x_j)]` for an arbitrary kernel.
pub fn correlation_determinant<F>(points: &[ComplexPoint], kernel: F) -> Result<Complex64>
where
    F: Fn(&ComplexPoint, &ComplexPoint) -> Result<Complex64>,
{
    Ok(CorrelationMatrix::from_kernel(points, kernel)?.determinant())
}

/// n-point correlation function `ρ_n(x_1, ..., x_n)` with respect to
/// Lebesgue measure on `C^D`.
pub fn correlation_function(spec: &KernelSpec, points: &[ComplexPoint]) -> Result<f64> {
    if points.is_empty() || points.len() > MAX_CORRELATION_ORDER {
        return Err(Error::InvalidInput(format!(
            "correlation order must be in 1..={MAX_CORRELATION_ORDER}, got {}",
            points.len()
        )));
    }
    let det = CorrelationMatrix::new(spec, points)?.determinant();
    if det.im.abs() > 1e-8 {
        return Err(Error::Consistency(format!(
            "determinant of a Hermitian matrix has imaginary part {}",
            det.im
        )));
    }
    Ok(det.re)
}

/// Partial sum over `n = 0..=terms` of
/// `Σ_n (1/n!) L_m^{(n-m)}(|x|²) L_m^{(n-m)}(|y|²) (x ȳ)^{n-m}`,
/// which converges to `e^{x ȳ} L_m(|x - y|²) / m!`.
pub fn kernel_series_partial(m: u32, x: Complex64, y: Complex64, terms: u32) -> Result<Complex64> {
    let u = x.norm_sqr();
    let v = y.norm_sqr();
    let mut total = Complex64::new(0.0, 0.0);
    for n in 0..=terms {
        // For n < m the factor (x ȳ)^{n-m} has a negative power. Using
        // L_m^{(n-m)}(u) = (-u)^{m-n} n!/m! L_n^{(m-n)}(u) the product becomes
        // (n!/m!)² (x̄ y)^{m-n} L_n^{(m-n)}(|x|²) L_n^{(m-n)}(|y|²).
        let (deg, alpha, base, log_prefactor) = if n >= m {
            (m, (n - m) as f64, x * y.conj(), -ln_gamma(n as f64 + 1.0)?)
        } else {
            let lnf_n = ln_gamma(n as f64 + 1.0)?;
            let lnf_m = ln_gamma(m as f64 + 1.0)?;
            (n, (m - n) as f64, x.conj() * y, lnf_n - 2.0 * lnf_m)
        };
        let power = n.abs_diff(m);
        let lx = laguerre(deg, alpha, u)?;
        let ly = laguerre(deg, alpha, v)?;
        let lag = lx * ly;
        if lag == 0.0 {
            continue;
        }
        if power > 0 && base.norm() == 0.0 {
            continue;
        }
        let log_base = if power > 0 {
            power as f64 * base.norm().ln()
        } else {
            0.0
        };
        let log_mag = lag.abs().ln() + log_base + log_prefactor;
        let arg = power as f64 * base.arg();
        let sign = lag.signum();
        let term = Complex64::from_polar(log_mag.exp(), arg) * sign;
        if !term.re.is_finite() || !term.im.is_finite() {
            return Err(Error::Range(format!("series term {n} overflows")));
        }
        total += term;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn pt1(re: f64, im: f64) -> ComplexPoint {
        ComplexPoint::new(vec![re], vec![im]).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inner_product_examples() {
        let zero = pt1(0.0, 0.0);
        assert_eq!(hermitian_inner(&zero, &zero).unwrap(), c(0.0, 0.0));
        let x = pt1(1.0, 1.0);
        assert_eq!(hermitian_inner(&x, &x).unwrap(), c(2.0, 0.0));
        assert_eq!(
            hermitian_inner(&pt1(1.0, 0.0), &pt1(0.0, 1.0)).unwrap(),
            c(0.0, -1.0)
        );
        let two = ComplexPoint::origin(2).unwrap();
        assert!(matches!(
            hermitian_inner(&x, &two),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn point_and_spec_validation() {
        assert!(ComplexPoint::new(vec![], vec![]).is_err());
        assert!(ComplexPoint::new(vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(ComplexPoint::new(vec![f64::NAN], vec![0.0]).is_err());
        assert!(KernelSpec::new(0, vec![]).is_err());
        assert!(KernelSpec::new(2, vec![1]).is_err());
    }

    #[test]
    fn kernel_eval_examples() {
        let ginibre = KernelSpec::heisenberg(1).unwrap();
        let one = pt1(1.0, 0.0);
        assert_relative_eq!(
            kernel_eval(&ginibre, &one, &one).unwrap().re,
            std::f64::consts::E,
            max_relative = 1e-15
        );
        let level1 = KernelSpec::new(1, vec![1]).unwrap();
        assert_eq!(
            kernel_eval(&level1, &one, &pt1(0.0, 0.0)).unwrap(),
            c(0.0, 0.0)
        );
        let spec = KernelSpec::new(2, vec![0, 1]).unwrap();
        let x = ComplexPoint::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        let y = ComplexPoint::origin(2).unwrap();
        assert_eq!(kernel_eval(&spec, &x, &y).unwrap(), c(0.0, 0.0));
        let far = pt1(30.0, 0.0);
        assert!(matches!(
            kernel_eval(&ginibre, &far, &far),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn hermitized_kernel_examples() {
        let spec = KernelSpec::new(2, vec![3, 1]).unwrap();
        let x = ComplexPoint::new(vec![0.4, -1.2], vec![2.0, 0.1]).unwrap();
        assert_relative_eq!(
            hermitized_kernel(&spec, &x, &x).unwrap().re,
            1.0 / (PI * PI),
            max_relative = 1e-14
        );
        let ginibre = KernelSpec::heisenberg(1).unwrap();
        let v = hermitized_kernel(&ginibre, &pt1(1.0, 0.0), &pt1(0.0, 0.0)).unwrap();
        assert_relative_eq!(v.re, (-0.5f64).exp() / PI, max_relative = 1e-15);
        assert_relative_eq!(v.re, 0.19307, epsilon = 1e-5);
        // Huge separations underflow to zero rather than erroring.
        let far = hermitized_kernel(&ginibre, &pt1(1e3, 0.0), &pt1(-1e3, 0.0)).unwrap();
        assert_eq!(far, c(0.0, 0.0));
    }

    #[test]
    fn hermitized_matches_gauge_of_raw() {
        let spec = KernelSpec::new(2, vec![2, 0]).unwrap();
        let x = ComplexPoint::new(vec![0.3, -0.8], vec![1.1, 0.5]).unwrap();
        let y = ComplexPoint::new(vec![-0.6, 0.2], vec![0.4, -1.0]).unwrap();
        let raw = kernel_eval(&spec, &x, &y).unwrap();
        let expect = raw * (-(x.norm_sqr() + y.norm_sqr()) / 2.0).exp() / (PI * PI);
        let got = hermitized_kernel(&spec, &x, &y).unwrap();
        assert_relative_eq!(got.re, expect.re, max_relative = 1e-13);
        assert_relative_eq!(got.im, expect.im, max_relative = 1e-13);
    }

    #[test]
    fn correlation_function_examples() {
        let spec = KernelSpec::new(2, vec![1, 2]).unwrap();
        let x = ComplexPoint::new(vec![0.1, 0.2], vec![0.3, -0.4]).unwrap();
        assert_relative_eq!(
            correlation_function(&spec, std::slice::from_ref(&x)).unwrap(),
            PI.powi(-2),
            max_relative = 1e-14
        );
        assert!(correlation_function(&spec, &[x.clone(), x]).unwrap().abs() < 1e-15);

        let ginibre = KernelSpec::heisenberg(1).unwrap();
        let rho2 = correlation_function(&ginibre, &[pt1(0.0, 0.0), pt1(1.0, 0.0)]).unwrap();
        let expect = (1.0 - (-1.0f64).exp()) / (PI * PI);
        assert_relative_eq!(rho2, expect, max_relative = 1e-14);
    }

    #[test]
    fn correlation_order_bounds() {
        let spec = KernelSpec::heisenberg(1).unwrap();
        assert!(correlation_function(&spec, &[]).is_err());
        let many: Vec<_> = (0..13).map(|k| pt1(k as f64 * 0.3, 0.0)).collect();
        assert!(correlation_function(&spec, &many).is_err());
        assert!(correlation_function(&spec, &many[..12]).is_ok());
    }

    #[test]
    fn series_partial_examples() {
        assert_eq!(
            kernel_series_partial(0, c(0.0, 0.0), c(0.0, 0.0), 7).unwrap(),
            c(1.0, 0.0)
        );
        let e = kernel_series_partial(0, c(1.0, 0.0), c(1.0, 0.0), 50).unwrap();
        assert!((e - c(std::f64::consts::E, 0.0)).norm() < 1e-12);

        let x = c(0.7, 0.1);
        let y = c(-0.3, 0.0);
        let spec = KernelSpec::new(1, vec![2]).unwrap();
        let rhs = kernel_eval(
            &spec,
            &ComplexPoint::from_complex(&[x]).unwrap(),
            &ComplexPoint::from_complex(&[y]).unwrap(),
        )
        .unwrap()
            / 2.0;
        let lhs = kernel_series_partial(2, x, y, 80).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn series_at_origin_for_higher_levels() {
        for m in 1..6u32 {
            let v = kernel_series_partial(m, c(0.0, 0.0), c(0.0, 0.0), 20).unwrap();
            let fact: f64 = (1..=m).map(|k| k as f64).product();
            assert_relative_eq!(v.re, 1.0 / fact, max_relative = 1e-14);
        }
    }

    fn arb_point(dim: usize) -> impl Strategy<Value = ComplexPoint> {
        (
            prop::collection::vec(-2.0f64..2.0, dim),
            prop::collection::vec(-2.0f64..2.0, dim),
        )
            .prop_map(|(re, im)| ComplexPoint::new(re, im).unwrap())
    }

    proptest! {
        #[test]
        fn raw_kernel_is_hermitian(x in arb_point(2), y in arb_point(2), m0 in 0u32..4, m1 in 0u32..4) {
            let spec = KernelSpec::new(2, vec![m0, m1]).unwrap();
            let kxy = kernel_eval(&spec, &x, &y).unwrap();
            let kyx = kernel_eval(&spec, &y, &x).unwrap();
            prop_assert!((kxy - kyx.conj()).norm() <= 1e-12 * kxy.norm().max(1.0));
        }

        #[test]
        fn hermitized_modulus_depends_on_differences(x in arb_point(2), y in arb_point(2), t in arb_point(2), m in 0u32..4) {
            let spec = KernelSpec::new(2, vec![m, 1]).unwrap();
            let shift = |p: &ComplexPoint| ComplexPoint::new(
                p.re().iter().zip(t.re()).map(|(a, b)| a + b).collect(),
                p.im().iter().zip(t.im()).map(|(a, b)| a + b).collect(),
            ).unwrap();
            let a = hermitized_kernel(&spec, &x, &y).unwrap().norm();
            let b = hermitized_kernel(&spec, &shift(&x), &shift(&y)).unwrap().norm();
            prop_assert!((a - b).abs() <= 1e-13);
            prop_assert!((a - hermitized_kernel(&spec, &y, &x).unwrap().norm()).abs() <= 1e-15);
        }

        #[test]
        fn correlation_is_nonnegative(points in prop::collection::vec(arb_point(1), 1..7), m in 0u32..4) {
            let spec = KernelSpec::new(1, vec![m]).unwrap();
            let rho = correlation_function(&spec, &points).unwrap();
            prop_assert!(rho >= -1e-10);
            let mat = CorrelationMatrix::new(&spec, &points).unwrap();
            prop_assert!(mat.hermiticity_defect() <= 1e-12);
        }
    }
}
