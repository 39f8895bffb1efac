//! Shared inputs for the criterion benchmarks in `benches/`.

use hyperu_core::KernelSpec;

/// Radii spanning small, moderate and large windows.
pub const RADII: [f64; 3] = [1.0, 10.0, 50.0];

/// Levels used for spectrum benchmarks: exact arithmetic and quadrature paths.
pub const LEVELS: [u32; 3] = [0, 3, 17];

/// Two-dimensional kernels at mixed levels.
pub fn mixed_specs() -> Vec<KernelSpec> {
    [[0, 0], [0, 1], [2, 3]]
        .into_iter()
        .map(|level| KernelSpec::new(2, level.to_vec()).expect("valid spec"))
        .collect()
}
