//! Monte Carlo sampling of polydisk counts through the Bernoulli
//! representation `Ξ(Δ_R^{(D)}) = Σ_n Y_n` with independent
//! `Y_n ~ Bernoulli(Π_ℓ p_{n_ℓ}^{(R,m_ℓ)})`.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::sum::NeumaierSum;
use crate::window::{coordinate_spectra, BernoulliSpectrum, DEFAULT_TAIL_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub replicas: u64,
    pub seed: u64,
    /// Cells with success probability (or failure probability) below this
    /// are pooled into one binomial draw with the same mean.
    pub cell_prob_floor: f64,
}

impl McConfig {
    pub fn new(replicas: u64, seed: u64, cell_prob_floor: f64) -> Result<Self> {
        if replicas == 0 {
            return Err(Error::InvalidInput("replicas must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&cell_prob_floor) {
            return Err(Error::InvalidInput(format!(
                "cell_prob_floor must lie in [0, 1), got {cell_prob_floor}"
            )));
        }
        Ok(Self {
            replicas,
            seed,
            cell_prob_floor,
        })
    }
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            replicas: 100_000,
            seed: 0,
            cell_prob_floor: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean_hat: f64,
    pub var_hat: f64,
    pub se_mean: f64,
    pub se_var: f64,
    pub replicas: u64,
}

/// Binomial pool of cells sampled jointly.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Pool {
    cells: u64,
    mass: f64,
}

impl Pool {
    fn add(&mut self, cells: u64, mass: f64) {
        self.cells += cells;
        self.mass += mass;
    }

    fn distribution(&self) -> Option<Binomial> {
        if self.cells == 0 || self.mass <= 0.0 {
            return None;
        }
        Binomial::new(self.cells, (self.mass / self.cells as f64).min(1.0)).ok()
    }
}

/// Sampling plan over the truncated multi-index grid.
///
/// Cells with `p >= floor` and `1 - p >= floor` are drawn one by one; the
/// rest form a low pool (successes) and a high pool (failures).
#[derive(Debug, Clone)]
pub struct CellPlan {
    /// `⌊p 2^64⌋` per active cell.
    thresholds: Vec<u64>,
    active_mean: f64,
    active_var: f64,
    low: Pool,
    high: Pool,
    low_dist: Option<Binomial>,
    high_dist: Option<Binomial>,
}

struct GridWalker<'a> {
    spectra: &'a [BernoulliSpectrum],
    /// `Π_{j>=i} Σ p` and `Π_{j>=i} len` over the coordinate spectra.
    suffix_mass: Vec<f64>,
    suffix_cells: Vec<u64>,
    floor: f64,
    plan_thresholds: Vec<u64>,
    mean: NeumaierSum,
    var: NeumaierSum,
    low: Pool,
    high: Pool,
}

impl GridWalker<'_> {
    fn walk(&mut self, depth: usize, p: f64, log_p: f64) {
        let d = self.spectra.len();
        if depth == d {
            let q = -log_p.exp_m1();
            if p < self.floor {
                self.low.add(1, p);
            } else if q < self.floor {
                self.high.add(1, q);
            } else {
                self.plan_thresholds.push(threshold(p));
                self.mean.add(p);
                self.var.add(p * q);
            }
            return;
        }
        if p < self.floor {
            // every extension stays below the floor
            self.low
                .add(self.suffix_cells[depth], p * self.suffix_mass[depth]);
            return;
        }
        let spectrum = &self.spectra[depth];
        for (pk, qk) in spectrum.probs.iter().zip(&spectrum.complements) {
            if *pk == 0.0 {
                continue;
            }
            let log_pk = if *qk < 0.5 { (-qk).ln_1p() } else { pk.ln() };
            self.walk(depth + 1, p * pk, log_p + log_pk);
        }
    }
}

fn threshold(p: f64) -> u64 {
    if p >= 1.0 {
        u64::MAX
    } else {
        (p * 18_446_744_073_709_551_616.0) as u64
    }
}

impl CellPlan {
    pub fn new(spectra: &[BernoulliSpectrum], floor: f64) -> Result<Self> {
        if spectra.is_empty() {
            return Err(Error::InvalidInput(
                "at least one coordinate spectrum is required".into(),
            ));
        }
        if !(0.0..1.0).contains(&floor) {
            return Err(Error::InvalidInput(format!(
                "cell_prob_floor must lie in [0, 1), got {floor}"
            )));
        }
        let d = spectra.len();
        let mut suffix_mass = vec![1.0; d + 1];
        let mut suffix_cells = vec![1u64; d + 1];
        for i in (0..d).rev() {
            suffix_mass[i] = suffix_mass[i + 1] * spectra[i].sum();
            suffix_cells[i] = suffix_cells[i + 1].saturating_mul(spectra[i].len() as u64);
        }
        let mut walker = GridWalker {
            spectra,
            suffix_mass,
            suffix_cells,
            floor,
            plan_thresholds: Vec::new(),
            mean: NeumaierSum::new(),
            var: NeumaierSum::new(),
            low: Pool {
                cells: 0,
                mass: 0.0,
            },
            high: Pool {
                cells: 0,
                mass: 0.0,
            },
        };
        walker.walk(0, 1.0, 0.0);
        let low = walker.low;
        let high = walker.high;
        Ok(Self {
            thresholds: walker.plan_thresholds,
            active_mean: walker.mean.value(),
            active_var: walker.var.value(),
            low_dist: low.distribution(),
            high_dist: high.distribution(),
            low,
            high,
        })
    }

    /// Number of individually drawn cells.
    pub fn active_cells(&self) -> usize {
        self.thresholds.len()
    }

    /// Number of cells pooled into the two binomial draws.
    pub fn pooled_cells(&self) -> u64 {
        self.low.cells + self.high.cells
    }

    /// Mean of the sampled count.
    pub fn expected_mean(&self) -> f64 {
        self.active_mean + self.low.mass + self.high.cells as f64 - self.high.mass
    }

    /// Variance of the sampled count (pooled cells carry binomial variance).
    pub fn expected_variance(&self) -> f64 {
        let pool_var = |pool: &Pool| {
            if pool.cells == 0 {
                0.0
            } else {
                pool.mass * (1.0 - pool.mass / pool.cells as f64)
            }
        };
        self.active_var + pool_var(&self.low) + pool_var(&self.high)
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> u64 {
        let mut count = 0u64;
        for &t in &self.thresholds {
            if t == u64::MAX || rng.next_u64() < t {
                count += 1;
            }
        }
        if let Some(b) = &self.low_dist {
            count += b.sample(rng);
        }
        count += self.high.cells;
        if let Some(b) = &self.high_dist {
            count -= b.sample(rng);
        }
        count
    }
}

/// One draw of the polydisk count from per-coordinate spectra, without pooling.
pub fn sample_count<R: Rng + ?Sized>(spectra: &[BernoulliSpectrum], rng: &mut R) -> Result<u64> {
    Ok(CellPlan::new(spectra, 0.0)?.sample(rng))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replica `i`, a function of `(seed, i)` only.
pub fn replica_seed(seed: u64, i: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ i.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Draws `cfg.replicas` counts from `plan`; replica `i` uses its own stream.
pub fn sample_replicas(plan: &CellPlan, cfg: &McConfig) -> Vec<u64> {
    (0..cfg.replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(replica_seed(cfg.seed, i));
            plan.sample(&mut rng)
        })
        .collect()
}

/// Sample mean and unbiased variance with standard errors; the variance
/// error uses `Var(s²) ≈ (μ₄ - (n-3)/(n-1) σ⁴)/n`.
pub fn summarize_counts(counts: &[u64]) -> McEstimate {
    let n = counts.len() as f64;
    let mean = counts
        .iter()
        .map(|&c| c as f64)
        .collect::<NeumaierSum>()
        .value()
        / n;
    let mut m2 = NeumaierSum::new();
    let mut m4 = NeumaierSum::new();
    for &c in counts {
        let dev = c as f64 - mean;
        let sq = dev * dev;
        m2.add(sq);
        m4.add(sq * sq);
    }
    let m2 = m2.value();
    let var_hat = if counts.len() > 1 {
        m2 / (n - 1.0)
    } else {
        0.0
    };
    let mu4 = m4.value() / n;
    let sigma2 = m2 / n;
    let se_var = if counts.len() > 3 {
        ((mu4 - (n - 3.0) / (n - 1.0) * sigma2 * sigma2) / n)
            .max(0.0)
            .sqrt()
    } else {
        0.0
    };
    McEstimate {
        mean_hat: mean,
        var_hat,
        se_mean: (var_hat / n).sqrt(),
        se_var,
        replicas: counts.len() as u64,
    }
}

/// Monte Carlo estimate of the polydisk count moments.
pub fn estimate_moments(spec: &KernelSpec, r: f64, cfg: &McConfig) -> Result<McEstimate> {
    let cfg = McConfig::new(cfg.replicas, cfg.seed, cfg.cell_prob_floor)?;
    let spectra = coordinate_spectra(spec, r, DEFAULT_TAIL_TOL)?;
    let plan = CellPlan::new(&spectra, cfg.cell_prob_floor)?;
    Ok(summarize_counts(&sample_replicas(&plan, &cfg)))
}
