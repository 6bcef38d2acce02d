//! Closed-form and Monte Carlo predictions for long-edge cliques.
//!
//! With `θ = (k-1)α - d` and `P = d·C_d·π^{d/2}·M_k / (2Γ(1+d/2)·θ)`:
//!
//! * expected count of k-cliques with an edge `>= r`: `P·n^d·r^{-θ}`,
//! * critical radius for a Poisson(`r0^{-θ}`) limit: `P^{1/θ}·r0·n^{d/θ}`,
//! * Fréchet normaliser of the largest clique distance: `P^{-1/θ}·n^{-d/θ}`.
//!
//! `M_3 = 2π^{d/2}Γ(1-d/α)/Γ(1+d/2)` is exact; for `k >= 4` the
//! `(k-2)`-fold kernel integral is estimated by importance sampling from the
//! normalised kernel density `g(x, 0)/V_g`, `V_g = M_3/2`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::graph::connection_prob;
use crate::point_process::RngStream;
use crate::torus::ModelParams;

/// Volume constant of the side-`n` torus: `vol = C_d·n^d` with `C_d = 1`.
pub const VOLUME_CONSTANT: f64 = 1.0;

/// Samples per Monte Carlo block; fixed so results do not depend on thread count.
const MC_BLOCK: usize = 1 << 14;

/// Below this many samples the standard error is flagged as unreliable.
pub const MIN_STABLE_SAMPLES: usize = 100;

fn check_alpha(dim: usize, alpha: f64) -> Result<()> {
    if dim == 0 || !(alpha > dim as f64) || !alpha.is_finite() {
        return Err(Error::InvalidParams(format!(
            "need alpha > d >= 1, got d={dim}, alpha={alpha}"
        )));
    }
    Ok(())
}

/// Γ(x) for `x > 0`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "gamma_fn needs x > 0, got {x}"
        )));
    }
    Ok(gamma(x))
}

/// Fréchet shape `(k-1)α - d`.
pub fn theta(dim: usize, alpha: f64, k: usize) -> f64 {
    (k as f64 - 1.0) * alpha - dim as f64
}

/// `∫_{R^d} g(x, 0) dx = π^{d/2}Γ(1-d/α)/Γ(1+d/2)`.
pub fn kernel_volume(dim: usize, alpha: f64) -> Result<f64> {
    check_alpha(dim, alpha)?;
    let d = dim as f64;
    Ok(PI.powf(d / 2.0) * gamma(1.0 - d / alpha) / gamma(1.0 + d / 2.0))
}

/// `M_3 = 2π^{d/2}Γ(1-d/α)/Γ(1+d/2)`.
pub fn m3_closed_form(dim: usize, alpha: f64) -> Result<f64> {
    Ok(2.0 * kernel_volume(dim, alpha)?)
}

/// Kernel-clique constant `P` in `E[W] ~ P·n^d·r^{-θ}` (with `C_d = 1`).
pub fn w_prefactor(dim: usize, alpha: f64, k: usize, m_k: f64) -> f64 {
    let d = dim as f64;
    d * VOLUME_CONSTANT * PI.powf(d / 2.0) * m_k
        / (2.0 * gamma(1.0 + d / 2.0) * theta(dim, alpha, k))
}

/// Triangle form of the prefactor, `d·C_d·π^d·Γ(1-d/α) / (Γ(1+d/2)^2·(2α-d))`.
pub fn w3_prefactor_direct(dim: usize, alpha: f64) -> Result<f64> {
    check_alpha(dim, alpha)?;
    let d = dim as f64;
    let g = gamma(1.0 + d / 2.0);
    Ok(d * VOLUME_CONSTANT * PI.powf(d) * gamma(1.0 - d / alpha) / (g * g * (2.0 * alpha - d)))
}

/// `P·n^d·r^{-θ}`.
pub fn expected_w(n: f64, r: f64, dim: usize, alpha: f64, k: usize, m_k: f64) -> f64 {
    w_prefactor(dim, alpha, k, m_k) * n.powi(dim as i32) * r.powf(-theta(dim, alpha, k))
}

/// Expected number of triangles on a planted edge of length `r`: `M_3·r^{-α}`.
pub fn theory_triangles_per_edge(r: f64, dim: usize, alpha: f64) -> Result<f64> {
    Ok(m3_closed_form(dim, alpha)? * r.powf(-alpha))
}

/// `P^{1/θ}·r0·n^{d/θ}`; at this radius `expected_w` equals `r0^{-θ}`.
pub fn critical_radius(n: f64, r0: f64, dim: usize, alpha: f64, k: usize, m_k: f64) -> f64 {
    let t = theta(dim, alpha, k);
    w_prefactor(dim, alpha, k, m_k).powf(1.0 / t) * r0 * n.powf(dim as f64 / t)
}

/// Multiplier `c(n) = P^{-1/θ}·n^{-d/θ}` with `c(n)·e_star → Fréchet(θ)`.
pub fn frechet_normalizer(n: f64, dim: usize, alpha: f64, k: usize, m_k: f64) -> f64 {
    let t = theta(dim, alpha, k);
    (1.0 / w_prefactor(dim, alpha, k, m_k)).powf(1.0 / t) * n.powf(-(dim as f64) / t)
}

/// Threshold `r` at which `expected_w` equals `target`.
pub fn radius_for_expected_w(
    n: f64,
    target: f64,
    dim: usize,
    alpha: f64,
    k: usize,
    m_k: f64,
) -> f64 {
    let t = theta(dim, alpha, k);
    (w_prefactor(dim, alpha, k, m_k) * n.powi(dim as i32) / target).powf(1.0 / t)
}

/// Monte Carlo estimate of `M_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MkEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
    /// Set when `samples < MIN_STABLE_SAMPLES`.
    pub unstable: bool,
}

/// Inverse-CDF sampler for the radial law `ρ^{d-1}(1 - exp(-ρ^{-α}))` on `(0, ∞)`.
///
/// The CDF is tabulated with 8-point Gauss-Legendre on a grid up to
/// `ρ_max`, where `ρ_max^{-α}/2 < 1e-8`; beyond it the density is replaced
/// by its power-law tail `ρ^{d-1-α}`. Inversion refines the tabulated bracket
/// by safeguarded Newton steps to `1e-12` in probability.
#[derive(Debug, Clone)]
pub struct RadialSampler {
    dim: usize,
    alpha: f64,
    grid: Vec<f64>,
    cdf: Vec<f64>,
    rho_max: f64,
    /// Normalising constant `Γ(1-d/α)/d`.
    total: f64,
}

const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

impl RadialSampler {
    pub fn new(dim: usize, alpha: f64) -> Result<Self> {
        check_alpha(dim, alpha)?;
        let d = dim as f64;
        let total = gamma(1.0 - d / alpha) / d;
        let rho_max = (0.5e8f64).powf(1.0 / alpha).max(8.0);
        let mut grid = Vec::new();
        let fine = 4.0;
        let steps = 4000;
        for i in 0..steps {
            grid.push(fine * i as f64 / steps as f64);
        }
        let mut rho = fine;
        while rho < rho_max {
            grid.push(rho);
            rho *= 1.002;
        }
        grid.push(rho_max);
        let mut sampler = RadialSampler {
            dim,
            alpha,
            grid,
            cdf: Vec::new(),
            rho_max,
            total,
        };
        let mut cdf = Vec::with_capacity(sampler.grid.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for w in sampler.grid.windows(2) {
            acc += sampler.integral(w[0], w[1]);
            cdf.push(acc);
        }
        sampler.cdf = cdf;
        Ok(sampler)
    }

    /// Unnormalised radial density.
    #[inline]
    pub fn density(&self, rho: f64) -> f64 {
        rho.powi(self.dim as i32 - 1) * connection_prob(rho, self.alpha)
    }

    fn integral(&self, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        GL_NODES
            .iter()
            .zip(GL_WEIGHTS)
            .map(|(&x, w)| w * self.density(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Normalised CDF `F(ρ)`.
    pub fn cdf(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        if rho >= self.rho_max {
            let t = self.alpha - self.dim as f64;
            return 1.0 - rho.powf(-t) / t / self.total;
        }
        let i = self.grid.partition_point(|&g| g <= rho) - 1;
        (self.cdf[i] + self.integral(self.grid[i], rho)) / self.total
    }

    /// Tail mass beyond the tabulated range, `∫_{ρ_max}^∞ ρ^{d-1-α} dρ / Z`.
    pub fn tail_mass(&self) -> f64 {
        let t = self.alpha - self.dim as f64;
        self.rho_max.powf(-t) / t / self.total
    }

    /// Radius at probability level `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let tail = self.tail_mass();
        if u >= 1.0 - tail {
            // power-law tail: P(ρ > s) ∝ s^{-(α-d)}
            let t = self.alpha - self.dim as f64;
            let v = ((1.0 - u) / tail).max(f64::MIN_POSITIVE);
            return self.rho_max * v.powf(-1.0 / t);
        }
        let target = u * self.total;
        let i = (self.cdf.partition_point(|&c| c <= target)).clamp(1, self.grid.len() - 1) - 1;
        let (mut lo, mut hi) = (self.grid[i], self.grid[i + 1]);
        let base = self.cdf[i];
        let mut x = lo + (hi - lo) * ((target - base) / (self.cdf[i + 1] - base)).clamp(0.0, 1.0);
        for _ in 0..50 {
            let f = base + self.integral(self.grid[i], x) - target;
            if f.abs() < 1e-12 * self.total {
                break;
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let dens = self.density(x);
            let newton = x - f / dens;
            x = if dens > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        x
    }

    /// Draws a point of `R^d` with density `g(x, 0)/V_g`.
    pub fn sample_point(&self, rng: &mut impl Rng, out: &mut [f64]) {
        let rho = self.quantile(rng.random::<f64>());
        if self.dim == 1 {
            out[0] = if rng.random::<bool>() { rho } else { -rho };
            return;
        }
        loop {
            let mut norm2 = 0.0;
            for slot in out.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *slot = z;
                norm2 += z * z;
            }
            if norm2 > 1e-300 {
                let scale = rho / norm2.sqrt();
                out.iter_mut().for_each(|c| *c *= scale);
                return;
            }
        }
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Importance-sampling estimate of `M_k = 2∫…∫ ∏ g(x_i,0) ∏_{u<v} g(x_u,x_v)`.
///
/// The `k-2` points are drawn from `g(x, 0)/V_g`, so
/// `M_k = 2·V_g^{k-2}·E[∏_{u<v} g(x_u, x_v)]`. For `k = 3` the product is
/// empty and the estimate is exact.
pub fn mk_monte_carlo(
    dim: usize,
    alpha: f64,
    k: usize,
    samples: usize,
    stream: RngStream,
) -> Result<MkEstimate> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("M_k needs k >= 3, got {k}")));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "M_k needs at least one sample".into(),
        ));
    }
    let v = kernel_volume(dim, alpha)?;
    let scale = 2.0 * v.powi(k as i32 - 2);
    let unstable = samples < MIN_STABLE_SAMPLES;
    if k == 3 {
        return Ok(MkEstimate {
            estimate: scale,
            std_error: 0.0,
            samples,
            unstable,
        });
    }
    let sampler = RadialSampler::new(dim, alpha)?;
    let m = k - 2;
    let blocks = samples.div_ceil(MC_BLOCK);
    let (sum, sum2) = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = MC_BLOCK.min(samples - b * MC_BLOCK);
            let mut rng = stream.child(b as u64).rng();
            let mut pts = vec![0.0; m * dim];
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                for p in pts.chunks_exact_mut(dim) {
                    sampler.sample_point(&mut rng, p);
                }
                let mut prod = 1.0;
                for a in 0..m {
                    for c in a + 1..m {
                        prod *= connection_prob(
                            euclid(&pts[a * dim..(a + 1) * dim], &pts[c * dim..(c + 1) * dim]),
                            alpha,
                        );
                    }
                }
                s += prod;
                s2 += prod * prod;
            }
            (s, s2)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let nf = samples as f64;
    let mean = sum / nf;
    let var = if samples > 1 {
        ((sum2 - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(MkEstimate {
        estimate: scale * mean,
        std_error: scale * (var / nf).sqrt(),
        samples,
        unstable,
    })
}

/// Plain importance-sampling estimate of `M_3 = 2∫g(x, 0)dx`, independent of
/// [`RadialSampler`].
///
/// Integrates the radial form with proposal `½·dρ^{d-1}` on `[0, 1]` plus
/// `½·βρ^{-β-1}` on `(1, ∞)`, `β = α - d`; the weights are bounded.
pub fn m3_monte_carlo(
    dim: usize,
    alpha: f64,
    samples: usize,
    stream: RngStream,
) -> Result<MkEstimate> {
    ModelParams::new(dim, 1.0, alpha, 3)?;
    if samples < 2 {
        return Err(Error::InvalidArgument(
            "M_3 estimate needs at least two samples".into(),
        ));
    }
    let d = dim as f64;
    let beta = alpha - d;
    let sphere = 2.0 * PI.powf(d / 2.0) / gamma_fn(d / 2.0)?;
    let mut rng = stream.rng();
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..samples {
        let u: f64 = rng.random();
        let w = if rng.random::<bool>() {
            let rho = u.powf(1.0 / d);
            2.0 * connection_prob(rho, alpha) / d
        } else {
            let rho = (1.0 - u).powf(-1.0 / beta);
            2.0 * rho.powf(alpha) * connection_prob(rho, alpha) / beta
        };
        s += w;
        s2 += w * w;
    }
    let nf = samples as f64;
    let mean = s / nf;
    let var = ((s2 - nf * mean * mean) / (nf - 1.0)).max(0.0);
    let scale = 2.0 * sphere;
    Ok(MkEstimate {
        estimate: scale * mean,
        std_error: scale * (var / nf).sqrt(),
        samples,
        unstable: samples < MIN_STABLE_SAMPLES,
    })
}

/// Every constant needed by the experiments for one `(d, α, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    pub dim: usize,
    pub alpha: f64,
    pub k: usize,
    pub c_d: f64,
    pub theta: f64,
    pub m_k: f64,
    pub m_k_std_error: f64,
    pub w_prefactor: f64,
}

impl TheoryConstants {
    /// Exact for `k = 3`; Monte Carlo with `mk_samples` draws otherwise.
    pub fn compute(
        dim: usize,
        alpha: f64,
        k: usize,
        mk_samples: usize,
        stream: RngStream,
    ) -> Result<Self> {
        ModelParams::new(dim, 1.0, alpha, k)?;
        let mk = mk_monte_carlo(dim, alpha, k, mk_samples, stream)?;
        Ok(Self::with_mk(dim, alpha, k, mk.estimate, mk.std_error))
    }

    pub fn with_mk(dim: usize, alpha: f64, k: usize, m_k: f64, m_k_std_error: f64) -> Self {
        TheoryConstants {
            dim,
            alpha,
            k,
            c_d: VOLUME_CONSTANT,
            theta: theta(dim, alpha, k),
            m_k,
            m_k_std_error,
            w_prefactor: w_prefactor(dim, alpha, k, m_k),
        }
    }

    pub fn expected_w(&self, n: f64, r: f64) -> f64 {
        expected_w(n, r, self.dim, self.alpha, self.k, self.m_k)
    }

    pub fn critical_radius(&self, n: f64, r0: f64) -> f64 {
        critical_radius(n, r0, self.dim, self.alpha, self.k, self.m_k)
    }

    pub fn frechet_scale(&self, n: f64) -> f64 {
        frechet_normalizer(n, self.dim, self.alpha, self.k, self.m_k)
    }

    pub fn radius_for_expected_w(&self, n: f64, target: f64) -> f64 {
        radius_for_expected_w(n, target, self.dim, self.alpha, self.k, self.m_k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // reference values computed with mpmath at 30 digits
    const GAMMA_3_4: f64 = 1.225_416_702_465_177_6;
    const M3_D1_A4: f64 = 4.901_666_809_860_711;
    const P_D1_A4_K3: f64 = 0.700_238_115_694_387_3;

    #[test]
    fn gamma_values() {
        assert_relative_eq!(gamma_fn(0.5).unwrap(), PI.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(gamma_fn(1.0).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(gamma_fn(2.0).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(gamma_fn(0.75).unwrap(), GAMMA_3_4, max_relative = 1e-10);
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
    }

    #[test]
    fn m3_values() {
        assert_relative_eq!(
            m3_closed_form(1, 4.0).unwrap(),
            M3_D1_A4,
            max_relative = 1e-10
        );
        // α → ∞: 2·sqrt(π)/Γ(3/2) = 4
        assert_relative_eq!(m3_closed_form(1, 1e9).unwrap(), 4.0, max_relative = 1e-6);
        assert!(m3_closed_form(2, 2.0).is_err());
        assert!(m3_closed_form(1, 0.5).is_err());
    }

    #[test]
    fn prefactor_values() {
        let m3 = m3_closed_form(1, 4.0).unwrap();
        let p = w_prefactor(1, 4.0, 3, m3);
        assert_relative_eq!(p, P_D1_A4_K3, max_relative = 1e-10);
        // πΓ(3/4)/(7Γ(3/2)^2)
        let fig = PI * GAMMA_3_4 / (7.0 * gamma(1.5).powi(2));
        assert_relative_eq!(p, fig, max_relative = 1e-10);
        assert_relative_eq!(
            p,
            w3_prefactor_direct(1, 4.0).unwrap(),
            max_relative = 1e-10
        );
        // doubling θ at fixed M_k halves P: (d, α, k) = (1, 4, 3) → θ = 7, (1, 7.5, 3) → θ = 14
        assert_relative_eq!(w_prefactor(1, 7.5, 3, m3), p / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn derived_radii() {
        let m3 = M3_D1_A4;
        let r10 = radius_for_expected_w(2000.0, 10.0, 1, 4.0, 3, m3);
        assert_relative_eq!(r10, 2.025_866_487_890_468, max_relative = 1e-9);
        assert_relative_eq!(
            expected_w(2000.0, r10, 1, 4.0, 3, m3),
            10.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            expected_w(4000.0, r10, 1, 4.0, 3, m3),
            2.0 * expected_w(2000.0, r10, 1, 4.0, 3, m3),
            max_relative = 1e-12
        );
        let rc = critical_radius(2000.0, 1.0, 1, 4.0, 3, m3);
        assert_relative_eq!(rc, 2.814_932_357_125_338, max_relative = 1e-9);
        let c = frechet_normalizer(2000.0, 1, 4.0, 3, m3);
        assert_relative_eq!(c, 1.0 / rc, max_relative = 1e-12);
        assert_relative_eq!(c, 0.355_248_323_274_531_1, max_relative = 1e-9);
        assert_relative_eq!(theta(1, 4.0, 3), 7.0);
    }

    #[test]
    fn triangles_per_edge() {
        let t5 = theory_triangles_per_edge(5.0, 1, 4.0).unwrap();
        assert_relative_eq!(t5, 0.007_842_666_895_777_136, max_relative = 1e-9);
        let t10 = theory_triangles_per_edge(10.0, 1, 4.0).unwrap();
        assert_relative_eq!(t5 / t10, 16.0, max_relative = 1e-12);
        assert!(theory_triangles_per_edge(1e6, 1, 4.0).unwrap() < 1e-20);
    }

    #[test]
    fn radial_sampler_cdf() {
        for &(d, a) in &[(1usize, 4.0f64), (1, 2.5), (2, 5.0), (3, 4.0)] {
            let s = RadialSampler::new(d, a).unwrap();
            // tabulated + tail reaches 1
            let top = s.cdf[s.cdf.len() - 1] / s.total + s.tail_mass();
            assert!((top - 1.0).abs() < 1e-8, "d={d} a={a} top={top}");
            for &u in &[1e-6, 0.01, 0.3, 0.5, 0.9, 0.999, 0.999_999] {
                let x = s.quantile(u);
                assert!((s.cdf(x) - u).abs() < 1e-9, "d={d} a={a} u={u}");
            }
        }
    }

    #[test]
    fn mk_k3_is_exact_and_bounded() {
        let est = mk_monte_carlo(2, 5.0, 3, 1000, RngStream::new(1, 0)).unwrap();
        assert_eq!(est.std_error, 0.0);
        assert_relative_eq!(
            est.estimate,
            m3_closed_form(2, 5.0).unwrap(),
            max_relative = 1e-14
        );
        assert!(
            mk_monte_carlo(1, 4.0, 3, 10, RngStream::new(1, 0))
                .unwrap()
                .unstable
        );
        let v = kernel_volume(1, 4.0).unwrap();
        let k4 = mk_monte_carlo(1, 4.0, 4, 5000, RngStream::new(2, 0)).unwrap();
        assert!(k4.estimate > 0.0 && k4.estimate <= 2.0 * v * v);
    }

    #[test]
    fn m3_importance_sampler_matches_closed_form() {
        for (d, a) in [(1, 4.0), (2, 5.0), (3, 4.5)] {
            let est = m3_monte_carlo(d, a, 200_000, RngStream::new(5, d as u64)).unwrap();
            let exact = m3_closed_form(d, a).unwrap();
            assert!(
                (est.estimate - exact).abs() < 4.0 * est.std_error,
                "d={d}: {est:?} vs {exact}"
            );
            assert!(est.std_error < 0.01 * exact);
        }
    }

    #[test]
    fn mk_is_reproducible() {
        let a = mk_monte_carlo(1, 4.0, 4, 40_000, RngStream::new(7, 3)).unwrap();
        let b = mk_monte_carlo(1, 4.0, 4, 40_000, RngStream::new(7, 3)).unwrap();
        assert_eq!(a, b);
    }
}
