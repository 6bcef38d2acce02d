//! Goodness-of-fit kit: Fréchet CDF, ECDFs, Kolmogorov-Smirnov distance,
//! Poisson total-variation fit, CLT moment checks and a two-sample
//! chi-square homogeneity test.

use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// `exp(-x^{-θ})` for `x > 0`, zero otherwise.
pub fn frechet_cdf(x: f64, theta: f64) -> f64 {
    assert!(theta > 0.0, "Fréchet shape must be positive");
    if x <= 0.0 {
        0.0
    } else {
        (-x.powf(-theta)).exp()
    }
}

/// Inverse of [`frechet_cdf`] on `(0, 1)`.
pub fn frechet_quantile(p: f64, theta: f64) -> f64 {
    (-p.ln()).powf(-1.0 / theta)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Sorted sample with cumulative probabilities `i/N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcdfTable {
    pub values: Vec<f64>,
    pub probs: Vec<f64>,
}

impl EcdfTable {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("empty sample".into()));
        }
        if let Some(&bad) = samples.iter().find(|x| x.is_nan()) {
            return Err(Error::NonFinite(bad));
        }
        let mut values = samples.to_vec();
        values.sort_by(f64::total_cmp);
        let n = values.len() as f64;
        let probs = (1..=values.len()).map(|i| i as f64 / n).collect();
        Ok(EcdfTable { values, probs })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Right-continuous empirical CDF at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.values.partition_point(|&v| v <= x) as f64 / self.values.len() as f64
    }

    /// Writes `value,empirical_cdf,<label>` rows with the reference CDF alongside.
    pub fn write_csv<W: Write>(&self, label: &str, cdf: impl Fn(f64) -> f64, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["value", "empirical_cdf", label])?;
        for (&v, &p) in self.values.iter().zip(&self.probs) {
            w.write_record(&[v.to_string(), p.to_string(), cdf(v).to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `sup_x |F_N(x) - F(x)|`, evaluated on both sides of every order statistic.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let table = EcdfTable::new(samples)?;
    let n = table.len() as f64;
    let mut sup = 0.0f64;
    let v = &table.values;
    let mut i = 0;
    while i < v.len() {
        // ties: the ECDF jumps over the whole run at once
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[i] {
            j += 1;
        }
        let f = cdf(v[i]);
        sup = sup
            .max((f - i as f64 / n).abs())
            .max(((j + 1) as f64 / n - f).abs());
        i = j + 1;
    }
    Ok(sup)
}

/// Asymptotic one-sample KS critical value `sqrt(-ln(level/2)/2)/sqrt(N)`.
pub fn ks_critical_value(n: usize, level: f64) -> f64 {
    (-(level / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// Empirical count distribution against Poisson(β).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonFitReport {
    pub beta: f64,
    /// `histogram[j]` = number of observations equal to `j`.
    pub histogram: Vec<u64>,
    pub total_variation: f64,
    pub mean: f64,
    pub variance: f64,
    pub samples: usize,
}

fn poisson_pmf(j: u64, beta: f64) -> f64 {
    if beta == 0.0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    (-beta + j as f64 * beta.ln() - ln_gamma(j as f64 + 1.0)).exp()
}

/// Total variation `½·Σ_j |p̂_j - Poisson(β)_j|`, with the Poisson mass past
/// the largest observed count folded into one bucket.
pub fn poisson_fit(counts: &[u64], beta: f64) -> Result<PoissonFitReport> {
    if counts.is_empty() {
        return Err(Error::InvalidArgument("empty count sample".into()));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "Poisson mean must be >= 0, got {beta}"
        )));
    }
    let max = *counts.iter().max().unwrap();
    let mut histogram = vec![0u64; max as usize + 1];
    for &c in counts {
        histogram[c as usize] += 1;
    }
    let n = counts.len() as f64;
    let mut tv = 0.0;
    let mut covered = 0.0;
    for (j, &h) in histogram.iter().enumerate() {
        let p = poisson_pmf(j as u64, beta);
        covered += p;
        tv += (h as f64 / n - p).abs();
    }
    tv += (1.0 - covered).max(0.0);
    let (mean, variance) = mean_variance(&counts.iter().map(|&c| c as f64).collect::<Vec<_>>());
    Ok(PoissonFitReport {
        beta,
        histogram,
        total_variation: (0.5 * tv).clamp(0.0, 1.0),
        mean,
        variance,
        samples: counts.len(),
    })
}

/// Total variation between two probability vectors (missing entries are zero).
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    0.5 * (0..n)
        .map(|i| (p.get(i).copied().unwrap_or(0.0) - q.get(i).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

/// Sample mean and unbiased variance (variance 0 for a single value).
pub fn mean_variance(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, ss / (n - 1.0))
}

/// Shape diagnostics of `(v - μ)/sqrt(μ)` against the standard normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub mean_hat: f64,
    /// Third standardized central moment; `None` when the values are constant.
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
    pub ks_vs_normal: f64,
    pub standardized_mean: f64,
    pub standardized_variance: f64,
    pub degenerate: bool,
}

/// Minimum number of values for [`clt_report`].
pub const CLT_MIN_VALUES: usize = 100;

pub fn clt_report(values: &[f64], mean_hat: f64) -> Result<CltReport> {
    if !(mean_hat > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "mean_hat must be positive, got {mean_hat}"
        )));
    }
    if values.len() < CLT_MIN_VALUES {
        return Err(Error::InvalidArgument(format!(
            "clt_report needs at least {CLT_MIN_VALUES} values, got {}",
            values.len()
        )));
    }
    let sd = mean_hat.sqrt();
    let z: Vec<f64> = values.iter().map(|v| (v - mean_hat) / sd).collect();
    let n = z.len() as f64;
    let zbar = z.iter().sum::<f64>() / n;
    let moment = |p: i32| z.iter().map(|x| (x - zbar).powi(p)).sum::<f64>() / n;
    let m2 = moment(2);
    let degenerate = m2 <= 1e-300;
    let (skewness, excess_kurtosis) = if degenerate {
        (None, None)
    } else {
        (
            Some(moment(3) / m2.powf(1.5)),
            Some(moment(4) / (m2 * m2) - 3.0),
        )
    };
    let (standardized_mean, standardized_variance) = mean_variance(&z);
    Ok(CltReport {
        mean_hat,
        skewness,
        excess_kurtosis,
        ks_vs_normal: ks_distance(&z, normal_cdf)?,
        standardized_mean,
        standardized_variance,
        degenerate,
    })
}

/// Two-sample chi-square homogeneity test on integer-valued observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Merged bins as inclusive value ranges.
    pub bins: Vec<(u64, u64)>,
}

/// Bins adjacent values until each bin holds at least `min_pooled` of the
/// combined observations, then compares the two histograms.
pub fn chi_square_two_sample(a: &[u64], b: &[u64], min_pooled: usize) -> Result<ChiSquareReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument(
            "both samples must be nonempty".into(),
        ));
    }
    let hi = *a.iter().chain(b).max().unwrap() as usize;
    let lo = *a.iter().chain(b).min().unwrap() as usize;
    let mut ha = vec![0u64; hi - lo + 1];
    let mut hb = vec![0u64; hi - lo + 1];
    a.iter().for_each(|&x| ha[x as usize - lo] += 1);
    b.iter().for_each(|&x| hb[x as usize - lo] += 1);

    let mut bins: Vec<(u64, u64, u64, u64)> = Vec::new();
    let mut cur = (lo as u64, 0u64, 0u64);
    for v in 0..ha.len() {
        cur.1 += ha[v];
        cur.2 += hb[v];
        if (cur.1 + cur.2) as usize >= min_pooled {
            bins.push((cur.0, (lo + v) as u64, cur.1, cur.2));
            cur = ((lo + v + 1) as u64, 0, 0);
        }
    }
    if cur.1 + cur.2 > 0 {
        match bins.last_mut() {
            Some(last) => {
                last.1 = hi as u64;
                last.2 += cur.1;
                last.3 += cur.2;
            }
            None => bins.push((cur.0, hi as u64, cur.1, cur.2)),
        }
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let total = na + nb;
    let mut statistic = 0.0;
    for &(_, _, oa, ob) in &bins {
        let col = (oa + ob) as f64;
        let ea = na * col / total;
        let eb = nb * col / total;
        statistic += (oa as f64 - ea).powi(2) / ea + (ob as f64 - eb).powi(2) / eb;
    }
    let dof = bins.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        1.0 - ChiSquared::new(dof as f64)
            .expect("positive dof")
            .cdf(statistic)
    };
    Ok(ChiSquareReport {
        statistic,
        dof,
        p_value,
        bins: bins.iter().map(|&(l, h, _, _)| (l, h)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Poisson, StandardNormal};

    #[test]
    fn frechet_values() {
        assert!((frechet_cdf(1.0, 3.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((frechet_cdf(2.0, 7.0) - 0.992_217_938_260_243_5).abs() < 1e-12);
        assert_eq!(frechet_cdf(0.0, 7.0), 0.0);
        assert_eq!(frechet_cdf(-2.0, 7.0), 0.0);
        let mut last = 0.0;
        for i in 1..500 {
            let f = frechet_cdf(i as f64 * 0.01, 7.0);
            assert!(f >= last);
            last = f;
        }
        assert!(frechet_cdf(1e6, 7.0) > 1.0 - 1e-12);
        assert!((frechet_cdf(frechet_quantile(0.3, 7.0), 7.0) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn ks_inverse_transform_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 10_000;
        let xs: Vec<f64> = (0..n)
            .map(|_| frechet_quantile(rng.random::<f64>(), 7.0))
            .collect();
        let ks = ks_distance(&xs, |x| frechet_cdf(x, 7.0)).unwrap();
        assert!(ks < ks_critical_value(n, 0.01), "ks {ks}");
        assert!((ks_critical_value(n, 0.01) - 0.016_276).abs() < 1e-5);
        // strictly increasing rescaling
        let ys: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let ks2 = ks_distance(&ys, |y| frechet_cdf(y.exp(), 7.0)).unwrap();
        assert!((ks - ks2).abs() < 1e-12);
    }

    #[test]
    fn ks_constant_sample() {
        let c = 0.9;
        let f = |x: f64| frechet_cdf(x, 2.0);
        let ks = ks_distance(&[c; 5], f).unwrap();
        assert!((ks - f(c).max(1.0 - f(c))).abs() < 1e-15);
        assert!(ks_distance(&[], f).is_err());
    }

    #[test]
    fn poisson_fit_examples() {
        let zero = poisson_fit(&[0; 100], 1e-9).unwrap();
        assert!(zero.total_variation < 1e-8);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pois = Poisson::new(1.0).unwrap();
        let draws: Vec<u64> = (0..10_000).map(|_| pois.sample(&mut rng) as u64).collect();
        let fit = poisson_fit(&draws, 1.0).unwrap();
        assert!(fit.total_variation < 0.02, "{}", fit.total_variation);
        assert!((fit.mean - 1.0).abs() < 0.05);
        let off = poisson_fit(&draws, 3.0).unwrap();
        assert!(off.total_variation > 0.4);
        assert!(poisson_fit(&[], 1.0).is_err());
    }

    #[test]
    fn tv_is_symmetric_and_bounded() {
        let p = [0.2, 0.5, 0.3];
        let q = [0.6, 0.1];
        assert_eq!(total_variation(&p, &q), total_variation(&q, &p));
        assert!(total_variation(&[1.0], &[0.0, 1.0]) <= 1.0);
    }

    #[test]
    fn clt_normal_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let n = 10_000;
        // N(μ, μ) so that (v-μ)/sqrt(μ) is standard normal
        let mu: f64 = 4.0;
        let xs: Vec<f64> = (0..n)
            .map(|_| mu + mu.sqrt() * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let rep = clt_report(&xs, mu).unwrap();
        assert!(rep.skewness.unwrap().abs() < 3.0 * (6.0 / n as f64).sqrt());
        assert!(rep.excess_kurtosis.unwrap().abs() < 3.0 * (24.0 / n as f64).sqrt());
        assert!(rep.ks_vs_normal < ks_critical_value(n, 0.01));
    }

    #[test]
    fn clt_poisson_100() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let pois = Poisson::new(100.0).unwrap();
        let xs: Vec<f64> = (0..5000).map(|_| pois.sample(&mut rng)).collect();
        let rep = clt_report(&xs, 100.0).unwrap();
        assert!(rep.ks_vs_normal < 0.05, "{}", rep.ks_vs_normal);
    }

    #[test]
    fn clt_degenerate_and_errors() {
        let rep = clt_report(&[3.0; 200], 3.0).unwrap();
        assert!(rep.degenerate);
        assert_eq!(rep.skewness, None);
        assert!(clt_report(&[1.0; 200], 0.0).is_err());
        assert!(clt_report(&[1.0; 10], 1.0).is_err());
    }

    #[test]
    fn chi_square_detects_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let p5 = Poisson::new(5.0).unwrap();
        let p6 = Poisson::new(6.0).unwrap();
        let a: Vec<u64> = (0..2000).map(|_| p5.sample(&mut rng) as u64).collect();
        let b: Vec<u64> = (0..2000).map(|_| p5.sample(&mut rng) as u64).collect();
        let c: Vec<u64> = (0..2000).map(|_| p6.sample(&mut rng) as u64).collect();
        assert!(chi_square_two_sample(&a, &b, 10).unwrap().p_value > 0.01);
        assert!(chi_square_two_sample(&a, &c, 10).unwrap().p_value < 1e-6);
    }
}
