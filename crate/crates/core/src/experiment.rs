//! Config-driven, seeded and parallel replication runner.
//!
//! Replication `i` draws its point cloud and its edges from streams derived
//! from `(seed, i)` only, and results are reduced in replication order, so
//! every report is a pure function of the config whatever the worker count.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clique::{
    clique_edge_lengths, per_edge_clique_count, statistics_from_lengths, CliqueStatistics,
};
use crate::error::{Error, Result};
use crate::graph::{build_graph_allpairs, build_graph_tiered, SpatialGraph, DEFAULT_CUTOFF};
use crate::point_process::{sample_poisson_cloud, PointCloud, Purpose, RngStream};
use crate::stats::{
    clt_report, frechet_cdf, ks_critical_value, ks_distance, mean_variance, poisson_fit, CltReport,
    EcdfTable, PoissonFitReport,
};
use crate::theory::TheoryConstants;
use crate::torus::{wrap_point, ModelParams};

/// Environment variable overriding `output_dir`.
pub const OUTPUT_DIR_ENV: &str = "SRGG_OUTPUT_DIR";

/// Default `expected_w` targets used to derive an r-grid.
pub const DEFAULT_W_TARGETS: [f64; 4] = [1.0, 5.0, 10.0, 50.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Frechet,
    Poisson,
    Scaling,
    Localization,
    Constants,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuilderKind {
    Allpairs,
    #[default]
    Tiered,
}

/// Centre used to standardise W in the CLT check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CltCenter {
    /// `expected_w` from the limit constant.
    #[default]
    Theory,
    /// Sample mean over replications.
    Sample,
}

/// Either a fixed ε or the `1/ln(n)` schedule (written `"log"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsilonSpec {
    Fixed(f64),
    Named(String),
}

impl Default for EpsilonSpec {
    fn default() -> Self {
        EpsilonSpec::Named("log".into())
    }
}

impl EpsilonSpec {
    pub fn resolve(&self, n: f64) -> Result<f64> {
        let eps = match self {
            EpsilonSpec::Fixed(e) => *e,
            EpsilonSpec::Named(s) if s == "log" => 1.0 / n.ln(),
            EpsilonSpec::Named(s) => {
                return Err(Error::Config(format!(
                    "unknown epsilon schedule `{s}` (use a number or \"log\")"
                )))
            }
        };
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {eps}"
            )));
        }
        Ok(eps)
    }
}

fn default_replications() -> usize {
    100
}
fn default_cutoff() -> f64 {
    DEFAULT_CUTOFF
}
fn default_mk_samples() -> usize {
    1_000_000
}

/// Flat experiment description, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub d: usize,
    pub n: f64,
    pub alpha: f64,
    pub k: usize,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
    /// Explicit thresholds; overrides `w_targets`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_grid: Option<Vec<f64>>,
    /// Thresholds derived by inverting `expected_w` at these targets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_targets: Option<Vec<f64>>,
    /// Critical-radius parameter for the Poisson experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[serde(default)]
    pub epsilon: EpsilonSpec,
    /// Additional ε values for the localization experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub builder: BuilderKind,
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// 0 uses every available core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default = "default_mk_samples")]
    pub mk_samples: usize,
    #[serde(default)]
    pub clt_center: CltCenter,
}

impl ExperimentConfig {
    /// Minimal config with defaults for everything but the model.
    pub fn new(experiment: ExperimentKind, params: ModelParams) -> Self {
        ExperimentConfig {
            experiment,
            d: params.dim,
            n: params.side,
            alpha: params.alpha,
            k: params.k,
            replications: default_replications(),
            seed: 0,
            r_grid: None,
            w_targets: None,
            r0: None,
            epsilon: EpsilonSpec::default(),
            epsilon_grid: None,
            builder: BuilderKind::default(),
            cutoff: default_cutoff(),
            output_dir: None,
            workers: 0,
            mk_samples: default_mk_samples(),
            clt_center: CltCenter::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.d, self.n, self.alpha, self.k)
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        self.epsilon.resolve(self.n)?;
        let positive = |name: &str, xs: &Option<Vec<f64>>| -> Result<()> {
            if let Some(xs) = xs {
                if xs.is_empty() || xs.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                    return Err(Error::Config(format!(
                        "{name} must be a nonempty list of positive values"
                    )));
                }
            }
            Ok(())
        };
        positive("r_grid", &self.r_grid)?;
        positive("w_targets", &self.w_targets)?;
        positive("epsilon_grid", &self.epsilon_grid)?;
        if let Some(r0) = self.r0 {
            if !(r0 > 0.0 && r0.is_finite()) {
                return Err(Error::Config(format!("r0 must be positive, got {r0}")));
            }
        }
        if self.experiment == ExperimentKind::Poisson && self.r0.is_none() {
            return Err(Error::Config("the poisson experiment needs r0".into()));
        }
        if !(self.cutoff > 0.0) {
            return Err(Error::Config(format!(
                "cutoff must be positive, got {}",
                self.cutoff
            )));
        }
        if self.mk_samples == 0 {
            return Err(Error::Config("mk_samples must be positive".into()));
        }
        Ok(())
    }

    /// `output_dir`, overridden by `SRGG_OUTPUT_DIR` when set.
    pub fn resolved_output_dir(&self) -> Option<PathBuf> {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Some(PathBuf::from(dir)),
            _ => self.output_dir.clone(),
        }
    }

    pub fn theory(&self) -> Result<TheoryConstants> {
        let stream = RngStream::new(self.seed, 0).purpose(Purpose::Integration);
        TheoryConstants::compute(self.d, self.alpha, self.k, self.mk_samples, stream)
    }

    /// Thresholds for scaling/localization: `r_grid`, or `expected_w` inverted at the targets.
    pub fn thresholds(&self, theory: &TheoryConstants) -> Vec<f64> {
        match &self.r_grid {
            Some(grid) => grid.clone(),
            None => self
                .w_targets
                .as_deref()
                .unwrap_or(&DEFAULT_W_TARGETS)
                .iter()
                .map(|&t| theory.radius_for_expected_w(self.n, t))
                .collect(),
        }
    }
}

/// One replication's sampled sizes and statistics at every configured threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationResult {
    pub index: u64,
    pub stream: RngStream,
    pub points: usize,
    pub edges: usize,
    pub stats: Vec<CliqueStatistics>,
    pub duration_secs: f64,
}

/// Samples the cloud and the graph of replication `index`.
pub fn sample_graph(
    params: &ModelParams,
    builder: BuilderKind,
    cutoff: f64,
    root: RngStream,
) -> Result<SpatialGraph> {
    let cloud = sample_poisson_cloud(params, root.purpose(Purpose::Cloud))?;
    Ok(build(cloud, builder, cutoff, root))
}

fn build(cloud: PointCloud, builder: BuilderKind, cutoff: f64, root: RngStream) -> SpatialGraph {
    let edges = root.purpose(Purpose::Edges);
    match builder {
        BuilderKind::Allpairs => build_graph_allpairs(cloud, edges),
        BuilderKind::Tiered => build_graph_tiered(cloud, cutoff, edges),
    }
}

/// Runs `replications` replications, computing statistics at each `(r, ε)`.
pub fn run_replications(
    config: &ExperimentConfig,
    thresholds: &[(f64, f64)],
) -> Result<Vec<ReplicationResult>> {
    let params = config.params()?;
    let work = || {
        (0..config.replications as u64)
            .into_par_iter()
            .map(|index| {
                let start = Instant::now();
                let root = RngStream::replication(config.seed, index);
                let graph = sample_graph(&params, config.builder, config.cutoff, root)?;
                let lengths = clique_edge_lengths(&graph, params.k);
                let stats: Vec<CliqueStatistics> = thresholds
                    .iter()
                    .map(|&(r, eps)| statistics_from_lengths(params.k, r, eps, &lengths))
                    .collect();
                for s in &stats {
                    s.check_invariants()?;
                }
                Ok(ReplicationResult {
                    index,
                    stream: root,
                    points: graph.num_vertices(),
                    edges: graph.num_edges(),
                    stats,
                    duration_secs: start.elapsed().as_secs_f64(),
                })
            })
            .collect::<Result<Vec<_>>>()
    };
    if config.workers == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Experiment(e.to_string()))?
            .install(work)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrechetReport {
    pub theta: f64,
    pub normalizer: f64,
    pub used: usize,
    pub excluded: usize,
    pub exclusion_rate: f64,
    pub ks_distance: f64,
    pub ks_critical_1pct: f64,
    pub ecdf: EcdfTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonReport {
    pub r0: f64,
    pub r: f64,
    pub fit: PoissonFitReport,
    /// Empirical `P(W >= 1)` against `1 - exp(-β)`.
    pub frac_positive: f64,
    pub frac_positive_theory: f64,
    pub frac_positive_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub r: f64,
    pub expected_w: f64,
    pub mean: f64,
    pub variance: f64,
    pub ratio: f64,
    pub var_over_mean_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub points: Vec<ScalingPoint>,
    pub clt_r: f64,
    pub clt_center: CltCenter,
    pub clt: Option<CltReport>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationPoint {
    pub r: f64,
    pub epsilon: f64,
    pub expected_w: f64,
    pub sum_w: u64,
    pub sum_w_localized: u64,
    pub sum_w_localized_shared: u64,
    pub sum_k: u64,
    pub sum_k_compact: u64,
    /// `None` when no replication had a long-edge clique.
    pub localized_ratio: Option<f64>,
    pub localized_shared_ratio: Option<f64>,
    pub compact_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub points: Vec<LocalizationPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub n: f64,
    pub frechet_scale: f64,
    pub critical_radius_r0_1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Outcome {
    Frechet(FrechetReport),
    Poisson(PoissonReport),
    Scaling(ScalingReport),
    Localization(LocalizationReport),
    Constants(ConstantsReport),
}

/// Deterministic report: config echo, constants and aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub theory: TheoryConstants,
    pub outcome: Outcome,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub report: Report,
    pub replications: Vec<ReplicationResult>,
}

fn epsilon(config: &ExperimentConfig) -> Result<f64> {
    config.epsilon.resolve(config.n)
}

pub fn run_frechet(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let theory = config.theory()?;
    let eps = epsilon(config)?;
    // the threshold does not affect e_star; use the critical radius
    let r = theory.critical_radius(config.n, 1.0);
    let reps = run_replications(config, &[(r, eps)])?;
    let scale = theory.frechet_scale(config.n);
    let values: Vec<f64> = reps
        .iter()
        .filter_map(|rep| rep.stats[0].e_star)
        .map(|e| e * scale)
        .collect();
    let excluded = reps.len() - values.len();
    if values.is_empty() {
        return Err(Error::Experiment(format!(
            "all {} replications are free of {}-cliques",
            reps.len(),
            config.k
        )));
    }
    let theta = theory.theta;
    let ks = ks_distance(&values, |x| frechet_cdf(x, theta))?;
    let outcome = Outcome::Frechet(FrechetReport {
        theta,
        normalizer: scale,
        used: values.len(),
        excluded,
        exclusion_rate: excluded as f64 / reps.len() as f64,
        ks_distance: ks,
        ks_critical_1pct: ks_critical_value(values.len(), 0.01),
        ecdf: EcdfTable::new(&values)?,
    });
    Ok(ExperimentOutput {
        report: Report {
            config: config.clone(),
            theory,
            outcome,
        },
        replications: reps,
    })
}

pub fn run_poisson(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let theory = config.theory()?;
    let r0 = config
        .r0
        .ok_or_else(|| Error::Config("the poisson experiment needs r0".into()))?;
    let r = theory.critical_radius(config.n, r0);
    let reps = run_replications(config, &[(r, epsilon(config)?)])?;
    let beta = r0.powf(-theory.theta);
    let counts: Vec<u64> = reps.iter().map(|rep| rep.stats[0].w).collect();
    let fit = poisson_fit(&counts, beta)?;
    let n = counts.len() as f64;
    let q = 1.0 - (-beta).exp();
    let outcome = Outcome::Poisson(PoissonReport {
        r0,
        r,
        frac_positive: counts.iter().filter(|&&c| c > 0).count() as f64 / n,
        frac_positive_theory: q,
        frac_positive_sigma: (q * (1.0 - q) / n).sqrt(),
        fit,
    });
    Ok(ExperimentOutput {
        report: Report {
            config: config.clone(),
            theory,
            outcome,
        },
        replications: reps,
    })
}

pub fn run_scaling(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let theory = config.theory()?;
    let eps = epsilon(config)?;
    let grid = config.thresholds(&theory);
    let pairs: Vec<(f64, f64)> = grid.iter().map(|&r| (r, eps)).collect();
    let reps = run_replications(config, &pairs)?;
    let mut warnings = Vec::new();
    let mut points = Vec::new();
    for (g, &r) in grid.iter().enumerate() {
        let values: Vec<f64> = reps.iter().map(|rep| rep.stats[g].w as f64).collect();
        let (mean, variance) = mean_variance(&values);
        let expected = theory.expected_w(config.n, r);
        if expected < 1.0 {
            warnings.push(format!(
                "r = {r}: expected_w = {expected:.3} < 1, statistics dominated by zeros"
            ));
        }
        if r <= 1.0 {
            warnings.push(format!("r = {r} is not a long-edge threshold (r <= 1)"));
        }
        points.push(ScalingPoint {
            r,
            expected_w: expected,
            mean,
            variance,
            ratio: mean / expected,
            var_over_mean_sq: variance / (mean * mean),
        });
    }
    let top = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.expected_w.total_cmp(&b.1.expected_w))
        .map(|(i, _)| i)
        .expect("nonempty grid");
    let values: Vec<f64> = reps.iter().map(|rep| rep.stats[top].w as f64).collect();
    let center = match config.clt_center {
        CltCenter::Theory => points[top].expected_w,
        CltCenter::Sample => points[top].mean,
    };
    let clt = match clt_report(&values, center) {
        Ok(rep) => Some(rep),
        Err(e) => {
            warnings.push(format!("no CLT report: {e}"));
            None
        }
    };
    let outcome = Outcome::Scaling(ScalingReport {
        clt_r: points[top].r,
        points,
        clt_center: config.clt_center,
        clt,
        warnings,
    });
    Ok(ExperimentOutput {
        report: Report {
            config: config.clone(),
            theory,
            outcome,
        },
        replications: reps,
    })
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn run_localization(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let theory = config.theory()?;
    let grid = config.thresholds(&theory);
    let mut eps_values = vec![epsilon(config)?];
    if let Some(extra) = &config.epsilon_grid {
        eps_values.extend(extra.iter().copied());
    }
    let pairs: Vec<(f64, f64)> = grid
        .iter()
        .flat_map(|&r| eps_values.iter().map(move |&e| (r, e)))
        .collect();
    let reps = run_replications(config, &pairs)?;
    let points = pairs
        .iter()
        .enumerate()
        .map(|(i, &(r, eps))| {
            let sum = |f: fn(&CliqueStatistics) -> u64| {
                reps.iter().map(|rep| f(&rep.stats[i])).sum::<u64>()
            };
            let (w, wl, wls) = (
                sum(|s| s.w),
                sum(|s| s.w_localized),
                sum(|s| s.w_localized_shared),
            );
            let (kt, kc) = (sum(|s| s.k_total), sum(|s| s.k_compact));
            LocalizationPoint {
                r,
                epsilon: eps,
                expected_w: theory.expected_w(config.n, r),
                sum_w: w,
                sum_w_localized: wl,
                sum_w_localized_shared: wls,
                sum_k: kt,
                sum_k_compact: kc,
                localized_ratio: ratio(wl, w),
                localized_shared_ratio: ratio(wls, w),
                compact_ratio: ratio(kc, kt),
            }
        })
        .collect();
    Ok(ExperimentOutput {
        report: Report {
            config: config.clone(),
            theory,
            outcome: Outcome::Localization(LocalizationReport { points }),
        },
        replications: reps,
    })
}

pub fn run_constants(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let theory = config.theory()?;
    let outcome = Outcome::Constants(ConstantsReport {
        n: config.n,
        frechet_scale: theory.frechet_scale(config.n),
        critical_radius_r0_1: theory.critical_radius(config.n, 1.0),
    });
    Ok(ExperimentOutput {
        report: Report {
            config: config.clone(),
            theory,
            outcome,
        },
        replications: Vec::new(),
    })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    match config.experiment {
        ExperimentKind::Frechet => run_frechet(config),
        ExperimentKind::Poisson => run_poisson(config),
        ExperimentKind::Scaling => run_scaling(config),
        ExperimentKind::Localization => run_localization(config),
        ExperimentKind::Constants => run_constants(config),
    }
}

impl ExperimentOutput {
    pub fn report_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.report)?)
    }

    pub fn write_replications_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "replication",
            "seed",
            "stream",
            "points",
            "edges",
            "r",
            "epsilon",
            "w",
            "w_localized",
            "w_localized_shared",
            "w_bar",
            "k_total",
            "k_compact",
            "e_star",
            "duration_secs",
        ])?;
        for rep in &self.replications {
            for s in &rep.stats {
                w.write_record(&[
                    rep.index.to_string(),
                    rep.stream.seed.to_string(),
                    rep.stream.stream.to_string(),
                    rep.points.to_string(),
                    rep.edges.to_string(),
                    s.r.to_string(),
                    s.epsilon.to_string(),
                    s.w.to_string(),
                    s.w_localized.to_string(),
                    s.w_localized_shared.to_string(),
                    s.w_bar().to_string(),
                    s.k_total.to_string(),
                    s.k_compact.to_string(),
                    s.e_star.map(|e| e.to_string()).unwrap_or_default(),
                    format!("{:.6}", rep.duration_secs),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `report.json`, `replications.csv` and, for frechet, `ecdf.csv`.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let report = dir.join("report.json");
        fs::write(&report, self.report_json()? + "\n")?;
        written.push(report);
        let reps = dir.join("replications.csv");
        self.write_replications_csv(fs::File::create(&reps)?)?;
        written.push(reps);
        if let Outcome::Frechet(f) = &self.report.outcome {
            let path = dir.join("ecdf.csv");
            let theta = f.theta;
            f.ecdf.write_csv(
                "frechet_cdf",
                |x| frechet_cdf(x, theta),
                fs::File::create(&path)?,
            )?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Mean number of k-cliques through a planted edge of fixed length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedEdgeReport {
    pub r: f64,
    pub replications: usize,
    pub mean: f64,
    pub std_error: f64,
    /// `M_k·r^{-(k-2)α}`.
    pub theory: f64,
    pub counts: Vec<u64>,
}

/// Plants two extra points at distance `r` along the first axis of a
/// Poisson cloud, forces their edge and counts the k-cliques through it.
pub fn planted_edge_cliques(
    params: &ModelParams,
    theory: &TheoryConstants,
    r: f64,
    replications: usize,
    seed: u64,
    builder: BuilderKind,
    cutoff: f64,
) -> Result<PlantedEdgeReport> {
    if !(r > 0.0 && r < params.side / 2.0) {
        return Err(Error::InvalidArgument(format!(
            "planted length {r} must lie in (0, n/2)"
        )));
    }
    let counts = (0..replications as u64)
        .into_par_iter()
        .map(|index| {
            let root = RngStream::replication(seed, index);
            let mut cloud = sample_poisson_cloud(params, root.purpose(Purpose::Cloud))?;
            let mut rng = root.purpose(Purpose::Planting).rng();
            let anchor: Vec<f64> = (0..params.dim)
                .map(|_| rng.random::<f64>() * params.side)
                .collect();
            let mut other = anchor.clone();
            other[0] += r;
            let a = cloud.push(&wrap_point(&anchor, params)?)?;
            let b = cloud.push(&wrap_point(&other, params)?)?;
            let graph = build(cloud, builder, cutoff, root).with_edge(a, b);
            per_edge_clique_count(&graph, a, b, params.k)
        })
        .collect::<Result<Vec<u64>>>()?;
    let values: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let (mean, var) = mean_variance(&values);
    let k = params.k as i32;
    Ok(PlantedEdgeReport {
        r,
        replications,
        mean,
        std_error: (var / values.len() as f64).sqrt(),
        theory: theory.m_k * r.powf(-((k - 2) as f64) * params.alpha),
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: ExperimentKind) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(kind, ModelParams::new(1, 300.0, 4.0, 3).unwrap());
        c.replications = 20;
        c.seed = 9;
        c.r0 = Some(1.0);
        c
    }

    #[test]
    fn parses_flat_toml() {
        let c = ExperimentConfig::from_toml_str(
            r#"
            experiment = "poisson"
            d = 1
            n = 2000
            alpha = 4.0
            k = 3
            replications = 10
            seed = 7
            r0 = 2.0
            epsilon = 0.25
            builder = "allpairs"
            "#,
        )
        .unwrap();
        assert_eq!(c.experiment, ExperimentKind::Poisson);
        assert_eq!(c.builder, BuilderKind::Allpairs);
        assert_eq!(c.epsilon.resolve(c.n).unwrap(), 0.25);
        let d = ExperimentConfig::from_toml_str(
            "experiment = \"frechet\"\nd = 1\nn = 100\nalpha = 4\nk = 3\n",
        )
        .unwrap();
        assert!((d.epsilon.resolve(100.0).unwrap() - 1.0 / 100f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_configs() {
        let base = "experiment = \"scaling\"\nd = 1\nn = 100\nalpha = 4\nk = 3\n";
        assert!(ExperimentConfig::from_toml_str(&format!("{base}bogus = 1\n")).is_err());
        assert!(ExperimentConfig::from_toml_str(&format!("{base}replications = 0\n")).is_err());
        assert!(ExperimentConfig::from_toml_str(&format!("{base}epsilon = -1.0\n")).is_err());
        assert!(ExperimentConfig::from_toml_str(&format!("{base}epsilon = \"sqrt\"\n")).is_err());
        assert!(ExperimentConfig::from_toml_str(&format!("{base}r_grid = [1.0, -2.0]\n")).is_err());
        assert!(ExperimentConfig::from_toml_str(
            "experiment = \"scaling\"\nd = 2\nn = 100\nalpha = 1.5\nk = 3\n"
        )
        .is_err());
        assert!(ExperimentConfig::from_toml_str(
            "experiment = \"poisson\"\nd = 1\nn = 100\nalpha = 4\nk = 3\n"
        )
        .is_err());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut a = small(ExperimentKind::Localization);
        a.workers = 1;
        let mut b = a.clone();
        b.workers = 3;
        let ra = run_experiment(&a).unwrap();
        let rb = run_experiment(&b).unwrap();
        let strip = |o: &ExperimentOutput| {
            o.replications
                .iter()
                .map(|r| (r.index, r.points, r.edges, r.stats.clone()))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&ra), strip(&rb));
        assert_eq!(ra.report.outcome, rb.report.outcome);
    }

    #[test]
    fn reports_are_reproducible() {
        for kind in [
            ExperimentKind::Frechet,
            ExperimentKind::Poisson,
            ExperimentKind::Constants,
        ] {
            let c = small(kind);
            let a = run_experiment(&c).unwrap().report_json().unwrap();
            let b = run_experiment(&c).unwrap().report_json().unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn poisson_beta_for_r0_one() {
        let out = run_experiment(&small(ExperimentKind::Poisson)).unwrap();
        match out.report.outcome {
            Outcome::Poisson(p) => assert_eq!(p.fit.beta, 1.0),
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn frechet_needs_cliques() {
        let mut c = small(ExperimentKind::Frechet);
        c.n = 3.0;
        c.replications = 3;
        c.builder = BuilderKind::Allpairs;
        c.k = 6;
        assert!(matches!(run_experiment(&c), Err(Error::Experiment(_))));
    }

    #[test]
    fn localization_ratio_undefined_without_long_cliques() {
        let mut c = small(ExperimentKind::Localization);
        c.r_grid = Some(vec![100.0]);
        let out = run_experiment(&c).unwrap();
        match out.report.outcome {
            Outcome::Localization(l) => {
                assert_eq!(l.points[0].sum_w, 0);
                assert_eq!(l.points[0].localized_ratio, None);
                assert!(l.points[0].compact_ratio.is_some());
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn localization_monotone_in_epsilon() {
        let mut c = small(ExperimentKind::Localization);
        c.w_targets = Some(vec![20.0]);
        c.epsilon = EpsilonSpec::Fixed(0.5);
        c.epsilon_grid = Some(vec![0.25, 0.1, 0.05]);
        let out = run_experiment(&c).unwrap();
        let Outcome::Localization(l) = out.report.outcome else {
            panic!()
        };
        for w in l.points.windows(2) {
            assert!(w[1].sum_w_localized >= w[0].sum_w_localized);
            assert!(w[1].sum_k_compact >= w[0].sum_k_compact);
        }
    }

    #[test]
    fn writes_output_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_experiment(&small(ExperimentKind::Frechet)).unwrap();
        let files = out.write_to(dir.path()).unwrap();
        assert_eq!(files.len(), 3);
        let ecdf = fs::read_to_string(dir.path().join("ecdf.csv")).unwrap();
        assert!(ecdf.starts_with("value,empirical_cdf,frechet_cdf\n"));
        let reps = fs::read_to_string(dir.path().join("replications.csv")).unwrap();
        assert_eq!(reps.lines().count(), 21);
    }
}
