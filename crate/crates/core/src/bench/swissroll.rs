use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use ndarray::{s, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::json;
use super::stats::{mean_sd, spearman};
use crate::error::{Error, Result};
use crate::knn::{build_knn_graph, KernelSpec};
use crate::metric::{kernel_mmd_baseline, normalize_signals, Engine, Gfmmd, SignalMatrix};

pub const T_MIN: f64 = 1.5 * PI;
pub const T_MAX: f64 = 4.5 * PI;
pub const HEIGHT: f64 = 20.0;

/// Position on the roll in its intrinsic coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RollCoordinate {
    pub t: f64,
    pub h: f64,
}

impl RollCoordinate {
    pub fn point(&self) -> [f64; 3] {
        [self.t * self.t.cos(), self.h, self.t * self.t.sin()]
    }
}

/// Arc length of the spiral `(t cos t, t sin t)` from 0 to `t`.
pub fn arc_length(t: f64) -> f64 {
    (t * (1.0 + t * t).sqrt() + t.asinh()) / 2.0
}

/// Geodesic distance on the unrolled sheet.
pub fn swiss_geodesic(a: RollCoordinate, b: RollCoordinate) -> f64 {
    (arc_length(a.t) - arc_length(b.t)).hypot(a.h - b.h)
}

#[derive(Debug, Clone)]
pub struct SwissRollDataset {
    pub coordinates: Vec<RollCoordinate>,
    /// `n × 3` centers on the roll.
    pub centers: Array2<f64>,
    /// `(n·m) × ambient_dim`; rows `i·m .. (i+1)·m` form cloud `i`.
    pub points: Array2<f64>,
    pub geodesics: Array2<f64>,
    pub m: usize,
    pub noise: f64,
    pub seed: u64,
}

impl SwissRollDataset {
    pub fn n(&self) -> usize {
        self.coordinates.len()
    }

    pub fn cloud(&self, i: usize) -> ndarray::ArrayView2<'_, f64> {
        self.points.slice(s![i * self.m..(i + 1) * self.m, ..])
    }

    /// Uniform distribution over each cloud's own points, one column per
    /// cloud.
    pub fn cloud_distributions(&self) -> Result<SignalMatrix> {
        let (n, m) = (self.n(), self.m);
        let mut raw = Array2::zeros((n * m, n));
        for i in 0..n {
            raw.slice_mut(s![i * m..(i + 1) * m, i]).fill(1.0);
        }
        normalize_signals(raw, (0..n).map(|i| format!("cloud{i}")).collect())
    }
}

/// Samples `n` centers on the roll and a Gaussian cloud of `m` points
/// around each, zero-padded to `ambient_dim` coordinates.
pub fn sample_swiss_roll(
    n: usize,
    m: usize,
    noise: f64,
    ambient_dim: usize,
    seed: u64,
) -> Result<SwissRollDataset> {
    if n < 2 || m < 2 {
        return Err(Error::Config(format!("need n, m >= 2, got n={n}, m={m}")));
    }
    if ambient_dim < 3 {
        return Err(Error::Config(format!(
            "ambient dimension must be >= 3, got {ambient_dim}"
        )));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::Config(format!(
            "noise must be nonnegative, got {noise}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coordinates: Vec<RollCoordinate> = (0..n)
        .map(|_| RollCoordinate {
            t: rng.gen_range(T_MIN..T_MAX),
            h: rng.gen_range(0.0..HEIGHT),
        })
        .collect();
    let mut centers = Array2::zeros((n, 3));
    let mut points = Array2::zeros((n * m, ambient_dim));
    for (i, c) in coordinates.iter().enumerate() {
        let p = c.point();
        for k in 0..3 {
            centers[[i, k]] = p[k];
        }
        for r in 0..m {
            let mut row = points.row_mut(i * m + r);
            for k in 0..ambient_dim {
                let base = if k < 3 { p[k] } else { 0.0 };
                let z: f64 = rng.sample(StandardNormal);
                row[k] = base + noise * z;
            }
        }
    }
    let geodesics = Array2::from_shape_fn((n, n), |(i, j)| {
        swiss_geodesic(coordinates[i], coordinates[j])
    });
    Ok(SwissRollDataset {
        coordinates,
        centers,
        points,
        geodesics,
        m,
        noise,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwissRollConfig {
    pub n: usize,
    pub m: usize,
    pub noise: f64,
    pub ambient_dim: usize,
    pub k_nn: usize,
    pub kernel: KernelSpec,
    pub chebyshev_orders: Vec<usize>,
    pub epsilon_rel: f64,
    pub include_exact: bool,
    /// RBF bandwidth of the kernel-MMD baseline; the median pairwise
    /// distance of the pooled samples when absent.
    pub mmd_sigma: Option<f64>,
    /// Points drawn with replacement from each cloud for the baseline.
    pub mmd_samples: usize,
    pub seeds: Vec<u64>,
}

impl Default for SwissRollConfig {
    fn default() -> Self {
        Self {
            n: 20,
            m: 20,
            noise: 0.8,
            ambient_dim: 10,
            k_nn: 10,
            kernel: KernelSpec::default(),
            chebyshev_orders: vec![8, 64, 512],
            epsilon_rel: crate::metric::DEFAULT_EPSILON_REL,
            include_exact: true,
            mmd_sigma: None,
            mmd_samples: 20,
            seeds: vec![0, 1, 2],
        }
    }
}

impl SwissRollConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 3 || self.m < 2 {
            return Err(Error::Config(format!(
                "need at least 3 clouds of 2 points, got n={}, m={}",
                self.n, self.m
            )));
        }
        if self.k_nn == 0 || self.k_nn >= self.n * self.m {
            return Err(Error::Config(format!(
                "k_nn must be in [1, {}), got {}",
                self.n * self.m,
                self.k_nn
            )));
        }
        self.kernel.validate()?;
        for &order in &self.chebyshev_orders {
            Engine::Chebyshev {
                order,
                epsilon_rel: self.epsilon_rel,
            }
            .validate()?;
        }
        if self.mmd_sigma.is_some_and(|s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::Config("mmd_sigma must be positive".into()));
        }
        if self.mmd_samples < 2 {
            return Err(Error::Config("mmd_samples must be at least 2".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        if !(self.include_exact || !self.chebyshev_orders.is_empty()) {
            return Err(Error::Config("no GFMMD method selected".into()));
        }
        Ok(())
    }

    fn engines(&self) -> Vec<Engine> {
        let mut engines = Vec::new();
        if self.include_exact {
            engines.push(Engine::Exact);
        }
        engines.extend(
            self.chebyshev_orders
                .iter()
                .map(|&order| Engine::Chebyshev {
                    order,
                    epsilon_rel: self.epsilon_rel,
                }),
        );
        engines
    }
}

pub const KERNEL_MMD: &str = "kernel-mmd";

/// Accuracy of one method across seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodAccuracy {
    pub method: String,
    pub rho: Vec<f64>,
    pub rho_mean: f64,
    pub rho_sd: f64,
}

/// Wall-clock seconds of one method across seeds (embedding plus all pairs).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodTiming {
    pub method: String,
    pub seconds: Vec<f64>,
    pub seconds_mean: f64,
    pub seconds_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub seed: u64,
    pub method: String,
    pub i: usize,
    pub j: usize,
    pub geodesic: f64,
    #[serde(with = "json::scalar")]
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub config: SwissRollConfig,
    pub accuracy: Vec<MethodAccuracy>,
    pub timing: Vec<MethodTiming>,
    pub graph_seconds: Vec<f64>,
    pub scatter: Vec<ScatterPoint>,
}

impl BenchmarkReport {
    pub fn method(&self, name: &str) -> Option<&MethodAccuracy> {
        self.accuracy.iter().find(|a| a.method == name)
    }

    pub fn timing(&self, name: &str) -> Option<&MethodTiming> {
        self.timing.iter().find(|t| t.method == name)
    }

    /// Copy with every wall-clock field zeroed, for determinism checks.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        r.graph_seconds.iter_mut().for_each(|s| *s = 0.0);
        for t in &mut r.timing {
            t.seconds.iter_mut().for_each(|s| *s = 0.0);
            t.seconds_mean = 0.0;
            t.seconds_sd = 0.0;
        }
        r
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<14} {:>18} {:>22}",
            "method", "spearman rho", "seconds"
        );
        for a in &self.accuracy {
            let t = self.timing(&a.method);
            let secs = t.map_or("-".to_string(), |t| {
                format!("{:.4} ± {:.4}", t.seconds_mean, t.seconds_sd)
            });
            let _ = writeln!(
                out,
                "{:<14} {:>18} {:>22}",
                a.method,
                format!("{:.3} ± {:.3}", a.rho_mean, a.rho_sd),
                secs
            );
        }
        out
    }

    pub fn scatter_csv(&self) -> String {
        let mut out = String::from("seed,method,i,j,geodesic,distance\n");
        for p in &self.scatter {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                p.seed, p.method, p.i, p.j, p.geodesic, p.distance
            );
        }
        out
    }
}

fn upper(a: &Array2<f64>) -> Vec<f64> {
    let m = a.nrows();
    (0..m)
        .flat_map(|i| ((i + 1)..m).map(move |j| a[[i, j]]))
        .collect()
}

struct SeedRun {
    graph_seconds: f64,
    /// (method, rho, seconds, distances)
    methods: Vec<(String, f64, f64, Array2<f64>)>,
    geodesics: Array2<f64>,
}

/// Median Euclidean distance over all pairs of pooled sample points.
fn median_distance(samples: &[Array2<f64>]) -> f64 {
    let rows: Vec<ndarray::ArrayView1<f64>> = samples.iter().flat_map(|s| s.rows()).collect();
    let mut d: Vec<f64> = (0..rows.len())
        .flat_map(|i| ((i + 1)..rows.len()).map(move |j| (i, j)))
        .map(|(i, j)| {
            rows[i]
                .iter()
                .zip(rows[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let mid = d.len() / 2;
    let (_, median, _) = d.select_nth_unstable_by(mid, f64::total_cmp);
    if *median > 0.0 {
        *median
    } else {
        1.0
    }
}

fn kernel_mmd_all_pairs(data: &SwissRollDataset, config: &SwissRollConfig) -> Result<Array2<f64>> {
    let n = data.n();
    let mut rng = ChaCha8Rng::seed_from_u64(data.seed);
    rng.set_stream(1);
    let samples: Vec<Array2<f64>> = (0..n)
        .map(|i| {
            let cloud = data.cloud(i);
            let rows: Vec<usize> = (0..config.mmd_samples)
                .map(|_| rng.gen_range(0..data.m))
                .collect();
            cloud.select(ndarray::Axis(0), &rows)
        })
        .collect();
    let sigma = match config.mmd_sigma {
        Some(s) => s,
        None => median_distance(&samples),
    };
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| kernel_mmd_baseline(samples[i].view(), samples[j].view(), sigma))
        .collect::<Result<Vec<f64>>>()?;
    let mut d = Array2::zeros((n, n));
    for (&(i, j), v) in pairs.iter().zip(values) {
        d[[i, j]] = v;
        d[[j, i]] = v;
    }
    Ok(d)
}

fn run_seed(config: &SwissRollConfig, seed: u64) -> Result<SeedRun> {
    let data = sample_swiss_roll(config.n, config.m, config.noise, config.ambient_dim, seed)?;
    let geo = upper(&data.geodesics);
    let start = Instant::now();
    let graph = build_knn_graph(data.points.view(), config.k_nn, config.kernel)?;
    let graph_seconds = start.elapsed().as_secs_f64();
    let components = graph.connected_components().count();
    let score = |d: &Array2<f64>| -> Result<f64> {
        spearman(&upper(d), &geo).map_err(|e| match e {
            Error::UndefinedCorrelation => Error::Config(format!(
                "seed {seed}: every distance is equal (the k-NN graph has {components} \
                 components); increase k_nn or noise"
            )),
            other => other,
        })
    };
    let signals = data.cloud_distributions()?;

    let mut methods = Vec::new();
    for engine in config.engines() {
        // fresh context so each timing includes its own spectral setup
        let ctx = Gfmmd::new(graph.clone());
        let start = Instant::now();
        let d = ctx.distances(&signals, &engine)?;
        let seconds = start.elapsed().as_secs_f64();
        let d = d.values().to_owned();
        let rho = score(&d)?;
        methods.push((engine.to_string(), rho, seconds, d));
    }
    let start = Instant::now();
    let d = kernel_mmd_all_pairs(&data, config)?;
    let seconds = start.elapsed().as_secs_f64();
    let rho = score(&d)?;
    methods.push((KERNEL_MMD.to_string(), rho, seconds, d));
    Ok(SeedRun {
        graph_seconds,
        methods,
        geodesics: data.geodesics,
    })
}

/// Distances between swiss-roll clouds by every configured method, scored by
/// Spearman correlation with the geodesics between cloud centers.
pub fn run_swissroll_benchmark(config: &SwissRollConfig) -> Result<BenchmarkReport> {
    config.validate()?;
    let runs = config
        .seeds
        .par_iter()
        .map(|&seed| run_seed(config, seed))
        .collect::<Result<Vec<SeedRun>>>()?;

    let names: Vec<String> = runs[0].methods.iter().map(|m| m.0.clone()).collect();
    let mut accuracy = Vec::new();
    let mut timing = Vec::new();
    for (k, name) in names.iter().enumerate() {
        let rho: Vec<f64> = runs.iter().map(|r| r.methods[k].1).collect();
        let seconds: Vec<f64> = runs.iter().map(|r| r.methods[k].2).collect();
        let (rho_mean, rho_sd) = mean_sd(&rho);
        let (seconds_mean, seconds_sd) = mean_sd(&seconds);
        accuracy.push(MethodAccuracy {
            method: name.clone(),
            rho,
            rho_mean,
            rho_sd,
        });
        timing.push(MethodTiming {
            method: name.clone(),
            seconds,
            seconds_mean,
            seconds_sd,
        });
    }
    let mut scatter = Vec::new();
    for (run, &seed) in runs.iter().zip(&config.seeds) {
        let n = run.geodesics.nrows();
        for (name, _, _, d) in &run.methods {
            for i in 0..n {
                for j in (i + 1)..n {
                    scatter.push(ScatterPoint {
                        seed,
                        method: name.clone(),
                        i,
                        j,
                        geodesic: run.geodesics[[i, j]],
                        distance: d[[i, j]],
                    });
                }
            }
        }
    }
    Ok(BenchmarkReport {
        config: config.clone(),
        accuracy,
        timing,
        graph_seconds: runs.iter().map(|r| r.graph_seconds).collect(),
        scatter,
    })
}
