use std::fmt::Write as _;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use super::json;
use crate::error::{Error, Result};
use crate::graph::{grid_graph, hop_distribution};
use crate::metric::{Engine, Gfmmd};

/// Bimodal spread scores reported for the 16×16 grid, in shift order.
pub const REFERENCE_BIMODAL_SCORES: [f64; 4] = [11.14, 8.66, 6.13, 6.09];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub rows: usize,
    pub cols: usize,
    /// Heat diffusion time for the translated pair.
    pub tau: f64,
    /// 0-indexed `(row, col)` of the fixed source.
    pub source: (usize, usize),
    /// Column offset between consecutive shifts of the moving source.
    pub step: usize,
    pub shifts: usize,
    pub engine: Engine,
    pub diffusion_taus: Vec<f64>,
    pub hop_counts: Vec<usize>,
    pub hop_source: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            rows: 16,
            cols: 16,
            tau: 16.0,
            source: (7, 3),
            step: 2,
            shifts: 4,
            engine: Engine::Exact,
            diffusion_taus: vec![1.0, 16.0, 256.0, 4096.0],
            hop_counts: vec![1, 4, 16, 64],
            hop_source: 0,
        }
    }
}

impl GridConfig {
    fn vertex(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn validate(&self) -> Result<()> {
        let (r, c) = self.source;
        if r >= self.rows || c + self.step * self.shifts.saturating_sub(1) >= self.cols {
            return Err(Error::Config(format!(
                "source ({r}, {c}) with {} shifts of {} leaves the {}x{} grid",
                self.shifts, self.step, self.rows, self.cols
            )));
        }
        if self.shifts == 0 {
            return Err(Error::Config("at least one shift is required".into()));
        }
        if self.hop_source >= self.rows * self.cols {
            return Err(Error::Config(format!(
                "hop source {} is off the grid",
                self.hop_source
            )));
        }
        self.engine.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub config: GridConfig,
    /// `gfmmd(P, Q_j)` for each shift `j`.
    pub distances: Vec<f64>,
    /// Witness for each shift; empty when `P = Q_j`.
    pub witnesses: Vec<Vec<f64>>,
    /// Localization score of `(P + Q_j) / 2`.
    #[serde(with = "json::vec")]
    pub bimodal_scores: Vec<f64>,
    pub reference_bimodal_scores: Vec<f64>,
    /// Computed score divided by the reference value, per shift.
    #[serde(with = "json::vec")]
    pub bimodal_ratios: Vec<f64>,
    /// Localization score of the diffused source at each diffusion time.
    #[serde(with = "json::vec")]
    pub diffusion_scores: Vec<f64>,
    /// Localization score of the uniform hop-ball at each hop count.
    #[serde(with = "json::vec")]
    pub hop_scores: Vec<f64>,
}

impl GridReport {
    pub fn distances_increasing(&self) -> bool {
        self.distances.windows(2).all(|w| w[0] < w[1])
    }

    pub fn bimodal_nonincreasing(&self) -> bool {
        self.bimodal_scores.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>5} {:>12} {:>12} {:>10} {:>8}",
            "shift", "gfmmd", "bimodal", "reference", "ratio"
        );
        for j in 0..self.distances.len() {
            let reference = self.reference_bimodal_scores.get(j);
            let _ = writeln!(
                out,
                "{:>5} {:>12.6} {:>12.6} {:>10} {:>8}",
                j,
                self.distances[j],
                self.bimodal_scores[j],
                reference.map_or("-".into(), |r| format!("{r:.2}")),
                self.bimodal_ratios
                    .get(j)
                    .map_or("-".into(), |r| format!("{r:.4}")),
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "{:>8} {:>12}", "tau", "diffusion");
        for (tau, s) in self
            .config
            .diffusion_taus
            .iter()
            .zip(&self.diffusion_scores)
        {
            let _ = writeln!(out, "{tau:>8} {s:>12.6}");
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "{:>8} {:>12}", "hops", "hop ball");
        for (k, s) in self.config.hop_counts.iter().zip(&self.hop_scores) {
            let _ = writeln!(out, "{k:>8} {s:>12.6}");
        }
        out
    }

    /// One row per vertex and shift: `shift,vertex,row,col,witness`.
    pub fn witness_csv(&self) -> String {
        let mut out = String::from("shift,vertex,row,col,witness\n");
        let cols = self.config.cols;
        for (j, w) in self.witnesses.iter().enumerate() {
            for (v, f) in w.iter().enumerate() {
                let _ = writeln!(out, "{j},{v},{},{},{f}", v / cols, v % cols);
            }
        }
        out
    }
}

/// Translated heat-diffused pair, bimodal spread, diffusion and hop-ball
/// localization on a grid.
pub fn run_grid_experiment(config: &GridConfig) -> Result<GridReport> {
    config.validate()?;
    let ctx = Gfmmd::new(grid_graph(config.rows, config.cols)?);
    let engine = config.engine;
    let (r, c) = config.source;
    let p = ctx.heat_diffuse_dirac(config.vertex(r, c), config.tau, &engine)?;

    let mut distances = Vec::new();
    let mut witnesses = Vec::new();
    let mut bimodal_scores = Vec::new();
    for j in 0..config.shifts {
        let v = config.vertex(r, c + config.step * j);
        let q = ctx.heat_diffuse_dirac(v, config.tau, &engine)?;
        distances.push(ctx.gfmmd(p.view(), q.view(), &engine)?);
        let witness = match ctx.witness_function(p.view(), q.view()) {
            Ok(w) => w.values.to_vec(),
            Err(Error::UndefinedWitness) => Vec::new(),
            Err(e) => return Err(e),
        };
        witnesses.push(witness);
        let mid: Array1<f64> = (&p + &q) / 2.0;
        bimodal_scores.push(ctx.localization_score(mid.view(), &engine)?);
    }
    let reference_bimodal_scores: Vec<f64> = REFERENCE_BIMODAL_SCORES
        .iter()
        .take(config.shifts)
        .copied()
        .collect();
    let bimodal_ratios = bimodal_scores
        .iter()
        .zip(&reference_bimodal_scores)
        .map(|(s, r)| s / r)
        .collect();

    let diffusion_scores = config
        .diffusion_taus
        .iter()
        .map(|&tau| {
            let h = ctx.heat_diffuse_dirac(config.vertex(r, c), tau, &engine)?;
            ctx.localization_score(h.view(), &engine)
        })
        .collect::<Result<Vec<f64>>>()?;
    let hop_scores = config
        .hop_counts
        .iter()
        .map(|&k| {
            let h = hop_distribution(ctx.graph(), config.hop_source, k)?;
            ctx.localization_score(h.view(), &engine)
        })
        .collect::<Result<Vec<f64>>>()?;

    Ok(GridReport {
        config: config.clone(),
        distances,
        witnesses,
        bimodal_scores,
        reference_bimodal_scores,
        bimodal_ratios,
        diffusion_scores,
        hop_scores,
    })
}
