//! Pareto-based selection of the fixed architecture parameters
//! (dataflow, base size).
//!
//! Every design point (dataflow, base, arrangement) is evaluated on every
//! model. Objectives are min-max normalized per model and oriented so that
//! all four are minimized, the worst-scoring share `alpha` of the space is
//! pruned, and each surviving point gets its Euclidean distance to its
//! model's Pareto front. A configuration's rank is the mean distance of its
//! surviving arrangements over all models.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrangement::{simulate_network, Arrangement};
use crate::energy::{energy_report, EnergyError, TechParams};
use crate::timing::Dataflow;
use crate::workload::{NetworkModel, WorkloadError};

pub const DEFAULT_BASES: [u64; 5] = [32, 64, 128, 256, 512];
pub const OBJECTIVES: [&str; 4] = ["cycles", "avg_power", "utilization", "mem_accesses"];

#[derive(Debug, Error)]
pub enum DseError {
    #[error("design space axis `{0}` is empty")]
    EmptyAxis(&'static str),
    #[error("no models to evaluate")]
    NoModels,
    #[error("base size must be ≥ 1")]
    ZeroBase,
    #[error("alpha must lie in [0, 1), got {0}")]
    AlphaRange(f64),
    #[error("alpha {alpha} would prune all {points} design points")]
    PrunesEverything { alpha: f64, points: usize },
    #[error("model {model}, point {point}: {source}")]
    Workload {
        model: String,
        point: DesignPoint,
        #[source]
        source: WorkloadError,
    },
    #[error("model {model}, point {point}: {source}")]
    Energy {
        model: String,
        point: DesignPoint,
        #[source]
        source: EnergyError,
    },
}

/// The architecture parameters fixed at design time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HwConfig {
    pub flow: Dataflow,
    pub base: u64,
}

impl Ord for HwConfig {
    fn cmp(&self, other: &Self) -> Ordering {
        self.flow.cmp(&other.flow).then(self.base.cmp(&other.base))
    }
}

impl PartialOrd for HwConfig {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for HwConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.flow, self.base)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DesignPoint {
    pub id: usize,
    pub config: HwConfig,
    pub arrangement: Arrangement,
}

impl fmt::Display for DesignPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.config, self.arrangement)
    }
}

/// Axes are stored sorted and deduplicated, so point ids do not depend on
/// the order the axes were given in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignSpace {
    dataflows: Vec<Dataflow>,
    bases: Vec<u64>,
    arrangements: Vec<Arrangement>,
}

impl DesignSpace {
    pub fn new(
        mut dataflows: Vec<Dataflow>,
        mut bases: Vec<u64>,
        mut arrangements: Vec<Arrangement>,
    ) -> Result<Self, DseError> {
        dataflows.sort();
        dataflows.dedup();
        bases.sort();
        bases.dedup();
        arrangements.sort();
        arrangements.dedup();
        if dataflows.is_empty() {
            return Err(DseError::EmptyAxis("dataflows"));
        }
        if bases.is_empty() {
            return Err(DseError::EmptyAxis("bases"));
        }
        if arrangements.is_empty() {
            return Err(DseError::EmptyAxis("arrangements"));
        }
        if bases[0] == 0 {
            return Err(DseError::ZeroBase);
        }
        Ok(DesignSpace {
            dataflows,
            bases,
            arrangements,
        })
    }

    /// Three dataflows, five base sizes from 32 to 512, ten arrangements.
    pub fn full() -> Self {
        Self::new(
            Dataflow::ALL.to_vec(),
            DEFAULT_BASES.to_vec(),
            Arrangement::ALL.to_vec(),
        )
        .expect("full space is valid")
    }

    pub fn dataflows(&self) -> &[Dataflow] {
        &self.dataflows
    }

    pub fn bases(&self) -> &[u64] {
        &self.bases
    }

    pub fn arrangements(&self) -> &[Arrangement] {
        &self.arrangements
    }

    pub fn configs(&self) -> Vec<HwConfig> {
        self.dataflows
            .iter()
            .flat_map(|&flow| self.bases.iter().map(move |&base| HwConfig { flow, base }))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.dataflows.len() * self.bases.len() * self.arrangements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points in id order: config-major, arrangement-minor.
    pub fn points(&self) -> Vec<DesignPoint> {
        let mut out = Vec::with_capacity(self.len());
        for config in self.configs() {
            for &arrangement in &self.arrangements {
                out.push(DesignPoint {
                    id: out.len(),
                    config,
                    arrangement,
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsVector {
    pub cycles: u64,
    pub avg_power: f64,
    pub utilization: f64,
    pub mem_accesses: u64,
    /// Carried for reporting; not a DSE objective.
    pub energy: f64,
    pub edp: f64,
}

impl MetricsVector {
    pub fn objectives(&self) -> [f64; 4] {
        [
            self.cycles as f64,
            self.avg_power,
            self.utilization,
            self.mem_accesses as f64,
        ]
    }
}

pub fn evaluate_point(
    model: &NetworkModel,
    point: &DesignPoint,
    tech: &TechParams,
) -> Result<MetricsVector, DseError> {
    let stats = simulate_network(
        model,
        point.arrangement,
        point.config.base,
        point.config.flow,
    )
    .map_err(|source| DseError::Workload {
        model: model.name.clone(),
        point: *point,
        source,
    })?;
    let report = energy_report(&stats, tech).map_err(|source| DseError::Energy {
        model: model.name.clone(),
        point: *point,
        source,
    })?;
    Ok(MetricsVector {
        cycles: stats.total_cycles,
        avg_power: report.avg_power,
        utilization: stats.utilization,
        mem_accesses: stats.sram_accesses(),
        energy: report.energy,
        edp: report.edp,
    })
}

/// `result[model][point id]`. Evaluations run on the current rayon pool
/// and are merged by point id.
pub fn evaluate_space(
    models: &[NetworkModel],
    space: &DesignSpace,
    tech: &TechParams,
) -> Result<Vec<Vec<MetricsVector>>, DseError> {
    if models.is_empty() {
        return Err(DseError::NoModels);
    }
    let points = space.points();
    let jobs: Vec<(usize, &DesignPoint)> = (0..models.len())
        .flat_map(|m| points.iter().map(move |p| (m, p)))
        .collect();
    let flat: Vec<MetricsVector> = jobs
        .par_iter()
        .map(|&(m, p)| evaluate_point(&models[m], p, tech))
        .collect::<Result<_, _>>()?;
    Ok(flat.chunks(points.len()).map(<[_]>::to_vec).collect())
}

pub type Oriented = [f64; 4];

/// Min-max scales each objective of one model to [0, 1] and flips
/// utilization so every objective is minimized. Constant columns map to 0.
pub fn normalize_and_orient(metrics: &[MetricsVector]) -> Vec<Oriented> {
    let raw: Vec<[f64; 4]> = metrics.iter().map(MetricsVector::objectives).collect();
    let mut out = vec![[0.0; 4]; raw.len()];
    for obj in 0..4 {
        let lo = raw.iter().map(|v| v[obj]).fold(f64::INFINITY, f64::min);
        let hi = raw.iter().map(|v| v[obj]).fold(f64::NEG_INFINITY, f64::max);
        let range = hi - lo;
        for (o, v) in out.iter_mut().zip(&raw) {
            let scaled = if range > 0.0 {
                (v[obj] - lo) / range
            } else {
                0.0
            };
            o[obj] = if obj == 2 && range > 0.0 {
                1.0 - scaled
            } else {
                scaled
            };
        }
    }
    out
}

/// Sums in sorted order so the result does not depend on model order.
fn order_free_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

fn removal_count(alpha: f64, points: usize) -> Result<usize, DseError> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(DseError::AlphaRange(alpha));
    }
    // guard against 0.3 * 150 landing a hair above 45
    let remove = (alpha * points as f64 - 1e-9).ceil().max(0.0) as usize;
    if remove >= points {
        return Err(DseError::PrunesEverything { alpha, points });
    }
    Ok(remove)
}

/// Survivor mask over point ids after dropping the `ceil(alpha·|S|)` points
/// with the highest mean oriented score across models and objectives.
/// Among equal scores the larger id goes first.
pub fn prune(normalized: &[Vec<Oriented>], alpha: f64) -> Result<Vec<bool>, DseError> {
    let points = normalized.first().map_or(0, Vec::len);
    let remove = removal_count(alpha, points)?;
    let denom = (normalized.len() * 4) as f64;
    let scores: Vec<f64> = (0..points)
        .map(|id| order_free_sum(normalized.iter().flat_map(|model| model[id]).collect()) / denom)
        .collect();
    let mut order: Vec<usize> = (0..points).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(b.cmp(&a)));
    let mut keep = vec![true; points];
    for &id in &order[..remove] {
        keep[id] = false;
    }
    Ok(keep)
}

fn dominates<const D: usize>(p: &[f64; D], q: &[f64; D]) -> bool {
    p.iter().zip(q).all(|(a, b)| a <= b) && p.iter().zip(q).any(|(a, b)| a < b)
}

/// Indices of the non-dominated points (minimization), ascending.
///
/// Points are visited in lexicographic order; anything that dominates a
/// point sorts before it, so each candidate only needs checking against the
/// front built so far.
pub fn pareto_front<const D: usize>(points: &[[f64; D]]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .iter()
            .zip(&points[b])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut front: Vec<usize> = Vec::new();
    for idx in order {
        if !front.iter().any(|&f| dominates(&points[f], &points[idx])) {
            front.push(idx);
        }
    }
    front.sort_unstable();
    front
}

/// Euclidean distance to the nearest front vector.
pub fn distance_to_front<const D: usize>(point: &[f64; D], front: &[[f64; D]]) -> f64 {
    assert!(!front.is_empty(), "front must be non-empty");
    let mut best = f64::INFINITY;
    for member in front {
        let mut acc = 0.0;
        for (a, b) in point.iter().zip(member) {
            acc += (a - b) * (a - b);
            if acc >= best {
                break;
            }
        }
        best = best.min(acc);
    }
    best.sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    pub members: Vec<usize>,
    pub vectors: Vec<Oriented>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigScore {
    pub config: HwConfig,
    /// Mean distance to front; infinite when every arrangement was pruned.
    pub r: f64,
    pub samples: usize,
}

/// `distances[model][point id]`, `None` for pruned points.
pub fn rank_configs(space: &DesignSpace, distances: &[Vec<Option<f64>>]) -> Vec<ConfigScore> {
    let per_config = space.arrangements().len();
    let mut ranking: Vec<ConfigScore> = space
        .configs()
        .into_iter()
        .enumerate()
        .map(|(ci, config)| {
            let ids = ci * per_config..(ci + 1) * per_config;
            let vals: Vec<f64> = distances
                .iter()
                .flat_map(|model| model[ids.clone()].iter().flatten().copied())
                .collect();
            let samples = vals.len();
            let r = if samples == 0 {
                f64::INFINITY
            } else {
                order_free_sum(vals) / samples as f64
            };
            ConfigScore { config, r, samples }
        })
        .collect();
    ranking.sort_by(|a, b| a.r.total_cmp(&b.r).then(a.config.cmp(&b.config)));
    ranking
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelOutcome {
    pub model: String,
    pub metrics: Vec<MetricsVector>,
    pub normalized: Vec<Oriented>,
    pub front: ParetoFront,
    /// `None` for pruned points.
    pub distances: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DseResult {
    pub alpha: f64,
    pub points: Vec<DesignPoint>,
    pub survivors: Vec<bool>,
    pub models: Vec<ModelOutcome>,
    pub ranking: Vec<ConfigScore>,
    pub c_star: HwConfig,
}

/// Runs the whole exploration on already-evaluated metrics.
pub fn explore_metrics(
    model_names: &[String],
    space: &DesignSpace,
    metrics: Vec<Vec<MetricsVector>>,
    alpha: f64,
) -> Result<DseResult, DseError> {
    if metrics.is_empty() {
        return Err(DseError::NoModels);
    }
    let normalized: Vec<Vec<Oriented>> = metrics.iter().map(|m| normalize_and_orient(m)).collect();
    let survivors = prune(&normalized, alpha)?;
    let kept: Vec<usize> = (0..survivors.len()).filter(|&i| survivors[i]).collect();

    let mut models = Vec::with_capacity(metrics.len());
    for ((name, raw), norm) in model_names.iter().zip(metrics).zip(normalized) {
        let candidates: Vec<Oriented> = kept.iter().map(|&i| norm[i]).collect();
        let front_local = pareto_front(&candidates);
        let vectors: Vec<Oriented> = front_local.iter().map(|&i| candidates[i]).collect();
        let members: Vec<usize> = front_local.iter().map(|&i| kept[i]).collect();
        let distances = (0..norm.len())
            .map(|i| survivors[i].then(|| distance_to_front(&norm[i], &vectors)))
            .collect();
        models.push(ModelOutcome {
            model: name.clone(),
            metrics: raw,
            normalized: norm,
            front: ParetoFront { members, vectors },
            distances,
        });
    }
    let dist: Vec<Vec<Option<f64>>> = models.iter().map(|m| m.distances.clone()).collect();
    let ranking = rank_configs(space, &dist);
    Ok(DseResult {
        alpha,
        points: space.points(),
        survivors,
        c_star: ranking[0].config,
        models,
        ranking,
    })
}

pub fn run_dse(
    models: &[NetworkModel],
    space: &DesignSpace,
    tech: &TechParams,
    alpha: f64,
) -> Result<DseResult, DseError> {
    removal_count(alpha, space.len())?;
    let metrics = evaluate_space(models, space, tech)?;
    let names: Vec<String> = models.iter().map(|m| m.name.clone()).collect();
    explore_metrics(&names, space, metrics, alpha)
}
