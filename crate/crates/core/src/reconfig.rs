//! Run-time arrangement selection for a fixed (dataflow, base) fabric.
//!
//! Switching selector state is treated as free.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrangement::{selector_config, Arrangement, SelectorVector};
use crate::dse::{evaluate_point, DesignPoint, DseError, HwConfig};
use crate::energy::TechParams;
use crate::workload::NetworkModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Cycles,
    Power,
    Energy,
    Edp,
    Utilization,
}

impl Objective {
    pub const ALL: [Objective; 5] = [
        Objective::Cycles,
        Objective::Power,
        Objective::Energy,
        Objective::Edp,
        Objective::Utilization,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Objective::Cycles => "cycles",
            Objective::Power => "power",
            Objective::Energy => "energy",
            Objective::Edp => "edp",
            Objective::Utilization => "utilization",
        }
    }

    pub fn maximized(&self) -> bool {
        matches!(self, Objective::Utilization)
    }

    pub fn value(&self, m: &ArrangementMetrics) -> f64 {
        match self {
            Objective::Cycles => m.cycles as f64,
            Objective::Power => m.avg_power,
            Objective::Energy => m.energy,
            Objective::Edp => m.edp,
            Objective::Utilization => m.utilization,
        }
    }

    /// Gain of `chosen` over `baseline`; above 1 means `chosen` is better.
    pub fn improvement(&self, baseline: f64, chosen: f64) -> f64 {
        if self.maximized() {
            chosen / baseline
        } else {
            baseline / chosen
        }
    }

    fn better(&self, a: f64, b: f64) -> bool {
        if self.maximized() {
            a > b
        } else {
            a < b
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Objective::ALL
            .into_iter()
            .find(|o| o.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                format!("unknown objective `{s}`; valid: cycles, power, energy, edp, utilization")
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrangementMetrics {
    pub arrangement: Arrangement,
    pub cycles: u64,
    pub avg_power: f64,
    pub energy: f64,
    pub edp: f64,
    pub utilization: f64,
    pub mem_accesses: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconfigDecision {
    pub network: String,
    pub config: HwConfig,
    pub objective: Objective,
    pub arrangement: Arrangement,
    pub selectors: SelectorVector,
    pub baseline: Arrangement,
    pub baseline_value: f64,
    pub chosen_value: f64,
    pub improvement: f64,
    /// Candidates in declaration order.
    pub table: Vec<ArrangementMetrics>,
}

pub fn arrangement_metrics(
    net: &NetworkModel,
    config: HwConfig,
    tech: &TechParams,
    arrangement: Arrangement,
) -> Result<ArrangementMetrics, DseError> {
    let point = DesignPoint {
        id: arrangement.index(),
        config,
        arrangement,
    };
    let m = evaluate_point(net, &point, tech)?;
    Ok(ArrangementMetrics {
        arrangement,
        cycles: m.cycles,
        avg_power: m.avg_power,
        energy: m.energy,
        edp: m.edp,
        utilization: m.utilization,
        mem_accesses: m.mem_accesses,
    })
}

/// Picks the candidate that optimizes `objective`. Ties go to the earlier
/// arrangement in declaration order.
pub fn choose(objective: Objective, table: &[ArrangementMetrics]) -> Option<&ArrangementMetrics> {
    table.iter().fold(None, |best, m| match best {
        Some(b) if !objective.better(objective.value(m), objective.value(b)) => Some(b),
        _ => Some(m),
    })
}

pub fn select_arrangement(
    net: &NetworkModel,
    config: HwConfig,
    tech: &TechParams,
    objective: Objective,
    baseline: Arrangement,
    candidates: &[Arrangement],
) -> Result<ReconfigDecision, DseError> {
    let mut candidates = candidates.to_vec();
    candidates.sort();
    candidates.dedup();
    if candidates.is_empty() {
        return Err(DseError::EmptyAxis("arrangements"));
    }
    let table: Vec<ArrangementMetrics> = candidates
        .par_iter()
        .map(|&a| arrangement_metrics(net, config, tech, a))
        .collect::<Result<_, _>>()?;
    let base_metrics = match table.iter().find(|m| m.arrangement == baseline) {
        Some(m) => *m,
        None => arrangement_metrics(net, config, tech, baseline)?,
    };
    let best = *choose(objective, &table).expect("non-empty table");
    let chosen_value = objective.value(&best);
    let baseline_value = objective.value(&base_metrics);
    Ok(ReconfigDecision {
        network: net.name.clone(),
        config,
        objective,
        arrangement: best.arrangement,
        selectors: selector_config(best.arrangement),
        baseline,
        baseline_value,
        chosen_value,
        improvement: objective.improvement(baseline_value, chosen_value),
        table,
    })
}
