//! Cycle, utilization and SRAM-traffic model for one GEMM on one systolic
//! array.
//!
//! The closed-form model in this module is checked against the cycle-stepped
//! simulator in [`reference`].

pub mod reference;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::workload::GemmShape;

pub use reference::{simulate_reference, simulate_reference_with, ReferenceRun, TimingError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArrayDims {
    pub rows: u64,
    pub cols: u64,
}

impl ArrayDims {
    pub fn new(rows: u64, cols: u64) -> Self {
        assert!(rows >= 1 && cols >= 1, "array dims must be ≥ 1");
        ArrayDims { rows, cols }
    }

    pub fn square(side: u64) -> Self {
        Self::new(side, side)
    }

    pub fn pes(&self) -> u64 {
        self.rows * self.cols
    }
}

impl fmt::Display for ArrayDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

/// Which operand class stays resident in the PEs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dataflow {
    #[serde(rename = "OS")]
    OutputStationary,
    #[serde(rename = "WS")]
    WeightStationary,
    #[serde(rename = "IS")]
    InputStationary,
}

impl Dataflow {
    pub const ALL: [Dataflow; 3] = [
        Dataflow::OutputStationary,
        Dataflow::WeightStationary,
        Dataflow::InputStationary,
    ];

    pub fn short_name(&self) -> &'static str {
        match self {
            Dataflow::OutputStationary => "OS",
            Dataflow::WeightStationary => "WS",
            Dataflow::InputStationary => "IS",
        }
    }

    /// GEMM extents mapped to (array rows, array cols, streamed length).
    fn mapping(&self, gemm: GemmShape) -> (u64, u64, u64) {
        match self {
            Dataflow::OutputStationary => (gemm.m, gemm.n, gemm.k),
            Dataflow::WeightStationary => (gemm.k, gemm.n, gemm.m),
            Dataflow::InputStationary => (gemm.k, gemm.m, gemm.n),
        }
    }
}

impl fmt::Display for Dataflow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Dataflow {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "OS" => Ok(Dataflow::OutputStationary),
            "WS" => Ok(Dataflow::WeightStationary),
            "IS" => Ok(Dataflow::InputStationary),
            _ => Err(format!("unknown dataflow `{s}` (expected os, ws or is)")),
        }
    }
}

/// One pass of the array over a tile of the GEMM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub rows_used: u64,
    pub cols_used: u64,
    /// Streamed length: k for OS, m for WS, n for IS.
    pub reduction: u64,
    /// Position of this fold along the k axis (always 0 for OS).
    pub k_index: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub dims: ArrayDims,
    pub flow: Dataflow,
    pub folds: Vec<Fold>,
}

impl FoldPlan {
    pub fn num_folds(&self) -> u64 {
        self.folds.len() as u64
    }

    pub fn used_pe_folds(&self) -> u64 {
        self.folds.iter().map(|f| f.rows_used * f.cols_used).sum()
    }
}

fn tiles(extent: u64, tile: u64) -> impl Iterator<Item = (u64, u64)> {
    (0..extent.div_ceil(tile)).map(move |i| (i, tile.min(extent - i * tile)))
}

pub fn make_fold_plan(gemm: GemmShape, dims: ArrayDims, flow: Dataflow) -> FoldPlan {
    let (row_extent, col_extent, reduction) = flow.mapping(gemm);
    let mut folds = Vec::new();
    for (row_idx, rows_used) in tiles(row_extent, dims.rows) {
        for (_, cols_used) in tiles(col_extent, dims.cols) {
            let k_index = match flow {
                Dataflow::OutputStationary => 0,
                _ => row_idx,
            };
            folds.push(Fold {
                rows_used,
                cols_used,
                reduction,
                k_index,
            });
        }
    }
    FoldPlan { dims, flow, folds }
}

/// Skewed fill, stream and drain of one fold; identical shape for all
/// three dataflows.
pub fn fold_cycles(fold: &Fold) -> u64 {
    2 * fold.rows_used + fold.cols_used + fold.reduction - 2
}

/// Folds execute back to back with no overlap.
pub fn analytical_cycles(plan: &FoldPlan) -> u64 {
    plan.folds.iter().map(fold_cycles).sum()
}

/// (reads, writes) for one fold.
pub fn fold_sram_accesses(fold: &Fold, flow: Dataflow) -> (u64, u64) {
    let (r, c, s) = (fold.rows_used, fold.cols_used, fold.reduction);
    match flow {
        Dataflow::OutputStationary => (r * s + c * s, r * c),
        Dataflow::WeightStationary | Dataflow::InputStationary => {
            let psum_reads = if fold.k_index > 0 { s * c } else { 0 };
            (r * c + s * r + psum_reads, s * c)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerStats {
    pub cycles: u64,
    pub mac_ops: u64,
    pub folds: u64,
    /// PEs available during the run (rows·cols, summed over partitions).
    pub pes: u64,
    pub mapping_efficiency: f64,
    pub compute_utilization: f64,
    pub sram_reads: u64,
    pub sram_writes: u64,
}

impl LayerStats {
    pub fn sram_accesses(&self) -> u64 {
        self.sram_reads + self.sram_writes
    }
}

pub fn layer_stats(gemm: GemmShape, dims: ArrayDims, flow: Dataflow) -> LayerStats {
    let plan = make_fold_plan(gemm, dims, flow);
    let cycles = analytical_cycles(&plan);
    let mac_ops = gemm.mac_ops();
    let (sram_reads, sram_writes) = plan
        .folds
        .iter()
        .map(|f| fold_sram_accesses(f, flow))
        .fold((0, 0), |(r, w), (fr, fw)| (r + fr, w + fw));
    let pes = dims.pes();
    LayerStats {
        cycles,
        mac_ops,
        folds: plan.num_folds(),
        pes,
        mapping_efficiency: plan.used_pe_folds() as f64 / (pes * plan.num_folds()) as f64,
        compute_utilization: mac_ops as f64 / (pes * cycles) as f64,
        sram_reads,
        sram_writes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const OS: Dataflow = Dataflow::OutputStationary;

    #[test]
    fn single_pe_single_fold() {
        let plan = make_fold_plan(GemmShape::new(1, 1, 1), ArrayDims::square(1), OS);
        assert_eq!(plan.folds.len(), 1);
        let f = plan.folds[0];
        assert_eq!((f.rows_used, f.cols_used, f.reduction), (1, 1, 1));
        assert_eq!(analytical_cycles(&plan), 2);
    }

    #[test]
    fn edge_folds_carry_remainders() {
        let plan = make_fold_plan(GemmShape::new(5, 1, 1), ArrayDims::new(2, 1), OS);
        let rows: Vec<_> = plan.folds.iter().map(|f| f.rows_used).collect();
        assert_eq!(rows, [2, 2, 1]);
    }

    #[test]
    fn exact_tiling_gives_full_folds() {
        let plan = make_fold_plan(GemmShape::new(128, 128, 363), ArrayDims::square(64), OS);
        assert_eq!(plan.folds.len(), 4);
        assert!(plan
            .folds
            .iter()
            .all(|f| f.rows_used == 64 && f.cols_used == 64 && f.reduction == 363));
    }

    #[test]
    fn ws_and_is_fold_mapping() {
        let g = GemmShape::new(10, 6, 9);
        let ws = make_fold_plan(g, ArrayDims::new(4, 4), Dataflow::WeightStationary);
        // ceil(9/4) k-folds by ceil(6/4) n-folds, each streaming m
        assert_eq!(ws.folds.len(), 3 * 2);
        assert!(ws.folds.iter().all(|f| f.reduction == 10));
        let is = make_fold_plan(g, ArrayDims::new(4, 4), Dataflow::InputStationary);
        assert_eq!(is.folds.len(), 3 * 3);
        assert!(is.folds.iter().all(|f| f.reduction == 6));
        assert_eq!(is.folds.iter().filter(|f| f.k_index == 0).count(), 3);
    }

    #[test]
    fn os_cycle_examples() {
        let c = |m, n, k, r, cc| {
            analytical_cycles(&make_fold_plan(
                GemmShape::new(m, n, k),
                ArrayDims::new(r, cc),
                OS,
            ))
        };
        assert_eq!(c(4, 4, 4, 4, 4), 14);
        assert_eq!(c(3, 2, 2, 2, 2), 10);
    }

    #[test]
    fn stats_examples() {
        let s = layer_stats(GemmShape::new(4, 4, 4), ArrayDims::square(4), OS);
        assert_eq!(s.mapping_efficiency, 1.0);
        assert!((s.compute_utilization - 64.0 / (16.0 * 14.0)).abs() < 1e-15);

        let s = layer_stats(GemmShape::new(1, 1, 1), ArrayDims::square(1), OS);
        assert_eq!((s.sram_reads, s.sram_writes), (2, 1));
        assert_eq!(s.cycles, 2);
    }

    #[test]
    fn ws_psum_reads_only_after_first_k_fold() {
        let g = GemmShape::new(3, 2, 5);
        let s = layer_stats(g, ArrayDims::new(2, 2), Dataflow::WeightStationary);
        // k-folds of 2, 2, 1 rows; filter preload r·c, ifmap m·r, psum m·c
        let reads = (4 + 3 * 2) + (4 + 3 * 2 + 3 * 2) + (2 + 3 + 3 * 2);
        assert_eq!(s.sram_reads, reads);
        assert_eq!(s.sram_writes, 3 * 3 * 2);
    }

    #[test]
    fn dataflow_parse() {
        assert_eq!("os".parse::<Dataflow>().unwrap(), OS);
        assert_eq!(
            "WS".parse::<Dataflow>().unwrap(),
            Dataflow::WeightStationary
        );
        assert!("xs".parse::<Dataflow>().is_err());
    }
}
