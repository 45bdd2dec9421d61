//! The ten ways of grouping four `B x B` tiles into logical arrays, the
//! per-partition GEMM split they induce, and the interconnect selector
//! settings for each.
//!
//! Grid rows split the output-pixel (M) axis and grid columns split the
//! filter (N) axis. `H` variants merge tiles side by side into `B x 2B`
//! arrays, `V` variants stack them into `2B x B` arrays.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::timing::{layer_stats, ArrayDims, Dataflow, LayerStats};
use crate::workload::{layer_to_gemm, GemmShape, NetworkModel, WorkloadError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Arrangement {
    #[serde(rename = "1x1")]
    Unified,
    #[serde(rename = "2x2")]
    Grid2x2,
    #[serde(rename = "4x1")]
    Column4,
    #[serde(rename = "1x4")]
    Row4,
    #[serde(rename = "3x1")]
    Column3,
    #[serde(rename = "1x3")]
    Row3,
    #[serde(rename = "2x1H")]
    Column2Wide,
    #[serde(rename = "2x1V")]
    Column2Tall,
    #[serde(rename = "1x2H")]
    Row2Wide,
    #[serde(rename = "1x2V")]
    Row2Tall,
}

impl Arrangement {
    pub const ALL: [Arrangement; 10] = [
        Arrangement::Unified,
        Arrangement::Grid2x2,
        Arrangement::Column4,
        Arrangement::Row4,
        Arrangement::Column3,
        Arrangement::Row3,
        Arrangement::Column2Wide,
        Arrangement::Column2Tall,
        Arrangement::Row2Wide,
        Arrangement::Row2Tall,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Arrangement::Unified => "1x1",
            Arrangement::Grid2x2 => "2x2",
            Arrangement::Column4 => "4x1",
            Arrangement::Row4 => "1x4",
            Arrangement::Column3 => "3x1",
            Arrangement::Row3 => "1x3",
            Arrangement::Column2Wide => "2x1H",
            Arrangement::Column2Tall => "2x1V",
            Arrangement::Row2Wide => "1x2H",
            Arrangement::Row2Tall => "1x2V",
        }
    }

    /// Position in declaration order; used as a stable tie-break.
    pub fn index(&self) -> usize {
        Self::ALL.iter().position(|a| a == self).unwrap()
    }

    /// Name of the selector-table row this arrangement uses.
    pub fn selector_row(&self) -> &'static str {
        match self {
            Arrangement::Column2Wide | Arrangement::Column2Tall => "2x1",
            Arrangement::Row2Wide | Arrangement::Row2Tall => "1x2",
            other => other.name(),
        }
    }
}

impl fmt::Display for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Arrangement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Arrangement::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = Arrangement::ALL.iter().map(|a| a.name()).collect();
                format!("unknown arrangement `{s}`; valid: {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitAxis {
    None,
    M,
    N,
    /// Both axes, 2-way each.
    MN,
}

/// Partition shapes of an arrangement before any GEMM is assigned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionGeometry {
    pub arrangement: Arrangement,
    pub base: u64,
    /// One entry per logical array, in grid order (M-major).
    pub arrays: Vec<ArrayDims>,
    pub active_tiles: u64,
    pub split_axis: SplitAxis,
    pub m_ways: u64,
    pub n_ways: u64,
}

impl PartitionGeometry {
    pub fn active_pes(&self) -> u64 {
        self.active_tiles * self.base * self.base
    }
}

pub fn partition_geometry(arr: Arrangement, base: u64) -> PartitionGeometry {
    assert!(base >= 1, "base size must be ≥ 1");
    let b = base;
    let tile = ArrayDims::square(b);
    let (arrays, active_tiles, split_axis, m_ways, n_ways) = match arr {
        Arrangement::Unified => (vec![ArrayDims::square(2 * b)], 4, SplitAxis::None, 1, 1),
        Arrangement::Grid2x2 => (vec![tile; 4], 4, SplitAxis::MN, 2, 2),
        Arrangement::Column4 => (vec![tile; 4], 4, SplitAxis::M, 4, 1),
        Arrangement::Row4 => (vec![tile; 4], 4, SplitAxis::N, 1, 4),
        Arrangement::Column3 => (vec![tile; 3], 3, SplitAxis::M, 3, 1),
        Arrangement::Row3 => (vec![tile; 3], 3, SplitAxis::N, 1, 3),
        Arrangement::Column2Wide => (vec![ArrayDims::new(b, 2 * b); 2], 4, SplitAxis::M, 2, 1),
        Arrangement::Column2Tall => (vec![ArrayDims::new(2 * b, b); 2], 4, SplitAxis::M, 2, 1),
        Arrangement::Row2Wide => (vec![ArrayDims::new(b, 2 * b); 2], 4, SplitAxis::N, 1, 2),
        Arrangement::Row2Tall => (vec![ArrayDims::new(2 * b, b); 2], 4, SplitAxis::N, 1, 2),
    };
    PartitionGeometry {
        arrangement: arr,
        base,
        arrays,
        active_tiles,
        split_axis,
        m_ways,
        n_ways,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub dims: ArrayDims,
    /// `None` when the split leaves this partition without work.
    pub sub_gemm: Option<GemmShape>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionPlan {
    pub geometry: PartitionGeometry,
    pub partitions: Vec<Partition>,
}

impl PartitionPlan {
    pub fn busy(&self) -> impl Iterator<Item = (ArrayDims, GemmShape)> + '_ {
        self.partitions
            .iter()
            .filter_map(|p| p.sub_gemm.map(|g| (p.dims, g)))
    }

    pub fn mac_ops(&self) -> u64 {
        self.busy().map(|(_, g)| g.mac_ops()).sum()
    }
}

/// Sizes of `ways` parts of `extent` that differ by at most one, larger
/// parts first.
pub fn balanced_split(extent: u64, ways: u64) -> Vec<u64> {
    let (q, rem) = (extent / ways, extent % ways);
    (0..ways).map(|i| q + u64::from(i < rem)).collect()
}

pub fn split_gemm(gemm: GemmShape, geometry: &PartitionGeometry) -> PartitionPlan {
    let m_parts = balanced_split(gemm.m, geometry.m_ways);
    let n_parts = balanced_split(gemm.n, geometry.n_ways);
    let mut arrays = geometry.arrays.iter();
    let mut partitions = Vec::with_capacity(geometry.arrays.len());
    for &m in &m_parts {
        for &n in &n_parts {
            let dims = *arrays.next().expect("one array per grid cell");
            let sub_gemm = (m > 0 && n > 0).then_some(GemmShape { m, n, k: gemm.k });
            partitions.push(Partition { dims, sub_gemm });
        }
    }
    PartitionPlan {
        geometry: geometry.clone(),
        partitions,
    }
}

/// Stats of one layer run across the busy partitions of an arrangement.
/// Partitions work on disjoint tiles of the layer in parallel, so the
/// layer takes as long as its slowest partition.
pub fn arranged_layer_stats(
    gemm: GemmShape,
    geometry: &PartitionGeometry,
    flow: Dataflow,
) -> (LayerStats, Vec<LayerStats>) {
    let plan = split_gemm(gemm, geometry);
    let parts: Vec<LayerStats> = plan
        .busy()
        .map(|(dims, g)| layer_stats(g, dims, flow))
        .collect();
    if let [single] = parts.as_slice() {
        if plan.partitions.len() == 1 {
            return (*single, parts);
        }
    }
    let cycles = parts.iter().map(|s| s.cycles).max().unwrap_or(0);
    let mac_ops: u64 = parts.iter().map(|s| s.mac_ops).sum();
    let folds: u64 = parts.iter().map(|s| s.folds).sum();
    let used: f64 = parts
        .iter()
        .map(|s| s.mapping_efficiency * (s.pes * s.folds) as f64)
        .sum();
    let offered: u64 = parts.iter().map(|s| s.pes * s.folds).sum();
    let pes = geometry.active_pes();
    let aggregate = LayerStats {
        cycles,
        mac_ops,
        folds,
        pes,
        mapping_efficiency: used / offered as f64,
        compute_utilization: mac_ops as f64 / (pes * cycles) as f64,
        sram_reads: parts.iter().map(|s| s.sram_reads).sum(),
        sram_writes: parts.iter().map(|s| s.sram_writes).sum(),
    };
    (aggregate, parts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkStats {
    pub network: String,
    pub arrangement: Arrangement,
    pub base: u64,
    pub flow: Dataflow,
    pub total_cycles: u64,
    pub total_mac_ops: u64,
    pub per_layer: Vec<LayerStats>,
    /// Per layer, the stats of each busy partition.
    pub partitions: Vec<Vec<LayerStats>>,
    pub utilization: f64,
    pub sram_reads: u64,
    pub sram_writes: u64,
    pub active_pes: u64,
}

impl NetworkStats {
    pub fn sram_accesses(&self) -> u64 {
        self.sram_reads + self.sram_writes
    }
}

pub fn simulate_network(
    net: &NetworkModel,
    arr: Arrangement,
    base: u64,
    flow: Dataflow,
) -> Result<NetworkStats, WorkloadError> {
    let geometry = partition_geometry(arr, base);
    let mut per_layer = Vec::with_capacity(net.layers.len());
    let mut partitions = Vec::with_capacity(net.layers.len());
    for layer in &net.layers {
        let (agg, parts) = arranged_layer_stats(layer_to_gemm(layer)?, &geometry, flow);
        per_layer.push(agg);
        partitions.push(parts);
    }
    let total_cycles: u64 = per_layer.iter().map(|s| s.cycles).sum();
    let total_mac_ops: u64 = per_layer.iter().map(|s| s.mac_ops).sum();
    let active_pes = geometry.active_pes();
    Ok(NetworkStats {
        network: net.name.clone(),
        arrangement: arr,
        base,
        flow,
        total_cycles,
        total_mac_ops,
        utilization: total_mac_ops as f64 / (active_pes * total_cycles) as f64,
        sram_reads: per_layer.iter().map(|s| s.sram_reads).sum(),
        sram_writes: per_layer.iter().map(|s| s.sram_writes).sum(),
        per_layer,
        partitions,
        active_pes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Selector {
    Low,
    High,
    DontCare,
}

impl Selector {
    fn symbol(&self) -> char {
        match self {
            Selector::Low => '0',
            Selector::High => '1',
            Selector::DontCare => '-',
        }
    }
}

/// Mux/demux group settings, groups 1 through 10.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectorVector(pub [Selector; 10]);

impl fmt::Display for SelectorVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.symbol()))
    }
}

impl Serialize for SelectorVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

const SELECTOR_TABLE: [(&str, &str); 8] = [
    ("2x2", "1111111111"),
    ("1x4", "1011011111"),
    ("4x1", "0111101111"),
    ("1x3", "10110---11"),
    ("3x1", "---1101111"),
    ("1x2", "1011010110"),
    ("2x1", "0100101001"),
    ("1x1", "0000000000"),
];

pub fn selector_config(arr: Arrangement) -> SelectorVector {
    let row = arr.selector_row();
    let (_, bits) = SELECTOR_TABLE
        .iter()
        .find(|(name, _)| *name == row)
        .expect("every arrangement has a selector row");
    let mut sel = [Selector::Low; 10];
    for (slot, ch) in sel.iter_mut().zip(bits.chars()) {
        *slot = match ch {
            '0' => Selector::Low,
            '1' => Selector::High,
            _ => Selector::DontCare,
        };
    }
    SelectorVector(sel)
}
