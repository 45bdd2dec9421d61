//! Network topologies and their lowering to matrix-multiply shapes.
//!
//! Topology files use the column layout of the SCALE-Sim simulator: one
//! compute layer per row, pre-padded input dimensions, FC layers encoded as
//! 1x1 convolutions.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The exact header columns of a topology CSV.
pub const TOPOLOGY_HEADER: [&str; 8] = [
    "Layer name",
    "IFMAP Height",
    "IFMAP Width",
    "Filter Height",
    "Filter Width",
    "Channels",
    "Num Filter",
    "Strides",
];

const FIELD_NAMES: [&str; 7] = [
    "ifmap_h",
    "ifmap_w",
    "filter_h",
    "filter_w",
    "channels",
    "num_filters",
    "stride",
];

// Layer kinds that carry no MAC work on the array.
const NON_COMPUTE_MARKERS: [&str; 8] = [
    "pool",
    "maxpool",
    "avgpool",
    "relu",
    "activation",
    "batchnorm",
    "bn",
    "softmax",
];

#[derive(Debug, Error)]
pub enum WorkloadError {
    #[error("cannot read topology {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("topology header mismatch: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error("topology {0} has no layers")]
    NoLayers(String),
    #[error("layer {name}: {message}")]
    Shape { name: String, message: String },
}

/// One convolutional or fully-connected layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub name: String,
    pub ifmap_h: u64,
    pub ifmap_w: u64,
    pub filter_h: u64,
    pub filter_w: u64,
    pub channels: u64,
    pub num_filters: u64,
    pub stride: u64,
}

impl LayerSpec {
    /// A fully-connected layer as a 1x1 convolution over a 1x1 ifmap.
    pub fn fully_connected(name: impl Into<String>, inputs: u64, outputs: u64) -> Self {
        LayerSpec {
            name: name.into(),
            ifmap_h: 1,
            ifmap_w: 1,
            filter_h: 1,
            filter_w: 1,
            channels: inputs,
            num_filters: outputs,
            stride: 1,
        }
    }

    fn dims(&self) -> [u64; 7] {
        [
            self.ifmap_h,
            self.ifmap_w,
            self.filter_h,
            self.filter_w,
            self.channels,
            self.num_filters,
            self.stride,
        ]
    }

    pub fn ofmap_h(&self) -> u64 {
        (self.ifmap_h - self.filter_h) / self.stride + 1
    }

    pub fn ofmap_w(&self) -> u64 {
        (self.ifmap_w - self.filter_w) / self.stride + 1
    }

    pub fn mac_ops(&self) -> Result<u64, WorkloadError> {
        Ok(layer_to_gemm(self)?.mac_ops())
    }
}

/// A layer as an `m x k` by `k x n` matrix multiply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GemmShape {
    /// Output pixels per filter.
    pub m: u64,
    /// Filters.
    pub n: u64,
    /// Reduction length.
    pub k: u64,
}

impl GemmShape {
    pub fn new(m: u64, n: u64, k: u64) -> Self {
        GemmShape { m, n, k }
    }

    pub fn mac_ops(&self) -> u64 {
        self.m * self.n * self.k
    }
}

impl fmt::Display for GemmShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.m, self.k, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkloadClass {
    Light,
    Medium,
    Heavy,
    VeryHeavy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkModel {
    pub name: String,
    pub layers: Vec<LayerSpec>,
    pub class: Option<WorkloadClass>,
}

impl NetworkModel {
    pub fn total_mac_ops(&self) -> Result<u64, WorkloadError> {
        self.layers.iter().map(LayerSpec::mac_ops).sum()
    }

    pub fn gemms(&self) -> Result<Vec<GemmShape>, WorkloadError> {
        self.layers.iter().map(layer_to_gemm).collect()
    }

    /// Serializes back to the topology CSV layout, trailing comma included.
    pub fn to_csv_string(&self) -> String {
        let mut out = TOPOLOGY_HEADER.join(",");
        out.push_str(",\n");
        for l in &self.layers {
            out.push_str(&l.name);
            for d in l.dims() {
                out.push(',');
                out.push_str(&d.to_string());
            }
            out.push_str(",\n");
        }
        out
    }
}

/// Lowers a layer to its GEMM shape (no padding, batch size 1).
pub fn layer_to_gemm(layer: &LayerSpec) -> Result<GemmShape, WorkloadError> {
    let shape_err = |message: String| WorkloadError::Shape {
        name: layer.name.clone(),
        message,
    };
    for (value, field) in layer.dims().iter().zip(FIELD_NAMES) {
        if *value == 0 {
            return Err(shape_err(format!("{field} must be ≥ 1")));
        }
    }
    if layer.filter_h > layer.ifmap_h || layer.filter_w > layer.ifmap_w {
        return Err(shape_err(format!(
            "filter {}x{} larger than ifmap {}x{}",
            layer.filter_h, layer.filter_w, layer.ifmap_h, layer.ifmap_w
        )));
    }
    Ok(GemmShape {
        m: layer.ofmap_h() * layer.ofmap_w(),
        n: layer.num_filters,
        k: layer.filter_h * layer.filter_w * layer.channels,
    })
}

/// Reads a topology CSV file. The model is named after the file stem.
pub fn parse_topology_csv(path: impl AsRef<Path>) -> Result<NetworkModel, WorkloadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| WorkloadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "network".to_string());
    parse_topology_str(&name, &text)
}

pub fn parse_topology_str(name: &str, text: &str) -> Result<NetworkModel, WorkloadError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        Some(rec) => rec.map_err(|e| WorkloadError::Parse {
            row: 0,
            message: e.to_string(),
        })?,
        None => return Err(WorkloadError::NoLayers(name.to_string())),
    };
    let found: Vec<&str> = strip_trailing_empty(&header);
    if found != TOPOLOGY_HEADER {
        return Err(WorkloadError::Header {
            expected: TOPOLOGY_HEADER.join(","),
            found: found.join(","),
        });
    }

    let mut layers = Vec::new();
    for (idx, rec) in records.enumerate() {
        let row = idx + 1;
        let rec = rec.map_err(|e| WorkloadError::Parse {
            row,
            message: e.to_string(),
        })?;
        let fields = strip_trailing_empty(&rec);
        if fields.iter().all(|f| f.is_empty()) {
            continue;
        }
        layers.push(parse_row(row, &fields)?);
    }
    if layers.is_empty() {
        return Err(WorkloadError::NoLayers(name.to_string()));
    }
    Ok(NetworkModel {
        name: name.to_string(),
        layers,
        class: None,
    })
}

fn strip_trailing_empty(rec: &csv::StringRecord) -> Vec<&str> {
    let mut fields: Vec<&str> = rec.iter().collect();
    if fields.len() > TOPOLOGY_HEADER.len() && fields.last() == Some(&"") {
        fields.pop();
    }
    fields
}

fn parse_row(row: usize, fields: &[&str]) -> Result<LayerSpec, WorkloadError> {
    let err = |message: String| WorkloadError::Parse { row, message };
    if fields.len() != TOPOLOGY_HEADER.len() {
        return Err(err(format!(
            "expected {} columns, found {}",
            TOPOLOGY_HEADER.len(),
            fields.len()
        )));
    }
    let name = fields[0].to_string();
    if name.is_empty() {
        return Err(err("empty layer name".to_string()));
    }
    let kind: String = name
        .chars()
        .take_while(char::is_ascii_alphabetic)
        .collect::<String>()
        .to_ascii_lowercase();
    if NON_COMPUTE_MARKERS.contains(&kind.as_str()) {
        return Err(err(format!(
            "non-compute layer `{name}` is not supported; list conv/fc layers only"
        )));
    }

    let mut dims = [0u64; 7];
    for (i, (raw, field)) in fields[1..].iter().zip(FIELD_NAMES).enumerate() {
        let value: i64 = raw
            .parse()
            .map_err(|_| err(format!("{field} is not an integer: `{raw}`")))?;
        if value < 1 {
            return Err(err(format!("{field} must be ≥ 1")));
        }
        dims[i] = value as u64;
    }
    let layer = LayerSpec {
        name,
        ifmap_h: dims[0],
        ifmap_w: dims[1],
        filter_h: dims[2],
        filter_w: dims[3],
        channels: dims[4],
        num_filters: dims[5],
        stride: dims[6],
    };
    layer_to_gemm(&layer).map_err(|e| err(e.to_string()))?;
    Ok(layer)
}

const BUNDLED: [(&str, &str, WorkloadClass); 4] = [
    (
        "face_recognition",
        include_str!("../../../data/topologies/face_recognition.csv"),
        WorkloadClass::Light,
    ),
    (
        "deepspeech",
        include_str!("../../../data/topologies/deepspeech.csv"),
        WorkloadClass::Medium,
    ),
    (
        "resnet50",
        include_str!("../../../data/topologies/resnet50.csv"),
        WorkloadClass::Heavy,
    ),
    (
        "alexnet",
        include_str!("../../../data/topologies/alexnet.csv"),
        WorkloadClass::VeryHeavy,
    ),
];

/// The four reference workloads shipped under `data/topologies`.
pub fn bundled_networks() -> Vec<NetworkModel> {
    BUNDLED
        .iter()
        .map(|(name, text, class)| {
            let mut net = parse_topology_str(name, text).expect("bundled topology is valid");
            net.class = Some(*class);
            net
        })
        .collect()
}
