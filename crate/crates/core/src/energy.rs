//! Linear energy model: per-MAC and per-SRAM-access dynamic energy plus
//! static power for every powered PE.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrangement::NetworkStats;

pub const RECONFIGURABLE_CLOCK_HZ: f64 = 800e6;
pub const FIXED_WIRING_CLOCK_HZ: f64 = 826e6;

pub const DEFAULT_TECH_FILE: &str = include_str!("../../../data/tech/default.tech");

const KEYS: [&str; 5] = [
    "clock_hz",
    "e_mac",
    "e_sram_read",
    "e_sram_write",
    "p_static_pe",
];

#[derive(Debug, Error, PartialEq)]
pub enum EnergyError {
    #[error("cannot read tech file {path}: {message}")]
    Io { path: String, message: String },
    #[error("tech file line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("tech param {0} missing")]
    Missing(&'static str),
    #[error("tech param {key} must be a positive finite number, got {value}")]
    NonPositive { key: String, value: f64 },
    #[error("{cycles} cycles for {mac_ops} MACs: execution time must be positive")]
    Inconsistent { cycles: u64, mac_ops: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TechParams {
    pub clock_hz: f64,
    /// Joules per 8-bit MAC.
    pub e_mac: f64,
    /// Joules per SRAM read.
    pub e_sram_read: f64,
    /// Joules per SRAM write.
    pub e_sram_write: f64,
    /// Watts per powered PE.
    pub p_static_pe: f64,
}

impl Default for TechParams {
    fn default() -> Self {
        DEFAULT_TECH_FILE
            .parse()
            .expect("bundled tech file is valid")
    }
}

impl TechParams {
    pub fn validate(&self) -> Result<(), EnergyError> {
        for (key, value) in KEYS.iter().zip(self.values()) {
            if !(value.is_finite() && value > 0.0) {
                return Err(EnergyError::NonPositive {
                    key: key.to_string(),
                    value,
                });
            }
        }
        Ok(())
    }

    fn values(&self) -> [f64; 5] {
        [
            self.clock_hz,
            self.e_mac,
            self.e_sram_read,
            self.e_sram_write,
            self.p_static_pe,
        ]
    }

    pub fn with_clock(self, clock_hz: f64) -> Self {
        TechParams { clock_hz, ..self }
    }

    /// Multiplies every energy and power coefficient, leaving the clock.
    pub fn scaled(self, factor: f64) -> Self {
        TechParams {
            clock_hz: self.clock_hz,
            e_mac: self.e_mac * factor,
            e_sram_read: self.e_sram_read * factor,
            e_sram_write: self.e_sram_write * factor,
            p_static_pe: self.p_static_pe * factor,
        }
    }
}

impl FromStr for TechParams {
    type Err = EnergyError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut seen: BTreeMap<&str, f64> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let syntax = |message: String| EnergyError::Syntax { line, message };
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| syntax(format!("expected key=value, got `{content}`")))?;
            let key = key.trim();
            let value = value.trim();
            let key = *KEYS
                .iter()
                .find(|k| **k == key)
                .ok_or_else(|| syntax(format!("unknown key `{key}`")))?;
            let number: f64 = value
                .parse()
                .map_err(|_| syntax(format!("{key}: malformed number `{value}`")))?;
            if seen.insert(key, number).is_some() {
                return Err(syntax(format!("duplicate key `{key}`")));
            }
        }
        let get = |k: &'static str| seen.get(k).copied().ok_or(EnergyError::Missing(k));
        let params = TechParams {
            clock_hz: get("clock_hz")?,
            e_mac: get("e_mac")?,
            e_sram_read: get("e_sram_read")?,
            e_sram_write: get("e_sram_write")?,
            p_static_pe: get("p_static_pe")?,
        };
        params.validate()?;
        Ok(params)
    }
}

pub fn load_tech_params(path: impl AsRef<Path>) -> Result<TechParams, EnergyError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| EnergyError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    text.parse()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// Seconds.
    pub exec_time: f64,
    /// Joules.
    pub energy: f64,
    /// Watts, averaged over the run.
    pub avg_power: f64,
    /// Joule-seconds.
    pub edp: f64,
}

/// Raw counts an energy report is computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Activity {
    pub cycles: u64,
    pub mac_ops: u64,
    pub sram_reads: u64,
    pub sram_writes: u64,
    pub active_pes: u64,
}

impl From<&NetworkStats> for Activity {
    fn from(s: &NetworkStats) -> Self {
        Activity {
            cycles: s.total_cycles,
            mac_ops: s.total_mac_ops,
            sram_reads: s.sram_reads,
            sram_writes: s.sram_writes,
            active_pes: s.active_pes,
        }
    }
}

pub fn activity_energy(act: Activity, tech: &TechParams) -> Result<EnergyReport, EnergyError> {
    if act.cycles == 0 {
        return Err(EnergyError::Inconsistent {
            cycles: act.cycles,
            mac_ops: act.mac_ops,
        });
    }
    let exec_time = act.cycles as f64 / tech.clock_hz;
    let dynamic = tech.e_mac * act.mac_ops as f64
        + tech.e_sram_read * act.sram_reads as f64
        + tech.e_sram_write * act.sram_writes as f64;
    let energy = dynamic + tech.p_static_pe * act.active_pes as f64 * exec_time;
    Ok(EnergyReport {
        exec_time,
        energy,
        avg_power: energy / exec_time,
        edp: energy * exec_time,
    })
}

pub fn energy_report(stats: &NetworkStats, tech: &TechParams) -> Result<EnergyReport, EnergyError> {
    activity_energy(stats.into(), tech)
}
