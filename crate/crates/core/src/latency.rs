//! Roofline latency and throughput under a parameterized device model.
//!
//! Every leaf block is a sequential op costing a fixed dispatch overhead
//! plus the larger of its compute time and its memory time. `Repeat`
//! bodies run back to back; `Parallel` branches overlap, so only the
//! slowest one counts.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::archspec::ArchSpec;
use crate::cost_tree::{CostNode, CostTree, LeafCost};
use crate::error::IndicatorError;
use crate::indicators::leaf_access_bytes;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatencyError {
    #[error(transparent)]
    Indicator(#[from] IndicatorError),
    #[error("invalid hardware model: {0}")]
    Hardware(String),
    #[error("invalid pipeline bubble: {0}")]
    Bubble(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct HardwareModel {
    pub name: String,
    pub peak_flops_per_sec: f64,
    pub mem_bandwidth_bytes_per_sec: f64,
    /// Fixed cost per sequential op dispatch, in seconds.
    pub per_op_overhead_sec: f64,
    #[serde(default = "one")]
    pub num_devices: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length_pad_multiple: Option<u64>,
}

fn one() -> u64 {
    1
}

impl HardwareModel {
    /// Peak 100 TFLOP/s, 900 GB/s, 5 µs per op, one device.
    pub fn default_preset() -> Self {
        Self {
            name: "default".into(),
            peak_flops_per_sec: 100e12,
            mem_bandwidth_bytes_per_sec: 900e9,
            per_op_overhead_sec: 5e-6,
            num_devices: 1,
            length_pad_multiple: None,
        }
    }

    /// Matrix-unit accelerator that pads sequence lengths to multiples of 128.
    pub fn tpu_like() -> Self {
        Self {
            name: "tpu_like".into(),
            peak_flops_per_sec: 123e12,
            mem_bandwidth_bytes_per_sec: 900e9,
            per_op_overhead_sec: 10e-6,
            num_devices: 1,
            length_pad_multiple: Some(128),
        }
    }

    pub fn gpu_like() -> Self {
        Self {
            name: "gpu_like".into(),
            peak_flops_per_sec: 312e12,
            mem_bandwidth_bytes_per_sec: 1.555e12,
            per_op_overhead_sec: 4e-6,
            num_devices: 1,
            length_pad_multiple: None,
        }
    }

    pub fn cpu_like() -> Self {
        Self {
            name: "cpu_like".into(),
            peak_flops_per_sec: 2e12,
            mem_bandwidth_bytes_per_sec: 80e9,
            per_op_overhead_sec: 1e-6,
            num_devices: 1,
            length_pad_multiple: None,
        }
    }

    pub fn presets() -> Vec<HardwareModel> {
        vec![
            Self::default_preset(),
            Self::tpu_like(),
            Self::gpu_like(),
            Self::cpu_like(),
        ]
    }

    pub fn preset(name: &str) -> Option<HardwareModel> {
        Self::presets().into_iter().find(|h| h.name == name)
    }

    /// Rates must be positive (bandwidth may be infinite); overhead may be zero.
    pub fn check(&self) -> Result<(), LatencyError> {
        let bad = |msg: &str| Err(LatencyError::Hardware(format!("{}: {msg}", self.name)));
        if !(self.peak_flops_per_sec.is_finite() && self.peak_flops_per_sec > 0.0) {
            return bad("peak_flops_per_sec must be a positive finite rate");
        }
        if self.mem_bandwidth_bytes_per_sec.is_nan() || self.mem_bandwidth_bytes_per_sec <= 0.0 {
            return bad("mem_bandwidth_bytes_per_sec must be positive");
        }
        if !(self.per_op_overhead_sec.is_finite() && self.per_op_overhead_sec >= 0.0) {
            return bad("per_op_overhead_sec must be a non-negative duration");
        }
        if self.num_devices == 0 {
            return bad("num_devices must be at least 1");
        }
        if self.length_pad_multiple == Some(0) {
            return bad("length_pad_multiple must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Compute,
    Memory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerTime {
    pub path: String,
    pub kind: String,
    pub executions: u64,
    /// Time of one execution, overhead included.
    pub seconds_each: f64,
    pub bound: Bound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedEstimate {
    pub batch: u64,
    pub latency_sec: f64,
    pub throughput_examples_per_sec: f64,
    pub per_layer: Vec<LayerTime>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pipeline_bubble_fraction: Option<f64>,
}

/// Idle setup time paid once per `steady_batches` batches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct PipelineBubble {
    pub setup_sec: f64,
    pub steady_batches: u64,
}

struct Timer<'a> {
    hw: &'a HardwareModel,
    batch: u64,
    element_bytes: u64,
    per_layer: Vec<LayerTime>,
}

impl Timer<'_> {
    fn leaf(&mut self, leaf: &LeafCost, runs: u64) -> Result<f64, IndicatorError> {
        let flops = leaf.flops()?.checked_mul(self.batch).ok_or(IndicatorError::Overflow)?;
        let bytes = leaf_access_bytes(leaf, self.batch, self.element_bytes)?;
        let compute = flops as f64 / (self.hw.peak_flops_per_sec * self.hw.num_devices as f64);
        let memory = bytes as f64 / self.hw.mem_bandwidth_bytes_per_sec;
        let (time, bound) = if compute >= memory {
            (compute, Bound::Compute)
        } else {
            (memory, Bound::Memory)
        };
        let seconds_each = self.hw.per_op_overhead_sec + time;
        self.per_layer.push(LayerTime {
            path: leaf.path.clone(),
            kind: leaf.kind.to_string(),
            executions: runs,
            seconds_each,
            bound,
        });
        Ok(seconds_each)
    }

    fn sequence(&mut self, nodes: &[CostNode], runs: u64) -> Result<f64, IndicatorError> {
        let mut total = 0.0;
        for node in nodes {
            total += match node {
                CostNode::Leaf(c) => self.leaf(c, runs)?,
                CostNode::Repeat { body, times, .. } => {
                    let runs = runs.checked_mul(*times).ok_or(IndicatorError::Overflow)?;
                    *times as f64 * self.sequence(body, runs)?
                }
                CostNode::Parallel { branches, merge } => {
                    let mut slowest: f64 = 0.0;
                    for b in branches {
                        slowest = slowest.max(self.sequence(b, runs)?);
                    }
                    match merge {
                        Some(m) => slowest + self.leaf(m, runs)?,
                        None => slowest,
                    }
                }
            };
        }
        Ok(total)
    }
}

/// Forward latency of one batch.
pub fn estimate_latency(
    spec: &ArchSpec,
    hw: &HardwareModel,
    batch: u64,
) -> Result<SpeedEstimate, LatencyError> {
    hw.check()?;
    if batch == 0 {
        return Err(IndicatorError::InvalidBatch.into());
    }
    let tree = CostTree::build(spec, hw.length_pad_multiple)?;
    let mut timer = Timer {
        hw,
        batch,
        element_bytes: tree.element_bytes,
        per_layer: Vec::new(),
    };
    let latency_sec = timer.sequence(&tree.nodes, 1)?;
    Ok(SpeedEstimate {
        batch,
        latency_sec,
        throughput_examples_per_sec: batch as f64 / latency_sec,
        per_layer: timer.per_layer,
        pipeline_bubble_fraction: None,
    })
}

/// Throughput with an optional pipeline bubble: effective throughput is
/// scaled by `steady·latency / (setup + steady·latency)`.
pub fn estimate_throughput(
    spec: &ArchSpec,
    hw: &HardwareModel,
    batch: u64,
    bubble: Option<PipelineBubble>,
) -> Result<SpeedEstimate, LatencyError> {
    let mut est = estimate_latency(spec, hw, batch)?;
    if let Some(b) = bubble {
        apply_bubble(&mut est, b)?;
    }
    Ok(est)
}

pub fn apply_bubble(est: &mut SpeedEstimate, bubble: PipelineBubble) -> Result<(), LatencyError> {
    if !(bubble.setup_sec.is_finite() && bubble.setup_sec >= 0.0) {
        return Err(LatencyError::Bubble("setup_sec must be a non-negative duration".into()));
    }
    if bubble.steady_batches == 0 {
        return Err(LatencyError::Bubble("steady_batches must be at least 1".into()));
    }
    let busy = bubble.steady_batches as f64 * est.latency_sec;
    let scale = busy / (bubble.setup_sec + busy);
    est.throughput_examples_per_sec = est.batch as f64 / est.latency_sec * scale;
    est.pipeline_bubble_fraction = Some(1.0 - scale);
    Ok(())
}
