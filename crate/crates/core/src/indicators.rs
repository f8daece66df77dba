//! Analytical cost indicators: parameters, FLOPs, activations, memory
//! access cost and memory footprints.
//!
//! Conventions: one fused multiply-add is 2 FLOPs; `macs` counts the
//! multiply-accumulates of matmuls only. Elementwise work (softmax,
//! layernorm, GELU, bias and residual adds) is added to `flops` with the
//! constants in [`crate::cost_tree`].

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::archspec::ArchSpec;
use crate::cost_tree::{add, fold_work, mul, params_total, CostNode, CostTree};
use crate::error::IndicatorError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerCount {
    pub path: String,
    pub kind: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamCount {
    pub total: u64,
    pub trainable: u64,
    pub by_layer: Vec<LayerCount>,
    /// Parameters avoided because repeated bodies share one copy.
    pub shared_savings: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlopCount {
    pub flops: u64,
    pub macs: u64,
    pub elementwise: u64,
    pub by_layer: Vec<LayerCount>,
}

impl FlopCount {
    pub fn gflops(&self) -> f64 {
        self.flops as f64 / 1e9
    }

    pub fn gmacs(&self) -> f64 {
        self.macs as f64 / 1e9
    }

    /// Backward pass modeled as twice the forward pass.
    pub fn backward_flops(&self) -> Option<u64> {
        self.flops.checked_mul(2)
    }

    /// Forward plus backward.
    pub fn training_step_flops(&self) -> Option<u64> {
        self.flops.checked_mul(3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Sgd,
    Momentum,
    AdamLike,
    SamLike,
}

impl OptimizerKind {
    /// Persistent optimizer state, in units of the parameter bytes.
    pub fn state_multiplier(self) -> u64 {
        match self {
            OptimizerKind::Sgd => 0,
            OptimizerKind::Momentum => 1,
            OptimizerKind::AdamLike => 2,
            OptimizerKind::SamLike => 1,
        }
    }

    /// Gradient copies held during a step.
    pub fn gradient_copies(self) -> u64 {
        match self {
            OptimizerKind::SamLike => 2,
            _ => 1,
        }
    }
}

impl std::str::FromStr for OptimizerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "sgd" => Ok(OptimizerKind::Sgd),
            "momentum" => Ok(OptimizerKind::Momentum),
            "adam" | "adam_like" | "adamw" => Ok(OptimizerKind::AdamLike),
            "sam" | "sam_like" => Ok(OptimizerKind::SamLike),
            other => Err(format!("unknown optimizer '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryEstimate {
    pub parameter_bytes: u64,
    pub gradient_bytes: u64,
    pub optimizer_state_bytes: u64,
    /// Training: every block output kept for the backward pass.
    /// Inference: the largest single-layer working set.
    pub activation_bytes: u64,
    /// Sum of the four fields above; `None` for inference estimates.
    pub peak_training_bytes: Option<u64>,
    pub peak_inference_bytes: u64,
}

fn check_batch(batch: u64) -> Result<(), IndicatorError> {
    if batch == 0 {
        Err(IndicatorError::InvalidBatch)
    } else {
        Ok(())
    }
}

pub fn count_params(spec: &ArchSpec) -> Result<ParamCount, IndicatorError> {
    let tree = CostTree::build(spec, None)?;
    param_count_of(&tree)
}

pub(crate) fn param_count_of(tree: &CostTree) -> Result<ParamCount, IndicatorError> {
    let total = params_total(&tree.nodes)?;
    let mut unshared = 0u64;
    let mut by_layer = Vec::new();
    tree.for_each_leaf(|leaf, runs, copies| {
        unshared = add(unshared, mul(leaf.params, runs)?)?;
        if leaf.params > 0 {
            by_layer.push(LayerCount {
                path: leaf.path.clone(),
                kind: leaf.kind.to_string(),
                count: mul(leaf.params, copies)?,
            });
        }
        Ok(())
    })?;
    Ok(ParamCount {
        total,
        trainable: total,
        by_layer,
        shared_savings: unshared - total,
    })
}

pub fn count_flops(spec: &ArchSpec, batch: u64) -> Result<FlopCount, IndicatorError> {
    check_batch(batch)?;
    let tree = CostTree::build(spec, None)?;
    flop_count_of(&tree, batch)
}

pub(crate) fn flop_count_of(tree: &CostTree, batch: u64) -> Result<FlopCount, IndicatorError> {
    let macs = mul(fold_work(&tree.nodes, |c| Ok(c.macs))?, batch)?;
    let elementwise = mul(fold_work(&tree.nodes, |c| Ok(c.elementwise))?, batch)?;
    let flops = add(mul(macs, 2)?, elementwise)?;
    let mut by_layer = Vec::new();
    tree.for_each_leaf(|leaf, runs, _| {
        by_layer.push(LayerCount {
            path: leaf.path.clone(),
            kind: leaf.kind.to_string(),
            count: mul(mul(leaf.flops()?, runs)?, batch)?,
        });
        Ok(())
    })?;
    Ok(FlopCount {
        flops,
        macs,
        elementwise,
        by_layer,
    })
}

/// Number of elements in all block outputs for `batch` examples.
pub fn activation_size(spec: &ArchSpec, batch: u64) -> Result<u64, IndicatorError> {
    check_batch(batch)?;
    let tree = CostTree::build(spec, None)?;
    activation_of(&tree, batch)
}

pub(crate) fn activation_of(tree: &CostTree, batch: u64) -> Result<u64, IndicatorError> {
    mul(fold_work(&tree.nodes, |c| Ok(c.output_elems))?, batch)
}

/// Bytes moved for one execution of a leaf over a batch.
pub(crate) fn leaf_access_bytes(
    leaf: &crate::cost_tree::LeafCost,
    batch: u64,
    element_bytes: u64,
) -> Result<u64, IndicatorError> {
    let params = mul(leaf.params_read, element_bytes)?;
    let acts = mul(mul(add(leaf.input_elems, leaf.output_elems)?, batch)?, element_bytes)?;
    add(params, acts)
}

/// Total memory traffic in bytes. Parameters are read once per batch per
/// execution, so shared parameters are re-read on every repeat.
pub fn memory_access_cost(spec: &ArchSpec, batch: u64) -> Result<u64, IndicatorError> {
    check_batch(batch)?;
    let tree = CostTree::build(spec, None)?;
    access_cost_of(&tree, batch)
}

pub(crate) fn access_cost_of(tree: &CostTree, batch: u64) -> Result<u64, IndicatorError> {
    let eb = tree.element_bytes;
    fold_work(&tree.nodes, |c| leaf_access_bytes(c, batch, eb))
}

fn working_set_elems(nodes: &[CostNode]) -> u64 {
    let mut best = 0;
    for node in nodes {
        let w = match node {
            CostNode::Leaf(c) => c.input_elems.max(c.output_elems),
            CostNode::Repeat { body, .. } => working_set_elems(body),
            CostNode::Parallel { branches, merge } => branches
                .iter()
                .map(|b| working_set_elems(b))
                .chain(merge.iter().map(|m| m.input_elems.max(m.output_elems)))
                .max()
                .unwrap_or(0),
        };
        best = best.max(w);
    }
    best
}

pub fn training_memory(
    spec: &ArchSpec,
    batch: u64,
    optimizer: OptimizerKind,
) -> Result<MemoryEstimate, IndicatorError> {
    check_batch(batch)?;
    let tree = CostTree::build(spec, None)?;
    let eb = tree.element_bytes;
    let parameter_bytes = mul(params_total(&tree.nodes)?, eb)?;
    let gradient_bytes = mul(parameter_bytes, optimizer.gradient_copies())?;
    let optimizer_state_bytes = mul(parameter_bytes, optimizer.state_multiplier())?;
    let activation_bytes = mul(activation_of(&tree, batch)?, eb)?;
    let peak = [gradient_bytes, optimizer_state_bytes, activation_bytes]
        .iter()
        .try_fold(parameter_bytes, |acc, &v| add(acc, v))?;
    let working = mul(mul(working_set_elems(&tree.nodes), batch)?, eb)?;
    Ok(MemoryEstimate {
        parameter_bytes,
        gradient_bytes,
        optimizer_state_bytes,
        activation_bytes,
        peak_training_bytes: Some(peak),
        peak_inference_bytes: add(parameter_bytes, working)?,
    })
}

pub fn inference_memory(spec: &ArchSpec, batch: u64) -> Result<MemoryEstimate, IndicatorError> {
    check_batch(batch)?;
    let tree = CostTree::build(spec, None)?;
    let eb = tree.element_bytes;
    let parameter_bytes = mul(params_total(&tree.nodes)?, eb)?;
    let activation_bytes = mul(mul(working_set_elems(&tree.nodes), batch)?, eb)?;
    Ok(MemoryEstimate {
        parameter_bytes,
        gradient_bytes: 0,
        optimizer_state_bytes: 0,
        activation_bytes,
        peak_training_bytes: None,
        peak_inference_bytes: add(parameter_bytes, activation_bytes)?,
    })
}
