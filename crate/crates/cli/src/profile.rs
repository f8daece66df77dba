use std::collections::BTreeMap;

use costlens_core::analysis::{Indicator, ModelRecord};
use costlens_core::archspec::ArchSpec;
use costlens_core::footprint::{carbon_footprint, monetary_cost, EnergyProfile, PricingProfile};
use costlens_core::indicators::{
    activation_size, count_flops, count_params, inference_memory, memory_access_cost,
    training_memory, MemoryEstimate, OptimizerKind,
};
use costlens_core::latency::{estimate_latency, HardwareModel};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Every indicator computed for one architecture under one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostProfile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quality: Option<f64>,
    pub batch: u64,
    pub optimizer: OptimizerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hardware: Option<String>,
    pub params: u64,
    pub trainable_params: u64,
    pub shared_param_savings: u64,
    /// Per batch, FMA = 2.
    pub flops: u64,
    pub macs: u64,
    pub gflops_per_example: f64,
    pub gmacs_per_example: f64,
    pub activation_elements: u64,
    pub memory_access_bytes: u64,
    pub training_memory: MemoryEstimate,
    pub inference_memory: MemoryEstimate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latency_sec: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub throughput_examples_per_sec: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carbon_kg_co2e: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monetary_cost: Option<f64>,
}

/// Everything a profile run needs beyond the architecture itself.
#[derive(Debug, Clone, Default)]
pub struct ProfileInputs {
    pub family: Option<String>,
    pub quality: Option<f64>,
    pub batch: u64,
    pub optimizer: Option<OptimizerKind>,
    pub hardware: Option<HardwareModel>,
    pub energy: Option<EnergyProfile>,
    pub pricing: Option<PricingProfile>,
}

pub fn profile(spec: &ArchSpec, inputs: &ProfileInputs) -> Result<CostProfile, CliError> {
    let batch = inputs.batch;
    let optimizer = inputs.optimizer.unwrap_or(OptimizerKind::AdamLike);
    let params = count_params(spec)?;
    let flops = count_flops(spec, batch)?;
    let speed = inputs
        .hardware
        .as_ref()
        .map(|hw| estimate_latency(spec, hw, batch))
        .transpose()?;
    Ok(CostProfile {
        name: spec.name.clone(),
        family: inputs.family.clone(),
        quality: inputs.quality,
        batch,
        optimizer,
        hardware: inputs.hardware.as_ref().map(|h| h.name.clone()),
        params: params.total,
        trainable_params: params.trainable,
        shared_param_savings: params.shared_savings,
        flops: flops.flops,
        macs: flops.macs,
        gflops_per_example: flops.flops as f64 / batch as f64 / 1e9,
        gmacs_per_example: flops.macs as f64 / batch as f64 / 1e9,
        activation_elements: activation_size(spec, batch)?,
        memory_access_bytes: memory_access_cost(spec, batch)?,
        training_memory: training_memory(spec, batch, optimizer)?,
        inference_memory: inference_memory(spec, batch)?,
        latency_sec: speed.as_ref().map(|s| s.latency_sec),
        throughput_examples_per_sec: speed.as_ref().map(|s| s.throughput_examples_per_sec),
        carbon_kg_co2e: inputs.energy.as_ref().map(carbon_footprint).transpose()?,
        monetary_cost: inputs.pricing.as_ref().map(monetary_cost).transpose()?,
    })
}

impl CostProfile {
    /// Indicator values in the units the analysis layer compares.
    pub fn indicators(&self) -> BTreeMap<Indicator, f64> {
        let mut out = BTreeMap::from([
            (Indicator::Params, self.params as f64),
            (Indicator::Flops, self.flops as f64),
            (Indicator::Activation, self.activation_elements as f64),
            (Indicator::Mac, self.memory_access_bytes as f64),
            (
                Indicator::Memory,
                self.training_memory
                    .peak_training_bytes
                    .unwrap_or(self.training_memory.peak_inference_bytes) as f64,
            ),
        ]);
        let optional = [
            (Indicator::Latency, self.latency_sec),
            (Indicator::Throughput, self.throughput_examples_per_sec),
            (Indicator::Carbon, self.carbon_kg_co2e),
            (Indicator::Cost, self.monetary_cost),
        ];
        out.extend(optional.into_iter().filter_map(|(i, v)| Some((i, v?))));
        out
    }

    /// Quality defaults to 0 when the spec file does not report one.
    pub fn to_record(&self) -> Result<ModelRecord, CliError> {
        Ok(ModelRecord::new(
            self.name.clone(),
            self.family.clone(),
            self.quality.unwrap_or(0.0),
            self.indicators(),
        )?)
    }
}
