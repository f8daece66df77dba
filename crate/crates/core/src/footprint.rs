//! Carbon footprint and monetary cost estimators.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{field} must be a finite, non-negative number (got {value})")]
pub struct FootprintError {
    pub field: &'static str,
    pub value: f64,
}

fn non_negative(field: &'static str, value: f64) -> Result<(), FootprintError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(FootprintError { field, value })
    }
}

/// Energy inputs in kWh, grid intensity in kg CO2e per kWh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct EnergyProfile {
    pub ee_train: f64,
    pub ee_inference: f64,
    pub queries: f64,
    pub co2e_per_kwh: f64,
}

impl EnergyProfile {
    pub fn check(&self) -> Result<(), FootprintError> {
        non_negative("ee_train", self.ee_train)?;
        non_negative("ee_inference", self.ee_inference)?;
        non_negative("queries", self.queries)?;
        non_negative("co2e_per_kwh", self.co2e_per_kwh)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct PricingProfile {
    pub total_train_time: f64,
    pub num_chips: f64,
    pub price_per_chip_hour: f64,
}

impl PricingProfile {
    pub fn check(&self) -> Result<(), FootprintError> {
        non_negative("total_train_time", self.total_train_time)?;
        non_negative("num_chips", self.num_chips)?;
        non_negative("price_per_chip_hour", self.price_per_chip_hour)
    }
}

/// kg CO2e = (ee_train + queries × ee_inference) × co2e_per_kwh
pub fn carbon_footprint(e: &EnergyProfile) -> Result<f64, FootprintError> {
    e.check()?;
    Ok((e.ee_train + e.queries * e.ee_inference) * e.co2e_per_kwh)
}

/// train hours × chips × price per chip-hour
pub fn monetary_cost(p: &PricingProfile) -> Result<f64, FootprintError> {
    p.check()?;
    Ok(p.total_train_time * p.num_chips * p.price_per_chip_hour)
}

/// Training energy estimate in kWh from average device power draw.
/// This is a rough bridge when measured energy is unavailable.
pub fn training_energy_kwh(
    device_power_watts: f64,
    wall_clock_hours: f64,
    num_devices: f64,
) -> Result<f64, FootprintError> {
    non_negative("device_power_watts", device_power_watts)?;
    non_negative("wall_clock_hours", wall_clock_hours)?;
    non_negative("num_devices", num_devices)?;
    Ok(device_power_watts * wall_clock_hours * num_devices / 1000.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn carbon_examples() {
        let train_only = EnergyProfile {
            ee_train: 100.0,
            ee_inference: 0.0,
            queries: 0.0,
            co2e_per_kwh: 0.5,
        };
        assert_eq!(carbon_footprint(&train_only), Ok(50.0));
        let serving = EnergyProfile {
            ee_train: 0.0,
            ee_inference: 0.001,
            queries: 1e6,
            co2e_per_kwh: 0.4,
        };
        assert!((carbon_footprint(&serving).unwrap() - 400.0).abs() < 1e-9);
        let zero = EnergyProfile {
            ee_train: 0.0,
            ee_inference: 0.0,
            queries: 0.0,
            co2e_per_kwh: 0.0,
        };
        assert_eq!(carbon_footprint(&zero), Ok(0.0));
    }

    #[test]
    fn monetary_examples() {
        let p = |t, c, r| PricingProfile {
            total_train_time: t,
            num_chips: c,
            price_per_chip_hour: r,
        };
        assert_eq!(monetary_cost(&p(100.0, 64.0, 2.0)), Ok(12_800.0));
        assert_eq!(monetary_cost(&p(0.0, 64.0, 2.0)), Ok(0.0));
        assert_eq!(monetary_cost(&p(1.0, 1.0, 1.0)), Ok(1.0));
    }

    #[test]
    fn negative_inputs_are_rejected() {
        let e = EnergyProfile {
            ee_train: -1.0,
            ee_inference: 0.0,
            queries: 0.0,
            co2e_per_kwh: 0.4,
        };
        assert_eq!(carbon_footprint(&e).unwrap_err().field, "ee_train");
        let p = PricingProfile {
            total_train_time: 1.0,
            num_chips: f64::NAN,
            price_per_chip_hour: 1.0,
        };
        assert_eq!(monetary_cost(&p).unwrap_err().field, "num_chips");
    }

    #[test]
    fn energy_helper() {
        assert_eq!(training_energy_kwh(250.0, 10.0, 8.0), Ok(20.0));
    }
}
