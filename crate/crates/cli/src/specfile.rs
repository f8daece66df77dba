//! Versioned JSON spec files and hardware preset resolution.

use std::path::{Path, PathBuf};

use costlens_core::archlib::{
    build_lm, build_moe_transformer, build_universal_transformer, build_vit, LmConfig, VitConfig,
};
use costlens_core::archspec::{validate, ArchSpec};
use costlens_core::footprint::{EnergyProfile, PricingProfile};
use costlens_core::indicators::OptimizerKind;
use costlens_core::latency::HardwareModel;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Directory searched for `<name>.json` hardware presets before the
/// built-in ones.
pub const HW_DIR_ENV: &str = "COSTLENS_HW_DIR";

/// A named builder and its arguments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum BuilderRef {
    Vit {
        config: VitConfig,
    },
    /// One shared block applied `steps` times.
    Ut {
        config: VitConfig,
        steps: u64,
    },
    Moe {
        config: VitConfig,
        num_experts: u64,
        experts_per_token: u64,
        moe_every: u64,
    },
    Lm {
        config: LmConfig,
    },
}

impl BuilderRef {
    pub fn build(&self) -> Result<ArchSpec, CliError> {
        Ok(match self {
            BuilderRef::Vit { config } => build_vit(config)?,
            BuilderRef::Ut { config, steps } => build_universal_transformer(config, *steps)?,
            BuilderRef::Moe {
                config,
                num_experts,
                experts_per_token,
                moe_every,
            } => build_moe_transformer(config, *num_experts, *experts_per_token, *moe_every)?,
            BuilderRef::Lm { config } => build_lm(config)?,
        })
    }
}

/// A preset name or a full inline model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(untagged)]
pub enum HardwareRef {
    Preset(String),
    Inline(HardwareModel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arch: Option<ArchSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builder: Option<BuilderRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hardware: Option<HardwareRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pricing: Option<PricingProfile>,
    /// Reported quality, carried into records for compare and pareto.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quality: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
}

impl SpecFile {
    pub fn inline(arch: ArchSpec) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            arch: Some(arch),
            builder: None,
            hardware: None,
            batch: None,
            optimizer: None,
            energy: None,
            pricing: None,
            quality: None,
            family: None,
        }
    }

    pub fn parse(source: &str, text: &str) -> Result<Self, CliError> {
        let file: SpecFile =
            serde_json::from_str(text).map_err(|e| CliError::json(source, text, e))?;
        let schema = |message: String| CliError::Schema {
            path: source.to_string(),
            message,
        };
        if file.schema_version != SCHEMA_VERSION {
            return Err(schema(format!(
                "unsupported schema_version {} (supported: {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        match (&file.arch, &file.builder) {
            (Some(_), None) | (None, Some(_)) => Ok(file),
            _ => Err(schema("exactly one of 'arch' or 'builder' is required".into())),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&path.display().to_string(), &text)
    }

    /// The architecture, built if needed, checked by the validator.
    pub fn architecture(&self, source: &str) -> Result<ArchSpec, CliError> {
        let arch = match (&self.arch, &self.builder) {
            (Some(a), _) => a.clone(),
            (None, Some(b)) => b.build()?,
            (None, None) => unreachable!("checked at parse time"),
        };
        let result = validate(&arch);
        if !result.is_ok() {
            return Err(CliError::Invalid {
                path: source.to_string(),
                violations: result.violations.iter().map(|v| v.to_string()).collect(),
            });
        }
        Ok(arch)
    }
}

/// On-disk hardware preset: the model plus a free-form note on its origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct HardwareFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub hardware: HardwareModel,
}

fn load_hardware_file(path: &Path) -> Result<HardwareModel, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let source = path.display().to_string();
    let file: HardwareFile =
        serde_json::from_str(&text).map_err(|e| CliError::json(&source, &text, e))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(CliError::Schema {
            path: source,
            message: format!("unsupported schema_version {}", file.schema_version),
        });
    }
    file.hardware.check()?;
    Ok(file.hardware)
}

/// Resolves `name` as a file path, then `$COSTLENS_HW_DIR/<name>.json`,
/// then a built-in preset.
pub fn resolve_hardware(name: &str) -> Result<HardwareModel, CliError> {
    let as_path = Path::new(name);
    if name.ends_with(".json") && as_path.is_file() {
        return load_hardware_file(as_path);
    }
    if let Some(dir) = std::env::var_os(HW_DIR_ENV) {
        let candidate: PathBuf = Path::new(&dir).join(format!("{name}.json"));
        if candidate.is_file() {
            return load_hardware_file(&candidate);
        }
    }
    HardwareModel::preset(name).ok_or_else(|| {
        let known: Vec<String> = HardwareModel::presets().into_iter().map(|h| h.name).collect();
        CliError::Input(format!(
            "unknown hardware '{name}' (built-in presets: {})",
            known.join(", ")
        ))
    })
}

impl HardwareRef {
    pub fn resolve(&self) -> Result<HardwareModel, CliError> {
        match self {
            HardwareRef::Preset(name) => resolve_hardware(name),
            HardwareRef::Inline(hw) => {
                hw.check()?;
                Ok(hw.clone())
            }
        }
    }
}

pub fn spec_file_schema() -> String {
    let schema = schemars::schema_for!(SpecFile);
    let mut text = serde_json::to_string_pretty(&schema).expect("schema serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_one_source() {
        let err = SpecFile::parse("x", r#"{"schema_version": 1}"#).unwrap_err();
        assert!(err.to_string().contains("exactly one"));
        let err = SpecFile::parse("x", r#"{"schema_version": 2, "builder": {"family": "vit", "config": {}}}"#)
            .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn builder_reference() {
        let cfg = serde_json::to_value(VitConfig::base(32)).unwrap();
        let text = serde_json::json!({
            "schema_version": 1,
            "builder": {"family": "ut", "config": cfg, "steps": 4},
            "hardware": "gpu_like"
        })
        .to_string();
        let file = SpecFile::parse("x", &text).unwrap();
        assert!(matches!(file.hardware, Some(HardwareRef::Preset(ref n)) if n == "gpu_like"));
        let arch = file.architecture("x").unwrap();
        assert!(validate(&arch).is_ok());
    }

    #[test]
    fn malformed_json_reports_offset() {
        let text = "{\n  \"schema_version\": 1,\n  oops\n}";
        match SpecFile::parse("x", text).unwrap_err() {
            CliError::Parse { byte_offset, .. } => {
                assert_eq!(byte_offset, Some(text.find("oops").unwrap()));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_hardware_lists_presets() {
        let err = resolve_hardware("no_such_device").unwrap_err();
        assert!(err.to_string().contains("tpu_like"));
    }
}
