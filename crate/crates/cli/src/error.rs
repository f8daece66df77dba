use std::path::Path;

use costlens_core::analysis::AnalysisError;
use costlens_core::archlib::BuildError;
use costlens_core::footprint::FootprintError;
use costlens_core::latency::LatencyError;
use costlens_core::IndicatorError;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Parse {
        path: String,
        message: String,
        byte_offset: Option<usize>,
    },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{0}")]
    Input(String),
    #[error("{path}: invalid architecture: {}", .violations.join("; "))]
    Invalid { path: String, violations: Vec<String> },
    #[error("{0}")]
    Analysis(AnalysisError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 for analysis-level insufficiency, 2 for everything about the inputs.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Analysis(AnalysisError::Insufficient { .. }) => 1,
            _ => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Schema { .. } => "schema",
            CliError::Input(_) => "input",
            CliError::Invalid { .. } => "invalid_architecture",
            CliError::Analysis(AnalysisError::Insufficient { .. }) => "insufficient",
            CliError::Analysis(_) => "analysis",
            CliError::Io { .. } => "io",
        }
    }

    /// One-line JSON object for the error stream.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            exit_code: i32,
            message: String,
            #[serde(skip_serializing_if = "Option::is_none")]
            byte_offset: Option<usize>,
            #[serde(skip_serializing_if = "<[String]>::is_empty")]
            violations: &'a [String],
        }
        let (byte_offset, violations): (Option<usize>, &[String]) = match self {
            CliError::Parse { byte_offset, .. } => (*byte_offset, &[]),
            CliError::Invalid { violations, .. } => (None, violations),
            _ => (None, &[]),
        };
        let body = Body {
            kind: self.kind(),
            exit_code: self.exit_code(),
            message: self.to_string(),
            byte_offset,
            violations,
        };
        serde_json::json!({ "error": body }).to_string()
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// Wraps a serde_json error, converting its line/column into a byte offset.
    pub(crate) fn json(path: &str, text: &str, err: serde_json::Error) -> Self {
        let byte_offset = (err.line() > 0).then(|| {
            let line_start: usize = text
                .split_inclusive('\n')
                .take(err.line() - 1)
                .map(str::len)
                .sum();
            line_start + err.column().saturating_sub(1)
        });
        let message = match byte_offset {
            Some(off) => format!("{err} (byte offset {off})"),
            None => err.to_string(),
        };
        if err.is_data() {
            CliError::Schema {
                path: path.to_string(),
                message,
            }
        } else {
            CliError::Parse {
                path: path.to_string(),
                message,
                byte_offset,
            }
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::Analysis(e)
    }
}

impl From<IndicatorError> for CliError {
    fn from(e: IndicatorError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<LatencyError> for CliError {
    fn from(e: LatencyError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<FootprintError> for CliError {
    fn from(e: FootprintError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<BuildError> for CliError {
    fn from(e: BuildError) -> Self {
        CliError::Input(e.to_string())
    }
}
