use std::path::Path;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at {path:?}: {message}")]
    Config { path: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("missing input: {0}")]
    MissingInput(&'static str),
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: mcarch::Error,
    },
}

#[derive(Serialize)]
struct Report<'a> {
    error: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<&'a str>,
    message: String,
}

impl CliError {
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn core(context: impl Into<String>, source: mcarch::Error) -> Self {
        CliError::Core {
            context: context.into(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config { .. } => "config",
            CliError::Io { .. } => "io",
            CliError::MissingInput(_) => "missing_input",
            CliError::Core { source, .. } => match source {
                mcarch::Error::InsufficientSample { .. } => "insufficient_sample",
                mcarch::Error::Csv { .. } | mcarch::Error::NoDataRows => "input",
                mcarch::Error::Io(_) => "io",
                _ => "compute",
            },
        }
    }

    /// Single-line JSON for stderr.
    pub fn to_json(&self) -> String {
        let (path, message) = match self {
            CliError::Config { path, message } => (Some(path.as_str()), message.clone()),
            CliError::Io { path, message } => (Some(path.as_str()), message.clone()),
            CliError::MissingInput(what) => (None, format!("no {what} given")),
            CliError::Core { context, source } => (Some(context.as_str()), source.to_string()),
        };
        serde_json::to_string(&Report {
            error: self.kind(),
            path,
            message,
        })
        .expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_one_line() {
        let e = CliError::core(
            "prices.csv",
            mcarch::Error::InsufficientSample {
                required: 558,
                actual: 99,
            },
        );
        let j = e.to_json();
        assert!(!j.contains('\n'));
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v["error"], "insufficient_sample");
        assert!(v["message"].as_str().unwrap().contains("558"));
    }
}
