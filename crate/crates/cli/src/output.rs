use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use harmonic_core::Error;
use serde::Serialize;
use serde_json::{json, Value};

use crate::Cli;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostic {
    pub kind: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        Diagnostic {
            kind: kind.into(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CommandResult {
    pub schema_version: u32,
    pub status: Status,
    pub payload: Value,
    pub diagnostics: Vec<Diagnostic>,
}

/// What a command produced, before rendering.
#[derive(Debug, Default)]
pub struct Outcome {
    pub payload: Value,
    pub failed: bool,
    pub text: Option<String>,
    pub diagnostics: Vec<Diagnostic>,
    pub files: Vec<(PathBuf, String)>,
    pub error: Option<String>,
}

impl Outcome {
    pub fn ok(payload: Value) -> Self {
        Outcome {
            payload,
            ..Default::default()
        }
    }

    pub fn check(payload: Value, holds: bool) -> Self {
        Outcome {
            payload,
            failed: !holds,
            ..Default::default()
        }
    }

    pub fn with_text(mut self, text: String) -> Self {
        self.text = Some(text);
        self
    }

    pub fn with_file(mut self, path: Option<&PathBuf>, contents: impl FnOnce() -> String) -> Self {
        if let Some(p) = path {
            self.files.push((p.clone(), contents()));
        }
        self
    }

    pub fn diagnose(mut self, kind: &str, messages: impl IntoIterator<Item = String>) -> Self {
        self.diagnostics
            .extend(messages.into_iter().map(|m| Diagnostic::new(kind, m)));
        self
    }

    pub fn from_error(e: Error) -> Self {
        let kind = error_kind(&e);
        Outcome {
            payload: json!({ "error": e.to_string(), "kind": kind }),
            failed: true,
            diagnostics: vec![Diagnostic::new(kind, e.to_string())],
            error: Some(e.to_string()),
            ..Default::default()
        }
    }

    pub fn emit(self, cli: &Cli) -> Result<ExitCode, Error> {
        let result = CommandResult {
            schema_version: SCHEMA_VERSION,
            status: if self.failed { Status::Fail } else { Status::Ok },
            payload: self.payload,
            diagnostics: self.diagnostics,
        };
        for (path, contents) in &self.files {
            std::fs::write(path, contents)?;
        }
        if let Some(path) = &cli.global.out {
            std::fs::write(path, serde_json::to_string_pretty(&result)? + "\n")?;
        }
        let rendered = if cli.global.json {
            Some(serde_json::to_string_pretty(&result.payload)? + "\n")
        } else if self.error.is_some() {
            None
        } else if let Some(text) = self.text {
            Some(text)
        } else {
            Some(serde_json::to_string_pretty(&result)? + "\n")
        };
        if let Some(text) = rendered {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
        if let Some(msg) = &self.error {
            eprintln!("error: {msg}");
        } else if self.failed {
            eprintln!("check failed");
        }
        Ok(if self.failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidPermutation(_) => "invalid_permutation",
        Error::LoopEdge { .. } => "loop_edge",
        Error::InvalidGraph(_) => "invalid_graph",
        Error::Disconnected { .. } => "disconnected",
        Error::InvalidMorphism(_) => "invalid_morphism",
        Error::NotHarmonic(_) => "not_harmonic",
        Error::InvalidGroup(_) => "invalid_group",
        Error::NotAMember(_) => "not_a_member",
        Error::InvalidAction(_) => "invalid_action",
        Error::NotFaithful(_) => "not_faithful",
        Error::InvalidMultiset(_) => "invalid_multiset",
        Error::InvalidCover(_) => "invalid_cover",
        Error::Invariant(_) => "invariant",
        Error::InvalidRotation(_) => "invalid_rotation",
        Error::Catalog(_) => "catalog",
        Error::Unsupported(_) => "unsupported",
        Error::Json(_) => "json",
        Error::Io(_) => "io",
    }
}
