use std::fmt::Write as _;
use std::path::Path;

use kvcohom::Error;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Top-level report. `results` is a `serde_json::Value` whose maps keep keys
/// sorted, so equal inputs give equal bytes.
#[derive(Debug, Serialize)]
pub struct Report {
    pub format_version: u32,
    pub verb: String,
    pub inputs: Vec<InputDigest>,
    pub verdict: bool,
    pub results: Value,
}

/// Why a run stopped before producing a report.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Math(String),
    Budget(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Math(_) => 1,
            Failure::Input(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Input(s) | Failure::Math(s) | Failure::Budget(s) => s,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Budget { .. } => Failure::Budget(e.to_string()),
            Error::Precondition(_) => Failure::Math(e.to_string()),
            Error::Input(_) | Error::DimensionMismatch(_) => Failure::Input(e.to_string()),
        }
    }
}

pub type Run<T> = Result<T, Failure>;

/// Files read by one job, with their digests.
#[derive(Default)]
pub struct Inputs {
    pub digests: Vec<InputDigest>,
}

impl Inputs {
    pub fn read(&mut self, path: &Path) -> Run<String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let mut hex = String::with_capacity(64);
        for b in Sha256::digest(text.as_bytes()) {
            let _ = write!(hex, "{b:02x}");
        }
        self.digests.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex,
        });
        Ok(text)
    }

    pub fn read_json<T: serde::de::DeserializeOwned>(&mut self, path: &Path) -> Run<T> {
        let text = self.read(path)?;
        Ok(kvcohom::io::from_json(&text)?)
    }
}

pub fn value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

pub fn render(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}
