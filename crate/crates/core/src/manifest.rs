//! Experiment manifests: a JSON description of one command invocation.
//!
//! ```text
//! {"command":"audit incidence","field":{"p":7,"r":1},"d":2,"seed":1,
//!  "params":{"theorem":"T2.4","trials":"50"},"output":{"format":"json"}}
//! ```
//!
//! A manifest maps one-to-one onto command-line arguments, so replaying it
//! runs exactly the same computation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub r: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    /// Subcommand path, words separated by spaces.
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Remaining options; the value `"true"` stands for a bare flag.
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub output: OutputSpec,
}

fn is_default(o: &OutputSpec) -> bool {
    *o == OutputSpec::default()
}

impl ExperimentManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("manifests serialize")
    }

    pub fn from_json(s: &str) -> Result<ExperimentManifest> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("manifest: {e}")))
    }

    /// Reads a manifest file, or the `# manifest: ` line of a ceiling file.
    pub fn from_text(text: &str) -> Result<ExperimentManifest> {
        match text
            .lines()
            .find_map(|l| l.trim().strip_prefix("# manifest: "))
        {
            Some(json) => ExperimentManifest::from_json(json),
            None => ExperimentManifest::from_json(text.trim()),
        }
    }

    /// Arguments after the program name.
    pub fn to_args(&self) -> Vec<String> {
        let mut args: Vec<String> = self.command.split_whitespace().map(String::from).collect();
        if let Some(fs) = self.field {
            args.push("--q".into());
            args.push(fs.p.pow(fs.r).to_string());
        }
        if let Some(d) = self.d {
            args.push("--d".into());
            args.push(d.to_string());
        }
        if let Some(s) = self.seed {
            args.push("--seed".into());
            args.push(s.to_string());
        }
        for (k, v) in &self.params {
            args.push(format!("--{k}"));
            if v != "true" {
                args.push(v.clone());
            }
        }
        if let Some(f) = &self.output.format {
            args.push("--format".into());
            args.push(f.clone());
        }
        if let Some(p) = &self.output.path {
            args.push("--out".into());
            args.push(p.clone());
        }
        args
    }

    /// Inverse of [`to_args`](Self::to_args). `--q` is split into `(p, r)`
    /// with `prime_power`.
    pub fn from_args(args: &[String]) -> Result<ExperimentManifest> {
        let split = args
            .iter()
            .position(|a| a.starts_with("--"))
            .unwrap_or(args.len());
        let mut m = ExperimentManifest {
            command: args[..split].join(" "),
            ..Default::default()
        };
        let mut i = split;
        while i < args.len() {
            let key = args[i]
                .strip_prefix("--")
                .ok_or_else(|| Error::Parse(format!("unexpected argument {:?}", args[i])))?;
            let (key, inline) = match key.split_once('=') {
                Some((k, v)) => (k, Some(v.to_string())),
                None => (key, None),
            };
            let value = match inline {
                Some(v) => v,
                None if i + 1 < args.len() && !args[i + 1].starts_with("--") => {
                    i += 1;
                    args[i].clone()
                }
                None => "true".into(),
            };
            let num = |what: &str| -> Result<u64> {
                value
                    .parse()
                    .map_err(|_| Error::Parse(format!("--{what}: {value:?} is not a number")))
            };
            match key {
                "q" => {
                    let q = num("q")? as u32;
                    let (p, r) = crate::ffield::prime_power(q)
                        .ok_or_else(|| Error::Parse(format!("--q: {q} is not a prime power")))?;
                    m.field = Some(FieldSpec { p, r });
                }
                "d" => m.d = Some(num("d")? as usize),
                "seed" => m.seed = Some(num("seed")?),
                "format" => m.output.format = Some(value),
                "out" => m.output.path = Some(value),
                _ => {
                    m.params.insert(key.to_string(), value);
                }
            }
            i += 1;
        }
        Ok(m)
    }
}
