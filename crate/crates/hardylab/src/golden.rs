//! Golden baseline of corpus constants.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::verify::{constant_tolerance, corpus_constants, Settings};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Golden {
    pub seed: u64,
    pub samples: usize,
    pub degree: usize,
    pub values: BTreeMap<String, Entry>,
}

impl Golden {
    pub fn generate(settings: &Settings) -> hardylab_core::Result<Self> {
        let values = corpus_constants(settings)?
            .into_iter()
            .map(|(k, value)| {
                let tolerance = constant_tolerance(&k);
                (k, Entry { value, tolerance })
            })
            .collect();
        Ok(Golden {
            seed: settings.seed,
            samples: settings.samples,
            degree: settings.degree,
            values,
        })
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}
