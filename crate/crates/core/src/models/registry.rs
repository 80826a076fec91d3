use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{EnzymeFull, EnzymeParams, EnzymeReduced, LinearField, VectorField};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Named model parameters as they appear in a config file.
pub type Params = BTreeMap<String, serde_json::Value>;

/// A model reference: registry name plus parameter overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: String,
    #[serde(default)]
    pub params: Params,
}

impl ModelSpec {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            params: Params::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }
}

type Builder = Box<dyn Fn(&Params) -> Result<Arc<dyn VectorField>> + Send + Sync>;

/// Maps model names to constructors. Comes preloaded with `enzyme`,
/// `enzyme-full` and `linear`; further models can be registered.
pub struct ModelRegistry {
    builders: BTreeMap<String, Builder>,
}

impl ModelRegistry {
    pub fn empty() -> Self {
        Self {
            builders: BTreeMap::new(),
        }
    }

    pub fn register(
        &mut self,
        name: impl Into<String>,
        builder: impl Fn(&Params) -> Result<Arc<dyn VectorField>> + Send + Sync + 'static,
    ) {
        self.builders.insert(name.into(), Box::new(builder));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.builders.keys().map(String::as_str)
    }

    pub fn build(&self, spec: &ModelSpec) -> Result<Arc<dyn VectorField>> {
        let builder = self
            .builders
            .get(&spec.name)
            .ok_or_else(|| Error::UnknownModel(spec.name.clone()))?;
        builder(&spec.params)
    }
}

impl Default for ModelRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register("enzyme", |p| {
            Ok(Arc::new(EnzymeReduced::new(enzyme_params(p)?)?) as Arc<dyn VectorField>)
        });
        r.register("enzyme-full", |p| {
            Ok(Arc::new(EnzymeFull::new(enzyme_params(p)?)?) as Arc<dyn VectorField>)
        });
        r.register("linear", |p| {
            let raw = p.get("a").ok_or_else(|| Error::InvalidParameter {
                name: "a".into(),
                reason: "linear model needs a square matrix `a`".into(),
            })?;
            let rows: Vec<Vec<f64>> =
                serde_json::from_value(raw.clone()).map_err(|e| Error::InvalidParameter {
                    name: "a".into(),
                    reason: e.to_string(),
                })?;
            Ok(Arc::new(LinearField::new(DenseMatrix::try_from(rows)?)?) as Arc<dyn VectorField>)
        });
        r
    }
}

fn enzyme_params(p: &Params) -> Result<EnzymeParams> {
    const KEYS: [&str; 5] = ["z", "delta", "k1", "k2", "s_y"];
    if let Some(unknown) = p.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(Error::InvalidParameter {
            name: unknown.clone(),
            reason: format!("not an enzyme parameter (expected one of {KEYS:?})"),
        });
    }
    let get = |key: &str, default: f64| -> Result<f64> {
        match p.get(key) {
            None => Ok(default),
            Some(v) => v.as_f64().ok_or_else(|| Error::InvalidParameter {
                name: key.into(),
                reason: format!("expected a number, got {v}"),
            }),
        }
    };
    let d = EnzymeParams::default();
    EnzymeParams::new(
        get("z", d.z)?,
        get("delta", d.delta)?,
        get("k1", d.k1)?,
        get("k2", d.k2)?,
        get("s_y", d.s_y)?,
    )
}
