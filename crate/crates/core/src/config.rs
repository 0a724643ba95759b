//! Experiment configuration: a small TOML schema mapping onto graph
//! generation, scheme parameters, pair selection and output paths.
//!
//! ```toml
//! [graph]
//! source = "generate"        # or "file" with path = "g.edges"
//! kind = "gnm-random"        # path | star | grid | gnm-random | random-weighted
//! n = 200
//! m = 600
//! seed = 7
//!
//! [scheme]
//! name = "scheme5"           # see `rlab schemes`
//! epsilon = "1/2"            # rational or decimal
//! seed = 11
//!
//! [pairs]
//! mode = "all"               # or "sample" with count and seed
//!
//! [output]
//! report = "report.json"
//! csv = "pairs.csv"
//! ```

use serde::Deserialize;

use crate::error::{BuildError, GraphError};
use crate::gen::{generate_graph, GraphSpec};
use crate::graph::Graph;
use crate::scheme::SchemeParams;
use crate::weight::parse_weight;

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum GraphSource {
    Generate {
        kind: String,
        n: Option<usize>,
        m: Option<usize>,
        rows: Option<usize>,
        cols: Option<usize>,
        w_min: Option<i64>,
        w_max: Option<i64>,
        #[serde(default)]
        seed: u64,
    },
    File {
        path: String,
    },
}

impl GraphSource {
    pub fn to_spec(&self) -> Result<Option<(GraphSpec, u64)>, BuildError> {
        match self {
            GraphSource::File { .. } => Ok(None),
            GraphSource::Generate { kind, n, m, rows, cols, w_min, w_max, seed } => {
                let need = |v: &Option<usize>, what: &str| {
                    v.ok_or_else(|| {
                        BuildError::InvalidParam(format!("graph kind {kind} needs {what}"))
                    })
                };
                let spec = match kind.as_str() {
                    "path" => GraphSpec::Path { n: need(n, "n")? },
                    "star" => GraphSpec::Star { n: need(n, "n")? },
                    "grid" => GraphSpec::Grid { rows: need(rows, "rows")?, cols: need(cols, "cols")? },
                    "gnm-random" => GraphSpec::GnmRandom { n: need(n, "n")?, m: need(m, "m")? },
                    "random-weighted" => GraphSpec::RandomWeighted {
                        n: need(n, "n")?,
                        m: need(m, "m")?,
                        w_min: w_min.unwrap_or(1),
                        w_max: w_max.unwrap_or(10),
                    },
                    other => {
                        return Err(BuildError::InvalidParam(format!("unknown graph kind {other:?}")))
                    }
                };
                Ok(Some((spec, *seed)))
            }
        }
    }

    pub fn realize(&self) -> Result<Graph, BuildError> {
        match self {
            GraphSource::File { path } => Ok(crate::io::load_graph(path)?),
            _ => {
                let (spec, seed) = self.to_spec()?.expect("generate arm");
                Ok(generate_graph(&spec, seed)?)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            GraphSource::File { path } => format!("file:{path}"),
            GraphSource::Generate { kind, n, m, rows, cols, w_min, w_max, seed } => {
                let mut s = format!("{kind}(seed={seed}");
                if let Some(n) = n {
                    s.push_str(&format!(", n={n}"));
                }
                if let Some(m) = m {
                    s.push_str(&format!(", m={m}"));
                }
                if let (Some(r), Some(c)) = (rows, cols) {
                    s.push_str(&format!(", {r}x{c}"));
                }
                if let (Some(a), Some(b)) = (w_min, w_max) {
                    s.push_str(&format!(", w={a}..{b}"));
                }
                s.push(')');
                s
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct SchemeConfig {
    pub name: String,
    pub epsilon: Option<String>,
    pub k: Option<u32>,
    pub ell: Option<u32>,
    pub alpha: Option<String>,
    pub beta: Option<String>,
    #[serde(default)]
    pub seed: u64,
}

impl SchemeConfig {
    pub fn to_params(&self) -> Result<SchemeParams, BuildError> {
        let mut p = SchemeParams { seed: self.seed, k: self.k, ell: self.ell, ..Default::default() };
        if let Some(e) = &self.epsilon {
            p.epsilon = Some(parse_weight(e).map_err(BuildError::InvalidParam)?);
        }
        if let Some(a) = &self.alpha {
            p.alpha = parse_weight(a).map_err(BuildError::InvalidParam)?;
        }
        if let Some(b) = &self.beta {
            p.beta = parse_weight(b).map_err(BuildError::InvalidParam)?;
        }
        Ok(p)
    }

    pub fn describe(&self) -> std::collections::BTreeMap<String, String> {
        let mut m = std::collections::BTreeMap::new();
        m.insert("scheme".into(), self.name.clone());
        if let Some(e) = &self.epsilon {
            m.insert("epsilon".into(), e.clone());
        }
        if let Some(k) = self.k {
            m.insert("k".into(), k.to_string());
        }
        if let Some(l) = self.ell {
            m.insert("ell".into(), l.to_string());
        }
        if let Some(a) = &self.alpha {
            m.insert("alpha".into(), a.clone());
        }
        if let Some(b) = &self.beta {
            m.insert("beta".into(), b.clone());
        }
        m.insert("seed".into(), self.seed.to_string());
        m
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum PairSelection {
    All,
    Sample {
        count: usize,
        #[serde(default)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct OutputPaths {
    pub report: Option<String>,
    pub csv: Option<String>,
}

fn default_assertions() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub scheme: SchemeConfig,
    pub pairs: PairSelection,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(default = "default_assertions")]
    pub assertions: bool,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, BuildError> {
        let config: ExperimentConfig = toml::from_str(text)
            .map_err(|e| BuildError::InvalidParam(format!("config parse error: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self, BuildError> {
        let text = std::fs::read_to_string(path).map_err(GraphError::Io)?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), BuildError> {
        crate::scheme::by_name(&self.scheme.name)?;
        self.scheme.to_params()?;
        if let GraphSource::Generate { .. } = &self.graph {
            self.graph.to_spec()?;
        }
        if let PairSelection::Sample { count, .. } = &self.pairs {
            if *count == 0 {
                return Err(BuildError::InvalidParam("sample count must be positive".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let text = r#"
            [graph]
            source = "generate"
            kind = "gnm-random"
            n = 100
            m = 300
            seed = 7

            [scheme]
            name = "scheme5"
            epsilon = "1/2"
            seed = 11

            [pairs]
            mode = "sample"
            count = 500
            seed = 3

            [output]
            report = "r.json"
        "#;
        let c = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(c.scheme.name, "scheme5");
        assert!(matches!(c.pairs, PairSelection::Sample { count: 500, .. }));
        assert!(c.assertions);
    }

    #[test]
    fn unknown_scheme_rejected() {
        let text = r#"
            [graph]
            source = "generate"
            kind = "path"
            n = 5

            [scheme]
            name = "nope"

            [pairs]
            mode = "all"
        "#;
        assert!(matches!(
            ExperimentConfig::from_toml(text),
            Err(BuildError::UnknownScheme(_))
        ));
    }
}
