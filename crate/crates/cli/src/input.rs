use std::path::PathBuf;

use clap::{Args, ValueEnum};
use monocount_core::graph::{generate, parse_edge_list};
use monocount_core::{FamilySpec, Graph};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum FamilyName {
    Complete,
    Star,
    Cycle,
    Path,
    Pyramid,
    BipyramidChain,
    Composite,
    Gnp,
}

/// Where the graph comes from: an edge-list file or a generated family.
#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Edge-list file ("u v" per line, '#' comments)
    #[arg(long, conflicts_with_all = ["family", "spec"])]
    pub input: Option<PathBuf>,
    /// Graph family to generate
    #[arg(long, value_enum, conflicts_with = "spec")]
    pub family: Option<FamilyName>,
    /// Family spec as JSON, e.g. '{"family":"disjoint_union","parts":[...]}'
    #[arg(long)]
    pub spec: Option<String>,
    /// Family size parameter
    #[arg(long)]
    pub n: Option<usize>,
    /// Edge probability for gnp
    #[arg(long)]
    pub p: Option<f64>,
    /// Seed for gnp
    #[arg(long)]
    pub graph_seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    File(String),
    Family(FamilySpec),
}

#[derive(Debug, Clone, Serialize)]
pub struct InputInfo {
    pub source: Source,
    /// sha256 of the file bytes, or of the serialized edge list for families
    pub digest: String,
    pub vertices: usize,
    pub edges: usize,
    pub duplicate_edges: usize,
}

pub struct Loaded {
    pub graph: Graph,
    pub info: InputInfo,
}

fn sha256(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

impl InputArgs {
    /// Resolves the family spec without building the graph. `c` is the color
    /// count used by `composite`.
    pub fn family_spec(&self, c: Option<u32>) -> Result<Option<FamilySpec>, CliError> {
        if let Some(json) = &self.spec {
            let spec: FamilySpec =
                serde_json::from_str(json).map_err(|e| CliError::Usage(format!("--spec: {e}")))?;
            return Ok(Some(spec));
        }
        let Some(family) = self.family else {
            return Ok(None);
        };
        let n = self
            .n
            .ok_or_else(|| CliError::Usage("--family needs --n".into()))?;
        let spec = match family {
            FamilyName::Complete => FamilySpec::Complete { n },
            FamilyName::Star => FamilySpec::Star { n },
            FamilyName::Cycle => FamilySpec::Cycle { n },
            FamilyName::Path => FamilySpec::Path { n },
            FamilyName::Pyramid => FamilySpec::Pyramid { n },
            FamilyName::BipyramidChain => FamilySpec::BipyramidChain { n },
            FamilyName::Composite => FamilySpec::Composite {
                n,
                c: c.ok_or_else(|| CliError::Usage("composite needs --c".into()))?,
            },
            FamilyName::Gnp => FamilySpec::Gnp {
                n,
                p: self
                    .p
                    .ok_or_else(|| CliError::Usage("gnp needs --p".into()))?,
                seed: self
                    .graph_seed
                    .ok_or_else(|| CliError::Usage("gnp needs a graph seed".into()))?,
            },
        };
        Ok(Some(spec))
    }

    pub fn load(&self, c: Option<u32>) -> Result<Loaded, CliError> {
        if let Some(path) = &self.input {
            let bytes = std::fs::read(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let text = String::from_utf8(bytes.clone())
                .map_err(|_| CliError::Usage(format!("{} is not UTF-8", path.display())))?;
            let parsed = parse_edge_list(&text).map_err(CliError::from)?;
            let info = InputInfo {
                source: Source::File(path.display().to_string()),
                digest: sha256(&bytes),
                vertices: parsed.graph.vertex_count(),
                edges: parsed.graph.edge_count(),
                duplicate_edges: parsed.duplicate_count,
            };
            return Ok(Loaded {
                graph: parsed.graph,
                info,
            });
        }
        let spec = self.family_spec(c)?.ok_or_else(|| {
            CliError::Usage("one of --input, --family or --spec is required".into())
        })?;
        spec.validate().map_err(CliError::from)?;
        let graph = generate(&spec).map_err(CliError::from)?;
        let info = InputInfo {
            digest: sha256(graph.to_edge_list().as_bytes()),
            source: Source::Family(spec),
            vertices: graph.vertex_count(),
            edges: graph.edge_count(),
            duplicate_edges: 0,
        };
        Ok(Loaded { graph, info })
    }
}
