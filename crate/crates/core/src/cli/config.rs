//! Run configuration, read from TOML.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matops::{companion, CompanionSpec, GeneratorWord, IVec, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    Companion { companion: [i64; 4] },
    Matrix { matrix: [[i64; 4]; 4] },
}

impl OperatorSpec {
    pub fn matrix(&self) -> IntMatrix {
        match self {
            OperatorSpec::Companion { companion: [a, b, c, d] } => companion(CompanionSpec::new(*a, *b, *c, *d)),
            OperatorSpec::Matrix { matrix } => IntMatrix(*matrix),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generators {
    #[serde(default)]
    pub words: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrthantSelector {
    /// A point of the orthant whose sail is studied.
    pub contains: IVec,
}

impl Default for OrthantSelector {
    fn default() -> Self {
        OrthantSelector { contains: [0, 0, 0, 1] }
    }
}

fn default_bound() -> i64 {
    64
}
fn default_depth() -> usize {
    1
}
fn default_precision() -> u32 {
    crate::cone::DEFAULT_PRECISION
}
fn default_exponent_box() -> i64 {
    crate::quotient::DEFAULT_EXPONENT_BOX
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SailSettings {
    pub seeds: Vec<IVec>,
    /// Max-norm cap on the lattice points that seed the hull.
    #[serde(default = "default_bound")]
    pub bound: i64,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_precision")]
    pub precision: u32,
    #[serde(default = "default_exponent_box")]
    pub exponent_box: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetrySpec {
    pub matrix: [[i64; 4]; 4],
    /// Expected image class of every class, as `[from, to]` label pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Vec<[String; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Name classes after the faces of a shipped example (1, 2 or 3).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example: Option<u8>,
    pub operator: OperatorSpec,
    #[serde(default)]
    pub generators: Generators,
    #[serde(default)]
    pub orthant: OrthantSelector,
    pub sail: SailSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetrySpec>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn emit(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<()> {
        if self.sail.seeds.is_empty() {
            return Err(Error::Parse("config: at least one seed is required".into()));
        }
        if self.sail.bound < 1 {
            return Err(Error::Parse("config: bound must be positive".into()));
        }
        if let Some(n) = self.example {
            if !(1..=3).contains(&n) {
                return Err(Error::Parse(format!("config: unknown example {n}")));
            }
        }
        self.words()?;
        Ok(())
    }

    pub fn words(&self) -> Result<Vec<GeneratorWord>> {
        self.generators.words.iter().map(|w| w.parse()).collect()
    }
}

/// Shipped configuration of example `n`.
pub fn example_config(n: u8) -> Result<RunConfig> {
    RunConfig::parse(match n {
        1 => include_str!("../../data/example1.toml"),
        2 => include_str!("../../data/example2.toml"),
        3 => include_str!("../../data/example3.toml"),
        _ => return Err(Error::Parse(format!("unknown example {n}"))),
    })
}

pub fn symmetry_config() -> Result<RunConfig> {
    RunConfig::parse(include_str!("../../data/symmetry.toml"))
}
