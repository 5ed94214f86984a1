//! Shipped reference data for the three examples and the comparison
//! against a computed fundamental domain.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cone::Orthant;
use crate::error::{Error, Result};
use crate::matops::IVec;
use crate::quotient::{classify_facet, integer_distance, FaceClass, FaceInvariants, XiGroup};
use crate::sail::{certify_facet, Certification, Facet, FacetStatus};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenVertex {
    pub name: String,
    /// Exponents of the three generators applied to the base vertex.
    pub word: [i64; 3],
    pub coords: IVec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenFace {
    pub name: String,
    pub vertices: Vec<String>,
    pub normal: IVec,
    pub distance: u64,
    pub volume: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Golden {
    pub example: u8,
    pub vertices: Vec<GoldenVertex>,
    pub faces: Vec<GoldenFace>,
    pub class_count: usize,
    pub provenance: String,
}

impl Golden {
    pub fn load(n: u8) -> Result<Self> {
        let text = match n {
            1 => include_str!("../../data/example1.golden.json"),
            2 => include_str!("../../data/example2.golden.json"),
            3 => include_str!("../../data/example3.golden.json"),
            _ => return Err(Error::Parse(format!("unknown example {n}"))),
        };
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("golden file {n}: {e}")))
    }

    pub fn base(&self) -> Result<&GoldenVertex> {
        self.vertices
            .iter()
            .find(|v| v.word == [0, 0, 0])
            .ok_or_else(|| Error::Parse("golden file has no base vertex".into()))
    }

    fn coords_of(&self, name: &str) -> Option<IVec> {
        self.vertices.iter().find(|v| v.name == name).map(|v| v.coords)
    }

    /// The golden face as a candidate facet; its level is its distance
    /// since the normal is primitive.
    pub fn facet(&self, face: &GoldenFace) -> Result<Facet> {
        let level = i64::try_from(face.distance).map_err(|_| Error::Overflow("golden distance"))?;
        let vertices = face
            .vertices
            .iter()
            .map(|n| self.coords_of(n).ok_or_else(|| Error::Parse(format!("golden face {} names unknown vertex {n}", face.name))))
            .collect::<Result<Vec<_>>>()?;
        Facet::new(face.normal, level, vertices, FacetStatus::Candidate)
    }
}

/// One disagreement between computed and shipped data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffEntry {
    pub path: String,
    pub expected: Value,
    pub actual: Value,
}

fn diff(out: &mut Vec<DiffEntry>, path: String, expected: Value, actual: Value) {
    if expected != actual {
        out.push(DiffEntry { path, expected, actual });
    }
}

/// Result of matching the golden faces against computed classes.
#[derive(Clone, Debug, Default)]
pub struct GoldenMatch {
    pub diffs: Vec<DiffEntry>,
    /// Golden face name and certified facet for every class index.
    pub names: BTreeMap<usize, (String, Facet)>,
}

/// Checks vertex coordinates, certifies every golden face, compares its
/// invariants and matches faces to classes one to one.
pub fn compare(golden: &Golden, seeds: &[IVec], orthant: &Orthant, g: &XiGroup, classes: &[FaceClass]) -> Result<GoldenMatch> {
    let mut m = GoldenMatch::default();
    let base = golden.base()?.coords;
    diff(&mut m.diffs, "vertices.base".into(), json!(base), json!(seeds.first()));
    for v in &golden.vertices {
        let img = g.element(v.word)?.matrix.apply(&base)?;
        diff(&mut m.diffs, format!("vertices.{}.coords", v.name), json!(v.coords), json!(img));
    }
    diff(&mut m.diffs, "class_count".into(), json!(golden.class_count), json!(classes.len()));
    let mut hit: BTreeMap<usize, String> = BTreeMap::new();
    for face in &golden.faces {
        let path = format!("faces.{}", face.name);
        let cand = match golden.facet(face) {
            Ok(f) => f,
            Err(e) => {
                diff(&mut m.diffs, path, json!("valid facet"), json!(e.to_string()));
                continue;
            }
        };
        let cert = match certify_facet(&cand, orthant)? {
            Certification::Certified(f) => f,
            Certification::Spurious { witness } => {
                diff(&mut m.diffs, format!("{path}.certified"), json!(true), json!({ "witness": witness }));
                continue;
            }
        };
        diff(&mut m.diffs, format!("{path}.vertices"), json!(cand.vertices), json!(cert.vertices));
        let inv = FaceInvariants::of(&cert)?;
        diff(&mut m.diffs, format!("{path}.distance"), json!(face.distance), json!(integer_distance(&cert.normal, cert.level)?));
        diff(&mut m.diffs, format!("{path}.volume"), json!(face.volume), json!(inv.volume));
        match classify_facet(&cert, classes, g)? {
            Some((k, _)) => {
                if let Some(prev) = hit.insert(k, face.name.clone()) {
                    diff(&mut m.diffs, format!("{path}.class"), json!("own class"), json!(format!("shares a class with {prev}")));
                }
                m.names.insert(k, (face.name.clone(), cert));
            }
            None => diff(&mut m.diffs, format!("{path}.class"), json!("a computed class"), json!(null)),
        }
    }
    let named: BTreeSet<usize> = hit.keys().copied().collect();
    for (k, c) in classes.iter().enumerate() {
        if !named.contains(&k) {
            diff(&mut m.diffs, format!("classes.{}", c.label), json!("a golden face"), json!(c.representative.normal));
        }
    }
    Ok(m)
}
