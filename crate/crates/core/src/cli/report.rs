//! The analysis pipeline and the report document it produces.

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::golden::{compare, DiffEntry, Golden};
use crate::cone::Orthant;
use crate::error::{Error, Result};
use crate::matops::{IVec, IntMatrix};
use crate::quotient::{
    fingerprint, fundamental_domain, gluing_scheme, integer_distance, verify_symmetry, verify_xi, FaceClass,
    FaceInvariants, Fingerprint, XiGroup,
};
use crate::sail::{build_sail_patch, certify_facet, Certification, Facet, FacetStatus, PatchOptions, SailPatch};
use crate::survey::{classify, Verdict};

/// Everything computed by one run of the pipeline.
pub struct Analysis {
    pub config: RunConfig,
    pub orthant: Orthant,
    pub group: XiGroup,
    pub patch: SailPatch,
    pub classes: Vec<FaceClass>,
    /// Differences from the shipped example data; empty when no example is set.
    pub golden_diff: Vec<DiffEntry>,
}

pub fn analyze(config: &RunConfig) -> Result<Analysis> {
    let a = config.operator.matrix();
    let verdict = classify(&a)?.verdict;
    if verdict != Verdict::Candidate {
        return Err(Error::Classification(format!("operator is {verdict:?}; a hyperbolic irreducible unimodular operator is required")));
    }
    let orthant = Orthant::containing(&a, &config.orthant.contains)?;
    let s = &config.sail;
    let group = verify_xi(&orthant, &config.words()?)?
        .with_exponent_box(s.exponent_box)
        .with_precision(s.precision);
    let opts = PatchOptions { max_norm: s.bound, ..PatchOptions::default() };
    let mut patch = build_sail_patch(&orthant, &s.seeds, group.generators(), s.depth, &opts)?;
    let mut classes = fundamental_domain(&mut patch, &group)?;
    if classes.iter().any(|c| c.provisional) {
        return Err(Error::Classification(format!(
            "fundamental domain did not close after {} classes",
            classes.len()
        )));
    }
    let mut golden_diff = Vec::new();
    if let Some(n) = config.example {
        let golden = Golden::load(n)?;
        let m = compare(&golden, &s.seeds, &orthant, &group, &classes)?;
        if m.diffs.is_empty() {
            for (k, (name, facet)) in m.names {
                classes[k].label = name;
                classes[k].representative = facet;
            }
            classes.sort_by(|x, y| x.label.cmp(&y.label));
        }
        golden_diff = m.diffs;
    }
    Ok(Analysis { config: config.clone(), orthant, group, patch, classes, golden_diff })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenvalueEntry {
    pub lo: String,
    pub hi: String,
    pub approx: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthantEntry {
    pub contains: IVec,
    pub signs: [i8; 4],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorEntry {
    pub word: String,
    pub matrix: IntMatrix,
    pub det: i64,
    pub commutes: bool,
    pub eigenvalue_signs: [i8; 4],
    /// Log-coordinate translation, with its error bound.
    pub translation: [String; 3],
    pub translation_error: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetEntry {
    pub normal: IVec,
    pub level: i64,
    pub vertices: Vec<IVec>,
    pub distance: u64,
    pub volume: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub label: String,
    pub normal: IVec,
    pub level: i64,
    pub vertices: Vec<IVec>,
    /// Cycles of indices into `vertices`.
    pub two_faces: Vec<Vec<usize>>,
    pub invariants: FaceInvariants,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingEntry {
    pub class: String,
    pub face: usize,
    pub partner: String,
    pub partner_face: usize,
    pub word: String,
    pub exponents: [i64; 3],
    pub matrix: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryImage {
    pub from: String,
    pub to: String,
    pub normal: IVec,
    pub level: i64,
    pub vertices: Vec<IVec>,
    /// Maps the representative of `to` onto the image.
    pub word: String,
    pub exponents: [i64; 3],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryEntry {
    pub matrix: IntMatrix,
    pub det: i64,
    pub images: Vec<SymmetryImage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matches_expected: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SailReportDocument {
    pub operator: IntMatrix,
    pub charpoly: String,
    pub det: i64,
    pub eigenvalues: Vec<EigenvalueEntry>,
    pub orthant: OrthantEntry,
    pub generators: Vec<GeneratorEntry>,
    pub assumption: String,
    pub facets: Vec<FacetEntry>,
    pub complete_vertices: Vec<IVec>,
    pub unreached: Vec<IVec>,
    pub classes: Vec<ClassEntry>,
    pub fingerprint: Fingerprint,
    pub gluing: Vec<GluingEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryEntry>,
}

const ASSUMPTION: &str = "the three generators are verified to lie in the unit group; that they generate it is assumed";

fn det_i64(m: &IntMatrix) -> Result<i64> {
    i64::try_from(m.det_i128()?).map_err(|_| Error::Overflow("determinant"))
}

fn facet_entry(f: &Facet) -> Result<FacetEntry> {
    Ok(FacetEntry {
        normal: f.normal,
        level: f.level,
        vertices: f.vertices.clone(),
        distance: integer_distance(&f.normal, f.level)?,
        volume: f.skeleton()?.lattice_volume()?,
    })
}

impl Analysis {
    pub fn fingerprint(&self) -> Result<Fingerprint> {
        fingerprint(&self.classes)
    }

    /// Applies the configured symmetry; `Ok(None)` without a symmetry section.
    pub fn symmetry(&self) -> Result<Option<SymmetryEntry>> {
        let Some(spec) = &self.config.symmetry else { return Ok(None) };
        let s = IntMatrix(spec.matrix);
        let images = verify_symmetry(&s, &self.orthant, &self.classes, &self.group)?;
        let matches_expected = spec.expected.as_ref().map(|exp| {
            let mut want: Vec<(String, String)> = exp.iter().map(|[a, b]| (a.clone(), b.clone())).collect();
            let mut got: Vec<(String, String)> = images.iter().map(|i| (i.from.clone(), i.to.clone())).collect();
            want.sort();
            got.sort();
            want == got
        });
        Ok(Some(SymmetryEntry {
            matrix: s,
            det: det_i64(&s)?,
            images: images
                .into_iter()
                .map(|i| SymmetryImage {
                    from: i.from,
                    to: i.to,
                    normal: i.image.normal,
                    level: i.image.level,
                    vertices: i.image.vertices,
                    word: i.element.to_string(),
                    exponents: i.element.exponents,
                })
                .collect(),
            matches_expected,
        }))
    }

    pub fn document(&self, symmetry: Option<SymmetryEntry>) -> Result<SailReportDocument> {
        let a = self.orthant.operator();
        let eigenvalues = self
            .orthant
            .forms()
            .iter()
            .map(|f| {
                let (lo, hi) = f.root.interval_string();
                EigenvalueEntry { lo, hi, approx: format!("{:.15}", f.eigenvalue_f64()) }
            })
            .collect();
        let mut generators = Vec::new();
        for (i, g) in self.group.generators().iter().enumerate() {
            let t = &self.group.translations()[i];
            generators.push(GeneratorEntry {
                word: self.group.words()[i].clone(),
                matrix: *g,
                det: det_i64(g)?,
                commutes: g.commutes_with(a)?,
                eigenvalue_signs: self.orthant.eigenvalue_signs(g)?,
                translation: t.values.map(|x| format!("{x:.15e}")),
                translation_error: format!("{:.3e}", t.error),
            });
        }
        let classes = self
            .classes
            .iter()
            .map(|c| {
                let sk = c.representative.skeleton()?;
                Ok(ClassEntry {
                    label: c.label.clone(),
                    normal: c.representative.normal,
                    level: c.representative.level,
                    vertices: c.representative.vertices.clone(),
                    two_faces: sk.two_faces,
                    invariants: c.invariants,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let gluing = gluing_scheme(&self.classes, &self.orthant, &self.group)?
            .into_iter()
            .map(|g| GluingEntry {
                class: g.class,
                face: g.face,
                partner: g.partner,
                partner_face: g.partner_face,
                word: g.element.to_string(),
                exponents: g.element.exponents,
                matrix: g.element.matrix,
            })
            .collect();
        Ok(SailReportDocument {
            operator: *a,
            charpoly: self.orthant.charpoly().to_string(),
            det: det_i64(a)?,
            eigenvalues,
            orthant: OrthantEntry { contains: self.config.orthant.contains, signs: self.orthant.sigma().0 },
            generators,
            assumption: ASSUMPTION.into(),
            facets: self.patch.facets().iter().map(facet_entry).collect::<Result<_>>()?,
            complete_vertices: self.patch.complete_vertices().iter().copied().collect(),
            unreached: self.patch.unreached().to_vec(),
            classes,
            fingerprint: self.fingerprint()?,
            gluing,
            symmetry,
        })
    }
}

impl SailReportDocument {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("report document: {e}")))
    }
}

fn mismatch(what: String) -> Error {
    Error::Invariant(format!("recheck: {what}"))
}

fn recertify(orthant: &Orthant, normal: IVec, level: i64, vertices: &[IVec], what: &str) -> Result<Facet> {
    let f = Facet::new(normal, level, vertices.to_vec(), FacetStatus::Candidate)?;
    match certify_facet(&f, orthant)? {
        Certification::Certified(c) if c.vertices == f.vertices => Ok(c),
        Certification::Certified(c) => Err(mismatch(format!("{what} has vertex set {:?}", c.vertices))),
        Certification::Spurious { witness } => Err(mismatch(format!("{what} is not a sail facet (witness {witness:?})"))),
    }
}

/// Re-derives every number in the document from the operator, the orthant
/// point and the listed vertices.
pub fn recheck(doc: &SailReportDocument) -> Result<()> {
    let a = &doc.operator;
    if a.char_poly().to_string() != doc.charpoly {
        return Err(mismatch("characteristic polynomial".into()));
    }
    if det_i64(a)? != doc.det {
        return Err(mismatch("determinant".into()));
    }
    let orthant = Orthant::containing(a, &doc.orthant.contains)?;
    if orthant.sigma().0 != doc.orthant.signs {
        return Err(mismatch("orthant signs".into()));
    }
    let words = doc.generators.iter().map(|g| g.word.parse()).collect::<Result<Vec<_>>>()?;
    let group = verify_xi(&orthant, &words)?;
    for (g, m) in doc.generators.iter().zip(group.generators()) {
        if g.matrix != *m || g.det != det_i64(m)? || !g.commutes || g.eigenvalue_signs != orthant.eigenvalue_signs(m)? {
            return Err(mismatch(format!("generator {}", g.word)));
        }
    }
    for (i, f) in doc.facets.iter().enumerate() {
        let c = recertify(&orthant, f.normal, f.level, &f.vertices, &format!("facet {i}"))?;
        if facet_entry(&c)? != *f {
            return Err(mismatch(format!("invariants of facet {i}")));
        }
    }
    let mut reps = Vec::new();
    for c in &doc.classes {
        let f = recertify(&orthant, c.normal, c.level, &c.vertices, &c.label)?;
        let sk = f.skeleton()?;
        if FaceInvariants::of(&f)? != c.invariants || sk.two_faces != c.two_faces {
            return Err(mismatch(format!("invariants of class {}", c.label)));
        }
        reps.push((c.label.clone(), f, sk.ridge_points()));
    }
    let mut entries: Vec<FaceInvariants> = doc.classes.iter().map(|c| c.invariants).collect();
    entries.sort();
    if doc.fingerprint != (Fingerprint { class_count: entries.len(), entries }) {
        return Err(mismatch("fingerprint".into()));
    }
    let rep = |label: &str| {
        reps.iter()
            .find(|r| r.0 == label)
            .ok_or_else(|| mismatch(format!("unknown class {label}")))
    };
    for gl in &doc.gluing {
        let e = group.element(gl.exponents)?;
        if e.matrix != gl.matrix || e.to_string() != gl.word {
            return Err(mismatch(format!("gluing element {}", gl.word)));
        }
        let (_, _, own) = rep(&gl.class)?;
        let (_, _, other) = rep(&gl.partner)?;
        let (Some(target), Some(source)) = (own.get(gl.face), other.get(gl.partner_face)) else {
            return Err(mismatch(format!("gluing face index of {}", gl.class)));
        };
        let mut img = source.iter().map(|v| e.matrix.apply(v)).collect::<Result<Vec<_>>>()?;
        img.sort();
        if img != *target {
            return Err(mismatch(format!("gluing {}/{} with {}/{}", gl.class, gl.face, gl.partner, gl.partner_face)));
        }
    }
    if let Some(sym) = &doc.symmetry {
        if det_i64(&sym.matrix)? != sym.det {
            return Err(mismatch("symmetry determinant".into()));
        }
        for im in &sym.images {
            let (_, from, _) = rep(&im.from)?;
            let img = from.image(&sym.matrix)?;
            if img.normal != im.normal || img.level != im.level || img.vertices != im.vertices {
                return Err(mismatch(format!("symmetry image of {}", im.from)));
            }
            recertify(&orthant, im.normal, im.level, &im.vertices, &format!("image of {}", im.from))?;
            let (_, to, _) = rep(&im.to)?;
            let e = group.element(im.exponents)?;
            if to.image(&e.matrix)?.vertices != im.vertices {
                return Err(mismatch(format!("symmetry element for {}", im.from)));
            }
        }
    }
    Ok(())
}
