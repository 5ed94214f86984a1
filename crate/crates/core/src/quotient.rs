//! The action of the unit group Ξ(A) on a sail: generator checks, orbit
//! tests, fundamental domains, integer-affine invariants and symmetries.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cone::{LogCoords, Orthant, DEFAULT_PRECISION};
use crate::error::{Error, Result};
use crate::matops::{eval_word, is_primitive, GeneratorWord, IVec, IntMatrix};
use crate::sail::{certify_facet, Certification, Facet, SailPatch};

/// Default half-width of the exponent box searched when rounding fails.
pub const DEFAULT_EXPONENT_BOX: i64 = 4;

/// Classes explored before a fundamental domain is declared provisional.
const MAX_CLASSES: usize = 512;

/// Ξ(A) presented by three commuting generators.
#[derive(Clone, Debug)]
pub struct XiGroup {
    operator: IntMatrix,
    words: Vec<String>,
    generators: [IntMatrix; 3],
    inverses: [IntMatrix; 3],
    translations: [LogCoords; 3],
    exponent_box: i64,
    precision: u32,
}

/// `B_1^{m_1} B_2^{m_2} B_3^{m_3}` with its matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XiElement {
    pub exponents: [i64; 3],
    pub matrix: IntMatrix,
}

impl fmt::Display for XiElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .exponents
            .iter()
            .enumerate()
            .filter(|(_, &m)| m != 0)
            .map(|(i, &m)| if m == 1 { format!("B{}", i + 1) } else { format!("B{}^{m}", i + 1) })
            .collect();
        if parts.is_empty() {
            write!(f, "E")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Evaluates the generator words and checks every group property.
pub fn verify_xi(orthant: &Orthant, words: &[GeneratorWord]) -> Result<XiGroup> {
    if words.len() != 3 {
        return Err(Error::Generator(format!("expected 3 generator words, got {}", words.len())));
    }
    let mut gens = Vec::new();
    for w in words {
        gens.push(eval_word(w, orthant.operator())?);
    }
    let labels: Vec<String> = words.iter().map(|w| w.to_string()).collect();
    verify_generators(orthant, &labels, &gens)
}

/// Checks explicit generator matrices; `labels` name them in messages.
pub fn verify_generators(orthant: &Orthant, labels: &[String], matrices: &[IntMatrix]) -> Result<XiGroup> {
    let a = orthant.operator();
    if matrices.len() != 3 || labels.len() != 3 {
        return Err(Error::Generator(format!("expected 3 generators, got {}", matrices.len())));
    }
    let mut gens = [IntMatrix::identity(); 3];
    for ((g, w), m) in gens.iter_mut().zip(labels).zip(matrices) {
        *g = *m;
        let det = g.det_i128()?;
        if det != 1 {
            return Err(Error::Generator(format!("`{w}` has determinant {det}")));
        }
        if !g.commutes_with(a)? {
            return Err(Error::Generator(format!("`{w}` does not commute with the operator")));
        }
        if orthant.eigenvalue_signs(g)?.iter().any(|&s| s != 1) {
            return Err(Error::Generator(format!("`{w}` does not preserve the orthant")));
        }
    }
    for i in 0..3 {
        for j in i + 1..3 {
            if !gens[i].commutes_with(&gens[j])? {
                return Err(Error::Generator(format!("generators {} and {} do not commute", i + 1, j + 1)));
            }
        }
    }
    let inverses = [gens[0].inverse()?, gens[1].inverse()?, gens[2].inverse()?];
    let w = orthant.witness();
    let base = orthant.log_coordinates(&w, DEFAULT_PRECISION)?;
    let mut translations = [base; 3];
    for (t, g) in translations.iter_mut().zip(&gens) {
        let img = orthant.log_coordinates(&g.apply(&w)?, DEFAULT_PRECISION)?;
        *t = LogCoords {
            values: [0, 1, 2].map(|k| img.values[k] - base.values[k]),
            error: img.error + base.error,
        };
    }
    let group = XiGroup {
        operator: *a,
        words: labels.to_vec(),
        generators: gens,
        inverses,
        translations,
        exponent_box: DEFAULT_EXPONENT_BOX,
        precision: DEFAULT_PRECISION,
    };
    if group.translation_det().abs() < 1e-6 {
        return Err(Error::Generator("generator translations are linearly dependent".into()));
    }
    Ok(group)
}

impl XiGroup {
    pub fn with_exponent_box(mut self, b: i64) -> Self {
        self.exponent_box = b.max(0);
        self
    }

    pub fn with_precision(mut self, bits: u32) -> Self {
        self.precision = bits;
        self
    }

    pub fn operator(&self) -> &IntMatrix {
        &self.operator
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn generators(&self) -> &[IntMatrix; 3] {
        &self.generators
    }

    pub fn translations(&self) -> &[LogCoords; 3] {
        &self.translations
    }

    fn translation_det(&self) -> f64 {
        let t = &self.translations;
        let m = |i: usize, j: usize| t[j].values[i];
        m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
    }

    /// Real exponents `m` with `sum m_j t_j = delta`.
    fn solve(&self, delta: &[f64; 3]) -> [f64; 3] {
        let d = self.translation_det();
        let mut out = [0f64; 3];
        for (k, o) in out.iter_mut().enumerate() {
            let mut cols = [self.translations[0].values, self.translations[1].values, self.translations[2].values];
            cols[k] = *delta;
            let m = |i: usize, j: usize| cols[j][i];
            let dk = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
            *o = dk / d;
        }
        out
    }

    pub fn element(&self, exponents: [i64; 3]) -> Result<XiElement> {
        let mut m = IntMatrix::identity();
        for (i, &e) in exponents.iter().enumerate() {
            let g = if e >= 0 { &self.generators[i] } else { &self.inverses[i] };
            for _ in 0..e.unsigned_abs() {
                m = g.checked_mul(&m)?;
            }
        }
        Ok(XiElement { exponents, matrix: m })
    }

    fn maps_onto(&self, exponents: [i64; 3], f1: &Facet, f2: &Facet) -> Result<Option<XiElement>> {
        let g = match self.element(exponents) {
            Ok(g) => g,
            Err(Error::Overflow(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let img = match f1.image(&g.matrix) {
            Ok(f) => f,
            Err(Error::Overflow(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        Ok((img.vertices == f2.vertices && img.key() == f2.key()).then_some(g))
    }
}

/// `|c|` for a primitive normal: the integer distance from the origin to `h·x = c`.
pub fn integer_distance(h: &IVec, c: i64) -> Result<u64> {
    if !is_primitive(h) {
        return Err(Error::Contract(format!("normal {h:?} is not primitive")));
    }
    if c == 0 {
        return Err(Error::Domain("plane passes through the origin".into()));
    }
    Ok(c.unsigned_abs())
}

/// Normalized lattice volume of a 3-dimensional face.
pub fn integer_volume(f: &Facet) -> Result<u64> {
    f.skeleton()?.lattice_volume()
}

/// An element of Ξ mapping `f1` onto `f2`, verified vertex by vertex.
pub fn orbit_equivalent(f1: &Facet, f2: &Facet, g: &XiGroup) -> Result<Option<XiElement>> {
    if f1.level != f2.level || f1.vertices.len() != f2.vertices.len() {
        return Ok(None);
    }
    if f1.key() == f2.key() {
        return g.maps_onto([0, 0, 0], f1, f2);
    }
    let o = Orthant::containing(g.operator(), &f1.vertex_sum())?;
    let l1 = o.log_coordinates(&f1.vertex_sum(), g.precision)?;
    let l2 = o.log_coordinates(&f2.vertex_sum(), g.precision)?;
    let delta = [0, 1, 2].map(|k| l2.values[k] - l1.values[k]);
    let real = g.solve(&delta);
    let err = l1.error + l2.error + g.translations.iter().map(|t| t.error).sum::<f64>();
    if real.iter().any(|x| !x.is_finite() || x.abs() > 1e12) {
        return Err(Error::Budget("log-coordinate solve is unstable".into()));
    }
    let rounded = real.map(|x| x.round() as i64);
    let close = real.iter().zip(&rounded).all(|(x, r)| (x - *r as f64).abs() < 0.25 + err);
    if close {
        if let Some(e) = g.maps_onto(rounded, f1, f2)? {
            return Ok(Some(e));
        }
        // a facet's orbit meets each vertex-sum translate once, so a clean
        // rounding that fails verification settles the question
        if real.iter().zip(&rounded).all(|(x, r)| (x - *r as f64).abs() < 1e-3) {
            return Ok(None);
        }
    }
    let b = g.exponent_box;
    for m0 in -b..=b {
        for m1 in -b..=b {
            for m2 in -b..=b {
                if let Some(e) = g.maps_onto([m0, m1, m2], f1, f2)? {
                    return Ok(Some(e));
                }
            }
        }
    }
    Ok(None)
}

/// Integer-affine invariants of one face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FaceInvariants {
    pub vertices: usize,
    pub edges: usize,
    pub distance: u64,
    pub volume: u64,
}

impl FaceInvariants {
    pub fn of(f: &Facet) -> Result<Self> {
        let sk = f.skeleton()?;
        Ok(FaceInvariants {
            vertices: sk.vertices.len(),
            edges: sk.edges.len(),
            distance: integer_distance(&f.normal, f.level)?,
            volume: sk.lattice_volume()?,
        })
    }
}

/// One Ξ-orbit of sail facets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceClass {
    pub label: String,
    pub representative: Facet,
    pub invariants: FaceInvariants,
    pub provisional: bool,
}

/// Finds the class of `f`, returning its index and the element mapping the
/// class representative onto `f`.
pub fn classify_facet(f: &Facet, classes: &[FaceClass], g: &XiGroup) -> Result<Option<(usize, XiElement)>> {
    let inv = FaceInvariants::of(f)?;
    for (i, c) in classes.iter().enumerate() {
        if c.invariants != inv {
            continue;
        }
        if let Some(e) = orbit_equivalent(&c.representative, f, g)? {
            return Ok(Some((i, e)));
        }
    }
    Ok(None)
}

/// One representative per Ξ-orbit of sail facets, starting from the stars of
/// complete vertices and closing up under adjacency across 2-faces. Since the
/// sail is connected, an adjacency-closed set of orbits is all of them.
pub fn fundamental_domain(patch: &mut SailPatch, g: &XiGroup) -> Result<Vec<FaceClass>> {
    let start: Vec<usize> = match patch.complete_vertices().iter().next() {
        Some(v) => patch.star(v).to_vec(),
        None => return Err(Error::Domain("patch has no complete vertex".into())),
    };
    let mut classes: Vec<FaceClass> = Vec::new();
    let mut class_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut add = |patch: &SailPatch, id: usize, classes: &mut Vec<FaceClass>, queue: &mut VecDeque<usize>| -> Result<()> {
        if class_of.contains_key(&id) {
            return Ok(());
        }
        let f = patch.facet(id);
        match classify_facet(f, classes, g)? {
            Some((c, _)) => {
                class_of.insert(id, c);
            }
            None => {
                class_of.insert(id, classes.len());
                classes.push(FaceClass {
                    label: format!("F{}", classes.len() + 1),
                    representative: f.clone(),
                    invariants: FaceInvariants::of(f)?,
                    provisional: true,
                });
                queue.push_back(id);
            }
        }
        Ok(())
    };
    for &id in &start {
        add(patch, id, &mut classes, &mut queue)?;
    }
    let mut closed = true;
    while let Some(id) = queue.pop_front() {
        if classes.len() > MAX_CLASSES {
            closed = false;
            break;
        }
        let ns = match patch.expand(id) {
            Ok(ns) => ns,
            Err(Error::Resource(_)) => {
                closed = false;
                break;
            }
            Err(e) => return Err(e),
        };
        for n in ns {
            add(patch, n, &mut classes, &mut queue)?;
        }
    }
    if closed {
        for c in &mut classes {
            c.provisional = false;
        }
    }
    Ok(classes)
}

/// Sorted multiset of class invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub class_count: usize,
    pub entries: Vec<FaceInvariants>,
}

pub fn fingerprint(classes: &[FaceClass]) -> Result<Fingerprint> {
    if classes.is_empty() {
        return Err(Error::Contract("fingerprint of an empty class list".into()));
    }
    if let Some(c) = classes.iter().find(|c| c.provisional) {
        return Err(Error::Contract(format!("class {} is provisional", c.label)));
    }
    let mut entries: Vec<FaceInvariants> = classes.iter().map(|c| c.invariants).collect();
    entries.sort();
    Ok(Fingerprint { class_count: entries.len(), entries })
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self
            .entries
            .iter()
            .map(|x| format!("({},{},{},{})", x.vertices, x.edges, x.distance, x.volume))
            .collect();
        write!(f, "{} classes: {}", self.class_count, e.join(" "))
    }
}

/// Image of one class under a symmetry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassImage {
    pub from: String,
    pub to: String,
    pub image: Facet,
    pub element: XiElement,
}

/// Checks that `s` maps every class representative to a certified sail
/// facet, and returns the induced permutation of classes.
pub fn verify_symmetry(s: &IntMatrix, orthant: &Orthant, classes: &[FaceClass], g: &XiGroup) -> Result<Vec<ClassImage>> {
    let det = s.det_i128()?;
    if det.abs() != 1 {
        return Err(Error::Symmetry(format!("symmetry has determinant {det}")));
    }
    let mut out = Vec::new();
    let mut hit = BTreeSet::new();
    for c in classes {
        let img = c.representative.image(s)?;
        if let Some(v) = img.vertices.iter().find(|v| !orthant.contains(v).unwrap_or(false)) {
            return Err(Error::Symmetry(format!("vertex image {v:?} of class {} leaves the orthant", c.label)));
        }
        let cert = match certify_facet(&img, orthant)? {
            Certification::Certified(f) => f,
            Certification::Spurious { witness } => {
                return Err(Error::Symmetry(format!(
                    "image of class {} (normal {:?}, level {}) is not a sail facet{}",
                    c.label,
                    img.normal,
                    img.level,
                    witness.map(|w| format!("; witness {w:?}")).unwrap_or_default()
                )))
            }
        };
        let (k, e) = classify_facet(&cert, classes, g)?
            .ok_or_else(|| Error::Symmetry(format!("image of class {} lies in no known class", c.label)))?;
        hit.insert(k);
        out.push(ClassImage { from: c.label.clone(), to: classes[k].label.clone(), image: cert, element: e });
    }
    if hit.len() != classes.len() {
        return Err(Error::Symmetry("induced map on classes is not a permutation".into()));
    }
    Ok(out)
}

/// Identification of one 2-face of a representative with a 2-face of
/// another representative: `element` maps the partner representative onto
/// the facet adjacent to `class` across `face`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gluing {
    pub class: String,
    pub face: usize,
    pub partner: String,
    pub partner_face: usize,
    pub element: XiElement,
}

/// Gluing scheme of the fundamental domain: for each 2-face of each
/// representative, the representative on the other side and the Ξ-element
/// identifying them.
pub fn gluing_scheme(classes: &[FaceClass], orthant: &Orthant, g: &XiGroup) -> Result<Vec<Gluing>> {
    let mut out = Vec::new();
    for c in classes {
        let sk = c.representative.skeleton()?;
        for (r, ridge) in sk.ridge_points().iter().enumerate() {
            let n = crate::sail::pivot(orthant, &c.representative, ridge)?;
            let (k, e) = classify_facet(&n, classes, g)?
                .ok_or_else(|| Error::Invariant(format!("neighbour of {} is in no class", c.label)))?;
            let inv = e.matrix.inverse()?;
            let mut back: Vec<IVec> = ridge.iter().map(|v| inv.apply(v)).collect::<Result<_>>()?;
            back.sort();
            let partner_face = classes[k]
                .representative
                .skeleton()?
                .ridge_points()
                .iter()
                .position(|x| *x == back)
                .ok_or_else(|| Error::Invariant("glued 2-faces do not match".into()))?;
            out.push(Gluing {
                class: c.label.clone(),
                face: r,
                partner: classes[k].label.clone(),
                partner_face,
                element: e,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matops::{companion, CompanionSpec};
    use crate::sail::{build_sail_patch, FacetStatus, PatchOptions};

    fn example1() -> (Orthant, XiGroup) {
        let a = companion(CompanionSpec::new(1, -3, 0, 4));
        let o = Orthant::containing(&a, &[0, 0, 0, 1]).unwrap();
        let words: Vec<GeneratorWord> = ["A^-2", "(A-E)^2*A^-2", "(A-E)^2*(A+E)*A^-2"]
            .iter()
            .map(|w| w.parse().unwrap())
            .collect();
        let g = verify_xi(&o, &words).unwrap();
        (o, g)
    }

    fn t11() -> Facet {
        let v = vec![[-3, -2, -1, 1], [0, 0, 0, 1], [-5, -4, -3, -2], [4, 1, 0, 0]];
        Facet::new([-1, 8, -13, 4], 4, v, FacetStatus::Certified).unwrap()
    }

    #[test]
    fn example1_generators() {
        let (_, g) = example1();
        assert_eq!(g.generators()[0].0[0], [9, -4, -11, 3]);
    }

    #[test]
    fn non_commuting_generator_rejected() {
        let a = companion(CompanionSpec::new(1, -3, 0, 4));
        let o = Orthant::containing(&a, &[0, 0, 0, 1]).unwrap();
        let (_, g) = example1();
        let mut gens = g.generators().to_vec();
        gens[1] = IntMatrix([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        let labels = vec!["B1".to_string(), "X".to_string(), "B3".to_string()];
        match verify_generators(&o, &labels, &gens) {
            Err(Error::Generator(m)) => assert!(m.contains("commute"), "{m}"),
            other => panic!("{other:?}"),
        }
        // A^2 commutes but maps the orthant elsewhere
        let words: Vec<GeneratorWord> = ["A^-2", "A^2", "A"].iter().map(|w| w.parse().unwrap()).collect();
        assert!(verify_xi(&o, &words).is_err());
        assert!(verify_xi(&o, &words[..2]).is_err());
    }

    #[test]
    fn distances_and_volumes() {
        assert_eq!(integer_distance(&[0, 0, 0, 1], 5).unwrap(), 5);
        assert_eq!(integer_distance(&[-7, 41, -59, 20], 13).unwrap(), 13);
        assert!(integer_distance(&[0, 0, 0, 2], 4).is_err());
        assert_eq!(integer_volume(&t11()).unwrap(), 1);
    }

    #[test]
    fn orbit_tests() {
        let (_, g) = example1();
        let f = t11();
        let id = orbit_equivalent(&f, &f, &g).unwrap().unwrap();
        assert_eq!(id.exponents, [0, 0, 0]);
        let img = f.image(&g.generators()[0]).unwrap();
        assert_eq!(orbit_equivalent(&f, &img, &g).unwrap().unwrap().exponents, [1, 0, 0]);
        let mixed = f.image(&g.element([2, -1, 1]).unwrap().matrix).unwrap();
        assert_eq!(orbit_equivalent(&f, &mixed, &g).unwrap().unwrap().exponents, [2, -1, 1]);
        assert_eq!(orbit_equivalent(&mixed, &f, &g).unwrap().unwrap().exponents, [-2, 1, -1]);
    }

    #[test]
    fn domain_of_example1() {
        let (o, g) = example1();
        let mut p = build_sail_patch(&o, &[[-3, -2, -1, 1]], g.generators(), 1, &PatchOptions::default()).unwrap();
        let classes = fundamental_domain(&mut p, &g).unwrap();
        let fp = fingerprint(&classes).unwrap();
        assert_eq!(fp.class_count, 7);
        let d: Vec<u64> = fp.entries.iter().map(|e| e.distance).collect();
        assert_eq!(d, vec![1, 2, 2, 3, 3, 4, 4]);
        assert!(fp.entries.iter().all(|e| e.volume == 1 && e.vertices == 4 && e.edges == 6));
        let glue = gluing_scheme(&classes, &o, &g).unwrap();
        assert_eq!(glue.len(), 28);
        let perm = verify_symmetry(&IntMatrix::identity(), &o, &classes, &g).unwrap();
        assert!(perm.iter().all(|c| c.from == c.to));
    }
}
