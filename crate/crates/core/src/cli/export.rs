//! Export of a report document as JSON, OFF meshes or a gluing scheme.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use super::report::SailReportDocument;
use crate::error::{Error, Result};
use crate::sail::FaceSkeleton;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Off,
    Gluing,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ExportFormat::Json),
            "off" => Ok(ExportFormat::Off),
            "gluing" => Ok(ExportFormat::Gluing),
            _ => Err(Error::Parse(format!("unsupported export format `{s}` (json, off, gluing)"))),
        }
    }
}

pub fn export(doc: &SailReportDocument, format: ExportFormat) -> Result<String> {
    match format {
        ExportFormat::Json => doc.to_json(),
        ExportFormat::Off => off(doc),
        ExportFormat::Gluing => Ok(gluing(doc)),
    }
}

/// All class representatives in one OFF file. Each polytope is drawn in
/// the Hermite lattice basis of its own plane and shifted along the first
/// axis so that the pieces do not overlap.
pub fn off(doc: &SailReportDocument) -> Result<String> {
    let mut verts: Vec<[i64; 3]> = Vec::new();
    let mut faces: Vec<Vec<usize>> = Vec::new();
    let mut comments = String::new();
    let mut shift = 0i64;
    for c in &doc.classes {
        let sk = FaceSkeleton::new(&c.normal, &c.vertices)?;
        let lo = sk.coords.iter().map(|p| p[0]).min().unwrap_or(0);
        let hi = sk.coords.iter().map(|p| p[0]).max().unwrap_or(0);
        let base = verts.len();
        writeln!(
            comments,
            "# {} vertices {}..{} normal {:?} level {}",
            c.label,
            base,
            base + sk.coords.len() - 1,
            c.normal,
            c.level
        )
        .ok();
        verts.extend(sk.coords.iter().map(|p| [p[0] - lo + shift, p[1], p[2]]));
        faces.extend(sk.two_faces.iter().map(|f| f.iter().map(|i| i + base).collect()));
        shift += hi - lo + 2;
    }
    let mut s = String::from("OFF\n");
    s.push_str(&comments);
    writeln!(s, "{} {} 0", verts.len(), faces.len()).ok();
    for v in &verts {
        writeln!(s, "{} {} {}", v[0], v[1], v[2]).ok();
    }
    for f in &faces {
        let ids: Vec<String> = f.iter().map(|i| i.to_string()).collect();
        writeln!(s, "{} {}", f.len(), ids.join(" ")).ok();
    }
    Ok(s)
}

fn face_ref(doc: &SailReportDocument, class: &str, face: usize) -> String {
    let ids = doc
        .classes
        .iter()
        .find(|c| c.label == class)
        .and_then(|c| c.two_faces.get(face))
        .map(|f| f.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("-"))
        .unwrap_or_default();
    format!("{class}/{face}:{ids}")
}

/// One line per glued pair of 2-faces: `A/i:ids <word> B/j:ids`, where the
/// word maps face `j` of `B` onto the neighbour of `A` across face `i`.
/// Pairs with word `E` are interior to the fundamental domain.
pub fn gluing(doc: &SailReportDocument) -> String {
    let mut seen: BTreeSet<(String, usize)> = BTreeSet::new();
    let mut s = String::new();
    for g in &doc.gluing {
        let own = (g.class.clone(), g.face);
        if seen.contains(&own) {
            continue;
        }
        seen.insert(own);
        seen.insert((g.partner.clone(), g.partner_face));
        writeln!(s, "{} {} {}", face_ref(doc, &g.class, g.face), g.word, face_ref(doc, &g.partner, g.partner_face)).ok();
    }
    s
}
