//! Certification that a plane supports the infinite hull of the orthant's
//! lattice points.

use super::{points_below, FaceSkeleton, Facet, FacetStatus};
use crate::cone::Orthant;
use crate::error::{Error, Result};
use crate::matops::{dot, hnf_basis, is_primitive, sub, IVec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certification {
    Certified(Facet),
    /// `witness` is a cone lattice point that contradicts the facet, when one exists.
    Spurious { witness: Option<IVec> },
}

impl Certification {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certification::Certified(_))
    }
}

/// The sail face on the plane `h·x = level`, if `h` is positive on the cone,
/// no cone point lies below the level, and the points on the level span a
/// 3-polytope. Returns the slice points below the level when there are any.
pub fn supporting_face(orthant: &Orthant, h: &IVec, level: i64) -> Result<std::result::Result<Facet, Option<IVec>>> {
    if !is_primitive(h) {
        return Err(Error::Contract(format!("normal {h:?} is not primitive")));
    }
    if level < 1 || !orthant.functional_positive(h)? {
        return Ok(Err(None));
    }
    let pts = points_below(orthant, h, level)?;
    if let Some(w) = pts.iter().find(|x| dot(h, x) < level as i128) {
        return Ok(Err(Some(*w)));
    }
    if pts.len() < 4 {
        return Ok(Err(None));
    }
    let diffs: Vec<IVec> = pts.iter().map(|p| sub(p, &pts[0])).collect();
    if hnf_basis(&diffs)?.rank < 3 {
        return Ok(Err(None));
    }
    let sk = FaceSkeleton::new(h, &pts)?;
    Ok(Ok(Facet::new(*h, level, sk.vertices, FacetStatus::Certified)?))
}

/// Decides whether `f` is a face of the sail of `orthant` with exactly the
/// listed vertices.
pub fn certify_facet(f: &Facet, orthant: &Orthant) -> Result<Certification> {
    match supporting_face(orthant, &f.normal, f.level)? {
        Err(witness) => Ok(Certification::Spurious { witness }),
        Ok(face) => {
            if face.vertices == f.vertices {
                return Ok(Certification::Certified(face));
            }
            let witness = face.vertices.iter().find(|v| !f.has_vertex(v)).copied();
            Ok(Certification::Spurious { witness })
        }
    }
}
