//! Exact convex hull of a finite point set in Z^4 by gift wrapping.

use std::collections::{BTreeMap, VecDeque};

use super::{functional_through, Affine, FaceSkeleton, Facet, FacetStatus};
use crate::error::{Error, Result};
use crate::matops::{hnf_basis, sub, IVec};

/// Among `points` with `f > 0`, the minimizer of `g/f`; ties go to the
/// lexicographically first point.
pub(crate) fn best_ratio<'a>(points: impl Iterator<Item = &'a IVec>, f: &Affine, g: &Affine) -> Option<IVec> {
    let mut best: Option<(IVec, i128, i128)> = None;
    for p in points {
        let fp = f.eval(p);
        if fp <= 0 {
            continue;
        }
        let gp = g.eval(p);
        match best {
            Some((_, bg, bf)) if gp * bf >= bg * fp => {}
            _ => best = Some((*p, gp, fp)),
        }
    }
    best.map(|b| b.0)
}

pub(crate) fn pivot_finite(points: &[IVec], f: &Affine, g: &Affine) -> Result<Affine> {
    let p = best_ratio(points.iter(), f, g)
        .ok_or_else(|| Error::Degenerate("all points lie on the supporting plane".into()))?;
    Affine::rotate(f, g, &p)
}


/// All facets of `conv(points)`, with inward primitive normals: `h·x >= c`
/// on every point. Facets facing the origin have `c > 0`; the others can
/// only be truncation artifacts and fail certification. Coplanar points are
/// merged into one facet. Status of every returned facet is `Candidate`.
pub fn hull_facets(points: &[IVec]) -> Result<Vec<Facet>> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 5 || hnf_basis(&pts.iter().map(|p| sub(p, &pts[0])).collect::<Vec<_>>())?.rank < 4 {
        return Err(Error::Degenerate("points do not affinely span R^4".into()));
    }

    // supporting functional x0 >= min, then lift to a facet
    let min0 = pts.iter().map(|p| p[0]).min().unwrap_or(0);
    let mut f = Affine::from_plane(&[1, 0, 0, 0], min0);
    loop {
        let on: Vec<IVec> = pts.iter().filter(|p| f.eval(p) == 0).copied().collect();
        let diffs: Vec<IVec> = on.iter().map(|p| sub(p, &on[0])).collect();
        if hnf_basis(&diffs)?.rank == 3 {
            break;
        }
        let g = functional_through(&on, &f)?;
        f = pivot_finite(&pts, &f, &g)?;
    }

    let mut found: BTreeMap<(IVec, i64), Vec<IVec>> = BTreeMap::new();
    let mut queue = VecDeque::from([f]);
    while let Some(f) = queue.pop_front() {
        let plane = f.plane()?;
        if found.contains_key(&plane) {
            continue;
        }
        let on: Vec<IVec> = pts.iter().filter(|p| f.eval(p) == 0).copied().collect();
        let sk = FaceSkeleton::new(&plane.0, &on)?;
        found.insert(plane, sk.vertices.clone());
        for ridge in sk.ridge_points() {
            let mut g = functional_through(&ridge, &f)?;
            let off = sk
                .vertices
                .iter()
                .map(|v| g.eval(v))
                .find(|&x| x != 0)
                .ok_or_else(|| Error::Invariant("ridge functional vanishes on the facet".into()))?;
            if off < 0 {
                g = g.neg();
            }
            let n = pivot_finite(&pts, &f, &g)?;
            if !found.contains_key(&n.plane()?) {
                queue.push_back(n);
            }
        }
    }
    found
        .into_iter()
        .map(|((h, c), v)| Facet::new(h, c, v, FacetStatus::Candidate))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_simplex() {
        let pts = [[0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
        let f = hull_facets(&pts).unwrap();
        assert_eq!(f.len(), 5);
        assert!(f.iter().all(|x| x.vertices.len() == 4));
        assert!(f.iter().any(|x| x.normal == [-1, -1, -1, -1] && x.level == -1));
    }

    #[test]
    fn hypercube_facets_merge() {
        let mut pts = Vec::new();
        for m in 0..16 {
            pts.push([(m & 1) + 5, ((m >> 1) & 1) + 5, ((m >> 2) & 1) + 5, ((m >> 3) & 1) + 5]);
        }
        let f = hull_facets(&pts).unwrap();
        assert_eq!(f.len(), 8);
        assert!(f.iter().all(|x| x.vertices.len() == 8));
        assert_eq!(f.iter().filter(|x| x.level == 5).count(), 4);
    }

    #[test]
    fn degenerate_rejected() {
        let pts = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [1, 1, 1, 0], [2, 1, 0, 0]];
        assert!(matches!(hull_facets(&pts), Err(Error::Degenerate(_))));
    }
}
