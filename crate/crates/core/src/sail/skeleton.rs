//! Combinatorics of a 3-dimensional lattice polytope sitting in a hyperplane
//! `h·x = c` of Z^4: vertices, 2-faces in cyclic order, edges, and the
//! normalized lattice volume.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matops::{hnf_basis, IVec, PlaneBasis};

type P3 = [i64; 3];

fn sub3(a: &P3, b: &P3) -> [i128; 3] {
    [
        a[0] as i128 - b[0] as i128,
        a[1] as i128 - b[1] as i128,
        a[2] as i128 - b[2] as i128,
    ]
}

fn cross(u: &[i128; 3], v: &[i128; 3]) -> [i128; 3] {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

fn dot3(u: &[i128; 3], v: &[i128; 3]) -> i128 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

fn det3(u: &[i128; 3], v: &[i128; 3], w: &[i128; 3]) -> i128 {
    dot3(u, &cross(v, w))
}

/// Face structure of a facet. Vertex indices refer to `vertices`, which is
/// sorted lexicographically; each 2-face is a cycle starting at its smallest
/// index and running counterclockwise seen from outside the polytope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceSkeleton {
    pub vertices: Vec<IVec>,
    /// Coordinates in a lattice basis of the plane's direction lattice.
    pub coords: Vec<P3>,
    pub two_faces: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

impl FaceSkeleton {
    /// Builds the skeleton of `conv(points)`; all points must satisfy
    /// `h·x = const` for the primitive normal `h`.
    pub fn new(h: &IVec, points: &[IVec]) -> Result<Self> {
        let basis = PlaneBasis::new(h)?;
        let mut pts: Vec<IVec> = points.to_vec();
        pts.sort();
        pts.dedup();
        if pts.len() < 4 {
            return Err(Error::Degenerate(format!("{} points cannot span a 3-polytope", pts.len())));
        }
        let level = crate::matops::dot(h, &pts[0]);
        if pts.iter().any(|p| crate::matops::dot(h, p) != level) {
            return Err(Error::Contract("face points are not coplanar".into()));
        }
        let diffs: Vec<IVec> = pts.iter().map(|p| crate::matops::sub(p, &pts[0])).collect();
        if hnf_basis(&diffs)?.rank != 3 {
            return Err(Error::Degenerate("face points do not span a 3-dimensional polytope".into()));
        }
        let mut c3 = Vec::with_capacity(pts.len());
        for p in &pts {
            let y = basis.coordinates(p)?;
            c3.push([y[0], y[1], y[2]]);
        }
        let n = pts.len();

        // supporting planes through point triples
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut raw_faces: Vec<(Vec<usize>, [i128; 3])> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let u = sub3(&c3[j], &c3[i]);
                for k in j + 1..n {
                    let v = sub3(&c3[k], &c3[i]);
                    let mut nrm = cross(&u, &v);
                    if nrm == [0, 0, 0] {
                        continue;
                    }
                    let (mut pos, mut neg) = (false, false);
                    let mut on = Vec::new();
                    for (l, p) in c3.iter().enumerate() {
                        let s = dot3(&nrm, &sub3(p, &c3[i]));
                        if s > 0 {
                            pos = true;
                        } else if s < 0 {
                            neg = true;
                        } else {
                            on.push(l);
                        }
                        if pos && neg {
                            break;
                        }
                    }
                    if pos && neg {
                        continue;
                    }
                    if seen.insert(on.clone()) {
                        if pos {
                            nrm = nrm.map(|x| -x);
                        }
                        raw_faces.push((on, nrm));
                    }
                }
            }
        }

        // cyclic order of the extreme points of each 2-face
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        for (on, nrm) in &raw_faces {
            let orient = |a: usize, b: usize, c: usize| -> i128 {
                det3(nrm, &sub3(&c3[b], &c3[a]), &sub3(&c3[c], &c3[a]))
            };
            let start = *on.iter().min_by_key(|&&l| pts[l]).unwrap_or(&on[0]);
            let mut cycle = vec![start];
            let mut cur = start;
            loop {
                let mut q = if on[0] == cur { on[1] } else { on[0] };
                for &r in on {
                    if r == cur || r == q {
                        continue;
                    }
                    let o = orient(cur, q, r);
                    let farther = {
                        let dq = sub3(&c3[q], &c3[cur]);
                        let dr = sub3(&c3[r], &c3[cur]);
                        dot3(&dr, &dr) > dot3(&dq, &dq)
                    };
                    if o < 0 || (o == 0 && farther) {
                        q = r;
                    }
                }
                if q == start {
                    break;
                }
                if cycle.len() > on.len() {
                    return Err(Error::Invariant("polygon walk did not close".into()));
                }
                cycle.push(q);
                cur = q;
            }
            cycles.push(cycle);
        }

        // keep extreme points only and reindex
        let extreme: BTreeSet<usize> = cycles.iter().flatten().copied().collect();
        let old: Vec<usize> = extreme.iter().copied().collect();
        let remap = |l: usize| old.binary_search(&l).expect("extreme point");
        let vertices: Vec<IVec> = old.iter().map(|&l| pts[l]).collect();
        let coords: Vec<P3> = old.iter().map(|&l| c3[l]).collect();
        let mut two_faces: Vec<Vec<usize>> = cycles
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(remap).collect();
                let m = (0..c.len()).min_by_key(|&i| c[i]).unwrap_or(0);
                c.rotate_left(m);
                c
            })
            .collect();
        two_faces.sort();
        let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        for c in &two_faces {
            for i in 0..c.len() {
                let (a, b) = (c[i], c[(i + 1) % c.len()]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        let sk = FaceSkeleton {
            vertices,
            coords,
            two_faces,
            edges: edges.into_iter().collect(),
        };
        let euler = sk.vertices.len() as i64 - sk.edges.len() as i64 + sk.two_faces.len() as i64;
        if euler != 2 {
            return Err(Error::Invariant(format!("face skeleton has Euler characteristic {euler}")));
        }
        Ok(sk)
    }

    /// Normalized volume: `3!` times the Euclidean volume in lattice
    /// coordinates of the plane, so a unimodular tetrahedron has volume 1.
    pub fn lattice_volume(&self) -> Result<u64> {
        let apex = &self.coords[0];
        let mut total: i128 = 0;
        for face in &self.two_faces {
            if face.contains(&0) {
                continue;
            }
            let p0 = sub3(&self.coords[face[0]], apex);
            for w in face[1..].windows(2) {
                let p1 = sub3(&self.coords[w[0]], apex);
                let p2 = sub3(&self.coords[w[1]], apex);
                total += det3(&p0, &p1, &p2).abs();
            }
        }
        if total == 0 {
            return Err(Error::Degenerate("zero-volume face".into()));
        }
        u64::try_from(total).map_err(|_| Error::Overflow("lattice volume"))
    }

    /// Vertex sets of the 2-faces, each sorted lexicographically.
    pub fn ridge_points(&self) -> Vec<Vec<IVec>> {
        self.two_faces
            .iter()
            .map(|c| {
                let mut v: Vec<IVec> = c.iter().map(|&i| self.vertices[i]).collect();
                v.sort();
                v
            })
            .collect()
    }
}
