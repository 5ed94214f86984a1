//! Certified pieces of the sail: lattice enumeration in an orthant, exact
//! hulls, facet certification and patch assembly by ridge pivoting.

mod certify;
mod enumerate;
mod hull;
mod patch;
mod skeleton;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matops::{dot, integer_kernel, is_primitive, IVec, IntMatrix};

pub use certify::{certify_facet, supporting_face, Certification};
pub use enumerate::{enumerate_cone_points, points_below, MAX_COLUMNS};
pub use hull::hull_facets;
pub use patch::{build_sail_patch, lift_to_facet, pivot, PatchOptions, SailPatch};
pub use skeleton::FaceSkeleton;

/// A nonzero integer point of the orthant.
pub type LatticePoint = IVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FacetStatus {
    Candidate,
    Certified,
    Spurious,
}

/// A 3-dimensional face: extreme points in lexicographic order on the plane
/// `normal·x = level`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Facet {
    pub vertices: Vec<LatticePoint>,
    pub normal: IVec,
    pub level: i64,
    pub status: FacetStatus,
}

impl Facet {
    /// Checks primitivity of the normal and that every vertex lies on the plane.
    pub fn new(normal: IVec, level: i64, mut vertices: Vec<LatticePoint>, status: FacetStatus) -> Result<Self> {
        if !is_primitive(&normal) {
            return Err(Error::Contract(format!("normal {normal:?} is not primitive")));
        }
        if let Some(v) = vertices.iter().find(|v| dot(&normal, v) != level as i128) {
            return Err(Error::Contract(format!("vertex {v:?} is off the plane {normal:?}·x = {level}")));
        }
        vertices.sort();
        vertices.dedup();
        Ok(Facet { vertices, normal, level, status })
    }

    /// The plane `(normal, level)`, which determines a sail facet.
    pub fn key(&self) -> (IVec, i64) {
        (self.normal, self.level)
    }

    pub fn has_vertex(&self, v: &IVec) -> bool {
        self.vertices.binary_search(v).is_ok()
    }

    pub fn skeleton(&self) -> Result<FaceSkeleton> {
        FaceSkeleton::new(&self.normal, &self.vertices)
    }

    /// Image under a unimodular map; the normal transforms by `g^{-1}`.
    pub fn image(&self, g: &IntMatrix) -> Result<Facet> {
        let inv = g.inverse()?;
        let normal = inv.apply_left(&self.normal)?;
        let vertices = self.vertices.iter().map(|v| g.apply(v)).collect::<Result<Vec<_>>>()?;
        Facet::new(normal, self.level, vertices, FacetStatus::Candidate)
    }

    /// Sum of the vertices; equivariant under linear maps.
    pub fn vertex_sum(&self) -> IVec {
        let mut s = [0i64; 4];
        for v in &self.vertices {
            for i in 0..4 {
                s[i] += v[i];
            }
        }
        s
    }
}

/// Affine functional `x ↦ h·x - c`, kept in wide integers during pivoting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Affine {
    pub h: [i128; 4],
    pub c: i128,
}

impl Affine {
    pub fn from_plane(h: &IVec, c: i64) -> Self {
        Affine { h: h.map(|v| v as i128), c: c as i128 }
    }

    pub fn eval(&self, x: &IVec) -> i128 {
        self.h[0] * x[0] as i128 + self.h[1] * x[1] as i128 + self.h[2] * x[2] as i128 + self.h[3] * x[3] as i128
            - self.c
    }

    fn combine(a: i128, f: &Affine, b: i128, g: &Affine) -> Result<Affine> {
        let mul = |x: i128, y: i128| x.checked_mul(y).ok_or(Error::Overflow("pivot"));
        let mut h = [0i128; 4];
        for i in 0..4 {
            h[i] = mul(a, f.h[i])?
                .checked_sub(mul(b, g.h[i])?)
                .ok_or(Error::Overflow("pivot"))?;
        }
        let c = mul(a, f.c)?.checked_sub(mul(b, g.c)?).ok_or(Error::Overflow("pivot"))?;
        Ok(Affine { h, c }.reduced())
    }

    /// `f(p)·g - g(p)·f`: zero at `p`, proportional to `g` on `{f = 0}`.
    pub fn rotate(f: &Affine, g: &Affine, p: &IVec) -> Result<Affine> {
        Self::combine(f.eval(p), g, g.eval(p), f)
    }

    pub fn neg(&self) -> Affine {
        Affine { h: self.h.map(|v| -v), c: -self.c }
    }

    fn reduced(self) -> Affine {
        let mut g: i128 = self.c.abs();
        for &v in &self.h {
            g = num_integer::Integer::gcd(&g, &v);
        }
        if g <= 1 {
            return self;
        }
        Affine { h: self.h.map(|v| v / g), c: self.c / g }
    }

    pub fn is_parallel(&self, o: &Affine) -> bool {
        let a = [self.h[0], self.h[1], self.h[2], self.h[3], self.c];
        let b = [o.h[0], o.h[1], o.h[2], o.h[3], o.c];
        for i in 0..5 {
            for j in i + 1..5 {
                if a[i] * b[j] != a[j] * b[i] {
                    return false;
                }
            }
        }
        true
    }

    /// Narrow to `(h, c)` with `h` primitive.
    pub fn plane(&self) -> Result<(IVec, i64)> {
        let r = self.reduced();
        let mut h = [0i64; 4];
        for i in 0..4 {
            h[i] = i64::try_from(r.h[i]).map_err(|_| Error::Overflow("facet normal"))?;
        }
        if !is_primitive(&h) {
            return Err(Error::Invariant(format!("supporting plane {h:?} misses the lattice")));
        }
        let c = i64::try_from(r.c).map_err(|_| Error::Overflow("facet level"))?;
        Ok((h, c))
    }
}

/// An affine functional vanishing on `points` and not parallel to `avoid`.
pub(crate) fn functional_through(points: &[IVec], avoid: &Affine) -> Result<Affine> {
    let rows: Vec<Vec<i128>> = points
        .iter()
        .map(|x| vec![x[0] as i128, x[1] as i128, x[2] as i128, x[3] as i128, -1])
        .collect();
    for k in integer_kernel(&rows, 5)? {
        let f = Affine { h: [k[0], k[1], k[2], k[3]], c: k[4] };
        if !f.is_parallel(avoid) && f.h != [0; 4] {
            return Ok(f);
        }
    }
    Err(Error::Invariant("no independent functional through the face".into()))
}
