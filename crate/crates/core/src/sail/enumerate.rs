//! Lattice points of the open orthant: inside a max-norm box, or below a
//! level of a functional that is positive on the cone (a compact simplex).

use rayon::prelude::*;

use crate::cone::Orthant;
use crate::error::{Error, Result};
use crate::matops::{dot, IVec};

/// Upper limit on the number of `(x0, x1, x2)` columns scanned by one enumeration.
pub const MAX_COLUMNS: i64 = 400_000_000;

fn member(orthant: &Orthant, x: &IVec) -> Result<bool> {
    match orthant.contains_fast(x) {
        Some(b) => Ok(b),
        None => orthant.contains(x),
    }
}

/// Nonzero integer points with max-norm at most `bound` in the open orthant,
/// in lexicographic order.
pub fn enumerate_cone_points(orthant: &Orthant, bound: i64) -> Result<Vec<IVec>> {
    if bound < 1 {
        return Err(Error::Domain(format!("enumeration bound {bound} must be positive")));
    }
    let cols: Vec<i64> = (-bound..=bound).collect();
    let chunks: Vec<Result<Vec<IVec>>> = cols
        .par_iter()
        .map(|&x0| {
            let mut out = Vec::new();
            for x1 in -bound..=bound {
                for x2 in -bound..=bound {
                    for x3 in -bound..=bound {
                        let x = [x0, x1, x2, x3];
                        if x != [0; 4] && member(orthant, &x)? {
                            out.push(x);
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let mut out = Vec::new();
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// All lattice points `x` of the open orthant with `h·x <= level`, in
/// lexicographic order. `h` must be positive on the closed cone, which makes
/// the region a simplex with apex at the origin.
pub fn points_below(orthant: &Orthant, h: &IVec, level: i64) -> Result<Vec<IVec>> {
    if level < 1 {
        return Ok(Vec::new());
    }
    if !orthant.functional_positive(h)? {
        return Err(Error::Contract(format!(
            "functional {h:?} is not positive on the cone"
        )));
    }
    let rays = orthant.rays_f64();
    let hf = h.map(|v| v as f64);
    let lvl = level as f64;
    let mut lo = [0f64; 4];
    let mut hi = [0f64; 4];
    for r in &rays {
        let hr: f64 = hf.iter().zip(r).map(|(a, b)| a * b).sum();
        for i in 0..4 {
            let v = lvl * r[i] / hr;
            lo[i] = lo[i].min(v);
            hi[i] = hi[i].max(v);
        }
    }
    let mut blo = [0i64; 4];
    let mut bhi = [0i64; 4];
    for i in 0..4 {
        let margin = 1.0 + 1e-9 * (lo[i].abs() + hi[i].abs());
        if !(lo[i].is_finite() && hi[i].is_finite()) || hi[i] - lo[i] > 1e15 {
            return Err(Error::Resource(format!("simplex for {h:?} at level {level} is too large")));
        }
        blo[i] = (lo[i] - margin).floor() as i64;
        bhi[i] = (hi[i] + margin).ceil() as i64;
    }
    // simplex vertices: the origin and the four scaled rays
    let mut verts = vec![[0f64; 4]];
    for r in &rays {
        let hr: f64 = hf.iter().zip(r).map(|(a, b)| a * b).sum();
        verts.push(r.map(|v| lvl * v / hr));
    }
    let columns = count_columns(&verts, &blo, &bhi);
    if columns > MAX_COLUMNS {
        return Err(Error::Resource(format!(
            "enumeration below level {level} of {h:?} needs {columns} columns"
        )));
    }
    // per-form coefficients, oriented so that membership reads `> 0`
    let forms: Vec<[f64; 4]> = orthant
        .forms()
        .iter()
        .zip(orthant.sigma().0)
        .map(|(f, s)| f.coeffs_f64().map(|c| c * s as f64))
        .collect();
    let xs: Vec<i64> = (blo[0]..=bhi[0]).collect();
    let chunks: Vec<Result<Vec<IVec>>> = xs
        .par_iter()
        .map(|&x0| {
            let mut out = Vec::new();
            let (l1, h1) = slice_range(&verts, &[x0 as f64], blo[1], bhi[1]);
            for x1 in l1..=h1 {
                let (l2, h2) = slice_range(&verts, &[x0 as f64, x1 as f64], blo[2], bhi[2]);
                for x2 in l2..=h2 {
                    // x3 range from the level constraint and the four forms
                    let rest = h[0] as i128 * x0 as i128 + h[1] as i128 * x1 as i128 + h[2] as i128 * x2 as i128;
                    let mut t_lo = blo[3] as f64;
                    let mut t_hi = bhi[3] as f64;
                    if h[3] != 0 {
                        let b = (level as i128 - rest) as f64 / h[3] as f64;
                        if h[3] > 0 {
                            t_hi = t_hi.min(b);
                        } else {
                            t_lo = t_lo.max(b);
                        }
                    }
                    for c in &forms {
                        if c[3].abs() < 1e-12 {
                            continue;
                        }
                        let partial = c[0] * x0 as f64 + c[1] * x1 as f64 + c[2] * x2 as f64;
                        let b = -partial / c[3];
                        if c[3] > 0.0 {
                            t_lo = t_lo.max(b);
                        } else {
                            t_hi = t_hi.min(b);
                        }
                    }
                    if t_lo > t_hi + 2.0 {
                        continue;
                    }
                    let from = ((t_lo - 1.0).floor() as i64).max(blo[3]);
                    let to = ((t_hi + 1.0).ceil() as i64).min(bhi[3]);
                    for x3 in from..=to {
                        let x = [x0, x1, x2, x3];
                        if x == [0; 4] || dot(h, &x) > level as i128 {
                            continue;
                        }
                        if member(orthant, &x)? {
                            out.push(x);
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let mut out = Vec::new();
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// Integer range of coordinate `k = fixed.len()` over the points of
/// `conv(verts)` whose first `k` coordinates equal `fixed`, padded by one
/// and clipped to the box.
fn slice_range(verts: &[[f64; 4]], fixed: &[f64], blo: i64, bhi: i64) -> (i64, i64) {
    let k = fixed.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let n = verts.len();
    let mut take = |v: f64| {
        lo = lo.min(v);
        hi = hi.max(v);
    };
    if k == 1 {
        // segments crossing the hyperplane x0 = fixed[0]
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (verts[i], verts[j]);
                let d = b[0] - a[0];
                if d.abs() < 1e-12 {
                    if (a[0] - fixed[0]).abs() < 1e-9 {
                        take(a[1]);
                        take(b[1]);
                    }
                    continue;
                }
                let t = (fixed[0] - a[0]) / d;
                if (-1e-9..=1.0 + 1e-9).contains(&t) {
                    take(a[1] + t * (b[1] - a[1]));
                }
            }
        }
    } else {
        // triangles pierced by the line through (fixed[0], fixed[1])
        for i in 0..n {
            for j in i + 1..n {
                for l in j + 1..n {
                    let (a, b, c) = (verts[i], verts[j], verts[l]);
                    let (ux, uy) = (b[0] - a[0], b[1] - a[1]);
                    let (vx, vy) = (c[0] - a[0], c[1] - a[1]);
                    let det = ux * vy - uy * vx;
                    let scale = (ux.abs() + uy.abs()) * (vx.abs() + vy.abs());
                    if det.abs() <= 1e-12 * scale.max(1e-300) {
                        continue;
                    }
                    let (px, py) = (fixed[0] - a[0], fixed[1] - a[1]);
                    let s = (px * vy - py * vx) / det;
                    let t = (ux * py - uy * px) / det;
                    let tol = 1e-9;
                    if s >= -tol && t >= -tol && s + t <= 1.0 + tol {
                        take(a[2] + s * (b[2] - a[2]) + t * (c[2] - a[2]));
                    }
                }
            }
        }
    }
    if lo > hi {
        return (1, 0);
    }
    let pad = 1.0 + 1e-9 * (lo.abs() + hi.abs());
    (((lo - pad).floor() as i64).max(blo), ((hi + pad).ceil() as i64).min(bhi))
}

/// Number of `(x0, x1, x2)` columns the enumeration will visit.
fn count_columns(verts: &[[f64; 4]], blo: &[i64; 4], bhi: &[i64; 4]) -> i64 {
    let mut total: i64 = 0;
    for x0 in blo[0]..=bhi[0] {
        let (l1, h1) = slice_range(verts, &[x0 as f64], blo[1], bhi[1]);
        for x1 in l1..=h1 {
            let (l2, h2) = slice_range(verts, &[x0 as f64, x1 as f64], blo[2], bhi[2]);
            total = total.saturating_add((h2 - l2 + 1).max(0));
            if total > MAX_COLUMNS {
                return total;
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matops::{companion, CompanionSpec};

    fn orthant_a1() -> Orthant {
        Orthant::containing(&companion(CompanionSpec::new(1, -3, 0, 4)), &[0, 0, 0, 1]).unwrap()
    }

    #[test]
    fn box_enumeration() {
        let o = orthant_a1();
        let one = enumerate_cone_points(&o, 1).unwrap();
        assert!(one.contains(&[0, 0, 0, 1]));
        assert!(one.len() <= 80);
        let three = enumerate_cone_points(&o, 3).unwrap();
        assert!(three.contains(&[-3, -2, -1, 1]));
        assert!(enumerate_cone_points(&o, 0).is_err());
        let mut sorted = three.clone();
        sorted.sort();
        assert_eq!(sorted, three);
    }

    #[test]
    fn simplex_matches_box_filter() {
        let o = orthant_a1();
        let h = [0, 2, -4, 1];
        let below = points_below(&o, &h, 3).unwrap();
        // brute force over a box well beyond the simplex
        let mut brute = Vec::new();
        let r = -40i64..=40;
        for x0 in r.clone() {
            for x1 in r.clone() {
                for x2 in r.clone() {
                    for x3 in r.clone() {
                        let x = [x0, x1, x2, x3];
                        if dot(&h, &x) <= 3 && o.contains(&x).unwrap() {
                            brute.push(x);
                        }
                    }
                }
            }
        }
        assert!(below.iter().all(|x| x.iter().all(|c| c.abs() < 35)));
        assert_eq!(below, brute);
        assert!(below.iter().all(|x| dot(&h, x) >= 1));
    }

    #[test]
    fn requires_positive_functional() {
        let o = orthant_a1();
        assert!(matches!(points_below(&o, &[0, 0, 0, 1], 3), Err(Error::Contract(_))));
    }
}
