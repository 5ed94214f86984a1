//! Integer lattices: Hermite normal form, integer kernels and unimodular
//! completion of primitive vectors.

use num_integer::Integer;

use super::IVec;
use crate::error::{Error, Result};

/// Hermite-normal-form basis of a sublattice of Z^4.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hnf {
    pub basis: Vec<IVec>,
    pub rank: usize,
}

fn ck(v: Option<i128>) -> Result<i128> {
    v.ok_or(Error::Overflow("lattice reduction"))
}

/// Row-style Hermite normal form in place. Returns the rank; rows past the
/// rank are zero. Pivots are positive and entries above a pivot are reduced
/// into `[0, pivot)`.
pub fn hnf_rows(rows: &mut [Vec<i128>], ncols: usize) -> Result<usize> {
    hnf_rows_prefix(rows, ncols, ncols)
}

/// Like [`hnf_rows`] but pivots only on the first `pivot_cols` columns; the
/// remaining columns ride along (used for kernel extraction).
fn hnf_rows_prefix(rows: &mut [Vec<i128>], ncols: usize, pivot_cols: usize) -> Result<usize> {
    let mut r = 0;
    let mut pivots = Vec::new();
    for col in 0..pivot_cols {
        if r == rows.len() {
            break;
        }
        // Euclid on the column below row r
        loop {
            let mut best: Option<usize> = None;
            for i in r..rows.len() {
                if rows[i][col] != 0
                    && best.is_none_or(|b| rows[i][col].abs() < rows[b][col].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            rows.swap(r, b);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][col] != 0 {
                    let q = Integer::div_floor(&rows[i][col], &rows[r][col]);
                    for j in 0..ncols {
                        rows[i][j] = ck(rows[i][j].checked_sub(ck(q.checked_mul(rows[r][j]))?))?;
                    }
                    if rows[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if rows[r][col] == 0 {
            continue;
        }
        if rows[r][col] < 0 {
            for x in rows[r].iter_mut() {
                *x = -*x;
            }
        }
        pivots.push((r, col));
        r += 1;
    }
    // reduce above pivots
    for &(pr, col) in &pivots {
        let p = rows[pr][col];
        for i in 0..pr {
            let q = Integer::div_floor(&rows[i][col], &p);
            if q != 0 {
                for j in 0..ncols {
                    rows[i][j] = ck(rows[i][j].checked_sub(ck(q.checked_mul(rows[pr][j]))?))?;
                }
            }
        }
    }
    Ok(r)
}

/// Hermite basis of the sublattice of Z^4 generated by `vectors`.
pub fn hnf_basis(vectors: &[IVec]) -> Result<Hnf> {
    let mut rows: Vec<Vec<i128>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| x as i128).collect())
        .collect();
    let rank = hnf_rows(&mut rows, 4)?;
    let basis = rows[..rank]
        .iter()
        .map(|r| {
            let mut out = [0i64; 4];
            for (o, &x) in out.iter_mut().zip(r) {
                *o = i64::try_from(x).map_err(|_| Error::Overflow("hnf basis"))?;
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Hnf { basis, rank })
}

/// Basis (in Hermite form) of the integer kernel `{x in Z^n : M x = 0}` of
/// the matrix whose rows are `rows`, each of length `ncols`.
pub fn integer_kernel(rows: &[Vec<i128>], ncols: usize) -> Result<Vec<Vec<i128>>> {
    let m = rows.len();
    // [M^T | I]: unimodular row operations on M^T, tracked in the identity
    let mut aug: Vec<Vec<i128>> = (0..ncols)
        .map(|j| {
            let mut row: Vec<i128> = rows.iter().map(|r| r[j]).collect();
            row.extend((0..ncols).map(|k| i128::from(k == j)));
            row
        })
        .collect();
    let rank = hnf_rows_prefix(&mut aug, m + ncols, m)?;
    let mut kernel: Vec<Vec<i128>> = aug[rank..].iter().map(|r| r[m..].to_vec()).collect();
    let k = hnf_rows(&mut kernel, ncols)?;
    kernel.truncate(k);
    Ok(kernel)
}

/// Extended gcd over a vector: returns `(g, u)` with `sum u_i v_i = g >= 0`.
pub fn gcd_vector(v: &[i64]) -> Result<(i64, Vec<i64>)> {
    let mut g = 0i64;
    let mut u = vec![0i64; v.len()];
    for (i, &x) in v.iter().enumerate() {
        let e = g.extended_gcd(&x);
        // e.gcd = e.x * g + e.y * x
        for c in u.iter_mut().take(i) {
            *c = c.checked_mul(e.x).ok_or(Error::Overflow("gcd cofactors"))?;
        }
        u[i] = e.y;
        g = e.gcd;
    }
    if g < 0 {
        g = -g;
        for c in u.iter_mut() {
            *c = -*c;
        }
    }
    Ok((g, u))
}

fn gcd_all(v: &[i64]) -> u64 {
    v.iter().fold(0u64, |g, &x| g.gcd(&x.unsigned_abs()))
}

pub fn is_primitive(v: &IVec) -> bool {
    gcd_all(v) == 1
}

/// Divides by the gcd of the entries; the zero vector is returned unchanged.
pub fn primitive(v: &IVec) -> IVec {
    let g = gcd_all(v) as i64;
    if g <= 1 {
        return *v;
    }
    v.map(|x| x / g)
}

/// A basis of Z^4 adapted to the primitive functional `h`: the first three
/// columns span `{x : h.x = 0}` (in Hermite form), the fourth column `u`
/// satisfies `h.u = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneBasis {
    pub directions: [IVec; 3],
    pub transversal: IVec,
}

impl PlaneBasis {
    pub fn new(h: &IVec) -> Result<Self> {
        let (g, u) = gcd_vector(h)?;
        if g != 1 {
            return Err(Error::Contract(format!("normal {h:?} is not primitive")));
        }
        let ker = integer_kernel(&[h.iter().map(|&x| x as i128).collect()], 4)?;
        if ker.len() != 3 {
            return Err(Error::Invariant(format!("kernel of {h:?} has rank {}", ker.len())));
        }
        let to_ivec = |r: &Vec<i128>| -> Result<IVec> {
            let mut out = [0i64; 4];
            for (o, &x) in out.iter_mut().zip(r) {
                *o = i64::try_from(x).map_err(|_| Error::Overflow("plane basis"))?;
            }
            Ok(out)
        };
        Ok(PlaneBasis {
            directions: [to_ivec(&ker[0])?, to_ivec(&ker[1])?, to_ivec(&ker[2])?],
            transversal: [u[0], u[1], u[2], u[3]],
        })
    }

    /// Coordinates of `x` in this basis: `x = sum y_i d_i + y_3 u`, so `y_3 = h.x`.
    pub fn coordinates(&self, x: &IVec) -> Result<[i64; 4]> {
        let cols = [
            self.directions[0],
            self.directions[1],
            self.directions[2],
            self.transversal,
        ];
        let mut m = [[0i64; 4]; 4];
        for (j, c) in cols.iter().enumerate() {
            for i in 0..4 {
                m[i][j] = c[i];
            }
        }
        let w = super::IntMatrix(m);
        let inv = w.inverse()?;
        inv.apply(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_examples() {
        let e = hnf_basis(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]).unwrap();
        assert_eq!(e.rank, 3);
        assert_eq!(e.basis, vec![[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]);
        let g = hnf_basis(&[[2, 0, 0, 0], [3, 0, 0, 0]]).unwrap();
        assert_eq!(g.rank, 1);
        assert_eq!(g.basis, vec![[1, 0, 0, 0]]);
        assert_eq!(hnf_basis(&[]).unwrap().rank, 0);
    }

    #[test]
    fn hnf_idempotent() {
        let v = [[4, 6, -2, 8], [1, -3, 5, 7], [2, 2, 2, 2], [6, 3, 3, 15]];
        let a = hnf_basis(&v).unwrap();
        let b = hnf_basis(&a.basis).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn kernel_of_functional() {
        let k = integer_kernel(&[vec![2, 3, 0, 5]], 4).unwrap();
        assert_eq!(k.len(), 3);
        for r in &k {
            assert_eq!(2 * r[0] + 3 * r[1] + 5 * r[3], 0);
        }
    }

    #[test]
    fn plane_basis_is_unimodular() {
        let h = [0, 2, -4, 1];
        let pb = PlaneBasis::new(&h).unwrap();
        assert_eq!(h.iter().zip(&pb.transversal).map(|(a, b)| a * b).sum::<i64>(), 1);
        let y = pb.coordinates(&[12, 5, 2, 1]).unwrap();
        assert_eq!(y[3], 2 * 5 - 4 * 2 + 1);
        assert!(PlaneBasis::new(&[0, 2, 4, 2]).is_err());
    }

    #[test]
    fn extended_gcd_vector() {
        let v = [6, 10, 15, -7];
        let (g, u) = gcd_vector(&v).unwrap();
        assert_eq!(g, 1);
        assert_eq!(v.iter().zip(&u).map(|(a, b)| a * b).sum::<i64>(), 1);
        assert_eq!(gcd_vector(&[0, -4, 6, 0]).unwrap().0, 2);
    }
}
