//! 4x4 integer matrices: the companion family `A_{a,b,c,d}`, determinants,
//! characteristic polynomials, exact inverses and generator words.

mod lattice;
mod word;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::IntPoly;

pub use lattice::{
    gcd_vector, hnf_basis, hnf_rows, integer_kernel, is_primitive, primitive, Hnf, PlaneBasis,
};
pub use word::{eval_word, GeneratorWord, WordFactor};

/// Ambient dimension (the lattice is Z^DIM).
pub const DIM: usize = 4;

/// Integer 4-vector.
pub type IVec = [i64; DIM];

pub fn dot(a: &IVec, b: &IVec) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

pub fn sub(a: &IVec, b: &IVec) -> IVec {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

pub fn add(a: &IVec, b: &IVec) -> IVec {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

pub fn max_norm(v: &IVec) -> i64 {
    v.iter().map(|x| x.abs()).max().unwrap_or(0)
}

/// 4x4 determinant of row vectors, exact in i128 for moderate entries.
pub fn det4(rows: &[IVec; 4]) -> Result<i128> {
    let m = rows.map(|r| r.map(|x| x as i128));
    let ov = || Error::Overflow("determinant");
    let det3 = |r0: [i128; 3], r1: [i128; 3], r2: [i128; 3]| -> Option<i128> {
        let a = r1[1].checked_mul(r2[2])?.checked_sub(r1[2].checked_mul(r2[1])?)?;
        let b = r1[0].checked_mul(r2[2])?.checked_sub(r1[2].checked_mul(r2[0])?)?;
        let c = r1[0].checked_mul(r2[1])?.checked_sub(r1[1].checked_mul(r2[0])?)?;
        r0[0]
            .checked_mul(a)?
            .checked_sub(r0[1].checked_mul(b)?)?
            .checked_add(r0[2].checked_mul(c)?)
    };
    let minor = |j: usize| -> [[i128; 3]; 3] {
        let mut out = [[0i128; 3]; 3];
        for (i, row) in m[1..].iter().enumerate() {
            let mut k = 0;
            for (jj, &x) in row.iter().enumerate() {
                if jj != j {
                    out[i][k] = x;
                    k += 1;
                }
            }
        }
        out
    };
    let mut total: i128 = 0;
    for j in 0..4 {
        if m[0][j] == 0 {
            continue;
        }
        let mi = minor(j);
        let d = det3(mi[0], mi[1], mi[2]).ok_or_else(ov)?;
        let term = m[0][j].checked_mul(d).ok_or_else(ov)?;
        total = if j % 2 == 0 {
            total.checked_add(term)
        } else {
            total.checked_sub(term)
        }
        .ok_or_else(ov)?;
    }
    Ok(total)
}

/// The operator `A_{a,b,c,d}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CompanionSpec {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl CompanionSpec {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        CompanionSpec { a, b, c, d }
    }
}

/// Rows `(0,1,0,0), (0,0,1,0), (0,0,0,1), (a,b,c,d)`.
pub fn companion(spec: CompanionSpec) -> IntMatrix {
    IntMatrix([
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [spec.a, spec.b, spec.c, spec.d],
    ])
}

/// Integer 4x4 matrix acting on column vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntMatrix(pub [[i64; 4]; 4]);

fn ck<T>(v: Option<T>, what: &'static str) -> Result<T> {
    v.ok_or(Error::Overflow(what))
}

impl IntMatrix {
    pub fn identity() -> Self {
        let mut m = [[0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        IntMatrix(m)
    }

    pub fn zero() -> Self {
        IntMatrix([[0; 4]; 4])
    }

    pub fn scalar(k: i64) -> Self {
        let mut m = Self::identity();
        for i in 0..4 {
            m.0[i][i] = k;
        }
        m
    }

    pub fn rows(&self) -> &[[i64; 4]; 4] {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        let mut m = [[0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.0[j][i];
            }
        }
        IntMatrix(m)
    }

    pub fn abs_sum(&self) -> i64 {
        self.0.iter().flatten().map(|x| x.abs()).sum()
    }

    pub fn checked_mul(&self, o: &IntMatrix) -> Result<IntMatrix> {
        let mut m = [[0i64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc: i128 = 0;
                for k in 0..4 {
                    acc += self.0[i][k] as i128 * o.0[k][j] as i128;
                }
                m[i][j] = ck(i64::try_from(acc).ok(), "matrix product")?;
            }
        }
        Ok(IntMatrix(m))
    }

    pub fn checked_add(&self, o: &IntMatrix) -> Result<IntMatrix> {
        let mut m = self.0;
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = ck(m[i][j].checked_add(o.0[i][j]), "matrix sum")?;
            }
        }
        Ok(IntMatrix(m))
    }

    pub fn checked_scale(&self, k: i64) -> Result<IntMatrix> {
        let mut m = self.0;
        for x in m.iter_mut().flatten() {
            *x = ck(x.checked_mul(k), "matrix scaling")?;
        }
        Ok(IntMatrix(m))
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix(self.0.map(|r| r.map(|x| -x)))
    }

    pub fn apply(&self, x: &IVec) -> Result<IVec> {
        let mut out = [0i64; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = ck(i64::try_from(dot(&self.0[i], x)).ok(), "matrix-vector product")?;
        }
        Ok(out)
    }

    /// Row vector times matrix: `(h M)_j = sum_i h_i M_ij`.
    pub fn apply_left(&self, h: &IVec) -> Result<IVec> {
        self.transpose().apply(h)
    }

    pub fn det_i128(&self) -> Result<i128> {
        det4(&self.0)
    }

    pub fn det(&self) -> BigInt {
        match self.det_i128() {
            Ok(d) => BigInt::from(d),
            Err(_) => {
                // cannot overflow in BigInt; rare path
                let c = self.char_poly();
                c.coeff(0)
            }
        }
    }

    /// `det(tI - M)` by the Faddeev-LeVerrier recurrence over BigInt.
    pub fn char_poly(&self) -> IntPoly {
        let m: Vec<Vec<BigInt>> = self
            .0
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let n = 4;
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::from(1);
        let mut mk = vec![vec![BigInt::zero(); n]; n];
        for k in 1..=n {
            // mk <- M * mk + c_{n-k+1} I
            let mut next = vec![vec![BigInt::zero(); n]; n];
            for i in 0..n {
                for j in 0..n {
                    let mut acc = BigInt::zero();
                    for l in 0..n {
                        acc += &m[i][l] * &mk[l][j];
                    }
                    next[i][j] = acc;
                }
                next[i][i] += &coeffs[n - k + 1];
            }
            mk = next;
            let mut tr = BigInt::zero();
            for i in 0..n {
                for l in 0..n {
                    tr += &m[i][l] * &mk[l][i];
                }
            }
            coeffs[n - k] = -tr / BigInt::from(k as i64);
        }
        IntPoly::new(coeffs)
    }

    /// Classical adjugate: `adj(M) M = M adj(M) = det(M) I`.
    pub fn adjugate(&self) -> Result<IntMatrix> {
        let mut out = [[0i64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                // cofactor C_ji goes to out[i][j]
                let mut rows = self.0;
                for (r, row) in rows.iter_mut().enumerate() {
                    row[i] = i64::from(r == j);
                }
                out[i][j] = ck(i64::try_from(det4(&rows)?).ok(), "adjugate")?;
            }
        }
        Ok(IntMatrix(out))
    }

    /// Inverse over Z, defined only when `|det| = 1`.
    pub fn inverse(&self) -> Result<IntMatrix> {
        let d = self.det_i128()?;
        if d.abs() != 1 {
            return Err(Error::Evaluation(format!(
                "matrix with determinant {d} is not invertible over Z"
            )));
        }
        self.adjugate()?.checked_scale(d as i64)
    }

    pub fn pow(&self, k: i32) -> Result<IntMatrix> {
        let base = if k < 0 { self.inverse()? } else { *self };
        let mut acc = IntMatrix::identity();
        for _ in 0..k.unsigned_abs() {
            acc = acc.checked_mul(&base)?;
        }
        Ok(acc)
    }

    pub fn commutes_with(&self, o: &IntMatrix) -> Result<bool> {
        Ok(self.checked_mul(o)? == o.checked_mul(self)?)
    }

    /// Evaluates an integer polynomial at this matrix (Horner).
    pub fn eval_poly(&self, p: &IntPoly) -> Result<IntMatrix> {
        let mut acc = IntMatrix::zero();
        for c in p.coeffs().iter().rev() {
            let c = ck(c.to_i64(), "polynomial coefficient")?;
            acc = acc
                .checked_mul(self)?
                .checked_add(&IntMatrix::scalar(c))?;
        }
        Ok(acc)
    }

    /// Recognizes the companion shape `A_{a,b,c,d}`.
    pub fn as_companion(&self) -> Option<CompanionSpec> {
        let r = &self.0;
        let shape = r[0] == [0, 1, 0, 0] && r[1] == [0, 0, 1, 0] && r[2] == [0, 0, 0, 1];
        shape.then(|| CompanionSpec::new(r[3][0], r[3][1], r[3][2], r[3][3]))
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .0
            .iter()
            .map(|r| format!("[{}, {}, {}, {}]", r[0], r[1], r[2], r[3]))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}
