//! Eigen-hyperplanes of a hyperbolic operator, the open orthants they cut
//! out, exact membership tests and logarithmic coordinates.
//!
//! Every eigenvalue `λ` is a `RealAlgebraic` root of the irreducible
//! characteristic polynomial χ. The left eigenvector for `λ` has coordinates
//! `q_k(λ)` for integer polynomials `q_k`, so `L(x) = Σ q_k(λ) x_k` is an
//! integer polynomial evaluated at `λ` and its sign is decided exactly.
//! A floating filter with a conservative error bound answers the easy cases.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{algebraic_sign, is_irreducible, isolate_real_roots, IntPoly, RealAlgebraic, Sign};
use crate::matops::{IVec, IntMatrix};

/// Eigenvalue intervals are refined to this many bits at construction.
pub const ROOT_BITS: u32 = 96;

/// Default precision (bits) for log-coordinate enclosures.
pub const DEFAULT_PRECISION: u32 = 128;

/// Relative slack of the floating filter; far above the real rounding error.
const FILTER_SLACK: f64 = 1e-10;

/// A linear form whose kernel is one eigen-hyperplane of the operator.
#[derive(Clone, Debug)]
pub struct EigenForm {
    pub root: RealAlgebraic,
    /// Left eigenvector coordinates as polynomials in the eigenvalue.
    pub coeffs: [IntPoly; 4],
    /// Right eigenvector coordinates as polynomials in the eigenvalue.
    pub ray: [IntPoly; 4],
    coeffs_f64: [f64; 4],
    ray_f64: [f64; 4],
}

impl EigenForm {
    fn new(root: RealAlgebraic, coeffs: [IntPoly; 4], ray: [IntPoly; 4]) -> Self {
        let mid = root.midpoint();
        let approx = |p: &IntPoly| p.eval_rat(&mid).to_f64().unwrap_or(f64::NAN);
        let coeffs_f64 = [0, 1, 2, 3].map(|k| approx(&coeffs[k]));
        let ray_f64 = [0, 1, 2, 3].map(|k| approx(&ray[k]));
        EigenForm {
            root,
            coeffs,
            ray,
            coeffs_f64,
            ray_f64,
        }
    }

    pub fn eigenvalue_f64(&self) -> f64 {
        self.root.to_f64()
    }

    pub fn coeffs_f64(&self) -> [f64; 4] {
        self.coeffs_f64
    }

    pub fn ray_f64(&self) -> [f64; 4] {
        self.ray_f64
    }

    /// The polynomial `Σ q_k(t) x_k`.
    pub fn poly_at(&self, x: &IVec) -> IntPoly {
        combine(&self.coeffs, x)
    }

    pub fn eval_f64(&self, x: &IVec) -> f64 {
        x.iter().zip(&self.coeffs_f64).map(|(&a, b)| a as f64 * b).sum()
    }

    /// Exact sign of `L(x)`.
    pub fn sign(&self, x: &IVec) -> Result<Sign> {
        let v = self.eval_f64(x);
        let scale: f64 = x
            .iter()
            .zip(&self.coeffs_f64)
            .map(|(&a, b)| (a as f64).abs() * (b.abs() + 1.0))
            .sum();
        if v.abs() > scale * FILTER_SLACK {
            return Ok(if v > 0.0 { Sign::Positive } else { Sign::Negative });
        }
        Ok(algebraic_sign(&self.poly_at(x), &self.root)?.0)
    }

    /// Exact sign of `h · r` for the right eigenvector `r`.
    pub fn ray_pairing_sign(&self, h: &IVec) -> Result<Sign> {
        let v: f64 = h.iter().zip(&self.ray_f64).map(|(&a, b)| a as f64 * b).sum();
        let scale: f64 = h
            .iter()
            .zip(&self.ray_f64)
            .map(|(&a, b)| (a as f64).abs() * (b.abs() + 1.0))
            .sum();
        if v.abs() > scale * FILTER_SLACK {
            return Ok(if v > 0.0 { Sign::Positive } else { Sign::Negative });
        }
        Ok(algebraic_sign(&combine(&self.ray, h), &self.root)?.0)
    }

    /// Rational enclosure `[lo, hi]` of `|L(x)|` with relative width below
    /// `2^-bits`.
    fn abs_enclosure(&self, x: &IVec, bits: u32) -> Result<(f64, f64)> {
        let p = self.poly_at(x);
        if p.is_zero() {
            return Err(Error::Invariant(format!("eigenform vanishes on {x:?}")));
        }
        let mut root = self.root.clone();
        let rel = BigRational::new(1.into(), BigInt::from(1) << bits.min(1000));
        for _ in 0..=root.budget() {
            let mid = root.midpoint();
            let radius = root.width() / BigRational::from_integer(2.into());
            let rmax = root.lo().abs().max(root.hi().abs());
            let mut bound = BigRational::zero();
            let mut rpow = BigRational::from_integer(1.into());
            for (k, c) in p.coeffs().iter().enumerate().skip(1) {
                bound += BigRational::from_integer(c.abs() * BigInt::from(k)) * &rpow;
                rpow *= &rmax;
            }
            bound *= radius;
            let v = p.eval_rat(&mid).abs();
            if !v.is_zero() && bound <= &v * &rel {
                let lo = (&v - &bound).to_f64().unwrap_or(f64::NAN);
                let hi = (&v + &bound).to_f64().unwrap_or(f64::NAN);
                return Ok((lo, hi));
            }
            root = root.bisect();
        }
        Err(Error::Budget(format!(
            "log coordinate of {x:?} not resolved to {bits} bits"
        )))
    }
}

fn combine(polys: &[IntPoly; 4], x: &IVec) -> IntPoly {
    let mut acc = IntPoly::zero();
    for (p, &xk) in polys.iter().zip(x) {
        if xk != 0 {
            acc = &acc + &p.scale(&BigInt::from(xk));
        }
    }
    acc
}

/// Determinant of a 3x3 matrix of polynomials.
fn det3(m: [[&IntPoly; 3]; 3]) -> IntPoly {
    let t = |a: &IntPoly, b: &IntPoly, c: &IntPoly| &(a * b) * c;
    let plus = [
        t(m[0][0], m[1][1], m[2][2]),
        t(m[0][1], m[1][2], m[2][0]),
        t(m[0][2], m[1][0], m[2][1]),
    ];
    let minus = [
        t(m[0][2], m[1][1], m[2][0]),
        t(m[0][0], m[1][2], m[2][1]),
        t(m[0][1], m[1][0], m[2][2]),
    ];
    let p = plus.iter().fold(IntPoly::zero(), |a, b| &a + b);
    minus.iter().fold(p, |a, b| &a - b)
}

/// Adjugate of `tI - M` reduced modulo the (monic) characteristic polynomial.
fn adjugate_mod(m: &IntMatrix, chi: &IntPoly) -> [[IntPoly; 4]; 4] {
    let entry = |i: usize, j: usize| -> IntPoly {
        let c = IntPoly::from_i64(&[-m.0[i][j]]);
        if i == j {
            &c + &IntPoly::var()
        } else {
            c
        }
    };
    let x: Vec<Vec<IntPoly>> = (0..4).map(|i| (0..4).map(|j| entry(i, j)).collect()).collect();
    let mut adj: [[IntPoly; 4]; 4] = Default::default();
    for i in 0..4 {
        for j in 0..4 {
            // adj[i][j] = (-1)^(i+j) det(minor without row j, column i)
            let rows: Vec<usize> = (0..4).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..4).filter(|&c| c != i).collect();
            let mm = [0, 1, 2].map(|a| [0, 1, 2].map(|b| &x[rows[a]][cols[b]]));
            let d = det3(mm);
            let d = if (i + j) % 2 == 1 { -&d } else { d };
            adj[i][j] = d.div_rem_monic(chi).1;
        }
    }
    adj
}

/// The four eigen-forms of a hyperbolic operator with irreducible
/// characteristic polynomial, ordered by increasing eigenvalue.
///
/// Companion matrices use the closed form `(λ³ - dλ² - cλ - b, λ² - dλ - c,
/// λ - d, 1)` for the left eigenvector and `(1, λ, λ², λ³)` for the right one.
pub fn eigen_forms(a: &IntMatrix) -> Result<Vec<EigenForm>> {
    let chi = a.char_poly();
    if !is_irreducible(&chi)? {
        return Err(Error::Classification(format!(
            "characteristic polynomial {chi} is reducible over Q"
        )));
    }
    let roots = isolate_real_roots(&chi)?;
    if roots.len() != 4 {
        return Err(Error::Classification(format!(
            "characteristic polynomial {chi} has {} real roots, operator is not hyperbolic",
            roots.len()
        )));
    }
    let (left, right) = match a.as_companion() {
        Some(s) => {
            let left = [
                IntPoly::from_i64(&[-s.b, -s.c, -s.d, 1]),
                IntPoly::from_i64(&[-s.c, -s.d, 1]),
                IntPoly::from_i64(&[-s.d, 1]),
                IntPoly::from_i64(&[1]),
            ];
            let right = [0, 1, 2, 3].map(|k| IntPoly::monomial(1.into(), k));
            (left, right)
        }
        None => {
            let adj = adjugate_mod(a, &chi);
            let row = (0..4)
                .find(|&i| adj[i].iter().any(|p| !p.is_zero()))
                .ok_or_else(|| Error::Invariant("adjugate of tI - A vanishes".into()))?;
            let col = (0..4)
                .find(|&j| (0..4).any(|i| !adj[i][j].is_zero()))
                .ok_or_else(|| Error::Invariant("adjugate of tI - A vanishes".into()))?;
            let left = [0, 1, 2, 3].map(|k| adj[row][k].clone());
            let right = [0, 1, 2, 3].map(|k| adj[k][col].clone());
            (left, right)
        }
    };
    roots
        .into_iter()
        .map(|r| {
            let r = r.refine_to_bits(ROOT_BITS)?;
            Ok(EigenForm::new(r, left.clone(), right.clone()))
        })
        .collect()
}

/// A sign pattern indexing one of the 16 open orthants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignVector(pub [i8; 4]);

impl SignVector {
    pub fn all_plus() -> Self {
        SignVector([1; 4])
    }

    pub fn negate(&self) -> Self {
        SignVector(self.0.map(|s| -s))
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|&x| if x > 0 { '+' } else { '-' }).collect();
        write!(f, "({s})")
    }
}

/// Signs of `L_i(x)` for a nonzero integer vector.
pub fn orthant_sign_vector(x: &IVec, forms: &[EigenForm]) -> Result<SignVector> {
    if x.iter().all(|&c| c == 0) {
        return Err(Error::Domain("sign vector of the zero vector".into()));
    }
    let mut out = [0i8; 4];
    for (o, f) in out.iter_mut().zip(forms) {
        *o = match f.sign(x)? {
            Sign::Zero => {
                return Err(Error::Invariant(format!(
                    "integer point {x:?} lies on an eigen-hyperplane"
                )))
            }
            s => s.as_i8(),
        };
    }
    Ok(SignVector(out))
}

/// Log-coordinates with a bound on their absolute error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogCoords {
    pub values: [f64; 3],
    pub error: f64,
}

/// `(log|L_1 x| - log|L_4 x|, log|L_2 x| - log|L_4 x|, log|L_3 x| - log|L_4 x|)`.
pub fn log_coordinates(x: &IVec, forms: &[EigenForm], precision: u32) -> Result<LogCoords> {
    // f64 output limits the useful precision
    let bits = precision.clamp(16, 60);
    let mut logs = [0f64; 4];
    let mut err = 0f64;
    for (l, f) in logs.iter_mut().zip(forms) {
        let (lo, hi) = f.abs_enclosure(x, bits)?;
        *l = (0.5 * (lo + hi)).ln();
        err = err.max((hi / lo).ln() + 4.0 * f64::EPSILON * l.abs().max(1.0));
    }
    Ok(LogCoords {
        values: [logs[0] - logs[3], logs[1] - logs[3], logs[2] - logs[3]],
        error: 2.0 * err,
    })
}

/// One open orthant of a hyperbolic operator.
#[derive(Clone, Debug)]
pub struct Orthant {
    operator: IntMatrix,
    charpoly: IntPoly,
    forms: Vec<EigenForm>,
    sigma: SignVector,
    /// `sign(σ_j L_j(r_j))`: orients each right eigenvector into the closed cone.
    ray_orientation: [i8; 4],
    witness: IVec,
}

impl Orthant {
    /// The orthant containing the nonzero integer point `x`.
    pub fn containing(a: &IntMatrix, x: &IVec) -> Result<Self> {
        let forms = eigen_forms(a)?;
        let sigma = orthant_sign_vector(x, &forms)?;
        Self::build(a, forms, sigma, *x)
    }

    /// The orthant with sign vector `sigma`, certified nonempty by an
    /// exhibited integer point.
    pub fn with_signs(a: &IntMatrix, sigma: SignVector) -> Result<Self> {
        let forms = eigen_forms(a)?;
        for bound in [2i64, 4, 8, 16, 32] {
            let r = -bound..=bound;
            for x0 in r.clone() {
                for x1 in r.clone() {
                    for x2 in r.clone() {
                        for x3 in r.clone() {
                            let x = [x0, x1, x2, x3];
                            if x == [0; 4] {
                                continue;
                            }
                            if orthant_sign_vector(&x, &forms)? == sigma {
                                return Self::build(a, forms, sigma, x);
                            }
                        }
                    }
                }
            }
        }
        Err(Error::Resource(format!("no integer point found in orthant {sigma}")))
    }

    fn build(a: &IntMatrix, forms: Vec<EigenForm>, sigma: SignVector, witness: IVec) -> Result<Self> {
        let mut ray_orientation = [0i8; 4];
        for (j, f) in forms.iter().enumerate() {
            // L_j(r_j) = Σ q_k(λ) r_k(λ)
            let mut pairing = IntPoly::zero();
            for k in 0..4 {
                pairing = &pairing + &(&f.coeffs[k] * &f.ray[k]);
            }
            let s = algebraic_sign(&pairing, &f.root)?.0;
            if s == Sign::Zero {
                return Err(Error::Invariant("left and right eigenvectors are orthogonal".into()));
            }
            ray_orientation[j] = s.as_i8() * sigma.0[j];
        }
        Ok(Orthant {
            operator: *a,
            charpoly: a.char_poly(),
            forms,
            sigma,
            ray_orientation,
            witness,
        })
    }

    pub fn operator(&self) -> &IntMatrix {
        &self.operator
    }

    pub fn charpoly(&self) -> &IntPoly {
        &self.charpoly
    }

    pub fn forms(&self) -> &[EigenForm] {
        &self.forms
    }

    pub fn sigma(&self) -> SignVector {
        self.sigma
    }

    pub fn witness(&self) -> IVec {
        self.witness
    }

    /// Whether `x` lies in the open orthant. Zero is not contained.
    pub fn contains(&self, x: &IVec) -> Result<bool> {
        if x.iter().all(|&c| c == 0) {
            return Ok(false);
        }
        for (f, &s) in self.forms.iter().zip(&self.sigma.0) {
            match f.sign(x)? {
                Sign::Zero => {
                    return Err(Error::Invariant(format!(
                        "integer point {x:?} lies on an eigen-hyperplane"
                    )))
                }
                v if v.as_i8() != s => return Ok(false),
                _ => {}
            }
        }
        Ok(true)
    }

    /// Fast floating membership: `Some(answer)` when the filter is decisive.
    #[inline]
    pub fn contains_fast(&self, x: &IVec) -> Option<bool> {
        let mut decided = true;
        for (f, &s) in self.forms.iter().zip(&self.sigma.0) {
            let c = f.coeffs_f64;
            let v = (x[0] as f64 * c[0] + x[1] as f64 * c[1] + x[2] as f64 * c[2] + x[3] as f64 * c[3])
                * s as f64;
            let scale = (x[0] as f64).abs() * (c[0].abs() + 1.0)
                + (x[1] as f64).abs() * (c[1].abs() + 1.0)
                + (x[2] as f64).abs() * (c[2].abs() + 1.0)
                + (x[3] as f64).abs() * (c[3].abs() + 1.0);
            if v < -scale * FILTER_SLACK {
                return Some(false);
            }
            if v <= scale * FILTER_SLACK {
                decided = false;
            }
        }
        decided.then_some(true)
    }

    /// Extreme ray directions of the closed cone (floating approximations).
    pub fn rays_f64(&self) -> [[f64; 4]; 4] {
        let mut out = [[0.0; 4]; 4];
        for (j, f) in self.forms.iter().enumerate() {
            out[j] = f.ray_f64.map(|v| v * self.ray_orientation[j] as f64);
        }
        out
    }

    /// Whether the linear functional `h` is strictly positive on the closed
    /// cone minus the origin, decided exactly on the four extreme rays.
    pub fn functional_positive(&self, h: &IVec) -> Result<bool> {
        for (f, &o) in self.forms.iter().zip(&self.ray_orientation) {
            let s = f.ray_pairing_sign(h)?;
            if s.as_i8() * o <= 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Signs of the eigenvalue of a matrix commuting with the operator, read
    /// off from its action on the witness point.
    pub fn eigenvalue_signs(&self, g: &IntMatrix) -> Result<[i8; 4]> {
        let gx = g.apply(&self.witness)?;
        let before = orthant_sign_vector(&self.witness, &self.forms)?;
        let after = orthant_sign_vector(&gx, &self.forms)?;
        Ok([0, 1, 2, 3].map(|i| before.0[i] * after.0[i]))
    }

    pub fn log_coordinates(&self, x: &IVec, precision: u32) -> Result<LogCoords> {
        log_coordinates(x, &self.forms, precision)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matops::{companion, eval_word, CompanionSpec};

    fn a1() -> IntMatrix {
        companion(CompanionSpec::new(1, -3, 0, 4))
    }

    #[test]
    fn forms_of_a1() {
        let forms = eigen_forms(&a1()).unwrap();
        assert_eq!(forms.len(), 4);
        for w in forms.windows(2) {
            assert!(w[0].eigenvalue_f64() < w[1].eigenvalue_f64());
        }
        for f in &forms {
            assert_eq!(f.sign(&[0, 0, 0, 1]).unwrap(), Sign::Positive);
        }
        // third coefficient of the top form is λ_max - 4 < 0
        let top = &forms[3];
        assert_eq!(
            algebraic_sign(&top.coeffs[2], &top.root).unwrap().0,
            Sign::Negative
        );
    }

    #[test]
    fn eigen_identity_modulo_charpoly() {
        let a = a1();
        let chi = a.char_poly();
        let forms = eigen_forms(&a).unwrap();
        let f = &forms[0];
        for j in 0..4 {
            // L(A e_j) = Σ_k q_k A_kj must equal t q_j mod χ
            let mut lhs = IntPoly::zero();
            for k in 0..4 {
                lhs = &lhs + &f.coeffs[k].scale(&a.0[k][j].into());
            }
            let rhs = &IntPoly::var() * &f.coeffs[j];
            let diff = &lhs - &rhs;
            assert!(diff.div_rem_monic(&chi).1.is_zero());
        }
    }

    #[test]
    fn generic_forms_match_companion_forms() {
        // the adjugate route on a conjugate of A_1 gives forms proportional to
        // the transported closed-form ones
        let p = IntMatrix([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 2], [0, 0, 0, 1]]);
        let m = p.inverse().unwrap().checked_mul(&a1()).unwrap().checked_mul(&p).unwrap();
        assert!(m.as_companion().is_none());
        let fm = eigen_forms(&m).unwrap();
        let fa = eigen_forms(&a1()).unwrap();
        let x = [1, -2, 3, 1];
        let px = p.apply(&x).unwrap();
        for (g, h) in fm.iter().zip(&fa) {
            // L^M(x) ∝ L^A(P x)
            let r = g.eval_f64(&x) / h.eval_f64(&px);
            let y = [0, 1, 0, 0];
            let r2 = g.eval_f64(&y) / h.eval_f64(&p.apply(&y).unwrap());
            assert!((r - r2).abs() < 1e-9 * r.abs());
        }
    }

    #[test]
    fn orthant_signs() {
        let forms = eigen_forms(&a1()).unwrap();
        assert_eq!(orthant_sign_vector(&[0, 0, 0, 1], &forms).unwrap(), SignVector::all_plus());
        assert_eq!(orthant_sign_vector(&[-3, -2, -1, 1], &forms).unwrap(), SignVector::all_plus());
        assert_eq!(
            orthant_sign_vector(&[0, 0, 0, -1], &forms).unwrap(),
            SignVector::all_plus().negate()
        );
        assert!(matches!(orthant_sign_vector(&[0; 4], &forms), Err(Error::Domain(_))));
    }

    #[test]
    fn reducible_and_elliptic_rejected() {
        assert!(matches!(eigen_forms(&IntMatrix::identity()), Err(Error::Classification(_))));
        // t^4 + 1: irreducible, no real roots
        let m = companion(CompanionSpec::new(-1, 0, 0, 0));
        assert!(matches!(eigen_forms(&m), Err(Error::Classification(_))));
    }

    #[test]
    fn log_coordinates_translate() {
        let o = Orthant::containing(&a1(), &[0, 0, 0, 1]).unwrap();
        let base = o.log_coordinates(&[0, 0, 0, 1], DEFAULT_PRECISION).unwrap();
        for v in base.values {
            assert!(v.abs() <= base.error);
        }
        let b = eval_word(&"A^-2".parse().unwrap(), &a1()).unwrap();
        let lam: Vec<f64> = o.forms().iter().map(|f| f.eigenvalue_f64()).collect();
        let expect = [0, 1, 2].map(|i| -2.0 * lam[i].abs().ln() + 2.0 * lam[3].ln());
        for x in [[0, 0, 0, 1], [-3, -2, -1, 1], [12, 5, 2, 1]] {
            let l0 = o.log_coordinates(&x, DEFAULT_PRECISION).unwrap();
            let l1 = o.log_coordinates(&b.apply(&x).unwrap(), DEFAULT_PRECISION).unwrap();
            for i in 0..3 {
                let d = l1.values[i] - l0.values[i];
                assert!((d - expect[i]).abs() < 1e-9, "{d} vs {}", expect[i]);
            }
        }
    }

    #[test]
    fn dual_cone_test() {
        let o = Orthant::containing(&a1(), &[0, 0, 0, 1]).unwrap();
        // normals of paper faces are positive on the cone
        assert!(o.functional_positive(&[0, 2, -4, 1]).unwrap());
        assert!(o.functional_positive(&[-1, 8, -13, 4]).unwrap());
        // a coordinate functional is not
        assert!(!o.functional_positive(&[0, 0, 0, 1]).unwrap());
    }

    #[test]
    fn operator_permutes_orthants_by_eigenvalue_signs() {
        let o = Orthant::containing(&a1(), &[0, 0, 0, 1]).unwrap();
        let signs = o.eigenvalue_signs(&a1()).unwrap();
        let expect = o.forms().iter().map(|f| if f.eigenvalue_f64() > 0.0 { 1 } else { -1 });
        assert!(signs.iter().copied().eq(expect));
    }
}
