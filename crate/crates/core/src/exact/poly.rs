use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Sign;

/// Polynomial with arbitrary-precision integer coefficients, ascending degree.
///
/// The coefficient vector never ends in a zero, so the zero polynomial is the
/// empty vector and `degree` is the index of the last stored coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

/// Serialized as the ascending coefficient list in decimal strings, so that
/// arbitrarily large coefficients survive any JSON reader.
impl serde::Serialize for IntPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs.iter().map(|c| c.to_string()))
    }
}

impl<'de> serde::Deserialize<'de> for IntPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<String> = serde::Deserialize::deserialize(d)?;
        let coeffs = v
            .iter()
            .map(|c| c.parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntPoly::new(coeffs))
    }
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `c * t^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// The polynomial `t`.
    pub fn var() -> Self {
        Self::monomial(BigInt::one(), 1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Coefficients as machine integers, when every one fits.
    pub fn to_i64_vec(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| c.to_i64()).collect()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rat(&self, x: &BigRational) -> BigRational {
        // sum c_k n^k d^(N-k) / d^N, accumulated by Horner in integers
        let Some(n) = self.degree() else {
            return BigRational::zero();
        };
        let num = x.numer();
        let den = x.denom();
        let mut acc = BigInt::zero();
        let mut dpow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * num + c * &dpow;
            dpow *= den;
        }
        BigRational::new(acc, num_traits::pow(den.clone(), n))
    }

    pub fn sign_at(&self, x: &BigRational) -> Sign {
        Sign::of_rat(&self.eval_rat(x))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    /// Gcd of the coefficients, zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content; the sign of the leading coefficient is kept.
    pub fn primitive_part(&self) -> Self {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Pseudo-remainder: returns `(r, m)` with `m * self = q * divisor + r`,
    /// `deg r < deg divisor` and `m` a power of the divisor's leading coefficient.
    pub fn pseudo_rem(&self, divisor: &IntPoly) -> (IntPoly, BigInt) {
        let dd = divisor.degree().expect("pseudo_rem by zero polynomial");
        let lc = divisor.leading().cloned().unwrap();
        let mut r = self.clone();
        let mut mult = BigInt::one();
        while let Some(dr) = r.degree() {
            if dr < dd {
                break;
            }
            let lr = r.leading().cloned().unwrap();
            let shifted = divisor.shift(dr - dd).scale(&lr);
            r = &r.scale(&lc) - &shifted;
            mult *= &lc;
        }
        (r, mult)
    }

    /// Exact quotient by a monic divisor (over Z), with remainder.
    pub fn div_rem_monic(&self, divisor: &IntPoly) -> (IntPoly, IntPoly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        assert!(divisor.leading().unwrap().is_one(), "divisor must be monic");
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); r.len().saturating_sub(dd)];
        for k in (dd..r.len()).rev() {
            let c = r[k].clone();
            if c.is_zero() {
                continue;
            }
            q[k - dd] = c.clone();
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                r[k - dd + j] -= &c * dc;
            }
        }
        r.truncate(dd);
        (IntPoly::new(q), IntPoly::new(r))
    }

    fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPoly { coeffs }
    }

    /// Greatest common divisor over Q, returned primitive with positive
    /// leading coefficient. `gcd(0, 0) = 0`.
    pub fn gcd(a: &IntPoly, b: &IntPoly) -> IntPoly {
        let (mut x, mut y) = (a.primitive_part(), b.primitive_part());
        if x.degree() < y.degree() {
            std::mem::swap(&mut x, &mut y);
        }
        while !y.is_zero() {
            let (r, _) = x.pseudo_rem(&y);
            x = y;
            y = r.primitive_part();
        }
        x.normalize_sign()
    }

    fn normalize_sign(self) -> Self {
        match self.leading() {
            Some(l) if l.is_negative() => -&self,
            _ => self,
        }
    }

    /// `p / gcd(p, p')`, primitive with positive leading coefficient.
    pub fn squarefree_part(&self) -> IntPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.primitive_part().normalize_sign();
        }
        let g = IntPoly::gcd(self, &self.derivative());
        if g.degree() == Some(0) {
            return self.primitive_part().normalize_sign();
        }
        // exact division over Q of primitive polynomials
        let (q, r) = self.primitive_part().pseudo_div(&g);
        debug_assert!(r.is_zero());
        q.primitive_part().normalize_sign()
    }

    fn pseudo_div(&self, divisor: &IntPoly) -> (IntPoly, IntPoly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lc = divisor.leading().cloned().unwrap();
        let mut r = self.clone();
        let mut q = IntPoly::zero();
        while let Some(dr) = r.degree() {
            if dr < dd {
                break;
            }
            let lr = r.leading().cloned().unwrap();
            q = &q.scale(&lc) + &IntPoly::monomial(lr.clone(), dr - dd);
            r = &r.scale(&lc) - &divisor.shift(dr - dd).scale(&lr);
        }
        (q, r)
    }

    pub fn pow(&self, k: u32) -> IntPoly {
        (0..k).fold(IntPoly::one(), |acc, _| &acc * self)
    }

    /// Resultant as the determinant of the Sylvester matrix (Bareiss
    /// fraction-free elimination).
    pub fn resultant(&self, other: &IntPoly) -> BigInt {
        let (m, n) = match (self.degree(), other.degree()) {
            (Some(m), Some(n)) => (m, n),
            _ => return BigInt::zero(),
        };
        let size = m + n;
        if size == 0 {
            return BigInt::one();
        }
        let mut a = vec![vec![BigInt::zero(); size]; size];
        for i in 0..n {
            for (k, c) in self.coeffs.iter().rev().enumerate() {
                a[i][i + k] = c.clone();
            }
        }
        for i in 0..m {
            for (k, c) in other.coeffs.iter().rev().enumerate() {
                a[n + i][i + k] = c.clone();
            }
        }
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..size {
            let Some(piv) = (k..size).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            if piv != k {
                a.swap(piv, k);
                sign = -sign;
            }
            for i in k + 1..size {
                for j in k + 1..size {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        sign * prev
    }

    /// `(-1)^{n(n-1)/2} Res(p, p') / lc(p)`.
    pub fn discriminant(&self) -> BigInt {
        let Some(n) = self.degree() else { return BigInt::zero() };
        let lc = self.leading().cloned().unwrap_or_else(BigInt::one);
        let r = self.resultant(&self.derivative()) / lc;
        if (n * (n.saturating_sub(1)) / 2) % 2 == 1 {
            -r
        } else {
            r
        }
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPoly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPoly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, o: &IntPoly) -> IntPoly {
        if self.is_zero() || o.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{mag}*t")?,
                (_, true) => write!(f, "t^{k}")?,
                (_, false) => write!(f, "{mag}*t^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn discriminants() {
        assert_eq!(p(&[-1, 3, 0, -4, 1]).discriminant(), BigInt::from(725));
        assert_eq!(p(&[1, 0, -4, 0, 1]).discriminant(), BigInt::from(2304));
        assert_eq!(p(&[-2, 0, 1]).discriminant(), BigInt::from(8));
        assert_eq!(p(&[1, -2, 1]).discriminant(), BigInt::zero());
    }

    #[test]
    fn trims_and_degree() {
        assert_eq!(p(&[1, 2, 0, 0]).degree(), Some(1));
        assert!(p(&[0, 0]).is_zero());
        assert_eq!(p(&[]).degree(), None);
    }

    #[test]
    fn eval_rational() {
        let chi = p(&[-1, 3, 0, -4, 1]);
        assert_eq!(chi.eval_int(&BigInt::from(3)), BigInt::from(-19));
        assert_eq!(chi.eval_int(&BigInt::from(4)), BigInt::from(11));
        let half = BigRational::new(1.into(), 2.into());
        // 1/16 - 4/8 + 3/2 - 1 = 1/16
        assert_eq!(chi.eval_rat(&half), BigRational::new(1.into(), 16.into()));
    }

    #[test]
    fn gcd_and_squarefree() {
        let a = &p(&[-1, 1]) * &p(&[-1, 1]); // (t-1)^2
        let b = &a * &p(&[2, 1]);
        assert_eq!(b.squarefree_part(), &p(&[-1, 1]) * &p(&[2, 1]));
        assert_eq!(IntPoly::gcd(&a, &b), a);
        assert_eq!(IntPoly::gcd(&p(&[1, 0, 1]), &p(&[-2, 0, 1])), p(&[1]));
    }

    #[test]
    fn pseudo_rem_identity() {
        let a = p(&[3, -1, 4, 1, 5]);
        let d = p(&[2, 7, -3]);
        let (r, m) = a.pseudo_rem(&d);
        assert!(r.degree().unwrap() < 2);
        // m*a - r must vanish at the roots of d, i.e. be divisible by d
        let diff = &a.scale(&m) - &r;
        let (rr, _) = diff.pseudo_rem(&d);
        assert!(rr.is_zero());
    }

    #[test]
    fn monic_division() {
        let chi = p(&[-1, 3, 0, -4, 1]);
        let q = p(&[5, 0, 0, 0, 0, 1]);
        let (quo, rem) = q.div_rem_monic(&chi);
        assert_eq!(&(&quo * &chi) + &rem, q);
        assert!(rem.degree().unwrap() < 4);
    }

    #[test]
    fn display() {
        assert_eq!(p(&[-1, 3, 0, -4, 1]).to_string(), "t^4 - 4*t^3 + 3*t - 1");
        assert_eq!(p(&[0, -1]).to_string(), "-t");
    }
}
