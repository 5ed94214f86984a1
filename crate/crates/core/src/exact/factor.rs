use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};

use super::{IntPoly, Sign};
use crate::error::{Error, Result};

fn divisors(n: i128) -> Vec<i128> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

fn small(c: &BigInt) -> Result<i128> {
    c.to_i128()
        .filter(|v| v.abs() < 1 << 40)
        .ok_or_else(|| Error::Domain(format!("coefficient {c} too large for factor search")))
}

/// Whether `p` has a rational root.
pub fn has_rational_root(p: &IntPoly) -> Result<bool> {
    let Some(deg) = p.degree() else {
        return Err(Error::Domain("rational roots of the zero polynomial".into()));
    };
    if deg == 0 {
        return Ok(false);
    }
    if p.coeff(0).is_zero() {
        return Ok(true);
    }
    let a0 = small(&p.coeff(0))?;
    let lead = small(p.leading().unwrap())?;
    for num in divisors(a0) {
        for den in divisors(lead) {
            for s in [num, -num] {
                let x = num_rational::BigRational::new(s.into(), den.into());
                if p.sign_at(&x) == Sign::Zero {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// Irreducibility over Q for polynomials of degree at most 3, and for monic
/// quartics (rational-root test plus an exact search for a factorization
/// into two monic integer quadratics, which is complete by Gauss's lemma).
pub fn is_irreducible(p: &IntPoly) -> Result<bool> {
    let deg = p
        .degree()
        .ok_or_else(|| Error::Domain("irreducibility of the zero polynomial".into()))?;
    match deg {
        0 => Ok(false),
        1 => Ok(true),
        2 | 3 => Ok(!has_rational_root(&p.primitive_part())?),
        4 => {
            if !p.leading().unwrap().is_one() {
                return Err(Error::Domain(format!("quartic {p} is not monic")));
            }
            if has_rational_root(p)? {
                return Ok(false);
            }
            Ok(quadratic_split(p)?.is_none())
        }
        _ => Err(Error::Domain(format!("irreducibility test for degree {deg}"))),
    }
}

/// Monic integer quadratics `(t^2 + p t + q)(t^2 + r t + s)` equal to the
/// monic quartic, if any; returned as `([q, p], [s, r])`.
pub fn quadratic_split(poly: &IntPoly) -> Result<Option<([i128; 2], [i128; 2])>> {
    let a0 = small(&poly.coeff(0))?;
    let a1 = small(&poly.coeff(1))?;
    let a2 = small(&poly.coeff(2))?;
    let a3 = small(&poly.coeff(3))?;
    if a0 == 0 {
        // t divides; found by the rational-root test instead
        return Ok(None);
    }
    for d in divisors(a0) {
        for q in [d, -d] {
            let s = a0 / q;
            let candidates: Vec<i128> = if s != q {
                let num = a1 - a3 * q;
                let den = s - q;
                if num % den != 0 {
                    continue;
                }
                vec![num / den]
            } else {
                if a1 != a3 * q {
                    continue;
                }
                let disc = a3 * a3 - 4 * (a2 - 2 * q);
                if disc < 0 {
                    continue;
                }
                let k = disc.sqrt();
                if k * k != disc {
                    continue;
                }
                [a3 + k, a3 - k]
                    .into_iter()
                    .filter(|x| x.is_even())
                    .map(|x| x / 2)
                    .collect()
            };
            for p in candidates {
                let r = a3 - p;
                if q + s + p * r == a2 && p * s + q * r == a1 {
                    return Ok(Some(([q, p], [s, r])));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn chi_a1_irreducible() {
        // chi(1) = -1, chi(-1) = 1: no rational roots; no quadratic split
        assert!(is_irreducible(&p(&[-1, 3, 0, -4, 1])).unwrap());
        assert!(is_irreducible(&p(&[1, 3, -1, -3, 1])).unwrap());
    }

    #[test]
    fn reducible_quartics() {
        assert!(!is_irreducible(&p(&[1, -4, 6, -4, 1])).unwrap());
        // t^4 - 3t^2 + 1 = (t^2 - t - 1)(t^2 + t - 1)
        assert!(!is_irreducible(&p(&[1, 0, -3, 0, 1])).unwrap());
        // (t^2 + 1)^2
        assert!(!is_irreducible(&p(&[1, 0, 2, 0, 1])).unwrap());
        // t^4 + 1 is irreducible over Q
        assert!(is_irreducible(&p(&[1, 0, 0, 0, 1])).unwrap());
        assert!(!is_irreducible(&p(&[0, 1, 0, 0, 1])).unwrap());
    }

    #[test]
    fn split_is_a_factorization() {
        let f = &p(&[2, 3, 1]) * &p(&[-5, 1, 1]);
        let ([q, pp], [s, r]) = quadratic_split(&f).unwrap().unwrap();
        let g = &p(&[q as i64, pp as i64, 1]) * &p(&[s as i64, r as i64, 1]);
        assert_eq!(g, f);
    }
}
