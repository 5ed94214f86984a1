use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{IntPoly, Sign};
use crate::error::{Error, Result};

/// Default number of bisection steps a single refinement may spend.
pub const DEFAULT_BUDGET: u32 = 256;

/// Sturm sequence `p, p', -rem(p, p'), ...`, each term scaled by a positive
/// constant and made primitive.
pub fn sturm_sequence(p: &IntPoly) -> Vec<IntPoly> {
    let mut seq = vec![p.clone()];
    if p.degree().unwrap_or(0) == 0 {
        return seq;
    }
    seq.push(p.derivative());
    loop {
        let n = seq.len();
        let (a, b) = (&seq[n - 2], &seq[n - 1]);
        if b.degree().unwrap_or(0) == 0 {
            break;
        }
        let (r, mult) = a.pseudo_rem(b);
        if r.is_zero() {
            break;
        }
        // rem over Q is r / mult; negate and keep only a positive scale
        let next = if mult.is_negative() { r } else { -&r };
        seq.push(next.primitive_part());
    }
    seq
}

fn variations(signs: impl Iterator<Item = Sign>) -> usize {
    let mut last = Sign::Zero;
    let mut count = 0;
    for s in signs.filter(|s| *s != Sign::Zero) {
        if last != Sign::Zero && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn variations_at(seq: &[IntPoly], x: &BigRational) -> usize {
    variations(seq.iter().map(|q| q.sign_at(x)))
}

fn sign_at_infinity(q: &IntPoly, positive: bool) -> Sign {
    let lead = Sign::of_int(q.leading().expect("nonzero Sturm term"));
    if positive || q.degree().unwrap() % 2 == 0 {
        lead
    } else {
        lead.flip()
    }
}

/// Number of distinct real roots of `p`.
pub fn real_root_count(p: &IntPoly) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::Domain("real roots of the zero polynomial".into()));
    }
    let seq = sturm_sequence(p);
    let lo = variations(seq.iter().map(|q| sign_at_infinity(q, false)));
    let hi = variations(seq.iter().map(|q| sign_at_infinity(q, true)));
    Ok(lo - hi)
}

/// Number of distinct real roots of `p` in the open interval `(lo, hi)`.
pub fn sturm_count(p: &IntPoly, lo: &BigRational, hi: &BigRational) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::Domain("Sturm count of the zero polynomial".into()));
    }
    if lo >= hi {
        return Err(Error::Domain(format!("empty interval ({lo}, {hi})")));
    }
    for x in [lo, hi] {
        if p.sign_at(x) == Sign::Zero {
            return Err(Error::EndpointRoot(x.to_string()));
        }
    }
    let seq = sturm_sequence(p);
    Ok(variations_at(&seq, lo) - variations_at(&seq, hi))
}

/// Integer bound `B` with every real root strictly inside `(-B, B)`.
fn cauchy_bound(p: &IntPoly) -> BigInt {
    let lead = p.leading().unwrap().abs();
    let max = p.coeffs()[..p.coeffs().len() - 1]
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_default();
    // 1 + ceil(max / lead), plus one for strictness
    BigInt::from(2) + (max + &lead - BigInt::one()) / lead
}

/// Picks a split point inside `(lo, hi)` where `p` does not vanish.
fn split_point(p: &IntPoly, lo: &BigRational, hi: &BigRational) -> BigRational {
    let width = hi - lo;
    let mut den = 2i64;
    loop {
        for num in (1..den).step_by(2) {
            let x = lo + &width * BigRational::new(num.into(), den.into());
            if p.sign_at(&x) != Sign::Zero {
                return x;
            }
        }
        den *= 2;
    }
}

/// Isolates every real root of a squarefree polynomial, in increasing order.
pub fn isolate_real_roots(p: &IntPoly) -> Result<Vec<RealAlgebraic>> {
    if p.is_zero() {
        return Err(Error::Domain("root isolation of the zero polynomial".into()));
    }
    if p.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let seq = sturm_sequence(p);
    let b = BigRational::from_integer(cauchy_bound(p));
    let mut stack = vec![(-b.clone(), b)];
    let mut out = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        let n = variations_at(&seq, &lo) - variations_at(&seq, &hi);
        match n {
            0 => {}
            1 => out.push(RealAlgebraic {
                minpoly: p.clone(),
                lo,
                hi,
                budget: DEFAULT_BUDGET,
            }),
            _ => {
                let mid = split_point(p, &lo, &hi);
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    Ok(out)
}

/// A real root of an integer polynomial, held as an isolating interval.
///
/// When `lo == hi` the root is the rational number `lo` itself. Refinement
/// returns a new value; the receiver is never mutated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealAlgebraic {
    minpoly: IntPoly,
    lo: BigRational,
    hi: BigRational,
    budget: u32,
}

impl RealAlgebraic {
    /// Validates that `(lo, hi)` isolates exactly one root of `minpoly`.
    pub fn new(minpoly: IntPoly, lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo == hi {
            if minpoly.sign_at(&lo) != Sign::Zero {
                return Err(Error::Domain(format!("{lo} is not a root of {minpoly}")));
            }
        } else if sturm_count(&minpoly, &lo, &hi)? != 1 {
            return Err(Error::Domain(format!(
                "({lo}, {hi}) does not isolate a single root of {minpoly}"
            )));
        }
        Ok(RealAlgebraic {
            minpoly,
            lo,
            hi,
            budget: DEFAULT_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u32) -> Self {
        self.budget = budget.max(1);
        self
    }

    pub fn minpoly(&self) -> &IntPoly {
        &self.minpoly
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    /// One bisection step.
    pub fn bisect(&self) -> RealAlgebraic {
        if self.is_exact() {
            return self.clone();
        }
        let mid = self.midpoint();
        let mut next = self.clone();
        match self.minpoly.sign_at(&mid) {
            Sign::Zero => {
                next.lo = mid.clone();
                next.hi = mid;
            }
            s if s == self.minpoly.sign_at(&self.lo) => next.lo = mid,
            _ => next.hi = mid,
        }
        next
    }

    /// Bisects until the width is at most `2^-bits`.
    pub fn refine_to_bits(&self, bits: u32) -> Result<RealAlgebraic> {
        let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
        let mut cur = self.clone();
        let mut steps = 0;
        while cur.width() > target {
            if steps == self.budget {
                return Err(Error::Budget(format!(
                    "root of {} not refined to 2^-{bits} in {} steps",
                    self.minpoly, self.budget
                )));
            }
            cur = cur.bisect();
            steps += 1;
        }
        Ok(cur)
    }

    pub fn interval_string(&self) -> (String, String) {
        (self.lo.to_string(), self.hi.to_string())
    }
}

/// Bound on |q(x) - q(mid)| for x within `radius` of `mid`, using
/// |q'| <= sum k |q_k| R^(k-1) on |x| <= R.
fn variation_bound(q: &IntPoly, r: &BigRational, radius: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    let mut rpow = BigRational::one();
    for (k, c) in q.coeffs().iter().enumerate().skip(1) {
        acc += BigRational::from_integer(c.abs() * BigInt::from(k)) * &rpow;
        rpow *= r;
    }
    acc * radius
}

/// Exact sign of `q(root)`.
///
/// Vanishing is decided algebraically (remainder modulo the minimal
/// polynomial, then a common-factor test); a nonzero value is certified by
/// refining the isolating interval until the evaluated enclosure excludes
/// zero. Returns the sign together with the refined root so callers can
/// keep the tighter interval.
pub fn algebraic_sign(q: &IntPoly, root: &RealAlgebraic) -> Result<(Sign, RealAlgebraic)> {
    if q.is_zero() {
        return Ok((Sign::Zero, root.clone()));
    }
    if root.is_exact() {
        return Ok((q.sign_at(&root.lo), root.clone()));
    }
    let (r, mult) = q.pseudo_rem(&root.minpoly);
    if r.is_zero() {
        return Ok((Sign::Zero, root.clone()));
    }
    let g = IntPoly::gcd(&r, &root.minpoly);
    if g.degree().unwrap_or(0) > 0 && sturm_count(&g, &root.lo, &root.hi)? > 0 {
        return Ok((Sign::Zero, root.clone()));
    }
    let mult_sign = Sign::of_int(&mult);
    let mut cur = root.clone();
    for _ in 0..=root.budget {
        if cur.is_exact() {
            return Ok((r.sign_at(&cur.lo) * mult_sign, cur));
        }
        let mid = cur.midpoint();
        let radius = cur.width() / BigRational::from_integer(2.into());
        let rmax = cur.lo.abs().max(cur.hi.abs());
        let value = r.eval_rat(&mid);
        if value.abs() > variation_bound(&r, &rmax, &radius) {
            return Ok((Sign::of_rat(&value) * mult_sign, cur));
        }
        cur = cur.bisect();
    }
    Err(Error::Budget(format!(
        "sign of {q} at root of {} not certified within {} bisections",
        root.minpoly, root.budget
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn chi1() -> IntPoly {
        // t^4 - 4t^3 + 3t - 1
        p(&[-1, 3, 0, -4, 1])
    }

    #[test]
    fn sqrt2_roots() {
        let roots = isolate_real_roots(&p(&[-2, 0, 1])).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0].to_f64() + 2f64.sqrt()).abs() < 2.0);
        let a = roots[0].refine_to_bits(40).unwrap();
        let b = roots[1].refine_to_bits(40).unwrap();
        assert!((a.to_f64() + 2f64.sqrt()).abs() < 1e-10);
        assert!((b.to_f64() - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn no_real_roots() {
        assert!(isolate_real_roots(&p(&[1, 0, 1])).unwrap().is_empty());
        assert_eq!(real_root_count(&p(&[1, 0, 1])).unwrap(), 0);
    }

    #[test]
    fn chi_a1_is_totally_real() {
        let roots = isolate_real_roots(&chi1()).unwrap();
        assert_eq!(roots.len(), 4);
        assert_eq!(real_root_count(&chi1()).unwrap(), 4);
        for w in roots.windows(2) {
            assert!(w[0].hi() <= w[1].lo());
        }
    }

    #[test]
    fn sturm_examples() {
        assert_eq!(sturm_count(&p(&[-2, 0, 1]), &q(0), &q(2)).unwrap(), 1);
        assert_eq!(sturm_count(&p(&[-2, 0, 1]), &q(-2), &q(2)).unwrap(), 2);
        assert_eq!(sturm_count(&chi1(), &q(3), &q(4)).unwrap(), 1);
    }

    #[test]
    fn endpoint_root_is_distinct_error() {
        let e = sturm_count(&p(&[-1, 1]), &q(1), &q(2)).unwrap_err();
        assert!(matches!(e, Error::EndpointRoot(_)));
        assert!(matches!(
            isolate_real_roots(&IntPoly::zero()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn rational_roots_are_isolated() {
        // (t - 1)(t + 1)(2t - 1): roots hit bisection midpoints
        let poly = &(&p(&[-1, 1]) * &p(&[1, 1])) * &p(&[-1, 2]);
        let roots = isolate_real_roots(&poly).unwrap();
        assert_eq!(roots.len(), 3);
        let r = roots[1].refine_to_bits(30).unwrap();
        assert!((r.to_f64() - 0.5).abs() < 1e-8);
    }

    #[test]
    fn sign_examples() {
        let roots = isolate_real_roots(&chi1()).unwrap();
        let top = &roots[3];
        assert_eq!(algebraic_sign(&p(&[-4, 1]), top).unwrap().0, Sign::Negative);
        assert_eq!(algebraic_sign(&p(&[1]), top).unwrap().0, Sign::Positive);
        assert_eq!(algebraic_sign(&chi1(), top).unwrap().0, Sign::Zero);
        assert_eq!(
            algebraic_sign(&(&chi1() * &p(&[3, 1, 1])), top).unwrap().0,
            Sign::Zero
        );
    }

    #[test]
    fn zero_detected_for_reducible_minpoly() {
        // minpoly (t^2 - 2)(t - 3): q = t^2 - 2 vanishes at sqrt 2 but its
        // remainder is nonzero
        let m = &p(&[-2, 0, 1]) * &p(&[-3, 1]);
        let roots = isolate_real_roots(&m).unwrap();
        let sqrt2 = &roots[1];
        assert_eq!(algebraic_sign(&p(&[-2, 0, 1]), sqrt2).unwrap().0, Sign::Zero);
        assert_eq!(algebraic_sign(&p(&[-3, 1]), sqrt2).unwrap().0, Sign::Negative);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let roots = isolate_real_roots(&p(&[-2, 0, 1])).unwrap();
        let tight = roots[1].clone().with_budget(1);
        // 1000000 t - 1414214 changes sign within 1e-6 of sqrt 2
        let qq = p(&[-1_414_214, 1_000_000]);
        assert!(matches!(algebraic_sign(&qq, &tight), Err(Error::Budget(_))));
        let roomy = roots[1].clone();
        assert_eq!(algebraic_sign(&qq, &roomy).unwrap().0, Sign::Negative);
    }
}
