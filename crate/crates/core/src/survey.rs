//! Exhaustive survey of small integer 4×4 matrices: classification by
//! unimodularity, irreducibility and hyperbolicity, and comparison of the
//! sails of the surviving candidates with a reference sail.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::Orthant;
use crate::error::{Error, Result};
use crate::exact::{is_irreducible, isolate_real_roots, real_root_count, BigInt, IntPoly};
use crate::matops::{det4, integer_kernel, IVec, IntMatrix};
use crate::quotient::{fingerprint, fundamental_domain, verify_generators, Fingerprint};
use crate::sail::{build_sail_patch, PatchOptions};

/// Largest survey bound accepted without an explicit override.
pub const DEFAULT_CAP: i64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NotUnimodular,
    Reducible,
    NotHyperbolic,
    Candidate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixClassification {
    pub matrix: IntMatrix,
    pub verdict: Verdict,
    /// Absent when the determinant already rules the matrix out.
    pub charpoly: Option<IntPoly>,
    pub det: i128,
}

pub fn classify(m: &IntMatrix) -> Result<MatrixClassification> {
    let det = det4(&m.0)?;
    let mut out = MatrixClassification { matrix: *m, verdict: Verdict::NotUnimodular, charpoly: None, det };
    if det.abs() != 1 {
        return Ok(out);
    }
    let chi = m.char_poly();
    out.verdict = if !is_irreducible(&chi)? {
        Verdict::Reducible
    } else if real_root_count(&chi)? < 4 {
        Verdict::NotHyperbolic
    } else {
        Verdict::Candidate
    };
    out.charpoly = Some(chi);
    Ok(out)
}

/// Number of integer vectors of length 16 with L1 norm below `s`:
/// `sum_k 2^k C(16,k) C(s-1,k)`.
pub fn matrix_count(s: i64) -> u128 {
    if s < 1 {
        return 0;
    }
    let binom = |n: u128, k: u128| -> u128 {
        if k > n {
            return 0;
        }
        (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
    };
    (0..=16u128).map(|k| (1u128 << k) * binom(16, k) * binom((s - 1) as u128, k)).sum()
}

/// First rows of the enumeration: integer 4-vectors with L1 norm below `s`,
/// lexicographically ordered. Each one is an independent chunk.
fn first_rows(s: i64) -> Vec<IVec> {
    let r = s - 1;
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                for d in -r..=r {
                    if a.abs() + b.abs() + c.abs() + d.abs() <= r {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

/// Calls `f` on every matrix whose entries sum in absolute value to at most
/// `budget`, with the given first row, in lexicographic row-major order.
fn for_each_completion(first: IVec, budget: i64, f: &mut dyn FnMut(&IntMatrix) -> Result<()>) -> Result<()> {
    fn rec(m: &mut [[i64; 4]; 4], pos: usize, left: i64, f: &mut dyn FnMut(&IntMatrix) -> Result<()>) -> Result<()> {
        if pos == 16 {
            return f(&IntMatrix(*m));
        }
        for v in -left..=left {
            m[pos / 4][pos % 4] = v;
            rec(m, pos + 1, left - v.abs(), f)?;
        }
        m[pos / 4][pos % 4] = 0;
        Ok(())
    }
    let used: i64 = first.iter().map(|x| x.abs()).sum();
    let mut m = [first, [0; 4], [0; 4], [0; 4]];
    rec(&mut m, 4, budget - used, f)
}

/// Every 4×4 integer matrix with entry absolute sum below `max_abs_sum`,
/// each once, in lexicographic row-major order.
pub fn enumerate_matrices(max_abs_sum: i64) -> impl Iterator<Item = IntMatrix> {
    let rows = if max_abs_sum >= 1 { first_rows(max_abs_sum) } else { Vec::new() };
    rows.into_iter().flat_map(move |r| {
        let mut v = Vec::new();
        let _ = for_each_completion(r, max_abs_sum - 1, &mut |m| {
            v.push(*m);
            Ok(())
        });
        v
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub not_unimodular: u64,
    pub reducible: u64,
    pub not_hyperbolic: u64,
    pub candidate: u64,
}

impl VerdictCounts {
    fn add(&mut self, v: Verdict) {
        match v {
            Verdict::NotUnimodular => self.not_unimodular += 1,
            Verdict::Reducible => self.reducible += 1,
            Verdict::NotHyperbolic => self.not_hyperbolic += 1,
            Verdict::Candidate => self.candidate += 1,
        }
    }

    fn merge(&mut self, o: &VerdictCounts) {
        self.not_unimodular += o.not_unimodular;
        self.reducible += o.reducible;
        self.not_hyperbolic += o.not_hyperbolic;
        self.candidate += o.candidate;
    }

    pub fn total(&self) -> u64 {
        self.not_unimodular + self.reducible + self.not_hyperbolic + self.candidate
    }
}

/// The reference sail that candidates are compared against: its operator,
/// generators, a sail vertex and its fingerprint.
#[derive(Clone, Debug)]
pub struct Reference {
    pub orthant: Orthant,
    pub generators: [IntMatrix; 3],
    pub seed: IVec,
    pub fingerprint: Fingerprint,
    pub patch: PatchOptions,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Resolution {
    /// `conjugator · matrix = polynomial(A) · conjugator`, with `A` the
    /// reference operator; the candidate's sail at `seed` was then computed
    /// with the transported generators.
    Resolved {
        polynomial: Vec<i64>,
        conjugator: IntMatrix,
        seed: IVec,
        fingerprint: Fingerprint,
        matches: bool,
    },
    /// Proven not equivalent: equivalent continued fractions have the same
    /// eigenvalue field, and equal fields force the two polynomial
    /// discriminants to differ by a rational square.
    Inequivalent {
        discriminant: String,
        reference_discriminant: String,
    },
    Unresolved {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateEntry {
    pub matrix: IntMatrix,
    pub det: i128,
    pub charpoly: String,
    pub resolution: Resolution,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub bound: i64,
    pub enumerated: u64,
    pub counts: VerdictCounts,
    /// Candidates with determinant +1 and -1.
    pub candidates_det_plus: u64,
    pub candidates_det_minus: u64,
    pub reference_fingerprint: Fingerprint,
    pub matched: u64,
    pub mismatched: u64,
    pub inequivalent: u64,
    pub unresolved: u64,
    pub candidates: Vec<CandidateEntry>,
}

impl SurveyReport {
    /// Every candidate is resolved and matches the reference.
    pub fn fully_verified(&self) -> bool {
        self.mismatched == 0 && self.inequivalent == 0 && self.unresolved == 0
    }
}

/// Progress saved between chunks of the enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub bound: i64,
    pub next_chunk: usize,
    pub enumerated: u64,
    pub counts: VerdictCounts,
    pub candidates: Vec<CandidateEntry>,
}

fn gauss_solve(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..4 {
            if r != col {
                let k = a[r][col] / a[col][col];
                for c in col..4 {
                    a[r][c] -= k * a[col][c];
                }
                b[r] -= k * b[col];
            }
        }
    }
    Some([0, 1, 2, 3].map(|i| b[i] / a[i][i]))
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|i| (0..4).filter(|&j| p[j] == i).count() == 1) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Integer cubics `p` with `charpoly(p(A)) = chi`, found by matching
/// eigenvalues in every order.
fn polynomial_images(a: &IntMatrix, a_roots: &[f64; 4], chi: &IntPoly) -> Result<Vec<(Vec<i64>, IntMatrix)>> {
    let roots = isolate_real_roots(chi)?;
    if roots.len() != 4 {
        return Ok(Vec::new());
    }
    let mu: Vec<f64> = roots.iter().map(|r| r.refine_to_bits(60).map(|x| x.to_f64())).collect::<Result<_>>()?;
    let vander: [[f64; 4]; 4] = a_roots.map(|l| [1.0, l, l * l, l * l * l]);
    let mut out: Vec<(Vec<i64>, IntMatrix)> = Vec::new();
    for p in permutations4() {
        let rhs = [mu[p[0]], mu[p[1]], mu[p[2]], mu[p[3]]];
        let Some(c) = gauss_solve(vander, rhs) else { continue };
        if c.iter().any(|x| !x.is_finite() || x.abs() > 1e9 || (x - x.round()).abs() > 1e-4) {
            continue;
        }
        let coeffs: Vec<i64> = c.iter().map(|x| x.round() as i64).collect();
        let poly = IntPoly::from_i64(&coeffs);
        let n = match a.eval_poly(&poly) {
            Ok(n) => n,
            Err(Error::Overflow(_)) => continue,
            Err(e) => return Err(e),
        };
        if &n.char_poly() == chi && !out.iter().any(|(q, _)| *q == coeffs) {
            out.push((coeffs, n));
        }
    }
    Ok(out)
}

/// Exact integer Gram–Schmidt-free LLL on a few short integer vectors,
/// using floating Gram–Schmidt coefficients (adequate at this size).
fn lll(mut b: Vec<Vec<i128>>) -> Vec<Vec<i128>> {
    let n = b.len();
    let dotf = |x: &[i128], y: &[f64]| x.iter().zip(y).map(|(a, b)| *a as f64 * b).sum::<f64>();
    let mut k = 1;
    let mut guard = 0;
    while k < n && guard < 10_000 {
        guard += 1;
        // Gram–Schmidt of the current basis
        let mut bs: Vec<Vec<f64>> = Vec::new();
        let mut mu = vec![vec![0f64; n]; n];
        for i in 0..n {
            let mut v: Vec<f64> = b[i].iter().map(|&x| x as f64).collect();
            for j in 0..i {
                let nj: f64 = bs[j].iter().map(|x| x * x).sum();
                mu[i][j] = dotf(&b[i], &bs[j]) / nj;
                for (vv, w) in v.iter_mut().zip(&bs[j]) {
                    *vv -= mu[i][j] * w;
                }
            }
            bs.push(v);
        }
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                let qi = q as i128;
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= qi * y;
                }
                for l in 0..=j {
                    mu[k][l] -= q * if l == j { 1.0 } else { mu[j][l] };
                }
            }
        }
        let nk: f64 = {
            let mut v: Vec<f64> = b[k].iter().map(|&x| x as f64).collect();
            for j in 0..k {
                for (vv, w) in v.iter_mut().zip(&bs[j]) {
                    *vv -= mu[k][j] * w;
                }
            }
            v.iter().map(|x| x * x).sum()
        };
        let nk1: f64 = bs[k - 1].iter().map(|x| x * x).sum();
        if nk >= (0.75 - mu[k][k - 1] * mu[k][k - 1]) * nk1 {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    b
}

/// A unimodular `P` with `P m = n P`, searched among small combinations of
/// an LLL-reduced basis of all integer solutions.
fn find_conjugator(m: &IntMatrix, n: &IntMatrix, radius: i64) -> Result<Option<IntMatrix>> {
    // unknown X row-major; equation (i,j): sum_k x_ik m_kj - n_ik x_kj = 0
    let mut rows = Vec::with_capacity(16);
    for i in 0..4 {
        for j in 0..4 {
            let mut r = vec![0i128; 16];
            for k in 0..4 {
                r[i * 4 + k] += m.0[k][j] as i128;
                r[k * 4 + j] -= n.0[i][k] as i128;
            }
            rows.push(r);
        }
    }
    let basis = lll(integer_kernel(&rows, 16)?);
    if basis.len() != 4 {
        return Err(Error::Invariant(format!("intertwiner space has rank {}", basis.len())));
    }
    // shells of growing max-norm keep the search order deterministic and small-first
    for r in 0..=radius {
        for x0 in -r..=r {
            for x1 in -r..=r {
                for x2 in -r..=r {
                    for x3 in -r..=r {
                        if [x0, x1, x2, x3].iter().map(|v| v.abs()).max() != Some(r) {
                            continue;
                        }
                        let x = [x0, x1, x2, x3];
                        let mut p = [[0i64; 4]; 4];
                        let mut ok = true;
                        for (idx, cell) in p.iter_mut().flatten().enumerate() {
                            let v: i128 = (0..4).map(|t| x[t] as i128 * basis[t][idx]).sum();
                            match i64::try_from(v) {
                                Ok(v) => *cell = v,
                                Err(_) => ok = false,
                            }
                        }
                        if !ok {
                            continue;
                        }
                        if let Ok(d) = det4(&p) {
                            if d.abs() == 1 {
                                return Ok(Some(IntMatrix(p)));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Whether `d1·d2` is a perfect square (so `d1/d2` is a rational square).
fn square_ratio(d1: &BigInt, d2: &BigInt) -> bool {
    let prod = d1 * d2;
    if prod.sign() == num_bigint::Sign::Minus {
        return false;
    }
    let r = prod.sqrt();
    &r * &r == prod
}

fn resolve(m: &IntMatrix, chi: &IntPoly, reference: &Reference) -> Result<Resolution> {
    let a = reference.orthant.operator();
    let d = chi.discriminant();
    let d_ref = reference.orthant.charpoly().discriminant();
    if !square_ratio(&d, &d_ref) {
        return Ok(Resolution::Inequivalent { discriminant: d.to_string(), reference_discriminant: d_ref.to_string() });
    }
    let a_roots: [f64; 4] = {
        let f = reference.orthant.forms();
        [f[0].eigenvalue_f64(), f[1].eigenvalue_f64(), f[2].eigenvalue_f64(), f[3].eigenvalue_f64()]
    };
    let images = polynomial_images(a, &a_roots, chi)?;
    if images.is_empty() {
        return Ok(Resolution::Unresolved {
            reason: "eigenvalues are not integer polynomials in the reference eigenvalues".into(),
        });
    }
    for (poly, n) in &images {
        let Some(p) = find_conjugator(m, n, 4)? else { continue };
        if p.checked_mul(m)? != n.checked_mul(&p)? {
            return Err(Error::Invariant("conjugator check failed".into()));
        }
        let pinv = p.inverse()?;
        // transport the reference sail into the candidate's coordinates
        let seed = pinv.apply(&reference.seed)?;
        let orthant = Orthant::containing(m, &seed)?;
        let gens: Vec<IntMatrix> = reference
            .generators
            .iter()
            .map(|g| pinv.checked_mul(g)?.checked_mul(&p))
            .collect::<Result<_>>()?;
        let labels: Vec<String> = (1..=3).map(|i| format!("P^-1 B{i} P")).collect();
        let fp = (|| -> Result<Fingerprint> {
            let group = verify_generators(&orthant, &labels, &gens)?;
            let mut patch = build_sail_patch(&orthant, &[seed], group.generators(), 1, &reference.patch)?;
            let classes = fundamental_domain(&mut patch, &group)?;
            fingerprint(&classes)
        })();
        return Ok(match fp {
            Ok(fp) => Resolution::Resolved {
                polynomial: poly.clone(),
                conjugator: p,
                seed,
                matches: fp == reference.fingerprint,
                fingerprint: fp,
            },
            Err(e) => Resolution::Unresolved { reason: format!("sail of the transported orthant: {e}") },
        });
    }
    Ok(Resolution::Unresolved {
        reason: "no unimodular intertwiner with a polynomial in the reference operator".into(),
    })
}

fn process_chunk(first: IVec, bound: i64, reference: &Reference) -> Result<(u64, VerdictCounts, Vec<CandidateEntry>)> {
    let mut counts = VerdictCounts::default();
    let mut cands: Vec<(IntMatrix, i128, IntPoly)> = Vec::new();
    let mut n = 0u64;
    for_each_completion(first, bound - 1, &mut |m| {
        n += 1;
        let c = classify(m)?;
        counts.add(c.verdict);
        if c.verdict == Verdict::Candidate {
            cands.push((*m, c.det, c.charpoly.expect("candidate has a charpoly")));
        }
        Ok(())
    })?;
    let mut entries = Vec::with_capacity(cands.len());
    for (m, det, chi) in cands {
        let resolution = match resolve(&m, &chi, reference) {
            Ok(r) => r,
            Err(e) => Resolution::Unresolved { reason: e.to_string() },
        };
        entries.push(CandidateEntry { matrix: m, det, charpoly: chi.to_string(), resolution });
    }
    Ok((n, counts, entries))
}

fn load_checkpoint(path: &Path, bound: i64) -> Result<Option<Checkpoint>> {
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(path)?;
    let cp: Checkpoint = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("checkpoint: {e}")))?;
    if cp.bound != bound {
        return Err(Error::Contract(format!("checkpoint is for bound {}, not {bound}", cp.bound)));
    }
    Ok(Some(cp))
}

fn save_checkpoint(path: &Path, cp: &Checkpoint) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let text = serde_json::to_string(cp).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Runs the survey over all matrices with entry absolute sum below `bound`.
/// With a checkpoint path, progress is saved after every batch of chunks and
/// an existing checkpoint for the same bound is resumed.
pub fn run_survey(bound: i64, cap: i64, reference: &Reference, checkpoint: Option<&Path>) -> Result<SurveyReport> {
    if bound < 1 {
        return Err(Error::Domain(format!("survey bound {bound} must be positive")));
    }
    if bound > cap {
        return Err(Error::Resource(format!("survey bound {bound} exceeds the cap {cap}")));
    }
    let rows = first_rows(bound);
    let mut state = match checkpoint.map(|p| load_checkpoint(p, bound)).transpose()?.flatten() {
        Some(cp) => cp,
        None => Checkpoint { bound, next_chunk: 0, enumerated: 0, counts: VerdictCounts::default(), candidates: Vec::new() },
    };
    let batch = rayon::current_num_threads().max(1) * 4;
    while state.next_chunk < rows.len() {
        let end = (state.next_chunk + batch).min(rows.len());
        let results: Vec<Result<(u64, VerdictCounts, Vec<CandidateEntry>)>> = rows[state.next_chunk..end]
            .par_iter()
            .map(|r| process_chunk(*r, bound, reference))
            .collect();
        for r in results {
            let (n, c, e) = r?;
            state.enumerated += n;
            state.counts.merge(&c);
            state.candidates.extend(e);
        }
        state.next_chunk = end;
        if let Some(p) = checkpoint {
            save_checkpoint(p, &state)?;
        }
    }
    let mut report = SurveyReport {
        bound,
        enumerated: state.enumerated,
        counts: state.counts,
        candidates_det_plus: 0,
        candidates_det_minus: 0,
        reference_fingerprint: reference.fingerprint.clone(),
        matched: 0,
        mismatched: 0,
        inequivalent: 0,
        unresolved: 0,
        candidates: state.candidates,
    };
    for c in &report.candidates {
        if c.det == 1 {
            report.candidates_det_plus += 1;
        } else {
            report.candidates_det_minus += 1;
        }
        match &c.resolution {
            Resolution::Resolved { matches: true, .. } => report.matched += 1,
            Resolution::Resolved { matches: false, .. } => report.mismatched += 1,
            Resolution::Inequivalent { .. } => report.inequivalent += 1,
            Resolution::Unresolved { .. } => report.unresolved += 1,
        }
    }
    if report.enumerated as u128 != matrix_count(bound) || report.counts.total() != report.enumerated {
        return Err(Error::Invariant("survey counts do not add up".into()));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matops::{companion, CompanionSpec};

    #[test]
    fn counts_match_closed_form() {
        for s in 1..=4 {
            assert_eq!(enumerate_matrices(s).count() as u128, matrix_count(s), "s = {s}");
        }
        assert_eq!(matrix_count(1), 1);
        let all: Vec<IntMatrix> = enumerate_matrices(3).collect();
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len());
    }

    #[test]
    fn identity_is_in_range_5() {
        assert!(enumerate_matrices(5).any(|m| m == IntMatrix::identity()));
        let a3 = companion(CompanionSpec::new(-1, -3, 1, 3));
        assert_eq!(a3.abs_sum(), 11);
    }

    #[test]
    fn verdicts() {
        assert_eq!(classify(&IntMatrix::identity()).unwrap().verdict, Verdict::Reducible);
        assert_eq!(classify(&IntMatrix::zero()).unwrap().verdict, Verdict::NotUnimodular);
        let a1 = companion(CompanionSpec::new(1, -3, 0, 4));
        let c = classify(&a1).unwrap();
        assert_eq!(c.verdict, Verdict::Candidate);
        assert_eq!(c.det, -1);
        // t^4 - t - 1 has two real roots
        let nh = companion(CompanionSpec::new(1, 1, 0, 0));
        assert_eq!(classify(&nh).unwrap().verdict, Verdict::NotHyperbolic);
    }

    #[test]
    fn discriminant_square_test() {
        let a = IntPoly::from_i64(&[-1, 3, 0, -4, 1]).discriminant();
        let b = IntPoly::from_i64(&[1, 0, -4, 0, 1]).discriminant();
        assert!(square_ratio(&a, &a));
        assert!(!square_ratio(&a, &b));
        assert!(square_ratio(&BigInt::from(725), &BigInt::from(725 * 9)));
    }

    #[test]
    fn conjugator_for_transpose() {
        let a1 = companion(CompanionSpec::new(1, -3, 0, 4));
        let t = a1.transpose();
        let p = find_conjugator(&t, &a1, 4).unwrap().unwrap();
        assert_eq!(p.checked_mul(&t).unwrap(), a1.checked_mul(&p).unwrap());
        assert_eq!(p.det_i128().unwrap().abs(), 1);
    }
}
