//! Checks shared by the property tests and the acceptance run. Each panics
//! on the first violation and returns the number of cases examined.
#![allow(dead_code)]

use kleinsail::cone::Orthant;
use kleinsail::exact::{algebraic_sign, isolate_real_roots, real_root_count, sturm_count, BigInt, BigRat, IntPoly, Sign};
use kleinsail::matops::{companion, dot, primitive, CompanionSpec, GeneratorWord, IVec, IntMatrix};
use kleinsail::quotient::{integer_distance, integer_volume, orbit_equivalent, verify_xi, XiGroup};
use kleinsail::sail::{certify_facet, enumerate_cone_points, lift_to_facet, pivot, Facet, FaceSkeleton, FacetStatus};
use kleinsail::survey::{classify, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn hyperbolic_companions(n: usize, seed: u64) -> Vec<IntMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let a = if rng.gen_bool(0.5) { 1 } else { -1 };
        let m = companion(CompanionSpec::new(a, rng.gen_range(-5..=5), rng.gen_range(-5..=5), rng.gen_range(-5..=5)));
        if classify(&m).unwrap().verdict == Verdict::Candidate && !out.contains(&m) {
            out.push(m);
        }
    }
    out
}

pub fn facet(normal: IVec, level: i64, vertices: &[IVec]) -> Facet {
    Facet::new(normal, level, vertices.to_vec(), FacetStatus::Candidate).unwrap()
}

pub fn t11() -> Facet {
    facet([-1, 8, -13, 4], 4, &[[-3, -2, -1, 1], [0, 0, 0, 1], [-5, -4, -3, -2], [4, 1, 0, 0]])
}

pub fn t17() -> Facet {
    facet([0, 2, -4, 1], 1, &[[-3, -2, -1, 1], [0, 0, 1, 5], [0, 0, 0, 1], [2, 1, 1, 3]])
}

pub fn t31() -> Facet {
    facet(
        [3, 3, -7, 2],
        1,
        &[
            [-1, -1, -1, 0],
            [-2, -2, -1, 3],
            [0, 0, 1, 4],
            [-4, -5, -6, -7],
            [-6, -7, -8, -8],
            [-3, -4, -4, -3],
            [-1, -2, -2, -2],
            [-9, -11, -13, -15],
        ],
    )
}

/// Lifts a facet near e4 for random hyperbolic companions, pivots across
/// each of its 2-faces, and checks every resulting facet against a
/// brute-force enumeration with max-norm bound 1..=6.
pub fn certification_soundness(trials: usize, seed: u64) -> usize {
    let mut facets_checked = 0;
    for (i, a) in hyperbolic_companions(trials, seed).iter().enumerate() {
        let o = Orthant::containing(a, &[0, 0, 0, 1]).unwrap();
        let f = lift_to_facet(&o, &[0, 0, 0, 1]).unwrap();
        let mut facets = vec![f.clone()];
        for r in f.skeleton().unwrap().ridge_points() {
            facets.push(pivot(&o, &f, &r).unwrap());
        }
        let pts = enumerate_cone_points(&o, 1 + (i % 6) as i64).unwrap();
        for f in &facets {
            assert!(certify_facet(f, &o).unwrap().is_certified(), "{a:?} {f:?}");
            let c = f.level as i128;
            for x in &pts {
                let v = dot(&f.normal, x);
                assert!(v >= c, "operator {a:?}: point {x:?} lies below facet {:?} at {}", f.normal, f.level);
                if v == c {
                    let with = FaceSkeleton::new(&f.normal, &[f.vertices.clone(), vec![*x]].concat()).unwrap();
                    assert_eq!(with.vertices, f.vertices, "point {x:?} on the plane lies outside the facet");
                }
            }
            facets_checked += 1;
        }
    }
    assert!(facets_checked >= trials);
    trials
}

pub fn random_unimodular(rng: &mut ChaCha8Rng) -> IntMatrix {
    let mut m = IntMatrix::identity();
    for _ in 0..6 {
        let i = rng.gen_range(0..4);
        let mut j = rng.gen_range(0..3);
        if j >= i {
            j += 1;
        }
        let mut e = IntMatrix::identity();
        e.0[i][j] = rng.gen_range(-2..=2i64);
        m = m.checked_mul(&e).unwrap();
        if rng.gen_bool(0.2) {
            let mut p = IntMatrix::identity();
            p.0[i][i] = -1;
            m = m.checked_mul(&p).unwrap();
        }
    }
    m
}

/// Primitive normal of the hyperplane through four points; zero when they
/// are affinely dependent.
pub fn plane_normal(p: &[IVec]) -> IVec {
    let d: Vec<[i128; 4]> = p[1..4].iter().map(|x| [0, 1, 2, 3].map(|i| (x[i] - p[0][i]) as i128)).collect();
    let minor = |c: [usize; 3]| -> i128 {
        let m = |r: usize, k: usize| d[r][c[k]];
        m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
    };
    let n = [minor([1, 2, 3]), -minor([0, 2, 3]), minor([0, 1, 3]), -minor([0, 1, 2])];
    if n == [0; 4] {
        return [0; 4];
    }
    primitive(&n.map(|x| x as i64))
}

fn spanning_quadruple(f: &Facet) -> Vec<IVec> {
    let v = &f.vertices;
    for i in 1..v.len() {
        for j in i + 1..v.len() {
            for k in j + 1..v.len() {
                let q = vec![v[0], v[i], v[j], v[k]];
                if plane_normal(&q) != [0; 4] {
                    return q;
                }
            }
        }
    }
    panic!("flat facet");
}

/// Moves faces by random `x -> Ux + t` and recomputes the plane, the
/// distance to the moved origin and the volume from the image alone.
pub fn affine_invariance(maps: usize, seed: u64) -> usize {
    let faces = [t11(), t17(), t31()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..maps {
        let f = &faces[trial % faces.len()];
        let u = random_unimodular(&mut rng);
        let t: IVec = [0; 4].map(|_| rng.gen_range(-20..=20));
        let map = |x: &IVec| {
            let y = u.apply(x).unwrap();
            [0, 1, 2, 3].map(|i| y[i] + t[i])
        };
        let img: Vec<IVec> = f.vertices.iter().map(map).collect();
        let h = plane_normal(&spanning_quadruple(f).iter().map(map).collect::<Vec<_>>());
        let c = (dot(&h, &img[0]) - dot(&h, &t)) as i64;
        assert_eq!(integer_distance(&h, c).unwrap(), integer_distance(&f.normal, f.level).unwrap());
        let sk = FaceSkeleton::new(&h, &img).unwrap();
        assert_eq!(sk.lattice_volume().unwrap(), integer_volume(f).unwrap());
        assert_eq!(sk.vertices.len(), f.vertices.len());
    }
    maps
}

pub fn example1_group() -> (Orthant, XiGroup) {
    let a = companion(CompanionSpec::new(1, -3, 0, 4));
    let o = Orthant::containing(&a, &[0, 0, 0, 1]).unwrap();
    let words: Vec<GeneratorWord> = ["A^-2", "(A-E)^2*A^-2", "(A-E)^2*(A+E)*A^-2"].iter().map(|w| w.parse().unwrap()).collect();
    let g = verify_xi(&o, &words).unwrap();
    (o, g)
}

pub fn power_product(g: &XiGroup, m: [i64; 3]) -> IntMatrix {
    let mut out = IntMatrix::identity();
    for (b, &k) in g.generators().iter().zip(&m) {
        out = out.checked_mul(&b.pow(k as i32).unwrap()).unwrap();
    }
    out
}

fn image_vertices(f: &Facet, m: &IntMatrix) -> Vec<IVec> {
    let mut v: Vec<IVec> = f.vertices.iter().map(|x| m.apply(x).unwrap()).collect();
    v.sort();
    v
}

/// Every element returned by the orbit search is recomputed from its
/// exponents and must map the vertex set exactly.
pub fn orbit_exactness(orbit: &XiGroup, from: &Facet, other: &Facet, m: [i64; 3]) {
    let target = from.image(&power_product(orbit, m)).unwrap();
    let e = orbit_equivalent(from, &target, orbit).unwrap().expect("same orbit");
    assert_eq!(e.matrix, power_product(orbit, e.exponents));
    assert_eq!(image_vertices(from, &e.matrix), target.vertices);
    if let Some(e) = orbit_equivalent(other, &target, orbit).unwrap() {
        assert_eq!(e.matrix, power_product(orbit, e.exponents));
        assert_eq!(image_vertices(other, &e.matrix), target.vertices);
    }
}

pub fn orbit_search(cases: usize, seed: u64) -> usize {
    let (o, g) = example1_group();
    let (a, b) = (t11(), t17());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..cases {
        let m = [0; 3].map(|_| rng.gen_range(-2..=2i64));
        let (from, other) = if i % 2 == 0 { (&a, &b) } else { (&b, &a) };
        assert!(certify_facet(&from.image(&power_product(&g, m)).unwrap(), &o).unwrap().is_certified());
        orbit_exactness(&g, from, other, m);
    }
    cases
}

pub fn companion_identity(a: i64, b: i64, c: i64, d: i64) {
    let m = companion(CompanionSpec::new(a, b, c, d));
    let chi = IntPoly::from_i64(&[-a, -b, -c, -d, 1]);
    assert_eq!(m.char_poly(), chi);
    assert_eq!(m.det(), BigInt::from(-a));
    assert_eq!(m.eval_poly(&chi).unwrap(), IntMatrix::zero());
    assert_eq!(m.transpose().char_poly(), chi);
}

pub fn companion_identities(cases: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let [a, b, c, d] = [0; 4].map(|_| rng.gen_range(-50..=50i64));
        companion_identity(a, b, c, d);
    }
    cases
}

fn coeff_mass(p: &IntPoly) -> f64 {
    p.coeffs().iter().map(|c| c.to_string().parse::<f64>().unwrap().abs()).sum()
}

/// Sign multiplicativity at every root of `chi`, Sturm counts of the
/// isolating intervals, and agreement with floating evaluation where the
/// floating value is clearly away from zero.
pub fn sign_consistency(chi: &IntPoly, q1: &IntPoly, q2: &IntPoly) {
    let roots = isolate_real_roots(chi).unwrap();
    assert_eq!(roots.len(), real_root_count(chi).unwrap());
    let big = BigRat::from_integer(BigInt::from(10_000));
    assert_eq!(sturm_count(chi, &(-big.clone()), &big).unwrap(), roots.len());
    let prod = q1 * q2;
    for r in &roots {
        assert_eq!(sturm_count(chi, r.lo(), r.hi()).unwrap(), 1);
        let (s1, _) = algebraic_sign(q1, r).unwrap();
        let (s2, _) = algebraic_sign(q2, r).unwrap();
        let (sp, _) = algebraic_sign(&prod, r).unwrap();
        assert_eq!(sp, s1 * s2, "{q1} * {q2} at a root of {chi}");
        let x = r.refine_to_bits(60).unwrap().to_f64();
        let fl = prod.eval_f64(x);
        if fl.abs() > 1e-6 * (1.0 + coeff_mass(&prod) * x.abs().max(1.0).powi(8)) {
            assert_eq!(sp, if fl > 0.0 { Sign::Positive } else { Sign::Negative });
        }
    }
}

pub fn sign_checks(cases: usize, seed: u64) -> usize {
    let ops = hyperbolic_companions(40, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let poly = |rng: &mut ChaCha8Rng| {
        let n = rng.gen_range(1..6);
        IntPoly::from_i64(&(0..n).map(|_| rng.gen_range(-9..=9i64)).collect::<Vec<_>>())
    };
    for i in 0..cases {
        let q1 = poly(&mut rng);
        let q2 = poly(&mut rng);
        sign_consistency(&ops[i % ops.len()].char_poly(), &q1, &q2);
    }
    cases
}
