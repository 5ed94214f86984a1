//! Walking the infinite sail by exact ridge pivots, and assembling patches
//! with certified vertex stars.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};

use super::hull::best_ratio as best_ratio_point;
use super::{
    certify_facet, functional_through, hull_facets, points_below,
    Affine, Certification, FaceSkeleton, Facet, FacetStatus,
};
use crate::cone::Orthant;
use crate::error::{Error, Result};
use crate::matops::{hnf_basis, max_norm, sub, IVec, IntMatrix};

/// Largest level multiple tried when searching for the next vertex in a pivot.
const PIVOT_LEVEL_CAP: i128 = 1 << 20;

fn to_ivec(h: &[i128; 4]) -> Result<IVec> {
    let mut out = [0i64; 4];
    for i in 0..4 {
        out[i] = i64::try_from(h[i]).map_err(|_| Error::Overflow("functional"))?;
    }
    Ok(out)
}

/// Rotates the supporting functional `f` (nonnegative on all cone lattice
/// points, positive on the cone) about `{f = 0, g = 0}` until it touches a
/// new lattice point. Returns the new functional and the cone points on it.
pub(crate) fn pivot_affine(orthant: &Orthant, f: &Affine, g: &Affine) -> Result<(Affine, Vec<IVec>)> {
    let fh = to_ivec(&f.h)?;
    let fc = i64::try_from(f.c).map_err(|_| Error::Overflow("level"))?;
    let mut extra: i128 = 1;
    loop {
        let level = fc as i128 + extra;
        let lvl = i64::try_from(level).map_err(|_| Error::Overflow("pivot level"))?;
        let cand = points_below(orthant, &fh, lvl)?;
        if let Some(p) = best_ratio_point(cand.iter(), f, g) {
            let mut n = Affine::rotate(f, g, &p)?;
            let nh = to_ivec(&n.h)?;
            if orthant.functional_positive(&nh)? {
                // exact check of the rotated plane; a violator improves the ratio
                for _ in 0..64 {
                    let (nh, nc) = n.plane()?;
                    let slab = points_below(orthant, &nh, nc)?;
                    let below: Vec<IVec> = slab.iter().filter(|x| n.eval(x) < 0).copied().collect();
                    if below.is_empty() {
                        let on: Vec<IVec> = slab.into_iter().filter(|x| n.eval(x) == 0).collect();
                        return Ok((n, on));
                    }
                    let q = best_ratio_point(below.iter(), f, g)
                        .ok_or_else(|| Error::Invariant("violating point on the pivot axis".into()))?;
                    n = Affine::rotate(f, g, &q)?;
                }
                return Err(Error::Invariant("pivot did not settle".into()));
            }
        }
        if extra > PIVOT_LEVEL_CAP * (fc as i128).max(1) {
            return Err(Error::Resource("pivot found no supporting plane".into()));
        }
        extra = 2 * extra + 1;
    }
}

/// Neighbouring sail facet across the 2-face `ridge` of the certified facet `f`.
pub fn pivot(orthant: &Orthant, f: &Facet, ridge: &[IVec]) -> Result<Facet> {
    let fa = Affine::from_plane(&f.normal, f.level);
    let mut g = functional_through(ridge, &fa)?;
    let off = f
        .vertices
        .iter()
        .map(|v| g.eval(v))
        .find(|&x| x != 0)
        .ok_or_else(|| Error::Contract("ridge is not a proper face of the facet".into()))?;
    if off < 0 {
        g = g.neg();
    }
    let (n, on) = pivot_affine(orthant, &fa, &g)?;
    let (h, c) = n.plane()?;
    let sk = FaceSkeleton::new(&h, &on)?;
    Facet::new(h, c, sk.vertices, FacetStatus::Certified)
}

/// A positive functional roughly balanced at `seed`: each eigen-direction
/// contributes equally.
fn balanced_functional(orthant: &Orthant, seed: &IVec) -> Result<IVec> {
    let mut w = [0f64; 4];
    for (f, &s) in orthant.forms().iter().zip(&orthant.sigma().0) {
        let v = f.eval_f64(seed).abs().max(1e-300);
        let c = f.coeffs_f64();
        for i in 0..4 {
            w[i] += s as f64 * c[i] / v;
        }
    }
    let m = w.iter().fold(0f64, |a, b| a.max(b.abs()));
    for scale in [1e1, 1e2, 1e3, 1e4, 1e5, 1e6] {
        let h = w.map(|x| (x / m * scale).round() as i64);
        if h != [0; 4] && orthant.functional_positive(&h)? {
            return Ok(h);
        }
    }
    Err(Error::Resource("no positive integer functional near the seed".into()))
}

/// A certified sail facet reached from the seed by lifting a supporting plane.
pub fn lift_to_facet(orthant: &Orthant, seed: &IVec) -> Result<Facet> {
    if !orthant.contains(seed)? {
        return Err(Error::Contract(format!("seed {seed:?} is not in the orthant")));
    }
    let h0 = balanced_functional(orthant, seed)?;
    let top = i64::try_from(crate::matops::dot(&h0, seed)).map_err(|_| Error::Overflow("seed level"))?;
    let pts = points_below(orthant, &h0, top)?;
    let c0 = pts.iter().map(|x| crate::matops::dot(&h0, x)).min().unwrap_or(top as i128);
    let mut f = Affine { h: h0.map(|v| v as i128), c: c0 };
    let mut on: Vec<IVec> = pts.into_iter().filter(|x| f.eval(x) == 0).collect();
    for _ in 0..4 {
        let diffs: Vec<IVec> = on.iter().map(|p| sub(p, &on[0])).collect();
        if on.len() >= 4 && hnf_basis(&diffs)?.rank == 3 {
            let (h, c) = f.plane()?;
            let sk = FaceSkeleton::new(&h, &on)?;
            return Facet::new(h, c, sk.vertices, FacetStatus::Certified);
        }
        let g = functional_through(&on, &f)?;
        let (n, o) = pivot_affine(orthant, &f, &g)?;
        f = n;
        on = o;
    }
    Err(Error::Invariant("lifting did not reach a facet".into()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PatchOptions {
    /// Largest number of points fed into the seeding hull.
    pub hull_points: usize,
    pub max_facets: usize,
    /// Facet expansions allowed when walking towards one target.
    pub walk_budget: usize,
    /// Targets with a larger max-norm are recorded as unreached.
    pub max_norm: i64,
}

impl Default for PatchOptions {
    fn default() -> Self {
        PatchOptions { hull_points: 2500, max_facets: 20_000, walk_budget: 3000, max_norm: 64 }
    }
}

/// Certified facets of one sail, with their adjacency across 2-faces.
#[derive(Clone, Debug)]
pub struct SailPatch {
    orthant: Orthant,
    facets: Vec<Facet>,
    skeletons: Vec<FaceSkeleton>,
    index: HashMap<(IVec, i64), usize>,
    adjacency: BTreeMap<IVec, Vec<usize>>,
    /// Neighbour across each 2-face, aligned with `skeletons[i].two_faces`.
    across: Vec<Vec<Option<usize>>>,
    complete: BTreeSet<IVec>,
    unreached: Vec<IVec>,
    max_facets: usize,
}

impl SailPatch {
    pub fn new(orthant: Orthant) -> Self {
        SailPatch {
            orthant,
            facets: Vec::new(),
            skeletons: Vec::new(),
            index: HashMap::new(),
            adjacency: BTreeMap::new(),
            across: Vec::new(),
            complete: BTreeSet::new(),
            unreached: Vec::new(),
            max_facets: PatchOptions::default().max_facets,
        }
    }

    pub fn orthant(&self) -> &Orthant {
        &self.orthant
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn facet(&self, id: usize) -> &Facet {
        &self.facets[id]
    }

    pub fn skeleton(&self, id: usize) -> &FaceSkeleton {
        &self.skeletons[id]
    }

    pub fn find(&self, key: &(IVec, i64)) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Facets incident to the vertex `v`.
    pub fn star(&self, v: &IVec) -> &[usize] {
        self.adjacency.get(v).map(|s| s.as_slice()).unwrap_or(&[])
    }

    pub fn vertices(&self) -> impl Iterator<Item = &IVec> {
        self.adjacency.keys()
    }

    pub fn complete_vertices(&self) -> &BTreeSet<IVec> {
        &self.complete
    }

    pub fn is_complete(&self, v: &IVec) -> bool {
        self.complete.contains(v)
    }

    /// Targets that the walk could not reach as sail vertices.
    pub fn unreached(&self) -> &[IVec] {
        &self.unreached
    }

    /// Adds a certified facet; returns its id.
    pub fn insert(&mut self, f: Facet) -> Result<usize> {
        if f.status != FacetStatus::Certified {
            return Err(Error::Contract("only certified facets enter a patch".into()));
        }
        if let Some(&id) = self.index.get(&f.key()) {
            return Ok(id);
        }
        if self.facets.len() >= self.max_facets {
            return Err(Error::Resource(format!("patch exceeds {} facets", self.max_facets)));
        }
        let sk = f.skeleton()?;
        let id = self.facets.len();
        for v in &f.vertices {
            self.adjacency.entry(*v).or_default().push(id);
        }
        self.index.insert(f.key(), id);
        self.across.push(vec![None; sk.two_faces.len()]);
        self.skeletons.push(sk);
        self.facets.push(f);
        Ok(id)
    }

    /// The facet across 2-face `r` of facet `id`, computing it if needed.
    pub fn neighbor(&mut self, id: usize, r: usize) -> Result<usize> {
        if let Some(n) = self.across[id][r] {
            return Ok(n);
        }
        let ridge = &self.skeletons[id].ridge_points()[r];
        let nf = pivot(&self.orthant, &self.facets[id], ridge)?;
        let n = self.insert(nf)?;
        self.across[id][r] = Some(n);
        if let Some(back) = self.skeletons[n].ridge_points().iter().position(|x| x == ridge) {
            self.across[n][back] = Some(id);
        } else {
            return Err(Error::Invariant("neighbouring facets do not share the ridge".into()));
        }
        Ok(n)
    }

    pub fn expand(&mut self, id: usize) -> Result<Vec<usize>> {
        (0..self.skeletons[id].two_faces.len()).map(|r| self.neighbor(id, r)).collect()
    }

    /// Closes the star of the vertex `v`: every 2-face through `v` of every
    /// incident facet gets its neighbour. Marks `v` complete.
    pub fn complete_star(&mut self, v: &IVec) -> Result<()> {
        if self.complete.contains(v) {
            return Ok(());
        }
        let mut done: BTreeSet<usize> = BTreeSet::new();
        loop {
            let todo: Vec<usize> = self.star(v).iter().copied().filter(|i| !done.contains(i)).collect();
            if todo.is_empty() {
                break;
            }
            for id in todo {
                let sk = &self.skeletons[id];
                let vi = sk
                    .vertices
                    .binary_search(v)
                    .map_err(|_| Error::Invariant("star facet misses its vertex".into()))?;
                let through: Vec<usize> =
                    (0..sk.two_faces.len()).filter(|&r| sk.two_faces[r].contains(&vi)).collect();
                for r in through {
                    self.neighbor(id, r)?;
                }
                done.insert(id);
            }
        }
        if self.star(v).is_empty() {
            return Err(Error::Contract(format!("{v:?} is not a vertex of the patch")));
        }
        self.complete.insert(*v);
        Ok(())
    }

    fn log_f64(&self, x: &IVec) -> [f64; 3] {
        let l: Vec<f64> = self.orthant.forms().iter().map(|f| f.eval_f64(x).abs().max(1e-300).ln()).collect();
        [l[0] - l[3], l[1] - l[3], l[2] - l[3]]
    }

    /// Best-first walk over the sail towards `target`. Returns the facet
    /// containing it as a vertex, or `None` if it lies on the sail without
    /// being a vertex.
    pub fn walk_to(&mut self, target: &IVec, budget: usize) -> Result<Option<usize>> {
        if let Some(&id) = self.star(target).first() {
            return Ok(Some(id));
        }
        if self.facets.is_empty() {
            return Err(Error::Contract("walk needs a starting facet".into()));
        }
        #[derive(PartialEq)]
        struct Item(f64, usize);
        impl Eq for Item {}
        impl PartialOrd for Item {
            fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                Some(self.cmp(o))
            }
        }
        impl Ord for Item {
            fn cmp(&self, o: &Self) -> Ordering {
                o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
            }
        }
        let goal = self.log_f64(target);
        let dist = |p: &SailPatch, id: usize| {
            let l = p.log_f64(&p.facets[id].vertex_sum());
            (0..3).map(|i| (l[i] - goal[i]).powi(2)).sum::<f64>()
        };
        let mut heap: BinaryHeap<Item> = (0..self.facets.len()).map(|i| Item(dist(self, i), i)).collect();
        let mut expanded: BTreeSet<usize> = BTreeSet::new();
        let mut steps = 0;
        while let Some(Item(_, id)) = heap.pop() {
            if !expanded.insert(id) {
                continue;
            }
            let f = &self.facets[id];
            if f.has_vertex(target) {
                return Ok(Some(id));
            }
            if crate::matops::dot(&f.normal, target) == f.level as i128 {
                return Ok(None);
            }
            steps += 1;
            if steps > budget {
                return Err(Error::Resource(format!("walk towards {target:?} exceeded {budget} facets")));
            }
            let before = self.facets.len();
            for n in self.expand(id)? {
                if !expanded.contains(&n) {
                    heap.push(Item(dist(self, n), n));
                }
            }
            debug_assert!(self.facets.len() >= before);
        }
        Err(Error::Invariant("walk exhausted a connected sail".into()))
    }
}

/// All products of at most `depth` factors from the generators and their inverses.
fn words(generators: &[IntMatrix], depth: usize) -> Result<Vec<IntMatrix>> {
    let mut steps = Vec::new();
    for g in generators {
        steps.push(*g);
        steps.push(g.inverse()?);
    }
    let mut all: BTreeSet<IntMatrix> = BTreeSet::from([IntMatrix::identity()]);
    let mut frontier = vec![IntMatrix::identity()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &frontier {
            for s in &steps {
                let m = s.checked_mul(w)?;
                if all.insert(m) {
                    next.push(m);
                }
            }
        }
        frontier = next;
    }
    Ok(all.into_iter().collect())
}

fn seed_facet(orthant: &Orthant, targets: &[IVec], opts: &PatchOptions) -> Result<Facet> {
    // hull of the cone points below the seed for a functional balanced at it;
    // every sail facet with all vertices in that set is a hull facet
    let seed = targets[0];
    let h0 = balanced_functional(orthant, &seed)?;
    let mut top = i64::try_from(crate::matops::dot(&h0, &seed)).map_err(|_| Error::Overflow("seed level"))?;
    for _ in 0..4 {
        let pts = match points_below(orthant, &h0, top) {
            Ok(p) => p,
            Err(Error::Resource(_)) => break,
            Err(e) => return Err(e),
        };
        if pts.len() > opts.hull_points {
            break;
        }
        if let Ok(cands) = hull_facets(&pts) {
            let mut fallback = None;
            for f in cands.iter().filter(|f| f.level > 0) {
                let near = targets.iter().any(|t| f.has_vertex(t));
                if !near && fallback.is_some() {
                    continue;
                }
                if let Certification::Certified(c) = certify_facet(f, orthant)? {
                    if near {
                        return Ok(c);
                    }
                    fallback = Some(c);
                }
            }
            if let Some(c) = fallback {
                return Ok(c);
            }
        }
        top = top.checked_mul(2).ok_or(Error::Overflow("seed level"))?;
    }
    lift_to_facet(orthant, &seed)
}

/// Certified facets around every image of the seeds under generator words
/// of length at most `depth`, with closed stars at each such vertex.
pub fn build_sail_patch(
    orthant: &Orthant,
    seeds: &[IVec],
    generators: &[IntMatrix],
    depth: usize,
    opts: &PatchOptions,
) -> Result<SailPatch> {
    if seeds.is_empty() {
        return Err(Error::Domain("no seed points".into()));
    }
    let mut targets: Vec<IVec> = Vec::new();
    for w in words(generators, depth)? {
        for s in seeds {
            let t = w.apply(s)?;
            if !orthant.contains(&t)? {
                return Err(Error::Contract(format!("generator image {t:?} leaves the orthant")));
            }
            targets.push(t);
        }
    }
    // seeds first, then images in lexicographic order
    let mut rest: Vec<IVec> = targets.split_off(0);
    rest.sort();
    rest.dedup();
    let mut targets: Vec<IVec> = seeds.to_vec();
    targets.extend(rest.into_iter().filter(|t| !seeds.contains(t)));

    let mut patch = SailPatch::new(orthant.clone());
    patch.max_facets = opts.max_facets;
    let start = seed_facet(orthant, &targets, opts)?;
    patch.insert(start)?;
    for t in &targets {
        if max_norm(t) > opts.max_norm {
            patch.unreached.push(*t);
            continue;
        }
        match patch.walk_to(t, opts.walk_budget) {
            Ok(Some(_)) => patch.complete_star(t)?,
            Ok(None) => patch.unreached.push(*t),
            Err(Error::Resource(_)) => patch.unreached.push(*t),
            Err(e) => return Err(e),
        }
    }
    if patch.complete.is_empty() {
        return Err(Error::Resource(format!(
            "no seed reached as a sail vertex; {} certified facets found",
            patch.facets.len()
        )));
    }
    Ok(patch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sail::supporting_face;
    use crate::matops::{companion, CompanionSpec};

    #[test]
    fn lifting_finds_a_certified_facet() {
        let a = companion(CompanionSpec::new(1, -3, 0, 4));
        let o = Orthant::containing(&a, &[0, 0, 0, 1]).unwrap();
        let f = lift_to_facet(&o, &[0, 0, 0, 1]).unwrap();
        assert!(certify_facet(&f, &o).unwrap().is_certified());
    }

    #[test]
    fn pivot_from_t17_gives_certified_neighbours() {
        let a = companion(CompanionSpec::new(1, -3, 0, 4));
        let o = Orthant::containing(&a, &[0, 0, 0, 1]).unwrap();
        let t17 = supporting_face(&o, &[0, 2, -4, 1], 1).unwrap().unwrap();
        assert_eq!(t17.vertices.len(), 4);
        let sk = t17.skeleton().unwrap();
        for ridge in sk.ridge_points() {
            let n = pivot(&o, &t17, &ridge).unwrap();
            assert!(certify_facet(&n, &o).unwrap().is_certified());
            assert!(ridge.iter().all(|v| n.has_vertex(v)));
        }
    }

    #[test]
    fn star_closes_at_e4() {
        let a = companion(CompanionSpec::new(1, -3, 0, 4));
        let o = Orthant::containing(&a, &[0, 0, 0, 1]).unwrap();
        let p = build_sail_patch(&o, &[[0, 0, 0, 1]], &[], 0, &PatchOptions::default()).unwrap();
        assert!(p.is_complete(&[0, 0, 0, 1]));
        assert!(p.star(&[0, 0, 0, 1]).len() >= 5);
        for f in p.facets() {
            assert!(certify_facet(f, &o).unwrap().is_certified());
        }
    }
}
