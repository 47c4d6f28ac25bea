//! Exact fourth moment of the standardized monochromatic triangle count.
//!
//! Expanding `E (T3 - E T3)^4 - 3 Var(T3)^2` gives one term per set of at
//! most four distinct triangles. The term depends only on the isomorphism
//! class of the set (its union graph with the triangles marked), so the
//! excess fourth moment is `sum over classes coefficient * count / sigma^4`.
//!
//! A set of triangles is described up to isomorphism by the multiset of
//! vertex incidence masks: vertex `v` gets the bitmask of the triangles that
//! contain it. Two sets are isomorphic exactly when their mask multisets
//! agree after renumbering the triangles, so the canonical key is the
//! smallest packed mask histogram over the `k!` renumberings.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::LazyLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::census::{PyramidCounts, TriangleCensus};
use crate::error::{Error, Result};
use crate::graph::Vertex;
use crate::moments::t3_mean_var_exact;
use crate::poly::RationalPoly;
use crate::report::{biguint_string, Exact};

/// Default cap on the number of connected triangle sets visited.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Canonical key of a set of 1 to 4 distinct triangles.
///
/// Packed histogram of vertex incidence masks: nibble `m - 1` holds the
/// number of vertices whose mask is `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConfigKey(u64);

/// Bit renumberings for `k` triangles: `PERMS[k][p][mask]`.
static PERMS: LazyLock<Vec<Vec<[u8; 16]>>> = LazyLock::new(|| {
    (0..=4usize)
        .map(|k| {
            permutations(k)
                .into_iter()
                .map(|perm| {
                    let mut table = [0u8; 16];
                    for (mask, slot) in table.iter_mut().enumerate() {
                        let mut out = mask as u8 & !((1u8 << k) - 1);
                        for (i, &p) in perm.iter().enumerate() {
                            if mask & (1 << i) != 0 {
                                out |= 1 << p;
                            }
                        }
                        *slot = out;
                    }
                    table
                })
                .collect()
        })
        .collect()
});

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(k - 1) {
        for pos in 0..k {
            let mut p = rest.clone();
            p.insert(pos, k - 1);
            out.push(p);
        }
    }
    out
}

impl ConfigKey {
    /// Canonical key from the vertex masks of a `k`-triangle set.
    fn from_masks(k: usize, masks: &[u8]) -> Self {
        let mut hist = [0u8; 16];
        for &m in masks {
            debug_assert!(m != 0 && (m as usize) < (1 << k));
            hist[m as usize] += 1;
        }
        let best = PERMS[k]
            .iter()
            .map(|table| {
                hist.iter()
                    .enumerate()
                    .skip(1)
                    .filter(|(_, &n)| n > 0)
                    .fold(0u64, |acc, (m, &n)| {
                        acc | (n as u64) << (4 * (table[m] as u64 - 1))
                    })
            })
            .min()
            .expect("at least one permutation");
        ConfigKey(best)
    }

    /// Key of a set of distinct triangles.
    pub fn of_triangles(triangles: &[[Vertex; 3]]) -> Self {
        let k = triangles.len();
        assert!((1..=4).contains(&k), "configurations hold 1 to 4 triangles");
        let mut verts: Vec<(Vertex, u8)> = Vec::with_capacity(3 * k);
        for (i, t) in triangles.iter().enumerate() {
            for &v in t {
                match verts.iter_mut().find(|(w, _)| *w == v) {
                    Some((_, m)) => *m |= 1 << i,
                    None => verts.push((v, 1 << i)),
                }
            }
        }
        let masks: Vec<u8> = verts.into_iter().map(|(_, m)| m).collect();
        Self::from_masks(k, &masks)
    }

    /// Vertex masks, ascending.
    pub fn masks(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for m in 1..16u8 {
            let n = (self.0 >> (4 * (m as u64 - 1))) & 0xf;
            out.extend(std::iter::repeat_n(m, n as usize));
        }
        out
    }

    pub fn triangle_count(&self) -> usize {
        let all = self.masks().into_iter().fold(0u8, |a, m| a | m);
        8 - all.leading_zeros() as usize
    }

    pub fn vertex_count(&self) -> usize {
        self.masks().len()
    }

    /// A set of triangles realizing this class, on vertices `0..vertex_count`.
    pub fn representative(&self) -> Vec<[Vertex; 3]> {
        let masks = self.masks();
        (0..self.triangle_count())
            .map(|i| {
                let vs: Vec<Vertex> = masks
                    .iter()
                    .enumerate()
                    .filter(|(_, &m)| m & (1 << i) != 0)
                    .map(|(v, _)| v as Vertex)
                    .collect();
                [vs[0], vs[1], vs[2]]
            })
            .collect()
    }

    /// Edges of the union graph of the representative.
    pub fn union_edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut edges: Vec<(Vertex, Vertex)> = self
            .representative()
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])])
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    /// Whether the union graph is connected.
    pub fn is_connected(&self) -> bool {
        let fp = Footprint::from_masks(self.triangle_count(), self.masks());
        let full = (1u8 << fp.k) - 1;
        fp.components(full) == 1
    }

    /// Structural name for the classes with a closed form: the `s`-pyramids
    /// and the bipyramid-chain quadruple.
    pub fn label(&self) -> Option<&'static str> {
        NAMED.iter().find(|(k, _)| k == self).map(|(_, name)| *name)
    }
}

impl fmt::Display for ConfigKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let masks: Vec<String> = self.masks().iter().map(|m| format!("{m:x}")).collect();
        write!(f, "k{}:{}", self.triangle_count(), masks.join(""))
    }
}

impl Serialize for ConfigKey {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `s` triangles on the common edge `{0, 1}`.
pub fn pyramid_triangles(s: usize) -> Vec<[Vertex; 3]> {
    (0..s as Vertex).map(|i| [0, 1, 2 + i]).collect()
}

/// The four triangles `{a,s,u}`, `{b,s,u'}`, `{a,t,w}`, `{b,t,w'}` of a
/// bipyramid chain on two middle vertices `s`, `t`.
pub fn bipyramid_quadruple_triangles() -> Vec<[Vertex; 3]> {
    // a = 0, b = 1, s = 2, t = 3, apexes 4..8
    vec![[0, 2, 4], [1, 2, 5], [0, 3, 6], [1, 3, 7]]
}

static NAMED: LazyLock<Vec<(ConfigKey, &'static str)>> = LazyLock::new(|| {
    let mut named: Vec<(ConfigKey, &'static str)> =
        ["pyramid1", "pyramid2", "pyramid3", "pyramid4"]
            .into_iter()
            .enumerate()
            .map(|(i, name)| (ConfigKey::of_triangles(&pyramid_triangles(i + 1)), name))
            .collect();
    named.push((
        ConfigKey::of_triangles(&bipyramid_quadruple_triangles()),
        "bipyramid_quadruple",
    ));
    named
});

/// Vertex masks of a triangle set, without canonicalization.
#[derive(Clone, Debug)]
struct Footprint {
    k: usize,
    masks: Vec<u8>,
}

impl Footprint {
    fn from_masks(k: usize, masks: Vec<u8>) -> Self {
        Footprint { k, masks }
    }

    fn of_triangles(triangles: &[[Vertex; 3]]) -> Self {
        let mut verts: Vec<(Vertex, u8)> = Vec::new();
        for (i, t) in triangles.iter().enumerate() {
            for &v in t {
                match verts.iter_mut().find(|(w, _)| *w == v) {
                    Some((_, m)) => *m |= 1 << i,
                    None => verts.push((v, 1 << i)),
                }
            }
        }
        Footprint {
            k: triangles.len(),
            masks: verts.into_iter().map(|(_, m)| m).collect(),
        }
    }

    fn vertices(&self, subset: u8) -> u32 {
        self.masks.iter().filter(|&&m| m & subset != 0).count() as u32
    }

    /// Connected components of the union of the triangles in `subset`.
    fn components(&self, subset: u8) -> u32 {
        let mut parent: [u8; 4] = [0, 1, 2, 3];
        fn find(p: &mut [u8; 4], i: u8) -> u8 {
            let mut i = i;
            while p[i as usize] != i {
                i = p[i as usize];
            }
            i
        }
        for &m in &self.masks {
            let m = m & subset;
            if m == 0 {
                continue;
            }
            let first = m.trailing_zeros() as u8;
            for j in first + 1..4 {
                if m & (1 << j) != 0 {
                    let (a, b) = (find(&mut parent, first), find(&mut parent, j));
                    parent[a as usize] = b;
                }
            }
        }
        (0..self.k as u8)
            .filter(|&i| subset & (1 << i) != 0 && find(&mut parent, i) == i)
            .count() as u32
    }

    /// Exponent `r` with `P(every triangle in subset monochromatic) = x^r`.
    fn rank(&self, subset: u8) -> usize {
        if subset == 0 {
            return 0;
        }
        (self.vertices(subset) - self.components(subset)) as usize
    }

    fn shares_edge(&self, i: usize, j: usize) -> bool {
        self.vertices((1 << i) | (1 << j)) == 4
    }

    /// Splits into the triangle groups of the connected components of the
    /// union graph.
    fn component_groups(&self) -> Vec<u8> {
        let full = (1u8 << self.k) - 1;
        let mut groups: Vec<u8> = Vec::new();
        for i in 0..self.k {
            let bit = 1u8 << i;
            if groups.iter().any(|g| g & bit != 0) {
                continue;
            }
            // grow the component of triangle i
            let mut group = bit;
            loop {
                let grown = self
                    .masks
                    .iter()
                    .filter(|&&m| m & group != 0)
                    .fold(group, |acc, &m| acc | m)
                    & full;
                if grown == group {
                    break;
                }
                group = grown;
            }
            groups.push(group);
        }
        groups
    }

    fn restrict(&self, group: u8) -> (Footprint, Vec<usize>) {
        let idx: Vec<usize> = (0..self.k).filter(|&i| group & (1 << i) != 0).collect();
        let masks = self
            .masks
            .iter()
            .filter(|&&m| m & group != 0)
            .map(|&m| {
                idx.iter().enumerate().fold(0u8, |acc, (new, &old)| {
                    if m & (1 << old) != 0 {
                        acc | 1 << new
                    } else {
                        acc
                    }
                })
            })
            .collect();
        (Footprint::from_masks(idx.len(), masks), idx)
    }
}

/// `x^2` as a polynomial: the probability that a triangle is monochromatic.
fn p_mono() -> RationalPoly {
    RationalPoly::monomial(1, 2)
}

/// `E prod_i (1{t_i mono} - x^2)^{mult_i}` on one footprint, by expanding
/// each factor as `alpha + beta * 1{mono}` and summing over the subsets of
/// triangles whose indicator is kept.
fn centered_product_connected(fp: &Footprint, mult: &[u8]) -> RationalPoly {
    let p = p_mono();
    let neg_p = -&p;
    let q = &RationalPoly::one() - &p;
    let alpha: Vec<RationalPoly> = mult.iter().map(|&m| neg_p.pow(m as u32)).collect();
    let beta: Vec<RationalPoly> = mult
        .iter()
        .map(|&m| &q.pow(m as u32) - &neg_p.pow(m as u32))
        .collect();
    let mut total = RationalPoly::zero();
    for subset in 0..(1u8 << fp.k) {
        let mut term = RationalPoly::monomial(1, fp.rank(subset));
        for i in 0..fp.k {
            let factor = if subset & (1 << i) != 0 {
                &beta[i]
            } else {
                &alpha[i]
            };
            term = &term * factor;
        }
        total = &total + &term;
    }
    total
}

fn centered_product_footprint(fp: &Footprint, mult: &[u8]) -> RationalPoly {
    let mut acc = RationalPoly::one();
    for group in fp.component_groups() {
        let (sub, idx) = fp.restrict(group);
        let sub_mult: Vec<u8> = idx.iter().map(|&i| mult[i]).collect();
        // a lone triangle with multiplicity one is a mean-zero factor
        if sub.k == 1 && sub_mult[0] == 1 {
            return RationalPoly::zero();
        }
        acc = &acc * &centered_product_connected(&sub, &sub_mult);
    }
    acc
}

/// Distinct triangles with positive multiplicities summing to at most 4.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleMultiset {
    triangles: Vec<[Vertex; 3]>,
    multiplicities: Vec<u8>,
}

impl TriangleMultiset {
    pub fn new(entries: &[([Vertex; 3], u8)]) -> Result<Self> {
        let mut triangles = Vec::new();
        let mut multiplicities = Vec::new();
        for &(t, m) in entries {
            let mut sorted = t;
            sorted.sort_unstable();
            if sorted[0] == sorted[1] || sorted[1] == sorted[2] {
                return Err(Error::BadParams(format!("{t:?} is not a triangle")));
            }
            if m == 0 || triangles.contains(&sorted) {
                return Err(Error::BadParams(
                    "triangles must be distinct with positive multiplicity".into(),
                ));
            }
            triangles.push(sorted);
            multiplicities.push(m);
        }
        let total: u32 = multiplicities.iter().map(|&m| m as u32).sum();
        if !(1..=4).contains(&total) {
            return Err(Error::BadParams(format!(
                "multiplicities must sum to 1..=4, got {total}"
            )));
        }
        Ok(TriangleMultiset {
            triangles,
            multiplicities,
        })
    }

    pub fn triangles(&self) -> &[[Vertex; 3]] {
        &self.triangles
    }

    pub fn multiplicities(&self) -> &[u8] {
        &self.multiplicities
    }
}

/// `E prod (1{t mono} - 1/c^2)^mult` as a polynomial in `1/c`.
pub fn centered_product_poly(m: &TriangleMultiset) -> RationalPoly {
    centered_product_footprint(&Footprint::of_triangles(&m.triangles), &m.multiplicities)
}

pub fn centered_product_expectation(m: &TriangleMultiset, c: u32) -> BigRational {
    centered_product_poly(m).eval(c)
}

/// Compositions of 4 into `k` positive parts.
fn compositions(k: usize) -> Vec<Vec<u8>> {
    fn rec(k: usize, left: u8, acc: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if acc.len() == k - 1 {
            if left >= 1 {
                acc.push(left);
                out.push(acc.clone());
                acc.pop();
            }
            return;
        }
        for part in 1..=left {
            acc.push(part);
            rec(k, left - part, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, 4, &mut Vec::new(), &mut out);
    out
}

fn multinomial4(parts: &[u8]) -> i64 {
    const FACT: [i64; 5] = [1, 1, 2, 6, 24];
    24 / parts.iter().map(|&p| FACT[p as usize]).product::<i64>()
}

fn coefficient_of_footprint(fp: &Footprint) -> RationalPoly {
    // E-side: ordered 4-tuples of triangles whose distinct set is the footprint
    let mut e_side = RationalPoly::zero();
    for parts in compositions(fp.k) {
        let term = centered_product_footprint(fp, &parts);
        let weight = BigRational::from_integer(multinomial4(&parts).into());
        e_side = &e_side + &term.scale(&weight);
    }

    // 3 sigma^4 side: sigma^2 = A N(triangle) + B N(2-pyramid); ordered pairs
    // of constituents whose triangles together are exactly the footprint.
    let a = &p_mono() - &RationalPoly::monomial(1, 4);
    let b = RationalPoly::from_ints(&[0, 0, 0, 2, -2]);
    let mut constituents: Vec<(u8, &RationalPoly)> = (0..fp.k).map(|i| (1u8 << i, &a)).collect();
    for i in 0..fp.k {
        for j in i + 1..fp.k {
            if fp.shares_edge(i, j) {
                constituents.push(((1 << i) | (1 << j), &b));
            }
        }
    }
    let full = (1u8 << fp.k) - 1;
    let mut sigma_side = RationalPoly::zero();
    for (m1, w1) in &constituents {
        for (m2, w2) in &constituents {
            if m1 | m2 == full {
                sigma_side = &sigma_side + &(*w1 * *w2);
            }
        }
    }
    let three = BigRational::from_integer(3.into());
    &e_side - &sigma_side.scale(&three)
}

/// Coefficient of a configuration class in `sigma^4 (E Z^4 - 3)`, as a
/// polynomial in `1/c`. `triangles` are the distinct specified triangles.
pub fn class_coefficient(triangles: &[[Vertex; 3]]) -> RationalPoly {
    assert!((1..=4).contains(&triangles.len()));
    coefficient_of_footprint(&Footprint::of_triangles(triangles))
}

pub fn key_coefficient(key: &ConfigKey) -> RationalPoly {
    coefficient_of_footprint(&Footprint::from_masks(key.triangle_count(), key.masks()))
}

/// Coefficient of the `s`-pyramid class.
pub fn pyramid_coefficient(s: usize) -> RationalPoly {
    class_coefficient(&pyramid_triangles(s))
}

/// Coefficient of the bipyramid-chain quadruple class.
pub fn bipyramid_quadruple_coefficient() -> RationalPoly {
    class_coefficient(&bipyramid_quadruple_triangles())
}

/// A configuration class with its coefficient.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigClass {
    pub signature: ConfigKey,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<&'static str>,
    pub vertices: usize,
    pub representative_triangles: Vec<[Vertex; 3]>,
    pub representative_edges: Vec<(Vertex, Vertex)>,
    #[serde(serialize_with = "poly_repr")]
    pub coefficient: RationalPoly,
}

fn poly_repr<S: Serializer>(p: &RationalPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.render())
}

impl ConfigClass {
    pub fn of_key(key: ConfigKey) -> Self {
        ConfigClass {
            signature: key,
            label: key.label(),
            vertices: key.vertex_count(),
            representative_triangles: key.representative(),
            representative_edges: key.union_edges(),
            coefficient: key_coefficient(&key),
        }
    }
}

/// Triangles adjacent (sharing a vertex) to each triangle, ascending.
fn triangle_adjacency(tc: &TriangleCensus) -> Vec<Vec<u32>> {
    let max_v = tc
        .triangles
        .iter()
        .flat_map(|t| t.iter())
        .copied()
        .max()
        .map_or(0, |v| v as usize + 1);
    let mut by_vertex: Vec<Vec<u32>> = vec![Vec::new(); max_v];
    for (i, t) in tc.triangles.iter().enumerate() {
        for &v in t {
            by_vertex[v as usize].push(i as u32);
        }
    }
    tc.triangles
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let mut adj: Vec<u32> = t
                .iter()
                .flat_map(|&v| by_vertex[v as usize].iter().copied())
                .filter(|&j| j as usize != i)
                .collect();
            adj.sort_unstable();
            adj.dedup();
            adj
        })
        .collect()
}

fn touches(a: &[Vertex; 3], b: &[Vertex; 3]) -> bool {
    a.iter().any(|v| b.contains(v))
}

/// Counts the configuration classes of every connected set of 1 to 4
/// distinct triangles (connected through shared vertices).
///
/// Sets are enumerated once each by the exclusive-neighbourhood extension
/// scheme, seeded at the smallest triangle of the set.
pub fn class_census(tc: &TriangleCensus, budget: u64) -> Result<BTreeMap<ConfigKey, u64>> {
    let adj = triangle_adjacency(tc);
    let tris = &tc.triangles;
    let visited = AtomicU64::new(0);
    let exceeded = std::sync::atomic::AtomicBool::new(false);

    struct Walk<'a> {
        tris: &'a [[Vertex; 3]],
        adj: &'a [Vec<u32>],
        counts: HashMap<ConfigKey, u64>,
        local: u64,
    }

    impl Walk<'_> {
        fn record(&mut self, set: &[u32]) {
            let triangles: Vec<[Vertex; 3]> = set.iter().map(|&i| self.tris[i as usize]).collect();
            *self
                .counts
                .entry(ConfigKey::of_triangles(&triangles))
                .or_default() += 1;
            self.local += 1;
        }

        fn extend(&mut self, set: &mut Vec<u32>, ext: &[u32], root: u32) {
            self.record(set);
            if set.len() == 4 {
                return;
            }
            let mut ext = ext.to_vec();
            while let Some(w) = ext.pop() {
                let mut next = ext.clone();
                for &u in &self.adj[w as usize] {
                    if u <= root || set.contains(&u) || u == w || next.contains(&u) {
                        continue;
                    }
                    let tu = &self.tris[u as usize];
                    if set.iter().any(|&s| touches(tu, &self.tris[s as usize])) {
                        continue;
                    }
                    next.push(u);
                }
                set.push(w);
                self.extend(set, &next, root);
                set.pop();
            }
        }
    }

    let merged = (0..tris.len() as u32)
        .into_par_iter()
        .fold(HashMap::<ConfigKey, u64>::new, |mut acc, root| {
            if exceeded.load(Ordering::Relaxed) {
                return acc;
            }
            let mut walk = Walk {
                tris,
                adj: &adj,
                counts: std::mem::take(&mut acc),
                local: 0,
            };
            let ext: Vec<u32> = adj[root as usize]
                .iter()
                .copied()
                .filter(|&u| u > root)
                .collect();
            walk.extend(&mut vec![root], &ext, root);
            let total = visited.fetch_add(walk.local, Ordering::Relaxed) + walk.local;
            if total > budget {
                exceeded.store(true, Ordering::Relaxed);
            }
            walk.counts
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    if exceeded.load(Ordering::Relaxed) {
        return Err(Error::BudgetExceeded { budget });
    }
    Ok(merged.into_iter().collect())
}

/// One class of the decomposition with its count in the graph.
#[derive(Clone, Debug, Serialize)]
pub struct ClassCount {
    #[serde(flatten)]
    pub class: ConfigClass,
    #[serde(serialize_with = "biguint_string")]
    pub count: BigUint,
    /// `coefficient(c) * count`
    pub contribution: Exact,
}

/// Decomposition of `sigma^4 (E Z3^4 - 3)` into configuration classes.
#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub c: u32,
    /// Nonzero-coefficient classes, ordered by signature.
    pub classes: Vec<ClassCount>,
    pub connected_sets: u64,
    pub sigma2: Exact,
    pub sigma4: Exact,
    pub excess4: Exact,
}

/// Exact `E Z3^4 - 3` via the class decomposition.
pub fn fourth_moment_exact(
    tc: &TriangleCensus,
    pc: &PyramidCounts,
    c: u32,
) -> Result<Decomposition> {
    fourth_moment_exact_with_budget(tc, pc, c, DEFAULT_BUDGET)
}

pub fn fourth_moment_exact_with_budget(
    tc: &TriangleCensus,
    pc: &PyramidCounts,
    c: u32,
    budget: u64,
) -> Result<Decomposition> {
    if c < 2 {
        return Err(Error::BadParams(format!("need c >= 2 colors, got {c}")));
    }
    if pc.n1.is_zero() {
        return Err(Error::NoTriangles);
    }
    let census = class_census(tc, budget)?;
    let connected_sets = census.values().sum();
    let (_, sigma2) = t3_mean_var_exact(pc, c);
    let sigma4 = &sigma2 * &sigma2;
    let mut total = BigRational::zero();
    let mut classes = Vec::new();
    for (key, count) in census {
        debug_assert!(key.is_connected());
        let class = ConfigClass::of_key(key);
        if class.coefficient.is_zero() {
            continue;
        }
        let contribution =
            class.coefficient.eval(c) * BigRational::from_integer(BigInt::from(count));
        total += &contribution;
        classes.push(ClassCount {
            class,
            count: BigUint::from(count),
            contribution: contribution.into(),
        });
    }
    Ok(Decomposition {
        c,
        classes,
        connected_sets,
        excess4: (total / &sigma4).into(),
        sigma2: sigma2.into(),
        sigma4: sigma4.into(),
    })
}

/// All classes with a nonzero coefficient among connected sets of up to
/// four triangles in `K_9`, which contains every such union (at most nine
/// vertices).
pub fn discover_classes() -> Vec<ConfigClass> {
    let k9 =
        crate::graph::generate(&crate::graph::FamilySpec::Complete { n: 9 }).expect("K9 is valid");
    let tc = crate::census::triangle_census(&k9);
    class_census(&tc, DEFAULT_BUDGET)
        .expect("K9 fits the default budget")
        .into_keys()
        .map(ConfigClass::of_key)
        .filter(|c| !c.coefficient.is_zero())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::{pyramid_counts, triangle_census};
    use crate::graph::{generate, FamilySpec};
    use crate::report::ratio;

    fn poly24(ints: &[i64]) -> RationalPoly {
        RationalPoly::from_ints(&ints.iter().map(|a| 24 * a).collect::<Vec<_>>())
    }

    fn ms(entries: &[([Vertex; 3], u8)]) -> TriangleMultiset {
        TriangleMultiset::new(entries).unwrap()
    }

    #[test]
    fn key_is_relabeling_invariant() {
        let a = ConfigKey::of_triangles(&[[0, 1, 2], [1, 2, 3], [3, 4, 5]]);
        let b = ConfigKey::of_triangles(&[[7, 8, 9], [1, 8, 9], [1, 5, 6]]);
        let c = ConfigKey::of_triangles(&[[1, 5, 6], [7, 8, 9], [1, 8, 9]]);
        assert_eq!(a, b);
        assert_eq!(a, c);
        let d = ConfigKey::of_triangles(&[[0, 1, 2], [1, 2, 3], [1, 4, 5]]);
        assert_ne!(a, d);
        assert_eq!(a.triangle_count(), 3);
        assert_eq!(a.vertex_count(), 6);
        assert_eq!(ConfigKey::of_triangles(&a.representative()), a);
    }

    #[test]
    fn tetrahedron_classes_depend_on_specified_faces() {
        let three = ConfigKey::of_triangles(&[[0, 1, 2], [0, 1, 3], [0, 2, 3]]);
        let pyr3 = ConfigKey::of_triangles(&pyramid_triangles(3));
        assert_ne!(three, pyr3);
        assert_eq!(three.union_edges().len(), 6);
    }

    #[test]
    fn centered_products() {
        let t = [0, 1, 2];
        // Bernoulli(x^2) variance
        assert_eq!(
            centered_product_poly(&ms(&[(t, 2)])),
            RationalPoly::from_ints(&[0, 0, 1, 0, -1])
        );
        let four: Vec<_> = pyramid_triangles(4).into_iter().map(|t| (t, 1)).collect();
        assert_eq!(
            centered_product_poly(&ms(&four)),
            RationalPoly::from_ints(&[0, 0, 0, 0, 0, 1, -4, 6, -3])
        );
        assert_eq!(
            centered_product_expectation(&ms(&[(t, 4)]), 2),
            ratio(21, 256)
        );
        assert!(centered_product_poly(&ms(&[(t, 3), ([5, 6, 7], 1)])).is_zero());
        assert!(TriangleMultiset::new(&[(t, 3), (t, 1)]).is_err());
        assert!(TriangleMultiset::new(&[(t, 5)]).is_err());
    }

    #[test]
    fn pyramid_rows() {
        assert_eq!(
            pyramid_coefficient(1),
            RationalPoly::from_ints(&[0, 0, 1, 0, -7, 0, 12, 0, -6])
        );
        assert_eq!(
            pyramid_coefficient(2),
            RationalPoly::from_ints(&[0, 0, 0, 14, -14, -72, 60, 96, -84])
        );
        assert_eq!(
            pyramid_coefficient(3),
            RationalPoly::from_ints(&[0, 0, 0, 0, 36, -108, -72, 360, -216])
        );
        assert_eq!(
            pyramid_coefficient(4),
            poly24(&[0, 0, 0, 0, 0, 1, -7, 12, -6])
        );
        assert_eq!(
            bipyramid_quadruple_coefficient(),
            poly24(&[0, 0, 0, 0, 0, 0, 0, 1, -1])
        );
    }

    #[test]
    fn vanishing_classes() {
        assert!(class_coefficient(&[[0, 1, 2], [2, 3, 4]]).is_zero());
        assert!(class_coefficient(&[[0, 1, 2], [0, 1, 3], [4, 5, 6], [4, 5, 7]]).is_zero());
        assert!(class_coefficient(&[[0, 1, 2], [3, 4, 5]]).is_zero());
    }

    #[test]
    fn small_excess_values() {
        let cases = [
            (FamilySpec::Complete { n: 3 }, ratio(-2, 3)),
            (FamilySpec::Complete { n: 4 }, ratio(5, 3)),
            (FamilySpec::Pyramid { n: 2 }, ratio(-1, 4)),
        ];
        for (spec, want) in cases {
            let g = generate(&spec).unwrap();
            let tc = triangle_census(&g);
            let d = fourth_moment_exact(&tc, &pyramid_counts(&tc), 2).unwrap();
            assert_eq!(d.excess4.0, want, "{spec:?}");
        }
    }

    #[test]
    fn budget_and_degenerate_inputs() {
        let g = generate(&FamilySpec::Complete { n: 6 }).unwrap();
        let tc = triangle_census(&g);
        assert!(matches!(
            fourth_moment_exact_with_budget(&tc, &pyramid_counts(&tc), 2, 10),
            Err(Error::BudgetExceeded { budget: 10 })
        ));
        let g = generate(&FamilySpec::Cycle { n: 5 }).unwrap();
        let tc = triangle_census(&g);
        assert!(matches!(
            fourth_moment_exact(&tc, &pyramid_counts(&tc), 2),
            Err(Error::NoTriangles)
        ));
    }

    /// Brute-force census of every 1..4-subset of triangles, connected or not.
    fn all_subsets(tc: &TriangleCensus) -> BTreeMap<ConfigKey, u64> {
        let t = &tc.triangles;
        let mut out = BTreeMap::new();
        let n = t.len();
        let mut add = |idx: &[usize]| {
            let tris: Vec<_> = idx.iter().map(|&i| t[i]).collect();
            *out.entry(ConfigKey::of_triangles(&tris)).or_insert(0) += 1;
        };
        for a in 0..n {
            add(&[a]);
            for b in a + 1..n {
                add(&[a, b]);
                for c in b + 1..n {
                    add(&[a, b, c]);
                    for d in c + 1..n {
                        add(&[a, b, c, d]);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn connected_enumeration_matches_brute_force() {
        let g = generate(&FamilySpec::DisjointUnion {
            parts: vec![
                FamilySpec::Complete { n: 5 },
                FamilySpec::Pyramid { n: 3 },
                FamilySpec::BipyramidChain { n: 2 },
            ],
        })
        .unwrap();
        let tc = triangle_census(&g);
        let brute = all_subsets(&tc);
        let fast = class_census(&tc, DEFAULT_BUDGET).unwrap();
        for (key, count) in &brute {
            if key.is_connected() {
                assert_eq!(fast.get(key), Some(count), "{key}");
            } else {
                assert!(
                    key_coefficient(key).is_zero(),
                    "disconnected {key} has weight"
                );
                assert!(!fast.contains_key(key));
            }
        }
        assert_eq!(
            fast.len(),
            brute.keys().filter(|k| k.is_connected()).count()
        );
    }
}
