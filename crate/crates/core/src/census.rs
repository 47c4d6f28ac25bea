//! Triangle census and the derived subgraph statistics: pyramid counts,
//! 4-cycles, the weighted 4-cycle statistic `b`, the vertex score ordering
//! and the ordering-relative statistic `s`.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::graph::{Graph, Vertex};

/// Triangles of a graph together with the per-edge triangle counts `d(e)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleCensus {
    /// Sorted vertex triples, in lexicographic order.
    pub triangles: Vec<[Vertex; 3]>,
    edges: Vec<(Vertex, Vertex)>,
    /// `d[i]` is the number of triangles on `edges[i]`.
    d: Vec<u32>,
}

impl TriangleCensus {
    /// Number of triangles containing the edge `{u, v}` (0 for non-edges).
    pub fn d(&self, u: Vertex, v: Vertex) -> u32 {
        let key = if u < v { (u, v) } else { (v, u) };
        match self.edges.binary_search(&key) {
            Ok(i) => self.d[i],
            Err(_) => 0,
        }
    }

    /// `(edge, d)` for every edge of the source graph.
    pub fn edge_counts(&self) -> impl Iterator<Item = ((Vertex, Vertex), u32)> + '_ {
        self.edges.iter().copied().zip(self.d.iter().copied())
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }
}

/// Lists every triangle once, using the degree ordering: each edge is
/// oriented towards the endpoint of higher `(degree, id)` and triangles are
/// found by intersecting out-neighbourhoods.
pub fn triangle_census(g: &Graph) -> TriangleCensus {
    let n = g.vertex_count();
    let rank = |v: Vertex| (g.degree(v), v);
    let out: Vec<Vec<Vertex>> = (0..n as Vertex)
        .map(|u| {
            g.neighbors(u)
                .iter()
                .copied()
                .filter(|&v| rank(v) > rank(u))
                .collect()
        })
        .collect();

    let mut triangles: Vec<[Vertex; 3]> = (0..n as Vertex)
        .into_par_iter()
        .flat_map_iter(|u| {
            let ou = &out[u as usize];
            let mut found = Vec::new();
            for &v in ou {
                for &w in &out[v as usize] {
                    // out lists are sorted by id, so a binary search suffices
                    if ou.binary_search(&w).is_ok() {
                        let mut t = [u, v, w];
                        t.sort_unstable();
                        found.push(t);
                    }
                }
            }
            found.into_iter()
        })
        .collect();
    triangles.sort_unstable();

    let edges = g.edges().to_vec();
    let mut d = vec![0u32; edges.len()];
    for t in &triangles {
        for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            let i = edges.binary_search(&(a, b)).expect("triangle edge present");
            d[i] += 1;
        }
    }
    TriangleCensus {
        triangles,
        edges,
        d,
    }
}

/// Numbers of `s`-pyramids (`s` triangles on a common edge), `s = 1..=4`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PyramidCounts {
    #[serde(serialize_with = "crate::report::biguint_string")]
    pub n1: BigUint,
    #[serde(serialize_with = "crate::report::biguint_string")]
    pub n2: BigUint,
    #[serde(serialize_with = "crate::report::biguint_string")]
    pub n3: BigUint,
    #[serde(serialize_with = "crate::report::biguint_string")]
    pub n4: BigUint,
}

impl PyramidCounts {
    pub fn get(&self, s: usize) -> &BigUint {
        match s {
            1 => &self.n1,
            2 => &self.n2,
            3 => &self.n3,
            4 => &self.n4,
            _ => panic!("pyramid order {s} out of range"),
        }
    }
}

fn choose_u128(n: u64, k: u32) -> u128 {
    if (n as u128) < k as u128 {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc
}

pub fn pyramid_counts(tc: &TriangleCensus) -> PyramidCounts {
    let mut sums = [0u128; 5];
    for &d in &tc.d {
        for (s, sum) in sums.iter_mut().enumerate().skip(1) {
            *sum += choose_u128(d as u64, s as u32);
        }
    }
    debug_assert_eq!(sums[1] % 3, 0);
    PyramidCounts {
        n1: BigUint::from(sums[1] / 3),
        n2: BigUint::from(sums[2]),
        n3: BigUint::from(sums[3]),
        n4: BigUint::from(sums[4]),
    }
}

/// Number of 4-cycle subgraphs: `sum over vertex pairs C(codeg, 2) / 2`.
pub fn count_c4(g: &Graph) -> BigUint {
    let n = g.vertex_count();
    let total: u128 = (0..n as Vertex)
        .into_par_iter()
        .map_init(
            || (vec![0u64; n], Vec::new()),
            |(codeg, touched), u| {
                for &v in g.neighbors(u) {
                    for &w in g.neighbors(v) {
                        if w > u {
                            if codeg[w as usize] == 0 {
                                touched.push(w);
                            }
                            codeg[w as usize] += 1;
                        }
                    }
                }
                let mut acc: u128 = 0;
                for w in touched.drain(..) {
                    acc += choose_u128(codeg[w as usize], 2);
                    codeg[w as usize] = 0;
                }
                acc
            },
        )
        .sum();
    debug_assert_eq!(total % 2, 0);
    BigUint::from(total / 2)
}

/// Triangle counts aligned with each vertex's adjacency list.
fn incident_d(g: &Graph, tc: &TriangleCensus) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = g.vertices().map(|v| vec![0; g.degree(v)]).collect();
    for ((u, v), d) in tc.edge_counts() {
        if d == 0 {
            continue;
        }
        let iu = g.neighbors(u).binary_search(&v).expect("edge");
        let iv = g.neighbors(v).binary_search(&u).expect("edge");
        out[u as usize][iu] = d;
        out[v as usize][iv] = d;
    }
    out
}

/// Sum over 4-cycles of the product of the `d` weights on their edges.
/// Only triangle-supported edges carry weight.
///
/// For every vertex pair `{u, w}` the weighted 2-paths `u - v - w` are
/// accumulated; pairs of distinct 2-paths close a 4-cycle, and every 4-cycle
/// is seen once from each of its two diagonals.
pub fn b_statistic(g: &Graph, tc: &TriangleCensus) -> BigUint {
    let n = g.vertex_count();
    let dw = incident_d(g, tc);
    let total: u128 = (0..n as Vertex)
        .into_par_iter()
        .map_init(
            || (vec![(0u128, 0u128); n], Vec::new()),
            |(acc, touched), u| {
                for (i, &v) in g.neighbors(u).iter().enumerate() {
                    let duv = dw[u as usize][i] as u128;
                    if duv == 0 {
                        continue;
                    }
                    for (j, &w) in g.neighbors(v).iter().enumerate() {
                        let dvw = dw[v as usize][j] as u128;
                        if w <= u || dvw == 0 {
                            continue;
                        }
                        let prod = duv * dvw;
                        let slot = &mut acc[w as usize];
                        if *slot == (0, 0) {
                            touched.push(w);
                        }
                        slot.0 += prod;
                        slot.1 += prod * prod;
                    }
                }
                let mut sum: u128 = 0;
                for w in touched.drain(..) {
                    let (s, sq) = std::mem::take(&mut acc[w as usize]);
                    sum += (s * s - sq) / 2;
                }
                sum
            },
        )
        .sum();
    debug_assert_eq!(total % 2, 0);
    BigUint::from(total / 2)
}

/// Vertex score: triangles through `v` plus pairs of triangles sharing an
/// edge incident to `v`.
pub fn vertex_scores(g: &Graph, tc: &TriangleCensus) -> Vec<u128> {
    let mut scores = vec![0u128; g.vertex_count()];
    for t in &tc.triangles {
        for &v in t {
            scores[v as usize] += 1;
        }
    }
    for ((u, v), d) in tc.edge_counts() {
        let pairs = choose_u128(d as u64, 2);
        scores[u as usize] += pairs;
        scores[v as usize] += pairs;
    }
    scores
}

/// Vertices by descending score; ties go to the smaller id.
pub fn score_ordering(g: &Graph, tc: &TriangleCensus) -> Vec<Vertex> {
    let scores = vertex_scores(g, tc);
    let mut order: Vec<Vertex> = g.vertices().collect();
    order.sort_by(|&a, &b| scores[b as usize].cmp(&scores[a as usize]).then(a.cmp(&b)));
    order
}

/// `sum over positions i < j < k of d(o_i, o_k)^2 d(o_j, o_k)^2` where `o` is
/// `order`.
///
/// Panics if `order` is not a permutation of the graph's vertices.
pub fn s_statistic(g: &Graph, tc: &TriangleCensus, order: &[Vertex]) -> BigUint {
    let n = g.vertex_count();
    assert_eq!(order.len(), n, "ordering must cover every vertex");
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        assert!(pos[v as usize] == usize::MAX, "ordering repeats vertex {v}");
        pos[v as usize] = i;
    }
    let dw = incident_d(g, tc);
    let total: u128 = (0..n as Vertex)
        .into_par_iter()
        .map(|top| {
            let mut sum: u128 = 0;
            let mut sq: u128 = 0;
            for (i, &v) in g.neighbors(top).iter().enumerate() {
                if pos[v as usize] < pos[top as usize] {
                    let x = (dw[top as usize][i] as u128).pow(2);
                    sum += x;
                    sq += x * x;
                }
            }
            (sum * sum - sq) / 2
        })
        .sum();
    BigUint::from(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, FamilySpec};

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn fam(spec: FamilySpec) -> Graph {
        generate(&spec).unwrap()
    }

    #[test]
    fn k3_and_k4_census() {
        let k3 = fam(FamilySpec::Complete { n: 3 });
        let tc = triangle_census(&k3);
        assert_eq!(tc.triangles, vec![[0, 1, 2]]);
        assert!(tc.edge_counts().all(|(_, d)| d == 1));

        let k4 = fam(FamilySpec::Complete { n: 4 });
        let tc = triangle_census(&k4);
        assert_eq!(tc.triangle_count(), 4);
        assert!(tc.edge_counts().all(|(_, d)| d == 2));
        let pc = pyramid_counts(&tc);
        assert_eq!(
            pc,
            PyramidCounts {
                n1: big(4),
                n2: big(6),
                n3: big(0),
                n4: big(0)
            }
        );
    }

    #[test]
    fn pyramid_census() {
        let g = fam(FamilySpec::Pyramid { n: 4 });
        let tc = triangle_census(&g);
        assert_eq!(tc.d(0, 1), 4);
        for s in 2..6 {
            assert_eq!(tc.d(0, s), 1);
            assert_eq!(tc.d(s, 1), 1);
        }
        let g = fam(FamilySpec::Pyramid { n: 10 });
        let pc = pyramid_counts(&triangle_census(&g));
        assert_eq!(
            pc,
            PyramidCounts {
                n1: big(10),
                n2: big(45),
                n3: big(120),
                n4: big(210)
            }
        );
    }

    #[test]
    fn triangle_free_counts() {
        let g = fam(FamilySpec::Cycle { n: 4 });
        let tc = triangle_census(&g);
        assert_eq!(
            pyramid_counts(&tc),
            PyramidCounts {
                n1: big(0),
                n2: big(0),
                n3: big(0),
                n4: big(0)
            }
        );
        assert_eq!(b_statistic(&g, &tc), big(0));
    }

    #[test]
    fn four_cycles() {
        assert_eq!(count_c4(&fam(FamilySpec::Cycle { n: 4 })), big(1));
        assert_eq!(count_c4(&fam(FamilySpec::Complete { n: 4 })), big(3));
        assert_eq!(count_c4(&fam(FamilySpec::Complete { n: 5 })), big(15));
        assert_eq!(count_c4(&fam(FamilySpec::Star { n: 7 })), big(0));
    }

    #[test]
    fn b_values() {
        let g = fam(FamilySpec::Pyramid { n: 10 });
        assert_eq!(b_statistic(&g, &triangle_census(&g)), big(45));
        let g = fam(FamilySpec::Complete { n: 4 });
        assert_eq!(b_statistic(&g, &triangle_census(&g)), big(48));
        let g = fam(FamilySpec::BipyramidChain { n: 2 });
        assert_eq!(b_statistic(&g, &triangle_census(&g)), big(1));
    }

    #[test]
    fn scores_and_s() {
        let g = fam(FamilySpec::Pyramid { n: 4 });
        let tc = triangle_census(&g);
        assert_eq!(vertex_scores(&g, &tc), vec![10, 10, 1, 1, 1, 1]);
        let order = score_ordering(&g, &tc);
        assert_eq!(order, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(s_statistic(&g, &tc, &order), big(4));
        let rev: Vec<_> = order.iter().rev().copied().collect();
        assert_eq!(s_statistic(&g, &tc, &rev), big(76));

        let k4 = fam(FamilySpec::Complete { n: 4 });
        let tc = triangle_census(&k4);
        assert_eq!(score_ordering(&k4, &tc), vec![0, 1, 2, 3]);
        assert_eq!(s_statistic(&k4, &tc, &[2, 0, 3, 1]), big(64));

        let p5 = fam(FamilySpec::Path { n: 5 });
        let tc = triangle_census(&p5);
        assert_eq!(score_ordering(&p5, &tc), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    #[should_panic]
    fn s_rejects_non_permutation() {
        let g = fam(FamilySpec::Complete { n: 3 });
        let tc = triangle_census(&g);
        s_statistic(&g, &tc, &[0, 0, 1]);
    }
}
