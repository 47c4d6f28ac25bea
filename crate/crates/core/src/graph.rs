//! Simple undirected graphs, edge-list ingestion and the graph families used
//! throughout the crate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourthmoment;

/// Vertex id. Ids are contiguous `0..n`.
pub type Vertex = u32;

/// A simple undirected graph with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<Vertex>>,
    edges: Vec<(Vertex, Vertex)>,
    /// Original ids when the graph was read from a file with non-contiguous ids.
    id_map: Option<Vec<u64>>,
}

impl Graph {
    /// Builds a graph on `n` vertices. Duplicate edges are collapsed; the
    /// number of dropped duplicates is returned alongside the graph.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<(Self, usize)>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut set = BTreeSet::new();
        let mut duplicates = 0;
        for (u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop(u as u64));
            }
            if u as usize >= n || v as usize >= n {
                return Err(Error::BadParams(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            let e = if u < v { (u, v) } else { (v, u) };
            if !set.insert(e) {
                duplicates += 1;
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &set {
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let graph = Graph {
            adjacency,
            edges: set.into_iter().collect(),
            id_map: None,
        };
        Ok((graph, duplicates))
    }

    /// Panicking constructor for edge lists known to be simple.
    pub(crate) fn simple(n: usize, edges: Vec<(Vertex, Vertex)>) -> Self {
        let (g, dups) = Self::from_edges(n, edges).expect("generator produced an invalid edge");
        debug_assert_eq!(dups, 0);
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v as usize]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adjacency[u as usize].binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.adjacency.len() as Vertex
    }

    /// Original file ids, if the graph was compacted on ingestion.
    pub fn id_map(&self) -> Option<&[u64]> {
        self.id_map.as_deref()
    }

    /// Applies a vertex permutation: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[Vertex]) -> Graph {
        assert_eq!(perm.len(), self.vertex_count());
        let edges = self
            .edges
            .iter()
            .map(|&(u, v)| (perm[u as usize], perm[v as usize]))
            .collect::<Vec<_>>();
        Graph::simple(self.vertex_count(), edges)
    }

    /// Disjoint union; vertices of `other` are shifted by `self.vertex_count()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.vertex_count() as Vertex;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)))
            .collect();
        Graph::simple(self.vertex_count() + other.vertex_count(), edges)
    }

    /// Edge-list serialization with a header comment.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!(
            "# vertices={} edges={}\n",
            self.vertex_count(),
            self.edge_count()
        );
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

/// Result of parsing an edge list.
#[derive(Clone, Debug)]
pub struct ParsedGraph {
    pub graph: Graph,
    pub duplicate_count: usize,
}

/// Parses whitespace-separated `u v` lines. `#` starts a comment. Ids may be
/// arbitrary nonnegative integers; they are compacted to `0..n` in ascending
/// order and the original ids are kept in the graph's id map. A
/// `# vertices=N` header with every id below `N` keeps ids unchanged and adds
/// the unused ones as isolated vertices.
pub fn parse_edge_list(text: &str) -> Result<ParsedGraph> {
    let mut raw = Vec::new();
    let mut declared: Option<u64> = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let (body, comment) = match line.find('#') {
            Some(pos) => (&line[..pos], Some(&line[pos + 1..])),
            None => (line, None),
        };
        if let Some(comment) = comment {
            for tok in comment.split_whitespace() {
                if let Some(n) = tok.strip_prefix("vertices=") {
                    declared = n.parse().ok();
                }
            }
        }
        let mut toks = body.split_whitespace();
        let Some(first) = toks.next() else { continue };
        let second = toks.next().ok_or(Error::Malformed(line_no))?;
        if toks.next().is_some() {
            return Err(Error::Malformed(line_no));
        }
        let u: u64 = first.parse().map_err(|_| Error::Malformed(line_no))?;
        let v: u64 = second.parse().map_err(|_| Error::Malformed(line_no))?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        raw.push((u, v));
    }

    let mut ids: BTreeSet<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    // A declared vertex count keeps ids as they are when they all fit below it.
    if let Some(n) = declared {
        if ids.iter().all(|&id| id < n) {
            ids.extend(0..n);
        }
    }
    let index: BTreeMap<u64, Vertex> = ids
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, i as Vertex))
        .collect();
    let edges = raw.iter().map(|(u, v)| (index[u], index[v]));
    let (mut graph, duplicate_count) = Graph::from_edges(ids.len(), edges)?;
    let identity = ids.iter().enumerate().all(|(i, &id)| i as u64 == id);
    if !identity {
        graph.id_map = Some(ids.into_iter().collect());
    }
    Ok(ParsedGraph {
        graph,
        duplicate_count,
    })
}

/// A graph family with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Complete {
        n: usize,
    },
    /// The star `K_{1,n}`: centre 0, leaves `1..=n`.
    Star {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    Path {
        n: usize,
    },
    Pyramid {
        n: usize,
    },
    BipyramidChain {
        n: usize,
    },
    /// Pyramid `n` disjoint-union a bipyramid chain sized so that the excess
    /// fourth moment cancels to leading order at `c` colors.
    Composite {
        n: usize,
        c: u32,
    },
    Gnp {
        n: usize,
        p: f64,
        seed: u64,
    },
    DisjointUnion {
        parts: Vec<FamilySpec>,
    },
}

impl FamilySpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::BadParams(msg.to_string()));
        match self {
            FamilySpec::Cycle { n } if *n < 3 => bad("cycle needs n >= 3"),
            FamilySpec::Pyramid { n } if *n < 1 => bad("pyramid needs n >= 1"),
            FamilySpec::BipyramidChain { n } if *n < 1 => bad("bipyramid_chain needs n >= 1"),
            FamilySpec::Composite { n, c } => {
                if *n < 1 || *c < 2 {
                    bad("composite needs n >= 1 and c >= 2")
                } else if *c >= 5 {
                    Err(Error::CompositeUndefined(*c))
                } else {
                    Ok(())
                }
            }
            FamilySpec::Gnp { p, .. } if !(0.0..=1.0).contains(p) => bad("gnp needs 0 <= p <= 1"),
            FamilySpec::DisjointUnion { parts } => parts.iter().try_for_each(|p| p.validate()),
            _ => Ok(()),
        }
    }
}

/// Size of the bipyramid chain used by `composite(n, c)`:
/// `ceil(sqrt(2|δ4(c)| / h16(c) * C(n, 4)))`, computed exactly.
pub fn composite_chain_size(n: usize, c: u32) -> Result<usize> {
    if c < 2 {
        return Err(Error::BadParams("composite needs c >= 2".into()));
    }
    let delta4 = fourthmoment::pyramid_coefficient(4).eval(c);
    let h16 = fourthmoment::bipyramid_quadruple_coefficient().eval(c);
    if !delta4.is_negative() {
        return Err(Error::CompositeUndefined(c));
    }
    let ratio = delta4.abs() * num_rational::BigRational::from_integer(2.into()) / h16;
    let target = ratio * num_rational::BigRational::from_integer(binomial(n as u64, 4).into());
    // smallest m with m^2 >= target
    let num = target.numer().to_biguint().expect("nonnegative");
    let den = target.denom().to_biguint().expect("positive");
    let mut m = (&num / &den).sqrt();
    while &m * &m * &den < num {
        m += 1u32;
    }
    while !m.is_zero() && (&m - 1u32) * (&m - 1u32) * &den >= num {
        m -= 1u32;
    }
    Ok(m.to_usize().expect("chain size fits usize"))
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Builds the graph described by `spec`.
///
/// Numbering: `pyramid(n)` uses 0 and 1 for the shared edge and `2..n+2`
/// for the apexes. `bipyramid_chain(n)` uses 0 (`a`), 1 (`b`), `2..n+2` for
/// the middle vertices `s`, then the `u_{a,s}` block followed by the
/// `u_{b,s}` block.
pub fn generate(spec: &FamilySpec) -> Result<Graph> {
    spec.validate()?;
    let g = match *spec {
        FamilySpec::Complete { n } => {
            let mut edges = Vec::new();
            for u in 0..n as Vertex {
                for v in u + 1..n as Vertex {
                    edges.push((u, v));
                }
            }
            Graph::simple(n, edges)
        }
        FamilySpec::Star { n } => Graph::simple(n + 1, (1..=n as Vertex).map(|v| (0, v)).collect()),
        FamilySpec::Cycle { n } => {
            let n32 = n as Vertex;
            Graph::simple(n, (0..n32).map(|v| (v, (v + 1) % n32)).collect())
        }
        FamilySpec::Path { n } => Graph::simple(n, (1..n as Vertex).map(|v| (v - 1, v)).collect()),
        FamilySpec::Pyramid { n } => {
            let mut edges = vec![(0, 1)];
            for s in 0..n as Vertex {
                edges.push((0, 2 + s));
                edges.push((1, 2 + s));
            }
            Graph::simple(n + 2, edges)
        }
        FamilySpec::BipyramidChain { n } => {
            let n32 = n as Vertex;
            let (a, b) = (0, 1);
            let mid = |s: Vertex| 2 + s;
            let ua = |s: Vertex| 2 + n32 + s;
            let ub = |s: Vertex| 2 + 2 * n32 + s;
            let mut edges = Vec::with_capacity(6 * n);
            for s in 0..n32 {
                edges.extend([(a, mid(s)), (a, ua(s)), (mid(s), ua(s))]);
                edges.extend([(b, mid(s)), (b, ub(s)), (mid(s), ub(s))]);
            }
            Graph::simple(3 * n + 2, edges)
        }
        FamilySpec::Composite { n, c } => {
            let chain = composite_chain_size(n, c)?;
            let pyramid = generate(&FamilySpec::Pyramid { n })?;
            pyramid.disjoint_union(&generate(&FamilySpec::BipyramidChain { n: chain })?)
        }
        FamilySpec::Gnp { n, p, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for u in 0..n as Vertex {
                for v in u + 1..n as Vertex {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            Graph::simple(n, edges)
        }
        FamilySpec::DisjointUnion { ref parts } => {
            let mut acc = Graph::simple(0, Vec::new());
            for part in parts {
                acc = acc.disjoint_union(&generate(part)?);
            }
            acc
        }
    };
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_triangle() {
        let p = parse_edge_list("0 1\n1 2\n0 2").unwrap();
        assert_eq!(p.graph.vertex_count(), 3);
        assert_eq!(p.graph.edge_count(), 3);
        assert_eq!(p.duplicate_count, 0);
    }

    #[test]
    fn collapses_duplicates() {
        let p = parse_edge_list("0 1\n0 1\n1 2").unwrap();
        assert_eq!(p.graph.edge_count(), 2);
        assert_eq!(p.duplicate_count, 1);
        let p = parse_edge_list("0 1\n1 0").unwrap();
        assert_eq!(p.duplicate_count, 1);
    }

    #[test]
    fn rejects_self_loop_and_garbage() {
        assert!(matches!(parse_edge_list("3 3"), Err(Error::SelfLoop(3))));
        assert!(matches!(
            parse_edge_list("0 1\n# c\n1 x"),
            Err(Error::Malformed(3))
        ));
        assert!(matches!(parse_edge_list("0 1 2"), Err(Error::Malformed(1))));
        assert!(matches!(parse_edge_list("5"), Err(Error::Malformed(1))));
        assert!(matches!(parse_edge_list("-1 2"), Err(Error::Malformed(1))));
    }

    #[test]
    fn compacts_sparse_ids() {
        let p = parse_edge_list("10 20 # trailing\n20 30\n").unwrap();
        assert_eq!(p.graph.vertex_count(), 3);
        assert_eq!(p.graph.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(p.graph.id_map(), Some(&[10, 20, 30][..]));
    }

    #[test]
    fn header_keeps_isolated_vertices() {
        let g = generate(&FamilySpec::Path { n: 3 }).unwrap();
        let lonely = g.disjoint_union(&Graph::simple(2, vec![]));
        let back = parse_edge_list(&lonely.to_edge_list()).unwrap().graph;
        assert_eq!(back, lonely);
    }

    #[test]
    fn family_sizes() {
        let g = generate(&FamilySpec::Pyramid { n: 10 }).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (12, 21));
        let g = generate(&FamilySpec::BipyramidChain { n: 3 }).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (11, 18));
        let g = generate(&FamilySpec::Star { n: 3 }).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 3));
        let g = generate(&FamilySpec::Cycle { n: 4 }).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 4));
    }

    #[test]
    fn composite_uses_ceiling() {
        assert_eq!(composite_chain_size(8, 2).unwrap(), 17);
        let g = generate(&FamilySpec::Composite { n: 8, c: 2 }).unwrap();
        assert_eq!(g.vertex_count(), 10 + 3 * 17 + 2);
        assert_eq!(g.edge_count(), 17 + 6 * 17);
    }

    #[test]
    fn bad_params() {
        assert!(matches!(
            generate(&FamilySpec::Gnp {
                n: 5,
                p: 1.5,
                seed: 0
            }),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            generate(&FamilySpec::Pyramid { n: 0 }),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            generate(&FamilySpec::Composite { n: 8, c: 5 }),
            Err(Error::CompositeUndefined(5))
        ));
    }

    #[test]
    fn gnp_is_seeded() {
        let a = generate(&FamilySpec::Gnp {
            n: 50,
            p: 0.5,
            seed: 1,
        })
        .unwrap();
        let b = generate(&FamilySpec::Gnp {
            n: 50,
            p: 0.5,
            seed: 1,
        })
        .unwrap();
        let c = generate(&FamilySpec::Gnp {
            n: 50,
            p: 0.5,
            seed: 2,
        })
        .unwrap();
        assert_eq!(a, b);
        let ea: BTreeSet<_> = a.edges().iter().collect();
        let ec: BTreeSet<_> = c.edges().iter().collect();
        assert!(ea.symmetric_difference(&ec).count() > 0);
    }
}
