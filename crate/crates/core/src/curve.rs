//! Tropical curves: data model, balancing, Betti numbers, regularity,
//! splitting, and combinatorial types.
//!
//! A curve is a connected graph with exact vertex positions. Edges with
//! `head == None` are unbounded leaves. A 1-valent vertex is an end: the
//! point where a leaf was clipped at the boundary of a domain.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Issue, Result, ValidationReport};
use crate::lattice::{
    gcd_primitive, primitive_direction, smith_normal_form, IntMatrix, IntVector, RationalVector,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub pos: RationalVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub tail: usize,
    pub head: Option<usize>,
    /// Primitive direction, tail to head (outward for unbounded leaves).
    pub dir: IntVector,
    pub weight: BigInt,
    pub leaf_label: Option<usize>,
}

impl Edge {
    pub fn is_bounded(&self) -> bool {
        self.head.is_some()
    }

    pub fn weighted(&self) -> IntVector {
        self.dir.scale(&self.weight)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalCurve {
    dim: usize,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl Serialize for TropicalCurve {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use crate::lattice::IntJson;
        use serde_json::json;
        let vertices: Vec<_> = self.vertices.iter().map(|v| json!({"id": v.id, "pos": v.pos})).collect();
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                json!({
                    "tail": self.vertices[e.tail].id,
                    "head": e.head.map(|h| self.vertices[h].id.clone()),
                    "dir": e.dir,
                    "weight": IntJson(&e.weight),
                    "leaf_label": e.leaf_label,
                })
            })
            .collect();
        json!({"dim": self.dim, "vertices": vertices, "edges": edges}).serialize(s)
    }
}

impl TropicalCurve {
    /// Checks referential integrity only; geometric axioms are left to [`validate_curve`].
    pub fn new(dim: usize, vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidInput(format!("curve dimension {dim} < 2")));
        }
        let mut seen = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if v.pos.dim() != dim {
                return Err(Error::InvalidInput(format!("vertex {} has dimension {}", v.id, v.pos.dim())));
            }
            if seen.insert(v.id.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate vertex id {}", v.id)));
            }
        }
        for (i, e) in edges.iter().enumerate() {
            if e.dir.dim() != dim {
                return Err(Error::InvalidInput(format!("edge {i} has dimension {}", e.dir.dim())));
            }
            if e.tail >= vertices.len() || e.head.is_some_and(|h| h >= vertices.len()) {
                return Err(Error::InvalidInput(format!("edge {i} references a missing vertex")));
            }
            if e.head == Some(e.tail) {
                return Err(Error::InvalidInput(format!("edge {i} is a loop")));
            }
        }
        Ok(TropicalCurve { dim, vertices, edges })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    /// Incident edge indices of vertex `v`.
    pub fn incident(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.tail == v || e.head == Some(v))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.incident(v).len()
    }

    pub fn is_end(&self, v: usize) -> bool {
        self.valence(v) == 1
    }

    /// Primitive direction of edge `e` pointing away from its endpoint `v`.
    pub fn outward_dir(&self, e: usize, v: usize) -> IntVector {
        let edge = &self.edges[e];
        if edge.tail == v {
            edge.dir.clone()
        } else {
            edge.dir.neg()
        }
    }

    pub fn other_end(&self, e: usize, v: usize) -> Option<usize> {
        let edge = &self.edges[e];
        if edge.tail == v {
            edge.head
        } else {
            Some(edge.tail)
        }
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in self.incident(v) {
                if let Some(w) = self.other_end(e, v) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn bounded_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.is_bounded()).count()
    }

    /// First Betti number of the (connected) underlying graph.
    pub fn b1(&self) -> usize {
        (self.bounded_edge_count() + 1).saturating_sub(self.vertices.len())
    }

    /// Vertices of valence at least 3.
    pub fn nodes(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.valence(v) >= 3).collect()
    }

    /// Points of the edge `e` as a closed segment or a ray: `(start, dir, bounded_length)`.
    /// The segment is `start + t * dir` for `0 <= t <= length` (any `t >= 0` for rays).
    pub fn edge_param(&self, e: usize) -> (RationalVector, IntVector, Option<BigRational>) {
        let edge = &self.edges[e];
        let start = self.vertices[edge.tail].pos.clone();
        let len = edge.head.map(|h| {
            self.vertices[h]
                .pos
                .sub(&start)
                .as_multiple_of(&edge.dir)
                .unwrap_or_else(BigRational::zero)
        });
        (start, edge.dir.clone(), len)
    }
}

/// Checks balancing, primitivity, position consistency and connectivity.
pub fn validate_curve(c: &TropicalCurve) -> ValidationReport {
    let mut issues = Vec::new();
    for (i, e) in c.edges.iter().enumerate() {
        let loc = format!("edge {i}");
        if e.dir.is_zero() {
            issues.push(Issue::new("ZERO_DIRECTION", &loc, "direction is the zero vector"));
        } else if !e.dir.is_primitive() {
            issues.push(Issue::new("NON_PRIMITIVE", &loc, format!("direction {} is not primitive", e.dir)));
        }
        if !e.weight.is_positive() {
            issues.push(Issue::new("NON_POSITIVE_WEIGHT", &loc, format!("weight {}", e.weight)));
        }
        if let Some(h) = e.head {
            let diff = c.vertices[h].pos.sub(&c.vertices[e.tail].pos);
            match diff.as_multiple_of(&e.dir) {
                Some(t) if t.is_positive() => {}
                _ => issues.push(Issue::new(
                    "INCONSISTENT_POSITION",
                    &loc,
                    format!(
                        "{} - {} is not a positive multiple of {}",
                        c.vertices[h].pos, c.vertices[e.tail].pos, e.dir
                    ),
                )),
            }
        }
    }
    for (v, vert) in c.vertices.iter().enumerate() {
        let inc = c.incident(v);
        let loc = format!("vertex {}", vert.id);
        match inc.len() {
            0 if c.vertices.len() > 1 => {}
            0 => issues.push(Issue::new("ISOLATED_VERTEX", &loc, "vertex has no edges")),
            1 => {}
            2 => issues.push(Issue::new("TWO_VALENT", &loc, "2-valent vertices are not allowed")),
            _ => {
                let mut sum = IntVector::zero(c.dim);
                for e in inc {
                    sum = sum.add(&c.outward_dir(e, v).scale(&c.edges[e].weight));
                }
                if !sum.is_zero() {
                    issues.push(Issue::new("BALANCING", &loc, format!("weighted outward sum is {sum}")));
                }
            }
        }
    }
    if !c.is_connected() {
        issues.push(Issue::new("DISCONNECTED", "curve", "the curve is not connected"));
    }
    ValidationReport::from_issues(issues)
}

/// Multiset of weighted leaf vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ToricDegree {
    pub vectors: Vec<IntVector>,
}

impl ToricDegree {
    pub fn sum(&self) -> Option<IntVector> {
        let first = self.vectors.first()?;
        Some(self.vectors.iter().skip(1).fold(first.clone(), |acc, v| acc.add(v)))
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BettiReport {
    pub b1: usize,
    /// Leaves escaping to infinity.
    pub kappa: usize,
    /// Ends where a leaf meets the boundary of a domain.
    pub boundary_points: usize,
    /// Leaves of the extended curve, `kappa + boundary_points`.
    pub leaves: usize,
    pub degree: ToricDegree,
}

/// Weighted outward vectors of all leaves: unbounded edges and edges into ends.
pub fn leaf_vectors(c: &TropicalCurve) -> Vec<IntVector> {
    let mut out = Vec::new();
    for (i, e) in c.edges.iter().enumerate() {
        match e.head {
            None => out.push(e.weighted()),
            Some(h) => {
                let tail_end = c.is_end(e.tail);
                let head_end = c.is_end(h);
                if tail_end && head_end {
                    out.push(c.outward_dir(i, h).scale(&e.weight));
                    out.push(e.weighted());
                } else if head_end {
                    out.push(e.weighted());
                } else if tail_end {
                    out.push(e.weighted().neg());
                }
            }
        }
    }
    out
}

pub fn betti_and_degree(c: &TropicalCurve) -> BettiReport {
    let kappa = c.edges.iter().filter(|e| e.head.is_none()).count();
    let boundary_points = (0..c.vertices.len()).filter(|&v| c.is_end(v)).count();
    let vectors = leaf_vectors(c);
    BettiReport {
        b1: c.b1(),
        kappa,
        boundary_points,
        leaves: vectors.len(),
        degree: ToricDegree { vectors },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RegularityReport {
    pub rank: usize,
    pub def_dim: i64,
    pub expected_dim: i64,
    pub regular: bool,
}

/// Rank of the cycle constraints on bounded-edge lengths.
///
/// Edges into ends count as leaves, as in the extended curve.
pub fn regularity_check(c: &TropicalCurve) -> Result<RegularityReport> {
    for v in 0..c.vertices.len() {
        let val = c.valence(v);
        if val != 1 && val != 3 {
            return Err(Error::NotTrivalent { vertex: c.vertices[v].id.clone(), valence: val });
        }
    }
    let n = c.dim;
    let internal: Vec<usize> = (0..c.edges.len())
        .filter(|&i| {
            let e = &c.edges[i];
            e.head.is_some_and(|h| !c.is_end(h) && !c.is_end(e.tail))
        })
        .collect();
    let leaves = leaf_vectors(c).len();
    let b = internal.len();
    let b1 = c.b1();

    // Spanning forest on internal edges; every other internal edge closes a cycle.
    let col: HashMap<usize, usize> = internal.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    let mut parent: HashMap<usize, Option<(usize, usize)>> = HashMap::new();
    let mut tree_edges = vec![false; c.edges.len()];
    for &root in &c.nodes() {
        if parent.contains_key(&root) {
            continue;
        }
        parent.insert(root, None);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for e in c.incident(v) {
                if !col.contains_key(&e) {
                    continue;
                }
                let w = c.other_end(e, v).expect("internal edges are bounded");
                if let std::collections::hash_map::Entry::Vacant(slot) = parent.entry(w) {
                    slot.insert(Some((v, e)));
                    tree_edges[e] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let path_to_root = |mut v: usize| -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        while let Some(Some((p, e))) = parent.get(&v) {
            out.push((*p, e.to_owned()));
            v = *p;
        }
        out
    };

    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for &e in &internal {
        if tree_edges[e] {
            continue;
        }
        // cycle: tail -> head along e, then head -> root, root -> tail
        let edge = &c.edges[e];
        let head = edge.head.expect("bounded");
        let mut signed = vec![(col[&e], 1i64)];
        for (p, pe) in path_to_root(head) {
            // step child -> parent; sign +1 if it follows the edge direction
            let sgn = if c.edges[pe].tail == p { -1 } else { 1 };
            signed.push((col[&pe], sgn));
        }
        for (p, pe) in path_to_root(edge.tail) {
            let sgn = if c.edges[pe].tail == p { 1 } else { -1 };
            signed.push((col[&pe], sgn));
        }
        for k in 0..n {
            let mut row = vec![BigInt::zero(); b];
            for &(j, s) in &signed {
                row[j] += BigInt::from(s) * &c.edges[internal[j]].dir.coords()[k];
            }
            rows.push(row);
        }
    }
    let rank = if rows.is_empty() || b == 0 {
        0
    } else {
        let m = IntMatrix::new(rows.len(), b, rows.into_iter().flatten().collect())?;
        smith_normal_form(&m).rank()
    };
    let def_dim = (n + b) as i64 - rank as i64;
    let expected_dim = leaves as i64 + (n as i64 - 3) * (1 - b1 as i64);
    Ok(RegularityReport { rank, def_dim, expected_dim, regular: rank == n * b1 })
}

/// Splits a tree at an interior point of a bounded edge.
///
/// The edge becomes an unbounded leaf of each part: `r1` at the tail side
/// (pointing toward the head), `r2` at the head side (pointing back).
pub fn split_at_edge(
    c: &TropicalCurve,
    e: usize,
    p: &RationalVector,
) -> Result<(TropicalCurve, TropicalCurve)> {
    if c.b1() != 0 {
        return Err(Error::TreeOnly { b1: c.b1() });
    }
    let edge = c.edges.get(e).ok_or_else(|| Error::InvalidInput(format!("no edge {e}")))?;
    let head = edge
        .head
        .ok_or_else(|| Error::InvalidInput(format!("edge {e} is unbounded")))?;
    let (start, dir, len) = c.edge_param(e);
    let len = len.expect("bounded");
    match p.sub(&start).as_multiple_of(&dir) {
        Some(t) if t.is_positive() && t < len => {}
        _ => {
            return Err(Error::InvalidInput(format!(
                "point {p} is not interior to edge {e}"
            )))
        }
    }

    let side = |root: usize| -> Vec<bool> {
        let mut seen = vec![false; c.vertices.len()];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for f in c.incident(v) {
                if f == e {
                    continue;
                }
                if let Some(w) = c.other_end(f, v) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        seen
    };

    let build = |keep: Vec<bool>, anchor: usize, leaf_dir: IntVector| -> Result<TropicalCurve> {
        let mut map = HashMap::new();
        let mut vertices = Vec::new();
        for (i, v) in c.vertices.iter().enumerate() {
            if keep[i] {
                map.insert(i, vertices.len());
                vertices.push(v.clone());
            }
        }
        let mut edges: Vec<Edge> = c
            .edges
            .iter()
            .enumerate()
            .filter(|(i, f)| *i != e && keep[f.tail])
            .map(|(_, f)| Edge {
                tail: map[&f.tail],
                head: f.head.map(|h| map[&h]),
                ..f.clone()
            })
            .collect();
        edges.push(Edge {
            tail: map[&anchor],
            head: None,
            dir: leaf_dir,
            weight: edge.weight.clone(),
            leaf_label: None,
        });
        TropicalCurve::new(c.dim, vertices, edges)
    };

    let h1 = build(side(edge.tail), edge.tail, edge.dir.clone())?;
    let h2 = build(side(head), head, edge.dir.neg())?;
    Ok((h1, h2))
}

/// Endpoint of an edge in an abstract tree topology.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Port {
    Node(usize),
    Leaf(usize),
}

/// A labeled tree whose internal vertices are 3-valent, leaves labeled `0..kappa`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeTopology {
    pub nodes: usize,
    pub edges: Vec<(Port, Port)>,
}

impl TreeTopology {
    pub fn kappa(&self) -> usize {
        self.edges
            .iter()
            .flat_map(|(a, b)| [a, b])
            .filter(|p| matches!(p, Port::Leaf(_)))
            .count()
    }

    pub fn tripod() -> Self {
        TreeTopology {
            nodes: 1,
            edges: vec![
                (Port::Node(0), Port::Leaf(0)),
                (Port::Node(0), Port::Leaf(1)),
                (Port::Node(0), Port::Leaf(2)),
            ],
        }
    }

    /// Subdivides edge `i` with a new node carrying a new leaf.
    pub fn insert_leaf(&self, i: usize) -> Self {
        let mut edges = self.edges.clone();
        let (a, b) = edges.remove(i);
        let node = Port::Node(self.nodes);
        let leaf = Port::Leaf(self.kappa());
        edges.extend([(a, node), (node, b), (node, leaf)]);
        TreeTopology { nodes: self.nodes + 1, edges }
    }
}

fn double_factorial_odd(k: usize) -> usize {
    (1..=k).step_by(2).product()
}

/// All `(2 kappa - 5)!!` labeled trivalent trees, by inserting leaves in index order.
pub fn enumerate_topologies(kappa: usize) -> Vec<TreeTopology> {
    assert!(kappa >= 3, "trivalent trees need at least 3 leaves");
    let mut level = vec![TreeTopology::tripod()];
    for _ in 3..kappa {
        level = level
            .iter()
            .flat_map(|t| (0..t.edges.len()).map(move |i| t.insert_leaf(i)))
            .collect();
    }
    debug_assert_eq!(level.len(), double_factorial_odd(2 * kappa - 5));
    level
}

pub fn topology_count(kappa: usize) -> usize {
    if kappa < 3 {
        return 0;
    }
    double_factorial_odd(2 * kappa - 5)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonEdge {
    pub a: usize,
    pub b: usize,
    /// Weighted vector from `a` toward `b`.
    pub vector: IntVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonLeaf {
    /// Node the leaf hangs from; `None` only for the two leaves of a bare segment.
    pub node: Option<usize>,
    /// Weighted outward vector.
    pub vector: IntVector,
    pub label: Option<usize>,
    /// Boundary point where the leaf was clipped, if any.
    pub end: Option<RationalVector>,
    /// A point of the leaf ray from which `vector` points outward.
    pub anchor: Option<RationalVector>,
}

impl SkeletonLeaf {
    pub fn weight(&self) -> BigInt {
        self.vector.content()
    }
}

/// Incidence of a node: a leaf or a bounded edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Leaf(usize),
    Edge(usize),
}

/// A tree curve reduced to its combinatorics and weighted edge vectors.
///
/// Edges into ends become leaves, as in the extended curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    pub node_ids: Vec<String>,
    pub node_pos: Vec<Option<RationalVector>>,
    pub edges: Vec<SkeletonEdge>,
    pub leaves: Vec<SkeletonLeaf>,
    incidence: Vec<Vec<Slot>>,
    dim: usize,
}

impl Skeleton {
    pub fn from_parts(
        dim: usize,
        node_ids: Vec<String>,
        node_pos: Vec<Option<RationalVector>>,
        edges: Vec<SkeletonEdge>,
        leaves: Vec<SkeletonLeaf>,
    ) -> Self {
        let mut incidence = vec![Vec::new(); node_ids.len()];
        for (i, e) in edges.iter().enumerate() {
            incidence[e.a].push(Slot::Edge(i));
            incidence[e.b].push(Slot::Edge(i));
        }
        for (j, l) in leaves.iter().enumerate() {
            if let Some(v) = l.node {
                incidence[v].push(Slot::Leaf(j));
            }
        }
        Skeleton { node_ids, node_pos, edges, leaves, incidence, dim }
    }

    /// Skeleton of a tree curve whose non-end vertices are 3-valent.
    ///
    /// Leaves are ordered by `leaf_label` when every leaf carries one,
    /// otherwise by edge order (tail end first for a bare segment).
    pub fn from_curve(c: &TropicalCurve) -> Result<Self> {
        if !c.is_connected() {
            return Err(Error::InvalidInput("curve is not connected".into()));
        }
        if c.b1() != 0 {
            return Err(Error::TreeOnly { b1: c.b1() });
        }
        let nodes = c.nodes();
        for v in 0..c.vertices.len() {
            let val = c.valence(v);
            if val != 1 && val != 3 {
                return Err(Error::NotTrivalent { vertex: c.vertices[v].id.clone(), valence: val });
            }
        }
        let index: HashMap<usize, usize> = nodes.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let mut edges = Vec::new();
        let mut leaves: Vec<(Option<usize>, SkeletonLeaf)> = Vec::new();
        for (i, e) in c.edges.iter().enumerate() {
            match e.head {
                None => {
                    let node = index.get(&e.tail).copied();
                    if node.is_none() {
                        return Err(Error::InvalidInput(format!("edge {i} is a ray from an end")));
                    }
                    leaves.push((
                        e.leaf_label,
                        SkeletonLeaf {
                            node,
                            vector: e.weighted(),
                            label: e.leaf_label,
                            end: None,
                            anchor: Some(c.vertices[e.tail].pos.clone()),
                        },
                    ));
                }
                Some(h) => match (index.get(&e.tail), index.get(&h)) {
                    (Some(&a), Some(&b)) => edges.push(SkeletonEdge { a, b, vector: e.weighted() }),
                    (Some(&a), None) => leaves.push((
                        e.leaf_label,
                        SkeletonLeaf {
                            node: Some(a),
                            vector: e.weighted(),
                            label: e.leaf_label,
                            end: Some(c.vertices[h].pos.clone()),
                            anchor: Some(c.vertices[e.tail].pos.clone()),
                        },
                    )),
                    (None, Some(&b)) => leaves.push((
                        e.leaf_label,
                        SkeletonLeaf {
                            node: Some(b),
                            vector: e.weighted().neg(),
                            label: e.leaf_label,
                            end: Some(c.vertices[e.tail].pos.clone()),
                            anchor: Some(c.vertices[h].pos.clone()),
                        },
                    )),
                    (None, None) => {
                        let p = &c.vertices[e.tail].pos;
                        let q = &c.vertices[h].pos;
                        let mid = p.midpoint(q);
                        leaves.push((
                            None,
                            SkeletonLeaf {
                                node: None,
                                vector: e.weighted().neg(),
                                label: None,
                                end: Some(p.clone()),
                                anchor: Some(mid.clone()),
                            },
                        ));
                        leaves.push((
                            None,
                            SkeletonLeaf {
                                node: None,
                                vector: e.weighted(),
                                label: None,
                                end: Some(q.clone()),
                                anchor: Some(mid),
                            },
                        ));
                    }
                },
            }
        }
        if leaves.iter().all(|(l, _)| l.is_some()) && !leaves.is_empty() {
            let mut labels: Vec<usize> = leaves.iter().map(|(l, _)| l.unwrap()).collect();
            labels.sort_unstable();
            if labels != (0..leaves.len()).collect::<Vec<_>>() {
                return Err(Error::InvalidInput(format!(
                    "leaf labels must be 0..{}, got {labels:?}",
                    leaves.len()
                )));
            }
            leaves.sort_by_key(|(l, _)| *l);
        }
        let node_ids = nodes.iter().map(|&v| c.vertices[v].id.clone()).collect();
        let node_pos = nodes.iter().map(|&v| Some(c.vertices[v].pos.clone())).collect();
        Ok(Skeleton::from_parts(
            c.dim,
            node_ids,
            node_pos,
            edges,
            leaves.into_iter().map(|(_, l)| l).collect(),
        ))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn kappa(&self) -> usize {
        self.leaves.len()
    }

    pub fn slots(&self, node: usize) -> &[Slot] {
        &self.incidence[node]
    }

    /// Weighted vector of `slot` pointing away from `node`.
    pub fn outward(&self, node: usize, slot: Slot) -> IntVector {
        match slot {
            Slot::Leaf(j) => self.leaves[j].vector.clone(),
            Slot::Edge(e) => {
                let edge = &self.edges[e];
                if edge.a == node {
                    edge.vector.clone()
                } else {
                    edge.vector.neg()
                }
            }
        }
    }

    pub fn across(&self, e: usize, node: usize) -> usize {
        let edge = &self.edges[e];
        if edge.a == node {
            edge.b
        } else {
            edge.a
        }
    }

    /// Edges on the path between two nodes, each with its vector oriented from `from` toward `to`.
    pub fn path(&self, from: usize, to: usize) -> Vec<(usize, IntVector)> {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.node_count()];
        let mut seen = vec![false; self.node_count()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for &s in &self.incidence[v] {
                if let Slot::Edge(e) = s {
                    let w = self.across(e, v);
                    if !seen[w] {
                        seen[w] = true;
                        prev[w] = Some((v, e));
                        queue.push_back(w);
                    }
                }
            }
        }
        let mut out = Vec::new();
        let mut v = to;
        while let Some((p, e)) = prev[v] {
            out.push((e, self.outward(p, Slot::Edge(e))));
            v = p;
        }
        out.reverse();
        out
    }

    /// Checks the trivalence of every node.
    pub fn require_trivalent(&self) -> Result<()> {
        for (v, slots) in self.incidence.iter().enumerate() {
            if slots.len() != 3 {
                return Err(Error::NotTrivalent {
                    vertex: self.node_ids[v].clone(),
                    valence: slots.len(),
                });
            }
        }
        Ok(())
    }

    /// A curve realizing the skeleton: node 0 at the origin, every bounded
    /// edge of lattice length 1, leaves unbounded.
    pub fn realize(&self) -> Result<TropicalCurve> {
        let n = self.dim;
        let mut pos: Vec<Option<RationalVector>> = vec![None; self.node_count()];
        if self.node_count() == 0 {
            return Err(Error::InvalidInput("skeleton has no nodes".into()));
        }
        pos[0] = Some(RationalVector::zero(n));
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            for &s in &self.incidence[v] {
                if let Slot::Edge(e) = s {
                    let w = self.across(e, v);
                    if pos[w].is_none() {
                        let (_, u) = gcd_primitive(&self.outward(v, s));
                        let step = primitive_sign_match(&self.outward(v, s), u);
                        pos[w] = Some(pos[v].as_ref().unwrap().offset(&step, &BigRational::one()));
                        stack.push(w);
                    }
                }
            }
        }
        let vertices = pos
            .into_iter()
            .enumerate()
            .map(|(i, p)| Vertex { id: self.node_ids[i].clone(), pos: p.expect("tree is connected") })
            .collect();
        let mut edges = Vec::new();
        for e in &self.edges {
            let (w, u) = gcd_primitive(&e.vector);
            let dir = primitive_sign_match(&e.vector, u);
            edges.push(Edge { tail: e.a, head: Some(e.b), dir, weight: w, leaf_label: None });
        }
        for l in &self.leaves {
            let (w, u) = gcd_primitive(&l.vector);
            let dir = primitive_sign_match(&l.vector, u);
            edges.push(Edge {
                tail: l.node.expect("skeleton with nodes"),
                head: None,
                dir,
                weight: w,
                leaf_label: l.label,
            });
        }
        TropicalCurve::new(n, vertices, edges)
    }
}

/// Restores the sign of `v` on its normalized primitive part `u`.
pub fn primitive_sign_match(v: &IntVector, u: IntVector) -> IntVector {
    if u.dot(v).is_negative() {
        u.neg()
    } else {
        u
    }
}

/// Assigns each internal edge the sum of the leaf vectors on its far side.
pub fn internal_directions_from_leaves(topo: &TreeTopology, degree: &ToricDegree) -> Result<Skeleton> {
    let kappa = topo.kappa();
    if kappa != degree.len() {
        return Err(Error::InvalidInput(format!(
            "topology has {kappa} leaves but the degree has {} vectors",
            degree.len()
        )));
    }
    let dim = degree
        .vectors
        .first()
        .map(IntVector::dim)
        .ok_or_else(|| Error::InvalidInput("empty degree".into()))?;
    let mut adj: Vec<Vec<Port>> = vec![Vec::new(); topo.nodes];
    let mut leaf_node = vec![None; kappa];
    for &(a, b) in &topo.edges {
        for (x, y) in [(a, b), (b, a)] {
            match (x, y) {
                (Port::Node(i), other) => adj[i].push(other),
                (Port::Leaf(j), Port::Node(i)) => leaf_node[j] = Some(i),
                (Port::Leaf(_), Port::Leaf(_)) => {
                    return Err(Error::InvalidInput("leaf-to-leaf edge in topology".into()))
                }
            }
        }
    }
    fn far_sum(adj: &[Vec<Port>], degree: &ToricDegree, from: usize, to: Port, dim: usize) -> IntVector {
        match to {
            Port::Leaf(j) => degree.vectors[j].clone(),
            Port::Node(v) => adj[v]
                .iter()
                .filter(|&&p| p != Port::Node(from))
                .fold(IntVector::zero(dim), |acc, &p| acc.add(&far_sum(adj, degree, v, p, dim))),
        }
    }
    let mut edges = Vec::new();
    for &(a, b) in &topo.edges {
        if let (Port::Node(i), Port::Node(k)) = (a, b) {
            let v = far_sum(&adj, degree, i, b, dim);
            if v.is_zero() {
                return Err(Error::Degenerate(format!("internal edge n{i}-n{k} has zero direction")));
            }
            edges.push(SkeletonEdge { a: i, b: k, vector: v });
        }
    }
    let leaves = (0..kappa)
        .map(|j| SkeletonLeaf {
            node: leaf_node[j],
            vector: degree.vectors[j].clone(),
            label: Some(j),
            end: None,
            anchor: None,
        })
        .collect();
    Ok(Skeleton::from_parts(
        dim,
        (0..topo.nodes).map(|i| format!("n{i}")).collect(),
        vec![None; topo.nodes],
        edges,
        leaves,
    ))
}

/// Canonical encoding of a curve up to re-indexing, keeping edge vectors and weights.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct CombinatorialType(pub String);

impl std::fmt::Display for CombinatorialType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Graph with leaf half-edges, used for canonical forms.
struct LabeledGraph {
    n: usize,
    /// `(u, Some(v), weighted vector u -> v)` or `(u, None, weighted outward leaf vector)`.
    edges: Vec<(usize, Option<usize>, IntVector)>,
}

fn vec_key(v: &IntVector) -> String {
    v.to_string()
}

impl LabeledGraph {
    fn slots(&self, x: usize) -> Vec<(String, Option<usize>)> {
        let mut out = Vec::new();
        for (u, v, d) in &self.edges {
            match v {
                None if *u == x => out.push((format!("L{}", vec_key(d)), None)),
                Some(w) if *u == x => out.push((format!("E{}", vec_key(d)), Some(*w))),
                Some(w) if *w == x => out.push((format!("E{}", vec_key(&d.neg())), Some(*u))),
                _ => {}
            }
        }
        out.sort();
        out
    }

    fn encode(&self, order: &[usize]) -> String {
        let num: HashMap<usize, usize> = order.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let mut parts: Vec<String> = self
            .edges
            .iter()
            .map(|(u, v, d)| match v {
                None => format!("{}:L{}", num[u], vec_key(d)),
                Some(w) => {
                    let (a, b) = (num[u], num[w]);
                    if a <= b {
                        format!("{a}-{b}:{}", vec_key(d))
                    } else {
                        format!("{b}-{a}:{}", vec_key(&d.neg()))
                    }
                }
            })
            .collect();
        parts.sort();
        format!("n{};{}", self.n, parts.join(";"))
    }

    /// Breadth-first numberings from every start, branching over ties.
    fn canonical(&self) -> String {
        let mut best: Option<String> = None;
        for s in 0..self.n {
            self.explore(vec![s], 0, &mut best);
        }
        best.unwrap_or_else(|| format!("n{}", self.n))
    }

    fn explore(&self, order: Vec<usize>, cursor: usize, best: &mut Option<String>) {
        if cursor == order.len() {
            let enc = self.encode(&order);
            if best.as_ref().is_none_or(|b| enc < *b) {
                *best = Some(enc);
            }
            return;
        }
        let x = order[cursor];
        let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (key, w) in self.slots(x) {
            if let Some(w) = w {
                if !order.contains(&w) {
                    let g = groups.entry(key).or_default();
                    if !g.contains(&w) {
                        g.push(w);
                    }
                }
            }
        }
        let group_list: Vec<Vec<usize>> = groups.into_values().collect();
        let mut choices: Vec<Vec<usize>> = vec![Vec::new()];
        for g in group_list {
            let mut next = Vec::new();
            for prefix in &choices {
                for perm in permutations(&g) {
                    let mut p = prefix.clone();
                    for w in perm {
                        if !p.contains(&w) {
                            p.push(w);
                        }
                    }
                    next.push(p);
                }
            }
            choices = next;
        }
        for extra in choices {
            let mut o = order.clone();
            o.extend(extra);
            self.explore(o, cursor + 1, best);
        }
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Canonical combinatorial type. Edges into ends are treated as leaves.
pub fn combinatorial_type(c: &TropicalCurve) -> CombinatorialType {
    let nodes: Vec<usize> = (0..c.vertices.len()).filter(|&v| !c.is_end(v)).collect();
    if nodes.is_empty() {
        // bare segment between two ends
        let e = &c.edges[0];
        let (_, u) = gcd_primitive(&e.dir);
        return CombinatorialType(format!("segment:{}x{}", u, e.weight));
    }
    let index: HashMap<usize, usize> = nodes.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let mut edges = Vec::new();
    for (i, e) in c.edges.iter().enumerate() {
        match e.head {
            None => edges.push((index[&e.tail], None, e.weighted())),
            Some(h) => match (index.get(&e.tail), index.get(&h)) {
                (Some(&a), Some(&b)) => edges.push((a, Some(b), e.weighted())),
                (Some(&a), None) => edges.push((a, None, e.weighted())),
                (None, Some(&b)) => edges.push((b, None, c.outward_dir(i, h).scale(&e.weight))),
                (None, None) => {}
            },
        }
    }
    CombinatorialType(LabeledGraph { n: nodes.len(), edges }.canonical())
}

/// Combinatorial type of a skeleton (leaf labels ignored).
pub fn skeleton_type(s: &Skeleton) -> CombinatorialType {
    let mut edges: Vec<(usize, Option<usize>, IntVector)> =
        s.edges.iter().map(|e| (e.a, Some(e.b), e.vector.clone())).collect();
    for l in &s.leaves {
        if let Some(v) = l.node {
            edges.push((v, None, l.vector.clone()));
        }
    }
    if s.node_count() == 0 {
        let (_, u) = gcd_primitive(&s.leaves[0].vector);
        return CombinatorialType(format!("segment:{}x{}", u, s.leaves[0].weight()));
    }
    CombinatorialType(LabeledGraph { n: s.node_count(), edges }.canonical())
}

/// Primitive direction from `a` to `b`, if they differ.
pub fn direction_between(a: &RationalVector, b: &RationalVector) -> Option<IntVector> {
    primitive_direction(&b.sub(a))
}

/// How two edge images meet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeMeeting {
    Disjoint,
    Point(RationalVector),
    /// Collinear images sharing a segment of positive length.
    Overlap,
}

fn in_range(t: &BigRational, len: &Option<BigRational>) -> bool {
    !t.is_negative() && len.as_ref().is_none_or(|l| t <= l)
}

/// Intersection of the images of edges `e` and `f` (closed segments or rays).
pub fn edge_meeting(c: &TropicalCurve, e: usize, f: usize) -> EdgeMeeting {
    use crate::lattice::{solve_exact, RationalMatrix, SolveOutcome};
    let (p, d, lp) = c.edge_param(e);
    let (q, g, lq) = c.edge_param(f);
    let n = c.dim;
    // p + t d == q + s g
    let mut entries = Vec::with_capacity(2 * n);
    for k in 0..n {
        entries.push(BigRational::from_integer(d.coords()[k].clone()));
        entries.push(BigRational::from_integer(-g.coords()[k].clone()));
    }
    let m = RationalMatrix::new(n, 2, entries).expect("shape");
    let rhs: Vec<BigRational> = q.sub(&p).coords().to_vec();
    let sol = solve_exact(&m, &rhs).expect("shape");
    match sol.outcome {
        SolveOutcome::Inconsistent => EdgeMeeting::Disjoint,
        SolveOutcome::Unique(x) => {
            if in_range(&x[0], &lp) && in_range(&x[1], &lq) {
                EdgeMeeting::Point(p.offset(&d, &x[0]))
            } else {
                EdgeMeeting::Disjoint
            }
        }
        SolveOutcome::Underdetermined { .. } => {
            // Parallel and collinear: intersect parameter intervals along d.
            let to_t = |x: &RationalVector| x.sub(&p).as_multiple_of(&d).expect("collinear");
            let q0 = to_t(&q);
            let same = d == g;
            let (lo_f, hi_f) = match (&lq, same) {
                (Some(l), true) => (Some(q0.clone()), Some(&q0 + l)),
                (Some(l), false) => (Some(&q0 - l), Some(q0.clone())),
                (None, true) => (Some(q0.clone()), None),
                (None, false) => (None, Some(q0.clone())),
            };
            let lo = match lo_f {
                Some(x) if x.is_positive() => x,
                _ => BigRational::zero(),
            };
            let hi = match (hi_f, &lp) {
                (Some(a), Some(b)) => Some(if &a < b { a } else { b.clone() }),
                (Some(a), None) => Some(a),
                (None, Some(b)) => Some(b.clone()),
                (None, None) => None,
            };
            match hi {
                None => EdgeMeeting::Overlap,
                Some(h) if h > lo => EdgeMeeting::Overlap,
                Some(h) if h == lo => EdgeMeeting::Point(p.offset(&d, &lo)),
                _ => EdgeMeeting::Disjoint,
            }
        }
    }
}

/// Vertices shared by edges `e` and `f`.
pub fn shared_vertices(c: &TropicalCurve, e: usize, f: usize) -> Vec<usize> {
    let ends = |i: usize| {
        let edge = &c.edges[i];
        let mut v = vec![edge.tail];
        v.extend(edge.head);
        v
    };
    let a = ends(e);
    ends(f).into_iter().filter(|v| a.contains(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rational;

    pub(crate) fn rv(c: &[(i64, i64)]) -> RationalVector {
        RationalVector::new(c.iter().map(|&(n, d)| rational(n, d)).collect()).unwrap()
    }

    fn iv(c: &[i64]) -> IntVector {
        IntVector::from_i64s(c).unwrap()
    }

    fn ray_tripod(dirs: &[&[i64]]) -> TropicalCurve {
        let n = dirs[0].len();
        let v = Vertex { id: "v".into(), pos: RationalVector::zero(n) };
        let edges = dirs
            .iter()
            .map(|d| Edge { tail: 0, head: None, dir: iv(d), weight: BigInt::one(), leaf_label: None })
            .collect();
        TropicalCurve::new(n, vec![v], edges).unwrap()
    }

    fn l12() -> TropicalCurve {
        let q = |a, b, c| rv(&[(a, 4), (b, 4), (c, 4)]);
        let vertices = vec![
            Vertex { id: "p".into(), pos: q(1, 1, 1) },
            Vertex { id: "a".into(), pos: q(1, 0, 0) },
            Vertex { id: "b".into(), pos: q(2, 2, 0) },
            Vertex { id: "c".into(), pos: q(0, 1, 3) },
        ];
        let e = |h, d: &[i64]| Edge { tail: 0, head: Some(h), dir: iv(d), weight: BigInt::one(), leaf_label: None };
        TropicalCurve::new(3, vertices, vec![e(1, &[0, -1, -1]), e(2, &[1, 1, -1]), e(3, &[-1, 0, 2])]).unwrap()
    }

    #[test]
    fn validate_examples() {
        let seg = TropicalCurve::new(
            3,
            vec![
                Vertex { id: "a".into(), pos: rv(&[(0, 1), (0, 1), (0, 1)]) },
                Vertex { id: "b".into(), pos: rv(&[(0, 1), (0, 1), (1, 1)]) },
            ],
            vec![Edge { tail: 0, head: Some(1), dir: iv(&[0, 0, 1]), weight: BigInt::one(), leaf_label: None }],
        )
        .unwrap();
        assert!(validate_curve(&seg).ok);
        assert!(validate_curve(&l12()).ok);
        let bad = ray_tripod(&[&[1, 0], &[0, 1], &[-1, 0]]);
        let r = validate_curve(&bad);
        assert!(!r.ok);
        assert!(r.has("BALANCING"));
    }

    #[test]
    fn betti_examples() {
        let t = ray_tripod(&[&[1, 0], &[0, 1], &[-1, -1]]);
        let r = betti_and_degree(&t);
        assert_eq!((r.b1, r.kappa), (0, 3));
        let r = betti_and_degree(&l12());
        assert_eq!((r.b1, r.kappa, r.boundary_points, r.leaves), (0, 0, 3, 3));
        assert!(r.degree.sum().unwrap().is_zero());
    }

    #[test]
    fn regularity_of_trees() {
        let t = ray_tripod(&[&[1, 0, 0], &[0, 1, 0], &[-1, -1, 0]]);
        let r = regularity_check(&t).unwrap();
        assert!(r.regular);
        assert_eq!(r.rank, 0);
        assert_eq!(r.def_dim, 3);
        assert_eq!(r.def_dim, r.expected_dim);
    }

    #[test]
    fn planar_triangle_in_space_is_irregular() {
        // triangle (0,0,0),(1,0,0),(0,1,0) with outward leaves balancing each corner
        let p = |x, y| rv(&[(x, 1), (y, 1), (0, 1)]);
        let vertices = vec![
            Vertex { id: "a".into(), pos: p(0, 0) },
            Vertex { id: "b".into(), pos: p(1, 0) },
            Vertex { id: "c".into(), pos: p(0, 1) },
        ];
        let e = |t, h: Option<usize>, d: &[i64]| Edge {
            tail: t,
            head: h,
            dir: iv(d),
            weight: BigInt::one(),
            leaf_label: None,
        };
        let edges = vec![
            e(0, Some(1), &[1, 0, 0]),
            e(1, Some(2), &[-1, 1, 0]),
            e(2, Some(0), &[0, -1, 0]),
            e(0, None, &[-1, -1, 0]),
            e(1, None, &[2, -1, 0]),
            e(2, None, &[-1, 2, 0]),
        ];
        let c = TropicalCurve::new(3, vertices, edges).unwrap();
        assert!(validate_curve(&c).ok, "{:?}", validate_curve(&c));
        let r = regularity_check(&c).unwrap();
        assert_eq!(r.rank, 2);
        assert!(!r.regular);
    }

    #[test]
    fn topology_counts() {
        assert_eq!(enumerate_topologies(3).len(), 1);
        assert_eq!(enumerate_topologies(4).len(), 3);
        assert_eq!(enumerate_topologies(5).len(), 15);
        assert_eq!(enumerate_topologies(6).len(), 105);
        for t in enumerate_topologies(5) {
            assert_eq!(t.kappa(), 5);
            assert_eq!(t.nodes, 3);
        }
    }

    #[test]
    fn internal_direction_examples() {
        let degree = ToricDegree {
            vectors: vec![iv(&[1, 0, 0]), iv(&[0, 1, 0]), iv(&[-1, 0, 0]), iv(&[0, -1, 0])],
        };
        let pair = |a, b, c, d| TreeTopology {
            nodes: 2,
            edges: vec![
                (Port::Node(0), Port::Node(1)),
                (Port::Node(0), Port::Leaf(a)),
                (Port::Node(0), Port::Leaf(b)),
                (Port::Node(1), Port::Leaf(c)),
                (Port::Node(1), Port::Leaf(d)),
            ],
        };
        let s = internal_directions_from_leaves(&pair(2, 3, 0, 1), &degree).unwrap();
        assert_eq!(s.edges[0].vector, iv(&[1, 1, 0]));
        assert!(validate_curve(&s.realize().unwrap()).ok);
        let err = internal_directions_from_leaves(&pair(0, 2, 1, 3), &degree).unwrap_err();
        assert_eq!(err.code(), "DEGENERATE");
    }

    #[test]
    fn combinatorial_type_is_index_free() {
        let a = ray_tripod(&[&[1, 0], &[0, 1], &[-1, -1]]);
        let b = ray_tripod(&[&[-1, -1], &[1, 0], &[0, 1]]);
        assert_eq!(combinatorial_type(&a), combinatorial_type(&b));
        let degree = ToricDegree {
            vectors: vec![iv(&[1, 0]), iv(&[0, 1]), iv(&[-1, 0]), iv(&[0, -1])],
        };
        let t = enumerate_topologies(4);
        let types: Vec<_> = t
            .iter()
            .filter_map(|t| internal_directions_from_leaves(t, &degree).ok())
            .map(|s| combinatorial_type(&s.realize().unwrap()))
            .collect();
        assert_eq!(types.len(), 2);
        assert_ne!(types[0], types[1]);
        assert_ne!(types[0], combinatorial_type(&a));
    }

    #[test]
    fn split_caterpillar() {
        let degree = ToricDegree {
            vectors: vec![iv(&[1, 0]), iv(&[0, 1]), iv(&[-1, 0]), iv(&[0, -1])],
        };
        let topo = TreeTopology {
            nodes: 2,
            edges: vec![
                (Port::Node(0), Port::Node(1)),
                (Port::Node(0), Port::Leaf(2)),
                (Port::Node(0), Port::Leaf(3)),
                (Port::Node(1), Port::Leaf(0)),
                (Port::Node(1), Port::Leaf(1)),
            ],
        };
        let c = internal_directions_from_leaves(&topo, &degree).unwrap().realize().unwrap();
        let (s, d, _) = c.edge_param(0);
        let mid = s.offset(&d, &rational(1, 2));
        let (h1, h2) = split_at_edge(&c, 0, &mid).unwrap();
        assert!(validate_curve(&h1).ok && validate_curve(&h2).ok);
        assert_eq!(betti_and_degree(&h1).kappa + betti_and_degree(&h2).kappa, 4 + 2);
        assert!(split_at_edge(&c, 0, &s).is_err());
    }
}
