//! Rotational momenta, the mixed h-product, evaluation matrices, the
//! splitting identity, and the enumerative count over tree topologies.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::curve::{
    enumerate_topologies, internal_directions_from_leaves, skeleton_type, CombinatorialType, Edge,
    Skeleton, SkeletonEdge, SkeletonLeaf, Slot, ToricDegree, TropicalCurve, Vertex,
};
use crate::domain::{leaf_line_incidence, LineConfiguration};
use crate::error::{Error, Result};
use crate::lattice::{
    complete_basis, cross, ext_gcd, gcd_primitive, mixed, reduce_row, serialize_int, solve_exact,
    IntMatrix, IntVector, RationalMatrix, RationalVector, SolveOutcome,
};

/// `vector == n * primitive_part` up to sign, `primitive_part` sign-normalized.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RotationalMomentum {
    pub vector: IntVector,
    #[serde(serialize_with = "serialize_int")]
    pub n: BigInt,
    pub primitive_part: IntVector,
}

impl RotationalMomentum {
    pub fn new(vector: IntVector) -> Self {
        let (n, primitive_part) = gcd_primitive(&vector);
        RotationalMomentum { vector, n, primitive_part }
    }

    pub fn is_zero(&self) -> bool {
        self.n.is_zero()
    }
}

/// `d x z` for a weighted leaf vector `d` and a line direction `z`.
pub fn leaf_momentum(d: &IntVector, z: &IntVector) -> Result<RotationalMomentum> {
    if d.is_zero() {
        return Err(Error::InvalidInput("leaf vector is zero".into()));
    }
    Ok(RotationalMomentum::new(cross(d, z)?))
}

/// `(r1 x r2) x d_out`.
pub fn propagate(r1: &RotationalMomentum, r2: &RotationalMomentum, d_out: &IntVector) -> Result<RotationalMomentum> {
    if d_out.is_zero() {
        return Err(Error::InvalidInput("outgoing edge vector is zero".into()));
    }
    Ok(RotationalMomentum::new(cross(&cross(&r1.vector, &r2.vector)?, d_out)?))
}

/// gcd of the coordinates of `a x b`, which must be parallel to `d_root`.
pub fn pairing_coefficient(a: &RotationalMomentum, b: &RotationalMomentum, d_root: &IntVector) -> Result<BigInt> {
    if d_root.is_zero() {
        return Err(Error::InvalidInput("root vector is zero".into()));
    }
    let c = cross(&a.vector, &b.vector)?;
    if !cross(&c, d_root)?.is_zero() {
        return Err(Error::InconsistentMomenta(format!("{} x {} = {c} is not parallel to {d_root}", a.vector, b.vector)));
    }
    Ok(c.content())
}

/// Root of a mixed h-product evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Root {
    Vertex(usize),
    Leaf(usize),
}

fn check_z(s: &Skeleton, z: &[IntVector]) -> Result<()> {
    if s.dim() != 3 {
        return Err(Error::InvalidInput("rotational momenta need dimension 3".into()));
    }
    if z.len() != s.kappa() {
        return Err(Error::InvalidInput(format!("{} line directions for {} leaves", z.len(), s.kappa())));
    }
    if let Some(bad) = z.iter().find(|v| !v.is_primitive()) {
        return Err(Error::InvalidInput(format!("line direction {bad} is not primitive")));
    }
    Ok(())
}

/// Momentum carried into `node` through `slot`.
pub fn incoming_momentum(s: &Skeleton, z: &[IntVector], node: usize, slot: Slot) -> Result<RotationalMomentum> {
    match slot {
        Slot::Leaf(j) => leaf_momentum(&s.leaves[j].vector, &z[j]),
        Slot::Edge(e) => {
            let far = s.across(e, node);
            let mut rs = Vec::with_capacity(2);
            for &t in s.slots(far) {
                if t != slot {
                    rs.push(incoming_momentum(s, z, far, t)?);
                }
            }
            if rs.len() != 2 {
                return Err(Error::NotTrivalent { vertex: s.node_ids[far].clone(), valence: rs.len() + 1 });
            }
            propagate(&rs[0], &rs[1], &s.outward(far, Slot::Edge(e)))
        }
    }
}

/// Momenta of the three slots of `node`, in slot order.
pub fn vertex_momenta(s: &Skeleton, z: &[IntVector], node: usize) -> Result<Vec<RotationalMomentum>> {
    s.slots(node).iter().map(|&t| incoming_momentum(s, z, node, t)).collect()
}

/// Propagated momentum of the root leaf's edge, `rho(e_root)`.
pub fn root_edge_momentum(s: &Skeleton, z: &[IntVector], leaf: usize) -> Result<RotationalMomentum> {
    let node = s.leaves[leaf]
        .node
        .ok_or_else(|| Error::InvalidInput("segment leaves have no node".into()))?;
    let others: Vec<RotationalMomentum> = s
        .slots(node)
        .iter()
        .filter(|&&t| t != Slot::Leaf(leaf))
        .map(|&t| incoming_momentum(s, z, node, t))
        .collect::<Result<_>>()?;
    propagate(&others[0], &others[1], &s.leaves[leaf].vector)
}

/// Magnitude of the mixed h-product of the line directions `z` along `s`.
///
/// A vertex root gives the mixed product of the three incoming momenta; a
/// leaf root gives the cross-product coefficient of `rho(e_root)` and
/// `rho_root`, divided by the weight of the root leaf. A bare segment
/// (`kappa == 2`) gives `|mixed(z1, z2, d)|`.
pub fn mixed_h_product(s: &Skeleton, z: &[IntVector], root: Option<Root>) -> Result<BigInt> {
    check_z(s, z)?;
    if s.kappa() < 2 {
        return Err(Error::InvalidInput(format!("kappa {} < 2", s.kappa())));
    }
    if s.node_count() == 0 {
        return Ok(mixed(&z[0], &z[1], &s.leaves[1].vector)?.abs());
    }
    s.require_trivalent()?;
    match root.unwrap_or(Root::Vertex(0)) {
        Root::Vertex(v) => {
            if v >= s.node_count() {
                return Err(Error::InvalidInput(format!("no vertex {v}")));
            }
            let r = vertex_momenta(s, z, v)?;
            Ok(mixed(&r[0].vector, &r[1].vector, &r[2].vector)?.abs())
        }
        Root::Leaf(j) => {
            if j >= s.kappa() {
                return Err(Error::InvalidInput(format!("no leaf {j}")));
            }
            let re = root_edge_momentum(s, z, j)?;
            let rj = leaf_momentum(&s.leaves[j].vector, &z[j])?;
            let g = pairing_coefficient(&re, &rj, &s.leaves[j].vector)?;
            let w = s.leaves[j].weight();
            let (q, r) = g.div_rem(&w);
            if !r.is_zero() {
                return Err(Error::InternalInconsistency(format!("leaf weight {w} does not divide {g}")));
            }
            Ok(q)
        }
    }
}

/// All roots of `s`: every vertex, then every leaf.
pub fn all_roots(s: &Skeleton) -> Vec<Root> {
    (0..s.node_count())
        .map(Root::Vertex)
        .chain((0..s.kappa()).map(Root::Leaf))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EvaluationMatrix {
    #[serde(serialize_with = "serialize_matrix")]
    pub matrix: IntMatrix,
    pub columns: Vec<String>,
    pub rows: Vec<String>,
    pub reference: String,
}

fn serialize_matrix<S: serde::Serializer>(m: &IntMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.rows()))?;
    for i in 0..m.rows() {
        let row = IntVector::new(m.row(i).to_vec()).unwrap_or_else(|_| IntVector::zero(2));
        if m.cols() >= 2 {
            seq.serialize_element(&row)?;
        } else {
            seq.serialize_element(&m.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>())?;
        }
    }
    seq.end()
}

/// Evaluation matrix with translation columns and one column per bounded edge.
///
/// Row `j` is `rho_j` followed by `mixed(d_j, z_j, dh(e))` for the edges on
/// the path from the reference vertex to leaf `j` (oriented away from the
/// reference), 0 elsewhere. A bare segment gives the 2x2 matrix of `rho_j`
/// in a basis of `Z^3 / Z d`.
pub fn ev_matrix_from_z(s: &Skeleton, z: &[IntVector], reference: usize) -> Result<EvaluationMatrix> {
    check_z(s, z)?;
    let kappa = s.kappa();
    let rows: Vec<String> = (0..kappa).map(|j| format!("line {j}")).collect();
    let rho: Vec<IntVector> = (0..kappa)
        .map(|j| leaf_momentum(&s.leaves[j].vector, &z[j]).map(|r| r.vector))
        .collect::<Result<_>>()?;
    if s.node_count() == 0 {
        let (_, u) = gcd_primitive(&s.leaves[1].vector);
        let (a, b) = complete_basis(&u).ok_or_else(|| Error::Degenerate("segment direction".into()))?;
        let entries = rho.iter().flat_map(|r| [r.dot(&a), r.dot(&b)]).collect();
        return Ok(EvaluationMatrix {
            matrix: IntMatrix::new(2, 2, entries)?,
            columns: vec![format!("t.{a}"), format!("t.{b}")],
            rows,
            reference: "segment".into(),
        });
    }
    s.require_trivalent()?;
    if kappa != 3 + s.edges.len() {
        return Err(Error::InvalidInput(format!("kappa {kappa} != 3 + {} bounded edges", s.edges.len())));
    }
    let mut entries = Vec::with_capacity(kappa * kappa);
    for (rj, leaf) in rho.iter().zip(&s.leaves) {
        entries.extend(rj.coords().iter().cloned());
        let node = leaf.node.expect("tree with nodes");
        let path = s.path(reference, node);
        for e in 0..s.edges.len() {
            let v = path.iter().find(|(pe, _)| *pe == e).map(|(_, vec)| rj.dot(vec));
            entries.push(v.unwrap_or_else(BigInt::zero));
        }
    }
    let mut columns = vec!["tx".to_string(), "ty".to_string(), "tz".to_string()];
    columns.extend(
        s.edges
            .iter()
            .map(|e| format!("l({}-{})", s.node_ids[e.a], s.node_ids[e.b])),
    );
    Ok(EvaluationMatrix {
        matrix: IntMatrix::new(kappa, kappa, entries)?,
        columns,
        rows,
        reference: s.node_ids[reference].clone(),
    })
}

/// Evaluation matrix of a tree curve against a boundary line configuration.
pub fn ev_matrix(c: &TropicalCurve, lines: &LineConfiguration) -> Result<EvaluationMatrix> {
    let s = Skeleton::from_curve(c)?;
    let z = line_directions(&s, lines)?;
    ev_matrix_from_z(&s, &z, 0)
}

/// Line direction attached to each leaf of `s`.
pub fn line_directions(s: &Skeleton, lines: &LineConfiguration) -> Result<Vec<IntVector>> {
    let inc = leaf_line_incidence(s, lines)?;
    Ok(inc.iter().map(|i| lines.lines[i.line].dir.clone()).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Recursive,
    Determinant,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MultiplicityValue {
    #[serde(serialize_with = "serialize_int")]
    pub value: BigInt,
    pub method: Method,
    pub sign_convention: String,
}

pub fn multiplicity_det(m: &EvaluationMatrix) -> Result<MultiplicityValue> {
    Ok(MultiplicityValue {
        value: m.matrix.det()?.abs(),
        method: Method::Determinant,
        sign_convention: "absolute value of the determinant".into(),
    })
}

pub fn multiplicity_recursive(s: &Skeleton, z: &[IntVector], root: Option<Root>) -> Result<MultiplicityValue> {
    Ok(MultiplicityValue {
        value: mixed_h_product(s, z, root)?,
        method: Method::Recursive,
        sign_convention: "magnitude; momenta are defined up to sign".into(),
    })
}

/// One side of a tree cut at a bounded edge.
#[derive(Clone, Debug)]
pub struct SplitPart {
    pub skeleton: Skeleton,
    /// Original leaf index of each leaf; `None` for the new leaf (always last).
    pub origin: Vec<Option<usize>>,
    /// Index of the node carrying the new leaf.
    pub cut_node: usize,
}

/// Cuts `s` at edge `e`. The `a` side gets leaf `r1` with vector `e.vector`,
/// the `b` side gets `r2` with the opposite vector.
pub fn split_skeleton(s: &Skeleton, e: usize) -> Result<(SplitPart, SplitPart)> {
    let edge = s.edges.get(e).ok_or_else(|| Error::InvalidInput(format!("no edge {e}")))?;
    let side = |start: usize| -> Vec<bool> {
        let mut seen = vec![false; s.node_count()];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &t in s.slots(v) {
                if let Slot::Edge(f) = t {
                    if f == e {
                        continue;
                    }
                    let w = s.across(f, v);
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        seen
    };
    let build = |keep: Vec<bool>, cut: usize, vector: IntVector| -> SplitPart {
        let map: Vec<Option<usize>> = {
            let mut k = 0;
            keep.iter()
                .map(|&x| {
                    if x {
                        k += 1;
                        Some(k - 1)
                    } else {
                        None
                    }
                })
                .collect()
        };
        let ids = (0..s.node_count()).filter(|&v| keep[v]).map(|v| s.node_ids[v].clone()).collect();
        let pos = (0..s.node_count()).filter(|&v| keep[v]).map(|v| s.node_pos[v].clone()).collect();
        let edges = s
            .edges
            .iter()
            .enumerate()
            .filter(|(f, x)| *f != e && keep[x.a])
            .map(|(_, x)| SkeletonEdge { a: map[x.a].unwrap(), b: map[x.b].unwrap(), vector: x.vector.clone() })
            .collect();
        let mut leaves = Vec::new();
        let mut origin = Vec::new();
        for (j, l) in s.leaves.iter().enumerate() {
            if l.node.is_some_and(|v| keep[v]) {
                leaves.push(SkeletonLeaf { node: map[l.node.unwrap()], ..l.clone() });
                origin.push(Some(j));
            }
        }
        leaves.push(SkeletonLeaf {
            node: map[cut],
            vector,
            label: None,
            end: None,
            anchor: s.node_pos[cut].clone(),
        });
        origin.push(None);
        SplitPart {
            skeleton: Skeleton::from_parts(s.dim(), ids, pos, edges, leaves),
            origin,
            cut_node: map[cut].unwrap(),
        }
    };
    let h1 = build(side(edge.a), edge.a, edge.vector.clone());
    let h2 = build(side(edge.b), edge.b, edge.vector.neg());
    Ok((h1, h2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SplitReport {
    pub edge: usize,
    #[serde(serialize_with = "serialize_int")]
    pub lhs: BigInt,
    #[serde(serialize_with = "serialize_int")]
    pub rhs: BigInt,
    pub holds: bool,
    #[serde(serialize_with = "serialize_int")]
    pub weight: BigInt,
    pub rho_r1: IntVector,
    pub z_a: IntVector,
    pub z_b: IntVector,
}

/// Line directions for the two new leaves of a split.
///
/// Modulo `u = prim(dh(e))`, `z_b` generates the kernel of `x -> rho . x`
/// and `z_a` completes `(u, z_b)` to a basis of `Z^3`, with `rho . z_a > 0`.
pub fn split_directions(rho: &IntVector, dh: &IntVector) -> Result<(IntVector, IntVector)> {
    if rho.is_zero() {
        return Err(Error::SplitDegenerate);
    }
    let (_, u) = gcd_primitive(dh);
    if !rho.dot(&u).is_zero() {
        return Err(Error::InconsistentMomenta(format!("{rho} is not orthogonal to {u}")));
    }
    let (_, v) = reduce_row(rho);
    let v0 = IntVector::new(v.column(0))?;
    let v1 = IntVector::new(v.column(1))?;
    let v2 = IntVector::new(v.column(2))?;
    let m = RationalMatrix::from_int(&IntMatrix::from_rows(&[v1.clone(), v2.clone()])?.transpose());
    let rhs: Vec<BigRational> = u.coords().iter().map(|c| BigRational::from_integer(c.clone())).collect();
    let (alpha, beta) = match solve_exact(&m, &rhs)?.outcome {
        SolveOutcome::Unique(x) if x.iter().all(|c| c.is_integer()) => (x[0].to_integer(), x[1].to_integer()),
        _ => return Err(Error::InternalInconsistency("edge direction outside the momentum kernel".into())),
    };
    let (g, x, y) = ext_gcd(&alpha, &beta);
    if !g.is_one() {
        return Err(Error::InternalInconsistency("edge direction not primitive in the kernel".into()));
    }
    let z_b = v1.scale(&-y).add(&v2.scale(&x));
    let z_a = if rho.dot(&v0).is_negative() { v0.neg() } else { v0 };
    Ok((z_a, z_b))
}

/// Checks `m(c) == m(h1, z_a) m(h2, z_b) / w(e)` at bounded edge `e`.
pub fn splitting_check(s: &Skeleton, z: &[IntVector], e: usize) -> Result<SplitReport> {
    check_z(s, z)?;
    s.require_trivalent()?;
    let lhs = mixed_h_product(s, z, None)?;
    let edge = s.edges.get(e).ok_or_else(|| Error::InvalidInput(format!("no edge {e}")))?.clone();
    let rho = incoming_momentum(s, z, edge.b, Slot::Edge(e))?;
    let (z_a, z_b) = split_directions(&rho.vector, &edge.vector)?;
    let (h1, h2) = split_skeleton(s, e)?;
    let pick = |part: &SplitPart, extra: &IntVector| -> Vec<IntVector> {
        part.origin.iter().map(|o| o.map_or_else(|| extra.clone(), |j| z[j].clone())).collect()
    };
    let m1 = mixed_h_product(&h1.skeleton, &pick(&h1, &z_a), Some(Root::Vertex(h1.cut_node)))?;
    let m2 = mixed_h_product(&h2.skeleton, &pick(&h2, &z_b), Some(Root::Vertex(h2.cut_node)))?;
    let w = edge.vector.content();
    let prod = &m1 * &m2;
    let (rhs, rem) = prod.div_rem(&w);
    Ok(SplitReport {
        edge: e,
        holds: rem.is_zero() && rhs == lhs,
        lhs,
        rhs,
        weight: w,
        rho_r1: rho.vector,
        z_a,
        z_b,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TypeResult {
    pub topology: usize,
    #[serde(rename = "type")]
    pub combinatorial_type: CombinatorialType,
    pub solution: Option<TropicalCurve>,
    #[serde(serialize_with = "serialize_int")]
    pub multiplicity: BigInt,
    pub accepted: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EnumerationReport {
    pub kappa: usize,
    pub topologies: usize,
    pub degenerate: usize,
    #[serde(serialize_with = "serialize_int")]
    pub total: BigInt,
    pub per_type: Vec<TypeResult>,
}

pub const DEFAULT_KAPPA_CAP: usize = 8;

/// Counts the rational tropical curves of the given degree through the lines.
///
/// `incidence[j]` is the line matched to degree entry `j` (identity if `None`).
pub fn enumerate_count(
    degree: &ToricDegree,
    lines: &LineConfiguration,
    incidence: Option<&[usize]>,
    cap: usize,
) -> Result<EnumerationReport> {
    let kappa = degree.len();
    if kappa > cap {
        return Err(Error::KappaCap { kappa, cap });
    }
    if kappa < 3 {
        return Err(Error::InvalidInput(format!("kappa {kappa} < 3")));
    }
    if lines.lines.len() != kappa {
        return Err(Error::InvalidInput(format!("{} lines for degree of size {kappa}", lines.lines.len())));
    }
    if degree.vectors.iter().any(|v| v.dim() != 3 || v.is_zero()) {
        return Err(Error::InvalidInput("degree vectors must be nonzero and 3-dimensional".into()));
    }
    if !degree.sum().is_some_and(|s| s.is_zero()) {
        return Err(Error::InvalidInput("degree vectors do not sum to zero".into()));
    }
    let identity: Vec<usize> = (0..kappa).collect();
    let inc = incidence.unwrap_or(&identity);
    let mut sorted = inc.to_vec();
    sorted.sort_unstable();
    if sorted != identity {
        return Err(Error::InvalidInput("incidence is not a bijection".into()));
    }
    let z: Vec<IntVector> = inc.iter().map(|&i| lines.lines[i].dir.clone()).collect();
    let bases: Vec<&RationalVector> = inc.iter().map(|&i| &lines.lines[i].base).collect();

    let topologies = enumerate_topologies(kappa);
    let mut per_type = Vec::new();
    let mut degenerate = 0;
    let mut total = BigInt::zero();
    for (t, topo) in topologies.iter().enumerate() {
        let s = match internal_directions_from_leaves(topo, degree) {
            Ok(s) => s,
            Err(Error::Degenerate(_)) => {
                degenerate += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let ty = skeleton_type(&s);
        let ev = ev_matrix_from_z(&s, &z, 0)?;
        let det = ev.matrix.det()?;
        let rhs: Vec<BigRational> = (0..kappa)
            .map(|j| {
                let rho = cross(&s.leaves[j].vector, &z[j]).expect("dimension 3");
                bases[j].dot_int(&rho)
            })
            .collect();
        let sol = solve_exact(&RationalMatrix::from_int(&ev.matrix), &rhs)?;
        let x = match sol.outcome {
            SolveOutcome::Inconsistent => {
                per_type.push(TypeResult {
                    topology: t,
                    combinatorial_type: ty,
                    solution: None,
                    multiplicity: BigInt::zero(),
                    accepted: false,
                });
                continue;
            }
            SolveOutcome::Underdetermined { .. } => {
                return Err(Error::NonGenericConfig(format!("topology {t} ({ty})")));
            }
            SolveOutcome::Unique(x) => x,
        };
        let lengths = &x[3..];
        if lengths.iter().any(Zero::is_zero) {
            return Err(Error::NonGenericConfig(format!("topology {t} ({ty}) has a zero-length edge")));
        }
        let accepted = lengths.iter().all(Signed::is_positive);
        let multiplicity = det.abs();
        let solution = if accepted {
            total += &multiplicity;
            Some(place_skeleton(&s, &x)?)
        } else {
            None
        };
        per_type.push(TypeResult { topology: t, combinatorial_type: ty, solution, multiplicity, accepted });
    }
    Ok(EnumerationReport { kappa, topologies: topologies.len(), degenerate, total, per_type })
}

/// Curve with node 0 at `x[0..3]` and bounded edge `k` of length `x[3 + k]`
/// (in units of its weighted vector).
fn place_skeleton(s: &Skeleton, x: &[BigRational]) -> Result<TropicalCurve> {
    let n = s.dim();
    let mut pos: Vec<Option<RationalVector>> = vec![None; s.node_count()];
    pos[0] = Some(RationalVector::new(x[..n].to_vec())?);
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        for &t in s.slots(v) {
            if let Slot::Edge(e) = t {
                let w = s.across(e, v);
                if pos[w].is_none() {
                    let step = s.outward(v, t);
                    pos[w] = Some(pos[v].as_ref().unwrap().offset(&step, &x[3 + e]));
                    stack.push(w);
                }
            }
        }
    }
    let vertices = pos
        .into_iter()
        .enumerate()
        .map(|(i, p)| Vertex { id: s.node_ids[i].clone(), pos: p.expect("connected") })
        .collect();
    let mut edges = Vec::new();
    for e in &s.edges {
        let (w, u) = gcd_primitive(&e.vector);
        let dir = crate::curve::primitive_sign_match(&e.vector, u);
        edges.push(Edge { tail: e.a, head: Some(e.b), dir, weight: w, leaf_label: None });
    }
    for l in &s.leaves {
        let (w, u) = gcd_primitive(&l.vector);
        let dir = crate::curve::primitive_sign_match(&l.vector, u);
        edges.push(Edge { tail: l.node.expect("nodes"), head: None, dir, weight: w, leaf_label: l.label });
    }
    TropicalCurve::new(n, vertices, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{Port, TreeTopology};

    fn iv(c: &[i64]) -> IntVector {
        IntVector::from_i64s(c).unwrap()
    }

    fn tripod(d: [[i64; 3]; 3]) -> Skeleton {
        let degree = ToricDegree { vectors: d.iter().map(|v| iv(v)).collect() };
        internal_directions_from_leaves(&TreeTopology::tripod(), &degree).unwrap()
    }

    fn exa8() -> (Skeleton, Vec<IntVector>) {
        (
            tripod([[-1, 0, 0], [0, -1, 0], [1, 1, 0]]),
            vec![iv(&[0, 1, 2]), iv(&[1, 0, 3]), iv(&[0, 1, 5])],
        )
    }

    #[test]
    fn momenta_examples() {
        assert_eq!(leaf_momentum(&iv(&[-1, 0, 0]), &iv(&[0, 1, 2])).unwrap().vector, iv(&[0, 2, -1]));
        assert_eq!(leaf_momentum(&iv(&[0, -1, 0]), &iv(&[1, 0, 3])).unwrap().vector, iv(&[-3, 0, 1]));
        assert!(leaf_momentum(&iv(&[1, 0, 0]), &iv(&[1, 0, 0])).unwrap().is_zero());
        let r1 = RotationalMomentum::new(iv(&[0, 2, -1]));
        let r2 = RotationalMomentum::new(iv(&[-3, 0, 1]));
        let p = propagate(&r1, &r2, &iv(&[1, 1, 0])).unwrap();
        assert_eq!(p.vector, iv(&[-6, 6, -1]));
        let q = propagate(&r2, &r1, &iv(&[1, 1, 0])).unwrap();
        assert_eq!(q.vector, p.vector.neg());
        assert_eq!((q.n, q.primitive_part), (p.n, p.primitive_part));
    }

    #[test]
    fn pairing_examples() {
        let a = RotationalMomentum::new(iv(&[-6, 6, -1]));
        let b = RotationalMomentum::new(iv(&[5, -5, 1]));
        assert_eq!(pairing_coefficient(&a, &b, &iv(&[1, 1, 0])).unwrap(), BigInt::one());
        for (p, q) in [(5, 2), (7, 3)] {
            let a = RotationalMomentum::new(iv(&[0, 1, 0]));
            let b = RotationalMomentum::new(iv(&[-p, -q, 0]));
            assert_eq!(pairing_coefficient(&a, &b, &iv(&[0, 0, 1])).unwrap(), BigInt::from(p));
        }
        let a = RotationalMomentum::new(iv(&[1, 2, 3]));
        assert_eq!(pairing_coefficient(&a, &a, &iv(&[0, 0, 1])).unwrap(), BigInt::zero());
        let c = RotationalMomentum::new(iv(&[0, 0, 1]));
        assert_eq!(
            pairing_coefficient(&a, &c, &iv(&[0, 0, 1])).unwrap_err().code(),
            "INCONSISTENT_MOMENTA"
        );
    }

    #[test]
    fn exa8_every_root() {
        let (s, z) = exa8();
        for r in all_roots(&s) {
            assert_eq!(mixed_h_product(&s, &z, Some(r)).unwrap(), BigInt::one(), "{r:?}");
        }
        let ev = ev_matrix_from_z(&s, &z, 0).unwrap();
        assert_eq!(multiplicity_det(&ev).unwrap().value, BigInt::one());
    }

    #[test]
    fn l12_product() {
        let s = tripod([[0, -1, -1], [1, 1, -1], [-1, 0, 2]]);
        let z = vec![iv(&[1, 0, 0]), iv(&[1, -1, 0]), iv(&[0, 1, -1])];
        assert_eq!(mixed_h_product(&s, &z, None).unwrap(), BigInt::from(4));
        let ev = ev_matrix_from_z(&s, &z, 0).unwrap();
        assert_eq!(multiplicity_det(&ev).unwrap().value, BigInt::from(4));
    }

    #[test]
    fn split_on_caterpillar() {
        let degree = ToricDegree {
            vectors: vec![iv(&[1, 0, 2]), iv(&[0, 1, -1]), iv(&[-1, 1, 0]), iv(&[0, -2, -1])],
        };
        let topo = TreeTopology {
            nodes: 2,
            edges: vec![
                (Port::Node(0), Port::Node(1)),
                (Port::Node(0), Port::Leaf(0)),
                (Port::Node(0), Port::Leaf(1)),
                (Port::Node(1), Port::Leaf(2)),
                (Port::Node(1), Port::Leaf(3)),
            ],
        };
        let s = internal_directions_from_leaves(&topo, &degree).unwrap();
        let z = vec![iv(&[0, 1, 1]), iv(&[1, 0, 2]), iv(&[2, 1, 0]), iv(&[1, 1, 1])];
        let r = splitting_check(&s, &z, 0).unwrap();
        assert!(r.holds, "{r:?}");
        assert_eq!(r.lhs, mixed_h_product(&s, &z, None).unwrap());
        let ev = ev_matrix_from_z(&s, &z, 0).unwrap();
        assert_eq!(multiplicity_det(&ev).unwrap().value, r.lhs);
    }

    #[test]
    fn euclidean_split_lines_fail_the_identity() {
        // Lines parallel to rho(r1) and rho(r1) x dh(r1), taken literally.
        let degree = ToricDegree {
            vectors: vec![iv(&[1, 0, 2]), iv(&[0, 1, -1]), iv(&[-1, 1, 0]), iv(&[0, -2, -1])],
        };
        let topo = TreeTopology {
            nodes: 2,
            edges: vec![
                (Port::Node(0), Port::Node(1)),
                (Port::Node(0), Port::Leaf(0)),
                (Port::Node(0), Port::Leaf(1)),
                (Port::Node(1), Port::Leaf(2)),
                (Port::Node(1), Port::Leaf(3)),
            ],
        };
        let s = internal_directions_from_leaves(&topo, &degree).unwrap();
        let z = vec![iv(&[0, 1, 1]), iv(&[1, 0, 2]), iv(&[2, 1, 0]), iv(&[1, 1, 1])];
        let m = mixed_h_product(&s, &z, None).unwrap();
        let d = s.edges[0].vector.clone();
        let rho = incoming_momentum(&s, &z, s.edges[0].b, Slot::Edge(0)).unwrap().vector;
        let (_, za) = gcd_primitive(&rho);
        let (_, zb) = gcd_primitive(&cross(&rho, &d).unwrap());
        let (h1, h2) = split_skeleton(&s, 0).unwrap();
        let pick = |p: &SplitPart, extra: &IntVector| -> Vec<IntVector> {
            p.origin.iter().map(|o| o.map_or_else(|| extra.clone(), |j| z[j].clone())).collect()
        };
        let m1 = mixed_h_product(&h1.skeleton, &pick(&h1, &za), None).unwrap();
        let m2 = mixed_h_product(&h2.skeleton, &pick(&h2, &zb), None).unwrap();
        assert_ne!(m1 * m2, m * d.content());
    }

    #[test]
    fn kappa_cap() {
        let degree = ToricDegree { vectors: vec![iv(&[1, 0, 0]); 9] };
        let lines = LineConfiguration { lines: vec![] };
        let err = enumerate_count(&degree, &lines, None, DEFAULT_KAPPA_CAP).unwrap_err();
        assert_eq!(err.code(), "KAPPA_CAP");
    }
}
