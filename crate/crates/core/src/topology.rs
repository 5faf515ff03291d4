//! Topology of the Lagrangians lifted from even primitive curves: surface
//! reports in dimension 2, first homology orders and lens spaces in
//! dimension 3, and the decomposition into pieces.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::curve::{edge_meeting, shared_vertices, EdgeMeeting, Skeleton, Slot, TropicalCurve};
use crate::domain::{
    boundary_edge_direction, check_even_primitive, classify_point, validate_delzant, LineConfiguration, PointKind,
    PolyhedralDomain,
};
use crate::error::{Error, Result};
use crate::lattice::{
    cross, det2, ext_gcd, gcd_primitive, lattice_index, rank, reduce_row, serialize_int, IntVector, RationalVector,
};
use crate::multiplicity::{
    incoming_momentum, leaf_momentum, line_directions, mixed_h_product, pairing_coefficient, root_edge_momentum,
    RotationalMomentum,
};

/// Index of the lattice spanned by two independent vectors among `vecs`.
pub fn index_of_pair(vecs: &[IntVector]) -> Option<BigInt> {
    for i in 0..vecs.len() {
        for j in i + 1..vecs.len() {
            let pair = [vecs[i].clone(), vecs[j].clone()];
            if rank(&pair) == 2 {
                return lattice_index(&pair).ok();
            }
        }
    }
    None
}

/// Lattice index of two weighted edge vectors at a 3-valent vertex.
pub fn vertex_multiplicity(c: &TropicalCurve, v: usize) -> Result<BigInt> {
    let inc = c.incident(v);
    let id = &c.vertices()[v].id;
    if inc.len() != 3 {
        return Err(Error::NotTrivalent { vertex: id.clone(), valence: inc.len() });
    }
    let vecs: Vec<IntVector> = inc.iter().map(|&e| c.outward_dir(e, v).scale(&c.edges()[e].weight)).collect();
    index_of_pair(&vecs).ok_or_else(|| Error::DegenerateVertex(id.clone()))
}

pub fn node_multiplicity(s: &Skeleton, node: usize) -> Result<BigInt> {
    let vecs: Vec<IntVector> = s.slots(node).iter().map(|&t| s.outward(node, t)).collect();
    index_of_pair(&vecs).ok_or_else(|| Error::DegenerateVertex(s.node_ids[node].clone()))
}

/// Interior lattice points of the triangle with edge vectors `u` (rotated), by Pick.
pub fn pick_interior(u: &[IntVector; 3]) -> Result<BigInt> {
    let twice_area = det2(&u[0], &u[1])?.abs();
    if twice_area.is_zero() {
        return Err(Error::Degenerate("dual triangle has zero area".into()));
    }
    let boundary: BigInt = u.iter().map(IntVector::content).sum();
    // A - B/2 + 1 with A = twice_area / 2
    let twice = &twice_area - &boundary + BigInt::from(2);
    Ok(twice / 2)
}

/// Nodes contributed by a vertex: interior points of its dual triangle.
pub fn dual_vertex_delta(c: &TropicalCurve, v: usize) -> Result<BigInt> {
    if c.dim() != 2 {
        return Err(Error::InvalidInput("dual triangles need a planar curve".into()));
    }
    let inc = c.incident(v);
    if inc.len() != 3 {
        return Err(Error::NotTrivalent { vertex: c.vertices()[v].id.clone(), valence: inc.len() });
    }
    let rot = |x: IntVector| {
        let k = x.coords();
        IntVector::new(vec![-k[1].clone(), k[0].clone()]).expect("planar")
    };
    let u: Vec<IntVector> = inc.iter().map(|&e| rot(c.outward_dir(e, v).scale(&c.edges()[e].weight))).collect();
    pick_interior(&[u[0].clone(), u[1].clone(), u[2].clone()])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Crossing {
    pub edges: [usize; 2],
    pub point: RationalVector,
    #[serde(serialize_with = "serialize_int")]
    pub weight: BigInt,
}

/// Transverse crossings of distinct edges of a planar curve.
pub fn self_intersections(c: &TropicalCurve) -> Result<Vec<Crossing>> {
    if c.dim() != 2 {
        return Err(Error::InvalidInput("self-intersections are computed for planar curves".into()));
    }
    let m = c.edges().len();
    let mut out = Vec::new();
    for e in 0..m {
        for f in e + 1..m {
            match edge_meeting(c, e, f) {
                EdgeMeeting::Disjoint => {}
                EdgeMeeting::Overlap => return Err(Error::NonFiniteSigma(format!("edges {e} and {f} overlap"))),
                EdgeMeeting::Point(p) => {
                    let shared = shared_vertices(c, e, f);
                    if shared.iter().any(|&v| c.vertices()[v].pos == p) {
                        continue;
                    }
                    let weight = det2(&c.edges()[e].weighted(), &c.edges()[f].weighted())?.abs();
                    out.push(Crossing { edges: [e, f], point: p, weight });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WComponent {
    pub vertices: Vec<String>,
    pub heavy_edges: Vec<usize>,
    pub b1: usize,
    pub ends: usize,
    #[serde(serialize_with = "serialize_int")]
    pub delta: BigInt,
    pub vertex_deltas: BTreeMap<String, IntJsonOwned>,
}

/// Integer serialized like every other report integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntJsonOwned(pub BigInt);

impl Serialize for IntJsonOwned {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_int(&self.0, s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SurfaceReport {
    pub orientable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genus: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crosscaps: Option<usize>,
    pub punctures: usize,
    pub j: usize,
    pub b1: usize,
    pub components: Vec<WComponent>,
    pub crossings: Vec<Crossing>,
    pub other_crossings: Vec<Crossing>,
    #[serde(serialize_with = "serialize_int")]
    pub total_nodes: BigInt,
    pub euler_characteristic: i64,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn require_even(c: &TropicalCurve, d: &PolyhedralDomain, relaxed: bool) -> Result<crate::domain::EvenPrimitiveReport> {
    let r = check_even_primitive(c, d, relaxed);
    if !r.ok {
        let codes: Vec<String> = r.issues.iter().map(|i| format!("{} at {}", i.code, i.location)).collect();
        return Err(Error::NotEvenPrimitive(codes.join(", ")));
    }
    Ok(r)
}

/// Topological type and nodes of the Lagrangian surface over a planar curve.
pub fn surface_report(c: &TropicalCurve, d: &PolyhedralDomain, relaxed: bool) -> Result<SurfaceReport> {
    if c.dim() != 2 {
        return Err(Error::InvalidInput("surface reports need a planar curve".into()));
    }
    let even = require_even(c, d, relaxed)?;
    let j = even.count(PointKind::Momentum2);
    let corners = even.count(PointKind::Bissectrice);
    let punctures = c.edges().iter().filter(|e| e.head.is_none()).count();
    let b1 = c.b1();
    let nodes = c.nodes();

    // W: vertices of valence 3 together with the edges of weight > 1.
    let nv = c.vertices().len();
    let mut in_w = vec![false; nv];
    for &v in &nodes {
        in_w[v] = true;
    }
    let heavy: Vec<usize> = (0..c.edges().len()).filter(|&e| !c.edges()[e].weight.is_one()).collect();
    let mut parent: Vec<usize> = (0..nv).collect();
    for &e in &heavy {
        let edge = &c.edges()[e];
        in_w[edge.tail] = true;
        if let Some(h) = edge.head {
            in_w[h] = true;
            let (a, b) = (find(&mut parent, edge.tail), find(&mut parent, h));
            parent[a] = b;
        }
    }
    let mut comp_of: Vec<Option<usize>> = vec![None; nv];
    let mut roots: Vec<usize> = Vec::new();
    for v in 0..nv {
        if in_w[v] {
            let r = find(&mut parent, v);
            let k = roots.iter().position(|&x| x == r).unwrap_or_else(|| {
                roots.push(r);
                roots.len() - 1
            });
            comp_of[v] = Some(k);
        }
    }
    // components touched by each edge
    let edge_comps = |e: usize| -> Vec<usize> {
        let edge = &c.edges()[e];
        let mut ks: Vec<usize> = std::iter::once(edge.tail).chain(edge.head).filter_map(|v| comp_of[v]).collect();
        ks.sort_unstable();
        ks.dedup();
        ks
    };

    let all = self_intersections(c)?;
    let mut components: Vec<WComponent> = (0..roots.len())
        .map(|_| WComponent {
            vertices: Vec::new(),
            heavy_edges: Vec::new(),
            b1: 0,
            ends: 0,
            delta: BigInt::zero(),
            vertex_deltas: BTreeMap::new(),
        })
        .collect();
    for (v, comp) in comp_of.iter().enumerate() {
        if let &Some(k) = comp {
            components[k].vertices.push(c.vertices()[v].id.clone());
            if c.valence(v) == 3 {
                let dv = dual_vertex_delta(c, v)?;
                components[k].delta += &dv;
                components[k].vertex_deltas.insert(c.vertices()[v].id.clone(), IntJsonOwned(dv));
            }
        }
    }
    for &e in &heavy {
        let k = comp_of[c.edges()[e].tail].expect("in W");
        components[k].heavy_edges.push(e);
        components[k].delta += &c.edges()[e].weight - BigInt::one();
    }
    for (e, edge) in c.edges().iter().enumerate() {
        if heavy.contains(&e) {
            continue;
        }
        for v in std::iter::once(edge.tail).chain(edge.head) {
            if let Some(k) = comp_of[v] {
                components[k].ends += 1;
            }
        }
    }
    for comp in components.iter_mut() {
        comp.b1 = (comp.heavy_edges.len() + 1).saturating_sub(comp.vertices.len());
    }
    let mut crossings = Vec::new();
    let mut other_crossings = Vec::new();
    for x in all {
        let a = edge_comps(x.edges[0]);
        let b = edge_comps(x.edges[1]);
        match a.iter().find(|k| b.contains(k)) {
            Some(&k) => {
                components[k].delta += &x.weight;
                crossings.push(x);
            }
            None => other_crossings.push(x),
        }
    }
    let total_nodes = components.iter().map(|k| k.delta.clone()).sum();

    let orientable = j == 0;
    let (genus, crosscaps) = if orientable { (Some(b1), None) } else { (None, Some(j + 2 * b1)) };
    let euler_characteristic = corners as i64 - nodes.len() as i64;
    let expected = if orientable {
        2 - 2 * b1 as i64 - punctures as i64
    } else {
        2 - (j + 2 * b1) as i64 - punctures as i64
    };
    if euler_characteristic != expected {
        return Err(Error::InternalInconsistency(format!(
            "Euler characteristic {euler_characteristic} from pieces, {expected} from the surface type"
        )));
    }
    Ok(SurfaceReport {
        orientable,
        genus,
        crosscaps,
        punctures,
        j,
        b1,
        components,
        crossings,
        other_crossings,
        total_nodes,
        euler_characteristic,
    })
}

/// Source of the constraint directions at the leaves of a 3-dimensional curve.
#[derive(Clone, Copy, Debug)]
pub enum LeafConstraints<'a> {
    /// The boundary edge of the domain through each end.
    Domain(&'a PolyhedralDomain),
    /// The line through each leaf.
    Lines(&'a LineConfiguration),
}

/// Per-leaf line directions, checking that every leaf ends at a bissectrice point.
pub fn leaf_directions(c: &TropicalCurve, s: &Skeleton, src: LeafConstraints<'_>) -> Result<Vec<IntVector>> {
    if c.dim() != 3 {
        return Err(Error::InvalidInput("rotational momenta need dimension 3".into()));
    }
    if let Some(e) = c.edges().iter().position(|e| !e.weight.is_one()) {
        return Err(Error::NotEvenPrimitive(format!("edge {e} has weight {}", c.edges()[e].weight)));
    }
    let z = match src {
        LeafConstraints::Domain(d) => {
            require_even(c, d, false)?;
            let mut z = Vec::with_capacity(s.kappa());
            for (j, leaf) in s.leaves.iter().enumerate() {
                let end = leaf
                    .end
                    .as_ref()
                    .ok_or_else(|| Error::NotBoundaryConfig(format!("leaf {j} is unbounded")))?;
                let info = classify_point(d, end, &leaf.vector)?;
                if info.kind != PointKind::Bissectrice {
                    return Err(Error::NotBoundaryConfig(format!("end {end} is not a bissectrice point")));
                }
                z.push(boundary_edge_direction(d, &info).ok_or_else(|| {
                    Error::NotBoundaryConfig(format!("no boundary edge through {end}"))
                })?);
            }
            z
        }
        LeafConstraints::Lines(lines) => line_directions(s, lines)?,
    };
    for (j, (leaf, zj)) in s.leaves.iter().zip(&z).enumerate() {
        if !cross(&leaf.vector, zj)?.is_primitive() {
            return Err(Error::NotBoundaryConfig(format!("leaf {j}: {} x {zj} is not primitive", leaf.vector)));
        }
    }
    Ok(z)
}

/// Order of a first homology group, possibly infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum H1Order {
    Finite(BigInt),
    Infinite,
}

impl Serialize for H1Order {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            H1Order::Finite(n) => serialize_int(n, s),
            H1Order::Infinite => s.serialize_str("INFINITE_H1"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LeafDatum {
    pub leaf: usize,
    pub z: IntVector,
    pub rho: IntVector,
    #[serde(serialize_with = "serialize_int")]
    pub n: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EdgeTorsion {
    pub edge: usize,
    pub rho: IntVector,
    #[serde(serialize_with = "serialize_int")]
    pub n: BigInt,
    #[serde(serialize_with = "serialize_int")]
    pub mv: BigInt,
    #[serde(serialize_with = "serialize_int")]
    pub torsion: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RootEdge {
    pub rho: IntVector,
    #[serde(serialize_with = "serialize_int")]
    pub n: BigInt,
    #[serde(serialize_with = "serialize_int")]
    pub torsion_accumulated: BigInt,
    #[serde(serialize_with = "serialize_int")]
    pub gluing: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ThreeManifoldReport {
    pub h1_order: H1Order,
    #[serde(serialize_with = "serialize_int")]
    pub mv: BigInt,
    #[serde(serialize_with = "serialize_int")]
    pub product: BigInt,
    pub leaf_data: Vec<LeafDatum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root_edge: Option<RootEdge>,
    pub edge_torsion: Vec<EdgeTorsion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lrplus_order: Option<IntJsonOwned>,
    pub rational_homology_sphere: bool,
    pub deformation_stable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity_warning: Option<String>,
}

fn is_simplex3(d: &PolyhedralDomain) -> bool {
    d.dim() == 3 && d.facets().len() == 4 && validate_delzant(d).is_ok_and(|r| r.ok && r.bounded)
}

/// Torsion along the tree rooted at leaf 0: `n(e) / mv(e)` at every edge,
/// then the gluing coefficient at the root leaf.
fn lrplus(s: &Skeleton, z: &[IntVector], mults: &[BigInt]) -> Result<(Vec<EdgeTorsion>, RootEdge, BigInt)> {
    let r = s.leaves[0].node.expect("tree with nodes");
    // parent edge of every node, walking away from the root node
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; s.node_count()];
    let mut order = vec![r];
    let mut seen = vec![false; s.node_count()];
    seen[r] = true;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        for &t in s.slots(v) {
            if let Slot::Edge(e) = t {
                let w = s.across(e, v);
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((v, e));
                    order.push(w);
                }
            }
        }
    }
    let mut subtree_mv: Vec<BigInt> = mults.to_vec();
    for &v in order.iter().rev() {
        if let Some((p, _)) = parent[v] {
            let m = subtree_mv[v].clone();
            subtree_mv[p] *= m;
        }
    }
    let mut edges = Vec::new();
    for &v in &order {
        let Some((p, e)) = parent[v] else { continue };
        let rho = incoming_momentum(s, z, p, Slot::Edge(e))?;
        let mv = subtree_mv[v].clone();
        let (torsion, rem) = rho.n.div_rem(&mv);
        if !rem.is_zero() {
            return Err(Error::InternalInconsistency(format!("mv(e) = {mv} does not divide n(e) = {} at edge {e}", rho.n)));
        }
        edges.push(EdgeTorsion { edge: e, rho: rho.vector, n: rho.n, mv, torsion });
    }
    edges.sort_by_key(|t| t.edge);
    let re = root_edge_momentum(s, z, 0)?;
    let mv = subtree_mv[r].clone();
    let (torsion_accumulated, rem) = re.n.div_rem(&mv);
    if !rem.is_zero() {
        return Err(Error::InternalInconsistency(format!("mv = {mv} does not divide n(e_p) = {}", re.n)));
    }
    let rho_p = leaf_momentum(&s.leaves[0].vector, &z[0])?;
    let gluing = pairing_coefficient(&RotationalMomentum::new(re.primitive_part.clone()), &rho_p, &s.leaves[0].vector)?;
    let order_value = &torsion_accumulated * &gluing;
    Ok((edges, RootEdge { rho: re.vector, n: re.n, torsion_accumulated, gluing }, order_value))
}

/// Order of the first homology of the Lagrangian over a compact tree curve in dimension 3.
pub fn h1_order(c: &TropicalCurve, src: LeafConstraints<'_>) -> Result<ThreeManifoldReport> {
    let s = Skeleton::from_curve(c)?;
    s.require_trivalent()?;
    let z = leaf_directions(c, &s, src)?;
    let mut report = h1_from_skeleton(&s, &z)?;
    if let (LeafConstraints::Domain(d), H1Order::Finite(h1)) = (src, &report.h1_order) {
        if is_simplex3(d) && h1.is_odd() {
            report.parity_warning =
                Some(format!("order {h1} is odd; Lagrangians in a 3-simplex have even first homology order"));
        }
    }
    Ok(report)
}

/// [`h1_order`] on a skeleton with unit weights and one direction per leaf.
pub fn h1_from_skeleton(s: &Skeleton, z: &[IntVector]) -> Result<ThreeManifoldReport> {
    s.require_trivalent()?;
    if let Some(e) = s.edges.iter().position(|e| !e.vector.is_primitive()) {
        return Err(Error::NotEvenPrimitive(format!("edge {e} has weight {}", s.edges[e].vector.content())));
    }
    for (j, leaf) in s.leaves.iter().enumerate() {
        if !leaf.vector.is_primitive() {
            return Err(Error::NotEvenPrimitive(format!("leaf {j} has weight {}", leaf.weight())));
        }
        if let Some(zj) = z.get(j) {
            if !cross(&leaf.vector, zj)?.is_primitive() {
                return Err(Error::NotBoundaryConfig(format!("leaf {j}: {} x {zj} is not primitive", leaf.vector)));
            }
        }
    }
    let mults: Vec<BigInt> = (0..s.node_count()).map(|v| node_multiplicity(s, v)).collect::<Result<_>>()?;
    let mv: BigInt = mults.iter().product();
    let product = mixed_h_product(s, z, None)?;
    let leaf_data = s
        .leaves
        .iter()
        .zip(z)
        .enumerate()
        .map(|(j, (l, zj))| {
            leaf_momentum(&l.vector, zj).map(|r| LeafDatum { leaf: j, z: zj.clone(), rho: r.vector, n: r.n })
        })
        .collect::<Result<Vec<_>>>()?;
    if product.is_zero() {
        return Ok(ThreeManifoldReport {
            h1_order: H1Order::Infinite,
            mv,
            product,
            leaf_data,
            root_edge: None,
            edge_torsion: Vec::new(),
            lrplus_order: None,
            rational_homology_sphere: false,
            deformation_stable: false,
            parity_warning: None,
        });
    }
    let (h1, rem) = product.div_rem(&mv);
    if !rem.is_zero() {
        return Err(Error::InternalInconsistency(format!("mv = {mv} does not divide the product {product}")));
    }
    let (edge_torsion, root_edge, lr) = if s.node_count() == 0 {
        let a = leaf_momentum(&s.leaves[0].vector, &z[0])?;
        let b = leaf_momentum(&s.leaves[1].vector, &z[1])?;
        (Vec::new(), None, pairing_coefficient(&a, &b, &s.leaves[1].vector)?)
    } else {
        let (t, r, v) = lrplus(s, z, &mults)?;
        (t, Some(r), v)
    };
    if lr != h1 {
        return Err(Error::InternalInconsistency(format!("torsion recursion gives {lr}, product over mv gives {h1}")));
    }
    Ok(ThreeManifoldReport {
        h1_order: H1Order::Finite(h1),
        mv,
        product,
        leaf_data,
        root_edge,
        edge_torsion,
        lrplus_order: Some(IntJsonOwned(lr)),
        rational_homology_sphere: true,
        deformation_stable: true,
        parity_warning: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PieceKind {
    PantsBundle,
    SolidTorus,
    MoebiusPiece,
    DiskPiece,
    Annulus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Piece {
    pub kind: PieceKind,
    pub vertex: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<IntJsonOwned>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_class: Option<IntVector>,
    pub adjacent_tori: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Gluing {
    pub torus: usize,
    pub pieces: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PieceDecomposition {
    pub pieces: Vec<Piece>,
    pub gluing_graph: Vec<Gluing>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler_characteristic: Option<i64>,
}

/// Pieces over vertices and boundary points, glued along the tori over edges.
pub fn piece_decomposition(c: &TropicalCurve, src: LeafConstraints<'_>, relaxed: bool) -> Result<PieceDecomposition> {
    let n = c.dim();
    if n != 2 && n != 3 {
        return Err(Error::InvalidInput(format!("pieces are defined in dimensions 2 and 3, not {n}")));
    }
    let mut kind_at: BTreeMap<usize, (PieceKind, Option<IntVector>)> = BTreeMap::new();
    match src {
        LeafConstraints::Domain(d) => {
            let even = require_even(c, d, relaxed)?;
            for info in &even.boundary {
                let v = c.vertices().iter().position(|x| x.pos == info.point).expect("end vertex");
                let kind = match (info.kind, n) {
                    (PointKind::Momentum2, _) => PieceKind::MoebiusPiece,
                    (PointKind::Bissectrice, 2) => PieceKind::DiskPiece,
                    (PointKind::Bissectrice, _) => PieceKind::SolidTorus,
                    _ => return Err(Error::NotEvenPrimitive(format!("boundary point {}", info.point))),
                };
                let class = if kind == PieceKind::SolidTorus {
                    let e = c.incident(v)[0];
                    let dh = c.outward_dir(e, v).neg().scale(&c.edges()[e].weight);
                    let z = boundary_edge_direction(d, info)
                        .ok_or_else(|| Error::NotBoundaryConfig(format!("no boundary edge through {}", info.point)))?;
                    Some(leaf_momentum(&dh, &z)?.vector)
                } else {
                    None
                };
                kind_at.insert(v, (kind, class));
            }
        }
        LeafConstraints::Lines(_) => {
            if n != 3 {
                return Err(Error::InvalidInput("line constraints need dimension 3".into()));
            }
            let s = Skeleton::from_curve(c)?;
            let z = leaf_directions(c, &s, src)?;
            for (j, leaf) in s.leaves.iter().enumerate() {
                let Some(end) = &leaf.end else { continue };
                let v = c.vertices().iter().position(|x| &x.pos == end).expect("end vertex");
                kind_at.insert(v, (PieceKind::SolidTorus, Some(leaf_momentum(&leaf.vector, &z[j])?.vector)));
            }
        }
    }

    let mut pieces = Vec::new();
    let mut piece_of = vec![usize::MAX; c.vertices().len()];
    for (v, vert) in c.vertices().iter().enumerate() {
        let piece = if c.valence(v) == 3 {
            let delta = if n == 2 { Some(IntJsonOwned(dual_vertex_delta(c, v)?)) } else { None };
            Piece { kind: PieceKind::PantsBundle, vertex: vert.id.clone(), delta, kernel_class: None, adjacent_tori: vec![] }
        } else if let Some((kind, class)) = kind_at.get(&v) {
            Piece { kind: *kind, vertex: vert.id.clone(), delta: None, kernel_class: class.clone(), adjacent_tori: vec![] }
        } else {
            return Err(Error::InvalidInput(format!("vertex {} is neither a node nor a boundary point", vert.id)));
        };
        piece_of[v] = pieces.len();
        pieces.push(piece);
    }
    let mut gluing_graph = Vec::new();
    for (e, edge) in c.edges().iter().enumerate() {
        let a = piece_of[edge.tail];
        let b = match edge.head {
            Some(h) => piece_of[h],
            None => {
                pieces.push(Piece {
                    kind: PieceKind::Annulus,
                    vertex: format!("{}+", c.vertices()[edge.tail].id),
                    delta: None,
                    kernel_class: None,
                    adjacent_tori: vec![],
                });
                pieces.len() - 1
            }
        };
        pieces[a].adjacent_tori.push(e);
        pieces[b].adjacent_tori.push(e);
        gluing_graph.push(Gluing { torus: e, pieces: [a, b] });
    }
    let euler_characteristic = (n == 2).then(|| {
        let count = |k: PieceKind| pieces.iter().filter(|p| p.kind == k).count() as i64;
        count(PieceKind::DiskPiece) - count(PieceKind::PantsBundle)
    });
    Ok(PieceDecomposition { pieces, gluing_graph, euler_characteristic })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LensParameters {
    #[serde(serialize_with = "serialize_int")]
    pub p: BigInt,
    #[serde(serialize_with = "serialize_int")]
    pub q: BigInt,
    #[serde(serialize_with = "serialize_int")]
    pub q_canonical: BigInt,
}

/// Smallest representative of `{q, -q, q^-1, -q^-1}` mod `p`.
pub fn canonical_q(p: &BigInt, q: &BigInt) -> BigInt {
    if p.is_one() {
        return BigInt::zero();
    }
    let q = q.mod_floor(p);
    let mut best = std::cmp::min(q.clone(), (-&q).mod_floor(p));
    let (g, x, _) = ext_gcd(&q, p);
    if g.is_one() {
        let inv = x.mod_floor(p);
        best = best.min(inv.clone()).min((-inv).mod_floor(p));
    }
    best
}

/// Lens space glued from two solid tori with kernel classes `a`, `b` in `d^perp`.
pub fn lens_from_classes(a: &IntVector, b: &IntVector, d: &IntVector) -> Result<LensParameters> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::Degenerate("zero kernel class".into()));
    }
    if !a.dot(d).is_zero() || !b.dot(d).is_zero() {
        return Err(Error::InconsistentMomenta("kernel classes are not orthogonal to the edge".into()));
    }
    if !a.is_primitive() {
        return Err(Error::NoBasis(format!("kernel class {a} is not primitive")));
    }
    let (_, u) = gcd_primitive(d);
    // basis (v1, v2) of u^perp
    let (_, v) = reduce_row(&u);
    let v1 = IntVector::new(v.column(1))?;
    let v2 = IntVector::new(v.column(2))?;
    let coords = |x: &IntVector| -> Result<(BigInt, BigInt)> {
        // x = s v1 + t v2, read off from x x v2 = s (v1 x v2) and v1 x x = t (v1 x v2)
        let n = cross(&v1, &v2)?;
        let s = cross(x, &v2)?.dot(&n) / n.dot(&n);
        let t = cross(&v1, x)?.dot(&n) / n.dot(&n);
        Ok((s, t))
    };
    let (alpha, beta) = coords(a)?;
    let (_, sx, sy) = ext_gcd(&alpha, &beta);
    let mut c = v1.scale(&-sy).add(&v2.scale(&sx));
    let ac = cross(a, &c)?;
    if ac == u.neg() {
        c = c.neg();
    } else if ac != u {
        return Err(Error::InternalInconsistency("no basis of the edge lattice".into()));
    }
    // b = x a + y c with a x c = u
    let mut y = cross(a, b)?.dot(&u) / u.dot(&u);
    let mut x = cross(b, &c)?.dot(&u) / u.dot(&u);
    if a.scale(&x).add(&c.scale(&y)) != *b {
        return Err(Error::InternalInconsistency("kernel class outside the edge lattice".into()));
    }
    if y.is_negative() {
        x = -x;
        y = -y;
    }
    let p = y;
    if p.is_zero() {
        return Err(Error::Degenerate("kernel classes are parallel".into()));
    }
    let q = x.mod_floor(&p);
    let q_canonical = canonical_q(&p, &q);
    Ok(LensParameters { p, q, q_canonical })
}

/// Lens space over a single bounded edge with two bissectrice ends.
pub fn lens_parameters(c: &TropicalCurve, src: LeafConstraints<'_>) -> Result<LensParameters> {
    let s = Skeleton::from_curve(c)?;
    if s.node_count() != 0 || s.kappa() != 2 || s.leaves.iter().any(|l| l.end.is_none()) {
        return Err(Error::InvalidInput("lens spaces come from a single bounded edge".into()));
    }
    let z = leaf_directions(c, &s, src)?;
    let a = leaf_momentum(&s.leaves[0].vector, &z[0])?.vector;
    let b = leaf_momentum(&s.leaves[1].vector, &z[1])?.vector;
    lens_from_classes(&a, &b, &s.leaves[1].vector)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(c: &[i64]) -> IntVector {
        IntVector::from_i64s(c).unwrap()
    }

    #[test]
    fn pick_examples() {
        let d = |a: &[i64], b: &[i64], c: &[i64]| pick_interior(&[iv(a), iv(b), iv(c)]).unwrap();
        assert_eq!(d(&[1, 1], &[-3, 2], &[2, -3]), BigInt::from(2));
        assert_eq!(d(&[-1, -2], &[2, 1], &[-1, 1]), BigInt::one());
        assert_eq!(d(&[0, 1], &[-1, 0], &[1, -1]), BigInt::zero());
        assert!(pick_interior(&[iv(&[1, 1]), iv(&[2, 2]), iv(&[-3, -3])]).is_err());
    }

    #[test]
    fn lens_examples() {
        for (p, q, canon) in [(1, 0, 0), (2, 1, 1), (5, 2, 2), (5, 3, 2), (7, 3, 2)] {
            let d = iv(&[0, 0, 1]);
            let a = cross(&d.neg(), &iv(&[1, 0, 0])).unwrap();
            let b = cross(&d, &iv(&[-q, p, 0])).unwrap();
            let l = lens_from_classes(&a, &b, &d).unwrap();
            assert_eq!(l.p, BigInt::from(p));
            assert_eq!(l.q_canonical, BigInt::from(canon), "({p},{q})");
        }
    }

    #[test]
    fn canonical_q_orbits() {
        let p = BigInt::from(11);
        for q in 1..11 {
            let c = canonical_q(&p, &BigInt::from(q));
            let inv = (1..11).find(|x| (x * q) % 11 == 1).unwrap();
            let orbit = [q, 11 - q, inv, 11 - inv];
            assert_eq!(c, BigInt::from(*orbit.iter().min().unwrap()));
        }
    }
}
