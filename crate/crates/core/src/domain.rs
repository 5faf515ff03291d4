//! Polyhedral domains, boundary strata, boundary-point classification,
//! wave fronts, and boundary line configurations.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::curve::{
    edge_meeting, shared_vertices, validate_curve, Edge, EdgeMeeting, Skeleton, TropicalCurve, Vertex,
};
use crate::error::{Error, Issue, Result, ValidationReport};
use crate::halfspace::{feasible, Constraint, Relation};
use crate::lattice::{
    cross, format_rational, gcd_primitive, lattice_index, mixed, normalize_sign, primitive_direction,
    rank, serialize_rational, solve_exact, unit_pairing_vector, IntVector, RationalMatrix,
    RationalVector, SolveOutcome,
};

/// Half-space `normal . x >= offset`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Facet {
    pub normal: IntVector,
    #[serde(serialize_with = "serialize_rational")]
    pub offset: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyhedralDomain {
    dim: usize,
    facets: Vec<Facet>,
}

fn int_row(v: &IntVector) -> Vec<BigRational> {
    v.coords().iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

impl PolyhedralDomain {
    pub fn new(dim: usize, facets: Vec<Facet>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidInput(format!("domain dimension {dim} < 2")));
        }
        for (i, f) in facets.iter().enumerate() {
            if f.normal.dim() != dim {
                return Err(Error::InvalidInput(format!("facet {i} normal has dimension {}", f.normal.dim())));
            }
            if !f.normal.is_primitive() {
                return Err(Error::InvalidInput(format!("facet {i} normal {} is not primitive", f.normal)));
            }
        }
        Ok(PolyhedralDomain { dim, facets })
    }

    /// `{x : x_i >= 0, -sum x_i >= -1}`.
    pub fn standard_simplex(dim: usize) -> Self {
        let mut facets: Vec<Facet> = (0..dim)
            .map(|i| {
                let mut n = vec![BigInt::zero(); dim];
                n[i] = BigInt::one();
                Facet { normal: IntVector::new(n).unwrap(), offset: BigRational::zero() }
            })
            .collect();
        facets.push(Facet {
            normal: IntVector::new(vec![-BigInt::one(); dim]).unwrap(),
            offset: -BigRational::one(),
        });
        PolyhedralDomain { dim, facets }
    }

    /// The positive orthant.
    pub fn orthant(dim: usize) -> Self {
        let mut d = Self::standard_simplex(dim);
        d.facets.pop();
        d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn slack(&self, i: usize, x: &RationalVector) -> BigRational {
        x.dot_int(&self.facets[i].normal) - &self.facets[i].offset
    }

    pub fn contains(&self, x: &RationalVector) -> bool {
        (0..self.facets.len()).all(|i| !self.slack(i, x).is_negative())
    }

    pub fn active_facets(&self, x: &RationalVector) -> Vec<usize> {
        (0..self.facets.len()).filter(|&i| self.slack(i, x).is_zero()).collect()
    }

    fn stratum_constraints(&self, active: &[usize]) -> Vec<Constraint> {
        self.facets
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let rel = if active.contains(&i) { Relation::Eq } else { Relation::Gt };
                Constraint::new(int_row(&f.normal), rel, f.offset.clone())
            })
            .collect()
    }

    /// Whether the points with exactly the facets `active` tight exist.
    pub fn stratum_nonempty(&self, active: &[usize]) -> bool {
        feasible(self.dim, &self.stratum_constraints(active))
    }

    pub fn is_empty(&self) -> bool {
        let cs: Vec<Constraint> = self
            .facets
            .iter()
            .map(|f| Constraint::new(int_row(&f.normal), Relation::Ge, f.offset.clone()))
            .collect();
        !feasible(self.dim, &cs)
    }

    /// Nonempty strata, as sorted active sets.
    pub fn strata(&self) -> Vec<Vec<usize>> {
        let m = self.facets.len();
        assert!(m < 24, "too many facets for stratum enumeration");
        let mut out = Vec::new();
        for mask in 0u32..(1 << m) {
            let s: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
            if s.len() > self.dim + 1 {
                continue;
            }
            if self.stratum_nonempty(&s) {
                out.push(s);
            }
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        out
    }

    /// Bounded iff the recession cone `{x : normal . x >= 0}` is zero.
    pub fn is_bounded(&self) -> bool {
        let base: Vec<Constraint> = self
            .facets
            .iter()
            .map(|f| Constraint::new(int_row(&f.normal), Relation::Ge, BigRational::zero()))
            .collect();
        for k in 0..self.dim {
            for sign in [1i64, -1] {
                let mut e = vec![BigRational::zero(); self.dim];
                e[k] = BigRational::from_integer(BigInt::from(sign));
                let mut cs = base.clone();
                cs.push(Constraint::new(e, Relation::Gt, BigRational::zero()));
                if feasible(self.dim, &cs) {
                    return false;
                }
            }
        }
        true
    }

    /// The same normals with every offset moved by `delta`.
    pub fn shifted(&self, delta: &BigRational) -> Self {
        PolyhedralDomain {
            dim: self.dim,
            facets: self
                .facets
                .iter()
                .map(|f| Facet { normal: f.normal.clone(), offset: &f.offset + delta })
                .collect(),
        }
    }

    /// The unique point where the facets in `active` are tight, if determined.
    pub fn stratum_point(&self, active: &[usize]) -> Option<RationalVector> {
        let rows: Vec<BigRational> = active.iter().flat_map(|&i| int_row(&self.facets[i].normal)).collect();
        let m = RationalMatrix::new(active.len(), self.dim, rows).ok()?;
        let rhs: Vec<BigRational> = active.iter().map(|&i| self.facets[i].offset.clone()).collect();
        match solve_exact(&m, &rhs).ok()?.outcome {
            SolveOutcome::Unique(x) => RationalVector::new(x).ok(),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StratumIssue {
    pub facets: Vec<usize>,
    pub problem: String,
    #[serde(serialize_with = "crate::lattice::serialize_int")]
    pub index: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DelzantReport {
    pub ok: bool,
    pub bounded: bool,
    pub strata_checked: usize,
    pub offending: Vec<StratumIssue>,
}

/// Delzant test: at every nonempty stratum the active normals are linearly
/// independent and generate a saturated sublattice; every facet supports a face.
pub fn validate_delzant(d: &PolyhedralDomain) -> Result<DelzantReport> {
    if d.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let strata = d.strata();
    let mut offending = Vec::new();
    for i in 0..d.facets.len() {
        if !strata.iter().any(|s| s == &[i]) {
            offending.push(StratumIssue { facets: vec![i], problem: "REDUNDANT_FACET".into(), index: BigInt::zero() });
        }
    }
    for s in &strata {
        if s.is_empty() {
            continue;
        }
        let normals: Vec<IntVector> = s.iter().map(|&i| d.facets[i].normal.clone()).collect();
        if s.len() > d.dim || rank(&normals) < s.len() {
            offending.push(StratumIssue { facets: s.clone(), problem: "NON_SIMPLE".into(), index: BigInt::zero() });
            continue;
        }
        let idx = lattice_index(&normals)?;
        if !idx.is_one() {
            offending.push(StratumIssue { facets: s.clone(), problem: "NOT_SATURATED".into(), index: idx });
        }
    }
    Ok(DelzantReport {
        ok: offending.is_empty(),
        bounded: d.is_bounded(),
        strata_checked: strata.len(),
        offending,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PointKind {
    Interior,
    Momentum2,
    Bissectrice,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FacetMomentum {
    pub facet: usize,
    #[serde(serialize_with = "crate::lattice::serialize_int")]
    pub momentum: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundaryPointInfo {
    pub point: RationalVector,
    pub active_facets: Vec<usize>,
    pub codim: usize,
    pub momenta: Vec<FacetMomentum>,
    pub kind: PointKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl BoundaryPointInfo {
    pub fn momentum(&self, facet: usize) -> Option<&BigInt> {
        self.momenta.iter().find(|m| m.facet == facet).map(|m| &m.momentum)
    }
}

/// Classifies the point where an edge with weighted vector `dh` meets the boundary.
pub fn classify_point(d: &PolyhedralDomain, point: &RationalVector, dh: &IntVector) -> Result<BoundaryPointInfo> {
    let active = d.active_facets(point);
    if active.is_empty() {
        return Err(Error::Interior(point.to_string()));
    }
    let normals: Vec<IntVector> = active.iter().map(|&i| d.facets[i].normal.clone()).collect();
    let k = rank(&normals);
    let momenta: Vec<FacetMomentum> = active
        .iter()
        .map(|&i| FacetMomentum { facet: i, momentum: d.facets[i].normal.dot(dh).abs() })
        .collect();
    let weight = dh.content();
    let mut diagnostic = None;
    let kind = if k == 1 && active.len() == 1 && momenta[0].momentum == BigInt::from(2) && weight.is_one() {
        PointKind::Momentum2
    } else if k == 2 && active.len() == 2 && momenta.iter().all(|m| m.momentum.is_one()) {
        if d.dim == 3 {
            let z = cross(&normals[0], &normals[1])?;
            let (_, z) = gcd_primitive(&z);
            if cross(dh, &z)?.is_primitive() {
                PointKind::Bissectrice
            } else {
                diagnostic = Some("no corner basis for the edge direction".into());
                PointKind::Other
            }
        } else {
            PointKind::Bissectrice
        }
    } else {
        if k > 2 {
            diagnostic = Some(format!("point lies on a stratum of codimension {k}"));
        }
        PointKind::Other
    };
    Ok(BoundaryPointInfo { point: point.clone(), active_facets: active, codim: k, momenta, kind, diagnostic })
}

/// Classifies the end of `c` located at `point`.
pub fn classify_boundary_point(
    c: &TropicalCurve,
    d: &PolyhedralDomain,
    point: &RationalVector,
) -> Result<BoundaryPointInfo> {
    let v = c
        .vertices()
        .iter()
        .position(|v| &v.pos == point)
        .ok_or_else(|| Error::InvalidInput(format!("{point} is not a vertex of the curve")))?;
    let inc = c.incident(v);
    if inc.len() != 1 {
        return Err(Error::InvalidInput(format!("{point} is not an end of the curve")));
    }
    let e = inc[0];
    // edge vector pointing into the boundary point
    let dh = c.outward_dir(e, v).neg().scale(&c.edges()[e].weight);
    classify_point(d, point, &dh)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EvenPrimitiveReport {
    pub ok: bool,
    pub relaxed: bool,
    pub issues: Vec<Issue>,
    pub boundary: Vec<BoundaryPointInfo>,
}

impl EvenPrimitiveReport {
    pub fn count(&self, kind: PointKind) -> usize {
        self.boundary.iter().filter(|b| b.kind == kind).count()
    }

    pub fn validation(&self) -> ValidationReport {
        ValidationReport { ok: self.ok, issues: self.issues.clone() }
    }
}

/// Even-primitive test for a curve clipped to a domain.
///
/// In relaxed mode, edges of weight > 1 are allowed when they avoid the boundary.
pub fn check_even_primitive(c: &TropicalCurve, d: &PolyhedralDomain, relaxed: bool) -> EvenPrimitiveReport {
    let mut issues = validate_curve(c).issues;
    match validate_delzant(d) {
        Ok(r) if r.ok => {}
        Ok(r) => issues.push(Issue::new(
            "NOT_DELZANT",
            "domain",
            format!("{} offending strata", r.offending.len()),
        )),
        Err(e) => issues.push(Issue::new(e.code(), "domain", e.to_string())),
    }
    if c.dim() != d.dim() {
        issues.push(Issue::new("DIMENSION_MISMATCH", "domain", "curve and domain dimensions differ"));
        return EvenPrimitiveReport { ok: false, relaxed, issues, boundary: Vec::new() };
    }

    let on_boundary = |x: &RationalVector| !d.active_facets(x).is_empty();
    for v in c.vertices() {
        if !d.contains(&v.pos) {
            issues.push(Issue::new("OUTSIDE_DOMAIN", format!("vertex {}", v.id), format!("{} is outside the domain", v.pos)));
        }
    }
    for (i, e) in c.edges().iter().enumerate() {
        if e.head.is_none() {
            for (k, f) in d.facets().iter().enumerate() {
                if f.normal.dot(&e.dir).is_negative() {
                    issues.push(Issue::new("LEAF_EXITS", format!("edge {i}"), format!("ray leaves the domain through facet {k}")));
                }
            }
        }
        if !e.weight.is_one() {
            let touches = on_boundary(&c.vertices()[e.tail].pos)
                || e.head.is_some_and(|h| on_boundary(&c.vertices()[h].pos));
            if !relaxed || touches {
                issues.push(Issue::new("WEIGHT", format!("edge {i}"), format!("weight {}", e.weight)));
            }
        }
    }

    let mut boundary = Vec::new();
    let mut end_vertices = Vec::new();
    for (v, vert) in c.vertices().iter().enumerate() {
        let inc = c.incident(v);
        let loc = format!("vertex {}", vert.id);
        match inc.len() {
            1 => {
                end_vertices.push(v);
                match classify_boundary_point(c, d, &vert.pos) {
                    Ok(info) => {
                        if !matches!(info.kind, PointKind::Momentum2 | PointKind::Bissectrice) {
                            issues.push(Issue::new(
                                "BOUNDARY_KIND",
                                &loc,
                                format!("boundary point {} is neither momentum 2 nor bissectrice", vert.pos),
                            ));
                        }
                        boundary.push(info);
                    }
                    Err(Error::Interior(_)) => {
                        issues.push(Issue::new("END_NOT_ON_BOUNDARY", &loc, format!("{} is interior", vert.pos)))
                    }
                    Err(e) => issues.push(Issue::new(e.code(), &loc, e.to_string())),
                }
            }
            3 => {
                let vecs: Vec<IntVector> = inc.iter().map(|&e| c.outward_dir(e, v)).collect();
                if rank(&vecs) != 2 {
                    issues.push(Issue::new("VERTEX_SPAN", &loc, "edges do not span a 2-plane"));
                }
                if on_boundary(&vert.pos) {
                    issues.push(Issue::new("VERTEX_ON_BOUNDARY", &loc, "curve vertex lies on the boundary"));
                }
            }
            n => issues.push(Issue::new("VALENCE", &loc, format!("valence {n}"))),
        }
    }

    let m = c.edges().len();
    for e in 0..m {
        for f in e + 1..m {
            let shared = shared_vertices(c, e, f);
            match edge_meeting(c, e, f) {
                EdgeMeeting::Overlap => issues.push(Issue::new(
                    "NON_FINITE_SIGMA",
                    format!("edges {e},{f}"),
                    "edges overlap along a segment",
                )),
                EdgeMeeting::Point(p) => {
                    let at_shared = shared.iter().any(|&v| c.vertices()[v].pos == p);
                    if at_shared {
                        continue;
                    }
                    let at_vertex = c.vertices().iter().any(|v| v.pos == p);
                    if at_vertex || on_boundary(&p) {
                        issues.push(Issue::new(
                            "BOUNDARY_SELF_INTERSECTION",
                            format!("edges {e},{f}"),
                            format!("self-intersection at {p} meets a vertex or the boundary"),
                        ));
                    }
                }
                EdgeMeeting::Disjoint => {}
            }
        }
    }

    EvenPrimitiveReport { ok: issues.is_empty(), relaxed, issues, boundary }
}

/// Vertices of a bounded polygon in cyclic order, with the facet pair defining each.
fn polygon_cycle(d: &PolyhedralDomain) -> Result<Vec<((usize, usize), RationalVector)>> {
    let corners: Vec<(usize, usize)> = d
        .strata()
        .into_iter()
        .filter(|s| s.len() == 2)
        .map(|s| (s[0], s[1]))
        .collect();
    let m = d.facets().len();
    if corners.len() != m {
        return Err(Error::InvalidInput("domain is not a simple polygon".into()));
    }
    let mut order = vec![corners[0]];
    let mut current = corners[0].1;
    let mut used = vec![false; corners.len()];
    used[0] = true;
    while order.len() < corners.len() {
        let k = (0..corners.len())
            .find(|&k| !used[k] && (corners[k].0 == current || corners[k].1 == current))
            .ok_or_else(|| Error::InvalidInput("polygon boundary is not a cycle".into()))?;
        used[k] = true;
        let (a, b) = corners[k];
        // orient every pair as (incoming facet, outgoing facet)
        let pair = if a == current { (a, b) } else { (b, a) };
        current = pair.1;
        order.push(pair);
    }
    order
        .into_iter()
        .map(|p| {
            let x = d
                .stratum_point(&[p.0, p.1])
                .ok_or_else(|| Error::InvalidInput("corner is not a point".into()))?;
            Ok((p, x))
        })
        .collect()
}

/// Wave front: the boundary of the shrunken domain joined to the corners.
pub fn wavefront(d: &PolyhedralDomain, delta: &BigRational) -> Result<TropicalCurve> {
    if d.dim() != 2 {
        return Err(Error::InvalidInput("wave fronts are planar".into()));
    }
    if !delta.is_positive() {
        return Err(Error::InvalidInput(format!("delta {} must be positive", format_rational(delta))));
    }
    let report = validate_delzant(d)?;
    if !report.ok {
        return Err(Error::InvalidInput("domain is not Delzant".into()));
    }
    if !report.bounded {
        return Err(Error::UnboundedDomain);
    }
    let outer = polygon_cycle(d)?;
    let small = d.shifted(delta);
    let too_large = || Error::DeltaTooLarge(format_rational(delta));
    let mut inner = Vec::with_capacity(outer.len());
    for ((a, b), _) in &outer {
        let x = small.stratum_point(&[*a, *b]).ok_or_else(too_large)?;
        for k in 0..small.facets().len() {
            if k != *a && k != *b && !small.slack(k, &x).is_positive() {
                return Err(too_large());
            }
        }
        inner.push(x);
    }
    let n = outer.len();
    for i in 0..n {
        let j = (i + 1) % n;
        let big = primitive_direction(&outer[j].1.sub(&outer[i].1));
        let sm = primitive_direction(&inner[j].sub(&inner[i]));
        if big.is_none() || big != sm {
            return Err(too_large());
        }
    }

    let mut vertices = Vec::new();
    for (i, x) in inner.iter().enumerate() {
        vertices.push(Vertex { id: format!("w{i}"), pos: x.clone() });
    }
    for (i, (_, x)) in outer.iter().enumerate() {
        vertices.push(Vertex { id: format!("c{i}"), pos: x.clone() });
    }
    let mut edges = Vec::new();
    for i in 0..n {
        let j = (i + 1) % n;
        let dir = primitive_direction(&inner[j].sub(&inner[i])).ok_or_else(too_large)?;
        edges.push(Edge { tail: i, head: Some(j), dir, weight: BigInt::one(), leaf_label: None });
    }
    for i in 0..n {
        let dir = primitive_direction(&outer[i].1.sub(&inner[i])).ok_or_else(too_large)?;
        edges.push(Edge { tail: i, head: Some(n + i), dir, weight: BigInt::one(), leaf_label: None });
    }
    let curve = TropicalCurve::new(2, vertices, edges)?;
    let v = validate_curve(&curve);
    if !v.ok {
        return Err(Error::InternalInconsistency(format!("wave front fails validation: {:?}", v.issues)));
    }
    Ok(curve)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Line {
    #[serde(rename = "point")]
    pub base: RationalVector,
    pub dir: IntVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LineConfiguration {
    pub lines: Vec<Line>,
}

impl LineConfiguration {
    pub fn new(lines: Vec<Line>) -> Result<Self> {
        for (i, l) in lines.iter().enumerate() {
            if l.dir.is_zero() || !l.dir.is_primitive() {
                return Err(Error::InvalidInput(format!("line {i} direction {} is not primitive", l.dir)));
            }
            if l.dir.dim() != l.base.dim() {
                return Err(Error::InvalidInput(format!("line {i} has mixed dimensions")));
            }
        }
        Ok(LineConfiguration { lines })
    }

    pub fn directions(&self) -> Vec<IntVector> {
        self.lines.iter().map(|l| l.dir.clone()).collect()
    }
}

/// Point where line `l` meets the open leaf ray `anchor + t v`, `t > 0`.
pub fn leaf_line_point(anchor: &RationalVector, v: &IntVector, l: &Line) -> Option<RationalVector> {
    let n = anchor.dim();
    if l.base.dim() != n {
        return None;
    }
    let mut entries = Vec::with_capacity(2 * n);
    for k in 0..n {
        entries.push(BigRational::from_integer(v.coords()[k].clone()));
        entries.push(BigRational::from_integer(-l.dir.coords()[k].clone()));
    }
    let m = RationalMatrix::new(n, 2, entries).ok()?;
    let rhs: Vec<BigRational> = l.base.sub(anchor).coords().to_vec();
    match solve_exact(&m, &rhs).ok()?.outcome {
        SolveOutcome::Unique(x) if x[0].is_positive() => Some(anchor.offset(v, &x[0])),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeafIncidence {
    pub line: usize,
    pub point: RationalVector,
}

/// Matches every leaf of `s` with the line through it.
///
/// Labeled leaves are matched to the line with the same index; otherwise
/// each leaf must meet exactly one line and each line exactly one leaf.
pub fn leaf_line_incidence(s: &Skeleton, lines: &LineConfiguration) -> Result<Vec<LeafIncidence>> {
    let kappa = s.kappa();
    if lines.lines.len() != kappa {
        return Err(Error::NotBoundaryConfig(format!("{} lines for {kappa} leaves", lines.lines.len())));
    }
    let meet = |j: usize, i: usize| -> Option<RationalVector> {
        let leaf = &s.leaves[j];
        let anchor = leaf.anchor.as_ref()?;
        leaf_line_point(anchor, &leaf.vector, &lines.lines[i])
    };
    if s.leaves.iter().all(|l| l.label.is_some()) {
        return s
            .leaves
            .iter()
            .enumerate()
            .map(|(j, l)| {
                let i = l.label.unwrap();
                meet(j, i)
                    .map(|point| LeafIncidence { line: i, point })
                    .ok_or_else(|| Error::NotBoundaryConfig(format!("line {i} misses leaf {j}")))
            })
            .collect();
    }
    let mut out = Vec::with_capacity(kappa);
    let mut used = vec![false; kappa];
    for j in 0..kappa {
        let hits: Vec<(usize, RationalVector)> = (0..kappa).filter_map(|i| meet(j, i).map(|p| (i, p))).collect();
        if hits.len() != 1 {
            return Err(Error::NotBoundaryConfig(format!("leaf {j} meets {} lines", hits.len())));
        }
        let (i, point) = hits.into_iter().next().unwrap();
        if used[i] {
            return Err(Error::NotBoundaryConfig(format!("line {i} meets more than one leaf")));
        }
        used[i] = true;
        out.push(LeafIncidence { line: i, point });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LineSuitability {
    pub line: usize,
    pub leaf: usize,
    pub point: RationalVector,
    pub cross: IntVector,
    pub cross_primitive: bool,
    pub is_hull_vertex: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuitabilityReport {
    pub per_line: Vec<LineSuitability>,
    pub pass: bool,
}

/// `points[j]` is a vertex of the convex hull of `points` iff some functional
/// is strictly larger on every other point.
pub fn is_hull_vertex(points: &[RationalVector], j: usize) -> bool {
    let n = points[j].dim();
    let cs: Vec<Constraint> = points
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != j)
        .map(|(_, p)| Constraint::new(p.sub(&points[j]).coords().to_vec(), Relation::Gt, BigRational::zero()))
        .collect();
    feasible(n, &cs)
}

pub fn suitability_check(c: &TropicalCurve, lines: &LineConfiguration) -> Result<SuitabilityReport> {
    let s = Skeleton::from_curve(c)?;
    let inc = leaf_line_incidence(&s, lines)?;
    let points: Vec<RationalVector> = inc.iter().map(|i| i.point.clone()).collect();
    let mut per_line = Vec::new();
    for (j, li) in inc.iter().enumerate() {
        let cr = cross(&s.leaves[j].vector, &lines.lines[li.line].dir)?;
        per_line.push(LineSuitability {
            line: li.line,
            leaf: j,
            point: li.point.clone(),
            cross_primitive: cr.is_primitive(),
            cross: cr,
            is_hull_vertex: is_hull_vertex(&points, j),
        });
    }
    per_line.sort_by_key(|p| p.line);
    let pass = per_line.iter().all(|p| p.cross_primitive && p.is_hull_vertex);
    Ok(SuitabilityReport { per_line, pass })
}

/// `(a, b)` with `a + b == -d` and `mixed(a, b, z) == -1`.
///
/// Requires `d x z` primitive; `a` pairs to 1 with `d x z`.
pub fn corner_basis(d: &IntVector, z: &IntVector) -> Result<(IntVector, IntVector)> {
    let c = cross(d, z)?;
    if c.is_zero() {
        return Err(Error::NoBasis(format!("{d} is parallel to {z}")));
    }
    if !c.is_primitive() {
        return Err(Error::NoBasis(format!("{d} x {z} = {c} is not primitive")));
    }
    let a = unit_pairing_vector(&c).ok_or_else(|| Error::NoBasis(format!("{c} is not primitive")))?;
    let b = d.neg().sub(&a);
    let m = mixed(&a, &b, z)?;
    if a.add(&b) != d.neg() || m.abs() != BigInt::one() {
        return Err(Error::InternalInconsistency(format!("corner basis check failed for {d}, {z}")));
    }
    Ok((a, b))
}

/// Primitive direction of the boundary edge through a codimension-2 point of a 3-dimensional domain.
pub fn boundary_edge_direction(d: &PolyhedralDomain, info: &BoundaryPointInfo) -> Option<IntVector> {
    if d.dim() != 3 || info.active_facets.len() != 2 {
        return None;
    }
    let p = &d.facets()[info.active_facets[0]].normal;
    let q = &d.facets()[info.active_facets[1]].normal;
    let z = cross(p, q).ok()?;
    if z.is_zero() {
        return None;
    }
    Some(normalize_sign(gcd_primitive(&z).1))
}

/// Facet-indexed momenta as a map, for reports.
pub fn momenta_map(info: &BoundaryPointInfo) -> BTreeMap<usize, BigInt> {
    info.momenta.iter().map(|m| (m.facet, m.momentum.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rational;

    fn iv(c: &[i64]) -> IntVector {
        IntVector::from_i64s(c).unwrap()
    }

    fn rv(c: &[(i64, i64)]) -> RationalVector {
        RationalVector::new(c.iter().map(|&(n, d)| rational(n, d)).collect()).unwrap()
    }

    fn domain(facets: &[(&[i64], i64)]) -> PolyhedralDomain {
        let dim = facets[0].0.len();
        PolyhedralDomain::new(
            dim,
            facets.iter().map(|(n, a)| Facet { normal: iv(n), offset: rational(*a, 1) }).collect(),
        )
        .unwrap()
    }

    #[test]
    fn delzant_examples() {
        assert!(validate_delzant(&PolyhedralDomain::standard_simplex(2)).unwrap().ok);
        assert!(validate_delzant(&PolyhedralDomain::orthant(2)).unwrap().ok);
        let corner = domain(&[(&[1, 0], 0), (&[1, 2], 0)]);
        let r = validate_delzant(&corner).unwrap();
        assert!(!r.ok);
        assert_eq!(r.offending[0].index, BigInt::from(2));
        let empty = domain(&[(&[1, 0], 1), (&[-1, 0], 0)]);
        assert_eq!(validate_delzant(&empty).unwrap_err().code(), "EMPTY_DOMAIN");
    }

    #[test]
    fn boundedness() {
        assert!(PolyhedralDomain::standard_simplex(3).is_bounded());
        assert!(!PolyhedralDomain::orthant(2).is_bounded());
    }

    #[test]
    fn classify_examples() {
        let tri = PolyhedralDomain::standard_simplex(2);
        let p = classify_point(&tri, &rv(&[(1, 2), (1, 2)]), &iv(&[1, 1])).unwrap();
        assert_eq!((p.codim, p.kind), (1, PointKind::Momentum2));
        assert_eq!(p.momenta[0].momentum, BigInt::from(2));
        let p = classify_point(&tri, &rv(&[(0, 1), (0, 1)]), &iv(&[-1, -1])).unwrap();
        assert_eq!((p.codim, p.kind), (2, PointKind::Bissectrice));
        let quad = PolyhedralDomain::orthant(2);
        let p = classify_point(&quad, &rv(&[(0, 1), (5, 1)]), &iv(&[-2, 3])).unwrap();
        assert_eq!((p.codim, p.kind), (1, PointKind::Momentum2));
        assert_eq!(
            classify_point(&tri, &rv(&[(1, 4), (1, 4)]), &iv(&[1, 1])).unwrap_err().code(),
            "INTERIOR"
        );
    }

    #[test]
    fn corner_basis_examples() {
        let (a, b) = corner_basis(&iv(&[-1, 0, 0]), &iv(&[0, 1, 2])).unwrap();
        assert_eq!(a.add(&b), iv(&[1, 0, 0]));
        assert_eq!(mixed(&a, &b, &iv(&[0, 1, 2])).unwrap(), -BigInt::one());
        let (a, b) = corner_basis(&iv(&[0, 0, -1]), &iv(&[1, 0, 0])).unwrap();
        assert_eq!(a.add(&b), iv(&[0, 0, 1]));
        assert_eq!(mixed(&a, &b, &iv(&[1, 0, 0])).unwrap().abs(), BigInt::one());
        assert_eq!(corner_basis(&iv(&[0, 0, 1]), &iv(&[0, 0, 1])).unwrap_err().code(), "NO_BASIS");
    }

    #[test]
    fn wavefront_square() {
        let sq = domain(&[(&[1, 0], 0), (&[0, 1], 0), (&[-1, 0], -1), (&[0, -1], -1)]);
        let w = wavefront(&sq, &rational(1, 4)).unwrap();
        assert_eq!(w.b1(), 1);
        let r = check_even_primitive(&w, &sq, false);
        assert!(r.ok, "{:?}", r.issues);
        assert_eq!(r.count(PointKind::Bissectrice), 4);
        assert_eq!(wavefront(&sq, &rational(1, 2)).unwrap_err().code(), "DELTA_TOO_LARGE");
    }

    #[test]
    fn hull_vertices() {
        let pts = vec![rv(&[(0, 1), (0, 1)]), rv(&[(1, 1), (1, 1)]), rv(&[(2, 1), (2, 1)])];
        assert!(is_hull_vertex(&pts, 0));
        assert!(!is_hull_vertex(&pts, 1));
        assert!(is_hull_vertex(&pts, 2));
    }
}
