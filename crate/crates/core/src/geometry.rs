//! The geometry of extremal points: points are 1-spaces spanned by extremal
//! elements, lines are the conics of sl2-subalgebras, and two points are
//! perpendicular when they commute.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{from_bracket_closure, StructureLieAlgebra};
use crate::error::{Error, Result};
use crate::extremal::{canonical, for_each_vector, is_extremal, Sl2Conic};
use crate::field::{FieldSpec, Scalar};
use crate::linalg::{is_zero_vec, proportional, vec_to_json, Mat, Subspace, Vector};
use crate::report::CheckReport;

/// Fixed-size bitset over point indices.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn full(n: usize) -> Self {
        let mut b = Self::new(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn and(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a &= b;
        }
    }
    fn ones(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, &word) in self.0.iter().enumerate() {
            let mut x = word;
            while x != 0 {
                let t = x.trailing_zeros() as usize;
                out.push(w * 64 + t);
                x &= x - 1;
            }
        }
        out
    }
}

/// Precomputed `ad` of a point representative.
struct PointData {
    rep: Vector,
    ad: Mat,
}

impl PointData {
    fn new(l: &StructureLieAlgebra, rep: Vector) -> Self {
        let ad = l.ad_matrix(&rep);
        PointData { rep, ad }
    }

    fn bracket(&self, y: &[Scalar]) -> Vector {
        self.ad.mul_vec(y).unwrap()
    }

    /// `g(x, y)` from `[x, [x, y]] = 2 g(x, y) x`, given `[x, y]`.
    fn g_with(&self, xy: &[Scalar]) -> Result<Scalar> {
        let xxy = self.bracket(xy);
        if is_zero_vec(&xxy) {
            return Ok(xy[0].field().zero());
        }
        let c = proportional(&xxy, &self.rep).ok_or(Error::NotExtremal)?;
        c.div_checked(&c.field().from_i64(2))
    }
}

#[derive(Clone, Debug)]
pub struct Geometry {
    field: FieldSpec,
    dim: usize,
    points: Vec<Vector>,
    index: HashMap<Vector, usize>,
    sandwich: Vec<bool>,
    /// Reflexive commuting relation.
    commute: Vec<Bits>,
    lines: Vec<Vec<usize>>,
    /// Dimension of the span of all representatives.
    pub span_dim: usize,
    /// Whether the point set is closed (no budget cut-off, all conic points present).
    pub complete: bool,
    /// Pairs of points lying on two different hyperbolic lines.
    pub line_conflicts: Vec<(usize, usize)>,
    /// Noncommuting pairs with vanishing extremal form (no sl2 line).
    pub degenerate_pairs: usize,
}

/// Points on the line through `x`, `y` over a finite field, or the sample
/// points over `Q`.
fn conic_points(x: &PointData, y: &PointData, g: Scalar, xy: Vector) -> Result<Vec<Vector>> {
    let conic = Sl2Conic { x: x.rep.clone(), y: y.rep.clone(), g, xy };
    conic.points().iter().map(|p| canonical(p)).collect()
}

/// Closes `seeds` under adding all points of sl2-lines through noncommuting
/// pairs. Stops once `budget` points are known.
pub fn build_geometry(l: &StructureLieAlgebra, seeds: &[Vector], budget: usize) -> Result<Geometry> {
    let mut data: Vec<PointData> = Vec::new();
    let mut index: HashMap<Vector, usize> = HashMap::new();
    let mut complete = true;
    for s in seeds {
        if !is_extremal(l, s)?.extremal {
            return Err(Error::NotExtremal);
        }
        let c = canonical(s)?;
        if !index.contains_key(&c) {
            index.insert(c.clone(), data.len());
            data.push(PointData::new(l, c));
        }
    }
    let mut covered: HashSet<(usize, usize)> = HashSet::new();
    let mut i = 0;
    'outer: while i < data.len() {
        for j in 0..i {
            if covered.contains(&(j, i)) {
                continue;
            }
            let xy = data[j].bracket(&data[i].rep);
            if is_zero_vec(&xy) {
                continue;
            }
            let g = data[j].g_with(&xy)?;
            if g.is_zero() {
                continue;
            }
            let pts = conic_points(&data[j], &data[i], g, xy)?;
            let mut ids = Vec::with_capacity(pts.len());
            for p in pts {
                let id = match index.get(&p) {
                    Some(&id) => id,
                    None => {
                        if data.len() >= budget {
                            complete = false;
                            break 'outer;
                        }
                        index.insert(p.clone(), data.len());
                        data.push(PointData::new(l, p));
                        data.len() - 1
                    }
                };
                ids.push(id);
            }
            for a in 0..ids.len() {
                for b in 0..ids.len() {
                    if ids[a] < ids[b] {
                        covered.insert((ids[a], ids[b]));
                    }
                }
            }
        }
        i += 1;
    }
    let mut geom = Geometry::assemble(l, data)?;
    geom.complete &= complete;
    Ok(geom)
}

/// Every extremal point of a small algebra over a finite field.
pub fn brute_force_geometry(l: &StructureLieAlgebra, budget: u64) -> Result<Geometry> {
    let mut data = Vec::new();
    for_each_vector(l.field(), l.dim(), true, budget, |v| {
        if is_extremal(l, v).map(|t| t.extremal).unwrap_or(false) {
            data.push(PointData::new(l, v.clone()));
        }
        true
    })?;
    Geometry::assemble(l, data)
}

impl Geometry {
    fn assemble(l: &StructureLieAlgebra, data: Vec<PointData>) -> Result<Geometry> {
        let n = data.len();
        let k = l.field().clone();
        let mut index = HashMap::with_capacity(n);
        for (i, p) in data.iter().enumerate() {
            index.insert(p.rep.clone(), i);
        }
        let mut commute = vec![Bits::new(n); n];
        let mut pair_line: HashMap<(usize, usize), usize> = HashMap::new();
        let mut lines: Vec<Vec<usize>> = Vec::new();
        let mut line_conflicts = Vec::new();
        let mut complete = true;
        let mut degenerate_pairs = 0;
        let mut sandwich = vec![false; n];
        for (i, p) in data.iter().enumerate() {
            sandwich[i] = is_extremal(l, &p.rep)?.sandwich;
            commute[i].set(i);
        }
        for i in 0..n {
            for j in i + 1..n {
                let xy = data[i].bracket(&data[j].rep);
                if is_zero_vec(&xy) {
                    commute[i].set(j);
                    commute[j].set(i);
                    continue;
                }
                if pair_line.contains_key(&(i, j)) {
                    continue;
                }
                let g = data[i].g_with(&xy)?;
                if g.is_zero() {
                    degenerate_pairs += 1;
                    continue;
                }
                let mut ids = Vec::new();
                for p in conic_points(&data[i], &data[j], g, xy)? {
                    match index.get(&p) {
                        Some(&id) => ids.push(id),
                        None => complete = false,
                    }
                }
                ids.sort_unstable();
                ids.dedup();
                let lid = lines.len();
                for a in 0..ids.len() {
                    for b in a + 1..ids.len() {
                        if let Some(&old) = pair_line.get(&(ids[a], ids[b])) {
                            if lines[old] != ids {
                                line_conflicts.push((ids[a], ids[b]));
                            }
                        }
                        pair_line.insert((ids[a], ids[b]), lid);
                    }
                }
                lines.push(ids);
            }
        }
        let span = Subspace::from_vectors(&k, l.dim(), data.iter().map(|p| p.rep.clone()).collect())?;
        Ok(Geometry {
            field: k,
            dim: l.dim(),
            points: data.into_iter().map(|p| p.rep).collect(),
            index,
            sandwich,
            commute,
            lines,
            span_dim: span.dim(),
            complete,
            line_conflicts,
            degenerate_pairs,
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Vector {
        &self.points[i]
    }

    pub fn spans(&self) -> bool {
        self.span_dim == self.dim
    }

    pub fn index_of(&self, v: &[Scalar]) -> Option<usize> {
        self.index.get(&canonical(v).ok()?).copied()
    }

    pub fn is_sandwich(&self, i: usize) -> bool {
        self.sandwich[i]
    }

    pub fn commutes(&self, i: usize, j: usize) -> bool {
        self.commute[i].get(j)
    }

    /// Hyperbolic lines as sorted point indices.
    pub fn hyperbolic_lines(&self) -> &[Vec<usize>] {
        &self.lines
    }

    /// Points commuting with `i`, excluding `i` itself.
    pub fn perp(&self, i: usize) -> Vec<usize> {
        self.commute[i].ones().into_iter().filter(|&j| j != i).collect()
    }

    /// Points commuting with every point of `set` (closed perp).
    fn perp_of_set(&self, set: &[usize]) -> Bits {
        let mut acc = Bits::full(self.len());
        for &s in set {
            acc.and(&self.commute[s]);
        }
        acc
    }

    /// `({x, y}^⊥)^⊥` for distinct commuting points.
    pub fn polar_line(&self, x: usize, y: usize) -> Result<Vec<usize>> {
        if x == y || !self.commutes(x, y) {
            return Err(Error::NotPolarPair);
        }
        let p = self.perp_of_set(&[x, y]).ones();
        Ok(self.perp_of_set(&p).ones())
    }

    /// All distinct polar lines.
    pub fn polar_lines(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        let mut out = Vec::new();
        for x in 0..n {
            for y in self.perp(x) {
                if y < x || seen.contains(&(x, y)) {
                    continue;
                }
                let line = self.polar_line(x, y).unwrap();
                for &a in &line {
                    for &b in &line {
                        if a < b {
                            seen.insert((a, b));
                        }
                    }
                }
                out.push(line);
            }
        }
        out
    }

    /// First hyperbolic line through two points, if any.
    pub fn line_through(&self, x: usize, y: usize) -> Option<&Vec<usize>> {
        self.lines.iter().find(|l| l.binary_search(&x).is_ok() && l.binary_search(&y).is_ok())
    }

    /// Connectivity of the noncommuting graph, and nondegeneracy: no two
    /// distinct points have the same closed perp.
    pub fn health(&self, g_radical_empty: bool) -> GeometryHealth {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        if n > 0 {
            seen[0] = true;
            queue.push_back(0);
        }
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if !seen[j] && !self.commutes(i, j) {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        let connected = seen.iter().all(|&s| s);
        let mut by_perp: HashMap<&Vec<u64>, usize> = HashMap::new();
        let mut twins = Vec::new();
        for i in 0..n {
            if let Some(&j) = by_perp.get(&self.commute[i].0) {
                twins.push((j, i));
            } else {
                by_perp.insert(&self.commute[i].0, i);
            }
        }
        let nondegenerate = twins.is_empty();
        let mut report = CheckReport::new("geometry_health");
        if g_radical_empty && !(connected && nondegenerate) {
            for (a, b) in twins.iter().take(4) {
                report.fail(json!({"same_perp": [vec_to_json(&self.points[*a]), vec_to_json(&self.points[*b])]}));
            }
            if !connected {
                report.fail(json!({"disconnected": true}));
            }
        }
        GeometryHealth { connected, nondegenerate, twins, report }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "points": self.points.iter().map(|p| vec_to_json(p)).collect::<Vec<_>>(),
            "hyperbolic_lines": self.lines,
            "polar_lines": self.polar_lines(),
            "complete": self.complete,
        })
    }

    /// Noncommuting graph in DOT, nodes labelled by canonical representatives.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph extremal_points {\n");
        for (i, p) in self.points.iter().enumerate() {
            let label: Vec<String> = p.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(s, "  {i} [label=\"({})\"];", label.join(","));
        }
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if !self.commutes(i, j) {
                    let _ = writeln!(s, "  {i} -- {j};");
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Clone, Debug)]
pub struct GeometryHealth {
    pub connected: bool,
    pub nondegenerate: bool,
    /// Pairs of distinct points with identical perps.
    pub twins: Vec<(usize, usize)>,
    pub report: CheckReport,
}

/// Checks that a line's points span a plane of `L`, that the extremal points
/// of that plane are exactly the line, and that no three are collinear.
pub fn line_span_check(l: &StructureLieAlgebra, geom: &Geometry, line: &[usize], budget: u64) -> Result<CheckReport> {
    let mut report = CheckReport::new("line_span");
    let reps: Vec<Vector> = line.iter().map(|&i| geom.point(i).clone()).collect();
    let span = Subspace::from_vectors(l.field(), l.dim(), reps.clone())?;
    if span.dim() != 3 {
        report.fail(json!({"span_dim": span.dim()}));
        return Ok(report);
    }
    for a in 0..reps.len() {
        for b in a + 1..reps.len() {
            for c in b + 1..reps.len() {
                let s = Subspace::from_vectors(l.field(), l.dim(), vec![reps[a].clone(), reps[b].clone(), reps[c].clone()])?;
                if s.dim() < 3 {
                    report.fail(json!({"collinear": [line[a], line[b], line[c]]}));
                }
            }
        }
    }
    if l.field().is_finite() {
        let basis = span.basis().to_vec();
        let on_line: HashSet<Vector> = reps.iter().map(|r| canonical(r).unwrap()).collect();
        let mut extra = Vec::new();
        for_each_vector(l.field(), 3, true, budget, |c| {
            let mut v = l.zero();
            for (ci, b) in c.iter().zip(&basis) {
                crate::linalg::axpy(&mut v, ci, b);
            }
            let v = canonical(&v).unwrap();
            if !on_line.contains(&v) && is_extremal(l, &v).map(|t| t.extremal).unwrap_or(false) {
                extra.push(v);
            }
            true
        })?;
        for v in extra.into_iter().take(4) {
            report.fail(json!({"extra_extremal_point": vec_to_json(&v)}));
        }
    } else {
        // over Q only the geometry's own points are checked
        for (i, p) in geom.points().iter().enumerate() {
            if span.contains(p) && line.binary_search(&i).is_err() {
                report.fail(json!({"extra_extremal_point": vec_to_json(p)}));
            }
        }
    }
    Ok(report)
}

/// Outcome of intersecting a hyperbolic line with the perp of a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LineMeet {
    Point(usize),
    Contained,
    /// Any other number of commuting points; never happens in a model.
    Other(Vec<usize>),
}

pub fn line_meets_perp(geom: &Geometry, x: usize, line: &[usize]) -> LineMeet {
    let hits: Vec<usize> = line.iter().copied().filter(|&p| geom.commutes(x, p)).collect();
    match hits.len() {
        1 => LineMeet::Point(hits[0]),
        n if n == line.len() => LineMeet::Contained,
        _ => LineMeet::Other(hits),
    }
}

/// The plane spanned by two intersecting sl2-lines.
#[derive(Clone, Debug)]
pub struct SymplecticPlane {
    pub points: Vec<Vector>,
    pub lines: Vec<Vec<usize>>,
    /// Classes of the relation "equal or not joined by a line".
    pub classes: Vec<Vec<usize>>,
    pub report: CheckReport,
}

fn check_triple(l: &StructureLieAlgebra, x: &[Scalar], y: &[Scalar], z: &[Scalar]) -> Result<()> {
    for v in [x, y, z] {
        if !is_extremal(l, v)?.extremal {
            return Err(Error::NotExtremal);
        }
    }
    if is_zero_vec(&l.bracket(x, y)) {
        return Err(Error::NotSymplecticTriple("[x, y] = 0".into()));
    }
    if is_zero_vec(&l.bracket(y, z)) {
        return Err(Error::NotSymplecticTriple("[y, z] = 0".into()));
    }
    if !is_zero_vec(&l.bracket(x, z)) {
        return Err(Error::NotSymplecticTriple("[x, z] != 0".into()));
    }
    let xy = Subspace::from_vectors(l.field(), l.dim(), vec![x.to_vec(), y.to_vec()])?;
    if xy.contains(z) {
        return Err(Error::NotSymplecticTriple("z lies in the span of x and y".into()));
    }
    Ok(())
}

/// Points and lines of the plane generated by the sl2-lines `xy` and `yz`,
/// validated against the dual affine plane counts over `F_q`.
pub fn symplectic_plane(l: &StructureLieAlgebra, x: &[Scalar], y: &[Scalar], z: &[Scalar]) -> Result<SymplecticPlane> {
    check_triple(l, x, y, z)?;
    let geom = build_geometry(l, &[x.to_vec(), y.to_vec(), z.to_vec()], 4096)?;
    let n = geom.len();
    let lines = geom.hyperbolic_lines().to_vec();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of = vec![usize::MAX; n];
    let mut report = CheckReport::new("symplectic_plane");
    for i in 0..n {
        if class_of[i] != usize::MAX {
            continue;
        }
        let class: Vec<usize> = (0..n).filter(|&j| geom.commutes(i, j)).collect();
        for &j in &class {
            if class_of[j] != usize::MAX {
                report.fail(json!({"not_an_equivalence": [i, j]}));
            }
            class_of[j] = classes.len();
        }
        classes.push(class);
    }
    // non-collinearity must be transitive: each class is a clique
    for c in &classes {
        for &a in c {
            for &b in c {
                if !geom.commutes(a, b) {
                    report.fail(json!({"not_an_equivalence": [a, b]}));
                }
            }
        }
    }
    if let Some(q) = l.field().order() {
        let q = q as usize;
        let want = (q * q + q, q * q, q + 1, q + 1, q);
        let sizes_ok = lines.iter().all(|ln| ln.len() == q + 1) && classes.iter().all(|c| c.len() == q);
        if (n, lines.len(), classes.len()) != (want.0, want.1, want.2) || !sizes_ok {
            report.fail(json!({
                "points": n, "lines": lines.len(), "classes": classes.len(),
                "expected": [want.0, want.1, want.2],
            }));
        }
    }
    if !geom.complete {
        report.fail(json!({"incomplete": true}));
    }
    Ok(SymplecticPlane { points: geom.points().to_vec(), lines, classes, report })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TripleKind {
    Sp3,
    PSp3,
}

#[derive(Clone, Debug, Serialize)]
pub struct TripleClass {
    pub kind: TripleKind,
    pub dim: usize,
    pub center_dim: usize,
    /// Dimension of the radical of the extremal form on the generated subalgebra.
    pub form_radical_dim: usize,
    pub identities: [bool; 6],
    pub table_verified: bool,
}

pub const TRIPLE_IDENTITIES: [&str; 6] = [
    "[x,[x,[y,z]]] = 0",
    "[z,[x,[y,z]]] = 0",
    "[y,[x,[y,z]]] = [x,y] - [y,z]",
    "[[x,y],[y,z]] = [x,y] + [y,z]",
    "[[x,y],[x,[y,z]]] = 2x - [x,[y,z]]",
    "[[y,z],[x,[y,z]]] = [x,[y,z]] - 2z",
];

/// Structure of the subalgebra generated by a symplectic triple.
pub fn classify_triple(l: &StructureLieAlgebra, x: &[Scalar], y: &[Scalar], z: &[Scalar]) -> Result<TripleClass> {
    check_triple(l, x, y, z)?;
    let gxy = l.g_value(x, y)?;
    let gzy = l.g_value(z, y)?;
    if gxy.is_zero() || gzy.is_zero() {
        return Err(Error::NotSymplecticTriple("vanishing extremal form".into()));
    }
    let x = crate::linalg::scale_vec(&gxy.inv()?, x);
    let z = crate::linalg::scale_vec(&gzy.inv()?, z);
    let y = y.to_vec();
    let b = |a: &[Scalar], c: &[Scalar]| l.bracket(a, c);
    let two = l.field().from_i64(2);
    let xy = b(&x, &y);
    let yz = b(&y, &z);
    let xyz = b(&x, &yz);
    let sub = crate::linalg::sub_vec;
    let add = crate::linalg::add_vec;
    let sc = crate::linalg::scale_vec;
    let identities = [
        is_zero_vec(&b(&x, &xyz)),
        is_zero_vec(&b(&z, &xyz)),
        b(&y, &xyz) == sub(&xy, &yz),
        b(&xy, &yz) == add(&xy, &yz),
        b(&xy, &xyz) == sub(&sc(&two, &x), &xyz),
        b(&yz, &xyz) == sub(&xyz, &sc(&two, &z)),
    ];
    let span = Subspace::from_vectors(l.field(), l.dim(), vec![x.clone(), y.clone(), z.clone(), xy, yz, xyz])?;
    let closure = from_bracket_closure(l.field(), l.dim(), &[x, y, z], |a, c| Ok(l.bracket(a, c)), 64)?;
    let dim = closure.algebra.dim();
    if dim != span.dim() || !(dim == 5 || dim == 6) {
        return Err(Error::TableMismatch(format!("generated dimension {dim}, span dimension {}", span.dim())));
    }
    let center_dim = closure.algebra.center().dim();
    let form_radical_dim = closure.algebra.extremal_form()?.radical().dim();
    let kind = if dim == 6 { TripleKind::Sp3 } else { TripleKind::PSp3 };
    let expected = match kind {
        TripleKind::Sp3 => (1, 3),
        TripleKind::PSp3 => (0, 2),
    };
    let table_verified = identities.iter().all(|&b| b) && (center_dim, form_radical_dim) == expected;
    Ok(TripleClass { kind, dim, center_dim, form_radical_dim, identities, table_verified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{psp3, sp, sp3, sp_model};
    use crate::symplectic::SymplecticSpace;
    use crate::tensor::SfElement;
    use std::sync::Arc;

    fn pure(space: &Arc<SymplecticSpace>, v: &[i64]) -> Vector {
        let k = space.field();
        let v: Vector = v.iter().map(|&c| k.from_i64(c)).collect();
        SfElement::pure(space.clone(), &v).unwrap().coords()
    }

    fn sp4(p: u64) -> (Arc<SymplecticSpace>, StructureLieAlgebra) {
        let space = Arc::new(SymplecticSpace::standard(&FieldSpec::prime(p).unwrap(), 2, 0).unwrap());
        let l = sp_model(&space).unwrap();
        (space, l)
    }

    #[test]
    fn sp4_closure_has_forty_points() {
        let (s, l) = sp4(3);
        let seeds = vec![pure(&s, &[1, 0, 0, 0]), pure(&s, &[0, 0, 1, 0]), pure(&s, &[1, 1, 0, 0]), pure(&s, &[0, 0, 1, 1])];
        let g = build_geometry(&l, &seeds, 1000).unwrap();
        assert_eq!(g.len(), 40);
        assert!(g.complete && g.spans());
        assert_eq!(g.hyperbolic_lines().len(), 90);
        assert!(g.hyperbolic_lines().iter().all(|ln| ln.len() == 4));
        assert!(g.line_conflicts.is_empty());
        assert_eq!(g.polar_lines().len(), 40);
        let h = g.health(true);
        assert!(h.connected && h.nondegenerate && h.report.pass);
    }

    #[test]
    fn single_line() {
        let (s, l) = sp4(3);
        let g = build_geometry(&l, &[pure(&s, &[1, 0, 0, 0]), pure(&s, &[0, 0, 1, 0])], 100).unwrap();
        assert_eq!(g.len(), 4);
        assert!(g.complete);
        assert!(g.health(false).connected);
    }

    #[test]
    fn budget_flags_partial() {
        let (_, l) = sp4(3);
        let g = build_geometry(&l, l.extremal_generators(), 12).unwrap();
        assert!(!g.complete);
        assert!(g.len() <= 12);
    }

    #[test]
    fn brute_force_agrees() {
        let (s, l) = sp4(3);
        let g = brute_force_geometry(&l, 1 << 20).unwrap();
        assert_eq!(g.len(), 40);
        assert!(g.index_of(&pure(&s, &[1, 2, 0, 1])).is_some());
    }

    #[test]
    fn polar_line_through_e1_e2() {
        let (s, l) = sp4(3);
        let g = build_geometry(&l, l.extremal_generators(), 1000).unwrap();
        let a = g.index_of(&pure(&s, &[1, 0, 0, 0])).unwrap();
        let b = g.index_of(&pure(&s, &[0, 1, 0, 0])).unwrap();
        let line = g.polar_line(a, b).unwrap();
        assert_eq!(line.len(), 4);
        for v in [[1, 0, 0, 0], [0, 1, 0, 0], [1, 1, 0, 0], [1, 2, 0, 0]] {
            assert!(line.contains(&g.index_of(&pure(&s, &v)).unwrap()));
        }
        assert!(!g.perp(a).contains(&a));
        let c = g.index_of(&pure(&s, &[0, 0, 1, 0])).unwrap();
        assert_eq!(g.polar_line(a, c), Err(Error::NotPolarPair));
        assert!(line_span_check(&l, &g, &line, 1 << 16).unwrap().pass);
        let hl = g.line_through(a, c).unwrap().clone();
        assert!(line_span_check(&l, &g, &hl, 1 << 16).unwrap().pass);
        assert_eq!(line_meets_perp(&g, a, &hl), LineMeet::Point(a));
        assert_eq!(line_meets_perp(&g, b, &hl), LineMeet::Contained);
        let d = g.index_of(&pure(&s, &[1, 0, 0, 1])).unwrap();
        assert_eq!(line_meets_perp(&g, d, &hl), LineMeet::Point(a));
    }

    #[test]
    fn planes() {
        for (p, pts, lines) in [(3u64, 12usize, 9usize), (5, 30, 25)] {
            let (s, l) = sp4(p);
            let plane =
                symplectic_plane(&l, &pure(&s, &[1, 0, 0, 0]), &pure(&s, &[0, 0, 1, 0]), &pure(&s, &[1, p as i64 - 1, 0, 0]))
                    .unwrap();
            assert_eq!((plane.points.len(), plane.lines.len()), (pts, lines));
            assert!(plane.report.pass, "{:?}", plane.report);
        }
    }

    #[test]
    fn example_triple() {
        for k in [FieldSpec::prime(3).unwrap(), FieldSpec::prime(5).unwrap(), FieldSpec::Rational] {
            let space = Arc::new(SymplecticSpace::standard(&k, 2, 0).unwrap());
            let l = sp_model(&space).unwrap();
            let (x, y, z) = (pure(&space, &[1, 0, 0, 0]), pure(&space, &[0, 0, 1, 0]), pure(&space, &[1, -1, 0, 0]));
            let t = classify_triple(&l, &x, &y, &z).unwrap();
            assert_eq!((t.kind, t.dim, t.center_dim), (TripleKind::Sp3, 6, 1));
            assert!(t.table_verified, "{t:?}");
            // the same vectors inside the 6-dimensional subalgebra
            let three = sp3(&k).unwrap();
            let loc = |v: &Vector| three.coords_of(v).unwrap();
            let t = classify_triple(&three.algebra, &loc(&x), &loc(&y), &loc(&z)).unwrap();
            assert_eq!((t.kind, t.center_dim), (TripleKind::Sp3, 1));
            // and in the tensor model of the degenerate space
            let w = crate::algebra::degenerate_three_space(&k).unwrap();
            let c = psp3(&k).unwrap();
            let e = |v: &[i64]| {
                let v: Vector = v.iter().map(|&a| k.from_i64(a)).collect();
                c.coords_of(&crate::algebra::pure_endomorphism(&w, &v).unwrap()).unwrap()
            };
            let t = classify_triple(&c.algebra, &e(&[1, 0, 0]), &e(&[0, 0, 1]), &e(&[1, -1, 0])).unwrap();
            assert_eq!((t.kind, t.dim, t.center_dim), (TripleKind::PSp3, 5, 0));
            assert!(t.table_verified, "{t:?}");
        }
    }

    #[test]
    fn not_a_triple() {
        let l = sp(&FieldSpec::prime(3).unwrap(), 2).unwrap();
        let g = l.extremal_generators();
        assert!(matches!(classify_triple(&l, &g[0], &g[0], &g[0]), Err(Error::NotSymplecticTriple(_))));
    }

    #[test]
    fn exports() {
        let (s, l) = sp4(3);
        let g = build_geometry(&l, &[pure(&s, &[1, 0, 0, 0]), pure(&s, &[0, 0, 1, 0])], 100).unwrap();
        let dot = g.to_dot();
        assert_eq!(dot.matches(" -- ").count(), 6);
        let j = g.to_json();
        assert_eq!(j["points"].as_array().unwrap().len(), 4);
        assert_eq!(j["hyperbolic_lines"].as_array().unwrap().len(), 1);
    }
}
