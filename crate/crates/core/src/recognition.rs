//! Recognizing a Lie algebra generated by extremal elements as the symplectic
//! Lie algebra of a reconstructed symplectic space.
//!
//! The pipeline:
//! 1. close the extremal generators to the point geometry;
//! 2. peel off a hyperbolic frame `x_1, y_1, ..., x_m, y_m` of points;
//! 3. build an adapted basis of `L` from frame representatives and brackets,
//!    in which every extremal point has a rank-one coefficient matrix once it
//!    is divided entrywise by that of a fixed "unit" point;
//! 4. read off projective vector coordinates from the rank-one matrices and
//!    solve for the alternating form from the commuting relation;
//! 5. the entrywise quotient map is linear and sends points to pure tensors,
//!    so it is a Lie isomorphism up to one scalar `γ`.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::algebra::StructureLieAlgebra;
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::geometry::{build_geometry, Geometry};
use crate::linalg::{dot, is_zero_vec, proportional, unit_vec, Coordinatizer, Mat, Subspace, Vector};
use crate::symplectic::SymplecticSpace;
use crate::tensor::SfElement;

/// Default cap on the number of points explored by recognition.
pub const DEFAULT_POINT_BUDGET: usize = 20_000;

/// Frame points as geometry indices, with normalized representatives.
#[derive(Clone, Debug)]
pub struct HyperbolicFrame {
    /// `(x_k, y_k)` geometry indices.
    pub pairs: Vec<(usize, usize)>,
    /// Representatives `x_1..x_m, y_1..y_m`, scaled so that `g(x_k, y_k) = 1`.
    pub reps: Vec<Vector>,
}

impl HyperbolicFrame {
    pub fn m(&self) -> usize {
        self.pairs.len()
    }

    /// Geometry index of frame direction `i` (`x`'s first, then `y`'s).
    pub fn point(&self, i: usize) -> usize {
        let m = self.m();
        if i < m {
            self.pairs[i].0
        } else {
            self.pairs[i - m].1
        }
    }
}

/// Repeatedly picks a noncommuting pair among the remaining points and
/// restricts to the points commuting with both.
pub fn find_frame(l: &StructureLieAlgebra, geom: &Geometry) -> Result<HyperbolicFrame> {
    let mut rest: Vec<usize> = (0..geom.len()).filter(|&i| !geom.is_sandwich(i)).collect();
    let mut pairs = Vec::new();
    while !rest.is_empty() {
        let pair = rest.iter().find_map(|&x| rest.iter().find(|&&y| !geom.commutes(x, y)).map(|&y| (x, y)));
        let Some((x, y)) = pair else {
            return Err(Error::DegenerateGeometry(format!(
                "{} remaining points commute pairwise",
                rest.len()
            )));
        };
        pairs.push((x, y));
        rest.retain(|&z| geom.commutes(z, x) && geom.commutes(z, y));
    }
    if pairs.is_empty() {
        return Err(Error::DegenerateGeometry("no points".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(x, y) in &pairs {
        let xr = geom.point(x).clone();
        let yr = geom.point(y).clone();
        let g = l.g_value(&xr, &yr)?;
        if g.is_zero() {
            return Err(Error::DegenerateGeometry("frame pair with vanishing extremal form".into()));
        }
        xs.push(xr);
        ys.push(crate::linalg::scale_vec(&g.inv()?, &yr));
    }
    xs.extend(ys);
    Ok(HyperbolicFrame { pairs, reps: xs })
}

/// The adapted basis and the unit point used to read off coordinates.
#[derive(Clone, Debug)]
pub struct Coordinates {
    n: usize,
    field: FieldSpec,
    adapted: Coordinatizer,
    /// Adapted coordinates of the unit point (all nonzero).
    unit: Vector,
    pub unit_point: usize,
}

impl Coordinates {
    pub fn new(l: &StructureLieAlgebra, geom: &Geometry, frame: &HyperbolicFrame) -> Result<Self> {
        let m = frame.m();
        let n = 2 * m;
        let k = l.field().clone();
        let mut adapted = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                let v = if i == j {
                    frame.reps[i].clone()
                } else if j == i + m {
                    l.bracket(&frame.reps[i], &frame.reps[j])
                } else {
                    let (pi, pj) = (frame.point(i), frame.point(j));
                    let y = (0..geom.len())
                        .find(|&y| !geom.commutes(y, pi) && !geom.commutes(y, pj))
                        .ok_or(Error::FrameChainGap)?;
                    l.bracket(&l.bracket(&frame.reps[i], geom.point(y)), &frame.reps[j])
                };
                adapted.push(v);
            }
        }
        if adapted.len() != l.dim() {
            return Err(Error::Hypothesis(format!(
                "dimension {} differs from m(2m+1) = {} for m = {m}",
                l.dim(),
                adapted.len()
            )));
        }
        let adapted = Coordinatizer::new(&k, adapted)
            .map_err(|_| Error::Inconsistent("frame brackets do not form a basis".into()))?;
        let mut found = None;
        for (i, p) in geom.points().iter().enumerate() {
            let c = adapted.coords(p).ok_or_else(|| Error::Inconsistent("point outside the algebra".into()))?;
            if c.iter().all(|x| !x.is_zero()) {
                found = Some((i, c));
                break;
            }
        }
        let (unit_point, unit) = found.ok_or(Error::FrameChainGap)?;
        Ok(Coordinates { n, field: k, adapted, unit, unit_point })
    }

    /// Entrywise quotient of the coefficient matrix of `z` by that of the unit
    /// point, as a symmetric `n x n` matrix.
    pub fn quotient_matrix(&self, z: &[Scalar]) -> Result<Mat> {
        let c = self.adapted.coords(z).ok_or_else(|| Error::Inconsistent("element outside the algebra".into()))?;
        let mut m = Mat::zeros(&self.field, self.n, self.n);
        let mut idx = 0;
        for i in 0..self.n {
            for j in i..self.n {
                let q = &c[idx] / &self.unit[idx];
                m.set(i, j, q.clone());
                m.set(j, i, q);
                idx += 1;
            }
        }
        Ok(m)
    }

    /// Projective vector coordinates (frame basis) of an extremal point.
    pub fn point_coords(&self, z: &[Scalar]) -> Result<Vector> {
        let m = self.quotient_matrix(z)?;
        let i0 = (0..self.n).find(|&i| !m.get(i, i).is_zero()).ok_or_else(|| {
            Error::Inconsistent("point with vanishing diagonal coefficients".into())
        })?;
        let t = m.row(i0).to_vec();
        // rank one: m = t tᵀ / t[i0]
        let inv = t[i0].inv()?;
        for i in 0..self.n {
            for j in 0..self.n {
                if *m.get(i, j) != &(&t[i] * &t[j]) * &inv {
                    return Err(Error::Inconsistent("point coefficient matrix is not rank one".into()));
                }
            }
        }
        crate::extremal::canonical(&t)
    }
}

/// Solves for the alternating form (up to scalar) from the commuting relation.
fn solve_form(field: &FieldSpec, n: usize, geom: &Geometry, coords: &[Vector]) -> Result<Mat> {
    let unknowns: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut rows = Subspace::zero(field, unknowns.len());
    // a one-dimensional solution space needs one fewer independent rows than unknowns;
    // the caller verifies the result against every pair
    let target = unknowns.len() - 1;
    'fill: for p in 0..geom.len() {
        for q in geom.perp(p) {
            if q < p {
                continue;
            }
            if rows.dim() >= target {
                break 'fill;
            }
            let (s, t) = (&coords[p], &coords[q]);
            let row: Vector = unknowns.iter().map(|&(a, b)| &(&s[a] * &t[b]) - &(&s[b] * &t[a])).collect();
            rows.insert(row)?;
        }
    }
    let ker = if rows.dim() == 0 {
        Subspace::full(field, unknowns.len())
    } else {
        rows.basis_mat().kernel()
    };
    if ker.dim() != 1 {
        return Err(Error::DegenerateGeometry(format!(
            "commuting relation leaves a {}-dimensional space of forms",
            ker.dim()
        )));
    }
    let (w, _) = crate::linalg::normalize_projective(&ker.basis()[0]).unwrap();
    let mut f = Mat::zeros(field, n, n);
    for (c, &(a, b)) in w.iter().zip(&unknowns) {
        f.set(a, b, c.clone());
        f.set(b, a, -c);
    }
    Ok(f)
}

fn sort_key(v: &[Scalar]) -> Vec<(u64, u64, String)> {
    v.iter()
        .map(|x| match (x.residue(), x.ext_parts()) {
            (Some(r), _) => (r, 0, String::new()),
            (_, Some((a, b))) => (a, b, String::new()),
            _ => (0, 0, x.to_string()),
        })
        .collect()
}

/// Whether `c` lies in the half of `F*` singled out by residues at most
/// `(p - 1) / 2` (lexicographically for `F_{p²}`), or positivity over `Q`.
fn is_positive(c: &Scalar) -> bool {
    let p = c.field().characteristic();
    if let Some(r) = c.residue() {
        return r <= (p - 1) / 2;
    }
    if let Some((a, b)) = c.ext_parts() {
        let lead = if a != 0 { a } else { b };
        return lead <= (p - 1) / 2;
    }
    c.as_rational().is_some_and(|q| q > &num_rational::BigRational::from_integer(0.into()))
}

/// Outcome of a recognition run.
#[derive(Clone, Debug)]
pub struct RecognitionReport {
    pub m: usize,
    /// The reconstructed space, in a standard hyperbolic basis.
    pub space: Arc<SymplecticSpace>,
    /// `ψ([a, b]) = γ [ψ(a), ψ(b)]`.
    pub gamma: Scalar,
    /// Columns: images of the basis of `L`, in the coordinates of [`SfElement::coords`].
    pub psi: Mat,
    pub frame: HyperbolicFrame,
    /// Extremal point representatives and their vector coordinates.
    pub point_map: Vec<(Vector, Vector)>,
    pub checks: Vec<(String, bool)>,
    pub notes: Vec<String>,
}

impl RecognitionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "gram": self.space.gram().to_json(),
            "gamma": self.gamma.to_json(),
            "psi": self.psi.to_json(),
            "checks": self.checks.iter().map(|(n, p)| json!({"name": n, "pass": p})).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }
}

/// Reconstructs `(V, f)` and a linear map `ψ: L → s_f` sending points to
/// pure tensors, scaled so that the first frame point maps to `e_1 ⊗ f_{e_1}`.
pub fn build_isomorphism(l: &StructureLieAlgebra, geom: &Geometry, frame: &HyperbolicFrame) -> Result<RecognitionReport> {
    let k = l.field().clone();
    let m = frame.m();
    let n = 2 * m;
    let d = l.dim();
    let coords = Coordinates::new(l, geom, frame)?;
    let point_coords: Vec<Vector> = geom.points().iter().map(|p| coords.point_coords(p)).collect::<Result<_>>()?;
    let form = solve_form(&k, n, geom, &point_coords)?;
    let mut checks = Vec::new();
    let mut notes = Vec::new();

    let mut perp_ok = true;
    for p in 0..geom.len() {
        let fp = form.mul_vec(&point_coords[p])?;
        for q in p + 1..geom.len() {
            if dot(&point_coords[q], &fp).is_zero() != geom.commutes(p, q) {
                perp_ok = false;
            }
        }
    }
    checks.push(("commuting_iff_orthogonal".to_string(), perp_ok));

    if !SymplecticSpace::new(form.clone())?.is_nondegenerate() {
        return Err(Error::DegenerateForm);
    }
    // Gauge: ψ(x_1) = e_1 ⊗ f_{e_1} and ψ(y_1) = θ f_1 ⊗ f_{f_1} with θ = 1
    // when possible (y_1 its canonical representative). The form is rescaled
    // to reach this, which depends only on the points, not on the bracket.
    let scale = coords.quotient_matrix(&frame.reps[0])?.get(0, 0).inv()?;
    let x1 = &point_coords[frame.pairs[0].0];
    let t = &point_coords[frame.pairs[0].1];
    let ny = coords.quotient_matrix(geom.point(frame.pairs[0].1))?.scale(&scale);
    let theta0 = proportional(&ny.flatten(), &Mat::outer(t, t).flatten())
        .ok_or_else(|| Error::ThetaInconsistency("frame partner not sent to a pure tensor".into()))?;
    let c = dot(x1, &form.mul_vec(t)?);
    let lambda = match theta0.sqrt() {
        Some(r) => (&r * &c).inv()?,
        None => match k.nonzero_elements().and_then(|els| els.into_iter().find(|e| !e.is_square())) {
            Some(ns) => {
                let r = ns.div_checked(&theta0)?.sqrt().ok_or_else(|| Error::Inconsistent("square classes".into()))?;
                r.div_checked(&c)?
            }
            None => c.inv()?,
        },
    };
    // The sign of the rescaling is still free and flips γ. Fix it with the
    // smallest other point z on the first frame line: ψ(z) ∝ (e_1 - c f_1)⊗…
    // with c in the positive half of the field.
    let witt_mats = |lambda: &Scalar| -> Result<(Mat, Mat, Mat)> {
        let form = form.scale(lambda);
        let witt = SymplecticSpace::new(form.clone())?.witt_basis_starting_with(x1, t)?;
        let cols: Vec<Vector> =
            witt.pairs.iter().map(|(e, _)| e.clone()).chain(witt.pairs.iter().map(|(_, f)| f.clone())).collect();
        let p = Mat::from_cols(&k, n, &cols)?;
        let q = p.inverse()?;
        Ok((form, p, q))
    };
    let (mut form, mut p, mut q) = witt_mats(&lambda)?;
    let third = geom.line_through(frame.pairs[0].0, frame.pairs[0].1).and_then(|ln| {
        ln.iter().filter(|&&i| i != frame.pairs[0].0 && i != frame.pairs[0].1).min_by_key(|&&i| sort_key(geom.point(i)))
    });
    if let Some(&z) = third {
        let v = q.mul_vec(&point_coords[z])?;
        if is_positive(&v[m].div_checked(&v[0])?) {
            (form, p, q) = witt_mats(&-lambda)?;
        }
    }
    let space = Arc::new(SymplecticSpace::standard(&k, m, 0)?);
    checks.push(("gram_standard".to_string(), p.transpose().mul(&form)?.mul(&p)? == *space.gram()));

    // ψ on the basis of L: the quotient matrix, moved to the standard basis and
    // scaled so the first frame representative goes to e_1 ⊗ f_{e_1}
    let image = |v: &[Scalar]| -> Result<SfElement> {
        let s = q.mul(&coords.quotient_matrix(v)?)?.mul(&q.transpose())?.scale(&scale);
        SfElement::new(space.clone(), s)
    };
    let images: Vec<SfElement> = (0..d).map(|i| image(&l.basis_element(i))).collect::<Result<_>>()?;
    let psi = Mat::from_cols(&k, d, &images.iter().map(SfElement::coords).collect::<Vec<_>>())?;
    checks.push(("psi_invertible".to_string(), psi.rank() == d));

    let e1 = SfElement::pure(space.clone(), &unit_vec(&k, n, 0))?;
    checks.push(("first_frame_point_to_e1".to_string(), image(&frame.reps[0])? == e1));

    // γ from the first frame pair, then every basis pair
    let (a, b) = (&frame.reps[0], &frame.reps[m]);
    let lhs = image(&l.bracket(a, b))?.coords();
    let rhs = image(a)?.bracket(&image(b)?)?.coords();
    let gamma = proportional(&lhs, &rhs)
        .filter(|g| !g.is_zero())
        .ok_or_else(|| Error::NotProportional("first frame pair".into()))?;
    let ginv = gamma.inv()?;
    let mut prop_ok = true;
    for i in 0..d {
        for j in i + 1..d {
            let l_ij = psi.mul_vec(l.structure_constant(i, j))?;
            let m_ij = images[i].bracket(&images[j])?.scale(&gamma).coords();
            if l_ij != m_ij {
                prop_ok = false;
            }
        }
    }
    if !prop_ok {
        return Err(Error::NotProportional("basis brackets".into()));
    }
    checks.push(("bracket_proportional".to_string(), prop_ok));
    // (L, γ⁻¹[·,·]) → s_f exactly
    let mut exact = true;
    for i in 0..d {
        for j in i + 1..d {
            let l_ij: Vector = psi.mul_vec(l.structure_constant(i, j))?.iter().map(|x| x * &ginv).collect();
            if l_ij != images[i].bracket(&images[j])?.coords() {
                exact = false;
            }
        }
    }
    checks.push(("bracket_preserved_after_rescaling".to_string(), exact));

    // g_L(x_p, x_q) = γ² θ_p θ_q f(u_p, u_q)² where ψ(x_p) = θ_p u_p u_pᵀ
    let gl = l.extremal_form()?;
    let g2 = &gamma * &gamma;
    let mut thetas = Vec::with_capacity(geom.len());
    let mut vecs = Vec::with_capacity(geom.len());
    for (i, pt) in geom.points().iter().enumerate() {
        let v = q.mul_vec(&point_coords[i])?;
        let pure = SfElement::pure(space.clone(), &v)?.coords();
        let img = image(pt)?.coords();
        let theta = proportional(&img, &pure).ok_or_else(|| Error::ThetaInconsistency("point not sent to a pure tensor".into()))?;
        thetas.push(theta);
        vecs.push(v);
    }
    let gy: Vec<Vector> = geom.points().iter().map(|p| gl.gram.mul_vec(p)).collect::<Result<_>>()?;
    for pidx in 0..geom.len() {
        for qidx in pidx + 1..geom.len() {
            let fv = space.f(&vecs[pidx], &vecs[qidx])?;
            let want = &(&g2 * &(&thetas[pidx] * &thetas[qidx])) * &(&fv * &fv);
            if dot(geom.point(qidx), &gy[pidx]) != want {
                return Err(Error::ThetaInconsistency(format!("points {pidx} and {qidx}")));
            }
        }
    }
    checks.push(("theta_consistency".to_string(), true));

    let lines_ok = geom.hyperbolic_lines().iter().all(|ln| {
        let s = Subspace::from_vectors(&k, n, ln.iter().map(|&i| vecs[i].clone()).collect()).unwrap();
        s.dim() == 2 && !space.f(&s.basis()[0], &s.basis()[1]).unwrap().is_zero()
    });
    checks.push(("lines_to_hyperbolic_lines".to_string(), lines_ok));
    let polar_ok = geom.polar_lines().iter().all(|ln| {
        let s = Subspace::from_vectors(&k, n, ln.iter().map(|&i| vecs[i].clone()).collect()).unwrap();
        s.dim() == 2 && space.f(&s.basis()[0], &s.basis()[1]).unwrap().is_zero()
    });
    checks.push(("polar_lines_to_singular_lines".to_string(), polar_ok));
    let mut distinct: Vec<Vector> = vecs.iter().map(|v| crate::extremal::canonical(v).unwrap()).collect();
    distinct.sort_by_key(|v| format!("{v:?}"));
    distinct.dedup();
    let mut injective = distinct.len() == vecs.len();
    if let (Some(qq), true) = (k.order(), geom.complete) {
        let total = (qq.pow(n as u32) - 1) / (qq - 1);
        injective &= vecs.len() as u64 == total;
        checks.push(("point_map_bijective".to_string(), injective));
    } else {
        checks.push(("point_map_injective".to_string(), injective));
    }
    if matches!(k, FieldSpec::PrimeSquare { .. }) {
        notes.push("automorphism assumed trivial".to_string());
    }
    if !geom.complete {
        notes.push("geometry truncated by budget".to_string());
    }
    let point_map = geom.points().iter().cloned().zip(vecs).collect();
    Ok(RecognitionReport { m, space, gamma, psi, frame: frame.clone(), point_map, checks, notes })
}

/// Full pipeline from an algebra with extremal generators.
pub fn recognize(l: &StructureLieAlgebra, budget: usize) -> Result<RecognitionReport> {
    if l.extremal_generators().is_empty() {
        return Err(Error::Hypothesis("no extremal generators given".into()));
    }
    if let Some((i, j, k)) = l.jacobi_violation() {
        return Err(Error::Hypothesis(format!("Jacobi identity fails on basis triple ({i}, {j}, {k})")));
    }
    let form = l.extremal_form()?;
    let rad = form.radical().dim();
    if rad > 0 {
        return Err(Error::Hypothesis(format!(
            "extremal form has a radical of dimension {rad} (center dimension {}); not a symplectic Lie algebra",
            l.center().dim()
        )));
    }
    let geom = build_geometry(l, l.extremal_generators(), budget)?;
    if !geom.spans() {
        return Err(Error::Hypothesis("extremal points do not span the algebra".into()));
    }
    let health = geom.health(true);
    if !health.connected || !health.nondegenerate {
        return Err(Error::DegenerateGeometry("geometry disconnected or degenerate".into()));
    }
    let frame = find_frame(l, &geom)?;
    build_isomorphism(l, &geom, &frame)
}

/// The scalar `γ` with `[a, b]_2 = γ [a, b]_1`, given two brackets on the same
/// space sharing the extremal points `shared`.
pub fn product_gamma(l1: &StructureLieAlgebra, l2: &StructureLieAlgebra, shared: &[Vector]) -> Result<Scalar> {
    if l1.dim() != l2.dim() {
        return Err(Error::LengthMismatch { expected: l1.dim(), got: l2.dim() });
    }
    if l1.field() != l2.field() {
        return Err(Error::FieldMismatch);
    }
    let mut pair = None;
    for (i, x) in shared.iter().enumerate() {
        for y in &shared[i + 1..] {
            let b1 = l1.bracket(x, y);
            let b2 = l2.bracket(x, y);
            if is_zero_vec(&b1) != is_zero_vec(&b2) {
                return Err(Error::Hypothesis("commuting relations differ".into()));
            }
            if pair.is_none() && !is_zero_vec(&b1) {
                pair = Some((b1, b2));
            }
        }
    }
    let (b1, b2) = pair.ok_or(Error::NoNoncommutingPair)?;
    let gamma = proportional(&b2, &b1).ok_or_else(|| Error::NotProportional("first noncommuting pair".into()))?;
    for i in 0..l1.dim() {
        for j in i + 1..l1.dim() {
            let want: Vector = l1.structure_constant(i, j).iter().map(|x| x * &gamma).collect();
            if *l2.structure_constant(i, j) != want {
                return Err(Error::NotProportional(format!("basis pair ({i}, {j})")));
            }
        }
    }
    Ok(gamma)
}
