//! Finite-dimensional Lie algebras given by structure constants.

use std::sync::Arc;

use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::linalg::{add_vec, axpy, is_zero_vec, unit_vec, zero_vec, Coordinatizer, Mat, Subspace, Vector};
use crate::symplectic::SymplecticSpace;
use crate::tensor::SfElement;

/// Default cap on the dimension reached by a bracket closure.
pub const DEFAULT_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureLieAlgebra {
    field: FieldSpec,
    dim: usize,
    /// `table[i][j]` holds the coordinates of `[b_i, b_j]`.
    table: Vec<Vec<Vector>>,
    generators: Vec<Vector>,
}

/// A subalgebra of some ambient bracket, together with its chosen basis.
#[derive(Clone, Debug)]
pub struct Closure {
    pub algebra: StructureLieAlgebra,
    /// Basis vectors in ambient coordinates; `algebra` coordinates refer to these.
    pub basis: Vec<Vector>,
}

impl StructureLieAlgebra {
    /// Builds an algebra from a full table, checking shape and antisymmetry.
    pub fn from_table(field: &FieldSpec, table: Vec<Vec<Vector>>, generators: Vec<Vector>) -> Result<Self> {
        let dim = table.len();
        for (i, row) in table.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::LengthMismatch { expected: dim, got: row.len() });
            }
            for (j, v) in row.iter().enumerate() {
                if v.len() != dim {
                    return Err(Error::LengthMismatch { expected: dim, got: v.len() });
                }
                if v.iter().any(|x| &x.field() != field) {
                    return Err(Error::FieldMismatch);
                }
                let back: Vector = table[j][i].iter().map(|x| -x).collect();
                if *v != back {
                    return Err(Error::Inconsistent(format!("table not antisymmetric at ({i}, {j})")));
                }
            }
        }
        for g in &generators {
            if g.len() != dim {
                return Err(Error::LengthMismatch { expected: dim, got: g.len() });
            }
        }
        Ok(StructureLieAlgebra { field: field.clone(), dim, table, generators })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_element(&self, i: usize) -> Vector {
        unit_vec(&self.field, self.dim, i)
    }

    pub fn structure_constant(&self, i: usize, j: usize) -> &Vector {
        &self.table[i][j]
    }

    /// The extremal generators this algebra was presented with.
    pub fn extremal_generators(&self) -> &[Vector] {
        &self.generators
    }

    pub fn set_extremal_generators(&mut self, gens: Vec<Vector>) {
        self.generators = gens;
    }

    pub fn zero(&self) -> Vector {
        zero_vec(&self.field, self.dim)
    }

    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        let mut out = self.zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if i != j && !yj.is_zero() {
                    axpy(&mut out, &(xi * yj), &self.table[i][j]);
                }
            }
        }
        out
    }

    /// Matrix of `ad x`; column `j` is `[x, b_j]`.
    pub fn ad_matrix(&self, x: &[Scalar]) -> Mat {
        let mut m = Mat::zeros(&self.field, self.dim, self.dim);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..self.dim {
                for (k, c) in self.table[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        let v = m.get(k, j) + &(xi * c);
                        m.set(k, j, v);
                    }
                }
            }
        }
        m
    }

    /// First basis triple violating the Jacobi identity, if any.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize)> {
        let e = |i| self.basis_element(i);
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let bij = self.bracket(&e(i), &e(j));
                for k in j + 1..self.dim {
                    let a = self.bracket(&e(i), &self.table[j][k]);
                    let b = self.bracket(&e(j), &self.table[k][i]);
                    let c = self.bracket(&e(k), &bij);
                    if !is_zero_vec(&add_vec(&add_vec(&a, &b), &c)) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    pub fn center(&self) -> Subspace {
        let mut rows = Vec::with_capacity(self.dim * self.dim);
        for i in 0..self.dim {
            rows.extend(self.ad_matrix(&self.basis_element(i)).row_vecs());
        }
        if rows.is_empty() {
            return Subspace::zero(&self.field, 0);
        }
        Mat::from_rows(&self.field, rows).unwrap().kernel()
    }

    /// Smallest ideal containing `xs`.
    pub fn ideal_generated(&self, xs: &[Vector]) -> Result<Subspace> {
        let mut span = Subspace::zero(&self.field, self.dim);
        let mut queue = Vec::new();
        for x in xs {
            if span.insert(x.clone())? {
                queue.push(x.clone());
            }
        }
        while let Some(v) = queue.pop() {
            for i in 0..self.dim {
                let w = self.bracket(&self.basis_element(i), &v);
                if span.insert(w.clone())? {
                    queue.push(w);
                }
            }
        }
        Ok(span)
    }

    /// Randomized simplicity test: trivial center and every probed nonzero
    /// element generates the whole algebra as an ideal. Probes are the basis,
    /// the radical of the extremal form when it exists, and random elements.
    pub fn simplicity_probe<R: Rng + ?Sized>(&self, rng: &mut R, samples: usize) -> Result<SimplicityProbe> {
        let center_dim = self.center().dim();
        let mut probes: Vec<Vector> = (0..self.dim).map(|i| self.basis_element(i)).collect();
        // the radical of the extremal form is an ideal, so it makes a good probe
        if let Ok(g) = self.extremal_form() {
            probes.extend(g.radical().basis().iter().cloned());
        }
        for _ in 0..samples {
            let v: Vector = (0..self.dim).map(|_| self.field.random(rng)).collect();
            if !is_zero_vec(&v) {
                probes.push(v);
            }
        }
        let mut proper_ideal = None;
        for p in &probes {
            let ideal = self.ideal_generated(std::slice::from_ref(p))?;
            if ideal.dim() < self.dim {
                proper_ideal = Some((p.clone(), ideal.dim()));
                break;
            }
        }
        Ok(SimplicityProbe { center_dim, probes: probes.len(), proper_ideal })
    }

    /// `exp(x, λ) y = y + λ[x, y] + λ² g(x, y) x` for extremal `x`.
    pub fn exp_apply(&self, x: &[Scalar], lambda: &Scalar, y: &[Scalar]) -> Result<Vector> {
        let g = self.g_value(x, y)?;
        let mut out = y.to_vec();
        axpy(&mut out, lambda, &self.bracket(x, y));
        axpy(&mut out, &(&(lambda * lambda) * &g), x);
        Ok(out)
    }

    /// `g(x, y)` read off from `[x, [x, y]] = 2 g(x, y) x`; `x` must be extremal.
    pub fn g_value(&self, x: &[Scalar], y: &[Scalar]) -> Result<Scalar> {
        let xxy = self.bracket(x, &self.bracket(x, y));
        if is_zero_vec(&xxy) {
            return Ok(self.field.zero());
        }
        let c = crate::linalg::proportional(&xxy, x).ok_or(Error::NotExtremal)?;
        c.div_checked(&self.field.from_i64(2))
    }

    /// Extends the extremal generators by `exp`-images until they span.
    pub fn extremal_spanning_set(&self) -> Result<Vec<Vector>> {
        let mut span = Subspace::zero(&self.field, self.dim);
        let mut set = Vec::new();
        for g in &self.generators {
            if span.insert(g.clone())? {
                set.push(g.clone());
            }
        }
        let one = self.field.one();
        let mut grew = true;
        while grew {
            grew = false;
            let mut i = 0;
            while i < set.len() {
                let mut j = 0;
                while j < set.len() {
                    if i != j {
                        let e = self.exp_apply(&set[i], &one, &set[j])?;
                        if span.insert(e.clone())? {
                            set.push(e);
                            grew = true;
                        }
                    }
                    j += 1;
                }
                i += 1;
            }
        }
        if set.len() < self.dim {
            return Err(Error::Hypothesis(format!(
                "extremal generators span a subalgebra of dimension {} < {}",
                set.len(),
                self.dim
            )));
        }
        Ok(set)
    }

    /// Gram matrix of the extremal form in the current basis.
    pub fn extremal_form(&self) -> Result<ExtremalFormTable> {
        let xs = self.extremal_spanning_set()?;
        let d = self.dim;
        let mut gs = Mat::zeros(&self.field, d, d);
        for (k, x) in xs.iter().enumerate() {
            for j in 0..d {
                gs.set(k, j, self.g_value(x, &self.basis_element(j))?);
            }
        }
        let c = Mat::from_rows(&self.field, xs)?;
        let gram = c.inverse()?.mul(&gs)?;
        if gram != gram.transpose() {
            return Err(Error::Inconsistent("extremal form not symmetric".into()));
        }
        Ok(ExtremalFormTable { gram })
    }

    /// The same structure constants read over the quadratic extension.
    pub fn base_change_quadratic(&self) -> Result<StructureLieAlgebra> {
        let k2 = self.field.quadratic_extension()?;
        let lift = |v: &Vector| -> Result<Vector> { v.iter().map(|x| k2.embed(x)).collect() };
        let table = self
            .table
            .iter()
            .map(|row| row.iter().map(&lift).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let generators = self.generators.iter().map(&lift).collect::<Result<Vec<_>>>()?;
        Ok(StructureLieAlgebra { field: k2, dim: self.dim, table, generators })
    }

    /// Change of basis `b'_i = sum_k a[k][i] b_k`, with the product scaled by `gamma`.
    pub fn transform(&self, a: &Mat, gamma: &Scalar) -> Result<StructureLieAlgebra> {
        let inv = a.inverse()?;
        let cols: Vec<Vector> = (0..self.dim).map(|i| a.col(i)).collect();
        let mut table = vec![vec![self.zero(); self.dim]; self.dim];
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let w = inv.mul_vec(&self.bracket(&cols[i], &cols[j]))?;
                let w: Vector = w.iter().map(|x| x * gamma).collect();
                table[j][i] = w.iter().map(|x| -x).collect();
                table[i][j] = w;
            }
        }
        let generators = self.generators.iter().map(|g| inv.mul_vec(g)).collect::<Result<Vec<_>>>()?;
        Ok(StructureLieAlgebra { field: self.field.clone(), dim: self.dim, table, generators })
    }

    /// Random change of basis (and optional product scaling); returns the matrix used.
    pub fn scramble<R: Rng + ?Sized>(&self, rng: &mut R, gamma: Option<&Scalar>) -> Result<(StructureLieAlgebra, Mat)> {
        let one = self.field.one();
        let gamma = gamma.unwrap_or(&one);
        loop {
            let rows: Vec<Vector> =
                (0..self.dim).map(|_| (0..self.dim).map(|_| self.field.random(rng)).collect()).collect();
            let a = Mat::from_rows(&self.field, rows)?;
            if a.rank() == self.dim {
                return Ok((self.transform(&a, gamma)?, a));
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let mut entries = Vec::new();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let terms: Vec<Value> = self.table[i][j]
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| json!([k, c.to_json()]))
                    .collect();
                if !terms.is_empty() {
                    entries.push(json!([i, j, terms]));
                }
            }
        }
        json!({
            "field": self.field,
            "dim": self.dim,
            "bracket": entries,
            "extremal_generators": self.generators.iter().map(|g| crate::linalg::vec_to_json(g)).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field: FieldSpec = serde_json::from_value(v.get("field").cloned().ok_or_else(|| perr("missing field"))?)
            .map_err(|e| perr(&format!("bad field: {e}")))?;
        field.validate()?;
        let dim = v.get("dim").and_then(Value::as_u64).ok_or_else(|| perr("missing dim"))? as usize;
        let mut table = vec![vec![zero_vec(&field, dim); dim]; dim];
        let entries = v.get("bracket").and_then(Value::as_array).ok_or_else(|| perr("missing bracket"))?;
        for e in entries {
            let e = e.as_array().filter(|a| a.len() == 3).ok_or_else(|| perr("bracket entry must be [i, j, terms]"))?;
            let i = e[0].as_u64().ok_or_else(|| perr("bad index"))? as usize;
            let j = e[1].as_u64().ok_or_else(|| perr("bad index"))? as usize;
            if i >= j || j >= dim {
                return Err(perr(&format!("bracket entry ({i}, {j}) must satisfy i < j < dim")));
            }
            let mut w = zero_vec(&field, dim);
            for t in e[2].as_array().ok_or_else(|| perr("terms must be a list"))? {
                let t = t.as_array().filter(|a| a.len() == 2).ok_or_else(|| perr("term must be [k, c]"))?;
                let k = t[0].as_u64().ok_or_else(|| perr("bad index"))? as usize;
                if k >= dim {
                    return Err(perr(&format!("index {k} out of range")));
                }
                w[k] += &field.scalar_from_json(&t[1])?;
            }
            table[j][i] = w.iter().map(|x| -x).collect();
            table[i][j] = w;
        }
        let generators = match v.get("extremal_generators") {
            None | Some(Value::Null) => Vec::new(),
            Some(g) => g
                .as_array()
                .ok_or_else(|| perr("extremal_generators must be a list"))?
                .iter()
                .map(|x| {
                    let x = crate::linalg::vec_from_json(&field, x)?;
                    if x.len() != dim {
                        return Err(perr("generator has wrong length"));
                    }
                    Ok(x)
                })
                .collect::<Result<Vec<_>>>()?,
        };
        Ok(StructureLieAlgebra { field, dim, table, generators })
    }
}

fn perr(msg: &str) -> Error {
    Error::Parse(msg.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicityProbe {
    pub center_dim: usize,
    pub probes: usize,
    /// A probe generating a proper ideal, with that ideal's dimension.
    pub proper_ideal: Option<(Vector, usize)>,
}

impl SimplicityProbe {
    pub fn looks_simple(&self) -> bool {
        self.center_dim == 0 && self.proper_ideal.is_none()
    }
}

/// Gram matrix of the extremal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalFormTable {
    pub gram: Mat,
}

impl ExtremalFormTable {
    pub fn eval(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        crate::linalg::dot(x, &self.gram.mul_vec(y).unwrap())
    }

    pub fn radical(&self) -> Subspace {
        self.gram.kernel()
    }

    /// First basis triple with `g([a, b], c) != g(a, [b, c])`.
    pub fn invariance_violation(&self, l: &StructureLieAlgebra) -> Option<(usize, usize, usize)> {
        let d = l.dim();
        let e = |i| l.basis_element(i);
        for a in 0..d {
            for b in 0..d {
                let ab = l.structure_constant(a, b);
                for c in 0..d {
                    if self.eval(ab, &e(c)) != self.eval(&e(a), l.structure_constant(b, c)) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }
}

impl Closure {
    /// Coordinates of an ambient vector with respect to the closure basis.
    pub fn coords_of(&self, v: &[Scalar]) -> Option<Vector> {
        Coordinatizer::new(self.algebra.field(), self.basis.clone()).ok()?.coords(v)
    }
}

/// Subalgebra generated by `generators` under an arbitrary bilinear bracket.
pub fn from_bracket_closure<F>(
    field: &FieldSpec,
    ambient: usize,
    generators: &[Vector],
    bracket: F,
    cap: usize,
) -> Result<Closure>
where
    F: Fn(&[Scalar], &[Scalar]) -> Result<Vector>,
{
    let mut span = Subspace::zero(field, ambient);
    let mut basis = Vec::new();
    let gens: Vec<Vector> = generators.iter().filter(|g| !is_zero_vec(g)).cloned().collect();
    for g in &gens {
        if span.insert(g.clone())? {
            basis.push(g.clone());
        }
    }
    if basis.len() > cap {
        return Err(Error::DimensionBudget(cap));
    }
    let mut idx = 0;
    while idx < basis.len() {
        for g in &gens {
            let w = bracket(g, &basis[idx])?;
            if span.insert(w.clone())? {
                basis.push(w);
                if basis.len() > cap {
                    return Err(Error::DimensionBudget(cap));
                }
            }
        }
        idx += 1;
    }
    let coord = Coordinatizer::new(field, basis.clone())?;
    let d = basis.len();
    let mut table = vec![vec![zero_vec(field, d); d]; d];
    for i in 0..d {
        for j in i + 1..d {
            let w = bracket(&basis[i], &basis[j])?;
            let c = coord.coords(&w).ok_or_else(|| Error::Inconsistent("bracket closure not closed".into()))?;
            table[j][i] = c.iter().map(|x| -x).collect();
            table[i][j] = c;
        }
    }
    let generators = gens.iter().map(|g| coord.coords(g).unwrap()).collect();
    let algebra = StructureLieAlgebra { field: field.clone(), dim: d, table, generators };
    Ok(Closure { algebra, basis })
}

/// Pure tensors of the basis vectors and of their pairwise sums.
pub fn standard_pure_vectors(field: &FieldSpec, vectors: &[Vector]) -> Vec<Vector> {
    let mut out = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        out.push(v.clone());
        for w in &vectors[i + 1..] {
            out.push(add_vec(v, w));
        }
    }
    let _ = field;
    out
}

/// The tensor model of a nondegenerate space, in the basis
/// `{E_ii} ∪ {E_ij + E_ji : i < j}` of symmetric matrices.
pub fn sp_model(space: &Arc<SymplecticSpace>) -> Result<StructureLieAlgebra> {
    if !space.is_nondegenerate() {
        return Err(Error::DegenerateForm);
    }
    let k = space.field();
    let n = space.dim();
    let d = n * (n + 1) / 2;
    let elems: Vec<SfElement> =
        (0..d).map(|i| SfElement::from_coords(space.clone(), &unit_vec(k, d, i))).collect::<Result<_>>()?;
    let mut table = vec![vec![zero_vec(k, d); d]; d];
    for i in 0..d {
        for j in i + 1..d {
            let c = elems[i].bracket(&elems[j])?.coords();
            table[j][i] = c.iter().map(|x| -x).collect();
            table[i][j] = c;
        }
    }
    let units: Vec<Vector> = (0..n).map(|i| unit_vec(k, n, i)).collect();
    let generators = standard_pure_vectors(k, &units)
        .iter()
        .map(|v| Ok(SfElement::pure(space.clone(), v)?.coords()))
        .collect::<Result<Vec<_>>>()?;
    Ok(StructureLieAlgebra { field: k.clone(), dim: d, table, generators })
}

/// `sp_{2m}` on the standard space.
pub fn sp(field: &FieldSpec, m: usize) -> Result<StructureLieAlgebra> {
    sp_model(&Arc::new(SymplecticSpace::standard(field, m, 0)?))
}

/// Subalgebra of the tensor model generated by the pure tensors of `vectors`,
/// in the coordinates of [`SfElement::coords`].
pub fn model_subalgebra(space: &Arc<SymplecticSpace>, vectors: &[Vector]) -> Result<Closure> {
    let gens = vectors.iter().map(|v| Ok(SfElement::pure(space.clone(), v)?.coords())).collect::<Result<Vec<_>>>()?;
    let n = space.dim();
    let sp = space.clone();
    from_bracket_closure(
        space.field(),
        n * (n + 1) / 2,
        &gens,
        move |a, b| {
            let x = SfElement::from_coords(sp.clone(), a)?;
            let y = SfElement::from_coords(sp.clone(), b)?;
            Ok(x.bracket(&y)?.coords())
        },
        DEFAULT_CAP,
    )
}

/// The span of the pure tensors of an arbitrary (possibly degenerate) space,
/// realized inside `End(V)` with the commutator.
pub fn endomorphism_model(space: &Arc<SymplecticSpace>) -> Result<Closure> {
    let k = space.field();
    let n = space.dim();
    let units: Vec<Vector> = (0..n).map(|i| unit_vec(k, n, i)).collect();
    let gens = standard_pure_vectors(k, &units)
        .iter()
        .map(|v| pure_endomorphism(space, v))
        .collect::<Result<Vec<_>>>()?;
    let kk = k.clone();
    from_bracket_closure(
        k,
        n * n,
        &gens,
        move |a, b| {
            let ma = Mat::from_rows(&kk, a.chunks(n).map(<[Scalar]>::to_vec).collect())?;
            let mb = Mat::from_rows(&kk, b.chunks(n).map(<[Scalar]>::to_vec).collect())?;
            let c = ma.mul(&mb)?.sub(&mb.mul(&ma)?)?;
            Ok((0..n).flat_map(|i| c.row(i).to_vec()).collect())
        },
        DEFAULT_CAP,
    )
}

/// The endomorphism `w ↦ f(v, w) v`, flattened row by row.
pub fn pure_endomorphism(space: &Arc<SymplecticSpace>, v: &[Scalar]) -> Result<Vector> {
    let m = SfElement::pure(space.clone(), v)?.endomorphism();
    Ok((0..space.dim()).flat_map(|i| m.row(i).to_vec()).collect())
}

/// The degenerate 3-space spanned by the first three standard basis vectors
/// of the 4-dimensional standard space; its radical is the second vector.
pub fn degenerate_three_space(field: &FieldSpec) -> Result<Arc<SymplecticSpace>> {
    let (v, w) = three_space(field)?;
    Ok(Arc::new(v.restrict(&Subspace::from_vectors(field, 4, w)?)?))
}

fn three_space(field: &FieldSpec) -> Result<(Arc<SymplecticSpace>, Vec<Vector>)> {
    let v = Arc::new(SymplecticSpace::standard(field, 2, 0)?);
    let w: Vec<Vector> = (0..3).map(|i| unit_vec(field, 4, i)).collect();
    Ok((v, w))
}

/// Pure tensors of a 3-dimensional subspace of a 4-dimensional symplectic
/// space, taken inside the tensor model of the big space (dimension 6).
pub fn sp3(field: &FieldSpec) -> Result<Closure> {
    let (v, w) = three_space(field)?;
    model_subalgebra(&v, &standard_pure_vectors(field, &w))
}

/// Tensor model of the degenerate 3-dimensional space itself (dimension 5).
pub fn psp3(field: &FieldSpec) -> Result<Closure> {
    endomorphism_model(&degenerate_three_space(field)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f3() -> FieldSpec {
        FieldSpec::prime(3).unwrap()
    }

    #[test]
    fn sp4_basics() {
        let l = sp(&f3(), 2).unwrap();
        assert_eq!(l.dim(), 10);
        assert_eq!(l.extremal_generators().len(), 10);
        assert_eq!(l.jacobi_violation(), None);
        assert_eq!(l.center().dim(), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(l.simplicity_probe(&mut rng, 5).unwrap().looks_simple());
    }

    #[test]
    fn sp6_dimension() {
        let l = sp(&FieldSpec::prime(5).unwrap(), 3).unwrap();
        assert_eq!(l.dim(), 21);
        assert_eq!(l.jacobi_violation(), None);
    }

    #[test]
    fn closures_of_small_spaces() {
        for p in [3, 5] {
            let k = FieldSpec::prime(p).unwrap();
            let a = sp3(&k).unwrap().algebra;
            let b = psp3(&k).unwrap().algebra;
            assert_eq!((a.dim(), b.dim()), (6, 5));
            assert_eq!(a.jacobi_violation(), None);
            assert_eq!(b.jacobi_violation(), None);
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            assert!(!b.simplicity_probe(&mut rng, 3).unwrap().looks_simple());
        }
        let full = endomorphism_model(&Arc::new(SymplecticSpace::standard(&f3(), 2, 0).unwrap())).unwrap();
        assert_eq!(full.algebra.dim(), 10);
    }

    #[test]
    fn closure_cap() {
        let space = Arc::new(SymplecticSpace::standard(&f3(), 3, 0).unwrap());
        let units: Vec<Vector> = (0..6).map(|i| unit_vec(&f3(), 6, i)).collect();
        let gens: Vec<Vector> = standard_pure_vectors(&f3(), &units)
            .iter()
            .map(|v| SfElement::pure(space.clone(), v).unwrap().coords())
            .collect();
        let sp2 = space.clone();
        let r = from_bracket_closure(
            &f3(),
            21,
            &gens,
            move |a, b| {
                let x = SfElement::from_coords(sp2.clone(), a)?;
                Ok(x.bracket(&SfElement::from_coords(sp2.clone(), b)?)?.coords())
            },
            8,
        );
        assert_eq!(r.unwrap_err(), Error::DimensionBudget(8));
    }

    #[test]
    fn extremal_form_matches_model() {
        let k = FieldSpec::prime(5).unwrap();
        let space = Arc::new(SymplecticSpace::standard(&k, 2, 0).unwrap());
        let l = sp_model(&space).unwrap();
        let g = l.extremal_form().unwrap();
        for i in 0..10 {
            for j in 0..10 {
                let a = SfElement::from_coords(space.clone(), &l.basis_element(i)).unwrap();
                let b = SfElement::from_coords(space.clone(), &l.basis_element(j)).unwrap();
                assert_eq!(g.gram.get(i, j), &a.extremal_form(&b).unwrap());
            }
        }
        assert_eq!(g.invariance_violation(&l), None);
        assert_eq!(g.radical().dim(), 0);
    }

    #[test]
    fn degenerate_models_have_degenerate_forms() {
        let k = FieldSpec::prime(5).unwrap();
        let b = psp3(&k).unwrap().algebra;
        let g = b.extremal_form().unwrap();
        assert!(g.radical().dim() > 0);
        assert_eq!(g.invariance_violation(&b), None);
    }

    #[test]
    fn scramble_preserves_structure() {
        let l = sp(&f3(), 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let two = f3().from_i64(2);
        let (s, a) = l.scramble(&mut rng, Some(&two)).unwrap();
        assert_eq!(s.jacobi_violation(), None);
        // brackets transform covariantly
        let x = l.basis_element(0);
        let y = l.basis_element(4);
        let inv = a.inverse().unwrap();
        let lhs = s.bracket(&inv.mul_vec(&x).unwrap(), &inv.mul_vec(&y).unwrap());
        let rhs: Vector = inv.mul_vec(&l.bracket(&x, &y)).unwrap().iter().map(|c| c * &two).collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn json_roundtrip_and_errors() {
        for k in [f3(), FieldSpec::Rational, FieldSpec::prime_square(3, 2).unwrap()] {
            let l = sp(&k, 2).unwrap();
            let back = StructureLieAlgebra::from_json(&serde_json::from_str(&l.to_json().to_string()).unwrap()).unwrap();
            assert_eq!(back, l);
        }
        let bad = json!({"field": {"type": "prime", "p": 3}, "dim": 2, "bracket": [[1, 0, [[0, 1]]]]});
        assert!(matches!(StructureLieAlgebra::from_json(&bad), Err(Error::Parse(_))));
        let bad = json!({"field": {"type": "prime", "p": 4}, "dim": 2, "bracket": []});
        assert!(StructureLieAlgebra::from_json(&bad).is_err());
    }

    #[test]
    fn corrupted_table_breaks_jacobi() {
        let l = sp(&f3(), 2).unwrap();
        let mut v = l.to_json();
        let entry = v["bracket"][0][2][0][1].as_i64().unwrap();
        v["bracket"][0][2][0][1] = json!(entry + 1);
        let bad = StructureLieAlgebra::from_json(&v).unwrap();
        assert!(bad.jacobi_violation().is_some());
    }

    #[test]
    fn base_change() {
        let l = sp(&f3(), 1).unwrap();
        let l2 = l.base_change_quadratic().unwrap();
        assert_eq!(l2.field(), &FieldSpec::prime_square(3, 2).unwrap());
        assert_eq!(l2.jacobi_violation(), None);
        assert!(sp(&FieldSpec::Rational, 1).unwrap().base_change_quadratic().is_err());
    }
}
