//! Dense exact linear algebra: matrices, row reduction, subspaces.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};

/// Coordinate vector over a single field.
pub type Vector = Vec<Scalar>;

pub fn zero_vec(field: &FieldSpec, n: usize) -> Vector {
    vec![field.zero(); n]
}

pub fn unit_vec(field: &FieldSpec, n: usize, i: usize) -> Vector {
    let mut v = zero_vec(field, n);
    v[i] = field.one();
    v
}

pub fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

pub fn add_vec(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_vec(c: &Scalar, a: &[Scalar]) -> Vector {
    a.iter().map(|x| c * x).collect()
}

/// `acc += c * a`.
pub fn axpy(acc: &mut [Scalar], c: &Scalar, a: &[Scalar]) {
    if c.is_zero() {
        return;
    }
    for (x, y) in acc.iter_mut().zip(a) {
        if !y.is_zero() {
            *x += &(c * y);
        }
    }
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mut acc = a[0].field().zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += &(x * y);
        }
    }
    acc
}

/// Scales `v` so its first nonzero coordinate is 1. Returns the scale used.
pub fn normalize_projective(v: &[Scalar]) -> Option<(Vector, Scalar)> {
    let lead = v.iter().find(|x| !x.is_zero())?;
    let inv = lead.inv().ok()?;
    Some((scale_vec(&inv, v), lead.clone()))
}

/// If `w = c v` for some scalar `c`, returns `c`.
pub fn proportional(w: &[Scalar], v: &[Scalar]) -> Option<Scalar> {
    let k = v.iter().position(|x| !x.is_zero())?;
    let c = &w[k] / &v[k];
    w.iter().zip(v).all(|(a, b)| *a == &c * b).then_some(c)
}

pub fn vec_to_json(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(Scalar::to_json).collect())
}

pub fn vec_from_json(field: &FieldSpec, v: &Value) -> Result<Vector> {
    v.as_array()
        .ok_or_else(|| Error::Parse("expected array".into()))?
        .iter()
        .map(|x| field.scalar_from_json(x))
        .collect()
}

/// Row-major dense matrix over one field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Mat {
    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> Self {
        Mat { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds a matrix from rows, rejecting ragged input and mixed fields.
    pub fn from_rows(field: &FieldSpec, rows: Vec<Vector>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::LengthMismatch { expected: c, got: row.len() });
            }
            for x in row {
                if x.field() != *field {
                    return Err(Error::FieldMismatch);
                }
                data.push(x);
            }
        }
        Ok(Mat { field: field.clone(), rows: r, cols: c, data })
    }

    pub fn from_i64(field: &FieldSpec, rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(field, rows.iter().map(|r| r.iter().map(|&x| field.from_i64(x)).collect()).collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(field: &FieldSpec, n_rows: usize, cols: &[Vector]) -> Result<Self> {
        let mut m = Self::zeros(field, n_rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != n_rows {
                return Err(Error::LengthMismatch { expected: n_rows, got: c.len() });
            }
            for (i, x) in c.iter().enumerate() {
                if x.field() != *field {
                    return Err(Error::FieldMismatch);
                }
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn mul(&self, o: &Mat) -> Result<Mat> {
        if self.field != o.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != o.rows {
            return Err(Error::LengthMismatch { expected: self.cols, got: o.rows });
        }
        let mut out = Mat::zeros(&self.field, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch { expected: self.cols, got: v.len() });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    pub fn add(&self, o: &Mat) -> Result<Mat> {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Mat) -> Result<Mat> {
        self.zip(o, |a, b| a - b)
    }

    fn zip(&self, o: &Mat, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Result<Mat> {
        if self.field != o.field {
            return Err(Error::FieldMismatch);
        }
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::LengthMismatch { expected: self.rows * self.cols, got: o.rows * o.cols });
        }
        let data = self.data.iter().zip(&o.data).map(|(a, b)| f(a, b)).collect();
        Ok(Mat { field: self.field.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: &Scalar) -> Mat {
        Mat { field: self.field.clone(), rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| c * x).collect() }
    }

    /// `a bᵀ`.
    pub fn outer(a: &[Scalar], b: &[Scalar]) -> Mat {
        let field = a.first().or(b.first()).map(Scalar::field).unwrap_or(FieldSpec::Rational);
        let data = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        Mat { field, rows: a.len(), cols: b.len(), data }
    }

    /// Entries in row-major order.
    pub fn flatten(&self) -> Vector {
        self.data.clone()
    }

    pub fn trace(&self) -> Scalar {
        let mut t = self.field.zero();
        for i in 0..self.rows.min(self.cols) {
            t += self.get(i, i);
        }
        t
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    pub fn inverse(&self) -> Result<Mat> {
        if self.rows != self.cols {
            return Err(Error::LengthMismatch { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        let mut aug = Mat::zeros(&self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, self.field.one());
        }
        let r = aug.rref();
        if r.pivots.len() < n || r.pivots[n - 1] >= n {
            return Err(Error::DivisionByZero);
        }
        let mut inv = Mat::zeros(&self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.reduced.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    pub fn determinant(&self) -> Scalar {
        let n = self.rows;
        let mut m = self.clone();
        let mut det = self.field.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m.get(r, c).is_zero()) else {
                return self.field.zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det *= &piv;
            let inv = piv.inv().unwrap();
            for r in c + 1..n {
                let f = m.get(r, c) * &inv;
                if !f.is_zero() {
                    m.row_axpy(r, &-f, c);
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// `row[dst] += c * row[src]`.
    fn row_axpy(&mut self, dst: usize, c: &Scalar, src: usize) {
        for j in 0..self.cols {
            let s = self.get(src, j);
            if !s.is_zero() {
                let v = self.get(dst, j) + &(c * s);
                self.set(dst, j, v);
            }
        }
    }

    /// Reduced row echelon form together with rank and null space.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m.get(r, c).inv().unwrap();
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i != r {
                    let f = m.get(i, c).clone();
                    if !f.is_zero() {
                        m.row_axpy(i, &-f, r);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let rank = pivots.len();
        // kernel: one vector per free column
        let mut kernel = Vec::new();
        for free in (0..m.cols).filter(|c| !pivots.contains(c)) {
            let mut v = zero_vec(&m.field, m.cols);
            v[free] = m.field.one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.get(i, free);
            }
            kernel.push(v);
        }
        let kernel = Subspace::from_vectors(&m.field, m.cols, kernel).expect("kernel vectors share the field");
        let mut reduced = Mat::zeros(&m.field, m.rows, m.cols);
        reduced.data = m.data;
        Rref { reduced, rank, pivots, kernel }
    }

    /// `{v : self * v = 0}`.
    pub fn kernel(&self) -> Subspace {
        self.rref().kernel
    }

    pub fn to_json(&self) -> Value {
        Value::Array((0..self.rows).map(|i| vec_to_json(self.row(i))).collect())
    }

    pub fn from_json(field: &FieldSpec, v: &Value) -> Result<Mat> {
        let rows = v
            .as_array()
            .ok_or_else(|| Error::Parse("expected matrix".into()))?
            .iter()
            .map(|r| vec_from_json(field, r))
            .collect::<Result<Vec<_>>>()?;
        Mat::from_rows(field, rows)
    }
}

/// Output of [`Mat::rref`].
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: Mat,
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub kernel: Subspace,
}

/// A linear subspace stored by an echelonized basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    field: FieldSpec,
    ambient: usize,
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: &FieldSpec, ambient: usize) -> Self {
        Subspace { field: field.clone(), ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(field: &FieldSpec, ambient: usize) -> Self {
        Self::from_vectors(field, ambient, (0..ambient).map(|i| unit_vec(field, ambient, i)).collect()).unwrap()
    }

    /// Span of arbitrary (possibly dependent) vectors.
    pub fn from_vectors(field: &FieldSpec, ambient: usize, vs: Vec<Vector>) -> Result<Self> {
        let mut s = Self::zero(field, ambient);
        for v in vs {
            s.insert(v)?;
        }
        Ok(s)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn basis_mat(&self) -> Mat {
        if self.basis.is_empty() {
            return Mat::zeros(&self.field, 0, self.ambient);
        }
        Mat::from_rows(&self.field, self.basis.clone()).unwrap()
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the span.
    pub fn reduce(&self, v: &[Scalar]) -> Vector {
        let mut r = v.to_vec();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            let c = r[p].clone();
            if !c.is_zero() {
                axpy(&mut r, &-c, b);
            }
        }
        r
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        v.len() == self.ambient && is_zero_vec(&self.reduce(v))
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: Vector) -> Result<bool> {
        if v.len() != self.ambient {
            return Err(Error::LengthMismatch { expected: self.ambient, got: v.len() });
        }
        if v.iter().any(|x| x.field() != self.field) {
            return Err(Error::FieldMismatch);
        }
        let r = self.reduce(&v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return Ok(false);
        };
        let inv = r[p].inv().unwrap();
        let r = scale_vec(&inv, &r);
        // keep fully reduced: clear column p from existing rows
        for b in &mut self.basis {
            let c = b[p].clone();
            if !c.is_zero() {
                axpy(b, &-c, &r);
            }
        }
        let pos = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(pos, p);
        self.basis.insert(pos, r);
        Ok(true)
    }

    fn check(&self, o: &Subspace) -> Result<()> {
        if self.field != o.field {
            return Err(Error::FieldMismatch);
        }
        if self.ambient != o.ambient {
            return Err(Error::AmbientMismatch(self.ambient, o.ambient));
        }
        Ok(())
    }

    pub fn sum(&self, o: &Subspace) -> Result<Subspace> {
        self.check(o)?;
        let mut s = self.clone();
        for b in &o.basis {
            s.insert(b.clone())?;
        }
        Ok(s)
    }

    /// Intersection via the kernel of `[A; -B]^T`.
    pub fn intersection(&self, o: &Subspace) -> Result<Subspace> {
        self.check(o)?;
        let (k, l) = (self.dim(), o.dim());
        if k == 0 || l == 0 {
            return Ok(Subspace::zero(&self.field, self.ambient));
        }
        let mut cols = Vec::with_capacity(k + l);
        cols.extend(self.basis.iter().cloned());
        cols.extend(o.basis.iter().map(|b| b.iter().map(|x| -x).collect::<Vector>()));
        let m = Mat::from_cols(&self.field, self.ambient, &cols)?;
        let ker = m.kernel();
        let mut out = Subspace::zero(&self.field, self.ambient);
        for c in ker.basis() {
            let mut v = zero_vec(&self.field, self.ambient);
            for (i, b) in self.basis.iter().enumerate() {
                axpy(&mut v, &c[i], b);
            }
            out.insert(v)?;
        }
        Ok(out)
    }

    /// Coordinates of `v` w.r.t. the echelon basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vector> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }
}

/// Solves for coordinates with respect to a fixed, linearly independent list.
#[derive(Clone, Debug)]
pub struct Coordinatizer {
    field: FieldSpec,
    vectors: Vec<Vector>,
    pivots: Vec<usize>,
    /// inverse of the square block of `vectors` on the pivot columns
    inv: Mat,
}

impl Coordinatizer {
    pub fn new(field: &FieldSpec, vectors: Vec<Vector>) -> Result<Self> {
        let k = vectors.len();
        if k == 0 {
            return Ok(Coordinatizer { field: field.clone(), vectors, pivots: Vec::new(), inv: Mat::zeros(field, 0, 0) });
        }
        let n = vectors[0].len();
        let rows = Mat::from_rows(field, vectors.clone())?;
        let r = rows.rref();
        if r.rank < k {
            return Err(Error::Inconsistent("vectors are linearly dependent".into()));
        }
        let pivots = r.pivots.clone();
        // block[i][j] = vectors[j][pivots[i]], so block * c = v restricted to pivots
        let mut block = Mat::zeros(field, k, k);
        for (i, &p) in pivots.iter().enumerate() {
            for (j, v) in vectors.iter().enumerate() {
                block.set(i, j, v[p].clone());
            }
        }
        let inv = block.inverse()?;
        debug_assert_eq!(n, rows.cols());
        Ok(Coordinatizer { field: field.clone(), vectors, pivots, inv })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    /// `c` with `sum c_i vectors[i] = v`, or `None` outside the span.
    pub fn coords(&self, v: &[Scalar]) -> Option<Vector> {
        if self.vectors.is_empty() {
            return is_zero_vec(v).then(Vec::new);
        }
        let rhs: Vector = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let c = self.inv.mul_vec(&rhs).ok()?;
        let mut back = zero_vec(&self.field, v.len());
        for (ci, b) in c.iter().zip(&self.vectors) {
            axpy(&mut back, ci, b);
        }
        (back == v).then_some(c)
    }

    pub fn combine(&self, c: &[Scalar]) -> Vector {
        let mut out = zero_vec(&self.field, self.vectors.first().map_or(0, Vec::len));
        for (ci, b) in c.iter().zip(&self.vectors) {
            axpy(&mut out, ci, b);
        }
        out
    }
}
