//! The tensor model: the span of the pure tensors `v ⊗ f_v` inside `V ⊗ V*`.
//!
//! An element is stored by a symmetric coefficient matrix `S`; it acts on `V`
//! as `v ↦ S J v` with `J` the Gram matrix. The pure tensor `v ⊗ f_v` is
//! `v vᵀ`, and `v ⊗ f_w + w ⊗ f_v` is `v wᵀ + w vᵀ`. The bracket becomes
//! `S_a J S_b - S_b J S_a`.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::linalg::{is_zero_vec, Mat, Subspace, Vector};
use crate::symplectic::SymplecticSpace;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SfElement {
    space: Arc<SymplecticSpace>,
    s: Mat,
}

fn outer_sym(space: &SymplecticSpace, v: &[Scalar], w: &[Scalar]) -> Mat {
    let n = space.dim();
    let mut m = Mat::zeros(space.field(), n, n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, &v[i] * &w[j] + &w[i] * &v[j]);
        }
    }
    m
}

impl SfElement {
    /// Wraps a coefficient matrix, checking symmetry.
    pub fn new(space: Arc<SymplecticSpace>, s: Mat) -> Result<Self> {
        let n = space.dim();
        if s.rows() != n || s.cols() != n {
            return Err(Error::LengthMismatch { expected: n, got: s.rows() });
        }
        if s.field() != space.field() {
            return Err(Error::FieldMismatch);
        }
        if s != s.transpose() {
            return Err(Error::Inconsistent("coefficient matrix not symmetric".into()));
        }
        Ok(SfElement { space, s })
    }

    pub fn zero(space: Arc<SymplecticSpace>) -> Self {
        let n = space.dim();
        let s = Mat::zeros(space.field(), n, n);
        SfElement { space, s }
    }

    /// `v ⊗ f_v`.
    pub fn pure(space: Arc<SymplecticSpace>, v: &[Scalar]) -> Result<Self> {
        check_len(&space, v)?;
        if is_zero_vec(v) {
            return Err(Error::ZeroVector);
        }
        let mut s = outer_sym(&space, v, v);
        let half = space.field().from_ratio(1, 2)?;
        s = s.scale(&half);
        Ok(SfElement { space, s })
    }

    /// `v ⊗ f_w + w ⊗ f_v`.
    pub fn sym_pair(space: Arc<SymplecticSpace>, v: &[Scalar], w: &[Scalar]) -> Result<Self> {
        check_len(&space, v)?;
        check_len(&space, w)?;
        let s = outer_sym(&space, v, w);
        Ok(SfElement { space, s })
    }

    pub fn space(&self) -> &Arc<SymplecticSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &Mat {
        &self.s
    }

    /// The endomorphism `S J` of `V`.
    pub fn endomorphism(&self) -> Mat {
        self.s.mul(self.space.gram()).unwrap()
    }

    fn same_space(&self, o: &SfElement) -> Result<()> {
        if self.space != o.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    pub fn add(&self, o: &SfElement) -> Result<SfElement> {
        self.same_space(o)?;
        Ok(SfElement { space: self.space.clone(), s: self.s.add(&o.s)? })
    }

    pub fn sub(&self, o: &SfElement) -> Result<SfElement> {
        self.same_space(o)?;
        Ok(SfElement { space: self.space.clone(), s: self.s.sub(&o.s)? })
    }

    pub fn scale(&self, c: &Scalar) -> SfElement {
        SfElement { space: self.space.clone(), s: self.s.scale(c) }
    }

    pub fn is_zero(&self) -> bool {
        self.s.is_zero()
    }

    pub fn bracket(&self, o: &SfElement) -> Result<SfElement> {
        self.same_space(o)?;
        let j = self.space.gram();
        let ab = self.s.mul(j)?.mul(&o.s)?;
        let ba = o.s.mul(j)?.mul(&self.s)?;
        Ok(SfElement { space: self.space.clone(), s: ab.sub(&ba)? })
    }

    /// Natural action on `V`.
    pub fn act(&self, v: &[Scalar]) -> Result<Vector> {
        check_len(&self.space, v)?;
        self.s.mul_vec(&self.space.gram().mul_vec(v)?)
    }

    /// Closed form of the extremal form: `trace(S_a J S_b Jᵀ)`.
    pub fn extremal_form(&self, o: &SfElement) -> Result<Scalar> {
        self.same_space(o)?;
        let j = self.space.gram();
        Ok(self.s.mul(j)?.mul(&o.s)?.mul(&j.transpose())?.trace())
    }

    /// Coordinates in the basis `{E_ii} ∪ {E_ij + E_ji : i < j}` (upper triangle, row-major).
    pub fn coords(&self) -> Vector {
        let n = self.space.dim();
        let mut out = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                out.push(self.s.get(i, j).clone());
            }
        }
        out
    }

    pub fn from_coords(space: Arc<SymplecticSpace>, c: &[Scalar]) -> Result<Self> {
        let n = space.dim();
        if c.len() != n * (n + 1) / 2 {
            return Err(Error::LengthMismatch { expected: n * (n + 1) / 2, got: c.len() });
        }
        let mut s = Mat::zeros(space.field(), n, n);
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                s.set(i, j, c[k].clone());
                s.set(j, i, c[k].clone());
                k += 1;
            }
        }
        Ok(SfElement { space, s })
    }

    pub fn to_json(&self) -> Value {
        json!({ "space": self.space.to_json(), "S": self.s.to_json() })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let space = Arc::new(SymplecticSpace::from_json(&v["space"])?);
        let s = Mat::from_json(space.field(), &v["S"])?;
        Self::new(space, s)
    }
}

fn check_len(space: &SymplecticSpace, v: &[Scalar]) -> Result<()> {
    if v.len() != space.dim() {
        return Err(Error::LengthMismatch { expected: space.dim(), got: v.len() });
    }
    Ok(())
}

/// Dimensions of the span of all pure tensors and of `{M : Mᵀ J + J M = 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpIdentification {
    pub dim_sf: usize,
    pub dim_sp: usize,
    pub equal: bool,
}

/// Compares the pure-tensor span with the symplectic Lie algebra of the form.
///
/// The first dimension is computed from the endomorphisms `S J` of the pure
/// tensors of basis vectors and their pairwise sums (which span), the second
/// by solving the linear condition on `n x n` matrices directly.
pub fn sp_identification(space: &Arc<SymplecticSpace>) -> Result<SpIdentification> {
    if !space.is_nondegenerate() {
        return Err(Error::DegenerateForm);
    }
    let n = space.dim();
    let k = space.field();
    let flat = |m: &Mat| -> Vector { (0..n).flat_map(|i| m.row(i).to_vec()).collect() };
    let mut span = Subspace::zero(k, n * n);
    let mut generators = Vec::new();
    for i in 0..n {
        generators.push(crate::linalg::unit_vec(k, n, i));
        for j in i + 1..n {
            generators.push(crate::linalg::add_vec(&crate::linalg::unit_vec(k, n, i), &crate::linalg::unit_vec(k, n, j)));
        }
    }
    let mut all_in_sp = true;
    let j = space.gram();
    for v in generators {
        let m = SfElement::pure(space.clone(), &v)?.endomorphism();
        let cond = m.transpose().mul(j)?.add(&j.mul(&m)?)?;
        all_in_sp &= cond.is_zero();
        span.insert(flat(&m))?;
    }
    // linear system on the n^2 entries of M
    let mut rows = Vec::new();
    for a in 0..n {
        for b in 0..n {
            // (Mᵀ J + J M)_{ab} = sum_c M_{ca} J_{cb} + J_{ac} M_{cb}
            let mut row = crate::linalg::zero_vec(k, n * n);
            for c in 0..n {
                row[c * n + a] += j.get(c, b);
                row[c * n + b] += j.get(a, c);
            }
            rows.push(row);
        }
    }
    let sp = Mat::from_rows(k, rows)?.kernel();
    let contained = span.basis().iter().all(|b| sp.contains(b));
    let (dim_sf, dim_sp) = (span.dim(), sp.dim());
    Ok(SpIdentification { dim_sf, dim_sp, equal: all_in_sp && contained && dim_sf == dim_sp })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::linalg::{add_vec, sub_vec, unit_vec};

    fn ex38(k: &FieldSpec) -> Arc<SymplecticSpace> {
        Arc::new(SymplecticSpace::standard(k, 2, 0).unwrap())
    }

    fn e(k: &FieldSpec, i: usize) -> Vector {
        unit_vec(k, 4, i)
    }

    #[test]
    fn pure_is_outer_product() {
        let k = FieldSpec::prime(3).unwrap();
        let sp = ex38(&k);
        let p = SfElement::pure(sp.clone(), &e(&k, 0)).unwrap();
        let mut want = Mat::zeros(&k, 4, 4);
        want.set(0, 0, k.one());
        assert_eq!(p.matrix(), &want);
        assert_eq!(p.matrix().rank(), 1);
        assert_eq!(SfElement::pure(sp.clone(), &crate::linalg::zero_vec(&k, 4)), Err(Error::ZeroVector));
        let lam = k.from_i64(2);
        let v = add_vec(&e(&k, 0), &e(&k, 3));
        let scaled = SfElement::pure(sp.clone(), &crate::linalg::scale_vec(&lam, &v)).unwrap();
        assert_eq!(scaled, SfElement::pure(sp, &v).unwrap().scale(&(&lam * &lam)));
    }

    #[test]
    fn expansion_of_sum() {
        let k = FieldSpec::Rational;
        let sp = ex38(&k);
        let lhs = SfElement::pure(sp.clone(), &add_vec(&e(&k, 0), &e(&k, 2))).unwrap();
        let rhs = SfElement::pure(sp.clone(), &e(&k, 0))
            .unwrap()
            .add(&SfElement::pure(sp.clone(), &e(&k, 2)).unwrap())
            .unwrap()
            .add(&SfElement::sym_pair(sp, &e(&k, 0), &e(&k, 2)).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn sym_pair_basics() {
        let k = FieldSpec::prime(5).unwrap();
        let sp = ex38(&k);
        let s11 = SfElement::sym_pair(sp.clone(), &e(&k, 0), &e(&k, 0)).unwrap();
        assert_eq!(s11, SfElement::pure(sp.clone(), &e(&k, 0)).unwrap().scale(&k.from_i64(2)));
        let s13 = SfElement::sym_pair(sp.clone(), &e(&k, 0), &e(&k, 2)).unwrap();
        let nz = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).filter(|&(i, j)| !s13.matrix().get(i, j).is_zero()).count();
        assert_eq!(nz, 2);
    }

    #[test]
    fn brackets_of_pures() {
        let k = FieldSpec::prime(3).unwrap();
        let sp = ex38(&k);
        let p1 = SfElement::pure(sp.clone(), &e(&k, 0)).unwrap();
        let p2 = SfElement::pure(sp.clone(), &e(&k, 1)).unwrap();
        let p3 = SfElement::pure(sp.clone(), &e(&k, 2)).unwrap();
        assert_eq!(p1.bracket(&p3).unwrap(), SfElement::sym_pair(sp.clone(), &e(&k, 0), &e(&k, 2)).unwrap());
        assert!(p1.bracket(&p1).unwrap().is_zero());
        assert!(p1.bracket(&p2).unwrap().is_zero());
    }

    #[test]
    fn action() {
        let k = FieldSpec::prime(3).unwrap();
        let sp = ex38(&k);
        let p1 = SfElement::pure(sp.clone(), &e(&k, 0)).unwrap();
        assert_eq!(p1.act(&e(&k, 2)).unwrap(), e(&k, 0));
        assert!(is_zero_vec(&p1.act(&e(&k, 0)).unwrap()));
    }

    #[test]
    fn extremal_form_values() {
        let k = FieldSpec::prime(5).unwrap();
        let sp = ex38(&k);
        let pure = |v: &Vector| SfElement::pure(sp.clone(), v).unwrap();
        assert!(pure(&e(&k, 0)).extremal_form(&pure(&e(&k, 2))).unwrap().is_one());
        let v = add_vec(&e(&k, 0), &e(&k, 3));
        assert!(pure(&v).extremal_form(&pure(&v)).unwrap().is_zero());
        let u = add_vec(&e(&k, 2), &e(&k, 3));
        let s = SfElement::sym_pair(sp.clone(), &e(&k, 0), &e(&k, 1)).unwrap();
        assert_eq!(s.extremal_form(&pure(&u)).unwrap(), k.from_i64(2));
        let _ = sub_vec(&u, &v);
    }

    #[test]
    fn identification_dims() {
        for (p, m, want) in [(3u64, 2usize, 10usize), (3, 3, 21)] {
            let k = FieldSpec::prime(p).unwrap();
            let sp = Arc::new(SymplecticSpace::standard(&k, m, 0).unwrap());
            let r = sp_identification(&sp).unwrap();
            assert_eq!((r.dim_sf, r.dim_sp, r.equal), (want, want, true));
        }
        let q = Arc::new(SymplecticSpace::standard(&FieldSpec::Rational, 1, 0).unwrap());
        assert_eq!(sp_identification(&q).unwrap().dim_sp, 3);
        let deg = Arc::new(SymplecticSpace::standard(&FieldSpec::Rational, 1, 1).unwrap());
        assert_eq!(sp_identification(&deg), Err(Error::DegenerateForm));
    }
}
