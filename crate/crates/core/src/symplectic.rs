//! Finite-dimensional spaces with an alternating bilinear form.
//!
//! Degenerate forms are allowed everywhere; they are needed for the
//! three-dimensional spaces with a one-dimensional radical.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::linalg::{dot, Mat, Subspace, Vector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticSpace {
    field: FieldSpec,
    gram: Mat,
}

/// Hyperbolic pairs plus a radical basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittBasis {
    pub pairs: Vec<(Vector, Vector)>,
    pub radical: Vec<Vector>,
}

impl SymplecticSpace {
    /// Validates that `gram` is square and alternating.
    pub fn new(gram: Mat) -> Result<Self> {
        let n = gram.rows();
        if n == 0 || gram.cols() != n {
            return Err(Error::NotAlternating("gram must be square and nonempty".into()));
        }
        for i in 0..n {
            if !gram.get(i, i).is_zero() {
                return Err(Error::NotAlternating(format!("diagonal entry {i} is nonzero")));
            }
            for j in 0..i {
                if *gram.get(i, j) != -gram.get(j, i) {
                    return Err(Error::NotAlternating(format!("entries ({i},{j}) and ({j},{i})")));
                }
            }
        }
        Ok(SymplecticSpace { field: gram.field().clone(), gram })
    }

    /// `m` hyperbolic pairs `(e_i, e_{m+i})` followed by `r` radical vectors.
    pub fn standard(field: &FieldSpec, m: usize, r: usize) -> Result<Self> {
        let n = 2 * m + r;
        if n == 0 {
            return Err(Error::NotAlternating("empty space".into()));
        }
        let mut g = Mat::zeros(field, n, n);
        for i in 0..m {
            g.set(i, m + i, field.one());
            g.set(m + i, i, -field.one());
        }
        Self::new(g)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    pub fn f(&self, v: &[Scalar], w: &[Scalar]) -> Result<Scalar> {
        let n = self.dim();
        for x in [v, w] {
            if x.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: x.len() });
            }
        }
        Ok(dot(v, &self.gram.mul_vec(w)?))
    }

    pub fn radical(&self) -> Subspace {
        self.gram.kernel()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.radical().dim() == 0
    }

    /// Gram matrix of the form on the echelon basis of `u`.
    pub fn restrict(&self, u: &Subspace) -> Result<SymplecticSpace> {
        if u.ambient_dim() != self.dim() {
            return Err(Error::AmbientMismatch(u.ambient_dim(), self.dim()));
        }
        self.restrict_to_basis(u.basis())
    }

    /// Gram matrix of the form on an explicit list of vectors.
    pub fn restrict_to_basis(&self, basis: &[Vector]) -> Result<SymplecticSpace> {
        let k = basis.len();
        let mut g = Mat::zeros(&self.field, k, k);
        for i in 0..k {
            for j in 0..k {
                g.set(i, j, self.f(&basis[i], &basis[j])?);
            }
        }
        Self::new(g)
    }

    /// Greedy Witt peeling: the lexicographically first pair of remaining
    /// vectors with nonzero form value is normalized, then everything is
    /// projected onto the perp of that pair.
    pub fn witt_basis(&self) -> WittBasis {
        let n = self.dim();
        let rest: Vec<Vector> = (0..n).map(|i| crate::linalg::unit_vec(&self.field, n, i)).collect();
        self.peel(rest, Vec::new())
    }

    /// Witt basis whose first pair is `(e, f')` with `f'` the multiple of `f`
    /// satisfying `f(e, f') = 1`.
    pub fn witt_basis_starting_with(&self, e: &[Scalar], f: &[Scalar]) -> Result<WittBasis> {
        let val = self.f(e, f)?;
        if val.is_zero() {
            return Err(Error::NotHyperbolic);
        }
        let e = e.to_vec();
        let fv = crate::linalg::scale_vec(&val.inv()?, f);
        let n = self.dim();
        let rest = (0..n).map(|i| crate::linalg::unit_vec(&self.field, n, i)).collect();
        let rest = self.project_away(rest, &e, &fv);
        Ok(self.peel(rest, vec![(e, fv)]))
    }

    /// Projects `w -> w - f(w,f) e + f(w,e) f` so that `f(w', e) = f(w', f) = 0`,
    /// dropping vectors that become zero.
    fn project_away(&self, rest: Vec<Vector>, e: &[Scalar], fv: &[Scalar]) -> Vec<Vector> {
        let mut next = Vec::new();
        for w in rest {
            let a = self.f(&w, fv).unwrap();
            let b = self.f(&w, e).unwrap();
            let mut w2 = w;
            crate::linalg::axpy(&mut w2, &-a, e);
            crate::linalg::axpy(&mut w2, &b, fv);
            if !crate::linalg::is_zero_vec(&w2) {
                next.push(w2);
            }
        }
        next
    }

    fn peel(&self, mut rest: Vec<Vector>, mut pairs: Vec<(Vector, Vector)>) -> WittBasis {
        loop {
            let mut found = None;
            'outer: for i in 0..rest.len() {
                for j in i + 1..rest.len() {
                    let v = self.f(&rest[i], &rest[j]).unwrap();
                    if !v.is_zero() {
                        found = Some((i, j, v));
                        break 'outer;
                    }
                }
            }
            let Some((i, j, val)) = found else { break };
            let e = rest[i].clone();
            let fv = crate::linalg::scale_vec(&val.inv().unwrap(), &rest[j]);
            let others = rest.into_iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, w)| w).collect();
            rest = self.project_away(others, &e, &fv);
            pairs.push((e, fv));
        }
        // leftovers span the radical; echelonize them
        let radical = Subspace::from_vectors(&self.field, self.dim(), rest).unwrap().basis().to_vec();
        WittBasis { pairs, radical }
    }

    pub fn to_json(&self) -> Value {
        json!({ "field": self.field, "dim": self.dim(), "gram": self.gram.to_json() })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field: FieldSpec = serde_json::from_value(v["field"].clone()).map_err(|e| Error::Parse(e.to_string()))?;
        field.validate()?;
        let gram = Mat::from_json(&field, &v["gram"])?;
        let dim = v["dim"].as_u64().ok_or_else(|| Error::Parse("missing dim".into()))? as usize;
        if gram.rows() != dim {
            return Err(Error::Parse(format!("dim {dim} does not match gram")));
        }
        Self::new(gram)
    }
}

impl WittBasis {
    /// Checks the defining relations exactly; returns a description of the first failure.
    pub fn verify(&self, s: &SymplecticSpace) -> std::result::Result<(), String> {
        let all: Vec<&Vector> = self.pairs.iter().flat_map(|(e, f)| [e, f]).chain(&self.radical).collect();
        let rank = Mat::from_rows(s.field(), all.iter().map(|v| (*v).clone()).collect()).map_err(|e| e.to_string())?.rank();
        if all.len() != s.dim() || rank != s.dim() {
            return Err(format!("not a basis: {} vectors of rank {rank}", all.len()));
        }
        let one = s.field().one();
        for (i, (ei, fi)) in self.pairs.iter().enumerate() {
            for (j, (ej, fj)) in self.pairs.iter().enumerate() {
                let want = if i == j { one.clone() } else { s.field().zero() };
                if s.f(ei, fj).unwrap() != want {
                    return Err(format!("f(e{i}, f{j}) wrong"));
                }
                if !s.f(ei, ej).unwrap().is_zero() || !s.f(fi, fj).unwrap().is_zero() {
                    return Err(format!("pair {i},{j} not isotropic"));
                }
            }
        }
        for r in &self.radical {
            for v in &all {
                if !s.f(r, v).unwrap().is_zero() {
                    return Err("radical vector not orthogonal".into());
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{add_vec, unit_vec};
    use proptest::prelude::*;

    fn e(k: &FieldSpec, n: usize, i: usize) -> Vector {
        unit_vec(k, n, i)
    }

    #[test]
    fn standard_four_space_matches_reference_gram() {
        let k = FieldSpec::prime(3).unwrap();
        let s = SymplecticSpace::standard(&k, 2, 0).unwrap();
        let want = Mat::from_i64(&k, &[vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![-1, 0, 0, 0], vec![0, -1, 0, 0]]).unwrap();
        assert_eq!(s.gram(), &want);
        assert!(s.f(&e(&k, 4, 0), &e(&k, 4, 2)).unwrap().is_one());
        let v = add_vec(&e(&k, 4, 0), &e(&k, 4, 1));
        assert!(s.f(&v, &e(&k, 4, 2)).unwrap().is_one());
        assert_eq!(s.radical().dim(), 0);
    }

    #[test]
    fn degenerate_spaces() {
        let q = FieldSpec::Rational;
        let s = SymplecticSpace::standard(&q, 1, 1).unwrap();
        assert_eq!(s.dim(), 3);
        assert_eq!(s.radical().dim(), 1);
        let z = SymplecticSpace::standard(&FieldSpec::prime(5).unwrap(), 0, 2).unwrap();
        assert!(z.gram().is_zero());
        assert_eq!(z.radical().dim(), 2);
    }

    #[test]
    fn restriction_to_w() {
        let k = FieldSpec::prime(3).unwrap();
        let s = SymplecticSpace::standard(&k, 2, 0).unwrap();
        let w = Subspace::from_vectors(&k, 4, vec![e(&k, 4, 0), e(&k, 4, 1), e(&k, 4, 2)]).unwrap();
        let r = s.restrict(&w).unwrap();
        assert_eq!(r.gram().rank(), 2);
        // radical of W is spanned by e2 (second basis vector of W)
        assert_eq!(r.radical().basis(), &[e(&k, 3, 1)]);
        let wb = r.witt_basis();
        assert_eq!(wb.pairs.len(), 1);
        assert_eq!(wb.radical, vec![e(&k, 3, 1)]);
        wb.verify(&r).unwrap();
        let plane = Subspace::from_vectors(&k, 4, vec![e(&k, 4, 0), e(&k, 4, 2)]).unwrap();
        assert!(s.restrict(&plane).unwrap().is_nondegenerate());
        let iso = Subspace::from_vectors(&k, 4, vec![e(&k, 4, 0), e(&k, 4, 1)]).unwrap();
        assert!(s.restrict(&iso).unwrap().gram().is_zero());
    }

    #[test]
    fn rejects_non_alternating() {
        let k = FieldSpec::prime(3).unwrap();
        let g = Mat::from_i64(&k, &[vec![1, 0], vec![0, 0]]).unwrap();
        assert!(SymplecticSpace::new(g).is_err());
    }

    #[test]
    fn witt_of_standard() {
        let k = FieldSpec::prime(3).unwrap();
        let s = SymplecticSpace::standard(&k, 2, 0).unwrap();
        let wb = s.witt_basis();
        assert_eq!(wb.pairs.len(), 2);
        assert!(wb.radical.is_empty());
    }

    fn alternating(k: &FieldSpec, n: usize, data: &[i64]) -> SymplecticSpace {
        let mut g = Mat::zeros(k, n, n);
        let mut it = data.iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = k.from_i64(*it.next().unwrap());
                g.set(i, j, v.clone());
                g.set(j, i, -v);
            }
        }
        SymplecticSpace::new(g).unwrap()
    }

    proptest! {
        #[test]
        fn witt_invariants_hold(n in 1usize..7, data in proptest::collection::vec(-2i64..3, 21), p in prop_oneof![Just(3u64), Just(5)]) {
            let k = FieldSpec::prime(p).unwrap();
            let s = alternating(&k, n, &data);
            let wb = s.witt_basis();
            prop_assert!(wb.verify(&s).is_ok(), "{:?}", wb.verify(&s));
            prop_assert_eq!(wb.radical.len() + 2 * wb.pairs.len(), n);
            prop_assert_eq!(wb.radical.len(), s.radical().dim());
        }

        #[test]
        fn form_is_antisymmetric(v in proptest::collection::vec(-4i64..5, 6), w in proptest::collection::vec(-4i64..5, 6), data in proptest::collection::vec(-2i64..3, 15)) {
            let k = FieldSpec::Rational;
            let s = alternating(&k, 6, &data);
            let v: Vector = v.iter().map(|&x| k.from_i64(x)).collect();
            let w: Vector = w.iter().map(|&x| k.from_i64(x)).collect();
            prop_assert_eq!(s.f(&v, &w).unwrap(), -s.f(&w, &v).unwrap());
            prop_assert!(s.f(&v, &v).unwrap().is_zero());
        }
    }

    #[test]
    fn random_nondegenerate_six_space_over_f5() {
        let k = FieldSpec::prime(5).unwrap();
        let data = [1, 2, 0, 3, 1, 4, 0, 2, 1, 3, 0, 1, 2, 4, 1];
        let s = alternating(&k, 6, &data);
        if s.is_nondegenerate() {
            let wb = s.witt_basis();
            assert_eq!(wb.pairs.len(), 3);
            wb.verify(&s).unwrap();
        }
    }
}
