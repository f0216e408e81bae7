//! Extremal elements: testing, pair classification, exponentials, the conic
//! of an sl2-subalgebra, and the two generation hypotheses used for recognition.

use serde::Serialize;
use serde_json::json;

use crate::algebra::StructureLieAlgebra;
use crate::error::{Error, Result};
use crate::field::{solve_quadratic, FieldSpec, Root, RootField, Scalar};
use crate::linalg::{axpy, is_zero_vec, normalize_projective, proportional, scale_vec, vec_to_json, Mat, Vector};
use crate::report::CheckReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremalTest {
    pub extremal: bool,
    pub sandwich: bool,
}

/// `x` is extremal iff `[x, [x, b]] ∈ F x` for every basis vector `b`.
pub fn is_extremal(l: &StructureLieAlgebra, x: &[Scalar]) -> Result<ExtremalTest> {
    if x.len() != l.dim() {
        return Err(Error::LengthMismatch { expected: l.dim(), got: x.len() });
    }
    if is_zero_vec(x) {
        return Err(Error::ZeroVector);
    }
    Ok(extremal_from_ad(&l.ad_matrix(x), x))
}

fn extremal_from_ad(ad: &Mat, x: &[Scalar]) -> ExtremalTest {
    let mut sandwich = true;
    for j in 0..ad.cols() {
        let col = ad.col(j);
        if is_zero_vec(&col) {
            continue;
        }
        let w = ad.mul_vec(&col).unwrap();
        if is_zero_vec(&w) {
            continue;
        }
        sandwich = false;
        if proportional(&w, x).is_none() {
            return ExtremalTest { extremal: false, sandwich: false };
        }
    }
    ExtremalTest { extremal: true, sandwich }
}

/// Calls `f` on every nonzero vector of `F_q^d` (projectively normalized
/// ones only if `projective`), stopping early when `f` returns `false`.
pub fn for_each_vector<F>(field: &FieldSpec, d: usize, projective: bool, budget: u64, mut f: F) -> Result<()>
where
    F: FnMut(&Vector) -> bool,
{
    let elems = field.elements().ok_or_else(|| Error::Budget("enumeration needs a finite field".into()))?;
    let q = elems.len() as u64;
    let total = q.checked_pow(d as u32).unwrap_or(u64::MAX);
    if total > budget {
        return Err(Error::Budget(format!("{total} vectors exceed budget {budget}")));
    }
    let mut idx = vec![0usize; d];
    let mut v: Vector = vec![field.zero(); d];
    loop {
        // odometer increment, lowest index last so the order is lexicographic
        let mut pos = d;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < elems.len() {
                v[pos] = elems[idx[pos]].clone();
                break;
            }
            idx[pos] = 0;
            v[pos] = elems[0].clone();
        }
        if projective && !v.iter().find(|x| !x.is_zero()).is_some_and(Scalar::is_one) {
            continue;
        }
        if !f(&v) {
            return Ok(());
        }
    }
}

/// All extremal elements of a small algebra over a finite field.
pub fn enumerate_extremal_elements(l: &StructureLieAlgebra, budget: u64) -> Result<Vec<Vector>> {
    let mut out = Vec::new();
    for_each_vector(l.field(), l.dim(), false, budget, |v| {
        if extremal_from_ad(&l.ad_matrix(v), v).extremal {
            out.push(v.clone());
        }
        true
    })?;
    Ok(out)
}

/// The cases for a pair of extremal elements, in the usual order (a)–(e).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PairClass {
    SamePoint,
    /// Commuting, and every combination is extremal.
    CommutingExtremalLine,
    /// Commuting, and no nontrivial combination is extremal.
    CommutingRigid,
    /// `[x, y]` is a nonzero extremal element commuting with both.
    CommutingBracketExtremal,
    Sl2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PairClassification {
    pub class: PairClass,
    /// Over `Q` the combinations are sampled, not enumerated.
    pub sampled: bool,
}

const SAMPLE_RATIOS: [i64; 4] = [1, -1, 2, 3];

fn require_extremal(l: &StructureLieAlgebra, x: &[Scalar]) -> Result<ExtremalTest> {
    let t = is_extremal(l, x)?;
    if !t.extremal {
        return Err(Error::NotExtremal);
    }
    Ok(t)
}

pub fn classify_pair(l: &StructureLieAlgebra, x: &[Scalar], y: &[Scalar]) -> Result<PairClassification> {
    require_extremal(l, x)?;
    require_extremal(l, y)?;
    let sampled = !l.field().is_finite();
    let class = |class| Ok(PairClassification { class, sampled });
    if proportional(y, x).is_some() {
        return class(PairClass::SamePoint);
    }
    let xy = l.bracket(x, y);
    if is_zero_vec(&xy) {
        let ratios: Vec<Scalar> = match l.field().nonzero_elements() {
            Some(e) => e,
            None => SAMPLE_RATIOS.iter().map(|&r| l.field().from_i64(r)).collect(),
        };
        let mut extremal = 0;
        for mu in &ratios {
            let mut v = x.to_vec();
            axpy(&mut v, mu, y);
            if is_extremal(l, &v)?.extremal {
                extremal += 1;
            }
        }
        return match extremal {
            0 => class(PairClass::CommutingRigid),
            n if n == ratios.len() => class(PairClass::CommutingExtremalLine),
            _ => Err(Error::Inconsistent("only some combinations of a commuting pair are extremal".into())),
        };
    }
    if l.g_value(x, y)?.is_zero() {
        let bracket_ok = is_extremal(l, &xy)?.extremal
            && is_zero_vec(&l.bracket(x, &xy))
            && is_zero_vec(&l.bracket(y, &xy));
        if !bracket_ok {
            return Err(Error::Inconsistent("noncommuting pair with g = 0 whose bracket is not extremal".into()));
        }
        return class(PairClass::CommutingBracketExtremal);
    }
    class(PairClass::Sl2)
}

fn require_pure(l: &StructureLieAlgebra, x: &[Scalar]) -> Result<()> {
    if require_extremal(l, x)?.sandwich {
        return Err(Error::PureRequired);
    }
    Ok(())
}

/// `exp(x, λ) y = y + λ[x, y] + λ² g(x, y) x`.
pub fn exp_apply(l: &StructureLieAlgebra, x: &[Scalar], lambda: &Scalar, y: &[Scalar]) -> Result<Vector> {
    require_pure(l, x)?;
    l.exp_apply(x, lambda, y)
}

/// Matrix of `exp(x, λ)`.
pub fn exp_matrix(l: &StructureLieAlgebra, x: &[Scalar], lambda: &Scalar) -> Result<Mat> {
    require_pure(l, x)?;
    let cols = (0..l.dim()).map(|j| l.exp_apply(x, lambda, &l.basis_element(j))).collect::<Result<Vec<_>>>()?;
    Mat::from_cols(l.field(), l.dim(), &cols)
}

/// Whether `exp(x, λ)` preserves the bracket on all basis pairs.
pub fn exp_check(l: &StructureLieAlgebra, x: &[Scalar], lambda: &Scalar) -> Result<bool> {
    let e = exp_matrix(l, x, lambda)?;
    let images: Vec<Vector> = (0..l.dim()).map(|j| e.col(j)).collect();
    for i in 0..l.dim() {
        for j in i + 1..l.dim() {
            let lhs = e.mul_vec(l.structure_constant(i, j))?;
            if lhs != l.bracket(&images[i], &images[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The extremal points of the sl2 spanned by `x` and `y`: the elements
/// `g(x, y) x + λ² y + λ [x, y]` together with `y` itself (λ = ∞).
#[derive(Clone, Debug)]
pub struct Sl2Conic {
    pub x: Vector,
    pub y: Vector,
    pub g: Scalar,
    pub xy: Vector,
}

impl Sl2Conic {
    /// `None` stands for the point at infinity, `⟨y⟩`.
    pub fn point(&self, lambda: Option<&Scalar>) -> Vector {
        match lambda {
            None => self.y.clone(),
            Some(l) => {
                let mut v = scale_vec(&self.g, &self.x);
                axpy(&mut v, &(l * l), &self.y);
                axpy(&mut v, l, &self.xy);
                v
            }
        }
    }

    /// All `q + 1` points over a finite field; over `Q`, the points for
    /// `λ = μ c` with `μ ∈ {0, ±1, ±2}` and `c` the leading coordinate of
    /// `[x, y]`, and infinity. Tying `λ` to `c` makes the sample the same set
    /// of points when the bracket is multiplied by a scalar.
    pub fn points(&self) -> Vec<Vector> {
        let k = self.g.field();
        let lambdas = k.elements().unwrap_or_else(|| {
            let c = self.xy.iter().find(|v| !v.is_zero()).cloned().unwrap_or_else(|| k.one());
            [0, 1, -1, 2, -2].iter().map(|&i| &k.from_i64(i) * &c).collect()
        });
        let mut out: Vec<Vector> = lambdas.iter().map(|l| self.point(Some(l))).collect();
        out.push(self.point(None));
        out
    }
}

pub fn sl2_extremal_points(l: &StructureLieAlgebra, x: &[Scalar], y: &[Scalar]) -> Result<Sl2Conic> {
    require_extremal(l, x)?;
    require_extremal(l, y)?;
    let g = l.g_value(x, y)?;
    if g.is_zero() {
        return Err(Error::NotHyperbolic);
    }
    Ok(Sl2Conic { x: x.to_vec(), y: y.to_vec(), g, xy: l.bracket(x, y) })
}

/// Every pair of distinct points either commutes rigidly or spans an sl2.
pub fn check_condition_a(l: &StructureLieAlgebra, points: &[Vector]) -> Result<CheckReport> {
    let mut report = CheckReport::new("condition_a");
    let mut sampled = false;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let c = classify_pair(l, &points[i], &points[j])?;
            sampled |= c.sampled;
            if matches!(c.class, PairClass::CommutingExtremalLine | PairClass::CommutingBracketExtremal) {
                report.fail(json!({
                    "x": vec_to_json(&points[i]),
                    "y": vec_to_json(&points[j]),
                    "class": c.class,
                }));
            }
        }
    }
    if sampled {
        report = report.with_note("sampled");
    }
    Ok(report)
}

/// Outcome of searching the sl2 on `x, y` for a point commuting with `z`.
#[derive(Clone, Debug)]
pub enum ConditionB {
    /// `z` already commutes with `x`.
    Trivial(Vector),
    /// A base-field witness; `lambda = None` means `u = y`.
    Witness { lambda: Option<Scalar>, u: Vector },
    /// No base-field witness; the roots of the quadratic in `λ`.
    Extension(Vec<Root>),
}

impl ConditionB {
    pub fn in_base_field(&self) -> bool {
        !matches!(self, ConditionB::Extension(_))
    }
}

/// Looks for an extremal `u` in `⟨x, y⟩` with `[u, z] = 0` by solving
/// `g(x,y) g(z,x) + λ² g(z,y) + λ g(z,[x,y]) = 0`.
pub fn condition_b_witness(l: &StructureLieAlgebra, x: &[Scalar], y: &[Scalar], z: &[Scalar]) -> Result<ConditionB> {
    require_extremal(l, z)?;
    if is_zero_vec(&l.bracket(x, z)) {
        return Ok(ConditionB::Trivial(x.to_vec()));
    }
    let conic = sl2_extremal_points(l, x, y)?;
    let commutes = |u: &Vector| is_zero_vec(&l.bracket(u, z));
    if commutes(&conic.y) {
        return Ok(ConditionB::Witness { lambda: None, u: conic.y.clone() });
    }
    let a = l.g_value(z, y)?;
    let b = l.g_value(z, &conic.xy)?;
    let c = &conic.g * &l.g_value(z, x)?;
    let roots = match solve_quadratic(&a, &b, &c) {
        Ok(r) => r,
        Err(Error::NoRoot) => Vec::new(),
        // every λ solves the equation; try the field elements in turn
        Err(Error::Inconsistent(_)) => {
            let k = l.field();
            let cands = k.elements().unwrap_or_else(|| (0..8).map(|i| k.from_i64(i)).collect());
            cands.into_iter().map(|value| Root { value, field: RootField::BaseField }).collect()
        }
        Err(e) => return Err(e),
    };
    for r in &roots {
        if r.field == RootField::BaseField {
            let u = conic.point(Some(&r.value));
            if commutes(&u) {
                return Ok(ConditionB::Witness { lambda: Some(r.value.clone()), u });
            }
        }
    }
    Ok(ConditionB::Extension(roots))
}

/// Canonical representative of the 1-space spanned by `v`.
pub fn canonical(v: &[Scalar]) -> Result<Vector> {
    normalize_projective(v).map(|(w, _)| w).ok_or(Error::ZeroVector)
}
