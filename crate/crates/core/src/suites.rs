//! Named verification suites run by the command-line tool.
//!
//! Every suite starts with a Jacobi check and stops there if it fails, since
//! nothing downstream is meaningful for a table that is not a Lie algebra.

use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::StructureLieAlgebra;
use crate::error::{Error, Result};
use crate::extremal::{
    check_condition_a, condition_b_witness, enumerate_extremal_elements, exp_check, for_each_vector, is_extremal,
};
use crate::field::Scalar;
use crate::geometry::{build_geometry, classify_triple, line_meets_perp, line_span_check, Geometry, LineMeet};
use crate::linalg::{is_zero_vec, Mat, Vector};
use crate::recognition::{product_gamma, recognize};
use crate::symplectic::SymplecticSpace;
use crate::tensor::{sp_identification, SfElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Tensor,
    Extremal,
    Geometry,
    Triples,
    Uniqueness,
    Recognition,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] =
        [Suite::Tensor, Suite::Extremal, Suite::Geometry, Suite::Triples, Suite::Uniqueness, Suite::Recognition];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Tensor => "tensor",
            Suite::Extremal => "extremal",
            Suite::Geometry => "geometry",
            Suite::Triples => "triples",
            Suite::Uniqueness => "uniqueness",
            Suite::Recognition => "recognition",
            Suite::All => "all",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::EACH.into_iter().chain([Suite::All]).find(|x| x.name() == s)
    }
}

/// An algebra to check, with the symplectic space it was built from when known.
#[derive(Clone, Debug)]
pub struct SuiteInput {
    pub algebra: StructureLieAlgebra,
    pub space: Option<Arc<SymplecticSpace>>,
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Cap on the number of extremal points explored.
    pub budget: usize,
    /// Number of random samples for sampled checks.
    pub samples: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 0x5eed, budget: 20_000, samples: 50 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub suite: &'static str,
    pub name: String,
    pub pass: bool,
    pub millis: f64,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub field: Value,
    pub dim: usize,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).unwrap()
    }
}

struct Runner<'a> {
    input: &'a SuiteInput,
    opts: &'a SuiteOptions,
    rng: ChaCha8Rng,
    geometry: Option<std::result::Result<Geometry, Error>>,
    checks: Vec<CheckOutcome>,
}

impl<'a> Runner<'a> {
    fn l(&self) -> &'a StructureLieAlgebra {
        &self.input.algebra
    }

    fn check<F>(&mut self, suite: Suite, name: &str, f: F)
    where
        F: FnOnce(&mut Self) -> Result<(bool, Value)>,
    {
        let start = Instant::now();
        let (pass, detail) = match f(self) {
            Ok(r) => r,
            Err(e) => (false, json!({ "error": e.to_string() })),
        };
        let millis = start.elapsed().as_secs_f64() * 1000.0;
        self.checks.push(CheckOutcome { suite: suite.name(), name: name.to_string(), pass, millis, detail });
    }

    fn geometry(&mut self) -> Result<&Geometry> {
        if self.geometry.is_none() {
            let l = self.l();
            let seeds = if l.extremal_generators().is_empty() {
                return Err(Error::Hypothesis("no extremal generators given".into()));
            } else {
                l.extremal_generators()
            };
            self.geometry = Some(build_geometry(l, seeds, self.opts.budget));
        }
        self.geometry.as_ref().unwrap().as_ref().map_err(Clone::clone)
    }
}

/// Runs `suite` and collects one outcome per check.
pub fn run_suite(suite: Suite, input: &SuiteInput, opts: &SuiteOptions) -> SuiteReport {
    let mut r = Runner { input, opts, rng: ChaCha8Rng::seed_from_u64(opts.seed), geometry: None, checks: Vec::new() };
    let name = if suite == Suite::All { "all" } else { suite.name() };
    let first = if suite == Suite::All { Suite::Tensor } else { suite };
    r.check(first, "jacobi", |r| {
        Ok(match r.l().jacobi_violation() {
            None => (true, json!({})),
            Some((i, j, k)) => (false, json!({ "basis_triple": [i, j, k] })),
        })
    });
    if r.checks[0].pass {
        let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
        for s in suites {
            match s {
                Suite::Tensor => tensor_suite(&mut r),
                Suite::Extremal => extremal_suite(&mut r),
                Suite::Geometry => geometry_suite(&mut r),
                Suite::Triples => triples_suite(&mut r),
                Suite::Uniqueness => uniqueness_suite(&mut r),
                Suite::Recognition => recognition_suite(&mut r),
                Suite::All => unreachable!(),
            }
        }
    }
    let pass = r.checks.iter().all(|c| c.pass);
    SuiteReport {
        suite: name,
        field: serde_json::to_value(input.algebra.field()).unwrap(),
        dim: input.algebra.dim(),
        seed: opts.seed,
        pass,
        checks: r.checks,
    }
}

/// Vectors of the space: every projective point when there are few enough,
/// otherwise random nonzero vectors.
fn sample_vectors(space: &SymplecticSpace, rng: &mut ChaCha8Rng, limit: usize) -> Vec<Vector> {
    let k = space.field();
    let n = space.dim();
    let mut out = Vec::new();
    let enumerated = for_each_vector(k, n, true, (limit as u64) * 2, |v| {
        out.push(v.clone());
        out.len() <= limit
    });
    if enumerated.is_ok() && out.len() <= limit {
        return out;
    }
    out.clear();
    while out.len() < limit.min(64) {
        let v: Vector = (0..n).map(|_| k.random(rng)).collect();
        if !is_zero_vec(&v) {
            out.push(v);
        }
    }
    out
}

fn tensor_suite(r: &mut Runner) {
    let Some(space) = r.input.space.clone() else {
        r.check(Suite::Tensor, "extremal_form_invariant", |r| {
            let form = r.l().extremal_form()?;
            Ok(match form.invariance_violation(r.l()) {
                None => (true, json!({})),
                Some(t) => (false, json!({ "basis_triple": [t.0, t.1, t.2] })),
            })
        });
        return;
    };
    if space.is_nondegenerate() {
        r.check(Suite::Tensor, "pure_span_is_sp", |_| {
            let id = sp_identification(&space)?;
            Ok((id.equal, json!({ "dim_sf": id.dim_sf, "dim_sp": id.dim_sp })))
        });
    }
    let vs = sample_vectors(&space, &mut r.rng, 400);
    r.check(Suite::Tensor, "g_equals_f_squared", |r| {
        let mut pairs = 0usize;
        let mut bad = Vec::new();
        let nondeg = space.is_nondegenerate();
        let pures: Vec<SfElement> = vs.iter().map(|v| SfElement::pure(space.clone(), v)).collect::<Result<_>>()?;
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                pairs += 1;
                let f = space.f(&vs[i], &vs[j])?;
                let want = &f * &f;
                let closed = pures[i].extremal_form(&pures[j])?;
                // the definition through [x, [x, y]] = 2 g(x, y) x is only
                // available inside the algebra, i.e. for the nondegenerate model
                let definitional = if nondeg {
                    r.l().g_value(&pures[i].coords(), &pures[j].coords())?
                } else {
                    want.clone()
                };
                if closed != want || definitional != want {
                    bad.push(json!([i, j]));
                }
            }
        }
        Ok((bad.is_empty(), json!({ "pairs": pairs, "failures": bad.len() })))
    });
    r.check(Suite::Tensor, "pure_bracket_formula", |_| {
        let mut bad = 0;
        for v in vs.iter().take(30) {
            for w in vs.iter().take(30) {
                let b = SfElement::pure(space.clone(), v)?.bracket(&SfElement::pure(space.clone(), w)?)?;
                let want = SfElement::sym_pair(space.clone(), v, w)?.scale(&space.f(v, w)?);
                if b != want {
                    bad += 1;
                }
            }
        }
        Ok((bad == 0, json!({ "failures": bad })))
    });
}

fn extremal_suite(r: &mut Runner) {
    r.check(Suite::Extremal, "generators_extremal", |r| {
        let l = r.l();
        let mut sandwiches = 0;
        for g in l.extremal_generators() {
            let t = is_extremal(l, g)?;
            if !t.extremal {
                return Ok((false, json!({ "not_extremal": crate::linalg::vec_to_json(g) })));
            }
            sandwiches += t.sandwich as usize;
        }
        Ok((true, json!({ "generators": l.extremal_generators().len(), "sandwiches": sandwiches })))
    });
    r.check(Suite::Extremal, "exp_preserves_bracket", |r| {
        let l = r.l();
        let gens: Vec<Vector> =
            l.extremal_generators().iter().filter(|g| is_extremal(l, g).is_ok_and(|t| !t.sandwich)).cloned().collect();
        if gens.is_empty() {
            return Ok((true, json!({ "samples": 0, "note": "no pure generators" })));
        }
        let k = l.field().clone();
        let samples = r.opts.samples.min(100);
        for _ in 0..samples {
            // move a generator by the exponential of another to get a fresh extremal element
            let a = gens.choose(&mut r.rng).unwrap();
            let b = gens.choose(&mut r.rng).unwrap();
            let x = l.exp_apply(a, &k.random(&mut r.rng), b)?;
            if is_zero_vec(&x) || is_extremal(l, &x)?.sandwich {
                continue;
            }
            let lambda = k.random(&mut r.rng);
            if !exp_check(l, &x, &lambda)? {
                return Ok((false, json!({ "x": crate::linalg::vec_to_json(&x), "lambda": lambda.to_json() })));
            }
        }
        Ok((true, json!({ "samples": samples })))
    });
    let l = r.l();
    if let Some(q) = l.field().order() {
        let total = q.checked_pow(l.dim() as u32).unwrap_or(u64::MAX);
        if total <= 2_000_000 {
            r.check(Suite::Extremal, "extremal_elements_are_points", |r| {
                let l = r.l();
                let all = enumerate_extremal_elements(l, total)?;
                let geom = r.geometry()?;
                if !geom.complete {
                    return Ok((false, json!({ "note": "geometry truncated" })));
                }
                let missing = all.iter().filter(|v| geom.index_of(&crate::extremal::canonical(v).unwrap()).is_none()).count();
                let expected = geom.len() as u64 * (q - 1);
                let pass = missing == 0 && all.len() as u64 == expected;
                Ok((pass, json!({ "extremal_elements": all.len(), "points": geom.len(), "missing": missing })))
            });
        }
    }
    r.check(Suite::Extremal, "condition_a", |r| {
        let l = r.l();
        let pts = r.geometry()?.points().to_vec();
        let pts = if pts.len() > 120 {
            let mut p = pts;
            p.shuffle(&mut r.rng);
            p.truncate(120);
            p
        } else {
            pts
        };
        let rep = check_condition_a(l, &pts)?;
        Ok((rep.pass, rep.to_json()))
    });
    r.check(Suite::Extremal, "condition_b", |r| {
        let l = r.l();
        let geom = r.geometry()?.clone();
        let n = geom.len();
        let mut tried = 0;
        let mut extension = 0;
        for _ in 0..r.opts.samples * 20 {
            let (x, y, z) = (r.rng.gen_range(0..n), r.rng.gen_range(0..n), r.rng.gen_range(0..n));
            if geom.commutes(x, y) || geom.is_sandwich(x) || geom.is_sandwich(y) || l.g_value(geom.point(x), geom.point(y))?.is_zero() {
                continue;
            }
            tried += 1;
            if !condition_b_witness(l, geom.point(x), geom.point(y), geom.point(z))?.in_base_field() {
                extension += 1;
            }
        }
        Ok((extension == 0, json!({ "triples": tried, "without_base_witness": extension })))
    });
}

fn geometry_suite(r: &mut Runner) {
    r.check(Suite::Geometry, "health", |r| {
        let g_rad = r.l().extremal_form()?.radical().dim();
        let geom = r.geometry()?;
        let h = geom.health(g_rad == 0);
        let counts = json!({
            "points": geom.len(),
            "hyperbolic_lines": geom.hyperbolic_lines().len(),
            "complete": geom.complete,
            "span_dim": geom.span_dim,
            "connected": h.connected,
            "nondegenerate": h.nondegenerate,
        });
        // partial lines of a truncated geometry may overlap
        let conflicts_ok = geom.line_conflicts.is_empty() || !geom.complete;
        Ok((h.connected && geom.spans() && conflicts_ok, counts))
    });
    r.check(Suite::Geometry, "line_sizes", |r| {
        let geom = r.geometry()?;
        let Some(q) = geom.field().order() else {
            return Ok((true, json!({ "note": "sampled field" })));
        };
        let bad = geom.hyperbolic_lines().iter().filter(|l| l.len() as u64 != q + 1).count();
        Ok((bad == 0, json!({ "lines": geom.hyperbolic_lines().len(), "wrong_size": bad })))
    });
    r.check(Suite::Geometry, "line_spans", |r| {
        if !r.geometry()?.complete {
            return Ok((true, json!({ "note": "skipped on truncated geometry" })));
        }
        let l = r.l();
        let geom = r.geometry()?.clone();
        let mut bad = 0;
        let lines = geom.hyperbolic_lines();
        let checked = lines.len().min(20);
        for line in &lines[..checked] {
            if !line_span_check(l, &geom, line, 1 << 20)?.pass {
                bad += 1;
            }
        }
        Ok((bad == 0, json!({ "checked": checked, "failures": bad })))
    });
    r.check(Suite::Geometry, "line_meets_perp_once", |r| {
        if !r.geometry()?.complete {
            return Ok((true, json!({ "note": "skipped on truncated geometry" })));
        }
        let geom = r.geometry()?;
        let mut other = 0;
        let lines = geom.hyperbolic_lines();
        let checked = lines.len().min(500);
        for line in &lines[..checked] {
            for x in 0..geom.len() {
                if matches!(line_meets_perp(geom, x, line), LineMeet::Other(_)) {
                    other += 1;
                }
            }
        }
        Ok((other == 0, json!({ "lines": checked, "violations": other })))
    });
    r.check(Suite::Geometry, "polar_lines", |r| {
        let geom = r.geometry()?;
        if !geom.complete || geom.len() > 2000 {
            return Ok((true, json!({ "note": "skipped on truncated or large geometry" })));
        }
        let polar = geom.polar_lines();
        let sizes: std::collections::BTreeSet<usize> = polar.iter().map(Vec::len).collect();
        Ok((true, json!({ "polar_lines": polar.len(), "sizes": sizes })))
    });
}

/// Triples `(x, y, z)` of points with `[x, y] ≠ 0 ≠ [y, z]` and `[x, z] = 0`.
fn find_triples(l: &StructureLieAlgebra, geom: &Geometry, rng: &mut ChaCha8Rng, want: usize) -> Result<Vec<[usize; 3]>> {
    let n = geom.len();
    let usable = |a: usize, b: usize| -> Result<bool> {
        Ok(!geom.commutes(a, b) && !l.g_value(geom.point(a), geom.point(b))?.is_zero())
    };
    let mut out = Vec::new();
    // the first triple in index order, then random ones
    'first: for y in 0..n {
        for x in 0..n {
            if !usable(x, y)? {
                continue;
            }
            for z in x + 1..n {
                if z != y && geom.commutes(x, z) && usable(z, y)? {
                    out.push([x, y, z]);
                    break 'first;
                }
            }
        }
    }
    let mut attempts = 0;
    while out.len() < want && attempts < want * 200 && n > 2 {
        attempts += 1;
        let (x, y, z) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        if x != z && geom.commutes(x, z) && usable(x, y)? && usable(z, y)? {
            out.push([x, y, z]);
        }
    }
    Ok(out)
}

fn triples_suite(r: &mut Runner) {
    r.check(Suite::Triples, "triple_identities", |r| {
        let l = r.l();
        let geom = r.geometry()?.clone();
        let triples = find_triples(l, &geom, &mut r.rng, r.opts.samples)?;
        if triples.is_empty() {
            // vacuous when no two distinct points commute, as in sl2
            let n = geom.len();
            let pass = (0..n).all(|a| (a + 1..n).all(|b| !geom.commutes(a, b)));
            return Ok((pass, json!({ "triples": 0, "note": "no symplectic triple in the geometry" })));
        }
        let mut kinds = std::collections::BTreeMap::new();
        let mut identities = [0usize; 6];
        let mut bad = 0;
        for [x, y, z] in &triples {
            let c = classify_triple(l, geom.point(*x), geom.point(*y), geom.point(*z))?;
            let key = format!("{:?} dim {} center {}", c.kind, c.dim, c.center_dim);
            *kinds.entry(key).or_insert(0usize) += 1;
            for (count, ok) in identities.iter_mut().zip(c.identities) {
                *count += ok as usize;
            }
            if !c.identities.iter().all(|&b| b) || !c.table_verified {
                bad += 1;
            }
        }
        let per_identity: Vec<Value> = crate::geometry::TRIPLE_IDENTITIES
            .iter()
            .zip(identities)
            .map(|(s, n)| json!({ "identity": s, "holds": n }))
            .collect();
        Ok((bad == 0, json!({ "triples": triples.len(), "kinds": kinds, "identities": per_identity })))
    });
}

fn uniqueness_suite(r: &mut Runner) {
    r.check(Suite::Uniqueness, "product_gamma", |r| {
        let l = r.l();
        let k = l.field().clone();
        let id = Mat::identity(&k, l.dim());
        let gammas: Vec<Scalar> = [2i64, 3, 4].iter().map(|&g| k.from_i64(g)).filter(|g| !g.is_zero() && !g.is_one()).collect();
        let mut found = Vec::new();
        for g in &gammas {
            let l2 = l.transform(&id, g)?;
            let got = product_gamma(l, &l2, l.extremal_generators())?;
            if &got != g {
                return Ok((false, json!({ "expected": g.to_json(), "got": got.to_json() })));
            }
            found.push(got.to_json());
        }
        Ok((true, json!({ "recovered": found })))
    });
    r.check(Suite::Uniqueness, "perturbed_table_rejected", |r| {
        let l = r.l();
        let Some(perturbed) = perturb(l) else {
            return Ok((true, json!({ "note": "abelian table" })));
        };
        match product_gamma(l, &perturbed, l.extremal_generators()) {
            Err(Error::NotProportional(m)) => Ok((true, json!({ "error": format!("not proportional: {m}") }))),
            Err(e) => Ok((true, json!({ "error": e.to_string() }))),
            Ok(g) => Ok((false, json!({ "unexpected_gamma": g.to_json() }))),
        }
    });
}

/// The table with one structure constant bumped by one.
pub fn perturb(l: &StructureLieAlgebra) -> Option<StructureLieAlgebra> {
    let mut v = l.to_json();
    let entries = v.get_mut("bracket")?.as_array_mut()?;
    let last = entries.last_mut()?;
    let terms = last.get_mut(2)?.as_array_mut()?;
    let k = l.field();
    let c = k.scalar_from_json(&terms[0][1]).ok()?;
    terms[0][1] = (&c + &k.one()).to_json();
    if (&c + &k.one()).is_zero() {
        terms.remove(0);
    }
    StructureLieAlgebra::from_json(&v).ok()
}

fn recognition_suite(r: &mut Runner) {
    r.check(Suite::Recognition, "recognize", |r| {
        let rep = recognize(r.l(), r.opts.budget)?;
        Ok((rep.passed(), json!({ "m": rep.m, "gamma": rep.gamma.to_json(), "checks": rep.to_json()["checks"], "notes": rep.notes })))
    });
    if r.input.space.is_none() {
        return;
    }
    r.check(Suite::Recognition, "scrambled_round_trip", |r| {
        let l = r.l();
        let k = l.field().clone();
        let gamma0 = loop {
            let g = k.random(&mut r.rng);
            if !g.is_zero() {
                break g;
            }
        };
        let (plain, a) = l.scramble(&mut r.rng, None)?;
        let scaled = l.transform(&a, &gamma0)?;
        // scrambled rationals grow quickly; keep the sample small
        let budget = if k.is_finite() { r.opts.budget } else { r.opts.budget.min(30) };
        let r1 = recognize(&plain, budget)?;
        let r2 = recognize(&scaled, budget)?;
        let ratio = r2.gamma.div_checked(&r1.gamma)?;
        let pass = r1.passed() && r2.passed() && ratio == gamma0 && r2.m == r1.m;
        Ok((pass, json!({ "m": r2.m, "gamma_scale": gamma0.to_json(), "gamma_ratio": ratio.to_json() })))
    });
}
