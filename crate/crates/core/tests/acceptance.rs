//! Acceptance criteria, one line of output each. Runs without the libtest
//! harness so the lines are always printed; exits nonzero if any fails.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use extremal::algebra::{degenerate_three_space, model_subalgebra, psp3, pure_endomorphism, sp, sp3, sp_model, standard_pure_vectors};
use extremal::extremal::{check_condition_a, condition_b_witness, enumerate_extremal_elements, exp_check, is_extremal};
use extremal::geometry::{
    build_geometry, classify_triple, line_meets_perp, line_span_check, symplectic_plane, LineMeet, TripleKind,
};
use extremal::linalg::{is_zero_vec, unit_vec};
use extremal::recognition::{product_gamma, recognize};
use extremal::tensor::{sp_identification, SfElement};
use extremal::{Error, FieldSpec, Mat, Scalar, StructureLieAlgebra, Subspace, SymplecticSpace, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn fp(p: u64) -> FieldSpec {
    FieldSpec::prime(p).unwrap()
}

fn ints(k: &FieldSpec, v: &[i64]) -> Vector {
    v.iter().map(|&a| k.from_i64(a)).collect()
}

/// `f(v, w) = Σ v_i w_{m+i} - v_{m+i} w_i` on the standard hyperbolic basis.
fn form(v: &[Scalar], w: &[Scalar]) -> Scalar {
    let m = v.len() / 2;
    let k = v[0].field();
    let mut acc = k.zero();
    for i in 0..m {
        acc = &acc + &(&(&v[i] * &w[m + i]) - &(&v[m + i] * &w[i]));
    }
    acc
}

/// Upper-triangle coordinates of `v vᵀ`.
fn pure_coords(v: &[Scalar]) -> Vector {
    let n = v.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            out.push(&v[i] * &v[j]);
        }
    }
    out
}

/// Symmetric matrix from upper-triangle coordinates.
fn sym_from_coords(c: &[Scalar], n: usize) -> Vec<Vec<Scalar>> {
    let mut s = vec![vec![c[0].field().zero(); n]; n];
    let mut idx = 0;
    for i in 0..n {
        for j in i..n {
            s[i][j] = c[idx].clone();
            s[j][i] = c[idx].clone();
            idx += 1;
        }
    }
    s
}

/// Rank at most one, by vanishing of all 2x2 minors.
fn rank_le_one(s: &[Vec<Scalar>]) -> bool {
    let n = s.len();
    for i in 0..n {
        for j in 0..n {
            for a in 0..n {
                for b in 0..n {
                    if &s[i][a] * &s[j][b] != &s[i][b] * &s[j][a] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Projective points of `F_p^n`: vectors whose first nonzero entry is 1.
fn projective_points(p: u64, n: usize) -> Vec<Vector> {
    let k = fp(p);
    let mut out = Vec::new();
    let total = p.pow(n as u32);
    for code in 1..total {
        let mut c = code;
        let digits: Vec<i64> = (0..n)
            .map(|_| {
                let d = (c % p) as i64;
                c /= p;
                d
            })
            .collect();
        if digits.iter().rev().find(|&&d| d != 0) == Some(&1) {
            out.push(ints(&k, &digits.iter().rev().copied().collect::<Vec<_>>()));
        }
    }
    out
}

fn standard_space(k: &FieldSpec, m: usize) -> Arc<SymplecticSpace> {
    Arc::new(SymplecticSpace::standard(k, m, 0).unwrap())
}

fn c1_model_dimensions() -> Outcome {
    let mut parts = Vec::new();
    for (q, n) in [(3u64, 4usize), (5, 4), (3, 6)] {
        let start = Instant::now();
        let k = fp(q);
        let space = standard_space(&k, n / 2);
        let l = sp_model(&space).map_err(|e| e.to_string())?;
        let id = sp_identification(&space).map_err(|e| e.to_string())?;
        let want = n * (n + 1) / 2;
        ensure(l.dim() == want, format!("dim {} != {want} over F_{q}", l.dim()))?;
        ensure(id.equal && id.dim_sf == want && id.dim_sp == want, format!("{id:?}"))?;
        ensure(start.elapsed() < Duration::from_secs(1), format!("F_{q}, n = {n} took {:?}", start.elapsed()))?;
        parts.push(format!("F_{q}^{n}: {want}"));
    }
    Ok(parts.join(", "))
}

fn c2_extremal_form_identity() -> Outcome {
    let k = fp(3);
    let space = standard_space(&k, 2);
    let l = sp_model(&space).unwrap();
    let pts = projective_points(3, 4);
    ensure(pts.len() == 40, format!("{} points", pts.len()))?;
    let mut pairs = 0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            pairs += 1;
            let f = form(&pts[i], &pts[j]);
            let want = &f * &f;
            let (a, b) = (SfElement::pure(space.clone(), &pts[i]).unwrap(), SfElement::pure(space.clone(), &pts[j]).unwrap());
            let closed = a.extremal_form(&b).unwrap();
            // definitional: [x, [x, y]] = 2 g(x, y) x, read off directly
            let (x, y) = (pure_coords(&pts[i]), pure_coords(&pts[j]));
            ensure(a.coords() == x, "pure tensor coordinates disagree")?;
            let xxy = l.bracket(&x, &l.bracket(&x, &y));
            let lead = x.iter().position(|c| !c.is_zero()).unwrap();
            let two_g = xxy[lead].div_checked(&x[lead]).unwrap();
            ensure(xxy == x.iter().map(|c| c * &two_g).collect::<Vector>(), "[x,[x,y]] not a multiple of x")?;
            let definitional = two_g.div_checked(&k.from_i64(2)).unwrap();
            ensure(closed == want && definitional == want, format!("pair ({i}, {j})"))?;
        }
    }
    ensure(pairs == 780, format!("{pairs} pairs"))?;
    Ok(format!("{pairs} pairs, closed form and definitional"))
}

fn c3_pure_tensor_classification() -> Outcome {
    let k = fp(3);
    let l = sp(&k, 2).unwrap();
    let all = enumerate_extremal_elements(&l, 3u64.pow(10)).map_err(|e| e.to_string())?;
    ensure(all.len() == 80, format!("{} extremal elements", all.len()))?;
    for x in &all {
        ensure(rank_le_one(&sym_from_coords(x, 4)), "an extremal element is not a multiple of a pure tensor")?;
    }
    let pure_points: HashSet<Vector> = projective_points(3, 4).iter().map(|v| pure_coords(v)).collect();
    let mut multiples = HashSet::new();
    for v in &pure_points {
        for c in [1, 2] {
            multiples.insert(v.iter().map(|a| a * &k.from_i64(c)).collect::<Vector>());
        }
    }
    ensure(all.iter().all(|x| multiples.contains(x)), "extremal element outside the pure tensor multiples")?;
    Ok(format!("{} extremal elements among 3^10 - 1", all.len()))
}

fn c4_triple_table() -> Outcome {
    let mut parts = Vec::new();
    for k in [fp(3), fp(5), FieldSpec::Rational] {
        let space = standard_space(&k, 2);
        let l = sp_model(&space).unwrap();
        let (x, y, z) = (pure_coords(&ints(&k, &[1, 0, 0, 0])), pure_coords(&ints(&k, &[0, 0, 1, 0])), pure_coords(&ints(&k, &[1, -1, 0, 0])));
        let t = classify_triple(&l, &x, &y, &z).map_err(|e| e.to_string())?;
        ensure(t.identities.iter().all(|&b| b), format!("identities {:?} over {k:?}", t.identities))?;
        ensure((t.kind, t.dim, t.center_dim) == (TripleKind::Sp3, 6, 1), format!("{t:?}"))?;
        let w = degenerate_three_space(&k).unwrap();
        let c = psp3(&k).unwrap();
        let e = |v: &[i64]| c.coords_of(&pure_endomorphism(&w, &ints(&k, v)).unwrap()).unwrap();
        let t0 = classify_triple(&c.algebra, &e(&[1, 0, 0]), &e(&[0, 0, 1]), &e(&[1, -1, 0])).map_err(|e| e.to_string())?;
        ensure(t0.identities.iter().all(|&b| b), format!("degenerate identities {:?}", t0.identities))?;
        ensure((t0.kind, t0.dim, t0.center_dim) == (TripleKind::PSp3, 5, 0), format!("{t0:?}"))?;
        parts.push(match k {
            FieldSpec::Rational => "Q".to_string(),
            _ => format!("F_{}", k.characteristic()),
        });
    }
    // random triples in sp6(F5): x ⟂ z, both not ⟂ y
    let k = fp(5);
    let space = standard_space(&k, 3);
    let l = sp_model(&space).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rand_vec = |rng: &mut ChaCha8Rng| -> Vector { (0..6).map(|_| k.from_i64(rng.gen_range(0..5))).collect() };
    let mut found = 0;
    while found < 50 {
        let (a, b, c) = (rand_vec(&mut rng), rand_vec(&mut rng), rand_vec(&mut rng));
        if form(&a, &c) != k.zero() || form(&a, &b).is_zero() || form(&c, &b).is_zero() {
            continue;
        }
        // z outside ⟨x, y⟩ as points: a, b, c independent
        if Subspace::from_vectors(&k, 6, vec![a.clone(), b.clone(), c.clone()]).unwrap().dim() < 3 {
            continue;
        }
        let t = classify_triple(&l, &pure_coords(&a), &pure_coords(&b), &pure_coords(&c)).map_err(|e| e.to_string())?;
        ensure(t.identities.iter().all(|&v| v), format!("random triple {found}: {:?}", t.identities))?;
        ensure((t.dim, t.center_dim) == (6, 1), format!("random triple {found}: {t:?}"))?;
        found += 1;
    }
    Ok(format!("example triple over {}, 50 random triples in sp6(F_5)", parts.join("/")))
}

fn c5_geometry_counts() -> Outcome {
    let start = Instant::now();
    let k = fp(3);
    let l = sp(&k, 2).unwrap();
    let geom = build_geometry(&l, l.extremal_generators(), 10_000).map_err(|e| e.to_string())?;
    ensure(geom.len() == 40 && geom.complete, format!("{} points", geom.len()))?;
    let lines = geom.hyperbolic_lines().to_vec();
    let polar = geom.polar_lines();
    for (kind, set) in [("sl2-line", &lines), ("polar line", &polar)] {
        for line in set.iter() {
            ensure(line.len() == 4, format!("{kind} with {} points", line.len()))?;
            let rep = line_span_check(&l, &geom, line, 1 << 20).map_err(|e| e.to_string())?;
            ensure(rep.pass, format!("{kind} span check: {:?}", rep.witnesses))?;
        }
    }
    // conic: in the basis g(x,y) x, y, [x,y] every point has αβ = γ²
    for line in &lines {
        let (x, y) = (geom.point(line[0]), geom.point(line[1]));
        let g = l.g_value(x, y).unwrap();
        let basis = vec![x.iter().map(|c| c * &g).collect::<Vector>(), y.clone(), l.bracket(x, y)];
        let m = Mat::from_cols(&k, l.dim(), &basis).unwrap();
        for &p in line {
            let s = Subspace::from_vectors(&k, l.dim(), basis.clone()).unwrap();
            ensure(s.contains(geom.point(p)), "point outside the line's span")?;
            let c = solve3(&m, geom.point(p)).ok_or("no coordinates")?;
            ensure(&c[0] * &c[1] == &c[2] * &c[2], "point off the conic")?;
        }
    }
    // every symplectic plane, found from triples and deduplicated
    let mut planes: Vec<HashSet<Vector>> = Vec::new();
    let n = geom.len();
    for y in 0..n {
        for x in 0..n {
            if geom.commutes(x, y) {
                continue;
            }
            for z in 0..n {
                if z == x || z == y || !geom.commutes(x, z) || geom.commutes(z, y) {
                    continue;
                }
                let (px, py, pz) = (geom.point(x), geom.point(y), geom.point(z));
                if planes.iter().any(|pl| pl.contains(px) && pl.contains(py) && pl.contains(pz)) {
                    continue;
                }
                let plane = symplectic_plane(&l, px, py, pz).map_err(|e| e.to_string())?;
                let mut sizes: Vec<usize> = plane.classes.iter().map(Vec::len).collect();
                sizes.sort();
                ensure(
                    plane.points.len() == 12 && plane.lines.len() == 9 && sizes == vec![3, 3, 3, 3],
                    format!("plane with {} points, {} lines, classes {sizes:?}", plane.points.len(), plane.lines.len()),
                )?;
                let canon: HashSet<Vector> =
                    plane.points.iter().map(|v| extremal::extremal::canonical(v).unwrap()).collect();
                planes.push(canon);
            }
        }
    }
    ensure(planes.len() == 40, format!("{} symplectic planes", planes.len()))?;
    ensure(start.elapsed() < Duration::from_secs(30), format!("took {:?}", start.elapsed()))?;
    Ok(format!("40 points, {} sl2-lines, {} polar lines, {} planes 12/9/4x3", lines.len(), polar.len(), planes.len()))
}

/// Coordinates of `v` in the three columns of `m`.
fn solve3(m: &Mat, v: &[Scalar]) -> Option<Vector> {
    let k = m.field().clone();
    let mut cols: Vec<Vector> = (0..3).map(|j| m.col(j)).collect();
    cols.push(v.to_vec());
    let aug = Mat::from_cols(&k, m.rows(), &cols).ok()?;
    let ker = aug.kernel();
    let w = ker.basis().first()?;
    let t = w[3].inv().ok()?;
    Some((0..3).map(|i| -&(&w[i] * &t)).collect())
}

fn c6_exp_automorphism() -> Outcome {
    let k = fp(5);
    let l = sp(&k, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..100 {
        let v: Vector = loop {
            let v: Vector = (0..4).map(|_| k.from_i64(rng.gen_range(0..5))).collect();
            if !is_zero_vec(&v) {
                break v;
            }
        };
        let c = k.from_i64(rng.gen_range(1..5));
        let x: Vector = pure_coords(&v).iter().map(|a| a * &c).collect();
        let lambda = k.from_i64(rng.gen_range(0..5));
        ensure(exp_check(&l, &x, &lambda).map_err(|e| e.to_string())?, format!("sample {i}"))?;
    }
    Ok("100 random (x, lambda) in sp4(F_5)".into())
}

fn c7_hypotheses_on_model() -> Outcome {
    let k = fp(3);
    let l = sp(&k, 2).unwrap();
    let geom = build_geometry(&l, l.extremal_generators(), 10_000).unwrap();
    let pts = geom.points().to_vec();
    let a = check_condition_a(&l, &pts).map_err(|e| e.to_string())?;
    ensure(a.pass, format!("condition A: {:?}", a.witnesses))?;
    let mut triples = 0;
    for x in 0..pts.len() {
        for y in 0..pts.len() {
            if geom.commutes(x, y) {
                continue;
            }
            for z in 0..pts.len() {
                triples += 1;
                let w = condition_b_witness(&l, &pts[x], &pts[y], &pts[z]).map_err(|e| e.to_string())?;
                ensure(w.in_base_field(), format!("no base field witness for ({x}, {y}, {z})"))?;
            }
        }
    }
    let mut meets = 0;
    for line in geom.hyperbolic_lines() {
        for x in 0..pts.len() {
            if line.contains(&x) {
                continue;
            }
            meets += 1;
            ensure(!matches!(line_meets_perp(&geom, x, line), LineMeet::Other(_)), "perp meets a line twice")?;
        }
    }
    Ok(format!("A on {} points, B on {triples} triples, perp point on {meets} point-line pairs", pts.len()))
}

fn c8_uniqueness_of_product() -> Outcome {
    let k = fp(5);
    let l = sp(&k, 2).unwrap();
    let id = Mat::identity(&k, l.dim());
    for g in [2, 3, 4] {
        let gamma = k.from_i64(g);
        let l2 = l.transform(&id, &gamma).unwrap();
        // independent oracle: every structure constant scaled
        for i in 0..l.dim() {
            for j in 0..l.dim() {
                let want: Vector = l.structure_constant(i, j).iter().map(|c| c * &gamma).collect();
                ensure(*l2.structure_constant(i, j) == want, "scaled table disagrees")?;
            }
        }
        let got = product_gamma(&l, &l2, l.extremal_generators()).map_err(|e| e.to_string())?;
        ensure(got == gamma, format!("recovered {got} for {g}"))?;
    }
    // negative control: bump one structure constant of the doubled table
    let mut v = l.transform(&id, &k.from_i64(2)).unwrap().to_json();
    let entries = v["bracket"].as_array_mut().unwrap();
    let last = entries.last_mut().unwrap();
    let c = k.scalar_from_json(&last[2][0][1]).unwrap();
    last[2][0][1] = (&c + &k.one()).to_json();
    let bad = StructureLieAlgebra::from_json(&v).unwrap();
    match product_gamma(&l, &bad, l.extremal_generators()) {
        Err(Error::NotProportional(_)) => {}
        other => return Err(format!("negative control gave {other:?}")),
    }
    Ok("gamma 2, 3, 4 recovered; perturbed table not proportional".into())
}

fn recognize_scramble(l: &StructureLieAlgebra, m: usize, rng: &mut ChaCha8Rng, limit: Duration) -> Result<Duration, String> {
    let k = l.field().clone();
    let gamma0 = k.from_i64(rng.gen_range(1..k.characteristic() as i64));
    let (scrambled, _) = l.scramble(rng, Some(&gamma0)).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let r = recognize(&scrambled, 100_000).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure(r.passed(), format!("checks {:?}", r.checks))?;
    ensure(r.m == m && scrambled.dim() == m * (2 * m + 1), format!("m = {}", r.m))?;
    ensure(r.space.is_nondegenerate(), "reconstructed form degenerate")?;
    // oracle: ψ([a, b]) γ⁻¹ = [ψ a, ψ b] on all basis pairs
    let ginv = r.gamma.inv().unwrap();
    let img = |i: usize| SfElement::from_coords(r.space.clone(), &r.psi.col(i)).unwrap();
    for i in 0..scrambled.dim() {
        for j in i + 1..scrambled.dim() {
            let lhs: Vector = r.psi.mul_vec(scrambled.structure_constant(i, j)).unwrap().iter().map(|c| c * &ginv).collect();
            ensure(lhs == img(i).bracket(&img(j)).unwrap().coords(), format!("basis pair ({i}, {j})"))?;
        }
    }
    ensure(took < limit, format!("took {took:?}"))?;
    Ok(took)
}

fn c9_recognition_round_trip() -> Outcome {
    let k = fp(3);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sp4 = sp(&k, 2).unwrap();
    let mut worst4 = Duration::ZERO;
    for i in 0..20 {
        let t = recognize_scramble(&sp4, 2, &mut rng, Duration::from_secs(10)).map_err(|e| format!("sp4 case {i}: {e}"))?;
        worst4 = worst4.max(t);
    }
    let sp6 = sp(&k, 3).unwrap();
    let mut worst6 = Duration::ZERO;
    for i in 0..5 {
        let t = recognize_scramble(&sp6, 3, &mut rng, Duration::from_secs(120)).map_err(|e| format!("sp6 case {i}: {e}"))?;
        worst6 = worst6.max(t);
    }
    Ok(format!("20 sp4(F_3) (max {worst4:.2?}), 5 sp6(F_3) (max {worst6:.2?})"))
}

fn c10_restriction() -> Outcome {
    let k = fp(3);
    let space = standard_space(&k, 3);
    // e1, e2, f1, f2 span a nondegenerate 4-space
    let w: Vec<Vector> = [0, 1, 3, 4].iter().map(|&i| unit_vec(&k, 6, i)).collect();
    let closure = model_subalgebra(&space, &standard_pure_vectors(&k, &w)).map_err(|e| e.to_string())?;
    ensure(closure.algebra.dim() == 10, format!("generated dim {}", closure.algebra.dim()))?;
    let mut pures = Vec::new();
    for c in projective_points(3, 4) {
        let mut v = vec![k.zero(); 6];
        for (ci, b) in c.iter().zip(&w) {
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi = &*vi + &(ci * bi);
            }
        }
        pures.push(pure_coords(&v));
    }
    let span = Subspace::from_vectors(&k, 21, pures).unwrap();
    let gen = Subspace::from_vectors(&k, 21, closure.basis.clone()).unwrap();
    ensure(span.dim() == 10, format!("span dim {}", span.dim()))?;
    ensure(span.sum(&gen).unwrap().dim() == 10, "generated subalgebra differs from the span")?;
    Ok("dim 10, equal to the span of the pure tensors".into())
}

fn c11_nondegeneracy_transfer() -> Outcome {
    let k = fp(3);
    for m in [2, 3] {
        let space = standard_space(&k, m);
        ensure(space.radical().dim() == 0, "radical of f")?;
        let l = sp_model(&space).unwrap();
        ensure(l.extremal_form().unwrap().radical().dim() == 0, format!("radical of g in sp{}", 2 * m))?;
        let geom = build_geometry(&l, l.extremal_generators(), 10_000).unwrap();
        let h = geom.health(true);
        ensure(h.nondegenerate && h.connected, format!("geometry of sp{} degenerate", 2 * m))?;
    }
    let s = sp3(&k).unwrap();
    let rad = s.algebra.extremal_form().unwrap().radical();
    ensure(rad.dim() > 0, "degenerate example has trivial radical")?;
    let e2 = s.coords_of(&pure_coords(&ints(&k, &[0, 1, 0, 0]))).ok_or("pure(e2) outside the subalgebra")?;
    let t = is_extremal(&s.algebra, &e2).unwrap();
    ensure(t.extremal && t.sandwich, "pure(e2) is not a sandwich")?;
    ensure(rad.contains(&e2), "pure(e2) outside the radical of g")?;
    Ok(format!("sp4/sp6 nondegenerate; degenerate example has radical dim {} with sandwich pure(e2)", rad.dim()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("model dimensions", c1_model_dimensions),
        ("extremal form identity", c2_extremal_form_identity),
        ("pure tensor classification", c3_pure_tensor_classification),
        ("triple table", c4_triple_table),
        ("geometry counts", c5_geometry_counts),
        ("exp automorphism", c6_exp_automorphism),
        ("hypotheses on the model", c7_hypotheses_on_model),
        ("uniqueness of the product", c8_uniqueness_of_product),
        ("recognition round trip", c9_recognition_round_trip),
        ("restriction to a nondegenerate subspace", c10_restriction),
        ("nondegeneracy transfer", c11_nondegeneracy_transfer),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({took:.2?}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({took:.2?}): {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
