//! One line per acceptance criterion; exits non-zero on any failure outside `KNOWN_GAPS`.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use wallx::graded_algebra::{lie_bracket, mat_mul, mat_mul_weighted, qtorus_mul, tga_mul, AlgebraTag, GradedElement, MatrixElement};
use wallx::io::StabilityJson;
use wallx::lattice_groupoid::{
    check_cocycle, compose, grading_lattice, make_induced_groupoid, Cocycle, CocycleCheck, GroupoidMorphism, IntMatrix,
    InducedGroupoid, LatticeMap,
};
use wallx::quiver_an::fq::{hom_complex, FqRep};
use wallx::quiver_an::*;
use wallx::scalar::{parse_q, MultiPoly, Q};
use wallx::stability_engine::{check_support, extract_spectrum, realize_matrix, wall_cross, CertMode, Norm, StabilityData, TElem, Verdict};
use wallx::vstab_wcf::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const PENTAGON: &str = r#"{
  "pairing": [[0, 1], [-1, 0]],
  "height": 6,
  "charge": [{"gamma": [1, 0], "re": 0, "im": 1}, {"gamma": [0, 1], "re": 1, "im": 0}],
  "rays": [{"gamma": [1, 0], "omega": 1}, {"gamma": [0, 1], "omega": 1}],
  "new_charge": [{"gamma": [1, 0], "re": 1, "im": 0}, {"gamma": [0, 1], "re": 0, "im": 1}]
}"#;

const A2_MATRIX: &str = r#"{
  "groupoid": {"phi": [[1, 0], [0, 1]], "objects": [[0, 0], [1, 0], [1, 1]]},
  "pairing": [[0, 0], [0, 0]],
  "height": 2,
  "charge": [{"gamma": [1, 0], "re": 0, "im": 1}, {"gamma": [0, 1], "re": 1, "im": 0}],
  "a": [
    {"gamma": [1, 0], "src": 0, "tgt": 1, "coeff": {"num": [1]}},
    {"gamma": [0, 1], "src": 1, "tgt": 2, "coeff": {"num": [1]}}
  ],
  "new_charge": [{"gamma": [1, 0], "re": 1, "im": 0}, {"gamma": [0, 1], "re": 0, "im": 1}]
}"#;

const SINGLE_RAY: &str = r#"{
  "pairing": [[0, 1], [-1, 0]],
  "height": 4,
  "charge": [{"gamma": [1, 0], "re": 1, "im": 1}, {"gamma": [0, 1], "re": -1, "im": 2}],
  "rays": [{"gamma": [1, 0], "omega": 1}]
}"#;

const ZERO_CHARGE: &str = r#"{
  "pairing": [[0, 1], [-1, 0]],
  "height": 2,
  "charge": [{"gamma": [1, 0], "re": 1, "im": 0}, {"gamma": [0, 1], "re": -1, "im": 0}],
  "a": [{"gamma": [1, 1], "coeff": {"num": [1]}}]
}"#;

fn q(s: &str) -> Q {
    parse_q(s).unwrap()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration) -> Result<Duration, String> {
    let e = t.elapsed();
    check(e < limit, || format!("took {e:.2?}, limit {limit:?}"))?;
    Ok(e)
}

fn load(text: &str) -> Result<(StabilityData, Option<wallx::stability_engine::CentralCharge>), String> {
    let b = StabilityJson::parse(text).and_then(|j| j.build()).map_err(|e| e.to_string())?;
    Ok((b.data, b.new_charge))
}

fn pentagon() -> Outcome {
    let t = Instant::now();
    let (data, z) = load(PENTAGON)?;
    let out = wall_cross(&data, &z.unwrap()).map_err(|e| e.to_string())?;
    let s = extract_spectrum(&out, None).map_err(|e| e.to_string())?;
    let omega = s.omega.ok_or("no Ω")?;
    let support: BTreeSet<Vec<i64>> = omega.keys().map(|g| g.vec.clone()).collect();
    check(support == BTreeSet::from([vec![0, 1], vec![1, 1], vec![1, 0]]), || format!("support {support:?}"))?;
    check(omega.values().all(|v| v.is_one()), || format!("Ω {omega:?}"))?;
    let e = within(t, Duration::from_secs(10))?;
    Ok(format!("N=6, 3 rays, Ω ≡ 1, {e:.2?}"))
}

fn unipotent(n: usize, i: usize, j: usize, p: MultiPoly) -> MatrixElement<MultiPoly> {
    MatrixElement::identity(n).add(&MatrixElement::unit(n, i, j, p)).unwrap()
}

fn u3() -> Outcome {
    let t = Instant::now();
    let (x, y) = (MultiPoly::var(0), MultiPoly::var(1));
    let lhs = mat_mul(&unipotent(3, 0, 1, x.clone()), &unipotent(3, 1, 2, y.clone())).unwrap();
    let middle = unipotent(3, 0, 2, x.clone() * y.clone());
    let rhs = mat_mul(&mat_mul(&unipotent(3, 1, 2, y.clone()), &middle).unwrap(), &unipotent(3, 0, 1, x.clone())).unwrap();
    check(lhs == rhs, || format!("{lhs} vs {rhs}"))?;
    let (data, z) = load(A2_MATRIX)?;
    let out = wall_cross(&data, &z.unwrap()).map_err(|e| e.to_string())?;
    let s = extract_spectrum(&out, None).map_err(|e| e.to_string())?;
    let factors: Vec<MatrixElement<MultiPoly>> = s
        .rays
        .iter()
        .map(|r| {
            let mut e = TElem::zero();
            for (g, c) in &r.terms {
                e.add_term(g.clone(), c.clone());
            }
            realize_matrix(&out.algebra.exp(&e), 3).unwrap()
        })
        .collect();
    check(factors.len() == 3, || format!("{} factors", factors.len()))?;
    check(factors[1] == middle, || format!("middle factor {}", factors[1]))?;
    let product = factors.iter().fold(MatrixElement::identity(3), |acc, f| mat_mul(&acc, f).unwrap());
    check(product == lhs, || format!("ray product {product}"))?;
    let e = within(t, Duration::from_secs(1))?;
    Ok(format!("identity exact, wall_cross middle factor 1 + xy·E02, {e:.2?}"))
}

fn hom_calculus() -> Outcome {
    let mut pairs = 0;
    for p in [2, 3] {
        for n in 1..=4 {
            for a in indecomposables(n, [0]) {
                for b in indecomposables(n, [0]) {
                    let c = hom_complex(&FqRep::interval(p, n, a.i, a.j), &FqRep::interval(p, n, b.i, b.j));
                    let t = hom_ext(&a, &b);
                    let extra = t.nonzero().any(|(d, _)| !(0..=1).contains(&d));
                    check(c.hom_dim(p) == t.dim(0) && c.ext_dim(p) == t.dim(1) && !extra, || format!("({a}, {b}) over F_{p}"))?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} pairs over F_2, F_3, n ≤ 4, 0 mismatches"))
}

fn correspondence_algebra() -> Outcome {
    let t = Instant::now();
    let mut triples = 0;
    let mut pairs = 0;
    let mut counts = 0;
    for n in 1..=3 {
        let basis: Vec<HallElement> = indecomposables(n, -1..=1).into_iter().map(HallElement::basis).collect();
        for x in &basis {
            for y in &basis {
                let xy = corr_product(x, y);
                for z in &basis {
                    check(corr_product(&xy, z) == corr_product(x, &corr_product(y, z)), || format!("({x}·{y})·{z}"))?;
                    triples += 1;
                }
            }
        }
        let w = integrate_weight();
        let unshifted: Vec<HallElement> = indecomposables(n, [0]).into_iter().map(HallElement::basis).collect();
        for x in &unshifted {
            for y in &unshifted {
                let lhs = integrate(&corr_product(x, y), n).map_err(|e| e.to_string())?;
                let rhs = mat_mul_weighted(&integrate(x, n).unwrap(), &integrate(y, n).unwrap(), &w).unwrap();
                check(lhs == rhs, || format!("∫({x}·{y})"))?;
                pairs += 1;
            }
        }
        for p in [2u64, 3, 5] {
            for x in indecomposables(n, [0]) {
                for y in indecomposables(n, [0]) {
                    let spec = specialize_element(&corr_product(&HallElement::basis(x), &HallElement::basis(y)), p)
                        .map_err(|e| e.to_string())?;
                    let counted = fq_ext_count(p, n, &y, &x).map_err(|e| e.to_string())?;
                    let got: BTreeMap<(usize, usize), u64> =
                        spec.iter().map(|(z, c)| ((z.i, z.j), c.to_u64().unwrap_or(u64::MAX))).collect();
                    check(got == counted.indec_cones, || format!("{x}·{y} at q={p}: {got:?} vs {:?}", counted.indec_cones))?;
                    counts += 1;
                }
            }
        }
    }
    let e = within(t, Duration::from_secs(60))?;
    Ok(format!("{triples} associativity triples, {pairs} ∫ pairs, {counts} counts at q = 2, 3, 5, {e:.2?}"))
}

const TRIPLES: [&str; 12] = [
    "-0.95,-0.55,-0.05", "-0.65,0.05,0.25", "-0.45,0.15,0.45", "-0.25,0.05,0.65", "0.05,0.25,0.95", "0.15,0.35,0.85",
    "-0.55,-0.15,0.35", "0.05,0.55,0.95", "-0.75,-0.25,0.15", "-0.35,0.35,0.55", "0.45,0.65,0.85", "-0.15,0.25,0.75",
];

fn hall_wcf() -> Outcome {
    let t = Instant::now();
    let points = [
        ("0.3", "0.3", StabilityType::All),
        ("-0.3", "-0.2", StabilityType::III),
        ("1.2", "0.4", StabilityType::I),
        ("0.4", "1.3", StabilityType::II),
    ];
    let mut checks = 0;
    for (a1, a2, ty) in points {
        let s = A2Stability::new(A2Point::from_alphas(q(a1), q(a2)), ty).map_err(|e| e.to_string())?;
        for p in [2, 3] {
            for tr in TRIPLES {
                let v: Vec<Q> = tr.split(',').map(q).collect();
                let r = wcf_verify(&s, &[v[0].clone(), v[1].clone(), v[2].clone()], HallMode::Oracle { q: p }, &[2, 2], PathOrientation::Descending)
                    .map_err(|e| format!("{} [{tr}] q={p}: {e}", s.point))?;
                check(r.pass, || format!("{} [{tr}] q={p}: {:?}", s.point, r.discrepancies))?;
                checks += 1;
            }
        }
    }
    let a = A2Stability::new(A2Point::new(q("0.1"), q("0.7"), q("0.4")), StabilityType::All).unwrap();
    let b = A2Stability::new(A2Point::new(q("0.8"), q("0.3"), q("0.5")), StabilityType::III).unwrap();
    let i = Interval::new(q("0"), q("0.95"));
    let o = PathOrientation::Descending;
    let r = chamber_invariance(&a, &b, &i, HallMode::Restricted, &[2, 2], o).map_err(|e| e.to_string())?;
    check(r.pass, || format!("restricted invariance: {:?}", r.discrepancies))?;
    for p in [2, 3] {
        let full = chamber_invariance(&a, &b, &i, HallMode::Oracle { q: p }, &[2, 2], o).map_err(|e| e.to_string())?;
        let shown: Vec<String> =
            full.discrepancies.iter().map(|d| format!("{:?} {}: {} vs {}", d.entry, d.object, d.lhs, d.rhs)).collect();
        check(full.pass, || {
            format!("{checks} splits pass, restricted invariance holds, full invariance at q={p} differs at {}", shown.join("; "))
        })?;
    }
    let e = within(t, Duration::from_secs(300))?;
    Ok(format!("{checks} splits over 4 chambers × q = 2, 3 × {} triples; invariance across the wall, {e:.2?}", TRIPLES.len()))
}

fn atlas() -> Outcome {
    let t = Instant::now();
    let pts: Vec<RegionPoint> = grid_points(100, &q("-3"), &q("3")).into_iter().map(|(a, b)| region_point(a, b)).collect();
    let s = summarize(&pts);
    check(s.points == 10_000, || format!("{} points", s.points))?;
    check(s.disagreements == 0, || format!("{} disagreements", s.disagreements))?;
    let want = expected_regions();
    let seen: BTreeSet<&String> = s.regions.keys().collect();
    check(seen == want.keys().collect(), || format!("regions {seen:?}"))?;
    check(s.multiplicity == want, || format!("multiplicities {:?}", s.multiplicity))?;
    let e = within(t, Duration::from_secs(120))?;
    Ok(format!(
        "100×100, {} on dividing lines, 0 disagreements, {} regions with multiplicities {:?}, {e:.2?}",
        s.boundary,
        s.regions.len(),
        s.multiplicity
    ))
}

fn a2_groupoid() -> InducedGroupoid {
    let phi = LatticeMap::from_rows(vec![vec![-1, 0], vec![1, -1], vec![0, 1]], 2).unwrap();
    make_induced_groupoid(phi, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap()
}

fn box2(r: i64) -> Vec<Vec<i64>> {
    (-r..=r).flat_map(|a| (-r..=r).map(move |b| vec![a, b])).collect()
}

fn pairings() -> Vec<IntMatrix> {
    (-2..=2).map(|k| IntMatrix::from_rows(vec![vec![0, k], vec![-k, 0]]).unwrap()).collect()
}

fn properties() -> Outcome {
    let g = a2_groupoid();
    let mut n = 0;
    for p in pairings() {
        let s = Cocycle::BilinearSign { pairing: p.clone() };
        check(matches!(check_cocycle(&g, &s, 2), CocycleCheck::Pass { .. }), || format!("cocycle for {p:?}"))?;
        n += 1;
    }
    let gl = grading_lattice(&g, None).map_err(|e| e.to_string())?;
    let mors = g.morphisms_in_box(2);
    for a in &mors {
        for b in mors.iter().filter(|b| b.src == a.tgt) {
            let ab = compose(a, b).unwrap();
            let sum: Vec<i64> = gl.degree(a).unwrap().iter().zip(gl.degree(b).unwrap()).map(|(x, y)| x + y).collect();
            check(gl.degree(&ab).unwrap() == sum, || format!("degree of {a}∘{b}"))?;
            let s = Cocycle::BilinearSign { pairing: pairings()[3].clone() };
            let t = AlgebraTag::TwistedGroupoid;
            let xy = tga_mul(&GradedElement::basis(t, a.clone()), &GradedElement::basis(t, b.clone()), &s).unwrap();
            check(xy.terms().all(|(m, _)| gl.degree(m).unwrap() == sum), || format!("grading of {a}·{b}"))?;
            n += 1;
        }
    }
    let torus = make_induced_groupoid(LatticeMap::new(IntMatrix { rows: 0, cols: 2, data: Vec::new() }), vec![Vec::new()]).unwrap();
    let tl = grading_lattice(&torus, None).unwrap();
    let vs = box2(1);
    for p in pairings() {
        let s = Cocycle::BilinearSign { pairing: p.clone() };
        let el = |tag, v: &Vec<i64>| GradedElement::basis(tag, GroupoidMorphism::new(0, 0, v.clone()));
        let br = |x: &GradedElement, y: &GradedElement| lie_bracket(x, y, &s, &tl, &p).unwrap();
        for a in &vs {
            for b in &vs {
                for c in &vs {
                    let qt = AlgebraTag::QuantumTorus;
                    let (x, y, z) = (el(qt, a), el(qt, b), el(qt, c));
                    let l = qtorus_mul(&qtorus_mul(&x, &y, &p).unwrap(), &z, &p).unwrap();
                    let r = qtorus_mul(&x, &qtorus_mul(&y, &z, &p).unwrap(), &p).unwrap();
                    check(l == r, || format!("qtorus ({a:?}, {b:?}, {c:?})"))?;
                    let lie = AlgebraTag::Lie;
                    let (x, y, z) = (el(lie, a), el(lie, b), el(lie, c));
                    let j = br(&x, &br(&y, &z)).add(&br(&y, &br(&z, &x))).unwrap().add(&br(&z, &br(&x, &y))).unwrap();
                    check(j.is_zero(), || format!("Jacobi ({a:?}, {b:?}, {c:?})"))?;
                    n += 2;
                }
            }
        }
    }
    Ok(format!("{n} exhaustive checks: cocycle, grading additivity, qtorus associativity, Jacobi"))
}

fn support() -> Outcome {
    let l2 = CertMode::NormBound { c_sq: None, norm: Norm::L2 };
    let (zero, _) = load(ZERO_CHARGE)?;
    let c = check_support(&zero, &l2);
    let Verdict::Fail { witness: Some(w), .. } = &c.verdict else {
        return Err(format!("vanishing charge: {:?}", c.verdict));
    };
    check(w.vec == vec![1, 1], || format!("witness {w}"))?;
    let (ray, _) = load(SINGLE_RAY)?;
    let c = check_support(&ray, &l2);
    check(c.verdict == Verdict::Pass { c_sq: Some(Q::new(BigInt::from(1), BigInt::from(2))) }, || format!("single ray: {:?}", c.verdict))?;
    let (data, z) = load(PENTAGON)?;
    let out = wall_cross(&data, &z.unwrap()).map_err(|e| e.to_string())?;
    let restored = StabilityData::new(out.algebra.clone(), data.charge.clone(), out.a.clone()).map_err(|e| e.to_string())?;
    let c = check_support(&restored, &l2);
    check(c.verdict == Verdict::Pass { c_sq: Some(Q::one()) }, || format!("pentagon: {:?}", c.verdict))?;
    let tight = CertMode::NormBound { c_sq: Some(q("0.99")), norm: Norm::L2 };
    check(!check_support(&restored, &tight).passed(), || "C² below the minimum passed".into())?;
    Ok(format!("Z = 0 fails with witness {w}; single ray C = {:.4}; pentagon output C = 1", 0.5f64.sqrt()))
}

/// Criteria whose failure is recorded and does not fail the run; a pass here fails it.
const KNOWN_GAPS: [usize; 1] = [5];

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("pentagon wall-crossing", pentagon),
        ("A_2 matrix identity in U_3", u3),
        ("Hom/Ext calculus vs F_q", hom_calculus),
        ("correspondence Hall algebra", correspondence_algebra),
        ("Hall wall-crossing identity", hall_wcf),
        ("A_2 stability atlas", atlas),
        ("algebraic property suite", properties),
        ("support-property checker", support),
    ];
    let mut failed = 0;
    let mut unexpected = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let known = KNOWN_GAPS.contains(&(k + 1));
        match run() {
            Ok(detail) => {
                unexpected += usize::from(known);
                println!("criterion {}: PASS {name}: {detail}", k + 1);
            }
            Err(why) => {
                failed += 1;
                unexpected += usize::from(!known);
                let tag = if known { " (known gap)" } else { "" };
                println!("criterion {}: FAIL{tag} {name}: {why}", k + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
