use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde_json::{json, Value};

use wallx::io::{terms_json, to_json, Rational, StabilityJson};
use wallx::lattice_groupoid::GroupoidMorphism;
use wallx::quiver_an::fq::hom_complex;
use wallx::quiver_an::hall::fq_hall_product;
use wallx::quiver_an::{
    corr_product, fq_ext_count, indecomposables, specialize_element, Correspondence, DObject, FqRep, HallElement,
    OracleElement,
};
use wallx::scalar::{parse_q, GaussianRational, Q};
use wallx::stability_engine::{
    check_support, extract_spectrum, factor_check, realize_matrix, wall_cross, CertMode, Norm, Sector,
    StabilityData, TElem, Verdict,
};
use wallx::vstab_wcf::{
    a2_classify as classify, a2_hn_oracle, expected_regions, grid_points, region_point, summarize, type_set_label,
    wcf_verify as verify, A2Point, A2Stability, HallMode, HNResult, OracleVerdict, PathOrientation, RegionPoint,
    StabilityType,
};
use wallx::WallxError;

use crate::config::{Mode, RunConfig};
use crate::{read_input, Failure, Outcome};

fn usage(m: impl Into<String>) -> Failure {
    Failure::Usage(m.into())
}

fn round(q: Q, mode: Mode) -> Q {
    match mode {
        Mode::Exact => q,
        Mode::Float => BigRational::from_float(q.to_f64().unwrap_or(f64::NAN)).unwrap_or(q),
    }
}

fn round_rational(r: &mut Rational, mode: Mode) -> Result<(), Failure> {
    if mode == Mode::Float {
        *r = Rational::from_q(&round(r.to_q()?, mode));
    }
    Ok(())
}

fn q_list(s: &str, mode: Mode) -> Result<Vec<Q>, Failure> {
    s.split(',').map(|p| Ok(round(parse_q(p)?, mode))).collect()
}

fn load_stability(path: &str, cfg: &RunConfig, mode: Mode) -> Result<(Vec<u8>, StabilityJson), Failure> {
    let bytes = read_input(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| usage(e.to_string()))?;
    let mut j = StabilityJson::parse(&text)?;
    if let Some(h) = cfg.height {
        if !text.contains("\"height\"") {
            j.height = h;
        }
    }
    for c in j.charge.iter_mut().chain(j.new_charge.iter_mut().flatten()) {
        round_rational(&mut c.re, mode)?;
        round_rational(&mut c.im, mode)?;
    }
    Ok((bytes, j))
}

fn direction_text(z: &GaussianRational) -> String {
    format!("{z} (arg {:.6}π)", z.arg_pi())
}

fn spectrum_json(data: &StabilityData) -> Result<(Value, String), Failure> {
    let s = extract_spectrum(data, None)?;
    let mut text = String::new();
    let rays: Vec<Value> = s
        .rays
        .iter()
        .map(|r| {
            let _ = writeln!(text, "ray {}", direction_text(&r.direction));
            for (g, c) in &r.terms {
                let _ = writeln!(text, "    {g}: {c}");
            }
            json!({ "direction": r.direction.to_string(), "arg_pi": r.direction.arg_pi(), "terms": terms_json(&r.terms) })
        })
        .collect();
    let invariants = |m: &Option<std::collections::BTreeMap<GroupoidMorphism, num_bigint::BigInt>>| -> Value {
        match m {
            None => Value::Null,
            Some(m) => m
                .iter()
                .map(|(g, v)| json!({ "gamma": g.vec, "src": g.src, "tgt": g.tgt, "value": v.to_string() }))
                .collect(),
        }
    };
    if let Some(o) = &s.omega {
        for (g, v) in o {
            let _ = writeln!(text, "Ω({g}) = {v}");
        }
    }
    if let Some(m) = &s.mu {
        for (g, v) in m {
            let _ = writeln!(text, "μ({g}) = {v}");
        }
    }
    Ok((json!({ "rays": rays, "omega": invariants(&s.omega), "mu": invariants(&s.mu) }), text))
}

fn support_sector(data: &StabilityData) -> Result<Option<Sector>, Failure> {
    let zs: Vec<GaussianRational> =
        data.a.keys().map(|g| data.charge.eval(&data.algebra, &g.vec).expect("support in span")).collect();
    if zs.is_empty() {
        return Ok(None);
    }
    Ok(Some(Sector::spanning(&zs)?))
}

fn factor_json(data: &StabilityData, sector: Option<&Sector>) -> Result<(bool, Value), Failure> {
    let Some(v) = sector else {
        return Ok((true, json!({ "pass": true, "rays": 0 })));
    };
    let r = factor_check(data, v)?;
    Ok((
        r.pass,
        json!({
            "pass": r.pass,
            "rays": r.rays,
            "failed_split": r.failed_split,
            "exp_discrepancy_height": r.exp_discrepancy.as_ref().map(|d| d.height),
        }),
    ))
}

pub fn factorize(path: &str, sector: Option<&str>, cfg: &RunConfig, mode: Mode) -> Result<Outcome, Failure> {
    let (input, j) = load_stability(path, cfg, mode)?;
    let built = j.build()?;
    let data = built.data;
    let arguments = json!({ "input": path, "sector": sector, "height": j.height });
    let cert = check_support(&data, &CertMode::NormBound { c_sq: None, norm: Norm::L2 });
    if let Verdict::Fail { witness, reason } = &cert.verdict {
        let w = witness.as_ref().map(|g| g.to_string());
        let text = format!("support property fails at {}: {reason}\n", w.clone().unwrap_or_default());
        return Ok(Outcome {
            pass: false,
            arguments,
            input,
            result: json!({ "support": { "pass": false, "witness": w, "reason": reason } }),
            text,
        });
    }
    let v = match sector {
        Some(s) => {
            let b = q_list(s, mode)?;
            if b.len() != 2 {
                return Err(usage("--sector expects start,end"));
            }
            Some(Sector::from_angles(&b[0], &b[1])?)
        }
        None => match built.sector {
            Some(s) => Some(s),
            None => support_sector(&data)?,
        },
    };
    let (spectrum, mut text) = spectrum_json(&data)?;
    let (pass, fc) = factor_json(&data, v.as_ref())?;
    let _ = writeln!(text, "factor_check: {}", if pass { "pass" } else { "fail" });
    let result = json!({
        "support": { "pass": true, "c": cert.c_value() },
        "spectrum": spectrum,
        "factor_check": fc,
    });
    Ok(Outcome { pass, arguments, input, result, text })
}

pub fn wallcross(path: &str, matrix: Option<usize>, cfg: &RunConfig, mode: Mode) -> Result<Outcome, Failure> {
    let (input, j) = load_stability(path, cfg, mode)?;
    let built = j.build()?;
    let new_charge = built.new_charge.ok_or_else(|| usage("input has no new_charge"))?;
    let data = built.data;
    let out = wall_cross(&data, &new_charge)?;
    let back = wall_cross(&out, &data.charge)?;
    let involution = back.a == data.a;
    let (spectrum, mut text) = spectrum_json(&out)?;
    let (factor_pass, fc) = factor_json(&out, support_sector(&out)?.as_ref())?;
    let n = matrix.or_else(|| j.groupoid.as_ref().map(|g| g.objects.len()).filter(|k| *k > 1));
    let mut matrices = Vec::new();
    if let Some(n) = n {
        let s = extract_spectrum(&out, None)?;
        for r in &s.rays {
            let mut x = TElem::zero();
            for (g, c) in &r.terms {
                x.add_term(g.clone(), c.clone());
            }
            let m = realize_matrix(&out.algebra.exp(&x), n)?;
            let _ = write!(text, "factor at {}:\n{m}", direction_text(&r.direction));
            matrices.push(json!({ "direction": r.direction.to_string(), "matrix": m.to_string() }));
        }
    }
    let _ = writeln!(text, "involution: {}", if involution { "pass" } else { "fail" });
    let _ = writeln!(text, "factor_check: {}", if factor_pass { "pass" } else { "fail" });
    let result = json!({
        "a_new": to_json(&j, &out),
        "involution": involution,
        "factor_check": fc,
        "spectrum": spectrum,
        "matrices": matrices,
    });
    Ok(Outcome { pass: involution && factor_pass, arguments: json!({ "input": path, "matrix": matrix, "height": j.height }), input, result, text })
}

fn hn_json(s: &HNResult) -> Value {
    json!({
        "object": s.object.to_string(),
        "factors": s.factors.iter().map(|(x, t)| json!({ "object": x.to_string(), "phase": t.to_string() })).collect::<Vec<_>>(),
        "path": s.path,
        "orientation": s.orientation,
    })
}

fn hn_text(s: &HNResult) -> String {
    let f: Vec<String> = s.factors.iter().map(|(x, t)| format!("{x}@{t}")).collect();
    let p: Vec<String> = s.path.iter().map(|v| v.to_string()).collect();
    format!("HN({}) = [{}] path {}", s.object, f.join(", "), p.join("→"))
}

pub fn a2_classify(theta: Option<&str>, alphas: Option<&str>, mode: Mode) -> Result<Outcome, Failure> {
    let p = match (theta, alphas) {
        (Some(t), _) => {
            let v = q_list(t, mode)?;
            if v.len() != 3 {
                return Err(usage("--theta expects θ01,θ12,θ02"));
            }
            A2Point::new(v[0].clone(), v[1].clone(), v[2].clone())
        }
        (None, Some(a)) => {
            let v = q_list(a, mode)?;
            if v.len() != 2 {
                return Err(usage("--alphas expects α1,α2"));
            }
            A2Point::from_alphas(v[0].clone(), v[1].clone())
        }
        (None, None) => return Err(usage("give --theta or --alphas")),
    };
    let c = classify(&p)?;
    let mut text = format!("{p}\ntypes: {}\ncoamoeba: {:?}\n", type_set_label(&c.types), c.coamoeba);
    let mut per_type = Vec::new();
    for t in &c.types {
        let OracleVerdict::Pass { sequences } = a2_hn_oracle(&p, &t.semistable()) else {
            unreachable!("classification confirms every type");
        };
        let _ = writeln!(text, "{t}:");
        for s in &sequences {
            let _ = writeln!(text, "    {}", hn_text(s));
        }
        per_type.push(json!({ "type": t, "hn": sequences.iter().map(hn_json).collect::<Vec<_>>() }));
    }
    let result = json!({
        "theta": [p.theta01.to_string(), p.theta12.to_string(), p.theta02.to_string()],
        "alpha": [p.alpha1().to_string(), p.alpha2().to_string(), p.alpha3().to_string()],
        "types": c.types,
        "coamoeba": c.coamoeba,
        "hn": per_type,
    });
    Ok(Outcome { pass: true, arguments: json!({ "theta": theta, "alphas": alphas }), input: Vec::new(), result, text })
}

pub struct WcfArgs {
    pub q: Vec<u64>,
    pub cutoff: Option<String>,
    pub thetas: Vec<String>,
    pub point: String,
    pub stype: Option<String>,
    pub restricted: bool,
    pub ascending: bool,
}

pub fn wcf_verify(a: WcfArgs, cfg: &RunConfig, mode: Mode) -> Result<Outcome, Failure> {
    let qs = if !a.q.is_empty() { a.q.clone() } else { cfg.q.clone().unwrap_or_else(|| vec![2]) };
    let cutoff: Vec<usize> = match &a.cutoff {
        Some(c) => c.split(',').map(|x| x.trim().parse().map_err(|_| usage(format!("bad cutoff {c:?}")))).collect::<Result<_, _>>()?,
        None => cfg.cutoff.clone().unwrap_or_else(|| vec![2, 2]),
    };
    if cutoff.len() != 2 {
        return Err(usage("--cutoff expects two entries for A_2"));
    }
    let thetas = if a.thetas.is_empty() { vec!["-0.35,0.05,0.45".to_string()] } else { a.thetas.clone() };
    let v = q_list(&a.point, mode)?;
    if v.len() != 3 {
        return Err(usage("--point expects θ01,θ12,θ02"));
    }
    let p = A2Point::new(v[0].clone(), v[1].clone(), v[2].clone());
    let stype = match &a.stype {
        Some(s) => StabilityType::parse(s)?,
        None => *classify(&p)?
            .types
            .iter()
            .next()
            .ok_or_else(|| Failure::Engine(WallxError::InvalidInput(format!("no admissible type at {p}"))))?,
    };
    let stab = A2Stability::new(p.clone(), stype)?;
    let orientation = if a.ascending { PathOrientation::Ascending } else { PathOrientation::Descending };
    let mut jobs: Vec<(Option<u64>, [Q; 3])> = Vec::new();
    for t in &thetas {
        let v = q_list(t, mode)?;
        let triple: [Q; 3] = v.try_into().map_err(|_| usage(format!("--thetas expects three values, got {t:?}")))?;
        if a.restricted {
            jobs.push((None, triple));
        } else {
            jobs.extend(qs.iter().map(|q| (Some(*q), triple.clone())));
        }
    }
    let reports: Vec<Result<_, WallxError>> = jobs
        .par_iter()
        .map(|(q, t)| {
            let mode = q.map_or(HallMode::Restricted, |q| HallMode::Oracle { q });
            verify(&stab, t, mode, &cutoff, orientation)
        })
        .collect();
    let mut text = format!("{p} type {stype}\n");
    let mut out = Vec::new();
    let mut pass = true;
    for ((q, t), r) in jobs.iter().zip(reports) {
        let r = r?;
        pass &= r.pass;
        let label = q.map_or("restricted".to_string(), |q| format!("q={q}"));
        let _ = writeln!(
            text,
            "[{}, {}, {}] {label}: {} ({} terms)",
            t[0], t[1], t[2], if r.pass { "pass" } else { "fail" }, r.compared
        );
        for d in &r.discrepancies {
            let _ = writeln!(text, "    ({},{}) {}: {} vs {}", d.entry.0, d.entry.1, d.object, d.lhs, d.rhs);
        }
        out.push(json!({ "q": q, "thetas": t.iter().map(|x| x.to_string()).collect::<Vec<_>>(), "report": r }));
    }
    let arguments = json!({
        "q": qs, "cutoff": cutoff, "thetas": thetas, "point": a.point, "type": stype,
        "restricted": a.restricted, "orientation": orientation,
    });
    Ok(Outcome { pass, arguments, input: Vec::new(), result: json!({ "runs": out }), text })
}

fn point_json(p: &RegionPoint) -> Value {
    json!({
        "alpha1": p.alpha1.to_string(),
        "alpha2": p.alpha2.to_string(),
        "coamoeba": p.coamoeba,
        "types": p.types,
        "oracle": p.oracle,
        "agree": p.agrees(),
    })
}

pub fn regions(grid: usize, lo: &str, hi: &str) -> Result<Outcome, Failure> {
    let (l, h) = (parse_q(lo)?, parse_q(hi)?);
    if grid == 0 || h <= l {
        return Err(usage("need grid > 0 and lo < hi"));
    }
    let points: Vec<RegionPoint> = grid_points(grid, &l, &h).into_par_iter().map(|(a, b)| region_point(a, b)).collect();
    let s = summarize(&points);
    let expected = expected_regions();
    let seven = s.multiplicity == expected;
    let mut text = format!(
        "{} points, {} on dividing lines, {} disagreements, {} in the coamoeba\n",
        s.points, s.boundary, s.disagreements, s.coamoeba_members
    );
    for (k, n) in &s.regions {
        let _ = writeln!(text, "    {k:<8} {n:>6} points, {} type(s)", s.multiplicity[k]);
    }
    let _ = writeln!(text, "seven-region structure: {}", if seven { "reproduced" } else { "not reproduced" });
    let result = json!({
        "summary": s,
        "seven_regions": seven,
        "points": points.iter().map(point_json).collect::<Vec<_>>(),
    });
    Ok(Outcome {
        pass: s.disagreements == 0,
        arguments: json!({ "grid": grid, "lo": lo, "hi": hi }),
        input: Vec::new(),
        result,
        text,
    })
}

fn a2_objects() -> Vec<DObject> {
    let mut out = vec![DObject::zero()];
    out.extend(indecomposables(2, -1..=1).into_iter().map(DObject::indec));
    out
}

pub fn hall_oracle(q: Vec<u64>, n_max: usize, samples: usize, cfg: &RunConfig) -> Result<Outcome, Failure> {
    let qs = if !q.is_empty() { q } else { cfg.q.clone().unwrap_or_else(|| vec![2, 3]) };
    let mut jobs = Vec::new();
    for &q in &qs {
        for n in 1..=n_max {
            for x in indecomposables(n, [0]) {
                for y in indecomposables(n, [0]) {
                    jobs.push((q, n, x, y));
                }
            }
        }
    }
    let mismatches: Vec<String> = jobs
        .par_iter()
        .map(|&(q, n, x, y)| -> Result<Vec<String>, WallxError> {
            let mut bad = Vec::new();
            let c = hom_complex(&FqRep::interval(q, n, x.i, x.j), &FqRep::interval(q, n, y.i, y.j));
            let t = wallx::quiver_an::hom_ext(&x, &y);
            if c.hom_dim(q) != t.dim(0) || c.ext_dim(q) != t.dim(1) {
                bad.push(format!("A_{n} q={q}: Hom/Ext({x}, {y})"));
            }
            let spec = specialize_element(&corr_product(&HallElement::basis(x), &HallElement::basis(y)), q)?;
            let counted = fq_ext_count(q, n, &y, &x)?;
            let total: u64 = spec.values().filter_map(|v| v.to_u64()).sum();
            if total != counted.indec_cone_count
                || spec.iter().any(|(z, v)| counted.indec_cones.get(&(z.i, z.j)).copied() != v.to_u64())
            {
                bad.push(format!("A_{n} q={q}: {x}·{y} cone counts"));
            }
            Ok(bad)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut assoc = Vec::new();
    if samples > 0 {
        let mut rng = StdRng::seed_from_u64(cfg.seed.unwrap_or(0));
        let objs = a2_objects();
        let cutoff = [2, 2];
        let mut drawn = Vec::new();
        while drawn.len() < samples {
            let t: [DObject; 3] = std::array::from_fn(|_| objs[rng.random_range(0..objs.len())].clone());
            let dims: Vec<usize> = (0..2).map(|v| t.iter().map(|o| o.total_dims(2)[v]).sum()).collect();
            if dims.iter().all(|d| *d <= 2) {
                drawn.push((qs[drawn.len() % qs.len()], t));
            }
        }
        assoc = drawn
            .par_iter()
            .map(|(q, [x, y, z])| -> Result<Option<String>, WallxError> {
                let one = |o: &DObject| OracleElement::from([(o.clone(), Q::from_integer(1.into()))]);
                let m = Correspondence::FullExt;
                let left = fq_hall_product(*q, 2, &fq_hall_product(*q, 2, &one(x), &one(y), &cutoff, m)?, &one(z), &cutoff, m)?;
                let right = fq_hall_product(*q, 2, &one(x), &fq_hall_product(*q, 2, &one(y), &one(z), &cutoff, m)?, &cutoff, m)?;
                Ok((left != right).then(|| format!("q={q}: ({x}·{y})·{z}")))
            })
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .flatten()
            .collect();
    }
    let checked: BTreeSet<u64> = qs.iter().copied().collect();
    let mut text = format!("{} Hom/Ext and cone comparisons over q ∈ {checked:?}, n ≤ {n_max}: {} mismatches\n", jobs.len(), mismatches.len());
    if samples > 0 {
        let _ = writeln!(text, "{samples} associativity samples: {} failures", assoc.len());
    }
    for m in mismatches.iter().chain(&assoc) {
        let _ = writeln!(text, "    {m}");
    }
    let result = json!({
        "comparisons": jobs.len(),
        "mismatches": mismatches,
        "associativity_samples": samples,
        "associativity_failures": assoc,
    });
    Ok(Outcome {
        pass: mismatches.is_empty() && assoc.is_empty(),
        arguments: json!({ "q": qs, "n": n_max, "samples": samples, "seed": cfg.seed.unwrap_or(0) }),
        input: Vec::new(),
        result,
        text,
    })
}
