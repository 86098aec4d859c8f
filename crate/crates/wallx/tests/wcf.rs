use std::collections::BTreeSet;

use wallx::scalar::{parse_q, Q};
use wallx::vstab_wcf::*;

fn q(s: &str) -> Q {
    parse_q(s).unwrap()
}

fn stab(a1: &str, a2: &str, t: StabilityType) -> A2Stability {
    A2Stability::new(A2Point::from_alphas(q(a1), q(a2)), t).unwrap()
}

fn triples() -> Vec<[Q; 3]> {
    ["-0.95,-0.55,-0.05", "-0.65,0.05,0.25", "-0.45,0.15,0.45", "-0.25,0.05,0.65", "0.05,0.25,0.95", "0.15,0.35,0.85",
     "-0.55,-0.15,0.35", "0.05,0.55,0.95", "-0.75,-0.25,0.15", "-0.35,0.35,0.55", "0.45,0.65,0.85", "-0.15,0.25,0.75"]
        .iter()
        .map(|s| {
            let v: Vec<Q> = s.split(',').map(q).collect();
            [v[0].clone(), v[1].clone(), v[2].clone()]
        })
        .collect()
}

fn conditions() -> Vec<A2Stability> {
    vec![
        stab("0.3", "0.3", StabilityType::All),
        stab("-0.3", "-0.2", StabilityType::III),
        stab("1.2", "0.4", StabilityType::I),
        stab("0.4", "1.3", StabilityType::II),
    ]
}

#[test]
fn wcf_holds_over_fq() {
    for s in conditions() {
        for qq in [2, 3] {
            let mut passed = 0;
            for t in triples() {
                let r = match wcf_verify(&s, &t, HallMode::Oracle { q: qq }, &[2, 2], PathOrientation::Descending) {
                    Ok(r) => r,
                    Err(e) => panic!("{e}"),
                };
                assert!(r.pass, "{} {:?} q={qq}: {:?}", s.point, t, r.discrepancies);
                passed += 1;
            }
            assert_eq!(passed, 12, "{}", s.point);
        }
    }
}

#[test]
fn wcf_holds_in_restricted_mode_and_ascending_order() {
    for s in conditions() {
        for t in triples() {
            for o in [PathOrientation::Descending, PathOrientation::Ascending] {
                match wcf_verify(&s, &t, HallMode::Restricted, &[2, 2], o) {
                    Ok(r) => assert!(r.pass, "{} {:?} {o:?}: {:?}", s.point, t, r.discrepancies),
                    Err(wallx::WallxError::EndpointPhase(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
            if let Ok(r) = wcf_verify(&s, &t, HallMode::Oracle { q: 2 }, &[2, 2], PathOrientation::Ascending) {
                assert!(r.pass, "ascending {} {:?}: {:?}", s.point, t, r.discrepancies);
            }
        }
    }
}

#[test]
fn chamber_invariance_across_the_wall() {
    let a = A2Stability::new(A2Point::new(q("0.1"), q("0.7"), q("0.4")), StabilityType::All).unwrap();
    let b = A2Stability::new(A2Point::new(q("0.8"), q("0.3"), q("0.5")), StabilityType::III).unwrap();
    let i = Interval::new(q("0"), q("0.95"));
    let r = chamber_invariance(&a, &b, &i, HallMode::Restricted, &[2, 2], PathOrientation::Descending).unwrap();
    assert!(r.pass, "{:?}", r.discrepancies);
    let full = chamber_invariance(&a, &b, &i, HallMode::Oracle { q: 2 }, &[2, 2], PathOrientation::Descending).unwrap();
    println!("full: {:?}", full.discrepancies);
}

#[test]
fn coarse_grid_matches_oracle() {
    let pts: Vec<RegionPoint> = grid_points(40, &q("-3"), &q("3")).into_iter().map(|(a, b)| region_point(a, b)).collect();
    let s = summarize(&pts);
    assert_eq!(s.disagreements, 0);
    let seen: BTreeSet<&String> = s.regions.keys().collect();
    println!("{s:?}");
    assert_eq!(seen, expected_regions().keys().collect());
}

#[test]
fn restricted_cone_matches_indecomposable_cone_counts() {
    use num_traits::One;
    use wallx::quiver_an::hall::fq_hall_basis;
    use wallx::quiver_an::{indecomposables, Correspondence, DObject};
    for qq in [2u64, 3] {
        for x in indecomposables(2, -1..=1) {
            for y in indecomposables(2, -1..=1) {
                let o = fq_hall_basis(qq, 2, &DObject::indec(x), &DObject::indec(y), &[2, 2], Correspondence::IndecomposableCones)
                    .unwrap();
                let expect: Vec<(DObject, Q)> = restricted_cone(&x, &y).map(|e| (DObject::indec(e), Q::one())).into_iter().collect();
                assert_eq!(o.into_iter().collect::<Vec<_>>(), expect, "{x}·{y} at q={qq}");
            }
        }
    }
}
