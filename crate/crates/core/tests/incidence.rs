use std::collections::BTreeMap;
use fqgeom::motions::motion_universe;
use fqgeom::incidence::*;
#[allow(unused_imports)]
use fqgeom::*;
use fqgeom::motions::enumerate_orthogonal;
use fqgeom::rng::Lcg;

fn f(q: u32) -> Field {
    Field::from_order(q, &Guardrails::default()).unwrap()
}

fn all(fl: &Field, d: usize) -> Vec<RigidMotion> {
    motion_universe(fl, d, MotionClass::General, &Guardrails::default()).unwrap()
}

/// Oracle: triple loop over U x V x R.
fn naive_count(fl: &Field, u: &[Point], v: &[Point], r: &[RigidMotion]) -> u64 {
    let mut n = 0;
    for m in r {
        for a in u {
            for b in v {
                if m.apply(fl, a) == *b {
                    n += 1;
                }
            }
        }
    }
    n
}

#[test]
fn incidence_count_examples() {
    let fl = f(3);
    let plane: Vec<Point> = fl.points(2).collect();
    let r = all(&fl, 2);
    let p = PairSet::square(2, &plane).unwrap();
    assert_eq!(incidence_count(&fl, &p, &r).unwrap(), 648);
    let origin = PairSet::square(2, &[Point::zero(2)]).unwrap();
    assert_eq!(incidence_count(&fl, &origin, &r).unwrap(), 8);
    assert_eq!(incidence_count(&fl, &p, &[]).unwrap(), 0);
}

#[test]
fn dimension_mismatch() {
    let fl = f(3);
    let p = PairSet::square(3, &[Point::zero(3)]).unwrap();
    assert!(matches!(
        incidence_count(&fl, &p, &all(&fl, 2)),
        Err(Error::DimensionMismatch { .. })
    ));
    assert!(PairSet::new(2, &[Point::zero(3)], &[]).is_err());
}

#[test]
fn hashed_count_matches_naive() {
    let fl = f(7);
    let universe = all(&fl, 2);
    for trial in 0..10 {
        let mut g = Lcg::new(trial);
        let nu = g.range(0, 20) as usize;
        let nv = g.range(0, 20) as usize;
        let u = g.points(&fl, 2, nu);
        let v = g.points(&fl, 2, nv);
        let nr = g.range(0, 200) as usize;
        let r = g.subset(&universe, nr);
        let p = PairSet::new(2, &u, &v).unwrap();
        assert_eq!(incidence_count(&fl, &p, &r).unwrap(), naive_count(&fl, &u, &v, &r));
    }
}

#[test]
fn spectrum_examples() {
    let fl = f(3);
    let g = Guardrails::default();
    let origin = PairSet::square(2, &[Point::zero(2)]).unwrap();
    let s = motion_spectrum(&fl, &origin, MotionClass::General, &g).unwrap();
    assert_eq!(s.histogram, BTreeMap::from([(0, 64), (1, 8)]));
    let plane: Vec<Point> = fl.points(2).collect();
    let full = PairSet::square(2, &plane).unwrap();
    let s = motion_spectrum(&fl, &full, MotionClass::General, &g).unwrap();
    assert_eq!(s.histogram, BTreeMap::from([(9, 72)]));
    let empty = PairSet::new(2, &[], &plane).unwrap();
    let s = motion_spectrum(&fl, &empty, MotionClass::General, &g).unwrap();
    assert_eq!(s.histogram, BTreeMap::from([(0, 72)]));
}

#[test]
fn rich_motion_examples() {
    let fl = f(3);
    let r = all(&fl, 2);
    let origin = PairSet::square(2, &[Point::zero(2)]).unwrap();
    let rich = rich_motions(&fl, &origin, 1, &r).unwrap();
    assert_eq!(rich.len(), 8);
    assert!(rich.iter().all(|m| m.z.is_zero()));
    assert!(rich_motions(&fl, &origin, 2, &r).unwrap().is_empty());
    let plane: Vec<Point> = fl.points(2).collect();
    let full = PairSet::square(2, &plane).unwrap();
    assert_eq!(rich_motions(&fl, &full, 1, &r).unwrap().len(), 72);
    assert!(rich_motions(&fl, &full, 0, &r).is_err());
}

#[test]
fn moment_examples() {
    let fl = f(3);
    let r = all(&fl, 2);
    let mut g = Lcg::new(5);
    let u = g.points(&fl, 2, 4);
    let v = g.points(&fl, 2, 6);
    let p = PairSet::new(2, &u, &v).unwrap();
    assert_eq!(moment_sum(&fl, &p, 1, &r).unwrap(), 4 * 6 * 8);
    let origin = PairSet::square(2, &[Point::zero(2)]).unwrap();
    assert_eq!(moment_sum(&fl, &origin, 2, &r).unwrap(), 8);
    let plane: Vec<Point> = fl.points(2).collect();
    let full = PairSet::square(2, &plane).unwrap();
    assert_eq!(moment_sum(&fl, &full, 3, &r).unwrap(), 52488);
}

#[test]
fn triple_examples() {
    let fl = f(3);
    let r = all(&fl, 2);
    let o = [Point::zero(2)];
    let t = triple_correlation(&fl, &o, &o, &o, &r).unwrap();
    assert_eq!(t.exact, 8);
    assert!((t.holder_333 - 8.0).abs() < 1e-9 && (t.holder_442 - 8.0).abs() < 1e-9);
    let t = triple_correlation(&fl, &o, &o, &[], &r).unwrap();
    assert_eq!(t.exact, 0);
    assert_eq!(t.holder_333, 0.0);
    let plane: Vec<Point> = fl.points(2).collect();
    let t = triple_correlation(&fl, &plane, &plane, &plane, &r).unwrap();
    assert_eq!(t.exact, 72 * 729);
    assert!(t.within_333 && t.within_442);
    assert!((t.holder_333 - 52488.0).abs() < 1e-6);
}

#[test]
fn audit_examples() {
    let fl = f(3);
    let r = all(&fl, 2);
    let plane: Vec<Point> = fl.points(2).collect();
    let full = PairSet::square(2, &plane).unwrap();
    let rep = audit_bound(&fl, &full, &r, Theorem::T2_1).unwrap();
    assert_eq!(rep.lhs, 648);
    assert!((rep.main_term - 648.0).abs() < 1e-9);
    assert_eq!(rep.c_star, 0.0);

    let origin = PairSet::square(2, &[Point::zero(2)]).unwrap();
    let rep = audit_bound(&fl, &origin, &r, Theorem::T2_4).unwrap();
    assert_eq!(rep.lhs, 8);
    // |P||R|/q^2 = 72/9
    assert!((rep.main_term - 8.0).abs() < 1e-12);
    assert!((rep.error_term_unit - 3f64.sqrt() * 72f64.sqrt()).abs() < 1e-12);
    assert_eq!(rep.c_star, 0.0);
    assert!(rep.side_conditions_hold());

    for t in Theorem::ALL {
        let rep = audit_bound(&fl, &full, &[], t).unwrap();
        assert_eq!((rep.lhs, rep.c_star), (0, 0.0));
    }
}

#[test]
fn t26_side_conditions() {
    let fl = f(7);
    let r = all(&fl, 2);
    let p = PairSet::square(2, &[Point::zero(2)]).unwrap();
    let rep = audit_bound(&fl, &p, &r, Theorem::T2_6).unwrap();
    assert!(!rep.side_conditions_hold());
    let sfp = motion_universe(&fl, 2, MotionClass::SfPrime, &Guardrails::default()).unwrap();
    let rep = audit_bound(&fl, &p, &sfp, Theorem::T2_6).unwrap();
    assert!(rep.side_conditions_hold());
    assert_eq!(rep.main_term, 0.0);
}

#[test]
fn cs_examples() {
    let fl = f(3);
    let r = all(&fl, 2);
    let origin = PairSet::square(2, &[Point::zero(2)]).unwrap();
    let stab: Vec<RigidMotion> = r.iter().filter(|m| m.z.is_zero()).copied().collect();
    let cs = audit_cs_bounds(&fl, &origin, &stab).unwrap();
    assert_eq!(cs.bound_31.lhs, 8);
    assert_eq!(cs.bound_31.verdict, crate::report::Verdict::Pass);
    let cs = audit_cs_bounds(&fl, &origin, &[]).unwrap();
    assert_eq!(cs.bound_31.lhs, 0);
    assert_eq!(cs.bound_31.verdict, crate::report::Verdict::Pass);
    let plane: Vec<Point> = fl.points(2).collect();
    let full = PairSet::square(2, &plane).unwrap();
    let cs = audit_cs_bounds(&fl, &full, &r).unwrap();
    assert_eq!(cs.bound_31.lhs, 648);
    assert!((cs.bound_31.error_term_unit - (81.0 * 72f64.sqrt() + 72.0)).abs() < 1e-9);
    assert_eq!(cs.bound_31.verdict, crate::report::Verdict::Pass);
}

#[test]
fn double_counting_identity() {
    for (q, d) in [(3, 2), (7, 2), (3, 3)] {
        let fl = f(q);
        let r = all(&fl, d);
        let og = enumerate_orthogonal(&fl, d, &Guardrails::default()).unwrap().len() as u128;
        for seed in 0..5 {
            let mut g = Lcg::new(seed);
            let n = fl.space_size(d);
            let u = g.points(&fl, d, g.clone().range(0, n.min(30)) as usize);
            let v = g.points(&fl, d, 7.min(n as usize));
            let p = PairSet::new(d, &u, &v).unwrap();
            let s = spectrum_of(&fl, &p, &r).unwrap();
            assert_eq!(s.total_incidences(), p.len() as u128 * og);
            assert_eq!(s.histogram.values().sum::<u64>(), s.universe_size);
        }
    }
}

#[test]
fn rich_audit_runs() {
    let fl = f(7);
    let g = Guardrails::default();
    let mut rng = Lcg::new(3);
    let u = rng.points(&fl, 2, 10);
    let p = PairSet::square(2, &u).unwrap();
    let s = motion_spectrum(&fl, &p, MotionClass::General, &g).unwrap();
    let rep = audit_rich(&fl, &p, &s, RichBound::C2_2).unwrap();
    assert!(rep.side_conditions_hold());
    assert!(rep.c_star.is_finite() && rep.c_star > 0.0);
    let rep = audit_moment(&fl, &p, 3, &s, MomentBound::P5_1).unwrap();
    assert_eq!(rep.lhs, s.moment(3));
    assert!(rep.side_conditions_hold());
}

#[test]
fn theorem_ids_parse() {
    for t in Theorem::ALL {
        assert_eq!(t.id().parse::<Theorem>().unwrap(), t);
    }
    assert!("T9.9".parse::<Theorem>().is_err());
}
