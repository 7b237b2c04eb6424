use std::collections::BTreeSet;
use fqgeom::lineworld::*;
#[allow(unused_imports)]
use fqgeom::*;
use fqgeom::motions::{motion_universe, special_orthogonal};
use fqgeom::rng::Lcg;

fn f(q: u32) -> Field {
    Field::from_order(q, &Guardrails::default()).unwrap()
}

fn pt(fl: &Field, c: &[u32]) -> Point {
    fl.point(c).unwrap()
}

#[test]
fn phi_examples() {
    let fl = f(3);
    let g0 = phi_of(&fl, Elem::ZERO).unwrap();
    assert_eq!(g0.entry(0, 0), fl.from_int(-1));
    assert_eq!(g0.entry(1, 1), fl.from_int(-1));
    assert!(g0.entry(0, 1).is_zero() && g0.entry(1, 0).is_zero());
    let images: BTreeSet<OrthoMatrix> = fl.elements().map(|r| phi_of(&fl, r).unwrap()).collect();
    let so2: BTreeSet<OrthoMatrix> = special_orthogonal(&fl, 2, &Guardrails::default())
        .unwrap()
        .into_iter()
        .filter(|g| !g.is_identity())
        .collect();
    assert_eq!(images, so2);
    assert_eq!(images.len(), 3);
    assert_eq!(phi_of(&f(5), Elem::ZERO), Err(Error::WrongResidue { q: 5 }));
}

#[test]
fn phi_inverse_examples() {
    let fl = f(11);
    for r in fl.elements() {
        let g = phi_of(&fl, r).unwrap();
        assert!(g.is_orthogonal(&fl));
        assert_eq!(phi_inverse(&fl, &g).unwrap(), r);
    }
    assert_eq!(phi_inverse(&fl, &phi_of(&fl, Elem::ZERO).unwrap()).unwrap(), Elem::ZERO);
    assert_eq!(
        phi_inverse(&fl, &OrthoMatrix::identity(2)),
        Err(Error::NotInDomain)
    );
}

#[test]
fn line_examples() {
    let fl = f(7);
    let e1 = pt(&fl, &[1, 0]);
    let l = line_from_pair(&fl, &e1, &e1).unwrap();
    for (t, x) in fl.elements().zip(l.points(&fl)) {
        assert_eq!(x, Point::new(&[Elem::ONE, Elem::ZERO, t]).unwrap());
    }
    let o = Point::zero(2);
    let l = line_from_pair(&fl, &o, &o).unwrap();
    assert_eq!(l.to_string(), "base=[0,0,0];dir=[0,0,1]");
    assert_eq!(parse_line(&fl, &l.to_string()).unwrap(), l);
    for a in fl.points(2) {
        let l = line_from_pair(&fl, &a, &o).unwrap();
        assert_eq!(l.dir().get(2), Elem::ONE);
    }
}

#[test]
fn line_canonical_form() {
    let fl = f(7);
    let base = pt(&fl, &[1, 2, 3]);
    let dir = pt(&fl, &[2, 4, 6]);
    let l = Line3::new(&fl, base, dir).unwrap();
    let shifted = Line3::new(&fl, fl.add_pt(&base, &dir), fl.scale_pt(fl.from_int(3), &dir)).unwrap();
    assert_eq!(l, shifted);
    assert!(Line3::new(&fl, base, Point::zero(3)).is_err());
}

#[test]
fn motion_points_invert() {
    let fl = f(7);
    let g = Guardrails::default();
    let sfp = motion_universe(&fl, 2, MotionClass::SfPrime, &g).unwrap();
    let pts: BTreeSet<Point> = sfp.iter().map(|m| motion_to_point(&fl, m).unwrap()).collect();
    assert_eq!(pts.len(), 343);
    let t = RigidMotion::translation(pt(&fl, &[1, 0]));
    assert!(matches!(motion_to_point(&fl, &t), Err(Error::NotOriented(_))));
}

#[test]
fn equivalence_examples() {
    let fl = f(7);
    let g = Guardrails::default();
    let u = [pt(&fl, &[1, 2])];
    let v = [pt(&fl, &[3, 5])];
    let p = PairSet::new(2, &u, &v).unwrap();
    assert_eq!(incidence_equivalence(&fl, &p, &[]).unwrap(), (0, 0));
    let sfp = motion_universe(&fl, 2, MotionClass::SfPrime, &g).unwrap();
    let hit: Vec<RigidMotion> = sfp
        .iter()
        .filter(|m| m.apply(&fl, &u[0]) == v[0])
        .take(1)
        .copied()
        .collect();
    assert_eq!(incidence_equivalence(&fl, &p, &hit).unwrap(), (1, 1));
    let mut rng = Lcg::new(2);
    let uu = rng.points(&fl, 2, 6);
    let vv = rng.points(&fl, 2, 5);
    let r = rng.subset(&sfp, 120);
    let p = PairSet::new(2, &uu, &vv).unwrap();
    let (a, b) = incidence_equivalence(&fl, &p, &r).unwrap();
    assert_eq!(a, b);
}

#[test]
fn plane_counts() {
    let fl = f(7);
    let planes = all_planes(&fl);
    assert_eq!(planes.len(), 343 + 49 + 7);
    assert!(planes.windows(2).all(|w| w[0] < w[1]));
    let one = plane_audit(&fl, &[pt(&fl, &[2, 3])], &Guardrails::default()).unwrap();
    assert_eq!((one.max_lines, one.line_count), (1, 1));
    let two = plane_audit(&fl, &[pt(&fl, &[0, 0]), pt(&fl, &[1, 0])], &Guardrails::default()).unwrap();
    assert!(two.max_lines <= 8);
    assert_eq!(two.line_count, 4);
}

#[test]
fn plane_line_containment_matches_points() {
    let fl = f(3);
    let planes = all_planes(&fl);
    let l = line_from_pair(&fl, &pt(&fl, &[1, 0]), &pt(&fl, &[0, 2])).unwrap();
    for pl in &planes {
        let all = l.points(&fl).all(|x| pl.contains_point(&fl, &x));
        assert_eq!(pl.contains_line(&fl, &l), all);
    }
    let s = planes[17].to_string();
    assert_eq!(s.parse::<Plane3>().unwrap(), planes[17]);
}

#[test]
fn kollar_examples() {
    let fl = f(7);
    let o = Point::zero(2);
    let l = line_from_pair(&fl, &o, &o).unwrap();
    let rep = kollar_check(&fl, &[], &[]).unwrap();
    assert_eq!(rep.lhs, 0);
    let pts: Vec<Point> = l.points(&fl).collect();
    let rep = kollar_check(&fl, &pts, &[l]).unwrap();
    assert_eq!(rep.lhs, 7);
    assert!((rep.error_term_unit - 7f64.powf(1.2)).abs() < 1e-9);
    assert!(rep.c_star <= 1.0);
}
