use std::collections::BTreeSet;
use fqgeom::simplex::*;
#[allow(unused_imports)]
use fqgeom::*;
use fqgeom::motions::{motion_universe, MotionClass};
use fqgeom::rng::Lcg;

fn f(q: u32) -> Field {
    Field::from_order(q, &Guardrails::default()).unwrap()
}

fn pt(fl: &Field, c: &[u32]) -> Point {
    fl.point(c).unwrap()
}

fn simplex(fl: &Field, vs: &[&[u32]]) -> LabeledSimplex {
    LabeledSimplex::new(&vs.iter().map(|c| pt(fl, c)).collect::<Vec<_>>()).unwrap()
}

#[test]
fn distance_examples() {
    let fl = f(3);
    let plane: Vec<Point> = fl.points(2).collect();
    assert_eq!(distance_count(&fl, &plane, &plane, Elem::ONE), 36);
    let o = [Point::zero(2)];
    assert_eq!(distance_count(&fl, &o, &o, Elem::ONE), 0);
    let rep = audit_distance(&fl, &plane, &plane, Elem::ONE);
    assert_eq!(rep.lhs, 36);
    assert!((rep.main_term - 27.0).abs() < 1e-12);
    assert_eq!(rep.verdict, crate::report::Verdict::Pass);
}

#[test]
fn mu_examples() {
    for q in [3, 7, 11] {
        let fl = f(q);
        let (four, one) = (fl.from_int(4), Elem::ONE);
        assert_eq!(mu_formula(&fl, four, one, one), 1);
    }
    let fl = f(11);
    let one = Elem::ONE;
    assert_eq!(fl.quad_char(fl.from_int(3)), 1);
    assert_eq!(mu_formula(&fl, one, one, one), 2);
    // a segment of norm 1
    let (x, y) = (pt(&fl, &[0, 0]), pt(&fl, &[1, 0]));
    let e = extend_segment(&fl, &x, &y, one, one).unwrap();
    assert_eq!((e.witnesses.len(), e.mu), (2, 2));
    let six = fl.from_int(6);
    let e = extend_segment(&fl, &x, &y, one, six).unwrap();
    // 4*13 - 64 = -12 = 10 mod 11, a non-square
    assert_eq!(e.discriminant, fl.from_int(10));
    assert_eq!(e.witnesses.len(), e.mu as usize);
    assert_eq!(e.mu, 0);
    assert_eq!(
        extend_segment(&fl, &x, &x, one, one),
        Err(Error::DegenerateSegment)
    );
}

#[test]
fn apex_profile_matches_extend_segment() {
    let fl = f(7);
    let (x, y) = (pt(&fl, &[1, 2]), pt(&fl, &[3, 6]));
    let h = apex_profile(&fl, &x, &y);
    for l2 in fl.elements() {
        for l3 in fl.elements() {
            let e = extend_segment(&fl, &x, &y, l2, l3).unwrap();
            assert_eq!(
                h[l2.index() as usize * 7 + l3.index() as usize] as usize,
                e.witnesses.len()
            );
            assert_eq!(e.witnesses.len(), e.mu as usize);
        }
    }
}

#[test]
fn classify_examples() {
    let fl = f(3);
    let s = simplex(&fl, &[&[0, 0], &[1, 0], &[0, 1]]);
    let k = classify(&fl, &s);
    assert_eq!(k.norms(), &[Elem::ONE, Elem::ONE, fl.from_int(2)]);
    assert_eq!(k.rank(), 2);
    assert_eq!(k.to_string(), "2|1,1,2");
    assert_eq!("2|1,1,2".parse::<SimplexKey>().unwrap(), k);
    let line = simplex(&fl, &[&[0, 0], &[1, 1], &[2, 2]]);
    let kl = classify(&fl, &line);
    assert!(kl.rank() <= 1 && !kl.is_nondegenerate(2));
    for r in motion_universe(&fl, 2, MotionClass::General, &Guardrails::default()).unwrap() {
        assert_eq!(classify(&fl, &s.apply(&fl, &r)), k);
    }
}

#[test]
fn key_matrix_is_symmetric() {
    let fl = f(7);
    let s = simplex(&fl, &[&[0, 0], &[1, 3], &[4, 1], &[2, 2]]);
    let m = classify(&fl, &s).norm_matrix();
    for i in 0..4 {
        assert!(m[i][i].is_zero());
        for j in 0..4 {
            assert_eq!(m[i][j], m[j][i]);
            assert_eq!(m[i][j], fl.dist(&s.vertices()[i], &s.vertices()[j]));
        }
    }
}

#[test]
fn orbit_oracle_examples() {
    let fl = f(7);
    let g = Guardrails::default();
    let s = simplex(&fl, &[&[0, 0], &[1, 0], &[0, 2]]);
    let r = orbit_oracle(&fl, &s, &s, &g).unwrap().unwrap();
    assert_eq!(s.apply(&fl, &r), s);
    let t = simplex(&fl, &[&[0, 0], &[1, 0], &[0, 3]]);
    assert_ne!(classify(&fl, &s), classify(&fl, &t));
    assert_eq!(orbit_oracle(&fl, &s, &t, &g).unwrap(), None);
    let universe = motion_universe(&fl, 2, MotionClass::General, &g).unwrap();
    let moved = s.apply(&fl, &universe[700]);
    let w = orbit_oracle(&fl, &s, &moved, &g).unwrap().unwrap();
    assert_eq!(s.apply(&fl, &w), moved);
}

#[test]
fn stabilizer_examples() {
    let g = Guardrails::default();
    let fl = f(7);
    let tri = simplex(&fl, &[&[0, 0], &[1, 0], &[0, 1]]);
    assert_eq!(stabilizer_size(&fl, &tri, &g).unwrap(), 1);
    let seg = simplex(&fl, &[&[0, 0], &[1, 0]]);
    assert_eq!(stabilizer_size(&fl, &seg, &g).unwrap(), 2);
    let f3 = f(3);
    let o = LabeledSimplex::new(&[Point::zero(2), Point::zero(2)]).unwrap();
    assert_eq!(stabilizer_size(&f3, &o, &g).unwrap(), 8);
}

#[test]
fn census_examples() {
    let fl = f(3);
    let g = Guardrails::default();
    let a = vec![pt(&fl, &[1, 2])];
    let c = count_classes(&fl, 2, &[a.clone(), a.clone(), a], &g).unwrap();
    assert_eq!((c.class_count(), c.degenerate_class_count()), (1, 1));
    let plane: Vec<Point> = fl.points(2).collect();
    let c = count_classes(&fl, 2, &[plane.clone(), plane.clone()], &g).unwrap();
    assert_eq!(c.total, 81);
    let norms: BTreeSet<Elem> = c.classes.keys().map(|k| k.norms()[0]).collect();
    assert_eq!(norms.len(), 3);
    let c = count_classes(&fl, 2, &[plane.clone(), plane.clone(), plane], &g).unwrap();
    assert_eq!(c.total, 729);
    assert_eq!(c.classes.values().sum::<u64>(), 729);
    assert!(c.cauchy_schwarz_holds());
    assert!(c.unordered_class_count() <= c.class_count());
}

#[test]
fn census_is_worker_independent() {
    let fl = f(7);
    let mut rng = Lcg::new(9);
    let a = rng.points(&fl, 2, 12);
    let sets = vec![a.clone(), a.clone(), a];
    let run = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(|| count_classes(&fl, 2, &sets, &Guardrails::default()).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn census_guardrail() {
    let fl = f(11);
    let plane: Vec<Point> = fl.points(2).collect();
    let sets = vec![plane.clone(), plane.clone(), plane.clone(), plane];
    assert!(matches!(
        count_classes(&fl, 2, &sets, &Guardrails::default()),
        Err(Error::TooLarge { .. })
    ));
}

#[test]
fn fixed_side_examples() {
    let fl = f(3);
    let plane: Vec<Point> = fl.points(2).collect();
    let n = count_classes_containing(&fl, &plane, &plane, &plane, Elem::ONE).unwrap();
    assert!(n >= 5, "{n}");
    assert_eq!(
        count_classes_containing(&fl, &plane, &plane, &[], Elem::ONE).unwrap(),
        0
    );
    let o = [Point::zero(2)];
    assert_eq!(count_classes_containing(&fl, &o, &o, &plane, Elem::ONE).unwrap(), 0);
    // brute force: distinct keys of all qualifying triples
    let mut keys = BTreeSet::new();
    for x in &plane {
        for y in &plane {
            for z in &plane {
                if fl.dist(x, y) == Elem::ONE {
                    keys.insert(classify(&fl, &LabeledSimplex::new(&[*x, *y, *z]).unwrap()));
                }
            }
        }
    }
    assert_eq!(n, keys.len() as u64);
}

#[test]
fn copy_examples() {
    let fl = f(3);
    let plane: Vec<Point> = fl.points(2).collect();
    let unit = SimplexKey::from_parts(2, 1, &[Elem::ONE]).unwrap();
    assert_eq!(copy_count(&fl, &[plane.clone(), plane.clone()], &unit).unwrap(), 36);
    let rep = audit_copies(&fl, &[plane.clone(), plane.clone()], &unit).unwrap();
    assert!((rep.main_term - 27.0).abs() < 1e-12);
    assert!((rep.lhs as f64 / rep.main_term - 4.0 / 3.0).abs() < 1e-12);
    assert_eq!(copy_count(&fl, &[plane.clone(), vec![]], &unit).unwrap(), 0);
    // norms (1,1,1) force 4*3 - 9 = 3 = 0 mod 3: one apex per segment
    let eq = SimplexKey::from_parts(3, 2, &[Elem::ONE; 3]).unwrap();
    let n = copy_count(&fl, &[plane.clone(), plane.clone(), plane], &eq).unwrap();
    assert_eq!(n, 36);
}

#[test]
fn copy_count_matches_census() {
    let fl = f(7);
    let mut rng = Lcg::new(4);
    let a = rng.points(&fl, 2, 15);
    let sets = vec![a.clone(), a.clone(), a];
    let c = count_classes(&fl, 2, &sets, &Guardrails::default()).unwrap();
    for (k, n) in c.classes.iter().filter(|(k, _)| !k.has_zero_side()).take(20) {
        let same_norms: u64 = c
            .classes
            .iter()
            .filter(|(k2, _)| k2.norms() == k.norms())
            .map(|(_, m)| m)
            .sum();
        assert!(*n <= same_norms);
        assert_eq!(copy_count(&fl, &sets, k).unwrap(), same_norms);
    }
}

#[test]
fn sphere_examples() {
    let fl = f(11);
    let one = Elem::ONE;
    let s = sphere_intersection(&fl, &[pt(&fl, &[0, 0]), pt(&fl, &[1, 0])], &[one, one]).unwrap();
    assert!(s.independent && s.within_cap() && s.points.len() <= 2);
    let s = sphere_intersection(&fl, &[pt(&fl, &[0, 0])], &[one]).unwrap();
    assert_eq!(s.points.len(), 12);
    let c = pt(&fl, &[3, 3]);
    let s = sphere_intersection(&fl, &[c, c], &[one, fl.from_int(2)]).unwrap();
    assert!(s.points.is_empty() && !s.independent);
}

#[test]
fn unordered_key_ignores_labels() {
    let fl = Field::new(7, 1).unwrap();
    let pts = [[0, 0], [1, 2], [3, 5], [6, 1]].map(|c| fl.point(&c).unwrap());
    let key = classify(&fl, &LabeledSimplex::new(&pts).unwrap());
    let mut seen = std::collections::BTreeSet::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                if a == b || a == c || b == c || a + b + c < 3 {
                    continue;
                }
                let d = 6 - a - b - c;
                let k = key.permuted(&[a, b, c, d]);
                assert_eq!(k.unordered(), key.unordered());
                seen.insert(k);
            }
        }
    }
    assert!(seen.len() > 1 && seen.len() <= 24);
}
