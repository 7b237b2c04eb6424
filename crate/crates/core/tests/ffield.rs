use fqgeom::ffield::*;
#[allow(unused_imports)]
use fqgeom::*;

fn f(p: u32, r: u32) -> Field {
    Field::new(p, r).unwrap()
}

#[test]
fn make_field_examples() {
    assert_eq!(f(3, 1).q_mod_4(), 3);
    assert_eq!(f(3, 3).q(), 27);
    assert_eq!(f(3, 3).q_mod_4(), 3);
    assert_eq!(f(5, 1).q_mod_4(), 1);
}

#[test]
fn make_field_errors() {
    assert_eq!(Field::new(9, 1), Err(Error::NonPrime(9)));
    assert_eq!(Field::new(2, 1), Err(Error::EvenCharacteristic));
    assert_eq!(Field::new(3, 4), Err(Error::UnsupportedDegree(4)));
    assert!(matches!(Field::new(11, 2), Err(Error::TooLarge { .. })));
    assert_eq!(Field::with_guardrails(11, 2, &Guardrails::forced()).unwrap().q(), 121);
}

#[test]
fn smallest_moduli() {
    // x^2 + 1 over F_3; x^3 + 2x^2 + 1 is the first root-free cubic scanning c_0 first.
    assert_eq!(smallest_irreducible(3, 2), vec![1, 0]);
    assert_eq!(smallest_irreducible(3, 3), vec![1, 0, 2]);
    // x^2 + 1 has the root 2 mod 5; x^2 + x + 1 has none.
    assert_eq!(smallest_irreducible(5, 2), vec![1, 1]);
    assert!(Field::with_modulus(3, &[2, 0]).is_err()); // x^2 + 2 = (x-1)(x+1)
}

#[test]
fn q_mod_4_rule() {
    for (p, r) in [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (7, 2), (11, 1), (13, 1)] {
        let fl = Field::with_guardrails(p, r, &Guardrails::forced()).unwrap();
        assert_eq!(fl.q_mod_4() == 3, p % 4 == 3 && r % 2 == 1, "p={p} r={r}");
    }
}

#[test]
fn quad_char_examples() {
    assert_eq!(f(3, 1).quad_char(Elem::from(2)), -1);
    assert_eq!(f(7, 1).quad_char(Elem::from(0)), 0);
    // squares mod 11 = {1,3,4,5,9}
    let f11 = f(11, 1);
    let squares: Vec<u32> = (1..11).filter(|&x| f11.quad_char(Elem::from(x)) == 1).collect();
    assert_eq!(squares, vec![1, 3, 4, 5, 9]);
}

#[test]
fn sqrt_examples() {
    assert_eq!(f(7, 1).sqrt_all(Elem::from(2)), &[Elem::from(3), Elem::from(4)]);
    assert_eq!(f(3, 2).sqrt_all(Elem::from(0)), &[Elem::from(0)]);
    assert!(f(3, 1).sqrt_all(Elem::from(2)).is_empty());
}

#[test]
fn norm_examples() {
    let f3 = f(3, 1);
    assert_eq!(f3.norm(&f3.point(&[1, 1]).unwrap()), Elem::from(2));
    assert_eq!(f3.norm(&Point::zero(3)), Elem::from(0));
    let f7 = f(7, 1);
    assert_eq!(f7.norm(&f7.point(&[1, 2]).unwrap()), Elem::from(5));
}

fn supported() -> Vec<Field> {
    [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (7, 2), (11, 1), (13, 1), (19, 1)]
        .iter()
        .map(|&(p, r)| Field::with_guardrails(p, r, &Guardrails::forced()).unwrap())
        .collect()
}

#[test]
fn field_axioms_exhaustive() {
    for fl in supported().into_iter().filter(|fl| fl.q() <= 27) {
        for a in fl.elements() {
            assert_eq!(fl.add(a, fl.neg(a)), Elem::ZERO);
            if let Some(ai) = fl.inv(a) {
                assert_eq!(fl.mul(a, ai), Elem::ONE);
            }
            for b in fl.elements() {
                assert_eq!(fl.mul(a, b), fl.mul(b, a));
                for c in fl.elements() {
                    assert_eq!(
                        fl.mul(a, fl.add(b, c)),
                        fl.add(fl.mul(a, b), fl.mul(a, c))
                    );
                }
            }
        }
    }
}

#[test]
fn character_and_roots_agree() {
    for fl in supported() {
        for x in fl.nonzero() {
            let n = fl.sqrt_all(x).len();
            match fl.quad_char(x) {
                1 => assert_eq!(n, 2),
                -1 => assert_eq!(n, 0),
                _ => unreachable!(),
            }
        }
    }
}

#[test]
fn character_is_multiplicative() {
    for fl in supported().into_iter().filter(|fl| fl.q() <= 27) {
        for x in fl.nonzero() {
            for y in fl.nonzero() {
                assert_eq!(
                    fl.quad_char(fl.mul(x, y)),
                    fl.quad_char(x) * fl.quad_char(y)
                );
            }
        }
    }
}

#[test]
fn minus_one_is_nonsquare_iff_q_3_mod_4() {
    for fl in supported() {
        let m1 = fl.neg(Elem::ONE);
        assert_eq!(fl.quad_char(m1) == -1, fl.q_mod_4() == 3, "q={}", fl.q());
    }
}

#[test]
fn circle_sizes() {
    for q in [3, 7, 11] {
        let fl = f(q, 1);
        let eta = fl.quad_char(fl.neg(Elem::ONE)) as i64;
        for lambda in fl.nonzero() {
            let n = fl.points(2).filter(|x| fl.norm(x) == lambda).count() as i64;
            assert_eq!(n, q as i64 - eta);
        }
    }
}

#[test]
fn prime_subfield_is_constants() {
    let fl = f(3, 3);
    let fixed: Vec<u32> = fl
        .elements()
        .filter(|&x| fl.in_prime_subfield(x))
        .map(Elem::index)
        .collect();
    assert_eq!(fixed, vec![0, 1, 2]);
}

#[test]
fn point_text_round_trip() {
    let fl = f(7, 1);
    let pt = fl.parse_point("[3, 0]").unwrap();
    assert_eq!(pt.to_string(), "[3,0]");
    assert!(fl.parse_point("[7,0]").is_err());
    assert!("3,0".parse::<Point>().is_err());
}

#[test]
fn rank_examples() {
    let fl = f(7, 1);
    let a = fl.point(&[1, 2]).unwrap();
    let b = fl.scale_pt(Elem::from(3), &a);
    assert_eq!(fl.rank(&[a, b]), 1);
    assert_eq!(fl.rank(&[a, fl.point(&[0, 1]).unwrap()]), 2);
    assert_eq!(fl.rank(&[Point::zero(2)]), 0);
}

#[test]
fn prime_power_split() {
    assert_eq!(prime_power(27), Some((3, 3)));
    assert_eq!(prime_power(12), None);
    assert_eq!(prime_power(7), Some((7, 1)));
}
