//! Fundamental units, unit orders modulo ideals and ray class group orders.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{class_numbers, QFElem, QFIdeal, QuadField, ResidueRing};
use crate::arith;

/// The fundamental unit `eps > 1`, from the continued fraction of `omega`.
pub fn fundamental_unit(field: &QuadField) -> QFElem {
    let d = BigInt::from(field.discriminant());
    let s = d.sqrt();
    let (tau, _) = field.omega_relation();
    let tau = BigInt::from(tau);
    // omega = (P + sqrt(D)) / Q
    let mut p = tau.clone();
    let mut q = BigInt::from(2);
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    loop {
        debug_assert!(q.is_positive());
        let a = (&p + &s).div_floor(&q);
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        // h1 - k1*omega has norm +-1 exactly when its conjugate is a unit
        let cand = field.from_omega_coords(&h1 - &k1 * &tau, k1.clone());
        if cand.norm().abs().is_one() {
            return cand;
        }
        p = &a * &q - &p;
        q = (&d - &p * &p) / &q;
    }
}

/// Multiplicative order of `u` in `(O/M)^x`; `u` must be coprime to `M`.
pub fn unit_order_mod(u: &QFElem, modulus: &QFIdeal) -> BigUint {
    let ring = ResidueRing::new(modulus);
    if modulus.is_unit_ideal() {
        return BigUint::one();
    }
    let mut order = ring.unit_group_order();
    for (q, _) in arith::factor(&order.clone()) {
        while (&order % &q).is_zero() {
            let trial = &order / &q;
            if ring.is_one(&ring.pow(u, trial.clone())) {
                order = trial;
            } else {
                break;
            }
        }
    }
    debug_assert!(ring.is_one(&ring.pow(u, order.clone())));
    order
}

/// Order of the image of `<-1, eps>` in `(O/M)^x`, times the sign group
/// `{+-1}^2` when `narrow` is set.
pub fn units_image_order(field: &QuadField, modulus: &QFIdeal, narrow: bool) -> BigUint {
    let eps = fundamental_unit(field);
    let ring = ResidueRing::new(modulus);
    let ord_eps = unit_order_mod(&eps, modulus);
    if narrow {
        // eps has signs (+, sgn Nm eps); -1 has (-, -), never a power of eps
        let sign_order = if eps.norm().is_negative() { 2u32 } else { 1 };
        return ord_eps.lcm(&BigUint::from(sign_order)) * 2u32;
    }
    let minus_one = -&field.one();
    let mo = ring.reduce(&minus_one);
    if ring.is_one(&mo) {
        return ord_eps;
    }
    if ord_eps.is_even() {
        let half = ring.pow(&eps, &ord_eps / 2u32);
        if half == mo {
            return ord_eps;
        }
    }
    ord_eps * 2u32
}

/// Order of the ray class group of modulus `M` (with both infinite places when
/// `narrow`).
pub fn ray_class_order(field: &QuadField, modulus: &QFIdeal, narrow: bool) -> BigUint {
    let (h, _) = class_numbers(field);
    let phi = ResidueRing::new(modulus).unit_group_order();
    let signs = if narrow { 4u32 } else { 1 };
    let total = BigUint::from(h) * phi * signs;
    let image = units_image_order(field, modulus, narrow);
    debug_assert!((&total % &image).is_zero());
    total / image
}

/// An associate `u*alpha` (`u = +-eps^k`) congruent to 1 modulo `M`, and
/// totally positive when `narrow`; `None` if no unit achieves this.
pub fn ray_trivial_generator(alpha: &QFElem, modulus: &QFIdeal, narrow: bool) -> Option<QFElem> {
    let field = alpha.field();
    let eps = fundamental_unit(&field);
    let ring = ResidueRing::new(modulus);
    let ord: u64 = num_traits::ToPrimitive::to_u64(&unit_order_mod(&eps, modulus))?;
    // the sign pattern of eps^k repeats with period 2
    let span = 2 * ord.max(1);
    let mut cur = alpha.clone();
    for _ in 0..span {
        for cand in [cur.clone(), -&cur] {
            if ring.is_one(&ring.reduce(&cand)) && (!narrow || cand.is_totally_positive()) {
                return Some(cand);
            }
        }
        cur = &cur * &eps;
    }
    None
}

/// Whether `beta` is a square in `O/4`.
pub fn mod4_square_solvable(beta: &QFElem, field: &QuadField) -> bool {
    let four = QFIdeal::from_integer(*field, 4).expect("(4) is an ideal");
    let ring = ResidueRing::new(&four);
    let target = ring.reduce(beta);
    (0..4).any(|u| {
        (0..4).any(|v| {
            let x = field.from_omega_coords(BigInt::from(u), BigInt::from(v));
            ring.reduce(&(&x * &x)) == target
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Roots;

    fn q5() -> QuadField {
        QuadField::new(5).unwrap()
    }

    /// Minimal unit from a direct Pell search over `y`, for `y <= cap`.
    fn pell_search(field: &QuadField, cap: u64) -> Option<QFElem> {
        let m = field.radicand() as u128;
        for y in 1..=cap as u128 {
            // half basis: (x + y sqrt m)/2 with x^2 - m y^2 = +-4
            let targets: &[i128] = if field.half_basis() { &[-4, 4] } else { &[-1, 1] };
            for &t in targets {
                let x2 = (m * y * y) as i128 + t;
                if x2 <= 0 {
                    continue;
                }
                let x = (x2 as u128).sqrt();
                if (x * x) as i128 == x2 {
                    let e = if field.half_basis() {
                        field.elem(x as i64, y as i64)
                    } else {
                        field.elem(2 * x as i64, 2 * y as i64)
                    };
                    if let Ok(e) = e {
                        return Some(e);
                    }
                }
            }
        }
        None
    }

    #[test]
    fn unit_examples() {
        assert_eq!(fundamental_unit(&q5()), q5().elem(1, 1).unwrap());
        let q2 = QuadField::new(2).unwrap();
        assert_eq!(fundamental_unit(&q2), q2.from_ints(1, 1));
        let q6 = QuadField::new(6).unwrap();
        assert_eq!(fundamental_unit(&q6), q6.from_ints(5, 2));
        let q257 = QuadField::new(257).unwrap();
        let e = fundamental_unit(&q257);
        assert_eq!(e.norm(), BigInt::from(-1));
        assert_eq!(Some(e), pell_search(&q257, 100_000));
    }

    #[test]
    fn units_match_pell_search() {
        const CAP: u64 = 2_000_000;
        for m in 2i64..200 {
            let Ok(f) = QuadField::new(m) else { continue };
            let e = fundamental_unit(&f);
            assert!(e.is_unit() && e.to_f64() > 1.0, "m={m}");
            let (_, y) = e.coords();
            let y_search = if f.half_basis() { y.clone() } else { y / 2 };
            if y_search <= BigInt::from(CAP) {
                assert_eq!(pell_search(&f, CAP), Some(e), "m={m}");
            } else {
                // beyond the search cap: no smaller unit below it, and eps is
                // not a proper power of any unit
                assert!(pell_search(&f, 20_000).is_none(), "m={m}");
                for k in 2..6u32 {
                    let ln = e.to_f64().ln() / k as f64;
                    let approx = ln.exp();
                    // a k-th root would be a unit of this size with integral
                    // trace close to approx +- 1/approx
                    for tr in [approx + 1.0 / approx, approx - 1.0 / approx] {
                        let t = tr.round() as i64;
                        if (tr - t as f64).abs() < 1e-6 {
                            panic!("m={m}: eps may be a {k}-th power");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn unit_orders() {
        let f = q5();
        let eps = fundamental_unit(&f);
        let thirty = QFIdeal::from_integer(f, 30).unwrap();
        assert_eq!(unit_order_mod(&eps, &thirty), BigUint::from(120u32));
        let sqrt5 = QFIdeal::principal(&f.sqrt_m()).unwrap();
        assert_eq!(unit_order_mod(&eps, &sqrt5), BigUint::from(4u32));
        assert_eq!(unit_order_mod(&eps, &QFIdeal::unit(f)), BigUint::one());
    }

    #[test]
    fn unit_order_is_exact() {
        let f = q5();
        let eps = fundamental_unit(&f);
        for n in 2..60 {
            let m = QFIdeal::from_integer(f, n).unwrap();
            let ring = ResidueRing::new(&m);
            let ord = unit_order_mod(&eps, &m);
            assert!((ring.unit_group_order() % &ord).is_zero());
            let mut k = BigUint::one();
            // brute-force order
            let mut x = ring.reduce(&eps);
            while !ring.is_one(&x) {
                x = ring.mul(&x, &ring.reduce(&eps));
                k += 1u32;
            }
            assert_eq!(k, ord, "n={n}");
        }
    }

    #[test]
    fn ray_class_examples() {
        let f = q5();
        let sqrt5 = QFIdeal::principal(&f.sqrt_m()).unwrap();
        assert_eq!(ray_class_order(&f, &sqrt5, true), BigUint::from(2u32));
        assert_eq!(ray_class_order(&f, &QFIdeal::unit(f), true), BigUint::one());
        let f257 = QuadField::new(257).unwrap();
        assert_eq!(ray_class_order(&f257, &QFIdeal::unit(f257), false), BigUint::from(3u32));
        for m in [2i64, 3, 5, 6, 7, 10, 13, 15, 79, 257] {
            let f = QuadField::new(m).unwrap();
            let (h, hp) = class_numbers(&f);
            let one = QFIdeal::unit(f);
            assert_eq!(ray_class_order(&f, &one, false), BigUint::from(h));
            assert_eq!(ray_class_order(&f, &one, true), BigUint::from(hp));
        }
    }

    #[test]
    fn ray_trivial_generators() {
        let f = q5();
        let sqrt5 = QFIdeal::principal(&f.sqrt_m()).unwrap();
        let g = ray_trivial_generator(&f.from_ints(-4, 1), &sqrt5, true).unwrap();
        let eps = fundamental_unit(&f);
        assert_eq!(g, -&(&f.from_ints(-4, 1) * &eps.pow(2)));
        assert!(g.is_totally_positive());
        let g = ray_trivial_generator(&f.from_ints(6, 1), &sqrt5, true).unwrap();
        assert_eq!(g, f.from_ints(6, 1));
    }

    #[test]
    fn mod4_squares() {
        let f = q5();
        let eps = fundamental_unit(&f);
        let beta = -&(&eps * &f.sqrt_m());
        assert_eq!(beta, -&(&eps + &f.int(2)));
        assert!(mod4_square_solvable(&beta, &f));
        assert!(mod4_square_solvable(&f.one(), &f));
        let f257 = QuadField::new(257).unwrap();
        assert!(!mod4_square_solvable(&-&f257.one(), &f257));
    }
}
