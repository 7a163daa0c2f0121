//! Rational integer utilities: Kronecker symbol, primality, factorization.
//!
//! Factorization is trial division up to 10^6 followed by Brent's variant of
//! Pollard rho on the cofactor. The rho schedule is fixed (constants 1, 2, 3...)
//! so results are reproducible run to run.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

const TRIAL_BOUND: u64 = 1_000_000;

/// Kronecker symbol `(a|n)`, extended multiplicatively in `n`, with
/// `(a|-1) = sign(a)` and `(a|2)` given by `a mod 8`.
pub fn kronecker(a: &BigInt, n: &BigInt) -> i8 {
    if n.is_zero() {
        return if a.abs().is_one() { 1 } else { 0 };
    }
    let mut result: i8 = 1;
    let mut n = n.clone();
    let mut a = a.clone();
    if n.is_negative() {
        n = -n;
        if a.is_negative() {
            result = -result;
        }
    }
    // strip factors of two from n
    let two = BigInt::from(2);
    let mut twos = 0u32;
    while n.is_even() {
        n /= &two;
        twos += 1;
    }
    if twos > 0 {
        if a.is_even() {
            return 0;
        }
        let a8 = a.mod_floor(&BigInt::from(8)).to_u8().unwrap();
        if twos % 2 == 1 && (a8 == 3 || a8 == 5) {
            result = -result;
        }
    }
    // n is now odd and positive: Jacobi symbol
    a = a.mod_floor(&n);
    while !a.is_zero() {
        while a.is_even() {
            a /= &two;
            let n8 = n.mod_floor(&BigInt::from(8)).to_u8().unwrap();
            if n8 == 3 || n8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        let a4 = a.mod_floor(&BigInt::from(4)).to_u8().unwrap();
        let n4 = n.mod_floor(&BigInt::from(4)).to_u8().unwrap();
        if a4 == 3 && n4 == 3 {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

pub fn kronecker_i64(a: i64, n: i64) -> i8 {
    kronecker(&BigInt::from(a), &BigInt::from(n))
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let g = BigInt::from(a).extended_gcd(&BigInt::from(m));
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(&BigInt::from(m)).to_u64().unwrap())
}

const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller-Rabin with the first thirteen primes as bases. Deterministic below
/// 3.3 * 10^24; a strong probable-prime test beyond that.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    for &p in MR_BASES.iter() {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    'bases: for &b in MR_BASES.iter() {
        let mut x = BigUint::from(b).modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in MR_BASES.iter() {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &b in MR_BASES.iter() {
        let mut x = pow_mod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Prime factorization of `n > 0` as sorted `(prime, exponent)` pairs.
/// `factor(1)` is empty.
pub fn factor(n: &BigUint) -> Vec<(BigUint, u32)> {
    assert!(!n.is_zero(), "factor(0) is undefined");
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let mut rest = n.clone();
    let push = |p: BigUint, out: &mut Vec<(BigUint, u32)>| match out.iter_mut().find(|(q, _)| *q == p) {
        Some(entry) => entry.1 += 1,
        None => out.push((p, 1)),
    };

    let mut p = 2u64;
    while p <= TRIAL_BOUND {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        while (&rest % p).is_zero() {
            rest /= p;
            push(pb.clone(), &mut out);
        }
        p += if p == 2 { 1 } else { 2 };
    }

    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            push(m, &mut out);
            continue;
        }
        if let Some(r) = perfect_square_root(&m) {
            stack.push(r.clone());
            stack.push(r);
            continue;
        }
        let d = pollard_brent(&m);
        stack.push(&m / &d);
        stack.push(d);
    }
    out.sort();
    out
}

pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    factor(&BigUint::from(n)).into_iter().map(|(p, e)| (p.to_u64().unwrap(), e)).collect()
}

/// Distinct prime divisors of `|n|`, for `n != 0`.
pub fn prime_divisors(n: &BigInt) -> Vec<BigUint> {
    let mag = n.magnitude();
    factor(mag).into_iter().map(|(p, _)| p).collect()
}

fn perfect_square_root(n: &BigUint) -> Option<BigUint> {
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// A nontrivial divisor of the composite `n`.
fn pollard_brent(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u32);
    }
    let one = BigUint::one();
    for c in 1u32.. {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r: u64 = 1;
        let mut q = one.clone();
        let mut g = one.clone();
        let mut x = y.clone();
        let mut ys = y.clone();
        let m = 128u64;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0u64;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if g == *n {
            // backtrack one step at a time
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if g != *n {
            return g;
        }
    }
    unreachable!()
}

/// All primes `p <= bound` by sieve.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
}

pub fn is_squarefree(n: u64) -> bool {
    n != 0 && factor_u64(n).iter().all(|&(_, e)| e == 1)
}

/// Fundamental discriminant of `Q(sqrt(m))` for square-free `m`.
pub fn fundamental_discriminant(m: i64) -> i64 {
    if m.rem_euclid(4) == 1 {
        m
    } else {
        4 * m
    }
}

/// Whether `d` is a fundamental discriminant (of a quadratic field, d != 1).
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// Square-free kernel `m` of a fundamental discriminant `d`.
pub fn squarefree_part_of_disc(d: i64) -> i64 {
    if d.rem_euclid(4) == 1 {
        d
    } else {
        d / 4
    }
}

pub(crate) fn sign_of(x: &BigInt) -> i8 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euler_legendre(a: i64, p: i64) -> i8 {
        let r = pow_mod(a.rem_euclid(p) as u64, ((p - 1) / 2) as u64, p as u64);
        match r {
            0 => 0,
            1 => 1,
            _ => -1,
        }
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker_i64(5, 11), 1);
        assert_eq!(kronecker_i64(13, 7), -1);
        for a in -20..20 {
            assert_eq!(kronecker_i64(a, 1), 1);
        }
        assert_eq!(kronecker_i64(5, 2), -1);
        assert_eq!(kronecker_i64(1, 2), 1);
        assert_eq!(kronecker_i64(-3, -1), -1);
    }

    #[test]
    fn reciprocity_against_euler_criterion() {
        let primes: Vec<i64> = primes_up_to(100).into_iter().map(|p| p as i64).filter(|&p| p > 2).collect();
        for &p in &primes {
            for &q in &primes {
                if p == q {
                    continue;
                }
                assert_eq!(kronecker_i64(p, q), euler_legendre(p, q), "({p}|{q})");
                let sign = if p % 4 == 3 && q % 4 == 3 { -1 } else { 1 };
                assert_eq!(kronecker_i64(p, q) * kronecker_i64(q, p), sign);
            }
        }
    }

    #[test]
    fn kronecker_is_multiplicative_in_n() {
        for a in [-7i64, -3, 5, 8, 12, 13, 24] {
            for n1 in 1..30i64 {
                for n2 in 1..30i64 {
                    assert_eq!(kronecker_i64(a, n1 * n2), kronecker_i64(a, n1) * kronecker_i64(a, n2));
                }
            }
        }
    }

    #[test]
    fn factor_small_and_large() {
        assert!(factor(&BigUint::one()).is_empty());
        assert_eq!(factor_u64(120), vec![(2, 3), (3, 1), (5, 1)]);
        // product of two primes above the trial bound
        let p = 1_000_003u64;
        let q = 10_783_342_081u64;
        let n = BigUint::from(p) * BigUint::from(q) * BigUint::from(q);
        let f = factor(&n);
        assert_eq!(f, vec![(BigUint::from(p), 1), (BigUint::from(q), 2)]);
    }

    #[test]
    fn primality() {
        let primes = primes_up_to(2000);
        for n in 0..2000u64 {
            assert_eq!(is_prime_u64(n), primes.binary_search(&n).is_ok(), "{n}");
        }
        assert!(is_prime(&BigUint::from(13_373_763_765_986_881u64)));
        assert!(!is_prime(&(BigUint::from(13_373_763_765_986_881u64) * 3u32)));
    }

    #[test]
    fn discriminants() {
        assert_eq!(fundamental_discriminant(5), 5);
        assert_eq!(fundamental_discriminant(6), 24);
        assert!(is_fundamental_discriminant(24));
        assert!(is_fundamental_discriminant(13));
        assert!(!is_fundamental_discriminant(20));
        assert!(!is_fundamental_discriminant(9));
    }
}
