#![allow(dead_code)]

use std::collections::HashSet;

use hmfimage::heckedata::{parse_newform_file, Dataset};

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

pub fn fixture(name: &str) -> Dataset {
    parse_newform_file(&fixture_text(name)).unwrap()
}

/// Optional fixture under `fixtures/external`, not shipped with the crate.
pub fn external_fixture(name: &str) -> Option<Dataset> {
    let path = format!("{}/fixtures/external/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(path).ok()?;
    Some(parse_newform_file(&text).expect("external fixture parses"))
}

fn isqrt(n: i64) -> i64 {
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Narrow class number of the fundamental discriminant `d`: the number of
/// cycles of reduced forms `(a, b, c)` under `(a, b, c) -> (c, b', a')`.
pub fn narrow_class_number_by_cycles(d: i64) -> u64 {
    let s = isqrt(d);
    let reduced = |a: i64, b: i64| b > 0 && b <= s && 2 * a.abs() > s - b && 2 * a.abs() <= s + b;
    let mut forms = Vec::new();
    for b in 1..=s {
        if (b * b - d) % 4 != 0 {
            continue;
        }
        let ac = (b * b - d) / 4;
        for a in 1..=(s + b) / 2 {
            if ac % a == 0 {
                for a in [a, -a] {
                    if reduced(a, b) {
                        forms.push((a, b, ac / a));
                    }
                }
            }
        }
    }
    let rho = |(_, b, c): (i64, i64, i64)| -> (i64, i64, i64) {
        let m = 2 * c.abs();
        // b' = -b mod 2|c|, in (sqrt d - 2|c|, sqrt d)
        let mut b2 = (-b).rem_euclid(m);
        while b2 + m <= s {
            b2 += m;
        }
        while b2 > s {
            b2 -= m;
        }
        (c, b2, (b2 * b2 - d) / (4 * c))
    };
    let mut seen = HashSet::new();
    let mut cycles = 0;
    for &f in &forms {
        if seen.contains(&f) {
            continue;
        }
        cycles += 1;
        let mut g = f;
        loop {
            seen.insert(g);
            g = rho(g);
            if g == f {
                break;
            }
            assert!(reduced(g.0, g.1), "rho left the reduced set at D={d}: {g:?}");
        }
    }
    cycles
}

/// Least `y <= cap` with `x^2 - m y^2 = +-4` (half basis) or `+-1`, as the
/// element `(x + y sqrt m)/2` in doubled coordinates.
pub fn pell_unit(m: i64, half_basis: bool, cap: u64) -> Option<(u128, u128)> {
    let m = m as u128;
    for y in 1..=cap as u128 {
        for t in [-1i128, 1] {
            let t = if half_basis { 4 * t } else { t };
            let x2 = (m * y * y) as i128 + t;
            if x2 <= 0 {
                continue;
            }
            let x = (x2 as f64).sqrt() as u128;
            for x in x.saturating_sub(1)..=x + 1 {
                if (x * x) as i128 == x2 {
                    return Some(if half_basis { (x, y) } else { (2 * x, 2 * y) });
                }
            }
        }
    }
    None
}
