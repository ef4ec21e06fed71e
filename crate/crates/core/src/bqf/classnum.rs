use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{check_discriminant, Form};
use crate::arith;
use crate::error::{Error, Result};

/// Fundamental discriminants: `D = 1 (mod 4)` squarefree, or `D = 4m` with
/// `m = 2, 3 (mod 4)` squarefree. Excludes 0 and 1.
pub fn is_fundamental_discriminant(d: &BigInt) -> Result<bool> {
    if d.is_zero() || d.is_one() {
        return Ok(false);
    }
    let r = d.mod_floor(&BigInt::from(4)).to_u32().unwrap();
    match r {
        1 => arith::is_squarefree(d),
        0 => {
            let m: BigInt = d / 4u32;
            let rm = m.mod_floor(&BigInt::from(4)).to_u32().unwrap();
            if rm == 2 || rm == 3 {
                arith::is_squarefree(&m)
            } else {
                Ok(false)
            }
        }
        _ => Ok(false),
    }
}

fn gcd3(a: u64, b: u64, c: u64) -> u64 {
    a.gcd(&b).gcd(&c)
}

/// `|D|` as a machine integer, small enough that `b^2 + |D|` fits in u64.
fn magnitude(d: &BigInt) -> Result<u64> {
    d.abs()
        .to_u64()
        .filter(|&m| m < 1 << 62)
        .ok_or_else(|| Error::TooLarge(d.clone()))
}

/// Calls `visit(a, b, c)` for every reduced primitive definite form with
/// `b >= 0`; the caller accounts for `(a, -b, c)`.
fn for_each_reduced_imag(d: &BigInt, mut visit: impl FnMut(u64, u64, u64)) -> Result<()> {
    if !d.is_negative() {
        return Err(Error::InvalidDiscriminant(d.clone()));
    }
    check_discriminant(d)?;
    let n = magnitude(d)?;
    let b_max = (n / 3).isqrt();
    let mut b = n % 2;
    while b <= b_max {
        // a c = (b^2 + |D|) / 4, b <= a <= c
        let ac = (b * b + n) / 4;
        for a in arith::divisors_u64(ac)? {
            let c = ac / a;
            if a < b.max(1) || a > c {
                continue;
            }
            if gcd3(a, b, c) == 1 {
                visit(a, b, c);
            }
        }
        b += 2;
    }
    Ok(())
}

/// Whether `(a, -b, c)` is a distinct reduced form.
fn has_negative_twin(a: u64, b: u64, c: u64) -> bool {
    b != 0 && b != a && a != c
}

/// All reduced primitive forms of discriminant `D < 0`, sorted.
pub fn reduced_forms_imag(d: &BigInt) -> Result<Vec<Form>> {
    let mut out = Vec::new();
    for_each_reduced_imag(d, |a, b, c| {
        let form = |b: i64| Form::raw(a.into(), b.into(), c.into());
        if has_negative_twin(a, b, c) {
            out.push(form(-(b as i64)));
        }
        out.push(form(b as i64));
    })?;
    out.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
    Ok(out)
}

/// Number of reduced primitive forms of discriminant `D < 0`.
pub fn class_number_imag(d: &BigInt) -> Result<u64> {
    let mut h = 0u64;
    for_each_reduced_imag(d, |a, b, c| {
        h += if has_negative_twin(a, b, c) { 2 } else { 1 };
    })?;
    Ok(h)
}

/// Reduced indefinite forms: `|sqrt(D) - 2|a|| < b < sqrt(D)`.
fn reduced_forms_real(n: u64) -> Result<Vec<(i64, i64, i64)>> {
    let r = n.isqrt();
    let mut out = Vec::new();
    let mut b = if n % 2 == r % 2 { r } else { r - 1 };
    while b >= 1 {
        let ac = (n - b * b) / 4;
        for a in arith::divisors_u64(ac)? {
            // sqrt(D) - b < 2a < sqrt(D) + b, with sqrt(D) irrational
            if 2 * a <= r - b || 2 * a > r + b {
                continue;
            }
            let c = ac / a;
            if gcd3(a, b, c) != 1 {
                continue;
            }
            let (a, b, c) = (a as i64, b as i64, c as i64);
            out.push((a, b, -c));
            out.push((-a, b, c));
        }
        if b < 2 {
            break;
        }
        b -= 2;
    }
    Ok(out)
}

/// Forms, their cycle ids and the number of cycles.
type Cycles = (Vec<(i64, i64, i64)>, HashMap<(i64, i64, i64), usize>, usize);

/// Partition of reduced indefinite forms into cycles under the reduction
/// operator. Returns the cycle id of every form.
fn cycles(n: u64) -> Result<Cycles> {
    let forms = reduced_forms_real(n)?;
    let r = n.isqrt() as i64;
    let mut id: HashMap<(i64, i64, i64), usize> = HashMap::with_capacity(forms.len());
    let mut count = 0;
    for &start in &forms {
        if id.contains_key(&start) {
            continue;
        }
        let mut cur = start;
        loop {
            id.insert(cur, count);
            let (_, b, c) = cur;
            let m = 2 * c.abs();
            let b2 = r - (r + b).rem_euclid(m);
            let c2 = (b2 as i128 * b2 as i128 - n as i128) / (4 * c as i128);
            cur = (c, b2, c2 as i64);
            if cur == start {
                break;
            }
            if id.contains_key(&cur) {
                return Err(Error::Invariant(format!(
                    "cycle walk from {start:?} re-entered at {cur:?}"
                )));
            }
        }
        count += 1;
    }
    Ok((forms, id, count))
}

fn check_real(d: &BigInt) -> Result<u64> {
    if !d.is_positive() || !is_fundamental_discriminant(d)? {
        return Err(Error::Domain(format!(
            "{d} is not a positive fundamental discriminant"
        )));
    }
    let n = magnitude(d)?;
    Ok(n)
}

/// Narrow class number: the number of cycles of reduced forms.
pub fn narrow_class_number_real(d: &BigInt) -> Result<u64> {
    let n = check_real(d)?;
    Ok(cycles(n)?.2 as u64)
}

/// Class number of a real quadratic field: cycles identified under
/// `(a, b, c) -> (-a, b, -c)`.
pub fn class_number_real(d: &BigInt) -> Result<u64> {
    let n = check_real(d)?;
    let (forms, id, count) = cycles(n)?;
    let mut partner = vec![usize::MAX; count];
    for (a, b, c) in forms {
        partner[id[&(a, b, c)]] = id[&(-a, b, -c)];
    }
    let fixed = partner.iter().enumerate().filter(|&(i, &j)| i == j).count();
    Ok((fixed + (count - fixed) / 2) as u64)
}
