use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// Fundamental unit of the real quadratic order attached to `m`.
///
/// With `half = false` the unit is `x + y sqrt(m)` and `x^2 - m y^2 = norm`.
/// With `half = true` it is `(x + y sqrt(m)) / 2`, `x, y` odd, and
/// `x^2 - m y^2 = 4 norm`. Half units only occur for `m = 5 (mod 8)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PellSolution {
    #[serde(with = "crate::decimal")]
    pub x: BigInt,
    #[serde(with = "crate::decimal")]
    pub y: BigInt,
    pub norm: i32,
    pub half: bool,
}

impl PellSolution {
    pub fn satisfies(&self, m: &BigInt) -> bool {
        let lhs = &self.x * &self.x - m * &self.y * &self.y;
        let scale = if self.half { 4 } else { 1 };
        lhs == BigInt::from(self.norm * scale)
    }

    /// Natural log of the unit (its regulator), in floating point.
    pub fn ln(&self, m: &BigInt) -> f64 {
        // x + y sqrt(m) ~ 2x for large units; use exact-ish scaling via bit lengths
        let shift = self.x.bits().saturating_sub(60);
        let xs = (&self.x >> shift).to_f64().unwrap_or(f64::MAX);
        let ys = (&self.y >> shift).to_f64().unwrap_or(f64::MAX);
        let mf = m.to_f64().unwrap_or(f64::MAX);
        let value = xs + ys * mf.sqrt();
        let mut ln = value.ln() + shift as f64 * std::f64::consts::LN_2;
        if self.half {
            ln -= std::f64::consts::LN_2;
        }
        ln
    }
}

/// Smallest solution of `x^2 - m y^2 = +-1` from the continued fraction of
/// `sqrt(m)`.
fn integral_unit(m: &BigInt) -> (BigInt, BigInt, i32) {
    let a0 = arith::isqrt(m);
    let (mut p_prev, mut p) = (BigInt::one(), a0.clone());
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    let (mut pk, mut qk, mut ak) = (BigInt::zero(), BigInt::one(), a0.clone());
    let mut sign = -1;
    loop {
        pk = &ak * &qk - &pk;
        qk = (m - &pk * &pk) / &qk;
        if qk.is_one() {
            return (p, q, sign);
        }
        ak = (&a0 + &pk) / &qk;
        let p_next = &ak * &p + &p_prev;
        let q_next = &ak * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        sign = -sign;
    }
}

/// Returns `(u, v)` with `((u + v sqrt(m)) / 2)^3 = x + y sqrt(m)`, if any.
fn half_cube_root(m: &BigInt, x: &BigInt, y: &BigInt, norm: i32) -> Option<(BigInt, BigInt)> {
    // u = trace of the cube root satisfies u^3 - 3 N u - 2x = 0.
    let target: BigInt = x * 2u32;
    let guess = target.nth_root(3);
    for du in -1i32..=1 {
        let u = &guess + du;
        if !u.is_positive() || u.is_even() {
            continue;
        }
        if &u * &u * &u - &u * 3 * norm != target {
            continue;
        }
        let v2 = (&u * &u - BigInt::from(4 * norm)) / m;
        if !arith::is_perfect_square(&v2) {
            continue;
        }
        let v = arith::isqrt(&v2);
        if v.is_even() {
            continue;
        }
        // (u + v sqrt m)^3 = u^3 + 3 u v^2 m + (3 u^2 v + v^3 m) sqrt m
        let rational = &u * &u * &u + &u * &v * &v * m * 3u32;
        let irrational = &u * &u * &v * 3u32 + &v * &v * &v * m;
        if rational == x * 8u32 && irrational == y * 8u32 {
            return Some((u, v));
        }
    }
    None
}

/// Fundamental unit for `m > 1` non-square. For `m = 1 (mod 4)` the unit is
/// that of `Z[(1 + sqrt m)/2]`, possibly a half unit.
pub fn fundamental_unit(m: &BigInt) -> Result<PellSolution> {
    if m <= &BigInt::one() {
        return Err(Error::Domain(format!(
            "fundamental_unit needs m > 1, got {m}"
        )));
    }
    if arith::is_perfect_square(m) {
        return Err(Error::Domain(format!("{m} is a perfect square")));
    }
    let (x, y, norm) = integral_unit(m);
    if m.mod_floor(&BigInt::from(8)) == BigInt::from(5) {
        if let Some((u, v)) = half_cube_root(m, &x, &y, norm) {
            return Ok(PellSolution {
                x: u,
                y: v,
                norm,
                half: true,
            });
        }
    }
    Ok(PellSolution {
        x,
        y,
        norm,
        half: false,
    })
}
