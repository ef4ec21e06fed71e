use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use super::{principal_form, Form};
use crate::arith;
use crate::error::{Error, Result};

/// Sequential composition is used up to this exponent, then baby-step giant-step.
const SEQUENTIAL_LIMIT: u64 = 4096;

/// Least `e >= 1` with `f^e` principal.
pub fn class_order(f: &Form) -> Result<u64> {
    if !f.is_definite() || !f.a.is_positive() {
        return Err(Error::Domain(format!(
            "class_order needs a positive definite form, got {f}"
        )));
    }
    let g = f.reduce()?;
    let mut cur = g.clone();
    for e in 1..=SEQUENTIAL_LIMIT {
        if cur.a.is_one() {
            return Ok(e);
        }
        cur = cur.compose(&g)?;
    }
    class_order_bsgs(&g)
}

/// Baby-step giant-step order computation with a doubling search bound.
pub fn class_order_bsgs(f: &Form) -> Result<u64> {
    let g = f.reduce()?;
    let identity = principal_form(&g.discriminant())?;
    if g == identity {
        return Ok(1);
    }
    let mut bound: u64 = 1024;
    loop {
        let m = (bound as f64).sqrt().ceil() as u64;
        let mut baby = HashMap::with_capacity(m as usize);
        let mut cur = identity.clone();
        for j in 0..m {
            baby.entry(cur.clone()).or_insert(j);
            cur = cur.compose(&g)?;
        }
        // cur = g^m; giant steps g^(i m) against baby steps g^j: g^(i m - j) = 1
        let giant = cur;
        let mut acc = giant.clone();
        for i in 1..=m {
            if let Some(&j) = baby.get(&acc) {
                let multiple = i * m - j;
                return reduce_multiple(&g, multiple);
            }
            acc = acc.compose(&giant)?;
        }
        bound = bound
            .checked_mul(4)
            .ok_or_else(|| Error::TooLarge(g.discriminant()))?;
    }
}

/// Given `g^multiple = 1`, strip prime factors while the identity persists.
fn reduce_multiple(g: &Form, multiple: u64) -> Result<u64> {
    let mut order = multiple;
    for (p, _) in arith::factor(&BigInt::from(multiple), arith::DEFAULT_TRIAL_BOUND)? {
        let p = p.to_u64().expect("factor of a u64");
        while order.is_multiple_of(p) && g.pow(&BigInt::from(order / p))?.a.is_one() {
            order /= p;
        }
    }
    Ok(order)
}
