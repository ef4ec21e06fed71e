//! Soleng's map from primitive points of `y^2 = x^3 + a2 x^2 + a4 x + a6`
//! to ideal classes of the quadratic order of discriminant `4 a6`.
//!
//! A point `(A/C^2, B/C^3)` goes to the ideal `(A, -kB + sqrt(a6))` where
//! `k C^3 = 1 (mod A)`, and from there to the form
//! `(A, -2kB, (k^2 B^2 - a6) / A)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::bqf::{Form, FormClass};
use crate::elliptic::{Curve, Point};
use crate::error::{Error, Result};

/// The ideal `(a, b0 + sqrt(radicand))` of norm `a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticIdeal {
    #[serde(with = "crate::decimal")]
    pub a: BigInt,
    #[serde(with = "crate::decimal")]
    pub b0: BigInt,
    #[serde(with = "crate::decimal")]
    pub radicand: BigInt,
    #[serde(with = "crate::decimal")]
    pub multiplier_k: BigInt,
}

impl QuadraticIdeal {
    /// The unit ideal, image of the point at infinity.
    pub fn unit(radicand: BigInt) -> QuadraticIdeal {
        QuadraticIdeal {
            a: BigInt::one(),
            b0: BigInt::zero(),
            radicand,
            multiplier_k: BigInt::one(),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.a.is_one()
    }
}

impl fmt::Display for QuadraticIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {} + sqrt({}))", self.a, self.b0, self.radicand)
    }
}

/// `k` with `k C^3 = 1 (mod A)`, normalized to `0 < k <= |A|`.
pub fn soleng_multiplier(a: &BigInt, c: &BigInt) -> Result<BigInt> {
    if a.is_zero() {
        return Err(Error::Domain("multiplier modulus A is zero".into()));
    }
    let m = a.abs();
    if m.is_one() {
        return Ok(BigInt::one());
    }
    let c3 = c * c * c;
    arith::mod_inverse(&c3, &m).ok_or_else(|| Error::NotCoprime {
        a: a.clone(),
        c: c.clone(),
    })
}

fn check_radicand(a6: &BigInt) -> Result<()> {
    if a6.is_zero() || arith::is_perfect_square(a6) {
        return Err(Error::Domain(format!(
            "radicand {a6} is zero or a perfect square"
        )));
    }
    Ok(())
}

pub fn point_to_ideal(curve: &Curve, p: &Point) -> Result<QuadraticIdeal> {
    check_radicand(&curve.a6)?;
    if !curve.is_primitive(p)? {
        return Err(Error::NotPrimitive);
    }
    let (a, b, c) = match p {
        Point::Infinity => return Ok(QuadraticIdeal::unit(curve.a6.clone())),
        Point::Affine { a, b, c } => (a, b, c),
    };
    if a.is_zero() {
        return Ok(QuadraticIdeal::unit(curve.a6.clone()));
    }
    let k = soleng_multiplier(a, c)?;
    let b0 = -(&k * b);
    // B^2 = a6 C^6 (mod A) and k C^3 = 1 (mod A)
    if !(&b0 * &b0 - &curve.a6).mod_floor(a).is_zero() {
        return Err(Error::Invariant(format!(
            "{a} does not divide k^2 B^2 - a6 for point {p} on {curve}"
        )));
    }
    Ok(QuadraticIdeal {
        a: a.abs(),
        b0,
        radicand: curve.a6.clone(),
        multiplier_k: k,
    })
}

/// Reduced form of the ideal, at discriminant `4 * radicand`.
pub fn ideal_to_form(ideal: &QuadraticIdeal) -> Result<Form> {
    check_radicand(&ideal.radicand)?;
    if !ideal.a.is_positive() {
        return Err(Error::Domain(format!(
            "ideal norm {} must be positive",
            ideal.a
        )));
    }
    if ideal.radicand.is_positive() {
        return Err(Error::Domain(format!(
            "real radicand {}: only definite forms are reduced",
            ideal.radicand
        )));
    }
    let num = &ideal.b0 * &ideal.b0 - &ideal.radicand;
    if !(&num % &ideal.a).is_zero() {
        return Err(Error::Invariant(format!(
            "{} does not divide {num}",
            ideal.a
        )));
    }
    let c = num / &ideal.a;
    Form::raw(ideal.a.clone(), &ideal.b0 * 2u32, c).reduce()
}

/// The full map: point to reduced form class.
pub fn soleng_class(curve: &Curve, p: &Point) -> Result<FormClass> {
    let form = ideal_to_form(&point_to_ideal(curve, p)?)?;
    let class = FormClass::of(&form)?;
    debug_assert_eq!(class.discriminant, &curve.a6 * 4u32);
    Ok(class)
}
