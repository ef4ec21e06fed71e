//! Imaginary biquadratic fields `Q(sqrt m1, sqrt m2)` through their three
//! quadratic subfields.
//!
//! The class number is assembled from Kuroda's formula
//! `h = q h1 h2 h3 / 2`, where `q = [E : E1 E2 E3]` is 1 or 2. The odd part is
//! always exact; `q` is settled by an exact squareness test on the
//! fundamental unit of the real subfield.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::bqf::{self, Form, FormClass, PellSolution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadField {
    #[serde(with = "crate::decimal")]
    pub m: BigInt,
    #[serde(with = "crate::decimal")]
    pub fundamental_discriminant: BigInt,
}

impl QuadField {
    pub fn new(m: &BigInt) -> Result<QuadField> {
        Ok(QuadField {
            m: m.clone(),
            fundamental_discriminant: fundamental_discriminant(m)?,
        })
    }

    /// Class number of the field, by form enumeration or cycles.
    pub fn class_number(&self) -> Result<u64> {
        if self.m.is_negative() {
            bqf::class_number_imag(&self.fundamental_discriminant)
        } else {
            bqf::class_number_real(&self.fundamental_discriminant)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiquadField {
    #[serde(with = "crate::decimal")]
    pub m1: BigInt,
    #[serde(with = "crate::decimal")]
    pub m2: BigInt,
    #[serde(with = "crate::decimal")]
    pub m3: BigInt,
}

impl fmt::Display for BiquadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt {}, sqrt {})", self.m1, self.m2)
    }
}

impl BiquadField {
    pub fn radicands(&self) -> [&BigInt; 3] {
        [&self.m1, &self.m2, &self.m3]
    }

    pub fn is_imaginary(&self) -> bool {
        self.radicands().iter().filter(|m| m.is_negative()).count() == 2
    }

    /// The two imaginary radicands and the real one.
    fn split(&self) -> Result<([BigInt; 2], BigInt)> {
        if !self.is_imaginary() {
            return Err(Error::Domain(format!(
                "{self} is not imaginary biquadratic"
            )));
        }
        let mut neg = self
            .radicands()
            .into_iter()
            .filter(|m| m.is_negative())
            .cloned();
        let pos = self
            .radicands()
            .into_iter()
            .find(|m| m.is_positive())
            .cloned()
            .unwrap();
        Ok(([neg.next().unwrap(), neg.next().unwrap()], pos))
    }
}

fn check_radicand(m: &BigInt) -> Result<()> {
    if m.is_zero() || m.is_one() {
        return Err(Error::Domain(format!(
            "radicand {m} does not define a quadratic field"
        )));
    }
    if !arith::is_squarefree(m)? {
        return Err(Error::Domain(format!("radicand {m} is not squarefree")));
    }
    Ok(())
}

/// `m` for `m = 1 (mod 4)`, else `4m`.
pub fn fundamental_discriminant(m: &BigInt) -> Result<BigInt> {
    check_radicand(m)?;
    if m.mod_floor(&BigInt::from(4)).is_one() {
        Ok(m.clone())
    } else {
        Ok(m * 4u32)
    }
}

pub fn subfield_triple(m1: &BigInt, m2: &BigInt) -> Result<BiquadField> {
    check_radicand(m1)?;
    check_radicand(m2)?;
    if m1 == m2 {
        return Err(Error::DegenerateInput(format!(
            "equal radicands {m1}: not biquadratic"
        )));
    }
    let m3 = arith::squarefree_part(&(m1 * m2))?;
    Ok(BiquadField {
        m1: m1.clone(),
        m2: m2.clone(),
        m3,
    })
}

/// Image of a definite class at discriminant `f^2 D0`, `f` in `{1, 2}`, in the
/// class group of the fundamental discriminant `D0`.
pub fn to_fundamental_class(f: &Form) -> Result<FormClass> {
    let d = f.discriminant();
    let d0 = fundamental_discriminant(&arith::squarefree_part(&d)?)?;
    let ratio: BigInt = &d / &d0;
    if !(&d % &d0).is_zero() || !arith::is_perfect_square(&ratio) {
        return Err(Error::Invariant(format!(
            "{d} is not a square multiple of {d0}"
        )));
    }
    let conductor = arith::isqrt(&ratio);
    if conductor.is_one() {
        return FormClass::of(f);
    }
    if conductor != BigInt::from(2) {
        return Err(Error::UnsupportedConductor(conductor));
    }
    // move to a representative with odd leading coefficient, prime to the conductor
    let g = f.reduce()?;
    let (a, b) = if g.a.is_odd() {
        (g.a.clone(), g.b.clone())
    } else {
        (g.c.clone(), -&g.b)
    };
    // ideal [a, -b/2 + sqrt(D0)] of the maximal order; pick B = b/2 (mod a), B = D0 (mod 2)
    let half: BigInt = &b / 2u32;
    let bb = if half.is_odd() == d0.is_odd() {
        half
    } else {
        half + &a
    };
    let num = &bb * &bb - &d0;
    let den = &a * 4u32;
    if !(&num % &den).is_zero() {
        return Err(Error::Invariant(format!(
            "conductor-2 image of {f} is not integral"
        )));
    }
    FormClass::of(&Form::raw(a, bb, num / den))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitIndex {
    One,
    Two,
    Undetermined,
}

impl UnitIndex {
    fn value(self) -> Option<u64> {
        match self {
            UnitIndex::One => Some(1),
            UnitIndex::Two => Some(2),
            UnitIndex::Undetermined => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KurodaResult {
    pub h1: u64,
    pub h2: u64,
    pub h3: u64,
    pub unit_index_q: UnitIndex,
    pub h_candidates: Vec<u64>,
    pub odd_part: u64,
}

impl KurodaResult {
    /// The class number when it is pinned down.
    pub fn class_number(&self) -> Option<u64> {
        match self.h_candidates.as_slice() {
            [h] => Some(*h),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    #[serde(rename = "INDETERMINATE_2PART")]
    Indeterminate2Part,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Indeterminate2Part => "INDETERMINATE_2PART",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KurodaOptions {
    /// Decide the unit index from the fundamental unit of the real subfield.
    pub unit_index_test: bool,
}

impl Default for KurodaOptions {
    fn default() -> Self {
        KurodaOptions {
            unit_index_test: true,
        }
    }
}

pub fn kuroda_class_number(field: &BiquadField) -> Result<KurodaResult> {
    kuroda_class_number_with(field, KurodaOptions::default())
}

pub fn kuroda_class_number_with(field: &BiquadField, opts: KurodaOptions) -> Result<KurodaResult> {
    let ([n1, n2], real) = field.split()?;
    let h1 = QuadField::new(&n1)?.class_number()?;
    let h2 = QuadField::new(&n2)?.class_number()?;
    let h3 = QuadField::new(&real)?.class_number()?;
    let product = h1 * h2 * h3;

    let mut q = if opts.unit_index_test {
        unit_index(&n1, &n2, &real)?
    } else {
        UnitIndex::Undetermined
    };
    if q == UnitIndex::Undetermined && product % 2 == 1 {
        q = UnitIndex::Two;
    }
    let h_candidates = match q.value() {
        Some(q) => vec![q * product / 2],
        None => vec![product / 2, product],
    };
    if q == UnitIndex::One && product % 2 == 1 {
        return Err(Error::Invariant(format!(
            "unit index 1 with odd h1 h2 h3 = {product} for {field}"
        )));
    }
    Ok(KurodaResult {
        h1,
        h2,
        h3,
        unit_index_q: q,
        h_candidates,
        odd_part: arith::odd_part(&BigInt::from(product)).to_u64().unwrap(),
    })
}

/// Element `(x + y sqrt m) / 2` of a real quadratic field.
#[derive(Debug, Clone)]
struct HalfElement {
    x: BigInt,
    y: BigInt,
}

impl HalfElement {
    fn unit(u: &PellSolution) -> HalfElement {
        if u.half {
            HalfElement {
                x: u.x.clone(),
                y: u.y.clone(),
            }
        } else {
            HalfElement {
                x: &u.x * 2u32,
                y: &u.y * 2u32,
            }
        }
    }

    fn scale(&self, k: &BigInt) -> HalfElement {
        HalfElement {
            x: &self.x * k,
            y: &self.y * k,
        }
    }
}

/// Whether `alpha` (norm `delta^2`) is a square of an integer of `Q(sqrt m)`.
fn is_square_in(m: &BigInt, alpha: &HalfElement, delta: &BigInt) -> bool {
    // gamma^2 = alpha gives Tr(gamma)^2 = Tr(alpha) + 2 N(gamma), N(gamma) = +-delta
    let m1mod4 = m.mod_floor(&BigInt::from(4)).is_one();
    for norm in [delta.clone(), -delta] {
        let s2: BigInt = &alpha.x + &norm * 2u32;
        if !s2.is_positive() || !arith::is_perfect_square(&s2) {
            continue;
        }
        let s = arith::isqrt(&s2);
        // gamma = (alpha + N(gamma)) / s = (g1 + g2 sqrt m) / 2
        let (g1, r1) = (&alpha.x + &norm * 2u32).div_rem(&s);
        let (g2, r2) = alpha.y.div_rem(&s);
        if !r1.is_zero() || !r2.is_zero() {
            continue;
        }
        let integral = if m1mod4 {
            (&g1 - &g2).is_even()
        } else {
            g1.is_even() && g2.is_even()
        };
        if integral && &g1 * &g1 + m * &g2 * &g2 == &alpha.x * 2u32 && &g1 * &g2 == alpha.y {
            return true;
        }
    }
    false
}

/// `[E : E1 E2 E3]` for the imaginary field with radicands `n1, n2` and real
/// subfield `Q(sqrt real)`.
fn unit_index(n1: &BigInt, n2: &BigInt, real: &BigInt) -> Result<UnitIndex> {
    let minus_one = -BigInt::one();
    let has_i = *n1 == minus_one || *n2 == minus_one;
    if has_i && *real == BigInt::from(2) {
        // Q(zeta_8): zeta_8 itself is missing from E1 E2 E3
        return Ok(UnitIndex::Two);
    }
    let eps = bqf::fundamental_unit(real)?;
    if eps.norm == -1 {
        return Ok(UnitIndex::One);
    }
    let alpha = HalfElement::unit(&eps);
    let mut multipliers = vec![BigInt::one(), n1.clone()];
    if has_i {
        multipliers.push(BigInt::from(2));
    }
    for k in multipliers {
        for delta in [k.clone(), -k] {
            if is_square_in(real, &alpha.scale(&delta), &delta.abs()) {
                return Ok(UnitIndex::Two);
            }
        }
    }
    Ok(UnitIndex::One)
}

/// Whether an element of order `n` or `2n` is consistent with the class number.
pub fn order_divisibility_verdict(field: &BiquadField, n: u64) -> Result<Verdict> {
    Ok(verdict_from(&kuroda_class_number(field)?, n))
}

pub fn verdict_from(k: &KurodaResult, n: u64) -> Verdict {
    if n == 0 {
        return Verdict::Fail;
    }
    if n % 2 == 1 {
        return if k.odd_part.is_multiple_of(n) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
    }
    let divides = k.h_candidates.iter().filter(|&&h| h % n == 0).count();
    if divides == k.h_candidates.len() {
        Verdict::Pass
    } else if divides == 0 {
        Verdict::Fail
    } else {
        Verdict::Indeterminate2Part
    }
}

/// `(gcd(|t1|, |t2|) = 1, Q(sqrt t1) != Q(sqrt t2))`.
pub fn linearly_disjoint(t1: &BigInt, t2: &BigInt) -> Result<(bool, bool)> {
    check_radicand(t1)?;
    check_radicand(t2)?;
    let gcd_check = t1.gcd(t2).is_one();
    let exact_check = !arith::squarefree_part(&(t1 * t2))?.is_one();
    Ok((gcd_check, exact_check))
}
