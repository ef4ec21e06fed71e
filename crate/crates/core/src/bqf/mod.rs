//! Binary quadratic forms `a x^2 + b xy + c y^2`.
//!
//! Classes of primitive forms of a fixed discriminant carry the ideal class
//! group of the quadratic order of that discriminant. Definite forms are
//! reduced to the unique representative with `|b| <= a <= c` and `b >= 0`
//! whenever `|b| = a` or `a = c`.

mod classnum;
mod order;
mod pell;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

pub use classnum::{
    class_number_imag, class_number_real, is_fundamental_discriminant, narrow_class_number_real,
    reduced_forms_imag,
};
pub use order::{class_order, class_order_bsgs};
pub use pell::{fundamental_unit, PellSolution};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Form {
    #[serde(with = "crate::decimal")]
    pub a: BigInt,
    #[serde(with = "crate::decimal")]
    pub b: BigInt,
    #[serde(with = "crate::decimal")]
    pub c: BigInt,
}

/// A class, carried by its reduced representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormClass {
    pub form: Form,
    #[serde(with = "crate::decimal")]
    pub discriminant: BigInt,
}

impl FormClass {
    pub fn of(f: &Form) -> Result<FormClass> {
        let form = f.reduce()?;
        Ok(FormClass {
            discriminant: form.discriminant(),
            form,
        })
    }

    pub fn is_principal(&self) -> bool {
        self.form.is_principal()
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

impl FromStr for Form {
    type Err = Error;

    /// Parses `(a,b,c)`; parentheses and spaces optional.
    fn from_str(s: &str) -> Result<Form> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected (a,b,c), got {s:?}")));
        }
        let num = |t: &str| BigInt::from_str(t).map_err(|e| Error::Parse(format!("{t:?}: {e}")));
        Form::new(num(parts[0])?, num(parts[1])?, num(parts[2])?)
    }
}

/// `b^2 - 4ac`.
pub fn form_discriminant(f: &Form) -> BigInt {
    f.discriminant()
}

pub(crate) fn check_discriminant(d: &BigInt) -> Result<()> {
    let r = d.mod_floor(&BigInt::from(4));
    if !(r.is_zero() || r.is_one()) || arith::is_perfect_square(d) {
        return Err(Error::InvalidDiscriminant(d.clone()));
    }
    Ok(())
}

/// `(1, 0, -D/4)` or `(1, 1, (1 - D)/4)`.
pub fn principal_form(d: &BigInt) -> Result<Form> {
    check_discriminant(d)?;
    let b = if d.is_even() {
        BigInt::zero()
    } else {
        BigInt::one()
    };
    let c = (&b * &b - d) / 4u32;
    Ok(Form {
        a: BigInt::one(),
        b,
        c,
    })
}

impl Form {
    /// Checked constructor: non-square discriminant, primitive, and `a > 0`
    /// when definite.
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Result<Form> {
        let f = Form {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        };
        let d = f.discriminant();
        if d.is_zero() || arith::is_perfect_square(&d) {
            return Err(Error::InvalidDiscriminant(d));
        }
        if !f.is_primitive() {
            return Err(Error::Domain(format!("form {f} is not primitive")));
        }
        if d.is_negative() && !f.a.is_positive() {
            return Err(Error::Domain(format!("definite form {f} must have a > 0")));
        }
        Ok(f)
    }

    pub(crate) fn raw(a: BigInt, b: BigInt, c: BigInt) -> Form {
        Form { a, b, c }
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - &self.a * &self.c * 4u32
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c).is_one()
    }

    pub fn is_definite(&self) -> bool {
        self.discriminant().is_negative()
    }

    pub fn is_reduced(&self) -> bool {
        let ab = self.b.abs();
        if ab > self.a || self.a > self.c {
            return false;
        }
        if (ab == self.a || self.a == self.c) && self.b.is_negative() {
            return false;
        }
        true
    }

    /// Principal means reduced to `(1, b, c)` with `b` in `{0, 1}`.
    pub fn is_principal(&self) -> bool {
        match self.reduce() {
            Ok(r) => r.a.is_one(),
            Err(_) => false,
        }
    }

    /// Moves `b` into `(-a, a]` by `x -> x + k y`.
    fn normalize(&mut self) {
        let two_a = &self.a * 2u32;
        // k = floor((a - b) / 2a)
        let k = (&self.a - &self.b).div_floor(&two_a);
        if k.is_zero() {
            return;
        }
        let new_b = &self.b + &two_a * &k;
        let new_c = &self.a * &k * &k + &self.b * &k + &self.c;
        self.b = new_b;
        self.c = new_c;
    }

    /// The reduced form properly equivalent to a positive definite form.
    pub fn reduce(&self) -> Result<Form> {
        if !self.is_definite() {
            return Err(Error::Domain(format!(
                "reduce is for definite forms; {self} has discriminant {}",
                self.discriminant()
            )));
        }
        if !self.a.is_positive() {
            return Err(Error::Domain(format!("form {self} is negative definite")));
        }
        let mut f = self.clone();
        f.normalize();
        while f.a > f.c || (f.a == f.c && f.b.is_negative()) {
            let (a, b, c) = (f.c.clone(), -&f.b, f.a.clone());
            f = Form { a, b, c };
            f.normalize();
        }
        if f.a == f.c && f.b.is_negative() {
            f.b = -f.b;
        }
        debug_assert!(f.is_reduced());
        Ok(f)
    }

    /// Composition (Dirichlet/Shanks in the form of Cohen's Algorithm 5.4.7),
    /// returning the reduced representative of the product class.
    pub fn compose(&self, other: &Form) -> Result<Form> {
        self.compose_unreduced(other)?.reduce()
    }

    /// Composite form before reduction. Works for any common discriminant.
    pub fn compose_unreduced(&self, other: &Form) -> Result<Form> {
        let d = self.discriminant();
        let d2 = other.discriminant();
        if d != d2 {
            return Err(Error::DiscriminantMismatch(d, d2));
        }
        let (f1, f2) = if self.a.abs() > other.a.abs() {
            (other, self)
        } else {
            (self, other)
        };
        let (a1, b1) = (&f1.a, &f1.b);
        let (a2, b2, c2) = (&f2.a, &f2.b, &f2.c);
        let s: BigInt = (b1 + b2) / 2u32;
        let n = b2 - &s;

        let (y1, dd) = if (a2 % a1).is_zero() {
            (BigInt::zero(), a1.abs())
        } else {
            let (g, u, _v) = arith::extended_gcd(a2, a1)?;
            (u, g)
        };
        let (x2, y2, d1) = if (&s % &dd).is_zero() {
            (BigInt::zero(), -BigInt::one(), dd.clone())
        } else {
            let (g, x, y) = arith::extended_gcd(&s, &dd)?;
            (x, -y, g)
        };
        let v1 = a1 / &d1;
        let v2 = a2 / &d1;
        let r = (&y1 * &y2 * &n - &x2 * c2).mod_floor(&v1.abs());
        let b3 = b2 + &v2 * &r * 2u32;
        let a3 = &v1 * &v2;
        let num = &b3 * &b3 - &d;
        let den = &a3 * 4u32;
        if !(&num % &den).is_zero() {
            return Err(Error::Invariant(format!(
                "composition of {self} and {other} produced a non-integral form"
            )));
        }
        Ok(Form::raw(a3, b3, num / den))
    }

    /// `reduce((a, -b, c))`.
    pub fn inverse(&self) -> Result<Form> {
        Form::raw(self.a.clone(), -&self.b, self.c.clone()).reduce()
    }

    /// `self^e` as a reduced form, `e` may be negative.
    pub fn pow(&self, e: &BigInt) -> Result<Form> {
        let mut base = if e.is_negative() {
            self.inverse()?
        } else {
            self.reduce()?
        };
        let e = e.abs();
        let mut acc = principal_form(&self.discriminant())?;
        for i in 0..e.bits() {
            if e.bit(i) {
                acc = acc.compose(&base)?;
            }
            base = base.compose(&base)?;
        }
        Ok(acc)
    }
}
