//! Order-`l` classes from `y^2 = k^2 - x^l` at `x = p`.
//!
//! With `t = k^2 - p^l` the ideal `(p, -k + sqrt t)` has norm `p` and its
//! `l`-th power is generated by `-k + sqrt t`. Its form is
//! `(p, 2k, p^(l-1))` at discriminant `4t`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::bqf::{class_order, Form};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BhParams {
    #[serde(with = "crate::decimal")]
    pub kk: BigInt,
    pub l: u32,
    #[serde(with = "crate::decimal")]
    pub p: BigInt,
}

impl BhParams {
    pub fn new(kk: impl Into<BigInt>, l: u32, p: impl Into<BigInt>) -> BhParams {
        BhParams {
            kk: kk.into(),
            l,
            p: p.into(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.l < 3 {
            return Err(Error::Domain(format!(
                "exponent l = {} must be at least 3",
                self.l
            )));
        }
        if self.p == BigInt::from(2) {
            return Err(Error::Domain("p = 2 is excluded".into()));
        }
        if !arith::is_prime(&self.p)? {
            return Err(Error::Domain(format!("p = {} is not an odd prime", self.p)));
        }
        if (&self.kk % &self.p).is_zero() {
            return Err(Error::DegenerateInput(format!(
                "p = {} divides k = {}",
                self.p, self.kk
            )));
        }
        Ok(())
    }
}

/// `t = k^2 - p^l`, required negative.
pub fn bh_radicand(params: &BhParams) -> Result<BigInt> {
    params.validate()?;
    let t = &params.kk * &params.kk - params.p.pow(params.l);
    if !t.is_negative() {
        return Err(Error::Domain(format!("k^2 - p^l = {t} is not negative")));
    }
    Ok(t)
}

/// `(p, 2k, p^(l-1))`, unreduced.
pub fn bh_form(params: &BhParams) -> Result<Form> {
    let t = bh_radicand(params)?;
    let f = Form::raw(
        params.p.clone(),
        &params.kk * 2u32,
        params.p.pow(params.l - 1),
    );
    if !f.is_primitive() {
        return Err(Error::DegenerateInput(format!("form {f} is not primitive")));
    }
    debug_assert_eq!(f.discriminant(), &t * 4u32);
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BhStatus {
    /// Order exactly `l`.
    Confirmed,
    /// Order a proper divisor of `l` other than 1.
    ProperDivisor,
    /// The form is principal.
    DegenerateWitness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BhCertificate {
    pub params: BhParams,
    #[serde(with = "crate::decimal")]
    pub radicand: BigInt,
    pub form: Form,
    pub reduced: Form,
    pub order: u64,
    pub status: BhStatus,
    /// For `t = 1 (mod 4)` squarefree, the order of the image at discriminant `t`.
    pub fundamental_order: Option<u64>,
}

/// Exact order of `bh_form`, after checking that its `l`-th power is principal.
pub fn bh_certify_order(params: &BhParams) -> Result<u64> {
    Ok(bh_certificate(params)?.order)
}

pub fn bh_certificate(params: &BhParams) -> Result<BhCertificate> {
    let form = bh_form(params)?;
    let t = bh_radicand(params)?;
    let reduced = form.reduce()?;
    if !reduced.pow(&BigInt::from(params.l))?.a.is_one() {
        return Err(Error::Invariant(format!(
            "{form} raised to {} is not principal",
            params.l
        )));
    }
    let order = class_order(&reduced)?;
    let status = if order == 1 {
        BhStatus::DegenerateWitness
    } else if order == u64::from(params.l) {
        BhStatus::Confirmed
    } else {
        BhStatus::ProperDivisor
    };
    let fundamental_order = if t.mod_floor(&BigInt::from(4)).is_one() && arith::is_squarefree(&t)? {
        let image = crate::biquad::to_fundamental_class(&reduced)?;
        Some(class_order(&image.form)?)
    } else {
        None
    };
    Ok(BhCertificate {
        params: params.clone(),
        radicand: t,
        form,
        reduced,
        order,
        status,
        fundamental_order,
    })
}

impl BhCertificate {
    pub fn summary(&self) -> String {
        let status = match self.status {
            BhStatus::Confirmed => "order = l: witness confirms the claim",
            BhStatus::ProperDivisor => "order < l: hypotheses presumably violated",
            BhStatus::DegenerateWitness => "degenerate witness: principal form",
        };
        format!(
            "t = {}  form {} ~ {}  order {} (l = {})  {status}",
            self.radicand, self.form, self.reduced, self.order, self.params.l
        )
    }
}
