//! Rational points on integral cubics `y^2 = x^3 + a2 x^2 + a4 x + a6`.
//!
//! Affine points are kept in the `(A/C^2, B/C^3)` shape with `C >= 1` and
//! `gcd(A, C) = gcd(B, C) = 1`. The group law runs over exact rationals and
//! re-normalizes every result.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// Largest order searched before a point is declared non-torsion. Mazur bounds
/// the torsion group order by 16 and element orders by 12; the larger bound is
/// used as the cutoff.
pub const TORSION_ORDER_CUTOFF: u32 = 16;
/// Mazur's bound on the order of a single rational torsion point.
pub const MAZUR_ELEMENT_ORDER_BOUND: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Curve {
    #[serde(with = "crate::decimal")]
    pub a2: BigInt,
    #[serde(with = "crate::decimal")]
    pub a4: BigInt,
    #[serde(with = "crate::decimal")]
    pub a6: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Point {
    Infinity,
    Affine {
        #[serde(with = "crate::decimal")]
        a: BigInt,
        #[serde(with = "crate::decimal")]
        b: BigInt,
        #[serde(with = "crate::decimal")]
        c: BigInt,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointOrder {
    Finite(u32),
    NonTorsion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TorsionShape {
    /// Z/n
    Cyclic { n: u32 },
    /// Z/2 x Z/2m
    TwoByEven { m: u32 },
}

impl TorsionShape {
    pub fn order(&self) -> u32 {
        match *self {
            TorsionShape::Cyclic { n } => n,
            TorsionShape::TwoByEven { m } => 4 * m,
        }
    }
}

impl fmt::Display for TorsionShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TorsionShape::Cyclic { n } => write!(f, "Z/{n}"),
            TorsionShape::TwoByEven { m } => write!(f, "Z/2 x Z/{}", 2 * m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionData {
    /// Sorted: infinity first, then by x, then by y.
    pub points: Vec<Point>,
    pub shape: TorsionShape,
    /// Point of maximal order, lowest x, then positive y.
    pub generator: Point,
}

impl TorsionData {
    pub fn order(&self) -> u32 {
        self.shape.order()
    }

    pub fn generator_order(&self) -> u32 {
        match self.shape {
            TorsionShape::Cyclic { n } => n,
            TorsionShape::TwoByEven { m } => 2 * m,
        }
    }
}

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

impl Point {
    /// Builds `(A/C^2, B/C^3)`, rejecting anything not in normal form.
    pub fn affine(a: BigInt, b: BigInt, c: BigInt) -> Result<Point> {
        if !c.is_positive() {
            return Err(Error::NotNormalized(format!("C = {c} must be positive")));
        }
        if !a.gcd(&c).is_one() || !b.gcd(&c).is_one() {
            return Err(Error::NotNormalized(format!(
                "({a}, {b}, {c}) shares a factor with C"
            )));
        }
        Ok(Point::Affine { a, b, c })
    }

    pub fn integral(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Point {
        Point::Affine {
            a: x.into(),
            b: y.into(),
            c: BigInt::one(),
        }
    }

    /// Converts rational coordinates, which must have denominators `C^2` and `C^3`.
    pub fn from_rationals(x: &BigRational, y: &BigRational) -> Result<Point> {
        let c = arith::isqrt(x.denom());
        if &c * &c != *x.denom() || &c * &c * &c != *y.denom() {
            return Err(Error::NotNormalized(format!(
                "denominators of ({x}, {y}) are not of the form (C^2, C^3)"
            )));
        }
        Point::affine(x.numer().clone(), y.numer().clone(), c)
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn is_integral(&self) -> bool {
        match self {
            Point::Infinity => true,
            Point::Affine { c, .. } => c.is_one(),
        }
    }

    pub fn x(&self) -> Option<BigRational> {
        match self {
            Point::Infinity => None,
            Point::Affine { a, c, .. } => Some(BigRational::new(a.clone(), c * c)),
        }
    }

    pub fn y(&self) -> Option<BigRational> {
        match self {
            Point::Infinity => None,
            Point::Affine { b, c, .. } => Some(BigRational::new(b.clone(), c * c * c)),
        }
    }

    pub fn neg(&self) -> Point {
        match self {
            Point::Infinity => Point::Infinity,
            Point::Affine { a, b, c } => Point::Affine {
                a: a.clone(),
                b: -b,
                c: c.clone(),
            },
        }
    }

    fn sort_key(&self) -> Option<(BigRational, BigRational)> {
        Some((self.x()?, self.y()?))
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => write!(f, "O"),
            Point::Affine { a, b, c } if c.is_one() => write!(f, "({a}, {b})"),
            Point::Affine { a, b, c } => write!(f, "({a}/{}, {b}/{})", c * c, c * c * c),
        }
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a2, self.a4, self.a6)
    }
}

impl Curve {
    pub fn new(a2: impl Into<BigInt>, a4: impl Into<BigInt>, a6: impl Into<BigInt>) -> Curve {
        Curve {
            a2: a2.into(),
            a4: a4.into(),
            a6: a6.into(),
        }
    }

    /// `y^2 = x^3 + a x + b`.
    pub fn short(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Curve {
        Curve::new(0, a, b)
    }

    /// Weierstrass discriminant; zero iff the model is singular.
    pub fn discriminant(&self) -> BigInt {
        let b2 = &self.a2 * 4u32;
        let b4 = &self.a4 * 2u32;
        let b6 = &self.a6 * 4u32;
        let b8 = &self.a2 * &self.a6 * 4u32 - &self.a4 * &self.a4;
        -(&b2 * &b2 * &b8) - &b4 * &b4 * &b4 * 8u32 - &b6 * &b6 * 27u32 + &b2 * &b4 * &b6 * 9u32
    }

    pub fn is_singular(&self) -> bool {
        self.discriminant().is_zero()
    }

    fn rhs(&self, x: &BigRational) -> BigRational {
        let a2 = BigRational::from_integer(self.a2.clone());
        let a4 = BigRational::from_integer(self.a4.clone());
        let a6 = BigRational::from_integer(self.a6.clone());
        ((x + a2) * x + a4) * x + a6
    }

    fn rhs_int(&self, x: &BigInt) -> BigInt {
        ((x + &self.a2) * x + &self.a4) * x + &self.a6
    }

    pub fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine { a, b, c } => {
                // B^2 = A^3 + a2 C^2 A^2 + a4 C^4 A + a6 C^6
                let c2 = c * c;
                let c4 = &c2 * &c2;
                let c6 = &c4 * &c2;
                b * b == a * a * a + &self.a2 * &c2 * a * a + &self.a4 * &c4 * a + &self.a6 * c6
            }
        }
    }

    fn check(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::PointNotOnCurve)
        }
    }

    /// Chord-and-tangent addition.
    pub fn add(&self, p: &Point, q: &Point) -> Result<Point> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    fn add_unchecked(&self, p: &Point, q: &Point) -> Point {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            _ => (
                p.x().unwrap(),
                p.y().unwrap(),
                q.x().unwrap(),
                q.y().unwrap(),
            ),
        };
        let a2 = BigRational::from_integer(self.a2.clone());
        let lambda = if x1 == x2 {
            if (&y1 + &y2).is_zero() {
                return Point::Infinity;
            }
            let three = BigRational::from_integer(big(3));
            let two = BigRational::from_integer(big(2));
            (three * &x1 * &x1 + &two * &a2 * &x1 + BigRational::from_integer(self.a4.clone()))
                / (two * &y1)
        } else {
            (&y2 - &y1) / (&x2 - &x1)
        };
        let x3 = &lambda * &lambda - &a2 - &x1 - &x2;
        let y3 = &lambda * (&x1 - &x3) - &y1;
        Point::from_rationals(&x3, &y3).expect("group law preserves the (C^2, C^3) shape")
    }

    /// `n * P` by double-and-add; negative `n` uses `-P`.
    pub fn scalar_mul(&self, n: &BigInt, p: &Point) -> Result<Point> {
        self.check(p)?;
        let (mut base, k) = if n.is_negative() {
            (p.neg(), -n)
        } else {
            (p.clone(), n.clone())
        };
        let mut acc = Point::Infinity;
        for i in 0..k.bits() {
            if k.bit(i) {
                acc = self.add_unchecked(&acc, &base);
            }
            base = self.add_unchecked(&base, &base);
        }
        Ok(acc)
    }

    /// Order of `P` if it is at most [`TORSION_ORDER_CUTOFF`], else `NonTorsion`.
    /// A multiple that is non-integral, or has `y != 0` with `y^2` not dividing
    /// the discriminant, proves infinite order early (Nagell–Lutz).
    pub fn point_order(&self, p: &Point) -> Result<PointOrder> {
        self.check(p)?;
        let disc = self.discriminant();
        let mut q = p.clone();
        for k in 1..=TORSION_ORDER_CUTOFF {
            match &q {
                Point::Infinity => return Ok(PointOrder::Finite(k)),
                Point::Affine { b, c, .. } => {
                    if !c.is_one() {
                        return Ok(PointOrder::NonTorsion);
                    }
                    if !b.is_zero() && !disc.is_zero() && !(&disc % (b * b)).is_zero() {
                        return Ok(PointOrder::NonTorsion);
                    }
                }
            }
            q = self.add_unchecked(&q, p);
        }
        Ok(PointOrder::NonTorsion)
    }

    /// The curve whose points are `(x + s, y)` for `(x, y)` on `self`.
    pub fn shift(&self, s: &BigInt) -> Curve {
        let s2 = s * s;
        Curve {
            a2: &self.a2 - s * 3u32,
            a4: &s2 * 3u32 - &self.a2 * s * 2u32 + &self.a4,
            a6: -(&s2 * s) + &self.a2 * &s2 - &self.a4 * s + &self.a6,
        }
    }

    /// Soleng primitivity: `A`, `2B` and `A^2 + a2 C^2 A + a4 C^4` pairwise coprime,
    /// evaluated on the integral model `Y^2 = X^3 + a2 C^2 X^2 + a4 C^4 X + a6 C^6`.
    pub fn is_primitive(&self, p: &Point) -> Result<bool> {
        self.check(p)?;
        match p {
            Point::Infinity => Ok(true),
            Point::Affine { a, b, c } => {
                let c2 = c * c;
                let third = a * a + &self.a2 * &c2 * a + &self.a4 * &c2 * &c2;
                let two_b = b * 2u32;
                Ok(a.gcd(&two_b).is_one() && a.gcd(&third).is_one() && two_b.gcd(&third).is_one())
            }
        }
    }

    /// All rational torsion points via Nagell–Lutz candidates filtered by order.
    pub fn torsion_subgroup(&self) -> Result<TorsionData> {
        let disc = self.discriminant();
        if disc.is_zero() {
            return Err(Error::Domain(format!("curve {self} is singular")));
        }
        let mut ys = vec![BigInt::zero()];
        ys.extend(square_divisor_roots(&disc)?);

        let mut points = vec![Point::Infinity];
        for y in &ys {
            let constant = &self.a6 - y * y;
            for x in integer_roots_monic_cubic(&self.a2, &self.a4, &constant) {
                debug_assert_eq!(self.rhs_int(&x), y * y);
                let candidates = if y.is_zero() {
                    vec![Point::integral(x.clone(), 0)]
                } else {
                    vec![
                        Point::integral(x.clone(), y.clone()),
                        Point::integral(x.clone(), -y),
                    ]
                };
                for pt in candidates {
                    if let PointOrder::Finite(_) = self.point_order(&pt)? {
                        points.push(pt);
                    }
                }
            }
        }
        points.sort();
        points.dedup();

        let mut orders = Vec::with_capacity(points.len());
        for pt in &points {
            match self.point_order(pt)? {
                PointOrder::Finite(k) => orders.push(k),
                PointOrder::NonTorsion => unreachable!("filtered above"),
            }
        }
        let total = points.len() as u32;
        let max_order = *orders.iter().max().expect("infinity is always present");
        let shape = if max_order == total {
            TorsionShape::Cyclic { n: total }
        } else if total == 2 * max_order && max_order % 2 == 0 {
            TorsionShape::TwoByEven { m: max_order / 2 }
        } else {
            return Err(Error::Invariant(format!(
                "torsion set of size {total} with maximal order {max_order} is not a Mazur group"
            )));
        };
        // points are sorted by (x, y); prefer positive y among equal x.
        let generator = points
            .iter()
            .zip(&orders)
            .filter(|(_, &k)| k == max_order)
            .map(|(p, _)| p.clone())
            .min_by(|p, q| {
                let px = p.x();
                let qx = q.x();
                px.cmp(&qx).then_with(|| {
                    let py = p.y().map(|y| y.is_negative());
                    let qy = q.y().map(|y| y.is_negative());
                    py.cmp(&qy)
                })
            })
            .expect("at least one point of maximal order");
        Ok(TorsionData {
            points,
            shape,
            generator,
        })
    }

    /// Rational x on the curve? Returns the non-negative y if the right-hand
    /// side is a rational square.
    pub fn lift_x(&self, x: &BigRational) -> Option<BigRational> {
        let rhs = self.rhs(x);
        if rhs.is_negative() {
            return None;
        }
        let n = rhs.numer();
        let d = rhs.denom();
        if arith::is_perfect_square(n) && arith::is_perfect_square(d) {
            Some(BigRational::new(arith::isqrt(n), arith::isqrt(d)))
        } else {
            None
        }
    }
}

/// Quadratic twist of `y^2 = x^3 + a x + b` by the signed squarefree `t`:
/// `y^2 = x^3 + t^2 a x + t^3 b`.
pub fn twist(a: &BigInt, b: &BigInt, t: &BigInt) -> Result<Curve> {
    if t.is_zero() || !arith::is_squarefree(t)? {
        return Err(Error::Domain(format!(
            "twist parameter {t} must be squarefree and non-zero"
        )));
    }
    Ok(Curve::new(0, t * t * a, t * t * t * b))
}

/// `(x, y) -> (x + s, y)`, i.e. `(A + s C^2, B, C)`.
pub fn shift_point(p: &Point, s: &BigInt) -> Point {
    match p {
        Point::Infinity => Point::Infinity,
        Point::Affine { a, b, c } => Point::Affine {
            a: a + s * c * c,
            b: b.clone(),
            c: c.clone(),
        },
    }
}

/// Positive `y` with `y^2 | n`.
fn square_divisor_roots(n: &BigInt) -> Result<Vec<BigInt>> {
    let factors = arith::factor(n, arith::DEFAULT_TRIAL_BOUND)?;
    let mut roots = vec![BigInt::one()];
    for (p, e) in factors {
        let half = e / 2;
        let mut next = Vec::with_capacity(roots.len() * (half as usize + 1));
        for r in &roots {
            let mut pk = BigInt::one();
            for _ in 0..=half {
                next.push(r * &pk);
                pk *= &p;
            }
        }
        roots = next;
    }
    roots.sort();
    Ok(roots)
}

/// Integer roots of `x^3 + a x^2 + b x + c`, ascending.
pub fn integer_roots_monic_cubic(a: &BigInt, b: &BigInt, c: &BigInt) -> Vec<BigInt> {
    let g = |x: &BigInt| ((x + a) * x + b) * x + c;
    let mut roots = Vec::new();
    if c.is_zero() {
        roots.push(BigInt::zero());
        let disc = a * a - b * 4u32;
        if arith::is_perfect_square(&disc) {
            let s = arith::isqrt(&disc);
            for num in [-a - &s, -a + &s] {
                if num.is_even() {
                    roots.push(num / 2u32);
                }
            }
        }
    } else {
        let bound = a.abs().max(b.abs()).max(c.abs()) + 1u32;
        let crit = a * a - b * 3u32;
        if !crit.is_positive() {
            roots.extend(monotone_root(&g, -&bound, bound.clone(), true));
        } else {
            let r = arith::isqrt(&crit);
            let w_lo = (-a - &r).div_floor(&big(3));
            let w_hi = (-a + &r).div_floor(&big(3));
            roots.extend(monotone_root(&g, -&bound, &w_lo - 1u32, true));
            roots.extend(monotone_root(&g, &w_lo + 1u32, w_hi.clone(), false));
            roots.extend(monotone_root(&g, &w_hi + 2u32, bound.clone(), true));
            for x in [w_lo, w_hi + 1u32] {
                if g(&x).is_zero() {
                    roots.push(x);
                }
            }
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

/// Integer zero of a monotone function on `[lo, hi]`, by bisection.
fn monotone_root(
    g: &impl Fn(&BigInt) -> BigInt,
    lo: BigInt,
    hi: BigInt,
    increasing: bool,
) -> Option<BigInt> {
    if lo > hi {
        return None;
    }
    let sign = |x: &BigInt| {
        let v = g(x);
        if increasing {
            v
        } else {
            -v
        }
    };
    // find first x with sign(x) >= 0
    let (mut l, mut h) = (lo, hi);
    if sign(&h).is_negative() {
        return None;
    }
    while l < h {
        let mid: BigInt = (&l + &h).div_floor(&big(2));
        if sign(&mid).is_negative() {
            l = mid + 1u32;
        } else {
            h = mid;
        }
    }
    if g(&l).is_zero() {
        Some(l)
    } else {
        None
    }
}
