//! Prime sweeps that build class-group witnesses and check them against the
//! class numbers of the biquadratic fields they live in.
//!
//! Every per-prime outcome, accepted or not, is a [`Certificate`]. A
//! certificate echoes its inputs, so [`replay`] can recompute it and compare
//! the serialized bytes.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, Squarefreeness};
use crate::bh::{self, BhParams, BhStatus};
use crate::biquad::{self, BiquadField, KurodaResult, UnitIndex, Verdict};
use crate::bqf::{self, Form};
use crate::elliptic::{self, Curve, Point};
use crate::error::{Error, Result};
use crate::soleng;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "CLASSFORGE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SquarefreePolicy {
    #[default]
    Require,
    Report,
}

impl std::str::FromStr for SquarefreePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "require" => Ok(SquarefreePolicy::Require),
            "report" => Ok(SquarefreePolicy::Report),
            _ => Err(Error::Config(format!(
                "squarefree policy must be require or report, got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thm11Config {
    #[serde(with = "crate::decimal")]
    pub a: BigInt,
    #[serde(with = "crate::decimal")]
    pub b: BigInt,
    #[serde(with = "crate::decimal")]
    pub d: BigInt,
    #[serde(with = "crate::decimal")]
    pub prime_lo: BigInt,
    #[serde(with = "crate::decimal")]
    pub prime_hi: BigInt,
    pub squarefree_policy: SquarefreePolicy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thm12Config {
    #[serde(with = "crate::decimal")]
    pub kk: BigInt,
    pub l: u32,
    #[serde(with = "crate::decimal")]
    pub p_lo: BigInt,
    #[serde(with = "crate::decimal")]
    pub p_hi: BigInt,
    #[serde(with = "crate::decimal")]
    pub a: BigInt,
    #[serde(with = "crate::decimal")]
    pub b: BigInt,
    #[serde(with = "crate::decimal")]
    pub d: BigInt,
    #[serde(with = "crate::decimal")]
    pub q_lo: BigInt,
    #[serde(with = "crate::decimal")]
    pub q_hi: BigInt,
    pub squarefree_policy: SquarefreePolicy,
}

/// The inputs a single certificate is recomputed from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateInputs {
    Thm11 {
        #[serde(with = "crate::decimal")]
        a: BigInt,
        #[serde(with = "crate::decimal")]
        b: BigInt,
        #[serde(with = "crate::decimal")]
        d: BigInt,
        #[serde(with = "crate::decimal")]
        p: BigInt,
        squarefree_policy: SquarefreePolicy,
    },
    Thm12 {
        #[serde(with = "crate::decimal")]
        kk: BigInt,
        l: u32,
        #[serde(with = "crate::decimal")]
        p: BigInt,
        #[serde(with = "crate::decimal")]
        a: BigInt,
        #[serde(with = "crate::decimal")]
        b: BigInt,
        #[serde(with = "crate::decimal")]
        d: BigInt,
        #[serde(with = "crate::decimal")]
        q: BigInt,
        squarefree_policy: SquarefreePolicy,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveRecord {
    #[serde(with = "crate::decimal")]
    pub radicand: BigInt,
    pub negative: bool,
    pub non_square: bool,
    pub squarefree: Squarefreeness,
    pub primitive: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSource {
    Soleng,
    Bh,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub source: WitnessSource,
    #[serde(with = "crate::decimal")]
    pub discriminant: BigInt,
    pub form: Form,
    pub reduced: Form,
    pub order: u64,
    /// Image in the class group of the fundamental discriminant, when the
    /// conductor is 1 or 2.
    #[serde(with = "crate::decimal::option")]
    pub fundamental_discriminant: Option<BigInt>,
    pub fundamental_form: Option<Form>,
    pub fundamental_order: Option<u64>,
    pub curve: Option<Curve>,
    pub point: Option<Point>,
    pub bh_status: Option<BhStatus>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disjointness {
    pub gcd_check: bool,
    pub exact_check: bool,
    pub fundamental_discriminants_coprime: bool,
    pub both_one_mod_4: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertStatus {
    Accepted,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub tool_version: String,
    pub replay_seed: u64,
    pub inputs: CertificateInputs,
    pub status: CertStatus,
    pub rejection_reason: Option<String>,
    #[serde(with = "crate::decimal::vec")]
    pub radicands: Vec<BigInt>,
    pub sieve: Vec<SieveRecord>,
    pub torsion_order: Option<u32>,
    pub witnesses: Vec<Witness>,
    pub n_target: Option<u64>,
    pub field: Option<BiquadField>,
    pub disjointness: Option<Disjointness>,
    pub kuroda: Option<KurodaResult>,
    pub verdict: Option<Verdict>,
    pub q_index_status: Option<UnitIndex>,
    /// Verdicts for `n = 2` carry no claim.
    pub informational_only: bool,
    pub refutation_candidate: bool,
    pub notes: Vec<String>,
}

impl Certificate {
    fn new(inputs: CertificateInputs) -> Certificate {
        Certificate {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            replay_seed: arith::PrimalityConfig::default().seed,
            inputs,
            status: CertStatus::Rejected,
            rejection_reason: None,
            radicands: Vec::new(),
            sieve: Vec::new(),
            torsion_order: None,
            witnesses: Vec::new(),
            n_target: None,
            field: None,
            disjointness: None,
            kuroda: None,
            verdict: None,
            q_index_status: None,
            informational_only: false,
            refutation_candidate: false,
            notes: Vec::new(),
        }
    }

    fn reject(mut self, reason: impl Into<String>) -> Certificate {
        self.status = CertStatus::Rejected;
        self.rejection_reason = Some(reason.into());
        self
    }

    pub fn is_accepted(&self) -> bool {
        self.status == CertStatus::Accepted
    }

    /// The prime(s) this certificate is about.
    pub fn primes(&self) -> Vec<&BigInt> {
        match &self.inputs {
            CertificateInputs::Thm11 { p, .. } => vec![p],
            CertificateInputs::Thm12 { p, q, .. } => vec![p, q],
        }
    }

    /// One human-readable line.
    pub fn summary(&self) -> String {
        let primes: Vec<String> = self.primes().iter().map(|p| p.to_string()).collect();
        let radicands: Vec<String> = self.radicands.iter().map(|t| t.to_string()).collect();
        let head = format!("p = {:<8} t = {}", primes.join(","), radicands.join(","));
        match self.status {
            CertStatus::Rejected => format!(
                "{head}  rejected: {}",
                self.rejection_reason.as_deref().unwrap_or("?")
            ),
            CertStatus::Accepted => {
                let ws: Vec<String> = self
                    .witnesses
                    .iter()
                    .map(|w| format!("{} order {}", w.reduced, w.order))
                    .collect();
                let verdict = self.verdict.map(|v| v.to_string()).unwrap_or_default();
                let odd = self.kuroda.as_ref().map(|k| k.odd_part).unwrap_or(0);
                let mut line = format!(
                    "{head}  witness {}  n = {}  odd part {odd}  {verdict}",
                    ws.join("; "),
                    self.n_target.unwrap_or(0)
                );
                if self.informational_only {
                    line.push_str(" (informational)");
                }
                if self.refutation_candidate {
                    line.push_str("  REFUTATION CANDIDATE");
                }
                line
            }
        }
    }
}

/// Rejection tallies by reason, plus the accepted count.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveTally {
    pub total: usize,
    pub accepted: usize,
    pub rejected: BTreeMap<String, usize>,
}

impl SieveTally {
    fn of(certs: &[Certificate]) -> SieveTally {
        let mut tally = SieveTally {
            total: certs.len(),
            ..Default::default()
        };
        for c in certs {
            match &c.rejection_reason {
                None => tally.accepted += 1,
                Some(r) => *tally.rejected.entry(r.clone()).or_default() += 1,
            }
        }
        tally
    }

    pub fn table(&self) -> String {
        let mut out = format!("{:<40} {:>8}\n", "outcome", "count");
        out += &format!("{:<40} {:>8}\n", "accepted", self.accepted);
        for (reason, n) in &self.rejected {
            out += &format!("{:<40} {:>8}\n", format!("rejected: {reason}"), n);
        }
        out += &format!("{:<40} {:>8}\n", "total", self.total);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub certificates: Vec<Certificate>,
    pub tally: SieveTally,
    /// Set when the twisted curve has trivial torsion and nothing was searched.
    pub vacuous: bool,
}

impl SearchReport {
    fn new(certificates: Vec<Certificate>) -> SearchReport {
        SearchReport {
            tally: SieveTally::of(&certificates),
            certificates,
            vacuous: false,
        }
    }

    pub fn refutation_candidates(&self) -> Vec<&Certificate> {
        self.certificates
            .iter()
            .filter(|c| c.refutation_candidate)
            .collect()
    }
}

/// The twisted curve and its torsion generator.
struct CurveContext {
    curve: Curve,
    generator: Point,
    n: u32,
}

fn curve_context(a: &BigInt, b: &BigInt, d: &BigInt) -> Result<Option<CurveContext>> {
    if d.is_zero() || !arith::is_squarefree(d)? {
        return Err(Error::Config(format!(
            "twist parameter d = {d} must be squarefree"
        )));
    }
    let d3b = d * d * d * b;
    if !d3b.is_negative() && arith::is_perfect_square(&d3b) {
        return Err(Error::Config(format!("d^3 b = {d3b} is a perfect square")));
    }
    let curve = elliptic::twist(a, b, d)?;
    let torsion = curve.torsion_subgroup()?;
    if torsion.generator_order() <= 1 {
        return Ok(None);
    }
    Ok(Some(CurveContext {
        n: torsion.generator_order(),
        generator: torsion.generator.clone(),
        curve,
    }))
}

/// `-s^3 - d^2 s a + d^3 b`, the constant term after `x -> x - s` on the twist.
pub fn shifted_radicand(a: &BigInt, b: &BigInt, d: &BigInt, s: &BigInt) -> BigInt {
    -(s * s * s) - d * d * s * a + d * d * d * b
}

fn sieve_record(t: &BigInt) -> Result<SieveRecord> {
    Ok(SieveRecord {
        radicand: t.clone(),
        negative: t.is_negative(),
        non_square: t.is_negative() || !arith::is_perfect_square(t),
        squarefree: if t.is_zero() {
            Squarefreeness::NotSquarefree
        } else {
            arith::squarefree_status(t, arith::DEFAULT_TRIAL_BOUND)?
        },
        primitive: None,
    })
}

/// Reason the sieve rejects `t`, if any.
fn sieve_rejection(rec: &SieveRecord, policy: SquarefreePolicy) -> Option<&'static str> {
    if !rec.negative {
        return Some("not imaginary");
    }
    if !rec.non_square {
        return Some("perfect square");
    }
    match (rec.squarefree, policy) {
        (Squarefreeness::Squarefree, _) | (_, SquarefreePolicy::Report) => None,
        (Squarefreeness::NotSquarefree, _) => Some("not squarefree"),
        (Squarefreeness::Unproven, _) => Some("squarefree unproven"),
    }
}

/// Image of a class in the maximal order, when the conductor is at most 2.
fn fundamental_image(f: &Form) -> Result<Option<(BigInt, Form, u64)>> {
    match biquad::to_fundamental_class(f) {
        Ok(class) => {
            let order = bqf::class_order(&class.form)?;
            Ok(Some((class.discriminant, class.form, order)))
        }
        Err(Error::UnsupportedConductor(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn attach_fundamental(w: &mut Witness) -> Result<()> {
    if let Some((d0, form, order)) = fundamental_image(&w.reduced)? {
        w.fundamental_discriminant = Some(d0);
        w.fundamental_form = Some(form);
        w.fundamental_order = Some(order);
    }
    Ok(())
}

/// The Soleng chain at one prime: sieve, shift, primitivity, class, order.
/// Returns the sieve record and either the witness or a rejection reason.
fn soleng_side(
    ctx: &CurveContext,
    t: &BigInt,
    s: &BigInt,
    policy: SquarefreePolicy,
) -> Result<(SieveRecord, std::result::Result<Witness, String>)> {
    let mut rec = sieve_record(t)?;
    if let Some(reason) = sieve_rejection(&rec, policy) {
        return Ok((rec, Err(reason.into())));
    }
    let shifted = ctx.curve.shift(s);
    debug_assert_eq!(&shifted.a6, t);
    let point = elliptic::shift_point(&ctx.generator, s);
    let primitive = shifted.is_primitive(&point)?;
    rec.primitive = Some(primitive);
    if !primitive {
        return Ok((rec, Err("primitivity".into())));
    }
    let ideal = soleng::point_to_ideal(&shifted, &point)?;
    let form = Form::raw(
        ideal.a.clone(),
        &ideal.b0 * 2u32,
        (&ideal.b0 * &ideal.b0 - &ideal.radicand) / &ideal.a,
    );
    let class = soleng::soleng_class(&shifted, &point)?;
    let order = bqf::class_order(&class.form)?;
    if u64::from(ctx.n) % order != 0 {
        return Err(Error::Invariant(format!(
            "witness order {order} does not divide torsion order {} at t = {t}",
            ctx.n
        )));
    }
    let mut w = Witness {
        source: WitnessSource::Soleng,
        discriminant: class.discriminant,
        form,
        reduced: class.form,
        order,
        fundamental_discriminant: None,
        fundamental_form: None,
        fundamental_order: None,
        curve: Some(shifted),
        point: Some(point),
        bh_status: None,
    };
    attach_fundamental(&mut w)?;
    if order == 1 {
        return Ok((rec, Err("trivial witness".into())));
    }
    if w.fundamental_order == Some(1) {
        return Ok((rec, Err("trivial in maximal order".into())));
    }
    Ok((rec, Ok(w)))
}

fn radicand_field(t: &BigInt) -> Result<BigInt> {
    arith::squarefree_part(t)
}

fn conclude(mut cert: Certificate, m1: &BigInt, m2: &BigInt, n: u64) -> Result<Certificate> {
    let field = match biquad::subfield_triple(m1, m2) {
        Ok(f) => f,
        Err(Error::DegenerateInput(_)) => return Ok(cert.reject("not biquadratic")),
        Err(e) => return Err(e),
    };
    if !field.is_imaginary() {
        cert.field = Some(field);
        return Ok(cert.reject("not imaginary biquadratic"));
    }
    let kuroda = biquad::kuroda_class_number(&field)?;
    let verdict = biquad::verdict_from(&kuroda, n);
    cert.status = CertStatus::Accepted;
    cert.n_target = Some(n);
    cert.q_index_status = Some(kuroda.unit_index_q);
    cert.informational_only = n == 2;
    cert.refutation_candidate = verdict == Verdict::Fail && !cert.informational_only;
    cert.field = Some(field);
    cert.kuroda = Some(kuroda);
    cert.verdict = Some(verdict);
    Ok(cert)
}

fn missing_a_note(a: &BigInt) -> Option<String> {
    (!a.is_one()).then(|| {
        format!("t uses the term -d^2 s a with a = {a}; the variant -d^2 s agrees only when a = 1")
    })
}

/// Notes every certificate on the twisted curve carries.
fn curve_notes(d: &BigInt) -> Vec<String> {
    let mut out = vec![
        format!(
            "torsion cutoff {} (group order bound); element orders are at most {}",
            elliptic::TORSION_ORDER_CUTOFF,
            elliptic::MAZUR_ELEMENT_ORDER_BOUND
        ),
        "primitivity uses x^2 + a2 x + a4 evaluated on the shifted model".into(),
    ];
    if d.is_negative() {
        out.push(format!(
            "negative twist parameter d = {d}; the field is Q(sqrt({d}))"
        ));
    }
    out
}

/// Flags primes above 2^64, which are only probable primes.
fn probable_prime_notes(primes: &[&BigInt]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for p in primes {
        if arith::primality(p)? == arith::Primality::ProbablePrime {
            out.push(format!(
                "{p} is a probable prime (Baillie-PSW plus random bases)"
            ));
        }
    }
    Ok(out)
}

fn thm11_one(
    ctx: &CurveContext,
    a: &BigInt,
    b: &BigInt,
    d: &BigInt,
    p: &BigInt,
    policy: SquarefreePolicy,
) -> Result<Certificate> {
    let mut cert = Certificate::new(CertificateInputs::Thm11 {
        a: a.clone(),
        b: b.clone(),
        d: d.clone(),
        p: p.clone(),
        squarefree_policy: policy,
    });
    cert.torsion_order = Some(ctx.n);
    cert.notes.extend(curve_notes(d));
    cert.notes.extend(missing_a_note(a));
    cert.notes.extend(probable_prime_notes(&[p])?);
    let t = shifted_radicand(a, b, d, p);
    cert.radicands.push(t.clone());
    let (rec, side) = soleng_side(ctx, &t, p, policy)?;
    let squarefree = rec.squarefree;
    cert.sieve.push(rec);
    let w = match side {
        Ok(w) => w,
        Err(reason) => return Ok(cert.reject(reason)),
    };
    if squarefree != Squarefreeness::Squarefree {
        cert.notes.push(format!(
            "t kept under report policy; witness at conductor {}",
            conductor_note(&w)
        ));
    }
    cert.witnesses.push(w);
    let field_t = radicand_field(&t)?;
    conclude(cert, d, &field_t, u64::from(ctx.n))
}

fn conductor_note(w: &Witness) -> String {
    match &w.fundamental_discriminant {
        Some(d0) => arith::isqrt(&(&w.discriminant / d0)).to_string(),
        None => "> 2".into(),
    }
}

/// Worker count from the environment, if set.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| {
                Error::Config(format!(
                    "{THREADS_ENV} must be a positive integer, got {v:?}"
                ))
            }),
        Err(_) => Ok(None),
    }
}

fn worker_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let threads = match threads {
        Some(n) => Some(n),
        None => threads_from_env()?,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::Config(e.to_string()))
}

fn primes_between(lo: &BigInt, hi: &BigInt) -> Vec<BigInt> {
    if lo > hi {
        return Vec::new();
    }
    arith::primes_in_range(lo, hi)
}

pub fn thm11_search(cfg: &Thm11Config) -> Result<SearchReport> {
    thm11_search_with_threads(cfg, None)
}

/// As [`thm11_search`] with an explicit worker count.
pub fn thm11_search_with_threads(
    cfg: &Thm11Config,
    threads: Option<usize>,
) -> Result<SearchReport> {
    let Some(ctx) = curve_context(&cfg.a, &cfg.b, &cfg.d)? else {
        let mut report = SearchReport::new(Vec::new());
        report.vacuous = true;
        return Ok(report);
    };
    let primes = primes_between(&cfg.prime_lo, &cfg.prime_hi);
    let certs: Vec<Certificate> = worker_pool(threads)?.install(|| {
        primes
            .par_iter()
            .map(|p| thm11_one(&ctx, &cfg.a, &cfg.b, &cfg.d, p, cfg.squarefree_policy))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(SearchReport::new(certs))
}

fn bh_side(params: &BhParams) -> Result<std::result::Result<Witness, String>> {
    let cert = match bh::bh_certificate(params) {
        Ok(c) => c,
        Err(Error::Domain(m)) | Err(Error::DegenerateInput(m)) => {
            return Ok(Err(format!("bh: {m}")))
        }
        Err(e) => return Err(e),
    };
    let mut w = Witness {
        source: WitnessSource::Bh,
        discriminant: cert.form.discriminant(),
        form: cert.form,
        reduced: cert.reduced,
        order: cert.order,
        fundamental_discriminant: None,
        fundamental_form: None,
        fundamental_order: None,
        curve: None,
        point: None,
        bh_status: Some(cert.status),
    };
    attach_fundamental(&mut w)?;
    if cert.status == BhStatus::DegenerateWitness {
        return Ok(Err("degenerate bh witness".into()));
    }
    if w.fundamental_order == Some(1) {
        return Ok(Err("bh witness trivial in maximal order".into()));
    }
    Ok(Ok(w))
}

#[allow(clippy::too_many_arguments)]
fn thm12_one(
    ctx: &CurveContext,
    kk: &BigInt,
    l: u32,
    p: &BigInt,
    a: &BigInt,
    b: &BigInt,
    d: &BigInt,
    q: &BigInt,
    policy: SquarefreePolicy,
) -> Result<Certificate> {
    let mut cert = Certificate::new(CertificateInputs::Thm12 {
        kk: kk.clone(),
        l,
        p: p.clone(),
        a: a.clone(),
        b: b.clone(),
        d: d.clone(),
        q: q.clone(),
        squarefree_policy: policy,
    });
    cert.torsion_order = Some(ctx.n);
    cert.notes.extend(curve_notes(d));
    cert.notes.extend(missing_a_note(a));
    cert.notes.extend(probable_prime_notes(&[p, q])?);
    let t1 = kk * kk - p.pow(l);
    let t2 = shifted_radicand(a, b, d, q);
    cert.radicands = vec![t1.clone(), t2.clone()];

    let rec1 = sieve_record(&t1)?;
    let reject1 = sieve_rejection(&rec1, policy);
    cert.sieve.push(rec1);
    if let Some(reason) = reject1 {
        return Ok(cert.reject(format!("t1 {reason}")));
    }
    let (rec2, side2) = soleng_side(ctx, &t2, q, policy)?;
    cert.sieve.push(rec2);
    let w2 = match side2 {
        Ok(w) => w,
        Err(reason) => return Ok(cert.reject(format!("t2 {reason}"))),
    };

    let (m1, m2) = (radicand_field(&t1)?, radicand_field(&t2)?);
    let (gcd_check, exact_check) = biquad::linearly_disjoint(&m1, &m2)?;
    let (f1, f2) = (
        biquad::fundamental_discriminant(&m1)?,
        biquad::fundamental_discriminant(&m2)?,
    );
    let four = BigInt::from(4);
    cert.disjointness = Some(Disjointness {
        gcd_check,
        exact_check,
        fundamental_discriminants_coprime: f1.gcd(&f2).is_one(),
        both_one_mod_4: m1.mod_floor(&four).is_one() && m2.mod_floor(&four).is_one(),
    });
    if !exact_check {
        return Ok(cert.reject("not linearly disjoint"));
    }

    let w1 = match bh_side(&BhParams::new(kk.clone(), l, p.clone()))? {
        Ok(w) => w,
        Err(reason) => return Ok(cert.reject(reason)),
    };
    let n = w1.order * u64::from(ctx.n);
    cert.witnesses = vec![w1, w2];
    let n_target = u64::from(l) * u64::from(ctx.n);
    if n != n_target {
        cert.notes.push(format!(
            "bh witness order {} is below l = {l}",
            n / u64::from(ctx.n)
        ));
    }
    conclude(cert, &m1, &m2, n_target)
}

pub fn thm12_search(cfg: &Thm12Config) -> Result<SearchReport> {
    thm12_search_with_threads(cfg, None)
}

/// As [`thm12_search`] with an explicit worker count.
pub fn thm12_search_with_threads(
    cfg: &Thm12Config,
    threads: Option<usize>,
) -> Result<SearchReport> {
    if cfg.l < 3 {
        return Err(Error::Config(format!("l = {} must be at least 3", cfg.l)));
    }
    let Some(ctx) = curve_context(&cfg.a, &cfg.b, &cfg.d)? else {
        let mut report = SearchReport::new(Vec::new());
        report.vacuous = true;
        return Ok(report);
    };
    let ps = primes_between(&cfg.p_lo, &cfg.p_hi);
    let qs = primes_between(&cfg.q_lo, &cfg.q_hi);
    let pairs: Vec<(&BigInt, &BigInt)> = ps
        .iter()
        .flat_map(|p| qs.iter().map(move |q| (p, q)))
        .collect();
    let certs: Vec<Certificate> = worker_pool(threads)?.install(|| {
        pairs
            .par_iter()
            .map(|(p, q)| {
                thm12_one(
                    &ctx,
                    &cfg.kk,
                    cfg.l,
                    p,
                    &cfg.a,
                    &cfg.b,
                    &cfg.d,
                    q,
                    cfg.squarefree_policy,
                )
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(SearchReport::new(certs))
}

/// Recompute a certificate from its echoed inputs.
pub fn recompute(inputs: &CertificateInputs) -> Result<Certificate> {
    match inputs {
        CertificateInputs::Thm11 {
            a,
            b,
            d,
            p,
            squarefree_policy,
        } => {
            let ctx = curve_context(a, b, d)?
                .ok_or_else(|| Error::Config("twisted curve has trivial torsion".into()))?;
            thm11_one(&ctx, a, b, d, p, *squarefree_policy)
        }
        CertificateInputs::Thm12 {
            kk,
            l,
            p,
            a,
            b,
            d,
            q,
            squarefree_policy,
        } => {
            let ctx = curve_context(a, b, d)?
                .ok_or_else(|| Error::Config("twisted curve has trivial torsion".into()))?;
            thm12_one(&ctx, kk, *l, p, a, b, d, q, *squarefree_policy)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayOutcome {
    pub identical: bool,
    pub version_warning: Option<String>,
}

/// Recompute and compare serialized bytes. A differing tool version is
/// reported but does not by itself fail the comparison.
pub fn replay(cert: &Certificate) -> Result<ReplayOutcome> {
    let mut fresh = recompute(&cert.inputs)?;
    let version_warning = (cert.tool_version != TOOL_VERSION).then(|| {
        format!(
            "certificate written by version {}, replayed with {TOOL_VERSION}",
            cert.tool_version
        )
    });
    fresh.tool_version = cert.tool_version.clone();
    let original = serde_json::to_string(cert).map_err(|e| Error::Parse(e.to_string()))?;
    let recomputed = serde_json::to_string(&fresh).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(ReplayOutcome {
        identical: original == recomputed,
        version_warning,
    })
}
