//! Coefficient rings with 2 invertible: residue rings Z/n (odd n ≥ 3), the
//! rationals, dense univariate polynomials over another context, and excision
//! rings R⊕I with the twisted product
//!     (r₁,i₁)·(r₂,i₂) = (r₁r₂, r₁i₂ + r₂i₁ + i₁i₂).
//!
//! A `RingCtx` owns all arithmetic; elements carry the id of their context and
//! are kept in canonical form, so equality is structural.

mod ideal;
mod parse;

pub use ideal::{
    enumerate_ideals, is_maximal_ideal, oplus_ideal, split_form, zero_part_ideal, IdealDesc,
    SplitReport,
};
pub(crate) use parse::{format_data, split_top};

use crate::error::{Error, Result};
use num::{BigInt, BigRational, One, Zero};
use std::sync::Arc;

/// Rings where enumeration is considered tractable; larger finite rings are
/// treated like infinite ones for membership purposes.
pub const ENUM_LIMIT: u64 = 1 << 16;

#[derive(Debug)]
pub enum RingKind {
    Zmod { modulus: u64 },
    Rationals,
    Poly { base: RingCtx, var: String },
    Excision { base: RingCtx, ideal: IdealDesc },
}

#[derive(Debug)]
struct CtxInner {
    kind: RingKind,
    spec: String,
    id: u64,
    inv2: ElemData,
}

/// Shared, immutable ring context. Cheap to clone; equality is by canonical
/// spec string (two contexts built from the same description are the same).
#[derive(Clone, Debug)]
pub struct RingCtx(Arc<CtxInner>);

impl PartialEq for RingCtx {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}
impl Eq for RingCtx {}

/// Element payload. `Poly` coefficients are base-ring payloads with no
/// trailing zeros; `Pair` is an excision pair (r, i) whose optional witness
/// expresses i as a combination over the ideal's generators (never part of
/// equality).
#[derive(Clone, Debug)]
pub enum ElemData {
    Residue(u64),
    Fraction(BigRational),
    Poly(Vec<ElemData>),
    Pair(Box<PairData>),
}

#[derive(Clone, Debug)]
pub struct PairData {
    pub r: ElemData,
    pub i: ElemData,
    pub wit: Option<Vec<ElemData>>,
}

impl PartialEq for ElemData {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ElemData::Residue(a), ElemData::Residue(b)) => a == b,
            (ElemData::Fraction(a), ElemData::Fraction(b)) => a == b,
            (ElemData::Poly(a), ElemData::Poly(b)) => a == b,
            (ElemData::Pair(a), ElemData::Pair(b)) => a.r == b.r && a.i == b.i,
            _ => false,
        }
    }
}
impl Eq for ElemData {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingElem {
    ctx_id: u64,
    data: ElemData,
}

impl RingElem {
    pub fn ctx_id(&self) -> u64 {
        self.ctx_id
    }
    pub(crate) fn data(&self) -> &ElemData {
        &self.data
    }
    pub(crate) fn from_parts(ctx_id: u64, data: ElemData) -> Self {
        RingElem { ctx_id, data }
    }
    /// Stable byte encoding of the canonical form; used for hashing and for
    /// deterministic orderings. Witnesses are excluded.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        push_canonical(&self.data, &mut out);
        out
    }
}

pub(crate) fn push_canonical(data: &ElemData, out: &mut Vec<u8>) {
    match data {
        ElemData::Residue(x) => {
            out.push(1);
            out.extend(x.to_le_bytes());
        }
        ElemData::Fraction(q) => {
            out.push(2);
            push_bigint(q.numer(), out);
            push_bigint(q.denom(), out);
        }
        ElemData::Poly(cs) => {
            out.push(3);
            out.extend((cs.len() as u32).to_le_bytes());
            for c in cs {
                push_canonical(c, out);
            }
        }
        ElemData::Pair(p) => {
            out.push(4);
            push_canonical(&p.r, out);
            push_canonical(&p.i, out);
        }
    }
}

fn push_bigint(x: &BigInt, out: &mut Vec<u8>) {
    let (sign, mag) = x.to_bytes_le();
    out.push(match sign {
        num::bigint::Sign::Minus => 0,
        num::bigint::Sign::NoSign => 1,
        num::bigint::Sign::Plus => 2,
    });
    out.extend((mag.len() as u32).to_le_bytes());
    out.extend(mag);
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

impl RingCtx {
    pub fn zmod(n: u64) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidModulus(n));
        }
        Ok(Self::build(
            RingKind::Zmod { modulus: n },
            format!("zmod:{n}"),
            ElemData::Residue((n + 1) / 2),
        ))
    }

    pub fn rationals() -> Self {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        Self::build(RingKind::Rationals, "Q".to_string(), ElemData::Fraction(half))
    }

    pub fn poly(base: &RingCtx, var: &str) -> Result<Self> {
        if var.is_empty() || !var.chars().all(|c| c.is_ascii_alphabetic()) || var == "Q" {
            return Err(Error::Parse(format!("invalid polynomial variable {var:?}")));
        }
        let inv2 = ElemData::Poly(vec![base.0.inv2.clone()]);
        Ok(Self::build(
            RingKind::Poly { base: base.clone(), var: var.to_string() },
            format!("poly:{}:{}", base.spec(), var),
            inv2,
        ))
    }

    pub fn excision(ideal: &IdealDesc) -> Self {
        let base = ideal.ctx().clone();
        let inv2 = ElemData::Pair(Box::new(PairData {
            r: base.0.inv2.clone(),
            i: base.zero_data(),
            wit: None,
        }));
        let spec = format!("exc:{}:{}", base.spec(), ideal.spec());
        Self::build(RingKind::Excision { base, ideal: ideal.clone() }, spec, inv2)
    }

    fn build(kind: RingKind, spec: String, inv2: ElemData) -> Self {
        let id = fnv1a(spec.as_bytes());
        RingCtx(Arc::new(CtxInner { kind, spec, id, inv2 }))
    }

    pub fn kind(&self) -> &RingKind {
        &self.0.kind
    }
    pub fn spec(&self) -> &str {
        &self.0.spec
    }
    pub fn id(&self) -> u64 {
        self.0.id
    }

    fn wrap(&self, data: ElemData) -> RingElem {
        RingElem { ctx_id: self.0.id, data }
    }

    pub(crate) fn claim(&self, e: &RingElem) -> Result<()> {
        if e.ctx_id == self.0.id {
            Ok(())
        } else {
            Err(Error::CtxMismatch)
        }
    }

    pub(crate) fn zero_data(&self) -> ElemData {
        zero_data(&self.0.kind)
    }
    pub(crate) fn one_data(&self) -> ElemData {
        one_data(&self.0.kind)
    }

    pub fn zero(&self) -> RingElem {
        self.wrap(self.zero_data())
    }
    pub fn one(&self) -> RingElem {
        self.wrap(self.one_data())
    }
    /// The cached inverse of 2; exists in every valid context.
    pub fn inv2(&self) -> RingElem {
        self.wrap(self.0.inv2.clone())
    }

    pub fn from_i64(&self, x: i64) -> RingElem {
        self.wrap(from_i64_data(&self.0.kind, x))
    }

    /// num · den⁻¹ in this ring; errors when den is not a unit.
    pub fn fraction(&self, num: i64, den: i64) -> Result<RingElem> {
        let d = self.from_i64(den);
        let inv = self
            .inverse(&d)?
            .ok_or_else(|| Error::Invalid(format!("{den} is not a unit in {}", self.spec())))?;
        self.mul(&self.from_i64(num), &inv)
    }

    /// The value of a rational element.
    pub fn fraction_value(&self, e: &RingElem) -> Result<BigRational> {
        self.claim(e)?;
        match &e.data {
            ElemData::Fraction(v) => Ok(v.clone()),
            _ => Err(Error::Invalid("not a rational element".into())),
        }
    }

    pub fn from_fraction(&self, v: &BigRational) -> Result<RingElem> {
        if !matches!(self.0.kind, RingKind::Rationals) {
            return Err(Error::Invalid("not the rational context".into()));
        }
        Ok(self.wrap(ElemData::Fraction(v.clone())))
    }

    pub fn add(&self, a: &RingElem, b: &RingElem) -> Result<RingElem> {
        self.claim(a)?;
        self.claim(b)?;
        Ok(self.wrap(add_data(&self.0.kind, &a.data, &b.data)))
    }
    pub fn sub(&self, a: &RingElem, b: &RingElem) -> Result<RingElem> {
        self.claim(a)?;
        self.claim(b)?;
        Ok(self.wrap(sub_data(&self.0.kind, &a.data, &b.data)))
    }
    pub fn mul(&self, a: &RingElem, b: &RingElem) -> Result<RingElem> {
        self.claim(a)?;
        self.claim(b)?;
        Ok(self.wrap(mul_data(&self.0.kind, &a.data, &b.data)))
    }
    pub fn neg(&self, a: &RingElem) -> Result<RingElem> {
        self.claim(a)?;
        Ok(self.wrap(neg_data(&self.0.kind, &a.data)))
    }
    pub fn pow(&self, a: &RingElem, e: u32) -> Result<RingElem> {
        self.claim(a)?;
        Ok(self.wrap(pow_data(&self.0.kind, &a.data, e)))
    }

    pub fn is_zero(&self, a: &RingElem) -> bool {
        is_zero_data(&a.data)
    }
    pub fn is_one(&self, a: &RingElem) -> bool {
        a.data == self.one_data()
    }

    /// Multiplicative inverse, or None when `a` is not a unit.
    pub fn inverse(&self, a: &RingElem) -> Result<Option<RingElem>> {
        self.claim(a)?;
        Ok(inverse_data(&self.0.kind, &a.data).map(|d| self.wrap(d)))
    }
    pub fn is_unit(&self, a: &RingElem) -> Result<bool> {
        Ok(self.inverse(a)?.is_some())
    }
    pub fn is_nilpotent(&self, a: &RingElem) -> Result<bool> {
        self.claim(a)?;
        Ok(is_nilpotent_data(&self.0.kind, &a.data))
    }

    pub fn size(&self) -> Option<u64> {
        size_of_kind(&self.0.kind)
    }
    pub fn is_finite(&self) -> bool {
        self.size().is_some()
    }

    /// All elements in canonical order, when the ring is small enough to
    /// materialize.
    pub fn enumerate(&self) -> Option<Vec<RingElem>> {
        let n = self.size()?;
        if n > ENUM_LIMIT {
            return None;
        }
        Some(enumerate_kind(&self.0.kind).into_iter().map(|d| self.wrap(d)).collect())
    }

    pub fn is_field(&self) -> bool {
        match &self.0.kind {
            RingKind::Zmod { modulus } => is_prime(*modulus),
            RingKind::Rationals => true,
            _ => false,
        }
    }

    /// Build a polynomial from coefficients over the base context.
    pub fn poly_from_coeffs(&self, coeffs: &[RingElem]) -> Result<RingElem> {
        let RingKind::Poly { base, .. } = &self.0.kind else {
            return Err(Error::Invalid("not a polynomial context".into()));
        };
        let mut data = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            base.claim(c)?;
            data.push(c.data.clone());
        }
        Ok(self.wrap(trim_poly(data)))
    }

    /// The variable of a polynomial context as an element.
    pub fn var_elem(&self) -> Result<RingElem> {
        let RingKind::Poly { base, .. } = &self.0.kind else {
            return Err(Error::Invalid("not a polynomial context".into()));
        };
        Ok(self.wrap(ElemData::Poly(vec![base.zero_data(), base.one_data()])))
    }

    pub fn poly_eval(&self, f: &RingElem, at: &RingElem) -> Result<RingElem> {
        self.claim(f)?;
        let RingKind::Poly { base, .. } = &self.0.kind else {
            return Err(Error::Invalid("not a polynomial context".into()));
        };
        base.claim(at)?;
        let ElemData::Poly(cs) = &f.data else {
            return Err(Error::Internal("polynomial payload expected".into()));
        };
        let mut acc = base.zero_data();
        for c in cs.iter().rev() {
            acc = add_data(base.kind(), &mul_data(base.kind(), &acc, &at.data), c);
        }
        Ok(RingElem { ctx_id: base.id(), data: acc })
    }

    /// Excision pair (r, i); membership of i in the ideal must be decidable.
    pub fn pair(&self, r: &RingElem, i: &RingElem) -> Result<RingElem> {
        let RingKind::Excision { base, ideal } = &self.0.kind else {
            return Err(Error::Invalid("not an excision context".into()));
        };
        base.claim(r)?;
        base.claim(i)?;
        if !ideal.contains(i)? {
            return Err(Error::Invalid(format!(
                "second component {} lies outside the ideal {}",
                base.format_elem(i).unwrap_or_default(),
                ideal.spec()
            )));
        }
        Ok(self.wrap(ElemData::Pair(Box::new(PairData {
            r: r.data.clone(),
            i: i.data.clone(),
            wit: None,
        }))))
    }

    /// Excision pair whose i-component is the combination Σ coeffs[k]·gens[k];
    /// the combination is kept as a membership witness.
    pub fn pair_with_witness(&self, r: &RingElem, coeffs: &[RingElem]) -> Result<RingElem> {
        let RingKind::Excision { base, ideal } = &self.0.kind else {
            return Err(Error::Invalid("not an excision context".into()));
        };
        base.claim(r)?;
        if coeffs.len() != ideal.gens().len() {
            return Err(Error::Shape(format!(
                "expected {} witness coefficients, got {}",
                ideal.gens().len(),
                coeffs.len()
            )));
        }
        let mut i = base.zero_data();
        for (c, g) in coeffs.iter().zip(ideal.gens()) {
            base.claim(c)?;
            i = add_data(base.kind(), &i, &mul_data(base.kind(), &c.data, g.data()));
        }
        let wit = Some(coeffs.iter().map(|c| c.data.clone()).collect());
        Ok(self.wrap(ElemData::Pair(Box::new(PairData { r: r.data.clone(), i, wit }))))
    }

    /// The canonical embedding r ↦ (r, 0) of the base into the excision ring.
    pub fn excision_embed(&self, r: &RingElem) -> Result<RingElem> {
        let RingKind::Excision { base, ideal } = &self.0.kind else {
            return Err(Error::Invalid("not an excision context".into()));
        };
        base.claim(r)?;
        let wit = if ideal.needs_witness() {
            Some(vec![base.zero_data(); ideal.gens().len()])
        } else {
            None
        };
        Ok(self.wrap(ElemData::Pair(Box::new(PairData {
            r: r.data.clone(),
            i: base.zero_data(),
            wit,
        }))))
    }

    /// The fold homomorphism f(r, i) = r + i onto the base ring.
    pub fn excision_project(&self, e: &RingElem) -> Result<RingElem> {
        let (base, p) = self.pair_parts(e)?;
        Ok(RingElem { ctx_id: base.id(), data: add_data(base.kind(), &p.r, &p.i) })
    }

    /// Componentwise access: (r, i) as base-ring elements.
    pub fn excision_parts(&self, e: &RingElem) -> Result<(RingElem, RingElem)> {
        let (base, p) = self.pair_parts(e)?;
        Ok((
            RingElem { ctx_id: base.id(), data: p.r.clone() },
            RingElem { ctx_id: base.id(), data: p.i.clone() },
        ))
    }

    /// (r, i) ↦ (r, 0); splits the quotient by 0⊕I.
    pub fn excision_retract(&self, e: &RingElem) -> Result<RingElem> {
        let (base, p) = self.pair_parts(e)?;
        let RingKind::Excision { ideal, .. } = &self.0.kind else { unreachable!() };
        let wit = if ideal.needs_witness() {
            Some(vec![base.zero_data(); ideal.gens().len()])
        } else {
            None
        };
        Ok(self.wrap(ElemData::Pair(Box::new(PairData {
            r: p.r.clone(),
            i: base.zero_data(),
            wit,
        }))))
    }

    fn pair_parts<'a>(&self, e: &'a RingElem) -> Result<(&RingCtx, &'a PairData)> {
        let RingKind::Excision { base, .. } = &self.0.kind else {
            return Err(Error::Invalid("not an excision context".into()));
        };
        self.claim(e)?;
        let ElemData::Pair(p) = &e.data else {
            return Err(Error::Internal("pair payload expected".into()));
        };
        Ok((base, p))
    }

    /// Seeded random element; the distribution is fixed so suites are
    /// reproducible byte-for-byte.
    pub fn sample<R: rand::Rng>(&self, rng: &mut R) -> RingElem {
        self.wrap(sample_data(&self.0.kind, rng))
    }
}

fn zero_data(kind: &RingKind) -> ElemData {
    match kind {
        RingKind::Zmod { .. } => ElemData::Residue(0),
        RingKind::Rationals => ElemData::Fraction(BigRational::zero()),
        RingKind::Poly { .. } => ElemData::Poly(Vec::new()),
        RingKind::Excision { base, .. } => ElemData::Pair(Box::new(PairData {
            r: base.zero_data(),
            i: base.zero_data(),
            wit: None,
        })),
    }
}

fn one_data(kind: &RingKind) -> ElemData {
    match kind {
        RingKind::Zmod { .. } => ElemData::Residue(1),
        RingKind::Rationals => ElemData::Fraction(BigRational::one()),
        RingKind::Poly { base, .. } => ElemData::Poly(vec![base.one_data()]),
        RingKind::Excision { base, .. } => ElemData::Pair(Box::new(PairData {
            r: base.one_data(),
            i: base.zero_data(),
            wit: None,
        })),
    }
}

fn from_i64_data(kind: &RingKind, x: i64) -> ElemData {
    match kind {
        RingKind::Zmod { modulus } => {
            ElemData::Residue((x as i128).rem_euclid(*modulus as i128) as u64)
        }
        RingKind::Rationals => ElemData::Fraction(BigRational::from(BigInt::from(x))),
        RingKind::Poly { base, .. } => trim_poly(vec![from_i64_data(base.kind(), x)]),
        RingKind::Excision { base, .. } => ElemData::Pair(Box::new(PairData {
            r: from_i64_data(base.kind(), x),
            i: base.zero_data(),
            wit: None,
        })),
    }
}

pub(crate) fn is_zero_data(a: &ElemData) -> bool {
    match a {
        ElemData::Residue(x) => *x == 0,
        ElemData::Fraction(q) => q.is_zero(),
        ElemData::Poly(cs) => cs.is_empty(),
        ElemData::Pair(p) => is_zero_data(&p.r) && is_zero_data(&p.i),
    }
}

fn trim_poly(mut cs: Vec<ElemData>) -> ElemData {
    while matches!(cs.last(), Some(c) if is_zero_data(c)) {
        cs.pop();
    }
    ElemData::Poly(cs)
}

fn payload_panic(kind: &RingKind) -> ! {
    panic!("payload does not match ring kind {kind:?}")
}

pub(crate) fn add_data(kind: &RingKind, a: &ElemData, b: &ElemData) -> ElemData {
    match (kind, a, b) {
        (RingKind::Zmod { modulus }, ElemData::Residue(x), ElemData::Residue(y)) => {
            ElemData::Residue(((*x as u128 + *y as u128) % *modulus as u128) as u64)
        }
        (RingKind::Rationals, ElemData::Fraction(x), ElemData::Fraction(y)) => {
            ElemData::Fraction(x + y)
        }
        (RingKind::Poly { base, .. }, ElemData::Poly(xs), ElemData::Poly(ys)) => {
            let n = xs.len().max(ys.len());
            let bz = base.zero_data();
            let mut out = Vec::with_capacity(n);
            for t in 0..n {
                out.push(add_data(
                    base.kind(),
                    xs.get(t).unwrap_or(&bz),
                    ys.get(t).unwrap_or(&bz),
                ));
            }
            trim_poly(out)
        }
        (RingKind::Excision { base, .. }, ElemData::Pair(p), ElemData::Pair(q)) => {
            let bk = base.kind();
            let wit = match (&p.wit, &q.wit) {
                (Some(u), Some(v)) => {
                    Some(u.iter().zip(v).map(|(x, y)| add_data(bk, x, y)).collect())
                }
                _ => None,
            };
            ElemData::Pair(Box::new(PairData {
                r: add_data(bk, &p.r, &q.r),
                i: add_data(bk, &p.i, &q.i),
                wit,
            }))
        }
        _ => payload_panic(kind),
    }
}

pub(crate) fn neg_data(kind: &RingKind, a: &ElemData) -> ElemData {
    match (kind, a) {
        (RingKind::Zmod { modulus }, ElemData::Residue(x)) => {
            ElemData::Residue(if *x == 0 { 0 } else { modulus - x })
        }
        (RingKind::Rationals, ElemData::Fraction(x)) => ElemData::Fraction(-x),
        (RingKind::Poly { base, .. }, ElemData::Poly(xs)) => {
            ElemData::Poly(xs.iter().map(|c| neg_data(base.kind(), c)).collect())
        }
        (RingKind::Excision { base, .. }, ElemData::Pair(p)) => {
            let bk = base.kind();
            ElemData::Pair(Box::new(PairData {
                r: neg_data(bk, &p.r),
                i: neg_data(bk, &p.i),
                wit: p.wit.as_ref().map(|w| w.iter().map(|c| neg_data(bk, c)).collect()),
            }))
        }
        _ => payload_panic(kind),
    }
}

pub(crate) fn sub_data(kind: &RingKind, a: &ElemData, b: &ElemData) -> ElemData {
    add_data(kind, a, &neg_data(kind, b))
}

pub(crate) fn mul_data(kind: &RingKind, a: &ElemData, b: &ElemData) -> ElemData {
    match (kind, a, b) {
        (RingKind::Zmod { modulus }, ElemData::Residue(x), ElemData::Residue(y)) => {
            ElemData::Residue(((*x as u128 * *y as u128) % *modulus as u128) as u64)
        }
        (RingKind::Rationals, ElemData::Fraction(x), ElemData::Fraction(y)) => {
            ElemData::Fraction(x * y)
        }
        (RingKind::Poly { base, .. }, ElemData::Poly(xs), ElemData::Poly(ys)) => {
            if xs.is_empty() || ys.is_empty() {
                return ElemData::Poly(Vec::new());
            }
            let bk = base.kind();
            let mut out = vec![base.zero_data(); xs.len() + ys.len() - 1];
            for (s, x) in xs.iter().enumerate() {
                for (t, y) in ys.iter().enumerate() {
                    out[s + t] = add_data(bk, &out[s + t], &mul_data(bk, x, y));
                }
            }
            trim_poly(out)
        }
        (RingKind::Excision { base, .. }, ElemData::Pair(p), ElemData::Pair(q)) => {
            let bk = base.kind();
            let r = mul_data(bk, &p.r, &q.r);
            let i = add_data(
                bk,
                &add_data(bk, &mul_data(bk, &p.r, &q.i), &mul_data(bk, &q.r, &p.i)),
                &mul_data(bk, &p.i, &q.i),
            );
            // witness for r₁i₂ + r₂i₁ + i₁i₂: fold i₁ into the second witness
            let wit = match (&p.wit, &q.wit) {
                (Some(u), Some(v)) => Some(
                    u.iter()
                        .zip(v)
                        .map(|(wu, wv)| {
                            let t1 = mul_data(bk, &p.r, wv);
                            let t2 = mul_data(bk, &q.r, wu);
                            let t3 = mul_data(bk, &p.i, wv);
                            add_data(bk, &add_data(bk, &t1, &t2), &t3)
                        })
                        .collect(),
                ),
                _ => None,
            };
            ElemData::Pair(Box::new(PairData { r, i, wit }))
        }
        _ => payload_panic(kind),
    }
}

pub(crate) fn pow_data(kind: &RingKind, a: &ElemData, e: u32) -> ElemData {
    let mut acc = one_data(kind);
    let mut base = a.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_data(kind, &acc, &base);
        }
        base = mul_data(kind, &base, &base);
        e >>= 1;
    }
    acc
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = egcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

pub(crate) fn inverse_data(kind: &RingKind, a: &ElemData) -> Option<ElemData> {
    match (kind, a) {
        (RingKind::Zmod { modulus }, ElemData::Residue(x)) => {
            let (g, inv, _) = egcd(*x as i128, *modulus as i128);
            if g == 1 {
                Some(ElemData::Residue(inv.rem_euclid(*modulus as i128) as u64))
            } else {
                None
            }
        }
        (RingKind::Rationals, ElemData::Fraction(q)) => {
            if q.is_zero() {
                None
            } else {
                Some(ElemData::Fraction(q.recip()))
            }
        }
        (RingKind::Poly { base, .. }, ElemData::Poly(cs)) => {
            // unit iff the constant term is a unit and every higher
            // coefficient is nilpotent; invert by a finite Neumann series
            let bk = base.kind();
            let c0 = cs.first()?;
            let u0 = inverse_data(bk, c0)?;
            if !cs.iter().skip(1).all(|c| is_nilpotent_data(bk, c)) {
                return None;
            }
            let u0p = ElemData::Poly(vec![u0.clone()]);
            let g = sub_data(kind, &one_data(kind), &mul_data(kind, &u0p, a));
            let mut acc = one_data(kind);
            let mut term = g.clone();
            let mut steps = 0;
            while !is_zero_data(&term) {
                acc = add_data(kind, &acc, &term);
                term = mul_data(kind, &term, &g);
                steps += 1;
                if steps > 256 {
                    return None;
                }
            }
            Some(mul_data(kind, &u0p, &acc))
        }
        (RingKind::Excision { base, .. }, ElemData::Pair(p)) => {
            // (r, i) is a unit iff r and r+i are units: invert through the
            // embedding (r, i) ↦ (r, r+i) into base × base
            let bk = base.kind();
            let rinv = inverse_data(bk, &p.r)?;
            let sinv = inverse_data(bk, &add_data(bk, &p.r, &p.i))?;
            let inew = sub_data(bk, &sinv, &rinv);
            let scale = neg_data(bk, &mul_data(bk, &rinv, &sinv));
            let wit = p
                .wit
                .as_ref()
                .map(|w| w.iter().map(|c| mul_data(bk, c, &scale)).collect());
            Some(ElemData::Pair(Box::new(PairData { r: rinv, i: inew, wit })))
        }
        _ => payload_panic(kind),
    }
}

pub(crate) fn is_nilpotent_data(kind: &RingKind, a: &ElemData) -> bool {
    match (kind, a) {
        (RingKind::Zmod { .. }, ElemData::Residue(_)) => {
            // x^64 covers every prime multiplicity of a u64 modulus
            is_zero_data(&pow_data(kind, a, 64))
        }
        (RingKind::Rationals, ElemData::Fraction(q)) => q.is_zero(),
        (RingKind::Poly { base, .. }, ElemData::Poly(cs)) => {
            cs.iter().all(|c| is_nilpotent_data(base.kind(), c))
        }
        (RingKind::Excision { base, .. }, ElemData::Pair(p)) => {
            let bk = base.kind();
            is_nilpotent_data(bk, &p.r) && is_nilpotent_data(bk, &add_data(bk, &p.r, &p.i))
        }
        _ => payload_panic(kind),
    }
}

fn size_of_kind(kind: &RingKind) -> Option<u64> {
    match kind {
        RingKind::Zmod { modulus } => Some(*modulus),
        RingKind::Rationals | RingKind::Poly { .. } => None,
        RingKind::Excision { base, ideal } => {
            Some(base.size()?.checked_mul(ideal.element_count()? as u64)?)
        }
    }
}

fn enumerate_kind(kind: &RingKind) -> Vec<ElemData> {
    match kind {
        RingKind::Zmod { modulus } => (0..*modulus).map(ElemData::Residue).collect(),
        RingKind::Excision { base, ideal } => {
            let rs = enumerate_kind(base.kind());
            let is: Vec<ElemData> =
                ideal.elements().expect("finite ideal").iter().map(|e| e.data().clone()).collect();
            let mut out = Vec::with_capacity(rs.len() * is.len());
            for r in &rs {
                for i in &is {
                    out.push(ElemData::Pair(Box::new(PairData {
                        r: r.clone(),
                        i: i.clone(),
                        wit: None,
                    })));
                }
            }
            out
        }
        _ => panic!("enumerate called on an infinite ring"),
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn sample_data<R: rand::Rng>(kind: &RingKind, rng: &mut R) -> ElemData {
    match kind {
        RingKind::Zmod { modulus } => ElemData::Residue(rng.gen_range(0..*modulus)),
        RingKind::Rationals => {
            let num = BigInt::from(rng.gen_range(-12i64..=12));
            let den = BigInt::from(rng.gen_range(1i64..=9));
            ElemData::Fraction(BigRational::new(num, den))
        }
        RingKind::Poly { base, .. } => {
            let deg = rng.gen_range(0..=2);
            let cs = (0..=deg).map(|_| sample_data(base.kind(), rng)).collect();
            trim_poly(cs)
        }
        RingKind::Excision { base, ideal } => {
            let bk = base.kind();
            let r = sample_data(bk, rng);
            let coeffs: Vec<ElemData> =
                ideal.gens().iter().map(|_| sample_data(bk, rng)).collect();
            let mut i = base.zero_data();
            for (c, g) in coeffs.iter().zip(ideal.gens()) {
                i = add_data(bk, &i, &mul_data(bk, c, g.data()));
            }
            let wit = if ideal.needs_witness() { Some(coeffs) } else { None };
            ElemData::Pair(Box::new(PairData { r, i, wit }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z9() -> RingCtx {
        RingCtx::zmod(9).unwrap()
    }

    fn exc_z9_3() -> RingCtx {
        let z9 = z9();
        let ideal = IdealDesc::new(&z9, vec![z9.from_i64(3)]).unwrap();
        RingCtx::excision(&ideal)
    }

    #[test]
    fn modulus_must_be_odd_and_at_least_three() {
        assert!(RingCtx::zmod(9).is_ok());
        assert!(matches!(RingCtx::zmod(6), Err(Error::InvalidModulus(6))));
        assert!(matches!(RingCtx::zmod(1), Err(Error::InvalidModulus(1))));
    }

    #[test]
    fn zmod_arith_matches_modular_reduction() {
        let r = z9();
        let five = r.from_i64(5);
        let seven = r.from_i64(7);
        assert_eq!(r.add(&five, &seven).unwrap(), r.from_i64(3));
        assert_eq!(r.inverse(&r.from_i64(2)).unwrap(), Some(r.from_i64(5)));
        assert_eq!(r.inverse(&r.from_i64(3)).unwrap(), None);
        assert_eq!(r.inverse(&r.one()).unwrap(), Some(r.one()));
        assert!(r.is_one(&r.mul(&r.inv2(), &r.from_i64(2)).unwrap()));
    }

    #[test]
    fn excision_product_follows_the_twisted_formula() {
        // over Q with unit ideal the product is unreduced: (2,3)·(1,4) = (2,23)
        let q = RingCtx::rationals();
        let ideal = IdealDesc::new(&q, vec![q.one()]).unwrap();
        let e = RingCtx::excision(&ideal);
        let a = e.pair(&q.from_i64(2), &q.from_i64(3)).unwrap();
        let b = e.pair(&q.from_i64(1), &q.from_i64(4)).unwrap();
        let ab = e.mul(&a, &b).unwrap();
        let (r, i) = e.excision_parts(&ab).unwrap();
        assert_eq!(r, q.from_i64(2));
        assert_eq!(i, q.from_i64(23));
    }

    #[test]
    fn excision_project_is_a_ring_homomorphism() {
        let e = exc_z9_3();
        let z9 = z9();
        let a = e.pair(&z9.from_i64(2), &z9.from_i64(3)).unwrap();
        assert_eq!(e.excision_project(&a).unwrap(), z9.from_i64(5));
        let b = e.pair(&z9.from_i64(4), &z9.from_i64(6)).unwrap();
        let lhs = e.excision_project(&e.mul(&a, &b).unwrap()).unwrap();
        let rhs = z9
            .mul(&e.excision_project(&a).unwrap(), &e.excision_project(&b).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, z9.from_i64(5));
        assert_eq!(e.excision_project(&e.one()).unwrap(), z9.one());
    }

    #[test]
    fn excision_units_match_exhaustive_search() {
        let e = exc_z9_3();
        let z9 = z9();
        let all = e.enumerate().unwrap();
        assert_eq!(all.len(), 27);
        for a in &all {
            let (r, i) = e.excision_parts(a).unwrap();
            let expected = z9.is_unit(&r).unwrap() && z9.is_unit(&z9.add(&r, &i).unwrap()).unwrap();
            match e.inverse(a).unwrap() {
                Some(inv) => {
                    assert!(expected);
                    assert!(e.is_one(&e.mul(a, &inv).unwrap()));
                }
                None => assert!(!expected),
            }
        }
    }

    #[test]
    fn pair_requires_ideal_membership() {
        let e = exc_z9_3();
        let z9 = z9();
        assert!(e.pair(&z9.from_i64(1), &z9.from_i64(6)).is_ok());
        assert!(e.pair(&z9.from_i64(1), &z9.from_i64(2)).is_err());
    }

    #[test]
    fn poly_units_include_nilpotent_tails() {
        let z9 = z9();
        let p = RingCtx::poly(&z9, "X").unwrap();
        // 1 + 3X is a unit mod 9: (1+3X)(1+6X) = 1 + 9X + 18X² = 1
        let f = p.poly_from_coeffs(&[z9.one(), z9.from_i64(3)]).unwrap();
        let inv = p.inverse(&f).unwrap().expect("unit");
        assert!(p.is_one(&p.mul(&f, &inv).unwrap()));
        assert_eq!(inv, p.poly_from_coeffs(&[z9.one(), z9.from_i64(6)]).unwrap());
        // over a field base only unit constants invert
        let z3 = RingCtx::zmod(3).unwrap();
        let p3 = RingCtx::poly(&z3, "X").unwrap();
        let g = p3.poly_from_coeffs(&[z3.one(), z3.one()]).unwrap();
        assert_eq!(p3.inverse(&g).unwrap(), None);
    }

    #[test]
    fn poly_eval_is_a_homomorphism_instance() {
        let z3 = RingCtx::zmod(3).unwrap();
        let p = RingCtx::poly(&z3, "X").unwrap();
        let f = p.poly_from_coeffs(&[z3.from_i64(2), z3.one(), z3.one()]).unwrap();
        // f(1) = 2 + 1 + 1 = 4 = 1 mod 3
        assert_eq!(p.poly_eval(&f, &z3.one()).unwrap(), z3.one());
    }

    #[test]
    fn ctx_mismatch_is_rejected() {
        let a = RingCtx::zmod(9).unwrap();
        let b = RingCtx::zmod(7).unwrap();
        assert!(matches!(a.add(&a.one(), &b.one()), Err(Error::CtxMismatch)));
    }

    #[test]
    fn spec_strings_are_canonical() {
        let z9 = z9();
        assert_eq!(z9.spec(), "zmod:9");
        assert_eq!(RingCtx::rationals().spec(), "Q");
        assert_eq!(RingCtx::poly(&z9, "X").unwrap().spec(), "poly:zmod:9:X");
        assert_eq!(exc_z9_3().spec(), "exc:zmod:9:[3]");
    }

    proptest! {
        #[test]
        fn zmod9_ring_axioms(a in 0u64..9, b in 0u64..9, c in 0u64..9) {
            let r = z9();
            let (a, b, c) = (r.from_i64(a as i64), r.from_i64(b as i64), r.from_i64(c as i64));
            let ab_c = r.mul(&r.mul(&a, &b).unwrap(), &c).unwrap();
            let a_bc = r.mul(&a, &r.mul(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            let lhs = r.mul(&a, &r.add(&b, &c).unwrap()).unwrap();
            let rhs = r.add(&r.mul(&a, &b).unwrap(), &r.mul(&a, &c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn rational_sub_then_add_round_trips(p in -50i64..50, q in 1i64..20, s in -50i64..50) {
            let r = RingCtx::rationals();
            let a = r.fraction(p, q).unwrap();
            let b = r.from_i64(s);
            let back = r.add(&r.sub(&a, &b).unwrap(), &b).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
