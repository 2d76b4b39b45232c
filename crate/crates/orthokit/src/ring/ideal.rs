//! Finitely generated ideals with decidable membership where the ring is
//! small enough to enumerate, plus ideal enumeration, maximality testing,
//! and ⊕-splitness analysis inside excision rings.

use super::{RingCtx, RingElem, RingKind};
use crate::error::{Error, Result};
use std::collections::HashSet;
use std::sync::Arc;

/// Rings up to this many elements support ideal closures and membership by
/// exhaustion.
pub const IDEAL_RING_LIMIT: u64 = 4096;
/// Full ideal enumeration does quadratic closure work; keep the ring small.
pub const IDEAL_ENUM_LIMIT: u64 = 512;

#[derive(Clone, Debug)]
enum Mode {
    /// Element list materialized; membership by lookup.
    Finite,
    /// Every generator is zero.
    Zero,
    /// Some generator is a unit; the ideal is the whole ring.
    Unit,
    /// Ideal of an excision ring of the shape 0 ⊕ J; membership delegates to
    /// the base-ring ideal J.
    ZeroPart(IdealDesc),
    /// Ring too large to exhaust: membership is only certified by witnesses
    /// carried on excision pairs, so `contains` refuses nonzero queries.
    Witness,
}

#[derive(Debug)]
struct IdealInner {
    ctx: RingCtx,
    gens: Vec<RingElem>,
    mode: Mode,
    /// Sorted by canonical bytes when materialized.
    elems: Option<Vec<RingElem>>,
    spec: String,
}

/// A finitely generated ideal of a `RingCtx`. Cheap to clone.
#[derive(Clone, Debug)]
pub struct IdealDesc(Arc<IdealInner>);

impl PartialEq for IdealDesc {
    fn eq(&self, other: &Self) -> bool {
        if self.0.ctx != other.0.ctx {
            return false;
        }
        match (&self.0.elems, &other.0.elems) {
            (Some(a), Some(b)) => a == b,
            _ => self.0.spec == other.0.spec,
        }
    }
}
impl Eq for IdealDesc {}

impl IdealDesc {
    pub fn new(ctx: &RingCtx, gens: Vec<RingElem>) -> Result<Self> {
        for g in &gens {
            ctx.claim(g)?;
        }
        let spec = if gens.is_empty() {
            "[0]".to_string()
        } else {
            let parts: Result<Vec<String>> = gens.iter().map(|g| ctx.format_elem(g)).collect();
            format!("[{}]", parts?.join(","))
        };

        let (mode, elems) = if gens.iter().all(|g| ctx.is_zero(g)) {
            (Mode::Zero, Some(vec![ctx.zero()]))
        } else if gens.iter().any(|g| ctx.inverse(g).map(|i| i.is_some()).unwrap_or(false)) {
            let elems = match ctx.size() {
                Some(n) if n <= IDEAL_RING_LIMIT => Some(sorted(ctx.enumerate().unwrap())),
                _ => None,
            };
            (Mode::Unit, elems)
        } else if matches!(ctx.size(), Some(n) if n <= IDEAL_RING_LIMIT) {
            let closure = ideal_closure(ctx, &gens)?;
            (Mode::Finite, Some(closure))
        } else if let Some(inner) = zero_part_shape(ctx, &gens)? {
            (Mode::ZeroPart(inner), None)
        } else {
            (Mode::Witness, None)
        };

        Ok(IdealDesc(Arc::new(IdealInner { ctx: ctx.clone(), gens, mode, elems, spec })))
    }

    pub fn ctx(&self) -> &RingCtx {
        &self.0.ctx
    }
    pub fn gens(&self) -> &[RingElem] {
        &self.0.gens
    }
    /// Canonical bracketed generator list, e.g. `[3]`.
    pub fn spec(&self) -> &str {
        &self.0.spec
    }
    pub fn elements(&self) -> Option<&[RingElem]> {
        self.0.elems.as_deref()
    }
    pub fn element_count(&self) -> Option<usize> {
        match &self.0.mode {
            Mode::Zero => Some(1),
            Mode::Unit => self.0.ctx.size().map(|n| n as usize),
            Mode::Finite => self.0.elems.as_ref().map(|e| e.len()),
            Mode::ZeroPart(inner) => inner.element_count(),
            Mode::Witness => None,
        }
    }
    /// True when membership cannot be decided and excision pairs over this
    /// ideal must be built from explicit generator combinations.
    pub fn needs_witness(&self) -> bool {
        matches!(self.0.mode, Mode::Witness)
    }
    pub fn is_zero_ideal(&self) -> bool {
        match &self.0.mode {
            Mode::Zero => true,
            Mode::Finite => self.0.elems.as_ref().map(|e| e.len() == 1).unwrap_or(false),
            _ => false,
        }
    }
    pub fn is_unit_ideal(&self) -> bool {
        match &self.0.mode {
            Mode::Unit => true,
            Mode::Finite => match (self.0.elems.as_ref(), self.0.ctx.size()) {
                (Some(e), Some(n)) => e.len() as u64 == n,
                _ => false,
            },
            _ => false,
        }
    }

    pub fn contains(&self, e: &RingElem) -> Result<bool> {
        self.0.ctx.claim(e)?;
        match &self.0.mode {
            Mode::Zero => Ok(self.0.ctx.is_zero(e)),
            Mode::Unit => Ok(true),
            Mode::Finite => {
                let elems = self.0.elems.as_ref().expect("materialized");
                let target = e.canonical_bytes();
                Ok(elems.binary_search_by(|p| p.canonical_bytes().cmp(&target)).is_ok())
            }
            Mode::ZeroPart(inner) => {
                let (r, i) = self.0.ctx.excision_parts(e)?;
                Ok(inner.ctx().is_zero(&r) && inner.contains(&i)?)
            }
            Mode::Witness => {
                if self.0.ctx.is_zero(e) {
                    Ok(true)
                } else {
                    Err(Error::WitnessRequired)
                }
            }
        }
    }
}

fn sorted(mut v: Vec<RingElem>) -> Vec<RingElem> {
    v.sort_by_cached_key(|e| e.canonical_bytes());
    v
}

/// Detects generator sets of the shape {(0, g)} inside an excision ring and
/// returns the base-ring ideal generated by the g's.
fn zero_part_shape(ctx: &RingCtx, gens: &[RingElem]) -> Result<Option<IdealDesc>> {
    let RingKind::Excision { base, .. } = ctx.kind() else {
        return Ok(None);
    };
    let mut inner_gens = Vec::new();
    for g in gens {
        let (r, i) = ctx.excision_parts(g)?;
        if !base.is_zero(&r) {
            return Ok(None);
        }
        inner_gens.push(i);
    }
    Ok(Some(IdealDesc::new(base, inner_gens)?))
}

/// All elements of the ideal generated by `gens`, sorted by canonical bytes.
/// The ideal is the additive closure of the multiples r·g.
pub(crate) fn ideal_closure(ctx: &RingCtx, gens: &[RingElem]) -> Result<Vec<RingElem>> {
    let n = ctx
        .size()
        .ok_or_else(|| Error::Unsupported("ideal closure needs a finite ring".into()))?;
    if n > IDEAL_RING_LIMIT {
        return Err(Error::CapExceeded { cap: IDEAL_RING_LIMIT as usize, reached: n as usize });
    }
    let all = ctx.enumerate().expect("within enumeration limit");

    let mut mult_seen: HashSet<Vec<u8>> = HashSet::new();
    let mut multiples: Vec<RingElem> = Vec::new();
    for g in gens {
        for r in &all {
            let m = ctx.mul(r, g)?;
            if mult_seen.insert(m.canonical_bytes()) {
                multiples.push(m);
            }
        }
    }

    let zero = ctx.zero();
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    seen.insert(zero.canonical_bytes());
    let mut queue = vec![zero];
    let mut out = Vec::new();
    while let Some(s) = queue.pop() {
        for p in &multiples {
            let t = ctx.add(&s, p)?;
            if seen.insert(t.canonical_bytes()) {
                queue.push(t.clone());
            }
        }
        out.push(s);
    }
    Ok(sorted(out))
}

fn set_key(elems: &[RingElem]) -> Vec<u8> {
    let mut k = Vec::new();
    for e in elems {
        let b = e.canonical_bytes();
        k.extend((b.len() as u32).to_le_bytes());
        k.extend(b);
    }
    k
}

/// The sum {a + b : a ∈ A, b ∈ B} of two ideals given by element lists; this
/// is already an ideal, so no further closure is needed.
fn sum_sets(ctx: &RingCtx, a: &[RingElem], b: &[RingElem]) -> Result<Vec<RingElem>> {
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut out = Vec::new();
    for x in a {
        for y in b {
            let s = ctx.add(x, y)?;
            if seen.insert(s.canonical_bytes()) {
                out.push(s);
            }
        }
    }
    Ok(sorted(out))
}

/// A small generating set for an ideal given by its element list: a single
/// generator when one exists, otherwise a greedy ascent in canonical order.
fn minimal_gens(ctx: &RingCtx, elems: &[RingElem]) -> Result<Vec<RingElem>> {
    if elems.len() == 1 {
        return Ok(vec![ctx.zero()]);
    }
    for e in elems {
        if ctx.is_zero(e) {
            continue;
        }
        if ideal_closure(ctx, std::slice::from_ref(e))?.len() == elems.len() {
            return Ok(vec![e.clone()]);
        }
    }
    let mut gens: Vec<RingElem> = Vec::new();
    let mut have: HashSet<Vec<u8>> = HashSet::new();
    have.insert(ctx.zero().canonical_bytes());
    for e in elems {
        if have.contains(&e.canonical_bytes()) {
            continue;
        }
        gens.push(e.clone());
        have = ideal_closure(ctx, &gens)?.iter().map(|x| x.canonical_bytes()).collect();
        if have.len() == elems.len() {
            break;
        }
    }
    Ok(gens)
}

/// Every ideal of a small finite ring: principal ideals first, then joins
/// until the lattice closes. Sorted by (cardinality, canonical element list).
pub fn enumerate_ideals(ctx: &RingCtx) -> Result<Vec<IdealDesc>> {
    let n = ctx
        .size()
        .ok_or_else(|| Error::Unsupported("ideal enumeration needs a finite ring".into()))?;
    if n > IDEAL_ENUM_LIMIT {
        return Err(Error::CapExceeded { cap: IDEAL_ENUM_LIMIT as usize, reached: n as usize });
    }
    let all = ctx.enumerate().expect("within enumeration limit");

    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut sets: Vec<Vec<RingElem>> = Vec::new();
    for e in &all {
        let c = ideal_closure(ctx, std::slice::from_ref(e))?;
        if seen.insert(set_key(&c)) {
            sets.push(c);
        }
    }
    loop {
        let mut added = false;
        let cur = sets.clone();
        for a in &cur {
            for b in &cur {
                if a.len() == 1 || b.len() == 1 {
                    continue;
                }
                let j = sum_sets(ctx, a, b)?;
                if seen.insert(set_key(&j)) {
                    sets.push(j);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }

    let mut out = Vec::new();
    for elems in sets {
        let gens = minimal_gens(ctx, &elems)?;
        out.push(IdealDesc::new(ctx, gens)?);
    }
    out.sort_by_cached_key(|i| {
        let e = i.elements().expect("finite");
        (e.len(), set_key(e))
    });
    Ok(out)
}

/// Maximality test. Fast paths: the unit ideal is never maximal; the zero
/// ideal of a field always is. Otherwise the ring must be enumerable and we
/// check that adjoining any outside element generates everything.
pub fn is_maximal_ideal(ideal: &IdealDesc) -> Result<bool> {
    let ctx = ideal.ctx();
    if ideal.is_unit_ideal() {
        return Ok(false);
    }
    if ideal.is_zero_ideal() && ctx.is_field() {
        return Ok(true);
    }
    let elems = ideal
        .elements()
        .ok_or_else(|| Error::Unsupported("maximality test needs an enumerable ideal".into()))?;
    let n = ctx
        .size()
        .ok_or_else(|| Error::Unsupported("maximality test needs a finite ring".into()))?;
    let member: HashSet<Vec<u8>> = elems.iter().map(|e| e.canonical_bytes()).collect();
    let all = ctx.enumerate().ok_or_else(|| {
        Error::CapExceeded { cap: IDEAL_RING_LIMIT as usize, reached: n as usize }
    })?;
    for x in &all {
        if member.contains(&x.canonical_bytes()) {
            continue;
        }
        let mut gens = ideal.gens().to_vec();
        gens.push(x.clone());
        if (ideal_closure(ctx, &gens)?.len() as u64) < n {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether an ideal of an excision ring R⊕I is of the split shape J ⊕ I₁.
/// With K ⊆ J × I₁ always true for the componentwise images, splitness is
/// exactly |J|·|I₁| = |K|.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitReport {
    pub split: bool,
    pub r_count: usize,
    pub i_count: usize,
    pub size: usize,
}

pub fn split_form(ideal: &IdealDesc) -> Result<SplitReport> {
    let ctx = ideal.ctx();
    if !matches!(ctx.kind(), RingKind::Excision { .. }) {
        return Err(Error::Invalid("split analysis needs an excision-ring ideal".into()));
    }
    let elems = ideal
        .elements()
        .ok_or_else(|| Error::Unsupported("split analysis needs an enumerable ideal".into()))?;
    let mut rs: HashSet<Vec<u8>> = HashSet::new();
    let mut is: HashSet<Vec<u8>> = HashSet::new();
    for e in elems {
        let (r, i) = ctx.excision_parts(e)?;
        rs.insert(r.canonical_bytes());
        is.insert(i.canonical_bytes());
    }
    Ok(SplitReport {
        split: rs.len() * is.len() == elems.len(),
        r_count: rs.len(),
        i_count: is.len(),
        size: elems.len(),
    })
}

/// The ideal 0 ⊕ I of the excision ring R ⊕ I.
pub fn zero_part_ideal(exc: &RingCtx) -> Result<IdealDesc> {
    let RingKind::Excision { base, ideal } = exc.kind() else {
        return Err(Error::Invalid("zero-part ideal needs an excision context".into()));
    };
    let zero = base.zero();
    let mut gens = Vec::new();
    for (k, g) in ideal.gens().iter().enumerate() {
        let p = if ideal.needs_witness() {
            let mut coeffs = vec![base.zero(); ideal.gens().len()];
            coeffs[k] = base.one();
            exc.pair_with_witness(&zero, &coeffs)?
        } else {
            exc.pair(&zero, g)?
        };
        gens.push(p);
    }
    if gens.is_empty() {
        gens.push(exc.zero());
    }
    IdealDesc::new(exc, gens)
}

/// The ideal J ⊕ I of the excision ring R ⊕ I, for J an ideal of R.
pub fn oplus_ideal(exc: &RingCtx, j: &IdealDesc) -> Result<IdealDesc> {
    let RingKind::Excision { base, .. } = exc.kind() else {
        return Err(Error::Invalid("oplus ideal needs an excision context".into()));
    };
    if j.ctx() != base {
        return Err(Error::CtxMismatch);
    }
    let mut gens = Vec::new();
    for g in j.gens() {
        gens.push(exc.excision_embed(g)?);
    }
    gens.extend(zero_part_ideal(exc)?.gens().iter().cloned());
    IdealDesc::new(exc, gens)
}
