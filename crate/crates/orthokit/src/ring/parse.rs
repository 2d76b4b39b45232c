//! Canonical printing and parsing.
//!
//! Ring specs:  `zmod:<n>` | `Q` | `poly:<base>:<var>` | `exc:<base>:[g,…]`
//! Elements:    decimal | `p/q` | `[c0,c1,…]` (coefficients, low degree
//! first) | `(r|i)` (excision pair)

use super::{ElemData, IdealDesc, RingCtx, RingElem, RingKind};
use crate::error::{Error, Result};
use num::{BigInt, BigRational, One, Zero};
use std::str::FromStr;

impl RingCtx {
    pub fn parse_ring_spec(s: &str) -> Result<RingCtx> {
        let s = s.trim();
        if s == "Q" {
            return Ok(RingCtx::rationals());
        }
        if let Some(rest) = s.strip_prefix("zmod:") {
            let n: u64 = rest
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad modulus in ring spec {s:?}")))?;
            return RingCtx::zmod(n);
        }
        if let Some(rest) = s.strip_prefix("poly:") {
            let cut = rest
                .rfind(':')
                .ok_or_else(|| Error::Parse(format!("poly spec needs a variable: {s:?}")))?;
            let base = RingCtx::parse_ring_spec(&rest[..cut])?;
            return RingCtx::poly(&base, rest[cut + 1..].trim());
        }
        if let Some(rest) = s.strip_prefix("exc:") {
            let cut = rest
                .rfind(':')
                .ok_or_else(|| Error::Parse(format!("exc spec needs an ideal: {s:?}")))?;
            let base = RingCtx::parse_ring_spec(&rest[..cut])?;
            let bracket = rest[cut + 1..].trim();
            let inner = bracket
                .strip_prefix('[')
                .and_then(|t| t.strip_suffix(']'))
                .ok_or_else(|| {
                    Error::Parse(format!("exc ideal must be a bracketed list: {bracket:?}"))
                })?;
            let mut gens = Vec::new();
            for tok in split_top(inner, ',') {
                let tok = tok.trim();
                if !tok.is_empty() {
                    gens.push(base.parse_elem(tok)?);
                }
            }
            let ideal = IdealDesc::new(&base, gens)?;
            return Ok(RingCtx::excision(&ideal));
        }
        Err(Error::Parse(format!("unknown ring spec {s:?}")))
    }

    pub fn parse_elem(&self, s: &str) -> Result<RingElem> {
        let data = parse_data(self.kind(), s.trim())?;
        Ok(RingElem::from_parts(self.id(), data))
    }

    pub fn format_elem(&self, e: &RingElem) -> Result<String> {
        self.claim(e)?;
        Ok(format_data(e.data()))
    }
}

/// Split on `sep` at bracket/paren depth zero.
pub(crate) fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (idx, c) in s.char_indices() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                parts.push(&s[start..idx]);
                start = idx + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn parse_data(kind: &RingKind, s: &str) -> Result<ElemData> {
    match kind {
        RingKind::Zmod { modulus } => {
            let v: i64 = s
                .parse()
                .map_err(|_| Error::Parse(format!("expected a residue, got {s:?}")))?;
            Ok(ElemData::Residue((v as i128).rem_euclid(*modulus as i128) as u64))
        }
        RingKind::Rationals => {
            let (num_s, den_s) = match s.split_once('/') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => (s, "1"),
            };
            let num = BigInt::from_str(num_s)
                .map_err(|_| Error::Parse(format!("bad rational numerator {num_s:?}")))?;
            let den = BigInt::from_str(den_s)
                .map_err(|_| Error::Parse(format!("bad rational denominator {den_s:?}")))?;
            if den.is_zero() {
                return Err(Error::Parse("rational denominator is zero".into()));
            }
            Ok(ElemData::Fraction(BigRational::new(num, den)))
        }
        RingKind::Poly { base, .. } => {
            if let Some(inner) = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
                let mut coeffs = Vec::new();
                for tok in split_top(inner, ',') {
                    let tok = tok.trim();
                    if tok.is_empty() {
                        return Err(Error::Parse("empty polynomial coefficient".into()));
                    }
                    coeffs.push(parse_data(base.kind(), tok)?);
                }
                while matches!(coeffs.last(), Some(c) if super::is_zero_data(c)) {
                    coeffs.pop();
                }
                Ok(ElemData::Poly(coeffs))
            } else {
                // bare scalar as a constant polynomial
                let c = parse_data(base.kind(), s)?;
                let coeffs = if super::is_zero_data(&c) { vec![] } else { vec![c] };
                Ok(ElemData::Poly(coeffs))
            }
        }
        RingKind::Excision { base, ideal } => {
            let inner = s
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("expected a pair (r|i), got {s:?}")))?;
            let parts = split_top(inner, '|');
            if parts.len() != 2 {
                return Err(Error::Parse(format!("expected a pair (r|i), got {s:?}")));
            }
            let r = parse_data(base.kind(), parts[0].trim())?;
            let i = parse_data(base.kind(), parts[1].trim())?;
            let i_elem = RingElem::from_parts(base.id(), i.clone());
            if !ideal.contains(&i_elem)? {
                return Err(Error::Invalid(format!(
                    "second component {} lies outside the ideal {}",
                    format_data(&i),
                    ideal.spec()
                )));
            }
            Ok(ElemData::Pair(Box::new(super::PairData { r, i, wit: None })))
        }
    }
}

pub(crate) fn format_data(data: &ElemData) -> String {
    match data {
        ElemData::Residue(x) => x.to_string(),
        ElemData::Fraction(q) => {
            if q.denom().is_one() {
                q.numer().to_string()
            } else {
                format!("{}/{}", q.numer(), q.denom())
            }
        }
        ElemData::Poly(cs) => {
            if cs.is_empty() {
                "[0]".to_string()
            } else {
                let parts: Vec<String> = cs.iter().map(format_data).collect();
                format!("[{}]", parts.join(","))
            }
        }
        ElemData::Pair(p) => format!("({}|{})", format_data(&p.r), format_data(&p.i)),
    }
}
