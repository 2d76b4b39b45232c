//! JSON encoding of generator words.
//!
//! A word is an array of letter objects.  Each letter names a generator kind
//! plus its parameters, with ring elements and matrices in their text forms:
//!
//! ```json
//! [
//!   {"kind": "oe", "i": 1, "j": 2, "z": "4"},
//!   {"kind": "f3", "i": 1, "j": 2, "z": "[0,1]"},
//!   {"kind": "e",  "hom": "3;6"},
//!   {"kind": "e*", "hom": "0;3", "exp": -1}
//! ]
//! ```
//!
//! Optional fields on any letter: `"exp"` (1 or -1, default 1) and `"conj"`
//! (a nested word; the letter is then conjugated by that word's product).

use crate::dser::{Direction, Gen, HomMap, Letter, Word};
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::quadmod::QuadSpace;
use serde_json::{json, Map, Value};

pub fn parse_word(space: &QuadSpace, v: &Value) -> Result<Word> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("a word must be a JSON array of letters".into()))?;
    let mut letters = Vec::with_capacity(arr.len());
    for item in arr {
        letters.push(parse_letter(space, item)?);
    }
    Word::from_letters(space, letters)
}

fn parse_letter(space: &QuadSpace, v: &Value) -> Result<Letter> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse(format!("a letter must be a JSON object, got {v}")))?;
    let exp = match obj.get("exp") {
        None => 1,
        Some(e) => match e.as_i64() {
            Some(1) => 1,
            Some(-1) => -1,
            _ => return Err(Error::Parse(format!("letter exponent must be 1 or -1, got {e}"))),
        },
    };
    let mut gen = parse_gen(space, obj)?;
    if let Some(c) = obj.get("conj") {
        let conj = parse_word(space, c)?;
        gen = Gen::Conjugate { conj: Box::new(conj), inner: Box::new(gen) };
    }
    Ok(Letter { gen, exp })
}

fn parse_gen(space: &QuadSpace, obj: &Map<String, Value>) -> Result<Gen> {
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse("letter is missing a string \"kind\" field".into()))?;
    let ctx = space.ctx();
    let index = |field: &str| -> Result<usize> {
        obj.get(field)
            .and_then(Value::as_u64)
            .map(|x| x as usize)
            .ok_or_else(|| Error::Parse(format!("letter kind {kind:?} needs an integer \"{field}\" field")))
    };
    let elem = |field: &str| -> Result<crate::ring::RingElem> {
        let s = obj
            .get(field)
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse(format!("letter kind {kind:?} needs a string \"{field}\" field")))?;
        ctx.parse_elem(s)
    };
    match kind {
        "e" | "e*" => {
            let hom_s = obj
                .get("hom")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Parse(format!("letter kind {kind:?} needs a string \"hom\" field")))?;
            let mat = Mat::parse(ctx, hom_s)?;
            let dir = if kind == "e" { Direction::QtoP } else { Direction::QtoPstar };
            let hom = HomMap::new(space, dir, mat)?;
            Ok(if kind == "e" { Gen::E(hom) } else { Gen::Estar(hom) })
        }
        "oe" => Ok(Gen::Oe { i: index("i")?, j: index("j")?, z: elem("z")? }),
        "f1" | "f2" => {
            let k = kind.as_bytes()[1] - b'0';
            Ok(Gen::F { kind: k, i: index("i")?, j: None, z: elem("z")? })
        }
        "f3" | "f4" | "f5" => {
            let k = kind.as_bytes()[1] - b'0';
            Ok(Gen::F { kind: k, i: index("i")?, j: Some(index("j")?), z: elem("z")? })
        }
        "refl" => {
            let v_s = obj
                .get("v")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Parse("letter kind \"refl\" needs a string \"v\" field".into()))?;
            Ok(Gen::Reflection(Mat::parse(ctx, v_s)?))
        }
        other => Err(Error::Parse(format!(
            "unknown letter kind {other:?} (expected oe, f1..f5, e, e*, refl)"
        ))),
    }
}

pub fn format_word(word: &Word) -> Value {
    Value::Array(word.letters().iter().map(format_letter).collect())
}

fn format_letter(letter: &Letter) -> Value {
    // Peel nested conjugations into a single conjugator word: the letter
    // grammar carries at most one "conj" field per letter.
    let mut conj_letters: Vec<Value> = Vec::new();
    let mut inner = &letter.gen;
    while let Gen::Conjugate { conj, inner: g } = inner {
        conj_letters.extend(conj.letters().iter().map(format_letter));
        inner = g;
    }
    let mut obj = match inner {
        Gen::E(h) => json!({"kind": "e", "hom": h.mat().format()}),
        Gen::Estar(h) => json!({"kind": "e*", "hom": h.mat().format()}),
        Gen::Oe { i, j, z } => {
            json!({"kind": "oe", "i": i, "j": j, "z": crate::ring::format_data(z.data())})
        }
        Gen::F { kind, i, j, z } => {
            let mut m = Map::new();
            m.insert("kind".into(), Value::String(format!("f{kind}")));
            m.insert("i".into(), json!(i));
            if let Some(j) = j {
                m.insert("j".into(), json!(j));
            }
            m.insert("z".into(), Value::String(crate::ring::format_data(z.data())));
            Value::Object(m)
        }
        Gen::Reflection(v) => json!({"kind": "refl", "v": v.format()}),
        Gen::Conjugate { .. } => unreachable!("peeled above"),
    };
    let map = obj.as_object_mut().expect("letters are objects");
    if !conj_letters.is_empty() {
        map.insert("conj".into(), Value::Array(conj_letters));
    }
    if letter.exp != 1 {
        map.insert("exp".into(), json!(letter.exp));
    }
    obj
}
