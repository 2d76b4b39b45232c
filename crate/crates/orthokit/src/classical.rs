//! Classical elementary orthogonal generators for the standard split forms:
//! the even-case oe_ij(z) family and the odd-case five-family F generators,
//! together with their exact commutator relations and the translation into
//! hyperbolic transvection words.
//!
//! Index conventions are 1-based to match the generator formulas: in even
//! rank 2n the pairs are (1,2),(3,4),…; in odd rank 2n+1 coordinate 1 is the
//! diagonal-2 coordinate and the pairs are (2i, 2i+1).

use crate::dser::{Direction, Gen, HomMap, Letter, Word};
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::quadmod::QuadSpace;
use crate::ring::{RingCtx, RingElem};

/// The even-case pair swap on 1-based indices: 2i ↔ 2i−1.
pub fn pair_swap_index(idx: usize) -> usize {
    if idx % 2 == 0 {
        idx - 1
    } else {
        idx + 1
    }
}

fn add_at(m: &mut Mat, i: usize, j: usize, z: &RingElem) -> Result<()> {
    let cur = m.get(i, j);
    m.set(i, j, &m.ctx().add(&cur, z)?)
}

fn sub_at(m: &mut Mat, i: usize, j: usize, z: &RingElem) -> Result<()> {
    let cur = m.get(i, j);
    m.set(i, j, &m.ctx().sub(&cur, z)?)
}

/// oe_ij(z) = I + z·e_ij − z·e_{σ(j)σ(i)} on 2·pairs coordinates, σ the pair
/// swap. Additive in z; orthogonal for the even standard form; det 1.
pub fn oe(ctx: &RingCtx, pairs: usize, i: usize, j: usize, z: &RingElem) -> Result<Mat> {
    let dim = 2 * pairs;
    if pairs == 0 || i < 1 || j < 1 || i > dim || j > dim {
        return Err(Error::Shape(format!("oe index ({i},{j}) out of range for {dim} coordinates")));
    }
    if i == j {
        return Err(Error::Invalid("oe needs two distinct indices".into()));
    }
    ctx.claim(z)?;
    let mut m = Mat::identity(ctx, dim);
    add_at(&mut m, i - 1, j - 1, z)?;
    sub_at(&mut m, pair_swap_index(j) - 1, pair_swap_index(i) - 1, z)?;
    Ok(m)
}

/// The five odd-case generator families on 2·pairs+1 coordinates.
///
/// 1: I + e_{1,2i+1}(z) − e_{2i,1}(2z) − e_{2i,2i+1}(z²)
/// 2: I + e_{1,2i}(z)  − e_{2i+1,1}(2z) − e_{2i+1,2i}(z²)
/// 3: I + e_{2i,2j}(z)   − e_{2j+1,2i+1}(z)
/// 4: I + e_{2i,2j+1}(z) − e_{2j,2i+1}(z)
/// 5: I + e_{2i+1,2j}(z) − e_{2j+1,2i}(z)
pub fn f_gen(
    ctx: &RingCtx,
    pairs: usize,
    kind: u8,
    i: usize,
    j: Option<usize>,
    z: &RingElem,
) -> Result<Mat> {
    if pairs == 0 || i < 1 || i > pairs {
        return Err(Error::Shape(format!("index i={i} out of range for {pairs} pairs")));
    }
    let j = match kind {
        1 | 2 => {
            if j.is_some() {
                return Err(Error::Invalid(format!("family {kind} takes a single index")));
            }
            0
        }
        3 | 4 | 5 => {
            let j = j.ok_or_else(|| {
                Error::Invalid(format!("family {kind} needs a second index"))
            })?;
            if j < 1 || j > pairs {
                return Err(Error::Shape(format!("index j={j} out of range for {pairs} pairs")));
            }
            if j == i {
                return Err(Error::Invalid("families 3-5 need distinct indices".into()));
            }
            j
        }
        _ => return Err(Error::Invalid(format!("unknown generator family {kind}"))),
    };
    ctx.claim(z)?;
    let dim = 2 * pairs + 1;
    let mut m = Mat::identity(ctx, dim);
    let two_z = ctx.add(z, z)?;
    let z_sq = ctx.mul(z, z)?;
    match kind {
        1 => {
            add_at(&mut m, 0, 2 * i, z)?;
            sub_at(&mut m, 2 * i - 1, 0, &two_z)?;
            sub_at(&mut m, 2 * i - 1, 2 * i, &z_sq)?;
        }
        2 => {
            add_at(&mut m, 0, 2 * i - 1, z)?;
            sub_at(&mut m, 2 * i, 0, &two_z)?;
            sub_at(&mut m, 2 * i, 2 * i - 1, &z_sq)?;
        }
        3 => {
            add_at(&mut m, 2 * i - 1, 2 * j - 1, z)?;
            sub_at(&mut m, 2 * j, 2 * i, z)?;
        }
        4 => {
            add_at(&mut m, 2 * i - 1, 2 * j, z)?;
            sub_at(&mut m, 2 * j - 1, 2 * i, z)?;
        }
        5 => {
            add_at(&mut m, 2 * i, 2 * j - 1, z)?;
            sub_at(&mut m, 2 * j, 2 * i - 1, z)?;
        }
        _ => unreachable!(),
    }
    Ok(m)
}

#[derive(Clone, Debug)]
pub struct FRelationFailure {
    pub family: u8,
    pub i: usize,
    pub j: usize,
    pub z: String,
}

#[derive(Clone, Debug)]
pub struct FRelationReport {
    pub checked: usize,
    pub failures: Vec<FRelationFailure>,
}

impl FRelationReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exact commutator expressions for the mixed families, checked on a sample
/// grid. With [A,B] = ABA⁻¹B⁻¹:
///
///   F³ᵢⱼ(z) = [Fᵢ¹(−z/2), Fⱼ²(1)]
///   F⁴ᵢⱼ(z) = [Fⱼ¹(z/2),  Fᵢ¹(1)]
///   F⁵ᵢⱼ(z) = [Fⱼ²(z/2),  Fᵢ²(1)]
///
/// These are polynomial identities with integer coefficients, so holding on
/// a grid over one ring is evidence for the formula shape, and they hold
/// over every commutative ring with 2 invertible.
pub fn check_f_relations(
    ctx: &RingCtx,
    pairs: usize,
    samples: &[RingElem],
) -> Result<FRelationReport> {
    if pairs < 2 {
        return Err(Error::Shape("relation check needs at least two pairs".into()));
    }
    let one = ctx.one();
    let mut report = FRelationReport { checked: 0, failures: Vec::new() };
    // [A, B] with both factors given by closed-form inverses
    let comm = |a: &Mat, a_inv: &Mat, b: &Mat, b_inv: &Mat| -> Result<Mat> {
        a.mul(b)?.mul(a_inv)?.mul(b_inv)
    };
    for i in 1..=pairs {
        for j in 1..=pairs {
            if i == j {
                continue;
            }
            for z in samples {
                ctx.claim(z)?;
                let half = ctx.mul(&ctx.inv2(), z)?;
                let neg_half = ctx.neg(&half)?;

                let cases: [(u8, Mat, (u8, usize, Option<usize>, RingElem), (u8, usize, Option<usize>, RingElem)); 3] = [
                    (
                        3,
                        f_gen(ctx, pairs, 3, i, Some(j), z)?,
                        (1, i, None, neg_half.clone()),
                        (2, j, None, one.clone()),
                    ),
                    (
                        4,
                        f_gen(ctx, pairs, 4, i, Some(j), z)?,
                        (1, j, None, half.clone()),
                        (1, i, None, one.clone()),
                    ),
                    (
                        5,
                        f_gen(ctx, pairs, 5, i, Some(j), z)?,
                        (2, j, None, half.clone()),
                        (2, i, None, one.clone()),
                    ),
                ];
                for (family, lhs, (ka, ia, ja, za), (kb, ib, jb, zb)) in cases {
                    let a = f_gen(ctx, pairs, ka, ia, ja, &za)?;
                    let a_inv = f_gen(ctx, pairs, ka, ia, ja, &ctx.neg(&za)?)?;
                    let b = f_gen(ctx, pairs, kb, ib, jb, &zb)?;
                    let b_inv = f_gen(ctx, pairs, kb, ib, jb, &ctx.neg(&zb)?)?;
                    let rhs = comm(&a, &a_inv, &b, &b_inv)?;
                    report.checked += 1;
                    if lhs != rhs {
                        report.failures.push(FRelationFailure {
                            family,
                            i,
                            j,
                            z: ctx.format_elem(z)?,
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Translate a family-1 or family-2 generator into a single hyperbolic
/// transvection letter: Fᵢ¹(λ) is E with the map −2λ·e_{i,1} into P, and
/// Fᵢ²(λ) is the mirror transvection into P*. The matrix equality is checked
/// before returning.
pub fn to_dser(space: &QuadSpace, kind: u8, i: usize, lambda: &RingElem) -> Result<Word> {
    if kind != 1 && kind != 2 {
        return Err(Error::Unsupported(
            "only the first two families translate to single transvections".into(),
        ));
    }
    let ctx = space.ctx().clone();
    ctx.claim(lambda)?;
    let m = space.hyp_rank();
    if space.q_rank() != 1 || space.q_gram().get(0, 0) != ctx.from_i64(2) {
        return Err(Error::Invalid(
            "translation needs the odd standard form diag(2) ⊥ hyperbolic".into(),
        ));
    }
    if i < 1 || i > m {
        return Err(Error::Shape(format!("index i={i} out of range for {m} pairs")));
    }
    let coeff = ctx.neg(&ctx.mul(&ctx.from_i64(2), lambda)?)?;
    let mut hom_mat = Mat::zero(&ctx, m, 1);
    hom_mat.set(i - 1, 0, &coeff)?;
    let (dir, make): (Direction, fn(HomMap) -> Gen) = if kind == 1 {
        (Direction::QtoP, Gen::E)
    } else {
        (Direction::QtoPstar, Gen::Estar)
    };
    let hom = HomMap::new(space, dir, hom_mat)?;
    let word = Word::from_letters(space, vec![Letter { gen: make(hom), exp: 1 }])?;
    let classical = f_gen(&ctx, m, kind, i, None, lambda)?;
    if word.eval()? != classical {
        return Err(Error::Internal("transvection translation mismatch".into()));
    }
    Ok(word)
}

/// Every odd-case generator with a nonzero parameter over a finite ring:
/// families 1 and 2 for each pair index, families 3–5 for each ordered pair
/// of distinct indices.
pub fn f_all_gens(ctx: &RingCtx, pairs: usize) -> Result<Vec<Mat>> {
    let elems = ctx
        .enumerate()
        .ok_or_else(|| Error::Unsupported("generator sweep needs a small finite ring".into()))?;
    let mut out = Vec::new();
    for z in elems.iter().filter(|z| !ctx.is_zero(z)) {
        for i in 1..=pairs {
            out.push(f_gen(ctx, pairs, 1, i, None, z)?);
            out.push(f_gen(ctx, pairs, 2, i, None, z)?);
            for j in 1..=pairs {
                if i == j {
                    continue;
                }
                for kind in 3u8..=5 {
                    out.push(f_gen(ctx, pairs, kind, i, Some(j), z)?);
                }
            }
        }
    }
    Ok(out)
}
