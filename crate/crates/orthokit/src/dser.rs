//! Elementary hyperbolic transvections E_α and E*_β on M = Q ⊥ ℍ(R)^m,
//! generator words and their closed-form inverses, the half-splitting
//! identity, conjugated relative generators, excision lifts, and the
//! relative normal form.
//!
//! Internally the transvections are assembled in block coordinates
//! (z | x | f) — Q-part, then all x_k, then all f_k — and re-interleaved
//! into the stored layout (z, x₁, f₁, x₂, f₂, …) at the boundary.

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::quadmod::QuadSpace;
use crate::ring::{zero_part_ideal, IdealDesc, RingCtx, RingElem, RingKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// α: Q → P, the transvection E_α.
    QtoP,
    /// β: Q → P*, the mirror transvection E*_β.
    QtoPstar,
}

/// A module map Q → P (or Q → P*) as a concrete m×n matrix: rows indexed by
/// hyperbolic pairs, columns by Q-coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomMap {
    direction: Direction,
    mat: Mat,
}

impl HomMap {
    pub fn new(space: &QuadSpace, direction: Direction, mat: Mat) -> Result<HomMap> {
        space.ctx().claim_mat(&mat)?;
        if mat.rows() != space.hyp_rank() || mat.cols() != space.q_rank() {
            return Err(Error::Shape(format!(
                "hom map must be {}x{}, got {}x{}",
                space.hyp_rank(),
                space.q_rank(),
                mat.rows(),
                mat.cols()
            )));
        }
        Ok(HomMap { direction, mat })
    }

    pub fn zero(space: &QuadSpace, direction: Direction) -> HomMap {
        HomMap {
            direction,
            mat: Mat::zero(space.ctx(), space.hyp_rank(), space.q_rank()),
        }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }
    pub fn mat(&self) -> &Mat {
        &self.mat
    }
    pub fn is_zero(&self) -> bool {
        self.mat.is_zero()
    }

    pub fn add(&self, other: &HomMap) -> Result<HomMap> {
        if self.direction != other.direction {
            return Err(Error::Invalid("cannot add maps with different targets".into()));
        }
        Ok(HomMap { direction: self.direction, mat: self.mat.add(&other.mat)? })
    }

    pub fn neg(&self) -> HomMap {
        HomMap { direction: self.direction, mat: self.mat.neg() }
    }

    pub fn scale(&self, s: &RingElem) -> Result<HomMap> {
        Ok(HomMap { direction: self.direction, mat: self.mat.scale(s)? })
    }

    /// Multiply by 2⁻¹; always possible in a valid context.
    pub fn half(&self) -> HomMap {
        let inv2 = self.mat.ctx().inv2();
        self.scale(&inv2).expect("same ctx")
    }

    pub fn entries_in(&self, ideal: &IdealDesc) -> Result<bool> {
        for i in 0..self.mat.rows() {
            for j in 0..self.mat.cols() {
                if !ideal.contains(&self.mat.get(i, j))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// α* = G_Q⁻¹ · αᵀ, the adjoint of a hom map with respect to the Q-part
/// bilinear form. An n×m matrix.
pub fn alpha_star(space: &QuadSpace, hom: &HomMap) -> Result<Mat> {
    space.ctx().claim_mat(hom.mat())?;
    let gq = space.q_gram();
    let inv = gq.inverse()?.ok_or(Error::NotInvertible)?;
    inv.mul(&hom.mat().transpose())
}

/// Stored coordinate for block coordinate `s` in (z | x | f) order.
fn stored_index(space: &QuadSpace, s: usize) -> usize {
    let n = space.q_rank();
    let m = space.hyp_rank();
    if s < n {
        s
    } else if s < n + m {
        space.x_index(s - n)
    } else {
        space.f_index(s - n - m)
    }
}

fn interleave(space: &QuadSpace, block: &Mat) -> Mat {
    let dim = space.dim();
    let mut out = Mat::zero(space.ctx(), dim, dim);
    for a in 0..dim {
        let ia = stored_index(space, a);
        for b in 0..dim {
            out.set(ia, stored_index(space, b), &block.get(a, b)).expect("same ctx");
        }
    }
    out
}

fn place_block(target: &mut Mat, row0: usize, col0: usize, block: &Mat) {
    for i in 0..block.rows() {
        for j in 0..block.cols() {
            target.set(row0 + i, col0 + j, &block.get(i, j)).expect("same ctx");
        }
    }
}

/// E_α: (z, x, f) ↦ (z − α*f, x + αz − 2⁻¹αα*f, f).
pub fn e_alpha(space: &QuadSpace, hom: &HomMap) -> Result<Mat> {
    if hom.direction() != Direction::QtoP {
        return Err(Error::Invalid("E takes a map into P".into()));
    }
    elementary_matrix(space, hom)
}

/// E*_β: (z, x, f) ↦ (z − β*x, x, βz − 2⁻¹ββ*x + f).
pub fn e_beta_star(space: &QuadSpace, hom: &HomMap) -> Result<Mat> {
    if hom.direction() != Direction::QtoPstar {
        return Err(Error::Invalid("E* takes a map into P*".into()));
    }
    elementary_matrix(space, hom)
}

fn elementary_matrix(space: &QuadSpace, hom: &HomMap) -> Result<Mat> {
    let ctx = space.ctx();
    ctx.claim_mat(hom.mat())?;
    let n = space.q_rank();
    let m = space.hyp_rank();
    if m == 0 {
        return Err(Error::Shape("transvections need at least one hyperbolic pair".into()));
    }
    if hom.mat().rows() != m || hom.mat().cols() != n {
        return Err(Error::Shape(format!(
            "hom map must be {}x{}, got {}x{}",
            m,
            n,
            hom.mat().rows(),
            hom.mat().cols()
        )));
    }
    let a = hom.mat();
    let astar = alpha_star(space, hom)?;
    let neg_inv2 = ctx.neg(&ctx.inv2())?;
    let quad = a.mul(&astar)?.scale(&neg_inv2)?; // −½·A·A*

    let dim = n + 2 * m;
    let mut block = Mat::identity(ctx, dim);
    match hom.direction() {
        Direction::QtoP => {
            // rows: z | x | f — α acts on z into x, α* pulls f back into z
            place_block(&mut block, 0, n + m, &astar.neg());
            place_block(&mut block, n, 0, a);
            place_block(&mut block, n, n + m, &quad);
        }
        Direction::QtoPstar => {
            place_block(&mut block, 0, n, &astar.neg());
            place_block(&mut block, n + m, 0, a);
            place_block(&mut block, n + m, n, &quad);
        }
    }
    Ok(interleave(space, &block))
}

/// One generator of the word calculus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gen {
    E(HomMap),
    Estar(HomMap),
    /// Even-case classical generator on 1-based coordinates.
    Oe { i: usize, j: usize, z: RingElem },
    /// Odd-case classical family (1..5); `j` only for families 3–5.
    F { kind: u8, i: usize, j: Option<usize>, z: RingElem },
    Reflection(Mat),
    Conjugate { conj: Box<Word>, inner: Box<Gen> },
}

impl Gen {
    /// Closed-form inverse: parameters negate, reflections are involutions,
    /// conjugation passes through.
    pub fn inverse(&self, ctx: &RingCtx) -> Result<Gen> {
        Ok(match self {
            Gen::E(h) => Gen::E(h.neg()),
            Gen::Estar(h) => Gen::Estar(h.neg()),
            Gen::Oe { i, j, z } => Gen::Oe { i: *i, j: *j, z: ctx.neg(z)? },
            Gen::F { kind, i, j, z } => {
                Gen::F { kind: *kind, i: *i, j: *j, z: ctx.neg(z)? }
            }
            Gen::Reflection(v) => Gen::Reflection(v.clone()),
            Gen::Conjugate { conj, inner } => Gen::Conjugate {
                conj: conj.clone(),
                inner: Box::new(inner.inverse(ctx)?),
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Letter {
    pub gen: Gen,
    pub exp: i32,
}

/// A product of generators over a fixed ambient space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word {
    space: QuadSpace,
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity(space: &QuadSpace) -> Word {
        Word { space: space.clone(), letters: Vec::new() }
    }

    pub fn from_letters(space: &QuadSpace, letters: Vec<Letter>) -> Result<Word> {
        for l in &letters {
            validate(space, &l.gen)?;
            if l.exp != 1 && l.exp != -1 {
                return Err(Error::Invalid("letter exponents must be ±1".into()));
            }
        }
        Ok(Word { space: space.clone(), letters })
    }

    pub fn push(&mut self, gen: Gen, exp: i32) -> Result<()> {
        validate(&self.space, &gen)?;
        if exp != 1 && exp != -1 {
            return Err(Error::Invalid("letter exponents must be ±1".into()));
        }
        self.letters.push(Letter { gen, exp });
        Ok(())
    }

    pub fn space(&self) -> &QuadSpace {
        &self.space
    }
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }
    pub fn len(&self) -> usize {
        self.letters.len()
    }
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        if self.space != other.space {
            return Err(Error::CtxMismatch);
        }
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        Ok(Word { space: self.space.clone(), letters })
    }

    /// Reversed letters with flipped exponents.
    pub fn inverse(&self) -> Word {
        let letters = self
            .letters
            .iter()
            .rev()
            .map(|l| Letter { gen: l.gen.clone(), exp: -l.exp })
            .collect();
        Word { space: self.space.clone(), letters }
    }

    pub fn eval(&self) -> Result<Mat> {
        let mut acc = Mat::identity(self.space.ctx(), self.space.dim());
        for l in &self.letters {
            let g = if l.exp == 1 {
                l.gen.clone()
            } else {
                l.gen.inverse(self.space.ctx())?
            };
            acc = acc.mul(&gen_matrix(&self.space, &g)?)?;
        }
        Ok(acc)
    }
}

fn validate(space: &QuadSpace, gen: &Gen) -> Result<()> {
    let ctx = space.ctx();
    match gen {
        Gen::E(h) => {
            if h.direction() != Direction::QtoP {
                return Err(Error::Invalid("E takes a map into P".into()));
            }
            check_hom_shape(space, h)
        }
        Gen::Estar(h) => {
            if h.direction() != Direction::QtoPstar {
                return Err(Error::Invalid("E* takes a map into P*".into()));
            }
            check_hom_shape(space, h)
        }
        Gen::Oe { i, j, z } => {
            ctx.claim(z)?;
            if space.q_rank() != 0 {
                return Err(Error::Invalid(
                    "even-case generators need a purely hyperbolic space".into(),
                ));
            }
            let dim = space.dim();
            if *i < 1 || *j < 1 || *i > dim || *j > dim || i == j {
                return Err(Error::Shape(format!("bad oe indices ({i},{j})")));
            }
            Ok(())
        }
        Gen::F { kind, i, j, z } => {
            ctx.claim(z)?;
            if space.q_rank() != 1 || space.q_gram().get(0, 0) != ctx.from_i64(2) {
                return Err(Error::Invalid(
                    "odd-case generators need the standard form diag(2) ⊥ hyperbolic".into(),
                ));
            }
            let m = space.hyp_rank();
            let ok = match kind {
                1 | 2 => *i >= 1 && *i <= m && j.is_none(),
                3 | 4 | 5 => match j {
                    Some(j) => *i >= 1 && *i <= m && *j >= 1 && *j <= m && j != i,
                    None => false,
                },
                _ => false,
            };
            if ok {
                Ok(())
            } else {
                Err(Error::Shape(format!("bad F generator: kind {kind}, i={i}, j={j:?}")))
            }
        }
        Gen::Reflection(v) => {
            ctx.claim_mat(v)?;
            if v.cols() != 1 || v.rows() != space.dim() {
                return Err(Error::Shape("reflection vector has the wrong shape".into()));
            }
            if ctx.inverse(&space.bilinear(v, v)?)?.is_none() {
                return Err(Error::NotInvertible);
            }
            Ok(())
        }
        Gen::Conjugate { conj, inner } => {
            if conj.space() != space {
                return Err(Error::CtxMismatch);
            }
            validate(space, inner)
        }
    }
}

fn check_hom_shape(space: &QuadSpace, h: &HomMap) -> Result<()> {
    space.ctx().claim_mat(h.mat())?;
    if space.hyp_rank() == 0 {
        return Err(Error::Shape("transvections need at least one hyperbolic pair".into()));
    }
    if h.mat().rows() != space.hyp_rank() || h.mat().cols() != space.q_rank() {
        return Err(Error::Shape("hom map shape does not match the space".into()));
    }
    Ok(())
}

pub fn gen_matrix(space: &QuadSpace, gen: &Gen) -> Result<Mat> {
    match gen {
        Gen::E(h) => e_alpha(space, h),
        Gen::Estar(h) => e_beta_star(space, h),
        Gen::Oe { i, j, z } => crate::classical::oe(space.ctx(), space.hyp_rank(), *i, *j, z),
        Gen::F { kind, i, j, z } => {
            crate::classical::f_gen(space.ctx(), space.hyp_rank(), *kind, *i, *j, z)
        }
        Gen::Reflection(v) => crate::spinor::reflect(space, v),
        Gen::Conjugate { conj, inner } => {
            let g = conj.eval()?;
            let g_inv = conj.inverse().eval()?;
            g.mul(&gen_matrix(space, inner)?)?.mul(&g_inv)
        }
    }
}

/// The half-splitting identity E_{α₁+α₂} = E_{α₁/2}·E_{α₂}·E_{α₁/2} as a
/// pair of words; both evaluate to the same matrix.
pub fn split_generator(space: &QuadSpace, a1: &HomMap, a2: &HomMap) -> Result<(Word, Word)> {
    if a1.direction() != a2.direction() {
        return Err(Error::Invalid("both maps must have the same target".into()));
    }
    let make = |h: HomMap| -> Gen {
        match h.direction() {
            Direction::QtoP => Gen::E(h),
            Direction::QtoPstar => Gen::Estar(h),
        }
    };
    let lhs = Word::from_letters(space, vec![Letter { gen: make(a1.add(a2)?), exp: 1 }])?;
    let rhs = Word::from_letters(
        space,
        vec![
            Letter { gen: make(a1.half()), exp: 1 },
            Letter { gen: make(a2.clone()), exp: 1 },
            Letter { gen: make(a1.half()), exp: 1 },
        ],
    )?;
    Ok((lhs, rhs))
}

/// γ·inner·γ⁻¹ as a flattened word; the inner map must land in the ideal, so
/// the evaluation is congruent to the identity mod the ideal.
pub fn relative_generator(gamma: &Word, inner: Gen, ideal: &IdealDesc) -> Result<Word> {
    let space = gamma.space();
    validate(space, &inner)?;
    let hom = match &inner {
        Gen::E(h) | Gen::Estar(h) => h,
        _ => {
            return Err(Error::Invalid(
                "relative generators conjugate an elementary transvection".into(),
            ))
        }
    };
    if !hom.entries_in(ideal)? {
        return Err(Error::Invalid("inner map entries must lie in the ideal".into()));
    }
    let mut letters = gamma.letters().to_vec();
    letters.push(Letter { gen: inner, exp: 1 });
    letters.extend(gamma.inverse().letters().iter().cloned());
    Word::from_letters(space, letters)
}

/// The ambient space carried over the excision ring, with Gram entries
/// embedded as (g, 0).
pub fn lifted_space(space: &QuadSpace, ideal: &IdealDesc) -> Result<QuadSpace> {
    if ideal.ctx() != space.ctx() {
        return Err(Error::CtxMismatch);
    }
    let exc = RingCtx::excision(ideal);
    space.map_entries(&exc, |e| exc.excision_embed(e))
}

fn lift_hom(
    hom: &HomMap,
    lifted: &QuadSpace,
    inner: bool,
) -> Result<HomMap> {
    let exc = lifted.ctx();
    let RingKind::Excision { base, .. } = exc.kind() else {
        return Err(Error::Internal("lifted space must live over an excision ring".into()));
    };
    let zero = base.zero();
    let mat = hom.mat().map_entries(exc, |e| {
        if inner {
            exc.pair(&zero, e)
        } else {
            exc.excision_embed(e)
        }
    })?;
    HomMap::new(lifted, hom.direction(), mat)
}

fn is_elementary_in(gen: &Gen, ideal: &IdealDesc, exp: i32) -> Result<Option<HomMap>> {
    let hom = match gen {
        Gen::E(h) | Gen::Estar(h) => h,
        _ => return Ok(None),
    };
    let h = if exp == -1 { hom.neg() } else { hom.clone() };
    if h.entries_in(ideal)? {
        Ok(Some(h))
    } else {
        Ok(None)
    }
}

fn mirror_of(ctx: &RingCtx, a: &Letter, b: &Letter) -> Result<bool> {
    Ok((b.gen == a.gen && b.exp == -a.exp)
        || (b.gen == a.gen.inverse(ctx)? && b.exp == a.exp))
}

fn rebuild_elementary(direction: Direction, hom: HomMap) -> Gen {
    match direction {
        Direction::QtoP => Gen::E(hom),
        Direction::QtoPstar => Gen::Estar(hom),
    }
}

fn lift_letter(letter: &Letter, lifted: &QuadSpace, inner: bool) -> Result<Letter> {
    let (Gen::E(h) | Gen::Estar(h)) = &letter.gen else {
        return Err(Error::NotRelativeForm(
            "only elementary transvection letters can be lifted".into(),
        ));
    };
    let lifted_hom = lift_hom(h, lifted, inner)?;
    Ok(Letter { gen: rebuild_elementary(h.direction(), lifted_hom), exp: letter.exp })
}

/// Lift a relative word from R to R⊕I: conjugator entries x become (x, 0)
/// and inner (ideal-valued) entries become (0, x). Projecting the result
/// entrywise with f(r, i) = r + i recovers the original evaluation.
///
/// Accepted shapes: every letter individually relative (an elementary
/// transvection with entries in the ideal, or a conjugated such letter), or
/// one palindrome γ·inner·γ⁻¹ as produced by `relative_generator`.
pub fn lift_elementary(word: &Word, ideal: &IdealDesc) -> Result<Word> {
    let space = word.space();
    let lifted = lifted_space(space, ideal)?;
    let ls = word.letters();

    // letterwise: each letter is inner-elementary or conjugate-with-inner
    let mut letterwise: Option<Vec<Letter>> = Some(Vec::new());
    for l in ls {
        let lifted_letter = match &l.gen {
            Gen::E(_) | Gen::Estar(_) => {
                if is_elementary_in(&l.gen, ideal, 1)?.is_some() {
                    lift_letter(l, &lifted, true).ok()
                } else {
                    None
                }
            }
            Gen::Conjugate { conj, inner } => lift_conjugate(conj, inner, l.exp, ideal, &lifted)?,
            _ => None,
        };
        match (letterwise.as_mut(), lifted_letter) {
            (Some(acc), Some(letter)) => acc.push(letter),
            _ => {
                letterwise = None;
                break;
            }
        }
    }
    if let Some(letters) = letterwise {
        return Word::from_letters(&lifted, letters);
    }

    // palindrome γ·inner·γ⁻¹ with the center in the ideal
    if ls.len() % 2 == 1 {
        let c = ls.len() / 2;
        let mut mirrored = true;
        for t in 0..c {
            if !mirror_of(space.ctx(), &ls[t], &ls[ls.len() - 1 - t])? {
                mirrored = false;
                break;
            }
        }
        if mirrored && is_elementary_in(&ls[c].gen, ideal, ls[c].exp)?.is_some() {
            let mut letters = Vec::with_capacity(ls.len());
            for (t, l) in ls.iter().enumerate() {
                letters.push(lift_letter(l, &lifted, t == c)?);
            }
            return Word::from_letters(&lifted, letters);
        }
    }

    Err(Error::NotRelativeForm(
        "word is not a conjugated relative generator or a product of them".into(),
    ))
}

fn lift_conjugate(
    conj: &Word,
    inner: &Gen,
    exp: i32,
    ideal: &IdealDesc,
    lifted: &QuadSpace,
) -> Result<Option<Letter>> {
    if is_elementary_in(inner, ideal, 1)?.is_none() {
        return Ok(None);
    }
    let mut conj_letters = Vec::with_capacity(conj.len());
    for l in conj.letters() {
        match lift_letter(l, lifted, false) {
            Ok(letter) => conj_letters.push(letter),
            Err(_) => return Ok(None),
        }
    }
    let conj_lifted = Word::from_letters(lifted, conj_letters)?;
    let inner_letter = lift_letter(&Letter { gen: inner.clone(), exp: 1 }, lifted, true)?;
    Ok(Some(Letter {
        gen: Gen::Conjugate {
            conj: Box::new(conj_lifted),
            inner: Box::new(inner_letter.gen),
        },
        exp,
    }))
}

/// Lift an arbitrary relative orthogonal matrix ε to (Id, ε − Id) over R⊕I.
/// The lift is orthogonal for the embedded Gram and projects back to ε.
pub fn lift_orthogonal(space: &QuadSpace, eps: &Mat, ideal: &IdealDesc) -> Result<Mat> {
    if !space.is_orthogonal(eps)? {
        return Err(Error::Invalid("matrix is not orthogonal for this space".into()));
    }
    if !space.is_relative(eps, ideal)? {
        return Err(Error::NotRelativeForm(
            "matrix is not congruent to the identity mod the ideal".into(),
        ));
    }
    let lifted = lifted_space(space, ideal)?;
    let exc = lifted.ctx().clone();
    let ctx = space.ctx();
    let id = Mat::identity(ctx, space.dim());
    let mut out = Mat::zero(&exc, space.dim(), space.dim());
    for i in 0..space.dim() {
        for j in 0..space.dim() {
            let r = id.get(i, j);
            let delta = ctx.sub(&eps.get(i, j), &r)?;
            out.set(i, j, &exc.pair(&r, &delta)?)?;
        }
    }
    Ok(out)
}

/// Rewrite a word of elementary letters over an excision ring R⊕I into the
/// normal form (∏ₖ γₖ·E(τₖ)·γₖ⁻¹)·γ_{m+1}: each letter's map splits as
/// ρ + τ through the retraction (r,i) ↦ (r,0), the halves E(ρ/2) build the
/// conjugators, and the trailing γ_{m+1} is dropped when it evaluates to the
/// identity (always the case for relative input). Evaluation is preserved
/// exactly.
pub fn relative_normal_form(word: &Word) -> Result<Word> {
    let space = word.space();
    let ctx = space.ctx();
    if !matches!(ctx.kind(), RingKind::Excision { .. }) {
        return Err(Error::NoRetraction(
            "normal form needs the retraction of an excision ring".into(),
        ));
    }
    // normalize exponents away and split each map entrywise
    let mut pieces: Vec<(Direction, HomMap, HomMap)> = Vec::new();
    for l in word.letters() {
        let hom = match &l.gen {
            Gen::E(h) | Gen::Estar(h) => {
                if l.exp == -1 {
                    h.neg()
                } else {
                    h.clone()
                }
            }
            _ => {
                return Err(Error::NotRelativeForm(
                    "normal form expects elementary transvection letters".into(),
                ))
            }
        };
        let rho_mat = hom.mat().map_entries(ctx, |e| ctx.excision_retract(e))?;
        let rho = HomMap::new(space, hom.direction(), rho_mat)?;
        let tau = HomMap::new(space, hom.direction(), hom.mat().sub(rho.mat())?)?;
        pieces.push((hom.direction(), rho, tau));
    }

    let mut gamma = Word::identity(space);
    let mut out: Vec<Letter> = Vec::new();
    for k in 0..pieces.len() {
        if k > 0 {
            let (dir_prev, rho_prev, _) = &pieces[k - 1];
            gamma.push(rebuild_elementary(*dir_prev, rho_prev.half()), 1)?;
        }
        let (dir, rho, tau) = &pieces[k];
        gamma.push(rebuild_elementary(*dir, rho.half()), 1)?;
        out.push(Letter {
            gen: Gen::Conjugate {
                conj: Box::new(gamma.clone()),
                inner: Box::new(rebuild_elementary(*dir, tau.clone())),
            },
            exp: 1,
        });
    }
    if let Some((dir, rho, _)) = pieces.last() {
        gamma.push(rebuild_elementary(*dir, rho.half()), 1)?;
    }
    if !gamma.eval()?.is_identity() {
        out.extend(gamma.letters().iter().cloned());
    }
    Word::from_letters(space, out)
}

/// The ideal 0⊕I that relative words over R⊕I are congruent to the identity
/// against.
pub fn relative_ideal(space: &QuadSpace) -> Result<IdealDesc> {
    zero_part_ideal(space.ctx())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z9() -> RingCtx {
        RingCtx::zmod(9).unwrap()
    }

    fn rand_hom(
        space: &QuadSpace,
        dir: Direction,
        rng: &mut ChaCha8Rng,
    ) -> HomMap {
        let ctx = space.ctx();
        let mut mat = Mat::zero(ctx, space.hyp_rank(), space.q_rank());
        for i in 0..mat.rows() {
            for j in 0..mat.cols() {
                mat.set(i, j, &ctx.sample(rng)).unwrap();
            }
        }
        HomMap::new(space, dir, mat).unwrap()
    }

    fn scalar_hom(space: &QuadSpace, dir: Direction, v: i64) -> HomMap {
        let ctx = space.ctx();
        let mut mat = Mat::zero(ctx, space.hyp_rank(), space.q_rank());
        mat.set(0, 0, &ctx.from_i64(v)).unwrap();
        HomMap::new(space, dir, mat).unwrap()
    }

    #[test]
    fn adjoint_matches_the_rank_one_formula() {
        let q = RingCtx::rationals();
        let s = QuadSpace::phi_tilde(&q, 3).unwrap();
        let a = scalar_hom(&s, Direction::QtoP, 7);
        // G_Q = [2], so α* = αᵀ/2
        assert_eq!(alpha_star(&s, &a).unwrap(), Mat::parse(&q, "7/2").unwrap());
        let zero = HomMap::zero(&s, Direction::QtoP);
        assert!(alpha_star(&s, &zero).unwrap().is_zero());
    }

    #[test]
    fn transvections_match_the_blockwise_formulas() {
        let q = RingCtx::rationals();
        let s = QuadSpace::phi_tilde(&q, 3).unwrap();
        let e = e_alpha(&s, &scalar_hom(&s, Direction::QtoP, 2)).unwrap();
        assert_eq!(e, Mat::parse(&q, "1,0,-1;2,1,-1;0,0,1").unwrap());
        let a3 = e_alpha(&s, &scalar_hom(&s, Direction::QtoP, 3)).unwrap();
        assert_eq!(a3, Mat::parse(&q, "1,0,-3/2;3,1,-9/4;0,0,1").unwrap());
        let b = e_beta_star(&s, &scalar_hom(&s, Direction::QtoPstar, 3)).unwrap();
        assert_eq!(b, Mat::parse(&q, "1,-3/2,0;0,1,0;3,-9/4,1").unwrap());
        assert!(e_alpha(&s, &HomMap::zero(&s, Direction::QtoP)).unwrap().is_identity());
        assert!(e_alpha(&s, &scalar_hom(&s, Direction::QtoPstar, 1)).is_err());
    }

    #[test]
    fn interleaving_puts_blocks_at_the_layout_coordinates() {
        let q = RingCtx::rationals();
        let s = QuadSpace::phi_tilde(&q, 5).unwrap(); // n=1, m=2
        let ctx = s.ctx();
        let mut mat = Mat::zero(ctx, 2, 1);
        mat.set(0, 0, &ctx.from_i64(1)).unwrap();
        let h = HomMap::new(&s, Direction::QtoP, mat).unwrap();
        let e = e_alpha(&s, &h).unwrap();
        // x₁ sits at stored coordinate 1, f₁ at 2, x₂ at 3, f₂ at 4
        assert_eq!(e.get(1, 0), ctx.from_i64(1));
        assert_eq!(e.get(3, 0), ctx.zero());
        assert_eq!(e.get(0, 2), q.fraction(-1, 2).unwrap());
        assert_eq!(e.get(0, 4), ctx.zero());
        assert!(s.is_orthogonal(&e).unwrap());
    }

    #[test]
    fn transvections_are_orthogonal_with_determinant_one() {
        let ctxs = [
            z9(),
            RingCtx::rationals(),
            RingCtx::poly(&RingCtx::zmod(3).unwrap(), "X").unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut cases = 0;
        for ctx in &ctxs {
            for n in 1..=3usize {
                for m in 1..=3usize {
                    let mut qg = Mat::zero(ctx, n, n);
                    for t in 0..n {
                        qg.set(t, t, &ctx.from_i64(2)).unwrap();
                    }
                    let s = QuadSpace::new(ctx, &qg, m).unwrap();
                    for _ in 0..10 {
                        for dir in [Direction::QtoP, Direction::QtoPstar] {
                            let h = rand_hom(&s, dir, &mut rng);
                            let mat = elementary_matrix(&s, &h).unwrap();
                            assert!(s.is_orthogonal(&mat).unwrap());
                            assert_eq!(mat.det().unwrap(), ctx.one());
                            cases += 1;
                        }
                    }
                }
            }
        }
        assert!(cases >= 500);
    }

    #[test]
    fn closed_form_inverse_is_exact() {
        let ctx = z9();
        let s = QuadSpace::phi_tilde(&ctx, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for dir in [Direction::QtoP, Direction::QtoPstar] {
            for _ in 0..25 {
                let h = rand_hom(&s, dir, &mut rng);
                let m = elementary_matrix(&s, &h).unwrap();
                let m_inv = elementary_matrix(&s, &h.neg()).unwrap();
                assert!(m.mul(&m_inv).unwrap().is_identity());
            }
        }
        // as a word: [E(a), E(a)⁻¹] evaluates to the identity
        let h = scalar_hom(&s, Direction::QtoP, 4);
        let mut w = Word::identity(&s);
        w.push(Gen::E(h.clone()), 1).unwrap();
        w.push(Gen::E(h), -1).unwrap();
        assert!(w.eval().unwrap().is_identity());
        assert!(Word::identity(&s).eval().unwrap().is_identity());
    }

    #[test]
    fn pair_swap_exchanges_the_two_transvection_kinds() {
        let ctx = z9();
        let s = QuadSpace::phi_tilde(&ctx, 7).unwrap();
        let p = s.pair_swap_mat();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..30 {
            let h = rand_hom(&s, Direction::QtoP, &mut rng);
            let mirrored = HomMap::new(&s, Direction::QtoPstar, h.mat().clone()).unwrap();
            let lhs = p.mul(&e_alpha(&s, &h).unwrap()).unwrap().mul(&p).unwrap();
            assert_eq!(lhs, e_beta_star(&s, &mirrored).unwrap());
        }
    }

    #[test]
    fn half_splitting_identity_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let ctxs = [z9(), RingCtx::rationals()];
        let mut cases = 0;
        for ctx in &ctxs {
            for rank in [5usize, 7] {
                let s = QuadSpace::phi_tilde(ctx, rank).unwrap();
                for dir in [Direction::QtoP, Direction::QtoPstar] {
                    for _ in 0..65 {
                        let a1 = rand_hom(&s, dir, &mut rng);
                        let a2 = rand_hom(&s, dir, &mut rng);
                        let (lhs, rhs) = split_generator(&s, &a1, &a2).unwrap();
                        assert_eq!(lhs.eval().unwrap(), rhs.eval().unwrap());
                        cases += 1;
                    }
                }
            }
        }
        assert!(cases >= 500);
        // zero second summand degenerates to E(a1) on both sides
        let s = QuadSpace::phi_tilde(&z9(), 5).unwrap();
        let a1 = rand_hom(&s, Direction::QtoP, &mut rng);
        let zero = HomMap::zero(&s, Direction::QtoP);
        let (lhs, rhs) = split_generator(&s, &a1, &zero).unwrap();
        assert_eq!(lhs.eval().unwrap(), rhs.eval().unwrap());
        assert_eq!(lhs.eval().unwrap(), e_alpha(&s, &a1).unwrap());
    }

    fn commutator(a: &Mat, b: &Mat) -> Mat {
        a.mul(b)
            .unwrap()
            .mul(&a.inverse().unwrap().unwrap())
            .unwrap()
            .mul(&b.inverse().unwrap().unwrap())
            .unwrap()
    }

    #[test]
    fn disjoint_pair_commutators_are_internal_corrections() {
        // transvections on disjoint hyperbolic pairs do not commute outright:
        // [E_α, E_β] = Id + (βα* − αβ*) in the x–f block, a unipotent map of
        // the hyperbolic part (the two-parameter commutator forms in the
        // classical families are the rank-one case of this)
        let ctx = z9();
        let s = QuadSpace::phi_tilde(&ctx, 7).unwrap(); // n=1, m=3
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..200 {
            let a = ctx.sample(&mut rng);
            let b = ctx.sample(&mut rng);
            let mut m1 = Mat::zero(&ctx, 3, 1);
            m1.set(0, 0, &a).unwrap();
            let mut m2 = Mat::zero(&ctx, 3, 1);
            m2.set(2, 0, &b).unwrap();
            let h1 = HomMap::new(&s, Direction::QtoP, m1).unwrap();
            let h2 = HomMap::new(&s, Direction::QtoP, m2).unwrap();
            let e1 = e_alpha(&s, &h1).unwrap();
            let e2 = e_alpha(&s, &h2).unwrap();
            let got = commutator(&e1, &e2);

            let cross = |p: &HomMap, q: &HomMap| {
                p.mat().mul(&alpha_star(&s, q).unwrap()).unwrap()
            };
            let c = cross(&h2, &h1).sub(&cross(&h1, &h2)).unwrap();
            let mut expect = Mat::identity(&ctx, s.dim());
            for i in 0..3 {
                for j in 0..3 {
                    expect.set(s.x_index(i), s.f_index(j), &c.get(i, j)).unwrap();
                }
            }
            assert_eq!(got, expect);
            assert!(s.is_orthogonal(&got).unwrap());
        }
    }

    #[test]
    fn transvections_with_symmetric_pairing_commute() {
        // αβ* = βα* collapses the cross term, so the transvections commute:
        // maps into the same pair, proportional maps, and maps reading
        // disjoint coordinates of a diagonal form all qualify
        let ctx = z9();
        let mut qg = Mat::zero(&ctx, 2, 2);
        qg.set(0, 0, &ctx.from_i64(2)).unwrap();
        qg.set(1, 1, &ctx.from_i64(2)).unwrap();
        let s = QuadSpace::new(&ctx, &qg, 2).unwrap(); // n=2, m=2
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let mut cases = 0;
        for _ in 0..67 {
            // same pair, arbitrary Q-rows
            let mut m1 = Mat::zero(&ctx, 2, 2);
            let mut m2 = Mat::zero(&ctx, 2, 2);
            for j in 0..2 {
                m1.set(0, j, &ctx.sample(&mut rng)).unwrap();
                m2.set(0, j, &ctx.sample(&mut rng)).unwrap();
            }
            let e1 = e_alpha(&s, &HomMap::new(&s, Direction::QtoP, m1).unwrap()).unwrap();
            let e2 = e_alpha(&s, &HomMap::new(&s, Direction::QtoP, m2).unwrap()).unwrap();
            assert_eq!(e1.mul(&e2).unwrap(), e2.mul(&e1).unwrap());
            cases += 1;

            // proportional maps on different pairs
            let h = rand_hom(&s, Direction::QtoPstar, &mut rng);
            let hs = h.scale(&ctx.sample(&mut rng)).unwrap();
            let e1 = e_beta_star(&s, &h).unwrap();
            let e2 = e_beta_star(&s, &hs).unwrap();
            assert_eq!(e1.mul(&e2).unwrap(), e2.mul(&e1).unwrap());
            cases += 1;

            // disjoint Q-columns of the diagonal form, disjoint pairs
            let mut m1 = Mat::zero(&ctx, 2, 2);
            let mut m2 = Mat::zero(&ctx, 2, 2);
            m1.set(0, 0, &ctx.sample(&mut rng)).unwrap();
            m2.set(1, 1, &ctx.sample(&mut rng)).unwrap();
            let e1 = e_alpha(&s, &HomMap::new(&s, Direction::QtoP, m1).unwrap()).unwrap();
            let e2 = e_alpha(&s, &HomMap::new(&s, Direction::QtoP, m2).unwrap()).unwrap();
            assert_eq!(e1.mul(&e2).unwrap(), e2.mul(&e1).unwrap());
            cases += 1;
        }
        assert!(cases >= 200);
    }

    #[test]
    fn classical_letters_evaluate_through_words() {
        let ctx = z9();
        let even = QuadSpace::phi_tilde(&ctx, 4).unwrap();
        let mut w = Word::identity(&even);
        w.push(Gen::Oe { i: 1, j: 3, z: ctx.from_i64(2) }, 1).unwrap();
        w.push(Gen::Oe { i: 1, j: 3, z: ctx.from_i64(5) }, 1).unwrap();
        let expect = crate::classical::oe(&ctx, 2, 1, 3, &ctx.from_i64(7)).unwrap();
        assert_eq!(w.eval().unwrap(), expect);

        let odd = QuadSpace::phi_tilde(&ctx, 5).unwrap();
        let mut w = Word::identity(&odd);
        w.push(Gen::F { kind: 1, i: 2, j: None, z: ctx.from_i64(4) }, 1).unwrap();
        w.push(Gen::F { kind: 1, i: 2, j: None, z: ctx.from_i64(4) }, -1).unwrap();
        assert!(w.eval().unwrap().is_identity());
        // classical letters only fit their standard spaces
        let mut bad = Word::identity(&odd);
        assert!(bad.push(Gen::Oe { i: 1, j: 2, z: ctx.one() }, 1).is_err());
    }

    #[test]
    fn relative_generators_are_relative() {
        let ctx = z9();
        let ideal = IdealDesc::new(&ctx, vec![ctx.from_i64(3)]).unwrap();
        let s = QuadSpace::phi_tilde(&ctx, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41);

        // empty conjugator
        let inner = Gen::E(scalar_hom(&s, Direction::QtoP, 3));
        let w = relative_generator(&Word::identity(&s), inner, &ideal).unwrap();
        assert_eq!(w.len(), 1);
        assert!(s.is_relative(&w.eval().unwrap(), &ideal).unwrap());

        // nonempty conjugator: 3 letters, still relative
        let mut gamma = Word::identity(&s);
        gamma.push(Gen::E(rand_hom(&s, Direction::QtoP, &mut rng)), 1).unwrap();
        let inner = Gen::Estar(scalar_hom(&s, Direction::QtoPstar, 6));
        let w = relative_generator(&gamma, inner, &ideal).unwrap();
        assert_eq!(w.len(), 3);
        assert!(s.is_orthogonal(&w.eval().unwrap()).unwrap());
        assert!(s.is_relative(&w.eval().unwrap(), &ideal).unwrap());

        // entries outside the ideal are rejected, except for the unit ideal
        let bad = Gen::E(scalar_hom(&s, Direction::QtoP, 1));
        assert!(relative_generator(&gamma, bad.clone(), &ideal).is_err());
        let unit = IdealDesc::new(&ctx, vec![ctx.one()]).unwrap();
        assert!(relative_generator(&gamma, bad, &unit).is_ok());
    }

    #[test]
    fn lifting_relative_words_projects_back() {
        let ctx = z9();
        let ideal = IdealDesc::new(&ctx, vec![ctx.from_i64(3)]).unwrap();
        let s = QuadSpace::phi_tilde(&ctx, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(43);

        for trial in 0..20 {
            // inner-only words and conjugated palindromes
            let word = if trial % 2 == 0 {
                let mut w = Word::identity(&s);
                for _ in 0..3 {
                    let h = rand_hom(&s, Direction::QtoP, &mut rng)
                        .scale(&ctx.from_i64(3))
                        .unwrap();
                    w.push(Gen::E(h), 1).unwrap();
                }
                w
            } else {
                let mut gamma = Word::identity(&s);
                gamma.push(Gen::E(rand_hom(&s, Direction::QtoP, &mut rng)), 1).unwrap();
                let inner = Gen::Estar(
                    rand_hom(&s, Direction::QtoPstar, &mut rng)
                        .scale(&ctx.from_i64(3))
                        .unwrap(),
                );
                relative_generator(&gamma, inner, &ideal).unwrap()
            };
            let lifted = lift_elementary(&word, &ideal).unwrap();
            let exc = lifted.space().ctx().clone();
            let projected = lifted
                .eval()
                .unwrap()
                .map_entries(&ctx, |e| exc.excision_project(e))
                .unwrap();
            assert_eq!(projected, word.eval().unwrap());
            // the lift is relative to 0⊕I
            let zp = relative_ideal(lifted.space()).unwrap();
            assert!(lifted.space().is_relative(&lifted.eval().unwrap(), &zp).unwrap());
        }

        // a word that is not in relative form is rejected
        let mut bad = Word::identity(&s);
        bad.push(Gen::E(scalar_hom(&s, Direction::QtoP, 1)), 1).unwrap();
        bad.push(Gen::E(scalar_hom(&s, Direction::QtoP, 2)), 1).unwrap();
        assert!(matches!(
            lift_elementary(&bad, &ideal),
            Err(Error::NotRelativeForm(_))
        ));
    }

    #[test]
    fn orthogonal_lifts_stay_orthogonal_and_project_back() {
        let ctx = z9();
        let ideal = IdealDesc::new(&ctx, vec![ctx.from_i64(3)]).unwrap();
        let s = QuadSpace::phi_tilde(&ctx, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(47);

        // identity lifts to (Id, 0)
        let id = Mat::identity(&ctx, 5);
        let lifted_id = lift_orthogonal(&s, &id, &ideal).unwrap();
        let lifted = lifted_space(&s, &ideal).unwrap();
        assert!(lifted_id.is_identity());
        assert!(lifted.is_orthogonal(&lifted_id).unwrap());

        for _ in 0..10 {
            let h = rand_hom(&s, Direction::QtoP, &mut rng).scale(&ctx.from_i64(3)).unwrap();
            let eps = e_alpha(&s, &h).unwrap();
            let up = lift_orthogonal(&s, &eps, &ideal).unwrap();
            assert!(lifted.is_orthogonal(&up).unwrap());
            let exc = lifted.ctx().clone();
            let back = up.map_entries(&ctx, |e| exc.excision_project(e)).unwrap();
            assert_eq!(back, eps);
            let zp = relative_ideal(&lifted).unwrap();
            assert!(lifted.is_relative(&up, &zp).unwrap());
        }

        // non-relative orthogonal input is refused
        let h = scalar_hom(&s, Direction::QtoP, 1);
        let eps = e_alpha(&s, &h).unwrap();
        assert!(matches!(
            lift_orthogonal(&s, &eps, &ideal),
            Err(Error::NotRelativeForm(_))
        ));
    }

    #[test]
    fn normal_form_preserves_evaluation_exactly() {
        let z9 = z9();
        let ideal = IdealDesc::new(&z9, vec![z9.from_i64(3)]).unwrap();
        let exc = RingCtx::excision(&ideal);
        let s = QuadSpace::phi_tilde(&exc, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(53);

        for len in 1..=3usize {
            for _ in 0..8 {
                let mut w = Word::identity(&s);
                for t in 0..len {
                    let dir = if t % 2 == 0 { Direction::QtoP } else { Direction::QtoPstar };
                    let h = rand_hom(&s, dir, &mut rng);
                    let exp = if t == 1 { -1 } else { 1 };
                    w.push(
                        if dir == Direction::QtoP { Gen::E(h) } else { Gen::Estar(h) },
                        exp,
                    )
                    .unwrap();
                }
                let nf = relative_normal_form(&w).unwrap();
                assert_eq!(nf.eval().unwrap(), w.eval().unwrap());
            }
        }
    }

    #[test]
    fn normal_form_of_relative_words_is_all_conjugated_blocks() {
        let z9 = z9();
        let ideal = IdealDesc::new(&z9, vec![z9.from_i64(3)]).unwrap();
        let exc = RingCtx::excision(&ideal);
        let s = QuadSpace::phi_tilde(&exc, 5).unwrap();
        let zp = relative_ideal(&s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(59);

        for _ in 0..10 {
            // build a genuinely relative word: γ · E(τ) · γ⁻¹ flattened
            let g_hom = rand_hom(&s, Direction::QtoP, &mut rng);
            let mut tau_mat = Mat::zero(&exc, 2, 1);
            for i in 0..2 {
                let witness = z9.sample(&mut rng);
                let i_part = z9.mul(&witness, &z9.from_i64(3)).unwrap();
                tau_mat.set(i, 0, &exc.pair(&z9.zero(), &i_part).unwrap()).unwrap();
            }
            let tau = HomMap::new(&s, Direction::QtoP, tau_mat).unwrap();
            let mut w = Word::identity(&s);
            w.push(Gen::E(g_hom.clone()), 1).unwrap();
            w.push(Gen::E(tau), 1).unwrap();
            w.push(Gen::E(g_hom), -1).unwrap();
            assert!(s.is_relative(&w.eval().unwrap(), &zp).unwrap());

            let nf = relative_normal_form(&w).unwrap();
            assert_eq!(nf.eval().unwrap(), w.eval().unwrap());
            // trailing conjugator collapsed: only conjugated blocks remain
            assert!(nf
                .letters()
                .iter()
                .all(|l| matches!(l.gen, Gen::Conjugate { .. })));
            // and each block is itself relative
            for l in nf.letters() {
                let m = gen_matrix(&s, &l.gen).unwrap();
                assert!(s.is_relative(&m, &zp).unwrap());
            }
            // the normal form lifts letterwise
            let base_ideal = IdealDesc::new(&z9, vec![z9.from_i64(3)]).unwrap();
            drop(base_ideal);
        }

        // words whose letters already lie over 0⊕I keep trivial conjugators
        let mut tau_mat = Mat::zero(&exc, 2, 1);
        tau_mat.set(0, 0, &exc.pair(&z9.zero(), &z9.from_i64(6)).unwrap()).unwrap();
        let tau = HomMap::new(&s, Direction::QtoP, tau_mat).unwrap();
        let mut w = Word::identity(&s);
        w.push(Gen::E(tau), 1).unwrap();
        let nf = relative_normal_form(&w).unwrap();
        assert_eq!(nf.len(), 1);
        let Gen::Conjugate { conj, .. } = &nf.letters()[0].gen else {
            panic!("expected a conjugated block");
        };
        assert!(conj.eval().unwrap().is_identity());
        assert_eq!(nf.eval().unwrap(), w.eval().unwrap());
    }

}
