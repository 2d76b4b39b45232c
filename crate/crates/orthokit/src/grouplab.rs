//! Finite matrix-group tables: breadth-first closure of orthogonal
//! generators, derived and lower central series, quotient structure, and
//! product-splitting checks at enumerable scale.

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::quadmod::QuadSpace;
use std::collections::HashMap;

pub const DEFAULT_CAP: usize = 10_000_000;

/// A fully enumerated subgroup of the orthogonal group of a space over a
/// finite ring. Element order is deterministic: breadth-first from the
/// identity with the generator list sorted canonically.
#[derive(Clone, Debug)]
pub struct GroupTable {
    space: QuadSpace,
    elems: Vec<Mat>,
    index: HashMap<Vec<u8>, usize>,
    gens: Vec<Mat>,
}

fn dedup_sorted(gens: &[Mat], drop_identity: bool) -> Vec<Mat> {
    let mut out: Vec<Mat> = Vec::new();
    let mut keys: Vec<Vec<u8>> = Vec::new();
    for g in gens {
        if drop_identity && g.is_identity() {
            continue;
        }
        let k = g.canonical_bytes();
        if !keys.contains(&k) {
            keys.push(k);
            out.push(g.clone());
        }
    }
    out.sort_by_key(|g| g.canonical_bytes());
    out
}

impl GroupTable {
    pub fn bfs_closure(space: &QuadSpace, gens: &[Mat], cap: usize) -> Result<GroupTable> {
        let ctx = space.ctx();
        if !ctx.is_finite() {
            return Err(Error::Unsupported("group closure needs a finite ring".into()));
        }
        for g in gens {
            if !space.is_orthogonal(g)? {
                return Err(Error::Invalid(
                    "generator is not orthogonal for the given space".into(),
                ));
            }
        }
        let gens = dedup_sorted(gens, true);
        let id = Mat::identity(ctx, space.dim());
        let mut elems = vec![id.clone()];
        let mut index = HashMap::new();
        index.insert(id.canonical_bytes(), 0usize);
        let mut at = 0;
        while at < elems.len() {
            for g in &gens {
                let next = elems[at].mul(g)?;
                let key = next.canonical_bytes();
                if !index.contains_key(&key) {
                    if elems.len() >= cap {
                        return Err(Error::CapExceeded { cap, reached: elems.len() });
                    }
                    index.insert(key, elems.len());
                    elems.push(next);
                }
            }
            at += 1;
        }
        Ok(GroupTable { space: space.clone(), elems, index, gens })
    }

    pub fn space(&self) -> &QuadSpace {
        &self.space
    }
    pub fn order(&self) -> usize {
        self.elems.len()
    }
    pub fn elems(&self) -> &[Mat] {
        &self.elems
    }
    pub fn gens(&self) -> &[Mat] {
        &self.gens
    }

    pub fn contains(&self, m: &Mat) -> bool {
        self.index.contains_key(&m.canonical_bytes())
    }
    pub fn index_of(&self, m: &Mat) -> Option<usize> {
        self.index.get(&m.canonical_bytes()).copied()
    }

    pub fn is_subset_of(&self, other: &GroupTable) -> bool {
        self.space == other.space && self.elems.iter().all(|e| other.contains(e))
    }
}

pub fn commutator(a: &Mat, b: &Mat) -> Result<Mat> {
    let ai = a.inverse()?.ok_or(Error::NotInvertible)?;
    let bi = b.inverse()?.ok_or(Error::NotInvertible)?;
    a.mul(b)?.mul(&ai)?.mul(&bi)
}

/// Closure of the seeds saturated under conjugation by `conj_gens`: the
/// normal closure inside the group those generators generate. Generator
/// commutators alone need not generate a derived subgroup, so saturation
/// repeats until no conjugate escapes.
fn normal_closure(
    space: &QuadSpace,
    seeds: &[Mat],
    conj_gens: &[Mat],
    cap: usize,
) -> Result<GroupTable> {
    let mut gens = dedup_sorted(seeds, true);
    let mut conj_pairs = Vec::new();
    for g in conj_gens {
        conj_pairs.push((g.clone(), g.inverse()?.ok_or(Error::NotInvertible)?));
    }
    loop {
        let table = GroupTable::bfs_closure(space, &gens, cap)?;
        let mut escaped: Vec<Mat> = Vec::new();
        for e in table.elems() {
            for (g, gi) in &conj_pairs {
                let c = g.mul(e)?.mul(gi)?;
                if !table.contains(&c) {
                    escaped.push(c);
                }
            }
        }
        if escaped.is_empty() {
            return Ok(table);
        }
        let mut next = table.gens.clone();
        next.extend(escaped);
        gens = dedup_sorted(&next, true);
    }
}

fn pairwise_commutators(left: &[Mat], right: &[Mat]) -> Result<Vec<Mat>> {
    let mut out = Vec::new();
    for a in left {
        for b in right {
            out.push(commutator(a, b)?);
        }
    }
    Ok(out)
}

/// G ⊇ [G,G] ⊇ [[G,G],[G,G]] ⊇ … until the trivial group or a repeat. A
/// trailing repeated order signals stabilization above the trivial group.
pub fn derived_series(g: &GroupTable, cap: usize) -> Result<Vec<GroupTable>> {
    let mut series = vec![g.clone()];
    loop {
        let cur = series.last().unwrap();
        if cur.order() == 1 {
            return Ok(series);
        }
        let seeds = pairwise_commutators(cur.gens(), cur.gens())?;
        let next = normal_closure(&g.space, &seeds, cur.gens(), cap)?;
        let stabilized = next.order() == cur.order();
        series.push(next);
        if stabilized {
            return Ok(series);
        }
    }
}

/// G ⊇ [G,G] ⊇ [G,[G,G]] ⊇ … with the same termination convention.
pub fn lower_central_series(g: &GroupTable, cap: usize) -> Result<Vec<GroupTable>> {
    let mut series = vec![g.clone()];
    loop {
        let cur = series.last().unwrap();
        if cur.order() == 1 {
            return Ok(series);
        }
        let seeds = pairwise_commutators(g.gens(), cur.gens())?;
        let next = normal_closure(&g.space, &seeds, g.gens(), cap)?;
        let stabilized = next.order() == cur.order();
        series.push(next);
        if stabilized {
            return Ok(series);
        }
    }
}

/// Number of steps to reach the trivial group, if the series got there.
pub fn series_length(series: &[GroupTable]) -> Option<usize> {
    let last = series.last()?;
    if last.order() == 1 {
        Some(series.len() - 1)
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientReport {
    pub order: usize,
    pub abelian: bool,
    pub exponent: usize,
    pub derived_length: usize,
}

/// Structure of G/N for a normal subgroup N, computed on an explicit coset
/// table. Normality is verified by conjugating all of N with G's generators;
/// a violation is reported with the witnessing pair.
pub fn quotient_structure(g: &GroupTable, n: &GroupTable) -> Result<QuotientReport> {
    if !n.is_subset_of(g) {
        return Err(Error::Invalid("subgroup elements are not all in the group".into()));
    }
    for gen in g.gens() {
        let gi = gen.inverse()?.ok_or(Error::NotInvertible)?;
        for e in n.elems() {
            let c = gen.mul(e)?.mul(&gi)?;
            if !n.contains(&c) {
                return Err(Error::NotNormal(format!(
                    "conjugating {} by {} leaves the subgroup",
                    e.format(),
                    gen.format()
                )));
            }
        }
    }

    // coset assignment in table order
    let mut coset_of: Vec<Option<usize>> = vec![None; g.order()];
    let mut reps: Vec<usize> = Vec::new();
    for idx in 0..g.order() {
        if coset_of[idx].is_some() {
            continue;
        }
        let coset = reps.len();
        reps.push(idx);
        let rep = &g.elems()[idx];
        for h in n.elems() {
            let member = rep.mul(h)?;
            let at = g
                .index_of(&member)
                .ok_or_else(|| Error::Internal("coset member escaped the group".into()))?;
            if coset_of[at].is_some() && coset_of[at] != Some(coset) {
                return Err(Error::Internal("inconsistent coset assignment".into()));
            }
            coset_of[at] = Some(coset);
        }
    }
    let order = reps.len();
    if order * n.order() != g.order() {
        return Err(Error::Internal("cosets do not partition the group".into()));
    }

    // multiplication table of the quotient on coset indices
    let coset_idx = |m: &Mat| -> Result<usize> {
        let at = g
            .index_of(m)
            .ok_or_else(|| Error::Internal("product escaped the group".into()))?;
        coset_of[at].ok_or_else(|| Error::Internal("unassigned coset".into()))
    };
    let mut table = vec![vec![0usize; order]; order];
    for (i, &ri) in reps.iter().enumerate() {
        for (j, &rj) in reps.iter().enumerate() {
            table[i][j] = coset_idx(&g.elems()[ri].mul(&g.elems()[rj])?)?;
        }
    }
    let identity_coset = coset_idx(&Mat::identity(g.space.ctx(), g.space.dim()))?;

    let abelian = (0..order).all(|i| (0..order).all(|j| table[i][j] == table[j][i]));
    let mut exponent = 1usize;
    for i in 0..order {
        let mut k = 1usize;
        let mut acc = i;
        while acc != identity_coset {
            acc = table[acc][i];
            k += 1;
        }
        exponent = lcm(exponent, k);
    }
    let derived_length = abstract_derived_length(&table, identity_coset);
    Ok(QuotientReport { order, abelian, exponent, derived_length })
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Derived length of a finite group given by a multiplication table; the
/// quotient groups here are tiny, so plain subset closures suffice.
fn abstract_derived_length(table: &[Vec<usize>], id: usize) -> usize {
    let order = table.len();
    let inverse: Vec<usize> = (0..order)
        .map(|i| (0..order).find(|&j| table[i][j] == id).expect("group table"))
        .collect();
    let close = |seeds: &[usize]| -> Vec<usize> {
        let mut member = vec![false; order];
        member[id] = true;
        let mut elems = vec![id];
        let mut at = 0;
        while at < elems.len() {
            for &s in seeds {
                let nxt = table[elems[at]][s];
                if !member[nxt] {
                    member[nxt] = true;
                    elems.push(nxt);
                }
            }
            at += 1;
        }
        elems
    };
    let mut cur: Vec<usize> = (0..order).collect();
    let mut length = 0;
    while cur.len() > 1 {
        let mut seeds = Vec::new();
        for &a in &cur {
            for &b in &cur {
                seeds.push(table[table[a][b]][table[inverse[a]][inverse[b]]]);
            }
        }
        let next = close(&seeds);
        if next.len() == cur.len() {
            // stabilized above the trivial group: not solvable; report the
            // step count reached so far
            return length;
        }
        cur = next;
        length += 1;
    }
    length
}

/// Does every element of G factor as A·B, and also as B·A?
pub fn verify_product_splitting(
    g: &GroupTable,
    a: &GroupTable,
    b: &GroupTable,
) -> Result<bool> {
    if !a.is_subset_of(g) || !b.is_subset_of(g) {
        return Err(Error::Invalid("factors must be subgroups of the group".into()));
    }
    let mut b_invs = Vec::new();
    for e in b.elems() {
        b_invs.push((e.clone(), e.inverse()?.ok_or(Error::NotInvertible)?));
    }
    for x in g.elems() {
        let mut fwd = false;
        let mut rev = false;
        for (be, bi) in &b_invs {
            if !fwd && a.contains(&x.mul(bi)?) {
                fwd = true;
            }
            if !rev && a.contains(&be.inverse()?.ok_or(Error::NotInvertible)?.mul(x)?) {
                rev = true;
            }
            if fwd && rev {
                break;
            }
        }
        if !(fwd && rev) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingCtx;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn perm_space() -> QuadSpace {
        // permutation-invariant diagonal form, so permutation matrices are
        // orthogonal
        let f7 = RingCtx::zmod(7).unwrap();
        QuadSpace::new(&f7, &Mat::parse(&f7, "2,0,0;0,2,0;0,0,2").unwrap(), 0).unwrap()
    }

    fn perm(space: &QuadSpace, cols: [usize; 3]) -> Mat {
        let ctx = space.ctx();
        let mut m = Mat::zero(ctx, 3, 3);
        for (j, &i) in cols.iter().enumerate() {
            m.set(i, j, &ctx.one()).unwrap();
        }
        m
    }

    fn sym3() -> (QuadSpace, GroupTable) {
        let s = perm_space();
        let cycle = perm(&s, [1, 2, 0]);
        let swap = perm(&s, [1, 0, 2]);
        let g = GroupTable::bfs_closure(&s, &[cycle, swap], 100).unwrap();
        (s, g)
    }

    #[test]
    fn closure_of_the_identity_is_trivial() {
        let s = perm_space();
        let id = Mat::identity(s.ctx(), 3);
        let g = GroupTable::bfs_closure(&s, &[id], 10).unwrap();
        assert_eq!(g.order(), 1);
        let empty = GroupTable::bfs_closure(&s, &[], 10).unwrap();
        assert_eq!(empty.order(), 1);
    }

    #[test]
    fn symmetric_group_closure_is_deterministic_and_closed() {
        let (s, g) = sym3();
        assert_eq!(g.order(), 6);
        let again = GroupTable::bfs_closure(&s, g.gens(), 100).unwrap();
        let order: Vec<_> = g.elems().iter().map(|m| m.format()).collect();
        let order2: Vec<_> = again.elems().iter().map(|m| m.format()).collect();
        assert_eq!(order, order2);

        let mut rng = ChaCha8Rng::seed_from_u64(83);
        for _ in 0..1000 {
            let a = &g.elems()[rng.gen_range(0..g.order())];
            let b = &g.elems()[rng.gen_range(0..g.order())];
            assert!(g.contains(&a.mul(b).unwrap()));
            assert!(g.contains(&a.inverse().unwrap().unwrap()));
        }
    }

    #[test]
    fn caps_abort_with_partial_count() {
        let (s, g) = sym3();
        let err = GroupTable::bfs_closure(&s, g.gens(), 4).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { cap: 4, reached: 4 }));
    }

    #[test]
    fn non_orthogonal_generators_are_rejected() {
        let s = perm_space();
        let mut bad = Mat::identity(s.ctx(), 3);
        bad.set(0, 1, &s.ctx().one()).unwrap();
        assert!(GroupTable::bfs_closure(&s, &[bad], 10).is_err());
    }

    #[test]
    fn derived_series_of_the_symmetric_group() {
        let (_, g) = sym3();
        let series = derived_series(&g, 100).unwrap();
        let sizes: Vec<_> = series.iter().map(|t| t.order()).collect();
        assert_eq!(sizes, vec![6, 3, 1]);
        assert_eq!(series_length(&series), Some(2));
    }

    #[test]
    fn lower_central_series_detects_non_nilpotence() {
        let (_, g) = sym3();
        let series = lower_central_series(&g, 100).unwrap();
        let sizes: Vec<_> = series.iter().map(|t| t.order()).collect();
        // [S₃, A₃] = A₃: stabilizes above the trivial group
        assert_eq!(sizes, vec![6, 3, 3]);
        assert_eq!(series_length(&series), None);
    }

    #[test]
    fn abelian_groups_have_matching_short_series() {
        let s = perm_space();
        let neg = Mat::parse(s.ctx(), "6,0,0;0,6,0;0,0,6").unwrap();
        let g = GroupTable::bfs_closure(&s, &[neg], 10).unwrap();
        assert_eq!(g.order(), 2);
        let d = derived_series(&g, 10).unwrap();
        let l = lower_central_series(&g, 10).unwrap();
        assert_eq!(series_length(&d), Some(1));
        assert_eq!(series_length(&l), Some(1));

        let trivial = GroupTable::bfs_closure(&s, &[], 10).unwrap();
        assert_eq!(series_length(&derived_series(&trivial, 10).unwrap()), Some(0));
        assert_eq!(
            series_length(&lower_central_series(&trivial, 10).unwrap()),
            Some(0)
        );
    }

    #[test]
    fn quotient_by_the_alternating_subgroup() {
        let (s, g) = sym3();
        let a3 = GroupTable::bfs_closure(&s, &[perm(&s, [1, 2, 0])], 100).unwrap();
        assert_eq!(a3.order(), 3);
        let q = quotient_structure(&g, &a3).unwrap();
        assert_eq!(
            q,
            QuotientReport { order: 2, abelian: true, exponent: 2, derived_length: 1 }
        );

        let full = quotient_structure(&g, &g).unwrap();
        assert_eq!(full.order, 1);
        assert_eq!(full.exponent, 1);
        assert_eq!(full.derived_length, 0);

        // ⟨(1 2)⟩ is not normal in S₃; the error carries a witness
        let swap = GroupTable::bfs_closure(&s, &[perm(&s, [1, 0, 2])], 100).unwrap();
        let err = quotient_structure(&g, &swap).unwrap_err();
        assert!(matches!(err, Error::NotNormal(_)));
        let Error::NotNormal(msg) = err else { unreachable!() };
        assert!(msg.contains("conjugating"));
    }

    #[test]
    fn product_splitting_on_small_groups() {
        let (s, g) = sym3();
        let a3 = GroupTable::bfs_closure(&s, &[perm(&s, [1, 2, 0])], 100).unwrap();
        let swap = GroupTable::bfs_closure(&s, &[perm(&s, [1, 0, 2])], 100).unwrap();
        let trivial = GroupTable::bfs_closure(&s, &[], 10).unwrap();

        assert!(verify_product_splitting(&g, &a3, &swap).unwrap());
        assert!(verify_product_splitting(&g, &g, &trivial).unwrap());
        assert!(!verify_product_splitting(&g, &trivial, &trivial).unwrap());
        assert!(!verify_product_splitting(&g, &a3, &trivial).unwrap());
    }

    #[test]
    fn odd_orthogonal_group_over_f3_in_dimension_three() {
        // mini version of the large enumeration: one hyperbolic pair
        let f3 = RingCtx::zmod(3).unwrap();
        let s = QuadSpace::phi_tilde(&f3, 3).unwrap();
        let gens = crate::classical::f_all_gens(&f3, 1).unwrap();
        let eo = GroupTable::bfs_closure(&s, &gens, 1000).unwrap();
        assert_eq!(eo.order(), 12);
        for e in eo.elems() {
            assert_eq!(
                crate::spinor::eo_membership_oracle(&s, e).unwrap(),
                crate::spinor::Membership::In
            );
        }

        // adjoin the determinant-one element with nontrivial spinor norm
        let extra = Mat::parse(&f3, "1,0,0;0,2,0;0,0,2").unwrap();
        let so = GroupTable::bfs_closure(&s, &[gens, vec![extra]].concat(), 1000).unwrap();
        assert_eq!(so.order(), 24);
        let in_count = so
            .elems()
            .iter()
            .filter(|e| {
                crate::spinor::eo_membership_oracle(&s, e).unwrap()
                    == crate::spinor::Membership::In
            })
            .count();
        assert_eq!(in_count, eo.order());

        let q = quotient_structure(&so, &eo).unwrap();
        assert_eq!(
            q,
            QuotientReport { order: 2, abelian: true, exponent: 2, derived_length: 1 }
        );

        // squares land in the elementary subgroup
        for e in so.elems() {
            assert!(eo.contains(&e.mul(e).unwrap()));
        }
    }
}
