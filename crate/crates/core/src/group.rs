//! Finite groups presented by multiplication tables, with validated axioms.
//!
//! Elements are indices into the table. Groups of order at most 64 are
//! validated exhaustively on construction; larger ones by 10 000 seeded
//! random triples (a full check stays available via [`FiniteGroup::validate_associativity_full`]).

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::snf::smith_normal_form;

/// Element index within a [`FiniteGroup`].
pub type GroupElem = u16;

const EXHAUSTIVE_ORDER_LIMIT: usize = 64;
const SAMPLED_TRIPLES: usize = 10_000;
pub const DEFAULT_WREATH_ORDER_CAP: usize = 10_000;

/// A finite group as a multiplication table, with identity and inverse
/// tables located during validation. Immutable after construction.
#[derive(Clone)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<GroupElem>,
    identity: GroupElem,
    inverse: Vec<GroupElem>,
    names: Vec<String>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.order)
            .field("identity", &self.identity)
            .finish()
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.table == other.table && self.names == other.names
    }
}
impl Eq for FiniteGroup {}

impl FiniteGroup {
    /// Builds and validates a group from a square multiplication table.
    /// `table[a][b]` is the index of `a * b`.
    pub fn from_table(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        Self::from_table_inner(names, table, false)
    }

    /// Same as [`FiniteGroup::from_table`] but always checks associativity
    /// exhaustively, regardless of order.
    pub fn from_table_full(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        Self::from_table_inner(names, table, true)
    }

    fn from_table_inner(names: Vec<String>, table: Vec<Vec<usize>>, full: bool) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::NotAGroup("empty table".into()));
        }
        if order > GroupElem::MAX as usize {
            return Err(Error::SizeLimit(format!(
                "group order {order} exceeds {}",
                GroupElem::MAX
            )));
        }
        if names.len() != order {
            return Err(Error::NotAGroup(format!(
                "{} names for a table of order {order}",
                names.len()
            )));
        }
        {
            let mut sorted = names.clone();
            sorted.sort();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::NotAGroup("element names are not distinct".into()));
            }
        }
        let mut flat = Vec::with_capacity(order * order);
        for row in &table {
            if row.len() != order {
                return Err(Error::NotAGroup("table is not square".into()));
            }
            for &v in row {
                if v >= order {
                    return Err(Error::NotAGroup(format!("entry {v} out of range")));
                }
                flat.push(v as GroupElem);
            }
        }

        let g = Self::validate(flat, names, full)?;
        Ok(g)
    }

    fn validate(table: Vec<GroupElem>, names: Vec<String>, full: bool) -> Result<Self> {
        let order = names.len();
        let at = |a: usize, b: usize| table[a * order + b] as usize;

        let identity = (0..order)
            .find(|&e| (0..order).all(|a| at(e, a) == a && at(a, e) == a))
            .ok_or_else(|| Error::NotAGroup("no two-sided identity".into()))?;

        let mut inverse = vec![0 as GroupElem; order];
        for a in 0..order {
            let inv = (0..order)
                .find(|&b| at(a, b) == identity && at(b, a) == identity)
                .ok_or_else(|| Error::NotAGroup(format!("element {} has no inverse", names[a])))?;
            inverse[a] = inv as GroupElem;
        }

        let check = |a: usize, b: usize, c: usize| -> Result<()> {
            if at(at(a, b), c) != at(a, at(b, c)) {
                return Err(Error::NotAGroup(format!(
                    "associativity fails on ({}, {}, {})",
                    names[a], names[b], names[c]
                )));
            }
            Ok(())
        };
        if full || order <= EXHAUSTIVE_ORDER_LIMIT {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha12Rng::seed_from_u64(0);
            for _ in 0..SAMPLED_TRIPLES {
                let a = rng.gen_range(0..order);
                let b = rng.gen_range(0..order);
                let c = rng.gen_range(0..order);
                check(a, b, c)?;
            }
        }

        Ok(FiniteGroup {
            order,
            table,
            identity: identity as GroupElem,
            inverse,
            names,
        })
    }

    /// Exhaustive associativity check, available at any order.
    pub fn validate_associativity_full(&self) -> Result<()> {
        for a in 0..self.order as GroupElem {
            for b in 0..self.order as GroupElem {
                for c in 0..self.order as GroupElem {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::NotAGroup(format!(
                            "associativity fails on ({}, {}, {})",
                            self.name(a),
                            self.name(b),
                            self.name(c)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> GroupElem {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: GroupElem, b: GroupElem) -> GroupElem {
        self.table[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: GroupElem) -> GroupElem {
        self.inverse[a as usize]
    }

    pub fn name(&self, a: GroupElem) -> &str {
        &self.names[a as usize]
    }

    pub fn elem_by_name(&self, name: &str) -> Option<GroupElem> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| i as GroupElem)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElem> {
        0..self.order as GroupElem
    }

    /// Multiplicative order of an element.
    pub fn element_order(&self, a: GroupElem) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != self.identity {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    /// The trivial group.
    pub fn trivial() -> Self {
        FiniteGroup {
            order: 1,
            table: vec![0],
            identity: 0,
            inverse: vec![0],
            names: vec!["e".into()],
        }
    }

    /// The cyclic group of order `m`, generated by `t`.
    pub fn cyclic(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::BadIndex("cyclic group order must be >= 1".into()));
        }
        if m == 1 {
            return Ok(Self::trivial());
        }
        let names = (0..m)
            .map(|i| match i {
                0 => "e".to_string(),
                1 => "t".to_string(),
                _ => format!("t{i}"),
            })
            .collect();
        let table = (0..m)
            .map(|a| (0..m).map(|b| (a + b) % m).collect())
            .collect();
        Self::from_table(names, table)
    }

    /// The symmetric group on `m` letters, elements in lexicographic
    /// one-line order. Limited to `m <= 6` (order 720).
    pub fn symmetric(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::BadIndex("symmetric group needs m >= 1".into()));
        }
        if m > 6 {
            return Err(Error::SizeLimit(format!(
                "symmetric({m}) has order {} > 720",
                (1..=m).product::<usize>()
            )));
        }
        let perms = all_permutations(m);
        let rank = |p: &[u8]| perm_lex_rank(p);
        let names = perms
            .iter()
            .map(|p| p.iter().map(|&i| (b'1' + i) as char).collect())
            .collect();
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| rank(&compose_perms(a, b))).collect())
            .collect();
        Self::from_table(names, table)
    }

    /// The direct product, with pairwise element names.
    pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> Result<Self> {
        let order = g.order * h.order;
        if order > GroupElem::MAX as usize {
            return Err(Error::SizeLimit(format!("product order {order} too large")));
        }
        let idx = |a: usize, b: usize| a * h.order + b;
        let mut names = Vec::with_capacity(order);
        for a in 0..g.order {
            for b in 0..h.order {
                names.push(format!("({},{})", g.names[a], h.names[b]));
            }
        }
        let mut table = vec![vec![0usize; order]; order];
        for a1 in 0..g.order {
            for b1 in 0..h.order {
                for a2 in 0..g.order {
                    for b2 in 0..h.order {
                        let p = g.mul(a1 as GroupElem, a2 as GroupElem) as usize;
                        let q = h.mul(b1 as GroupElem, b2 as GroupElem) as usize;
                        table[idx(a1, b1)][idx(a2, b2)] = idx(p, q);
                    }
                }
            }
        }
        Self::from_table(names, table)
    }

    /// Abelian invariant factors of the abelianization, each > 1, in a
    /// divisibility chain. Computed directly from the table: commutator
    /// subgroup, quotient, then the Smith form of the quotient's Cayley
    /// relations. Independent of the homology engine.
    pub fn abelian_invariants(&self) -> Vec<BigInt> {
        // Commutator subgroup: closure of all commutators under the product.
        let mut in_sub = vec![false; self.order];
        in_sub[self.identity as usize] = true;
        let mut members = vec![self.identity];
        for a in self.elements() {
            for b in self.elements() {
                let c = self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)));
                if !in_sub[c as usize] {
                    in_sub[c as usize] = true;
                    members.push(c);
                }
            }
        }
        let mut frontier = 0;
        while frontier < members.len() {
            let x = members[frontier];
            frontier += 1;
            for i in 0..members.len() {
                let y = members[i];
                let z = self.mul(x, y);
                if !in_sub[z as usize] {
                    in_sub[z as usize] = true;
                    members.push(z);
                }
            }
        }

        // Cosets of the commutator subgroup.
        let mut coset_of = vec![usize::MAX; self.order];
        let mut reps: Vec<GroupElem> = Vec::new();
        for g in self.elements() {
            if coset_of[g as usize] != usize::MAX {
                continue;
            }
            let c = reps.len();
            reps.push(g);
            for &s in &members {
                coset_of[self.mul(g, s) as usize] = c;
            }
        }

        // Cayley presentation of the quotient as an abelian group:
        // one relation x_a + x_b - x_{ab} per pair of cosets.
        let q = reps.len();
        let mut triplets: Vec<(usize, usize, BigInt)> = Vec::with_capacity(3 * q * q);
        for a in 0..q {
            for b in 0..q {
                let row = a * q + b;
                let prod = coset_of[self.mul(reps[a], reps[b]) as usize];
                triplets.push((row, a, BigInt::from(1)));
                triplets.push((row, b, BigInt::from(1)));
                triplets.push((row, prod, BigInt::from(-1)));
            }
        }
        let snf = smith_normal_form(q * q, q, triplets);
        snf.nontrivial_divisors()
    }
}

/// All permutations of `0..m` in lexicographic one-line order.
pub fn all_permutations(m: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut current = (0..m as u8).collect::<Vec<_>>();
    loop {
        out.push(current.clone());
        if !next_permutation(&mut current) {
            break;
        }
    }
    out
}

fn next_permutation(p: &mut [u8]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// `(a o b)(i) = a(b(i))`.
pub fn compose_perms(a: &[u8], b: &[u8]) -> Vec<u8> {
    b.iter().map(|&i| a[i as usize]).collect()
}

pub fn invert_perm(p: &[u8]) -> Vec<u8> {
    let mut inv = vec![0u8; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v as usize] = i as u8;
    }
    inv
}

/// Dense index of the wreath element `(tuple; sigma)` in the enumeration
/// used by [`wreath_product`]: permutation-major, tuples lexicographic with
/// the last coordinate fastest.
pub fn wreath_rank(base_order: usize, tuple: &[GroupElem], sigma: &[u8]) -> usize {
    let gn = base_order.pow(tuple.len() as u32);
    let t = tuple
        .iter()
        .fold(0usize, |acc, &x| acc * base_order + x as usize);
    perm_lex_rank(sigma) * gn + t
}

/// Lexicographic rank of a permutation in one-line form (Lehmer code).
pub fn perm_lex_rank(p: &[u8]) -> usize {
    let n = p.len();
    let mut rank = 0usize;
    let mut suffix_factorial = 1usize;
    for i in (0..n).rev() {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count();
        rank += smaller * suffix_factorial;
        suffix_factorial *= n - i;
    }
    rank
}

/// The wreath product of `G` with the symmetric group on `n` letters.
///
/// Elements are pairs `(g_1, ..., g_n; sigma)` with the product
/// `(g; sigma) (h; tau) = (g * (sigma . h); sigma tau)` where the action
/// permutes coordinates by `(sigma . h)_i = h_{sigma^{-1}(i)}` and
/// permutations compose as functions, `(sigma tau)(i) = sigma(tau(i))`.
pub fn wreath_product(g: &FiniteGroup, n: usize) -> Result<FiniteGroup> {
    wreath_product_with_cap(g, n, DEFAULT_WREATH_ORDER_CAP)
}

pub fn wreath_product_with_cap(g: &FiniteGroup, n: usize, cap: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::BadIndex("wreath product needs n >= 1".into()));
    }
    let factorial: usize = (1..=n).product();
    let order = g
        .order
        .checked_pow(n as u32)
        .and_then(|t| t.checked_mul(factorial))
        .ok_or_else(|| Error::SizeLimit("wreath order overflows".into()))?;
    if order > cap {
        return Err(Error::SizeLimit(format!(
            "wreath order {order} exceeds cap {cap}"
        )));
    }

    let perms = all_permutations(n);
    let gn = g.order.pow(n as u32);
    let tuple_of = |mut r: usize| -> Vec<GroupElem> {
        let mut t = vec![0 as GroupElem; n];
        for i in (0..n).rev() {
            t[i] = (r % g.order) as GroupElem;
            r /= g.order;
        }
        t
    };

    let mut names = Vec::with_capacity(order);
    for p in &perms {
        let sigma_name: String = p.iter().map(|&i| (b'1' + i) as char).collect();
        for r in 0..gn {
            let t = tuple_of(r);
            let parts: Vec<&str> = t.iter().map(|&x| g.name(x)).collect();
            names.push(format!("({};{})", parts.join(","), sigma_name));
        }
    }

    let mut table = vec![vec![0usize; order]; order];
    for (pi, p) in perms.iter().enumerate() {
        let p_inv = invert_perm(p);
        for r1 in 0..gn {
            let t1 = tuple_of(r1);
            let row = pi * gn + r1;
            for (qi, q) in perms.iter().enumerate() {
                let pq = compose_perms(p, q);
                for r2 in 0..gn {
                    let t2 = tuple_of(r2);
                    let mut prod = vec![0 as GroupElem; n];
                    for i in 0..n {
                        prod[i] = g.mul(t1[i], t2[p_inv[i] as usize]);
                    }
                    table[row][qi * gn + r2] = wreath_rank(g.order, &prod, &pq);
                }
            }
        }
    }
    FiniteGroup::from_table(names, table)
}

/// Parses a group spec string: `trivial`, `C:m`, `S:m`, `prod:SPEC,SPEC`,
/// or `table:FILE.json` where the file holds `{"names": [...], "table": [[...], ...]}`.
pub fn parse_group_spec(spec: &str) -> Result<Arc<FiniteGroup>> {
    let spec = spec.trim();
    if spec == "trivial" {
        return Ok(Arc::new(FiniteGroup::trivial()));
    }
    if let Some(m) = spec.strip_prefix("C:") {
        let m: usize = m
            .parse()
            .map_err(|_| Error::Parse(format!("bad cyclic order in {spec:?}")))?;
        return Ok(Arc::new(FiniteGroup::cyclic(m)?));
    }
    if let Some(m) = spec.strip_prefix("S:") {
        let m: usize = m
            .parse()
            .map_err(|_| Error::Parse(format!("bad symmetric degree in {spec:?}")))?;
        return Ok(Arc::new(FiniteGroup::symmetric(m)?));
    }
    if let Some(body) = spec.strip_prefix("prod:") {
        // Split at the first comma where both halves parse.
        for (idx, _) in body.match_indices(',') {
            let (left, right) = (body[..idx].trim(), body[idx + 1..].trim());
            if let (Ok(g), Ok(h)) = (parse_group_spec(left), parse_group_spec(right)) {
                return Ok(Arc::new(FiniteGroup::direct_product(&g, &h)?));
            }
        }
        return Err(Error::Parse(format!("cannot split product spec {spec:?}")));
    }
    if let Some(path) = spec.strip_prefix("table:") {
        return Ok(Arc::new(group_from_json_file(Path::new(path))?));
    }
    Err(Error::Parse(format!(
        "unknown group spec {spec:?}; expected trivial, C:m, S:m, prod:SPEC,SPEC or table:FILE.json"
    )))
}

#[derive(Deserialize)]
struct TableFile {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
}

pub fn group_from_json_file(path: &Path) -> Result<FiniteGroup> {
    let text = std::fs::read_to_string(path)?;
    let parsed: TableFile = serde_json::from_str(&text)?;
    FiniteGroup::from_table(parsed.names, parsed.table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_and_c2() {
        let t = FiniteGroup::from_table(vec!["e".into()], vec![vec![0]]).unwrap();
        assert_eq!(t.order(), 1);
        assert_eq!(t.identity(), 0);

        let c2 =
            FiniteGroup::from_table(vec!["e".into(), "t".into()], vec![vec![0, 1], vec![1, 0]])
                .unwrap();
        assert_eq!(c2.inv(1), 1);
        assert_eq!(FiniteGroup::cyclic(2).unwrap(), c2);
    }

    #[test]
    fn s3_from_composed_permutations() {
        // Build the table of S3 by composing permutations by hand and check
        // it validates; all 216 triples run through the exhaustive check.
        let perms = all_permutations(3);
        assert_eq!(perms.len(), 6);
        let table: Vec<Vec<usize>> = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| perm_lex_rank(&compose_perms(a, b)))
                    .collect()
            })
            .collect();
        let names = perms
            .iter()
            .map(|p| p.iter().map(|&i| (b'1' + i) as char).collect())
            .collect();
        let s3 = FiniteGroup::from_table_full(names, table).unwrap();
        assert_eq!(s3.order(), 6);
        let order3 = s3.elements().filter(|&a| s3.element_order(a) == 3).count();
        assert_eq!(order3, 2);
        assert_eq!(FiniteGroup::symmetric(3).unwrap(), s3);
    }

    #[test]
    fn rejects_non_groups() {
        // 2x2 table without identity.
        let bad =
            FiniteGroup::from_table(vec!["a".into(), "b".into()], vec![vec![1, 0], vec![0, 0]]);
        assert!(bad.is_err());
        // Non-associative magma with identity: entries chosen so that
        // (1*1)*2 != 1*(1*2).
        let bad = FiniteGroup::from_table(
            vec!["e".into(), "a".into(), "b".into()],
            vec![vec![0, 1, 2], vec![1, 0, 1], vec![2, 1, 0]],
        );
        match bad {
            Err(Error::NotAGroup(msg)) => assert!(
                msg.contains("associativity") || msg.contains("inverse"),
                "{msg}"
            ),
            other => panic!("expected NotAGroup, got {other:?}"),
        }
    }

    #[test]
    fn klein_four_group() {
        let c2 = FiniteGroup::cyclic(2).unwrap();
        let v4 = FiniteGroup::direct_product(&c2, &c2).unwrap();
        assert_eq!(v4.order(), 4);
        for a in v4.elements() {
            assert_eq!(v4.inv(a), a);
        }
    }

    #[test]
    fn symmetric_size_limit() {
        assert!(matches!(
            FiniteGroup::symmetric(7),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn wreath_of_trivial_is_symmetric() {
        let t = FiniteGroup::trivial();
        for n in 1..=4 {
            let w = wreath_product(&t, n).unwrap();
            let factorial: usize = (1..=n).product();
            assert_eq!(w.order(), factorial);
            // Same multiplication law as symmetric(n), up to names.
            let s = FiniteGroup::symmetric(n).unwrap();
            for a in 0..w.order() as GroupElem {
                for b in 0..w.order() as GroupElem {
                    assert_eq!(w.mul(a, b), s.mul(a, b));
                }
            }
        }
    }

    #[test]
    fn wreath_c2_2_is_dihedral_of_order_8() {
        let c2 = FiniteGroup::cyclic(2).unwrap();
        let w = wreath_product(&c2, 2).unwrap();
        assert_eq!(w.order(), 8);
        let order4 = w.elements().filter(|&a| w.element_order(a) == 4).count();
        assert_eq!(order4, 2);
    }

    #[test]
    fn wreath_c2_3_order() {
        let c2 = FiniteGroup::cyclic(2).unwrap();
        let w = wreath_product(&c2, 3).unwrap();
        assert_eq!(w.order(), 48);
        assert!(matches!(
            wreath_product_with_cap(&c2, 3, 40),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn abelianizations() {
        let s2 = FiniteGroup::symmetric(2).unwrap();
        assert_eq!(s2.abelian_invariants(), vec![BigInt::from(2)]);
        let s3 = FiniteGroup::symmetric(3).unwrap();
        assert_eq!(s3.abelian_invariants(), vec![BigInt::from(2)]);
        let c2 = FiniteGroup::cyclic(2).unwrap();
        let d4 = wreath_product(&c2, 2).unwrap();
        assert_eq!(
            d4.abelian_invariants(),
            vec![BigInt::from(2), BigInt::from(2)]
        );
        let c6 = FiniteGroup::cyclic(6).unwrap();
        assert_eq!(c6.abelian_invariants(), vec![BigInt::from(6)]);
        let v4 = FiniteGroup::direct_product(&c2, &c2).unwrap();
        assert_eq!(
            v4.abelian_invariants(),
            vec![BigInt::from(2), BigInt::from(2)]
        );
    }

    #[test]
    fn spec_strings() {
        assert_eq!(parse_group_spec("trivial").unwrap().order(), 1);
        assert_eq!(parse_group_spec("C:4").unwrap().order(), 4);
        assert_eq!(parse_group_spec("S:3").unwrap().order(), 6);
        assert_eq!(parse_group_spec("prod:C:2,C:2").unwrap().order(), 4);
        assert_eq!(
            parse_group_spec("prod:C:2,prod:C:2,C:3").unwrap().order(),
            12
        );
        assert!(parse_group_spec("Q:8").is_err());
    }

    #[test]
    fn permutation_rank_roundtrip() {
        let perms = all_permutations(4);
        for (i, p) in perms.iter().enumerate() {
            assert_eq!(perm_lex_rank(p), i);
        }
    }
}
