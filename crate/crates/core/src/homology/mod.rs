//! Exact homology of augmented algebras through the normalized bar complex.
//!
//! Any unital algebra with a distinguished free basis, an augmentation and
//! sparse structure constants plugs in through [`AugmentedAlgebraView`].
//! Degree `q` of the complex is spanned by `q`-tuples over the reduced
//! basis `x - eps(x) 1` (one element per non-unit basis element), and the
//! differential merges adjacent tensor slots with alternating signs; the
//! outer face maps vanish on trivial coefficients, which is what makes the
//! reduced complex small enough to run at interesting sizes.

pub mod dense;
pub mod rank;
pub mod stability;

use num::BigInt;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::ring::{IntegerRing, PrimeField, RationalRing, RingOps};
use crate::rng::derive_rng;
use crate::snf::smith_normal_form;
use rank::{stream_rank, FieldRank};

pub use stability::{compare_stability, induced_map_on_tor, InducedMapReport, StabilityComparison};

/// Resource limits for complex construction and elimination.
#[derive(Clone, Debug)]
pub struct Budget {
    pub memory_bytes: u64,
    pub max_columns: u64,
    pub snf_max_dim: usize,
    pub dense_max_dim: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            memory_bytes: 4 << 30,
            max_columns: 50_000_000,
            snf_max_dim: 50_000,
            dense_max_dim: 5_000,
        }
    }
}

impl Budget {
    pub fn with_memory_mb(mb: u64) -> Self {
        Budget {
            memory_bytes: mb << 20,
            ..Budget::default()
        }
    }
}

/// The engine's input contract: a unital augmented algebra that is free on
/// a finite ordered basis containing the unit.
pub trait AugmentedAlgebraView<R: RingOps>: Sync {
    fn ring(&self) -> &R;
    fn basis_len(&self) -> usize;
    fn unit_index(&self) -> usize;
    fn augmentation(&self, i: usize) -> R::Elem;
    /// Product of two basis elements in the full basis, sparse and sorted.
    fn product(&self, i: usize, j: usize) -> Vec<(usize, R::Elem)>;
}

/// Spot-checks the view contract: the unit is a two-sided identity and the
/// augmentation is multiplicative, on seeded samples.
pub fn validate_view<R: RingOps>(view: &dyn AugmentedAlgebraView<R>, seed: u64) -> Result<()> {
    let ring = view.ring().clone();
    let n = view.basis_len();
    let unit = view.unit_index();
    let mut rng = derive_rng(seed, "homology.view");
    for trial in 0..100 {
        let i = rng.gen_range(0..n);
        let expect = vec![(i, ring.one())];
        if view.product(unit, i) != expect || view.product(i, unit) != expect {
            return Err(Error::VerificationFailed(format!(
                "unit law fails on basis element {i} (trial {trial})"
            )));
        }
        let j = rng.gen_range(0..n);
        let mut eps = ring.zero();
        for (b, c) in view.product(i, j) {
            eps = ring.add(&eps, &ring.mul(&view.augmentation(b), &c));
        }
        let expect = ring.mul(&view.augmentation(i), &view.augmentation(j));
        if eps != expect {
            return Err(Error::VerificationFailed(format!(
                "augmentation not multiplicative on ({i}, {j}) (trial {trial})"
            )));
        }
    }
    Ok(())
}

/// View of a coloured partition algebra context.
pub struct PartitionAlgebraView<'a, R: RingOps> {
    ctx: &'a crate::algebra::AlgebraContext<R>,
}

impl<'a, R: RingOps> PartitionAlgebraView<'a, R> {
    pub fn new(ctx: &'a crate::algebra::AlgebraContext<R>) -> Self {
        PartitionAlgebraView { ctx }
    }
}

impl<R: RingOps> AugmentedAlgebraView<R> for PartitionAlgebraView<'_, R> {
    fn ring(&self) -> &R {
        self.ctx.ring()
    }
    fn basis_len(&self) -> usize {
        self.ctx.dim()
    }
    fn unit_index(&self) -> usize {
        self.ctx.one_index() as usize
    }
    fn augmentation(&self, i: usize) -> R::Elem {
        if self.ctx.is_permutation_index(i as u32) {
            self.ctx.ring().one()
        } else {
            self.ctx.ring().zero()
        }
    }
    fn product(&self, i: usize, j: usize) -> Vec<(usize, R::Elem)> {
        match self.ctx.multiply_basis(i as u32, j as u32) {
            None => Vec::new(),
            Some((k, exp)) => {
                let c = self.ctx.ring().pow(self.ctx.delta(), exp);
                if self.ctx.ring().is_zero(&c) {
                    Vec::new()
                } else {
                    vec![(k as usize, c)]
                }
            }
        }
    }
}

/// View of a group algebra `k[H]` with the trivial-module augmentation
/// sending every group element to one.
pub struct GroupAlgebraView<R: RingOps> {
    group: std::sync::Arc<FiniteGroup>,
    ring: R,
}

impl<R: RingOps> GroupAlgebraView<R> {
    pub fn new(group: std::sync::Arc<FiniteGroup>, ring: R) -> Self {
        GroupAlgebraView { group, ring }
    }
}

impl<R: RingOps> AugmentedAlgebraView<R> for GroupAlgebraView<R> {
    fn ring(&self) -> &R {
        &self.ring
    }
    fn basis_len(&self) -> usize {
        self.group.order()
    }
    fn unit_index(&self) -> usize {
        self.group.identity() as usize
    }
    fn augmentation(&self, _i: usize) -> R::Elem {
        self.ring.one()
    }
    fn product(&self, i: usize, j: usize) -> Vec<(usize, R::Elem)> {
        vec![(self.group.mul(i as u16, j as u16) as usize, self.ring.one())]
    }
}

/// The reduced structure constants: products of `x - eps(x) 1` expressed in
/// the reduced basis. Entry lists are short (at most three terms for the
/// algebras here) and sorted.
pub struct ReducedAlgebra<R: RingOps> {
    ring: R,
    m: usize,
    prod: Vec<Vec<(u32, R::Elem)>>,
    reverse: std::sync::OnceLock<Vec<Vec<(u32, u32, R::Elem)>>>,
}

impl<R: RingOps> ReducedAlgebra<R> {
    pub fn new(view: &dyn AugmentedAlgebraView<R>) -> Self {
        let ring = view.ring().clone();
        let n = view.basis_len();
        let unit = view.unit_index();
        let m = n - 1;
        let unreduce = |r: usize| if r < unit { r } else { r + 1 };
        let reduce_idx = |b: usize| if b < unit { b } else { b - 1 };
        let mut prod = Vec::with_capacity(m * m);
        for i in 0..m {
            let bi = unreduce(i);
            let eps_i = view.augmentation(bi);
            for j in 0..m {
                let bj = unreduce(j);
                let eps_j = view.augmentation(bj);
                let mut acc: std::collections::BTreeMap<usize, R::Elem> =
                    std::collections::BTreeMap::new();
                for (b, c) in view.product(bi, bj) {
                    merge(&ring, &mut acc, b, c);
                }
                merge(&ring, &mut acc, bi, ring.neg(&eps_j));
                merge(&ring, &mut acc, bj, ring.neg(&eps_i));
                acc.remove(&unit);
                prod.push(
                    acc.into_iter()
                        .map(|(b, c)| (reduce_idx(b) as u32, c))
                        .collect(),
                );
            }
        }
        ReducedAlgebra {
            ring,
            m,
            prod,
            reverse: std::sync::OnceLock::new(),
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    /// Reduced basis size: one less than the algebra dimension.
    pub fn reduced_len(&self) -> usize {
        self.m
    }

    pub fn product(&self, i: u32, j: u32) -> &[(u32, R::Elem)] {
        &self.prod[i as usize * self.m + j as usize]
    }

    /// For each reduced basis element, the pairs whose product hits it.
    fn reverse_index(&self) -> &Vec<Vec<(u32, u32, R::Elem)>> {
        self.reverse.get_or_init(|| {
            let mut rev = vec![Vec::new(); self.m];
            for i in 0..self.m as u32 {
                for j in 0..self.m as u32 {
                    for (b, c) in self.product(i, j) {
                        rev[*b as usize].push((i, j, c.clone()));
                    }
                }
            }
            rev
        })
    }
}

fn merge<R: RingOps>(
    ring: &R,
    acc: &mut std::collections::BTreeMap<usize, R::Elem>,
    key: usize,
    val: R::Elem,
) {
    if ring.is_zero(&val) {
        return;
    }
    match acc.remove(&key) {
        None => {
            acc.insert(key, val);
        }
        Some(old) => {
            let sum = ring.add(&old, &val);
            if !ring.is_zero(&sum) {
                acc.insert(key, sum);
            }
        }
    }
}

/// The normalized bar complex of an augmented algebra, held as a lazy
/// column generator: degree `q` has dimension `m^q` and its differential
/// columns are produced on demand, never materialized together.
pub struct BarComplex<R: RingOps> {
    reduced: ReducedAlgebra<R>,
    max_q: usize,
    dims: Vec<u128>,
}

impl<R: RingOps> BarComplex<R> {
    /// Builds the complex through degree `max_q` (differentials through
    /// `max_q + 1`). Validates the view contract first.
    pub fn new(view: &dyn AugmentedAlgebraView<R>, max_q: usize, budget: &Budget) -> Result<Self> {
        validate_view(view, 0)?;
        let reduced = ReducedAlgebra::new(view);
        let m = reduced.reduced_len() as u128;
        let mut dims = Vec::with_capacity(max_q + 2);
        for q in 0..=max_q + 1 {
            let d = if q == 0 { 1 } else { m.pow(q as u32) };
            if d > budget.max_columns as u128 {
                return Err(Error::BudgetExceeded(format!(
                    "degree {q} has {d} columns, budget allows {}",
                    budget.max_columns
                )));
            }
            dims.push(d);
        }
        Ok(BarComplex {
            reduced,
            max_q,
            dims,
        })
    }

    pub fn max_q(&self) -> usize {
        self.max_q
    }

    pub fn reduced(&self) -> &ReducedAlgebra<R> {
        &self.reduced
    }

    pub fn dim(&self, q: usize) -> u64 {
        self.dims[q] as u64
    }

    fn decode(&self, mut t: u64, q: usize) -> Vec<u32> {
        let m = self.reduced.m as u64;
        let mut digits = vec![0u32; q];
        for d in digits.iter_mut().rev() {
            *d = (t % m) as u32;
            t /= m;
        }
        digits
    }

    /// The `d_q` column of basis tuple `t`: faces merge adjacent slots with
    /// alternating signs; `d_1` is the zero map.
    pub fn column(&self, q: usize, t: u64, out: &mut Vec<(u64, R::Elem)>) {
        out.clear();
        if q < 2 {
            return;
        }
        let ring = self.reduced.ring.clone();
        let m = self.reduced.m as u64;
        let digits = self.decode(t, q);
        let mut acc: std::collections::BTreeMap<u64, R::Elem> = std::collections::BTreeMap::new();
        for f in 0..q - 1 {
            let negative = f % 2 == 1;
            for (b, c) in self.reduced.product(digits[f], digits[f + 1]) {
                // the output tuple drops slot f+1 and replaces slot f by b
                let mut idx: u64 = 0;
                for slot in 0..q - 1 {
                    let digit = if slot < f {
                        digits[slot]
                    } else if slot == f {
                        *b
                    } else {
                        digits[slot + 1]
                    };
                    idx = idx * m + digit as u64;
                }
                let signed = if negative { ring.neg(c) } else { c.clone() };
                merge_u64(&ring, &mut acc, idx, signed);
            }
        }
        out.extend(acc);
    }

    /// The transposed column: row `r` of `d_q` as a sparse vector over the
    /// degree-`q` tuple space, via the reverse product index.
    pub fn transposed_column(&self, q: usize, r: u64, out: &mut Vec<(u64, R::Elem)>) {
        out.clear();
        if q < 2 {
            return;
        }
        let ring = self.reduced.ring.clone();
        let m = self.reduced.m as u64;
        let digits = self.decode(r, q - 1);
        let reverse = self.reduced.reverse_index();
        let mut acc: std::collections::BTreeMap<u64, R::Elem> = std::collections::BTreeMap::new();
        for f in 0..q - 1 {
            let negative = f % 2 == 1;
            for (x, y, c) in &reverse[digits[f] as usize] {
                let mut idx: u64 = 0;
                for (slot, &d) in digits.iter().enumerate() {
                    if slot == f {
                        idx = idx * m + *x as u64;
                        idx = idx * m + *y as u64;
                    } else {
                        idx = idx * m + d as u64;
                    }
                }
                let signed = if negative { ring.neg(c) } else { c.clone() };
                merge_u64(&ring, &mut acc, idx, signed);
            }
        }
        out.extend(acc);
    }

    /// Asserts that the boundary of a `d_q` column vanishes under
    /// `d_{q-1}`, i.e. the square-zero law, exactly.
    pub fn check_boundary_vanishes(&self, q: usize, entries: &[(u64, R::Elem)]) -> Result<()> {
        if q < 3 {
            return Ok(());
        }
        let ring = self.reduced.ring.clone();
        let mut acc: std::collections::BTreeMap<u64, R::Elem> = std::collections::BTreeMap::new();
        let mut col = Vec::new();
        for (row, coeff) in entries {
            self.column(q - 1, *row, &mut col);
            for (r2, c2) in &col {
                merge_u64(&ring, &mut acc, *r2, ring.mul(coeff, c2));
            }
        }
        if acc.is_empty() {
            Ok(())
        } else {
            Err(Error::VerificationFailed(format!(
                "d_{} o d_{q} is nonzero on a column",
                q - 1
            )))
        }
    }
}

fn merge_u64<R: RingOps>(
    ring: &R,
    acc: &mut std::collections::BTreeMap<u64, R::Elem>,
    key: u64,
    val: R::Elem,
) {
    if ring.is_zero(&val) {
        return;
    }
    match acc.remove(&key) {
        None => {
            acc.insert(key, val);
        }
        Some(old) => {
            let sum = ring.add(&old, &val);
            if !ring.is_zero(&sum) {
                acc.insert(key, sum);
            }
        }
    }
}

/// Per-degree homology, over a field or over the integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum HomologyResult {
    Betti {
        betti: Vec<usize>,
    },
    Integral {
        rank: Vec<usize>,
        divisors: Vec<Vec<u64>>,
    },
}

impl HomologyResult {
    /// Degrees covered (0..len).
    pub fn len(&self) -> usize {
        match self {
            HomologyResult::Betti { betti } => betti.len(),
            HomologyResult::Integral { rank, .. } => rank.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Compares one degree of two results of the same kind.
    pub fn degree_eq(&self, other: &Self, q: usize) -> bool {
        match (self, other) {
            (HomologyResult::Betti { betti: a }, HomologyResult::Betti { betti: b }) => {
                a.get(q) == b.get(q)
            }
            (
                HomologyResult::Integral {
                    rank: ra,
                    divisors: da,
                },
                HomologyResult::Integral {
                    rank: rb,
                    divisors: db,
                },
            ) => ra.get(q) == rb.get(q) && da.get(q) == db.get(q),
            _ => false,
        }
    }

    pub fn describe(&self, q: usize) -> String {
        match self {
            HomologyResult::Betti { betti } => format!("betti {}", betti[q]),
            HomologyResult::Integral { rank, divisors } => {
                format!("rank {} divisors {:?}", rank[q], divisors[q])
            }
        }
    }
}

/// Ranks of `d_1 .. d_{max_q + 1}` over a field by streaming elimination.
/// The rank of each differential is capped by the kernel dimension of the
/// previous one; once the cap is hit, remaining columns only run the
/// square-zero verification.
pub fn field_ranks<R: FieldRank>(
    bar: &BarComplex<R>,
    budget: &Budget,
    threads: usize,
) -> Result<Vec<usize>> {
    let max_q = bar.max_q();
    let mut ranks = vec![0usize; max_q + 2]; // index q = rank d_q; d_0 = 0
    for q in 1..=max_q + 1 {
        if q == 1 {
            ranks[1] = 0; // the differential into degree zero vanishes
            continue;
        }
        let rows = bar.dim(q - 1) as usize;
        let cols = bar.dim(q);
        let cap = rows - ranks[q - 1];
        let need = bar.ring_bytes(cap.max(1), rows);
        if need > budget.memory_bytes {
            return Err(Error::BudgetExceeded(format!(
                "echelon store for d_{q} needs {} MiB, budget {} MiB",
                need >> 20,
                budget.memory_bytes >> 20
            )));
        }
        let mut store = bar.reduced.ring.new_store(rows);
        let rank = stream_rank(&mut store, cols, cap, threads, |t, buf| {
            bar.column(q, t, buf);
            bar.check_boundary_vanishes(q, buf)
        })?;
        ranks[q] = rank;
    }
    Ok(ranks)
}

impl<R: FieldRank> BarComplex<R> {
    fn ring_bytes(&self, pivots: usize, rows: usize) -> u64 {
        self.reduced.ring.bytes_per_pivot(rows) as u64 * pivots as u64
    }
}

/// Betti numbers through degree `max_q` over a field.
pub fn field_homology<R: FieldRank>(
    bar: &BarComplex<R>,
    budget: &Budget,
    threads: usize,
) -> Result<HomologyResult> {
    let ranks = field_ranks(bar, budget, threads)?;
    let betti = (0..=bar.max_q())
        .map(|q| bar.dim(q) as usize - ranks[q] - ranks[q + 1])
        .collect();
    Ok(HomologyResult::Betti { betti })
}

/// Cohomology dimensions through degree `max_q` over a field, computed on
/// the transposed differentials. Over a field these agree with homology by
/// the transpose-rank identity, which callers assert as a cross-check.
pub fn field_cohomology<R: FieldRank>(
    bar: &BarComplex<R>,
    budget: &Budget,
    threads: usize,
) -> Result<HomologyResult> {
    let max_q = bar.max_q();
    let mut ranks = vec![0usize; max_q + 2];
    for q in 1..=max_q + 1 {
        if q == 1 {
            continue;
        }
        // Columns of the transpose live in the degree-q tuple space.
        let rows = bar.dim(q) as usize;
        let cols = bar.dim(q - 1);
        let need = bar.ring_bytes(cols as usize, rows);
        if need > budget.memory_bytes {
            return Err(Error::BudgetExceeded(format!(
                "transposed echelon store for d_{q} needs {} MiB, budget {} MiB",
                need >> 20,
                budget.memory_bytes >> 20
            )));
        }
        let mut store = bar.reduced.ring.new_store(rows);
        ranks[q] = stream_rank(&mut store, cols, rows, threads, |r, buf| {
            bar.transposed_column(q, r, buf);
            Ok(())
        })?;
        // The square-zero law is checked on the untransposed columns.
        let mut buf = Vec::new();
        if q >= 3 {
            for t in 0..bar.dim(q) {
                bar.column(q, t, &mut buf);
                bar.check_boundary_vanishes(q, &buf)?;
            }
        }
    }
    let betti = (0..=max_q)
        .map(|q| bar.dim(q) as usize - ranks[q] - ranks[q + 1])
        .collect();
    Ok(HomologyResult::Betti { betti })
}

/// Integral homology: free rank plus elementary divisors per degree, via
/// Smith normal forms of the materialized differentials.
pub fn integral_homology(bar: &BarComplex<IntegerRing>, budget: &Budget) -> Result<HomologyResult> {
    let max_q = bar.max_q();
    let mut ranks = vec![0usize; max_q + 2];
    let mut torsion: Vec<Vec<u64>> = vec![Vec::new(); max_q + 2];
    for q in 1..=max_q + 1 {
        if q == 1 {
            continue;
        }
        let rows = bar.dim(q - 1) as usize;
        let cols = bar.dim(q) as usize;
        if rows.max(cols) > budget.snf_max_dim {
            return Err(Error::BudgetExceeded(format!(
                "d_{q} is {rows} x {cols}; Smith form capped at {} per side (use a field)",
                budget.snf_max_dim
            )));
        }
        let mut triplets: Vec<(usize, usize, BigInt)> = Vec::new();
        let mut buf = Vec::new();
        for t in 0..cols as u64 {
            bar.column(q, t, &mut buf);
            bar.check_boundary_vanishes(q, &buf)?;
            for (r, c) in &buf {
                triplets.push((*r as usize, t as usize, c.clone()));
            }
        }
        let snf = smith_normal_form(rows, cols, triplets);
        ranks[q] = snf.rank;
        let mut div = Vec::new();
        for d in snf.nontrivial_divisors() {
            let v: u64 = d
                .try_into()
                .map_err(|_| Error::SizeLimit("elementary divisor exceeds u64".to_string()))?;
            div.push(v);
        }
        torsion[q] = div;
    }
    let rank = (0..=max_q)
        .map(|q| bar.dim(q) as usize - ranks[q] - ranks[q + 1])
        .collect();
    let divisors = (0..=max_q).map(|q| torsion[q + 1].clone()).collect();
    Ok(HomologyResult::Integral { rank, divisors })
}

/// Rings over which the engine can compute Tor of the trivial module.
pub trait TorRing: RingOps + Sized {
    fn tor(
        view: &dyn AugmentedAlgebraView<Self>,
        max_q: usize,
        budget: &Budget,
        threads: usize,
    ) -> Result<HomologyResult>;
}

impl TorRing for PrimeField {
    fn tor(
        view: &dyn AugmentedAlgebraView<Self>,
        max_q: usize,
        budget: &Budget,
        threads: usize,
    ) -> Result<HomologyResult> {
        let bar = BarComplex::new(view, max_q, budget)?;
        field_homology(&bar, budget, threads)
    }
}

impl TorRing for RationalRing {
    fn tor(
        view: &dyn AugmentedAlgebraView<Self>,
        max_q: usize,
        budget: &Budget,
        threads: usize,
    ) -> Result<HomologyResult> {
        let bar = BarComplex::new(view, max_q, budget)?;
        field_homology(&bar, budget, threads)
    }
}

impl TorRing for IntegerRing {
    fn tor(
        view: &dyn AugmentedAlgebraView<Self>,
        max_q: usize,
        budget: &Budget,
        _threads: usize,
    ) -> Result<HomologyResult> {
        let bar = BarComplex::new(view, max_q, budget)?;
        integral_homology(&bar, budget)
    }
}

/// Tor of the trivial module over a coloured partition algebra.
pub fn tor_of_algebra<R: TorRing>(
    ctx: &crate::algebra::AlgebraContext<R>,
    max_q: usize,
    budget: &Budget,
    threads: usize,
) -> Result<HomologyResult> {
    R::tor(&PartitionAlgebraView::new(ctx), max_q, budget, threads)
}

/// Tor of the trivial module over a group algebra, i.e. group homology.
pub fn tor_of_group<R: TorRing>(
    group: std::sync::Arc<FiniteGroup>,
    ring: R,
    max_q: usize,
    budget: &Budget,
    threads: usize,
) -> Result<HomologyResult> {
    R::tor(&GroupAlgebraView::new(group, ring), max_q, budget, threads)
}

/// Ext of the trivial module over a field: cohomology of the transposed
/// complex. Integral Ext is out of scope (it would need the universal
/// coefficient machinery), so this is only defined for field rings.
pub fn ext_of<R: FieldRank>(
    view: &dyn AugmentedAlgebraView<R>,
    max_q: usize,
    budget: &Budget,
    threads: usize,
) -> Result<HomologyResult> {
    let bar = BarComplex::new(view, max_q, budget)?;
    field_cohomology(&bar, budget, threads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraContext;
    use crate::group::wreath_product;
    use std::sync::Arc;

    fn budget() -> Budget {
        Budget::default()
    }

    fn s2() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::symmetric(2).unwrap())
    }

    #[test]
    fn group_view_passes_validation() {
        let view = GroupAlgebraView::new(s2(), IntegerRing);
        validate_view(&view, 0).unwrap();
    }

    #[test]
    fn bar_dims_and_zero_cases() {
        let view = GroupAlgebraView::new(s2(), IntegerRing);
        let bar = BarComplex::new(&view, 3, &budget()).unwrap();
        assert_eq!(bar.dim(0), 1);
        for q in 1..=4 {
            assert_eq!(bar.dim(q), 1);
        }
        // trivial group: every positive degree is zero
        let view = GroupAlgebraView::new(Arc::new(FiniteGroup::trivial()), IntegerRing);
        let bar = BarComplex::new(&view, 3, &budget()).unwrap();
        for q in 1..=4 {
            assert_eq!(bar.dim(q), 0);
        }
        let r = integral_homology(&bar, &budget()).unwrap();
        assert_eq!(
            r,
            HomologyResult::Integral {
                rank: vec![1, 0, 0, 0],
                divisors: vec![vec![], vec![], vec![], vec![]],
            }
        );
    }

    #[test]
    fn classical_pattern_for_order_two_group() {
        // Tor over Z of k[S2]: Z, Z/2, 0, Z/2 in degrees 0..3.
        let view = GroupAlgebraView::new(s2(), IntegerRing);
        let bar = BarComplex::new(&view, 3, &budget()).unwrap();
        let r = integral_homology(&bar, &budget()).unwrap();
        assert_eq!(
            r,
            HomologyResult::Integral {
                rank: vec![1, 0, 0, 0],
                divisors: vec![vec![], vec![2], vec![], vec![2]],
            }
        );
    }

    #[test]
    fn mod2_betti_of_order_two_group() {
        let ring = PrimeField::new(2).unwrap();
        let r = tor_of_group(s2(), ring, 3, &budget(), 1).unwrap();
        assert_eq!(
            r,
            HomologyResult::Betti {
                betti: vec![1, 1, 1, 1]
            }
        );
    }

    #[test]
    fn dihedral_torsion_matches_abelianization() {
        let c2 = Arc::new(FiniteGroup::cyclic(2).unwrap());
        let d4 = Arc::new(wreath_product(&c2, 2).unwrap());
        let r = tor_of_group(d4.clone(), IntegerRing, 1, &budget(), 1).unwrap();
        assert_eq!(
            r,
            HomologyResult::Integral {
                rank: vec![1, 0],
                divisors: vec![vec![], vec![2, 2]],
            }
        );
        let inv: Vec<u64> = d4
            .abelian_invariants()
            .iter()
            .map(|d| u64::try_from(d).unwrap())
            .collect();
        assert_eq!(inv, vec![2, 2]);
    }

    #[test]
    fn symmetric_three_homology() {
        let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
        let r = tor_of_group(s3.clone(), IntegerRing, 1, &budget(), 1).unwrap();
        assert_eq!(
            r,
            HomologyResult::Integral {
                rank: vec![1, 0],
                divisors: vec![vec![], vec![2]],
            }
        );
        // mod-2 and mod-3 Betti patterns through degree 2
        let f2 = PrimeField::new(2).unwrap();
        let r = tor_of_group(s3.clone(), f2, 2, &budget(), 1).unwrap();
        assert_eq!(
            r,
            HomologyResult::Betti {
                betti: vec![1, 1, 1]
            }
        );
        let f3 = PrimeField::new(3).unwrap();
        let r = tor_of_group(s3, f3, 2, &budget(), 1).unwrap();
        assert_eq!(
            r,
            HomologyResult::Betti {
                betti: vec![1, 0, 0]
            }
        );
    }

    #[test]
    fn rational_betti_equals_integral_free_rank() {
        let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
        let q = tor_of_group(s3.clone(), RationalRing, 2, &budget(), 1).unwrap();
        let z = tor_of_group(s3, IntegerRing, 2, &budget(), 1).unwrap();
        match (q, z) {
            (HomologyResult::Betti { betti }, HomologyResult::Integral { rank, .. }) => {
                assert_eq!(betti, rank);
            }
            _ => panic!("unexpected result kinds"),
        }
    }

    #[test]
    fn ext_matches_tor_dimensions_over_fields() {
        let f2 = PrimeField::new(2).unwrap();
        let view = GroupAlgebraView::new(s2(), f2.clone());
        let ext = ext_of(&view, 3, &budget(), 1).unwrap();
        let tor = tor_of_group(s2(), f2, 3, &budget(), 1).unwrap();
        assert_eq!(ext, tor);
    }

    #[test]
    fn partition_algebra_smallest_case() {
        // P_1 over the trivial group with delta = 1 mod 2: two-dimensional,
        // and the single reduced generator squares to itself.
        let ring = PrimeField::new(2).unwrap();
        let delta = 1u64;
        let ctx = AlgebraContext::new(1, Arc::new(FiniteGroup::trivial()), delta, ring).unwrap();
        let r = tor_of_algebra(&ctx, 2, &budget(), 1).unwrap();
        assert_eq!(
            r,
            HomologyResult::Betti {
                betti: vec![1, 0, 0]
            }
        );
        // with delta = 0 the generator squares to zero and homology grows
        let ring = PrimeField::new(2).unwrap();
        let ctx = AlgebraContext::new(1, Arc::new(FiniteGroup::trivial()), 0u64, ring).unwrap();
        let r = tor_of_algebra(&ctx, 2, &budget(), 1).unwrap();
        assert_eq!(
            r,
            HomologyResult::Betti {
                betti: vec![1, 1, 1]
            }
        );
    }

    #[test]
    fn ext_matches_tor_for_the_partition_algebra() {
        let f2 = PrimeField::new(2).unwrap();
        let c2 = Arc::new(FiniteGroup::cyclic(2).unwrap());
        let ctx = AlgebraContext::new(2, c2, 1u64, f2).unwrap();
        let view = PartitionAlgebraView::new(&ctx);
        let ext = ext_of(&view, 1, &budget(), 1).unwrap();
        let tor = tor_of_algebra(&ctx, 1, &budget(), 1).unwrap();
        assert_eq!(ext, tor);
        assert_eq!(ext, HomologyResult::Betti { betti: vec![1, 2] });
    }

    #[test]
    fn prime_field_betti_dominates_rational_betti() {
        let c2 = Arc::new(FiniteGroup::cyclic(2).unwrap());
        let ctx_q = AlgebraContext::new(2, c2.clone(), RationalRing.one(), RationalRing).unwrap();
        let rational = match tor_of_algebra(&ctx_q, 1, &budget(), 1).unwrap() {
            HomologyResult::Betti { betti } => betti,
            _ => unreachable!(),
        };
        for p in [2u64, 3, 5] {
            let ring = PrimeField::new(p).unwrap();
            let one = ring.one();
            let ctx = AlgebraContext::new(2, c2.clone(), one, ring).unwrap();
            let modular = match tor_of_algebra(&ctx, 1, &budget(), 1).unwrap() {
                HomologyResult::Betti { betti } => betti,
                _ => unreachable!(),
            };
            for (m, r) in modular.iter().zip(&rational) {
                assert!(m >= r);
            }
        }
    }

    #[test]
    fn snf_budget_guard_fires() {
        let tight = Budget {
            snf_max_dim: 2,
            ..Budget::default()
        };
        let view = GroupAlgebraView::new(s2(), IntegerRing);
        let bar = BarComplex::new(&view, 3, &tight).unwrap();
        let _ = bar;
        let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
        let err = tor_of_group(s3, IntegerRing, 2, &tight, 1);
        assert!(matches!(err, Err(Error::BudgetExceeded(_))));
    }
}
