//! Left ideals indexed by isolated right nodes (`K_i`) and coloured right
//! pairs (`L_{i,j,g}`), their intersections, the combinatorial zero
//! criterion, and idempotent generators built from retraction diagrams.
//! Both are free on subsets of the diagram basis, so every question about
//! them reduces to set arithmetic on basis indices plus a handful of
//! products, all of which is verified here at small sizes.

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::algebra::{AlgebraContext, AlgebraElement};
use crate::diagram::{mu, nu, ColouredDiagram};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupElem};
use crate::ring::RingOps;
use crate::rng::derive_rng;

/// Sorted basis indices of an ideal that is free on a subset of the
/// diagram basis.
pub type IdealBasis = Vec<u32>;

/// Cap on the number of cover specs processed exhaustively; larger spaces
/// fall back to seeded sampling.
pub const MAX_EXHAUSTIVE_SPECS: u128 = 1_000_000;
/// Number of specs drawn in sampled mode.
pub const SAMPLED_SPECS: usize = 10_000;

/// An intersection of cover ideals: right indices in `s` must be isolated
/// and every `((i, j), g)` in `t` forces the coloured right pair.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CoverSpec {
    s: BTreeSet<usize>,
    t: BTreeSet<(usize, usize, GroupElem)>,
}

impl CoverSpec {
    pub fn new(
        n: usize,
        s: impl IntoIterator<Item = usize>,
        t: impl IntoIterator<Item = (usize, usize, GroupElem)>,
        group: &FiniteGroup,
    ) -> Result<Self> {
        let s: BTreeSet<usize> = s.into_iter().collect();
        let t: BTreeSet<(usize, usize, GroupElem)> = t.into_iter().collect();
        for &i in &s {
            if i == 0 || i > n {
                return Err(Error::BadIndex(format!("S entry {i} outside 1..={n}")));
            }
        }
        for &(i, j, g) in &t {
            if i == 0 || j > n || i >= j {
                return Err(Error::BadIndex(format!(
                    "T entry ({i}, {j}) needs 1 <= i < j <= {n}"
                )));
            }
            if g as usize >= group.order() {
                return Err(Error::BadIndex(format!("colour index {g} out of range")));
            }
        }
        Ok(CoverSpec { s, t })
    }

    pub fn empty() -> Self {
        CoverSpec {
            s: BTreeSet::new(),
            t: BTreeSet::new(),
        }
    }

    pub fn s(&self) -> impl Iterator<Item = usize> + '_ {
        self.s.iter().copied()
    }

    pub fn t(&self) -> impl Iterator<Item = (usize, usize, GroupElem)> + '_ {
        self.t.iter().copied()
    }

    /// `|S| + |T|`, the quantity bounded by the cover height.
    pub fn weight(&self) -> usize {
        self.s.len() + self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty() && self.t.is_empty()
    }

    pub fn to_json(&self, group: &FiniteGroup) -> SpecJson {
        SpecJson {
            s: self.s.iter().copied().collect(),
            t: self
                .t
                .iter()
                .map(|&(i, j, g)| (i, j, group.name(g).to_string()))
                .collect(),
        }
    }
}

#[derive(Serialize, Debug, Clone)]
pub struct SpecJson {
    pub s: Vec<usize>,
    pub t: Vec<(usize, usize, String)>,
}

/// Membership of a diagram in `K_i`: the right node `i` is a singleton.
pub fn in_k(d: &ColouredDiagram, i: usize) -> bool {
    let n = d.size();
    let node = n + i - 1;
    let block = d.partition().block_of(node);
    (0..2 * n).all(|v| v == node || d.partition().block_of(v) != block)
}

/// Membership in `L_{i,j,g}`: right nodes `i` and `j` share a block with
/// `gamma(i-bar, j-bar) = g`.
pub fn in_l(d: &ColouredDiagram, i: usize, j: usize, g: GroupElem, group: &FiniteGroup) -> bool {
    let n = d.size();
    let (vi, vj) = (n + i - 1, n + j - 1);
    if d.partition().block_of(vi) != d.partition().block_of(vj) {
        return false;
    }
    group.mul(group.inv(d.colour_of(vi)), d.colour_of(vj)) == g
}

fn in_spec<R: RingOps>(ctx: &AlgebraContext<R>, d: &ColouredDiagram, spec: &CoverSpec) -> bool {
    spec.s.iter().all(|&i| in_k(d, i))
        && spec
            .t
            .iter()
            .all(|&(i, j, g)| in_l(d, i, j, g, ctx.group()))
}

/// Basis of `K_i`.
pub fn k_ideal_basis<R: RingOps>(ctx: &AlgebraContext<R>, i: usize) -> Result<IdealBasis> {
    if i == 0 || i > ctx.n() {
        return Err(Error::BadIndex(format!(
            "K index {i} outside 1..={}",
            ctx.n()
        )));
    }
    Ok((0..ctx.dim() as u32)
        .filter(|&idx| in_k(&ctx.diagram(idx), i))
        .collect())
}

/// Basis of `L_{i,j,g}`.
pub fn l_ideal_basis<R: RingOps>(
    ctx: &AlgebraContext<R>,
    i: usize,
    j: usize,
    g: GroupElem,
) -> Result<IdealBasis> {
    if i == 0 || j > ctx.n() || i >= j {
        return Err(Error::BadIndex(format!(
            "L indices ({i}, {j}) need 1 <= i < j <= {}",
            ctx.n()
        )));
    }
    if g as usize >= ctx.group().order() {
        return Err(Error::BadIndex(format!("colour index {g} out of range")));
    }
    Ok((0..ctx.dim() as u32)
        .filter(|&idx| in_l(&ctx.diagram(idx), i, j, g, ctx.group()))
        .collect())
}

/// Basis of the intersection named by a spec. The empty spec denotes the
/// unit ideal, i.e. the whole diagram basis.
pub fn intersection_basis<R: RingOps>(ctx: &AlgebraContext<R>, spec: &CoverSpec) -> IdealBasis {
    (0..ctx.dim() as u32)
        .filter(|&idx| in_spec(ctx, &ctx.diagram(idx), spec))
        .collect()
}

/// True when the union of all `K` and `L` bases is exactly the span of
/// non-permutation diagrams, with every cover ideal contained in it.
pub fn cover_union_check<R: RingOps>(ctx: &AlgebraContext<R>) -> bool {
    let n = ctx.n();
    let group = ctx.group();
    (0..ctx.dim() as u32).all(|idx| {
        let d = ctx.diagram(idx);
        let covered = (1..=n).any(|i| in_k(&d, i))
            || (1..=n)
                .tuple_combinations()
                .any(|(i, j)| (0..group.order() as GroupElem).any(|g| in_l(&d, i, j, g, group)));
        covered == !ctx.is_permutation_index(idx)
    })
}

/// Combinatorial zero test: the intersection vanishes exactly when an
/// isolated index collides with a pair, a pair carries two colours, or a
/// colour triangle fails to compose.
pub fn is_zero_by_criterion(spec: &CoverSpec, group: &FiniteGroup) -> bool {
    for &(i, j, _) in &spec.t {
        if spec.s.contains(&i) || spec.s.contains(&j) {
            return true;
        }
    }
    let pairs: Vec<(usize, usize, GroupElem)> = spec.t.iter().copied().collect();
    for (a, &(i1, j1, g)) in pairs.iter().enumerate() {
        for &(i2, j2, h) in &pairs[a + 1..] {
            if (i1, j1) == (i2, j2) && g != h {
                return true;
            }
        }
    }
    for &(i, j, f) in &pairs {
        for &(j2, k, g) in &pairs {
            if j2 != j {
                continue;
            }
            for &(i3, k3, h) in &pairs {
                if i3 == i && k3 == k && h != group.mul(f, g) {
                    return true;
                }
            }
        }
    }
    false
}

/// Chooses the through-strand for the mu chain: the smallest column index
/// outside `S`.
fn mu_partner(n: usize, spec: &CoverSpec) -> Result<usize> {
    (1..=n).find(|i| !spec.s.contains(i)).ok_or(Error::FullS)
}

fn build_generator<R: RingOps>(
    ctx: &AlgebraContext<R>,
    spec: &CoverSpec,
) -> Result<AlgebraElement<R>> {
    let n = ctx.n();
    let b = mu_partner(n, spec)?;
    let mut e = ctx.one();
    for a in spec.s.iter().copied() {
        let m = mu(n, a, b, ctx.group())?;
        let idx = ctx
            .index_of(&m)
            .ok_or_else(|| Error::BadIndex("mu diagram missing from basis".into()))?;
        e = ctx.multiply(&e, &ctx.basis_element(idx))?;
    }
    for (i, j, h) in spec.t.iter().copied() {
        let v = nu(n, i, j, h, ctx.group())?;
        let idx = ctx
            .index_of(&v)
            .ok_or_else(|| Error::BadIndex("nu diagram missing from basis".into()))?;
        e = ctx.multiply(&e, &ctx.basis_element(idx))?;
    }
    Ok(e)
}

/// The idempotent generating a nonzero intersection: the product of one mu
/// per isolated index (ascending, through-strand fixed to the smallest
/// index outside `S`) followed by one nu per coloured pair in
/// lexicographic order. The returned element is verified: it squares to
/// itself, fixes every basis diagram of the intersection under right
/// multiplication, and is supported inside the intersection.
pub fn idempotent_generator<R: RingOps>(
    ctx: &AlgebraContext<R>,
    spec: &CoverSpec,
) -> Result<AlgebraElement<R>> {
    let basis = intersection_basis(ctx, spec);
    if basis.is_empty() {
        return Err(Error::ZeroIdeal);
    }
    if spec.s.len() == ctx.n() {
        return Err(Error::FullS);
    }
    let e = build_generator(ctx, spec)?;
    if let Some(witness) = generator_defect(ctx, spec, &basis, &e)? {
        return Err(Error::VerificationFailed(witness));
    }
    Ok(e)
}

/// Checks the three generator identities; returns a witness on failure.
fn generator_defect<R: RingOps>(
    ctx: &AlgebraContext<R>,
    spec: &CoverSpec,
    basis: &[u32],
    e: &AlgebraElement<R>,
) -> Result<Option<String>> {
    let _ = spec;
    let basis_set: BTreeSet<u32> = basis.iter().copied().collect();
    if !e.support().all(|i| basis_set.contains(&i)) {
        return Ok(Some("generator support leaves the intersection".into()));
    }
    let ee = ctx.multiply(e, e)?;
    if ee != *e {
        return Ok(Some("generator is not idempotent".into()));
    }
    for &d in basis {
        let de = ctx.multiply(&ctx.basis_element(d), e)?;
        if de != ctx.basis_element(d) {
            return Ok(Some(format!(
                "right multiplication by the generator moves basis diagram {d}"
            )));
        }
    }
    Ok(None)
}

/// Per-call report for one retraction check.
#[derive(Serialize, Debug, Clone)]
pub struct RetractionReport {
    pub checked: usize,
    pub vacuous: bool,
    pub failures: Vec<String>,
}

impl RetractionReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Right multiplication by `mu(a, b)` maps the intersection into its meet
/// with `K_a` and fixes that meet pointwise with no loop factors.
pub fn verify_retraction_mu<R: RingOps>(
    ctx: &AlgebraContext<R>,
    spec: &CoverSpec,
    a: usize,
    b: usize,
) -> Result<RetractionReport> {
    if spec.s.contains(&a) || spec.s.contains(&b) {
        return Err(Error::BadIndex(format!(
            "mu retraction needs a, b outside S, got ({a}, {b})"
        )));
    }
    let m = mu(ctx.n(), a, b, ctx.group())?;
    let m_idx = ctx
        .index_of(&m)
        .ok_or_else(|| Error::BadIndex("mu diagram missing from basis".into()))?;
    let j_basis = intersection_basis(ctx, spec);
    let target: BTreeSet<u32> = j_basis
        .iter()
        .copied()
        .filter(|&d| in_k(&ctx.diagram(d), a))
        .collect();
    retraction_scan(ctx, &j_basis, &target, m_idx)
}

/// Right multiplication by `nu(a, b, h)` maps the intersection into its
/// meet with `L_{a,b,h}` and fixes that meet pointwise with no loop
/// factors.
pub fn verify_retraction_nu<R: RingOps>(
    ctx: &AlgebraContext<R>,
    spec: &CoverSpec,
    a: usize,
    b: usize,
    h: GroupElem,
) -> Result<RetractionReport> {
    if spec.t.contains(&(a, b, h)) {
        return Err(Error::BadIndex(format!(
            "nu retraction needs (({a}, {b}), colour) outside T"
        )));
    }
    let v = nu(ctx.n(), a, b, h, ctx.group())?;
    let v_idx = ctx
        .index_of(&v)
        .ok_or_else(|| Error::BadIndex("nu diagram missing from basis".into()))?;
    let j_basis = intersection_basis(ctx, spec);
    let target: BTreeSet<u32> = j_basis
        .iter()
        .copied()
        .filter(|&d| in_l(&ctx.diagram(d), a, b, h, ctx.group()))
        .collect();
    retraction_scan(ctx, &j_basis, &target, v_idx)
}

fn retraction_scan<R: RingOps>(
    ctx: &AlgebraContext<R>,
    j_basis: &[u32],
    target: &BTreeSet<u32>,
    retractor: u32,
) -> Result<RetractionReport> {
    if target.is_empty() {
        return Ok(RetractionReport {
            checked: 0,
            vacuous: true,
            failures: Vec::new(),
        });
    }
    let mut failures = Vec::new();
    let mut checked = 0;
    for &d in j_basis {
        checked += 1;
        match ctx.multiply_basis(d, retractor) {
            None => {} // zero lands in every span
            Some((k, exp)) => {
                if exp != 0 {
                    failures.push(format!(
                        "diagram {d}: retraction product carries a loop factor"
                    ));
                } else if !target.contains(&k) {
                    failures.push(format!(
                        "diagram {d}: retraction product {k} misses the target ideal"
                    ));
                }
            }
        }
        if target.contains(&d) {
            match ctx.multiply_basis(d, retractor) {
                Some((k, 0)) if k == d => {}
                other => failures.push(format!(
                    "diagram {d}: expected exact fixed point, got {other:?}"
                )),
            }
        }
    }
    Ok(RetractionReport {
        checked,
        vacuous: false,
        failures,
    })
}

#[derive(Serialize, Debug, Clone)]
pub struct CoverFailure {
    pub spec: SpecJson,
    pub kind: String,
    pub witness: String,
}

/// Structured result of a full cover verification run.
#[derive(Serialize, Debug, Clone)]
pub struct CoverReport {
    pub width: usize,
    pub height: usize,
    pub checked: usize,
    pub exhaustive: bool,
    pub seed: u64,
    pub union_ok: bool,
    pub failures: Vec<CoverFailure>,
}

impl CoverReport {
    pub fn pass(&self) -> bool {
        self.union_ok && self.failures.is_empty()
    }
}

/// How the spec space is traversed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecMode {
    /// Exhaustive when the space fits under the cap, sampled otherwise.
    Auto,
    /// Exhaustive or error out.
    Exhaustive,
    /// Seeded sampling regardless of size.
    Sampled,
}

impl SpecMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SpecMode::Auto),
            "exhaustive" => Ok(SpecMode::Exhaustive),
            "sampled" => Ok(SpecMode::Sampled),
            other => Err(Error::Parse(format!(
                "unknown mode {other:?}; expected auto, exhaustive or sampled"
            ))),
        }
    }
}

/// Enumerates every cover spec, with no weight bound, when the full space
/// has at most `cap` members.
pub fn all_specs_unbounded<R: RingOps>(
    ctx: &AlgebraContext<R>,
    cap: u128,
) -> Option<Vec<CoverSpec>> {
    let n = ctx.n();
    let group = ctx.group();
    let pair_count = n * (n - 1) / 2 * group.order();
    if n >= 32 || pair_count >= 64 {
        return None;
    }
    let total = (1u128 << n) * (1u128 << pair_count);
    if total > cap {
        return None;
    }
    let triples: Vec<(usize, usize, GroupElem)> = (1..=n)
        .tuple_combinations()
        .flat_map(|(i, j)| (0..group.order() as GroupElem).map(move |g| (i, j, g)))
        .collect();
    let mut out = Vec::with_capacity(total as usize);
    for s_mask in 0u64..1 << n {
        let s: BTreeSet<usize> = (0..n)
            .filter(|b| s_mask >> b & 1 == 1)
            .map(|b| b + 1)
            .collect();
        for t_mask in 0u64..1 << pair_count {
            let t: BTreeSet<(usize, usize, GroupElem)> = (0..pair_count)
                .filter(|b| t_mask >> b & 1 == 1)
                .map(|b| triples[b])
                .collect();
            out.push(CoverSpec { s: s.clone(), t });
        }
    }
    Some(out)
}

/// Enumerates all cover specs of weight at most `height`.
pub fn all_specs<R: RingOps>(ctx: &AlgebraContext<R>, height: usize) -> Vec<CoverSpec> {
    let n = ctx.n();
    let group = ctx.group();
    let triples: Vec<(usize, usize, GroupElem)> = (1..=n)
        .tuple_combinations()
        .flat_map(|(i, j)| (0..group.order() as GroupElem).map(move |g| (i, j, g)))
        .collect();
    let mut out = Vec::new();
    for s_size in 0..=height.min(n) {
        for s in (1..=n).combinations(s_size) {
            for t_size in 0..=(height - s_size).min(triples.len()) {
                for t in triples.iter().copied().combinations(t_size) {
                    out.push(CoverSpec {
                        s: s.iter().copied().collect(),
                        t: t.into_iter().collect(),
                    });
                }
            }
        }
    }
    out
}

fn spec_space_size(n: usize, group_order: usize, height: usize) -> u128 {
    let pair_count = n * (n - 1) / 2 * group_order;
    let mut total: u128 = 0;
    for s in 0..=height.min(n) {
        for t in 0..=(height - s).min(pair_count) {
            total += binomial(n, s) * binomial(pair_count, t);
        }
    }
    total
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Runs the whole cover verification at the given height: the covering
/// property of the ideal family, the zero criterion against actual basis
/// intersections, generator identities for every nonzero intersection, and
/// the mu/nu retraction laws. Exhaustive when the spec space is small
/// enough, otherwise seeded sampling. Failures are collected, not thrown.
pub fn verify_cover<R: RingOps>(
    ctx: &AlgebraContext<R>,
    height: usize,
    seed: u64,
    mode: SpecMode,
) -> Result<CoverReport> {
    let n = ctx.n();
    if n == 0 || height > n.saturating_sub(1) {
        return Err(Error::BadIndex(format!(
            "cover height {height} exceeds n - 1 = {}",
            n.saturating_sub(1)
        )));
    }
    let group = ctx.group().clone();
    let width = n + n * (n - 1) / 2 * group.order();
    let mut failures = Vec::new();

    let union_ok = cover_union_check(ctx);

    let space = spec_space_size(n, group.order(), height);
    let exhaustive = match mode {
        SpecMode::Auto => space <= MAX_EXHAUSTIVE_SPECS,
        SpecMode::Exhaustive => {
            if space > MAX_EXHAUSTIVE_SPECS {
                return Err(Error::SizeLimit(format!(
                    "{space} cover specs exceed the exhaustive cap {MAX_EXHAUSTIVE_SPECS}"
                )));
            }
            true
        }
        SpecMode::Sampled => false,
    };
    let specs: Vec<CoverSpec> = if exhaustive {
        all_specs(ctx, height)
    } else {
        sample_specs(ctx, height, SAMPLED_SPECS, seed)
    };

    let mut checked = 0;
    for spec in &specs {
        checked += 1;
        let basis = intersection_basis(ctx, spec);
        let predicted_zero = is_zero_by_criterion(spec, &group);
        if predicted_zero != basis.is_empty() {
            failures.push(CoverFailure {
                spec: spec.to_json(&group),
                kind: "zero-criterion".into(),
                witness: format!(
                    "criterion says {predicted_zero}, basis has {} diagrams",
                    basis.len()
                ),
            });
            continue;
        }
        if basis.is_empty() {
            continue;
        }

        let e = build_generator(ctx, spec)?;
        if let Some(witness) = generator_defect(ctx, spec, &basis, &e)? {
            failures.push(CoverFailure {
                spec: spec.to_json(&group),
                kind: "generator".into(),
                witness,
            });
        }

        for (a, b) in (1..=n).tuple_combinations() {
            if spec.s.contains(&a) || spec.s.contains(&b) {
                continue;
            }
            for (x, y) in [(a, b), (b, a)] {
                let report = verify_retraction_mu(ctx, spec, x, y)?;
                for w in report.failures {
                    failures.push(CoverFailure {
                        spec: spec.to_json(&group),
                        kind: format!("mu-retraction({x},{y})"),
                        witness: w,
                    });
                }
            }
            for g in 0..group.order() as GroupElem {
                if spec.t.contains(&(a, b, g)) {
                    continue;
                }
                let report = verify_retraction_nu(ctx, spec, a, b, g)?;
                for w in report.failures {
                    failures.push(CoverFailure {
                        spec: spec.to_json(&group),
                        kind: format!("nu-retraction({a},{b},{})", group.name(g)),
                        witness: w,
                    });
                }
            }
        }
    }

    Ok(CoverReport {
        width,
        height,
        checked,
        exhaustive,
        seed,
        union_ok,
        failures,
    })
}

fn sample_specs<R: RingOps>(
    ctx: &AlgebraContext<R>,
    height: usize,
    count: usize,
    seed: u64,
) -> Vec<CoverSpec> {
    let n = ctx.n();
    let group = ctx.group();
    let triples: Vec<(usize, usize, GroupElem)> = (1..=n)
        .tuple_combinations()
        .flat_map(|(i, j)| (0..group.order() as GroupElem).map(move |g| (i, j, g)))
        .collect();
    let columns: Vec<usize> = (1..=n).collect();
    let mut rng = derive_rng(seed, "cover.spec-sample");
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let s_size = rng.gen_range(0..=height.min(n));
        let t_size = rng.gen_range(0..=(height - s_size).min(triples.len()));
        let s: Vec<usize> = columns.choose_multiple(&mut rng, s_size).copied().collect();
        let t: Vec<(usize, usize, GroupElem)> =
            triples.choose_multiple(&mut rng, t_size).copied().collect();
        out.push(CoverSpec {
            s: s.into_iter().collect(),
            t: t.into_iter().collect(),
        });
    }
    out
}
