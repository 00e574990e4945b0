//! The coloured partition algebras as sparse linear combinations of interned
//! basis diagrams, together with the augmentation, the ideal spanned by
//! non-permutation diagrams, and the quotient onto the wreath group algebra.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::diagram::{
    compose, enumerate_diagrams, identity_diagram, ColouredDiagram, CompositionOutcome,
    DiagramArena, DiagramJson, DEFAULT_DIAGRAM_CAP,
};
use crate::error::{Error, Result};
use crate::group::{invert_perm, wreath_product, wreath_rank, FiniteGroup, GroupElem};
use crate::ring::RingOps;
use crate::rng::derive_rng;

static NEXT_CONTEXT_ID: AtomicU64 = AtomicU64::new(0);

/// Everything needed to compute inside one algebra: the size, the colour
/// group, the loop parameter and the coefficient ring, plus the interned
/// basis in enumeration order. Immutable once built.
pub struct AlgebraContext<R: RingOps> {
    id: u64,
    n: usize,
    group: Arc<FiniteGroup>,
    delta: R::Elem,
    ring: R,
    arena: DiagramArena,
    dim: usize,
    is_permutation: Vec<bool>,
    one_index: u32,
    wreath: OnceLock<Arc<FiniteGroup>>,
}

impl<R: RingOps> AlgebraContext<R> {
    pub fn new(n: usize, group: Arc<FiniteGroup>, delta: R::Elem, ring: R) -> Result<Self> {
        Self::with_cap(n, group, delta, ring, DEFAULT_DIAGRAM_CAP)
    }

    /// Builds the context and interns the whole basis in enumeration order,
    /// so indices are stable and composition results always resolve.
    pub fn with_cap(
        n: usize,
        group: Arc<FiniteGroup>,
        delta: R::Elem,
        ring: R,
        cap: u128,
    ) -> Result<Self> {
        let arena = DiagramArena::new();
        let mut is_permutation = Vec::new();
        for d in enumerate_diagrams(n, &group, cap)? {
            is_permutation.push(d.is_permutation());
            arena.intern(d);
        }
        let dim = arena.len();
        let one_index = arena
            .lookup(&identity_diagram(n, &group))
            .expect("identity diagram is enumerated");
        Ok(AlgebraContext {
            id: NEXT_CONTEXT_ID.fetch_add(1, Ordering::Relaxed),
            n,
            group,
            delta,
            ring,
            arena,
            dim,
            is_permutation,
            one_index,
            wreath: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn delta(&self) -> &R::Elem {
        &self.delta
    }

    /// Dimension of the algebra: the number of coloured diagrams.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn diagram(&self, index: u32) -> Arc<ColouredDiagram> {
        self.arena.get(index)
    }

    pub fn index_of(&self, d: &ColouredDiagram) -> Option<u32> {
        self.arena.lookup(d)
    }

    pub fn is_permutation_index(&self, index: u32) -> bool {
        self.is_permutation[index as usize]
    }

    pub fn one_index(&self) -> u32 {
        self.one_index
    }

    /// Indices of the permutation diagrams.
    pub fn permutation_basis(&self) -> Vec<u32> {
        (0..self.dim as u32)
            .filter(|&i| self.is_permutation[i as usize])
            .collect()
    }

    /// Basis of the two-sided ideal spanned by non-permutation diagrams.
    pub fn ideal_basis(&self) -> Vec<u32> {
        (0..self.dim as u32)
            .filter(|&i| !self.is_permutation[i as usize])
            .collect()
    }

    pub fn zero(&self) -> AlgebraElement<R> {
        AlgebraElement {
            ctx_id: self.id,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> AlgebraElement<R> {
        self.basis_element(self.one_index)
    }

    pub fn basis_element(&self, index: u32) -> AlgebraElement<R> {
        let mut terms = BTreeMap::new();
        terms.insert(index, self.ring.one());
        AlgebraElement {
            ctx_id: self.id,
            terms,
        }
    }

    pub fn from_terms(
        &self,
        entries: impl IntoIterator<Item = (u32, R::Elem)>,
    ) -> AlgebraElement<R> {
        let mut out = self.zero();
        for (i, c) in entries {
            self.add_term(&mut out, i, &c);
        }
        out
    }

    fn check(&self, u: &AlgebraElement<R>) -> Result<()> {
        if u.ctx_id != self.id {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    fn add_term(&self, u: &mut AlgebraElement<R>, index: u32, coeff: &R::Elem) {
        if self.ring.is_zero(coeff) {
            return;
        }
        match u.terms.remove(&index) {
            None => {
                u.terms.insert(index, coeff.clone());
            }
            Some(old) => {
                let sum = self.ring.add(&old, coeff);
                if !self.ring.is_zero(&sum) {
                    u.terms.insert(index, sum);
                }
            }
        }
    }

    pub fn add(&self, u: &AlgebraElement<R>, v: &AlgebraElement<R>) -> AlgebraElement<R> {
        let mut out = u.clone();
        for (&i, c) in &v.terms {
            self.add_term(&mut out, i, c);
        }
        out
    }

    pub fn scale(&self, c: &R::Elem, u: &AlgebraElement<R>) -> AlgebraElement<R> {
        let mut out = self.zero();
        for (&i, x) in &u.terms {
            self.add_term(&mut out, i, &self.ring.mul(c, x));
        }
        out
    }

    pub fn sub(&self, u: &AlgebraElement<R>, v: &AlgebraElement<R>) -> AlgebraElement<R> {
        let mut out = u.clone();
        for (&i, c) in &v.terms {
            self.add_term(&mut out, i, &self.ring.neg(c));
        }
        out
    }

    /// Product of two basis diagrams: the composed diagram index and the
    /// internal-component count, or `None` on a colour mismatch.
    pub fn multiply_basis(&self, i: u32, j: u32) -> Option<(u32, u32)> {
        let d1 = self.arena.get(i);
        let d2 = self.arena.get(j);
        match compose(&d1, &d2, &self.group).expect("context diagrams share a size") {
            CompositionOutcome::Zero => None,
            CompositionOutcome::Diagram {
                diagram,
                internal_components,
            } => Some((self.arena.intern(diagram), internal_components)),
        }
    }

    /// Bilinear extension of `d1 . d2 = delta^(internal components) (d1 d2)`,
    /// with colour-mismatched composites contributing zero.
    pub fn multiply(
        &self,
        u: &AlgebraElement<R>,
        v: &AlgebraElement<R>,
    ) -> Result<AlgebraElement<R>> {
        self.check(u)?;
        self.check(v)?;
        let mut out = self.zero();
        for (&i, ci) in &u.terms {
            for (&j, cj) in &v.terms {
                if let Some((k, exp)) = self.multiply_basis(i, j) {
                    let coeff = self
                        .ring
                        .mul(&self.ring.mul(ci, cj), &self.ring.pow(&self.delta, exp));
                    self.add_term(&mut out, k, &coeff);
                }
            }
        }
        Ok(out)
    }

    /// The augmentation: permutation diagrams map to one, everything else
    /// to zero.
    pub fn augmentation(&self, u: &AlgebraElement<R>) -> R::Elem {
        let mut acc = self.ring.zero();
        for (&i, c) in &u.terms {
            if self.is_permutation[i as usize] {
                acc = self.ring.add(&acc, c);
            }
        }
        acc
    }

    /// The wreath product the quotient algebra is isomorphic to; built once
    /// on first use.
    pub fn wreath_group(&self) -> Result<Arc<FiniteGroup>> {
        if let Some(w) = self.wreath.get() {
            return Ok(Arc::clone(w));
        }
        let w = Arc::new(wreath_product(&self.group, self.n)?);
        let _ = self.wreath.set(Arc::clone(&w));
        Ok(w)
    }

    /// Image of a permutation diagram in the wreath group: the strand
    /// labels indexed by left node, paired with the inverse of the strand
    /// permutation. With the group-side action convention this makes the
    /// map multiplicative for left-to-right diagram composition.
    pub fn quotient_map_diagram(&self, index: u32) -> Result<GroupElem> {
        let d = self.arena.get(index);
        let (sigma, labels) = d.as_permutation().ok_or(Error::NotAPermutationDiagram)?;
        let sigma_inv = invert_perm(&sigma);
        Ok(wreath_rank(self.group.order(), &labels, &sigma_inv) as GroupElem)
    }

    /// Pushes an element through the quotient: multiply in the diagram
    /// algebra, discard non-permutation terms, read off wreath elements.
    pub fn quotient_map(&self, u: &AlgebraElement<R>) -> Result<WreathAlgebraElement<R>> {
        self.check(u)?;
        let mut terms: BTreeMap<GroupElem, R::Elem> = BTreeMap::new();
        for (&i, c) in &u.terms {
            if !self.is_permutation[i as usize] {
                continue;
            }
            let w = self.quotient_map_diagram(i)?;
            match terms.remove(&w) {
                None => {
                    terms.insert(w, c.clone());
                }
                Some(old) => {
                    let sum = self.ring.add(&old, c);
                    if !self.ring.is_zero(&sum) {
                        terms.insert(w, sum);
                    }
                }
            }
        }
        Ok(WreathAlgebraElement { terms })
    }

    /// The product in the quotient: multiply then project.
    pub fn quotient_multiply(
        &self,
        u: &AlgebraElement<R>,
        v: &AlgebraElement<R>,
    ) -> Result<WreathAlgebraElement<R>> {
        self.quotient_map(&self.multiply(u, v)?)
    }

    /// Group-algebra convolution on the wreath side.
    pub fn wreath_multiply(
        &self,
        u: &WreathAlgebraElement<R>,
        v: &WreathAlgebraElement<R>,
    ) -> Result<WreathAlgebraElement<R>> {
        let w = self.wreath_group()?;
        let mut terms: BTreeMap<GroupElem, R::Elem> = BTreeMap::new();
        for (&a, ca) in &u.terms {
            for (&b, cb) in &v.terms {
                let p = w.mul(a, b);
                let c = self.ring.mul(ca, cb);
                match terms.remove(&p) {
                    None => {
                        if !self.ring.is_zero(&c) {
                            terms.insert(p, c);
                        }
                    }
                    Some(old) => {
                        let sum = self.ring.add(&old, &c);
                        if !self.ring.is_zero(&sum) {
                            terms.insert(p, sum);
                        }
                    }
                }
            }
        }
        Ok(WreathAlgebraElement { terms })
    }

    // -- JSON ---------------------------------------------------------------

    pub fn element_to_json(&self, u: &AlgebraElement<R>) -> Result<ElementJson> {
        self.check(u)?;
        Ok(ElementJson {
            terms: u
                .terms
                .iter()
                .map(|(&i, c)| TermJson {
                    coeff: self.ring.format(c),
                    diagram: self.arena.get(i).to_json(&self.group),
                })
                .collect(),
        })
    }

    pub fn element_from_json(&self, js: &ElementJson) -> Result<AlgebraElement<R>> {
        let mut out = self.zero();
        for term in &js.terms {
            let coeff = self.ring.parse(&term.coeff)?;
            let d = ColouredDiagram::from_json(&term.diagram, &self.group)?;
            if d.size() != self.n {
                return Err(Error::SizeMismatch(self.n, d.size()));
            }
            let index = self.arena.intern(d);
            self.add_term(&mut out, index, &coeff);
        }
        Ok(out)
    }
}

/// A finitely supported coefficient assignment over interned diagrams.
/// Stored zero coefficients are never kept.
#[derive(Clone, Debug)]
pub struct AlgebraElement<R: RingOps> {
    ctx_id: u64,
    terms: BTreeMap<u32, R::Elem>,
}

impl<R: RingOps> PartialEq for AlgebraElement<R> {
    fn eq(&self, other: &Self) -> bool {
        self.ctx_id == other.ctx_id && self.terms == other.terms
    }
}
impl<R: RingOps> Eq for AlgebraElement<R> {}

impl<R: RingOps> AlgebraElement<R> {
    pub fn terms(&self) -> impl Iterator<Item = (u32, &R::Elem)> {
        self.terms.iter().map(|(&i, c)| (i, c))
    }

    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.terms.keys().copied()
    }

    pub fn coeff(&self, index: u32) -> Option<&R::Elem> {
        self.terms.get(&index)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }
}

/// An element of the wreath group algebra.
#[derive(Clone, Debug)]
pub struct WreathAlgebraElement<R: RingOps> {
    terms: BTreeMap<GroupElem, R::Elem>,
}

impl<R: RingOps> PartialEq for WreathAlgebraElement<R> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}
impl<R: RingOps> Eq for WreathAlgebraElement<R> {}

impl<R: RingOps> WreathAlgebraElement<R> {
    pub fn basis(w: GroupElem, ring: &R) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(w, ring.one());
        WreathAlgebraElement { terms }
    }

    pub fn zero() -> Self {
        WreathAlgebraElement {
            terms: BTreeMap::new(),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (GroupElem, &R::Elem)> {
        self.terms.iter().map(|(&i, c)| (i, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct ElementJson {
    pub terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct TermJson {
    pub coeff: String,
    pub diagram: DiagramJson,
}

// ---------------------------------------------------------------------------
// Randomised and exhaustive checks used by the `algebra` verification suite.
// Each returns the number of cases checked and fails with a witness.
// ---------------------------------------------------------------------------

/// `(u v) w = u (v w)` on seeded random basis triples, exact equality.
pub fn check_associativity<R: RingOps>(
    ctx: &AlgebraContext<R>,
    trials: usize,
    seed: u64,
) -> Result<usize> {
    let mut rng = derive_rng(seed, "algebra.associativity");
    let dim = ctx.dim() as u32;
    for t in 0..trials {
        let i = rng.gen_range(0..dim);
        let j = rng.gen_range(0..dim);
        let k = rng.gen_range(0..dim);
        let u = ctx.basis_element(i);
        let v = ctx.basis_element(j);
        let w = ctx.basis_element(k);
        let left = ctx.multiply(&ctx.multiply(&u, &v)?, &w)?;
        let right = ctx.multiply(&u, &ctx.multiply(&v, &w)?)?;
        if left != right {
            return Err(Error::VerificationFailed(format!(
                "associativity fails on basis triple ({i}, {j}, {k}) at trial {t}"
            )));
        }
    }
    Ok(trials)
}

/// The augmentation is multiplicative on seeded random basis pairs.
pub fn check_augmentation_multiplicative<R: RingOps>(
    ctx: &AlgebraContext<R>,
    trials: usize,
    seed: u64,
) -> Result<usize> {
    let mut rng = derive_rng(seed, "algebra.augmentation");
    let dim = ctx.dim() as u32;
    for t in 0..trials {
        let i = rng.gen_range(0..dim);
        let j = rng.gen_range(0..dim);
        let u = ctx.basis_element(i);
        let v = ctx.basis_element(j);
        let lhs = ctx.augmentation(&ctx.multiply(&u, &v)?);
        let rhs = ctx.ring.mul(&ctx.augmentation(&u), &ctx.augmentation(&v));
        if lhs != rhs {
            return Err(Error::VerificationFailed(format!(
                "augmentation not multiplicative on basis pair ({i}, {j}) at trial {t}"
            )));
        }
    }
    Ok(trials)
}

/// The span of non-permutation diagrams is a two-sided ideal: products with
/// arbitrary basis elements stay inside it. Runs exhaustively when
/// `sample_pairs` is `None`, otherwise on that many seeded pairs.
pub fn check_ideal_two_sided<R: RingOps>(
    ctx: &AlgebraContext<R>,
    sample_pairs: Option<usize>,
    seed: u64,
) -> Result<usize> {
    let ideal = ctx.ideal_basis();
    let in_ideal = |u: &AlgebraElement<R>| u.support().all(|i| !ctx.is_permutation_index(i));
    let mut checked = 0;
    let run = |d: u32, x: u32| -> Result<()> {
        let de = ctx.basis_element(d);
        let xe = ctx.basis_element(x);
        let left = ctx.multiply(&xe, &de)?;
        let right = ctx.multiply(&de, &xe)?;
        if !in_ideal(&left) || !in_ideal(&right) {
            return Err(Error::VerificationFailed(format!(
                "ideal not two-sided: basis pair (ideal {d}, any {x})"
            )));
        }
        Ok(())
    };
    match sample_pairs {
        None => {
            for &d in &ideal {
                for x in 0..ctx.dim() as u32 {
                    run(d, x)?;
                    checked += 1;
                }
            }
        }
        Some(pairs) => {
            let mut rng = derive_rng(seed, "algebra.ideal");
            for _ in 0..pairs {
                let d = ideal[rng.gen_range(0..ideal.len())];
                let x = rng.gen_range(0..ctx.dim() as u32);
                run(d, x)?;
                checked += 1;
            }
        }
    }
    Ok(checked)
}

/// Structure constants of the quotient match the wreath group algebra:
/// exhaustive over pairs of permutation diagrams. This is the verification
/// of the quotient isomorphism, and is independent of delta.
pub fn check_quotient_structure_constants<R: RingOps>(ctx: &AlgebraContext<R>) -> Result<usize> {
    let perms = ctx.permutation_basis();
    let w = ctx.wreath_group()?;
    if perms.len() != w.order() {
        return Err(Error::VerificationFailed(format!(
            "{} permutation diagrams vs wreath order {}",
            perms.len(),
            w.order()
        )));
    }
    let mut checked = 0;
    for &i in &perms {
        let wi = ctx.quotient_map_diagram(i)?;
        for &j in &perms {
            let wj = ctx.quotient_map_diagram(j)?;
            let (k, exp) = ctx.multiply_basis(i, j).ok_or_else(|| {
                Error::VerificationFailed(format!("permutation product ({i}, {j}) vanished"))
            })?;
            if exp != 0 || !ctx.is_permutation_index(k) {
                return Err(Error::VerificationFailed(format!(
                    "permutation product ({i}, {j}) left the permutation basis"
                )));
            }
            if ctx.quotient_map_diagram(k)? != w.mul(wi, wj) {
                return Err(Error::VerificationFailed(format!(
                    "quotient map is not a homomorphism on ({i}, {j})"
                )));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// Full-basis agreement of the two products: pushing `u v` through the
/// quotient equals multiplying the images in the wreath algebra.
pub fn check_quotient_multiply_exhaustive<R: RingOps>(ctx: &AlgebraContext<R>) -> Result<usize> {
    let mut checked = 0;
    for i in 0..ctx.dim() as u32 {
        let u = ctx.basis_element(i);
        let qu = ctx.quotient_map(&u)?;
        for j in 0..ctx.dim() as u32 {
            let v = ctx.basis_element(j);
            let qv = ctx.quotient_map(&v)?;
            let lhs = ctx.quotient_multiply(&u, &v)?;
            let rhs = ctx.wreath_multiply(&qu, &qv)?;
            if lhs != rhs {
                return Err(Error::VerificationFailed(format!(
                    "quotient products disagree on basis pair ({i}, {j})"
                )));
            }
            checked += 1;
        }
    }
    Ok(checked)
}
