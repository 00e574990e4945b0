//! Canonical-form coloured partition diagrams and cospan composition.
//!
//! A size-`n` diagram is a set partition of `2n` nodes: the left column
//! `1..n` and the right column `1..n` (drawn with bars in the literature).
//! Nodes are stored flat: `0..n` is the left column, `n..2n` the right, and
//! this also fixes the total node order. Partitions are kept as
//! restricted-growth strings (block ids numbered by first appearance), so
//! structural equality is canonical-form equality. Colourings store, for
//! every node, the group element `gamma(base, node)` where `base` is the
//! block's minimal node; the base itself always carries the identity.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupElem};

/// Hard cap on the diagram size for enumeration (Bell numbers explode).
pub const MAX_ENUMERATION_SIZE: usize = 10;
/// Default cap on the number of coloured diagrams an enumeration may emit.
pub const DEFAULT_DIAGRAM_CAP: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

/// A node of a diagram in user-facing coordinates: side plus 1-based index.
/// The total order is left-1 < .. < left-n < right-1 < .. < right-n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub side: Side,
    pub index: usize,
}

impl NodeId {
    pub fn left(index: usize) -> Self {
        NodeId {
            side: Side::Left,
            index,
        }
    }

    pub fn right(index: usize) -> Self {
        NodeId {
            side: Side::Right,
            index,
        }
    }

    pub fn flat(&self, n: usize) -> Result<usize> {
        if self.index == 0 || self.index > n {
            return Err(Error::BadIndex(format!(
                "node index {} outside 1..={n}",
                self.index
            )));
        }
        Ok(match self.side {
            Side::Left => self.index - 1,
            Side::Right => n + self.index - 1,
        })
    }

    pub fn from_flat(v: usize, n: usize) -> Self {
        if v < n {
            NodeId::left(v + 1)
        } else {
            NodeId::right(v - n + 1)
        }
    }
}

/// A set partition of the `2n` nodes in canonical (restricted-growth) form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetPartition {
    n: usize,
    block_of: Vec<u8>,
}

impl SetPartition {
    /// Canonicalizes an arbitrary assignment of nodes to block labels.
    pub fn from_labels(n: usize, labels: &[usize]) -> Self {
        assert_eq!(labels.len(), 2 * n);
        let mut remap: HashMap<usize, u8> = HashMap::new();
        let mut block_of = Vec::with_capacity(2 * n);
        for &l in labels {
            let next = remap.len() as u8;
            let id = *remap.entry(l).or_insert(next);
            block_of.push(id);
        }
        SetPartition { n, block_of }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn block_of(&self, node: usize) -> u8 {
        self.block_of[node]
    }

    pub fn block_count(&self) -> usize {
        self.block_of
            .iter()
            .map(|&b| b as usize + 1)
            .max()
            .unwrap_or(0)
    }

    /// Blocks as sorted node lists, ordered by minimal node.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.block_count()];
        for (v, &b) in self.block_of.iter().enumerate() {
            out[b as usize].push(v);
        }
        out
    }

    fn is_canonical(&self) -> bool {
        let mut seen_max: i32 = -1;
        for &b in &self.block_of {
            if b as i32 > seen_max + 1 {
                return false;
            }
            seen_max = seen_max.max(b as i32);
        }
        self.block_of.len() == 2 * self.n
    }
}

/// A G-coloured partition diagram in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColouredDiagram {
    partition: SetPartition,
    colour_of: Vec<GroupElem>,
}

impl ColouredDiagram {
    /// Lifts a partition together with a node potential `phi` to the
    /// canonical colouring `gamma(x, y) = phi(x)^-1 phi(y)`. The gauge
    /// freedom in `phi` cancels out.
    pub fn from_potential(partition: SetPartition, phi: &[GroupElem], group: &FiniteGroup) -> Self {
        let total = 2 * partition.n;
        assert_eq!(phi.len(), total);
        let mut base_of_block: Vec<Option<usize>> = vec![None; partition.block_count()];
        for v in 0..total {
            let b = partition.block_of[v] as usize;
            if base_of_block[b].is_none() {
                base_of_block[b] = Some(v);
            }
        }
        let colour_of = (0..total)
            .map(|v| {
                let base = base_of_block[partition.block_of[v] as usize].unwrap();
                group.mul(group.inv(phi[base]), phi[v])
            })
            .collect();
        ColouredDiagram {
            partition,
            colour_of,
        }
    }

    /// The trivially coloured diagram on a given partition.
    pub fn trivially_coloured(partition: SetPartition, group: &FiniteGroup) -> Self {
        let total = 2 * partition.n;
        ColouredDiagram {
            partition,
            colour_of: vec![group.identity(); total],
        }
    }

    pub fn size(&self) -> usize {
        self.partition.n
    }

    pub fn partition(&self) -> &SetPartition {
        &self.partition
    }

    /// `gamma(base, node)` for the node's block base.
    pub fn colour_of(&self, node: usize) -> GroupElem {
        self.colour_of[node]
    }

    /// `gamma(x, y)` if `x` and `y` share a block, `None` otherwise.
    pub fn gamma(&self, x: NodeId, y: NodeId, group: &FiniteGroup) -> Result<Option<GroupElem>> {
        let n = self.size();
        let xf = x.flat(n)?;
        let yf = y.flat(n)?;
        if self.partition.block_of[xf] != self.partition.block_of[yf] {
            return Ok(None);
        }
        Ok(Some(
            group.mul(group.inv(self.colour_of[xf]), self.colour_of[yf]),
        ))
    }

    /// Number of blocks meeting both columns.
    pub fn propagating_count(&self) -> usize {
        let n = self.size();
        let blocks = self.partition.block_count();
        let mut has_left = vec![false; blocks];
        let mut has_right = vec![false; blocks];
        for v in 0..2 * n {
            let b = self.partition.block_of[v] as usize;
            if v < n {
                has_left[b] = true;
            } else {
                has_right[b] = true;
            }
        }
        (0..blocks).filter(|&b| has_left[b] && has_right[b]).count()
    }

    /// True when every block is a propagating pair, i.e. the diagram is a
    /// coloured permutation.
    pub fn is_permutation(&self) -> bool {
        self.as_permutation().is_some()
    }

    /// Decomposes a permutation diagram into one-line images (0-based) and
    /// the per-strand labels `gamma(i, sigma(i)-bar)`.
    pub fn as_permutation(&self) -> Option<(Vec<u8>, Vec<GroupElem>)> {
        let n = self.size();
        let blocks = self.partition.blocks();
        if blocks.len() != n {
            return None;
        }
        let mut sigma = vec![0u8; n];
        let mut labels = vec![0 as GroupElem; n];
        for block in blocks {
            if block.len() != 2 || block[0] >= n || block[1] < n {
                return None;
            }
            let left = block[0];
            let right = block[1] - n;
            sigma[left] = right as u8;
            // Base is the left node, so the stored colour of the right node
            // is exactly gamma(i, sigma(i)-bar).
            labels[left] = self.colour_of[block[1]];
        }
        Some((sigma, labels))
    }

    pub fn is_canonical(&self, group: &FiniteGroup) -> bool {
        if !self.partition.is_canonical() {
            return false;
        }
        let total = 2 * self.partition.n;
        if self.colour_of.len() != total {
            return false;
        }
        let mut seen = vec![false; self.partition.block_count()];
        for v in 0..total {
            let b = self.partition.block_of[v] as usize;
            if !seen[b] {
                seen[b] = true;
                if self.colour_of[v] != group.identity() {
                    return false;
                }
            }
            if self.colour_of[v] as usize >= group.order() {
                return false;
            }
        }
        true
    }
}

/// The identity diagram: blocks `{i, i-bar}` with the trivial colouring.
pub fn identity_diagram(n: usize, group: &FiniteGroup) -> ColouredDiagram {
    let labels: Vec<usize> = (0..2 * n).map(|v| v % n).collect();
    ColouredDiagram::trivially_coloured(SetPartition::from_labels(n, &labels), group)
}

/// The coloured permutation diagram with blocks `{i, sigma(i)-bar}` and
/// `gamma(i, sigma(i)-bar) = labels[i]`. `sigma` is 0-based one-line form.
pub fn permutation_diagram(
    sigma: &[u8],
    labels: &[GroupElem],
    group: &FiniteGroup,
) -> ColouredDiagram {
    let n = sigma.len();
    assert_eq!(labels.len(), n);
    let mut raw = vec![0usize; 2 * n];
    for i in 0..n {
        raw[i] = i;
        raw[n + sigma[i] as usize] = i;
    }
    let partition = SetPartition::from_labels(n, &raw);
    let mut phi = vec![group.identity(); 2 * n];
    for i in 0..n {
        phi[n + sigma[i] as usize] = labels[i];
    }
    ColouredDiagram::from_potential(partition, &phi, group)
}

/// The retraction diagram for an isolated right node: components
/// `{a-bar}`, `{a, b, b-bar}` and `{i, i-bar}` for other `i`, trivially
/// coloured. Indices are 1-based.
pub fn mu(n: usize, a: usize, b: usize, group: &FiniteGroup) -> Result<ColouredDiagram> {
    if a == 0 || b == 0 || a > n || b > n || a == b {
        return Err(Error::BadIndex(format!(
            "mu needs distinct a, b in 1..={n}"
        )));
    }
    let (a, b) = (a - 1, b - 1);
    let mut raw = vec![0usize; 2 * n];
    for i in 0..n {
        raw[i] = i;
        raw[n + i] = i;
    }
    raw[a] = b; // a joins b's component
    raw[n + a] = 2 * n; // a-bar becomes isolated
    Ok(ColouredDiagram::trivially_coloured(
        SetPartition::from_labels(n, &raw),
        group,
    ))
}

/// The retraction diagram for a coloured right pair: one component
/// `{a, b, a-bar, b-bar}` holding the colour data and `{i, i-bar}`
/// elsewhere. The colouring is determined by the potential that is trivial
/// on the `a`-strand and `h` on the `b`-strand, so that
/// `gamma(a, b) = gamma(a-bar, b-bar) = h` and `gamma(a, a-bar) = 1`.
pub fn nu(
    n: usize,
    a: usize,
    b: usize,
    h: GroupElem,
    group: &FiniteGroup,
) -> Result<ColouredDiagram> {
    if a == 0 || b == 0 || a > n || b > n || a >= b {
        return Err(Error::BadIndex(format!("nu needs 1 <= a < b <= {n}")));
    }
    let (a, b) = (a - 1, b - 1);
    let mut raw = vec![0usize; 2 * n];
    for i in 0..n {
        raw[i] = i;
        raw[n + i] = i;
    }
    raw[b] = a;
    raw[n + b] = a;
    raw[n + a] = a;
    let partition = SetPartition::from_labels(n, &raw);
    let mut phi = vec![group.identity(); 2 * n];
    phi[b] = h;
    phi[n + b] = h;
    Ok(ColouredDiagram::from_potential(partition, &phi, group))
}

/// The inclusion of size-`n` diagrams into size `n+1`: adds the trivially
/// coloured block `{n+1, (n+1)-bar}`.
pub fn include(d: &ColouredDiagram, group: &FiniteGroup) -> ColouredDiagram {
    let n = d.size();
    let m = n + 1;
    let mut raw = vec![0usize; 2 * m];
    let mut phi = vec![group.identity(); 2 * m];
    let blocks = d.partition.block_count();
    for v in 0..2 * n {
        let new_v = if v < n { v } else { v + 1 };
        raw[new_v] = d.partition.block_of[v] as usize;
        phi[new_v] = d.colour_of[v];
    }
    raw[n] = blocks;
    raw[2 * m - 1] = blocks;
    ColouredDiagram::from_potential(SetPartition::from_labels(m, &raw), &phi, group)
}

/// Outcome of composing two coloured diagrams: either zero (inconsistent
/// colour loop) or the composite with its internal-component count, the
/// exponent of the loop parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompositionOutcome {
    Zero,
    Diagram {
        diagram: ColouredDiagram,
        internal_components: u32,
    },
}

impl CompositionOutcome {
    pub fn diagram(&self) -> Option<&ColouredDiagram> {
        match self {
            CompositionOutcome::Zero => None,
            CompositionOutcome::Diagram { diagram, .. } => Some(diagram),
        }
    }

    pub fn internal_components(&self) -> Option<u32> {
        match self {
            CompositionOutcome::Zero => None,
            CompositionOutcome::Diagram {
                internal_components,
                ..
            } => Some(*internal_components),
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(size: usize) -> Self {
        UnionFind {
            parent: (0..size).collect(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Composes `d1` then `d2`: `d1`'s right column is glued to `d2`'s left
/// column (so in products `d * mu`, the retraction acts on the right).
///
/// The merged structure lives on `3n` nodes. Internal components are the
/// merged components contained entirely in the glued middle layer. Colours
/// are propagated as a node potential over the edges of both diagrams; a
/// revisited node with an inconsistent potential makes the composite zero.
pub fn compose(
    d1: &ColouredDiagram,
    d2: &ColouredDiagram,
    group: &FiniteGroup,
) -> Result<CompositionOutcome> {
    let n = d1.size();
    if d2.size() != n {
        return Err(Error::SizeMismatch(n, d2.size()));
    }
    let total = 3 * n;
    let mut uf = UnionFind::new(total);

    // Star edges base -> node labelled gamma(base, node), both directions.
    let mut adj: Vec<Vec<(usize, GroupElem, bool)>> = vec![Vec::new(); total];
    let mut add_diagram = |d: &ColouredDiagram, offset: usize, uf: &mut UnionFind| {
        let nodes = 2 * n;
        let mut base_of: Vec<Option<usize>> = vec![None; d.partition.block_count()];
        for v in 0..nodes {
            let b = d.partition.block_of[v] as usize;
            let gv = v + offset;
            match base_of[b] {
                None => base_of[b] = Some(gv),
                Some(base) => {
                    uf.union(base, gv);
                    // forward: phi(gv) = phi(base) * colour, flag false
                    adj[base].push((gv, d.colour_of[v], false));
                    adj[gv].push((base, d.colour_of[v], true));
                }
            }
        }
    };
    add_diagram(d1, 0, &mut uf);
    add_diagram(d2, n, &mut uf);

    // Internal components: middle-only classes of the merged partition.
    let mut has_outer = vec![false; total];
    let mut seen_root = vec![false; total];
    for v in 0..total {
        let r = uf.find(v);
        seen_root[r] = true;
        if v < n || v >= 2 * n {
            has_outer[r] = true;
        }
    }
    let internal_components = (0..total)
        .filter(|&r| seen_root[r] && !has_outer[r])
        .count() as u32;

    // Potential propagation with consistency checks.
    let mut phi: Vec<Option<GroupElem>> = vec![None; total];
    let mut queue = Vec::with_capacity(total);
    for start in 0..total {
        if phi[start].is_some() {
            continue;
        }
        phi[start] = Some(group.identity());
        queue.clear();
        queue.push(start);
        while let Some(u) = queue.pop() {
            let pu = phi[u].unwrap();
            for &(v, colour, reverse) in &adj[u] {
                let cand = if reverse {
                    group.mul(pu, group.inv(colour))
                } else {
                    group.mul(pu, colour)
                };
                match phi[v] {
                    None => {
                        phi[v] = Some(cand);
                        queue.push(v);
                    }
                    Some(existing) => {
                        if existing != cand {
                            return Ok(CompositionOutcome::Zero);
                        }
                    }
                }
            }
        }
    }

    // Restrict to the outer columns and re-canonicalize.
    let mut raw = vec![0usize; 2 * n];
    let mut pot = vec![group.identity(); 2 * n];
    for out in 0..2 * n {
        let global = if out < n { out } else { out + n };
        raw[out] = uf.find(global);
        pot[out] = phi[global].unwrap();
    }
    let diagram = ColouredDiagram::from_potential(SetPartition::from_labels(n, &raw), &pot, group);
    Ok(CompositionOutcome::Diagram {
        diagram,
        internal_components,
    })
}

/// Streams every set partition of the `2 * size` diagram nodes exactly once
/// as restricted-growth strings in lexicographic order.
pub fn enumerate_partitions(size: usize) -> Result<impl Iterator<Item = SetPartition>> {
    if size == 0 || size > MAX_ENUMERATION_SIZE {
        return Err(Error::SizeLimit(format!(
            "partition enumeration supports sizes 1..={MAX_ENUMERATION_SIZE}, got {size}"
        )));
    }
    let total = 2 * size;
    let mut current: Option<Vec<u8>> = Some(vec![0; total]);
    Ok(std::iter::from_fn(move || {
        let rgs = current.take()?;
        let next = next_rgs(&rgs);
        current = next;
        Some(SetPartition {
            n: size,
            block_of: rgs,
        })
    }))
}

fn next_rgs(rgs: &[u8]) -> Option<Vec<u8>> {
    let mut out = rgs.to_vec();
    let total = out.len();
    // prefix_max[i] = max of out[..i]
    let mut prefix_max = vec![0u8; total];
    for i in 1..total {
        prefix_max[i] = prefix_max[i - 1].max(out[i - 1]);
    }
    for i in (1..total).rev() {
        if out[i] <= prefix_max[i] {
            out[i] += 1;
            for v in out[i + 1..].iter_mut() {
                *v = 0;
            }
            return Some(out);
        }
    }
    None
}

/// Independent cross-check generator: builds partitions by recursively
/// inserting each node into every block of every partition of the previous
/// nodes (or a fresh block). Returns block lists.
pub fn enumerate_partitions_by_insertion(size: usize) -> Result<Vec<Vec<Vec<usize>>>> {
    if size == 0 || size > MAX_ENUMERATION_SIZE {
        return Err(Error::SizeLimit(format!(
            "partition enumeration supports sizes 1..={MAX_ENUMERATION_SIZE}, got {size}"
        )));
    }
    let total = 2 * size;
    let mut partitions: Vec<Vec<Vec<usize>>> = vec![vec![vec![0]]];
    for v in 1..total {
        let mut next = Vec::new();
        for p in &partitions {
            for i in 0..p.len() {
                let mut q = p.clone();
                q[i].push(v);
                next.push(q);
            }
            let mut q = p.clone();
            q.push(vec![v]);
            next.push(q);
        }
        partitions = next;
    }
    Ok(partitions)
}

/// Number of coloured diagrams of size `n` over a group of the given order:
/// the sum over partitions of `|G|^(2n - #blocks)`, computed with Stirling
/// numbers of the second kind. `None` when the count overflows.
pub fn diagram_count(n: usize, group_order: usize) -> Option<u128> {
    let total = 2 * n;
    if total > 40 {
        return None;
    }
    let stirling = stirling2_row(total);
    let mut count: u128 = 0;
    for (k, s) in stirling.iter().enumerate().skip(1) {
        let power = (group_order as u128).checked_pow((total - k) as u32)?;
        count = count.checked_add(s.checked_mul(power)?)?;
    }
    Some(count)
}

/// Row `m` of the Stirling-2 triangle: `S(m, 0..=m)`.
fn stirling2_row(m: usize) -> Vec<u128> {
    let mut row = vec![1u128];
    for _ in 0..m {
        let mut next = vec![0u128; row.len() + 1];
        for (k, &v) in row.iter().enumerate() {
            next[k + 1] += v;
            next[k] += v * k as u128;
        }
        row = next;
    }
    row
}

/// Streams every coloured diagram of size `n`, partition-major, colour
/// tuples in odometer order over the non-base nodes.
pub fn enumerate_diagrams(
    n: usize,
    group: &Arc<FiniteGroup>,
    cap: u128,
) -> Result<impl Iterator<Item = ColouredDiagram>> {
    let count = diagram_count(n, group.order()).unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::SizeLimit(format!(
            "{count} coloured diagrams at size {n} exceeds cap {cap}"
        )));
    }
    let partitions = enumerate_partitions(n)?;
    let group = Arc::clone(group);
    Ok(partitions.flat_map(move |p| colourings_of(p, &group)))
}

fn colourings_of(partition: SetPartition, group: &Arc<FiniteGroup>) -> Vec<ColouredDiagram> {
    let total = 2 * partition.n;
    let mut is_base = vec![false; partition.block_count()];
    let mut free_nodes = Vec::new();
    for v in 0..total {
        let b = partition.block_of[v] as usize;
        if !is_base[b] {
            is_base[b] = true;
        } else {
            free_nodes.push(v);
        }
    }
    let order = group.order() as GroupElem;
    let mut out = Vec::new();
    let mut digits = vec![0 as GroupElem; free_nodes.len()];
    loop {
        let mut colour_of = vec![group.identity(); total];
        for (slot, &v) in free_nodes.iter().enumerate() {
            colour_of[v] = digits[slot];
        }
        out.push(ColouredDiagram {
            partition: partition.clone(),
            colour_of,
        });
        // odometer, last digit fastest
        let mut i = free_nodes.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < order {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// Interning table mapping canonical diagrams to stable dense indices.
/// Concurrent readers share the table; inserts take the write lock.
pub struct DiagramArena {
    inner: RwLock<ArenaInner>,
}

struct ArenaInner {
    list: Vec<Arc<ColouredDiagram>>,
    index: HashMap<Arc<ColouredDiagram>, u32>,
}

impl DiagramArena {
    pub fn new() -> Self {
        DiagramArena {
            inner: RwLock::new(ArenaInner {
                list: Vec::new(),
                index: HashMap::new(),
            }),
        }
    }

    pub fn len(&self) -> usize {
        self.inner.read().unwrap().list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn intern(&self, d: ColouredDiagram) -> u32 {
        if let Some(&i) = self.inner.read().unwrap().index.get(&d) {
            return i;
        }
        let mut inner = self.inner.write().unwrap();
        if let Some(&i) = inner.index.get(&d) {
            return i;
        }
        let i = inner.list.len() as u32;
        let arc = Arc::new(d);
        inner.list.push(Arc::clone(&arc));
        inner.index.insert(arc, i);
        i
    }

    pub fn lookup(&self, d: &ColouredDiagram) -> Option<u32> {
        self.inner.read().unwrap().index.get(d).copied()
    }

    pub fn get(&self, i: u32) -> Arc<ColouredDiagram> {
        Arc::clone(&self.inner.read().unwrap().list[i as usize])
    }
}

impl Default for DiagramArena {
    fn default() -> Self {
        Self::new()
    }
}

// ---------------------------------------------------------------------------
// JSON representation
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct DiagramJson {
    pub n: usize,
    pub blocks: Vec<BlockJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct BlockJson {
    pub nodes: Vec<(String, usize)>,
    pub colours: Vec<String>,
}

impl ColouredDiagram {
    pub fn to_json(&self, group: &FiniteGroup) -> DiagramJson {
        let n = self.size();
        let blocks = self
            .partition
            .blocks()
            .into_iter()
            .map(|nodes| BlockJson {
                nodes: nodes
                    .iter()
                    .map(|&v| {
                        let id = NodeId::from_flat(v, n);
                        (
                            match id.side {
                                Side::Left => "L".to_string(),
                                Side::Right => "R".to_string(),
                            },
                            id.index,
                        )
                    })
                    .collect(),
                colours: nodes
                    .iter()
                    .map(|&v| group.name(self.colour_of[v]).to_string())
                    .collect(),
            })
            .collect();
        DiagramJson { n, blocks }
    }

    pub fn from_json(js: &DiagramJson, group: &FiniteGroup) -> Result<Self> {
        let n = js.n;
        if n == 0 || n > 128 {
            return Err(Error::BadIndex(format!("diagram size {n} outside 1..=128")));
        }
        let total = 2 * n;
        let mut raw = vec![usize::MAX; total];
        let mut phi: Vec<Option<GroupElem>> = vec![None; total];
        for (label, block) in js.blocks.iter().enumerate() {
            if block.nodes.is_empty() {
                return Err(Error::Parse("empty block".into()));
            }
            if block.nodes.len() != block.colours.len() {
                return Err(Error::Parse(
                    "block nodes and colours have different lengths".into(),
                ));
            }
            for ((side, index), colour) in block.nodes.iter().zip(&block.colours) {
                let side = match side.as_str() {
                    "L" => Side::Left,
                    "R" => Side::Right,
                    other => return Err(Error::Parse(format!("bad node side {other:?}"))),
                };
                let v = NodeId {
                    side,
                    index: *index,
                }
                .flat(n)?;
                if raw[v] != usize::MAX {
                    return Err(Error::Parse(format!("node {side:?}-{index} appears twice")));
                }
                let elem = group.elem_by_name(colour).ok_or_else(|| {
                    Error::Parse(format!("unknown group element name {colour:?}"))
                })?;
                raw[v] = label;
                phi[v] = Some(elem);
            }
        }
        if raw.iter().any(|&b| b == usize::MAX) {
            return Err(Error::Parse("blocks do not cover all nodes".into()));
        }
        let partition = SetPartition::from_labels(n, &raw);
        let phi: Vec<GroupElem> = phi.into_iter().map(Option::unwrap).collect();
        // The stored colours are relative to each block's minimum, which must
        // therefore carry the identity name.
        let diagram = ColouredDiagram::from_potential(partition, &phi, group);
        for block in &js.blocks {
            let min_slot = block
                .nodes
                .iter()
                .enumerate()
                .min_by_key(|(_, (side, index))| {
                    NodeId {
                        side: if side == "L" { Side::Left } else { Side::Right },
                        index: *index,
                    }
                    .flat(n)
                    .unwrap_or(usize::MAX)
                })
                .map(|(slot, _)| slot)
                .unwrap();
            let name = &block.colours[min_slot];
            if group.elem_by_name(name) != Some(group.identity()) {
                return Err(Error::Parse(format!(
                    "block base must carry the identity name, found {name:?}"
                )));
            }
        }
        Ok(diagram)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::wreath_product;
    use proptest::prelude::*;

    fn triv() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::trivial())
    }

    fn c2() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(2).unwrap())
    }

    /// Builds a diagram from explicit blocks with colours relative to each
    /// block's minimal node.
    fn diagram_from_blocks(
        n: usize,
        blocks: &[(&[usize], &[GroupElem])],
        group: &FiniteGroup,
    ) -> ColouredDiagram {
        let mut raw = vec![usize::MAX; 2 * n];
        let mut phi = vec![0 as GroupElem; 2 * n];
        for (label, (nodes, colours)) in blocks.iter().enumerate() {
            assert_eq!(nodes.len(), colours.len());
            for (&v, &c) in nodes.iter().zip(colours.iter()) {
                raw[v] = label;
                phi[v] = c;
            }
        }
        assert!(raw.iter().all(|&b| b != usize::MAX));
        ColouredDiagram::from_potential(SetPartition::from_labels(n, &raw), &phi, group)
    }

    #[test]
    fn partition_counts_match_bell_numbers() {
        for (size, bell) in [(1usize, 2usize), (2, 15), (3, 203)] {
            let got = enumerate_partitions(size).unwrap().count();
            assert_eq!(got, bell);
        }
    }

    #[test]
    fn generators_agree_as_sets() {
        for size in 1..=4 {
            let mut a: Vec<SetPartition> = enumerate_partitions(size).unwrap().collect();
            let mut b: Vec<SetPartition> = enumerate_partitions_by_insertion(size)
                .unwrap()
                .into_iter()
                .map(|blocks| {
                    let mut raw = vec![0usize; 2 * size];
                    for (label, block) in blocks.iter().enumerate() {
                        for &v in block {
                            raw[v] = label;
                        }
                    }
                    SetPartition::from_labels(size, &raw)
                })
                .collect();
            let len = a.len();
            a.sort();
            a.dedup();
            b.sort();
            b.dedup();
            assert_eq!(a.len(), len, "rgs generator emitted a duplicate");
            assert_eq!(a, b);
        }
    }

    #[test]
    fn size_limit_guard() {
        assert!(matches!(
            enumerate_partitions(MAX_ENUMERATION_SIZE + 1),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn coloured_diagram_counts() {
        let c2 = c2();
        let triv = triv();
        assert_eq!(enumerate_diagrams(1, &c2, 100).unwrap().count(), 3);
        assert_eq!(enumerate_diagrams(2, &triv, 100).unwrap().count(), 15);
        assert_eq!(enumerate_diagrams(2, &c2, 100).unwrap().count(), 49);
        assert_eq!(diagram_count(2, 2), Some(49));
        assert_eq!(diagram_count(3, 2), Some(1539));
        assert!(matches!(
            enumerate_diagrams(2, &c2, 10),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn enumerated_diagrams_are_canonical_and_distinct() {
        let c2 = c2();
        let mut seen = std::collections::HashSet::new();
        for d in enumerate_diagrams(2, &c2, 100).unwrap() {
            assert!(d.is_canonical(&c2));
            assert!(seen.insert(d));
        }
        assert_eq!(seen.len(), 49);
    }

    #[test]
    fn identity_composes_trivially() {
        let c2 = c2();
        let id = identity_diagram(2, &c2);
        for d in enumerate_diagrams(2, &c2, 100).unwrap() {
            match compose(&id, &d, &c2).unwrap() {
                CompositionOutcome::Diagram {
                    diagram,
                    internal_components,
                } => {
                    assert_eq!(diagram, d);
                    assert_eq!(internal_components, 0);
                }
                CompositionOutcome::Zero => panic!("identity composite vanished"),
            }
            match compose(&d, &id, &c2).unwrap() {
                CompositionOutcome::Diagram {
                    diagram,
                    internal_components,
                } => {
                    assert_eq!(diagram, d);
                    assert_eq!(internal_components, 0);
                }
                CompositionOutcome::Zero => panic!("identity composite vanished"),
            }
        }
    }

    #[test]
    fn singleton_self_composition_has_one_internal_component() {
        let triv = triv();
        // n=1, both nodes isolated.
        let d = diagram_from_blocks(1, &[(&[0], &[0]), (&[1], &[0])], &triv);
        match compose(&d, &d, &triv).unwrap() {
            CompositionOutcome::Diagram {
                diagram,
                internal_components,
            } => {
                assert_eq!(diagram, d);
                assert_eq!(internal_components, 1);
            }
            CompositionOutcome::Zero => panic!("unexpected zero"),
        }
    }

    #[test]
    fn colour_mismatch_composes_to_zero() {
        let c2 = c2();
        // d1 = {{1},{2},{1bar,2bar}} with gamma(1bar,2bar) = t
        let d1 = diagram_from_blocks(2, &[(&[0], &[0]), (&[1], &[0]), (&[2, 3], &[0, 1])], &c2);
        // d2 = {{1,2},{1bar},{2bar}} with gamma(1,2) = e
        let d2 = diagram_from_blocks(2, &[(&[0, 1], &[0, 0]), (&[2], &[0]), (&[3], &[0])], &c2);
        assert_eq!(compose(&d1, &d2, &c2).unwrap(), CompositionOutcome::Zero);

        // d2' with gamma(1,2) = t: consistent loop, one internal component.
        let d2p = diagram_from_blocks(2, &[(&[0, 1], &[0, 1]), (&[2], &[0]), (&[3], &[0])], &c2);
        match compose(&d1, &d2p, &c2).unwrap() {
            CompositionOutcome::Diagram {
                diagram,
                internal_components,
            } => {
                assert_eq!(internal_components, 1);
                let all_singletons = diagram_from_blocks(
                    2,
                    &[(&[0], &[0]), (&[1], &[0]), (&[2], &[0]), (&[3], &[0])],
                    &c2,
                );
                assert_eq!(diagram, all_singletons);
            }
            CompositionOutcome::Zero => panic!("consistent loop reported zero"),
        }
    }

    #[test]
    fn mu_shape_and_propagating_count() {
        let triv = triv();
        let m = mu(2, 1, 2, &triv).unwrap();
        let expected = diagram_from_blocks(2, &[(&[0, 1, 3], &[0, 0, 0]), (&[2], &[0])], &triv);
        assert_eq!(m, expected);
        for n in 2..=5 {
            for a in 1..=n {
                for b in 1..=n {
                    if a == b {
                        continue;
                    }
                    let m = mu(n, a, b, &triv).unwrap();
                    assert_eq!(m.propagating_count(), n - 1);
                }
            }
        }
        assert!(mu(2, 1, 1, &triv).is_err());
        assert!(mu(2, 0, 1, &triv).is_err());
        assert!(mu(2, 1, 3, &triv).is_err());
    }

    #[test]
    fn nu_colouring_follows_the_retraction_convention() {
        let c2 = c2();
        let t: GroupElem = 1;
        let v = nu(2, 1, 2, t, &c2).unwrap();
        // One block {1, 2, 1bar, 2bar}; the b-strand carries h.
        assert_eq!(
            v.gamma(NodeId::left(1), NodeId::left(2), &c2).unwrap(),
            Some(t)
        );
        assert_eq!(
            v.gamma(NodeId::right(1), NodeId::right(2), &c2).unwrap(),
            Some(t)
        );
        assert_eq!(
            v.gamma(NodeId::left(1), NodeId::right(1), &c2).unwrap(),
            Some(0)
        );
        assert_eq!(
            v.gamma(NodeId::left(1), NodeId::right(2), &c2).unwrap(),
            Some(t)
        );
        // h = identity degenerates to the trivially coloured block.
        let v0 = nu(2, 1, 2, 0, &c2).unwrap();
        let expected = diagram_from_blocks(2, &[(&[0, 1, 2, 3], &[0, 0, 0, 0])], &c2);
        assert_eq!(v0, expected);
        assert!(nu(2, 2, 1, 0, &c2).is_err());
    }

    #[test]
    fn nu_is_idempotent_and_retracts_its_ideal() {
        let c2 = c2();
        let t: GroupElem = 1;
        let v = nu(2, 1, 2, t, &c2).unwrap();
        match compose(&v, &v, &c2).unwrap() {
            CompositionOutcome::Diagram {
                diagram,
                internal_components,
            } => {
                assert_eq!(diagram, v);
                assert_eq!(internal_components, 0);
            }
            CompositionOutcome::Zero => panic!("nu * nu vanished"),
        }
    }

    #[test]
    fn include_matches_direct_constructions() {
        let triv = triv();
        let c2 = c2();
        assert_eq!(
            include(&identity_diagram(2, &triv), &triv),
            identity_diagram(3, &triv)
        );
        assert_eq!(
            include(&mu(2, 1, 2, &triv).unwrap(), &triv),
            mu(3, 1, 2, &triv).unwrap()
        );
        for d in enumerate_diagrams(2, &c2, 100).unwrap() {
            let inc = include(&d, &c2);
            assert!(inc.is_canonical(&c2));
            assert_eq!(inc.is_permutation(), d.is_permutation());
            assert_eq!(inc.propagating_count(), d.propagating_count() + 1);
        }
    }

    #[test]
    fn permutation_diagram_counts_match_wreath_order() {
        let c2 = c2();
        let mut seen = std::collections::HashSet::new();
        for sigma in crate::group::all_permutations(2) {
            for l0 in 0..2 {
                for l1 in 0..2 {
                    seen.insert(permutation_diagram(&sigma, &[l0, l1], &c2));
                }
            }
        }
        assert_eq!(seen.len(), 8);
        let w = wreath_product(&c2, 2).unwrap();
        assert_eq!(seen.len(), w.order());
        for d in &seen {
            assert!(d.is_permutation());
            assert_eq!(d.propagating_count(), 2);
        }
    }

    #[test]
    fn propagating_queries() {
        let triv = triv();
        let id = identity_diagram(3, &triv);
        assert_eq!(id.propagating_count(), 3);
        assert!(id.is_permutation());

        let singletons = diagram_from_blocks(
            2,
            &[(&[0], &[0]), (&[1], &[0]), (&[2], &[0]), (&[3], &[0])],
            &triv,
        );
        assert_eq!(singletons.propagating_count(), 0);

        let one_block = diagram_from_blocks(2, &[(&[0, 1, 2, 3], &[0, 0, 0, 0])], &triv);
        assert_eq!(one_block.propagating_count(), 1);
        assert!(!one_block.is_permutation());
    }

    #[test]
    fn gamma_axioms_hold_on_enumerated_diagrams() {
        let c2 = c2();
        for d in enumerate_diagrams(2, &c2, 100).unwrap() {
            for x in 0..4 {
                let xid = NodeId::from_flat(x, 2);
                assert_eq!(d.gamma(xid, xid, &c2).unwrap(), Some(0));
                for y in 0..4 {
                    let yid = NodeId::from_flat(y, 2);
                    let gxy = d.gamma(xid, yid, &c2).unwrap();
                    let gyx = d.gamma(yid, xid, &c2).unwrap();
                    match (gxy, gyx) {
                        (Some(a), Some(b)) => assert_eq!(c2.inv(a), b),
                        (None, None) => {}
                        _ => panic!("gamma defined asymmetrically"),
                    }
                    for z in 0..4 {
                        let zid = NodeId::from_flat(z, 2);
                        if let (Some(a), Some(b), Some(c)) = (
                            d.gamma(xid, yid, &c2).unwrap(),
                            d.gamma(yid, zid, &c2).unwrap(),
                            d.gamma(xid, zid, &c2).unwrap(),
                        ) {
                            assert_eq!(c2.mul(a, b), c);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn composition_of_permutations_stays_permutation() {
        let c2 = c2();
        let perms: Vec<ColouredDiagram> = crate::group::all_permutations(2)
            .into_iter()
            .flat_map(|sigma| {
                (0..2).flat_map(move |l0| {
                    let sigma = sigma.clone();
                    (0..2).map(move |l1| (sigma.clone(), [l0 as GroupElem, l1 as GroupElem]))
                })
            })
            .map(|(sigma, labels)| permutation_diagram(&sigma, &labels, &c2))
            .collect();
        for d1 in &perms {
            for d2 in &perms {
                match compose(d1, d2, &c2).unwrap() {
                    CompositionOutcome::Diagram {
                        diagram,
                        internal_components,
                    } => {
                        assert!(diagram.is_permutation());
                        assert_eq!(internal_components, 0);
                    }
                    CompositionOutcome::Zero => panic!("permutation product vanished"),
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let c2 = c2();
        for d in enumerate_diagrams(2, &c2, 100).unwrap() {
            let js = d.to_json(&c2);
            let back = ColouredDiagram::from_json(&js, &c2).unwrap();
            assert_eq!(back, d);
        }
    }

    #[test]
    fn json_rejects_bad_input() {
        let c2 = c2();
        let js: DiagramJson = serde_json::from_str(
            r#"{"n":1,"blocks":[{"nodes":[["L",1],["R",1]],"colours":["t","e"]}]}"#,
        )
        .unwrap();
        // Base node must carry the identity name.
        assert!(ColouredDiagram::from_json(&js, &c2).is_err());
        let js: DiagramJson = serde_json::from_str(
            r#"{"n":2,"blocks":[{"nodes":[["L",1],["R",1]],"colours":["e","e"]}]}"#,
        )
        .unwrap();
        // Not a cover of all nodes.
        assert!(ColouredDiagram::from_json(&js, &c2).is_err());
    }

    #[test]
    fn arena_interning_is_stable() {
        let c2 = c2();
        let arena = DiagramArena::new();
        let ids: Vec<u32> = enumerate_diagrams(2, &c2, 100)
            .unwrap()
            .map(|d| arena.intern(d))
            .collect();
        assert_eq!(ids, (0..49).collect::<Vec<u32>>());
        for (i, d) in enumerate_diagrams(2, &c2, 100).unwrap().enumerate() {
            assert_eq!(arena.lookup(&d), Some(i as u32));
            assert_eq!(*arena.get(i as u32), d);
        }
    }

    proptest! {
        #[test]
        fn compose_respects_propagating_bound(seed in 0u64..500) {
            let c2 = c2();
            let all: Vec<ColouredDiagram> = enumerate_diagrams(2, &c2, 100).unwrap().collect();
            let i = (seed % 49) as usize;
            let j = ((seed / 49) % 49) as usize;
            let d1 = &all[i];
            let d2 = &all[j];
            if let CompositionOutcome::Diagram { diagram, .. } = compose(d1, d2, &c2).unwrap() {
                prop_assert!(diagram.propagating_count()
                    <= d1.propagating_count().min(d2.propagating_count()));
                prop_assert!(diagram.is_canonical(&c2));
            }
        }
    }
}
