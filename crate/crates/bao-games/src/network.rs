//! Atomic networks: total atom-valued labelings of node tuples.
//!
//! A network over an n-dimensional atom structure assigns an atom to every
//! n-tuple of its nodes. Depending on the flavor it must satisfy:
//!
//!   (i)   whenever x_i = x_j, label(x) lies below d_ij
//!         (flavors with diagonals),
//!   (ii)  whenever x and y agree off coordinate i,
//!         label(x) lies below c_i label(y),
//!   (iii) label(x o [i,j]) = s_[i,j] label(x)
//!         (flavors with transpositions),
//!   (repl) label(x) lies below s_i^j label(x o [i|j])
//!         (diagonal-free flavors with replacements),
//!
//! where [i,j] swaps two coordinates and [i|j] overwrites coordinate i with
//! coordinate j. Condition (repl) is stated as an inequality because the
//! replacement of a single atom is in general a set of atoms; on set
//! algebras the inequality is exactly what point tuples satisfy.
//!
//! Condition (i) is deliberately one-directional: a label below a diagonal
//! may sit at a tuple of distinct nodes, which then behave as one point
//! seen twice. Demanding the converse would let the first game player win
//! everywhere by demanding a sub-diagonal atom at a distinct-node tuple
//! (no network could ever deliver it), and it would cut the games off from
//! the neat-reduct arguments they are meant to decide. Distinctness that
//! matters must be carried by the atoms themselves, which is exactly what
//! the rainbow structures' green tints do.
//!
//! Labels are indexed densely: nodes are kept sorted and a tuple is encoded
//! base |nodes| with coordinate 0 most significant.

use crate::table::{Atom, AtomTable};
use bao_core::{Error, Result};

/// Node identifier inside a game board. Budgets in this crate are tiny, so
/// ids stay well below the u16 range.
pub type NodeId = u16;

/// Largest supported network dimension. Tuple arithmetic uses fixed-size
/// buffers of this length.
pub const MAX_DIM: usize = 8;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Network {
    dim: usize,
    nodes: Vec<NodeId>,
    labels: Vec<Atom>,
}

impl Network {
    /// Builds a network from a sorted node list and a dense label vector of
    /// length |nodes|^dim.
    pub fn from_labels(dim: usize, nodes: Vec<NodeId>, labels: Vec<Atom>) -> Result<Network> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidInput(format!(
                "network dimension {dim} out of range 1..={MAX_DIM}"
            )));
        }
        if nodes.is_empty() {
            return Err(Error::InvalidInput("network needs at least one node".into()));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("node list must be sorted and distinct".into()));
        }
        let want = nodes.len().pow(dim as u32);
        if labels.len() != want {
            return Err(Error::InvalidInput(format!(
                "label vector has length {}, expected {}",
                labels.len(),
                want
            )));
        }
        Ok(Network { dim, nodes, labels })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn labels(&self) -> &[Atom] {
        &self.labels
    }

    pub fn node_pos(&self, id: NodeId) -> Option<usize> {
        self.nodes.binary_search(&id).ok()
    }

    pub fn contains_node(&self, id: NodeId) -> bool {
        self.node_pos(id).is_some()
    }

    /// Dense index of a tuple given by node positions.
    pub fn index_of_positions(&self, pos: &[usize]) -> usize {
        let s = self.nodes.len();
        let mut idx = 0;
        for &p in pos {
            debug_assert!(p < s);
            idx = idx * s + p;
        }
        idx
    }

    /// Decodes a dense index into node positions.
    pub fn positions_of_index(&self, mut idx: usize, out: &mut [usize]) {
        let s = self.nodes.len();
        for slot in out.iter_mut().rev() {
            *slot = idx % s;
            idx /= s;
        }
    }

    pub fn label_at_positions(&self, pos: &[usize]) -> Atom {
        self.labels[self.index_of_positions(pos)]
    }

    /// Label of a tuple of node ids.
    pub fn label_of(&self, tuple: &[NodeId]) -> Result<Atom> {
        if tuple.len() != self.dim {
            return Err(Error::InvalidInput(format!(
                "tuple length {} does not match dimension {}",
                tuple.len(),
                self.dim
            )));
        }
        let mut pos = [0usize; MAX_DIM];
        for (slot, &id) in pos.iter_mut().zip(tuple) {
            *slot = self
                .node_pos(id)
                .ok_or_else(|| Error::InvalidInput(format!("node {id} not in network")))?;
        }
        Ok(self.label_at_positions(&pos[..self.dim]))
    }

    /// Applies a node renaming. The map must be injective on this network's
    /// nodes; labels are permuted to follow the new sorted node order.
    pub fn rename(&self, map: impl Fn(NodeId) -> NodeId) -> Network {
        let s = self.nodes.len();
        let mut new_nodes: Vec<NodeId> = self.nodes.iter().map(|&v| map(v)).collect();
        let mut order: Vec<usize> = (0..s).collect();
        order.sort_by_key(|&p| new_nodes[p]);
        new_nodes.sort_unstable();
        debug_assert!(new_nodes.windows(2).all(|w| w[0] < w[1]), "renaming must be injective");
        // old_of[q] = old position of the node now sitting at position q
        let old_of = order;
        let mut new_labels = vec![0; self.labels.len()];
        let mut new_pos = [0usize; MAX_DIM];
        let mut old_pos = [0usize; MAX_DIM];
        for (idx, slot) in new_labels.iter_mut().enumerate() {
            let mut rest = idx;
            for q in (0..self.dim).rev() {
                new_pos[q] = rest % s;
                rest /= s;
            }
            for q in 0..self.dim {
                old_pos[q] = old_of[new_pos[q]];
            }
            *slot = self.label_at_positions(&old_pos[..self.dim]);
        }
        Network { dim: self.dim, nodes: new_nodes, labels: new_labels }
    }

    /// Whether two networks over the same node set agree on every tuple
    /// avoiding node `z`.
    pub fn agrees_off(&self, other: &Network, z: NodeId) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let mine: Vec<NodeId> = self.nodes.iter().copied().filter(|&v| v != z).collect();
        let theirs: Vec<NodeId> = other.nodes.iter().copied().filter(|&v| v != z).collect();
        if mine != theirs {
            return false;
        }
        if mine.is_empty() {
            return true;
        }
        let mut tuple = vec![0 as NodeId; self.dim];
        let mut counter = vec![0usize; self.dim];
        loop {
            for q in 0..self.dim {
                tuple[q] = mine[counter[q]];
            }
            if self.label_of(&tuple).unwrap() != other.label_of(&tuple).unwrap() {
                return false;
            }
            let mut q = self.dim;
            loop {
                if q == 0 {
                    return true;
                }
                q -= 1;
                counter[q] += 1;
                if counter[q] < mine.len() {
                    break;
                }
                counter[q] = 0;
            }
        }
    }

    /// Deterministic byte serialisation used for ordering and hashing.
    pub fn raw_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 + self.nodes.len() * 2 + self.labels.len() * 8);
        out.push(self.dim as u8);
        out.push(self.nodes.len() as u8);
        for &v in &self.nodes {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for &a in &self.labels {
            out.extend_from_slice(&a.to_le_bytes());
        }
        out
    }
}

/// Checks every flavor-applicable condition and returns the violations.
///
/// The boolean is true exactly when no violation was found. Violations are
/// reported as strings prefixed with the condition tag, for example
/// `(iii) tuple (0,2,1) ...`.
pub fn validate_network(n: &Network, at: &dyn AtomTable) -> (bool, Vec<String>) {
    let mut violations = Vec::new();
    let dim = at.dim();
    if n.dim() != dim {
        violations.push(format!(
            "(shape) network dimension {} does not match structure dimension {dim}",
            n.dim()
        ));
        return (false, violations);
    }
    let flavor = at.flavor();
    let s = n.size();
    let total = n.labels().len();
    let mut pos = vec![0usize; dim];
    let fmt_tuple = |pos: &[usize], n: &Network| {
        let ids: Vec<String> = pos.iter().map(|&p| n.nodes()[p].to_string()).collect();
        format!("({})", ids.join(","))
    };
    for idx in 0..total {
        n.positions_of_index(idx, &mut pos);
        let a = n.labels()[idx];
        if flavor.has_diagonal_condition() {
            for i in 0..dim {
                for j in (i + 1)..dim {
                    if pos[i] == pos[j] && !at.in_diag(i, j, a) {
                        violations.push(format!(
                            "(i) tuple {} has equal nodes at {i},{j} but label {} is not below d_{i}{j}",
                            fmt_tuple(&pos, n),
                            at.atom_label(a)
                        ));
                    }
                }
            }
        }
        for i in 0..dim {
            // Walk the line of tuples agreeing with pos off coordinate i.
            let mut other = pos.clone();
            for q in 0..s {
                other[i] = q;
                let b = n.label_at_positions(&other);
                if !at.cyl_related(i, a, b) {
                    violations.push(format!(
                        "(ii) tuple {} label {} is not below c_{i} of the label {} at {}",
                        fmt_tuple(&pos, n),
                        at.atom_label(a),
                        at.atom_label(b),
                        fmt_tuple(&other, n)
                    ));
                }
            }
        }
        if flavor.has_transposition_condition() {
            for i in 0..dim {
                for j in (i + 1)..dim {
                    let mut swapped = pos.clone();
                    swapped.swap(i, j);
                    let b = n.label_at_positions(&swapped);
                    if b != at.transpose(i, j, a) {
                        violations.push(format!(
                            "(iii) tuple {} label {} transposed by [{i},{j}] is {} but tuple {} is labelled {}",
                            fmt_tuple(&pos, n),
                            at.atom_label(a),
                            at.atom_label(at.transpose(i, j, a)),
                            fmt_tuple(&swapped, n),
                            at.atom_label(b)
                        ));
                    }
                }
            }
        }
        if flavor.has_replacement_condition() {
            for i in 0..dim {
                for j in 0..dim {
                    if i == j {
                        continue;
                    }
                    let mut replaced = pos.clone();
                    replaced[i] = replaced[j];
                    let b = n.label_at_positions(&replaced);
                    if !at.repl_related(i, j, a, b) {
                        violations.push(format!(
                            "(repl) tuple {} label {} is not below s_{i}^{j} of the label {} at {}",
                            fmt_tuple(&pos, n),
                            at.atom_label(a),
                            at.atom_label(b),
                            fmt_tuple(&replaced, n)
                        ));
                    }
                }
            }
        }
        if violations.len() > 64 {
            violations.push("(truncated) further violations omitted".into());
            return (false, violations);
        }
    }
    (violations.is_empty(), violations)
}

/// A completion problem: some tuple labels over a fixed node set are
/// pinned, the rest must be filled in so that every flavor condition
/// holds.
pub(crate) struct CompletionProblem<'a> {
    at: &'a dyn AtomTable,
    dim: usize,
    nodes: Vec<NodeId>,
    /// Pinned labels by dense tuple index.
    fixed: Vec<Option<Atom>>,
}

pub(crate) enum CompletionOutcome {
    /// Every completion was visited (the sink may have stopped early).
    Exhausted,
    /// The enumeration cap was hit before the space was covered.
    CapHit,
}

impl<'a> CompletionProblem<'a> {
    pub(crate) fn new(at: &'a dyn AtomTable, nodes: Vec<NodeId>) -> CompletionProblem<'a> {
        let dim = at.dim();
        let total = nodes.len().pow(dim as u32);
        CompletionProblem { at, dim, nodes, fixed: vec![None; total] }
    }

    pub(crate) fn node_pos(&self, id: NodeId) -> Option<usize> {
        self.nodes.binary_search(&id).ok()
    }

    pub(crate) fn index_of_positions(&self, pos: &[usize]) -> usize {
        let s = self.nodes.len();
        let mut idx = 0;
        for &p in pos {
            idx = idx * s + p;
        }
        idx
    }

    /// Pins one tuple. Conflicting pins make the problem unsatisfiable
    /// rather than erroring, which is what game move legality wants.
    pub(crate) fn pin_positions(&mut self, pos: &[usize], a: Atom) -> bool {
        let idx = self.index_of_positions(pos);
        match self.fixed[idx] {
            Some(old) => old == a,
            None => {
                self.fixed[idx] = Some(a);
                true
            }
        }
    }

    pub(crate) fn pin_tuple(&mut self, tuple: &[NodeId], a: Atom) -> bool {
        let mut pos = [0usize; MAX_DIM];
        for (slot, &id) in pos.iter_mut().zip(tuple) {
            match self.node_pos(id) {
                Some(p) => *slot = p,
                None => return false,
            }
        }
        let pos = &pos[..self.dim].to_vec();
        self.pin_positions(pos, a)
    }

    /// Copies every tuple of `base` that lives entirely on nodes shared
    /// with this problem and avoids node `except`.
    pub(crate) fn pin_from(&mut self, base: &Network, except: Option<NodeId>) -> bool {
        let s = base.size();
        let total = s.pow(self.dim as u32);
        let mut pos = vec![0usize; self.dim];
        let mut here = [0usize; MAX_DIM];
        'tuples: for idx in 0..total {
            base.positions_of_index(idx, &mut pos);
            for q in 0..self.dim {
                let id = base.nodes()[pos[q]];
                if Some(id) == except {
                    continue 'tuples;
                }
                match self.node_pos(id) {
                    Some(p) => here[q] = p,
                    None => continue 'tuples,
                }
            }
            let here = here[..self.dim].to_vec();
            if !self.pin_positions(&here, base.labels()[idx]) {
                return false;
            }
        }
        true
    }

    /// Enumerates completions in a deterministic order, feeding each to the
    /// sink. Stops when the sink returns false, when the space is
    /// exhausted, or when `cap` assignments of complete networks have been
    /// produced.
    pub(crate) fn enumerate(
        &self,
        cap: usize,
        mut sink: impl FnMut(&Network) -> bool,
    ) -> CompletionOutcome {
        let total = self.fixed.len();
        let s = self.nodes.len();
        let dim = self.dim;
        let mut labels: Vec<Option<Atom>> = self.fixed.clone();

        // Consistency of the pins themselves.
        let mut pos = vec![0usize; dim];
        for idx in 0..total {
            if let Some(a) = labels[idx] {
                decode(idx, s, dim, &mut pos);
                if !self.consistent_at(&labels, &pos, idx, a) {
                    return CompletionOutcome::Exhausted;
                }
            }
        }

        // Variable order: maximum cardinality search over the "agree off
        // one coordinate" adjacency, seeded by the pinned tuples. Always
        // assigning the tuple with the most already-placed neighbours keeps
        // candidate domains small and closes constraint cycles as early as
        // possible, so an unsatisfiable completion fails near the top of
        // the search instead of after exhausting the free choices below.
        fn bump(
            idx: usize,
            s: usize,
            dim: usize,
            pos: &mut [usize],
            chosen: &[bool],
            cnt: &mut [u32],
            heap: &mut std::collections::BinaryHeap<(u32, std::cmp::Reverse<usize>)>,
        ) {
            decode(idx, s, dim, pos);
            for i in 0..dim {
                let keep = pos[i];
                for q in 0..s {
                    pos[i] = q;
                    let nb = encode(pos, s);
                    if nb != idx && !chosen[nb] {
                        cnt[nb] += 1;
                        heap.push((cnt[nb], std::cmp::Reverse(nb)));
                    }
                }
                pos[i] = keep;
            }
        }
        let unfixed = self.fixed.iter().filter(|f| f.is_none()).count();
        let mut chosen: Vec<bool> = self.fixed.iter().map(|f| f.is_some()).collect();
        let mut cnt = vec![0u32; total];
        let mut heap = std::collections::BinaryHeap::new();
        let mut vars: Vec<usize> = Vec::with_capacity(unfixed);
        let mut sweep = 0usize;
        for idx in 0..total {
            if chosen[idx] {
                bump(idx, s, dim, &mut pos, &chosen, &mut cnt, &mut heap);
            }
        }
        while vars.len() < unfixed {
            let idx = loop {
                match heap.pop() {
                    Some((c, std::cmp::Reverse(cand))) if !chosen[cand] && cnt[cand] == c => {
                        break cand
                    }
                    Some(_) => continue,
                    None => {
                        // Nothing reachable yet: seed from the smallest
                        // unplaced tuple (empty pin set, or none at all).
                        while chosen[sweep] {
                            sweep += 1;
                        }
                        break sweep;
                    }
                }
            };
            chosen[idx] = true;
            vars.push(idx);
            bump(idx, s, dim, &mut pos, &chosen, &mut cnt, &mut heap);
        }

        let mut produced = 0usize;
        let mut stack: Vec<Vec<Atom>> = Vec::with_capacity(vars.len());
        let mut depth = 0usize;
        let mut cap_hit = false;

        // Iterative DFS: stack[d] holds the remaining candidates for
        // vars[d], in reverse so pop() yields ascending order.
        loop {
            if depth == vars.len() {
                let net = Network {
                    dim,
                    nodes: self.nodes.clone(),
                    labels: labels.iter().map(|o| o.unwrap()).collect(),
                };
                produced += 1;
                let keep_going = sink(&net);
                if !keep_going {
                    return CompletionOutcome::Exhausted;
                }
                if produced >= cap {
                    cap_hit = true;
                    break;
                }
                if depth == 0 {
                    break;
                }
                depth -= 1;
                let idx = vars[depth];
                labels[idx] = None;
            } else if stack.len() == depth {
                let idx = vars[depth];
                decode(idx, s, dim, &mut pos);
                let mut cands = self.candidates(&labels, &pos, idx);
                cands.sort_unstable();
                cands.reverse();
                stack.push(cands);
                continue;
            }
            let idx = vars[depth];
            match stack[depth].pop() {
                Some(a) => {
                    decode(idx, s, dim, &mut pos);
                    if self.consistent_at(&labels, &pos, idx, a) {
                        labels[idx] = Some(a);
                        depth += 1;
                    }
                }
                None => {
                    stack.pop();
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                    let prev = vars[depth];
                    labels[prev] = None;
                }
            }
        }
        if cap_hit {
            CompletionOutcome::CapHit
        } else {
            CompletionOutcome::Exhausted
        }
    }

    /// Candidate labels for the tuple at `pos`, derived from the cheapest
    /// available constraint. Correctness does not depend on the choice:
    /// `consistent_at` re-checks everything.
    fn candidates(&self, labels: &[Option<Atom>], pos: &[usize], idx: usize) -> Vec<Atom> {
        let dim = self.dim;
        let s = self.nodes.len();
        // A transposition image that is already assigned forces the label.
        if self.at.flavor().has_transposition_condition() {
            let mut swapped = pos.to_vec();
            for i in 0..dim {
                for j in (i + 1)..dim {
                    swapped.copy_from_slice(pos);
                    swapped.swap(i, j);
                    let other = encode(&swapped, s);
                    if other != idx {
                        if let Some(b) = labels[other] {
                            // label here must be s_[i,j] b
                            return vec![self.at.transpose(i, j, b)];
                        }
                    }
                }
            }
        }
        let mut other = pos.to_vec();
        for i in 0..dim {
            let keep = other[i];
            for q in 0..s {
                if q == pos[i] {
                    continue;
                }
                other[i] = q;
                let nb = encode(&other, s);
                if let Some(b) = labels[nb] {
                    return self.at.cyl_lower(i, b);
                }
            }
            other[i] = keep;
        }
        self.at.atoms().collect()
    }

    /// Full consistency of assigning `a` at `pos` against every pinned or
    /// assigned tuple. Each binary constraint is checked when its second
    /// member arrives, so a full assignment reached through this predicate
    /// satisfies all conditions.
    fn consistent_at(&self, labels: &[Option<Atom>], pos: &[usize], idx: usize, a: Atom) -> bool {
        let at = self.at;
        let dim = self.dim;
        let s = self.nodes.len();
        let flavor = at.flavor();
        if flavor.has_diagonal_condition() {
            for i in 0..dim {
                for j in (i + 1)..dim {
                    if pos[i] == pos[j] && !at.in_diag(i, j, a) {
                        return false;
                    }
                }
            }
        }
        let mut other = pos.to_vec();
        for i in 0..dim {
            let keep = other[i];
            for q in 0..s {
                other[i] = q;
                let nb = encode(&other, s);
                let b = if nb == idx { Some(a) } else { labels[nb] };
                if let Some(b) = b {
                    if !at.cyl_related(i, a, b) || !at.cyl_related(i, b, a) {
                        return false;
                    }
                }
            }
            other[i] = keep;
        }
        if flavor.has_transposition_condition() {
            let mut swapped = pos.to_vec();
            for i in 0..dim {
                for j in (i + 1)..dim {
                    swapped.copy_from_slice(pos);
                    swapped.swap(i, j);
                    let nb = encode(&swapped, s);
                    let b = if nb == idx { Some(a) } else { labels[nb] };
                    if let Some(b) = b {
                        if b != at.transpose(i, j, a) {
                            return false;
                        }
                    }
                }
            }
        }
        if flavor.has_replacement_condition() {
            let mut replaced = pos.to_vec();
            for i in 0..dim {
                for j in 0..dim {
                    if i == j {
                        continue;
                    }
                    // This tuple as the source of the replacement condition.
                    replaced.copy_from_slice(pos);
                    replaced[i] = replaced[j];
                    let nb = encode(&replaced, s);
                    let b = if nb == idx { Some(a) } else { labels[nb] };
                    if let Some(b) = b {
                        if !at.repl_related(i, j, a, b) {
                            return false;
                        }
                    }
                    // This tuple as the target: sources are the tuples that
                    // collapse onto pos under [i|j], which requires
                    // pos_i = pos_j.
                    if pos[i] == pos[j] {
                        let mut src = pos.to_vec();
                        let keep = src[i];
                        for q in 0..s {
                            src[i] = q;
                            let nb = encode(&src, s);
                            if nb == idx {
                                continue;
                            }
                            if let Some(b) = labels[nb] {
                                if !at.repl_related(i, j, b, a) {
                                    return false;
                                }
                            }
                        }
                        src[i] = keep;
                    }
                }
            }
        }
        true
    }
}

fn encode(pos: &[usize], s: usize) -> usize {
    let mut idx = 0;
    for &p in pos {
        idx = idx * s + p;
    }
    idx
}

fn decode(mut idx: usize, s: usize, dim: usize, out: &mut [usize]) {
    for slot in out[..dim].iter_mut().rev() {
        *slot = idx % s;
        idx /= s;
    }
}

/// Enumerates every valid network over the given nodes, up to `cap`.
/// Intended for small structures (test oracles, hyperbasis candidates).
pub fn enumerate_networks(
    at: &dyn AtomTable,
    nodes: &[NodeId],
    cap: usize,
) -> Result<Vec<Network>> {
    let mut sorted = nodes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != nodes.len() {
        return Err(Error::InvalidInput("duplicate node ids".into()));
    }
    let problem = CompletionProblem::new(at, sorted);
    let mut out = Vec::new();
    match problem.enumerate(cap, |n| {
        out.push(n.clone());
        true
    }) {
        CompletionOutcome::Exhausted => Ok(out),
        CompletionOutcome::CapHit => Err(Error::BudgetExhausted(format!(
            "more than {cap} networks over {} nodes",
            nodes.len()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bao_core::cartesian_atom_structure;

    /// The network induced by a point assignment v: nodes -> base of the
    /// full set structure: each tuple is labelled by the atom of its image.
    fn point_network(base: usize, dim: usize, nodes: &[NodeId], v: &[usize]) -> Network {
        let s = nodes.len();
        let total = s.pow(dim as u32);
        let mut labels = Vec::with_capacity(total);
        let mut pos = vec![0usize; dim];
        for idx in 0..total {
            let mut rest = idx;
            for q in (0..dim).rev() {
                pos[q] = rest % s;
                rest /= s;
            }
            let mut atom = 0usize;
            for q in 0..dim {
                atom = atom * base + v[pos[q]];
            }
            labels.push(atom as Atom);
        }
        Network::from_labels(dim, nodes.to_vec(), labels).unwrap()
    }

    #[test]
    fn injective_point_networks_validate() {
        let at = cartesian_atom_structure(3, 2).unwrap();
        for v in [[0, 1], [1, 0]] {
            let n = point_network(2, 3, &[0, 1], &v);
            let (ok, e) = validate_network(&n, &at);
            assert!(ok, "injective point network should be valid: {e:?}");
        }
        for v in [[0], [1]] {
            let n = point_network(2, 3, &[4], &v);
            let (ok, e) = validate_network(&n, &at);
            assert!(ok, "single point network should be valid: {e:?}");
        }
    }

    #[test]
    fn repeated_nodes_need_diagonal_labels() {
        let at = cartesian_atom_structure(3, 2).unwrap();
        // Distinct nodes sent to the same point are fine: the nodes behave
        // as one point seen twice.
        let n = point_network(2, 3, &[0, 1, 2], &[0, 1, 0]);
        let (ok, violations) = validate_network(&n, &at);
        assert!(ok, "collapsing assignment should be valid: {violations:?}");
        // A repeated-node tuple whose label is not below the diagonal is
        // the direction that must still fail. Tuple (0,0,1) has index
        // 0*4 + 0*2 + 1 = 1; give it a point with w_0 != w_1.
        let two = point_network(2, 3, &[0, 1], &[0, 1]);
        let mut labels = two.labels().to_vec();
        assert_eq!(labels[1], 0b001);
        labels[1] = 0b011;
        let broken = Network::from_labels(3, two.nodes().to_vec(), labels).unwrap();
        let (ok, violations) = validate_network(&broken, &at);
        assert!(!ok);
        assert!(
            violations.iter().any(|v| v.starts_with("(i)")),
            "expected a diagonal violation, got {violations:?}"
        );
    }

    #[test]
    fn transposition_mutation_reports_condition_iii() {
        let at = cartesian_atom_structure(3, 2).unwrap();
        let n = point_network(2, 3, &[0, 1], &[0, 1]);
        let mut labels = n.labels().to_vec();
        // Tuple (0,1,1) has index 0*4 + 1*2 + 1 = 3. Replace its label with
        // the other atom of the same diagonal pattern; the swap [0,1] then
        // disagrees with the label at (1,0,1).
        let idx = 3;
        assert_eq!(labels[idx], 0b011);
        labels[idx] = 0b100;
        let broken = Network::from_labels(3, n.nodes().to_vec(), labels).unwrap();
        let (ok, violations) = validate_network(&broken, &at);
        assert!(!ok);
        assert!(
            violations.iter().any(|v| v.starts_with("(iii)")),
            "expected a transposition violation, got {violations:?}"
        );
    }

    #[test]
    fn enumeration_matches_point_assignments() {
        let at = cartesian_atom_structure(3, 2).unwrap();
        // Valid networks over the full set structure are exactly the point
        // assignments into the base, injective or not.
        let pairs = enumerate_networks(&at, &[0, 1], 10_000).unwrap();
        assert_eq!(pairs.len(), 4);
        for v in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            assert!(pairs.contains(&point_network(2, 3, &[0, 1], &v)));
        }
        let triples = enumerate_networks(&at, &[0, 1, 2], 10_000).unwrap();
        assert_eq!(triples.len(), 8, "one network per map of 3 nodes into base 2");
    }

    #[test]
    fn rename_preserves_labels_of_mapped_tuples() {
        let at = cartesian_atom_structure(3, 2).unwrap();
        let n = point_network(2, 3, &[0, 1], &[1, 0]);
        let renamed = n.rename(|v| match v {
            0 => 5,
            1 => 0,
            other => other,
        });
        assert_eq!(renamed.nodes(), &[0, 5]);
        let (ok, _) = validate_network(&renamed, &at);
        assert!(ok);
        assert_eq!(n.label_of(&[0, 1, 1]).unwrap(), renamed.label_of(&[5, 0, 0]).unwrap());
        assert_eq!(n.label_of(&[1, 1, 0]).unwrap(), renamed.label_of(&[0, 0, 5]).unwrap());
    }

    #[test]
    fn agrees_off_spots_the_changed_node() {
        let a = point_network(2, 3, &[0, 1, 2], &[0, 1, 0]);
        let b = point_network(2, 3, &[0, 1, 2], &[0, 1, 1]);
        assert!(a.agrees_off(&b, 2));
        assert!(!a.agrees_off(&b, 0));
        assert!(a.agrees_off(&a, 1));
    }
}
