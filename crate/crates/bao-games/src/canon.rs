//! Canonical forms for game boards.
//!
//! A board is a set of networks over a shared pool of node ids. Two boards
//! that differ only by a joint renaming of node ids present the same game,
//! so the solver keys its memo tables by a canonical form: the
//! lexicographically least rendering of the board over all joint renamings
//! onto 0..u-1.
//!
//! Minimising over all u! renamings is pruned by colour refinement: ids
//! that refinement separates cannot be exchanged by any isomorphism, so
//! only permutations within refinement classes are tried. When the class
//! product still exceeds the cap, the form falls back to a fixed renaming
//! of the concrete board. The fallback is not renaming-invariant (two
//! renamings of one board may then get different keys, costing cache hits)
//! but it stays sound: forms are faithful renderings, so equal bytes
//! always mean isomorphic boards.

use crate::network::{Network, NodeId};
use std::collections::BTreeMap;
use std::sync::Arc;

pub const DEFAULT_PERM_CAP: usize = 5040;

/// A board rendered over renamed ids, with the renaming kept in both
/// directions so recorded moves can be translated to and from canonical
/// coordinates.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub bytes: Vec<u8>,
    pub hash: u128,
    /// Pairs (old, new), sorted by old id.
    pub old_to_new: Vec<(NodeId, NodeId)>,
    /// Pairs (new, old), sorted by new id.
    pub new_to_old: Vec<(NodeId, NodeId)>,
}

impl CanonicalForm {
    pub fn map_old(&self, v: NodeId) -> NodeId {
        let at = self.old_to_new.binary_search_by_key(&v, |p| p.0).expect("unknown node id");
        self.old_to_new[at].1
    }

    pub fn map_new(&self, v: NodeId) -> NodeId {
        let at = self.new_to_old.binary_search_by_key(&v, |p| p.0).expect("unknown node id");
        self.new_to_old[at].1
    }
}

fn fnv64(bytes: &[u8], seed: u64) -> u64 {
    let mut h = seed;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn hash128(bytes: &[u8]) -> u128 {
    let hi = fnv64(bytes, 0xcbf2_9ce4_8422_2325);
    let lo = fnv64(bytes, 0x9e37_79b9_7f4a_7c15);
    ((hi as u128) << 64) | lo as u128
}

fn mix(words: &[u64]) -> u64 {
    let mut bytes = Vec::with_capacity(words.len() * 8);
    for w in words {
        bytes.extend_from_slice(&w.to_le_bytes());
    }
    fnv64(&bytes, 0x84222325_cbf29ce4)
}

fn board_ids(board: &[Arc<Network>]) -> Vec<NodeId> {
    let mut ids: Vec<NodeId> = board.iter().flat_map(|n| n.nodes().iter().copied()).collect();
    ids.sort_unstable();
    ids.dedup();
    ids
}

/// Renders the board under a renaming as length-prefixed network blocks,
/// sorted so that play order is forgotten.
fn render(board: &[Arc<Network>], map: &BTreeMap<NodeId, NodeId>) -> Vec<u8> {
    let mut blocks: Vec<Vec<u8>> = board.iter().map(|n| n.rename(|v| map[&v]).raw_bytes()).collect();
    blocks.sort_unstable();
    let mut out = Vec::new();
    for b in blocks {
        out.extend_from_slice(&(b.len() as u32).to_le_bytes());
        out.extend_from_slice(&b);
    }
    out
}

fn form_from_map(board: &[Arc<Network>], map: BTreeMap<NodeId, NodeId>) -> CanonicalForm {
    let bytes = render(board, &map);
    let hash = hash128(&bytes);
    let old_to_new: Vec<(NodeId, NodeId)> = map.iter().map(|(&o, &n)| (o, n)).collect();
    let mut new_to_old: Vec<(NodeId, NodeId)> = old_to_new.iter().map(|&(o, n)| (n, o)).collect();
    new_to_old.sort_unstable();
    CanonicalForm { bytes, hash, old_to_new, new_to_old }
}

/// Canonical form with the ids kept in place (well, compacted onto 0..u-1
/// in sorted order). Used when canonicalisation is switched off and as the
/// over-cap fallback.
pub fn raw_form(board: &[Arc<Network>]) -> CanonicalForm {
    let ids = board_ids(board);
    let map: BTreeMap<NodeId, NodeId> =
        ids.iter().enumerate().map(|(k, &v)| (v, k as NodeId)).collect();
    form_from_map(board, map)
}

/// Node colours by refinement: a node's colour digests, per network it
/// lies in, the multiset of (occupied coordinates, label, coordinate
/// colours) over the tuples through it. Three rounds are plenty for the
/// handful of nodes a game board carries.
fn refine_colours(board: &[Arc<Network>], ids: &[NodeId]) -> Vec<u64> {
    let index_of = |v: NodeId| ids.binary_search(&v).unwrap();
    let mut colour = vec![0u64; ids.len()];
    let mut acc = vec![0u64; ids.len()];
    let mut tuple_colours = Vec::new();
    for _ in 0..3 {
        acc.iter_mut().for_each(|a| *a = 0);
        for net in board {
            let dim = net.dim();
            let mut pos = vec![0usize; dim];
            let mut per_net = vec![0u64; ids.len()];
            let mut in_net = vec![false; ids.len()];
            for idx in 0..net.labels().len() {
                net.positions_of_index(idx, &mut pos);
                tuple_colours.clear();
                tuple_colours.push(net.labels()[idx]);
                for q in 0..dim {
                    tuple_colours.push(colour[index_of(net.nodes()[pos[q]])]);
                }
                let base = mix(&tuple_colours);
                // One contribution per distinct node of the tuple, tagged
                // with the set of coordinates it occupies.
                for q in 0..dim {
                    if pos[..q].contains(&pos[q]) {
                        continue;
                    }
                    let mask = (0..dim).filter(|&r| pos[r] == pos[q]).fold(0u64, |m, r| m | 1 << r);
                    let k = index_of(net.nodes()[pos[q]]);
                    in_net[k] = true;
                    per_net[k] = per_net[k].wrapping_add(mix(&[mask, base]));
                }
            }
            for k in 0..ids.len() {
                if in_net[k] {
                    acc[k] = acc[k].wrapping_add(mix(&[net.size() as u64, per_net[k]]));
                }
            }
        }
        for k in 0..ids.len() {
            colour[k] = mix(&[colour[k], acc[k]]);
        }
    }
    colour
}

/// Least rendering of the board over joint renamings onto 0..u-1,
/// restricted to permutations respecting refinement classes. Falls back to
/// `raw_form` when the class permutation product exceeds `perm_cap`.
pub fn canonical_form(board: &[Arc<Network>], perm_cap: usize) -> CanonicalForm {
    let ids = board_ids(board);
    if ids.is_empty() {
        return raw_form(board);
    }
    let colour = refine_colours(board, &ids);
    let mut classes: BTreeMap<u64, Vec<NodeId>> = BTreeMap::new();
    for (k, &v) in ids.iter().enumerate() {
        classes.entry(colour[k]).or_default().push(v);
    }
    let mut product = 1usize;
    for members in classes.values() {
        product = product.saturating_mul(factorial_capped(members.len(), perm_cap));
        if product > perm_cap {
            return raw_form(board);
        }
    }

    // Classes get consecutive id blocks in colour order; permutations are
    // explored within each class only.
    let class_list: Vec<&Vec<NodeId>> = classes.values().collect();
    let mut bases = Vec::with_capacity(class_list.len());
    let mut next = 0 as NodeId;
    for members in &class_list {
        bases.push(next);
        next += members.len() as NodeId;
    }

    let mut best: Option<CanonicalForm> = None;
    let mut map: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    explore(&class_list, &bases, 0, &mut map, board, &mut best);
    best.expect("at least one renaming is always explored")
}

fn factorial_capped(k: usize, cap: usize) -> usize {
    let mut f = 1usize;
    for q in 2..=k {
        f = f.saturating_mul(q);
        if f > cap {
            return f;
        }
    }
    f
}

fn explore(
    classes: &[&Vec<NodeId>],
    bases: &[NodeId],
    depth: usize,
    map: &mut BTreeMap<NodeId, NodeId>,
    board: &[Arc<Network>],
    best: &mut Option<CanonicalForm>,
) {
    if depth == classes.len() {
        let form = form_from_map(board, map.clone());
        if best.as_ref().map_or(true, |b| form.bytes < b.bytes) {
            *best = Some(form);
        }
        return;
    }
    let members = classes[depth];
    let base = bases[depth];
    permute(members, &mut |perm| {
        for (off, &old) in perm.iter().enumerate() {
            map.insert(old, base + off as NodeId);
        }
        explore(classes, bases, depth + 1, map, board, best);
    });
}

/// Calls the visitor with every permutation of `items`, in lexicographic
/// order of the chosen sequence.
fn permute(items: &[NodeId], visit: &mut dyn FnMut(&[NodeId])) {
    fn rec(pool: &mut Vec<NodeId>, chosen: &mut Vec<NodeId>, visit: &mut dyn FnMut(&[NodeId])) {
        if pool.is_empty() {
            visit(chosen);
            return;
        }
        for k in 0..pool.len() {
            let v = pool.remove(k);
            chosen.push(v);
            rec(pool, chosen, visit);
            chosen.pop();
            pool.insert(k, v);
        }
    }
    let mut pool = items.to_vec();
    let mut chosen = Vec::with_capacity(items.len());
    rec(&mut pool, &mut chosen, visit);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Network;
    use crate::table::Atom;

    fn point(nodes: &[NodeId], v: &[usize]) -> Arc<Network> {
        let s = nodes.len();
        let mut labels = Vec::with_capacity(s * s * s);
        for a in 0..s {
            for b in 0..s {
                for c in 0..s {
                    labels.push((v[a] * 4 + v[b] * 2 + v[c]) as Atom);
                }
            }
        }
        Arc::new(Network::from_labels(3, nodes.to_vec(), labels).unwrap())
    }

    #[test]
    fn joint_renaming_leaves_the_form_alone() {
        let board = vec![point(&[0, 1], &[0, 1]), point(&[1, 2], &[1, 0])];
        // Apply 0->5, 1->3, 2->0 jointly; node lists resort, so the value
        // vectors follow their nodes.
        let renamed = vec![point(&[3, 5], &[1, 0]), point(&[0, 3], &[0, 1])];
        let a = canonical_form(&board, DEFAULT_PERM_CAP);
        let b = canonical_form(&renamed, DEFAULT_PERM_CAP);
        assert_eq!(a.bytes, b.bytes);
        assert_eq!(a.hash, b.hash);
    }

    #[test]
    fn inconsistent_renaming_changes_the_form() {
        // Same two networks, but the shared middle node is torn apart:
        // boards are genuinely non-isomorphic.
        let board = vec![point(&[0, 1], &[0, 1]), point(&[1, 2], &[1, 0])];
        let torn = vec![point(&[0, 1], &[0, 1]), point(&[2, 3], &[1, 0])];
        let a = canonical_form(&board, DEFAULT_PERM_CAP);
        let b = canonical_form(&torn, DEFAULT_PERM_CAP);
        assert_ne!(a.bytes, b.bytes);
    }

    #[test]
    fn maps_invert_each_other() {
        let board = vec![point(&[2, 7], &[0, 1]), point(&[7, 9], &[1, 0])];
        let form = canonical_form(&board, DEFAULT_PERM_CAP);
        for &(old, _) in &form.old_to_new {
            assert_eq!(form.map_new(form.map_old(old)), old);
        }
        let mut news: Vec<NodeId> = form.old_to_new.iter().map(|p| p.1).collect();
        news.sort_unstable();
        assert_eq!(news, vec![0, 1, 2]);
    }

    #[test]
    fn fallback_still_separates_distinct_boards() {
        let board = vec![point(&[0, 1], &[0, 1])];
        let other = vec![point(&[0, 1], &[1, 0])];
        let a = canonical_form(&board, 0);
        let b = canonical_form(&other, 0);
        // With a zero cap both go through the raw path; the renderings
        // remain faithful, so different boards keep different bytes.
        assert_ne!(a.bytes, b.bytes);
        let c = canonical_form(&board, DEFAULT_PERM_CAP);
        assert_eq!(a.bytes.len(), c.bytes.len());
    }
}
