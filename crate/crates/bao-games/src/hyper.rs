//! Hypernetworks and the hyperbasis membership checker.
//!
//! A hypernetwork with ambient bound m is an ordinary n-dimensional
//! network together with labels for the hyperedges: tuples over its nodes
//! of every length from 1 to m except n itself. Hyperedge labels live in
//! their own key space (`HyperLabel`), disjoint from atoms by type, so the
//! requirement that no hyperedge label is an atom holds by construction.
//!
//! Besides the core network conditions, one rule ties hyperedge labels to
//! the diagonals: whenever two equally long hyperedges are glued pointwise
//! by some padding tuple z (meaning the core labels every pair (x_q, y_q, z)
//! below d_01), they must carry the same label. Over a core whose diagonal
//! condition is strict this only ever glues a tuple to itself; the rule has
//! teeth for diagonal-free flavors with a nontrivial d_01 relation.
//!
//! A hyperbasis is to hypernetworks what a basis is to networks, with one
//! more closure property, amalgamation: members agreeing off a pair of
//! nodes {x, y} must have an interpolant in the set agreeing with one off
//! x and with the other off y.

use std::collections::{BTreeMap, HashSet};

use crate::basis::WitnessFailure;
use crate::network::{validate_network, Network, NodeId};
use crate::table::{Atom, AtomTable};
use bao_core::{Error, Result};

/// Label for a hyperedge. A separate key space from `Atom`.
pub type HyperLabel = u64;

/// Cap on the total number of hyperedges of one hypernetwork.
const MAX_HYPEREDGES: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypernetwork {
    core: Network,
    bound: usize,
    hyper: BTreeMap<Vec<NodeId>, HyperLabel>,
}

/// The hyperedge lengths of a hypernetwork with core dimension `n` and
/// bound `m`: every length from 1 to m except n.
fn hyperedge_lengths(n: usize, m: usize) -> impl Iterator<Item = usize> {
    (1..=m).filter(move |&l| l != n)
}

fn count_hyperedges(s: usize, n: usize, m: usize) -> usize {
    let mut total = 0usize;
    for l in hyperedge_lengths(n, m) {
        let Some(block) = s.checked_pow(l as u32) else { return usize::MAX };
        let Some(sum) = total.checked_add(block) else { return usize::MAX };
        total = sum;
    }
    total
}

impl Hypernetwork {
    /// Wrap a core network and a total hyperedge labelling. The map must
    /// assign a label to exactly the tuples over the core's nodes of each
    /// hyperedge length; node ids must stay below `bound`.
    pub fn new(
        core: Network,
        bound: usize,
        hyper: BTreeMap<Vec<NodeId>, HyperLabel>,
    ) -> Result<Hypernetwork> {
        let n = core.dim();
        if bound <= n {
            return Err(Error::InvalidInput(format!(
                "hypernetwork bound {bound} must exceed the core dimension {n}"
            )));
        }
        if let Some(&v) = core.nodes().iter().find(|&&v| v as usize >= bound) {
            return Err(Error::InvalidInput(format!(
                "node {v} is not below the bound {bound}"
            )));
        }
        let s = core.size();
        let expected = count_hyperedges(s, n, bound);
        if expected > MAX_HYPEREDGES {
            return Err(Error::InvalidInput(format!(
                "{expected} hyperedges exceed the supported {MAX_HYPEREDGES}"
            )));
        }
        if hyper.len() != expected {
            return Err(Error::InvalidInput(format!(
                "expected {expected} hyperedge labels, got {}",
                hyper.len()
            )));
        }
        for key in hyper.keys() {
            let l = key.len();
            if l == 0 || l > bound || l == n {
                return Err(Error::InvalidInput(format!(
                    "hyperedge length {l} is outside the allowed lengths"
                )));
            }
            if let Some(&v) = key.iter().find(|&&v| !core.contains_node(v)) {
                return Err(Error::InvalidInput(format!(
                    "hyperedge mentions {v}, not a node of the core"
                )));
            }
        }
        Ok(Hypernetwork { core, bound, hyper })
    }

    /// The hypernetwork labelling every hyperedge with the same label.
    pub fn uniform(core: Network, bound: usize, label: HyperLabel) -> Result<Hypernetwork> {
        let nodes = core.nodes().to_vec();
        let n = core.dim();
        let mut hyper = BTreeMap::new();
        for l in hyperedge_lengths(n, bound) {
            let mut tuple = vec![0usize; l];
            if nodes.is_empty() {
                continue;
            }
            loop {
                hyper.insert(
                    tuple.iter().map(|&p| nodes[p]).collect::<Vec<NodeId>>(),
                    label,
                );
                let mut q = l;
                loop {
                    if q == 0 {
                        break;
                    }
                    q -= 1;
                    tuple[q] += 1;
                    if tuple[q] < nodes.len() {
                        break;
                    }
                    tuple[q] = 0;
                }
                if tuple.iter().all(|&p| p == 0) {
                    break;
                }
            }
        }
        Hypernetwork::new(core, bound, hyper)
    }

    pub fn core(&self) -> &Network {
        &self.core
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn hyper_label(&self, tuple: &[NodeId]) -> Result<HyperLabel> {
        self.hyper.get(tuple).copied().ok_or_else(|| {
            Error::InvalidInput(format!("{tuple:?} is not a hyperedge of this hypernetwork"))
        })
    }

    /// Whether the two hypernetworks agree off the given nodes: node sets
    /// equal outside `off`, and core labels and hyperedge labels equal on
    /// every tuple avoiding all of `off`.
    pub fn agrees_off(&self, other: &Hypernetwork, off: &[NodeId]) -> bool {
        if self.core.dim() != other.core.dim() || self.bound != other.bound {
            return false;
        }
        let keep = |v: &NodeId| !off.contains(v);
        let mine: Vec<NodeId> = self.core.nodes().iter().copied().filter(|v| keep(v)).collect();
        let theirs: Vec<NodeId> = other.core.nodes().iter().copied().filter(|v| keep(v)).collect();
        if mine != theirs {
            return false;
        }
        let n = self.core.dim();
        let mut tuple = vec![0 as NodeId; n];
        let mut counter = vec![0usize; n];
        if !mine.is_empty() {
            loop {
                for q in 0..n {
                    tuple[q] = mine[counter[q]];
                }
                let a = self.core.label_of(&tuple);
                let b = other.core.label_of(&tuple);
                match (a, b) {
                    (Ok(a), Ok(b)) if a == b => {}
                    _ => return false,
                }
                if !bump(&mut counter, mine.len()) {
                    break;
                }
            }
        }
        for (key, &label) in &self.hyper {
            if key.iter().all(|v| keep(v)) {
                if other.hyper.get(key) != Some(&label) {
                    return false;
                }
            }
        }
        // Hyperedge key sets over equal off-node sets coincide, so the one
        // direction suffices for equality of the off part.
        true
    }
}

/// Advance a mixed-radix counter; false when it wraps to all zeros.
fn bump(counter: &mut [usize], radix: usize) -> bool {
    let mut q = counter.len();
    loop {
        if q == 0 {
            return false;
        }
        q -= 1;
        counter[q] += 1;
        if counter[q] < radix {
            return true;
        }
        counter[q] = 0;
    }
}

/// Validate a hypernetwork: the core must be a valid network and the
/// hyperedge labels must respect the gluing rule. Returns the verdict and
/// the list of violations found (capped).
pub fn validate_hypernetwork(h: &Hypernetwork, at: &dyn AtomTable) -> (bool, Vec<String>) {
    let (_, mut violations) = validate_network(h.core(), at);
    zigzag_violations(h, at, &mut violations);
    (violations.is_empty(), violations)
}

/// The gluing rule: if some padding tuple z makes the core label every
/// pair (x_q, y_q, z) a d_01 atom, the hyperedges x and y must carry the
/// same label. Pairs already labelled equally are skipped, so the scan
/// costs nothing on uniformly labelled hypernetworks.
fn zigzag_violations(h: &Hypernetwork, at: &dyn AtomTable, out: &mut Vec<String>) {
    let n = h.core.dim();
    if n < 2 {
        return;
    }
    let nodes = h.core.nodes();
    let s = nodes.len();
    if s == 0 {
        return;
    }

    // One boolean matrix per padding tuple: glued(x, y) when the core
    // label at (x, y, padding) lies below d_01.
    let pad_len = n - 2;
    let mut glued: Vec<Vec<bool>> = Vec::new();
    let mut pad_counter = vec![0usize; pad_len];
    let mut tuple = vec![0 as NodeId; n];
    loop {
        let mut matrix = vec![false; s * s];
        for (xi, &x) in nodes.iter().enumerate() {
            for (yi, &y) in nodes.iter().enumerate() {
                tuple[0] = x;
                tuple[1] = y;
                for q in 0..pad_len {
                    tuple[2 + q] = nodes[pad_counter[q]];
                }
                if let Ok(a) = h.core.label_of(&tuple) {
                    matrix[xi * s + yi] = at.in_diag(0, 1, a);
                }
            }
        }
        glued.push(matrix);
        if pad_len == 0 || !bump(&mut pad_counter, s) {
            break;
        }
    }

    let index_of = |v: NodeId| nodes.binary_search(&v).unwrap();
    let keys: Vec<&Vec<NodeId>> = h.hyper.keys().collect();
    'pairs: for (ki, &xkey) in keys.iter().enumerate() {
        for &ykey in keys.iter().skip(ki + 1) {
            if xkey.len() != ykey.len() {
                continue;
            }
            if h.hyper[xkey] == h.hyper[ykey] {
                continue;
            }
            let joined = glued.iter().any(|matrix| {
                xkey.iter()
                    .zip(ykey.iter())
                    .all(|(&x, &y)| matrix[index_of(x) * s + index_of(y)])
            });
            if joined {
                out.push(format!(
                    "(zigzag) hyperedges {xkey:?} and {ykey:?} are glued but labelled {} and {}",
                    h.hyper[xkey], h.hyper[ykey]
                ));
                if out.len() >= 64 {
                    break 'pairs;
                }
            }
        }
    }
}

/// An amalgamation counterexample: members `left` and `right` agree off
/// `{x, y}` but no member agrees with `left` off x and with `right` off y.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmalgamFailure {
    pub left: usize,
    pub right: usize,
    pub x: NodeId,
    pub y: NodeId,
}

#[derive(Debug, Clone)]
pub struct HyperbasisReport {
    pub is_hyperbasis: bool,
    pub missing_atom: Option<Atom>,
    pub missing_witness: Option<WitnessFailure>,
    pub missing_amalgam: Option<AmalgamFailure>,
}

/// Check whether `candidate` is a hyperbasis with bound `m` for `at`:
/// atom coverage and the cylindrifier property as for network bases (with
/// agreement extended to hyperedge labels), plus amalgamation. Invalid or
/// mismatched members are input errors carrying the member index.
pub fn is_hyperbasis(
    candidate: &[Hypernetwork],
    at: &dyn AtomTable,
    m: usize,
) -> Result<HyperbasisReport> {
    let n = at.dim();
    for (idx, h) in candidate.iter().enumerate() {
        if h.core.dim() != n {
            return Err(Error::InvalidInput(format!(
                "member {idx} has core dimension {}, the structure has {n}",
                h.core.dim()
            )));
        }
        if h.bound != m {
            return Err(Error::InvalidInput(format!(
                "member {idx} has bound {}, the check asked for {m}",
                h.bound
            )));
        }
        let (ok, violations) = validate_hypernetwork(h, at);
        if !ok {
            return Err(Error::InvalidInput(format!(
                "member {idx} is not a valid hypernetwork: {}",
                violations.first().map(String::as_str).unwrap_or("unknown violation")
            )));
        }
    }

    let mut report = HyperbasisReport {
        is_hyperbasis: true,
        missing_atom: None,
        missing_witness: None,
        missing_amalgam: None,
    };

    // Atom coverage over the cores.
    let mut seen: HashSet<Atom> = HashSet::new();
    for h in candidate {
        seen.extend(h.core.labels().iter().copied());
    }
    for a in at.atoms() {
        if !seen.contains(&a) {
            report.is_hyperbasis = false;
            report.missing_atom = Some(a);
            break;
        }
    }

    // Cylindrifier property, with hyperedge-aware agreement.
    'demands: for (mi, h) in candidate.iter().enumerate() {
        let net = &h.core;
        let total = net.labels().len();
        let mut pos = vec![0usize; n];
        let mut xbar = vec![0 as NodeId; n];
        for i in 0..n {
            for idx in 0..total {
                net.positions_of_index(idx, &mut pos);
                for q in 0..n {
                    xbar[q] = net.nodes()[pos[q]];
                }
                let b = net.labels()[idx];
                for a in at.cyl_demands(i, b) {
                    if !hyper_witness(candidate, h, &xbar, i, a) {
                        report.is_hyperbasis = false;
                        report.missing_witness =
                            Some(WitnessFailure { net: mi, tuple: xbar.clone(), coord: i, atom: a });
                        break 'demands;
                    }
                }
            }
        }
    }

    // Amalgamation over ordered pairs and ordered node pairs below m.
    'amal: for (li, left) in candidate.iter().enumerate() {
        for (ri, right) in candidate.iter().enumerate() {
            for x in 0..m as NodeId {
                for y in 0..m as NodeId {
                    if x == y || !left.agrees_off(right, &[x, y]) {
                        continue;
                    }
                    let found = candidate
                        .iter()
                        .any(|l| left.agrees_off(l, &[x]) && l.agrees_off(right, &[y]));
                    if !found {
                        report.is_hyperbasis = false;
                        report.missing_amalgam =
                            Some(AmalgamFailure { left: li, right: ri, x, y });
                        break 'amal;
                    }
                }
            }
        }
    }

    Ok(report)
}

fn hyper_witness(
    candidate: &[Hypernetwork],
    h: &Hypernetwork,
    xbar: &[NodeId],
    i: usize,
    a: Atom,
) -> bool {
    let mut ybar = xbar.to_vec();
    for m in candidate {
        let extra: Vec<NodeId> = m
            .core
            .nodes()
            .iter()
            .copied()
            .filter(|&v| !h.core.contains_node(v))
            .collect();
        let zs: Vec<NodeId> = match extra.len() {
            0 => m.core.nodes().to_vec(),
            1 => vec![extra[0]],
            _ => continue,
        };
        for z in zs {
            ybar.copy_from_slice(xbar);
            ybar[i] = z;
            if m.core.label_of(&ybar).map_or(false, |l| l == a) && m.agrees_off(h, &[z]) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::enumerate_networks;
    use crate::table::Flavor;
    use bao_core::cartesian_atom_structure;

    fn point_core(base: usize, nodes: &[NodeId], v: &[usize]) -> Network {
        let s = nodes.len();
        let total = s.pow(3);
        let mut labels = Vec::with_capacity(total);
        for idx in 0..total {
            let (x, y, z) = (idx / (s * s), (idx / s) % s, idx % s);
            labels.push((v[x] * base * base + v[y] * base + v[z]) as Atom);
        }
        Network::from_labels(3, nodes.to_vec(), labels).unwrap()
    }

    #[test]
    fn uniform_hypernetworks_validate() {
        let at = cartesian_atom_structure(3, 3).unwrap();
        let core = point_core(3, &[0, 1, 2], &[0, 1, 2]);
        let h = Hypernetwork::uniform(core, 4, 7).unwrap();
        // Lengths 1, 2 and 4 over three nodes.
        assert_eq!(h.hyper.len(), 3 + 9 + 81);
        let (ok, violations) = validate_hypernetwork(&h, &at);
        assert!(ok, "{violations:?}");
        assert_eq!(h.hyper_label(&[0, 2]).unwrap(), 7);
    }

    #[test]
    fn missing_hyperedges_are_rejected() {
        let core = point_core(3, &[0, 1], &[0, 1]);
        let mut hyper = BTreeMap::new();
        hyper.insert(vec![0], 1);
        let err = Hypernetwork::new(core, 4, hyper).unwrap_err();
        assert!(format!("{err}").contains("expected"));
    }

    /// Two atoms in two dimensions, no constraints on cylindrifiers, and
    /// atom 0 declared a d_01 atom. Distinct nodes can then be glued,
    /// which is what the gluing rule needs to bite.
    struct GluedTable;

    impl AtomTable for GluedTable {
        fn dim(&self) -> usize {
            2
        }
        fn flavor(&self) -> Flavor {
            Flavor::Df
        }
        fn atom_count(&self) -> Option<u64> {
            Some(2)
        }
        fn atoms(&self) -> Box<dyn Iterator<Item = Atom> + '_> {
            Box::new(0..2)
        }
        fn cyl_lower(&self, _i: usize, _a: Atom) -> Vec<Atom> {
            vec![0, 1]
        }
        fn cyl_demands(&self, _i: usize, _b: Atom) -> Vec<Atom> {
            vec![0, 1]
        }
        fn cyl_related(&self, _i: usize, _b: Atom, _a: Atom) -> bool {
            true
        }
        fn in_diag(&self, i: usize, j: usize, a: Atom) -> bool {
            i == j || a == 0
        }
        fn transpose(&self, _i: usize, _j: usize, a: Atom) -> Atom {
            a
        }
        fn atom_label(&self, a: Atom) -> String {
            format!("g{a}")
        }
    }

    #[test]
    fn glued_hyperedges_must_share_a_label() {
        let at = GluedTable;
        // Core on {0, 1} labelling every pair with the d_01 atom 0, so the
        // nodes 0 and 1 are glued to each other.
        let core = Network::from_labels(2, vec![0, 1], vec![0; 4]).unwrap();
        let mut hyper = BTreeMap::new();
        for key in [vec![0], vec![1]] {
            hyper.insert(key, 0);
        }
        for x in 0..2 as NodeId {
            for y in 0..2 as NodeId {
                for z in 0..2 as NodeId {
                    hyper.insert(vec![x, y, z], 5);
                }
            }
        }
        let good = Hypernetwork::new(core.clone(), 3, hyper.clone()).unwrap();
        let (ok, violations) = validate_hypernetwork(&good, &at);
        assert!(ok, "{violations:?}");

        hyper.insert(vec![1], 9);
        let bad = Hypernetwork::new(core, 3, hyper).unwrap();
        let (ok, violations) = validate_hypernetwork(&bad, &at);
        assert!(!ok);
        assert!(violations.iter().any(|v| v.starts_with("(zigzag)")), "{violations:?}");
    }

    /// One atom in two dimensions with every cylindrifier relation total.
    struct OneAtom;

    impl AtomTable for OneAtom {
        fn dim(&self) -> usize {
            2
        }
        fn flavor(&self) -> Flavor {
            Flavor::Df
        }
        fn atom_count(&self) -> Option<u64> {
            Some(1)
        }
        fn atoms(&self) -> Box<dyn Iterator<Item = Atom> + '_> {
            Box::new(0..1)
        }
        fn cyl_lower(&self, _i: usize, _a: Atom) -> Vec<Atom> {
            vec![0]
        }
        fn cyl_demands(&self, _i: usize, _b: Atom) -> Vec<Atom> {
            vec![0]
        }
        fn cyl_related(&self, _i: usize, _b: Atom, _a: Atom) -> bool {
            true
        }
        fn in_diag(&self, i: usize, j: usize, _a: Atom) -> bool {
            i == j
        }
        fn transpose(&self, _i: usize, _j: usize, a: Atom) -> Atom {
            a
        }
        fn atom_label(&self, a: Atom) -> String {
            format!("u{a}")
        }
    }

    #[test]
    fn one_atom_hypernetworks_through_a_common_node_form_a_hyperbasis() {
        let at = OneAtom;
        let m = 3;
        // Every node set contains node 0, so amalgamation never asks for
        // the empty interpolant (which a network cannot be).
        let mut candidate = Vec::new();
        for mask in 0u32..(1 << (m - 1)) {
            let mut nodes: Vec<NodeId> = vec![0];
            nodes.extend((1..m as NodeId).filter(|&v| mask & (1 << (v - 1)) != 0));
            let labels = vec![0 as Atom; nodes.len() * nodes.len()];
            let core = Network::from_labels(2, nodes, labels).unwrap();
            candidate.push(Hypernetwork::uniform(core, m, 0).unwrap());
        }
        let report = is_hyperbasis(&candidate, &at, m).unwrap();
        assert!(report.is_hyperbasis, "{report:?}");
    }

    #[test]
    fn disjoint_singletons_would_need_the_empty_interpolant() {
        let at = OneAtom;
        let one = |v: NodeId| {
            let core = Network::from_labels(2, vec![v], vec![0]).unwrap();
            Hypernetwork::uniform(core, 3, 0).unwrap()
        };
        // The members agree off {0, 1} vacuously, and the interpolant
        // would have to drop both nodes.
        let report = is_hyperbasis(&[one(0), one(1)], &at, 3).unwrap();
        assert!(!report.is_hyperbasis);
        assert_eq!(
            report.missing_amalgam,
            Some(AmalgamFailure { left: 0, right: 1, x: 0, y: 1 })
        );
    }

    #[test]
    fn overlapping_members_without_an_interpolant_fail_amalgamation() {
        let at = cartesian_atom_structure(3, 3).unwrap();
        // Both members live on {0,1,2} and agree only at node 2. The glue
        // of the two assignments would repeat a value, which no valid
        // network realises, and the candidate holds nothing else.
        let left = Hypernetwork::uniform(point_core(3, &[0, 1, 2], &[0, 1, 2]), 4, 0).unwrap();
        let right = Hypernetwork::uniform(point_core(3, &[0, 1, 2], &[1, 0, 2]), 4, 0).unwrap();
        let report = is_hyperbasis(&[left, right], &at, 4).unwrap();
        assert!(!report.is_hyperbasis);
        assert!(report.missing_atom.is_none(), "{report:?}");
        assert!(report.missing_witness.is_none(), "{report:?}");
        assert_eq!(
            report.missing_amalgam,
            Some(AmalgamFailure { left: 0, right: 1, x: 0, y: 1 })
        );
    }

    #[test]
    fn the_full_hypernetwork_set_answers_cylindrifier_demands() {
        let at = cartesian_atom_structure(3, 3).unwrap();
        let mut candidate = Vec::new();
        for mask in 1u32..(1 << 3) {
            let nodes: Vec<NodeId> =
                (0..3 as NodeId).filter(|&v| mask & (1 << v) != 0).collect();
            for net in enumerate_networks(&at, &nodes, 100_000).unwrap() {
                candidate.push(Hypernetwork::uniform(net, 4, 0).unwrap());
            }
        }
        let report = is_hyperbasis(&candidate, &at, 4).unwrap();
        // Amalgamation fails over this structure (gluing two assignments
        // can force a repeated value), but coverage and the cylindrifier
        // property hold.
        assert!(report.missing_atom.is_none(), "{report:?}");
        assert!(report.missing_witness.is_none(), "{report:?}");
    }
}
