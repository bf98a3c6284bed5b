//! Membership checker for bases made of atomic networks.
//!
//! A basis is a set of networks rich enough to absorb every cylindrifier
//! demand internally: every atom of the structure appears somewhere, and
//! every demand `N(x) <= c_i a` against a member is answered by a member
//! `M` agreeing with `N` off a single node `z` and carrying the witness
//! `M(x[i:=z]) = a`. Such a set is exactly the territory the second player
//! needs to survive the atomic game forever without inventing networks.
//!
//! Atom coverage deliberately asks for the atom at *some* tuple rather
//! than at the distinguished tuple (0,..,n-1): an atom below a diagonal
//! d_ij can only ever label a tuple whose i-th and j-th nodes coincide,
//! so pinning coverage to the all-distinct tuple would make every
//! structure with diagonal atoms fail vacuously.

use std::collections::{BTreeMap, HashSet};

use crate::network::{validate_network, Network, NodeId};
use crate::table::{Atom, AtomTable};
use bao_core::{Error, Result};

/// A cylindrifier demand no member answers: the demand was made against
/// member `net` (an index into the candidate), at `tuple`, rewriting
/// coordinate `coord` to reach `atom`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessFailure {
    pub net: usize,
    pub tuple: Vec<NodeId>,
    pub coord: usize,
    pub atom: Atom,
}

#[derive(Debug, Clone)]
pub struct NetworkBasisReport {
    pub is_basis: bool,
    /// First atom (in atom order) labelling no tuple of any member.
    pub missing_atom: Option<Atom>,
    /// First unanswered demand in member, coordinate, tuple, atom order.
    pub missing_witness: Option<WitnessFailure>,
}

/// Check whether `candidate` is a basis for `at`. Members must be valid
/// networks of the structure's dimension; an invalid member is an input
/// error carrying its index, not a `false` verdict.
pub fn is_basis(candidate: &[Network], at: &dyn AtomTable) -> Result<NetworkBasisReport> {
    let n = at.dim();
    for (idx, net) in candidate.iter().enumerate() {
        if net.dim() != n {
            return Err(Error::InvalidInput(format!(
                "member {idx} has dimension {}, the structure has {n}",
                net.dim()
            )));
        }
        let (ok, violations) = validate_network(net, at);
        if !ok {
            return Err(Error::InvalidInput(format!(
                "member {idx} is not a valid network: {}",
                violations.first().map(String::as_str).unwrap_or("unknown violation")
            )));
        }
    }

    let mut report =
        NetworkBasisReport { is_basis: true, missing_atom: None, missing_witness: None };

    // Atom coverage.
    let mut seen: HashSet<Atom> = HashSet::new();
    for net in candidate {
        seen.extend(net.labels().iter().copied());
    }
    for a in at.atoms() {
        if !seen.contains(&a) {
            report.is_basis = false;
            report.missing_atom = Some(a);
            break;
        }
    }

    // Cylindrifier property. Members are grouped by node set so the
    // witness scan only touches networks whose node set is the demanded
    // one or extends it by the single node z.
    let mut by_nodes: BTreeMap<Vec<NodeId>, Vec<usize>> = BTreeMap::new();
    let mut universe: Vec<NodeId> = Vec::new();
    for (idx, net) in candidate.iter().enumerate() {
        by_nodes.entry(net.nodes().to_vec()).or_default().push(idx);
        universe.extend_from_slice(net.nodes());
    }
    universe.sort_unstable();
    universe.dedup();

    'demands: for (mi, net) in candidate.iter().enumerate() {
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
                    if !has_witness(candidate, &by_nodes, &universe, net, &xbar, i, a) {
                        report.is_basis = false;
                        report.missing_witness =
                            Some(WitnessFailure { net: mi, tuple: xbar.clone(), coord: i, atom: a });
                        break 'demands;
                    }
                }
            }
        }
    }

    Ok(report)
}

/// Whether some member answers the demand `(net, xbar, i, a)`: a member M
/// and a node z of M with M agreeing with `net` off z and M(xbar[i:=z]) = a.
/// The witness node is unrestricted; in particular z may sit inside the
/// demanded tuple, which is how demands for diagonal atoms are answered.
fn has_witness(
    candidate: &[Network],
    by_nodes: &BTreeMap<Vec<NodeId>, Vec<usize>>,
    universe: &[NodeId],
    net: &Network,
    xbar: &[NodeId],
    i: usize,
    a: Atom,
) -> bool {
    let mut ybar = xbar.to_vec();

    // Same node set: z ranges over all nodes of the member.
    if let Some(members) = by_nodes.get(net.nodes()) {
        for &mi in members {
            let m = &candidate[mi];
            for &z in m.nodes() {
                ybar.copy_from_slice(xbar);
                ybar[i] = z;
                if m.label_of(&ybar).map_or(false, |l| l == a) && m.agrees_off(net, z) {
                    return true;
                }
            }
        }
    }

    // One extra node: z is that node.
    for &z in universe {
        if net.contains_node(z) {
            continue;
        }
        let mut key = net.nodes().to_vec();
        key.push(z);
        key.sort_unstable();
        let Some(members) = by_nodes.get(&key) else { continue };
        ybar.copy_from_slice(xbar);
        ybar[i] = z;
        for &mi in members {
            let m = &candidate[mi];
            if m.label_of(&ybar).map_or(false, |l| l == a) && m.agrees_off(net, z) {
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
    use bao_core::cartesian_atom_structure;

    /// Every valid network over node subsets of {0,..,m-1}.
    fn all_networks(at: &dyn AtomTable, m: usize) -> Vec<Network> {
        let mut out = Vec::new();
        for mask in 1u32..(1 << m) {
            let nodes: Vec<NodeId> =
                (0..m as NodeId).filter(|&v| mask & (1 << v) != 0).collect();
            out.extend(enumerate_networks(at, &nodes, 100_000).unwrap());
        }
        out
    }

    #[test]
    fn the_full_network_set_is_a_basis() {
        let at = cartesian_atom_structure(3, 3).unwrap();
        let candidate = all_networks(&at, 3);
        let report = is_basis(&candidate, &at).unwrap();
        assert!(report.is_basis, "{report:?}");
    }

    #[test]
    fn an_empty_candidate_misses_the_first_atom() {
        let at = cartesian_atom_structure(3, 3).unwrap();
        let report = is_basis(&[], &at).unwrap();
        assert!(!report.is_basis);
        assert_eq!(report.missing_atom, Some(0));
    }

    #[test]
    fn dropping_three_node_networks_loses_the_spread_atoms() {
        let at = cartesian_atom_structure(3, 3).unwrap();
        let candidate: Vec<Network> =
            all_networks(&at, 3).into_iter().filter(|m| m.size() <= 2).collect();
        let report = is_basis(&candidate, &at).unwrap();
        assert!(!report.is_basis);
        // The first atom with three distinct values is (0,1,2), index 5.
        assert_eq!(report.missing_atom, Some(5));
    }

    #[test]
    fn deleting_one_witness_reports_the_exact_demand() {
        let at = cartesian_atom_structure(3, 3).unwrap();
        // Remove the network realising the assignment 0->0, 1->1, 2->2.
        let gone: Vec<Atom> = (0..27)
            .map(|idx| {
                let (x, y, z) = (idx / 9, (idx / 3) % 3, idx % 3);
                let v = [0u64, 1, 2];
                v[x] * 9 + v[y] * 3 + v[z]
            })
            .collect();
        let candidate: Vec<Network> = all_networks(&at, 3)
            .into_iter()
            .filter(|m| !(m.size() == 3 && m.labels() == &gone[..]))
            .collect();
        let report = is_basis(&candidate, &at).unwrap();
        assert!(!report.is_basis);
        assert!(report.missing_atom.is_none());
        let fail = report.missing_witness.expect("a demand fails");
        let member = &candidate[fail.net];
        assert_eq!(member.nodes(), &[0, 1]);
        assert_eq!(fail.coord, 0);
        // Demands at tuples like (0,0,0) are still answered by members
        // relabelling a node, so the first orphaned demand sits at (0,0,1),
        // asking for atom (2,0,1): only the deleted network carried a 2
        // next to the values 0 and 1.
        assert_eq!(fail.tuple, vec![0, 0, 1]);
        assert_eq!(fail.atom, 19);
    }

    #[test]
    fn an_invalid_member_is_an_input_error_with_its_index() {
        let at = cartesian_atom_structure(3, 2).unwrap();
        // The constant tuple (0,0,0) labelled by a point with unequal
        // coordinates breaks the diagonal condition.
        let mut labels = vec![0; 8];
        labels[0] = 0b010;
        let bad = Network::from_labels(3, vec![0, 1], labels).unwrap();
        let err = is_basis(&[bad], &at).unwrap_err();
        assert!(format!("{err}").contains("member 0"));
    }
}
