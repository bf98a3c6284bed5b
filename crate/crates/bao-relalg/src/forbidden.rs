use std::collections::HashSet;

use bao_core::{AtomId, Error, FiniteAtomStructure, RaTables, Result};

/// The six Peircean transforms of a triple `(a, b, c)` read as `c <= a;b`.
/// Rotations move the conclusion around the triangle, the other three are
/// their converses.
pub fn peircean_transforms(
    conv: &[AtomId],
    (a, b, c): (AtomId, AtomId, AtomId),
) -> [(AtomId, AtomId, AtomId); 6] {
    let cv = |x: AtomId| conv[x as usize];
    [
        (a, b, c),
        (cv(a), c, b),
        (c, cv(b), a),
        (cv(b), cv(a), cv(c)),
        (b, cv(c), cv(a)),
        (cv(c), a, cv(b)),
    ]
}

/// Is the consistent-triple set of an RA structure closed under the
/// Peircean transforms?  Checkers that test one orientation per triangle
/// require this.
pub fn peircean_closed(at: &FiniteAtomStructure) -> Result<bool> {
    let t = at.ra_tables_required()?;
    for trip in t.triples() {
        for tr in peircean_transforms(&t.conv, trip) {
            if !t.consistent(tr.0, tr.1, tr.2) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Triples the Peircean closure had to add to the user's forbidden set.
#[derive(Debug, Clone, Default)]
pub struct ClosureReport {
    pub added: Vec<(AtomId, AtomId, AtomId)>,
}

/// Build a relation-algebra atom structure from a forbidden-triple
/// presentation.
///
/// The identity atom `id` obeys the identity law outright: triples forced by
/// it are consistent no matter what, triples it rules out are forbidden no
/// matter what, and a user-supplied forbidden triple clashing with the law
/// is an error.  The remaining forbidden set is closed under the Peircean
/// transforms; any triple that closure added (beyond the input) is reported.
pub fn ra_from_forbidden(
    names: Vec<String>,
    id: AtomId,
    conv: Vec<AtomId>,
    forbidden: &[(AtomId, AtomId, AtomId)],
) -> Result<(FiniteAtomStructure, ClosureReport)> {
    let n = names.len();
    if (id as usize) >= n {
        return Err(Error::InvalidInput("identity atom out of range".into()));
    }
    if conv.len() != n {
        return Err(Error::InvalidInput("converse table has wrong length".into()));
    }
    for (x, &cx) in conv.iter().enumerate() {
        if cx as usize >= n || conv[cx as usize] != x as AtomId {
            return Err(Error::InvalidInput(format!("converse is not an involution at atom {x}")));
        }
    }
    if conv[id as usize] != id {
        return Err(Error::InvalidInput("converse must fix the identity atom".into()));
    }

    let input: HashSet<(AtomId, AtomId, AtomId)> = forbidden.iter().copied().collect();
    let mut closed: HashSet<(AtomId, AtomId, AtomId)> = HashSet::new();
    let mut report = ClosureReport::default();
    let mut stack: Vec<(AtomId, AtomId, AtomId)> = input.iter().copied().collect();
    stack.sort_unstable();
    while let Some(t) = stack.pop() {
        for tr in peircean_transforms(&conv, t) {
            if closed.insert(tr) {
                if !input.contains(&tr) {
                    report.added.push(tr);
                }
                stack.push(tr);
            }
        }
    }
    report.added.sort_unstable();

    // The identity law decides every triple containing the identity atom.
    let forced_consistent = |a: AtomId, b: AtomId, c: AtomId| -> bool {
        (a == id && b == c) || (b == id && a == c) || (c == id && b == conv[a as usize])
    };
    for &(a, b, c) in &closed {
        if forced_consistent(a, b, c) {
            return Err(Error::InvalidInput(format!(
                "forbidden triple ({a},{b},{c}) contradicts the identity law"
            )));
        }
    }

    let mut triples = HashSet::new();
    for a in 0..n as AtomId {
        for b in 0..n as AtomId {
            for c in 0..n as AtomId {
                let has_id = a == id || b == id || c == id;
                let ok = if has_id {
                    forced_consistent(a, b, c)
                } else {
                    !closed.contains(&(a, b, c))
                };
                if ok {
                    triples.insert((a, b, c));
                }
            }
        }
    }
    let mut identity = bao_core::BitSet::empty(n);
    identity.insert(id as usize);
    let tables = RaTables::new(n, conv, identity, triples)?;
    let at = FiniteAtomStructure::new_ra(names, tables)?;
    Ok((at, report))
}
