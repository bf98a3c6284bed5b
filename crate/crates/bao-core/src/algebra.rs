use std::collections::BTreeSet;

use crate::bitset::BitSet;
use crate::error::Error;
use crate::signature::{Kind, Signature};
use crate::structure::{AtomId, FiniteAtomStructure};
use crate::Result;

/// Operations shared by every finite algebra representation in this crate.
/// Elements are atom sets of the underlying atom structure.
pub trait AlgebraView {
    fn signature(&self) -> Signature;
    fn atom_len(&self) -> usize;

    fn bot(&self) -> BitSet {
        BitSet::empty(self.atom_len())
    }
    fn top(&self) -> BitSet;
    fn join(&self, x: &BitSet, y: &BitSet) -> BitSet {
        x.union(y)
    }
    fn meet(&self, x: &BitSet, y: &BitSet) -> BitSet {
        x.intersect(y)
    }
    fn compl(&self, x: &BitSet) -> BitSet;

    fn cyl(&self, i: usize, x: &BitSet) -> BitSet;
    fn diag(&self, i: usize, j: usize) -> BitSet;
    fn repl(&self, i: usize, j: usize, x: &BitSet) -> BitSet;
    fn transp(&self, i: usize, j: usize, x: &BitSet) -> BitSet;

    /// Carrier size if the carrier is a full powerset, `None` for explicit
    /// carriers.
    fn carrier_size(&self) -> Option<u128>;

    /// Enumerate the whole carrier if that is feasible within `cap`
    /// elements.
    fn enumerate_carrier(&self, cap: usize) -> Option<Vec<BitSet>>;

    /// Atoms of the Boolean reduct as elements.
    fn atoms_as_elements(&self) -> Vec<BitSet>;
}

/// The complex algebra over a finite atom structure: carrier is the full
/// powerset of the atoms, operators lifted through the accessibility
/// relations.
#[derive(Clone)]
pub struct CmAlgebra<'a> {
    at: &'a FiniteAtomStructure,
}

impl<'a> CmAlgebra<'a> {
    pub fn new(at: &'a FiniteAtomStructure) -> Self {
        CmAlgebra { at }
    }

    pub fn atom_structure(&self) -> &'a FiniteAtomStructure {
        self.at
    }

    pub fn singleton(&self, a: AtomId) -> BitSet {
        BitSet::singleton(self.at.atom_count(), a as usize)
    }

    /// Relation-algebra composition `x ; y`.
    pub fn comp(&self, x: &BitSet, y: &BitSet) -> Result<BitSet> {
        let t = self.at.ra_tables_required()?;
        let mut out = BitSet::empty(self.at.atom_count());
        for a in x.iter() {
            for b in y.iter() {
                for &c in t.comp_atoms(a as AtomId, b as AtomId) {
                    out.insert(c as usize);
                }
            }
        }
        Ok(out)
    }

    /// Relation-algebra converse.
    pub fn conv(&self, x: &BitSet) -> Result<BitSet> {
        let t = self.at.ra_tables_required()?;
        let mut out = BitSet::empty(self.at.atom_count());
        for a in x.iter() {
            out.insert(t.conv[a] as usize);
        }
        Ok(out)
    }

    /// Relation-algebra identity element.
    pub fn ident(&self) -> Result<BitSet> {
        Ok(self.at.ra_tables_required()?.identity.clone())
    }
}

impl AlgebraView for CmAlgebra<'_> {
    fn signature(&self) -> Signature {
        self.at.signature()
    }

    fn atom_len(&self) -> usize {
        self.at.atom_count()
    }

    fn top(&self) -> BitSet {
        BitSet::full(self.at.atom_count())
    }

    fn compl(&self, x: &BitSet) -> BitSet {
        x.complement()
    }

    fn cyl(&self, i: usize, x: &BitSet) -> BitSet {
        let mut out = BitSet::empty(self.at.atom_count());
        for b in x.iter() {
            for &a in self.at.cyl_up(i, b as AtomId) {
                out.insert(a as usize);
            }
        }
        out
    }

    fn diag(&self, i: usize, j: usize) -> BitSet {
        if i == j {
            return self.top();
        }
        self.at
            .diag_atoms(i, j)
            .cloned()
            .unwrap_or_else(|| BitSet::empty(self.at.atom_count()))
    }

    fn repl(&self, i: usize, j: usize, x: &BitSet) -> BitSet {
        let mut out = BitSet::empty(self.at.atom_count());
        for b in x.iter() {
            for a in self.at.repl_up(i, j, b as AtomId) {
                out.insert(a as usize);
            }
        }
        out
    }

    fn transp(&self, i: usize, j: usize, x: &BitSet) -> BitSet {
        let mut out = BitSet::empty(self.at.atom_count());
        for a in x.iter() {
            out.insert(self.at.transpose(i, j, a as AtomId) as usize);
        }
        out
    }

    fn carrier_size(&self) -> Option<u128> {
        let n = self.at.atom_count() as u32;
        if n <= 127 {
            Some(1u128 << n)
        } else {
            None
        }
    }

    fn enumerate_carrier(&self, cap: usize) -> Option<Vec<BitSet>> {
        let n = self.at.atom_count();
        if n > 63 || (1usize << n) > cap {
            return None;
        }
        Some((0..(1u64 << n)).map(|m| BitSet::from_mask(n, m)).collect())
    }

    fn atoms_as_elements(&self) -> Vec<BitSet> {
        (0..self.at.atom_count()).map(|a| BitSet::singleton(self.at.atom_count(), a)).collect()
    }
}

/// An algebra with an explicit carrier inside a complex algebra, e.g. a neat
/// reduct.  Operations are computed in the parent; closure of the carrier
/// under them is checked at construction.
pub struct SubAlgebra<'a> {
    parent: CmAlgebra<'a>,
    sig: Signature,
    carrier: Vec<BitSet>,
}

impl<'a> SubAlgebra<'a> {
    pub fn carrier(&self) -> &[BitSet] {
        &self.carrier
    }

    pub fn contains(&self, x: &BitSet) -> bool {
        self.carrier.binary_search(x).is_ok()
    }

    pub fn parent(&self) -> &CmAlgebra<'a> {
        &self.parent
    }
}

impl AlgebraView for SubAlgebra<'_> {
    fn signature(&self) -> Signature {
        self.sig
    }

    fn atom_len(&self) -> usize {
        self.parent.atom_len()
    }

    fn top(&self) -> BitSet {
        self.parent.top()
    }

    fn compl(&self, x: &BitSet) -> BitSet {
        self.parent.compl(x)
    }

    fn cyl(&self, i: usize, x: &BitSet) -> BitSet {
        debug_assert!(i < self.sig.dim);
        self.parent.cyl(i, x)
    }

    fn diag(&self, i: usize, j: usize) -> BitSet {
        debug_assert!(i < self.sig.dim && j < self.sig.dim);
        self.parent.diag(i, j)
    }

    fn repl(&self, i: usize, j: usize, x: &BitSet) -> BitSet {
        self.parent.repl(i, j, x)
    }

    fn transp(&self, i: usize, j: usize, x: &BitSet) -> BitSet {
        self.parent.transp(i, j, x)
    }

    fn carrier_size(&self) -> Option<u128> {
        Some(self.carrier.len() as u128)
    }

    fn enumerate_carrier(&self, cap: usize) -> Option<Vec<BitSet>> {
        if self.carrier.len() <= cap {
            Some(self.carrier.clone())
        } else {
            None
        }
    }

    fn atoms_as_elements(&self) -> Vec<BitSet> {
        // Atoms of the subalgebra: minimal nonzero carrier members.
        let mut atoms: Vec<BitSet> = Vec::new();
        for x in &self.carrier {
            if x.is_empty() {
                continue;
            }
            let strictly_below = self
                .carrier
                .iter()
                .any(|y| !y.is_empty() && y != x && y.is_subset(x));
            if !strictly_below {
                atoms.push(x.clone());
            }
        }
        atoms
    }
}

/// Dimension set of an element: the indices whose cylindrifier moves it.
pub fn dimension_set(alg: &dyn AlgebraView, x: &BitSet) -> BTreeSet<usize> {
    (0..alg.signature().dim).filter(|&i| alg.cyl(i, x) != *x).collect()
}

/// The neat `n`-dimensional reduct of a finite complex algebra: elements
/// whose dimension set lies inside `n`, with the operators indexed below `n`.
///
/// Requires an enumerable carrier; structures with more than `max_atoms`
/// atoms are rejected rather than sampled because a neat reduct computed on
/// a sample would not be an algebra.
pub fn neat_reduct<'a>(parent: &CmAlgebra<'a>, n: usize, max_atoms: usize) -> Result<SubAlgebra<'a>> {
    let sig = parent.signature();
    if sig.kind.is_ra() {
        return Err(Error::Unsupported("neat reducts are not defined for the RA kind".into()));
    }
    if n > sig.dim {
        return Err(Error::InvalidInput(format!(
            "neat reduct dimension {n} exceeds algebra dimension {}",
            sig.dim
        )));
    }
    let atoms = parent.atom_len();
    if atoms > max_atoms {
        return Err(Error::Unsupported(format!(
            "neat reduct needs full carrier enumeration; {atoms} atoms exceeds the cap {max_atoms}"
        )));
    }
    let all = parent
        .enumerate_carrier(usize::MAX)
        .ok_or_else(|| Error::Unsupported("carrier too large to enumerate".into()))?;
    let mut carrier: Vec<BitSet> = all
        .into_iter()
        .filter(|x| (n..sig.dim).all(|i| parent.cyl(i, x) == *x))
        .collect();
    carrier.sort();
    let sub = SubAlgebra {
        parent: parent.clone(),
        sig: Signature::new(sig.kind, n),
        carrier,
    };
    // The neat reduct must be closed under its own operations.
    let check_closed = |x: &BitSet| -> Result<()> {
        if !sub.contains(x) {
            return Err(Error::Internal("neat reduct carrier not closed".into()));
        }
        Ok(())
    };
    for x in &sub.carrier {
        check_closed(&sub.compl(x))?;
        for i in 0..n {
            check_closed(&sub.cyl(i, x))?;
            if sig.kind.has_diagonals() {
                for j in 0..n {
                    check_closed(&sub.diag(i, j))?;
                }
            }
        }
    }
    Ok(sub)
}

/// Reconstruct an atom structure from a complex algebra by probing atom
/// singletons.  Together with table equality this witnesses that taking
/// atoms undoes taking the complex algebra.
pub fn reconstruct_atom_structure(cm: &CmAlgebra<'_>) -> Result<FiniteAtomStructure> {
    let at = cm.atom_structure();
    let sig = at.signature();
    let n = at.atom_count();
    if sig.kind.is_ra() {
        let t = at.ra_tables_required()?;
        let mut triples = std::collections::HashSet::new();
        for a in 0..n as AtomId {
            for b in 0..n as AtomId {
                let comp = cm.comp(&cm.singleton(a), &cm.singleton(b))?;
                for c in comp.iter() {
                    triples.insert((a, b, c as AtomId));
                }
            }
        }
        let conv: Vec<AtomId> = (0..n as AtomId)
            .map(|a| cm.conv(&cm.singleton(a)).map(|s| s.iter().next().unwrap() as AtomId))
            .collect::<Result<_>>()?;
        let tables = crate::structure::RaTables::new(n, conv, t.identity.clone(), triples)?;
        return FiniteAtomStructure::new_ra(at.atom_names().to_vec(), tables);
    }
    let mut cyl_up = Vec::new();
    for i in 0..sig.dim {
        let mut table = Vec::with_capacity(n);
        for b in 0..n as AtomId {
            let up = cm.cyl(i, &cm.singleton(b));
            table.push(up.iter().map(|a| a as AtomId).collect::<Vec<_>>());
        }
        cyl_up.push(table);
    }
    let mut diag = std::collections::HashMap::new();
    if sig.kind.has_diagonals() {
        for i in 0..sig.dim {
            for j in i + 1..sig.dim {
                diag.insert((i, j), cm.diag(i, j));
            }
        }
    }
    let mut transp = std::collections::HashMap::new();
    if sig.kind.has_transpositions() {
        for i in 0..sig.dim {
            for j in i + 1..sig.dim {
                let table: Vec<AtomId> = (0..n as AtomId)
                    .map(|a| {
                        let img = cm.transp(i, j, &cm.singleton(a));
                        let first = img.iter().next().unwrap() as AtomId;
                        first
                    })
                    .collect();
                transp.insert((i, j), table);
            }
        }
    }
    let mut repl = std::collections::HashMap::new();
    if sig.kind.has_replacements() && !sig.kind.has_diagonals() {
        for i in 0..sig.dim {
            for j in 0..sig.dim {
                if i == j {
                    continue;
                }
                let table: Vec<Vec<AtomId>> = (0..n as AtomId)
                    .map(|b| {
                        cm.repl(i, j, &cm.singleton(b)).iter().map(|a| a as AtomId).collect()
                    })
                    .collect();
                repl.insert((i, j), table);
            }
        }
    }
    FiniteAtomStructure::new_cylindric(sig, at.atom_names().to_vec(), cyl_up, diag, transp, repl)
}

/// Structural equality of two finite atom structures over the same atom
/// naming (used by the reconstruction round-trip check).
pub fn same_tables(a: &FiniteAtomStructure, b: &FiniteAtomStructure) -> bool {
    if a.signature() != b.signature() || a.atom_names() != b.atom_names() {
        return false;
    }
    let n = a.atom_count() as AtomId;
    let sig = a.signature();
    if sig.kind.is_ra() {
        let (ta, tb) = (a.ra_tables().unwrap(), b.ra_tables().unwrap());
        if ta.conv != tb.conv || ta.identity != tb.identity {
            return false;
        }
        let sa: BTreeSet<_> = ta.triples().collect();
        let sb: BTreeSet<_> = tb.triples().collect();
        return sa == sb;
    }
    for i in 0..sig.dim {
        for x in 0..n {
            if a.cyl_up(i, x) != b.cyl_up(i, x) {
                return false;
            }
        }
        for j in 0..sig.dim {
            for x in 0..n {
                if a.in_diag(i, j, x) != b.in_diag(i, j, x) {
                    return false;
                }
                if sig.kind.has_transpositions() && a.transpose(i, j, x) != b.transpose(i, j, x) {
                    return false;
                }
                if sig.kind.has_replacements() && a.repl_up(i, j, x) != b.repl_up(i, j, x) {
                    return false;
                }
            }
        }
    }
    true
}

/// Forget operators: restrict a structure to a smaller kind of the same
/// dimension.  Replacement tables are materialised from the diagonal term
/// when the target needs them and the source defined them implicitly.
pub fn reduct(at: &FiniteAtomStructure, target: Kind) -> Result<FiniteAtomStructure> {
    let sig = at.signature();
    if !sig.kind.covers(target) {
        return Err(Error::InvalidInput(format!(
            "{} does not cover {}",
            sig.kind.as_str(),
            target.as_str()
        )));
    }
    if target.is_ra() {
        return Err(Error::InvalidInput("cannot take an RA reduct of a cylindric kind".into()));
    }
    let n = at.atom_count();
    let dim = sig.dim;
    let cyl_up: Vec<Vec<Vec<AtomId>>> = (0..dim)
        .map(|i| (0..n as AtomId).map(|b| at.cyl_up(i, b).to_vec()).collect())
        .collect();
    let mut diag = std::collections::HashMap::new();
    if target.has_diagonals() {
        for i in 0..dim {
            for j in i + 1..dim {
                diag.insert((i, j), at.diag_atoms(i, j).cloned().unwrap());
            }
        }
    }
    let mut transp = std::collections::HashMap::new();
    if target.has_transpositions() {
        for i in 0..dim {
            for j in i + 1..dim {
                let table: Vec<AtomId> = (0..n as AtomId).map(|a| at.transpose(i, j, a)).collect();
                transp.insert((i, j), table);
            }
        }
    }
    let mut repl = std::collections::HashMap::new();
    if target.has_replacements() && !target.has_diagonals() {
        for i in 0..dim {
            for j in 0..dim {
                if i == j {
                    continue;
                }
                let table: Vec<Vec<AtomId>> =
                    (0..n as AtomId).map(|b| at.repl_up(i, j, b)).collect();
                repl.insert((i, j), table);
            }
        }
    }
    FiniteAtomStructure::new_cylindric(Signature::new(target, dim), at.atom_names().to_vec(), cyl_up, diag, transp, repl)
}
