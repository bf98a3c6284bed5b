use std::collections::{BTreeMap, HashMap, HashSet};

use crate::bitset::BitSet;
use crate::error::Error;
use crate::signature::Signature;
use crate::Result;

/// Index of an atom inside a [`FiniteAtomStructure`].
pub type AtomId = u32;

/// Relation tables for the relation-algebra signature.
///
/// Composition is kept as a set of *consistent triples* `(a, b, c)` read as
/// `c <= a ; b`.  Converse is a total involution on atoms and the identity
/// element is a set of atoms (usually a single one).
#[derive(Debug, Clone)]
pub struct RaTables {
    pub conv: Vec<AtomId>,
    pub identity: BitSet,
    triples: HashSet<(AtomId, AtomId, AtomId)>,
    comp: HashMap<(AtomId, AtomId), Vec<AtomId>>,
}

impl RaTables {
    pub fn new(
        n_atoms: usize,
        conv: Vec<AtomId>,
        identity: BitSet,
        triples: HashSet<(AtomId, AtomId, AtomId)>,
    ) -> Result<Self> {
        if conv.len() != n_atoms {
            return Err(Error::InvalidInput("converse table length mismatch".into()));
        }
        for (a, &ac) in conv.iter().enumerate() {
            if ac as usize >= n_atoms || conv[ac as usize] as usize != a {
                return Err(Error::InvalidInput(format!(
                    "converse is not an involution at atom {a}"
                )));
            }
        }
        // Identity laws are structural, not optional: x ; 1' = x and the
        // cycle of a triple through the identity pins the converse.
        for a in 0..n_atoms as AtomId {
            for b in 0..n_atoms as AtomId {
                for c in 0..n_atoms as AtomId {
                    let t = (a, b, c);
                    if identity.contains(a as usize) {
                        let want = b == c;
                        if triples.contains(&t) != want {
                            return Err(Error::InvalidInput(format!(
                                "identity law broken at triple {t:?}"
                            )));
                        }
                    } else if identity.contains(b as usize) {
                        let want = a == c;
                        if triples.contains(&t) != want {
                            return Err(Error::InvalidInput(format!(
                                "identity law broken at triple {t:?}"
                            )));
                        }
                    } else if identity.contains(c as usize) && triples.contains(&t) != (b == conv[a as usize]) {
                        return Err(Error::InvalidInput(format!(
                            "identity law broken at triple {t:?}"
                        )));
                    }
                }
            }
        }
        let mut comp: HashMap<(AtomId, AtomId), Vec<AtomId>> = HashMap::new();
        for &(a, b, c) in &triples {
            comp.entry((a, b)).or_default().push(c);
        }
        for v in comp.values_mut() {
            v.sort_unstable();
        }
        Ok(RaTables { conv, identity, triples, comp })
    }

    /// `c <= a ; b`?
    pub fn consistent(&self, a: AtomId, b: AtomId, c: AtomId) -> bool {
        self.triples.contains(&(a, b, c))
    }

    /// Atoms below `a ; b`, sorted.
    pub fn comp_atoms(&self, a: AtomId, b: AtomId) -> &[AtomId] {
        self.comp.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn triples(&self) -> impl Iterator<Item = (AtomId, AtomId, AtomId)> + '_ {
        self.triples.iter().copied()
    }
}

/// A finite atom structure: named atoms plus accessibility relations for the
/// operators of its signature.
///
/// Relation conventions, fixed once for the whole workspace:
/// - cylindrifier `c_i`: binary `T_i`, stored as `cyl_up[i][b] = c_i {b}`,
///   i.e. the sorted list of atoms `a` with `a <= c_i b`;
/// - diagonal `d_ij`: unary `E_ij`, the set of atoms below `d_ij`
///   (`E_ii` is total and kept implicit);
/// - transposition `s_[i,j]`: a total involution on atoms;
/// - replacement `s_i^j`: `repl_up[(i,j)][b] = s_i^j {b}` (given explicitly
///   for the diagonal-free kinds, term-derived `c_i(x . d_ij)` otherwise);
/// - relation-algebra composition: consistent triples `(a, b, c)` meaning
///   `c <= a ; b`.
#[derive(Debug, Clone)]
pub struct FiniteAtomStructure {
    sig: Signature,
    names: Vec<String>,
    by_name: BTreeMap<String, AtomId>,
    cyl_up: Vec<Vec<Vec<AtomId>>>,
    cyl_down: Vec<Vec<Vec<AtomId>>>,
    diag: HashMap<(usize, usize), BitSet>,
    transp: HashMap<(usize, usize), Vec<AtomId>>,
    repl: HashMap<(usize, usize), Vec<Vec<AtomId>>>,
    ra: Option<RaTables>,
}

impl FiniteAtomStructure {
    /// Build a structure of a cylindric-like kind (anything except `Ra`).
    ///
    /// `cyl_up[i][b]` lists the atoms below `c_i {b}`; `diag` maps `(i, j)`
    /// with `i < j` to the atoms below `d_ij`; `transp` maps `(i, j)` with
    /// `i < j` to the image table of `s_[i,j]`; `repl` maps ordered pairs
    /// `(i, j)`, `i != j`, to the table of `s_i^j`.
    pub fn new_cylindric(
        sig: Signature,
        names: Vec<String>,
        cyl_up: Vec<Vec<Vec<AtomId>>>,
        diag: HashMap<(usize, usize), BitSet>,
        transp: HashMap<(usize, usize), Vec<AtomId>>,
        repl: HashMap<(usize, usize), Vec<Vec<AtomId>>>,
    ) -> Result<Self> {
        if sig.kind.is_ra() {
            return Err(Error::InvalidInput("use new_ra for the RA kind".into()));
        }
        let n = names.len();
        let dim = sig.dim;
        if cyl_up.len() != dim {
            return Err(Error::InvalidInput(format!(
                "expected {dim} cylindrifier tables, got {}",
                cyl_up.len()
            )));
        }
        for (i, t) in cyl_up.iter().enumerate() {
            if t.len() != n {
                return Err(Error::InvalidInput(format!("cylindrifier {i} table has wrong size")));
            }
            for row in t {
                if row.iter().any(|a| *a as usize >= n) {
                    return Err(Error::InvalidInput(format!("cylindrifier {i} references bad atom")));
                }
            }
        }
        if sig.kind.has_diagonals() {
            for i in 0..dim {
                for j in i + 1..dim {
                    if !diag.contains_key(&(i, j)) {
                        return Err(Error::InvalidInput(format!("missing diagonal E_{i}{j}")));
                    }
                }
            }
        } else if !diag.is_empty() {
            return Err(Error::InvalidInput("diagonals given for a diagonal-free kind".into()));
        }
        if sig.kind.has_transpositions() {
            for i in 0..dim {
                for j in i + 1..dim {
                    let t = transp
                        .get(&(i, j))
                        .ok_or_else(|| Error::InvalidInput(format!("missing transposition Sw_{i}_{j}")))?;
                    if t.len() != n {
                        return Err(Error::InvalidInput(format!("Sw_{i}_{j} has wrong size")));
                    }
                    for (a, &img) in t.iter().enumerate() {
                        if img as usize >= n || t[img as usize] as usize != a {
                            return Err(Error::InvalidInput(format!(
                                "Sw_{i}_{j} is not an involution at atom {a}"
                            )));
                        }
                    }
                }
            }
        } else if !transp.is_empty() {
            return Err(Error::InvalidInput("transpositions given for a kind without them".into()));
        }
        let needs_repl_tables = sig.kind.has_replacements() && !sig.kind.has_diagonals();
        if needs_repl_tables {
            for i in 0..dim {
                for j in 0..dim {
                    if i != j && !repl.contains_key(&(i, j)) {
                        return Err(Error::InvalidInput(format!("missing replacement S_{i}_{j}")));
                    }
                }
            }
        }
        let mut by_name = BTreeMap::new();
        for (i, name) in names.iter().enumerate() {
            if by_name.insert(name.clone(), i as AtomId).is_some() {
                return Err(Error::InvalidInput(format!("duplicate atom name {name:?}")));
            }
        }
        let cyl_down = transpose_tables(&cyl_up, n);
        let mut s = FiniteAtomStructure {
            sig,
            names,
            by_name,
            cyl_up,
            cyl_down,
            diag,
            transp,
            repl,
            ra: None,
        };
        s.sort_tables();
        Ok(s)
    }

    /// Build a relation-algebra atom structure.
    pub fn new_ra(names: Vec<String>, tables: RaTables) -> Result<Self> {
        let mut by_name = BTreeMap::new();
        for (i, name) in names.iter().enumerate() {
            if by_name.insert(name.clone(), i as AtomId).is_some() {
                return Err(Error::InvalidInput(format!("duplicate atom name {name:?}")));
            }
        }
        if tables.conv.len() != names.len() {
            return Err(Error::InvalidInput("RA table size mismatch".into()));
        }
        Ok(FiniteAtomStructure {
            sig: Signature::ra(),
            names,
            by_name,
            cyl_up: Vec::new(),
            cyl_down: Vec::new(),
            diag: HashMap::new(),
            transp: HashMap::new(),
            repl: HashMap::new(),
            ra: Some(tables),
        })
    }

    fn sort_tables(&mut self) {
        for t in self.cyl_up.iter_mut().chain(self.cyl_down.iter_mut()) {
            for row in t.iter_mut() {
                row.sort_unstable();
                row.dedup();
            }
        }
        for t in self.repl.values_mut() {
            for row in t.iter_mut() {
                row.sort_unstable();
                row.dedup();
            }
        }
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn dim(&self) -> usize {
        self.sig.dim
    }

    pub fn atom_count(&self) -> usize {
        self.names.len()
    }

    pub fn atom_name(&self, a: AtomId) -> &str {
        &self.names[a as usize]
    }

    pub fn atom_names(&self) -> &[String] {
        &self.names
    }

    pub fn atom_by_name(&self, name: &str) -> Option<AtomId> {
        self.by_name.get(name).copied()
    }

    pub fn atoms(&self) -> impl Iterator<Item = AtomId> {
        0..self.names.len() as AtomId
    }

    /// `c_i {b}` as a sorted slice.
    pub fn cyl_up(&self, i: usize, b: AtomId) -> &[AtomId] {
        &self.cyl_up[i][b as usize]
    }

    /// `{ a : b <= c_i a }` as a sorted slice.
    pub fn cyl_down(&self, i: usize, b: AtomId) -> &[AtomId] {
        &self.cyl_down[i][b as usize]
    }

    /// `a <= c_i b`?
    pub fn cyl_related(&self, i: usize, a: AtomId, b: AtomId) -> bool {
        self.cyl_up[i][b as usize].binary_search(&a).is_ok()
    }

    /// `a <= d_ij`?
    pub fn in_diag(&self, i: usize, j: usize, a: AtomId) -> bool {
        if i == j {
            return true;
        }
        let key = (i.min(j), i.max(j));
        self.diag.get(&key).map(|s| s.contains(a as usize)).unwrap_or(false)
    }

    pub fn diag_atoms(&self, i: usize, j: usize) -> Option<&BitSet> {
        let key = (i.min(j), i.max(j));
        self.diag.get(&key)
    }

    /// Image of `a` under the transposition `s_[i,j]`.
    pub fn transpose(&self, i: usize, j: usize, a: AtomId) -> AtomId {
        if i == j {
            return a;
        }
        let key = (i.min(j), i.max(j));
        self.transp[&key][a as usize]
    }

    /// `s_i^j {b}`: explicit table when present, otherwise the term
    /// `c_i (x . d_ij)` over the diagonal tables.
    pub fn repl_up(&self, i: usize, j: usize, b: AtomId) -> Vec<AtomId> {
        if i == j {
            return vec![b];
        }
        if let Some(t) = self.repl.get(&(i, j)) {
            return t[b as usize].clone();
        }
        if self.in_diag(i, j, b) {
            self.cyl_up(i, b).to_vec()
        } else {
            Vec::new()
        }
    }

    pub fn ra_tables(&self) -> Option<&RaTables> {
        self.ra.as_ref()
    }

    pub fn ra_tables_required(&self) -> Result<&RaTables> {
        self.ra
            .as_ref()
            .ok_or_else(|| Error::Unsupported("structure has no relation-algebra tables".into()))
    }
}

fn transpose_tables(up: &[Vec<Vec<AtomId>>], n: usize) -> Vec<Vec<Vec<AtomId>>> {
    up.iter()
        .map(|t| {
            let mut down = vec![Vec::new(); n];
            for (b, row) in t.iter().enumerate() {
                for &a in row {
                    down[a as usize].push(b as AtomId);
                }
            }
            down
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Kind;

    #[test]
    fn cyl_down_is_transpose() {
        // Two atoms, c_0{0} = {0,1}, c_0{1} = {1}.
        let s = FiniteAtomStructure::new_cylindric(
            Signature::new(Kind::Df, 1),
            vec!["a".into(), "b".into()],
            vec![vec![vec![0, 1], vec![1]]],
            HashMap::new(),
            HashMap::new(),
            HashMap::new(),
        )
        .unwrap();
        assert_eq!(s.cyl_up(0, 0), &[0, 1]);
        assert_eq!(s.cyl_down(0, 0), &[0]);
        assert_eq!(s.cyl_down(0, 1), &[0, 1]);
        assert!(s.cyl_related(0, 1, 0));
        assert!(!s.cyl_related(0, 0, 1));
    }

    #[test]
    fn ra_identity_law_enforced() {
        // Id;Id must contain exactly Id.
        let bad = RaTables::new(
            2,
            vec![0, 1],
            BitSet::singleton(2, 0),
            [(0, 0, 1)].into_iter().collect(),
        );
        assert!(bad.is_err());
    }
}
