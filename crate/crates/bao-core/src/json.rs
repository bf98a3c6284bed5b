//! JSON import/export for finite atom structures.
//!
//! Format:
//! ```text
//! {
//!   "signature": {"kind": "CA", "dim": 3},
//!   "atoms": ["a", "b", ...],
//!   "relations": {
//!     "T_0": [[a, b], ...],      cylindrifier 0: a is in c_0 {b}
//!     "E_01": [a, ...],          diagonal d_01 as an atom list
//!     "S_0_1": [[a, b], ...],    replacement: a is in s_0^1 {b}
//!     "Sw_0_1": [[a, b], ...],   transposition: a = s_[0,1] b
//!     "Comp": [[x, y, z], ...],  RA composition: x is below y;z
//!     "Conv": [[x, y], ...],     RA converse: x = conv(y)
//!     "Id": [x, ...]             RA identity atoms
//!   }
//! }
//! ```
//! Rows put the result atom first, matching the internal convention that a
//! rank-r operator is stored as an (r+1)-ary relation with the result in
//! slot 0.  Atoms are referred to by index into the "atoms" array.
//! Subscripts are single digits, so only dimensions up to 9 are
//! serialisable.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::signature::{Kind, Signature};
use crate::structure::{AtomId, FiniteAtomStructure, RaTables};
use crate::BitSet;
use crate::Result;

#[derive(Serialize, Deserialize)]
struct SigRepr {
    kind: String,
    dim: usize,
}

pub fn to_json(at: &FiniteAtomStructure) -> Result<Value> {
    let sig = at.signature();
    if sig.dim > 9 {
        return Err(Error::Unsupported(format!(
            "JSON relation names use single-digit subscripts; dimension {} exceeds 9",
            sig.dim
        )));
    }
    let n = at.atom_count();
    let mut relations = serde_json::Map::new();
    if sig.kind.is_ra() {
        let t = at.ra_tables_required()?;
        let mut comp: Vec<Value> = Vec::new();
        for (a, b, c) in t.triples() {
            comp.push(json!([c, a, b]));
        }
        comp.sort_by_key(|v| {
            let arr = v.as_array().unwrap();
            (arr[0].as_u64(), arr[1].as_u64(), arr[2].as_u64())
        });
        relations.insert("Comp".into(), Value::Array(comp));
        let conv: Vec<Value> =
            t.conv.iter().enumerate().map(|(b, &a)| json!([a, b])).collect();
        relations.insert("Conv".into(), Value::Array(conv));
        let id: Vec<Value> = t.identity.iter().map(|a| json!(a)).collect();
        relations.insert("Id".into(), Value::Array(id));
    } else {
        for i in 0..sig.dim {
            let mut rows: Vec<Value> = Vec::new();
            for b in 0..n as AtomId {
                for &a in at.cyl_up(i, b) {
                    rows.push(json!([a, b]));
                }
            }
            relations.insert(format!("T_{i}"), Value::Array(rows));
        }
        if sig.kind.has_diagonals() {
            for i in 0..sig.dim {
                for j in i + 1..sig.dim {
                    let d = at.diag_atoms(i, j).unwrap();
                    let rows: Vec<Value> = d.iter().map(|a| json!(a)).collect();
                    relations.insert(format!("E_{i}{j}"), Value::Array(rows));
                }
            }
        }
        if sig.kind.has_transpositions() {
            for i in 0..sig.dim {
                for j in i + 1..sig.dim {
                    let rows: Vec<Value> = (0..n as AtomId)
                        .map(|b| json!([at.transpose(i, j, b), b]))
                        .collect();
                    relations.insert(format!("Sw_{i}_{j}"), Value::Array(rows));
                }
            }
        }
        if sig.kind.has_replacements() && !sig.kind.has_diagonals() {
            for i in 0..sig.dim {
                for j in 0..sig.dim {
                    if i == j {
                        continue;
                    }
                    let mut rows: Vec<Value> = Vec::new();
                    for b in 0..n as AtomId {
                        for a in at.repl_up(i, j, b) {
                            rows.push(json!([a, b]));
                        }
                    }
                    relations.insert(format!("S_{i}_{j}"), Value::Array(rows));
                }
            }
        }
    }
    Ok(json!({
        "signature": {"kind": sig.kind.as_str(), "dim": sig.dim},
        "atoms": at.atom_names(),
        "relations": Value::Object(relations),
    }))
}

fn get_pairs(v: &Value, name: &str, n: usize) -> Result<Vec<(usize, usize)>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::InvalidInput(format!("relation {name} must be an array")))?;
    let mut out = Vec::with_capacity(arr.len());
    for row in arr {
        let row = row
            .as_array()
            .filter(|r| r.len() == 2)
            .ok_or_else(|| Error::InvalidInput(format!("{name} rows must be [a, b] pairs")))?;
        let a = row[0].as_u64().ok_or_else(|| Error::InvalidInput(format!("bad atom in {name}")))?;
        let b = row[1].as_u64().ok_or_else(|| Error::InvalidInput(format!("bad atom in {name}")))?;
        if a as usize >= n || b as usize >= n {
            return Err(Error::InvalidInput(format!("{name} refers to atom out of range")));
        }
        out.push((a as usize, b as usize));
    }
    Ok(out)
}

fn get_unary(v: &Value, name: &str, n: usize) -> Result<Vec<usize>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::InvalidInput(format!("relation {name} must be an array")))?;
    let mut out = Vec::with_capacity(arr.len());
    for row in arr {
        let a = row.as_u64().ok_or_else(|| Error::InvalidInput(format!("bad atom in {name}")))?;
        if a as usize >= n {
            return Err(Error::InvalidInput(format!("{name} refers to atom out of range")));
        }
        out.push(a as usize);
    }
    Ok(out)
}

pub fn from_json(v: &Value) -> Result<FiniteAtomStructure> {
    let sig_v = v
        .get("signature")
        .ok_or_else(|| Error::InvalidInput("missing signature".into()))?;
    let sig_repr: SigRepr = serde_json::from_value(sig_v.clone())?;
    let kind = Kind::parse(&sig_repr.kind)
        .ok_or_else(|| Error::InvalidInput(format!("unknown kind {:?}", sig_repr.kind)))?;
    if sig_repr.dim > 9 {
        return Err(Error::InvalidInput("dimensions above 9 are not supported".into()));
    }
    let sig = Signature::new(kind, sig_repr.dim);
    let atoms_v = v
        .get("atoms")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidInput("missing atoms array".into()))?;
    let names: Vec<String> = atoms_v
        .iter()
        .map(|a| {
            a.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::InvalidInput("atom names must be strings".into()))
        })
        .collect::<Result<_>>()?;
    let n = names.len();
    let rels = v
        .get("relations")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::InvalidInput("missing relations object".into()))?;

    if kind.is_ra() {
        let comp_v = rels
            .get("Comp")
            .ok_or_else(|| Error::InvalidInput("RA structure needs Comp".into()))?;
        let comp_arr = comp_v
            .as_array()
            .ok_or_else(|| Error::InvalidInput("Comp must be an array".into()))?;
        let mut triples = HashSet::new();
        for row in comp_arr {
            let row = row
                .as_array()
                .filter(|r| r.len() == 3)
                .ok_or_else(|| Error::InvalidInput("Comp rows must be [x, y, z]".into()))?;
            let mut t = [0u64; 3];
            for (slot, cell) in t.iter_mut().zip(row) {
                *slot = cell
                    .as_u64()
                    .filter(|&x| (x as usize) < n)
                    .ok_or_else(|| Error::InvalidInput("bad atom in Comp".into()))?;
            }
            // Row [x, y, z] says x <= y;z; internally the composed pair
            // comes first.
            triples.insert((t[1] as AtomId, t[2] as AtomId, t[0] as AtomId));
        }
        let conv_rows = get_pairs(
            rels.get("Conv").ok_or_else(|| Error::InvalidInput("RA structure needs Conv".into()))?,
            "Conv",
            n,
        )?;
        let mut conv = vec![u32::MAX; n];
        for (a, b) in conv_rows {
            conv[b] = a as AtomId;
        }
        if conv.iter().any(|&c| c == u32::MAX) {
            return Err(Error::InvalidInput("Conv must be total".into()));
        }
        let id_rows = get_unary(
            rels.get("Id").ok_or_else(|| Error::InvalidInput("RA structure needs Id".into()))?,
            "Id",
            n,
        )?;
        let mut identity = BitSet::empty(n);
        for a in id_rows {
            identity.insert(a);
        }
        let tables = RaTables::new(n, conv, identity, triples)?;
        return FiniteAtomStructure::new_ra(names, tables);
    }

    let mut cyl_up: Vec<Vec<Vec<AtomId>>> = Vec::with_capacity(sig.dim);
    for i in 0..sig.dim {
        let key = format!("T_{i}");
        let pairs = get_pairs(
            rels.get(&key).ok_or_else(|| Error::InvalidInput(format!("missing {key}")))?,
            &key,
            n,
        )?;
        let mut table = vec![Vec::new(); n];
        for (a, b) in pairs {
            table[b].push(a as AtomId);
        }
        cyl_up.push(table);
    }
    let mut diag = HashMap::new();
    if kind.has_diagonals() {
        for i in 0..sig.dim {
            for j in i + 1..sig.dim {
                let key = format!("E_{i}{j}");
                let rows = get_unary(
                    rels.get(&key).ok_or_else(|| Error::InvalidInput(format!("missing {key}")))?,
                    &key,
                    n,
                )?;
                let mut d = BitSet::empty(n);
                for a in rows {
                    d.insert(a);
                }
                diag.insert((i, j), d);
            }
        }
    }
    let mut transp = HashMap::new();
    if kind.has_transpositions() {
        for i in 0..sig.dim {
            for j in i + 1..sig.dim {
                let key = format!("Sw_{i}_{j}");
                let pairs = get_pairs(
                    rels.get(&key).ok_or_else(|| Error::InvalidInput(format!("missing {key}")))?,
                    &key,
                    n,
                )?;
                let mut table = vec![u32::MAX; n];
                for (a, b) in pairs {
                    table[b] = a as AtomId;
                }
                if table.iter().any(|&c| c == u32::MAX) {
                    return Err(Error::InvalidInput(format!("{key} must be total")));
                }
                transp.insert((i, j), table);
            }
        }
    }
    let mut repl = HashMap::new();
    if kind.has_replacements() && !kind.has_diagonals() {
        for i in 0..sig.dim {
            for j in 0..sig.dim {
                if i == j {
                    continue;
                }
                let key = format!("S_{i}_{j}");
                let pairs = get_pairs(
                    rels.get(&key).ok_or_else(|| Error::InvalidInput(format!("missing {key}")))?,
                    &key,
                    n,
                )?;
                let mut table = vec![Vec::new(); n];
                for (a, b) in pairs {
                    table[b].push(a as AtomId);
                }
                repl.insert((i, j), table);
            }
        }
    }
    FiniteAtomStructure::new_cylindric(sig, names, cyl_up, diag, transp, repl)
}

pub fn to_json_string(at: &FiniteAtomStructure) -> Result<String> {
    Ok(serde_json::to_string_pretty(&to_json(at)?)?)
}

pub fn from_json_str(s: &str) -> Result<FiniteAtomStructure> {
    let v: Value = serde_json::from_str(s)?;
    from_json(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartesian::cartesian_atom_structure;

    #[test]
    fn round_trip_cartesian() {
        let at = cartesian_atom_structure(2, 2).unwrap();
        let s = to_json_string(&at).unwrap();
        let back = from_json_str(&s).unwrap();
        assert!(crate::algebra::same_tables(&at, &back));
    }

    #[test]
    fn rejects_out_of_range_atoms() {
        let bad = r#"{"signature": {"kind": "Df", "dim": 1},
                      "atoms": ["a"],
                      "relations": {"T_0": [[0, 5]]}}"#;
        assert!(from_json_str(bad).is_err());
    }
}
