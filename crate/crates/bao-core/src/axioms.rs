use crate::algebra::{AlgebraView, CmAlgebra};
use crate::bitset::BitSet;
use crate::Result;

/// How an axiom check picks its test elements.
#[derive(Debug, Clone)]
pub struct CheckOptions {
    /// Carriers up to this size are enumerated in full.
    pub exhaustive_carrier_max: u128,
    /// Upper bound on the number of (x, y) pairs a binary-quantified law may
    /// visit before falling back to the generator set.
    pub pair_budget: u64,
    /// Same for triple-quantified laws.
    pub triple_budget: u64,
    /// Size cap for the generator-level test set (atoms plus joins of up to
    /// three atoms, taken in index order).
    pub max_test_elements: usize,
    /// Stop collecting witnesses after this many violations.
    pub max_violations: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            exhaustive_carrier_max: 1 << 20,
            pair_budget: 1 << 26,
            triple_budget: 1 << 24,
            max_test_elements: 4096,
            max_violations: 5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub law: String,
    pub witness: String,
}

#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub passed: bool,
    /// True when any law was checked on a proper subset of the carrier.
    pub sampled: bool,
    pub laws_checked: Vec<String>,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl AxiomReport {
    fn new() -> Self {
        AxiomReport {
            passed: true,
            sampled: false,
            laws_checked: Vec::new(),
            violations: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn violate(&mut self, opts: &CheckOptions, law: &str, witness: String) {
        self.passed = false;
        if self.violations.len() < opts.max_violations {
            self.violations.push(Violation { law: law.to_string(), witness });
        }
    }
}

/// Test sets for laws of each arity.  A checker only reports itself as
/// sampled if a set it actually used was a proper subset of the carrier.
struct TestSets {
    unary: Vec<BitSet>,
    binary: Vec<BitSet>,
    ternary: Vec<BitSet>,
    unary_sampled: bool,
    binary_sampled: bool,
    ternary_sampled: bool,
    binary_note: Option<String>,
    ternary_note: Option<String>,
    carrier_note: Option<String>,
}

fn generator_set(alg: &dyn AlgebraView, cap: usize) -> Vec<BitSet> {
    let atoms = alg.atoms_as_elements();
    let mut out: Vec<BitSet> = Vec::with_capacity(cap.min(4 * atoms.len() + 2));
    out.push(alg.bot());
    out.push(alg.top());
    out.extend(atoms.iter().cloned());
    let n = atoms.len();
    'pairs: for i in 0..n {
        for j in i + 1..n {
            if out.len() >= cap {
                break 'pairs;
            }
            out.push(atoms[i].union(&atoms[j]));
        }
    }
    'triples: for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if out.len() >= cap {
                    break 'triples;
                }
                out.push(atoms[i].union(&atoms[j]).union(&atoms[k]));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn pick_test_sets(alg: &dyn AlgebraView, opts: &CheckOptions) -> TestSets {
    let full = match alg.carrier_size() {
        Some(sz) if sz <= opts.exhaustive_carrier_max => {
            alg.enumerate_carrier(opts.exhaustive_carrier_max as usize)
        }
        _ => None,
    };
    match full {
        Some(all) => {
            let m = all.len() as u64;
            let mut binary_note = None;
            let binary = if m.saturating_mul(m) <= opts.pair_budget {
                all.clone()
            } else {
                binary_note = Some(format!(
                    "binary laws checked on the generator set ({m} carrier elements exceed the pair budget)"
                ));
                generator_set(alg, opts.max_test_elements)
            };
            let mut ternary_note = None;
            let ternary = if m.saturating_mul(m).saturating_mul(m) <= opts.triple_budget {
                all.clone()
            } else {
                let mut g = generator_set(alg, opts.max_test_elements);
                let gl = g.len() as u64;
                if gl * gl * gl > opts.triple_budget {
                    let keep = ((opts.triple_budget as f64).cbrt() as usize).max(2);
                    g.truncate(keep);
                }
                ternary_note =
                    Some(format!("ternary laws checked on {} generator elements", g.len()));
                g
            };
            TestSets {
                unary_sampled: false,
                binary_sampled: binary.len() != all.len(),
                ternary_sampled: ternary.len() != all.len(),
                unary: all,
                binary,
                ternary,
                binary_note,
                ternary_note,
                carrier_note: None,
            }
        }
        None => {
            let g = generator_set(alg, opts.max_test_elements);
            let carrier_note = Some(format!(
                "carrier too large to enumerate; laws checked on {} generator elements (atoms and joins of up to three atoms)",
                g.len()
            ));
            let mut ternary = g.clone();
            let gl = g.len() as u64;
            if gl * gl * gl > opts.triple_budget {
                let keep = ((opts.triple_budget as f64).cbrt() as usize).max(2);
                ternary.truncate(keep);
            }
            TestSets {
                unary: g.clone(),
                binary: g,
                ternary,
                unary_sampled: true,
                binary_sampled: true,
                ternary_sampled: true,
                binary_note: None,
                ternary_note: None,
                carrier_note,
            }
        }
    }
}

/// Check the cylindric-algebra axioms appropriate to the view's signature:
/// the cylindrifier laws on every kind with cylindrifiers, the diagonal laws
/// only on kinds that have diagonals.
///
/// Laws, with `i, j, k` ranging over the dimension:
///   (C1) c_i 0 = 0
///   (C2) x <= c_i x
///   (C3) c_i (x . c_i y) = c_i x . c_i y
///   (C4) c_i c_j x = c_j c_i x
///   (C5) d_ii = 1
///   (C6) d_ij = c_k (d_ik . d_kj)        for k distinct from i, j
///   (C7) c_i (d_ij . x) . c_i (d_ij . -x) = 0   for i distinct from j
pub fn check_ca_axioms(alg: &dyn AlgebraView, opts: &CheckOptions) -> AxiomReport {
    let sig = alg.signature();
    let dim = sig.dim;
    let sets = pick_test_sets(alg, opts);
    let mut report = AxiomReport::new();
    // CA laws quantify over at most two elements.
    report.sampled = sets.unary_sampled || sets.binary_sampled;
    report.notes.extend(sets.carrier_note.clone());
    report.notes.extend(sets.binary_note.clone());

    report.laws_checked.push("C1".into());
    for i in 0..dim {
        let z = alg.cyl(i, &alg.bot());
        if !z.is_empty() {
            report.violate(opts, "C1", format!("c_{i} 0 = {z:?}"));
        }
    }

    report.laws_checked.push("C2".into());
    'c2: for x in &sets.unary {
        for i in 0..dim {
            if !x.is_subset(&alg.cyl(i, x)) {
                report.violate(opts, "C2", format!("x = {x:?}, i = {i}"));
                if report.violations.len() >= opts.max_violations {
                    break 'c2;
                }
            }
        }
    }

    report.laws_checked.push("C3".into());
    'c3: for i in 0..dim {
        // Precompute c_i y for the inner loop.
        let cy: Vec<BitSet> = sets.binary.iter().map(|y| alg.cyl(i, y)).collect();
        for x in &sets.binary {
            let cx = alg.cyl(i, x);
            for (y, ciy) in sets.binary.iter().zip(cy.iter()) {
                let lhs = alg.cyl(i, &x.intersect(ciy));
                let rhs = cx.intersect(ciy);
                if lhs != rhs {
                    report.violate(opts, "C3", format!("x = {x:?}, y = {y:?}, i = {i}"));
                    if report.violations.len() >= opts.max_violations {
                        break 'c3;
                    }
                }
            }
        }
    }

    report.laws_checked.push("C4".into());
    'c4: for x in &sets.unary {
        for i in 0..dim {
            let cix = alg.cyl(i, x);
            for j in i + 1..dim {
                if alg.cyl(j, &cix) != alg.cyl(i, &alg.cyl(j, x)) {
                    report.violate(opts, "C4", format!("x = {x:?}, i = {i}, j = {j}"));
                    if report.violations.len() >= opts.max_violations {
                        break 'c4;
                    }
                }
            }
        }
    }

    if sig.kind.has_diagonals() {
        report.laws_checked.push("C5".into());
        for i in 0..dim {
            if alg.diag(i, i) != alg.top() {
                report.violate(opts, "C5", format!("d_{i}{i} is not the unit"));
            }
        }

        report.laws_checked.push("C6".into());
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    if k == i || k == j {
                        continue;
                    }
                    let rhs = alg.cyl(k, &alg.diag(i, k).intersect(&alg.diag(k, j)));
                    if alg.diag(i, j) != rhs {
                        report.violate(opts, "C6", format!("i = {i}, j = {j}, k = {k}"));
                    }
                }
            }
        }

        report.laws_checked.push("C7".into());
        'c7: for x in &sets.unary {
            for i in 0..dim {
                for j in 0..dim {
                    if i == j {
                        continue;
                    }
                    let d = alg.diag(i, j);
                    let a = alg.cyl(i, &d.intersect(x));
                    let b = alg.cyl(i, &d.intersect(&alg.compl(x)));
                    if !a.intersect(&b).is_empty() {
                        report.violate(opts, "C7", format!("x = {x:?}, i = {i}, j = {j}"));
                        if report.violations.len() >= opts.max_violations {
                            break 'c7;
                        }
                    }
                }
            }
        }
    }

    report
}

/// Check the relation-algebra laws over a complex algebra:
///   (R1) (x;y);z = x;(y;z)
///   (R2) (x+y);z = x;z + y;z
///   (R3) x;1' = x  and  1';x = x
///   (R4) conv(conv(x)) = x
///   (R5) conv(x+y) = conv(x) + conv(y)
///   (R6) conv(x;y) = conv(y);conv(x)
///   (R7) conv(x);-(x;y) <= -y
pub fn check_ra_laws(cm: &CmAlgebra<'_>, opts: &CheckOptions) -> Result<AxiomReport> {
    let sets = pick_test_sets(cm, opts);
    let mut report = AxiomReport::new();
    report.sampled = sets.unary_sampled || sets.binary_sampled || sets.ternary_sampled;
    report.notes.extend(sets.carrier_note.clone());
    report.notes.extend(sets.binary_note.clone());
    report.notes.extend(sets.ternary_note.clone());
    let e = cm.ident()?;

    report.laws_checked.push("R3".into());
    report.laws_checked.push("R4".into());
    for x in &sets.unary {
        if cm.comp(x, &e)? != *x || cm.comp(&e, x)? != *x {
            report.violate(opts, "R3", format!("x = {x:?}"));
        }
        if cm.conv(&cm.conv(x)?)? != *x {
            report.violate(opts, "R4", format!("x = {x:?}"));
        }
        if report.violations.len() >= opts.max_violations {
            break;
        }
    }

    report.laws_checked.push("R5".into());
    report.laws_checked.push("R6".into());
    report.laws_checked.push("R7".into());
    'bin: for x in &sets.binary {
        let cvx = cm.conv(x)?;
        for y in &sets.binary {
            let xy = cm.comp(x, y)?;
            if cm.conv(&x.union(y))? != cvx.union(&cm.conv(y)?) {
                report.violate(opts, "R5", format!("x = {x:?}, y = {y:?}"));
            }
            if cm.conv(&xy)? != cm.comp(&cm.conv(y)?, &cvx)? {
                report.violate(opts, "R6", format!("x = {x:?}, y = {y:?}"));
            }
            if !cm.comp(&cvx, &xy.complement())?.is_subset(&y.complement()) {
                report.violate(opts, "R7", format!("x = {x:?}, y = {y:?}"));
            }
            if report.violations.len() >= opts.max_violations {
                break 'bin;
            }
        }
    }

    report.laws_checked.push("R1".into());
    report.laws_checked.push("R2".into());
    'tri: for x in &sets.ternary {
        for y in &sets.ternary {
            let xy = cm.comp(x, y)?;
            let xjy = x.union(y);
            for z in &sets.ternary {
                if cm.comp(&xy, z)? != cm.comp(x, &cm.comp(y, z)?)? {
                    report.violate(opts, "R1", format!("x = {x:?}, y = {y:?}, z = {z:?}"));
                }
                if cm.comp(&xjy, z)? != cm.comp(x, z)?.union(&cm.comp(y, z)?) {
                    report.violate(opts, "R2", format!("x = {x:?}, y = {y:?}, z = {z:?}"));
                }
                if report.violations.len() >= opts.max_violations {
                    break 'tri;
                }
            }
        }
    }

    report.laws_checked.sort();
    Ok(report)
}
