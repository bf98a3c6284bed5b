//! Exact solver for the atomic games.
//!
//! Positions are boards: the set of networks played so far plus the number
//! of rounds left. The opening round has the first player pick an atom and
//! the second realise it as a network; every later round is a cylindrifier
//! demand. A demand names a played network N, a tuple x of its nodes, a
//! coordinate i and an atom a with N(x) below c_i a. The response is a
//! network M agreeing with N off a single node z, carrying the witness
//! M(x[i:=z]) = a.
//!
//! Without node reuse the demand leaves the witness node to the responder:
//! she may deliver any already played network that relates to N that way
//! at some z of her choice (N itself included, which costs her nothing),
//! or extend N by the least never-used id. With node reuse (the bold
//! variant) every demand additionally names its target node z, fresh or
//! already in use, anywhere outside the fixed part x minus coordinate i;
//! the response must then agree with N off that z exactly, delivered
//! either out of the played networks or as a completion rewriting z.
//!
//! The first player wins a position if some demand defeats every response;
//! the second wins by surviving the round budget. Demands are probed in
//! three passes: priority atoms not yet written on any played network,
//! then the remaining priority atoms, then everything else. The passes
//! change which winning demand is found first, never who wins, and they
//! keep the search inside the first player's winning region on structures
//! whose losing regions are too wide to exhaust. The solver is exact up
//! to its position budget: `UndeterminedAtBound` is only ever reported
//! when a budget or enumeration cap was actually hit, never for a settled
//! position.

use crate::canon::{canonical_form, raw_form, CanonicalForm, DEFAULT_PERM_CAP};
use crate::network::{CompletionOutcome, CompletionProblem, Network, NodeId, MAX_DIM};
use crate::table::{Atom, AtomTable};
use bao_core::{Error, Result};
use rayon::prelude::*;
use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex};

/// Shape of one game: node budget, round budget, and whether the first
/// player's demands may name their target node (the bold variant, letting
/// him rewrite ids already in use). Without reuse targets are always
/// fresh and the responder keeps her choice of witness node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GameSpec {
    pub nodes: usize,
    pub rounds: usize,
    pub reuse: bool,
}

/// Solver knobs. The position budget applies per opening atom; the
/// completion cap applies per enumeration of responses to one demand. The
/// filter, when set, restricts which networks the second player may newly
/// introduce (opening realisations and constructed responses; delivering
/// an already played network is never filtered).
#[derive(Clone)]
pub struct SolveOptions {
    pub max_positions: u64,
    pub max_completions: usize,
    pub canonicalize: bool,
    pub parallel_root: bool,
    pub response_filter: Option<Arc<dyn Fn(&Network) -> bool + Send + Sync>>,
}

impl Default for SolveOptions {
    fn default() -> SolveOptions {
        SolveOptions {
            max_positions: 5_000_000,
            max_completions: 100_000,
            canonicalize: true,
            parallel_root: true,
            response_filter: None,
        }
    }
}

impl std::fmt::Debug for SolveOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolveOptions")
            .field("max_positions", &self.max_positions)
            .field("max_completions", &self.max_completions)
            .field("canonicalize", &self.canonicalize)
            .field("parallel_root", &self.parallel_root)
            .field("response_filter", &self.response_filter.as_ref().map(|_| "set"))
            .finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Winner {
    Exists,
    Forall,
    UndeterminedAtBound,
}

/// A recorded demand, in the coordinates of the canonical form of the
/// position it was recorded at: `net` ranks the network among the
/// canonically rendered board, `tuple` uses canonical node ids. `target`
/// is the named witness node of a reuse demand (the first never-used id
/// counts as itself); `NodeId::MAX` marks a demand that leaves placement
/// to the responder.
#[derive(Clone, Debug)]
pub struct MoveRec {
    pub net: u16,
    pub tuple: Vec<NodeId>,
    pub coord: u8,
    pub atom: Atom,
    pub target: NodeId,
}

#[derive(Clone, Debug)]
struct ProofEntry {
    depth: u16,
    mov: MoveRec,
}

const SHARDS: usize = 64;

struct Shared {
    forall: Vec<Mutex<HashMap<u128, ProofEntry>>>,
    exists: Vec<Mutex<HashMap<u128, u16>>>,
}

impl Shared {
    fn new() -> Shared {
        Shared {
            forall: (0..SHARDS).map(|_| Mutex::new(HashMap::new())).collect(),
            exists: (0..SHARDS).map(|_| Mutex::new(HashMap::new())).collect(),
        }
    }

    fn seeded(forall: &HashMap<u128, ProofEntry>, exists: &HashMap<u128, u16>) -> Shared {
        let shared = Shared::new();
        for (&k, v) in forall {
            shared.forall[shard(k)].lock().unwrap().insert(k, v.clone());
        }
        for (&k, &v) in exists {
            shared.exists[shard(k)].lock().unwrap().insert(k, v);
        }
        shared
    }

    fn merged(&self) -> (HashMap<u128, ProofEntry>, HashMap<u128, u16>) {
        let mut forall = HashMap::new();
        let mut exists = HashMap::new();
        for m in &self.forall {
            forall.extend(m.lock().unwrap().iter().map(|(&k, v)| (k, v.clone())));
        }
        for m in &self.exists {
            exists.extend(m.lock().unwrap().iter().map(|(&k, &v)| (k, v)));
        }
        (forall, exists)
    }
}

fn shard(hash: u128) -> usize {
    (hash as usize) & (SHARDS - 1)
}

#[derive(Clone)]
struct Board {
    nets: Vec<Arc<Network>>,
    used: NodeId,
}

impl Board {
    fn single(net: Network) -> Board {
        let used = net.nodes().last().map_or(0, |&v| v + 1);
        Board { nets: vec![Arc::new(net)], used }
    }

    fn contains(&self, m: &Network) -> bool {
        self.nets.iter().any(|n| n.as_ref() == m)
    }

    fn append(&self, m: &Network) -> Board {
        if self.contains(m) {
            return self.clone();
        }
        let mut nets = self.nets.clone();
        let used = self.used.max(m.nodes().last().map_or(0, |&v| v + 1));
        nets.push(Arc::new(m.clone()));
        Board { nets, used }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Val {
    Exists,
    Forall(u16),
    Undet,
}

struct Ctx<'a> {
    at: &'a dyn AtomTable,
    n: usize,
    spec: GameSpec,
    max_positions: u64,
    max_completions: usize,
    canonicalize: bool,
    filter: Option<Arc<dyn Fn(&Network) -> bool + Send + Sync>>,
    shared: &'a Shared,
}

impl<'a> Ctx<'a> {
    fn form(&self, board: &Board) -> CanonicalForm {
        if self.canonicalize {
            canonical_form(&board.nets, DEFAULT_PERM_CAP)
        } else {
            raw_form(&board.nets)
        }
    }

    /// Opening realisations of an atom: the canonical node set is the
    /// quotient of the coordinates by the atom's diagonal pattern (just
    /// the coordinates themselves without diagonals), the generic tuple is
    /// pinned to the atom, and every completion is a realisation. The
    /// boolean reports whether the enumeration was exhaustive.
    fn round0(&self, a: Atom) -> (Vec<Network>, bool) {
        let n = self.n;
        let mut class = [0usize; MAX_DIM];
        let d;
        if self.at.flavor().has_diagonal_condition() {
            let mut rep: Vec<usize> = (0..n).collect();
            for i in 0..n {
                for j in (i + 1)..n {
                    if self.at.in_diag(i, j, a) {
                        let (ri, rj) = (root(&rep, i), root(&rep, j));
                        if ri != rj {
                            rep[ri.max(rj)] = ri.min(rj);
                        }
                    }
                }
            }
            for i in 0..n {
                rep[i] = root(&rep, i);
            }
            // The pattern must itself be an equivalence; atoms whose
            // diagonal pattern is intransitive admit no realisation.
            for i in 0..n {
                for j in (i + 1)..n {
                    if (rep[i] == rep[j]) != self.at.in_diag(i, j, a) {
                        return (Vec::new(), true);
                    }
                }
            }
            let mut next = 0usize;
            let mut assigned = vec![usize::MAX; n];
            for i in 0..n {
                if assigned[rep[i]] == usize::MAX {
                    assigned[rep[i]] = next;
                    next += 1;
                }
                class[i] = assigned[rep[i]];
            }
            d = next;
        } else {
            for (i, slot) in class.iter_mut().enumerate().take(n) {
                *slot = i;
            }
            d = n;
        }
        if d > self.spec.nodes {
            return (Vec::new(), true);
        }
        let nodes: Vec<NodeId> = (0..d as NodeId).collect();
        let mut problem = CompletionProblem::new(self.at, nodes);
        let tuple: Vec<NodeId> = class[..n].iter().map(|&c| c as NodeId).collect();
        if !problem.pin_tuple(&tuple, a) {
            return (Vec::new(), true);
        }
        self.collect_completions(&problem)
    }

    fn collect_completions(&self, problem: &CompletionProblem) -> (Vec<Network>, bool) {
        let mut out = Vec::new();
        let complete = match problem.enumerate(self.max_completions, |net| {
            if self.filter.as_ref().map_or(true, |f| f(net)) {
                out.push(net.clone());
            }
            true
        }) {
            CompletionOutcome::Exhausted => true,
            CompletionOutcome::CapHit => false,
        };
        (out, complete)
    }

    /// Target-node options for a demand at `xbar`, coordinate `i`. Without
    /// reuse there is a single unnamed option (placement stays with the
    /// responder). With reuse the demand names its target: the first
    /// never-used id when the budget allows, then every used id outside
    /// the fixed part of the tuple.
    fn targets(&self, board: &Board, xbar: &[NodeId], i: usize) -> Vec<Option<NodeId>> {
        if !self.spec.reuse {
            return vec![None];
        }
        let mut out = Vec::new();
        if (board.used as usize) < self.spec.nodes {
            out.push(Some(board.used));
        }
        for z in 0..board.used {
            if (0..self.n).all(|q| q == i || xbar[q] != z) {
                out.push(Some(z));
            }
        }
        out
    }

    /// All responses to the demand (board net `t`, tuple, coordinate,
    /// atom, optional named target), deduplicated, in a deterministic
    /// order: already played networks first, then constructed ones. The
    /// boolean reports completeness; a capped enumeration cannot back a
    /// win for the demanding player.
    fn responses(
        &self,
        board: &Board,
        t: usize,
        xbar: &[NodeId],
        i: usize,
        a: Atom,
        target: Option<NodeId>,
    ) -> (Vec<Network>, bool) {
        let net = &board.nets[t];
        let mut out: Vec<Network> = Vec::new();
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        let mut complete = true;
        let mut ybar = xbar.to_vec();

        for p in &board.nets {
            let delivers = match target {
                Some(z) => {
                    ybar[i] = z;
                    p.agrees_off(net, z) && p.label_of(&ybar).map_or(false, |l| l == a)
                }
                None => {
                    if Arc::ptr_eq(p, net) || p.as_ref() == net.as_ref() {
                        net.nodes().iter().copied().any(|z| {
                            ybar[i] = z;
                            net.label_of(&ybar).map_or(false, |l| l == a)
                        })
                    } else {
                        old_network_witness(p, net, xbar, i, a).is_some()
                    }
                }
            };
            if delivers && seen.insert(p.raw_bytes()) {
                out.push(p.as_ref().clone());
            }
        }

        let mut try_rewrite = |z: NodeId, out: &mut Vec<Network>, complete: &mut bool| {
            let mut nodes: Vec<NodeId> = net.nodes().to_vec();
            if let Err(at) = nodes.binary_search(&z) {
                nodes.insert(at, z);
            }
            if nodes.len().pow(self.n as u32) > 1 << 24 {
                *complete = false;
                return;
            }
            let mut problem = CompletionProblem::new(self.at, nodes);
            if !problem.pin_from(net, Some(z)) {
                return;
            }
            ybar[i] = z;
            if !problem.pin_tuple(&ybar, a) {
                return;
            }
            let (nets, done) = self.collect_completions(&problem);
            if !done {
                *complete = false;
            }
            for m in nets {
                if !board.contains(&m) && seen.insert(m.raw_bytes()) {
                    out.push(m);
                }
            }
        };

        match target {
            Some(z) => try_rewrite(z, &mut out, &mut complete),
            None => {
                let z = board.used;
                if (z as usize) < self.spec.nodes {
                    try_rewrite(z, &mut out, &mut complete);
                }
            }
        }
        (out, complete)
    }

    /// Exact value of a board position with `rl` rounds left.
    fn value(&self, board: &Board, rl: u16, explored: &mut u64) -> Val {
        if rl == 0 {
            return Val::Exists;
        }
        let form = self.form(board);
        if let Some(entry) = self.shared.forall[shard(form.hash)].lock().unwrap().get(&form.hash) {
            if entry.depth <= rl {
                return Val::Forall(entry.depth);
            }
        }
        if let Some(&safe) = self.shared.exists[shard(form.hash)].lock().unwrap().get(&form.hash) {
            if rl <= safe {
                return Val::Exists;
            }
        }
        *explored += 1;
        if *explored > self.max_positions {
            return Val::Undet;
        }

        let n = self.n;
        let mut undetermined = false;
        let mut seen_moves: HashSet<(u16, Vec<NodeId>, u8, Atom, NodeId)> = HashSet::new();
        // Child values by the response's serialised form; the empty key is
        // the unchanged board (an already played network was delivered).
        let mut children: HashMap<Vec<u8>, Val> = HashMap::new();
        let mut board_atoms: HashSet<Atom> = HashSet::new();
        for p in &board.nets {
            board_atoms.extend(p.labels().iter().copied());
        }

        // Pass 0: priority atoms absent from the board, the sharpest
        // attacks. Pass 1: the remaining priority atoms. Pass 2: the rest.
        for pass in 0..3u8 {
            for t in (0..board.nets.len()).rev() {
                let net = board.nets[t].clone();
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
                        let demands = if pass < 2 {
                            self.at.cyl_demands_priority(i, b)
                        } else {
                            self.at.cyl_demands(i, b)
                        };
                        if demands.is_empty() {
                            continue;
                        }
                        let targets = self.targets(board, &xbar, i);
                        for a in demands {
                            let skip = match pass {
                                0 => board_atoms.contains(&a),
                                1 => !board_atoms.contains(&a),
                                _ => self.at.move_priority(a) > 0,
                            };
                            if skip {
                                continue;
                            }
                            for &zopt in &targets {
                                let mut masked = xbar.clone();
                                masked[i] = NodeId::MAX;
                                let zkey = zopt.unwrap_or(NodeId::MAX);
                                if !seen_moves.insert((t as u16, masked, i as u8, a, zkey)) {
                                    continue;
                                }
                                let (resps, resps_complete) =
                                    self.responses(board, t, &xbar, i, a, zopt);
                                if resps.is_empty() && resps_complete {
                                    let depth = 1;
                                    self.record_proof(board, &form, t, &xbar, i, a, zopt, depth);
                                    return Val::Forall(depth);
                                }
                                let mut all_forall = true;
                                let mut saw_undet = !resps_complete;
                                let mut deepest = 0u16;
                                for m in &resps {
                                    let key =
                                        if board.contains(m) { Vec::new() } else { m.raw_bytes() };
                                    let v = match children.get(&key).copied() {
                                        Some(v) => v,
                                        None => {
                                            let child = board.append(m);
                                            let v = self.value(&child, rl - 1, explored);
                                            children.insert(key, v);
                                            v
                                        }
                                    };
                                    match v {
                                        Val::Exists => {
                                            all_forall = false;
                                            break;
                                        }
                                        Val::Forall(d) => deepest = deepest.max(d),
                                        Val::Undet => saw_undet = true,
                                    }
                                }
                                if all_forall {
                                    if saw_undet {
                                        undetermined = true;
                                    } else {
                                        let depth = 1 + deepest;
                                        self.record_proof(
                                            board, &form, t, &xbar, i, a, zopt, depth,
                                        );
                                        return Val::Forall(depth);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }

        if undetermined {
            Val::Undet
        } else {
            let mut shard_map = self.shared.exists[shard(form.hash)].lock().unwrap();
            let entry = shard_map.entry(form.hash).or_insert(rl);
            *entry = (*entry).max(rl);
            Val::Exists
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn record_proof(
        &self,
        board: &Board,
        form: &CanonicalForm,
        t: usize,
        xbar: &[NodeId],
        i: usize,
        a: Atom,
        zopt: Option<NodeId>,
        depth: u16,
    ) {
        // A fresh target sits just past the used ids, where the canonical
        // renaming is the identity; in-use targets are renamed like nodes.
        let target = zopt.map_or(NodeId::MAX, |z| {
            if z >= board.used { z } else { form.map_old(z) }
        });
        let mov = MoveRec {
            net: canonical_rank(board, form, t),
            tuple: xbar.iter().map(|&v| form.map_old(v)).collect(),
            coord: i as u8,
            atom: a,
            target,
        };
        let mut shard_map = self.shared.forall[shard(form.hash)].lock().unwrap();
        let slot = shard_map.entry(form.hash).or_insert_with(|| ProofEntry { depth, mov: mov.clone() });
        if depth < slot.depth {
            *slot = ProofEntry { depth, mov };
        }
    }
}

fn root(rep: &[usize], mut k: usize) -> usize {
    while rep[k] != k {
        k = rep[k];
    }
    k
}

/// Rank of the `t`-th played network among the canonically rendered board.
fn canonical_rank(board: &Board, form: &CanonicalForm, t: usize) -> u16 {
    let mine = board.nets[t].rename(|v| form.map_old(v)).raw_bytes();
    let mut rank = 0u16;
    for (q, net) in board.nets.iter().enumerate() {
        if q != t && net.rename(|v| form.map_old(v)).raw_bytes() < mine {
            rank += 1;
        }
    }
    rank
}

/// Play index of the network holding canonical rank `r`.
fn play_index_of_rank(board: &Board, form: &CanonicalForm, r: u16) -> Option<usize> {
    let mut rendered: Vec<(Vec<u8>, usize)> = board
        .nets
        .iter()
        .enumerate()
        .map(|(q, net)| (net.rename(|v| form.map_old(v)).raw_bytes(), q))
        .collect();
    rendered.sort_unstable();
    rendered.get(r as usize).map(|&(_, q)| q)
}

/// Finds the node at which an already played network qualifies as a
/// response: it must agree with the demanded network off a single node z
/// not fixed by the demand, and carry the witness there.
fn old_network_witness(
    p: &Arc<Network>,
    net: &Arc<Network>,
    xbar: &[NodeId],
    i: usize,
    a: Atom,
) -> Option<NodeId> {
    let extra: Vec<NodeId> =
        p.nodes().iter().copied().filter(|v| !net.contains_node(*v)).collect();
    let missing = net.nodes().iter().any(|v| !p.contains_node(*v));
    let mut ybar = xbar.to_vec();
    let candidates: Vec<NodeId> = match (extra.len(), missing) {
        (0, false) => p.nodes().to_vec(),
        (1, false) => extra,
        _ => return None,
    };
    candidates.into_iter().find(|&z| {
        if (0..xbar.len()).any(|q| q != i && xbar[q] == z) {
            return false;
        }
        ybar[i] = z;
        p.agrees_off(net, z) && p.label_of(&ybar).map_or(false, |l| l == a)
    })
}

#[derive(Clone, Copy)]
enum AtomKind {
    Safe,
    Defeated(u16),
    Undet,
}

/// Everything retained from a solve for tracing and replay.
pub struct SolvedData {
    spec: GameSpec,
    canonicalize: bool,
    max_positions: u64,
    max_completions: usize,
    filter: Option<Arc<dyn Fn(&Network) -> bool + Send + Sync>>,
    winning_atom: Option<Atom>,
    forall: HashMap<u128, ProofEntry>,
    exists: HashMap<u128, u16>,
}

pub struct GameOutcome {
    pub winner: Winner,
    /// Exists: the round budget it survived. Forall: rounds of the proof
    /// found, opening included; the first proof in move order is kept, so
    /// this need not be the minimum over all proofs.
    pub rounds_used: usize,
    /// Positions expanded, summed over opening atoms. Diagnostic only:
    /// memo sharing makes it vary with thread interleaving.
    pub explored: u64,
    data: Arc<SolvedData>,
}

impl std::fmt::Debug for GameOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GameOutcome")
            .field("winner", &self.winner)
            .field("rounds_used", &self.rounds_used)
            .field("explored", &self.explored)
            .finish()
    }
}

/// One line of a played-out game.
#[derive(Clone, Debug)]
pub struct TraceStep {
    pub round: usize,
    pub description: String,
    /// The responding network, when the round produced one.
    pub response: Option<Network>,
}

pub fn solve_game(at: &dyn AtomTable, spec: GameSpec, opts: &SolveOptions) -> Result<GameOutcome> {
    let n = at.dim();
    if n == 0 || n > MAX_DIM {
        return Err(Error::InvalidInput(format!(
            "game dimension {n} out of range 1..={MAX_DIM}"
        )));
    }
    if spec.nodes == 0 || spec.nodes > 1024 {
        return Err(Error::InvalidInput(format!(
            "node budget {} out of range 1..=1024",
            spec.nodes
        )));
    }
    if spec.rounds > 4096 {
        return Err(Error::InvalidInput(format!("round budget {} exceeds 4096", spec.rounds)));
    }

    let data_stub = |winning: Option<Atom>, shared: &Shared| {
        let (forall, exists) = shared.merged();
        SolvedData {
            spec,
            canonicalize: opts.canonicalize,
            max_positions: opts.max_positions,
            max_completions: opts.max_completions,
            filter: opts.response_filter.clone(),
            winning_atom: winning,
            forall,
            exists,
        }
    };

    let shared = Shared::new();
    if spec.rounds == 0 {
        return Ok(GameOutcome {
            winner: Winner::Exists,
            rounds_used: 0,
            explored: 0,
            data: Arc::new(data_stub(None, &shared)),
        });
    }

    let ctx = Ctx {
        at,
        n,
        spec,
        max_positions: opts.max_positions,
        max_completions: opts.max_completions,
        canonicalize: opts.canonicalize,
        filter: opts.response_filter.clone(),
        shared: &shared,
    };

    let mut atoms: Vec<Atom> = at.atoms().collect();
    atoms.sort_by_key(|&a| (std::cmp::Reverse(at.move_priority(a)), a));

    let eval = |&a: &Atom| -> (AtomKind, u64) {
        let mut explored = 0u64;
        let (reals, complete) = ctx.round0(a);
        if reals.is_empty() {
            return if complete { (AtomKind::Defeated(1), explored) } else { (AtomKind::Undet, explored) };
        }
        let mut all_forall = true;
        let mut saw_undet = !complete;
        let mut deepest = 0u16;
        for m in &reals {
            let board = Board::single(m.clone());
            match ctx.value(&board, (spec.rounds - 1) as u16, &mut explored) {
                Val::Exists => {
                    all_forall = false;
                    break;
                }
                Val::Forall(d) => deepest = deepest.max(d),
                Val::Undet => saw_undet = true,
            }
        }
        let kind = if !all_forall {
            AtomKind::Safe
        } else if saw_undet {
            AtomKind::Undet
        } else {
            AtomKind::Defeated(1 + deepest)
        };
        (kind, explored)
    };

    let mut explored_total = 0u64;
    let mut any_undet = false;
    let mut defeat: Option<(Atom, u16)> = None;
    let threads = rayon::current_num_threads().max(1);
    let chunk = if opts.parallel_root { (threads * 2).max(1) } else { 1 };
    'scan: for batch in atoms.chunks(chunk) {
        let results: Vec<(AtomKind, u64)> = if opts.parallel_root && batch.len() > 1 {
            batch.par_iter().map(eval).collect()
        } else {
            batch.iter().map(eval).collect()
        };
        for (&a, (kind, ex)) in batch.iter().zip(results) {
            explored_total += ex;
            match kind {
                AtomKind::Defeated(depth) => {
                    defeat = Some((a, depth));
                    break 'scan;
                }
                AtomKind::Undet => any_undet = true,
                AtomKind::Safe => {}
            }
        }
    }

    let (winner, rounds_used, winning_atom) = match defeat {
        Some((a, depth)) => (Winner::Forall, depth as usize, Some(a)),
        None if any_undet => (Winner::UndeterminedAtBound, 0, None),
        None => (Winner::Exists, spec.rounds, None),
    };
    Ok(GameOutcome {
        winner,
        rounds_used,
        explored: explored_total,
        data: Arc::new(data_stub(winning_atom, &shared)),
    })
}

impl GameOutcome {
    /// Walks the recorded strategy and checks it is a closed winning
    /// strategy: every reachable position has a recorded demand whose
    /// depth fits the rounds left, demands are legal, and every response
    /// leads to a recorded position. For an Exists outcome the game is
    /// re-solved sequentially over the retained memo and must come out
    /// Exists again.
    pub fn replay_validate(&self, at: &dyn AtomTable) -> Result<()> {
        let d = &self.data;
        let shared = Shared::seeded(&d.forall, &d.exists);
        let ctx = Ctx {
            at,
            n: at.dim(),
            spec: d.spec,
            max_positions: d.max_positions,
            max_completions: d.max_completions,
            canonicalize: d.canonicalize,
            filter: d.filter.clone(),
            shared: &shared,
        };
        match self.winner {
            Winner::UndeterminedAtBound => {
                Err(Error::InvalidInput("an undetermined outcome has no strategy to replay".into()))
            }
            Winner::Exists => {
                let opts = SolveOptions {
                    max_positions: d.max_positions,
                    max_completions: d.max_completions,
                    canonicalize: d.canonicalize,
                    parallel_root: false,
                    response_filter: d.filter.clone(),
                };
                let again = solve_game(at, d.spec, &opts)?;
                if again.winner == Winner::Exists {
                    Ok(())
                } else {
                    Err(Error::Internal("replay disagrees with the recorded Exists outcome".into()))
                }
            }
            Winner::Forall => {
                let a = d
                    .winning_atom
                    .ok_or_else(|| Error::Internal("no winning atom recorded".into()))?;
                let (reals, complete) = ctx.round0(a);
                if !complete {
                    return Err(Error::BudgetExhausted(
                        "opening realisations overflowed the completion cap during replay".into(),
                    ));
                }
                let mut seen = HashSet::new();
                for m in &reals {
                    let board = Board::single(m.clone());
                    self.walk_proof(&ctx, &board, (d.spec.rounds - 1) as u16, &mut seen)?;
                }
                Ok(())
            }
        }
    }

    fn walk_proof(
        &self,
        ctx: &Ctx,
        board: &Board,
        rl: u16,
        seen: &mut HashSet<(u128, u16)>,
    ) -> Result<()> {
        let form = ctx.form(board);
        if !seen.insert((form.hash, rl)) {
            return Ok(());
        }
        let entry = self
            .data
            .forall
            .get(&form.hash)
            .ok_or_else(|| Error::Internal("reachable position lacks a recorded demand".into()))?
            .clone();
        if entry.depth > rl {
            return Err(Error::Internal(format!(
                "recorded proof needs {} rounds but only {rl} remain",
                entry.depth
            )));
        }
        let (t, xbar, i, a, zopt) = concrete_demand(board, &form, &entry.mov)?;
        let net = &board.nets[t];
        let b = net.label_of(&xbar)?;
        if !ctx.at.cyl_related(i, b, a) {
            return Err(Error::Internal("recorded demand is not legal at its position".into()));
        }
        match zopt {
            Some(z) => {
                if !ctx.spec.reuse {
                    return Err(Error::Internal(
                        "recorded demand names a node outside the reuse variant".into(),
                    ));
                }
                if (z as usize) >= ctx.spec.nodes {
                    return Err(Error::Internal("recorded demand names an out-of-range node".into()));
                }
                if (0..ctx.n).any(|q| q != i && xbar[q] == z) {
                    return Err(Error::Internal(
                        "recorded demand names a node pinned by its own tuple".into(),
                    ));
                }
            }
            None => {
                if ctx.spec.reuse {
                    return Err(Error::Internal(
                        "recorded reuse demand fails to name its node".into(),
                    ));
                }
            }
        }
        let (resps, complete) = ctx.responses(board, t, &xbar, i, a, zopt);
        if !complete {
            return Err(Error::BudgetExhausted(
                "response enumeration overflowed the completion cap during replay".into(),
            ));
        }
        for m in &resps {
            let child = board.append(m);
            self.walk_proof(ctx, &child, rl - 1, seen)?;
        }
        Ok(())
    }

    /// One concrete line of play, as human-readable steps. For a Forall
    /// outcome the demands follow the recorded strategy against the first
    /// enumerated response; for an Exists outcome the first legal demand
    /// is answered by the first safe response.
    pub fn trace(&self, at: &dyn AtomTable) -> Result<Vec<TraceStep>> {
        let d = &self.data;
        let shared = Shared::seeded(&d.forall, &d.exists);
        let ctx = Ctx {
            at,
            n: at.dim(),
            spec: d.spec,
            max_positions: d.max_positions,
            max_completions: d.max_completions,
            canonicalize: d.canonicalize,
            filter: d.filter.clone(),
            shared: &shared,
        };
        let mut steps = Vec::new();
        match self.winner {
            Winner::UndeterminedAtBound => {
                return Err(Error::InvalidInput("an undetermined outcome has no line to trace".into()))
            }
            Winner::Forall => {
                let a = d
                    .winning_atom
                    .ok_or_else(|| Error::Internal("no winning atom recorded".into()))?;
                let (reals, _) = ctx.round0(a);
                if reals.is_empty() {
                    steps.push(TraceStep {
                        round: 0,
                        description: format!(
                            "opening atom {} admits no network at all",
                            at.atom_label(a)
                        ),
                        response: None,
                    });
                    return Ok(steps);
                }
                let first = reals[0].clone();
                steps.push(TraceStep {
                    round: 0,
                    description: format!(
                        "opening atom {} realised on {} nodes",
                        at.atom_label(a),
                        first.size()
                    ),
                    response: Some(first.clone()),
                });
                let mut board = Board::single(first);
                let mut rl = (d.spec.rounds - 1) as u16;
                let mut round = 1;
                loop {
                    let form = ctx.form(&board);
                    let entry = self
                        .data
                        .forall
                        .get(&form.hash)
                        .ok_or_else(|| Error::Internal("trace ran off the strategy".into()))?;
                    let (t, xbar, i, a, zopt) = concrete_demand(&board, &form, &entry.mov)?;
                    let demand = format!(
                        "demand: network {t}, tuple {}, coordinate {i}, atom {}{}",
                        fmt_ids(&xbar),
                        at.atom_label(a),
                        match zopt {
                            Some(z) => format!(", at node {z}"),
                            None => String::new(),
                        }
                    );
                    let (resps, _) = ctx.responses(&board, t, &xbar, i, a, zopt);
                    match resps.first() {
                        None => {
                            steps.push(TraceStep {
                                round,
                                description: format!("{demand}; no response exists"),
                                response: None,
                            });
                            break;
                        }
                        Some(m) => {
                            let stands_pat = board.contains(m);
                            steps.push(TraceStep {
                                round,
                                description: if stands_pat {
                                    format!("{demand}; answered by a network already in play")
                                } else {
                                    format!("{demand}; answered on {} nodes", m.size())
                                },
                                response: Some(m.clone()),
                            });
                            board = board.append(m);
                        }
                    }
                    rl -= 1;
                    round += 1;
                    if rl == 0 {
                        return Err(Error::Internal("trace exhausted the rounds without a win".into()));
                    }
                }
            }
            Winner::Exists => {
                if d.spec.rounds == 0 {
                    return Ok(steps);
                }
                let mut atoms: Vec<Atom> = at.atoms().collect();
                atoms.sort_by_key(|&a| (std::cmp::Reverse(at.move_priority(a)), a));
                let Some(&a0) = atoms.first() else {
                    return Ok(steps);
                };
                let (reals, _) = ctx.round0(a0);
                let mut explored = 0u64;
                let chosen = reals
                    .iter()
                    .find(|&m| {
                        let board = Board::single(m.clone());
                        ctx.value(&board, (d.spec.rounds - 1) as u16, &mut explored) == Val::Exists
                    })
                    .cloned()
                    .ok_or_else(|| Error::Internal("no safe opening realisation found".into()))?;
                steps.push(TraceStep {
                    round: 0,
                    description: format!(
                        "opening atom {} realised on {} nodes",
                        at.atom_label(a0),
                        chosen.size()
                    ),
                    response: Some(chosen.clone()),
                });
                let mut board = Board::single(chosen);
                let mut rl = (d.spec.rounds - 1) as u16;
                let mut round = 1;
                while rl > 0 {
                    let Some((t, xbar, i, a, zopt)) = first_demand(&ctx, &board) else {
                        steps.push(TraceStep {
                            round,
                            description: "no demand can be made".into(),
                            response: None,
                        });
                        break;
                    };
                    let (resps, _) = ctx.responses(&board, t, &xbar, i, a, zopt);
                    let safe = resps
                        .iter()
                        .find(|&m| {
                            let child = board.append(m);
                            ctx.value(&child, rl - 1, &mut explored) == Val::Exists
                        })
                        .ok_or_else(|| Error::Internal("no safe response found on a safe line".into()))?;
                    let stands_pat = board.contains(safe);
                    steps.push(TraceStep {
                        round,
                        description: format!(
                            "demand: network {t}, tuple {}, coordinate {i}, atom {}{}; {}",
                            fmt_ids(&xbar),
                            at.atom_label(a),
                            match zopt {
                                Some(z) => format!(", at node {z}"),
                                None => String::new(),
                            },
                            if stands_pat { "answered by a network already in play" } else { "answered by a new network" }
                        ),
                        response: Some(safe.clone()),
                    });
                    board = board.append(safe);
                    rl -= 1;
                    round += 1;
                }
            }
        }
        Ok(steps)
    }

    /// Number of positions with a recorded winning demand.
    pub fn strategy_size(&self) -> usize {
        self.data.forall.len()
    }
}

fn fmt_ids(ids: &[NodeId]) -> String {
    let parts: Vec<String> = ids.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}

fn concrete_demand(
    board: &Board,
    form: &CanonicalForm,
    mov: &MoveRec,
) -> Result<(usize, Vec<NodeId>, usize, Atom, Option<NodeId>)> {
    let t = play_index_of_rank(board, form, mov.net)
        .ok_or_else(|| Error::Internal("recorded network rank is out of range".into()))?;
    let xbar: Vec<NodeId> = mov.tuple.iter().map(|&v| form.map_new(v)).collect();
    let zopt = match mov.target {
        NodeId::MAX => None,
        z if z >= board.used => Some(board.used),
        z => Some(form.map_new(z)),
    };
    Ok((t, xbar, mov.coord as usize, mov.atom, zopt))
}

/// First legal demand on the board in the solver's move order.
fn first_demand(
    ctx: &Ctx,
    board: &Board,
) -> Option<(usize, Vec<NodeId>, usize, Atom, Option<NodeId>)> {
    let n = ctx.n;
    for t in (0..board.nets.len()).rev() {
        let net = &board.nets[t];
        let total = net.labels().len();
        let mut pos = vec![0usize; n];
        for i in 0..n {
            for idx in 0..total {
                net.positions_of_index(idx, &mut pos);
                let b = net.labels()[idx];
                if let Some(a) = ctx.at.cyl_demands(i, b).into_iter().next() {
                    let xbar: Vec<NodeId> = pos.iter().map(|&p| net.nodes()[p]).collect();
                    if let Some(&zopt) = ctx.targets(board, &xbar, i).first() {
                        return Some((t, xbar, i, a, zopt));
                    }
                }
            }
        }
    }
    None
}

/// Whether the second player survives `k` rounds of the unbounded-node
/// game. The node budget is set to n*k + n, which the no-reuse response
/// space can never exhaust in k rounds, so the bounded game agrees with
/// the unbounded one.
pub fn check_lyndon(at: &dyn AtomTable, k: usize, opts: &SolveOptions) -> Result<bool> {
    if k == 0 {
        return Ok(true);
    }
    let n = at.dim();
    let spec = GameSpec { nodes: n * k + n, rounds: k, reuse: false };
    let outcome = solve_game(at, spec, opts)?;
    match outcome.winner {
        Winner::Exists => Ok(true),
        Winner::Forall => Ok(false),
        Winner::UndeterminedAtBound => Err(Error::BudgetExhausted(format!(
            "game undetermined after exploring {} positions",
            outcome.explored
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Flavor;
    use bao_core::cartesian_atom_structure;

    /// Two atoms in one dimension with 0 below c_0 of both atoms but 1 only
    /// below c_0 1. A network labelled 0 faces the demand for atom 1, and
    /// no witness node can carry a 1 next to a 0, so the first player wins
    /// in two rounds by opening with atom 0.
    struct ArrowTable;

    impl AtomTable for ArrowTable {
        fn dim(&self) -> usize {
            1
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
        fn cyl_lower(&self, _i: usize, a: Atom) -> Vec<Atom> {
            if a == 0 {
                vec![0]
            } else {
                vec![0, 1]
            }
        }
        fn cyl_demands(&self, _i: usize, b: Atom) -> Vec<Atom> {
            if b == 0 {
                vec![0, 1]
            } else {
                vec![1]
            }
        }
        fn cyl_related(&self, _i: usize, b: Atom, a: Atom) -> bool {
            !(b == 1 && a == 0)
        }
        fn in_diag(&self, i: usize, j: usize, _a: Atom) -> bool {
            i == j
        }
        fn transpose(&self, _i: usize, _j: usize, a: Atom) -> Atom {
            a
        }
        fn atom_label(&self, a: Atom) -> String {
            format!("t{a}")
        }
    }

    fn spec(nodes: usize, rounds: usize, reuse: bool) -> GameSpec {
        GameSpec { nodes, rounds, reuse }
    }

    #[test]
    fn zero_rounds_is_an_immediate_survival() {
        let at = cartesian_atom_structure(3, 2).unwrap();
        let out = solve_game(&at, spec(3, 0, false), &SolveOptions::default()).unwrap();
        assert_eq!(out.winner, Winner::Exists);
        assert_eq!(out.rounds_used, 0);
        assert!(out.trace(&at).unwrap().is_empty());
        out.replay_validate(&at).unwrap();
    }

    #[test]
    fn the_full_set_structure_survives_when_nodes_are_plentiful() {
        let at = cartesian_atom_structure(3, 2).unwrap();
        let out = solve_game(&at, spec(4, 3, false), &SolveOptions::default()).unwrap();
        assert_eq!(out.winner, Winner::Exists);
        assert_eq!(out.rounds_used, 3);
        assert!(out.explored > 0);
        out.replay_validate(&at).unwrap();
        let steps = out.trace(&at).unwrap();
        assert_eq!(steps.len(), 3);
        assert!(steps.iter().all(|s| s.response.is_some()));
    }

    #[test]
    fn old_networks_rescue_a_tight_node_budget() {
        // With three nodes and four rounds the fresh ids run out; survival
        // depends on answering repeated demands with networks already in
        // play instead of spending a new node each round.
        let at = cartesian_atom_structure(3, 2).unwrap();
        let out = solve_game(&at, spec(3, 4, false), &SolveOptions::default()).unwrap();
        assert_eq!(out.winner, Winner::Exists);
        out.replay_validate(&at).unwrap();
    }

    #[test]
    fn one_node_cannot_carry_a_two_point_atom() {
        let at = cartesian_atom_structure(3, 2).unwrap();
        let out = solve_game(&at, spec(1, 1, false), &SolveOptions::default()).unwrap();
        assert_eq!(out.winner, Winner::Forall);
        assert_eq!(out.rounds_used, 1);
    }

    #[test]
    fn the_arrow_table_falls_in_two_rounds() {
        let at = ArrowTable;
        let short = solve_game(&at, spec(2, 1, false), &SolveOptions::default()).unwrap();
        assert_eq!(short.winner, Winner::Exists);
        for k in 2..=4 {
            let out = solve_game(&at, spec(2, k, false), &SolveOptions::default()).unwrap();
            assert_eq!(out.winner, Winner::Forall, "round budget {k}");
            assert!(out.rounds_used >= 2);
            assert!(out.rounds_used <= k);
            out.replay_validate(&at).unwrap();
        }
    }

    #[test]
    fn node_reuse_separates_the_two_game_modes() {
        // On a single node the demand for atom 1 has no fresh id to go to,
        // so the strict game is lost; rewriting the node is allowed in the
        // reuse game and answers the demand outright.
        let at = ArrowTable;
        let strict = solve_game(&at, spec(1, 2, false), &SolveOptions::default()).unwrap();
        assert_eq!(strict.winner, Winner::Forall);
        for k in 2..=3 {
            let reuse = solve_game(&at, spec(1, k, true), &SolveOptions::default()).unwrap();
            assert_eq!(reuse.winner, Winner::Exists, "round budget {k}");
            reuse.replay_validate(&at).unwrap();
        }
    }

    #[test]
    fn the_set_structure_survives_node_rewriting() {
        // Rewriting a node of a point assignment is just re-assigning that
        // point, so naming nodes buys the first player nothing here. The
        // full grid of small budgets must stay winless for him.
        let at = cartesian_atom_structure(3, 2).unwrap();
        for m in [3, 6] {
            for k in [1, 4] {
                let out = solve_game(&at, spec(m, k, true), &SolveOptions::default()).unwrap();
                assert_eq!(out.winner, Winner::Exists, "m={m} k={k}");
                out.replay_validate(&at).unwrap();
            }
        }
    }

    #[test]
    fn forall_traces_end_in_an_unanswerable_demand() {
        let at = ArrowTable;
        let out = solve_game(&at, spec(2, 3, false), &SolveOptions::default()).unwrap();
        assert_eq!(out.winner, Winner::Forall);
        assert!(out.strategy_size() >= 1);
        out.replay_validate(&at).unwrap();
        let steps = out.trace(&at).unwrap();
        assert_eq!(steps.len(), 2);
        assert!(steps[1].description.contains("no response exists"));
        assert!(steps[1].response.is_none());
    }

    #[test]
    fn canonicalisation_does_not_change_the_verdict() {
        let raw = SolveOptions { canonicalize: false, ..SolveOptions::default() };
        let at = ArrowTable;
        let a = solve_game(&at, spec(2, 3, false), &SolveOptions::default()).unwrap();
        let b = solve_game(&at, spec(2, 3, false), &raw).unwrap();
        assert_eq!(a.winner, b.winner);
        assert_eq!(a.rounds_used, b.rounds_used);

        let cart = cartesian_atom_structure(3, 2).unwrap();
        let c = solve_game(&cart, spec(3, 2, false), &SolveOptions::default()).unwrap();
        let d = solve_game(&cart, spec(3, 2, false), &raw).unwrap();
        assert_eq!(c.winner, Winner::Exists);
        assert_eq!(c.winner, d.winner);
    }

    #[test]
    fn serial_and_parallel_roots_agree() {
        let at = cartesian_atom_structure(3, 2).unwrap();
        let serial = SolveOptions { parallel_root: false, ..SolveOptions::default() };
        let a = solve_game(&at, spec(4, 2, false), &SolveOptions::default()).unwrap();
        let b = solve_game(&at, spec(4, 2, false), &serial).unwrap();
        assert_eq!(a.winner, b.winner);
        assert_eq!(a.rounds_used, b.rounds_used);
    }

    #[test]
    fn the_position_budget_surfaces_as_undetermined() {
        let at = cartesian_atom_structure(3, 2).unwrap();
        let opts = SolveOptions { max_positions: 0, ..SolveOptions::default() };
        let out = solve_game(&at, spec(4, 3, false), &opts).unwrap();
        assert_eq!(out.winner, Winner::UndeterminedAtBound);
        assert_eq!(out.rounds_used, 0);
        assert!(out.replay_validate(&at).is_err());
        assert!(out.trace(&at).is_err());
    }

    #[test]
    fn a_filter_that_rejects_every_network_defeats_every_opening() {
        let at = cartesian_atom_structure(3, 2).unwrap();
        let opts = SolveOptions {
            response_filter: Some(Arc::new(|_: &Network| false)),
            ..SolveOptions::default()
        };
        let out = solve_game(&at, spec(3, 1, false), &opts).unwrap();
        assert_eq!(out.winner, Winner::Forall);
        assert_eq!(out.rounds_used, 1);
        out.replay_validate(&at).unwrap();
        let steps = out.trace(&at).unwrap();
        assert_eq!(steps.len(), 1);
        assert!(steps[0].description.contains("admits no network"));
    }

    #[test]
    fn lyndon_checks_on_both_tables() {
        let opts = SolveOptions::default();
        assert!(check_lyndon(&ArrowTable, 0, &opts).unwrap());
        assert!(!check_lyndon(&ArrowTable, 2, &opts).unwrap());
        let cart = cartesian_atom_structure(3, 2).unwrap();
        assert!(check_lyndon(&cart, 3, &opts).unwrap());
    }

    #[test]
    fn repeated_solves_report_the_same_outcome() {
        let at = cartesian_atom_structure(3, 2).unwrap();
        let a = solve_game(&at, spec(4, 3, false), &SolveOptions::default()).unwrap();
        let b = solve_game(&at, spec(4, 3, false), &SolveOptions::default()).unwrap();
        assert_eq!(a.winner, b.winner);
        assert_eq!(a.rounds_used, b.rounds_used);
    }
}
