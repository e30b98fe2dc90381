//! A compact CDCL SAT solver: two watched literals, first-UIP learning with
//! local minimization, VSIDS branching, phase saving, Luby restarts and
//! LBD-based clause database reduction.
//!
//! The solver is fully deterministic: ties in the branching heap are broken
//! towards the lower variable index and the initial phase is `false`.

use std::sync::atomic::{AtomicBool, Ordering};

use crate::cnf::ClauseSet;

/// Internal literal: `2·var + negated`, variables 1-based as in [`ClauseSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct L(u32);

impl L {
    fn from_lit(l: crate::cnf::Lit) -> L {
        L(l.var().0 << 1 | u32::from(l.is_negated()))
    }
    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }
    fn neg(self) -> bool {
        self.0 & 1 == 1
    }
    fn idx(self) -> usize {
        self.0 as usize
    }
    fn not(self) -> L {
        L(self.0 ^ 1)
    }
}

const UNDEF: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branching {
    /// Activity-driven (VSIDS) with phase saving.
    #[default]
    Vsids,
    /// Lowest unassigned variable first, always `false` first.
    Static,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    /// Total assignment indexed by variable number (index 0 unused).
    Sat(Vec<bool>),
    Unsat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interrupted;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SatStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learnt: u64,
}

/// Clause header; the literals live in `SatSolver::arena`.
struct ClauseMeta {
    start: usize,
    len: u32,
    lbd: u32,
    activity: f32,
    learnt: bool,
    deleted: bool,
}

#[derive(Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: L,
}

/// Max-heap of variables keyed by activity.
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    fn new(n: usize) -> Self {
        VarHeap { heap: Vec::with_capacity(n), pos: vec![None; n + 1] }
    }

    fn better(act: &[f64], a: usize, b: usize) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v].is_some()
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::better(act, v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i]] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let child = if r < self.heap.len() && Self::better(act, self.heap[r], self.heap[l]) { r } else { l };
            if !Self::better(act, self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i]] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.sift_up(i, act);
    }

    fn bumped(&mut self, v: usize, act: &[f64]) {
        if let Some(i) = self.pos[v] {
            self.sift_up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.sift_down(0, act);
        }
        Some(top)
    }
}

fn luby(mut x: u64) -> u64 {
    let (mut size, mut seq) = (1u64, 0u32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1 << seq
}

pub struct SatSolver<'a> {
    num_vars: usize,
    clauses: Vec<ClauseMeta>,
    arena: Vec<L>,
    wasted: usize,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<Option<u32>>,
    trail: Vec<L>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    clause_inc: f32,
    phase: Vec<bool>,
    heap: VarHeap,
    seen: Vec<bool>,
    branching: Branching,
    static_next: usize,
    unsat: bool,
    original: &'a ClauseSet,
    learnt_count: usize,
    max_learnts: f64,
    pub stats: SatStats,
}

impl<'a> SatSolver<'a> {
    pub fn new(cnf: &'a ClauseSet) -> Self {
        Self::with_branching(cnf, Branching::default())
    }

    pub fn with_branching(cnf: &'a ClauseSet, branching: Branching) -> Self {
        let n = cnf.var_count() as usize;
        let mut s = SatSolver {
            num_vars: n,
            clauses: Vec::with_capacity(cnf.len()),
            arena: Vec::with_capacity(cnf.literal_count()),
            wasted: 0,
            watches: vec![Vec::new(); 2 * n + 2],
            assigns: vec![UNDEF; n + 1],
            level: vec![0; n + 1],
            reason: vec![None; n + 1],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; n + 1],
            var_inc: 1.0,
            clause_inc: 1.0,
            phase: vec![false; n + 1],
            heap: VarHeap::new(n),
            seen: vec![false; n + 1],
            branching,
            static_next: 1,
            unsat: false,
            original: cnf,
            learnt_count: 0,
            max_learnts: (cnf.len() as f64 / 3.0).max(5000.0),
            stats: SatStats::default(),
        };
        for v in 1..=n {
            s.heap.insert(v, &s.activity);
        }
        let mut lits = Vec::new();
        for clause in cnf.iter() {
            lits.clear();
            lits.extend(clause.iter().map(|&l| L::from_lit(l)));
            if !s.add_original(&mut lits) {
                s.unsat = true;
                break;
            }
        }
        s
    }

    fn value(&self, l: L) -> u8 {
        let a = self.assigns[l.var()];
        if a == UNDEF {
            UNDEF
        } else {
            a ^ u8::from(l.neg())
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: L, reason: Option<u32>) {
        let v = l.var();
        self.assigns[v] = u8::from(!l.neg());
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn lits(&self, cref: usize) -> &[L] {
        let c = &self.clauses[cref];
        &self.arena[c.start..c.start + c.len as usize]
    }

    fn push_clause(&mut self, lits: &[L], learnt: bool, lbd: u32) -> u32 {
        let cref = self.clauses.len() as u32;
        self.clauses.push(ClauseMeta {
            start: self.arena.len(),
            len: lits.len() as u32,
            lbd,
            activity: 0.0,
            learnt,
            deleted: false,
        });
        self.arena.extend_from_slice(lits);
        self.attach(cref);
        cref
    }

    fn attach(&mut self, cref: u32) {
        let lits = self.lits(cref as usize);
        let (a, b) = (lits[0], lits[1]);
        self.watches[a.not().idx()].push(Watcher { cref, blocker: b });
        self.watches[b.not().idx()].push(Watcher { cref, blocker: a });
    }

    /// Adds a clause at level 0. Returns `false` if the formula became UNSAT.
    fn add_original(&mut self, lits: &mut Vec<L>) -> bool {
        lits.retain(|&l| self.value(l) != 0);
        if lits.iter().any(|&l| self.value(l) == 1) {
            return true;
        }
        match lits.len() {
            0 => false,
            1 => {
                self.enqueue(lits[0], None);
                self.propagate().is_none()
            }
            _ => {
                self.push_clause(lits, false, 0);
                true
            }
        }
    }

    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = p.not();
            let mut ws = std::mem::take(&mut self.watches[p.idx()]);
            let (mut i, mut j) = (0, 0);
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                let start = self.clauses[cref].start;
                let len = self.clauses[cref].len as usize;
                if self.arena[start] == false_lit {
                    self.arena.swap(start, start + 1);
                }
                let first = self.arena[start];
                if first != w.blocker && self.value(first) == 1 {
                    ws[j] = Watcher { cref: w.cref, blocker: first };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in start + 2..start + len {
                    let lk = self.arena[k];
                    if self.value(lk) != 0 {
                        self.arena.swap(start + 1, k);
                        self.watches[lk.not().idx()].push(Watcher { cref: w.cref, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher { cref: w.cref, blocker: first };
                j += 1;
                if self.value(first) == 0 {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(w.cref));
                }
            }
            ws.truncate(j);
            self.watches[p.idx()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: usize) {
        self.clauses[cref].activity += self.clause_inc;
        if self.clauses[cref].activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.clause_inc *= 1e-20;
        }
    }

    fn analyze(&mut self, mut confl: u32) -> (Vec<L>, u32) {
        let mut learnt = vec![L(0)];
        let mut path = 0usize;
        let mut p: Option<L> = None;
        let mut idx = self.trail.len();
        let current = self.decision_level();
        loop {
            let cref = confl as usize;
            if self.clauses[cref].learnt {
                self.bump_clause(cref);
            }
            let c = &self.clauses[cref];
            let (lo, hi) = (c.start + usize::from(p.is_some()), c.start + c.len as usize);
            for k in lo..hi {
                let q = self.arena[k];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var()] {
                    break;
                }
            }
            let pl = self.trail[idx];
            p = Some(pl);
            self.seen[pl.var()] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[pl.var()].expect("implied literal has a reason");
        }
        learnt[0] = p.unwrap().not();

        // drop literals implied by the rest of the clause
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(i, &q)| {
                if i == 0 {
                    return true;
                }
                match self.reason[q.var()] {
                    None => true,
                    Some(r) => self.lits(r as usize).iter().skip(1).any(|&x| {
                        !self.seen[x.var()] && self.level[x.var()] > 0
                    }),
                }
            })
            .collect();
        for &q in &learnt {
            self.seen[q.var()] = false;
        }
        let mut out: Vec<L> = learnt.iter().zip(&keep).filter(|(_, &k)| k).map(|(&q, _)| q).collect();

        let back = if out.len() == 1 {
            0
        } else {
            let (best, _) = out
                .iter()
                .enumerate()
                .skip(1)
                .max_by_key(|(i, q)| (self.level[q.var()], std::cmp::Reverse(*i)))
                .unwrap();
            out.swap(1, best);
            self.level[out[1].var()]
        };
        (out, back)
    }

    fn lbd(&mut self, lits: &[L]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|l| self.level[l.var()]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for k in (lim..self.trail.len()).rev() {
            let v = self.trail[k].var();
            self.phase[v] = !self.trail[k].neg();
            self.assigns[v] = UNDEF;
            self.reason[v] = None;
            self.heap.insert(v, &self.activity);
            self.static_next = self.static_next.min(v);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<L> {
        match self.branching {
            Branching::Vsids => {
                while let Some(v) = self.heap.pop(&self.activity) {
                    if self.assigns[v] == UNDEF {
                        return Some(L((v as u32) << 1 | u32::from(!self.phase[v])));
                    }
                }
                None
            }
            Branching::Static => {
                while self.static_next <= self.num_vars {
                    let v = self.static_next;
                    if self.assigns[v] == UNDEF {
                        return Some(L((v as u32) << 1 | 1));
                    }
                    self.static_next += 1;
                }
                None
            }
        }
    }

    fn locked(&self, cref: usize) -> bool {
        let l0 = self.arena[self.clauses[cref].start];
        self.value(l0) == 1 && self.reason[l0.var()] == Some(cref as u32)
    }

    fn reduce_db(&mut self) {
        let mut cands: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| {
                let c = &self.clauses[i];
                c.learnt && !c.deleted && c.lbd > 2 && !self.locked(i)
            })
            .collect();
        cands.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a], &self.clauses[b]);
            cb.lbd.cmp(&ca.lbd).then(ca.activity.partial_cmp(&cb.activity).unwrap()).then(a.cmp(&b))
        });
        let remove = cands.len() / 2;
        for &i in &cands[..remove] {
            self.clauses[i].deleted = true;
            self.wasted += self.clauses[i].len as usize;
            self.learnt_count -= 1;
        }
        let clauses = &self.clauses;
        for ws in self.watches.iter_mut() {
            ws.retain(|w| !clauses[w.cref as usize].deleted);
        }
        if self.wasted * 4 > self.arena.len() {
            self.compact();
        }
    }

    fn compact(&mut self) {
        let mut arena = Vec::with_capacity(self.arena.len() - self.wasted);
        for c in self.clauses.iter_mut().filter(|c| !c.deleted) {
            let start = arena.len();
            arena.extend_from_slice(&self.arena[c.start..c.start + c.len as usize]);
            c.start = start;
        }
        self.arena = arena;
        self.wasted = 0;
    }

    pub fn solve(&mut self) -> SatResult {
        self.solve_interruptible(None).expect("no interrupt flag given")
    }

    /// Runs the search; polls `stop` every 256 conflicts and every 1024
    /// decisions.
    pub fn solve_interruptible(&mut self, stop: Option<&AtomicBool>) -> Result<SatResult, Interrupted> {
        if self.unsat {
            return Ok(SatResult::Unsat);
        }
        if self.propagate().is_some() {
            return Ok(SatResult::Unsat);
        }
        let mut restart_round = 0u64;
        loop {
            let budget = luby(restart_round) * 100;
            restart_round += 1;
            let mut conflicts = 0u64;
            loop {
                if let Some(confl) = self.propagate() {
                    self.stats.conflicts += 1;
                    conflicts += 1;
                    if self.decision_level() == 0 {
                        return Ok(SatResult::Unsat);
                    }
                    let (learnt, back) = self.analyze(confl);
                    self.cancel_until(back);
                    if learnt.len() == 1 {
                        self.enqueue(learnt[0], None);
                    } else {
                        let lbd = self.lbd(&learnt);
                        let cref = self.push_clause(&learnt, true, lbd);
                        let asserting = learnt[0];
                        self.bump_clause(cref as usize);
                        self.learnt_count += 1;
                        self.stats.learnt += 1;
                        self.enqueue(asserting, Some(cref));
                    }
                    self.var_inc /= 0.95;
                    self.clause_inc /= 0.999;
                    if self.stats.conflicts.is_multiple_of(256) {
                        if let Some(flag) = stop {
                            if flag.load(Ordering::Relaxed) {
                                self.cancel_until(0);
                                return Err(Interrupted);
                            }
                        }
                    }
                } else {
                    if conflicts >= budget {
                        self.stats.restarts += 1;
                        self.cancel_until(0);
                        break;
                    }
                    if self.learnt_count as f64 >= self.max_learnts + self.trail.len() as f64 {
                        self.reduce_db();
                        self.max_learnts *= 1.1;
                    }
                    match self.pick_branch() {
                        None => return Ok(SatResult::Sat(self.model())),
                        Some(l) => {
                            self.stats.decisions += 1;
                            self.trail_lim.push(self.trail.len());
                            self.enqueue(l, None);
                            if self.stats.decisions.is_multiple_of(1024) && stop.is_some_and(|f| f.load(Ordering::Relaxed)) {
                                self.cancel_until(0);
                                return Err(Interrupted);
                            }
                        }
                    }
                }
            }
        }
    }

    fn model(&self) -> Vec<bool> {
        let model: Vec<bool> = self.assigns.iter().map(|&a| a == 1).collect();
        assert!(self.original.is_satisfied_by(&model), "SAT model violates the input formula");
        model
    }
}

/// Decides `clauses`; returns a total satisfying assignment when SAT.
pub fn sat_solve(clauses: &ClauseSet) -> SatResult {
    SatSolver::new(clauses).solve()
}
