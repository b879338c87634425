//! A conflict-driven clause-learning SAT solver.
//!
//! Two watched literals, first-UIP learning, VSIDS branching with phase
//! saving, Luby restarts, and learnt-clause reduction at restarts.

use std::collections::BinaryHeap;
use std::time::Instant;

use super::cnf::{Cnf, Lit};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    /// A full assignment indexed by variable.
    Sat(Vec<bool>),
    Unsat,
    Timeout,
}

impl SolveResult {
    pub fn model(&self) -> Option<&[bool]> {
        match self {
            SolveResult::Sat(m) => Some(m),
            _ => None,
        }
    }
}

const UNDEF: u8 = 2;

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    activity: f64,
}

struct Solver {
    clauses: Vec<Clause>,
    watches: Vec<Vec<usize>>,
    /// Per variable: 0 false, 1 true, 2 unassigned.
    value: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: BinaryHeap<(u64, u32)>,
    phase: Vec<bool>,
    seen: Vec<bool>,
}

fn luby(mut i: u64) -> u64 {
    // i-th element (from 0) of 1 1 2 1 1 2 4 ...
    let (mut size, mut seq) = (1u64, 0u32);
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1 << seq
}

impl Solver {
    fn new(num_vars: usize) -> Self {
        Solver {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            value: vec![UNDEF; num_vars],
            level: vec![0; num_vars],
            reason: vec![None; num_vars],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; num_vars],
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: (0..num_vars as u32).map(|v| (0f64.to_bits(), v)).collect(),
            phase: vec![false; num_vars],
            seen: vec![false; num_vars],
        }
    }

    fn lit_value(&self, l: Lit) -> u8 {
        match self.value[l.var() as usize] {
            UNDEF => UNDEF,
            v => v ^ l.is_negated() as u8,
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var() as usize;
        self.value[v] = !l.is_negated() as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn attach(&mut self, ci: usize) {
        let c = &self.clauses[ci].lits;
        let (a, b) = (c[0], c[1]);
        self.watches[a.index()].push(ci);
        self.watches[b.index()].push(ci);
    }

    /// Returns a conflicting clause, if any.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.index()]);
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                let lits = &mut self.clauses[ci].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                if self.lit_value(first) == 1 {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..self.clauses[ci].lits.len() {
                    let l = self.clauses[ci].lits[k];
                    if self.lit_value(l) != 0 {
                        self.clauses[ci].lits.swap(1, k);
                        self.watches[l.index()].push(ci);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                i += 1;
                match self.lit_value(first) {
                    0 => {
                        conflict = Some(ci);
                        break;
                    }
                    UNDEF => self.enqueue(first, Some(ci)),
                    _ => {}
                }
            }
            let rest = std::mem::take(&mut self.watches[false_lit.index()]);
            ws.extend(rest);
            self.watches[false_lit.index()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
            self.heap = (0..self.activity.len() as u32)
                .filter(|&v| self.value[v as usize] == UNDEF)
                .map(|v| (self.activity[v as usize].to_bits(), v))
                .collect();
        }
        if self.value[v] == UNDEF {
            self.heap.push((self.activity[v].to_bits(), v as u32));
        }
    }

    fn bump_clause(&mut self, ci: usize) {
        let c = &mut self.clauses[ci];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in &mut self.clauses {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP learnt clause (asserting literal first) and backjump level.
    fn analyze(&mut self, mut confl: usize) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit::pos(0)];
        let mut counter = 0;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let dl = self.decision_level();
        loop {
            self.bump_clause(confl);
            let lits = self.clauses[confl].lits.clone();
            let start = usize::from(p.is_some());
            for &q in &lits[start..] {
                let v = q.var() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= dl {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var() as usize] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            self.seen[lit.var() as usize] = false;
            counter -= 1;
            if counter == 0 {
                break;
            }
            confl = self.reason[lit.var() as usize].expect("implied literal has a reason");
        }
        learnt[0] = !p.expect("conflict involves the current level");
        // Drop literals implied by the rest of the clause.
        let redundant: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(i, l)| {
                i > 0
                    && self.reason[l.var() as usize].is_some_and(|r| {
                        self.clauses[r].lits.iter().all(|q| {
                            q.var() == l.var() || self.seen[q.var() as usize] || self.level[q.var() as usize] == 0
                        })
                    })
            })
            .collect();
        for l in &learnt[1..] {
            self.seen[l.var() as usize] = false;
        }
        let mut i = 0;
        learnt.retain(|_| {
            i += 1;
            !redundant[i - 1]
        });
        let mut bt = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var() as usize] > self.level[learnt[max_i].var() as usize] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            bt = self.level[learnt[1].var() as usize];
        }
        (learnt, bt)
    }

    fn backtrack(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var() as usize;
            self.phase[v] = !l.is_negated();
            self.value[v] = UNDEF;
            self.reason[v] = None;
            self.heap.push((self.activity[v].to_bits(), v as u32));
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some((bits, v)) = self.heap.pop() {
            let vi = v as usize;
            if self.value[vi] == UNDEF && bits == self.activity[vi].to_bits() {
                return Some(Lit::new(v, !self.phase[vi]));
            }
        }
        // Stale heap: fall back to a linear scan.
        (0..self.value.len()).find(|&v| self.value[v] == UNDEF).map(|v| Lit::new(v as u32, !self.phase[v]))
    }

    /// At level 0: drop satisfied clauses, strip false literals, halve the
    /// learnt database, and rebuild the watches.
    fn simplify_and_reduce(&mut self, max_learnts: usize) {
        debug_assert_eq!(self.decision_level(), 0);
        for v in 0..self.reason.len() {
            self.reason[v] = None;
        }
        let mut kept: Vec<Clause> = Vec::with_capacity(self.clauses.len());
        let mut learnts: Vec<Clause> = Vec::new();
        for mut c in std::mem::take(&mut self.clauses) {
            if c.lits.iter().any(|&l| self.lit_value(l) == 1) {
                continue;
            }
            c.lits.retain(|&l| self.lit_value(l) != 0);
            if c.learnt {
                learnts.push(c);
            } else {
                kept.push(c);
            }
        }
        if learnts.len() > max_learnts {
            learnts.sort_by(|a, b| {
                (a.lits.len() <= 2).cmp(&(b.lits.len() <= 2)).then(a.activity.total_cmp(&b.activity)).reverse()
            });
            learnts.truncate(max_learnts / 2);
        }
        kept.extend(learnts);
        self.clauses = kept;
        for w in &mut self.watches {
            w.clear();
        }
        for ci in 0..self.clauses.len() {
            self.attach(ci);
        }
    }

    fn add_learnt(&mut self, lits: Vec<Lit>) -> Option<usize> {
        if lits.len() == 1 {
            self.enqueue(lits[0], None);
            return None;
        }
        let ci = self.clauses.len();
        let first = lits[0];
        self.clauses.push(Clause { lits, learnt: true, activity: self.cla_inc });
        self.attach(ci);
        self.enqueue(first, Some(ci));
        Some(ci)
    }

    fn run(&mut self, deadline: Option<Instant>) -> SolveResult {
        let mut conflicts: u64 = 0;
        let mut restart = 0u64;
        let mut max_learnts = (self.clauses.len() / 3).max(2000);
        loop {
            let budget = luby(restart) * 100;
            let mut local = 0u64;
            loop {
                if let Some(confl) = self.propagate() {
                    conflicts += 1;
                    local += 1;
                    if self.decision_level() == 0 {
                        return SolveResult::Unsat;
                    }
                    let (learnt, bt) = self.analyze(confl);
                    self.backtrack(bt);
                    self.add_learnt(learnt);
                    self.var_inc /= 0.95;
                    self.cla_inc /= 0.999;
                    if conflicts.is_multiple_of(256) && deadline.is_some_and(|d| Instant::now() >= d) {
                        return SolveResult::Timeout;
                    }
                } else {
                    if local >= budget {
                        break;
                    }
                    match self.pick_branch() {
                        None => return SolveResult::Sat(self.value.iter().map(|&v| v == 1).collect()),
                        Some(l) => {
                            self.trail_lim.push(self.trail.len());
                            self.enqueue(l, None);
                        }
                    }
                }
            }
            restart += 1;
            self.backtrack(0);
            if self.propagate().is_some() {
                return SolveResult::Unsat;
            }
            self.simplify_and_reduce(max_learnts);
            max_learnts += max_learnts / 10;
            if deadline.is_some_and(|d| Instant::now() >= d) {
                return SolveResult::Timeout;
            }
        }
    }
}

/// Decide satisfiability of `cnf`, giving up at `deadline`.
pub fn solve_cnf(cnf: &Cnf, deadline: Option<Instant>) -> SolveResult {
    let n = cnf.num_vars() as usize;
    let mut s = Solver::new(n);
    for c in &cnf.clauses {
        let mut lits = c.clone();
        lits.sort();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] == !w[1]) {
            continue;
        }
        match lits.len() {
            0 => return SolveResult::Unsat,
            1 => match s.lit_value(lits[0]) {
                0 => return SolveResult::Unsat,
                1 => {}
                _ => s.enqueue(lits[0], None),
            },
            _ => {
                let ci = s.clauses.len();
                s.clauses.push(Clause { lits, learnt: false, activity: 0.0 });
                s.attach(ci);
            }
        }
    }
    if s.propagate().is_some() {
        return SolveResult::Unsat;
    }
    s.run(deadline)
}
