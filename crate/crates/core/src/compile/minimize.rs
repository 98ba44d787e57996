use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{assignments, is_repetitive, Bounds, EquivStatus, DEFAULT_FUEL, DEFAULT_MAX_STATES};
use crate::atom::Atom;
use crate::error::{Error, Result};
use crate::pga::{equiv_iseq_capped, graft, thread_extract, InstrSeq, Instruction, Op, Outcome, Prepared, Thread};
use crate::prop::{render_prop, to_basic_form, BasicForm, BinOp, Prop, PropTokens};
use crate::valuation::{CompiledForm, MachineSpace, ValuationClass, ValuationMachine};

pub const DEFAULT_BODY_BUDGET: usize = 7;
pub const DEFAULT_CANDIDATE_CAP: u64 = 100_000_000;

#[derive(Clone, Debug)]
pub struct MinimizeOptions {
    /// Only test bodies that are not repetitive.
    pub non_repetitive_only: bool,
    /// Maximum token count of a test body.
    pub body_budget: usize,
    /// Enumeration bounds for the bounded valuation classes.
    pub bounds: Bounds,
    /// Maximum number of candidate sequences examined.
    pub cap: Option<u64>,
    /// Print per-size candidate counts to stderr.
    pub progress: bool,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            non_repetitive_only: false,
            body_budget: DEFAULT_BODY_BUDGET,
            bounds: Bounds { max_states: DEFAULT_MAX_STATES, fuel: DEFAULT_FUEL },
            cap: Some(DEFAULT_CANDIDATE_CAP),
            progress: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimizeOutcome {
    pub result: InstrSeq,
    pub size: usize,
    pub status: EquivStatus,
    /// Candidates in all size classes searched.
    pub examined: u64,
}

/// Every proposition over `alphabet` and the constants whose rendering has at
/// most `budget` tokens, in order of token count and then rendering.
pub fn enumerate_bodies(alphabet: &BTreeSet<Atom>, budget: usize, non_repetitive_only: bool) -> Vec<Prop> {
    // by operator count plus leaves, which is the token count without parentheses
    let mut by_base: Vec<Vec<Prop>> = vec![Vec::new(); budget + 1];
    if budget == 0 {
        return Vec::new();
    }
    by_base[1] = [Prop::Truth, Prop::Falsity].into_iter().chain(alphabet.iter().cloned().map(Prop::Atom)).collect();
    for t in 2..=budget {
        let mut out = Vec::new();
        for x in &by_base[t - 1] {
            out.push(Prop::neg(x.clone()));
        }
        for l in 1..t - 1 {
            let r = t - 1 - l;
            for x in &by_base[l] {
                for y in &by_base[r] {
                    for op in BinOp::ALL {
                        out.push(Prop::bin(op, x.clone(), y.clone()));
                    }
                }
            }
        }
        for l in 1..t - 1 {
            for m in 1..t - 1 - l {
                let r = t - 1 - l - m;
                if r == 0 {
                    continue;
                }
                for x in &by_base[l] {
                    for y in &by_base[m] {
                        for z in &by_base[r] {
                            out.push(Prop::cond(x.clone(), y.clone(), z.clone()));
                        }
                    }
                }
            }
        }
        by_base[t] = out;
    }
    let mut bodies: Vec<(usize, String, Prop)> = by_base
        .into_iter()
        .flatten()
        .filter_map(|p| {
            let n = p.token_count();
            (n <= budget).then(|| (n, render_prop(&p), p))
        })
        .filter(|(_, _, p)| !non_repetitive_only || !is_repetitive(p).repetitive)
        .collect();
    bodies.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    bodies.into_iter().map(|(_, _, p)| p).collect()
}

/// A non-jump instruction of the candidate alphabet.
struct Entry {
    ins: Instruction,
    size: usize,
    op: Op,
    form: Option<BasicForm>,
}

enum Oracle {
    Thread(Arc<Thread>),
    Runs { machines: Vec<ValuationMachine>, expected: Vec<(Outcome, Vec<(usize, bool)>)> },
}

struct Search {
    entries: Vec<Entry>,
    /// Entry indices by instruction size.
    by_size: Vec<Vec<usize>>,
    oracle: Oracle,
}

#[derive(Clone, Copy)]
enum Slot {
    Entry(usize),
    Jump(usize),
}

impl Search {
    fn slot_instruction(&self, s: Slot) -> Instruction {
        match s {
            Slot::Entry(e) => self.entries[e].ins.clone(),
            Slot::Jump(k) => Instruction::Jump(k),
        }
    }

    fn reachable_only(&self, slots: &[Slot]) -> bool {
        let n = slots.len();
        let mut reach = vec![false; n];
        let mut stack = vec![0usize];
        while let Some(p) = stack.pop() {
            if p >= n || reach[p] {
                continue;
            }
            reach[p] = true;
            match slots[p] {
                Slot::Jump(k) => stack.push(p + k),
                Slot::Entry(e) => match self.entries[e].ins {
                    Instruction::Halt => {}
                    Instruction::Basic(_) => stack.push(p + 1),
                    _ => stack.extend([p + 1, p + 2]),
                },
            }
        }
        reach.into_iter().all(|r| r)
    }

    fn matches(&self, slots: &[Slot], scratch: &mut Vec<(usize, bool)>) -> bool {
        match &self.oracle {
            Oracle::Thread(target) => {
                let n = slots.len();
                let dead = Arc::new(Thread::Dead);
                let mut at: Vec<Arc<Thread>> = vec![dead.clone(); n + 1];
                let get = |at: &Vec<Arc<Thread>>, j: usize| at.get(j).cloned().unwrap_or_else(|| dead.clone());
                for i in (0..n).rev() {
                    at[i] = match slots[i] {
                        Slot::Jump(k) => get(&at, i + k),
                        Slot::Entry(e) => {
                            let entry = &self.entries[e];
                            match &entry.ins {
                                Instruction::Halt => Arc::new(Thread::Stop),
                                Instruction::Basic(a) => Arc::new(Thread::act(a.clone(), get(&at, i + 1))),
                                Instruction::PosTest(_) => {
                                    graft(entry.form.as_ref().expect("test"), &get(&at, i + 1), &get(&at, i + 2))
                                }
                                _ => graft(entry.form.as_ref().expect("test"), &get(&at, i + 2), &get(&at, i + 1)),
                            }
                        }
                    };
                }
                at[0] == *target
            }
            Oracle::Runs { machines, expected } => {
                let ops = slots
                    .iter()
                    .map(|s| match s {
                        Slot::Entry(e) => self.entries[*e].op.clone(),
                        Slot::Jump(k) => Op::Jump(*k),
                    })
                    .collect();
                let prepared = Prepared::from_ops(ops);
                machines.iter().zip(expected).all(|(m, (outcome, trace))| {
                    prepared.observe(m, scratch) == *outcome && scratch == trace
                })
            }
        }
    }

    /// Number of raw sequences with `n` instructions whose instruction sizes
    /// sum to `budget`.
    fn count(&self, n: usize, budget: usize) -> u64 {
        // ways[i][r]: fill positions i.. with total size r
        let mut ways = vec![vec![0u64; budget + 1]; n + 1];
        ways[n][0] = 1;
        for i in (0..n).rev() {
            for r in 0..=budget {
                let mut w = 0u64;
                for (size, entries) in self.by_size.iter().enumerate() {
                    if size >= 1 && size <= r {
                        let jumps = if size == 1 { (n - i) as u64 } else { 0 };
                        w = w.saturating_add((entries.len() as u64 + jumps).saturating_mul(ways[i + 1][r - size]));
                    }
                }
                ways[i][r] = w;
            }
        }
        ways[0][budget]
    }

    fn choices(&self, n: usize, i: usize, rem: usize) -> Vec<(Slot, usize)> {
        let left = n - i - 1;
        let mut out = Vec::new();
        for (size, entries) in self.by_size.iter().enumerate() {
            if size == 0 || size + left > rem || (left == 0 && size != rem) {
                continue;
            }
            out.extend(entries.iter().map(|e| (Slot::Entry(*e), size)));
            if size == 1 {
                out.extend((1..=n - i).map(|k| (Slot::Jump(k), 1)));
            }
        }
        out
    }

    fn dfs(&self, n: usize, rem: usize, slots: &mut Vec<Slot>, scratch: &mut Vec<(usize, bool)>, hits: &mut Vec<Vec<Slot>>) {
        let i = slots.len();
        if i == n {
            if self.reachable_only(slots) && self.matches(slots, scratch) {
                hits.push(slots.clone());
            }
            return;
        }
        for (slot, size) in self.choices(n, i, rem) {
            slots.push(slot);
            self.dfs(n, rem - size, slots, scratch, hits);
            slots.pop();
        }
    }

    fn render(&self, slots: &[Slot]) -> InstrSeq {
        InstrSeq::new(slots.iter().map(|s| self.slot_instruction(*s)).collect()).expect("nonempty")
    }

    /// Matching candidates of exact size `size`, sorted by rendering.
    fn class(&self, size: usize) -> Vec<InstrSeq> {
        let mut hits: Vec<InstrSeq> = (1..=size.div_ceil(2))
            .flat_map(|n| {
                let budget = size + 1 - n;
                self.choices(n, 0, budget).into_iter().map(move |first| (n, budget, first))
            })
            .collect::<Vec<_>>()
            .into_par_iter()
            .flat_map_iter(|(n, budget, (slot, s))| {
                let mut slots = vec![slot];
                let mut scratch = Vec::new();
                let mut hits = Vec::new();
                self.dfs(n, budget - s, &mut slots, &mut scratch, &mut hits);
                hits.into_iter().map(|h| self.render(&h)).collect::<Vec<_>>()
            })
            .collect();
        hits.sort_by_cached_key(|s| s.to_string());
        hits
    }
}

fn class_machines(
    s: &InstrSeq,
    c: ValuationClass,
    alphabet: &BTreeSet<Atom>,
    bounds: Bounds,
    cap: Option<u64>,
) -> Result<Vec<ValuationMachine>> {
    if c == ValuationClass::Static {
        return Ok(assignments(alphabet).map(|a| ValuationMachine::assignment(&a)).collect());
    }
    // adding work atoms only lifts constraints, so this set is contained in
    // the one used for any candidate
    MachineSpace::new(alphabet, bounds.max_states, c, bounds.fuel)
        .with_work(s.work_atoms())
        .with_cap(cap)
        .iter()
        .collect()
}

/// Shortest instruction sequence equivalent to `s` under `c`.
///
/// Candidates are built from work instructions over `alphabet`, `!`, jumps
/// `#k` landing inside the sequence or just past its end, and tests whose
/// bodies come from [`enumerate_bodies`]. Sequences with unreachable
/// instructions are skipped, since removing the dead code gives a smaller
/// equivalent. Size classes are searched in increasing order; within a
/// class the least rendering wins. When the target itself lies in this
/// space the result is never larger than it.
pub fn minimize(
    s: &InstrSeq,
    c: ValuationClass,
    alphabet: &BTreeSet<Atom>,
    max_size: usize,
    options: &MinimizeOptions,
) -> Result<MinimizeOutcome> {
    if let Some(a) = s.atoms().into_iter().find(|a| !alphabet.contains(a)) {
        return Err(Error::UndeclaredAtom(a));
    }
    let atoms: Vec<Atom> = alphabet.iter().cloned().collect();
    let mut entries = vec![Entry { ins: Instruction::Halt, size: 1, op: Op::Halt, form: None }];
    for (i, a) in atoms.iter().enumerate() {
        entries.push(Entry { ins: Instruction::Basic(a.clone()), size: 1, op: Op::Work(i), form: None });
    }
    for body in enumerate_bodies(alphabet, options.body_budget, options.non_repetitive_only) {
        let form = to_basic_form(&body);
        let compiled = Arc::new(CompiledForm::new(&form, &atoms)?);
        for positive in [true, false] {
            let ins = if positive { Instruction::PosTest(body.clone()) } else { Instruction::NegTest(body.clone()) };
            entries.push(Entry {
                size: ins.size(),
                ins,
                op: Op::Test { form: compiled.clone(), positive },
                form: Some(form.clone()),
            });
        }
    }
    let max_entry = entries.iter().map(|e| e.size).max().unwrap_or(1);
    let mut by_size = vec![Vec::new(); max_entry + 1];
    for (i, e) in entries.iter().enumerate() {
        by_size[e.size].push(i);
    }
    let exact = matches!(c, ValuationClass::Free | ValuationClass::Static);
    let oracle = if c == ValuationClass::Free {
        Oracle::Thread(Arc::new(thread_extract(s)))
    } else {
        let machines = class_machines(s, c, alphabet, options.bounds, options.cap)?;
        let target = Prepared::new(s, &atoms)?;
        let mut expected = Vec::with_capacity(machines.len());
        for m in &machines {
            let mut trace = Vec::new();
            let outcome = target.observe(m, &mut trace);
            expected.push((outcome, trace));
        }
        Oracle::Runs { machines, expected }
    };
    let search = Search { entries, by_size, oracle };
    let examined = AtomicU64::new(0);
    for size in 1..=max_size {
        let count: u64 = (1..=size.div_ceil(2)).map(|n| search.count(n, size + 1 - n)).sum();
        let so_far = examined.fetch_add(count, Ordering::Relaxed) + count;
        if let Some(cap) = options.cap {
            if so_far > cap {
                return Err(Error::BudgetExceeded { cap });
            }
        }
        if options.progress {
            eprintln!("size {size}: {count} candidates");
        }
        for candidate in search.class(size) {
            let status = if exact {
                Some(EquivStatus::Equivalent)
            } else {
                let v = equiv_iseq_capped(&candidate, s, c, options.bounds, options.cap)?;
                v.holds().then_some(v.status)
            };
            if let Some(status) = status {
                return Ok(MinimizeOutcome { result: candidate, size, status, examined: so_far });
            }
        }
    }
    Err(Error::NoneWithinBudget { max_size })
}
