//! Exhaustive enumeration of small machines, used as the oracle for
//! class-relative equivalence.
//!
//! Machines are enumerated up to state renaming: every state is reachable
//! from the initial state `s0`, and states are numbered in order of first
//! appearance when the transition table is scanned row by row (which is the
//! breadth-first discovery order). Machines with unreachable states are
//! behaviourally identical to their reachable part and are not produced.

use std::collections::BTreeSet;

use crate::atom::Atom;
use crate::error::{Error, Result};

use super::class::{check, work_mask, Part, ValuationClass};
use super::machine::ValuationMachine;

/// Largest `states * atoms` table the enumerator accepts (replies are
/// enumerated as a bitmask).
pub const MAX_TABLE_CELLS: usize = 30;

/// All canonical transition tables with `n` states over `k` atoms, in
/// lexicographic order.
pub fn canonical_tables(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn fill(
        n: usize,
        k: usize,
        table: &mut Vec<usize>,
        discovered: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        let cell = table.len();
        if cell == n * k {
            if discovered == n {
                out.push(table.clone());
            }
            return;
        }
        let row = cell / k;
        if row >= discovered {
            // state `row` would be unreachable
            return;
        }
        // remaining cells must still be able to discover every state
        if n - discovered > n * k - cell {
            return;
        }
        let limit = (discovered + 1).min(n);
        for target in 0..limit {
            table.push(target);
            let d = if target == discovered { discovered + 1 } else { discovered };
            fill(n, k, table, d, out);
            table.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    fill(n, k, &mut Vec::with_capacity(n * k), 1, &mut out);
    out
}

/// Builder for a machine enumeration.
#[derive(Clone, Debug)]
pub struct MachineSpace {
    pub atoms: Vec<Atom>,
    pub max_states: usize,
    pub class: ValuationClass,
    pub fuel: usize,
    pub work: BTreeSet<Atom>,
    /// Maximum number of candidate machines examined.
    pub cap: Option<u64>,
    /// Smallest state count enumerated.
    pub min_states: usize,
}

impl MachineSpace {
    pub fn new(atoms: &BTreeSet<Atom>, max_states: usize, class: ValuationClass, fuel: usize) -> MachineSpace {
        MachineSpace {
            atoms: atoms.iter().cloned().collect(),
            max_states,
            class,
            fuel,
            work: BTreeSet::new(),
            cap: None,
            min_states: 1,
        }
    }

    pub fn with_work(mut self, work: BTreeSet<Atom>) -> MachineSpace {
        self.work = work;
        self
    }

    pub fn with_cap(mut self, cap: Option<u64>) -> MachineSpace {
        self.cap = cap;
        self
    }

    pub fn states(mut self, n: usize) -> MachineSpace {
        self.min_states = n;
        self.max_states = n;
        self
    }

    pub fn iter(&self) -> MachineStream {
        MachineStream {
            space: self.clone(),
            n: self.min_states.max(1),
            tables: Vec::new(),
            table_idx: 0,
            reply_mask: 0,
            reply_end: 0,
            examined: 0,
            failed: false,
            started: false,
        }
    }
}

/// Every machine of `atoms` with at most `max_states` states (up to
/// renaming) passing `check_class(c, fuel)`, in a deterministic order:
/// by state count, then transition table, then reply table.
pub fn generate_machines(
    atoms: &BTreeSet<Atom>,
    max_states: usize,
    c: ValuationClass,
    fuel: usize,
) -> MachineStream {
    MachineSpace::new(atoms, max_states, c, fuel).iter()
}

pub struct MachineStream {
    space: MachineSpace,
    n: usize,
    tables: Vec<Vec<usize>>,
    table_idx: usize,
    reply_mask: u64,
    reply_end: u64,
    examined: u64,
    failed: bool,
    started: bool,
}

impl MachineStream {
    /// Number of candidate machines examined so far.
    pub fn examined(&self) -> u64 {
        self.examined
    }

    fn load_state_count(&mut self) -> bool {
        let k = self.space.atoms.len();
        while self.n <= self.space.max_states {
            if self.n * k > MAX_TABLE_CELLS {
                return false;
            }
            self.tables = canonical_tables(self.n, k);
            self.table_idx = 0;
            if self.prepare_table() {
                return true;
            }
            self.n += 1;
        }
        false
    }

    /// Advances `table_idx` to the next table whose transition structure is
    /// admissible for the class; sets up the reply range.
    fn prepare_table(&mut self) -> bool {
        let k = self.space.atoms.len();
        let cells = self.n * k;
        while self.table_idx < self.tables.len() {
            let table = &self.tables[self.table_idx];
            let probe = ValuationMachine::with_default_names(
                self.space.atoms.clone(),
                self.n,
                vec![false; cells],
                table.clone(),
            )
            .expect("canonical table");
            let work = work_mask(&probe, &self.space.work);
            if check(&probe, self.space.class, self.space.fuel, work, Part::Structure).is_none() {
                self.reply_mask = 0;
                self.reply_end = 1u64 << cells;
                return true;
            }
            self.table_idx += 1;
        }
        false
    }
}

impl Iterator for MachineStream {
    type Item = Result<ValuationMachine>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        if !self.started {
            self.started = true;
            if !self.load_state_count() {
                self.failed = true;
                return None;
            }
        }
        let k = self.space.atoms.len();
        loop {
            if self.reply_mask >= self.reply_end {
                self.table_idx += 1;
                if !self.prepare_table() {
                    self.n += 1;
                    if !self.load_state_count() {
                        self.failed = true;
                        return None;
                    }
                }
                continue;
            }
            if let Some(cap) = self.space.cap {
                if self.examined >= cap {
                    self.failed = true;
                    return Some(Err(Error::BudgetExceeded { cap }));
                }
            }
            self.examined += 1;
            let cells = self.n * k;
            let mask = self.reply_mask;
            self.reply_mask += 1;
            let reply = (0..cells).map(|c| mask >> c & 1 == 1).collect();
            let m = ValuationMachine::with_default_names(
                self.space.atoms.clone(),
                self.n,
                reply,
                self.tables[self.table_idx].clone(),
            )
            .expect("canonical table");
            let work = work_mask(&m, &self.space.work);
            if check(&m, self.space.class, self.space.fuel, work, Part::Full).is_none() {
                return Some(Ok(m));
            }
        }
    }
}
