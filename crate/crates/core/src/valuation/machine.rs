use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::atom::Atom;
use crate::error::{Error, Result};

/// Index of a state inside a [`ValuationMachine`].
pub type StateId = usize;

/// A finite-state reactive valuation. Every atom has a reply and a successor
/// state in every state.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ValuationMachine {
    atoms: Vec<Atom>,
    states: Vec<String>,
    init: StateId,
    /// indexed by `state * atoms.len() + atom`
    reply: Vec<bool>,
    next: Vec<StateId>,
}

impl ValuationMachine {
    /// Builds a machine from total tables. `atoms` must be sorted and
    /// distinct; `reply`/`next` are indexed by `state * atoms.len() + atom`.
    pub fn from_tables(
        atoms: Vec<Atom>,
        states: Vec<String>,
        init: StateId,
        reply: Vec<bool>,
        next: Vec<StateId>,
    ) -> Result<ValuationMachine> {
        if states.is_empty() {
            return Err(Error::InvalidMachine("no states".into()));
        }
        if init >= states.len() {
            return Err(Error::InvalidMachine(format!("initial state {init} out of range")));
        }
        if atoms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMachine("atoms must be sorted and distinct".into()));
        }
        let cells = atoms.len() * states.len();
        if reply.len() != cells || next.len() != cells {
            return Err(Error::InvalidMachine(format!(
                "tables must have {cells} entries (atoms x states)"
            )));
        }
        if let Some(bad) = next.iter().find(|&&s| s >= states.len()) {
            return Err(Error::InvalidMachine(format!("successor state {bad} out of range")));
        }
        let distinct: BTreeSet<&String> = states.iter().collect();
        if distinct.len() != states.len() {
            return Err(Error::InvalidMachine("duplicate state name".into()));
        }
        Ok(ValuationMachine { atoms, states, init, reply, next })
    }

    /// Machine with states named `s0..`, initial state 0.
    pub fn with_default_names(
        atoms: Vec<Atom>,
        state_count: usize,
        reply: Vec<bool>,
        next: Vec<StateId>,
    ) -> Result<ValuationMachine> {
        let states = (0..state_count).map(|i| format!("s{i}")).collect();
        ValuationMachine::from_tables(atoms, states, 0, reply, next)
    }

    /// One-state machine answering according to `assignment`.
    pub fn assignment(assignment: &BTreeMap<Atom, bool>) -> ValuationMachine {
        let atoms: Vec<Atom> = assignment.keys().cloned().collect();
        let reply = assignment.values().copied().collect();
        let next = vec![0; atoms.len()];
        ValuationMachine::with_default_names(atoms, 1, reply, next).expect("well-formed")
    }

    /// Machine whose evaluation follows `path`: state `i` answers
    /// `path[i].1` to `path[i].0` and moves to state `i + 1`; every other
    /// atom answers `F` without changing state. The last state loops.
    pub fn realizing_path(atoms: &BTreeSet<Atom>, path: &[(Atom, bool)]) -> Result<ValuationMachine> {
        let atoms: Vec<Atom> = atoms.iter().cloned().collect();
        let k = atoms.len();
        let n = path.len().max(1);
        let mut reply = vec![false; n * k];
        let mut next: Vec<StateId> = (0..n * k).map(|cell| cell / k.max(1)).collect();
        for (i, (a, r)) in path.iter().enumerate() {
            let ai = atoms.binary_search(a).map_err(|_| Error::UndeclaredAtom(a.clone()))?;
            reply[i * k + ai] = *r;
            next[i * k + ai] = (i + 1).min(n - 1);
        }
        ValuationMachine::with_default_names(atoms, n, reply, next)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|n| n == name)
    }

    pub fn init(&self) -> StateId {
        self.init
    }

    pub fn atom_index(&self, a: &Atom) -> Option<usize> {
        self.atoms.binary_search(a).ok()
    }

    pub fn declares(&self, a: &Atom) -> bool {
        self.atom_index(a).is_some()
    }

    #[inline]
    pub fn reply(&self, atom: usize, state: StateId) -> bool {
        self.reply[state * self.atoms.len() + atom]
    }

    #[inline]
    pub fn next(&self, atom: usize, state: StateId) -> StateId {
        self.next[state * self.atoms.len() + atom]
    }

    /// States reachable from the initial state, in BFS order.
    pub fn reachable_states(&self) -> Vec<StateId> {
        self.reachable_from(self.init)
    }

    pub fn reachable_from(&self, start: StateId) -> Vec<StateId> {
        let mut seen = vec![false; self.states.len()];
        let mut order = vec![start];
        seen[start] = true;
        let mut i = 0;
        while i < order.len() {
            let s = order[i];
            for a in 0..self.atoms.len() {
                let t = self.next(a, s);
                if !seen[t] {
                    seen[t] = true;
                    order.push(t);
                }
            }
            i += 1;
        }
        order
    }

    /// Shortest sequence of `(atom, state, reply)` steps leading from the
    /// initial state to `target`, or `None` when unreachable.
    pub fn path_to(&self, target: StateId) -> Option<Vec<(usize, StateId, bool)>> {
        let mut parent: Vec<Option<(StateId, usize)>> = vec![None; self.states.len()];
        let mut seen = vec![false; self.states.len()];
        let mut queue = VecDeque::from([self.init]);
        seen[self.init] = true;
        while let Some(s) = queue.pop_front() {
            if s == target {
                let mut steps = Vec::new();
                let mut cur = s;
                while let Some((prev, a)) = parent[cur] {
                    steps.push((a, prev, self.reply(a, prev)));
                    cur = prev;
                }
                steps.reverse();
                return Some(steps);
            }
            for a in 0..self.atoms.len() {
                let t = self.next(a, s);
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some((s, a));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    /// Machine restricted to the given atom set (which must be a subset),
    /// keeping states and transitions of the remaining atoms.
    pub fn restrict(&self, keep: &BTreeSet<Atom>) -> Result<ValuationMachine> {
        let idx: Vec<usize> = keep
            .iter()
            .map(|a| self.atom_index(a).ok_or_else(|| Error::UndeclaredAtom(a.clone())))
            .collect::<Result<_>>()?;
        let mut reply = Vec::with_capacity(idx.len() * self.states.len());
        let mut next = Vec::with_capacity(idx.len() * self.states.len());
        for s in 0..self.states.len() {
            for &a in &idx {
                reply.push(self.reply(a, s));
                next.push(self.next(a, s));
            }
        }
        ValuationMachine::from_tables(
            keep.iter().cloned().collect(),
            self.states.clone(),
            self.init,
            reply,
            next,
        )
    }

    /// Renders the line-oriented machine file format.
    pub fn to_file_text(&self) -> String {
        let mut out = String::new();
        out.push_str("atoms");
        for a in &self.atoms {
            out.push(' ');
            out.push_str(a.as_str());
        }
        out.push_str("\nstates");
        for s in &self.states {
            out.push(' ');
            out.push_str(s);
        }
        out.push_str(&format!("\ninit {}\n", self.states[self.init]));
        for (ai, a) in self.atoms.iter().enumerate() {
            for (si, s) in self.states.iter().enumerate() {
                out.push_str(&format!(
                    "step {a} {s} {} {}\n",
                    if self.reply(ai, si) { 'T' } else { 'F' },
                    self.states[self.next(ai, si)]
                ));
            }
        }
        out
    }

    /// Parses the machine file format:
    ///
    /// ```text
    /// atoms a b
    /// states s0 s1
    /// init s0
    /// step a s0 T s1
    /// ```
    ///
    /// `#` starts a comment. Exactly one `step` line per (atom, state).
    pub fn parse(text: &str) -> Result<ValuationMachine> {
        let parsed = parse_machine_lines(text, false)?;
        Ok(parsed.machine)
    }
}

pub(crate) struct ParsedMachineFile {
    pub machine: ValuationMachine,
    /// `(line, state names)` of `equiv` lines
    pub equiv: Vec<(usize, Vec<String>)>,
    /// `(line, state names)` of `normal` lines
    pub normal: Option<Vec<(usize, Vec<String>)>>,
}

fn format_err(line: usize, message: impl Into<String>) -> Error {
    Error::MachineFormat { line, message: message.into() }
}

pub(crate) fn parse_machine_lines(text: &str, model_lines: bool) -> Result<ParsedMachineFile> {
    let mut atoms: Option<Vec<Atom>> = None;
    let mut states: Option<Vec<String>> = None;
    let mut init: Option<(usize, String)> = None;
    let mut steps: Vec<(usize, Vec<&str>)> = Vec::new();
    let mut equiv = Vec::new();
    let mut normal: Option<Vec<(usize, Vec<String>)>> = None;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "atoms" => {
                if atoms.is_some() {
                    return Err(format_err(line_no, "duplicate `atoms` line"));
                }
                let mut list = Vec::new();
                for w in &words[1..] {
                    let a = Atom::new(w).ok_or_else(|| format_err(line_no, format!("invalid atom name `{w}`")))?;
                    list.push(a);
                }
                let n = list.len();
                list.sort();
                list.dedup();
                if list.len() != n {
                    return Err(format_err(line_no, "duplicate atom"));
                }
                atoms = Some(list);
            }
            "states" => {
                if states.is_some() {
                    return Err(format_err(line_no, "duplicate `states` line"));
                }
                if words.len() < 2 {
                    return Err(format_err(line_no, "at least one state is required"));
                }
                let list: Vec<String> = words[1..].iter().map(|s| s.to_string()).collect();
                let distinct: BTreeSet<&String> = list.iter().collect();
                if distinct.len() != list.len() {
                    return Err(format_err(line_no, "duplicate state"));
                }
                states = Some(list);
            }
            "init" => {
                if words.len() != 2 {
                    return Err(format_err(line_no, "expected `init STATE`"));
                }
                if init.is_some() {
                    return Err(format_err(line_no, "duplicate `init` line"));
                }
                init = Some((line_no, words[1].to_string()));
            }
            "step" => {
                if words.len() != 5 {
                    return Err(format_err(line_no, "expected `step ATOM STATE T|F STATE`"));
                }
                steps.push((line_no, words));
            }
            "equiv" if model_lines => {
                equiv.push((line_no, words[1..].iter().map(|s| s.to_string()).collect()));
            }
            "normal" if model_lines => {
                normal
                    .get_or_insert_with(Vec::new)
                    .push((line_no, words[1..].iter().map(|s| s.to_string()).collect()));
            }
            other => return Err(format_err(line_no, format!("unknown directive `{other}`"))),
        }
    }

    let atoms = atoms.ok_or_else(|| format_err(0, "missing `atoms` line"))?;
    let states = states.ok_or_else(|| format_err(0, "missing `states` line"))?;
    let (init_line, init_name) = init.ok_or_else(|| format_err(0, "missing `init` line"))?;
    let state_index = |line: usize, name: &str| {
        states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| format_err(line, format!("unknown state `{name}`")))
    };
    let init = state_index(init_line, &init_name)?;
    let k = atoms.len();
    let mut reply = vec![None; k * states.len()];
    let mut next = vec![0; k * states.len()];
    for (line, words) in steps {
        let a = atoms
            .iter()
            .position(|a| a.as_str() == words[1])
            .ok_or_else(|| format_err(line, format!("undeclared atom `{}`", words[1])))?;
        let s = state_index(line, words[2])?;
        let r = match words[3] {
            "T" => true,
            "F" => false,
            other => return Err(format_err(line, format!("reply must be T or F, found `{other}`"))),
        };
        let t = state_index(line, words[4])?;
        let cell = s * k + a;
        if reply[cell].is_some() {
            return Err(format_err(line, format!("duplicate step for ({}, {})", words[1], words[2])));
        }
        reply[cell] = Some(r);
        next[cell] = t;
    }
    if let Some(missing) = reply.iter().position(Option::is_none) {
        return Err(format_err(
            0,
            format!(
                "missing step for ({}, {})",
                atoms[missing % k],
                states[missing / k]
            ),
        ));
    }
    let reply = reply.into_iter().map(|r| r.expect("checked")).collect();
    let machine = ValuationMachine::from_tables(atoms, states, init, reply, next)?;
    Ok(ParsedMachineFile { machine, equiv, normal })
}

impl fmt::Display for ValuationMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_file_text())
    }
}

impl fmt::Debug for ValuationMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ValuationMachine {{\n{}}}", self.to_file_text())
    }
}

impl Serialize for ValuationMachine {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_file_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# two atoms
atoms a b
states s0 s1
init s0
step a s0 T s1
step a s1 F s1
step b s0 F s0   # stays
step b s1 T s1
";

    #[test]
    fn parse_sample() {
        let m = ValuationMachine::parse(SAMPLE).unwrap();
        assert_eq!(m.state_count(), 2);
        let a = m.atom_index(&crate::atom("a")).unwrap();
        assert!(m.reply(a, 0));
        assert_eq!(m.next(a, 0), 1);
        assert!(!m.reply(a, 1));
        assert_eq!(ValuationMachine::parse(&m.to_file_text()).unwrap(), m);
    }

    #[test]
    fn load_time_errors() {
        let missing = SAMPLE.replace("step b s1 T s1\n", "");
        assert!(matches!(
            ValuationMachine::parse(&missing),
            Err(Error::MachineFormat { .. })
        ));
        let dup = format!("{SAMPLE}step b s1 F s0\n");
        assert!(matches!(
            ValuationMachine::parse(&dup),
            Err(Error::MachineFormat { line: 9, .. })
        ));
        let bad_state = SAMPLE.replace("init s0", "init s9");
        assert!(ValuationMachine::parse(&bad_state).is_err());
        let undeclared = SAMPLE.replace("step b s0", "step c s0");
        assert!(ValuationMachine::parse(&undeclared).is_err());
        let model_line = format!("{SAMPLE}equiv s0 s1\n");
        assert!(ValuationMachine::parse(&model_line).is_err());
    }

    #[test]
    fn reachability_and_paths() {
        let m = ValuationMachine::parse(SAMPLE).unwrap();
        assert_eq!(m.reachable_states(), vec![0, 1]);
        assert_eq!(m.path_to(1), Some(vec![(0, 0, true)]));
    }
}
