//! Which basic actions can serve as steering atoms: the atom-level rule
//! ladder, its refinement to occurrences in an instruction sequence, and
//! detectability of side effects.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::atom::Atom;
use crate::error::{Error, Result};
use crate::pga::{InstrSeq, Instruction};
use crate::prop::to_basic_form;
use crate::valuation::{parse_machine_lines, CompiledForm, StateId, ValuationMachine};

/// A machine together with an equivalence on its states and an optional
/// set of normal states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionModel {
    machine: ValuationMachine,
    /// Class representative of every state: the least state of its class.
    class: Vec<StateId>,
    normal: Option<BTreeSet<StateId>>,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut x = x;
    while parent[x] != r {
        let up = parent[x];
        parent[x] = r;
        x = up;
    }
    r
}

impl ActionModel {
    /// `equiv` pairs are merged transitively.
    pub fn new(
        machine: ValuationMachine,
        equiv: &[(StateId, StateId)],
        normal: Option<BTreeSet<StateId>>,
    ) -> Result<ActionModel> {
        let n = machine.state_count();
        if let Some(&(s, t)) = equiv.iter().find(|(s, t)| *s >= n || *t >= n) {
            return Err(Error::InvalidMachine(format!("equivalence ({s}, {t}) names an unknown state")));
        }
        if normal.as_ref().is_some_and(|ns| ns.iter().any(|s| *s >= n)) {
            return Err(Error::InvalidMachine("normal state out of range".into()));
        }
        let mut parent: Vec<usize> = (0..n).collect();
        for &(s, t) in equiv {
            let (rs, rt) = (find(&mut parent, s), find(&mut parent, t));
            parent[rs.max(rt)] = rs.min(rt);
        }
        let class = (0..n).map(|s| find(&mut parent, s)).collect();
        Ok(ActionModel { machine, class, normal })
    }

    /// Parses a machine file extended with `equiv s t ...` lines (all listed
    /// states become equivalent) and `normal s ...` lines.
    pub fn parse(text: &str) -> Result<ActionModel> {
        let parsed = parse_machine_lines(text, true)?;
        let m = parsed.machine;
        let id = |line: usize, name: &str| {
            m.state_id(name).ok_or_else(|| Error::MachineFormat { line, message: format!("unknown state `{name}`") })
        };
        let mut pairs = Vec::new();
        for (line, names) in &parsed.equiv {
            let ids = names.iter().map(|n| id(*line, n)).collect::<Result<Vec<_>>>()?;
            pairs.extend(ids.windows(2).map(|w| (w[0], w[1])));
        }
        let normal = match &parsed.normal {
            None => None,
            Some(lines) => Some(
                lines
                    .iter()
                    .flat_map(|(line, names)| names.iter().map(move |n| (*line, n)))
                    .map(|(line, n)| id(line, n))
                    .collect::<Result<BTreeSet<_>>>()?,
            ),
        };
        ActionModel::new(m, &pairs, normal)
    }

    pub fn machine(&self) -> &ValuationMachine {
        &self.machine
    }

    pub fn equivalent(&self, s: StateId, t: StateId) -> bool {
        self.class[s] == self.class[t]
    }

    pub fn normal_states(&self) -> Option<&BTreeSet<StateId>> {
        self.normal.as_ref()
    }

    /// Equivalence classes in order of their least state.
    pub fn classes(&self) -> Vec<Vec<StateId>> {
        let mut by_rep: BTreeMap<StateId, Vec<StateId>> = BTreeMap::new();
        for (s, r) in self.class.iter().enumerate() {
            by_rep.entry(*r).or_default().push(s);
        }
        by_rep.into_values().collect()
    }

    fn index(&self, a: &Atom) -> Result<usize> {
        self.machine.atom_index(a).ok_or_else(|| Error::UndeclaredAtom(a.clone()))
    }

    /// `next(a, s)` stays in the class of `s`.
    fn preserves(&self, a: usize, s: StateId) -> bool {
        self.equivalent(self.machine.next(a, s), s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SteeringRule {
    /// No side effect at all.
    R2,
    /// Side effects stay within a state class.
    R3,
    /// Side effects stay within a state class in normal states.
    R4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "rule")]
pub enum AtomClass {
    /// Constant reply: the action is performed for its effect only.
    WorkAtom,
    SteeringAtom(SteeringRule),
    /// No atom-level verdict; see [`classify_occurrences`].
    OccurrenceLevel,
}

impl fmt::Display for AtomClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomClass::WorkAtom => f.write_str("work atom (R1)"),
            AtomClass::SteeringAtom(r) => write!(f, "steering atom ({r:?})"),
            AtomClass::OccurrenceLevel => f.write_str("occurrence level"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub per_atom: BTreeMap<Atom, AtomClass>,
    /// Atoms classified as steering atoms.
    pub steering_set: BTreeSet<Atom>,
    pub note: String,
}

/// Applies the rules in priority order over the states reachable from the
/// initial state: R1 constant reply gives a work atom; R2 identity effect,
/// R3 class-preserving effect and R4 class-preserving effect on the normal
/// states give a steering atom; otherwise the verdict is left to the
/// occurrences.
pub fn classify_atoms(model: &ActionModel) -> ClassificationReport {
    let m = &model.machine;
    let reachable = m.reachable_states();
    let normal: Option<Vec<StateId>> =
        model.normal.as_ref().map(|ns| reachable.iter().copied().filter(|s| ns.contains(s)).collect());
    let mut per_atom = BTreeMap::new();
    for (ai, a) in m.atoms().iter().enumerate() {
        let first = m.reply(ai, reachable[0]);
        let class = if reachable.iter().all(|&s| m.reply(ai, s) == first) {
            AtomClass::WorkAtom
        } else if reachable.iter().all(|&s| m.next(ai, s) == s) {
            AtomClass::SteeringAtom(SteeringRule::R2)
        } else if reachable.iter().all(|&s| model.preserves(ai, s)) {
            AtomClass::SteeringAtom(SteeringRule::R3)
        } else if normal.as_ref().is_some_and(|ns| ns.iter().all(|&s| model.preserves(ai, s))) {
            AtomClass::SteeringAtom(SteeringRule::R4)
        } else {
            AtomClass::OccurrenceLevel
        };
        per_atom.insert(a.clone(), class);
    }
    let steering_set =
        per_atom.iter().filter(|(_, c)| matches!(c, AtomClass::SteeringAtom(_))).map(|(a, _)| a.clone()).collect();
    let note = format!(
        "atom level: {} of {} states reachable from {}{}",
        reachable.len(),
        m.state_count(),
        m.state_name(m.init()),
        if model.normal.is_some() { "" } else { "; no normal states given, R4 skipped" }
    );
    ClassificationReport { per_atom, steering_set, note }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OccurrenceClass {
    Marginal,
    MarginalInNormal,
    NonMarginal,
}

impl fmt::Display for OccurrenceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OccurrenceClass::Marginal => "marginal",
            OccurrenceClass::MarginalInNormal => "marginal-in-normal",
            OccurrenceClass::NonMarginal => "non-marginal",
        })
    }
}

/// An atom inside the body of one test instruction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OccurrenceReport {
    /// Instruction index.
    pub position: usize,
    pub atom: Atom,
    pub class: OccurrenceClass,
    /// States in which this occurrence is evaluated.
    pub states: BTreeSet<StateId>,
    pub note: Option<String>,
}

/// Classifies every atom occurrence in a test body of `s`. The sequence is
/// run from every state reachable in the machine; an occurrence is marginal
/// when its effect preserves the state class at every state where it is
/// actually evaluated, marginal in normal cases when that holds at the
/// normal ones, and non-marginal otherwise.
pub fn classify_occurrences(s: &InstrSeq, model: &ActionModel) -> Result<Vec<OccurrenceReport>> {
    let m = &model.machine;
    let ins = s.instructions();
    let mut forms: Vec<Option<CompiledForm>> = Vec::with_capacity(ins.len());
    let mut work: Vec<Option<usize>> = Vec::with_capacity(ins.len());
    for i in ins {
        forms.push(match i.body() {
            Some(p) => Some(CompiledForm::new(&to_basic_form(p), m.atoms())?),
            None => None,
        });
        work.push(match i {
            Instruction::Basic(a) => Some(model.index(a)?),
            _ => None,
        });
    }
    // (position, atom index) -> states
    let mut seen: BTreeMap<(usize, usize), BTreeSet<StateId>> = BTreeMap::new();
    for i in ins.iter().enumerate().filter_map(|(p, i)| i.body().map(|b| (p, b))) {
        for a in i.1.atoms() {
            seen.insert((i.0, model.index(&a)?), BTreeSet::new());
        }
    }
    for start in m.reachable_states() {
        let (mut pc, mut state) = (0usize, start);
        // forward jumps only, so every run is finite
        while let Some(i) = ins.get(pc) {
            match i {
                Instruction::Halt | Instruction::Jump(0) => break,
                Instruction::Jump(k) => pc = pc.saturating_add(*k),
                Instruction::Basic(_) => {
                    state = m.next(work[pc].expect("work"), state);
                    pc += 1;
                }
                Instruction::PosTest(_) | Instruction::NegTest(_) => {
                    let mut at = state;
                    let positive = matches!(i, Instruction::PosTest(_));
                    let (result, end) = forms[pc].as_ref().expect("test").run_with(m, state, |a, _| {
                        seen.entry((pc, a)).or_default().insert(at);
                        at = m.next(a, at);
                    });
                    state = end;
                    pc += if result == positive { 1 } else { 2 };
                }
            }
        }
    }
    let normal = model.normal.as_ref();
    Ok(seen
        .into_iter()
        .map(|((position, a), states)| {
            let class = if states.iter().all(|&st| model.preserves(a, st)) {
                OccurrenceClass::Marginal
            } else if normal.is_some_and(|ns| states.iter().filter(|st| ns.contains(st)).all(|&st| model.preserves(a, st)))
            {
                OccurrenceClass::MarginalInNormal
            } else {
                OccurrenceClass::NonMarginal
            };
            let note = states.is_empty().then(|| "never evaluated".to_string());
            OccurrenceReport { position, atom: m.atoms()[a].clone(), class, states, note }
        })
        .collect())
}

/// Least reachable state `s` with `reply(b, next(a, s)) != reply(b, s)`:
/// performing `a` there changes what `b` reports.
pub fn detectability(model: &ActionModel, a: &Atom, b: &Atom) -> Result<Option<StateId>> {
    let (ai, bi) = (model.index(a)?, model.index(b)?);
    let m = &model.machine;
    let mut reachable = m.reachable_states();
    reachable.sort_unstable();
    Ok(reachable.into_iter().find(|&s| m.reply(bi, m.next(ai, s)) != m.reply(bi, s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::atom;
    use crate::pga::parse_iseq;

    const LADDER: &str = "\
atoms k r q d w
states s0 s1 s2
init s0
step k s0 T s2
step k s1 T s2
step k s2 T s2
step r s0 T s0
step r s1 F s1
step r s2 T s2
step q s0 F s1
step q s1 T s0
step q s2 F s2
step d s0 T s0
step d s1 F s1
step d s2 F s0
step w s0 T s0
step w s1 T s0
step w s2 T s0
equiv s0 s1
";

    #[test]
    fn ladder() {
        let model = ActionModel::parse(LADDER).unwrap();
        let r = classify_atoms(&model);
        assert_eq!(r.per_atom[&atom("k")], AtomClass::WorkAtom);
        assert_eq!(r.per_atom[&atom("r")], AtomClass::SteeringAtom(SteeringRule::R2));
        assert_eq!(r.per_atom[&atom("q")], AtomClass::SteeringAtom(SteeringRule::R3));
        assert_eq!(r.per_atom[&atom("d")], AtomClass::OccurrenceLevel);
        assert_eq!(r.steering_set, [atom("q"), atom("r")].into_iter().collect());
    }

    #[test]
    fn normal_states_give_r4() {
        let model = ActionModel::parse(&format!("{LADDER}normal s0 s1\n")).unwrap();
        assert_eq!(classify_atoms(&model).per_atom[&atom("d")], AtomClass::SteeringAtom(SteeringRule::R4));
    }

    #[test]
    fn occurrences() {
        let model = ActionModel::parse(LADDER).unwrap();
        let occ = classify_occurrences(&parse_iseq("w;+d;r;!").unwrap(), &model).unwrap();
        assert_eq!(occ.len(), 1);
        assert_eq!(occ[0].class, OccurrenceClass::Marginal);
        assert_eq!(occ[0].states, [0].into_iter().collect());
        let occ = classify_occurrences(&parse_iseq("k;+d;!").unwrap(), &model).unwrap();
        assert_eq!(occ[0].class, OccurrenceClass::NonMarginal);
        let occ = classify_occurrences(&parse_iseq("#2;+d;!").unwrap(), &model).unwrap();
        assert_eq!(occ[0].class, OccurrenceClass::Marginal);
        assert!(occ[0].states.is_empty());
        let normal = ActionModel::parse(&format!("{LADDER}normal s0 s1\n")).unwrap();
        let occ = classify_occurrences(&parse_iseq("+(d && d);!").unwrap(), &normal).unwrap();
        assert_eq!(occ[0].class, OccurrenceClass::MarginalInNormal);
    }

    #[test]
    fn work_beats_identity() {
        let m = ValuationMachine::parse("atoms n\nstates s0 s1\ninit s0\nstep n s0 T s0\nstep n s1 T s1\n").unwrap();
        let model = ActionModel::new(m, &[], None).unwrap();
        assert_eq!(classify_atoms(&model).per_atom[&atom("n")], AtomClass::WorkAtom);
    }

    #[test]
    fn detect() {
        let model = ActionModel::parse(LADDER).unwrap();
        assert_eq!(detectability(&model, &atom("r"), &atom("q")).unwrap(), None);
        // q toggles the flag that r reads
        assert_eq!(detectability(&model, &atom("q"), &atom("r")).unwrap(), Some(0));
        assert_eq!(detectability(&model, &atom("r"), &atom("zz")), Err(Error::UndeclaredAtom(atom("zz"))));
    }

    #[test]
    fn model_format_errors() {
        let bad = format!("{LADDER}equiv s0 s9\n");
        assert!(matches!(ActionModel::parse(&bad), Err(Error::MachineFormat { .. })));
    }
}
