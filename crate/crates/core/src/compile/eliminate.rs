use crate::atom::Atom;
use crate::pga::{InstrSeq, Instruction};
use crate::prop::{to_basic_form, BasicForm, Prop};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Label {
    /// Start of the block of original instruction `j`; `j >= n` is past the
    /// end.
    Block(usize),
    Local(usize),
}

#[derive(Clone, Debug)]
enum Item {
    Test(bool, Atom),
    Work(Atom),
    Halt,
    Diverge,
    Jump(Label),
    Def(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Abs {
    Test(bool, Atom),
    Work(Atom),
    Halt,
    /// Absolute target; a jump to itself is `#0`.
    Jump(usize),
}

struct Gen {
    next_local: usize,
}

impl Gen {
    /// Code for `bf` with exits `on_true`/`on_false`. The code is followed by
    /// `fall`; the position after that is `skip` when known.
    fn form(
        &mut self,
        bf: &BasicForm,
        on_true: Label,
        on_false: Label,
        fall: Label,
        skip: Option<Label>,
        out: &mut Vec<Item>,
    ) {
        let exit = |b: bool| if b { on_true } else { on_false };
        match bf {
            BasicForm::Leaf(b) => {
                if exit(*b) != fall {
                    out.push(Item::Jump(exit(*b)));
                }
            }
            BasicForm::Node(a, t, e) => match (&**t, &**e) {
                (BasicForm::Leaf(t), BasicForm::Leaf(e)) => {
                    let (lt, le) = (exit(*t), exit(*e));
                    if lt == fall && skip == Some(le) {
                        out.push(Item::Test(true, a.clone()));
                    } else if le == fall && skip == Some(lt) {
                        out.push(Item::Test(false, a.clone()));
                    } else if le == fall {
                        out.extend([Item::Test(true, a.clone()), Item::Jump(lt)]);
                    } else if lt == fall {
                        out.extend([Item::Test(false, a.clone()), Item::Jump(le)]);
                    } else {
                        out.extend([Item::Test(true, a.clone()), Item::Jump(lt), Item::Jump(le)]);
                    }
                }
                (BasicForm::Leaf(t), _) => {
                    out.extend([Item::Test(true, a.clone()), Item::Jump(exit(*t))]);
                    self.form(e, on_true, on_false, fall, skip, out);
                }
                (_, BasicForm::Leaf(e)) => {
                    out.extend([Item::Test(false, a.clone()), Item::Jump(exit(*e))]);
                    self.form(t, on_true, on_false, fall, skip, out);
                }
                _ => {
                    let l = Label::Local(self.next_local);
                    self.next_local += 1;
                    out.extend([Item::Test(true, a.clone()), Item::Jump(l)]);
                    self.form(e, on_true, on_false, l, None, out);
                    let Label::Local(id) = l else { unreachable!() };
                    out.push(Item::Def(id));
                    self.form(t, on_true, on_false, fall, skip, out);
                }
            },
        }
    }
}

fn width(block: &[Item]) -> usize {
    block.iter().filter(|i| !matches!(i, Item::Def(_))).count()
}

/// Replaces every test with a non-atomic body by a fragment of atomic tests
/// and jumps with the same thread.
///
/// Each instruction becomes a contiguous block, built back to front so that
/// a test knows the layout of its successors: its basic form is laid out with
/// the true exit at the next block and the false exit at the block after
/// (swapped for `-`). Jumps are retargeted to block starts. Afterwards jumps
/// onto jumps are fused, jumps to the next instruction dropped where no test
/// depends on the slot, and unreachable instructions removed, until nothing
/// changes. The result is a fixpoint, so the transformation is idempotent.
pub fn eliminate_nonatomic(s: &InstrSeq) -> InstrSeq {
    let ins = s.instructions();
    let n = ins.len();
    let mut gen = Gen { next_local: 0 };
    let mut blocks: Vec<Vec<Item>> = vec![Vec::new(); n];
    // first non-empty block at or after `j`
    let canon = |blocks: &Vec<Vec<Item>>, j: usize| (j..n).find(|&k| width(&blocks[k]) > 0).unwrap_or(n);
    for i in (0..n).rev() {
        let fall = canon(&blocks, i + 1);
        let skip = if fall < n && width(&blocks[fall]) == 1 {
            Some(Label::Block(canon(&blocks, fall + 1)))
        } else if fall >= n {
            Some(Label::Block(n))
        } else {
            None
        };
        let succ = Label::Block(fall);
        let after = Label::Block(canon(&blocks, (i + 2).min(n)));
        let mut out = Vec::new();
        match &ins[i] {
            Instruction::Basic(a) => out.push(Item::Work(a.clone())),
            Instruction::Halt => out.push(Item::Halt),
            Instruction::Jump(0) => out.push(Item::Diverge),
            Instruction::Jump(k) => {
                let target = Label::Block(canon(&blocks, i.saturating_add(*k).min(n)));
                if target != succ {
                    out.push(Item::Jump(target));
                }
            }
            Instruction::PosTest(p) => gen.form(&body_form(p), succ, after, succ, skip, &mut out),
            Instruction::NegTest(p) => gen.form(&body_form(p), after, succ, succ, skip, &mut out),
        }
        blocks[i] = out;
    }
    let code = assemble(&blocks);
    let code = peephole(code);
    InstrSeq::new(emit(&code)).unwrap_or_else(|| InstrSeq::new(vec![Instruction::Jump(0)]).expect("nonempty"))
}

fn body_form(p: &Prop) -> BasicForm {
    to_basic_form(p)
}

fn assemble(blocks: &[Vec<Item>]) -> Vec<Abs> {
    let n = blocks.len();
    let mut block_start = vec![0; n + 1];
    let mut locals = std::collections::HashMap::new();
    let mut pos = 0;
    for (i, b) in blocks.iter().enumerate() {
        block_start[i] = pos;
        for item in b {
            match item {
                Item::Def(id) => {
                    locals.insert(*id, pos);
                }
                _ => pos += 1,
            }
        }
    }
    block_start[n] = pos;
    let resolve = |l: &Label| match l {
        Label::Block(j) => block_start[(*j).min(n)],
        Label::Local(id) => locals[id],
    };
    let mut code = Vec::with_capacity(pos);
    for item in blocks.iter().flatten() {
        code.push(match item {
            Item::Test(sign, a) => Abs::Test(*sign, a.clone()),
            Item::Work(a) => Abs::Work(a.clone()),
            Item::Halt => Abs::Halt,
            Item::Diverge => Abs::Jump(code.len()),
            Item::Jump(l) => Abs::Jump(resolve(l)),
            Item::Def(_) => continue,
        });
    }
    code
}

fn peephole(mut code: Vec<Abs>) -> Vec<Abs> {
    loop {
        let mut changed = false;
        // jump chaining
        for p in 0..code.len() {
            if let Abs::Jump(t) = code[p] {
                if t != p {
                    if let Some(Abs::Jump(t2)) = code.get(t) {
                        if *t2 != t {
                            code[p] = Abs::Jump(*t2);
                            changed = true;
                        } else {
                            code[p] = Abs::Jump(p);
                            changed = true;
                        }
                    }
                }
            }
        }
        // a test whose exits end up in the same place is a work instruction
        for p in 0..code.len() {
            if let Abs::Test(_, a) = &code[p] {
                if destination(&code, p + 1) == destination(&code, p + 2) {
                    code[p] = Abs::Work(a.clone());
                    changed = true;
                }
            }
        }
        let len = code.len();
        let mut keep = vec![true; len];
        for p in 0..len {
            if let Abs::Jump(t) = code[p] {
                let after_test = p > 0 && matches!(code[p - 1], Abs::Test(..));
                if (t == p + 1 || (t >= len && p + 1 == len)) && !after_test {
                    keep[p] = false;
                }
            }
        }
        let mut reach = vec![false; len];
        let mut stack = vec![0usize];
        while let Some(p) = stack.pop() {
            if p >= len || reach[p] {
                continue;
            }
            reach[p] = true;
            match code[p] {
                Abs::Test(..) => stack.extend([p + 1, p + 2]),
                Abs::Work(_) => stack.push(p + 1),
                Abs::Jump(t) => stack.push(t),
                Abs::Halt => {}
            }
        }
        for p in 0..len {
            if !reach[p] {
                keep[p] = false;
            }
        }
        if keep.iter().all(|k| *k) {
            if !changed {
                return code;
            }
            continue;
        }
        let mut new_index = Vec::with_capacity(len + 1);
        let mut kept = 0;
        for k in &keep {
            new_index.push(kept);
            kept += usize::from(*k);
        }
        new_index.push(kept);
        code = code
            .into_iter()
            .enumerate()
            .filter(|(p, _)| keep[*p])
            .map(|(p, ins)| match ins {
                Abs::Jump(t) if t == p => Abs::Jump(new_index[p]),
                Abs::Jump(t) => Abs::Jump(new_index[t.min(len)]),
                other => other,
            })
            .collect();
    }
}

/// First non-jump position reached from `p`; `None` when control leaves the
/// code or loops on `#0`.
fn destination(code: &[Abs], mut p: usize) -> Option<usize> {
    loop {
        match code.get(p)? {
            Abs::Jump(t) if *t == p => return None,
            Abs::Jump(t) => p = *t,
            _ => return Some(p),
        }
    }
}

fn emit(code: &[Abs]) -> Vec<Instruction> {
    code.iter()
        .enumerate()
        .map(|(p, ins)| match ins {
            Abs::Test(true, a) => Instruction::PosTest(Prop::Atom(a.clone())),
            Abs::Test(false, a) => Instruction::NegTest(Prop::Atom(a.clone())),
            Abs::Work(a) => Instruction::Basic(a.clone()),
            Abs::Halt => Instruction::Halt,
            Abs::Jump(t) => Instruction::Jump(t - p),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pga::{parse_iseq, thread_extract};

    fn elim(t: &str) -> String {
        let s = parse_iseq(t).unwrap();
        let out = eliminate_nonatomic(&s);
        assert!(out.is_atomic(), "{out}");
        assert_eq!(thread_extract(&out), thread_extract(&s), "{t} -> {out}");
        assert_eq!(eliminate_nonatomic(&out), out, "not idempotent on {out}");
        out.to_string()
    }

    #[test]
    fn atomic_input_is_kept() {
        assert_eq!(elim("+a;u;!"), "+a;u;!");
        assert_eq!(elim("-a;!;-b;c;!"), "-a;!;-b;c;!");
        assert_eq!(elim("#0"), "#0");
    }

    #[test]
    fn reference_layouts() {
        assert_eq!(elim("+(~a && (b || c));u;!"), "+a;#5;+b;#2;+c;u;!");
        assert_eq!(elim("+(~a && (b .|| c));u;!"), "+a;#5;+c;#2;+b;u;!");
        assert_eq!(elim("+(a && b);c;!"), "-a;#3;+b;c;!");
    }

    #[test]
    fn jumps_into_and_over_tests() {
        elim("+((~a || ~c) && (b || (c && d)));#5;-((b .&& ~c) .&& d);#2;u;v;w;!");
        elim("#2;a;+(a <=> b);!;c");
        elim("-(a .<=> (b => c));#3;+(F);+(T);a;!");
        elim("+(a && b);+(c || a)");
        elim("#4;+(a && b);+(b || c);#0;b");
        assert_eq!(elim("-a;#1;#2;a"), "a");
        assert_eq!(elim("+(a || T);!"), "a;!");
    }
}
