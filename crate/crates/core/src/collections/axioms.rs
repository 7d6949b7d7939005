use rayon::prelude::*;

use super::operad::operations_by_output;
use super::{DiscreteOperad, Operation, SymCollection};
use crate::error::{Error, Result};
use crate::pointed::Permutation;

/// Exhaustively checks unitality, associativity (full and both partial
/// shapes) and both equivariance laws up to arity `n`. Violations are
/// returned as messages in a deterministic order.
pub fn check_operad_axioms(p: &DiscreteOperad, n: usize) -> Result<Vec<String>> {
    if n > p.truncation() {
        return Err(Error::TruncationExceeded { arity: n, bound: p.truncation() });
    }
    let by_output = operations_by_output(p, n)?;
    let all: Vec<Operation> = by_output.iter().flatten().cloned().collect();
    let mut report: Vec<String> = all
        .par_iter()
        .map(|theta| {
            let mut out = Vec::new();
            check_one(p, theta, &by_output, n, &mut out);
            out
        })
        .flatten()
        .collect();
    report.sort();
    Ok(report)
}

/// Tuples of operations with outputs `slots` and total arity ≤ `budget`.
fn tuples(by_output: &[Vec<Operation>], slots: &[usize], budget: usize) -> Vec<Vec<Operation>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        by_output: &[Vec<Operation>],
        slots: &[usize],
        budget: usize,
        cur: &mut Vec<Operation>,
        out: &mut Vec<Vec<Operation>>,
    ) {
        if cur.len() == slots.len() {
            out.push(cur.clone());
            return;
        }
        for op in &by_output[slots[cur.len()]] {
            if op.arity() <= budget {
                cur.push(op.clone());
                rec(by_output, slots, budget - op.arity(), cur, out);
                cur.pop();
            }
        }
    }
    rec(by_output, slots, budget, &mut cur, &mut out);
    out
}

fn block_sum(perms: &[Permutation]) -> Permutation {
    let mut values = Vec::new();
    let mut off = 0;
    for p in perms {
        values.extend(p.values().iter().map(|&v| v + off));
        off += p.len();
    }
    Permutation::new(values).expect("block sum")
}

/// The permutation moving the input blocks of sizes `sizes` into the order `σ(1), …, σ(k)`.
fn block_permutation(sizes: &[usize], sigma: &Permutation) -> Permutation {
    let mut starts = vec![0; sizes.len()];
    for i in 1..sizes.len() {
        starts[i] = starts[i - 1] + sizes[i - 1];
    }
    let mut values = Vec::new();
    for &b in sigma.values() {
        values.extend((1..=sizes[b - 1]).map(|l| starts[b - 1] + l));
    }
    Permutation::new(values).expect("block permutation")
}

fn record(out: &mut Vec<String>, law: &str, lhs: Result<Operation>, rhs: Result<Operation>, what: impl FnOnce() -> String) {
    match (lhs, rhs) {
        (Ok(a), Ok(b)) if a == b => {}
        (Ok(a), Ok(b)) => out.push(format!("{law}: {} gives {a} vs {b}", what())),
        (Err(e), _) | (_, Err(e)) => out.push(format!("{law}: {} fails: {e}", what())),
    }
}

fn check_one(p: &DiscreteOperad, theta: &Operation, by_output: &[Vec<Operation>], n: usize, out: &mut Vec<String>) {
    let k = theta.arity();
    let c = theta.profile.output;
    let units: Vec<Operation> = theta.profile.inputs.iter().map(|&b| p.unit(b)).collect();
    record(out, "left unit", p.compose(&p.unit(c), std::slice::from_ref(theta)), Ok(theta.clone()), || {
        format!("id∘{theta}")
    });
    record(out, "right unit", p.compose(theta, &units), Ok(theta.clone()), || format!("{theta}∘id"));

    for psis in tuples(by_output, &theta.profile.inputs, n) {
        let Ok(outer) = p.compose(theta, &psis) else {
            record(out, "totality", p.compose(theta, &psis), Ok(theta.clone()), || format!("{theta}"));
            continue;
        };
        let sizes: Vec<usize> = psis.iter().map(Operation::arity).collect();
        let show = || format!("{theta}; {}", psis.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "));

        for sigma in Permutation::all(k) {
            if sigma.is_identity() {
                continue;
            }
            let lhs = p.act_op(theta, &sigma).and_then(|ts| {
                let reordered: Vec<Operation> = sigma.values().iter().map(|&i| psis[i - 1].clone()).collect();
                p.compose(&ts, &reordered)
            });
            let rhs = p.act_op(&outer, &block_permutation(&sizes, &sigma));
            record(out, "outer equivariance", lhs, rhs, || format!("{}, σ={sigma}", show()));
        }

        let tau_choices: Vec<Vec<Permutation>> = sizes.iter().map(|&a| Permutation::all(a)).collect();
        for_each_product(&tau_choices, &mut |taus| {
            if taus.iter().all(Permutation::is_identity) {
                return;
            }
            let lhs = psis
                .iter()
                .zip(taus)
                .map(|(x, t)| p.act_op(x, t))
                .collect::<Result<Vec<_>>>()
                .and_then(|moved| p.compose(theta, &moved));
            let rhs = p.act_op(&outer, &block_sum(taus));
            record(out, "inner equivariance", lhs, rhs, || format!("{}, τ={taus:?}", show()));
        });

        let outer_inputs = outer.profile.inputs.clone();
        for phis in tuples(by_output, &outer_inputs, n) {
            let lhs = p.compose(&outer, &phis);
            let mut grouped = Vec::with_capacity(k);
            let mut rest = phis.as_slice();
            let mut failed = None;
            for (psi, &a) in psis.iter().zip(&sizes) {
                let (head, tail) = rest.split_at(a);
                rest = tail;
                match p.compose(psi, head) {
                    Ok(g) => grouped.push(g),
                    Err(e) => failed = Some(e),
                }
            }
            let rhs = match failed {
                Some(e) => Err(e),
                None => p.compose(theta, &grouped),
            };
            record(out, "associativity", lhs, rhs, || {
                format!("{}; {}", show(), phis.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
            });
        }
    }

    // partial shapes: sequential (θ∘_i ψ)∘_{i+j-1} φ = θ∘_i(ψ∘_j φ) and
    // parallel (θ∘_i ψ)∘_{l+a-1} φ = (θ∘_l φ)∘_i ψ for i < l.
    for i in 1..=k {
        for psi in &by_output[theta.profile.inputs[i - 1]] {
            if k - 1 + psi.arity() > n {
                continue;
            }
            let Ok(tp) = p.partial(theta, i, psi) else { continue };
            let a = psi.arity();
            for j in 1..=a {
                for phi in &by_output[psi.profile.inputs[j - 1]] {
                    if tp.arity() - 1 + phi.arity() > n {
                        continue;
                    }
                    let lhs = p.partial(&tp, i + j - 1, phi);
                    let rhs = p.partial(psi, j, phi).and_then(|pp| p.partial(theta, i, &pp));
                    record(out, "sequential associativity", lhs, rhs, || format!("{theta} ∘{i} {psi} ∘{j} {phi}"));
                }
            }
            for l in i + 1..=k {
                for phi in &by_output[theta.profile.inputs[l - 1]] {
                    if tp.arity() - 1 + phi.arity() > n || k - 1 + phi.arity() > n {
                        continue;
                    }
                    let lhs = p.partial(&tp, l + a - 1, phi);
                    let rhs = p.partial(theta, l, phi).and_then(|tf| p.partial(&tf, i, psi));
                    record(out, "parallel associativity", lhs, rhs, || format!("{theta} ∘{i} {psi} ∘{l} {phi}"));
                }
            }
        }
    }
}

fn for_each_product(choices: &[Vec<Permutation>], f: &mut dyn FnMut(&[Permutation])) {
    let mut cur = Vec::with_capacity(choices.len());
    fn rec(choices: &[Vec<Permutation>], cur: &mut Vec<Permutation>, f: &mut dyn FnMut(&[Permutation])) {
        if cur.len() == choices.len() {
            f(cur);
            return;
        }
        for p in &choices[cur.len()] {
            cur.push(p.clone());
            rec(choices, cur, f);
            cur.pop();
        }
    }
    rec(choices, &mut cur, f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collections::{CSequence, Generator, OpData};

    #[test]
    fn builtins_satisfy_axioms() {
        for p in [
            DiscreteOperad::ass(4),
            DiscreteOperad::com(4),
            DiscreteOperad::unit_operad(vec!["a".into(), "b".into()], 4).unwrap(),
            DiscreteOperad::free_reduced(vec![Generator { name: "m".into(), arity: 2 }], 4).unwrap(),
        ] {
            assert_eq!(check_operad_axioms(&p, 4).unwrap(), Vec::<String>::new(), "{p}");
        }
    }

    #[test]
    fn corrupted_table_is_reported() {
        let mut t = DiscreteOperad::ass(3).tabulate().unwrap();
        let two = t.operations(&CSequence::mono(2)).unwrap();
        let one = t.operations(&CSequence::mono(1)).unwrap();
        t.set_composition(&two[0], &[one[0].clone(), one[0].clone()], two[1].clone()).unwrap();
        assert!(!check_operad_axioms(&t, 3).unwrap().is_empty());
        assert!(matches!(two[1].data, OpData::Label(1)));
    }

    #[test]
    fn tabulated_ass_passes() {
        let t = DiscreteOperad::ass(3).tabulate().unwrap();
        assert!(check_operad_axioms(&t, 3).unwrap().is_empty());
    }
}
