//! A bounded Prolog interpreter for concrete queries, used to validate witnesses.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::unify::unify;
use crate::syntax::ops::{goal_kind, GoalKind};
use crate::syntax::{Program, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", content = "steps", rename_all = "snake_case")]
pub enum ConcreteOutcome {
    Succeeded(u64),
    FinitelyFailed(u64),
    BudgetExceeded(u64),
}

/// Outcome plus the number of branches abandoned because of an
/// arithmetic instantiation or type error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConcreteRun {
    pub outcome: ConcreteOutcome,
    pub arithmetic_failures: u64,
}

/// Evaluate a ground integer expression.
pub fn eval(t: &Term) -> Option<BigInt> {
    match t {
        Term::Int(i) => Some(i.clone()),
        Term::App(op, args) => match (&**op, args.as_slice()) {
            ("-", [a]) => Some(-eval(a)?),
            ("+", [a, b]) => Some(eval(a)? + eval(b)?),
            ("-", [a, b]) => Some(eval(a)? - eval(b)?),
            ("*", [a, b]) => Some(eval(a)? * eval(b)?),
            _ => None,
        },
        Term::Var(_) => None,
    }
}

struct ChoicePoint {
    goals: Vec<Term>,
    next_clause: usize,
}

pub fn run_concrete(program: &Program, query: &Term, budget: u64) -> ConcreteOutcome {
    run_concrete_detailed(program, query, budget).outcome
}

/// Leftmost depth-first SLD resolution with occurs check. Each clause
/// resolution and each built-in evaluation counts as one step.
pub fn run_concrete_detailed(program: &Program, query: &Term, budget: u64) -> ConcreteRun {
    let mut stack = vec![ChoicePoint { goals: vec![query.unlabelled()], next_clause: 0 }];
    let mut steps: u64 = 0;
    let mut arithmetic_failures = 0;
    let mut gen: u32 = 1;
    loop {
        let Some(top) = stack.last_mut() else {
            return ConcreteRun { outcome: ConcreteOutcome::FinitelyFailed(steps), arithmetic_failures };
        };
        let Some(selected) = top.goals.first().cloned() else {
            return ConcreteRun { outcome: ConcreteOutcome::Succeeded(steps), arithmetic_failures };
        };
        if steps >= budget {
            return ConcreteRun { outcome: ConcreteOutcome::BudgetExceeded(budget), arithmetic_failures };
        }
        let (name, arity) = match selected.functor() {
            Some(f) => f,
            None => {
                stack.pop();
                continue;
            }
        };
        match goal_kind(name, arity) {
            GoalKind::Is | GoalKind::Compare(_) => {
                let frame = stack.pop().unwrap();
                let args = selected.args();
                let next = match goal_kind(name, arity) {
                    GoalKind::Is => match eval(&args[1]) {
                        Some(v) => unify(&args[0], &Term::Int(v))
                            .map(|s| frame.goals[1..].iter().map(|g| g.apply(&s)).collect()),
                        None => {
                            arithmetic_failures += 1;
                            None
                        }
                    },
                    GoalKind::Compare(op) => match (eval(&args[0]), eval(&args[1])) {
                        (Some(l), Some(r)) => op.holds(&l, &r).then(|| frame.goals[1..].to_vec()),
                        _ => {
                            arithmetic_failures += 1;
                            None
                        }
                    },
                    GoalKind::User => unreachable!(),
                };
                steps += 1;
                if let Some(goals) = next {
                    stack.push(ChoicePoint { goals, next_clause: 0 });
                }
            }
            GoalKind::User => {
                let candidates = program.clauses_for(name, arity);
                let mut resolved = None;
                while top.next_clause < candidates.len() {
                    let ci = candidates[top.next_clause];
                    top.next_clause += 1;
                    let clause = program.clause(ci).renamed(gen);
                    gen = gen.wrapping_add(1).max(1);
                    if let Some(s) = unify(&selected, &clause.head) {
                        let goals: Vec<Term> =
                            clause.body.iter().chain(top.goals[1..].iter()).map(|g| g.apply(&s)).collect();
                        resolved = Some(goals);
                        break;
                    }
                }
                let exhausted = top.next_clause >= candidates.len();
                match resolved {
                    Some(goals) => {
                        steps += 1;
                        if exhausted {
                            stack.pop();
                        }
                        stack.push(ChoicePoint { goals, next_clause: 0 });
                    }
                    None => {
                        stack.pop();
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_program, parse_term};

    const COUNT_TO: &str =
        "count_to(N,L):- count(0,N,L).\ncount(N,N,[N]).\ncount(M,N,[M|L]):- M > N, M1 is M+1, count(M1,N,L).\n";

    fn run(src: &str, q: &str, budget: u64) -> ConcreteOutcome {
        run_concrete(&parse_program(src).unwrap(), &parse_term(q).unwrap(), budget)
    }

    #[test]
    fn count_to_cases() {
        assert_eq!(run(COUNT_TO, "count_to(-1, L)", 10_000), ConcreteOutcome::BudgetExceeded(10_000));
        assert!(matches!(run(COUNT_TO, "count_to(1, L)", 10_000), ConcreteOutcome::FinitelyFailed(_)));
        assert!(matches!(run(COUNT_TO, "count_to(0, L)", 10_000), ConcreteOutcome::Succeeded(_)));
    }

    #[test]
    fn undefined_predicates_fail() {
        assert_eq!(run("p :- q.", "p", 100), ConcreteOutcome::FinitelyFailed(1));
    }

    #[test]
    fn non_ground_arithmetic_fails_the_branch() {
        let r = run_concrete_detailed(&parse_program("p(X) :- Y > X.").unwrap(), &parse_term("p(1)").unwrap(), 10);
        assert_eq!(r.outcome, ConcreteOutcome::FinitelyFailed(2));
        assert_eq!(r.arithmetic_failures, 1);
    }

    #[test]
    fn backtracking_reaches_later_clauses() {
        let src = "p(X) :- X > 0, q(X).\np(X) :- r(X).\nr(5).\n";
        assert_eq!(run(src, "p(5)", 100), ConcreteOutcome::Succeeded(4));
        assert!(matches!(run(src, "p(3)", 100), ConcreteOutcome::FinitelyFailed(_)));
    }

    #[test]
    fn arithmetic() {
        assert_eq!(eval(&parse_term("2*(3-5)+ -(1)").unwrap()), Some(BigInt::from(-5)));
        assert_eq!(eval(&parse_term("X+1").unwrap()), None);
        let src = "big(X) :- X is 4294967296 * 4294967296, X > 0.";
        assert!(matches!(run(src, "big(Y)", 10), ConcreteOutcome::Succeeded(_)));
    }
}
