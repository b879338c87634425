//! One PASS/FAIL line per acceptance criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use looper_core::analysis::{analyze_file_detailed, AnalysisDetail, AnalysisOptions, CandidateStatus};
use looper_core::constraints::{PremTemplate, Sym};
use looper_core::engine::{build_tree, run_concrete, ConcreteOutcome, TreeConfig};
use looper_core::nonterm::is_moded_more_general;
use looper_core::sat::{check_model, decode, encode, solve_cnf, DEFAULT_CLAUSE_BUDGET};
use looper_core::syntax::{parse_term, ModedQuery};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn analyze(name: &str, prem: PremTemplate, bits: u32) -> Result<(AnalysisDetail, Duration), String> {
    let opts = AnalysisOptions { prem, bits, ..AnalysisOptions::default() };
    let start = Instant::now();
    let d = analyze_file_detailed(&program_path(name), &opts).map_err(|e| e.to_string())?;
    Ok((d, start.elapsed()))
}

fn query_value(d: &AnalysisDetail, name: &str) -> Option<BigInt> {
    d.solved.first()?.model.get(&Sym::Query(name.into())).cloned()
}

fn criterion_1() -> Outcome {
    let (d, took) = analyze("count_to.pl", PremTemplate::Linear, 3)?;
    check(d.report.proved(), "count_to not proved")?;
    let s = &d.solved[0];
    for n in -10i64..=10 {
        let vals = [(Sym::Query("n".into()), BigInt::from(n))].into();
        let reach = s.system.reachability.iter().all(|c| c.eval(&vals) == Some(true));
        check(reach == (0 > n), format!("reachability disagrees with 0 > n at n = {n}"))?;
    }
    let minus_one = parse_term("count_to(-1, L)").unwrap();
    let oracle = run_concrete(&d.program, &minus_one, 10_000);
    check(matches!(oracle, ConcreteOutcome::BudgetExceeded(_)), format!("count_to(-1,L): {oracle:?}"))?;
    check(matches!(s.oracle, ConcreteOutcome::BudgetExceeded(_)), "reported witness terminated")?;
    check(took < Duration::from_secs(60), format!("took {took:?}"))?;
    Ok(format!("reachability {:?}, witness {}, {took:.2?}", d.report.candidates[0].reachability, s.witness))
}

fn criterion_2() -> Outcome {
    let (d, took) = analyze("constants.pl", PremTemplate::Linear, 3)?;
    check(d.report.proved(), "constants not proved")?;
    let s = &d.solved[0];
    check(s.witness.to_string() == "constants(2,1)", format!("witness {}", s.witness))?;
    let dir = s.model.get(&Sym::Dir("J".into()));
    check(dir == Some(&BigInt::from(0)), format!("d_J = {dir:?}"))?;
    let lower = s.model.get(&Sym::Lower("J".into()));
    check(lower == Some(&BigInt::from(1)), format!("c_J = {lower:?}"))?;
    check(took < Duration::from_secs(60), format!("took {took:?}"))?;
    Ok(format!("witness {}, d_J = 0, c_J = 1, {took:.2?}", s.witness))
}

fn criterion_3() -> Outcome {
    let (d, _) = analyze("eq_plus.pl", PremTemplate::Linear, 3)?;
    let c = d.report.candidates.iter().find(|c| (c.begin, c.end) == (3, 6)).ok_or("no candidate (N3, N6)")?;
    check(c.class_query == "eq_plus(I:in,I:in,0)", format!("class {}", c.class_query))?;
    check(c.status == CandidateStatus::Proved, format!("status {}", c.status))?;
    check(c.witness.as_deref() == Some("eq_plus(a,a,0)"), format!("witness {:?}", c.witness))?;
    check(matches!(c.oracle, Some(ConcreteOutcome::BudgetExceeded(_))), format!("oracle {:?}", c.oracle))?;
    Ok(format!("class {}, witness eq_plus(a,a,0)", c.class_query))
}

fn criterion_4() -> Outcome {
    let (d, _) = analyze("count_to.pl", PremTemplate::Linear, 3)?;
    let run = |q: &str| run_concrete(&d.program, &parse_term(q).unwrap(), 10_000);
    let one = run("count_to(1, L)");
    let zero = run("count_to(0, L)");
    check(matches!(one, ConcreteOutcome::FinitelyFailed(_)), format!("count_to(1,L): {one:?}"))?;
    check(matches!(zero, ConcreteOutcome::Succeeded(_)), format!("count_to(0,L): {zero:?}"))?;
    let s = d.solved.first().ok_or("count_to not proved")?;
    for n in [0i64, 1] {
        let vals = [(Sym::Query("n".into()), BigInt::from(n))].into();
        let member = s.system.reachability.iter().all(|c| c.eval(&vals) == Some(true));
        check(!member, format!("proved class contains n = {n}"))?;
    }
    check(query_value(&d, "n").is_some_and(|n| n < BigInt::from(0)), "model has n >= 0")?;
    Ok(format!("count_to(1,L) {one:?}, count_to(0,L) {zero:?}, both outside the class"))
}

fn criterion_5() -> Outcome {
    let mut cells = Vec::new();
    for prem in [PremTemplate::Linear, PremTemplate::Max2] {
        for bits in [3, 4] {
            let (d, _) = analyze("count_to.pl", prem, bits)?;
            check(d.report.proved(), format!("count_to not proved at {prem}/{bits}"))?;
            cells.push(format!("{prem}/{bits} +"));
        }
    }
    let (d, _) = analyze("stress_guards.pl", PremTemplate::Max2, 4)?;
    let status = d.report.summary_status();
    check(status == Some(CandidateStatus::EncodingTooLarge), format!("stress_guards max2/4: {status:?}"))?;
    Ok(format!("count_to [{}], stress_guards max2/4 OS", cells.join(", ")))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut pairs, mut positives) = (0, 0);
    while pairs < 2000 {
        let (a, b) = random_atom_pair(&mut rng);
        pairs += 1;
        if is_moded_more_general(&a, &b) {
            positives += 1;
            let depth = a.depth().max(b.depth());
            check(
                brute_force_more_general(&a, &b, 2, depth + 2),
                format!("counterexample: {} vs {}", a.moded(), b.moded()),
            )?;
        }
    }
    check(positives >= 100, format!("only {positives} positive pairs"))?;
    Ok(format!("{pairs} pairs, {positives} positive, 0 counterexamples"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut summary = Vec::new();
    for prem in [PremTemplate::Linear, PremTemplate::Max2] {
        for name in ["count_to.pl", "constants.pl", "eq_plus.pl"] {
            let (d, _) = analyze(name, prem, 3)?;
            check(!d.solved.is_empty(), format!("{name} {prem} has no solved candidate"))?;
            for s in &d.solved {
                let (violations, held) = sample_implications(s, 200, &mut rng);
                check(violations == 0, format!("{name} {prem}: {violations} violations"))?;
                summary.push(format!("{name} {prem} {} implications, {held} non-vacuous", s.branch.implications.len()));
            }
        }
    }
    Ok(summary.join("; "))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut sat = 0;
    for i in 0..50 {
        let n = rng.gen_range(1..=4);
        let sys = random_system(&mut rng, n);
        let (cnf, vm) = encode(&sys, 3, DEFAULT_CLAUSE_BUDGET).map_err(|e| e.to_string())?;
        let result = solve_cnf(&cnf, None);
        let expected = exhaustive_model(&sys, n);
        check(
            result.model().is_some() == expected.is_some(),
            format!("system {i}: verdict differs from exhaustive search"),
        )?;
        if let Some(a) = result.model() {
            sat += 1;
            check(check_model(&sys, &decode(a, &vm)), format!("system {i}: model fails check"))?;
        }
    }
    Ok(format!("50 systems, {sat} satisfiable, all verdicts agree"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cfg = TreeConfig::default();
    let mut max_nodes = 0;
    for i in 0..200 {
        let program = random_program(&mut rng);
        let atom = random_query_atom(&mut rng);
        let query = ModedQuery { source_text: atom.to_string(), atom };
        let tree = catch_unwind(AssertUnwindSafe(|| build_tree(&program, &query, cfg)))
            .map_err(|_| format!("program {i} panicked:\n{program}"))?;
        check(tree.nodes.len() <= cfg.node_cap, format!("program {i}: {} nodes", tree.nodes.len()))?;
        max_nodes = max_nodes.max(tree.nodes.len());
    }
    Ok(format!("200 programs, largest tree {max_nodes} nodes"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("count_to reproduction", criterion_1),
        ("constants reproduction", criterion_2),
        ("eq_plus pure logic", criterion_3),
        ("negative controls", criterion_4),
        ("settings grid", criterion_5),
        ("moded-more-general oracle agreement", criterion_6),
        ("implication sampling soundness", criterion_7),
        ("SAT backend equivalence", criterion_8),
        ("tree finiteness", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
