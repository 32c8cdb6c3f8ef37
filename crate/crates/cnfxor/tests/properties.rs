//! Property tests over arbitrary (not just model-sampled) formulas and
//! assignments.

use proptest::prelude::*;

use cnfxor::dimacs::{emit_dimacs_x, parse_dimacs_x};
use cnfxor::geometry::enumerate_solutions;
use cnfxor::{
    solve, Assignment, CnfClause, CnfXorFormula, Literal, SolveStatus, SolverConfig, Var, XorClause,
};

fn arb_cnf_clause(n: u32) -> impl Strategy<Value = CnfClause> {
    proptest::sample::subsequence((1..=n).collect::<Vec<u32>>(), 0..=(n as usize)).prop_flat_map(
        |vars| {
            let len = vars.len();
            (Just(vars), proptest::collection::vec(any::<bool>(), len)).prop_map(|(vars, negs)| {
                let lits = vars
                    .into_iter()
                    .zip(negs)
                    .map(|(v, neg)| Literal::new(Var::new(v), neg))
                    .collect();
                CnfClause::new(lits).expect("subsequence variables are distinct")
            })
        },
    )
}

fn arb_xor_clause(n: u32) -> impl Strategy<Value = XorClause> {
    (
        proptest::sample::subsequence((1..=n).collect::<Vec<u32>>(), 0..=(n as usize)),
        any::<bool>(),
    )
        .prop_map(|(vars, rhs)| {
            XorClause::new(vars.into_iter().map(Var::new).collect(), rhs)
                .expect("subsequence variables are distinct")
        })
}

fn arb_formula(max_n: u32) -> impl Strategy<Value = CnfXorFormula> {
    (1..=max_n).prop_flat_map(|n| {
        (
            proptest::collection::vec(arb_cnf_clause(n), 0..6),
            proptest::collection::vec(arb_xor_clause(n), 0..6),
        )
            .prop_map(move |(cnf, xors)| {
                CnfXorFormula::new(n, cnf, xors).expect("variables sampled in range")
            })
    })
}

fn arb_assignment(n: u32) -> impl Strategy<Value = Assignment> {
    proptest::collection::vec(any::<bool>(), n as usize)
        .prop_map(|bits| Assignment::from_bools(&bits))
}

proptest! {
    #[test]
    fn dimacs_round_trip_is_identity(f in arb_formula(16)) {
        let text = emit_dimacs_x(&f);
        let parsed = parse_dimacs_x(&text).expect("emitted text parses");
        prop_assert_eq!(&parsed, &f);
        prop_assert_eq!(emit_dimacs_x(&parsed), text);
    }

    #[test]
    fn evaluate_ignores_clause_order(f in arb_formula(10), seed in any::<u64>()) {
        let a = Assignment::from_index(f.n(), seed & ((1 << f.n()) - 1));
        let mut cnf = f.cnf().to_vec();
        let mut xors = f.xors().to_vec();
        cnf.reverse();
        xors.reverse();
        let permuted = CnfXorFormula::new(f.n(), cnf, xors).unwrap();
        prop_assert_eq!(f.evaluate(&a), permuted.evaluate(&a));
    }

    #[test]
    fn hamming_is_a_metric(
        (a, b, c) in (1u32..=24).prop_flat_map(|n| (arb_assignment(n), arb_assignment(n), arb_assignment(n)))
    ) {
        let ab = a.hamming(&b).unwrap();
        let ba = b.hamming(&a).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert_eq!(a.hamming(&a).unwrap(), 0);
        prop_assert_eq!(ab == 0, a == b);
        let ac = a.hamming(&c).unwrap();
        let cb = c.hamming(&b).unwrap();
        prop_assert!(ab <= ac + cb);
    }

    #[test]
    fn xor_satisfaction_flips_only_on_member_variables(
        (clause, bits, flip) in (2u32..=12).prop_flat_map(|n| (
            arb_xor_clause(n),
            proptest::collection::vec(any::<bool>(), n as usize),
            0..n,
        ))
    ) {
        let mut a = Assignment::from_bools(&bits);
        let before = clause.is_satisfied_by(&a);
        a.flip_bit(flip as usize);
        let after = clause.is_satisfied_by(&a);
        let member = clause.vars().iter().any(|v| v.index() == flip as usize);
        prop_assert_eq!(before != after, member);
    }

    #[test]
    fn solver_agrees_with_enumeration(f in arb_formula(8), seed in any::<u64>()) {
        let result = solve(&f, &SolverConfig { timeout: None, seed });
        let sols = enumerate_solutions(&f, 1 << 8).unwrap();
        match result.status {
            SolveStatus::Sat => {
                prop_assert!(sols.count() > 0);
                let witness = result.witness.expect("SAT carries a witness");
                prop_assert_eq!(f.evaluate(&witness), Ok(true));
            }
            SolveStatus::Unsat => prop_assert_eq!(sols.count(), 0),
            SolveStatus::Timeout => prop_assert!(false, "timeout without a deadline"),
        }
    }
}
