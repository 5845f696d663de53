mod common;

use std::collections::HashSet;

use num_traits::{One, Zero};
use proptest::prelude::*;

use zerohalf::gf2::{enumerate_kernel, left_kernel, partition_kernel, BitMatrix, BitVector};
use zerohalf::halfclosure::{closure_from_cuts, generate_cuts, membership, HalfCut};
use zerohalf::lp::{maximize_row, solve_lp};
use zerohalf::polyhedra::{equal_polyhedra, integer_points, is_integral, reproduces_vertex, vertices};
use zerohalf::reduction::{cuts_implied, verify_claims, CheckStatus};
use zerohalf::redundancy::{irredundant_rows, remove_redundant};
use zerohalf::scalar::rational_from_i64;
use zerohalf::tdi::{is_tdi, reduction_dual_certificate};
use zerohalf::{Error, Graph, Inequality, Limits, LinearSystem, LpResult, Rational, ReductionInstance, Sense};

fn rational() -> impl Strategy<Value = Rational> {
    (-1_000_000i64..1_000_000, 1i64..1_000).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

/// Rows over `[-b, b]^n` plus random rows that keep the origin feasible.
fn bounded_system(max_vars: usize, max_rows: usize) -> impl Strategy<Value = LinearSystem> {
    (1..=max_vars).prop_flat_map(move |n| {
        (
            Just(n),
            1i64..4,
            prop::collection::vec((prop::collection::vec(-4i64..=4, n), 0i64..8), 0..=max_rows),
        )
            .prop_map(|(n, bound, extra)| {
                let mut sys = LinearSystem::new(n);
                for i in 0..n {
                    for sign in [1, -1] {
                        let mut c = vec![0; n];
                        c[i] = sign;
                        sys.push(Inequality::new(c, bound)).unwrap();
                    }
                }
                for (c, b) in extra {
                    sys.push(Inequality::new(c, b)).unwrap();
                }
                sys
            })
    })
}

/// Small systems inside the unit box, for cut validity against integer points.
fn box_system() -> impl Strategy<Value = LinearSystem> {
    (1usize..=3).prop_flat_map(|n| {
        prop::collection::vec((prop::collection::vec(-3i64..=3, n), -1i64..6), 1..=4).prop_map(move |extra| {
            let mut sys = LinearSystem::unit_box(n);
            for (c, b) in extra {
                sys.push(Inequality::new(c, b)).unwrap();
            }
            sys
        })
    })
}

fn bit_matrix() -> impl Strategy<Value = BitMatrix> {
    (1usize..=10, 1usize..=10).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(any::<bool>(), c), r).prop_map(move |rows| {
            BitMatrix::from_rows(rows.iter().map(|b| BitVector::from_bools(b)).collect(), c)
        })
    })
}

/// Per-row LP removal, the slow route the fast pipeline must agree with.
fn redundancy_by_lp(sys: &LinearSystem) -> LinearSystem {
    let mut alive: Vec<bool> = sys.rows().iter().map(|r| !r.is_trivial()).collect();
    for i in 0..sys.len() {
        if !alive[i] {
            continue;
        }
        let others: Vec<usize> = (0..sys.len()).filter(|&j| j != i && alive[j]).collect();
        if let LpResult::Optimal(opt) = maximize_row::<Rational>(&sys.select(&others), &sys.row(i).coeffs) {
            if opt.value <= rational_from_i64(sys.row(i).rhs) {
                alive[i] = false;
            }
        }
    }
    let keep: Vec<usize> = (0..sys.len()).filter(|&i| alive[i]).collect();
    sys.select(&keep)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rational_field_laws(a in rational(), b in rational()) {
        prop_assert_eq!((a.clone() + b.clone()) - b, a.clone());
        if !a.is_zero() {
            prop_assert!((a.clone() * (Rational::one() / a)).is_one());
        }
    }

    #[test]
    fn canonical_form_is_scale_invariant(coeffs in prop::collection::vec(-20i64..=20, 1..5), rhs in -20i64..=20, scale in 1i64..6) {
        let row = Inequality::new(coeffs.clone(), rhs);
        let scaled = Inequality::new(coeffs.iter().map(|c| c * scale).collect(), rhs * scale);
        prop_assert_eq!(row.canonicalize(), scaled.canonicalize());
        prop_assert!(row.same_halfspace(&scaled));
    }

    #[test]
    fn lp_optimum_certifies_itself(sys in bounded_system(4, 6), obj in prop::collection::vec(-5i64..=5, 4), maximize in any::<bool>()) {
        let objective: Vec<Rational> = obj[..sys.n_vars()].iter().map(|&c| rational_from_i64(c)).collect();
        let sense = if maximize { Sense::Maximize } else { Sense::Minimize };
        match solve_lp(&sys, &objective, sense) {
            LpResult::Optimal(opt) => prop_assert!(opt.certifies(&sys, &objective, sense)),
            other => prop_assert!(false, "bounded feasible system gave {:?}", other.status()),
        }
    }

    #[test]
    fn gf2_rank_nullity_and_enumeration(a in bit_matrix()) {
        let kernel = left_kernel(&a);
        prop_assert_eq!(a.rank() + kernel.dimension(), a.n_rows());
        prop_assert_eq!(a.transpose().rank(), a.rank());
        let all: Vec<BitVector> = enumerate_kernel(&kernel, 1 << 12).unwrap().collect();
        let distinct: HashSet<String> = all.iter().map(|t| t.to_string()).collect();
        prop_assert_eq!(all.len(), 1 << kernel.dimension());
        prop_assert_eq!(distinct.len(), all.len());
        prop_assert!(all.iter().all(|t| a.left_multiply(t).is_zero()));

        let mut parts: Vec<String> = Vec::new();
        for walk in partition_kernel(&kernel, 3, 1 << 12).unwrap() {
            parts.extend(walk.map(|t| t.to_string()));
        }
        let union: HashSet<String> = parts.iter().cloned().collect();
        prop_assert_eq!(parts.len(), all.len());
        prop_assert_eq!(union, distinct);
    }

    #[test]
    fn cuts_are_valid_and_the_closure_is_sandwiched(sys in box_system()) {
        let n = sys.n_vars();
        let points = integer_points(&sys, &vec![(0, 1); n], 1 << 10).unwrap();
        let family = generate_cuts(&sys, 1 << 12).unwrap();
        for cut in family.inequalities() {
            prop_assert!(points.points.iter().all(|p| cut.is_satisfied_by_integer(p)));
        }
        for (i, a) in family.cuts.iter().enumerate() {
            prop_assert_eq!(HalfCut::from_multiplier(&sys, &a.multiplier).map(|c| c.cut), Some(a.cut.clone()));
            for b in &family.cuts[i + 1..] {
                prop_assert!(!a.cut.same_halfspace(&b.cut));
            }
        }
        if points.is_empty() || family.closure_empty {
            return Ok(());
        }
        let closure = closure_from_cuts(&sys, &family);
        let poly = vertices::<Rational>(&closure).unwrap();
        for v in &poly.vertices {
            prop_assert!(sys.contains(v));
        }
        for p in &points.points {
            let x: Vec<Rational> = p.iter().map(|&v| rational_from_i64(v)).collect();
            prop_assert!(closure.contains(&x));
        }
        // integral exactly when every vertex is one of the integer points
        let all_integer = poly.vertices.iter().all(|v| {
            let p: Vec<i64> = v.iter().map(|x| i64::try_from(x.to_integer()).unwrap()).collect();
            v.iter().all(|x| x.is_integer()) && points.contains(&p)
        });
        prop_assert_eq!(is_integral(&closure, &poly).is_integral(), all_integer);
    }

    #[test]
    fn even_parity_multipliers_give_implied_rows(sys in box_system(), pick in any::<u64>()) {
        let kernel = left_kernel(&BitMatrix::coefficients_mod2(&sys));
        let mut t = BitVector::zeros(sys.len());
        for (i, b) in kernel.basis.iter().enumerate() {
            if pick >> (i % 64) & 1 == 1 {
                t.xor_assign(b);
            }
        }
        let (mut coeffs, mut rhs) = (vec![0i64; sys.n_vars()], 0i64);
        for i in t.ones() {
            coeffs.iter_mut().zip(&sys.row(i).coeffs).for_each(|(s, c)| *s += c);
            rhs += sys.row(i).rhs;
        }
        if rhs % 2 == 0 {
            let row = Inequality::new(coeffs.iter().map(|c| c / 2).collect(), rhs / 2);
            prop_assert!(cuts_implied(&[row], &sys));
        }
    }

    #[test]
    fn vertices_reproduce_from_their_bases(sys in bounded_system(3, 6)) {
        let poly = vertices::<Rational>(&sys).unwrap();
        prop_assert!(!poly.is_empty());
        for (i, v) in poly.vertices.iter().enumerate() {
            prop_assert!(sys.contains(v));
            prop_assert!(reproduces_vertex(&sys, v, &poly.basis(&sys, i)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn redundancy_removal_matches_the_lp_route(sys in bounded_system(3, 90)) {
        let fast = remove_redundant(&sys).unwrap();
        let slow = redundancy_by_lp(&sys);
        prop_assert!(equal_polyhedra(&fast, &sys).unwrap());
        prop_assert!(equal_polyhedra(&slow, &sys).unwrap());
        // an irredundant description is unique up to scaling for
        // full-dimensional polytopes, which these are (the origin is interior
        // unless some row has rhs 0)
        prop_assert!(redundancy_by_lp(&fast).len() == fast.len());
        if sys.rows().iter().all(|r| r.rhs > 0) {
            prop_assert_eq!(fast.len(), slow.len());
        }
    }
}

#[test]
fn empty_polyhedron_is_rejected_by_redundancy_removal() {
    let sys = LinearSystem::from_pairs(1, &[(&[1], 0), (&[-1], -1)]);
    assert_eq!(irredundant_rows(&sys), Err(Error::InfeasibleInput));
}

/// Reduction instances small enough for the generator comparison.
fn small_instances() -> Vec<ReductionInstance> {
    let mut out = Vec::new();
    for cg in common::corpus().into_iter().filter(|cg| cg.graph.n_nodes() + cg.graph.n_edges() <= 10) {
        for k in 2..=cg.graph.n_nodes() as i64 {
            out.push(ReductionInstance::build(&cg.graph, k).unwrap());
        }
    }
    out
}

#[test]
fn generated_and_parametrized_cuts_coincide() {
    for inst in small_instances() {
        let family = generate_cuts(&inst.system, 1 << 20).unwrap();
        let parametrized: Vec<Inequality> = inst
            .parametrized_cuts(1 << 20)
            .unwrap()
            .map(|pc| pc.cut)
            .filter(|c| !c.is_trivial())
            .collect();
        let unmatched_generated: Vec<Inequality> = family
            .inequalities()
            .filter(|c| !parametrized.iter().any(|p| p.same_halfspace(c)))
            .cloned()
            .collect();
        let unmatched_parametrized: Vec<Inequality> = parametrized
            .iter()
            .filter(|p| !family.inequalities().any(|c| c.same_halfspace(p)))
            .cloned()
            .collect();
        assert!(cuts_implied(&unmatched_generated, &inst.system), "{}", inst.graph);
        assert!(cuts_implied(&unmatched_parametrized, &inst.system), "{}", inst.graph);
    }
}

#[test]
fn structural_checks_hold_on_small_graphs() {
    let limits = Limits::default();
    for inst in small_instances() {
        for check in verify_claims(&inst.graph, inst.k, &limits).unwrap() {
            assert_ne!(check.status, CheckStatus::Fail, "{} k={}: {} {}", inst.graph, inst.k, check.name, check.detail);
        }
    }
}

#[test]
fn witness_is_member_exactly_without_a_large_stable_set() {
    for inst in small_instances() {
        let y = inst.witness_point();
        assert!(inst.system.contains(&y));
        let member = membership(&inst.system, &y, 1 << 20).unwrap().is_member();
        let oracle = zerohalf::reduction::decide_via_graph(&inst.graph, inst.k).unwrap();
        assert_eq!(member, !oracle, "{} k={}", inst.graph, inst.k);
    }
}

#[test]
fn tdi_agrees_with_integrality_where_checkable() {
    let mut checked = 0;
    for inst in small_instances() {
        let closure = zerohalf::halfclosure::closure_system(&inst.system, 1 << 20).unwrap();
        let reduced = remove_redundant(&closure).unwrap();
        let integral = is_integral(&reduced, &vertices::<Rational>(&reduced).unwrap()).is_integral();
        match is_tdi(&closure, 1 << 22) {
            Ok(v) => {
                assert_eq!(v.tdi, integral, "{} k={}", inst.graph, inst.k);
                checked += 1;
            }
            Err(Error::LimitExceeded { .. }) => assert!(integral),
            Err(e) => panic!("{e}"),
        }
        if integral {
            // the explicit dual stands in for the Hilbert checker here
            for c in [vec![1; inst.m], vec![-2; inst.m], (0..inst.m as i64).collect::<Vec<_>>()] {
                let cert = reduction_dual_certificate(&closure, &c).unwrap();
                assert!(cert.recombines(&closure) && cert.value_matches(&reduced));
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn tdi_systems_with_integral_rhs_are_integral() {
    let systems = [
        LinearSystem::unit_box(2),
        LinearSystem::from_pairs(2, &[(&[1, 1], 1), (&[-1, 0], 0), (&[0, -1], 0)]),
        LinearSystem::from_pairs(2, &[(&[1, 2], 3), (&[2, 1], 3), (&[-1, 0], 0), (&[0, -1], 0)]),
        LinearSystem::from_pairs(2, &[(&[1, 1], 2), (&[1, -1], 0), (&[-1, 0], 0), (&[0, -1], 0), (&[0, 1], 1)]),
    ];
    for sys in systems {
        let verdict = is_tdi(&sys, 1 << 20).unwrap();
        if verdict.tdi {
            assert!(is_integral(&sys, &vertices::<Rational>(&sys).unwrap()).is_integral());
        }
    }
}

#[test]
fn graph_text_round_trips() {
    for cg in common::corpus() {
        assert_eq!(Graph::parse_dimacs(&cg.graph.to_dimacs()).unwrap(), cg.graph);
        let inst = ReductionInstance::build(&cg.graph, 2).unwrap();
        assert_eq!(LinearSystem::parse(&inst.system.to_text()).unwrap(), inst.system);
    }
}
