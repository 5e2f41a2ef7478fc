mod common;

use common::*;
use fbist::bits::Bits;
use fbist::evo_ga::{generate_test_set, GaConfig};
use fbist::microarch::{run_operation, ArithOp};
use fbist::netlist::{
    enumerate_faults, fault_simulate, generate_alu_netlist, good_simulate, grade_test_set, parse_netlist,
    DetectionMode,
};
use fbist::rng::stream;
use fbist::sensitivity::{fitness, sensitivity_matrix, OperandPair, SensitivityMatrix};
use fbist::signature::{compress_responses, MisrState, PRIMITIVE_POLY_8};
use rand::Rng;

#[test]
fn sensitivity_matches_brute_force() {
    for n in 1..=4u32 {
        for op in [ArithOp::Mul, ArithOp::Div] {
            for x in 0..1u64 << n {
                for y in 0..1u64 << n {
                    let pair = OperandPair::new(x, y, n).unwrap();
                    match (brute_sensitivity(x, y, n, op), sensitivity_matrix(&pair, op)) {
                        (None, Err(_)) => {}
                        (Some(cells), Ok(m)) => {
                            for (i, row) in cells.iter().enumerate() {
                                for (j, c) in row.iter().enumerate() {
                                    assert_eq!(m.get(i, j), *c, "{op} {pair} cell ({i},{j})");
                                }
                            }
                            assert_eq!(fitness(&m), brute_fitness(&cells), "{op} {pair}");
                        }
                        (b, l) => panic!("{op} {pair}: oracle {b:?} library {l:?}"),
                    }
                }
            }
        }
    }
}

#[test]
fn sensitivity_reference_value() {
    let m = sensitivity_matrix(&OperandPair::new(3, 3, 2).unwrap(), ArithOp::Mul).unwrap();
    assert_eq!(fitness(&m), 0.75);
    assert_eq!(brute_fitness(&brute_sensitivity(3, 3, 2, ArithOp::Mul).unwrap()), 0.75);
}

#[test]
fn microprograms_exhaustive() {
    for w in 1..=6u32 {
        for x in 0..1u64 << w {
            for y in 0..1u64 << w {
                let mul = run_operation(ArithOp::Mul, x, y, w).unwrap();
                assert_eq!(mul.result(ArithOp::Mul), (x * y) as u128, "{x}*{y} w{w}");
                let div = run_operation(ArithOp::Div, x, y, w);
                match (x.checked_div(y), x.checked_rem(y)) {
                    (Some(q), Some(r)) => {
                        let div = div.unwrap();
                        assert_eq!(div.result(ArithOp::Div), q as u128, "{x}/{y} w{w}");
                        assert_eq!(div.remainder(), r, "{x}%{y} w{w}");
                    }
                    _ => assert!(div.is_err()),
                }
            }
        }
    }
}

#[test]
fn microprograms_sampled_wide() {
    for w in [8u32, 16, 32] {
        let mut rng = stream(5, "wide", w as u64, 0);
        let m = (1u64 << w) - 1;
        for _ in 0..200 {
            let (x, y) = (rng.gen::<u64>() & m, (rng.gen::<u64>() & m).max(1));
            let mul = run_operation(ArithOp::Mul, x, y, w).unwrap();
            assert_eq!(mul.result(ArithOp::Mul), x as u128 * y as u128);
            let div = run_operation(ArithOp::Div, x, y, w).unwrap();
            assert_eq!((div.result(ArithOp::Div), div.remainder()), ((x / y) as u128, x % y));
        }
    }
}

fn all_patterns(k: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1u64 << k).map(move |v| (0..k).map(|i| v >> i & 1 == 1).collect())
}

#[test]
fn ripple_adder_fault_list_and_simulation() {
    let n = parse_netlist(RIPPLE_ADDER_2).unwrap();
    assert_eq!((n.primary_inputs().len(), n.primary_outputs().len()), (5, 3));
    // 15 nets give 30 stem faults; a0 a1 b0 b1 cin x0 x1 c1 each feed two
    // gates, adding 8 * 2 * 2 = 32 branch faults
    let faults = enumerate_faults(&n, false);
    assert_eq!(faults.len(), 62);
    let mut detected = 0;
    for f in &faults {
        let mut hit = false;
        for p in all_patterns(5) {
            let bits: Bits = p.clone().into();
            let lib: Vec<bool> = fault_simulate(&n, f, &bits).unwrap().iter().collect();
            assert_eq!(lib, eval_injected(&n, &p, Some(f)), "{}", f.describe(&n));
            hit |= lib != eval_injected(&n, &p, None);
        }
        detected += hit as usize;
    }
    assert_eq!(detected, 62, "the ripple adder has no redundant faults");
    for p in all_patterns(5) {
        let v: u64 = p.iter().enumerate().map(|(i, b)| (*b as u64) << i).sum();
        let (a, b, c) = (v & 3, v >> 2 & 3, v >> 4);
        let out = good_simulate(&n, &p.into()).unwrap();
        assert_eq!(out.field(0, 3), a + b + c);
    }
}

#[test]
fn collapsed_faults_preserve_exhaustive_coverage() {
    let n = parse_netlist(RIPPLE_ADDER_2).unwrap();
    let collapsed = enumerate_faults(&n, true);
    assert!(collapsed.len() < 62);
    for f in &collapsed {
        assert!(all_patterns(5).any(|p| eval_injected(&n, &p, Some(f)) != eval_injected(&n, &p, None)));
    }
}

#[test]
fn bit_parallel_matches_oracle_on_alu() {
    let n = generate_alu_netlist(3).unwrap();
    let faults = enumerate_faults(&n, false);
    let mut rng = stream(2, "patterns", 0, 0);
    let patterns: Vec<Vec<bool>> = (0..64).map(|_| (0..10).map(|_| rng.gen()).collect()).collect();
    let words: Vec<u64> = (0..10)
        .map(|i| patterns.iter().enumerate().map(|(p, s)| (s[i] as u64) << p).sum())
        .collect();
    for f in faults.iter().step_by(7) {
        let out = n.simulate_words(&words, Some(f));
        for (p, s) in patterns.iter().enumerate() {
            let expect = eval_injected(&n, s, Some(f));
            let got: Vec<bool> = out.iter().map(|w| w >> p & 1 == 1).collect();
            assert_eq!(got, expect, "{} pattern {p}", f.describe(&n));
        }
    }
}

#[test]
fn alu_grading_matches_oracle() {
    let n = generate_alu_netlist(4).unwrap();
    let faults = enumerate_faults(&n, false);
    let mut rng = stream(1, "pairs", 0, 0);
    let pairs: Vec<OperandPair> = (0..8)
        .map(|_| OperandPair::new(rng.gen_range(0..16), rng.gen_range(1..16), 4).unwrap())
        .collect();
    for op in [ArithOp::Mul, ArithOp::Div] {
        let report = grade_test_set(&n, &pairs, op, &faults, DetectionMode::Direct).unwrap();
        let fc: Vec<f64> = report.rows.iter().map(|r| r.fc).collect();
        assert_eq!(fc, oracle_fc(&n, &pairs, op, &faults), "{op}");
    }
}

#[test]
fn greedy_test_set_reaches_exhaustive_union() {
    let mut union = SensitivityMatrix::zeros(4, 4);
    for x in 0..4 {
        for y in 0..4 {
            union.union_with(&sensitivity_matrix(&OperandPair::new(x, y, 2).unwrap(), ArithOp::Mul).unwrap()).unwrap();
        }
    }
    let best = fitness(&union);
    let config = GaConfig { operand_bits: 2, seed: 4, ..Default::default() };
    let set = generate_test_set(&config, 1.0, 16).unwrap();
    assert_eq!(set.final_coverage(), best);
    assert!(set.patterns.len() <= 16);
}

fn stream8(rng: &mut impl Rng, len: usize) -> Vec<u64> {
    (0..len).map(|_| rng.gen::<u64>() & 0xFF).collect()
}

fn sig(words: &[u64], s0: &MisrState) -> u64 {
    let bits: Vec<Bits> = words.iter().map(|w| Bits::from_u64(*w, 8)).collect();
    compress_responses(&bits, s0).state()
}

#[test]
fn misr_is_linear_with_zero_seed() {
    let s0 = MisrState::new(8, PRIMITIVE_POLY_8, 0).unwrap();
    let mut rng = stream(8, "misr", 0, 0);
    for _ in 0..1000 {
        let len = rng.gen_range(1..64);
        let (a, b) = (stream8(&mut rng, len), stream8(&mut rng, len));
        let x: Vec<u64> = a.iter().zip(&b).map(|(p, q)| p ^ q).collect();
        assert_eq!(sig(&a, &s0) ^ sig(&b, &s0), sig(&x, &s0));
    }
}

#[test]
fn misr_catches_every_single_bit_error() {
    let s0 = MisrState::new(8, PRIMITIVE_POLY_8, 0).unwrap();
    let mut rng = stream(8, "misr", 1, 0);
    let good = stream8(&mut rng, 255);
    let reference = sig(&good, &s0);
    let mut aliased = 0;
    for t in 0..255 {
        for b in 0..8 {
            let mut bad = good.clone();
            bad[t] ^= 1 << b;
            aliased += (sig(&bad, &s0) == reference) as usize;
        }
    }
    assert_eq!(aliased, 0);
}
