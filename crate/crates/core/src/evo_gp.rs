//! Linear genetic programming over microoperation sequences.
//!
//! An individual is a variable-length [`MicroProgram`]. Offspring come from
//! tournament selection and two-point segment exchange; mutation replaces
//! one field of one microoperation. The default objective rewards programs
//! that drive many distinct stimuli onto the ALU across a set of operand
//! pairs; a fault-coverage objective on the generated ALU netlist is
//! available as an alternative.

use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::evo_ga::GenerationStats;
use crate::microarch::{
    execute, mask, MicroOp, MicroProgram, Opcode, Operand, RegisterFile, OPCODE_BITS,
};
use crate::netlist::{enumerate_faults, generate_alu_netlist, Fault, Netlist, MAX_ALU_WIDTH};
use crate::rng::{stream, StreamRng};
use crate::sensitivity::OperandPair;
use crate::microarch::ArithOp;

/// Maximum segment draws before crossover falls back to copying the parents.
pub const CROSSOVER_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GpError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpObjective {
    /// Distinct ALU input vectors per executed cycle.
    Diversity,
    /// Fraction of stuck-at faults of the generated ALU detected by the trace.
    FaultCoverage,
}

impl std::str::FromStr for GpObjective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "diversity" => Ok(GpObjective::Diversity),
            "fault_coverage" => Ok(GpObjective::FaultCoverage),
            _ => Err(format!("unknown GP objective `{s}` (diversity or fault_coverage)")),
        }
    }
}

impl std::fmt::Display for GpObjective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GpObjective::Diversity => "diversity",
            GpObjective::FaultCoverage => "fault_coverage",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpConfig {
    pub population_size: usize,
    pub generations: usize,
    pub pc: f64,
    pub pm: f64,
    pub min_len: usize,
    pub max_len: usize,
    pub tournament_size: usize,
    pub register_count: usize,
    /// Literals are drawn from `[0, literal_range)`; `None` means `[0, 2^operand_bits)`.
    pub literal_range: Option<u64>,
    pub operand_bits: u32,
    pub op: ArithOp,
    pub seed: u64,
    /// Operand pairs each program is evaluated on.
    pub eval_pairs: usize,
    pub elitism_count: usize,
    pub objective: GpObjective,
}

impl Default for GpConfig {
    fn default() -> Self {
        GpConfig {
            population_size: 100,
            generations: 40,
            pc: 0.8,
            pm: 0.1,
            min_len: 16,
            max_len: 32,
            tournament_size: 2,
            register_count: 8,
            literal_range: None,
            operand_bits: 8,
            op: ArithOp::Mul,
            seed: 0,
            eval_pairs: 8,
            elitism_count: 1,
            objective: GpObjective::Diversity,
        }
    }
}

impl GpConfig {
    pub fn validate(&self) -> Result<(), GpError> {
        let bad = |m: String| Err(GpError::InvalidConfig(m));
        for (name, p) in [("pc", self.pc), ("pm", self.pm)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} outside [0, 1]"));
            }
        }
        if self.min_len == 0 || self.min_len > self.max_len {
            return bad(format!("need 1 <= min_len <= max_len, got {}..{}", self.min_len, self.max_len));
        }
        if self.register_count < 4 {
            return bad(format!("register_count {} below 4", self.register_count));
        }
        if self.population_size < 2 {
            return bad("population_size must be >= 2".into());
        }
        if self.generations == 0 {
            return bad("generations must be >= 1".into());
        }
        if self.tournament_size == 0 {
            return bad("tournament_size must be >= 1".into());
        }
        if self.elitism_count >= self.population_size {
            return bad("elitism_count must be smaller than population_size".into());
        }
        if self.operand_bits == 0 || self.operand_bits > 32 {
            return bad(format!("operand_bits {} outside 1..=32", self.operand_bits));
        }
        if let Some(r) = self.literal_range {
            if r == 0 || r - 1 > mask(self.operand_bits) {
                return bad(format!("literal_range {r} outside 1..=2^{}", self.operand_bits));
            }
        }
        if self.eval_pairs == 0 {
            return bad("eval_pairs must be >= 1".into());
        }
        if self.objective == GpObjective::FaultCoverage && self.operand_bits > MAX_ALU_WIDTH {
            return bad(format!(
                "fault_coverage objective needs operand_bits <= {MAX_ALU_WIDTH}"
            ));
        }
        Ok(())
    }

    fn literal_bound(&self) -> u64 {
        self.literal_range.unwrap_or(mask(self.operand_bits).wrapping_add(1))
    }

    /// Size of the src2 domain: registers followed by literals.
    fn src2_domain(&self) -> u64 {
        let lits = self.literal_bound();
        // 2^32 literals at most, so this never overflows
        self.register_count as u64 + if lits == 0 { 1 << 32 } else { lits }
    }

    fn src2_from_index(&self, i: u64) -> Operand {
        let r = self.register_count as u64;
        if i < r {
            Operand::Reg(i as usize)
        } else {
            Operand::Lit(i - r)
        }
    }

    fn src2_index(&self, o: Operand) -> u64 {
        match o {
            Operand::Reg(r) => r as u64,
            Operand::Lit(v) => self.register_count as u64 + v,
        }
    }

    pub fn evaluation_budget(&self) -> usize {
        self.population_size * self.generations
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpIndividual {
    pub program: MicroProgram,
    pub fitness_value: Option<f64>,
}

impl GpIndividual {
    pub fn new(program: MicroProgram) -> Self {
        GpIndividual {
            program,
            fitness_value: None,
        }
    }

    pub fn len(&self) -> usize {
        self.program.len()
    }

    pub fn is_empty(&self) -> bool {
        self.program.is_empty()
    }

    fn score(&self) -> f64 {
        self.fitness_value.expect("individual evaluated")
    }
}

fn random_op(config: &GpConfig, rng: &mut StreamRng) -> MicroOp {
    let opcode = Opcode::ALL[rng.gen_range(0..Opcode::ALL.len())];
    let dest = rng.gen_range(0..config.register_count);
    let src1 = rng.gen_range(0..config.register_count);
    let src2 = config.src2_from_index(rng.gen_range(0..config.src2_domain()));
    MicroOp::new(opcode, dest, src1, src2)
}

/// Random program with length uniform in `[min_len, max_len]`.
pub fn random_program(config: &GpConfig, rng: &mut StreamRng) -> GpIndividual {
    let len = rng.gen_range(config.min_len..=config.max_len);
    GpIndividual::new(MicroProgram::new((0..len).map(|_| random_op(config, rng)).collect()))
}

/// Exchanges `p1[seg1]` with `p2[seg2]`.
pub fn two_point_crossover(
    p1: &GpIndividual,
    p2: &GpIndividual,
    seg1: (usize, usize),
    seg2: (usize, usize),
) -> Result<(GpIndividual, GpIndividual), GpError> {
    let ((i1, j1), (i2, j2)) = (seg1, seg2);
    if i1 > j1 || j1 > p1.len() || i2 > j2 || j2 > p2.len() {
        return Err(GpError::InvalidArgument(format!(
            "segments [{i1},{j1}) / [{i2},{j2}) invalid for lengths {} / {}",
            p1.len(),
            p2.len()
        )));
    }
    let (a, b) = (&p1.program.ops, &p2.program.ops);
    let splice = |x: &[MicroOp], i, j, y: &[MicroOp]| -> Vec<MicroOp> {
        x[..i].iter().chain(y).chain(&x[j..]).copied().collect()
    };
    let o1 = splice(a, i1, j1, &b[i2..j2]);
    let o2 = splice(b, i2, j2, &a[i1..j1]);
    Ok((
        GpIndividual::new(MicroProgram::new(o1)),
        GpIndividual::new(MicroProgram::new(o2)),
    ))
}

fn random_segment(rng: &mut StreamRng, len: usize) -> (usize, usize) {
    let a = rng.gen_range(0..=len);
    let b = rng.gen_range(0..=len);
    (a.min(b), a.max(b))
}

/// Crossover with uniformly drawn segments; offspring outside the length
/// bounds trigger a redraw, and after [`CROSSOVER_ATTEMPTS`] failures the
/// parents are returned unchanged.
pub fn crossover_with_repair(
    p1: &GpIndividual,
    p2: &GpIndividual,
    config: &GpConfig,
    rng: &mut StreamRng,
) -> (GpIndividual, GpIndividual) {
    let fits = |ind: &GpIndividual| (config.min_len..=config.max_len).contains(&ind.len());
    for _ in 0..CROSSOVER_ATTEMPTS {
        let s1 = random_segment(rng, p1.len());
        let s2 = random_segment(rng, p2.len());
        let (o1, o2) = two_point_crossover(p1, p2, s1, s2).expect("segments drawn in range");
        if fits(&o1) && fits(&o2) {
            return (o1, o2);
        }
    }
    (p1.clone(), p2.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpField {
    Opcode,
    Dest,
    Src1,
    Src2,
}

impl OpField {
    pub const ALL: [OpField; 4] = [OpField::Opcode, OpField::Dest, OpField::Src1, OpField::Src2];
}

/// Uniform draw from `0..n` excluding `old`.
fn draw_other(rng: &mut StreamRng, n: u64, old: u64) -> u64 {
    let v = rng.gen_range(0..n - 1);
    if v >= old {
        v + 1
    } else {
        v
    }
}

/// Replaces one field of the op at `position` with a different valid value.
pub fn mutate_gp(
    ind: &GpIndividual,
    position: usize,
    field: OpField,
    config: &GpConfig,
    rng: &mut StreamRng,
) -> Result<GpIndividual, GpError> {
    if position >= ind.len() {
        return Err(GpError::InvalidArgument(format!(
            "position {position} outside program of length {}",
            ind.len()
        )));
    }
    let mut program = ind.program.clone();
    let op = &mut program.ops[position];
    let regs = config.register_count as u64;
    match field {
        OpField::Opcode => {
            let i = draw_other(rng, Opcode::ALL.len() as u64, op.opcode.code() as u64);
            op.opcode = Opcode::ALL[i as usize];
        }
        OpField::Dest => op.dest = draw_other(rng, regs, op.dest as u64) as usize,
        OpField::Src1 => op.src1 = draw_other(rng, regs, op.src1 as u64) as usize,
        OpField::Src2 => {
            let i = draw_other(rng, config.src2_domain(), config.src2_index(op.src2));
            op.src2 = config.src2_from_index(i);
        }
    }
    Ok(GpIndividual::new(program))
}

fn dedup(pairs: &[OperandPair]) -> Vec<OperandPair> {
    let mut seen = HashSet::new();
    pairs.iter().copied().filter(|p| seen.insert(*p)).collect()
}

fn load(config: &GpConfig, pair: &OperandPair) -> RegisterFile {
    RegisterFile::with_values(config.register_count, config.operand_bits, &[pair.x(), pair.y()])
        .expect("validated register file shape")
}

/// Stimulus diversity: distinct ALU input vectors over all cycles of all
/// (deduplicated) pairs, divided by the total cycle count. A pair whose run
/// fails contributes its cycles with no distinct vectors.
pub fn gp_fitness(ind: &GpIndividual, pairs: &[OperandPair], config: &GpConfig) -> f64 {
    let width = config.operand_bits;
    let mut distinct: HashSet<u128> = HashSet::new();
    let mut total = 0usize;
    for pair in dedup(pairs) {
        match execute(&ind.program, &load(config, &pair)) {
            Ok((_, trace)) => {
                total += trace.len();
                for c in trace.cycles() {
                    let key = c.opcode.code() as u128
                        | (c.src1 as u128) << OPCODE_BITS
                        | (c.src2 as u128) << (OPCODE_BITS + width);
                    distinct.insert(key);
                }
            }
            Err(_) => total += ind.len(),
        }
    }
    if total == 0 {
        0.0
    } else {
        distinct.len() as f64 / total as f64
    }
}

/// Fault-grading context for the alternative objective.
#[derive(Debug, Clone)]
pub struct FaultTarget {
    pub netlist: Netlist,
    pub faults: Vec<Fault>,
}

impl FaultTarget {
    pub fn for_width(width: u32) -> Result<Self, GpError> {
        let netlist =
            generate_alu_netlist(width).map_err(|e| GpError::InvalidConfig(e.to_string()))?;
        let faults = enumerate_faults(&netlist, false);
        Ok(FaultTarget { netlist, faults })
    }
}

/// Fraction of `target` faults detected (direct observation) by the traces
/// of the program over `pairs`.
pub fn fault_coverage_fitness(
    ind: &GpIndividual,
    pairs: &[OperandPair],
    config: &GpConfig,
    target: &FaultTarget,
) -> f64 {
    let n = &target.netlist;
    let mut blocks: Vec<(Vec<u64>, u64)> = Vec::new();
    let mut stimuli = Vec::new();
    for pair in dedup(pairs) {
        if let Ok((_, trace)) = execute(&ind.program, &load(config, &pair)) {
            stimuli.extend((0..trace.len()).map(|c| trace.input_bits(c)));
        }
    }
    if target.faults.is_empty() {
        return 1.0;
    }
    for chunk in stimuli.chunks(64) {
        let mut words = vec![0u64; n.primary_inputs().len()];
        for (p, s) in chunk.iter().enumerate() {
            for (i, b) in s.iter().enumerate() {
                words[i] |= (b as u64) << p;
            }
        }
        let valid = if chunk.len() == 64 { !0 } else { (1u64 << chunk.len()) - 1 };
        blocks.push((words, valid));
    }
    let goods: Vec<Vec<u64>> = blocks.iter().map(|(w, _)| n.simulate_words(w, None)).collect();
    let detected = target
        .faults
        .iter()
        .filter(|f| {
            blocks.iter().zip(&goods).any(|((w, valid), good)| {
                n.simulate_words(w, Some(f))
                    .iter()
                    .zip(good)
                    .any(|(a, b)| (a ^ b) & valid != 0)
            })
        })
        .count();
    detected as f64 / target.faults.len() as f64
}

/// Operand pairs a run evaluates programs on, fixed by the seed. DIV runs
/// never draw a zero divisor.
pub fn evaluation_pairs(config: &GpConfig) -> Vec<OperandPair> {
    let m = mask(config.operand_bits);
    (0..config.eval_pairs)
        .map(|i| {
            let mut rng = stream(config.seed, "gp-pairs", 0, i as u64);
            let x = rng.gen::<u64>() & m;
            let y = loop {
                let y = rng.gen::<u64>() & m;
                if config.op == ArithOp::Mul || y != 0 {
                    break y;
                }
            };
            OperandPair::new(x, y, config.operand_bits).expect("width validated")
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpOutcome {
    pub best: GpIndividual,
    pub history: Vec<GenerationStats>,
}

struct Evaluator {
    config: GpConfig,
    pairs: Vec<OperandPair>,
    target: Option<FaultTarget>,
}

impl Evaluator {
    fn new(config: &GpConfig) -> Result<Self, GpError> {
        let target = match config.objective {
            GpObjective::Diversity => None,
            GpObjective::FaultCoverage => Some(FaultTarget::for_width(config.operand_bits)?),
        };
        Ok(Evaluator {
            config: config.clone(),
            pairs: evaluation_pairs(config),
            target,
        })
    }

    fn score(&self, ind: &GpIndividual) -> f64 {
        match &self.target {
            None => gp_fitness(ind, &self.pairs, &self.config),
            Some(t) => fault_coverage_fitness(ind, &self.pairs, &self.config, t),
        }
    }
}

fn tournament(rng: &mut StreamRng, population: &[GpIndividual], size: usize) -> usize {
    let mut best = rng.gen_range(0..population.len());
    for _ in 1..size {
        let c = rng.gen_range(0..population.len());
        if population[c].score() > population[best].score() {
            best = c;
        }
    }
    best
}

fn breed(config: &GpConfig, rng: &mut StreamRng, population: &[GpIndividual]) -> GpIndividual {
    let p1 = &population[tournament(rng, population, config.tournament_size)];
    let p2 = &population[tournament(rng, population, config.tournament_size)];
    let mut child = p1.clone();
    if rng.gen_bool(config.pc) {
        let (o1, o2) = crossover_with_repair(p1, p2, config, rng);
        child = if rng.gen_bool(0.5) { o1 } else { o2 };
    }
    if rng.gen_bool(config.pm) {
        let position = rng.gen_range(0..child.len());
        let field = OpField::ALL[rng.gen_range(0..OpField::ALL.len())];
        child = mutate_gp(&child, position, field, config, rng).expect("position in range");
    }
    child
}

/// Generational loop with elitism, tournament selection, two-point
/// crossover and field mutation.
pub fn evolve_gp(config: &GpConfig) -> Result<GpOutcome, GpError> {
    config.validate()?;
    let evaluator = Evaluator::new(config)?;
    let mut population: Vec<GpIndividual> = (0..config.population_size)
        .map(|slot| random_program(config, &mut stream(config.seed, "gp-init", 0, slot as u64)))
        .collect();
    let mut history = Vec::with_capacity(config.generations);
    let mut best: Option<GpIndividual> = None;
    for generation in 0..config.generations {
        population.par_iter_mut().for_each(|ind| {
            if ind.fitness_value.is_none() {
                ind.fitness_value = Some(evaluator.score(ind));
            }
        });
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| {
            population[b].score().total_cmp(&population[a].score()).then(a.cmp(&b))
        });
        let leader = &population[order[0]];
        if best.as_ref().is_none_or(|b| leader.score() > b.score()) {
            best = Some(leader.clone());
        }
        let mean = population.iter().map(GpIndividual::score).sum::<f64>() / population.len() as f64;
        history.push(GenerationStats {
            generation,
            best_fitness: leader.score(),
            mean_fitness: mean,
        });
        if generation + 1 == config.generations {
            break;
        }
        population = (0..config.population_size)
            .into_par_iter()
            .map(|slot| {
                if slot < config.elitism_count {
                    population[order[slot]].clone()
                } else {
                    let mut rng = stream(config.seed, "gp-breed", generation as u64, slot as u64);
                    breed(config, &mut rng, &population)
                }
            })
            .collect();
    }
    Ok(GpOutcome {
        best: best.expect("at least one generation"),
        history,
    })
}

/// Best objective among `budget` random programs, scored like [`evolve_gp`].
pub fn random_program_search(config: &GpConfig, budget: usize) -> Result<f64, GpError> {
    config.validate()?;
    let evaluator = Evaluator::new(config)?;
    Ok((0..budget)
        .into_par_iter()
        .map(|i| {
            let ind = random_program(config, &mut stream(config.seed, "gp-random-search", 0, i as u64));
            evaluator.score(&ind)
        })
        .reduce(|| 0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::microarch::Opcode::*;

    fn ind(ops: Vec<MicroOp>) -> GpIndividual {
        GpIndividual::new(MicroProgram::new(ops))
    }

    fn tagged(n: usize) -> Vec<MicroOp> {
        (0..n).map(|i| MicroOp::lit(Add, 2, 0, i as u64)).collect()
    }

    #[test]
    fn random_program_lengths_and_closure() {
        let config = GpConfig { min_len: 5, max_len: 5, register_count: 6, ..Default::default() };
        for slot in 0..50 {
            let p = random_program(&config, &mut stream(1, "t", 0, slot));
            assert_eq!(p.len(), 5);
            assert!(p.program.validate(6, config.operand_bits).is_ok());
        }
        let a = random_program(&config, &mut stream(9, "t", 0, 0));
        let b = random_program(&config, &mut stream(9, "t", 0, 0));
        assert_eq!(a, b);
    }

    #[test]
    fn crossover_definition_trace() {
        let ops = tagged(7);
        let (a, b, c, d, e, f, g) = (ops[0], ops[1], ops[2], ops[3], ops[4], ops[5], ops[6]);
        let p1 = ind(vec![a, b, c, d]);
        let p2 = ind(vec![e, f, g]);
        let (o1, o2) = two_point_crossover(&p1, &p2, (1, 3), (0, 2)).unwrap();
        assert_eq!(o1.program.ops, vec![a, e, f, d]);
        assert_eq!(o2.program.ops, vec![b, c, g]);
        let (s1, s2) = two_point_crossover(&p1, &p2, (2, 2), (1, 1)).unwrap();
        assert_eq!((s1.program, s2.program), (p1.program.clone(), p2.program.clone()));
        assert!(two_point_crossover(&p1, &p2, (3, 2), (0, 0)).is_err());
        assert!(two_point_crossover(&p1, &p2, (0, 5), (0, 0)).is_err());
    }

    #[test]
    fn repaired_crossover_respects_bounds() {
        let config = GpConfig { min_len: 3, max_len: 5, ..Default::default() };
        let p1 = ind(tagged(5));
        let p2 = ind(tagged(3));
        for slot in 0..200 {
            let (o1, o2) = crossover_with_repair(&p1, &p2, &config, &mut stream(3, "x", 0, slot));
            assert!((3..=5).contains(&o1.len()) && (3..=5).contains(&o2.len()));
            assert_eq!(o1.len() + o2.len(), 8);
        }
    }

    #[test]
    fn mutation_changes_exactly_one_field() {
        let config = GpConfig { register_count: 4, literal_range: Some(4), ..Default::default() };
        let p = ind(vec![MicroOp::reg(Mov, 1, 2, 3)]);
        for (slot, field) in OpField::ALL.iter().enumerate() {
            for k in 0..20 {
                let m = mutate_gp(&p, 0, *field, &config, &mut stream(5, "m", slot as u64, k)).unwrap();
                let (old, new) = (p.program.ops[0], m.program.ops[0]);
                assert_eq!(m.len(), 1);
                let diffs = [old.opcode != new.opcode, old.dest != new.dest, old.src1 != new.src1, old.src2 != new.src2];
                assert_eq!(diffs.iter().filter(|d| **d).count(), 1);
                assert!(diffs[slot]);
                assert!(m.program.validate(4, config.operand_bits).is_ok());
            }
        }
        assert!(mutate_gp(&p, 1, OpField::Dest, &config, &mut stream(0, "m", 0, 0)).is_err());
    }

    #[test]
    fn diversity_examples() {
        let config = GpConfig::default();
        let pair = OperandPair::new(3, 5, 8).unwrap();
        let idle = ind(vec![MicroOp::reg(Mov, 0, 0, 0); 6]);
        assert_eq!(gp_fitness(&idle, &[pair], &config), 1.0 / 6.0);
        let varied = ind(tagged(6));
        assert_eq!(gp_fitness(&varied, &[pair], &config), 1.0);
        assert_eq!(gp_fitness(&varied, &[pair, pair], &config), gp_fitness(&varied, &[pair], &config));
    }

    #[test]
    fn failing_pair_contributes_nothing() {
        let config = GpConfig::default();
        let mut program = MicroProgram::new(tagged(4));
        program.divisor = Some(1);
        program.ops[0] = MicroOp::reg(Add, 2, 0, 1);
        let p = GpIndividual::new(program);
        let ok = OperandPair::new(3, 5, 8).unwrap();
        let zero = OperandPair::new(3, 0, 8).unwrap();
        assert_eq!(gp_fitness(&p, &[zero], &config), 0.0);
        assert_eq!(gp_fitness(&p, &[ok, zero], &config), 0.5);
    }

    #[test]
    fn evolve_gp_deterministic_and_elitist() {
        let config = GpConfig { population_size: 20, generations: 10, seed: 11, ..Default::default() };
        let a = evolve_gp(&config).unwrap();
        assert_eq!(a, evolve_gp(&config).unwrap());
        for w in a.history.windows(2) {
            assert!(w[1].best_fitness >= w[0].best_fitness);
        }
        assert!((config.min_len..=config.max_len).contains(&a.best.len()));
    }

    #[test]
    fn fault_coverage_objective_runs() {
        let config = GpConfig {
            population_size: 6,
            generations: 2,
            operand_bits: 3,
            objective: GpObjective::FaultCoverage,
            ..Default::default()
        };
        let out = evolve_gp(&config).unwrap();
        let f = out.best.fitness_value.unwrap();
        assert!(f > 0.0 && f <= 1.0);
        let too_wide = GpConfig { operand_bits: 16, ..config };
        assert!(too_wide.validate().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(GpConfig::default().validate().is_ok());
        assert!(GpConfig { min_len: 0, ..Default::default() }.validate().is_err());
        assert!(GpConfig { min_len: 9, max_len: 8, ..Default::default() }.validate().is_err());
        assert!(GpConfig { register_count: 3, ..Default::default() }.validate().is_err());
        assert!(GpConfig { literal_range: Some(257), ..Default::default() }.validate().is_err());
    }
}
