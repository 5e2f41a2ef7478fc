//! Genetic algorithm over operand-pair chromosomes.
//!
//! A chromosome is an [`OperandPair`], viewed either as two integers (for
//! the arithmetic operators) or as the `2n`-bit string `x ‖ y` (for the
//! binary operators). Each generation keeps `elitism_count` best individuals
//! and fills the rest by tournament selection, crossover with probability
//! `pc` and one mutation event with probability `pm`.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::microarch::{mask, ArithOp};
use crate::rng::{derive_seed, stream, StreamRng};
use crate::sensitivity::{
    fitness, pattern_fitness, sensitivity_matrix, OperandPair, SensitivityMatrix,
    MAX_OPERAND_BITS,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed CSV at line {line}: {message}")]
    Csv { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    /// Crossover probability per offspring.
    pub pc: f64,
    /// Mutation probability per offspring.
    pub pm: f64,
    /// Share of crossovers that are one-point binary (the rest are arithmetic).
    pub pc_binary_share: f64,
    /// Share of mutations that are bit inversions (the rest are arithmetic).
    pub pm_binary_share: f64,
    pub alpha: f64,
    pub delta: f64,
    pub operand_bits: u32,
    pub op: ArithOp,
    pub seed: u64,
    pub elitism_count: usize,
    pub tournament_size: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 100,
            generations: 40,
            pc: 0.8,
            pm: 0.01,
            pc_binary_share: 0.5,
            pm_binary_share: 0.5,
            alpha: 0.5,
            delta: 0.5,
            operand_bits: 32,
            op: ArithOp::Mul,
            seed: 0,
            elitism_count: 1,
            tournament_size: 2,
        }
    }
}

fn unit_interval(name: &str, v: f64) -> Result<(), GaError> {
    if !(0.0..=1.0).contains(&v) {
        return Err(GaError::InvalidConfig(format!("{name} = {v} outside [0, 1]")));
    }
    Ok(())
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), GaError> {
        unit_interval("pc", self.pc)?;
        unit_interval("pm", self.pm)?;
        unit_interval("pc_binary_share", self.pc_binary_share)?;
        unit_interval("pm_binary_share", self.pm_binary_share)?;
        unit_interval("alpha", self.alpha)?;
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(GaError::InvalidConfig(format!("delta = {} must be > 0", self.delta)));
        }
        if self.population_size < 2 {
            return Err(GaError::InvalidConfig("population_size must be >= 2".into()));
        }
        if self.generations == 0 {
            return Err(GaError::InvalidConfig("generations must be >= 1".into()));
        }
        if self.elitism_count >= self.population_size {
            return Err(GaError::InvalidConfig(
                "elitism_count must be smaller than population_size".into(),
            ));
        }
        if self.tournament_size == 0 {
            return Err(GaError::InvalidConfig("tournament_size must be >= 1".into()));
        }
        if self.operand_bits == 0 || self.operand_bits > MAX_OPERAND_BITS {
            return Err(GaError::InvalidConfig(format!(
                "operand_bits {} outside 1..={MAX_OPERAND_BITS}",
                self.operand_bits
            )));
        }
        Ok(())
    }

    /// Number of objective evaluations a full run performs (elites are cached
    /// but counted, so the figure is an upper bound).
    pub fn evaluation_budget(&self) -> usize {
        self.population_size * self.generations
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaIndividual {
    pub pair: OperandPair,
    /// Cached objective value.
    pub fitness_value: Option<f64>,
}

impl GaIndividual {
    pub fn new(pair: OperandPair) -> Self {
        GaIndividual {
            pair,
            fitness_value: None,
        }
    }

    fn score(&self) -> f64 {
        self.fitness_value.expect("individual evaluated")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Half-away-from-zero rounding, the single rounding rule used by the operators.
fn round_off(v: f64) -> u64 {
    v.round() as u64
}

/// α-blend of two parents, component by component, rounded and masked.
pub fn arithmetic_crossover(a: &OperandPair, b: &OperandPair, alpha: f64) -> OperandPair {
    assert_eq!(a.operand_bits(), b.operand_bits(), "parent widths differ");
    let blend = |u: u64, v: u64| round_off((1.0 - alpha) * u as f64 + alpha * v as f64);
    OperandPair::new(
        blend(a.x(), b.x()),
        blend(a.y(), b.y()),
        a.operand_bits(),
    )
    .expect("width already valid")
}

/// One-point crossover on `x ‖ y`: offspring 1 takes bits `[0, cut)` from `a`
/// and the rest from `b`; offspring 2 is the complement.
pub fn binary_crossover(
    a: &OperandPair,
    b: &OperandPair,
    cut: u32,
) -> Result<(OperandPair, OperandPair), GaError> {
    let bits = a.operand_bits();
    if b.operand_bits() != bits {
        return Err(GaError::InvalidArgument("parent widths differ".into()));
    }
    if cut == 0 || cut >= 2 * bits {
        return Err(GaError::InvalidArgument(format!(
            "cut {cut} outside 1..={}",
            2 * bits - 1
        )));
    }
    let low = mask(cut);
    let (ca, cb) = (a.concat(), b.concat());
    let o1 = ca & low | cb & !low;
    let o2 = cb & low | ca & !low;
    Ok((
        OperandPair::from_concat(o1, bits).expect("width already valid"),
        OperandPair::from_concat(o2, bits).expect("width already valid"),
    ))
}

fn perturb(v: u64, delta: f64, sign: Sign, bits: u32) -> u64 {
    let mut step = round_off(delta * v as f64);
    if step == 0 {
        step = 1;
    }
    let m = mask(bits);
    match sign {
        Sign::Plus => v.wrapping_add(step) & m,
        Sign::Minus => v.wrapping_sub(step) & m,
    }
}

/// `x ± round(Δ·x)`, `y ± round(Δ·y)`; a zero step becomes ±1 so that zero is
/// not a fixed point. Results wrap to the operand width.
pub fn arithmetic_mutation(a: &OperandPair, delta: f64, sign_x: Sign, sign_y: Sign) -> OperandPair {
    let bits = a.operand_bits();
    OperandPair::new(
        perturb(a.x(), delta, sign_x, bits),
        perturb(a.y(), delta, sign_y, bits),
        bits,
    )
    .expect("width already valid")
}

/// Inverts chromosome bit `bit` (bits `n..2n` address y).
pub fn binary_mutation(a: &OperandPair, bit: u32) -> Result<OperandPair, GaError> {
    if bit >= 2 * a.operand_bits() {
        return Err(GaError::InvalidArgument(format!(
            "bit {bit} outside 0..{}",
            2 * a.operand_bits()
        )));
    }
    Ok(a.flip(bit))
}

/// Best and mean objective of one generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
}

pub const HISTORY_HEADER: &str = "generation,best_fitness,mean_fitness";

/// `generation,best_fitness,mean_fitness` CSV.
pub fn history_to_csv(history: &[GenerationStats]) -> String {
    let mut out = String::from(HISTORY_HEADER);
    out.push('\n');
    for s in history {
        let _ = writeln!(out, "{},{},{}", s.generation, s.best_fitness, s.mean_fitness);
    }
    out
}

fn csv_rows(text: &str, header: &str) -> Result<Vec<(usize, Vec<String>)>, GaError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        _ => {
            return Err(GaError::Csv {
                line: 1,
                message: format!("expected header `{header}`"),
            })
        }
    }
    let width = header.split(',').count();
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
        if fields.len() != width {
            return Err(GaError::Csv {
                line: i + 1,
                message: format!("expected {width} fields"),
            });
        }
        rows.push((i + 1, fields));
    }
    Ok(rows)
}

fn field<T: std::str::FromStr>(line: usize, s: &str) -> Result<T, GaError> {
    s.parse().map_err(|_| GaError::Csv {
        line,
        message: format!("bad value `{s}`"),
    })
}

pub fn history_from_csv(text: &str) -> Result<Vec<GenerationStats>, GaError> {
    csv_rows(text, HISTORY_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            Ok(GenerationStats {
                generation: field(line, &f[0])?,
                best_fitness: field(line, &f[1])?,
                mean_fitness: field(line, &f[2])?,
            })
        })
        .collect()
}

pub const TEST_SET_HEADER: &str = "k,x,y";

/// `k,x,y` CSV with `k` counting from 1.
pub fn test_set_to_csv(patterns: &[OperandPair]) -> String {
    let mut out = String::from(TEST_SET_HEADER);
    out.push('\n');
    for (k, p) in patterns.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", k + 1, p.x(), p.y());
    }
    out
}

pub fn test_set_from_csv(text: &str, operand_bits: u32) -> Result<Vec<OperandPair>, GaError> {
    csv_rows(text, TEST_SET_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            let (x, y): (u64, u64) = (field(line, &f[1])?, field(line, &f[2])?);
            if (x | y) & !mask(operand_bits) != 0 {
                return Err(GaError::Csv {
                    line,
                    message: format!("operand exceeds {operand_bits} bits"),
                });
            }
            OperandPair::new(x, y, operand_bits).map_err(|e| GaError::Csv {
                line,
                message: e.to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaOutcome {
    pub best: GaIndividual,
    pub history: Vec<GenerationStats>,
}

fn random_pair(rng: &mut StreamRng, bits: u32) -> OperandPair {
    let m = mask(bits);
    OperandPair::new(rng.gen::<u64>() & m, rng.gen::<u64>() & m, bits).expect("width valid")
}

fn tournament(rng: &mut StreamRng, population: &[GaIndividual], size: usize) -> usize {
    let mut best = rng.gen_range(0..population.len());
    for _ in 1..size {
        let c = rng.gen_range(0..population.len());
        if population[c].score() > population[best].score() {
            best = c;
        }
    }
    best
}

fn breed(config: &GaConfig, rng: &mut StreamRng, population: &[GaIndividual]) -> GaIndividual {
    let p1 = population[tournament(rng, population, config.tournament_size)];
    let p2 = population[tournament(rng, population, config.tournament_size)];
    let mut child = p1;
    if rng.gen_bool(config.pc) {
        let pair = if rng.gen_bool(config.pc_binary_share) {
            let cut = rng.gen_range(1..2 * config.operand_bits);
            let (o1, o2) = binary_crossover(&p1.pair, &p2.pair, cut).expect("cut in range");
            if rng.gen_bool(0.5) {
                o1
            } else {
                o2
            }
        } else {
            arithmetic_crossover(&p1.pair, &p2.pair, config.alpha)
        };
        child = GaIndividual::new(pair);
    }
    if rng.gen_bool(config.pm) {
        let pair = if rng.gen_bool(config.pm_binary_share) {
            let bit = rng.gen_range(0..2 * config.operand_bits);
            binary_mutation(&child.pair, bit).expect("bit in range")
        } else {
            let sign = |plus: bool| if plus { Sign::Plus } else { Sign::Minus };
            let (sx, sy) = (sign(rng.gen_bool(0.5)), sign(rng.gen_bool(0.5)));
            arithmetic_mutation(&child.pair, config.delta, sx, sy)
        };
        child = GaIndividual::new(pair);
    }
    child
}

fn evaluate<F>(population: &mut [GaIndividual], objective: &F)
where
    F: Fn(&OperandPair) -> f64 + Sync,
{
    population.par_iter_mut().for_each(|ind| {
        if ind.fitness_value.is_none() {
            ind.fitness_value = Some(objective(&ind.pair));
        }
    });
}

/// Indices sorted by descending score, ties by position.
fn ranking(population: &[GaIndividual]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| population[b].score().total_cmp(&population[a].score()).then(a.cmp(&b)));
    order
}

/// Runs the generational loop against an arbitrary objective.
pub fn evolve_with<F>(config: &GaConfig, objective: F) -> Result<GaOutcome, GaError>
where
    F: Fn(&OperandPair) -> f64 + Sync,
{
    config.validate()?;
    let mut population: Vec<GaIndividual> = (0..config.population_size)
        .map(|slot| {
            let mut rng = stream(config.seed, "ga-init", 0, slot as u64);
            GaIndividual::new(random_pair(&mut rng, config.operand_bits))
        })
        .collect();
    let mut history = Vec::with_capacity(config.generations);
    let mut best: Option<GaIndividual> = None;
    for generation in 0..config.generations {
        evaluate(&mut population, &objective);
        let order = ranking(&population);
        let leader = population[order[0]];
        if best.is_none_or(|b| leader.score() > b.score()) {
            best = Some(leader);
        }
        let mean = population.iter().map(GaIndividual::score).sum::<f64>()
            / population.len() as f64;
        history.push(GenerationStats {
            generation,
            best_fitness: leader.score(),
            mean_fitness: mean,
        });
        if generation + 1 == config.generations {
            break;
        }
        let next: Vec<GaIndividual> = (0..config.population_size)
            .map(|slot| {
                if slot < config.elitism_count {
                    population[order[slot]]
                } else {
                    let mut rng = stream(config.seed, "ga-breed", generation as u64, slot as u64);
                    breed(config, &mut rng, &population)
                }
            })
            .collect();
        population = next;
    }
    Ok(GaOutcome {
        best: best.expect("at least one generation"),
        history,
    })
}

/// Evolves a single pattern maximizing the sensitivity fitness.
///
/// For DIV, pairs with a zero divisor score 0.
pub fn evolve(config: &GaConfig) -> Result<GaOutcome, GaError> {
    let op = config.op;
    evolve_with(config, move |pair| pattern_fitness(pair, op))
}

/// Best sensitivity fitness among `budget` uniformly random pairs.
pub fn random_search(config: &GaConfig, budget: usize) -> f64 {
    (0..budget)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(config.seed, "ga-random-search", 0, i as u64);
            pattern_fitness(&random_pair(&mut rng, config.operand_bits), config.op)
        })
        .reduce(|| 0.0, f64::max)
}

/// Greedily assembled multi-pattern test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSet {
    pub patterns: Vec<OperandPair>,
    /// Cumulative coverage after each pattern.
    pub coverage: Vec<f64>,
    /// Cell-wise union of the chosen patterns' matrices.
    pub union: SensitivityMatrix,
}

impl TestSet {
    pub fn final_coverage(&self) -> f64 {
        fitness(&self.union)
    }
}

/// Builds a test set one pattern per round, each round evolving the pattern
/// with the largest coverage gain over the patterns already chosen.
///
/// Stops once `target_coverage` is reached, after `max_patterns` patterns,
/// or when no pattern with positive gain is found.
pub fn generate_test_set(
    config: &GaConfig,
    target_coverage: f64,
    max_patterns: usize,
) -> Result<TestSet, GaError> {
    config.validate()?;
    unit_interval("target_coverage", target_coverage)
        .map_err(|e| GaError::InvalidArgument(e.to_string()))?;
    let bits = config.operand_bits;
    let op = config.op;
    let n = 2 * bits as usize;
    let mut union = SensitivityMatrix::zeros(n, crate::sensitivity::output_bits(op, bits));
    let total = union.total_cells() as f64;
    let mut set = TestSet {
        patterns: Vec::new(),
        coverage: Vec::new(),
        union: union.clone(),
    };
    let mut round = 0u64;
    while fitness(&union) < target_coverage && set.patterns.len() < max_patterns {
        let round_config = GaConfig {
            seed: derive_seed(config.seed, "test-set-round", round, 0),
            ..config.clone()
        };
        let current = &union;
        let outcome = evolve_with(&round_config, |pair| match sensitivity_matrix(pair, op) {
            Ok(m) => current.gain(&m) as f64 / total,
            Err(_) => 0.0,
        })?;
        if outcome.best.score() <= 0.0 {
            break;
        }
        let chosen = outcome.best.pair;
        union
            .union_with(&sensitivity_matrix(&chosen, op).expect("positive gain implies defined"))
            .expect("same shape");
        set.patterns.push(chosen);
        set.coverage.push(fitness(&union));
        round += 1;
    }
    set.union = union;
    Ok(set)
}
