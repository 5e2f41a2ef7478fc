//! Experiment orchestration: GA and GP runs, fault grading, width sweeps,
//! and replayable run manifests.
//!
//! [`execute`] computes every artifact in memory; [`run`] writes them plus a
//! `manifest.txt` holding the full configuration and a SHA-256 digest per
//! artifact. [`replay`] re-executes a manifest and compares digests.

mod config;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use config::{Detection, ExperimentConfig, Mode, NetlistSource};

use crate::evo_ga::{evolve, generate_test_set, history_to_csv, test_set_from_csv, test_set_to_csv};
use crate::evo_gp::evolve_gp;
use crate::microarch::run_operation;
use crate::netlist::{
    enumerate_faults, generate_alu_netlist, grade_test_set, parse_netlist, DetectionMode, GradeError, Netlist,
};
use crate::sensitivity::OperandPair;

pub const MANIFEST_NAME: &str = "manifest.txt";
pub const OUT_DIR_ENV: &str = "FBIST_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
    #[error("replay mismatch: {}", .0.join("; "))]
    Mismatch(Vec<String>),
}

impl HarnessError {
    /// Process exit status: 1 for validation errors, 2 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            HarnessError::Runtime(_) | HarnessError::Mismatch(_) => 2,
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Runtime(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn text(name: &str, text: String) -> Self {
        Artifact {
            name: name.into(),
            bytes: text.into_bytes(),
        }
    }

    pub fn digest(&self) -> String {
        Sha256::digest(&self.bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

/// Validates `config` and computes all artifacts of its mode.
pub fn execute(config: &ExperimentConfig) -> Result<(Vec<Artifact>, Vec<String>), HarnessError> {
    config.validate()?;
    match config.mode {
        Mode::Ga => run_ga(config),
        Mode::Gp => run_gp(config),
        Mode::Faultsim => run_faultsim(config),
        Mode::Sweep => run_sweep(config),
    }
}

fn run_ga(c: &ExperimentConfig) -> Result<(Vec<Artifact>, Vec<String>), HarnessError> {
    let ga = c.ga_config(c.operand_bits, c.seed);
    let outcome = evolve(&ga).map_err(runtime)?;
    let set = generate_test_set(&ga, c.target_coverage, c.max_patterns).map_err(runtime)?;
    let summary = vec![
        format!(
            "best pattern {} fitness {}",
            outcome.best.pair,
            outcome.best.fitness_value.unwrap_or(0.0)
        ),
        format!(
            "test set of {} patterns, coverage {}",
            set.patterns.len(),
            set.final_coverage()
        ),
    ];
    Ok((
        vec![
            Artifact::text("history.csv", history_to_csv(&outcome.history)),
            Artifact::text("test_set.csv", test_set_to_csv(&set.patterns)),
        ],
        summary,
    ))
}

fn run_gp(c: &ExperimentConfig) -> Result<(Vec<Artifact>, Vec<String>), HarnessError> {
    let outcome = evolve_gp(&c.gp_config()).map_err(runtime)?;
    let summary = vec![format!(
        "best program: {} ops, fitness {}",
        outcome.best.len(),
        outcome.best.fitness_value.unwrap_or(0.0)
    )];
    Ok((
        vec![
            Artifact::text("history.csv", history_to_csv(&outcome.history)),
            Artifact::text("best_program.txt", outcome.best.program.to_string()),
        ],
        summary,
    ))
}

fn load_netlist(c: &ExperimentConfig) -> Result<Netlist, HarnessError> {
    match c.netlist_source() {
        NetlistSource::Generated(w) => generate_alu_netlist(w).map_err(|e| HarnessError::Config(e.to_string())),
        NetlistSource::File(p) => {
            let text = fs::read_to_string(&p)
                .map_err(|e| HarnessError::Config(format!("cannot read netlist {}: {e}", p.display())))?;
            parse_netlist(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", p.display())))
        }
    }
}

fn grade_error(e: GradeError) -> HarnessError {
    match e {
        GradeError::InvalidConfiguration(m) => HarnessError::Config(m),
        other => runtime(other),
    }
}

fn run_faultsim(c: &ExperimentConfig) -> Result<(Vec<Artifact>, Vec<String>), HarnessError> {
    let netlist = load_netlist(c)?;
    let mut artifacts = Vec::new();
    let pairs: Vec<OperandPair> = match &c.test_set {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| HarnessError::Config(format!("cannot read test set {}: {e}", p.display())))?;
            test_set_from_csv(&text, c.operand_bits).map_err(|e| HarnessError::Config(e.to_string()))?
        }
        None => {
            let set = generate_test_set(&c.ga_config(c.operand_bits, c.seed), c.target_coverage, c.max_patterns)
                .map_err(runtime)?;
            artifacts.push(Artifact::text("test_set.csv", test_set_to_csv(&set.patterns)));
            set.patterns
        }
    };
    let faults = enumerate_faults(&netlist, c.collapse_faults);
    let mut modes = Vec::new();
    if c.detection != Detection::Signature {
        modes.push(("coverage.csv", DetectionMode::Direct));
    }
    if c.detection != Detection::Direct {
        let name = if c.detection == Detection::Both { "coverage_signature.csv" } else { "coverage.csv" };
        modes.push((name, DetectionMode::Signature(c.misr()?)));
    }
    let mut summary = vec![format!(
        "{} gates, {} faults, {} patterns",
        netlist.gate_count(),
        faults.len(),
        pairs.len()
    )];
    for (name, mode) in modes {
        let report = grade_test_set(&netlist, &pairs, c.op, &faults, mode).map_err(grade_error)?;
        summary.push(format!("{name}: final FC {}%", report.final_coverage()));
        artifacts.push(Artifact::text(name, report.to_csv()));
    }
    Ok((artifacts, summary))
}

/// One (width, seed) cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct SweepCell {
    width: u32,
    seed: u64,
    covered: u64,
    total: u64,
    patterns: usize,
    cycles: u64,
}

pub const SWEEP_HEADER: &str = "operand_bits,final_coverage,test_length";
pub const SWEEP_CELLS_HEADER: &str = "operand_bits,seed,final_coverage,test_length,patterns";

fn sweep_cell(c: &ExperimentConfig, width: u32, seed: u64) -> Result<SweepCell, HarnessError> {
    let set = generate_test_set(&c.ga_config(width, seed), c.target_coverage, c.max_patterns).map_err(runtime)?;
    let mut cycles = 0u64;
    for p in &set.patterns {
        cycles += run_operation(c.op, p.x(), p.y(), width).map_err(runtime)?.trace.len() as u64;
    }
    Ok(SweepCell {
        width,
        seed,
        covered: set.union.covered_cells(),
        total: set.union.total_cells(),
        patterns: set.patterns.len(),
        cycles,
    })
}

/// Each width is run with seeds `seed, seed + 1, ...`; rows hold the mean
/// coverage and mean test length (in cycles) over those runs.
fn run_sweep(c: &ExperimentConfig) -> Result<(Vec<Artifact>, Vec<String>), HarnessError> {
    let keys: Vec<(u32, u64)> = c
        .sweep_widths
        .iter()
        .flat_map(|&w| (0..c.sweep_seeds as u64).map(move |i| (w, c.seed.wrapping_add(i))))
        .collect();
    let cells: Vec<SweepCell> = keys
        .par_iter()
        .map(|&(w, s)| sweep_cell(c, w, s))
        .collect::<Result<_, _>>()?;
    let mut rows = format!("{SWEEP_HEADER}\n");
    let mut detail = format!("{SWEEP_CELLS_HEADER}\n");
    for cell in &cells {
        detail.push_str(&format!(
            "{},{},{},{},{}\n",
            cell.width,
            cell.seed,
            cell.covered as f64 / cell.total as f64,
            cell.cycles,
            cell.patterns
        ));
    }
    let mut summary = Vec::new();
    for &w in &c.sweep_widths {
        let group: Vec<&SweepCell> = cells.iter().filter(|x| x.width == w).collect();
        let n = group.len() as u64;
        let covered: u64 = group.iter().map(|x| x.covered).sum();
        let cycles: u64 = group.iter().map(|x| x.cycles).sum();
        let coverage = covered as f64 / (group[0].total * n) as f64;
        let length = cycles as f64 / n as f64;
        rows.push_str(&format!("{w},{coverage},{length}\n"));
        summary.push(format!("{w} bits: coverage {coverage}, test length {length}"));
    }
    Ok((
        vec![Artifact::text("sweep.csv", rows), Artifact::text("sweep_cells.csv", detail)],
        summary,
    ))
}

/// Manifest text: the full configuration followed by output digests.
pub fn manifest_text(config: &ExperimentConfig, artifacts: &[Artifact]) -> String {
    let mut s = format!("# fbist run manifest\n[config]\n{}[outputs]\n", config.to_text());
    for a in artifacts {
        s.push_str(&format!("{} = {}\n", a.name, a.digest()));
    }
    s
}

/// Splits a manifest into its configuration and `(file, digest)` list.
pub fn parse_manifest(text: &str) -> Result<(ExperimentConfig, Vec<(String, String)>), HarnessError> {
    let malformed = |m: &str| HarnessError::Config(format!("malformed manifest: {m}"));
    let body = text
        .split_once("[config]")
        .ok_or_else(|| malformed("missing [config] section"))?
        .1;
    let (config_text, outputs_text) = body
        .split_once("[outputs]")
        .ok_or_else(|| malformed("missing [outputs] section"))?;
    let config = ExperimentConfig::parse(config_text, Mode::Ga)?;
    let mut outputs = Vec::new();
    for line in outputs_text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (name, digest) = line
            .split_once('=')
            .ok_or_else(|| malformed(&format!("bad output line `{line}`")))?;
        outputs.push((name.trim().to_string(), digest.trim().to_string()));
    }
    Ok((config, outputs))
}

/// Validates, executes and writes all outputs plus the manifest to
/// `config.out_dir`. On failure nothing written by this run is left behind.
pub fn run(config: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let mut config = config.clone();
    let cwd = std::env::current_dir().map_err(runtime)?;
    config.resolve_paths(&cwd);
    let (artifacts, summary) = execute(&config)?;
    let manifest = Artifact::text(MANIFEST_NAME, manifest_text(&config, &artifacts));
    let dir = config.out_dir.clone();
    let created = !dir.exists();
    let mut written = Vec::new();
    let result = (|| {
        fs::create_dir_all(&dir)?;
        for a in artifacts.iter().chain(std::iter::once(&manifest)) {
            let path = dir.join(&a.name);
            written.push(path.clone());
            fs::write(&path, &a.bytes)?;
        }
        Ok::<_, std::io::Error>(())
    })();
    if let Err(e) = result {
        for p in &written {
            let _ = fs::remove_file(p);
        }
        if created {
            let _ = fs::remove_dir_all(&dir);
        }
        return Err(HarnessError::Runtime(format!("writing {}: {e}", dir.display())));
    }
    Ok(RunReport {
        out_dir: dir,
        files: written,
        summary,
    })
}

/// Re-executes the run described by a manifest and checks every output
/// against its recorded digest.
pub fn replay(manifest: &Path) -> Result<Vec<String>, HarnessError> {
    let text = fs::read_to_string(manifest)
        .map_err(|e| HarnessError::Config(format!("cannot read manifest {}: {e}", manifest.display())))?;
    let (config, recorded) = parse_manifest(&text)?;
    let (artifacts, _) = execute(&config)?;
    let mut problems = Vec::new();
    for (name, digest) in &recorded {
        match artifacts.iter().find(|a| &a.name == name) {
            None => problems.push(format!("{name} not produced")),
            Some(a) if &a.digest() != digest => problems.push(format!("{name} differs")),
            Some(_) => {}
        }
    }
    for a in &artifacts {
        if !recorded.iter().any(|(n, _)| n == &a.name) {
            problems.push(format!("{} not in manifest", a.name));
        }
    }
    if problems.is_empty() {
        Ok(recorded.into_iter().map(|(n, _)| n).collect())
    } else {
        Err(HarnessError::Mismatch(problems))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(mode: Mode) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(mode);
        c.operand_bits = 4;
        c.ga.population_size = 10;
        c.ga.generations = 4;
        c.max_patterns = 3;
        c
    }

    #[test]
    fn faultsim_with_no_patterns_is_header_only() {
        let mut c = small(Mode::Faultsim);
        c.max_patterns = 0;
        c.detection = Detection::Direct;
        let (artifacts, _) = execute(&c).unwrap();
        let cov = artifacts.iter().find(|a| a.name == "coverage.csv").unwrap();
        assert_eq!(String::from_utf8(cov.bytes.clone()).unwrap(), "k,operand1,operand2,result,N_k,N,FC\n");
    }

    #[test]
    fn manifest_round_trip_and_tamper() {
        let c = small(Mode::Gp);
        let (artifacts, _) = execute(&c).unwrap();
        let text = manifest_text(&c, &artifacts);
        let (parsed, outputs) = parse_manifest(&text).unwrap();
        assert_eq!(parsed, c);
        assert_eq!(outputs.len(), 2);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(MANIFEST_NAME);
        fs::write(&path, &text).unwrap();
        assert!(replay(&path).is_ok());
        fs::write(&path, text.replace("\nseed = 0", "\nseed = 1")).unwrap();
        assert!(matches!(replay(&path), Err(HarnessError::Mismatch(_))));
    }

    #[test]
    fn sweep_rows_are_means_of_cells() {
        let mut c = small(Mode::Sweep);
        c.sweep_widths = vec![2, 3];
        c.sweep_seeds = 3;
        let (artifacts, _) = execute(&c).unwrap();
        let sweep = String::from_utf8(artifacts[0].bytes.clone()).unwrap();
        assert_eq!(sweep.lines().count(), 3);
        let cells = String::from_utf8(artifacts[1].bytes.clone()).unwrap();
        assert_eq!(cells.lines().count(), 7);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(HarnessError::Config(String::new()).exit_code(), 1);
        assert_eq!(HarnessError::Runtime(String::new()).exit_code(), 2);
    }
}
