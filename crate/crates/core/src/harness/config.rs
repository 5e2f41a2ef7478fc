//! Flat `key = value` experiment configuration.
//!
//! Blank lines and `#` comments are ignored. Every key is optional and
//! unknown keys are rejected. [`ExperimentConfig::to_text`] writes every key
//! explicitly, so its output parses back to the same configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::evo_ga::GaConfig;
use crate::evo_gp::{GpConfig, GpObjective};
use crate::microarch::ArithOp;
use crate::netlist::MAX_ALU_WIDTH;
use crate::sensitivity::MAX_OPERAND_BITS;
use crate::signature::{parse_polynomial, MisrState, DEFAULT_POLYNOMIAL, DEFAULT_WIDTH};

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Ga,
    Gp,
    Faultsim,
    Sweep,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Ga => "ga",
            Mode::Gp => "gp",
            Mode::Faultsim => "faultsim",
            Mode::Sweep => "sweep",
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ga" => Ok(Mode::Ga),
            "gp" => Ok(Mode::Gp),
            "faultsim" => Ok(Mode::Faultsim),
            "sweep" => Ok(Mode::Sweep),
            _ => Err(format!("unknown mode `{s}` (ga, gp, faultsim or sweep)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetlistSource {
    /// Generated ALU with the given width.
    Generated(u32),
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detection {
    Direct,
    Signature,
    Both,
}

impl FromStr for Detection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "direct" => Ok(Detection::Direct),
            "signature" => Ok(Detection::Signature),
            "both" => Ok(Detection::Both),
            _ => Err(format!("unknown detection `{s}` (direct, signature or both)")),
        }
    }
}

impl Detection {
    fn name(self) -> &'static str {
        match self {
            Detection::Direct => "direct",
            Detection::Signature => "signature",
            Detection::Both => "both",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub seed: u64,
    pub operand_bits: u32,
    pub op: ArithOp,
    pub out_dir: PathBuf,
    /// GA parameters; its seed, width and operation are taken from the fields above.
    pub ga: GaConfig,
    /// GP parameters; seed, width, operation, population size, generations,
    /// tournament size and elitism are taken from the shared settings.
    pub gp: GpConfig,
    pub target_coverage: f64,
    pub max_patterns: usize,
    pub netlist: NetlistSource,
    pub test_set: Option<PathBuf>,
    pub detection: Detection,
    pub collapse_faults: bool,
    pub misr_width: u32,
    pub misr_polynomial: u64,
    pub misr_seed: u64,
    pub sweep_widths: Vec<u32>,
    pub sweep_seeds: usize,
}

impl ExperimentConfig {
    pub fn new(mode: Mode) -> Self {
        ExperimentConfig {
            mode,
            seed: 0,
            operand_bits: 32,
            op: ArithOp::Mul,
            out_dir: PathBuf::from("fbist-out"),
            ga: GaConfig::default(),
            gp: GpConfig::default(),
            target_coverage: 0.9,
            max_patterns: 16,
            netlist: NetlistSource::Generated(0),
            test_set: None,
            detection: Detection::Both,
            collapse_faults: false,
            misr_width: DEFAULT_WIDTH,
            misr_polynomial: DEFAULT_POLYNOMIAL,
            misr_seed: 0,
            sweep_widths: vec![4, 8, 16, 32],
            sweep_seeds: 10,
        }
    }

    /// GA configuration for `operand_bits` and `seed`.
    pub fn ga_config(&self, operand_bits: u32, seed: u64) -> GaConfig {
        GaConfig {
            operand_bits,
            seed,
            op: self.op,
            ..self.ga.clone()
        }
    }

    pub fn gp_config(&self) -> GpConfig {
        GpConfig {
            operand_bits: self.operand_bits,
            seed: self.seed,
            op: self.op,
            population_size: self.ga.population_size,
            generations: self.ga.generations,
            tournament_size: self.ga.tournament_size,
            elitism_count: self.ga.elitism_count,
            ..self.gp.clone()
        }
    }

    /// Width of the generated netlist; 0 in the source means `operand_bits`.
    pub fn netlist_source(&self) -> NetlistSource {
        match &self.netlist {
            NetlistSource::Generated(0) => NetlistSource::Generated(self.operand_bits),
            other => other.clone(),
        }
    }

    pub fn misr(&self) -> Result<MisrState, HarnessError> {
        MisrState::new(self.misr_width, self.misr_polynomial, self.misr_seed)
            .map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Checks parameter ranges and that referenced files exist.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let config = |m: String| HarnessError::Config(m);
        if self.operand_bits == 0 || self.operand_bits > MAX_OPERAND_BITS {
            return Err(config(format!("operand_bits {} outside 1..={MAX_OPERAND_BITS}", self.operand_bits)));
        }
        if !(0.0..=1.0).contains(&self.target_coverage) {
            return Err(config(format!("target_coverage {} outside [0, 1]", self.target_coverage)));
        }
        match self.mode {
            Mode::Ga => self.ga_config(self.operand_bits, self.seed).validate().map_err(|e| config(e.to_string()))?,
            Mode::Gp => self.gp_config().validate().map_err(|e| config(e.to_string()))?,
            Mode::Faultsim => {
                match self.netlist_source() {
                    NetlistSource::Generated(w) => {
                        if w != self.operand_bits || w > MAX_ALU_WIDTH {
                            return Err(config(format!(
                                "generated netlist width {w} must equal operand_bits and be at most {MAX_ALU_WIDTH}"
                            )));
                        }
                    }
                    NetlistSource::File(p) => require_file(&p, "netlist")?,
                }
                match &self.test_set {
                    Some(p) => require_file(p, "test_set")?,
                    None => self.ga_config(self.operand_bits, self.seed).validate().map_err(|e| config(e.to_string()))?,
                }
                if self.detection != Detection::Direct {
                    self.misr()?;
                }
            }
            Mode::Sweep => {
                if self.sweep_widths.is_empty() || self.sweep_seeds == 0 {
                    return Err(config("sweep needs at least one width and one seed".into()));
                }
                for &w in &self.sweep_widths {
                    self.ga_config(w, self.seed).validate().map_err(|e| config(e.to_string()))?;
                }
            }
        }
        Ok(())
    }

    /// Parses configuration text; missing keys keep their defaults.
    pub fn parse(text: &str, default_mode: Mode) -> Result<Self, HarnessError> {
        let mut c = ExperimentConfig::new(default_mode);
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| HarnessError::Config(format!("line {}: {m}", i + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, found `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            c.set(key, value).map_err(err)?;
        }
        Ok(c)
    }

    pub fn load(path: &Path, default_mode: Mode) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, default_mode)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "mode" => self.mode = v.parse()?,
            "seed" => self.seed = num(key, v)?,
            "operand_bits" => self.operand_bits = num(key, v)?,
            "op" => self.op = v.parse()?,
            "out_dir" => self.out_dir = PathBuf::from(v),
            "population_size" => self.ga.population_size = num(key, v)?,
            "generations" => self.ga.generations = num(key, v)?,
            "tournament_size" => self.ga.tournament_size = num(key, v)?,
            "elitism_count" => self.ga.elitism_count = num(key, v)?,
            "pc" => self.ga.pc = num(key, v)?,
            "pm" => self.ga.pm = num(key, v)?,
            "pc_binary_share" => self.ga.pc_binary_share = num(key, v)?,
            "pm_binary_share" => self.ga.pm_binary_share = num(key, v)?,
            "alpha" => self.ga.alpha = num(key, v)?,
            "delta" => self.ga.delta = num(key, v)?,
            "gp_pc" => self.gp.pc = num(key, v)?,
            "gp_pm" => self.gp.pm = num(key, v)?,
            "gp_min_len" => self.gp.min_len = num(key, v)?,
            "gp_max_len" => self.gp.max_len = num(key, v)?,
            "gp_register_count" => self.gp.register_count = num(key, v)?,
            "gp_literal_range" => {
                self.gp.literal_range = if v == "full" { None } else { Some(num(key, v)?) }
            }
            "gp_eval_pairs" => self.gp.eval_pairs = num(key, v)?,
            "gp_objective" => self.gp.objective = v.parse::<GpObjective>()?,
            "target_coverage" => self.target_coverage = num(key, v)?,
            "max_patterns" => self.max_patterns = num(key, v)?,
            "netlist" => {
                self.netlist = if v == "generated" {
                    NetlistSource::Generated(0)
                } else if let Some(w) = v.strip_prefix("generated:") {
                    NetlistSource::Generated(num(key, w)?)
                } else {
                    NetlistSource::File(PathBuf::from(v))
                }
            }
            "test_set" => self.test_set = (v != "generated").then(|| PathBuf::from(v)),
            "detection" => self.detection = v.parse()?,
            "collapse_faults" => self.collapse_faults = num(key, v)?,
            "misr_width" => self.misr_width = num(key, v)?,
            "misr_polynomial" => self.misr_polynomial = parse_polynomial(v).map_err(|e| e.to_string())?,
            "misr_seed" => self.misr_seed = num(key, v)?,
            "sweep_widths" => {
                self.sweep_widths = v
                    .split(',')
                    .map(|w| num(key, w.trim()))
                    .collect::<Result<_, _>>()?
            }
            "sweep_seeds" => self.sweep_seeds = num(key, v)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Full configuration with every key written out.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("mode", self.mode.name().into());
        kv("seed", self.seed.to_string());
        kv("operand_bits", self.operand_bits.to_string());
        kv("op", self.op.to_string());
        kv("out_dir", self.out_dir.display().to_string());
        kv("population_size", self.ga.population_size.to_string());
        kv("generations", self.ga.generations.to_string());
        kv("tournament_size", self.ga.tournament_size.to_string());
        kv("elitism_count", self.ga.elitism_count.to_string());
        kv("pc", self.ga.pc.to_string());
        kv("pm", self.ga.pm.to_string());
        kv("pc_binary_share", self.ga.pc_binary_share.to_string());
        kv("pm_binary_share", self.ga.pm_binary_share.to_string());
        kv("alpha", self.ga.alpha.to_string());
        kv("delta", self.ga.delta.to_string());
        kv("gp_pc", self.gp.pc.to_string());
        kv("gp_pm", self.gp.pm.to_string());
        kv("gp_min_len", self.gp.min_len.to_string());
        kv("gp_max_len", self.gp.max_len.to_string());
        kv("gp_register_count", self.gp.register_count.to_string());
        kv(
            "gp_literal_range",
            self.gp.literal_range.map_or("full".into(), |r| r.to_string()),
        );
        kv("gp_eval_pairs", self.gp.eval_pairs.to_string());
        kv("gp_objective", self.gp.objective.to_string());
        kv("target_coverage", self.target_coverage.to_string());
        kv("max_patterns", self.max_patterns.to_string());
        kv(
            "netlist",
            match &self.netlist {
                NetlistSource::Generated(0) => "generated".into(),
                NetlistSource::Generated(w) => format!("generated:{w}"),
                NetlistSource::File(p) => p.display().to_string(),
            },
        );
        kv(
            "test_set",
            self.test_set.as_ref().map_or("generated".into(), |p| p.display().to_string()),
        );
        kv("detection", self.detection.name().into());
        kv("collapse_faults", self.collapse_faults.to_string());
        kv("misr_width", self.misr_width.to_string());
        kv("misr_polynomial", format!("0x{:x}", self.misr_polynomial));
        kv("misr_seed", self.misr_seed.to_string());
        let widths: Vec<String> = self.sweep_widths.iter().map(u32::to_string).collect();
        kv("sweep_widths", widths.join(","));
        kv("sweep_seeds", self.sweep_seeds.to_string());
        s
    }

    /// Makes relative file references absolute against `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let abs = |p: &PathBuf| if p.is_absolute() { p.clone() } else { base.join(p) };
        if let NetlistSource::File(p) = &self.netlist {
            self.netlist = NetlistSource::File(abs(p));
        }
        self.test_set = self.test_set.as_ref().map(abs);
    }
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("invalid value `{v}` for `{key}`"))
}

fn require_file(p: &Path, key: &str) -> Result<(), HarnessError> {
    if p.is_file() {
        Ok(())
    } else {
        Err(HarnessError::Config(format!("{key} file {} does not exist", p.display())))
    }
}
