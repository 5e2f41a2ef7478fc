use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fbist::evo_ga::{history_from_csv, test_set_from_csv};
use fbist::microarch::MicroProgram;
use fbist::netlist::CoverageReport;

fn fbist(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fbist"))
        .args(args)
        .current_dir(cwd)
        .env_remove("FBIST_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const SMALL: &str = "operand_bits = 4\npopulation_size = 16\ngenerations = 5\nmax_patterns = 4\n";

#[test]
fn ga_run_then_replay() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "ga.cfg", SMALL);
    let o = fbist(&["ga", "--config", "ga.cfg", "--seed", "3", "--out", "run"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("run");
    let history = fs::read_to_string(out.join("history.csv")).unwrap();
    assert_eq!(history_from_csv(&history).unwrap().len(), 5);
    let set = fs::read_to_string(out.join("test_set.csv")).unwrap();
    assert!(!test_set_from_csv(&set, 4).unwrap().is_empty());
    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("\nseed = 3\n"));

    let o = fbist(&["replay", "run/manifest.txt"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn replay_detects_altered_manifest() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "ga.cfg", SMALL);
    assert_eq!(code(&fbist(&["ga", "--config", "ga.cfg", "--out", "run"], dir.path())), 0);
    let manifest = fs::read_to_string(dir.path().join("run/manifest.txt")).unwrap();
    for (from, to) in [("\nseed = 0\n", "\nseed = 9\n"), ("population_size = 16", "population_size = 17")] {
        assert!(manifest.contains(from));
        fs::write(dir.path().join("altered.txt"), manifest.replace(from, to)).unwrap();
        let o = fbist(&["replay", "altered.txt"], dir.path());
        assert_eq!(code(&o), 2, "{to}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("differs"));
    }
}

#[test]
fn missing_manifest_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = fbist(&["replay", "nope/manifest.txt"], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn invalid_config_leaves_no_outputs() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "bad.cfg", "operand_bits = 4\npopulaton_size = 3\n");
    let o = fbist(&["ga", "--config", "bad.cfg", "--out", "run"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key"));
    assert!(!dir.path().join("run").exists());

    write_config(dir.path(), "range.cfg", "operand_bits = 4\npc = 1.5\n");
    assert_eq!(code(&fbist(&["ga", "--config", "range.cfg", "--out", "run"], dir.path())), 1);
    assert!(!dir.path().join("run").exists());

    write_config(dir.path(), "mode.cfg", "mode = gp\n");
    assert_eq!(code(&fbist(&["ga", "--config", "mode.cfg", "--out", "run"], dir.path())), 1);
    assert_eq!(code(&fbist(&["ga", "--config", "absent.cfg"], dir.path())), 1);
    assert_eq!(code(&fbist(&["bogus"], dir.path())), 1);
}

#[test]
fn faultsim_with_empty_test_set() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.csv"), "k,x,y\n").unwrap();
    write_config(dir.path(), "fs.cfg", "operand_bits = 3\ntest_set = empty.csv\ndetection = direct\n");
    let o = fbist(&["faultsim", "--config", "fs.cfg", "--out", "run"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("run/coverage.csv")).unwrap();
    assert_eq!(csv, "k,operand1,operand2,result,N_k,N,FC\n");
}

#[test]
fn faultsim_reads_test_set_and_netlist_files() {
    let dir = tempfile::tempdir().unwrap();
    let bench = fbist::netlist::generate_alu_netlist(2).unwrap().to_bench();
    fs::write(dir.path().join("alu2.bench"), bench).unwrap();
    fs::write(dir.path().join("set.csv"), "k,x,y\n1,3,2\n2,1,3\n").unwrap();
    write_config(
        dir.path(),
        "fs.cfg",
        "operand_bits = 2\nop = div\nnetlist = alu2.bench\ntest_set = set.csv\nmisr_width = 8\nmisr_polynomial = 0x1d\n",
    );
    let o = fbist(&["faultsim", "--config", "fs.cfg", "--out", "run"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["coverage.csv", "coverage_signature.csv"] {
        let rows = CoverageReport::rows_from_csv(&fs::read_to_string(dir.path().join("run").join(name)).unwrap()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[0].result, rows[1].result), (1, 0));
        assert!(rows[0].fc <= rows[1].fc);
        assert_eq!(rows[1].cumulative_cycles, rows[0].cycles + rows[1].cycles);
    }
    assert!(!dir.path().join("run/test_set.csv").exists());
    // replay works from another directory because paths are recorded absolute
    let elsewhere = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("run/manifest.txt");
    assert_eq!(code(&fbist(&["replay", manifest.to_str().unwrap()], elsewhere.path())), 0);
}

#[test]
fn gp_writes_parseable_program() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "gp.cfg", "operand_bits = 8\npopulation_size = 12\ngenerations = 4\n");
    let o = fbist(&["gp", "--config", "gp.cfg", "--out", "run"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("run/best_program.txt")).unwrap();
    let program: MicroProgram = text.parse().unwrap();
    assert!((16..=32).contains(&program.len()));
    assert_eq!(program.to_string(), text);
    let history = fs::read_to_string(dir.path().join("run/history.csv")).unwrap();
    assert_eq!(history_from_csv(&history).unwrap().len(), 4);
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "gp.cfg", "population_size = 4\ngenerations = 2\n");
    let o = Command::new(env!("CARGO_BIN_EXE_fbist"))
        .args(["gp", "--config", "gp.cfg"])
        .current_dir(dir.path())
        .env("FBIST_OUT_DIR", "from-env")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("from-env/best_program.txt").exists());
}

#[test]
fn sweep_rows_are_exact_means() {
    let dir = tempfile::tempdir().unwrap();
    write_config(
        dir.path(),
        "sw.cfg",
        "population_size = 12\ngenerations = 4\nmax_patterns = 3\nsweep_widths = 2,3,4\nsweep_seeds = 4\n",
    );
    let o = fbist(&["sweep", "--config", "sw.cfg", "--out", "run"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = fs::read_to_string(dir.path().join("run/sweep.csv")).unwrap();
    let cells = fs::read_to_string(dir.path().join("run/sweep_cells.csv")).unwrap();
    let mut lines = rows.lines();
    assert_eq!(lines.next(), Some("operand_bits,final_coverage,test_length"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|f| f.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let w = row[0] as u64;
        let total = (2 * w) * (2 * w);
        let group: Vec<Vec<f64>> = cells
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect::<Vec<f64>>())
            .filter(|c| c[0] as u64 == w)
            .collect();
        assert_eq!(group.len(), 4);
        let covered: u64 = group.iter().map(|c| (c[2] * total as f64).round() as u64).sum();
        let cycles: u64 = group.iter().map(|c| c[3] as u64).sum();
        assert_eq!(row[1], covered as f64 / (4 * total) as f64);
        assert_eq!(row[2], cycles as f64 / 4.0);
    }
}
