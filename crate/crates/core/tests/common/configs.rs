//! Experiment configurations and a runner for the `ipdyn` binary.

use std::fs;
use std::path::Path;
use std::process::Command;

use tempfile::TempDir;

pub const CHACON: &str = "\
[system]
kind = chacon
max_len = 1024
[sets]
U = 0
V = 0
[polynomials]
p1 = n
p2 = 2n
p3 = n + 4
[gamma]
system = {T^{n^2}; T^{2n^2}}
g = T^{n}
[generators]
a = 1,3,9
b = 2,5
c = 1,3,9,27,81,243
[windowsets]
E = multiples:3
[window]
W = 200
start = 0
end = 100
[hindman]
N = 5
r = 2
[query]
U = U
V = V, V
polys = p1, p2
maps = g
set = E
generators = c
";

pub const ROTATION: &str = "\
[system]
kind = rotation
q = 1000
p = 618
allow_non_coprime = true
[sets]
U = [0,100)
V2 = [500,600)
[window]
W = 10000
[query]
U = U
V = U, V2
";

pub fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

/// Runs the binary with `--out` set to a fresh directory; returns (status, out dir).
pub fn run(config: &str, args: &[&str]) -> (i32, TempDir) {
    let out = TempDir::new().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_ipdyn"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    (status.status.code().unwrap_or(-1), out)
}

pub fn csv(dir: &TempDir, name: &str) -> Vec<u8> {
    fs::read(dir.path().join(format!("{name}.csv"))).unwrap()
}

/// A single set and map, as the chain needs one map per set.
pub fn chain_config() -> String {
    CHACON.replace("V = V, V\n", "V = V\n").replace("polys = p1, p2\n", "polys = p1\n")
}

/// Only the short generator lists, whose sums fit a small window.
pub fn short_lists() -> String {
    CHACON.replace("c = 1,3,9,27,81,243\n", "").replace("generators = c\n", "")
}

pub fn cases() -> Vec<(&'static str, Vec<&'static str>, String)> {
    let c = || CHACON.to_string();
    vec![
        ("pet-trace", vec!["pet-trace"], c()),
        ("weights", vec!["weights"], c()),
        ("fs", vec!["fs"], c()),
        ("hindman", vec!["hindman", "--all"], c()),
        ("density", vec!["density"], c()),
        ("return-set", vec!["return-set"], c()),
        ("poly-return", vec!["poly-return"], c()),
        ("lemma213", vec!["lemma213", "--window", "300"], chain_config()),
        ("mixing-report", vec!["mixing-report", "--window", "60"], short_lists()),
        ("return-set", vec!["return-set", "--window", "2000"], ROTATION.to_string()),
    ]
}
