#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

use skewlab::io::{kraus_list_json, MatrixFile};
use skewlab::{pauli, qubit_from_bloch, BlochVector, ComplexMatrix, KrausChannel};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_skewlab"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("SKEWLAB_EXHAUSTIVE_CAP").output().expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}\n{}", String::from_utf8_lossy(&out.stdout), stderr(out))
    })
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Scratch directory unique to one test.
pub fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

pub fn write(dir: &PathBuf, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

pub fn write_matrix(dir: &PathBuf, name: &str, m: &ComplexMatrix) -> String {
    write(dir, name, &MatrixFile::from_matrix(m).to_json())
}

pub fn write_channel(dir: &PathBuf, name: &str, ch: &KrausChannel) -> String {
    write(dir, name, &kraus_list_json(ch.kraus()))
}

pub fn bloch_state(dir: &PathBuf, name: &str, x: f64, y: f64, z: f64) -> String {
    let rho = qubit_from_bloch(&BlochVector::new(x, y, z).unwrap());
    write_matrix(dir, name, rho.matrix())
}

/// Writes sigma_1..sigma_3 and returns their paths.
pub fn paulis(dir: &PathBuf) -> [String; 3] {
    [1, 2, 3].map(|k| write_matrix(dir, &format!("sigma{k}.json"), &pauli(k)))
}
