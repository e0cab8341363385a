#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn ellipthom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ellipthom")).args(args).output().expect("binary runs")
}

pub fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// Writes `config` with `output.dir` pointed at `dir/out`.
pub fn write_config(dir: &Path, name: &str, mut config: serde_json::Value) -> PathBuf {
    let out = dir.join("out").join(name);
    config["output"]["dir"] = serde_json::json!(out);
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, config.to_string()).unwrap();
    path
}

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}
