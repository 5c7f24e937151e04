#![allow(dead_code)]

use std::path::{Path, PathBuf};

use gftpl::ExperimentConfig;

pub fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
}

pub fn example_text(name: &str) -> String {
    std::fs::read_to_string(example(name)).unwrap()
}

pub fn parse(text: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml(text).unwrap_or_else(|e| panic!("{e}"))
}

/// The minimal example with its top-level keys replaced by `head`.
pub fn minimal_with(head: &str) -> String {
    let text = example_text("vcg_minimal.toml");
    let body = &text[text.find("[environment]").unwrap()..];
    format!("{head}\n{body}")
}

pub fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}
