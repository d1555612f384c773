//! Writes procedural assets plus one run config per task.
//!
//! `cargo run -p bidbench-core --example demo_assets -- <dir> [size] [per_dir]`

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bidbench_core::demo::{write_assets, DemoAssets};
use bidbench_core::Task;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(root) = args.first().map(PathBuf::from) else {
        eprintln!("usage: demo_assets <dir> [size] [per_dir]");
        return ExitCode::from(1);
    };
    let size = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(128);
    let per_dir = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(8);
    if let Err(e) = write_assets(&root.join("assets"), size, per_dir, 1) {
        eprintln!("error: {e}");
        return ExitCode::from(3);
    }
    // Configs resolve relative paths against their own directory.
    let assets = DemoAssets { root: "assets".into() };
    for (task, name) in [
        (Task::Task1, "task1"),
        (Task::Task2a, "task2a"),
        (Task::Task2b, "task2b"),
        (Task::Task3, "task3"),
    ] {
        let cfg = assets.config(task, 4, Path::new(&format!("data/{name}")), 100, size);
        let path = root.join(format!("{name}.json"));
        fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
        println!("{}", path.display());
    }
    ExitCode::SUCCESS
}
