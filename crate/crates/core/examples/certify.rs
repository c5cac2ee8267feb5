// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

// End-to-end certificate from a configuration file.
//
// ```bash
// cargo run --example certify               # uses examples/n3.cfg
// cargo run --example certify -- examples/n4.cfg
// ```

use std::error::Error;
use std::path::PathBuf;

use trapscope::config::RunConfig;
use trapscope::landscape::trap_certificate;
use trapscope::report::summary;

fn default_config() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/n3.cfg")
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    certify(default_config())
}

fn certify(path: PathBuf) -> Result<(), Box<dyn Error>> {
    let cfg = RunConfig::load(path)?;
    let report = trap_certificate(&cfg.instance()?, &cfg.certificate_config(None))?;
    print!("{}", summary(&report));
    assert!(report.passed);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    certify(std::env::args_os().nth(1).map(PathBuf::from).unwrap_or_else(default_config))
}
