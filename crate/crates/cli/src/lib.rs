//! Command-line front end for `tractrix-core`: runs tractrix flows,
//! retractions and gradient flows from flat config files, and the
//! acceptance suite behind `verify-all`.
//!
//! Every command writes its CSV/SVG/JSON outputs and a `manifest.txt` into
//! the output directory. Exit codes: 0 all checks pass, 1 usage or
//! configuration error, 2 precondition violation, 3 check failure.

pub mod config;
pub mod manifest;
pub mod suite;
pub mod svg;

mod flow_cmd;
mod retract_cmd;
mod run_cmd;
mod setup;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context as _;
use tractrix_core::sampling::RNG_NAME;
use tractrix_core::GeomError;

pub use config::{Config, UsageError};
pub use manifest::{Check, Manifest};

/// Environment variable selecting log verbosity (`error` .. `trace`).
pub const VERBOSITY_ENV: &str = "TRACTRIX_LOG";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Retract,
    Flow,
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::Retract => "retract",
            Command::Flow => "flow",
            Command::VerifyAll => "verify-all",
        }
    }
}

/// Output directory plus the list of files written so far.
pub struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    pub fn new(dir: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

/// Runs `command` and writes `manifest.txt`.
pub fn execute(command: Command, cfg: &Config, out_dir: &Path) -> anyhow::Result<Manifest> {
    let common = cfg.common()?;
    let start = Instant::now();
    let mut out = Outputs::new(out_dir)?;
    let checks = match command {
        Command::Run => run_cmd::run(cfg, &common, &mut out)?,
        Command::Retract => retract_cmd::run(cfg, &common, &mut out)?,
        Command::Flow => flow_cmd::run(cfg, &common, &mut out)?,
        Command::VerifyAll => suite::run(cfg, &common, &mut out)?,
    };
    let manifest = Manifest {
        command: command.name().to_string(),
        config_hash: cfg.hash(),
        config: cfg.canonical(),
        seed: common.seed,
        rng: RNG_NAME.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        checks,
        files: out.files.clone(),
        total_seconds: start.elapsed().as_secs_f64(),
    };
    let path = out.dir.join("manifest.txt");
    std::fs::write(&path, manifest.render()).with_context(|| format!("writing {}", path.display()))?;
    Ok(manifest)
}

/// Exit code for an error that aborted a command.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return 1;
        }
        if let Some(g) = cause.downcast_ref::<GeomError>() {
            return match g {
                GeomError::Precondition { .. }
                | GeomError::NonUniqueGeodesic { .. }
                | GeomError::Consistency(_)
                | GeomError::Resolution(_) => 2,
                GeomError::SpaceMismatch { .. }
                | GeomError::Capability { .. }
                | GeomError::Domain(_)
                | GeomError::Configuration(_) => 1,
            };
        }
    }
    1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes() {
        let pre = anyhow::Error::new(GeomError::precondition("p off K", "x"));
        assert_eq!(exit_code(&pre), 2);
        let cfg = anyhow::Error::new(GeomError::Configuration("bad".into()));
        assert_eq!(exit_code(&cfg), 1);
        let usage = anyhow::Error::new(UsageError("unknown key".into())).context("loading");
        assert_eq!(exit_code(&usage), 1);
        let io = anyhow::anyhow!("disk full");
        assert_eq!(exit_code(&io), 1);
    }
}
