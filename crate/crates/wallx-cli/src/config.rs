use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    /// Input rationals are rounded through `f64` first.
    Float,
}

/// Settings read from `--config`; command-line flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub height: Option<usize>,
    pub q: Option<Vec<u64>>,
    pub cutoff: Option<Vec<usize>>,
    pub mode: Option<Mode>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_fields() {
        let c: RunConfig = toml::from_str(
            "height = 4\nq = [2, 3]\ncutoff = [2, 2]\nmode = \"float\"\noutput = \"out.json\"\nseed = 7\nthreads = 2\n",
        )
        .unwrap();
        assert_eq!(c.q, Some(vec![2, 3]));
        assert_eq!(c.mode, Some(Mode::Float));
        assert!(toml::from_str::<RunConfig>("bogus = 1").is_err());
    }
}
