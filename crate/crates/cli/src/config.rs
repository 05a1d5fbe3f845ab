//! Optional toml settings; explicit flags take precedence.

use std::path::Path;

use serde::Deserialize;

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub accept_tol: Option<f64>,
    pub restarts: Option<usize>,
    pub threads: Option<usize>,
    pub max_iters: Option<usize>,
    pub threshold: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys_only() {
        let c: FileConfig = toml::from_str("seed = 4\naccept_tol = 1e-9\n").unwrap();
        assert_eq!(c.seed, Some(4));
        assert_eq!(c.accept_tol, Some(1e-9));
        assert!(toml::from_str::<FileConfig>("sede = 4").is_err());
    }
}
