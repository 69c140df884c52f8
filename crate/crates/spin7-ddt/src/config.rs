//! Run configuration: scalar mode, tolerances, seeding, output format.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Tsv,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Config {
    pub mode: Mode,
    /// Absolute arithmetic tolerance for float comparisons.
    pub tol: f64,
    /// Classification tolerance: a case predicate "x = 0" means |x| <= tol_class.
    pub tol_class: f64,
    /// Relative singular-value threshold for float ranks.
    pub tol_rank: f64,
    pub seed: u64,
    /// l1 radius of the deterministic torus mode set.
    pub truncation: usize,
    /// Extra random torus modes per sweep.
    pub random_modes: usize,
    pub format: OutputFormat,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            mode: Mode::Exact,
            tol: 1e-9,
            tol_class: 1e-7,
            tol_rank: 1e-8,
            seed: 7,
            truncation: 2,
            random_modes: 1000,
            format: OutputFormat::Json,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), String> {
        if self.tol <= 0.0 || self.tol_class <= 0.0 || self.tol_rank <= 0.0 {
            return Err("tolerances must be positive".into());
        }
        Ok(())
    }
}

/// Stable 64-bit FNV-1a hash, used to derive per-task sub-seeds so that
/// results do not depend on thread scheduling.
pub fn stable_hash(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325 ^ seed.rotate_left(17);
    for b in label.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h ^= seed;
    h.wrapping_mul(0x100000001b3)
}

/// Worker-count cap from the SPIN7_THREADS environment variable.
pub fn thread_cap() -> Option<usize> {
    std::env::var("SPIN7_THREADS").ok()?.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_label_sensitive() {
        assert_eq!(stable_hash(7, "a"), stable_hash(7, "a"));
        assert_ne!(stable_hash(7, "a"), stable_hash(7, "b"));
        assert_ne!(stable_hash(7, "a"), stable_hash(8, "a"));
    }
}
