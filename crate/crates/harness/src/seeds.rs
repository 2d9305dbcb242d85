//! Stable seed derivation for runs, splits and tasks.

use sha2::{Digest, Sha256};

/// Hashes `parts` into a seed that fits in a signed 64-bit integer (so it
/// survives TOML and CSV round trips).
pub fn stable_seed(parts: &[&str]) -> u64 {
    let mut hasher = Sha256::new();
    for p in parts {
        hasher.update((p.len() as u64).to_le_bytes());
        hasher.update(p.as_bytes());
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes) & (u64::MAX >> 1)
}

/// Seed of the edge split for one trial; shared by every method on that graph.
pub fn split_seed(master: u64, graph: &str, trial: usize) -> u64 {
    stable_seed(&["split", &master.to_string(), graph, &trial.to_string()])
}

/// Seed of one (graph, method, dimension, trial) task.
pub fn task_seed(master: u64, graph: &str, method: &str, dimension: usize, trial: usize) -> u64 {
    stable_seed(&[
        "task",
        &master.to_string(),
        graph,
        method,
        &dimension.to_string(),
        &trial.to_string(),
    ])
}

/// Seed of the Monte Carlo random baseline for one split.
pub fn baseline_seed(master: u64, graph: &str, trial: usize) -> u64 {
    stable_seed(&["baseline", &master.to_string(), graph, &trial.to_string()])
}
