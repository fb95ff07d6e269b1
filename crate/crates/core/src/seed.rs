//! Deterministic seed derivation.
//!
//! Every Monte Carlo task in the workspace draws its randomness from a seed
//! derived from a master seed plus the task's index path, so sweeps are
//! reproducible regardless of execution order or parallelism, and extending
//! a sweep never disturbs the seeds of existing tasks.

/// SplitMix64 finalizer step.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from `master` and an index path.
///
/// Each path element is folded through a SplitMix64 chain, so
/// `derive_seed(s, &[a, b])` differs from `derive_seed(s, &[b, a])` and from
/// any prefix of itself.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut state = master ^ 0xD6E8_FEB8_6659_FD93;
    let mut out = splitmix64(&mut state);
    for &part in path {
        state ^= part.wrapping_mul(0xA24B_AED4_963E_E407);
        out = splitmix64(&mut state);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        assert_eq!(derive_seed(42, &[1, 2, 3]), derive_seed(42, &[1, 2, 3]));
    }

    #[test]
    fn order_and_prefix_sensitive() {
        assert_ne!(derive_seed(42, &[1, 2]), derive_seed(42, &[2, 1]));
        assert_ne!(derive_seed(42, &[1]), derive_seed(42, &[1, 0]));
        assert_ne!(derive_seed(42, &[]), derive_seed(43, &[]));
    }
}
