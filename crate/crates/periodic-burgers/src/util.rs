//! Deterministic seed derivation for reproducible ensembles.
//!
//! One root seed per run; every component derives its own stream by hashing
//! `(root, component-name)`, so results do not depend on evaluation order.

/// Stable 64-bit seed for a named component under a root seed.
pub fn derive_seed(root: u64, component: &str) -> u64 {
    splitmix64(root ^ fnv1a(component.as_bytes()))
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_stable_and_component_dependent() {
        assert_eq!(derive_seed(42, "verify"), derive_seed(42, "verify"));
        assert_ne!(derive_seed(42, "verify"), derive_seed(42, "sweep"));
        assert_ne!(derive_seed(42, "verify"), derive_seed(43, "verify"));
    }
}
