//! Deterministic derivation of per-realization seeds.

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for realization `index` of a run started from `master`.
///
/// `mix64(mix64(master) + (index + 1) · 0x9e3779b97f4a7c15)`. Depends only on
/// the pair, so a realization draws the same path whatever thread runs it.
pub fn child_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master).wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}
