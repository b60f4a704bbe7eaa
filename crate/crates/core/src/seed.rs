//! Named sub-seeds derived from one master seed.

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent-looking seed for `(label, index)` under `master`.
pub fn derive(master: u64, label: &str, index: u64) -> u64 {
    let mut h = mix64(master);
    for byte in label.bytes() {
        h = mix64(h ^ u64::from(byte));
    }
    mix64(h ^ mix64(index))
}
