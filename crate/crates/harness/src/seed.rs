//! Per-record RNG streams. Every random draw in an experiment is seeded by
//! hashing the master seed together with a purpose tag and the coordinates
//! of the record, so any record can be recomputed on its own.

pub(crate) const TAG_PARTITION: u64 = 1;
pub(crate) const TAG_HOLDOUT: u64 = 2;
pub(crate) const TAG_ANCHOR: u64 = 3;
pub(crate) const TAG_RSVD: u64 = 4;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(master), |h, &p| splitmix64(h ^ p))
}
