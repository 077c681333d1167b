//! Synthetic workloads (Weibull sizes and gaps, log-normal estimation error)
//! and CSV trace ingestion.

mod generate;
mod trace;

pub use generate::{error_factor, generate, mean_one_scale, sample_weibull, validate_params, GenError};
pub use trace::{load_trace, parse_trace, TraceError};

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one grid cell and repetition: `base` is folded with each index
/// through the SplitMix64 finalizer, so neighbouring cells get unrelated
/// streams and the result never depends on execution order.
pub fn mix_seed(base: u64, cell: u64, repetition: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ cell) ^ repetition.wrapping_mul(0xd6e8_feb8_6659_fd93))
}
