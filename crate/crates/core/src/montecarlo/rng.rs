use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Highest attempt index that fits the stream layout.
pub const MAX_ATTEMPTS: u64 = 1 << 8;
/// Highest instrument index that fits the stream layout.
pub const MAX_INSTRUMENTS: u64 = 1 << 16;

/// Independent generator for one (trial, instrument, attempt) triple.
///
/// The key comes from the run seed; the ChaCha stream id packs
/// `trial << 24 | instrument << 8 | attempt`, so the draws of one trial do
/// not depend on how many other trials run or in which order.
pub fn stream_rng(seed: u64, trial: u64, instrument: u64, attempt: u64) -> ChaCha8Rng {
    debug_assert!(attempt < MAX_ATTEMPTS && instrument < MAX_INSTRUMENTS);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((trial << 24) | ((instrument % MAX_INSTRUMENTS) << 8) | (attempt % MAX_ATTEMPTS));
    rng
}
