//! Reproducible random streams.
//!
//! Every Monte Carlo run is cut into fixed-size blocks of trials. Block `b`
//! draws from ChaCha8 seeded by the run seed with stream id `b`, so a result
//! depends only on (parameters, seed, trials) and never on how blocks are
//! grouped into chunks or spread over threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Trials drawn from one random stream.
pub const BLOCK_TRIALS: u64 = 4096;

pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Number of blocks needed to cover `trials`.
pub fn block_count(trials: u64) -> u64 {
    trials.div_ceil(BLOCK_TRIALS)
}

/// Trials in block `block` of a run of `trials`.
pub fn block_len(trials: u64, block: u64) -> u64 {
    let start = block * BLOCK_TRIALS;
    BLOCK_TRIALS.min(trials.saturating_sub(start))
}

/// Splits `0..blocks` into `chunks` contiguous ranges of near-equal size.
pub fn chunk_ranges(blocks: u64, chunks: usize) -> Vec<std::ops::Range<u64>> {
    let chunks = chunks.max(1) as u64;
    (0..chunks)
        .map(|c| (blocks * c / chunks)..(blocks * (c + 1) / chunks))
        .collect()
}

/// Runs `per_block(rng, block_len)` over every block in parallel, with the
/// blocks grouped into `chunks` work units, and sums the results.
pub fn sum_over_blocks<F>(trials: u64, seed: u64, chunks: usize, per_block: F) -> u64
where
    F: Fn(&mut ChaCha8Rng, u64) -> u64 + Sync,
{
    let blocks = block_count(trials);
    chunk_ranges(blocks, chunks)
        .into_par_iter()
        .map(|range| {
            range
                .map(|b| {
                    let mut rng = substream(seed, b);
                    per_block(&mut rng, block_len(trials, b))
                })
                .sum::<u64>()
        })
        .sum()
}

/// Default chunking: enough work units to keep every worker busy.
pub fn default_chunks(trials: u64) -> usize {
    let blocks = block_count(trials) as usize;
    blocks.clamp(1, 4 * rayon::current_num_threads().max(1))
}
