use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One independent random stream per purpose, so changing e.g. the DL
/// fraction leaves topology, fading and arrivals untouched.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Stream {
    Topology = 1,
    Association,
    Direction,
    Scheduling,
    Fading,
    DlArrivals,
    UlArrivals,
}

pub(crate) fn stream(seed: u64, which: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}
