//! Seeded xorshift64* generator for the random linear combinations used by
//! deflation directions and square-system randomization. Deterministic and
//! documented: identical seeds reproduce identical coefficient streams.

#[derive(Clone, Debug)]
pub struct XorShift64 {
    state: u64,
}

impl XorShift64 {
    pub fn new(seed: u64) -> Self {
        // avoid the all-zero state
        XorShift64 {
            state: seed.wrapping_mul(0x9E3779B97F4A7C15) | 1,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    /// Uniform on [-1, 1], quantized to 2^-20 so the value is exactly
    /// representable in every coefficient domain.
    pub fn unit(&mut self) -> f64 {
        let raw = (self.next_u64() >> 43) as i64; // 21 bits
        (raw - (1 << 20)) as f64 / (1 << 20) as f64
    }
}
