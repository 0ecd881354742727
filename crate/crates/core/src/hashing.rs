//! Stable, platform-independent hashing: FNV-1a for stub values and rng
//! stream derivation, and a 128-bit variant for content-addressed ids.
//! Std hashers are deliberately avoided because their output is not
//! guaranteed stable across releases.

const FNV64_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV64_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Incremental FNV-1a 64-bit hasher.
#[derive(Debug, Clone)]
pub struct Fnv64(u64);

impl Fnv64 {
    pub fn new() -> Fnv64 {
        Fnv64(FNV64_OFFSET)
    }

    pub fn write(&mut self, bytes: &[u8]) -> &mut Self {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(FNV64_PRIME);
        }
        self
    }

    pub fn write_str(&mut self, s: &str) -> &mut Self {
        // Length prefix keeps ("ab","c") distinct from ("a","bc").
        self.write(&(s.len() as u64).to_le_bytes());
        self.write(s.as_bytes())
    }

    pub fn write_u64(&mut self, v: u64) -> &mut Self {
        self.write(&v.to_le_bytes())
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

impl Default for Fnv64 {
    fn default() -> Self {
        Fnv64::new()
    }
}

/// 128-bit content id rendered as 32 hex chars: two FNV-1a passes with
/// distinct offsets over the same byte stream.
pub fn content_id(parts: &[&str]) -> String {
    let mut a = Fnv64::new();
    let mut b = Fnv64(0x6c62_272e_07bb_0142);
    for p in parts {
        a.write_str(p);
        b.write_str(p);
        b.write(&[0x9d]);
    }
    format!("{:016x}{:016x}", a.finish(), b.finish())
}
