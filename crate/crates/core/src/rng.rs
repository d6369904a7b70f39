//! Counter-based deterministic random generator.
//!
//! Every draw is a pure function of `(key, counter)`, so generators can be
//! copied, forked per stream/channel, and evaluated out of order (or in
//! parallel) while producing the same values as a sequential pass.

/// SplitMix64 finalizer; full-period bijection on `u64`.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counter-mode RNG. `Copy` on purpose: passing by value forks the stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { key: mix(seed), counter: 0 }
    }

    /// Derive an independent stream keyed by a label (e.g. channel index).
    pub fn fork(&self, label: u64) -> Self {
        Self { key: mix(self.key ^ mix(label.wrapping_add(0xa5a5_a5a5))), counter: 0 }
    }

    /// Jump directly to an absolute counter position.
    pub fn at(&self, counter: u64) -> Self {
        Self { key: self.key, counter }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let v = mix(self.key ^ mix(self.counter));
        self.counter += 1;
        v
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    #[inline]
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal via Box-Muller (consumes two counter slots).
    #[inline]
    pub fn normal(&mut self) -> f64 {
        let u1 = (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        // Guard u1 = 0 so ln stays finite.
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        r * (std::f64::consts::TAU * u2).cos()
    }

    /// Fisher-Yates shuffle of index order.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = (self.next_u64() % (i as u64 + 1)) as usize;
            xs.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let mut a = CounterRng::new(7);
        let mut b = CounterRng::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = CounterRng::new(8);
        assert_ne!(a.next_u64(), c.next_u64());
    }

    #[test]
    fn counter_addressable() {
        let base = CounterRng::new(42);
        let mut seq = base;
        let draws: Vec<u64> = (0..16).map(|_| seq.next_u64()).collect();
        for (k, expect) in draws.iter().enumerate() {
            let mut jumped = base.at(k as u64);
            assert_eq!(jumped.next_u64(), *expect);
        }
    }

    #[test]
    fn forks_are_independent_streams() {
        let base = CounterRng::new(1);
        let mut x = base.fork(0);
        let mut y = base.fork(1);
        let same = (0..64).filter(|_| x.next_u64() == y.next_u64()).count();
        assert_eq!(same, 0);
    }

    #[test]
    fn uniform_and_normal_moments() {
        let mut r = CounterRng::new(3);
        let n = 200_000;
        let mean: f64 = (0..n).map(|_| r.uniform()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.005, "uniform mean {mean}");
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let v = r.normal();
            s += v;
            s2 += v * v;
        }
        let m = s / n as f64;
        let var = s2 / n as f64 - m * m;
        assert!(m.abs() < 0.01, "normal mean {m}");
        assert!((var - 1.0).abs() < 0.02, "normal var {var}");
    }

    #[test]
    fn shuffle_permutes() {
        let mut r = CounterRng::new(5);
        let mut xs: Vec<usize> = (0..50).collect();
        r.shuffle(&mut xs);
        let mut sorted = xs.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
        assert_ne!(xs, (0..50).collect::<Vec<_>>());
    }
}
