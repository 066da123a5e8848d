//! Uniform Monte Carlo sampling of `S^{2N-1}`.
//!
//! Samples are normalized vectors of `2N` standard normals. The stream is cut
//! into fixed-size chunks; chunk `c` draws from ChaCha8 seeded with `seed` on
//! stream `c`, so the point sequence does not depend on how chunks are
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::states::SpherePoint;
use crate::C64;

/// Generator name recorded in reports.
pub const MC_RNG_NAME: &str = "ChaCha8 (rand_chacha), stream = chunk index";
/// Samples per independently seeded chunk.
pub const MC_CHUNK: usize = 8192;

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

fn draw(rng: &mut ChaCha8Rng, n: usize) -> SpherePoint {
    loop {
        let coords: Vec<C64> = (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                C64::new(re, im)
            })
            .collect();
        if let Ok(p) = SpherePoint::from_unnormalized(coords) {
            return p;
        }
    }
}

/// Points `[start, start + len)` of chunk `chunk`'s stream.
pub(crate) fn chunk_points(n: usize, seed: u64, chunk: usize, len: usize) -> Vec<SpherePoint> {
    let mut rng = chunk_rng(seed, chunk);
    (0..len).map(|_| draw(&mut rng, n)).collect()
}

/// Deterministic stream of `count` uniform points on `S^{2N-1}`.
#[derive(Debug, Clone)]
pub struct McSphere {
    n: usize,
    seed: u64,
    remaining: usize,
    chunk: usize,
    in_chunk: usize,
    rng: ChaCha8Rng,
}

pub fn mc_sphere(n: usize, count: usize, seed: u64) -> McSphere {
    McSphere { n, seed, remaining: count, chunk: 0, in_chunk: 0, rng: chunk_rng(seed, 0) }
}

impl Iterator for McSphere {
    type Item = SpherePoint;

    fn next(&mut self) -> Option<SpherePoint> {
        if self.remaining == 0 {
            return None;
        }
        if self.in_chunk == MC_CHUNK {
            self.chunk += 1;
            self.in_chunk = 0;
            self.rng = chunk_rng(self.seed, self.chunk);
        }
        self.in_chunk += 1;
        self.remaining -= 1;
        Some(draw(&mut self.rng, self.n))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

impl ExactSizeIterator for McSphere {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_on_the_sphere() {
        for z in mc_sphere(4, 2000, 3) {
            let n2: f64 = z.coords().iter().map(C64::norm_sqr).sum();
            assert!((n2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_modulus_squared() {
        let n = 3;
        let count = 100_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for z in mc_sphere(n, count, 11) {
            let v = z.coords()[0].norm_sqr();
            s += v;
            s2 += v * v;
        }
        let mean = s / count as f64;
        let sd = (s2 / count as f64 - mean * mean).sqrt();
        assert!((mean - 1.0 / n as f64).abs() < 4.0 * sd / (count as f64).sqrt());
    }

    #[test]
    fn stream_is_reproducible_and_chunked() {
        let a: Vec<_> = mc_sphere(2, MC_CHUNK + 10, 42).collect();
        let b: Vec<_> = mc_sphere(2, MC_CHUNK + 10, 42).collect();
        assert_eq!(a, b);
        let tail = chunk_points(2, 42, 1, 10);
        assert_eq!(&a[MC_CHUNK..], &tail[..]);
        let c: Vec<_> = mc_sphere(2, 10, 43).collect();
        assert_ne!(a[..10], c[..]);
    }
}
