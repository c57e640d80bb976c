//! Deterministic seeding and direction sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geom::{norm, C64};

/// Seeded generator used everywhere randomness is needed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for sub-task `index` of a run seeded with
/// `seed` (splitmix64 finalizer).
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut x = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^= x >> 31;
    rng(x)
}

/// Uniform random unit vector of `C^d = R^{2d}`.
pub fn random_unit<R: Rng>(rng: &mut R, dim: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let n = norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

/// Quasi-uniform real directions on the unit sphere of `R^{2d}`: the `4d`
/// signed real and imaginary coordinate axes first, then seeded Gaussian
/// directions. In dimension one this is the regular polygon of `count`
/// phases.
pub fn sphere_directions(dim: usize, count: usize) -> Vec<Vec<C64>> {
    if dim == 1 {
        return (0..count)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                vec![C64::from_polar(1.0, th)]
            })
            .collect();
    }
    let mut out = Vec::with_capacity(count);
    'axes: for k in 0..dim {
        for unit in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)] {
            if out.len() == count {
                break 'axes;
            }
            let mut v = vec![C64::new(0.0, 0.0); dim];
            v[k] = unit;
            out.push(v);
        }
    }
    let mut r = rng(0x5EED_D1AE_C710_u64 ^ dim as u64);
    while out.len() < count {
        out.push(random_unit(&mut r, dim));
    }
    out
}

/// Unit complex directions covering projective space `CP^{d-1}` (complex
/// lines through the origin). For `d = 2` this is a Fibonacci lattice on the
/// Riemann sphere lifted through the Hopf map; the coordinate directions are
/// always included.
pub fn complex_line_directions(dim: usize, count: usize) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = (0..dim)
        .map(|k| {
            let mut v = vec![C64::new(0.0, 0.0); dim];
            v[k] = C64::new(1.0, 0.0);
            v
        })
        .collect();
    if dim == 1 {
        return out;
    }
    if dim == 2 {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let m = count.saturating_sub(out.len()).max(1);
        for i in 0..m {
            let zc = 1.0 - 2.0 * (i as f64 + 0.5) / m as f64;
            let theta = zc.clamp(-1.0, 1.0).acos();
            let phi = golden * i as f64;
            out.push(vec![
                C64::new((theta / 2.0).cos(), 0.0),
                C64::from_polar((theta / 2.0).sin(), phi),
            ]);
        }
        return out;
    }
    let mut r = rng(0xC0DE_u64 ^ dim as u64);
    while out.len() < count {
        out.push(random_unit(&mut r, dim));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_unit() {
        for d in 1..4 {
            for v in sphere_directions(d, 40) {
                assert!((norm(&v) - 1.0).abs() < 1e-12);
            }
            for v in complex_line_directions(d, 40) {
                assert!((norm(&v) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn substreams_are_deterministic_and_distinct() {
        let a: u64 = substream(7, 1).random();
        let b: u64 = substream(7, 1).random();
        let c: u64 = substream(7, 2).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
