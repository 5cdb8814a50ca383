//! Small shared numeric helpers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Mix a master seed with a salt into a decoupled derived seed
/// (splitmix64 finalizer). Used to give every sweep point and pipeline its
/// own seed space, so streams never collide across uses of one master seed.
pub fn mix_seed(master: u64, salt: u64) -> u64 {
    let mut z = master ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent random stream for one Monte Carlo shot.
///
/// Every shot derives its generator from the master seed plus its own stream
/// id, so the sequence a shot sees never depends on how shots are batched
/// over worker threads. Identical (seed, stream) pairs reproduce identical
/// shots bit for bit.
pub fn shot_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Fold an angle into the canonical logical-rotation range (−π/2, π/2].
/// Logical Ẑ rotations are defined modulo π (a π shift is a global phase on
/// the code space), so every reported logical angle lives in this window.
pub fn fold_angle(t: f64) -> f64 {
    let mut r = t.rem_euclid(PI);
    if r > PI / 2.0 {
        r -= PI;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn folds_into_half_open_window() {
        assert!((fold_angle(0.3) - 0.3).abs() < 1e-15);
        assert!((fold_angle(1.8) - (1.8 - PI)).abs() < 1e-12);
        assert!((fold_angle(-1.8) - (PI - 1.8)).abs() < 1e-12);
        assert!((fold_angle(FRAC_PI_2) - FRAC_PI_2).abs() < 1e-15);
        assert!((fold_angle(-FRAC_PI_2) - FRAC_PI_2).abs() < 1e-12);
        assert!((fold_angle(3.0 * PI + 0.1) - 0.1).abs() < 1e-12);
        for k in -7i32..=7 {
            let t = 0.4 + (k as f64) * PI;
            assert!((fold_angle(t) - 0.4).abs() < 1e-12, "k={k}");
            assert!((fold_angle(t).sin().abs() - 0.4f64.sin()).abs() < 1e-12);
        }
    }
}
