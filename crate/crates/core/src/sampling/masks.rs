use crate::cube::{ApertureKind, CodedAperture, SensingConfig};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Binary mask whose element `(h, w)` is open iff the `(h * W + w)`-th
/// SplitMix64 uniform drawn from `seed` is below `p`.
pub fn random_mask(config: &SensingConfig, p: f64, seed: u64) -> Result<CodedAperture> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("open probability {p} outside [0, 1]")));
    }
    let mut rng = SplitMix64::new(seed);
    let data = (0..config.plane_len())
        .map(|_| {
            let u = rng.next_f64();
            if p >= 1.0 || u < p {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    CodedAperture::new(config.height, config.width, ApertureKind::Binary, data)
}

/// `1 - M`, keeping the binary kind.
pub fn complement_mask(mask: &CodedAperture) -> CodedAperture {
    let data = mask.data().iter().map(|v| 1.0 - v).collect();
    CodedAperture::new(mask.height(), mask.width(), mask.kind(), data)
        .expect("complement of a valid aperture is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(h: usize, w: usize) -> SensingConfig {
        SensingConfig::new(h, w, 2, 1, 1).unwrap()
    }

    #[test]
    fn extremes() {
        assert!(random_mask(&cfg(4, 4), 1.0, 3).unwrap().data().iter().all(|&v| v == 1.0));
        assert!(random_mask(&cfg(4, 4), 0.0, 3).unwrap().data().iter().all(|&v| v == 0.0));
        assert!(random_mask(&cfg(4, 4), 1.5, 3).is_err());
    }

    #[test]
    fn seed_zero_golden_bits() {
        // SplitMix64(0) uniforms: 0.8833, 0.4315, 0.0264, 0.9709 (evaluated offline)
        let m = random_mask(&cfg(2, 2), 0.5, 0).unwrap();
        assert_eq!(m.data(), &[0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn complement_involution() {
        let m = random_mask(&cfg(5, 3), 0.5, 11).unwrap();
        let c = complement_mask(&m);
        assert_eq!(c.kind(), ApertureKind::Binary);
        assert_eq!(complement_mask(&c), m);
        assert!(m.data().iter().zip(c.data()).all(|(a, b)| a * b == 0.0));
        let ones = CodedAperture::ones(2, 2);
        assert!(complement_mask(&ones).data().iter().all(|&v| v == 0.0));
    }
}
