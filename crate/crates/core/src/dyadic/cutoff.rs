/// Smooth monotone step: 0 for a ≤ 0, 1 for a ≥ 1, h(a) + h(1 − a) = 1.
pub fn smooth_step(a: f64) -> f64 {
    if a <= 0.0 {
        0.0
    } else if a >= 1.0 {
        1.0
    } else {
        let p = (-1.0 / a).exp();
        let q = (-1.0 / (1.0 - a)).exp();
        p / (p + q)
    }
}

/// s₀: 1 on [0,1], 0 on [2,∞), smooth in between.
pub fn s0(x: f64) -> f64 {
    if x <= 1.0 {
        1.0
    } else if x >= 2.0 {
        0.0
    } else {
        smooth_step(2.0 - x)
    }
}

/// s_i(x) = s₀(2^{-i}x) − s₀(2^{-i+1}x) for i ≥ 1, s₀ for i = 0.
pub fn s(i: u32, x: f64) -> f64 {
    if i == 0 {
        s0(x)
    } else {
        let a = x / (1u64 << i) as f64;
        s0(a) - s0(2.0 * a)
    }
}

/// Σ_{k ≤ i} s_k(x) = s₀(2^{-i}x).
pub fn partial_sum(i: u32, x: f64) -> f64 {
    s0(x / (1u64 << i) as f64)
}

/// Indices k whose open support contains x (at most two). Values may still
/// underflow to zero right at the edges.
pub fn active(x: f64) -> impl Iterator<Item = u32> {
    let lo = if x < 2.0 { 0 } else { x.log2().floor() as u32 };
    (lo.saturating_sub(1)..=lo + 1).filter(move |&k| {
        if k == 0 {
            x < 2.0
        } else {
            let c = (1u64 << k) as f64;
            x > c / 2.0 && x < 2.0 * c
        }
    })
}

/// The dyadic cutoff family s₀, s₁, ...
#[derive(Clone, Copy, Debug, Default)]
pub struct CutoffFamily;

impl CutoffFamily {
    pub fn s0(&self, x: f64) -> f64 {
        s0(x)
    }

    pub fn s(&self, i: u32, x: f64) -> f64 {
        s(i, x)
    }

    /// Support of s_i as a closed interval.
    pub fn support(&self, i: u32) -> (f64, f64) {
        if i == 0 {
            (0.0, 2.0)
        } else {
            ((1u64 << (i - 1)) as f64, (1u64 << (i + 1)) as f64)
        }
    }
}

/// 1D profile of the unit-cube partition: 1 on |x| ≤ 3/8, 0 on |x| ≥ 5/8,
/// with φ(x) + φ(x − 1) = 1 on the overlap.
pub fn cube_profile(x: f64) -> f64 {
    let a = x.abs();
    smooth_step((5.0 / 8.0 - a) * 4.0)
}

/// Smooth time cutoff χ: 1 on |t| ≤ plateau, 0 on |t| ≥ plateau + ramp.
/// `ramp = 0` gives χ ≡ 1.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TimeCutoff {
    pub plateau: f64,
    pub ramp: f64,
}

impl Default for TimeCutoff {
    fn default() -> Self {
        TimeCutoff { plateau: 1.0, ramp: 1.0 }
    }
}

impl TimeCutoff {
    pub fn identity() -> Self {
        TimeCutoff { plateau: f64::INFINITY, ramp: 0.0 }
    }

    pub fn is_identity(&self) -> bool {
        self.plateau.is_infinite()
    }

    pub fn value(&self, t: f64) -> f64 {
        if self.is_identity() {
            return 1.0;
        }
        let a = t.abs();
        if a <= self.plateau {
            1.0
        } else if self.ramp <= 0.0 {
            0.0
        } else {
            smooth_step((self.plateau + self.ramp - a) / self.ramp)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn time_cutoff() {
        let chi = TimeCutoff::default();
        assert_eq!(chi.value(0.7), 1.0);
        assert_eq!(chi.value(-2.0), 0.0);
        assert!((chi.value(1.5) - 0.5).abs() < 1e-15);
        assert_eq!(TimeCutoff::identity().value(3.0), 1.0);
    }

    #[test]
    fn endpoints() {
        assert_eq!(s0(0.0), 1.0);
        assert_eq!(s0(1.0), 1.0);
        assert_eq!(s0(2.0), 0.0);
        assert_eq!(s(3, 4.0), 0.0);
        assert_eq!(s(3, 16.0), 0.0);
        assert_eq!(s(3, 8.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        assert_eq!(cube_profile(0.0), 1.0);
        assert_eq!(cube_profile(1.0), 0.0);
        assert!((cube_profile(0.5) - 0.5).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn telescoping(x in 0.0f64..5000.0) {
            let total: f64 = (0..=14).map(|i| s(i, x)).sum();
            prop_assert!((total - 1.0).abs() < 1e-13);
            let act: f64 = active(x).map(|i| s(i, x)).sum();
            prop_assert!((act - 1.0).abs() < 1e-13);
        }

        #[test]
        fn support(i in 1u32..12, x in 0.0f64..10000.0) {
            let (lo, hi) = CutoffFamily.support(i);
            if x <= lo || x >= hi {
                prop_assert_eq!(s(i, x), 0.0);
            }
            prop_assert!(s(i, x) >= 0.0);
        }

        #[test]
        fn cube_partition(x in -5.0f64..5.0) {
            let total: f64 = (-6i32..=6).map(|k| cube_profile(x - k as f64)).sum();
            prop_assert!((total - 1.0).abs() < 1e-14);
        }

        #[test]
        fn cube_face_split(k in -4i32..4, y in -0.12f64..0.12) {
            let x = k as f64 + 0.5 + y;
            let a = cube_profile(x - k as f64);
            let b = cube_profile(x - (k + 1) as f64);
            prop_assert!(a > 0.0 && b > 0.0);
            prop_assert!((a + b - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn integer_points_are_kronecker() {
        for k in -5i32..=5 {
            let v = cube_profile(k as f64);
            assert_eq!(v, if k == 0 { 1.0 } else { 0.0 });
        }
    }
}
