//! Counter-based splittable random stream.
//!
//! Every Monte-Carlo trial owns an independent stream keyed by
//! `(seed, trial_index)`, so any single trial is reproducible in isolation
//! and chunks of the trial range never share generator state. This is what
//! makes the engine's output independent of how trials are partitioned
//! across workers.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer; bijective on u64.
#[inline]
fn mix(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random stream for a single Monte-Carlo trial.
#[derive(Debug, Clone)]
pub struct TrialRng {
    state: u64,
    spare_normal: Option<f64>,
}

impl TrialRng {
    /// Open the stream for trial `trial` under master seed `seed`.
    pub fn new(seed: u64, trial: u64) -> Self {
        let key = mix(seed) ^ mix(trial.wrapping_add(1).wrapping_mul(GOLDEN));
        TrialRng { state: key, spare_normal: None }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform in [0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1); safe under `ln`.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform phase in [0, 2*pi).
    #[inline]
    pub fn phase(&mut self) -> f64 {
        2.0 * core::f64::consts::PI * self.uniform()
    }

    /// Exponential with the given mean; mean 0 degenerates to the constant 0.
    #[inline]
    pub fn exponential(&mut self, mean: f64) -> f64 {
        if mean == 0.0 {
            return 0.0;
        }
        -mean * libm::log(self.uniform_open())
    }

    /// Standard normal via the polar (Marsaglia) method, caching the pair.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = libm::sqrt(-2.0 * libm::log(s) / s);
                self.spare_normal = Some(v * f);
                return u * f;
            }
        }
    }

    /// Gamma(shape, scale) via Marsaglia-Tsang, with the shape-boost step
    /// for shape < 1.
    pub fn gamma(&mut self, shape: f64, scale: f64) -> f64 {
        debug_assert!(shape > 0.0 && scale > 0.0);
        if shape < 1.0 {
            let u = self.uniform_open();
            return self.gamma(shape + 1.0, scale) * libm::pow(u, 1.0 / shape);
        }
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / libm::sqrt(9.0 * d);
        loop {
            let x = self.standard_normal();
            let t = 1.0 + c * x;
            if t <= 0.0 {
                continue;
            }
            let v = t * t * t;
            let u = self.uniform_open();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 {
                return d * v * scale;
            }
            if libm::log(u) < 0.5 * x2 + d * (1.0 - v + libm::log(v)) {
                return d * v * scale;
            }
        }
    }
}
