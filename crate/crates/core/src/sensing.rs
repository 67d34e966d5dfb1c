//! Measurement matrices, synthetic block-sparse test signals and noisy
//! compressed measurements `y = Φx + v`.
//!
//! All randomness is drawn from ChaCha8 generators seeded explicitly, so a
//! given `(config, seed)` always produces the same bits.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::model::SignalVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingConfig {
    pub n: usize,
    /// Compression ratio `M/N`.
    pub mu: f64,
    pub sigma2: f64,
    pub seed: u64,
}

impl SensingConfig {
    pub fn new(n: usize, mu: f64, sigma2: f64, seed: u64) -> Result<Self> {
        let cfg = Self { n, mu, sigma2, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::param("n", format!("must be at least 2, got {}", self.n)));
        }
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return Err(Error::param("mu", format!("must lie in (0, 1], got {}", self.mu)));
        }
        if !self.sigma2.is_finite() || self.sigma2 < 0.0 {
            return Err(Error::param("sigma2", format!("must be finite and >= 0, got {}", self.sigma2)));
        }
        if self.m() == 0 {
            return Err(Error::param("mu", format!("mu·n = {} rounds to zero measurements", self.mu * self.n as f64)));
        }
        Ok(())
    }

    /// `round(μ·N)`, halves rounded up.
    pub fn m(&self) -> usize {
        (self.mu * self.n as f64 + 0.5).floor() as usize
    }
}

/// Mixes a base seed, a trial index and a compression ratio into an
/// independent per-cell seed (SplitMix64 finaliser over each word).
pub fn derive_seed(base: u64, trial: u64, mu: f64) -> u64 {
    [trial, mu.to_bits()]
        .into_iter()
        .fold(splitmix64(base), |acc, w| splitmix64(acc ^ splitmix64(w)))
}

/// Sub-stream `index` of a seed, e.g. matrix vs noise for one trial.
pub fn substream(seed: u64, index: u64) -> u64 {
    splitmix64(seed.wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `m × n` matrix with i.i.d. `N(0, 1/m)` entries.
pub fn gaussian_matrix(m: usize, n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, (1.0 / m as f64).sqrt()).expect("positive std dev");
    // row-major draw order
    let mut data = Vec::with_capacity(m * n);
    for _ in 0..m * n {
        data.push(normal.sample(&mut rng));
    }
    DMatrix::from_row_slice(m, n, &data)
}

/// Orthonormalises the rows of `a` (Householder QR of `aᵀ`), keeping their span.
pub fn orthonormalize_rows(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (m, n) = a.shape();
    if m > n {
        return Err(Error::InvalidDimension(format!(
            "cannot orthonormalize {m} rows of length {n}"
        )));
    }
    let qr = a.transpose().qr();
    let r = qr.r();
    let scale = a.amax().max(f64::MIN_POSITIVE);
    if (0..m).any(|i| r[(i, i)].abs() <= 1e-12 * scale) {
        return Err(Error::InvalidDimension("rows are linearly dependent".into()));
    }
    Ok(qr.q().transpose())
}

/// Gaussian draw with variance `1/m`, rows then orthonormalised.
pub fn generate_measurement_matrix(config: &SensingConfig) -> Result<DMatrix<f64>> {
    config.validate()?;
    let m = config.m();
    if m > config.n {
        return Err(Error::InvalidDimension(format!(
            "{m} measurements exceed signal length {}",
            config.n
        )));
    }
    orthonormalize_rows(&gaussian_matrix(m, config.n, config.seed))
}

/// `y = Φx + v`, `v ~ N(0, σ²)` i.i.d. from `seed`.
pub fn sense(phi: &DMatrix<f64>, x: &DVector<f64>, sigma2: f64, seed: u64) -> Result<DVector<f64>> {
    check_len("Φ columns vs x", phi.ncols(), x.len())?;
    if !sigma2.is_finite() || sigma2 < 0.0 {
        return Err(Error::param("sigma2", format!("must be finite and >= 0, got {sigma2}")));
    }
    let mut y = phi * x;
    if sigma2 > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, sigma2.sqrt()).expect("positive std dev");
        y.iter_mut().for_each(|yi| *yi += normal.sample(&mut rng));
    }
    Ok(y)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Segment {
    Zero { length: usize },
    /// `amplitude · exp(−decay_rate · t)` for `t = 0..length`.
    ExpDecay { length: usize, amplitude: f64, decay_rate: f64 },
    Step { length: usize, amplitude: f64 },
    /// A short constant run of nonzeros.
    LoneGroup { length: usize, amplitude: f64 },
}

impl Segment {
    pub fn length(&self) -> usize {
        match *self {
            Segment::Zero { length }
            | Segment::ExpDecay { length, .. }
            | Segment::Step { length, .. }
            | Segment::LoneGroup { length, .. } => length,
        }
    }

    fn is_finite(&self) -> bool {
        match *self {
            Segment::Zero { .. } => true,
            Segment::ExpDecay { amplitude, decay_rate, .. } => amplitude.is_finite() && decay_rate.is_finite(),
            Segment::Step { amplitude, .. } | Segment::LoneGroup { amplitude, .. } => amplitude.is_finite(),
        }
    }
}

/// Multiplies each nonzero segment's amplitude by `1 + scale·U(−1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeJitter {
    pub seed: u64,
    pub scale: f64,
}

/// Piece-wise description of a test signal.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpec {
    n: usize,
    segments: Vec<Segment>,
    jitter: Option<AmplitudeJitter>,
}

impl BlockSpec {
    pub fn new(n: usize, segments: Vec<Segment>) -> Result<Self> {
        let total: usize = segments.iter().map(Segment::length).sum();
        if total != n {
            return Err(Error::InvalidDimension(format!(
                "signal segments cover {total} samples, expected {n}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidDimension(format!("signal length must be at least 2, got {n}")));
        }
        if let Some(i) = segments.iter().position(|s| !s.is_finite()) {
            return Err(Error::param("signal.segments", format!("segment {i} has non-finite parameters")));
        }
        Ok(Self { n, segments, jitter: None })
    }

    pub fn with_jitter(mut self, jitter: AmplitudeJitter) -> Result<Self> {
        if !jitter.scale.is_finite() || jitter.scale < 0.0 {
            return Err(Error::param("signal.jitter.scale", "must be finite and >= 0"));
        }
        self.jitter = Some(jitter);
        Ok(self)
    }

    /// The shipped length-140 reference signal: two exponentially decaying
    /// blocks, a step block and a lone three-sample group separated by zero
    /// runs (90 of 140 samples are zero). Amplitudes are sized so that the
    /// default penalties (`λ_g` = 5, or 12.5 for G-LASSO) shrink but do not
    /// erase the blocks.
    pub fn reference() -> Self {
        use Segment::*;
        let segments = vec![
            Zero { length: 15 },
            ExpDecay { length: 20, amplitude: 20.0, decay_rate: 0.15 },
            Zero { length: 20 },
            Step { length: 15, amplitude: 15.0 },
            Zero { length: 20 },
            ExpDecay { length: 12, amplitude: -25.0, decay_rate: 0.25 },
            Zero { length: 15 },
            LoneGroup { length: 3, amplitude: 9.0 },
            Zero { length: 20 },
        ];
        Self::new(140, segments).expect("reference spec is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn jitter(&self) -> Option<AmplitudeJitter> {
        self.jitter
    }
}

pub fn make_test_signal(spec: &BlockSpec) -> Result<SignalVector> {
    let mut jitter = spec
        .jitter
        .map(|j| (ChaCha8Rng::seed_from_u64(j.seed), j.scale));
    let mut gain = move || match jitter.as_mut() {
        Some((rng, scale)) => 1.0 + *scale * rng.random_range(-1.0..=1.0),
        None => 1.0,
    };
    let mut values = Vec::with_capacity(spec.n);
    for seg in &spec.segments {
        match *seg {
            Segment::Zero { length } => values.extend(std::iter::repeat_n(0.0, length)),
            Segment::ExpDecay { length, amplitude, decay_rate } => {
                let a = amplitude * gain();
                values.extend((0..length).map(|t| a * (-decay_rate * t as f64).exp()));
            }
            Segment::Step { length, amplitude } | Segment::LoneGroup { length, amplitude } => {
                let a = amplitude * gain();
                values.extend(std::iter::repeat_n(a, length));
            }
        }
    }
    SignalVector::new(values)
}
