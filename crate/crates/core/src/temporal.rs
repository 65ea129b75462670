//! Sampled pulse shapes and the discrete light modes they define.
//!
//! A profile is sampled at the midpoints `t_k = (k + 1/2) T / N` of `N`
//! uniform slices, and every constructed profile is rescaled so that the
//! midpoint rule gives `(1/T) ∫ f^2 dt = 1` exactly. The same grid is used
//! by the slice oracle, so projecting slice quadratures onto a profile is
//! an exact change of basis.

use std::f64::consts::SQRT_2;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileKind {
    /// `f1(t) = 1`
    Flat,
    /// `f2(t) = sqrt(3) (1 - t/T)`
    Ramp,
    /// `f3(t) = sqrt(3) (1 - 2t/T)`, orthogonal to `f1`
    Odd,
    /// `sqrt(2) cos(Omega t)`
    Cosine { omega_t: f64 },
    /// `sqrt(2) sin(Omega t)`
    Sine { omega_t: f64 },
}

impl ProfileKind {
    /// Analytic value at the dimensionless time `s = t/T`, before grid renormalization.
    pub fn eval(&self, s: f64) -> f64 {
        let r3 = 3f64.sqrt();
        match *self {
            ProfileKind::Flat => 1.0,
            ProfileKind::Ramp => r3 * (1.0 - s),
            ProfileKind::Odd => r3 * (1.0 - 2.0 * s),
            ProfileKind::Cosine { omega_t } => SQRT_2 * (omega_t * s).cos(),
            ProfileKind::Sine { omega_t } => SQRT_2 * (omega_t * s).sin(),
        }
    }
}

impl FromStr for ProfileKind {
    type Err = Error;

    /// Accepts `flat`, `ramp`, `f3`, `cosine:<OmegaT>` and `sine:<OmegaT>`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let omega_t = || -> Result<f64> {
            arg.and_then(|a| a.parse().ok())
                .ok_or_else(|| Error::Unsupported(format!("profile `{s}` needs a numeric OmegaT")))
        };
        match name {
            "flat" | "f1" => Ok(ProfileKind::Flat),
            "ramp" | "f2" => Ok(ProfileKind::Ramp),
            "f3" | "odd" => Ok(ProfileKind::Odd),
            "cosine" | "cos" => Ok(ProfileKind::Cosine { omega_t: omega_t()? }),
            "sine" | "sin" => Ok(ProfileKind::Sine { omega_t: omega_t()? }),
            _ => Err(Error::Unsupported(format!("unknown profile kind `{s}`"))),
        }
    }
}

/// A pulse shape sampled on `N` uniform slices of a pulse of duration `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalProfile {
    samples: Vec<f64>,
    duration: f64,
}

impl TemporalProfile {
    /// Wraps raw samples, rescaling them to unit grid norm.
    pub fn from_samples(samples: Vec<f64>, duration: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter { name: "N", value: 0.0, reason: "need at least one slice" });
        }
        if !(duration > 0.0) {
            return Err(Error::InvalidParameter { name: "T", value: duration, reason: "duration must be positive" });
        }
        let norm = (samples.iter().map(|v| v * v).sum::<f64>() / samples.len() as f64).sqrt();
        if !(norm > 1e-300) {
            return Err(Error::ZeroProfile);
        }
        Ok(TemporalProfile { samples: samples.into_iter().map(|v| v / norm).collect(), duration })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn slices(&self) -> usize {
        self.samples.len()
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// Slice midpoints `t_k`.
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.samples.len() as f64;
        let t = self.duration;
        (0..self.samples.len()).map(move |k| (k as f64 + 0.5) * t / n)
    }

    /// Pointwise product with `other`, renormalized (e.g. `f3` times a sideband carrier).
    pub fn modulate(&self, other: &TemporalProfile) -> Result<TemporalProfile> {
        check_grid(self, other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect();
        TemporalProfile::from_samples(samples, self.duration)
    }
}

/// Samples `kind` on `n` slices of a unit-duration pulse.
pub fn profile(kind: ProfileKind, n: usize) -> Result<TemporalProfile> {
    if n == 0 {
        return Err(Error::InvalidParameter { name: "N", value: 0.0, reason: "need at least one slice" });
    }
    match kind {
        ProfileKind::Cosine { omega_t } | ProfileKind::Sine { omega_t } if !(omega_t > 0.0) => {
            return Err(Error::InvalidParameter { name: "OmegaT", value: omega_t, reason: "must be positive" });
        }
        _ => {}
    }
    let samples = (0..n).map(|k| kind.eval((k as f64 + 0.5) / n as f64)).collect();
    TemporalProfile::from_samples(samples, 1.0)
}

fn check_grid(f: &TemporalProfile, g: &TemporalProfile) -> Result<()> {
    if f.slices() != g.slices() {
        return Err(Error::GridMismatch(format!("{} vs {} slices", f.slices(), g.slices())));
    }
    if (f.duration - g.duration).abs() > 1e-12 * f.duration {
        return Err(Error::GridMismatch(format!("duration {} vs {}", f.duration, g.duration)));
    }
    Ok(())
}

/// `(1/T) ∫ f g dt` by the midpoint rule.
pub fn inner(f: &TemporalProfile, g: &TemporalProfile) -> Result<f64> {
    check_grid(f, g)?;
    Ok(raw_inner(&f.samples, &g.samples))
}

fn raw_inner(f: &[f64], g: &[f64]) -> f64 {
    f.iter().zip(g).map(|(a, b)| a * b).sum::<f64>() / f.len() as f64
}

/// Gram–Schmidt basis of a profile list.
#[derive(Debug, Clone)]
pub struct Orthogonalization {
    pub basis: Vec<TemporalProfile>,
    /// `coefficients[(i, j)] = inner(input_i, basis_j)`; lower triangular.
    pub coefficients: DMatrix<f64>,
}

impl Orthogonalization {
    /// `sum_j coefficients[(i, j)] basis_j`, sample by sample.
    pub fn reconstruct(&self, i: usize) -> Vec<f64> {
        let n = self.basis[0].slices();
        (0..n)
            .map(|k| (0..self.basis.len()).map(|j| self.coefficients[(i, j)] * self.basis[j].samples[k]).sum())
            .collect()
    }
}

pub fn orthogonalize(fs: &[TemporalProfile]) -> Result<Orthogonalization> {
    let Some(first) = fs.first() else {
        return Err(Error::Unsupported("empty profile list".into()));
    };
    for f in fs {
        check_grid(first, f)?;
    }
    let m = fs.len();
    let gram = DMatrix::from_fn(m, m, |i, j| raw_inner(&fs[i].samples, &fs[j].samples));
    let gram_det = gram.determinant();
    if gram_det < 1e-12 {
        return Err(Error::RankDeficient { gram_det });
    }

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    for f in fs {
        let mut v = f.samples.clone();
        // modified Gram–Schmidt, two sweeps for stability
        for _ in 0..2 {
            for b in &basis {
                let c = raw_inner(&v, b);
                v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= c * bi);
            }
        }
        let norm = raw_inner(&v, &v).sqrt();
        v.iter_mut().for_each(|vi| *vi /= norm);
        basis.push(v);
    }

    let coefficients = DMatrix::from_fn(m, m, |i, j| if j <= i { raw_inner(&fs[i].samples, &basis[j]) } else { 0.0 });
    let basis = basis
        .into_iter()
        .map(|samples| TemporalProfile { samples, duration: first.duration })
        .collect();
    Ok(Orthogonalization { basis, coefficients })
}

/// Unit-norm slice coefficients `c_k ∝ f(t_k)` of the light mode defined by `profile`.
pub fn mode_projector(profile: &TemporalProfile, slices: usize) -> Result<Vec<f64>> {
    if profile.slices() != slices {
        return Err(Error::GridMismatch(format!("profile has {} slices, system has {slices}", profile.slices())));
    }
    let norm = profile.samples.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 1e-300) {
        return Err(Error::ZeroProfile);
    }
    Ok(profile.samples.iter().map(|v| v / norm).collect())
}
