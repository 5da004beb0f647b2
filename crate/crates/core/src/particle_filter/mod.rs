//! Sequential Monte Carlo filtering for scalar state-space models.
//!
//! Two filters are provided: the fully adapted filter for the LGSS model,
//! which samples from the locally optimal proposal, and a generic bootstrap
//! filter that proposes from the state dynamics. Both resample
//! multinomially at every step and keep the whole particle history so a
//! trajectory can be traced back through the ancestor indices.

mod bootstrap;
mod fully_adapted;

pub use bootstrap::{bootstrap_filter, bootstrap_sv};
pub use fully_adapted::fully_adapted_lgss;

use rand::Rng;

use crate::error::{Error, Result};

/// The full particle history of one filter run.
///
/// Storage is time-major: column `t` holds the `N` values at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSystem {
    num_particles: usize,
    num_steps: usize,
    particles: Vec<f64>,
    log_weights: Vec<f64>,
    normalized_weights: Vec<f64>,
    ancestors: Vec<usize>,
}

impl ParticleSystem {
    /// Allocates a system for `num_particles` particles over times `0..=len`,
    /// with identity ancestors and uniform weights everywhere.
    pub(crate) fn new(num_particles: usize, len: usize) -> Self {
        let num_steps = len + 1;
        let size = num_particles * num_steps;
        let uniform = 1.0 / num_particles as f64;
        let ancestors = (0..num_steps).flat_map(|_| 0..num_particles).collect();
        Self {
            num_particles,
            num_steps,
            particles: vec![0.0; size],
            log_weights: vec![0.0; size],
            normalized_weights: vec![uniform; size],
            ancestors,
        }
    }

    pub fn num_particles(&self) -> usize {
        self.num_particles
    }

    /// `T + 1`.
    pub fn num_steps(&self) -> usize {
        self.num_steps
    }

    fn range(&self, t: usize) -> std::ops::Range<usize> {
        t * self.num_particles..(t + 1) * self.num_particles
    }

    pub fn particles(&self, t: usize) -> &[f64] {
        &self.particles[self.range(t)]
    }

    /// Un-normalised log-weights of column `t`.
    pub fn log_weights(&self, t: usize) -> &[f64] {
        &self.log_weights[self.range(t)]
    }

    pub fn weights(&self, t: usize) -> &[f64] {
        &self.normalized_weights[self.range(t)]
    }

    /// `a_t^(i)`: index into column `t - 1` of the parent of particle `i`.
    /// Column 0 is the identity.
    pub fn ancestors(&self, t: usize) -> &[usize] {
        &self.ancestors[self.range(t)]
    }

    pub(crate) fn particles_mut(&mut self, t: usize) -> &mut [f64] {
        let r = self.range(t);
        &mut self.particles[r]
    }

    pub(crate) fn ancestors_mut(&mut self, t: usize) -> &mut [usize] {
        let r = self.range(t);
        &mut self.ancestors[r]
    }

    #[cfg(test)]
    pub(crate) fn weights_mut(&mut self, t: usize) -> (&mut [f64], &mut [f64]) {
        let r = self.range(t);
        (&mut self.log_weights[r.clone()], &mut self.normalized_weights[r])
    }

    /// Fills column `t` of the log-weights from the particles at `t` and
    /// normalises it, returning `(max_log_weight, sum_shifted)`.
    pub(crate) fn weigh(&mut self, t: usize, log_weight: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
        let r = self.range(t);
        let log_w = &mut self.log_weights[r.clone()];
        for (lw, &x) in log_w.iter_mut().zip(&self.particles[r.clone()]) {
            *lw = log_weight(x);
        }
        normalize_into(log_w, &mut self.normalized_weights[r])
    }

    /// Splits out column `t - 1` (read) and column `t` (write) of the particles.
    pub(crate) fn particle_columns(&mut self, t: usize) -> (&[f64], &mut [f64]) {
        let n = self.num_particles;
        let (head, tail) = self.particles.split_at_mut(t * n);
        (&head[(t - 1) * n..], &mut tail[..n])
    }

    /// Indices, one per time step `0..=T`, of the ancestral line of particle
    /// `index` at the final time.
    pub fn lineage(&self, index: usize) -> Vec<usize> {
        let mut line = vec![0; self.num_steps];
        let mut j = index;
        for t in (0..self.num_steps).rev() {
            line[t] = j;
            if t > 0 {
                j = self.ancestors(t)[j];
            }
        }
        line
    }

    /// State path `x_{0:T}` along the lineage of final particle `index`.
    pub fn path(&self, index: usize) -> Vec<f64> {
        self.lineage(index)
            .into_iter()
            .enumerate()
            .map(|(t, j)| self.particles(t)[j])
            .collect()
    }
}

/// Result of a single filter run.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutput {
    /// Filtered state estimates `x_hat_{0:T}`.
    pub state_estimates: Vec<f64>,
    /// Estimate of `log p(y_{1:T})`; unbiased for the likelihood itself.
    pub log_likelihood: f64,
    /// A trajectory `x_{0:T}` drawn from the final particle genealogy.
    pub sampled_trajectory: Option<Vec<f64>>,
    pub system: ParticleSystem,
}

/// Normalised weights together with the quantities needed by the
/// log-likelihood recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedWeights {
    pub weights: Vec<f64>,
    pub max_log_weight: f64,
    /// `sum_i exp(log v_i - max_log_weight)`
    pub sum_shifted: f64,
}

/// Normalises log-weights through the max-shift `exp(v_i - v_max) / sum`.
pub fn normalize_log_weights(log_weights: &[f64]) -> Result<NormalizedWeights> {
    let mut weights = vec![0.0; log_weights.len()];
    let (max_log_weight, sum_shifted) = normalize_into(log_weights, &mut weights)?;
    Ok(NormalizedWeights {
        weights,
        max_log_weight,
        sum_shifted,
    })
}

pub(crate) fn normalize_into(log_weights: &[f64], out: &mut [f64]) -> Result<(f64, f64)> {
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() || log_weights.iter().any(|w| w.is_nan()) {
        return Err(Error::Degeneracy { step: None });
    }
    let mut sum = 0.0;
    for (o, &w) in out.iter_mut().zip(log_weights) {
        *o = (w - max).exp();
        sum += *o;
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
    Ok((max, sum))
}

/// `log((1/N) sum_i v_i)` recovered from the shifted representation.
pub fn log_likelihood_increment(max_log_weight: f64, sum_shifted: f64, num_particles: usize) -> f64 {
    max_log_weight + sum_shifted.ln() - (num_particles as f64).ln()
}

/// `N` i.i.d. draws from the categorical distribution given by `weights`,
/// returned as 0-based indices.
pub fn multinomial_resample<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<Vec<usize>> {
    let mut out = vec![0; weights.len()];
    let mut cumulative = Vec::with_capacity(weights.len());
    resample_into(weights, rng, &mut cumulative, &mut out)?;
    Ok(out)
}

pub(crate) fn resample_into<R: Rng + ?Sized>(
    weights: &[f64],
    rng: &mut R,
    cumulative: &mut Vec<f64>,
    out: &mut [usize],
) -> Result<()> {
    cumulative.clear();
    let mut acc = 0.0;
    let mut last_positive = None;
    for (i, &w) in weights.iter().enumerate() {
        if w < 0.0 || !w.is_finite() {
            return Err(Error::Degeneracy { step: None });
        }
        if w > 0.0 {
            last_positive = Some(i);
        }
        acc += w;
        cumulative.push(acc);
    }
    let last_positive = last_positive.ok_or(Error::Degeneracy { step: None })?;
    for o in out.iter_mut() {
        let u = rng.random::<f64>() * acc;
        let j = cumulative.partition_point(|&c| c <= u);
        *o = j.min(last_positive);
    }
    Ok(())
}

/// Draws a final particle with probability `w_T^(j)` and returns its
/// ancestral path `x_{0:T}`.
pub fn sample_trajectory<R: Rng + ?Sized>(system: &ParticleSystem, rng: &mut R) -> Result<Vec<f64>> {
    let last = system.num_steps() - 1;
    let mut cumulative = Vec::with_capacity(system.num_particles());
    let mut pick = [0usize];
    resample_into(system.weights(last), rng, &mut cumulative, &mut pick)?;
    Ok(system.path(pick[0]))
}
