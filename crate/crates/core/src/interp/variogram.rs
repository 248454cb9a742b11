//! Empirical semivariance (Matheron estimator) and weighted least-squares
//! fitting of the spherical variogram model.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::geo::DistanceMetric;
use crate::math;

use super::{InterpError, SamplePoint};

/// Spherical variogram: nugget discontinuity at the origin, rises to the
/// sill at `range_km`, flat beyond.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct VariogramModel {
    pub nugget: f64,
    pub sill: f64,
    pub range_km: f64,
}

impl VariogramModel {
    pub fn new(nugget: f64, sill: f64, range_km: f64) -> Result<Self, InterpError> {
        if !(nugget >= 0.0) || !(sill >= nugget) || !(range_km > 0.0) {
            return Err(InterpError::InvalidInput(format!(
                "need 0 <= nugget <= sill and range > 0, got nugget={nugget} sill={sill} range={range_km}"
            )));
        }
        Ok(VariogramModel { nugget, sill, range_km })
    }

    /// Semivariance at separation `h`; `gamma(0) == 0` by convention.
    pub fn gamma(&self, h: f64) -> f64 {
        if h <= 0.0 {
            0.0
        } else if h >= self.range_km {
            self.sill
        } else {
            let r = h / self.range_km;
            self.nugget + (self.sill - self.nugget) * (1.5 * r - 0.5 * r * r * r)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariogramBin {
    pub lag_km: f64,
    pub semivariance: f64,
    pub pairs: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalVariogram {
    pub bins: Vec<VariogramBin>,
}

impl EmpiricalVariogram {
    pub fn max_lag(&self) -> f64 {
        self.bins.last().map(|b| b.lag_km).unwrap_or(0.0)
    }
}

/// Matheron estimator over equal-width lag bins: all unordered pairs within
/// `max_lag` are binned, empty bins are dropped.
pub fn empirical_variogram(
    train: &[SamplePoint],
    n_bins: usize,
    max_lag: f64,
    metric: DistanceMetric,
) -> Result<EmpiricalVariogram, InterpError> {
    if train.len() < 2 {
        return Err(InterpError::InvalidInput(format!(
            "need at least 2 points, got {}",
            train.len()
        )));
    }
    if n_bins == 0 || !(max_lag > 0.0) {
        return Err(InterpError::InvalidInput(format!(
            "need n_bins >= 1 and max_lag > 0, got n_bins={n_bins} max_lag={max_lag}"
        )));
    }

    let width = max_lag / n_bins as f64;
    let mut sums = vec![0.0f64; n_bins];
    let mut counts = vec![0u64; n_bins];
    for i in 0..train.len() {
        for j in (i + 1)..train.len() {
            let d = metric.distance(train[i].location, train[j].location);
            if d > max_lag {
                continue;
            }
            let bin = ((math::floor(d / width)) as usize).min(n_bins - 1);
            let diff = train[i].value - train[j].value;
            sums[bin] += diff * diff;
            counts[bin] += 1;
        }
    }

    let bins = (0..n_bins)
        .filter(|&b| counts[b] > 0)
        .map(|b| VariogramBin {
            lag_km: (b as f64 + 0.5) * width,
            semivariance: sums[b] / (2.0 * counts[b] as f64),
            pairs: counts[b],
        })
        .collect();
    Ok(EmpiricalVariogram { bins })
}

/// Fits a spherical model by pair-count-weighted least squares: a coarse
/// grid over (nugget, sill, range) followed by Nelder-Mead refinement from
/// the best grid cell.
pub fn fit_spherical(ev: &EmpiricalVariogram) -> Result<VariogramModel, InterpError> {
    if ev.bins.len() < 3 {
        return Err(InterpError::FitFailed(format!(
            "need at least 3 populated bins, got {}",
            ev.bins.len()
        )));
    }
    let max_lag = ev.max_lag();
    let peak = ev.bins.iter().fold(0.0f64, |m, b| m.max(b.semivariance));
    if peak == 0.0 {
        // Constant field: accept the degenerate all-zero model.
        return VariogramModel::new(0.0, 0.0, max_lag);
    }

    // Sill proxy: pair-weighted mean semivariance over the upper half of the
    // lag axis (the flat part of a spherical model once beyond the range).
    let half = max_lag / 2.0;
    let (mut s_num, mut s_den) = (0.0, 0.0);
    for b in &ev.bins {
        if b.lag_km >= half {
            s_num += b.semivariance * b.pairs as f64;
            s_den += b.pairs as f64;
        }
    }
    let s2 = if s_den > 0.0 { s_num / s_den } else { peak };

    let objective = |p: &[f64; 3]| -> f64 {
        let m = project(p, max_lag);
        ev.bins
            .iter()
            .map(|b| {
                let e = m.gamma(b.lag_km) - b.semivariance;
                b.pairs as f64 * e * e
            })
            .sum()
    };

    // 20x20x20 grid; cells with sill < nugget are infeasible and skipped.
    let steps = 20;
    let mut best = [0.0, s2, max_lag];
    let mut best_err = objective(&best);
    for i in 0..steps {
        let nugget = s2 * i as f64 / (steps - 1) as f64;
        for j in 0..steps {
            let sill = 2.0 * s2 * j as f64 / (steps - 1) as f64;
            if sill < nugget {
                continue;
            }
            for k in 0..steps {
                let range = 2.0 * max_lag * (k + 1) as f64 / steps as f64;
                let p = [nugget, sill - nugget, range];
                let err = objective(&p);
                if err < best_err {
                    best_err = err;
                    best = p;
                }
            }
        }
    }

    let refined = nelder_mead(objective, best, [s2 * 0.05 + 1e-12, s2 * 0.05 + 1e-12, max_lag * 0.05], 250);
    Ok(project(&refined, max_lag))
}

/// Maps the unconstrained search vector (nugget, partial sill, range) onto
/// the feasible parameter set.
fn project(p: &[f64; 3], max_lag: f64) -> VariogramModel {
    let nugget = p[0].max(0.0);
    let psill = p[1].max(0.0);
    let range = p[2].clamp(max_lag * 1e-6, 2.0 * max_lag);
    VariogramModel { nugget, sill: nugget + psill, range_km: range }
}

/// Plain Nelder-Mead on 3 parameters; derivative-free, which copes with the
/// spherical model's kink at h == range.
fn nelder_mead<F: Fn(&[f64; 3]) -> f64>(f: F, start: [f64; 3], scale: [f64; 3], iters: usize) -> [f64; 3] {
    const ALPHA: f64 = 1.0;
    const GAMMA: f64 = 2.0;
    const RHO: f64 = 0.5;
    const SIGMA: f64 = 0.5;

    let mut simplex: Vec<([f64; 3], f64)> = Vec::with_capacity(4);
    simplex.push((start, f(&start)));
    for d in 0..3 {
        let mut v = start;
        v[d] += scale[d];
        simplex.push((v, f(&v)));
    }

    for _ in 0..iters {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let best = simplex[0];
        let worst = simplex[3];
        let mut centroid = [0.0; 3];
        for s in &simplex[..3] {
            for d in 0..3 {
                centroid[d] += s.0[d] / 3.0;
            }
        }

        let mut reflected = [0.0; 3];
        for d in 0..3 {
            reflected[d] = centroid[d] + ALPHA * (centroid[d] - worst.0[d]);
        }
        let fr = f(&reflected);

        if fr < best.1 {
            let mut expanded = [0.0; 3];
            for d in 0..3 {
                expanded[d] = centroid[d] + GAMMA * (reflected[d] - centroid[d]);
            }
            let fe = f(&expanded);
            simplex[3] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[2].1 {
            simplex[3] = (reflected, fr);
        } else {
            let mut contracted = [0.0; 3];
            for d in 0..3 {
                contracted[d] = centroid[d] + RHO * (worst.0[d] - centroid[d]);
            }
            let fc = f(&contracted);
            if fc < worst.1 {
                simplex[3] = (contracted, fc);
            } else {
                for i in 1..4 {
                    let mut v = simplex[i].0;
                    for d in 0..3 {
                        v[d] = best.0[d] + SIGMA * (v[d] - best.0[d]);
                    }
                    simplex[i] = (v, f(&v));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    simplex[0].0
}
