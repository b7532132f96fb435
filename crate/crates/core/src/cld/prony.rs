//! Causal Prony-series surrogate of a complex stiffness curve.
//!
//! `K_fit(ω) = k_inf + Σ_j k_j·(iωτ_j)/(1 + iωτ_j)`
//!
//! Each branch is a Maxwell element (spring `k_j` in series with a dashpot of
//! relaxation time `τ_j`), so the same parameters drive the time-domain hinge
//! used by the foil simulator.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stiffness::ComplexStiffness;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PronyBranch {
    /// N·m/rad
    pub stiffness: f64,
    /// s
    pub tau: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PronyFit {
    /// Equilibrium stiffness, N·m/rad.
    pub k_inf: f64,
    /// Sorted by ascending `tau`.
    pub branches: Vec<PronyBranch>,
    /// Relative RMS error over the fitted samples.
    pub fit_residual: f64,
}

impl PronyFit {
    /// Builds a validated model; branches are sorted by relaxation time.
    pub fn new(k_inf: f64, mut branches: Vec<PronyBranch>) -> Result<Self> {
        branches.sort_by(|a, b| a.tau.total_cmp(&b.tau));
        let fit = Self {
            k_inf,
            branches,
            fit_residual: 0.0,
        };
        fit.validate()?;
        Ok(fit)
    }

    /// A purely elastic hinge.
    pub fn spring(k: f64) -> Result<Self> {
        Self::new(k, Vec::new())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_inf > 0.0 && self.k_inf.is_finite()) {
            return Err(Error::Domain(format!("k_inf must be > 0, got {}", self.k_inf)));
        }
        for b in &self.branches {
            if !(b.stiffness >= 0.0 && b.stiffness.is_finite()) {
                return Err(Error::Domain(format!(
                    "branch stiffness must be >= 0, got {}",
                    b.stiffness
                )));
            }
            if !(b.tau > 0.0 && b.tau.is_finite()) {
                return Err(Error::Domain(format!("branch tau must be > 0, got {}", b.tau)));
            }
        }
        if self.branches.windows(2).any(|w| w[0].tau > w[1].tau) {
            return Err(Error::Domain("branches must be sorted by ascending tau".into()));
        }
        Ok(())
    }

    pub fn response(&self, omega: f64) -> Complex64 {
        self.branches
            .iter()
            .fold(Complex64::new(self.k_inf, 0.0), |acc, b| {
                acc + b.stiffness * debye(omega * b.tau)
            })
    }

    /// Smallest relaxation time among branches carrying stiffness.
    pub fn min_tau(&self) -> Option<f64> {
        self.branches
            .iter()
            .filter(|b| b.stiffness > 0.0)
            .map(|b| b.tau)
            .min_by(f64::total_cmp)
    }

    pub fn n_states(&self) -> usize {
        self.branches.len()
    }

    /// Hinge moment for angle `theta` with dashpot displacements `states`.
    pub fn moment(&self, theta: f64, states: &[f64]) -> f64 {
        self.k_inf * theta
            + self
                .branches
                .iter()
                .zip(states)
                .map(|(b, z)| b.stiffness * (theta - z))
                .sum::<f64>()
    }

    /// Writes `dz_j/dt = (theta - z_j)/tau_j` into `out`.
    pub fn state_rates(&self, theta: f64, states: &[f64], out: &mut [f64]) {
        for ((b, z), dz) in self.branches.iter().zip(states).zip(out.iter_mut()) {
            *dz = (theta - z) / b.tau;
        }
    }

    /// Dashpot displacements on the periodic orbit of `theta(t) = amp·sin(ωt + phase)` at time `t`.
    pub fn periodic_states(&self, amp: f64, omega: f64, phase: f64, t: f64) -> Vec<f64> {
        self.branches
            .iter()
            .map(|b| {
                let h = Complex64::new(1.0, omega * b.tau).inv();
                // θ = Im{amp e^{i(ωt+φ)}}, z = Im{h amp e^{i(ωt+φ)}}
                (h * Complex64::from_polar(amp, omega * t + phase)).im
            })
            .collect()
    }
}

#[inline]
fn debye(x: f64) -> Complex64 {
    // iωτ/(1+iωτ) = (x² + ix)/(1 + x²)
    let d = 1.0 + x * x;
    Complex64::new(x * x / d, x / d)
}

pub fn prony_frequency_response(fit: &PronyFit, omega: f64) -> Result<ComplexStiffness> {
    if !(omega >= 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("omega must be finite and >= 0, got {omega}")));
    }
    fit.validate()?;
    Ok(ComplexStiffness::from_complex(fit.response(omega)))
}

#[derive(Clone, Debug)]
pub struct PronyFitOptions {
    pub n_starts: usize,
    pub max_iterations: usize,
    /// Bounds on relaxation times. `None` uses `[0.1/ω_max, 10/ω_min]` over the
    /// positive sample frequencies.
    pub tau_bounds: Option<(f64, f64)>,
}

impl Default for PronyFitOptions {
    fn default() -> Self {
        Self {
            n_starts: 8,
            max_iterations: 200,
            tau_bounds: None,
        }
    }
}

pub fn fit_prony(samples: &[(f64, ComplexStiffness)], n_branches: usize) -> Result<PronyFit> {
    fit_prony_with(samples, n_branches, &PronyFitOptions::default())
}

/// Weighted least-squares problem for fixed relaxation times. The linear
/// coefficients (k_inf, k_j) are eliminated by a non-negative solve, so the
/// outer damped Gauss–Newton only sees the log relaxation times.
struct Problem<'a> {
    omegas: Vec<f64>,
    target: DVector<f64>,
    weights: Vec<f64>,
    samples: &'a [(f64, ComplexStiffness)],
}

struct Solution {
    coeffs: Vec<f64>,
    residual: DVector<f64>,
    cost: f64,
}

impl<'a> Problem<'a> {
    fn new(samples: &'a [(f64, ComplexStiffness)]) -> Result<Self> {
        let n = samples.len();
        let mut target = DVector::zeros(2 * n);
        let mut weights = Vec::with_capacity(n);
        for (i, (_, k)) in samples.iter().enumerate() {
            let mag = k.magnitude();
            if !(mag > 0.0 && mag.is_finite()) {
                return Err(Error::Domain(format!(
                    "sample {i} has zero or non-finite magnitude"
                )));
            }
            let w = 1.0 / mag;
            weights.push(w);
            target[2 * i] = k.storage * w;
            target[2 * i + 1] = k.loss * w;
        }
        Ok(Self {
            omegas: samples.iter().map(|s| s.0).collect(),
            target,
            weights,
            samples,
        })
    }

    fn design(&self, taus: &[f64], active: &[usize]) -> DMatrix<f64> {
        let n = self.omegas.len();
        let mut a = DMatrix::zeros(2 * n, 1 + active.len());
        for (i, (&om, &w)) in self.omegas.iter().zip(&self.weights).enumerate() {
            a[(2 * i, 0)] = w;
            for (col, &j) in active.iter().enumerate() {
                let d = debye(om * taus[j]);
                a[(2 * i, col + 1)] = d.re * w;
                a[(2 * i + 1, col + 1)] = d.im * w;
            }
        }
        a
    }

    /// Non-negative linear solve by enumerating branch subsets; `k_inf` is always active.
    fn solve(&self, taus: &[f64]) -> Option<Solution> {
        let nb = taus.len();
        let mut best: Option<(Solution, usize)> = None;
        for mask in 0u32..(1u32 << nb) {
            let active: Vec<usize> = (0..nb).filter(|j| mask & (1 << j) != 0).collect();
            let a = self.design(taus, &active);
            let svd = a.clone().svd(true, true);
            let Ok(x) = svd.solve(&self.target, 1e-13) else {
                continue;
            };
            if x.iter().skip(1).any(|&v| v < 0.0) || !(x[0] > 0.0) {
                continue;
            }
            let residual = &a * &x - &self.target;
            let cost = residual.norm_squared();
            let mut coeffs = vec![0.0; nb + 1];
            coeffs[0] = x[0];
            for (col, &j) in active.iter().enumerate() {
                coeffs[j + 1] = x[col + 1];
            }
            let nnz = active.len();
            let better = match &best {
                None => true,
                Some((b, b_nnz)) => {
                    cost < b.cost * (1.0 - 1e-12) || (cost <= b.cost * (1.0 + 1e-12) && nnz < *b_nnz)
                }
            };
            if better {
                best = Some((
                    Solution {
                        coeffs,
                        residual,
                        cost,
                    },
                    nnz,
                ));
            }
        }
        best.map(|(s, _)| s)
    }

    fn relative_rms(&self, cost: f64) -> f64 {
        (cost / self.samples.len() as f64).sqrt()
    }
}

struct StartResult {
    log_taus: Vec<f64>,
    solution: Solution,
    converged: bool,
}

fn clamp_all(u: &mut [f64], lo: f64, hi: f64) {
    for v in u.iter_mut() {
        *v = v.clamp(lo, hi);
    }
}

fn run_start(
    problem: &Problem<'_>,
    mut u: Vec<f64>,
    bounds: (f64, f64),
    max_iterations: usize,
) -> Option<StartResult> {
    let taus = |u: &[f64]| u.iter().map(|v| v.exp()).collect::<Vec<_>>();
    let mut current = problem.solve(&taus(&u))?;
    let mut lambda = 1e-3;
    let m = u.len();
    let h = 1e-6;

    for _ in 0..max_iterations {
        if current.cost == 0.0 {
            return Some(StartResult {
                log_taus: u,
                solution: current,
                converged: true,
            });
        }
        // central-difference Jacobian of the projected residual
        let rows = current.residual.len();
        let mut jac = DMatrix::zeros(rows, m);
        for j in 0..m {
            let mut up = u.clone();
            let mut dn = u.clone();
            up[j] += h;
            dn[j] -= h;
            let (Some(rp), Some(rm)) = (problem.solve(&taus(&up)), problem.solve(&taus(&dn))) else {
                return Some(StartResult {
                    log_taus: u,
                    solution: current,
                    converged: true,
                });
            };
            let col = (rp.residual - rm.residual) / (2.0 * h);
            jac.set_column(j, &col);
        }
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &current.residual;
        if jtr.amax() <= 1e-15 * current.cost.sqrt().max(1e-300) {
            return Some(StartResult {
                log_taus: u,
                solution: current,
                converged: true,
            });
        }

        let mut accepted = false;
        while lambda < 1e16 {
            let mut damped = jtj.clone();
            for d in 0..m {
                damped[(d, d)] += lambda * jtj[(d, d)].max(1e-12);
            }
            let Some(step) = damped.lu().solve(&(-&jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial = u.clone();
            for (t, s) in trial.iter_mut().zip(step.iter()) {
                *t += s;
            }
            clamp_all(&mut trial, bounds.0, bounds.1);
            match problem.solve(&taus(&trial)) {
                Some(sol) if sol.cost < current.cost => {
                    let rel_drop = (current.cost - sol.cost) / current.cost;
                    let moved = trial
                        .iter()
                        .zip(&u)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    u = trial;
                    current = sol;
                    lambda = (lambda / 10.0).max(1e-12);
                    accepted = true;
                    if rel_drop < 1e-14 || moved < 1e-12 {
                        return Some(StartResult {
                            log_taus: u,
                            solution: current,
                            converged: true,
                        });
                    }
                    break;
                }
                _ => lambda *= 10.0,
            }
        }
        if !accepted {
            // no descent direction left: a (possibly bound-constrained) minimum
            return Some(StartResult {
                log_taus: u,
                solution: current,
                converged: true,
            });
        }
    }
    Some(StartResult {
        log_taus: u,
        solution: current,
        converged: false,
    })
}

/// Fits an `n_branches` Prony series to complex stiffness samples by
/// multi-start damped Gauss–Newton on the log relaxation times.
pub fn fit_prony_with(
    samples: &[(f64, ComplexStiffness)],
    n_branches: usize,
    options: &PronyFitOptions,
) -> Result<PronyFit> {
    let needed = 2 * n_branches + 1;
    if samples.len() < needed {
        return Err(Error::Arity(format!(
            "{n_branches}-branch Prony fit needs at least {needed} samples, got {}",
            samples.len()
        )));
    }
    let mut omegas: Vec<f64> = samples.iter().map(|s| s.0).collect();
    if omegas.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::Domain("sample frequencies must be finite and >= 0".into()));
    }
    omegas.sort_by(f64::total_cmp);
    if omegas.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Domain("sample frequencies must be distinct".into()));
    }
    let problem = Problem::new(samples)?;

    let w_min = omegas.iter().copied().find(|w| *w > 0.0).unwrap_or(1.0);
    let w_max = *omegas.last().unwrap();
    let (tau_lo, tau_hi) = options.tau_bounds.unwrap_or((0.1 / w_max, 10.0 / w_min));
    if !(tau_lo > 0.0 && tau_hi > tau_lo) {
        return Err(Error::Domain(format!("invalid tau bounds ({tau_lo}, {tau_hi})")));
    }
    let bounds = (tau_lo.ln(), tau_hi.ln());

    if n_branches == 0 {
        let sol = problem.solve(&[]).ok_or(Error::Fit {
            best_residual: f64::INFINITY,
        })?;
        let mut fit = PronyFit::new(sol.coeffs[0], Vec::new())?;
        fit.fit_residual = problem.relative_rms(sol.cost);
        return Ok(fit);
    }

    // log-spaced start grid across the band
    let n_starts = options.n_starts.max(1);
    let (g_lo, g_hi) = ((1.0 / w_max).ln(), (1.0 / w_min).ln());
    let grid: Vec<f64> = (0..n_starts)
        .map(|s| {
            if n_starts == 1 {
                0.5 * (g_lo + g_hi)
            } else {
                g_lo + (g_hi - g_lo) * s as f64 / (n_starts - 1) as f64
            }
        })
        .collect();

    let mut best: Option<StartResult> = None;
    let mut best_any = f64::INFINITY;
    for s in 0..n_starts {
        let mut u: Vec<f64> = (0..n_branches)
            .map(|j| grid[(s + j * n_starts / n_branches) % n_starts] + 1e-3 * j as f64)
            .collect();
        clamp_all(&mut u, bounds.0, bounds.1);
        let Some(result) = run_start(&problem, u, bounds, options.max_iterations) else {
            continue;
        };
        best_any = best_any.min(problem.relative_rms(result.solution.cost));
        if !result.converged {
            continue;
        }
        let nnz = |r: &StartResult| r.solution.coeffs.iter().skip(1).filter(|c| **c > 0.0).count();
        let better = match &best {
            None => true,
            Some(b) => {
                let (c, bc) = (result.solution.cost, b.solution.cost);
                c < bc * (1.0 - 1e-9) || (c <= bc * (1.0 + 1e-9) && nnz(&result) < nnz(b))
            }
        };
        if better {
            best = Some(result);
        }
    }

    let best = best.ok_or(Error::Fit {
        best_residual: best_any,
    })?;
    let branches = best
        .log_taus
        .iter()
        .zip(best.solution.coeffs.iter().skip(1))
        .map(|(u, k)| PronyBranch {
            stiffness: *k,
            tau: u.exp(),
        })
        .collect();
    let mut fit = PronyFit::new(best.solution.coeffs[0], branches)?;
    fit.fit_residual = problem.relative_rms(best.solution.cost);
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample(fit: &PronyFit, freqs: &[f64]) -> Vec<(f64, ComplexStiffness)> {
        freqs
            .iter()
            .map(|f| {
                let w = 2.0 * PI * f;
                (w, prony_frequency_response(fit, w).unwrap())
            })
            .collect()
    }

    fn band(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn dc_response_is_equilibrium_stiffness() {
        let fit = PronyFit::new(
            1.5,
            vec![
                PronyBranch { stiffness: 0.3, tau: 0.01 },
                PronyBranch { stiffness: 2.0, tau: 0.2 },
            ],
        )
        .unwrap();
        let k = prony_frequency_response(&fit, 0.0).unwrap();
        assert_eq!(k, ComplexStiffness::new(1.5, 0.0));
    }

    #[test]
    fn single_branch_loss_peaks_at_half_stiffness() {
        let fit = PronyFit::new(1.0, vec![PronyBranch { stiffness: 0.8, tau: 0.04 }]).unwrap();
        let k = prony_frequency_response(&fit, 1.0 / 0.04).unwrap();
        assert_eq!(k.loss, 0.4);
    }

    #[test]
    fn recovers_single_branch_model() {
        let truth = PronyFit::new(0.9, vec![PronyBranch { stiffness: 0.35, tau: 0.03 }]).unwrap();
        let samples = sample(&truth, &band(12, 0.25, 5.0));
        let fit = fit_prony(&samples, 1).unwrap();
        assert!((fit.k_inf - 0.9).abs() / 0.9 < 1e-6, "{fit:?}");
        assert!((fit.branches[0].stiffness - 0.35).abs() / 0.35 < 1e-6, "{fit:?}");
        assert!((fit.branches[0].tau - 0.03).abs() / 0.03 < 1e-6, "{fit:?}");
    }

    #[test]
    fn elastic_samples_give_elastic_fit() {
        let samples: Vec<_> = band(9, 0.5, 5.0)
            .into_iter()
            .map(|f| (2.0 * PI * f, ComplexStiffness::new(0.42, 0.0)))
            .collect();
        let fit = fit_prony(&samples, 2).unwrap();
        assert!((fit.k_inf - 0.42).abs() < 1e-12);
        assert!(fit.branches.iter().all(|b| b.stiffness.abs() < 1e-12));
        assert!(fit.fit_residual < 1e-12);
    }

    #[test]
    fn too_few_samples_is_arity_error() {
        let samples = vec![(1.0, ComplexStiffness::new(1.0, 0.1)); 4];
        assert!(matches!(fit_prony(&samples, 2), Err(Error::Arity(_))));
    }

    #[test]
    fn duplicate_frequencies_rejected() {
        let samples = vec![(1.0, ComplexStiffness::new(1.0, 0.1)); 5];
        assert!(fit_prony(&samples, 1).is_err());
    }

    #[test]
    fn periodic_states_solve_the_state_equation() {
        let fit = PronyFit::new(1.0, vec![PronyBranch { stiffness: 0.5, tau: 0.07 }]).unwrap();
        let (amp, om, phase) = (0.2, 9.0, 0.3);
        let t = 0.41;
        let z = fit.periodic_states(amp, om, phase, t)[0];
        let dt = 1e-6;
        let zp = fit.periodic_states(amp, om, phase, t + dt)[0];
        let zm = fit.periodic_states(amp, om, phase, t - dt)[0];
        let theta = amp * (om * t + phase).sin();
        let mut rate = [0.0];
        fit.state_rates(theta, &[z], &mut rate);
        assert!(((zp - zm) / (2.0 * dt) - rate[0]).abs() < 1e-6);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn round_trip_is_exact(
            k_inf in 0.05f64..5.0,
            k1 in 0.05f64..5.0,
            k2 in 0.05f64..5.0,
            log_tau1 in -2.3f64..-1.0,
            sep in 0.7f64..1.5,
        ) {
            let t1 = 10f64.powf(log_tau1);
            let t2 = t1 * 10f64.powf(sep);
            let truth = PronyFit::new(
                k_inf,
                vec![PronyBranch { stiffness: k1, tau: t1 }, PronyBranch { stiffness: k2, tau: t2 }],
            ).unwrap();
            let samples = sample(&truth, &band(20, 0.25, 5.0));
            let fit = fit_prony(&samples, 2).unwrap();
            for (w, k) in &samples {
                let got = fit.response(*w);
                let rel = (got - k.to_complex()).norm() / k.magnitude();
                proptest::prop_assert!(rel < 1e-8, "rel {rel:e} at {w}: {fit:?}");
            }
        }
    }
}
