//! Differential evolution (rand/1/bin) on a torus of angles, plus a
//! Nelder-Mead polish of the winner. Everything maximizes.

use std::f64::consts::PI;

use rand::Rng as _;
use rayon::prelude::*;

use super::OptimizerSettings;
use crate::rng::Rng;

pub(crate) const CROSSOVER: f64 = 0.9;
pub(crate) const DIFFERENTIAL_WEIGHT: f64 = 0.7;
/// Generations without an improvement above `tolerance` before a restart stops.
const STAGNATION_WINDOW: usize = 30;

/// Maps any angle into `[-π, π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let w = x - two_pi * ((x + PI) / two_pi).floor();
    if w >= PI {
        w - two_pi
    } else {
        w
    }
}

#[derive(Debug, Clone)]
pub(crate) struct DeOutcome {
    pub best: Vec<f64>,
    pub value: f64,
    pub generations: usize,
    pub stagnated: bool,
}

/// One DE run from a single seed. `initial` candidates replace the first
/// members of the random population.
fn run_once<F>(objective: &F, dim: usize, s: &OptimizerSettings, rng: &mut Rng, initial: &[Vec<f64>]) -> DeOutcome
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let np = s.population;
    let mut pop: Vec<Vec<f64>> = (0..np).map(|_| (0..dim).map(|_| rng.random_range(-PI..PI)).collect()).collect();
    for (slot, cand) in pop.iter_mut().zip(initial) {
        *slot = cand.iter().map(|&x| wrap_angle(x)).collect();
    }
    let mut fit: Vec<f64> = pop.iter().map(|x| objective(x)).collect();
    let argmax = |fit: &[f64]| {
        let mut b = 0;
        for i in 1..fit.len() {
            if fit[i] > fit[b] {
                b = i;
            }
        }
        b
    };
    let mut history = vec![fit[argmax(&fit)]];
    let mut stagnated = false;
    let mut generations = 0;

    for _ in 0..s.generations {
        generations += 1;
        // Trial vectors are drawn serially so the RNG stream does not depend on scheduling.
        let trials: Vec<Vec<f64>> = (0..np)
            .map(|i| {
                let mut pick = || loop {
                    let r = rng.random_range(0..np);
                    if r != i {
                        break r;
                    }
                };
                let a = pick();
                let b = loop {
                    let r = pick();
                    if r != a {
                        break r;
                    }
                };
                let c = loop {
                    let r = pick();
                    if r != a && r != b {
                        break r;
                    }
                };
                let forced = rng.random_range(0..dim);
                (0..dim)
                    .map(|j| {
                        if j == forced || rng.random::<f64>() < CROSSOVER {
                            // difference of angles taken on the circle
                            wrap_angle(pop[a][j] + DIFFERENTIAL_WEIGHT * wrap_angle(pop[b][j] - pop[c][j]))
                        } else {
                            pop[i][j]
                        }
                    })
                    .collect()
            })
            .collect();
        let trial_fit: Vec<f64> = trials.iter().map(|x| objective(x)).collect();
        for (i, (t, f)) in trials.into_iter().zip(trial_fit).enumerate() {
            if f >= fit[i] {
                pop[i] = t;
                fit[i] = f;
            }
        }
        let best = fit[argmax(&fit)];
        history.push(best);
        if history.len() > STAGNATION_WINDOW {
            let old = history[history.len() - 1 - STAGNATION_WINDOW];
            if best - old <= s.tolerance {
                stagnated = true;
                break;
            }
        }
    }
    let b = argmax(&fit);
    DeOutcome { best: pop[b].clone(), value: fit[b], generations, stagnated }
}

/// Runs `settings.restarts` independent DE searches (in parallel), keeps the
/// best, and polishes it locally. Deterministic for a given seed.
pub(crate) fn maximize<F>(objective: &F, dim: usize, settings: &OptimizerSettings, initial: &[Vec<f64>]) -> DeOutcome
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let runs: Vec<DeOutcome> = (0..settings.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = settings.seed().split(r as u64).rng();
            run_once(objective, dim, settings, &mut rng, initial)
        })
        .collect();
    let generations = runs.iter().map(|r| r.generations).sum();
    let stagnated = runs.iter().all(|r| r.stagnated);
    let mut best = runs
        .into_iter()
        .reduce(|acc, r| if r.value > acc.value { r } else { acc })
        .expect("at least one restart");
    let (x, v) = nelder_mead(objective, &best.best, 0.05, 400 * dim);
    if v > best.value {
        best.best = x.into_iter().map(wrap_angle).collect();
        best.value = v;
    }
    best.generations = generations;
    best.stagnated = stagnated;
    best
}

/// Nelder-Mead maximization from `start` with an axis-aligned initial simplex.
pub(crate) fn nelder_mead<F>(objective: &F, start: &[f64], step: f64, max_evals: usize) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let dim = start.len();
    let f = |x: &[f64]| -objective(x);
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for j in 0..dim {
        let mut p = start.to_vec();
        p[j] += step;
        simplex.push(p);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    let mut evals = dim + 1;

    while evals < max_evals {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        if (vals[dim] - vals[0]).abs() <= 1e-15 * (1.0 + vals[0].abs()) {
            break;
        }
        let centroid: Vec<f64> =
            (0..dim).map(|j| simplex[..dim].iter().map(|p| p[j]).sum::<f64>() / dim as f64).collect();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[dim]).map(|(c, w)| c + t * (w - c)).collect()
        };
        let reflected = along(-1.0);
        let fr = f(&reflected);
        evals += 1;
        if fr < vals[0] {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            evals += 1;
            if fe < fr {
                simplex[dim] = expanded;
                vals[dim] = fe;
            } else {
                simplex[dim] = reflected;
                vals[dim] = fr;
            }
        } else if fr < vals[dim - 1] {
            simplex[dim] = reflected;
            vals[dim] = fr;
        } else {
            let (contracted, fc) = if fr < vals[dim] {
                let p = along(-0.5);
                let v = f(&p);
                (p, v)
            } else {
                let p = along(0.5);
                let v = f(&p);
                (p, v)
            };
            evals += 1;
            if fc < vals[dim].min(fr) {
                simplex[dim] = contracted;
                vals[dim] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=dim {
                    simplex[i] = best.iter().zip(&simplex[i]).map(|(b, x)| b + 0.5 * (x - b)).collect();
                    vals[i] = f(&simplex[i]);
                }
                evals += dim;
            }
        }
    }
    let mut b = 0;
    for i in 1..vals.len() {
        if vals[i] < vals[b] {
            b = i;
        }
    }
    (simplex[b].clone(), -vals[b])
}
