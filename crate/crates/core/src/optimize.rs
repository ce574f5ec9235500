//! Gradient ascent of `e_p` over the unitary group.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criticality::{certify, ep_gradient, ep_hessian, generator_combination, Classification, CriticalityReport};
use crate::error::{domain, Result};
use crate::geometry::{ep_geometric, UnitaryGate};
use crate::haar::haar_sample;
use crate::halfint::HalfInt;
use crate::linalg::hermitian_exp_i;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub seed: u64,
    pub restarts: usize,
    pub step_init: f64,
    pub step_shrink: f64,
    pub grad_tol: f64,
    pub max_iters: usize,
}

impl OptimizerConfig {
    /// 20 restarts up to `d = 4`, 50 beyond.
    pub fn for_spin(j: HalfInt, seed: u64) -> Self {
        OptimizerConfig {
            seed,
            restarts: if j.dim() <= 4 { 20 } else { 50 },
            step_init: 0.1,
            step_shrink: 0.5,
            grad_tol: 1e-9,
            max_iters: 5000,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0) || self.restarts < 1 {
            return domain("optimizer needs grad_tol > 0 and restarts >= 1");
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) || !(self.step_init > 0.0) {
            return domain("optimizer needs step_init > 0 and 0 < step_shrink < 1");
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Ascent {
    pub gate: UnitaryGate,
    pub ep: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    /// `e_p` after every accepted gradient step, starting value first.
    pub history: Vec<f64>,
    /// Newton steps taken after the gradient phase stalled.
    pub newton_steps: usize,
}

/// Steepest ascent from `start` with retraction `U <- exp(iε Σ g_a G_a) U`,
/// Armijo backtracking, and step growth after each accepted move. Once the
/// line search stalls, up to [`NEWTON_STEPS`] Newton steps on the nonzero
/// Hessian eigenspace bring the gradient down to `grad_tol`.
pub fn ascend(start: &UnitaryGate, q: i32, config: &OptimizerConfig) -> Result<Ascent> {
    config.validate()?;
    let d = start.j().dim();
    let mut u = start.clone();
    let mut f = ep_geometric(&u, q)?;
    let mut history = vec![f];
    let mut step = config.step_init;
    let mut grad = ep_gradient(&u, q)?;
    let mut gn2: f64 = grad.iter().map(|g| g * g).sum();
    let mut iterations = 0;
    while iterations < config.max_iters && gn2.sqrt() > config.grad_tol {
        iterations += 1;
        let x = generator_combination(d, &grad);
        let mut moved = false;
        while step > 1e-14 {
            let cand = UnitaryGate::from_matrix(u.j(), hermitian_exp_i(&x, step) * u.matrix())?;
            let fc = ep_geometric(&cand, q)?;
            let armijo = fc >= f + 1e-4 * step * gn2;
            // Close to a maximum the gain drops below the resolution of e_p;
            // a non-decreasing step that shrinks the gradient is then accepted.
            let (accept, cand_grad) = if armijo {
                (true, None)
            } else if fc >= f {
                let g = ep_gradient(&cand, q)?;
                let n2: f64 = g.iter().map(|x| x * x).sum();
                (n2 < gn2, Some(g))
            } else {
                (false, None)
            };
            if accept {
                u = cand;
                f = fc;
                grad = match cand_grad {
                    Some(g) => g,
                    None => ep_gradient(&u, q)?,
                };
                moved = true;
                break;
            }
            step *= config.step_shrink;
        }
        if !moved {
            break;
        }
        history.push(f);
        step = (step * 2.0).min(10.0);
        gn2 = grad.iter().map(|g| g * g).sum();
    }
    let mut newton_steps = 0;
    while newton_steps < NEWTON_STEPS && gn2.sqrt() > config.grad_tol {
        let Some(x) = newton_direction(&u, q, &grad)? else { break };
        let cand = UnitaryGate::from_matrix(u.j(), hermitian_exp_i(&generator_combination(d, &x), 1.0) * u.matrix())?;
        let g = ep_gradient(&cand, q)?;
        let n2: f64 = g.iter().map(|x| x * x).sum();
        let fc = ep_geometric(&cand, q)?;
        if n2 >= gn2 || fc < f - 1e-12 {
            break;
        }
        u = cand;
        f = fc;
        grad = g;
        gn2 = n2;
        newton_steps += 1;
    }
    Ok(Ascent { gate: u, ep: f, grad_norm: gn2.sqrt(), iterations, history, newton_steps })
}

pub const NEWTON_STEPS: usize = 8;

/// `−H⁺ g` with the pseudo-inverse taken over eigenvalues above `1e-6 · max|λ|`.
/// `None` when the Hessian vanishes.
fn newton_direction(u: &UnitaryGate, q: i32, grad: &[f64]) -> Result<Option<Vec<f64>>> {
    let eig = ep_hessian(u, q)?.symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    if scale == 0.0 {
        return Ok(None);
    }
    let g = nalgebra::DVector::from_column_slice(grad);
    let mut x = nalgebra::DVector::zeros(grad.len());
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l.abs() > 1e-6 * scale {
            let v = eig.eigenvectors.column(k);
            x -= v * (v.dot(&g) / l);
        }
    }
    Ok(Some(x.iter().copied().collect()))
}

#[derive(Clone, Debug)]
pub struct OptimizeResult {
    pub gate: UnitaryGate,
    pub ep: f64,
    pub report: CriticalityReport,
    pub best_restart: usize,
    pub converged_restarts: usize,
    /// Final `e_p` of every restart, in restart order.
    pub restart_values: Vec<f64>,
    /// True when no proven global maximum is known for this `(j, q)`.
    pub conjectural: bool,
}

/// Known global maxima.
pub fn known_maximum(j: HalfInt, q: i32) -> Option<f64> {
    match (j.twice(), q) {
        (2, 1) => Some(0.6),
        (3, 1) => Some(20.0 / 21.0),
        _ => None,
    }
}

/// Best of `config.restarts` ascents from Haar-random starts. Restart `r`
/// draws its start from stream `r` of `config.seed`.
pub fn optimize_ep(j: HalfInt, q: i32, config: &OptimizerConfig) -> Result<OptimizeResult> {
    config.validate()?;
    if q < 1 || q > j.floor() {
        return domain(format!("bipartition q = {q} outside 1..=⌊j⌋ for j = {j}"));
    }
    let runs: Vec<Ascent> = (0..config.restarts as u64)
        .into_par_iter()
        .map(|r| ascend(&haar_sample(j, config.seed, r), q, config))
        .collect::<Result<_>>()?;
    let converged = |a: &Ascent| a.grad_norm <= config.grad_tol;
    let converged_restarts = runs.iter().filter(|a| converged(a)).count();
    let pool: Vec<usize> = if converged_restarts > 0 { (0..runs.len()).filter(|&i| converged(&runs[i])).collect() } else { (0..runs.len()).collect() };
    let best = pool.into_iter().fold(None::<usize>, |acc, i| match acc {
        Some(b) if runs[b].ep >= runs[i].ep => Some(b),
        _ => Some(i),
    });
    let best = best.expect("at least one restart");
    let winner = &runs[best];
    let mut report = certify(&winner.gate, q, config.grad_tol)?;
    if !converged(winner) {
        report.classification = Classification::Inconclusive;
    }
    Ok(OptimizeResult {
        gate: winner.gate.clone(),
        ep: winner.ep,
        report,
        best_restart: best,
        converged_restarts,
        restart_values: runs.iter().map(|a| a.ep).collect(),
        conjectural: known_maximum(j, q).is_none(),
    })
}
