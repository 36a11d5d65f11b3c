//! Derivative-free Nelder-Mead minimizer.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Objective evaluation budget.
    pub max_evals: usize,
    /// Converged when `f_worst - f_best <= tolerance * max(1, |f_best|)`.
    pub tolerance: f64,
    /// Edge length of the initial simplex around the start point.
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            tolerance: 1e-10,
            initial_step: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Best objective value after each iteration.
    pub best_history: Vec<f64>,
}

/// Stops the search; carries the offending point.
#[derive(Debug, Clone, PartialEq)]
pub struct NonFinite(pub Vec<f64>);

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

struct Counter<F> {
    f: F,
    evals: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counter<F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64, NonFinite> {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NonFinite(x.to_vec()))
        }
    }
}

/// Minimizes `f` from `start`. Each time the simplex collapses the search is
/// restarted from the best point, until a restart no longer improves by more
/// than the tolerance or the evaluation budget is spent.
pub fn minimize<F>(f: F, start: &[f64], opts: &SimplexOptions) -> Result<SimplexResult, NonFinite>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut counter = Counter { f, evals: 0 };
    let mut best_history = Vec::new();
    let mut iterations = 0;
    let mut x = start.to_vec();
    let mut value = counter.eval(&x)?;
    let mut converged = false;
    loop {
        let (bx, bv, done) = run(&mut counter, &x, value, opts, &mut iterations, &mut best_history)?;
        let improvement = value - bv;
        x = bx;
        value = bv;
        if !done {
            break;
        }
        if improvement <= opts.tolerance * value.abs().max(1.0) || counter.evals >= opts.max_evals {
            converged = true;
            break;
        }
    }
    Ok(SimplexResult {
        x,
        value,
        evaluations: counter.evals,
        iterations,
        converged,
        best_history,
    })
}

fn run<F: FnMut(&[f64]) -> f64>(
    counter: &mut Counter<F>,
    start: &[f64],
    start_value: f64,
    opts: &SimplexOptions,
    iterations: &mut usize,
    history: &mut Vec<f64>,
) -> Result<(Vec<f64>, f64, bool), NonFinite> {
    let dim = start.len();
    let mut pts: Vec<Vec<f64>> = vec![start.to_vec()];
    let mut vals = vec![start_value];
    for i in 0..dim {
        let mut p = start.to_vec();
        p[i] += opts.initial_step;
        vals.push(counter.eval(&p)?);
        pts.push(p);
    }

    loop {
        // Stable sort keeps the order deterministic among equal values.
        let mut idx: Vec<usize> = (0..=dim).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = idx.iter().map(|&i| pts[i].clone()).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();

        let (best, worst) = (vals[0], vals[dim]);
        if worst - best <= opts.tolerance * best.abs().max(1.0) {
            return Ok((pts.swap_remove(0), best, true));
        }
        if counter.evals >= opts.max_evals {
            return Ok((pts.swap_remove(0), best, false));
        }
        *iterations += 1;

        let mut centroid = vec![0.0; dim];
        for p in &pts[..dim] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / dim as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&pts[dim]).map(|(c, w)| c + t * (c - w)).collect() };

        let xr = along(REFLECT);
        let fr = counter.eval(&xr)?;
        if fr < vals[0] {
            let xe = along(EXPAND);
            let fe = counter.eval(&xe)?;
            if fe < fr {
                pts[dim] = xe;
                vals[dim] = fe;
            } else {
                pts[dim] = xr;
                vals[dim] = fr;
            }
        } else if fr < vals[dim - 1] {
            pts[dim] = xr;
            vals[dim] = fr;
        } else {
            let (xc, fc) = if fr < vals[dim] {
                let xc = along(REFLECT * CONTRACT);
                let fc = counter.eval(&xc)?;
                (xc, fc)
            } else {
                let xc = along(-CONTRACT);
                let fc = counter.eval(&xc)?;
                (xc, fc)
            };
            if fc < fr.min(vals[dim]) {
                pts[dim] = xc;
                vals[dim] = fc;
            } else {
                for i in 1..=dim {
                    let p: Vec<f64> = pts[0].iter().zip(&pts[i]).map(|(b, x)| b + SHRINK * (x - b)).collect();
                    vals[i] = counter.eval(&p)?;
                    pts[i] = p;
                }
            }
        }
        let current = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let prev = history.last().copied().unwrap_or(f64::INFINITY);
        history.push(current.min(prev));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = SimplexOptions {
            max_evals: 5000,
            ..Default::default()
        };
        let r = minimize(rosen, &[-1.2, 1.0], &opts).unwrap();
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-3 && (r.x[1] - 1.0).abs() < 1e-3, "{:?}", r.x);
        for w in r.best_history.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn quadratic_bowl_is_deterministic() {
        let f = |x: &[f64]| {
            x.iter()
                .enumerate()
                .map(|(i, v)| (i as f64 + 1.0) * (v - 0.3).powi(2))
                .sum()
        };
        let a = minimize(f, &[0.0; 4], &SimplexOptions::default()).unwrap();
        let b = minimize(f, &[0.0; 4], &SimplexOptions::default()).unwrap();
        assert_eq!(a, b);
        assert!(a.x.iter().all(|v| (v - 0.3).abs() < 1e-4));
    }

    #[test]
    fn budget_exhaustion_reports_not_converged() {
        let f = |x: &[f64]| (x[0] - 3.0).powi(2) + (x[1] + 1.0).powi(2);
        let r = minimize(
            f,
            &[0.0, 0.0],
            &SimplexOptions {
                max_evals: 10,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(!r.converged);
        assert!(r.value < 10.0);
    }

    #[test]
    fn non_finite_is_reported() {
        let f = |x: &[f64]| if x[0] > 0.2 { f64::NAN } else { x[0] * x[0] };
        let err = minimize(f, &[0.0], &SimplexOptions::default()).unwrap_err();
        assert!(err.0[0] > 0.2);
    }
}
