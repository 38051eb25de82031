//! Projected-gradient solver for smooth convex objectives over the capped
//! simplex `{p ≥ 0, Σp ≤ P}`.

use super::OptimizerError;

/// Smooth objective in the original (watt) coordinates.
pub trait SimplexObjective {
    fn dim(&self) -> usize;
    fn value(&self, p: &[f64]) -> f64;
    fn gradient(&self, p: &[f64], grad: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerSolverConfig {
    /// Stop once the projected-gradient step in budget-normalized
    /// coordinates is below this in max norm.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for InnerSolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iters: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolution {
    pub p: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub stationarity: f64,
}

/// Euclidean projection of `v` onto `{x ≥ 0, Σx ≤ budget}`.
pub fn project_capped_simplex(v: &[f64], budget: f64) -> Vec<f64> {
    let clipped: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
    if clipped.iter().sum::<f64>() <= budget {
        return clipped;
    }
    // Project onto the face Σx = budget: find τ with Σ max(v − τ, 0) = budget.
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (j, &s) in sorted.iter().enumerate() {
        cumulative += s;
        let candidate = (cumulative - budget) / (j + 1) as f64;
        if s - candidate > 0.0 {
            tau = candidate;
        }
    }
    v.iter().map(|x| (x - tau).max(0.0)).collect()
}

fn stationarity(x: &[f64], g: &[f64]) -> f64 {
    let trial: Vec<f64> = x.iter().zip(g).map(|(a, b)| a - b).collect();
    project_capped_simplex(&trial, 1.0)
        .iter()
        .zip(x)
        .map(|(p, a)| (p - a).abs())
        .fold(0.0, f64::max)
}

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-30;
/// Consecutive steps whose decrease is within rounding of the objective
/// after which the iterate counts as stationary to working precision.
const STALL_LIMIT: usize = 8;

/// Minimizes `obj` on the capped simplex with Barzilai–Borwein steps and an
/// Armijo backtracking safeguard.
///
/// The iteration runs in `x = p/P` so the tolerance is scale free. Every
/// accepted step decreases the objective, so a warm start is never made
/// worse. Exhausting `max_iters` is reported as an error carrying the last
/// iterate.
pub fn minimize_on_simplex<O: SimplexObjective + ?Sized>(
    obj: &O,
    budget: f64,
    start: &[f64],
    cfg: &InnerSolverConfig,
) -> Result<InnerSolution, OptimizerError> {
    let dim = obj.dim();
    assert_eq!(start.len(), dim, "start point has the wrong dimension");
    if budget <= 0.0 {
        let p = vec![0.0; dim];
        let value = obj.value(&p);
        return Ok(InnerSolution {
            p,
            value,
            iterations: 0,
            stationarity: 0.0,
        });
    }

    let to_p = |x: &[f64]| -> Vec<f64> { x.iter().map(|v| v * budget).collect() };
    let scaled_grad = |x: &[f64], out: &mut [f64]| {
        obj.gradient(&to_p(x), out);
        out.iter_mut().for_each(|g| *g *= budget);
    };

    let mut x = project_capped_simplex(&start.iter().map(|p| p / budget).collect::<Vec<_>>(), 1.0);
    let mut f = obj.value(&to_p(&x));
    let mut g = vec![0.0; dim];
    scaled_grad(&x, &mut g);
    let mut step = 1.0;
    let mut g_new = vec![0.0; dim];
    let mut stalled = 0;

    for iteration in 0..cfg.max_iters {
        let station = stationarity(&x, &g);
        if station <= cfg.tol {
            return Ok(InnerSolution {
                p: to_p(&x),
                value: f,
                iterations: iteration,
                stationarity: station,
            });
        }

        let mut alpha = step;
        let (x_new, f_new) = loop {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - alpha * b).collect();
            let candidate = project_capped_simplex(&trial, 1.0);
            let decrease: f64 = g
                .iter()
                .zip(candidate.iter().zip(&x))
                .map(|(gi, (c, a))| gi * (c - a))
                .sum();
            let value = obj.value(&to_p(&candidate));
            if value <= f + ARMIJO * decrease {
                break (candidate, value);
            }
            alpha *= 0.5;
            if alpha < MIN_STEP {
                // No representable decrease remains: stationary to rounding.
                return Ok(InnerSolution {
                    p: to_p(&x),
                    value: f,
                    iterations: iteration,
                    stationarity: station,
                });
            }
        };

        scaled_grad(&x_new, &mut g_new);
        let mut ss = 0.0;
        let mut sy = 0.0;
        for j in 0..dim {
            let s = x_new[j] - x[j];
            ss += s * s;
            sy += s * (g_new[j] - g[j]);
        }
        step = if sy > 0.0 {
            (ss / sy).clamp(1e-12, 1e12)
        } else {
            (alpha * 2.0).min(1e12)
        };
        if f - f_new <= 16.0 * f64::EPSILON * f.abs().max(1.0) {
            stalled += 1;
        } else {
            stalled = 0;
        }
        x = x_new;
        f = f_new;
        std::mem::swap(&mut g, &mut g_new);
        if stalled >= STALL_LIMIT {
            return Ok(InnerSolution {
                p: to_p(&x),
                value: f,
                iterations: iteration + 1,
                stationarity: stationarity(&x, &g),
            });
        }
    }

    Err(OptimizerError::SubsolverNotConverged {
        last: to_p(&x),
        iterations: cfg.max_iters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    struct Linear(Vec<f64>);

    impl SimplexObjective for Linear {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn value(&self, p: &[f64]) -> f64 {
            self.0.iter().zip(p).map(|(c, x)| c * x).sum()
        }
        fn gradient(&self, _: &[f64], grad: &mut [f64]) {
            grad.copy_from_slice(&self.0);
        }
    }

    /// `−Σ log(a_j + p_j)`: the water-filling problem.
    struct WaterFill(Vec<f64>);

    impl SimplexObjective for WaterFill {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn value(&self, p: &[f64]) -> f64 {
            -self.0.iter().zip(p).map(|(a, x)| (a + x).ln()).sum::<f64>()
        }
        fn gradient(&self, p: &[f64], grad: &mut [f64]) {
            for ((g, a), x) in grad.iter_mut().zip(&self.0).zip(p) {
                *g = -1.0 / (a + x);
            }
        }
    }

    fn water_level(floors: &[f64], budget: f64) -> f64 {
        // Bisection on the level μ with Σ max(μ − a_j, 0) = budget.
        let (mut lo, mut hi) = (0.0, floors.iter().cloned().fold(0.0, f64::max) + budget);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let used: f64 = floors.iter().map(|a| (mid - a).max(0.0)).sum();
            if used > budget {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn linear_objective_picks_a_vertex() {
        let sol = minimize_on_simplex(
            &Linear(vec![0.5, -2.0, -1.0]),
            3.0,
            &[1.0, 1.0, 1.0],
            &InnerSolverConfig::default(),
        )
        .unwrap();
        assert!((sol.p[1] - 3.0).abs() < 1e-8);
        assert!(sol.p[0].abs() < 1e-8 && sol.p[2].abs() < 1e-8);

        let sol =
            minimize_on_simplex(&Linear(vec![1.0, 2.0]), 3.0, &[1.0, 1.0], &InnerSolverConfig::default()).unwrap();
        assert!(sol.p.iter().all(|p| p.abs() < 1e-8));
    }

    #[test]
    fn matches_water_filling() {
        let floors = vec![0.1, 0.5, 1.2, 3.0];
        let budget = 2.0;
        let sol = minimize_on_simplex(
            &WaterFill(floors.clone()),
            budget,
            &[0.5; 4],
            &InnerSolverConfig::default(),
        )
        .unwrap();
        let mu = water_level(&floors, budget);
        for (p, a) in sol.p.iter().zip(&floors) {
            assert!((p - (mu - a).max(0.0)).abs() < 1e-7, "{p} vs {}", (mu - a).max(0.0));
        }
    }

    #[test]
    fn zero_budget() {
        let sol = minimize_on_simplex(
            &WaterFill(vec![1.0, 2.0]),
            0.0,
            &[0.0, 0.0],
            &InnerSolverConfig::default(),
        )
        .unwrap();
        assert_eq!(sol.p, vec![0.0, 0.0]);
    }

    #[test]
    fn iteration_cap_is_an_error() {
        let cfg = InnerSolverConfig { tol: 0.0, max_iters: 3 };
        let err = minimize_on_simplex(&WaterFill(vec![0.1, 0.2, 0.3]), 1.0, &[0.0; 3], &cfg).unwrap_err();
        assert!(matches!(err, OptimizerError::SubsolverNotConverged { .. }));
    }

    proptest! {
        #[test]
        fn projection_is_feasible_and_idempotent(
            v in proptest::collection::vec(-5.0f64..5.0, 1..8),
            budget in 0.0f64..4.0,
        ) {
            let p = project_capped_simplex(&v, budget);
            prop_assert!(p.iter().all(|x| *x >= 0.0));
            prop_assert!(p.iter().sum::<f64>() <= budget + 1e-12);
            let again = project_capped_simplex(&p, budget);
            for (a, b) in p.iter().zip(&again) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn projection_is_closest_point(
            v in proptest::collection::vec(-3.0f64..3.0, 2..6),
            w in proptest::collection::vec(0.0f64..1.0, 6),
            budget in 0.1f64..3.0,
        ) {
            // Any feasible point is no closer than the projection.
            let p = project_capped_simplex(&v, budget);
            let w = &w[..v.len()];
            let total: f64 = w.iter().sum();
            let feasible: Vec<f64> = if total > budget {
                w.iter().map(|x| x * budget / total).collect()
            } else {
                w.to_vec()
            };
            let dist = |a: &[f64]| a.iter().zip(&v).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
            prop_assert!(dist(&p) <= dist(&feasible) + 1e-12);
        }
    }
}
