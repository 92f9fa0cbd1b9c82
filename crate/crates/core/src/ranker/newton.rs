//! Truncated Newton: outer Newton steps, inner conjugate gradient on
//! Hessian-vector products, Armijo backtracking.

use serde::{Deserialize, Serialize};

use super::objective::dot;

/// What the solver needs from an objective.
pub trait SecondOrder {
    /// Whatever must be frozen at the current point for Hessian products
    /// (for the squared hinge: the active set).
    type Curvature;

    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>);
    fn curvature(&self, x: &[f64]) -> Self::Curvature;
    fn hess_vec(&self, c: &Self::Curvature, v: &[f64]) -> Vec<f64>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    pub max_outer: usize,
    /// Stop once the gradient's ∞-norm drops below this.
    pub grad_tol: f64,
    /// CG stops when the residual is below `forcing · ‖g‖₂`.
    pub forcing: f64,
    pub max_cg: usize,
    pub max_halvings: usize,
    /// Sufficient-decrease constant of the line search.
    pub armijo: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_outer: 100,
            grad_tol: 1e-6,
            forcing: 0.1,
            max_cg: 250,
            max_halvings: 30,
            armijo: 1e-4,
        }
    }
}

/// One outer iteration, recorded before the step is taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub objective: f64,
    pub grad_inf: f64,
    pub cg_iterations: usize,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIterations,
    /// The line search could not decrease the objective further.
    LineSearchStalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonResult {
    pub x: Vec<f64>,
    pub objective: f64,
    pub gradient: Vec<f64>,
    pub trace: Vec<IterationRecord>,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NewtonFailure {
    NonFinite { iteration: usize, objective: f64 },
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Approximately solves `H d = −g` by conjugate gradient.
fn conjugate_gradient<O: SecondOrder>(
    obj: &O,
    curv: &O::Curvature,
    grad: &[f64],
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, usize) {
    let n = grad.len();
    let mut d = vec![0.0; n];
    let mut r: Vec<f64> = grad.iter().map(|g| -g).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let mut iters = 0;
    while iters < max_iter && rr.sqrt() > tol {
        let hp = obj.hess_vec(curv, &p);
        let php = dot(&p, &hp);
        if php <= 0.0 {
            break;
        }
        let alpha = rr / php;
        for i in 0..n {
            d[i] += alpha * p[i];
            r[i] -= alpha * hp[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
        iters += 1;
    }
    if iters == 0 {
        // fall back to steepest descent
        d = grad.iter().map(|g| -g).collect();
    }
    (d, iters)
}

pub fn minimize<O: SecondOrder>(obj: &O, x0: Vec<f64>, opts: &NewtonOptions) -> Result<NewtonResult, NewtonFailure> {
    let mut x = x0;
    let (mut f, mut g) = obj.value_and_gradient(&x);
    let mut trace = Vec::new();
    let mut termination = Termination::MaxIterations;

    for iteration in 0..opts.max_outer {
        if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return Err(NewtonFailure::NonFinite { iteration, objective: f });
        }
        let grad_inf = inf_norm(&g);
        if grad_inf < opts.grad_tol {
            trace.push(IterationRecord {
                iteration,
                objective: f,
                grad_inf,
                cg_iterations: 0,
                step: 0.0,
            });
            termination = Termination::Converged;
            break;
        }

        let curv = obj.curvature(&x);
        let cg_tol = opts.forcing * dot(&g, &g).sqrt();
        let (d, cg_iterations) = conjugate_gradient(obj, &curv, &g, cg_tol, opts.max_cg);
        let slope = dot(&g, &d);

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + step * di).collect();
            let ft = obj.value(&trial);
            if ft.is_finite() && ft <= f + opts.armijo * step * slope {
                accepted = Some(trial);
                break;
            }
            step *= 0.5;
        }

        trace.push(IterationRecord {
            iteration,
            objective: f,
            grad_inf,
            cg_iterations,
            step: if accepted.is_some() { step } else { 0.0 },
        });

        match accepted {
            Some(next) => {
                x = next;
                let (nf, ng) = obj.value_and_gradient(&x);
                f = nf;
                g = ng;
            }
            None => {
                termination = Termination::LineSearchStalled;
                break;
            }
        }
    }

    if termination == Termination::MaxIterations {
        if !f.is_finite() {
            return Err(NewtonFailure::NonFinite {
                iteration: opts.max_outer,
                objective: f,
            });
        }
        trace.push(IterationRecord {
            iteration: opts.max_outer,
            objective: f,
            grad_inf: inf_norm(&g),
            cg_iterations: 0,
            step: 0.0,
        });
    }

    Ok(NewtonResult {
        x,
        objective: f,
        gradient: g,
        trace,
        termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// f(x) = ½ xᵀAx − bᵀx with A = diag(a).
    struct Quadratic {
        a: Vec<f64>,
        b: Vec<f64>,
    }

    impl SecondOrder for Quadratic {
        type Curvature = ();
        fn dim(&self) -> usize {
            self.a.len()
        }
        fn value(&self, x: &[f64]) -> f64 {
            x.iter()
                .zip(&self.a)
                .zip(&self.b)
                .map(|((x, a), b)| 0.5 * a * x * x - b * x)
                .sum()
        }
        fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
            let g = x.iter().zip(&self.a).zip(&self.b).map(|((x, a), b)| a * x - b).collect();
            (self.value(x), g)
        }
        fn curvature(&self, _: &[f64]) {}
        fn hess_vec(&self, _: &(), v: &[f64]) -> Vec<f64> {
            v.iter().zip(&self.a).map(|(v, a)| v * a).collect()
        }
    }

    #[test]
    fn solves_a_diagonal_quadratic() {
        let q = Quadratic {
            a: vec![1.0, 4.0, 9.0],
            b: vec![1.0, 2.0, 3.0],
        };
        let opts = NewtonOptions {
            grad_tol: 1e-12,
            forcing: 1e-12,
            ..Default::default()
        };
        let res = minimize(&q, vec![0.0; 3], &opts).unwrap();
        assert_eq!(res.termination, Termination::Converged);
        for (x, want) in res.x.iter().zip([1.0, 0.5, 1.0 / 3.0]) {
            assert!((x - want).abs() < 1e-10);
        }
    }

    #[test]
    fn non_finite_start_is_reported() {
        let q = Quadratic {
            a: vec![1.0],
            b: vec![f64::NAN],
        };
        assert!(matches!(
            minimize(&q, vec![0.0], &NewtonOptions::default()),
            Err(NewtonFailure::NonFinite { iteration: 0, .. })
        ));
    }
}
