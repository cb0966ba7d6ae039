//! Box-constrained Nelder–Mead maximisation.
//!
//! Coordinates are clamped into the box before each evaluation, so the
//! simplex can press against a bound without leaving the feasible domain.

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    /// Stop once the largest vertex distance from the best vertex falls below this.
    pub diameter_tol: f64,
    pub max_iterations: usize,
    /// Initial simplex edge along each axis, in the same units as the bounds.
    pub initial_step: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct NelderMeadOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Maximises `objective` over the box `lower ≤ x ≤ upper` starting at `start`.
///
/// The objective may return `-∞` for infeasible points; it must never
/// return NaN. Errors from the objective abort the search.
pub fn maximize<E, F>(
    mut objective: F,
    start: &[f64],
    lower: &[f64],
    upper: &[f64],
    options: &NelderMeadOptions,
) -> Result<NelderMeadOutcome, E>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
{
    let dim = start.len();
    assert!(dim >= 1, "at least one free coordinate");
    assert_eq!(lower.len(), dim);
    assert_eq!(upper.len(), dim);
    assert_eq!(options.initial_step.len(), dim);

    let clamp = |x: &mut Vec<f64>| {
        for ((xi, lo), hi) in x.iter_mut().zip(lower).zip(upper) {
            *xi = xi.clamp(*lo, *hi);
        }
    };
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| -> Result<f64, E> {
        evaluations += 1;
        objective(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let mut x0 = start.to_vec();
    clamp(&mut x0);
    let f0 = eval(&x0)?;
    simplex.push((x0.clone(), f0));
    for i in 0..dim {
        let mut x = x0.clone();
        // Step inward when the start sits on the upper bound.
        let step = options.initial_step[i];
        x[i] = if x[i] + step <= upper[i] {
            x[i] + step
        } else {
            x[i] - step
        };
        clamp(&mut x);
        let f = eval(&x)?;
        simplex.push((x, f));
    }

    let mut iterations = 0;
    let mut converged = false;
    loop {
        // Best first; stable sort keeps the earlier vertex on ties.
        simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("objective returned NaN"));
        if diameter(&simplex) <= options.diameter_tol {
            converged = true;
            break;
        }
        if iterations == options.max_iterations {
            break;
        }
        iterations += 1;

        let worst = simplex[dim].clone();
        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|(x, _)| x[j]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            let mut x: Vec<f64> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect();
            clamp(&mut x);
            x
        };

        let xr = along(REFLECT);
        let fr = eval(&xr)?;
        if fr > simplex[0].1 {
            let xe = along(EXPAND);
            let fe = eval(&xe)?;
            simplex[dim] = if fe > fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr > simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
            continue;
        }
        // Contract towards the better of the reflected and worst points.
        // An inside contraction must strictly improve, otherwise a plateau
        // would never shrink the simplex.
        let (xc, fc, accept) = if fr > worst.1 {
            let xc = along(REFLECT * CONTRACT);
            let fc = eval(&xc)?;
            (xc, fc, fc >= fr)
        } else {
            let xc = along(-CONTRACT);
            let fc = eval(&xc)?;
            (xc, fc, fc > worst.1)
        };
        if accept {
            simplex[dim] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let mut x: Vec<f64> = best
                .iter()
                .zip(&vertex.0)
                .map(|(b, v)| b + SHRINK * (v - b))
                .collect();
            clamp(&mut x);
            let f = eval(&x)?;
            *vertex = (x, f);
        }
    }

    let (point, value) = simplex.swap_remove(0);
    Ok(NelderMeadOutcome {
        point,
        value,
        iterations,
        evaluations,
        converged,
    })
}

fn diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let best = &simplex[0].0;
    simplex[1..]
        .iter()
        .map(|(x, _)| {
            x.iter()
                .zip(best)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn options(dim: usize) -> NelderMeadOptions {
        NelderMeadOptions {
            diameter_tol: 1e-8,
            max_iterations: 2000,
            initial_step: vec![0.25; dim],
        }
    }

    #[test]
    fn finds_interior_maximum() {
        let f = |x: &[f64]| -> Result<f64, Infallible> {
            Ok(-(x[0] - 0.3).powi(2) - 2.0 * (x[1] + 0.7).powi(2) + 1.0)
        };
        let out = maximize(f, &[0.0, 0.0], &[-2.0, -2.0], &[2.0, 2.0], &options(2)).unwrap();
        assert!(out.converged);
        assert!((out.point[0] - 0.3).abs() < 1e-6);
        assert!((out.point[1] + 0.7).abs() < 1e-6);
        assert!((out.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximum_on_the_boundary() {
        let f = |x: &[f64]| -> Result<f64, Infallible> { Ok(x[0]) };
        let out = maximize(f, &[0.5], &[0.0], &[1.0], &options(1)).unwrap();
        assert!(out.converged);
        assert_eq!(out.point[0], 1.0);
    }

    #[test]
    fn rosenbrock_valley() {
        let f = |x: &[f64]| -> Result<f64, Infallible> {
            Ok(-((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)))
        };
        let out = maximize(f, &[-1.2, 1.0], &[-3.0, -3.0], &[3.0, 3.0], &options(2)).unwrap();
        assert!((out.point[0] - 1.0).abs() < 1e-5, "{:?}", out.point);
        assert!((out.point[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn flat_objective_still_converges() {
        let f = |_: &[f64]| -> Result<f64, Infallible> { Ok(0.5) };
        let out = maximize(f, &[0.2, 0.4], &[0.0, 0.0], &[1.0, 1.0], &options(2)).unwrap();
        assert!(out.converged);
    }

    #[test]
    fn infeasible_region_is_avoided() {
        let f = |x: &[f64]| -> Result<f64, Infallible> {
            Ok(if x[0] > 0.6 { f64::NEG_INFINITY } else { x[0] })
        };
        let out = maximize(f, &[0.0], &[0.0], &[1.0], &options(1)).unwrap();
        assert!(out.converged);
        assert!((out.point[0] - 0.6).abs() < 1e-7);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let f = |x: &[f64]| -> Result<f64, Infallible> { Ok(-(x[0] - 0.37).powi(2)) };
        let opts = NelderMeadOptions {
            max_iterations: 3,
            ..options(1)
        };
        let out = maximize(f, &[0.0], &[-1.0], &[1.0], &opts).unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 3);
    }
}
