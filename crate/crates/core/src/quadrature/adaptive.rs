//! Composite adaptive Gauss–Legendre integration over a fixed interval.
//!
//! Each panel carries a 20-point estimate and the difference to the 10-point
//! estimate as its error. Refinement bisects the panels holding the largest
//! share of the error (half of the total per round); panel order and the
//! refinement choice depend only on the inputs, so results are
//! bit-reproducible.

use super::legendre::{coarse, fine};

#[derive(Debug, Clone, Copy)]
struct Panel<const K: usize> {
    a: f64,
    b: f64,
    value: [f64; K],
    error: [f64; K],
}

#[derive(Debug, Clone, Copy)]
pub struct Outcome<const K: usize> {
    pub value: [f64; K],
    pub error: [f64; K],
    pub evals: usize,
    pub panels: usize,
    pub converged: bool,
}

fn eval_panel<const K: usize>(a: f64, b: f64, f: &impl Fn(f64) -> [f64; K]) -> Panel<K> {
    let lo = coarse().apply(a, b, f);
    let hi = fine().apply(a, b, f);
    let mut error = [0.0; K];
    for k in 0..K {
        error[k] = (hi[k] - lo[k]).abs();
    }
    Panel {
        a,
        b,
        value: hi,
        error,
    }
}

const EVALS_PER_PANEL: usize = 30;

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Integrates `f` over `[breaks[0], breaks.last()]`, starting from the
/// panels delimited by `breaks`, until the summed error of every component
/// is below `rel_tol` times the magnitude of that component's integral.
pub fn integrate<const K: usize>(
    f: &impl Fn(f64) -> [f64; K],
    breaks: &[f64],
    rel_tol: f64,
    max_panels: usize,
) -> Outcome<K> {
    assert!(breaks.len() >= 2);
    let mut panels: Vec<Panel<K>> = breaks
        .windows(2)
        .map(|w| eval_panel(w[0], w[1], f))
        .collect();
    let mut evals = panels.len() * EVALS_PER_PANEL;

    loop {
        let (value, error) = totals(&panels);
        let scale: [f64; K] = std::array::from_fn(|k| {
            if value[k] != 0.0 {
                value[k].abs()
            } else {
                f64::MIN_POSITIVE
            }
        });
        let shares: Vec<f64> = panels
            .iter()
            .map(|p| (0..K).map(|k| p.error[k] / scale[k]).fold(0.0, f64::max))
            .collect();
        let total_share: f64 = shares.iter().sum();
        if total_share <= rel_tol {
            return Outcome {
                value,
                error,
                evals,
                panels: panels.len(),
                converged: true,
            };
        }
        if panels.len() >= max_panels {
            return Outcome {
                value,
                error,
                evals,
                panels: panels.len(),
                converged: false,
            };
        }

        let mut order: Vec<usize> = (0..panels.len()).collect();
        order.sort_by(|&i, &j| shares[j].total_cmp(&shares[i]).then(i.cmp(&j)));
        let mut marked = vec![false; panels.len()];
        let mut cumulative = 0.0;
        let mut any = false;
        for &i in &order {
            if cumulative >= 0.5 * total_share {
                break;
            }
            let p = &panels[i];
            let mid = 0.5 * (p.a + p.b);
            if mid <= p.a || mid >= p.b {
                continue;
            }
            marked[i] = true;
            any = true;
            cumulative += shares[i];
        }
        if !any {
            return Outcome {
                value,
                error,
                evals,
                panels: panels.len(),
                converged: false,
            };
        }

        let mut next = Vec::with_capacity(panels.len() * 2);
        for (p, split) in panels.iter().zip(&marked) {
            if *split {
                let mid = 0.5 * (p.a + p.b);
                next.push(eval_panel(p.a, mid, f));
                next.push(eval_panel(mid, p.b, f));
                evals += 2 * EVALS_PER_PANEL;
            } else {
                next.push(*p);
            }
        }
        panels = next;
    }
}

fn totals<const K: usize>(panels: &[Panel<K>]) -> ([f64; K], [f64; K]) {
    let value = std::array::from_fn(|k| compensated_sum(panels.iter().map(|p| p.value[k])));
    let error = std::array::from_fn(|k| panels.iter().map(|p| p.error[k]).sum());
    (value, error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_half_line() {
        let out = integrate(&|t: f64| [(-t * t).exp()], &[0.0, 2.0, 4.0, 8.0], 1e-14, 1000);
        assert!(out.converged);
        let exact = std::f64::consts::PI.sqrt() / 2.0;
        assert!((out.value[0] - exact).abs() < 1e-14);
    }

    #[test]
    fn refines_near_a_kink() {
        let out = integrate(&|t: f64| [t.abs().sqrt()], &[-1.0, 1.0], 1e-10, 10_000);
        assert!(out.converged);
        assert!((out.value[0] - 4.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn vector_components_converge_together() {
        let out = integrate(&|t: f64| [t.exp(), t.cos()], &[0.0, 1.0], 1e-13, 100);
        assert!((out.value[0] - (1f64.exp() - 1.0)).abs() < 1e-13);
        assert!((out.value[1] - 1f64.sin()).abs() < 1e-13);
    }

    #[test]
    fn reports_budget_exhaustion() {
        let out = integrate(&|t: f64| [1.0 / t.abs().sqrt().max(1e-300)], &[-1.0, 1.0], 1e-15, 8);
        assert!(!out.converged);
    }
}
