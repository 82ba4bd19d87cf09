//! Internal derivative-free minimizers: golden-section search, downhill
//! bracketing, and a Nelder-Mead simplex polish. The receiver objectives are
//! smooth and cheap, so robustness is preferred over sophistication.

/// Golden-section minimization of `f` on `[a, b]`. Returns `(x_min, f_min)`.
pub(crate) fn golden_section<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    xtol: f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    if b < a {
        std::mem::swap(&mut a, &mut b);
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a) > xtol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Expand downhill from `x0` until a local minimum is bracketed, then refine
/// with golden section. The search never leaves `[lo, hi]`.
pub(crate) fn bracket_and_minimize<F: FnMut(f64) -> f64>(
    mut f: F,
    x0: f64,
    step: f64,
    lo: f64,
    hi: f64,
    xtol: f64,
) -> (f64, f64) {
    let clamp = |x: f64| x.clamp(lo, hi);
    let x0 = clamp(x0);
    let f0 = f(x0);
    let (xm, fm) = {
        let xl = clamp(x0 - step);
        let xr = clamp(x0 + step);
        let fl = f(xl);
        let fr = f(xr);
        if f0 <= fl && f0 <= fr {
            // Already bracketed around the start.
            return golden_section(f, xl, xr, xtol);
        }
        if fl < fr {
            (xl, fl)
        } else {
            (xr, fr)
        }
    };
    // Walk downhill with doubling steps.
    let dir = (xm - x0).signum();
    let mut prev = (x0, f0);
    let mut cur = (xm, fm);
    let mut h = step * 2.0;
    loop {
        let x_next = clamp(cur.0 + dir * h);
        if x_next == cur.0 {
            // Pinned at a domain edge: refine the last interval.
            return golden_section(f, prev.0, cur.0, xtol);
        }
        let f_next = f(x_next);
        if f_next >= cur.1 {
            return golden_section(f, prev.0, x_next, xtol);
        }
        prev = cur;
        cur = (x_next, f_next);
        h *= 2.0;
    }
}

pub(crate) struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: u64,
    pub converged: bool,
}

/// Nelder-Mead with standard coefficients. `scale` sets the initial simplex
/// edge per coordinate.
pub(crate) fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    scale: &[f64],
    ftol: f64,
    xtol: f64,
    max_iter: usize,
) -> SimplexResult {
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let dim = x0.len();
    let mut evals = 0u64;
    let mut eval = |x: &[f64], evals: &mut u64| {
        *evals += 1;
        f(x)
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += scale[i];
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| eval(p, &mut evals)).collect();

    let mut converged = false;
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        let spread = values[worst] - values[best];
        let size = simplex
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&simplex[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        // ftol is relative to the incumbent value so that objectives with a
        // nonzero floor (noisy least squares) can still terminate; a fully
        // collapsed simplex also counts as converged.
        if spread.abs() <= ftol * (1.0 + values[best].abs()) || size <= xtol {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; dim];
        for &idx in order.iter().take(dim) {
            for (c, v) in centroid.iter_mut().zip(&simplex[idx]) {
                *c += v;
            }
        }
        for c in centroid.iter_mut() {
            *c /= dim as f64;
        }

        let lerp = |from: &[f64], coeff: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(from)
                .map(|(c, w)| c + coeff * (c - w))
                .collect()
        };

        let reflected = lerp(&simplex[worst], ALPHA);
        let f_reflected = eval(&reflected, &mut evals);
        if f_reflected < values[second_worst] && f_reflected >= values[best] {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }
        if f_reflected < values[best] {
            let expanded = lerp(&simplex[worst], GAMMA);
            let f_expanded = eval(&expanded, &mut evals);
            if f_expanded < f_reflected {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
            continue;
        }
        let contracted = lerp(&simplex[worst], -RHO);
        let f_contracted = eval(&contracted, &mut evals);
        if f_contracted < values[worst] {
            simplex[worst] = contracted;
            values[worst] = f_contracted;
            continue;
        }
        // Shrink toward the best vertex.
        let anchor = simplex[best].clone();
        for &idx in order.iter().skip(1) {
            let shrunk: Vec<f64> = anchor
                .iter()
                .zip(&simplex[idx])
                .map(|(a, p)| a + SIGMA * (p - a))
                .collect();
            values[idx] = eval(&shrunk, &mut evals);
            simplex[idx] = shrunk;
        }
    }

    let best = (0..=dim)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap();
    SimplexResult {
        x: simplex[best].clone(),
        value: values[best],
        evaluations: evals,
        converged,
    }
}
