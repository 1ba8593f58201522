//! Derivative-free local minimization: a Nelder–Mead simplex followed by a
//! coordinate-wise golden-section polish.

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Stop when the spread of simplex values falls below this...
    pub f_tol: f64,
    /// ...and the simplex fits in a box of this size.
    pub x_tol: f64,
    pub max_evals: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.6,
            f_tol: 1e-13,
            x_tol: 1e-9,
            max_evals: 20_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LocalMinimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Nelder–Mead with dimension-adaptive coefficients.
pub fn nelder_mead<F>(f: &F, x0: &[f64], opts: &NelderMeadOptions) -> LocalMinimum
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    if n == 0 {
        return LocalMinimum {
            x: Vec::new(),
            f: f(x0),
            evals: 1,
            converged: true,
        };
    }
    let nf = n as f64;
    let (alpha, gamma) = (1.0, 1.0 + 2.0 / nf);
    let rho = 0.75 - 1.0 / (2.0 * nf);
    let sigma = 1.0 - 1.0 / nf;

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut evals = n + 1;
    let mut converged = false;

    let point = |base: &[f64], dir: &[f64], t: f64| -> Vec<f64> {
        base.iter().zip(dir).map(|(b, d)| b + t * (d - b)).collect()
    };

    while evals < opts.max_evals {
        // sort ascending; ties keep insertion order
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let size = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread <= opts.f_tol && size <= opts.x_tol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|v| v[k]).sum::<f64>() / nf)
            .collect();
        let worst = simplex[n].clone();

        let xr = point(&centroid, &worst, -alpha);
        let fr = f(&xr);
        evals += 1;

        if fr < values[0] {
            let xe = point(&centroid, &worst, -gamma);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = point(&centroid, &worst, -rho);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = point(&centroid, &worst, rho);
            let fc = f(&xc);
            (xc, fc)
        };
        evals += 1;
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        // shrink towards the best vertex
        let best = simplex[0].clone();
        for i in 1..=n {
            simplex[i] = point(&best, &simplex[i], sigma);
            values[i] = f(&simplex[i]);
        }
        evals += n;
    }

    let best = (0..=n)
        .min_by(|&i, &j| values[i].total_cmp(&values[j]))
        .expect("simplex is never empty");
    LocalMinimum {
        x: simplex[best].clone(),
        f: values[best],
        evals,
        converged,
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization of `g` on `[lo, hi]`, returning `(x, g(x))`.
fn golden_section<G: Fn(f64) -> f64>(g: &G, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64, usize) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    let mut evals = 2;
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = g(x2);
        }
        evals += 1;
    }
    if f1 <= f2 {
        (x1, f1, evals)
    } else {
        (x2, f2, evals)
    }
}

/// Sweeps golden-section line searches along each coordinate of `start`
/// within `±half_width` until a sweep stops improving.
pub fn coordinate_polish<F>(f: &F, start: LocalMinimum, half_width: f64, tol: f64) -> LocalMinimum
where
    F: Fn(&[f64]) -> f64,
{
    let mut x = start.x;
    let mut fx = start.f;
    let mut evals = start.evals;
    for _sweep in 0..20 {
        let before = fx;
        for k in 0..x.len() {
            let centre = x[k];
            let line = |t: f64| {
                let mut y = x.clone();
                y[k] = t;
                f(&y)
            };
            let (t, ft, e) = golden_section(&line, centre - half_width, centre + half_width, tol);
            evals += e;
            if ft < fx {
                x[k] = t;
                fx = ft;
            }
        }
        if before - fx <= 1e-15 {
            break;
        }
    }
    LocalMinimum {
        x,
        f: fx,
        evals,
        converged: start.converged,
    }
}
