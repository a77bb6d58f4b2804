//! Small derivative-free and first-order optimizers.

/// Nelder-Mead settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMead {
    pub max_iter: usize,
    /// Extra runs restarted from the best point found so far.
    pub restarts: usize,
    /// Relative size of the initial simplex edges.
    pub step: f64,
    /// Stop when the spread of objective values in the simplex drops below this.
    pub f_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            max_iter: 200,
            restarts: 2,
            step: 0.1,
            f_tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
}

impl NelderMead {
    /// Minimise `f` starting at `x0`. Non-finite objective values are
    /// treated as `+∞`. The result is never worse than `f(x0)`.
    pub fn minimize<F>(&self, mut f: F, x0: &[f64]) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let mut evals = 0;
        let mut obj = |x: &[f64]| {
            evals += 1;
            let v = f(x);
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        };
        let mut best = Minimum {
            x: x0.to_vec(),
            f: obj(x0),
            evaluations: 0,
        };
        if x0.is_empty() {
            best.evaluations = 1;
            return best;
        }
        for _ in 0..=self.restarts {
            let (x, fx) = self.run(&mut obj, &best.x, best.f);
            if fx < best.f {
                best.x = x;
                best.f = fx;
            }
        }
        best.evaluations = evals;
        best
    }

    fn run<F: FnMut(&[f64]) -> f64>(&self, f: &mut F, x0: &[f64], f0: f64) -> (Vec<f64>, f64) {
        let n = x0.len();
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), f0));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] = if x[i] != 0.0 {
                x[i] * (1.0 + self.step)
            } else {
                0.00025
            };
            let fx = f(&x);
            simplex.push((x, fx));
        }
        let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
        let point = |c: &[f64], d: &[f64], t: f64| -> Vec<f64> {
            c.iter().zip(d).map(|(a, b)| a + t * (b - a)).collect()
        };
        for _ in 0..self.max_iter {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (lo, hi) = (simplex[0].1, simplex[n].1);
            if hi.is_finite() && (hi - lo).abs() <= self.f_tol * (1.0 + lo.abs()) {
                break;
            }
            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, v) in centroid.iter_mut().zip(x) {
                    *c += v / n as f64;
                }
            }
            let worst = simplex[n].0.clone();
            let xr = point(&centroid, &worst, -alpha);
            let fr = f(&xr);
            if fr < simplex[0].1 {
                let xe = point(&centroid, &worst, -gamma);
                let fe = f(&xe);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            // outside contraction if the reflection helped at all, else inside
            let toward = if fr < simplex[n].1 { &xr } else { &worst };
            let xc = point(&centroid, toward, rho);
            let fc = f(&xc);
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
                continue;
            }
            let best = simplex[0].0.clone();
            for s in simplex.iter_mut().skip(1) {
                s.0 = point(&best, &s.0, sigma);
                s.1 = f(&s.0);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        simplex.swap_remove(0)
    }
}

/// Adam for gradient ascent on a flat parameter vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Adam {
    pub fn new(n: usize, lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    /// Move `params` along `grad` (ascent).
    pub fn ascend(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let b1t = 1.0 - self.beta1.powi(self.t as i32);
        let b2t = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let mh = self.m[i] / b1t;
            let vh = self.v[i] / b2t;
            params[i] += self.lr * mh / (vh.sqrt() + self.eps);
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }
}
