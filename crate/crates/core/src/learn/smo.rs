//! Sequential minimal optimization for the soft-margin kernel SVM dual
//! (Platt's two-heuristic variant with an error cache).
//!
//! The solver is deterministic: the only randomness is the rotation offset
//! of the fallback partner scans, drawn from a seeded ChaCha stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub(crate) fn rbf_kernel(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

pub(crate) struct SmoProblem<'a> {
    /// Scaled feature rows.
    pub x: &'a [Vec<f64>],
    /// Labels in {-1, +1}.
    pub y: &'a [f64],
    pub c: f64,
    pub gamma: f64,
    /// KKT violation tolerance.
    pub tol: f64,
    pub seed: u64,
}

pub(crate) struct SmoSolution {
    pub alphas: Vec<f64>,
    pub bias: f64,
    #[allow(dead_code)]
    pub sweeps: usize,
}

const MAX_SWEEPS: usize = 1_000;
const STEP_EPS: f64 = 1e-3;

struct Solver<'a> {
    problem: &'a SmoProblem<'a>,
    kernel: Vec<f64>,
    n: usize,
    alphas: Vec<f64>,
    bias: f64,
    /// errors[i] = f(x_i) - y_i
    errors: Vec<f64>,
    rng: ChaCha8Rng,
}

pub(crate) fn solve(problem: &SmoProblem<'_>) -> SmoSolution {
    let n = problem.x.len();
    let mut kernel = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let k = rbf_kernel(&problem.x[i], &problem.x[j], problem.gamma);
            kernel[i * n + j] = k;
            kernel[j * n + i] = k;
        }
    }
    let mut solver = Solver {
        problem,
        kernel,
        n,
        alphas: vec![0.0; n],
        bias: 0.0,
        errors: problem.y.iter().map(|&y| -y).collect(),
        rng: ChaCha8Rng::seed_from_u64(problem.seed),
    };
    let sweeps = solver.run();
    SmoSolution {
        alphas: solver.alphas,
        bias: solver.bias,
        sweeps,
    }
}

impl Solver<'_> {
    fn k(&self, i: usize, j: usize) -> f64 {
        self.kernel[i * self.n + j]
    }

    fn run(&mut self) -> usize {
        let mut sweeps = 0;
        let mut examine_all = true;
        let mut changed = 1;
        while (changed > 0 || examine_all) && sweeps < MAX_SWEEPS {
            sweeps += 1;
            changed = 0;
            if examine_all {
                for i in 0..self.n {
                    changed += usize::from(self.examine(i));
                }
            } else {
                for i in 0..self.n {
                    if self.is_unbound(i) {
                        changed += usize::from(self.examine(i));
                    }
                }
            }
            if examine_all {
                examine_all = false;
            } else if changed == 0 {
                examine_all = true;
            }
        }
        sweeps
    }

    fn is_unbound(&self, i: usize) -> bool {
        self.alphas[i] > 0.0 && self.alphas[i] < self.problem.c
    }

    fn examine(&mut self, i2: usize) -> bool {
        let y2 = self.problem.y[i2];
        let alpha2 = self.alphas[i2];
        let e2 = self.errors[i2];
        let r2 = e2 * y2;
        let violates = (r2 < -self.problem.tol && alpha2 < self.problem.c)
            || (r2 > self.problem.tol && alpha2 > 0.0);
        if !violates {
            return false;
        }
        // Heuristic 1: the unbound partner with the largest |E1 - E2|.
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.n {
            if i != i2 && self.is_unbound(i) {
                let gap = (self.errors[i] - e2).abs();
                if best.is_none_or(|(_, g)| gap > g) {
                    best = Some((i, gap));
                }
            }
        }
        if let Some((i1, _)) = best {
            if self.take_step(i1, i2) {
                return true;
            }
        }
        // Heuristic 2: all unbound, from a random start.
        let offset = self.rng.gen_range(0..self.n);
        for d in 0..self.n {
            let i1 = (offset + d) % self.n;
            if i1 != i2 && self.is_unbound(i1) && self.take_step(i1, i2) {
                return true;
            }
        }
        // Heuristic 3: everything, from a random start.
        let offset = self.rng.gen_range(0..self.n);
        for d in 0..self.n {
            let i1 = (offset + d) % self.n;
            if i1 != i2 && self.take_step(i1, i2) {
                return true;
            }
        }
        false
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        let c = self.problem.c;
        let (y1, y2) = (self.problem.y[i1], self.problem.y[i2]);
        let (alpha1, alpha2) = (self.alphas[i1], self.alphas[i2]);
        let (e1, e2) = (self.errors[i1], self.errors[i2]);
        let s = y1 * y2;
        let (low, high) = if (y1 - y2).abs() > 0.5 {
            ((alpha2 - alpha1).max(0.0), (c + alpha2 - alpha1).min(c))
        } else {
            ((alpha1 + alpha2 - c).max(0.0), (alpha1 + alpha2).min(c))
        };
        if low >= high {
            return false;
        }
        let (k11, k12, k22) = (self.k(i1, i1), self.k(i1, i2), self.k(i2, i2));
        let eta = k11 + k22 - 2.0 * k12;
        // eta can hit 0 for duplicated rows; a tiny positive stand-in turns
        // the update into a jump to whichever bound the gradient favors.
        let eta = if eta > 0.0 { eta } else { 1e-12 };
        let mut a2 = alpha2 + y2 * (e1 - e2) / eta;
        a2 = a2.clamp(low, high);
        if (a2 - alpha2).abs() < STEP_EPS * (a2 + alpha2 + STEP_EPS) {
            return false;
        }
        let a1 = (alpha1 + s * (alpha2 - a2)).clamp(0.0, c);
        let (d1, d2) = (a1 - alpha1, a2 - alpha2);

        let b1 = self.bias - e1 - y1 * d1 * k11 - y2 * d2 * k12;
        let b2 = self.bias - e2 - y1 * d1 * k12 - y2 * d2 * k22;
        let new_bias = if a1 > 0.0 && a1 < c {
            b1
        } else if a2 > 0.0 && a2 < c {
            b2
        } else {
            (b1 + b2) / 2.0
        };
        let delta_b = new_bias - self.bias;

        self.alphas[i1] = a1;
        self.alphas[i2] = a2;
        self.bias = new_bias;
        for k in 0..self.n {
            self.errors[k] += y1 * d1 * self.k(i1, k) + y2 * d2 * self.k(i2, k) + delta_b;
        }
        true
    }
}
