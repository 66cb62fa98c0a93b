//! Reference implementations used only by tests. None of these call into the
//! code paths they are used to check.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use landcover_svm::svm::BinaryProblem;
use landcover_svm::Kernel;

/// Straight transcription of the three kernel formulas.
pub fn kernel_ref(kernel: &Kernel, x: &[f64], y: &[f64]) -> f64 {
    match *kernel {
        Kernel::Linear => x.iter().zip(y).map(|(a, b)| a * b).sum(),
        Kernel::Rbf { gamma } => {
            let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
            (-gamma * d2).exp()
        }
        Kernel::Polynomial {
            degree,
            scale,
            coef0,
        } => {
            let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            (scale * dot + coef0).powf(f64::from(degree))
        }
    }
}

/// Euclidean projection onto `{0 ≤ a ≤ c, yᵀa = 0}`: `a(λ) = clip(v + λy)`, with λ
/// found by bisection on the monotone map `λ ↦ yᵀa(λ)`.
fn project(v: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let at = |lambda: f64| -> Vec<f64> {
        v.iter()
            .zip(y)
            .map(|(vi, yi)| (vi + lambda * yi).clamp(0.0, c))
            .collect()
    };
    let h = |a: &[f64]| a.iter().zip(y).map(|(ai, yi)| ai * yi).sum::<f64>();
    let bound = v.iter().fold(0.0f64, |m, x| m.max(x.abs())) + c + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(&at(mid)) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * bound {
            break;
        }
    }
    at(0.5 * (lo + hi))
}

/// Dual objective `Σα − ½ αᵀQα` with `Q = yyᵀ∘K` from an explicit Gram matrix.
pub fn dual_value(gram: &[Vec<f64>], y: &[f64], alpha: &[f64]) -> f64 {
    let n = alpha.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * gram[i][j];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

pub fn gram_ref(kernel: &Kernel, xs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    xs.iter()
        .map(|a| xs.iter().map(|b| kernel_ref(kernel, a, b)).collect())
        .collect()
}

/// Accelerated projected gradient with adaptive restart on the SVM dual.
/// Returns `(alphas, objective)`.
pub fn pg_dual_oracle(problem: &BinaryProblem) -> (Vec<f64>, f64) {
    let xs = problem.features();
    let y = problem.labels();
    let c = problem.c();
    let n = xs.len();
    let gram = gram_ref(problem.kernel(), xs);
    let q: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| y[i] * y[j] * gram[i][j]).collect())
        .collect();
    // Gershgorin bound on the largest eigenvalue of Q.
    let lipschitz = q
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let step = 1.0 / lipschitz;

    let mut x = vec![0.0; n];
    let mut z = x.clone();
    let mut t = 1.0f64;
    for _ in 0..400_000 {
        // Gradient of f = ½αᵀQα − Σα at the extrapolated point.
        let grad: Vec<f64> = (0..n)
            .map(|i| q[i].iter().zip(&z).map(|(a, b)| a * b).sum::<f64>() - 1.0)
            .collect();
        let v: Vec<f64> = z.iter().zip(&grad).map(|(zi, gi)| zi - step * gi).collect();
        let next = project(&v, y, c);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let moved: f64 = next
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        // Restart momentum when it points uphill.
        let uphill: f64 = z
            .iter()
            .zip(&next)
            .zip(&x)
            .map(|((zi, ni), xi)| (zi - ni) * (ni - xi))
            .sum();
        if uphill > 0.0 {
            t = 1.0;
            z = next.clone();
        } else {
            let beta = (t - 1.0) / t_next;
            z = next
                .iter()
                .zip(&x)
                .map(|(ni, xi)| ni + beta * (ni - xi))
                .collect();
            t = t_next;
        }
        x = next;
        if moved <= 1e-14 * c.max(1.0) {
            break;
        }
    }
    let value = dual_value(&gram, y, &x);
    (x, value)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` points in `[-2, 2]^d` with labels from a noisy quadratic rule; both labels always present.
pub fn random_problem(seed: u64, n: usize, d: usize, c: f64, kernel: Kernel) -> BinaryProblem {
    let mut r = rng(seed);
    let xs: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| r.random_range(-2.0..2.0)).collect())
        .collect();
    let mut ys: Vec<i8> = xs
        .iter()
        .map(|x| {
            let s =
                x[0] * x[0] - x.get(1).copied().unwrap_or(0.0) - 0.5 + r.random_range(-0.7..0.7);
            if s >= 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();
    ys[0] = 1;
    ys[1] = -1;
    BinaryProblem::new(xs, ys, c, kernel).unwrap()
}

/// Cohen's kappa written as `(p_o − p_e) / (1 − p_e)` over proportions.
pub fn kappa_ref(counts: &[Vec<u64>]) -> f64 {
    let k = counts.len();
    let n: f64 = counts.iter().flatten().map(|&v| v as f64).sum();
    let po = (0..k).map(|i| counts[i][i] as f64).sum::<f64>() / n;
    let pe = (0..k)
        .map(|i| {
            let row: f64 = counts[i].iter().map(|&v| v as f64).sum();
            let col: f64 = counts.iter().map(|r| r[i] as f64).sum();
            (row / n) * (col / n)
        })
        .sum::<f64>();
    (po - pe) / (1.0 - pe)
}

pub fn min_eigenvalue(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mat = nalgebra::DMatrix::from_fn(n, n, |i, j| m[i][j]);
    nalgebra::SymmetricEigen::new(mat)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
