//! Binary soft-margin C-SVM trained by sequential minimal optimization.
//!
//! The dual problem solved is
//!
//! ```text
//! maximize   W(α) = Σ αᵢ − ½ Σᵢ Σⱼ αᵢ αⱼ yᵢ yⱼ K(xᵢ, xⱼ)
//! subject to 0 ≤ αᵢ ≤ C,  Σ αᵢ yᵢ = 0
//! ```
//!
//! Each iteration picks the maximal violating pair, moves the two multipliers
//! along the equality constraint by the analytic optimum clipped to the box,
//! and stops once the pair's violation gap drops below the KKT tolerance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{kernel_matrix, Kernel};

/// Curvature floor for pairs whose kernel rows coincide.
const MIN_CURVATURE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverSettings {
    pub kkt_tolerance: f64,
    /// Steps that would leave a multiplier closer than this to a bound snap onto the bound.
    pub min_alpha_step: f64,
    /// Cap on passes, where one pass is `n` pair updates. `None` means `max(10·n, 1000)`.
    pub max_passes: Option<usize>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            kkt_tolerance: 1e-3,
            min_alpha_step: 1e-12,
            max_passes: None,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.kkt_tolerance > 0.0 && self.kkt_tolerance.is_finite()) {
            return Err(Error::invalid("kkt_tolerance must be positive"));
        }
        if !(self.min_alpha_step > 0.0 && self.min_alpha_step.is_finite()) {
            return Err(Error::invalid("min_alpha_step must be positive"));
        }
        if self.max_passes == Some(0) {
            return Err(Error::invalid("max_passes must be positive"));
        }
        Ok(())
    }

    /// Pair updates allowed for a problem with `n` training vectors.
    pub fn iteration_limit(&self, n: usize) -> usize {
        let passes = self.max_passes.unwrap_or_else(|| (10 * n).max(1000));
        passes.saturating_mul(n.max(1))
    }
}

/// Two-class training set with labels in `{-1, +1}`.
#[derive(Clone, Debug)]
pub struct BinaryProblem {
    features: Vec<Vec<f64>>,
    labels: Vec<f64>,
    c: f64,
    kernel: Kernel,
}

impl BinaryProblem {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<i8>, c: f64, kernel: Kernel) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} feature vectors but {} labels",
                features.len(),
                labels.len()
            )));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid(format!("C must be positive, got {c}")));
        }
        kernel.validate()?;
        let dim = features.first().map_or(0, Vec::len);
        for (i, x) in features.iter().enumerate() {
            if x.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: x.len(),
                });
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!(
                    "sample {i} has a non-finite feature"
                )));
            }
        }
        let labels = labels
            .into_iter()
            .map(|y| match y {
                1 => Ok(1.0),
                -1 => Ok(-1.0),
                other => Err(Error::invalid(format!(
                    "binary labels must be ±1, got {other}"
                ))),
            })
            .collect::<Result<Vec<f64>>>()?;
        let has_pos = labels.iter().any(|&y| y > 0.0);
        let has_neg = labels.iter().any(|&y| y < 0.0);
        if !(has_pos && has_neg) {
            return Err(Error::Unsolvable(
                "both classes must be present in a binary problem".into(),
            ));
        }
        Ok(BinaryProblem {
            features,
            labels,
            c,
            kernel,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    /// Labels as `±1.0`.
    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// The same problem with every label negated.
    pub fn flipped(&self) -> Self {
        BinaryProblem {
            labels: self.labels.iter().map(|y| -y).collect(),
            ..self.clone()
        }
    }

    fn check_alphas(&self, alphas: &[f64]) -> Result<()> {
        if alphas.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: alphas.len(),
            });
        }
        if let Some((i, a)) = alphas
            .iter()
            .enumerate()
            .find(|(_, &a)| !(0.0..=self.c).contains(&a))
        {
            return Err(Error::invalid(format!(
                "alpha[{i}] = {a} lies outside the box [0, {}]",
                self.c
            )));
        }
        Ok(())
    }
}

/// Raw solver output, before zero multipliers are dropped.
#[derive(Clone, Debug)]
pub struct DualSolution {
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    /// Violation gap of the maximal violating pair at exit.
    pub violation: f64,
    /// Dual objective after every pairwise update; empty unless tracing was requested.
    pub objective_trace: Vec<f64>,
}

/// Runs SMO on `problem`. With `trace` set, the dual objective is recorded after each update.
pub fn solve_dual(
    problem: &BinaryProblem,
    settings: &SolverSettings,
    trace: bool,
) -> Result<DualSolution> {
    settings.validate()?;
    let n = problem.len();
    let c = problem.c;
    let y = &problem.labels;
    let gram = kernel_matrix(&problem.kernel, &problem.features)?;

    let mut alpha = vec![0.0; n];
    // Gradient of ½αᵀQα − Σα, with Q = yyᵀ∘K. Starts at −1 for α = 0.
    let mut grad = vec![-1.0; n];
    let mut objective_trace = Vec::new();
    let limit = settings.iteration_limit(n);

    let mut iterations = 0;
    loop {
        let (up, low, gap) = select_pair(&alpha, &grad, y, c);
        let (Some(i), Some(j)) = (up, low) else {
            break;
        };
        if gap <= settings.kkt_tolerance {
            break;
        }
        if iterations >= limit {
            return Err(Error::Convergence {
                iterations,
                violation: gap,
            });
        }
        iterations += 1;

        let curvature = (gram[i][i] + gram[j][j] - 2.0 * gram[i][j]).max(MIN_CURVATURE);
        // αᵢ moves by yᵢ·t and αⱼ by −yⱼ·t, keeping Σ αy fixed.
        let room_i = if y[i] > 0.0 { c - alpha[i] } else { alpha[i] };
        let room_j = if y[j] > 0.0 { alpha[j] } else { c - alpha[j] };
        let unclipped = gap / curvature;
        let step = unclipped.min(room_i).min(room_j);

        let old_i = alpha[i];
        let old_j = alpha[j];
        alpha[i] = snap(old_i + y[i] * step, room_i - step, y[i] > 0.0, c, settings);
        alpha[j] = snap(old_j - y[j] * step, room_j - step, y[j] < 0.0, c, settings);
        let delta_i = alpha[i] - old_i;
        let delta_j = alpha[j] - old_j;

        for (k, g) in grad.iter_mut().enumerate() {
            *g += y[k] * (y[i] * gram[k][i] * delta_i + y[j] * gram[k][j] * delta_j);
        }
        if trace {
            // ½αᵀQα − Σα = ½ Σ αₖ (gₖ − 1); W is its negation.
            let f: f64 = alpha
                .iter()
                .zip(&grad)
                .map(|(a, g)| a * (g - 1.0))
                .sum::<f64>()
                * 0.5;
            objective_trace.push(-f);
        }
    }

    let (_, _, violation) = select_pair(&alpha, &grad, y, c);
    let bias = compute_bias(&alpha, &grad, y, c);
    Ok(DualSolution {
        alphas: alpha,
        bias,
        iterations,
        violation,
        objective_trace,
    })
}

/// Places a multiplier exactly on a bound when the remaining room toward it is below
/// `min_alpha_step`. `toward_upper` says whether the room is measured toward `C` or `0`.
fn snap(value: f64, room_left: f64, toward_upper: bool, c: f64, settings: &SolverSettings) -> f64 {
    if room_left <= settings.min_alpha_step {
        if toward_upper {
            c
        } else {
            0.0
        }
    } else {
        value.clamp(0.0, c)
    }
}

fn in_up(alpha: f64, y: f64, c: f64) -> bool {
    (y > 0.0 && alpha < c) || (y < 0.0 && alpha > 0.0)
}

fn in_low(alpha: f64, y: f64, c: f64) -> bool {
    (y > 0.0 && alpha > 0.0) || (y < 0.0 && alpha < c)
}

/// Maximal violating pair: `i = argmax_{I_up} −yᵢgᵢ`, `j = argmin_{I_low} −yⱼgⱼ`.
/// Returns the pair and the gap `m − M` (0 when either set is empty).
fn select_pair(
    alpha: &[f64],
    grad: &[f64],
    y: &[f64],
    c: f64,
) -> (Option<usize>, Option<usize>, f64) {
    let mut up: Option<(usize, f64)> = None;
    let mut low: Option<(usize, f64)> = None;
    for t in 0..alpha.len() {
        let r = -y[t] * grad[t];
        if in_up(alpha[t], y[t], c) && up.is_none_or(|(_, best)| r > best) {
            up = Some((t, r));
        }
        if in_low(alpha[t], y[t], c) && low.is_none_or(|(_, best)| r < best) {
            low = Some((t, r));
        }
    }
    match (up, low) {
        (Some((i, m)), Some((j, big_m))) => (Some(i), Some(j), (m - big_m).max(0.0)),
        (u, l) => (u.map(|p| p.0), l.map(|p| p.0), 0.0),
    }
}

/// Mean of `yᵢ − Σⱼ αⱼyⱼKᵢⱼ` over free vectors, else the midpoint of the feasible interval.
fn compute_bias(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    for t in 0..alpha.len() {
        // yₜ − f_nobias(xₜ) = −yₜ gₜ
        let r = -y[t] * grad[t];
        if alpha[t] > 0.0 && alpha[t] < c {
            free_sum += r;
            free_count += 1;
        }
        // b ≥ r for I_up-only points, b ≤ r for I_low-only points.
        let up = in_up(alpha[t], y[t], c);
        let low = in_low(alpha[t], y[t], c);
        if up && !low {
            lower = lower.max(r);
        } else if low && !up {
            upper = upper.min(r);
        }
    }
    if free_count > 0 {
        free_sum / free_count as f64
    } else if lower.is_finite() && upper.is_finite() {
        0.5 * (lower + upper)
    } else if lower.is_finite() {
        lower
    } else if upper.is_finite() {
        upper
    } else {
        0.0
    }
}

/// A trained two-class SVM.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinaryModel {
    pub support_vectors: Vec<Vec<f64>>,
    /// `αᵢ·yᵢ` for each support vector.
    pub coefficients: Vec<f64>,
    pub bias: f64,
    pub kernel: Kernel,
}

impl BinaryModel {
    pub fn from_dual(problem: &BinaryProblem, solution: &DualSolution) -> Self {
        let (support_vectors, coefficients) = solution
            .alphas
            .iter()
            .zip(problem.features.iter().zip(&problem.labels))
            .filter(|(&a, _)| a != 0.0)
            .map(|(&a, (x, &y))| (x.clone(), a * y))
            .unzip();
        BinaryModel {
            support_vectors,
            coefficients,
            bias: solution.bias,
            kernel: problem.kernel,
        }
    }

    pub fn dimension(&self) -> Option<usize> {
        self.support_vectors.first().map(Vec::len)
    }

    /// `f(x) = Σ coeffᵢ K(svᵢ, x) + b`
    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        if let Some(d) = self.dimension() {
            if d != x.len() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: x.len(),
                });
            }
        }
        Ok(self.decision_value_unchecked(x))
    }

    pub(crate) fn decision_value_unchecked(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.coefficients)
            .map(|(sv, coef)| coef * self.kernel.eval_unchecked(sv, x))
            .sum::<f64>()
            + self.bias
    }

    /// Sign of the decision value; exactly zero maps to `+1`.
    pub fn predict(&self, x: &[f64]) -> Result<i8> {
        self.decision_value(x).map(sign)
    }

    /// Structural checks used when loading persisted models.
    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        if self.support_vectors.len() != self.coefficients.len() {
            return Err(Error::invalid(format!(
                "{} support vectors but {} coefficients",
                self.support_vectors.len(),
                self.coefficients.len()
            )));
        }
        if let Some(d) = self.dimension() {
            if self.support_vectors.iter().any(|sv| sv.len() != d) {
                return Err(Error::invalid("support vectors have mixed dimensions"));
            }
        }
        if !self.bias.is_finite() || self.coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("non-finite coefficient or bias"));
        }
        Ok(())
    }
}

pub fn sign(value: f64) -> i8 {
    if value >= 0.0 {
        1
    } else {
        -1
    }
}

pub fn train_binary(problem: &BinaryProblem, settings: &SolverSettings) -> Result<BinaryModel> {
    let solution = solve_dual(problem, settings, false)?;
    Ok(BinaryModel::from_dual(problem, &solution))
}

/// `W(α) = Σαᵢ − ½ΣΣ αᵢαⱼyᵢyⱼK(xᵢ,xⱼ)`, evaluated directly from the kernel.
pub fn dual_objective(problem: &BinaryProblem, alphas: &[f64]) -> Result<f64> {
    problem.check_alphas(alphas)?;
    let x = &problem.features;
    let y = &problem.labels;
    let mut quad = 0.0;
    for i in 0..x.len() {
        if alphas[i] == 0.0 {
            continue;
        }
        for j in 0..x.len() {
            quad +=
                alphas[i] * alphas[j] * y[i] * y[j] * problem.kernel.eval_unchecked(&x[i], &x[j]);
        }
    }
    Ok(alphas.iter().sum::<f64>() - 0.5 * quad)
}

/// Largest violation of the box-constrained dual KKT conditions for `(alphas, bias)`.
///
/// With `yf = yᵢ f(xᵢ)`: `α = 0` needs `yf ≥ 1`, `α = C` needs `yf ≤ 1`,
/// and `0 < α < C` needs `yf = 1`.
pub fn max_kkt_violation(problem: &BinaryProblem, alphas: &[f64], bias: f64) -> Result<f64> {
    problem.check_alphas(alphas)?;
    let x = &problem.features;
    let y = &problem.labels;
    let c = problem.c;
    let mut worst: f64 = 0.0;
    for i in 0..x.len() {
        let f: f64 = (0..x.len())
            .filter(|&j| alphas[j] != 0.0)
            .map(|j| alphas[j] * y[j] * problem.kernel.eval_unchecked(&x[j], &x[i]))
            .sum::<f64>()
            + bias;
        let margin = y[i] * f;
        let v = if alphas[i] == 0.0 {
            (1.0 - margin).max(0.0)
        } else if alphas[i] == c {
            (margin - 1.0).max(0.0)
        } else {
            (margin - 1.0).abs()
        };
        worst = worst.max(v);
    }
    Ok(worst)
}
