//! Stratified k-fold cross-validation and grid search over `C` and kernel
//! parameters, scored by mean validation kappa.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classes::ClassTable;
use crate::data_io::SampleSet;
use crate::error::{Error, Result};
use crate::evaluation::build_error_matrix;
use crate::kernels::Kernel;
use crate::multiclass::train_multiclass;
use crate::svm::SolverSettings;

#[derive(Clone, Debug, PartialEq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Shuffles each class with a seeded RNG and deals its members round-robin over
/// the folds, continuing where the previous class stopped so fold sizes stay level.
pub fn stratified_kfold(samples: &SampleSet, folds: usize, seed: u64) -> Result<Vec<Fold>> {
    if folds < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 folds, got {folds}"
        )));
    }
    let counts = samples.class_counts();
    for (class, &n) in counts.iter().enumerate() {
        if n > 0 && n < folds {
            return Err(Error::invalid(format!(
                "class `{}` has {n} samples, fewer than {folds} folds",
                samples.classes().name(class)
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut validation: Vec<Vec<usize>> = vec![Vec::new(); folds];
    let mut next = 0;
    for class in 0..counts.len() {
        let mut members: Vec<usize> = samples
            .labels()
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect();
        members.shuffle(&mut rng);
        for idx in members {
            validation[next].push(idx);
            next = (next + 1) % folds;
        }
    }
    let n = samples.len();
    Ok(validation
        .into_iter()
        .map(|mut val| {
            val.sort_unstable();
            let mut in_val = vec![false; n];
            for &i in &val {
                in_val[i] = true;
            }
            Fold {
                train: (0..n).filter(|&i| !in_val[i]).collect(),
                validation: val,
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelFamily {
    Linear,
    Rbf,
    /// Polynomial of fixed degree and scale; `coef0` is searched.
    Polynomial {
        degree: u32,
        scale: f64,
    },
}

impl KernelFamily {
    pub fn quadratic() -> Self {
        KernelFamily::Polynomial {
            degree: 2,
            scale: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub c_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub coef0_values: Vec<f64>,
    pub folds: usize,
    pub seed: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            c_values: vec![1.0, 10.0, 100.0],
            gamma_values: vec![0.1, 1.0, 10.0],
            coef0_values: vec![1.0],
            folds: 5,
            seed: 42,
        }
    }
}

/// One grid point. `param` is gamma for RBF, coef0 for polynomial, absent for linear.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CellParams {
    pub c: f64,
    pub param: Option<f64>,
    #[serde(skip)]
    pub kernel: Kernel,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellResult {
    pub params: CellParams,
    pub kernel: String,
    pub fold_kappas: Vec<f64>,
    pub mean_kappa: Option<f64>,
    pub std_kappa: Option<f64>,
    /// Reason the cell was excluded, if it failed.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CvResult {
    pub family: String,
    pub folds: usize,
    pub seed: u64,
    pub best: CellParams,
    pub best_kernel: String,
    pub mean_kappa: f64,
    pub cells: Vec<CellResult>,
}

impl GridSpec {
    pub fn cells(&self, family: KernelFamily) -> Result<Vec<CellParams>> {
        if self.c_values.is_empty() {
            return Err(Error::invalid("C grid is empty"));
        }
        if let Some(c) = self.c_values.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
            return Err(Error::invalid(format!(
                "C values must be positive, got {c}"
            )));
        }
        let mut out = Vec::new();
        for &c in &self.c_values {
            match family {
                KernelFamily::Linear => out.push(CellParams {
                    c,
                    param: None,
                    kernel: Kernel::Linear,
                }),
                KernelFamily::Rbf => {
                    if self.gamma_values.is_empty() {
                        return Err(Error::invalid("gamma grid is empty"));
                    }
                    for &gamma in &self.gamma_values {
                        out.push(CellParams {
                            c,
                            param: Some(gamma),
                            kernel: Kernel::rbf(gamma)?,
                        });
                    }
                }
                KernelFamily::Polynomial { degree, scale } => {
                    if self.coef0_values.is_empty() {
                        return Err(Error::invalid("coef0 grid is empty"));
                    }
                    for &coef0 in &self.coef0_values {
                        out.push(CellParams {
                            c,
                            param: Some(coef0),
                            kernel: Kernel::polynomial(degree, scale, coef0)?,
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Validation kappa of each fold for one parameter setting.
pub fn evaluate_cell(
    samples: &SampleSet,
    folds: &[Fold],
    kernel: Kernel,
    c: f64,
    settings: &SolverSettings,
) -> Result<Vec<f64>> {
    folds
        .iter()
        .map(|fold| {
            let train = samples.subset(&fold.train);
            let model = train_multiclass(&train, kernel, c, settings)?;
            let val = samples.subset(&fold.validation);
            let predicted: Vec<u8> = model
                .predict_many(val.features())?
                .into_iter()
                .map(ClassTable::code)
                .collect();
            let reference: Vec<u8> = val.labels().iter().map(|&l| ClassTable::code(l)).collect();
            build_error_matrix(&reference, &predicted, samples.classes())?.kappa()
        })
        .collect()
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Higher mean kappa wins; equal means prefer smaller `C`, then smaller parameter.
fn better(a: (&CellParams, f64), b: (&CellParams, f64)) -> bool {
    let (pa, ka) = a;
    let (pb, kb) = b;
    if ka != kb {
        return ka > kb;
    }
    if pa.c != pb.c {
        return pa.c < pb.c;
    }
    pa.param.unwrap_or(0.0) < pb.param.unwrap_or(0.0)
}

/// Picks the best successful cell under the tie ladder.
pub fn select_best(cells: &[CellResult]) -> Option<&CellResult> {
    cells
        .iter()
        .filter_map(|c| c.mean_kappa.map(|k| (c, k)))
        .fold(
            None,
            |best: Option<(&CellResult, f64)>, (cell, k)| match best {
                Some((b, bk)) if !better((&cell.params, k), (&b.params, bk)) => Some((b, bk)),
                _ => Some((cell, k)),
            },
        )
        .map(|(c, _)| c)
}

pub fn grid_search_cv(
    samples: &SampleSet,
    family: KernelFamily,
    grid: &GridSpec,
    settings: &SolverSettings,
) -> Result<CvResult> {
    let folds = stratified_kfold(samples, grid.folds, grid.seed)?;
    let cells: Vec<CellResult> = grid
        .cells(family)?
        .into_par_iter()
        .map(
            |params| match evaluate_cell(samples, &folds, params.kernel, params.c, settings) {
                Ok(kappas) => {
                    let (mean, std) = mean_std(&kappas);
                    CellResult {
                        params,
                        kernel: params.kernel.to_string(),
                        fold_kappas: kappas,
                        mean_kappa: Some(mean),
                        std_kappa: Some(std),
                        error: None,
                    }
                }
                Err(e) => CellResult {
                    params,
                    kernel: params.kernel.to_string(),
                    fold_kappas: Vec::new(),
                    mean_kappa: None,
                    std_kappa: None,
                    error: Some(e.to_string()),
                },
            },
        )
        .collect();
    let best = select_best(&cells).ok_or(Error::SearchFailed)?;
    Ok(CvResult {
        family: best.params.kernel.family().to_string(),
        folds: grid.folds,
        seed: grid.seed,
        best: best.params,
        best_kernel: best.kernel.clone(),
        mean_kappa: best.mean_kappa.expect("selected cell succeeded"),
        cells: cells.clone(),
    })
}

impl CvResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cv result serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{}-fold stratified CV (seed {}), {} kernel\n{:>10} {:>10} {:>12} {:>10}\n",
            self.folds, self.seed, self.family, "C", "param", "mean kappa", "std"
        );
        for cell in &self.cells {
            let param = cell.params.param.map_or("-".to_string(), |p| p.to_string());
            match (cell.mean_kappa, cell.std_kappa) {
                (Some(m), Some(sd)) => s.push_str(&format!(
                    "{:>10} {:>10} {:>12.4} {:>10.4}\n",
                    cell.params.c, param, m, sd
                )),
                _ => s.push_str(&format!(
                    "{:>10} {:>10} {:>12} {:>10}\n",
                    cell.params.c, param, "failed", "-"
                )),
            }
        }
        s.push_str(&format!(
            "best: C={} {} mean kappa {:.4}\n",
            self.best.c, self.best_kernel, self.mean_kappa
        ));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn balanced(per_class: usize, k: usize) -> SampleSet {
        let classes = ClassTable::numbered(k).unwrap();
        let mut f = Vec::new();
        let mut l = Vec::new();
        for c in 0..k {
            for i in 0..per_class {
                f.push(vec![c as f64 * 10.0 + i as f64 * 0.1]);
                l.push(c);
            }
        }
        SampleSet::new(f, l, classes).unwrap()
    }

    #[test]
    fn one_per_class_per_fold() {
        let s = balanced(5, 2);
        let folds = stratified_kfold(&s, 5, 7).unwrap();
        for f in &folds {
            let mut per = [0; 2];
            for &i in &f.validation {
                per[s.labels()[i]] += 1;
            }
            assert_eq!(per, [1, 1]);
            assert_eq!(f.train.len() + f.validation.len(), 10);
        }
    }

    #[test]
    fn leave_one_out() {
        let s = balanced(3, 1);
        let folds = stratified_kfold(&s, 3, 0).unwrap();
        assert!(folds.iter().all(|f| f.validation.len() == 1));
    }

    #[test]
    fn deterministic() {
        let s = balanced(9, 3);
        assert_eq!(
            stratified_kfold(&s, 4, 11).unwrap(),
            stratified_kfold(&s, 4, 11).unwrap()
        );
    }

    #[test]
    fn small_class_is_named() {
        let classes = ClassTable::new(["water", "sand"]).unwrap();
        let s = SampleSet::new(vec![vec![0.0]; 7], vec![0, 0, 0, 0, 0, 1, 1], classes).unwrap();
        let err = stratified_kfold(&s, 3, 0).unwrap_err();
        assert!(err.to_string().contains("sand"));
        assert!(stratified_kfold(&s, 1, 0).is_err());
    }

    fn cell(c: f64, param: Option<f64>, mean: Option<f64>) -> CellResult {
        CellResult {
            params: CellParams {
                c,
                param,
                kernel: Kernel::Linear,
            },
            kernel: "linear".into(),
            fold_kappas: vec![],
            mean_kappa: mean,
            std_kappa: mean.map(|_| 0.0),
            error: None,
        }
    }

    #[test]
    fn tie_ladder() {
        let cells = [cell(10.0, None, Some(0.8)), cell(1.0, None, Some(0.8))];
        assert_eq!(select_best(&cells).unwrap().params.c, 1.0);
        let cells = [
            cell(1.0, Some(10.0), Some(0.8)),
            cell(1.0, Some(0.1), Some(0.8)),
            cell(100.0, Some(0.01), Some(0.7)),
        ];
        assert_eq!(select_best(&cells).unwrap().params.param, Some(0.1));
        let cells = [cell(1.0, None, None), cell(5.0, None, Some(0.1))];
        assert_eq!(select_best(&cells).unwrap().params.c, 5.0);
        assert!(select_best(&[cell(1.0, None, None)]).is_none());
    }
}
