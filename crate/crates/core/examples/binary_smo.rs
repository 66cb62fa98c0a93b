//! Trains a binary RBF SVM on XOR and inspects the dual solution.

use landcover_svm::svm::{
    dual_objective, max_kkt_violation, solve_dual, BinaryModel, BinaryProblem, SolverSettings,
};
use landcover_svm::Kernel;

fn main() -> landcover_svm::Result<()> {
    let features = vec![
        vec![0.0, 0.0],
        vec![1.0, 1.0],
        vec![0.0, 1.0],
        vec![1.0, 0.0],
    ];
    let labels = vec![-1, -1, 1, 1];
    let problem = BinaryProblem::new(features.clone(), labels, 10.0, Kernel::rbf(2.0)?)?;

    let solution = solve_dual(&problem, &SolverSettings::default(), true)?;
    println!("alphas: {:?}", solution.alphas);
    println!("bias: {:.6}", solution.bias);
    println!("updates: {}", solution.objective_trace.len());
    println!(
        "dual objective: {:.6}",
        dual_objective(&problem, &solution.alphas)?
    );
    println!(
        "largest KKT violation: {:.2e}",
        max_kkt_violation(&problem, &solution.alphas, solution.bias)?
    );

    let model = BinaryModel::from_dual(&problem, &solution);
    for x in &features {
        println!("f({x:?}) = {:+.4}", model.decision_value(x)?);
    }
    Ok(())
}
