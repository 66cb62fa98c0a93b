//! Evaluates the three kernels on a few points and prints their Gram matrices.

use landcover_svm::kernels::kernel_matrix;
use landcover_svm::Kernel;

fn main() -> landcover_svm::Result<()> {
    let points = vec![
        vec![0.0, 0.0],
        vec![1.0, 0.0],
        vec![0.0, 2.0],
        vec![1.0, 1.0],
    ];
    for kernel in [Kernel::Linear, Kernel::rbf(0.5)?, Kernel::quadratic()] {
        println!("{kernel}");
        for row in kernel_matrix(&kernel, &points)? {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:8.4}")).collect();
            println!("  {}", cells.join(" "));
        }
    }
    Ok(())
}
