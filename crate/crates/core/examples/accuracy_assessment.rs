//! Builds an error matrix from reference and predicted labels and prints the accuracy report.

use landcover_svm::evaluation::build_error_matrix;
use landcover_svm::ClassTable;

fn main() -> landcover_svm::Result<()> {
    let classes = ClassTable::new(["water", "built-up", "vegetation"])?;
    let reference = [1, 1, 1, 1, 2, 2, 2, 3, 3, 3, 3, 3, 0];
    let predicted = [1, 1, 1, 2, 2, 2, 3, 3, 3, 3, 1, 3, 2];
    let matrix = build_error_matrix(&reference, &predicted, &classes)?;
    print!("{}", matrix.report()?.to_text());
    Ok(())
}
