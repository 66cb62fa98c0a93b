//! Simple and weighted majority votes, and fusion of whole class maps.

use landcover_svm::data_io::ClassRaster;
use landcover_svm::ensemble::{combine_maps, disagreement, vote_simple, vote_weighted, TieBreak};
use landcover_svm::ClassTable;

fn main() -> landcover_svm::Result<()> {
    let tie = TieBreak::FirstListedMember;
    for votes in [[2, 2, 3], [1, 2, 3], [4, 4, 4]] {
        let record = vote_simple(&votes, tie)?;
        println!("{votes:?} -> {} (tie: {})", record.winner, record.was_tie);
    }
    let weighted = vote_weighted(&[1, 2, 2], &[3.0, 1.0, 1.0], tie)?;
    println!("[1, 2, 2] with weights [3, 1, 1] -> {}", weighted.winner);

    let classes = ClassTable::numbered(3)?;
    let maps = vec![
        ClassRaster::new(2, 3, vec![1, 1, 2, 3, 0, 2], classes.clone())?,
        ClassRaster::new(2, 3, vec![1, 2, 2, 3, 0, 1], classes.clone())?,
        ClassRaster::new(2, 3, vec![2, 3, 2, 1, 3, 3], classes)?,
    ];
    let (fused, ties) = combine_maps(&maps, None, tie)?;
    println!("fused map {:?}, {ties} ties", fused.values());
    for row in disagreement(&maps)? {
        let cells: Vec<String> = row.iter().map(|d| format!("{d:.2}")).collect();
        println!("  {}", cells.join(" "));
    }
    Ok(())
}
