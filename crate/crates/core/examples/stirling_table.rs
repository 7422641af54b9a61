//! Prints the Stirling triangle up to `l = 8` and checks row sums against
//! the Bell numbers.

use spatialvar::combinatorics::StirlingTable;

fn main() -> spatialvar::Result<()> {
    let table = StirlingTable::new(8)?;
    for l in 1..=table.max_l() {
        let row = table.row(l);
        let cells: Vec<String> = row.iter().map(u128::to_string).collect();
        let bell: u128 = row.iter().sum();
        println!("l={l:<2} {:<40} bell={bell}", cells.join(" "));
    }
    Ok(())
}
