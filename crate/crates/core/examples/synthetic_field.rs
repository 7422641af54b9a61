//! Seeded lognormal field with short-range correlation, summarized and
//! written as `site_id,value`.

use spatialvar::synthetic::{generate, SyntheticSpec};

fn main() -> spatialvar::Result<()> {
    let spec = SyntheticSpec {
        sites: 50,
        ..SyntheticSpec::default()
    };
    let ef = generate(&spec, 3)?;
    let mut sorted = ef.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    println!(
        "# median {:.3}, max {:.3}, spatial variance {:.3}",
        sorted[ef.len() / 2],
        sorted[ef.len() - 1],
        ef.spatial_variance()
    );
    println!("site_id,value");
    for (i, v) in ef.values().iter().enumerate() {
        println!("{i},{v}");
    }
    Ok(())
}
