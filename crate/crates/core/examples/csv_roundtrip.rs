// Write a sample to CSV and read it back through a column spec.

use lancaster::io::{read_sample, write_sample, ColumnSpec};
use lancaster::synthetic;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let sample = synthetic::gen_dataset_b(50, 2, 4)?;
    let path = std::env::temp_dir().join(format!("lancaster-roundtrip-{}.csv", std::process::id()));
    write_sample(&path, &sample)?;

    let spec = ColumnSpec::for_sample(&sample);
    println!("columns: {spec}");
    let back = read_sample(&path, &spec)?;
    let identical = sample.blocks().iter().zip(back.blocks()).all(|(a, b)| a.values() == b.values());
    println!("read {} rows, identical: {identical}", back.n());

    // a custom spec can regroup columns
    let regrouped = read_sample(&path, &ColumnSpec::parse("xy:1-4,z:5-6")?)?;
    println!("regrouped widths: {:?}", regrouped.blocks().iter().map(|b| b.d()).collect::<Vec<_>>());
    std::fs::remove_file(&path)?;
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
