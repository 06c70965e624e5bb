// A small acceptance-rate sweep on Dataset A, printed as CSV.

use lancaster::bench::{run_bench, write_rows_to, BenchConfig, BenchTest, Dataset};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let tests = BenchTest::parse_list("hsic_xy,lancaster_xy_z,total3")?;
    let mut config = BenchConfig::new(Dataset::A, vec![1, 3], tests);
    config.n = 150;
    config.trials = 10;
    config.permutations = 100;
    config.seed = 2;
    config.record_timing = false;
    let rows = run_bench(&config)?;
    write_rows_to(std::io::stdout(), &rows)?;
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
