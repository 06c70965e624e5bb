// A binary distribution whose Lancaster interaction vanishes although no
// variable is independent of the other two. Norms are exact.

use lancaster::hypothesis::Variable;
use lancaster::kernels::KernelSpec;
use lancaster::synthetic::{counterexample_table, population_norm_discrete, PopulationMeasure};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let table = counterexample_table();
    for (x, y, z) in (0..8).map(|c| (c >> 2, (c >> 1) & 1, c & 1)) {
        println!("P({x},{y},{z}) = {:.1}", table.prob(x, y, z));
    }
    let kernels = [KernelSpec::gaussian_fixed(1.0)?; 3];
    println!("lancaster norm^2: {:.3e}", population_norm_discrete(&table, &kernels, PopulationMeasure::Lancaster)?);
    println!("total norm^2:     {:.3e}", population_norm_discrete(&table, &kernels, PopulationMeasure::TotalIndependence)?);
    for v in Variable::ALL {
        let d = population_norm_discrete(&table, &kernels, PopulationMeasure::JointPair(v))?;
        println!("split off {v:?}: {d:.4e}");
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
