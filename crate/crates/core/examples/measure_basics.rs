//! Atomic measure spaces, L0 functions and the metric of convergence in measure.

use l0mod::measure::{l0_distance, pushforward_check, AtomMap, AtomicMeasureSpace, L0Function};

pub fn run_example() -> l0mod::Result<String> {
    let y = AtomicMeasureSpace::new(vec!["p", "q"], vec![1.0, 3.0])?;
    let x = AtomicMeasureSpace::new(vec!["a", "b", "c"], vec![0.5, 0.5, 2.0])?;

    let f = L0Function::new(y.clone(), vec![2.0, 0.25])?;
    let g = L0Function::constant(y.clone(), 1.0);
    let d = l0_distance(&f, &g)?;

    let squeeze = AtomMap::from_table(x.clone(), y.clone(), vec![0, 1, 1])?;
    let pulled = f.compose(&squeeze)?;
    let check = pushforward_check(&squeeze);

    Ok(format!(
        "mass(Y) = {}\nd(f, 1) = {d:.4}\nf along the squeeze = {:?}\npushforward weights {:?}, absolutely continuous: {}\n",
        y.total_mass(),
        pulled.values(),
        check.weights,
        check.abs_continuous
    ))
}

#[allow(dead_code)]
fn main() -> l0mod::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
