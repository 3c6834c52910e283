//! A finitely generated module as the direct limit of the chain of its generated submodules.

use l0mod::direct::present_as_fg_limit;
use l0mod::measure::AtomicMeasureSpace;
use l0mod::module::{FiberModule, ModuleMorphism};
use l0mod::norm::{Fiber, NormSpec, PExponent};

pub fn run_example() -> l0mod::Result<String> {
    let x = AtomicMeasureSpace::new(vec!["a", "b"], vec![1.0, 2.0])?;
    let l1 = Fiber::from_norm(NormSpec::weighted(PExponent::One, vec![1.0, 1.0])?)?;
    let m = FiberModule::new(x, vec![l1, Fiber::euclidean(3)])?;
    let gens = vec![
        m.element(vec![vec![1.0, 0.0], vec![1.0, 0.0, 0.0]])?,
        m.element(vec![vec![1.0, 0.0], vec![1.0, 0.0, 0.0]])?,
        m.element(vec![vec![0.0, 1.0], vec![0.0, 1.0, 1.0]])?,
        m.element(vec![vec![0.0, 0.0], vec![0.0, 0.0, 1.0]])?,
    ];
    let p = present_as_fg_limit(&m, &gens)?;
    let mut out = String::new();
    for (i, stage) in p.system.system().modules().iter().enumerate() {
        out += &format!("stage {i}: dims {:?}\n", stage.dims());
    }
    out += &format!(
        "limit dims {:?}, certified {}, iso deviation from identity {:e}\n",
        p.limit.dims(),
        p.certified,
        p.iso.max_deviation(&ModuleMorphism::identity(&m))
    );
    Ok(out)
}

#[allow(dead_code)]
fn main() -> l0mod::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
