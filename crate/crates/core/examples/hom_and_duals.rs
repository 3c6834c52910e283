//! Hom modules with the operator norm, covectors and adjoints.

use l0mod::hom::{adjoint, dual_module, hom_module, pairing};
use l0mod::linalg::Matrix;
use l0mod::measure::AtomicMeasureSpace;
use l0mod::module::{FiberModule, ModuleMorphism};
use l0mod::norm::{Fiber, NormSpec, PExponent};

pub fn run_example() -> l0mod::Result<String> {
    let space = AtomicMeasureSpace::new(vec!["s", "t"], vec![0.5, 0.5])?;
    let l1 = Fiber::from_norm(NormSpec::weighted(PExponent::One, vec![1.0, 1.0])?)?;
    let m = FiberModule::new(space.clone(), vec![l1, Fiber::euclidean(2)])?;
    let n = FiberModule::uniform(space.clone(), Fiber::euclidean(1));

    let dual = dual_module(&m);
    let omega = dual.covector(vec![vec![1.0, -1.0], vec![0.6, 0.8]])?;
    let v = m.element(vec![vec![2.0, 1.0], vec![3.0, 4.0]])?;
    let mut out = format!(
        "<omega, v> = {:?}\n|omega| = {:?}  (sup norm at s, euclidean at t)\n",
        pairing(&omega, &v)?.values(),
        omega.pointwise_norm()?.values()
    );

    let hom = hom_module(&m, &n)?;
    let phi = ModuleMorphism::new(
        m.clone(),
        n.clone(),
        vec![
            Matrix::from_row_slice(1, 2, &[1.0, 0.5]),
            Matrix::from_row_slice(1, 2, &[0.0, 2.0]),
        ],
    )?;
    let as_element = hom.element_of(&phi)?;
    out += &format!(
        "|phi| in Hom(M, N) = {:?}\n",
        as_element.pointwise_norm()?.values()
    );
    let back = hom.morphism_of(&as_element)?;
    out += &format!("round trip deviation = {:e}\n", back.max_deviation(&phi));

    let star = adjoint(&phi)?;
    out += &format!("adjoint norms = {:?}\n", star.operator_pointwise_norm()?.values());
    Ok(out)
}

#[allow(dead_code)]
fn main() -> l0mod::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
