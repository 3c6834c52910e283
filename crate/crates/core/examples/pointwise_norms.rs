//! Fibers with weighted, framed and dual norms, and exact operator norms between them.

use l0mod::linalg::{Matrix, Vector};
use l0mod::measure::AtomicMeasureSpace;
use l0mod::module::{FiberModule, ModuleMorphism};
use l0mod::norm::{operator_norm, Fiber, NormSpec, PExponent};

pub fn run_example() -> l0mod::Result<String> {
    let l1 = Fiber::from_norm(NormSpec::weighted(PExponent::One, vec![1.0, 2.0])?)?;
    let sup = Fiber::from_norm(NormSpec::weighted(PExponent::Inf, vec![1.0, 1.0])?)?;
    let framed = Fiber::from_norm(NormSpec::framed(
        PExponent::Two,
        Matrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]),
    )?)?;
    let dual = l1.dual();

    let x = Vector::from_vec(vec![3.0, -1.0]);
    let mut out = String::new();
    for (name, f) in [
        ("l1 weighted", &l1),
        ("sup", &sup),
        ("framed l2", &framed),
        ("dual of l1", &dual),
    ] {
        out += &format!("{name:>12}: |(3,-1)| = {:.4}\n", f.eval(&x)?);
    }

    let sum = Matrix::from_row_slice(1, 2, &[1.0, 1.0]);
    let v = operator_norm(&sum, &sup, &Fiber::scalar())?;
    out += &format!(
        "|x+y| from sup to |.|: {} ({:?}, attained at {:?})\n",
        v.value,
        v.method,
        v.maximizer.as_slice()
    );

    let space = AtomicMeasureSpace::new(vec!["a", "b"], vec![1.0, 1.0])?;
    let m = FiberModule::new(space.clone(), vec![l1.clone(), framed.clone()])?;
    let t = ModuleMorphism::new(
        m.clone(),
        m.clone(),
        vec![
            Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
            Matrix::identity(2, 2) * 0.5,
        ],
    )?;
    out += &format!(
        "pointwise operator norm of a module map: {:?}\n",
        t.operator_pointwise_norm()?.values()
    );
    Ok(out)
}

#[allow(dead_code)]
fn main() -> l0mod::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
