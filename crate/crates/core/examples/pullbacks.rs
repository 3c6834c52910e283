//! Pullback along an atom map, and sections over a product.

use l0mod::direct::DirectSystem;
use l0mod::index::{IndexSet, TailSpec};
use l0mod::measure::{AtomMap, AtomicMeasureSpace, L0Function};
use l0mod::module::{FiberModule, ModuleMorphism};
use l0mod::norm::{Fiber, NormSpec, PExponent};
use l0mod::pullback::{dl_pullback_iso, pullback_module, sections_iso};

pub fn run_example() -> l0mod::Result<String> {
    let y = AtomicMeasureSpace::new(vec!["p", "q"], vec![1.0, 1.0])?;
    let x = AtomicMeasureSpace::new(vec!["a", "b", "c"], vec![1.0, 2.0, 0.5])?;
    let f = AtomMap::from_table(x.clone(), y.clone(), vec![0, 1, 1])?;

    let sup = Fiber::from_norm(NormSpec::weighted(PExponent::Inf, vec![1.0, 1.0])?)?;
    let m = FiberModule::new(y.clone(), vec![Fiber::euclidean(2), sup])?;
    let pb = pullback_module(&f, &m)?;
    let v = m.element(vec![vec![3.0, 4.0], vec![-2.0, 1.0]])?;
    let mut out = format!(
        "f*M dims {:?}; |f*v| = {:?} equals |v| along f = {:?}; generates: {}\n",
        pb.module.dims(),
        pb.pull(&v)?.pointwise_norm()?.values(),
        v.pointwise_norm()?.compose(&f)?.values(),
        pb.generates()?
    );

    let half = ModuleMorphism::scalar(&m, &L0Function::constant(y.clone(), 0.5))?;
    let d = DirectSystem::new(
        IndexSet::chain(1, TailSpec::Identity),
        vec![m.clone(), m.clone()],
        vec![((0, 1), half)],
    )?;
    let cmp = dl_pullback_iso(&f, &d)?;
    out += &format!("lim f*M_i vs f*(lim M_i): {}\n", cmp.certificate.describe());

    let z = AtomicMeasureSpace::new(vec!["z1", "z2"], vec![0.25, 0.75])?;
    let s = sections_iso(&z, &m)?;
    out += &format!(
        "sections over Z x Y: product atoms {:?}, {}\n",
        s.product.atom_ids(),
        s.certificate.describe()
    );
    Ok(out)
}

#[allow(dead_code)]
fn main() -> l0mod::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
