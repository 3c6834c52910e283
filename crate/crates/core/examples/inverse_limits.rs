//! Inverse limits, the harmonic collapse and the dual of a direct limit.

use l0mod::direct::DirectSystem;
use l0mod::index::{IndexSet, TailSpec};
use l0mod::inverse::{
    check_inverse_surjectivity, dual_limit_iso, il_norm, inverse_limit, thread_of, InverseSystem,
};
use l0mod::measure::{AtomicMeasureSpace, L0Function};
use l0mod::module::{FiberModule, ModuleMorphism};
use l0mod::norm::Fiber;
use l0mod::system::SystemMorphism;

fn scale(m: &std::sync::Arc<FiberModule>, c: f64) -> l0mod::Result<ModuleMorphism> {
    ModuleMorphism::scalar(m, &L0Function::constant(m.space().clone(), c))
}

pub fn run_example() -> l0mod::Result<String> {
    let y = AtomicMeasureSpace::new(vec!["p", "q"], vec![1.0, 3.0])?;
    let m = FiberModule::uniform(y.clone(), Fiber::euclidean(2));

    let steps = |tail: TailSpec| -> l0mod::Result<InverseSystem> {
        let maps = (0..3)
            .map(|k| Ok(((k, k + 1), scale(&m, (k as f64 + 1.0) / (k as f64 + 2.0))?)))
            .collect::<l0mod::Result<Vec<_>>>()?;
        InverseSystem::new(IndexSet::chain(3, tail), vec![m.clone(); 4], maps)
    };

    let harmonic = steps(TailSpec::Harmonic)?;
    let lim = inverse_limit(&harmonic)?;
    let mut out = format!("harmonic chain: limit dims {:?}\n", lim.dims());

    let stable = steps(TailSpec::Identity)?;
    let lim = inverse_limit(&stable)?;
    let v = m.element(vec![vec![1.0, 0.0], vec![0.0, 2.0]])?;
    let t = thread_of(&lim, &v)?;
    out += &format!(
        "identity tail: limit dims {:?}, |thread| = {:?}\n",
        lim.dims(),
        il_norm(&stable, &t)?.into_function()?.values()
    );

    let constant = InverseSystem::new(
        IndexSet::chain(3, TailSpec::Identity),
        vec![m.clone(); 4],
        (0..3)
            .map(|k| ((k, k + 1), ModuleMorphism::identity(&m)))
            .collect(),
    )?;
    let onto: Vec<_> = (0..4)
        .map(|k| scale(&m, 1.0 / (k as f64 + 1.0)))
        .collect::<l0mod::Result<_>>()?;
    let theta = SystemMorphism::new(harmonic.system(), constant.system(), onto)?;
    let r = check_inverse_surjectivity(&theta)?;
    out += &format!(
        "onto components (hypothesis {}), onto limit map (conclusion {})\n",
        r.hypothesis, r.conclusion
    );

    let d = DirectSystem::new(
        IndexSet::chain(1, TailSpec::Identity),
        vec![m.clone(), m.clone()],
        vec![((0, 1), scale(&m, 0.5)?)],
    )?;
    let dual = dual_limit_iso(&d)?;
    out += &format!("(lim M_i)* vs lim M_i*: {}\n", dual.certificate.describe());
    Ok(out)
}

#[allow(dead_code)]
fn main() -> l0mod::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
