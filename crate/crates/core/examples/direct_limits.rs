//! Direct limits over a poset with a greatest element and over a chain with a tail.

use l0mod::direct::{direct_limit, dl_seminorm, ColimitClass, DirectSystem};
use l0mod::index::{FinitePoset, IndexSet, TailSpec};
use l0mod::linalg::Matrix;
use l0mod::measure::AtomicMeasureSpace;
use l0mod::module::{FiberModule, ModuleMorphism};
use l0mod::norm::Fiber;

pub fn run_example() -> l0mod::Result<String> {
    let x = AtomicMeasureSpace::dirac("x");
    let plane = FiberModule::uniform(x.clone(), Fiber::euclidean(2));
    let line = FiberModule::uniform(x.clone(), Fiber::euclidean(1));

    // a and b both map into top.
    let pairs = [
        ("a".to_string(), "top".to_string()),
        ("b".to_string(), "top".to_string()),
    ];
    let poset = FinitePoset::new(vec!["a", "b", "top"], &pairs)?;
    let into_x = ModuleMorphism::new(
        line.clone(),
        plane.clone(),
        vec![Matrix::from_row_slice(2, 1, &[1.0, 0.0])],
    )?;
    let into_y = ModuleMorphism::new(
        line.clone(),
        plane.clone(),
        vec![Matrix::from_row_slice(2, 1, &[0.0, 0.5])],
    )?;
    let d = DirectSystem::new(
        IndexSet::Poset(poset),
        vec![line.clone(), line.clone(), plane.clone()],
        vec![((0, 2), into_x), ((1, 2), into_y)],
    )?;
    let lim = direct_limit(&d)?;
    let mut out = format!(
        "poset limit: dims {:?}, read off stage {} ({})\n",
        lim.dims(),
        d.system().label(lim.top),
        lim.provenance.tag()
    );
    let class = ColimitClass::new(&d, 1, line.element(vec![vec![4.0]])?)?;
    out += &format!("|[b: 4]| = {:?}\n", dl_seminorm(&d, &class)?.values());

    let half = ModuleMorphism::new(plane.clone(), plane.clone(), vec![Matrix::identity(2, 2) * 0.5])?;
    let chain = DirectSystem::new(
        IndexSet::chain(2, TailSpec::Identity),
        vec![plane.clone(); 3],
        vec![((0, 1), half.clone()), ((1, 2), half)],
    )?;
    let lim = direct_limit(&chain)?;
    out += &format!(
        "chain limit: dims {:?} ({}), stage-0 map {:?}\n",
        lim.dims(),
        lim.provenance.tag(),
        lim.maps[0].at(0).as_slice()
    );
    Ok(out)
}

#[allow(dead_code)]
fn main() -> l0mod::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
