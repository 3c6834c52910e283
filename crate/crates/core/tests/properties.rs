mod common;

use l0mod::direct::{direct_limit, dl_functor};
use l0mod::harness::{emit_report, Format, Loaded, RunConfig};
use l0mod::inverse::{il_functor, il_norm, inverse_limit, thread_of};
use l0mod::linalg::Matrix;
use l0mod::measure::{AtomMap, L0Function};
use l0mod::module::{kernel_image, module_distance, ModuleMorphism, Submodule};
use l0mod::norm::operator_norm;
use l0mod::pullback::{pullback_module, pullback_morphism};
use l0mod::random::{self, Blueprint, Shape};
use l0mod::system::{SystemMorphism, Variance};
use proptest::prelude::*;
use rand::Rng;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pointwise_norm_axioms(seed in any::<u64>(), c in -5.0f64..5.0) {
        let mut rng = random::rng(seed);
        let space = random::space(&mut rng, 4);
        let m = random::module(&mut rng, &space, 4);
        let (v, w) = (random::element(&mut rng, &m), random::element(&mut rng, &m));
        let nv = v.pointwise_norm().unwrap();
        let nw = w.pointwise_norm().unwrap();
        let sum = v.add(&w).unwrap().pointwise_norm().unwrap();
        let scaled = v.scale(&L0Function::constant(space.clone(), c)).unwrap().pointwise_norm().unwrap();
        for a in 0..space.len() {
            prop_assert!(nv.value(a) >= 0.0);
            prop_assert!(sum.value(a) <= nv.value(a) + nw.value(a) + 1e-9);
            prop_assert!(close(scaled.value(a), c.abs() * nv.value(a), 1e-9));
        }
        prop_assert_eq!(m.zero_element().pointwise_norm().unwrap().values().iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn operator_norm_bounds(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let dims: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=3)).collect();
        let f: Vec<_> = dims.iter().map(|&d| random::fiber(&mut rng, d)).collect();
        let t = random::gaussian_matrix(&mut rng, dims[1], dims[0]);
        let s = random::gaussian_matrix(&mut rng, dims[2], dims[1]);
        let (Ok(nt), Ok(ns), Ok(nst)) = (
            operator_norm(&t, &f[0], &f[1]),
            operator_norm(&s, &f[1], &f[2]),
            operator_norm(&(&s * &t), &f[0], &f[2]),
        ) else {
            return Ok(());
        };
        prop_assert!(nst.value <= nt.value * ns.value * (1.0 + 1e-9) + 1e-12);
        for _ in 0..8 {
            let x = random::gaussian_matrix(&mut rng, dims[0], 1).column(0).into_owned();
            let lhs = f[1].eval(&(&t * &x)).unwrap();
            prop_assert!(lhs <= nt.value * f[0].eval(&x).unwrap() * (1.0 + 1e-9) + 1e-12);
        }
    }

    #[test]
    fn direct_limit_functor_laws(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let shape = Shape { chain_prob: 0.3, ..Shape::default() };
        let (first, second) = random::composable_pair(&mut rng, shape, Variance::Direct).unwrap();
        let id = dl_functor(&SystemMorphism::identity(first.source())).unwrap();
        let lim = direct_limit(&l0mod::direct::DirectSystem::from_system(first.source().clone()).unwrap()).unwrap();
        prop_assert!(id.max_deviation(&ModuleMorphism::identity(&lim.module)) <= 1e-9);
        let whole = dl_functor(&SystemMorphism::compose(&second, &first).unwrap()).unwrap();
        let parts = dl_functor(&first).unwrap().then(&dl_functor(&second).unwrap()).unwrap();
        prop_assert!(whole.max_deviation(&parts) <= 1e-9);
    }

    #[test]
    fn inverse_limit_functor_laws(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let shape = Shape { chain_prob: 0.3, ..Shape::default() };
        let (first, second) = random::composable_pair(&mut rng, shape, Variance::Inverse).unwrap();
        let id = il_functor(&SystemMorphism::identity(first.source())).unwrap();
        let lim = inverse_limit(&l0mod::inverse::InverseSystem::from_system(first.source().clone()).unwrap()).unwrap();
        prop_assert!(id.max_deviation(&ModuleMorphism::identity(&lim.module)) <= 1e-9);
        let whole = il_functor(&SystemMorphism::compose(&second, &first).unwrap()).unwrap();
        let parts = il_functor(&first).unwrap().then(&il_functor(&second).unwrap()).unwrap();
        prop_assert!(whole.max_deviation(&parts) <= 1e-9);
    }

    #[test]
    fn pullback_is_functorial_and_isometric(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let space = random::space(&mut rng, 3);
        let m = random::module(&mut rng, &space, 3);
        let f = random::atom_map(&mut rng, &space, 4);
        let g = random::atom_map(&mut rng, f.source(), 4);
        let table = g.table().iter().map(|&x| f.image(x)).collect();
        let h = AtomMap::from_table(g.source().clone(), space.clone(), table).unwrap();

        let pf = pullback_module(&f, &m).unwrap();
        let pgf = pullback_module(&g, &pf.module).unwrap();
        let ph = pullback_module(&h, &m).unwrap();
        prop_assert!(pgf.module.same_as(&ph.module));

        let v = random::element(&mut rng, &m);
        let pulled = ph.pull(&v).unwrap().pointwise_norm().unwrap();
        let expect = v.pointwise_norm().unwrap().compose(&h).unwrap();
        prop_assert_eq!(pulled.values(), expect.values());

        let phi = random::morphism(&mut rng, &m, &m);
        let a = pullback_morphism(&g, &pullback_morphism(&f, &phi).unwrap()).unwrap();
        let b = pullback_morphism(&h, &phi).unwrap();
        prop_assert!(a.max_deviation(&b) <= 1e-12);
    }

    #[test]
    fn submodule_distance_is_ambient_distance(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let space = random::space(&mut rng, 3);
        let m = random::module(&mut rng, &space, 4);
        let spans: Vec<Matrix> = m
            .dims()
            .iter()
            .map(|&d| {
                let k = rng.gen_range(0..=d);
                random::gaussian_matrix(&mut rng, d, k)
            })
            .collect();
        let sub = Submodule::from_spans(&m, &spans).unwrap();
        let (v, w) = (random::element(&mut rng, &sub.module), random::element(&mut rng, &sub.module));
        let inner = module_distance(&v, &w).unwrap();
        let outer = module_distance(
            &sub.inclusion.apply(&v).unwrap(),
            &sub.inclusion.apply(&w).unwrap(),
        )
        .unwrap();
        prop_assert!((inner - outer).abs() <= 1e-9);
    }

    #[test]
    fn kernel_and_image_inclusions_are_admissible(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let space = random::space(&mut rng, 3);
        let m = random::module(&mut rng, &space, 4);
        let n = random::module(&mut rng, &space, 4);
        let phi = random::morphism(&mut rng, &m, &n);
        let ki = kernel_image(&phi).unwrap();
        prop_assert!(ki.kernel.inclusion.is_morphism().unwrap());
        prop_assert!(ki.image.inclusion.is_morphism().unwrap());
        let killed = ki.kernel.inclusion.then(&phi).unwrap();
        prop_assert!(killed.max_deviation(&ModuleMorphism::zero(&ki.kernel.module, &n).unwrap()) <= 1e-9);
        let image_dims: Vec<usize> = ki.image.module.dims();
        prop_assert_eq!(image_dims, phi.ranks());
    }

    #[test]
    fn poset_thread_norm_is_max_of_components(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let s = Blueprint::generate(&mut rng, Shape::default()).inverse();
        let lim = inverse_limit(&s).unwrap();
        let v = random::element(&mut rng, &lim.module);
        let t = thread_of(&lim, &v).unwrap();
        let norm = il_norm(&s, &t).unwrap().into_function().unwrap();
        let top = v.pointwise_norm().unwrap();
        for a in 0..s.space().len() {
            let max = t
                .components
                .iter()
                .map(|c| c.pointwise_norm().unwrap().value(a))
                .fold(0.0, f64::max);
            prop_assert!(close(norm.value(a), max, 1e-12));
            prop_assert!(close(norm.value(a), top.value(a), 1e-9));
        }
    }

    #[test]
    fn projections_separate_points(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let shape = Shape { chain_prob: 0.5, ..Shape::default() };
        let s = Blueprint::generate(&mut rng, shape).inverse();
        let lim = inverse_limit(&s).unwrap();
        let v = random::element(&mut rng, &lim.module);
        let w = random::element(&mut rng, &lim.module);
        let apart = v.max_deviation(&w) > 1e-6;
        let seen = lim
            .maps
            .iter()
            .any(|p| p.apply(&v).unwrap().max_deviation(&p.apply(&w).unwrap()) > 1e-9);
        prop_assert_eq!(apart, seen);
    }

    #[test]
    fn structured_reports_are_deterministic(seed in 0u64..1000) {
        let loaded = Loaded::load(common::fixture("pullback-commute.json")).unwrap();
        let config = RunConfig { seed, ..RunConfig::default() };
        let a = emit_report(&l0mod::harness::report(&loaded, None, &config), Format::Structured);
        let b = emit_report(&l0mod::harness::report(&loaded, None, &config), Format::Structured);
        prop_assert_eq!(a, b);
    }
}
