//! Property tests of invariants that cut across modules.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::costrat::{evaluation_vector, vertex_projection, TruncatedHilbert};
use crate::dynamics::{localization_probability, log_grid, overlap_series};
use crate::liecore::{
    coadjoint_action, diagonal_conjugate, momentum_map, polar_compose, polar_decompose, AlgebraElement,
    ComplexGroupElement, GroupElement, PhasePoint, Sign,
};
use crate::linalg::projection_defect;
use crate::quasichar::{invariant_basis, irrep, FunctionVector};
use crate::strata::{sample_level_set, stabilizer_type, SampleMode};
use crate::tproc::{hereditary_and_projection, ConstraintSystem, MatrixAlgebra};
use crate::{CMatrix, CVector, C64};

fn group() -> impl Strategy<Value = GroupElement> {
    prop::array::uniform4(-1.0f64..1.0)
        .prop_filter("away from zero", |q| q.iter().map(|x| x * x).sum::<f64>() > 1e-2)
        .prop_map(|q| {
            let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
            GroupElement::from_quaternion([q[0] / n, q[1] / n, q[2] / n, q[3] / n])
        })
}

fn algebra(scale: f64) -> impl Strategy<Value = AlgebraElement> {
    prop::array::uniform3(-scale..scale).prop_map(AlgebraElement::from_coords)
}

fn phase_point(n: usize) -> impl Strategy<Value = PhasePoint> {
    prop::collection::vec((group(), algebra(2.0)), n).prop_map(|links| PhasePoint::new(links).unwrap())
}

fn complex_vector(len: usize) -> impl Strategy<Value = CVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| CVector::from_iterator(v.len(), v.into_iter().map(|(re, im)| C64::new(re, im))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn polar_map_round_trip(a in group(), x in algebra(3.0)) {
        let (b, y) = polar_decompose(&polar_compose(&a, &x)).unwrap();
        prop_assert!((b.matrix() - a.matrix()).norm() < 1e-9);
        prop_assert!((y.matrix() - x.matrix()).norm() < 1e-9);
    }

    #[test]
    fn momentum_map_is_equivariant(p in phase_point(3), g in group()) {
        let lhs = momentum_map(&diagonal_conjugate(&g, &p));
        let rhs = coadjoint_action(&g, &momentum_map(&p));
        prop_assert!((lhs.matrix() - rhs.matrix()).norm() < 1e-10);
    }

    #[test]
    fn irreps_are_homomorphisms(g in group(), h in group(), x in algebra(1.0), n in 0u32..25) {
        let lhs = irrep(n, &(g.matrix() * h.matrix()));
        let rhs = irrep(n, g.matrix()) * irrep(n, h.matrix());
        prop_assert!((lhs - &rhs).norm() < 1e-10 * rhs.norm().max(1.0));
        let c = *polar_compose(&h, &x).matrix();
        let lhs = irrep(n, &(g.matrix() * c));
        let rhs = irrep(n, g.matrix()) * irrep(n, &c);
        prop_assert!((lhs - &rhs).norm() < 1e-10 * rhs.norm().max(1.0));
    }

    #[test]
    fn orbit_type_is_conjugation_invariant(seed in any::<u64>(), g in group(), n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for mode in [SampleMode::TorusSector, SampleMode::Generic] {
            let p = sample_level_set(&mut rng, n, mode).unwrap();
            let q = diagonal_conjugate(&g, &p);
            prop_assert_eq!(stabilizer_type(&p, 1e-9), stabilizer_type(&q, 1e-9));
        }
    }

    #[test]
    fn localization_is_a_probability(v in complex_vector(11), jmax in 4u32..11) {
        let h = TruncatedHilbert::new(&invariant_basis(1, 10, 0.2, 1.0).unwrap());
        let state = FunctionVector::new(v).normalized();
        for nu in [Sign::Plus, Sign::Minus] {
            let p = vertex_projection(&h, &[nu]).unwrap();
            let x = localization_probability(&state, &p).unwrap();
            prop_assert!((0.0..=1.0).contains(&x));
            prop_assert!(projection_defect(&p.p) < 1e-12);
        }
        let small = TruncatedHilbert::new(&invariant_basis(1, jmax, 0.2, 1.0).unwrap());
        prop_assert!(projection_defect(&vertex_projection(&small, &[Sign::Plus]).unwrap().p) < 1e-12);
    }

    #[test]
    fn evaluation_vectors_reproduce(
        v in complex_vector(14),
        a in prop::collection::vec((group(), algebra(0.5)), 2),
    ) {
        let h = TruncatedHilbert::new(&invariant_basis(2, 2, 0.3, 1.2).unwrap());
        prop_assert_eq!(h.dim(), 14);
        let point: Vec<ComplexGroupElement> = a.iter().map(|(g, x)| polar_compose(g, x)).collect();
        let mats: Vec<_> = point.iter().map(|g| *g.matrix()).collect();
        let phi = FunctionVector::new(v);
        let psi_b = evaluation_vector(&h, &point).unwrap();
        let direct = h.evaluate(&phi, &mats).unwrap();
        prop_assert!((psi_b.inner(&phi) - direct).norm() < 1e-9 * direct.norm().max(1.0));
    }

    #[test]
    fn t_procedure_outputs_are_consistent(
        blocks in prop::collection::vec(1usize..4, 1..3),
        seeds in prop::collection::vec(any::<u64>(), 0..3),
    ) {
        let algebra = MatrixAlgebra::new(blocks.clone()).unwrap();
        let d = algebra.size();
        let constraints: Vec<CMatrix> = seeds
            .iter()
            .map(|&s| {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let j = rand::Rng::random_range(&mut rng, 0..blocks.len());
                let k = blocks[j];
                let m = CMatrix::from_fn(k, k, |_, _| {
                    C64::new(rand::Rng::random_range(&mut rng, -1.0..1.0), rand::Rng::random_range(&mut rng, -1.0..1.0))
                });
                algebra.embed(&(m.adjoint() * &m), j)
            })
            .collect();
        let cs = ConstraintSystem::new(algebra.clone(), constraints.clone(), 1e-12).unwrap();
        let result = hereditary_and_projection(&cs, 1e-10);
        prop_assert!(projection_defect(&result.q) < 1e-9);
        prop_assert!((&result.q + &result.p - CMatrix::identity(d, d)).norm() < 1e-12);
        prop_assert!(algebra.contains(&result.q, 1e-9));
        for c in &constraints {
            prop_assert!((&result.q * c - c).norm() < 1e-8 * c.norm().max(1.0));
        }
        let dims = result.dims();
        prop_assert!(dims.hereditary <= dims.left_ideal);
        prop_assert!(dims.physical <= dims.observable);
    }

    #[test]
    fn log_grid_is_increasing(a in 0.01f64..10.0, ratio in 1.01f64..100.0, n in 2usize..50) {
        let g = log_grid(a, a * ratio, n);
        prop_assert_eq!(g.len(), n);
        prop_assert!((g[0] - a).abs() < 1e-12 * a);
        prop_assert!((g[n - 1] - a * ratio).abs() < 1e-9 * a * ratio);
        prop_assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn overlap_series_is_bounded(s in 0.3f64..5.0) {
        let x = overlap_series(s, 200);
        prop_assert!(x > 0.0 && x <= 1.0);
    }
}
