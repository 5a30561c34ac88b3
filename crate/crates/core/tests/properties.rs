use proptest::prelude::*;

use normcraft_core::decompose::{decompose, recompose, Kernel};
use normcraft_core::metrics::{mae, ssim};
use normcraft_core::normal::angle_between;
use normcraft_core::transfer::{transfer, TransferRequest};
use normcraft_core::{rotation_from_z, rotation_to_z, NormalMap, UnitVec3, Vec3};

fn unit_away_from_pole() -> impl Strategy<Value = UnitVec3> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter_map("away from zero and -z", |(x, y, z)| {
            UnitVec3::normalize(Vec3::new(x, y, z)).filter(|u| u.get().z > -0.999)
        })
}

/// Fully valid maps of mostly upward normals, so every shape normal stays
/// well away from the pole.
fn upward_map(max_side: usize) -> impl Strategy<Value = NormalMap> {
    (3..=max_side, 3..=max_side).prop_flat_map(|(w, h)| {
        proptest::collection::vec((-0.8f64..0.8, -0.8f64..0.8), w * h).prop_map(move |xy| {
            let data = xy.into_iter().map(|(x, y)| Vec3::new(x, y, 1.0)).collect();
            NormalMap::from_vectors(w, h, data).unwrap()
        })
    })
}

fn map_pair(max_side: usize) -> impl Strategy<Value = (NormalMap, NormalMap)> {
    (3..=max_side, 3..=max_side).prop_flat_map(|(w, h)| {
        let field = move || {
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0, 0.05f64..1.0), w * h).prop_map(move |v| {
                let data = v.into_iter().map(|(x, y, z)| Vec3::new(x, y, z)).collect();
                NormalMap::from_vectors(w, h, data).unwrap()
            })
        };
        (field(), field())
    })
}

proptest! {
    #[test]
    fn rotation_aligns_with_z(u in unit_away_from_pole()) {
        let r = rotation_to_z(u).unwrap();
        let d = r.apply(u.get()) - Vec3::Z;
        prop_assert!(d.norm() < 1e-9);
        prop_assert!(r.orthogonality_error() < 1e-12);
        prop_assert!((r.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_from_z_inverts(u in unit_away_from_pole(), v in unit_away_from_pole()) {
        let back = rotation_from_z(u).unwrap().apply(rotation_to_z(u).unwrap().apply(v.get()));
        prop_assert!((back - v.get()).norm() < 1e-9);
    }

    #[test]
    fn rotation_preserves_angles(u in unit_away_from_pole(), a in unit_away_from_pole(), b in unit_away_from_pole()) {
        let r = rotation_to_z(u).unwrap();
        let before = angle_between(a.get(), b.get());
        let after = angle_between(r.apply(a.get()), r.apply(b.get()));
        prop_assert!((before - after).abs() < 1e-7);
    }

    #[test]
    fn decomposition_round_trips(n in upward_map(12), w in 1usize..4) {
        let k = Kernel::gaussian_default(w).unwrap();
        let back = recompose(&decompose(&n, &k).unwrap()).unwrap();
        for (a, b) in back.data().iter().zip(n.data()) {
            prop_assert!(angle_between(*a, *b) < 1e-7);
        }
    }

    #[test]
    fn detail_and_shape_are_unit(n in upward_map(10)) {
        let d = decompose(&n, &Kernel::average(2).unwrap()).unwrap();
        for v in d.shape.data().iter().chain(d.detail.data()) {
            prop_assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_detail_reproduces_the_shape(n in upward_map(10)) {
        let flat = NormalMap::constant(n.width(), n.height(), UnitVec3::Z);
        let res = transfer(&TransferRequest::new(&flat, &n)).unwrap();
        for (a, b) in res.output.data().iter().zip(n.data()) {
            prop_assert!((*a - *b).norm() < 1e-12);
        }
    }

    #[test]
    fn metric_symmetry_and_range((a, b) in map_pair(12)) {
        prop_assert_eq!(mae(&a, &b).unwrap(), mae(&b, &a).unwrap());
        let (ab, ba) = (ssim(&a, &b).unwrap().value, ssim(&b, &a).unwrap().value);
        prop_assert!((ab - ba).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(mae(&a, &a).unwrap(), 0.0);
        prop_assert_eq!(ssim(&a, &a).unwrap().value, 1.0);
    }
}
