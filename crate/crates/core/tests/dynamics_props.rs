mod common;

use std::sync::Arc;

use common::{random_z2, rational, trap_orbit_stays};
use dydy::dynamics::{
    classify_point_orbit, find_cycle_hensel, multiplier, pcf_parameter, standard_trap, OrbitClass,
    OrbitOptions, TrapLibrary,
};
use dydy::geometry::Disk;
use dydy::poly::FamilyMember;
use dydy::{q, Rational2};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn f1() -> FamilyMember {
    FamilyMember::new(Rational2::one())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn escaping_points_keep_growing(n in -2000i64..2000, e in -3i32..3, o in 0i64..30) {
        let f = f1();
        let z = rational(n, e, o);
        let report = classify_point_orbit(&f, &z, &OrbitOptions { max_iters: 200, ..OrbitOptions::default() });
        if let OrbitClass::Escapes { at_iterate } = report.class {
            let mut w = f.iterate(&z, at_iterate);
            for _ in 0..5 {
                let next = f.eval(&w);
                let (v, nv) = (w.val().finite().unwrap(), next.val().finite().unwrap());
                prop_assert!(v < -1);
                prop_assert_eq!(nv, 3 * v);
                w = next;
            }
        }
    }
}

#[test]
fn trap_disks_are_invariant_for_q2_points() {
    let f = f1();
    let trap = standard_trap();
    std::thread::scope(|s| {
        for (i, d) in trap.disks().enumerate() {
            let (f, trap) = (&f, &trap);
            s.spawn(move || {
                let mut rng = ChaCha8Rng::seed_from_u64(0x7a3 + i as u64);
                for _ in 0..100 {
                    let z = d.point(&random_z2(&mut rng));
                    trap_orbit_stays(f, trap, &z, 10_000, 128).unwrap();
                }
            });
        }
    });
}

#[test]
fn hensel_consistency() {
    let f = f1();
    let seed: Disk = "7:4".parse().unwrap();
    for n in [32u32, 48, 64] {
        let lo = find_cycle_hensel(&f, 2, &seed, n).unwrap();
        let hi = find_cycle_hensel(&f, 2, &seed, 2 * n).unwrap();
        let a = lo.hensel.approx.clone();
        let b = hi.hensel.approx.clone();
        assert!(a.congruent(&b, n as i64), "precision {n}: {a} vs {b}");
    }
}

#[test]
fn multiplier_is_rotation_invariant() {
    for (t, period, seed) in [
        (Rational2::one(), 2, "7:4"),
        (Rational2::one(), 1, "-1/2:3"),
    ] {
        let f = FamilyMember::new(t);
        let cyc = find_cycle_hensel(&f, period, &seed.parse().unwrap(), 96).unwrap();
        let mut pts = cyc.points.clone();
        let base = multiplier(&f, &pts, 96).unwrap();
        for _ in 0..period {
            pts.rotate_left(1);
            let m = multiplier(&f, &pts, 96).unwrap();
            assert_eq!(m.val, base.val);
            assert!(m.value.sub(&base.value).val_lower_bound().at_least(40));
        }
    }
}

#[test]
fn pcf_orbits_return_exactly_at_n() {
    for n in 3..=6 {
        let p = pcf_parameter(n, 64).unwrap();
        assert!(p.verified_bits >= 40, "n = {n}");
        for (m, v) in p.orbit_valuations.iter().enumerate().take(n).skip(1) {
            assert!(!v.at_least(40), "n = {n}: f^{m}(0) already 0 mod 2^40");
        }
    }
}

#[test]
fn shared_library_sees_discoveries() {
    let lib = Arc::new(TrapLibrary::seeded());
    let opts = OrbitOptions {
        traps: lib.clone(),
        ..OrbitOptions::default()
    };
    let r = classify_point_orbit(&f1(), &q(19, 2), &opts);
    assert!(matches!(
        r.class,
        OrbitClass::TrappedQ2 { .. } | OrbitClass::Preperiodic { .. }
    ));
    assert!(!lib.is_empty());
}
