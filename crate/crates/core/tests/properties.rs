use cwewt::constants::joule_to_microkelvin;
use cwewt::potential::{line_scan, TrapModel};
use cwewt::trap_analysis::{find_minimum, minima_map, AxisPaths};
use cwewt::wkb::tunnelling_probability;
use cwewt::{load_preset, EnergySurface, ScanDirection, TrapConfig, PRESET_NAMES};
use proptest::prelude::*;

fn model(name: &str) -> TrapModel {
    TrapModel::new(load_preset(name).unwrap()).unwrap()
}

fn scaled(name: &str, blue: f64, red: f64) -> TrapModel {
    let mut cfg = load_preset(name).unwrap();
    cfg.scale_intensities(blue, red);
    TrapModel::new(cfg).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn analytic_gradient_matches_central_difference(
        preset in 0usize..4,
        x in 100e-9f64..600e-9,
        y in -3e-6f64..3e-6,
        z in -3e-6f64..3e-6,
    ) {
        let m = model(PRESET_NAMES[preset]);
        let h = 1e-11;
        let fd = (m.potential_at(x + h, y, z).unwrap() - m.potential_at(x - h, y, z).unwrap()) / (2.0 * h);
        let an = m.potential_dx(x, y, z).unwrap();
        // near stationary points compare against the natural gradient scale U / 100 nm
        let scale = an.abs().max(m.potential_at(x, y, z).unwrap().abs() / 100e-9);
        prop_assert!((fd - an).abs() <= 1e-6 * scale, "fd {fd:e} analytic {an:e}");
    }

    #[test]
    fn potential_is_linear_in_intensities(
        a in 0.0f64..3.0,
        b in 0.0f64..3.0,
        x in 100e-9f64..600e-9,
        y in -2e-6f64..2e-6,
        z in -2e-6f64..2e-6,
    ) {
        let p = [x, y, z];
        let u0 = scaled("C1", 0.0, 0.0).energy(p);
        let ub = scaled("C1", 1.0, 0.0).energy(p) - u0;
        let ur = scaled("C1", 0.0, 1.0).energy(p) - u0;
        let uab = scaled("C1", a, b).energy(p) - u0;
        let expect = a * ub + b * ur;
        prop_assert!((uab - expect).abs() <= 1e-12 * (ub.abs() * a + ur.abs() * b + u0.abs()));
    }

    #[test]
    fn potential_is_symmetric_under_y_z_exchange(
        preset in 0usize..4,
        x in 60e-9f64..800e-9,
        y in -4e-6f64..4e-6,
        z in -4e-6f64..4e-6,
    ) {
        let m = model(PRESET_NAMES[preset]);
        prop_assert_eq!(m.energy([x, y, z]), m.energy([x, z, y]));
    }
}

#[test]
fn zero_fields_without_gravity_are_flat_laterally() {
    let mut cfg = load_preset("C1").unwrap();
    cfg.scale_intensities(0.0, 0.0);
    cfg.gravity_sign = 0;
    let m = TrapModel::new(cfg).unwrap();
    let scan = line_scan(&m, [200e-9, 0.0, 0.0], ScanDirection::Y, -5e-6, 5e-6, 101).unwrap();
    assert!(scan.values.iter().all(|&v| v == scan.values[0]));
}

#[test]
fn transverse_diagonal_scan_is_mirror_symmetric() {
    for name in PRESET_NAMES {
        let m = model(name);
        let scan = line_scan(&m, [220e-9, 0.0, 0.0], ScanDirection::T, -3e-6, 3e-6, 301).unwrap();
        let v = &scan.values;
        for i in 0..v.len() {
            assert!((v[i] - v[v.len() - 1 - i]).abs() <= 1e-12 * v[i].abs(), "{name} at {i}");
        }
    }
}

#[test]
fn longitudinal_diagonal_is_symmetric_without_diffraction_only() {
    let mut cfg = load_preset("C1").unwrap();
    let scan = |cfg: &TrapConfig| {
        let m = TrapModel::new(cfg.clone()).unwrap();
        line_scan(&m, [220e-9, 0.0, 0.0], ScanDirection::L, -1e-6, 1e-6, 201).unwrap().values
    };
    let with = scan(&cfg);
    assert!((with[0] - with[200]).abs() > 1e-3 * with[0].abs());
    cfg.blue.region.diffraction = false;
    cfg.red.region.diffraction = false;
    let without = scan(&cfg);
    for i in 0..201 {
        assert!((without[i] - without[200 - i]).abs() <= 1e-12 * without[i].abs());
    }
}

#[test]
fn minima_map_is_symmetric_under_transpose() {
    let m = model("C1");
    let map = minima_map(&m, 2e-6, 21).unwrap();
    for iy in 0..21 {
        for iz in 0..21 {
            assert_eq!(map.at(iy, iz), map.at(iz, iy), "({iy}, {iz})");
        }
    }
    // centre column is bound, corner columns far outside the cross escape or are shallow
    let (x, u) = map.at(10, 10).unwrap();
    assert!(x > 150e-9 && x < 300e-9);
    assert!(joule_to_microkelvin(u) < -80.0);
}

#[test]
fn refined_minimum_is_not_above_a_fine_brute_force_grid() {
    for name in PRESET_NAMES {
        let m = model(name);
        let min = find_minimum(&m).unwrap();
        let [x0, y0, z0] = min.position;
        let mut brute = f64::INFINITY;
        for i in -10..=10 {
            for j in -10..=10 {
                for k in -10..=10 {
                    let p = [x0 + i as f64 * 1e-9, y0 + j as f64 * 10e-9, z0 + k as f64 * 10e-9];
                    brute = brute.min(m.energy(p));
                }
            }
        }
        assert!(min.energy <= brute, "{name}: {} > {}", min.energy, brute);
    }
}

#[test]
fn minimum_is_insensitive_to_coarse_grid_refinement() {
    for name in PRESET_NAMES {
        let base = load_preset(name).unwrap();
        let mut fine = base.clone();
        fine.analysis.coarse_x_step /= 2.0;
        fine.analysis.coarse_lateral_step /= 2.0;
        let a = find_minimum(&TrapModel::new(base).unwrap()).unwrap();
        let b = find_minimum(&TrapModel::new(fine).unwrap()).unwrap();
        for k in 0..3 {
            assert!((a.position[k] - b.position[k]).abs() < 0.1e-9, "{name} axis {k}: {:?} vs {:?}", a.position, b.position);
        }
    }
}

#[test]
fn gravity_direction_barely_moves_the_minimum() {
    for name in PRESET_NAMES {
        let mut up = load_preset(name).unwrap();
        let mut down = up.clone();
        up.gravity_sign = 1;
        down.gravity_sign = -1;
        let a = find_minimum(&TrapModel::new(up).unwrap()).unwrap();
        let b = find_minimum(&TrapModel::new(down).unwrap()).unwrap();
        let shift = (a.position[0] - b.position[0]).abs() / a.position[0];
        assert!(shift < 0.01, "{name}: {shift}");
        assert!(shift > 0.0);
    }
}

#[test]
fn tunnelling_grows_with_atom_energy() {
    for name in ["C2", "C3"] {
        let m = model(name);
        let min = find_minimum(&m).unwrap();
        let paths = AxisPaths::walk(&m, &min, ScanDirection::L);
        let mut scan = paths.escape_scan(&m, &min).unwrap();
        let top = paths.barrier(min.energy);
        let mut last = 0.0;
        for i in 0..20 {
            scan.energy = min.energy + top * (0.05 + 0.9 * i as f64 / 19.0);
            let t = tunnelling_probability(&scan).unwrap();
            assert!(t.probability > last, "{name} step {i}");
            last = t.probability;
        }
        scan.energy = min.energy + 1.01 * top;
        assert!(tunnelling_probability(&scan).unwrap().no_barrier);
    }
}
