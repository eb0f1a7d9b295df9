//! One PASS/FAIL line per headline criterion. Run with
//! `cargo test -p cwewt --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use cwewt::atomic_physics::AtomSpecies;
use cwewt::constants::HBAR;
use cwewt::mode_model::{interference_period, rayleigh_length, reflection_period, FringeModel, ModeSpec};
use cwewt::potential::line_scan;
use cwewt::scattering::coherence_time_from_rates;
use cwewt::slab_solver::{slab_neff, Polarization, SlabGeometry};
use cwewt::trap_analysis::{find_minimum, minima_map, AxisPaths};
use cwewt::wkb::{tunnelling_probability, tunnelling_probability_fn};
use cwewt::{characterize, load_preset, EnergySurface, ScanDirection, TrapModel, PRESET_NAMES};

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    (value / target - 1.0).abs() <= rel
}

fn mode(lambda: f64, w: f64, n: f64) -> ModeSpec {
    ModeSpec {
        wavelength: lambda,
        lateral_width: w,
        n_eff_rib: n,
        n_eff_cross: n,
        peak_intensity: 1.0,
        effective_area: None,
        fringe_model: FringeModel::None,
    }
}

fn rayleigh() -> Outcome {
    let b = rayleigh_length(&mode(720e-9, 1.646e-6, 1.386));
    let r = rayleigh_length(&mode(850e-9, 2.03e-6, 1.347));
    Outcome {
        name: "Rayleigh lengths",
        pass: within(b, 16.2e-6, 0.02) && within(r, 20.5e-6, 0.02),
        detail: format!("{:.2} um (16.2), {:.2} um (20.5)", b * 1e6, r * 1e6),
    }
}

fn alpha() -> Outcome {
    let rb = AtomSpecies::rubidium87();
    let published = [(720e-9, 4.909), (850e-9, -6.616), (640e-9, 1.859), (930e-9, -3.362)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (lambda, want) in published {
        let got = rb.dipole_coefficient(lambda).unwrap() * 1e36;
        pass &= within(got, want, 0.15);
        parts.push(format!("{:.0} nm {got:.3} ({want})", lambda * 1e9));
    }
    Outcome { name: "alpha coefficients", pass, detail: parts.join(", ") }
}

fn fringes() -> Outcome {
    let i = interference_period(720e-9, 1.386);
    let r = reflection_period(850e-9, 1.265);
    Outcome {
        name: "fringe periods",
        pass: within(i, 371e-9, 0.02) && within(r, 336e-9, 0.01),
        detail: format!("interference {:.1} nm (371), reflection {:.1} nm (336)", i * 1e9, r * 1e9),
    }
}

fn slab() -> Outcome {
    let g = SlabGeometry::suspended_silica(300e-9, 0.0, 2e-6);
    let n = slab_neff(&g, 850e-9, Polarization::TE, 0).unwrap();
    Outcome { name: "slab solver", pass: within(n, 1.265, 0.015), detail: format!("n_eff {n:.4} (1.265)") }
}

fn coherence_rule() -> Outcome {
    let pairs = [(1.44, 0.65, 0.48), (0.31, 0.67, 1.0), (0.31, 0.66, 1.03), (0.14, 0.5, 1.56)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (b, r, want) in pairs {
        let tau = coherence_time_from_rates(b, r).unwrap();
        pass &= within(tau, want, 0.05);
        parts.push(format!("{tau:.3} ({want})"));
    }
    Outcome { name: "coherence-time rule", pass, detail: parts.join(", ") }
}

fn end_to_end() -> Outcome {
    let start = Instant::now();
    let reports: Vec<_> = PRESET_NAMES.iter().map(|n| characterize(&load_preset(n).unwrap()).unwrap()).collect();
    let elapsed = start.elapsed().as_secs_f64();
    let (c1, c2, c3, c4) = (&reports[0], &reports[1], &reports[2], &reports[3]);
    let tau4 = c4.coherence_time_s.unwrap_or(f64::INFINITY);
    let checks = [
        ("C1 |U_min|", within(-c1.minimum_energy_uK, 90.7, 0.25), format!("{:.1} uK", -c1.minimum_energy_uK)),
        ("C1 x_min", (c1.minimum_position_nm[0] - 208.0).abs() <= 60.0, format!("{:.1} nm", c1.minimum_position_nm[0])),
        ("C1 f_x", within(c1.frequency_x_kHz, 192.0, 0.25), format!("{:.1} kHz", c1.frequency_x_kHz)),
        ("C1 dU_x/dU_yz", within(c1.depth_ratio_x_yz, 2.0, 0.10), format!("{:.3}", c1.depth_ratio_x_yz)),
        ("C1 gamma", within(c1.aspect_ratio, 30.8, 0.30), format!("{:.1}", c1.aspect_ratio)),
        ("C2 x_min", (c2.minimum_position_nm[0] - 239.0).abs() <= 60.0, format!("{:.1} nm", c2.minimum_position_nm[0])),
        ("C3 f_x", within(c3.frequency_x_kHz, 93.9, 0.25), format!("{:.1} kHz", c3.frequency_x_kHz)),
        ("C4 x_min", (c4.minimum_position_nm[0] - 262.4).abs() <= 60.0, format!("{:.1} nm", c4.minimum_position_nm[0])),
        ("C4 tau", within(tau4, 1.56, 0.20), format!("{tau4:.3} s")),
        ("runtime", elapsed < 60.0, format!("{elapsed:.2} s")),
    ];
    Outcome {
        name: "C1-C4 end-to-end",
        pass: checks.iter().all(|c| c.1),
        detail: checks
            .iter()
            .map(|(n, ok, v)| format!("{n} {v}{}", if *ok { "" } else { " [out]" }))
            .collect::<Vec<_>>()
            .join("; "),
    }
}

fn wkb() -> Outcome {
    let m_rb = AtomSpecies::rubidium87().mass;
    let (v0, width, e) = (2e-29, 300e-9, 0.5e-29);
    let square = |s: f64| if (0.0..=width).contains(&s) { v0 } else { 0.0 };
    let t = tunnelling_probability_fn(square, (-100e-9, 400e-9), e, m_rb, 5001).unwrap();
    let exact = (-2.0 * width * (2.0 * m_rb * (v0 - e)).sqrt() / HBAR).exp();
    let square_ok = within(t.probability.ln(), exact.ln(), 1e-3);

    let rate = |name: &str| {
        let r = characterize(&load_preset(name).unwrap()).unwrap();
        (r.diagonal_l.tunnelling_rate_per_s.unwrap_or(f64::INFINITY), r.temperature_uK)
    };
    let bounds = [("C1", 3e-7, 4.0), ("C2", 1e-2, 1.0), ("C3", 1e-4, 0.5)];
    let mut pass = square_ok;
    let mut parts = vec![format!("square barrier ln T rel. err {:.1e}", (t.probability.ln() / exact.ln() - 1.0).abs())];
    for (name, bound, temp) in bounds {
        let (r, t_uk) = rate(name);
        let ok = r < bound && (t_uk - temp).abs() < 1e-12;
        pass &= ok;
        parts.push(format!("{name} {r:.2e}/s at {t_uk} uK (< {bound:e})"));
    }
    Outcome { name: "WKB", pass, detail: parts.join("; ") }
}

fn properties() -> Outcome {
    let mut failures = Vec::new();
    for name in PRESET_NAMES {
        let m = TrapModel::new(load_preset(name).unwrap()).unwrap();
        // gradient
        for i in 0..=50 {
            let x = 100e-9 + i as f64 * 10e-9;
            let (y, z) = (0.3e-6 * (i as f64 * 0.7).sin(), -0.4e-6 * (i as f64 * 0.3).cos());
            let h = 1e-11;
            let fd = (m.potential_at(x + h, y, z).unwrap() - m.potential_at(x - h, y, z).unwrap()) / (2.0 * h);
            let an = m.potential_dx(x, y, z).unwrap();
            let scale = an.abs().max(m.potential_at(x, y, z).unwrap().abs() / 100e-9);
            if (fd - an).abs() > 1e-6 * scale {
                failures.push(format!("{name} gradient at {:.0} nm", x * 1e9));
            }
        }
        // y <-> z symmetry of the potential and the minima map
        for i in 0..50 {
            let (y, z) = (-2e-6 + i as f64 * 0.083e-6, 1.5e-6 - i as f64 * 0.061e-6);
            if m.energy([220e-9, y, z]) != m.energy([220e-9, z, y]) {
                failures.push(format!("{name} y/z symmetry"));
            }
        }
        let map = minima_map(&m, 1.5e-6, 11).unwrap();
        if (0..11).any(|a| (0..11).any(|b| map.at(a, b) != map.at(b, a))) {
            failures.push(format!("{name} minima map symmetry"));
        }
        // refined minimum against brute force
        let min = find_minimum(&m).unwrap();
        let mut brute = f64::INFINITY;
        for i in -5..=5 {
            for j in -5..=5 {
                for k in -5..=5 {
                    let p = [min.position[0] + i as f64 * 2e-9, min.position[1] + j as f64 * 20e-9, min.position[2] + k as f64 * 20e-9];
                    brute = brute.min(m.energy(p));
                }
            }
        }
        if min.energy > brute {
            failures.push(format!("{name} refined minimum above grid"));
        }
        // gravity direction
        let mut flipped = m.config.clone();
        flipped.gravity_sign = -flipped.gravity_sign;
        let other = find_minimum(&TrapModel::new(flipped).unwrap()).unwrap();
        if (other.position[0] - min.position[0]).abs() >= 0.01 * min.position[0] {
            failures.push(format!("{name} gravity shift"));
        }
        // tunnelling monotone in energy
        let paths = AxisPaths::walk(&m, &min, ScanDirection::L);
        if let Ok(mut scan) = paths.escape_scan(&m, &min) {
            let top = paths.barrier(min.energy);
            let mut last = 0.0;
            for s in 1..10 {
                scan.energy = min.energy + top * s as f64 / 10.0;
                let p = tunnelling_probability(&scan).unwrap().probability;
                if p <= last {
                    failures.push(format!("{name} tunnelling not monotone"));
                }
                last = p;
            }
        }
    }
    // linearity in intensities
    let scaled = |a: f64, b: f64| {
        let mut c = load_preset("C1").unwrap();
        c.scale_intensities(a, b);
        TrapModel::new(c).unwrap()
    };
    let p = [230e-9, 0.4e-6, -0.2e-6];
    let u0 = scaled(0.0, 0.0).energy(p);
    let (ub, ur) = (scaled(1.0, 0.0).energy(p) - u0, scaled(0.0, 1.0).energy(p) - u0);
    let uab = scaled(0.7, 1.9).energy(p) - u0;
    if (uab - (0.7 * ub + 1.9 * ur)).abs() > 1e-12 * (ub.abs() + ur.abs()) {
        failures.push("linearity".into());
    }
    // flat potential without fields and gravity
    let mut flat = load_preset("C1").unwrap();
    flat.scale_intensities(0.0, 0.0);
    flat.gravity_sign = 0;
    let scan = line_scan(&TrapModel::new(flat).unwrap(), [200e-9, 0.0, 0.0], ScanDirection::Y, -3e-6, 3e-6, 61).unwrap();
    if scan.values.iter().any(|&v| v != scan.values[0]) {
        failures.push("flat scan".into());
    }
    Outcome {
        name: "property suite",
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            "gradient, symmetry, linearity, brute-force minimum, gravity, tunnelling monotonicity".into()
        } else {
            failures.join(", ")
        },
    }
}

#[test]
fn acceptance() {
    let outcomes = [rayleigh(), alpha(), fringes(), slab(), coherence_rule(), end_to_end(), wkb(), properties()];
    for o in &outcomes {
        println!("{} {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    let failed: Vec<_> = outcomes.iter().filter(|o| !o.pass).map(|o| o.name).collect();
    assert!(failed.is_empty(), "failed: {failed:?}");
}
