//! Fits the two lateral mode widths of a preset so that the lateral trap
//! frequency and the longitudinal-diagonal depth hit given targets.
//!
//! cargo run --release --example calibrate -- C3 2.4 1.06

use cwewt::constants::joule_to_microkelvin;
use cwewt::trap_analysis::{find_minimum, model_frequencies, to_hz, AxisPaths};
use cwewt::{ConfigFile, ScanDirection, TrapModel};

fn evaluate(file: &ConfigFile, wb: f64, wr: f64) -> Option<[f64; 2]> {
    let mut f = file.clone();
    f.blue.lateral_width_um = wb;
    f.red.lateral_width_um = wr;
    let model = TrapModel::new(f.build().ok()?).ok()?;
    let min = find_minimum(&model).ok()?;
    let w = model_frequencies(&model, &min).ok()?;
    let dl = AxisPaths::walk(&model, &min, ScanDirection::L).barrier(min.energy);
    Some([to_hz(w[1]) * 1e-3, joule_to_microkelvin(dl)])
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [name, fy, dl] = &args[..] else {
        eprintln!("usage: calibrate PRESET TARGET_FY_KHZ TARGET_DUL_UK");
        std::process::exit(2);
    };
    let target = [fy.parse::<f64>().unwrap(), dl.parse::<f64>().unwrap()];
    let file = ConfigFile::preset(name).expect("preset");
    let mut p = [file.blue.lateral_width_um, file.red.lateral_width_um];
    for iter in 0..30 {
        let v = evaluate(&file, p[0], p[1]).expect("trap at current widths");
        let r = [v[0] - target[0], v[1] - target[1]];
        println!("{iter:2} w_b={:.5} w_r={:.5} f_y={:.4} dU_l={:.4}", p[0], p[1], v[0], v[1]);
        if r[0].abs() < 1e-3 * target[0] && r[1].abs() < 1e-3 * target[1] {
            break;
        }
        // forward-difference Jacobian
        let h = 1e-3;
        let vb = evaluate(&file, p[0] + h, p[1]).expect("trap");
        let vr = evaluate(&file, p[0], p[1] + h).expect("trap");
        let j = [[(vb[0] - v[0]) / h, (vr[0] - v[0]) / h], [(vb[1] - v[1]) / h, (vr[1] - v[1]) / h]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let d = [(j[1][1] * r[0] - j[0][1] * r[1]) / det, (-j[1][0] * r[0] + j[0][0] * r[1]) / det];
        let scale = (0.1 / d[0].abs().max(d[1].abs())).min(1.0);
        p = [p[0] - scale * d[0], p[1] - scale * d[1]];
    }
}
