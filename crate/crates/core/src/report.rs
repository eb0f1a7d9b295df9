//! Full characterization of a configuration, Table-2-style summaries and
//! parameter sweeps.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::ConfigFile;
use crate::constants::joule_to_microkelvin as uk;
use crate::error::{Result, TrapError};
use crate::grid::format_significant;
use crate::potential::{ScanDirection, TrapConfig, TrapModel};
use crate::scattering::scattering_at;
use crate::trap_analysis::{depths_from_paths, find_minimum, harmonic_fit, model_frequencies, to_hz, AxisPaths};
use crate::wkb::{reported_rate, tunnelling_probability, tunnelling_rate};

/// Trap behaviour along one diagonal.
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalReport {
    pub depth_uK: f64,
    /// Harmonic fit to the minima profile; `None` if the fit failed.
    pub mean_frequency_kHz: Option<f64>,
    pub tunnelling_probability: Option<f64>,
    pub tunnelling_action_J_s: Option<f64>,
    /// Raw rate, 1/s.
    pub tunnelling_rate_per_s: Option<f64>,
    /// The atom energy is above the barrier.
    pub no_barrier: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapReport {
    pub name: String,
    pub config_hash: String,
    pub rib_width_um: f64,
    pub blue_wavelength_nm: f64,
    pub red_wavelength_nm: f64,
    pub blue_intensity_W_per_m2: f64,
    pub red_intensity_W_per_m2: f64,
    pub n_eff_blue: f64,
    pub n_eff_red: f64,
    /// (x, y, z)
    pub minimum_position_nm: [f64; 3],
    pub minimum_energy_J: f64,
    pub minimum_energy_uK: f64,
    pub depth_x_uK: f64,
    pub depth_yz_uK: f64,
    pub depth_ratio_x_yz: f64,
    pub frequency_x_kHz: f64,
    pub frequency_y_kHz: f64,
    pub frequency_z_kHz: f64,
    pub aspect_ratio: f64,
    pub temperature_uK: f64,
    pub diagonal_l: DiagonalReport,
    pub diagonal_t: DiagonalReport,
    pub scattering_blue_per_s: f64,
    pub scattering_red_per_s: f64,
    pub coherence_time_s: Option<f64>,
}

impl TrapReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Two-column human-readable summary.
    pub fn to_text(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4e}"));
        let mut out = String::new();
        let mut row = |k: &str, v: String| out.push_str(&format!("{k:<28}{v}\n"));
        row("configuration", format!("{} ({})", self.name, self.config_hash));
        row("minimum (x, y, z) nm", format!(
            "{:.1}, {:.1}, {:.1}",
            self.minimum_position_nm[0], self.minimum_position_nm[1], self.minimum_position_nm[2]
        ));
        row("U_min uK", format!("{:.2}", self.minimum_energy_uK));
        row("depth x / yz uK", format!("{:.2} / {:.2}", self.depth_x_uK, self.depth_yz_uK));
        row("depth l / t uK", format!("{:.2} / {:.2}", self.diagonal_l.depth_uK, self.diagonal_t.depth_uK));
        row("omega/2pi x, y, z kHz", format!(
            "{:.1}, {:.2}, {:.2}",
            self.frequency_x_kHz, self.frequency_y_kHz, self.frequency_z_kHz
        ));
        row("aspect ratio", format!("{:.1}", self.aspect_ratio));
        row("tunnelling l, t 1/s", format!(
            "{}, {} at {} uK",
            opt(self.diagonal_l.tunnelling_rate_per_s),
            opt(self.diagonal_t.tunnelling_rate_per_s),
            self.temperature_uK
        ));
        row("scattering b, r 1/s", format!("{:.3}, {:.3}", self.scattering_blue_per_s, self.scattering_red_per_s));
        row("coherence time s", opt(self.coherence_time_s));
        out
    }
}

fn diagonal(model: &TrapModel, minimum: &crate::trap_analysis::TrapMinimum, paths: &AxisPaths) -> DiagonalReport {
    let depth = uk(paths.barrier(minimum.energy));
    let mut note = None;
    let fit = paths.profile(model).and_then(|p| harmonic_fit(&p, model.mass(), None));
    let omega = match fit {
        Ok(f) => Some(f.omega),
        Err(e) => {
            note = Some(e.to_string());
            None
        }
    };
    let tunnel = paths.escape_scan(model, minimum).and_then(|scan| tunnelling_probability(&scan));
    let (probability, action, rate, no_barrier) = match tunnel {
        Ok(t) => {
            let rate = omega.map(|w| tunnelling_rate(t.probability, w));
            (Some(t.probability), Some(t.action), rate, t.no_barrier)
        }
        Err(e) => {
            note.get_or_insert(e.to_string());
            (None, None, None, false)
        }
    };
    DiagonalReport {
        depth_uK: depth,
        mean_frequency_kHz: omega.map(|w| to_hz(w) * 1e-3),
        tunnelling_probability: probability,
        tunnelling_action_J_s: action,
        tunnelling_rate_per_s: rate,
        no_barrier,
        note,
    }
}

/// Runs the whole pipeline: minimum, frequencies, depths, diagonal fits,
/// tunnelling and scattering.
pub fn characterize(config: &TrapConfig) -> Result<TrapReport> {
    let model = TrapModel::new(config.clone())?;
    let minimum = find_minimum(&model)?;
    let omega = model_frequencies(&model, &minimum)?;
    let walk = |d| AxisPaths::walk(&model, &minimum, d);
    let (py, pz, pl, pt) = (walk(ScanDirection::Y), walk(ScanDirection::Z), walk(ScanDirection::L), walk(ScanDirection::T));
    let depths = depths_from_paths(&model, &minimum, [&py, &pz, &pl, &pt]);
    let scattering = scattering_at(&model, minimum.position)?;
    let khz = |w: f64| to_hz(w) * 1e-3;
    let p = minimum.position;
    Ok(TrapReport {
        name: config.name.clone(),
        config_hash: config.hash.clone(),
        rib_width_um: config.geometry.rib_width * 1e6,
        blue_wavelength_nm: config.blue.wavelength() * 1e9,
        red_wavelength_nm: config.red.wavelength() * 1e9,
        blue_intensity_W_per_m2: config.blue.mode_i.peak_intensity,
        red_intensity_W_per_m2: config.red.mode_i.peak_intensity,
        n_eff_blue: config.blue.mode_i.n_eff_cross,
        n_eff_red: config.red.mode_i.n_eff_cross,
        minimum_position_nm: [p[0] * 1e9, p[1] * 1e9, p[2] * 1e9],
        minimum_energy_J: minimum.energy,
        minimum_energy_uK: uk(minimum.energy),
        depth_x_uK: uk(depths.x),
        depth_yz_uK: uk(depths.yz),
        depth_ratio_x_yz: depths.x / depths.yz,
        frequency_x_kHz: khz(omega[0]),
        frequency_y_kHz: khz(omega[1]),
        frequency_z_kHz: khz(omega[2]),
        aspect_ratio: omega[0] / omega[1],
        temperature_uK: config.analysis.temperature * 1e6,
        diagonal_l: diagonal(&model, &minimum, &pl),
        diagonal_t: diagonal(&model, &minimum, &pt),
        scattering_blue_per_s: scattering.blue_rate,
        scattering_red_per_s: scattering.red_rate,
        coherence_time_s: scattering.coherence_time,
    })
}

const TABLE_ROWS: [&str; 10] = [
    "Configuration",
    "w_rib (um)",
    "lambda_b; lambda_r (nm)",
    "I_b; I_r (10^9 W/m^2)",
    "dU_x/k_B (uK)",
    "dU_y,z/k_B (uK)",
    "dU_l/k_B (uK)",
    "Gamma_b^scat (1/s)",
    "Gamma_r^scat (1/s)",
    "Gamma_l^tun (1/s)",
];

fn table_cells(r: &TrapReport) -> [String; 10] {
    let g = |v: f64| format_significant(v, 3);
    let rate = r
        .diagonal_l
        .tunnelling_rate_per_s
        .map_or("n/a".to_string(), |v| g(reported_rate(v)));
    [
        r.name.clone(),
        g(r.rib_width_um),
        format!("{}; {}", g(r.blue_wavelength_nm), g(r.red_wavelength_nm)),
        format!("{}; {}", g(r.blue_intensity_W_per_m2 * 1e-9), g(r.red_intensity_W_per_m2 * 1e-9)),
        g(r.depth_x_uK),
        g(r.depth_yz_uK),
        g(r.diagonal_l.depth_uK),
        g(r.scattering_blue_per_s),
        g(r.scattering_red_per_s),
        rate,
    ]
}

/// Markdown table with one column per report.
pub fn table2_markdown(reports: &[TrapReport]) -> String {
    let cells: Vec<[String; 10]> = reports.iter().map(table_cells).collect();
    let mut out = String::new();
    for (i, label) in TABLE_ROWS.iter().enumerate() {
        out.push('|');
        out.push_str(&format!(" {label} |"));
        for c in &cells {
            out.push_str(&format!(" {} |", c[i]));
        }
        out.push('\n');
        if i == 0 {
            out.push_str(&format!("|---|{}\n", "---|".repeat(cells.len())));
        }
    }
    out
}

/// Same table as CSV; cells holding a ';' are quoted.
pub fn table2_csv(reports: &[TrapReport]) -> String {
    let cells: Vec<[String; 10]> = reports.iter().map(table_cells).collect();
    let quote = |s: &str| if s.contains([',', ';', '"']) { format!("\"{}\"", s.replace('"', "\"\"")) } else { s.to_string() };
    let mut out = String::new();
    for (i, label) in TABLE_ROWS.iter().enumerate() {
        out.push_str(&quote(label));
        for c in &cells {
            out.push(',');
            out.push_str(&quote(&c[i]));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Multiplies both peak intensities (and quoted powers).
    IntensityScale,
    BlueScale,
    RedScale,
    BlueWidth,
    RedWidth,
    Temperature,
    RibWidth,
    GravitySign,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::IntensityScale => "intensity_scale",
            SweepParameter::BlueScale => "blue_scale",
            SweepParameter::RedScale => "red_scale",
            SweepParameter::BlueWidth => "blue_width_um",
            SweepParameter::RedWidth => "red_width_um",
            SweepParameter::Temperature => "temperature_uK",
            SweepParameter::RibWidth => "rib_width_um",
            SweepParameter::GravitySign => "gravity_sign",
        }
    }

    fn apply(self, file: &mut ConfigFile, v: f64) {
        let scale = |m: &mut crate::config::ModeFile, f: f64| {
            m.peak_intensity_W_per_m2 = m.peak_intensity_W_per_m2.map(|i| i * f);
            m.power_mW = m.power_mW.map(|p| p * f);
        };
        match self {
            SweepParameter::IntensityScale => {
                scale(&mut file.blue, v);
                scale(&mut file.red, v);
            }
            SweepParameter::BlueScale => scale(&mut file.blue, v),
            SweepParameter::RedScale => scale(&mut file.red, v),
            SweepParameter::BlueWidth => file.blue.lateral_width_um = v,
            SweepParameter::RedWidth => file.red.lateral_width_um = v,
            SweepParameter::Temperature => file.analysis.temperature_uK = Some(v),
            SweepParameter::RibWidth => file.geometry.rib_width_um = v,
            SweepParameter::GravitySign => file.gravity_sign = v as i8,
        }
    }
}

impl FromStr for SweepParameter {
    type Err = TrapError;
    fn from_str(s: &str) -> Result<Self> {
        use SweepParameter::*;
        [IntensityScale, BlueScale, RedScale, BlueWidth, RedWidth, Temperature, RibWidth, GravitySign]
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| TrapError::invalid(format!("unknown sweep parameter `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

impl FromStr for SweepAxis {
    type Err = TrapError;
    /// `name=a,b,c` or `name=start:stop:count`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, spec) = s
            .split_once('=')
            .ok_or_else(|| TrapError::invalid(format!("sweep axis `{s}` needs name=values")))?;
        let parameter = name.trim().parse()?;
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| TrapError::invalid(format!("bad number `{t}` in sweep axis `{s}`")))
        };
        let values = if let [a, b, n] = spec.split(':').collect::<Vec<_>>()[..] {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n.trim().parse().map_err(|_| TrapError::invalid(format!("bad count in `{s}`")))?;
            match n {
                0 => Vec::new(),
                1 => vec![a],
                _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
            }
        } else {
            spec.split(',').map(num).collect::<Result<Vec<_>>>()?
        };
        let axis = SweepAxis { parameter, values };
        axis.validate()?;
        Ok(axis)
    }
}

impl SweepAxis {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(TrapError::invalid(format!("sweep axis {} has no values", self.parameter.name())));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(TrapError::invalid(format!("sweep axis {} has non-finite values", self.parameter.name())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub values: Vec<f64>,
    pub outcome: std::result::Result<TrapReport, String>,
}

/// Characterizes every point of the Cartesian product of `axes`. Failures
/// are kept per row.
pub fn sweep(template: &ConfigFile, axes: &[SweepAxis]) -> Result<Vec<SweepRow>> {
    for a in axes {
        a.validate()?;
    }
    let total: usize = axes.iter().map(|a| a.values.len()).product();
    let mut rows = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut values = vec![0.0; axes.len()];
        for (k, axis) in axes.iter().enumerate().rev() {
            values[k] = axis.values[rem % axis.values.len()];
            rem /= axis.values.len();
        }
        let mut file = template.clone();
        for (axis, &v) in axes.iter().zip(&values) {
            axis.parameter.apply(&mut file, v);
        }
        let outcome = file.build().and_then(|c| characterize(&c)).map_err(|e| e.to_string());
        rows.push(SweepRow { values, outcome });
    }
    Ok(rows)
}

pub fn sweep_csv(axes: &[SweepAxis], rows: &[SweepRow]) -> String {
    let g = |v: f64| format_significant(v, 9);
    let og = |v: Option<f64>| v.map_or(String::new(), g);
    let mut out = String::new();
    for a in axes {
        out.push_str(a.parameter.name());
        out.push(',');
    }
    out.push_str("status,config_hash,U_min_uK,x_min_nm,depth_x_uK,depth_yz_uK,depth_l_uK,depth_t_uK,f_x_kHz,f_y_kHz,aspect_ratio,rate_l_per_s,scat_b_per_s,scat_r_per_s,coherence_s\n");
    for row in rows {
        for v in &row.values {
            out.push_str(&g(*v));
            out.push(',');
        }
        match &row.outcome {
            Ok(r) => out.push_str(&format!(
                "ok,{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.config_hash,
                g(r.minimum_energy_uK),
                g(r.minimum_position_nm[0]),
                g(r.depth_x_uK),
                g(r.depth_yz_uK),
                g(r.diagonal_l.depth_uK),
                g(r.diagonal_t.depth_uK),
                g(r.frequency_x_kHz),
                g(r.frequency_y_kHz),
                g(r.aspect_ratio),
                og(r.diagonal_l.tunnelling_rate_per_s),
                g(r.scattering_blue_per_s),
                g(r.scattering_red_per_s),
                og(r.coherence_time_s),
            )),
            Err(e) => out.push_str(&format!("\"error: {}\"{}\n", e.replace('"', "'"), ",".repeat(14))),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_axis_parsing() {
        let a: SweepAxis = "intensity_scale=0.5:1.0:3".parse().unwrap();
        assert_eq!(a.values, vec![0.5, 0.75, 1.0]);
        let b: SweepAxis = "red_width_um=1.5,1.6".parse().unwrap();
        assert_eq!(b.parameter, SweepParameter::RedWidth);
        assert!("intensity_scale=1,nan".parse::<SweepAxis>().is_err());
        assert!("colour=1".parse::<SweepAxis>().is_err());
        assert!("intensity_scale=0:1:0".parse::<SweepAxis>().is_err());
    }
}
