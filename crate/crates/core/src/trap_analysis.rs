//! Trap characterization: the 3D minimum, harmonic frequencies, escape
//! barriers along the axes and diagonals, per-column minima maps, and
//! harmonic fits to sampled minima profiles.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::constants::BOLTZMANN;
use crate::error::{Result, TrapError};
use crate::grid::{Axis, PotentialGrid};
use crate::parallel::{map_indexed, Execution};
use crate::potential::{Column, EnergySurface, ScanDirection, TrapModel};
use crate::wkb::BarrierScan;

/// Numerical knobs of the analysis. Lengths in m, temperature in K.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSettings {
    pub coarse_x_step: f64,
    pub x_range: (f64, f64),
    pub coarse_lateral_step: f64,
    /// Half-width of the coarse lateral search; `None` uses the cross region.
    pub lateral_half_extent: Option<f64>,
    pub position_tolerance: f64,
    pub fd_step_x: f64,
    pub fd_step_lateral: f64,
    pub column_x_range: (f64, f64),
    pub column_x_step: f64,
    pub path_extent: f64,
    pub path_step: f64,
    /// Atom temperature for the tunnelling estimate.
    pub temperature: f64,
    pub execution: Execution,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        AnalysisSettings {
            coarse_x_step: 10e-9,
            x_range: (50e-9, 600e-9),
            coarse_lateral_step: 100e-9,
            lateral_half_extent: None,
            position_tolerance: 0.1e-9,
            fd_step_x: 1e-9,
            fd_step_lateral: 20e-9,
            column_x_range: (50e-9, 800e-9),
            column_x_step: 1e-9,
            path_extent: 6e-6,
            path_step: 20e-9,
            temperature: 1e-6,
            execution: Execution::default(),
        }
    }
}

impl AnalysisSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("analysis.coarse_x_step_nm", self.coarse_x_step),
            ("analysis.coarse_lateral_step_nm", self.coarse_lateral_step),
            ("analysis.position_tolerance_nm", self.position_tolerance),
            ("analysis.fd_step_x_nm", self.fd_step_x),
            ("analysis.fd_step_lateral_nm", self.fd_step_lateral),
            ("analysis.column_x_step_nm", self.column_x_step),
            ("analysis.path_extent_um", self.path_extent),
            ("analysis.path_step_nm", self.path_step),
        ];
        for (field, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(TrapError::config_field(field, "must be positive"));
            }
        }
        for (field, (lo, hi)) in [
            ("analysis.x_range_nm", self.x_range),
            ("analysis.column_x_range_nm", self.column_x_range),
        ] {
            if !(lo > 0.0 && hi > lo) {
                return Err(TrapError::config_field(field, "need 0 < start < end"));
            }
        }
        if !(self.temperature >= 0.0) {
            return Err(TrapError::config_field("analysis.temperature_uK", "must be non-negative"));
        }
        Ok(())
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `f` on `[a, b]`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapMinimum {
    /// (x, y, z), m
    pub position: [f64; 3],
    /// J
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnMinimum {
    pub x: f64,
    pub energy: f64,
}

/// Interior local minimum of a column on `[lo, hi]`. With `near`, the
/// minimum closest to that height is taken, otherwise the deepest one.
pub fn column_minimum(
    column: &Column,
    lo: f64,
    hi: f64,
    step: f64,
    near: Option<f64>,
) -> Option<ColumnMinimum> {
    let n = ((hi - lo) / step).round() as usize + 1;
    if n < 3 {
        return None;
    }
    let mut best: Option<(usize, f64)> = None;
    let mut prev2 = column.energy(lo);
    let mut prev1 = column.energy(lo + step);
    for i in 2..n {
        let cur = column.energy(lo + i as f64 * step);
        if prev1 < prev2 && prev1 <= cur {
            let idx = i - 1;
            let better = match (best, near) {
                (None, _) => true,
                (Some((bi, _)), Some(x0)) => {
                    let xi = lo + idx as f64 * step;
                    let xb = lo + bi as f64 * step;
                    (xi - x0).abs() < (xb - x0).abs()
                }
                (Some((_, bv)), None) => prev1 < bv,
            };
            if better {
                best = Some((idx, prev1));
            }
        }
        prev2 = prev1;
        prev1 = cur;
    }
    let (idx, _) = best?;
    let centre = lo + idx as f64 * step;
    let (x, energy) = golden_section(|x| column.energy(x), centre - step, centre + step, step * 1e-6);
    Some(ColumnMinimum { x, energy })
}

fn lateral_grid(half: f64, step: f64) -> Vec<f64> {
    let n = (half / step).round() as i64;
    (-n..=n).map(|i| i as f64 * step).collect()
}

/// Global minimum: coarse lattice search over the cross region followed by
/// coordinate-wise golden-section refinement.
pub fn find_minimum(model: &TrapModel) -> Result<TrapMinimum> {
    let s = &model.config.analysis;
    let half = s.lateral_half_extent.unwrap_or(0.5 * model.config.geometry.rib_width);
    let lateral = lateral_grid(half, s.coarse_lateral_step);
    let nx = ((s.x_range.1 - s.x_range.0) / s.coarse_x_step).round() as usize + 1;
    let xs: Vec<f64> = (0..nx).map(|i| s.x_range.0 + i as f64 * s.coarse_x_step).collect();

    let nl = lateral.len();
    let per_column = map_indexed(nl * nl, s.execution, |k| {
        let (y, z) = (lateral[k / nl], lateral[k % nl]);
        let column = model.column(y, z);
        let values: Vec<f64> = xs.iter().map(|&x| column.energy(x)).collect();
        let mut best: Option<(f64, f64)> = None;
        for i in 1..nx.saturating_sub(1) {
            if values[i] < values[i - 1] && values[i] <= values[i + 1]
                && best.is_none_or(|(_, b)| values[i] < b) {
                    best = Some((xs[i], values[i]));
                }
        }
        best.map(|(x, u)| (u, [x, y, z]))
    });

    // a candidate column must be deeper than its eight lateral neighbours;
    // an escaped neighbour counts as deeper
    let deeper = |iy: usize, iz: usize| -> bool {
        let Some((u, _)) = per_column[iy * nl + iz] else { return false };
        if iy == 0 || iz == 0 || iy + 1 == nl || iz + 1 == nl {
            return false;
        }
        for jy in iy - 1..=iy + 1 {
            for jz in iz - 1..=iz + 1 {
                if (jy, jz) == (iy, iz) {
                    continue;
                }
                match per_column[jy * nl + jz] {
                    Some((v, _)) if v >= u => {}
                    _ => return false,
                }
            }
        }
        true
    };
    // lowest energy, then smallest x, then smallest |y| + |z|
    let (energy, start) = (0..nl * nl)
        .filter(|&k| deeper(k / nl, k % nl))
        .filter_map(|k| per_column[k])
        .min_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then(a.1[0].total_cmp(&b.1[0]))
                .then((a.1[1].abs() + a.1[2].abs()).total_cmp(&(b.1[1].abs() + b.1[2].abs())))
        })
        .ok_or_else(|| TrapError::NoTrap("no local minimum in the search box".into()))?;
    if energy >= 0.0 {
        return Err(TrapError::NoTrap(format!("lowest interior minimum is not bound ({energy:e} J)")));
    }

    let bounds = SearchBox { x: s.x_range, lateral: half + s.coarse_lateral_step };
    let brackets = [s.coarse_x_step, s.coarse_lateral_step, s.coarse_lateral_step];
    let refined = refine_minimum(model, &bounds, start, brackets, s.position_tolerance);
    let energy = model.energy(refined);
    let steps = [s.fd_step_x, s.fd_step_lateral, s.fd_step_lateral];
    for (k, name) in ["x", "y", "z"].into_iter().enumerate() {
        let mut plus = refined;
        let mut minus = refined;
        plus[k] += steps[k];
        minus[k] -= steps[k];
        if !(model.energy(plus) > energy && model.energy(minus) > energy) {
            return Err(TrapError::NoTrap(format!(
                "stationary point at ({:.1}, {:.1}, {:.1}) nm is not a minimum along {name}",
                refined[0] * 1e9,
                refined[1] * 1e9,
                refined[2] * 1e9
            )));
        }
    }
    if energy >= 0.0 {
        return Err(TrapError::NoTrap("refined minimum is not bound".into()));
    }
    Ok(TrapMinimum { position: refined, energy })
}

/// Line minimization of `model` from `p` along `dir`, starting from a
/// bracket of half-width `half` that is widened while the optimum sits on
/// its edge.
fn line_minimum(model: &TrapModel, bounds: &SearchBox, p: [f64; 3], dir: [f64; 3], mut half: f64, tol: f64) -> [f64; 3] {
    let at = |t: f64| [p[0] + t * dir[0], p[1] + t * dir[1], p[2] + t * dir[2]];
    let energy = |t: f64| {
        let q = at(t);
        if bounds.contains(q) {
            model.energy(q)
        } else {
            f64::INFINITY
        }
    };
    let mut centre = 0.0;
    for _ in 0..12 {
        let (lo, hi) = (centre - half, centre + half);
        let (t, _) = golden_section(energy, lo, hi, tol);
        let at_edge = (t - lo) < 10.0 * tol || (hi - t) < 10.0 * tol;
        centre = t;
        if !at_edge {
            break;
        }
        half *= 2.0;
    }
    if energy(centre) <= energy(0.0) {
        at(centre)
    } else {
        p
    }
}

/// Region the refinement may explore: the coarse search box. Keeps line
/// searches away from the surface singularity.
struct SearchBox {
    x: (f64, f64),
    lateral: f64,
}

impl SearchBox {
    fn contains(&self, q: [f64; 3]) -> bool {
        q[0] >= self.x.0 && q[0] <= self.x.1 && q[1].abs() <= self.lateral && q[2].abs() <= self.lateral
    }
}

/// Direction-set descent: x, y, z, both diagonals, and each sweep's net
/// displacement (which follows curved valleys).
fn refine_minimum(model: &TrapModel, bounds: &SearchBox, start: [f64; 3], brackets: [f64; 3], tol: f64) -> [f64; 3] {
    let d = std::f64::consts::FRAC_1_SQRT_2;
    let fixed: [([f64; 3], f64); 5] = [
        ([1.0, 0.0, 0.0], brackets[0]),
        ([0.0, 1.0, 0.0], brackets[1]),
        ([0.0, 0.0, 1.0], brackets[2]),
        ([0.0, d, d], brackets[1]),
        ([0.0, d, -d], brackets[1]),
    ];
    let inner = tol * 1e-2;
    let mut p = start;
    for _ in 0..500 {
        let before = p;
        for &(dir, half) in &fixed {
            p = line_minimum(model, bounds, p, dir, half, inner);
        }
        let disp = [p[0] - before[0], p[1] - before[1], p[2] - before[2]];
        let norm = (disp[0] * disp[0] + disp[1] * disp[1] + disp[2] * disp[2]).sqrt();
        if norm < tol * 1e-1 {
            break;
        }
        let unit = [disp[0] / norm, disp[1] / norm, disp[2] / norm];
        p = line_minimum(model, bounds, p, unit, 2.0 * norm, inner);
    }
    p
}

/// Curvature by Richardson-extrapolated central second differences.
fn curvature<S: EnergySurface + ?Sized>(surface: &S, p: [f64; 3], axis: usize, h: f64) -> f64 {
    let second = |h: f64| {
        let mut a = p;
        let mut b = p;
        a[axis] += h;
        b[axis] -= h;
        (surface.energy(a) - 2.0 * surface.energy(p) + surface.energy(b)) / (h * h)
    };
    (4.0 * second(0.5 * h) - second(h)) / 3.0
}

/// Angular vibration frequencies (rad/s) along x, y, z at `position`.
pub fn vibrational_frequencies<S: EnergySurface + ?Sized>(
    surface: &S,
    position: [f64; 3],
    steps: [f64; 3],
) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for (k, axis) in ["x", "y", "z"].into_iter().enumerate() {
        let k_spring = curvature(surface, position, k, steps[k]);
        if !(k_spring > 0.0) {
            return Err(TrapError::NotAMinimum { axis, curvature: k_spring });
        }
        out[k] = (k_spring / surface.mass()).sqrt();
    }
    Ok(out)
}

pub fn model_frequencies(model: &TrapModel, minimum: &TrapMinimum) -> Result<[f64; 3]> {
    let s = &model.config.analysis;
    vibrational_frequencies(model, minimum.position, [s.fd_step_x, s.fd_step_lateral, s.fd_step_lateral])
}

/// Point where a minima path stops: the column minimum merges with the
/// barrier towards the surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapePoint {
    pub s: f64,
    pub x: f64,
    pub energy: f64,
}

/// Minima followed outward from the trap along one half-axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSide {
    pub s: Vec<f64>,
    pub x: Vec<f64>,
    pub energy: Vec<f64>,
    pub escape: Option<EscapePoint>,
}

impl PathSide {
    /// Highest energy met before escaping or reaching the end of the path.
    pub fn barrier_top(&self) -> f64 {
        let top = self.energy.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.escape.map_or(top, |e| top.max(e.energy))
    }
}

fn column_at(model: &TrapModel, minimum: &TrapMinimum, direction: ScanDirection, s: f64) -> Column {
    let (dy, dz) = direction.lateral(s);
    model.column(minimum.position[1] + dy, minimum.position[2] + dz)
}

/// Follows the per-column minimum from the trap centre along `sign * direction`.
pub fn walk_minima(model: &TrapModel, minimum: &TrapMinimum, direction: ScanDirection, sign: f64) -> PathSide {
    let st = &model.config.analysis;
    let (lo, hi) = st.column_x_range;
    let find = |s: f64, near: f64| {
        column_minimum(&column_at(model, minimum, direction, sign * s), lo, hi, st.column_x_step, Some(near))
    };
    let n = (st.path_extent / st.path_step).round() as usize;
    let mut side = PathSide { s: vec![0.0], x: vec![minimum.position[0]], energy: vec![minimum.energy], escape: None };
    let mut last_x = minimum.position[0];
    for i in 1..=n {
        let s = i as f64 * st.path_step;
        match find(s, last_x) {
            Some(m) => {
                side.s.push(sign * s);
                side.x.push(m.x);
                side.energy.push(m.energy);
                last_x = m.x;
            }
            None => {
                // bisect for the merge point between the last good and this column
                let mut good = (s - st.path_step, ColumnMinimum { x: last_x, energy: *side.energy.last().unwrap() });
                let mut bad = s;
                while bad - good.0 > 1e-9 {
                    let mid = 0.5 * (good.0 + bad);
                    match find(mid, good.1.x) {
                        Some(m) => good = (mid, m),
                        None => bad = mid,
                    }
                }
                side.escape = Some(EscapePoint { s: sign * good.0, x: good.1.x, energy: good.1.energy });
                break;
            }
        }
    }
    side
}

/// Minima paths in both senses of one direction through the trap centre.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisPaths {
    pub direction: ScanDirection,
    pub plus: PathSide,
    pub minus: PathSide,
}

impl AxisPaths {
    pub fn walk(model: &TrapModel, minimum: &TrapMinimum, direction: ScanDirection) -> Self {
        let exec = model.config.analysis.execution;
        let mut sides = map_indexed(2, exec, |k| walk_minima(model, minimum, direction, if k == 0 { 1.0 } else { -1.0 }));
        let minus = sides.pop().expect("two sides");
        let plus = sides.pop().expect("two sides");
        AxisPaths { direction, plus, minus }
    }

    /// Lower of the two barrier tops, measured from `minimum_energy`.
    pub fn barrier(&self, minimum_energy: f64) -> f64 {
        self.plus.barrier_top().min(self.minus.barrier_top()) - minimum_energy
    }

    /// Column minima on a uniform axis, NaN beyond the escape points.
    pub fn profile(&self, model: &TrapModel) -> Result<PotentialGrid> {
        let st = &model.config.analysis;
        let n = (st.path_extent / st.path_step).round() as usize;
        let mut values = vec![f64::NAN; 2 * n + 1];
        for (i, &e) in self.minus.energy.iter().enumerate() {
            values[n - i] = e;
        }
        for (i, &e) in self.plus.energy.iter().enumerate() {
            values[n + i] = e;
        }
        let axis = Axis::new(self.direction.name(), -(n as f64) * st.path_step, st.path_step, 2 * n + 1);
        PotentialGrid::new(vec![axis], values, model.config.hash.clone())
    }

    /// Escape route through the lower of the two barriers: the valley of
    /// column minima out to the merge point, then straight down towards the
    /// surface, resampled on a uniform arc-length axis. The particle energy
    /// is `U_min + k_B T`.
    pub fn escape_scan(&self, model: &TrapModel, minimum: &TrapMinimum) -> Result<BarrierScan> {
        let st = &model.config.analysis;
        let side = [&self.plus, &self.minus]
            .into_iter()
            .filter(|p| p.escape.is_some())
            .min_by(|a, b| a.barrier_top().total_cmp(&b.barrier_top()))
            .ok_or_else(|| TrapError::invalid(format!("no escape along {} within the path extent", self.direction.name())))?;
        let escape = side.escape.expect("filtered on escape");

        // (lateral s, height x, energy)
        let mut points: Vec<(f64, f64, f64)> = side
            .s
            .iter()
            .zip(&side.x)
            .zip(&side.energy)
            .map(|((&s, &x), &u)| (s.abs(), x, u))
            .collect();
        points.push((escape.s.abs(), escape.x, escape.energy));
        let column = column_at(model, minimum, self.direction, escape.s);
        let mut x = escape.x - DESCENT_STEP;
        while x > DESCENT_FLOOR {
            let u = column.energy(x);
            points.push((escape.s.abs(), x, u));
            if u < minimum.energy {
                break;
            }
            x -= DESCENT_STEP;
        }

        let mut arc = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        arc.push(0.0);
        for w in points.windows(2) {
            acc += (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1);
            arc.push(acc);
        }
        let count = (acc / DESCENT_STEP).ceil() as usize + 1;
        let step = acc / (count - 1) as f64;
        let mut values = Vec::with_capacity(count);
        let mut j = 0;
        for i in 0..count {
            let s = (i as f64 * step).min(acc);
            while j + 2 < arc.len() && arc[j + 1] < s {
                j += 1;
            }
            let span = arc[j + 1] - arc[j];
            let f = if span > 0.0 { ((s - arc[j]) / span).clamp(0.0, 1.0) } else { 1.0 };
            values.push(points[j].2 * (1.0 - f) + points[j + 1].2 * f);
        }
        let path = PotentialGrid::new(vec![Axis::new("path", 0.0, step, count)], values, model.config.hash.clone())?;
        let energy = minimum.energy + BOLTZMANN * st.temperature;
        Ok(BarrierScan { path, energy, mass: model.mass() })
    }
}

/// Lowest floor of the surface descent that closes an escape path.
const DESCENT_FLOOR: f64 = 5e-9;
const DESCENT_STEP: f64 = 0.5e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapDepths {
    /// All in J.
    pub x: f64,
    pub yz: f64,
    pub l: f64,
    pub t: f64,
}

/// Depth along x: the bound energy with gravity left out, read where the
/// optical terms have decayed below 1% of the minimum.
pub fn depth_x(model: &TrapModel, minimum: &TrapMinimum) -> f64 {
    let column = model.column(minimum.position[1], minimum.position[2]);
    let mut x = minimum.position[0];
    while column.optical(x).abs() >= 0.01 * minimum.energy.abs() && x < 1e-3 {
        x += 10e-9;
    }
    column.optical(x) + column.surface(x) - minimum.energy
}

/// Escape barriers measured from the trap minimum.
pub fn trap_depths(model: &TrapModel, minimum: &TrapMinimum) -> Result<TrapDepths> {
    if minimum.energy >= 0.0 {
        return Err(TrapError::NoTrap("minimum is not bound".into()));
    }
    let walk = |d| AxisPaths::walk(model, minimum, d);
    Ok(depths_from_paths(model, minimum, [&walk(ScanDirection::Y), &walk(ScanDirection::Z), &walk(ScanDirection::L), &walk(ScanDirection::T)]))
}

/// Depths from paths already walked along y, z, l and t (in that order).
pub fn depths_from_paths(model: &TrapModel, minimum: &TrapMinimum, paths: [&AxisPaths; 4]) -> TrapDepths {
    let e = minimum.energy;
    TrapDepths {
        x: depth_x(model, minimum),
        yz: paths[0].barrier(e).min(paths[1].barrier(e)),
        l: paths[2].barrier(e),
        t: paths[3].barrier(e),
    }
}

/// Column minima sampled on a uniform axis through the trap centre; columns
/// beyond an escape point are NaN.
pub fn minima_profile(model: &TrapModel, minimum: &TrapMinimum, direction: ScanDirection) -> Result<PotentialGrid> {
    AxisPaths::walk(model, minimum, direction).profile(model)
}

/// Per-column minima over the (y, z) plane.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimaMap {
    pub y_axis: Axis,
    pub z_axis: Axis,
    /// Row-major over (y, z); `None` marks an escaped column.
    pub energy: Vec<Option<f64>>,
    pub height: Vec<Option<f64>>,
    pub config_hash: String,
}

#[derive(Serialize, Deserialize)]
struct MinimaMapJson {
    format: String,
    config_hash: String,
    axes: Vec<Axis>,
    #[serde(rename = "u_min_J")]
    energy: Vec<Option<f64>>,
    #[serde(rename = "x_min_m")]
    height: Vec<Option<f64>>,
}

impl MinimaMap {
    pub fn at(&self, iy: usize, iz: usize) -> Option<(f64, f64)> {
        let k = iy * self.z_axis.count + iz;
        Some((self.height[k]?, self.energy[k]?))
    }

    pub fn to_csv_string(&self) -> String {
        use crate::grid::format_significant as f9;
        let mut out = format!("# config_hash={}\ny_um,z_um,U_min_uK,x_min_nm\n", self.config_hash);
        for iy in 0..self.y_axis.count {
            for iz in 0..self.z_axis.count {
                let k = iy * self.z_axis.count + iz;
                let u = self.energy[k].map_or(f64::NAN, crate::constants::joule_to_microkelvin);
                let x = self.height[k].map_or(f64::NAN, |x| x * 1e9);
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    f9(self.y_axis.coordinate(iy) * 1e6, 9),
                    f9(self.z_axis.coordinate(iz) * 1e6, 9),
                    f9(u, 9),
                    f9(x, 9)
                ));
            }
        }
        out
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&MinimaMapJson {
            format: "cwewt-minima-map/1".into(),
            config_hash: self.config_hash.clone(),
            axes: vec![self.y_axis.clone(), self.z_axis.clone()],
            energy: self.energy.clone(),
            height: self.height.clone(),
        })
        .expect("minima map serializes")
    }
}

/// Minimizes every (y, z) column of a square window of half-width `half`.
pub fn minima_map(model: &TrapModel, half: f64, resolution: usize) -> Result<MinimaMap> {
    if resolution == 0 {
        return Err(TrapError::invalid("minima map needs at least one column"));
    }
    let st = &model.config.analysis;
    let y_axis = Axis::spanning("y", -half, half, resolution)?;
    let z_axis = Axis::spanning("z", -half, half, resolution)?;
    let (lo, hi) = st.column_x_range;
    let cells = map_indexed(resolution * resolution, st.execution, |k| {
        let (iy, iz) = (k / resolution, k % resolution);
        let column = model.column(y_axis.coordinate(iy), z_axis.coordinate(iz));
        column_minimum(&column, lo, hi, st.column_x_step, None)
    });
    Ok(MinimaMap {
        energy: cells.iter().map(|c| c.map(|m| m.energy)).collect(),
        height: cells.iter().map(|c| c.map(|m| m.x)).collect(),
        y_axis,
        z_axis,
        config_hash: model.config.hash.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicFit {
    /// rad/s
    pub omega: f64,
    pub centre: f64,
    pub energy: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

/// Least-squares parabola through the samples of a 1D scan lying below
/// `window_energy` around the minimum (default: the lower of the two
/// barrier tops on either side).
pub fn harmonic_fit(scan: &PotentialGrid, mass: f64, window_energy: Option<f64>) -> Result<HarmonicFit> {
    if scan.dims() != 1 {
        return Err(TrapError::FitFailed("scan must be one-dimensional".into()));
    }
    let axis = &scan.axes[0];
    let v = &scan.values;
    let (i0, _) = scan.argmin().ok_or_else(|| TrapError::FitFailed("no finite samples".into()))?;

    let left_top = v[..i0].iter().rev().copied().take_while(|u| u.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    let right_top = v[i0..].iter().copied().take_while(|u| u.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    let cutoff = window_energy.unwrap_or_else(|| match (left_top.is_finite(), right_top.is_finite()) {
        (true, true) => left_top.min(right_top),
        (true, false) => left_top,
        _ => right_top,
    });

    let inside = |u: f64| u.is_finite() && u <= cutoff;
    let mut a = i0;
    while a > 0 && inside(v[a - 1]) {
        a -= 1;
    }
    let mut b = i0;
    while b + 1 < v.len() && inside(v[b + 1]) {
        b += 1;
    }
    let n = b - a + 1;
    if n < 3 {
        return Err(TrapError::FitFailed(format!("only {n} samples inside the window")));
    }

    let s0 = axis.coordinate(i0);
    let s_scale = (axis.coordinate(b) - axis.coordinate(a)).abs().max(f64::MIN_POSITIVE) / 2.0;
    let u_scale = (cutoff - v[i0]).abs().max(v[i0].abs() * 1e-12).max(f64::MIN_POSITIVE);
    let design = DMatrix::from_fn(n, 3, |r, c| ((axis.coordinate(a + r) - s0) / s_scale).powi(c as i32));
    let rhs = DVector::from_fn(n, |r, _| (v[a + r] - v[i0]) / u_scale);
    let coef = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| TrapError::FitFailed(e.to_string()))?;
    let quad = coef[2] * u_scale / (s_scale * s_scale);
    let lin = coef[1] * u_scale / s_scale;
    if !(quad > 0.0) {
        return Err(TrapError::FitFailed(format!("non-positive curvature {quad:e}")));
    }
    let shift = -lin / (2.0 * quad);
    Ok(HarmonicFit {
        omega: (2.0 * quad / mass).sqrt(),
        centre: s0 + shift,
        energy: v[i0] + coef[0] * u_scale - quad * shift * shift,
        window: (axis.coordinate(a), axis.coordinate(b)),
        samples: n,
    })
}

/// Oscillation frequency in Hz from an angular frequency.
pub fn to_hz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}
