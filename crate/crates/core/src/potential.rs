//! Total trapping potential above the crossed waveguides:
//!
//! ```text
//! U(x,y,z) = alpha_r I_r(y,z) e^{-2x/d_r} + alpha_b I_b(y,z) e^{-2x/d_b}
//!            - (C3 a) / (x^3 (x + a)) + s m g x,        a = lambda_eff / 2 pi
//! ```

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::atomic_physics::AtomSpecies;
use crate::constants::STANDARD_GRAVITY;
use crate::error::{Result, TrapError};
use crate::grid::{Axis, PotentialGrid};
use crate::mode_model::{decay_length, CrossedModePair};
use crate::parallel::{map_indexed, Execution};
use crate::slab_solver::SlabGeometry;
use crate::trap_analysis::AnalysisSettings;

#[derive(Debug, Clone, PartialEq)]
pub struct TrapConfig {
    pub name: String,
    pub geometry: SlabGeometry,
    pub blue: CrossedModePair,
    pub red: CrossedModePair,
    pub species: AtomSpecies,
    /// +1 as in the printed potential, -1 reversed, 0 off.
    pub gravity_sign: i8,
    pub analysis: AnalysisSettings,
    /// Short digest of the source configuration, carried into every output.
    pub hash: String,
}

impl TrapConfig {
    pub fn validate(&self) -> Result<()> {
        self.species.validate()?;
        self.blue.validate("blue")?;
        self.red.validate("red")?;
        self.geometry.validate(self.blue.wavelength())?;
        if !(self.blue.wavelength() < self.red.wavelength()) {
            return Err(TrapError::config_field(
                "blue.wavelength_nm",
                "blue wavelength must be shorter than red",
            ));
        }
        if self.blue.region.rib_width != self.geometry.rib_width
            || self.red.region.rib_width != self.geometry.rib_width
        {
            return Err(TrapError::config_field("geometry.rib_width_um", "pairs must share the geometry"));
        }
        // guard band around the atomic lines
        self.species.dipole_coefficient(self.blue.wavelength())?;
        self.species.dipole_coefficient(self.red.wavelength())?;
        if !matches!(self.gravity_sign, -1..=1) {
            return Err(TrapError::config_field("gravity_sign", "must be -1, 0 or +1"));
        }
        self.analysis.validate()
    }

    /// Multiplies the peak intensities of both colours.
    pub fn scale_intensities(&mut self, blue: f64, red: f64) {
        for m in [&mut self.blue.mode_i, &mut self.blue.mode_ii] {
            m.peak_intensity *= blue;
        }
        for m in [&mut self.red.mode_i, &mut self.red.mode_ii] {
            m.peak_intensity *= red;
        }
    }

    pub fn set_fringe_model(&mut self, model: crate::mode_model::FringeModel) {
        for m in [
            &mut self.blue.mode_i,
            &mut self.blue.mode_ii,
            &mut self.red.mode_i,
            &mut self.red.mode_ii,
        ] {
            m.fringe_model = model;
        }
    }

    /// Switches off waveguide II of both colours.
    pub fn single_waveguide(mut self) -> Self {
        self.blue.mode_ii.peak_intensity = 0.0;
        self.red.mode_ii.peak_intensity = 0.0;
        self
    }
}

/// Anything that can be probed for a potential energy at a point.
pub trait EnergySurface {
    /// J at (x, y, z) in m.
    fn energy(&self, p: [f64; 3]) -> f64;
    /// Mass of the trapped particle, kg.
    fn mass(&self) -> f64;
}

/// A configuration with the wavelength-dependent coefficients resolved.
#[derive(Debug, Clone)]
pub struct TrapModel {
    pub config: TrapConfig,
    pub alpha_blue: f64,
    pub alpha_red: f64,
    pub decay_blue: f64,
    pub decay_red: f64,
    surface_strength: f64,
    surface_scale: f64,
    gravity_force: f64,
}

impl TrapModel {
    pub fn new(config: TrapConfig) -> Result<Self> {
        config.validate()?;
        let species = &config.species;
        let alpha_blue = species.dipole_coefficient(config.blue.wavelength())?;
        let alpha_red = species.dipole_coefficient(config.red.wavelength())?;
        let decay_blue = decay_length(&config.blue.mode_i)?;
        let decay_red = decay_length(&config.red.mode_i)?;
        let surface_scale = species.lambda_eff / (2.0 * PI);
        Ok(TrapModel {
            alpha_blue,
            alpha_red,
            decay_blue,
            decay_red,
            surface_strength: species.c3 * surface_scale,
            surface_scale,
            gravity_force: config.gravity_sign as f64 * species.mass * STANDARD_GRAVITY,
            config,
        })
    }

    pub fn mass(&self) -> f64 {
        self.config.species.mass
    }

    /// Surface-intensity weights of one (y, z) column, ready for fast x sweeps.
    pub fn column(&self, y: f64, z: f64) -> Column {
        Column {
            blue: self.alpha_blue * self.config.blue.surface_intensity(y, z),
            red: self.alpha_red * self.config.red.surface_intensity(y, z),
            inv_blue: 2.0 / self.decay_blue,
            inv_red: 2.0 / self.decay_red,
            surface_strength: self.surface_strength,
            surface_scale: self.surface_scale,
            gravity_force: self.gravity_force,
        }
    }

    pub fn potential_at(&self, x: f64, y: f64, z: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(TrapError::NonPhysicalPoint { x_nm: x * 1e9 });
        }
        Ok(self.column(y, z).energy(x))
    }

    /// Closed-form dU/dx.
    pub fn potential_dx(&self, x: f64, y: f64, z: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(TrapError::NonPhysicalPoint { x_nm: x * 1e9 });
        }
        Ok(self.column(y, z).dx(x))
    }

    /// (blue, red) intensities at a point above the surface, W/m^2.
    pub fn intensities_at(&self, x: f64, y: f64, z: f64) -> (f64, f64) {
        let blue = self.config.blue.surface_intensity(y, z) * (-2.0 * x / self.decay_blue).exp();
        let red = self.config.red.surface_intensity(y, z) * (-2.0 * x / self.decay_red).exp();
        (blue, red)
    }
}

impl EnergySurface for TrapModel {
    fn energy(&self, p: [f64; 3]) -> f64 {
        self.column(p[1], p[2]).energy(p[0])
    }
    fn mass(&self) -> f64 {
        self.config.species.mass
    }
}

/// The potential restricted to a fixed (y, z).
#[derive(Debug, Clone, Copy)]
pub struct Column {
    blue: f64,
    red: f64,
    inv_blue: f64,
    inv_red: f64,
    surface_strength: f64,
    surface_scale: f64,
    gravity_force: f64,
}

impl Column {
    #[inline]
    pub fn optical(&self, x: f64) -> f64 {
        self.red * (-self.inv_red * x).exp() + self.blue * (-self.inv_blue * x).exp()
    }

    #[inline]
    pub fn surface(&self, x: f64) -> f64 {
        -self.surface_strength / (x * x * x * (x + self.surface_scale))
    }

    #[inline]
    pub fn gravity(&self, x: f64) -> f64 {
        self.gravity_force * x
    }

    #[inline]
    pub fn energy(&self, x: f64) -> f64 {
        self.optical(x) + self.surface(x) + self.gravity(x)
    }

    pub fn dx(&self, x: f64) -> f64 {
        let a = self.surface_scale;
        -self.inv_red * self.red * (-self.inv_red * x).exp()
            - self.inv_blue * self.blue * (-self.inv_blue * x).exp()
            + self.surface_strength * (4.0 * x + 3.0 * a) / (x.powi(4) * (x + a).powi(2))
            + self.gravity_force
    }
}

/// Scan directions in the trap frame. `T` and `L` are the transverse and
/// longitudinal diagonals, t = (y - z)/sqrt 2 and l = (y + z)/sqrt 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanDirection {
    X,
    Y,
    Z,
    T,
    L,
}

impl ScanDirection {
    pub fn name(self) -> &'static str {
        match self {
            ScanDirection::X => "x",
            ScanDirection::Y => "y",
            ScanDirection::Z => "z",
            ScanDirection::T => "t",
            ScanDirection::L => "l",
        }
    }

    /// Unit vector as (x, y, z).
    pub fn unit(self) -> [f64; 3] {
        match self {
            ScanDirection::X => [1.0, 0.0, 0.0],
            ScanDirection::Y => [0.0, 1.0, 0.0],
            ScanDirection::Z => [0.0, 0.0, 1.0],
            ScanDirection::T => [0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
            ScanDirection::L => [0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2],
        }
    }

    /// Lateral components (y, z) scaled by `s`.
    pub fn lateral(self, s: f64) -> (f64, f64) {
        let u = self.unit();
        (s * u[1], s * u[2])
    }
}

impl std::str::FromStr for ScanDirection {
    type Err = TrapError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(ScanDirection::X),
            "y" => Ok(ScanDirection::Y),
            "z" => Ok(ScanDirection::Z),
            "t" => Ok(ScanDirection::T),
            "l" => Ok(ScanDirection::L),
            other => Err(TrapError::invalid(format!("unknown axis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub direction: ScanDirection,
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

/// Lattice `origin + sum_k s_k e_k` over one to three axes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub origin: [f64; 3],
    pub axes: Vec<GridAxis>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    Y0X,
    Z0X,
    T0X,
    L0X,
    Y0Z,
}

impl Plane {
    pub fn name(self) -> &'static str {
        match self {
            Plane::Y0X => "y0x",
            Plane::Z0X => "z0x",
            Plane::T0X => "t0x",
            Plane::L0X => "l0x",
            Plane::Y0Z => "y0z",
        }
    }
}

impl std::str::FromStr for Plane {
    type Err = TrapError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "y0x" => Ok(Plane::Y0X),
            "z0x" => Ok(Plane::Z0X),
            "t0x" => Ok(Plane::T0X),
            "l0x" => Ok(Plane::L0X),
            "y0z" => Ok(Plane::Y0Z),
            other => Err(TrapError::invalid(format!("unknown plane `{other}`"))),
        }
    }
}

impl GridSpec {
    pub fn line(origin: [f64; 3], direction: ScanDirection, from: f64, to: f64, count: usize) -> Self {
        GridSpec { origin, axes: vec![GridAxis { direction, from, to, count }] }
    }

    /// A vertical plane through the trap axis with lateral span +-`half_width`
    /// and heights `x_range`; for `Y0Z` the plane sits at height `x_range.0`
    /// and spans +-`half_width` in both y and z.
    pub fn plane(plane: Plane, half_width: f64, x_range: (f64, f64), resolution: usize) -> Self {
        let lateral = |d| GridAxis { direction: d, from: -half_width, to: half_width, count: resolution };
        let height = GridAxis { direction: ScanDirection::X, from: x_range.0, to: x_range.1, count: resolution };
        let axes = match plane {
            Plane::Y0X => vec![lateral(ScanDirection::Y), height],
            Plane::Z0X => vec![lateral(ScanDirection::Z), height],
            Plane::T0X => vec![lateral(ScanDirection::T), height],
            Plane::L0X => vec![lateral(ScanDirection::L), height],
            Plane::Y0Z => {
                return GridSpec {
                    origin: [x_range.0, 0.0, 0.0],
                    axes: vec![lateral(ScanDirection::Y), lateral(ScanDirection::Z)],
                }
            }
        };
        GridSpec { origin: [0.0; 3], axes }
    }

    pub fn volume(x: (f64, f64, usize), y: (f64, f64, usize), z: (f64, f64, usize)) -> Self {
        let ax = |direction, (from, to, count): (f64, f64, usize)| GridAxis { direction, from, to, count };
        GridSpec {
            origin: [0.0; 3],
            axes: vec![ax(ScanDirection::X, x), ax(ScanDirection::Y, y), ax(ScanDirection::Z, z)],
        }
    }

    fn grid_axes(&self) -> Result<Vec<Axis>> {
        if self.axes.is_empty() || self.axes.len() > 3 {
            return Err(TrapError::invalid("a scan needs one to three axes"));
        }
        self.axes
            .iter()
            .map(|a| Axis::spanning(a.direction.name(), a.from, a.to, a.count))
            .collect()
    }

    fn point(&self, axes: &[Axis], idx: &[usize]) -> [f64; 3] {
        let mut p = self.origin;
        for ((spec, axis), &i) in self.axes.iter().zip(axes).zip(idx) {
            let s = axis.coordinate(i);
            let u = spec.direction.unit();
            for k in 0..3 {
                p[k] += s * u[k];
            }
        }
        p
    }
}

/// Uniform samples along one direction.
pub fn line_scan(
    model: &TrapModel,
    origin: [f64; 3],
    direction: ScanDirection,
    from: f64,
    to: f64,
    samples: usize,
) -> Result<PotentialGrid> {
    grid_scan(model, &GridSpec::line(origin, direction, from, to, samples), Execution::Sequential)
}

/// Samples the potential over a 1D, 2D or 3D lattice.
pub fn grid_scan(model: &TrapModel, spec: &GridSpec, exec: Execution) -> Result<PotentialGrid> {
    let axes = spec.grid_axes()?;
    let total: usize = axes.iter().map(|a| a.count).product();
    let shape = PotentialGrid { axes: axes.clone(), values: Vec::new(), config_hash: String::new() };

    // reject any sample on or below the surface before evaluating
    let points: Vec<[f64; 3]> = (0..total).map(|i| spec.point(&axes, &shape.unravel(i))).collect();
    if let Some(p) = points.iter().find(|p| !(p[0] > 0.0)) {
        return Err(TrapError::NonPhysicalPoint { x_nm: p[0] * 1e9 });
    }
    let values = map_indexed(total, exec, |i| model.energy(points[i]));
    PotentialGrid::new(axes, values, model.config.hash.clone())
}
