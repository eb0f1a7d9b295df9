use thiserror::Error;

pub type Result<T> = std::result::Result<T, TrapError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrapError {
    #[error("wavelength {wavelength_nm:.4} nm is within the guard band of the {line_nm:.4} nm line")]
    ZeroDetuning { wavelength_nm: f64, line_nm: f64 },

    #[error("wavelength {wavelength_nm:.1} nm outside the material model range ({min_nm:.0}-{max_nm:.0} nm)")]
    OutOfRange { wavelength_nm: f64, min_nm: f64, max_nm: f64 },

    #[error("mode order {order} is cut off (V/2 = {half_v:.4})")]
    ModeCutoff { order: usize, half_v: f64 },

    #[error("effective index {n_eff} does not support an evanescent wave in vacuum")]
    NoEvanescentWave { n_eff: f64 },

    #[error("interference fringes are disabled for this mode pair")]
    FringeModelDisabled,

    #[error("point at x = {x_nm} nm is not on the vacuum side of the surface")]
    NonPhysicalPoint { x_nm: f64 },

    #[error("no trap: {0}")]
    NoTrap(String),

    #[error("not a minimum: curvature along {axis} is {curvature:e} J/m^2")]
    NotAMinimum { axis: &'static str, curvature: f64 },

    #[error("harmonic fit failed: {0}")]
    FitFailed(String),

    #[error("potential never exceeds the atom energy along the path")]
    NoBarrier,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("config error{}: {message}", location(.line, .column, .field))]
    Config {
        message: String,
        line: Option<usize>,
        column: Option<usize>,
        field: Option<String>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

fn location(line: &Option<usize>, column: &Option<usize>, field: &Option<String>) -> String {
    let mut out = String::new();
    if let Some(l) = line {
        out.push_str(&format!(" at line {l}"));
        if let Some(c) = column {
            out.push_str(&format!(", column {c}"));
        }
    }
    if let Some(f) = field {
        out.push_str(&format!(" in `{f}`"));
    }
    out
}

impl TrapError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        TrapError::Invalid(msg.into())
    }

    pub fn config_field(field: impl Into<String>, message: impl Into<String>) -> Self {
        TrapError::Config {
            message: message.into(),
            line: None,
            column: None,
            field: Some(field.into()),
        }
    }
}

impl From<std::io::Error> for TrapError {
    fn from(e: std::io::Error) -> Self {
        TrapError::Io(e.to_string())
    }
}
