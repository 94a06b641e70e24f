use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "fosc",
    version,
    about = "Nonlinear f-oscillators: coherent states, statistics, phase space, thermodynamics"
)]
pub struct Cli {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Series truncation tolerance, in (0, 1e-2].
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol: f64,
    /// Truncation cap on the Fock index, at most 65536.
    #[arg(long, global = true, env = "FOSC_N_MAX", default_value_t = 4096)]
    pub n_max: usize,
    /// Relative margin below the convergence radius, in [0, 1).
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub radius_margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A state read from a file or built from a deformation and an amplitude.
#[derive(Debug, Args)]
pub struct StateSource {
    /// State file written by `fosc state`.
    #[arg(long, conflicts_with_all = ["deformation", "alpha"])]
    pub state: Option<PathBuf>,
    /// Deformation as JSON, or `@path` to read it from a file.
    #[arg(long, allow_hyphen_values = true)]
    pub deformation: Option<String>,
    /// Amplitude `a+bi`.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, allow_hyphen_values = true, default_value_t = -6.0)]
    pub xmin: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 6.0)]
    pub xmax: f64,
    #[arg(long, default_value_t = 121)]
    pub nx: usize,
    #[arg(long, allow_hyphen_values = true, default_value_t = -6.0)]
    pub pmin: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 6.0)]
    pub pmax: f64,
    #[arg(long, default_value_t = 121)]
    pub np: usize,
}

#[derive(Debug, Args)]
pub struct Temperatures {
    /// Comma-separated temperatures.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "t_range", required_unless_present = "t_range")]
    pub temps: Option<String>,
    /// Geometric range `start:stop:count`.
    #[arg(long)]
    pub t_range: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TwoModeKindArg {
    Joint,
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Rk4,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an f-coherent state and write it as JSON.
    State {
        #[command(flatten)]
        source: StateSource,
        /// Evolve the state to this time.
        #[arg(long, allow_hyphen_values = true)]
        time: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Photon-number statistics (JSON) or distribution (CSV "n,p").
    PhotonStats {
        #[command(flatten)]
        source: StateSource,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Quadrature variances of one state (JSON), or a polar scan over α (CSV).
    Quadratures {
        #[command(flatten)]
        source: StateSource,
        /// Scan radii `start:stop:count`; needs --deformation and no --alpha.
        #[arg(long, requires = "angles")]
        radii: Option<String>,
        /// Number of scan angles, evenly spaced on [0, 2π).
        #[arg(long, requires = "radii")]
        angles: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Wigner function on a grid: CSV "x,p,value" plus a `<out>.json` sidecar.
    Wigner {
        #[command(flatten)]
        source: StateSource,
        #[command(flatten)]
        grid: GridArgs,
        /// Evaluate the complex double sum and fail if the imaginary part exceeds 1e-9.
        #[arg(long)]
        check_reality: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Husimi function on a grid: CSV "re_z,im_z,value" plus a `<out>.json` sidecar.
    Husimi {
        #[command(flatten)]
        source: StateSource,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evolve a state in time.
    Evolve {
        #[command(flatten)]
        source: StateSource,
        #[arg(long = "time", short = 't', allow_hyphen_values = true)]
        time: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Two-mode state statistics (JSON) or joint distribution (CSV "n1,n2,p").
    TwoMode {
        #[arg(long, allow_hyphen_values = true)]
        deformation: String,
        /// Second-mode deformation for product states; defaults to the first.
        #[arg(long, allow_hyphen_values = true)]
        deformation2: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        alpha1: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha2: String,
        #[arg(long, value_enum, default_value_t = TwoModeKindArg::Joint)]
        kind: TwoModeKindArg,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Temperature sweep: CSV "T,Z,lnZ,C,mean_n_exact,mean_n_perturbative".
    Thermo {
        #[arg(long, allow_hyphen_values = true)]
        deformation: String,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[command(flatten)]
        temps: Temperatures,
        #[command(flatten)]
        output: Output,
    },
    /// q-deformed Planck occupation against Bose–Einstein and the exact sum.
    Planck {
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[command(flatten)]
        temps: Temperatures,
        #[command(flatten)]
        output: Output,
    },
    /// Classical orbit of a reparametrized oscillator: CSV "t,x1,y1,...".
    Classical {
        /// System file (JSON).
        #[arg(long)]
        system: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Rk4)]
        method: MethodArg,
        #[command(flatten)]
        output: Output,
    },
    /// Residuals of the moment equations for a radial measure: CSV "n,residual".
    Moments {
        #[arg(long, allow_hyphen_values = true)]
        deformation: String,
        /// Measure samples, CSV "rho,weight" on a uniform grid.
        #[arg(long, conflicts_with = "flat", required_unless_present = "flat")]
        measure: Option<PathBuf>,
        /// Constant measure density.
        #[arg(long)]
        flat: Option<f64>,
        /// Upper radius for --flat.
        #[arg(long, default_value_t = 12.0)]
        rho_max: f64,
        /// Sample count for --flat.
        #[arg(long, default_value_t = 4001)]
        points: usize,
        /// Highest moment index.
        #[arg(long = "moments", default_value_t = 10)]
        moments: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Deformation tables: CSV "n,f,f_factorial,F,E,omega" for n ≤ K.
    DeformInfo {
        #[arg(long, allow_hyphen_values = true)]
        deformation: String,
        #[arg(long, short = 'k', default_value_t = 20)]
        k: usize,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[command(flatten)]
        output: Output,
    },
}
