use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "warpiso", version, about = "Cheeger constants, spectra and isoperimetric profiles of warped products")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Emit JSON.
    #[arg(long, global = true, conflicts_with_all = ["csv", "text"])]
    pub json: bool,

    /// Emit CSV (curves and tables only).
    #[arg(long, global = true, conflicts_with = "text")]
    pub csv: bool,

    /// Emit plain text.
    #[arg(long, global = true)]
    pub text: bool,

    /// Write the artifact here instead of stdout.
    #[arg(long, short, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Worker threads for sweeps and parallel searches (0 = one per core).
    #[arg(long, global = true, env = "WARPISO_JOBS", default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Cli {
    pub fn format(&self) -> Option<Format> {
        if self.json {
            Some(Format::Json)
        } else if self.csv {
            Some(Format::Csv)
        } else if self.text {
            Some(Format::Text)
        } else {
            None
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify the Cheeger constant with matching upper and lower bounds.
    Cheeger(CheegerArgs),
    /// Bottom of the radial spectrum on a truncated interval.
    Spectrum(SpectrumArgs),
    /// Model profiles, comparisons and renormalized-volume estimates.
    Profile {
        #[command(subcommand)]
        command: ProfileCommand,
    },
    /// Area-to-volume ratio of the equidistant set at distance t from the core.
    Ratio(RatioArgs),
    /// Upper bound on the Cheeger constant from end genera and core volumes.
    Bound(BoundArgs),
    /// Brute-force validators.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Ricci and scalar curvature along the radial direction.
    Curvature(CurvatureArgs),
    /// Run a verification suite; exits 3 if any check fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WarpChoice {
    Cosh,
    CoshScaled,
    Exp,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseChoice {
    Hyperbolic,
    Sphere,
    Torus,
}

#[derive(Debug, Clone, Args)]
pub struct GeometryArgs {
    /// Warping function.
    #[arg(long, value_enum, default_value_t = WarpChoice::Cosh)]
    pub warp: WarpChoice,

    /// Rate c for `cosh-scaled`, f(r) = cosh(c r).
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,

    /// Base surface.
    #[arg(long, value_enum, default_value_t = BaseChoice::Hyperbolic)]
    pub base: BaseChoice,

    /// Genus of a hyperbolic base.
    #[arg(long, default_value_t = 2)]
    pub genus: u32,

    /// Area of a flat torus base.
    #[arg(long, default_value_t = 1.0)]
    pub area: f64,

    /// Half-width of the working window.
    #[arg(long, default_value_t = 25.0)]
    pub window: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Run once per value, e.g. `genus=2,3,4`; results keep input order.
    #[arg(long, value_name = "KEY=V1,V2,...")]
    pub sweep: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct CheegerArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,

    /// Largest accepted gap between the upper and lower bound.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,

    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BcChoice {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,

    /// Half-width L of the interval [-L, L].
    #[arg(long = "L", default_value_t = 12.0)]
    pub half_width: f64,

    /// Number of grid cells.
    #[arg(long, default_value_t = 8000)]
    pub n: usize,

    /// Boundary condition at ±L.
    #[arg(long, value_enum, default_value_t = BcChoice::Dirichlet)]
    pub bc: BcChoice,

    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Genera of the ends, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub genera: Vec<u32>,

    /// Volume of the totally geodesic core |Ω_TG|.
    #[arg(long = "tg-core", default_value_t = 0.0)]
    pub tg_core: f64,

    /// Volume of the outermost region |Ω₀|; defaults to the core volume.
    #[arg(long)]
    pub outermost: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct VolumeGrid {
    /// Explicit volumes, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["vmin", "vmax", "samples"])]
    pub volumes: Option<Vec<f64>>,

    /// Smallest volume of an even grid; V = 0 is skipped for β.
    #[arg(long, default_value_t = 0.0)]
    pub vmin: f64,

    /// Largest volume of an even grid.
    #[arg(long, default_value_t = 100.0)]
    pub vmax: f64,

    /// Number of grid volumes.
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
}

#[derive(Debug, Subcommand)]
pub enum ProfileCommand {
    /// Sample the totally geodesic model profile I_TG.
    Tg {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: VolumeGrid,
    },
    /// Sample the slab foliation profile β of a warped product.
    Beta {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[command(flatten)]
        grid: VolumeGrid,
    },
    /// Check an external profile against the shifted model profile.
    Compare {
        /// Profile curve as CSV (`V,A`) or JSON.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Estimate the renormalized volume from the tail of an external profile.
    Renvol {
        /// Profile curve as CSV (`V,A`) or JSON, sampled far into the tail.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RatioArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Distance from the core.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,

    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FunctionChoice {
    Distance,
    Sinh,
    Tanh,
    Sech,
    RTanhR,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Exhaustive discrete Cheeger search over unions of intervals.
    Search {
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Half-width L of the line [-L, L].
        #[arg(long = "L", default_value_t = 10.0)]
        half_width: f64,
        /// Number of cells.
        #[arg(long, default_value_t = 20_000)]
        n: usize,
        /// Largest number of components searched.
        #[arg(long, default_value_t = 2)]
        components: usize,
    },
    /// Compare the radial Laplacian with its finite-difference stencil.
    Fd {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long, value_enum, default_value_t = FunctionChoice::Sech)]
        function: FunctionChoice,
        /// Stencil step.
        #[arg(long, default_value_t = 1e-4)]
        h: f64,
        /// Radii are sampled from [-rmax, rmax].
        #[arg(long, default_value_t = 10.0)]
        rmax: f64,
        /// Number of grid radii.
        #[arg(long, default_value_t = 1000)]
        points: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct CurvatureArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,

    /// Explicit radii, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["rmin", "rmax", "points"])]
    pub r: Option<Vec<f64>>,

    /// First radius of an even grid.
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    pub rmin: f64,

    /// Last radius of an even grid.
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub rmax: f64,

    /// Number of grid radii.
    #[arg(long, default_value_t = 11)]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Identities,
    Curvature,
    Cheeger,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,

    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,

    /// Tolerance for analytic checks.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}
