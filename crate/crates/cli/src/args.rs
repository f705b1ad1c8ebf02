use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "orthorec",
    version,
    about = "Coefficients of the orthorecursive expansion of unity over x, x^2, ... in L^2[0,1]"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Coefficient engine.
    #[arg(long, value_enum, default_value_t = EngineArg::Ball, global = true)]
    pub engine: EngineArg,

    /// Largest index computed.
    #[arg(long, default_value_t = 20_000, global = true)]
    pub n_max: usize,

    /// Working precision in bits for the ball engine; picked from n_max if
    /// omitted.
    #[arg(long, global = true)]
    pub precision: Option<u32>,

    /// Absolute tolerance for verdicts; each command has its own default.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    /// Cache directory, or a single cache file to load.
    #[arg(long, env = "ORTHOREC_CACHE_DIR", global = true)]
    pub cache: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Allow exact tables beyond the default cap.
    #[arg(long, global = true)]
    pub force: bool,

    /// No progress output on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Exact,
    Ball,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// The six coefficient inequalities.
    Inequalities,
    /// 2-adic valuation of the denominators (exact).
    Valuation,
    /// Determinant and permutation-sum formulas against the recurrence (exact).
    Oracles,
    /// The printed integrality claim and lower bound (exact).
    Integrality,
    /// Inequalities, valuation and oracles.
    All,
}

#[derive(Debug, Clone, Args)]
pub struct Rows {
    /// Print only these indices (repeatable); all rows by default.
    #[arg(long = "at", value_delimiter = ',')]
    pub at: Vec<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print c_n.
    Coeffs(Rows),
    /// Print the partial sums s_n.
    Sums(Rows),
    /// Print |p_n|^2, or D(n) with --energy, and bound K = lim n^2 |p_n|^2.
    Norms {
        #[command(flatten)]
        rows: Rows,
        #[arg(long)]
        energy: bool,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::Inequalities)]
        suite: Suite,
        /// First index checked.
        #[arg(long, default_value_t = 1)]
        from: usize,
    },
    /// Certified sign changes of c_n.
    Signs,
    /// Decay exponent estimates.
    Delta {
        /// Indices for the point estimate ln|c_n| / ln n.
        #[arg(long = "at", value_delimiter = ',')]
        at: Vec<usize>,
        /// Lower end of the envelope fit window.
        #[arg(long, default_value_t = 1000)]
        window_lo: usize,
        /// Upper end of the envelope fit window; n_max by default.
        #[arg(long)]
        window_hi: Option<usize>,
    },
    /// sum c_n h_r(n) = 1/(r+1).
    Identities {
        #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1, 2, 3])]
        r: Vec<usize>,
        /// Truncation index; n_max by default.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Residual of the functional equation for F(t) = sum c_n t^n.
    Functional {
        #[arg(long, value_delimiter = ',', default_values_t = ["0.1".to_string(), "0.5".into(), "0.9".into()])]
        t: Vec<String>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Residual of the integral equation for F.
    Integral {
        #[arg(long, value_delimiter = ',', default_values_t = ["0.1".to_string(), "0.5".into(), "0.9".into()])]
        t: Vec<String>,
        #[arg(long)]
        n: Option<usize>,
        /// Starting Gauss-Legendre order.
        #[arg(long, default_value_t = 64)]
        order: usize,
    },
    /// Partial sum of C(s) = sum c_n / (n+1)^s.
    Dirichlet {
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        re: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        im: String,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Check that exact values lie inside the ball enclosures.
    CrossValidate {
        /// Size of the exact table compared.
        #[arg(long, default_value_t = 500)]
        exact_n_max: usize,
    },
}
