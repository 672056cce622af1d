use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "sdl",
    version,
    about = "Diameters, spectral gaps and distortion of graph families"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a graph and write it as JSON.
    Gen {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: PathBuf,
    },
    /// First positive eigenvalue of the p-Laplacian.
    Spectral {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        p: Vec<f64>,
        #[arg(long, value_enum, default_value_t = ConventionArg::Both)]
        convention: ConventionArg,
        #[arg(long, value_enum, default_value_t = SpectralMethod::Auto)]
        method: SpectralMethod,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Realized distortion of an embedding, with the spectral lower bound.
    Distortion {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        embed: EmbedArgs,
        /// Read the embedding from a file instead of building one.
        #[arg(long, conflicts_with = "method")]
        embedding: Option<PathBuf>,
        /// ε for the lower bound.
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Volume distribution ρ_ε.
    Rho {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_delimiter = ',', default_value = "0.5")]
        eps: Vec<f64>,
        #[arg(long, value_enum, default_value_t = RhoMethodArg::All)]
        method: RhoMethodArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check one inequality; exit 2 if it fails.
    Verify {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum)]
        ineq: IneqArg,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Embedding whose distortion enters the volume-spectral check.
        #[arg(long, value_enum)]
        method: Option<EmbedMethod>,
        #[arg(long)]
        embedding: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Table over the levels of a family.
    Sweep {
        #[arg(long)]
        family: String,
        /// `a..b`, `a..=b` (both inclusive) or a comma list.
        #[arg(long)]
        levels: String,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        p: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.5")]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1024)]
        bourgain_limit: usize,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build an embedding and write it as JSON.
    Embed {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        embed: EmbedArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct Source {
    /// Named family (hanoi, grigorchuk, lamplighter, ballpath, sierpinski,
    /// cycle, path, complete, hypercube).
    #[arg(long, group = "source", requires = "level")]
    pub family: Option<String>,
    /// Wreath-recursion description of a group.
    #[arg(long, group = "source", requires = "level")]
    pub spec: Option<PathBuf>,
    /// Graph file written by `gen`.
    #[arg(long, group = "source")]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub level: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long, value_enum)]
    pub method: Option<EmbedMethod>,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 200)]
    pub iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Operator,
    Eq3,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpectralMethod {
    Auto,
    Exact,
    Variational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RhoMethodArg {
    Exact,
    Lower,
    Upper,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IneqArg {
    Thm3,
    Eq6,
    Eq8,
    Prop6,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmbedMethod {
    Bourgain,
    Lattice,
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Parses `a..b`, `a..=b`, a single level or a comma list.
pub fn parse_levels(text: &str) -> Result<Vec<usize>, String> {
    let bad = || format!("invalid level range `{text}`");
    let levels: Vec<usize> = if let Some((a, b)) = text.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        (a..=b).collect()
    } else {
        text.split(',')
            .map(|s| s.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    if levels.is_empty() {
        return Err(format!("empty level range `{text}`"));
    }
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_ranges() {
        assert_eq!(parse_levels("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_levels("1..=3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_levels("5").unwrap(), vec![5]);
        assert_eq!(parse_levels("2,4").unwrap(), vec![2, 4]);
        assert!(parse_levels("4..1").is_err());
        assert!(parse_levels("x").is_err());
    }
}
