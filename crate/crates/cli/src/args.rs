use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dydy::geometry::Disk;
use dydy::poly::{build_gn, Poly};
use dydy::{Padic2, Rational2};

#[derive(Parser, Debug)]
#[command(
    name = "dydy",
    version,
    about = "Exact 2-adic dynamics of f_t(z) = -(3/2)t(-2z^3+3z^2)+1"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Relative precision in bits for truncated 2-adic arithmetic.
    #[arg(long, global = true, env = "DYDY_PRECISION", default_value_t = 128,
          value_parser = clap::value_parser!(u32).range(16..))]
    pub precision: u32,
    /// Iteration budget for orbit classification.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub max_iters: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads for tree classification (defaults to the available cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write the document to a file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether the critical orbit of f_t is bounded.
    ClassifyParameter {
        #[arg(value_parser = parse_rational, allow_hyphen_values = true)]
        t: Rational2,
    },
    /// Classify the orbit of z under f_t.
    ClassifyPoint {
        #[arg(value_parser = parse_rational, allow_hyphen_values = true)]
        t: Rational2,
        #[arg(value_parser = parse_rational, allow_hyphen_values = true)]
        z: Rational2,
    },
    /// Classified tree of parameter disks around t = 1.
    MandelTree {
        #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
        depth: i64,
    },
    /// Classified tree of dynamical disks of f_1 around z = -1/2.
    JuliaTree {
        #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
        depth: i64,
    },
    /// Check one instance of a theorem and print its trace.
    Verify {
        /// thm-unbdd, thm-q2bdd, thm-bdd, prop-julia-unbounded or prop-julia-bounded.
        theorem: String,
        #[arg(long)]
        n: u32,
    },
    /// Find the parameter whose critical point has exact period n.
    PcfFind {
        #[arg(long)]
        n: usize,
    },
    /// Newton polygon of a polynomial: "g5" or ascending coefficients "c0,c1,...".
    NewtonPolygon {
        #[arg(value_parser = parse_poly, allow_hyphen_values = true)]
        poly: PolySpec,
    },
    /// Hensel-lift a periodic cycle of f_t from a residue class.
    CycleFind {
        #[arg(long)]
        period: usize,
        /// Residue class "a%2^r" or disk "a:r".
        #[arg(long, value_parser = parse_seed, allow_hyphen_values = true)]
        seed: Disk,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, default_value = "1")]
        t: Rational2,
    },
}

#[derive(Clone, Debug)]
pub struct PolySpec {
    pub label: String,
    pub poly: Poly,
}

pub fn parse_rational(s: &str) -> Result<Rational2, String> {
    s.parse().map_err(|e: dydy::Error| e.to_string())
}

fn parse_poly(s: &str) -> Result<PolySpec, String> {
    let s = s.trim();
    let gn = s.strip_prefix("g_").or_else(|| s.strip_prefix('g'));
    if let Some(n) = gn {
        let n: usize = n
            .parse()
            .map_err(|_| format!("bad polynomial spec {s:?}"))?;
        let poly = build_gn(n).map_err(|e| e.to_string())?;
        return Ok(PolySpec {
            label: format!("g_{n}"),
            poly,
        });
    }
    let coeffs = s
        .split(',')
        .map(parse_rational)
        .collect::<Result<Vec<_>, _>>()?;
    let poly = Poly::new(coeffs);
    Ok(PolySpec {
        label: poly.display_in("x"),
        poly,
    })
}

/// `a%m` with `m` a power of two, or a disk literal `a:r`.
fn parse_seed(s: &str) -> Result<Disk, String> {
    if let Some((a, m)) = s.split_once('%') {
        let a = parse_rational(a)?;
        let m: u64 = m
            .trim()
            .parse()
            .map_err(|_| format!("bad modulus in {s:?}"))?;
        if !m.is_power_of_two() {
            return Err(format!("modulus {m} is not a power of 2"));
        }
        return Ok(Disk::new(a, m.trailing_zeros() as i64));
    }
    s.parse().map_err(|e: dydy::Error| e.to_string())
}

/// `x mod 2^r` as a short string, for text output.
pub fn residue_str(x: &Padic2, r: i64) -> String {
    format!("{} mod 2^{r}", x.representative().residue(r))
}
