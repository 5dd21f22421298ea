use std::path::PathBuf;

use arctic_core::arctic::BranchId;
use arctic_core::trig_core::default_precision;
use arctic_core::{Model, ModelParams, Mp, NamedPoint};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "arctic", version, about = "Exact partition functions and arctic curves for 6V, 6V', 20V and domino tilings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a verification suite and print one line per check.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        opts: Opts,
    },
    /// Sample arctic curve branches.
    Curve {
        #[command(flatten)]
        opts: Opts,
    },
    /// Tabulate exact or asymptotic quantities.
    Tabulate {
        #[arg(value_enum)]
        kind: TableKind,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Counts,
    Recursions,
    #[value(name = "closed_forms", alias = "closed-forms")]
    ClosedForms,
    #[value(name = "sum_rules", alias = "sum-rules")]
    SumRules,
    Saddles,
    Curves,
    #[value(name = "asymptotic_convergence", alias = "asymptotic-convergence")]
    AsymptoticConvergence,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Counts,
        Suite::Recursions,
        Suite::ClosedForms,
        Suite::SumRules,
        Suite::Saddles,
        Suite::Curves,
        Suite::AsymptoticConvergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Counts => "counts",
            Suite::Recursions => "recursions",
            Suite::ClosedForms => "closed_forms",
            Suite::SumRules => "sum_rules",
            Suite::Saddles => "saddles",
            Suite::Curves => "curves",
            Suite::AsymptoticConvergence => "asymptotic_convergence",
            Suite::All => "all",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    Partition,
    #[value(name = "one_point", alias = "one-point")]
    OnePoint,
    Refined,
    Path,
    #[value(name = "free_energy", alias = "free-energy")]
    FreeEnergy,
    Exponent,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
    Text,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Opts {
    /// 6v, 6vp, 20v or dt.
    #[arg(long)]
    pub model: Option<String>,
    /// Named point: asm, vsasm, tau-asm, tau-vsasm, 20v-dwbc12, 20v-dwbc3, uniform, free-fermion.
    #[arg(long)]
    pub point: Option<String>,
    /// Crossing parameter; numbers or multiples of pi such as `pi/6` or `-3pi/8`.
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub v: Option<String>,
    /// Weight normalisation (rho for 6V, rho_o = rho_e for 6V').
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<String>,
    /// 20V weight normalisation.
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
    /// Size `n` or inclusive range `a..b`.
    #[arg(long)]
    pub n: Option<String>,
    /// `xi` value, comma list, or range `a..b` sampled at `--points` values.
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<String>,
    /// Number of samples per branch or per xi range.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub precision_bits: Option<u32>,
    /// Comma list of ne, se, nw, sw, full, or `all`.
    #[arg(long)]
    pub branches: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Significant digits for decimal output.
    #[arg(long, default_value_t = 30)]
    pub digits: usize,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses a real number or a rational multiple of pi (`pi`, `-pi/2`, `3pi/8`, `0.25*pi`).
pub fn parse_angle(s: &str, prec: u32) -> CliResult<Mp> {
    let t: String = s.trim().to_ascii_lowercase().chars().filter(|c| !c.is_whitespace()).collect();
    let Some((pre, post)) = t.split_once("pi") else {
        return Ok(Mp::parse(&t, prec)?);
    };
    let pre = pre.trim_end_matches('*');
    let den: i64 = match post {
        "" => 1,
        d if d.starts_with('/') => d[1..].parse().map_err(|_| usage(format!("bad angle '{s}'")))?,
        _ => return Err(usage(format!("bad angle '{s}'"))),
    };
    if den == 0 {
        return Err(usage(format!("bad angle '{s}'")));
    }
    let num = match pre {
        "" | "+" => Some(1),
        "-" => Some(-1),
        p => p.parse::<i64>().ok(),
    };
    match num {
        Some(a) => Ok(Mp::pi_frac(a, den, prec)),
        None => {
            let c = Mp::parse(pre, prec)?;
            Ok(&(&c * &Mp::pi(prec)) / &Mp::int(den, prec))
        }
    }
}

/// `4` or `1..6` (inclusive).
pub fn parse_n_range(s: &str) -> CliResult<Vec<usize>> {
    let bad = || usage(format!("bad --n '{s}'"));
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        Ok((a..=b).collect())
    } else {
        Ok(vec![s.trim().parse().map_err(|_| bad())?])
    }
}

/// Single value, comma list, or `a..b` range with `points` evenly spaced values.
pub fn parse_xi_list(s: &str, points: usize, prec: u32) -> CliResult<Vec<Mp>> {
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (parse_angle(a, prec)?, parse_angle(b, prec)?);
        if points < 2 {
            return Ok(vec![a]);
        }
        let m = (points - 1) as i64;
        return Ok((0..points)
            .map(|i| &a + &(&(&b - &a) * &Mp::ratio(i as i64, m, prec)))
            .collect());
    }
    s.split(',').map(|x| parse_angle(x, prec)).collect()
}

pub fn parse_branches(s: Option<&str>, model: Model) -> CliResult<Vec<BranchId>> {
    let defaults = match model {
        Model::Dt => vec![BranchId::FullAnalytic],
        _ => vec![BranchId::Ne, BranchId::Se],
    };
    match s.map(|x| x.trim().to_ascii_lowercase()) {
        None => Ok(defaults),
        Some(x) if x == "all" => Ok(match model {
            Model::SixV => vec![BranchId::Ne, BranchId::Se, BranchId::Nw, BranchId::Sw],
            Model::Dt => vec![BranchId::FullAnalytic, BranchId::Ne],
            _ => defaults,
        }),
        Some(x) => x.split(',').map(|b| BranchId::parse(b).map_err(CliError::from)).collect(),
    }
}

/// Fully resolved options.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub params: Option<ModelParams>,
    pub ns: Vec<usize>,
    pub xis: Option<String>,
    pub points: Option<usize>,
    pub prec: u32,
    pub prec_given: bool,
    pub branches: Option<String>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub digits: usize,
}

impl RunConfig {
    pub fn from_opts(o: &Opts) -> CliResult<RunConfig> {
        let ns = match &o.n {
            Some(s) => parse_n_range(s)?,
            None => vec![],
        };
        let nmax = ns.iter().copied().max().unwrap_or(1);
        let prec = o.precision_bits.unwrap_or_else(|| default_precision(nmax));
        if prec < arctic_core::trig_core::MIN_PRECISION {
            return Err(usage(format!("--precision-bits must be at least {}", arctic_core::trig_core::MIN_PRECISION)));
        }
        if o.digits == 0 {
            return Err(usage("--digits must be positive"));
        }
        let params = resolve_params(o, prec)?;
        Ok(RunConfig {
            params,
            ns,
            xis: o.xi.clone(),
            points: o.points,
            prec,
            prec_given: o.precision_bits.is_some(),
            branches: o.branches.clone(),
            format: o.format,
            out: o.out.clone(),
            digits: o.digits,
        })
    }

    pub fn require_params(&self) -> CliResult<&ModelParams> {
        self.params.as_ref().ok_or_else(|| usage("give --point or --model with parameters"))
    }

    pub fn xi_values(&self, default: &str) -> CliResult<Vec<Mp>> {
        parse_xi_list(self.xis.as_deref().unwrap_or(default), self.points.unwrap_or(11), self.prec)
    }
}

fn resolve_params(o: &Opts, prec: u32) -> CliResult<Option<ModelParams>> {
    let model: Option<Model> = o.model.as_deref().map(str::parse).transpose()?;
    let num = |s: &Option<String>| s.as_deref().map(|x| parse_angle(x, prec)).transpose();
    let p = if let Some(name) = &o.point {
        let eta = num(&o.eta)?.map(|e| e.to_f64());
        let np = NamedPoint::parse(name, eta)?;
        if o.u.is_some() || o.v.is_some() {
            return Err(usage("--u/--v cannot be combined with --point"));
        }
        let p = np.params(prec);
        match model {
            None => p,
            Some(m) if m == p.model => p,
            Some(Model::Dt) if np == NamedPoint::Uniform20V => p.with_model(Model::Dt),
            Some(m) => return Err(usage(format!("point '{}' belongs to model {}, not {m}", np.label(), p.model))),
        }
    } else if let Some(m) = model {
        if m == Model::Dt {
            if o.eta.is_some() || o.u.is_some() || o.v.is_some() {
                return Err(usage("domino tilings are defined at the uniform point only"));
            }
            NamedPoint::Uniform20V.params(prec).with_model(Model::Dt)
        } else {
            let eta = num(&o.eta)?.ok_or_else(|| usage("--eta is required without --point"))?;
            let u = num(&o.u)?.ok_or_else(|| usage("--u is required without --point"))?;
            let v = match num(&o.v)? {
                Some(v) => v,
                None if m == Model::SixV => Mp::zero(prec),
                None => return Err(usage("--v is required for 6vp and 20v")),
            };
            ModelParams::new(m, eta, u, v)?
        }
    } else {
        if o.eta.is_some() || o.u.is_some() || o.v.is_some() {
            return Err(usage("--model is required with explicit parameters"));
        }
        return Ok(None);
    };
    let mut p = p;
    if let Some(r) = num(&o.rho)? {
        p = match p.model {
            Model::SixV => p.with_rho(r),
            Model::SixVP => p.with_rho_oe(r.clone(), r),
            m => return Err(usage(format!("--rho does not apply to {m}"))),
        };
    }
    if let Some(nu) = num(&o.nu)? {
        if p.model != Model::TwentyV {
            return Err(usage("--nu applies to 20v only"));
        }
        p = p.with_nu(nu);
    }
    p.validate()?;
    Ok(Some(p))
}
