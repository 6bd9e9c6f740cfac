use std::path::{Path, PathBuf};

use clap::ValueEnum;
use repval::selection::{refine_for_replicability, Refinement};
use repval::table::{write_delimited, InputTable};
use repval::{
    meta_p, replicated_at, rvalues, AnalysisConfig, Combiner, Dataset, Error, Method,
    PrimaryContext, ValidateOptions,
};

use crate::{read_input, write_output, Failure};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Input table (TSV or CSV with id, p1 and p2 columns); `-` reads stdin.
    pub input: PathBuf,

    /// Number of features examined in the primary study.
    #[arg(long)]
    pub m: u64,

    /// Lower bound on the fraction of features null in both studies.
    #[arg(long, default_value_t = AnalysisConfig::DEFAULT_L00)]
    pub l00: f64,

    /// Share of the error budget given to the follow-up study.
    #[arg(long, default_value_t = AnalysisConfig::DEFAULT_C2)]
    pub c2: f64,

    /// fdr, fdr-general-dep, fdr-threshold-dep or fwer-bonferroni.
    #[arg(long, default_value = "fdr")]
    pub method: Method,

    /// Selection threshold on primary p-values (fdr-threshold-dep only).
    #[arg(long)]
    pub t: Option<f64>,

    /// Add a `replicated` column for level Q.
    #[arg(long)]
    pub q: Option<f64>,

    /// Add a combined p-value column.
    #[arg(long, value_enum, default_value_t = Meta::None)]
    pub meta: Meta,

    /// Replace p-values of exactly 0 with EPS instead of rejecting them.
    #[arg(long, value_name = "EPS")]
    pub clamp_zero: Option<f64>,

    /// Drop features that cannot be replicated at level Q before computing.
    #[arg(long, value_name = "Q")]
    pub refine_q: Option<f64>,

    /// Primary p-values of the non-followed features, one per line.
    #[arg(long, value_name = "FILE", conflicts_with = "assume_padded")]
    pub primary_pvalues: Option<PathBuf>,

    /// Treat every non-followed primary p-value as 1 when refining.
    #[arg(long)]
    pub assume_padded: bool,

    /// Output format; defaults to the input's.
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Decimals for the r_value column.
    #[arg(long, default_value_t = 4)]
    pub digits: usize,

    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Meta {
    Fisher,
    Stouffer,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Csv,
}

/// `1.58e-07` style: two decimals and a two-digit signed exponent, matching
/// how the bundled tables print p-values.
fn scientific(x: f64) -> String {
    let s = format!("{x:.2e}");
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let (sign, digits) = match exp.strip_prefix('-') {
                Some(d) => ('-', d),
                None => ('+', exp),
            };
            format!("{mantissa}e{sign}{digits:0>2}")
        }
        None => s,
    }
}

/// Attach the input line to errors about a single record.
fn at_line(table: &InputTable, e: Error) -> Failure {
    match e.record_index() {
        Some(i) => Failure::invalid(format!("line {}: {e}", table.line_of(i))),
        None => e.into(),
    }
}

fn read_primary(path: &Path) -> Result<Vec<f64>, Failure> {
    let text = read_input(path)?;
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let p: f64 = line.parse().map_err(|_| {
            Failure::invalid(format!(
                "{}: line {}: {line:?} is not a number",
                path.display(),
                k + 1
            ))
        })?;
        if !(p > 0.0 && p <= 1.0) {
            return Err(Failure::invalid(format!(
                "{}: line {}: p-value {p} outside (0, 1]",
                path.display(),
                k + 1
            )));
        }
        out.push(p);
    }
    Ok(out)
}

fn config(args: &Args) -> Result<AnalysisConfig, Failure> {
    let cfg = AnalysisConfig::new(args.m, args.l00, args.c2)?;
    match (args.method, args.t) {
        (Method::FdrThresholdDep, Some(t)) => Ok(cfg.with_threshold(t)?),
        (Method::FdrThresholdDep, None) => {
            Err(Failure::usage("--method fdr-threshold-dep needs --t"))
        }
        (_, Some(_)) => Err(Failure::usage(
            "--t only applies to --method fdr-threshold-dep",
        )),
        (_, None) => Ok(cfg),
    }
}

fn refine(
    args: &Args,
    data: &Dataset,
    cfg: &AnalysisConfig,
    q: f64,
) -> Result<Refinement, Failure> {
    let rest;
    let ctx = if let Some(path) = &args.primary_pvalues {
        rest = read_primary(path)?;
        Some(PrimaryContext::NonFollowed(&rest))
    } else if args.assume_padded {
        Some(PrimaryContext::PadWithOnes)
    } else {
        None
    };
    let refined = refine_for_replicability(data, cfg, q, ctx)?;
    if refined.padded {
        eprintln!("note: {}", Refinement::PADDING_CAVEAT);
    }
    eprintln!(
        "note: refinement at q = {q} kept {} of {} followed-up features",
        refined.kept.len(),
        data.r1()
    );
    Ok(refined)
}

pub fn run(args: Args) -> Result<(), Failure> {
    if args.primary_pvalues.is_some() && args.refine_q.is_none() {
        return Err(Failure::usage("--primary-pvalues needs --refine-q"));
    }
    let cfg = config(&args)?;
    let text = read_input(&args.input)?;
    let table = InputTable::parse(&text, None)?;
    let options = ValidateOptions {
        clamp_zero: args.clamp_zero,
    };
    let records = table.records()?;
    let mut data =
        Dataset::validate_with(records, &cfg, options).map_err(|e| at_line(&table, e))?;
    let mut table = table;
    if let Some(q) = args.refine_q {
        let refined = refine(&args, &data, &cfg, q)?;
        table = table.select_rows(&refined.kept);
        data = refined.dataset;
    }

    let report = rvalues(&data, &cfg, args.method).map_err(|e| at_line(&table, e))?;
    let replicated = match args.q {
        Some(q) => {
            if !(q > 0.0 && q < 1.0) {
                return Err(Failure::invalid(format!("q = {q} must lie in (0, 1)")));
            }
            Some(replicated_at(&data, &cfg, args.method, q)?)
        }
        None => None,
    };
    let combiner = match args.meta {
        Meta::Fisher => Some(Combiner::Fisher),
        Meta::Stouffer => Some(Combiner::Stouffer),
        Meta::None => None,
    };

    let mut headers = table.headers.clone();
    headers.push("r_value".into());
    if let Some(c) = combiner {
        headers.push(c.column_name().into());
    }
    if replicated.is_some() {
        headers.push("replicated".into());
    }
    let digits = args.digits;
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .zip(data.records())
        .zip(&report.entries)
        .enumerate()
        .map(|(k, ((row, rec), entry))| {
            let mut row = row.clone();
            row.push(format!("{:.digits$}", entry.r_value));
            if let Some(c) = combiner {
                row.push(scientific(meta_p(rec.p1, rec.p2, c)));
            }
            if let Some(set) = &replicated {
                row.push(
                    if set.binary_search(&k).is_ok() {
                        "yes"
                    } else {
                        "no"
                    }
                    .into(),
                );
            }
            row
        })
        .collect();

    let delimiter = match args.format {
        Some(Format::Tsv) => b'\t',
        Some(Format::Csv) => b',',
        None => table.delimiter,
    };
    write_output(
        args.out.as_ref(),
        &write_delimited(&headers, &rows, delimiter),
    )
}
