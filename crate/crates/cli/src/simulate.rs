use std::path::{Path, PathBuf};

use repval::simulation::{
    compare_baseline, estimate, metrics_csv_line, parse_grid, SimulationScenario,
    METRICS_CSV_HEADER,
};

use crate::{read_input, write_output, Failure};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Scenario file (TOML); flags below override its values.
    #[arg(long)]
    pub scenario: Option<PathBuf>,

    #[arg(long)]
    pub id: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub f00: Option<f64>,
    #[arg(long)]
    pub f01: Option<f64>,
    #[arg(long)]
    pub f10: Option<f64>,
    #[arg(long)]
    pub f11: Option<f64>,
    /// Power of a single primary test at the calibration level.
    #[arg(long)]
    pub pi1: Option<f64>,
    /// Power of a single follow-up test at the calibration level.
    #[arg(long)]
    pub pi2: Option<f64>,
    #[arg(long)]
    pub l00: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Equicorrelated primary-study noise in blocks of this size.
    #[arg(long)]
    pub block_size: Option<usize>,
    #[arg(long)]
    pub rho: Option<f64>,

    /// Sweep c2 over start:stop:step.
    #[arg(long, value_name = "GRID")]
    pub c2_grid: Option<String>,

    /// Sweep l00 over start:stop:step.
    #[arg(long, value_name = "GRID")]
    pub l00_grid: Option<String>,

    /// Also run BH on maximum p-values on the same draws.
    #[arg(long)]
    pub compare_baseline: bool,

    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn scenario(args: &Args) -> Result<SimulationScenario, Failure> {
    let mut s = match &args.scenario {
        Some(path) => toml_scenario(path)?,
        None => SimulationScenario::default(),
    };
    macro_rules! set {
        ($($field:ident),*) => {
            $(if let Some(v) = args.$field.clone() { s.$field = v; })*
        };
    }
    set!(id, seed, reps, m, f00, f01, f10, f11, pi1, pi2, l00, c2, q, block_size, rho);
    s.validate()?;
    Ok(s)
}

fn toml_scenario(path: &Path) -> Result<SimulationScenario, Failure> {
    let text = read_input(path)?;
    // validation happens after the flag overrides are applied
    toml::from_str(&text)
        .map_err(|e| Failure::invalid(format!("{}: {}", path.display(), e.message())))
}

fn grid(text: &Option<String>, current: f64) -> Result<Vec<f64>, Failure> {
    match text {
        Some(g) => parse_grid(g).map_err(|e| Failure::usage(e.to_string())),
        None => Ok(vec![current]),
    }
}

pub fn run(args: Args) -> Result<(), Failure> {
    let base = scenario(&args)?;
    let mut out = String::from(METRICS_CSV_HEADER);
    out.push('\n');
    for l00 in grid(&args.l00_grid, base.l00)? {
        for c2 in grid(&args.c2_grid, base.c2)? {
            let scn = SimulationScenario {
                l00,
                c2,
                ..base.clone()
            };
            scn.validate()?;
            if args.compare_baseline {
                let cmp = compare_baseline(&scn)?;
                for (label, m) in [("rvalue", &cmp.rvalue), ("max-p-bh", &cmp.max_p)] {
                    out.push_str(&metrics_csv_line(&format!("{}/{label}", scn.id), &scn, m));
                    out.push('\n');
                }
            } else {
                let m = estimate(&scn)?;
                out.push_str(&metrics_csv_line(&scn.id, &scn, &m));
                out.push('\n');
            }
        }
    }
    write_output(args.out.as_ref(), &out)
}
