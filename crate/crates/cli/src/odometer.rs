use clap::{Args, Subcommand};
use toeplitz_core::{Odometer, OdometerElement};

use crate::report::{Config, Report};

#[derive(Args)]
pub struct OdometerArgs {
    /// Divisibility chain n_1 | n_2 | ..., comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    moduli: Vec<u64>,
    #[command(subcommand)]
    op: Op,
}

/// Elements are written as coordinate vectors "(a_1, ..., a_D)" or as an
/// integer k, meaning g^k applied to zero.
#[derive(Subcommand)]
enum Op {
    /// Image of an integer under k -> g^k(0).
    FromInteger {
        #[arg(allow_hyphen_values = true)]
        k: i64,
    },
    /// Sum of two elements, each a coordinate vector or an integer.
    Add { a: String, b: String },
    /// Additive inverse.
    Neg { a: String },
    /// Apply g, or g^times.
    Step {
        a: String,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        times: i64,
    },
    /// Natural distance 1/m, m the first level where the coordinates differ.
    Distance { a: String, b: String },
    /// Check that the cylinders of one level form a periodic partition.
    Partition {
        level: usize,
        #[arg(long, default_value_t = 0)]
        base: u64,
    },
}

pub fn run(args: &OdometerArgs, depth: Option<usize>, config: &mut Config) -> Result<Report, String> {
    let mut moduli = args.moduli.clone();
    if let Some(d) = depth {
        if d > moduli.len() {
            return Err(format!("--depth {d} exceeds the {} supplied moduli", moduli.len()));
        }
        moduli.truncate(d);
    }
    config.depth = moduli.len();
    let od = Odometer::from_moduli(moduli).map_err(|e| e.to_string())?;
    let parse = |s: &str| od.parse(s).map_err(|e| e.to_string());

    let mut report = Report::new("odometer");
    report.result("moduli", od.moduli());
    let element = |report: &mut Report, op: &'static str, a: &OdometerElement| {
        report.line(a.to_string());
        report.result("op", op);
        report.result("element", a.to_string());
        report.result("coords", a);
    };
    match &args.op {
        Op::FromInteger { k } => element(&mut report, "from_integer", &od.from_integer(*k)),
        Op::Add { a, b } => {
            let sum = parse(a)?.add(&parse(b)?).map_err(|e| e.to_string())?;
            element(&mut report, "add", &sum);
        }
        Op::Neg { a } => element(&mut report, "neg", &parse(a)?.neg()),
        Op::Step { a, times } => element(&mut report, "step", &parse(a)?.step_by(*times)),
        Op::Distance { a, b } => {
            let d = parse(a)?.natural_distance(&parse(b)?).map_err(|e| e.to_string())?;
            report.line(d.to_string());
            report.result("op", "distance");
            report.result("distance", d.to_string());
        }
        Op::Partition { level, base } => {
            let v = od.verify_partition(*level, *base).map_err(|e| e.to_string())?;
            report.line(format!(
                "level {level}: {} classes of {} elements, clopen {}, cyclic {}, disjoint {}, covering {}, isometry {}",
                v.length, v.class_size, v.clopen, v.cyclic, v.disjoint, v.covering, v.isometry
            ));
            for c in &v.counterexamples {
                report.line(format!("  {c}"));
            }
            report.result("op", "partition");
            report.check("partition", v.passed());
            report.result("partition", &v);
        }
    }
    Ok(report)
}
