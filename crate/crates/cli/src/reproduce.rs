use std::path::Path;

use anyhow::Result;
use clap::{Args, ValueEnum};
use hsd_core::clustering::{IterationRecord, KMeansResult};
use hsd_core::io::{write_labels_to, write_points_to};
use hsd_core::reproduce::{
    bell_table, clusters_demo, separable_table, werner_grid, werner_horodecki_grid, DistanceTable, GridEntry,
    TwoGaussians, GRID_POINTS,
};
use hsd_core::NoiseModel;
use serde::Serialize;

use crate::output::{csv_bytes, json_bytes, num, write_file};
use crate::Common;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub target: Target,
    /// Points per grid axis.
    #[arg(long, default_value_t = GRID_POINTS)]
    pub grid: usize,
    /// Points in the clustering demo.
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    #[value(alias = "bell_table")]
    BellTable,
    #[value(alias = "separable_table")]
    SeparableTable,
    #[value(alias = "werner_grid")]
    WernerGrid,
    #[value(alias = "werner_horodecki_grid")]
    WernerHorodeckiGrid,
    #[value(alias = "clusters_demo")]
    ClustersDemo,
    All,
}

impl Target {
    const EACH: [Target; 5] =
        [Target::BellTable, Target::SeparableTable, Target::WernerGrid, Target::WernerHorodeckiGrid, Target::ClustersDemo];

    fn name(self) -> &'static str {
        match self {
            Target::BellTable => "bell_table",
            Target::SeparableTable => "separable_table",
            Target::WernerGrid => "werner_grid",
            Target::WernerHorodeckiGrid => "werner_horodecki_grid",
            Target::ClustersDemo => "clusters_demo",
            Target::All => "all",
        }
    }
}

#[derive(Serialize)]
struct Manifest {
    schema_version: u32,
    targets: Vec<&'static str>,
    seed: u64,
    noise: NoiseModel,
    grid_points: usize,
    demo_points: usize,
    files: Vec<String>,
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl Writer<'_> {
    fn put(&mut self, name: String, bytes: &[u8]) -> Result<()> {
        write_file(self.dir, &name, bytes)?;
        self.files.push(name);
        Ok(())
    }
}

fn matrix_csv(t: &DistanceTable, values: &[Vec<f64>]) -> Result<Vec<u8>> {
    let mut header = vec!["state"];
    header.extend(t.labels.iter().map(String::as_str));
    let rows: Vec<Vec<String>> = t
        .labels
        .iter()
        .zip(values)
        .map(|(label, row)| std::iter::once(label.clone()).chain(row.iter().map(|&v| num(v))).collect())
        .collect();
    csv_bytes(&header, &rows)
}

fn write_table(w: &mut Writer, stem: &str, t: &DistanceTable, noise: &NoiseModel) -> Result<()> {
    w.put(format!("{stem}.csv"), &matrix_csv(t, &t.exact)?)?;
    if !noise.is_exact() {
        w.put(format!("{stem}_measured.csv"), &matrix_csv(t, &t.measured)?)?;
        w.put(format!("{stem}_std_error.csv"), &matrix_csv(t, &t.std_error)?)?;
    }
    Ok(())
}

fn write_grid(w: &mut Writer, stem: &str, axes: [&str; 2], grid: &[GridEntry]) -> Result<()> {
    let closed = grid.first().is_some_and(|e| e.d2_closed_form.is_some());
    let mut header = vec![axes[0], axes[1], "d2_exact", "d2_overlaps"];
    if closed {
        header.push("d2_closed_form");
    }
    header.extend(["d2_measured", "std_error"]);
    let rows: Vec<Vec<String>> = grid
        .iter()
        .map(|e| {
            let mut row = vec![num(e.x), num(e.y), num(e.d2_exact), num(e.d2_overlaps)];
            row.extend(e.d2_closed_form.map(num));
            row.extend([num(e.d2_measured), num(e.std_error)]);
            row
        })
        .collect();
    w.put(format!("{stem}.csv"), &csv_bytes(&header, &rows)?)
}

#[derive(Serialize)]
struct RunSummary<'a> {
    iterations: usize,
    converged: bool,
    cost: f64,
    centroids: Vec<&'a [f64]>,
    trace: &'a [IterationRecord],
}

impl<'a> From<&'a KMeansResult> for RunSummary<'a> {
    fn from(r: &'a KMeansResult) -> Self {
        RunSummary {
            iterations: r.iterations,
            converged: r.converged,
            cost: r.cost,
            centroids: r.model.centroids.iter().map(|c| c.components()).collect(),
            trace: &r.trace,
        }
    }
}

#[derive(Serialize)]
struct DemoTrace<'a> {
    schema_version: u32,
    seed: u64,
    generator: TwoGaussians,
    euclidean: RunSummary<'a>,
    hsd_exact: RunSummary<'a>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hsd_simulated: Option<RunSummary<'a>>,
}

fn write_demo(w: &mut Writer, args: &ReproduceArgs, common: &Common, noise: &NoiseModel) -> Result<()> {
    let demo = clusters_demo(args.points, common.seed, noise, args.max_iter)?;
    let coords: Vec<Vec<f64>> = demo.points.iter().map(|p| p.components().to_vec()).collect();
    let mut points = Vec::new();
    write_points_to(&mut points, &coords)?;
    w.put("clusters_demo_points.csv".into(), &points)?;

    let mut columns: Vec<(&str, &[usize])> = vec![
        ("source", &demo.source),
        ("euclidean", &demo.euclidean.assignment.labels),
        ("hsd_exact", &demo.hsd_exact.assignment.labels),
    ];
    if let Some(sim) = &demo.hsd_simulated {
        columns.push(("hsd_simulated", &sim.assignment.labels));
    }
    let mut labels = Vec::new();
    write_labels_to(&mut labels, &columns)?;
    w.put("clusters_demo_labels.csv".into(), &labels)?;

    let trace = DemoTrace {
        schema_version: MANIFEST_SCHEMA_VERSION,
        seed: common.seed,
        generator: demo.generator,
        euclidean: (&demo.euclidean).into(),
        hsd_exact: (&demo.hsd_exact).into(),
        hsd_simulated: demo.hsd_simulated.as_ref().map(Into::into),
    };
    w.put("clusters_demo_trace.json".into(), &json_bytes(&trace)?)
}

pub fn run(args: &ReproduceArgs, common: &Common) -> Result<()> {
    let dir = common
        .out_dir
        .as_ref()
        .ok_or_else(|| hsd_core::Error::InvalidInput("reproduce needs --out-dir".into()))?;
    if args.grid < 2 {
        return Err(hsd_core::Error::InvalidInput(format!("--grid must be at least 2, got {}", args.grid)).into());
    }
    let noise = common.noise();
    noise.validate()?;
    let targets: Vec<Target> = if args.target == Target::All { Target::EACH.to_vec() } else { vec![args.target] };

    let mut w = Writer { dir, files: Vec::new() };
    for &target in &targets {
        let sub = noise.child(target as u64);
        match target {
            Target::BellTable => write_table(&mut w, target.name(), &bell_table(&sub)?, &noise)?,
            Target::SeparableTable => write_table(&mut w, target.name(), &separable_table(&sub)?, &noise)?,
            Target::WernerGrid => write_grid(&mut w, target.name(), ["p_x", "p_y"], &werner_grid(args.grid, &sub)?)?,
            Target::WernerHorodeckiGrid => {
                write_grid(&mut w, target.name(), ["p", "q"], &werner_horodecki_grid(args.grid, &sub)?)?
            }
            Target::ClustersDemo => write_demo(&mut w, args, common, &sub)?,
            Target::All => unreachable!(),
        }
    }

    let manifest = Manifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        targets: targets.iter().map(|t| t.name()).collect(),
        seed: common.seed,
        noise,
        grid_points: args.grid,
        demo_points: args.points,
        files: w.files.clone(),
    };
    w.put("manifest.json".into(), &json_bytes(&manifest)?)
}
