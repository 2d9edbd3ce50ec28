use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::benchmarks::{group_deltas, relative_delta, Aggregation, BenchmarkTable};
use super::cost::{estimate_memory, scaling_efficiency, tokens_per_parameter, TrainRunSpec};
use super::loss::{loss_gap, LossCurve};
use super::svg::{line_chart, Series};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ReportInputs {
    pub table: BenchmarkTable,
    pub curves: Vec<LossCurve>,
    /// Training runs in order; the first is the base for scaling efficiency.
    pub runs: Vec<TrainRunSpec>,
    pub model_params: u64,
    pub svg: bool,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| csv_err(path, e))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Invalid(format!("{}: {other:?}", path.display())),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes `report.txt`, `table1.csv`, `efficiency.csv`, `loss.csv` (when any
/// curve is present) and, optionally, SVG charts. Output is a pure function
/// of the inputs.
pub fn emit_report(inputs: &ReportInputs, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let table = &inputs.table;
    table.validate()?;
    let benchmarks = table.benchmarks();
    let rows = table.ordered_rows();
    let base = &table.rows[&table.base];
    let base_avg = table.row_average(&table.base)?;
    let mut written = Vec::new();
    let mut txt = String::new();

    // table1.csv
    let path = out_dir.join("table1.csv");
    {
        let mut w = csv_writer(&path)?;
        let mut header = vec!["row".to_string(), "tokens".to_string()];
        header.extend(benchmarks.iter().map(|b| b.to_string()));
        header.push("avg".into());
        w.write_record(&header).map_err(|e| csv_err(&path, e))?;
        for (label, row) in &rows {
            let mut rec = vec![label.to_string(), row.tokens.to_string()];
            rec.extend(benchmarks.iter().map(|b| format!("{:.4}", row.scores[*b])));
            rec.push(format!("{:.4}", table.row_average(label)?));
            w.write_record(&rec).map_err(|e| csv_err(&path, e))?;
        }
        for (label, row) in &rows {
            let mut rec = vec![format!("delta_pct:{label}"), row.tokens.to_string()];
            for b in &benchmarks {
                rec.push(format!("{:.2}", relative_delta(base.scores[*b], row.scores[*b])?));
            }
            rec.push(format!("{:.2}", relative_delta(base_avg, table.row_average(label)?)?));
            w.write_record(&rec).map_err(|e| csv_err(&path, e))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
    }
    written.push(path);

    let _ = writeln!(txt, "Benchmark table (base row: {})", table.base);
    let _ = write!(txt, "{:<12}{:>14}", "row", "tokens");
    for b in &benchmarks {
        let _ = write!(txt, "{:>15}", b);
    }
    let _ = writeln!(txt, "{:>9}", "avg");
    for (label, row) in &rows {
        let _ = write!(txt, "{:<12}{:>14}", label, row.tokens);
        for b in &benchmarks {
            let d = relative_delta(base.scores[*b], row.scores[*b])?;
            let _ = write!(txt, "{:>15}", format!("{:.4} ({:+.1}%)", row.scores[*b], d));
        }
        let _ = writeln!(txt, "{:>9.4}", table.row_average(label)?);
    }

    // efficiency.csv
    let deltas: Vec<_> = Aggregation::ALL
        .iter()
        .map(|&m| group_deltas(table, m).map(|d| (m, d)))
        .collect::<Result<_>>()?;
    let path = out_dir.join("efficiency.csv");
    {
        let mut w = csv_writer(&path)?;
        let mut header = vec!["row".to_string(), "tokens".into(), "tokens_per_parameter".into()];
        for group in table.groups.keys() {
            for (m, _) in &deltas {
                header.push(format!("{group}_{}", m.name()));
            }
        }
        w.write_record(&header).map_err(|e| csv_err(&path, e))?;
        for (label, row) in &rows {
            let mut rec = vec![
                label.to_string(),
                row.tokens.to_string(),
                format!("{:.4}", tokens_per_parameter(row.tokens, inputs.model_params)?),
            ];
            for group in table.groups.keys() {
                for (_, d) in &deltas {
                    rec.push(format!("{:.4}", d[group][*label]));
                }
            }
            w.write_record(&rec).map_err(|e| csv_err(&path, e))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
    }
    written.push(path);

    let _ = writeln!(txt, "\nGroup deltas vs base (percent), model size {} parameters", inputs.model_params);
    for (m, d) in &deltas {
        for (group, per_row) in d {
            let _ = write!(txt, "  {:<28}", format!("{group} [{}]", m.name()));
            for (label, v) in per_row {
                let _ = write!(txt, "  {label}: {v:+.2}");
            }
            let _ = writeln!(txt);
        }
    }
    let _ = writeln!(txt, "\nTokens per parameter");
    for (label, row) in &rows {
        let _ = writeln!(
            txt,
            "  {label}: {:.2}",
            tokens_per_parameter(row.tokens, inputs.model_params)?
        );
    }

    // loss.csv
    let _ = writeln!(txt, "\nLoss curves");
    let nonempty: Vec<&LossCurve> = inputs.curves.iter().filter(|c| !c.points.is_empty()).collect();
    if nonempty.is_empty() {
        let _ = writeln!(txt, "  no loss curves supplied; loss.csv not written");
    } else {
        let path = out_dir.join("loss.csv");
        let mut w = csv_writer(&path)?;
        w.write_record(["curve", "step", "loss"]).map_err(|e| csv_err(&path, e))?;
        for c in &nonempty {
            for (step, loss) in &c.points {
                w.write_record([c.label.as_str(), &step.to_string(), &format!("{loss}")])
                    .map_err(|e| csv_err(&path, e))?;
            }
            let _ = writeln!(txt, "  {}: final loss {:.4}", c.label, c.final_loss().unwrap());
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        written.push(path);
        for pair in nonempty.windows(2) {
            let g = loss_gap(pair[0], pair[1])?;
            let _ = writeln!(
                txt,
                "  gap {} vs {}: {:.2}% lower final loss",
                pair[0].label, pair[1].label, g.relative_gap_percent
            );
        }
    }

    let _ = writeln!(txt, "\nTraining runs (model-state memory only; activations and buffers excluded)");
    if inputs.runs.is_empty() {
        let _ = writeln!(txt, "  none");
    }
    for run in &inputs.runs {
        let m = estimate_memory(run)?;
        let _ = writeln!(
            txt,
            "  {}: {} params on {} GPU(s), {:.3} GB/GPU on device, {:.3} GB host total",
            if run.label.is_empty() { "run" } else { &run.label },
            run.params,
            run.world_size,
            m.gpu_bytes_per_rank / 1e9,
            m.host_bytes_total / 1e9
        );
    }
    if let Some(base_run) = inputs.runs.first() {
        for run in &inputs.runs[1..] {
            let e = scaling_efficiency(base_run, run)?;
            let _ = writeln!(
                txt,
                "  scaling {} -> {}: {:.0} -> {:.0} tokens/GPU-hour, efficiency {:.4}",
                base_run.label, run.label, e.base_tokens_per_gpu_hour, e.scaled_tokens_per_gpu_hour, e.efficiency
            );
        }
    }

    if inputs.svg {
        let series: Vec<Series> = table
            .groups
            .keys()
            .map(|group| Series {
                name: group,
                points: rows
                    .iter()
                    .map(|(label, row)| (row.tokens as f64 / 1e6, deltas[0].1[group][*label]))
                    .collect(),
            })
            .collect();
        let path = out_dir.join("efficiency.svg");
        write_file(&path, &line_chart("Group delta vs base (ratio of means)", "tokens (millions)", "delta (%)", &series))?;
        written.push(path);
        if !nonempty.is_empty() {
            let series: Vec<Series> = nonempty
                .iter()
                .map(|c| Series {
                    name: &c.label,
                    points: c.points.iter().map(|&(s, l)| (s as f64, l)).collect(),
                })
                .collect();
            let path = out_dir.join("loss.svg");
            write_file(&path, &line_chart("Training loss", "step", "loss", &series))?;
            written.push(path);
        }
    }

    let path = out_dir.join("report.txt");
    write_file(&path, &txt)?;
    written.push(path);
    Ok(written)
}
