//! Subcommand implementations.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::Path;

use chatgraph::chatlog::{parse_log, write_log, ChannelIndex};
use chatgraph::error::{Error, Result};
use chatgraph::evaluate::{run_experiment, write_metrics_csv, write_pr_csv, ExperimentReport};
use chatgraph::features::{featurize_corpus_with_progress, read_targets, write_targets, Dataset};
use chatgraph::graph::ConversationGraph;
use chatgraph::learn::{ablation_run, fold_importance, train, AblationPoint, ImportanceReport};
use chatgraph::measures::measure_report;
use chatgraph::netextract::extract_all;
use chatgraph::svg::{line_plot, Series};
use chatgraph::synth::generate;
use chatgraph::util::fmt_f64;

use crate::config::RunConfig;

pub fn load_channels(path: &Path) -> Result<Vec<ChannelIndex>> {
    parse_log(BufReader::new(File::open(path)?))
}

fn find_channel<'a>(
    channels: &'a [ChannelIndex],
    name: &str,
    seq: u64,
) -> Result<&'a ChannelIndex> {
    channels
        .iter()
        .find(|c| c.channel() == name)
        .ok_or_else(|| Error::UnknownTarget {
            channel: name.to_string(),
            seq,
        })
}

pub fn write_run_config(out_dir: &Path, cfg: &RunConfig) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("run_config"), cfg.to_toml())?;
    Ok(())
}

pub fn cmd_extract(
    cfg: &RunConfig,
    log: &Path,
    channel: &str,
    target_seq: u64,
    out_dir: &Path,
) -> Result<()> {
    let channels = load_channels(log)?;
    let channel = find_channel(&channels, channel, target_seq)?;
    let triple = extract_all(channel, target_seq, &cfg.extraction())?;
    fs::create_dir_all(out_dir)?;
    for (name, graph) in [
        ("before.csv", &triple.before),
        ("after.csv", &triple.after),
        ("full.csv", &triple.full),
    ] {
        graph.write_csv(BufWriter::new(File::create(out_dir.join(name))?))?;
    }
    write_run_config(out_dir, cfg)?;
    println!(
        "extracted before/after/full around {}#{target_seq}: {} / {} / {} vertices",
        channel.channel(),
        triple.before.vertex_count(),
        triple.after.vertex_count(),
        triple.full.vertex_count()
    );
    Ok(())
}

pub fn cmd_measures(graph_path: &Path, out: &Path) -> Result<()> {
    let graph = ConversationGraph::read_csv(BufReader::new(File::open(graph_path)?))?;
    let rows = measure_report(&graph);
    let mut w = csv::Writer::from_path(out)?;
    w.write_record(["measure", "value"])?;
    for (name, value) in rows {
        w.write_record([name.as_str(), &fmt_f64(value)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_featurize(cfg: &RunConfig, log: &Path, targets: &Path, out: &Path) -> Result<()> {
    let channels = load_channels(log)?;
    let target_list = read_targets(BufReader::new(File::open(targets)?))?;
    let data = featurize_targets(cfg, &channels, &target_list)?;
    data.write_csv(BufWriter::new(File::create(out)?))?;
    println!("featurized {} targets -> {}", data.len(), out.display());
    Ok(())
}

pub fn featurize_targets(
    cfg: &RunConfig,
    channels: &[ChannelIndex],
    targets: &[chatgraph::features::TargetRef],
) -> Result<Dataset> {
    let total = targets.len();
    let done = std::sync::atomic::AtomicUsize::new(0);
    featurize_corpus_with_progress(channels, targets, &cfg.extraction(), |_| {
        let k = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
        if k.is_multiple_of(100) || k == total {
            eprintln!("featurized {k}/{total}");
        }
    })
}

pub fn cmd_train(cfg: &RunConfig, features: &Path, out: &Path) -> Result<()> {
    let data = Dataset::read_csv(BufReader::new(File::open(features)?))?;
    let model = train(&data, &cfg.svm_params()?)?;
    model.save(BufWriter::new(File::create(out)?))?;
    println!(
        "trained on {} rows: {} support vectors, gamma {:.6}",
        data.len(),
        model.support_vectors.len(),
        model.gamma
    );
    Ok(())
}

pub fn cmd_evaluate(cfg: &RunConfig, features: &Path, out_dir: &Path) -> Result<()> {
    let data = Dataset::read_csv(BufReader::new(File::open(features)?))?;
    fs::create_dir_all(out_dir)?;
    let report = evaluate_to_dir(cfg, &data, out_dir)?;
    write_run_config(out_dir, cfg)?;
    print_report_summary(&report);
    Ok(())
}

pub fn evaluate_to_dir(
    cfg: &RunConfig,
    data: &Dataset,
    out_dir: &Path,
) -> Result<ExperimentReport> {
    let report = run_experiment(data, &cfg.fold_plan(), &cfg.svm_params()?)?;
    write_metrics_csv(
        &report,
        BufWriter::new(File::create(out_dir.join("metrics.csv"))?),
    )?;
    write_pr_csv(
        &report,
        BufWriter::new(File::create(out_dir.join("pr_curve.csv"))?),
    )?;
    if cfg.svg {
        fs::write(out_dir.join("pr_curve.svg"), pr_curve_svg(&report))?;
    }
    Ok(report)
}

fn print_report_summary(report: &ExperimentReport) {
    println!("protocol: {}", report.protocol);
    println!(
        "abuse-class mean: precision {:.3}, recall {:.3}, F {:.3}",
        report.mean.precision, report.mean.recall, report.mean.f_measure
    );
    println!(
        "random baseline:  precision {:.3}, recall {:.3}, F {:.3}",
        report.baseline_mean.precision, report.baseline_mean.recall, report.baseline_mean.f_measure
    );
}

pub fn cmd_ablate(cfg: &RunConfig, features: &Path, out_dir: &Path) -> Result<()> {
    let data = Dataset::read_csv(BufReader::new(File::open(features)?))?;
    fs::create_dir_all(out_dir)?;
    ablate_to_dir(cfg, &data, out_dir)?;
    write_run_config(out_dir, cfg)?;
    Ok(())
}

/// Per-run permutation importance (models and validation rows both come
/// from the training side of each fold), averaged into one ranking, then
/// the ablation curve. Importance for fold `r` draws sub-seed
/// `seed + 2*n_runs + r`.
pub fn ablate_to_dir(cfg: &RunConfig, data: &Dataset, out_dir: &Path) -> Result<()> {
    let plan = cfg.fold_plan();
    let params = cfg.svm_params()?;
    let report = fold_importance(data, &plan, &params, cfg.repeats)?;
    write_importance_csv(&report, &out_dir.join("importance.csv"))?;

    let order = report.ranking();
    let curve = ablation_run(data, &order, &plan, &params)?;
    write_ablation_csv(&curve, &out_dir.join("ablation.csv"))?;
    if cfg.svg {
        fs::write(out_dir.join("ablation.svg"), ablation_svg(&curve))?;
    }
    println!(
        "importance + ablation done: top feature '{}', full-model F {:.3}",
        report.feature_names[order[0]], curve[0].mean_f
    );
    Ok(())
}

pub fn write_importance_csv(report: &ImportanceReport, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["rank", "feature", "importance", "raw_mean_drop"])?;
    let display = report.display_scores();
    for (rank, &feature) in report.ranking().iter().enumerate() {
        w.write_record([
            (rank + 1).to_string(),
            report.feature_names[feature].clone(),
            fmt_f64(display[feature]),
            fmt_f64(report.raw[feature]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ablation_csv(curve: &[AblationPoint], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["features_remaining", "mean_f", "removed"])?;
    for point in curve {
        w.write_record([
            point.features_remaining.to_string(),
            fmt_f64(point.mean_f),
            point.removed.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_synth(cfg: &RunConfig, out_dir: &Path) -> Result<()> {
    let corpus = generate(&cfg.synth_config())?;
    fs::create_dir_all(out_dir)?;
    write_log(
        &corpus.channels,
        BufWriter::new(File::create(out_dir.join("corpus.jsonl"))?),
    )?;
    write_targets(
        &corpus.targets,
        BufWriter::new(File::create(out_dir.join("targets.csv"))?),
    )?;
    write_run_config(out_dir, cfg)?;
    let abusive = corpus.targets.iter().filter(|t| t.label).count();
    println!(
        "generated {} messages in {} channels; {} abuse + {} normal targets",
        corpus.channels.iter().map(|c| c.len()).sum::<usize>(),
        corpus.channels.len(),
        abusive,
        corpus.targets.len() - abusive
    );
    Ok(())
}

pub enum PipelineInput {
    Log {
        log: std::path::PathBuf,
        targets: std::path::PathBuf,
    },
    Synth,
}

pub fn cmd_pipeline(cfg: &RunConfig, input: PipelineInput, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    let (channels, targets) = match input {
        PipelineInput::Log { log, targets } => {
            let channels = load_channels(&log)?;
            let list = read_targets(BufReader::new(File::open(targets)?))?;
            (channels, list)
        }
        PipelineInput::Synth => {
            let corpus = generate(&cfg.synth_config())?;
            write_log(
                &corpus.channels,
                BufWriter::new(File::create(out_dir.join("corpus.jsonl"))?),
            )?;
            write_targets(
                &corpus.targets,
                BufWriter::new(File::create(out_dir.join("targets.csv"))?),
            )?;
            (corpus.channels, corpus.targets)
        }
    };
    let data = featurize_targets(cfg, &channels, &targets)?;
    data.write_csv(BufWriter::new(File::create(out_dir.join("features.csv"))?))?;
    let report = evaluate_to_dir(cfg, &data, out_dir)?;
    print_report_summary(&report);
    ablate_to_dir(cfg, &data, out_dir)?;
    write_run_config(out_dir, cfg)?;
    println!("pipeline reports written to {}", out_dir.display());
    Ok(())
}

fn pr_curve_svg(report: &ExperimentReport) -> String {
    let run_points: Vec<Vec<(f64, f64)>> = report
        .runs
        .iter()
        .map(|r| r.pr.iter().map(|p| (p.recall, p.precision)).collect())
        .collect();
    let mean_points: Vec<(f64, f64)> = report
        .mean_pr
        .iter()
        .map(|p| (p.recall, p.precision))
        .collect();
    let mut series: Vec<Series<'_>> = run_points
        .iter()
        .map(|pts| Series {
            points: pts,
            color: "#999999",
            width: 1.0,
        })
        .collect();
    series.push(Series {
        points: &mean_points,
        color: "#cc0000",
        width: 2.0,
    });
    line_plot("Precision-Recall per run", "recall", "precision", &series)
}

fn ablation_svg(curve: &[AblationPoint]) -> String {
    let total = curve.first().map_or(0, |p| p.features_remaining);
    let points: Vec<(f64, f64)> = curve
        .iter()
        .map(|p| ((total - p.features_remaining) as f64, p.mean_f))
        .collect();
    let series = [Series {
        points: &points,
        color: "#cc0000",
        width: 2.0,
    }];
    line_plot(
        "Feature ablation",
        "features removed",
        "mean F-measure",
        &series,
    )
}
