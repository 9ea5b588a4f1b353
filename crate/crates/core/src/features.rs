//! Fixed-layout feature vectors for target messages.
//!
//! Each target yields 75 values: for each graph in Before, After, Full
//! order, the 9 local measures of the target vertex, the 7 scalar global
//! measures, then the 9 averaged local measures. The layout is frozen so
//! model files stay valid across runs; names use the dotted
//! "graph.measure" form, e.g. `after.edge_count`.

use std::collections::HashMap;
use std::io::{BufRead, Read, Write};

use crate::chatlog::ChannelIndex;
use crate::error::{Error, Result};
use crate::measures::{block_names, feature_block};
use crate::netextract::{extract_all, ExtractionConfig, SliceKind};
use crate::par;
use crate::util::fmt_f64;

pub const NUM_FEATURES: usize = 75;

const GRAPH_ORDER: [SliceKind; 3] = [SliceKind::Before, SliceKind::After, SliceKind::Full];

/// The 75 canonical feature names, in layout order.
pub fn feature_names() -> Vec<String> {
    let block = block_names();
    GRAPH_ORDER
        .iter()
        .flat_map(|kind| {
            block
                .iter()
                .map(move |name| format!("{}.{name}", kind.label()))
        })
        .collect()
}

/// One featurized target message.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub message_id: String,
    pub label: bool,
    pub values: Vec<f64>,
}

/// A table of feature vectors sharing the canonical layout.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub rows: Vec<FeatureVector>,
}

impl Dataset {
    pub fn new(rows: Vec<FeatureVector>) -> Self {
        Dataset {
            feature_names: feature_names(),
            rows,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn width(&self) -> usize {
        self.feature_names.len()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.rows.iter().map(|r| r.label).collect()
    }

    /// Row subset in the given index order.
    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        Dataset {
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// Column subset in the given feature-index order.
    pub fn select_columns(&self, columns: &[usize]) -> Dataset {
        Dataset {
            feature_names: columns
                .iter()
                .map(|&c| self.feature_names[c].clone())
                .collect(),
            rows: self
                .rows
                .iter()
                .map(|r| FeatureVector {
                    message_id: r.message_id.clone(),
                    label: r.label,
                    values: columns.iter().map(|&c| r.values[c]).collect(),
                })
                .collect(),
        }
    }

    /// CSV with header `message_id,label,<feature names>`; label is 0/1 and
    /// floats carry 17 significant digits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["message_id".to_string(), "label".to_string()];
        header.extend(self.feature_names.iter().cloned());
        w.write_record(&header)?;
        for row in &self.rows {
            let mut record = vec![
                row.message_id.clone(),
                if row.label { "1" } else { "0" }.to_string(),
            ];
            record.extend(row.values.iter().map(|&v| fmt_f64(v)));
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Dataset> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        if header.len() < 3 || &header[0] != "message_id" || &header[1] != "label" {
            return Err(Error::GraphFormat(
                "feature CSV must start with message_id,label".into(),
            ));
        }
        let feature_names: Vec<String> = header.iter().skip(2).map(str::to_string).collect();
        let mut rows = Vec::new();
        for record in r.records() {
            let record = record?;
            if record.len() != feature_names.len() + 2 {
                return Err(Error::DimensionMismatch {
                    expected: feature_names.len() + 2,
                    got: record.len(),
                });
            }
            let label = match &record[1] {
                "1" | "true" => true,
                "0" | "false" => false,
                other => return Err(Error::GraphFormat(format!("bad label '{other}'"))),
            };
            let values = record
                .iter()
                .skip(2)
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| Error::GraphFormat(format!("bad float '{f}'")))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(FeatureVector {
                message_id: record[0].to_string(),
                label,
                values,
            });
        }
        Ok(Dataset {
            feature_names,
            rows,
        })
    }
}

/// A reference to one target message in a corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetRef {
    pub channel: String,
    pub seq: u64,
    pub label: bool,
}

/// Read a `channel,seq,label` target list.
pub fn read_targets<R: BufRead>(reader: R) -> Result<Vec<TargetRef>> {
    let mut r = csv::Reader::from_reader(reader);
    let mut targets = Vec::new();
    for record in r.records() {
        let record = record?;
        if record.len() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: record.len(),
            });
        }
        let seq: u64 = record[1]
            .parse()
            .map_err(|_| Error::GraphFormat(format!("bad seq '{}'", &record[1])))?;
        let label = match &record[2] {
            "1" | "true" => true,
            "0" | "false" => false,
            other => return Err(Error::GraphFormat(format!("bad label '{other}'"))),
        };
        targets.push(TargetRef {
            channel: record[0].to_string(),
            seq,
            label,
        });
    }
    Ok(targets)
}

pub fn write_targets<W: Write>(targets: &[TargetRef], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["channel", "seq", "label"])?;
    for t in targets {
        w.write_record([
            t.channel.as_str(),
            &t.seq.to_string(),
            if t.label { "1" } else { "0" },
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Featurize one target: extract the three graphs and measure each. The
/// label is copied from the message itself.
pub fn featurize(
    channel: &ChannelIndex,
    target_seq: u64,
    cfg: &ExtractionConfig,
) -> Result<FeatureVector> {
    let graphs = extract_all(channel, target_seq, cfg)?;
    let message = channel
        .get(target_seq)
        .expect("target checked by extract_all");
    let mut values = Vec::with_capacity(NUM_FEATURES);
    for kind in GRAPH_ORDER {
        values.extend_from_slice(&feature_block(graphs.get(kind)));
    }
    debug_assert!(
        values.iter().all(|v| v.is_finite()),
        "non-finite feature value"
    );
    Ok(FeatureVector {
        message_id: message.id.clone(),
        label: message.abusive,
        values,
    })
}

/// Featurize a whole target list, in input order. Rows are computed in
/// parallel; any unresolvable target aborts the run.
pub fn featurize_corpus(
    channels: &[ChannelIndex],
    targets: &[TargetRef],
    cfg: &ExtractionConfig,
) -> Result<Dataset> {
    featurize_corpus_with_progress(channels, targets, cfg, |_| {})
}

/// As [`featurize_corpus`]; `progress` is invoked with each completed row
/// index (possibly out of order under parallel execution).
pub fn featurize_corpus_with_progress<F>(
    channels: &[ChannelIndex],
    targets: &[TargetRef],
    cfg: &ExtractionConfig,
    progress: F,
) -> Result<Dataset>
where
    F: Fn(usize) + Sync + Send,
{
    let by_name: HashMap<&str, &ChannelIndex> = channels.iter().map(|c| (c.channel(), c)).collect();
    let rows = par::try_map_indexed(targets, |i, target| {
        let channel = by_name
            .get(target.channel.as_str())
            .ok_or_else(|| Error::UnknownTarget {
                channel: target.channel.clone(),
                seq: target.seq,
            })?;
        let row = featurize(channel, target.seq, cfg)?;
        progress(i);
        Ok(row)
    })?;
    Ok(Dataset::new(rows))
}

/// Strictly sequential variant, used by the benchmarks as the baseline.
pub fn featurize_corpus_seq(
    channels: &[ChannelIndex],
    targets: &[TargetRef],
    cfg: &ExtractionConfig,
) -> Result<Dataset> {
    let by_name: HashMap<&str, &ChannelIndex> = channels.iter().map(|c| (c.channel(), c)).collect();
    let rows = targets
        .iter()
        .map(|target| {
            let channel =
                by_name
                    .get(target.channel.as_str())
                    .ok_or_else(|| Error::UnknownTarget {
                        channel: target.channel.clone(),
                        seq: target.seq,
                    })?;
            featurize(channel, target.seq, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset::new(rows))
}
