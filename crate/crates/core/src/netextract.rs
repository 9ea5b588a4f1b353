//! Conversational-network extraction around a target message.
//!
//! A context period centered on the target is sliced out of the channel, a
//! fixed-size window slides over it one message at a time, and each window's
//! "current" (last) message contributes weighted edges from its author to a
//! scored neighbor list: the other authors in the window ordered by recency,
//! with explicitly mentioned users promoted to the top. Three graphs are
//! built per target: Before (pre-target slice), After (post-target slice),
//! and Full (both sides).

use crate::chatlog::{detect_mentions, ChannelIndex, MentionList, Message, Roster};
use crate::error::{Error, Result};
use crate::graph::{ConversationGraph, GraphBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractionConfig {
    /// Messages kept on each side of the target (context width 2h+1 total).
    pub context_half_width: usize,
    /// Maximum number of messages in the sliding window, current included.
    pub window_size: usize,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            context_half_width: 100,
            window_size: 10,
        }
    }
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.context_half_width < 1 {
            return Err(Error::InvalidParameter(
                "context_half_width must be >= 1".into(),
            ));
        }
        if self.window_size < 1 {
            return Err(Error::InvalidParameter("window_size must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceKind {
    Before,
    After,
    Full,
}

impl SliceKind {
    pub fn label(&self) -> &'static str {
        match self {
            SliceKind::Before => "before",
            SliceKind::After => "after",
            SliceKind::Full => "full",
        }
    }
}

/// A contiguous run of channel messages with the target's position inside it.
#[derive(Debug, Clone, Copy)]
pub struct ContextSlice<'a> {
    pub kind: SliceKind,
    pub messages: &'a [Message],
    pub target_index: usize,
}

/// Scored presumed recipients of one message: no duplicates, never the
/// author, scores strictly decreasing and summing to 1 when non-empty.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    pub entries: Vec<(String, f64)>,
}

/// Score of the 1-based rank `r` entry in a neighbor list of length `len`:
/// `2(len - r + 1) / (len (len + 1))`, a linear decay normalized so each
/// message contributes total weight 1.
pub fn neighbor_score(rank: usize, len: usize) -> f64 {
    debug_assert!(1 <= rank && rank <= len);
    2.0 * (len - rank + 1) as f64 / (len * (len + 1)) as f64
}

/// Cut the Before/After/Full slice for `target_seq`, truncating silently at
/// channel boundaries.
pub fn slice_context<'a>(
    channel: &'a ChannelIndex,
    target_seq: u64,
    cfg: &ExtractionConfig,
    kind: SliceKind,
) -> Result<ContextSlice<'a>> {
    cfg.validate()?;
    let t = target_seq as usize;
    if channel.get(target_seq).is_none() {
        return Err(Error::UnknownTarget {
            channel: channel.channel().to_string(),
            seq: target_seq,
        });
    }
    let n = channel.len();
    let h = cfg.context_half_width;
    let (start, end) = match kind {
        SliceKind::Before => (t.saturating_sub(h), t),
        SliceKind::After => (t, (t + h).min(n - 1)),
        SliceKind::Full => (t.saturating_sub(h), (t + h).min(n - 1)),
    };
    Ok(ContextSlice {
        kind,
        messages: &channel.messages()[start..=end],
        target_index: t - start,
    })
}

/// Build the scored neighbor list for the last message of `window`.
///
/// Base order: distinct authors of the window excluding the current author,
/// most recent poster first. Mentioned users (minus the author) are then
/// moved, or inserted if absent, to the top in mention order.
pub fn build_neighbor_list(
    window: &[Message],
    current: &Message,
    mentions: &MentionList,
) -> NeighborList {
    let mut last_post: Vec<(&str, usize)> = Vec::new();
    for (pos, msg) in window.iter().enumerate() {
        if msg.author == current.author {
            continue;
        }
        match last_post.iter_mut().find(|(name, _)| *name == msg.author) {
            Some(entry) => entry.1 = pos,
            None => last_post.push((&msg.author, pos)),
        }
    }
    last_post.sort_by_key(|&(_, pos)| std::cmp::Reverse(pos));

    let promoted: Vec<&str> = mentions
        .iter()
        .map(String::as_str)
        .filter(|name| *name != current.author)
        .collect();
    let mut ordered: Vec<&str> = promoted.clone();
    ordered.extend(
        last_post
            .iter()
            .map(|&(name, _)| name)
            .filter(|n| !promoted.contains(n)),
    );

    let len = ordered.len();
    let entries = ordered
        .into_iter()
        .enumerate()
        .map(|(i, name)| (name.to_string(), neighbor_score(i + 1, len)))
        .collect();
    NeighborList { entries }
}

/// Run the sliding window over a slice and accumulate the weighted graph.
///
/// Every author posting in the slice becomes a vertex; mentioned roster
/// members inserted into a neighbor list become vertices too. The target
/// message's author is marked on the graph.
pub fn extract_graph(
    slice: &ContextSlice<'_>,
    roster: &Roster,
    cfg: &ExtractionConfig,
) -> Result<ConversationGraph> {
    cfg.validate()?;
    let mut builder = GraphBuilder::new();
    for (i, current) in slice.messages.iter().enumerate() {
        builder.add_vertex(&current.author);
        let start = i.saturating_sub(cfg.window_size - 1);
        let window = &slice.messages[start..=i];
        let mentions = detect_mentions(&current.text, roster);
        let neighbors = build_neighbor_list(window, current, &mentions);
        for (user, score) in &neighbors.entries {
            builder.add_edge_weight(&current.author, user, *score);
        }
    }
    builder.set_target(&slice.messages[slice.target_index].author);
    builder.build()
}

/// The three conversational graphs for one target message.
#[derive(Debug, Clone)]
pub struct GraphTriple {
    pub before: ConversationGraph,
    pub after: ConversationGraph,
    pub full: ConversationGraph,
}

impl GraphTriple {
    pub fn get(&self, kind: SliceKind) -> &ConversationGraph {
        match kind {
            SliceKind::Before => &self.before,
            SliceKind::After => &self.after,
            SliceKind::Full => &self.full,
        }
    }
}

/// Extract Before, After, and Full graphs for `target_seq`.
pub fn extract_all(
    channel: &ChannelIndex,
    target_seq: u64,
    cfg: &ExtractionConfig,
) -> Result<GraphTriple> {
    let roster = channel.roster();
    let before = extract_graph(
        &slice_context(channel, target_seq, cfg, SliceKind::Before)?,
        roster,
        cfg,
    )?;
    let after = extract_graph(
        &slice_context(channel, target_seq, cfg, SliceKind::After)?,
        roster,
        cfg,
    )?;
    let full = extract_graph(
        &slice_context(channel, target_seq, cfg, SliceKind::Full)?,
        roster,
        cfg,
    )?;
    Ok(GraphTriple {
        before,
        after,
        full,
    })
}
