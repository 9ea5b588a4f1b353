//! Chat-log parsing, per-channel indexing, and explicit mention detection.
//!
//! Input logs are JSONL: one message object per line with fields `id`,
//! `channel`, `seq`, `author`, `text`, `abusive`. Within a channel, `seq`
//! must be dense from 0 so that a message's position is independent of file
//! order.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One chat line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Message {
    pub id: String,
    pub channel: String,
    /// 0-based position within the channel; dense and unique per channel.
    pub seq: u64,
    pub author: String,
    pub text: String,
    pub abusive: bool,
}

/// The set of users that have posted in a channel, with a case-folded index
/// for mention lookup.
#[derive(Debug, Clone, Default)]
pub struct Roster {
    names: Vec<String>,
    by_lower: HashMap<String, Vec<String>>,
}

impl Roster {
    pub fn from_names<I: IntoIterator<Item = String>>(names: I) -> Self {
        let mut set: Vec<String> = names
            .into_iter()
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        set.sort();
        let mut by_lower: HashMap<String, Vec<String>> = HashMap::new();
        for name in &set {
            by_lower
                .entry(name.to_lowercase())
                .or_default()
                .push(name.clone());
        }
        Roster {
            names: set,
            by_lower,
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names
            .binary_search_by(|n| n.as_str().cmp(name))
            .is_ok()
    }

    /// Distinct usernames, sorted.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    fn lookup_lower(&self, lowered: &str) -> Option<&[String]> {
        self.by_lower.get(lowered).map(Vec::as_slice)
    }
}

/// All messages of one channel, ordered by `seq`, plus its roster.
///
/// Immutable after construction; safe to share read-only across workers.
#[derive(Debug, Clone)]
pub struct ChannelIndex {
    channel: String,
    messages: Vec<Message>,
    roster: Roster,
}

impl ChannelIndex {
    /// Build an index from the messages of a single channel, validating the
    /// seq invariants.
    pub fn new(channel: String, mut messages: Vec<Message>) -> Result<Self> {
        messages.sort_by_key(|m| m.seq);
        for (pos, msg) in messages.iter().enumerate() {
            if msg.channel != channel {
                return Err(Error::Integrity {
                    channel: channel.clone(),
                    message: format!("message '{}' belongs to channel '{}'", msg.id, msg.channel),
                });
            }
            if msg.author.is_empty() || msg.author.chars().any(char::is_whitespace) {
                return Err(Error::Integrity {
                    channel: channel.clone(),
                    message: format!("message '{}' has invalid author '{}'", msg.id, msg.author),
                });
            }
            let expected = pos as u64;
            match msg.seq.cmp(&expected) {
                std::cmp::Ordering::Equal => {}
                std::cmp::Ordering::Less => {
                    return Err(Error::Integrity {
                        channel: channel.clone(),
                        message: format!("duplicate seq {}", msg.seq),
                    });
                }
                std::cmp::Ordering::Greater => {
                    return Err(Error::Integrity {
                        channel: channel.clone(),
                        message: format!("missing seq {expected}"),
                    });
                }
            }
        }
        let roster = Roster::from_names(messages.iter().map(|m| m.author.clone()));
        Ok(ChannelIndex {
            channel,
            messages,
            roster,
        })
    }

    pub fn channel(&self) -> &str {
        &self.channel
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    /// Message at `seq`; total on `[0, len)`.
    pub fn get(&self, seq: u64) -> Option<&Message> {
        self.messages.get(seq as usize)
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }
}

/// Usernames mentioned in a text, in order of first occurrence, deduplicated.
pub type MentionList = Vec<String>;

/// Parse a JSONL log into one [`ChannelIndex`] per channel (sorted by channel
/// name).
pub fn parse_log<R: BufRead>(reader: R) -> Result<Vec<ChannelIndex>> {
    let mut by_channel: BTreeMap<String, Vec<Message>> = BTreeMap::new();
    let mut seen: HashSet<(String, u64)> = HashSet::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let msg: Message = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: lineno + 1,
            message: e.to_string(),
        })?;
        if !seen.insert((msg.channel.clone(), msg.seq)) {
            return Err(Error::Integrity {
                channel: msg.channel.clone(),
                message: format!("duplicate seq {}", msg.seq),
            });
        }
        by_channel.entry(msg.channel.clone()).or_default().push(msg);
    }
    by_channel
        .into_iter()
        .map(|(channel, messages)| ChannelIndex::new(channel, messages))
        .collect()
}

/// Serialize channels back to JSONL, in channel order then seq order.
pub fn write_log<W: Write>(channels: &[ChannelIndex], mut writer: W) -> Result<()> {
    for channel in channels {
        for msg in channel.messages() {
            serde_json::to_writer(&mut writer, msg)?;
            writer.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Find roster members referenced in `text` as standalone tokens.
///
/// Tokens are whitespace-separated runs with leading/trailing
/// non-alphanumeric characters stripped (so "@name" and "name," match, while
/// internal punctuation in names is preserved). Comparison is
/// case-insensitive. The result keeps first-occurrence order with duplicates
/// removed; self-mentions are retained here and filtered by the caller.
pub fn detect_mentions(text: &str, roster: &Roster) -> MentionList {
    let mut mentions = Vec::new();
    if roster.is_empty() {
        return mentions;
    }
    let mut seen: HashSet<&str> = HashSet::new();
    for token in text.split_whitespace() {
        let stripped = token.trim_matches(|c: char| !c.is_alphanumeric());
        if stripped.is_empty() {
            continue;
        }
        let lowered = stripped.to_lowercase();
        if let Some(matches) = roster.lookup_lower(&lowered) {
            for name in matches {
                if seen.insert(name) {
                    mentions.push(name.clone());
                }
            }
        }
    }
    mentions
}
