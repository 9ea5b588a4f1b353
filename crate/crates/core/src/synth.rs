//! Seeded synthetic chat corpora with planted abuse dynamics.
//!
//! Background chatter follows a skewed per-user activity model with
//! occasional mentions of recent speakers. Each planted abuse message is
//! followed by a pile-on burst in one of two community responses, chosen at
//! random per event:
//!
//! - circle pile-on: a handful of regulars trade many replies with the
//!   abuser, naming them in most messages, and the abuser fires back — the
//!   abuser's *weighted* centrality (PageRank, eigenvector, hub) spikes
//!   while their plain degree barely moves;
//! - wave pile-on: a long run of distinct users each drop a single reply
//!   naming the abuser — the abuser's *unweighted* reach (degree,
//!   coreness) spikes while each edge stays feather-light.
//!
//! No single measure captures both responses, but together they separate
//! the classes. With `pile_on_intensity` 0 the bursts vanish and abuse
//! messages are drawn from exactly the background distribution, leaving
//! the label as the only difference. Message text is template filler: the
//! pipeline ignores content, so realism lives in the interaction dynamics
//! only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chatlog::{ChannelIndex, Message};
use crate::error::{Error, Result};
use crate::features::TargetRef;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub n_users: usize,
    pub n_messages: usize,
    pub n_channels: usize,
    /// Fraction of messages planted as abuse events.
    pub abuse_rate: f64,
    /// Multiplier on post-abuse reply density and abuser re-engagement;
    /// 0 disables the planted effect entirely.
    pub pile_on_intensity: f64,
    /// Probability that a background message mentions another user.
    pub mention_rate: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_users: 50,
            n_messages: 20_000,
            n_channels: 1,
            abuse_rate: 0.01,
            pile_on_intensity: 3.0,
            mention_rate: 0.15,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub channels: Vec<ChannelIndex>,
    /// Balanced target list: every abuse event plus an equal number of
    /// background messages, in (channel, seq) order.
    pub targets: Vec<TargetRef>,
}

const BURST_PER_INTENSITY: f64 = 15.0;

const TEMPLATES: [&str; 12] = [
    "anyone up for a raid tonight",
    "that trade was terrible",
    "gg everyone",
    "selling ore at the north station",
    "did you see the patch notes",
    "my fleet just docked",
    "lol no way",
    "we should ally with the east sector",
    "who took my spot",
    "nice one",
    "back in ten minutes",
    "the market is crashing again",
];

pub fn generate(cfg: &SynthConfig) -> Result<SynthCorpus> {
    validate(cfg)?;
    let burst_len = (BURST_PER_INTENSITY * cfg.pile_on_intensity).round() as usize;
    let n_abuse_total = (cfg.abuse_rate * cfg.n_messages as f64).round() as usize;
    if n_abuse_total == 0 {
        return Err(Error::Generation(
            "abuse_rate rounds to zero planted events".into(),
        ));
    }
    if n_abuse_total * (burst_len + 1) > cfg.n_messages {
        return Err(Error::Generation(format!(
            "{n_abuse_total} abuse events with bursts of {burst_len} exceed {} messages",
            cfg.n_messages
        )));
    }

    let users: Vec<String> = (0..cfg.n_users).map(|i| format!("u{i:03}")).collect();
    // Zipf-flavored activity: a few loud users, a long quiet tail.
    let weights: Vec<f64> = (0..cfg.n_users)
        .map(|i| 1.0 / (i as f64 + 1.0).powf(0.7))
        .collect();
    let cumulative: Vec<f64> = weights
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut channels = Vec::with_capacity(cfg.n_channels);
    let mut targets = Vec::new();
    let mut global_id = 0usize;

    for ci in 0..cfg.n_channels {
        let n_c =
            cfg.n_messages / cfg.n_channels + usize::from(ci < cfg.n_messages % cfg.n_channels);
        let events_c =
            n_abuse_total / cfg.n_channels + usize::from(ci < n_abuse_total % cfg.n_channels);
        if n_c == 0 {
            continue;
        }
        if events_c > 0 {
            let stride = n_c / events_c;
            if stride <= burst_len + 1 {
                return Err(Error::Generation(format!(
                    "channel {ci}: spacing {stride} cannot fit bursts of {burst_len}"
                )));
            }
        }
        let channel_name = format!("ch{ci:02}");
        let abuse_slots = plan_slots(n_c, events_c, burst_len, &mut rng);

        let mut gen = ChannelGen {
            cfg,
            users: &users,
            cumulative: &cumulative,
            rng: &mut rng,
            channel: &channel_name,
            messages: Vec::with_capacity(n_c),
            recent: Vec::new(),
            background_positions: Vec::new(),
            abuse_positions: Vec::new(),
        };
        let mut next_event = 0usize;
        while gen.messages.len() < n_c {
            let pos = gen.messages.len();
            if next_event < abuse_slots.len() && pos >= abuse_slots[next_event] {
                next_event += 1;
                let abuser = gen.emit_abuse(&mut global_id);
                if burst_len > 0 {
                    let mut burst = gen.plan_burst(abuser);
                    for _ in 0..burst_len {
                        if gen.messages.len() >= n_c {
                            break;
                        }
                        gen.emit_burst(abuser, &mut burst, &mut global_id);
                    }
                }
            } else {
                gen.emit_background(&mut global_id);
            }
        }

        for &pos in &gen.abuse_positions {
            targets.push(TargetRef {
                channel: channel_name.clone(),
                seq: pos as u64,
                label: true,
            });
        }
        // Normal targets come from background chatter (never burst replies).
        let mut candidates = gen.background_positions.clone();
        if candidates.len() < gen.abuse_positions.len() {
            return Err(Error::Generation(format!(
                "channel {ci}: only {} background messages for {} normal targets",
                candidates.len(),
                gen.abuse_positions.len()
            )));
        }
        let n_normal = gen.abuse_positions.len();
        let messages = gen.messages;
        use rand::seq::SliceRandom;
        candidates.shuffle(&mut rng);
        let mut normal: Vec<usize> = candidates[..n_normal].to_vec();
        normal.sort_unstable();
        for pos in normal {
            targets.push(TargetRef {
                channel: channel_name.clone(),
                seq: pos as u64,
                label: false,
            });
        }

        channels.push(ChannelIndex::new(channel_name, messages)?);
    }

    targets.sort_by(|a, b| a.channel.cmp(&b.channel).then(a.seq.cmp(&b.seq)));
    Ok(SynthCorpus { channels, targets })
}

fn validate(cfg: &SynthConfig) -> Result<()> {
    if cfg.n_users < 3 {
        return Err(Error::Generation(format!(
            "need at least 3 users, got {}",
            cfg.n_users
        )));
    }
    if cfg.n_messages == 0 || cfg.n_channels == 0 {
        return Err(Error::Generation(
            "need at least one message and one channel".into(),
        ));
    }
    if !(cfg.abuse_rate > 0.0 && cfg.abuse_rate < 1.0) {
        return Err(Error::Generation(format!(
            "abuse_rate must be in (0,1), got {}",
            cfg.abuse_rate
        )));
    }
    if !(0.0..=1.0).contains(&cfg.mention_rate) {
        return Err(Error::Generation(format!(
            "mention_rate must be in [0,1], got {}",
            cfg.mention_rate
        )));
    }
    if cfg.pile_on_intensity < 0.0 {
        return Err(Error::Generation("pile_on_intensity must be >= 0".into()));
    }
    Ok(())
}

/// Evenly spaced event positions with a little jitter; spacing keeps every
/// burst clear of the next event.
fn plan_slots(n_c: usize, events: usize, burst_len: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if events == 0 {
        return Vec::new();
    }
    let stride = n_c / events;
    let slack = stride.saturating_sub(burst_len + 2);
    let jitter = (stride / 10).min(slack / 2);
    (0..events)
        .map(|k| {
            let base = k * stride + stride / 2;
            let offset = if jitter > 0 {
                rng.gen_range(0..=2 * jitter) as i64 - jitter as i64
            } else {
                0
            };
            (base as i64 + offset).max(0) as usize
        })
        .collect()
}

enum Burst {
    Circle { responders: Vec<usize> },
    Wave { queue: Vec<usize>, next: usize },
}

struct ChannelGen<'a> {
    cfg: &'a SynthConfig,
    users: &'a [String],
    cumulative: &'a [f64],
    rng: &'a mut ChaCha8Rng,
    channel: &'a str,
    messages: Vec<Message>,
    /// author indices of the last few messages, most recent last
    recent: Vec<usize>,
    background_positions: Vec<usize>,
    abuse_positions: Vec<usize>,
}

impl ChannelGen<'_> {
    fn weighted_user(&mut self) -> usize {
        let total = *self.cumulative.last().expect("non-empty user list");
        let draw = self.rng.gen::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c < draw)
            .min(self.users.len() - 1)
    }

    fn uniform_other(&mut self, exclude: usize) -> usize {
        loop {
            let u = self.rng.gen_range(0..self.users.len());
            if u != exclude {
                return u;
            }
        }
    }

    fn push(&mut self, author: usize, text: String, abusive: bool, global_id: &mut usize) {
        let seq = self.messages.len() as u64;
        self.messages.push(Message {
            id: format!("m{:07}", *global_id),
            channel: self.channel.to_string(),
            seq,
            author: self.users[author].clone(),
            text,
            abusive,
        });
        *global_id += 1;
        self.recent.push(author);
        if self.recent.len() > 10 {
            self.recent.remove(0);
        }
    }

    fn chatter_text(&mut self, author: usize) -> String {
        let template = TEMPLATES[self.rng.gen_range(0..TEMPLATES.len())];
        if self.rng.gen::<f64>() < self.cfg.mention_rate {
            // mostly address someone who spoke recently
            let counterpart = {
                let recents: Vec<usize> = self
                    .recent
                    .iter()
                    .rev()
                    .copied()
                    .filter(|&u| u != author)
                    .collect();
                if !recents.is_empty() && self.rng.gen::<f64>() < 0.7 {
                    recents[self.rng.gen_range(0..recents.len())]
                } else {
                    self.uniform_other(author)
                }
            };
            if self.rng.gen::<bool>() {
                format!("@{} {template}", self.users[counterpart])
            } else {
                format!("{template} {}", self.users[counterpart])
            }
        } else {
            template.to_string()
        }
    }

    /// Background and (intensity-0) abuse messages share this exact path so
    /// the null corpus carries no structural signal.
    fn emit_chatter(&mut self, abusive: bool, global_id: &mut usize) {
        let author = self.weighted_user();
        let text = self.chatter_text(author);
        let pos = self.messages.len();
        if abusive {
            self.abuse_positions.push(pos);
        } else {
            self.background_positions.push(pos);
        }
        self.push(author, text, abusive, global_id);
    }

    fn emit_background(&mut self, global_id: &mut usize) {
        self.emit_chatter(false, global_id);
    }

    /// The abuse event itself is distributionally plain chatter; only the
    /// label (and any following burst) differs.
    fn emit_abuse(&mut self, global_id: &mut usize) -> usize {
        self.emit_chatter(true, global_id);
        let author_name = &self.messages.last().expect("just pushed").author;
        self.users
            .iter()
            .position(|u| u == author_name)
            .expect("known author")
    }

    fn plan_burst(&mut self, abuser: usize) -> Burst {
        if self.rng.gen::<f64>() < 0.6 {
            // a small circle of regulars takes the abuser on
            let mut responders = Vec::with_capacity(4);
            while responders.len() < 4 {
                let u = self.weighted_user();
                if u != abuser && !responders.contains(&u) {
                    responders.push(u);
                }
            }
            Burst::Circle { responders }
        } else {
            use rand::seq::SliceRandom;
            let mut queue: Vec<usize> = (0..self.users.len()).filter(|&u| u != abuser).collect();
            queue.shuffle(self.rng);
            Burst::Wave { queue, next: 0 }
        }
    }

    fn emit_burst(&mut self, abuser: usize, burst: &mut Burst, global_id: &mut usize) {
        let intensity = self.cfg.pile_on_intensity;
        let mention_abuser = (0.35 * intensity).min(0.95);
        let template = TEMPLATES[self.rng.gen_range(0..TEMPLATES.len())];
        match burst {
            Burst::Circle { responders } => {
                let re_engage = (0.1 * intensity).min(0.5);
                if self.rng.gen::<f64>() < re_engage {
                    // the abuser fires back at one of the circle
                    let counterpart = responders[self.rng.gen_range(0..responders.len())];
                    let text = format!("@{} {template}", self.users[counterpart]);
                    self.push(abuser, text, false, global_id);
                } else {
                    let author = responders[self.rng.gen_range(0..responders.len())];
                    let mut text = if self.rng.gen::<f64>() < mention_abuser {
                        format!("@{} {template}", self.users[abuser])
                    } else {
                        template.to_string()
                    };
                    // bystanders from the ambient conversation get pulled in
                    if self.rng.gen::<f64>() < 0.35 {
                        let recents: Vec<usize> = self
                            .recent
                            .iter()
                            .rev()
                            .copied()
                            .filter(|&u| u != author && u != abuser && !responders.contains(&u))
                            .collect();
                        if !recents.is_empty() {
                            let bystander = recents[self.rng.gen_range(0..recents.len())];
                            text = format!("{text} {}", self.users[bystander]);
                        }
                    }
                    self.push(author, text, false, global_id);
                }
            }
            Burst::Wave { queue, next } => {
                let author = queue[*next % queue.len()];
                *next += 1;
                let mut text = if self.rng.gen::<f64>() < mention_abuser {
                    format!("@{} {template}", self.users[abuser])
                } else {
                    template.to_string()
                };
                // pile-on threads also answer each other
                if *next > 1 && self.rng.gen::<f64>() < 0.6 {
                    let previous = queue[(*next - 2) % queue.len()];
                    text = format!("{text} {}", self.users[previous]);
                }
                self.push(author, text, false, global_id);
            }
        }
    }
}
