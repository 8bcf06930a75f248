//! Character-level n-gram language models with absolute discounting.
//!
//! For a context `c` with observed continuations,
//!
//! ```text
//! P(w | c) = max(count(c, w) - D, 0) / count(c) + alpha(c) * P(w | c')
//! alpha(c) = D * distinct(c) / count(c)
//! ```
//!
//! where `c'` drops the oldest token. Unseen contexts defer entirely to the
//! shorter one, and the unigram level interpolates with the uniform
//! distribution over the vocabulary, so every context normalizes exactly.
//! Out-of-vocabulary tokens and zero-probability events score at a fixed
//! floor of `1 / (10 |V|)` inside [`lm_logprob`].

mod biased;
mod io;

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

pub use biased::{build_biased_lm, BiasedLm};
pub use io::{load_lm, save_lm};

pub const BOS: &str = "<s>";
pub const UNK: &str = "<unk>";

#[derive(Debug, Error)]
pub enum LmError {
    #[error("cannot train a language model on an empty corpus")]
    EmptyCorpus,
    #[error("cannot bias a language model with an empty transcript")]
    EmptyTranscript,
    #[error("discount must lie in [0, 1), got {0}")]
    Discount(f64),
    #[error("n-gram order must be at least 1")]
    Order,
    #[error("model file I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("model file line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Conditional next-token probabilities.
pub trait LanguageModel {
    fn order(&self) -> usize;

    /// `P(word | history)`. `history` holds the preceding tokens, padded
    /// with [`BOS`]; only the last `order - 1` entries matter.
    fn prob(&self, history: &[&str], word: &str) -> f64;

    /// Size of the vocabulary the floor is computed from.
    fn vocab_size(&self) -> usize;

    /// Score used for events the model gives zero probability.
    fn floor(&self) -> f64 {
        1.0 / (10.0 * self.vocab_size().max(1) as f64)
    }
}

/// Natural-log probability of `tokens` with the history padded by `order - 1`
/// sentence-start markers. Never returns negative infinity.
pub fn lm_logprob<M: LanguageModel + ?Sized, S: AsRef<str>>(model: &M, tokens: &[S]) -> f64 {
    per_token_probs(model, tokens)
        .into_iter()
        .map(|p| if p > 0.0 { p.ln() } else { model.floor().ln() })
        .sum()
}

pub(crate) fn per_token_probs<M: LanguageModel + ?Sized, S: AsRef<str>>(
    model: &M,
    tokens: &[S],
) -> Vec<f64> {
    let pad = model.order().saturating_sub(1);
    let mut history: Vec<&str> = vec![BOS; pad];
    let mut out = Vec::with_capacity(tokens.len());
    for tok in tokens {
        let tok = tok.as_ref();
        out.push(model.prob(&history, tok));
        history.push(tok);
    }
    out
}

/// Splits text into LM tokens: one per counted character, punctuation and
/// whitespace dropped.
pub fn char_tokens(text: &str) -> Vec<String> {
    text.chars()
        .filter(|&c| crate::text::is_counted_char(c))
        .map(String::from)
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq)]
struct ContextCounts {
    total: u64,
    continuations: HashMap<u32, u64>,
}

/// Trained count tables. Token id 0 is the sentence-start marker, which is
/// never predicted; ids `1..` are the vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct NGramLm {
    order: usize,
    discount: f64,
    symbols: Vec<String>,
    ids: HashMap<String, u32>,
    /// `tables[k - 1]` holds k-gram counts keyed by their (k - 1)-token context.
    tables: Vec<HashMap<Vec<u32>, ContextCounts>>,
}

impl NGramLm {
    /// Trains an absolute-discounting model. Empty sequences are ignored.
    pub fn train<I, S>(sequences: I, order: usize, discount: f64) -> Result<Self, LmError>
    where
        I: IntoIterator,
        I::Item: AsRef<[S]>,
        S: AsRef<str>,
    {
        if order == 0 {
            return Err(LmError::Order);
        }
        if !(0.0..1.0).contains(&discount) {
            return Err(LmError::Discount(discount));
        }
        let mut lm = NGramLm {
            order,
            discount,
            symbols: vec![BOS.to_owned()],
            ids: HashMap::from([(BOS.to_owned(), 0)]),
            tables: vec![HashMap::new(); order],
        };
        let mut any = false;
        for seq in sequences {
            let seq = seq.as_ref();
            if seq.is_empty() {
                continue;
            }
            any = true;
            let mut history = vec![0u32; order - 1];
            for tok in seq {
                let id = lm.intern(tok.as_ref());
                for k in 1..=order {
                    let ctx = history[history.len() - (k - 1)..].to_vec();
                    lm.add_count(k, ctx, id, 1);
                }
                history.push(id);
            }
        }
        if !any {
            return Err(LmError::EmptyCorpus);
        }
        Ok(lm)
    }

    fn intern(&mut self, tok: &str) -> u32 {
        if let Some(&id) = self.ids.get(tok) {
            return id;
        }
        let id = self.symbols.len() as u32;
        self.symbols.push(tok.to_owned());
        self.ids.insert(tok.to_owned(), id);
        id
    }

    fn add_count(&mut self, k: usize, ctx: Vec<u32>, word: u32, n: u64) {
        let cc = self.tables[k - 1].entry(ctx).or_default();
        cc.total += n;
        *cc.continuations.entry(word).or_insert(0) += n;
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn contains(&self, token: &str) -> bool {
        matches!(self.ids.get(token), Some(&id) if id != 0)
    }

    /// Predictable tokens, sorted.
    pub fn vocabulary(&self) -> BTreeSet<&str> {
        self.symbols[1..].iter().map(String::as_str).collect()
    }

    /// Count of the n-gram `context ++ [word]` (context as token strings).
    pub fn count(&self, context: &[&str], word: &str) -> u64 {
        let k = context.len() + 1;
        if k > self.order {
            return 0;
        }
        let (Some(ctx), Some(&w)) = (self.lookup_ids(context), self.ids.get(word)) else {
            return 0;
        };
        self.tables[k - 1]
            .get(&ctx)
            .and_then(|cc| cc.continuations.get(&w).copied())
            .unwrap_or(0)
    }

    fn lookup_ids(&self, tokens: &[&str]) -> Option<Vec<u32>> {
        tokens.iter().map(|t| self.ids.get(*t).copied()).collect()
    }

    /// Probability by id with `ctx` already trimmed to at most order - 1.
    fn prob_ids(&self, ctx: &[u32], word: u32) -> f64 {
        let v = (self.symbols.len() - 1) as f64;
        let mut p = 1.0 / v;
        // walk from the unigram up to the full context
        for k in 1..=ctx.len() + 1 {
            let sub = &ctx[ctx.len() - (k - 1)..];
            if let Some(cc) = self.tables[k - 1].get(sub) {
                let c = cc.continuations.get(&word).copied().unwrap_or(0) as f64;
                let total = cc.total as f64;
                let distinct = cc.continuations.len() as f64;
                p = (c - self.discount).max(0.0) / total + self.discount * distinct / total * p;
            }
        }
        p
    }

    /// Unknown context tokens cut the context at that point.
    fn context_ids(&self, history: &[&str]) -> Vec<u32> {
        let keep = self.order - 1;
        let tail = &history[history.len().saturating_sub(keep)..];
        let mut ids = Vec::with_capacity(tail.len());
        for tok in tail.iter().rev() {
            match self.ids.get(*tok) {
                Some(&id) => ids.push(id),
                None => break,
            }
        }
        ids.reverse();
        ids
    }

    /// Full distribution over the vocabulary after `history`.
    pub fn distribution(&self, history: &[&str]) -> Vec<(&str, f64)> {
        let ctx = self.context_ids(history);
        (1..self.symbols.len() as u32)
            .map(|id| (self.symbols[id as usize].as_str(), self.prob_ids(&ctx, id)))
            .collect()
    }

    /// Every context observed in training, as token strings, for each order.
    pub fn observed_contexts(&self) -> Vec<Vec<&str>> {
        self.tables
            .iter()
            .flat_map(|t| t.keys())
            .map(|ctx| ctx.iter().map(|&id| self.symbols[id as usize].as_str()).collect())
            .collect()
    }
}

impl LanguageModel for NGramLm {
    fn order(&self) -> usize {
        self.order
    }

    fn prob(&self, history: &[&str], word: &str) -> f64 {
        match self.ids.get(word) {
            Some(&id) if id != 0 => self.prob_ids(&self.context_ids(history), id),
            _ => 0.0,
        }
    }

    fn vocab_size(&self) -> usize {
        self.symbols.len() - 1
    }
}
