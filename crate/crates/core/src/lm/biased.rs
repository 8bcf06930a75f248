use std::collections::BTreeSet;

use super::{lm_logprob, per_token_probs, LanguageModel, LmError, NGramLm};

/// Per-phrase model interpolating a transcript model with a shared
/// background model.
///
/// The transcript component is the unsmoothed relative-frequency model of
/// the phrase. The background is opened to the union vocabulary by
/// reserving `rho = 1 / (10 |V_bg|)` of its mass for tokens it never saw,
/// split evenly over those tokens and one unknown class, so the mixture
/// normalizes over `V_t ∪ V_bg ∪ {UNK}`.
#[derive(Debug, Clone)]
pub struct BiasedLm<'a> {
    background: &'a NGramLm,
    transcript: NGramLm,
    w_bias: f64,
    rho: f64,
    /// Tokens outside the background vocabulary, plus one for UNK.
    open_classes: usize,
    vocab_size: usize,
}

/// Builds the biased model for one phrase. The mixture weight on the
/// transcript model is `1 - discount`.
pub fn build_biased_lm<'a, S: AsRef<str>>(
    background: &'a NGramLm,
    transcript_tokens: &[S],
    discount: f64,
) -> Result<BiasedLm<'a>, LmError> {
    if transcript_tokens.is_empty() {
        return Err(LmError::EmptyTranscript);
    }
    if !(0.0..1.0).contains(&discount) {
        return Err(LmError::Discount(discount));
    }
    let transcript = NGramLm::train([transcript_tokens], background.order(), 0.0)?;
    let bg_vocab = background.vocabulary();
    let extra: BTreeSet<&str> = transcript
        .vocabulary()
        .into_iter()
        .filter(|t| !bg_vocab.contains(t))
        .collect();
    let open_classes = extra.len() + 1;
    let vocab_size = bg_vocab.len() + extra.len();
    Ok(BiasedLm {
        background,
        w_bias: 1.0 - discount,
        rho: 1.0 / (10.0 * bg_vocab.len() as f64),
        open_classes,
        vocab_size,
        transcript,
    })
}

impl<'a> BiasedLm<'a> {
    pub fn w_bias(&self) -> f64 {
        self.w_bias
    }

    pub fn transcript_lm(&self) -> &NGramLm {
        &self.transcript
    }

    pub fn background_lm(&self) -> &NGramLm {
        self.background
    }

    /// The background component as the mixture sees it, opened to the
    /// union vocabulary.
    pub fn background_prob(&self, history: &[&str], word: &str) -> f64 {
        if self.background.contains(word) {
            (1.0 - self.rho) * self.background.prob(history, word)
        } else {
            self.rho / self.open_classes as f64
        }
    }

    /// Distribution over the union vocabulary plus the [`super::UNK`] class.
    pub fn distribution(&self, history: &[&str]) -> Vec<(String, f64)> {
        let mut vocab: BTreeSet<&str> = self.background.vocabulary();
        vocab.extend(self.transcript.vocabulary());
        let mut out: Vec<(String, f64)> = vocab
            .into_iter()
            .map(|w| (w.to_owned(), self.prob(history, w)))
            .collect();
        out.push((super::UNK.to_owned(), self.prob(history, super::UNK)));
        out
    }

    /// Log-likelihood ratio of `tokens` under this model against the opened
    /// background alone: how much the transcript bias favors them. Tends to
    /// zero as the discount approaches 1.
    pub fn bias_logratio<S: AsRef<str>>(&self, tokens: &[S]) -> f64 {
        let floor = self.floor().ln();
        let score = |p: f64| if p > 0.0 { p.ln() } else { floor };
        let mixed = per_token_probs(self, tokens);
        let base = per_token_probs(&Background(self), tokens);
        mixed.into_iter().zip(base).map(|(p, b)| score(p) - score(b)).sum()
    }

    pub fn logprob<S: AsRef<str>>(&self, tokens: &[S]) -> f64 {
        lm_logprob(self, tokens)
    }
}

struct Background<'b, 'a>(&'b BiasedLm<'a>);

impl LanguageModel for Background<'_, '_> {
    fn order(&self) -> usize {
        self.0.order()
    }

    fn prob(&self, history: &[&str], word: &str) -> f64 {
        self.0.background_prob(history, word)
    }

    fn vocab_size(&self) -> usize {
        self.0.vocab_size
    }
}

impl LanguageModel for BiasedLm<'_> {
    fn order(&self) -> usize {
        self.background.order()
    }

    fn prob(&self, history: &[&str], word: &str) -> f64 {
        let t = self.transcript.prob(history, word);
        self.w_bias * t + (1.0 - self.w_bias) * self.background_prob(history, word)
    }

    fn vocab_size(&self) -> usize {
        self.vocab_size
    }
}
