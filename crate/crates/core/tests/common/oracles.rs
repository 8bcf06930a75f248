//! Slow reference implementations the library is checked against.

use std::collections::BTreeMap;

use corpus_forge::text::{is_pause_comma, is_punctuation};

/// Best total over every monotone path, by exhaustive enumeration.
///
/// `rows[t][k]` is the score of symbol `k` at frame `t`; `phones` are symbol
/// columns and `sil` the silence column when optional silence is allowed.
/// Path scores are summed frame by frame from frame 0.
pub fn brute_force_align(rows: &[Vec<f64>], phones: &[usize], sil: Option<usize>) -> Option<f64> {
    // explicit state list: [SIL] p1 [SIL] p2 ... pk [SIL]
    let mut states: Vec<(usize, bool)> = Vec::new();
    if let Some(s) = sil {
        states.push((s, true));
    }
    for &p in phones {
        states.push((p, false));
        if let Some(s) = sil {
            states.push((s, true));
        }
    }
    if states.is_empty() || rows.is_empty() {
        return None;
    }
    let phone_states: Vec<usize> = (0..states.len()).filter(|&i| !states[i].1).collect();
    let starts: Vec<usize> = match (sil, phone_states.first()) {
        (Some(_), Some(&p)) => vec![0, p],
        (Some(_), None) => vec![0],
        (None, Some(&p)) => vec![p],
        (None, None) => return None,
    };
    let ends: Vec<usize> = match phone_states.last() {
        Some(&p) if sil.is_some() => vec![p, states.len() - 1],
        Some(&p) => vec![p],
        None => vec![0],
    };
    // successors: the next state, or skip an optional silence to the next phone
    let succ = |s: usize| -> Vec<usize> {
        let mut v = Vec::new();
        if s + 1 < states.len() {
            v.push(s + 1);
        }
        if !states[s].1 && s + 2 < states.len() && states[s + 1].1 && !states[s + 2].1 {
            v.push(s + 2);
        }
        v
    };
    let mut best: Option<f64> = None;
    #[allow(clippy::too_many_arguments)]
    fn walk(
        t: usize,
        s: usize,
        acc: f64,
        rows: &[Vec<f64>],
        states: &[(usize, bool)],
        ends: &[usize],
        succ: &dyn Fn(usize) -> Vec<usize>,
        best: &mut Option<f64>,
    ) {
        if t == rows.len() {
            if ends.contains(&s) && best.is_none_or(|b| acc > b) {
                *best = Some(acc);
            }
            return;
        }
        let mut next = vec![s];
        next.extend(succ(s));
        for n in next {
            walk(t + 1, n, acc + rows[t][states[n].0], rows, states, ends, succ, best);
        }
    }
    for &s in &starts {
        walk(1, s, rows[0][states[s].0], rows, &states, &ends, &succ, &mut best);
    }
    best
}

/// Output of [`brute_segment`]; mirrors the library's token kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Piece {
    Word(String),
    Pause,
    Punct(char),
    Unk(char),
}

/// Leftmost-longest segmentation by scanning every surface at every
/// position. Characters no surface covers become `Unk`.
pub fn brute_segment(text: &str, surfaces: &[String]) -> Vec<(usize, Piece)> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if is_pause_comma(c) {
            out.push((i, Piece::Pause));
            i += 1;
        } else if is_punctuation(c) {
            out.push((i, Piece::Punct(c)));
            i += 1;
        } else {
            let mut best: Option<&String> = None;
            for s in surfaces {
                let sc: Vec<char> = s.chars().collect();
                if chars[i..].starts_with(&sc) && best.is_none_or(|b| sc.len() > b.chars().count()) {
                    best = Some(s);
                }
            }
            match best {
                Some(s) => {
                    out.push((i, Piece::Word(s.clone())));
                    i += s.chars().count();
                }
                None => {
                    out.push((i, Piece::Unk(c)));
                    i += 1;
                }
            }
        }
    }
    out
}

/// Highest-frequency pronunciation per surface; the first one listed wins
/// ties.
pub fn max_frequency(entries: &[(String, String, u64)]) -> BTreeMap<&str, &str> {
    let mut best: BTreeMap<&str, (&str, u64)> = BTreeMap::new();
    for (surface, pron, freq) in entries {
        match best.get(surface.as_str()) {
            Some(&(_, f)) if f >= *freq => {}
            _ => {
                best.insert(surface, (pron, *freq));
            }
        }
    }
    best.into_iter().map(|(s, (p, _))| (s, p)).collect()
}
