//! Plain-text count dump. Every k-gram count is one line:
//! `<k>\t<count>\t<tok_1> ... <tok_k>`, tokens escaped so that spaces and
//! tabs survive.

use std::fmt::Write as _;
use std::path::Path;

use super::{LmError, NGramLm, BOS};

const MAGIC: &str = "# forge-ngram v1";

fn escape(tok: &str) -> String {
    let mut out = String::with_capacity(tok.len());
    for c in tok.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            ' ' => out.push_str("\\s"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(tok: &str) -> Option<String> {
    let mut out = String::with_capacity(tok.len());
    let mut chars = tok.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        out.push(match chars.next()? {
            '\\' => '\\',
            's' => ' ',
            't' => '\t',
            'n' => '\n',
            'r' => '\r',
            _ => return None,
        });
    }
    Some(out)
}

impl NGramLm {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{MAGIC}").unwrap();
        writeln!(out, "order={}", self.order).unwrap();
        writeln!(out, "discount={}", self.discount).unwrap();
        let mut lines = Vec::new();
        for (k0, table) in self.tables.iter().enumerate() {
            for (ctx, cc) in table {
                for (&w, &n) in &cc.continuations {
                    let toks: Vec<String> = ctx
                        .iter()
                        .chain(std::iter::once(&w))
                        .map(|&id| escape(&self.symbols[id as usize]))
                        .collect();
                    lines.push(format!("{}\t{}\t{}", k0 + 1, n, toks.join(" ")));
                }
            }
        }
        lines.sort();
        for l in lines {
            writeln!(out, "{l}").unwrap();
        }
        out
    }

    pub fn from_text(src: &str) -> Result<Self, LmError> {
        let mut order = None;
        let mut discount = None;
        let mut grams: Vec<(usize, u64, Vec<String>)> = Vec::new();
        for (idx, line) in src.lines().enumerate() {
            let line_no = idx + 1;
            let err = |message: String| LmError::Parse { line: line_no, message };
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(v) = line.strip_prefix("order=") {
                order = Some(v.trim().parse::<usize>().map_err(|e| err(e.to_string()))?);
                continue;
            }
            if let Some(v) = line.strip_prefix("discount=") {
                discount = Some(v.trim().parse::<f64>().map_err(|e| err(e.to_string()))?);
                continue;
            }
            let mut parts = line.splitn(3, '\t');
            let (Some(k), Some(n), Some(toks)) = (parts.next(), parts.next(), parts.next()) else {
                return Err(err("expected <k>\\t<count>\\t<tokens>".into()));
            };
            let k: usize = k.parse().map_err(|_| err(format!("bad order {k:?}")))?;
            let n: u64 = n.parse().map_err(|_| err(format!("bad count {n:?}")))?;
            let toks = toks
                .split(' ')
                .map(|t| unescape(t).ok_or_else(|| err(format!("bad escape in {t:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            if toks.len() != k || k == 0 {
                return Err(err(format!("{k}-gram has {} tokens", toks.len())));
            }
            grams.push((k, n, toks));
        }
        let order = order.ok_or(LmError::Parse { line: 0, message: "missing order=".into() })?;
        let discount =
            discount.ok_or(LmError::Parse { line: 0, message: "missing discount=".into() })?;
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
            ids: [(BOS.to_owned(), 0)].into(),
            tables: vec![Default::default(); order],
        };
        // unigrams first so ids follow first appearance in the sorted dump
        grams.sort_by_key(|g| g.0);
        for (k, n, toks) in grams {
            if k > order {
                return Err(LmError::Parse { line: 0, message: format!("{k}-gram in order-{order} model") });
            }
            let ids: Vec<u32> = toks.iter().map(|t| lm.intern(t)).collect();
            let (word, ctx) = ids.split_last().unwrap();
            lm.add_count(k, ctx.to_vec(), *word, n);
        }
        if lm.symbols.len() == 1 {
            return Err(LmError::EmptyCorpus);
        }
        Ok(lm)
    }
}

pub fn save_lm(lm: &NGramLm, path: impl AsRef<Path>) -> Result<(), LmError> {
    std::fs::write(path, lm.to_text())?;
    Ok(())
}

pub fn load_lm(path: impl AsRef<Path>) -> Result<NGramLm, LmError> {
    NGramLm::from_text(&std::fs::read_to_string(path)?)
}
