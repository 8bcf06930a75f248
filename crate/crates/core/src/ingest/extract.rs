use scraper::{ElementRef, Html, Selector};
use serde::{Deserialize, Serialize};
use url::Url;

use super::IngestError;

/// A CSS selector, optionally followed by `@attr` to read an attribute
/// instead of the element text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SelectorExpr {
    raw: String,
    css: String,
    attr: Option<String>,
}

impl TryFrom<String> for SelectorExpr {
    type Error = IngestError;

    fn try_from(raw: String) -> Result<Self, IngestError> {
        let (css, attr) = match raw.rsplit_once('@') {
            Some((css, attr)) if !attr.is_empty() && !attr.contains(char::is_whitespace) => {
                (css.trim().to_string(), Some(attr.to_string()))
            }
            _ => (raw.trim().to_string(), None),
        };
        Selector::parse(&css).map_err(|e| IngestError::Selector { expr: raw.clone(), message: e.to_string() })?;
        Ok(SelectorExpr { raw, css, attr })
    }
}

impl From<SelectorExpr> for String {
    fn from(s: SelectorExpr) -> String {
        s.raw
    }
}

impl std::str::FromStr for SelectorExpr {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, IngestError> {
        SelectorExpr::try_from(s.to_string())
    }
}

impl SelectorExpr {
    fn selector(&self) -> Selector {
        Selector::parse(&self.css).expect("validated on construction")
    }

    fn values_in(&self, root: ElementRef<'_>) -> Vec<String> {
        let sel = self.selector();
        root.select(&sel).filter_map(|el| self.value_of(el)).collect()
    }

    fn value_of(&self, el: ElementRef<'_>) -> Option<String> {
        let v = match &self.attr {
            Some(a) => el.value().attr(a)?.trim().to_string(),
            None => el.text().collect::<Vec<_>>().join(" ").split_whitespace().collect::<Vec<_>>().join(" "),
        };
        (!v.is_empty()).then_some(v)
    }
}

/// Declarative extraction rules for one site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractionRules {
    /// Container of one record; without it, text and audio matches on the
    /// page are paired by position.
    #[serde(default)]
    pub record: Option<SelectorExpr>,
    pub text: SelectorExpr,
    pub audio: SelectorExpr,
    #[serde(default)]
    pub dialect: Option<SelectorExpr>,
    /// Links to further pages.
    #[serde(default)]
    pub follow: Option<SelectorExpr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extracted {
    pub text: String,
    pub audio_url: Url,
    pub dialect: Option<String>,
}

/// Records and outgoing links found on one page.
pub fn extract(html: &str, base: &Url, rules: &ExtractionRules) -> (Vec<Extracted>, Vec<Url>) {
    let doc = Html::parse_document(html);
    let root = doc.root_element();
    let resolve = |s: &str| base.join(s).ok();
    let mut records = Vec::new();
    match &rules.record {
        Some(rec) => {
            let sel = rec.selector();
            for el in root.select(&sel) {
                let text = rules.text.values_in(el).into_iter().next();
                let audio = rules.audio.values_in(el).into_iter().next().and_then(|a| resolve(&a));
                let dialect = rules.dialect.as_ref().and_then(|d| d.values_in(el).into_iter().next());
                if let (Some(text), Some(audio_url)) = (text, audio) {
                    records.push(Extracted { text, audio_url, dialect });
                }
            }
        }
        None => {
            let texts = rules.text.values_in(root);
            let audios = rules.audio.values_in(root);
            if texts.len() != audios.len() {
                log::warn!("{base}: {} text matches but {} audio matches", texts.len(), audios.len());
            }
            let dialect = rules.dialect.as_ref().and_then(|d| d.values_in(root).into_iter().next());
            for (text, audio) in texts.into_iter().zip(audios) {
                if let Some(audio_url) = resolve(&audio) {
                    records.push(Extracted { text, audio_url, dialect: dialect.clone() });
                }
            }
        }
    }
    let links = rules
        .follow
        .as_ref()
        .map(|f| f.values_in(root).iter().filter_map(|l| resolve(l)).collect())
        .unwrap_or_default();
    (records, links)
}
