//! Toolkit for turning scraped, partly mistranscribed Hakka speech into a
//! segmented, phonemized and audited TTS training corpus.

pub mod align;
pub mod audio;
pub mod cleanup;
pub mod corpus;
pub mod g2p;
pub mod ingest;
pub mod lm;
pub mod pipeline;
pub mod stats;
pub mod text;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/manifests.md")]
    mod manifests {}
    #[doc = include_str!("../../../book/src/g2p.md")]
    mod g2p {}
    #[doc = include_str!("../../../book/src/cleanup.md")]
    mod cleanup {}
    #[doc = include_str!("../../../book/src/alignment.md")]
    mod alignment {}
    #[doc = include_str!("../../../book/src/audio.md")]
    mod audio {}
    #[doc = include_str!("../../../book/src/crawling.md")]
    mod crawling {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
}
