//! Corpus construction: WARC archives or plain text in, deduplicated
//! tokenized training lines out.

pub mod dedup;
pub mod html;
pub mod lang;
pub mod pipeline;
pub mod tokenize;
pub mod warc;

pub use dedup::{dedup_lines, LineDeduper, SharedDeduper};
pub use html::extract_text;
pub use lang::{build_profile, builtin_profiles, detect_language, Detection, LangProfile};
pub use pipeline::{run_dedup, run_extract, ExtractConfig, Extractor, PipelineStats};
pub use tokenize::tokenize;
pub use warc::{read_warc, write_record, RecordType, WarcReader, WarcRecord};
