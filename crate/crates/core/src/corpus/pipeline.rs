//! File-level drivers: archives or plain text in, clean tokenized shards out.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dedup::LineDeduper;
use super::html::{extract_text, normalize_whitespace};
use super::lang::{detect_language, LangProfile};
use super::tokenize::tokenize;
use super::warc::{read_warc, RecordType};
use crate::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PipelineStats {
    pub records_seen: u64,
    pub records_kept: u64,
    pub bytes_in: u64,
    pub bytes_out: u64,
    pub lines_deduped: u64,
}

impl PipelineStats {
    pub fn merge(mut self, other: &PipelineStats) -> Self {
        self.records_seen += other.records_seen;
        self.records_kept += other.records_kept;
        self.bytes_in += other.bytes_in;
        self.bytes_out += other.bytes_out;
        self.lines_deduped += other.lines_deduped;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractConfig {
    pub lang: String,
    pub min_confidence: f64,
    /// Extracted lines shorter than this (in characters) are dropped.
    pub min_line_chars: usize,
    pub lowercase: bool,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            lang: "fr".to_owned(),
            min_confidence: 0.5,
            min_line_chars: 30,
            lowercase: false,
        }
    }
}

/// Filters documents by language and turns them into tokenized lines.
pub struct Extractor {
    profiles: Vec<LangProfile>,
    config: ExtractConfig,
}

impl Extractor {
    pub fn new(profiles: Vec<LangProfile>, config: ExtractConfig) -> Result<Self> {
        if profiles.len() < 2 {
            return Err(Error::NoProfiles(profiles.len()));
        }
        if !profiles.iter().any(|p| p.language_tag == config.lang) {
            return Err(Error::InvalidConfig(format!(
                "no profile for target language {:?}",
                config.lang
            )));
        }
        Ok(Extractor { profiles, config })
    }

    /// Tokenized training lines of one document's clean text, or nothing
    /// if the document is not in the target language.
    pub fn process_text(&self, text: &str) -> Vec<String> {
        let lines: Vec<&str> = text
            .lines()
            .filter(|l| l.chars().count() >= self.config.min_line_chars)
            .collect();
        if lines.is_empty() {
            return Vec::new();
        }
        let joined = lines.join("\n");
        match detect_language(&joined, &self.profiles) {
            Ok(d)
                if d.language_tag == self.config.lang
                    && d.confidence >= self.config.min_confidence =>
            {
                lines
                    .iter()
                    .map(|l| tokenize(l, self.config.lowercase).join(" "))
                    .filter(|l| !l.is_empty())
                    .collect()
            }
            _ => Vec::new(),
        }
    }

    pub fn process_html(&self, html: &str) -> Vec<String> {
        self.process_text(&extract_text(html))
    }

    /// Process every document of one input file, writing kept lines to `out`.
    pub fn process_file<W: Write>(&self, path: &Path, mut out: W) -> Result<PipelineStats> {
        let mut stats = PipelineStats::default();
        let mut emit = |lines: Vec<String>, stats: &mut PipelineStats| -> Result<()> {
            stats.records_seen += 1;
            if !lines.is_empty() {
                stats.records_kept += 1;
            }
            for l in lines {
                out.write_all(l.as_bytes())?;
                out.write_all(b"\n")?;
                stats.bytes_out += l.len() as u64 + 1;
            }
            Ok(())
        };

        if is_warc(path)? {
            let file = File::open(path).map_err(|e| Error::path(path, e))?;
            for record in read_warc(file)? {
                let record = record?;
                if record.record_type != RecordType::Response {
                    continue;
                }
                let is_html = record
                    .http_content_type()
                    .is_none_or(|ct| ct.to_ascii_lowercase().contains("html"));
                if !is_html {
                    continue;
                }
                let body = record.http_body();
                stats.bytes_in += body.len() as u64;
                let lines = self.process_html(&String::from_utf8_lossy(body));
                emit(lines, &mut stats)?;
            }
        } else {
            let text = fs::read_to_string(path).map_err(|e| Error::path(path, e))?;
            for doc in plain_documents(&text) {
                stats.bytes_in += doc.len() as u64;
                let lines = self.process_text(&normalize_whitespace(doc));
                emit(lines, &mut stats)?;
            }
        }
        out.flush()?;
        Ok(stats)
    }
}

/// Blank-line separated blocks; a file without blank lines holds one
/// document per line.
pub fn plain_documents(text: &str) -> Vec<&str> {
    let has_blank = text.lines().any(|l| l.trim().is_empty());
    if has_blank {
        text.split("\n\n")
            .flat_map(|b| b.split("\r\n\r\n"))
            .map(str::trim)
            .filter(|b| !b.is_empty())
            .collect()
    } else {
        text.lines().filter(|l| !l.trim().is_empty()).collect()
    }
}

fn is_warc(path: &Path) -> Result<bool> {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().to_lowercase())
        .unwrap_or_default();
    if name.ends_with(".warc") || name.ends_with(".warc.gz") {
        return Ok(true);
    }
    let mut head = [0u8; 8];
    let mut f = File::open(path).map_err(|e| Error::path(path, e))?;
    let n = f.read(&mut head)?;
    Ok(head[..n].starts_with(&[0x1f, 0x8b]) || head[..n].starts_with(b"WARC/"))
}

/// Expand directories into their files, sorted.
pub fn expand_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in inputs {
        let meta = fs::metadata(input).map_err(|e| Error::path(input, e))?;
        if meta.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(input)
                .map_err(|e| Error::path(input, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            entries.sort();
            files.extend(entries);
        } else {
            files.push(input.clone());
        }
    }
    Ok(files)
}

fn shard_name(i: usize) -> String {
    format!("shard-{i:05}.txt")
}

/// Extract every input (in parallel) into `out_dir/shard-NNNNN.txt`, one
/// shard per input file.
pub fn run_extract(
    extractor: &Extractor,
    inputs: &[PathBuf],
    out_dir: &Path,
) -> Result<PipelineStats> {
    fs::create_dir_all(out_dir).map_err(|e| Error::path(out_dir, e))?;
    let files = expand_inputs(inputs)?;
    let stats = files
        .par_iter()
        .enumerate()
        .map(|(i, path)| {
            let out_path = out_dir.join(shard_name(i));
            let out =
                BufWriter::new(File::create(&out_path).map_err(|e| Error::path(&out_path, e))?);
            extractor.process_file(path, out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(stats
        .iter()
        .fold(PipelineStats::default(), PipelineStats::merge))
}

/// Deduplicate the lines of every file in `in_dir` against one another,
/// in sorted file order, writing files of the same names to `out_dir`.
pub fn run_dedup(in_dir: &Path, out_dir: &Path) -> Result<PipelineStats> {
    fs::create_dir_all(out_dir).map_err(|e| Error::path(out_dir, e))?;
    let files = expand_inputs(&[in_dir.to_owned()])?;
    let mut seen = LineDeduper::new();
    let mut stats = PipelineStats::default();
    for path in files {
        let name = path.file_name().expect("file path");
        let out_path = out_dir.join(name);
        let reader = BufReader::new(File::open(&path).map_err(|e| Error::path(&path, e))?);
        let mut out =
            BufWriter::new(File::create(&out_path).map_err(|e| Error::path(&out_path, e))?);
        for line in reader.lines() {
            let line = line.map_err(|e| Error::path(&path, e))?;
            stats.records_seen += 1;
            stats.bytes_in += line.len() as u64 + 1;
            if seen.insert(&line) {
                stats.records_kept += 1;
                stats.bytes_out += line.len() as u64 + 1;
                out.write_all(line.as_bytes())?;
                out.write_all(b"\n")?;
            } else {
                stats.lines_deduped += 1;
            }
        }
        out.flush()?;
    }
    Ok(stats)
}
