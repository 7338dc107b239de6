//! Word2vec-compatible text and binary formats, and the unit-normalized view
//! that all similarity queries run against.
//!
//! Text: a `V D` header line, then one line per word holding the token and
//! `D` values with 8 significant digits. Binary: the same ASCII header, then
//! per word the UTF-8 token, one space, and `D` little-endian `f32` values.
//! The binary loader also accepts the newline that the classic word2vec tool
//! writes after each vector.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::trainer::Vocabulary;
use crate::{EmbeddingSet, Error, Result};

fn check_token(word: &str) -> Result<()> {
    if word.is_empty() || word.contains([' ', '\n', '\r']) {
        return Err(Error::InvalidArgument(format!(
            "token {word:?} is empty or contains a space or newline"
        )));
    }
    Ok(())
}

/// Format `x` with exactly 8 significant digits, `%#.8g` style.
pub fn format_value(x: f32) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0.0000000"
        } else {
            "0.0000000"
        }
        .to_owned();
    }
    let sci = format!("{x:.7e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..8).contains(&exp) {
        let decimals = (7 - exp) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

pub fn write_text<W: Write>(emb: &EmbeddingSet, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", emb.len(), emb.dim())?;
    let mut line = String::new();
    for (word, vector) in emb.iter() {
        check_token(word)?;
        line.clear();
        line.push_str(word);
        for &v in vector {
            line.push(' ');
            line.push_str(&format_value(v));
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn parse_header(line: &str, line_no: usize) -> Result<(usize, usize)> {
    let mut parts = line.split_whitespace();
    let mut next = |what: &str| -> Result<usize> {
        parts
            .next()
            .ok_or_else(|| Error::format(line_no, format!("header lacks {what}")))?
            .parse()
            .map_err(|_| Error::format(line_no, format!("header {what} is not an integer")))
    };
    let v = next("vocabulary size")?;
    let d = next("dimension")?;
    if d == 0 {
        return Err(Error::format(line_no, "dimension must be >= 1"));
    }
    Ok((v, d))
}

pub fn read_text<R: BufRead>(reader: R) -> Result<EmbeddingSet> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::format(1, "missing header"))??;
    let (v, d) = parse_header(&header, 1)?;

    let mut words = Vec::with_capacity(v);
    let mut values = Vec::with_capacity(v * d);
    for i in 0..v {
        let line_no = i + 2;
        let line = lines
            .next()
            .ok_or_else(|| Error::format(line_no, format!("expected {v} rows, found {i}")))??;
        let mut fields = line.split(' ').filter(|f| !f.is_empty());
        let word = fields
            .next()
            .ok_or_else(|| Error::format(line_no, "empty row"))?;
        words.push(word.to_owned());
        let before = values.len();
        for f in fields {
            let x: f32 = f
                .parse()
                .map_err(|_| Error::format(line_no, format!("invalid number {f:?}")))?;
            values.push(x);
        }
        let got = values.len() - before;
        if got != d {
            return Err(Error::format(
                line_no,
                format!("row for {word:?} has {got} values, expected {d}"),
            ));
        }
    }
    EmbeddingSet::new(Vocabulary::from_words(words)?, d, values)
}

pub fn write_binary<W: Write>(emb: &EmbeddingSet, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", emb.len(), emb.dim())?;
    let mut buf = Vec::with_capacity(emb.dim() * 4);
    for (word, vector) in emb.iter() {
        check_token(word)?;
        w.write_all(word.as_bytes())?;
        w.write_all(b" ")?;
        buf.clear();
        for v in vector {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

fn eof(idx: usize, word: Option<&str>) -> Error {
    match word {
        Some(w) => Error::UnexpectedEof(format!("in vector of word {idx} ({w:?})")),
        None => Error::UnexpectedEof(format!("in token of word {idx}")),
    }
}

fn map_eof(e: io::Error, idx: usize, word: Option<&str>) -> Error {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        eof(idx, word)
    } else {
        Error::Io(e)
    }
}

pub fn read_binary<R: BufRead>(mut reader: R) -> Result<EmbeddingSet> {
    let mut header = Vec::new();
    reader.read_until(b'\n', &mut header)?;
    if header.last() != Some(&b'\n') {
        return Err(Error::UnexpectedEof("in header".into()));
    }
    let header =
        std::str::from_utf8(&header).map_err(|_| Error::format(1, "header is not UTF-8"))?;
    let (v, d) = parse_header(header, 1)?;

    let mut words = Vec::with_capacity(v);
    let mut values = Vec::with_capacity(v * d);
    let mut token = Vec::new();
    let mut raw = vec![0u8; d * 4];
    for i in 0..v {
        token.clear();
        reader.read_until(b' ', &mut token)?;
        if token.pop() != Some(b' ') {
            return Err(eof(i, None));
        }
        let start = token
            .iter()
            .position(|&b| b != b'\n')
            .unwrap_or(token.len());
        let word = std::str::from_utf8(&token[start..])
            .map_err(|_| Error::format(i + 1, format!("token of word {i} is not valid UTF-8")))?;
        check_token(word)
            .map_err(|_| Error::format(i + 1, format!("invalid token of word {i}")))?;
        reader
            .read_exact(&mut raw)
            .map_err(|e| map_eof(e, i, Some(word)))?;
        values.extend(
            raw.chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])),
        );
        words.push(word.to_owned());
    }
    EmbeddingSet::new(Vocabulary::from_words(words)?, d, values)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).map_err(|e| Error::path(path, e))?,
    ))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).map_err(|e| Error::path(path, e))?,
    ))
}

pub fn save_text(emb: &EmbeddingSet, path: &Path) -> Result<()> {
    write_text(emb, create(path)?)
}

pub fn load_text(path: &Path) -> Result<EmbeddingSet> {
    read_text(open(path)?)
}

pub fn save_binary(emb: &EmbeddingSet, path: &Path) -> Result<()> {
    write_binary(emb, create(path)?)
}

pub fn load_binary(path: &Path) -> Result<EmbeddingSet> {
    read_binary(open(path)?)
}

fn is_binary_path(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("bin"))
}

/// Load by extension: `.bin` is binary, anything else text.
pub fn load(path: &Path) -> Result<EmbeddingSet> {
    if is_binary_path(path) {
        load_binary(path)
    } else {
        load_text(path)
    }
}

/// Save by extension: `.bin` is binary, anything else text.
pub fn save(emb: &EmbeddingSet, path: &Path) -> Result<()> {
    if is_binary_path(path) {
        save_binary(emb, path)
    } else {
        save_text(emb, path)
    }
}

/// L2-normalized copy of an embedding matrix.
///
/// Rows with zero norm are kept (as zeros) but flagged, and every search
/// skips them.
#[derive(Debug, Clone)]
pub struct NormalizedView {
    vocab: Vocabulary,
    dim: usize,
    unit: Vec<f32>,
    norms: Vec<f32>,
    searchable: Vec<bool>,
}

impl NormalizedView {
    pub fn new(emb: &EmbeddingSet) -> Self {
        let dim = emb.dim();
        let mut unit = Vec::with_capacity(emb.input_matrix().len());
        let mut norms = Vec::with_capacity(emb.len());
        let mut searchable = Vec::with_capacity(emb.len());
        for row in emb.input_matrix().chunks_exact(dim) {
            let norm = row.iter().map(|&v| v as f64 * v as f64).sum::<f64>().sqrt();
            if norm > 0.0 {
                unit.extend(row.iter().map(|&v| (v as f64 / norm) as f32));
            } else {
                unit.extend(std::iter::repeat_n(0.0, dim));
            }
            norms.push(norm as f32);
            searchable.push(norm > 0.0);
        }
        NormalizedView {
            vocab: emb.vocab().clone(),
            dim,
            unit,
            norms,
            searchable,
        }
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn unit(&self, idx: usize) -> &[f32] {
        &self.unit[idx * self.dim..(idx + 1) * self.dim]
    }

    pub fn unit_matrix(&self) -> &[f32] {
        &self.unit
    }

    pub fn norm(&self, idx: usize) -> f32 {
        self.norms[idx]
    }

    pub fn norms(&self) -> &[f32] {
        &self.norms
    }

    /// False for zero rows.
    pub fn is_searchable(&self, idx: usize) -> bool {
        self.searchable[idx]
    }

    /// Index of `token` under the exact-then-lowercase policy.
    pub fn resolve(&self, token: &str) -> Result<usize> {
        self.vocab
            .resolve(token)
            .ok_or_else(|| Error::OovWord(token.to_owned()))
    }
}

/// Shorthand for [`NormalizedView::new`].
pub fn normalize(emb: &EmbeddingSet) -> NormalizedView {
    NormalizedView::new(emb)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(words: &[&str], dim: usize, values: Vec<f32>) -> EmbeddingSet {
        let vocab = Vocabulary::from_words(words.iter().map(|w| w.to_string()).collect()).unwrap();
        EmbeddingSet::new(vocab, dim, values).unwrap()
    }

    #[test]
    fn text_layout_is_exact() {
        let emb = set(&["a"], 2, vec![0.5, -1.0]);
        let mut out = Vec::new();
        write_text(&emb, &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "1 2\na 0.50000000 -1.0000000\n"
        );
    }

    #[test]
    fn value_formatting() {
        assert_eq!(format_value(0.0), "0.0000000");
        assert_eq!(format_value(123.456), "123.45600");
        assert_eq!(format_value(1.5e-6), "1.5000001e-6");
        assert_eq!(format_value(2.5e9), "2.5000000e9");
        assert_eq!(format_value(9.999_999_9), "10.000000");
    }

    #[test]
    fn short_row_is_format_error() {
        let err = read_text("1 3\na 1 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Format { line: 2, .. }), "{err}");
    }

    #[test]
    fn duplicate_word_rejected() {
        let err = read_text("2 1\na 1\na 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::DuplicateWord(_)));
    }

    #[test]
    fn missing_rows_is_format_error() {
        assert!(matches!(
            read_text("3 1\na 1\n".as_bytes()),
            Err(Error::Format { line: 3, .. })
        ));
    }

    #[test]
    fn binary_truncation_names_the_word() {
        let emb = set(&["a", "b"], 4, (0..8).map(|i| i as f32).collect());
        let mut out = Vec::new();
        write_binary(&emb, &mut out).unwrap();
        out.truncate(out.len() - 3);
        match read_binary(out.as_slice()) {
            Err(Error::UnexpectedEof(msg)) => assert!(msg.contains("word 1"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn binary_invalid_utf8_token() {
        let mut data = b"1 1\n".to_vec();
        data.extend_from_slice(&[0xff, 0xfe, b' ']);
        data.extend_from_slice(&1.0f32.to_le_bytes());
        assert!(matches!(
            read_binary(data.as_slice()),
            Err(Error::Format { .. })
        ));
    }

    #[test]
    fn accepts_classic_newline_separated_binary() {
        let mut data = b"2 1\n".to_vec();
        for (w, v) in [("x", 1.0f32), ("y", 2.0)] {
            data.extend_from_slice(w.as_bytes());
            data.push(b' ');
            data.extend_from_slice(&v.to_le_bytes());
            data.push(b'\n');
        }
        let emb = read_binary(data.as_slice()).unwrap();
        assert_eq!(emb.vocab().words(), ["x", "y"]);
        assert_eq!(emb.input_matrix(), [1.0, 2.0]);
    }

    #[test]
    fn accepts_trailing_space_text_rows() {
        let emb = read_text("1 2\nw 0.1 0.2 \n".as_bytes()).unwrap();
        assert_eq!(emb.vector(0), [0.1, 0.2]);
    }

    #[test]
    fn tokens_with_spaces_cannot_be_saved() {
        let vocab = Vocabulary::from_words(vec!["a b".into()]).unwrap();
        let emb = EmbeddingSet::new(vocab, 1, vec![1.0]).unwrap();
        assert!(write_text(&emb, Vec::new()).is_err());
        assert!(write_binary(&emb, Vec::new()).is_err());
    }

    #[test]
    fn normalize_examples() {
        let emb = set(&["a", "b", "z"], 2, vec![3.0, 4.0, 1.0, 0.0, 0.0, 0.0]);
        let view = normalize(&emb);
        assert!((view.unit(0)[0] - 0.6).abs() < 1e-7 && (view.unit(0)[1] - 0.8).abs() < 1e-7);
        assert_eq!(view.norm(0), 5.0);
        assert_eq!(view.unit(1), [1.0, 0.0]);
        assert_eq!(view.norm(1), 1.0);
        assert!(!view.is_searchable(2));
        assert_eq!(emb.vector(0), [3.0, 4.0]);
    }
}
