//! Streaming WARC 1.0/1.1 reader and a matching writer.
//!
//! Gzip input (one member per record, or one member for the whole file) is
//! detected from the magic bytes and decompressed transparently.

use std::io::{self, BufRead, BufReader, Read, Write};

use flate2::read::MultiGzDecoder;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecordType {
    Response,
    Request,
    Metadata,
    Other(String),
}

impl RecordType {
    pub fn parse(s: &str) -> Self {
        match s.to_ascii_lowercase().as_str() {
            "response" => RecordType::Response,
            "request" => RecordType::Request,
            "metadata" => RecordType::Metadata,
            _ => RecordType::Other(s.to_owned()),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            RecordType::Response => "response",
            RecordType::Request => "request",
            RecordType::Metadata => "metadata",
            RecordType::Other(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WarcRecord {
    pub version: String,
    /// Header fields in file order; lookups ignore case.
    pub headers: Vec<(String, String)>,
    pub record_type: RecordType,
    pub payload: Vec<u8>,
    pub declared_length: usize,
}

impl WarcRecord {
    /// A WARC/1.1 record with `WARC-Type` and `Content-Length` filled in.
    pub fn new(record_type: RecordType, extra_headers: &[(&str, &str)], payload: Vec<u8>) -> Self {
        let mut headers = vec![("WARC-Type".to_owned(), record_type.as_str().to_owned())];
        headers.extend(
            extra_headers
                .iter()
                .map(|(k, v)| ((*k).to_owned(), (*v).to_owned())),
        );
        headers.push(("Content-Length".to_owned(), payload.len().to_string()));
        WarcRecord {
            version: "WARC/1.1".to_owned(),
            headers,
            record_type,
            declared_length: payload.len(),
            payload,
        }
    }

    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }

    pub fn target_uri(&self) -> Option<&str> {
        self.header("WARC-Target-URI")
    }

    /// Body of an HTTP response payload, with the status line and headers
    /// removed. Payloads that are not HTTP messages are returned whole.
    pub fn http_body(&self) -> &[u8] {
        split_http(&self.payload).1
    }

    /// `Content-Type` of the embedded HTTP response, if any.
    pub fn http_content_type(&self) -> Option<String> {
        let (head, _) = split_http(&self.payload);
        let head = String::from_utf8_lossy(head?);
        head.lines()
            .skip(1)
            .filter_map(|l| l.split_once(':'))
            .find(|(k, _)| k.trim().eq_ignore_ascii_case("content-type"))
            .map(|(_, v)| v.trim().to_owned())
    }
}

fn split_http(payload: &[u8]) -> (Option<&[u8]>, &[u8]) {
    if !payload.starts_with(b"HTTP/") {
        return (None, payload);
    }
    if let Some(pos) = payload.windows(4).position(|w| w == b"\r\n\r\n") {
        return (Some(&payload[..pos]), &payload[pos + 4..]);
    }
    if let Some(pos) = payload.windows(2).position(|w| w == b"\n\n") {
        return (Some(&payload[..pos]), &payload[pos + 2..]);
    }
    (Some(payload), &[])
}

pub struct WarcReader<R> {
    inner: R,
    line: Vec<u8>,
    done: bool,
}

/// Iterate over the records of a (possibly gzipped) WARC stream.
pub fn read_warc<'a, R: Read + 'a>(stream: R) -> io::Result<WarcReader<Box<dyn BufRead + 'a>>> {
    let mut buffered = BufReader::new(stream);
    let magic = buffered.fill_buf()?;
    let inner: Box<dyn BufRead + 'a> = if magic.starts_with(&[0x1f, 0x8b]) {
        Box::new(BufReader::new(MultiGzDecoder::new(buffered)))
    } else {
        Box::new(buffered)
    };
    Ok(WarcReader::new(inner))
}

fn trim_eol(line: &[u8]) -> &[u8] {
    let mut end = line.len();
    while end > 0 && matches!(line[end - 1], b'\n' | b'\r') {
        end -= 1;
    }
    &line[..end]
}

impl<R: BufRead> WarcReader<R> {
    pub fn new(inner: R) -> Self {
        WarcReader {
            inner,
            line: Vec::new(),
            done: false,
        }
    }

    fn next_line(&mut self) -> Result<bool> {
        self.line.clear();
        Ok(self.inner.read_until(b'\n', &mut self.line)? > 0)
    }

    fn read_record(&mut self) -> Result<Option<WarcRecord>> {
        loop {
            if !self.next_line()? {
                return Ok(None);
            }
            if !trim_eol(&self.line).iter().all(u8::is_ascii_whitespace) {
                break;
            }
        }
        let version = String::from_utf8_lossy(trim_eol(&self.line))
            .trim()
            .to_owned();
        if version != "WARC/1.0" && version != "WARC/1.1" {
            return Err(Error::RecordMalformed(format!(
                "expected WARC/1.0 or WARC/1.1 version line, found {:?}",
                version.chars().take(40).collect::<String>()
            )));
        }

        let mut headers: Vec<(String, String)> = Vec::new();
        loop {
            if !self.next_line()? {
                return Err(Error::UnexpectedEof("inside record headers".into()));
            }
            let raw = trim_eol(&self.line);
            if raw.is_empty() {
                break;
            }
            let text = String::from_utf8_lossy(raw);
            if text.starts_with([' ', '\t']) {
                match headers.last_mut() {
                    Some((_, v)) => {
                        v.push(' ');
                        v.push_str(text.trim());
                    }
                    None => {
                        return Err(Error::RecordMalformed(
                            "continuation before first header".into(),
                        ))
                    }
                }
                continue;
            }
            let (name, value) = text
                .split_once(':')
                .ok_or_else(|| Error::RecordMalformed(format!("header without colon: {text:?}")))?;
            headers.push((name.trim().to_owned(), value.trim().to_owned()));
        }

        let find = |name: &str| {
            headers
                .iter()
                .find(|(k, _)| k.eq_ignore_ascii_case(name))
                .map(|(_, v)| v.as_str())
        };
        let declared_length: usize = find("Content-Length")
            .ok_or_else(|| Error::RecordMalformed("missing Content-Length".into()))?
            .parse()
            .map_err(|_| Error::RecordMalformed("Content-Length is not an integer".into()))?;
        let record_type = RecordType::parse(find("WARC-Type").unwrap_or("other"));

        let mut payload = Vec::with_capacity(declared_length.min(1 << 24));
        let got = (&mut self.inner)
            .take(declared_length as u64)
            .read_to_end(&mut payload)?;
        if got < declared_length {
            return Err(Error::UnexpectedEof(format!(
                "payload has {got} of {declared_length} declared bytes"
            )));
        }
        Ok(Some(WarcRecord {
            version,
            headers,
            record_type,
            payload,
            declared_length,
        }))
    }
}

impl<R: BufRead> Iterator for WarcReader<R> {
    type Item = Result<WarcRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.read_record() {
            Ok(Some(r)) => Some(Ok(r)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Serialize one record: version line, headers, blank line, payload, and
/// the two CRLFs that terminate a record.
pub fn write_record<W: Write>(mut w: W, record: &WarcRecord) -> io::Result<()> {
    write!(w, "{}\r\n", record.version)?;
    for (k, v) in &record.headers {
        write!(w, "{k}: {v}\r\n")?;
    }
    w.write_all(b"\r\n")?;
    w.write_all(&record.payload)?;
    w.write_all(b"\r\n\r\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collect(data: &[u8]) -> Vec<Result<WarcRecord>> {
        read_warc(data).unwrap().collect()
    }

    const ONE: &[u8] =
        b"WARC/1.0\r\nWARC-Type: response\r\nContent-Length: 11\r\n\r\nhello world\r\n\r\n";

    #[test]
    fn single_response_record() {
        let records = collect(ONE);
        assert_eq!(records.len(), 1);
        let r = records[0].as_ref().unwrap();
        assert_eq!(r.payload, b"hello world");
        assert_eq!(r.record_type, RecordType::Response);
        assert_eq!(r.declared_length, 11);
        assert_eq!(r.header("content-length"), Some("11"));
    }

    #[test]
    fn empty_stream() {
        assert!(collect(b"").is_empty());
    }

    #[test]
    fn two_records_in_order() {
        let mut data = ONE.to_vec();
        data.extend_from_slice(
            b"WARC/1.1\r\nWARC-Type: request\r\nContent-Length: 3\r\n\r\nabc\r\n\r\n",
        );
        let records: Vec<_> = collect(&data).into_iter().map(Result::unwrap).collect();
        assert_eq!(records.len(), 2);
        assert_eq!(records[1].record_type, RecordType::Request);
        assert_eq!(records[1].payload, b"abc");
    }

    #[test]
    fn missing_content_length() {
        let records = collect(b"WARC/1.0\r\nWARC-Type: response\r\n\r\nxyz");
        assert!(matches!(records[0], Err(Error::RecordMalformed(_))));
    }

    #[test]
    fn truncated_payload() {
        let records = collect(b"WARC/1.0\r\nContent-Length: 100\r\n\r\nshort");
        assert_eq!(records.len(), 1);
        assert!(matches!(records[0], Err(Error::UnexpectedEof(_))));
    }

    #[test]
    fn trailing_garbage_ends_iteration_with_error() {
        let mut data = ONE.to_vec();
        data.extend_from_slice(b"garbage\n");
        let records = collect(&data);
        assert_eq!(records.len(), 2);
        assert!(records[0].is_ok());
        assert!(matches!(records[1], Err(Error::RecordMalformed(_))));
    }

    #[test]
    fn gzip_per_record() {
        use flate2::write::GzEncoder;
        use flate2::Compression;
        let mut data = Vec::new();
        for payload in ["one", "two"] {
            let mut enc = GzEncoder::new(Vec::new(), Compression::fast());
            write_record(
                &mut enc,
                &WarcRecord::new(RecordType::Response, &[], payload.into()),
            )
            .unwrap();
            data.extend(enc.finish().unwrap());
        }
        let records: Vec<_> = collect(&data).into_iter().map(Result::unwrap).collect();
        assert_eq!(records.len(), 2);
        assert_eq!(records[1].payload, b"two");
    }

    #[test]
    fn http_body_split() {
        let payload =
            b"HTTP/1.1 200 OK\r\nContent-Type: text/html; charset=utf-8\r\n\r\n<p>hi</p>".to_vec();
        let r = WarcRecord::new(RecordType::Response, &[], payload);
        assert_eq!(r.http_body(), b"<p>hi</p>");
        assert_eq!(
            r.http_content_type().as_deref(),
            Some("text/html; charset=utf-8")
        );
        let plain = WarcRecord::new(RecordType::Metadata, &[], b"k: v".to_vec());
        assert_eq!(plain.http_body(), b"k: v");
        assert_eq!(plain.http_content_type(), None);
    }
}
