//! Tag-stripping text extraction. Not a DOM parser: script, style, and
//! comments are dropped, block-level tags become line breaks, and every
//! other tag disappears.

const BLOCK_TAGS: &[&str] = &[
    "address",
    "article",
    "aside",
    "blockquote",
    "body",
    "br",
    "caption",
    "dd",
    "div",
    "dl",
    "dt",
    "fieldset",
    "figcaption",
    "figure",
    "footer",
    "form",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "head",
    "header",
    "hr",
    "html",
    "li",
    "main",
    "nav",
    "ol",
    "option",
    "p",
    "pre",
    "section",
    "table",
    "tbody",
    "td",
    "tfoot",
    "th",
    "thead",
    "title",
    "tr",
    "ul",
];

const RAW_TEXT_TAGS: &[&str] = &["script", "style"];

fn named_entity(name: &str) -> Option<&'static str> {
    Some(match name {
        "amp" => "&",
        "lt" => "<",
        "gt" => ">",
        "quot" => "\"",
        "apos" => "'",
        "nbsp" => "\u{a0}",
        "laquo" => "«",
        "raquo" => "»",
        "lsquo" => "‘",
        "rsquo" => "’",
        "ldquo" => "“",
        "rdquo" => "”",
        "hellip" => "…",
        "ndash" => "–",
        "mdash" => "—",
        "euro" => "€",
        "copy" => "©",
        "reg" => "®",
        "deg" => "°",
        "middot" => "·",
        "agrave" => "à",
        "aacute" => "á",
        "acirc" => "â",
        "auml" => "ä",
        "aelig" => "æ",
        "ccedil" => "ç",
        "egrave" => "è",
        "eacute" => "é",
        "ecirc" => "ê",
        "euml" => "ë",
        "igrave" => "ì",
        "iacute" => "í",
        "icirc" => "î",
        "iuml" => "ï",
        "ntilde" => "ñ",
        "ograve" => "ò",
        "oacute" => "ó",
        "ocirc" => "ô",
        "ouml" => "ö",
        "oelig" => "œ",
        "ugrave" => "ù",
        "uacute" => "ú",
        "ucirc" => "û",
        "uuml" => "ü",
        "yuml" => "ÿ",
        "szlig" => "ß",
        "Agrave" => "À",
        "Aacute" => "Á",
        "Acirc" => "Â",
        "Auml" => "Ä",
        "AElig" => "Æ",
        "Ccedil" => "Ç",
        "Egrave" => "È",
        "Eacute" => "É",
        "Ecirc" => "Ê",
        "Euml" => "Ë",
        "Icirc" => "Î",
        "Iuml" => "Ï",
        "Ntilde" => "Ñ",
        "Ocirc" => "Ô",
        "Ouml" => "Ö",
        "OElig" => "Œ",
        "Ugrave" => "Ù",
        "Ucirc" => "Û",
        "Uuml" => "Ü",
        _ => return None,
    })
}

/// Decode the entity starting at `s[0] == '&'`. Returns the decoded text and
/// the number of bytes consumed.
fn decode_entity(s: &str) -> Option<(char, Option<&'static str>, usize)> {
    let end = s[1..].find(';').map(|i| i + 1)?;
    if end > 12 {
        return None;
    }
    let body = &s[1..end];
    if let Some(num) = body.strip_prefix('#') {
        let code = if let Some(hex) = num.strip_prefix(['x', 'X']) {
            u32::from_str_radix(hex, 16).ok()?
        } else {
            num.parse().ok()?
        };
        let c = char::from_u32(code).filter(|&c| c != '\0')?;
        return Some((c, None, end + 1));
    }
    named_entity(body).map(|t| ('\0', Some(t), end + 1))
}

/// Decode character entities in plain text.
pub fn decode_entities(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(pos) = rest.find('&') {
        out.push_str(&rest[..pos]);
        rest = &rest[pos..];
        match decode_entity(rest) {
            Some((c, named, used)) => {
                match named {
                    Some(t) => out.push_str(t),
                    None => out.push(c),
                }
                rest = &rest[used..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

fn find_ci(haystack: &str, needle: &str) -> Option<usize> {
    let h = haystack.as_bytes();
    let n = needle.as_bytes();
    h.windows(n.len()).position(|w| w.eq_ignore_ascii_case(n))
}

/// Name of the tag opening at `tag[0] == '<'`, lowercased, without `/`.
fn tag_name(tag: &str) -> String {
    tag[1..]
        .trim_start_matches('/')
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase()
}

fn looks_like_tag(rest: &str) -> bool {
    rest[1..]
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || matches!(c, '/' | '!' | '?'))
}

/// Strip tags from `html` and return clean text, one block per line.
pub fn extract_text(html: &str) -> String {
    let mut raw = String::with_capacity(html.len());
    let mut rest = html;
    while let Some(pos) = rest.find(['<', '&']) {
        raw.push_str(&rest[..pos]);
        rest = &rest[pos..];
        if rest.starts_with('&') {
            match decode_entity(rest) {
                Some((c, named, used)) => {
                    match named {
                        Some(t) => raw.push_str(t),
                        None => raw.push(c),
                    }
                    rest = &rest[used..];
                }
                None => {
                    raw.push('&');
                    rest = &rest[1..];
                }
            }
            continue;
        }
        if rest.starts_with("<!--") {
            rest = match rest[4..].find("-->") {
                Some(end) => &rest[4 + end + 3..],
                None => "",
            };
            continue;
        }
        if !looks_like_tag(rest) {
            raw.push('<');
            rest = &rest[1..];
            continue;
        }
        let Some(close) = rest.find('>') else {
            // unterminated tag: drop the remainder
            rest = "";
            break;
        };
        let name = tag_name(&rest[..close]);
        let closing = rest[1..].starts_with('/');
        rest = &rest[close + 1..];
        if !closing && RAW_TEXT_TAGS.contains(&name.as_str()) {
            let end_tag = format!("</{name}");
            rest = match find_ci(rest, &end_tag) {
                Some(start) => match rest[start..].find('>') {
                    Some(gt) => &rest[start + gt + 1..],
                    None => "",
                },
                None => "",
            };
            raw.push('\n');
            continue;
        }
        if BLOCK_TAGS.contains(&name.as_str()) {
            raw.push('\n');
        }
    }
    raw.push_str(rest);
    normalize_whitespace(&raw)
}

/// Collapse whitespace runs to one space within each line, trim lines, and
/// drop empty lines.
pub fn normalize_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for line in text.split(['\n', '\r']) {
        let mut first = true;
        for word in line
            .split(|c: char| c.is_whitespace())
            .filter(|w| !w.is_empty())
        {
            if first {
                if !out.is_empty() {
                    out.push('\n');
                }
                first = false;
            } else {
                out.push(' ');
            }
            out.push_str(word);
        }
    }
    out
}
