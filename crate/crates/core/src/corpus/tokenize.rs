use unicode_normalization::UnicodeNormalization;

const ELISION_PREFIXES: &[&str] = &[
    "c", "d", "j", "l", "m", "n", "s", "t", "qu", "jusqu", "lorsqu", "puisqu", "quoiqu",
];

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '«' | '»' | '“' | '”' | '‘' | '’' | '„' | '…' | '–' | '—' | '¡' | '¿' | '·'
        )
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '’'
}

/// Split an elided article or pronoun (`l'`, `qu'`, ...) off the front of
/// `word`. The apostrophe stays with the prefix and is normalized to `'`.
fn split_elision(word: &str, out: &mut Vec<String>) -> usize {
    let Some((pos, c)) = word.char_indices().find(|&(_, c)| is_apostrophe(c)) else {
        return 0;
    };
    let prefix = &word[..pos];
    let after = pos + c.len_utf8();
    if after >= word.len() || !ELISION_PREFIXES.contains(&prefix.to_lowercase().as_str()) {
        return 0;
    }
    out.push(format!("{prefix}'"));
    after
}

/// NFC-normalize, split on whitespace, peel leading and trailing
/// punctuation into single-character tokens, and split French elisions
/// after the apostrophe.
pub fn tokenize(text: &str, lowercase: bool) -> Vec<String> {
    let normalized: String = if lowercase {
        text.nfc().collect::<String>().to_lowercase()
    } else {
        text.nfc().collect()
    };
    let mut out = Vec::new();
    for chunk in normalized.split_whitespace() {
        let start = chunk
            .char_indices()
            .find(|&(_, c)| !is_punct(c))
            .map_or(chunk.len(), |(i, _)| i);
        out.extend(chunk[..start].chars().map(String::from));
        if start == chunk.len() {
            continue;
        }
        let rest = &chunk[start..];
        let end = rest
            .char_indices()
            .rev()
            .find(|&(_, c)| !is_punct(c))
            .map_or(0, |(i, c)| i + c.len_utf8());
        let core = &rest[..end];
        let skip = split_elision(core, &mut out);
        if skip < core.len() {
            out.push(core[skip..].to_owned());
        }
        out.extend(rest[end..].chars().map(String::from));
    }
    out
}
