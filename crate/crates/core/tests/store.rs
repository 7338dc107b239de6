mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use motvec_core::store::{
    self, format_value, load, read_binary, read_text, save, write_binary, write_text,
};
use motvec_core::{EmbeddingSet, Error, NormalizedView, Vocabulary};

fn set(words: &[&str], dim: usize, values: Vec<f32>) -> EmbeddingSet {
    let vocab = Vocabulary::from_words(words.iter().map(|w| w.to_string()).collect()).unwrap();
    EmbeddingSet::new(vocab, dim, values).unwrap()
}

proptest! {
    #[test]
    fn formatted_values_parse_back_closely(x in prop::num::f32::NORMAL) {
        let s = format_value(x);
        let y: f32 = s.parse().unwrap();
        prop_assert!(((y - x) / x).abs() <= 5e-7, "{x} -> {s}");
        prop_assert_eq!(format_value(y), s);
    }

    #[test]
    fn binary_round_trip_is_bit_exact(values in prop::collection::vec(any::<f32>().prop_filter("finite", |v| v.is_finite()), 6)) {
        let emb = set(&["un", "deux", "trois"], 2, values);
        let mut buf = Vec::new();
        write_binary(&emb, &mut buf).unwrap();
        let back = read_binary(&buf[..]).unwrap();
        let same = back.input_matrix().iter().zip(emb.input_matrix()).all(|(a, b)| a.to_bits() == b.to_bits());
        prop_assert!(same);
    }

    #[test]
    fn normalize_is_idempotent(values in prop::collection::vec(-10.0f32..10.0, 8)) {
        let emb = set(&["a", "b"], 4, values);
        let view = NormalizedView::new(&emb);
        let again = NormalizedView::new(&set(&["a", "b"], 4, view.unit_matrix().to_vec()));
        for i in 0..2 {
            if view.is_searchable(i) {
                let n: f64 = view.unit(i).iter().map(|&v| v as f64 * v as f64).sum::<f64>().sqrt();
                prop_assert!((n - 1.0).abs() <= 1e-6);
                for (x, y) in view.unit(i).iter().zip(again.unit(i)) {
                    prop_assert!((x - y).abs() <= 1e-6);
                }
            }
        }
    }
}

#[test]
fn text_formatting_is_a_fixed_point_across_the_f32_range() {
    let mut bits: u32 = 0x0080_0000;
    while bits < 0x7f80_0000 {
        for x in [f32::from_bits(bits), -f32::from_bits(bits)] {
            let s = format_value(x);
            let y: f32 = s.parse().unwrap();
            assert_eq!(format_value(y), s, "{x:e}");
        }
        bits += 9_973;
    }
}

#[test]
fn documented_text_layout() {
    let mut buf = Vec::new();
    write_text(&set(&["a"], 2, vec![0.5, -1.0]), &mut buf).unwrap();
    assert_eq!(
        String::from_utf8(buf).unwrap(),
        "1 2\na 0.50000000 -1.0000000\n"
    );
}

#[test]
fn malformed_text_files() {
    assert!(matches!(
        read_text(&b"1 3\na 1 2\n"[..]),
        Err(Error::Format { line: 2, .. })
    ));
    assert!(matches!(read_text(&b"2 1\na 1\na 2\n"[..]), Err(Error::DuplicateWord(w)) if w == "a"));
}

#[test]
fn truncated_binary_names_the_word() {
    let emb = set(&["a", "b"], 3, vec![1.0; 6]);
    let mut buf = Vec::new();
    write_binary(&emb, &mut buf).unwrap();
    buf.truncate(buf.len() - 5);
    let err = read_binary(&buf[..]).unwrap_err();
    assert!(matches!(err, Error::UnexpectedEof(_)));
    assert!(err.to_string().contains('1'), "{err}");
}

#[test]
fn invalid_utf8_token_is_a_format_error() {
    let mut buf = b"1 1\n".to_vec();
    buf.extend([0xff, 0xfe, b' ']);
    buf.extend(1.0f32.to_le_bytes());
    assert!(matches!(read_binary(&buf[..]), Err(Error::Format { .. })));
}

#[test]
fn cross_format_agreement_through_files() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let emb = common::random_embeddings(100, 16, &mut rng);
    let dir = tempfile::tempdir().unwrap();
    let (vec_path, bin_path) = (dir.path().join("m.vec"), dir.path().join("m.bin"));
    save(&emb, &vec_path).unwrap();
    save(&emb, &bin_path).unwrap();
    let (t, b) = (load(&vec_path).unwrap(), load(&bin_path).unwrap());
    assert_eq!(t.vocab().words(), b.vocab().words());
    for (x, y) in t.input_matrix().iter().zip(b.input_matrix()) {
        assert!((x - y).abs() <= 5e-7);
    }
    let missing = store::load(&dir.path().join("absent.bin")).unwrap_err();
    assert!(missing.to_string().contains("absent.bin"), "{missing}");
}

#[test]
fn classic_writer_newlines_are_tolerated() {
    let mut buf = b"2 1\n".to_vec();
    for (w, v) in [("a", 1.5f32), ("b", -2.0)] {
        buf.extend(w.as_bytes());
        buf.push(b' ');
        buf.extend(v.to_le_bytes());
        buf.push(b'\n');
    }
    let emb = read_binary(&buf[..]).unwrap();
    assert_eq!(emb.vocab().words(), ["a", "b"]);
    assert_eq!(emb.input_matrix(), [1.5, -2.0]);
}

#[test]
fn normalized_rows() {
    let view = NormalizedView::new(&set(
        &["x", "u", "z"],
        2,
        vec![3.0, 4.0, 1.0, 0.0, 0.0, 0.0],
    ));
    assert!((view.unit(0)[0] - 0.6).abs() < 1e-7 && (view.unit(0)[1] - 0.8).abs() < 1e-7);
    assert_eq!(view.norm(0), 5.0);
    assert_eq!(view.unit(1), [1.0, 0.0]);
    assert!(!view.is_searchable(2));
}
