//! Local inference block of ESIM: cross-sentence attention, soft alignment,
//! and enhancement. Inputs are any encoder's outputs, one row per token.

use ndarray::{concatenate, Array1, Array2, ArrayView2, Axis};

use crate::{Error, Result};

/// Encoded sentences `Ā` (`l_a x d`) and `B̄` (`l_b x d`).
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedPair {
    a_bar: Array2<f64>,
    b_bar: Array2<f64>,
}

impl EncodedPair {
    pub fn new(a_bar: Array2<f64>, b_bar: Array2<f64>) -> Result<Self> {
        if a_bar.nrows() == 0 || b_bar.nrows() == 0 {
            return Err(Error::Shape("both sentences need at least one row".into()));
        }
        if a_bar.ncols() != b_bar.ncols() {
            return Err(Error::Shape(format!(
                "encoding widths differ: {} vs {}",
                a_bar.ncols(),
                b_bar.ncols()
            )));
        }
        if a_bar.iter().chain(b_bar.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Shape("encodings must be finite".into()));
        }
        Ok(EncodedPair { a_bar, b_bar })
    }

    pub fn a_bar(&self) -> &Array2<f64> {
        &self.a_bar
    }

    pub fn b_bar(&self) -> &Array2<f64> {
        &self.b_bar
    }

    pub fn len_a(&self) -> usize {
        self.a_bar.nrows()
    }

    pub fn len_b(&self) -> usize {
        self.b_bar.nrows()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalInference {
    pub e: Array2<f64>,
    pub a_tilde: Array2<f64>,
    pub b_tilde: Array2<f64>,
    pub m_a: Array2<f64>,
    pub m_b: Array2<f64>,
}

/// `e_ij = ā_i · b̄_j`
pub fn attention_matrix(pair: &EncodedPair) -> Array2<f64> {
    pair.a_bar.dot(&pair.b_bar.t())
}

/// Max-shifted softmax of each row of `x`.
pub fn softmax_rows(x: ArrayView2<'_, f64>) -> Array2<f64> {
    let mut out = x.to_owned();
    for mut row in out.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    out
}

/// `ã_i = Σ_j softmax_j(e_i·) b̄_j` and `b̃_j = Σ_i softmax_i(e_·j) ā_i`.
pub fn local_relevance(pair: &EncodedPair, e: &Array2<f64>) -> Result<(Array2<f64>, Array2<f64>)> {
    if e.dim() != (pair.len_a(), pair.len_b()) {
        return Err(Error::Shape(format!(
            "attention matrix is {:?}, expected ({}, {})",
            e.dim(),
            pair.len_a(),
            pair.len_b()
        )));
    }
    let over_b = softmax_rows(e.view());
    let over_a = softmax_rows(e.t());
    Ok((over_b.dot(&pair.b_bar), over_a.dot(&pair.a_bar)))
}

/// `[x̄; x̃; x̄ - x̃; x̄ ⊙ x̃]`, row-wise.
pub fn enhance(x_bar: &Array2<f64>, x_tilde: &Array2<f64>) -> Result<Array2<f64>> {
    if x_bar.dim() != x_tilde.dim() {
        return Err(Error::Shape(format!(
            "cannot enhance {:?} with {:?}",
            x_bar.dim(),
            x_tilde.dim()
        )));
    }
    let diff = x_bar - x_tilde;
    let prod = x_bar * x_tilde;
    Ok(concatenate(
        Axis(1),
        &[x_bar.view(), x_tilde.view(), diff.view(), prod.view()],
    )
    .expect("shapes checked"))
}

pub fn local_inference(pair: &EncodedPair) -> Result<LocalInference> {
    let e = attention_matrix(pair);
    let (a_tilde, b_tilde) = local_relevance(pair, &e)?;
    let m_a = enhance(&pair.a_bar, &a_tilde)?;
    let m_b = enhance(&pair.b_bar, &b_tilde)?;
    Ok(LocalInference {
        e,
        a_tilde,
        b_tilde,
        m_a,
        m_b,
    })
}

/// `[avg(v_a); max(v_a); avg(v_b); max(v_b)]`, pooling over rows.
pub fn pool_features(v_a: &Array2<f64>, v_b: &Array2<f64>) -> Result<Array1<f64>> {
    if v_a.nrows() == 0 || v_b.nrows() == 0 {
        return Err(Error::Shape("cannot pool an empty sequence".into()));
    }
    if v_a.ncols() != v_b.ncols() {
        return Err(Error::Shape(format!(
            "composition widths differ: {} vs {}",
            v_a.ncols(),
            v_b.ncols()
        )));
    }
    let max = |v: &Array2<f64>| v.fold_axis(Axis(0), f64::NEG_INFINITY, |&m, &x| m.max(x));
    let avg = |v: &Array2<f64>| v.mean_axis(Axis(0)).expect("non-empty");
    let parts = [avg(v_a), max(v_a), avg(v_b), max(v_b)];
    Ok(
        concatenate(Axis(0), &parts.iter().map(|p| p.view()).collect::<Vec<_>>())
            .expect("1-D parts"),
    )
}
