use ndarray::{Array1, Array2};
use rand::Rng;

use crate::{Error, Result};

pub const DROPOUT_RATE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Dropout, linear `h -> h'`, tanh, dropout, linear `h' -> 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadParams {
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
    pub dropout_rate: f64,
}

impl HeadParams {
    pub fn new(w1: Array2<f64>, b1: Array1<f64>, w2: Array2<f64>, b2: Array1<f64>) -> Result<Self> {
        if w1.ncols() != b1.len() || w2.nrows() != w1.ncols() || w2.ncols() != 2 || b2.len() != 2 {
            return Err(Error::Shape(format!(
                "inconsistent head shapes: w1 {:?}, b1 {}, w2 {:?}, b2 {}",
                w1.dim(),
                b1.len(),
                w2.dim(),
                b2.len()
            )));
        }
        Ok(HeadParams {
            w1,
            b1,
            w2,
            b2,
            dropout_rate: DROPOUT_RATE,
        })
    }
}

/// Inverted dropout: zero with probability `rate`, scale survivors by
/// `1 / (1 - rate)`.
fn dropout<R: Rng + ?Sized>(x: &mut Array1<f64>, rate: f64, rng: &mut R) {
    let keep = 1.0 - rate;
    x.mapv_inplace(|v| {
        if rng.random::<f64>() < rate {
            0.0
        } else {
            v / keep
        }
    });
}

pub fn classification_head<R: Rng + ?Sized>(
    x: &Array1<f64>,
    params: &HeadParams,
    mode: Mode,
    rng: &mut R,
) -> Result<Array1<f64>> {
    if x.len() != params.w1.nrows() {
        return Err(Error::Shape(format!(
            "head expects {} inputs, got {}",
            params.w1.nrows(),
            x.len()
        )));
    }
    let mut input = x.clone();
    if mode == Mode::Train {
        dropout(&mut input, params.dropout_rate, rng);
    }
    let mut hidden = (params.w1.t().dot(&input) + &params.b1).mapv(f64::tanh);
    if mode == Mode::Train {
        dropout(&mut hidden, params.dropout_rate, rng);
    }
    Ok(params.w2.t().dot(&hidden) + &params.b2)
}

/// Eval-mode projection `relu(m·w + b)` applied to each row of `m`.
pub fn projection(m: &Array2<f64>, w: &Array2<f64>, b: &Array1<f64>) -> Result<Array2<f64>> {
    if m.ncols() != w.nrows() || w.ncols() != b.len() {
        return Err(Error::Shape(format!(
            "projection shapes: input {:?}, weights {:?}, bias {}",
            m.dim(),
            w.dim(),
            b.len()
        )));
    }
    Ok((m.dot(w) + b).mapv(|v| v.max(0.0)))
}
