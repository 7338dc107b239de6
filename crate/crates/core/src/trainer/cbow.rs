//! One CBoW negative-sampling SGD step, generic over the float type and the
//! parameter storage so the same arithmetic backs both exact (`f64`,
//! gradient-checked) and shared lock-free (`f32`, hogwild) training.

use std::sync::atomic::{AtomicU32, Ordering};

use num_traits::Float;

/// Row-addressable parameter matrix.
pub trait ParamRows<F> {
    fn dim(&self) -> usize;
    fn rows(&self) -> usize;
    fn read_row(&self, row: usize, out: &mut [F]);
    /// `row += alpha * x`
    fn add_scaled(&mut self, row: usize, alpha: F, x: &[F]);
}

/// Exclusive row-major matrix.
pub struct DenseRows<'a, F> {
    data: &'a mut [F],
    dim: usize,
}

impl<'a, F> DenseRows<'a, F> {
    pub fn new(data: &'a mut [F], dim: usize) -> Self {
        assert!(dim > 0 && data.len().is_multiple_of(dim));
        DenseRows { data, dim }
    }
}

impl<F: Float> ParamRows<F> for DenseRows<'_, F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn rows(&self) -> usize {
        self.data.len() / self.dim
    }

    fn read_row(&self, row: usize, out: &mut [F]) {
        out.copy_from_slice(&self.data[row * self.dim..(row + 1) * self.dim]);
    }

    fn add_scaled(&mut self, row: usize, alpha: F, x: &[F]) {
        let dst = &mut self.data[row * self.dim..(row + 1) * self.dim];
        for (d, &v) in dst.iter_mut().zip(x) {
            *d = *d + alpha * v;
        }
    }
}

/// Shared `f32` matrix stored as relaxed atomics. Concurrent writers may lose
/// each other's updates (hogwild semantics) but never tear a value.
#[derive(Clone, Copy)]
pub struct AtomicRows<'a> {
    data: &'a [AtomicU32],
    dim: usize,
}

impl<'a> AtomicRows<'a> {
    pub fn new(data: &'a [AtomicU32], dim: usize) -> Self {
        assert!(dim > 0 && data.len().is_multiple_of(dim));
        AtomicRows { data, dim }
    }
}

pub(crate) fn to_atomic(values: &[f32]) -> Vec<AtomicU32> {
    values.iter().map(|v| AtomicU32::new(v.to_bits())).collect()
}

pub(crate) fn from_atomic(values: Vec<AtomicU32>) -> Vec<f32> {
    values
        .into_iter()
        .map(|v| f32::from_bits(v.into_inner()))
        .collect()
}

impl ParamRows<f32> for AtomicRows<'_> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn rows(&self) -> usize {
        self.data.len() / self.dim
    }

    fn read_row(&self, row: usize, out: &mut [f32]) {
        let src = &self.data[row * self.dim..(row + 1) * self.dim];
        for (o, s) in out.iter_mut().zip(src) {
            *o = f32::from_bits(s.load(Ordering::Relaxed));
        }
    }

    fn add_scaled(&mut self, row: usize, alpha: f32, x: &[f32]) {
        let dst = &self.data[row * self.dim..(row + 1) * self.dim];
        for (d, &v) in dst.iter().zip(x) {
            let cur = f32::from_bits(d.load(Ordering::Relaxed));
            d.store((cur + alpha * v).to_bits(), Ordering::Relaxed);
        }
    }
}

/// Reusable buffers for [`cbow_update`].
#[derive(Debug, Clone)]
pub struct Scratch<F> {
    hidden: Vec<F>,
    hidden_grad: Vec<F>,
    row: Vec<F>,
    sample_grads: Vec<F>,
}

impl<F: Float> Scratch<F> {
    pub fn new(dim: usize) -> Self {
        Scratch {
            hidden: vec![F::zero(); dim],
            hidden_grad: vec![F::zero(); dim],
            row: vec![F::zero(); dim],
            sample_grads: Vec::new(),
        }
    }
}

pub(crate) fn sigmoid<F: Float>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

/// `ln(1 + e^z)` without overflow.
pub(crate) fn softplus<F: Float>(z: F) -> F {
    z.max(F::zero()) + (-z.abs()).exp().ln_1p()
}

fn dot<F: Float>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Apply one SGD step on the CBoW negative-sampling loss
///
/// `L = -log σ(v'_target · h) - Σ_n log σ(-v'_n · h)`, with `h` the mean of
/// the context words' input vectors, and return `L` evaluated before the
/// update. Every gradient is computed from the pre-update parameters, so
/// repeated negatives contribute additively. An empty context is a no-op.
pub fn cbow_update<F, I, O>(
    input: &mut I,
    output: &mut O,
    context: &[usize],
    target: usize,
    negatives: &[usize],
    lr: F,
    scratch: &mut Scratch<F>,
) -> F
where
    F: Float,
    I: ParamRows<F> + ?Sized,
    O: ParamRows<F> + ?Sized,
{
    if context.is_empty() {
        return F::zero();
    }
    let Scratch {
        hidden,
        hidden_grad,
        row,
        sample_grads,
    } = scratch;

    hidden.iter_mut().for_each(|v| *v = F::zero());
    for &c in context {
        input.read_row(c, row);
        for (h, &r) in hidden.iter_mut().zip(row.iter()) {
            *h = *h + r;
        }
    }
    let n = F::from(context.len()).unwrap();
    hidden.iter_mut().for_each(|v| *v = *v / n);

    hidden_grad.iter_mut().for_each(|v| *v = F::zero());
    sample_grads.clear();
    let mut loss = F::zero();
    for (i, &s) in std::iter::once(&target).chain(negatives).enumerate() {
        output.read_row(s, row);
        let score = dot(hidden, row);
        let (label, term) = if i == 0 {
            (F::one(), softplus(-score))
        } else {
            (F::zero(), softplus(score))
        };
        loss = loss + term;
        let g = sigmoid(score) - label;
        sample_grads.push(g);
        for (hg, &r) in hidden_grad.iter_mut().zip(row.iter()) {
            *hg = *hg + g * r;
        }
    }

    for (&s, &g) in std::iter::once(&target)
        .chain(negatives)
        .zip(sample_grads.iter())
    {
        output.add_scaled(s, -lr * g, hidden);
    }
    let step = -lr / n;
    for &c in context {
        input.add_scaled(c, step, hidden_grad);
    }
    loss
}
