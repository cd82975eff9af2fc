//! Split real/imaginary complex blocks.
//!
//! nalgebra only dispatches `f64` products to the blocked gemm kernel, so complex
//! blocks are stored as two real matrices and multiplied part by part.

use nalgebra::{Complex, DMatrix, DVector};

pub type Complex64 = Complex<f64>;

/// Complex matrix held as separate real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitMatrix {
    pub re: DMatrix<f64>,
    pub im: DMatrix<f64>,
}

impl SplitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { re: DMatrix::zeros(rows, cols), im: DMatrix::zeros(rows, cols) }
    }

    pub fn from_columns<'a, I>(rows: usize, columns: I) -> Self
    where
        I: IntoIterator<Item = &'a DVector<Complex64>>,
    {
        let cols: Vec<&DVector<Complex64>> = columns.into_iter().collect();
        let mut out = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                out.re[(i, j)] = c[i].re;
                out.im[(i, j)] = c[i].im;
            }
        }
        out
    }

    pub fn nrows(&self) -> usize {
        self.re.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.re.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.re[(i, j)], self.im[(i, j)])
    }

    pub fn column(&self, j: usize) -> DVector<Complex64> {
        DVector::from_fn(self.nrows(), |i, _| self.get(i, j))
    }

    /// `m * self` for a real matrix `m`.
    pub fn left_mul(&self, m: &DMatrix<f64>) -> Self {
        Self { re: m * &self.re, im: m * &self.im }
    }

    /// Multiplies row `i` by the real factor `d[i]`.
    pub fn scale_rows(&mut self, d: &[f64]) {
        for (i, &f) in d.iter().enumerate() {
            for j in 0..self.ncols() {
                self.re[(i, j)] *= f;
                self.im[(i, j)] *= f;
            }
        }
    }

    /// Multiplies row `i` by the unit phase `exp(-i * energies[i] * t)`.
    pub fn phase_rows(&mut self, energies: &[f64], t: f64) {
        for (i, &e) in energies.iter().enumerate() {
            let (s, c) = (-e * t).sin_cos();
            for j in 0..self.ncols() {
                let (a, b) = (self.re[(i, j)], self.im[(i, j)]);
                self.re[(i, j)] = a * c - b * s;
                self.im[(i, j)] = a * s + b * c;
            }
        }
    }

    /// Column-wise inner products `<a_j | b_j>`.
    pub fn column_overlaps(a: &Self, b: &Self) -> Vec<Complex64> {
        (0..a.ncols())
            .map(|j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..a.nrows() {
                    acc += a.get(i, j).conj() * b.get(i, j);
                }
                acc
            })
            .collect()
    }
}

/// Euclidean norm of a complex vector.
pub fn norm(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b>`.
pub fn inner(a: &DVector<Complex64>, b: &DVector<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn frobenius_sq(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x * x).sum()
}

/// Rows of `m` selected by `rows`, in order.
pub(crate) fn select_rows(m: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), m.ncols(), |i, j| m[(rows[i], j)])
}
