use crate::error::{Error, Result};

/// Dense row-major matrix of f64. Immutable once handed to callers:
/// every operation returns a new matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl Matrix {
    pub fn from_vec(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Argument(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if values.len() != rows * cols {
            return Err(Error::Argument(format!(
                "matrix {rows}x{cols} needs {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        Ok(Matrix { rows, cols, values })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            values: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.values[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        debug_assert!(r < self.rows && c < self.cols);
        self.values[r * self.cols + c]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    /// New matrix from a subset of this one's rows, in the given order.
    pub fn take_rows(&self, indices: &[usize]) -> Matrix {
        let mut values = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: indices.len(),
            cols: self.cols,
            values,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut values = vec![0.0; self.values.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                values[c * self.rows + r] = self.values[r * self.cols + c];
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            values,
        }
    }

    pub fn scale(&self, s: f64) -> Matrix {
        self.map(|v| v * s)
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    fn same_shape(&self, other: &Matrix, context: &'static str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape {
                context,
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other, "elementwise add")?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other, "elementwise sub")?;
        Ok(self.zip(other, |a, b| a - b))
    }

    pub fn hadamard(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other, "elementwise product")?;
        Ok(self.zip(other, |a, b| a * b))
    }

    fn zip(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// 1 x cols matrix of column sums.
    pub fn col_sums(&self) -> Matrix {
        let mut sums = vec![0.0; self.cols];
        for r in 0..self.rows {
            for c in 0..self.cols {
                sums[c] += self.values[r * self.cols + c];
            }
        }
        Matrix {
            rows: 1,
            cols: self.cols,
            values: sums,
        }
    }
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.rows {
        return Err(Error::Shape {
            context: "matmul inner dimensions",
            left_rows: a.rows,
            left_cols: a.cols,
            right_rows: b.rows,
            right_cols: b.cols,
        });
    }
    let mut values = vec![0.0; a.rows * b.cols];
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.values[i * a.cols + k];
            if aik == 0.0 {
                continue;
            }
            let b_row = &b.values[k * b.cols..(k + 1) * b.cols];
            let out = &mut values[i * b.cols..(i + 1) * b.cols];
            for (o, &bv) in out.iter_mut().zip(b_row) {
                *o += aik * bv;
            }
        }
    }
    Ok(Matrix {
        rows: a.rows,
        cols: b.cols,
        values,
    })
}

/// Adds a 1 x cols bias row to every row of `m`.
pub fn add_row_broadcast(m: &Matrix, bias: &Matrix) -> Result<Matrix> {
    if bias.rows != 1 || bias.cols != m.cols {
        return Err(Error::Shape {
            context: "row broadcast",
            left_rows: m.rows,
            left_cols: m.cols,
            right_rows: bias.rows,
            right_cols: bias.cols,
        });
    }
    let mut values = m.values.clone();
    for r in 0..m.rows {
        for c in 0..m.cols {
            values[r * m.cols + c] += bias.values[c];
        }
    }
    Ok(Matrix {
        rows: m.rows,
        cols: m.cols,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, v: &[f64]) -> Matrix {
        Matrix::from_vec(rows, cols, v.to_vec()).unwrap()
    }

    #[test]
    fn matmul_scalar() {
        let r = matmul(&m(1, 1, &[2.0]), &m(1, 1, &[3.0])).unwrap();
        assert_eq!(r.values(), &[6.0]);
    }

    #[test]
    fn matmul_identity() {
        let a = m(3, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        let r = matmul(&Matrix::identity(3), &a).unwrap();
        assert_eq!(r, a);
    }

    #[test]
    fn matmul_hand_computed() {
        let a = m(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let b = m(2, 1, &[5.0, 6.0]);
        let r = matmul(&a, &b).unwrap();
        assert_eq!(r.values(), &[17.0, 39.0]);
    }

    #[test]
    fn matmul_dimension_mismatch_names_shapes() {
        let e = matmul(&m(2, 3, &[0.0; 6]), &m(2, 2, &[0.0; 4])).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("2x3") && msg.contains("2x2"), "{msg}");
    }

    #[test]
    fn broadcast_basic() {
        let r = add_row_broadcast(&m(1, 2, &[0.0, 0.0]), &m(1, 2, &[1.0, 2.0])).unwrap();
        assert_eq!(r.values(), &[1.0, 2.0]);
    }

    #[test]
    fn broadcast_zero_bias_is_identity() {
        let a = m(2, 2, &[1.0, 1.0, 2.0, 2.0]);
        let r = add_row_broadcast(&a, &Matrix::zeros(1, 2)).unwrap();
        assert_eq!(r, a);
    }

    #[test]
    fn broadcast_hand_check() {
        let a = m(2, 2, &[1.0, 1.0, 2.0, 2.0]);
        let r = add_row_broadcast(&a, &m(1, 2, &[10.0, 20.0])).unwrap();
        assert_eq!(r.values(), &[11.0, 21.0, 12.0, 22.0]);
    }

    #[test]
    fn broadcast_width_mismatch() {
        assert!(add_row_broadcast(&m(1, 3, &[0.0; 3]), &m(1, 2, &[0.0; 2])).is_err());
    }
}
