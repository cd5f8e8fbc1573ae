use alloc::vec::Vec;

use num_complex::Complex64;

/// Dense row-major complex matrix.
#[derive(Debug, Clone)]
pub(crate) struct Dense {
    n: usize,
    data: Vec<Complex64>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: alloc::vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn at(&mut self, row: usize, col: usize) -> &mut Complex64 {
        &mut self.data[row * self.n + col]
    }

    fn max_row_sum(&self) -> f64 {
        self.data
            .chunks(self.n)
            .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Solves `self · x = b` by Gaussian elimination with partial pivoting.
    ///
    /// On failure returns the smallest pivot relative to the matrix norm.
    pub fn solve(mut self, mut b: Vec<Complex64>) -> Result<Vec<Complex64>, f64> {
        let n = self.n;
        let scale = self.max_row_sum().max(f64::MIN_POSITIVE);
        let mut min_pivot = f64::INFINITY;
        for col in 0..n {
            let (pivot_row, pivot_abs) = (col..n)
                .map(|r| (r, self.data[r * n + col].norm()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            min_pivot = min_pivot.min(pivot_abs / scale);
            if pivot_abs / scale < 1e-14 {
                return Err(min_pivot);
            }
            if pivot_row != col {
                for k in 0..n {
                    self.data.swap(col * n + k, pivot_row * n + k);
                }
                b.swap(col, pivot_row);
            }
            let inv = self.data[col * n + col].inv();
            for r in col + 1..n {
                let factor = self.data[r * n + col] * inv;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in col..n {
                    let upper = self.data[col * n + k];
                    self.data[r * n + k] -= factor * upper;
                }
                let upper = b[col];
                b[r] -= factor * upper;
            }
        }
        for col in (0..n).rev() {
            let mut acc = b[col];
            for k in col + 1..n {
                acc -= self.data[col * n + k] * b[k];
            }
            b[col] = acc / self.data[col * n + col];
        }
        Ok(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let mut m = Dense::zeros(3);
        let entries = [
            [(0.0, 0.0), (2.0, 1.0), (1.0, 0.0)],
            [(1.0, -1.0), (0.0, 0.0), (3.0, 0.0)],
            [(0.5, 0.0), (1.0, 0.0), (0.0, 2.0)],
        ];
        for (r, row) in entries.iter().enumerate() {
            for (c, &(re, im)) in row.iter().enumerate() {
                *m.at(r, c) = Complex64::new(re, im);
            }
        }
        let x = [Complex64::new(1.0, 2.0), Complex64::new(-1.0, 0.5), Complex64::new(0.0, -3.0)];
        let b: Vec<_> = entries
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&x)
                    .map(|(&(re, im), xi)| Complex64::new(re, im) * xi)
                    .sum()
            })
            .collect();
        let got = m.solve(b).unwrap();
        for (g, e) in got.iter().zip(&x) {
            assert!((g - e).norm() < 1e-14);
        }
    }

    #[test]
    fn reports_singular_matrix() {
        let mut m = Dense::zeros(2);
        *m.at(0, 0) = Complex64::new(1.0, 0.0);
        *m.at(0, 1) = Complex64::new(2.0, 0.0);
        *m.at(1, 0) = Complex64::new(2.0, 0.0);
        *m.at(1, 1) = Complex64::new(4.0, 0.0);
        assert!(m.solve(alloc::vec![Complex64::new(1.0, 0.0); 2]).is_err());
    }
}
