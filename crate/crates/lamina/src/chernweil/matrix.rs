//! Small dense complex matrices sized for projection fields (2x2 up to
//! 9x9). Storage is inline up to 4x4 so the hot sampling loops stay off the
//! heap.

use num_complex::Complex64;
use smallvec::SmallVec;

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: SmallVec<[Complex64; 16]>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: smallvec::smallvec![Complex64::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        let mut m = CMatrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "square matrices only");
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    /// Rank-one projector `w w^*` for a unit vector `w`.
    pub fn outer(w: &[Complex64]) -> Self {
        let n = w.len();
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = w[i] * w[j].conj();
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.n + j] = value;
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> CMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= factor;
        }
        out
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        let n = self.n;
        assert_eq!(n, rhs.n);
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    /// `tr(self * rhs)` without forming the product.
    pub fn trace_mul(&self, rhs: &CMatrix) -> Complex64 {
        let n = self.n;
        assert_eq!(n, rhs.n);
        let mut sum = Complex64::ZERO;
        for i in 0..n {
            for j in 0..n {
                sum += self.data[i * n + j] * rhs.data[j * n + i];
            }
        }
        sum
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|| M^2 - M ||`, zero for exact projectors.
    pub fn projector_defect(&self) -> f64 {
        self.mul(self).sub(self).frobenius_norm()
    }

    /// `|| M - M^* ||`, zero for Hermitian matrices.
    pub fn hermitian_defect(&self) -> f64 {
        self.sub(&self.adjoint()).frobenius_norm()
    }

    pub fn block_diag(blocks: &[&CMatrix]) -> CMatrix {
        let n: usize = blocks.iter().map(|b| b.n).sum();
        let mut out = CMatrix::zeros(n);
        let mut offset = 0;
        for block in blocks {
            for i in 0..block.n {
                for j in 0..block.n {
                    out.data[(offset + i) * n + (offset + j)] = block.data[i * block.n + j];
                }
            }
            offset += block.n;
        }
        out
    }

    /// Determinant by LU with partial pivoting; exact enough for the small
    /// sizes used here.
    pub fn det(&self) -> Complex64 {
        let n = self.n;
        let mut lu = self.data.clone();
        let mut det = Complex64::ONE;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&a, &b| {
                    lu[a * n + col]
                        .norm_sqr()
                        .total_cmp(&lu[b * n + col].norm_sqr())
                })
                .unwrap();
            if lu[pivot * n + col].norm_sqr() == 0.0 {
                return Complex64::ZERO;
            }
            if pivot != col {
                for j in 0..n {
                    lu.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            let diagonal = lu[col * n + col];
            det *= diagonal;
            for row in (col + 1)..n {
                let factor = lu[row * n + col] / diagonal;
                for j in col..n {
                    let delta = factor * lu[col * n + j];
                    lu[row * n + j] -= delta;
                }
            }
        }
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn multiplication_and_trace() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]);
        let b = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        let ab = a.mul(&b);
        assert_eq!(ab.get(0, 0), c(2.0, 0.0));
        assert_eq!(ab.get(0, 1), c(1.0, 0.0));
        assert_eq!(ab.get(1, 1), c(0.0, 1.0));
        assert_eq!(a.trace_mul(&b), ab.trace());
    }

    #[test]
    fn outer_products_are_projectors() {
        let norm = (0.5f64).sqrt();
        let w = [c(norm, 0.0), c(0.0, norm)];
        let p = CMatrix::outer(&w);
        assert!(p.projector_defect() < 1e-15);
        assert!(p.hermitian_defect() < 1e-15);
        assert!((p.trace() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn determinant_matches_hand_values() {
        let m = CMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(3.0, 0.0)],
        ]);
        assert!((m.det() - c(5.0, 0.0)).norm() < 1e-12);

        // det(1 + AB) = det(1 + BA) for random-ish rectangular-free pairs.
        let a = CMatrix::from_rows(&[
            vec![c(0.3, 0.1), c(-1.2, 0.4), c(0.0, 0.9)],
            vec![c(1.0, -0.2), c(0.5, 0.0), c(0.2, 0.2)],
            vec![c(-0.7, 0.3), c(0.1, -1.0), c(0.4, 0.0)],
        ]);
        let b = CMatrix::from_rows(&[
            vec![c(-0.5, 0.2), c(0.8, 0.0), c(0.3, -0.3)],
            vec![c(0.2, 0.7), c(-0.1, 0.1), c(1.1, 0.0)],
            vec![c(0.9, -0.4), c(0.0, 0.6), c(-0.2, 0.2)],
        ]);
        let id = CMatrix::identity(3);
        let lhs = id.add(&a.mul(&b)).det();
        let rhs = id.add(&b.mul(&a)).det();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn block_diagonal_assembly() {
        let a = CMatrix::identity(2).scale(c(2.0, 0.0));
        let b = CMatrix::identity(1).scale(c(3.0, 0.0));
        let d = CMatrix::block_diag(&[&a, &b]);
        assert_eq!(d.size(), 3);
        assert_eq!(d.get(0, 0), c(2.0, 0.0));
        assert_eq!(d.get(2, 2), c(3.0, 0.0));
        assert_eq!(d.get(0, 2), Complex64::ZERO);
        assert!((d.det() - c(12.0, 0.0)).norm() < 1e-12);
    }
}
