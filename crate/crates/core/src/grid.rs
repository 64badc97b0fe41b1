//! Periodic 2-D fields and the forward/backward difference calculus.
//!
//! A [`ScalarField`] stores `rows × cols` samples in row-major order; the
//! sample at `(i, j)` approximates `v(i·h, j·h)`. Axis 1 runs along `i`
//! (rows), axis 2 along `j` (columns). Every difference operator wraps
//! periodically, so `v(rows, j) = v(0, j)` and `v(-1, j) = v(rows - 1, j)`.
//!
//! All operators return new fields. Binary operators require matching
//! dimensions and spacing; a mismatch is a caller bug and panics.

/// Selects the one-sided difference used by an operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// `(v(i+1) - v(i)) / h`
    Forward,
    /// `(v(i) - v(i-1)) / h`
    Backward,
}

impl Scheme {
    /// The other one.
    pub fn adjoint(self) -> Scheme {
        match self {
            Scheme::Forward => Scheme::Backward,
            Scheme::Backward => Scheme::Forward,
        }
    }
}

/// Difference axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    /// First index (rows, `i`).
    One,
    /// Second index (columns, `j`).
    Two,
}

/// Real-valued periodic grid function.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    rows: usize,
    cols: usize,
    h: f64,
    data: Vec<f64>,
}

impl ScalarField {
    /// Zero field. Panics if either dimension is below 2 or `h` is not a
    /// positive finite number.
    pub fn zeros(rows: usize, cols: usize, h: f64) -> Self {
        Self::filled(rows, cols, h, 0.0)
    }

    pub fn filled(rows: usize, cols: usize, h: f64, value: f64) -> Self {
        assert!(
            rows >= 2 && cols >= 2,
            "periodic fields need at least 2×2 samples, got {rows}×{cols}"
        );
        assert!(
            h.is_finite() && h > 0.0,
            "grid spacing must be positive, got {h}"
        );
        Self {
            rows,
            cols,
            h,
            data: vec![value; rows * cols],
        }
    }

    /// Wraps row-major `data`. Panics on a length mismatch.
    pub fn from_vec(rows: usize, cols: usize, h: f64, data: Vec<f64>) -> Self {
        assert_eq!(
            data.len(),
            rows * cols,
            "data length does not match {rows}×{cols}"
        );
        let mut f = Self::zeros(rows, cols, h);
        f.data = data;
        f
    }

    /// Builds a field by evaluating `g(i, j)` at every sample.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        h: f64,
        mut g: impl FnMut(usize, usize) -> f64,
    ) -> Self {
        let mut f = Self::zeros(rows, cols, h);
        for i in 0..rows {
            for j in 0..cols {
                f.data[i * cols + j] = g(i, j);
            }
        }
        f
    }

    /// Builds a field from nested rows. Panics on ragged input.
    pub fn from_rows(h: f64, rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_vec(rows.len(), cols, h, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    /// True when dimensions and spacing agree.
    pub fn same_shape(&self, other: &ScalarField) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.h == other.h
    }

    #[track_caller]
    pub(crate) fn assert_same_shape(&self, other: &ScalarField) {
        assert!(
            self.same_shape(other),
            "field shape mismatch: {}×{} (h={}) vs {}×{} (h={})",
            self.rows,
            self.cols,
            self.h,
            other.rows,
            other.cols,
            other.h
        );
    }

    /// Same shape, new samples.
    pub(crate) fn with_data(&self, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), self.data.len());
        Self {
            rows: self.rows,
            cols: self.cols,
            h: self.h,
            data,
        }
    }

    pub fn map(&self, g: impl Fn(f64) -> f64) -> Self {
        self.with_data(self.data.iter().map(|&x| g(x)).collect())
    }

    /// Pointwise combination of two fields of identical shape.
    #[track_caller]
    pub fn zip_map(&self, other: &ScalarField, g: impl Fn(f64, f64) -> f64) -> Self {
        self.assert_same_shape(other);
        self.with_data(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| g(a, b))
                .collect(),
        )
    }

    pub fn add(&self, other: &ScalarField) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|x| s * x)
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.data.len() as f64
    }

    /// Euclidean norm of the sample vector (not scaled by `h`).
    pub fn norm_l2(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Sample-wise inner product.
    pub fn dot(&self, other: &ScalarField) -> f64 {
        self.assert_same_shape(other);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Cyclic shift: `out(i, j) = self(i - di, j - dj)`.
    pub fn roll(&self, di: isize, dj: isize) -> Self {
        let (m, n) = (self.rows as isize, self.cols as isize);
        let mut data = vec![0.0; self.data.len()];
        for i in 0..m {
            let si = (i - di).rem_euclid(m) as usize;
            for j in 0..n {
                let sj = (j - dj).rem_euclid(n) as usize;
                data[(i * n + j) as usize] = self.data[si * self.cols + sj];
            }
        }
        self.with_data(data)
    }
}

/// Pair of scalar fields `(c1, c2)`: gradients, `p`, `q`, `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub c1: ScalarField,
    pub c2: ScalarField,
}

impl VectorField {
    #[track_caller]
    pub fn new(c1: ScalarField, c2: ScalarField) -> Self {
        c1.assert_same_shape(&c2);
        Self { c1, c2 }
    }

    pub fn zeros(rows: usize, cols: usize, h: f64) -> Self {
        Self::new(
            ScalarField::zeros(rows, cols, h),
            ScalarField::zeros(rows, cols, h),
        )
    }

    pub fn dims(&self) -> (usize, usize) {
        self.c1.dims()
    }

    pub fn spacing(&self) -> f64 {
        self.c1.spacing()
    }

    pub fn component(&self, k: usize) -> &ScalarField {
        match k {
            1 => &self.c1,
            2 => &self.c2,
            _ => panic!("vector component index must be 1 or 2, got {k}"),
        }
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        self.c1.zip_map(&self.c2, f64::hypot)
    }

    /// Sum over pixels of `c1·c1' + c2·c2'`.
    pub fn dot(&self, other: &VectorField) -> f64 {
        self.c1.dot(&other.c1) + self.c2.dot(&other.c2)
    }

    pub fn max_abs(&self) -> f64 {
        self.c1.max_abs().max(self.c2.max_abs())
    }

    pub fn all_finite(&self) -> bool {
        self.c1.all_finite() && self.c2.all_finite()
    }
}

/// 2×2 block of scalar fields `[[m11, m12], [m21, m22]]`. No symmetry is
/// assumed: the discrete Hessian built from mixed one-sided differences is
/// in general not symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    pub m11: ScalarField,
    pub m12: ScalarField,
    pub m21: ScalarField,
    pub m22: ScalarField,
}

impl MatrixField {
    #[track_caller]
    pub fn new(m11: ScalarField, m12: ScalarField, m21: ScalarField, m22: ScalarField) -> Self {
        m11.assert_same_shape(&m12);
        m11.assert_same_shape(&m21);
        m11.assert_same_shape(&m22);
        Self { m11, m12, m21, m22 }
    }

    pub fn zeros(rows: usize, cols: usize, h: f64) -> Self {
        let z = ScalarField::zeros(rows, cols, h);
        Self::new(z.clone(), z.clone(), z.clone(), z)
    }

    /// Identity matrix at every pixel.
    pub fn identity(rows: usize, cols: usize, h: f64) -> Self {
        let z = ScalarField::zeros(rows, cols, h);
        let one = ScalarField::filled(rows, cols, h, 1.0);
        Self::new(one.clone(), z.clone(), z, one)
    }

    pub fn dims(&self) -> (usize, usize) {
        self.m11.dims()
    }

    pub fn spacing(&self) -> f64 {
        self.m11.spacing()
    }

    /// Row `k` as a vector field `(m_k1, m_k2)`.
    pub fn row(&self, k: usize) -> VectorField {
        match k {
            1 => VectorField::new(self.m11.clone(), self.m12.clone()),
            2 => VectorField::new(self.m21.clone(), self.m22.clone()),
            _ => panic!("matrix row index must be 1 or 2, got {k}"),
        }
    }

    /// Frobenius inner product summed over pixels.
    pub fn dot(&self, other: &MatrixField) -> f64 {
        self.m11.dot(&other.m11)
            + self.m12.dot(&other.m12)
            + self.m21.dot(&other.m21)
            + self.m22.dot(&other.m22)
    }

    pub fn all_finite(&self) -> bool {
        self.m11.all_finite()
            && self.m12.all_finite()
            && self.m21.all_finite()
            && self.m22.all_finite()
    }
}

/// One-sided periodic difference along `axis`, divided by `h`.
pub fn diff(v: &ScalarField, axis: Axis, scheme: Scheme) -> ScalarField {
    let (m, n) = v.dims();
    let inv_h = 1.0 / v.spacing();
    let src = v.data();
    let mut out = vec![0.0; src.len()];
    match axis {
        Axis::One => {
            for i in 0..m {
                let other = match scheme {
                    Scheme::Forward => (i + 1) % m,
                    Scheme::Backward => (i + m - 1) % m,
                };
                let (row, nb) = (&src[i * n..(i + 1) * n], &src[other * n..(other + 1) * n]);
                let dst = &mut out[i * n..(i + 1) * n];
                for j in 0..n {
                    dst[j] = match scheme {
                        Scheme::Forward => (nb[j] - row[j]) * inv_h,
                        Scheme::Backward => (row[j] - nb[j]) * inv_h,
                    };
                }
            }
        }
        Axis::Two => {
            for i in 0..m {
                let row = &src[i * n..(i + 1) * n];
                let dst = &mut out[i * n..(i + 1) * n];
                for j in 0..n {
                    dst[j] = match scheme {
                        Scheme::Forward => (row[(j + 1) % n] - row[j]) * inv_h,
                        Scheme::Backward => (row[j] - row[(j + n - 1) % n]) * inv_h,
                    };
                }
            }
        }
    }
    v.with_data(out)
}

pub fn gradient(v: &ScalarField, scheme: Scheme) -> VectorField {
    VectorField::new(diff(v, Axis::One, scheme), diff(v, Axis::Two, scheme))
}

/// Row `k` of the result is the gradient of `q_k`:
/// `[[∂1 q1, ∂2 q1], [∂1 q2, ∂2 q2]]`.
pub fn jacobian(q: &VectorField, scheme: Scheme) -> MatrixField {
    let VectorField { c1: g11, c2: g12 } = gradient(&q.c1, scheme);
    let VectorField { c1: g21, c2: g22 } = gradient(&q.c2, scheme);
    MatrixField::new(g11, g12, g21, g22)
}

pub fn divergence(q: &VectorField, scheme: Scheme) -> ScalarField {
    diff(&q.c1, Axis::One, scheme).add(&diff(&q.c2, Axis::Two, scheme))
}

/// Component `k` is the divergence of row `k`.
pub fn matrix_divergence(hm: &MatrixField, scheme: Scheme) -> VectorField {
    VectorField::new(
        diff(&hm.m11, Axis::One, scheme).add(&diff(&hm.m12, Axis::Two, scheme)),
        diff(&hm.m21, Axis::One, scheme).add(&diff(&hm.m22, Axis::Two, scheme)),
    )
}

/// Pointwise `m11·m22 − m12·m21`.
pub fn det(g: &MatrixField) -> ScalarField {
    let data = (0..g.m11.len())
        .map(|k| g.m11.data()[k] * g.m22.data()[k] - g.m12.data()[k] * g.m21.data()[k])
        .collect();
    g.m11.with_data(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_field(rows: usize, cols: usize, seed: u64) -> ScalarField {
        let mut s = seed;
        ScalarField::from_fn(rows, cols, 1.0, |_, _| {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
    }

    #[test]
    fn constant_has_zero_differences() {
        let c = ScalarField::filled(5, 7, 0.5, 3.25);
        for axis in [Axis::One, Axis::Two] {
            for s in [Scheme::Forward, Scheme::Backward] {
                assert!(diff(&c, axis, s).data().iter().all(|&x| x == 0.0));
            }
        }
    }

    #[test]
    fn two_point_wrap() {
        let v = ScalarField::from_rows(1.0, &[vec![0.0, 0.0], vec![1.0, 1.0]]);
        let d = diff(&v, Axis::One, Scheme::Forward);
        assert_eq!(d.data(), &[1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn ramp_gradient_wraps() {
        let n = 6;
        let h = 0.5;
        let v = ScalarField::from_fn(4, n, h, |_, j| j as f64);
        let g = gradient(&v, Scheme::Forward);
        assert!(g.c1.data().iter().all(|&x| x == 0.0));
        for i in 0..4 {
            for j in 0..n - 1 {
                assert_eq!(g.c2.get(i, j), 1.0 / h);
            }
            assert_eq!(g.c2.get(i, n - 1), (1.0 - n as f64) / h);
        }
    }

    #[test]
    fn forward_and_backward_commute() {
        let v = lcg_field(8, 8, 7);
        let a = diff(
            &diff(&v, Axis::One, Scheme::Forward),
            Axis::One,
            Scheme::Backward,
        );
        let b = diff(
            &diff(&v, Axis::One, Scheme::Backward),
            Axis::One,
            Scheme::Forward,
        );
        for (x, y) in a.data().iter().zip(b.data()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn mixed_hessian_is_not_symmetric() {
        let v = lcg_field(8, 8, 11);
        let hm = jacobian(&gradient(&v, Scheme::Forward), Scheme::Backward);
        let gap = hm.m12.sub(&hm.m21).max_abs();
        assert!(gap > 1e-3, "m12 and m21 unexpectedly coincide (gap {gap})");
    }

    #[test]
    fn divergence_of_first_component_only() {
        let saw = ScalarField::from_fn(5, 4, 1.0, |i, _| i as f64);
        let q = VectorField::new(saw.clone(), ScalarField::zeros(5, 4, 1.0));
        assert_eq!(
            divergence(&q, Scheme::Backward),
            diff(&saw, Axis::One, Scheme::Backward)
        );
    }

    #[test]
    fn matrix_divergence_of_jacobian_is_vector_laplacian() {
        let q = VectorField::new(lcg_field(6, 5, 1), lcg_field(6, 5, 2));
        let lap = matrix_divergence(&jacobian(&q, Scheme::Backward), Scheme::Forward);
        let lap1 = divergence(&gradient(&q.c1, Scheme::Backward), Scheme::Forward);
        let lap2 = divergence(&gradient(&q.c2, Scheme::Backward), Scheme::Forward);
        assert_eq!(lap.c1, lap1);
        assert_eq!(lap.c2, lap2);
    }

    #[test]
    fn determinant_cases() {
        assert!(det(&MatrixField::identity(3, 3, 1.0))
            .data()
            .iter()
            .all(|&x| x == 1.0));
        let mut g = MatrixField::zeros(3, 3, 1.0);
        g.m11 = ScalarField::filled(3, 3, 1.0, 2.0);
        g.m22 = ScalarField::filled(3, 3, 1.0, 3.0);
        assert!(det(&g).data().iter().all(|&x| x == 6.0));
        // rank one: second row = 2.5 × first row
        let r = lcg_field(3, 3, 5);
        let s = lcg_field(3, 3, 6);
        let g = MatrixField::new(r.clone(), s.clone(), r.scale(2.5), s.scale(2.5));
        assert!(det(&g).max_abs() < 1e-15);
    }

    #[test]
    fn roll_round_trips() {
        let v = lcg_field(5, 7, 3);
        assert_eq!(v.roll(2, -3).roll(-2, 3), v);
        assert_eq!(v.roll(1, 0).get(1, 4), v.get(0, 4));
    }

    #[test]
    #[should_panic(expected = "shape mismatch")]
    fn spacing_mismatch_panics() {
        let a = ScalarField::zeros(4, 4, 1.0);
        let b = ScalarField::zeros(4, 4, 0.5);
        let _ = a.add(&b);
    }
}
