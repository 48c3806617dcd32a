//! Truncated path signatures on piecewise-linear paths.
//!
//! Coefficients are computed segment by segment from the linear closed form
//! and folded with Chen's identity. Storage is dense, level-major, with
//! words ordered lexicographically inside each level and the leading
//! constant 1 at position 0. The truncated signature kernel is the plain
//! dot product of two such vectors, leading constants included.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::PathRef;

/// A coordinate word `(i_1, ..., i_l)` with 1-based indices in `[1, d]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyWord);
        }
        if let Some(&index) = indices.iter().find(|&&i| i == 0) {
            return Err(Error::WordIndexOutOfRange { index, dim: 0 });
        }
        Ok(Word(indices))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self.0.iter().find(|&&i| i < 1 || i > dim) {
            Some(&index) => Err(Error::WordIndexOutOfRange { index, dim }),
            None => Ok(()),
        }
    }
}

/// Dense storage supports truncation levels up to this bound; anything
/// deeper would not fit in memory for d >= 2 anyway.
const MAX_LEVELS: usize = 32;

/// Number of coefficients of a depth-`k` signature in dimension `d`,
/// including the leading 1: `sum_{j=0}^{k} d^j`.
pub fn coefficient_count(dim: usize, depth: usize) -> usize {
    assert!(depth <= MAX_LEVELS, "signature depth {depth} exceeds {MAX_LEVELS}");
    let mut total = 1usize;
    let mut level = 1usize;
    for _ in 0..depth {
        level *= dim;
        total += level;
    }
    total
}

/// Truncated signature coefficients, level-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureVector {
    dim: usize,
    depth: usize,
    coeffs: Vec<f64>,
}

impl SignatureVector {
    /// The identity element `(1, 0, ..., 0)` of the truncated tensor algebra.
    pub fn identity(dim: usize, depth: usize) -> Self {
        let mut coeffs = vec![0.0; coefficient_count(dim, depth)];
        coeffs[0] = 1.0;
        SignatureVector { dim, depth, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Offset of the first coefficient of `level` in the flat layout.
    fn level_offset(&self, level: usize) -> usize {
        coefficient_count(self.dim, level) - self.dim.pow(level as u32)
    }

    /// Coefficient addressed by a word (levels 1..=depth).
    pub fn coefficient(&self, word: &Word) -> Result<f64> {
        word.check_dim(self.dim)?;
        let level = word.len();
        if level > self.depth {
            return Err(Error::DepthMismatch { left: level, right: self.depth });
        }
        let mut idx = 0usize;
        for &i in word.indices() {
            idx = idx * self.dim + (i - 1);
        }
        Ok(self.coeffs[self.level_offset(level) + idx])
    }

    /// In-place Chen product `self <- self * other`, truncated at `depth`.
    ///
    /// Levels are updated top-down so each target level reads only
    /// not-yet-updated lower levels of `self`.
    pub fn concat_assign(&mut self, other: &SignatureVector) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch { left: self.dim, right: other.dim });
        }
        if self.depth != other.depth {
            return Err(Error::DepthMismatch { left: self.depth, right: other.depth });
        }
        let mut offsets = [0usize; MAX_LEVELS + 1];
        let mut sizes = [0usize; MAX_LEVELS + 1];
        let mut off = 0usize;
        let mut size = 1usize;
        for j in 0..=self.depth {
            offsets[j] = off;
            sizes[j] = size;
            off += size;
            size = size.saturating_mul(self.dim);
        }
        for level in (1..=self.depth).rev() {
            let out_off = offsets[level];
            // split level = s own levels + (level - s) from other; s = level
            // is the identity term (other level 0 coefficient is 1).
            for s in 0..level {
                let right_level = level - s;
                let left_off = offsets[s];
                let right_off = offsets[right_level];
                let right_len = sizes[right_level];
                for p in 0..sizes[s] {
                    let a = self.coeffs[left_off + p];
                    if a == 0.0 {
                        continue;
                    }
                    let base = out_off + p * right_len;
                    for q in 0..right_len {
                        self.coeffs[base + q] += a * other.coeffs[right_off + q];
                    }
                }
            }
        }
        Ok(())
    }

    /// `<S, T>`: sum of products over all coefficients, leading 1 included.
    pub fn dot(&self, other: &SignatureVector) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch { left: self.dim, right: other.dim });
        }
        if self.depth != other.depth {
            return Err(Error::DepthMismatch { left: self.depth, right: other.depth });
        }
        Ok(self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a * b)
            .sum())
    }
}

/// Overwrite `sig` with the closed-form signature of one linear segment.
/// Each level multiplies the previous one by the increment and divides by
/// the level index, so the word coefficient ends at `prod delta / l!`.
fn write_segment(sig: &mut SignatureVector, start: &[f64], end: &[f64]) {
    let dim = sig.dim;
    sig.coeffs[0] = 1.0;
    let mut prev_off = 0usize;
    let mut prev_len = 1usize;
    for level in 1..=sig.depth {
        let off = prev_off + prev_len;
        let inv_level = 1.0 / level as f64;
        for p in 0..prev_len {
            let a = sig.coeffs[prev_off + p] * inv_level;
            let base = off + p * dim;
            for q in 0..dim {
                sig.coeffs[base + q] = a * (end[q] - start[q]);
            }
        }
        prev_off = off;
        prev_len *= dim;
    }
}

/// Signature of one linear segment from the closed form: the word
/// `(i_1, ..., i_l)` coefficient is `prod_j delta_{i_j} / l!` where
/// `delta = end - start` (slope times duration).
pub fn segment_signature(start: &[f64], end: &[f64], dt: f64, depth: usize) -> Result<SignatureVector> {
    if start.len() != end.len() || start.is_empty() {
        return Err(Error::DimMismatch { left: start.len(), right: end.len() });
    }
    if dt <= 0.0 || dt.is_nan() {
        return Err(Error::NonPositiveDuration(dt));
    }
    if depth == 0 {
        return Err(Error::ZeroDepth);
    }
    let mut sig = SignatureVector::identity(start.len(), depth);
    write_segment(&mut sig, start, end);
    Ok(sig)
}

/// Chen's identity: the signature of the concatenated path is the truncated
/// tensor product of the two signatures.
pub fn chen_concat(a: &SignatureVector, b: &SignatureVector) -> Result<SignatureVector> {
    let mut out = a.clone();
    out.concat_assign(b)?;
    Ok(out)
}

fn segment_fold(path: PathRef<'_>, depth: usize) -> Result<SignatureVector> {
    if depth == 0 {
        return Err(Error::ZeroDepth);
    }
    let mut acc = SignatureVector::identity(path.dim, depth);
    let mut seg = SignatureVector::identity(path.dim, depth);
    for i in 0..path.points() - 1 {
        write_segment(&mut seg, path.point(i), path.point(i + 1));
        acc.concat_assign(&seg)?;
    }
    Ok(acc)
}

/// Truncated signature of a piecewise-linear path: left fold of segment
/// closed forms under Chen's identity. Exact up to floating-point roundoff.
pub fn truncated_signature(path: PathRef<'_>, depth: usize) -> Result<SignatureVector> {
    segment_fold(path, depth)
}

/// The single signature coefficient addressed by `word`.
///
/// Runs the Chen recursion on the word's prefixes only, so cost is
/// `O(p * l^2)` rather than a full depth-`l` signature.
pub fn coordinate_signature(path: PathRef<'_>, word: &Word) -> Result<f64> {
    word.check_dim(path.dim)?;
    let l = word.len();
    let w = word.indices();
    // prefix[j] = S_{(w_1..w_j)} of the path seen so far; prefix[0] = 1.
    let mut prefix = vec![0.0; l + 1];
    prefix[0] = 1.0;
    let mut suffix_coeff = vec![0.0; l + 1];
    for i in 0..path.points() - 1 {
        let a = path.point(i);
        let b = path.point(i + 1);
        // suffix_coeff[s..j]: closed-form coefficient of word w[s..j] on
        // this segment, laid out per (start s, end j) via running products.
        // Update prefixes top-down so lower prefixes keep their old value.
        for j in (1..=l).rev() {
            let mut acc = prefix[j]; // s = j term: empty segment word
            let mut prod = 1.0;
            for s in (0..j).rev() {
                prod *= b[w[s] - 1] - a[w[s] - 1];
                let seg = prod / factorial(j - s);
                acc += prefix[s] * seg;
            }
            suffix_coeff[j] = acc;
        }
        prefix[1..=l].copy_from_slice(&suffix_coeff[1..=l]);
    }
    Ok(prefix[l])
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Truncated signature kernel `<S^k(x), S^k(y)>`.
pub fn signature_kernel(x: PathRef<'_>, y: PathRef<'_>, depth: usize) -> Result<f64> {
    if x.dim != y.dim {
        return Err(Error::DimMismatch { left: x.dim, right: y.dim });
    }
    truncated_signature(x, depth)?.dot(&truncated_signature(y, depth)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::FunctionalPath;

    fn line_1d(delta: f64) -> FunctionalPath {
        FunctionalPath::from_observations(vec![0.0, 1.0], vec![vec![0.0], vec![delta]]).unwrap()
    }

    #[test]
    fn closed_form_golden_delta_two() {
        let sig = segment_signature(&[0.0], &[2.0], 1.0, 3).unwrap();
        assert_eq!(sig.coefficients(), &[1.0, 2.0, 2.0, 4.0 / 3.0]);
    }

    #[test]
    fn constant_segment_is_trivial() {
        let sig = segment_signature(&[5.0, -1.0], &[5.0, -1.0], 0.25, 3).unwrap();
        let mut expected = vec![0.0; coefficient_count(2, 3)];
        expected[0] = 1.0;
        assert_eq!(sig.coefficients(), expected.as_slice());
    }

    #[test]
    fn level_two_2d_equal_increments() {
        // quadrature over {s < u1 < u2 < t} of du1 du2 = 1/2 per word
        let sig = segment_signature(&[0.0, 0.0], &[1.0, 1.0], 1.0, 2).unwrap();
        for w in [[1, 1], [1, 2], [2, 1], [2, 2]] {
            let c = sig.coefficient(&Word::new(w.to_vec()).unwrap()).unwrap();
            assert!((c - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_non_positive_duration() {
        assert!(matches!(
            segment_signature(&[0.0], &[1.0], 0.0, 2),
            Err(Error::NonPositiveDuration(_))
        ));
    }

    #[test]
    fn chen_identity_element() {
        let s = segment_signature(&[0.0, 1.0], &[2.0, -0.5], 1.0, 3).unwrap();
        let id = SignatureVector::identity(2, 3);
        assert_eq!(chen_concat(&s, &id).unwrap(), s);
        assert_eq!(chen_concat(&id, &s).unwrap(), s);
    }

    #[test]
    fn chen_level_one_adds() {
        let a = segment_signature(&[0.0, 0.0], &[1.0, 3.0], 0.5, 3).unwrap();
        let b = segment_signature(&[1.0, 3.0], &[-2.0, 4.0], 0.5, 3).unwrap();
        let c = chen_concat(&a, &b).unwrap();
        for i in 1..=2 {
            let w = Word::new(vec![i]).unwrap();
            let want = a.coefficient(&w).unwrap() + b.coefficient(&w).unwrap();
            assert!((c.coefficient(&w).unwrap() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn two_unit_segments_match_one_double_segment() {
        let a = segment_signature(&[0.0], &[1.0], 0.5, 2).unwrap();
        let b = segment_signature(&[1.0], &[2.0], 0.5, 2).unwrap();
        let joined = chen_concat(&a, &b).unwrap();
        let direct = segment_signature(&[0.0], &[2.0], 1.0, 2).unwrap();
        assert_eq!(joined.coefficients(), &[1.0, 2.0, 2.0]);
        for (x, y) in joined.coefficients().iter().zip(direct.coefficients()) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_path_signature_is_trivial() {
        let p = FunctionalPath::from_observations(
            vec![0.0, 0.3, 0.7, 1.0],
            vec![vec![4.0, 2.0]; 4],
        )
        .unwrap();
        let sig = truncated_signature(p.view(), 3).unwrap();
        assert_eq!(sig.coefficients()[0], 1.0);
        assert!(sig.coefficients()[1..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn parabola_area_coefficient() {
        // 2D path (t, t^2) on a fine grid: S_(1,2) -> int_0^1 u d(u^2) = 2/3.
        let n = 1000;
        let times: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let values: Vec<Vec<f64>> = times.iter().map(|&t| vec![t, t * t]).collect();
        let p = FunctionalPath::from_observations(times, values).unwrap();
        let c = truncated_signature(p.view(), 2)
            .unwrap()
            .coefficient(&Word::new(vec![1, 2]).unwrap())
            .unwrap();
        assert!((c - 2.0 / 3.0).abs() < 1e-5, "got {c}");
    }

    #[test]
    fn coefficient_counts_match_formula() {
        for d in 1..=4usize {
            for k in 1..=4usize {
                let expected: usize = (0..=k).map(|j| d.pow(j as u32)).sum();
                assert_eq!(coefficient_count(d, k), expected);
                let sig = SignatureVector::identity(d, k);
                assert_eq!(sig.coefficients().len(), expected);
            }
        }
        // d = 1 degenerates to k + 1 coefficients
        assert_eq!(coefficient_count(1, 3), 4);
    }

    #[test]
    fn coordinate_signature_is_displacement_at_level_one() {
        let p = FunctionalPath::from_observations(
            vec![0.0, 0.4, 1.0],
            vec![vec![1.0, 0.0], vec![3.0, 2.0], vec![2.0, 5.0]],
        )
        .unwrap();
        let s1 = coordinate_signature(p.view(), &Word::new(vec![1]).unwrap()).unwrap();
        let s2 = coordinate_signature(p.view(), &Word::new(vec![2]).unwrap()).unwrap();
        assert!((s1 - 1.0).abs() < 1e-15);
        assert!((s2 - 5.0).abs() < 1e-15);
    }

    #[test]
    fn unit_slope_level_two_is_half() {
        let p = line_1d(1.0);
        let c = coordinate_signature(p.view(), &Word::new(vec![1, 1]).unwrap()).unwrap();
        assert!((c - 0.5).abs() < 1e-15);
    }

    #[test]
    fn repeated_word_is_power_over_factorial() {
        // oracle: induction via Chen on closed forms gives delta^l / l!
        let p = FunctionalPath::from_observations(
            vec![0.0, 0.2, 0.5, 0.9],
            vec![vec![0.0], vec![1.5], vec![0.5], vec![3.0]],
        )
        .unwrap();
        let delta: f64 = 3.0;
        for l in 1..=4usize {
            let c = coordinate_signature(p.view(), &Word::new(vec![1; l]).unwrap()).unwrap();
            let want = delta.powi(l as i32) / factorial(l);
            assert!((c - want).abs() < 1e-12, "l={l} got {c} want {want}");
        }
    }

    #[test]
    fn coordinate_matches_addressed_dense_coefficient() {
        let p = FunctionalPath::from_observations(
            vec![0.0, 0.3, 0.6, 1.0],
            vec![
                vec![0.0, 1.0, -1.0],
                vec![0.5, 0.0, 2.0],
                vec![-1.0, 2.0, 0.5],
                vec![2.0, -1.0, 1.0],
            ],
        )
        .unwrap();
        let dense = truncated_signature(p.view(), 3).unwrap();
        for word in [vec![1], vec![3, 2], vec![2, 1, 3], vec![3, 3, 3]] {
            let w = Word::new(word).unwrap();
            let direct = coordinate_signature(p.view(), &w).unwrap();
            let addressed = dense.coefficient(&w).unwrap();
            assert!((direct - addressed).abs() <= 1e-12 * addressed.abs().max(1.0));
        }
    }

    #[test]
    fn kernel_of_constants_is_one() {
        let x = FunctionalPath::from_observations(vec![0.0, 1.0], vec![vec![4.0], vec![4.0]])
            .unwrap();
        let y = FunctionalPath::from_observations(vec![0.0, 1.0], vec![vec![-7.0], vec![-7.0]])
            .unwrap();
        assert_eq!(signature_kernel(x.view(), y.view(), 3).unwrap(), 1.0);
    }

    #[test]
    fn kernel_of_linear_slopes_two_and_three() {
        // 1 + ab + (a^2/2)(b^2/2) = 1 + 6 + 9 = 16
        let x = line_1d(2.0);
        let y = line_1d(3.0);
        let k = signature_kernel(x.view(), y.view(), 2).unwrap();
        assert!((k - 16.0).abs() < 1e-12);
    }

    #[test]
    fn self_kernel_at_least_one() {
        let p = FunctionalPath::from_observations(
            vec![0.0, 0.5, 1.0],
            vec![vec![0.0, 3.0], vec![-1.0, 2.0], vec![4.0, 0.0]],
        )
        .unwrap();
        let k = signature_kernel(p.view(), p.view(), 3).unwrap();
        assert!(k >= 1.0);
        let norm_sq: f64 = truncated_signature(p.view(), 3)
            .unwrap()
            .coefficients()
            .iter()
            .map(|c| c * c)
            .sum();
        assert!((k - norm_sq).abs() < 1e-12);
    }

    #[test]
    fn kernel_rejects_dim_mismatch() {
        let x = line_1d(1.0);
        let y = FunctionalPath::from_observations(
            vec![0.0, 1.0],
            vec![vec![0.0, 0.0], vec![1.0, 1.0]],
        )
        .unwrap();
        assert!(matches!(
            signature_kernel(x.view(), y.view(), 2),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn reparameterization_invariance() {
        // rescale times by t -> t^2: coefficients unchanged
        let times: Vec<f64> = (0..9).map(|i| i as f64 / 8.0).collect();
        let values: Vec<Vec<f64>> = (0..9)
            .map(|i| vec![(i as f64).sin(), (i as f64 * 0.7).cos()])
            .collect();
        let a = FunctionalPath::from_observations(times.clone(), values.clone()).unwrap();
        let warped: Vec<f64> = times.iter().map(|t| t * t).collect();
        // t^2 keeps 0 fixed but collapses t_0 = 0, t_1: still strictly increasing
        let b = FunctionalPath::from_observations(warped, values).unwrap();
        let sa = truncated_signature(a.view(), 3).unwrap();
        let sb = truncated_signature(b.view(), 3).unwrap();
        for (x, y) in sa.coefficients().iter().zip(sb.coefficients()) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn level_one_riemann_identity() {
        // per-segment windows: sum of S1(x_seg) S1(y_seg) equals
        // dt^2 * sum of finite-difference slope products
        let p = 20;
        let times: Vec<f64> = (0..p).map(|i| i as f64 / (p - 1) as f64).collect();
        let dt = 1.0 / (p - 1) as f64;
        let xv: Vec<f64> = (0..p).map(|i| (i as f64 * 0.31).sin()).collect();
        let yv: Vec<f64> = (0..p).map(|i| (i as f64 * 0.17).cos()).collect();
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for i in 0..p - 1 {
            lhs += (xv[i + 1] - xv[i]) * (yv[i + 1] - yv[i]);
            let xs = (xv[i + 1] - xv[i]) / dt;
            let ys = (yv[i + 1] - yv[i]) / dt;
            rhs += xs * ys;
        }
        rhs *= dt * dt;
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        // and the segment S1 values are exactly the increments
        let path =
            FunctionalPath::from_observations(times, xv.iter().map(|&v| vec![v]).collect())
                .unwrap();
        let seg = path.view().restrict(crate::path::Window::new(3, 2)).unwrap();
        let s1 = coordinate_signature(seg, &Word::new(vec![1]).unwrap()).unwrap();
        assert!((s1 - (xv[4] - xv[3])).abs() < 1e-15);
    }
}
