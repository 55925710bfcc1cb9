//! Eigenpair continuation between neighbouring λ values by overlap matching.

use crate::eigen::Spectrum;
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

/// Two candidate overlaps closer than this make a match ambiguous.
pub const AMBIGUITY: f64 = 1e-6;

/// Result of [`track`]: `spectrum` column `k` continues `prev` column `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tracked {
    pub spectrum: Spectrum,
    /// `permutation[k]` is the column of the untracked `next` that became column `k`.
    pub permutation: Vec<usize>,
    /// Whether column `k` was negated to make its overlap with `prev` positive.
    pub flipped: Vec<bool>,
}

impl Tracked {
    pub fn flip_count(&self) -> usize {
        self.flipped.iter().filter(|&&f| f).count()
    }
}

/// Best match of `reference` among the columns of `spectrum`.
///
/// Returns the column index and the signed overlap. Fails when the two
/// largest `|overlap|` values are within [`AMBIGUITY`].
pub fn best_match(
    reference: &[f64],
    spectrum: &Spectrum,
    state: usize,
    from: f64,
) -> Result<(usize, f64)> {
    let mut best = (usize::MAX, 0.0_f64);
    let mut second = 0.0_f64;
    for j in 0..spectrum.dim() {
        let o = column_dot(&spectrum.vectors, j, reference);
        if o.abs() > best.1.abs() || best.0 == usize::MAX {
            second = second.max(best.1.abs());
            best = (j, o);
        } else {
            second = second.max(o.abs());
        }
    }
    if best.0 == usize::MAX {
        return Err(Error::DimensionMismatch {
            expected: reference.len(),
            found: 0,
        });
    }
    if best.1.abs() - second <= AMBIGUITY {
        return Err(Error::AmbiguousTracking {
            state,
            from,
            to: spectrum.lambda,
            best: best.1.abs(),
            second,
        });
    }
    Ok(best)
}

/// Reorders and re-signs `next` so that each column continues the
/// corresponding column of `prev`.
pub fn track(prev: &Spectrum, next: &Spectrum) -> Result<Tracked> {
    let n = prev.dim();
    if next.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: next.dim(),
        });
    }
    let mut permutation = Vec::with_capacity(n);
    let mut signs = Vec::with_capacity(n);
    let mut taken = vec![false; n];
    for k in 0..n {
        let (j, overlap) = best_match(&prev.vector(k), next, k, prev.lambda)?;
        if taken[j] {
            return Err(Error::AmbiguousTracking {
                state: k,
                from: prev.lambda,
                to: next.lambda,
                best: overlap.abs(),
                second: overlap.abs(),
            });
        }
        taken[j] = true;
        permutation.push(j);
        signs.push(overlap < 0.0);
    }

    let mut vectors = Matrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (k, (&j, &flip)) in permutation.iter().zip(&signs).enumerate() {
        let mut v = next.vector(j);
        if flip {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        vectors.set_column(k, &v);
        values.push(next.values[j]);
    }
    Ok(Tracked {
        spectrum: Spectrum {
            lambda: next.lambda,
            values,
            vectors,
        },
        permutation,
        flipped: signs,
    })
}

fn column_dot(m: &Matrix, j: usize, v: &[f64]) -> f64 {
    let col = m.column(j);
    dot(&col, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::eigh;
    use crate::linalg::SymmetricMatrix;

    fn sample() -> Spectrum {
        let m = SymmetricMatrix::from_rows(&[
            [2.0, 0.3, 0.0, 0.1],
            [0.3, 1.0, 0.2, 0.0],
            [0.0, 0.2, -1.0, 0.4],
            [0.1, 0.0, 0.4, 0.5],
        ])
        .unwrap();
        eigh(&m).unwrap().at(0.0)
    }

    #[test]
    fn identical_spectra_track_trivially() {
        let s = sample();
        let t = track(&s, &s).unwrap();
        assert_eq!(t.permutation, vec![0, 1, 2, 3]);
        assert_eq!(t.flip_count(), 0);
        assert_eq!(t.spectrum, s);
    }

    #[test]
    fn swapped_and_negated_columns_are_restored() {
        let s = sample();
        let mut next = s.clone();
        let (c2, c3) = (s.vector(2), s.vector(3));
        next.vectors
            .set_column(2, &c3.iter().map(|x| -x).collect::<Vec<_>>());
        next.vectors.set_column(3, &c2);
        next.values.swap(2, 3);
        let t = track(&s, &next).unwrap();
        assert_eq!(t.permutation, vec![0, 1, 3, 2]);
        assert_eq!(t.flipped, vec![false, false, false, true]);
        assert!(t.spectrum.vectors.max_abs_diff(&s.vectors) < 1e-15);
        assert_eq!(t.spectrum.values, s.values);
    }

    #[test]
    fn equal_mixing_is_ambiguous() {
        let prev = eigh(&SymmetricMatrix::identity(2)).unwrap().at(0.0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let next = Spectrum {
            lambda: 0.1,
            values: vec![1.0, 1.0],
            vectors: Matrix::from_rows(&[[r, -r], [r, r]]).unwrap(),
        };
        let err = track(&prev, &next).unwrap_err();
        assert!(matches!(err, Error::AmbiguousTracking { state: 0, .. }));
        assert!(err.to_string().contains("finer lambda step"));
    }
}
