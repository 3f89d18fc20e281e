use std::fmt;

use crate::{Error, Result};

/// Ordered tensor product of truncated bosonic modes.
///
/// The leftmost mode is the slowest-varying index of the product basis, so for
/// modes `[a:2, c:3]` the basis runs `|0,0>, |0,1>, |0,2>, |1,0>, ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertSpace {
    labels: Vec<String>,
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl HilbertSpace {
    pub fn new<S: Into<String>>(modes: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let (labels, dims): (Vec<String>, Vec<usize>) =
            modes.into_iter().map(|(l, d)| (l.into(), d)).unzip();
        if labels.is_empty() {
            return Err(Error::InvalidSpace("at least one mode is required".into()));
        }
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::InvalidSpace("mode labels must be non-empty".into()));
            }
            if labels[..i].contains(label) {
                return Err(Error::InvalidSpace(format!(
                    "duplicate mode label `{label}`"
                )));
            }
            if dims[i] == 0 {
                return Err(Error::InvalidSpace(format!(
                    "mode `{label}` has dimension 0"
                )));
            }
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidSpace("total dimension overflows usize".into()))?;
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len() - 1).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        Ok(Self {
            labels,
            dims,
            strides,
            total,
        })
    }

    /// Single truncated mode.
    pub fn single(label: &str, dim: usize) -> Result<Self> {
        Self::new([(label, dim)])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn mode_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownMode(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.dims[self.mode_index(label)?])
    }

    /// Flat basis index of a product Fock state.
    pub fn index_of(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.dims.len() {
            return Err(Error::InvalidState(format!(
                "expected {} occupation numbers, got {}",
                self.dims.len(),
                occupations.len()
            )));
        }
        let mut idx = 0;
        for (k, (&n, &d)) in occupations.iter().zip(&self.dims).enumerate() {
            if n >= d {
                return Err(Error::InvalidState(format!(
                    "occupation {n} exceeds truncation {d} of mode `{}`",
                    self.labels[k]
                )));
            }
            idx += n * self.strides[k];
        }
        Ok(idx)
    }

    /// Occupation numbers of a flat basis index.
    pub fn occupations(&self, index: usize) -> Vec<usize> {
        self.dims
            .iter()
            .zip(&self.strides)
            .map(|(&d, &s)| (index / s) % d)
            .collect()
    }

    /// Subspace made of the listed modes, kept in their original order.
    pub fn subspace(&self, keep: &[&str]) -> Result<HilbertSpace> {
        let mut idx = keep
            .iter()
            .map(|l| self.mode_index(l))
            .collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        if idx.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSpace(
                "duplicate label in subspace selection".into(),
            ));
        }
        Self::new(idx.iter().map(|&k| (self.labels[k].clone(), self.dims[k])))
    }
}

impl fmt::Display for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, (l, d)) in self.labels.iter().zip(&self.dims).enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}:{d}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leftmost_mode_is_slowest() {
        let s = HilbertSpace::new([("a", 2), ("c", 3)]).unwrap();
        assert_eq!(s.total_dim(), 6);
        assert_eq!(s.index_of(&[0, 2]).unwrap(), 2);
        assert_eq!(s.index_of(&[1, 0]).unwrap(), 3);
        assert_eq!(s.occupations(5), vec![1, 2]);
    }

    #[test]
    fn rejects_bad_modes() {
        assert!(HilbertSpace::new([("a", 0)]).is_err());
        assert!(HilbertSpace::new([("a", 2), ("a", 3)]).is_err());
        assert!(HilbertSpace::new(Vec::<(String, usize)>::new()).is_err());
        let s = HilbertSpace::new([("a", 2)]).unwrap();
        assert!(matches!(s.mode_index("b"), Err(Error::UnknownMode(_))));
    }

    #[test]
    fn subspace_keeps_original_order() {
        let s = HilbertSpace::new([("a", 2), ("b", 3), ("c", 4)]).unwrap();
        let sub = s.subspace(&["c", "a"]).unwrap();
        assert_eq!(sub.labels(), &["a".to_string(), "c".to_string()]);
        assert_eq!(sub.dims(), &[2, 4]);
    }
}
