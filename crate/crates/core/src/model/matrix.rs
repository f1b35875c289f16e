use crate::error::{Error, Result};

/// Dense square matrix over network nodes, row-major. Node 0 is the depot.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DegenerateInput(format!(
                "matrix data has {} entries, expected {}",
                data.len(),
                n * n
            )));
        }
        Ok(DistanceMatrix { n, data })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DegenerateInput(format!(
                "matrix row has {} entries, expected {n}",
                r.len()
            )));
        }
        Ok(DistanceMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n.max(1)).take(self.n)
    }

    pub(crate) fn try_map(&self, f: impl Fn(f64) -> Result<f64>) -> Result<Self> {
        Ok(DistanceMatrix {
            n: self.n,
            data: self.data.iter().map(|&v| f(v)).collect::<Result<_>>()?,
        })
    }

    /// Largest |d_ij - d_ji| over all pairs.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_checks() {
        assert!(DistanceMatrix::new(2, vec![0.0; 3]).is_err());
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0]]).is_err());
        let m = DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(m.get(1, 0), 2.0);
        assert_eq!(m.max_asymmetry(), 1.0);
        assert_eq!(m.rows().count(), 2);
        assert_eq!(m.row(0), &[0.0, 1.0]);
    }
}
