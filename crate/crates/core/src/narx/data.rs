use std::io::{Read, Write};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Input/output record split into a contiguous estimation prefix and validation suffix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    u: Vec<T>,
    y: Vec<T>,
    n_est: usize,
}

impl<T: Scalar> Dataset<T> {
    /// Splits `(u, y)` so that the first `n_est` samples are used for estimation.
    pub fn split(u: Vec<T>, y: Vec<T>, n_est: usize) -> Result<Self> {
        if u.len() != y.len() {
            return Err(Error::LengthMismatch { expected: u.len(), actual: y.len() });
        }
        if n_est == 0 || n_est >= u.len() {
            return Err(Error::InvalidSplit { n_est, len: u.len() });
        }
        Ok(Self { u, y, n_est })
    }

    pub fn u(&self) -> &[T] {
        &self.u
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn n_est(&self) -> usize {
        self.n_est
    }

    /// Validation length 𝒩_v.
    pub fn n_val(&self) -> usize {
        self.len() - self.n_est
    }

    pub fn validation_y(&self) -> &[T] {
        &self.y[self.n_est..]
    }

    pub fn validation_u(&self) -> &[T] {
        &self.u[self.n_est..]
    }

    pub fn with_split(&self, n_est: usize) -> Result<Self> {
        Self::split(self.u.clone(), self.y.clone(), n_est)
    }

    pub fn cast<U: Scalar>(&self) -> Dataset<U> {
        let conv = |v: &[T]| v.iter().map(|x| U::lit(x.to_f64_lossy())).collect();
        Dataset { u: conv(&self.u), y: conv(&self.y), n_est: self.n_est }
    }

    /// Writes the `k,u,y` CSV form (the split is not part of the file).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,u,y")?;
        for (k, (u, y)) in self.u.iter().zip(&self.y).enumerate() {
            writeln!(w, "{k},{},{}", u.to_f64_lossy(), y.to_f64_lossy())?;
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct Row {
    #[allow(dead_code)]
    k: usize,
    u: f64,
    y: f64,
}

/// Reads a `k,u,y` CSV record and applies the estimation split.
pub fn read_csv<T: Scalar, R: Read>(r: R, n_est: usize) -> Result<Dataset<T>> {
    let mut reader = csv::Reader::from_reader(r);
    let mut u = Vec::new();
    let mut y = Vec::new();
    for row in reader.deserialize::<Row>() {
        let row = row.map_err(|e| Error::InvalidConfig(format!("dataset CSV: {e}")))?;
        u.push(T::lit(row.u));
        y.push(T::lit(row.y));
    }
    Dataset::split(u, y, n_est)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_sizes() {
        let d = Dataset::split(vec![0.0; 1000], vec![0.0; 1000], 700).unwrap();
        assert_eq!(d.n_val(), 300);
        let d = Dataset::split(vec![0.0; 1000], vec![0.0; 1000], 999).unwrap();
        assert_eq!(d.n_val(), 1);
        assert!(matches!(
            Dataset::split(vec![0.0; 10], vec![0.0; 10], 10),
            Err(Error::InvalidSplit { .. })
        ));
        assert!(Dataset::split(vec![0.0; 10], vec![0.0; 9], 5).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let d = Dataset::split(vec![0.25, -1.5, 3.0], vec![1e-7, 2.0, 0.1], 2).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("k,u,y\n0,0.25,0.0000001\n"));
        let back: Dataset<f64> = read_csv(buf.as_slice(), 2).unwrap();
        assert_eq!(back, d);
    }
}
