//! Dense matrices over GF(2).

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    /// Row-major.
    bits: Vec<bool>,
}

impl BinaryMatrix {
    pub fn new(rows: usize, cols: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} bits for a {rows}x{cols} matrix",
                bits.len()
            )));
        }
        Ok(Self { rows, cols, bits })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            bits: vec![false; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from equal-length rows; an empty list gives `0 x cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<bool>]) -> Result<Self> {
        let mut bits = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            bits.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            bits,
        })
    }

    /// Parses rows written as `0`/`1` strings, e.g. `["110", "101"]`.
    pub fn parse_rows(cols: usize, rows: &[&str]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| {
                r.chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(Error::Parse(format!("'{c}' is not a binary digit"))),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(cols, &parsed)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.bits[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[bool] {
        &self.bits[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<bool>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&b| !b)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let v = (0..self.cols).fold(false, |acc, k| acc ^ (self.get(r, k) & other.get(k, c)));
                out.set(r, c, v);
            }
        }
        Ok(out)
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot stack {} rows beside {} rows",
                self.rows, other.rows
            )));
        }
        let rows: Vec<Vec<bool>> = (0..self.rows)
            .map(|r| [self.row(r), other.row(r)].concat())
            .collect();
        Self::from_rows(self.cols + other.cols, &rows)
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot stack {} columns over {} columns",
                self.cols, other.cols
            )));
        }
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Self::new(self.rows + other.rows, self.cols, bits)
    }

    /// Column `j` of the result is column `perm[j]` of `self`.
    pub fn select_columns(&self, perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, perm.len());
        for r in 0..self.rows {
            for (j, &src) in perm.iter().enumerate() {
                out.set(r, j, self.get(r, src));
            }
        }
        out
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        for c in 0..self.cols {
            let v = self.get(src, c);
            if v {
                let i = dst * self.cols + c;
                self.bits[i] = !self.bits[i];
            }
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.bits.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// Reduced row echelon form and its pivot columns. Zero rows are dropped.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c)) else {
                continue;
            };
            m.swap_rows(r, p);
            for i in 0..m.rows {
                if i != r && m.get(i, c) {
                    m.xor_row_into(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        m.bits.truncate(r * m.cols);
        m.rows = r;
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn row_space_eq(&self, other: &Self) -> bool {
        self.cols == other.cols && self.rref().0 == other.rref().0
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            for &b in self.row(r) {
                write!(f, "{}", b as u8)?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for &b in self.row(r) {
                write!(f, "{}", b as u8)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_and_rank() {
        let m = BinaryMatrix::parse_rows(3, &["110", "011", "101"]).unwrap();
        let (r, piv) = m.rref();
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(r, BinaryMatrix::parse_rows(3, &["101", "011"]).unwrap());
        assert_eq!(m.rank(), 2);
        assert_eq!(BinaryMatrix::identity(4).rank(), 4);
        assert_eq!(BinaryMatrix::zeros(2, 3).rank(), 0);
    }

    #[test]
    fn multiplication_mod_two() {
        let a = BinaryMatrix::parse_rows(3, &["110", "101"]).unwrap();
        let b = BinaryMatrix::parse_rows(3, &["111"]).unwrap();
        assert!(a.mul(&b.transpose()).unwrap().is_zero());
        assert!(a.mul(&a).is_err());
    }

    #[test]
    fn row_space_ignores_presentation() {
        let a = BinaryMatrix::parse_rows(3, &["110", "101"]).unwrap();
        let b = BinaryMatrix::parse_rows(3, &["011", "110"]).unwrap();
        let c = BinaryMatrix::parse_rows(3, &["111", "110"]).unwrap();
        assert!(a.row_space_eq(&b));
        assert!(!a.row_space_eq(&c));
    }

    #[test]
    fn column_selection_and_stacking() {
        let a = BinaryMatrix::parse_rows(3, &["100", "011"]).unwrap();
        let p = a.select_columns(&[2, 0, 1]);
        assert_eq!(p, BinaryMatrix::parse_rows(3, &["010", "101"]).unwrap());
        let h = a.hstack(&BinaryMatrix::identity(2)).unwrap();
        assert_eq!(h.cols(), 5);
        assert_eq!(h.row(1), &[false, true, true, false, true]);
        let v = a.vstack(&a).unwrap();
        assert_eq!(v.rows(), 4);
        assert!(BinaryMatrix::parse_rows(2, &["1x"]).is_err());
        assert!(BinaryMatrix::parse_rows(2, &["101"]).is_err());
    }
}
