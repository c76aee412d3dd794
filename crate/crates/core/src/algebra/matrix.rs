use std::fmt;

use super::linalg::QMatrix;
use super::poly::Poly;
use super::ring::{Ring, RingRef};
use super::Rational;
use crate::error::{Error, Result};

/// Dense matrix of polynomials over one ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    ring: RingRef,
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Poly>>,
}

impl PolyMatrix {
    pub fn zeros(ring: &RingRef, rows: usize, cols: usize) -> Self {
        PolyMatrix {
            ring: ring.clone(),
            rows,
            cols,
            entries: vec![vec![Poly::zero(ring); cols]; rows],
        }
    }

    pub fn identity(ring: &RingRef, n: usize) -> Self {
        let mut m = PolyMatrix::zeros(ring, n, n);
        for i in 0..n {
            m.entries[i][i] = Poly::one(ring);
        }
        m
    }

    pub fn from_rows(ring: &RingRef, rows: Vec<Vec<Poly>>) -> Result<Self> {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        for r in &rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch("ragged matrix rows".into()));
            }
            for p in r {
                Ring::check_same(ring, p.ring())?;
            }
        }
        Ok(PolyMatrix {
            ring: ring.clone(),
            rows: rows.len(),
            cols,
            entries: rows,
        })
    }

    /// Matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(ring: &RingRef, rows: usize, cols: &[Vec<Poly>]) -> Result<Self> {
        let mut m = PolyMatrix::zeros(ring, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::LengthMismatch {
                    expected: rows,
                    got: c.len(),
                });
            }
            for (i, p) in c.iter().enumerate() {
                Ring::check_same(ring, p.ring())?;
                m.entries[i][j] = p.clone();
            }
        }
        Ok(m)
    }

    pub fn parse(ring: &RingRef, rows: &[Vec<&str>]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|s| Poly::parse(ring, s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        PolyMatrix::from_rows(ring, rows)
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        assert!(Ring::same(&self.ring, p.ring()));
        self.entries[i][j] = p;
    }

    pub fn row(&self, i: usize) -> &[Poly] {
        &self.entries[i]
    }

    pub fn column(&self, j: usize) -> Vec<Poly> {
        self.entries.iter().map(|r| r[j].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Poly>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut t = PolyMatrix::zeros(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j][i] = self.entries[i][j].clone();
            }
        }
        t
    }

    /// `[self | other]`.
    pub fn hconcat(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        Ring::check_same(&self.ring, &other.ring)?;
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "hconcat of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.iter().chain(b).cloned().collect())
            .collect();
        Ok(PolyMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols + other.cols,
            entries,
        })
    }

    /// Stack `self` above `other`.
    pub fn vconcat(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        Ring::check_same(&self.ring, &other.ring)?;
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch("vconcat column counts differ".into()));
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(PolyMatrix {
            ring: self.ring.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn scale(&self, c: &Rational) -> PolyMatrix {
        self.map(|p| p.scale(c))
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> PolyMatrix {
        PolyMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|r| r.iter().map(&f).collect()).collect(),
        }
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        Ring::check_same(&self.ring, &other.ring)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch("matrix product".into()));
        }
        let mut out = PolyMatrix::zeros(&self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Poly::zero(&self.ring);
                for k in 0..self.cols {
                    if !self.entries[i][k].is_zero() && !other.entries[k][j].is_zero() {
                        acc = &acc + &(&self.entries[i][k] * &other.entries[k][j]);
                    }
                }
                out.entries[i][j] = acc;
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Poly]) -> Result<Vec<Poly>> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok(self
            .entries
            .iter()
            .map(|row| {
                row.iter().zip(v).fold(Poly::zero(&self.ring), |acc, (a, b)| {
                    if a.is_zero() || b.is_zero() {
                        acc
                    } else {
                        &acc + &(a * b)
                    }
                })
            })
            .collect())
    }

    pub fn substitute(&self, images: &[Poly], target: &RingRef) -> Result<PolyMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|r| r.iter().map(|p| p.substitute(images, target)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyMatrix {
            ring: target.clone(),
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn eval(&self, point: &[Rational]) -> Result<QMatrix> {
        let data = self
            .entries
            .iter()
            .map(|r| r.iter().map(|p| p.eval(point)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(QMatrix::new(data, self.cols))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|p| p.is_zero())
    }

    /// Submatrix on the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        PolyMatrix {
            ring: self.ring.clone(),
            rows: rows.len(),
            cols: cols.len(),
            entries: rows
                .iter()
                .map(|&i| cols.iter().map(|&j| self.entries[i][j].clone()).collect())
                .collect(),
        }
    }

    /// Rank over the field of rational functions, by fraction-free
    /// (Bareiss) elimination with full pivoting.
    pub fn generic_rank(&self) -> usize {
        self.bareiss().0
    }

    /// Determinant of a square matrix.
    pub fn det(&self) -> Poly {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        if self.rows == 0 {
            return Poly::one(&self.ring);
        }
        let (rank, det) = self.bareiss();
        if rank < self.rows {
            Poly::zero(&self.ring)
        } else {
            det
        }
    }

    /// (rank, signed last pivot). For a square full-rank matrix the second
    /// component is the determinant.
    fn bareiss(&self) -> (usize, Poly) {
        let mut a = self.entries.clone();
        let (n, m) = (self.rows, self.cols);
        let mut prev = Poly::one(&self.ring);
        let mut sign = false;
        let mut rank = 0;
        for k in 0..n.min(m) {
            // pivot: the nonzero entry with the fewest terms
            let mut best: Option<(usize, usize)> = None;
            for i in k..n {
                for j in k..m {
                    if !a[i][j].is_zero() {
                        let better = match best {
                            None => true,
                            Some((bi, bj)) => a[i][j].num_terms() < a[bi][bj].num_terms(),
                        };
                        if better {
                            best = Some((i, j));
                        }
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            if pi != k {
                a.swap(pi, k);
                sign = !sign;
            }
            if pj != k {
                for row in a.iter_mut() {
                    row.swap(pj, k);
                }
                sign = !sign;
            }
            rank += 1;
            for i in (k + 1)..n {
                for j in (k + 1)..m {
                    let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
                }
                a[i][k] = Poly::zero(&self.ring);
            }
            prev = a[k][k].clone();
        }
        let det = if sign { -prev } else { prev };
        (rank, det)
    }

    /// All `k x k` minors, in lexicographic order of (row set, column set).
    pub fn minors(&self, k: usize) -> Vec<Poly> {
        let mut out = Vec::new();
        for rs in combinations(self.rows, k) {
            for cs in combinations(self.cols, k) {
                out.push(self.select(&rs, &cs).det());
            }
        }
        out
    }

    /// Rank of the rational matrix obtained by evaluation at `point`.
    pub fn rank_at(&self, point: &[Rational]) -> Result<usize> {
        if point.len() != self.ring.nvars() {
            return Err(Error::ArityMismatch {
                expected: self.ring.nvars(),
                got: point.len(),
            });
        }
        Ok(self.eval(point)?.rank())
    }

    /// Solve the square system `self * x = b` over the fraction field by
    /// Cramer's rule. Returns numerators and the common denominator `det`.
    pub fn cramer(&self, b: &[Poly]) -> Result<(Vec<Poly>, Poly)> {
        if self.rows != self.cols || b.len() != self.rows {
            return Err(Error::DimensionMismatch("cramer needs a square system".into()));
        }
        let det = self.det();
        let mut nums = Vec::with_capacity(self.cols);
        for j in 0..self.cols {
            let mut mj = self.clone();
            for (i, p) in b.iter().enumerate() {
                mj.entries[i][j] = p.clone();
            }
            nums.push(mj.det());
        }
        Ok((nums, det))
    }
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let cells: Vec<String> = r.iter().map(|p| p.to_string()).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn so3() -> PolyMatrix {
        let r = Ring::new(&["x", "y", "z"]).unwrap();
        PolyMatrix::parse(&r, &[vec!["0", "z", "-y"], vec!["-z", "0", "x"], vec!["y", "-x", "0"]]).unwrap()
    }

    #[test]
    fn generic_ranks() {
        let r = Ring::new(&["x", "y", "z"]).unwrap();
        assert_eq!(PolyMatrix::identity(&r, 3).generic_rank(), 3);
        assert_eq!(PolyMatrix::parse(&r, &[vec!["x"]]).unwrap().generic_rank(), 1);
        assert_eq!(so3().generic_rank(), 2);
        assert_eq!(PolyMatrix::zeros(&r, 2, 3).generic_rank(), 0);
    }

    #[test]
    fn pointwise_ranks() {
        let m = so3();
        assert_eq!(m.rank_at(&[rat(0), rat(0), rat(0)]).unwrap(), 0);
        assert_eq!(m.rank_at(&[rat(1), rat(0), rat(0)]).unwrap(), 2);
        let r = Ring::new(&["x"]).unwrap();
        let x = PolyMatrix::parse(&r, &[vec!["x"]]).unwrap();
        assert_eq!(x.rank_at(&[rat(0)]).unwrap(), 0);
        assert!(x.rank_at(&[rat(0), rat(1)]).is_err());
    }

    #[test]
    fn determinants() {
        let r = Ring::new(&["x", "y"]).unwrap();
        let m = PolyMatrix::parse(&r, &[vec!["x", "y"], vec!["1", "x"]]).unwrap();
        assert_eq!(m.det(), Poly::parse(&r, "x^2 - y").unwrap());
        let p = PolyMatrix::parse(&r, &[vec!["0", "1"], vec!["1", "0"]]).unwrap();
        assert_eq!(p.det(), Poly::int(&r, -1));
        assert_eq!(so3().det().to_string(), "0");
    }

    #[test]
    fn minors_count() {
        let m = so3();
        assert_eq!(m.minors(2).len(), 9);
        assert_eq!(combinations(5, 3).len(), 10);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }
}
