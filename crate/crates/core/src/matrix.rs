use std::fmt;

use crate::error::{GqError, Result};
use crate::relation::Universe;

/// A square `m×m` matrix over the universe, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    universe: Universe,
    order: usize,
    entries: Vec<usize>,
}

impl Matrix {
    pub fn new(universe: Universe, rows: &[Vec<usize>]) -> Result<Self> {
        let order = rows.len();
        let mut entries = Vec::with_capacity(order * order);
        for row in rows {
            if row.len() != order {
                return Err(GqError::ArityMismatch {
                    expected: order,
                    actual: row.len(),
                });
            }
            for &x in row {
                entries.push(universe.check(x)?);
            }
        }
        Ok(Matrix {
            universe,
            order,
            entries,
        })
    }

    pub(crate) fn from_entries(universe: Universe, order: usize, entries: Vec<usize>) -> Self {
        debug_assert_eq!(entries.len(), order * order);
        Matrix {
            universe,
            order,
            entries,
        }
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.entries[i * self.order + j]
    }

    pub fn row(&self, i: usize) -> Vec<usize> {
        self.entries[i * self.order..(i + 1) * self.order].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<usize> {
        (0..self.order).map(|i| self.get(i, j)).collect()
    }

    pub fn diagonal(&self) -> Vec<usize> {
        (0..self.order).map(|i| self.get(i, i)).collect()
    }

    /// `matrix m n` header followed by `m` rows.
    pub fn to_text(&self) -> String {
        let mut out = format!("matrix {} {}\n", self.order, self.universe.size());
        for i in 0..self.order {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = crate::text::content_lines(text);
        let (hline, header) = lines
            .next()
            .ok_or_else(|| GqError::parse(0, "missing `matrix <m> <n>` header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "matrix" {
            return Err(GqError::parse(hline, "expected `matrix <m> <n>`"));
        }
        let m = crate::text::parse_usize(fields[1], hline)?;
        let n = crate::text::parse_usize(fields[2], hline)?;
        let universe = Universe::new(n).map_err(|e| GqError::parse(hline, e.to_string()))?;
        let mut rows = Vec::with_capacity(m);
        for (lineno, line) in lines {
            let row = line
                .split_whitespace()
                .map(|f| crate::text::parse_usize(f, lineno))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != m {
                return Err(GqError::parse(
                    lineno,
                    format!("expected {m} entries, found {}", row.len()),
                ));
            }
            if let Some(&x) = row.iter().find(|&&x| x >= n) {
                return Err(GqError::parse(lineno, format!("entry {x} out of range")));
            }
            rows.push(row);
        }
        if rows.len() != m {
            return Err(GqError::parse(hline, format!("expected {m} rows, found {}", rows.len())));
        }
        Matrix::new(universe, &rows)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[")?;
        for i in 0..self.order {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}
