use crate::error::LpError;

/// Closed interval `[lower, upper]` for one variable. Either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub const NON_NEGATIVE: Bounds = Bounds { lower: 0.0, upper: f64::INFINITY };
    pub const FREE: Bounds = Bounds { lower: f64::NEG_INFINITY, upper: f64::INFINITY };

    pub fn new(lower: f64, upper: f64) -> Self {
        Bounds { lower, upper }
    }

    pub fn fixed(value: f64) -> Self {
        Bounds { lower: value, upper: value }
    }

    pub fn is_fixed(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lower - tol && x <= self.upper + tol
    }
}

/// A linear program in equality form:
///
/// ```text
/// minimize    cᵀx
/// subject to  A x = b
///             l ≤ x ≤ u
/// ```
///
/// `A` is held in compressed sparse column form. Duplicate triplets are summed
/// on construction and explicit zeros are dropped. Instances are immutable once
/// built.
#[derive(Debug, Clone, PartialEq)]
pub struct LpInstance {
    n_vars: usize,
    n_rows: usize,
    objective: Vec<f64>,
    rhs: Vec<f64>,
    bounds: Vec<Bounds>,
    col_start: Vec<usize>,
    row_index: Vec<usize>,
    values: Vec<f64>,
}

impl LpInstance {
    /// Builds an instance from a sparse objective, `(row, col, value)` triplets, the
    /// right-hand side and per-variable bounds.
    pub fn new(
        n_vars: usize,
        n_rows: usize,
        objective: &[(usize, f64)],
        triplets: &[(usize, usize, f64)],
        rhs: Vec<f64>,
        bounds: Vec<Bounds>,
    ) -> Result<Self, LpError> {
        if rhs.len() != n_rows {
            return Err(LpError::Dimension { what: "rhs", expected: n_rows, got: rhs.len() });
        }
        if bounds.len() != n_vars {
            return Err(LpError::Dimension { what: "bounds", expected: n_vars, got: bounds.len() });
        }
        let mut c = vec![0.0; n_vars];
        for &(j, v) in objective {
            if j >= n_vars {
                return Err(LpError::ColumnOutOfRange { col: j, n_vars });
            }
            if !v.is_finite() {
                return Err(LpError::NonFinite { what: "objective", index: j });
            }
            c[j] += v;
        }
        for (i, &v) in rhs.iter().enumerate() {
            if !v.is_finite() {
                return Err(LpError::NonFinite { what: "rhs", index: i });
            }
        }
        for (j, b) in bounds.iter().enumerate() {
            if b.lower.is_nan() || b.upper.is_nan() || b.lower == f64::INFINITY || b.upper == f64::NEG_INFINITY {
                return Err(LpError::InvalidBounds { col: j, lower: b.lower, upper: b.upper });
            }
            if b.lower > b.upper {
                return Err(LpError::InvalidBounds { col: j, lower: b.lower, upper: b.upper });
            }
        }

        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for (k, &(i, j, v)) in triplets.iter().enumerate() {
            if i >= n_rows {
                return Err(LpError::RowOutOfRange { row: i, n_rows });
            }
            if j >= n_vars {
                return Err(LpError::ColumnOutOfRange { col: j, n_vars });
            }
            if !v.is_finite() {
                return Err(LpError::NonFinite { what: "matrix", index: k });
            }
            entries.push((j, i, v));
        }
        entries.sort_by_key(|a| (a.0, a.1));

        let mut col_start = vec![0usize; n_vars + 1];
        let mut row_index = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut k = 0;
        for j in 0..n_vars {
            while k < entries.len() && entries[k].0 == j {
                let i = entries[k].1;
                let mut v = 0.0;
                while k < entries.len() && entries[k].0 == j && entries[k].1 == i {
                    v += entries[k].2;
                    k += 1;
                }
                if v != 0.0 {
                    row_index.push(i);
                    values.push(v);
                }
            }
            col_start[j + 1] = row_index.len();
        }

        Ok(LpInstance { n_vars, n_rows, objective: c, rhs, bounds, col_start, row_index, values })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn bounds(&self) -> &[Bounds] {
        &self.bounds
    }

    /// Nonzeros of column `j` as parallel `(rows, values)` slices, rows ascending.
    pub fn column(&self, j: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.col_start[j], self.col_start[j + 1]);
        (&self.row_index[s..e], &self.values[s..e])
    }

    /// All nonzeros as `(row, col, value)`, column-major.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_vars).flat_map(move |j| {
            let (rows, vals) = self.column(j);
            rows.iter().zip(vals).map(move |(&i, &v)| (i, j, v))
        })
    }

    /// `A x` as a dense vector over rows.
    pub fn row_activity(&self, x: &[f64]) -> Vec<f64> {
        let mut ax = vec![0.0; self.n_rows];
        for (j, &xj) in x.iter().enumerate().take(self.n_vars) {
            if xj == 0.0 {
                continue;
            }
            let (rows, vals) = self.column(j);
            for (&i, &v) in rows.iter().zip(vals) {
                ax[i] += v * xj;
            }
        }
        ax
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, x)| c * x).sum()
    }
}

/// Incremental construction of an [`LpInstance`] by named variables and rows.
#[derive(Debug, Default, Clone)]
pub struct LpBuilder {
    objective: Vec<(usize, f64)>,
    bounds: Vec<Bounds>,
    triplets: Vec<(usize, usize, f64)>,
    rhs: Vec<f64>,
}

impl LpBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(vars: usize, rows: usize, nnz: usize) -> Self {
        LpBuilder {
            objective: Vec::with_capacity(vars),
            bounds: Vec::with_capacity(vars),
            triplets: Vec::with_capacity(nnz),
            rhs: Vec::with_capacity(rows),
        }
    }

    /// Adds a variable and returns its column index.
    pub fn add_var(&mut self, bounds: Bounds, cost: f64) -> usize {
        let j = self.bounds.len();
        self.bounds.push(bounds);
        if cost != 0.0 {
            self.objective.push((j, cost));
        }
        j
    }

    /// Adds the equality row `Σ coeff·x = rhs` and returns its row index.
    pub fn add_row(&mut self, coeffs: &[(usize, f64)], rhs: f64) -> usize {
        let i = self.rhs.len();
        self.rhs.push(rhs);
        for &(j, v) in coeffs {
            self.triplets.push((i, j, v));
        }
        i
    }

    pub fn n_vars(&self) -> usize {
        self.bounds.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn build(self) -> Result<LpInstance, LpError> {
        LpInstance::new(self.bounds.len(), self.rhs.len(), &self.objective, &self.triplets, self.rhs, self.bounds)
    }
}
