//! Sparse LU factorization of simplex bases with product-form updates.
//!
//! The factorization is right-looking Gaussian elimination with Markowitz
//! pivot selection and threshold partial pivoting. Column and row singletons
//! are taken first, so near-triangular bases factor with little or no fill.
//! Basis changes between refactorizations are appended as eta columns.

const THRESHOLD: f64 = 0.1;
const ABS_PIVOT_TOL: f64 = 1e-11;
const MARKOWITZ_CANDIDATES: usize = 4;

/// Columns of a square matrix in compressed form; column `k` is basis position `k`.
pub(crate) struct SparseColumns {
    pub start: Vec<usize>,
    pub rows: Vec<usize>,
    pub vals: Vec<f64>,
}

impl SparseColumns {
    pub fn with_capacity(m: usize, nnz: usize) -> Self {
        let mut start = Vec::with_capacity(m + 1);
        start.push(0);
        SparseColumns { start, rows: Vec::with_capacity(nnz), vals: Vec::with_capacity(nnz) }
    }

    pub fn push(&mut self, rows: &[usize], vals: &[f64]) {
        self.rows.extend_from_slice(rows);
        self.vals.extend_from_slice(vals);
        self.start.push(self.rows.len());
    }

    pub fn push_unit(&mut self, row: usize) {
        self.rows.push(row);
        self.vals.push(1.0);
        self.start.push(self.rows.len());
    }

    fn len(&self) -> usize {
        self.start.len() - 1
    }

    fn col(&self, k: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.start[k], self.start[k + 1]);
        (&self.rows[s..e], &self.vals[s..e])
    }
}

/// Rows and basis positions that could not be pivoted.
#[derive(Debug, Clone)]
pub(crate) struct Singular {
    pub rows: Vec<usize>,
    pub positions: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
struct Triangle {
    start: Vec<usize>,
    index: Vec<usize>,
    val: Vec<f64>,
}

impl Triangle {
    fn entries(&self, k: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.start[k], self.start[k + 1]);
        (&self.index[s..e], &self.val[s..e])
    }

    fn nnz(&self) -> usize {
        self.val.len()
    }
}

/// `P B Q = L U` in pivot order.
#[derive(Debug, Clone)]
pub(crate) struct LuFactors {
    m: usize,
    row_of: Vec<usize>,
    col_of: Vec<usize>,
    /// Column `k` of L: `(row, multiplier)` for rows pivoted after `k`.
    lower: Triangle,
    diag: Vec<f64>,
    /// Row `k` of U off the diagonal, indexed by pivot step.
    upper_rows: Triangle,
    /// Column `k` of U above the diagonal, indexed by pivot step.
    upper_cols: Triangle,
}

struct Active {
    rows: Vec<Vec<(usize, f64)>>,
    cols: Vec<Vec<usize>>,
    col_count: Vec<usize>,
    row_done: Vec<bool>,
    col_done: Vec<bool>,
    buckets: Vec<Vec<usize>>,
    col_singles: Vec<usize>,
    row_singles: Vec<usize>,
}

impl Active {
    fn value(&self, i: usize, j: usize) -> f64 {
        self.rows[i].iter().find(|e| e.0 == j).map_or(0.0, |e| e.1)
    }

    fn set_col_count(&mut self, j: usize, count: usize) {
        self.col_count[j] = count;
        if count == 1 {
            self.col_singles.push(j);
        }
        if count < self.buckets.len() {
            self.buckets[count].push(j);
        }
    }

    fn column_max(&self, j: usize) -> f64 {
        self.cols[j]
            .iter()
            .filter(|&&i| !self.row_done[i])
            .map(|&i| self.value(i, j).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn factorize(basis: &SparseColumns) -> Result<LuFactors, Singular> {
    let m = basis.len();
    let mut act = Active {
        rows: vec![Vec::new(); m],
        cols: vec![Vec::new(); m],
        col_count: vec![0; m],
        row_done: vec![false; m],
        col_done: vec![false; m],
        buckets: vec![Vec::new(); m + 2],
        col_singles: Vec::new(),
        row_singles: Vec::new(),
    };
    for k in 0..m {
        let (rows, vals) = basis.col(k);
        for (&i, &v) in rows.iter().zip(vals) {
            if v != 0.0 {
                act.rows[i].push((k, v));
                act.cols[k].push(i);
            }
        }
    }
    for k in 0..m {
        let c = act.cols[k].len();
        act.set_col_count(k, c);
    }
    for i in 0..m {
        if act.rows[i].len() == 1 {
            act.row_singles.push(i);
        }
    }

    let mut row_of = Vec::with_capacity(m);
    let mut col_of = Vec::with_capacity(m);
    let mut lower = Triangle { start: vec![0], ..Default::default() };
    let mut diag = Vec::with_capacity(m);
    let mut u_rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);

    // Scratch for row updates.
    let mut pivot_row_val = vec![0.0; m];
    let mut pivot_row_mark = vec![usize::MAX; m];
    let mut visit_mark = vec![usize::MAX; m];
    let mut stamp = 0usize;

    for step in 0..m {
        let Some((r, c)) = choose_pivot(&mut act) else {
            break;
        };
        let p = act.value(r, c);
        act.row_done[r] = true;
        act.col_done[c] = true;

        let pivot_row = std::mem::take(&mut act.rows[r]);
        let mut urow = Vec::with_capacity(pivot_row.len().saturating_sub(1));
        for &(j, v) in &pivot_row {
            if j == c {
                continue;
            }
            urow.push((j, v));
            pivot_row_val[j] = v;
            pivot_row_mark[j] = step;
            let cnt = act.col_count[j] - 1;
            act.set_col_count(j, cnt);
        }

        let col_rows = std::mem::take(&mut act.cols[c]);
        for &i in &col_rows {
            if act.row_done[i] {
                continue;
            }
            let pos = act.rows[i].iter().position(|e| e.0 == c).expect("pattern consistent");
            let a = act.rows[i].swap_remove(pos).1;
            let mult = a / p;
            lower.index.push(i);
            lower.val.push(mult);
            if !urow.is_empty() {
                stamp += 1;
                for e in act.rows[i].iter_mut() {
                    if pivot_row_mark[e.0] == step {
                        e.1 -= mult * pivot_row_val[e.0];
                        visit_mark[e.0] = stamp;
                    }
                }
                for &(j, v) in &urow {
                    if visit_mark[j] != stamp {
                        act.rows[i].push((j, -mult * v));
                        act.cols[j].push(i);
                        let cnt = act.col_count[j] + 1;
                        act.set_col_count(j, cnt);
                    }
                }
            }
            if act.rows[i].len() == 1 {
                act.row_singles.push(i);
            }
        }
        lower.start.push(lower.index.len());
        act.col_count[c] = 0;

        row_of.push(r);
        col_of.push(c);
        diag.push(p);
        u_rows.push(urow);
    }

    if row_of.len() < m {
        let rows = (0..m).filter(|&i| !act.row_done[i]).collect();
        let positions = (0..m).filter(|&j| !act.col_done[j]).collect();
        return Err(Singular { rows, positions });
    }

    let mut k_of_col = vec![0usize; m];
    for (k, &c) in col_of.iter().enumerate() {
        k_of_col[c] = k;
    }
    let mut upper_rows = Triangle { start: vec![0], ..Default::default() };
    let mut col_counts = vec![0usize; m];
    for urow in &u_rows {
        for &(j, v) in urow {
            let k2 = k_of_col[j];
            upper_rows.index.push(k2);
            upper_rows.val.push(v);
            col_counts[k2] += 1;
        }
        upper_rows.start.push(upper_rows.index.len());
    }
    let mut upper_cols = Triangle { start: Vec::with_capacity(m + 1), ..Default::default() };
    upper_cols.start.push(0);
    for k in 0..m {
        let s = upper_cols.start[k] + col_counts[k];
        upper_cols.start.push(s);
    }
    let nnz = upper_rows.nnz();
    upper_cols.index = vec![0; nnz];
    upper_cols.val = vec![0.0; nnz];
    let mut fill = upper_cols.start.clone();
    for k in 0..m {
        let (idx, val) = upper_rows.entries(k);
        for (&k2, &v) in idx.iter().zip(val) {
            upper_cols.index[fill[k2]] = k;
            upper_cols.val[fill[k2]] = v;
            fill[k2] += 1;
        }
    }

    Ok(LuFactors { m, row_of, col_of, lower, diag, upper_rows, upper_cols })
}

fn choose_pivot(act: &mut Active) -> Option<(usize, usize)> {
    while let Some(j) = act.col_singles.pop() {
        if act.col_done[j] || act.col_count[j] != 1 {
            continue;
        }
        let i = *act.cols[j].iter().find(|&&i| !act.row_done[i]).expect("count is one");
        if act.value(i, j).abs() > ABS_PIVOT_TOL {
            return Some((i, j));
        }
    }
    let mut deferred = Vec::new();
    let mut found = None;
    while let Some(i) = act.row_singles.pop() {
        if act.row_done[i] || act.rows[i].len() != 1 {
            continue;
        }
        let (j, v) = act.rows[i][0];
        if v.abs() > ABS_PIVOT_TOL && v.abs() >= THRESHOLD * act.column_max(j) {
            found = Some((i, j));
            break;
        }
        deferred.push(i);
    }
    act.row_singles.extend(deferred);
    if found.is_some() {
        return found;
    }
    markowitz(act)
}

fn markowitz(act: &mut Active) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, usize, f64)> = None;
    let mut examined = 0;
    for count in 1..act.buckets.len() {
        if let Some((_, _, cost, _)) = best {
            let lower_bound = (count - 1) * (count - 1);
            if cost <= lower_bound || examined >= MARKOWITZ_CANDIDATES {
                break;
            }
        }
        let mut bucket = std::mem::take(&mut act.buckets[count]);
        bucket.retain(|&j| !act.col_done[j] && act.col_count[j] == count);
        bucket.sort_unstable();
        bucket.dedup();
        for &j in &bucket {
            let entries: Vec<(usize, f64)> = act.cols[j]
                .iter()
                .filter(|&&i| !act.row_done[i])
                .map(|&i| (i, act.value(i, j)))
                .collect();
            let colmax = entries.iter().fold(0.0f64, |m, e| m.max(e.1.abs()));
            if colmax <= ABS_PIVOT_TOL {
                continue;
            }
            for &(i, v) in &entries {
                if v.abs() < THRESHOLD * colmax {
                    continue;
                }
                let cost = (act.rows[i].len() - 1) * (count - 1);
                let better = match best {
                    None => true,
                    Some((_, _, bc, bv)) => cost < bc || (cost == bc && v.abs() > bv),
                };
                if better {
                    best = Some((i, j, cost, v.abs()));
                }
            }
            examined += 1;
            if examined >= MARKOWITZ_CANDIDATES {
                break;
            }
        }
        act.buckets[count] = bucket;
    }
    best.map(|(i, j, _, _)| (i, j))
}

impl LuFactors {
    pub fn nnz(&self) -> usize {
        self.lower.nnz() + self.upper_rows.nnz() + self.m
    }

    /// Solves `B x = rhs`. `rhs` is indexed by row and is overwritten; the
    /// solution is written to `out`, indexed by basis position.
    pub fn solve(&self, rhs: &mut [f64], scratch: &mut [f64], out: &mut [f64]) {
        for k in 0..self.m {
            let v = rhs[self.row_of[k]];
            if v != 0.0 {
                let (idx, val) = self.lower.entries(k);
                for (&i, &l) in idx.iter().zip(val) {
                    rhs[i] -= l * v;
                }
            }
        }
        for k in 0..self.m {
            scratch[k] = rhs[self.row_of[k]];
        }
        for k in (0..self.m).rev() {
            let z = scratch[k] / self.diag[k];
            if z != 0.0 {
                let (idx, val) = self.upper_cols.entries(k);
                for (&k2, &u) in idx.iter().zip(val) {
                    scratch[k2] -= u * z;
                }
            }
            out[self.col_of[k]] = z;
        }
    }

    /// Solves `Bᵀ y = rhs`. `rhs` is indexed by basis position and is
    /// overwritten; the solution is written to `out`, indexed by row.
    pub fn solve_transpose(&self, rhs: &mut [f64], scratch: &mut [f64], out: &mut [f64]) {
        for k in 0..self.m {
            scratch[k] = rhs[self.col_of[k]];
        }
        for k in 0..self.m {
            let z = scratch[k] / self.diag[k];
            scratch[k] = z;
            if z != 0.0 {
                let (idx, val) = self.upper_rows.entries(k);
                for (&k2, &u) in idx.iter().zip(val) {
                    scratch[k2] -= u * z;
                }
            }
        }
        for k in 0..self.m {
            out[self.row_of[k]] = scratch[k];
        }
        for k in (0..self.m).rev() {
            let (idx, val) = self.lower.entries(k);
            if idx.is_empty() {
                continue;
            }
            let r = self.row_of[k];
            let mut acc = out[r];
            for (&i, &l) in idx.iter().zip(val) {
                acc -= l * out[i];
            }
            out[r] = acc;
        }
    }
}

/// LU factors plus the eta file accumulated since the last refactorization.
#[derive(Debug, Clone)]
pub(crate) struct BasisFactor {
    lu: LuFactors,
    eta_pos: Vec<usize>,
    eta_pivot: Vec<f64>,
    eta: Triangle,
    scratch: Vec<f64>,
}

impl BasisFactor {
    pub fn new(lu: LuFactors) -> Self {
        let m = lu.m;
        BasisFactor {
            lu,
            eta_pos: Vec::new(),
            eta_pivot: Vec::new(),
            eta: Triangle { start: vec![0], ..Default::default() },
            scratch: vec![0.0; m],
        }
    }

    pub fn num_updates(&self) -> usize {
        self.eta_pos.len()
    }

    pub fn eta_nnz(&self) -> usize {
        self.eta.nnz()
    }

    pub fn lu_nnz(&self) -> usize {
        self.lu.nnz()
    }

    /// `x = B⁻¹ rhs`; `rhs` (by row) is consumed, `x` is by basis position.
    pub fn ftran(&mut self, rhs: &mut [f64], x: &mut [f64]) {
        self.lu.solve(rhs, &mut self.scratch, x);
        for e in 0..self.eta_pos.len() {
            let p = self.eta_pos[e];
            let xp = x[p] / self.eta_pivot[e];
            x[p] = xp;
            if xp != 0.0 {
                let (idx, val) = self.eta.entries(e);
                for (&i, &a) in idx.iter().zip(val) {
                    x[i] -= a * xp;
                }
            }
        }
    }

    /// `y = B⁻ᵀ rhs`; `rhs` (by basis position) is consumed, `y` is by row.
    pub fn btran(&mut self, rhs: &mut [f64], y: &mut [f64]) {
        for e in (0..self.eta_pos.len()).rev() {
            let p = self.eta_pos[e];
            let (idx, val) = self.eta.entries(e);
            let mut acc = rhs[p];
            for (&i, &a) in idx.iter().zip(val) {
                acc -= a * rhs[i];
            }
            rhs[p] = acc / self.eta_pivot[e];
        }
        self.lu.solve_transpose(rhs, &mut self.scratch, y);
    }

    /// Records that basis position `pos` was replaced by a column whose
    /// representation in the current basis is `alpha` (dense, by position).
    pub fn update(&mut self, pos: usize, alpha: &[f64], nonzeros: &[usize]) {
        self.eta_pos.push(pos);
        self.eta_pivot.push(alpha[pos]);
        for &i in nonzeros {
            if i != pos && alpha[i] != 0.0 {
                self.eta.index.push(i);
                self.eta.val.push(alpha[i]);
            }
        }
        self.eta.start.push(self.eta.index.len());
    }
}
