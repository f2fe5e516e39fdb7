//! Bounded primal simplex on `A x = b, l ≤ x ≤ u` with one artificial column
//! per row.
//!
//! Phase 1 minimizes the sum of bound violations of the basic variables
//! (composite costs of ±1, recomputed every iteration). Phase 2 keeps reduced
//! costs current through the pivot row and prices with Devex weights. The
//! ratio test is the two-pass Harris test; after a long run of degenerate
//! pivots the engine switches to Bland's rule until the objective moves again.

use crate::instance::LpInstance;
use crate::lu::{factorize, BasisFactor, SparseColumns};

const NONE: usize = usize::MAX;
const BLAND_AFTER: usize = 1000;
const DEVEX_RESET: f64 = 1e6;
const MAX_ETA_FACTOR: usize = 3;
/// Degenerate pivots in a row before bounds of basic variables are widened.
const PERTURB_AFTER: usize = 30;
/// Relative size of the widening.
const PERTURB_SCALE: f64 = 1e-6;
/// Perturbation rounds before falling back to Bland's rule alone.
const MAX_PERTURB_ROUNDS: usize = 5;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerances {
    pub feasibility: f64,
    pub optimality: f64,
    pub pivot: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub(crate) struct EngineResult {
    pub outcome: Outcome,
    /// Structural variable values.
    pub x: Vec<f64>,
    /// Row duals of the final basis (phase-1 duals when infeasible).
    pub y: Vec<f64>,
    pub iterations: usize,
    pub infeasible_rows: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic,
    Lower,
    Upper,
    Zero,
    Fixed,
}

enum Step {
    Flip,
    Pivot { r: usize, theta: f64, to_upper: bool },
    Unbounded,
}

struct Candidate {
    pos: usize,
    exact: f64,
    to_upper: bool,
}

struct Engine<'a> {
    lp: &'a LpInstance,
    m: usize,
    n: usize,
    row_start: Vec<usize>,
    row_col: Vec<usize>,
    row_val: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    state: Vec<State>,
    head: Vec<usize>,
    pos: Vec<usize>,
    factor: BasisFactor,
    d: Vec<f64>,
    weights: Vec<f64>,
    y: Vec<f64>,
    tol: Tolerances,
    refactor_interval: usize,
    iterations: usize,
    degenerate_run: usize,
    bland: bool,
    /// Original bounds while some are widened against degeneracy.
    saved_bounds: Option<(Vec<f64>, Vec<f64>)>,
    perturbed: Vec<bool>,
    perturb_rounds: usize,
    perturb_pending: bool,
    // Work arrays.
    alpha: Vec<f64>,
    alpha_nz: Vec<usize>,
    work_m: Vec<f64>,
    rho: Vec<f64>,
    alpha_row: Vec<f64>,
    row_touched: Vec<usize>,
    row_mark: Vec<bool>,
    candidates: Vec<Candidate>,
}

pub(crate) fn run(lp: &LpInstance, tol: Tolerances, max_iterations: usize, refactor_interval: usize) -> EngineResult {
    let mut engine = Engine::new(lp, tol, refactor_interval);
    let outcome = engine.solve(max_iterations);
    engine.finish(outcome)
}

impl<'a> Engine<'a> {
    fn new(lp: &'a LpInstance, tol: Tolerances, refactor_interval: usize) -> Self {
        let m = lp.n_rows();
        let n = lp.n_vars();
        let ntot = n + m;

        let mut row_count = vec![0usize; m + 1];
        for (i, _, _) in lp.triplets() {
            row_count[i + 1] += 1;
        }
        for i in 0..m {
            row_count[i + 1] += row_count[i];
        }
        let row_start = row_count.clone();
        let mut fill = row_count;
        let mut row_col = vec![0; lp.nnz()];
        let mut row_val = vec![0.0; lp.nnz()];
        for (i, j, v) in lp.triplets() {
            row_col[fill[i]] = j;
            row_val[fill[i]] = v;
            fill[i] += 1;
        }

        let mut lower = Vec::with_capacity(ntot);
        let mut upper = Vec::with_capacity(ntot);
        for b in lp.bounds() {
            lower.push(b.lower);
            upper.push(b.upper);
        }
        lower.extend(std::iter::repeat_n(0.0, m));
        upper.extend(std::iter::repeat_n(0.0, m));
        let mut cost = lp.objective().to_vec();
        cost.extend(std::iter::repeat_n(0.0, m));

        let mut x = vec![0.0; ntot];
        let mut state = vec![State::Fixed; ntot];
        for j in 0..n {
            let (l, u) = (lower[j], upper[j]);
            let (s, v) = if l == u {
                (State::Fixed, l)
            } else if l.is_finite() && (!u.is_finite() || l.abs() <= u.abs()) {
                (State::Lower, l)
            } else if u.is_finite() {
                (State::Upper, u)
            } else {
                (State::Zero, 0.0)
            };
            state[j] = s;
            x[j] = v;
        }

        let placeholder = factorize(&SparseColumns::with_capacity(0, 0)).expect("empty basis factors");
        let mut engine = Engine {
            lp,
            m,
            n,
            row_start,
            row_col,
            row_val,
            lower,
            upper,
            cost,
            x,
            state,
            head: Vec::new(),
            pos: vec![NONE; ntot],
            factor: BasisFactor::new(placeholder),
            d: vec![0.0; ntot],
            weights: vec![1.0; ntot],
            y: vec![0.0; m],
            tol,
            refactor_interval,
            iterations: 0,
            degenerate_run: 0,
            bland: false,
            saved_bounds: None,
            perturbed: vec![false; ntot],
            perturb_rounds: 0,
            perturb_pending: false,
            alpha: vec![0.0; m],
            alpha_nz: Vec::new(),
            work_m: vec![0.0; m],
            rho: vec![0.0; m],
            alpha_row: vec![0.0; ntot],
            row_touched: Vec::new(),
            row_mark: vec![false; ntot],
            candidates: Vec::new(),
        };
        engine.crash();
        engine.refactor();
        engine
    }

    /// Triangular crash: repeatedly pick a structural column with exactly one
    /// entry among the rows not yet covered. Remaining rows get artificials.
    fn crash(&mut self) {
        let (m, n) = (self.m, self.n);
        let mut covered = vec![false; m];
        let mut count = vec![0usize; n];
        let mut colmax = vec![0.0f64; n];
        for j in 0..n {
            if self.state[j] == State::Fixed {
                continue;
            }
            let (rows, vals) = self.lp.column(j);
            count[j] = rows.len();
            colmax[j] = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        }
        let priority = |l: f64, u: f64| -> usize {
            match (l.is_finite(), u.is_finite()) {
                (false, false) => 0,
                (true, false) | (false, true) => 1,
                _ => 2,
            }
        };
        let mut queues: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for j in (0..n).rev() {
            if count[j] == 1 {
                queues[priority(self.lower[j], self.upper[j])].push(j);
            }
        }
        let mut head = vec![NONE; m];
        let mut used = vec![false; n];
        loop {
            let Some(j) = queues.iter_mut().find_map(|q| q.pop()) else { break };
            if used[j] || count[j] != 1 {
                continue;
            }
            let (rows, vals) = self.lp.column(j);
            let Some(k) = rows.iter().position(|&i| !covered[i]) else { continue };
            let (r, v) = (rows[k], vals[k]);
            if v.abs() < 1e-3 * colmax[j] {
                continue;
            }
            used[j] = true;
            covered[r] = true;
            head[r] = j;
            for &jj in &self.row_col[self.row_start[r]..self.row_start[r + 1]] {
                if used[jj] || count[jj] == 0 {
                    continue;
                }
                count[jj] -= 1;
                if count[jj] == 1 {
                    queues[priority(self.lower[jj], self.upper[jj])].push(jj);
                }
            }
        }
        self.head = (0..m).map(|i| if head[i] == NONE { n + i } else { head[i] }).collect();
        for (p, &v) in self.head.iter().enumerate() {
            self.pos[v] = p;
            self.state[v] = State::Basic;
        }
    }

    fn basis_columns(&self) -> SparseColumns {
        let mut cols = SparseColumns::with_capacity(self.m, self.m * 3);
        for &v in &self.head {
            if v < self.n {
                let (r, a) = self.lp.column(v);
                cols.push(r, a);
            } else {
                cols.push_unit(v - self.n);
            }
        }
        cols
    }

    fn make_nonbasic(&mut self, v: usize) {
        self.pos[v] = NONE;
        let (l, u) = (self.lower[v], self.upper[v]);
        let x = self.x[v];
        let (s, val) = if l == u {
            (State::Fixed, l)
        } else if l.is_finite() && (!u.is_finite() || (x - l).abs() <= (u - x).abs()) {
            (State::Lower, l)
        } else if u.is_finite() {
            (State::Upper, u)
        } else {
            (State::Zero, 0.0)
        };
        self.state[v] = s;
        self.x[v] = val;
    }

    /// Refactorizes the basis, replacing dependent columns by artificials, and
    /// recomputes the basic values from the nonbasic ones.
    fn refactor(&mut self) {
        let lu = loop {
            match factorize(&self.basis_columns()) {
                Ok(lu) => break lu,
                Err(singular) => {
                    for &p in &singular.positions {
                        let v = self.head[p];
                        self.make_nonbasic(v);
                    }
                    for (&p, &i) in singular.positions.iter().zip(&singular.rows) {
                        let art = self.n + i;
                        self.head[p] = art;
                        self.pos[art] = p;
                        self.state[art] = State::Basic;
                    }
                }
            }
        };
        self.factor = BasisFactor::new(lu);
        self.compute_primal();
    }

    fn compute_primal(&mut self) {
        let mut rhs = self.lp.rhs().to_vec();
        for j in 0..self.n {
            if self.state[j] != State::Basic && self.x[j] != 0.0 {
                let (rows, vals) = self.lp.column(j);
                for (&i, &a) in rows.iter().zip(vals) {
                    rhs[i] -= a * self.x[j];
                }
            }
        }
        let mut xb = vec![0.0; self.m];
        self.factor.ftran(&mut rhs, &mut xb);
        for (p, &v) in self.head.iter().enumerate() {
            self.x[v] = xb[p];
        }
    }

    fn violation(&self, v: usize) -> f64 {
        let x = self.x[v];
        if x < self.lower[v] {
            self.lower[v] - x
        } else if x > self.upper[v] {
            x - self.upper[v]
        } else {
            0.0
        }
    }

    fn primal_infeasible(&self) -> bool {
        self.head.iter().any(|&v| self.violation(v) > self.tol.feasibility)
    }

    /// Phase-1 cost of a basic variable: the gradient of its bound violation.
    fn phase1_cost(&self, v: usize) -> f64 {
        let x = self.x[v];
        if x < self.lower[v] - self.tol.feasibility {
            -1.0
        } else if x > self.upper[v] + self.tol.feasibility {
            1.0
        } else {
            0.0
        }
    }

    /// Recomputes `y` and every nonbasic reduced cost for the given phase.
    fn compute_duals(&mut self, phase1: bool) {
        let mut cb: Vec<f64> = self
            .head
            .iter()
            .map(|&v| if phase1 { self.phase1_cost(v) } else { self.cost[v] })
            .collect();
        let mut y = vec![0.0; self.m];
        self.factor.btran(&mut cb, &mut y);
        self.y = y;
        for j in 0..self.n {
            if matches!(self.state[j], State::Basic | State::Fixed) {
                self.d[j] = 0.0;
                continue;
            }
            let (rows, vals) = self.lp.column(j);
            let mut dj = if phase1 { 0.0 } else { self.cost[j] };
            for (&i, &a) in rows.iter().zip(vals) {
                dj -= a * self.y[i];
            }
            self.d[j] = dj;
        }
        for v in self.n..self.n + self.m {
            self.d[v] = 0.0;
        }
    }

    fn choose_entering(&self) -> Option<(usize, f64)> {
        let tol = self.tol.optimality;
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.n {
            let dj = self.d[j];
            let dir = match self.state[j] {
                State::Lower if dj < -tol => 1.0,
                State::Upper if dj > tol => -1.0,
                State::Zero if dj.abs() > tol => -dj.signum(),
                _ => continue,
            };
            if self.bland {
                return Some((j, dir));
            }
            let score = dj * dj / self.weights[j];
            if best.is_none_or(|(_, _, s)| score > s) {
                best = Some((j, dir, score));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    fn load_column(&mut self, q: usize) {
        let mut rhs = std::mem::take(&mut self.work_m);
        rhs.iter_mut().for_each(|v| *v = 0.0);
        if q < self.n {
            let (rows, vals) = self.lp.column(q);
            for (&i, &a) in rows.iter().zip(vals) {
                rhs[i] = a;
            }
        } else {
            rhs[q - self.n] = 1.0;
        }
        let mut alpha = std::mem::take(&mut self.alpha);
        self.factor.ftran(&mut rhs, &mut alpha);
        self.alpha_nz.clear();
        for (p, &a) in alpha.iter().enumerate() {
            if a != 0.0 {
                self.alpha_nz.push(p);
            }
        }
        self.alpha = alpha;
        self.work_m = rhs;
    }

    fn ratio_test(&mut self, q: usize, dir: f64, phase1: bool) -> Step {
        let feas = self.tol.feasibility;
        let mut theta_max = f64::INFINITY;
        self.candidates.clear();
        for &p in &self.alpha_nz {
            let a = self.alpha[p];
            if a.abs() < self.tol.pivot {
                continue;
            }
            let rate = -dir * a;
            let v = self.head[p];
            let (x, l, u) = (self.x[v], self.lower[v], self.upper[v]);
            let (exact, relaxed, to_upper) = if phase1 && x < l - feas {
                if rate <= 0.0 {
                    continue;
                }
                ((l - x) / rate, (l - x + feas) / rate, false)
            } else if phase1 && x > u + feas {
                if rate >= 0.0 {
                    continue;
                }
                ((x - u) / -rate, (x - u + feas) / -rate, true)
            } else if rate < 0.0 {
                if !l.is_finite() {
                    continue;
                }
                ((x - l) / -rate, (x - l + feas) / -rate, false)
            } else {
                if !u.is_finite() {
                    continue;
                }
                ((u - x) / rate, (u - x + feas) / rate, true)
            };
            theta_max = theta_max.min(relaxed);
            self.candidates.push(Candidate { pos: p, exact, to_upper });
        }

        let span = self.upper[q] - self.lower[q];
        if self.bland {
            let min_exact = self.candidates.iter().fold(f64::INFINITY, |t, c| t.min(c.exact.max(0.0)));
            if span.is_finite() && span <= min_exact {
                return Step::Flip;
            }
            let chosen = self
                .candidates
                .iter()
                .filter(|c| c.exact.max(0.0) <= min_exact + 1e-12)
                .min_by_key(|c| self.head[c.pos]);
            return match chosen {
                Some(c) => Step::Pivot { r: c.pos, theta: c.exact.max(0.0), to_upper: c.to_upper },
                None => Step::Unbounded,
            };
        }

        if span.is_finite() && span <= theta_max {
            return Step::Flip;
        }
        let mut best: Option<&Candidate> = None;
        for c in &self.candidates {
            if c.exact <= theta_max && best.is_none_or(|b| self.alpha[c.pos].abs() > self.alpha[b.pos].abs()) {
                best = Some(c);
            }
        }
        match best {
            Some(c) => Step::Pivot { r: c.pos, theta: c.exact.max(0.0), to_upper: c.to_upper },
            None => Step::Unbounded,
        }
    }

    /// Row `r` of `B⁻¹ N` over nonbasic structurals, left in `alpha_row`
    /// with the touched columns in `row_touched`.
    fn pivot_row(&mut self, r: usize) {
        for &j in &self.row_touched {
            self.alpha_row[j] = 0.0;
            self.row_mark[j] = false;
        }
        self.row_touched.clear();
        let mut e = std::mem::take(&mut self.work_m);
        e.iter_mut().for_each(|v| *v = 0.0);
        e[r] = 1.0;
        let mut rho = std::mem::take(&mut self.rho);
        self.factor.btran(&mut e, &mut rho);
        for (i, &ri) in rho.iter().enumerate() {
            if ri == 0.0 {
                continue;
            }
            for k in self.row_start[i]..self.row_start[i + 1] {
                let j = self.row_col[k];
                if matches!(self.state[j], State::Basic | State::Fixed) {
                    continue;
                }
                if !self.row_mark[j] {
                    self.row_mark[j] = true;
                    self.row_touched.push(j);
                }
                self.alpha_row[j] += ri * self.row_val[k];
            }
        }
        self.rho = rho;
        self.work_m = e;
    }

    /// Widens the finite bounds of basic variables that are not yet
    /// perturbed. Values do not move, so feasibility is preserved while
    /// degenerate basics move off their bounds.
    fn perturb(&mut self) {
        if self.saved_bounds.is_none() {
            self.saved_bounds = Some((self.lower.clone(), self.upper.clone()));
            self.perturb_rounds += 1;
        }
        for &v in &self.head {
            if self.perturbed[v] || self.lower[v] == self.upper[v] {
                continue;
            }
            self.perturbed[v] = true;
            // Deterministic spread in [0.5, 1) so ties between rows break.
            let spread = 0.5 + 0.5 * ((v as f64 + 1.0) * 0.618_033_988_749_894_9).fract();
            if self.lower[v].is_finite() {
                self.lower[v] -= PERTURB_SCALE * spread * (1.0 + self.lower[v].abs());
            }
            if self.upper[v].is_finite() {
                self.upper[v] += PERTURB_SCALE * spread * (1.0 + self.upper[v].abs());
            }
        }
    }

    /// Restores the original bounds, moves nonbasic variables back onto
    /// them and recomputes the basic values. Returns whether anything moved.
    fn unperturb(&mut self) -> bool {
        let Some((lower, upper)) = self.saved_bounds.take() else { return false };
        self.lower = lower;
        self.upper = upper;
        self.perturbed.iter_mut().for_each(|p| *p = false);
        for v in 0..self.n + self.m {
            match self.state[v] {
                State::Lower | State::Fixed => self.x[v] = self.lower[v],
                State::Upper => self.x[v] = self.upper[v],
                _ => {}
            }
        }
        self.refactor();
        true
    }

    fn solve(&mut self, max_iterations: usize) -> Outcome {
        let mut phase1 = self.primal_infeasible();
        self.compute_duals(phase1);
        let mut fresh = true;
        loop {
            if self.iterations >= max_iterations {
                return Outcome::IterationLimit;
            }
            if self.factor.num_updates() >= self.refactor_interval
                || self.factor.eta_nnz() > MAX_ETA_FACTOR * (self.factor.lu_nnz() + self.m)
            {
                self.refactor();
                let now_phase1 = self.primal_infeasible();
                if now_phase1 != phase1 {
                    self.weights.iter_mut().for_each(|w| *w = 1.0);
                }
                phase1 = now_phase1;
                self.compute_duals(phase1);
                fresh = true;
            }

            if phase1 {
                if !self.primal_infeasible() {
                    phase1 = false;
                    self.weights.iter_mut().for_each(|w| *w = 1.0);
                    self.compute_duals(false);
                    continue;
                }
                self.compute_duals(true);
            }

            let Some((q, dir)) = self.choose_entering() else {
                if self.unperturb() {
                    phase1 = self.primal_infeasible();
                    self.weights.iter_mut().for_each(|w| *w = 1.0);
                    self.compute_duals(phase1);
                    self.degenerate_run = 0;
                    self.bland = false;
                    fresh = true;
                    continue;
                }
                if !fresh {
                    self.refactor();
                    phase1 = self.primal_infeasible();
                    self.compute_duals(phase1);
                    fresh = true;
                    continue;
                }
                return if phase1 { Outcome::Infeasible } else { Outcome::Optimal };
            };

            self.load_column(q);
            let step = self.ratio_test(q, dir, phase1);
            self.iterations += 1;
            match step {
                Step::Unbounded => {
                    if phase1 || !fresh {
                        // Phase 1 cannot be unbounded; treat as numerical drift.
                        self.refactor();
                        phase1 = self.primal_infeasible();
                        self.compute_duals(phase1);
                        if fresh && phase1 {
                            return Outcome::Infeasible;
                        }
                        fresh = true;
                        continue;
                    }
                    return Outcome::Unbounded;
                }
                Step::Flip => {
                    let theta = self.upper[q] - self.lower[q];
                    self.apply_step(q, dir, theta);
                    self.state[q] = if dir > 0.0 { State::Upper } else { State::Lower };
                    self.x[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
                    self.degenerate_run = 0;
                    self.bland = false;
                }
                Step::Pivot { r, theta, to_upper } => {
                    if theta <= 1e-12 {
                        self.degenerate_run += 1;
                        if self.degenerate_run >= PERTURB_AFTER && self.perturb_rounds < MAX_PERTURB_ROUNDS {
                            self.perturb_pending = true;
                        }
                        if self.degenerate_run >= BLAND_AFTER {
                            self.bland = true;
                        }
                    } else {
                        self.degenerate_run = 0;
                        self.bland = false;
                    }
                    if !phase1 {
                        self.pivot_row(r);
                    }
                    self.apply_step(q, dir, theta);
                    let leaving = self.head[r];
                    self.x[leaving] = if to_upper { self.upper[leaving] } else { self.lower[leaving] };
                    self.state[leaving] = if self.lower[leaving] == self.upper[leaving] {
                        State::Fixed
                    } else if to_upper {
                        State::Upper
                    } else {
                        State::Lower
                    };
                    self.pos[leaving] = NONE;
                    let arq = self.alpha[r];
                    if !phase1 {
                        self.update_duals(q, leaving, arq);
                    }
                    self.factor.update(r, &self.alpha, &self.alpha_nz);
                    self.head[r] = q;
                    self.pos[q] = r;
                    self.state[q] = State::Basic;
                    fresh = false;
                    if self.perturb_pending {
                        self.perturb_pending = false;
                        self.perturb();
                        self.degenerate_run = 0;
                    }
                }
            }
        }
    }

    fn apply_step(&mut self, q: usize, dir: f64, theta: f64) {
        if theta == 0.0 {
            return;
        }
        for &p in &self.alpha_nz {
            let v = self.head[p];
            self.x[v] -= dir * theta * self.alpha[p];
        }
        self.x[q] += dir * theta;
    }

    fn update_duals(&mut self, q: usize, leaving: usize, arq: f64) {
        let theta_d = self.d[q] / arq;
        let wq = self.weights[q];
        let mut reset = false;
        for &j in &self.row_touched {
            if j == q {
                continue;
            }
            let a = self.alpha_row[j];
            self.d[j] -= theta_d * a;
            let ratio = a / arq;
            let w = (ratio * ratio * wq).max(self.weights[j]);
            self.weights[j] = w;
            reset |= w > DEVEX_RESET;
        }
        self.d[q] = 0.0;
        if leaving < self.n {
            self.d[leaving] = -theta_d;
            self.weights[leaving] = (wq / (arq * arq)).max(1.0);
        }
        if reset {
            self.weights.iter_mut().for_each(|w| *w = 1.0);
        }
    }

    fn finish(mut self, outcome: Outcome) -> EngineResult {
        self.unperturb();
        let mut infeasible_rows = Vec::new();
        match outcome {
            Outcome::Optimal => self.compute_duals(false),
            Outcome::Infeasible => {
                self.compute_duals(true);
                let scale = self.y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                infeasible_rows =
                    (0..self.m).filter(|&i| self.y[i].abs() > 1e-9 * scale.max(1.0)).collect();
            }
            _ => {}
        }
        for j in 0..self.n {
            if self.state[j] != State::Basic {
                continue;
            }
            // Basic values within tolerance of a bound are reported on it.
            let (l, u) = (self.lower[j], self.upper[j]);
            if outcome == Outcome::Optimal {
                self.x[j] = self.x[j].clamp(l, u);
            }
        }
        EngineResult {
            outcome,
            x: self.x[..self.n].to_vec(),
            y: self.y,
            iterations: self.iterations,
            infeasible_rows,
        }
    }
}
