//! Exact rational linear programming over systems in standard form
//! `A x = b, x >= 0`.
//!
//! Dense tableau simplex with Bland's rule, so every pivot is exact and
//! termination is guaranteed. Phase one either produces a feasible point
//! or a Farkas certificate `y` with `y^T A <= 0` componentwise and
//! `y^T b > 0`; the certificate is re-verified before being returned.

use num::{Signed, Zero};

use crate::rat::Rat;

#[derive(Debug, Clone)]
pub enum Feasibility {
    /// A point `x >= 0` with `A x = b`.
    Feasible(Vec<Rat>),
    /// Farkas certificate: `y^T A <= 0` for every column, `y^T b > 0`.
    Infeasible(Vec<Rat>),
}

#[derive(Debug, Clone)]
pub struct Optimum {
    pub value: Rat,
    pub x: Vec<Rat>,
}

#[derive(Debug, thiserror::Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible(Vec<Rat>),
    #[error("linear program is unbounded")]
    Unbounded,
}

struct Tableau {
    ncols: usize,
    rows: Vec<Vec<Rat>>, // each row: ncols coefficients + rhs appended
    obj: Vec<Rat>,       // reduced costs (minimization), length ncols
    objval: Rat,         // current objective value
    basis: Vec<usize>,   // basic column per row
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rat {
        &self.rows[r][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        debug_assert!(!piv.is_zero());
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = &*v / &piv;
            }
        }
        let pivot_row = self.rows[r].clone();
        // tableaux here are mostly zeros, so only touch the support
        let support: Vec<usize> = (0..=self.ncols)
            .filter(|&j| !pivot_row[j].is_zero())
            .collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for &j in &support {
                row[j] = &row[j] - &factor * &pivot_row[j];
            }
        }
        if !self.obj[c].is_zero() {
            let factor = self.obj[c].clone();
            for &j in &support {
                if j < self.ncols {
                    self.obj[j] = &self.obj[j] - &factor * &pivot_row[j];
                }
            }
            self.objval = &self.objval + &factor * &pivot_row[self.ncols];
        }
        self.basis[r] = c;
    }

    /// Minimizes until no negative reduced cost remains. Returns false on
    /// unboundedness. Enters on the most negative reduced cost, falling
    /// back to Bland's rule after a pivot budget so degenerate ties cannot
    /// cycle forever.
    fn run(&mut self, allowed: &dyn Fn(usize) -> bool) -> bool {
        let budget = 100 + 10 * (self.rows.len() + self.ncols);
        let mut pivots = 0usize;
        loop {
            pivots += 1;
            let entering = if pivots > budget {
                (0..self.ncols).find(|&j| allowed(j) && self.obj[j].is_negative())
            } else {
                (0..self.ncols)
                    .filter(|&j| allowed(j) && self.obj[j].is_negative())
                    .min_by(|&a, &b| self.obj[a].cmp(&self.obj[b]))
            };
            let c = match entering {
                Some(c) => c,
                None => return true,
            };
            let mut leave: Option<usize> = None;
            let mut best: Option<Rat> = None;
            for r in 0..self.rows.len() {
                if !self.rows[r][c].is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / &self.rows[r][c];
                let better = match &best {
                    None => true,
                    Some(b) => {
                        ratio < *b || (ratio == *b && self.basis[r] < self.basis[leave.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    leave = Some(r);
                }
            }
            match leave {
                Some(r) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    fn solution(&self, nvars: usize) -> Vec<Rat> {
        let mut x = vec![Rat::zero(); nvars];
        for (r, &bc) in self.basis.iter().enumerate() {
            if bc < nvars {
                x[bc] = self.rhs(r).clone();
            }
        }
        x
    }
}

/// Phase one over `A x = b, x >= 0`. `flip` records which rows were negated
/// to make the right-hand side nonnegative.
fn phase_one(a: &[Vec<Rat>], b: &[Rat]) -> Result<Tableau, Vec<Rat>> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let ncols = n + m;
    let mut flip = vec![false; m];
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let neg = b[i].is_negative();
        flip[i] = neg;
        let mut row: Vec<Rat> = a[i]
            .iter()
            .map(|v| if neg { -v.clone() } else { v.clone() })
            .collect();
        row.extend((0..m).map(|j| {
            if j == i {
                Rat::from_integer(1.into())
            } else {
                Rat::zero()
            }
        }));
        row.push(if neg { -b[i].clone() } else { b[i].clone() });
        rows.push(row);
    }
    // reduced costs for min(sum of artificials) with artificials basic
    let mut obj = vec![Rat::zero(); ncols];
    let mut objval = Rat::zero();
    for j in 0..n {
        let mut s = Rat::zero();
        for row in &rows {
            s += &row[j];
        }
        obj[j] = -s;
    }
    for row in &rows {
        objval += &row[ncols];
    }
    let mut t = Tableau {
        ncols,
        rows,
        obj,
        objval,
        basis: (n..n + m).collect(),
    };
    let finished = t.run(&|_| true);
    debug_assert!(finished, "phase one is always bounded below by zero");
    if !t.objval.is_zero() {
        // Farkas: y_i = 1 - reduced cost of artificial i, undoing row flips.
        let mut y: Vec<Rat> = (0..m)
            .map(|i| Rat::from_integer(1.into()) - &t.obj[n + i])
            .collect();
        for i in 0..m {
            if flip[i] {
                y[i] = -y[i].clone();
            }
        }
        verify_farkas(a, b, &y);
        return Err(y);
    }
    // Drive artificials out of the basis; drop rows that are redundant.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            if let Some(c) = (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                t.pivot(r, c);
            } else {
                t.rows.remove(r);
                t.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }
    Ok(t)
}

fn verify_farkas(a: &[Vec<Rat>], b: &[Rat], y: &[Rat]) {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    for j in 0..n {
        let mut dot = Rat::zero();
        for i in 0..m {
            dot += &y[i] * &a[i][j];
        }
        assert!(!dot.is_positive(), "farkas certificate fails on column {j}");
    }
    let mut yb = Rat::zero();
    for i in 0..m {
        yb += &y[i] * &b[i];
    }
    assert!(yb.is_positive(), "farkas certificate fails on rhs");
}

/// Decides feasibility of `A x = b, x >= 0` exactly.
pub fn feasible_point(a: &[Vec<Rat>], b: &[Rat]) -> Feasibility {
    let n = if a.is_empty() { 0 } else { a[0].len() };
    match phase_one(a, b) {
        Ok(t) => Feasibility::Feasible(t.solution(n)),
        Err(y) => Feasibility::Infeasible(y),
    }
}

/// Maximizes `c . x` subject to `A x = b, x >= 0`.
pub fn maximize(c: &[Rat], a: &[Vec<Rat>], b: &[Rat]) -> Result<Optimum, LpError> {
    let n = if a.is_empty() { 0 } else { a[0].len() };
    let mut t = phase_one(a, b).map_err(LpError::Infeasible)?;
    // Phase two minimizes -c over the x columns only. Artificial columns
    // stay blocked; any artificial still basic is pinned at zero.
    let nc = t.ncols;
    let mut obj = vec![Rat::zero(); nc];
    for j in 0..n {
        obj[j] = -c[j].clone();
    }
    let mut objval = Rat::zero();
    // reduce against current basis
    for (r, &bc) in t.basis.iter().enumerate() {
        if !obj[bc].is_zero() {
            let factor = obj[bc].clone();
            let row = t.rows[r].clone();
            for (v, p) in obj.iter_mut().zip(row.iter()) {
                *v = &*v - &factor * p;
            }
            objval = &objval + &factor * &row[nc];
        }
    }
    t.obj = obj;
    t.objval = objval;
    if !t.run(&|j| j < n) {
        return Err(LpError::Unbounded);
    }
    Ok(Optimum {
        value: -t.objval.clone(),
        x: t.solution(n),
    })
}
