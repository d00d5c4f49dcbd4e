//! Exact linear programming over rationals, sized for the brute-force
//! oracles: a two-phase simplex with Bland's pivoting rule, plus a
//! branch-and-bound wrapper for integer feasibility. Everything is
//! deterministic; nothing here ever rounds.

use alloc::vec;
use alloc::vec::Vec;

use crate::rational::Rational;
use num_traits::{One, Signed, Zero};

/// Relation of a constraint row to its right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Rel {
    Eq,
    Le,
}

/// One constraint over the structural variables, which are all
/// implicitly nonnegative.
#[derive(Debug, Clone)]
pub(crate) struct Row {
    pub coeffs: Vec<Rational>,
    pub rel: Rel,
    pub rhs: Rational,
}

impl Row {
    pub fn le(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Row { coeffs, rel: Rel::Le, rhs }
    }

    pub fn eq(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Row { coeffs, rel: Rel::Eq, rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Rational, point: Vec<Rational> },
}

/// Minimizes `objective . x` subject to `rows` and `x >= 0`.
pub(crate) fn solve_lp(n: usize, rows: &[Row], objective: &[Rational]) -> LpOutcome {
    debug_assert_eq!(objective.len(), n);
    debug_assert!(rows.iter().all(|r| r.coeffs.len() == n));

    let m = rows.len();
    let slacks = rows.iter().filter(|r| r.rel == Rel::Le).count();

    // Equality form, sign-normalized so every right-hand side is
    // nonnegative. An inequality whose slack survives normalization
    // starts basic on its own; the other rows get artificials.
    let needs_art: Vec<bool> = rows
        .iter()
        .map(|r| r.rel == Rel::Eq || r.rhs.is_negative())
        .collect();
    let arts = needs_art.iter().filter(|&&x| x).count();
    let art_start = n + slacks;
    let cols = art_start + arts;

    let mut a = vec![vec![Rational::zero(); cols]; m];
    let mut b = vec![Rational::zero(); m];
    let mut basis = vec![0usize; m];
    let mut slack_at = n;
    let mut art_at = art_start;
    for (i, row) in rows.iter().enumerate() {
        let negate = row.rhs.is_negative();
        for (j, c) in row.coeffs.iter().enumerate() {
            a[i][j] = if negate { -c } else { c.clone() };
        }
        if row.rel == Rel::Le {
            a[i][slack_at] = if negate { -Rational::one() } else { Rational::one() };
            basis[i] = slack_at;
            slack_at += 1;
        }
        b[i] = if negate { -&row.rhs } else { row.rhs.clone() };
        if needs_art[i] {
            a[i][art_at] = Rational::one();
            basis[i] = art_at;
            art_at += 1;
        }
    }

    // Phase 1: minimize the artificial total, skipped when the slack
    // basis is already feasible. Reduced cost of column j under the
    // starting basis: [j artificial] - sum over artificial rows of a[i][j].
    let mut cost = vec![Rational::zero(); cols];
    if arts > 0 {
        for (j, c) in cost.iter_mut().enumerate() {
            if j >= art_start {
                *c = Rational::one();
            }
            for (i, row) in a.iter().enumerate() {
                if basis[i] >= art_start {
                    *c -= &row[j];
                }
            }
        }
        if pivot_to_optimum(&mut a, &mut b, &mut basis, &mut cost, cols) == Stop::Unbounded {
            unreachable!("a sum of nonnegative variables is bounded below");
        }
        let leftover: Rational = basis
            .iter()
            .zip(b.iter())
            .filter(|(&j, _)| j >= art_start)
            .map(|(_, v)| v.clone())
            .sum();
        if !leftover.is_zero() {
            return LpOutcome::Infeasible;
        }
    }

    // Pivot zero-level artificials out of the basis; rows offering no
    // pivot are redundant and dropped.
    let mut keep = Vec::with_capacity(m);
    for i in 0..m {
        if basis[i] < art_start {
            keep.push(i);
            continue;
        }
        let enter = (0..art_start).find(|&j| !a[i][j].is_zero());
        match enter {
            Some(j) => {
                pivot(&mut a, &mut b, &mut basis, &mut cost, i, j);
                keep.push(i);
            }
            None => {}
        }
    }
    let a: Vec<Vec<Rational>> = keep.iter().map(|&i| a[i].clone()).collect();
    let b: Vec<Rational> = keep.iter().map(|&i| b[i].clone()).collect();
    let basis: Vec<usize> = keep.iter().map(|&i| basis[i]).collect();
    let mut a = a;
    let mut b = b;
    let mut basis = basis;

    // Phase 2: real objective, artificial columns retired. Reduced
    // costs are c_j - c_B . B^-1 A_j, recomputed from the tableau.
    let mut cost = vec![Rational::zero(); cols];
    for j in 0..art_start {
        let mut r = if j < n { objective[j].clone() } else { Rational::zero() };
        for (i, &bj) in basis.iter().enumerate() {
            if bj < n {
                r -= &objective[bj] * &a[i][j];
            }
        }
        cost[j] = r;
    }
    if pivot_to_optimum(&mut a, &mut b, &mut basis, &mut cost, art_start) == Stop::Unbounded {
        return LpOutcome::Unbounded;
    }

    let mut point = vec![Rational::zero(); n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            point[j] = b[i].clone();
        }
    }
    let value = objective
        .iter()
        .zip(point.iter())
        .map(|(c, x)| c * x)
        .sum();
    LpOutcome::Optimal { value, point }
}

#[derive(PartialEq, Eq)]
enum Stop {
    Optimal,
    Unbounded,
}

/// Primal simplex loop under Bland's rule: entering column is the
/// lowest index with a negative reduced cost, leaving row breaks ratio
/// ties by the lowest basis index. Bland's rule rules out cycling.
fn pivot_to_optimum(
    a: &mut [Vec<Rational>],
    b: &mut [Rational],
    basis: &mut [usize],
    cost: &mut [Rational],
    enterable: usize,
) -> Stop {
    loop {
        let Some(enter) = (0..enterable).find(|&j| cost[j].is_negative()) else {
            return Stop::Optimal;
        };
        let mut leave: Option<usize> = None;
        for i in 0..a.len() {
            if !a[i][enter].is_positive() {
                continue;
            }
            let better = match leave {
                None => true,
                Some(l) => {
                    let cur = &b[l] / &a[l][enter];
                    let cand = &b[i] / &a[i][enter];
                    cand < cur || (cand == cur && basis[i] < basis[l])
                }
            };
            if better {
                leave = Some(i);
            }
        }
        let Some(leave) = leave else {
            return Stop::Unbounded;
        };
        pivot(a, b, basis, cost, leave, enter);
    }
}

fn pivot(
    a: &mut [Vec<Rational>],
    b: &mut [Rational],
    basis: &mut [usize],
    cost: &mut [Rational],
    row: usize,
    col: usize,
) {
    let div = a[row][col].clone();
    for x in a[row].iter_mut() {
        *x /= &div;
    }
    b[row] /= &div;
    for i in 0..a.len() {
        if i == row {
            continue;
        }
        let factor = a[i][col].clone();
        if factor.is_zero() {
            continue;
        }
        for j in 0..a[i].len() {
            let delta = &a[row][j] * &factor;
            a[i][j] -= delta;
        }
        let delta = &b[row] * &factor;
        b[i] -= delta;
    }
    let factor = cost[col].clone();
    if !factor.is_zero() {
        for j in 0..cost.len() {
            let delta = &a[row][j] * &factor;
            cost[j] -= delta;
        }
    }
    basis[row] = col;
}

/// Remaining exploration allowance shared across one oracle call.
#[derive(Debug, Clone, Copy)]
pub(crate) struct NodeBudget {
    pub remaining: u64,
}

impl NodeBudget {
    pub fn charge(&mut self) -> Result<(), BudgetExceeded> {
        if self.remaining == 0 {
            return Err(BudgetExceeded);
        }
        self.remaining -= 1;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct BudgetExceeded;

/// Searches for a nonnegative integer point satisfying `rows` by
/// branch and bound on the LP relaxation, splitting on the lowest
/// fractional coordinate. Deterministic; the floor branch is explored
/// first.
pub(crate) fn integral_feasible(
    n: usize,
    rows: &[Row],
    budget: &mut NodeBudget,
) -> Result<Option<Vec<Rational>>, BudgetExceeded> {
    let zero_obj = vec![Rational::zero(); n];
    let mut stack: Vec<Vec<Row>> = vec![rows.to_vec()];
    while let Some(node) = stack.pop() {
        budget.charge()?;
        let point = match solve_lp(n, &node, &zero_obj) {
            LpOutcome::Infeasible => continue,
            LpOutcome::Unbounded => unreachable!("constant objective"),
            LpOutcome::Optimal { point, .. } => point,
        };
        let frac = (0..n).find(|&j| !point[j].is_integer());
        let Some(j) = frac else {
            return Ok(Some(point));
        };
        let floor = point[j].floor();
        let mut unit = vec![Rational::zero(); n];
        unit[j] = Rational::one();
        let mut up = node.clone();
        let mut neg = unit.clone();
        for x in neg.iter_mut() {
            *x = -&*x;
        }
        up.push(Row::le(neg, -(&floor + Rational::one())));
        stack.push(up);
        let mut down = node;
        down.push(Row::le(unit, floor));
        stack.push(down);
    }
    Ok(None)
}
