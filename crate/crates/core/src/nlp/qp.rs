//! Dense convex QP:
//!
//! ```text
//! min ½ xᵀHx + gᵀx   s.t.  A x = b,  lower ≤ x ≤ upper,  cl ≤ C x ≤ cu
//! ```
//!
//! Equalities are eliminated by variable reduction (column-pivoted QR of `A`
//! picks a basic set), and the remaining inequality problem is solved with
//! the Goldfarb-Idnani dual active-set method.

use nalgebra::{Cholesky, DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QpError {
    #[error("infeasible QP: {0}")]
    Infeasible(String),
    #[error("reduced Hessian is not positive definite")]
    NotConvex,
    #[error("active-set iteration limit reached")]
    IterationLimit,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Linear constraints `lower ≤ C x ≤ upper` (entries may be infinite).
#[derive(Debug, Clone)]
pub struct LinearInequalities {
    pub matrix: DMatrix<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct QpProblem<'a> {
    pub hessian: &'a DMatrix<f64>,
    pub gradient: &'a DVector<f64>,
    pub equality: Option<(&'a DMatrix<f64>, &'a DVector<f64>)>,
    pub lower: &'a [f64],
    pub upper: &'a [f64],
    pub inequality: Option<&'a LinearInequalities>,
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub x: DVector<f64>,
    /// Multipliers `λ` of `A x = b` with `H x + g = Aᵀλ + (inequality terms)`.
    pub equality_multipliers: DVector<f64>,
    pub active_set_iterations: usize,
}

const RANK_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-10;

/// One-sided constraint `aᵀw ≥ bound` in reduced coordinates, remembering
/// where it came from in the full problem.
struct Row {
    a: DVector<f64>,
    bound: f64,
    source: Source,
    sign: f64,
}

#[derive(Clone, Copy)]
enum Source {
    Bound(usize),
    General(usize),
}

pub fn solve_qp(p: &QpProblem) -> Result<QpSolution, QpError> {
    let n = p.gradient.len();
    if p.hessian.nrows() != n || p.hessian.ncols() != n || p.lower.len() != n || p.upper.len() != n {
        return Err(QpError::Dimension(format!("{n} variables")));
    }
    for i in 0..n {
        if p.lower[i] > p.upper[i] + FEAS_TOL {
            return Err(QpError::Infeasible(format!("bound {i}: {} > {}", p.lower[i], p.upper[i])));
        }
    }

    let reduction = match p.equality {
        Some((a, b)) if a.nrows() > 0 => Reduction::new(a, b)?,
        _ => Reduction::identity(n),
    };
    let z = &reduction.null_basis;
    let xp = &reduction.particular;
    let nw = z.ncols();

    let hz = p.hessian * z;
    let gram = z.transpose() * &hz;
    let lin = z.transpose() * (p.gradient + p.hessian * xp);

    let mut rows = Vec::new();
    let mut push = |a: DVector<f64>, lo: f64, hi: f64, offset: f64, source: Source| -> Result<(), QpError> {
        let norm = a.amax();
        for (sign, lim) in [(1.0, lo), (-1.0, hi)] {
            if !lim.is_finite() {
                continue;
            }
            let bound = sign * (lim - offset);
            if norm < RANK_TOL {
                if bound > FEAS_TOL * (1.0 + lim.abs()) {
                    return Err(QpError::Infeasible("a constraint fixed by the equalities is violated".into()));
                }
                continue;
            }
            rows.push(Row { a: &a * sign, bound, source, sign });
        }
        Ok(())
    };
    for i in 0..n {
        if p.lower[i].is_finite() || p.upper[i].is_finite() {
            push(z.row(i).transpose(), p.lower[i], p.upper[i], xp[i], Source::Bound(i))?;
        }
    }
    if let Some(ineq) = p.inequality {
        if ineq.matrix.ncols() != n {
            return Err(QpError::Dimension("inequality matrix".into()));
        }
        let cz = &ineq.matrix * z;
        let cxp = &ineq.matrix * xp;
        for j in 0..ineq.matrix.nrows() {
            push(cz.row(j).transpose(), ineq.lower[j], ineq.upper[j], cxp[j], Source::General(j))?;
        }
    }

    let (w, active, mult, iterations) = if nw == 0 {
        for r in &rows {
            if r.bound > FEAS_TOL {
                return Err(QpError::Infeasible("equality solution violates a bound".into()));
            }
        }
        (DVector::zeros(0), vec![], vec![], 0)
    } else {
        goldfarb_idnani(&gram, &lin, &rows)?
    };

    let mut x = xp + z * &w;
    for i in 0..n {
        x[i] = x[i].clamp(p.lower[i], p.upper[i]);
    }

    // H x + g − Σ u a_full = Aᵀλ, solved through the basic block
    let mut resid = p.hessian * &x + p.gradient;
    for (k, &j) in active.iter().enumerate() {
        let row: &Row = &rows[j];
        match row.source {
            Source::Bound(i) => resid[i] -= mult[k] * row.sign,
            Source::General(c) => {
                let ineq = p.inequality.expect("general row without inequality block");
                resid -= ineq.matrix.row(c).transpose() * (mult[k] * row.sign);
            }
        }
    }
    let equality_multipliers = reduction.multipliers(&resid);
    Ok(QpSolution { x, equality_multipliers, active_set_iterations: iterations })
}

struct Reduction {
    null_basis: DMatrix<f64>,
    particular: DVector<f64>,
    // pieces for recovering equality multipliers
    q_thin: DMatrix<f64>,
    r_basic: DMatrix<f64>,
    basic: Vec<usize>,
    m: usize,
}

impl Reduction {
    fn identity(n: usize) -> Self {
        Self {
            null_basis: DMatrix::identity(n, n),
            particular: DVector::zeros(n),
            q_thin: DMatrix::zeros(0, 0),
            r_basic: DMatrix::zeros(0, 0),
            basic: vec![],
            m: 0,
        }
    }

    fn new(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<Self, QpError> {
        let (m, n) = a.shape();
        if b.len() != m {
            return Err(QpError::Dimension("equality right-hand side".into()));
        }
        let qr = a.clone().col_piv_qr();
        let q = qr.q();
        let r = qr.r();
        let mut order = DMatrix::from_fn(1, n, |_, j| j as f64);
        qr.p().permute_columns(&mut order);
        let perm: Vec<usize> = order.iter().map(|&v| v as usize).collect();

        let k = m.min(n);
        let scale = if k > 0 { r[(0, 0)].abs().max(1e-300) } else { 1.0 };
        let rank = (0..k).take_while(|&i| r[(i, i)].abs() > RANK_TOL * scale.max(1.0)).count();
        let qtb = q.transpose() * b;
        for i in rank..qtb.len() {
            if qtb[i].abs() > 1e-8 * (1.0 + b.amax()) {
                return Err(QpError::Infeasible(format!("inconsistent equalities (residual {:.3e})", qtb[i])));
            }
        }

        let basic: Vec<usize> = perm[..rank].to_vec();
        let free: Vec<usize> = perm[rank..].to_vec();
        let r1 = r.view((0, 0), (rank, rank)).upper_triangle();
        let r2 = r.view((0, rank), (rank, n - rank)).into_owned();
        let solve_r1 = |rhs: &DMatrix<f64>| {
            r1.solve_upper_triangular(rhs).ok_or_else(|| QpError::Infeasible("singular basic block".into()))
        };
        let t = solve_r1(&r2)?;
        let xb = solve_r1(&DMatrix::from_column_slice(rank, 1, &qtb.as_slice()[..rank]))?;

        let mut null_basis = DMatrix::zeros(n, n - rank);
        let mut particular = DVector::zeros(n);
        for (bi, &col) in basic.iter().enumerate() {
            particular[col] = xb[(bi, 0)];
            for f in 0..n - rank {
                null_basis[(col, f)] = -t[(bi, f)];
            }
        }
        for (f, &col) in free.iter().enumerate() {
            null_basis[(col, f)] = 1.0;
        }
        let q_thin = q.columns(0, rank).into_owned();
        Ok(Self { null_basis, particular, q_thin, r_basic: r1, basic, m })
    }

    /// Least-squares `λ` with `Aᵀλ ≈ v`, using the basic columns.
    fn multipliers(&self, v: &DVector<f64>) -> DVector<f64> {
        if self.m == 0 {
            return DVector::zeros(0);
        }
        let vb = DVector::from_iterator(self.basic.len(), self.basic.iter().map(|&i| v[i]));
        let mu = self.r_basic.transpose().solve_lower_triangular(&vb).unwrap_or_else(|| DVector::zeros(vb.len()));
        &self.q_thin * mu
    }
}

/// Goldfarb-Idnani dual method for `min ½wᵀGw + hᵀw` s.t. `aᵢᵀw ≥ bᵢ`.
/// Returns the solution, the active row indices, their multipliers and the
/// number of active-set changes.
fn goldfarb_idnani(
    g: &DMatrix<f64>,
    h: &DVector<f64>,
    rows: &[Row],
) -> Result<(DVector<f64>, Vec<usize>, Vec<f64>, usize), QpError> {
    let n = h.len();
    let chol = Cholesky::new(g.clone()).ok_or(QpError::NotConvex)?;
    let ginv = chol.inverse();
    let mut w = -(&ginv * h);
    let mut active: Vec<usize> = Vec::new();
    let mut u: Vec<f64> = Vec::new();
    let max_iter = 10 * (rows.len() + n) + 50;
    let mut iterations = 0;

    loop {
        // most violated constraint, scaled by row norm
        let mut pick = None;
        let mut worst = 0.0;
        for (j, r) in rows.iter().enumerate() {
            if active.contains(&j) {
                continue;
            }
            let slack = r.a.dot(&w) - r.bound;
            let scaled = slack / r.a.norm();
            if scaled < -FEAS_TOL * (1.0 + r.bound.abs()) && scaled < worst {
                worst = scaled;
                pick = Some(j);
            }
        }
        let Some(p) = pick else {
            return Ok((w, active, u, iterations));
        };
        let np = &rows[p].a;
        let mut up = 0.0;

        loop {
            iterations += 1;
            if iterations > max_iter {
                return Err(QpError::IterationLimit);
            }
            let q = active.len();
            let ginv_np = &ginv * np;
            let (z, r) = if q == 0 {
                (ginv_np, DVector::zeros(0))
            } else {
                let nmat = DMatrix::from_fn(n, q, |i, k| rows[active[k]].a[i]);
                let ginv_n = &ginv * &nmat;
                let m = nmat.transpose() * &ginv_n;
                let rhs = nmat.transpose() * &ginv_np;
                let r = match Cholesky::new(m.clone()) {
                    Some(c) => c.solve(&rhs),
                    None => m.lu().solve(&rhs).ok_or(QpError::NotConvex)?,
                };
                (ginv_np - ginv_n * &r, r)
            };

            // partial step: first active multiplier to hit zero
            let mut t1 = f64::INFINITY;
            let mut drop = None;
            for k in 0..r.len() {
                if r[k] > 1e-14 {
                    let ratio = u[k] / r[k];
                    if ratio < t1 {
                        t1 = ratio;
                        drop = Some(k);
                    }
                }
            }
            let znp = z.dot(np);
            let t2 = if z.amax() > 1e-13 * (1.0 + np.amax()) && znp > 0.0 {
                (rows[p].bound - np.dot(&w)) / znp
            } else {
                f64::INFINITY
            };
            let t = t1.min(t2);
            if !t.is_finite() {
                return Err(QpError::Infeasible("constraints are inconsistent".into()));
            }
            if t2.is_finite() {
                w += &z * t;
            }
            for k in 0..u.len() {
                u[k] -= t * r[k];
            }
            up += t;
            if t2 <= t1 {
                active.push(p);
                u.push(up);
                break;
            }
            let k = drop.expect("partial step without a blocking multiplier");
            active.remove(k);
            u.remove(k);
        }
    }
}
