//! Bounded dual simplex over the computational form `A x - r = 0`.
//!
//! Every row `i` owns a logical variable `r_i = a_i x` carrying the row
//! bounds, so a basis is a set of `m` variables drawn from the `n`
//! structurals and `m` logicals. Basic logicals contribute unit columns,
//! which leaves only the kernel `K = A[rows with nonbasic logical, basic
//! structurals]` to invert. The kernel inverse is held densely and updated
//! in place on every pivot.

use std::time::Instant;

const NONE: usize = usize::MAX;
const PRIMAL_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-7;
const SINGULAR_TOL: f64 = 1e-11;
const REFACTOR_EVERY: usize = 120;
const ARTIFICIAL_START: f64 = 1e6;
const ARTIFICIAL_MAX: f64 = 1e15;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum State {
    Basic,
    Lower,
    Upper,
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterLimit,
    Timeout,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Breakdown;

/// Row-and-column description of an LP: `min cost·x` subject to
/// `row_lb <= A x <= row_ub` and `col_lb <= x <= col_ub`.
#[derive(Clone, Debug, Default)]
pub(crate) struct LpData {
    pub cost: Vec<f64>,
    pub col_lb: Vec<f64>,
    pub col_ub: Vec<f64>,
    pub row_lb: Vec<f64>,
    pub row_ub: Vec<f64>,
    /// Triplets `(row, col, value)`; duplicates are summed.
    pub entries: Vec<(usize, usize, f64)>,
}

/// Saved basis used to restart a sibling or child solve.
#[derive(Clone, Debug)]
pub(crate) struct Basis {
    states: Vec<State>,
}

impl Basis {
    /// Basis for the same model with columns appended after the old
    /// structurals and rows appended at the end. New rows start with their
    /// logical basic; new columns start nonbasic.
    pub(crate) fn grown(&self, old_n: usize, new_n: usize, new_m: usize) -> Basis {
        let old_m = self.states.len() - old_n;
        assert!(new_n >= old_n && new_m >= old_m, "basis can only grow");
        let mut states = Vec::with_capacity(new_n + new_m);
        states.extend_from_slice(&self.states[..old_n]);
        states.resize(new_n, State::Free);
        states.extend_from_slice(&self.states[old_n..]);
        states.resize(new_n + new_m, State::Basic);
        Basis { states }
    }

    pub(crate) fn len(&self) -> usize {
        self.states.len()
    }
}

enum Phase {
    Done,
    Status(LpStatus),
}

pub(crate) struct Simplex {
    n: usize,
    m: usize,
    cs: Vec<usize>,
    ci: Vec<usize>,
    cv: Vec<f64>,
    rs: Vec<usize>,
    ri: Vec<usize>,
    rv: Vec<f64>,
    c0: Vec<f64>,
    c: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    wlb: Vec<f64>,
    wub: Vec<f64>,
    x: Vec<f64>,
    d: Vec<f64>,
    st: Vec<State>,
    krow: Vec<usize>,
    kcol: Vec<usize>,
    rpos: Vec<usize>,
    cpos: Vec<usize>,
    cap: usize,
    minv: Vec<f64>,
    updates: usize,
    rho: Vec<f64>,
    rho_nz: Vec<usize>,
    alpha: Vec<f64>,
    alpha_nz: Vec<usize>,
    alpha_mark: Vec<bool>,
    zs: Vec<f64>,
    zr: Vec<f64>,
    zr_nz: Vec<usize>,
    zr_mark: Vec<bool>,
    scratch: Vec<f64>,
    degenerate_run: usize,
    pub iterations: usize,
    pub max_iterations: usize,
    pub deadline: Option<Instant>,
}

impl Simplex {
    pub(crate) fn new(data: &LpData) -> Simplex {
        let n = data.cost.len();
        let m = data.row_lb.len();
        let mut trip = data.entries.clone();
        trip.retain(|t| t.2 != 0.0);
        trip.sort_by_key(|a| (a.1, a.0));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(trip.len());
        for t in trip {
            match merged.last_mut() {
                Some(last) if last.0 == t.0 && last.1 == t.1 => last.2 += t.2,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.2 != 0.0);

        let mut cs = vec![0usize; n + 1];
        for t in &merged {
            cs[t.1 + 1] += 1;
        }
        for j in 0..n {
            cs[j + 1] += cs[j];
        }
        let ci: Vec<usize> = merged.iter().map(|t| t.0).collect();
        let cv: Vec<f64> = merged.iter().map(|t| t.2).collect();

        let mut rs = vec![0usize; m + 1];
        for t in &merged {
            rs[t.0 + 1] += 1;
        }
        for i in 0..m {
            rs[i + 1] += rs[i];
        }
        let mut fill = rs.clone();
        let mut ri = vec![0usize; merged.len()];
        let mut rv = vec![0.0; merged.len()];
        for t in &merged {
            let k = fill[t.0];
            ri[k] = t.1;
            rv[k] = t.2;
            fill[t.0] += 1;
        }

        let nv = n + m;
        let mut lb = data.col_lb.clone();
        lb.extend_from_slice(&data.row_lb);
        let mut ub = data.col_ub.clone();
        ub.extend_from_slice(&data.row_ub);
        let mut c = data.cost.clone();
        c.resize(nv, 0.0);
        let cap = n.min(m);

        let mut s = Simplex {
            n,
            m,
            cs,
            ci,
            cv,
            rs,
            ri,
            rv,
            c0: data.cost.clone(),
            c,
            wlb: lb.clone(),
            wub: ub.clone(),
            lb,
            ub,
            x: vec![0.0; nv],
            d: vec![0.0; nv],
            st: vec![State::Free; nv],
            krow: Vec::with_capacity(cap),
            kcol: Vec::with_capacity(cap),
            rpos: vec![NONE; m],
            cpos: vec![NONE; n],
            cap,
            minv: vec![0.0; cap * cap],
            updates: 0,
            rho: vec![0.0; m],
            rho_nz: Vec::new(),
            alpha: vec![0.0; nv],
            alpha_nz: Vec::new(),
            alpha_mark: vec![false; nv],
            zs: vec![0.0; cap],
            zr: vec![0.0; m],
            zr_nz: Vec::new(),
            zr_mark: vec![false; m],
            scratch: vec![0.0; cap.max(1)],
            degenerate_run: 0,
            iterations: 0,
            max_iterations: 50_000 + 50 * nv,
            deadline: None,
        };
        for i in 0..m {
            s.st[n + i] = State::Basic;
        }
        for j in 0..n {
            s.d[j] = s.c[j];
            s.place_nonbasic(j);
        }
        s
    }

    pub(crate) fn col_bounds(&self, j: usize) -> (f64, f64) {
        (self.lb[j], self.ub[j])
    }

    /// Structural values of the current basic solution.
    pub(crate) fn primal(&self) -> &[f64] {
        &self.x[..self.n]
    }

    pub(crate) fn objective(&self) -> f64 {
        self.c0.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }

    /// Row duals `y` with `cost - A^T y` equal to the structural reduced costs.
    #[cfg(test)]
    pub(crate) fn duals(&self) -> Vec<f64> {
        (0..self.m)
            .map(|i| {
                let v = self.n + i;
                if self.st[v] == State::Basic {
                    0.0
                } else {
                    self.d[v] - self.c[v]
                }
            })
            .collect()
    }

    pub(crate) fn basis(&self) -> Basis {
        Basis {
            states: self.st.clone(),
        }
    }

    pub(crate) fn set_col_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        self.lb[j] = lo;
        self.ub[j] = hi;
        self.wlb[j] = lo;
        self.wub[j] = hi;
        if self.st[j] != State::Basic {
            self.place_nonbasic(j);
        }
    }

    /// Installs a saved basis. Falls back to the slack basis when the saved
    /// one no longer factors.
    pub(crate) fn load_basis(&mut self, basis: &Basis) {
        self.st.clone_from(&basis.states);
        self.rebuild_kernel_lists();
    }

    fn rebuild_kernel_lists(&mut self) {
        self.krow.clear();
        self.kcol.clear();
        self.rpos.iter_mut().for_each(|p| *p = NONE);
        self.cpos.iter_mut().for_each(|p| *p = NONE);
        for j in 0..self.n {
            if self.st[j] == State::Basic {
                self.cpos[j] = self.kcol.len();
                self.kcol.push(j);
            }
        }
        for i in 0..self.m {
            if self.st[self.n + i] != State::Basic {
                self.rpos[i] = self.krow.len();
                self.krow.push(i);
            }
        }
        assert_eq!(self.krow.len(), self.kcol.len(), "basis size mismatch");
    }

    /// Chooses a nonbasic position consistent with the sign of `d[v]`,
    /// inventing a far artificial bound when the needed side is infinite.
    fn place_nonbasic(&mut self, v: usize) {
        let dv = self.d[v];
        let (lo, hi) = (self.wlb[v], self.wub[v]);
        if lo == hi {
            self.st[v] = State::Lower;
            self.x[v] = lo;
            return;
        }
        if dv > DUAL_TOL {
            if !lo.is_finite() {
                self.wlb[v] = -self.artificial_for(hi);
            }
            self.st[v] = State::Lower;
            self.x[v] = self.wlb[v];
        } else if dv < -DUAL_TOL {
            if !hi.is_finite() {
                self.wub[v] = self.artificial_for(lo);
            }
            self.st[v] = State::Upper;
            self.x[v] = self.wub[v];
        } else if lo.is_finite() && (self.st[v] != State::Upper || !hi.is_finite()) {
            self.st[v] = State::Lower;
            self.x[v] = lo;
        } else if hi.is_finite() {
            self.st[v] = State::Upper;
            self.x[v] = hi;
        } else {
            self.st[v] = State::Free;
            self.x[v] = 0.0;
        }
    }

    fn artificial_for(&self, other: f64) -> f64 {
        let base = if other.is_finite() { other.abs() } else { 0.0 };
        ARTIFICIAL_START.max(10.0 * base)
    }

    #[inline]
    fn m_at(&self, b: usize, a: usize) -> f64 {
        self.minv[b * self.cap + a]
    }

    /// Solves `B z = a_q`; results land in `zs` (structural basics, by
    /// kernel column) and `zr` (logical basics, by row).
    fn ftran_col(&mut self, q: usize) {
        let r = self.kcol.len();
        self.clear_zr();
        for b in 0..r {
            self.zs[b] = 0.0;
        }
        if q < self.n {
            for k in self.cs[q]..self.cs[q + 1] {
                let i = self.ci[k];
                let a = self.rpos[i];
                if a != NONE {
                    let v = self.cv[k];
                    for b in 0..r {
                        self.zs[b] += self.minv[b * self.cap + a] * v;
                    }
                }
            }
        } else {
            let a = self.rpos[q - self.n];
            debug_assert!(a != NONE);
            for b in 0..r {
                self.zs[b] = -self.minv[b * self.cap + a];
            }
        }
        for b in 0..r {
            let z = self.zs[b];
            if z != 0.0 {
                let j = self.kcol[b];
                for k in self.cs[j]..self.cs[j + 1] {
                    let i = self.ci[k];
                    if self.rpos[i] == NONE {
                        self.add_zr(i, self.cv[k] * z);
                    }
                }
            }
        }
        if q < self.n {
            for k in self.cs[q]..self.cs[q + 1] {
                let i = self.ci[k];
                if self.rpos[i] == NONE {
                    self.add_zr(i, -self.cv[k]);
                }
            }
        }
    }

    #[inline]
    fn add_zr(&mut self, i: usize, v: f64) {
        if !self.zr_mark[i] {
            self.zr_mark[i] = true;
            self.zr_nz.push(i);
        }
        self.zr[i] += v;
    }

    fn clear_zr(&mut self) {
        for &i in &self.zr_nz {
            self.zr[i] = 0.0;
            self.zr_mark[i] = false;
        }
        self.zr_nz.clear();
    }

    fn z_of(&self, v: usize) -> f64 {
        if v < self.n {
            self.zs[self.cpos[v]]
        } else {
            self.zr[v - self.n]
        }
    }

    /// Row of `B^{-1}` belonging to basic variable `p`.
    fn btran(&mut self, p: usize) {
        for &i in &self.rho_nz {
            self.rho[i] = 0.0;
        }
        self.rho_nz.clear();
        let r = self.kcol.len();
        if p < self.n {
            let b = self.cpos[p];
            for a in 0..r {
                let v = self.minv[b * self.cap + a];
                if v != 0.0 {
                    let i = self.krow[a];
                    self.rho[i] = v;
                    self.rho_nz.push(i);
                }
            }
        } else {
            let l = p - self.n;
            for a in 0..r {
                self.scratch[a] = 0.0;
            }
            for k in self.rs[l]..self.rs[l + 1] {
                let j = self.ri[k];
                let b = self.cpos[j];
                if b != NONE {
                    let v = self.rv[k];
                    let row = &self.minv[b * self.cap..b * self.cap + r];
                    for (s, mv) in self.scratch[..r].iter_mut().zip(row) {
                        *s += v * mv;
                    }
                }
            }
            for a in 0..r {
                let v = self.scratch[a];
                if v != 0.0 {
                    let i = self.krow[a];
                    self.rho[i] = v;
                    self.rho_nz.push(i);
                }
            }
            self.rho[l] = -1.0;
            self.rho_nz.push(l);
        }
    }

    /// `alpha_j = rho·a_j` over nonbasic variables.
    fn pivot_row(&mut self) {
        for &j in &self.alpha_nz {
            self.alpha[j] = 0.0;
            self.alpha_mark[j] = false;
        }
        self.alpha_nz.clear();
        for idx in 0..self.rho_nz.len() {
            let i = self.rho_nz[idx];
            let rv = self.rho[i];
            for k in self.rs[i]..self.rs[i + 1] {
                let j = self.ri[k];
                if self.st[j] != State::Basic {
                    if !self.alpha_mark[j] {
                        self.alpha_mark[j] = true;
                        self.alpha_nz.push(j);
                    }
                    self.alpha[j] += rv * self.rv[k];
                }
            }
            let v = self.n + i;
            if self.st[v] != State::Basic {
                if !self.alpha_mark[v] {
                    self.alpha_mark[v] = true;
                    self.alpha_nz.push(v);
                }
                self.alpha[v] -= rv;
            }
        }
    }

    fn compute_primal(&mut self) {
        let mut h = vec![0.0; self.m];
        for j in 0..self.n {
            if self.st[j] != State::Basic && self.x[j] != 0.0 {
                for k in self.cs[j]..self.cs[j + 1] {
                    h[self.ci[k]] -= self.cv[k] * self.x[j];
                }
            }
        }
        for i in 0..self.m {
            let v = self.n + i;
            if self.st[v] != State::Basic {
                h[i] += self.x[v];
            }
        }
        let r = self.kcol.len();
        for b in 0..r {
            let mut s = 0.0;
            for a in 0..r {
                s += self.m_at(b, a) * h[self.krow[a]];
            }
            self.x[self.kcol[b]] = s;
        }
        for i in 0..self.m {
            if self.rpos[i] == NONE {
                let mut s = -h[i];
                for k in self.rs[i]..self.rs[i + 1] {
                    let j = self.ri[k];
                    if self.cpos[j] != NONE {
                        s += self.rv[k] * self.x[j];
                    }
                }
                self.x[self.n + i] = s;
            }
        }
    }

    fn compute_duals(&mut self) {
        let r = self.kcol.len();
        let mut y = vec![0.0; self.m];
        for i in 0..self.m {
            if self.rpos[i] == NONE {
                y[i] = -self.c[self.n + i];
            }
        }
        let mut rhs = vec![0.0; r];
        for b in 0..r {
            let j = self.kcol[b];
            let mut s = self.c[j];
            for k in self.cs[j]..self.cs[j + 1] {
                let i = self.ci[k];
                if self.rpos[i] == NONE {
                    s -= self.cv[k] * y[i];
                }
            }
            rhs[b] = s;
        }
        for a in 0..r {
            let mut s = 0.0;
            for b in 0..r {
                s += self.m_at(b, a) * rhs[b];
            }
            y[self.krow[a]] = s;
        }
        for j in 0..self.n {
            if self.st[j] == State::Basic {
                self.d[j] = 0.0;
            } else {
                let mut s = self.c[j];
                for k in self.cs[j]..self.cs[j + 1] {
                    s -= self.cv[k] * y[self.ci[k]];
                }
                self.d[j] = s;
            }
        }
        for i in 0..self.m {
            let v = self.n + i;
            self.d[v] = if self.st[v] == State::Basic {
                0.0
            } else {
                self.c[v] + y[i]
            };
        }
    }

    /// Rebuilds the kernel inverse from scratch, swapping dependent
    /// structurals out for logicals when the kernel is singular.
    fn refactor(&mut self) -> Result<(), Breakdown> {
        for _attempt in 0..4 {
            let r = self.kcol.len();
            let mut k = vec![0.0; r * r];
            for b in 0..r {
                let j = self.kcol[b];
                for t in self.cs[j]..self.cs[j + 1] {
                    let a = self.rpos[self.ci[t]];
                    if a != NONE {
                        k[a * r + b] = self.cv[t];
                    }
                }
            }
            match invert(&mut k, r) {
                Ok(inv) => {
                    for b in 0..r {
                        self.minv[b * self.cap..b * self.cap + r]
                            .copy_from_slice(&inv[b * r..(b + 1) * r]);
                    }
                    self.updates = 0;
                    return Ok(());
                }
                Err((bad_cols, free_rows)) => {
                    for &b in &bad_cols {
                        let j = self.kcol[b];
                        self.st[j] = State::Free;
                        self.d[j] = 0.0;
                        let xv = self.x[j];
                        let (lo, hi) = (self.wlb[j], self.wub[j]);
                        if lo.is_finite() && (!hi.is_finite() || (xv - lo).abs() <= (hi - xv).abs()) {
                            self.st[j] = State::Lower;
                            self.x[j] = lo;
                        } else if hi.is_finite() {
                            self.st[j] = State::Upper;
                            self.x[j] = hi;
                        } else {
                            self.x[j] = 0.0;
                        }
                    }
                    for &a in &free_rows {
                        self.st[self.n + self.krow[a]] = State::Basic;
                    }
                    self.rebuild_kernel_lists();
                }
            }
        }
        Err(Breakdown)
    }

    /// Swaps `q` into the basis in place of `p`, updating the kernel inverse.
    fn update_kernel(&mut self, q: usize, p: usize) {
        let cap = self.cap;
        let r = self.kcol.len();
        match (q < self.n, p < self.n) {
            (true, true) => {
                let b = self.cpos[p];
                let piv = self.zs[b];
                let inv = 1.0 / piv;
                for a in 0..r {
                    self.minv[b * cap + a] *= inv;
                }
                for bb in 0..r {
                    if bb == b {
                        continue;
                    }
                    let f = self.zs[bb];
                    if f != 0.0 {
                        let (src, dst) = two_rows(&mut self.minv, b, bb, cap);
                        for a in 0..r {
                            dst[a] -= f * src[a];
                        }
                    }
                }
                self.kcol[b] = q;
                self.cpos[p] = NONE;
                self.cpos[q] = b;
            }
            (true, false) => {
                let l = p - self.n;
                let sigma = -self.zr[l];
                let mut t = vec![0.0; r];
                for k in self.rs[l]..self.rs[l + 1] {
                    let b = self.cpos[self.ri[k]];
                    if b != NONE {
                        let v = self.rv[k];
                        for a in 0..r {
                            t[a] += v * self.minv[b * cap + a];
                        }
                    }
                }
                let inv = 1.0 / sigma;
                for b in 0..r {
                    let f = self.zs[b] * inv;
                    if f != 0.0 {
                        let row = &mut self.minv[b * cap..b * cap + r];
                        for a in 0..r {
                            row[a] += f * t[a];
                        }
                    }
                    self.minv[b * cap + r] = -self.zs[b] * inv;
                }
                for a in 0..r {
                    self.minv[r * cap + a] = -t[a] * inv;
                }
                self.minv[r * cap + r] = inv;
                self.kcol.push(q);
                self.cpos[q] = r;
                self.krow.push(l);
                self.rpos[l] = r;
            }
            (false, true) => {
                let k = q - self.n;
                let a0 = self.rpos[k];
                let b0 = self.cpos[p];
                let piv = self.minv[b0 * cap + a0];
                let col: Vec<f64> = (0..r).map(|b| self.minv[b * cap + a0]).collect();
                let row: Vec<f64> = self.minv[b0 * cap..b0 * cap + r].to_vec();
                for b in 0..r {
                    let f = col[b] / piv;
                    if f != 0.0 {
                        let dst = &mut self.minv[b * cap..b * cap + r];
                        for a in 0..r {
                            dst[a] -= f * row[a];
                        }
                    }
                }
                let last = r - 1;
                if b0 != last {
                    let (src, dst) = two_rows(&mut self.minv, last, b0, cap);
                    dst[..r].copy_from_slice(&src[..r]);
                    let moved = self.kcol[last];
                    self.kcol[b0] = moved;
                    self.cpos[moved] = b0;
                }
                self.kcol.pop();
                self.cpos[p] = NONE;
                if a0 != last {
                    for b in 0..last {
                        self.minv[b * cap + a0] = self.minv[b * cap + last];
                    }
                    let moved = self.krow[last];
                    self.krow[a0] = moved;
                    self.rpos[moved] = a0;
                }
                self.krow.pop();
                self.rpos[k] = NONE;
            }
            (false, false) => {
                let k = q - self.n;
                let l = p - self.n;
                let a0 = self.rpos[k];
                let mut t = vec![0.0; r];
                for kk in self.rs[l]..self.rs[l + 1] {
                    let b = self.cpos[self.ri[kk]];
                    if b != NONE {
                        let v = self.rv[kk];
                        for a in 0..r {
                            t[a] += v * self.minv[b * cap + a];
                        }
                    }
                }
                let inv = 1.0 / t[a0];
                for b in 0..r {
                    self.minv[b * cap + a0] *= inv;
                    let f = self.minv[b * cap + a0];
                    if f != 0.0 {
                        let row = &mut self.minv[b * cap..b * cap + r];
                        for a in 0..r {
                            if a != a0 {
                                row[a] -= f * t[a];
                            }
                        }
                    }
                }
                self.krow[a0] = l;
                self.rpos[l] = a0;
                self.rpos[k] = NONE;
            }
        }
        self.st[q] = State::Basic;
        self.updates += 1;
    }

    fn check_limits(&self) -> Option<LpStatus> {
        if self.iterations >= self.max_iterations {
            return Some(LpStatus::IterLimit);
        }
        if self.iterations.is_multiple_of(64) {
            if let Some(dl) = self.deadline {
                if Instant::now() >= dl {
                    return Some(LpStatus::Timeout);
                }
            }
        }
        None
    }

    fn maybe_refactor(&mut self, primal: bool) -> Result<(), Breakdown> {
        if self.updates >= REFACTOR_EVERY + self.kcol.len() {
            self.refactor()?;
            if primal {
                self.recompute_primal_phase();
            } else {
                self.recompute_after_refactor();
            }
        }
        Ok(())
    }

    fn recompute_after_refactor(&mut self) {
        self.compute_duals();
        for v in 0..self.n + self.m {
            if self.st[v] == State::Basic {
                continue;
            }
            let dv = self.d[v];
            let bad = match self.st[v] {
                State::Lower => dv < -DUAL_TOL,
                State::Upper => dv > DUAL_TOL,
                State::Free => dv.abs() > DUAL_TOL,
                State::Basic => false,
            };
            if bad {
                self.c[v] -= dv;
                self.d[v] = 0.0;
            }
        }
        self.compute_primal();
    }

    fn perturb_costs(&mut self) {
        let mut seed: u64 = 0x9E37_79B9_7F4A_7C15;
        for j in 0..self.n {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            let u = 0.5 + (seed >> 11) as f64 / (1u64 << 53) as f64 * 0.5;
            let eps = 5e-7 * (1.0 + self.c0[j].abs()) * u;
            match self.st[j] {
                State::Lower if self.wlb[j] != self.wub[j] => {
                    self.c[j] += eps;
                    self.d[j] += eps;
                }
                State::Upper if self.wlb[j] != self.wub[j] => {
                    self.c[j] -= eps;
                    self.d[j] -= eps;
                }
                _ => {}
            }
        }
    }

    pub(crate) fn solve(&mut self) -> Result<LpStatus, Breakdown> {
        self.c[..self.n].copy_from_slice(&self.c0);
        for v in self.n..self.n + self.m {
            self.c[v] = 0.0;
        }
        self.wlb.clone_from(&self.lb);
        self.wub.clone_from(&self.ub);
        self.degenerate_run = 0;
        self.refactor()?;
        self.compute_duals();
        for v in 0..self.n + self.m {
            if self.st[v] != State::Basic {
                self.place_nonbasic(v);
            }
        }
        self.perturb_costs();
        self.compute_primal();
        for _round in 0..50 {
            match self.dual_phase()? {
                Phase::Status(s) => {
                    if s == LpStatus::Infeasible && self.artificial_active() {
                        if !self.widen_artificial() {
                            return Ok(LpStatus::Unbounded);
                        }
                        continue;
                    }
                    return Ok(s);
                }
                Phase::Done => {}
            }
            if self.artificial_active() {
                if !self.release_artificial() {
                    return Ok(LpStatus::Unbounded);
                }
                continue;
            }
            let shifted = self.c[..self.n] != self.c0[..]
                || self.c[self.n..].iter().any(|&c| c != 0.0);
            if shifted {
                self.c[..self.n].copy_from_slice(&self.c0);
                for v in self.n..self.n + self.m {
                    self.c[v] = 0.0;
                }
                self.compute_duals();
                match self.primal_phase()? {
                    Phase::Status(s) => return Ok(s),
                    Phase::Done => {}
                }
            }
            self.refactor()?;
            self.compute_duals();
            self.compute_primal();
            if self.max_primal_infeasibility() <= 1e-7 && self.max_dual_infeasibility() <= 1e-7 {
                self.clamp_basic();
                return Ok(LpStatus::Optimal);
            }
            self.recompute_after_refactor();
        }
        Err(Breakdown)
    }

    fn clamp_basic(&mut self) {
        for v in 0..self.n {
            if self.st[v] == State::Basic {
                let (lo, hi) = (self.lb[v], self.ub[v]);
                if self.x[v] < lo {
                    self.x[v] = lo;
                } else if self.x[v] > hi {
                    self.x[v] = hi;
                }
            }
        }
    }

    fn artificial_active(&self) -> bool {
        (0..self.n + self.m).any(|v| self.wlb[v] != self.lb[v] || self.wub[v] != self.ub[v])
    }

    /// Pushes artificial bounds further out after infeasibility was reported
    /// against them. Returns false once they exceed the representable range.
    fn widen_artificial(&mut self) -> bool {
        let mut ok = true;
        for v in 0..self.n + self.m {
            if self.wlb[v] != self.lb[v] {
                self.wlb[v] *= 100.0;
                ok &= self.wlb[v].abs() <= ARTIFICIAL_MAX;
                if self.st[v] == State::Lower {
                    self.x[v] = self.wlb[v];
                }
            }
            if self.wub[v] != self.ub[v] {
                self.wub[v] *= 100.0;
                ok &= self.wub[v].abs() <= ARTIFICIAL_MAX;
                if self.st[v] == State::Upper {
                    self.x[v] = self.wub[v];
                }
            }
        }
        self.compute_primal();
        ok
    }

    /// Drops artificial bounds after an optimal dual phase. A variable still
    /// pressed against one signals either a too-tight box or unboundedness.
    fn release_artificial(&mut self) -> bool {
        let saved_c = self.c.clone();
        let saved_d = self.d.clone();
        self.c[..self.n].copy_from_slice(&self.c0);
        for v in self.n..self.n + self.m {
            self.c[v] = 0.0;
        }
        self.compute_duals();
        let d_true = std::mem::replace(&mut self.d, saved_d);
        self.c = saved_c;
        let mut pressed = false;
        for v in 0..self.n + self.m {
            let art_lo = self.wlb[v] != self.lb[v];
            let art_hi = self.wub[v] != self.ub[v];
            if !art_lo && !art_hi {
                continue;
            }
            let at_lo = art_lo && self.st[v] == State::Lower;
            let at_hi = art_hi && self.st[v] == State::Upper;
            if (at_lo && d_true[v] > DUAL_TOL) || (at_hi && d_true[v] < -DUAL_TOL) {
                pressed = true;
                continue;
            }
            self.wlb[v] = self.lb[v];
            self.wub[v] = self.ub[v];
            if at_lo || at_hi {
                self.c[v] -= self.d[v];
                self.d[v] = 0.0;
                self.place_nonbasic(v);
            }
        }
        if pressed {
            return self.widen_artificial();
        }
        self.compute_primal();
        true
    }

    fn infeasibility(&self, v: usize) -> f64 {
        let xv = self.x[v];
        if xv < self.wlb[v] {
            self.wlb[v] - xv
        } else if xv > self.wub[v] {
            xv - self.wub[v]
        } else {
            0.0
        }
    }

    fn max_primal_infeasibility(&self) -> f64 {
        (0..self.n + self.m)
            .filter(|&v| self.st[v] == State::Basic)
            .map(|v| self.infeasibility(v) / (1.0 + self.x[v].abs().min(1e6)))
            .fold(0.0, f64::max)
    }

    fn max_dual_infeasibility(&self) -> f64 {
        (0..self.n + self.m)
            .map(|v| match self.st[v] {
                State::Basic => 0.0,
                _ if self.wlb[v] == self.wub[v] => 0.0,
                State::Lower => (-self.d[v]).max(0.0),
                State::Upper => self.d[v].max(0.0),
                State::Free => self.d[v].abs(),
            })
            .fold(0.0, f64::max)
    }

    fn dual_phase(&mut self) -> Result<Phase, Breakdown> {
        loop {
            if let Some(s) = self.check_limits() {
                return Ok(Phase::Status(s));
            }
            self.maybe_refactor(false)?;
            let bland = self.degenerate_run > 200;
            let mut p = NONE;
            let mut best = 0.0;
            for i in 0..self.m {
                let v = if self.rpos[i] == NONE { self.n + i } else { NONE };
                if v != NONE {
                    self.consider_leaving(v, &mut p, &mut best, bland);
                }
            }
            for b in 0..self.kcol.len() {
                let v = self.kcol[b];
                self.consider_leaving(v, &mut p, &mut best, bland);
            }
            if p == NONE {
                return Ok(Phase::Done);
            }
            let below = self.x[p] < self.wlb[p];
            self.btran(p);
            self.pivot_row();

            let mut tmax = f64::INFINITY;
            for &j in &self.alpha_nz {
                let a = if below { -self.alpha[j] } else { self.alpha[j] };
                if let Some(ratio) = self.dual_ratio(j, a, DUAL_TOL) {
                    tmax = tmax.min(ratio);
                }
            }
            if tmax == f64::INFINITY {
                return Ok(Phase::Status(LpStatus::Infeasible));
            }
            let mut q = NONE;
            let mut qa = 0.0;
            for &j in &self.alpha_nz {
                let a = if below { -self.alpha[j] } else { self.alpha[j] };
                if let Some(ratio) = self.dual_ratio(j, a, 0.0) {
                    if ratio <= tmax {
                        let better = if bland { q == NONE || j < q } else { a.abs() > qa };
                        if better {
                            q = j;
                            qa = a.abs();
                        }
                    }
                }
            }
            if q == NONE {
                return Ok(Phase::Status(LpStatus::Infeasible));
            }
            self.ftran_col(q);
            let zp = self.z_of(p);
            let aq = self.alpha[q];
            if (zp - aq).abs() > 1e-7 * (1.0 + aq.abs()) || zp.abs() < PIVOT_TOL {
                if self.updates == 0 {
                    return Err(Breakdown);
                }
                self.refactor()?;
                self.recompute_after_refactor();
                continue;
            }
            let mut theta_d = self.d[q] / zp;
            let wrong = if below { theta_d > 0.0 } else { theta_d < 0.0 };
            if wrong {
                self.c[q] -= self.d[q];
                self.d[q] = 0.0;
                theta_d = 0.0;
            }
            if theta_d != 0.0 {
                for idx in 0..self.alpha_nz.len() {
                    let j = self.alpha_nz[idx];
                    self.d[j] -= theta_d * self.alpha[j];
                }
            }
            self.degenerate_run = if theta_d == 0.0 { self.degenerate_run + 1 } else { 0 };
            let target = if below { self.wlb[p] } else { self.wub[p] };
            self.pivot(q, p, zp, target);
            self.d[q] = 0.0;
            self.d[p] = -theta_d;
            self.st[p] = if below { State::Lower } else { State::Upper };
            self.iterations += 1;
        }
    }

    #[inline]
    fn consider_leaving(&self, v: usize, p: &mut usize, best: &mut f64, bland: bool) {
        let inf = self.infeasibility(v);
        let scale = 1.0 + self.wlb[v].abs().min(self.wub[v].abs()).min(1e6);
        if inf > PRIMAL_TOL * scale {
            if bland {
                if *p == NONE || v < *p {
                    *p = v;
                }
            } else if inf > *best {
                *best = inf;
                *p = v;
            }
        }
    }

    /// Ratio `|d_j| / |a|` for an eligible entering candidate, where `a` is
    /// the pivot-row entry signed so that positive means "moves toward
    /// dual infeasibility for a variable at its lower bound".
    #[inline]
    fn dual_ratio(&self, j: usize, a: f64, tol: f64) -> Option<f64> {
        if a.abs() < PIVOT_TOL || self.wlb[j] == self.wub[j] {
            return None;
        }
        let dj = self.d[j];
        match self.st[j] {
            State::Lower if a > 0.0 => Some((dj.max(0.0) + tol) / a),
            State::Upper if a < 0.0 => Some(((-dj).max(0.0) + tol) / -a),
            State::Free => Some((dj.abs() + tol) / a.abs()),
            _ => None,
        }
    }

    /// Moves `q` into the basis and `p` out to `target`, with `zp` the pivot
    /// entry of the FTRAN column held in `zs`/`zr`.
    fn pivot(&mut self, q: usize, p: usize, zp: f64, target: f64) {
        let t = (self.x[p] - target) / zp;
        if t != 0.0 {
            for b in 0..self.kcol.len() {
                let v = self.kcol[b];
                self.x[v] -= t * self.zs[b];
            }
            for idx in 0..self.zr_nz.len() {
                let i = self.zr_nz[idx];
                self.x[self.n + i] -= t * self.zr[i];
            }
            self.x[q] += t;
        }
        self.x[p] = target;
        self.update_kernel(q, p);
    }

    fn primal_phase(&mut self) -> Result<Phase, Breakdown> {
        loop {
            if let Some(s) = self.check_limits() {
                return Ok(Phase::Status(s));
            }
            self.maybe_refactor(true)?;
            let bland = self.degenerate_run > 200;
            let mut q = NONE;
            let mut best = 0.0;
            let mut dir = 0.0;
            for v in 0..self.n + self.m {
                if self.st[v] == State::Basic || self.wlb[v] == self.wub[v] {
                    continue;
                }
                let dv = self.d[v];
                let (score, sdir) = match self.st[v] {
                    State::Lower if dv < -DUAL_TOL => (-dv, 1.0),
                    State::Upper if dv > DUAL_TOL => (dv, -1.0),
                    State::Free if dv.abs() > DUAL_TOL => (dv.abs(), -dv.signum()),
                    _ => continue,
                };
                let take = if bland { q == NONE } else { score > best };
                if take {
                    best = score;
                    q = v;
                    dir = sdir;
                }
            }
            if q == NONE {
                return Ok(Phase::Done);
            }
            self.ftran_col(q);
            let mut tmax = f64::INFINITY;
            let basics: Vec<usize> = self
                .kcol
                .iter()
                .copied()
                .chain(self.zr_nz.iter().map(|&i| self.n + i))
                .collect();
            for &v in &basics {
                let rate = -dir * self.z_of(v);
                if let Some(r) = self.primal_ratio(v, rate, PRIMAL_TOL) {
                    tmax = tmax.min(r);
                }
            }
            let flip = if dir > 0.0 {
                self.wub[q] - self.x[q]
            } else {
                self.x[q] - self.wlb[q]
            };
            if tmax == f64::INFINITY && !flip.is_finite() {
                return Ok(Phase::Status(LpStatus::Unbounded));
            }
            if flip <= tmax {
                for b in 0..self.kcol.len() {
                    let v = self.kcol[b];
                    self.x[v] -= dir * flip * self.zs[b];
                }
                for idx in 0..self.zr_nz.len() {
                    let i = self.zr_nz[idx];
                    self.x[self.n + i] -= dir * flip * self.zr[i];
                }
                if dir > 0.0 {
                    self.x[q] = self.wub[q];
                    self.st[q] = State::Upper;
                } else {
                    self.x[q] = self.wlb[q];
                    self.st[q] = State::Lower;
                }
                self.iterations += 1;
                continue;
            }
            let mut p = NONE;
            let mut pa = 0.0;
            for &v in &basics {
                let rate = -dir * self.z_of(v);
                if let Some(r) = self.primal_ratio(v, rate, 0.0) {
                    if r <= tmax {
                        let better = if bland { p == NONE || v < p } else { rate.abs() > pa };
                        if better {
                            p = v;
                            pa = rate.abs();
                        }
                    }
                }
            }
            if p == NONE {
                return Err(Breakdown);
            }
            let zp = self.z_of(p);
            let to_lower = -dir * zp < 0.0;
            let target = if to_lower { self.wlb[p] } else { self.wub[p] };
            self.btran(p);
            self.pivot_row();
            let aq = self.alpha[q];
            if (zp - aq).abs() > 1e-7 * (1.0 + aq.abs()) {
                if self.updates == 0 {
                    return Err(Breakdown);
                }
                self.refactor()?;
                self.recompute_primal_phase();
                continue;
            }
            let theta_d = self.d[q] / zp;
            for idx in 0..self.alpha_nz.len() {
                let j = self.alpha_nz[idx];
                self.d[j] -= theta_d * self.alpha[j];
            }
            let step = (self.x[p] - target) / zp;
            self.degenerate_run = if step.abs() < 1e-12 { self.degenerate_run + 1 } else { 0 };
            self.pivot(q, p, zp, target);
            self.d[q] = 0.0;
            self.d[p] = -theta_d;
            self.st[p] = if to_lower { State::Lower } else { State::Upper };
            self.iterations += 1;
        }
    }

    fn recompute_primal_phase(&mut self) {
        self.compute_duals();
        self.compute_primal();
    }

    #[inline]
    fn primal_ratio(&self, v: usize, rate: f64, tol: f64) -> Option<f64> {
        if rate < -PIVOT_TOL && self.wlb[v].is_finite() {
            Some(((self.x[v] - self.wlb[v]).max(0.0) + tol) / -rate)
        } else if rate > PIVOT_TOL && self.wub[v].is_finite() {
            Some(((self.wub[v] - self.x[v]).max(0.0) + tol) / rate)
        } else {
            None
        }
    }
}

fn two_rows(buf: &mut [f64], src: usize, dst: usize, cap: usize) -> (&[f64], &mut [f64]) {
    if src < dst {
        let (lo, hi) = buf.split_at_mut(dst * cap);
        (&lo[src * cap..src * cap + cap], &mut hi[..cap])
    } else {
        let (lo, hi) = buf.split_at_mut(src * cap);
        (&hi[..cap], &mut lo[dst * cap..dst * cap + cap])
    }
}

/// Gauss-Jordan inverse of the row-major `r x r` matrix `k`, returned with
/// rows indexed by columns of `k`. On failure reports the columns without an
/// acceptable pivot and the rows left unused.
fn invert(k: &mut [f64], r: usize) -> Result<Vec<f64>, (Vec<usize>, Vec<usize>)> {
    let mut inv = vec![0.0; r * r];
    for a in 0..r {
        inv[a * r + a] = 1.0;
    }
    let mut row_used = vec![false; r];
    let mut pivot_row_of = vec![NONE; r];
    let mut bad = Vec::new();
    let scale: Vec<f64> = (0..r)
        .map(|b| (0..r).map(|a| k[a * r + b].abs()).fold(0.0, f64::max))
        .collect();
    for b in 0..r {
        let mut best = NONE;
        let mut bv = 0.0;
        for a in 0..r {
            if !row_used[a] {
                let v = k[a * r + b].abs();
                if v > bv {
                    bv = v;
                    best = a;
                }
            }
        }
        if best == NONE || bv <= SINGULAR_TOL * scale[b].max(1.0) {
            bad.push(b);
            continue;
        }
        row_used[best] = true;
        pivot_row_of[b] = best;
        let pv = k[best * r + b];
        let inv_p = 1.0 / pv;
        for c in 0..r {
            k[best * r + c] *= inv_p;
            inv[best * r + c] *= inv_p;
        }
        for a in 0..r {
            if a == best {
                continue;
            }
            let f = k[a * r + b];
            if f != 0.0 {
                for c in 0..r {
                    k[a * r + c] -= f * k[best * r + c];
                    inv[a * r + c] -= f * inv[best * r + c];
                }
            }
        }
    }
    if !bad.is_empty() {
        let free: Vec<usize> = (0..r).filter(|&a| !row_used[a]).collect();
        return Err((bad, free));
    }
    // Row `pivot_row_of[b]` of the reduced system now holds x_b, so the
    // inverse row for column b is that row of `inv`.
    let mut out = vec![0.0; r * r];
    for b in 0..r {
        let a = pivot_row_of[b];
        out[b * r..(b + 1) * r].copy_from_slice(&inv[a * r..(a + 1) * r]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn lp(
        cost: &[f64],
        cols: &[(f64, f64)],
        rows: &[(f64, f64)],
        entries: &[(usize, usize, f64)],
    ) -> LpData {
        LpData {
            cost: cost.to_vec(),
            col_lb: cols.iter().map(|c| c.0).collect(),
            col_ub: cols.iter().map(|c| c.1).collect(),
            row_lb: rows.iter().map(|r| r.0).collect(),
            row_ub: rows.iter().map(|r| r.1).collect(),
            entries: entries.to_vec(),
        }
    }

    const INF: f64 = f64::INFINITY;

    #[test]
    fn single_bound() {
        let data = lp(&[1.0], &[(-INF, INF)], &[(3.0, INF)], &[(0, 0, 1.0)]);
        let mut s = Simplex::new(&data);
        assert_eq!(s.solve().unwrap(), LpStatus::Optimal);
        assert!((s.objective() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_zero_row() {
        let data = lp(&[0.0], &[(0.0, 1.0)], &[(1.0, INF)], &[]);
        let mut s = Simplex::new(&data);
        assert_eq!(s.solve().unwrap(), LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let data = lp(&[-1.0, 0.0], &[(0.0, INF), (0.0, INF)], &[(-INF, 1.0)], &[(0, 0, 1.0), (0, 1, -1.0)]);
        let mut s = Simplex::new(&data);
        assert_eq!(s.solve().unwrap(), LpStatus::Unbounded);
    }

    #[test]
    fn small_textbook() {
        // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3
        let data = lp(
            &[-3.0, -2.0],
            &[(0.0, 3.0), (0.0, INF)],
            &[(-INF, 4.0), (-INF, 6.0)],
            &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)],
        );
        let mut s = Simplex::new(&data);
        assert_eq!(s.solve().unwrap(), LpStatus::Optimal);
        assert!((s.objective() + 11.0).abs() < 1e-9);
        assert!((s.primal()[0] - 3.0).abs() < 1e-9);
        assert!((s.primal()[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn free_absolute_value() {
        // min |a - b| with a = 1, b free in [0, 5] -> 0
        let data = lp(
            &[0.0, 0.0, 1.0],
            &[(1.0, 1.0), (0.0, 5.0), (-INF, INF)],
            &[(0.0, INF), (0.0, INF)],
            &[(0, 2, 1.0), (0, 0, -1.0), (0, 1, 1.0), (1, 2, 1.0), (1, 0, 1.0), (1, 1, -1.0)],
        );
        let mut s = Simplex::new(&data);
        assert_eq!(s.solve().unwrap(), LpStatus::Optimal);
        assert!(s.objective().abs() < 1e-9);
    }

    fn random_lp(rng: &mut impl rand::Rng, n: usize, m: usize, density: f64) -> LpData {
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let mut entries = Vec::new();
        for i in 0..m {
            for j in 0..n {
                if rng.gen_bool(density) {
                    entries.push((i, j, rng.gen_range(-3i32..=3) as f64));
                }
            }
        }
        let mut act = vec![0.0; m];
        for &(i, j, v) in &entries {
            act[i] += v * x0[j];
        }
        let mut col_lb = Vec::new();
        let mut col_ub = Vec::new();
        for j in 0..n {
            match rng.gen_range(0..4) {
                0 => {
                    col_lb.push(-INF);
                    col_ub.push(INF);
                }
                1 => {
                    col_lb.push(x0[j].floor() - rng.gen_range(0.0..3.0));
                    col_ub.push(INF);
                }
                2 => {
                    col_lb.push(-INF);
                    col_ub.push(x0[j].ceil() + rng.gen_range(0.0..3.0));
                }
                _ => {
                    col_lb.push(x0[j] - rng.gen_range(0.0..3.0));
                    col_ub.push(x0[j] + rng.gen_range(0.0..3.0));
                }
            }
        }
        let mut row_lb = Vec::new();
        let mut row_ub = Vec::new();
        for i in 0..m {
            match rng.gen_range(0..4) {
                0 => {
                    row_lb.push(act[i] - rng.gen_range(0.0..2.0));
                    row_ub.push(INF);
                }
                1 => {
                    row_lb.push(-INF);
                    row_ub.push(act[i] + rng.gen_range(0.0..2.0));
                }
                2 => {
                    row_lb.push(act[i]);
                    row_ub.push(act[i]);
                }
                _ => {
                    row_lb.push(act[i] - rng.gen_range(0.0..2.0));
                    row_ub.push(act[i] + rng.gen_range(0.0..2.0));
                }
            }
        }
        let cost = (0..n).map(|_| rng.gen_range(-3i32..=3) as f64).collect();
        LpData { cost, col_lb, col_ub, row_lb, row_ub, entries }
    }

    fn check_kkt(data: &LpData, s: &Simplex) {
        let x = s.primal();
        let y = s.duals();
        let n = data.cost.len();
        let m = data.row_lb.len();
        let tol = 1e-6;
        let mut act = vec![0.0; m];
        let mut rc = data.cost.clone();
        for &(i, j, v) in &data.entries {
            act[i] += v * x[j];
            rc[j] -= v * y[i];
        }
        for j in 0..n {
            assert!(x[j] >= data.col_lb[j] - tol && x[j] <= data.col_ub[j] + tol, "col {j} out of bounds");
            let at_lo = (x[j] - data.col_lb[j]).abs() <= tol;
            let at_hi = (x[j] - data.col_ub[j]).abs() <= tol;
            if !at_lo {
                assert!(rc[j] <= tol, "rc {j} = {} positive off lower", rc[j]);
            }
            if !at_hi {
                assert!(rc[j] >= -tol, "rc {j} = {} negative off upper", rc[j]);
            }
        }
        for i in 0..m {
            assert!(act[i] >= data.row_lb[i] - tol && act[i] <= data.row_ub[i] + tol, "row {i} violated");
            if y[i] > tol {
                assert!((act[i] - data.row_lb[i]).abs() <= tol, "row {i} dual sign");
            }
            if y[i] < -tol {
                assert!((act[i] - data.row_ub[i]).abs() <= tol, "row {i} dual sign");
            }
        }
    }

    const TRIALS: usize = 600;
    const SIZE: usize = 40;

    #[test]
    fn random_lps_certify() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut counts = [0usize; 5];
        for trial in 0..TRIALS {
            let n = rng.gen_range(1..SIZE);
            let m = rng.gen_range(1..SIZE + 5);
            let density = rng.gen_range(0.05..0.5);
            let data = random_lp(&mut rng, n, m, density);
            let mut s = Simplex::new(&data);
            let st = s.solve().unwrap_or_else(|_| panic!("breakdown on trial {trial}"));
            match st {
                LpStatus::Optimal => {
                    counts[0] += 1;
                    check_kkt(&data, &s);
                }
                LpStatus::Unbounded => {
                    counts[2] += 1;
                    let boxed = |b: f64| {
                        let mut d = data.clone();
                        d.col_lb.iter_mut().for_each(|v| *v = v.max(-b));
                        d.col_ub.iter_mut().for_each(|v| *v = v.min(b));
                        let mut s = Simplex::new(&d);
                        assert_eq!(s.solve().unwrap(), LpStatus::Optimal);
                        s.objective()
                    };
                    assert!(boxed(1e4) < boxed(1e2) - 1.0, "trial {trial} not unbounded");
                }
                other => panic!("trial {trial}: unexpected {other:?}"),
            }
        }
        eprintln!("{counts:?}");
        assert!(counts[0] > TRIALS / 4, "{counts:?}");
    }
}
