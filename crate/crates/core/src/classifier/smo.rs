//! Dual soft-margin SVM solver: SMO with second-order working-set
//! selection, no shrinking. Minimizes `0.5 a'Qa - e'a` subject to
//! `0 <= a_i <= C_i` and `y'a = 0`, `Q_ij = y_i y_j K_ij`.

const TAU: f64 = 1e-12;

/// Read access to a (sub)matrix of kernel values.
pub(crate) trait Gram: Sync {
    fn n(&self) -> usize;
    fn get(&self, i: usize, j: usize) -> f64;
}

/// Full row-major `n x n` kernel matrix.
pub(crate) struct DenseGram<'a> {
    pub k: &'a [f64],
    pub n: usize,
}

impl Gram for DenseGram<'_> {
    fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.k[i * self.n + j]
    }
}

/// Rows/columns `idx` of a larger row-major kernel matrix.
pub(crate) struct SubsetGram<'a> {
    pub k: &'a [f64],
    pub stride: usize,
    pub idx: &'a [usize],
}

impl Gram for SubsetGram<'_> {
    fn n(&self) -> usize {
        self.idx.len()
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.k[self.idx[i] * self.stride + self.idx[j]]
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SmoSolution {
    pub alpha: Vec<f64>,
    pub rho: f64,
    pub iterations: usize,
    /// Maximal KKT violation `m(a) - M(a)` at exit.
    #[cfg_attr(not(test), allow(dead_code))]
    pub gap: f64,
}

pub(crate) fn solve<G: Gram>(gram: &G, y: &[f64], upper: &[f64], eps: f64, max_iter: usize) -> SmoSolution {
    let n = gram.n();
    debug_assert_eq!(y.len(), n);
    debug_assert_eq!(upper.len(), n);
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let qd: Vec<f64> = (0..n).map(|i| gram.get(i, i)).collect();
    let mut row_i = vec![0.0; n];
    let mut row_j = vec![0.0; n];
    let mut iterations = 0;
    let mut gap = f64::INFINITY;

    let at_upper = |a: f64, c: f64| a >= c;
    let at_lower = |a: f64| a <= 0.0;

    while iterations < max_iter {
        // i: maximal violating index in I_up.
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..n {
            if y[t] > 0.0 {
                if !at_upper(alpha[t], upper[t]) && -grad[t] >= gmax {
                    gmax = -grad[t];
                    i_sel = t;
                }
            } else if !at_lower(alpha[t]) && grad[t] >= gmax {
                gmax = grad[t];
                i_sel = t;
            }
        }
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = usize::MAX;
        if i_sel != usize::MAX {
            let i = i_sel;
            for (t, r) in row_i.iter_mut().enumerate() {
                *r = y[i] * y[t] * gram.get(i, t);
            }
            let mut obj_min = f64::INFINITY;
            for t in 0..n {
                if y[t] > 0.0 {
                    if !at_lower(alpha[t]) {
                        let diff = gmax + grad[t];
                        if grad[t] >= gmax2 {
                            gmax2 = grad[t];
                        }
                        if diff > 0.0 {
                            let quad = qd[i] + qd[t] - 2.0 * y[i] * row_i[t];
                            let obj = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                            if obj <= obj_min {
                                j_sel = t;
                                obj_min = obj;
                            }
                        }
                    }
                } else if !at_upper(alpha[t], upper[t]) {
                    let diff = gmax - grad[t];
                    if -grad[t] >= gmax2 {
                        gmax2 = -grad[t];
                    }
                    if diff > 0.0 {
                        let quad = qd[i] + qd[t] + 2.0 * y[i] * row_i[t];
                        let obj = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                        if obj <= obj_min {
                            j_sel = t;
                            obj_min = obj;
                        }
                    }
                }
            }
        }
        gap = gmax + gmax2;
        if i_sel == usize::MAX || j_sel == usize::MAX || gap < eps {
            break;
        }
        iterations += 1;
        let (i, j) = (i_sel, j_sel);
        for (t, r) in row_j.iter_mut().enumerate() {
            *r = y[j] * y[t] * gram.get(j, t);
        }
        let (ci, cj) = (upper[i], upper[j]);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let mut quad = qd[i] + qd[j] + 2.0 * row_i[j];
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > ci - cj {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = ci - diff;
                }
            } else if alpha[j] > cj {
                alpha[j] = cj;
                alpha[i] = cj + diff;
            }
        } else {
            let mut quad = qd[i] + qd[j] - 2.0 * row_i[j];
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > ci {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = sum - ci;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > cj {
                if alpha[j] > cj {
                    alpha[j] = cj;
                    alpha[i] = sum - cj;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += row_i[t] * di + row_j[t] * dj;
        }
    }
    if iterations >= max_iter {
        log::warn!("SMO stopped at the iteration cap ({max_iter}) with gap {gap:.3e}");
    }

    let rho = {
        let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut sum_free, mut n_free) = (0.0, 0usize);
        for t in 0..n {
            let yg = y[t] * grad[t];
            if at_upper(alpha[t], upper[t]) {
                if y[t] < 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else if at_lower(alpha[t]) {
                if y[t] > 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                n_free += 1;
                sum_free += yg;
            }
        }
        if n_free > 0 {
            sum_free / n_free as f64
        } else {
            (ub + lb) / 2.0
        }
    };
    SmoSolution {
        alpha,
        rho,
        iterations,
        gap,
    }
}
