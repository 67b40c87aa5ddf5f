//! Square complex matrices stored as separate real and imaginary planes,
//! and the two kernels behind `A ρ A†`: a row-combination product from
//! the left and a diagonal-storage product with `A†` from the right.

use num_complex::Complex64;

use crate::qops::{ComplexMatrix, SparseMatrix};

#[derive(Clone, Debug)]
pub(crate) struct Planes {
    d: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

#[inline(always)]
fn caxpy(o_re: &mut [f64], o_im: &mut [f64], a: Complex64, x_re: &[f64], x_im: &[f64]) {
    let n = o_re.len();
    let (o_im, x_re, x_im) = (&mut o_im[..n], &x_re[..n], &x_im[..n]);
    for k in 0..n {
        o_re[k] += a.re * x_re[k] - a.im * x_im[k];
        o_im[k] += a.re * x_im[k] + a.im * x_re[k];
    }
}

/// `o += s * x ⊙ conj(c)` elementwise.
#[inline(always)]
fn conj_hadamard_acc(o_re: &mut [f64], o_im: &mut [f64], s: f64, x_re: &[f64], x_im: &[f64], c_re: &[f64], c_im: &[f64]) {
    let n = o_re.len();
    let (o_im, x_re, x_im, c_re, c_im) = (&mut o_im[..n], &x_re[..n], &x_im[..n], &c_re[..n], &c_im[..n]);
    for k in 0..n {
        o_re[k] += s * (x_re[k] * c_re[k] + x_im[k] * c_im[k]);
        o_im[k] += s * (x_im[k] * c_re[k] - x_re[k] * c_im[k]);
    }
}

impl Planes {
    pub(crate) fn zeros(d: usize) -> Self {
        Self {
            d,
            re: vec![0.0; d * d],
            im: vec![0.0; d * d],
        }
    }

    pub(crate) fn from_fn(d: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut p = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let v = f(i, j);
                p.re[i * d + j] = v.re;
                p.im[i * d + j] = v.im;
            }
        }
        p
    }

    pub(crate) fn load(&mut self, m: &ComplexMatrix) {
        for ((r, i), v) in self.re.iter_mut().zip(self.im.iter_mut()).zip(m.as_slice()) {
            *r = v.re;
            *i = v.im;
        }
    }

    pub(crate) fn clear(&mut self) {
        self.re.fill(0.0);
        self.im.fill(0.0);
    }

    #[cfg(test)]
    pub(crate) fn get(&self, k: usize) -> Complex64 {
        Complex64::new(self.re[k], self.im[k])
    }

    pub(crate) fn trace_re(&self) -> f64 {
        (0..self.d).map(|i| self.re[i * self.d + i]).sum()
    }

    /// Writes `scale * (self ⊙ phase)` from the upper triangle of `self`
    /// into `out` and mirrors it into the lower triangle.
    pub(crate) fn hermitian_fill(&self, phase: &Planes, scale: f64, out: &mut [Complex64]) {
        let d = self.d;
        for i in 0..d {
            let r = i * d + i..(i + 1) * d;
            let (a_re, a_im) = (&self.re[r.clone()], &self.im[r.clone()]);
            let (p_re, p_im) = (&phase.re[r.clone()], &phase.im[r.clone()]);
            let row = &mut out[r];
            for k in 0..row.len() {
                let re = scale * (a_re[k] * p_re[k] - a_im[k] * p_im[k]);
                let im = scale * (a_re[k] * p_im[k] + a_im[k] * p_re[k]);
                row[k] = Complex64::new(re, im);
            }
            row[0].im = 0.0;
        }
        for i in 1..d {
            let (upper, lower) = out.split_at_mut(i * d);
            for (dst, src) in lower[..i].iter_mut().zip(upper[i..].iter().step_by(d)) {
                *dst = src.conj();
            }
        }
    }
}

/// `A` in diagonal storage, `diag_o[j] = A[j, j + o]`, tied to the CSR
/// pattern it was built from so values can be refreshed cheaply.
#[derive(Clone, Debug)]
pub(crate) struct Diagonals {
    d: usize,
    offsets: Vec<isize>,
    /// For each offset, `(j, p)` pairs: row `j` holds CSR entry `p`.
    slots: Vec<Vec<(usize, usize)>>,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
    /// Row `i` of `A ρ` is needed from this column on.
    col_start: Vec<usize>,
}

impl Diagonals {
    pub(crate) fn new(a: &SparseMatrix) -> Self {
        let d = a.rows();
        let (rp, ci) = (a.row_ptr(), a.col_idx());
        let mut offsets: Vec<isize> = Vec::new();
        for i in 0..d {
            for &c in &ci[rp[i]..rp[i + 1]] {
                let o = c as isize - i as isize;
                if !offsets.contains(&o) {
                    offsets.push(o);
                }
            }
        }
        offsets.sort_unstable();
        let mut slots = vec![Vec::new(); offsets.len()];
        for i in 0..d {
            for p in rp[i]..rp[i + 1] {
                let o = ci[p] as isize - i as isize;
                let k = offsets.binary_search(&o).expect("offset collected above");
                slots[k].push((i, p));
            }
        }
        let o_min = offsets.first().copied().unwrap_or(0);
        let col_start = (0..d).map(|i| (i as isize + o_min).max(0) as usize).collect();
        let mut out = Self {
            d,
            re: vec![vec![0.0; d]; offsets.len()],
            im: vec![vec![0.0; d]; offsets.len()],
            offsets,
            slots,
            col_start,
        };
        out.set_values(a.values());
        out
    }

    pub(crate) fn set_values(&mut self, values: &[Complex64]) {
        for (k, slots) in self.slots.iter().enumerate() {
            for &(j, p) in slots {
                self.re[k][j] = values[p].re;
                self.im[k][j] = values[p].im;
            }
        }
    }

    /// `out[i, j] = (A src)[i, j]` for `j >= col_start[i]`, using the CSR
    /// pattern of `a` with entries `values`.
    pub(crate) fn left_product(&self, a: &SparseMatrix, values: &[Complex64], src: &Planes, out: &mut Planes) {
        let d = self.d;
        let (rp, ci) = (a.row_ptr(), a.col_idx());
        for i in 0..d {
            let c0 = self.col_start[i];
            let row = i * d + c0..(i + 1) * d;
            let (o_re, o_im) = (&mut out.re[row.clone()], &mut out.im[row]);
            o_re.fill(0.0);
            o_im.fill(0.0);
            for p in rp[i]..rp[i + 1] {
                let r = ci[p] * d + c0..(ci[p] + 1) * d;
                caxpy(o_re, o_im, values[p], &src.re[r.clone()], &src.im[r]);
            }
        }
    }

    /// `out[i, j] += scale (S A†)[i, j]` for `j >= i`, where `S` holds
    /// valid entries from `col_start` on (see [`Self::left_product`]).
    pub(crate) fn right_adjoint_upper(&self, scale: f64, s: &Planes, out: &mut Planes) {
        let d = self.d as isize;
        for (k, &o) in self.offsets.iter().enumerate() {
            let (c_re, c_im) = (&self.re[k], &self.im[k]);
            for i in 0..d {
                // j >= i and 0 <= j + o < d.
                let j0 = i.max(-o);
                let j1 = d.min(d - o);
                if j0 >= j1 {
                    continue;
                }
                let (j0u, j1u) = (j0 as usize, j1 as usize);
                let base = (i * d) as usize;
                let src = (base as isize + j0 + o) as usize..(base as isize + j1 + o) as usize;
                let dst = base + j0u..base + j1u;
                let (o_re, o_im) = (&mut out.re[dst.clone()], &mut out.im[dst]);
                conj_hadamard_acc(
                    o_re,
                    o_im,
                    scale,
                    &s.re[src.clone()],
                    &s.im[src],
                    &c_re[j0u..j1u],
                    &c_im[j0u..j1u],
                );
            }
        }
    }
}
