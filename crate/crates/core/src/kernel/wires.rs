//! Multi-wire tensor operations on dense operators.
//!
//! Every operator carries a dimension vector. Indices follow the row-major
//! convention: wire 0 is the slowest index, so for dims `[d0, d1, d2]` the
//! basis state `|i0 i1 i2>` sits at `i0*d1*d2 + i1*d2 + i2`.

use alloc::vec;
use alloc::vec::Vec;

use super::{Matrix, Vector, C64};
use crate::{Error, Result};

/// Index bookkeeping for a split of the wires into a selected group and the rest.
///
/// `full[s * rest_dim + r]` is the full index whose selected sub-index is `s`
/// (selected wires in the order given) and whose remaining sub-index is `r`
/// (remaining wires in ascending order).
#[derive(Debug, Clone)]
pub(crate) struct WireSplit {
    pub sel_dim: usize,
    pub rest_dim: usize,
    full: Vec<usize>,
}

impl WireSplit {
    pub fn new(dims: &[usize], selected: &[usize]) -> Result<Self> {
        check_wires(dims, selected)?;
        let rest_wires: Vec<usize> = (0..dims.len()).filter(|w| !selected.contains(w)).collect();
        let strides = strides(dims);
        let sel_dims: Vec<usize> = selected.iter().map(|&w| dims[w]).collect();
        let rest_dims: Vec<usize> = rest_wires.iter().map(|&w| dims[w]).collect();
        let sel_dim: usize = sel_dims.iter().product();
        let rest_dim: usize = rest_dims.iter().product();

        let sel_offsets = offsets(&sel_dims, selected, &strides);
        let rest_offsets = offsets(&rest_dims, &rest_wires, &strides);
        let mut full = Vec::with_capacity(sel_dim * rest_dim);
        for s in &sel_offsets {
            for r in &rest_offsets {
                full.push(s + r);
            }
        }
        Ok(Self { sel_dim, rest_dim, full })
    }

    #[inline]
    pub fn index(&self, sel: usize, rest: usize) -> usize {
        self.full[sel * self.rest_dim + rest]
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for w in (0..dims.len().saturating_sub(1)).rev() {
        s[w] = s[w + 1] * dims[w + 1];
    }
    s
}

/// Flat offsets for every joint value of `wires`, enumerated with the first wire slowest.
fn offsets(sub_dims: &[usize], wires: &[usize], strides: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for (k, &w) in wires.iter().enumerate() {
        let mut next = Vec::with_capacity(out.len() * sub_dims[k]);
        for &o in &out {
            for i in 0..sub_dims[k] {
                next.push(o + i * strides[w]);
            }
        }
        out = next;
    }
    out
}

pub(crate) fn check_wires(dims: &[usize], wires: &[usize]) -> Result<()> {
    for (k, &w) in wires.iter().enumerate() {
        if w >= dims.len() {
            return Err(Error::WireOutOfRange { wire: w, n_wires: dims.len() });
        }
        if wires[..k].contains(&w) {
            return Err(Error::DuplicateWire(w));
        }
    }
    Ok(())
}

fn check_square(m: &Matrix, dims: &[usize]) -> Result<()> {
    let n: usize = dims.iter().product();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch(alloc::format!(
            "matrix is {}x{} but dims {:?} give {}",
            m.nrows(),
            m.ncols(),
            dims,
            n
        )));
    }
    Ok(())
}

/// Tensor product `a ⊗ b`; wires of `a` come first.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

/// Tensor product of state vectors.
pub fn kron_vec(a: &Vector, b: &Vector) -> Vector {
    a.kronecker(b)
}

/// Reduced operator on `keep`, in the order listed.
pub fn partial_trace(m: &Matrix, dims: &[usize], keep: &[usize]) -> Result<Matrix> {
    check_square(m, dims)?;
    let split = WireSplit::new(dims, keep)?;
    let mut out = Matrix::zeros(split.sel_dim, split.sel_dim);
    for r in 0..split.sel_dim {
        for c in 0..split.sel_dim {
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..split.rest_dim {
                acc += m[(split.index(r, t), split.index(c, t))];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Transpose on the wires in `part`, leaving the others untouched.
pub fn partial_transpose(m: &Matrix, dims: &[usize], part: &[usize]) -> Result<Matrix> {
    check_square(m, dims)?;
    let split = WireSplit::new(dims, part)?;
    let mut out = Matrix::zeros(m.nrows(), m.ncols());
    for s1 in 0..split.sel_dim {
        for s2 in 0..split.sel_dim {
            for r1 in 0..split.rest_dim {
                for r2 in 0..split.rest_dim {
                    out[(split.index(s1, r1), split.index(s2, r2))] =
                        m[(split.index(s2, r1), split.index(s1, r2))];
                }
            }
        }
    }
    Ok(out)
}

/// Reorder wires: wire `k` of the result is wire `order[k]` of the input.
pub fn permute_wires(m: &Matrix, dims: &[usize], order: &[usize]) -> Result<(Matrix, Vec<usize>)> {
    check_square(m, dims)?;
    if order.len() != dims.len() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "permutation of length {} for {} wires",
            order.len(),
            dims.len()
        )));
    }
    let split = WireSplit::new(dims, order)?;
    let n = split.sel_dim;
    let mut out = Matrix::zeros(n, n);
    for r in 0..n {
        let fr = split.index(r, 0);
        for c in 0..n {
            out[(r, c)] = m[(fr, split.index(c, 0))];
        }
    }
    let new_dims = order.iter().map(|&w| dims[w]).collect();
    Ok((out, new_dims))
}

/// Reorder the wires of a state vector, same convention as [`permute_wires`].
pub fn permute_vector(v: &Vector, dims: &[usize], order: &[usize]) -> Result<Vector> {
    if order.len() != dims.len() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "permutation of length {} for {} wires",
            order.len(),
            dims.len()
        )));
    }
    let split = WireSplit::new(dims, order)?;
    Ok(Vector::from_fn(split.sel_dim, |r, _| v[split.index(r, 0)]))
}

/// Conjugation `O m O†` with `op` acting on `wires`.
pub fn conjugate_on(m: &Matrix, dims: &[usize], op: &Matrix, wires: &[usize]) -> Result<Matrix> {
    let left = left_multiply_on(m, dims, op, wires)?;
    let split = WireSplit::new(dims, wires)?;
    let n = m.nrows();
    let mut out = Matrix::zeros(n, n);
    for row in 0..n {
        for cs in 0..split.sel_dim {
            for cr in 0..split.rest_dim {
                let mut acc = C64::new(0.0, 0.0);
                for b in 0..split.sel_dim {
                    acc += left[(row, split.index(b, cr))] * op[(cs, b)].conj();
                }
                out[(row, split.index(cs, cr))] = acc;
            }
        }
    }
    Ok(out)
}

/// Left multiplication `(O ⊗ 1) m` with `op` acting on `wires` of the row space.
pub fn left_multiply_on(m: &Matrix, dims: &[usize], op: &Matrix, wires: &[usize]) -> Result<Matrix> {
    check_square(m, dims)?;
    let split = WireSplit::new(dims, wires)?;
    if op.nrows() != split.sel_dim || op.ncols() != split.sel_dim {
        return Err(Error::DimensionMismatch(alloc::format!(
            "operator is {}x{} but wires {:?} span {}",
            op.nrows(),
            op.ncols(),
            wires,
            split.sel_dim
        )));
    }
    let n = m.nrows();
    let mut out = Matrix::zeros(n, n);
    for rs in 0..split.sel_dim {
        for rr in 0..split.rest_dim {
            let row = split.index(rs, rr);
            for a in 0..split.sel_dim {
                let coeff = op[(rs, a)];
                if coeff == C64::new(0.0, 0.0) {
                    continue;
                }
                let src = split.index(a, rr);
                for col in 0..n {
                    out[(row, col)] += coeff * m[(src, col)];
                }
            }
        }
    }
    Ok(out)
}

/// `(O ⊗ 1) v` with `op` acting on `wires`.
pub fn apply_to_vector(v: &Vector, dims: &[usize], op: &Matrix, wires: &[usize]) -> Result<Vector> {
    let n: usize = dims.iter().product();
    if v.len() != n {
        return Err(Error::DimensionMismatch(alloc::format!(
            "vector of length {} for dims {:?}",
            v.len(),
            dims
        )));
    }
    let split = WireSplit::new(dims, wires)?;
    if op.nrows() != split.sel_dim || op.ncols() != split.sel_dim {
        return Err(Error::DimensionMismatch(alloc::format!(
            "operator is {}x{} but wires {:?} span {}",
            op.nrows(),
            op.ncols(),
            wires,
            split.sel_dim
        )));
    }
    let mut out = Vector::zeros(n);
    for rr in 0..split.rest_dim {
        for rs in 0..split.sel_dim {
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..split.sel_dim {
                acc += op[(rs, a)] * v[split.index(a, rr)];
            }
            out[split.index(rs, rr)] = acc;
        }
    }
    Ok(out)
}

/// `(<bra| ⊗ 1) m (|bra> ⊗ 1)`: project `wires` onto a vector and drop them.
/// The result lives on the remaining wires in ascending order.
pub fn contract_wires(m: &Matrix, dims: &[usize], wires: &[usize], bra: &Vector) -> Result<Matrix> {
    check_square(m, dims)?;
    let split = WireSplit::new(dims, wires)?;
    if bra.len() != split.sel_dim {
        return Err(Error::DimensionMismatch(alloc::format!(
            "projection vector of length {} for wires spanning {}",
            bra.len(),
            split.sel_dim
        )));
    }
    // Contract rows first, then columns: cost rest^2 * sel + rest^2 * sel.
    let nz: Vec<(usize, C64)> =
        (0..split.sel_dim).filter(|&a| bra[a] != C64::new(0.0, 0.0)).map(|a| (a, bra[a])).collect();
    let n = m.nrows();
    let mut half = Matrix::zeros(split.rest_dim, n);
    for r in 0..split.rest_dim {
        for &(a, amp) in &nz {
            let src = split.index(a, r);
            let c = amp.conj();
            for col in 0..n {
                half[(r, col)] += c * m[(src, col)];
            }
        }
    }
    let mut out = Matrix::zeros(split.rest_dim, split.rest_dim);
    for r in 0..split.rest_dim {
        for c in 0..split.rest_dim {
            let mut acc = C64::new(0.0, 0.0);
            for &(b, amp) in &nz {
                acc += half[(r, split.index(b, c))] * amp;
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// `(<bra| ⊗ 1)|v>` for a state vector.
pub fn contract_vector(v: &Vector, dims: &[usize], wires: &[usize], bra: &Vector) -> Result<Vector> {
    let split = WireSplit::new(dims, wires)?;
    if bra.len() != split.sel_dim {
        return Err(Error::DimensionMismatch(alloc::format!(
            "projection vector of length {} for wires spanning {}",
            bra.len(),
            split.sel_dim
        )));
    }
    Ok(Vector::from_fn(split.rest_dim, |r, _| {
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..split.sel_dim {
            acc += bra[a].conj() * v[split.index(a, r)];
        }
        acc
    }))
}

/// Embed `op` acting on `wires` into the full space described by `dims`.
pub fn embed(op: &Matrix, wires: &[usize], dims: &[usize]) -> Result<Matrix> {
    let n: usize = dims.iter().product();
    left_multiply_on(&Matrix::identity(n, n), dims, op, wires)
}

/// Dimensions of the remaining wires after removing `removed`.
pub fn remaining_dims(dims: &[usize], removed: &[usize]) -> Vec<usize> {
    (0..dims.len()).filter(|w| !removed.contains(w)).map(|w| dims[w]).collect()
}
