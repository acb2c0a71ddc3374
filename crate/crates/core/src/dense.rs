//! Dense statevector oracle for small stabilizer states.
//!
//! Qubit `q` is bit `q` of a basis index (little-endian). Everything here
//! works on explicit amplitude vectors and is meant to cross-check the
//! symbolic code, not to be fast.

use nalgebra::DMatrix;
pub use num_complex::Complex64;
use thiserror::Error;

use crate::pauli::PauliWord;
use crate::stabilizer::StabilizerGroup;

pub const MAX_DENSE_QUBITS: usize = 20;
const EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DenseError {
    #[error("{0} qubits exceed the dense limit of {MAX_DENSE_QUBITS}")]
    TooLarge(usize),
    #[error("group has {count} generators on {n} qubits; a state group is required")]
    NotStateGroup { count: usize, n: usize },
    #[error("projection annihilated every basis state")]
    Inconsistent,
}

pub type StateVector = Vec<Complex64>;

/// `w |psi>` for a word on `n` qubits.
pub fn apply_pauli(w: &PauliWord, psi: &[Complex64]) -> StateVector {
    let n = w.n();
    assert_eq!(psi.len(), 1 << n);
    let mut xmask = 0usize;
    let mut zmask = 0usize;
    for q in w.x_bits().iter_ones() {
        xmask |= 1 << q;
    }
    for q in w.z_bits().iter_ones() {
        zmask |= 1 << q;
    }
    let ycount = w.x_bits().and_count(w.z_bits());
    // i^ycount * sign, applied as X^x Z^z on each basis state
    let base = match (ycount + if w.is_negative() { 2 } else { 0 }) % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for (b, a) in psi.iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let phase = if (b & zmask).count_ones() % 2 == 1 { -base } else { base };
        out[b ^ xmask] += a * phase;
    }
    out
}

fn project(g: &StabilizerGroup, mut v: StateVector) -> StateVector {
    for w in g.generators() {
        let gv = apply_pauli(w, &v);
        for (a, b) in v.iter_mut().zip(gv) {
            *a = (*a + b) * 0.5;
        }
    }
    v
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn normalized(mut v: StateVector) -> StateVector {
    let s = norm(&v);
    for a in v.iter_mut() {
        *a /= s;
    }
    v
}

fn basis_state(n: usize, index: usize) -> StateVector {
    let mut v = vec![Complex64::new(0.0, 0.0); 1 << n];
    v[index] = Complex64::new(1.0, 0.0);
    v
}

/// Deterministic vector with generic amplitudes.
fn generic_vector(n: usize) -> StateVector {
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    (0..1usize << n)
        .map(|_| {
            state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^= z >> 31;
            let re = 0.5 + (z >> 40) as f64 / (1u64 << 24) as f64;
            let im = ((z & 0xff_ffff) as f64 / (1u64 << 24) as f64) - 0.5;
            Complex64::new(re, im)
        })
        .collect()
}

/// The state fixed by every generator, obtained by projecting the first basis
/// state (in index order) that survives the projection.
///
/// The seed index is located by projecting a generic vector once and taking
/// its first nonzero amplitude, which is the same index a linear scan finds.
pub fn dense_statevector(g: &StabilizerGroup) -> Result<StateVector, DenseError> {
    let n = g.n();
    if n > MAX_DENSE_QUBITS {
        return Err(DenseError::TooLarge(n));
    }
    if !g.is_state() {
        return Err(DenseError::NotStateGroup { count: g.len(), n });
    }
    let probe = project(g, generic_vector(n));
    let seed = match probe.iter().position(|a| a.norm() > EPS) {
        Some(k) => k,
        None => {
            (0..1usize << n).find(|&k| norm(&project(g, basis_state(n, k))) > EPS).ok_or(DenseError::Inconsistent)?
        }
    };
    let v = project(g, basis_state(n, seed));
    if norm(&v) <= EPS {
        return Err(DenseError::Inconsistent);
    }
    Ok(normalized(v))
}

/// Divides out the phase of the first amplitude above tolerance.
pub fn phase_normalized(v: &[Complex64]) -> StateVector {
    let Some(a) = v.iter().find(|a| a.norm() > EPS) else {
        return v.to_vec();
    };
    let phase = a / a.norm();
    v.iter().map(|b| b / phase).collect()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Equal up to one global phase, within `tol` per amplitude.
pub fn equal_up_to_phase(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    a.len() == b.len() && max_abs_diff(&phase_normalized(a), &phase_normalized(b)) <= tol
}

/// Embeds `parts` (each on the listed qubits, in order) into one vector on `n` qubits.
pub fn tensor_product(n: usize, parts: &[(Vec<usize>, StateVector)]) -> StateVector {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    let mut placed: Vec<usize> = Vec::new();
    for (qubits, v) in parts {
        assert_eq!(v.len(), 1 << qubits.len());
        let mut next = vec![Complex64::new(0.0, 0.0); out.len() * v.len()];
        for (i, a) in out.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            for (j, b) in v.iter().enumerate() {
                next[i | (j << placed.len())] = a * b;
            }
        }
        out = next;
        placed.extend(qubits.iter().copied());
    }
    assert_eq!(placed.len(), n, "parts must cover every qubit once");
    // out is indexed by position in `placed`; move to physical qubit order
    let mut result = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (i, a) in out.iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let mut b = 0usize;
        for (pos, &q) in placed.iter().enumerate() {
            if i >> pos & 1 == 1 {
                b |= 1 << q;
            }
        }
        result[b] = *a;
    }
    result
}

/// Von Neumann entropy (bits) of the reduced state on `region`.
pub fn reduced_entropy(psi: &[Complex64], n: usize, region: &[usize]) -> f64 {
    assert_eq!(psi.len(), 1 << n);
    let inside: Vec<usize> = region.to_vec();
    let outside: Vec<usize> = (0..n).filter(|q| !region.contains(q)).collect();
    let (keep, trace) = if inside.len() <= outside.len() { (inside, outside) } else { (outside, inside) };
    let dk = 1usize << keep.len();
    let dt = 1usize << trace.len();
    let index = |a: usize, b: usize| {
        let mut i = 0usize;
        for (k, &q) in keep.iter().enumerate() {
            i |= (a >> k & 1) << q;
        }
        for (k, &q) in trace.iter().enumerate() {
            i |= (b >> k & 1) << q;
        }
        i
    };
    let m = DMatrix::from_fn(dk, dt, |a, b| psi[index(a, b)]);
    let rho = &m * m.adjoint();
    let eig = rho.symmetric_eigen();
    eig.eigenvalues.iter().filter(|&&p| p > 1e-12).map(|&p| -p * p.log2()).sum()
}

/// Basis vector `|m>` of the N-qubit GHZ basis (bit `i` of `m` is `m_i`):
/// `2^(N/2) prod_i (1 + (-1)^m_i g_i)/2 |+..+0>` with `g_i = Z_i Z_{i+1}` for
/// `i < N` and `g_N = Z_N Z_1 X_1..X_N`.
pub fn ghz_basis_vector(n_chain: usize, m: usize) -> StateVector {
    let nq = n_chain;
    assert!(nq >= 2);
    let mut v: StateVector = vec![Complex64::new(0.0, 0.0); 1 << nq];
    let amp = Complex64::new(0.5f64.powf((nq - 1) as f64 / 2.0), 0.0);
    for (b, a) in v.iter_mut().enumerate() {
        if b >> (nq - 1) & 1 == 0 {
            *a = amp;
        }
    }
    for i in 0..nq {
        let gv =
            if i == nq - 1 { apply_wrap_link(nq, &v) } else { apply_pauli(&PauliWord::z_string(nq, [i, i + 1]), &v) };
        let flip = m >> i & 1 == 1;
        for (a, b) in v.iter_mut().zip(gv) {
            let b = if flip { -b } else { b };
            *a = (*a + b) * 0.5;
        }
    }
    let scale = 2f64.powf(nq as f64 / 2.0);
    v.iter().map(|a| a * scale).collect()
}

/// `Z_N Z_1 X_1..X_N` applied literally as an operator product (Z factors left).
fn apply_wrap_link(nq: usize, v: &[Complex64]) -> StateVector {
    let all = (1usize << nq) - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for (b, a) in v.iter().enumerate() {
        let t = b ^ all;
        let s = ((t & 1) ^ (t >> (nq - 1) & 1)) as i32;
        out[t] += if s == 1 { -a } else { *a };
    }
    out
}

/// Applies `U^dagger` of the GHZ basis change on `chain`: output amplitude at
/// basis index with chain bits `m` equals `<m_GHZ | psi>` on those qubits.
pub fn apply_ghz_change(psi: &[Complex64], n: usize, chain: &[usize]) -> StateVector {
    let nc = chain.len();
    let basis: Vec<Vec<(usize, Complex64)>> = (0..1usize << nc)
        .map(|m| ghz_basis_vector(nc, m).into_iter().enumerate().filter(|(_, a)| a.norm() > EPS).collect())
        .collect();
    let mut chain_mask = 0usize;
    for &q in chain {
        chain_mask |= 1 << q;
    }
    let spread = |local: usize| {
        let mut b = 0usize;
        for (k, &q) in chain.iter().enumerate() {
            b |= (local >> k & 1) << q;
        }
        b
    };
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for rest in 0..1usize << n {
        if rest & chain_mask != 0 {
            continue;
        }
        for (m, vec_m) in basis.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(b, a) in vec_m {
                acc += a.conj() * psi[rest | spread(b)];
            }
            out[rest | spread(m)] = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabilizer::make_group;

    fn w(s: &str, n: usize) -> PauliWord {
        PauliWord::parse(s, n).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn plus_z_is_zero_state() {
        let g = make_group(1, vec![w("+Z1", 1)]).unwrap();
        let v = dense_statevector(&g).unwrap();
        assert!(max_abs_diff(&v, &[c(1.0), c(0.0)]) < 1e-12);
    }

    #[test]
    fn minus_z_is_one_state() {
        let g = make_group(1, vec![w("-Z1", 1)]).unwrap();
        let v = dense_statevector(&g).unwrap();
        assert!(max_abs_diff(&v, &[c(0.0), c(1.0)]) < 1e-12);
    }

    #[test]
    fn bell_state() {
        let g = make_group(2, vec![w("+Z1Z2", 2), w("+X1X2", 2)]).unwrap();
        let v = dense_statevector(&g).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(max_abs_diff(&v, &[c(h), c(0.0), c(0.0), c(h)]) < 1e-12);
    }

    #[test]
    fn y_eigenstate_has_complex_amplitudes() {
        let g = make_group(1, vec![w("+Y1", 1)]).unwrap();
        let v = dense_statevector(&g).unwrap();
        let yv = apply_pauli(&w("+Y1", 1), &v);
        assert!(max_abs_diff(&v, &yv) < 1e-12);
        assert!(v[1].im.abs() > 0.5);
    }

    #[test]
    fn ghz_basis_is_orthonormal() {
        for nc in 2..=5 {
            let vs: Vec<StateVector> = (0..1usize << nc).map(|m| ghz_basis_vector(nc, m)).collect();
            for (i, a) in vs.iter().enumerate() {
                for (j, b) in vs.iter().enumerate() {
                    let ip: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - c(want)).norm() < 1e-12, "N={nc} <{i}|{j}> = {ip}");
                }
            }
        }
    }

    #[test]
    fn tensor_product_places_qubits() {
        let zero = vec![c(1.0), c(0.0)];
        let one = vec![c(0.0), c(1.0)];
        let v = tensor_product(2, &[(vec![1], one), (vec![0], zero)]);
        assert!(max_abs_diff(&v, &[c(0.0), c(0.0), c(1.0), c(0.0)]) < 1e-12);
    }

    #[test]
    fn bell_reduced_entropy() {
        let g = make_group(2, vec![w("+Z1Z2", 2), w("+X1X2", 2)]).unwrap();
        let v = dense_statevector(&g).unwrap();
        assert!((reduced_entropy(&v, 2, &[0]) - 1.0).abs() < 1e-9);
        assert!(reduced_entropy(&v, 2, &[]).abs() < 1e-9);
    }

    #[test]
    fn too_large_refused() {
        let gens = (0..21).map(|q| PauliWord::z_string(21, [q])).collect();
        let g = make_group(21, gens).unwrap();
        assert_eq!(dense_statevector(&g), Err(DenseError::TooLarge(21)));
    }
}
