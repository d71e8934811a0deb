//! Integer real gamma matrices for `Cl_{0,k}`: `k` anticommuting matrices
//! with `γ_i^2 = -I`, of the minimal real dimension.
//!
//! * `k = 1`: the complex unit on `R^2`.
//! * `k = 2, 3`: left multiplication by `i, j, k` on the quaternions `R^4`.
//! * `k = 4..=7`: left multiplication by imaginary octonions on `R^8`.
//! * `k = 8`: the doubling `Z ⊗ L_a` (`a = 1..7`) together with `E ⊗ I_8`,
//!   where `Z = diag(1, -1)` and `E` is the complex unit.
//! * `k ≥ 9`: Bott periodicity `Cl_{0,k} = Cl_{0,k-8} ⊗ Cl_{0,8}`, with
//!   generators `Γ_a ⊗ I` and `Γ_9 ⊗ γ_i` where `Γ_9 = Γ_1 ⋯ Γ_8` squares
//!   to `+I` and anticommutes with every `Γ_a`.
//!
//! Every entry is `0` or `±1`, so all identities hold exactly.

use nalgebra::DMatrix;

pub type IntMatrix = DMatrix<i32>;

/// Cayley–Dickson triples `(a, b, c)` with `e_a e_b = e_c` (cyclic).
const OCTONION_TRIPLES: [(usize, usize, usize); 7] =
    [(1, 2, 3), (1, 4, 5), (1, 7, 6), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 6, 5)];

/// `e_a e_b = sign * e_c` in the octonions (index 0 is the unit).
fn octonion_product(a: usize, b: usize) -> (i32, usize) {
    if a == 0 {
        return (1, b);
    }
    if b == 0 {
        return (1, a);
    }
    if a == b {
        return (-1, 0);
    }
    for &(x, y, z) in &OCTONION_TRIPLES {
        let cyc = [(x, y, z), (y, z, x), (z, x, y)];
        for &(p, q, s) in &cyc {
            if (a, b) == (p, q) {
                return (1, s);
            }
            if (a, b) == (q, p) {
                return (-1, s);
            }
        }
    }
    unreachable!("octonion table covers every pair of distinct imaginary units")
}

/// Left multiplication by `e_a` on the span of the first `dim` basis units
/// (`dim = 4` is the quaternion subalgebra spanned by `1, e1, e2, e3`).
fn left_multiplication(a: usize, dim: usize) -> IntMatrix {
    let mut m = IntMatrix::zeros(dim, dim);
    for b in 0..dim {
        let (sign, c) = octonion_product(a, b);
        debug_assert!(c < dim);
        m[(c, b)] = sign;
    }
    m
}

fn complex_unit() -> IntMatrix {
    IntMatrix::from_row_slice(2, 2, &[0, -1, 1, 0])
}

fn kron(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    a.kronecker(b)
}

/// Generators of `Cl_{0,8}` on `R^16`.
fn cl08() -> Vec<IntMatrix> {
    let z = IntMatrix::from_row_slice(2, 2, &[1, 0, 0, -1]);
    let mut out: Vec<IntMatrix> = (1..=7).map(|a| kron(&z, &left_multiplication(a, 8))).collect();
    out.push(kron(&complex_unit(), &IntMatrix::identity(8, 8)));
    out
}

/// Gamma matrices for `Cl_{0,k}`, `k ≥ 1`.
pub fn gamma_matrices(k: usize) -> Vec<IntMatrix> {
    match k {
        0 => Vec::new(),
        1 => vec![complex_unit()],
        2 | 3 => (1..=k).map(|a| left_multiplication(a, 4)).collect(),
        4..=7 => (1..=k).map(|a| left_multiplication(a, 8)).collect(),
        8 => cl08(),
        _ => {
            let big = cl08();
            let chirality = big.iter().skip(1).fold(big[0].clone(), |acc, g| acc * g);
            let small = gamma_matrices(k - 8);
            let d = small.first().map_or(1, |g| g.nrows());
            let mut out: Vec<IntMatrix> = big.iter().map(|g| kron(g, &IntMatrix::identity(d, d))).collect();
            out.extend(small.iter().map(|g| kron(&chirality, g)));
            out
        }
    }
}

/// Real dimension of the irreducible `Cl_{0,k}` modules by Bott periodicity,
/// used as an independent cross-check of [`gamma_matrices`].
pub fn bott_dimension(k: usize) -> usize {
    const BASE: [usize; 8] = [1, 2, 4, 4, 8, 8, 8, 8];
    BASE[k % 8] * 16usize.pow((k / 8) as u32)
}
