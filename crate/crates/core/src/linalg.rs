use nalgebra::DMatrix;

use crate::model::C64;

pub type CMatrix = DMatrix<C64>;

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_diff(&(m.adjoint() * m), &CMatrix::identity(m.nrows(), m.ncols())) < tol
}

/// Largest entry-wise modulus of `a − b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn pauli(c: char) -> Option<CMatrix> {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let m = match c {
        'I' => [o, z, z, o],
        'X' => [z, o, o, z],
        'Y' => [z, -i, i, z],
        'Z' => [o, z, z, -o],
        _ => return None,
    };
    Some(CMatrix::from_row_slice(2, 2, &m))
}

/// Number of qubits spanned by a 2^k-dimensional square matrix.
pub fn qubits_of(m: &CMatrix) -> Option<usize> {
    let d = m.nrows();
    (m.is_square() && d.is_power_of_two()).then(|| d.trailing_zeros() as usize)
}
