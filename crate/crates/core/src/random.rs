//! Random operators and states for sampling and property checks.

use rand::Rng;

use crate::mat::{kron, BipartiteShape, ComplexMatrix, C64};

/// Matrix with independent entries uniform in `[-1, 1] + i[-1, 1]`.
pub fn random_complex<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut R) -> ComplexMatrix {
    random_complex(dim, rng).hermitian_part().scale_real(scale)
}

/// Full-rank density matrix `G G† / Tr[G G†]`.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_complex(dim, rng);
    let rho = &g * &g.dagger();
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr).hermitian_part()
}

pub fn random_product_state<R: Rng + ?Sized>(shape: BipartiteShape, rng: &mut R) -> ComplexMatrix {
    let a = random_density_matrix(shape.d_a, rng);
    let b = random_density_matrix(shape.d_b, rng);
    kron(&a, &b)
}

/// Random unitary from the Gram-Schmidt orthonormalization of a random matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_complex(dim, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        for u in &cols {
            let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= proj * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in v.iter_mut() {
            *x /= norm;
        }
        cols.push(v);
    }
    ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
}
