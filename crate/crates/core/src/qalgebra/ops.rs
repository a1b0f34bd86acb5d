use super::{pow3, CMatrix, DensityMatrix, C64, LOCAL_DIM};
use crate::error::{Error, Result};

/// Kronecker product `a ⊗ b` with `a` acting on the leading subsystem.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() || !b.is_square() {
        return Err(Error::Dimension(format!(
            "tensor_product needs square inputs, got {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(a.kronecker(b))
}

/// Reduced state on the sites in `keep` (ascending order in the output).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let sites = rho.sites();
    let kept = validate_keep(keep, sites)?;
    let data = partial_trace_matrix(rho.data(), sites, &kept);
    Ok(DensityMatrix::from_parts(data, kept.len()))
}

pub(crate) fn validate_keep(keep: &[usize], sites: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::Sites("keep set is empty".into()));
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&s| s >= sites) {
        return Err(Error::Sites(format!("site {bad} out of range for {sites} sites")));
    }
    Ok(kept)
}

/// Offsets into the full product index contributed by every configuration
/// of `subset` (enumerated with the first listed site as the leading digit).
pub(crate) fn site_offsets(subset: &[usize], sites: usize) -> Vec<usize> {
    let strides: Vec<usize> = subset.iter().map(|&s| pow3(sites - 1 - s)).collect();
    let mut offsets = vec![0usize; pow3(subset.len())];
    for (n, off) in offsets.iter_mut().enumerate() {
        let mut rem = n;
        for &stride in strides.iter().rev() {
            *off += (rem % LOCAL_DIM) * stride;
            rem /= LOCAL_DIM;
        }
    }
    offsets
}

/// Partial trace of a raw `3^sites` square matrix; `kept` must be sorted and valid.
pub fn partial_trace_matrix(m: &CMatrix, sites: usize, kept: &[usize]) -> CMatrix {
    let traced: Vec<usize> = (0..sites).filter(|s| !kept.contains(s)).collect();
    let keep_off = site_offsets(kept, sites);
    let trace_off = site_offsets(&traced, sites);
    let dk = keep_off.len();
    let mut out = CMatrix::zeros(dk, dk);
    for (r, &kr) in keep_off.iter().enumerate() {
        for (cidx, &kc) in keep_off.iter().enumerate() {
            let mut acc = C64::from(0.0);
            for &t in &trace_off {
                acc += m[(kr + t, kc + t)];
            }
            out[(r, cidx)] = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalgebra::{c, StateVector};
    use nalgebra::DVector;

    fn singlet() -> StateVector {
        // (|+1,-1> - |0,0> + |-1,+1>)/sqrt3 ; local index 0:+1, 1:0, 2:-1
        let mut v = DVector::from_element(9, c(0.0, 0.0));
        let s = 1.0 / 3f64.sqrt();
        v[2] = c(s, 0.0);
        v[4] = c(-s, 0.0);
        v[6] = c(s, 0.0);
        StateVector::new(v).unwrap()
    }

    fn eye(n: usize) -> CMatrix {
        CMatrix::identity(n, n)
    }

    #[test]
    fn kron_identity() {
        assert_eq!(tensor_product(&eye(3), &eye(3)).unwrap(), eye(9));
    }

    #[test]
    fn kron_rank_one_projectors() {
        let mut a = CMatrix::zeros(3, 3);
        a[(0, 0)] = c(1.0, 0.0);
        let mut b = CMatrix::zeros(3, 3);
        b[(1, 1)] = c(1.0, 0.0);
        let k = tensor_product(&a, &b).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                let expect = if i == 1 && j == 1 { 1.0 } else { 0.0 };
                assert_eq!(k[(i, j)], c(expect, 0.0));
            }
        }
    }

    #[test]
    fn kron_rejects_non_square() {
        let a = CMatrix::zeros(2, 3);
        assert!(matches!(tensor_product(&a, &eye(3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn sz_on_leading_factor() {
        let sz = CMatrix::from_diagonal(&DVector::from_vec(vec![
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(-1.0, 0.0),
        ]));
        let op = tensor_product(&sz, &eye(3)).unwrap();
        // |+1> ⊗ |0> is product index 0*3 + 1
        let mut v = DVector::from_element(9, c(0.0, 0.0));
        v[1] = c(1.0, 0.0);
        let w = &op * &v;
        // explicit matvec oracle
        for i in 0..9 {
            let mut acc = c(0.0, 0.0);
            for j in 0..9 {
                acc += op[(i, j)] * v[j];
            }
            assert_eq!(w[i], acc);
        }
        assert_eq!(w, v);
    }

    #[test]
    fn singlet_marginals_are_maximally_mixed() {
        let rho = DensityMatrix::from_pure(&singlet());
        // brute-force oracle: trace out by explicit double loop over 9x9 entries
        for keep in [0usize, 1] {
            let mut oracle = CMatrix::zeros(3, 3);
            for i in 0..9 {
                for j in 0..9 {
                    let (ia, ib) = (i / 3, i % 3);
                    let (ja, jb) = (j / 3, j % 3);
                    if keep == 0 && ib == jb {
                        oracle[(ia, ja)] += rho.data()[(i, j)];
                    }
                    if keep == 1 && ia == ja {
                        oracle[(ib, jb)] += rho.data()[(i, j)];
                    }
                }
            }
            let red = partial_trace(&rho, &[keep]).unwrap();
            assert!((red.data() - &oracle).norm() < 1e-14);
            assert!((red.data() - eye(3) / c(3.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn product_factor_recovered() {
        let a = DensityMatrix::from_diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let b = DensityMatrix::maximally_mixed(1);
        let ab = a.tensor(&b);
        let red = partial_trace(&ab, &[0]).unwrap();
        assert!((red.data() - a.data()).norm() < 1e-15);
    }

    #[test]
    fn keep_all_is_identity() {
        let rho = DensityMatrix::from_pure(&singlet());
        assert_eq!(partial_trace(&rho, &[1, 0]).unwrap(), rho);
    }

    #[test]
    fn invalid_keep_sets() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(matches!(partial_trace(&rho, &[]), Err(Error::Sites(_))));
        assert!(matches!(partial_trace(&rho, &[2]), Err(Error::Sites(_))));
    }

    #[test]
    fn middle_site_of_three() {
        let a = DensityMatrix::from_diagonal(&[1.0, 0.0, 0.0]).unwrap();
        let b = DensityMatrix::from_diagonal(&[0.2, 0.3, 0.5]).unwrap();
        let abc = a.tensor(&b).tensor(&DensityMatrix::maximally_mixed(1));
        let red = partial_trace(&abc, &[1]).unwrap();
        assert!((red.data() - b.data()).norm() < 1e-15);
        let red02 = partial_trace(&abc, &[0, 2]).unwrap();
        let expect = a.tensor(&DensityMatrix::maximally_mixed(1));
        assert!((red02.data() - expect.data()).norm() < 1e-15);
    }
}
