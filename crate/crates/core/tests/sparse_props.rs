use approx::assert_abs_diff_eq;
use inexact_uzawa::sparse::mtx::{read_matrix, read_vector, write_matrix, write_vector};
use inexact_uzawa::sparse::{dot, CsrMatrix};
use proptest::prelude::*;

fn matrix(max: usize) -> impl Strategy<Value = CsrMatrix> {
    (1..max, 1..max).prop_flat_map(|(r, c)| {
        proptest::collection::vec(prop_oneof![3 => Just(0.0), 2 => -5.0..5.0f64], r * c)
            .prop_map(move |d| CsrMatrix::from_dense(r, c, &d).unwrap())
    })
}

fn dense_matvec(m: &CsrMatrix, v: &[f64]) -> Vec<f64> {
    let d = m.to_dense();
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| d[i * m.cols() + j] * v[j]).sum())
        .collect()
}

proptest! {
    #[test]
    fn matvec_matches_dense(m in matrix(12), seed in 0u64..1000) {
        let v: Vec<f64> = (0..m.cols()).map(|k| ((k as u64 * 31 + seed) % 17) as f64 - 8.0).collect();
        let got = m.matvec(&v).unwrap();
        for (a, b) in got.iter().zip(dense_matvec(&m, &v)) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn transpose_is_adjoint(m in matrix(10)) {
        let x: Vec<f64> = (0..m.cols()).map(|k| (k as f64).sin()).collect();
        let y: Vec<f64> = (0..m.rows()).map(|k| (k as f64 * 0.7).cos()).collect();
        let lhs = dot(&m.matvec(&x).unwrap(), &y).unwrap();
        let rhs = dot(&x, &m.transpose().matvec(&y).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
        prop_assert_eq!(m.transpose().transpose(), m.clone());
        let direct = m.matvec_transpose(&y).unwrap();
        let via = m.transpose().matvec(&y).unwrap();
        for (a, b) in direct.iter().zip(via) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn kron_with_identity_is_block_diagonal(m in matrix(6), k in 1usize..4) {
        let id = CsrMatrix::identity(k);
        let blocks: Vec<&CsrMatrix> = (0..k).map(|_| &m).collect();
        prop_assert_eq!(id.kron(&m).unwrap(), CsrMatrix::block_diag(&blocks));
    }

    #[test]
    fn matrix_market_roundtrip(m in matrix(9)) {
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m, false).unwrap();
        let back = read_matrix(buf.as_slice()).unwrap();
        prop_assert_eq!(back.to_dense(), m.to_dense());
    }
}

#[test]
fn kron_mixed_product() {
    let a = CsrMatrix::tridiag(3, -1.0, 2.0, -1.0);
    let b = CsrMatrix::from_dense(2, 2, &[1.0, 2.0, 0.0, 3.0]).unwrap();
    let x = [1.0, -2.0, 0.5];
    let y = [2.0, 1.0];
    let kx: Vec<f64> = x
        .iter()
        .flat_map(|xi| y.iter().map(move |yj| xi * yj))
        .collect();
    let lhs = a.kron(&b).unwrap().matvec(&kx).unwrap();
    let ax = a.matvec(&x).unwrap();
    let by = b.matvec(&y).unwrap();
    let rhs: Vec<f64> = ax
        .iter()
        .flat_map(|u| by.iter().map(move |v| u * v))
        .collect();
    for (l, r) in lhs.iter().zip(rhs) {
        assert_abs_diff_eq!(*l, r, epsilon = 1e-14);
    }
}

#[test]
fn symmetric_matrix_market_stores_lower_triangle() {
    let m = CsrMatrix::tridiag(4, -1.0, 2.0, -1.0);
    let mut buf = Vec::new();
    write_matrix(&mut buf, &m, true).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("%%MatrixMarket matrix coordinate real symmetric"));
    assert_eq!(read_matrix(buf.as_slice()).unwrap(), m);
    let mut vbuf = Vec::new();
    write_vector(&mut vbuf, &[1.5, -2.0, 0.0]).unwrap();
    assert_eq!(read_vector(vbuf.as_slice()).unwrap(), vec![1.5, -2.0, 0.0]);
}
