#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use qubolin::encoding::EncodingSpec;
use qubolin::qubo::{build_sylvester_exact, build_vanilla, BuildOptions, LinearSystem, QuboModel};

pub fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// 3x + y = -1, -x + 2y = 5.
pub fn worked_system() -> LinearSystem {
    LinearSystem::from_rows(&[[3.0, 1.0], [-1.0, 2.0]], &[-1.0, 5.0]).unwrap()
}

/// D = (8/5, 98/125), R = [[2/5, -1/25], [0, 2/5]].
pub fn worked_pair() -> (Vec<BigRational>, Vec<Vec<BigRational>>) {
    (
        vec![frac(8, 5), frac(98, 125)],
        vec![vec![frac(2, 5), frac(-1, 25)], vec![frac(0, 1), frac(2, 5)]],
    )
}

pub fn worked_spec() -> EncodingSpec {
    EncodingSpec::signed_pair(0, 2, 2).unwrap()
}

pub fn worked_sylvester() -> QuboModel {
    let (d, r) = worked_pair();
    build_sylvester_exact(&worked_system(), &d, &r, &worked_spec(), &BuildOptions::default()).unwrap()
}

pub fn worked_vanilla() -> QuboModel {
    build_vanilla(&worked_system(), &worked_spec()).unwrap()
}

pub const Q_HAT: [[f64; 12]; 12] = [
    [8.0, 6.4, 12.8, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 19.2, 25.6, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 51.2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, -4.8, 6.4, 12.8, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, -6.4, 25.6, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -7.056, 3.136, 6.272, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -12.544, 12.544, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -18.816, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 8.624, 3.136, 6.272],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 18.816, 12.544],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 43.904],
];

pub const Q_HAT_PRIME: [[f64; 12]; 12] = [
    [26.0, 40.0, 80.0, -20.0, -40.0, -80.0, 2.0, 4.0, 8.0, -2.0, -4.0, -8.0],
    [0.0, 72.0, 160.0, -40.0, -80.0, -160.0, 4.0, 8.0, 16.0, -4.0, -8.0, -16.0],
    [0.0, 0.0, 224.0, -80.0, -160.0, -320.0, 8.0, 16.0, 32.0, -8.0, -16.0, -32.0],
    [0.0, 0.0, 0.0, -6.0, 40.0, 80.0, -2.0, -4.0, -8.0, 2.0, 4.0, 8.0],
    [0.0, 0.0, 0.0, 0.0, 8.0, 160.0, -4.0, -8.0, -16.0, 4.0, 8.0, 16.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 96.0, -8.0, -16.0, -32.0, 8.0, 16.0, 32.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -13.0, 20.0, 40.0, -10.0, -20.0, -40.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -16.0, 80.0, -20.0, -40.0, -80.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 8.0, -40.0, -80.0, -160.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 23.0, 20.0, 40.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 56.0, 80.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 152.0],
];

/// The seven patterns of `x₁ = −1` and six of `x₂ = 2` with digits 1, 2, 4.
pub const MINUS_ONE: [[u8; 6]; 7] = [
    [0, 0, 0, 1, 0, 0],
    [0, 1, 0, 1, 1, 0],
    [0, 0, 1, 1, 0, 1],
    [0, 1, 1, 1, 1, 1],
    [1, 0, 0, 0, 1, 0],
    [1, 0, 1, 0, 1, 1],
    [1, 1, 0, 0, 0, 1],
];
pub const TWO: [[u8; 6]; 6] = [
    [0, 0, 1, 0, 1, 0],
    [0, 1, 0, 0, 0, 0],
    [0, 1, 1, 0, 0, 1],
    [1, 0, 1, 1, 1, 0],
    [1, 1, 0, 1, 0, 0],
    [1, 1, 1, 1, 0, 1],
];

/// Compares every upper-triangular position with a dense reference; zero
/// positions must be absent from storage.
pub fn golden_mismatches(model: &QuboModel, want: &[[f64; 12]; 12]) -> Vec<String> {
    let mut bad = Vec::new();
    if model.n_qubits() != 12 {
        bad.push(format!("{} qubits", model.n_qubits()));
        return bad;
    }
    for i in 0..12 {
        for j in i..12 {
            let stored = model.coeffs().get(&(i, j));
            match (want[i][j], stored) {
                (0.0, None) => {}
                (w, Some(&v)) if w != 0.0 && (v - w).abs() <= 1e-9 => {}
                (w, s) => bad.push(format!("({}, {}): want {w}, stored {s:?}", i + 1, j + 1)),
            }
        }
    }
    for &(i, j) in model.coeffs().keys() {
        if i > j {
            bad.push(format!("lower-triangular key ({i}, {j})"));
        }
    }
    bad
}

/// The four test systems in 2, 3, 4 and 5 unknowns.
pub fn example_systems() -> Vec<(Vec<Vec<f64>>, Vec<f64>)> {
    vec![
        (vec![vec![3., 1.], vec![-1., 2.]], vec![-1., 5.]),
        (
            vec![vec![5., 0., 1.], vec![-1., 2., 1.], vec![3., 2., 3.]],
            vec![-65., -15., -80.],
        ),
        (
            vec![
                vec![5., 0., 1., 3.],
                vec![-1., 2., 1., 4.],
                vec![3., 2., 3., 5.],
                vec![6., 29., 30., -14.],
            ],
            vec![-65., -15., -80., -1.],
        ),
        (
            vec![
                vec![5., 0., 1., 3., 8.],
                vec![-1., 2., 1., 4., 5.],
                vec![3., 2., 3., 5., 26.],
                vec![6., 29., 30., -14., -1.],
                vec![5., 3., 4., -2., 65.],
            ],
            vec![-65., -15., -80., -1., 47.],
        ),
    ]
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

/// Row echelon form over the rationals; returns the reduced rows and rank.
fn echelon(mut m: Vec<Vec<BigRational>>) -> (Vec<Vec<BigRational>>, usize) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..rows {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &m[rank][c];
                for k in c..cols {
                    let v = &f * &m[rank][k];
                    m[r][k] -= v;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    (m, rank)
}

/// Exact rank of a matrix whose `f64` entries are taken at face value.
pub fn exact_rank(rows: &[Vec<f64>]) -> usize {
    echelon(rows.iter().map(|r| r.iter().map(|&x| exact(x)).collect()).collect()).1
}

/// Exact solution of a nonsingular square system by Gauss-Jordan elimination.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<BigRational> {
    let n = b.len();
    let aug: Vec<Vec<BigRational>> = (0..n)
        .map(|i| a[i].iter().map(|&x| exact(x)).chain([exact(b[i])]).collect())
        .collect();
    let (red, rank) = echelon(aug);
    assert_eq!(rank, n, "oracle system is singular");
    (0..n).map(|i| &red[i][n] / &red[i][i]).collect()
}

pub fn to_f64(v: &[BigRational]) -> Vec<f64> {
    use num_traits::ToPrimitive;
    v.iter().map(|x| x.to_f64().unwrap()).collect()
}

/// Largest `|a_i − b_i|`.
pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `‖Ax − b‖² − bᵀb` evaluated directly.
pub fn direct_objective(a: &[Vec<f64>], b: &[f64], x: &[f64]) -> f64 {
    let r2: f64 = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let ax: f64 = row.iter().zip(x).map(|(p, q)| p * q).sum();
            (ax - bi).powi(2)
        })
        .sum();
    r2 - b.iter().map(|v| v * v).sum::<f64>()
}

pub fn abs_max(v: &[BigRational]) -> BigRational {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(BigRational::zero)
}
