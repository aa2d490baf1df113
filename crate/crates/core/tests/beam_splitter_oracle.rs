//! Independent check of the sparse beam-splitter expansion against a dense
//! two-mode matrix exponential.
//!
//! The splitter with transmissivity t and reflection phase theta acts on
//! creation operators as
//!   a+ -> sqrt(t) a+ + i sqrt(1-t) e^{i theta} b+,
//!   b+ -> i sqrt(1-t) e^{-i theta} a+ + sqrt(t) b+,
//! which is generated by U = exp(i psi (e^{-i theta} a+ b + e^{i theta} a b+))
//! with psi = acos(sqrt(t)). This file builds U by explicit scaling-and-
//! squaring of the dense generator — sharing no code with the sparse
//! implementation — and compares amplitudes.

use num_complex::Complex64;

use holesim::{FockState, ModeLabel};

const DIM_PER_MODE: usize = 9; // occupations 0..=8
const DIM: usize = DIM_PER_MODE * DIM_PER_MODE;

type Matrix = Vec<Vec<Complex64>>;

fn zeros() -> Matrix {
    vec![vec![Complex64::new(0.0, 0.0); DIM]; DIM]
}

fn idx(m: usize, n: usize) -> usize {
    m * DIM_PER_MODE + n
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let mut c = zeros();
    for i in 0..DIM {
        for k in 0..DIM {
            let aik = a[i][k];
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..DIM {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

/// exp(M) by scaling and squaring with a Taylor series on the scaled matrix.
fn expm(m: &Matrix) -> Matrix {
    let norm: f64 = m
        .iter()
        .map(|row| row.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = norm.log2().ceil().max(0.0) as u32 + 1;
    let scale = 0.5f64.powi(squarings as i32);
    let mut scaled = zeros();
    for i in 0..DIM {
        for j in 0..DIM {
            scaled[i][j] = m[i][j] * scale;
        }
    }
    // Taylor sum: with the scaled norm <= 1/2, 24 terms reach ~1e-26.
    let mut result = zeros();
    let mut term = zeros();
    for i in 0..DIM {
        result[i][i] = Complex64::new(1.0, 0.0);
        term[i][i] = Complex64::new(1.0, 0.0);
    }
    for k in 1..=24 {
        term = matmul(&term, &scaled);
        let factor = 1.0 / k as f64;
        for row in term.iter_mut() {
            for x in row.iter_mut() {
                *x *= factor;
            }
        }
        for i in 0..DIM {
            for j in 0..DIM {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

/// Dense unitary of the beam splitter on the two-mode occupation basis.
fn dense_unitary(t: f64, theta: f64) -> Matrix {
    let psi = t.sqrt().acos();
    let fwd = Complex64::from_polar(psi, -theta); // psi * e^{-i theta}
    let back = Complex64::from_polar(psi, theta);
    // i * (fwd * a+ b + back * a b+), with a+ b |m,n> =
    // sqrt((m+1) n) |m+1, n-1> and a b+ |m,n> = sqrt(m (n+1)) |m-1, n+1>.
    let mut gen = zeros();
    for m in 0..DIM_PER_MODE {
        for n in 0..DIM_PER_MODE {
            let col = idx(m, n);
            if n >= 1 && m + 1 < DIM_PER_MODE {
                let amp = ((m as f64 + 1.0) * n as f64).sqrt();
                gen[idx(m + 1, n - 1)][col] += Complex64::i() * fwd * amp;
            }
            if m >= 1 && n + 1 < DIM_PER_MODE {
                let amp = (m as f64 * (n as f64 + 1.0)).sqrt();
                gen[idx(m - 1, n + 1)][col] += Complex64::i() * back * amp;
            }
        }
    }
    expm(&gen)
}

fn assert_unitary(u: &Matrix) {
    for i in 0..DIM {
        for j in 0..DIM {
            let mut dot = Complex64::new(0.0, 0.0);
            for k in 0..DIM {
                dot += u[k][i].conj() * u[k][j];
            }
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!(
                (dot - expect).norm() < 1e-12,
                "oracle unitarity violated at ({i},{j}): {dot}"
            );
        }
    }
}

#[test]
fn oracle_self_checks() {
    let t = 0.37;
    let theta = 1.1;
    let u = dense_unitary(t, theta);
    assert_unitary(&u);
    // Single-photon column equals the defining mode map.
    let col = idx(1, 0);
    let trans = u[idx(1, 0)][col];
    let refl = u[idx(0, 1)][col];
    assert!((trans - Complex64::new(t.sqrt(), 0.0)).norm() < 1e-13);
    let expect = Complex64::i() * Complex64::from_polar((1.0 - t).sqrt(), theta);
    assert!((refl - expect).norm() < 1e-13);
    // All other entries of that column vanish.
    for (row, entries) in u.iter().enumerate() {
        if row != idx(1, 0) && row != idx(0, 1) {
            assert!(entries[col].norm() < 1e-13);
        }
    }
}

#[test]
fn sparse_expansion_matches_dense_exponential_on_all_basis_states() {
    let a = ModeLabel::new("a", 0);
    let b = ModeLabel::new("b", 0);
    let truncation = 7;
    for &t in &[0.0, 0.15, 0.5, 0.85, 1.0] {
        for &theta in &[0.0, 0.7, std::f64::consts::FRAC_PI_2, std::f64::consts::PI, 4.2] {
            let u = dense_unitary(t, theta);
            for m in 0..=4u32 {
                for n in 0..=(4 - m) {
                    let mut st = FockState::from_amplitudes(
                        vec![a.clone(), b.clone()],
                        truncation,
                        &[(vec![m, n], Complex64::new(1.0, 0.0))],
                    )
                    .unwrap();
                    st.apply_beam_splitter(&a, &b, t, theta).unwrap();
                    let col = idx(m as usize, n as usize);
                    for p in 0..=(m + n) {
                        let q = m + n - p;
                        let got = st.amplitude(&[p, q]);
                        let want = u[idx(p as usize, q as usize)][col];
                        assert!(
                            (got - want).norm() < 1e-10,
                            "t={t} theta={theta} |{m},{n}> -> |{p},{q}>: got {got}, oracle {want}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn sparse_expansion_matches_dense_exponential_on_a_superposition() {
    let a = ModeLabel::new("a", 0);
    let b = ModeLabel::new("b", 0);
    let truncation = 7;
    // A fixed, irregular superposition over totals 0..=4.
    let terms: Vec<(Vec<u32>, Complex64)> = vec![
        (vec![0, 0], Complex64::new(0.40, -0.10)),
        (vec![1, 0], Complex64::new(-0.25, 0.33)),
        (vec![0, 2], Complex64::new(0.17, 0.52)),
        (vec![2, 1], Complex64::new(-0.31, -0.22)),
        (vec![1, 3], Complex64::new(0.05, 0.29)),
        (vec![4, 0], Complex64::new(0.21, 0.11)),
    ];
    let (t, theta) = (0.63, 2.4);
    let u = dense_unitary(t, theta);

    let mut dense_in = vec![Complex64::new(0.0, 0.0); DIM];
    for (occ, amp) in &terms {
        dense_in[idx(occ[0] as usize, occ[1] as usize)] = *amp;
    }
    let mut dense_out = vec![Complex64::new(0.0, 0.0); DIM];
    for (i, row) in u.iter().enumerate() {
        for (j, &uij) in row.iter().enumerate() {
            dense_out[i] += uij * dense_in[j];
        }
    }

    let mut st =
        FockState::from_amplitudes(vec![a.clone(), b.clone()], truncation, &terms).unwrap();
    st.apply_beam_splitter(&a, &b, t, theta).unwrap();
    for p in 0..=7u32 {
        for q in 0..=(7 - p) {
            let got = st.amplitude(&[p, q]);
            let want = dense_out[idx(p as usize, q as usize)];
            assert!(
                (got - want).norm() < 1e-10,
                "superposition |{p},{q}>: got {got}, oracle {want}"
            );
        }
    }
}
