mod support;

use msso_core::linalg::{C64, DenseMatrix, DenseVector};
use msso_core::model::{
    column_view, complex_sparse_as_msso, objective, profile_of, recovery_fraction, residual,
    retune, s_norm, solution_to_real_split, solution_to_real_stacked, to_real_split,
    to_real_stacked, MssoProblem, SolutionG, SparsityProfile,
};
use msso_core::Error;
use num_complex::Complex;
use rand::Rng;
use support::*;

fn random_real_problem(seed: u64, m: usize, n: usize, p: usize) -> MssoProblem {
    let mut r = rng(seed);
    let systems = (0..p).map(|_| random_real_matrix(&mut r, m, n)).collect();
    let d = random_real_vector(&mut r, m);
    MssoProblem::new(d, systems).unwrap()
}

fn random_complex_problem(seed: u64, m: usize, n: usize, p: usize) -> MssoProblem {
    let mut r = rng(seed);
    let systems = (0..p).map(|_| random_complex_matrix(&mut r, m, n)).collect();
    let d = random_complex_vector(&mut r, m);
    MssoProblem::new(d, systems).unwrap()
}

fn random_solution(seed: u64, n: usize, p: usize, complex: bool) -> SolutionG {
    let mut r = rng(seed);
    let mut g = SolutionG::zeros(n, p);
    for i in 0..n {
        for j in 0..p {
            let im = if complex { 2.0 * r.gen::<f64>() - 1.0 } else { 0.0 };
            g.row_mut(i)[j] = Complex::new(2.0 * r.gen::<f64>() - 1.0, im);
        }
    }
    g
}

fn real_mat(rows: usize, cols: usize, vals: &[f64]) -> DenseMatrix {
    DenseMatrix::from_vec(
        rows,
        cols,
        vals.iter().map(|&v| Complex::new(v, 0.0)).collect(),
    )
}

#[test]
fn problem_constructor_enforces_shapes() {
    let f1 = real_mat(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    let f2 = real_mat(3, 3, &[0.0; 9]);
    let d = DenseVector::from_real(&[1.0, 2.0]);
    assert!(MssoProblem::new(d.clone(), vec![f1.clone()]).is_ok());
    assert!(MssoProblem::new(d.clone(), vec![f1.clone(), f2]).is_err());
    assert!(MssoProblem::new(d, vec![]).is_err());
    assert!(MssoProblem::new(DenseVector::from_real(&[1.0]), vec![f1]).is_err());
}

#[test]
fn column_view_permutes_per_block() {
    let f1 = real_mat(2, 2, &[1.0, 2.0, 3.0, 4.0]);
    let f2 = real_mat(2, 2, &[5.0, 6.0, 7.0, 8.0]);
    let d = DenseVector::from_real(&[0.0, 0.0]);
    let p = MssoProblem::new(d, vec![f1, f2]).unwrap();
    let view = column_view(&p);
    let c1 = view.block(0);
    let c2 = view.block(1);
    for (got, want) in [
        (c1[(0, 0)], 1.0),
        (c1[(0, 1)], 5.0),
        (c1[(1, 0)], 3.0),
        (c1[(1, 1)], 7.0),
        (c2[(0, 0)], 2.0),
        (c2[(0, 1)], 6.0),
        (c2[(1, 0)], 4.0),
        (c2[(1, 1)], 8.0),
    ] {
        assert_eq!(got, Complex::new(want, 0.0));
    }
}

#[test]
fn column_view_round_trips_bit_exactly() {
    let p = random_complex_problem(501, 5, 4, 3);
    let view = column_view(&p);
    // P=1 collapse: each block is one column
    let p1 = random_complex_problem(502, 5, 4, 1);
    let v1 = column_view(&p1);
    for n in 0..4 {
        assert_eq!(v1.block(n).cols(), 1);
    }
    // rebuild every F_p entry from the blocks
    for q in 0..p.p() {
        let f = p.system(q);
        for n in 0..p.n() {
            for i in 0..p.m() {
                let a = f[(i, n)];
                let b = view.block(n)[(i, q)];
                assert_eq!(a.re.to_bits(), b.re.to_bits());
                assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
    }
}

#[test]
fn s_norm_hand_values() {
    let mut g = SolutionG::zeros(2, 2);
    g.row_mut(0)[0] = Complex::new(3.0, 0.0);
    g.row_mut(0)[1] = Complex::new(4.0, 0.0);
    assert!((s_norm(&g) - 5.0).abs() <= 1e-15);
    let mut id = SolutionG::zeros(2, 2);
    id.row_mut(0)[0] = Complex::new(1.0, 0.0);
    id.row_mut(1)[1] = Complex::new(1.0, 0.0);
    assert!((s_norm(&id) - 2.0).abs() <= 1e-15);
    assert_eq!(s_norm(&SolutionG::zeros(3, 2)), 0.0);
}

#[test]
fn s_norm_is_a_norm() {
    for seed in [511u64, 512, 513] {
        let a = random_solution(seed, 5, 3, true);
        let b = random_solution(seed + 50, 5, 3, true);
        let mut sum = SolutionG::zeros(5, 3);
        for n in 0..5 {
            for j in 0..3 {
                sum.row_mut(n)[j] = a.row(n)[j] + b.row(n)[j];
            }
        }
        assert!(s_norm(&sum) <= s_norm(&a) + s_norm(&b) + 1e-12);
        let mut scaled = SolutionG::zeros(5, 3);
        for n in 0..5 {
            for j in 0..3 {
                scaled.row_mut(n)[j] = a.row(n)[j] * (-2.5);
            }
        }
        assert!((s_norm(&scaled) - 2.5 * s_norm(&a)).abs() <= 1e-12);
        assert!(s_norm(&a) > 0.0);
    }
}

#[test]
fn residual_matches_the_stacked_form() {
    let p = random_complex_problem(521, 6, 4, 3);
    let g = random_solution(522, 4, 3, true);
    // G = 0 returns d itself
    let r0 = residual(&p, &SolutionG::zeros(4, 3)).unwrap();
    for (a, b) in r0.as_slice().iter().zip(p.d().as_slice()) {
        assert_eq!(a, b);
    }
    let r = residual(&p, &g).unwrap();
    let fg = p.f_tot().matvec(g.g_tot().as_slice());
    for (i, ri) in r.as_slice().iter().enumerate() {
        let want = p.d().as_slice()[i] - fg[i];
        assert!((ri - want).norm() <= 1e-12);
    }
    // identity system: residual of g = d is zero
    let eye = DenseMatrix::from_fn(3, 3, |i, j| {
        Complex::new(if i == j { 1.0 } else { 0.0 }, 0.0)
    });
    let d = DenseVector::from_real(&[1.0, -2.0, 0.5]);
    let pid = MssoProblem::new(d.clone(), vec![eye]).unwrap();
    let gid = SolutionG::from_g_tot(3, 1, d.as_slice());
    let rid = residual(&pid, &gid).unwrap();
    assert!(rid.as_slice().iter().all(|z| z.norm() <= 1e-15));

    let bad = SolutionG::zeros(3, 3);
    assert!(residual(&p, &bad).is_err());
}

#[test]
fn objective_recomposes_from_its_parts() {
    let p = random_complex_problem(531, 6, 4, 3);
    let g = random_solution(532, 4, 3, true);
    let o = objective(&p, &g, 1.0).unwrap();
    let r = residual(&p, &g).unwrap();
    let rn = r.norm2();
    let want = 0.5 * rn * rn + s_norm(&g);
    assert!((o - want).abs() <= 1e-12 * (1.0 + want));

    let o0 = objective(&p, &SolutionG::zeros(4, 3), 0.7).unwrap();
    let dn = p.d().norm2();
    assert!((o0 - 0.5 * dn * dn).abs() <= 1e-12 * (1.0 + o0));

    // objective via the column view agrees with the row view
    let view = column_view(&p);
    let ch = view.stacked().matvec(g.h_tot().as_slice());
    let mut rr = 0.0;
    for (di, ci) in p.d().as_slice().iter().zip(&ch) {
        rr += (di - ci).norm_sqr();
    }
    let col_obj = 0.5 * rr + 1.0 * s_norm(&g);
    assert!((o - col_obj).abs() <= 1e-12 * (1.0 + o));
}

#[test]
fn profile_of_ranks_row_energies() {
    let mut g = SolutionG::zeros(4, 1);
    g.row_mut(1)[0] = Complex::new(5.0, 0.0);
    g.row_mut(3)[0] = Complex::new(1.0, 0.0);
    assert_eq!(profile_of(&g, 2).indices(), &[2, 4]);
    assert!(profile_of(&SolutionG::zeros(4, 1), 3).is_empty());
    let mut tie = SolutionG::zeros(3, 1);
    tie.row_mut(0)[0] = Complex::new(1.0, 0.0);
    tie.row_mut(1)[0] = Complex::new(-1.0, 0.0);
    assert_eq!(profile_of(&tie, 1).indices(), &[1]);
}

#[test]
fn recovery_fraction_counts_overlap() {
    let truth = SparsityProfile::new(vec![1, 2, 9]);
    let est = SparsityProfile::new(vec![2, 7, 8]);
    assert!((recovery_fraction(&truth, &est).unwrap() - 1.0 / 3.0).abs() <= 1e-15);
    let none = SparsityProfile::new(vec![7, 8]);
    assert_eq!(recovery_fraction(&truth, &none).unwrap(), 0.0);
    assert_eq!(recovery_fraction(&truth, &truth).unwrap(), 1.0);
    assert_eq!(
        recovery_fraction(&SparsityProfile::empty(), &truth).unwrap_err(),
        Error::EmptyProfile
    );
}

#[test]
fn retune_full_profile_zeroes_an_invertible_residual() {
    // stacked 2x2 from a single-system 2-block problem
    let f = real_mat(2, 2, &[2.0, 1.0, 1.0, 3.0]);
    let d = DenseVector::from_real(&[1.0, 2.0]);
    let p = MssoProblem::new(d, vec![f]).unwrap();
    let g = retune(&p, &SparsityProfile::new(vec![1, 2])).unwrap();
    let r = residual(&p, &g).unwrap();
    assert!(r.norm2() <= 1e-12);
}

#[test]
fn retune_orthonormal_single_block_projects() {
    // F_1 columns orthonormal: retune on {n} is the projection coefficient
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let f = real_mat(2, 2, &[s, s, s, -s]);
    let d = DenseVector::from_real(&[1.0, 0.5]);
    let p = MssoProblem::new(d.clone(), vec![f.clone()]).unwrap();
    let g = retune(&p, &SparsityProfile::new(vec![2])).unwrap();
    let want = f[(0, 1)].conj() * d.as_slice()[0] + f[(1, 1)].conj() * d.as_slice()[1];
    assert!((g.matrix()[(1, 0)] - want).norm() <= 1e-12);
    assert_eq!(g.matrix()[(0, 0)], Complex::new(0.0, 0.0));
}

#[test]
fn retune_matches_a_dense_least_squares_oracle() {
    let p = random_complex_problem(541, 5, 6, 2);
    let profile = SparsityProfile::new(vec![2, 5]);
    let g = retune(&p, &profile).unwrap();
    for n in 0..6 {
        if !profile.contains(n + 1) {
            for j in 0..2 {
                assert_eq!(g.matrix()[(n, j)], Complex::new(0.0, 0.0));
            }
        }
    }
    // oracle: normal-equation solve on the chosen column blocks
    let view = column_view(&p);
    let sub = DenseMatrix::from_fn(5, 4, |i, j| {
        let blk = view.block(if j < 2 { 1 } else { 4 });
        blk[(i, j % 2)]
    });
    let x = normal_equation_solve(&sub, p.d(), 0.0);
    let fit = sub.matvec(&x);
    let mut oracle_res = 0.0f64;
    for (di, fi) in p.d().as_slice().iter().zip(&fit) {
        oracle_res += (di - fi).norm_sqr();
    }
    let r = residual(&p, &g).unwrap();
    let got = r.norm2() * r.norm2();
    assert!((got - oracle_res).abs() <= 1e-10 * (1.0 + oracle_res));
}

#[test]
fn retune_never_beats_zeroing_rows_outside_the_profile() {
    let p = random_complex_problem(551, 6, 5, 2);
    let profile = SparsityProfile::new(vec![1, 4]);
    let tuned = retune(&p, &profile).unwrap();
    let rt = residual(&p, &tuned).unwrap().norm2();
    for seed in [552u64, 553] {
        let mut masked = random_solution(seed, 5, 2, true);
        for n in 0..5 {
            if !profile.contains(n + 1) {
                for j in 0..2 {
                    masked.row_mut(n)[j] = Complex::new(0.0, 0.0);
                }
            }
        }
        let rm = residual(&p, &masked).unwrap().norm2();
        assert!(rt <= rm + 1e-12);
    }
}

#[test]
fn stacking_reduction_hand_values() {
    // d = [1+2i] -> [1, 2]; C_n = [i] -> [[0,-1],[1,0]]
    let f = DenseMatrix::from_vec(1, 1, vec![Complex::new(0.0, 1.0)]);
    let d = DenseVector::from_vec(vec![Complex::new(1.0, 2.0)]);
    let p = MssoProblem::new(d, vec![f]).unwrap();
    let rp = to_real_stacked(&p);
    assert!(rp.is_real());
    assert_eq!(rp.m(), 2);
    assert_eq!(rp.p(), 2);
    assert_eq!(rp.d().as_slice()[0], Complex::new(1.0, 0.0));
    assert_eq!(rp.d().as_slice()[1], Complex::new(2.0, 0.0));
    let view = column_view(&rp);
    let c = view.block(0);
    assert_eq!(c[(0, 0)], Complex::new(0.0, 0.0));
    assert_eq!(c[(0, 1)], Complex::new(-1.0, 0.0));
    assert_eq!(c[(1, 0)], Complex::new(1.0, 0.0));
    assert_eq!(c[(1, 1)], Complex::new(0.0, 0.0));
}

#[test]
fn stacking_reduction_preserves_the_objective() {
    for seed in [561u64, 562] {
        let p = random_complex_problem(seed, 5, 4, 3);
        let rp = to_real_stacked(&p);
        let g = random_solution(seed + 20, 4, 3, true);
        let rg = solution_to_real_stacked(&g);
        let lambda = 0.3;
        let a = objective(&p, &g, lambda).unwrap();
        let b = objective(&rp, &rg, lambda).unwrap();
        assert!((a - b).abs() <= 1e-12 * (1.0 + a), "{a} vs {b}");
    }
}

#[test]
fn splitting_reduction_hand_values() {
    // F_p = [1+i] -> F^(A) = [1;1], F^(B) = [-1;1]
    let f = DenseMatrix::from_vec(1, 1, vec![Complex::new(1.0, 1.0)]);
    let d = DenseVector::from_vec(vec![Complex::new(0.0, 0.0)]);
    let p = MssoProblem::new(d, vec![f]).unwrap();
    let sp = to_real_split(&p);
    assert!(sp.is_real());
    assert_eq!(sp.p(), 2);
    assert_eq!(sp.m(), 2);
    let fa = sp.system(0);
    let fb = sp.system(1);
    assert_eq!(fa[(0, 0)], Complex::new(1.0, 0.0));
    assert_eq!(fa[(1, 0)], Complex::new(1.0, 0.0));
    assert_eq!(fb[(0, 0)], Complex::new(-1.0, 0.0));
    assert_eq!(fb[(1, 0)], Complex::new(1.0, 0.0));

    // real input: F^(A) = [F;0], F^(B) = [0;F]
    let fr = real_mat(1, 1, &[2.0]);
    let dr = DenseVector::from_real(&[0.0]);
    let pr = MssoProblem::new(dr, vec![fr]).unwrap();
    let spr = to_real_split(&pr);
    assert_eq!(spr.system(0)[(0, 0)], Complex::new(2.0, 0.0));
    assert_eq!(spr.system(0)[(1, 0)], Complex::new(0.0, 0.0));
    assert_eq!(spr.system(1)[(0, 0)], Complex::new(0.0, 0.0));
    assert_eq!(spr.system(1)[(1, 0)], Complex::new(2.0, 0.0));
}

#[test]
fn splitting_reduction_preserves_the_objective() {
    for seed in [571u64, 572] {
        let p = random_complex_problem(seed, 5, 4, 2);
        let sp = to_real_split(&p);
        let g = random_solution(seed + 20, 4, 2, true);
        let sg = solution_to_real_split(&g);
        let lambda = 0.25;
        let a = objective(&p, &g, lambda).unwrap();
        let b = objective(&sp, &sg, lambda).unwrap();
        assert!((a - b).abs() <= 1e-12 * (1.0 + a), "{a} vs {b}");
    }
}

#[test]
fn complex_single_system_becomes_two_real_unknowns() {
    // split rows carry the complex moduli: g = [3+4i, 0] -> row norms [5, 0]
    let f = DenseMatrix::from_fn(2, 2, |i, j| {
        Complex::new((i + j) as f64, if i == j { 1.0 } else { 0.0 })
    });
    let mut g = SolutionG::zeros(2, 1);
    g.row_mut(0)[0] = Complex::new(3.0, 4.0);
    let d = DenseVector::from_vec(f.matvec(g.g_tot().as_slice()));
    let p2 = complex_sparse_as_msso(&f, &d).unwrap();
    assert!(p2.is_real());
    assert_eq!(p2.p(), 2);
    let sg = solution_to_real_split(&g);
    assert!((sg.row_norm(0) - 5.0).abs() <= 1e-12);
    assert_eq!(sg.row_norm(1), 0.0);
    let l1: f64 = (0..2).map(|n| g.row(n)[0].norm()).sum();
    assert!((s_norm(&sg) - l1).abs() <= 1e-12);

    // paired objectives agree
    let ssso = MssoProblem::new(d, vec![f]).unwrap();
    let a = objective(&ssso, &g, 0.4).unwrap();
    let b = objective(&p2, &sg, 0.4).unwrap();
    assert!((a - b).abs() <= 1e-12 * (1.0 + a));
}

#[test]
fn sparsity_profile_normalizes_its_input() {
    let p = SparsityProfile::new(vec![4, 1, 4, 2]);
    assert_eq!(p.indices(), &[1, 2, 4]);
    assert!(p.contains(2) && !p.contains(3));
    let z = SparsityProfile::from_zero_based([0usize, 3]);
    assert_eq!(z.indices(), &[1, 4]);
    assert_eq!(z.zero_based().collect::<Vec<_>>(), vec![0, 3]);
}
