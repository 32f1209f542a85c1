use std::sync::Arc;

use mqdx::output::{read_table, write_correlations, write_no_pr, write_orbs};
use mqdx_core::analysis::correlations_x;
use mqdx_core::fock::{ConfigurationBasis, Statistics};
use mqdx_core::grid::Grid;
use mqdx_core::mctdh::{HamiltonianSpec, ManyBodyState};
use mqdx_core::model::{InteractionSpec, PotentialSpec};
use mqdx_core::solver::{initial_guess, GuessKind, Record};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(rng: &mut ChaCha8Rng, stats: Statistics, n: usize, m: usize) -> ManyBodyState {
    let grid = Grid::new(24, -5.0, 5.0).unwrap();
    let basis = Arc::new(ConfigurationBasis::new(stats, n, m).unwrap());
    let mut state = initial_guess(&grid, basis, GuessKind::Hand, rng.random()).unwrap();
    for c in state.coefficients.iter_mut() {
        *c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    state.normalize_coefficients();
    state
}

#[test]
fn no_pr_golden_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("NO_PR.out");
    let records = [
        Record {
            time: 0.0,
            occupations: vec![1.0],
            energy: 7.071067812008208,
        },
        Record {
            time: 20.0,
            occupations: vec![0.9826348708153463e-10, 0.3137224570732360e-7, 0.9936893501857101e-5, 0.3147304166934598e-2, 0.9968427274690541],
            energy: 7.038348415486683,
        },
    ];
    write_no_pr(&records, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "    0.00000000000000E+00    1.00000000000000E+00    7.07106781200821E+00"
    );
    let row = &read_table(&path).unwrap()[1];
    // M = 5: occupations ascending in columns 2..6, energy in column 7
    assert_eq!(row.len(), 7);
    assert!((row[6] - 7.038348415486683).abs() < 1e-14);
    assert!((row[5] - 0.9968427274690541).abs() < 1e-14);
    assert!(row[1..6].windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn orbs_columns() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let state = random_state(&mut rng, Statistics::Boson, 3, 2);
    let spec = HamiltonianSpec::new(PotentialSpec::harmonic(1.0), InteractionSpec::contact(1.0), 1.0).unwrap();
    let path = dir.path().join("20.0000000orbs.dat");
    write_orbs(&state, &spec, 20.0, &path).unwrap();
    let table = read_table(&path).unwrap();
    let grid = &state.grid;
    assert_eq!(table.len(), grid.n_points());
    let dx = grid.spacing();
    assert!((table.iter().map(|r| r[5]).sum::<f64>() * dx - 1.0).abs() < 1e-12);
    for (row, &x) in table.iter().zip(grid.points()) {
        assert_eq!(row.len(), 7 + 2 * 2);
        assert!((row[0] - x).abs() <= 1e-14 * x.abs());
        assert!(row[1..5].iter().all(|&v| v == 0.0));
        assert!((row[6] - 0.5 * x * x).abs() < 1e-14 * (1.0 + x * x));
    }
    // orbital columns reread to the stored values
    for (i, row) in table.iter().enumerate() {
        for (j, orb) in state.orbitals.iter().enumerate() {
            assert!((row[7 + 2 * j] - orb[i].re).abs() <= 1e-14);
            assert!((row[8 + 2 * j] - orb[i].im).abs() <= 1e-14);
        }
    }
}

/// The plotting expression `sqrt($8^2 + $9^2) / sqrt($7 * $10)` stays within
/// `[0, 1]` and equals one on the diagonal; `$11 / ($7 * $10)` is nonnegative,
/// vanishes on the fermion diagonal and is bounded by one for a single
/// determinant. Correlated fermions can exceed one off the diagonal.
#[test]
fn correlation_columns_support_the_plot_expressions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corr.dat");
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..100 {
        let stats = if case % 2 == 0 { Statistics::Fermion } else { Statistics::Boson };
        let n = rng.random_range(2..4);
        let m = rng.random_range(n..n + 3);
        let state = random_state(&mut rng, stats, n, m);
        write_correlations(&correlations_x(&state), f64::NEG_INFINITY, f64::INFINITY, &path).unwrap();
        let table = read_table(&path).unwrap();
        assert_eq!(table.len(), 24 * 24);
        for r in &table {
            assert_eq!(r.len(), 11);
            assert!(r[1] == 0.0 && r[2] == 0.0 && r[4] == 0.0 && r[5] == 0.0);
            let d = r[6] * r[9];
            if d <= 1e-20 {
                continue;
            }
            let g1 = r[7].hypot(r[8]) / d.sqrt();
            assert!((0.0..=1.0 + 1e-10).contains(&g1), "g1 = {g1}");
            if r[0] == r[3] {
                assert!((g1 - 1.0).abs() < 1e-10, "diagonal g1 = {g1}");
            }
            if stats == Statistics::Fermion {
                let g2 = r[10] / d;
                assert!(g2 >= -1e-10, "g2 = {g2}");
                if m == n {
                    assert!(g2 <= 1.0 + 1e-10, "determinant g2 = {g2}");
                }
                if r[0] == r[3] {
                    assert!(r[10].abs() < 1e-10, "Fermi hole {}", r[10]);
                }
            } else {
                assert!(r[10] >= -1e-10);
            }
        }
    }
}
