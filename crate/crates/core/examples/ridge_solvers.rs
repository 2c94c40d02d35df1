//! Closed-form ELM output weights in both regimes, plus a single-layer ELM
//! regressor on a toy curve.

use delm::elm::{solve_ridge, solve_ridge_overdetermined, solve_ridge_underdetermined, train_elm};
use delm::FeatureMatrix;
use nalgebra::DMatrix;

fn stationarity(h: &DMatrix<f64>, t: &DMatrix<f64>, b: &DMatrix<f64>, c: f64) -> f64 {
    (b - h.tr_mul(&(t - h * b)) * c).norm() / (1.0 + b.norm())
}

fn main() -> delm::Result<()> {
    let tall = DMatrix::from_fn(40, 6, |i, j| ((i * 13 + j * 7) % 17) as f64 / 17.0);
    let wide = tall.transpose();
    let t_tall = DMatrix::from_fn(40, 2, |i, j| ((i + 3 * j) % 5) as f64 / 5.0);
    let t_wide = DMatrix::from_fn(6, 2, |i, j| (i + j) as f64 / 8.0);

    for c in [1e-2, 1.0, 1e4] {
        let over = solve_ridge_overdetermined(&tall, &t_tall, c)?;
        let under = solve_ridge_underdetermined(&wide, &t_wide, c)?;
        println!(
            "C = {c:>8.0e}  overdetermined: {:?}, residual {:.1e}   underdetermined: {:?}, residual {:.1e}",
            over.diagnostics.method,
            stationarity(&tall, &t_tall, &over.matrix, c),
            under.diagnostics.method,
            stationarity(&wide, &t_wide, &under.matrix, c),
        );
    }

    // Both formulas describe the same minimizer; the dispatcher picks the smaller system.
    let square = DMatrix::from_fn(6, 6, |i, j| if i == j { 2.0 } else { 0.1 * (i + j) as f64 });
    let t = DMatrix::from_fn(6, 1, |i, _| i as f64);
    let a = solve_ridge_overdetermined(&square, &t, 10.0)?.matrix;
    let b = solve_ridge_underdetermined(&square, &t, 10.0)?.matrix;
    println!(
        "square system, |overdetermined - underdetermined| = {:.1e}",
        (a - b).amax()
    );
    let _ = solve_ridge(&square, &t, 10.0)?;

    // A 1-D regression with 50 random hidden nodes.
    let xs: Vec<f64> = (0..100).map(|i| i as f64 / 99.0).collect();
    let x = FeatureMatrix::new(DMatrix::from_row_slice(1, xs.len(), &xs))?;
    let y = DMatrix::from_row_slice(
        1,
        xs.len(),
        &xs.iter().map(|v| (6.0 * v).sin()).collect::<Vec<_>>(),
    );
    let elm = train_elm(&x, &y, 50, 1e8, 7)?;
    let fit = elm.predict(&x)?;
    let rmse = (fit.transpose() - &y).norm() / (xs.len() as f64).sqrt();
    println!("ELM fit of sin(6x) with 50 hidden nodes: RMSE {rmse:.2e}");
    Ok(())
}
