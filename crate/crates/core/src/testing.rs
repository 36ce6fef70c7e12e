use crate::matrix::TransitionMatrix;

pub(crate) fn rows(r: &[&[f64]]) -> TransitionMatrix {
    TransitionMatrix::from_rows(r.iter().map(|row| row.to_vec()).collect()).unwrap()
}

pub(crate) fn example_p() -> TransitionMatrix {
    rows(&[
        &[0.425, 0.0, 0.075, 0.5],
        &[0.0, 0.55, 0.25, 0.2],
        &[0.3, 0.25, 0.45, 0.0],
        &[0.5, 0.05, 0.0, 0.45],
    ])
}

/// After scaling row 3 by 1/4.
pub(crate) fn example_p1() -> TransitionMatrix {
    rows(&[
        &[0.425, 0.0, 0.075, 0.5],
        &[0.0, 0.55, 0.25, 0.2],
        &[0.075, 0.0625, 0.8625, 0.0],
        &[0.5, 0.05, 0.0, 0.45],
    ])
}

/// After scaling column 2 of P^(1) by 4 and restoring the diagonal.
pub(crate) fn example_p3() -> TransitionMatrix {
    rows(&[
        &[0.425, 0.0, 0.075, 0.5],
        &[0.0, 0.55, 0.25, 0.2],
        &[0.075, 0.25, 0.675, 0.0],
        &[0.5, 0.2, 0.0, 0.3],
    ])
}

pub(crate) fn biased_cycle() -> TransitionMatrix {
    rows(&[&[0.0, 0.7, 0.3], &[0.3, 0.0, 0.7], &[0.7, 0.3, 0.0]])
}
