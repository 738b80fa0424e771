use crate::scalar::Real;

/// Euclidean projection of `v` onto the probability simplex, in place.
///
/// Sort-and-threshold method: find the largest `rho` with
/// `v_(rho) - (sum_{i<=rho} v_(i) - 1) / rho > 0` and shift by that threshold.
pub fn project_to_simplex<T: Real>(v: &mut [T]) {
    let k = v.len();
    if k == 0 {
        return;
    }
    let mut sorted: Vec<T> = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cumsum = T::zero();
    let mut theta = T::zero();
    for (i, &s) in sorted.iter().enumerate() {
        cumsum = cumsum + s;
        let t = (cumsum - T::one()) / T::from_usize(i + 1).unwrap();
        if s - t > T::zero() {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(T::zero());
    }
}
