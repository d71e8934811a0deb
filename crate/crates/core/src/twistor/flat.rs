//! Global finite-difference check of `𝒥` on the flat model
//! `Z = R^n × Gr_2^+(R^r)`, where the horizontal distribution is the
//! product one and `𝒥(y, w) = φ(z(w)) ⊕ J_F(w)` in the coordinates
//! `(y, w)` of `R^n` and an exponential chart of the fibre.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::clifford::bivector_from_skew;
use crate::error::{Error, Result};
use crate::fibre::{nijenhuis_from_jet, ExpChart, FibrePoint};
use crate::repmat::{build_rep, CliffordRep};
use crate::scalar::Real;

/// Grid specification: the chart point of `z` plus `±spacing` along each
/// fibre axis and the selected base axes, with finite-difference step `h`
/// and `h/2`.
#[derive(Clone, Debug)]
pub struct FlatGrid<T: Real> {
    pub center: FibrePoint<T>,
    pub h: T,
    pub spacing: T,
    pub base_axes: Vec<usize>,
    /// Only evaluate at the central grid point.
    pub spot_check: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatCheckReport<T> {
    /// Largest Richardson-extrapolated `‖N(∂_y, ∂_w)‖`.
    pub mixed_residual: T,
    /// Largest `‖N‖` over fibre-fibre coordinate pairs.
    pub fibre_residual: T,
    /// Largest `‖N(∂_y, ∂_y')‖` (expected exactly 0).
    pub base_residual: T,
    /// `Σ ‖N(h)‖ / Σ ‖N(h/2)‖` over all pairs; first order gives 2.
    pub convergence_ratio: T,
    pub grid_points: usize,
    pub pairs: usize,
    pub warnings: Vec<String>,
}

struct FlatModel<'a, T: Real> {
    rep: &'a CliffordRep<T>,
    chart: ExpChart<T>,
    n: usize,
    d: usize,
}

impl<T: Real> FlatModel<'_, T> {
    /// `𝒥` at `(y, w)` in the order `[y; w]`.
    fn structure(&self, _y: &DVector<T>, w: &DVector<T>) -> Result<DMatrix<T>> {
        let z = bivector_from_skew(&self.chart.point(w))?;
        let mut m = DMatrix::zeros(self.n + self.d, self.n + self.d);
        m.view_mut((0, 0), (self.n, self.n)).copy_from(&self.rep.phi(&z)?);
        m.view_mut((self.n, self.n), (self.d, self.d)).copy_from(&self.chart.acs(w));
        Ok(m)
    }

    fn partials(&self, y: &DVector<T>, w: &DVector<T>, j0: &DMatrix<T>, h: T) -> Result<Vec<DMatrix<T>>> {
        let mut out = Vec::with_capacity(self.n + self.d);
        for l in 0..self.n + self.d {
            let (mut y1, mut w1) = (y.clone(), w.clone());
            if l < self.n {
                y1[l] += h;
            } else {
                w1[l - self.n] += h;
            }
            out.push((self.structure(&y1, &w1)? - j0) / h);
        }
        Ok(out)
    }
}

struct PointResult<T> {
    mixed: T,
    fibre: T,
    base: T,
    coarse_sum: T,
    fine_sum: T,
    pairs: usize,
}

fn basis<T: Real>(d: usize, k: usize) -> DVector<T> {
    let mut e = DVector::zeros(d);
    e[k] = T::one();
    e
}

/// Runs the check for `r`, `m` with `κ = 0`. Grid points are evaluated in
/// parallel; the reduction is a max/sum and independent of scheduling.
pub fn flat_model_global_check<T: Real>(rank: usize, multiplicity: usize, grid: &FlatGrid<T>) -> Result<FlatCheckReport<T>> {
    if grid.h <= T::zero() {
        return Err(Error::NonPositiveStep);
    }
    if grid.center.rank() != rank {
        return Err(Error::RankMismatch { left: grid.center.rank(), right: rank });
    }
    let mut warnings = Vec::new();
    if grid.h >= T::lit(1e-2) {
        warnings.push(format!("grid too coarse: h = {:e} ≥ 1e-2", grid.h.to_f64_lossy()));
    }
    let rep = build_rep::<T>(rank, multiplicity)?;
    let (chart, w0) = ExpChart::off_center(&grid.center)?;
    let n = rep.dim();
    let d = chart.dim();
    if let Some(&bad) = grid.base_axes.iter().find(|&&a| a >= n) {
        return Err(Error::IndexOutOfRange { index: bad, rank: n });
    }
    let model = FlatModel { rep: &rep, chart, n, d };

    let y0 = DVector::<T>::zeros(n);
    let mut points = vec![(y0.clone(), w0.clone())];
    if !grid.spot_check {
        for &a in &grid.base_axes {
            for sign in [-T::one(), T::one()] {
                let mut y = y0.clone();
                y[a] += sign * grid.spacing;
                points.push((y, w0.clone()));
            }
        }
        for k in 0..d {
            for sign in [-T::one(), T::one()] {
                let mut w = w0.clone();
                w[k] += sign * grid.spacing;
                points.push((y0.clone(), w));
            }
        }
    }

    let total = n + d;
    let results: Vec<Result<PointResult<T>>> = points
        .par_iter()
        .map(|(y, w)| {
            let j0 = model.structure(y, w)?;
            let coarse = model.partials(y, w, &j0, grid.h)?;
            let fine = model.partials(y, w, &j0, grid.h * T::lit(0.5))?;
            let extrap: Vec<DMatrix<T>> = fine.iter().zip(&coarse).map(|(f, c)| f * T::lit(2.0) - c).collect();
            let z = T::zero();
            let mut out = PointResult { mixed: z, fibre: z, base: z, coarse_sum: z, fine_sum: z, pairs: 0 };
            for i in 0..total {
                for j in i + 1..total {
                    let (u, v) = (basis::<T>(total, i), basis::<T>(total, j));
                    let value = nijenhuis_from_jet(&j0, &extrap, &u, &v).norm();
                    if j < n {
                        out.base = out.base.max(value);
                        continue;
                    }
                    out.coarse_sum += nijenhuis_from_jet(&j0, &coarse, &u, &v).norm();
                    out.fine_sum += nijenhuis_from_jet(&j0, &fine, &u, &v).norm();
                    out.pairs += 1;
                    if i < n {
                        out.mixed = out.mixed.max(value);
                    } else {
                        out.fibre = out.fibre.max(value);
                    }
                }
            }
            Ok(out)
        })
        .collect();

    let mut report = FlatCheckReport {
        mixed_residual: T::zero(),
        fibre_residual: T::zero(),
        base_residual: T::zero(),
        convergence_ratio: T::zero(),
        grid_points: points.len(),
        pairs: 0,
        warnings,
    };
    let (mut coarse, mut fine) = (T::zero(), T::zero());
    for r in results {
        let r = r?;
        report.mixed_residual = report.mixed_residual.max(r.mixed);
        report.fibre_residual = report.fibre_residual.max(r.fibre);
        report.base_residual = report.base_residual.max(r.base);
        coarse += r.coarse_sum;
        fine += r.fine_sum;
        report.pairs += r.pairs;
    }
    report.convergence_ratio = if fine > T::zero() { coarse / fine } else { T::zero() };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::stream;

    #[test]
    fn flat_rank_five_converges_at_first_order() {
        let center = FibrePoint::random(&mut stream(61, "flat"), 5).unwrap();
        let grid = FlatGrid { center, h: 1e-4, spacing: 0.05, base_axes: vec![0], spot_check: false };
        let report = flat_model_global_check::<f64>(5, 1, &grid).unwrap();
        assert_eq!(report.base_residual, 0.0);
        assert!(report.mixed_residual < 1e-4, "{report:?}");
        assert!(report.fibre_residual < 1e-4, "{report:?}");
        assert!((report.convergence_ratio - 2.0).abs() < 0.4, "{report:?}");
        assert!(report.warnings.is_empty());
        assert_eq!(report.grid_points, 1 + 2 + 12);
    }

    #[test]
    fn coarse_grid_warns() {
        let center = FibrePoint::axis(3, 1, 2).unwrap();
        let grid = FlatGrid { center, h: 2e-2, spacing: 0.05, base_axes: vec![], spot_check: true };
        let report = flat_model_global_check::<f64>(3, 1, &grid).unwrap();
        assert_eq!(report.warnings.len(), 1);
    }
}
