//! Exponential chart on the fibre and finite-difference geometry in it.
//!
//! Centered at a point `o` with adapted frame `f`, the chart is
//! `ψ(w) = E(w) S_o E(w)^T` with `E(w) = exp(S_{c(w)})` and `c(w)` the
//! bivector `o·v(w)` of [`fibre_acs`](super::fibre_acs). The curves
//! `t ↦ ψ(t w)` are geodesics of the symmetric metric, so these are normal
//! coordinates at `o`. Tangent vectors are handled as their lexicographic
//! bivector coordinates (the lower triangle of the skew matrix), on which
//! the unit-scale metric is the Euclidean inner product.

use nalgebra::{DMatrix, DVector};

use super::{fibre_acs, FibreMetric, FibrePoint, FibreTangent};
use crate::error::{Error, Result};
use crate::linalg::exp_with_derivative;
use crate::scalar::Real;

/// The exponential chart centered at a fibre point.
#[derive(Clone, Debug)]
pub struct ExpChart<T: Real> {
    center: FibrePoint<T>,
    s0: DMatrix<T>,
    generators: Vec<DMatrix<T>>,
}

/// Chart data at one coordinate point.
#[derive(Clone, Debug)]
pub struct ChartJet<T: Real> {
    /// `ψ(w)` as a skew matrix.
    pub point: DMatrix<T>,
    /// Columns are `∂_k ψ(w)` in bivector coordinates.
    pub tangent: DMatrix<T>,
}

fn lower_triangle<T: Real>(s: &DMatrix<T>) -> DVector<T> {
    let r = s.nrows();
    let mut out = DVector::zeros(r * (r - 1) / 2);
    let mut k = 0;
    for i in 0..r {
        for j in i + 1..r {
            out[k] = s[(j, i)];
            k += 1;
        }
    }
    out
}

fn from_lower_triangle<T: Real>(r: usize, v: &DVector<T>) -> DMatrix<T> {
    let mut s = DMatrix::zeros(r, r);
    let mut k = 0;
    for i in 0..r {
        for j in i + 1..r {
            s[(j, i)] = v[k];
            s[(i, j)] = -v[k];
            k += 1;
        }
    }
    s
}

impl<T: Real> ExpChart<T> {
    pub fn new(center: FibrePoint<T>) -> Result<Self> {
        let d = center.tangent_dim();
        let s0 = crate::clifford::skew_matrix(center.bivector())?;
        let mut generators = Vec::with_capacity(d);
        for k in 0..d {
            let mut e = DVector::zeros(d);
            e[k] = T::one();
            generators.push(fibre_acs(&FibreTangent::from_coordinates(e)?).to_skew(&center)?);
        }
        Ok(ExpChart { center, s0, generators })
    }

    pub fn center(&self) -> &FibrePoint<T> {
        &self.center
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    fn generator(&self, w: &DVector<T>) -> DMatrix<T> {
        let r = self.s0.nrows();
        let mut c = DMatrix::zeros(r, r);
        for (g, x) in self.generators.iter().zip(w.iter()) {
            c += g * *x;
        }
        c
    }

    /// `ψ(w)` as a skew matrix.
    pub fn point(&self, w: &DVector<T>) -> DMatrix<T> {
        let e = self.generator(w).exp();
        &e * &self.s0 * e.transpose()
    }

    pub fn jet(&self, w: &DVector<T>) -> ChartJet<T> {
        let c = self.generator(w);
        let p = self.s0.nrows() * (self.s0.nrows() - 1) / 2;
        let mut tangent = DMatrix::zeros(p, self.dim());
        let mut point = None;
        for (k, g) in self.generators.iter().enumerate() {
            let (e, de) = exp_with_derivative(&c, g);
            let left = &de * &self.s0 * e.transpose();
            let d_psi = &left - left.transpose();
            tangent.set_column(k, &lower_triangle(&d_psi));
            point.get_or_insert_with(|| &e * &self.s0 * e.transpose());
        }
        ChartJet { point: point.unwrap_or_else(|| self.s0.clone()), tangent }
    }

    /// Metric matrix `scale · T^T T`.
    pub fn metric(&self, w: &DVector<T>, metric: &FibreMetric<T>) -> DMatrix<T> {
        let t = self.jet(w).tangent;
        t.transpose() * t * metric.scale
    }

    /// Matrix of the complex structure `B ↦ [S_ψ, B]` in chart coordinates,
    /// `J[(k, i)] = J^k_i`.
    pub fn acs(&self, w: &DVector<T>) -> DMatrix<T> {
        let jet = self.jet(w);
        let r = self.s0.nrows();
        let d = self.dim();
        let mut image = DMatrix::zeros(jet.tangent.nrows(), d);
        for k in 0..d {
            let b = from_lower_triangle(r, &jet.tangent.column(k).into_owned());
            let jb = &jet.point * &b - &b * &jet.point;
            image.set_column(k, &lower_triangle(&jb));
        }
        solve_normal(&jet.tangent, &image)
    }

    /// Chart coordinates of a tangent vector at `ψ(w)` given as a skew matrix.
    pub fn pull_back(&self, w: &DVector<T>, s: &DMatrix<T>) -> DVector<T> {
        let t = self.jet(w).tangent;
        solve_normal(&t, &DMatrix::from_column_slice(t.nrows(), 1, lower_triangle(s).as_slice())).column(0).into_owned()
    }

    /// Skew matrix of the chart vector `x` at `ψ(w)`.
    pub fn push_forward(&self, w: &DVector<T>, x: &DVector<T>) -> DMatrix<T> {
        let t = self.jet(w).tangent;
        from_lower_triangle(self.s0.nrows(), &(t * x))
    }

    /// A chart centered near `z` in which `z` sits at `w0 ≠ 0`, so that
    /// derivatives of the structure at `z` are not forced to vanish.
    pub fn off_center(z: &FibrePoint<T>) -> Result<(Self, DVector<T>)> {
        let d = z.tangent_dim();
        let amplitude = T::lit(0.3) / T::from_usize(d).unwrap().sqrt();
        let offset = DVector::from_fn(d, |k, _| if k % 3 == 1 { -amplitude } else { amplitude });
        let offset = FibreTangent::from_coordinates(offset)?;
        let x = fibre_acs(&offset).to_skew(z)?;
        let f = x.clone().exp() * z.frame();
        let center = FibrePoint::from_vectors(&f.column(0).into_owned(), &f.column(1).into_owned())?;
        // The one-parameter group through z is also one through the center,
        // so z = ψ(w0) with c(w0) = -X.
        let back = FibreTangent::from_skew(&center, &(-x), T::lit(1e-9))?;
        let w0 = -fibre_acs(&back).coordinates();
        let chart = ExpChart::new(center)?;
        Ok((chart, w0))
    }
}

/// Least-squares solve `T x = y` by the normal equations.
fn solve_normal<T: Real>(t: &DMatrix<T>, y: &DMatrix<T>) -> DMatrix<T> {
    let gram = t.transpose() * t;
    let rhs = t.transpose() * y;
    gram.cholesky().expect("chart Jacobian has full column rank").solve(&rhs)
}

fn unit<T: Real>(d: usize, k: usize, h: T) -> DVector<T> {
    let mut e = DVector::zeros(d);
    e[k] = h;
    e
}

/// `N(u, v)` from `J` and its partials `dJ[l] = ∂_l J`:
/// `(∂_{Ju}J)v - (∂_{Jv}J)u + J(∂_vJ)u - J(∂_uJ)v`.
pub(crate) fn nijenhuis_from_jet<T: Real>(
    j: &DMatrix<T>,
    dj: &[DMatrix<T>],
    u: &DVector<T>,
    v: &DVector<T>,
) -> DVector<T> {
    let directional = |a: &DVector<T>| {
        let mut out = DMatrix::zeros(j.nrows(), j.ncols());
        for (m, c) in dj.iter().zip(a.iter()) {
            out += m * *c;
        }
        out
    };
    let (ju, jv) = (j * u, j * v);
    directional(&ju) * v - directional(&jv) * u + j * (directional(v) * u - directional(u) * v)
}

/// Finite-difference Nijenhuis values at one step size and its half, and
/// the first-order Richardson combination `2 N(h/2) - N(h)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NijenhuisEstimate<T> {
    pub coarse: T,
    pub fine: T,
    pub extrapolated: T,
}

fn forward_partials<T: Real>(f: &dyn Fn(&DVector<T>) -> DMatrix<T>, w0: &DVector<T>, j0: &DMatrix<T>, h: T) -> Vec<DMatrix<T>> {
    (0..w0.len()).map(|l| (f(&(w0 + unit(w0.len(), l, h))) - j0) / h).collect()
}

/// Nijenhuis tensor of `fibre_acs` on `u, v` at `z`, by forward
/// differences of the chart matrix of `J` with step `h` and `h/2`.
/// Norms are taken in adapted coordinates at `z`.
pub fn fibre_nijenhuis_estimate<T: Real>(
    z: &FibrePoint<T>,
    u: &FibreTangent<T>,
    v: &FibreTangent<T>,
    h: T,
) -> Result<NijenhuisEstimate<T>> {
    if h <= T::zero() {
        return Err(Error::NonPositiveStep);
    }
    let (chart, w0) = ExpChart::off_center(z)?;
    let cu = chart.pull_back(&w0, &u.to_skew(z)?);
    let cv = chart.pull_back(&w0, &v.to_skew(z)?);
    let acs = |w: &DVector<T>| chart.acs(w);
    let j0 = acs(&w0);
    let coarse_d = forward_partials(&acs, &w0, &j0, h);
    let fine_d = forward_partials(&acs, &w0, &j0, h * T::lit(0.5));
    let extrap_d: Vec<DMatrix<T>> = fine_d.iter().zip(&coarse_d).map(|(f, c)| f * T::lit(2.0) - c).collect();
    let norm_at_z = |n: DVector<T>| -> Result<T> {
        let s = chart.push_forward(&w0, &n);
        Ok(FibreTangent::from_skew(z, &s, T::lit(1e-6))?.coordinates().norm())
    };
    Ok(NijenhuisEstimate {
        coarse: norm_at_z(nijenhuis_from_jet(&j0, &coarse_d, &cu, &cv))?,
        fine: norm_at_z(nijenhuis_from_jet(&j0, &fine_d, &cu, &cv))?,
        extrapolated: norm_at_z(nijenhuis_from_jet(&j0, &extrap_d, &cu, &cv))?,
    })
}

/// Richardson-extrapolated Nijenhuis residual `‖N(u, v)‖` at `z`.
pub fn fibre_nijenhuis<T: Real>(z: &FibrePoint<T>, u: &FibreTangent<T>, v: &FibreTangent<T>, h: T) -> Result<T> {
    Ok(fibre_nijenhuis_estimate(z, u, v, h)?.extrapolated)
}

/// `max |dω(∂_i, ∂_j, ∂_k)|` for the Kähler form `ω = J^T g` at `z`, by
/// central differences with step `h` in an off-center chart.
pub fn kaehler_form_defect<T: Real>(z: &FibrePoint<T>, metric: &FibreMetric<T>, h: T) -> Result<T> {
    if h <= T::zero() {
        return Err(Error::NonPositiveStep);
    }
    let (chart, w0) = ExpChart::off_center(z)?;
    let d = chart.dim();
    let omega = |w: &DVector<T>| chart.acs(w).transpose() * chart.metric(w, metric);
    let partials: Vec<DMatrix<T>> = (0..d)
        .map(|l| {
            let e = unit(d, l, h);
            (omega(&(&w0 + &e)) - omega(&(&w0 - &e))) / (h + h)
        })
        .collect();
    let mut worst = T::zero();
    for i in 0..d {
        for j in i + 1..d {
            for k in j + 1..d {
                let v = partials[i][(j, k)] + partials[j][(k, i)] + partials[k][(i, j)];
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// `(max |∂g(0)|, max |∂J(0)|)` at the chart center by central differences;
/// both vanish in normal coordinates of a Kähler metric.
pub fn normal_chart_first_derivatives<T: Real>(z: &FibrePoint<T>, metric: &FibreMetric<T>, h: T) -> Result<(T, T)> {
    if h <= T::zero() {
        return Err(Error::NonPositiveStep);
    }
    let chart = ExpChart::new(z.clone())?;
    let d = chart.dim();
    let mut dg = T::zero();
    let mut dj = T::zero();
    for l in 0..d {
        let e = unit(d, l, h);
        let m = -e.clone();
        let g = (chart.metric(&e, metric) - chart.metric(&m, metric)) / (h + h);
        let j = (chart.acs(&e) - chart.acs(&m)) / (h + h);
        dg = dg.max(g.amax());
        dj = dj.max(j.amax());
    }
    Ok((dg, dj))
}

/// Ricci tensor at the chart center from central second differences of the
/// metric in normal coordinates:
/// `R_abcd = ½(g_ad,bc + g_bc,ad - g_ac,bd - g_bd,ac)`, `Ric_bd = g^ac R_abcd`.
#[allow(clippy::needless_range_loop)]
pub fn ricci_in_chart<T: Real>(z: &FibrePoint<T>, metric: &FibreMetric<T>, h: T) -> Result<(DMatrix<T>, DMatrix<T>)> {
    if h <= T::zero() {
        return Err(Error::NonPositiveStep);
    }
    let chart = ExpChart::new(z.clone())?;
    let d = chart.dim();
    let zero = DVector::zeros(d);
    let g0 = chart.metric(&zero, metric);
    let g = |w: DVector<T>| chart.metric(&w, metric);
    let mut hess = vec![vec![DMatrix::zeros(d, d); d]; d];
    for p in 0..d {
        let ep = unit(d, p, h);
        hess[p][p] = (g(ep.clone()) - &g0 * T::lit(2.0) + g(-ep.clone())) / (h * h);
        for q in p + 1..d {
            let eq = unit(d, q, h);
            let v = (g(&ep + &eq) - g(&ep - &eq) - g(&eq - &ep) + g(-(&ep + &eq))) / (h * h * T::lit(4.0));
            hess[p][q] = v.clone();
            hess[q][p] = v;
        }
    }
    let ginv = g0.clone().try_inverse().ok_or(Error::Spectral { residual: f64::NAN })?;
    let mut ric = DMatrix::zeros(d, d);
    for b in 0..d {
        for dd in 0..d {
            let mut acc = T::zero();
            for a in 0..d {
                for c in 0..d {
                    let r_abcd = (hess[b][c][(a, dd)] + hess[a][dd][(b, c)]
                        - hess[b][dd][(a, c)]
                        - hess[a][c][(b, dd)])
                        * T::lit(0.5);
                    acc += ginv[(a, c)] * r_abcd;
                }
            }
            ric[(b, dd)] = acc;
        }
    }
    Ok((ric, g0))
}

/// Dimension of the tangent space at `z`: the rank of `G ↦ [S_G, S_z]` over
/// all skew `G`.
pub fn tangent_dimension<T: Real>(z: &FibrePoint<T>) -> Result<usize> {
    let r = z.rank();
    let s = crate::clifford::skew_matrix(z.bivector())?;
    let p = r * (r - 1) / 2;
    let mut m = DMatrix::zeros(p, p);
    for (k, (i, j)) in crate::repmat::pairs(r).enumerate() {
        let mut g = DMatrix::zeros(r, r);
        g[(j - 1, i - 1)] = T::one();
        g[(i - 1, j - 1)] = -T::one();
        m.set_column(k, &lower_triangle(&(&g * &s - &s * &g)));
    }
    Ok(m.rank(T::lit(1e-9)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::stream;

    #[test]
    fn off_center_chart_reaches_the_point() {
        let mut rng = stream(21, "chart");
        for r in [3, 5, 8] {
            let z = FibrePoint::<f64>::random(&mut rng, r).unwrap();
            let (chart, w0) = ExpChart::off_center(&z).unwrap();
            let s = crate::clifford::skew_matrix(z.bivector()).unwrap();
            assert!((chart.point(&w0) - s).amax() < 1e-12);
            assert!(w0.norm() > 0.1);
        }
    }

    #[test]
    fn chart_jacobian_matches_finite_differences() {
        let mut rng = stream(22, "jac");
        let z = FibrePoint::<f64>::random(&mut rng, 5).unwrap();
        let chart = ExpChart::new(z).unwrap();
        let w = DVector::from_vec(vec![0.1, -0.2, 0.05, 0.3, 0.0, -0.1]);
        let jet = chart.jet(&w);
        for k in 0..6 {
            let h = 1e-6;
            let fd = (chart.point(&(&w + unit(6, k, h))) - chart.point(&(&w - unit(6, k, h)))) / (2.0 * h);
            assert!((lower_triangle(&fd) - jet.tangent.column(k)).amax() < 1e-8);
        }
        let j = chart.acs(&w);
        assert!((&j * &j + DMatrix::identity(6, 6)).amax() < 1e-10);
    }

    #[test]
    fn chart_center_is_normal() {
        let mut rng = stream(23, "normal");
        let z = FibrePoint::<f64>::random(&mut rng, 6).unwrap();
        let metric = FibreMetric::new(1.0);
        let (dg, dj) = normal_chart_first_derivatives(&z, &metric, 1e-4).unwrap();
        assert!(dg < 1e-7 && dj < 1e-7, "dg {dg}, dj {dj}");
        let chart = ExpChart::new(z).unwrap();
        let g0 = chart.metric(&DVector::zeros(8), &metric);
        assert!((g0 - DMatrix::identity(8, 8)).amax() < 1e-12);
    }

    #[test]
    fn nijenhuis_vanishes() {
        let mut rng = stream(24, "nij");
        for (r, bound) in [(3, 1e-5), (5, 1e-4), (9, 1e-4)] {
            let z = FibrePoint::<f64>::random(&mut rng, r).unwrap();
            let u = FibreTangent::random(&mut rng, r);
            let v = FibreTangent::random(&mut rng, r);
            let est = fibre_nijenhuis_estimate(&z, &u, &v, 1e-4).unwrap();
            assert!(est.extrapolated < bound, "r = {r}: {est:?}");
            assert_eq!(fibre_nijenhuis(&z, &u, &u, 1e-4).unwrap(), 0.0);
        }
        let z = FibrePoint::<f64>::axis(4, 1, 2).unwrap();
        let u = FibreTangent::zero(4);
        assert_eq!(fibre_nijenhuis(&z, &u, &u, 0.0), Err(Error::NonPositiveStep));
    }

    #[test]
    fn nijenhuis_of_a_non_integrable_structure_is_detected() {
        // A perturbed J on R^4 that is not integrable gives a clearly
        // nonzero value through the same formula.
        let d = 4;
        let j0 = DMatrix::from_row_slice(4, 4, &[0., -1., 0., 0., 1., 0., 0., 0., 0., 0., 0., -1., 0., 0., 1., 0.]);
        let mut dj = vec![DMatrix::zeros(d, d); d];
        // ∂_0 J rotates the structure, keeping J^2 = -1 to first order.
        let k = DMatrix::from_row_slice(4, 4, &[0., 0., 1., 0., 0., 0., 0., -1., 1., 0., 0., 0., 0., -1., 0., 0.]);
        dj[0] = &k * &j0 - &j0 * &k;
        let u = DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]);
        let v = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]);
        assert!(nijenhuis_from_jet(&j0, &dj, &u, &v).norm() > 0.1);
    }

    #[test]
    fn kaehler_form_is_closed() {
        let mut rng = stream(25, "omega");
        for r in [4, 6] {
            let z = FibrePoint::<f64>::random(&mut rng, r).unwrap();
            let defect = kaehler_form_defect(&z, &FibreMetric::new(1.5), 1e-4).unwrap();
            assert!(defect < 1e-4, "r = {r}: {defect}");
        }
    }

    #[test]
    fn ricci_is_einstein_with_constant_r_minus_two_kappa() {
        let mut rng = stream(26, "ricci");
        for (r, kappa) in [(3, 1.0), (4, 2.0), (5, 0.5)] {
            let z = FibrePoint::<f64>::random(&mut rng, r).unwrap();
            let metric = FibreMetric::new(kappa);
            let (ric, g) = ricci_in_chart(&z, &metric, 1e-3).unwrap();
            let lambda = metric.einstein_constant(r);
            assert!((lambda - (r as f64 - 2.0) * kappa).abs() < 1e-12);
            assert!((ric - g * lambda).amax() < 1e-4, "r = {r}");
        }
    }

    #[test]
    fn tangent_dimension_is_two_r_minus_four() {
        let mut rng = stream(27, "dim");
        for r in 3..=16 {
            let z = FibrePoint::<f64>::random(&mut rng, r).unwrap();
            assert_eq!(tangent_dimension(&z).unwrap(), 2 * (r - 2));
        }
    }
}
