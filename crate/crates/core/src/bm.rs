//! Bose-Mesner algebra data: distance matrices, exact spectrum, primitive
//! idempotents, Krein parameters, and Q-polynomial orderings.
//!
//! Eigenvalues are computed from the (D+1) x (D+1) tridiagonal intersection
//! matrix, not the n x n adjacency matrix: its characteristic polynomial is
//! factored exactly over Q, and what remains must split into quadratics
//! sharing a single radicand. Anything richer than one real quadratic
//! extension is reported as unsupported rather than approximated.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::exact::ExactScalar;
use crate::graph::{DrgData, Graph, IntersectionArray};
use crate::matrix::Matrix;

/// The distance matrices `A_0..A_D`.
#[derive(Debug, Clone)]
pub struct DistanceMatrices(pub Vec<Matrix>);

/// Distinct eigenvalues in decreasing order together with multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spectrum {
    pub theta: Vec<ExactScalar>,
    pub mult: Vec<u64>,
}

/// Primitive idempotents `E_0..E_D`, indexed like [`Spectrum::theta`].
#[derive(Debug, Clone)]
pub struct Idempotents(pub Vec<Matrix>);

/// Krein parameters `q^h_{ij}`.
#[derive(Debug, Clone)]
pub struct KreinParams {
    d: usize,
    q: Vec<ExactScalar>,
}

/// A Q-polynomial ordering: permutation of the reference idempotent indices
/// with `sigma(0) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPolyOrdering(pub Vec<usize>);

impl KreinParams {
    pub fn diameter(&self) -> usize {
        self.d
    }

    pub fn get(&self, h: usize, i: usize, j: usize) -> &ExactScalar {
        let d1 = self.d + 1;
        &self.q[(h * d1 + i) * d1 + j]
    }
}

/// Builds `A_0..A_D` from the all-pairs distances and verifies the basic
/// facts: `A_0 = I`, `sum A_i = J`, symmetry, and the three-term recurrence
/// `A A_i = b_{i-1} A_{i-1} + a_i A_i + c_{i+1} A_{i+1}`.
pub fn distance_matrices(g: &Graph, drg: &DrgData) -> Result<DistanceMatrices, Error> {
    let n = g.vertex_count();
    let d = drg.ia.diameter;
    let mut mats = vec![Matrix::zeros(n); d + 1];
    for y in 0..n {
        for z in 0..n {
            mats[drg.dist[y][z]][(y, z)] = ExactScalar::one();
        }
    }
    if mats[0] != Matrix::identity(n) {
        return Err(Error::internal("A_0 != I"));
    }
    let mut sum = Matrix::zeros(n);
    for m in &mats {
        if !m.is_symmetric() {
            return Err(Error::internal("distance matrix not symmetric"));
        }
        sum = sum.add(m);
    }
    if sum != Matrix::ones(n) {
        return Err(Error::internal("sum of distance matrices != J"));
    }
    let a1 = &mats[1];
    for i in 0..=d {
        let mut expect = Vec::new();
        if i > 0 {
            expect.push((ExactScalar::from_int(drg.ia.b_at(i - 1) as i64), &mats[i - 1]));
        }
        expect.push((ExactScalar::from_int(drg.ia.a[i] as i64), &mats[i]));
        if i < d {
            expect.push((ExactScalar::from_int(drg.ia.c_at(i + 1) as i64), &mats[i + 1]));
        }
        if a1.mul(&mats[i]) != Matrix::linear_combination(&expect) {
            return Err(Error::internal(format!(
                "three-term recurrence fails for A A_{i}"
            )));
        }
    }
    Ok(DistanceMatrices(mats))
}

// --- integer polynomial helpers (ascending coefficients, monic callers) ---

fn poly_eval(p: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Divides by (x - r); the caller guarantees r is a root.
fn poly_deflate_root(p: &[BigInt], r: &BigInt) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); p.len() - 1];
    let mut carry = BigInt::zero();
    for i in (0..p.len() - 1).rev() {
        carry = &p[i + 1] + r * &carry;
        out[i] = carry.clone();
    }
    out
}

/// Divides by the monic quadratic x^2 + u x + v, returning the quotient when
/// the division is exact.
fn poly_divide_quadratic(p: &[BigInt], u: &BigInt, v: &BigInt) -> Option<Vec<BigInt>> {
    let deg = p.len() - 1;
    if deg < 2 {
        return None;
    }
    let mut rem = p.to_vec();
    let mut quot = vec![BigInt::zero(); deg - 1];
    for i in (0..deg - 1).rev() {
        let c = rem[i + 2].clone();
        quot[i] = c.clone();
        rem[i + 1] -= u * &c;
        rem[i] -= v * &c;
    }
    if rem[0].is_zero() && rem[1].is_zero() {
        Some(quot)
    } else {
        None
    }
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    let limit = BigInt::from(2_000_000u64);
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            small.push(d.clone());
            large.push(&n / &d);
        }
        d += 1;
        if d > limit {
            return None;
        }
    }
    large.reverse();
    small.extend(large);
    Some(small)
}

/// Characteristic polynomial of the tridiagonal intersection matrix
/// (subdiagonal c_i, diagonal a_i, superdiagonal b_i), monic with integer
/// coefficients, via the three-term determinant recurrence.
fn intersection_char_poly(ia: &IntersectionArray) -> Vec<BigInt> {
    let d = ia.diameter;
    let mut prev: Vec<BigInt> = vec![BigInt::one()]; // det of empty block
    let mut cur: Vec<BigInt> = vec![BigInt::from(-(ia.a[0] as i64)), BigInt::one()]; // x - a_0
    for j in 1..=d {
        // det_j = (x - a_j) det_{j-1} - b_{j-1} c_j det_{j-2}
        let mut next = vec![BigInt::zero(); cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= BigInt::from(ia.a[j] as i64) * c;
        }
        let off = BigInt::from((ia.b[j - 1] * ia.c_at(j)) as i64);
        for (i, c) in prev.iter().enumerate() {
            next[i] -= &off * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// All roots of a monic integer polynomial, as exact scalars in Q or a
/// single quadratic extension Q(sqrt(m)).
///
/// Integer roots are found by the rational root theorem (a monic integer
/// polynomial has no other rational roots) and deflated; the remainder is
/// split into monic integer quadratics by bounded search. An irreducible
/// factor of degree >= 3, or quadratic factors over incompatible radicands,
/// is outside the supported scalar field and reported as such.
fn exact_roots(poly: &[BigInt]) -> Result<Vec<ExactScalar>, Error> {
    let unsupported = || {
        Error::UnsupportedField(
            "characteristic polynomial does not split over a single quadratic extension"
                .to_string(),
        )
    };
    let mut roots = Vec::new();
    let mut p = poly.to_vec();
    // zero roots
    while p.len() > 1 && p[0].is_zero() {
        roots.push(ExactScalar::zero());
        p.remove(0);
    }
    // integer roots (candidates: divisors of the constant term)
    let mut candidates: Vec<BigInt> = Vec::new();
    if p.len() > 1 {
        let divs = divisors(&p[0]).ok_or_else(unsupported)?;
        for d in divs {
            candidates.push(d.clone());
            candidates.push(-d);
        }
    }
    let mut idx = 0;
    while p.len() > 1 && idx < candidates.len() {
        let r = candidates[idx].clone();
        if poly_eval(&p, &r).is_zero() {
            roots.push(ExactScalar::from_bigint(r.clone()));
            p = poly_deflate_root(&p, &r);
            // same root may repeat in principle; retry before moving on
        } else {
            idx += 1;
        }
    }
    // remaining factor: split into monic integer quadratics
    while p.len() > 2 {
        let bound: BigInt = p.iter().map(|c| c.abs()).max().unwrap() * 2 + 2;
        let vs = divisors(&p[0]).ok_or_else(unsupported)?;
        let mut found = false;
        'outer: for v_abs in vs {
            for v in [v_abs.clone(), -v_abs] {
                let mut u = -bound.clone();
                while u <= bound {
                    if let Some(q) = poly_divide_quadratic(&p, &u, &v) {
                        // roots of x^2 + ux + v
                        let uu = ExactScalar::from_bigint(u.clone());
                        let vv = ExactScalar::from_bigint(v.clone());
                        let disc = &uu * &uu - ExactScalar::from_int(4) * vv;
                        if disc.sign() < 0 {
                            return Err(Error::internal(
                                "complex eigenvalue from a symmetric matrix",
                            ));
                        }
                        let s = disc.sqrt_exact().map_err(Error::from)?;
                        let half = ExactScalar::ratio(1, 2);
                        roots.push(&half * &(&s - &uu));
                        roots.push(&half * &(-&s - &uu));
                        p = q;
                        found = true;
                        break 'outer;
                    }
                    u += 1;
                }
            }
        }
        if !found {
            return Err(unsupported());
        }
    }
    if p.len() == 2 {
        roots.push(ExactScalar::from_bigint(-p[0].clone()));
    }
    Ok(roots)
}

/// The normalized eigenvector sequence `u_0..u_D` for an eigenvalue:
/// `u_0 = 1`, `u_1 = theta/k`, `c_i u_{i-1} + a_i u_i + b_i u_{i+1} = theta u_i`.
fn u_sequence(ia: &IntersectionArray, theta: &ExactScalar) -> Vec<ExactScalar> {
    let d = ia.diameter;
    let mut u = Vec::with_capacity(d + 1);
    u.push(ExactScalar::one());
    u.push(theta.checked_div(&ExactScalar::from_int(ia.valency() as i64)).expect("k > 0"));
    for i in 1..d {
        let ci = ExactScalar::from_int(ia.c_at(i) as i64);
        let ai = ExactScalar::from_int(ia.a[i] as i64);
        let bi = ExactScalar::from_int(ia.b[i] as i64);
        let next = (theta * &u[i] - ai * &u[i] - ci * &u[i - 1])
            .checked_div(&bi)
            .expect("b_i > 0 below the diameter");
        u.push(next);
    }
    u
}

/// Exact spectrum of a distance-regular graph from its intersection array.
///
/// Multiplicities come from `m_i = n / sum_j k_j u_j(theta_i)^2` and must be
/// positive integers; `sum m_i = n` and `sum m_i theta_i = 0` are verified.
pub fn eigenvalues(ia: &IntersectionArray, n: usize) -> Result<Spectrum, Error> {
    let poly = intersection_char_poly(ia);
    let mut theta = exact_roots(&poly)?;
    // single radicand across the whole spectrum
    let mut radicand = 0u64;
    for t in &theta {
        if t.radicand() != 0 {
            if radicand != 0 && radicand != t.radicand() {
                return Err(Error::UnsupportedField(format!(
                    "eigenvalues need both sqrt({radicand}) and sqrt({})",
                    t.radicand()
                )));
            }
            radicand = t.radicand();
        }
    }
    theta.sort_by(|x, y| y.partial_cmp(x).expect("comparable eigenvalues"));
    for w in theta.windows(2) {
        if w[0] == w[1] {
            return Err(Error::internal("repeated eigenvalue of the intersection matrix"));
        }
    }
    if theta.len() != ia.diameter + 1 {
        return Err(Error::internal("wrong number of eigenvalues"));
    }
    if theta[0] != ExactScalar::from_int(ia.valency() as i64) {
        return Err(Error::internal("largest eigenvalue is not the valency"));
    }
    let mut mult = Vec::with_capacity(theta.len());
    for t in &theta {
        let u = u_sequence(ia, t);
        let mut denom = ExactScalar::zero();
        for (j, uj) in u.iter().enumerate() {
            denom = &denom + &(ExactScalar::from_int(ia.k[j] as i64) * uj * uj);
        }
        let m = ExactScalar::from_int(n as i64)
            .checked_div(&denom)
            .map_err(Error::from)?;
        let m = m
            .to_i64()
            .filter(|&v| v > 0)
            .ok_or_else(|| Error::invalid(format!("non-integer multiplicity for theta = {t}")))?;
        mult.push(m as u64);
    }
    if mult.iter().sum::<u64>() != n as u64 {
        return Err(Error::internal("multiplicities do not sum to n"));
    }
    let mut trace = ExactScalar::zero();
    for (t, &m) in theta.iter().zip(&mult) {
        trace = &trace + &(t * &ExactScalar::from_int(m as i64));
    }
    if !trace.is_zero() {
        return Err(Error::internal("sum of m_i theta_i != 0"));
    }
    Ok(Spectrum { theta, mult })
}

/// Primitive idempotents via the Lagrange products
/// `E_i = prod_{j != i} (A - theta_j I) / (theta_i - theta_j)`,
/// with facts E_0 = J/n, sum E_i = I, symmetry, E_i E_j = delta_ij E_i,
/// A E_i = theta_i E_i, and trace E_i = m_i all verified.
pub fn primitive_idempotents(a: &Matrix, spec: &Spectrum) -> Result<Idempotents, Error> {
    let n = a.size();
    let d = spec.theta.len() - 1;
    let factor = |j: usize| {
        let mut f = a.clone();
        for v in 0..n {
            f[(v, v)] = &f[(v, v)] - &spec.theta[j];
        }
        f
    };
    // prefix[i] = prod_{j<i} (A - theta_j), suffix[i] = prod_{j>=i} (A - theta_j)
    let mut prefix = vec![Matrix::identity(n)];
    for j in 0..=d {
        let last = prefix.last().unwrap();
        prefix.push(factor(j).mul(last));
    }
    let mut suffix = vec![Matrix::identity(n); d + 2];
    for j in (0..=d).rev() {
        suffix[j] = factor(j).mul(&suffix[j + 1]);
    }
    let mut mats = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let mut denom = ExactScalar::one();
        for j in 0..=d {
            if j != i {
                denom = &denom * &(&spec.theta[i] - &spec.theta[j]);
            }
        }
        let numer = prefix[i].mul(&suffix[i + 1]);
        mats.push(numer.scale(&denom.inv().map_err(Error::from)?));
    }

    let inv_n = ExactScalar::from_int(n as i64).inv().map_err(Error::from)?;
    if mats[0] != Matrix::ones(n).scale(&inv_n) {
        return Err(Error::internal("E_0 != J/n"));
    }
    let mut sum = Matrix::zeros(n);
    for e in &mats {
        if !e.is_symmetric() {
            return Err(Error::internal("idempotent not symmetric"));
        }
        sum = sum.add(e);
    }
    if sum != Matrix::identity(n) {
        return Err(Error::internal("sum of idempotents != I"));
    }
    for i in 0..=d {
        for j in i..=d {
            let prod = mats[i].mul(&mats[j]);
            let expect = if i == j { mats[i].clone() } else { Matrix::zeros(n) };
            if prod != expect {
                return Err(Error::internal(format!("E_{i} E_{j} != delta E_{i}")));
            }
        }
        if a.mul(&mats[i]) != mats[i].scale(&spec.theta[i]) {
            return Err(Error::internal(format!("A E_{i} != theta_{i} E_{i}")));
        }
        // rank of an idempotent equals its trace
        if mats[i].trace() != ExactScalar::from_int(spec.mult[i] as i64) {
            return Err(Error::internal(format!("trace E_{i} != m_{i}")));
        }
    }
    Ok(Idempotents(mats))
}

/// Krein parameters, extracted via
/// `q^h_{ij} = |X| trace((E_i o E_j) E_h) / m_h`
/// and verified: symmetry in (i,j), nonnegativity, `q^0_{ij} = delta_ij m_i`,
/// and the defining expansion `E_i o E_j = |X|^{-1} sum_h q^h_{ij} E_h`.
pub fn krein_parameters(idem: &Idempotents, spec: &Spectrum) -> Result<KreinParams, Error> {
    let mats = &idem.0;
    let d = mats.len() - 1;
    let n = mats[0].size();
    let n_scalar = ExactScalar::from_int(n as i64);
    let d1 = d + 1;
    let mut q = vec![ExactScalar::zero(); d1 * d1 * d1];
    for i in 0..=d {
        for j in 0..=d {
            let had = mats[i].hadamard(&mats[j]);
            for h in 0..=d {
                let t = had.trace_of_product(&mats[h]);
                let val = (&n_scalar * &t)
                    .checked_div(&ExactScalar::from_int(spec.mult[h] as i64))
                    .map_err(Error::from)?;
                if val.sign() < 0 {
                    return Err(Error::internal(format!("negative Krein parameter q^{h}_{i}{j}")));
                }
                q[(h * d1 + i) * d1 + j] = val;
            }
            // re-verify the expansion that defines the parameters
            let terms: Vec<(ExactScalar, &Matrix)> = (0..=d)
                .map(|h| (q[(h * d1 + i) * d1 + j].clone(), &mats[h]))
                .collect();
            if Matrix::linear_combination(&terms) != had.scale(&n_scalar) {
                return Err(Error::internal(format!(
                    "Krein expansion fails for E_{i} o E_{j}"
                )));
            }
        }
    }
    let kp = KreinParams { d, q };
    for h in 0..=d {
        for i in 0..=d {
            for j in 0..=d {
                if kp.get(h, i, j) != kp.get(h, j, i) {
                    return Err(Error::internal("Krein parameters not symmetric"));
                }
            }
        }
    }
    for i in 0..=d {
        for j in 0..=d {
            let expect = if i == j {
                ExactScalar::from_int(spec.mult[i] as i64)
            } else {
                ExactScalar::zero()
            };
            if kp.get(0, i, j) != &expect {
                return Err(Error::internal("q^0_ij != delta_ij m_i"));
            }
        }
    }
    Ok(kp)
}

/// Checks the Q-polynomial vanishing pattern for the ordering `sigma`:
/// over positions, `q^h_{ij} = 0` whenever one of h, i, j exceeds the sum of
/// the other two, and `q^h_{ij} != 0` whenever one equals that sum.
pub fn is_qpoly_ordering(kp: &KreinParams, sigma: &[usize]) -> bool {
    let d = kp.d;
    for h in 0..=d {
        for i in 0..=d {
            for j in 0..=d {
                let q = kp.get(sigma[h], sigma[i], sigma[j]);
                if h > i + j || i > h + j || j > h + i {
                    if !q.is_zero() {
                        return false;
                    }
                } else if (h == i + j || i == h + j || j == h + i) && q.is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// All Q-polynomial orderings: for each candidate E_1 the ordering is
/// extended greedily (the next idempotent is the unique unused one with
/// `q^{next}_{1,last} != 0`), then the full vanishing pattern is verified.
pub fn find_qpoly_orderings(kp: &KreinParams) -> Vec<QPolyOrdering> {
    let d = kp.d;
    let mut found = Vec::new();
    for e1 in 1..=d {
        let mut sigma = vec![0, e1];
        let mut used = vec![false; d + 1];
        used[0] = true;
        used[e1] = true;
        let mut ok = true;
        for _ in 2..=d {
            let last = *sigma.last().unwrap();
            let mut next = None;
            for cand in 1..=d {
                if used[cand] || kp.get(cand, e1, last).is_zero() {
                    continue;
                }
                if next.is_some() {
                    next = None; // ambiguous extension
                    break;
                }
                next = Some(cand);
            }
            match next {
                Some(c) => {
                    used[c] = true;
                    sigma.push(c);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && sigma.len() == d + 1 && is_qpoly_ordering(kp, &sigma) {
            found.push(QPolyOrdering(sigma));
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_folded_cube, build_hypercube, build_incidence_graph};

    fn fano() -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; 7]; 7];
        for b in 0..7usize {
            for d in [0usize, 1, 3] {
                m[(b + d) % 7][b] = 1;
            }
        }
        m
    }

    fn spectrum_of(g: &Graph) -> (DrgData, Spectrum) {
        let drg = g.check_distance_regular(true).unwrap();
        let spec = eigenvalues(&drg.ia, g.vertex_count()).unwrap();
        (drg, spec)
    }

    fn ints(vals: &[i64]) -> Vec<ExactScalar> {
        vals.iter().map(|&v| ExactScalar::from_int(v)).collect()
    }

    #[test]
    fn hypercube_spectrum() {
        let g = build_hypercube(4).unwrap();
        let (_, spec) = spectrum_of(&g);
        assert_eq!(spec.theta, ints(&[4, 2, 0, -2, -4]));
        assert_eq!(spec.mult, vec![1, 4, 6, 4, 1]);
    }

    #[test]
    fn folded_cube_spectrum() {
        let g = build_folded_cube(3).unwrap();
        let (_, spec) = spectrum_of(&g);
        assert_eq!(spec.theta, ints(&[6, 2, -2, -6]));
        assert_eq!(spec.mult, vec![1, 15, 15, 1]);
    }

    #[test]
    fn heawood_spectrum_in_quadratic_field() {
        let g = build_incidence_graph(&fano()).unwrap();
        let (_, spec) = spectrum_of(&g);
        let r2 = ExactScalar::from_int(2).sqrt_exact().unwrap();
        assert_eq!(
            spec.theta,
            vec![ExactScalar::from_int(3), r2.clone(), -&r2, ExactScalar::from_int(-3)]
        );
        assert_eq!(spec.mult, vec![1, 6, 6, 1]);
    }

    #[test]
    fn distance_matrix_facts() {
        let g = build_hypercube(3).unwrap();
        let drg = g.check_distance_regular(true).unwrap();
        let dm = distance_matrices(&g, &drg).unwrap();
        // A_3 is the antipodal permutation matrix: one 1 per row
        for y in 0..8 {
            let ones = (0..8).filter(|&z| dm.0[3][(y, z)].is_one()).count();
            assert_eq!(ones, 1);
        }
    }

    #[test]
    fn heawood_a1_squared_expansion() {
        // A_1 A_1 = 3 A_0 + p^2_11 A_2 with p^2_11 = c_2 * shells; check the
        // product against the distance matrices and counted p-numbers.
        let g = build_incidence_graph(&fano()).unwrap();
        let drg = g.check_distance_regular(true).unwrap();
        let dm = distance_matrices(&g, &drg).unwrap();
        let prod = dm.0[1].mul(&dm.0[1]);
        let expect = Matrix::linear_combination(&[
            (ExactScalar::from_int(drg.p[0][1][1] as i64), &dm.0[0]),
            (ExactScalar::from_int(drg.p[1][1][1] as i64), &dm.0[1]),
            (ExactScalar::from_int(drg.p[2][1][1] as i64), &dm.0[2]),
        ]);
        assert_eq!(prod, expect);
    }

    #[test]
    fn idempotent_facts_on_heawood() {
        let g = build_incidence_graph(&fano()).unwrap();
        let (drg, spec) = spectrum_of(&g);
        let dm = distance_matrices(&g, &drg).unwrap();
        let idem = primitive_idempotents(&dm.0[1], &spec).unwrap();
        // rank E_1 = k(k-1)/c_2 = 6 for the sqrt(2) eigenvalue
        assert_eq!(idem.0[1].trace(), ExactScalar::from_int(6));
        // spectral decomposition: product over all (A - theta_i I) vanishes
        let n = g.vertex_count();
        let mut prod = Matrix::identity(n);
        for t in &spec.theta {
            let mut f = dm.0[1].clone();
            for v in 0..n {
                f[(v, v)] = &f[(v, v)] - t;
            }
            prod = f.mul(&prod);
        }
        assert!(prod.is_zero());
    }

    #[test]
    fn hypercube_rank_e1() {
        let g = build_hypercube(3).unwrap();
        let (drg, spec) = spectrum_of(&g);
        let dm = distance_matrices(&g, &drg).unwrap();
        let idem = primitive_idempotents(&dm.0[1], &spec).unwrap();
        assert_eq!(idem.0[1].trace(), ExactScalar::from_int(3));
    }

    #[test]
    fn krein_odd_vanishing_on_cube() {
        let g = build_hypercube(3).unwrap();
        let (drg, spec) = spectrum_of(&g);
        let dm = distance_matrices(&g, &drg).unwrap();
        let idem = primitive_idempotents(&dm.0[1], &spec).unwrap();
        let kp = krein_parameters(&idem, &spec).unwrap();
        // entrywise-product oracle: n * (E_1 o E_1) expanded in idempotents
        // must put weight zero on every odd-index idempotent
        for h in [1usize, 3] {
            assert!(kp.get(h, 1, 1).is_zero(), "q^{h}_11 != 0");
        }
        assert!(!kp.get(2, 1, 1).is_zero());
    }

    fn orderings_exhaustive(kp: &KreinParams) -> Vec<Vec<usize>> {
        fn permute(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, kp: &KreinParams) {
            if rest.is_empty() {
                if is_qpoly_ordering(kp, cur) {
                    out.push(cur.clone());
                }
                return;
            }
            for i in 0..rest.len() {
                let v = rest.remove(i);
                cur.push(v);
                permute(rest, cur, out, kp);
                cur.pop();
                rest.insert(i, v);
            }
        }
        let mut out = Vec::new();
        let mut rest: Vec<usize> = (1..=kp.d).collect();
        permute(&mut rest, &mut vec![0], &mut out, kp);
        out
    }

    fn kp_of(g: &Graph) -> KreinParams {
        let (drg, spec) = spectrum_of(g);
        let dm = distance_matrices(g, &drg).unwrap();
        let idem = primitive_idempotents(&dm.0[1], &spec).unwrap();
        krein_parameters(&idem, &spec).unwrap()
    }

    #[test]
    fn hypercube_orderings_even_dimension() {
        let kp = kp_of(&build_hypercube(4).unwrap());
        let got = find_qpoly_orderings(&kp);
        let perms: Vec<Vec<usize>> = got.iter().map(|o| o.0.clone()).collect();
        // natural ordering and the alternating one (-1)^i (D-2i)
        assert_eq!(perms, vec![vec![0, 1, 2, 3, 4], vec![0, 3, 2, 1, 4]]);
        assert_eq!(perms, orderings_exhaustive(&kp));
    }

    #[test]
    fn hypercube_orderings_odd_dimension() {
        let kp = kp_of(&build_hypercube(5).unwrap());
        let got = find_qpoly_orderings(&kp);
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].0, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(
            orderings_exhaustive(&kp),
            vec![vec![0, 1, 2, 3, 4, 5]]
        );
    }

    #[test]
    fn heawood_has_two_orderings() {
        let kp = kp_of(&build_incidence_graph(&fano()).unwrap());
        let got = find_qpoly_orderings(&kp);
        let perms: Vec<Vec<usize>> = got.iter().map(|o| o.0.clone()).collect();
        // theta_1 = +sqrt(2) and theta_1 = -sqrt(2)
        assert_eq!(perms, vec![vec![0, 1, 2, 3], vec![0, 2, 1, 3]]);
        assert_eq!(perms, orderings_exhaustive(&kp));
    }

    #[test]
    fn folded_cube_orderings() {
        // D = 3 puts the folded 6-cube in the diameter-three regime, where
        // b_2 > 1 gives exactly two Q-polynomial structures (theta_1 = +-2).
        let kp = kp_of(&build_folded_cube(3).unwrap());
        let got = find_qpoly_orderings(&kp);
        let perms: Vec<Vec<usize>> = got.iter().map(|o| o.0.clone()).collect();
        assert_eq!(perms, vec![vec![0, 1, 2, 3], vec![0, 2, 1, 3]]);
        assert_eq!(perms, orderings_exhaustive(&kp));
    }
}
