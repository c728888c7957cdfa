//! Classification of the R/L dependency structure attached to a Q-polynomial
//! ordering: extraction of the tridiagonal-relation parameters, the parameter
//! matrix and f vector, the dependency-space oracle, determinants of the
//! principal submatrices (recurrence and closed form), the (q, s*)
//! parametrization, and the case labels feeding the final verdict.

use crate::error::Error;
use crate::exact::ExactScalar;
use crate::graph::IntersectionArray;
use crate::matrix::{dependency_space, Matrix};
use crate::subconstituent::{LrProducts, Subconstituent};

/// Parameters of the tridiagonal relations.
#[derive(Debug, Clone, PartialEq)]
pub struct TdParams {
    pub beta: ExactScalar,
    pub gamma: ExactScalar,
    pub gamma_star: ExactScalar,
    pub rho: ExactScalar,
    pub rho_star: ExactScalar,
}

/// The parameters q, s* and the derived h, h* for a structure outside the
/// special cases.
#[derive(Debug, Clone, PartialEq)]
pub struct QsParams {
    pub q: ExactScalar,
    pub s_star: ExactScalar,
    pub h: ExactScalar,
    pub h_star: ExactScalar,
}

/// Tridiagonal parameter matrix: unit diagonal, subdiagonal `e_i^-`
/// (2 <= i <= D), superdiagonal `e_i^+` (1 <= i <= D-1).
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterMatrix {
    pub d: usize,
    e_minus: Vec<ExactScalar>,
    e_plus: Vec<ExactScalar>,
}

impl ParameterMatrix {
    pub fn new(d: usize, e_minus: Vec<ExactScalar>, e_plus: Vec<ExactScalar>) -> Self {
        assert_eq!(e_minus.len(), d - 1);
        assert_eq!(e_plus.len(), d - 1);
        ParameterMatrix { d, e_minus, e_plus }
    }

    /// `e_i^-` for 1 <= i <= D, with the convention `e_1^- = 0`.
    pub fn e_minus(&self, i: usize) -> ExactScalar {
        assert!((1..=self.d).contains(&i));
        if i == 1 {
            ExactScalar::zero()
        } else {
            self.e_minus[i - 2].clone()
        }
    }

    /// `e_i^+` for 1 <= i <= D, with the convention `e_D^+ = 0`.
    pub fn e_plus(&self, i: usize) -> ExactScalar {
        assert!((1..=self.d).contains(&i));
        if i == self.d {
            ExactScalar::zero()
        } else {
            self.e_plus[i - 1].clone()
        }
    }

    pub fn stored_e_minus(&self) -> &[ExactScalar] {
        &self.e_minus
    }

    pub fn stored_e_plus(&self) -> &[ExactScalar] {
        &self.e_plus
    }

    /// Indices with a vanishing off-diagonal entry, as `(i, sign)` pairs
    /// where sign is '-' or '+'.
    pub fn zero_entries(&self) -> Vec<(usize, char)> {
        let mut out = Vec::new();
        for i in 2..=self.d {
            if self.e_minus(i).is_zero() {
                out.push((i, '-'));
            }
        }
        for i in 1..self.d {
            if self.e_plus(i).is_zero() {
                out.push((i, '+'));
            }
        }
        out
    }

    /// Condition (2) of the parameter-matrix definition: one of the two
    /// off-diagonal chains is entirely nonzero.
    pub fn off_diagonal_chain_nonzero(&self) -> bool {
        let minus = (2..=self.d).all(|i| !self.e_minus(i).is_zero());
        let plus = (2..=self.d).all(|i| !self.e_plus(i - 1).is_zero());
        minus || plus
    }
}

/// Verdict for one Q-polynomial structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Verdict {
    NotUniform,
    UniformNotStrong,
    StronglyUniform,
}

/// Special-case labels of a Q-polynomial structure. `IvPrime` refines `IV`
/// (diameter three with k = t(t+1), c_2 = t, theta_1 = t); a structure gets
/// `IV` only when it is not of that refined shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum CaseLabel {
    I,
    II,
    III,
    IV,
    V,
    IVprime,
    BetaMinus2,
    Other,
}

fn ratio(num: &ExactScalar, den: &ExactScalar) -> Result<ExactScalar, Error> {
    num.checked_div(den).map_err(Error::from)
}

/// Extracts beta, gamma, gamma*, rho, rho* from the eigenvalue and dual
/// eigenvalue sequences, asserting each is constant over its defining range
/// and that gamma = 0 (the bipartite case).
pub fn tridiagonal_params(
    theta: &[ExactScalar],
    theta_star: &[ExactScalar],
) -> Result<TdParams, Error> {
    let d = theta.len() - 1;
    if d < 3 {
        return Err(Error::invalid("tridiagonal parameters require D >= 3"));
    }
    let mut beta_plus_1 = None;
    for seq in [theta, theta_star] {
        for i in 2..=d - 1 {
            let value = ratio(&(&seq[i - 2] - &seq[i + 1]), &(&seq[i - 1] - &seq[i]))?;
            match &beta_plus_1 {
                None => beta_plus_1 = Some(value),
                Some(b) if *b != value => {
                    return Err(Error::invalid(
                        "eigenvalue ratios are inconsistent: ordering is not Q-polynomial",
                    ))
                }
                _ => {}
            }
        }
    }
    let beta = beta_plus_1.expect("D >= 3 gives at least one ratio") - ExactScalar::one();
    let constant_over = |f: &dyn Fn(usize) -> ExactScalar,
                         range: std::ops::RangeInclusive<usize>,
                         what: &str|
     -> Result<ExactScalar, Error> {
        let mut out = None;
        for i in range {
            let v = f(i);
            match &out {
                None => out = Some(v),
                Some(prev) if *prev != v => {
                    return Err(Error::invalid(format!("{what} is not constant over i")))
                }
                _ => {}
            }
        }
        Ok(out.expect("nonempty range"))
    };
    let gamma = constant_over(
        &|i| &theta[i - 1] - &beta * &theta[i] + &theta[i + 1],
        1..=d - 1,
        "gamma",
    )?;
    let gamma_star = constant_over(
        &|i| &theta_star[i - 1] - &beta * &theta_star[i] + &theta_star[i + 1],
        1..=d - 1,
        "gamma*",
    )?;
    let rho = constant_over(
        &|i| {
            &theta[i - 1] * &theta[i - 1] - &beta * &theta[i - 1] * &theta[i]
                + &theta[i] * &theta[i]
                - &gamma * &(&theta[i - 1] + &theta[i])
        },
        1..=d,
        "rho",
    )?;
    let rho_star = constant_over(
        &|i| {
            &theta_star[i - 1] * &theta_star[i - 1]
                - &beta * &theta_star[i - 1] * &theta_star[i]
                + &theta_star[i] * &theta_star[i]
                - &gamma_star * &(&theta_star[i - 1] + &theta_star[i])
        },
        1..=d,
        "rho*",
    )?;
    if !gamma.is_zero() {
        return Err(Error::NotBipartite(format!(
            "gamma = {gamma} != 0: data is not from a bipartite graph"
        )));
    }
    Ok(TdParams {
        beta,
        gamma,
        gamma_star,
        rho,
        rho_star,
    })
}

/// Witness of a failed matrix identity.
#[derive(Debug, Clone)]
pub struct IdentityViolation {
    pub name: String,
    pub i: Option<usize>,
    pub row: usize,
    pub col: usize,
    pub value: ExactScalar,
}

impl std::fmt::Display for IdentityViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} fails", self.name)?;
        if let Some(i) = self.i {
            write!(f, " at i={i}")?;
        }
        write!(
            f,
            ": residual entry ({}, {}) = {}",
            self.row, self.col, self.value
        )
    }
}

fn residual_check(
    m: &Matrix,
    name: &str,
    i: Option<usize>,
) -> Result<(), IdentityViolation> {
    if let Some((row, col, value)) = m.first_nonzero() {
        Err(IdentityViolation {
            name: name.to_string(),
            i,
            row,
            col,
            value,
        })
    } else {
        Ok(())
    }
}

/// Verifies both tridiagonal relations as exact matrix identities:
///
/// `[A, A^2 A* - beta A A* A + A* A^2 - gamma (A A* + A* A) - rho A*] = 0`
/// and its dual with the starred parameters and the roles of A, A* swapped.
pub fn verify_tridiagonal_relations(
    a: &Matrix,
    a2: &Matrix,
    astar: &[ExactScalar],
    td: &TdParams,
) -> Result<(), IdentityViolation> {
    let inner = a2
        .mul_diag_right(astar)
        .sub(&a.mul(&a.mul_diag_left(astar)).scale(&td.beta))
        .add(&a2.mul_diag_left(astar))
        .sub(
            &a.mul_diag_right(astar)
                .add(&a.mul_diag_left(astar))
                .scale(&td.gamma),
        )
        .sub(&Matrix::diagonal(astar).scale(&td.rho));
    // M A = (A M^t)^t since A is symmetric
    let commutator = a.mul(&inner).sub(&a.mul(&inner.transpose()).transpose());
    residual_check(&commutator, "first tridiagonal relation", None)?;

    let astar2: Vec<ExactScalar> = astar.iter().map(|v| v * v).collect();
    let dual_inner = a
        .mul_diag_left(&astar2)
        .sub(&a.mul_diag_left(astar).mul_diag_right(astar).scale(&td.beta))
        .add(&a.mul_diag_right(&astar2))
        .sub(
            &a.mul_diag_left(astar)
                .add(&a.mul_diag_right(astar))
                .scale(&td.gamma_star),
        )
        .sub(&a.scale(&td.rho_star));
    let dual_commutator = dual_inner
        .mul_diag_left(astar)
        .sub(&dual_inner.mul_diag_right(astar));
    residual_check(&dual_commutator, "second tridiagonal relation", None)
}

/// Coefficients of the dependency
/// `c_minus RL^2 + (beta+2) LRL + c_plus L^2R = rho L` on `E*_i V`.
///
/// At i = 1 the RL^2 term vanishes on the subconstituent and at i = D the
/// L^2R term does, so those coefficients are `None`.
#[derive(Debug, Clone)]
pub struct DependencyCoeffs {
    pub i: usize,
    pub rl2: Option<ExactScalar>,
    pub lrl: ExactScalar,
    pub l2r: Option<ExactScalar>,
    pub rhs: ExactScalar,
}

/// Computes the dependency coefficients for shell `i` and cross-checks the
/// simplified forms `(theta*_{i-3} - theta*_{i-1})/(theta*_i - theta*_{i-1})`
/// and `(theta*_i - theta*_{i+2})/(theta*_i - theta*_{i-1})` on their ranges.
pub fn rl_dependency_coeffs(
    i: usize,
    theta_star: &[ExactScalar],
    beta: &ExactScalar,
    rho: &ExactScalar,
) -> Result<DependencyCoeffs, Error> {
    let d = theta_star.len() - 1;
    assert!((1..=d).contains(&i));
    let beta1 = beta + &ExactScalar::one();
    let denom = &theta_star[i] - &theta_star[i - 1];
    if denom.is_zero() {
        return Err(Error::internal("equal consecutive dual eigenvalues"));
    }
    let rl2 = if i >= 2 {
        let num = &denom + &(&beta1 * &(&theta_star[i - 2] - &theta_star[i - 1]));
        let value = ratio(&num, &denom)?;
        if i >= 3 {
            let simplified = ratio(&(&theta_star[i - 3] - &theta_star[i - 1]), &denom)?;
            if simplified != value {
                return Err(Error::internal("simplified RL^2 coefficient disagrees"));
            }
        }
        Some(value)
    } else {
        None
    };
    let l2r = if i < d {
        let num = &denom + &(&beta1 * &(&theta_star[i] - &theta_star[i + 1]));
        let value = ratio(&num, &denom)?;
        if i <= d.saturating_sub(2) {
            let simplified = ratio(&(&theta_star[i] - &theta_star[i + 2]), &denom)?;
            if simplified != value {
                return Err(Error::internal("simplified L^2R coefficient disagrees"));
            }
        }
        Some(value)
    } else {
        None
    };
    Ok(DependencyCoeffs {
        i,
        rl2,
        lrl: beta + &ExactScalar::from_int(2),
        l2r,
        rhs: rho.clone(),
    })
}

/// Verifies the raw dependency of [`rl_dependency_coeffs`] on `E*_i V` for
/// every shell, exactly.
pub fn verify_rl_dependency(
    sub: &Subconstituent,
    prod: &LrProducts,
    theta_star: &[ExactScalar],
    td: &TdParams,
) -> Result<(), Error> {
    let d = sub.diameter;
    let l = &sub.lowering;
    for i in 1..=d {
        let coeffs = rl_dependency_coeffs(i, theta_star, &td.beta, &td.rho)?;
        let mut m = prod.lrl.scale(&coeffs.lrl).sub(&l.scale(&coeffs.rhs));
        if let Some(c) = &coeffs.rl2 {
            m = m.add(&prod.rl2.scale(c));
        }
        if let Some(c) = &coeffs.l2r {
            m = m.add(&prod.l2r.scale(c));
        }
        residual_check(&sub.mask_cols(i as isize, &m), "R/L dependency", Some(i))
            .map_err(|v| Error::internal(v.to_string()))?;
    }
    Ok(())
}

/// Builds the uniform-structure candidate (U, f): the dependency divided by
/// `beta + 2`, which must be nonzero.
pub fn build_uniform_candidate(
    td: &TdParams,
    theta_star: &[ExactScalar],
) -> Result<(ParameterMatrix, Vec<ExactScalar>), Error> {
    let d = theta_star.len() - 1;
    let beta2 = &td.beta + &ExactScalar::from_int(2);
    if beta2.is_zero() {
        return Err(Error::invalid(
            "beta = -2: the uniform candidate is undefined",
        ));
    }
    let mut e_minus = Vec::with_capacity(d - 1);
    let mut e_plus = Vec::with_capacity(d - 1);
    for i in 1..=d {
        let coeffs = rl_dependency_coeffs(i, theta_star, &td.beta, &td.rho)?;
        if i >= 2 {
            e_minus.push(ratio(&coeffs.rl2.expect("defined for i >= 2"), &beta2)?);
        }
        if i < d {
            e_plus.push(ratio(&coeffs.l2r.expect("defined for i <= D-1"), &beta2)?);
        }
    }
    let f = vec![ratio(&td.rho, &beta2)?; d];
    Ok((ParameterMatrix::new(d, e_minus, e_plus), f))
}

/// Verifies `e_i^- RL^2 + LRL + e_i^+ L^2R = f_i L` on `E*_i V` and the
/// transposed family `e_i^- R^2L + RLR + e_i^+ LR^2 = f_i R` on `E*_{i-1} V`,
/// for 1 <= i <= D, as exact matrix identities.
pub fn verify_uniform_on_graph(
    sub: &Subconstituent,
    prod: &LrProducts,
    u: &ParameterMatrix,
    f: &[ExactScalar],
) -> Result<(), IdentityViolation> {
    let d = sub.diameter;
    for i in 1..=d {
        let em = u.e_minus(i);
        let ep = u.e_plus(i);
        let m = prod
            .rl2
            .scale(&em)
            .add(&prod.lrl)
            .add(&prod.l2r.scale(&ep))
            .sub(&sub.lowering.scale(&f[i - 1]));
        residual_check(&sub.mask_cols(i as isize, &m), "uniform equation", Some(i))?;
        let mt = prod
            .r2l
            .scale(&em)
            .add(&prod.rlr)
            .add(&prod.lr2.scale(&ep))
            .sub(&sub.raising.scale(&f[i - 1]));
        residual_check(
            &sub.mask_cols(i as isize - 1, &mt),
            "transposed uniform equation",
            Some(i),
        )?;
    }
    Ok(())
}

/// Result of the dependency-space oracle on one subconstituent.
#[derive(Debug, Clone)]
pub struct DependencyAnalysis {
    pub i: usize,
    /// which of RL^2 E*_i, LRL E*_i, L^2R E*_i, L E*_i vanish identically
    pub zero_terms: [bool; 4],
    /// basis of the full dependency space of the four matrices
    pub basis: Vec<[ExactScalar; 4]>,
    /// the unique (up to scale) dependency supported on the nonvanishing
    /// terms, when it exists
    pub canonical: Option<[ExactScalar; 4]>,
}

impl DependencyAnalysis {
    /// Whether the coefficient tuple lies in the span of the computed
    /// dependency basis. Membership is decided by elimination over the
    /// four-dimensional coefficient space, independently of any matrix
    /// residual computation.
    pub fn contains(&self, tuple: &[ExactScalar; 4]) -> bool {
        let mut rows: Vec<[ExactScalar; 4]> = self.basis.clone();
        let mut target = tuple.clone();
        let mut col = 0;
        let mut row = 0;
        while col < 4 && row < rows.len() {
            if let Some(pivot) = (row..rows.len()).find(|&r| !rows[r][col].is_zero()) {
                rows.swap(row, pivot);
                let inv = rows[row][col].inv().expect("pivot nonzero");
                for c in 0..4 {
                    rows[row][c] = &rows[row][c] * &inv;
                }
                for r in 0..rows.len() {
                    if r != row && !rows[r][col].is_zero() {
                        let factor = rows[r][col].clone();
                        for c in 0..4 {
                            rows[r][c] = &rows[r][c] - &(&factor * &rows[row][c]);
                        }
                    }
                }
                if !target[col].is_zero() {
                    let factor = target[col].clone();
                    for c in 0..4 {
                        target[c] = &target[c] - &(&factor * &rows[row][c]);
                    }
                }
                row += 1;
            }
            col += 1;
        }
        target.iter().all(ExactScalar::is_zero)
    }

    /// Canonical dependency rescaled so the LRL coefficient is 1, presented
    /// as `(e_minus, 1, e_plus, f)` with
    /// `e^- RL^2 + LRL + e^+ L^2R = f L` on `E*_i V`.
    pub fn normalized(&self) -> Option<[ExactScalar; 4]> {
        let c = self.canonical.as_ref()?;
        if c[1].is_zero() {
            return None;
        }
        let inv = c[1].inv().ok()?;
        Some([
            &c[0] * &inv,
            ExactScalar::one(),
            &c[2] * &inv,
            -&(&c[3] * &inv),
        ])
    }

    /// True when every dependency has LRL coefficient zero.
    pub fn lrl_forced_zero(&self) -> bool {
        self.canonical
            .as_ref()
            .map(|c| c[1].is_zero())
            .unwrap_or(false)
    }
}

/// Independent oracle for the dependency structure: treats
/// `RL^2 E*_i, LRL E*_i, L^2R E*_i, L E*_i` as vectors and computes an exact
/// basis of their linear dependency space by Gaussian elimination.
pub fn brute_force_dependencies(
    sub: &Subconstituent,
    prod: &LrProducts,
    i: usize,
) -> DependencyAnalysis {
    let ii = i as isize;
    let mats = [
        sub.mask_cols(ii, &prod.rl2),
        sub.mask_cols(ii, &prod.lrl),
        sub.mask_cols(ii, &prod.l2r),
        sub.mask_cols(ii, &sub.lowering),
    ];
    let zero_terms = [
        mats[0].is_zero(),
        mats[1].is_zero(),
        mats[2].is_zero(),
        mats[3].is_zero(),
    ];
    let refs: Vec<&Matrix> = mats.iter().collect();
    let basis: Vec<[ExactScalar; 4]> = dependency_space(&refs)
        .into_iter()
        .map(|v| {
            let mut arr = [
                ExactScalar::zero(),
                ExactScalar::zero(),
                ExactScalar::zero(),
                ExactScalar::zero(),
            ];
            arr.clone_from_slice(&v);
            arr
        })
        .collect();
    // dependencies among the nonvanishing terms only
    let nonzero: Vec<usize> = (0..4).filter(|&t| !zero_terms[t]).collect();
    let sub_refs: Vec<&Matrix> = nonzero.iter().map(|&t| &mats[t]).collect();
    let sub_deps = dependency_space(&sub_refs);
    let canonical = if sub_deps.len() == 1 {
        let mut arr = [
            ExactScalar::zero(),
            ExactScalar::zero(),
            ExactScalar::zero(),
            ExactScalar::zero(),
        ];
        for (slot, value) in nonzero.iter().zip(&sub_deps[0]) {
            arr[*slot] = value.clone();
        }
        Some(arr)
    } else {
        None
    };
    DependencyAnalysis {
        i,
        zero_terms,
        basis,
        canonical,
    }
}

/// Determinant of the principal submatrix `(e_{ij})_{r <= i,j <= p}` of the
/// parameter matrix, by the tridiagonal determinant recurrence
/// `det_d = det_{d-1} - e^+ e^- det_{d-2}`.
pub fn principal_minor_det(u: &ParameterMatrix, r: usize, p: usize) -> ExactScalar {
    assert!(1 <= r && r <= p && p <= u.d);
    let mut prev = ExactScalar::one(); // empty block
    let mut cur = ExactScalar::one(); // 1x1 block, unit diagonal
    for row in r + 1..=p {
        let next = &cur - &(&u.e_plus(row - 1) * &u.e_minus(row) * &prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// `(a)_n = a (a+1) ... (a+n-1)`.
fn pochhammer(a: &ExactScalar, n: usize) -> ExactScalar {
    let mut acc = ExactScalar::one();
    for j in 0..n {
        acc = &acc * &(a + &ExactScalar::from_int(j as i64));
    }
    acc
}

/// `(a; q)_n = (1-a)(1-qa) ... (1-q^{n-1}a)`.
fn q_pochhammer(a: &ExactScalar, q: &ExactScalar, n: usize) -> ExactScalar {
    let mut acc = ExactScalar::one();
    let mut term = a.clone();
    for _ in 0..n {
        acc = &acc * &(ExactScalar::one() - &term);
        term = &term * q;
    }
    acc
}

/// Everything the closed determinant forms and parameter tables need to know
/// about one case.
#[derive(Debug, Clone)]
pub struct CaseContext {
    pub label: CaseLabel,
    pub d: usize,
    pub k: ExactScalar,
    pub c2: ExactScalar,
    pub theta1: ExactScalar,
    pub qs: Option<QsParams>,
}

/// Closed form for the determinant of `(e_{ij})_{r <= i,j <= p}`, case by
/// case. `None` when the label carries no closed form (`BetaMinus2`).
pub fn closed_form_det(ctx: &CaseContext, r: usize, p: usize) -> Option<ExactScalar> {
    let span = p - r; // block size minus one
    let int = ExactScalar::from_int;
    let half = ExactScalar::ratio(1, 2);
    match ctx.label {
        CaseLabel::I => {
            // (p - r + 2) / 2^{p-r+1}
            Some(
                int(span as i64 + 2)
                    .checked_div(&int(2).pow(span as u32 + 1))
                    .expect("power of two"),
            )
        }
        CaseLabel::II => {
            let d = ctx.d as i64;
            let num = int(span as i64 + 2)
                * int(2 * d - r as i64 - p as i64 + 1)
                * pochhammer(&int(d - p as i64 + 1), span);
            let den = int(2).pow(span as u32 + 2)
                * pochhammer(&(int(d - p as i64) + &half), span + 1);
            Some(num.checked_div(&den).expect("nonzero Pochhammer"))
        }
        CaseLabel::III => {
            let k = &ctx.k;
            let km1 = k - &ExactScalar::one();
            match span {
                0 => Some(ExactScalar::one()),
                1 => Some(k.checked_div(&(int(2) * &km1)).expect("k > 1")),
                2 => Some(ExactScalar::one().checked_div(&km1).expect("k > 1")),
                _ => None,
            }
        }
        CaseLabel::IV | CaseLabel::V | CaseLabel::IVprime => {
            let k = &ctx.k;
            let t1 = &ctx.theta1;
            let c2 = &ctx.c2;
            let km1 = k - &ExactScalar::one();
            let t1p1 = t1 + &ExactScalar::one();
            let value = match (r, p) {
                (r, p) if r == p => ExactScalar::one(),
                (1, 2) => (k * t1).checked_div(&(&km1 * &t1p1)).ok()?,
                (2, 3) => k.checked_div(&(c2 * &t1p1)).ok()?,
                (1, 3) => (t1 * &(k - t1)).checked_div(&(&km1 * c2)).ok()?,
                _ => return None,
            };
            Some(value)
        }
        CaseLabel::Other => {
            let qs = ctx.qs.as_ref()?;
            let q = &qs.q;
            let s = &qs.s_star;
            let q2 = q * q;
            let num = (q.pow(span as u32 + 2) - ExactScalar::one())
                * (ExactScalar::one() - s * &q.pow((p + r) as u32))
                * q_pochhammer(&(s * &q.pow(2 * r as u32 + 1)), &q2, span);
            let den = (q + &ExactScalar::one()).pow(span as u32 + 1)
                * (q - &ExactScalar::one())
                * q_pochhammer(&(s * &q.pow(2 * r as u32)), &q2, span + 1);
            num.checked_div(&den).ok()
        }
        CaseLabel::BetaMinus2 => None,
    }
}

/// Expected parameter-matrix entries and f value for a case, from the
/// per-case tables. Returns `(e_minus at i, e_plus at i, f)` evaluators.
pub fn table_entries(
    ctx: &CaseContext,
) -> Option<(
    Box<dyn Fn(usize) -> ExactScalar + '_>,
    Box<dyn Fn(usize) -> ExactScalar + '_>,
    ExactScalar,
)> {
    let int = ExactScalar::from_int;
    match ctx.label {
        CaseLabel::I => Some((
            Box::new(|_| ExactScalar::ratio(-1, 2)),
            Box::new(|_| ExactScalar::ratio(-1, 2)),
            ExactScalar::one(),
        )),
        CaseLabel::II => {
            let d = ctx.d as i64;
            Some((
                Box::new(move |i| {
                    ExactScalar::ratio(i as i64 - d - 2, 2 * d - 2 * i as i64 + 1)
                }),
                Box::new(move |i| {
                    ExactScalar::ratio(i as i64 - d + 1, 2 * d - 2 * i as i64 + 1)
                }),
                int(4),
            ))
        }
        CaseLabel::III => {
            let k = ctx.k.clone();
            let em = {
                let k = k.clone();
                move |i: usize| match i {
                    2 => (int(2) - &k).checked_div(&int(2)).expect("nonzero"),
                    3 => ExactScalar::one()
                        .checked_div(&(ExactScalar::one() - &k))
                        .expect("k != 1"),
                    _ => unreachable!("D = 3"),
                }
            };
            let ep = move |i: usize| match i {
                1 => ExactScalar::one()
                    .checked_div(&(ExactScalar::one() - &k))
                    .expect("k != 1"),
                2 => (int(2) - &k).checked_div(&int(2)).expect("nonzero"),
                _ => unreachable!("D = 3"),
            };
            Some((Box::new(em), Box::new(ep), ExactScalar::one()))
        }
        CaseLabel::IV | CaseLabel::V | CaseLabel::IVprime => {
            let (k, t1, c2) = (ctx.k.clone(), ctx.theta1.clone(), ctx.c2.clone());
            let em = {
                let (k, t1, c2) = (k.clone(), t1.clone(), c2.clone());
                move |i: usize| match i {
                    2 => (&t1 - &k + ExactScalar::one())
                        .checked_div(&(&t1 + &ExactScalar::one()))
                        .expect("theta_1 != -1"),
                    3 => -&(&t1 * &t1).checked_div(&c2).expect("c2 > 0"),
                    _ => unreachable!("D = 3"),
                }
            };
            let ep = move |i: usize| match i {
                1 => ExactScalar::one()
                    .checked_div(&(ExactScalar::one() - &k))
                    .expect("k != 1"),
                2 => (&t1 - &c2)
                    .checked_div(&(&t1 * &(&t1 + &ExactScalar::one())))
                    .expect("theta_1 != 0, -1"),
                _ => unreachable!("D = 3"),
            };
            let f = &ctx.theta1 * &ctx.theta1;
            Some((Box::new(em), Box::new(ep), f))
        }
        CaseLabel::Other => {
            let qs = ctx.qs.as_ref()?.clone();
            let d = ctx.d;
            let em = {
                let qs = qs.clone();
                move |i: usize| {
                    let (q, s) = (&qs.q, &qs.s_star);
                    let num = -&(q * q * (ExactScalar::one() - s * &q.pow(2 * i as u32 - 3)));
                    let den =
                        (q + &ExactScalar::one()) * (ExactScalar::one() - s * &q.pow(2 * i as u32));
                    num.checked_div(&den).expect("constraint s* q^i != 1")
                }
            };
            let ep = {
                let qs = qs.clone();
                move |i: usize| {
                    let (q, s) = (&qs.q, &qs.s_star);
                    let num = -&(ExactScalar::one() - s * &q.pow(2 * i as u32 + 3));
                    let den = q
                        * (q + &ExactScalar::one())
                        * (ExactScalar::one() - s * &q.pow(2 * i as u32));
                    num.checked_div(&den).expect("constraint s* q^i != 1")
                }
            };
            let (q, s) = (&qs.q, &qs.s_star);
            let one = ExactScalar::one();
            let fnum = q.pow(d as u32 - 1) * (&one - &(s * &q.pow(3))).pow(2);
            let fden = (&one - &(s * &q.pow(d as u32 + 2))).pow(2);
            let f = fnum.checked_div(&fden).expect("constraint s* q^i != 1");
            Some((Box::new(em), Box::new(ep), f))
        }
        CaseLabel::BetaMinus2 => None,
    }
}

/// Solves for `q` from `q^2 - beta q + 1 = 0` with `|q| > 1`, then for `s*`
/// (linear in the gamma* expression), derives h and h*, and re-verifies all
/// of the parametrization against the graph's actual data:
/// b_i, c_i, theta_i, theta*_i, gamma*, rho, rho*, and the constraints
/// `|q| > 1`, `s* q^i != 1` for `2 <= i <= 2D+1`, `s* q != 1`.
pub fn solve_qs(
    td: &TdParams,
    theta: &[ExactScalar],
    theta_star: &[ExactScalar],
    ia: &IntersectionArray,
) -> Result<QsParams, Error> {
    let d = ia.diameter;
    let one = ExactScalar::one();
    let disc = &td.beta * &td.beta - ExactScalar::from_int(4);
    if disc.sign() < 0 {
        return Err(Error::UnsupportedField(format!(
            "beta^2 - 4 = {disc} is negative: no real q exists"
        )));
    }
    let root = disc.sqrt_exact().map_err(|e| {
        Error::UnsupportedField(format!("beta^2 - 4 = {disc} has no exact square root: {e}"))
    })?;
    // both candidates; their product is 1, so |q| > 1 picks at most one
    let half = ExactScalar::ratio(1, 2);
    let mut q = None;
    for cand in [
        td.beta.checked_add(&root).map(|v| &v * &half),
        td.beta.checked_sub(&root).map(|v| &v * &half),
    ] {
        let cand = cand.map_err(|e| Error::UnsupportedField(e.to_string()))?;
        // |q| > 1 iff (q-1)(q+1) > 0
        if ((&cand - &one) * (&cand + &one)).sign() > 0 {
            q = Some(cand);
            break;
        }
    }
    let q = q.ok_or_else(|| {
        Error::invalid(format!("beta = {} admits no q with |q| > 1", td.beta))
    })?;

    let qpow = |e: usize| q.pow(e as u32);
    let c_term = (&q - &one) * (qpow(d - 2) + &one);
    let denom = &td.gamma_star * &qpow(2 * d) + &c_term * &qpow(d + 1);
    if denom.is_zero() {
        return Err(Error::internal("degenerate linear system for s*"));
    }
    let s_star = ratio(&(&td.gamma_star - &c_term), &denom)?;

    // constraints before using them as denominators
    for i in 1..=2 * d + 1 {
        if &s_star * &qpow(i) == one {
            return Err(Error::internal(format!("constraint s* q^{i} != 1 violated")));
        }
    }

    let h = ratio(
        &(&one - &(&s_star * &qpow(3))),
        &(&(&q - &one) * &(&one - &(&s_star * &qpow(d + 2)))),
    )?;
    let h_star = ratio(
        &(&(&qpow(d) + &qpow(2)) * &(&qpow(d) + &q)),
        &(&(&q * &(&(&q * &q) - &one)) * &(&one - &(&s_star * &qpow(2 * d)))),
    )?;

    // gamma*, rho, rho* in terms of q and s*
    let gamma_star = ratio(
        &(&(&(&q - &one) * &(&qpow(d - 2) + &one)) * &(&one + &(&s_star * &qpow(d + 1)))),
        &(&one - &(&s_star * &qpow(2 * d))),
    )?;
    if gamma_star != td.gamma_star {
        return Err(Error::internal("gamma* does not match its q, s* form"));
    }
    let rho = ratio(
        &(&(&qpow(d - 2) * &(&q + &one).pow(2)) * &(&one - &(&s_star * &qpow(3))).pow(2)),
        &(&one - &(&s_star * &qpow(d + 2))).pow(2),
    )?;
    if rho != td.rho {
        return Err(Error::internal("rho does not match its q, s* form"));
    }
    let rho_star = ratio(
        &(&(&q * &(&qpow(d - 2) + &one).pow(2)) * &(&one - &(&s_star * &qpow(2)))),
        &(&one - &(&s_star * &qpow(2 * d))),
    )?;
    if rho_star != td.rho_star {
        return Err(Error::internal("rho* does not match its q, s* form"));
    }

    // intersection numbers: b_0 = h(q^D - 1) = c_D, then b_i and c_i
    let b0 = &h * &(&qpow(d) - &one);
    if b0 != ExactScalar::from_int(ia.valency() as i64)
        || b0 != ExactScalar::from_int(ia.c_at(d) as i64)
    {
        return Err(Error::internal("b_0 = h(q^D - 1) = c_D fails"));
    }
    for i in 1..=d - 1 {
        let bden = &one - &(&s_star * &qpow(2 * i + 1));
        let bi = ratio(
            &(&(&h * &(&qpow(d) - &qpow(i))) * &(&one - &(&s_star * &qpow(i + 1)))),
            &bden,
        )?;
        if bi != ExactScalar::from_int(ia.b_at(i) as i64) {
            return Err(Error::internal(format!("b_{i} does not match its q, s* form")));
        }
        let ci = ratio(
            &(&(&h * &(&qpow(i) - &one)) * &(&one - &(&s_star * &qpow(d + i + 1)))),
            &bden,
        )?;
        if ci != ExactScalar::from_int(ia.c_at(i) as i64) {
            return Err(Error::internal(format!("c_{i} does not match its q, s* form")));
        }
    }
    // eigenvalues and dual eigenvalues
    let q_inv = q.inv().map_err(Error::from)?;
    for i in 0..=d {
        let ti = &h * &(&qpow(d - i) - &qpow(i));
        if ti != theta[i] {
            return Err(Error::internal(format!("theta_{i} does not match h(q^(D-i) - q^i)")));
        }
        let tsi = &theta_star[0]
            + &(&(&(&h_star * &(&one - &qpow(i))) * &(&one - &(&s_star * &qpow(i + 1))))
                * &q_inv.pow(i as u32));
        if tsi != theta_star[i] {
            return Err(Error::internal(format!(
                "theta*_{i} does not match its q, s* form"
            )));
        }
    }
    let ts0 = ratio(
        &(&(&h_star * &(&qpow(d) - &one)) * &(&one - &(&s_star * &qpow(2)))),
        &(&q * &(&qpow(d - 1) + &one)),
    )?;
    if ts0 != theta_star[0] {
        return Err(Error::internal("theta*_0 does not match its q, s* form"));
    }
    Ok(QsParams {
        q,
        s_star,
        h,
        h_star,
    })
}

/// All special-case labels matched by the intersection array and eigenvalue
/// ordering. Labels can overlap; `Other` is returned alone when nothing
/// matches.
pub fn classify_case(ia: &IntersectionArray, theta: &[ExactScalar]) -> Vec<CaseLabel> {
    let d = ia.diameter;
    let int = ExactScalar::from_int;
    let mut labels = Vec::new();
    let is_hypercube_array = (0..d).all(|i| ia.b[i] == (d - i) as u64)
        && (1..=d).all(|i| ia.c_at(i) == i as u64);
    if is_hypercube_array {
        if (0..=d).all(|i| theta[i] == int(d as i64 - 2 * i as i64)) {
            labels.push(CaseLabel::I);
        }
        if d % 2 == 0
            && (0..=d).all(|i| {
                let v = int(d as i64 - 2 * i as i64);
                theta[i] == if i % 2 == 0 { v } else { -v }
            })
        {
            labels.push(CaseLabel::BetaMinus2);
        }
    }
    let is_folded_array = (0..d).all(|i| ia.b[i] == (2 * d - i) as u64)
        && (1..d).all(|i| ia.c_at(i) == i as u64)
        && ia.c_at(d) == 2 * d as u64;
    if is_folded_array && (0..=d).all(|i| theta[i] == int(2 * d as i64 - 4 * i as i64)) {
        labels.push(CaseLabel::II);
    }
    if d == 3 {
        let k = int(ia.valency() as i64);
        if ia.b[2] == 1 {
            if theta[1] == int(1) && theta[2] == int(-1) {
                labels.push(CaseLabel::III);
            }
        } else {
            let b2 = int(ia.b[2] as i64);
            let sqrt_b2 = b2.sqrt_exact().expect("b_2 >= 0");
            if theta[1] == sqrt_b2 {
                // McFarland shape: k = t(t+1) and c_2 = t with t >= 2
                let t = int(ia.c_at(2) as i64);
                let mcfarland = ia.c_at(2) >= 2
                    && k == &t * &(&t + &ExactScalar::one())
                    && theta[1] == t;
                labels.push(if mcfarland {
                    CaseLabel::IVprime
                } else {
                    CaseLabel::IV
                });
            } else if theta[1] == -&sqrt_b2 {
                labels.push(CaseLabel::V);
            }
        }
    }
    if labels.is_empty() {
        labels.push(CaseLabel::Other);
    }
    labels.sort();
    labels
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(vals: &[i64]) -> Vec<ExactScalar> {
        vals.iter().map(|&v| ExactScalar::from_int(v)).collect()
    }

    fn hypercube_ia(d: usize) -> IntersectionArray {
        let mut k = vec![1u64];
        for i in 0..d {
            k.push(k[i] * (d - i) as u64 / (i + 1) as u64);
        }
        IntersectionArray {
            diameter: d,
            b: (0..d).map(|i| (d - i) as u64).collect(),
            c: (1..=d).map(|i| i as u64).collect(),
            a: vec![0; d + 1],
            k,
        }
    }

    #[test]
    fn params_for_natural_hypercube_ordering() {
        let theta = ints(&[4, 2, 0, -2, -4]);
        let td = tridiagonal_params(&theta, &theta).unwrap();
        assert_eq!(td.beta, ExactScalar::from_int(2));
        assert_eq!(td.gamma_star, ExactScalar::zero());
        assert_eq!(td.rho, ExactScalar::from_int(4));
        assert_eq!(td.rho_star, ExactScalar::from_int(4));
    }

    #[test]
    fn params_for_alternate_hypercube_ordering() {
        let theta = ints(&[4, -2, 0, 2, -4]);
        let td = tridiagonal_params(&theta, &theta).unwrap();
        assert_eq!(td.beta, ExactScalar::from_int(-2));
        assert_eq!(td.rho, ExactScalar::from_int(4));
    }

    #[test]
    fn params_for_folded_cube() {
        let theta = ints(&[6, 2, -2, -6]);
        let theta_star = ints(&[15, 5, -1, -3]);
        let td = tridiagonal_params(&theta, &theta_star).unwrap();
        assert_eq!(td.beta, ExactScalar::from_int(2));
        assert_eq!(td.gamma_star, ExactScalar::from_int(4));
        assert_eq!(td.rho, ExactScalar::from_int(16));
        assert_eq!(td.rho_star, ExactScalar::from_int(20));
    }

    #[test]
    fn inconsistent_ordering_rejected() {
        // natural ordering of the Desargues spectrum is not Q-polynomial
        let theta = ints(&[3, 2, 1, -1, -2, -3]);
        assert!(tridiagonal_params(&theta, &theta).is_err());
    }

    #[test]
    fn candidate_for_case_ii_d3() {
        let theta = ints(&[6, 2, -2, -6]);
        let theta_star = ints(&[15, 5, -1, -3]);
        let td = tridiagonal_params(&theta, &theta_star).unwrap();
        let (u, f) = build_uniform_candidate(&td, &theta_star).unwrap();
        assert_eq!(u.e_minus(2), ExactScalar::from_int(-1));
        assert_eq!(u.e_minus(3), ExactScalar::from_int(-2));
        assert_eq!(u.e_plus(1), ExactScalar::ratio(-1, 5));
        assert_eq!(u.e_plus(2), ExactScalar::zero());
        assert_eq!(f, vec![ExactScalar::from_int(4); 3]);
        assert!(u.off_diagonal_chain_nonzero());
        assert_eq!(u.zero_entries(), vec![(2, '+')]);
    }

    #[test]
    fn candidate_for_case_i() {
        let theta = ints(&[4, 2, 0, -2, -4]);
        let td = tridiagonal_params(&theta, &theta).unwrap();
        let (u, f) = build_uniform_candidate(&td, &theta).unwrap();
        for i in 2..=4 {
            assert_eq!(u.e_minus(i), ExactScalar::ratio(-1, 2));
        }
        for i in 1..=3 {
            assert_eq!(u.e_plus(i), ExactScalar::ratio(-1, 2));
        }
        assert_eq!(f[0], ExactScalar::one());
    }

    #[test]
    fn beta_minus_two_candidate_undefined() {
        let theta = ints(&[4, -2, 0, 2, -4]);
        let td = tridiagonal_params(&theta, &theta).unwrap();
        assert!(build_uniform_candidate(&td, &theta).is_err());
    }

    #[test]
    fn determinants_case_i() {
        let theta = ints(&[4, 2, 0, -2, -4]);
        let td = tridiagonal_params(&theta, &theta).unwrap();
        let (u, _) = build_uniform_candidate(&td, &theta).unwrap();
        let ctx = CaseContext {
            label: CaseLabel::I,
            d: 4,
            k: ExactScalar::from_int(4),
            c2: ExactScalar::from_int(2),
            theta1: ExactScalar::from_int(2),
            qs: None,
        };
        for r in 1..=4 {
            for p in r..=4 {
                let direct = principal_minor_det(&u, r, p);
                let closed = closed_form_det(&ctx, r, p).unwrap();
                assert_eq!(direct, closed, "(r,p)=({r},{p})");
            }
        }
        // full determinant (D+1)/2^D
        assert_eq!(principal_minor_det(&u, 1, 4), ExactScalar::ratio(5, 16));
    }

    #[test]
    fn determinants_case_ii_and_iv_agree_on_folded_6_cube() {
        let theta = ints(&[6, 2, -2, -6]);
        let theta_star = ints(&[15, 5, -1, -3]);
        let td = tridiagonal_params(&theta, &theta_star).unwrap();
        let (u, _) = build_uniform_candidate(&td, &theta_star).unwrap();
        let ctx2 = CaseContext {
            label: CaseLabel::II,
            d: 3,
            k: ExactScalar::from_int(6),
            c2: ExactScalar::from_int(2),
            theta1: ExactScalar::from_int(2),
            qs: None,
        };
        let ctx4 = CaseContext {
            label: CaseLabel::IVprime,
            ..ctx2.clone()
        };
        for r in 1..=3 {
            for p in r..=3 {
                let direct = principal_minor_det(&u, r, p);
                assert_eq!(direct, closed_form_det(&ctx2, r, p).unwrap());
                assert_eq!(direct, closed_form_det(&ctx4, r, p).unwrap());
            }
        }
    }

    #[test]
    fn case_labels() {
        let h4 = hypercube_ia(4);
        assert_eq!(
            classify_case(&h4, &ints(&[4, 2, 0, -2, -4])),
            vec![CaseLabel::I]
        );
        assert_eq!(
            classify_case(&h4, &ints(&[4, -2, 0, 2, -4])),
            vec![CaseLabel::BetaMinus2]
        );
        let h3 = hypercube_ia(3);
        // the 3-cube is also the crown graph: labels I and III both match
        assert_eq!(
            classify_case(&h3, &ints(&[3, 1, -1, -3])),
            vec![CaseLabel::I, CaseLabel::III]
        );
        let folded3 = IntersectionArray {
            diameter: 3,
            b: vec![6, 5, 4],
            c: vec![1, 2, 6],
            a: vec![0; 4],
            k: vec![1, 6, 15, 10],
        };
        assert_eq!(
            classify_case(&folded3, &ints(&[6, 2, -2, -6])),
            vec![CaseLabel::II, CaseLabel::IVprime]
        );
        assert_eq!(
            classify_case(&folded3, &ints(&[6, -2, 2, -6])),
            vec![CaseLabel::V]
        );
        let heawood = IntersectionArray {
            diameter: 3,
            b: vec![3, 2, 2],
            c: vec![1, 1, 3],
            a: vec![0; 4],
            k: vec![1, 3, 6, 4],
        };
        let r2 = ExactScalar::from_int(2).sqrt_exact().unwrap();
        let heawood_theta = vec![
            ExactScalar::from_int(3),
            r2.clone(),
            -&r2,
            ExactScalar::from_int(-3),
        ];
        assert_eq!(classify_case(&heawood, &heawood_theta), vec![CaseLabel::IV]);
    }

    #[test]
    fn qs_rejected_for_case_i_parameters() {
        // beta = 2 gives q = 1, violating |q| > 1
        let theta = ints(&[4, 2, 0, -2, -4]);
        let td = tridiagonal_params(&theta, &theta).unwrap();
        let ia = hypercube_ia(4);
        assert!(solve_qs(&td, &theta, &theta, &ia).is_err());
    }
}
