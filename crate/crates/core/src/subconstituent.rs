//! Subconstituent data for a base vertex: dual idempotents, dual adjacency
//! matrix, dual eigenvalues, and the lowering/raising decomposition A = L + R.
//!
//! The poset order on vertices is `y <= z` iff y lies on a geodesic from the
//! base vertex to z; L and R are the shell-decreasing and shell-increasing
//! parts of A with respect to that grading. Everything asserted here is a
//! structural identity of the bipartite case and aborts the pipeline on
//! failure.

use crate::error::Error;
use crate::exact::ExactScalar;
use crate::graph::{DrgData, Graph};
use crate::matrix::Matrix;

/// Distance shells, dual idempotents, and the L/R decomposition for one base
/// vertex.
#[derive(Debug, Clone)]
pub struct Subconstituent {
    pub base: usize,
    pub diameter: usize,
    /// shell index of each vertex
    pub shell_of: Vec<usize>,
    pub shells: Vec<Vec<u32>>,
    pub lowering: Matrix,
    pub raising: Matrix,
}

impl Subconstituent {
    pub fn new(g: &Graph, drg: &DrgData, base: usize) -> Result<Self, Error> {
        let n = g.vertex_count();
        if base >= n {
            return Err(Error::invalid(format!("base vertex {base} out of range")));
        }
        let d = drg.ia.diameter;
        let shell_of: Vec<usize> = (0..n).map(|v| drg.dist[base][v]).collect();
        let mut shells = vec![Vec::new(); d + 1];
        for (v, &s) in shell_of.iter().enumerate() {
            shells[s].push(v as u32);
        }
        // dual idempotent facts: the shells partition the vertex set and the
        // trace of E*_i is the shell size k_i
        for (i, shell) in shells.iter().enumerate() {
            if shell.len() as u64 != drg.ia.k[i] {
                return Err(Error::internal(format!(
                    "shell {i} of vertex {base} has size {} != k_{i}",
                    shell.len()
                )));
            }
        }
        let mut lowering = Matrix::zeros(n);
        for y in 0..n {
            for &z in g.neighbors(y) {
                let z = z as usize;
                if shell_of[z] == shell_of[y] + 1 {
                    lowering[(y, z)] = ExactScalar::one();
                }
            }
        }
        let raising = lowering.transpose();
        let sub = Subconstituent {
            base,
            diameter: d,
            shell_of,
            shells,
            lowering,
            raising,
        };
        sub.verify_lr(g, drg)?;
        Ok(sub)
    }

    /// Diagonal of the dual idempotent E*_i (0/1 indicator of shell i; the
    /// all-zero vector outside 0..=D).
    pub fn dual_idempotent_diag(&self, i: isize) -> Vec<ExactScalar> {
        let n = self.shell_of.len();
        let mut diag = vec![ExactScalar::zero(); n];
        if i >= 0 && (i as usize) <= self.diameter {
            for v in 0..n {
                if self.shell_of[v] == i as usize {
                    diag[v] = ExactScalar::one();
                }
            }
        }
        diag
    }

    /// `E*_i M`: rows restricted to shell i.
    pub fn mask_rows(&self, i: isize, m: &Matrix) -> Matrix {
        let n = m.size();
        Matrix::from_fn(n, |r, c| {
            if i >= 0 && self.shell_of[r] == i as usize {
                m[(r, c)].clone()
            } else {
                ExactScalar::zero()
            }
        })
    }

    /// `M E*_i`: columns restricted to shell i.
    pub fn mask_cols(&self, i: isize, m: &Matrix) -> Matrix {
        let n = m.size();
        Matrix::from_fn(n, |r, c| {
            if i >= 0 && self.shell_of[c] == i as usize {
                m[(r, c)].clone()
            } else {
                ExactScalar::zero()
            }
        })
    }

    fn verify_lr(&self, g: &Graph, drg: &DrgData) -> Result<(), Error> {
        let n = g.vertex_count();
        let d = self.diameter;
        let l = &self.lowering;
        let r = &self.raising;
        if *r != l.transpose() {
            return Err(Error::internal("R != L^t"));
        }
        // L + R = A in the bipartite case (no within-shell edges)
        for y in 0..n {
            for z in 0..n {
                let a = ExactScalar::from_int(g.is_adjacent(y, z) as i64);
                if &l[(y, z)] + &r[(y, z)] != a {
                    return Err(Error::internal(format!("(L+R) != A at ({y},{z})")));
                }
            }
        }
        // action on basis vectors: L y^ sums over vertices covered by y,
        // R y^ over vertices covering y, so the column sums are c_i and b_i
        for y in 0..n {
            let i = self.shell_of[y];
            let covered = (0..n).filter(|&w| l[(w, y)].is_one()).count() as u64;
            let covering = (0..n).filter(|&w| r[(w, y)].is_one()).count() as u64;
            if covered != drg.ia.c_at(i) {
                return Err(Error::internal(format!(
                    "vertex {y} covers {covered} != c_{i} vertices"
                )));
            }
            if covering != drg.ia.b_at(i) {
                return Err(Error::internal(format!(
                    "vertex {y} is covered by {covering} != b_{i} vertices"
                )));
            }
        }
        // shell mapping: L E*_i lands in E*_{i-1}V, R E*_i in E*_{i+1}V
        for i in 0..=d as isize {
            let le = self.mask_cols(i, l);
            if self.mask_rows(i - 1, &le) != le {
                return Err(Error::internal(format!("L E*_{i} V not inside E*_{} V", i - 1)));
            }
            let re = self.mask_cols(i, r);
            if self.mask_rows(i + 1, &re) != re {
                return Err(Error::internal(format!("R E*_{i} V not inside E*_{} V", i + 1)));
            }
        }
        // L E*_0 = 0, E*_D L = 0, R E*_D = 0, E*_0 R = 0
        if !self.mask_cols(0, l).is_zero()
            || !self.mask_rows(d as isize, l).is_zero()
            || !self.mask_cols(d as isize, r).is_zero()
            || !self.mask_rows(0, r).is_zero()
        {
            return Err(Error::internal("boundary products of L, R nonzero"));
        }
        Ok(())
    }
}

/// Dual adjacency matrix data for one Q-polynomial idempotent E and base
/// vertex: the diagonal `n * E_{x,y}` and the dual eigenvalue sequence read
/// off shell by shell.
#[derive(Debug, Clone)]
pub struct DualAdjacency {
    pub diag: Vec<ExactScalar>,
    pub theta_star: Vec<ExactScalar>,
}

/// Builds the dual adjacency matrix and verifies: constancy on shells, the
/// eigenvalue relation `A* E*_i = theta*_i E*_i`, distinctness,
/// `theta*_0 = rank E`, and the three-term recurrence
/// `c_i theta*_{i-1} + a_i theta*_i + b_i theta*_{i+1} = theta theta*_i`.
pub fn dual_adjacency(
    sub: &Subconstituent,
    drg: &DrgData,
    e1: &Matrix,
    theta1: &ExactScalar,
    rank_e1: u64,
) -> Result<DualAdjacency, Error> {
    let n = e1.size();
    let x = sub.base;
    let n_scalar = ExactScalar::from_int(n as i64);
    let diag: Vec<ExactScalar> = (0..n).map(|y| &n_scalar * &e1[(x, y)]).collect();
    let d = sub.diameter;
    let mut theta_star = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let shell = &sub.shells[i];
        let value = diag[shell[0] as usize].clone();
        for &y in shell {
            if diag[y as usize] != value {
                return Err(Error::internal(format!(
                    "A* is not constant on shell {i} (ordering not Q-polynomial?)"
                )));
            }
        }
        theta_star.push(value);
    }
    for i in 0..=d {
        for j in i + 1..=d {
            if theta_star[i] == theta_star[j] {
                return Err(Error::internal("dual eigenvalues not distinct"));
            }
        }
    }
    if theta_star[0] != ExactScalar::from_int(rank_e1 as i64) {
        return Err(Error::internal("theta*_0 != rank(E_1)"));
    }
    // recurrence cross-check, an independent route to the same sequence
    let recur = dual_eigenvalues_by_recurrence(drg, theta1, rank_e1);
    if recur != theta_star {
        return Err(Error::internal(
            "dual eigenvalues from A* disagree with the recurrence",
        ));
    }
    Ok(DualAdjacency { diag, theta_star })
}

/// Dual eigenvalue sequence from the recurrence
/// `c_i theta*_{i-1} + a_i theta*_i + b_i theta*_{i+1} = theta theta*_i`
/// seeded with `theta*_0 = rank E`.
pub fn dual_eigenvalues_by_recurrence(
    drg: &DrgData,
    theta1: &ExactScalar,
    rank_e1: u64,
) -> Vec<ExactScalar> {
    let d = drg.ia.diameter;
    let mut ts = Vec::with_capacity(d + 1);
    ts.push(ExactScalar::from_int(rank_e1 as i64));
    for i in 0..d {
        let ci = ExactScalar::from_int(drg.ia.c_at(i) as i64);
        let ai = ExactScalar::from_int(drg.ia.a[i] as i64);
        let bi = ExactScalar::from_int(drg.ia.b[i] as i64);
        let prev = if i == 0 { ExactScalar::zero() } else { ts[i - 1].clone() };
        let next = (theta1 * &ts[i] - ai * &ts[i] - ci * prev)
            .checked_div(&bi)
            .expect("b_i > 0 below the diameter");
        ts.push(next);
    }
    ts
}

/// The products of L and R needed by the dependency analysis, computed once
/// per base vertex.
#[derive(Debug, Clone)]
pub struct LrProducts {
    pub a: Matrix,
    pub a2: Matrix,
    pub a3: Matrix,
    pub rl2: Matrix,
    pub lrl: Matrix,
    pub l2r: Matrix,
    pub r2l: Matrix,
    pub rlr: Matrix,
    pub lr2: Matrix,
}

impl LrProducts {
    pub fn new(sub: &Subconstituent) -> Self {
        let l = &sub.lowering;
        let r = &sub.raising;
        let a = l.add(r);
        let a2 = a.mul(&a);
        let a3 = a.mul(&a2);
        let ll = l.mul(l);
        let lr = l.mul(r);
        let rl = r.mul(l);
        let rr = r.mul(r);
        LrProducts {
            rl2: r.mul(&ll),
            lrl: l.mul(&rl),
            l2r: l.mul(&lr),
            r2l: r.mul(&rl),
            rlr: r.mul(&lr),
            lr2: l.mul(&rr),
            a,
            a2,
            a3,
        }
    }
}

/// Verifies the structural identities relating L, R and the dual idempotents:
///
/// * `E*_i A E*_h = 0` for `|h - i| != 1`;
/// * `E*_{i-1} A E*_i = L E*_i = E*_{i-1} L` and the transposed pair;
/// * `R L^2 E*_i = E*_{i-1} A E*_{i-2} A E*_{i-1} A E*_i` and the analogous
///   expansions of `L R L E*_i`, `L^2 R E*_i`;
/// * `E*_{i-1} A^3 E*_i = (R L^2 + L R L + L^2 R) E*_i`.
pub fn verify_structural_identities(
    sub: &Subconstituent,
    prod: &LrProducts,
) -> Result<(), Error> {
    let d = sub.diameter as isize;
    let a = &prod.a;
    let l = &sub.lowering;
    let r = &sub.raising;
    for i in 0..=d {
        for h in 0..=d {
            if (h - i).abs() != 1 {
                let block = sub.mask_rows(i, &sub.mask_cols(h, a));
                if !block.is_zero() {
                    return Err(Error::internal(format!("E*_{i} A E*_{h} != 0")));
                }
            }
        }
    }
    for i in 1..=d {
        let block = sub.mask_rows(i - 1, &sub.mask_cols(i, a));
        if block != sub.mask_cols(i, l) || block != sub.mask_rows(i - 1, l) {
            return Err(Error::internal(format!("E*_{}AE*_{i} != LE*_{i}", i - 1)));
        }
        let tblock = sub.mask_rows(i, &sub.mask_cols(i - 1, a));
        if tblock != sub.mask_cols(i - 1, r) || tblock != sub.mask_rows(i, r) {
            return Err(Error::internal(format!("E*_{i}AE*_{} != RE*_{}", i - 1, i - 1)));
        }
    }
    // triple products: chain E* A E* A E* A E* with the stated shell indices
    let chain = |s3: isize, s2: isize, s1: isize, s0: isize| -> Matrix {
        let m = sub.mask_rows(s1, &sub.mask_cols(s0, a));
        let m = sub.mask_rows(s2, &a.mul(&m));
        sub.mask_rows(s3, &a.mul(&m))
    };
    for i in 0..=d {
        if sub.mask_cols(i, &prod.rl2) != chain(i - 1, i - 2, i - 1, i) {
            return Err(Error::internal(format!("RL^2 E*_{i} expansion fails")));
        }
        if sub.mask_cols(i, &prod.lrl) != chain(i - 1, i, i - 1, i) {
            return Err(Error::internal(format!("LRL E*_{i} expansion fails")));
        }
        if sub.mask_cols(i, &prod.l2r) != chain(i - 1, i, i + 1, i) {
            return Err(Error::internal(format!("L^2R E*_{i} expansion fails")));
        }
    }
    for i in 1..=d {
        let lhs = sub.mask_rows(i - 1, &sub.mask_cols(i, &prod.a3));
        let rhs = sub.mask_cols(i, &prod.rl2)
            .add(&sub.mask_cols(i, &prod.lrl))
            .add(&sub.mask_cols(i, &prod.l2r));
        if lhs != rhs {
            return Err(Error::internal(format!(
                "E*_{}A^3E*_{i} != (RL^2 + LRL + L^2R)E*_{i}",
                i - 1
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bm::{distance_matrices, eigenvalues, primitive_idempotents};
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

    fn setup(g: &Graph) -> (DrgData, Subconstituent, LrProducts) {
        let drg = g.check_distance_regular(true).unwrap();
        let sub = Subconstituent::new(g, &drg, 0).unwrap();
        let prod = LrProducts::new(&sub);
        (drg, sub, prod)
    }

    #[test]
    fn cube_dual_idempotent_traces() {
        let g = build_hypercube(3).unwrap();
        let (_, sub, _) = setup(&g);
        let sizes: Vec<usize> = sub.shells.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![1, 3, 3, 1]);
        // disjoint supports: E*_i E*_j = 0 for i != j
        for i in 0..=3isize {
            for j in 0..=3isize {
                let di = sub.dual_idempotent_diag(i);
                let dj = sub.dual_idempotent_diag(j);
                let both = di
                    .iter()
                    .zip(&dj)
                    .filter(|(x, y)| x.is_one() && y.is_one())
                    .count();
                assert_eq!(both > 0, i == j);
            }
        }
    }

    #[test]
    fn folded_cube_shell_sizes() {
        let g = build_folded_cube(3).unwrap();
        let (_, sub, _) = setup(&g);
        let sizes: Vec<usize> = sub.shells.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![1, 6, 15, 10]);
    }

    #[test]
    fn cube_l_plus_r_is_a() {
        let g = build_hypercube(3).unwrap();
        let (drg, sub, prod) = setup(&g);
        let dm = distance_matrices(&g, &drg).unwrap();
        assert_eq!(prod.a, dm.0[1]);
        assert_eq!(sub.lowering.add(&sub.raising), dm.0[1]);
    }

    #[test]
    fn structural_identities_hold() {
        for g in [
            build_hypercube(3).unwrap(),
            build_hypercube(4).unwrap(),
            build_folded_cube(3).unwrap(),
            build_incidence_graph(&fano()).unwrap(),
        ] {
            let (_, sub, prod) = setup(&g);
            verify_structural_identities(&sub, &prod).unwrap();
        }
    }

    #[test]
    fn heawood_le0_is_zero() {
        let g = build_incidence_graph(&fano()).unwrap();
        let (_, sub, _) = setup(&g);
        assert!(sub.mask_cols(0, &sub.lowering).is_zero());
    }

    #[test]
    fn dual_adjacency_on_hypercube_alternate_ordering() {
        // for the alternating Q-polynomial ordering of H(4,2) the dual
        // eigenvalues equal the eigenvalues
        let g = build_hypercube(4).unwrap();
        let drg = g.check_distance_regular(true).unwrap();
        let spec = eigenvalues(&drg.ia, 16).unwrap();
        let dm = distance_matrices(&g, &drg).unwrap();
        let idem = primitive_idempotents(&dm.0[1], &spec).unwrap();
        let sub = Subconstituent::new(&g, &drg, 0).unwrap();
        // alternate ordering sigma = [0,3,2,1,4]: theta_1 = -2 (index 3)
        let da = dual_adjacency(&sub, &drg, &idem.0[3], &spec.theta[3], spec.mult[3]).unwrap();
        let expect: Vec<ExactScalar> = [4i64, -2, 0, 2, -4]
            .iter()
            .map(|&v| ExactScalar::from_int(v))
            .collect();
        assert_eq!(da.theta_star, expect);
    }

    #[test]
    fn dual_adjacency_on_folded_cube() {
        let g = build_folded_cube(3).unwrap();
        let drg = g.check_distance_regular(true).unwrap();
        let spec = eigenvalues(&drg.ia, 32).unwrap();
        let dm = distance_matrices(&g, &drg).unwrap();
        let idem = primitive_idempotents(&dm.0[1], &spec).unwrap();
        let sub = Subconstituent::new(&g, &drg, 0).unwrap();
        let da = dual_adjacency(&sub, &drg, &idem.0[1], &spec.theta[1], spec.mult[1]).unwrap();
        let expect: Vec<ExactScalar> = [15i64, 5, -1, -3]
            .iter()
            .map(|&v| ExactScalar::from_int(v))
            .collect();
        assert_eq!(da.theta_star, expect);
    }

    #[test]
    fn non_qpoly_idempotent_rejected() {
        // E_2 of H(4,2) (eigenvalue 0) is not a Q-polynomial E_1: its shell
        // values repeat, so it cannot generate the dual Bose-Mesner algebra
        let g = build_hypercube(4).unwrap();
        let drg = g.check_distance_regular(true).unwrap();
        let spec = eigenvalues(&drg.ia, 16).unwrap();
        let dm = distance_matrices(&g, &drg).unwrap();
        let idem = primitive_idempotents(&dm.0[1], &spec).unwrap();
        let sub = Subconstituent::new(&g, &drg, 0).unwrap();
        assert!(dual_adjacency(&sub, &drg, &idem.0[2], &spec.theta[2], spec.mult[2]).is_err());
    }
}
