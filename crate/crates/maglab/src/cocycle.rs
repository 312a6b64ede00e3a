//! Scalar solutions of the multiplicative system `Z_jk * Z_kl = Z_jl` on the
//! closure of a digraph: kernel-basis solutions, spanning-tree assignments,
//! vertex potentials, and validity checks.
//!
//! All arithmetic in this module is exact rational; floats are confined to
//! the experiment modules.

use std::collections::{BTreeMap, VecDeque};

use num::{BigInt, One, ToPrimitive, Zero};

use crate::digraph::{ClosureCategory, SpanningStructure};
use crate::error::{MagError, Result};
use crate::ratio::{q_pow, Q};
use crate::ratlin::MatQ;

/// The incidence matrix of nondegenerate length-two paths against nonloop
/// closure arcs: each path `(j, k, l)` contributes `+1` at columns `(j, k)`
/// and `(k, l)` and `-1` at `(j, l)`.
#[derive(Debug, Clone)]
pub struct PathIncidence {
    rows: Vec<(usize, usize, usize)>,
    cols: Vec<(usize, usize)>,
    mat: MatQ,
}

impl PathIncidence {
    pub fn rows(&self) -> &[(usize, usize, usize)] {
        &self.rows
    }

    pub fn cols(&self) -> &[(usize, usize)] {
        &self.cols
    }

    pub fn matrix(&self) -> &MatQ {
        &self.mat
    }

    /// True when there are no nondegenerate length-two paths, so every
    /// nondegenerate assignment trivially solves the system.
    pub fn is_trivial(&self) -> bool {
        self.rows.is_empty()
    }
}

pub fn build_incidence(c: &ClosureCategory) -> PathIncidence {
    let rows = c.nondegenerate_paths();
    let cols = c.nonloop_arcs().to_vec();
    let col_index: BTreeMap<(usize, usize), usize> =
        cols.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let mut mat = MatQ::zeros(rows.len(), cols.len());
    for (r, &(j, k, l)) in rows.iter().enumerate() {
        mat[(r, col_index[&(j, k)])] = Q::one();
        mat[(r, col_index[&(k, l)])] = Q::one();
        mat[(r, col_index[&(j, l)])] = -Q::one();
    }
    PathIncidence { rows, cols, mat }
}

/// Integer basis of the kernel of a path-incidence matrix, canonicalized to
/// coprime entries with positive leading coefficient.
#[derive(Debug, Clone)]
pub struct KernelBasis {
    arcs: Vec<(usize, usize)>,
    vectors: Vec<Vec<BigInt>>,
}

impl KernelBasis {
    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn vectors(&self) -> &[Vec<BigInt>] {
        &self.vectors
    }

    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }
}

pub fn kernel_basis(m: &PathIncidence) -> KernelBasis {
    KernelBasis {
        arcs: m.cols.clone(),
        vectors: m.mat.null_space(),
    }
}

/// A nondegenerate scalar enrichment of a closure category: a nonzero
/// rational on every nonloop closure arc, with loops implicitly `1`.
#[derive(Debug, Clone)]
pub struct ScalarEnrichment {
    closure: ClosureCategory,
    values: BTreeMap<(usize, usize), Q>,
}

impl ScalarEnrichment {
    pub fn new(closure: ClosureCategory, values: BTreeMap<(usize, usize), Q>) -> Result<Self> {
        for &(j, k) in closure.nonloop_arcs() {
            match values.get(&(j, k)) {
                None => {
                    return Err(MagError::Invalid(format!(
                        "missing value on closure arc ({}, {})",
                        closure.base().name(j),
                        closure.base().name(k)
                    )))
                }
                Some(v) if v.is_zero() => {
                    return Err(MagError::Degenerate(format!(
                        "arc ({}, {})",
                        closure.base().name(j),
                        closure.base().name(k)
                    )))
                }
                _ => {}
            }
        }
        if values.len() != closure.nonloop_arcs().len() {
            return Err(MagError::Invalid(
                "values on pairs outside the closure".into(),
            ));
        }
        Ok(ScalarEnrichment { closure, values })
    }

    pub fn closure(&self) -> &ClosureCategory {
        &self.closure
    }

    /// The value on `(j, k)`; loops are the monoidal unit.
    pub fn value(&self, j: usize, k: usize) -> Option<Q> {
        if j == k {
            return Some(Q::one());
        }
        self.values.get(&(j, k)).cloned()
    }

    pub fn values(&self) -> &BTreeMap<(usize, usize), Q> {
        &self.values
    }
}

/// Evaluates `Z_jk = prod_i c_i ^ y(i)_jk` over a kernel basis.
pub fn solve_from_kernel(
    closure: &ClosureCategory,
    basis: &KernelBasis,
    coeffs: &[Q],
) -> Result<ScalarEnrichment> {
    if coeffs.len() != basis.dimension() {
        return Err(MagError::CoefficientCount {
            got: coeffs.len(),
            want: basis.dimension(),
        });
    }
    if let Some(i) = coeffs.iter().position(Q::is_zero) {
        return Err(MagError::Degenerate(format!("coefficient c_{i}")));
    }
    let mut values = BTreeMap::new();
    for (col, &arc) in basis.arcs().iter().enumerate() {
        let mut z = Q::one();
        for (vec, c) in basis.vectors().iter().zip(coeffs) {
            let e = vec[col].to_i64().ok_or_else(|| {
                MagError::Invalid("kernel exponent exceeds i64".into())
            })?;
            z *= q_pow(c, e);
        }
        values.insert(arc, z);
    }
    let enrichment = ScalarEnrichment::new(closure.clone(), values)?;
    expect_cocycle(&enrichment)?;
    Ok(enrichment)
}

/// The spanning-tree assignment: `Z_jk` is the product over the tree path
/// from `j` to `k` of the edge weight raised to the traversal sign.
pub fn tree_assignment(
    closure: &ClosureCategory,
    tree: &SpanningStructure,
    weights: &BTreeMap<(usize, usize), Q>,
) -> Result<ScalarEnrichment> {
    validate_tree_weights(tree, weights)?;
    let mut values = BTreeMap::new();
    for &(j, k) in closure.nonloop_arcs() {
        let mut z = Q::one();
        for ((a, b), sign) in tree.tree_path(j, k)? {
            let edge = if sign >= 0 { (a, b) } else { (b, a) };
            z *= q_pow(&weights[&edge], i64::from(sign));
        }
        values.insert((j, k), z);
    }
    let enrichment = ScalarEnrichment::new(closure.clone(), values)?;
    expect_cocycle(&enrichment)?;
    Ok(enrichment)
}

fn validate_tree_weights(
    tree: &SpanningStructure,
    weights: &BTreeMap<(usize, usize), Q>,
) -> Result<()> {
    for edge in tree.edges() {
        match weights.get(&edge) {
            None => {
                return Err(MagError::Invalid(format!(
                    "missing weight on tree edge {edge:?}"
                )))
            }
            Some(w) if w.is_zero() => {
                return Err(MagError::Degenerate(format!("tree edge {edge:?}")))
            }
            _ => {}
        }
    }
    Ok(())
}

/// Vertex potentials `p` with `Z_jk = p_j^{-1} p_k` on every closure arc.
#[derive(Debug, Clone)]
pub struct Potentials {
    p: Vec<Q>,
    basepoint: usize,
}

impl Potentials {
    pub fn values(&self) -> &[Q] {
        &self.p
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    /// Rebuilds the enrichment `Z_jk = p_j^{-1} p_k` on a closure.
    pub fn rebuild(&self, closure: &ClosureCategory) -> Result<ScalarEnrichment> {
        let values: BTreeMap<(usize, usize), Q> = closure
            .nonloop_arcs()
            .iter()
            .map(|&(j, k)| ((j, k), self.p[j].clone().recip() * &self.p[k]))
            .collect();
        ScalarEnrichment::new(closure.clone(), values)
    }
}

/// Extracts potentials by traversing the underlying undirected graph from the
/// basepoint (other weak components are rooted at their smallest vertex) and
/// then verifying the relation on every closure arc.
pub fn extract_potentials(e: &ScalarEnrichment, basepoint: usize) -> Result<Potentials> {
    let d = e.closure().base();
    let n = d.vertex_count();
    let mut p: Vec<Option<Q>> = vec![None; n];
    let roots = std::iter::once(basepoint).chain(0..n);
    for root in roots {
        if p[root].is_some() {
            continue;
        }
        p[root] = Some(Q::one());
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let pu = p[u].clone().expect("visited");
            let step = |v: usize| -> Option<Q> {
                if u != v && e.closure().has_closure_arc(u, v) {
                    Some(&pu * &e.value(u, v).expect("closure arc"))
                } else if u != v && e.closure().has_closure_arc(v, u) {
                    Some(&pu / &e.value(v, u).expect("closure arc"))
                } else {
                    None
                }
            };
            for &v in d.out_neighbors(u).iter().chain(d.in_neighbors(u)) {
                if p[v].is_none() {
                    if let Some(pv) = step(v) {
                        p[v] = Some(pv);
                        queue.push_back(v);
                    }
                }
            }
        }
    }
    let p: Vec<Q> = p.into_iter().map(|x| x.expect("spanning traversal")).collect();
    for &(j, k) in e.closure().nonloop_arcs() {
        if e.value(j, k).expect("closure arc") != p[j].clone().recip() * &p[k] {
            return Err(MagError::Characterization(
                d.name(j).to_string(),
                d.name(k).to_string(),
            ));
        }
    }
    Ok(Potentials { p, basepoint })
}

/// All triples of nondegenerate length-two paths on which the multiplicative
/// law fails. Empty exactly when the enrichment is a category.
pub fn verify_cocycle(e: &ScalarEnrichment) -> Vec<(usize, usize, usize)> {
    e.closure()
        .nondegenerate_paths()
        .into_iter()
        .filter(|&(j, k, l)| {
            let zjk = e.value(j, k).expect("closure arc");
            let zkl = e.value(k, l).expect("closure arc");
            let zjl = e.value(j, l).expect("closure arc");
            zjk * zkl != zjl
        })
        .collect()
}

fn expect_cocycle(e: &ScalarEnrichment) -> Result<()> {
    match verify_cocycle(e).first() {
        None => Ok(()),
        Some(&(j, k, l)) => {
            let d = e.closure().base();
            Err(MagError::CocycleViolation(
                d.name(j).to_string(),
                d.name(k).to_string(),
                d.name(l).to_string(),
            ))
        }
    }
}

/// Per-cycle diagnostics: values on cycle arcs and products around a
/// fundamental set of directed cycles.
#[derive(Debug, Clone)]
pub struct CycleReport {
    /// Nonloop closure arcs lying on a directed cycle whose value is not `1`.
    pub nonunit_cycle_arcs: Vec<(usize, usize)>,
    /// Fundamental directed cycles (from DFS back arcs) with their products.
    pub cycle_products: Vec<(Vec<(usize, usize)>, Q)>,
}

impl CycleReport {
    pub fn all_products_unit(&self) -> bool {
        self.cycle_products.iter().all(|(_, p)| p.is_one())
    }
}

/// Reports every closure arc in a directed cycle carrying a value other than
/// `1`, and the product of the enrichment around each fundamental directed
/// cycle of the base digraph.
pub fn cycle_unity_report(e: &ScalarEnrichment) -> CycleReport {
    let d = e.closure().base();
    let scc = d.strong_components();
    let nonunit_cycle_arcs: Vec<(usize, usize)> = e
        .closure()
        .nonloop_arcs()
        .iter()
        .copied()
        .filter(|&(j, k)| {
            scc.comp_of[j] == scc.comp_of[k] && !e.value(j, k).expect("closure arc").is_one()
        })
        .collect();

    // Fundamental directed cycles: one per DFS back arc, through tree arcs.
    let n = d.vertex_count();
    let mut cycle_products = Vec::new();
    let mut color = vec![0u8; n]; // 0 unseen, 1 on stack, 2 done
    let mut parent = vec![usize::MAX; n];
    for s in 0..n {
        if color[s] != 0 {
            continue;
        }
        let mut stack = vec![(s, 0usize)];
        color[s] = 1;
        while let Some(&mut (u, ref mut cursor)) = stack.last_mut() {
            if *cursor < d.out_neighbors(u).len() {
                let v = d.out_neighbors(u)[*cursor];
                *cursor += 1;
                if u == v {
                    cycle_products.push((vec![(u, u)], Q::one()));
                } else if color[v] == 0 {
                    color[v] = 1;
                    parent[v] = u;
                    stack.push((v, 0));
                } else if color[v] == 1 {
                    let mut arcs = vec![(u, v)];
                    let mut cur = u;
                    while cur != v {
                        arcs.push((parent[cur], cur));
                        cur = parent[cur];
                    }
                    arcs.reverse();
                    let product = arcs
                        .iter()
                        .map(|&(a, b)| e.value(a, b).expect("cycle arcs are closure arcs"))
                        .product();
                    cycle_products.push((arcs, product));
                }
            } else {
                color[u] = 2;
                stack.pop();
            }
        }
    }
    CycleReport {
        nonunit_cycle_arcs,
        cycle_products,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::Digraph;
    use crate::ratio::{q, q_int};

    fn path3() -> ClosureCategory {
        Digraph::from_index_arcs(3, &[(0, 1), (1, 2)])
            .unwrap()
            .transitive_closure()
    }

    fn weights(list: &[((usize, usize), Q)]) -> BTreeMap<(usize, usize), Q> {
        list.iter().cloned().collect()
    }

    #[test]
    fn incidence_of_path3() {
        let m = build_incidence(&path3());
        assert_eq!(m.rows(), &[(0, 1, 2)]);
        assert_eq!(m.cols(), &[(0, 1), (0, 2), (1, 2)]);
        let row: Vec<i64> = (0..3).map(|j| m.matrix()[(0, j)].to_integer().to_i64().unwrap()).collect();
        assert_eq!(row, vec![1, -1, 1]);
        assert!(!m.is_trivial());
    }

    #[test]
    fn incidence_path4_row_pattern() {
        let c = Digraph::from_index_arcs(4, &[(0, 1), (1, 2), (2, 3)])
            .unwrap()
            .transitive_closure();
        let m = build_incidence(&c);
        assert_eq!(m.rows().len(), 4);
        assert_eq!(m.cols().len(), 6);
        // Row (0,1,2): +1 at (0,1) and (1,2), -1 at (0,2).
        let idx = |arc: (usize, usize)| m.cols().iter().position(|&a| a == arc).unwrap();
        let r = m.rows().iter().position(|&t| t == (0, 1, 2)).unwrap();
        assert_eq!(m.matrix()[(r, idx((0, 1)))], q_int(1));
        assert_eq!(m.matrix()[(r, idx((1, 2)))], q_int(1));
        assert_eq!(m.matrix()[(r, idx((0, 2)))], q_int(-1));
        // Every row: exactly three nonzeros, two +1 and one -1.
        for r in 0..m.rows().len() {
            let nz: Vec<Q> = (0..6)
                .map(|c| m.matrix()[(r, c)].clone())
                .filter(|v| !v.is_zero())
                .collect();
            assert_eq!(nz.len(), 3);
            assert_eq!(nz.iter().cloned().sum::<Q>(), q_int(1));
        }
        assert_eq!(kernel_basis(&m).dimension(), 3);
    }

    #[test]
    fn incidence_trivial_on_two_cycle() {
        let c = Digraph::from_index_arcs(2, &[(0, 1), (1, 0)])
            .unwrap()
            .transitive_closure();
        let m = build_incidence(&c);
        assert!(m.is_trivial());
        let basis = kernel_basis(&m);
        assert_eq!(basis.dimension(), 2);
        for (i, v) in basis.vectors().iter().enumerate() {
            let mut expected = vec![BigInt::from(0); 2];
            expected[i] = BigInt::from(1);
            assert_eq!(v, &expected);
        }
    }

    #[test]
    fn kernel_of_path3_incidence() {
        let m = build_incidence(&path3());
        let basis = kernel_basis(&m);
        assert_eq!(basis.dimension(), 2);
        // Canonical free-variable form over columns ((0,1),(0,2),(1,2)):
        // pivot column (0,1); free columns (0,2) and (1,2).
        assert_eq!(
            basis.vectors()[0],
            vec![BigInt::from(1), BigInt::from(1), BigInt::from(0)]
        );
        assert_eq!(
            basis.vectors()[1],
            vec![BigInt::from(1), BigInt::from(0), BigInt::from(-1)]
        );
        // The reference basis {(1,1,0),(0,1,1)} spans the same kernel: the
        // stack of both bases still has rank 2.
        let stacked = MatQ::from_rows(vec![
            vec![q_int(1), q_int(1), q_int(0)],
            vec![q_int(1), q_int(0), q_int(-1)],
            vec![q_int(1), q_int(1), q_int(0)],
            vec![q_int(0), q_int(1), q_int(1)],
        ]);
        assert_eq!(stacked.rank(), 2);
    }

    #[test]
    fn solve_from_kernel_matches_product_formula() {
        // With the spec's reference basis, c = (2, 3) gives Z = (2, 3, 6) in
        // arc order ((0,1),(1,2),(0,2)).
        let c = path3();
        let basis = KernelBasis {
            arcs: vec![(0, 1), (0, 2), (1, 2)],
            vectors: vec![
                vec![BigInt::from(1), BigInt::from(1), BigInt::from(0)],
                vec![BigInt::from(0), BigInt::from(1), BigInt::from(1)],
            ],
        };
        let e = solve_from_kernel(&c, &basis, &[q_int(2), q_int(3)]).unwrap();
        assert_eq!(e.value(0, 1).unwrap(), q_int(2));
        assert_eq!(e.value(1, 2).unwrap(), q_int(3));
        assert_eq!(e.value(0, 2).unwrap(), q_int(6));
        assert!(verify_cocycle(&e).is_empty());
    }

    #[test]
    fn solve_from_kernel_canonical_basis() {
        let c = path3();
        let basis = kernel_basis(&build_incidence(&c));
        let e = solve_from_kernel(&c, &basis, &[q_int(2), q_int(3)]).unwrap();
        // Independent evaluation of the product formula for this basis:
        // y1 = (1,1,0), y2 = (1,0,-1) over ((0,1),(0,2),(1,2)).
        assert_eq!(e.value(0, 1).unwrap(), q_int(6));
        assert_eq!(e.value(0, 2).unwrap(), q_int(2));
        assert_eq!(e.value(1, 2).unwrap(), q(1, 3));
        assert!(verify_cocycle(&e).is_empty());

        let ones = solve_from_kernel(&c, &basis, &[q_int(1), q_int(1)]).unwrap();
        assert!(ones.values().values().all(Q::is_one));

        assert!(matches!(
            solve_from_kernel(&c, &basis, &[q_int(1)]),
            Err(MagError::CoefficientCount { .. })
        ));
        assert!(matches!(
            solve_from_kernel(&c, &basis, &[q_int(0), q_int(1)]),
            Err(MagError::Degenerate(_))
        ));
    }

    #[test]
    fn positive_coefficients_give_positive_values() {
        use num::Signed;
        let d = Digraph::from_index_arcs(5, &[(0, 1), (1, 2), (2, 3), (1, 4), (4, 3)]).unwrap();
        let c = d.transitive_closure();
        let basis = kernel_basis(&build_incidence(&c));
        let coeffs: Vec<Q> = (0..basis.dimension()).map(|i| q_int(i as i64 + 2)).collect();
        let e = solve_from_kernel(&c, &basis, &coeffs).unwrap();
        assert!(e.values().values().all(|v| v.is_positive()));
    }

    #[test]
    fn tree_assignment_on_path() {
        let c = path3();
        let tree = c.base().spanning_structure(0);
        let e = tree_assignment(
            &c,
            &tree,
            &weights(&[((0, 1), q_int(2)), ((1, 2), q_int(3))]),
        )
        .unwrap();
        assert_eq!(e.value(0, 1).unwrap(), q_int(2));
        assert_eq!(e.value(1, 2).unwrap(), q_int(3));
        assert_eq!(e.value(0, 2).unwrap(), q_int(6));
    }

    #[test]
    fn tree_assignment_all_ones() {
        let c = path3();
        let tree = c.base().spanning_structure(0);
        let e = tree_assignment(
            &c,
            &tree,
            &weights(&[((0, 1), q_int(1)), ((1, 2), q_int(1))]),
        )
        .unwrap();
        assert!(e.values().values().all(Q::is_one));
    }

    #[test]
    fn tree_assignment_two_cycle_reciprocal() {
        let d = Digraph::from_index_arcs(2, &[(0, 1), (1, 0)]).unwrap();
        let c = d.transitive_closure();
        let tree = d.spanning_structure(0);
        let e = tree_assignment(&c, &tree, &weights(&[((0, 1), q_int(2))])).unwrap();
        assert_eq!(e.value(0, 1).unwrap(), q_int(2));
        assert_eq!(e.value(1, 0).unwrap(), q(1, 2));
    }

    #[test]
    fn tree_assignment_rejects_zero_weight() {
        let c = path3();
        let tree = c.base().spanning_structure(0);
        assert!(matches!(
            tree_assignment(&c, &tree, &weights(&[((0, 1), q_int(0)), ((1, 2), q_int(3))])),
            Err(MagError::Degenerate(_))
        ));
    }

    #[test]
    fn potentials_round_trip_on_path() {
        let c = path3();
        let tree = c.base().spanning_structure(0);
        let e = tree_assignment(
            &c,
            &tree,
            &weights(&[((0, 1), q_int(2)), ((1, 2), q_int(3))]),
        )
        .unwrap();
        let p = extract_potentials(&e, 0).unwrap();
        assert_eq!(p.values(), &[q_int(1), q_int(2), q_int(6)]);
        let rebuilt = p.rebuild(&c).unwrap();
        assert_eq!(rebuilt.values(), e.values());
    }

    #[test]
    fn potentials_detect_inconsistency() {
        let c = path3();
        let mut values = BTreeMap::new();
        values.insert((0, 1), q_int(2));
        values.insert((1, 2), q_int(3));
        values.insert((0, 2), q_int(5));
        let e = ScalarEnrichment::new(c, values).unwrap();
        assert_eq!(verify_cocycle(&e), vec![(0, 1, 2)]);
        assert!(matches!(
            extract_potentials(&e, 0),
            Err(MagError::Characterization(_, _))
        ));
    }

    #[test]
    fn rescaled_potentials_rebuild_identically() {
        let c = path3();
        let tree = c.base().spanning_structure(0);
        let e = tree_assignment(
            &c,
            &tree,
            &weights(&[((0, 1), q(7, 3)), ((1, 2), q(-2, 5))]),
        )
        .unwrap();
        let p = extract_potentials(&e, 0).unwrap();
        let scaled = Potentials {
            p: p.values().iter().map(|x| x * q(11, 4)).collect(),
            basepoint: 0,
        };
        assert_eq!(scaled.rebuild(&c).unwrap().values(), e.values());
    }

    #[test]
    fn cycle_report_flags_nonunit_arcs() {
        let d = Digraph::from_index_arcs(2, &[(0, 1), (1, 0)]).unwrap();
        let c = d.transitive_closure();
        let tree = d.spanning_structure(0);
        let e = tree_assignment(&c, &tree, &weights(&[((0, 1), q_int(2))])).unwrap();
        let report = cycle_unity_report(&e);
        assert_eq!(report.nonunit_cycle_arcs, vec![(0, 1), (1, 0)]);
        assert!(report.all_products_unit());

        let unit = tree_assignment(&c, &tree, &weights(&[((0, 1), q_int(1))])).unwrap();
        assert!(cycle_unity_report(&unit).nonunit_cycle_arcs.is_empty());
    }

    #[test]
    fn cycle_report_empty_on_dag() {
        let c = path3();
        let tree = c.base().spanning_structure(0);
        let e = tree_assignment(
            &c,
            &tree,
            &weights(&[((0, 1), q_int(2)), ((1, 2), q_int(3))]),
        )
        .unwrap();
        let report = cycle_unity_report(&e);
        assert!(report.nonunit_cycle_arcs.is_empty());
        assert!(report.cycle_products.is_empty());
    }
}
