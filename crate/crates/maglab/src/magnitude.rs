//! Similarity matrices, size maps, weightings, coweightings, and magnitude.
//!
//! A similarity matrix carries either exact rational entries (scalar and
//! determinant enrichments) or floats (Schatten and capacity sizes). The
//! rational path decides consistency of `Zw = 1` exactly; the float path uses
//! singular values with tolerance `1e-10 * sigma_max` for rank decisions and
//! accepts a minimum-norm least-squares solution only when its residual is at
//! most `1e-8`.

use nalgebra::{DMatrix, DVector};
use num::{BigInt, One, Zero};

use crate::channels::ChannelNetwork;
use crate::cocycle::ScalarEnrichment;
use crate::error::{MagError, Result};
use crate::matrix_cat::{KroneckerEnrichment, MatMulEnrichment, SchattenP};
use crate::ratio::{q_to_f64, Q};
use crate::ratlin::MatQ;

pub const FLOAT_RANK_TOL: f64 = 1e-10;
pub const FLOAT_RESIDUAL_TOL: f64 = 1e-8;
pub const MAGNITUDE_SUM_TOL: f64 = 1e-9;

/// Multiplicative size maps on hom-objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeMap {
    /// Scalars size themselves.
    Identity,
    /// Square matrices under matrix multiplication.
    Determinant,
    /// Rectangular matrices under the Kronecker product.
    Schatten(SchattenP),
    /// Stochastic matrices under the Kronecker product.
    ExpCapacity,
}

impl SizeMap {
    fn name(self) -> &'static str {
        match self {
            SizeMap::Identity => "identity",
            SizeMap::Determinant => "determinant",
            SizeMap::Schatten(_) => "schatten",
            SizeMap::ExpCapacity => "exp-capacity",
        }
    }
}

/// An enrichment of any supported kind, for size-map dispatch.
#[derive(Debug, Clone, Copy)]
pub enum Enrichment<'a> {
    Scalar(&'a ScalarEnrichment),
    MatMul(&'a MatMulEnrichment),
    Kronecker(&'a KroneckerEnrichment),
    Network(&'a ChannelNetwork),
}

impl Enrichment<'_> {
    fn kind(&self) -> &'static str {
        match self {
            Enrichment::Scalar(_) => "scalar",
            Enrichment::MatMul(_) => "matrix-multiplication",
            Enrichment::Kronecker(_) => "kronecker",
            Enrichment::Network(_) => "channel-network",
        }
    }
}

/// Applies a size map to an enrichment, producing the similarity matrix with
/// unit diagonal and zeros off the reachability support.
pub fn similarity_matrix(e: Enrichment<'_>, size_map: SizeMap) -> Result<SimilarityMatrix> {
    match (e, size_map) {
        (Enrichment::Scalar(s), SizeMap::Identity) => Ok(SimilarityMatrix::from_scalar(s)),
        (Enrichment::MatMul(m), SizeMap::Determinant) => Ok(crate::matrix_cat::det_size(m)),
        (Enrichment::Kronecker(k), SizeMap::Schatten(p)) => {
            Ok(crate::matrix_cat::schatten_size(k, p))
        }
        (Enrichment::Network(n), SizeMap::ExpCapacity) => Ok(n.similarity().clone()),
        (e, s) => Err(MagError::SizeMapMismatch {
            size_map: s.name(),
            enrichment: e.kind(),
        }),
    }
}

/// Entry data of a similarity matrix: exact or floating point.
#[derive(Debug, Clone)]
pub enum SimData {
    Rational(MatQ),
    Real(DMatrix<f64>),
}

/// A square similarity matrix indexed by the vertices of the base digraph.
#[derive(Debug, Clone)]
pub struct SimilarityMatrix {
    labels: Vec<String>,
    data: SimData,
}

/// A weighting or coweighting vector in the matching arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub enum Weighting {
    Rational(Vec<Q>),
    Real(Vec<f64>),
}

impl Weighting {
    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Weighting::Rational(v) => v.iter().map(q_to_f64).collect(),
            Weighting::Real(v) => v.clone(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Weighting::Rational(v) => v.len(),
            Weighting::Real(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Magnitude in the matching arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub enum Magnitude {
    Rational(Q),
    Real(f64),
}

impl Magnitude {
    pub fn to_f64(&self) -> f64 {
        match self {
            Magnitude::Rational(v) => q_to_f64(v),
            Magnitude::Real(v) => *v,
        }
    }
}

/// Null-space basis of a similarity matrix.
#[derive(Debug, Clone)]
pub enum KernelVectors {
    Rational(Vec<Vec<BigInt>>),
    Real(Vec<Vec<f64>>),
}

impl KernelVectors {
    pub fn dimension(&self) -> usize {
        match self {
            KernelVectors::Rational(v) => v.len(),
            KernelVectors::Real(v) => v.len(),
        }
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        match self {
            KernelVectors::Rational(v) => v
                .iter()
                .map(|vec| {
                    vec.iter()
                        .map(|n| q_to_f64(&Q::from_integer(n.clone())))
                        .collect()
                })
                .collect(),
            KernelVectors::Real(v) => v.clone(),
        }
    }
}

/// Particular solution of `Zw = 1` (when consistent), the kernel of `Z`, the
/// coweighting, and the magnitude when defined.
#[derive(Debug, Clone)]
pub struct WeightingSpace {
    pub particular: Option<Weighting>,
    pub kernel: KernelVectors,
    pub coweighting: Option<Weighting>,
    pub magnitude: Option<Magnitude>,
}

impl SimilarityMatrix {
    pub fn from_scalar(e: &ScalarEnrichment) -> Self {
        let d = e.closure().base();
        let n = d.vertex_count();
        let mut m = MatQ::identity(n);
        for &(j, k) in e.closure().nonloop_arcs() {
            m[(j, k)] = e.value(j, k).expect("closure arc");
        }
        SimilarityMatrix {
            labels: d.vertex_names().to_vec(),
            data: SimData::Rational(m),
        }
    }

    pub fn from_rational(labels: Vec<String>, m: MatQ) -> Self {
        assert!(m.is_square() && m.nrows() == labels.len());
        SimilarityMatrix {
            labels,
            data: SimData::Rational(m),
        }
    }

    pub fn from_real(labels: Vec<String>, m: DMatrix<f64>) -> Self {
        assert!(m.is_square() && m.nrows() == labels.len());
        SimilarityMatrix {
            labels,
            data: SimData::Real(m),
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        match &self.data {
            SimData::Rational(m) => m.nrows(),
            SimData::Real(m) => m.nrows(),
        }
    }

    pub fn data(&self) -> &SimData {
        &self.data
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.data, SimData::Rational(_))
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        match &self.data {
            SimData::Rational(m) => m.to_f64(),
            SimData::Real(m) => m.clone(),
        }
    }

    pub fn transpose(&self) -> SimilarityMatrix {
        SimilarityMatrix {
            labels: self.labels.clone(),
            data: match &self.data {
                SimData::Rational(m) => SimData::Rational(m.transpose()),
                SimData::Real(m) => SimData::Real(m.transpose()),
            },
        }
    }

    /// A solution of `Zw = 1`, or `None` when the system is inconsistent.
    pub fn weighting(&self) -> Option<Weighting> {
        match &self.data {
            SimData::Rational(m) => {
                let ones = vec![Q::one(); m.nrows()];
                m.solve(&ones).map(Weighting::Rational)
            }
            SimData::Real(m) => float_solve(m).map(Weighting::Real),
        }
    }

    /// The transpose of a weighting for the transpose matrix.
    pub fn coweighting(&self) -> Option<Weighting> {
        self.transpose().weighting()
    }

    /// Sum of the weighting components when both a weighting and a
    /// coweighting exist. The two sums are checked against each other.
    pub fn magnitude(&self) -> Result<Option<Magnitude>> {
        let (Some(w), Some(v)) = (self.weighting(), self.coweighting()) else {
            return Ok(None);
        };
        match (w, v) {
            (Weighting::Rational(w), Weighting::Rational(v)) => {
                let sw: Q = w.iter().cloned().sum();
                let sv: Q = v.iter().cloned().sum();
                if sw != sv {
                    return Err(MagError::MagnitudeMismatch(sw.to_string(), sv.to_string()));
                }
                Ok(Some(Magnitude::Rational(sw)))
            }
            (Weighting::Real(w), Weighting::Real(v)) => {
                let sw: f64 = w.iter().sum();
                let sv: f64 = v.iter().sum();
                let scale = sw.abs().max(sv.abs()).max(1.0);
                if (sw - sv).abs() > MAGNITUDE_SUM_TOL * scale {
                    return Err(MagError::MagnitudeMismatch(sw.to_string(), sv.to_string()));
                }
                Ok(Some(Magnitude::Real(sw)))
            }
            _ => unreachable!("transpose preserves the backend"),
        }
    }

    /// Particular solution, kernel basis, coweighting, and magnitude.
    pub fn weighting_space(&self) -> Result<WeightingSpace> {
        let particular = self.weighting();
        let coweighting = self.coweighting();
        let kernel = match &self.data {
            SimData::Rational(m) => KernelVectors::Rational(m.null_space()),
            SimData::Real(m) => KernelVectors::Real(float_null_space(m)),
        };
        let magnitude = match (&particular, &coweighting) {
            (Some(_), Some(_)) => self.magnitude()?,
            _ => None,
        };
        Ok(WeightingSpace {
            particular,
            kernel,
            coweighting,
            magnitude,
        })
    }

    /// The entrywise log-dissimilarity `d = -tau * log Z` on the support,
    /// with `+inf` off support.
    pub fn log_dissimilarity(&self, tau: f64) -> Result<DMatrix<f64>> {
        let z = self.to_f64();
        let n = z.nrows();
        let mut d = DMatrix::from_element(n, n, f64::INFINITY);
        for i in 0..n {
            for j in 0..n {
                let zij = z[(i, j)];
                if self.in_support(i, j) {
                    if zij <= 0.0 {
                        return Err(MagError::LogDomain {
                            row: i,
                            col: j,
                            value: zij,
                        });
                    }
                    d[(i, j)] = -tau * zij.ln();
                }
            }
        }
        Ok(d)
    }

    fn in_support(&self, i: usize, j: usize) -> bool {
        match &self.data {
            SimData::Rational(m) => !m[(i, j)].is_zero(),
            SimData::Real(m) => m[(i, j)] != 0.0,
        }
    }
}

fn float_solve(m: &DMatrix<f64>) -> Option<Vec<f64>> {
    let n = m.nrows();
    let ones = DVector::from_element(n, 1.0);
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = FLOAT_RANK_TOL * smax.max(1.0);
    let w = svd.solve(&ones, eps).ok()?;
    let residual = (m * &w - &ones).amax();
    (residual <= FLOAT_RESIDUAL_TOL).then(|| w.iter().copied().collect())
}

fn float_null_space(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = FLOAT_RANK_TOL * smax.max(1.0);
    let v_t = svd.v_t.as_ref().expect("computed");
    let mut basis = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= eps {
            let mut v: Vec<f64> = v_t.row(i).iter().copied().collect();
            if let Some(lead) = v.iter().find(|x| x.abs() > 1e-12) {
                if *lead < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
            basis.push(v);
        }
    }
    basis
}
