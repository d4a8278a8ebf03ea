//! Frames of Hermitian matrices, the alpha and beta analysis maps, frame
//! bounds, and seeded generators for test frames.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::realify;
use crate::tol;
use crate::types::{eigh_desc, hermitian_part, is_hermitian, C64, CMat, ComplexMatrix, RMat, RVec};

/// An ordered measurement suite `{A_j}` of n x n Hermitian matrices.
///
/// Members need not be positive semidefinite; per-member PSD flags gate the
/// alpha-map operations. Whether the collection spans Sym(C^n) is recorded
/// but never required.
#[derive(Debug, Clone)]
pub struct HermitianFrame {
    dim_n: usize,
    target_r: usize,
    members: Vec<CMat>,
    psd_flags: Vec<bool>,
    spans_sym: bool,
}

impl HermitianFrame {
    pub fn new(dim_n: usize, target_r: usize, members: Vec<CMat>) -> Result<Self> {
        if dim_n == 0 || target_r == 0 || target_r > dim_n {
            return Err(Error::InvalidParameter(format!(
                "need n >= r >= 1, got n={dim_n}, r={target_r}"
            )));
        }
        if members.is_empty() {
            return Err(Error::InvalidParameter("frame needs at least one member".into()));
        }
        for (j, a) in members.iter().enumerate() {
            if a.shape() != (dim_n, dim_n) {
                return Err(Error::ShapeMismatch(format!(
                    "member {j} is {}x{}, expected {dim_n}x{dim_n}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            if a.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::NonFinite);
            }
            if !is_hermitian(a, tol::HERMITIAN_REL) {
                return Err(Error::MemberNotHermitian { index: j });
            }
        }
        let psd_flags = members.iter().map(member_is_psd).collect();
        let spans_sym = spans_symmetric_space(dim_n, &members);
        Ok(Self {
            dim_n,
            target_r,
            members,
            psd_flags,
            spans_sym,
        })
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn target_r(&self) -> usize {
        self.target_r
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, j: usize) -> &CMat {
        &self.members[j]
    }

    pub fn members(&self) -> &[CMat] {
        &self.members
    }

    pub fn psd_flags(&self) -> &[bool] {
        &self.psd_flags
    }

    /// True when every member is positive semidefinite.
    pub fn is_psd(&self) -> bool {
        self.psd_flags.iter().all(|&f| f)
    }

    /// Recorded spanning flag: the tau-lifted members span Sym(C^n).
    pub fn spans_sym(&self) -> bool {
        self.spans_sym
    }

    /// `sum_j A_j`, the frame operator restricted to rank-one probes.
    pub fn member_sum(&self) -> CMat {
        let mut s = CMat::zeros(self.dim_n, self.dim_n);
        for a in &self.members {
            s += a;
        }
        s
    }

    /// `sum_j ||A_j||_2^2`, a natural energy scale for thresholds.
    pub fn energy(&self) -> f64 {
        self.members.iter().map(|a| a.norm_squared()).sum()
    }
}

fn member_is_psd(a: &CMat) -> bool {
    let (eigs, _) = eigh_desc(a);
    let scale = eigs.iter().fold(0.0_f64, |m, &l| m.max(l.abs()));
    eigs.iter().all(|&l| l >= -tol::PSD_REL * scale.max(1e-300))
}

fn spans_symmetric_space(n: usize, members: &[CMat]) -> bool {
    let n2 = n * n;
    if members.len() < n2 {
        return false;
    }
    let mut rows = RMat::zeros(members.len(), n2);
    for (j, a) in members.iter().enumerate() {
        let t = realify::tau(&hermitian_part(a)).expect("member validated Hermitian");
        rows.row_mut(j).copy_from(&t.transpose());
    }
    let svals = rows.svd(false, false).singular_values;
    let s1 = svals[0];
    if s1 <= 0.0 {
        return false;
    }
    svals.iter().filter(|&&s| s > tol::RANK_TOL * s1).count() == n2
}

/// Which analysis map produced the values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Alpha,
    Beta,
}

/// Values of an analysis map at one point.
#[derive(Debug, Clone)]
pub struct AnalysisResult {
    values: RVec,
    map_kind: MapKind,
}

impl AnalysisResult {
    pub fn values(&self) -> &RVec {
        &self.values
    }

    pub fn map_kind(&self) -> MapKind {
        self.map_kind
    }
}

fn check_frame_point(frame: &HermitianFrame, z: &ComplexMatrix) -> Result<()> {
    if z.rows() != frame.dim_n {
        return Err(Error::ShapeMismatch(format!(
            "point has {} rows, frame acts on C^{}",
            z.rows(),
            frame.dim_n
        )));
    }
    Ok(())
}

/// `beta_j(z) = Re tr(A_j z z^*)`.
pub fn beta_map(frame: &HermitianFrame, z: &ComplexMatrix) -> Result<AnalysisResult> {
    check_frame_point(frame, z)?;
    let values = RVec::from_iterator(frame.len(), frame.members().iter().map(|a| beta_value(a, z.matrix())));
    Ok(AnalysisResult {
        values,
        map_kind: MapKind::Beta,
    })
}

pub(crate) fn beta_value(a: &CMat, z: &CMat) -> f64 {
    // Re tr(A z z^*) = Re tr(z^* A z), evaluated without forming z z^*.
    let az = a * z;
    let mut acc = 0.0;
    for (z_col, az_col) in z.column_iter().zip(az.column_iter()) {
        acc += z_col.dotc(&az_col).re;
    }
    acc
}

/// Entrywise square root of the beta map; requires a PSD frame. Negative
/// floating-point dust is clamped to zero.
pub fn alpha_map(frame: &HermitianFrame, z: &ComplexMatrix) -> Result<AnalysisResult> {
    if !frame.is_psd() {
        return Err(Error::FrameNotPsd);
    }
    let beta = beta_map(frame, z)?;
    let values = beta.values.map(|b| b.max(0.0).sqrt());
    Ok(AnalysisResult {
        values,
        map_kind: MapKind::Alpha,
    })
}

/// Extremal Rayleigh quotients of `sum_j A_j`. For PSD frames these are the
/// optimal frame bounds; for general Hermitian frames the lower value may be
/// nonpositive.
pub fn frame_bounds(frame: &HermitianFrame) -> (f64, f64) {
    let (eigs, _) = eigh_desc(&frame.member_sum());
    (*eigs.last().expect("nonempty"), eigs[0])
}

/// Seeded frame generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// `{I, X, Y, Z}` on C^2.
    Pauli,
    /// Hermitian parts of matrices with independent complex Gaussian entries.
    RandomHermitian,
    /// `A_j = f_j f_j^*` for complex Gaussian vectors `f_j`.
    RandomRank1,
}

/// The Pauli suite on C^2.
pub fn pauli_members() -> Vec<CMat> {
    let c = |re: f64, im: f64| C64::new(re, im);
    vec![
        CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
        CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
        CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]),
        CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
    ]
}

pub(crate) fn complex_gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

/// Deterministic frame generation: identical seeds give identical frames.
pub fn generate_frame(
    kind: GeneratorKind,
    n: usize,
    r: usize,
    m: usize,
    seed: u64,
) -> Result<HermitianFrame> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let members = match kind {
        GeneratorKind::Pauli => {
            if n != 2 || m != 4 {
                return Err(Error::InvalidParameter(
                    "the Pauli suite requires n=2, m=4".into(),
                ));
            }
            pauli_members()
        }
        GeneratorKind::RandomHermitian => (0..m)
            .map(|_| {
                let g = complex_gaussian_matrix(&mut rng, n, n);
                hermitian_part(&g)
            })
            .collect(),
        GeneratorKind::RandomRank1 => (0..m)
            .map(|_| {
                let f = complex_gaussian_matrix(&mut rng, n, 1);
                &f * f.adjoint()
            })
            .collect(),
    };
    HermitianFrame::new(n, r, members)
}
