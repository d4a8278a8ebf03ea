//! JSON interchange documents for matrices, frames, paths, and reports.
//!
//! Documents are plain serde structs; numbers round-trip f64 bit-exactly
//! under serde_json. Frame members are validated Hermitian on load (hard
//! error naming the offending member) and then symmetrized exactly, which
//! is a no-op on already-Hermitian bit patterns.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::HermitianFrame;
use crate::search::{Certificate, ConditionChecks, StartSummary, Verdict};
use crate::stability::{AlphaLocalBounds, BetaLocalBounds, LocalBounds, QuadForm, QuadFormKind};
use crate::tangent::GeodesicPath;
use crate::tol;
use crate::types::{hermitian_part, is_hermitian, C64, CMat, ComplexMatrix};

/// A dense complex matrix as `[re, im]` pairs, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
}

impl MatrixDocument {
    pub fn from_matrix(m: &CMat) -> Self {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let c = m[(i, j)];
                data.push([c.re, c.im]);
            }
        }
        Self {
            rows,
            cols,
            data,
            tag: None,
        }
    }

    pub fn from_complex(x: &ComplexMatrix) -> Self {
        Self::from_matrix(x.matrix())
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::BadShape {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if self.data.len() != self.rows * self.cols {
            return Err(Error::ShapeMismatch(format!(
                "document declares {}x{} but carries {} entries",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        if self.data.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CMat::from_fn(self.rows, self.cols, |i, j| {
            let p = self.data[i * self.cols + j];
            C64::new(p[0], p[1])
        }))
    }

    /// Interprets the document as a tall quotient representative.
    pub fn to_complex(&self) -> Result<ComplexMatrix> {
        ComplexMatrix::new(self.to_matrix()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameMetadata {
    pub generator: String,
    pub seed: u64,
}

/// A measurement frame on the wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameDocument {
    pub n: usize,
    pub r: usize,
    pub m: usize,
    pub members: Vec<MatrixDocument>,
    pub metadata: FrameMetadata,
}

impl FrameDocument {
    pub fn from_frame(frame: &HermitianFrame, metadata: FrameMetadata) -> Self {
        Self {
            n: frame.dim_n(),
            r: frame.target_r(),
            m: frame.len(),
            members: frame.members().iter().map(MatrixDocument::from_matrix).collect(),
            metadata,
        }
    }

    pub fn to_frame(&self) -> Result<HermitianFrame> {
        if self.members.len() != self.m {
            return Err(Error::ShapeMismatch(format!(
                "document declares m = {} but carries {} members",
                self.m,
                self.members.len()
            )));
        }
        let mut members = Vec::with_capacity(self.m);
        for (j, doc) in self.members.iter().enumerate() {
            let raw = doc.to_matrix()?;
            if raw.shape() != (self.n, self.n) {
                return Err(Error::ShapeMismatch(format!(
                    "member {j} is {}x{}, expected {}x{}",
                    raw.nrows(),
                    raw.ncols(),
                    self.n,
                    self.n
                )));
            }
            if !is_hermitian(&raw, tol::HERMITIAN_LOAD_REL) {
                return Err(Error::MemberNotHermitian { index: j });
            }
            members.push(hermitian_part(&raw));
        }
        HermitianFrame::new(self.n, self.r, members)
    }
}

/// Serialized local bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalBoundsDocument {
    pub base_rank: usize,
    pub z_norm: f64,
    pub sigma_min: f64,
    pub a: f64,
    pub a_hat: f64,
    pub a_hat_1: f64,
    pub a_hat_2: f64,
    pub sandwich_lower: f64,
    pub sandwich_upper: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_hat_1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_hat_2: Option<f64>,
}

impl From<&LocalBounds> for LocalBoundsDocument {
    fn from(b: &LocalBounds) -> Self {
        let BetaLocalBounds {
            a,
            a_hat,
            a_hat_1,
            a_hat_2,
            sandwich,
        } = b.beta.clone();
        let (alpha_hat_1, alpha_hat_2) = match &b.alpha {
            Some(AlphaLocalBounds {
                alpha_hat_1,
                alpha_hat_2,
            }) => (Some(*alpha_hat_1), Some(*alpha_hat_2)),
            None => (None, None),
        };
        Self {
            base_rank: b.base_rank,
            z_norm: b.z_norm,
            sigma_min: b.sigma_min,
            a,
            a_hat,
            a_hat_1,
            a_hat_2,
            sandwich_lower: sandwich.0,
            sandwich_upper: sandwich.1,
            alpha_hat_1,
            alpha_hat_2,
        }
    }
}

/// Serialized quadratic form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadFormDocument {
    pub kind: String,
    pub size: usize,
    pub base_rank: usize,
    pub n: usize,
    pub m: usize,
    /// Row-major entries of the symmetric matrix.
    pub data: Vec<f64>,
}

impl From<&QuadForm> for QuadFormDocument {
    fn from(q: &QuadForm) -> Self {
        let kind = match q.kind() {
            QuadFormKind::Qz => "qz",
            QuadFormKind::Qhat => "qhat",
            QuadFormKind::That => "that",
            QuadFormKind::Rhat => "rhat",
            QuadFormKind::ThatPlusRhat => "that_plus_rhat",
        };
        let size = q.size();
        let mut data = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                data.push(q.matrix()[(i, j)]);
            }
        }
        Self {
            kind: kind.to_string(),
            size,
            base_rank: q.base_rank(),
            n: q.dim_n(),
            m: q.members(),
            data,
        }
    }
}

/// Serialized per-start summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartSummaryDocument {
    pub start: usize,
    pub initial: f64,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl From<&StartSummary> for StartSummaryDocument {
    fn from(s: &StartSummary) -> Self {
        Self {
            start: s.start,
            initial: s.initial,
            value: s.value,
            iterations: s.iterations,
            converged: s.converged,
        }
    }
}

/// Serialized certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub verdict: String,
    pub a0_estimate: f64,
    pub bracket_lower: f64,
    pub bracket_upper: f64,
    pub witness_u: MatrixDocument,
    pub samples: usize,
    pub rank_condition: bool,
    pub null_space_condition: bool,
    pub span_condition: bool,
    pub frame_scale: f64,
    pub positivity_threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collision_x: Option<MatrixDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collision_y: Option<MatrixDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collision_beta_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collision_pi_gap: Option<f64>,
    pub starts: Vec<StartSummaryDocument>,
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Retrievable => "retrievable",
        Verdict::NotRetrievable => "not_retrievable",
        Verdict::Inconclusive => "inconclusive",
    }
}

impl From<&Certificate> for CertificateDocument {
    fn from(c: &Certificate) -> Self {
        let ConditionChecks {
            samples,
            rank_condition,
            null_space_condition,
            span_condition,
        } = c.condition_checks.clone();
        Self {
            verdict: verdict_name(c.verdict).to_string(),
            a0_estimate: c.a0_estimate,
            bracket_lower: c.bracket.0,
            bracket_upper: c.bracket.1,
            witness_u: MatrixDocument::from_matrix(&c.witness_u),
            samples,
            rank_condition,
            null_space_condition,
            span_condition,
            frame_scale: c.frame_scale,
            positivity_threshold: c.positivity_threshold,
            collision_x: c.collision.as_ref().map(|w| MatrixDocument::from_complex(&w.x)),
            collision_y: c.collision.as_ref().map(|w| MatrixDocument::from_complex(&w.y)),
            collision_beta_gap: c.collision.as_ref().map(|w| w.beta_gap),
            collision_pi_gap: c.collision.as_ref().map(|w| w.pi_gap),
            starts: c.a0_starts.iter().map(StartSummaryDocument::from).collect(),
        }
    }
}

/// Serialized geodesic path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicDocument {
    pub x: MatrixDocument,
    pub y: MatrixDocument,
    pub aligner: MatrixDocument,
    pub samples: Vec<GeodesicSampleDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSampleDocument {
    pub t: f64,
    pub rank: usize,
    pub matrix: MatrixDocument,
}

impl From<&GeodesicPath> for GeodesicDocument {
    fn from(p: &GeodesicPath) -> Self {
        Self {
            x: MatrixDocument::from_complex(&p.x),
            y: MatrixDocument::from_complex(&p.y),
            aligner: MatrixDocument::from_matrix(&p.aligner),
            samples: p
                .samples
                .iter()
                .map(|(t, point)| GeodesicSampleDocument {
                    t: *t,
                    rank: point.rank(),
                    matrix: MatrixDocument::from_matrix(point.matrix()),
                })
                .collect(),
        }
    }
}
