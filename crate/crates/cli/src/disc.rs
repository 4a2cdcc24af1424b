//! Disc documents `{grid_N, U, V, W_re, W_im, t, base, regularity_tag}`,
//! arrays in grid order, one array per component.

use crdisc_core::bishop::{AnalyticDisc, BishopError, RegularityTag};
use crdisc_core::circle::{CircleError, CircleGrid, ComplexFunction, RealFunction};
use crdisc_core::manifolds::{ManifoldPoint, SharedModel};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum DiscDocError {
    #[error("disc: {0}")]
    Shape(&'static str),
    #[error("disc: {0}")]
    Circle(#[from] CircleError),
    #[error("disc: {0}")]
    Bishop(#[from] BishopError),
    #[error("disc JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TagDoc {
    F2alpha,
    C1gamma,
    Smooth,
}

impl From<RegularityTag> for TagDoc {
    fn from(t: RegularityTag) -> Self {
        match t {
            RegularityTag::F2Alpha => TagDoc::F2alpha,
            RegularityTag::C1Gamma => TagDoc::C1gamma,
            RegularityTag::Smooth => TagDoc::Smooth,
        }
    }
}

impl From<TagDoc> for RegularityTag {
    fn from(t: TagDoc) -> Self {
        match t {
            TagDoc::F2alpha => RegularityTag::F2Alpha,
            TagDoc::C1gamma => RegularityTag::C1Gamma,
            TagDoc::Smooth => RegularityTag::Smooth,
        }
    }
}

/// Base point `p = A(1)` split into real arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseDoc {
    pub z_re: Vec<f64>,
    pub z_im: Vec<f64>,
    pub w_re: Vec<f64>,
    pub w_im: Vec<f64>,
}

#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscDoc {
    pub grid_N: usize,
    pub U: Vec<Vec<f64>>,
    pub V: Vec<Vec<f64>>,
    pub W_re: Vec<Vec<f64>>,
    pub W_im: Vec<Vec<f64>>,
    pub t: Option<Vec<f64>>,
    pub base: BaseDoc,
    pub regularity_tag: TagDoc,
}

fn split(z: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    (z.iter().map(|c| c.re).collect(), z.iter().map(|c| c.im).collect())
}

fn join(re: &[f64], im: &[f64]) -> Result<Vec<Complex64>, DiscDocError> {
    if re.len() != im.len() {
        return Err(DiscDocError::Shape("real and imaginary parts differ in length"));
    }
    Ok(re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect())
}

impl DiscDoc {
    pub fn from_disc(disc: &AnalyticDisc) -> Self {
        let real = |fs: &[RealFunction]| fs.iter().map(|f| f.values().to_vec()).collect();
        let (z_re, z_im) = split(&disc.base().z);
        let (w_re, w_im) = split(&disc.base().w);
        DiscDoc {
            grid_N: disc.grid().len(),
            U: real(disc.u()),
            V: real(disc.v()),
            W_re: disc.w().iter().map(|f| f.re().into_values()).collect(),
            W_im: disc.w().iter().map(|f| f.im().into_values()).collect(),
            t: disc.t_data().map(|f| f.values().to_vec()),
            base: BaseDoc { z_re, z_im, w_re, w_im },
            regularity_tag: disc.regularity().into(),
        }
    }

    /// Rebuilds the disc on `h`, the model it was solved for (documents do
    /// not carry the model).
    pub fn into_disc(self, h: SharedModel) -> Result<AnalyticDisc, DiscDocError> {
        let grid = CircleGrid::new(self.grid_N)?;
        let real = |arrays: Vec<Vec<f64>>| -> Result<Vec<RealFunction>, DiscDocError> {
            arrays.into_iter().map(|a| Ok(RealFunction::new(&grid, a)?)).collect()
        };
        if self.W_re.len() != self.W_im.len() {
            return Err(DiscDocError::Shape("W_re and W_im differ in length"));
        }
        let w = self
            .W_re
            .iter()
            .zip(&self.W_im)
            .map(|(re, im)| Ok(ComplexFunction::new(&grid, join(re, im)?)?))
            .collect::<Result<Vec<_>, DiscDocError>>()?;
        let t = self.t.map(|a| RealFunction::new(&grid, a)).transpose()?;
        let base = ManifoldPoint { z: join(&self.base.z_re, &self.base.z_im)?, w: join(&self.base.w_re, &self.base.w_im)? };
        Ok(AnalyticDisc::from_parts(h, real(self.U)?, real(self.V)?, w, base, t, self.regularity_tag.into())?)
    }

    pub fn from_json(text: &str) -> Result<Self, DiscDocError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("disc documents always serialize")
    }
}
