//! Model documents: `{type, k, eps, side, coeffs, collar: {direction}}`.

use std::f64::consts::FRAC_1_SQRT_2;

use crdisc_core::manifolds::{
    extend_with_collar, model_sector_hypersurface, polynomial_model, shared, FlatModel, ManifoldError, Monomial, SharedModel, Side,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("model: {0}")]
    Invalid(&'static str),
    #[error("model: {0}")]
    Manifold(#[from] ManifoldError),
    #[error("model JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Sector,
    Polynomial,
    Flat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideDoc {
    Plus,
    Minus,
}

impl From<SideDoc> for Side {
    fn from(s: SideDoc) -> Side {
        match s {
            SideDoc::Plus => Side::Plus,
            SideDoc::Minus => Side::Minus,
        }
    }
}

/// One monomial `c x^x w^a w̄^b`; `c` holds one `[re, im]` pair per output
/// component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffDoc {
    pub x: Vec<u32>,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub c: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollarDoc {
    pub direction: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    #[serde(rename = "type")]
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<SideDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<CoeffDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collar: Option<CollarDoc>,
}

pub const DEFAULT_EPS: f64 = 0.05;

impl ModelDoc {
    pub fn sector(k: u32, eps: f64, side: SideDoc) -> Self {
        ModelDoc { kind: ModelKind::Sector, k: Some(k), eps: Some(eps), side: Some(side), coeffs: None, collar: None }
    }

    pub fn flat() -> Self {
        ModelDoc { kind: ModelKind::Flat, k: None, eps: None, side: None, coeffs: None, collar: None }
    }

    /// `n = 3, d = 2`: `h_1 = |w|^2 Re w + 3 x_1 |w|^2`, `h_2 = |w|^2 Im w - x_2 |w|^2`.
    /// The two `x` couplings differ, so transport along a disc turns vectors.
    pub fn coupled() -> Self {
        let term = |x: [u32; 2], a: u32, b: u32, c: [[f64; 2]; 2]| CoeffDoc { x: x.to_vec(), a: vec![a], b: vec![b], c: c.to_vec() };
        let coeffs = vec![
            term([0, 0], 2, 1, [[0.5, 0.0], [0.0, -0.5]]),
            term([0, 0], 1, 2, [[0.5, 0.0], [0.0, 0.5]]),
            term([1, 0], 1, 1, [[3.0, 0.0], [0.0, 0.0]]),
            term([0, 1], 1, 1, [[0.0, 0.0], [-1.0, 0.0]]),
        ];
        ModelDoc { kind: ModelKind::Polynomial, k: None, eps: None, side: None, coeffs: Some(coeffs), collar: None }
    }

    /// The coupled model with collar direction `(1, 1)/sqrt 2`.
    pub fn coupled_collar() -> Self {
        ModelDoc::coupled().with_collar(vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2])
    }

    pub fn with_collar(mut self, direction: Vec<f64>) -> Self {
        self.collar = Some(CollarDoc { direction });
        self
    }

    pub fn without_collar(&self) -> Self {
        ModelDoc { collar: None, ..self.clone() }
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model documents always serialize")
    }

    pub fn side(&self) -> Side {
        self.side.unwrap_or(SideDoc::Plus).into()
    }

    /// Codimension `d` implied by the document.
    pub fn codim(&self) -> Result<usize, ModelError> {
        match self.kind {
            ModelKind::Sector => Ok(1),
            ModelKind::Flat => Ok(self.collar.as_ref().map_or(1, |c| c.direction.len()).max(1)),
            ModelKind::Polynomial => {
                let coeffs = self.coeffs.as_ref().ok_or(ModelError::Invalid("polynomial model needs coeffs"))?;
                coeffs.first().map(|t| t.c.len()).ok_or(ModelError::Invalid("polynomial model needs at least one term"))
            }
        }
    }

    /// Order used for the vertex regularity `gamma = k alpha - 1`: the sector
    /// `k`, or the lowest degree of an `x`-free polynomial term. `None` for
    /// flat models, whose discs are smooth.
    pub fn vertex_order(&self) -> Option<u32> {
        match self.kind {
            ModelKind::Sector => self.k,
            ModelKind::Flat => None,
            ModelKind::Polynomial => self
                .coeffs
                .as_ref()?
                .iter()
                .filter(|t| t.x.iter().all(|&e| e == 0))
                .map(|t| t.a.iter().chain(&t.b).sum())
                .min(),
        }
    }

    pub fn build(&self) -> Result<SharedModel, ModelError> {
        let base: SharedModel = match self.kind {
            ModelKind::Sector => {
                if self.coeffs.is_some() {
                    return Err(ModelError::Invalid("sector model takes no coeffs"));
                }
                let k = self.k.ok_or(ModelError::Invalid("sector model needs k"))?;
                shared(model_sector_hypersurface(k, self.eps.unwrap_or(DEFAULT_EPS), self.side())?)
            }
            ModelKind::Flat => {
                if self.coeffs.is_some() {
                    return Err(ModelError::Invalid("flat model takes no coeffs"));
                }
                shared(FlatModel { d: self.codim()?, m: 1 })
            }
            ModelKind::Polynomial => {
                let coeffs = self.coeffs.as_ref().ok_or(ModelError::Invalid("polynomial model needs coeffs"))?;
                let d = self.codim()?;
                let m = coeffs[0].a.len();
                let terms = coeffs
                    .iter()
                    .map(|t| Monomial {
                        x: t.x.clone(),
                        a: t.a.clone(),
                        b: t.b.clone(),
                        coef: t.c.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
                    })
                    .collect();
                shared(polynomial_model(d, m, terms)?)
            }
        };
        match &self.collar {
            Some(c) => Ok(shared(extend_with_collar(base, &c.direction)?)),
            None => Ok(base),
        }
    }
}
